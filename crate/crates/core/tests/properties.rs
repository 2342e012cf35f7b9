use std::f64::consts::SQRT_2;

use nonlocal_core::bell::{
    graph_bell_value, graph_diagonal_state, mk_operator_value, GraphBellOperator,
    GraphDiagonalWeights,
};
use nonlocal_core::channels::{apply_channel, apply_channel_all, dephased_ghz_z, PauliChannel};
use nonlocal_core::chsh::{chsh_value, conditioned_m_chsh, m_chsh, optimal_chsh_settings};
use nonlocal_core::qstate::{
    expectation, ghz_state, graph_state, partial_trace, project_and_condition, pure_to_density,
    w_state, DensityMatrix, GraphSpec, Mat2, Observable, Outcome, Projection, PureState,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_pure(rng: &mut impl Rng, n: usize) -> PureState {
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    PureState::new(n, amps.iter().map(|a| a / norm).collect()).unwrap()
}

/// Mixture of up to four random pure states with random weights.
fn random_mixed(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    let k = rng.gen_range(1..=4);
    let states: Vec<DensityMatrix> = (0..k).map(|_| pure_to_density(&random_pure(rng, n))).collect();
    let w: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let parts: Vec<(f64, &DensityMatrix)> = w.iter().map(|x| x / total).zip(&states).collect();
    DensityMatrix::mixture(&parts).unwrap()
}

fn random_observable(rng: &mut impl Rng) -> Observable {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    Observable::from_angles(z.acos(), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `Rz(a) Ry(b) Rz(c)`.
fn unitary(a: f64, b: f64, c: f64) -> Mat2 {
    let e = |t: f64| Complex64::from_polar(1.0, t);
    let (s, co) = (b / 2.0).sin_cos();
    [
        [e(-(a + c) / 2.0) * co, -e(-(a - c) / 2.0) * s],
        [e((a - c) / 2.0) * s, e((a + c) / 2.0) * co],
    ]
}

#[test]
fn constructors_are_valid_states() {
    for n in 1..=8 {
        pure_to_density(&ghz_state(n).unwrap()).validate().unwrap();
        if n >= 2 {
            pure_to_density(&w_state(n).unwrap()).validate().unwrap();
            for g in [GraphSpec::star(n).unwrap(), GraphSpec::path(n).unwrap()] {
                pure_to_density(&graph_state(&g).unwrap()).validate().unwrap();
            }
        }
    }
}

#[test]
fn optimal_settings_reach_twice_m_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for _ in 0..1000 {
        let rho = random_mixed(&mut rng, 2);
        let m = m_chsh(&rho).unwrap();
        assert!((0.0..=SQRT_2 + 1e-12).contains(&m));
        let (s, v) = optimal_chsh_settings(&rho).unwrap();
        assert!((v - 2.0 * m).abs() < 1e-9);
        assert!((chsh_value(&rho, &s).unwrap() - 2.0 * m).abs() < 1e-9);
    }
}

#[test]
fn mk_respects_local_bound_on_product_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for i in 0..500 {
        let n = 2 + i % 4;
        let local: Vec<Observable> = (0..n).map(|_| random_observable(&mut rng)).collect();
        let rho = pure_to_density(&PureState::product(&local).unwrap());
        let settings: Vec<(Observable, Observable)> = (0..n)
            .map(|_| (random_observable(&mut rng), random_observable(&mut rng)))
            .collect();
        assert!(mk_operator_value(&rho, &settings).unwrap() <= 1.0 + 1e-10);
    }
}

#[test]
fn ghz_outcome_patterns_are_equivalent() {
    for n in 3..=6 {
        for p in [0.0, 0.2, 0.55, 0.9] {
            let rho = dephased_ghz_z(n, p).unwrap();
            let ms: Vec<f64> = (0..1usize << (n - 2))
                .map(|pattern| {
                    let proj: Vec<Projection> = Outcome::pattern(pattern, n - 2)
                        .into_iter()
                        .enumerate()
                        .map(|(q, o)| Projection::new(q, Observable::x(), o))
                        .collect();
                    conditioned_m_chsh(&rho, &proj, (n - 2, n - 1)).unwrap().m.unwrap()
                })
                .collect();
            assert!(ms.iter().all(|m| (m - ms[0]).abs() < 1e-10), "n={n} p={p}: {ms:?}");
        }
    }
}

fn arb_graph() -> impl Strategy<Value = GraphSpec> {
    (2usize..=8).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits[k] {
                        edges.push((a, b));
                    }
                    k += 1;
                }
            }
            GraphSpec::new(n, edges).unwrap()
        })
    })
}

fn arb_channel() -> impl Strategy<Value = PauliChannel> {
    (0.0f64..=1.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(p, u, v)| {
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        PauliChannel::new(p, [lo, hi - lo, 1.0 - hi]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_state_is_stabilized(g in arb_graph()) {
        let rho = pure_to_density(&graph_state(&g).unwrap());
        for v in 0..g.n_vertices() {
            let k = g.generator(v);
            prop_assert!((expectation(&rho, &k.matrices()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn outcome_probabilities_sum_to_one(n in 3usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(&mut rng, n);
        let obs: Vec<Observable> = (0..n - 2).map(|_| random_observable(&mut rng)).collect();
        let total: f64 = (0..1usize << (n - 2))
            .map(|pattern| {
                let proj: Vec<Projection> = Outcome::pattern(pattern, n - 2)
                    .into_iter()
                    .zip(&obs)
                    .enumerate()
                    .map(|(q, (o, &a))| Projection::new(q, a, o))
                    .collect();
                project_and_condition(&rho, &proj).unwrap().probability
            })
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_of_product(na in 1usize..=3, nb in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_pure(&mut rng, na);
        let b = random_pure(&mut rng, nb);
        let joint = pure_to_density(&a.tensor(&b).unwrap());
        let keep: Vec<usize> = (0..na).collect();
        let reduced = partial_trace(&joint, &keep).unwrap();
        prop_assert!(reduced.max_abs_diff(&pure_to_density(&a)) < 1e-12);
    }

    #[test]
    fn channels_preserve_states(n in 1usize..=3, ch in arb_channel(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(&mut rng, n);
        let out = apply_channel_all(&rho, &ch).unwrap();
        prop_assert!(out.validate().is_ok());
        if n >= 2 {
            let ab = apply_channel(&apply_channel(&rho, &ch, 0).unwrap(), &ch, 1).unwrap();
            let ba = apply_channel(&apply_channel(&rho, &ch, 1).unwrap(), &ch, 0).unwrap();
            prop_assert!(ab.max_abs_diff(&ba) < 1e-12);
        }
    }

    #[test]
    fn dephasing_z_keeps_diagonal(n in 1usize..=3, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(&mut rng, n);
        let out = apply_channel_all(&rho, &PauliChannel::dephasing_z(p).unwrap()).unwrap();
        for i in 0..rho.dim() {
            prop_assert!((out.get(i, i) - rho.get(i, i)).norm() < 1e-15);
        }
    }

    #[test]
    fn m_chsh_local_unitary_invariance(seed in any::<u64>(), angles in proptest::array::uniform6(-3.2f64..3.2)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(&mut rng, 2);
        let u = unitary(angles[0], angles[1], angles[2]);
        let v = unitary(angles[3], angles[4], angles[5]);
        let rotated = rho.conjugate_qubit(0, &u).unwrap().conjugate_qubit(1, &v).unwrap();
        prop_assert!((m_chsh(&rho).unwrap() - m_chsh(&rotated).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn graph_bell_full_trace_matches_weights(n in 3usize..=5, raw in proptest::collection::vec(0.0f64..1.0, 32)) {
        let g = GraphSpec::star(n).unwrap();
        let op = GraphBellOperator::star(n).unwrap();
        let w: Vec<f64> = raw[..1 << n].to_vec();
        let total: f64 = w.iter().sum::<f64>() + 1e-9;
        let mut w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let rest = 1.0 - w.iter().sum::<f64>();
        w[0] += rest;
        let weights = GraphDiagonalWeights::new(n, w).unwrap();
        let rho = graph_diagonal_state(&g, &weights).unwrap();
        let full = graph_bell_value(&rho, &op).unwrap();
        prop_assert!((full - weights.two_weight_shortcut(&op)).abs() < 1e-10);
        prop_assert!((full - weights.bell_value(&op)).abs() < 1e-10);
    }

    #[test]
    fn graph_bell_marginal_form_on_any_graph(g in arb_graph(), ch in arb_channel()) {
        prop_assume!(g.n_vertices() <= 6);
        let Some(i) = (0..g.n_vertices()).find(|&v| g.degree(v) > 0) else {
            return Ok(());
        };
        let op = GraphBellOperator::new(g.clone(), i, vec![g.neighbors(i)[0]]).unwrap();
        let rho = apply_channel_all(&pure_to_density(&graph_state(&g).unwrap()), &ch).unwrap();
        let weights = GraphDiagonalWeights::from_channel(&g, &ch).unwrap();
        prop_assert!((graph_bell_value(&rho, &op).unwrap() - weights.bell_value(&op)).abs() < 1e-10);
    }
}
