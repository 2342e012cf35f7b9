use super::{CorrelatorInequality, SettingTuple};
use crate::chsh::{correlation_matrix, ChshSettings, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::qstate::{project_unnormalized, DensityMatrix, Observable, Outcome, Projection};

/// Correlations of the pair in the unnormalized post-measurement state,
/// rows for `pair.0`. Returns them with the outcome probability.
fn pair_correlations(
    rho: &DensityMatrix,
    projections: &[Projection],
    pair: (usize, usize),
) -> Result<(CorrelationMatrix, f64)> {
    let n = rho.n_qubits();
    if pair.0 == pair.1 || pair.0 >= n || pair.1 >= n {
        return Err(Error::invalid(format!("invalid pair ({}, {})", pair.0, pair.1)));
    }
    if projections.len() + 2 != n
        || projections.iter().any(|p| p.qubit == pair.0 || p.qubit == pair.1)
    {
        return Err(Error::invalid(
            "projections must cover exactly the qubits outside the pair",
        ));
    }
    let (unnorm, _) = project_unnormalized(rho, projections)?;
    let prob = unnorm.trace().re;
    let t = correlation_matrix(&unnorm)?;
    let t = if pair.0 < pair.1 {
        t
    } else {
        CorrelationMatrix(t.0.transpose())
    };
    Ok((t, prob))
}

fn weighted_chsh(t: &CorrelationMatrix, s: &ChshSettings, flipped: bool) -> f64 {
    let sign = if flipped { -1.0 } else { 1.0 };
    t.correlator(&s.a0, &s.b0) + t.correlator(&s.a0, &s.b1)
        + sign * (t.correlator(&s.a1, &s.b0) - t.correlator(&s.a1, &s.b1))
}

/// Conditioned CHSH expression
/// `⟨a0b0⟩_c + ⟨a0b1⟩_c + ⟨a1b0⟩_c - ⟨a1b1⟩_c - 2p(c)`
/// where `⟨·⟩_c` carries the weight `p(c)` of the outcomes `c` of the projected
/// parties. Non-positive for every local model. `a` acts on `pair.0`, `b` on `pair.1`.
pub fn conditioned_chsh_value(
    rho: &DensityMatrix,
    settings: &ChshSettings,
    pair: (usize, usize),
    projections: &[Projection],
) -> Result<f64> {
    let (t, prob) = pair_correlations(rho, projections, pair)?;
    Ok(weighted_chsh(&t, settings, false) - 2.0 * prob)
}

/// Conditioned CHSH as a correlator inequality over all `n` parties.
///
/// The indicator of outcome `c_k` is `(1 + c_k m_k)/2`, so the expression
/// expands into correlators in which the projected parties use their single
/// setting `0` or are absent. Pair parties have two settings, the others one.
pub fn conditioned_chsh_inequality(
    n: usize,
    pair: (usize, usize),
    outcomes: &[Outcome],
) -> Result<CorrelatorInequality> {
    if n < 2 || pair.0 == pair.1 || pair.0 >= n || pair.1 >= n {
        return Err(Error::invalid("invalid pair for conditioned CHSH"));
    }
    if outcomes.len() + 2 != n {
        return Err(Error::invalid("need one outcome per projected party"));
    }
    let others: Vec<usize> = (0..n).filter(|&q| q != pair.0 && q != pair.1).collect();
    let m = others.len();
    let scale = 0.5f64.powi(m as i32);
    let mut settings = vec![1usize; n];
    settings[pair.0] = 2;
    settings[pair.1] = 2;
    let mut terms: Vec<(SettingTuple, f64)> = Vec::new();
    for subset in 0..1usize << m {
        let mut base: SettingTuple = vec![None; n];
        let mut sign = 1.0;
        for (k, &q) in others.iter().enumerate() {
            if subset >> k & 1 == 1 {
                base[q] = Some(0);
                sign *= outcomes[k].sign();
            }
        }
        for (x, y, s) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
            let mut t = base.clone();
            t[pair.0] = Some(x);
            t[pair.1] = Some(y);
            terms.push((t, s * sign * scale));
        }
        terms.push((base, -2.0 * sign * scale));
    }
    CorrelatorInequality::new(settings, terms, 0.0, Some(2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    One,
    Two,
}

/// How the `2^{N-2}` outcome patterns of the projected parties are split into two events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventPartition {
    /// Even number of `-1` outcomes is event one.
    Parity,
    /// Event of each pattern, indexed as in [`Outcome::pattern`].
    Custom(Vec<Event>),
}

impl EventPartition {
    fn event(&self, pattern: usize) -> Event {
        match self {
            EventPartition::Parity => {
                if pattern.count_ones().is_multiple_of(2) {
                    Event::One
                } else {
                    Event::Two
                }
            }
            EventPartition::Custom(events) => events[pattern],
        }
    }
}

/// Per-event pieces of the paired inequality `CHSH₁ + CHSH₂ ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedChsh {
    /// `Σ_{c∈1} [CHSH combination weighted by p(c)] - 2p(1)`.
    pub chsh1: f64,
    /// Same for event two, with the sign-flipped combination
    /// `⟨a0b0⟩ + ⟨a0b1⟩ - ⟨a1b0⟩ + ⟨a1b1⟩`.
    pub chsh2: f64,
    pub prob1: f64,
    pub prob2: f64,
}

impl PairedChsh {
    pub fn value(&self) -> f64 {
        self.chsh1 + self.chsh2
    }

    /// Half the conditional CHSH combination of event one, `(CHSH₁ + 2p(1)) / 2p(1)`.
    pub fn side1(&self) -> Option<f64> {
        (self.prob1 > 0.0).then(|| (self.chsh1 + 2.0 * self.prob1) / (2.0 * self.prob1))
    }

    pub fn side2(&self) -> Option<f64> {
        (self.prob2 > 0.0).then(|| (self.chsh2 + 2.0 * self.prob2) / (2.0 * self.prob2))
    }
}

/// Sum of the two event-wise conditioned CHSH expressions over every outcome
/// pattern of the projected parties. `observables` lists `(qubit, observable)`
/// for every qubit outside `pair`.
pub fn paired_chsh_value(
    rho: &DensityMatrix,
    settings: &ChshSettings,
    pair: (usize, usize),
    observables: &[(usize, Observable)],
    partition: &EventPartition,
) -> Result<PairedChsh> {
    let m = observables.len();
    if let EventPartition::Custom(events) = partition {
        if events.len() != 1 << m {
            return Err(Error::invalid(format!(
                "partition lists {} patterns, expected {}",
                events.len(),
                1usize << m
            )));
        }
    }
    let mut out = PairedChsh {
        chsh1: 0.0,
        chsh2: 0.0,
        prob1: 0.0,
        prob2: 0.0,
    };
    for pattern in 0..1usize << m {
        let outcomes = Outcome::pattern(pattern, m);
        let projections: Vec<Projection> = observables
            .iter()
            .zip(&outcomes)
            .map(|(&(q, o), &s)| Projection::new(q, o, s))
            .collect();
        let (t, prob) = pair_correlations(rho, &projections, pair)?;
        match partition.event(pattern) {
            Event::One => {
                out.chsh1 += weighted_chsh(&t, settings, false) - 2.0 * prob;
                out.prob1 += prob;
            }
            Event::Two => {
                out.chsh2 += weighted_chsh(&t, settings, true) - 2.0 * prob;
                out.prob2 += prob;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::lhv_local_bound;
    use crate::channels::dephased_ghz_z;
    use crate::chsh::optimal_chsh_settings;
    use crate::qstate::{ghz_state, project_and_condition, pure_to_density, PureState};

    fn x_proj(q: usize) -> Projection {
        Projection::new(q, Observable::x(), Outcome::Plus)
    }

    #[test]
    fn pure_ghz3_reaches_root_two_minus_one() {
        let rho = pure_to_density(&ghz_state(3).unwrap());
        let cond = project_and_condition(&rho, &[x_proj(0)]).unwrap();
        let (s, _) = optimal_chsh_settings(&cond.state.unwrap()).unwrap();
        let v = conditioned_chsh_value(&rho, &s, (1, 2), &[x_proj(0)]).unwrap();
        assert!((v - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn separable_states_do_not_violate() {
        let prod = pure_to_density(&PureState::product(&[Observable::x(), Observable::y(), Observable::z()]).unwrap());
        let full = dephased_ghz_z(3, 1.0).unwrap();
        for theta in [0.0, 0.3, 0.785, 1.2] {
            let s = ChshSettings::zx_family(theta);
            for rho in [&prod, &full] {
                for out in [Outcome::Plus, Outcome::Minus] {
                    let proj = [Projection::new(0, Observable::x(), out)];
                    assert!(conditioned_chsh_value(rho, &s, (1, 2), &proj).unwrap() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn correlator_expansion_matches_direct_evaluation() {
        let rho = dephased_ghz_z(4, 0.2).unwrap();
        let s = ChshSettings::zx_family(0.6);
        let obs = [Observable::x(), Observable::from_angles(1.0, 0.4)];
        let outcomes = [Outcome::Minus, Outcome::Plus];
        let proj = [
            Projection::new(0, obs[0], outcomes[0]),
            Projection::new(1, obs[1], outcomes[1]),
        ];
        let direct = conditioned_chsh_value(&rho, &s, (2, 3), &proj).unwrap();
        let ineq = conditioned_chsh_inequality(4, (2, 3), &outcomes).unwrap();
        let via = ineq
            .quantum_value(
                &rho,
                &[vec![obs[0]], vec![obs[1]], vec![s.a0, s.a1], vec![s.b0, s.b1]],
            )
            .unwrap();
        assert!((direct - via).abs() < 1e-12);
    }

    #[test]
    fn conditioned_local_bound_is_zero() {
        for n in 3..=6 {
            let outcomes = vec![Outcome::Plus; n - 2];
            let ineq = conditioned_chsh_inequality(n, (n - 2, n - 1), &outcomes).unwrap();
            assert_eq!(lhv_local_bound(&ineq).unwrap(), 0.0);
        }
    }

    #[test]
    fn paired_ghz3_sides() {
        for p in [0.0, 0.25, 0.6] {
            let q = (1.0f64 - p).powi(3);
            let m = (1.0 + q * q).sqrt();
            let theta = (1.0 / m).acos();
            let rho = dephased_ghz_z(3, p).unwrap();
            let r = paired_chsh_value(
                &rho,
                &ChshSettings::zx_family(theta),
                (1, 2),
                &[(0, Observable::x())],
                &EventPartition::Parity,
            )
            .unwrap();
            assert!((r.prob1 - 0.5).abs() < 1e-12 && (r.prob2 - 0.5).abs() < 1e-12);
            let side = theta.cos() + theta.sin() * q;
            assert!((r.side1().unwrap() - side).abs() < 1e-12);
            assert!((r.side2().unwrap() - side).abs() < 1e-12);
            assert!((side - m).abs() < 1e-12);
            assert!((r.value() - 2.0 * (m - 1.0)).abs() < 1e-12);
        }
        let rho = dephased_ghz_z(3, 1.0).unwrap();
        let r = paired_chsh_value(
            &rho,
            &ChshSettings::zx_family(0.7),
            (1, 2),
            &[(0, Observable::x())],
            &EventPartition::Parity,
        )
        .unwrap();
        assert!(r.value() <= 1e-12);
    }

    #[test]
    fn partition_must_cover_patterns() {
        let rho = dephased_ghz_z(4, 0.1).unwrap();
        let r = paired_chsh_value(
            &rho,
            &ChshSettings::zx_family(0.7),
            (2, 3),
            &[(0, Observable::x()), (1, Observable::x())],
            &EventPartition::Custom(vec![Event::One; 3]),
        );
        assert!(r.is_err());
    }
}
