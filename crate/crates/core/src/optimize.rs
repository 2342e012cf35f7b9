//! Multistart Nelder–Mead over spherical measurement angles.
//!
//! Restart `k` draws its start from ChaCha stream `k` of the configured seed, so
//! results do not depend on thread scheduling. Caller-supplied starts replace
//! the first restarts.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bell::{mk_inequality, mk_xy_settings, CorrelatorInequality};
use crate::chsh::conditioned_m_chsh;
use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, Observable, Outcome, Projection};

/// `(θ, φ)` pairs; pair `k` is the observable with Bloch vector
/// `(sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector(Vec<(f64, f64)>);

impl AngleVector {
    pub fn new(angles: Vec<(f64, f64)>) -> Result<Self> {
        if angles.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(Error::invalid("angles must be finite"));
        }
        Ok(Self(angles).canonicalize())
    }

    pub fn from_observables(obs: &[Observable]) -> Self {
        Self(
            obs.iter()
                .map(|o| {
                    let [x, y, z] = o.bloch();
                    (z.clamp(-1.0, 1.0).acos(), y.atan2(x).rem_euclid(TAU))
                })
                .collect(),
        )
        .canonicalize()
    }

    fn from_flat(v: &[f64]) -> Self {
        Self(v.chunks_exact(2).map(|c| (c[0], c[1])).collect())
    }

    fn flat(&self) -> Vec<f64> {
        self.0.iter().flat_map(|&(t, p)| [t, p]).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.0
    }

    /// Same observables with `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn canonicalize(&self) -> Self {
        Self(
            self.0
                .iter()
                .map(|&(t, p)| {
                    let mut t = t.rem_euclid(TAU);
                    let mut p = p;
                    if t > PI {
                        t = TAU - t;
                        p += PI;
                    }
                    let p = p.rem_euclid(TAU);
                    // rem_euclid can round up to exactly 2π.
                    (t, if p >= TAU { 0.0 } else { p })
                })
                .collect(),
        )
    }

    pub fn observables(&self) -> Vec<Observable> {
        self.0.iter().map(|&(t, p)| Observable::from_angles(t, p)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Objective evaluations per restart.
    pub max_evals: usize,
    /// Convergence tolerance on the objective spread across the simplex.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_evals: 2000,
            tol: 1e-9,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_evals == 0 || self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid("optimizer restarts, max_evals and tol must be positive"));
        }
        Ok(())
    }
}

const INITIAL_STEP: f64 = 0.4;

/// Nelder–Mead maximization from `x0`. The simplex is rebuilt around the best
/// vertex after each convergence until a rebuild stops improving. `None` if the
/// objective returns a non-finite value.
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, max_evals: usize, tol: f64) -> Option<(Vec<f64>, f64)> {
    let d = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| -> Option<f64> {
        evals.set(evals.get() + 1);
        let v = -f(x);
        v.is_finite().then_some(v)
    };
    let mut best_x = x0.clone();
    let mut best = eval(&x0)?;
    if d == 0 {
        return Some((best_x, -best));
    }
    let mut step = INITIAL_STEP;
    loop {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(best_x.clone(), best)];
        for i in 0..d {
            let mut x = best_x.clone();
            x[i] += step;
            let v = eval(&x)?;
            simplex.push((x, v));
        }
        let start = best;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[d].1 - simplex[0].1 <= tol * (1.0 + simplex[0].1.abs()) || evals.get() >= max_evals {
                break;
            }
            let centroid: Vec<f64> = (0..d)
                .map(|j| simplex[..d].iter().map(|(x, _)| x[j]).sum::<f64>() / d as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[d].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };
            let xr = along(-1.0);
            let fr = eval(&xr)?;
            if fr < simplex[0].1 {
                let xe = along(-2.0);
                let fe = eval(&xe)?;
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[d].1 {
                    let x = along(-0.5);
                    let v = eval(&x)?;
                    (x, v)
                } else {
                    let x = along(0.5);
                    let v = eval(&x)?;
                    (x, v)
                };
                if fc < fr.min(simplex[d].1) {
                    simplex[d] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = x0.iter().zip(&vertex.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
                        let v = eval(&x)?;
                        *vertex = (x, v);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best {
            best = simplex[0].1;
            best_x = simplex[0].0.clone();
        }
        if evals.get() >= max_evals || start - best <= tol * (1.0 + best.abs()) {
            break;
        }
        step = (step * 0.5).max(1e-3);
    }
    Some((best_x, -best))
}

fn random_start(dim: usize, seed: u64, stream: u64) -> AngleVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    AngleVector(
        (0..dim)
            .map(|_| {
                let z: f64 = rng.gen_range(-1.0..=1.0);
                (z.acos(), rng.gen_range(0.0..TAU))
            })
            .collect(),
    )
}

/// Best value over `cfg.restarts` seeded restarts; ties go to the lowest restart.
pub fn maximize<F>(objective: F, dim: usize, cfg: &OptimizerConfig) -> Result<(AngleVector, f64)>
where
    F: Fn(&AngleVector) -> f64 + Sync,
{
    maximize_with_starts(objective, dim, cfg, &[])
}

/// As [`maximize`], with `starts[k]` used as the start of restart `k`. The
/// result is never worse than the objective at any supplied start.
pub fn maximize_with_starts<F>(
    objective: F,
    dim: usize,
    cfg: &OptimizerConfig,
    starts: &[AngleVector],
) -> Result<(AngleVector, f64)>
where
    F: Fn(&AngleVector) -> f64 + Sync,
{
    cfg.validate()?;
    if starts.iter().any(|s| s.len() != dim) {
        return Err(Error::invalid("start has the wrong number of angle pairs"));
    }
    let restarts = cfg.restarts.max(starts.len());
    let flat_obj = |x: &[f64]| objective(&AngleVector::from_flat(x));
    let results: Vec<Option<(Vec<f64>, f64)>> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let start = starts
                .get(k)
                .cloned()
                .unwrap_or_else(|| random_start(dim, cfg.seed, k as u64));
            nelder_mead(&flat_obj, start.flat(), cfg.max_evals, cfg.tol)
        })
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for r in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| r.1 > b.1) {
            best = Some(r);
        }
    }
    let (x, v) = best.ok_or_else(|| Error::Numerical("objective was non-finite in every restart".into()))?;
    Ok((AngleVector::from_flat(&x).canonicalize(), v))
}

/// Maximal quantum value of `ineq` over projective measurements, one per
/// (party, setting). Returns the observables as `observables[party][setting]`.
pub fn optimize_inequality(
    rho: &DensityMatrix,
    ineq: &CorrelatorInequality,
    cfg: &OptimizerConfig,
) -> Result<(Vec<Vec<Observable>>, f64)> {
    if rho.n_qubits() != ineq.n_parties() {
        return Err(Error::DimensionMismatch {
            expected: ineq.n_parties(),
            found: rho.n_qubits(),
        });
    }
    let counts = ineq.settings_per_party().to_vec();
    let split = |a: &AngleVector| -> Vec<Vec<Observable>> {
        let obs = a.observables();
        let mut it = obs.into_iter();
        counts.iter().map(|&m| it.by_ref().take(m).collect()).collect()
    };
    let dim = counts.iter().sum();
    let objective = |a: &AngleVector| ineq.quantum_value(rho, &split(a)).unwrap_or(f64::NAN);
    let (best, value) = maximize(objective, dim, cfg)?;
    Ok((split(&best), value))
}

/// Maximal MK value over two projective measurements per party, starting one
/// restart from the X/Y settings. Returns `(A_k, A'_k)` per party.
pub fn optimize_mk(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<(Vec<(Observable, Observable)>, f64)> {
    let n = rho.n_qubits();
    let ineq = mk_inequality(n)?;
    let to_settings = |a: &AngleVector| -> Vec<Vec<Observable>> {
        a.observables().chunks_exact(2).map(|c| c.to_vec()).collect()
    };
    let objective = |a: &AngleVector| ineq.quantum_value(rho, &to_settings(a)).unwrap_or(f64::NAN);
    let xy: Vec<Observable> = mk_xy_settings(n).into_iter().flat_map(|(a, b)| [a, b]).collect();
    let (best, value) = maximize_with_starts(objective, 2 * n, cfg, &[AngleVector::from_observables(&xy)])?;
    let settings = best.observables().chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Ok((settings, value))
}

/// Maximal conditioned Horodecki value over the measurement directions of the
/// qubits outside `pair` (outcome +1 each), starting one restart from X on all.
/// Zero-probability outcomes score 0.
pub fn optimize_conditioning(
    rho: &DensityMatrix,
    pair: (usize, usize),
    cfg: &OptimizerConfig,
) -> Result<(Vec<(usize, Observable)>, f64)> {
    let n = rho.n_qubits();
    if n < 3 {
        return Err(Error::invalid("conditioning needs at least 3 qubits"));
    }
    if pair.0 == pair.1 || pair.0 >= n || pair.1 >= n {
        return Err(Error::invalid(format!("invalid pair ({}, {})", pair.0, pair.1)));
    }
    let others: Vec<usize> = (0..n).filter(|&q| q != pair.0 && q != pair.1).collect();
    optimize_conditioning_from(rho, pair, &vec![Observable::x(); others.len()], cfg)
}

/// As [`optimize_conditioning`], with `start[k]` the initial observable of the
/// `k`-th qubit outside `pair` in ascending order.
pub fn optimize_conditioning_from(
    rho: &DensityMatrix,
    pair: (usize, usize),
    start: &[Observable],
    cfg: &OptimizerConfig,
) -> Result<(Vec<(usize, Observable)>, f64)> {
    let n = rho.n_qubits();
    if n < 3 || pair.0 == pair.1 || pair.0 >= n || pair.1 >= n {
        return Err(Error::invalid(format!("invalid pair ({}, {})", pair.0, pair.1)));
    }
    let others: Vec<usize> = (0..n).filter(|&q| q != pair.0 && q != pair.1).collect();
    if start.len() != others.len() {
        return Err(Error::invalid("need one start observable per projected qubit"));
    }
    let projections = |a: &AngleVector| -> Vec<Projection> {
        others
            .iter()
            .zip(a.observables())
            .map(|(&q, o)| Projection::new(q, o, Outcome::Plus))
            .collect()
    };
    let objective = |a: &AngleVector| match conditioned_m_chsh(rho, &projections(a), pair) {
        Ok(c) => c.m_or_zero(),
        Err(_) => f64::NAN,
    };
    let start = AngleVector::from_observables(start);
    let (best, value) = maximize_with_starts(objective, others.len(), cfg, &[start])?;
    Ok((others.into_iter().zip(best.observables()).collect(), value))
}
