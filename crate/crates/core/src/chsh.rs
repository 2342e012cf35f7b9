//! Two-qubit CHSH analysis: correlation matrix, the Horodecki value
//! `M = √(t₁² + t₂²)`, optimal settings, and noise thresholds of the
//! conditioned-CHSH test.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::channels::PauliChannel;
use crate::error::{Error, Result};
use crate::family::StateFamily;
use crate::qstate::{
    expectation, pauli, project_and_condition, DensityMatrix, Observable, Outcome, Projection,
};

/// `t_ij = tr[(σ_i ⊗ σ_j) ρ]` for `i, j ∈ {x, y, z}`; row index belongs to the first qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix(pub Matrix3<f64>);

impl CorrelationMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `⟨(a·σ) ⊗ (b·σ)⟩`.
    pub fn correlator(&self, a: &Observable, b: &Observable) -> f64 {
        let a = Vector3::from(a.bloch());
        let b = Vector3::from(b.bloch());
        a.dot(&(self.0 * b))
    }

    /// Eigenpairs of `TᵀT`, largest first, each eigenvector with its first
    /// significant component positive.
    fn spectrum(&self) -> [(f64, Vector3<f64>); 3] {
        let ttt = self.0.transpose() * self.0;
        let eig = SymmetricEigen::new(ttt);
        let mut pairs: Vec<(f64, Vector3<f64>)> = (0..3)
            .map(|k| {
                let mut v: Vector3<f64> = eig.eigenvectors.column(k).into();
                if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                    if *first < 0.0 {
                        v = -v;
                    }
                }
                (eig.eigenvalues[k].max(0.0), v)
            })
            .collect();
        // Ties keep the lexicographically larger vector first so the order is reproducible.
        pairs.sort_by(|a, b| {
            b.0.total_cmp(&a.0).then_with(|| {
                let key = |v: &Vector3<f64>| [v[0], v[1], v[2]];
                let (ka, kb) = (key(&a.1), key(&b.1));
                kb.iter()
                    .zip(ka.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        [pairs[0], pairs[1], pairs[2]]
    }
}

fn check_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.n_qubits(),
        });
    }
    Ok(())
}

pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    check_two_qubits(rho)?;
    let mut t = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            t[(i, j)] = expectation(rho, &[pauli(i + 1), pauli(j + 1)])?;
        }
    }
    Ok(CorrelationMatrix(t))
}

/// Horodecki value: the CHSH maximum of `rho` is `2 · m_chsh(rho)`.
pub fn m_chsh(rho: &DensityMatrix) -> Result<f64> {
    let spec = correlation_matrix(rho)?.spectrum();
    Ok((spec[0].0 + spec[1].0).sqrt())
}

/// `m_chsh² - 1`, evaluated so that it stays accurate when the dominant
/// correlation is perfect and the second one is far below machine epsilon.
///
/// The deficit `1 - t₁²` is obtained as `4P(1-P)` from the probability `P`
/// that the outcomes along the dominant axes disagree, which is a sum of
/// non-negative terms rather than a difference of numbers close to one.
pub fn horodecki_margin(rho: &DensityMatrix) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let spec = t.spectrum();
    let (l1, u1) = spec[0];
    if l1 == 0.0 {
        return Ok(-1.0);
    }
    let image = t.0 * u1;
    let bob = Observable::from_direction([u1[0], u1[1], u1[2]])?;
    let alice = Observable::from_direction([image[0], image[1], image[2]])?;
    let disagree = expectation(
        rho,
        &[alice.projector(Outcome::Plus), bob.projector(Outcome::Minus)],
    )? + expectation(
        rho,
        &[alice.projector(Outcome::Minus), bob.projector(Outcome::Plus)],
    )?;
    let disagree = disagree.clamp(0.0, 1.0);
    Ok(spec[1].0 - 4.0 * disagree * (1.0 - disagree))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a0: Observable,
    pub a1: Observable,
    pub b0: Observable,
    pub b1: Observable,
}

impl ChshSettings {
    pub fn new(a0: Observable, a1: Observable, b0: Observable, b1: Observable) -> Self {
        Self { a0, a1, b0, b1 }
    }

    /// `A0 = Z, A1 = X, B0/B1 = cosθ Z ± sinθ X`.
    pub fn zx_family(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            a0: Observable::z(),
            a1: Observable::x(),
            b0: Observable::from_direction([s, 0.0, c]).expect("unit"),
            b1: Observable::from_direction([-s, 0.0, c]).expect("unit"),
        }
    }
}

/// `⟨a0b0⟩ + ⟨a0b1⟩ + ⟨a1b0⟩ - ⟨a1b1⟩` on a two-qubit state.
pub fn chsh_value(rho: &DensityMatrix, s: &ChshSettings) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    Ok(chsh_from_correlations(&t, s))
}

pub(crate) fn chsh_from_correlations(t: &CorrelationMatrix, s: &ChshSettings) -> f64 {
    t.correlator(&s.a0, &s.b0) + t.correlator(&s.a0, &s.b1) + t.correlator(&s.a1, &s.b0)
        - t.correlator(&s.a1, &s.b1)
}

/// Settings reaching `2 · m_chsh(rho)`, built from the two dominant
/// eigenvectors of `TᵀT` (second party) and their images under `T` (first party).
pub fn optimal_chsh_settings(rho: &DensityMatrix) -> Result<(ChshSettings, f64)> {
    let t = correlation_matrix(rho)?;
    let spec = t.spectrum();
    let (l1, u1) = spec[0];
    let (l2, u2) = spec[1];
    let to_obs = |v: Vector3<f64>| Observable::from_direction([v[0], v[1], v[2]]);
    let settings = if l1 <= 0.0 {
        ChshSettings::new(Observable::z(), Observable::x(), Observable::z(), Observable::x())
    } else {
        let theta = l2.sqrt().atan2(l1.sqrt());
        let (s, c) = theta.sin_cos();
        let a0 = to_obs(t.0 * u1)?;
        let a1 = if l2 > 0.0 { to_obs(t.0 * u2)? } else { a0 };
        ChshSettings::new(a0, a1, to_obs(u1 * c + u2 * s)?, to_obs(u1 * c - u2 * s)?)
    };
    let value = chsh_from_correlations(&t, &settings);
    Ok((settings, value))
}

/// Horodecki value of the two-qubit state left after projecting all other qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionedChsh {
    /// `None` when the conditioning outcome has zero probability.
    pub m: Option<f64>,
    /// `m² - 1` from [`horodecki_margin`].
    pub margin: Option<f64>,
    pub probability: f64,
}

impl ConditionedChsh {
    pub fn violates(&self) -> bool {
        self.margin.is_some_and(|m| m > 0.0)
    }

    pub fn m_or_zero(&self) -> f64 {
        self.m.unwrap_or(0.0)
    }
}

/// Projects every qubit except `pair` and evaluates [`m_chsh`] on what is left.
pub fn conditioned_m_chsh(
    rho: &DensityMatrix,
    projections: &[Projection],
    pair: (usize, usize),
) -> Result<ConditionedChsh> {
    let n = rho.n_qubits();
    if pair.0 == pair.1 || pair.0 >= n || pair.1 >= n {
        return Err(Error::invalid(format!("invalid pair ({}, {})", pair.0, pair.1)));
    }
    if projections.len() + 2 != n || projections.iter().any(|p| p.qubit == pair.0 || p.qubit == pair.1)
    {
        return Err(Error::invalid(
            "projections must cover exactly the qubits outside the pair",
        ));
    }
    let cond = project_and_condition(rho, projections)?;
    match cond.state {
        None => Ok(ConditionedChsh {
            m: None,
            margin: None,
            probability: cond.probability,
        }),
        // m_chsh is symmetric under exchanging the two qubits, so pair order is irrelevant.
        Some(state) => Ok(ConditionedChsh {
            m: Some(m_chsh(&state)?),
            margin: Some(horodecki_margin(&state)?),
            probability: cond.probability,
        }),
    }
}

/// Conditioned `M` for GHZ under a general Pauli channel with X projections,
/// in the two-term form `√((p0+p1-p2-p3)^{2N} + (p0-p1-p2+p3)^4)`.
///
/// Exact only while the `YY` correlator `λx^{N-2} λy²` is not among the two
/// largest; [`ghz_pauli_m`] is the general expression.
pub fn ghz_pauli_m_two_term(n: usize, ch: &PauliChannel) -> f64 {
    let [lx, _, lz] = ch.bloch_shrinking();
    (lx.powi(2 * n as i32) + lz.powi(4)).sqrt()
}

/// Conditioned `M` for GHZ under a general Pauli channel with X projections.
///
/// The conditional state has a diagonal correlation matrix
/// `diag(λx^N, -λx^{N-2} λy², λz²)` where `λ` are the channel's Bloch
/// shrinking factors; `M` is the root of the sum of the two largest squares.
pub fn ghz_pauli_m(n: usize, ch: &PauliChannel) -> f64 {
    let [lx, ly, lz] = ch.bloch_shrinking();
    let n = n as i32;
    let mut sq = [
        lx.powi(2 * n),
        lx.powi(2 * n - 4) * ly.powi(4),
        lz.powi(4),
    ];
    sq.sort_by(|a, b| b.total_cmp(a));
    (sq[0] + sq[1]).sqrt()
}

/// Number of grid intervals used for the monotonicity check.
pub const THRESHOLD_GRID_STEPS: usize = 100;
pub const THRESHOLD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    /// Largest noise strength at which the conditioned state still violates CHSH.
    pub p_c: f64,
    /// `(p, m)` on the monotonicity grid.
    pub grid: Vec<(f64, f64)>,
}

/// Critical noise strength of the conditioned-CHSH test for `family` under
/// the direction weights of `channel` (its own strength is ignored).
///
/// Verifies that `m` is non-increasing on a 101-point grid, returns 1 when
/// every grid point below `p = 1` violates, and otherwise bisects the first
/// sign change of the margin down to 1e-8.
pub fn noise_threshold(family: &StateFamily, channel: &PauliChannel) -> Result<Threshold> {
    let eval = |p: f64| -> Result<ConditionedChsh> {
        family.conditioned_chsh(&channel.with_strength(p)?)
    };
    let points: Vec<(f64, ConditionedChsh)> = (0..=THRESHOLD_GRID_STEPS)
        .map(|i| {
            let p = i as f64 / THRESHOLD_GRID_STEPS as f64;
            eval(p).map(|c| (p, c))
        })
        .collect::<Result<_>>()?;
    let grid: Vec<(f64, f64)> = points.iter().map(|(p, c)| (*p, c.m_or_zero())).collect();
    if grid.windows(2).any(|w| w[1].1 > w[0].1 + 1e-12) {
        return Err(Error::NonMonotone(grid));
    }
    let below_one = &points[..points.len() - 1];
    let first_local = below_one.iter().position(|(_, c)| !c.violates());
    let p_c = match first_local {
        None => 1.0,
        Some(0) => 0.0,
        Some(k) => {
            let (mut lo, mut hi) = (points[k - 1].0, points[k].0);
            while hi - lo > THRESHOLD_TOL {
                let mid = 0.5 * (lo + hi);
                if eval(mid)?.violates() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
    };
    Ok(Threshold { p_c, grid })
}
