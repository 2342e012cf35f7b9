//! Dense N-qubit states and the linear algebra the rest of the crate builds on.
//!
//! Qubits are indexed from 0 in the API; qubit 0 is the most significant bit of
//! the computational-basis index, so `|q0 q1 … q_{n-1}⟩` reads left to right.

mod graph;
mod observable;

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use graph::GraphSpec;
pub use observable::{identity, mat2_adjoint, mat2_mul, pauli, Mat2, Observable, Outcome};

/// Tolerance for constructed objects (norms, traces, Hermiticity).
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Tolerance for derived assertions (imaginary parts, eigenvalue floors).
pub const ASSERT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_QUBITS: usize = 12;
/// Conditioning probabilities at or below this are reported as zero.
pub const ZERO_PROBABILITY: f64 = 1e-13;

/// Engine cap on qubit count; `NONLOCAL_MAX_QUBITS` overrides the default.
pub fn max_qubits() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("NONLOCAL_MAX_QUBITS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

pub(crate) fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("qubit count must be positive"));
    }
    let cap = max_qubits();
    if n > cap {
        return Err(Error::TooManyQubits { n_qubits: n, cap });
    }
    Ok(())
}

/// Bit mask of `qubit` inside a basis index of an `n`-qubit register.
#[inline]
pub(crate) fn qubit_mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::invalid(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index] = c(1.0);
        Ok(Self {
            n_qubits,
            amplitudes: amps,
        })
    }

    /// Product state with each qubit in the `+1` eigenstate of the given observable.
    pub fn product(observables: &[Observable]) -> Result<Self> {
        check_qubit_count(observables.len())?;
        let mut amps = vec![c(1.0)];
        for obs in observables {
            let v = obs.eigenvector(Outcome::Plus);
            amps = amps.iter().flat_map(|a| [a * v[0], a * v[1]]).collect();
        }
        Self::new(observables.len(), amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n_qubits + other.n_qubits;
        check_qubit_count(n)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(PureState {
            n_qubits: n,
            amplitudes,
        })
    }
}

/// Dense density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let rho = Self { n_qubits, data };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(n_qubits: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), 1 << (2 * n_qubits));
        Self { n_qubits, data }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut data = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c(1.0 / dim as f64);
        }
        Ok(Self { n_qubits, data })
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("empty mixture"))?
            .1;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::invalid("mixture weights must be non-negative and sum to 1"));
        }
        let mut data = vec![Complex64::default(); first.data.len()];
        for (w, rho) in parts {
            if rho.n_qubits != first.n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: first.n_qubits,
                    found: rho.n_qubits,
                });
            }
            for (d, v) in data.iter_mut().zip(&rho.data) {
                *d += v * *w;
            }
        }
        Ok(Self::from_raw(first.n_qubits, data))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    pub fn purity(&self) -> f64 {
        let dim = self.dim();
        let mut acc = 0.0;
        for r in 0..dim {
            for col in 0..dim {
                acc += (self.data[r * dim + col] * self.data[col * dim + r]).re;
            }
        }
        acc
    }

    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for col in r..dim {
                let d = (self.data[r * dim + col] - self.data[col * dim + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let dim = self.dim();
        let m = DMatrix::from_row_slice(dim, dim, &self.data);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > CONSTRUCTION_TOL {
            return Err(Error::invalid(format!("matrix is not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr - c(1.0)).norm() > CONSTRUCTION_TOL {
            return Err(Error::invalid(format!("trace is {tr}, expected 1")));
        }
        let min = self.min_eigenvalue();
        if min < -ASSERT_TOL {
            return Err(Error::invalid(format!("matrix is not positive (eigenvalue {min:e})")));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `K ρ K†` with `K` acting on one qubit.
    pub fn conjugate_qubit(&self, qubit: usize, k: &Mat2) -> Result<DensityMatrix> {
        self.check_qubit(qubit)?;
        Ok(Self::from_raw(self.n_qubits, self.sandwich(qubit, k)))
    }

    /// Raw `K ρ K†` on one qubit; callers validate the index.
    pub(crate) fn sandwich(&self, qubit: usize, k: &Mat2) -> Vec<Complex64> {
        let dim = self.dim();
        let bit = qubit_mask(self.n_qubits, qubit);
        let mut left = self.data.clone();
        for r0 in (0..dim).filter(|r| r & bit == 0) {
            let r1 = r0 | bit;
            for col in 0..dim {
                let a = self.data[r0 * dim + col];
                let b = self.data[r1 * dim + col];
                left[r0 * dim + col] = k[0][0] * a + k[0][1] * b;
                left[r1 * dim + col] = k[1][0] * a + k[1][1] * b;
            }
        }
        let mut out = left.clone();
        for r in 0..dim {
            for c0 in (0..dim).filter(|col| col & bit == 0) {
                let c1 = c0 | bit;
                let a = left[r * dim + c0];
                let b = left[r * dim + c1];
                out[r * dim + c0] = a * k[0][0].conj() + b * k[0][1].conj();
                out[r * dim + c1] = a * k[1][0].conj() + b * k[1][1].conj();
            }
        }
        out
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }
}

pub fn ghz_state(n: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::invalid("GHZ state needs n >= 1"));
    }
    check_qubit_count(n)?;
    let dim = 1usize << n;
    let mut amps = vec![Complex64::default(); dim];
    amps[0] = c(std::f64::consts::FRAC_1_SQRT_2);
    amps[dim - 1] = c(std::f64::consts::FRAC_1_SQRT_2);
    PureState::new(n, amps)
}

pub fn w_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::invalid("W state needs n >= 2"));
    }
    check_qubit_count(n)?;
    let dim = 1usize << n;
    let amp = c(1.0 / (n as f64).sqrt());
    let mut amps = vec![Complex64::default(); dim];
    for q in 0..n {
        amps[qubit_mask(n, q)] = amp;
    }
    PureState::new(n, amps)
}

/// `∏_{edges} CZ |+⟩^{⊗n}`: amplitude `(-1)^{#edges with both ends 1} / 2^{n/2}`.
pub fn graph_state(g: &GraphSpec) -> Result<PureState> {
    let n = g.n_vertices();
    check_qubit_count(n)?;
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(a, b)| (qubit_mask(n, a), qubit_mask(n, b)))
        .collect();
    let amps = (0..dim)
        .map(|x| {
            let parity = edges
                .iter()
                .filter(|(a, b)| x & a != 0 && x & b != 0)
                .count();
            c(if parity % 2 == 0 { amp } else { -amp })
        })
        .collect();
    PureState::new(n, amps)
}

pub fn pure_to_density(psi: &PureState) -> DensityMatrix {
    let dim = psi.dim();
    let a = psi.amplitudes();
    let mut data = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for col in 0..dim {
            data.push(a[r] * a[col].conj());
        }
    }
    DensityMatrix::from_raw(psi.n_qubits(), data)
}

/// Non-zero entries `(row, col, value)` of `⊗ ops`.
fn tensor_entries(n: usize, ops: &[Mat2]) -> Vec<(usize, usize, Complex64)> {
    let mut entries = vec![(0usize, 0usize, c(1.0))];
    for (q, op) in ops.iter().enumerate() {
        let bit = qubit_mask(n, q);
        let mut next = Vec::with_capacity(entries.len() * 2);
        for &(r, col, v) in &entries {
            for (a, row) in op.iter().enumerate() {
                for (b, x) in row.iter().enumerate() {
                    if x.norm_sqr() == 0.0 {
                        continue;
                    }
                    next.push((r | (a * bit), col | (b * bit), v * x));
                }
            }
        }
        entries = next;
    }
    entries
}

/// `tr[(⊗ ops) ρ]`, one operator per qubit.
pub fn expectation(rho: &DensityMatrix, ops: &[Mat2]) -> Result<f64> {
    let z = expectation_complex(rho, ops)?;
    if z.im.abs() > ASSERT_TOL {
        return Err(Error::Numerical(format!(
            "expectation has imaginary part {:e}; operators not Hermitian?",
            z.im
        )));
    }
    Ok(z.re)
}

pub(crate) fn expectation_complex(rho: &DensityMatrix, ops: &[Mat2]) -> Result<Complex64> {
    let n = rho.n_qubits();
    if ops.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: ops.len(),
        });
    }
    let dim = rho.dim();
    Ok(tensor_entries(n, ops)
        .into_iter()
        .map(|(r, col, v)| v * rho.data[col * dim + r])
        .sum())
}

/// Offsets of every assignment of the given qubits inside a full basis index,
/// enumerated with the first listed qubit most significant.
fn subset_offsets(n: usize, qubits: &[usize]) -> Vec<usize> {
    let m = qubits.len();
    (0..1usize << m)
        .map(|x| {
            qubits
                .iter()
                .enumerate()
                .filter(|(k, _)| x >> (m - 1 - k) & 1 == 1)
                .map(|(_, &q)| qubit_mask(n, q))
                .sum()
        })
        .collect()
}

fn check_distinct(n: usize, qubits: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &q in qubits {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: n,
            });
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::invalid(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// Reduced state on `keep`, in the order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if keep.is_empty() {
        return Err(Error::invalid("partial trace must keep at least one qubit"));
    }
    check_distinct(n, keep)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kept_off = subset_offsets(n, keep);
    let traced_off = subset_offsets(n, &traced);
    let dim = rho.dim();
    let kd = kept_off.len();
    let mut data = vec![Complex64::default(); kd * kd];
    for (r, &ro) in kept_off.iter().enumerate() {
        for (col, &co) in kept_off.iter().enumerate() {
            data[r * kd + col] = traced_off
                .iter()
                .map(|&t| rho.data[(ro | t) * dim + (co | t)])
                .sum();
        }
    }
    Ok(DensityMatrix::from_raw(keep.len(), data))
}

/// One factor of a local projective measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub qubit: usize,
    pub observable: Observable,
    pub outcome: Outcome,
}

impl Projection {
    pub fn new(qubit: usize, observable: Observable, outcome: Outcome) -> Self {
        Self {
            qubit,
            observable,
            outcome,
        }
    }
}

/// Result of conditioning on local outcomes.
#[derive(Debug, Clone)]
pub struct Conditioned {
    /// `tr(Π ρ Π)`.
    pub probability: f64,
    /// Normalized state on `remaining`; `None` when the outcome has zero probability.
    pub state: Option<DensityMatrix>,
    /// Unprojected qubits, ascending.
    pub remaining: Vec<usize>,
}

impl Conditioned {
    pub fn is_zero_probability(&self) -> bool {
        self.state.is_none()
    }
}

/// Unnormalized post-measurement state restricted to the unprojected qubits.
pub(crate) fn project_unnormalized(
    rho: &DensityMatrix,
    spec: &[Projection],
) -> Result<(DensityMatrix, Vec<usize>)> {
    let n = rho.n_qubits();
    let projected: Vec<usize> = spec.iter().map(|p| p.qubit).collect();
    check_distinct(n, &projected)?;
    if projected.len() >= n {
        return Err(Error::invalid("at least one qubit must remain unprojected"));
    }
    let remaining: Vec<usize> = (0..n).filter(|q| !projected.contains(q)).collect();

    // Amplitudes of ⊗_k |φ_k⟩ over assignments of the projected qubits.
    let m = spec.len();
    let vecs: Vec<[Complex64; 2]> = spec
        .iter()
        .map(|p| p.observable.eigenvector(p.outcome))
        .collect();
    let phi: Vec<Complex64> = (0..1usize << m)
        .map(|x| {
            vecs.iter()
                .enumerate()
                .map(|(k, v)| v[x >> (m - 1 - k) & 1])
                .product()
        })
        .collect();
    let proj_off = subset_offsets(n, &projected);
    let kept_off = subset_offsets(n, &remaining);
    let support: Vec<(usize, Complex64)> = proj_off
        .iter()
        .zip(&phi)
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(&o, &a)| (o, a))
        .collect();

    let dim = rho.dim();
    let kd = kept_off.len();
    let mut data = vec![Complex64::default(); kd * kd];
    for (r, &ro) in kept_off.iter().enumerate() {
        for (col, &co) in kept_off.iter().enumerate() {
            let mut acc = Complex64::default();
            for &(xo, ax) in &support {
                let row = (ro | xo) * dim;
                for &(yo, ay) in &support {
                    acc += ax.conj() * ay * rho.data[row + (co | yo)];
                }
            }
            data[r * kd + col] = acc;
        }
    }
    Ok((DensityMatrix::from_raw(remaining.len(), data), remaining))
}

/// Projects the listed qubits onto the given eigenstates and returns the
/// normalized state of the others together with the outcome probability.
pub fn project_and_condition(rho: &DensityMatrix, spec: &[Projection]) -> Result<Conditioned> {
    let (unnorm, remaining) = project_unnormalized(rho, spec)?;
    let prob = unnorm.trace().re;
    if prob <= ZERO_PROBABILITY {
        return Ok(Conditioned {
            probability: prob.max(0.0),
            state: None,
            remaining,
        });
    }
    let data = unnorm.data.iter().map(|v| v / prob).collect();
    Ok(Conditioned {
        probability: prob,
        state: Some(DensityMatrix::from_raw(remaining.len(), data)),
        remaining,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn amps_close(a: &[Complex64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - c(*y)).norm() < 1e-12)
    }

    #[test]
    fn ghz_examples() {
        let s = FRAC_1_SQRT_2;
        assert!(amps_close(ghz_state(2).unwrap().amplitudes(), &[s, 0.0, 0.0, s]));
        assert!(amps_close(
            ghz_state(3).unwrap().amplitudes(),
            &[s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, s]
        ));
        assert!(amps_close(ghz_state(1).unwrap().amplitudes(), &[s, s]));
        assert!(ghz_state(0).is_err());
    }

    #[test]
    fn w_examples() {
        let s = FRAC_1_SQRT_2;
        assert!(amps_close(w_state(2).unwrap().amplitudes(), &[0.0, s, s, 0.0]));
        let t = 1.0 / 3f64.sqrt();
        assert!(amps_close(
            w_state(3).unwrap().amplitudes(),
            &[0.0, t, t, 0.0, t, 0.0, 0.0, 0.0]
        ));
        assert!((w_state(4).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(w_state(1).is_err());
    }

    #[test]
    fn graph_state_examples() {
        let edgeless = GraphSpec::new(3, []).unwrap();
        let plus = PureState::product(&[Observable::x(); 3]).unwrap();
        assert!(
            graph_state(&edgeless)
                .unwrap()
                .amplitudes()
                .iter()
                .zip(plus.amplitudes())
                .all(|(a, b)| (a - b).norm() < 1e-12)
        );
        for g in [GraphSpec::new(2, [(0, 1)]).unwrap(), GraphSpec::star(3).unwrap()] {
            let rho = pure_to_density(&graph_state(&g).unwrap());
            for v in 0..g.n_vertices() {
                let k = g.generator(v);
                assert!((expectation(&rho, &k.matrices()).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_to_density_examples() {
        let zero = pure_to_density(&PureState::basis(1, 0).unwrap());
        assert_eq!(zero.data(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let plus = pure_to_density(&PureState::product(&[Observable::x()]).unwrap());
        assert!(plus.data().iter().all(|v| (v - c(0.5)).norm() < 1e-15));
        let ghz = pure_to_density(&ghz_state(2).unwrap());
        assert!((ghz.purity() - 1.0).abs() < 1e-12);
        ghz.validate().unwrap();
    }

    #[test]
    fn expectation_examples() {
        let zero = pure_to_density(&PureState::basis(1, 0).unwrap());
        assert_eq!(expectation(&zero, &[pauli(3)]).unwrap(), 1.0);
        let ghz3 = pure_to_density(&ghz_state(3).unwrap());
        assert!((expectation(&ghz3, &[pauli(1); 3]).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(expectation(&mixed, &[pauli(3), pauli(3)]).unwrap(), 0.0);
        assert!(matches!(
            expectation(&mixed, &[pauli(3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let ghz2 = pure_to_density(&ghz_state(2).unwrap());
        let reduced = partial_trace(&ghz2, &[0]).unwrap();
        assert!(reduced.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-15);

        let prod = pure_to_density(&PureState::basis(2, 0b01).unwrap());
        let second = partial_trace(&prod, &[1]).unwrap();
        assert!(second.max_abs_diff(&pure_to_density(&PureState::basis(1, 1).unwrap())) < 1e-15);

        let w3 = pure_to_density(&w_state(3).unwrap());
        assert!(partial_trace(&w3, &[0, 1, 2]).unwrap().max_abs_diff(&w3) < 1e-15);
        // Reordering the kept qubits permutes the reduced state.
        let swapped = partial_trace(&prod, &[1, 0]).unwrap();
        assert!(swapped.max_abs_diff(&pure_to_density(&PureState::basis(2, 0b10).unwrap())) < 1e-15);

        assert!(partial_trace(&w3, &[]).is_err());
        assert!(partial_trace(&w3, &[0, 0]).is_err());
        assert!(partial_trace(&w3, &[3]).is_err());
    }

    #[test]
    fn conditioning_ghz3_on_x_plus_gives_ghz2() {
        let ghz3 = pure_to_density(&ghz_state(3).unwrap());
        let out = project_and_condition(&ghz3, &[Projection::new(0, Observable::x(), Outcome::Plus)])
            .unwrap();
        assert!((out.probability - 0.5).abs() < 1e-12);
        assert_eq!(out.remaining, vec![1, 2]);
        let ghz2 = pure_to_density(&ghz_state(2).unwrap());
        assert!(out.state.unwrap().max_abs_diff(&ghz2) < 1e-12);
    }

    #[test]
    fn conditioning_w3_on_zero_gives_bell_state() {
        let w3 = pure_to_density(&w_state(3).unwrap());
        let out = project_and_condition(&w3, &[Projection::new(0, Observable::z(), Outcome::Plus)])
            .unwrap();
        assert!((out.probability - 2.0 / 3.0).abs() < 1e-12);
        let psi = pure_to_density(&w_state(2).unwrap());
        assert!(out.state.unwrap().max_abs_diff(&psi) < 1e-12);
    }

    #[test]
    fn zero_probability_is_flagged() {
        let zero = pure_to_density(&PureState::basis(2, 0).unwrap());
        let out = project_and_condition(&zero, &[Projection::new(0, Observable::z(), Outcome::Minus)])
            .unwrap();
        assert!(out.is_zero_probability());
        assert_eq!(out.probability, 0.0);
    }

    #[test]
    fn conditioning_errors() {
        let ghz3 = pure_to_density(&ghz_state(3).unwrap());
        let p = |q| Projection::new(q, Observable::x(), Outcome::Plus);
        assert!(project_and_condition(&ghz3, &[p(0), p(0)]).is_err());
        assert!(project_and_condition(&ghz3, &[p(0), p(1), p(2)]).is_err());
        assert!(project_and_condition(&ghz3, &[p(5)]).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(1, vec![c(1.0), c(0.0), c(0.0), c(0.0)]).is_ok());
        assert!(DensityMatrix::new(1, vec![c(0.5), c(0.0), c(0.0), c(0.4)]).is_err());
        assert!(DensityMatrix::new(1, vec![c(1.5), c(0.0), c(0.0), c(-0.5)]).is_err());
        assert!(DensityMatrix::new(1, vec![c(0.5), c(0.3), c(0.0), c(0.5)]).is_err());
    }
}
