//! Graph-state Bell operators `B(i,I) = K_i ∏_{j∈I}(1 + K_j)` and graph-diagonal states.

use num_complex::Complex64;

use super::{CorrelatorInequality, SettingTuple};
use crate::channels::PauliChannel;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::qstate::{
    check_qubit_count, expectation, graph_state, qubit_mask, DensityMatrix, GraphSpec, Observable,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphBellOperator {
    graph: GraphSpec,
    vertex: usize,
    subset: Vec<usize>,
}

impl GraphBellOperator {
    /// `subset` must be a non-empty set of pairwise non-adjacent neighbours of `vertex`.
    pub fn new(graph: GraphSpec, vertex: usize, subset: Vec<usize>) -> Result<Self> {
        let n = graph.n_vertices();
        if vertex >= n {
            return Err(Error::QubitOutOfRange {
                index: vertex,
                n_qubits: n,
            });
        }
        if subset.is_empty() {
            return Err(Error::invalid("subset I must be non-empty"));
        }
        let mut subset = subset;
        subset.sort_unstable();
        subset.dedup();
        for &j in &subset {
            if !graph.has_edge(vertex, j) {
                return Err(Error::invalid(format!(
                    "vertex {} is not a neighbour of {}",
                    j + 1,
                    vertex + 1
                )));
            }
        }
        for (k, &a) in subset.iter().enumerate() {
            for &b in &subset[k + 1..] {
                if graph.has_edge(a, b) {
                    return Err(Error::invalid(format!(
                        "vertices {} and {} of I are adjacent",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(Self {
            graph,
            vertex,
            subset,
        })
    }

    /// Centre of a star with every leaf in `I`.
    pub fn star(n: usize) -> Result<Self> {
        Self::new(GraphSpec::star(n)?, 0, (1..n).collect())
    }

    pub fn graph(&self) -> &GraphSpec {
        &self.graph
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    /// The `2^{|I|}` stabilizer products `K_i ∏_{j∈S} K_j`, `S ⊆ I`. All Hermitian.
    pub fn terms(&self) -> Vec<PauliString> {
        let ki = self.graph.generator(self.vertex);
        let m = self.subset.len();
        (0..1usize << m)
            .map(|s| {
                self.subset
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| s >> k & 1 == 1)
                    .fold(ki.clone(), |acc, (_, &j)| &acc * &self.graph.generator(j))
            })
            .collect()
    }

    /// Correlator form: each Pauli operator that appears on a party becomes one
    /// of its settings (ordered X, Y, Z). Returns the observables per party
    /// alongside. Parties never measured get a single dummy setting.
    pub fn to_inequality(&self) -> Result<(CorrelatorInequality, Vec<Vec<Observable>>)> {
        let n = self.graph.n_vertices();
        let terms = self.terms();
        let mut used = vec![[false; 4]; n];
        for t in &terms {
            for (k, &o) in t.ops().iter().enumerate() {
                used[k][o as usize] = true;
            }
        }
        let mut index = vec![[0usize; 4]; n];
        let mut observables = Vec::with_capacity(n);
        for k in 0..n {
            let mut obs = Vec::new();
            for o in 1..4 {
                if used[k][o] {
                    index[k][o] = obs.len();
                    obs.push(match o {
                        1 => Observable::x(),
                        2 => Observable::y(),
                        _ => Observable::z(),
                    });
                }
            }
            if obs.is_empty() {
                obs.push(Observable::z());
            }
            observables.push(obs);
        }
        let coeffs = terms
            .iter()
            .map(|t| {
                let sign = t
                    .sign()
                    .ok_or_else(|| Error::Numerical("non-Hermitian stabilizer product".into()))?;
                let tuple: SettingTuple = t
                    .ops()
                    .iter()
                    .enumerate()
                    .map(|(k, &o)| (o != 0).then(|| index[k][o as usize]))
                    .collect();
                Ok((tuple, sign))
            })
            .collect::<Result<Vec<_>>>()?;
        let ineq = CorrelatorInequality::new(
            observables.iter().map(Vec::len).collect(),
            coeffs,
            graph_bell_local_bound(self),
            Some(2f64.powi(self.subset.len() as i32)),
        )?;
        Ok((ineq, observables))
    }
}

/// `tr[B(i,I) ρ]` by summing the full-matrix expectation of every stabilizer product.
pub fn graph_bell_value(rho: &DensityMatrix, op: &GraphBellOperator) -> Result<f64> {
    let n = op.graph.n_vertices();
    if rho.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho.n_qubits(),
        });
    }
    op.terms()
        .iter()
        .map(|t| {
            let sign = t
                .sign()
                .ok_or_else(|| Error::Numerical("non-Hermitian stabilizer product".into()))?;
            Ok(sign * expectation(rho, &t.matrices())?)
        })
        .sum()
}

/// `L(|I|+1)` with `L(m) = 2^{(m-1)/2}` for odd `m`, `2^{m/2}` for even `m`.
pub fn graph_bell_local_bound(op: &GraphBellOperator) -> f64 {
    let m = op.subset.len() as i32 + 1;
    if m % 2 == 1 {
        2f64.powi((m - 1) / 2)
    } else {
        2f64.powi(m / 2)
    }
}

/// `(1-p)(1-p/2)^{|I|} 2^{|I|}`: the Bell value of a Z-dephased graph state.
///
/// Vertices outside `I ∪ {i}` do not enter, so for the star centre with every
/// leaf in `I` the exponent is `N-1`.
pub fn graph_bell_dephasing_closed_form(op: &GraphBellOperator, p: f64) -> f64 {
    let k = op.subset.len() as i32;
    (1.0 - p) * (1.0 - p / 2.0).powi(k) * 2f64.powi(k)
}

/// Weights `p_μ` of `Σ p_μ Z^μ|G⟩⟨G|Z^μ`, indexed like basis states (qubit 0 most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDiagonalWeights {
    n_qubits: usize,
    weights: Vec<f64>,
}

impl GraphDiagonalWeights {
    pub fn new(n_qubits: usize, weights: Vec<f64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if weights.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                found: weights.len(),
            });
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::invalid("weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { n_qubits, weights })
    }

    /// Weights of the graph state after `Λ^{⊗N}`. A Pauli error on `v` is a
    /// `Z` pattern on the graph state: `X_v → Z^{N(v)}`, `Z_v → Z_v`, `Y_v → both`.
    pub fn from_channel(g: &GraphSpec, ch: &PauliChannel) -> Result<Self> {
        let n = g.n_vertices();
        check_qubit_count(n)?;
        let [p0, p1, p2, p3] = ch.probabilities();
        let mut w = vec![0.0; 1 << n];
        w[0] = 1.0;
        for v in 0..n {
            let zv = qubit_mask(n, v);
            let xv = g.neighbors(v).iter().fold(0, |m, &u| m | qubit_mask(n, u));
            let yv = xv ^ zv;
            w = (0..w.len())
                .map(|mu| p0 * w[mu] + p1 * w[mu ^ xv] + p2 * w[mu ^ yv] + p3 * w[mu ^ zv])
                .collect();
        }
        Ok(Self {
            n_qubits: n,
            weights: w,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, mu: usize) -> f64 {
        self.weights[mu]
    }

    /// `Σ_μ p_μ ⟨G_μ|B|G_μ⟩ = Σ_μ p_μ (-1)^{μ_i} ∏_{j∈I} (1 + (-1)^{μ_j})`.
    pub fn bell_value(&self, op: &GraphBellOperator) -> f64 {
        let n = self.n_qubits;
        let mi = qubit_mask(n, op.vertex);
        let mset = op.subset.iter().fold(0, |m, &j| m | qubit_mask(n, j));
        let scale = 2f64.powi(op.subset.len() as i32);
        self.weights
            .iter()
            .enumerate()
            .filter(|(mu, _)| mu & mset == 0)
            .map(|(mu, &w)| if mu & mi == 0 { w } else { -w })
            .sum::<f64>()
            * scale
    }

    /// `(p_{μ⁰} - p_{μ¹}) 2^{|I|}`, with `μ¹` flagging only vertex `i`. Equal to
    /// [`Self::bell_value`] when `I ∪ {i}` covers every vertex; otherwise the
    /// weights must first be marginalised over the remaining vertices.
    pub fn two_weight_shortcut(&self, op: &GraphBellOperator) -> f64 {
        let mi = qubit_mask(self.n_qubits, op.vertex);
        (self.weights[0] - self.weights[mi]) * 2f64.powi(op.subset.len() as i32)
    }
}

/// `Σ_μ p_μ Z^μ|G⟩⟨G|Z^μ`. Entry `(x,y)` is `G_x G_y^* Σ_μ p_μ (-1)^{|μ∧(x⊕y)|}`;
/// the inner sum is a Walsh–Hadamard transform of the weights.
pub fn graph_diagonal_state(g: &GraphSpec, weights: &GraphDiagonalWeights) -> Result<DensityMatrix> {
    let n = g.n_vertices();
    if weights.n_qubits != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.n_qubits,
        });
    }
    let psi = graph_state(g)?;
    let a = psi.amplitudes();
    let dim = a.len();
    let mut f = weights.weights.clone();
    let mut h = 1;
    while h < dim {
        for block in (0..dim).step_by(2 * h) {
            for k in block..block + h {
                let (u, v) = (f[k], f[k + h]);
                f[k] = u + v;
                f[k + h] = u - v;
            }
        }
        h *= 2;
    }
    let mut data = Vec::with_capacity(dim * dim);
    for x in 0..dim {
        for y in 0..dim {
            data.push(a[x] * a[y].conj() * Complex64::new(f[x ^ y], 0.0));
        }
    }
    DensityMatrix::new(n, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::lhv_local_bound;
    use crate::channels::apply_channel_all;
    use crate::qstate::pure_to_density;

    #[test]
    fn validates_subset() {
        let g = GraphSpec::ring(4).unwrap();
        assert!(GraphBellOperator::new(g.clone(), 0, vec![]).is_err());
        assert!(GraphBellOperator::new(g.clone(), 0, vec![2]).is_err());
        assert!(GraphBellOperator::new(g.clone(), 0, vec![1, 3]).is_ok());
        let tri = GraphSpec::complete(3).unwrap();
        assert!(GraphBellOperator::new(tri, 0, vec![1, 2]).is_err());
    }

    #[test]
    fn local_bound_formula() {
        let vals: Vec<f64> = (2..=5)
            .map(|n| graph_bell_local_bound(&GraphBellOperator::star(n).unwrap()))
            .collect();
        assert_eq!(vals, vec![2.0, 2.0, 4.0, 4.0]);
    }

    #[test]
    fn brute_force_matches_local_bound() {
        for n in 2..=5 {
            let op = GraphBellOperator::star(n).unwrap();
            let (ineq, _) = op.to_inequality().unwrap();
            assert_eq!(lhv_local_bound(&ineq).unwrap(), graph_bell_local_bound(&op), "n = {n}");
        }
        let op = GraphBellOperator::new(GraphSpec::ring(5).unwrap(), 0, vec![1, 4]).unwrap();
        let (ineq, _) = op.to_inequality().unwrap();
        assert_eq!(lhv_local_bound(&ineq).unwrap(), 2.0);
    }

    #[test]
    fn pure_and_mixed_values() {
        let op = GraphBellOperator::new(GraphSpec::path(4).unwrap(), 1, vec![0, 2]).unwrap();
        let rho = pure_to_density(&graph_state(op.graph()).unwrap());
        assert!((graph_bell_value(&rho, &op).unwrap() - 4.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(graph_bell_value(&mixed, &op).unwrap().abs() < 1e-12);
        let (ineq, obs) = op.to_inequality().unwrap();
        assert!((ineq.quantum_value(&rho, &obs).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn dephasing_decay_on_non_spanning_subset() {
        // |I| = 1 on a 4-vertex path: only I ∪ {i} decays.
        let g = GraphSpec::path(4).unwrap();
        let op = GraphBellOperator::new(g.clone(), 1, vec![2]).unwrap();
        let pure = pure_to_density(&graph_state(&g).unwrap());
        for p in [0.0, 0.3, 0.8] {
            let ch = PauliChannel::dephasing_z(p).unwrap();
            let rho = apply_channel_all(&pure, &ch).unwrap();
            let v = graph_bell_value(&rho, &op).unwrap();
            assert!((v - graph_bell_dephasing_closed_form(&op, p)).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_state_matches_kraus() {
        let g = GraphSpec::path(4).unwrap();
        let pure = pure_to_density(&graph_state(&g).unwrap());
        for ch in [
            PauliChannel::depolarizing(0.35).unwrap(),
            PauliChannel::new(0.5, [0.2, 0.5, 0.3]).unwrap(),
        ] {
            let w = GraphDiagonalWeights::from_channel(&g, &ch).unwrap();
            assert!((w.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let rho = graph_diagonal_state(&g, &w).unwrap();
            let kraus = apply_channel_all(&pure, &ch).unwrap();
            assert!(rho.max_abs_diff(&kraus) < 1e-12);
            for (i, s) in [(1usize, vec![0usize, 2]), (2, vec![3])] {
                let op = GraphBellOperator::new(g.clone(), i, s).unwrap();
                let full = graph_bell_value(&rho, &op).unwrap();
                assert!((full - w.bell_value(&op)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weights_validate() {
        assert!(GraphDiagonalWeights::new(1, vec![0.5, 0.4]).is_err());
        assert!(GraphDiagonalWeights::new(1, vec![1.5, -0.5]).is_err());
        assert!(GraphDiagonalWeights::new(1, vec![0.5]).is_err());
        assert!(GraphDiagonalWeights::new(1, vec![0.25, 0.75]).is_ok());
    }
}
