//! Multipartite Bell expressions and their local (LHV) bounds.
//!
//! Everything here reduces to a [`CorrelatorInequality`]: a linear combination
//! of correlators `⟨∏_k a_{k,s_k}⟩` over the parties that are measured in a
//! term. The brute-force [`lhv_local_bound`] enumerates deterministic
//! strategies and is the reference for every analytic local bound.

mod conditioned;
mod graph;
mod io;
mod mk;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qstate::{expectation, identity, DensityMatrix, Mat2, Observable};

pub use conditioned::{
    conditioned_chsh_inequality, conditioned_chsh_value, paired_chsh_value, Event, EventPartition,
    PairedChsh,
};
pub use graph::{
    graph_bell_dephasing_closed_form, graph_bell_local_bound, graph_bell_value,
    graph_diagonal_state, GraphBellOperator, GraphDiagonalWeights,
};
pub use io::{load_inequalities, parse_inequalities, write_inequalities};
pub use mk::{mk_inequality, mk_operator_value, mk_threshold_z, mk_xy_settings};

/// Setting chosen by one party in a correlator term; `None` means the party is not measured.
pub type SettingTuple = Vec<Option<usize>>;

/// Cap on the number of deterministic-strategy bits enumerated by [`lhv_local_bound`].
pub const MAX_STRATEGY_BITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorInequality {
    settings_per_party: Vec<usize>,
    coefficients: BTreeMap<SettingTuple, f64>,
    local_bound: f64,
    ns_bound: Option<f64>,
}

impl CorrelatorInequality {
    /// Terms with the same setting tuple are summed; zero coefficients are dropped.
    pub fn new(
        settings_per_party: Vec<usize>,
        terms: impl IntoIterator<Item = (SettingTuple, f64)>,
        local_bound: f64,
        ns_bound: Option<f64>,
    ) -> Result<Self> {
        if settings_per_party.is_empty() || settings_per_party.contains(&0) {
            return Err(Error::invalid("every party needs at least one setting"));
        }
        if !local_bound.is_finite() {
            return Err(Error::invalid("local bound must be finite"));
        }
        if let Some(ns) = ns_bound {
            if !ns.is_finite() {
                return Err(Error::invalid("no-signalling bound must be finite"));
            }
        }
        let mut coefficients: BTreeMap<SettingTuple, f64> = BTreeMap::new();
        for (tuple, coef) in terms {
            if tuple.len() != settings_per_party.len() {
                return Err(Error::invalid(format!(
                    "term has {} entries for {} parties",
                    tuple.len(),
                    settings_per_party.len()
                )));
            }
            for (k, s) in tuple.iter().enumerate() {
                if let Some(s) = s {
                    if *s >= settings_per_party[k] {
                        return Err(Error::invalid(format!(
                            "party {} has {} settings, term uses setting {s}",
                            k + 1,
                            settings_per_party[k]
                        )));
                    }
                }
            }
            if !coef.is_finite() {
                return Err(Error::invalid("coefficients must be finite"));
            }
            *coefficients.entry(tuple).or_insert(0.0) += coef;
        }
        coefficients.retain(|_, c| *c != 0.0);
        if coefficients.is_empty() {
            return Err(Error::invalid("inequality has no non-zero terms"));
        }
        Ok(Self {
            settings_per_party,
            coefficients,
            local_bound,
            ns_bound,
        })
    }

    pub fn n_parties(&self) -> usize {
        self.settings_per_party.len()
    }

    pub fn settings_per_party(&self) -> &[usize] {
        &self.settings_per_party
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SettingTuple, f64)> {
        self.coefficients.iter().map(|(t, c)| (t, *c))
    }

    pub fn local_bound(&self) -> f64 {
        self.local_bound
    }

    pub fn ns_bound(&self) -> Option<f64> {
        self.ns_bound
    }

    pub fn with_bounds(mut self, local_bound: f64, ns_bound: Option<f64>) -> Self {
        self.local_bound = local_bound;
        self.ns_bound = ns_bound;
        self
    }

    /// Left-hand side for a local deterministic strategy: `outcome(k, s)` is ±1.
    pub fn deterministic_value(&self, outcome: impl Fn(usize, usize) -> f64) -> f64 {
        self.terms()
            .map(|(tuple, c)| {
                c * tuple
                    .iter()
                    .enumerate()
                    .filter_map(|(k, s)| s.map(|s| outcome(k, s)))
                    .product::<f64>()
            })
            .sum()
    }

    /// Quantum value `Σ c ⟨⊗ obs⟩` with `observables[k][s]` the observable of party `k`, setting `s`.
    pub fn quantum_value(&self, rho: &DensityMatrix, observables: &[Vec<Observable>]) -> Result<f64> {
        let n = self.n_parties();
        if rho.n_qubits() != n || observables.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if rho.n_qubits() != n {
                    rho.n_qubits()
                } else {
                    observables.len()
                },
            });
        }
        for (k, obs) in observables.iter().enumerate() {
            if obs.len() != self.settings_per_party[k] {
                return Err(Error::invalid(format!(
                    "party {} needs {} observables, got {}",
                    k + 1,
                    self.settings_per_party[k],
                    obs.len()
                )));
            }
        }
        let mats: Vec<Vec<Mat2>> = observables
            .iter()
            .map(|o| o.iter().map(Observable::matrix).collect())
            .collect();
        let mut total = 0.0;
        for (tuple, c) in self.terms() {
            let ops: Vec<Mat2> = tuple
                .iter()
                .enumerate()
                .map(|(k, s)| s.map_or_else(identity, |s| mats[k][s]))
                .collect();
            total += c * expectation(rho, &ops)?;
        }
        Ok(total)
    }
}

/// Exact maximum of the inequality over all local deterministic strategies.
pub fn lhv_local_bound(ineq: &CorrelatorInequality) -> Result<f64> {
    let offsets: Vec<usize> = ineq
        .settings_per_party
        .iter()
        .scan(0, |acc, &m| {
            let o = *acc;
            *acc += m;
            Some(o)
        })
        .collect();
    let bits: usize = ineq.settings_per_party.iter().sum();
    if bits > MAX_STRATEGY_BITS {
        return Err(Error::SearchSpaceTooLarge { bits });
    }
    // Bit set = outcome -1 for that (party, setting).
    let terms: Vec<(u32, f64)> = ineq
        .terms()
        .map(|(tuple, c)| {
            let mask = tuple
                .iter()
                .enumerate()
                .filter_map(|(k, s)| s.map(|s| 1u32 << (offsets[k] + s)))
                .fold(0, |a, b| a | b);
            (mask, c)
        })
        .collect();
    let eval = |strategy: u32| -> f64 {
        terms
            .iter()
            .map(|&(mask, c)| {
                if (mask & strategy).count_ones().is_multiple_of(2) {
                    c
                } else {
                    -c
                }
            })
            .sum()
    };
    let best = (0..1u32 << bits)
        .into_par_iter()
        .with_min_len(1 << 12)
        .map(eval)
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// CHSH: `⟨a0b0⟩ + ⟨a0b1⟩ + ⟨a1b0⟩ - ⟨a1b1⟩`, local bound 2, no-signalling bound 4.
pub fn chsh_inequality() -> CorrelatorInequality {
    CorrelatorInequality::new(
        vec![2, 2],
        [
            (vec![Some(0), Some(0)], 1.0),
            (vec![Some(0), Some(1)], 1.0),
            (vec![Some(1), Some(0)], 1.0),
            (vec![Some(1), Some(1)], -1.0),
        ],
        2.0,
        Some(4.0),
    )
    .expect("valid CHSH")
}
