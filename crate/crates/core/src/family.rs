//! The three state families studied (GHZ, W, graph states), each with its
//! conditioning recipe and, where one exists, a closed-form conditioned `M`.

use std::fmt;

use crate::channels::{apply_channel_all, ChannelKind, PauliChannel};
use crate::chsh::{conditioned_m_chsh, ghz_pauli_m, ConditionedChsh};
use crate::error::{Error, Result};
use crate::qstate::{
    check_qubit_count, ghz_state, graph_state, pure_to_density, w_state, DensityMatrix, GraphSpec,
    Observable, Outcome, Projection, PureState,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateFamily {
    Ghz { n: usize },
    W { n: usize },
    Graph(GraphSpec),
}

/// Local measurements on all but two qubits, plus the two that are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditioning {
    pub observables: Vec<(usize, Observable)>,
    pub pair: (usize, usize),
}

impl Conditioning {
    pub fn with_outcomes(&self, outcomes: &[Outcome]) -> Vec<Projection> {
        assert_eq!(outcomes.len(), self.observables.len());
        self.observables
            .iter()
            .zip(outcomes)
            .map(|(&(q, o), &s)| Projection::new(q, o, s))
            .collect()
    }

    pub fn all_plus(&self) -> Vec<Projection> {
        self.with_outcomes(&vec![Outcome::Plus; self.observables.len()])
    }
}

impl StateFamily {
    pub fn ghz(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("the GHZ family needs n >= 3"));
        }
        check_qubit_count(n)?;
        Ok(StateFamily::Ghz { n })
    }

    pub fn w(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("the W family needs n >= 3"));
        }
        check_qubit_count(n)?;
        Ok(StateFamily::W { n })
    }

    pub fn graph(g: GraphSpec) -> Result<Self> {
        if g.n_vertices() < 3 {
            return Err(Error::invalid("the graph family needs at least 3 vertices"));
        }
        if g.edges().next().is_none() {
            return Err(Error::invalid("the graph family needs at least one edge"));
        }
        check_qubit_count(g.n_vertices())?;
        Ok(StateFamily::Graph(g))
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            StateFamily::Ghz { n } | StateFamily::W { n } => *n,
            StateFamily::Graph(g) => g.n_vertices(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            StateFamily::Ghz { .. } => "ghz",
            StateFamily::W { .. } => "w",
            StateFamily::Graph(_) => "graph",
        }
    }

    pub fn pure_state(&self) -> Result<PureState> {
        match self {
            StateFamily::Ghz { n } => ghz_state(*n),
            StateFamily::W { n } => w_state(*n),
            StateFamily::Graph(g) => graph_state(g),
        }
    }

    /// `Λ^{⊗N}` applied to the family's pure state by Kraus evolution.
    pub fn noisy_state(&self, ch: &PauliChannel) -> Result<DensityMatrix> {
        apply_channel_all(&pure_to_density(&self.pure_state()?), ch)
    }

    /// GHZ: X on qubits `0..N-2`, keep the last two.
    /// W: Z on qubits `0..N-2`, keep the last two.
    /// Graph: Z on everything except a highest-degree vertex and its lowest neighbour.
    pub fn conditioning(&self) -> Conditioning {
        let n = self.n_qubits();
        match self {
            StateFamily::Ghz { .. } | StateFamily::W { .. } => {
                let obs = if matches!(self, StateFamily::Ghz { .. }) {
                    Observable::x()
                } else {
                    Observable::z()
                };
                Conditioning {
                    observables: (0..n - 2).map(|q| (q, obs)).collect(),
                    pair: (n - 2, n - 1),
                }
            }
            StateFamily::Graph(g) => {
                let hub = (0..n)
                    .max_by(|&a, &b| g.degree(a).cmp(&g.degree(b)).then(b.cmp(&a)))
                    .expect("non-empty graph");
                let partner = g.neighbors(hub)[0];
                Conditioning {
                    observables: (0..n)
                        .filter(|&q| q != hub && q != partner)
                        .map(|q| (q, Observable::z()))
                        .collect(),
                    pair: (hub, partner),
                }
            }
        }
    }

    /// The family's measurement basis (X for GHZ, Z otherwise) on every qubit
    /// outside a caller-chosen `pair`.
    pub fn conditioning_for_pair(&self, pair: (usize, usize)) -> Result<Conditioning> {
        let n = self.n_qubits();
        if pair.0 == pair.1 || pair.0 >= n || pair.1 >= n {
            return Err(Error::invalid(format!(
                "pair ({}, {}) is not two distinct qubits of {n}",
                pair.0 + 1,
                pair.1 + 1
            )));
        }
        let obs = match self {
            StateFamily::Ghz { .. } => Observable::x(),
            _ => Observable::z(),
        };
        Ok(Conditioning {
            observables: (0..n)
                .filter(|&q| q != pair.0 && q != pair.1)
                .map(|q| (q, obs))
                .collect(),
            pair,
        })
    }

    /// Conditioned Horodecki value with every projected party reporting +1.
    pub fn conditioned_chsh(&self, ch: &PauliChannel) -> Result<ConditionedChsh> {
        self.conditioned_chsh_with(ch, &self.conditioning())
    }

    pub fn conditioned_chsh_with(&self, ch: &PauliChannel, cond: &Conditioning) -> Result<ConditionedChsh> {
        let rho = self.noisy_state(ch)?;
        conditioned_m_chsh(&rho, &cond.all_plus(), cond.pair)
    }

    /// Closed-form conditioned `M`, where one is known for this family and channel.
    pub fn closed_form_m(&self, ch: &PauliChannel) -> Option<f64> {
        self.closed_form_m_for_pair(ch, self.conditioning().pair)
    }

    /// As [`Self::closed_form_m`] for the basis of [`Self::conditioning_for_pair`].
    /// GHZ and W are symmetric; for graphs the pair must be an edge.
    pub fn closed_form_m_for_pair(&self, ch: &PauliChannel, pair: (usize, usize)) -> Option<f64> {
        let p = ch.p();
        match (self, ch.kind()) {
            (StateFamily::Ghz { n }, _) => Some(ghz_pauli_m(*n, ch)),
            (StateFamily::W { .. }, ChannelKind::DephasingZ) => {
                Some((1.0 + (1.0 - p).powi(4)).sqrt())
            }
            (StateFamily::Graph(g), ChannelKind::DephasingZ) if g.has_edge(pair.0, pair.1) => {
                Some((1.0 - p) * std::f64::consts::SQRT_2)
            }
            _ => None,
        }
    }

    /// Closed-form probability of the all-plus conditioning outcome, where known.
    pub fn closed_form_probability(&self) -> Option<f64> {
        let n = self.n_qubits() as f64;
        match self {
            StateFamily::Ghz { .. } => Some(2f64.powf(2.0 - n)),
            StateFamily::W { .. } => Some(2.0 / n),
            StateFamily::Graph(_) => None,
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateFamily::Ghz { n } => write!(f, "GHZ_{n}"),
            StateFamily::W { n } => write!(f, "W_{n}"),
            StateFamily::Graph(g) => write!(f, "graph({} vertices)", g.n_vertices()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(StateFamily::ghz(2).is_err());
        assert!(StateFamily::w(2).is_err());
        assert!(StateFamily::graph(GraphSpec::new(3, []).unwrap()).is_err());
        assert!(StateFamily::ghz(64).is_err());
    }

    #[test]
    fn star_conditioning_keeps_centre_and_a_leaf() {
        let fam = StateFamily::graph(GraphSpec::star(5).unwrap()).unwrap();
        let cond = fam.conditioning();
        assert_eq!(cond.pair, (0, 1));
        assert_eq!(cond.observables.iter().map(|o| o.0).collect::<Vec<_>>(), vec![2, 3, 4]);
    }

    #[test]
    fn graph_closed_form_on_any_edge() {
        let fam = StateFamily::graph(GraphSpec::path(5).unwrap()).unwrap();
        let ch = PauliChannel::dephasing_z(0.35).unwrap();
        for pair in [(2, 3), (3, 4), (0, 1)] {
            let cond = fam.conditioning_for_pair(pair).unwrap();
            let m = fam.conditioned_chsh_with(&ch, &cond).unwrap().m.unwrap();
            assert!((m - fam.closed_form_m_for_pair(&ch, pair).unwrap()).abs() < 1e-12);
        }
        assert!(fam.closed_form_m_for_pair(&ch, (0, 2)).is_none());
        assert!(fam.conditioning_for_pair((1, 1)).is_err());
    }

    #[test]
    fn w_conditioning_probability() {
        let fam = StateFamily::w(5).unwrap();
        let c = fam.conditioned_chsh(&PauliChannel::dephasing_z(0.4).unwrap()).unwrap();
        assert!((c.probability - 0.4).abs() < 1e-12);
        assert!((c.m.unwrap() - fam.closed_form_m(&PauliChannel::dephasing_z(0.4).unwrap()).unwrap()).abs() < 1e-12);
    }
}
