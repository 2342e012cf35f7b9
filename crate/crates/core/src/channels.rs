//! Local Pauli channels `Λ(ρ) = Σ_i p_i σ_i ρ σ_i` and closed-form noisy states.
//!
//! [`apply_channel`] is a generic Kraus evolution and serves as the reference
//! for every closed-form constructor in this module.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{
    check_qubit_count, ghz_state, pauli, pure_to_density, qubit_mask, w_state, DensityMatrix, Mat2,
    CONSTRUCTION_TOL,
};

/// Noise strength `p` split over the X, Y, Z directions by `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannel {
    p: f64,
    alpha: [f64; 3],
}

impl PauliChannel {
    pub fn new(p: f64, alpha: [f64; 3]) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("noise strength {p} outside [0, 1]")));
        }
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::invalid("channel weights must be non-negative"));
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::invalid(format!("channel weights sum to {sum}, expected 1")));
        }
        Ok(Self { p, alpha })
    }

    pub fn dephasing_z(p: f64) -> Result<Self> {
        Self::new(p, [0.0, 0.0, 1.0])
    }

    pub fn dephasing_x(p: f64) -> Result<Self> {
        Self::new(p, [1.0, 0.0, 0.0])
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p, [1.0 / 3.0; 3])
    }

    /// Transversal dephasing off by `epsilon`: `alpha = (1-ε, ε/2, ε/2)`.
    pub fn approx_transversal(p: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::invalid("epsilon must lie in [0, 1]"));
        }
        Self::new(p, [1.0 - epsilon, epsilon / 2.0, epsilon / 2.0])
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> [f64; 3] {
        self.alpha
    }

    pub fn with_strength(&self, p: f64) -> Result<Self> {
        Self::new(p, self.alpha)
    }

    /// `(p0, p1, p2, p3) = (1 - p/2, α1 p/2, α2 p/2, α3 p/2)`.
    pub fn probabilities(&self) -> [f64; 4] {
        let h = self.p / 2.0;
        [1.0 - h, self.alpha[0] * h, self.alpha[1] * h, self.alpha[2] * h]
    }

    /// Factors by which the channel scales ⟨X⟩, ⟨Y⟩, ⟨Z⟩ of a single qubit.
    pub fn bloch_shrinking(&self) -> [f64; 3] {
        let [p0, p1, p2, p3] = self.probabilities();
        [p0 + p1 - p2 - p3, p0 - p1 + p2 - p3, p0 - p1 - p2 + p3]
    }

    pub fn kraus_operators(&self) -> Vec<Mat2> {
        self.probabilities()
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, w)| {
                let s = w.sqrt();
                pauli(i).map(|row| row.map(|v| v * s))
            })
            .collect()
    }

    pub fn kind(&self) -> ChannelKind {
        let is = |target: [f64; 3]| {
            self.alpha
                .iter()
                .zip(target)
                .all(|(a, t)| (a - t).abs() <= CONSTRUCTION_TOL)
        };
        if is([0.0, 0.0, 1.0]) {
            ChannelKind::DephasingZ
        } else if is([1.0, 0.0, 0.0]) {
            ChannelKind::DephasingX
        } else if is([1.0 / 3.0; 3]) {
            ChannelKind::Depolarizing
        } else {
            ChannelKind::Custom
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    DephasingZ,
    DephasingX,
    Depolarizing,
    Custom,
}

impl ChannelKind {
    pub fn label(self) -> &'static str {
        match self {
            ChannelKind::DephasingZ => "dephasing-z",
            ChannelKind::DephasingX => "dephasing-x",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::Custom => "custom",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "dephasing-z" => Some(ChannelKind::DephasingZ),
            "dephasing-x" => Some(ChannelKind::DephasingX),
            "depolarizing" => Some(ChannelKind::Depolarizing),
            "custom" => Some(ChannelKind::Custom),
            _ => None,
        }
    }

    /// Direction weights of the named kinds; `None` for `Custom`.
    pub fn alpha(self) -> Option<[f64; 3]> {
        match self {
            ChannelKind::DephasingZ => Some([0.0, 0.0, 1.0]),
            ChannelKind::DephasingX => Some([1.0, 0.0, 0.0]),
            ChannelKind::Depolarizing => Some([1.0 / 3.0; 3]),
            ChannelKind::Custom => None,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A Pauli channel together with the name it was requested under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NamedChannel {
    kind: ChannelKind,
    channel: PauliChannel,
}

impl NamedChannel {
    pub fn new(kind: ChannelKind, p: f64) -> Result<Self> {
        let alpha = kind
            .alpha()
            .ok_or_else(|| Error::invalid("custom channels need explicit weights"))?;
        Ok(Self {
            kind,
            channel: PauliChannel::new(p, alpha)?,
        })
    }

    /// Classifies `channel`; weights that match a named kind get that name.
    pub fn from_channel(channel: PauliChannel) -> Self {
        Self {
            kind: channel.kind(),
            channel,
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn channel(&self) -> &PauliChannel {
        &self.channel
    }

    pub fn with_strength(&self, p: f64) -> Result<Self> {
        Ok(Self {
            kind: self.kind,
            channel: self.channel.with_strength(p)?,
        })
    }
}

/// Generic Kraus evolution `Σ_k K_k ρ K_k†` on one qubit.
pub fn apply_kraus(rho: &DensityMatrix, qubit: usize, kraus: &[Mat2]) -> Result<DensityMatrix> {
    rho.check_qubit(qubit)?;
    let mut acc = vec![Complex64::default(); rho.data().len()];
    for k in kraus {
        for (a, v) in acc.iter_mut().zip(rho.sandwich(qubit, k)) {
            *a += v;
        }
    }
    Ok(DensityMatrix::from_raw(rho.n_qubits(), acc))
}

pub fn apply_channel(rho: &DensityMatrix, ch: &PauliChannel, qubit: usize) -> Result<DensityMatrix> {
    apply_kraus(rho, qubit, &ch.kraus_operators())
}

/// `Λ^{⊗N}(ρ)`.
pub fn apply_channel_all(rho: &DensityMatrix, ch: &PauliChannel) -> Result<DensityMatrix> {
    let kraus = ch.kraus_operators();
    let mut out = rho.clone();
    for q in 0..rho.n_qubits() {
        out = apply_kraus(&out, q, &kraus)?;
    }
    Ok(out)
}

fn check_family_args(n: usize, p: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("noisy family states need n >= 2"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("noise strength {p} outside [0, 1]")));
    }
    check_qubit_count(n)
}

/// GHZ under parallel Z dephasing:
/// `(1-p)^N |GHZ⟩⟨GHZ| + (1-(1-p)^N)(|0…0⟩⟨0…0| + |1…1⟩⟨1…1|)/2`.
pub fn dephased_ghz_z(n: usize, p: f64) -> Result<DensityMatrix> {
    check_family_args(n, p)?;
    let coherence = (1.0 - p).powi(n as i32);
    let dim = 1usize << n;
    let last = dim - 1;
    let mut data = vec![Complex64::default(); dim * dim];
    data[0] = Complex64::new(0.5, 0.0);
    data[last * dim + last] = Complex64::new(0.5, 0.0);
    data[last] = Complex64::new(coherence / 2.0, 0.0);
    data[last * dim] = Complex64::new(coherence / 2.0, 0.0);
    Ok(DensityMatrix::from_raw(n, data))
}

/// GHZ under parallel X dephasing: every flip pattern `k` of the qubits
/// contributes `(1-p/2)^{N-|k|} (p/2)^{|k|} X^k |GHZ⟩⟨GHZ| X^k`.
pub fn dephased_ghz_x(n: usize, p: f64) -> Result<DensityMatrix> {
    check_family_args(n, p)?;
    let dim = 1usize << n;
    let last = dim - 1;
    let keep = 1.0 - p / 2.0;
    let flip = p / 2.0;
    let mut data = vec![Complex64::default(); dim * dim];
    for mask in 0..dim {
        let k = mask.count_ones() as i32;
        let w = keep.powi(n as i32 - k) * flip.powi(k) / 2.0;
        // X^k |GHZ⟩ = (|mask⟩ + |~mask⟩)/√2
        let (a, b) = (mask, last ^ mask);
        for (r, col) in [(a, a), (a, b), (b, a), (b, b)] {
            data[r * dim + col] += Complex64::new(w, 0.0);
        }
    }
    Ok(DensityMatrix::from_raw(n, data))
}

/// W under parallel Z dephasing: `p' |W⟩⟨W| + (1-p')/N Σ_k |e_k⟩⟨e_k|`, `p' = (1-p)^2`.
pub fn dephased_w_z(n: usize, p: f64) -> Result<DensityMatrix> {
    check_family_args(n, p)?;
    let coherent = (1.0 - p).powi(2);
    let mut rho = pure_to_density(&w_state(n)?);
    let dim = rho.dim();
    let mut data = rho.data().to_vec();
    for v in data.iter_mut() {
        *v *= coherent;
    }
    for q in 0..n {
        let e = qubit_mask(n, q);
        data[e * dim + e] += Complex64::new((1.0 - coherent) / n as f64, 0.0);
    }
    rho = DensityMatrix::from_raw(n, data);
    Ok(rho)
}

/// Reference noisy GHZ: Kraus evolution of the pure state.
pub fn noisy_ghz(n: usize, ch: &PauliChannel) -> Result<DensityMatrix> {
    apply_channel_all(&pure_to_density(&ghz_state(n)?), ch)
}
