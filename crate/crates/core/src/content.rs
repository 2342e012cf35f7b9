//! Lower bounds on the EPR2 nonlocal content `p̃_NL`.

use std::fmt;

use rayon::prelude::*;

use crate::bell::CorrelatorInequality;
use crate::channels::PauliChannel;
use crate::error::{Error, Result};
use crate::family::{Conditioning, StateFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContentMethod {
    ChshPaired,
    ChshWeighted,
    GenericInequality,
    ClosedForm,
}

impl ContentMethod {
    pub fn label(self) -> &'static str {
        match self {
            ContentMethod::ChshPaired => "chsh-paired",
            ContentMethod::ChshWeighted => "chsh-weighted",
            ContentMethod::GenericInequality => "generic-inequality",
            ContentMethod::ClosedForm => "closed-form",
        }
    }

    /// Method used for each family: W projections other than the designated
    /// outcome leave separable states, so only the weighted bound applies there.
    pub fn for_family(family: &StateFamily) -> Self {
        match family {
            StateFamily::W { .. } => ContentMethod::ChshWeighted,
            _ => ContentMethod::ChshPaired,
        }
    }
}

impl fmt::Display for ContentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentBound {
    pub p: f64,
    /// In `[0, 1]`; zero without a violation.
    pub bound: f64,
    pub method: ContentMethod,
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `max(0, (value - L) / (U - L))` for local bound `L` and no-signalling bound `U`.
pub fn epr2_bound(value: f64, local_bound: f64, ns_bound: f64) -> Result<f64> {
    if ns_bound.is_nan() || local_bound.is_nan() || ns_bound <= local_bound {
        return Err(Error::invalid(format!(
            "no-signalling bound {ns_bound} must exceed local bound {local_bound}"
        )));
    }
    Ok(clamp01((value - local_bound) / (ns_bound - local_bound)))
}

/// [`epr2_bound`] with the bounds stored in the inequality.
pub fn inequality_bound(ineq: &CorrelatorInequality, value: f64) -> Result<f64> {
    let ns = ineq
        .ns_bound()
        .ok_or_else(|| Error::invalid("inequality has no no-signalling bound"))?;
    epr2_bound(value, ineq.local_bound(), ns)
}

/// `max(0, (m - 1) p(c))`: a single conditioned CHSH test at Horodecki value `m`.
pub fn chsh_weighted_bound(m: f64, prob: f64) -> f64 {
    clamp01((m - 1.0) * prob)
}

/// `max(0, m - 1)`: the paired tests, valid when both events reach the same `m`.
pub fn chsh_paired_bound(m: f64) -> f64 {
    clamp01(m - 1.0)
}

/// One point of a content curve, every quantity computed on the Kraus-evolved state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub p: f64,
    /// Conditioned Horodecki value; 0 when the conditioning outcome is impossible.
    pub m: f64,
    pub prob: f64,
    pub paired: f64,
    pub weighted: f64,
    /// Closed-form conditioned `m`, where one exists.
    pub closed_form: Option<f64>,
    /// `|m - closed_form|`.
    pub abs_diff: Option<f64>,
    pub method: ContentMethod,
}

impl CurvePoint {
    pub fn bound(&self) -> ContentBound {
        let bound = match self.method {
            ContentMethod::ChshWeighted => self.weighted,
            _ => self.paired,
        };
        ContentBound {
            p: self.p,
            bound,
            method: self.method,
        }
    }
}

/// Content bounds along `p_grid`, using the direction weights of `channel`.
pub fn content_curve(
    family: &StateFamily,
    channel: &PauliChannel,
    p_grid: &[f64],
) -> Result<Vec<CurvePoint>> {
    content_curve_with(family, channel, p_grid, &family.conditioning())
}

/// As [`content_curve`] with an explicit conditioning.
pub fn content_curve_with(
    family: &StateFamily,
    channel: &PauliChannel,
    p_grid: &[f64],
    cond: &Conditioning,
) -> Result<Vec<CurvePoint>> {
    let method = ContentMethod::for_family(family);
    p_grid
        .par_iter()
        .map(|&p| {
            let ch = channel.with_strength(p)?;
            let c = family.conditioned_chsh_with(&ch, cond)?;
            let m = c.m_or_zero();
            let closed_form = family.closed_form_m_for_pair(&ch, cond.pair);
            Ok(CurvePoint {
                p,
                m,
                prob: c.probability,
                paired: chsh_paired_bound(m),
                weighted: chsh_weighted_bound(m, c.probability),
                closed_form,
                abs_diff: closed_form.map(|f| (f - m).abs()),
                method,
            })
        })
        .collect()
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::invalid("a grid needs at least 2 points"));
    }
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(Error::invalid(format!("need 0 <= p_min <= p_max <= 1, got {lo}, {hi}")));
    }
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}
