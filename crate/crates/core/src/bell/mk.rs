use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{CorrelatorInequality, SettingTuple};
use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, Observable};

/// Mermin-Klyshko polynomial for `n` parties with two settings each:
/// `M_k = ½ M_{k-1}(A_k + A'_k) + ½ M'_{k-1}(A_k - A'_k)`, `M'_k` the same with
/// primed and unprimed settings swapped, `M_1 = A_1`. Local bound 1.
pub fn mk_inequality(n: usize) -> Result<CorrelatorInequality> {
    if n == 0 {
        return Err(Error::invalid("MK polynomial needs at least one party"));
    }
    let mut m: BTreeMap<Vec<usize>, f64> = BTreeMap::from([(vec![0], 1.0)]);
    let mut mp: BTreeMap<Vec<usize>, f64> = BTreeMap::from([(vec![1], 1.0)]);
    for _ in 1..n {
        let mut next = BTreeMap::new();
        let mut next_p = BTreeMap::new();
        let push = |map: &mut BTreeMap<Vec<usize>, f64>, t: &[usize], s: usize, c: f64| {
            let mut key = t.to_vec();
            key.push(s);
            *map.entry(key).or_insert(0.0) += c;
        };
        for (t, &c) in &m {
            push(&mut next, t, 0, c / 2.0);
            push(&mut next, t, 1, c / 2.0);
            push(&mut next_p, t, 1, c / 2.0);
            push(&mut next_p, t, 0, -c / 2.0);
        }
        for (t, &c) in &mp {
            push(&mut next, t, 0, c / 2.0);
            push(&mut next, t, 1, -c / 2.0);
            push(&mut next_p, t, 1, c / 2.0);
            push(&mut next_p, t, 0, c / 2.0);
        }
        next.retain(|_, c| *c != 0.0);
        next_p.retain(|_, c| *c != 0.0);
        m = next;
        mp = next_p;
    }
    let terms = m
        .into_iter()
        .map(|(t, c)| (t.into_iter().map(Some).collect::<SettingTuple>(), c));
    CorrelatorInequality::new(vec![2; n], terms, 1.0, None)
}

/// `⟨M_N⟩` for per-party settings `(A_k, A'_k)`.
pub fn mk_operator_value(rho: &DensityMatrix, settings: &[(Observable, Observable)]) -> Result<f64> {
    let ineq = mk_inequality(settings.len())?;
    let obs: Vec<Vec<Observable>> = settings.iter().map(|(a, b)| vec![*a, *b]).collect();
    ineq.quantum_value(rho, &obs)
}

/// Equatorial settings `A_k = X, A'_k = Y`, with the first party's pair rotated
/// by `π(n-1)/4` so that the GHZ value is `+2^{(n-1)/2}`.
///
/// For odd `n` the rotation is a multiple of `π/2`, so every observable is
/// `±X` or `±Y`.
pub fn mk_xy_settings(n: usize) -> Vec<(Observable, Observable)> {
    let gamma = PI * (n as f64 - 1.0) / 4.0;
    let (s, c) = gamma.sin_cos();
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    let first = (
        Observable::from_direction([snap(c), snap(-s), 0.0]).expect("unit"),
        Observable::from_direction([snap(s), snap(c), 0.0]).expect("unit"),
    );
    std::iter::once(first)
        .chain(std::iter::repeat_n((Observable::x(), Observable::y()), n.saturating_sub(1)))
        .collect()
}

/// Z-dephasing noise threshold of the MK test on GHZ, `1 - (1/√2)^{(n-1)/n}`, odd `n`.
pub fn mk_threshold_z(n: usize) -> Result<f64> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::invalid("the MK threshold formula holds for odd n >= 3"));
    }
    let n = n as f64;
    Ok(1.0 - std::f64::consts::FRAC_1_SQRT_2.powf((n - 1.0) / n))
}
