//! Pauli strings with phase tracking, enough to expand products of graph-state
//! stabilizers into measurable correlators.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::qstate::{pauli, Mat2};

/// `i^phase · σ_{ops[0]} ⊗ … ⊗ σ_{ops[n-1]}`, with `ops[k] ∈ {0,1,2,3}` for I, X, Y, Z.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: u8,
    ops: Vec<u8>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            phase: 0,
            ops: vec![0; n],
        }
    }

    pub fn from_ops(ops: Vec<u8>) -> Self {
        assert!(ops.iter().all(|&o| o < 4), "pauli index out of range");
        Self { phase: 0, ops }
    }

    /// Single non-identity factor on `qubit`.
    pub fn single(n: usize, qubit: usize, op: u8) -> Self {
        let mut s = Self::identity(n);
        s.ops[qubit] = op;
        s
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[u8] {
        &self.ops
    }

    /// Power of `i` multiplying the tensor product.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Real sign of a Hermitian string; `None` when the phase is ±i.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn coefficient(&self) -> Complex64 {
        match self.phase {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Per-qubit matrices with the phase left out.
    pub fn matrices(&self) -> Vec<Mat2> {
        self.ops.iter().map(|&o| pauli(o as usize)).collect()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(&a, &b)| a != 0 && b != 0 && a != b)
            .count();
        anti % 2 == 0
    }
}

/// `σ_a σ_b = i^k σ_c`, returns `(c, k)`.
fn single_product(a: u8, b: u8) -> (u8, u8) {
    match (a, b) {
        (0, x) | (x, 0) => (x, 0),
        (x, y) if x == y => (0, 0),
        (1, 2) => (3, 1),
        (2, 3) => (1, 1),
        (3, 1) => (2, 1),
        (2, 1) => (3, 3),
        (3, 2) => (1, 3),
        (1, 3) => (2, 3),
        _ => unreachable!(),
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.len(), rhs.len(), "pauli strings of different length");
        let mut phase = self.phase + rhs.phase;
        let ops = self
            .ops
            .iter()
            .zip(&rhs.ops)
            .map(|(&a, &b)| {
                let (c, k) = single_product(a, b);
                phase += k;
                c
            })
            .collect();
        PauliString {
            phase: phase % 4,
            ops,
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        f.write_str(prefix)?;
        for &o in &self.ops {
            f.write_str(["I", "X", "Y", "Z"][o as usize])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xz_times_zx_is_yy() {
        let a = PauliString::from_ops(vec![1, 3]);
        let b = PauliString::from_ops(vec![3, 1]);
        let p = &a * &b;
        assert_eq!(p.ops(), &[2, 2]);
        assert_eq!(p.sign(), Some(1.0));
        assert!(a.commutes_with(&b));
    }

    #[test]
    fn single_qubit_table_is_consistent_with_matrices() {
        use crate::qstate::mat2_mul;
        for a in 0..4u8 {
            for b in 0..4u8 {
                let (c, k) = single_product(a, b);
                let lhs = mat2_mul(&pauli(a as usize), &pauli(b as usize));
                let coef = PauliString { phase: k, ops: vec![] }.coefficient();
                let rhs = pauli(c as usize);
                for r in 0..2 {
                    for col in 0..2 {
                        assert!((lhs[r][col] - coef * rhs[r][col]).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn display() {
        let s = &PauliString::from_ops(vec![1, 2]) * &PauliString::from_ops(vec![2, 0]);
        // XY · YI = (XY)⊗Y = iZ ⊗ Y
        assert_eq!(s.to_string(), "+iZY");
    }
}
