use num_complex::Complex64;

use crate::error::{Error, Result};

/// Single-qubit operator, `m[row][col]`.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// Pauli matrix by index: 0 = identity, 1 = X, 2 = Y, 3 = Z.
pub fn pauli(index: usize) -> Mat2 {
    match index {
        0 => identity(),
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("pauli index {index} out of range"),
    }
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Outcome of a dichotomic measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    /// Outcome pattern number `index` over `len` parties; bit k set means party k saw -1.
    pub fn pattern(index: usize, len: usize) -> Vec<Outcome> {
        (0..len)
            .map(|k| {
                if index >> k & 1 == 1 {
                    Outcome::Minus
                } else {
                    Outcome::Plus
                }
            })
            .collect()
    }
}

/// A ±1-valued projective qubit measurement `n·σ` given by its unit Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    bloch: [f64; 3],
}

impl Observable {
    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        let norm = norm3(&bloch);
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "observable Bloch vector must have unit norm, got {norm}"
            )));
        }
        Ok(Self { bloch })
    }

    /// Normalizes any non-zero direction.
    pub fn from_direction(v: [f64; 3]) -> Result<Self> {
        let norm = norm3(&v);
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::invalid("observable direction must be non-zero"));
        }
        Ok(Self {
            bloch: [v[0] / norm, v[1] / norm, v[2] / norm],
        })
    }

    /// `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            bloch: [st * cp, st * sp, ct],
        }
    }

    pub fn x() -> Self {
        Self { bloch: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        Self { bloch: [0.0, 1.0, 0.0] }
    }

    pub fn z() -> Self {
        Self { bloch: [0.0, 0.0, 1.0] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn negated(&self) -> Self {
        Self {
            bloch: [-self.bloch[0], -self.bloch[1], -self.bloch[2]],
        }
    }

    pub fn matrix(&self) -> Mat2 {
        let [x, y, z] = self.bloch;
        [
            [Complex64::new(z, 0.0), Complex64::new(x, -y)],
            [Complex64::new(x, y), Complex64::new(-z, 0.0)],
        ]
    }

    /// Normalized eigenvector of `n·σ` with eigenvalue `outcome.sign()`.
    pub fn eigenvector(&self, outcome: Outcome) -> [Complex64; 2] {
        let b = match outcome {
            Outcome::Plus => self.bloch,
            Outcome::Minus => self.negated().bloch,
        };
        let [x, y, z] = b;
        // |n⟩ = (cos θ/2, e^{iφ} sin θ/2), written without trig to stay exact on the axes.
        if z >= 0.0 {
            let c = ((1.0 + z) / 2.0).sqrt();
            let s = Complex64::new(x, y) / (2.0 * c);
            [Complex64::new(c, 0.0), s]
        } else {
            let s = ((1.0 - z) / 2.0).sqrt();
            let c = Complex64::new(x, -y) / (2.0 * s);
            [c, Complex64::new(s, 0.0)]
        }
    }

    /// Projector `(1 + s n·σ)/2` onto the given outcome.
    pub fn projector(&self, outcome: Outcome) -> Mat2 {
        let s = outcome.sign();
        let m = self.matrix();
        let id = identity();
        let mut out = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = (id[r][c] + m[r][c] * s) * 0.5;
            }
        }
        out
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
