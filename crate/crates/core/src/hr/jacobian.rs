//! The Jacobian `J` that maps real partials onto HR partials, and small
//! 4×4 quaternion matrix utilities.

use std::ops::Mul;

use crate::quaternion::{AxisUnit, Quaternion};

/// `±1, ±i, ±j, ±k` as an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedUnit {
    pub negative: bool,
    pub unit: AxisUnit,
}

impl SignedUnit {
    pub const fn new(negative: bool, unit: AxisUnit) -> Self {
        SignedUnit { negative, unit }
    }

    pub fn conj(self) -> Self {
        match self.unit {
            AxisUnit::One => self,
            _ => SignedUnit::new(!self.negative, self.unit),
        }
    }

    /// Integer components `(a, b, c, d)`.
    pub fn to_int(self) -> [i64; 4] {
        let mut v = [0; 4];
        v[self.unit.index()] = if self.negative { -1 } else { 1 };
        v
    }

    pub fn to_quaternion(self) -> Quaternion {
        let q = self.unit.unit();
        if self.negative {
            -q
        } else {
            q
        }
    }
}

impl Mul for SignedUnit {
    type Output = SignedUnit;

    fn mul(self, rhs: SignedUnit) -> SignedUnit {
        use AxisUnit::*;
        let (flip, unit) = match (self.unit, rhs.unit) {
            (One, u) | (u, One) => (false, u),
            (I, I) | (J, J) | (K, K) => (true, One),
            (I, J) => (false, K),
            (J, I) => (true, K),
            (J, K) => (false, I),
            (K, J) => (true, I),
            (K, I) => (false, J),
            (I, K) => (true, J),
        };
        SignedUnit::new(self.negative ^ rhs.negative ^ flip, unit)
    }
}

/// `J = ¼·[[1,i,j,k],[1,i,-j,-k],[1,-i,j,-k],[1,-i,-j,k]]`, stored as
/// exact signed units with the common factor ¼ kept separate.
///
/// Row `ν` holds the `ν`-involutions of `(1, i, j, k)`.
/// 4×4 integer quaternions, each written `[a, b, c, d]`.
pub type ExactMatrix = [[[i64; 4]; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JacobianJ {
    pub units: [[SignedUnit; 4]; 4],
}

impl Default for JacobianJ {
    fn default() -> Self {
        Self::new()
    }
}

impl JacobianJ {
    pub const SCALE: f64 = 0.25;

    pub fn new() -> Self {
        let units = AxisUnit::ALL.map(|row| {
            AxisUnit::ALL.map(|col| {
                let flipped = match (row, col) {
                    (_, AxisUnit::One) | (AxisUnit::One, _) => false,
                    (r, c) => r != c,
                };
                SignedUnit::new(flipped, col)
            })
        });
        JacobianJ { units }
    }

    /// `J_{νφ}` as a floating point quaternion; every entry is exact.
    pub fn entry(&self, row: usize, col: usize) -> Quaternion {
        self.units[row][col].to_quaternion() * Self::SCALE
    }

    pub fn to_matrix(&self) -> QuatMatrix {
        QuatMatrix(std::array::from_fn(|r| std::array::from_fn(|c| self.entry(r, c))))
    }

    /// `16·J·Jᴴ` and `16·Jᴴ·J` in exact integer quaternion arithmetic.
    pub fn exact_gram_products(&self) -> (ExactMatrix, ExactMatrix) {
        let u = &self.units;
        let sum = |terms: [SignedUnit; 4]| {
            terms.iter().fold([0i64; 4], |mut acc, t| {
                for (a, x) in acc.iter_mut().zip(t.to_int()) {
                    *a += x;
                }
                acc
            })
        };
        let j_jh = std::array::from_fn(|m| {
            std::array::from_fn(|n| sum(std::array::from_fn(|p| u[m][p] * u[n][p].conj())))
        });
        let jh_j = std::array::from_fn(|m| {
            std::array::from_fn(|n| sum(std::array::from_fn(|p| u[p][m].conj() * u[p][n])))
        });
        (j_jh, jh_j)
    }
}

/// A dense 4×4 matrix of quaternions, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuatMatrix(pub [[Quaternion; 4]; 4]);

impl QuatMatrix {
    pub fn identity() -> Self {
        QuatMatrix(std::array::from_fn(|r| {
            std::array::from_fn(|c| if r == c { Quaternion::ONE } else { Quaternion::ZERO })
        }))
    }

    pub fn from_real(m: &[[f64; 4]; 4]) -> Self {
        QuatMatrix(m.map(|row| row.map(Quaternion::real)))
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        QuatMatrix(std::array::from_fn(|r| std::array::from_fn(|c| self.0[c][r].conj())))
    }

    pub fn transpose(&self) -> Self {
        QuatMatrix(std::array::from_fn(|r| std::array::from_fn(|c| self.0[c][r])))
    }

    pub fn scale(&self, s: f64) -> Self {
        QuatMatrix(self.0.map(|row| row.map(|q| q * s)))
    }

    pub fn max_abs_diff(&self, other: &QuatMatrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(p, q)| p.max_abs_diff(*q))
            .fold(0.0, f64::max)
    }
}

impl Mul for &QuatMatrix {
    type Output = QuatMatrix;

    fn mul(self, rhs: &QuatMatrix) -> QuatMatrix {
        QuatMatrix(std::array::from_fn(|r| {
            std::array::from_fn(|c| (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum())
        }))
    }
}

impl Mul for QuatMatrix {
    type Output = QuatMatrix;

    #[allow(clippy::op_ref)]
    fn mul(self, rhs: QuatMatrix) -> QuatMatrix {
        &self * &rhs
    }
}
