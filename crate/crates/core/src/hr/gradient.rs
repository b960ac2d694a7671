use std::fmt;

use crate::error::{Error, Result};
use crate::hr::jacobian::JacobianJ;
use crate::quaternion::{AxisUnit, Quaternion};

/// Which restricted HR operator a gradient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Imaginary units multiply the real partials from the right; the
    /// differential is `Σ (∂f/∂q^ν) dq^ν`.
    Left,
    /// Imaginary units multiply from the left; the differential is
    /// `Σ dq^ν (∂ᴿf/∂q^ν)`.
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            _ => Err(Error::InvalidConfig(format!("unknown side {s:?}, expected left or right"))),
        }
    }
}

/// `∇_r f = (∂f/∂q_a, ∂f/∂q_b, ∂f/∂q_c, ∂f/∂q_d)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RealGradient {
    pub partials: [Quaternion; 4],
}

impl RealGradient {
    pub const ZERO: RealGradient = RealGradient { partials: [Quaternion::ZERO; 4] };

    /// `∇_r q = (1, i, j, k)`.
    pub const IDENTITY: RealGradient = RealGradient {
        partials: [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K],
    };

    pub const fn new(da: Quaternion, db: Quaternion, dc: Quaternion, dd: Quaternion) -> Self {
        RealGradient { partials: [da, db, dc, dd] }
    }

    pub fn da(&self) -> Quaternion {
        self.partials[0]
    }
    pub fn db(&self) -> Quaternion {
        self.partials[1]
    }
    pub fn dc(&self) -> Quaternion {
        self.partials[2]
    }
    pub fn dd(&self) -> Quaternion {
        self.partials[3]
    }

    pub fn map(&self, f: impl FnMut(Quaternion) -> Quaternion) -> Self {
        RealGradient { partials: self.partials.map(f) }
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(Quaternion, Quaternion) -> Quaternion) -> Self {
        RealGradient { partials: std::array::from_fn(|k| f(self.partials[k], other.partials[k])) }
    }

    pub fn is_finite(&self) -> bool {
        self.partials.iter().all(|p| p.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_diff(&self.partials, &other.partials)
    }

    /// Component-Jacobian `P_{φβ} = ∂f_φ/∂q_β`.
    pub fn component_matrix(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|phi| std::array::from_fn(|beta| self.partials[beta].to_array()[phi]))
    }
}

/// `(∂f/∂q, ∂f/∂q^i, ∂f/∂q^j, ∂f/∂q^k)` for one of the two operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HRGradient {
    pub partials: [Quaternion; 4],
    pub side: Side,
}

impl HRGradient {
    pub const fn new(partials: [Quaternion; 4], side: Side) -> Self {
        HRGradient { partials, side }
    }

    pub fn d1(&self) -> Quaternion {
        self.partials[0]
    }
    pub fn di(&self) -> Quaternion {
        self.partials[1]
    }
    pub fn dj(&self) -> Quaternion {
        self.partials[2]
    }
    pub fn dk(&self) -> Quaternion {
        self.partials[3]
    }

    pub fn get(&self, nu: AxisUnit) -> Quaternion {
        self.partials[nu.index()]
    }

    pub fn expect_side(&self, side: Side) -> Result<()> {
        if self.side == side {
            Ok(())
        } else {
            Err(Error::SideMismatch { expected: side, found: self.side })
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_diff(&self.partials, &other.partials)
    }

    /// `max_ν |d_ν − (d_1)^ν|`, zero for real-valued functions.
    pub fn real_valued_residue(&self) -> f64 {
        AxisUnit::ALL
            .iter()
            .map(|&nu| self.get(nu).max_abs_diff(self.d1().involution(nu)))
            .fold(0.0, f64::max)
    }
}

/// Serializes as `side d1 dI dJ dK`, one quaternion string per slot.
impl fmt::Display for HRGradient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.side)?;
        for p in &self.partials {
            f.write_str(" ")?;
            fmt::Display::fmt(p, f)?;
        }
        Ok(())
    }
}

fn max_diff(a: &[Quaternion; 4], b: &[Quaternion; 4]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.max_abs_diff(*q)).fold(0.0, f64::max)
}

/// `∇_q f = ∇_r f Jᴴ`: `∂f/∂q^ν = Σ_φ (∂f/∂q_φ) conj(J_{νφ})`.
pub fn left_from_real(g: &RealGradient) -> HRGradient {
    let j = JacobianJ::new();
    let partials = std::array::from_fn(|nu| {
        (0..4).map(|phi| g.partials[phi] * j.entry(nu, phi).conj()).sum()
    });
    HRGradient::new(partials, Side::Left)
}

/// `(∇ᴿ_q f)ᵀ = J* (∇_r f)ᵀ`: the units act from the left.
pub fn right_from_real(g: &RealGradient) -> HRGradient {
    let j = JacobianJ::new();
    let partials = std::array::from_fn(|nu| {
        (0..4).map(|phi| j.entry(nu, phi).conj() * g.partials[phi]).sum()
    });
    HRGradient::new(partials, Side::Right)
}

pub fn hr_from_real(g: &RealGradient, side: Side) -> HRGradient {
    match side {
        Side::Left => left_from_real(g),
        Side::Right => right_from_real(g),
    }
}

/// Inverse of [`left_from_real`], from `∇_q f J = ¼ ∇_r f`.
pub fn real_from_left(h: &HRGradient) -> Result<RealGradient> {
    h.expect_side(Side::Left)?;
    let j = JacobianJ::new();
    let partials = std::array::from_fn(|phi| {
        (0..4).map(|nu| h.partials[nu] * j.entry(nu, phi)).sum::<Quaternion>() * 4.0
    });
    Ok(RealGradient { partials })
}

/// Inverse of [`right_from_real`].
pub fn real_from_right(h: &HRGradient) -> Result<RealGradient> {
    h.expect_side(Side::Right)?;
    let j = JacobianJ::new();
    let partials = std::array::from_fn(|phi| {
        (0..4).map(|nu| j.entry(nu, phi) * h.partials[nu]).sum::<Quaternion>() * 4.0
    });
    Ok(RealGradient { partials })
}

pub fn real_from_hr(h: &HRGradient) -> RealGradient {
    match h.side {
        Side::Left => real_from_left(h),
        Side::Right => real_from_right(h),
    }
    .expect("side matches by construction")
}

/// First-order increment `df` for the displacement `dq`.
///
/// Left gradients multiply `dq^ν` from the left, right gradients from the right.
pub fn differential(h: &HRGradient, dq: Quaternion) -> Quaternion {
    AxisUnit::ALL
        .iter()
        .map(|&nu| {
            let dqv = dq.involution(nu);
            match h.side {
                Side::Left => h.get(nu) * dqv,
                Side::Right => dqv * h.get(nu),
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Quaternion = Quaternion::new(1.0, 2.0, 3.0, 4.0);

    #[test]
    fn identity_function() {
        let l = left_from_real(&RealGradient::IDENTITY);
        let r = right_from_real(&RealGradient::IDENTITY);
        let expected = [Quaternion::ONE, Quaternion::ZERO, Quaternion::ZERO, Quaternion::ZERO];
        assert_eq!(l.partials, expected);
        assert_eq!(r.partials, expected);
        assert_eq!(l.side, Side::Left);
        assert_eq!(r.side, Side::Right);
    }

    #[test]
    fn conjugate_function() {
        let g = RealGradient::new(Quaternion::ONE, -Quaternion::I, -Quaternion::J, -Quaternion::K);
        let l = left_from_real(&g);
        let h = Quaternion::real(0.5);
        assert_eq!(l.partials, [-h, h, h, h]);
        assert_eq!(real_from_left(&l).unwrap(), g);
    }

    #[test]
    fn left_multiplication_by_constant() {
        let q0 = Quaternion::new(0.5, -1.0, 2.0, 0.25);
        let g = RealGradient::IDENTITY.map(|u| q0 * u);
        assert!(left_from_real(&g).d1().max_abs_diff(q0) < 1e-15);
        assert!(right_from_real(&g).d1().max_abs_diff(q0.real_part()) < 1e-15);
    }

    #[test]
    fn real_partials_give_equal_sides() {
        let g = RealGradient::new(
            Quaternion::real(1.5),
            Quaternion::real(-2.0),
            Quaternion::real(0.25),
            Quaternion::real(3.0),
        );
        assert_eq!(left_from_real(&g).partials, right_from_real(&g).partials);
    }

    #[test]
    fn inverse_of_basic_gradients() {
        let h = HRGradient::new([Quaternion::ONE, Quaternion::ZERO, Quaternion::ZERO, Quaternion::ZERO], Side::Left);
        assert_eq!(real_from_left(&h).unwrap(), RealGradient::IDENTITY);
        let right = HRGradient { side: Side::Right, ..h };
        assert!(matches!(real_from_left(&right), Err(Error::SideMismatch { .. })));
        assert_eq!(real_from_right(&right).unwrap(), RealGradient::IDENTITY);
    }

    #[test]
    fn identity_differential() {
        let h = left_from_real(&RealGradient::IDENTITY);
        let dq = Quaternion::new(0.3, -0.1, 0.7, 0.2);
        assert_eq!(differential(&h, dq), dq);
    }

    #[test]
    fn square_differential_matches_increment_form() {
        // d(q²) = (q + q_a)dq + q_b i dq^i + q_c j dq^j + q_d k dq^k
        let h = HRGradient::new(
            [Q + Q.a, Quaternion::I * Q.b, Quaternion::J * Q.c, Quaternion::K * Q.d],
            Side::Left,
        );
        let dq = Quaternion::new(0.01, 0.02, -0.03, 0.015);
        // exact first-order term of (q+dq)² − q² is q dq + dq q
        let expected = Q * dq + dq * Q;
        assert!(differential(&h, dq).max_abs_diff(expected) < 1e-15);
    }

    #[test]
    fn display_lists_side_then_slots() {
        let h = left_from_real(&RealGradient::IDENTITY);
        assert_eq!(h.to_string(), "left 1+0i+0j+0k 0+0i+0j+0k 0+0i+0j+0k 0+0i+0j+0k");
    }
}
