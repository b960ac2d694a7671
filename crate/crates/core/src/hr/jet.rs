//! Forward-mode carrier for the four real partials of a quaternion function.
//!
//! Jets propagate `∂/∂q_φ` for `φ ∈ {a, b, c, d}` with the ordinary,
//! order-preserving product rule `∂(fg) = (∂f)g + f(∂g)`, which is valid for
//! real variables. Conversion to HR form happens afterwards through
//! [`left_from_real`](crate::left_from_real) or
//! [`right_from_real`](crate::right_from_real).

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::hr::gradient::{hr_from_real, HRGradient, RealGradient, Side};
use crate::quaternion::{sinc, AxisUnit, Quaternion};

/// Arithmetic shared by plain quaternions and jets, so a test function can be
/// written once and evaluated either way.
pub trait QuatScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: Quaternion) -> Self;
    fn value(&self) -> Quaternion;
    fn conj(&self) -> Self;
    fn involution(&self, nu: AxisUnit) -> Self;
    fn real_part(&self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn inverse(&self) -> Result<Self>;
    fn exp(&self) -> Self;
    fn ln(&self) -> Result<Self>;
    fn tanh(&self) -> Result<Self>;

    fn powi(&self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { *self };
        let mut acc = Self::constant(Quaternion::ONE);
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        Ok(acc)
    }
}

impl QuatScalar for Quaternion {
    fn constant(c: Quaternion) -> Self {
        c
    }
    fn value(&self) -> Quaternion {
        *self
    }
    fn conj(&self) -> Self {
        Quaternion::conj(*self)
    }
    fn involution(&self, nu: AxisUnit) -> Self {
        Quaternion::involution(*self, nu)
    }
    fn real_part(&self) -> Self {
        Quaternion::real_part(*self)
    }
    fn scale(&self, s: f64) -> Self {
        *self * s
    }
    fn inverse(&self) -> Result<Self> {
        Quaternion::inverse(*self)
    }
    fn exp(&self) -> Self {
        Quaternion::exp(*self)
    }
    fn ln(&self) -> Result<Self> {
        Quaternion::ln(*self)
    }
    fn tanh(&self) -> Result<Self> {
        Quaternion::tanh(*self)
    }
}

/// A function value together with its real gradient at a fixed base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QJet {
    pub value: Quaternion,
    pub grad: RealGradient,
}

impl QJet {
    /// The identity function at `q`: gradient `(1, i, j, k)`.
    pub fn seed(q: Quaternion) -> Self {
        QJet { value: q, grad: RealGradient::IDENTITY }
    }

    pub fn constant(c: Quaternion) -> Self {
        QJet { value: c, grad: RealGradient::ZERO }
    }

    pub fn hr_gradient(&self, side: Side) -> HRGradient {
        hr_from_real(&self.grad, side)
    }

    fn map_linear(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        QJet { value: f(self.value), grad: self.grad.map(f) }
    }

    /// Applies a map whose derivative at `self.value` is `dmap`.
    fn chain(&self, value: Quaternion, dmap: impl Fn(Quaternion) -> Quaternion) -> Self {
        QJet { value, grad: self.grad.map(dmap) }
    }
}

impl Add for QJet {
    type Output = QJet;
    fn add(self, o: QJet) -> QJet {
        QJet { value: self.value + o.value, grad: self.grad.zip_with(&o.grad, |x, y| x + y) }
    }
}

impl Sub for QJet {
    type Output = QJet;
    fn sub(self, o: QJet) -> QJet {
        QJet { value: self.value - o.value, grad: self.grad.zip_with(&o.grad, |x, y| x - y) }
    }
}

impl Neg for QJet {
    type Output = QJet;
    fn neg(self) -> QJet {
        self.map_linear(|q| -q)
    }
}

impl Mul for QJet {
    type Output = QJet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, o: QJet) -> QJet {
        let (f, g) = (self.value, o.value);
        QJet {
            value: f * g,
            grad: self.grad.zip_with(&o.grad, |df, dg| df * g + f * dg),
        }
    }
}

/// `(v cos v − sin v)/v³`, the derivative of `sinc` divided by `v`.
fn sinc_slope(v: f64) -> f64 {
    if v < 0.25 {
        // Σ_{k≥1} (−1)^k 2k v^{2k−2} / (2k+1)!
        let v2 = v * v;
        let mut term_pow = 1.0;
        let mut factorial = 6.0; // (2k+1)! at k = 1
        let mut sum = 0.0;
        for k in 1..=8 {
            let kf = k as f64;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sum += sign * 2.0 * kf * term_pow / factorial;
            term_pow *= v2;
            factorial *= (2.0 * kf + 2.0) * (2.0 * kf + 3.0);
        }
        sum
    } else {
        (v * v.cos() - v.sin()) / (v * v * v)
    }
}

/// `(a/r² − θ/v)/v²` for the logarithm's angular term, with `θ = atan2(v, a)`.
fn ln_angle_slope(a: f64, v: f64) -> f64 {
    let r2 = a * a + v * v;
    if a > 0.0 && v < 0.1 * a {
        // (1/a³) Σ_{k≥1} (−1)^k t^{2k−2} 2k/(2k+1), t = v/a
        let t2 = (v / a).powi(2);
        let mut pow = 1.0;
        let mut sum = 0.0;
        for k in 1..=10 {
            let kf = k as f64;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sum += sign * pow * 2.0 * kf / (2.0 * kf + 1.0);
            pow *= t2;
        }
        sum / (a * a * a)
    } else {
        (a / r2 - v.atan2(a) / v) / (v * v)
    }
}

/// Directional derivative of `exp` at `p` along `dp`.
pub fn exp_derivative_along(p: Quaternion, dp: Quaternion) -> Quaternion {
    let u = p.imag_part();
    let v = u.norm();
    let ea = p.a.exp();
    let s = sinc(v);
    let du = dp.imag_part();
    let dot = u.dot(du);
    let base = u * s + v.cos();
    (base * dp.a + du * s + u * (sinc_slope(v) * dot) - s * dot) * ea
}

/// Directional derivative of the principal `ln` at `p` along `dp`.
fn ln_derivative_along(p: Quaternion, dp: Quaternion) -> Quaternion {
    let a = p.a;
    let u = p.imag_part();
    let v = u.norm();
    let r2 = p.norm_sqr();
    let du = dp.imag_part();
    let dot = u.dot(du);
    let angle_over_v = if v > 0.0 { v.atan2(a) / v } else { 1.0 / a };
    let radial = (a * dp.a + dot) / r2;
    du * angle_over_v + u * (ln_angle_slope(a, v) * dot - dp.a / r2) + radial
}

impl QuatScalar for QJet {
    fn constant(c: Quaternion) -> Self {
        QJet::constant(c)
    }
    fn value(&self) -> Quaternion {
        self.value
    }
    /// `∂f*/∂q_φ = (∂f/∂q_φ)*`.
    fn conj(&self) -> Self {
        self.map_linear(Quaternion::conj)
    }
    fn involution(&self, nu: AxisUnit) -> Self {
        self.map_linear(|q| q.involution(nu))
    }
    fn real_part(&self) -> Self {
        self.map_linear(Quaternion::real_part)
    }
    fn scale(&self, s: f64) -> Self {
        self.map_linear(|q| q * s)
    }
    /// `∂f⁻¹/∂q_φ = −f⁻¹ (∂f/∂q_φ) f⁻¹`.
    fn inverse(&self) -> Result<Self> {
        let inv = self.value.inverse()?;
        Ok(self.chain(inv, |d| -(inv * d * inv)))
    }
    fn exp(&self) -> Self {
        let p = self.value;
        self.chain(p.exp(), |d| exp_derivative_along(p, d))
    }
    fn ln(&self) -> Result<Self> {
        let p = self.value;
        let value = p.ln()?;
        Ok(self.chain(value, |d| ln_derivative_along(p, d)))
    }
    fn tanh(&self) -> Result<Self> {
        let value = self.value.tanh()?;
        let one = QJet::constant(Quaternion::ONE);
        // all factors here are functions of f alone and therefore commute
        let t = if self.value.a >= 0.0 {
            let e = self.scale(-2.0).exp();
            (one - e) * (one + e).inverse()?
        } else {
            let e = self.scale(2.0).exp();
            (e - one) * (e + one).inverse()?
        };
        if !t.grad.is_finite() {
            return Err(Error::Pole(format!("tanh derivative is not finite at {}", self.value)));
        }
        Ok(QJet { value, grad: t.grad })
    }
}

/// Real gradient of `f` at `q`, by running `f` on the seed jet.
pub fn jet_gradient<F>(f: F, q: Quaternion) -> Result<RealGradient>
where
    F: FnOnce(QJet) -> Result<QJet>,
{
    Ok(f(QJet::seed(q))?.grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hr::gradient::left_from_real;

    const Q: Quaternion = Quaternion::new(1.0, 2.0, 3.0, 4.0);

    fn central_fd(f: impl Fn(Quaternion) -> Quaternion, q: Quaternion) -> RealGradient {
        let h = 1e-5;
        RealGradient {
            partials: RealGradient::IDENTITY
                .partials
                .map(|u| (f(q + u * h) - f(q - u * h)) / (2.0 * h)),
        }
    }

    #[test]
    fn seed_and_constant() {
        let c = Quaternion::new(0.5, 1.0, -1.0, 2.0);
        assert_eq!(QJet::seed(Q).value, Q);
        assert_eq!(QJet::constant(c).grad, RealGradient::ZERO);
        let h = QJet::seed(Q).hr_gradient(Side::Left);
        assert_eq!(h.partials, [Quaternion::ONE, Quaternion::ZERO, Quaternion::ZERO, Quaternion::ZERO]);
    }

    #[test]
    fn square_has_closed_form_values() {
        let s = QJet::seed(Q);
        let h = left_from_real(&(s * s).grad);
        assert_eq!(h.d1(), Q + Q.a);
        assert_eq!(h.di(), Quaternion::I * Q.b);
        assert_eq!(h.dj(), Quaternion::J * Q.c);
        assert_eq!(h.dk(), Quaternion::K * Q.d);
    }

    #[test]
    fn constant_times_seed() {
        let c = Quaternion::new(0.5, 1.0, -1.0, 2.0);
        let j = QJet::constant(c) * QJet::seed(Q);
        assert!(j.hr_gradient(Side::Left).d1().max_abs_diff(c) < 1e-15);
        assert!(j.hr_gradient(Side::Right).d1().max_abs_diff(c.real_part()) < 1e-15);
    }

    #[test]
    fn inverse_of_zero() {
        assert!(matches!(QJet::constant(Quaternion::ZERO).inverse(), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn transcendental_jets_match_differences() {
        let points = [
            Quaternion::new(0.3, -0.4, 0.2, 0.5),
            Quaternion::new(-0.7, 0.05, 0.1, -0.02),
            Quaternion::new(1.5, 1e-3, 0.0, 0.0),
            Quaternion::new(0.2, 0.0, 0.0, 0.0),
            Quaternion::new(0.4, 1.0, -0.8, 0.6),
        ];
        for q in points {
            let exp = QJet::seed(q).exp().grad;
            assert!(exp.max_abs_diff(&central_fd(|x| x.exp(), q)) < 1e-8, "exp at {q}");
            let tanh = QJet::seed(q).tanh().unwrap().grad;
            assert!(tanh.max_abs_diff(&central_fd(|x| x.tanh().unwrap(), q)) < 1e-8, "tanh at {q}");
        }
        for q in [Quaternion::new(0.8, 0.3, -0.2, 0.1), Quaternion::new(2.0, 1e-4, 0.0, 0.0), Quaternion::new(-1.0, 0.5, 0.5, 0.0), Quaternion::real(3.0)] {
            let ln = QJet::seed(q).ln().unwrap().grad;
            assert!(ln.max_abs_diff(&central_fd(|x| x.ln().unwrap(), q)) < 1e-8, "ln at {q}");
        }
    }

    #[test]
    fn ln_jet_inverts_exp_jet() {
        let q = Quaternion::new(0.4, 0.9, -0.3, 0.2);
        let round = QJet::seed(q).exp().ln().unwrap();
        assert!(round.grad.max_abs_diff(&RealGradient::IDENTITY) < 1e-13);
    }

    #[test]
    fn series_branches_agree_with_direct_forms() {
        for v in [0.2, 0.249, 0.251, 0.3] {
            let direct = (v * f64::cos(v) - f64::sin(v)) / (v * v * v);
            assert!((sinc_slope(v) - direct).abs() < 1e-12);
        }
        let a = 2.0;
        for v in [0.15, 0.199, 0.201] {
            let r2 = a * a + v * v;
            let direct = (a / r2 - f64::atan2(v, a) / v) / (v * v);
            assert!((ln_angle_slope(a, v) - direct).abs() < 1e-10);
        }
    }
}
