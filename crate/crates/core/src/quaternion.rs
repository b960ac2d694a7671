//! Quaternion arithmetic, involutions, polar decomposition and the
//! elementary transcendental functions.
//!
//! Components are always stored and serialized in the order `(a, b, c, d)`
//! for `q = a + b i + c j + d k`.

use std::f64::consts::PI;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};

/// Denominator threshold below which `tanh` reports a pole.
pub const TANH_POLE_TOLERANCE: f64 = 1e-12;

/// A real quaternion `a + b i + c j + d k` in double precision.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// The index `ν ∈ {1, i, j, k}` used for involutions and HR partials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisUnit {
    One,
    I,
    J,
    K,
}

impl AxisUnit {
    pub const ALL: [AxisUnit; 4] = [AxisUnit::One, AxisUnit::I, AxisUnit::J, AxisUnit::K];

    /// The unit quaternion carried by this tag.
    pub const fn unit(self) -> Quaternion {
        match self {
            AxisUnit::One => Quaternion::ONE,
            AxisUnit::I => Quaternion::I,
            AxisUnit::J => Quaternion::J,
            AxisUnit::K => Quaternion::K,
        }
    }

    pub const fn index(self) -> usize {
        match self {
            AxisUnit::One => 0,
            AxisUnit::I => 1,
            AxisUnit::J => 2,
            AxisUnit::K => 3,
        }
    }

    pub const fn suffix(self) -> &'static str {
        match self {
            AxisUnit::One => "",
            AxisUnit::I => "i",
            AxisUnit::J => "j",
            AxisUnit::K => "k",
        }
    }
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::raw(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::raw(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::raw(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::raw(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::raw(0.0, 0.0, 0.0, 1.0);

    /// Builds a quaternion from its components.
    ///
    /// Panics if any component is NaN or infinite; use [`Quaternion::try_new`]
    /// for untrusted input.
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        assert!(
            a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite(),
            "quaternion components must be finite"
        );
        Self::raw(a, b, c, d)
    }

    pub fn try_new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite() {
            Ok(Self::raw(a, b, c, d))
        } else {
            Err(Error::NonFinite(a, b, c, d))
        }
    }

    pub(crate) const fn raw(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    pub const fn real(a: f64) -> Self {
        Self::new(a, 0.0, 0.0, 0.0)
    }

    pub fn from_array(v: [f64; 4]) -> Result<Self> {
        Self::try_new(v[0], v[1], v[2], v[3])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `R(q)` as a quaternion.
    pub fn real_part(self) -> Self {
        Self::raw(self.a, 0.0, 0.0, 0.0)
    }

    /// `I(q)`, the pure imaginary part.
    pub fn imag_part(self) -> Self {
        Self::raw(0.0, self.b, self.c, self.d)
    }

    pub fn conj(self) -> Self {
        Self::raw(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_sqr(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `|I(q)|`.
    pub fn imag_norm(self) -> f64 {
        (self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    /// Euclidean inner product on R⁴.
    pub fn dot(self, other: Self) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c + self.d * other.d
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(Error::DivisionByZero("inverse of the zero quaternion".into()));
        }
        Ok(self.conj() / n)
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn powi(self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self };
        let mut acc = Quaternion::ONE;
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        Ok(acc)
    }

    /// The involution `q^ν = -ν q ν`; `q^1 = q`.
    pub fn involution(self, nu: AxisUnit) -> Self {
        let Quaternion { a, b, c, d } = self;
        match nu {
            AxisUnit::One => self,
            AxisUnit::I => Self::raw(a, b, -c, -d),
            AxisUnit::J => Self::raw(a, -b, c, -d),
            AxisUnit::K => Self::raw(a, -b, -c, d),
        }
    }

    /// `(q, q^i, q^j, q^k)`.
    pub fn involutions(self) -> [Self; 4] {
        AxisUnit::ALL.map(|nu| self.involution(nu))
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.a.abs().max(d.b.abs()).max(d.c.abs()).max(d.d.abs())
    }

    pub fn polar(self) -> PolarForm {
        let v = self.imag_norm();
        let axis = (v > 0.0).then(|| self.imag_part() / v);
        let argument = if v > 0.0 {
            v.atan2(self.a)
        } else if self.a < 0.0 {
            PI
        } else {
            0.0
        };
        PolarForm {
            real_part: self.a,
            imag_norm: v,
            imag_axis: axis,
            argument,
        }
    }

    /// `e^q = e^{q_a}(cos v + v̂ sin v)`.
    pub fn exp(self) -> Self {
        let v = self.imag_norm();
        let ea = self.a.exp();
        self.imag_part() * (ea * sinc(v)) + ea * v.cos()
    }

    /// Principal logarithm `ln|q| + v̂ arccos(q_a/|q|)`.
    ///
    /// The negative real axis (and zero) has no axis to carry the angle and
    /// is rejected.
    pub fn ln(self) -> Result<Self> {
        let v = self.imag_norm();
        if v == 0.0 {
            if self.a > 0.0 {
                return Ok(Self::raw(self.a.ln(), 0.0, 0.0, 0.0));
            }
            return Err(Error::Domain(format!(
                "ln is undefined at the non-positive real quaternion {self}"
            )));
        }
        let theta = v.atan2(self.a);
        Ok(self.imag_part() * (theta / v) + 0.5 * self.norm_sqr().ln())
    }

    /// `tanh q = ½(sinh 2q_a + v̂ sin 2v)/(sinh² q_a + cos² v)`.
    pub fn tanh(self) -> Result<Self> {
        let a = self.a;
        let v = self.imag_norm();
        if a.abs() < 20.0 {
            let den = a.sinh().powi(2) + v.cos().powi(2);
            if den < TANH_POLE_TOLERANCE {
                return Err(Error::Pole(format!("tanh has a pole near {self}")));
            }
        }
        // Numerator and denominator scaled by sech² q_a to stay finite for large |q_a|.
        let sech2 = a.cosh().powi(-2);
        let den = a.tanh().powi(2) + v.cos().powi(2) * sech2;
        let imag_scale = if v > 0.0 { (2.0 * v).sin() / v } else { 2.0 };
        let num = self.imag_part() * (imag_scale * sech2) + 2.0 * a.tanh();
        Ok(num * (0.5 / den))
    }
}

/// `sin v / v` with the removable singularity filled in.
pub fn sinc(v: f64) -> f64 {
    if v == 0.0 {
        1.0
    } else {
        v.sin() / v
    }
}

/// Recovers `(q_a, q_b, q_c, q_d)` from an involution quadruple.
///
/// Fails with [`Error::InconsistentQuadruple`] when the recovered components
/// carry an imaginary residue above `1e-10·max(1, |q|)`.
pub fn components_from_involutions(
    q: Quaternion,
    qi: Quaternion,
    qj: Quaternion,
    qk: Quaternion,
) -> Result<[f64; 4]> {
    let quarter = 0.25;
    let recovered = [
        (q + qi + qj + qk) * quarter,
        // 1/(4i) = -i/4, applied from the left
        -Quaternion::I * (q + qi - qj - qk) * quarter,
        -Quaternion::J * (q - qi + qj - qk) * quarter,
        -Quaternion::K * (q - qi - qj + qk) * quarter,
    ];
    let tolerance = 1e-10 * q.norm().max(1.0);
    let residue = recovered
        .iter()
        .map(|r| r.imag_norm())
        .fold(0.0_f64, f64::max);
    if residue > tolerance {
        return Err(Error::InconsistentQuadruple { residue, tolerance });
    }
    Ok(recovered.map(|r| r.a))
}

/// `q = q_a + v v̂` with argument `θ ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarForm {
    pub real_part: f64,
    pub imag_norm: f64,
    /// Absent when `imag_norm == 0`.
    pub imag_axis: Option<Quaternion>,
    pub argument: f64,
}

impl PolarForm {
    pub fn reconstruct(&self) -> Quaternion {
        let imag = self
            .imag_axis
            .map_or(Quaternion::ZERO, |axis| axis * self.imag_norm);
        imag + self.real_part
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Self) -> Self {
        Self::raw(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Add<f64> for Quaternion {
    type Output = Quaternion;
    fn add(self, s: f64) -> Self {
        Self::raw(self.a + s, self.b, self.c, self.d)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Self) -> Self {
        Self::raw(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Sub<f64> for Quaternion {
    type Output = Quaternion;
    fn sub(self, s: f64) -> Self {
        Self::raw(self.a - s, self.b, self.c, self.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Self {
        Self::raw(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (o.a, o.b, o.c, o.d);
        Self::raw(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Self {
        Self::raw(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Add<Quaternion> for f64 {
    type Output = Quaternion;
    fn add(self, q: Quaternion) -> Quaternion {
        q + self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Self {
        Self::raw(self.a / s, self.b / s, self.c / s, self.d / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign<f64> for Quaternion {
    fn mul_assign(&mut self, s: f64) {
        *self = *self * s;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Quaternion::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Quaternion> for Quaternion {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

impl From<f64> for Quaternion {
    fn from(a: f64) -> Self {
        Quaternion::real(a)
    }
}

fn write_component(f: &mut fmt::Formatter<'_>, x: f64, leading: bool) -> fmt::Result {
    // -0 prints as 0 so the sign grammar stays unambiguous
    let x = if x == 0.0 { 0.0 } else { x };
    let sign = if x < 0.0 { "-" } else if leading { "" } else { "+" };
    match f.precision() {
        Some(p) => write!(f, "{sign}{:.*}", p, x.abs()),
        None => write!(f, "{sign}{}", x.abs()),
    }
}

/// Formats as `a+bi+cj+dk` with every sign explicit, e.g. `1-2i+0j+4k`.
impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_component(f, self.a, true)?;
        for (x, unit) in [(self.b, "i"), (self.c, "j"), (self.d, "k")] {
            write_component(f, x, false)?;
            f.write_str(unit)?;
        }
        Ok(())
    }
}

static QUATERNION_RE: LazyLock<Regex> = LazyLock::new(|| {
    let num = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?";
    Regex::new(&format!(
        r"^([+-]?{num})([+-]{num})i([+-]{num})j([+-]{num})k$"
    ))
    .expect("quaternion grammar regex")
});

impl FromStr for Quaternion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || Error::Parse { input: s.to_string() };
        let caps = QUATERNION_RE.captures(s.trim()).ok_or_else(parse_err)?;
        let mut v = [0.0; 4];
        for (slot, m) in v.iter_mut().zip(caps.iter().skip(1)) {
            let text = m.ok_or_else(parse_err)?.as_str();
            *slot = text.parse::<f64>().map_err(|_| parse_err())?;
        }
        Quaternion::from_array(v).map_err(|_| parse_err())
    }
}
