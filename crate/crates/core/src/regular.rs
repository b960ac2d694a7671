//! Closed-form restricted HR derivatives of powers and power-series
//! functions, and their consistency with real derivatives on the real axis.
//!
//! Every closed form in this module shares the real scalar
//! `(q̃ⁿ − q̃*ⁿ)(q̃ − q̃*)⁻¹`, which [`symmetric_ratio`] evaluates without
//! dividing so the real axis is covered by continuity.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hr::Side;
use crate::quaternion::{sinc, Quaternion, TANH_POLE_TOLERANCE};

/// Largest `|n|` accepted by [`power_derivative_oracle`].
pub const ORACLE_MAX_POWER: i32 = 16;

/// `(q̃ⁿ − q̃*ⁿ)(q̃ − q̃*)⁻¹ = |q̃|ⁿ⁻¹ sin(nθ)/sin θ`, always real.
///
/// Evaluated as `|q̃|ⁿ⁻¹ U_{n−1}(cos θ)` through the scaled second-kind
/// Chebyshev recurrence `S_k = 2 q̃_a S_{k−1} − |q̃|² S_{k−2}`, where
/// `S_k = |q̃|ᵏ U_k(cos θ)`. The recurrence is polynomial in `q̃_a` and `|q̃|²`,
/// so `v = 0` (either `θ = 0` or `θ = π`) needs no special case and yields
/// `n q̃_aⁿ⁻¹`. Negative powers use `U_{−m−2} = −U_m`.
pub fn symmetric_ratio(q_tilde: Quaternion, n: i32) -> Result<f64> {
    let a = q_tilde.a;
    let r2 = q_tilde.norm_sqr();
    let scaled_u = |k: u32| -> f64 {
        let (mut prev, mut cur) = (0.0, 1.0); // S_{-1}, S_0
        for _ in 0..k {
            let next = 2.0 * a * cur - r2 * prev;
            prev = cur;
            cur = next;
        }
        cur
    };
    match n {
        0 => Ok(0.0),
        n if n > 0 => Ok(scaled_u((n - 1) as u32)),
        n => {
            if r2 == 0.0 {
                return Err(Error::DivisionByZero(format!("symmetric ratio of 0 with n = {n}")));
            }
            let m = n.unsigned_abs();
            Ok(-scaled_u(m - 1) / r2.powi(m as i32))
        }
    }
}

/// HR derivative of `(q − q₀)ⁿ`: `½(n q̃ⁿ⁻¹ + (q̃ⁿ − q̃*ⁿ)(q̃ − q̃*)⁻¹)`.
///
/// The left and right operators give the same value, so `side` only
/// documents intent.
pub fn power_derivative(q: Quaternion, center: Quaternion, n: i32, _side: Side) -> Result<Quaternion> {
    if n == 0 {
        return Ok(Quaternion::ZERO);
    }
    let q_tilde = q - center;
    if n < 0 && q_tilde.norm_sqr() == 0.0 {
        return Err(Error::DivisionByZero(format!("(q - q0)^{n} at q = q0")));
    }
    let leading = q_tilde.powi(n - 1)? * f64::from(n);
    Ok((leading + symmetric_ratio(q_tilde, n)?) * 0.5)
}

/// Brute-force HR derivative of `(q − q₀)ⁿ` for `|n| ≤ 16`.
///
/// Positive powers sum `Σ_{m=0}^{n−1} q̃ᵐ R(q̃ⁿ⁻¹⁻ᵐ)`; negative powers run the
/// recurrence `∂q̃⁻ᵖ = q̃⁻¹[∂q̃⁻⁽ᵖ⁻¹⁾ − R(q̃⁻ᵖ)]` starting from
/// `∂q̃⁻¹ = −q̃⁻¹R(q̃⁻¹)`. The right operator multiplies by `q̃` and `q̃⁻¹` on
/// the other side.
pub fn power_derivative_oracle(q: Quaternion, center: Quaternion, n: i32, side: Side) -> Result<Quaternion> {
    if n.abs() > ORACLE_MAX_POWER {
        return Err(Error::InvalidConfig(format!(
            "oracle power {n} exceeds |n| <= {ORACLE_MAX_POWER}"
        )));
    }
    let q_tilde = q - center;
    let apply = |x: Quaternion, by: Quaternion| match side {
        Side::Left => by * x,
        Side::Right => x * by,
    };
    if n >= 0 {
        match side {
            Side::Left => (0..n)
                .map(|m| Ok(q_tilde.powi(m)? * q_tilde.powi(n - 1 - m)?.a))
                .sum(),
            Side::Right => {
                let mut d = Quaternion::ZERO;
                for m in 1..=n {
                    d = apply(d, q_tilde) + q_tilde.powi(m - 1)?.a;
                }
                Ok(d)
            }
        }
    } else {
        let inv = q_tilde.inverse()?;
        let mut d = Quaternion::ZERO;
        for p in 1..=n.unsigned_abs() as i32 {
            d = apply(d - inv.powi(p)?.a, inv);
        }
        Ok(d)
    }
}

/// The HR derivative of `e^q`: `½(e^q + e^{q_a} sin v / v)`.
pub fn exp_derivative(q: Quaternion) -> Quaternion {
    (q.exp() + q.a.exp() * sinc(q.imag_norm())) * 0.5
}

/// The HR derivative of `ln q`: `½(q⁻¹ + arccos(q_a/|q|)/v)`.
///
/// On the positive real axis the limit `q_a⁻¹` is used.
pub fn ln_derivative(q: Quaternion) -> Result<Quaternion> {
    let v = q.imag_norm();
    if v == 0.0 {
        if q.a > 0.0 {
            return Ok(Quaternion::real(1.0 / q.a));
        }
        return Err(Error::Domain(format!("ln is not differentiable at the non-positive real {q}")));
    }
    let angle = v.atan2(q.a) / v;
    Ok((q.inverse()? + angle) * 0.5)
}

fn check_tanh_pole(q: Quaternion) -> Result<()> {
    let (a, v) = (q.a, q.imag_norm());
    if a.abs() < 20.0 && a.sinh().powi(2) + v.cos().powi(2) < TANH_POLE_TOLERANCE {
        return Err(Error::Pole(format!("tanh has a pole near {q}")));
    }
    Ok(())
}

/// `sech q = 1/cosh q`, evaluated through `e^{−|q|}` so large `|q_a|` stays finite.
fn sech(q: Quaternion) -> Result<Quaternion> {
    let p = if q.a >= 0.0 { q } else { -q };
    let e = (-p).exp();
    Ok(e * (e * e + 1.0).inverse()? * 2.0)
}

/// The HR derivative of `tanh q`:
/// `½(sech² q + (sin 2v / v)/(cosh 2q_a + cos 2v))`.
pub fn tanh_derivative(q: Quaternion) -> Result<Quaternion> {
    check_tanh_pole(q)?;
    let (a, v) = (q.a, q.imag_norm());
    let s = sech(q)?;
    let ratio = 2.0 * sinc(2.0 * v) / ((2.0 * a).cosh() + (2.0 * v).cos());
    Ok((s * s + ratio) * 0.5)
}

/// `f(q) = Σ a_n (q − q₀)ⁿ` over a finite index window.
///
/// With [`Side::Left`] the coefficients multiply the powers from the left
/// (`a_n q̃ⁿ`), with [`Side::Right`] from the right (`q̃ⁿ a_n`). The
/// representation is only used on the annulus `R₁ ≤ |q̃| ≤ R₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeriesFn {
    center: Quaternion,
    coeffs: BTreeMap<i32, Quaternion>,
    side: Side,
    annulus: (f64, f64),
}

impl PowerSeriesFn {
    /// `inner = 0` is allowed only for series without negative powers.
    pub fn new(
        center: Quaternion,
        coeffs: BTreeMap<i32, Quaternion>,
        side: Side,
        annulus: (f64, f64),
    ) -> Result<Self> {
        let (inner, outer) = annulus;
        if !(inner >= 0.0 && outer > 0.0 && inner <= outer) {
            return Err(Error::InvalidConfig(format!("invalid annulus [{inner}, {outer}]")));
        }
        let has_negative = coeffs.keys().next().is_some_and(|&n| n < 0);
        if inner == 0.0 && has_negative {
            return Err(Error::InvalidConfig(
                "series with negative powers needs a positive inner radius".into(),
            ));
        }
        Ok(PowerSeriesFn { center, coeffs, side, annulus })
    }

    /// `Σ_{n=0}^{terms−1} qⁿ/n!`.
    pub fn exp_series(terms: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        let mut fact = 1.0;
        for n in 0..terms as i32 {
            if n > 0 {
                fact *= f64::from(n);
            }
            coeffs.insert(n, Quaternion::real(1.0 / fact));
        }
        Self::new(Quaternion::ZERO, coeffs, Side::Left, (0.0, f64::MAX)).expect("valid exp series")
    }

    /// `Σ_{n=1}^{terms} (−1)ⁿ⁻¹ (q − 1)ⁿ / n`, valid for `|q − 1| < 1`.
    pub fn ln_series(terms: u32) -> Self {
        let coeffs = (1..=terms as i32)
            .map(|n| {
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                (n, Quaternion::real(sign / f64::from(n)))
            })
            .collect();
        Self::new(Quaternion::ONE, coeffs, Side::Left, (0.0, 1.0)).expect("valid ln series")
    }

    /// Taylor series of `tanh` through degree `max_degree`, valid for `|q| < π/2`.
    ///
    /// Coefficients come from `tanh' = 1 − tanh²`:
    /// `(k+1) c_{k+1} = [k = 0] − Σ_{i+j=k} c_i c_j`.
    pub fn tanh_series(max_degree: u32) -> Self {
        let deg = max_degree as usize;
        let mut c = vec![0.0; deg + 1];
        for k in 0..deg {
            let conv: f64 = (0..=k).map(|i| c[i] * c[k - i]).sum();
            let delta = if k == 0 { 1.0 } else { 0.0 };
            c[k + 1] = (delta - conv) / (k as f64 + 1.0);
        }
        let coeffs = c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(n, &x)| (n as i32, Quaternion::real(x)))
            .collect();
        Self::new(Quaternion::ZERO, coeffs, Side::Left, (0.0, std::f64::consts::FRAC_PI_2))
            .expect("valid tanh series")
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn center(&self) -> Quaternion {
        self.center
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn annulus(&self) -> (f64, f64) {
        self.annulus
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, Quaternion> {
        &self.coeffs
    }

    /// True when every coefficient is real; the left and right classes
    /// then coincide.
    pub fn has_real_coeffs(&self) -> bool {
        self.coeffs.values().all(|c| c.imag_norm() == 0.0)
    }

    fn offset(&self, q: Quaternion) -> Result<Quaternion> {
        let q_tilde = q - self.center;
        let radius = q_tilde.norm();
        let (inner, outer) = self.annulus;
        if radius < inner || radius > outer {
            return Err(Error::OutsideAnnulus { radius, inner, outer });
        }
        Ok(q_tilde)
    }

    fn place(&self, coeff: Quaternion, power: Quaternion) -> Quaternion {
        match self.side {
            Side::Left => coeff * power,
            Side::Right => power * coeff,
        }
    }

    fn sum_powers(&self, x: Quaternion) -> Result<Quaternion> {
        self.coeffs
            .iter()
            .map(|(&n, &a)| Ok(self.place(a, x.powi(n)?)))
            .sum()
    }

    /// `g(q̃)`.
    pub fn evaluate(&self, q: Quaternion) -> Result<Quaternion> {
        let q_tilde = self.offset(q)?;
        self.sum_powers(q_tilde)
    }

    /// `f′(q) = Σ n a_n q̃ⁿ⁻¹` (powers left of `a_n` on the right side).
    pub fn usual_derivative(&self, q: Quaternion) -> Result<Quaternion> {
        let q_tilde = self.offset(q)?;
        self.coeffs
            .iter()
            .filter(|(&n, _)| n != 0)
            .map(|(&n, &a)| Ok(self.place(a, q_tilde.powi(n - 1)?) * f64::from(n)))
            .sum()
    }

    /// `(g(q̃) − g(q̃*))` divided by `(q̃ − q̃*)`, evaluated termwise with
    /// [`symmetric_ratio`]. The ratios are real, so the placement of the
    /// divisor (right for the left class, left for the right class) does not
    /// change the sum.
    pub fn ratio_term(&self, q: Quaternion) -> Result<Quaternion> {
        let q_tilde = self.offset(q)?;
        self.coeffs
            .iter()
            .map(|(&n, &a)| Ok(a * symmetric_ratio(q_tilde, n)?))
            .sum()
    }

    /// Same quantity as [`Self::ratio_term`] by literal division; undefined on the real axis.
    pub fn ratio_term_literal(&self, q: Quaternion) -> Result<Quaternion> {
        let q_tilde = self.offset(q)?;
        let divisor = (q_tilde - q_tilde.conj()).inverse()?;
        let diff = self.sum_powers(q_tilde)? - self.sum_powers(q_tilde.conj())?;
        Ok(match self.side {
            Side::Left => diff * divisor,
            Side::Right => divisor * diff,
        })
    }

    /// HR derivative `½[f′(q) + (g(q̃) − g(q̃*))(q̃ − q̃*)⁻¹]` for the series' side.
    pub fn series_derivative(&self, q: Quaternion) -> Result<Quaternion> {
        Ok((self.usual_derivative(q)? + self.ratio_term(q)?) * 0.5)
    }

    /// Drops trailing terms once `|a_n|(|q̃|ⁿ + n|q̃|ⁿ⁻¹)` falls below `1e−16`
    /// of the accumulated value and slope, keeping at most 200 terms.
    pub fn truncated_for(&self, q: Quaternion) -> Result<Self> {
        let q_tilde = self.offset(q)?;
        let r = q_tilde.norm();
        let mut kept = BTreeMap::new();
        let (mut value, mut slope) = (Quaternion::ZERO, Quaternion::ZERO);
        for (&n, &coeff) in self.coeffs.iter().take(200) {
            if coeff.norm() == 0.0 {
                continue;
            }
            let nf = f64::from(n);
            let term = coeff.norm() * (r.powi(n) + nf.abs() * r.powi(n - 1));
            if !kept.is_empty() && term < 1e-16 * (value.norm() + slope.norm()) {
                break;
            }
            value += self.place(coeff, q_tilde.powi(n)?);
            if n != 0 {
                slope += self.place(coeff, q_tilde.powi(n - 1)?) * nf;
            }
            kept.insert(n, coeff);
        }
        Ok(PowerSeriesFn { coeffs: kept, ..self.clone() })
    }
}

/// The elementary functions with closed-form HR derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementaryFn {
    Exp,
    Ln,
    Tanh,
    /// `(q − center)ⁿ`.
    Power { n: i32, center: Quaternion },
}

impl ElementaryFn {
    pub fn evaluate(&self, q: Quaternion) -> Result<Quaternion> {
        match *self {
            ElementaryFn::Exp => Ok(q.exp()),
            ElementaryFn::Ln => q.ln(),
            ElementaryFn::Tanh => q.tanh(),
            ElementaryFn::Power { n, center } => (q - center).powi(n),
        }
    }

    /// Closed-form `∂f/∂q` (equal to `∂ᴿf/∂q` for all of these).
    pub fn hr_derivative(&self, q: Quaternion) -> Result<Quaternion> {
        match *self {
            ElementaryFn::Exp => Ok(exp_derivative(q)),
            ElementaryFn::Ln => ln_derivative(q),
            ElementaryFn::Tanh => tanh_derivative(q),
            ElementaryFn::Power { n, center } => power_derivative(q, center, n, Side::Left),
        }
    }

    /// `f′(x)` for real `x`, using the real part of the center for powers.
    pub fn real_derivative(&self, x: f64) -> Result<f64> {
        match *self {
            ElementaryFn::Exp => Ok(x.exp()),
            ElementaryFn::Ln if x > 0.0 => Ok(1.0 / x),
            ElementaryFn::Ln => Err(Error::Domain(format!("ln'(x) needs x > 0, got {x}"))),
            ElementaryFn::Tanh => Ok(x.cosh().powi(-2)),
            ElementaryFn::Power { n, center } => {
                let t = x - center.a;
                if n < 0 && t == 0.0 {
                    return Err(Error::DivisionByZero(format!("power {n} at its center")));
                }
                Ok(f64::from(n) * t.powi(n - 1))
            }
        }
    }

    /// Power-series representation truncated for use at `q`, when one is known.
    pub fn series_at(&self, q: Quaternion) -> Result<PowerSeriesFn> {
        let full = match *self {
            ElementaryFn::Exp => PowerSeriesFn::exp_series(200),
            ElementaryFn::Ln => PowerSeriesFn::ln_series(200),
            ElementaryFn::Tanh => PowerSeriesFn::tanh_series(399),
            ElementaryFn::Power { n, center } => {
                let inner = if n < 0 { f64::MIN_POSITIVE } else { 0.0 };
                PowerSeriesFn::new(center, BTreeMap::from([(n, Quaternion::ONE)]), Side::Left, (inner, f64::MAX))?
            }
        };
        full.truncated_for(q)
    }
}

/// `|∂f/∂q (q_a + v·axis) − f′(q_a)|` for each `v`.
///
/// On the real axis the HR derivative reduces to the ordinary derivative;
/// the returned errors shrink as `v → 0`.
pub fn real_axis_limit_check(
    func: ElementaryFn,
    q_a: f64,
    v_sequence: &[f64],
    axis: Quaternion,
) -> Result<Vec<f64>> {
    if axis.a.abs() > 1e-12 || (axis.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!("axis {axis} is not a pure unit quaternion")));
    }
    let target = func.real_derivative(q_a)?;
    v_sequence
        .iter()
        .map(|&v| {
            let q = axis * v + q_a;
            Ok((func.hr_derivative(q)? - target).norm())
        })
        .collect()
}

/// True when every element is strictly below its predecessor.
pub fn is_strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}
