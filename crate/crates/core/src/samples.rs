//! A catalog of test functions and seeded random points shared by the
//! validation suites and the test targets.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hr::QuatScalar;
use crate::quaternion::{AxisUnit, Quaternion};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleFn {
    Identity,
    Conj,
    Involution(AxisUnit),
    Square,
    Cube,
    Inverse,
    /// `q* q`, real-valued.
    NormSqr,
    Exp,
    Ln,
    Tanh,
    /// `c q`.
    LeftScale(Quaternion),
    /// `q c`.
    RightScale(Quaternion),
    /// `R(c q)`, real-valued.
    RealOfScaled(Quaternion),
    /// `(q − center)ⁿ`.
    Power { n: i32, center: Quaternion },
    /// `exp(q²)`.
    ExpOfSquare,
}

impl SampleFn {
    pub fn eval<T: QuatScalar>(&self, q: T) -> Result<T> {
        Ok(match *self {
            SampleFn::Identity => q,
            SampleFn::Conj => q.conj(),
            SampleFn::Involution(nu) => q.involution(nu),
            SampleFn::Square => q * q,
            SampleFn::Cube => q * q * q,
            SampleFn::Inverse => q.inverse()?,
            SampleFn::NormSqr => q.conj() * q,
            SampleFn::Exp => q.exp(),
            SampleFn::Ln => q.ln()?,
            SampleFn::Tanh => q.tanh()?,
            SampleFn::LeftScale(c) => T::constant(c) * q,
            SampleFn::RightScale(c) => q * T::constant(c),
            SampleFn::RealOfScaled(c) => (T::constant(c) * q).real_part(),
            SampleFn::Power { n, center } => (q - T::constant(center)).powi(n)?,
            SampleFn::ExpOfSquare => (q * q).exp(),
        })
    }

    pub fn is_real_valued(&self) -> bool {
        matches!(self, SampleFn::NormSqr | SampleFn::RealOfScaled(_))
    }

    pub fn name(&self) -> String {
        match *self {
            SampleFn::Identity => "q".into(),
            SampleFn::Conj => "q*".into(),
            SampleFn::Involution(nu) => format!("q^{}", nu.suffix()),
            SampleFn::Square => "q^2".into(),
            SampleFn::Cube => "q^3".into(),
            SampleFn::Inverse => "q^-1".into(),
            SampleFn::NormSqr => "q*q".into(),
            SampleFn::Exp => "exp".into(),
            SampleFn::Ln => "ln".into(),
            SampleFn::Tanh => "tanh".into(),
            SampleFn::LeftScale(c) => format!("({c})q"),
            SampleFn::RightScale(c) => format!("q({c})"),
            SampleFn::RealOfScaled(c) => format!("R(({c})q)"),
            SampleFn::Power { n, center } => format!("(q-({center}))^{n}"),
            SampleFn::ExpOfSquare => "exp(q^2)".into(),
        }
    }

    /// The functions exercised by default.
    pub fn catalog() -> Vec<SampleFn> {
        let c = Quaternion::new(0.5, -1.0, 0.25, 2.0);
        vec![
            SampleFn::Identity,
            SampleFn::Conj,
            SampleFn::Involution(AxisUnit::I),
            SampleFn::Involution(AxisUnit::J),
            SampleFn::Involution(AxisUnit::K),
            SampleFn::Square,
            SampleFn::Cube,
            SampleFn::Inverse,
            SampleFn::NormSqr,
            SampleFn::Exp,
            SampleFn::Ln,
            SampleFn::Tanh,
            SampleFn::LeftScale(c),
            SampleFn::RightScale(c),
            SampleFn::RealOfScaled(c),
            SampleFn::Power { n: -2, center: Quaternion::new(0.0, 0.0, 0.0, 3.0) },
            SampleFn::ExpOfSquare,
        ]
    }
}

/// Components drawn uniformly from `[-scale, scale]`.
pub fn random_quaternion(rng: &mut ChaCha8Rng, scale: f64) -> Quaternion {
    let mut c = || rng.random_range(-scale..=scale);
    Quaternion::new(c(), c(), c(), c())
}

/// Uniform on the unit sphere of pure quaternions.
pub fn random_pure_unit(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let mut c = || rng.random_range(-1.0f64..=1.0);
        let (b, c_, d) = (c(), c(), c());
        let n = (b * b + c_ * c_ + d * d).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return Quaternion::new(0.0, b / n, c_ / n, d / n);
        }
    }
}

/// A point with `lo ≤ |q| ≤ hi` whose real part and imaginary norm both
/// exceed `margin`, which keeps it off the real axis and the imaginary
/// subspace.
pub fn random_safe_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64, margin: f64) -> Quaternion {
    loop {
        let q = random_quaternion(rng, hi);
        let r = q.norm();
        if r >= lo && r <= hi && q.a.abs() > margin && q.imag_norm() > margin {
            return q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn catalog_names_are_distinct() {
        let names: Vec<String> = SampleFn::catalog().iter().map(SampleFn::name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }

    #[test]
    fn real_valued_members_have_zero_imaginary_part() {
        let q = Quaternion::new(0.3, -1.2, 0.8, 0.1);
        for f in SampleFn::catalog().into_iter().filter(SampleFn::is_real_valued) {
            assert!(f.eval(q).unwrap().imag_norm() < 1e-15, "{}", f.name());
        }
    }

    #[test]
    fn random_points_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let u = random_pure_unit(&mut rng);
            assert!(u.a == 0.0 && (u.norm() - 1.0).abs() < 1e-14);
            let q = random_safe_point(&mut rng, 0.2, 1.0, 0.05);
            assert!((0.2..=1.0).contains(&q.norm()) && q.a.abs() > 0.05 && q.imag_norm() > 0.05);
        }
    }
}
