//! Finite-difference estimates of the real partials and HR gradients.
//!
//! These are independent of the jet and closed-form paths and serve as the
//! numerical ground truth in tests and in `validate`.

use crate::error::{Error, Result};
use crate::hr::{hr_from_real, HRGradient, RealGradient, Side};
use crate::quaternion::Quaternion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdScheme {
    Central,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    step: f64,
    scheme: FdScheme,
    richardson: bool,
}

impl FdConfig {
    /// The step must satisfy `0 < step < 0.1`.
    pub fn new(step: f64, scheme: FdScheme, richardson: bool) -> Result<Self> {
        if !(step > 0.0 && step < 0.1) {
            return Err(Error::InvalidConfig(format!("finite-difference step {step} outside (0, 0.1)")));
        }
        Ok(FdConfig { step, scheme, richardson })
    }

    /// Central differences with `h = 1e-5·max(1, |q|)`.
    pub fn default_for(q: Quaternion) -> Self {
        FdConfig { step: 1e-5 * q.norm().max(1.0), scheme: FdScheme::Central, richardson: false }
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn scheme(&self) -> FdScheme {
        self.scheme
    }

    pub fn richardson(&self) -> bool {
        self.richardson
    }
}

fn difference<F>(f: &F, q: Quaternion, fq: Option<Quaternion>, unit: Quaternion, h: f64, scheme: FdScheme) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Result<Quaternion>,
{
    match scheme {
        FdScheme::Central => Ok((f(q + unit * h)? - f(q - unit * h)?) / (2.0 * h)),
        FdScheme::Forward => {
            let base = match fq {
                Some(v) => v,
                None => f(q)?,
            };
            Ok((f(q + unit * h)? - base) / h)
        }
    }
}

/// Estimates `(∂f/∂q_a, ∂f/∂q_b, ∂f/∂q_c, ∂f/∂q_d)` at `q`.
///
/// With Richardson enabled the `h` and `h/2` estimates are combined as
/// `(4E_{h/2} − E_h)/3` (central) or `2E_{h/2} − E_h` (forward).
pub fn real_partials_fd<F>(f: F, q: Quaternion, cfg: &FdConfig) -> Result<RealGradient>
where
    F: Fn(Quaternion) -> Result<Quaternion>,
{
    let fq = match cfg.scheme {
        FdScheme::Forward => Some(f(q)?),
        FdScheme::Central => None,
    };
    let mut partials = [Quaternion::ZERO; 4];
    for (slot, unit) in partials.iter_mut().zip(RealGradient::IDENTITY.partials) {
        let coarse = difference(&f, q, fq, unit, cfg.step, cfg.scheme)?;
        *slot = if cfg.richardson {
            let fine = difference(&f, q, fq, unit, cfg.step / 2.0, cfg.scheme)?;
            match cfg.scheme {
                FdScheme::Central => (fine * 4.0 - coarse) / 3.0,
                FdScheme::Forward => fine * 2.0 - coarse,
            }
        } else {
            coarse
        };
    }
    Ok(RealGradient { partials })
}

/// Finite-difference HR gradient: [`real_partials_fd`] mapped through the Jacobian.
pub fn hr_gradient_fd<F>(f: F, q: Quaternion, cfg: &FdConfig, side: Side) -> Result<HRGradient>
where
    F: Fn(Quaternion) -> Result<Quaternion>,
{
    Ok(hr_from_real(&real_partials_fd(f, q, cfg)?, side))
}

/// `|x − y| / max(1, |y|)`.
pub fn relative_error(x: Quaternion, y: Quaternion) -> f64 {
    (x - y).norm() / y.norm().max(1.0)
}

/// Largest slot-wise [`relative_error`] between two quadruples.
pub fn relative_error4(x: &[Quaternion; 4], y: &[Quaternion; 4]) -> f64 {
    x.iter().zip(y).map(|(a, b)| relative_error(*a, *b)).fold(0.0, f64::max)
}

/// Errors below this are treated as rounding noise and excluded from the fit.
pub const ROUNDING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceEstimate {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(h)`; `None` when fewer
    /// than two errors lie above [`ROUNDING_FLOOR`].
    pub slope: Option<f64>,
}

/// Fits the observed order of accuracy of [`real_partials_fd`] against a
/// reference gradient (typically from jets) over a geometric step sequence.
pub fn convergence_order<F>(
    f: F,
    q: Quaternion,
    reference: &RealGradient,
    steps: &[f64],
    scheme: FdScheme,
) -> Result<ConvergenceEstimate>
where
    F: Fn(Quaternion) -> Result<Quaternion>,
{
    if steps.len() < 3 {
        return Err(Error::InvalidConfig("convergence fit needs at least 3 steps".into()));
    }
    let ratio = steps[1] / steps[0];
    let geometric = steps
        .windows(2)
        .all(|w| ((w[1] / w[0]) - ratio).abs() <= 1e-9 * ratio.abs());
    if !geometric || ratio == 1.0 {
        return Err(Error::InvalidConfig("steps must form a geometric sequence".into()));
    }
    let mut errors = Vec::with_capacity(steps.len());
    for &h in steps {
        let cfg = FdConfig::new(h, scheme, false)?;
        let est = real_partials_fd(&f, q, &cfg)?;
        errors.push(relative_error4(&est.partials, &reference.partials));
    }
    let points: Vec<(f64, f64)> = steps
        .iter()
        .zip(&errors)
        .filter(|(_, &e)| e > ROUNDING_FLOOR)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    let slope = (points.len() >= 2).then(|| least_squares_slope(&points));
    Ok(ConvergenceEstimate { steps: steps.to_vec(), errors, slope })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}
