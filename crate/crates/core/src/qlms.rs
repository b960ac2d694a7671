//! Quaternion LMS adaptive filter and a synthetic system-identification
//! harness.
//!
//! With `y = wᵀx` and `e = d − wᵀx`, the real cost `J = e e*` has HR
//! gradient `∇_w J = −½ x e*`. The weight update
//! `w ← w + μ e x*` steps along `−(∇_w J)*` with the factor ½ folded into
//! `μ`, i.e. it equals [`FilterState::gradient_step`] at rate `2μ`.

use std::io::{Read, Write};

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Weight norm beyond which a run is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    weights: Vec<Quaternion>,
    step_size: f64,
    iteration: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair {
    pub input: Vec<Quaternion>,
    pub desired: Quaternion,
}

impl FilterState {
    /// All-zero weights of the given length.
    pub fn new(length: usize, step_size: f64) -> Result<Self> {
        Self::with_weights(vec![Quaternion::ZERO; length], step_size)
    }

    /// `step_size` may be zero (a frozen filter) but not negative.
    pub fn with_weights(weights: Vec<Quaternion>, step_size: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidConfig("filter length must be at least 1".into()));
        }
        if !(step_size >= 0.0 && step_size.is_finite()) {
            return Err(Error::InvalidConfig(format!("step size {step_size} must be finite and >= 0")));
        }
        Ok(FilterState { weights, step_size, iteration: 0 })
    }

    pub fn weights(&self) -> &[Quaternion] {
        &self.weights
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn check_len(&self, x: &[Quaternion]) -> Result<()> {
        if x.len() != self.weights.len() {
            return Err(Error::LengthMismatch { expected: self.weights.len(), found: x.len() });
        }
        Ok(())
    }

    /// `y = wᵀx = Σ w_m x_m`, weights on the left.
    pub fn predict(&self, x: &[Quaternion]) -> Result<Quaternion> {
        self.check_len(x)?;
        Ok(self.weights.iter().zip(x).map(|(w, x)| *w * *x).sum())
    }

    /// `e = d − wᵀx`.
    pub fn error_signal(&self, sample: &SamplePair) -> Result<Quaternion> {
        Ok(sample.desired - self.predict(&sample.input)?)
    }

    /// `J = e e*` as a quaternion; its imaginary part vanishes up to rounding.
    pub fn cost(&self, sample: &SamplePair) -> Result<Quaternion> {
        let e = self.error_signal(sample)?;
        Ok(e * e.conj())
    }

    /// `∇_w J = −½ x e*`, one entry per tap.
    pub fn cost_gradient(&self, sample: &SamplePair) -> Result<Vec<Quaternion>> {
        let e_conj = self.error_signal(sample)?.conj();
        Ok(sample.input.iter().map(|x| *x * e_conj * -0.5).collect())
    }

    /// `w ← w − rate·(∇_w J)*`.
    pub fn gradient_step(&self, sample: &SamplePair, rate: f64) -> Result<FilterState> {
        let grad = self.cost_gradient(sample)?;
        let weights = self.weights.iter().zip(grad).map(|(w, g)| *w - g.conj() * rate).collect();
        Ok(FilterState { weights, step_size: self.step_size, iteration: self.iteration + 1 })
    }

    /// `w ← w + μ e x*`.
    pub fn update_step(&self, sample: &SamplePair) -> Result<FilterState> {
        let e = self.error_signal(sample)?;
        let weights = self
            .weights
            .iter()
            .zip(&sample.input)
            .map(|(w, x)| *w + e * x.conj() * self.step_size)
            .collect();
        Ok(FilterState { weights, step_size: self.step_size, iteration: self.iteration + 1 })
    }

    /// `Σ_m |w_m − target_m|²`.
    pub fn weight_error_norm(&self, target: &[Quaternion]) -> f64 {
        self.weights.iter().zip(target).map(|(w, t)| (*w - *t).norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub filter_length: usize,
    pub true_weights: Vec<Quaternion>,
    pub noise_power: f64,
    pub step_size: f64,
    pub iterations: usize,
    pub rng_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filter_length < 1 {
            return Err(Error::InvalidConfig("filter length M must be >= 1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations N must be >= 1".into()));
        }
        if self.true_weights.len() != self.filter_length {
            return Err(Error::LengthMismatch { expected: self.filter_length, found: self.true_weights.len() });
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(Error::InvalidConfig(format!("noise power {} must be >= 0", self.noise_power)));
        }
        if !(self.step_size >= 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidConfig(format!("step size {} must be >= 0", self.step_size)));
        }
        Ok(())
    }

    /// Reproducible unknown system for a seed: per-axis variance ¼.
    pub fn random_true_weights(length: usize, seed: u64) -> Vec<Quaternion> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f7a);
        let normal = Normal::new(0.0, 0.5).expect("valid normal");
        (0..length).map(|_| gaussian_quaternion(&normal, &mut rng)).collect()
    }
}

fn gaussian_quaternion(dist: &Normal<f64>, rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::raw(dist.sample(rng), dist.sample(rng), dist.sample(rng), dist.sample(rng))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    /// `|e[n]|²` before each update.
    pub squared_errors: Vec<f64>,
    /// `Σ|w[n+1] − w_true|²` after each update.
    pub weight_error_norms: Vec<f64>,
    pub initial_weight_error_norm: f64,
    pub final_weights: Vec<Quaternion>,
    /// `1/(2 M P̂)` with `P̂` the measured mean input power per tap.
    pub stability_bound: f64,
    pub diverged: bool,
}

/// One parsed CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordRow {
    pub iteration: usize,
    pub squared_error: f64,
    pub weight_error_norm: f64,
}

impl ConvergenceRecord {
    pub fn len(&self) -> usize {
        self.squared_errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squared_errors.is_empty()
    }

    pub fn final_weight_error_norm(&self) -> f64 {
        self.weight_error_norms.last().copied().unwrap_or(self.initial_weight_error_norm)
    }

    pub fn rows(&self) -> impl Iterator<Item = RecordRow> + '_ {
        self.squared_errors
            .iter()
            .zip(&self.weight_error_norms)
            .enumerate()
            .map(|(k, (&squared_error, &weight_error_norm))| RecordRow {
                iteration: k + 1,
                squared_error,
                weight_error_norm,
            })
    }

    /// Writes `iteration,squared_error,weight_error_norm` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "squared_error", "weight_error_norm"])?;
        for row in self.rows() {
            w.write_record([
                row.iteration.to_string(),
                format!("{:.16e}", row.squared_error),
                format!("{:.16e}", row.weight_error_norm),
            ])?;
        }
        w.flush()
    }
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RecordRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let bad = |e: String| Error::InvalidConfig(format!("malformed convergence CSV: {e}"));
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?;
    if headers != vec!["iteration", "squared_error", "weight_error_norm"] {
        return Err(bad(format!("unexpected header {headers:?}")));
    }
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let field = |k: usize| rec.get(k).ok_or_else(|| bad(format!("missing column {k}")));
            Ok(RecordRow {
                iteration: field(0)?.parse().map_err(|e| bad(format!("{e}")))?,
                squared_error: field(1)?.parse().map_err(|e| bad(format!("{e}")))?,
                weight_error_norm: field(2)?.parse().map_err(|e| bad(format!("{e}")))?,
            })
        })
        .collect()
}

/// Identifies `w_true` from `d[n] = w_trueᵀ x[n] + noise` starting at `w = 0`.
///
/// The input is a white Gaussian quaternion sequence with unit total power
/// per sample (variance ¼ per axis) fed through a tapped delay line, so
/// `x[n] = [s[n−1], …, s[n−M]]`. Noise has variance `noise_power/4` per axis.
/// The run stops early and sets `diverged` once the weight norm exceeds
/// [`DIVERGENCE_NORM`].
pub fn run_system_identification(cfg: &ExperimentConfig) -> Result<ConvergenceRecord> {
    cfg.validate()?;
    let m = cfg.filter_length;
    let n = cfg.iterations;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let signal_dist = Normal::new(0.0, 0.5).expect("valid normal");
    let noise_dist = Normal::new(0.0, (cfg.noise_power / 4.0).sqrt()).expect("valid normal");

    let signal: Vec<Quaternion> = (0..n + m).map(|_| gaussian_quaternion(&signal_dist, &mut rng)).collect();
    let noise: Vec<Quaternion> = (0..n).map(|_| gaussian_quaternion(&noise_dist, &mut rng)).collect();

    let power = signal.iter().map(|s| s.norm_sqr()).sum::<f64>() / signal.len() as f64;
    let stability_bound = 1.0 / (2.0 * m as f64 * power);
    if cfg.step_size > stability_bound {
        warn!(
            "step size {} exceeds the heuristic stability bound {:.4e}",
            cfg.step_size, stability_bound
        );
    }

    let truth = FilterState::with_weights(cfg.true_weights.clone(), 0.0)?;
    let mut state = FilterState::new(m, cfg.step_size)?;
    let initial = state.weight_error_norm(&cfg.true_weights);
    let mut squared_errors = Vec::with_capacity(n);
    let mut weight_error_norms = Vec::with_capacity(n);
    let mut diverged = false;

    for k in 0..n {
        // newest sample first: x[n] = [s[n-1], ..., s[n-M]]
        let input: Vec<Quaternion> = (0..m).map(|tap| signal[k + m - 1 - tap]).collect();
        let desired = truth.predict(&input)? + noise[k];
        let sample = SamplePair { input, desired };
        squared_errors.push(state.error_signal(&sample)?.norm_sqr());
        state = state.update_step(&sample)?;
        weight_error_norms.push(state.weight_error_norm(&cfg.true_weights));
        let norm = state.weights().iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > DIVERGENCE_NORM {
            diverged = true;
            break;
        }
    }

    Ok(ConvergenceRecord {
        squared_errors,
        weight_error_norms,
        initial_weight_error_norm: initial,
        final_weights: state.weights().to_vec(),
        stability_bound,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d)
    }

    #[test]
    fn predict_examples() {
        let s = FilterState::with_weights(vec![Quaternion::ONE], 0.1).unwrap();
        assert_eq!(s.predict(&[Quaternion::I]).unwrap(), Quaternion::I);
        let s = FilterState::with_weights(vec![Quaternion::I], 0.1).unwrap();
        assert_eq!(s.predict(&[Quaternion::J]).unwrap(), Quaternion::K);
        let s = FilterState::with_weights(vec![Quaternion::ONE, Quaternion::K], 0.1).unwrap();
        assert_eq!(s.predict(&[Quaternion::J, Quaternion::J]).unwrap(), Quaternion::J - Quaternion::I);
        assert!(matches!(s.predict(&[Quaternion::J]), Err(Error::LengthMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn error_examples() {
        let w = vec![q(0.5, 1.0, -1.0, 0.2), q(-0.3, 0.0, 2.0, 1.0)];
        let x = vec![q(1.0, 0.5, 0.0, -1.0), q(0.1, 0.2, 0.3, 0.4)];
        let s = FilterState::with_weights(w.clone(), 0.1).unwrap();
        let d = s.predict(&x).unwrap();
        assert_eq!(s.error_signal(&SamplePair { input: x.clone(), desired: d }).unwrap(), Quaternion::ZERO);

        let zero = FilterState::new(2, 0.1).unwrap();
        let d = q(1.0, -2.0, 3.0, 0.5);
        assert_eq!(zero.error_signal(&SamplePair { input: x.clone(), desired: d }).unwrap(), d);

        let e = s.error_signal(&SamplePair { input: x.clone(), desired: d }).unwrap();
        let from_conjugates: Quaternion = d.conj() - x.iter().zip(&w).map(|(x, w)| x.conj() * w.conj()).sum::<Quaternion>();
        assert!(e.conj().max_abs_diff(from_conjugates) < 1e-14);
    }

    #[test]
    fn gradient_examples() {
        let s = FilterState::new(1, 0.5).unwrap();
        let sample = SamplePair { input: vec![Quaternion::ONE], desired: Quaternion::ONE };
        assert_eq!(s.cost_gradient(&sample).unwrap(), vec![Quaternion::real(-0.5)]);

        let w = FilterState::with_weights(vec![Quaternion::I], 0.5).unwrap();
        let at_optimum = SamplePair { input: vec![Quaternion::J], desired: Quaternion::K };
        assert_eq!(w.cost_gradient(&at_optimum).unwrap(), vec![Quaternion::ZERO]);
    }

    #[test]
    fn update_examples() {
        let s = FilterState::new(1, 0.5).unwrap();
        let sample = SamplePair { input: vec![Quaternion::ONE], desired: Quaternion::ONE };
        let next = s.update_step(&sample).unwrap();
        assert_eq!(next.weights(), &[Quaternion::real(0.5)]);
        assert_eq!(next.iteration(), 1);

        // e = i, x = j: Δw = μ i (−j) = −μ k
        let mu = 0.25;
        let s = FilterState::new(1, mu).unwrap();
        let sample = SamplePair { input: vec![Quaternion::J], desired: Quaternion::I };
        let next = s.update_step(&sample).unwrap();
        assert_eq!(next.weights()[0], Quaternion::K * -mu);
        assert_ne!(next.weights()[0], Quaternion::J.conj() * Quaternion::I * mu);

        let w = FilterState::with_weights(vec![Quaternion::I], mu).unwrap();
        let exact = SamplePair { input: vec![Quaternion::J], desired: Quaternion::K };
        assert_eq!(w.update_step(&exact).unwrap().weights(), w.weights());
    }

    #[test]
    fn update_is_gradient_step_at_twice_the_rate() {
        let s = FilterState::with_weights(vec![q(0.1, 0.2, 0.3, 0.4), q(-1.0, 0.5, 0.0, 0.25)], 0.05).unwrap();
        let sample = SamplePair { input: vec![q(1.0, -1.0, 0.5, 0.2), q(0.3, 0.3, -0.7, 1.0)], desired: q(0.5, 0.0, 1.0, -2.0) };
        let a = s.update_step(&sample).unwrap();
        let b = s.gradient_step(&sample, 0.1).unwrap();
        for (x, y) in a.weights().iter().zip(b.weights()) {
            assert!(x.max_abs_diff(*y) < 1e-15);
        }
    }

    #[test]
    fn invalid_states() {
        assert!(FilterState::new(0, 0.1).is_err());
        assert!(FilterState::new(2, -0.1).is_err());
        let cfg = ExperimentConfig { filter_length: 2, true_weights: vec![Quaternion::ONE], noise_power: 0.0, step_size: 0.1, iterations: 10, rng_seed: 1 };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig { true_weights: vec![Quaternion::ONE; 2], iterations: 0, ..cfg };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn frozen_filter_never_moves() {
        let cfg = ExperimentConfig {
            filter_length: 3,
            true_weights: ExperimentConfig::random_true_weights(3, 9),
            noise_power: 0.01,
            step_size: 0.0,
            iterations: 50,
            rng_seed: 9,
        };
        let rec = run_system_identification(&cfg).unwrap();
        assert_eq!(rec.final_weights, vec![Quaternion::ZERO; 3]);
        assert!(rec.weight_error_norms.iter().all(|&e| e == rec.initial_weight_error_norm));
    }

    #[test]
    fn large_step_diverges() {
        let cfg = ExperimentConfig {
            filter_length: 4,
            true_weights: ExperimentConfig::random_true_weights(4, 3),
            noise_power: 0.0,
            step_size: 5.0,
            iterations: 2000,
            rng_seed: 3,
        };
        let rec = run_system_identification(&cfg).unwrap();
        assert!(rec.diverged);
        assert!(rec.len() < 2000);
        assert!(cfg.step_size > rec.stability_bound);
    }

    #[test]
    fn csv_round_trip() {
        let cfg = ExperimentConfig {
            filter_length: 2,
            true_weights: ExperimentConfig::random_true_weights(2, 4),
            noise_power: 0.1,
            step_size: 0.05,
            iterations: 25,
            rng_seed: 4,
        };
        let rec = run_system_identification(&cfg).unwrap();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("iteration,squared_error,weight_error_norm\n"));
        let rows = read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows, rec.rows().collect::<Vec<_>>());
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
