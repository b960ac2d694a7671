//! Self-check suites run by `hrcalc validate`.
//!
//! Every suite draws its random points from a fixed seed and compares two
//! independent computations of the same quantity.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fd::{convergence_order, hr_gradient_fd, relative_error, relative_error4, FdConfig, FdScheme};
use crate::hr::{
    chain_matrix_from_components, chain_rule_first, chain_rule_second, chain_rule_third,
    component_chain_matrix, involution_chain_matrix, jet_gradient, left_from_real,
    product_rule_first, product_rule_first_right, real_from_hr, real_valued_reduce,
    right_from_real, HRGradient, JacobianJ, QJet, QuatScalar, Side,
};
use crate::quaternion::{components_from_involutions, AxisUnit, Quaternion};
use crate::regular::{
    ln_derivative, power_derivative, power_derivative_oracle, real_axis_limit_check,
    exp_derivative, is_strictly_decreasing, tanh_derivative, ElementaryFn, PowerSeriesFn,
};
use crate::samples::{random_pure_unit, random_quaternion, random_safe_point, SampleFn};

pub const DEFAULT_SEED: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Rules,
    Series,
    Consistency,
    Fd,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Algebra, Suite::Rules, Suite::Series, Suite::Consistency, Suite::Fd];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Rules => "rules",
            Suite::Series => "series",
            Suite::Consistency => "consistency",
            Suite::Fd => "fd",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse { input: s.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    /// Largest raw error seen across all checks.
    pub worst_error: f64,
    pub failures: Vec<String>,
    /// Extra lines, e.g. the convergence tables.
    pub table: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, passed: 0, failed: 0, worst_error: 0.0, failures: Vec::new(), table: Vec::new() }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    fn check(&mut self, label: impl FnOnce() -> String, err: f64, tol: f64) {
        if err.is_nan() || err > tol {
            self.failed += 1;
            self.failures.push(format!("{}: error {err:.3e} > {tol:.0e}", label()));
        } else {
            self.passed += 1;
        }
        if err.is_nan() || err > self.worst_error {
            self.worst_error = err;
        }
    }

    fn check_result(&mut self, label: impl FnOnce() -> String, res: Result<f64>, tol: f64) {
        match res {
            Ok(err) => self.check(label, err, tol),
            Err(e) => {
                self.failed += 1;
                self.failures.push(format!("{}: {e}", label()));
            }
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.table {
            writeln!(f, "  {line}")?;
        }
        for line in &self.failures {
            writeln!(f, "  FAILED {line}")?;
        }
        write!(
            f,
            "{:<12} {} passed, {} failed, worst error {:.3e}",
            self.suite.name(),
            self.passed,
            self.failed,
            self.worst_error
        )
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new(suite);
    match suite {
        Suite::Algebra => algebra(&mut report, &mut rng),
        Suite::Rules => rules(&mut report, &mut rng),
        Suite::Series => series(&mut report, &mut rng),
        Suite::Consistency => consistency(&mut report, &mut rng),
        Suite::Fd => fd(&mut report),
    }
    report
}

pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    Suite::ALL.iter().map(|&s| run_suite(s, seed)).collect()
}

fn rel(x: Quaternion, y: Quaternion) -> f64 {
    relative_error(x, y)
}

fn algebra(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    let (one, i, j, k) = (Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K);
    let table = [
        (i * i, -one),
        (j * j, -one),
        (k * k, -one),
        (i * j * k, -one),
        (i * j, k),
        (j * k, i),
        (k * i, j),
        (j * i, -k),
    ];
    for (n, (got, want)) in table.iter().enumerate() {
        r.check(|| format!("unit product #{n}"), got.max_abs_diff(*want), 0.0);
    }

    let (jj, jhj) = JacobianJ::new().exact_gram_products();
    let mut worst = 0i64;
    for row in 0..4 {
        for col in 0..4 {
            let expect = if row == col { 4 } else { 0 };
            worst = worst.max((jj[row][col][0] - expect).abs()).max((jhj[row][col][0] - expect).abs());
            for unit in 1..4 {
                worst = worst.max(jj[row][col][unit].abs()).max(jhj[row][col][unit].abs());
            }
        }
    }
    r.check(|| "Jacobian Gram products".into(), worst as f64, 0.0);

    for _ in 0..200 {
        let p = random_quaternion(rng, 2.0);
        let q = random_quaternion(rng, 2.0);
        let s = random_quaternion(rng, 2.0);
        let scale = p.norm() * q.norm() * s.norm();
        r.check(|| format!("associativity at {q}"), ((p * q) * s).max_abs_diff(p * (q * s)) / scale.max(1.0), 1e-15);
        r.check(|| format!("norm product at {q}"), ((p * q).norm() - p.norm() * q.norm()).abs() / scale.max(1.0), 1e-15);
        r.check(|| format!("conjugate reversal at {q}"), rel((p * q).conj(), q.conj() * p.conj()), 1e-15);
        r.check_result(|| format!("inverse at {q}"), q.inverse().map(|inv| rel(q * inv, one)), 1e-14);
        for nu in [AxisUnit::I, AxisUnit::J, AxisUnit::K] {
            let u = nu.unit();
            let twice = q.involution(nu).involution(nu);
            r.check(|| format!("involution {} twice at {q}", nu.suffix()), twice.max_abs_diff(q), 0.0);
            r.check(|| format!("involution {} as -uqu at {q}", nu.suffix()), rel(q.involution(nu), -(u * q * u)), 1e-15);
        }
        let [_, qi, qj, qk] = q.involutions();
        r.check_result(
            || format!("components from involutions at {q}"),
            components_from_involutions(q, qi, qj, qk).and_then(Quaternion::from_array).map(|c| rel(c, q)),
            1e-15,
        );
        r.check_result(|| format!("exp(ln q) at {q}"), q.ln().map(|l| rel(l.exp(), q)), 1e-13);
        let small = random_quaternion(rng, 1.5);
        r.check_result(|| format!("ln(exp q) at {small}"), small.exp().ln().map(|l| rel(l, small)), 1e-13);
        r.check_result(
            || format!("display round trip of {q}"),
            q.to_string().parse::<Quaternion>().map(|back| back.max_abs_diff(q)),
            0.0,
        );
    }
}

fn jet_hr(f: SampleFn, q: Quaternion, side: Side) -> Result<HRGradient> {
    jet_gradient(|x| f.eval(x), q).map(|g| match side {
        Side::Left => left_from_real(&g),
        Side::Right => right_from_real(&g),
    })
}

fn rules(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    let catalog = SampleFn::catalog();
    for _ in 0..40 {
        let q = random_safe_point(rng, 0.3, 1.2, 0.1);
        let cfg = FdConfig::default_for(q).with_richardson(true);
        for f in &catalog {
            for side in [Side::Left, Side::Right] {
                let fd = hr_gradient_fd(|x| f.eval(x), q, &cfg, side);
                let jet = jet_hr(*f, q, side);
                let res = fd.and_then(|fd| jet.map(|jet| relative_error4(&jet.partials, &fd.partials)));
                r.check_result(|| format!("jet vs fd for {} ({side}) at {q}", f.name()), res, 1e-7);
            }
            if let Ok(g) = jet_gradient(|x| f.eval(x), q) {
                let back = real_from_hr(&left_from_real(&g));
                r.check(|| format!("left round trip for {} at {q}", f.name()), relative_error4(&back.partials, &g.partials), 1e-14);
                let back = real_from_hr(&right_from_real(&g));
                r.check(|| format!("right round trip for {} at {q}", f.name()), relative_error4(&back.partials, &g.partials), 1e-14);
            }
        }

        // product rules with f = exp, g = q²
        let f_val = q.exp();
        let g_val = q * q;
        let f_grad = jet_gradient(|x| Ok(x.exp()), q).expect("exp is total");
        let g_grad = jet_gradient(|x| Ok(x * x), q).expect("square is total");
        let whole = jet_gradient(|x| Ok(x.exp() * (x * x)), q).expect("total");
        let res = product_rule_first(f_val, &f_grad, g_val, &left_from_real(&g_grad))
            .map(|h| relative_error4(&h.partials, &left_from_real(&whole).partials));
        r.check_result(|| format!("left product rule at {q}"), res, 1e-13);
        let res = product_rule_first_right(&right_from_real(&f_grad), g_val, f_val, &g_grad)
            .map(|h| relative_error4(&h.partials, &right_from_real(&whole).partials));
        r.check_result(|| format!("right product rule at {q}"), res, 1e-13);

        // chain rules with f = exp applied to g = q²
        let composite = jet_gradient(|x| Ok((x * x).exp()), q).expect("total");
        let outer = jet_gradient(|x| Ok(x.exp()), g_val).expect("total");
        for side in [Side::Left, Side::Right] {
            let m = involution_chain_matrix(&g_grad, side);
            let outer_hr = match side {
                Side::Left => left_from_real(&outer),
                Side::Right => right_from_real(&outer),
            };
            let want = match side {
                Side::Left => left_from_real(&composite),
                Side::Right => right_from_real(&composite),
            };
            let got = chain_rule_first(&outer_hr, &m);
            r.check(|| format!("first chain rule ({side}) at {q}"), relative_error4(&got.partials, &want.partials), 1e-12);
            let got = chain_rule_second(&outer, &component_chain_matrix(&g_grad), side);
            r.check(|| format!("second chain rule ({side}) at {q}"), relative_error4(&got.partials, &want.partials), 1e-12);
        }
        let m = involution_chain_matrix(&g_grad, Side::Left);
        let from_p = chain_matrix_from_components(&g_grad.component_matrix());
        r.check(|| format!("4JPJ^H = M at {q}"), from_p.max_abs_diff(&m) / q.norm().max(1.0), 1e-14);

        // third chain rule with the real-valued g = q*q
        let n = q.norm_sqr();
        let inner = left_from_real(&jet_gradient(|x| Ok(x.conj() * x), q).expect("total"));
        let want = left_from_real(&jet_gradient(|x| Ok((x.conj() * x).exp()), q).expect("total"));
        let res = chain_rule_third(Quaternion::real(n.exp()), &inner).map(|h| relative_error4(&h.partials, &want.partials));
        r.check_result(|| format!("third chain rule at {q}"), res, 1e-13);

        for f in catalog.iter().filter(|f| f.is_real_valued()) {
            let left = jet_hr(*f, q, Side::Left).and_then(|h| real_valued_reduce(&h));
            let right = jet_hr(*f, q, Side::Right).and_then(|h| real_valued_reduce(&h));
            let res = left.and_then(|l| right.map(|rt| rel(l, rt)));
            r.check_result(|| format!("real-valued left = right for {} at {q}", f.name()), res, 1e-13);
        }
    }
}

fn series(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    for _ in 0..100 {
        let q = random_safe_point(rng, 0.05, 1.0, 1e-3);
        for (func, closed) in [
            (ElementaryFn::Exp, exp_derivative(q)),
            (ElementaryFn::Tanh, tanh_derivative(q).expect("inside the disk")),
        ] {
            let res = func.series_at(q).and_then(|s| s.series_derivative(q)).map(|d| rel(d, closed));
            r.check_result(|| format!("{func:?} series vs closed form at {q}"), res, 1e-8);
        }
        let p = Quaternion::ONE + random_quaternion(rng, 0.25);
        let res = ElementaryFn::Ln
            .series_at(p)
            .and_then(|s| s.series_derivative(p))
            .and_then(|d| ln_derivative(p).map(|c| rel(d, c)));
        r.check_result(|| format!("Ln series vs closed form at {p}"), res, 1e-8);

        for series in [PowerSeriesFn::exp_series(200), PowerSeriesFn::tanh_series(399)] {
            let res = series.truncated_for(q).and_then(|s| {
                let left = s.clone().with_side(Side::Left).series_derivative(q)?;
                let right = s.with_side(Side::Right).series_derivative(q)?;
                Ok(rel(left, right))
            });
            r.check_result(|| format!("real-coefficient left = right at {q}"), res, 1e-12);
        }

        let n = rng.random_range(-8..=8);
        let center = random_quaternion(rng, 0.5);
        let x = random_safe_point(rng, 0.2, 2.0, 0.05) + center;
        for side in [Side::Left, Side::Right] {
            let res = power_derivative(x, center, n, side)
                .and_then(|d| power_derivative_oracle(x, center, n, side).map(|o| rel(d, o)));
            r.check_result(|| format!("power {n} vs oracle ({side}) at {x}"), res, 1e-11);
        }
    }
}

const V_SEQUENCE: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

fn consistency(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    let funcs = [
        (ElementaryFn::Exp, -1.0, 1.0),
        (ElementaryFn::Ln, 0.5, 2.0),
        (ElementaryFn::Tanh, -1.0, 1.0),
        (ElementaryFn::Power { n: 3, center: Quaternion::ZERO }, -1.0, 1.0),
    ];
    r.table.push(format!("{:<8} {:>8}  {}", "function", "q_a", V_SEQUENCE.map(|v| format!("{v:>9.0e}")).join(" ")));
    for (func, lo, hi) in funcs {
        let label = match func {
            ElementaryFn::Power { n, .. } => format!("q^{n}"),
            other => format!("{other:?}").to_lowercase(),
        };
        for _ in 0..10 {
            let q_a = rng.random_range(lo..hi);
            let axis = random_pure_unit(rng);
            match real_axis_limit_check(func, q_a, &V_SEQUENCE, axis) {
                Ok(errs) => {
                    let cells = errs.iter().map(|e| format!("{e:>9.2e}")).collect::<Vec<_>>().join(" ");
                    let mono = is_strictly_decreasing(&errs);
                    r.table.push(format!("{label:<8} {q_a:>8.4}  {cells}  {}", if mono { "decreasing" } else { "NOT decreasing" }));
                    let last = *errs.last().expect("non-empty");
                    r.check(|| format!("{label} at q_a = {q_a} along {axis} is not decreasing"), if mono { last } else { f64::INFINITY }, 1e-4);
                }
                Err(e) => {
                    r.failed += 1;
                    r.failures.push(format!("{label} at q_a = {q_a}: {e}"));
                }
            }
        }
    }
}

fn fd(r: &mut SuiteReport) {
    let q = Quaternion::new(0.4, 0.3, -0.6, 0.2);
    let steps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let cases = [SampleFn::Exp, SampleFn::Ln, SampleFn::Tanh, SampleFn::Cube, SampleFn::Inverse, SampleFn::NormSqr];
    for f in cases {
        let res = jet_gradient(|x: QJet| f.eval(x), q)
            .and_then(|reference| convergence_order(|x| f.eval(x), q, &reference, &steps, FdScheme::Central));
        match res {
            Ok(est) => match est.slope {
                Some(slope) => {
                    r.table.push(format!("{:<8} central slope {slope:.3}", f.name()));
                    r.check(|| format!("{} central slope {slope:.3}", f.name()), (slope - 2.0).abs(), 0.2);
                }
                None => {
                    // exact for every step, e.g. a quadratic under central differences
                    r.table.push(format!("{:<8} central differences exact to rounding", f.name()));
                    r.check(|| f.name(), est.errors.iter().cloned().fold(0.0, f64::max), crate::fd::ROUNDING_FLOOR);
                }
            },
            Err(e) => {
                r.failed += 1;
                r.failures.push(format!("{}: {e}", f.name()));
            }
        }
    }
    let res = jet_gradient(|x: QJet| Ok(x.exp()), q)
        .and_then(|reference| convergence_order(|x: Quaternion| Ok(x.exp()), q, &reference, &steps, FdScheme::Forward));
    match res {
        Ok(est) => {
            let slope = est.slope.unwrap_or(f64::NAN);
            r.table.push(format!("{:<8} forward slope {slope:.3}", "exp"));
            r.check(|| format!("exp forward slope {slope:.3}"), (slope - 1.0).abs(), 0.2);
        }
        Err(e) => {
            r.failed += 1;
            r.failures.push(format!("exp forward: {e}"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn every_suite_passes() {
        for report in run_all(DEFAULT_SEED) {
            assert!(report.ok(), "{report}");
            assert!(report.passed > 0);
        }
    }

    #[test]
    fn fd_suite_reports_slopes() {
        let report = run_suite(Suite::Fd, DEFAULT_SEED);
        assert!(report.table.iter().any(|l| l.contains("central slope")));
    }

    #[test]
    fn failures_are_counted() {
        let mut r = SuiteReport::new(Suite::Algebra);
        r.check(|| "x".into(), 1.0, 0.5);
        r.check(|| "y".into(), f64::NAN, 0.5);
        r.check(|| "z".into(), 0.1, 0.5);
        assert_eq!((r.passed, r.failed), (1, 2));
        assert!(!r.ok());
    }
}
