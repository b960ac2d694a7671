use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hrcalc::qlms::run_system_identification;
use hrcalc::regular::ElementaryFn;
use hrcalc::validation::{run_suite, Suite, DEFAULT_SEED};
use hrcalc::{jet_gradient, Error, HRGradient, QuatScalar, Quaternion, Side};

mod config;

const EXIT_PARSE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_DIVERGED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "hrcalc", version, about = "Quaternion HR gradients, self-checks and QLMS experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print (d1, dI, dJ, dK) of a function at a point
    EvalGrad {
        /// power:<n>[:<center>], exp, ln or tanh
        function: String,
        /// point written a+bi+cj+dk
        #[arg(allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "left")]
        side: String,
    },
    /// Run the self-check suites
    Validate {
        /// all, algebra, rules, series, consistency or fd
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run a QLMS system-identification experiment and write its CSV record
    QlmsRun { config: PathBuf, output: PathBuf },
}

fn parse_function(name: &str) -> Result<ElementaryFn, String> {
    let parse_err = || format!("unknown function {name:?}; expected power:<n>[:<center>], exp, ln or tanh");
    match name {
        "exp" => Ok(ElementaryFn::Exp),
        "ln" => Ok(ElementaryFn::Ln),
        "tanh" => Ok(ElementaryFn::Tanh),
        _ => {
            let rest = name.strip_prefix("power:").ok_or_else(parse_err)?;
            let (n, center) = match rest.split_once(':') {
                Some((n, c)) => (n, c.parse::<Quaternion>().map_err(|e| format!("power center: {e}"))?),
                None => (rest, Quaternion::ZERO),
            };
            let n = n.parse::<i32>().map_err(|_| parse_err())?;
            Ok(ElementaryFn::Power { n, center })
        }
    }
}

fn eval_jet<T: QuatScalar>(func: ElementaryFn, q: T) -> hrcalc::Result<T> {
    match func {
        ElementaryFn::Exp => Ok(q.exp()),
        ElementaryFn::Ln => q.ln(),
        ElementaryFn::Tanh => q.tanh(),
        ElementaryFn::Power { n, center } => (q - T::constant(center)).powi(n),
    }
}

/// Closed-form `d1` with the remaining slots taken from forward-mode jets.
fn gradient(func: ElementaryFn, q: Quaternion, side: Side) -> hrcalc::Result<HRGradient> {
    let d1 = func.hr_derivative(q)?;
    let jets = hrcalc::hr_from_real(&jet_gradient(|x| eval_jet(func, x), q)?, side);
    let mut partials = jets.partials;
    partials[0] = d1;
    Ok(HRGradient::new(partials, side))
}

fn is_domain(e: &Error) -> bool {
    matches!(e, Error::Domain(_) | Error::Pole(_) | Error::DivisionByZero(_) | Error::OutsideAnnulus { .. })
}

fn eval_grad(function: &str, point: &str, side: &str) -> ExitCode {
    let parsed = (|| -> Result<_, String> {
        let func = parse_function(function)?;
        let q = point.parse::<Quaternion>().map_err(|e| e.to_string())?;
        let side = side.parse::<Side>().map_err(|e| e.to_string())?;
        Ok((func, q, side))
    })();
    let (func, q, side) = match parsed {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    };
    match gradient(func, q, side) {
        Ok(h) => {
            println!("side {}", h.side);
            for (label, d) in ["d1", "dI", "dJ", "dK"].iter().zip(h.partials) {
                println!("{label} {d}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_domain(&e) { EXIT_DOMAIN } else { EXIT_PARSE })
        }
    }
}

fn validate(suite: &str, seed: u64) -> ExitCode {
    let suites = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        match suite.parse::<Suite>() {
            Ok(s) => vec![s],
            Err(_) => {
                eprintln!("error: unknown suite {suite:?}; expected all, algebra, rules, series, consistency or fd");
                return ExitCode::from(EXIT_PARSE);
            }
        }
    };
    let mut all_ok = true;
    for s in suites {
        let report = run_suite(s, seed);
        println!("{report}");
        all_ok &= report.ok();
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION)
    }
}

fn qlms_run(config_path: &PathBuf, output: &PathBuf) -> ExitCode {
    let cfg = match std::fs::read_to_string(config_path)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", config_path.display())))
        .and_then(|text| config::parse_config(&text))
    {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let record = match run_system_identification(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let written = File::create(output).and_then(|f| record.write_csv(BufWriter::new(f)));
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", output.display());
        return ExitCode::from(EXIT_PARSE);
    }
    if record.diverged {
        eprintln!(
            "error: diverged after {} iterations (weight norm exceeded 1e12; heuristic stability bound {:.4e}, mu = {})",
            record.len(),
            record.stability_bound,
            cfg.step_size
        );
        return ExitCode::from(EXIT_DIVERGED);
    }
    println!("iterations {}", record.len());
    println!("initial_weight_error_norm {:.16e}", record.initial_weight_error_norm);
    println!("final_weight_error_norm {:.16e}", record.final_weight_error_norm());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::EvalGrad { function, point, side } => eval_grad(&function, &point, &side),
        Command::Validate { suite, seed } => validate(&suite, seed),
        Command::QlmsRun { config, output } => qlms_run(&config, &output),
    }
}
