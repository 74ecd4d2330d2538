use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use realschubert::geometry::{
    isotropy_check, p_map, sample_isotropic, vanishing_order_matches_membership,
    vanishing_order_matches_membership_og, wronskian, wronskian_plucker, SubspacePoint,
    VanishingReport,
};
use realschubert::osculating::{
    check_orthogonal_flag, check_skew_derivative, check_translation_invariance, FlagPoint,
};
use realschubert::partitions::{
    all_strict, bar_sequence, rect_syt_count, shifted_syt_count, tilde_partition, StrictPartition,
};
use realschubert::poly::Poly;
use realschubert::scalar::{format_rational, parse_rational, Rational};
use realschubert::solver::{fiber_of_p, solve, ProblemFile, SolverConfig};
use realschubert::Error;

const OK: u8 = 0;
const MATH_FAILURE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const INCOMPLETE: u8 = 3;

#[derive(Parser)]
#[command(name = "realschubert", version, about = "Real Schubert calculus on Grassmannians and orthogonal Grassmannians")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Print the machine-readable report on stdout instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Solver configuration (JSON), replacing any configuration in the problem file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check F_i(a)^⊥ = F_{2n+1-i}(a) and the properties of the symmetric form.
    VerifyFlags {
        #[arg(long)]
        n: usize,
        /// Comma-separated points: rationals or `infinity`.
        #[arg(long, allow_hyphen_values = true, default_value = "0,infinity")]
        points: String,
        /// Random trials for the skew-derivative and translation checks.
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Strict-partition bookkeeping.
    Partitions {
        #[command(subcommand)]
        what: PartitionCommand,
    },
    /// Wronskian of a subspace of polynomials.
    Wronski {
        /// Subspace JSON file, or `-` for stdin.
        file: PathBuf,
        /// Points at which to compare vanishing orders with Schubert cells.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// The square root P of the Wronskian of an isotropic subspace.
    Pmap {
        /// Subspace JSON file in C_{2n}[z], or `-` for stdin.
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "0,infinity")]
        points: String,
    },
    /// Exact random isotropic n-planes in C_{2n}[z].
    SampleIsotropic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Solve a Schubert problem and certify its solutions.
    Solve {
        /// Problem JSON file, or `-` for stdin.
        file: PathBuf,
    },
    /// Every isotropic n-plane whose P is proportional to a target polynomial.
    Fiber {
        #[arg(long)]
        n: usize,
        /// Comma-separated coefficients, constant term first.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
}

#[derive(Subcommand)]
enum PartitionCommand {
    /// The sequence σ̄.
    Bar {
        #[arg(long)]
        n: usize,
        /// Comma-separated strictly decreasing parts; empty for the empty partition.
        #[arg(long, default_value = "")]
        sigma: String,
    },
    /// The partition σ̃ in the n x (n+1) box.
    Tilde {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "")]
        sigma: String,
    },
    /// Standard shifted tableaux counts for every strict partition with parts at most n,
    /// or the rectangular count for a d x w box.
    Counts {
        #[arg(long, required_unless_present = "rect")]
        n: Option<usize>,
        /// `d,w`
        #[arg(long, conflicts_with = "n")]
        rect: Option<String>,
    },
}

/// A finished command: its report, a short summary, and the exit code.
struct Outcome {
    report: Value,
    summary: String,
    code: u8,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_)
            | Error::InvalidPartition(_)
            | Error::InvalidSubspace(_)
            | Error::InvalidProblem(_)
            | Error::UnsupportedTarget(_) => INPUT_ERROR,
            Error::TooManyPaths { .. } => INCOMPLETE,
            _ => MATH_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: INPUT_ERROR, message: message.into() }
}

type CmdResult = Result<Outcome, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    };
    text.map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn parse_points(s: &str) -> Result<Vec<FlagPoint>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.parse::<FlagPoint>().map_err(Failure::from))
        .collect()
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| input_error(format!("invalid {what} entry {t:?}"))))
        .collect()
}

fn strict(n: usize, sigma: &str) -> Result<StrictPartition, Failure> {
    Ok(StrictPartition::new(parse_list(sigma, "partition")?, n)?)
}

fn pass_code(pass: bool) -> u8 {
    if pass {
        OK
    } else {
        MATH_FAILURE
    }
}

fn coeff_strings(p: &Poly<Rational>) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

fn verify_flags(n: usize, points: &str, trials: usize, seed: u64) -> CmdResult {
    if n == 0 {
        return Err(input_error("n must be positive"));
    }
    let points = parse_points(points)?;
    let flags: Vec<_> = points.iter().map(|a| check_orthogonal_flag(a, n)).collect();
    let skew = check_skew_derivative(n, trials, seed);
    let translation: Vec<_> = points
        .iter()
        .filter_map(|a| match a {
            FlagPoint::Finite(q) => Some(check_translation_invariance(q, n, trials, seed)),
            FlagPoint::Infinity => None,
        })
        .collect();
    let pass = flags.iter().all(|f| f.pass) && skew.pass && translation.iter().all(|t| t.pass);
    let mut summary = String::new();
    for f in &flags {
        let _ = writeln!(summary, "F(a)^⊥ = F_(2n+1-i)(a) at a = {}: {}", f.point, verdict(f.pass));
    }
    let _ = writeln!(summary, "skew derivative ({trials} trials): {}", verdict(skew.pass));
    for (t, a) in translation.iter().zip(points.iter().filter(|a| !a.is_infinity())) {
        let _ = writeln!(summary, "translation invariance by {a} ({trials} trials): {}", verdict(t.pass));
    }
    Ok(Outcome {
        report: json!({
            "n": n,
            "orthogonal_flags": to_value(&flags),
            "skew_derivative": to_value(&skew),
            "translation_invariance": to_value(&translation),
            "pass": pass,
        }),
        summary,
        code: pass_code(pass),
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn partitions(what: PartitionCommand) -> CmdResult {
    match what {
        PartitionCommand::Bar { n, sigma } => {
            let s = strict(n, &sigma)?;
            let bar = bar_sequence(&s);
            Ok(Outcome {
                summary: format!("bar of {s} (n = {n}): {:?}\n", bar.values()),
                report: json!({ "n": n, "sigma": s, "bar": bar }),
                code: OK,
            })
        }
        PartitionCommand::Tilde { n, sigma } => {
            let s = strict(n, &sigma)?;
            let t = tilde_partition(&s);
            Ok(Outcome {
                summary: format!("tilde of {s} (n = {n}): {:?}, weight {}\n", t.parts(), t.weight()),
                report: json!({ "n": n, "sigma": s, "tilde": t, "weight": t.weight() }),
                code: OK,
            })
        }
        PartitionCommand::Counts { n: Some(n), .. } => {
            let mut rows = Vec::new();
            let mut summary = String::new();
            for s in all_strict(n) {
                let count = shifted_syt_count(&s)?;
                let _ = writeln!(summary, "{s}: {count}");
                rows.push(json!({ "sigma": s, "weight": s.weight(), "shifted_syt": count.to_string() }));
            }
            Ok(Outcome { report: json!({ "n": n, "counts": rows }), summary, code: OK })
        }
        PartitionCommand::Counts { rect: Some(rect), .. } => {
            let dims: Vec<usize> = parse_list(&rect, "rectangle")?;
            let [d, w] = dims[..] else {
                return Err(input_error("--rect expects `d,w`"));
            };
            let count = rect_syt_count(d, w)?;
            Ok(Outcome {
                summary: format!("standard tableaux of the {d} x {w} rectangle: {count}\n"),
                report: json!({ "d": d, "w": w, "syt": count.to_string() }),
                code: OK,
            })
        }
        PartitionCommand::Counts { .. } => Err(input_error("counts needs --n or --rect")),
    }
}

fn read_subspace(file: &Path) -> Result<SubspacePoint, Failure> {
    let text = read_input(file)?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("subspace file: {e}")))
}

fn summarize_reports(summary: &mut String, reports: &[VanishingReport]) {
    for r in reports {
        let _ = writeln!(
            summary,
            "at {}: vanishing order {}, cell {:?} of weight {}: {}",
            r.point,
            r.multiplicity,
            r.cell,
            r.cell_weight,
            verdict(r.pass)
        );
    }
}

fn wronski(file: &Path, points: Option<&str>) -> CmdResult {
    let x = read_subspace(file)?;
    let w = wronskian(&x);
    let plucker_agrees = wronskian_plucker(&x) == w;
    let points = points.map(parse_points).transpose()?.unwrap_or_default();
    let reports = points
        .iter()
        .map(|a| vanishing_order_matches_membership(&x, a))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = plucker_agrees && reports.iter().all(|r| r.pass);
    let mut summary = format!("Wr = {}\nPlücker expansion agrees: {plucker_agrees}\n", show_poly(&w));
    summarize_reports(&mut summary, &reports);
    Ok(Outcome {
        report: json!({
            "subspace": x,
            "wronskian": coeff_strings(&w),
            "plucker_agrees": plucker_agrees,
            "vanishing": to_value(&reports),
            "pass": pass,
        }),
        summary,
        code: pass_code(pass),
    })
}

fn pmap(file: &Path, points: &str) -> CmdResult {
    let y = read_subspace(file)?;
    if y.m() % 2 == 0 {
        return Err(input_error(format!("ambient dimension {} is not 2n+1", y.m())));
    }
    let n = (y.m() - 1) / 2;
    if y.d() != n {
        return Err(input_error(format!("an isotropic subspace of C_{}[z] has dimension {n}, got {}", 2 * n, y.d())));
    }
    if !isotropy_check(&y, n) {
        return Err(Error::NotIsotropic("the Gram matrix of the basis is nonzero".into()).into());
    }
    let w = wronskian(&y);
    let p = p_map(&y, n)?;
    let reports = parse_points(points)?
        .iter()
        .map(|a| vanishing_order_matches_membership_og(&y, n, a))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let mut summary = format!("Wr = {}\nP = {}\n", show_poly(&w), show_poly(&p));
    summarize_reports(&mut summary, &reports);
    Ok(Outcome {
        report: json!({
            "subspace": y,
            "n": n,
            "isotropic": true,
            "wronskian": coeff_strings(&w),
            "p": coeff_strings(&p),
            "vanishing": to_value(&reports),
            "pass": pass,
        }),
        summary,
        code: pass_code(pass),
    })
}

fn show_poly(p: &Poly<Rational>) -> String {
    let terms: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Rational::from_integer(0.into()))
        .map(|(k, c)| match k {
            0 => format_rational(c),
            1 => format!("({}) z", format_rational(c)),
            _ => format!("({}) z^{k}", format_rational(c)),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn sample(n: usize, count: usize, seed: u64) -> CmdResult {
    if n == 0 {
        return Err(input_error("n must be positive"));
    }
    let points = sample_isotropic(n, count, seed)?;
    let isotropic = points.iter().all(|y| isotropy_check(y, n));
    Ok(Outcome {
        summary: format!("{} isotropic {n}-planes in C_{}[z] (seed {seed})\n", points.len(), 2 * n),
        report: to_value(&points),
        code: pass_code(isotropic),
    })
}

fn load_config(path: &Path) -> Result<SolverConfig, Failure> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("config file: {e}")))
}

fn solve_cmd(file: &Path, global: &Global) -> CmdResult {
    let mut pf = ProblemFile::parse(&read_input(file)?)?;
    if let Some(path) = &global.config {
        pf.config = Some(load_config(path)?);
    }
    if let Some(seed) = global.seed {
        pf.seed = Some(seed);
    }
    let (problem, cfg) = pf.into_problem()?;
    let report = solve(&problem, &cfg)?;
    let code = if !report.complete {
        INCOMPLETE
    } else {
        pass_code(report.success())
    };
    let expected = report
        .expected_count
        .map_or_else(|| "no oracle".to_string(), |e| e.to_string());
    let summary = format!(
        "{} solutions (expected {expected}), complete: {}, all real: {}, all transverse: {}\n",
        report.count, report.complete, report.all_real, report.all_transverse
    );
    Ok(Outcome { report: to_value(&report), summary, code })
}

fn fiber(n: usize, target: &str, global: &Global) -> CmdResult {
    if n == 0 {
        return Err(input_error("n must be positive"));
    }
    let coeffs = target
        .split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let h = Poly::from_coeffs(coeffs);
    let mut cfg = match &global.config {
        Some(path) => load_config(path)?,
        None => SolverConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    let report = fiber_of_p(&h, n, &cfg)?;
    let code = if !report.complete {
        INCOMPLETE
    } else {
        pass_code(report.success())
    };
    let summary = format!(
        "{} points in the fiber over {}, complete: {}, all real: {}, all transverse: {}, all match: {}\n",
        report.count,
        show_poly(&h),
        report.complete,
        report.all_real,
        report.all_transverse,
        report.all_match_target
    );
    Ok(Outcome { report: to_value(&report), summary, code })
}

fn run(cli: Cli) -> CmdResult {
    let seed = cli.global.seed.unwrap_or(0);
    match cli.command {
        Command::VerifyFlags { n, points, trials } => verify_flags(n, &points, trials, seed),
        Command::Partitions { what } => partitions(what),
        Command::Wronski { file, points } => wronski(&file, points.as_deref()),
        Command::Pmap { file, points } => pmap(&file, &points),
        Command::SampleIsotropic { n, count } => sample(n, count, seed),
        Command::Solve { file } => solve_cmd(&file, &cli.global),
        Command::Fiber { n, target } => fiber(n, &target, &cli.global),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_json = cli.global.json;
    match run(cli) {
        Ok(out) => {
            let text = if as_json {
                serde_json::to_string_pretty(&out.report).expect("valid JSON") + "\n"
            } else {
                out.summary
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if as_json {
                println!("{}", json!({ "error": f.message, "exit_code": f.code }));
            }
            ExitCode::from(f.code)
        }
    }
}
