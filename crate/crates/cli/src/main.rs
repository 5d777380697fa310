//! `sschur`: command-line front end for the shifted-schur library.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 failed
//! numerical self-check.

mod lists;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use shifted_schur::acceptance::{self, Suite, KNOWN_FAILURES};
use shifted_schur::airy::AiryEvaluator;
use shifted_schur::limit_shape::{expected_profile_with, limit_shape, ShapeCurve, PROFILE_TOL};
use shifted_schur::partition::sample;
use shifted_schur::scaling::{
    default_schedule, edge_j_report, edge_kernel_reports, pfdet_report, tw_report, IndexRule,
    ScalingReport,
};
use shifted_schur::schur_q::EnumeratedMeasure;
use shifted_schur::skew::{correlation_with, gap_probability_with};
use shifted_schur::tracy_widom::tw_cdf;
use shifted_schur::{Error, JTable, MiwaParams};

use table::{Cell, Table};

#[derive(Parser, Debug)]
#[command(
    name = "sschur",
    version,
    about = "Shifted Schur measures and their scaling limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ParamSource {
    /// Minimal p-multicritical parameters for even p.
    #[arg(long)]
    p: Option<u32>,
    /// JSON parameter file, e.g. {"t": {"1": 0.5}, "a": 2.0}.
    #[arg(long)]
    t_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to csv, except json for `multicritical`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    J,
    Kernel,
    Pfdet,
    Tw,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Clone, Debug)]
struct IntList(Vec<i64>);

#[derive(Clone, Debug)]
struct SiteList(Vec<u64>);

#[derive(Clone, Debug)]
struct FloatList(Vec<f64>);

fn int_list(s: &str) -> Result<IntList, String> {
    lists::parse_ints(s).map(IntList)
}

fn site_list(s: &str) -> Result<SiteList, String> {
    lists::parse_sites(s).map(SiteList)
}

fn float_list(s: &str) -> Result<FloatList, String> {
    lists::parse_floats(s).map(FloatList)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal multicritical parameters (or a checked parameter file).
    Multicritical {
        #[command(flatten)]
        params: ParamSource,
        #[command(flatten)]
        output: Output,
    },
    /// Enumerated weights 2^{-l} Q_λ² and probabilities for |λ| ≤ max-size.
    Weights {
        #[command(flatten)]
        params: ParamSource,
        #[arg(long, default_value_t = 10)]
        max_size: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Fourier coefficients J(m) for m = 0..=mmax.
    Jtable {
        #[command(flatten)]
        params: ParamSource,
        #[arg(long)]
        mmax: Option<usize>,
        /// Truncation floor for the coefficient cache.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Kernel K(a, b) for all pairs from --points.
    Kernel {
        #[command(flatten)]
        params: ParamSource,
        #[arg(long, value_parser = int_list, default_value = "-3..3")]
        points: IntList,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Correlation function ρ(points).
    Correlation {
        #[command(flatten)]
        params: ParamSource,
        #[arg(long, value_parser = site_list)]
        points: SiteList,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Probability that no part lies in --interval.
    Gap {
        #[command(flatten)]
        params: ParamSource,
        #[arg(long, value_parser = site_list)]
        interval: SiteList,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Limit shape Ω and density on a uniform grid over [0, xmax].
    LimitShape {
        #[command(flatten)]
        params: ParamSource,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long)]
        xmax: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Finite-ε expected profile on εℤ ∩ [0, xmax] next to Ω.
    Profile {
        #[command(flatten)]
        params: ParamSource,
        #[arg(long, alias = "eps")]
        epsilon: f64,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Ai_p and its derivative on a grid.
    Airy {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
        xmin: f64,
        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        xmax: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Degree-p Tracy–Widom distribution F_p on a grid.
    Tw {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
        smin: f64,
        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        smax: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Finite-ε edge quantities against their p-Airy limits.
    EdgeConverge {
        #[arg(long)]
        p: u32,
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, value_parser = float_list)]
        eps: Option<FloatList>,
        #[arg(long, value_parser = float_list, default_value = "-1,0,1", allow_hyphen_values = true)]
        args: FloatList,
        #[command(flatten)]
        output: Output,
    },
    /// Exact draws by inverse CDF over |λ| ≤ max-size.
    Sample {
        #[command(flatten)]
        params: ParamSource,
        #[arg(long, default_value_t = 30)]
        max_size: u32,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// The numbered acceptance criteria.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Quick)]
        suite: SuiteArg,
        /// Treat known failures as failures.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = std::env::var("THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load(src: &ParamSource) -> Result<MiwaParams, Failure> {
    let params = match (&src.p, &src.t_file) {
        (Some(p), _) => MiwaParams::solve_minimal_multicritical(*p)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
            MiwaParams::from_json(&text)?
        }
        (None, None) => unreachable!("clap enforces one source"),
    };
    let r = params.validate(None);
    if !(r.real_valued && r.finite_support && r.nondegenerate) {
        return Err(Failure::Validation(format!(
            "parameters violate the admissibility conditions (curvature {:.3e} at θ = {:.4})",
            r.margin, r.worst_theta
        )));
    }
    Ok(params)
}

fn table_for(params: &MiwaParams, tol: Option<f64>) -> Result<JTable, Failure> {
    match tol {
        None => Ok(JTable::new(params)?),
        Some(t) if t > 0.0 => Ok(JTable::with_floor(params, t)?),
        Some(t) => Err(Failure::Validation(format!(
            "tolerance must be positive, got {t}"
        ))),
    }
}

fn emit(table: &Table, output: &Output) -> Outcome {
    let sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => table.write_csv(&mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &table.to_json())
                .map_err(|e| Failure::Validation(e.to_string()))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn invalid(msg: String) -> Failure {
    Failure::Validation(msg)
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Multicritical { params, output } => {
            let p = load(&params)?;
            if output.format.unwrap_or(Format::Json) == Format::Json {
                let text = p.to_json();
                match &output.out {
                    Some(path) => std::fs::write(path, text + "\n")?,
                    None => println!("{text}"),
                }
                return Ok(());
            }
            let mut t = Table::new(&["name", "value"]);
            for (n, v) in p.coeffs() {
                t.push(vec![format!("t{n}").into(), (*v).into()]);
            }
            t.push(vec!["a".into(), p.a().into()]);
            t.push(vec!["b".into(), p.b().into()]);
            emit(&t, &output)
        }
        Command::Weights {
            params,
            max_size,
            output,
        } => {
            let p = load(&params)?;
            let m = EnumeratedMeasure::new(&p, max_size)?;
            let mut t = Table::new(&["partition", "length", "size", "Q", "weight", "probability"]);
            for r in &m.rows {
                t.push(vec![
                    r.partition.joined().into(),
                    r.partition.len().into(),
                    r.partition.size().into(),
                    r.q.into(),
                    r.weight.into(),
                    r.probability.into(),
                ]);
            }
            emit(&t, &output)
        }
        Command::Jtable {
            params,
            mmax,
            tol,
            output,
        } => {
            let p = load(&params)?;
            let table = table_for(&p, tol)?;
            let top = mmax.unwrap_or_else(|| table.bandwidth());
            let mut t = Table::new(&["m", "J"]);
            for m in 0..=top as i64 {
                t.push(vec![m.into(), table.get(m).into()]);
            }
            emit(&t, &output)
        }
        Command::Kernel {
            params,
            points,
            tol,
            output,
        } => {
            let p = load(&params)?;
            let table = table_for(&p, tol)?;
            let mut t = Table::new(&["a", "b", "K", "truncation_bound"]);
            for &a in &points.0 {
                for &b in &points.0 {
                    let k = table.kernel(a, b);
                    t.push(vec![a.into(), b.into(), k.value.into(), k.bound.into()]);
                }
            }
            emit(&t, &output)
        }
        Command::Correlation {
            params,
            points,
            tol,
            output,
        } => {
            let p = load(&params)?;
            let table = table_for(&p, tol)?;
            let c = correlation_with(&points.0, &table)?;
            let mut t = Table::new(&["points", "value", "error_bound"]);
            t.push(vec![
                join(&points.0).into(),
                c.value.into(),
                c.error_bound.into(),
            ]);
            emit(&t, &output)
        }
        Command::Gap {
            params,
            interval,
            tol,
            output,
        } => {
            let p = load(&params)?;
            let table = table_for(&p, tol)?;
            let g = gap_probability_with(&interval.0, &table)?;
            let n = 2 * interval.0.len();
            let bound = (n * (n - 1) / 2) as f64 * table.kernel(1, 1).bound;
            let mut t = Table::new(&["points", "value", "error_bound"]);
            t.push(vec![join(&interval.0).into(), g.into(), bound.into()]);
            emit(&t, &output)
        }
        Command::LimitShape {
            params,
            grid,
            xmax,
            output,
        } => {
            let p = load(&params)?;
            let curve = ShapeCurve::new(&p, xmax.unwrap_or(1.5 * p.b()), grid)?;
            let mut t = Table::new(&["x", "omega", "density"]);
            for i in 0..curve.grid.len() {
                t.push(vec![
                    curve.grid[i].into(),
                    curve.omega[i].into(),
                    curve.density[i].into(),
                ]);
            }
            emit(&t, &output)
        }
        Command::Profile {
            params,
            epsilon,
            xmax,
            tol,
            output,
        } => {
            let p = load(&params)?;
            if !(epsilon > 0.0 && epsilon <= 1.0) {
                return Err(invalid(format!(
                    "epsilon must lie in (0, 1], got {epsilon}"
                )));
            }
            let tol = match tol {
                None => PROFILE_TOL,
                Some(t) if t > 0.0 => t,
                Some(t) => return Err(invalid(format!("tolerance must be positive, got {t}"))),
            };
            let table = JTable::new(&p.scaled(1.0 / epsilon))?;
            let top = xmax.unwrap_or(p.b() + 1.0);
            let xs = lists::grid(0.0, top, epsilon).map_err(invalid)?;
            let rows = xs
                .par_iter()
                .map(|&x| {
                    Ok(vec![
                        Cell::from(x),
                        expected_profile_with(&table, epsilon, x, tol)?.into(),
                        limit_shape(&p, x)?.into(),
                    ])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let mut t = Table::new(&["x", "expected_profile", "omega"]);
            rows.into_iter().for_each(|r| t.push(r));
            emit(&t, &output)
        }
        Command::Airy {
            p,
            xmin,
            xmax,
            step,
            output,
        } => {
            let ev = AiryEvaluator::new(p)?;
            let xs = lists::grid(xmin, xmax, step).map_err(invalid)?;
            let rows = xs
                .par_iter()
                .map(|&x| {
                    let d = ev.derivatives(x, 1)?.derivs;
                    Ok(vec![Cell::from(x), d[0].into(), d[1].into()])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let mut t = Table::new(&["x", "Ai_p", "dAi_p"]);
            rows.into_iter().for_each(|r| t.push(r));
            emit(&t, &output)
        }
        Command::Tw {
            p,
            smin,
            smax,
            step,
            output,
        } => {
            AiryEvaluator::new(p)?;
            let ss = lists::grid(smin, smax, step).map_err(invalid)?;
            let rows = ss
                .par_iter()
                .map(|&s| Ok(vec![Cell::from(s), tw_cdf(p, s)?.into()]))
                .collect::<Result<Vec<_>, Error>>()?;
            let mut t = Table::new(&["s", "F_p"]);
            rows.into_iter().for_each(|r| t.push(r));
            emit(&t, &output)
        }
        Command::EdgeConverge {
            p,
            target,
            eps,
            args,
            output,
        } => {
            let eps = eps.map(|e| e.0).unwrap_or_else(|| default_schedule(p));
            if let Some(&e) = eps.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
                return Err(invalid(format!("epsilon must lie in (0, 1], got {e}")));
            }
            let xs = args.0;
            let reports: Vec<ScalingReport> = match target {
                Target::J => vec![edge_j_report(p, &eps, &xs, IndexRule::Continuum)?],
                Target::Kernel => {
                    let pairs: Vec<(f64, f64)> = xs
                        .iter()
                        .flat_map(|&x| xs.iter().map(move |&y| (x, y)))
                        .collect();
                    edge_kernel_reports(p, &eps, &pairs)?.into()
                }
                Target::Pfdet => vec![pfdet_report(p, &eps, std::slice::from_ref(&xs))?],
                Target::Tw => vec![tw_report(p, &eps, &xs)?],
            };
            emit(&scaling_table(&reports), &output)
        }
        Command::Sample {
            params,
            max_size,
            count,
            seed,
            output,
        } => {
            let p = load(&params)?;
            let draws = sample(&p, max_size, count, seed)?;
            let mut t = Table::new(&["index", "partition", "size", "length"]);
            for (i, l) in draws.iter().enumerate() {
                t.push(vec![
                    i.into(),
                    l.joined().into(),
                    l.size().into(),
                    l.len().into(),
                ]);
            }
            emit(&t, &output)
        }
        Command::Verify {
            suite,
            strict,
            output,
        } => {
            let suite = match suite {
                SuiteArg::Quick => Suite::Quick,
                SuiteArg::Full => Suite::Full,
            };
            let outcomes: Vec<_> = (1..=10u32)
                .into_par_iter()
                .map(|id| acceptance::run(id, suite))
                .collect();
            let mut t = Table::new(&["id", "name", "passed", "seconds", "detail"]);
            for o in &outcomes {
                eprintln!("{}", o.line());
                t.push(vec![
                    (o.id as i64).into(),
                    o.name.into(),
                    o.passed.into(),
                    o.seconds.into(),
                    o.detail.clone().into(),
                ]);
            }
            emit(&t, &output)?;
            let failed: Vec<u32> = outcomes
                .iter()
                .filter(|o| !o.passed)
                .map(|o| o.id)
                .collect();
            let fatal: Vec<u32> = failed
                .iter()
                .copied()
                .filter(|id| strict || !KNOWN_FAILURES.contains(id))
                .collect();
            eprintln!("{} of 10 criteria passed", 10 - failed.len());
            if fatal.is_empty() {
                Ok(())
            } else {
                Err(Failure::Numerical(format!("criteria {fatal:?} failed")))
            }
        }
    }
}

fn join(sites: &[u64]) -> String {
    sites
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// `target, p, epsilon, arg1.., finite_value, limit_value, abs_error`; rows
/// with fewer arguments leave the trailing argument columns empty.
fn scaling_table(reports: &[ScalingReport]) -> Table {
    let arity = reports
        .iter()
        .flat_map(|r| r.rows.iter().map(|row| row.arg.len()))
        .max()
        .unwrap_or(0);
    let mut header = vec!["target".to_string(), "p".into(), "epsilon".into()];
    header.extend((1..=arity).map(|i| format!("arg{i}")));
    header.extend(["finite_value", "limit_value", "abs_error"].map(String::from));
    let mut t = Table::new(&header);
    for rep in reports {
        for row in &rep.rows {
            let mut cells = vec![
                Cell::from(rep.target.as_str()),
                Cell::from(rep.p as i64),
                Cell::from(row.epsilon),
            ];
            for i in 0..arity {
                cells.push(row.arg.get(i).map_or(Cell::from(""), |&a| Cell::from(a)));
            }
            cells.extend([row.finite.into(), row.limit.into(), row.error.into()]);
            t.push(cells);
        }
    }
    t
}
