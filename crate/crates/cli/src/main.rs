//! `semicayley`: continuous-time quantum walks on semi-Cayley graphs over
//! finite abelian groups.
//!
//! Exit codes: 0 success, 2 invalid input, 3 no revival found (or a
//! refuted `verify`), 4 internal tolerance breach.

mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use semicayley::cayley::from_cayley;
use semicayley::error::Error;
use semicayley::graph::Orbit;
use semicayley::mintime::{self, CrossOrbitMinTime};
use semicayley::report;
use semicayley::revival::{self, DetectOptions, RevivalPair, RowVerdict, SearchMode};
use semicayley::scan::{scan, ScanSpec};
use semicayley::spectral::{dense_eigenvalues, ORACLE_CAP};
use semicayley::time::Time;
use semicayley::tolerance::Tolerances;
use semicayley::walk::Walk;

use scenario::{parse_pair, parse_time, Format, Scenario};

/// Environment variable holding tolerance overrides, `key=value,...`.
const EPS_ENV: &str = "SEMICAYLEY_EPS";

#[derive(Parser)]
#[command(
    name = "semicayley",
    version,
    about = "Quantum walks and fractional revival on semi-Cayley graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Scenario JSON file.
    #[arg(long, short)]
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Same,
    Cross,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form eigenvalues and orbit weights per character.
    Spectrum {
        #[command(flatten)]
        input: Input,
        /// Compare against a dense eigensolver.
        #[arg(long)]
        check: bool,
    },
    /// The transition matrix H(t) = exp(itA).
    Transition {
        #[command(flatten)]
        input: Input,
        /// `k/m` (t = 2πk/m) or radians.
        #[arg(long)]
        time: Option<String>,
        /// Compare against the dense matrix exponential.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// CSV of |H(t)_{u,v}|² over an evenly spaced grid of times.
    Fidelity {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        pair: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        to: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Search for fractional revival and perfect state transfer.
    Detect {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        /// Largest denominator of the rational time sweep (default 4n).
        #[arg(long)]
        max_den: Option<u64>,
        /// Report every hit instead of the earliest per pairing and kind.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        include_periodic: bool,
    },
    /// Integrality and the minimum-time invariants M(a), N(a).
    Mintime {
        #[command(flatten)]
        input: Input,
        /// Exit with code 4 if some M or N does not divide 2n.
        #[arg(long)]
        assert_divisor: bool,
    },
    /// Exhaustive catalog over small groups, one JSON record per line.
    Scan {
        /// JSON scan specification; flags below override it.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        max_order: Option<u32>,
        /// Factor lists such as `2x2;4;3`.
        #[arg(long)]
        shapes: Option<String>,
        /// Also enumerate graphs with R != L.
        #[arg(long)]
        allow_distinct: bool,
        #[arg(long)]
        s_min: Option<usize>,
        #[arg(long)]
        s_max: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Convert a Cayley-extension scenario to direct semi-Cayley form.
    ConvertCayley {
        #[command(flatten)]
        input: Input,
    },
    /// Check one revival claim against the full transition row.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        pair: Option<String>,
        #[arg(long)]
        time: Option<String>,
        /// `re,im`
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// `re,im`
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Also run the block-shape and root-of-unity audits.
        #[arg(long)]
        audit: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn breach(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: 2,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn tolerances(scenario: Option<&Scenario>) -> Result<Tolerances, Error> {
    let base = scenario.and_then(|s| s.tolerances).unwrap_or_default();
    match std::env::var(EPS_ENV) {
        Ok(spec) => base.with_overrides(&spec),
        Err(_) => Ok(base),
    }
}

fn load(input: &Input) -> Result<(Scenario, Walk), Error> {
    let scenario = Scenario::load(&input.input)?;
    let tol = tolerances(Some(&scenario))?;
    let walk = Walk::new(scenario.graph()?, tol);
    Ok((scenario, walk))
}

fn emit(v: &Value) {
    print!("{}", report::to_string(v));
}

fn required<'a>(
    flag: Option<&'a String>,
    file: Option<&'a String>,
    name: &str,
) -> Result<&'a str, Error> {
    flag.or(file)
        .map(String::as_str)
        .ok_or_else(|| Error::Validation {
            field: name.into(),
            message: format!("no {name} given (use --{name} or the scenario's `{name}` field)"),
        })
}

fn parse_complex(field: &str, text: &str) -> Result<Complex64, Error> {
    let bad = || Error::Validation {
        field: field.into(),
        message: format!("expected `re,im`, got `{text}`"),
    };
    let (re, im) = text.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Spectrum { input, check } => {
            let (_, walk) = load(&input)?;
            emit(&report::spectrum(walk.spectral()));
            if check {
                let dense = dense_eigenvalues(walk.graph(), ORACLE_CAP)?;
                let closed = walk.spectral().eigenvalues();
                let dev = dense
                    .iter()
                    .zip(&closed)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if dev > walk.tol().eigensolver {
                    return Err(Failure::breach(format!(
                        "closed-form spectrum differs from the dense eigensolver by {dev:e}"
                    )));
                }
                eprintln!("spectrum agrees with dense eigensolver (max deviation {dev:e})");
            }
            Ok(0)
        }
        Command::Transition {
            input,
            time,
            oracle,
            format,
        } => {
            let (scenario, walk) = load(&input)?;
            let time = parse_time(required(time.as_ref(), scenario.time.as_ref(), "time")?)?;
            let h = walk.spectral().transition_matrix(&time);
            let format = match format {
                Some(FormatArg::Json) => Format::Json,
                Some(FormatArg::Csv) => Format::Csv,
                None => scenario.format.unwrap_or(Format::Csv),
            };
            match format {
                Format::Csv => print!("{}", report::matrix_csv(&h)),
                Format::Json => {
                    let rows: Vec<Value> = (0..h.matrix.nrows())
                        .map(|i| {
                            Value::Array(
                                (0..h.matrix.ncols())
                                    .map(|j| report::complex(h.matrix[(i, j)]))
                                    .collect(),
                            )
                        })
                        .collect();
                    let mut obj = serde_json::Map::new();
                    report::time_fields(&time, &mut obj);
                    obj.insert("matrix".into(), Value::Array(rows));
                    obj.insert(
                        "unitarity_defect".into(),
                        report::real(h.unitarity_defect()),
                    );
                    emit(&Value::Object(obj));
                }
            }
            if oracle {
                let dense = walk.oracle(&time)?;
                let diff = h.max_abs_diff(&dense);
                if diff > walk.tol().residual {
                    return Err(Failure::breach(format!(
                        "closed form and dense exponential differ by {diff:e}"
                    )));
                }
                eprintln!("oracle agreement: max deviation {diff:e}");
            }
            Ok(0)
        }
        Command::Fidelity {
            input,
            pair,
            from,
            to,
            steps,
        } => {
            let (scenario, walk) = load(&input)?;
            let (u, v) = parse_pair(
                required(pair.as_ref(), scenario.pair.as_ref(), "pair")?,
                walk.graph().group(),
            )?;
            if steps < 2 || to <= from || to.is_nan() || from.is_nan() {
                return Err(Error::Validation {
                    field: "grid".into(),
                    message: "need at least two steps and --to > --from".into(),
                }
                .into());
            }
            let grid: Vec<Time> = (0..steps)
                .map(|i| Time::Radians(from + (to - from) * i as f64 / (steps - 1) as f64))
                .collect();
            print!("{}", report::fidelity_csv(&walk, &u, &v, &grid));
            Ok(0)
        }
        Command::Detect {
            input,
            mode,
            max_den,
            all,
            include_periodic,
        } => {
            let (_, walk) = load(&input)?;
            let options = DetectOptions {
                mode: match mode {
                    ModeArg::Same => SearchMode::Same,
                    ModeArg::Cross => SearchMode::Cross,
                    ModeArg::Both => SearchMode::Both,
                },
                max_denominator: max_den,
                earliest_only: !all,
                include_periodic,
            };
            let found = revival::detect(&walk, &options);
            for d in &found.diagnostics {
                eprintln!("note: {}", d.message);
            }
            emit(&Value::Array(
                found.certificates.iter().map(report::certificate).collect(),
            ));
            if found.has_breach() {
                return Err(Failure::breach(
                    "a characterization hit failed the row check",
                ));
            }
            Ok(if found.certificates.is_empty() { 3 } else { 0 })
        }
        Command::Mintime {
            input,
            assert_divisor,
        } => {
            let (_, walk) = load(&input)?;
            let integrality = mintime::integrality_check(&walk);
            let mut same = Vec::new();
            let mut cross = Vec::new();
            let mut notes = Vec::new();
            let mut violations = 0;
            if !walk.graph().r_equals_l() {
                notes.push(json!("minimum-time invariants need R = L"));
            } else if !integrality.integral {
                notes.push(json!("spectrum is not integral; M and N are undefined"));
            } else {
                let group = walk.graph().group().clone();
                if group.involutions().is_empty() {
                    notes.push(json!(
                        "no valid a: no element of order 2, same-orbit revival impossible"
                    ));
                }
                for a in group.involutions() {
                    let r = mintime::compute_m(&walk, &a)?;
                    violations += usize::from(r.divides_2n == Some(false));
                    same.push(report::mintime(&r));
                }
                for a in group.elements() {
                    for source in Orbit::both() {
                        match mintime::compute_n(&walk, &a, source)? {
                            CrossOrbitMinTime::Report(r) => {
                                violations += usize::from(r.divides_2n == Some(false));
                                cross.push(report::mintime(&r));
                            }
                            CrossOrbitMinTime::Impossible(reason) => cross.push(json!({
                                "a": report::element(&a),
                                "kind": "cross-orbit",
                                "source_orbit": source.index(),
                                "impossible": reason,
                            })),
                        }
                    }
                }
                let summary = mintime::no_fr_certificate(&walk)?;
                for c in summary.certificates {
                    notes.push(json!({
                        "a": report::element(&c.a),
                        "kind": c.relation.label(),
                        "reason": c.reason,
                    }));
                }
            }
            emit(&json!({
                "n": walk.n(),
                "integrality": report::integrality(&integrality),
                "M": same,
                "N": cross,
                "notes": notes,
            }));
            if assert_divisor && violations > 0 {
                return Err(Failure::breach(format!(
                    "{violations} invariant(s) do not divide 2n"
                )));
            }
            Ok(0)
        }
        Command::Scan {
            spec,
            max_order,
            shapes,
            allow_distinct,
            s_min,
            s_max,
            workers,
        } => {
            let mut scan_spec = match spec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::Parse(format!("cannot read {}: {e}", path.display()))
                    })?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::Parse(format!("scan spec: {e}")))?
                }
                None => ScanSpec::default(),
            };
            if let Some(m) = max_order {
                scan_spec.max_order = m;
            }
            if let Some(text) = shapes {
                scan_spec.shapes = Some(parse_shapes(&text)?);
            }
            if allow_distinct {
                scan_spec.r_equals_l = false;
            }
            if let Some(v) = s_min {
                scan_spec.s_min = v;
            }
            if s_max.is_some() {
                scan_spec.s_max = s_max;
            }
            if workers.is_some() {
                scan_spec.workers = workers;
            }
            let records = scan(&scan_spec, &tolerances(None)?)?;
            let mut breach = false;
            for r in &records {
                breach |= r.detect.has_breach();
                println!("{}", report::scan_record(r));
            }
            if breach {
                return Err(Failure::breach(
                    "a characterization hit failed the row check",
                ));
            }
            Ok(0)
        }
        Command::ConvertCayley { input } => {
            let scenario = Scenario::load(&input.input)?;
            let form = scenario.cayley.as_ref().ok_or_else(|| Error::Validation {
                field: "cayley".into(),
                message: "scenario has no `cayley` section".into(),
            })?;
            let ext = form.extension()?;
            let (graph, relabel) = from_cayley(&ext)?;
            let p = relabel.permutation_matrix();
            let permuted = p.transpose() * ext.cayley_adjacency() * &p;
            if permuted != graph.adjacency() {
                return Err(Failure::breach(
                    "relabeled Cayley adjacency differs from the semi-Cayley adjacency",
                ));
            }
            let sets = graph.sets();
            emit(&json!({
                "graph": {
                    "group": graph.group().factors(),
                    "R": report::elements(&sets.r),
                    "L": report::elements(&sets.l),
                    "S": report::elements(&sets.s),
                },
                "relabeling": relabel.0,
            }));
            Ok(0)
        }
        Command::Verify {
            input,
            pair,
            time,
            alpha,
            beta,
            audit,
        } => {
            let (scenario, walk) = load(&input)?;
            let (u, v) = parse_pair(
                required(pair.as_ref(), scenario.pair.as_ref(), "pair")?,
                walk.graph().group(),
            )?;
            let time = parse_time(required(time.as_ref(), scenario.time.as_ref(), "time")?)?;
            // User-typed amplitudes are rounded, so normalization is held to
            // the row-check tolerance rather than the tight default.
            let pair = RevivalPair::new(
                parse_complex("alpha", &alpha)?,
                parse_complex("beta", &beta)?,
                walk.tol().residual,
            )?;
            match revival::verify_row(&walk, &u, &v, &time, &pair)? {
                RowVerdict::Certified(cert) => {
                    let mut out = report::certificate(&cert);
                    if audit {
                        let block = revival::block_shape_audit(&walk, &cert)?;
                        let root = mintime::root_of_unity_audit(&walk, &cert);
                        let obj = out.as_object_mut().expect("certificate is an object");
                        obj.insert("block_audit".into(), report::block_audit(&block));
                        obj.insert("root_of_unity_audit".into(), report::audit_status(&root));
                    }
                    emit(&json!({"verdict": "certified", "certificate": out}));
                    Ok(0)
                }
                RowVerdict::Refuted(r) => {
                    emit(&json!({"verdict": "refuted", "refutation": report::refutation(&r)}));
                    Ok(3)
                }
            }
        }
    }
}

fn parse_shapes(text: &str) -> Result<Vec<Vec<u32>>, Error> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|shape| {
            shape
                .split('x')
                .map(|f| {
                    f.trim().parse::<u32>().map_err(|_| Error::Validation {
                        field: "shapes".into(),
                        message: format!("bad factor `{f}` in `{shape}`"),
                    })
                })
                .collect()
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
