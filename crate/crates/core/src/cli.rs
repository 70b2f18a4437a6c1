//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence
//! (the result is still written).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::evaluate_bound;
use crate::harness::{compare_all, generate_profile, gibbs_test_error, hhi, GeneratorSpec, Shape, RNG_ALGORITHM};
use crate::klinverse::{kl_lower_root, kl_upper_root, KlRootRequest};
use crate::optimize::{fp_solve, optimal_posterior_linear, prefix_search};
use crate::special::ik_constant;
use crate::types::{
    BoundSpec, ClassifierEntry, ConstantPolicy, DiscreteDistribution, DistanceKind,
    FixedPointConfig, Init, PosteriorResult, RiskProfile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Data(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Library(#[from] crate::error::Error),
    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Usage errors never reach this type; clap reports them first.
    pub fn exit_code(&self) -> i32 {
        EXIT_DATA
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "pacbayes", version, about = "PAC-Bayesian bounds and bound-minimizing posteriors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Threshold constant I(m) of a distance kind.
    Constants {
        #[arg(long)]
        phi: DistanceKind,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value = "exact")]
        policy: ConstantPolicy,
    },
    /// Lower and upper roots of kl(phat, q) = x.
    Klroot {
        #[arg(long)]
        phat: f64,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Evaluate a bound at a given posterior.
    Bound {
        #[command(flatten)]
        input: ProfileArgs,
        #[arg(long)]
        phi: DistanceKind,
        /// `uniform` or a weights CSV (`index,weight`).
        #[arg(long, default_value = "uniform")]
        posterior: String,
        /// `uniform` or a weights CSV (`index,weight`).
        #[arg(long, default_value = "uniform")]
        prior: String,
        #[arg(long, default_value = "exact")]
        policy: ConstantPolicy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the bound-minimizing posterior.
    Optimize {
        #[command(flatten)]
        input: ProfileArgs,
        #[arg(long)]
        phi: DistanceKind,
        /// `uniform` or a weights CSV (`index,weight`).
        #[arg(long, default_value = "uniform")]
        prior: String,
        /// Search supports over prefixes of the risk-sorted list.
        #[arg(long)]
        prefix_search: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimize all five bounds under a uniform prior.
    Compare {
        #[command(flatten)]
        input: ProfileArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also print a text table on stderr.
        #[arg(long)]
        table: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic risk profile CSV.
    Gen {
        #[arg(long)]
        h: usize,
        #[arg(long)]
        v: u64,
        #[arg(long)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        test_size: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Risk profile CSV with header `index,param,emp_risk,test_err`.
    #[arg(long)]
    risks: PathBuf,
    /// Sample size; may instead come from a `# sample_size=<m>` line.
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value = "exact")]
    policy: ConstantPolicy,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Start from a random point drawn with this seed instead of the prior.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    damping: f64,
}

impl SolverArgs {
    fn config(&self) -> FixedPointConfig {
        FixedPointConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            damping: self.damping,
            init: self.seed.map_or(Init::Prior, Init::Random),
            ..FixedPointConfig::default()
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("PACBAYES_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn dispatch(command: Command) -> CliResult<i32> {
    match command {
        Command::Constants { phi, m, policy } => {
            let ik = ik_constant(phi, m, policy)?;
            #[derive(Serialize)]
            struct Out {
                phi: DistanceKind,
                m: u64,
                constant_policy: ConstantPolicy,
                ik: f64,
                log_ik: f64,
                argmax_l: Option<f64>,
            }
            let out = Out {
                phi,
                m,
                constant_policy: policy,
                ik: ik.value(),
                log_ik: ik.log_value,
                argmax_l: ik.argmax_l,
            };
            emit(&out, None)?;
            Ok(EXIT_OK)
        }
        Command::Klroot { phat, x, tol, eps } => {
            let req = KlRootRequest { phat, x, tol, eps };
            let lo = kl_lower_root(&req)?;
            let up = kl_upper_root(&req)?;
            #[derive(Serialize)]
            struct Out {
                phat: f64,
                x: f64,
                lower: f64,
                upper: f64,
                lower_saturated: bool,
                upper_saturated: bool,
            }
            let out = Out {
                phat,
                x,
                lower: lo.root,
                upper: up.root,
                lower_saturated: lo.saturated,
                upper_saturated: up.saturated,
            };
            emit(&out, None)?;
            Ok(EXIT_OK)
        }
        Command::Bound {
            input,
            phi,
            posterior,
            prior,
            policy,
            out,
        } => {
            let profile = read_profile(&input.risks, input.m)?;
            let q = read_distribution(&posterior, &profile)?;
            let p = read_distribution(&prior, &profile)?;
            let spec = BoundSpec::new(phi, input.delta, policy)?;
            let b = evaluate_bound(&spec, &q, &p, &profile)?;
            #[derive(Serialize)]
            struct Out {
                phi: DistanceKind,
                bound: f64,
                saturated: bool,
                gibbs_emp_risk: f64,
                kl_qp: f64,
                log_ik: f64,
                constant_policy: ConstantPolicy,
                delta: f64,
                m: u64,
            }
            let report = Out {
                phi,
                bound: b.value,
                saturated: b.saturated,
                gibbs_emp_risk: b.gibbs_emp_risk,
                kl_qp: b.kl_qp,
                log_ik: b.log_ik,
                constant_policy: policy,
                delta: input.delta,
                m: profile.sample_size(),
            };
            emit(&report, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Optimize {
            input,
            phi,
            prior,
            prefix_search: prefix,
            solver,
            out,
        } => {
            let profile = read_profile(&input.risks, input.m)?;
            let p = read_distribution(&prior, &profile)?;
            let config = solver.config();
            let res = if prefix {
                prefix_search(phi, &profile, &p, input.delta, &config, solver.policy)?.result
            } else if phi == DistanceKind::Lin {
                optimal_posterior_linear(&profile, &p, input.delta)?
            } else {
                fp_solve(phi, &profile, &p, input.delta, &config, solver.policy)?
            };
            let policy = if phi == DistanceKind::Lin {
                ConstantPolicy::ExactLogspace
            } else {
                solver.policy
            };
            let json = ResultJson::new(&res, &profile, policy, input.delta, solver.seed);
            emit(&json, out.as_deref())?;
            if res.converged {
                Ok(EXIT_OK)
            } else {
                eprintln!(
                    "warning: no convergence after {} iterations (residual {:e})",
                    res.iterations, res.residual
                );
                Ok(EXIT_NOT_CONVERGED)
            }
        }
        Command::Compare {
            input,
            solver,
            table,
            out,
        } => {
            let profile = read_profile(&input.risks, input.m)?;
            let report = compare_all(&profile, input.delta, &solver.config(), solver.policy)?;
            emit(&report, out.as_deref())?;
            if table {
                eprint!("{}", render_table(&report));
            }
            let all_converged = report.rows.iter().all(|r| r.converged != Some(false));
            Ok(if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }
        Command::Gen {
            h,
            v,
            shape,
            seed,
            test_size,
            out,
        } => {
            let spec = GeneratorSpec {
                h,
                v,
                shape,
                seed,
                test_size,
            };
            let profile = generate_profile(&spec)?;
            let text = write_profile_csv(&profile, &spec)?;
            write_output(text.as_bytes(), out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

/// Result document of `optimize`.
#[derive(Debug, Serialize)]
pub struct ResultJson {
    pub phi: DistanceKind,
    pub bound: f64,
    pub gibbs_emp_risk: f64,
    pub gibbs_test_error: Option<f64>,
    pub posterior: Vec<f64>,
    pub support_size: usize,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub hhi: f64,
    pub log_ik: f64,
    pub constant_policy: ConstantPolicy,
    pub delta: f64,
    pub m: u64,
    pub seed: Option<u64>,
}

impl ResultJson {
    pub fn new(
        res: &PosteriorResult,
        profile: &RiskProfile,
        policy: ConstantPolicy,
        delta: f64,
        seed: Option<u64>,
    ) -> Self {
        ResultJson {
            phi: res.kind,
            bound: res.bound.value,
            gibbs_emp_risk: res.bound.gibbs_emp_risk,
            gibbs_test_error: gibbs_test_error(&res.posterior, profile).ok(),
            posterior: res.posterior.weights(),
            support_size: res.support_size,
            iterations: res.iterations,
            residual: res.residual,
            converged: res.converged,
            hhi: hhi(&res.posterior),
            log_ik: res.bound.log_ik,
            constant_policy: policy,
            delta,
            m: profile.sample_size(),
            seed,
        }
    }
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
}

#[derive(Default)]
struct PreciseFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    write_output(to_json(value)?.as_bytes(), out)
}

fn write_output(bytes: &[u8], out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout().write_all(bytes).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Value of the last `# sample_size=<m>` comment, if any.
fn sample_size_comment(text: &str) -> CliResult<Option<u64>> {
    let mut found = None;
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix('#') else {
            continue;
        };
        if let Some(value) = rest.trim().strip_prefix("sample_size=") {
            let m = value
                .trim()
                .parse::<u64>()
                .map_err(|_| CliError::Data(format!("bad sample_size comment '{}'", line.trim())))?;
            found = Some(m);
        }
    }
    Ok(found)
}

fn parse_cell<T: std::str::FromStr>(raw: &str, column: &str, row: usize) -> CliResult<Option<T>> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<T>()
        .map(Some)
        .map_err(|_| CliError::Data(format!("row {row}: cannot parse {column} value '{raw}'")))
}

/// Parses a risk-profile CSV; `m_flag` is the `--m` value.
pub fn parse_profile(text: &str, m_flag: Option<u64>) -> CliResult<RiskProfile> {
    let m = match (sample_size_comment(text)?, m_flag) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Data(format!(
                "sample size {a} in the file disagrees with --m {b}"
            )))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(CliError::Data(
                "sample size missing: pass --m or add '# sample_size=<m>'".into(),
            ))
        }
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let risk_col = col("emp_risk").ok_or_else(|| CliError::Data("missing 'emp_risk' column".into()))?;
    let (id_col, param_col, test_col) = (col("index"), col("param"), col("test_err"));

    let mut entries = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let cell = |c: Option<usize>| c.and_then(|c| record.get(c)).unwrap_or("");
        let id = parse_cell::<i64>(cell(id_col), "index", row)?.unwrap_or(row as i64);
        let emp_risk = parse_cell::<f64>(cell(Some(risk_col)), "emp_risk", row)?
            .ok_or_else(|| CliError::Data(format!("row {row}: empty emp_risk")))?;
        entries.push(ClassifierEntry {
            id,
            param_value: parse_cell(cell(param_col), "param", row)?,
            emp_risk,
            test_err: parse_cell(cell(test_col), "test_err", row)?,
        });
    }
    Ok(RiskProfile::new(entries, m)?)
}

pub fn read_profile(path: &Path, m_flag: Option<u64>) -> CliResult<RiskProfile> {
    parse_profile(&read_text(path)?, m_flag)
}

/// Parses an `index,weight` CSV; rows are matched to profile entries by id.
pub fn parse_weights(text: &str, profile: &RiskProfile) -> CliResult<DiscreteDistribution> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let w_col = col("weight").ok_or_else(|| CliError::Data("missing 'weight' column".into()))?;
    let id_col = col("index");
    let ids: Vec<i64> = profile.entries().iter().map(|e| e.id).collect();
    let mut weights = vec![None; ids.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let w = parse_cell::<f64>(record.get(w_col).unwrap_or(""), "weight", row)?
            .ok_or_else(|| CliError::Data(format!("row {row}: empty weight")))?;
        let pos = match id_col {
            Some(c) => {
                let id = parse_cell::<i64>(record.get(c).unwrap_or(""), "index", row)?
                    .ok_or_else(|| CliError::Data(format!("row {row}: empty index")))?;
                ids.iter()
                    .position(|&x| x == id)
                    .ok_or_else(|| CliError::Data(format!("row {row}: index {id} not in the profile")))?
            }
            None => row,
        };
        if pos >= weights.len() {
            return Err(CliError::Data(format!("more weights than classifiers ({})", ids.len())));
        }
        if weights[pos].replace(w).is_some() {
            return Err(CliError::Data(format!("row {row}: duplicate weight for entry {}", ids[pos])));
        }
    }
    let weights: Vec<f64> = weights
        .into_iter()
        .enumerate()
        .map(|(i, w)| w.ok_or_else(|| CliError::Data(format!("no weight for entry {}", ids[i]))))
        .collect::<CliResult<_>>()?;
    Ok(DiscreteDistribution::from_weights(&weights)?)
}

fn read_distribution(arg: &str, profile: &RiskProfile) -> CliResult<DiscreteDistribution> {
    if arg == "uniform" {
        Ok(DiscreteDistribution::uniform(profile.len())?)
    } else {
        parse_weights(&read_text(Path::new(arg))?, profile)
    }
}

/// CSV text for a generated profile, with the sample size and generator
/// recorded as comment lines.
pub fn write_profile_csv(profile: &RiskProfile, spec: &GeneratorSpec) -> CliResult<String> {
    let mut text = format!(
        "# sample_size={}\n# generator={} shape={} seed={} h={} test_size={}\n",
        profile.sample_size(),
        RNG_ALGORITHM,
        spec.shape,
        spec.seed,
        spec.h,
        spec.test_size.map_or_else(|| "none".to_string(), |t| t.to_string()),
    );
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["index", "param", "emp_risk", "test_err"])?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    for e in profile.entries() {
        writer.write_record([e.id.to_string(), opt(e.param_value), e.emp_risk.to_string(), opt(e.test_err)])?;
    }
    let body = writer.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    text.push_str(&String::from_utf8(body).expect("csv writer emits utf-8"));
    Ok(text)
}

fn render_table(report: &crate::harness::ComparisonReport) -> String {
    let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.5}"));
    let mut s = format!(
        "{:<8} {:>9} {:>9} {:>9} {:>8} {:>8} {:>6} {:>9}\n",
        "phi", "bound", "emp", "test", "hhi", "support", "iters", "secs"
    );
    for r in &report.rows {
        match &r.error {
            Some(e) => s.push_str(&format!("{:<8} error: {e}\n", r.kind)),
            None => s.push_str(&format!(
                "{:<8} {:>9} {:>9} {:>9} {:>8} {:>8} {:>6} {:>9.4}\n",
                r.kind,
                fmt(r.bound),
                fmt(r.gibbs_emp_risk),
                fmt(r.gibbs_test_error),
                fmt(r.hhi),
                r.support_size.map_or_else(|| "-".into(), |v| v.to_string()),
                r.iterations.map_or_else(|| "-".into(), |v| v.to_string()),
                r.wall_time_secs
            )),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROFILE: &str = "# sample_size=10\nindex,param,emp_risk,test_err\n0,0.1,0.1,\n1,,0.2,0.25\n";

    #[test]
    fn parses_profile_with_comment() {
        let p = parse_profile(PROFILE, None).unwrap();
        assert_eq!(p.sample_size(), 10);
        assert_eq!(p.risks(), vec![0.1, 0.2]);
        assert_eq!(p.entries()[0].test_err, None);
        assert_eq!(p.entries()[1].param_value, None);
        assert_eq!(parse_profile(PROFILE, Some(10)).unwrap(), p);
    }

    #[test]
    fn sample_size_conflicts_are_data_errors() {
        let err = parse_profile(PROFILE, Some(11)).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_DATA);
        let bare = "index,emp_risk\n0,0.1\n";
        assert!(parse_profile(bare, None).is_err());
        assert_eq!(parse_profile(bare, Some(5)).unwrap().sample_size(), 5);
    }

    #[test]
    fn bad_risk_is_rejected() {
        let text = "# sample_size=10\nindex,emp_risk\n0,1.5\n";
        assert!(matches!(parse_profile(text, None), Err(CliError::Library(_))));
    }

    #[test]
    fn weights_match_by_index() {
        let p = parse_profile(PROFILE, None).unwrap();
        let q = parse_weights("index,weight\n1,3\n0,1\n", &p).unwrap();
        let w = q.weights();
        assert!((w[0] - 0.25).abs() < 1e-15 && (w[1] - 0.75).abs() < 1e-15);
        assert!(parse_weights("index,weight\n0,1\n", &p).is_err());
        assert!(parse_weights("index,weight\n0,1\n0,1\n", &p).is_err());
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&vec![0.1f64, 1.0 / 3.0]).unwrap();
        assert!(s.contains("1.0000000000000001e-1"));
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 1.0 / 3.0]);
    }

    #[test]
    fn generated_csv_round_trips() {
        let spec = GeneratorSpec {
            h: 25,
            v: 137,
            shape: Shape::Noisy,
            seed: 4,
            test_size: Some(300),
        };
        let p = generate_profile(&spec).unwrap();
        let text = write_profile_csv(&p, &spec).unwrap();
        assert_eq!(parse_profile(&text, None).unwrap(), p);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["pacbayes", "constants", "--phi", "nope", "--m", "5"]), EXIT_USAGE);
        assert_eq!(run(["pacbayes"]), EXIT_USAGE);
    }
}
