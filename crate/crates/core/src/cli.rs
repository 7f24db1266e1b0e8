//! The `hypergiant` command line.
//!
//! Exit codes: 0 success, 1 domain or I/O error, 2 usage error, 3 a check failed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use crate::asymptotics::{log_c, log_p};
use crate::crosscheck::{
    bcok_limit, bck_a_limit, bck_a_of_rho, bck_y, kl_discrepancy, log_grid, rho4_spread, sw_identity,
    BcokVersion, LimitSweep,
};
use crate::error::{Error, Result};
use crate::exact::{connected_count, connected_count_by_nullity, forest_count, ConnectedTable};
use crate::forests::{sample_forest, smoothing_pmf};
use crate::params::{solve_rho, ModelParams};
use crate::verify::{run_batch, to_json, verify_report, BatchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "hypergiant", version, about = "Connected hypergraph counts and giant components of H^r(n, p)")]
pub struct Cli {
    /// TOML file with one table per subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asymptotic log10 C_r(s,t) and P_r(s,t).
    Count(CountArgs),
    /// Exact connected counts.
    Exact(ExactArgs),
    /// Forest counts, samples and split pmfs.
    Forest(ForestArgs),
    /// Per-trial giant component statistics as CSV.
    Simulate(SimArgs),
    /// Monte Carlo check of the local limit, as a JSON report.
    Verify(VerifyArgs),
    /// Sweeps comparing against the other published formulae.
    Crosscheck(CrosscheckArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CountArgs {
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactArgs {
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub s: Option<u64>,
    /// Nullity.
    #[arg(long, conflicts_with = "m")]
    pub t: Option<u64>,
    /// Number of edges.
    #[arg(long)]
    pub m: Option<u64>,
    /// Write the whole table up to `--s` and `--t` as CSV instead.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub table: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestArgs {
    /// One of `count`, `sample`, `pmf`.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Number of roots.
    #[arg(long)]
    pub a: Option<u64>,
    /// Number of edges (count, sample).
    #[arg(long)]
    pub k: Option<u64>,
    /// Total edges to split (pmf).
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelArgs {
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; the default is all cores.
    #[arg(long, env = "HYPERGIANT_THREADS")]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Vertex marking probability for the extended core (default eps^2).
    #[arg(long)]
    pub mark_prob: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SimArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Also write the standardized histogram as CSV.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CrosscheckArgs {
    /// Directory for the sweep CSVs.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Grid points per sweep.
    #[arg(long)]
    pub points: Option<usize>,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

enum Failure {
    Usage(String),
    Run(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Flags win over the `[name]` table of the config file.
fn merge<T: Serialize + DeserializeOwned>(flags: T, config: Option<&toml::Table>, name: &str) -> CliResult<T> {
    let Some(table) = config.and_then(|c| c.get(name)) else {
        return Ok(flags);
    };
    let mut base = serde_json::to_value(table).map_err(|e| usage(format!("config [{name}]: {e}")))?;
    let over = serde_json::to_value(&flags).map_err(|e| usage(e.to_string()))?;
    if let (Value::Object(b), Value::Object(o)) = (&mut base, over) {
        for (k, v) in o {
            if !v.is_null() {
                b.insert(k, v);
            }
        }
    }
    serde_json::from_value(base).map_err(|e| usage(format!("config [{name}]: {e}")))
}

fn need<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("missing --{flag}")))
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn open_out<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> CliResult<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

impl ModelArgs {
    fn params(&self) -> CliResult<ModelParams> {
        let r = need(self.r, "r")?;
        let n = need(self.n, "n")?;
        match (self.eps, self.lambda, self.p) {
            (Some(e), None, None) => Ok(ModelParams::from_eps(r, n, e)?),
            (None, Some(l), None) => Ok(ModelParams::from_lambda(r, n, l)?),
            (None, None, Some(p)) => Ok(ModelParams::from_p(r, n, p)?),
            _ => Err(usage("give exactly one of --eps, --lambda, --p")),
        }
    }

    fn batch(&self) -> CliResult<BatchConfig> {
        Ok(BatchConfig {
            params: self.params()?,
            trials: need(self.trials, "trials")?,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            mark_prob: self.mark_prob,
        })
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "usage error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
        Err(Failure::Check(m)) => {
            let _ = writeln!(stderr, "check failed: {m}");
            EXIT_CHECK_FAILED
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let config = match &cli.config {
        Some(p) => Some(read_config(p)?),
        None => None,
    };
    let cfg = config.as_ref();
    match cli.command {
        Command::Count(a) => count(merge(a, cfg, "count")?, stdout),
        Command::Exact(a) => exact(merge(a, cfg, "exact")?, stdout),
        Command::Forest(a) => forest(merge(a, cfg, "forest")?, stdout),
        Command::Simulate(a) => simulate(merge(a, cfg, "simulate")?, stdout),
        Command::Verify(a) => verify(merge(a, cfg, "verify")?, stdout),
        Command::Crosscheck(a) => crosscheck(merge(a, cfg, "crosscheck")?, stdout),
    }
}

fn read_config(path: &Path) -> CliResult<toml::Table> {
    let text = std::fs::read_to_string(path)?;
    text.parse::<toml::Table>()
        .map_err(|e| usage(format!("config {}: {e}", path.display())))
}

fn count(a: CountArgs, out: &mut dyn Write) -> CliResult<()> {
    let inst = solve_rho(need(a.r, "r")?, need(a.s, "s")?, need(a.t, "t")?)?;
    writeln!(out, "r {}", inst.r)?;
    writeln!(out, "s {}", inst.s)?;
    writeln!(out, "t {}", inst.t)?;
    writeln!(out, "m {}", inst.m)?;
    writeln!(out, "rho {}", fmt17(inst.rho))?;
    writeln!(out, "log10_C {}", fmt17(log_c(&inst).log10()?))?;
    writeln!(out, "log10_P {}", fmt17(log_p(&inst).log10()?))?;
    Ok(())
}

fn exact(a: ExactArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let r = need(a.r, "r")?;
    let s = need(a.s, "s")?;
    let mut out = open_out(&a.out, stdout)?;
    if a.table.unwrap_or(false) {
        let t = need(a.t, "t")?;
        ConnectedTable::build(r, s, t)?.write_csv(&mut out)?;
    } else {
        let count = match (a.t, a.m) {
            (Some(t), None) => connected_count_by_nullity(r, s, t)?,
            (None, Some(m)) => connected_count(r, s, m)?,
            _ => return Err(usage("give exactly one of --t, --m")),
        };
        writeln!(out, "{count}")?;
    }
    out.flush()?;
    Ok(())
}

fn forest(a: ForestArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let r = need(a.r, "r")?;
    let mode = a.mode.clone().unwrap_or_else(|| "count".to_string());
    let mut out = open_out(&a.out, stdout)?;
    match mode.as_str() {
        "count" => writeln!(out, "{}", forest_count(r, need(a.a, "a")?, need(a.k, "k")?)?)?,
        "pmf" => smoothing_pmf(r, need(a.m, "m")?, need(a.a, "a")?)?.write_csv(&mut out)?,
        "sample" => {
            let roots = need(a.a, "a")?;
            let k = need(a.k, "k")?;
            let n = roots + u64::from(r - 1) * k;
            let n = u32::try_from(n).map_err(|_| Error::Domain(format!("{n} vertices is too many")))?;
            let root_ids: Vec<u32> = (0..roots as u32).collect();
            let others: Vec<u32> = (roots as u32..n).collect();
            let seed = a.seed.unwrap_or(DEFAULT_SEED);
            writeln!(out, "sample,edge")?;
            for i in 0..a.samples.unwrap_or(1) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let f = sample_forest(r, &root_ids, &others, &mut rng)?;
                for e in &f.edges {
                    let vs: Vec<String> = e.iter().map(u32::to_string).collect();
                    writeln!(out, "{i},{}", vs.join(" "))?;
                }
            }
        }
        other => return Err(usage(format!("unknown forest mode {other:?}; use count, sample or pmf"))),
    }
    out.flush()?;
    Ok(())
}

fn simulate(a: SimArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let batch = run_batch(a.model.batch()?, a.model.threads)?;
    let mut out = open_out(&a.model.out, stdout)?;
    writeln!(out, "L1,M1,N1,L2,core_size,excore_size")?;
    for r in &batch.records {
        writeln!(out, "{},{},{},{},{},{}", r.l1, r.m1, r.n1, r.l2, r.core_size, r.excore_size)?;
    }
    out.flush()?;
    Ok(())
}

fn verify(a: VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let batch = run_batch(a.model.batch()?, a.model.threads)?;
    let report = verify_report(&batch)?;
    let mut out = open_out(&a.model.out, stdout)?;
    writeln!(out, "{}", to_json(&report)?)?;
    out.flush()?;
    if let (Some(path), Some(h)) = (&a.histogram, &report.histogram) {
        h.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let failed: Vec<&str> = report.comparisons.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.join(", ")))
    }
}

/// One line of the crosscheck summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckLine {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Exact identities fail the command; limits are reported only.
    pub identity: bool,
}

/// All crosscheck sweeps and their summary lines.
pub fn crosscheck_all(points: usize) -> Result<(Vec<LimitSweep>, Vec<CrosscheckLine>)> {
    let mut sweeps = Vec::new();
    let mut lines = Vec::new();
    let line = |name: String, value: f64, tolerance: f64, identity: bool| CrosscheckLine {
        pass: value.abs() < tolerance,
        name,
        value,
        tolerance,
        identity,
    };

    let grid = log_grid(0.5, 1e-4, points);
    let bck = LimitSweep::new("bck a(x)", grid.clone(), |rho| {
        let a = bck_a_of_rho(rho);
        (a, bck_a_limit(), a - bck_a_limit())
    })?;
    lines.push(line("bck a(x) at rho=1e-4".into(), bck_a_of_rho(1e-4) - bck_a_limit(), 1e-4, false));
    let y_err = grid
        .iter()
        .map(|&rho| {
            let x = 1.0 + crate::params::psi_r(2, rho)?;
            Ok((bck_y(x)? - rho / (2.0 - rho)).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    lines.push(line("bck y = rho/(2-rho)".into(), y_err, 1e-10, true));
    sweeps.push(bck);

    for d in 2..=5u32 {
        for v in [BcokVersion::Preprint, BcokVersion::Published] {
            let s = bcok_limit(d, v, &log_grid(0.1, 1e-3, points))?;
            lines.push(line(format!("{} at rho=1e-3", s.name), s.final_relative_error(), 1e-2, false));
            sweeps.push(s);
        }
    }

    let sw_grid: Vec<f64> = (1..=50).rev().map(|i| 0.01 * f64::from(i)).collect();
    let sw = sw_identity(&sw_grid)?;
    lines.push(line("sato-wormald identity".into(), sw.max_abs_diff(), 1e-9, true));
    sweeps.push(sw);

    for r in 2..=4u32 {
        let s = kl_discrepancy(r, &log_grid(0.1, 1e-4, points))?;
        let spread = rho4_spread(&s, 1e-3, 1e-2);
        lines.push(line(format!("{} rho^4 spread - 1", s.name), spread - 1.0, 2.0, false));
        sweeps.push(s);
    }
    Ok((sweeps, lines))
}

fn crosscheck(a: CrosscheckArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let (sweeps, lines) = crosscheck_all(a.points.unwrap_or(31).max(2))?;
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir)?;
        for s in &sweeps {
            let file: String = s
                .name
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
                .collect();
            s.write_csv(BufWriter::new(File::create(dir.join(format!("{file}.csv")))?))?;
        }
    }
    for l in &lines {
        writeln!(
            stdout,
            "{} {} {} (tolerance {})",
            if l.pass { "PASS" } else { "FAIL" },
            l.name,
            fmt17(l.value),
            l.tolerance
        )?;
    }
    let broken: Vec<&str> = lines.iter().filter(|l| l.identity && !l.pass).map(|l| l.name.as_str()).collect();
    if broken.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(broken.join(", ")))
    }
}
