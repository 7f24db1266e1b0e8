//! Monte Carlo batches of `H^r(n, p)` and their comparison with the
//! predicted moments, local limit, tree counts and component counts.

use std::ops::RangeInclusive;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::asymptotics::{density_f_rect_mass, GaussianLlt};
use crate::error::{domain, Error, Result};
use crate::logreal::LogReal;
use crate::numeric::{compensated_sum, ln_big, ln_binomial, KahanSum};
use crate::params::{rho_profile_eps, sigmas, ModelParams};
use crate::simulate::{components, core, extended_core, mark, sample};
use crate::exact::{edge_slots, partition_count};

/// Fixed statistical thresholds.
pub mod thresholds {
    /// Minimum p-value of the local-limit histogram test.
    pub const HISTOGRAM_P_VALUE: f64 = 1e-3;
    /// Cells with smaller expected count are pooled with the mass outside the grid.
    pub const MIN_EXPECTED_COUNT: f64 = 5.0;
    /// Number of standard errors allowed between a Monte Carlo mean and an exact expectation.
    pub const STANDARD_ERRORS: f64 = 3.0;
    /// Minimum trials for a moment report not to be flagged.
    pub const MOMENT_TRIALS: usize = 1000;
    /// Minimum `eps^3 n` for a moment report not to be flagged.
    pub const MOMENT_EPS3N: f64 = 100.0;
    /// Minimum trials for the histogram test.
    pub const HISTOGRAM_TRIALS: usize = 10_000;
    /// Residual complex components are flagged above this multiple of `1/(eps^3 n)`.
    pub const RARE_EVENT_FACTOR: f64 = 10.0;
    /// Residual connected pairs are flagged above this multiple of `n/eps`.
    pub const RESIDUAL_PAIRS_FACTOR: f64 = 20.0;
    /// Histogram grid: cells per axis, half-width in standard deviations.
    pub const GRID_CELLS: usize = 12;
    pub const GRID_HALF_WIDTH: f64 = 3.0;
    /// Accepted range of the empirical correlation of `L1` and `N1`.
    pub const CORRELATION_BAND: (f64, f64) = (0.72, 0.83);
}

use thresholds::*;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub params: ModelParams,
    pub trials: usize,
    pub seed: u64,
    /// Vertex marking probability for the extended core; `eps^2` when absent.
    pub mark_prob: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub l1: u64,
    pub m1: u64,
    pub n1: u64,
    pub l2: u64,
    pub core_size: u64,
    pub excore_size: u64,
    /// Components of nullity at least 2 outside the largest component.
    pub residual_complex: u32,
    /// Sum of squared orders of the components other than the largest.
    pub residual_pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub config: BatchConfig,
    pub records: Vec<TrialRecord>,
}

/// Runs one trial with its own ChaCha stream `trial` under `seed`.
pub fn run_trial(config: &BatchConfig, trial: u64) -> Result<TrialRecord> {
    let mp = &config.params;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    let h = sample(mp, &mut rng)?;
    let summary = components(&h);
    let mark_prob = config.mark_prob.unwrap_or((mp.eps * mp.eps).min(1.0));
    let marked = mark(&h, mark_prob, &mut rng)?;
    let rest = &summary.components[summary.components.len().min(1)..];
    Ok(TrialRecord {
        l1: summary.l1(),
        m1: summary.m1(),
        n1: summary.n1(),
        l2: summary.l2(),
        core_size: core(&h).order() as u64,
        excore_size: extended_core(&marked).order() as u64,
        residual_complex: rest.iter().filter(|c| c.nullity >= 2).count() as u32,
        residual_pairs: rest.iter().map(|c| c.order * c.order).sum(),
    })
}

/// Runs `config.trials` independent trials; the result depends only on the config.
pub fn run_batch(config: BatchConfig, threads: Option<usize>) -> Result<TrialBatch> {
    if config.trials == 0 {
        return domain("a batch needs at least one trial");
    }
    let work = || -> Result<Vec<TrialRecord>> {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(&config, t))
            .collect()
    };
    let records = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok(TrialBatch { config, records })
}

/// Prediction, observation and acceptance band for one quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub predicted: f64,
    pub observed: f64,
    pub standard_error: Option<f64>,
    pub band: (f64, f64),
    pub pass: bool,
}

impl Comparison {
    pub fn new(name: &str, predicted: f64, observed: f64, se: Option<f64>, band: (f64, f64)) -> Self {
        Comparison {
            name: name.to_string(),
            predicted,
            observed,
            standard_error: se,
            band,
            pass: observed >= band.0 && observed <= band.1,
        }
    }

    /// Band `predicted * (1 ± rel)`.
    pub fn relative(name: &str, predicted: f64, observed: f64, se: Option<f64>, rel: f64) -> Self {
        let half = predicted.abs() * rel;
        Self::new(name, predicted, observed, se, (predicted - half, predicted + half))
    }
}

/// Sample statistics of one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    pub variance: Option<f64>,
    pub mean_se: Option<f64>,
}

fn column_stats(xs: &[f64]) -> ColumnStats {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return ColumnStats {
            mean,
            variance: None,
            mean_se: None,
        };
    }
    let var = compensated_sum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0);
    ColumnStats {
        mean,
        variance: Some(var),
        mean_se: Some((var / n).sqrt()),
    }
}

fn correlation(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let sxx = compensated_sum(xs.iter().map(|x| (x - mx).powi(2)));
    let syy = compensated_sum(ys.iter().map(|y| (y - my).powi(2)));
    Some(sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub trials: usize,
    pub eps3n: f64,
    pub under_powered: bool,
    pub l1: ColumnStats,
    pub n1: ColumnStats,
    pub correlation: Option<f64>,
    pub predicted_mean_l1: f64,
    pub predicted_var_l1: f64,
    pub predicted_mean_n1: f64,
    pub predicted_var_n1: f64,
    pub predicted_correlation: f64,
}

pub fn moment_report(batch: &TrialBatch) -> Result<MomentReport> {
    let mp = &batch.config.params;
    let prof = rho_profile_eps(mp.r, mp.eps)?;
    let (sn, ss) = sigmas(mp)?;
    let l1: Vec<f64> = batch.records.iter().map(|r| r.l1 as f64).collect();
    let n1: Vec<f64> = batch.records.iter().map(|r| r.n1 as f64).collect();
    let n = mp.n as f64;
    Ok(MomentReport {
        trials: batch.records.len(),
        eps3n: mp.eps3n(),
        under_powered: batch.records.len() < MOMENT_TRIALS || mp.eps3n() < MOMENT_EPS3N,
        l1: column_stats(&l1),
        n1: column_stats(&n1),
        correlation: correlation(&l1, &n1),
        predicted_mean_l1: prof.rho * n,
        predicted_var_l1: sn * sn,
        predicted_mean_n1: prof.rho_star * n,
        predicted_var_n1: ss * ss,
        predicted_correlation: (0.6f64).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramCell {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramReport {
    pub cells: Vec<HistogramCell>,
    /// Trials falling outside the grid.
    pub outside: u64,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Cell with the largest predicted mass.
    pub mode_cell: usize,
    /// Its predicted count from summing the lattice point probabilities.
    pub mode_cell_lattice_expected: f64,
    pub mode_cell_ratio: f64,
    /// Kolmogorov-Smirnov distance of standardized `L1` from the normal law.
    pub l1_ks: f64,
}

/// Chi-square test of standardized `(L1, N1)` against the limiting bivariate normal.
pub fn llt_histogram_test(batch: &TrialBatch) -> Result<HistogramReport> {
    llt_histogram_shifted(batch, 0.0, 0.0)
}

/// As [`llt_histogram_test`] with the predicted centre moved by `(da, db)` standard deviations.
pub fn llt_histogram_shifted(batch: &TrialBatch, da: f64, db: f64) -> Result<HistogramReport> {
    let trials = batch.records.len();
    if trials < HISTOGRAM_TRIALS {
        return Err(Error::Insufficient(format!(
            "histogram test needs at least {HISTOGRAM_TRIALS} trials, got {trials}"
        )));
    }
    let mp = &batch.config.params;
    let g = GaussianLlt::new(mp)?;
    let shifted = GaussianLlt {
        mu_l: g.mu_l + da * g.sigma_n,
        mu_n: g.mu_n + db * g.sigma_star,
        ..g
    };
    let k = GRID_CELLS;
    let w = 2.0 * GRID_HALF_WIDTH / k as f64;
    let edge = |i: usize| -GRID_HALF_WIDTH + i as f64 * w;
    let mut observed = vec![0u64; k * k];
    let mut outside = 0u64;
    let mut zs = Vec::with_capacity(trials);
    for rec in &batch.records {
        let (a, b) = shifted.standardize(rec.l1 as f64, rec.n1 as f64);
        zs.push(a);
        let ia = ((a + GRID_HALF_WIDTH) / w).floor();
        let ib = ((b + GRID_HALF_WIDTH) / w).floor();
        if (0.0..k as f64).contains(&ia) && (0.0..k as f64).contains(&ib) {
            observed[ia as usize * k + ib as usize] += 1;
        } else {
            outside += 1;
        }
    }
    let n = trials as f64;
    let mut cells = Vec::with_capacity(k * k);
    for ia in 0..k {
        for ib in 0..k {
            let (a0, a1, b0, b1) = (edge(ia), edge(ia + 1), edge(ib), edge(ib + 1));
            cells.push(HistogramCell {
                a: (a0, a1),
                b: (b0, b1),
                observed: observed[ia * k + ib],
                expected: n * density_f_rect_mass(a0, a1, b0, b1),
            });
        }
    }
    let mut chi = KahanSum::new();
    let (mut pooled_obs, mut pooled_exp) = (outside as f64, n);
    let mut bins = 0usize;
    for c in &cells {
        pooled_exp -= c.expected;
        if c.expected >= MIN_EXPECTED_COUNT {
            chi.add((c.observed as f64 - c.expected).powi(2) / c.expected);
            bins += 1;
        } else {
            pooled_obs += c.observed as f64;
            pooled_exp += c.expected;
        }
    }
    if pooled_exp > 0.0 {
        chi.add((pooled_obs - pooled_exp).powi(2) / pooled_exp);
        bins += 1;
    }
    let dof = bins.saturating_sub(1).max(1);
    let chi_square = chi.value();
    let p_value = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Numeric(e.to_string()))?
        .sf(chi_square);

    let mode_cell = (0..cells.len())
        .max_by(|&i, &j| cells[i].expected.partial_cmp(&cells[j].expected).unwrap().then(j.cmp(&i)))
        .expect("grid is non-empty");
    let mc = &cells[mode_cell];
    let x0 = (shifted.mu_l + mc.a.0 * g.sigma_n).ceil() as i64;
    let x1 = (shifted.mu_l + mc.a.1 * g.sigma_n).ceil() as i64;
    let y0 = (shifted.mu_n + mc.b.0 * g.sigma_star).ceil() as i64;
    let y1 = (shifted.mu_n + mc.b.1 * g.sigma_star).ceil() as i64;
    let lattice: f64 = compensated_sum((y0.max(0)..y1).flat_map(|y| {
        (x0..x1)
            .filter(move |&x| shifted.on_lattice(x, y))
            .map(move |x| shifted.joint(x, y).prob)
    }));
    let mode_cell_lattice_expected = n * lattice;

    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let normal = statrs::distribution::Normal::new(0.0, 1.0).expect("standard normal");
    let l1_ks = zs
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let f = normal.cdf(z);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);

    Ok(HistogramReport {
        mode_cell_ratio: mc.observed as f64 / mode_cell_lattice_expected,
        cells,
        outside,
        chi_square,
        degrees_of_freedom: dof,
        p_value,
        mode_cell,
        mode_cell_lattice_expected,
        l1_ks,
    })
}

impl HistogramReport {
    /// Rows `a_lo,a_hi,b_lo,b_hi,observed,expected`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "a_lo,a_hi,b_lo,b_hi,observed,expected")?;
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{:.17e}",
                c.a.0, c.a.1, c.b.0, c.b.1, c.observed, c.expected
            )?;
        }
        Ok(())
    }
}

/// Expected number of tree components with `k` edges in `H^r(m, p)`.
pub fn expected_trees(r: u32, m: u64, p: f64, k: u64) -> Result<f64> {
    Ok(ln_expected_trees(r, m, p, k)?.exp())
}

pub fn ln_expected_trees(r: u32, m: u64, p: f64, k: u64) -> Result<f64> {
    if r < 2 {
        return domain(format!("r must be at least 2, got {r}"));
    }
    let rm1 = u64::from(r - 1);
    let order = k * rm1 + 1;
    if order > m {
        return domain(format!("a tree with {k} edges needs {order} > {m} vertices"));
    }
    if !(0.0..1.0).contains(&p) {
        return domain(format!("p must lie in [0, 1), got {p}"));
    }
    let ru = u64::from(r);
    // Potential edges meeting the vertex set, minus the k tree edges.
    let slots = ln_binomial(m, ru).exp() - ln_binomial(m - order, ru).exp();
    let slots = slots.round() - k as f64;
    let ln_trees = (k as f64 - 1.0) * (order as f64).ln() + ln_big(&partition_count(k, rm1)?);
    let ln_edges = if k == 0 { 0.0 } else { k as f64 * p.ln() };
    Ok(ln_binomial(m, order) + ln_trees + ln_edges + slots * (-p).ln_1p())
}

/// Comparison of the tree census of a batch of `H^r(m, p)` draws with the exact expectations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeCensusReport {
    pub comparisons: Vec<Comparison>,
    /// `(k+1)^{5/2} mu_k / m` for each `k`.
    pub scaled: Vec<f64>,
    pub scaled_spread: f64,
}

/// Draws `trials` copies of `H^r(m, p)` and compares the mean tree counts for `k` in `ks`.
pub fn tree_census_test(
    r: u32,
    m: u64,
    p: f64,
    ks: RangeInclusive<u64>,
    trials: usize,
    seed: u64,
) -> Result<TreeCensusReport> {
    let mp = ModelParams::from_p(r, m, p)?;
    let max_k = *ks.end();
    let counts: Vec<Vec<u64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let h = sample(&mp, &mut rng)?;
            let mut row = vec![0u64; max_k as usize + 1];
            for c in components(&h).components.iter().filter(|c| c.nullity == 0) {
                if c.size <= max_k {
                    row[c.size as usize] += 1;
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut comparisons = Vec::new();
    let mut scaled = Vec::new();
    for k in ks {
        let xs: Vec<f64> = counts.iter().map(|row| row[k as usize] as f64).collect();
        let st = column_stats(&xs);
        let mu = expected_trees(r, m, p, k)?;
        let se = st.mean_se.unwrap_or(f64::INFINITY);
        let half = STANDARD_ERRORS * se;
        comparisons.push(Comparison::new(&format!("T_{k}"), mu, st.mean, Some(se), (mu - half, mu + half)));
        scaled.push(((k + 1) as f64).powf(2.5) * mu / m as f64);
    }
    let hi = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TreeCensusReport {
        comparisons,
        scaled,
        scaled_spread: hi / lo,
    })
}

/// `ln E[N_{s,t}]`: expected number of components with `s` vertices and nullity `t`,
/// given `ln C_r(s, t)` and its edge count `m`.
pub fn expected_components(r: u32, n: u64, p: f64, s: u64, m: u64, log_c: LogReal) -> Result<LogReal> {
    if s == 0 || s > n {
        return domain(format!("component order {s} must lie in [1, {n}]"));
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p must lie in [0, 1], got {p}"));
    }
    if log_c.is_zero() {
        return Ok(LogReal::ZERO);
    }
    if p == 0.0 {
        return Ok(if m == 0 { LogReal::from_ln(ln_binomial(n, s) + log_c.ln()?) } else { LogReal::ZERO });
    }
    let slots = edge_slots(r, n) - edge_slots(r, n - s);
    let absent = slots - num_bigint::BigUint::from(m);
    let absent = ln_big(&absent).exp();
    let ln = ln_binomial(n, s) + log_c.ln()? + m as f64 * p.ln() + if p == 1.0 {
        if absent > 0.0 { f64::NEG_INFINITY } else { 0.0 }
    } else {
        absent * (-p).ln_1p()
    };
    Ok(LogReal::from_ln(ln))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RareEventReport {
    pub trials: usize,
    pub complex_residual_fraction: f64,
    pub multiple_complex_fraction: f64,
    pub predicted_scale: f64,
    pub complex_flag: bool,
    pub mean_residual_pairs: f64,
    pub residual_pairs_bound: f64,
    pub pairs_flag: bool,
    /// Fraction of trials with `L2 > 20 eps^-2 ln(eps^3 n)`.
    pub large_l2_fraction: f64,
}

pub fn rare_event_report(batch: &TrialBatch) -> RareEventReport {
    let mp = &batch.config.params;
    let n = batch.records.len() as f64;
    let frac = |f: &dyn Fn(&TrialRecord) -> bool| batch.records.iter().filter(|r| f(r)).count() as f64 / n;
    let eps3n = mp.eps3n();
    let scale = if eps3n > 0.0 { 1.0 / eps3n } else { f64::INFINITY };
    let complex = frac(&|r| r.residual_complex >= 1);
    let pairs = compensated_sum(batch.records.iter().map(|r| r.residual_pairs as f64)) / n;
    let bound = RESIDUAL_PAIRS_FACTOR * mp.n as f64 / mp.eps.abs();
    let l2_cut = 20.0 / (mp.eps * mp.eps) * eps3n.max(1.0).ln();
    RareEventReport {
        trials: batch.records.len(),
        complex_residual_fraction: complex,
        multiple_complex_fraction: frac(&|r| r.residual_complex >= 2),
        predicted_scale: scale,
        complex_flag: complex > RARE_EVENT_FACTOR * scale,
        mean_residual_pairs: pairs,
        residual_pairs_bound: bound,
        pairs_flag: pairs > bound,
        large_l2_fraction: frac(&|r| r.l2 as f64 > l2_cut),
    }
}

/// Everything the `verify` command reports for one batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: BatchConfig,
    pub moments: MomentReport,
    pub comparisons: Vec<Comparison>,
    pub histogram: Option<HistogramReport>,
    pub rare_events: RareEventReport,
}

/// Moment and histogram comparisons at the acceptance bands.
pub fn verify_report(batch: &TrialBatch) -> Result<VerifyReport> {
    let m = moment_report(batch)?;
    let mut comparisons = vec![
        Comparison::relative("mean L1", m.predicted_mean_l1, m.l1.mean, m.l1.mean_se, 0.02),
        Comparison::relative("mean N1", m.predicted_mean_n1, m.n1.mean, m.n1.mean_se, 0.10),
    ];
    if let Some(v) = m.l1.variance {
        comparisons.push(Comparison::relative("variance L1", m.predicted_var_l1, v, None, 0.20));
    }
    if let Some(c) = m.correlation {
        let rho = m.predicted_correlation;
        let band = (CORRELATION_BAND.0.max(rho - 0.06), CORRELATION_BAND.1.min(rho + 0.06));
        comparisons.push(Comparison::new("correlation", rho, c, None, band));
    }
    let histogram = if batch.records.len() >= HISTOGRAM_TRIALS {
        let h = llt_histogram_test(batch)?;
        comparisons.push(Comparison::new(
            "histogram p-value",
            HISTOGRAM_P_VALUE,
            h.p_value,
            None,
            (HISTOGRAM_P_VALUE, 1.0),
        ));
        comparisons.push(Comparison::new("mode cell ratio", 1.0, h.mode_cell_ratio, None, (0.8, 1.25)));
        Some(h)
    } else {
        None
    };
    Ok(VerifyReport {
        config: batch.config,
        moments: m,
        comparisons,
        histogram,
        rare_events: rare_event_report(batch),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(format!("json: {e}")))
}
