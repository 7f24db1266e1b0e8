//! Numerical comparison of the enumeration formula with the Bender-Canfield-McKay,
//! Behrisch-Coja-Oghlan-Kang, Sato-Wormald and Karoński-Łuczak formulae.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{domain, Result};
use crate::numeric::bisect_increasing;
use crate::params::{psi_unchecked, solve_rho};

/// Evaluations of both sides of an identity along a grid of `rho` values tending to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSweep {
    pub name: String,
    pub rho: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `lhs - rhs` in extended precision where cancellation matters.
    pub diff: Vec<f64>,
}

impl LimitSweep {
    pub fn new(name: &str, rho: Vec<f64>, f: impl Fn(f64) -> (f64, f64, f64)) -> Result<Self> {
        if rho.windows(2).any(|w| w[1] >= w[0]) {
            return domain("sweep grid must be strictly decreasing");
        }
        if rho.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return domain("sweep grid must lie in (0, 1)");
        }
        let (mut lhs, mut rhs, mut diff) = (vec![], vec![], vec![]);
        for &x in &rho {
            let (a, b, d) = f(x);
            if !(a.is_finite() && b.is_finite() && d.is_finite()) {
                return Err(crate::Error::Numeric(format!("{name}: non-finite value at rho = {x}")));
            }
            lhs.push(a);
            rhs.push(b);
            diff.push(d);
        }
        Ok(LimitSweep {
            name: name.to_string(),
            rho,
            lhs,
            rhs,
            diff,
        })
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn max_abs_diff(&self) -> f64 {
        self.diff.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Relative error of the last (smallest `rho`) point.
    pub fn final_relative_error(&self) -> f64 {
        let i = self.len() - 1;
        (self.diff[i] / self.rhs[i]).abs()
    }

    /// `diff / rho^4` at each point.
    pub fn diff_over_rho4(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.diff).map(|(r, d)| d / r.powi(4)).collect()
    }

    /// Rows `rho,lhs,rhs,diff,diff_over_rho4`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "rho,lhs,rhs,diff,diff_over_rho4")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.rho[i],
                self.lhs[i],
                self.rhs[i],
                self.diff[i],
                self.diff[i] / self.rho[i].powi(4)
            )?;
        }
        Ok(())
    }
}

/// `points` log-spaced values from `hi` down to `lo`.
pub fn log_grid(hi: f64, lo: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![hi];
    }
    let (a, b) = (hi.ln(), lo.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn psi_dd(r: u32, rho: Dd) -> Dd {
    let q = Dd::ONE - rho;
    let rf = f64::from(r);
    let l = (-rho).ln_1p();
    (rf - 1.0) / rf * (-l / rho) * (Dd::ONE - q.powi(r)) / (Dd::ONE - q.powi(r - 1)) - 1.0
}

// Bender-Canfield-McKay, r = 2.

/// Root `y` in `(0, 1)` of `2xy = ln((1+y)/(1-y))` for `x > 1`.
pub fn bck_y(x: f64) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return domain(format!("x must exceed 1, got {x}"));
    }
    // g(y)/y = atanh(y)/y - x is increasing in y.
    let g = |y: f64| if y == 0.0 { 1.0 - x } else { y.atanh() / y - x };
    let mut hi = 0.5;
    while g(hi) < 0.0 {
        hi = 0.5 * (1.0 + hi);
    }
    Ok(bisect_increasing(g, 0.0, hi, 200))
}

/// `a(x) = x(x+1)(1-y) + ln(1-x+xy) - ln(1-x+xy^2)/2`, given `x - 1`.
pub fn bck_a(x_minus_1: f64, y: f64) -> f64 {
    let x = 1.0 + x_minus_1;
    x * (x + 1.0) * (1.0 - y) + (x * y - x_minus_1).ln() - 0.5 * (x * y * y - x_minus_1).ln()
}

/// `a(x)` along the curve `x = 1 + Psi_2(rho)`, `y = rho/(2 - rho)`.
pub fn bck_a_of_rho(rho: f64) -> f64 {
    bck_a(psi_unchecked(2, rho), rho / (2.0 - rho))
}

/// The limit of `a(x)` as `rho -> 0`.
pub fn bck_a_limit() -> f64 {
    2.0 + 0.5 * 1.5f64.ln()
}

/// Natural log of the Bender-Canfield-McKay estimate of the probability that a random
/// graph on `s` vertices with `s + t - 1` edges is connected.
pub fn bck_log_p2(s: u64, t: u64) -> Result<f64> {
    if t < 2 {
        return domain(format!("need t >= 2, got {t}"));
    }
    let m = s + t - 1;
    if s < 3 || m > s * (s - 1) / 2 - s {
        return domain(format!("need m <= C(s,2) - s, got s = {s}, m = {m}"));
    }
    let sf = s as f64;
    let x = m as f64 / sf;
    let y = bck_y(x)?;
    let xm1 = (t - 1) as f64 / sf;
    let per_vertex = 2f64.ln() - x + (1.0 - x) * y.ln() - 0.5 * (-y * y).ln_1p();
    Ok(bck_a(xm1, y) + sf * per_vertex)
}

// Behrisch-Coja-Oghlan-Kang.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcokVersion {
    Preprint,
    Published,
}

/// Average degree `zeta` as a function of `rho`, for edge size `d`.
pub fn bcok_zeta(d: u32, rho: f64) -> f64 {
    bcok_zeta_dd(d, Dd::new(rho)).to_f64()
}

fn bcok_zeta_dd(d: u32, rho: Dd) -> Dd {
    let q = Dd::ONE - rho;
    -(-rho).ln_1p() / rho * (Dd::ONE - q.powi(d)) / (Dd::ONE - q.powi(d - 1))
}

/// `ln(f_d e^{g_d})` at `rho`, with their `r` replaced by `1 - rho`.
pub fn bcok_log_fg(d: u32, version: BcokVersion, rho: f64) -> Result<f64> {
    if d < 2 {
        return domain(format!("edge size must be at least 2, got {d}"));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return domain(format!("rho must lie in (0, 1), got {rho}"));
    }
    let rho = Dd::new(rho);
    let z = bcok_zeta_dd(d, rho);
    let r = Dd::ONE - rho;
    let df = f64::from(d);
    if d == 2 {
        let one_r = Dd::ONE + r;
        let f = (one_r - z * r) / (one_r * one_r - z * r * 2.0).sqrt();
        let g = match version {
            BcokVersion::Published => z * r * (2.0 - r - r * r + z) / (one_r * 2.0),
            BcokVersion::Preprint => (z * r * 2.0 + z * z * r) / (one_r * 2.0),
        };
        return Ok((f.ln() + g).to_f64());
    }
    let rd = r.powi(d);
    let rd1 = r.powi(d - 1);
    let a = Dd::ONE - rd - rho * (df - 1.0) * z * rd1;
    let b = (Dd::ONE - rd + z * (df - 1.0) * (r - rd1)) * (Dd::ONE - rd)
        - z * df * r * (Dd::ONE - rd1) * (Dd::ONE - rd1);
    let g = match version {
        BcokVersion::Published => {
            (df - 1.0) * z * (r - r * r + rd1 - rd * 2.0 + r.powi(d + 2)) / ((Dd::ONE - rd) * 2.0)
        }
        BcokVersion::Preprint => z * (df - 1.0) * (r - rd * 2.0 + rd1) / ((Dd::ONE - rd) * 2.0),
    };
    Ok((a.ln() - b.ln() * 0.5 + g).to_f64())
}

/// Limit of `f_d e^{g_d}` as `rho -> 0` for each version.
pub fn bcok_target(d: u32, version: BcokVersion) -> f64 {
    let df = f64::from(d);
    let root = (1.5 * (df - 1.0)).sqrt();
    match (version, d) {
        (BcokVersion::Preprint, 2) => 2f64.exp() * root,
        (BcokVersion::Preprint, _) => (df / 2.0).exp() * root,
        (BcokVersion::Published, 2) => 1f64.exp() * root,
        (BcokVersion::Published, _) => root,
    }
}

/// The constant `c_r` of the enumeration formula.
pub fn enumeration_constant(r: u32) -> f64 {
    bcok_target(r, BcokVersion::Preprint)
}

/// Sweep of `f_d e^{g_d}` against [`bcok_target`].
pub fn bcok_limit(d: u32, version: BcokVersion, grid: &[f64]) -> Result<LimitSweep> {
    let target = bcok_target(d, version);
    for &rho in grid {
        bcok_log_fg(d, version, rho)?;
    }
    LimitSweep::new(&format!("bcok d={d} {version:?}"), grid.to_vec(), |rho| {
        let v = bcok_log_fg(d, version, rho).expect("validated").exp();
        (v, target, v - target)
    })
}

/// Natural log of the Behrisch-Coja-Oghlan-Kang estimate of `P_r(s, t)`.
pub fn bcok_log_p(r: u32, s: u64, t: u64, version: BcokVersion) -> Result<f64> {
    let inst = solve_rho(r, s, t)?;
    let rho = inst.rho;
    let gamma = inst.m as f64 / s as f64;
    let rf = f64::from(r);
    let l = (-rho).ln_1p();
    let ln_phi = (1.0 - rho) / rho * l + (1.0 - rf * gamma) * rho.ln() + gamma * (-(rf * l).exp_m1()).ln();
    Ok(bcok_log_fg(r, version, rho)? + s as f64 * ln_phi)
}

// Sato-Wormald, r = 3.

/// `phi~(n*)` of the Sato-Wormald formula as a function of `rho`.
pub fn sw_phi_tilde(rho: f64) -> f64 {
    let l = (-rho).ln_1p();
    let mu = -l;
    let q = 1.0 - rho;
    let x = 1.0 + 2.0 * l * q * q / (rho * (2.0 - rho));
    let rn = psi_unchecked(3, rho) / 2.0;
    let em = 1.0 / q;
    let ln2 = 2f64.ln();
    -(1.0 - x) / 2.0 * (1.0 - x).ln() + (1.0 - x) / 2.0 - (ln2 + 2.0) * rn - ln2 / 2.0 * x
        + rn * ((em + 1.0) / (mu * (em - 1.0))).ln()
        + 0.5 * x * ((em - 1.0) * (em + 1.0) / mu).ln()
        - 1.0
}

/// `ln psi` of the enumeration formula at `r = 3` as a function of `rho`.
pub fn sw_log_psi(rho: f64) -> f64 {
    let l = (-rho).ln_1p();
    let g = (1.0 + psi_unchecked(3, rho)) / 2.0;
    let inner = 1.0 + (-(3.0 * l).exp_m1()).ln() - 6f64.ln() - g.ln() - 3.0 * rho.ln();
    g * inner + rho.ln() + (1.0 - rho) / rho * l
}

/// `mu` solving `mu (e^{2mu}+e^mu+1)/((e^mu-1)(e^mu+1)) = 3m/s`, namely `-ln(1-rho)`.
pub fn sw_mu(rho: f64) -> f64 {
    -(-rho).ln_1p()
}

pub fn sw_identity(grid: &[f64]) -> Result<LimitSweep> {
    LimitSweep::new("sato-wormald", grid.to_vec(), |rho| {
        let a = sw_phi_tilde(rho);
        let b = sw_log_psi(rho);
        (a, b, a - b)
    })
}

// Karoński-Łuczak.

/// Per-vertex log difference between the two sides of the comparison with the
/// Karoński-Łuczak formula, with `k/s = Psi_r(rho)`.
pub fn kl_difference(r: u32, rho: f64) -> f64 {
    kl_sides(r, rho).2
}

fn kl_sides(r: u32, rho: f64) -> (f64, f64, f64) {
    let rho = Dd::new(rho);
    let rf = f64::from(r);
    let kappa = psi_dd(r, rho);
    let l = (-rho).ln_1p();
    let q = Dd::ONE - rho;
    let f = (Dd::ONE - q.powi(r)) / (rho * rf);
    let tau = rho * ((rf - 1.0) / (kappa * 12.0)).sqrt();
    let lhs = (2.0 - rf) + kappa * ((rf - 1.0) / 2.0);
    let rhs = (Dd::ONE + kappa) * (Dd::ONE + f.ln() - kappa.ln_1p())
        + q / rho * l * (rf - 1.0)
        - kappa * tau.ln() * (rf - 1.0);
    (lhs.to_f64(), rhs.to_f64(), (lhs - rhs).to_f64())
}

pub fn kl_discrepancy(r: u32, grid: &[f64]) -> Result<LimitSweep> {
    if r < 2 {
        return domain(format!("r must be at least 2, got {r}"));
    }
    LimitSweep::new(&format!("karonski-luczak r={r}"), grid.to_vec(), |rho| kl_sides(r, rho))
}

/// Max over min of `|diff| / rho^4` on the points with `lo <= rho <= hi`.
pub fn rho4_spread(sweep: &LimitSweep, lo: f64, hi: f64) -> f64 {
    let v: Vec<f64> = sweep
        .rho
        .iter()
        .zip(sweep.diff_over_rho4())
        .filter(|(r, _)| **r >= lo && **r <= hi)
        .map(|(_, d)| d.abs())
        .collect();
    let max = v.iter().copied().fold(0.0, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}
