//! Log-space evaluation of the asymptotic counts `C_r(s,t)` and `P_r(s,t)`,
//! and of the Gaussian local-limit point probabilities for the order and
//! nullity of the giant component.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{domain, Result};
use crate::logreal::LogReal;
use crate::numeric::{integrate, ln_factorial, KahanSum};
use crate::params::{rho_profile_eps, sigmas, EnumerationInstance, ModelParams};

/// Correlation of the limiting standardized `(L1, N1)`.
pub fn llt_correlation() -> f64 {
    (3.0f64 / 5.0).sqrt()
}

/// `ln(1 - (1-rho)^r)`.
fn ln_one_minus_pow(r: u32, rho: f64) -> f64 {
    (-(f64::from(r) * (-rho).ln_1p()).exp_m1()).ln()
}

/// `ln(rho (1-rho)^{(1-rho)/rho})`, the per-vertex factor shared by both formulas.
fn ln_vertex_factor(rho: f64) -> f64 {
    if rho >= 1.0 {
        return 0.0;
    }
    rho.ln() + (1.0 - rho) / rho * (-rho).ln_1p()
}

/// Natural log of the asymptotic number of connected r-uniform hypergraphs
/// on `s` labelled vertices with nullity `t`.
pub fn log_c(inst: &EnumerationInstance) -> LogReal {
    let r = inst.r;
    let rf = f64::from(r);
    let (s, m, rho) = (inst.s as f64, inst.m as f64, inst.rho);
    let per_edge = [
        1.0,
        ln_one_minus_pow(r, rho),
        rf * s.ln(),
        -m.ln(),
        -ln_factorial(u64::from(r)),
        -rf * rho.ln(),
    ];
    let mut acc = KahanSum::new();
    acc.add(0.5 * 3f64.ln() - 2f64.ln() - 0.5 * PI.ln());
    acc.add((rf - 1.0).ln());
    acc.add(-0.5 * s.ln());
    for term in per_edge {
        acc.add(m * term);
    }
    acc.add(s * ln_vertex_factor(rho));
    LogReal::from_ln(acc.value())
}

/// Natural log of the asymptotic probability that a uniformly random
/// `m`-edge r-uniform hypergraph on `s` vertices is connected.
///
/// This is an asymptotic formula; at small `s` its value can exceed 1.
pub fn log_p(inst: &EnumerationInstance) -> LogReal {
    let r = inst.r;
    let rf = f64::from(r);
    let (s, m, rho) = (inst.s as f64, inst.m as f64, inst.rho);
    let indicator = if r == 2 { 1.0 } else { 0.0 };
    let mut acc = KahanSum::new();
    acc.add(rf / 2.0 + indicator);
    acc.add(0.5 * (3.0 * (rf - 1.0) / 2.0).ln());
    acc.add(m * ln_one_minus_pow(r, rho));
    acc.add(-m * rf * rho.ln());
    acc.add(s * ln_vertex_factor(rho));
    LogReal::from_ln(acc.value())
}

/// Standard bivariate Gaussian density with unit variances and correlation `sqrt(3/5)`.
pub fn density_f(a: f64, b: f64) -> f64 {
    let q = a * a - 2.0 * llt_correlation() * a * b + b * b;
    (-1.25 * q).exp() / (2.0 * PI * (2.0f64 / 5.0).sqrt())
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Mass of [`density_f`] over the rectangle `[a0,a1] x [b0,b1]` (infinite bounds allowed).
pub fn density_f_rect_mass(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    let c = llt_correlation();
    let s = (1.0 - c * c).sqrt();
    // Integrate over a of phi(a) P(b0 < B < b1 | A = a), truncating infinite ranges at 12 sd.
    let lo = a0.max(-12.0);
    let hi = a1.min(12.0);
    if lo >= hi {
        return 0.0;
    }
    let inner = |a: f64| {
        let upper = if b1.is_finite() { std_normal_cdf((b1 - c * a) / s) } else { 1.0 };
        let lower = if b0.is_finite() { std_normal_cdf((b0 - c * a) / s) } else { 0.0 };
        std_normal_pdf(a) * (upper - lower)
    };
    // Split long ranges so the fixed-order rule stays accurate.
    let pieces = ((hi - lo) / 0.5).ceil().max(1.0) as usize;
    let width = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|i| integrate(inner, lo + i as f64 * width, lo + (i + 1) as f64 * width, 24))
        .sum()
}

/// Point probability returned by [`GaussianLlt::joint`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LltPoint {
    pub prob: f64,
    /// `x + y ≡ 1 (mod r-1)`; off-lattice points have probability zero in the model.
    pub on_lattice: bool,
    /// `eps <= 0.5` and `eps^3 n >= 10`.
    pub in_regime: bool,
}

/// Gaussian local-limit approximation for `(L1, N1)` in `H^r(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianLlt {
    pub r: u32,
    pub n: u64,
    pub eps: f64,
    /// `rho_{r,lambda} n`
    pub mu_l: f64,
    /// `rho*_{r,lambda} n`
    pub mu_n: f64,
    pub sigma_n: f64,
    pub sigma_star: f64,
    pub correlation: f64,
}

impl GaussianLlt {
    pub fn new(mp: &ModelParams) -> Result<Self> {
        if !(mp.eps > 0.0) {
            return domain(format!("local limit needs eps > 0, got {}", mp.eps));
        }
        let prof = rho_profile_eps(mp.r, mp.eps)?;
        let (sigma_n, sigma_star) = sigmas(mp)?;
        let n = mp.n as f64;
        Ok(GaussianLlt {
            r: mp.r,
            n: mp.n,
            eps: mp.eps,
            mu_l: prof.rho * n,
            mu_n: prof.rho_star * n,
            sigma_n,
            sigma_star,
            correlation: llt_correlation(),
        })
    }

    pub fn in_regime(&self) -> bool {
        self.eps <= 0.5 && self.eps.powi(3) * self.n as f64 >= 10.0
    }

    pub fn on_lattice(&self, x: i64, y: i64) -> bool {
        let k = i64::from(self.r) - 1;
        (x + y - 1).rem_euclid(k) == 0
    }

    pub fn standardize(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.mu_l) / self.sigma_n, (y - self.mu_n) / self.sigma_star)
    }

    /// `P(L1 = x, N1 = y)`, including the `(r-1)` lattice-spacing factor.
    pub fn joint(&self, x: i64, y: i64) -> LltPoint {
        let (a, b) = self.standardize(x as f64, y as f64);
        let rm1 = f64::from(self.r - 1);
        let q = a * a - 2.0 * self.correlation * a * b + b * b;
        let prob = 6f64.sqrt() / (8.0 * PI) * rm1 * rm1 / (self.eps * self.n as f64) * (-1.25 * q).exp();
        LltPoint {
            prob,
            on_lattice: self.on_lattice(x, y),
            in_regime: self.in_regime(),
        }
    }

    /// `P(L1 = x)`.
    pub fn l1(&self, x: i64) -> f64 {
        let scale = 4.0 * self.n as f64 / self.eps;
        let d = x as f64 - self.mu_l;
        (-(d * d) / scale).exp() / (2.0 * (PI * self.n as f64 / self.eps).sqrt())
    }

    /// `P(N1 = t)`.
    pub fn n1(&self, t: i64) -> f64 {
        let z = (t as f64 - self.mu_n) / self.sigma_star;
        (-0.5 * z * z).exp() / (self.sigma_star * (2.0 * PI).sqrt())
    }
}

pub fn llt_joint(mp: &ModelParams, x: i64, y: i64) -> Result<LltPoint> {
    Ok(GaussianLlt::new(mp)?.joint(x, y))
}

pub fn llt_l1(mp: &ModelParams, x: i64) -> Result<f64> {
    Ok(GaussianLlt::new(mp)?.l1(x))
}

pub fn llt_n1(mp: &ModelParams, t: i64) -> Result<f64> {
    Ok(GaussianLlt::new(mp)?.n1(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::solve_rho;

    fn model() -> ModelParams {
        ModelParams::from_eps(3, 30_000, 0.3).unwrap()
    }

    #[test]
    fn density_at_origin() {
        let expect = (2.5f64).sqrt() / (2.0 * PI);
        assert!((density_f(0.0, 0.0) - expect).abs() < 1e-15);
        assert!((density_f(0.0, 0.0) - 0.2516461).abs() < 1e-7);
    }

    #[test]
    fn density_is_even() {
        for (a, b) in [(0.3, -1.2), (2.0, 2.5), (-0.7, 0.1)] {
            assert_eq!(density_f(a, b), density_f(-a, -b));
        }
    }

    fn grid_integral<F: Fn(f64, f64) -> f64>(f: F) -> f64 {
        let inner = |a: f64| {
            (0..32)
                .map(|j| {
                    let lo = -8.0 + j as f64 * 0.5;
                    integrate(|b| f(a, b), lo, lo + 0.5, 16)
                })
                .sum::<f64>()
        };
        (0..32)
            .map(|i| {
                let lo = -8.0 + i as f64 * 0.5;
                integrate(inner, lo, lo + 0.5, 16)
            })
            .sum()
    }

    #[test]
    fn density_normalization_and_covariance() {
        let total = grid_integral(density_f);
        assert!((total - 1.0).abs() < 1e-6, "{total}");
        let cov = grid_integral(|a, b| a * b * density_f(a, b));
        assert!((cov - (0.6f64).sqrt()).abs() < 1e-4, "{cov}");
    }

    #[test]
    fn rect_mass_matches_brute_quadrature() {
        let m = density_f_rect_mass(0.0, 0.5, -0.5, 0.0);
        let brute = integrate(|a| integrate(|b| density_f(a, b), -0.5, 0.0, 20), 0.0, 0.5, 20);
        assert!((m - brute).abs() < 1e-10);
        let all = density_f_rect_mass(f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
        assert!((all - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l1_peak_and_symmetry() {
        let g = GaussianLlt::new(&model()).unwrap();
        let x = g.mu_l;
        let peak = 1.0 / (2.0 * (PI * 30_000.0 / 0.3).sqrt());
        // Evaluate exactly at the mean through the continuous formula.
        let d = x - x.floor();
        let at_floor = g.l1(x.floor() as i64);
        assert!((at_floor / peak - (-(d * d) / (4.0 * 30_000.0 / 0.3)).exp()).abs() < 1e-12);
        let c = 7000;
        let base = x.round();
        let shifted = GaussianLlt { mu_l: base, ..g };
        assert_eq!(shifted.l1(base as i64 + c), shifted.l1(base as i64 - c));
        assert!((shifted.l1(base as i64) - peak).abs() < 1e-15);
    }

    #[test]
    fn n1_sums_to_one() {
        let g = GaussianLlt::new(&model()).unwrap();
        let lo = (g.mu_n - 8.0 * g.sigma_star).floor() as i64;
        let hi = (g.mu_n + 8.0 * g.sigma_star).ceil() as i64;
        let total: f64 = (lo..=hi).map(|t| g.n1(t)).sum();
        assert!((total - 1.0).abs() < 1e-3, "{total}");
    }

    #[test]
    fn joint_mode_value() {
        let mp = model();
        let g = GaussianLlt::new(&mp).unwrap();
        let p = g.joint(g.mu_l.round() as i64, g.mu_n.round() as i64);
        let mode = 6f64.sqrt() / (8.0 * PI) * 4.0 / (0.3 * 30_000.0);
        assert!(p.prob <= mode && p.prob > 0.99 * mode);
        assert!(p.in_regime);
    }

    #[test]
    fn joint_decays_along_rays() {
        let g = GaussianLlt::new(&model()).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..10 {
            let t = k as f64 * 0.5;
            let x = (g.mu_l + t * g.sigma_n).round() as i64;
            let y = (g.mu_n + t * g.sigma_star).round() as i64;
            let v = g.joint(x, y).prob;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn joint_lattice_sum_is_one() {
        let g = GaussianLlt::new(&model()).unwrap();
        let xr = ((g.mu_l - 7.0 * g.sigma_n) as i64, (g.mu_l + 7.0 * g.sigma_n) as i64);
        let yr = ((g.mu_n - 7.0 * g.sigma_star) as i64, (g.mu_n + 7.0 * g.sigma_star) as i64);
        let mut total = 0.0;
        for y in yr.0..=yr.1 {
            for x in xr.0..=xr.1 {
                if g.on_lattice(x, y) {
                    total += g.joint(x, y).prob;
                }
            }
        }
        assert!((total - 1.0).abs() < 0.03, "{total}");
    }

    #[test]
    fn joint_marginal_matches_l1() {
        let g = GaussianLlt::new(&model()).unwrap();
        let yr = ((g.mu_n - 8.0 * g.sigma_star) as i64, (g.mu_n + 8.0 * g.sigma_star) as i64);
        for i in 0..20 {
            let x = (g.mu_l + (i as f64 - 9.5) * 0.25 * g.sigma_n).round() as i64;
            let marginal: f64 = (yr.0..=yr.1)
                .filter(|&y| g.on_lattice(x, y))
                .map(|y| g.joint(x, y).prob)
                .sum();
            let single = g.l1(x);
            assert!((marginal / single - 1.0).abs() < 0.02, "x={x}: {marginal} vs {single}");
        }
    }

    #[test]
    fn off_lattice_flag() {
        let g = GaussianLlt::new(&model()).unwrap();
        assert!(g.on_lattice(10, 1));
        assert!(!g.on_lattice(10, 2));
    }

    #[test]
    fn llt_requires_supercritical() {
        let mp = ModelParams::from_eps(3, 1000, -0.1).unwrap();
        assert!(llt_joint(&mp, 1, 0).is_err());
        assert!(llt_l1(&mp, 1).is_err());
        assert!(llt_n1(&mp, 1).is_err());
    }

    #[test]
    fn log_c_is_finite_and_indicator_only_in_p() {
        let inst = solve_rho(3, 25, 4).unwrap();
        assert_eq!(inst.m, 14);
        assert!(log_c(&inst).ln().unwrap().is_finite());
        // Changing r between 2 and 3 at the same rho shifts log P's constant by the indicator.
        let i2 = solve_rho(2, 300, 20).unwrap();
        let lp = log_p(&i2).ln().unwrap();
        let manual = 2.0 + 0.5 * 1.5f64.ln() + i2.m as f64 * ln_one_minus_pow(2, i2.rho)
            - 2.0 * i2.m as f64 * i2.rho.ln()
            + 300.0 * ln_vertex_factor(i2.rho);
        assert!((lp - manual).abs() < 1e-9);
    }

    #[test]
    fn log_c_unimodal_in_t() {
        let s = 200u64;
        let vals: Vec<f64> = (2..3000u64)
            .map(|t| log_c(&solve_rho(2, s, t).unwrap()).ln().unwrap())
            .collect();
        let peak = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(vals[..=peak].windows(2).all(|w| w[0] < w[1]));
        assert!(vals[peak..].windows(2).all(|w| w[0] > w[1]));
    }
}
