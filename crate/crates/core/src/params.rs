//! Scalar parameters of the random hypergraph model and of the enumeration
//! formula: `Psi_r`, the giant-component densities, the dual branching factor,
//! the local-limit scales, and the embedding of an enumeration instance
//! `(s, t)` into a model `(n, p)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::{bisect_increasing, ln_factorial, one_minus_exp_over};

/// Bisection halvings used by every root finder in this module.
pub const BISECTION_ITERATIONS: usize = 200;

/// Below this `rho` the series form of `Psi_r` is used.
pub const PSI_SERIES_THRESHOLD: f64 = 1e-4;

/// Below this `v` the series form of the nullity density is used.
const RHO_STAR_SERIES_THRESHOLD: f64 = 0.05;

/// One instance of `H^r(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub r: u32,
    pub n: u64,
    pub p: f64,
    /// Branching factor `p n^{r-1} / (r-2)!`.
    pub lambda: f64,
    /// `lambda - 1`, carried separately so that tiny values keep full precision.
    pub eps: f64,
}

fn check_r(r: u32) -> Result<()> {
    if r < 2 {
        return domain(format!("edge size r must be at least 2, got {r}"));
    }
    Ok(())
}

fn ln_r_minus_2_factorial(r: u32) -> f64 {
    ln_factorial(u64::from(r) - 2)
}

impl ModelParams {
    fn check_shape(r: u32, n: u64) -> Result<()> {
        check_r(r)?;
        if n < u64::from(r) {
            return domain(format!("need n >= r, got n={n}, r={r}"));
        }
        Ok(())
    }

    pub fn from_p(r: u32, n: u64, p: f64) -> Result<Self> {
        Self::check_shape(r, n)?;
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("edge probability must lie in [0,1], got {p}"));
        }
        let lambda = branching_factor(r, n, p);
        Ok(ModelParams {
            r,
            n,
            p,
            lambda,
            eps: lambda - 1.0,
        })
    }

    pub fn from_lambda(r: u32, n: u64, lambda: f64) -> Result<Self> {
        Self::from_eps(r, n, lambda - 1.0)
    }

    pub fn from_eps(r: u32, n: u64, eps: f64) -> Result<Self> {
        Self::check_shape(r, n)?;
        let lambda = 1.0 + eps;
        if lambda <= 0.0 || !lambda.is_finite() {
            return domain(format!("branching factor must be positive, got {lambda}"));
        }
        let p = (lambda.ln() + ln_r_minus_2_factorial(r) - f64::from(r - 1) * (n as f64).ln()).exp();
        if p > 1.0 {
            return domain(format!("branching factor {lambda} needs p = {p} > 1 at n = {n}"));
        }
        Ok(ModelParams {
            r,
            n,
            p,
            lambda,
            eps,
        })
    }

    pub fn rho_profile(&self) -> Result<RhoProfile> {
        rho_profile_eps(self.r, self.eps)
    }

    /// `eps^3 n`, the quantity that must be large for the supercritical asymptotics.
    pub fn eps3n(&self) -> f64 {
        self.eps.powi(3) * self.n as f64
    }

    /// Branching factor of `H^r(n - removed, p)`.
    pub fn residual_branching(&self, removed: u64) -> f64 {
        branching_factor(self.r, self.n.saturating_sub(removed), self.p)
    }
}

/// `p m^{r-1} / (r-2)!`.
pub fn branching_factor(r: u32, m: u64, p: f64) -> f64 {
    if p == 0.0 || m == 0 {
        return 0.0;
    }
    (p.ln() + f64::from(r - 1) * (m as f64).ln() - ln_r_minus_2_factorial(r)).exp()
}

/// Solved giant-component parameters for branching factor `lambda > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoProfile {
    pub r: u32,
    pub lambda: f64,
    pub eps: f64,
    /// Survival probability of a Poisson(lambda) Galton-Watson process.
    pub rho2: f64,
    /// Asymptotic fraction of vertices in the giant component.
    pub rho: f64,
    /// Asymptotic nullity of the giant component divided by `n`.
    pub rho_star: f64,
    /// The subcritical `lambda* < 1` with `lambda* e^{-lambda*} = lambda e^{-lambda}`.
    pub lambda_dual: f64,
}

pub fn rho_profile(r: u32, lambda: f64) -> Result<RhoProfile> {
    rho_profile_eps(r, lambda - 1.0)
}

/// Same as [`rho_profile`] but parameterised by `eps = lambda - 1`, which
/// keeps full relative precision when `eps` is tiny.
pub fn rho_profile_eps(r: u32, eps: f64) -> Result<RhoProfile> {
    check_r(r)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return domain(format!("giant-component parameters need lambda > 1, got eps = {eps}"));
    }
    // Work with u = lambda * rho2, so that 1 - rho2 = e^{-u} and lambda = u / (1 - e^{-u}).
    let u = solve_u_for_eps(eps);
    let lambda = 1.0 + eps;
    let rho2 = -(-u).exp_m1();
    let v = u / f64::from(r - 1);
    let rho = -(-v).exp_m1();
    let rho_star = rho_star_from_v(r, v, lambda);
    Ok(RhoProfile {
        r,
        lambda,
        eps,
        rho2,
        rho,
        rho_star,
        lambda_dual: lambda * (-u).exp(),
    })
}

/// `u / (1 - e^{-u}) - 1`, the excess branching factor as a function of `u = lambda rho2`.
pub(crate) fn eps_of_u(u: f64) -> f64 {
    let e = one_minus_exp_over(u);
    let one_minus_e = if u < 0.1 {
        // 1 - (1 - e^{-u})/u = u/2! - u^2/3! + u^3/4! - ...
        let mut term = 1.0;
        let mut acc = 0.0;
        for j in 1..=20 {
            term *= u / (j as f64 + 1.0);
            acc += if j % 2 == 1 { term } else { -term };
        }
        acc
    } else {
        1.0 - e
    };
    one_minus_e / e
}

fn solve_u_for_eps(eps: f64) -> f64 {
    let hi = 2.0 * eps + 2.0;
    bisect_increasing(|u| eps_of_u(u) - eps, 0.0, hi, BISECTION_ITERATIONS)
}

fn rho_star_from_v(r: u32, v: f64, lambda: f64) -> f64 {
    let rf = f64::from(r);
    if v >= RHO_STAR_SERIES_THRESHOLD {
        return (lambda / rf) * (-(-rf * v).exp_m1()) - (-(-v).exp_m1());
    }
    // rho* = v [E(rv) - E(v) E((r-1)v)] / E((r-1)v) with E(x) = (1 - e^{-x})/x.
    // The bracket vanishes to second order; expand it term by term.
    let e_coeff = |j: usize| -> f64 {
        // coefficient of x^j in E(x): (-1)^j / (j+1)!
        let f = (1..=j + 1).fold(1.0, |acc, i| acc * i as f64);
        if j % 2 == 0 {
            1.0 / f
        } else {
            -1.0 / f
        }
    };
    let t = rf - 1.0;
    let mut bracket = 0.0;
    let mut vp = v * v;
    for j in 2..=25 {
        let mut cross = 0.0;
        for i in 0..=j {
            cross += e_coeff(i) * e_coeff(j - i) * t.powi((j - i) as i32);
        }
        let c = e_coeff(j) * rf.powi(j as i32) - cross;
        bracket += c * vp;
        vp *= v;
    }
    v * bracket / one_minus_exp_over(t * v)
}

/// Series coefficients of `Psi_r` in powers of `rho`, starting at `rho^2`.
fn psi_series_coefficients(r: u32) -> [f64; 6] {
    let r = f64::from(r);
    let r2 = r * r;
    let r3 = r2 * r;
    let r4 = r3 * r;
    let t = r - 1.0;
    [
        t / 12.0,
        t / 12.0,
        -t * (r2 - 3.0 * r - 52.0) / 720.0,
        -t * (r2 - 3.0 * r - 22.0) / 360.0,
        t * (r4 - 5.0 * r3 - 109.0 * r2 + 347.0 * r + 1566.0) / 30240.0,
        t * (r4 - 5.0 * r3 - 39.0 * r2 + 137.0 * r + 446.0) / 10080.0,
    ]
}

fn psi_direct(r: u32, rho: f64) -> f64 {
    let rf = f64::from(r);
    let l = (-rho).ln_1p();
    let a = -l / rho;
    let b = (-(rf * l).exp_m1()) / (-((rf - 1.0) * l).exp_m1());
    (rf - 1.0) / rf * a * b - 1.0
}

fn psi_series(r: u32, rho: f64) -> f64 {
    let c = psi_series_coefficients(r);
    let poly = c.iter().rev().fold(0.0, |acc, &ci| acc * rho + ci);
    rho * rho * poly
}

/// `Psi_r(rho)`, strictly increasing from `(0,1)` onto `(0, inf)`.
pub fn psi_r(r: u32, rho: f64) -> Result<f64> {
    check_r(r)?;
    if !(rho > 0.0 && rho < 1.0) {
        return domain(format!("Psi_r needs 0 < rho < 1, got {rho}"));
    }
    Ok(if rho < PSI_SERIES_THRESHOLD {
        psi_series(r, rho)
    } else {
        psi_direct(r, rho)
    })
}

/// Unchecked `Psi_r` for internal callers that already validated inputs.
pub(crate) fn psi_unchecked(r: u32, rho: f64) -> f64 {
    if rho < PSI_SERIES_THRESHOLD {
        psi_series(r, rho)
    } else {
        psi_direct(r, rho)
    }
}

/// The `rho` in `(0,1)` with `Psi_r(rho) = target`.
pub fn invert_psi(r: u32, target: f64) -> Result<f64> {
    check_r(r)?;
    if !(target > 0.0) || !target.is_finite() {
        return domain(format!("Psi_r only takes positive values, got {target}"));
    }
    Ok(bisect_increasing(
        |x| psi_unchecked(r, x) - target,
        0.0,
        1.0,
        BISECTION_ITERATIONS,
    ))
}

/// A connected-hypergraph enumeration problem: `r`, `s` vertices, nullity `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationInstance {
    pub r: u32,
    pub s: u64,
    pub t: u64,
    /// Edge count `(s + t - 1) / (r - 1)`.
    pub m: u64,
    /// Root of `Psi_r(rho) = (t - 1)/s`.
    pub rho: f64,
}

/// Edge count of a connected hypergraph with `s` vertices and nullity `t`,
/// or an error when `r - 1` does not divide `s + t - 1`.
pub fn edges_for(r: u32, s: u64, t: u64) -> Result<u64> {
    check_r(r)?;
    let total = s + t;
    if total == 0 || (total - 1) % u64::from(r - 1) != 0 {
        return Err(Error::NoSuchHypergraph { r, s, t });
    }
    Ok((total - 1) / u64::from(r - 1))
}

pub fn solve_rho(r: u32, s: u64, t: u64) -> Result<EnumerationInstance> {
    check_r(r)?;
    if s < u64::from(r) {
        return domain(format!("need s >= r, got s={s}, r={r}"));
    }
    if t < 2 {
        return domain(format!(
            "the asymptotic formula needs nullity t >= 2 (rho = 0 at t = 1), got t = {t}"
        ));
    }
    let m = edges_for(r, s, t)?;
    let rho = invert_psi(r, (t - 1) as f64 / s as f64)?;
    Ok(EnumerationInstance { r, s, t, m, rho })
}

/// `(sigma_n, sigma*_n)`: the scales of `L1` and `N1` in the local limit.
pub fn sigmas(mp: &ModelParams) -> Result<(f64, f64)> {
    if !(mp.eps > 0.0) {
        return domain(format!("sigmas need eps > 0, got {}", mp.eps));
    }
    let n = mp.n as f64;
    let sigma_n = (2.0 * n / mp.eps).sqrt();
    let sigma_star = (10.0f64 / 3.0).sqrt() / f64::from(mp.r - 1) * (mp.eps.powi(3) * n).sqrt();
    Ok((sigma_n, sigma_star))
}

/// Model `H^r(n, p)` whose giant component is expected to have about `s`
/// vertices and nullity about `t`: `n = floor(s / rho)` and
/// `lambda = -(r-1) log(1-rho) / (1 - (1-rho)^{r-1})`.
pub fn embed_enumeration(inst: &EnumerationInstance) -> Result<ModelParams> {
    let n = (inst.s as f64 / inst.rho).floor() as u64;
    // u = -(r-1) log(1 - rho) is lambda * rho2 for the embedded model.
    let u = -f64::from(inst.r - 1) * (-inst.rho).ln_1p();
    ModelParams::from_eps(inst.r, n, eps_of_u(u))
}
