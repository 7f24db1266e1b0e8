use hypergiant_core::asymptotics::log_p;
use hypergiant_core::crosscheck::{
    bck_a_limit, bck_a_of_rho, bck_log_p2, bck_y, bcok_limit, bcok_log_p, bcok_target, kl_difference, kl_discrepancy,
    log_grid, rho4_spread, sw_identity, sw_mu, BcokVersion,
};
use hypergiant_core::params::{psi_r, solve_rho};

#[test]
fn bck_y_along_solved_instances() {
    for (s, t) in [(100u64, 20u64), (1000, 64), (10_000, 200), (500, 400)] {
        let inst = solve_rho(2, s, t).unwrap();
        let x = inst.m as f64 / s as f64;
        let y = bck_y(x).unwrap();
        assert!((y - inst.rho / (2.0 - inst.rho)).abs() < 1e-10, "s={s} t={t}");
    }
}

#[test]
fn bck_y_residual() {
    for rho in log_grid(0.9, 1e-4, 60) {
        let x = 1.0 + psi_r(2, rho).unwrap();
        let y = bck_y(x).unwrap();
        let resid = 2.0 * x * y - ((1.0 + y) / (1.0 - y)).ln();
        assert!(resid.abs() < 1e-12, "rho={rho}: {resid}");
    }
}

#[test]
fn bck_a_tends_to_its_limit() {
    let errs: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&rho| (bck_a_of_rho(rho) - bck_a_limit()).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0] / 5.0), "{errs:?}");
    assert!((bck_a_limit() - 2.2027).abs() < 1e-4);
}

#[test]
fn three_formulas_agree_per_vertex() {
    let mut gaps = Vec::new();
    for s in [1000u64, 10_000, 100_000] {
        let t = (2.0 * (s as f64).sqrt()).ceil() as u64;
        let ours = log_p(&solve_rho(2, s, t).unwrap()).ln().unwrap();
        let bck = bck_log_p2(s, t).unwrap();
        let bcok = bcok_log_p(2, s, t, BcokVersion::Preprint).unwrap();
        let sf = s as f64;
        let worst = [(ours - bck).abs(), (ours - bcok).abs(), (bck - bcok).abs()]
            .into_iter()
            .fold(0.0, f64::max)
            / sf;
        gaps.push(worst);
    }
    println!("per-vertex disagreement {gaps:?}");
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert!(gaps[2] < 1e-4);
}

#[test]
fn bcok_three_uniform_limits() {
    let grid = log_grid(0.1, 1e-3, 21);
    let pre = bcok_limit(3, BcokVersion::Preprint, &grid).unwrap();
    assert!((bcok_target(3, BcokVersion::Preprint) - 1.5f64.exp() * 3f64.sqrt()).abs() < 1e-12);
    assert!((bcok_target(3, BcokVersion::Preprint) - 7.7626).abs() < 1e-4);
    assert!(pre.final_relative_error() < 0.01);
    let publ = bcok_limit(3, BcokVersion::Published, &grid).unwrap();
    assert!((bcok_target(3, BcokVersion::Published) - 3f64.sqrt()).abs() < 1e-12);
    assert!(publ.final_relative_error() < 0.01);
    let last = *publ.lhs.last().unwrap();
    assert!((last / bcok_target(3, BcokVersion::Preprint) - 1.0).abs() > 0.5);
}

#[test]
fn bcok_graph_case() {
    let grid = log_grid(0.1, 1e-3, 21);
    let pre = bcok_limit(2, BcokVersion::Preprint, &grid).unwrap();
    assert!((bcok_target(2, BcokVersion::Preprint) - 2f64.exp() * 1.5f64.sqrt()).abs() < 1e-12);
    assert!(pre.final_relative_error() < 0.01);
}

#[test]
fn sweeps_do_not_depend_on_grid_spacing() {
    for d in 2..=5 {
        for v in [BcokVersion::Preprint, BcokVersion::Published] {
            let coarse = bcok_limit(d, v, &log_grid(0.1, 1e-3, 11)).unwrap();
            let fine = bcok_limit(d, v, &log_grid(0.1, 1e-3, 21)).unwrap();
            assert!((coarse.final_relative_error() - fine.final_relative_error()).abs() < 1e-6);
        }
    }
}

#[test]
fn sato_wormald_identity_on_grid() {
    let grid: Vec<f64> = (1..=50).rev().map(|i| 0.01 * f64::from(i)).collect();
    let sw = sw_identity(&grid).unwrap();
    assert_eq!(sw.len(), 50);
    assert!(sw.max_abs_diff() < 1e-9, "{}", sw.max_abs_diff());
    for &rho in &grid {
        assert!((1.0 - (-sw_mu(rho)).exp() - rho).abs() < 1e-15);
    }
}

#[test]
fn karonski_luczak_is_fourth_order() {
    for r in 2..=4 {
        let s = kl_discrepancy(r, &log_grid(0.1, 1e-4, 41)).unwrap();
        let spread = rho4_spread(&s, 1e-3, 1e-2);
        assert!((1.0..=3.0).contains(&spread), "r={r}: {spread}");
    }
}

#[test]
fn karonski_luczak_total_vanishes_for_small_nullity() {
    let totals: Vec<f64> = [1e4f64, 1e6, 1e8]
        .iter()
        .map(|&s| {
            let t = s.powf(0.4);
            let rho = hypergiant_core::params::invert_psi(3, (t - 1.0) / s).unwrap();
            (s * kl_difference(3, rho)).abs()
        })
        .collect();
    println!("{totals:?}");
    assert!(totals.windows(2).all(|w| w[1] < w[0]));
    assert!(totals[2] < 0.01);
}
