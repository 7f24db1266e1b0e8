use hypergiant_core::asymptotics::{log_c, log_p};
use hypergiant_core::crosscheck::bck_log_p2;
use hypergiant_core::exact::{connected_count_by_nullity, total_hypergraphs, ConnectedTable};
use hypergiant_core::numeric::{ln_big, ln_binomial};
use hypergiant_core::params::{edges_for, solve_rho};
use hypergiant_core::Error;

fn ratio_c(table: &ConnectedTable, r: u32, s: u64, t: u64) -> f64 {
    let inst = solve_rho(r, s, t).unwrap();
    (ln_big(table.by_nullity(s, t)) - log_c(&inst).ln().unwrap()).exp()
}

#[test]
fn graph_count_at_s100_t10_within_factor_two() {
    let table = ConnectedTable::build(2, 100, 10).unwrap();
    let ratio = ratio_c(&table, 2, 100, 10);
    println!("C_2(100,10) exact/asymptotic = {ratio}");
    assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn graph_count_error_decreases_along_s() {
    let grid = [50u64, 64, 100, 144, 196, 256, 400];
    let t_of = |s: u64| (2.0 * (s as f64).sqrt()).ceil() as u64;
    let table = ConnectedTable::build(2, 400, t_of(400)).unwrap();
    let errs: Vec<f64> = grid.iter().map(|&s| (ratio_c(&table, 2, s, t_of(s)) - 1.0).abs()).collect();
    println!("|ratio - 1| along {grid:?}: {errs:?}");
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn three_uniform_small_count_within_factor_three() {
    let exact = connected_count_by_nullity(3, 25, 4).unwrap();
    let inst = solve_rho(3, 25, 4).unwrap();
    assert_eq!(inst.m, 14);
    let lc = log_c(&inst).ln().unwrap();
    assert!(lc.is_finite());
    let ratio = (ln_big(&exact) - lc).exp();
    println!("C_3(25,4) exact/asymptotic = {ratio}");
    assert!((1.0 / 3.0..=3.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn graph_connectivity_probability_within_factor_two() {
    let (s, t) = (200u64, 20u64);
    let table = ConnectedTable::build(2, s, t).unwrap();
    let inst = solve_rho(2, s, t).unwrap();
    let exact = ln_big(table.by_nullity(s, t)) - ln_big(&total_hypergraphs(2, s, inst.m));
    let ratio = (exact - log_p(&inst).ln().unwrap()).exp();
    println!("P_2(200,20) exact/asymptotic = {ratio}");
    assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn count_and_probability_differ_by_log_binomial() {
    let mut per_vertex = Vec::new();
    for s in [100u64, 200, 300] {
        let t = (2.0 * (s as f64).sqrt()).ceil() as u64;
        let inst = solve_rho(2, s, t).unwrap();
        let slots = s * (s - 1) / 2;
        let gap = log_c(&inst).ln().unwrap() - log_p(&inst).ln().unwrap() - ln_binomial(slots, inst.m);
        per_vertex.push((gap / s as f64).abs());
    }
    assert!(per_vertex[2] < per_vertex[0] / 4.0, "{per_vertex:?}");
    assert!(per_vertex.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn graph_probability_approaches_bck_per_vertex() {
    let mut gaps = Vec::new();
    for s in [100u64, 1000, 10_000, 100_000] {
        let t = (2.0 * (s as f64).sqrt()).ceil() as u64;
        let ours = log_p(&solve_rho(2, s, t).unwrap()).ln().unwrap();
        gaps.push(((ours - bck_log_p2(s, t).unwrap()) / s as f64).abs());
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[3] < 1e-5);
}

#[test]
fn divisibility_is_an_error() {
    assert!(matches!(solve_rho(3, 10, 4), Err(Error::NoSuchHypergraph { .. })));
    assert!(edges_for(3, 10, 4).is_err());
    assert!(edges_for(3, 10, 5).is_ok());
}
