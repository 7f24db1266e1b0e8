//! Exact big-integer counts: connected r-uniform hypergraphs, all
//! hypergraphs, rooted forests and set partitions.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::numeric::{binomial_big, binomial_u128, factorial_big, ln_big};

/// Largest number of edge subsets [`brute_connected`] will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

/// `C(N, k)` for a possibly huge `N`.
fn binomial_of_big(n: &BigUint, k: u64) -> BigUint {
    if let Some(small) = n.to_u64() {
        return binomial_big(small, k);
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - BigUint::from(i);
        acc /= i + 1;
    }
    acc
}

/// Number of possible r-edges on `a` vertices.
pub fn edge_slots(r: u32, a: u64) -> BigUint {
    match binomial_u128(a, u64::from(r)) {
        Some(v) => BigUint::from(v),
        None => binomial_big(a, u64::from(r)),
    }
}

/// Number of r-uniform hypergraphs on `a` labelled vertices with `b` edges.
pub fn total_hypergraphs(r: u32, a: u64, b: u64) -> BigUint {
    binomial_of_big(&edge_slots(r, a), b)
}

/// Nullity `1 + (r-1)m - s` of a connected hypergraph, or `None` if negative.
pub fn nullity_of(r: u32, s: u64, m: u64) -> Option<u64> {
    (1 + u64::from(r - 1) * m).checked_sub(s)
}

/// Edge count `(s+t-1)/(r-1)` of a connected hypergraph, or `None` off the lattice.
pub fn edges_of(r: u32, s: u64, t: u64) -> Option<u64> {
    let k = u64::from(r - 1);
    let total = (s + t).checked_sub(1)?;
    (total % k == 0).then(|| total / k)
}

/// Table of connected-hypergraph counts `c[s][t]` for `s <= max_s`, `t <= max_t`.
///
/// Filled by marking one edge: removing it either leaves a connected
/// hypergraph with one fewer edge or splits off `j >= 2` components, one per
/// block of the edge's vertices.
#[derive(Debug, Clone)]
pub struct ConnectedTable {
    pub r: u32,
    pub max_s: u64,
    pub max_t: u64,
    counts: Vec<Vec<BigUint>>,
}

impl ConnectedTable {
    pub fn build(r: u32, max_s: u64, max_t: u64) -> Result<Self> {
        if r < 2 {
            return domain(format!("r must be at least 2, got {r}"));
        }
        let ru = r as usize;
        let (ns, nt) = (max_s as usize, max_t as usize);
        let zero_row = || vec![BigUint::zero(); nt + 1];
        // blocks[j][q][n][u]: ordered j-tuples of disjoint components covering [n],
        // with q marked vertices in total, at least one in each, and total nullity u.
        let mut blocks: Vec<Vec<Vec<Vec<BigUint>>>> = (0..=ru)
            .map(|_| (0..=ru).map(|_| vec![zero_row(); ns + 1]).collect())
            .collect();
        let mut counts = vec![zero_row(); ns + 1];
        let fact: Vec<BigUint> = (0..=ru as u64).map(factorial_big).collect();
        let rm1 = ru - 1;

        for n in 1..=ns {
            let pascal: Vec<BigUint> = (0..=n as u64).map(|a| binomial_big(n as u64, a)).collect();
            for j in 2..=ru {
                for q_total in j..=ru {
                    let rows: Vec<BigUint> = (0..=nt)
                        .into_par_iter()
                        .map(|u| {
                            let mut acc = BigUint::zero();
                            for q in 1..=(q_total + 1 - j) {
                                let head = &blocks[j - 1][q_total - q];
                                let tail = &blocks[1][q];
                                for a in 1..n {
                                    let mut inner = BigUint::zero();
                                    for u1 in 0..=u {
                                        let x = &head[a][u1];
                                        let y = &tail[n - a][u - u1];
                                        if !x.is_zero() && !y.is_zero() {
                                            inner += x * y;
                                        }
                                    }
                                    if !inner.is_zero() {
                                        acc += inner * &pascal[a];
                                    }
                                }
                            }
                            acc
                        })
                        .collect();
                    blocks[j][q_total][n] = rows;
                }
            }

            let slots = edge_slots(r, n as u64);
            for t in 0..=nt {
                let Some(k) = edges_of(r, n as u64, t as u64) else {
                    continue;
                };
                if n == 1 {
                    if t == 0 {
                        counts[1][0] = BigUint::one();
                    }
                    continue;
                }
                if k == 0 {
                    continue;
                }
                let mut total = BigUint::zero();
                if t >= rm1 {
                    let prev = &counts[n][t - rm1];
                    if !prev.is_zero() {
                        total += (&slots - BigUint::from(k - 1)) * prev;
                    }
                }
                for j in 2..=ru {
                    if t + j < ru {
                        continue;
                    }
                    let part = &blocks[j][ru][n][t + j - ru];
                    if !part.is_zero() {
                        let (quot, rem) = part.div_rem(&fact[j]);
                        debug_assert!(rem.is_zero());
                        total += quot;
                    }
                }
                let (quot, rem) = total.div_rem(&BigUint::from(k));
                if !rem.is_zero() {
                    return Err(Error::Numeric(format!(
                        "non-integral connected count at s={n}, t={t}"
                    )));
                }
                counts[n][t] = quot;
            }
            for q in 1..=ru {
                if q <= n {
                    blocks[1][q][n] = counts[n].iter().map(|c| c * &pascal[q]).collect();
                }
            }
        }
        Ok(ConnectedTable {
            r,
            max_s,
            max_t,
            counts,
        })
    }

    /// `C_r(s, t)`; zero off the lattice. Panics outside the table bounds.
    pub fn by_nullity(&self, s: u64, t: u64) -> &BigUint {
        assert!(
            s <= self.max_s && t <= self.max_t,
            "({s}, {t}) outside table built for s <= {}, t <= {}",
            self.max_s,
            self.max_t
        );
        &self.counts[s as usize][t as usize]
    }

    pub fn by_edges(&self, s: u64, m: u64) -> BigUint {
        match nullity_of(self.r, s, m) {
            Some(t) if s >= 1 => self.by_nullity(s, t).clone(),
            _ => BigUint::zero(),
        }
    }

    /// One CSV row per nonzero entry: `r,s,m,t,count,log10count`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,s,m,t,count,log10count")?;
        for s in 1..=self.max_s {
            for t in 0..=self.max_t {
                let c = self.by_nullity(s, t);
                if c.is_zero() {
                    continue;
                }
                let m = edges_of(self.r, s, t).expect("nonzero entries lie on the lattice");
                writeln!(
                    out,
                    "{},{},{},{},{},{:.17e}",
                    self.r,
                    s,
                    m,
                    t,
                    c,
                    ln_big(c) / std::f64::consts::LN_10
                )?;
            }
        }
        Ok(())
    }
}

/// Number of connected r-uniform hypergraphs on `[s]` with `m` edges.
pub fn connected_count(r: u32, s: u64, m: u64) -> Result<BigUint> {
    if s == 0 {
        return domain("connected_count needs s >= 1");
    }
    match nullity_of(r, s, m) {
        None => Ok(BigUint::zero()),
        Some(t) => Ok(ConnectedTable::build(r, s, t)?.by_nullity(s, t).clone()),
    }
}

/// Number of connected r-uniform hypergraphs on `[s]` with nullity `t`.
pub fn connected_count_by_nullity(r: u32, s: u64, t: u64) -> Result<BigUint> {
    if s == 0 {
        return domain("connected_count_by_nullity needs s >= 1");
    }
    Ok(ConnectedTable::build(r, s, t)?.by_nullity(s, t).clone())
}

/// Connected counts by the classical subtraction recurrence over the
/// component containing vertex 1, memoized on `(s, m)`.
#[derive(Debug, Clone)]
pub struct SubtractiveCounter {
    r: u32,
    memo: HashMap<(u64, u64), BigUint>,
}

impl SubtractiveCounter {
    pub fn new(r: u32) -> Self {
        SubtractiveCounter {
            r,
            memo: HashMap::new(),
        }
    }

    pub fn count(&mut self, s: u64, m: u64) -> BigUint {
        // Fill every smaller (s', k) first so the recursion never nests deeply.
        for s2 in 1..s {
            for k in 0..=m {
                self.entry(s2, k);
            }
        }
        self.entry(s, m)
    }

    fn entry(&mut self, s: u64, m: u64) -> BigUint {
        if let Some(v) = self.memo.get(&(s, m)) {
            return v.clone();
        }
        let r = self.r;
        let mut disconnected = BigUint::zero();
        for s1 in 1..s {
            let ways = binomial_big(s - 1, s1 - 1);
            for k in 0..=m {
                let d = self.memo.get(&(s1, k)).cloned().unwrap_or_else(|| self.entry(s1, k));
                if d.is_zero() {
                    continue;
                }
                let rest = total_hypergraphs(r, s - s1, m - k);
                if !rest.is_zero() {
                    disconnected += &ways * d * rest;
                }
            }
        }
        let value = total_hypergraphs(r, s, m) - disconnected;
        self.memo.insert((s, m), value.clone());
        value
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// All r-subsets of `0..s` in lexicographic order.
pub fn all_edges(r: u32, s: u64) -> Vec<Vec<u32>> {
    let (r, s) = (r as usize, s as u32);
    let mut out = Vec::new();
    if r as u64 > s as u64 {
        return out;
    }
    let mut cur: Vec<u32> = (0..r as u32).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| cur[i] < s - (r - i) as u32) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < n - (k - i)) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

fn spans_connected(s: usize, edges: &[Vec<u32>], chosen: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..s).collect();
    let mut touched = vec![false; s];
    let mut merges = 0;
    for &e in chosen {
        let edge = &edges[e];
        let first = edge[0] as usize;
        touched[first] = true;
        for &v in &edge[1..] {
            touched[v as usize] = true;
            let (a, b) = (find(&mut parent, first), find(&mut parent, v as usize));
            if a != b {
                parent[a] = b;
                merges += 1;
            }
        }
    }
    merges + 1 == s && (s == 1 || touched.iter().all(|&t| t))
}

/// Connected r-uniform hypergraphs on `[s]` with `m` edges, by exhaustive enumeration.
pub fn brute_connected(r: u32, s: u64, m: u64) -> Result<BigUint> {
    if s == 0 {
        return domain("brute_connected needs s >= 1");
    }
    let estimate = ln_big(&total_hypergraphs(r, s, m)).exp();
    if estimate > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            estimate,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let edges = all_edges(r, s);
    let (s, m, ne) = (s as usize, m as usize, edges.len());
    if m > ne {
        return Ok(BigUint::zero());
    }
    if m == 0 {
        return Ok(BigUint::from(u32::from(s == 1)));
    }
    // Split by the first chosen edge.
    let total: u64 = (0..=ne - m)
        .into_par_iter()
        .map(|first| {
            let mut rest: Vec<usize> = (first + 1..first + m).collect();
            let mut chosen = vec![0; m];
            let mut count = 0u64;
            loop {
                chosen[0] = first;
                chosen[1..].copy_from_slice(&rest);
                if spans_connected(s, &edges, &chosen) {
                    count += 1;
                }
                if rest.is_empty() || !next_combination_from(&mut rest, first + 1, ne) {
                    return count;
                }
            }
        })
        .sum();
    Ok(BigUint::from(total))
}

/// `next_combination` on values drawn from `lo..n`.
fn next_combination_from(idx: &mut [usize], lo: usize, n: usize) -> bool {
    for v in idx.iter_mut() {
        *v -= lo;
    }
    let more = next_combination(idx, n - lo);
    for v in idx.iter_mut() {
        *v += lo;
    }
    more
}

/// Number of r-forests on `a + (r-1)k` labelled vertices with `k` edges and
/// one component rooted at each of `a` given vertices.
pub fn forest_count(r: u32, a: u64, k: u64) -> Result<BigUint> {
    if a == 0 {
        return domain("forest_count needs at least one root");
    }
    if k == 0 {
        return Ok(BigUint::one());
    }
    let rm1 = u64::from(r - 1);
    let n = a + rm1 * k;
    let numer = BigUint::from(a) * BigUint::from(n).pow((k - 1) as u32) * factorial_big(k * rm1);
    let denom = factorial_big(k) * factorial_big(rm1).pow(k as u32);
    Ok(numer / denom)
}

/// Number of partitions of a `kt`-set into `k` unordered blocks of size `t`.
pub fn partition_count(k: u64, t: u64) -> Result<BigUint> {
    if k >= 1 && t == 0 {
        return domain("partition_count needs t >= 1 when k >= 1");
    }
    Ok(factorial_big(k * t) / (factorial_big(k) * factorial_big(t).pow(k as u32)))
}
