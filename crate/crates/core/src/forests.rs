//! Rooted r-forests: the Prüfer-type codec, uniform sampling, distance
//! profiles, the edge-split smoothing law and the pendant-edge law.

use std::collections::{BTreeSet, VecDeque};
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::numeric::{compensated_sum, ln_binomial, ln_factorial, log_sum_exp};

/// Tolerance on the total mass of a freshly computed pmf.
pub const PMF_TOLERANCE: f64 = 1e-9;

/// A forest on vertices `0..n` whose components each contain exactly one root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedForest {
    pub r: u32,
    pub roots: Vec<u32>,
    pub n: u32,
    /// Each edge sorted ascending.
    pub edges: Vec<Vec<u32>>,
}

/// Groups of non-root vertices in ≺ order, plus the word of old vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestCode {
    pub partition: Vec<Vec<u32>>,
    pub word: Vec<u32>,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn check_roots(roots: &[u32], n: u32) -> Result<Vec<bool>> {
    if roots.is_empty() {
        return invalid("roots", "a forest needs at least one root");
    }
    let mut is_root = vec![false; n as usize];
    for &v in roots {
        if v >= n {
            return invalid("roots", format!("root {v} is not a vertex of [0, {n})"));
        }
        if std::mem::replace(&mut is_root[v as usize], true) {
            return invalid("roots", format!("root {v} listed twice"));
        }
    }
    Ok(is_root)
}

impl RootedForest {
    /// The edgeless forest on the roots alone.
    pub fn empty(r: u32, roots: Vec<u32>) -> Self {
        let n = roots.len() as u32;
        RootedForest {
            r,
            roots,
            n,
            edges: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.r;
        if r < 2 {
            return invalid("forest", format!("r must be at least 2, got {r}"));
        }
        check_roots(&self.roots, self.n)?;
        let expected = self.roots.len() as u64 + u64::from(r - 1) * self.edges.len() as u64;
        if expected != u64::from(self.n) {
            return invalid(
                "forest",
                format!("n = {} but a + (r-1)k = {expected}", self.n),
            );
        }
        let mut parent: Vec<u32> = (0..self.n).collect();
        for e in &self.edges {
            if e.len() != r as usize || e.windows(2).any(|w| w[0] >= w[1]) {
                return invalid("edge", format!("{e:?} is not a sorted set of {r} vertices"));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= self.n) {
                return invalid("edge", format!("vertex {v} out of range"));
            }
            for &v in &e[1..] {
                let (a, b) = (find(&mut parent, e[0]), find(&mut parent, v));
                if a == b {
                    return invalid("forest", format!("edge {e:?} closes a cycle"));
                }
                parent[a as usize] = b;
            }
        }
        let mut roots_in = vec![0u32; self.n as usize];
        for &v in &self.roots {
            let c = find(&mut parent, v);
            roots_in[c as usize] += 1;
        }
        for v in 0..self.n {
            let c = find(&mut parent, v) as usize;
            if roots_in[c] != 1 {
                return invalid(
                    "forest",
                    format!("component of vertex {v} has {} roots", roots_in[c]),
                );
            }
        }
        Ok(())
    }

    /// For each edge, the vertex nearest the root set.
    fn old_vertices(&self) -> Vec<u32> {
        let n = self.n as usize;
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                incident[v as usize].push(i);
            }
        }
        let mut old = vec![u32::MAX; self.edges.len()];
        let mut seen = vec![false; n];
        let mut queue: VecDeque<u32> = self.roots.iter().copied().collect();
        for &v in &self.roots {
            seen[v as usize] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &i in &incident[v as usize] {
                if old[i] != u32::MAX {
                    continue;
                }
                old[i] = v;
                for &w in &self.edges[i] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        old
    }

    /// Graph distance of every vertex from the root set.
    pub fn root_distances(&self) -> Vec<u32> {
        let n = self.n as usize;
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                incident[v as usize].push(i);
            }
        }
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        for &v in &self.roots {
            dist[v as usize] = 0;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for &i in &incident[v as usize] {
                for &w in &self.edges[i] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[v as usize] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        dist
    }

    /// Index into `roots` of the component containing each edge.
    pub fn edge_root_index(&self) -> Vec<usize> {
        let mut parent: Vec<u32> = (0..self.n).collect();
        for e in &self.edges {
            for &v in &e[1..] {
                let (a, b) = (find(&mut parent, e[0]), find(&mut parent, v));
                if a != b {
                    parent[a as usize] = b;
                }
            }
        }
        let mut root_of = vec![usize::MAX; self.n as usize];
        for (i, &v) in self.roots.iter().enumerate() {
            let c = find(&mut parent, v);
            root_of[c as usize] = i;
        }
        self.edges
            .iter()
            .map(|e| root_of[find(&mut parent, e[0]) as usize])
            .collect()
    }

    /// One edge per line, space-separated vertex ids.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(u32::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Repeatedly strips the ≺-earliest part with no pending child edge.
/// `pending[i]` counts word entries inside part `i`; `part_of` maps vertices to parts.
fn strip_order(
    word: &[u32],
    part_of: &[usize],
    mut pending: Vec<usize>,
) -> Result<Vec<usize>> {
    let mut leaves: BTreeSet<usize> = (0..pending.len()).filter(|&i| pending[i] == 0).collect();
    let mut order = Vec::with_capacity(word.len());
    for &w in word {
        let Some(part) = leaves.pop_first() else {
            return invalid("code", "no leaf part available");
        };
        order.push(part);
        let owner = part_of[w as usize];
        if owner != usize::MAX {
            pending[owner] -= 1;
            if pending[owner] == 0 {
                leaves.insert(owner);
            }
        }
    }
    Ok(order)
}

pub fn encode(f: &RootedForest) -> Result<ForestCode> {
    f.validate()?;
    let k = f.k();
    if k == 0 {
        return Ok(ForestCode {
            partition: Vec::new(),
            word: Vec::new(),
        });
    }
    let old = f.old_vertices();
    let mut parts: Vec<(Vec<u32>, u32)> = f
        .edges
        .iter()
        .zip(&old)
        .map(|(e, &o)| (e.iter().copied().filter(|&v| v != o).collect(), o))
        .collect();
    parts.sort();
    let mut part_of = vec![usize::MAX; f.n as usize];
    for (i, (p, _)) in parts.iter().enumerate() {
        for &v in p {
            part_of[v as usize] = i;
        }
    }
    let mut pending = vec![0usize; k];
    for (_, o) in &parts {
        if part_of[*o as usize] != usize::MAX {
            pending[part_of[*o as usize]] += 1;
        }
    }
    let mut leaves: BTreeSet<usize> = (0..k).filter(|&i| pending[i] == 0).collect();
    let mut word = Vec::with_capacity(k);
    for _ in 0..k {
        let part = leaves.pop_first().expect("a forest always has a leaf part");
        let o = parts[part].1;
        word.push(o);
        let owner = part_of[o as usize];
        if owner != usize::MAX {
            pending[owner] -= 1;
            if pending[owner] == 0 {
                leaves.insert(owner);
            }
        }
    }
    Ok(ForestCode {
        partition: parts.into_iter().map(|(p, _)| p).collect(),
        word,
    })
}

pub fn decode(code: &ForestCode, roots: &[u32], r: u32) -> Result<RootedForest> {
    if r < 2 {
        return invalid("code", format!("r must be at least 2, got {r}"));
    }
    let k = code.partition.len();
    let n = roots.len() as u32 + (r - 1) * k as u32;
    let is_root = check_roots(roots, n)?;
    if code.word.len() != k {
        return invalid(
            "code",
            format!("word has length {} but there are {k} parts", code.word.len()),
        );
    }
    let mut part_of = vec![usize::MAX; n as usize];
    for (i, p) in code.partition.iter().enumerate() {
        if p.len() != (r - 1) as usize || p.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("code", format!("part {p:?} is not a sorted set of {} vertices", r - 1));
        }
        if i > 0 && code.partition[i - 1] >= *p {
            return invalid("code", "parts are not listed in increasing order");
        }
        for &v in p {
            if v >= n || is_root[v as usize] {
                return invalid("code", format!("part {p:?} contains a root or out-of-range vertex"));
            }
            if part_of[v as usize] != usize::MAX {
                return invalid("code", format!("vertex {v} lies in two parts"));
            }
            part_of[v as usize] = i;
        }
    }
    if let Some(&w) = code.word.iter().find(|&&w| w >= n) {
        return invalid("code", format!("word entry {w} out of range"));
    }
    if let Some(&last) = code.word.last() {
        if !is_root[last as usize] {
            return invalid("code", format!("last word entry {last} is not a root"));
        }
    }
    let mut pending = vec![0usize; k];
    for &w in &code.word {
        if part_of[w as usize] != usize::MAX {
            pending[part_of[w as usize]] += 1;
        }
    }
    let order = strip_order(&code.word, &part_of, pending)?;
    let mut edges: Vec<Vec<u32>> = order
        .iter()
        .zip(&code.word)
        .map(|(&p, &w)| {
            let mut e = code.partition[p].clone();
            e.push(w);
            e.sort_unstable();
            e
        })
        .collect();
    edges.sort();
    Ok(RootedForest {
        r,
        roots: roots.to_vec(),
        n,
        edges,
    })
}

/// A uniformly random forest rooted at `roots` spanning `roots ∪ nonroots = 0..n`.
pub fn sample_forest<R: Rng + ?Sized>(
    r: u32,
    roots: &[u32],
    nonroots: &[u32],
    rng: &mut R,
) -> Result<RootedForest> {
    if r < 2 {
        return domain(format!("r must be at least 2, got {r}"));
    }
    let t = (r - 1) as usize;
    if nonroots.len() % t != 0 {
        return domain(format!(
            "{} non-root vertices do not split into groups of {t}",
            nonroots.len()
        ));
    }
    let n = (roots.len() + nonroots.len()) as u32;
    let mut covered = vec![false; n as usize];
    for &v in roots.iter().chain(nonroots) {
        if v >= n || std::mem::replace(&mut covered[v as usize], true) {
            return domain("roots and non-roots must partition 0..n");
        }
    }
    if roots.is_empty() {
        return domain("a forest needs at least one root");
    }
    let mut shuffled = nonroots.to_vec();
    shuffled.shuffle(rng);
    let mut partition: Vec<Vec<u32>> = shuffled
        .chunks(t)
        .map(|c| {
            let mut p = c.to_vec();
            p.sort_unstable();
            p
        })
        .collect();
    partition.sort();
    let k = partition.len();
    let mut word: Vec<u32> = (0..k.saturating_sub(1)).map(|_| rng.random_range(0..n)).collect();
    if k > 0 {
        word.push(roots[rng.random_range(0..roots.len())]);
    }
    decode(&ForestCode { partition, word }, roots, r)
}

/// Expected number of vertices at distance exactly `ell` from the roots in a
/// uniform random forest with `a` roots and `k` edges.
pub fn distance_expectation(r: u32, a: u64, k: u64, ell: u64) -> Result<f64> {
    if a == 0 || r < 2 {
        return domain("distance_expectation needs a >= 1 and r >= 2");
    }
    if ell > k {
        return Ok(0.0);
    }
    let t = f64::from(r - 1);
    let n = a as f64 + t * k as f64;
    let ln = (0..ell).map(|i| ((k - i) as f64).ln()).sum::<f64>() + ell as f64 * (t.ln() - n.ln());
    Ok((a as f64 + t * ell as f64) * ln.exp())
}

/// A pmf on the integer interval `[lo, lo + probs.len() - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    pub lo: i64,
    pub probs: Vec<f64>,
}

impl DiscretePmf {
    pub fn new(lo: i64, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Numeric("pmf entries must be non-negative".into()));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::Numeric(format!("pmf sums to {total}")));
        }
        Ok(DiscretePmf { lo, probs })
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.probs.len() as i64 - 1
    }

    pub fn prob(&self, k: i64) -> f64 {
        if k < self.lo || k > self.hi() {
            0.0
        } else {
            self.probs[(k - self.lo) as usize]
        }
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.support().map(|k| k as f64 * self.prob(k)))
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        compensated_sum(self.support().map(|k| (k as f64 - mu).powi(2) * self.prob(k)))
    }

    /// Smallest most-likely value.
    pub fn mode(&self) -> i64 {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        self.lo + best as i64
    }

    pub fn support(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi()
    }

    /// Rows `k,p_k`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,p_k")?;
        for k in self.support() {
            writeln!(out, "{k},{:.17e}", self.prob(k))?;
        }
        Ok(())
    }
}

/// `ln F_{a,k}` for `r`-forests.
fn ln_forest_count(r: u32, a: u64, k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let t = u64::from(r - 1);
    let n = (a + t * k) as f64;
    (a as f64).ln() + (k - 1) as f64 * n.ln() + ln_factorial(t * k)
        - ln_factorial(k)
        - k as f64 * ln_factorial(t)
}

/// `ln p_k` in closed form.
fn ln_split_closed(r: u32, m: u64, a: u64, k: u64) -> f64 {
    let t = f64::from(r - 1);
    let (af, l) = (a as f64, m - k);
    (af / 2.0).ln() + ln_binomial(m, k) + (k as f64 - 1.0) * (af + t * k as f64).ln()
        + (l as f64 - 1.0) * (af + t * l as f64).ln()
        - (m as f64 - 1.0) * (2.0 * af + t * m as f64).ln()
}

/// `ln p_k` as a ratio of forest counts.
fn ln_split_ratio(r: u32, m: u64, a: u64, k: u64) -> f64 {
    let t = u64::from(r - 1);
    ln_binomial(t * m, t * k) + ln_forest_count(r, a, k) + ln_forest_count(r, a, m - k)
        - ln_forest_count(r, 2 * a, m)
}

/// Law of the number of edges in the components rooted at the first `a` of
/// `2a` roots, in a uniform forest with `m` edges.
pub fn smoothing_pmf(r: u32, m: u64, a: u64) -> Result<DiscretePmf> {
    if a == 0 || r < 2 {
        return domain("smoothing_pmf needs a >= 1 and r >= 2");
    }
    let mut logs = vec![0.0; m as usize + 1];
    for k in 0..=m / 2 {
        let closed = ln_split_closed(r, m, a, k);
        let ratio = ln_split_ratio(r, m, a, k);
        let scale = closed.abs().max(ratio.abs()).max(1.0);
        if (closed - ratio).abs() > 1e-9 * scale.max(1e3) {
            return Err(Error::Numeric(format!(
                "split law disagrees at k={k}: {closed} vs {ratio}"
            )));
        }
        logs[k as usize] = closed;
        logs[(m - k) as usize] = closed;
    }
    let probs: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let total = compensated_sum(probs.iter().copied());
    if (total - 1.0).abs() > PMF_TOLERANCE {
        return Err(Error::Numeric(format!(
            "split law sums to {total} before normalization"
        )));
    }
    DiscretePmf::new(0, probs.iter().map(|p| p / total).collect())
}

/// Draws `samples` values of the split edge count, one ChaCha stream per sample.
pub fn sample_split(r: u32, m: u64, a: u64, samples: usize, seed: u64) -> Result<Vec<u64>> {
    if a == 0 || r < 2 {
        return domain("sample_split needs a >= 1 and r >= 2");
    }
    let roots: Vec<u32> = (0..2 * a as u32).collect();
    let n = 2 * a as u32 + (r - 1) * m as u32;
    let nonroots: Vec<u32> = (2 * a as u32..n).collect();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let f = sample_forest(r, &roots, &nonroots, &mut rng)?;
            Ok(f.edge_root_index().iter().filter(|&&i| (i as u64) < a).count() as u64)
        })
        .collect()
}

/// The ratio `p_{a+1}/p_a` of the pendant-edge law.
pub fn pendant_ratio(r: u32, isolated: u64, core_pairs: u64, pi: f64, a: u64) -> f64 {
    let g = u64::from(r - 2);
    let falling: f64 = (0..g)
        .map(|i| isolated as f64 - (a * g) as f64 - i as f64)
        .product();
    pi / ln_factorial(g).exp() * core_pairs as f64 * falling / (a + 1) as f64
}

/// Law of the number of pendant edges, each joining one core pair to `r-2`
/// fresh isolated vertices.
pub fn pendant_reattach_pmf(r: u32, isolated: u64, core_pairs: u64, pi: f64) -> Result<DiscretePmf> {
    if r < 2 {
        return domain(format!("r must be at least 2, got {r}"));
    }
    if !(pi > 0.0) || !pi.is_finite() {
        return domain(format!("pendant law needs odds pi > 0, got {pi}"));
    }
    let g = u64::from(r - 2);
    let max_a = if g == 0 { core_pairs } else { isolated / g };
    let lp = pi.ln() + (core_pairs as f64).ln();
    let mut logs = Vec::with_capacity(max_a as usize + 1);
    let mut acc = 0.0;
    for a in 0..=max_a {
        if a > 0 {
            acc += ln_binomial(isolated - (a - 1) * g, g) + lp - (a as f64).ln();
        }
        logs.push(acc);
    }
    if core_pairs == 0 {
        logs.truncate(1);
    }
    let norm = log_sum_exp(&logs);
    DiscretePmf::new(0, logs.iter().map(|l| (l - norm).exp()).collect())
}
