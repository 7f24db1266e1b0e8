//! Sampling `H^r(n, p)` and measuring its components, core, extended core
//! and mantle.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::io::{BufRead, Write};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::params::ModelParams;

/// Largest number of potential edges [`sample`] accepts.
pub const MAX_EDGE_SLOTS: u128 = 1 << 63;

/// An r-uniform hypergraph on vertices `0..n`, with an optional set of marked vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub r: u32,
    pub n: u32,
    /// Edges stored back to back, `r` sorted vertex ids each.
    flat: Vec<u32>,
    pub marks: Option<Vec<u32>>,
}

impl Hypergraph {
    pub fn empty(r: u32, n: u32) -> Self {
        Hypergraph {
            r,
            n,
            flat: Vec::new(),
            marks: None,
        }
    }

    /// Validates and sorts the given edges.
    pub fn from_edges(r: u32, n: u32, edges: &[Vec<u32>]) -> Result<Self> {
        if r < 2 {
            return invalid("hypergraph", format!("r must be at least 2, got {r}"));
        }
        let mut sorted: Vec<Vec<u32>> = Vec::with_capacity(edges.len());
        for e in edges {
            let mut e = e.clone();
            e.sort_unstable();
            if e.len() != r as usize || e.windows(2).any(|w| w[0] == w[1]) {
                return invalid("edge", format!("{e:?} is not a set of {r} distinct vertices"));
            }
            if e[e.len() - 1] >= n {
                return invalid("edge", format!("{e:?} has a vertex outside [0, {n})"));
            }
            sorted.push(e);
        }
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("hypergraph", "repeated edge");
        }
        Ok(Hypergraph {
            r,
            n,
            flat: sorted.concat(),
            marks: None,
        })
    }

    pub fn with_marks(mut self, marks: Vec<u32>) -> Result<Self> {
        let mut marks = marks;
        marks.sort_unstable();
        marks.dedup();
        if marks.last().is_some_and(|&v| v >= self.n) {
            return invalid("marks", "marked vertex out of range");
        }
        self.marks = Some(marks);
        Ok(self)
    }

    pub fn edge_count(&self) -> usize {
        self.flat.len() / self.r as usize
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        let r = self.r as usize;
        &self.flat[i * r..(i + 1) * r]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[u32]> {
        self.flat.chunks_exact(self.r as usize)
    }

    fn marked_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n as usize];
        for &v in self.marks.iter().flatten() {
            mask[v as usize] = true;
        }
        mask
    }

    fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.n as usize];
        for (i, e) in self.edges().enumerate() {
            for &v in e {
                inc[v as usize].push(i as u32);
            }
        }
        inc
    }

    /// Header `r n`, one sorted edge per line, then `marks: ...` if marked.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.r, self.n)?;
        for e in self.edges() {
            let ids: Vec<String> = e.iter().map(u32::to_string).collect();
            writeln!(out, "{}", ids.join(" "))?;
        }
        if let Some(marks) = &self.marks {
            let ids: Vec<String> = marks.iter().map(u32::to_string).collect();
            writeln!(out, "marks: {}", ids.join(" "))?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))??;
        let nums = parse_ids(&header)?;
        let [r, n] = nums[..] else {
            return Err(Error::Parse(format!("header must be `r n`, got {header:?}")));
        };
        let mut edges = Vec::new();
        let mut marks = None;
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("marks:") {
                marks = Some(parse_ids(rest)?);
            } else {
                edges.push(parse_ids(line)?);
            }
        }
        let h = Hypergraph::from_edges(r, n, &edges)?;
        match marks {
            Some(m) => h.with_marks(m),
            None => Ok(h),
        }
    }
}

fn parse_ids(s: &str) -> Result<Vec<u32>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad vertex id {t:?}: {e}")))
        })
        .collect()
}

fn binom_u128(n: u64, k: u32) -> u128 {
    if u64::from(k) > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..u64::from(k) {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// The combination with the given colexicographic rank, written into `out` ascending.
pub fn colex_unrank(mut rank: u128, r: u32, out: &mut [u32]) {
    for i in (1..=r).rev() {
        // Largest c with C(c, i) <= rank, starting from the real root of c^i / i! = rank.
        let fact: f64 = (1..=i).map(f64::from).product();
        let mut c = ((rank as f64 * fact).powf(1.0 / f64::from(i)) as u64).max(u64::from(i - 1));
        while binom_u128(c + 1, i) <= rank {
            c += 1;
        }
        while c > 0 && binom_u128(c, i) > rank {
            c -= 1;
        }
        out[(i - 1) as usize] = c as u32;
        rank -= binom_u128(c, i);
    }
}

/// Colexicographic rank of an ascending combination.
pub fn colex_rank(comb: &[u32]) -> u128 {
    comb.iter()
        .enumerate()
        .map(|(i, &c)| binom_u128(u64::from(c), i as u32 + 1))
        .sum()
}

/// A draw of `H^r(n, p)`.
pub fn sample<R: Rng + ?Sized>(mp: &ModelParams, rng: &mut R) -> Result<Hypergraph> {
    let (r, n, p) = (mp.r, mp.n, mp.p);
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("edge probability must lie in [0, 1], got {p}"));
    }
    if n > u64::from(u32::MAX) {
        return domain(format!("n = {n} exceeds the 32-bit vertex id range"));
    }
    let slots = binom_u128(n, r);
    if slots >= MAX_EDGE_SLOTS {
        return domain(format!(
            "binom({n}, {r}) exceeds 2^63; the edge-rank space is 64-bit"
        ));
    }
    let mut h = Hypergraph::empty(r, n as u32);
    if p == 0.0 || slots == 0 {
        return Ok(h);
    }
    let mut buf = vec![0u32; r as usize];
    if p == 1.0 {
        for rank in 0..slots {
            colex_unrank(rank, r, &mut buf);
            h.flat.extend_from_slice(&buf);
        }
        return Ok(h);
    }
    let log_q = (-p).ln_1p();
    let mut rank: u128 = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (slots - rank) as f64 {
            break;
        }
        rank += skip as u128;
        if rank >= slots {
            break;
        }
        colex_unrank(rank, r, &mut buf);
        h.flat.extend_from_slice(&buf);
        rank += 1;
    }
    Ok(h)
}

/// A copy of `h` with each vertex marked independently with probability `prob`.
pub fn mark<R: Rng + ?Sized>(h: &Hypergraph, prob: f64, rng: &mut R) -> Result<Hypergraph> {
    if !(0.0..=1.0).contains(&prob) {
        return domain(format!("mark probability must lie in [0, 1], got {prob}"));
    }
    let marks = (0..h.n).filter(|_| rng.random::<f64>() < prob).collect();
    let mut out = h.clone();
    out.marks = Some(marks);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub min_vertex: u32,
    pub order: u64,
    pub size: u64,
    pub nullity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    /// Sorted by decreasing order, ties by smallest minimum vertex.
    pub components: Vec<Component>,
    /// Index into `components` for every vertex.
    pub label: Vec<u32>,
    pub isolated: u64,
}

impl ComponentSummary {
    fn largest(&self) -> Option<&Component> {
        self.components.first()
    }

    pub fn l1(&self) -> u64 {
        self.largest().map_or(0, |c| c.order)
    }

    pub fn m1(&self) -> u64 {
        self.largest().map_or(0, |c| c.size)
    }

    pub fn n1(&self) -> u64 {
        self.largest().map_or(0, |c| c.nullity)
    }

    pub fn l2(&self) -> u64 {
        self.components.get(1).map_or(0, |c| c.order)
    }

    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// Vertices of the largest component.
    pub fn giant_vertices(&self) -> Vec<u32> {
        (0..self.label.len() as u32)
            .filter(|&v| self.label[v as usize] == 0)
            .collect()
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

pub fn components(h: &Hypergraph) -> ComponentSummary {
    let n = h.n as usize;
    let mut parent: Vec<u32> = (0..h.n).collect();
    for e in h.edges() {
        for &v in &e[1..] {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, v));
            if a != b {
                // Keep the smaller id as representative.
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut order = vec![0u64; n];
    let mut size = vec![0u64; n];
    let mut roots = vec![0u32; n];
    for v in 0..h.n {
        let root = find(&mut parent, v);
        roots[v as usize] = root;
        order[root as usize] += 1;
    }
    for e in h.edges() {
        size[roots[e[0] as usize] as usize] += 1;
    }
    let rm1 = u64::from(h.r - 1);
    // Each representative is its component's smallest vertex.
    let mut comps: Vec<Component> = (0..h.n)
        .filter(|&v| roots[v as usize] == v)
        .map(|v| {
            let (o, s) = (order[v as usize], size[v as usize]);
            Component {
                min_vertex: v,
                order: o,
                size: s,
                nullity: 1 + rm1 * s - o,
            }
        })
        .collect();
    comps.sort_by(|a, b| b.order.cmp(&a.order).then(a.min_vertex.cmp(&b.min_vertex)));
    let mut index = vec![0u32; n];
    for (i, c) in comps.iter().enumerate() {
        index[c.min_vertex as usize] = i as u32;
    }
    let label = roots.iter().map(|&root| index[root as usize]).collect();
    let isolated = comps.iter().filter(|c| c.order == 1).count() as u64;
    ComponentSummary {
        components: comps,
        label,
        isolated,
    }
}

/// Vertex and edge sets left after peeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Core {
    pub vertices: Vec<u32>,
    pub edges: Vec<usize>,
}

impl Core {
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn to_hypergraph(&self, h: &Hypergraph) -> Hypergraph {
        let edges: Vec<Vec<u32>> = self.edges.iter().map(|&i| h.edge(i).to_vec()).collect();
        let mut out = Hypergraph::from_edges(h.r, h.n, &edges).expect("sub-hypergraph of a valid one");
        if let Some(marks) = &h.marks {
            let keep: HashSet<u32> = self.vertices.iter().copied().collect();
            out.marks = Some(marks.iter().copied().filter(|v| keep.contains(v)).collect());
        }
        out
    }
}

/// Peels edges that have fewer than two vertices which are marked or lie in
/// another edge. `pick` chooses which pending edge to peel next.
fn peel(h: &Hypergraph, marked: &[bool], mut pick: impl FnMut(usize) -> usize) -> (Vec<bool>, Vec<u32>) {
    let inc = h.incidence();
    let mut deg: Vec<u32> = inc.iter().map(|l| l.len() as u32).collect();
    let good = |v: u32, deg: &[u32]| marked[v as usize] || deg[v as usize] >= 2;
    let mut alive = vec![true; h.edge_count()];
    let mut support: Vec<u32> = h
        .edges()
        .map(|e| e.iter().filter(|&&v| good(v, &deg)).count() as u32)
        .collect();
    let mut queued = vec![false; h.edge_count()];
    let mut pending: Vec<usize> = Vec::new();
    for (i, &s) in support.iter().enumerate() {
        if s < 2 {
            queued[i] = true;
            pending.push(i);
        }
    }
    while !pending.is_empty() {
        let slot = pick(pending.len());
        let e = pending.swap_remove(slot);
        alive[e] = false;
        for &v in h.edge(e) {
            let was_good = good(v, &deg);
            deg[v as usize] -= 1;
            if was_good && !good(v, &deg) {
                // v now lies in exactly one live edge, which loses a supported vertex.
                for &f in &inc[v as usize] {
                    let f = f as usize;
                    if alive[f] && f != e {
                        support[f] -= 1;
                        if support[f] < 2 && !queued[f] {
                            queued[f] = true;
                            pending.push(f);
                        }
                    }
                }
            }
        }
    }
    (alive, deg)
}

fn collect_core(h: &Hypergraph, marked: &[bool], alive: Vec<bool>, deg: Vec<u32>) -> Core {
    Core {
        vertices: (0..h.n)
            .filter(|&v| deg[v as usize] > 0 || marked[v as usize])
            .collect(),
        edges: (0..alive.len()).filter(|&i| alive[i]).collect(),
    }
}

/// The core, ignoring any marks.
pub fn core(h: &Hypergraph) -> Core {
    let marked = vec![false; h.n as usize];
    let (alive, deg) = peel(h, &marked, |len| len - 1);
    collect_core(h, &marked, alive, deg)
}

/// The extended core with respect to `h.marks` (no marks if absent).
pub fn extended_core(h: &Hypergraph) -> Core {
    let marked = h.marked_mask();
    let (alive, deg) = peel(h, &marked, |len| len - 1);
    collect_core(h, &marked, alive, deg)
}

/// Extended core computed with a random peeling order.
pub fn extended_core_shuffled<R: RngCore + ?Sized>(h: &Hypergraph, rng: &mut R) -> Core {
    let marked = h.marked_mask();
    let (alive, deg) = peel(h, &marked, |len| rng.random_range(0..len));
    collect_core(h, &marked, alive, deg)
}

/// For every vertex, the extended-core vertex its mantle tree hangs from.
pub fn mantle_attachment(h: &Hypergraph, excore: &Core) -> Vec<Option<u32>> {
    let inc = h.incidence();
    let mut in_core = vec![false; h.edge_count()];
    for &e in &excore.edges {
        in_core[e] = true;
    }
    let mut attach: Vec<Option<u32>> = vec![None; h.n as usize];
    let mut queue = VecDeque::new();
    for &v in &excore.vertices {
        attach[v as usize] = Some(v);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        for &e in &inc[v as usize] {
            if in_core[e as usize] {
                continue;
            }
            for &w in h.edge(e as usize) {
                if attach[w as usize].is_none() {
                    attach[w as usize] = attach[v as usize];
                    queue.push_back(w);
                }
            }
        }
    }
    attach
}

/// `M^+(A)`: vertices outside the extended core whose mantle path ends in `subset`.
pub fn mantle(h: &Hypergraph, subset: &[u32]) -> Result<Vec<u32>> {
    let ex = extended_core(h);
    let in_core: HashSet<u32> = ex.vertices.iter().copied().collect();
    if let Some(v) = subset.iter().find(|v| !in_core.contains(v)) {
        return domain(format!("vertex {v} is not in the extended core"));
    }
    let wanted: HashSet<u32> = subset.iter().copied().collect();
    let attach = mantle_attachment(h, &ex);
    Ok((0..h.n)
        .filter(|v| !in_core.contains(v))
        .filter(|&v| attach[v as usize].is_some_and(|x| wanted.contains(&x)))
        .collect())
}

/// Number of ordered pairs of vertices joined by a path (each vertex with itself included).
pub fn connected_pairs(h: &Hypergraph) -> u64 {
    components(h).components.iter().map(|c| c.order * c.order).sum()
}

/// Number of tree components with `k` edges, for each `k` that occurs.
pub fn tree_census(h: &Hypergraph) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for c in components(h).components.iter().filter(|c| c.nullity == 0) {
        *out.entry(c.size).or_insert(0) += 1;
    }
    out
}

/// Number of components with nullity at least 2.
pub fn complex_count(h: &Hypergraph) -> u64 {
    components(h)
        .components
        .iter()
        .filter(|c| c.nullity >= 2)
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hg(r: u32, n: u32, edges: &[&[u32]]) -> Hypergraph {
        let e: Vec<Vec<u32>> = edges.iter().map(|e| e.to_vec()).collect();
        Hypergraph::from_edges(r, n, &e).unwrap()
    }

    #[test]
    fn colex_roundtrip() {
        let mut buf = [0u32; 3];
        for rank in (0..2000u128).chain([4_499_955_000_000u128 - 1]) {
            colex_unrank(rank, 3, &mut buf);
            assert!(buf.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(colex_rank(&buf), rank);
        }
        colex_unrank(0, 4, &mut [0; 4]);
    }

    #[test]
    fn nullity_examples() {
        let s = components(&hg(3, 3, &[&[0, 1, 2]]));
        assert_eq!((s.count(), s.n1()), (1, 0));
        let s = components(&hg(3, 4, &[&[0, 1, 2], &[1, 2, 3]]));
        assert_eq!(s.n1(), 1);
        let s = components(&hg(2, 6, &[&[0, 1], &[1, 2], &[3, 4]]));
        assert!(s.components.iter().all(|c| c.nullity == 0));
        assert_eq!(s.isolated, 1);
        assert_eq!(s.l1(), 3);
        assert_eq!(s.l2(), 2);
    }

    #[test]
    fn ties_use_smallest_vertex() {
        let s = components(&hg(2, 4, &[&[2, 3], &[0, 1]]));
        assert_eq!(s.components[0].min_vertex, 0);
        assert_eq!(s.giant_vertices(), vec![0, 1]);
    }

    #[test]
    fn cores() {
        let tree = hg(3, 7, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6]]);
        assert_eq!(core(&tree).order(), 0);
        let pair = hg(3, 4, &[&[0, 1, 2], &[1, 2, 3]]);
        assert_eq!(core(&pair).edges, vec![0, 1]);
        let marked = tree.clone().with_marks(vec![3]).unwrap();
        let ex = extended_core(&marked);
        assert_eq!(ex.vertices, vec![3]);
        assert!(ex.edges.is_empty());
        let unmarked = tree.with_marks(vec![]).unwrap();
        assert_eq!(extended_core(&unmarked), core(&unmarked));
    }

    #[test]
    fn mantle_examples() {
        // A 2-cycle on {0,1,2,3} with a tree {3,4,5},{5,6,7} hanging off vertex 3.
        let h = hg(3, 8, &[&[0, 1, 2], &[1, 2, 3], &[3, 4, 5], &[5, 6, 7]]);
        assert!(mantle(&h, &[]).unwrap().is_empty());
        assert_eq!(mantle(&h, &[3]).unwrap(), vec![4, 5, 6, 7]);
        assert!(mantle(&h, &[0]).unwrap().is_empty());
        assert!(mantle(&h, &[5]).is_err());
    }

    #[test]
    fn census_and_pairs() {
        let h = Hypergraph::empty(2, 5);
        assert_eq!(connected_pairs(&h), 5);
        assert_eq!(tree_census(&h).get(&0), Some(&5));
        assert_eq!(complex_count(&h), 0);
        let h = hg(2, 8, &[&[0, 1], &[1, 2], &[2, 3], &[3, 4]]);
        assert_eq!(connected_pairs(&h), 25 + 3);
        // Theta graph: two vertices joined by three disjoint paths.
        let theta = hg(2, 5, &[&[0, 2], &[2, 1], &[0, 3], &[3, 1], &[0, 4], &[4, 1]]);
        assert_eq!(components(&theta).n1(), 2);
        assert_eq!(complex_count(&theta), 1);
    }

    #[test]
    fn sampling_extremes_and_determinism() {
        let mp = ModelParams::from_p(3, 50, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample(&mp, &mut rng).unwrap().edge_count(), 0);
        let mp = ModelParams::from_p(3, 6, 1.0).unwrap();
        assert_eq!(sample(&mp, &mut rng).unwrap().edge_count(), 20);
        let mp = ModelParams::from_lambda(3, 2000, 1.3).unwrap();
        let a = sample(&mp, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample(&mp, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(ModelParams::from_p(3, 5_000_000, 1e-12)
            .map(|mp| sample(&mp, &mut rng).is_err())
            .unwrap_or(true));
    }

    #[test]
    fn peel_order_does_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mp = ModelParams::from_lambda(3, 300, 1.5).unwrap();
        for _ in 0..5 {
            let h = sample(&mp, &mut rng).unwrap();
            let h = mark(&h, 0.05, &mut rng).unwrap();
            let base = extended_core(&h);
            for _ in 0..10 {
                assert_eq!(extended_core_shuffled(&h, &mut rng), base);
            }
        }
    }

    #[test]
    fn edge_list_roundtrip() {
        let h = hg(3, 6, &[&[0, 1, 2], &[3, 4, 5]]).with_marks(vec![4, 1]).unwrap();
        let mut buf = Vec::new();
        h.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "3 6\n0 1 2\n3 4 5\nmarks: 1 4\n");
        assert_eq!(Hypergraph::read_edge_list(&buf[..]).unwrap(), h);
        assert!(Hypergraph::read_edge_list(&b"3 6\n0 1\n"[..]).is_err());
    }
}
