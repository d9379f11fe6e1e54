//! IV-matching over leveled, clustered bipartite graphs.
//!
//! Levels alternate between odd and even. Every vertex of an odd level is
//! either matched to one vertex of the next even level (an I) or is the
//! center of two vertices of the previous even level (a V). Every even
//! vertex belongs to exactly one I or V.
//!
//! Vertices of a cluster have identical neighborhoods, so the exact solver
//! works with counts per cluster: it branches on how many vertices of each
//! even cluster go into V-shapes and checks the I part with a transport
//! flow. [`brute_force`] works on the expanded graph instead.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;
use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub level: usize,
    pub size: usize,
}

/// An IV-matching instance. Cluster `i` owns the vertices
/// `cluster_range(i)`; `adj` lists complete bipartite cluster pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IvInstance {
    pub levels: Vec<Parity>,
    pub clusters: Vec<Cluster>,
    pub adj: Vec<(usize, usize)>,
    /// Both ends of a V-shape must lie in one cluster. Instances built from
    /// star atoms set this, since a loop pairs two edges of one color.
    pub v_within_cluster: bool,
}

/// The edges `(odd vertex, even vertex)` of an IV-subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IvSubgraph {
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IvError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("node budget exhausted after {nodes} nodes with {frontier} open branches")]
    Budget { nodes: u64, frontier: usize },
    #[error("refused: {vertices} vertices exceed the brute-force bound {bound}")]
    TooLarge { vertices: usize, bound: usize },
}

/// Default vertex bound for [`brute_force`].
pub const BRUTE_FORCE_BOUND: usize = 24;

impl IvInstance {
    pub fn add_level(&mut self, p: Parity) -> usize {
        self.levels.push(p);
        self.levels.len() - 1
    }

    pub fn add_cluster(&mut self, level: usize, size: usize) -> usize {
        self.clusters.push(Cluster { level, size });
        self.clusters.len() - 1
    }

    pub fn connect(&mut self, a: usize, b: usize) {
        self.adj.push((a, b));
    }

    pub fn vertex_count(&self) -> usize {
        self.clusters.iter().map(|c| c.size).sum()
    }

    pub fn cluster_range(&self, c: usize) -> Range<usize> {
        let start: usize = self.clusters[..c].iter().map(|c| c.size).sum();
        start..start + self.clusters[c].size
    }

    fn cluster_of_vertex(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.vertex_count());
        for (i, c) in self.clusters.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, c.size));
        }
        out
    }

    fn parity(&self, c: usize) -> Parity {
        self.levels[self.clusters[c].level]
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj.iter().any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b))
    }

    /// Checks the structural rules: alternating levels, edges only between
    /// consecutive levels, and at most one next-level neighbor per even
    /// cluster.
    pub fn validate(&self) -> Result<(), IvError> {
        let bad = |m: String| Err(IvError::Invalid(m));
        for w in self.levels.windows(2) {
            if w[0] == w[1] {
                return bad("levels must alternate between odd and even".into());
            }
        }
        for (i, c) in self.clusters.iter().enumerate() {
            if c.level >= self.levels.len() {
                return bad(format!("cluster {i} refers to missing level {}", c.level));
            }
            if c.size == 0 {
                return bad(format!("cluster {i} is empty"));
            }
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.adj {
            if a >= self.clusters.len() || b >= self.clusters.len() {
                return bad(format!("adjacency {a} {b} names a missing cluster"));
            }
            let (la, lb) = (self.clusters[a].level, self.clusters[b].level);
            if la.abs_diff(lb) != 1 {
                return bad(format!("clusters {a} and {b} are not on consecutive levels"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return bad(format!("adjacency {a} {b} listed twice"));
            }
        }
        for c in 0..self.clusters.len() {
            if self.parity(c) != Parity::Even {
                continue;
            }
            let next = self.next_neighbors(c);
            if next.len() > 1 {
                return bad(format!("even cluster {c} meets {} clusters of the next level", next.len()));
            }
        }
        Ok(())
    }

    fn neighbors_at(&self, c: usize, level: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .adj
            .iter()
            .filter_map(|&(a, b)| {
                if a == c {
                    Some(b)
                } else if b == c {
                    Some(a)
                } else {
                    None
                }
            })
            .filter(|&d| self.clusters[d].level == level)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn next_neighbors(&self, c: usize) -> Vec<usize> {
        self.neighbors_at(c, self.clusters[c].level + 1)
    }

    /// Edges of the expanded bipartite graph as `(odd, even)` pairs.
    pub fn expanded_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(a, b) in &self.adj {
            let (o, e) = if self.parity(a) == Parity::Odd { (a, b) } else { (b, a) };
            for x in self.cluster_range(o) {
                for y in self.cluster_range(e) {
                    out.push((x, y));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Parses the text format: `level odd|even`, `cluster <size>` (on the most
/// recent level), `adj <c> <c>` with 0-based cluster ids in order of
/// appearance, and optionally `vshape same-cluster`. `#` starts a comment.
pub fn parse_instance(text: &str) -> Result<IvInstance, IvError> {
    let mut inst = IvInstance::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| IvError::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["level", "odd"] => {
                inst.add_level(Parity::Odd);
            }
            ["level", "even"] => {
                inst.add_level(Parity::Even);
            }
            ["cluster", n] => {
                let size = n.parse().map_err(|_| err("bad cluster size"))?;
                let level = inst
                    .levels
                    .len()
                    .checked_sub(1)
                    .ok_or_else(|| err("cluster before any level"))?;
                inst.add_cluster(level, size);
            }
            ["adj", a, b] => {
                let a = a.parse().map_err(|_| err("bad cluster id"))?;
                let b = b.parse().map_err(|_| err("bad cluster id"))?;
                inst.connect(a, b);
            }
            ["vshape", "same-cluster"] => inst.v_within_cluster = true,
            ["vshape", "any"] => inst.v_within_cluster = false,
            _ => return Err(err("unrecognized line")),
        }
    }
    inst.validate()?;
    Ok(inst)
}

pub fn serialize_instance(inst: &IvInstance) -> String {
    let mut s = String::new();
    if inst.v_within_cluster {
        s.push_str("vshape same-cluster\n");
    }
    for (l, p) in inst.levels.iter().enumerate() {
        let _ = writeln!(s, "level {}", if *p == Parity::Odd { "odd" } else { "even" });
        for c in inst.clusters.iter().filter(|c| c.level == l) {
            let _ = writeln!(s, "cluster {}", c.size);
        }
    }
    // Clusters are written grouped by level, so ids are renumbered.
    let mut order: Vec<usize> = (0..inst.clusters.len()).collect();
    order.sort_by_key(|&c| inst.clusters[c].level);
    let mut new_id = vec![0; order.len()];
    for (i, &c) in order.iter().enumerate() {
        new_id[c] = i;
    }
    for &(a, b) in &inst.adj {
        let _ = writeln!(s, "adj {} {}", new_id[a], new_id[b]);
    }
    s
}

/// Validates an IV-subgraph against its instance.
pub fn check_subgraph(inst: &IvInstance, sub: &IvSubgraph) -> Result<(), String> {
    let n = inst.vertex_count();
    let cl = inst.cluster_of_vertex();
    let level = |v: usize| inst.clusters[cl[v]].level;
    let mut odd_up = vec![Vec::new(); n];
    let mut odd_down = vec![Vec::new(); n];
    let mut even_deg = vec![0usize; n];
    let mut seen = BTreeSet::new();
    for &(x, y) in &sub.edges {
        if x >= n || y >= n {
            return Err(format!("edge {x} {y} out of range"));
        }
        if inst.levels[level(x)] != Parity::Odd || inst.levels[level(y)] != Parity::Even {
            return Err(format!("edge {x} {y} is not odd-to-even"));
        }
        if !inst.adjacent(cl[x], cl[y]) {
            return Err(format!("edge {x} {y} is not in the instance"));
        }
        if !seen.insert((x, y)) {
            return Err(format!("edge {x} {y} repeated"));
        }
        if level(y) == level(x) + 1 {
            odd_up[x].push(y);
        } else {
            odd_down[x].push(y);
        }
        even_deg[y] += 1;
    }
    for v in 0..n {
        match inst.levels[level(v)] {
            Parity::Even => {
                if even_deg[v] != 1 {
                    return Err(format!("even vertex {v} has degree {}", even_deg[v]));
                }
            }
            Parity::Odd => match (odd_up[v].len(), odd_down[v].len()) {
                (1, 0) => {}
                (0, 2) => {
                    if inst.v_within_cluster && cl[odd_down[v][0]] != cl[odd_down[v][1]] {
                        return Err(format!("V at {v} spans two clusters"));
                    }
                }
                (u, d) => return Err(format!("odd vertex {v} has {u} edges up and {d} down")),
            },
        }
    }
    Ok(())
}

/// Level sizes and edge counts between consecutive levels, paired as
/// (odd level, following even level). `b[i]` counts edges from odd level
/// `i` to even level `i`, `b_prime[i]` from even level `i` to odd level
/// `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowCounts {
    pub a: Vec<usize>,
    pub s: Vec<usize>,
    pub b: Vec<usize>,
    pub b_prime: Vec<usize>,
}

/// Cluster ids of each (odd, even) level pair. A leading even level gets
/// an empty odd partner and a trailing odd level an empty even one.
fn level_pairs(inst: &IvInstance) -> Vec<(Vec<usize>, Vec<usize>)> {
    let offset = usize::from(inst.levels.first() == Some(&Parity::Even));
    let count = (inst.levels.len() + offset).div_ceil(2);
    let mut pairs = vec![(Vec::new(), Vec::new()); count];
    for (c, cl) in inst.clusters.iter().enumerate() {
        let v = cl.level + offset;
        if v % 2 == 0 {
            pairs[v / 2].0.push(c);
        } else {
            pairs[v / 2].1.push(c);
        }
    }
    pairs
}

fn level_sizes(inst: &IvInstance) -> (Vec<usize>, Vec<usize>) {
    let size = |cs: &[usize]| cs.iter().map(|&c| inst.clusters[c].size).sum::<usize>();
    level_pairs(inst).iter().map(|(o, e)| (size(o), size(e))).unzip()
}

/// Computes the forced edge counts `b_0 = a_0`, `b'_i = s_i - b_i`,
/// `b_i = a_i - b'_{i-1} / 2`. Returns `None` when some count is negative or
/// odd where it must be even, or the last level is left unmatched.
pub fn flow_feasibility(inst: &IvInstance) -> Option<FlowCounts> {
    let (a, s) = level_sizes(inst);
    counts_from_sizes(&a, &s)
}

/// [`flow_feasibility`] on bare level sizes.
pub fn counts_from_sizes(a: &[usize], s: &[usize]) -> Option<FlowCounts> {
    let mut b = Vec::with_capacity(a.len());
    let mut bp = Vec::with_capacity(a.len());
    let mut carry = 0usize;
    for i in 0..a.len() {
        let bi = a[i].checked_sub(carry)?;
        let bpi = s[i].checked_sub(bi)?;
        if bpi % 2 == 1 {
            return None;
        }
        b.push(bi);
        bp.push(bpi);
        carry = bpi / 2;
    }
    if carry != 0 {
        return None;
    }
    Some(FlowCounts {
        a: a.to_vec(),
        s: s.to_vec(),
        b,
        b_prime: bp,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub node_budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            node_budget: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub memo_hits: u64,
}

/// Integral flow from `supply` to `demand` along `links` that saturates
/// both sides. Returns the amount on each link.
fn transport(supply: &[usize], demand: &[usize], links: &[(usize, usize)]) -> Option<Vec<usize>> {
    let total: usize = supply.iter().sum();
    if total != demand.iter().sum::<usize>() {
        return None;
    }
    let (ns, nd) = (supply.len(), demand.len());
    let src = ns + nd;
    let snk = src + 1;
    // Residual graph as an edge list with paired reverse edges.
    let mut to = Vec::new();
    let mut cap: Vec<usize> = Vec::new();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); snk + 1];
    let mut add = |a: usize, b: usize, c: usize, to: &mut Vec<usize>, cap: &mut Vec<usize>| {
        out[a].push(to.len());
        to.push(b);
        cap.push(c);
        out[b].push(to.len());
        to.push(a);
        cap.push(0);
    };
    for (i, &x) in supply.iter().enumerate() {
        add(src, i, x, &mut to, &mut cap);
    }
    for (j, &y) in demand.iter().enumerate() {
        add(ns + j, snk, y, &mut to, &mut cap);
    }
    let first_link = to.len();
    for &(i, j) in links {
        add(i, ns + j, total, &mut to, &mut cap);
    }
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; snk + 1];
        let mut queue = VecDeque::from([src]);
        prev[src] = usize::MAX - 1;
        while let Some(u) = queue.pop_front() {
            for &e in &out[u] {
                let v = to[e];
                if cap[e] > 0 && prev[v] == usize::MAX {
                    prev[v] = e;
                    queue.push_back(v);
                }
            }
        }
        if prev[snk] == usize::MAX {
            break;
        }
        let mut push = usize::MAX;
        let mut v = snk;
        while v != src {
            let e = prev[v];
            push = push.min(cap[e]);
            v = to[e ^ 1];
        }
        let mut v = snk;
        while v != src {
            let e = prev[v];
            cap[e] -= push;
            cap[e ^ 1] += push;
            v = to[e ^ 1];
        }
        flow += push;
    }
    if flow != total {
        return None;
    }
    Some((0..links.len()).map(|k| cap[first_link + 2 * k + 1]).collect())
}

/// Choices made at one level pair of a solution.
struct PairChoice {
    /// V endpoints taken from each even cluster.
    v: Vec<usize>,
    /// Flow on each I link.
    flow: Vec<usize>,
}

struct Solver<'a> {
    inst: &'a IvInstance,
    pairs: Vec<(Vec<usize>, Vec<usize>)>,
    /// I links of each pair as (odd position, even position).
    links: Vec<Vec<(usize, usize)>>,
    /// Position in the next odd level of each even cluster's V partner.
    up: Vec<Vec<Option<usize>>>,
    counts: FlowCounts,
    budget: u64,
    stats: SolveStats,
    frontier: usize,
    failed: HashSet<(usize, Vec<usize>)>,
    chosen: Vec<PairChoice>,
}

impl<'a> Solver<'a> {
    fn new(inst: &'a IvInstance, counts: FlowCounts, budget: u64) -> Solver<'a> {
        let pairs = level_pairs(inst);
        let mut links = Vec::new();
        let mut up = Vec::new();
        for (t, (odd, even)) in pairs.iter().enumerate() {
            let mut l = Vec::new();
            for (i, &d) in odd.iter().enumerate() {
                for (j, &c) in even.iter().enumerate() {
                    if inst.adjacent(d, c) {
                        l.push((i, j));
                    }
                }
            }
            links.push(l);
            let next: &[usize] = pairs.get(t + 1).map(|p| p.0.as_slice()).unwrap_or(&[]);
            up.push(
                even.iter()
                    .map(|&c| next.iter().position(|&d| inst.adjacent(c, d)))
                    .collect(),
            );
        }
        Solver {
            inst,
            pairs,
            links,
            up,
            counts,
            budget,
            stats: SolveStats::default(),
            frontier: 0,
            failed: HashSet::new(),
            chosen: Vec::new(),
        }
    }

    fn size(&self, c: usize) -> usize {
        self.inst.clusters[c].size
    }

    /// Splits of the even clusters of pair `t` into V endpoints, largest
    /// clusters first and most V endpoints first.
    fn splits(&self, t: usize) -> Vec<Vec<usize>> {
        let even = &self.pairs[t].1;
        let mut order: Vec<usize> = (0..even.len()).collect();
        order.sort_by_key(|&j| std::cmp::Reverse(self.size(even[j])));
        let next_sizes: Vec<usize> = self
            .pairs
            .get(t + 1)
            .map(|p| p.0.iter().map(|&d| self.size(d)).collect())
            .unwrap_or_default();
        let target = self.counts.b_prime[t];
        let mut out = Vec::new();
        let mut cur = vec![0; even.len()];
        let mut load = vec![0; next_sizes.len()];
        self.split_rec(t, &order, 0, target, &mut cur, &mut load, &next_sizes, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn split_rec(
        &self,
        t: usize,
        order: &[usize],
        k: usize,
        left: usize,
        cur: &mut Vec<usize>,
        load: &mut Vec<usize>,
        next_sizes: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == order.len() {
            if left == 0 && load.iter().zip(next_sizes).all(|(&l, &s)| l % 2 == 0 && l <= 2 * s) {
                out.push(cur.clone());
            }
            return;
        }
        let j = order[k];
        let c = self.pairs[t].1[j];
        let max = match self.up[t][j] {
            Some(_) => self.size(c).min(left),
            None => 0,
        };
        let step = if self.inst.v_within_cluster { 2 } else { 1 };
        let mut v = max - max % step;
        loop {
            if let Some(d) = self.up[t][j] {
                load[d] += v;
            }
            let ok = self.up[t][j].is_none_or(|d| load[d] <= 2 * next_sizes[d]);
            if ok {
                cur[j] = v;
                self.split_rec(t, order, k + 1, left - v, cur, load, next_sizes, out);
            }
            if let Some(d) = self.up[t][j] {
                load[d] -= v;
            }
            if v < step {
                break;
            }
            v -= step;
        }
        cur[j] = 0;
    }

    /// `w` holds the number of V centers in each odd cluster of pair `t`.
    fn run(&mut self, t: usize, w: Vec<usize>) -> Result<bool, IvError> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.budget {
            return Err(IvError::Budget {
                nodes: self.stats.nodes,
                frontier: self.frontier,
            });
        }
        if t == self.pairs.len() {
            return Ok(true);
        }
        if self.failed.contains(&(t, w.clone())) {
            self.stats.memo_hits += 1;
            return Ok(false);
        }
        let (odd, even) = self.pairs[t].clone();
        let supply: Vec<usize> = odd.iter().zip(&w).map(|(&d, &x)| self.size(d) - x).collect();
        let splits = self.splits(t);
        self.frontier += splits.len();
        for (i, v) in splits.iter().enumerate() {
            let demand: Vec<usize> = even.iter().zip(v).map(|(&c, &x)| self.size(c) - x).collect();
            let Some(flow) = transport(&supply, &demand, &self.links[t]) else {
                continue;
            };
            let next_len = self.pairs.get(t + 1).map_or(0, |p| p.0.len());
            let mut next_w = vec![0; next_len];
            for (j, &x) in v.iter().enumerate() {
                if let Some(d) = self.up[t][j] {
                    next_w[d] += x;
                }
            }
            next_w.iter_mut().for_each(|x| *x /= 2);
            self.chosen.push(PairChoice { v: v.clone(), flow });
            if self.run(t + 1, next_w)? {
                self.frontier -= splits.len() - i;
                return Ok(true);
            }
            self.chosen.pop();
        }
        self.frontier -= splits.len();
        self.failed.insert((t, w));
        Ok(false)
    }

    fn build(&self) -> IvSubgraph {
        let inst = self.inst;
        let mut edges = Vec::new();
        // Unused odd vertices and V endpoints per cluster, consumed in order.
        let mut odd_free: BTreeMap<usize, Range<usize>> =
            (0..inst.clusters.len()).map(|c| (c, inst.cluster_range(c))).collect();
        let mut v_ends: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (t, choice) in self.chosen.iter().enumerate() {
            let (odd, even) = &self.pairs[t];
            let mut even_free: Vec<Range<usize>> = even.iter().map(|&c| inst.cluster_range(c)).collect();
            // V endpoints are the tail of each even cluster.
            for (j, &c) in even.iter().enumerate() {
                let r = inst.cluster_range(c);
                let cut = r.end - choice.v[j];
                if let Some(d) = self.up[t][j] {
                    v_ends.entry(self.pairs[t + 1].0[d]).or_default().extend(cut..r.end);
                }
                even_free[j] = r.start..cut;
            }
            for (k, &(i, j)) in self.links[t].iter().enumerate() {
                for _ in 0..choice.flow[k] {
                    let x = odd_free.get_mut(&odd[i]).unwrap().next().unwrap();
                    let y = even_free[j].next().unwrap();
                    edges.push((x, y));
                }
            }
        }
        // V centers are the odd vertices left over after the I edges.
        let cl = inst.cluster_of_vertex();
        for (d, mut ends) in v_ends {
            if inst.v_within_cluster {
                ends.sort_by_key(|&y| (cl[y], y));
            }
            let centers = odd_free.get_mut(&d).unwrap();
            for pair in ends.chunks(2) {
                let x = centers.next().unwrap();
                edges.push((x, pair[0]));
                edges.push((x, pair[1]));
            }
        }
        edges.sort_unstable();
        IvSubgraph { edges }
    }
}

/// Exact solver. Returns an IV-subgraph, validated with
/// [`check_subgraph`], or `None` when none exists.
pub fn solve(inst: &IvInstance, opts: SolveOptions) -> Result<(Option<IvSubgraph>, SolveStats), IvError> {
    inst.validate()?;
    let Some(counts) = flow_feasibility(inst) else {
        return Ok((None, SolveStats::default()));
    };
    let mut solver = Solver::new(inst, counts, opts.node_budget);
    let npairs = solver.pairs.len();
    let w0 = vec![0; solver.pairs.first().map_or(0, |p| p.0.len())];
    let found = npairs == 0 || solver.run(0, w0)?;
    if !found {
        return Ok((None, solver.stats));
    }
    let sub = solver.build();
    check_subgraph(inst, &sub).map_err(|e| IvError::Invalid(format!("solver produced a bad subgraph: {e}")))?;
    Ok((Some(sub), solver.stats))
}

/// Reference search on the expanded graph. Covers even vertices in index
/// order; within a cluster only the first free vertex is tried, since
/// cluster vertices are interchangeable.
pub fn brute_force(inst: &IvInstance, bound: usize) -> Result<Option<IvSubgraph>, IvError> {
    inst.validate()?;
    let n = inst.vertex_count();
    if n > bound {
        return Err(IvError::TooLarge { vertices: n, bound });
    }
    let cl = inst.cluster_of_vertex();
    let mut nbr = vec![Vec::new(); n];
    for (x, y) in inst.expanded_edges() {
        nbr[x].push(y);
        nbr[y].push(x);
    }
    let level = |v: usize| inst.clusters[cl[v]].level;
    let even: Vec<usize> = (0..n).filter(|&v| inst.levels[level(v)] == Parity::Even).collect();
    let odd: Vec<usize> = (0..n).filter(|&v| inst.levels[level(v)] == Parity::Odd).collect();

    struct St<'s> {
        nbr: &'s [Vec<usize>],
        cl: &'s [usize],
        lv: Vec<usize>,
        used: Vec<bool>,
        edges: Vec<(usize, usize)>,
        same: bool,
    }
    fn first_free_per_cluster(st: &St, cands: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        cands.filter(|&x| !st.used[x] && seen.insert(st.cl[x])).collect()
    }
    fn rec(st: &mut St, even: &[usize], odd: &[usize]) -> bool {
        let Some(&u) = even.iter().find(|&&u| !st.used[u]) else {
            return odd.iter().all(|&x| st.used[x]);
        };
        st.used[u] = true;
        let lu = st.lv[u];
        // I: a free odd vertex on the previous level.
        let prev: Vec<usize> = st.nbr[u].iter().copied().filter(|&x| st.lv[x] + 1 == lu).collect();
        for x in first_free_per_cluster(st, prev.into_iter()) {
            st.used[x] = true;
            st.edges.push((x, u));
            if rec(st, even, odd) {
                return true;
            }
            st.edges.pop();
            st.used[x] = false;
        }
        // V: a free odd center on the next level and a second free end.
        let next: Vec<usize> = st.nbr[u].iter().copied().filter(|&x| st.lv[x] == lu + 1).collect();
        for y in first_free_per_cluster(st, next.into_iter()) {
            let ends: Vec<usize> = st.nbr[y]
                .iter()
                .copied()
                .filter(|&z| st.lv[z] == lu && (!st.same || st.cl[z] == st.cl[u]))
                .collect();
            for z in first_free_per_cluster(st, ends.into_iter()) {
                st.used[y] = true;
                st.used[z] = true;
                st.edges.push((y, u));
                st.edges.push((y, z));
                if rec(st, even, odd) {
                    return true;
                }
                st.edges.pop();
                st.edges.pop();
                st.used[y] = false;
                st.used[z] = false;
            }
        }
        st.used[u] = false;
        false
    }
    let mut st = St {
        nbr: &nbr,
        cl: &cl,
        lv: (0..n).map(level).collect(),
        used: vec![false; n],
        edges: Vec::new(),
        same: inst.v_within_cluster,
    };
    if rec(&mut st, &even, &odd) {
        let mut edges = st.edges;
        edges.sort_unstable();
        Ok(Some(IvSubgraph { edges }))
    } else {
        Ok(None)
    }
}

/// Calls `emit` on every valid instance with at most `max_vertices`
/// vertices and at most `max_levels` levels, up to reordering of clusters
/// within a level. Both V rules are produced.
pub fn enumerate_small(max_vertices: usize, max_levels: usize, emit: &mut dyn FnMut(&IvInstance)) {
    fn partitions(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            partitions(n - p, p, cur, out);
            cur.pop();
        }
    }
    // Level-size vectors with total at most max_vertices.
    fn compositions(levels: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == levels {
            out.push(cur.clone());
            return;
        }
        for s in 1..=left {
            cur.push(s);
            compositions(levels, left - s, cur, out);
            cur.pop();
        }
    }
    for nlev in 1..=max_levels {
        let mut sizes = Vec::new();
        compositions(nlev, max_vertices, &mut Vec::new(), &mut sizes);
        for start in [Parity::Odd, Parity::Even] {
            for sz in &sizes {
                let parts: Vec<Vec<Vec<usize>>> = sz
                    .iter()
                    .map(|&s| {
                        let mut out = Vec::new();
                        partitions(s, s, &mut Vec::new(), &mut out);
                        out
                    })
                    .collect();
                let mut pick = vec![0; nlev];
                loop {
                    let mut base = IvInstance::default();
                    for l in 0..nlev {
                        let p = if (l % 2 == 0) == (start == Parity::Odd) { Parity::Odd } else { Parity::Even };
                        base.add_level(p);
                        for &c in &parts[l][pick[l]] {
                            base.add_cluster(l, c);
                        }
                    }
                    let pairs: Vec<(usize, usize)> = (0..base.clusters.len())
                        .flat_map(|a| (0..base.clusters.len()).map(move |b| (a, b)))
                        .filter(|&(a, b)| base.clusters[b].level == base.clusters[a].level + 1)
                        .collect();
                    assert!(pairs.len() < 32, "instance family too large to enumerate");
                    for mask in 0u32..(1 << pairs.len()) {
                        let mut inst = base.clone();
                        inst.adj = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
                        if inst.validate().is_err() {
                            continue;
                        }
                        emit(&inst);
                        inst.v_within_cluster = true;
                        emit(&inst);
                    }
                    let mut l = 0;
                    while l < nlev {
                        pick[l] += 1;
                        if pick[l] < parts[l].len() {
                            break;
                        }
                        pick[l] = 0;
                        l += 1;
                    }
                    if l == nlev {
                        break;
                    }
                }
            }
        }
    }
}

/// Size annotation of a pendant element: vertices and edges.
pub type Size = (usize, usize);

/// A pendant element of a star atom `A` with its list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PendantItem {
    pub size: Size,
    /// Colors whose half-edge is in the list.
    pub halves: BTreeSet<u32>,
    /// Colors whose loop is in the list.
    pub loops: BTreeSet<u32>,
}

/// A dipole edge of the catalog star atom `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DipoleEdge {
    pub color: u32,
    pub size: Size,
    pub halvable: bool,
}

/// Data of a star atom test: the pendant elements of `A`, the edges of
/// the unified dipole of `S` and the remaining half-edges of `S`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StarInput {
    pub pendant: Vec<PendantItem>,
    pub dipole: Vec<DipoleEdge>,
    pub halves: Vec<(u32, Size)>,
}

/// Size of the next element in a chain: two copies glued at the root.
pub fn chain_next(s: Size) -> Size {
    (2 * s.0 - 1, 2 * s.1)
}

/// Start of the chain through `s` and the level of `s` in it.
pub fn chain_base(mut s: Size) -> (Size, usize) {
    let mut m = 0;
    while s.1 > 0 && s.1.is_multiple_of(2) && s.0 % 2 == 1 {
        s = (s.0.div_ceil(2), s.1 / 2);
        m += 1;
    }
    (s, m)
}

/// Builds one IV-matching instance per chain. Levels are numbered so that
/// pendant elements of chain level `m` sit on odd level `2m + 1`, half-edges
/// of `S` matching them on `2m + 2`, and dipole edges just before the
/// level their loop fits. `Ok(None)` when some dipole edge fits no pendant
/// element at all.
pub fn derive_instance(star: &StarInput) -> Result<Option<Vec<IvInstance>>, IvError> {
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
    enum Item {
        Pendant(usize),
        Dipole(usize),
        Half(usize),
    }
    let mut chains: BTreeMap<Size, BTreeMap<usize, Vec<Item>>> = BTreeMap::new();
    for (i, p) in star.pendant.iter().enumerate() {
        let (b, m) = chain_base(p.size);
        chains.entry(b).or_default().entry(2 * m + 1).or_default().push(Item::Pendant(i));
    }
    for (i, &(_, s)) in star.halves.iter().enumerate() {
        let (b, m) = chain_base(s);
        chains.entry(b).or_default().entry(2 * m + 2).or_default().push(Item::Half(i));
    }
    for (i, e) in star.dipole.iter().enumerate() {
        if e.size.0 == 0 {
            return Ok(None);
        }
        let (b, m) = chain_base((e.size.0 - 1, e.size.1));
        chains.entry(b).or_default().entry(2 * m).or_default().push(Item::Dipole(i));
    }
    let pendant_of = |items: &[Item]| match items[0] {
        Item::Pendant(p) => p,
        _ => unreachable!(),
    };
    let mut out = Vec::new();
    for levels in chains.values() {
        let top = *levels.keys().max().unwrap();
        let mut inst = IvInstance {
            v_within_cluster: true,
            ..Default::default()
        };
        let mut ids: Vec<Vec<(usize, Vec<Item>)>> = vec![Vec::new(); top + 1];
        for (l, slot) in ids.iter_mut().enumerate() {
            inst.add_level(if l % 2 == 1 { Parity::Odd } else { Parity::Even });
            let items = levels.get(&l).cloned().unwrap_or_default();
            // Pendant elements cluster by list, S elements by kind and color.
            let mut groups: BTreeMap<(u8, u32, Vec<u32>, Vec<u32>), Vec<Item>> = BTreeMap::new();
            for it in items {
                let key = match it {
                    Item::Pendant(i) => {
                        let p = &star.pendant[i];
                        (0, 0, p.halves.iter().copied().collect(), p.loops.iter().copied().collect())
                    }
                    Item::Dipole(i) => (1, star.dipole[i].color, Vec::new(), Vec::new()),
                    Item::Half(i) => (2, star.halves[i].0, Vec::new(), Vec::new()),
                };
                groups.entry(key).or_default().push(it);
            }
            for g in groups.into_values() {
                let c = inst.add_cluster(l, g.len());
                slot.push((c, g));
            }
        }
        for l in (0..=top).step_by(2) {
            for (c, items) in &ids[l] {
                let (color, half_ok, loop_ok) = match items[0] {
                    Item::Dipole(i) => {
                        let e = &star.dipole[i];
                        (e.color, e.halvable && e.size.0.is_multiple_of(2) && e.size.1.is_multiple_of(2), true)
                    }
                    Item::Half(i) => (star.halves[i].0, true, false),
                    Item::Pendant(_) => unreachable!(),
                };
                if half_ok && l > 0 {
                    for (d, ps) in &ids[l - 1] {
                        if star.pendant[pendant_of(ps)].halves.contains(&color) {
                            inst.connect(*d, *c);
                        }
                    }
                }
                if loop_ok && l < top {
                    for (d, ps) in &ids[l + 1] {
                        if star.pendant[pendant_of(ps)].loops.contains(&color) {
                            inst.connect(*c, *d);
                        }
                    }
                }
            }
        }
        inst.validate()?;
        out.push(inst);
    }
    Ok(Some(out))
}

/// Direct check of a star atom: tries every split of each dipole color
/// class into loops and half-edges and looks for a perfect matching of
/// the resulting elements to the pendant elements.
pub fn star_direct(star: &StarInput) -> bool {
    let mut classes: BTreeMap<u32, Vec<&DipoleEdge>> = BTreeMap::new();
    for e in &star.dipole {
        classes.entry(e.color).or_default().push(e);
    }
    let classes: Vec<Vec<&DipoleEdge>> = classes.into_values().collect();
    // (is_loop, color, size) targets.
    fn rec(star: &StarInput, classes: &[Vec<&DipoleEdge>], k: usize, cur: &mut Vec<(bool, u32, Size)>) -> bool {
        if k == classes.len() {
            let mut targets = cur.clone();
            targets.extend(star.halves.iter().map(|&(c, s)| (false, c, s)));
            if targets.len() != star.pendant.len() {
                return false;
            }
            let adj: Vec<Vec<usize>> = star
                .pendant
                .iter()
                .map(|p| {
                    targets
                        .iter()
                        .enumerate()
                        .filter(|(_, &(lp, c, s))| {
                            s == p.size && if lp { p.loops.contains(&c) } else { p.halves.contains(&c) }
                        })
                        .map(|(j, _)| j)
                        .collect()
                })
                .collect();
            return crate::expansion::bipartite_perfect_matching(star.pendant.len(), targets.len(), &adj).is_some();
        }
        let class = &classes[k];
        let s = class.len();
        let e = class[0];
        for loops in 0..=s / 2 {
            if !e.halvable && s != 2 * loops {
                continue;
            }
            let mark = cur.len();
            for _ in 0..loops {
                cur.push((true, e.color, (e.size.0 - 1, e.size.1)));
            }
            if e.size.0.is_multiple_of(2) && e.size.1.is_multiple_of(2) {
                for _ in 0..s - 2 * loops {
                    cur.push((false, e.color, (e.size.0 / 2, e.size.1 / 2)));
                }
            } else if s > 2 * loops {
                cur.truncate(mark);
                continue;
            }
            if rec(star, classes, k + 1, cur) {
                return true;
            }
            cur.truncate(mark);
        }
        false
    }
    rec(star, &classes, 0, &mut Vec::new())
}

/// Decides a star atom test through [`derive_instance`] and [`solve`].
pub fn star_via_instances(star: &StarInput, opts: SolveOptions) -> Result<bool, IvError> {
    let Some(insts) = derive_instance(star)? else {
        return Ok(false);
    };
    for inst in &insts {
        if solve(inst, opts)?.0.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}
