//! Isomorphism search by color refinement and individualization.
//!
//! Both graphs are refined together so that equal colors mean equal
//! signatures in either graph. Branching individualizes one vertex of the
//! smallest non-trivial cell against each candidate of the matching cell in
//! the other graph. This is exponential in the worst case and is meant for
//! small instances and as a fallback.

use super::{EdgeType, Multigraph, Shape, VertexMapping};
use std::collections::BTreeMap;

/// Default vertex-count guard for the generic search.
pub const DEFAULT_ORACLE_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IsoError {
    #[error("refused: oracle scale only ({vertices} vertices, bound {bound})")]
    Refused { vertices: usize, bound: usize },
    #[error("search budget of {0} nodes exhausted")]
    Budget(u64),
}

#[derive(Clone, Copy, Debug)]
pub struct IsoOptions {
    pub bound: usize,
    pub node_budget: u64,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            bound: DEFAULT_ORACLE_BOUND,
            node_budget: 2_000_000,
        }
    }
}

fn type_code(t: EdgeType) -> u64 {
    match t {
        EdgeType::Halvable => 0,
        EdgeType::Undirected => 1,
        EdgeType::Tail => 2,
        EdgeType::Head => 3,
    }
}

fn label_code(g: &Multigraph, h: usize) -> u64 {
    let he = g.half_edge(h);
    (he.color as u64) << 2 | type_code(he.etype)
}

/// Precomputed local data of one graph.
struct Prep {
    /// Vertex color plus sorted codes of loops, pendants and standalone
    /// half-edges.
    local: Vec<(u32, Vec<u64>)>,
    /// Normal edges as `(pair code, neighbour)`.
    adj: Vec<Vec<(u64, usize)>>,
}

fn prepare(g: &Multigraph) -> Prep {
    let n = g.vertex_count();
    let mut local = Vec::with_capacity(n);
    let mut adj = vec![Vec::new(); n];
    for v in 0..n {
        let mut stubs = Vec::new();
        for &h in g.incident(v) {
            let lh = label_code(g, h);
            match g.shape(h) {
                Shape::Normal => {
                    let p = g.partner(h).unwrap();
                    adj[v].push((lh << 32 | label_code(g, p), g.vertex_of(p).unwrap()));
                }
                Shape::Loop => {
                    let p = g.partner(h).unwrap();
                    stubs.push(1 << 62 | lh << 31 | label_code(g, p));
                }
                Shape::Pendant => {
                    let p = g.partner(h).unwrap();
                    stubs.push(2 << 62 | lh << 31 | label_code(g, p));
                }
                _ => stubs.push(3 << 62 | lh),
            }
        }
        stubs.sort_unstable();
        local.push((g.vertex_color(v), stubs));
    }
    Prep { local, adj }
}

fn initial_colors(a: &Prep, b: &Prep) -> (Vec<u32>, Vec<u32>) {
    let mut keys: BTreeMap<&(u32, Vec<u64>), u32> = BTreeMap::new();
    for k in a.local.iter().chain(b.local.iter()) {
        keys.insert(k, 0);
    }
    for (i, v) in keys.values_mut().enumerate() {
        *v = i as u32;
    }
    let ca = a.local.iter().map(|k| keys[k]).collect();
    let cb = b.local.iter().map(|k| keys[k]).collect();
    (ca, cb)
}

fn class_count(c: &[u32]) -> usize {
    let mut s: Vec<u32> = c.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

fn histogram(c: &[u32]) -> Vec<u32> {
    let mut s = c.to_vec();
    s.sort_unstable();
    s
}

/// Refines both colorings to the coarsest common equitable partition.
/// Returns false if the color histograms diverge.
fn refine(a: &Prep, b: &Prep, ca: &mut Vec<u32>, cb: &mut Vec<u32>) -> bool {
    loop {
        let before = class_count(ca) + class_count(cb);
        let sig = |p: &Prep, c: &[u32], v: usize| -> (u32, Vec<(u64, u32)>) {
            let mut s: Vec<(u64, u32)> = p.adj[v].iter().map(|&(k, w)| (k, c[w])).collect();
            s.sort_unstable();
            (c[v], s)
        };
        let sa: Vec<_> = (0..ca.len()).map(|v| sig(a, ca, v)).collect();
        let sb: Vec<_> = (0..cb.len()).map(|v| sig(b, cb, v)).collect();
        let mut keys: BTreeMap<&(u32, Vec<(u64, u32)>), u32> = BTreeMap::new();
        for k in sa.iter().chain(sb.iter()) {
            keys.insert(k, 0);
        }
        for (i, v) in keys.values_mut().enumerate() {
            *v = i as u32;
        }
        let na: Vec<u32> = sa.iter().map(|k| keys[k]).collect();
        let nb: Vec<u32> = sb.iter().map(|k| keys[k]).collect();
        *ca = na;
        *cb = nb;
        if histogram(ca) != histogram(cb) {
            return false;
        }
        if class_count(ca) + class_count(cb) == before {
            return true;
        }
    }
}

struct Search<'a> {
    g: &'a Multigraph,
    h: &'a Multigraph,
    pg: Prep,
    ph: Prep,
    lists: Option<&'a [Vec<usize>]>,
    nodes: u64,
    budget: u64,
    find_all: bool,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn lists_ok(&self, cg: &[u32], ch: &[u32]) -> bool {
        let Some(lists) = self.lists else { return true };
        for x in 0..cg.len() {
            if !lists[x].iter().any(|&y| y < ch.len() && ch[y] == cg[x]) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, cg: Vec<u32>, ch: Vec<u32>) -> Result<bool, IsoError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(IsoError::Budget(self.budget));
        }
        if !self.lists_ok(&cg, &ch) {
            return Ok(false);
        }
        let mut cells: BTreeMap<u32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (x, &c) in cg.iter().enumerate() {
            cells.entry(c).or_default().0.push(x);
        }
        for (y, &c) in ch.iter().enumerate() {
            cells.entry(c).or_default().1.push(y);
        }
        let target = cells
            .iter()
            .filter(|(_, (xs, _))| xs.len() > 1)
            .min_by_key(|(c, (xs, _))| (xs.len(), **c))
            .map(|(_, cell)| cell.clone());
        let Some((xs, ys)) = target else {
            let mut map = vec![0; cg.len()];
            for (xs, ys) in cells.values() {
                map[xs[0]] = ys[0];
            }
            if edges_compatible(self.g, self.h, &map) {
                self.found.push(map);
                return Ok(true);
            }
            return Ok(false);
        };
        let x = xs[0];
        let fresh = cg.iter().chain(ch.iter()).max().copied().unwrap_or(0) + 1;
        for &y in &ys {
            if let Some(lists) = self.lists {
                if !lists[x].contains(&y) {
                    continue;
                }
            }
            let mut ng = cg.clone();
            let mut nh = ch.clone();
            ng[x] = fresh;
            nh[y] = fresh;
            if !refine(&self.pg, &self.ph, &mut ng, &mut nh) {
                continue;
            }
            if self.run(ng, nh)? && !self.find_all {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn edges_compatible(g: &Multigraph, h: &Multigraph, map: &[usize]) -> bool {
    !half_edge_extensions(g, h, map, 1).is_empty()
}

/// Finds an isomorphism `g -> h` with `map(x) ∈ lists[x]` for every vertex.
pub fn find_isomorphism(
    g: &Multigraph,
    h: &Multigraph,
    lists: Option<&[Vec<usize>]>,
    opts: IsoOptions,
) -> Result<Option<VertexMapping>, IsoError> {
    let all = search(g, h, lists, opts, false)?;
    Ok(all.into_iter().next().map(|vmap| {
        let half = half_edge_extensions(g, h, &vmap, 1).remove(0);
        VertexMapping { vertex: vmap, half }
    }))
}

/// [`find_isomorphism`] with default options.
pub fn backtrack_list_iso(
    g: &Multigraph,
    h: &Multigraph,
    lists: Option<&[Vec<usize>]>,
) -> Result<Option<VertexMapping>, IsoError> {
    find_isomorphism(g, h, lists, IsoOptions::default())
}

fn search(
    g: &Multigraph,
    h: &Multigraph,
    lists: Option<&[Vec<usize>]>,
    opts: IsoOptions,
    find_all: bool,
) -> Result<Vec<Vec<usize>>, IsoError> {
    let n = g.vertex_count();
    if n > opts.bound || h.vertex_count() > opts.bound {
        return Err(IsoError::Refused {
            vertices: n.max(h.vertex_count()),
            bound: opts.bound,
        });
    }
    if n != h.vertex_count()
        || g.half_count() != h.half_count()
        || g.label_census() != h.label_census()
    {
        return Ok(Vec::new());
    }
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    let pg = prepare(g);
    let ph = prepare(h);
    let (mut cg, mut ch) = initial_colors(&pg, &ph);
    if histogram(&cg) != histogram(&ch) || !refine(&pg, &ph, &mut cg, &mut ch) {
        return Ok(Vec::new());
    }
    let mut s = Search {
        g,
        h,
        pg,
        ph,
        lists,
        nodes: 0,
        budget: opts.node_budget,
        find_all,
        found: Vec::new(),
    };
    s.run(cg, ch)?;
    Ok(s.found)
}

/// All automorphisms of `g`, including those that only permute parallel
/// edges, loops, pendant edges or half-edges. Exponential; oracle use only.
pub fn automorphisms_bruteforce(
    g: &Multigraph,
    opts: IsoOptions,
) -> Result<Vec<VertexMapping>, IsoError> {
    let maps = search(g, g, None, opts, true)?;
    let mut out = Vec::new();
    for vmap in maps {
        for half in half_edge_extensions(g, g, &vmap, usize::MAX) {
            out.push(VertexMapping {
                vertex: vmap.clone(),
                half,
            });
            if out.len() as u64 > opts.node_budget {
                return Err(IsoError::Budget(opts.node_budget));
            }
        }
    }
    Ok(out)
}

type Label = (u32, EdgeType);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Key {
    Edge(usize, usize, Label, Label),
    Pendant(usize, Label, Label),
    Standalone(usize, Label),
}

/// Oriented edges of `g` in canonical orientation, keyed through `map`.
fn g_edges(g: &Multigraph, map: &[usize]) -> Vec<(Key, usize, Option<usize>)> {
    let mut out = Vec::new();
    for r in g.edge_reps() {
        match g.shape(r) {
            Shape::Normal | Shape::Loop => {
                let p = g.partner(r).unwrap();
                let (a, b) = (g.vertex_of(r).unwrap(), g.vertex_of(p).unwrap());
                let (x, y) = if (a, g.label(r)) <= (b, g.label(p)) {
                    (r, p)
                } else {
                    (p, r)
                };
                let key = Key::Edge(
                    map[g.vertex_of(x).unwrap()],
                    map[g.vertex_of(y).unwrap()],
                    g.label(x),
                    g.label(y),
                );
                out.push((key, x, Some(y)));
            }
            Shape::Pendant | Shape::Free => {
                let p = g.partner(r).unwrap();
                let (x, y) = if g.shape(r) == Shape::Pendant { (r, p) } else { (p, r) };
                let key = Key::Pendant(map[g.vertex_of(x).unwrap()], g.label(x), g.label(y));
                out.push((key, x, Some(y)));
            }
            Shape::Standalone => {
                let key = Key::Standalone(map[g.vertex_of(r).unwrap()], g.label(r));
                out.push((key, r, None));
            }
        }
    }
    out
}

/// Oriented edges of `h`; non-loop edges appear in both orientations.
fn h_edges(h: &Multigraph) -> Vec<(Key, usize, Option<usize>)> {
    let mut out = Vec::new();
    for r in h.edge_reps() {
        match h.shape(r) {
            Shape::Normal => {
                let p = h.partner(r).unwrap();
                let (a, b) = (h.vertex_of(r).unwrap(), h.vertex_of(p).unwrap());
                out.push((Key::Edge(a, b, h.label(r), h.label(p)), r, Some(p)));
                out.push((Key::Edge(b, a, h.label(p), h.label(r)), p, Some(r)));
            }
            Shape::Loop => {
                let p = h.partner(r).unwrap();
                let a = h.vertex_of(r).unwrap();
                let (x, y) = if h.label(r) <= h.label(p) { (r, p) } else { (p, r) };
                out.push((Key::Edge(a, a, h.label(x), h.label(y)), x, Some(y)));
            }
            Shape::Pendant | Shape::Free => {
                let p = h.partner(r).unwrap();
                let (x, y) = if h.shape(r) == Shape::Pendant { (r, p) } else { (p, r) };
                out.push((
                    Key::Pendant(h.vertex_of(x).unwrap(), h.label(x), h.label(y)),
                    x,
                    Some(y),
                ));
            }
            Shape::Standalone => {
                out.push((Key::Standalone(h.vertex_of(r).unwrap(), h.label(r)), r, None));
            }
        }
    }
    out
}

type Pair = (usize, Option<usize>);

/// Half-edge bijections extending the vertex bijection `map`, up to `limit`
/// of them. Empty if `map` does not extend to an isomorphism.
pub fn half_edge_extensions(
    g: &Multigraph,
    h: &Multigraph,
    map: &[usize],
    limit: usize,
) -> Vec<Vec<usize>> {
    if g.half_count() != h.half_count() {
        return Vec::new();
    }
    let mut groups: BTreeMap<Key, (Vec<Pair>, Vec<Pair>)> = BTreeMap::new();
    for (k, x, y) in g_edges(g, map) {
        groups.entry(k).or_default().0.push((x, y));
    }
    for (k, x, y) in h_edges(h) {
        if let Some(e) = groups.get_mut(&k) {
            e.1.push((x, y));
        }
    }
    let mut groups: Vec<Group> = groups
        .into_iter()
        .map(|(k, (src, dst))| {
            let flip = matches!(k, Key::Edge(u, v, l1, l2) if u == v && l1 == l2);
            let used = vec![false; dst.len()];
            Group {
                flip,
                src,
                dst,
                used,
            }
        })
        .collect();
    if groups.iter().any(|gr| gr.src.len() != gr.dst.len()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![usize::MAX; g.half_count()];
    extend(&mut groups, 0, 0, &mut cur, &mut out, limit);
    out
}

struct Group {
    flip: bool,
    src: Vec<Pair>,
    dst: Vec<Pair>,
    used: Vec<bool>,
}

fn extend(
    groups: &mut [Group],
    gi: usize,
    ei: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if gi == groups.len() {
        out.push(cur.clone());
        return;
    }
    if ei == groups[gi].src.len() {
        extend(groups, gi + 1, 0, cur, out, limit);
        return;
    }
    let (x, y) = groups[gi].src[ei];
    let orientations: &[bool] = if groups[gi].flip { &[false, true] } else { &[false] };
    for j in 0..groups[gi].dst.len() {
        if groups[gi].used[j] {
            continue;
        }
        groups[gi].used[j] = true;
        let (a, b) = groups[gi].dst[j];
        for &f in orientations {
            let (a, b) = if f { (b.unwrap(), Some(a)) } else { (a, b) };
            cur[x] = a;
            if let (Some(y), Some(b)) = (y, b) {
                cur[y] = b;
            }
            extend(groups, gi, ei + 1, cur, out, limit);
        }
        groups[gi].used[j] = false;
        if out.len() >= limit {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::parse_graph;

    fn cycle(n: usize) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n, 0, EdgeType::Halvable);
        }
        g
    }

    fn complete(n: usize) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j, 0, EdgeType::Halvable);
            }
        }
        g
    }

    fn is_iso(g: &Multigraph, h: &Multigraph, m: &VertexMapping) -> bool {
        for x in 0..g.half_count() {
            let a = g.half_edge(x);
            let b = h.half_edge(m.half[x]);
            if a.color != b.color || a.etype != b.etype {
                return false;
            }
            if a.vertex.map(|v| m.vertex[v]) != b.vertex {
                return false;
            }
            if a.partner.map(|p| m.half[p]) != b.partner {
                return false;
            }
        }
        true
    }

    #[test]
    fn cycles_and_complete_graphs() {
        let c4 = cycle(4);
        let m = backtrack_list_iso(&c4, &c4, None).unwrap().unwrap();
        assert!(is_iso(&c4, &c4, &m));
        assert!(backtrack_list_iso(&c4, &complete(4), None).unwrap().is_none());
    }

    #[test]
    fn lists_pin_a_transposition() {
        let k4 = complete(4);
        let mut lists = vec![vec![0, 1, 2, 3]; 4];
        lists[0] = vec![1];
        lists[1] = vec![0];
        let m = backtrack_list_iso(&k4, &k4, Some(&lists)).unwrap().unwrap();
        assert_eq!(m.vertex[0], 1);
        assert_eq!(m.vertex[1], 0);
        assert!(is_iso(&k4, &k4, &m));
    }

    #[test]
    fn automorphism_counts() {
        let opts = IsoOptions::default();
        assert_eq!(automorphisms_bruteforce(&complete(4), opts).unwrap().len(), 24);
        assert_eq!(automorphisms_bruteforce(&cycle(5), opts).unwrap().len(), 10);
        // Dipole with three parallel halvable edges: swap ends, permute edges.
        let d = parse_graph("v 1\nv 2\ne 1 2\ne 1 2\ne 1 2").unwrap();
        assert_eq!(automorphisms_bruteforce(&d, opts).unwrap().len(), 12);
        // A halvable loop can be flipped.
        let l = parse_graph("v 1\ne 1 1").unwrap();
        assert_eq!(automorphisms_bruteforce(&l, opts).unwrap().len(), 2);
        // A directed loop cannot.
        let a = parse_graph("v 1\na 1 1").unwrap();
        assert_eq!(automorphisms_bruteforce(&a, opts).unwrap().len(), 1);
    }

    #[test]
    fn size_guard_refuses() {
        let g = cycle(10);
        let opts = IsoOptions {
            bound: 5,
            ..IsoOptions::default()
        };
        assert!(matches!(
            find_isomorphism(&g, &g, None, opts),
            Err(IsoError::Refused { .. })
        ));
    }

    #[test]
    fn colors_and_orientation_matter() {
        let a = parse_graph("v 1\nv 2\nv 3\na 1 2\na 2 3\na 3 1").unwrap();
        let b = parse_graph("v 1\nv 2\nv 3\na 1 2\na 2 3\na 1 3").unwrap();
        assert!(backtrack_list_iso(&a, &b, None).unwrap().is_none());
        let c = parse_graph("v 1\nv 2\ne 1 2 c1\ne 1 2 c2").unwrap();
        let d = parse_graph("v 1\nv 2\ne 1 2 c1\ne 1 2 c1").unwrap();
        assert!(backtrack_list_iso(&c, &d, None).unwrap().is_none());
    }
}
