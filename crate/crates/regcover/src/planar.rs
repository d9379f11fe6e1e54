//! Planar embeddings and automorphisms of 3-connected primitive graphs.
//!
//! Embeddings are found by path addition into faces (Demoucron, Malgrange
//! and Pertuiset). A 3-connected planar graph has a unique embedding up to
//! mirror image, so an automorphism is fixed by the image of one dart and
//! an orientation; propagating around rotations gives every candidate in
//! `O(e)` time each.

use crate::multigraph::{
    automorphisms_bruteforce, half_edge_extensions, EdgeType, IsoError, IsoOptions, Multigraph,
    Shape, VertexMapping,
};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanarError {
    #[error("graph is not planar")]
    NonPlanar,
}

/// Rotation system of a simple graph: cyclic neighbour order per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub rot: Vec<Vec<usize>>,
    pos: Vec<HashMap<usize, usize>>,
}

impl Embedding {
    fn from_faces(n: usize, faces: &[Vec<usize>], adj: &[BTreeSet<usize>]) -> Embedding {
        // succ[v][u] = w when u -> v -> w is consecutive on a face.
        let mut succ: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n];
        for f in faces {
            let k = f.len();
            for i in 0..k {
                let (u, v, w) = (f[i], f[(i + 1) % k], f[(i + 2) % k]);
                succ[v].insert(u, w);
            }
        }
        let mut rot = vec![Vec::new(); n];
        for v in 0..n {
            let Some(&start) = adj[v].iter().next() else { continue };
            let mut x = start;
            loop {
                rot[v].push(x);
                x = succ[v][&x];
                if x == start {
                    break;
                }
            }
        }
        Embedding::from_rot(rot)
    }

    fn from_rot(rot: Vec<Vec<usize>>) -> Embedding {
        let pos = rot
            .iter()
            .map(|r| r.iter().enumerate().map(|(i, &x)| (x, i)).collect())
            .collect();
        Embedding { rot, pos }
    }

    /// Neighbour after `u` in the rotation at `v`, or before it if `rev`.
    fn next(&self, v: usize, u: usize, rev: bool) -> usize {
        let r = &self.rot[v];
        let i = self.pos[v][&u];
        if rev {
            r[(i + r.len() - 1) % r.len()]
        } else {
            r[(i + 1) % r.len()]
        }
    }

    /// Number of faces traced by the rotation system.
    pub fn face_count(&self) -> usize {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut faces = 0;
        for v in 0..self.rot.len() {
            for &u in &self.rot[v] {
                if seen.contains(&(v, u)) {
                    continue;
                }
                faces += 1;
                let (mut a, mut b) = (v, u);
                while seen.insert((a, b)) {
                    let c = self.next(b, a, false);
                    a = b;
                    b = c;
                }
            }
        }
        faces
    }
}

/// Simple adjacency of the normal edges of `g` (loops and parallels dropped).
pub fn simple_adjacency(g: &Multigraph) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); g.vertex_count()];
    for h in 0..g.half_count() {
        if g.shape(h) == Shape::Normal {
            let (u, v) = (g.vertex_of(h).unwrap(), g.opposite_vertex(h).unwrap());
            adj[u].insert(v);
        }
    }
    adj
}

fn find_cycle(adj: &[BTreeSet<usize>], start: usize) -> Option<Vec<usize>> {
    // DFS until a back edge closes a cycle through the tree path.
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut stack = vec![(start, usize::MAX)];
    while let Some((v, p)) = stack.pop() {
        if depth[v] != usize::MAX {
            continue;
        }
        parent[v] = p;
        depth[v] = if p == usize::MAX { 0 } else { depth[p] + 1 };
        for &w in &adj[v] {
            if w == p {
                continue;
            }
            if depth[w] != usize::MAX && depth[w] < depth[v] {
                let mut cyc = vec![v];
                let mut x = v;
                while x != w {
                    x = parent[x];
                    cyc.push(x);
                }
                return Some(cyc);
            }
            if depth[w] == usize::MAX {
                stack.push((w, v));
            }
        }
    }
    None
}

/// Embeds a 2-connected simple graph given by adjacency sets. Vertices with
/// no neighbours are ignored.
pub fn embed_biconnected(adj: &[BTreeSet<usize>]) -> Result<Embedding, PlanarError> {
    let n = adj.len();
    let active: Vec<usize> = (0..n).filter(|&v| !adj[v].is_empty()).collect();
    let edges: usize = adj.iter().map(|a| a.len()).sum::<usize>() / 2;
    if active.len() >= 3 && edges > 3 * active.len() - 6 {
        return Err(PlanarError::NonPlanar);
    }
    if active.len() <= 2 || edges == active.len() {
        // A single edge or a cycle.
        let faces = if edges == 0 {
            Vec::new()
        } else if active.len() == 2 {
            vec![vec![active[0], active[1]]]
        } else {
            let cyc = find_cycle(adj, active[0]).unwrap();
            let mut rev = cyc.clone();
            rev.reverse();
            vec![cyc, rev]
        };
        return Ok(Embedding::from_faces(n, &faces, adj));
    }
    let cyc = find_cycle(adj, active[0]).ok_or(PlanarError::NonPlanar)?;
    let mut in_h = vec![false; n];
    let mut h_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..cyc.len() {
        let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
        in_h[a] = true;
        h_edges.insert((a.min(b), a.max(b)));
    }
    let mut rev = cyc.clone();
    rev.reverse();
    let mut faces = vec![cyc, rev];

    while h_edges.len() < edges {
        let fragments = fragments(adj, &in_h, &h_edges);
        let mut choice: Option<(usize, usize)> = None;
        for (fi, frag) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&f| frag.attach.iter().all(|a| faces[f].contains(a)))
                .collect();
            match admissible.len() {
                0 => return Err(PlanarError::NonPlanar),
                1 => {
                    choice = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, face) = choice.unwrap();
        let path = fragment_path(adj, &in_h, &fragments[fi]);
        for w in path.windows(2) {
            h_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        for &x in &path {
            in_h[x] = true;
        }
        let f = faces.swap_remove(face);
        let (a, b) = (path[0], *path.last().unwrap());
        let i = f.iter().position(|&x| x == a).unwrap();
        let j = f.iter().position(|&x| x == b).unwrap();
        let k = f.len();
        let seg = |from: usize, to: usize| -> Vec<usize> {
            let mut s = vec![f[from]];
            let mut x = from;
            while x != to {
                x = (x + 1) % k;
                s.push(f[x]);
            }
            s
        };
        let inner = &path[1..path.len() - 1];
        let mut f1 = seg(i, j);
        f1.extend(inner.iter().rev());
        let mut f2 = seg(j, i);
        f2.extend(inner.iter());
        faces.push(f1);
        faces.push(f2);
    }
    Ok(Embedding::from_faces(n, &faces, adj))
}

struct Fragment {
    attach: Vec<usize>,
    /// Interior vertices; empty for a chord.
    inner: Vec<usize>,
}

fn fragments(
    adj: &[BTreeSet<usize>],
    in_h: &[bool],
    h_edges: &BTreeSet<(usize, usize)>,
) -> Vec<Fragment> {
    let n = adj.len();
    let mut out = Vec::new();
    for u in 0..n {
        if !in_h[u] {
            continue;
        }
        for &v in &adj[u] {
            if u < v && in_h[v] && !h_edges.contains(&(u, v)) {
                out.push(Fragment {
                    attach: vec![u, v],
                    inner: Vec::new(),
                });
            }
        }
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if in_h[s] || seen[s] || adj[s].is_empty() {
            continue;
        }
        let mut inner = vec![s];
        let mut attach = BTreeSet::new();
        seen[s] = true;
        let mut i = 0;
        while i < inner.len() {
            let x = inner[i];
            i += 1;
            for &y in &adj[x] {
                if in_h[y] {
                    attach.insert(y);
                } else if !seen[y] {
                    seen[y] = true;
                    inner.push(y);
                }
            }
        }
        out.push(Fragment {
            attach: attach.into_iter().collect(),
            inner,
        });
    }
    out
}

fn fragment_path(adj: &[BTreeSet<usize>], in_h: &[bool], frag: &Fragment) -> Vec<usize> {
    if frag.inner.is_empty() {
        return frag.attach.clone();
    }
    let a = frag.attach[0];
    let inner: BTreeSet<usize> = frag.inner.iter().copied().collect();
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut q = VecDeque::new();
    for &x in &adj[a] {
        if inner.contains(&x) && !prev.contains_key(&x) {
            prev.insert(x, a);
            q.push_back(x);
        }
    }
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if in_h[y] && y != a {
                let mut path = vec![y, x];
                let mut z = x;
                while let Some(&p) = prev.get(&z) {
                    path.push(p);
                    if p == a {
                        break;
                    }
                    z = p;
                }
                path.reverse();
                return path;
            }
            if inner.contains(&y) && !prev.contains_key(&y) {
                prev.insert(y, x);
                q.push_back(y);
            }
        }
    }
    unreachable!("fragment of a 2-connected graph has two attachments")
}

/// True if every block of the underlying simple graph is planar.
pub fn is_planar(g: &Multigraph) -> bool {
    let adj = simple_adjacency(g);
    let n = adj.len();
    // Split into biconnected pieces via the block-tree of the graph itself.
    let Ok(tree) = crate::decomposition::BlockTree::new(g) else {
        return components_planar(g);
    };
    for b in &tree.blocks {
        if b.stub || b.vertices.len() < 5 {
            continue;
        }
        let mut sub = vec![BTreeSet::new(); n];
        for &v in &b.vertices {
            for &w in &adj[v] {
                if b.vertices.binary_search(&w).is_ok() {
                    sub[v].insert(w);
                }
            }
        }
        if embed_biconnected(&sub).is_err() {
            return false;
        }
    }
    true
}

fn components_planar(g: &Multigraph) -> bool {
    let mut seen = vec![false; g.vertex_count()];
    for s in 0..g.vertex_count() {
        if seen[s] {
            continue;
        }
        let comp = g.component_of(s);
        for &v in &comp {
            seen[v] = true;
        }
        let halves: Vec<usize> = comp.iter().flat_map(|&v| g.incident(v).to_vec()).collect();
        let (sub, _, _) = g.subgraph(&comp, &halves, true);
        if !is_planar(&sub) {
            return false;
        }
    }
    true
}

/// True if the simple graph on the active vertices is 3-connected.
pub fn is_three_connected(adj: &[BTreeSet<usize>]) -> bool {
    let active: Vec<usize> = (0..adj.len()).filter(|&v| !adj[v].is_empty()).collect();
    if active.len() < 4 {
        return false;
    }
    for (i, &a) in active.iter().enumerate() {
        for &b in &active[i + 1..] {
            let start = *active.iter().find(|&&v| v != a && v != b).unwrap();
            let mut seen: BTreeSet<usize> = BTreeSet::from([a, b, start]);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() < active.len() {
                return false;
            }
        }
    }
    true
}

/// Per-vertex label including the labels of attached stubs.
fn vertex_signature(g: &Multigraph, v: usize) -> (u32, Vec<(u32, EdgeType, Shape)>) {
    let mut stubs: Vec<(u32, EdgeType, Shape)> = g
        .incident(v)
        .iter()
        .filter(|&&h| g.shape(h) != Shape::Normal)
        .map(|&h| {
            let (c, t) = g.label(h);
            (c, t, g.shape(h))
        })
        .collect();
    stubs.sort_unstable();
    (g.vertex_color(v), stubs)
}

/// Labels of the normal edges between `u` and `v` as seen from `u`.
fn dart_label(g: &Multigraph, u: usize, v: usize) -> Vec<(u32, EdgeType)> {
    let mut l: Vec<(u32, EdgeType)> =
        g.half_edges_between(u, v).into_iter().map(|h| g.label(h)).collect();
    l.sort_unstable();
    l
}

struct Labelled<'a> {
    g: &'a Multigraph,
    emb: Embedding,
    sig: Vec<(u32, Vec<(u32, EdgeType, Shape)>)>,
}

impl<'a> Labelled<'a> {
    fn new(g: &'a Multigraph) -> Result<Labelled<'a>, PlanarError> {
        let emb = embed_biconnected(&simple_adjacency(g))?;
        let sig = (0..g.vertex_count()).map(|v| vertex_signature(g, v)).collect();
        Ok(Labelled { g, emb, sig })
    }
}

/// Propagates the dart map `(u0,v0) -> (x0,y0)` through both rotation
/// systems. Returns the vertex map if it is a label-preserving bijection.
fn propagate(
    a: &Labelled,
    b: &Labelled,
    d0: (usize, usize),
    d1: (usize, usize),
    mirror: bool,
    lists: Option<&[Vec<usize>]>,
) -> Option<Vec<usize>> {
    let n = a.g.vertex_count();
    let mut vmap = vec![usize::MAX; n];
    let mut used = vec![false; b.g.vertex_count()];
    let mut dmap: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut q = VecDeque::from([(d0, d1)]);
    let set = |vmap: &mut Vec<usize>, used: &mut Vec<bool>, x: usize, y: usize| -> bool {
        if vmap[x] == usize::MAX {
            if used[y] || a.sig[x] != b.sig[y] {
                return false;
            }
            if let Some(l) = lists {
                if !l[x].contains(&y) {
                    return false;
                }
            }
            vmap[x] = y;
            used[y] = true;
            true
        } else {
            vmap[x] == y
        }
    };
    while let Some(((u, v), (x, y))) = q.pop_front() {
        if let Some(&prev) = dmap.get(&(u, v)) {
            if prev != (x, y) {
                return None;
            }
            continue;
        }
        if !set(&mut vmap, &mut used, u, x) || !set(&mut vmap, &mut used, v, y) {
            return None;
        }
        if a.emb.rot[u].len() != b.emb.rot[x].len() || dart_label(a.g, u, v) != dart_label(b.g, x, y) {
            return None;
        }
        dmap.insert((u, v), (x, y));
        q.push_back(((v, u), (y, x)));
        q.push_back(((u, a.emb.next(u, v, false)), (x, b.emb.next(x, y, mirror))));
    }
    if vmap.contains(&usize::MAX) {
        return None;
    }
    Some(vmap)
}

fn first_dart(l: &Labelled) -> Option<(usize, usize)> {
    (0..l.emb.rot.len()).find_map(|v| l.emb.rot[v].first().map(|&w| (v, w)))
}

fn darts(l: &Labelled) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for v in 0..l.emb.rot.len() {
        for &w in &l.emb.rot[v] {
            out.push((v, w));
        }
    }
    out
}

/// All vertex maps of label-preserving automorphisms of a graph whose
/// normal edges form a 3-connected planar graph on all its vertices.
pub fn vertex_automorphisms_3conn(g: &Multigraph) -> Result<Vec<Vec<usize>>, PlanarError> {
    let l = Labelled::new(g)?;
    let Some(d0) = first_dart(&l) else {
        return Ok(vec![(0..g.vertex_count()).collect()]);
    };
    let mut out = BTreeSet::new();
    for d1 in darts(&l) {
        for mirror in [false, true] {
            if let Some(m) = propagate(&l, &l, d0, d1, mirror, None) {
                out.insert(m);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// An isomorphism between two graphs with 3-connected planar cores that
/// respects the vertex lists.
pub fn list_iso_3conn(
    g: &Multigraph,
    h: &Multigraph,
    lists: Option<&[Vec<usize>]>,
) -> Result<Option<VertexMapping>, PlanarError> {
    if g.vertex_count() != h.vertex_count()
        || g.half_count() != h.half_count()
        || g.label_census() != h.label_census()
    {
        return Ok(None);
    }
    let a = Labelled::new(g)?;
    let b = Labelled::new(h)?;
    let Some(d0) = first_dart(&a) else {
        return Ok(None);
    };
    for d1 in darts(&b) {
        for mirror in [false, true] {
            if let Some(vmap) = propagate(&a, &b, d0, d1, mirror, lists) {
                if let Some(half) = half_edge_extensions(g, h, &vmap, 1).into_iter().next() {
                    return Ok(Some(VertexMapping { vertex: vmap, half }));
                }
            }
        }
    }
    Ok(None)
}

/// Cap on half-edge extensions per vertex map; single stubs give at most
/// two per reversible loop.
const EXTENSION_LIMIT: usize = 1 << 12;

/// The automorphism group of a primitive graph. Uses the planar method
/// for 3-connected planar cores and the generic search otherwise.
pub fn primitive_automorphisms(
    g: &Multigraph,
    opts: IsoOptions,
) -> Result<Vec<VertexMapping>, IsoError> {
    let adj = simple_adjacency(g);
    let all_in_core = (0..g.vertex_count()).all(|v| !adj[v].is_empty());
    if all_in_core && is_three_connected(&adj) {
        if let Ok(vmaps) = vertex_automorphisms_3conn(g) {
            let mut out = Vec::new();
            for vmap in vmaps {
                for half in half_edge_extensions(g, g, &vmap, EXTENSION_LIMIT) {
                    out.push(VertexMapping {
                        vertex: vmap.clone(),
                        half,
                    });
                }
            }
            return Ok(out);
        }
    }
    automorphisms_bruteforce(g, opts)
}

fn is_identity(m: &VertexMapping) -> bool {
    m.vertex.iter().enumerate().all(|(i, &v)| i == v)
        && m.half.iter().enumerate().all(|(i, &h)| i == h)
}

/// Fixed-point free on vertices and half-edges, reversing only halvable
/// edges.
pub fn acts_freely(g: &Multigraph, m: &VertexMapping) -> bool {
    if m.vertex.iter().enumerate().any(|(i, &v)| i == v) {
        return false;
    }
    (0..g.half_count()).all(|x| {
        m.half[x] != x
            && (g.partner(x) != Some(m.half[x]) || g.half_edge(x).etype == EdgeType::Halvable)
    })
}

/// Every semiregular subgroup of the group listed in `auts`, identity
/// first in each. Built from cyclic subgroups by repeated joins.
pub fn semiregular_subgroups(g: &Multigraph, auts: &[VertexMapping]) -> Vec<Vec<VertexMapping>> {
    let key = |m: &VertexMapping| (m.vertex.clone(), m.half.clone());
    let mut elems: Vec<VertexMapping> = auts.to_vec();
    if let Some(i) = elems.iter().position(is_identity) {
        elems.swap(0, i);
    } else {
        elems.insert(0, VertexMapping::identity(g));
    }
    let index: HashMap<(Vec<usize>, Vec<usize>), usize> =
        elems.iter().enumerate().map(|(i, m)| (key(m), i)).collect();
    let free: Vec<bool> = elems
        .iter()
        .enumerate()
        .map(|(i, m)| i == 0 || acts_freely(g, m))
        .collect();
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mul = |a: usize, b: usize| -> usize {
        *table
            .entry((a, b))
            .or_insert_with(|| index[&key(&elems[a].then(&elems[b]))])
    };
    let mut closure = |gens: &BTreeSet<usize>| -> Option<BTreeSet<usize>> {
        let mut set = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for &s in gens {
                let c = mul(a, s);
                if !free[c] {
                    return None;
                }
                if set.insert(c) {
                    queue.push_back(c);
                }
            }
        }
        Some(set)
    };
    let mut groups: BTreeSet<BTreeSet<usize>> = BTreeSet::from([BTreeSet::from([0])]);
    let mut cyclic = Vec::new();
    for f in 1..elems.len() {
        if free[f] {
            if let Some(s) = closure(&BTreeSet::from([f])) {
                if groups.insert(s.clone()) {
                    cyclic.push(s);
                }
            }
        }
    }
    let mut frontier: Vec<BTreeSet<usize>> = cyclic.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for c in &cyclic {
                if c.is_subset(a) {
                    continue;
                }
                let gens: BTreeSet<usize> = a.union(c).copied().collect();
                if let Some(s) = closure(&gens) {
                    if groups.insert(s.clone()) {
                        next.push(s);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut list: Vec<BTreeSet<usize>> = groups.into_iter().collect();
    list.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    list.into_iter()
        .map(|s| s.into_iter().map(|i| elems[i].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::parse_graph;

    fn adj_of(text: &str) -> Vec<BTreeSet<usize>> {
        simple_adjacency(&parse_graph(text).unwrap())
    }

    const K4: &str = "v 1\nv 2\nv 3\nv 4\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4";

    fn k5() -> String {
        let mut s = String::new();
        for i in 1..=5 {
            s.push_str(&format!("v {i}\n"));
        }
        for i in 1..=5 {
            for j in i + 1..=5 {
                s.push_str(&format!("e {i} {j}\n"));
            }
        }
        s
    }

    fn k33() -> String {
        let mut s = String::new();
        for i in 1..=6 {
            s.push_str(&format!("v {i}\n"));
        }
        for i in 1..=3 {
            for j in 4..=6 {
                s.push_str(&format!("e {i} {j}\n"));
            }
        }
        s
    }

    #[test]
    fn embeddings_satisfy_euler() {
        let e = embed_biconnected(&adj_of(K4)).unwrap();
        assert_eq!(e.face_count(), 4);
        let cube = "v 1\nv 2\nv 3\nv 4\nv 5\nv 6\nv 7\nv 8\ne 1 2\ne 2 3\ne 3 4\ne 4 1\ne 5 6\ne 6 7\ne 7 8\ne 8 5\ne 1 5\ne 2 6\ne 3 7\ne 4 8";
        assert_eq!(embed_biconnected(&adj_of(cube)).unwrap().face_count(), 6);
    }

    #[test]
    fn kuratowski_graphs_are_not_planar() {
        assert_eq!(embed_biconnected(&adj_of(&k5())), Err(PlanarError::NonPlanar));
        assert_eq!(embed_biconnected(&adj_of(&k33())), Err(PlanarError::NonPlanar));
        assert!(!is_planar(&parse_graph(&k33()).unwrap()));
        assert!(is_planar(&parse_graph(K4).unwrap()));
    }

    #[test]
    fn planar_automorphisms_match_generic() {
        let k4 = parse_graph(K4).unwrap();
        assert_eq!(vertex_automorphisms_3conn(&k4).unwrap().len(), 24);
        let mut colored = parse_graph(K4).unwrap();
        colored.add_pendant(0, 3, EdgeType::Halvable);
        let auts = primitive_automorphisms(&colored, IsoOptions::default()).unwrap();
        assert_eq!(auts.len(), 6);
        let generic = automorphisms_bruteforce(&colored, IsoOptions::default()).unwrap();
        assert_eq!(generic.len(), 6);
    }

    #[test]
    fn three_connectivity() {
        assert!(is_three_connected(&adj_of(K4)));
        assert!(!is_three_connected(&adj_of("v 1\nv 2\nv 3\nv 4\ne 1 2\ne 2 3\ne 3 4\ne 4 1")));
    }

    #[test]
    fn semiregular_subgroups_of_k4() {
        let k4 = parse_graph(K4).unwrap();
        let auts = primitive_automorphisms(&k4, IsoOptions::default()).unwrap();
        let groups = semiregular_subgroups(&k4, &auts);
        let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
        // Trivial, three double transpositions, three 4-cycles (which only
        // reverse halvable edges) and the Klein group.
        assert_eq!(sizes, vec![1, 2, 2, 2, 4, 4, 4, 4]);
        let oracle = crate::oracle::Oracle::default().semiregular_subgroups(&k4).unwrap();
        assert_eq!(oracle.len(), groups.len());
    }

    #[test]
    fn list_isomorphism() {
        let a = parse_graph(K4).unwrap();
        let b = a.relabel_vertices(&[2, 0, 3, 1]);
        let lists = vec![vec![0], vec![1, 2], vec![1, 2, 3], vec![3, 1]];
        let m = list_iso_3conn(&a, &b, Some(&lists)).unwrap().unwrap();
        assert_eq!(m.vertex[0], 0);
        assert!(a.is_isomorphism(&b, &m));
    }
}
