//! Expansion test with lists.
//!
//! `H` is reduced against the catalog of `G` without knowing which of its
//! parts come from loop- or half-quotients of atoms. Each block atom of the
//! current graph becomes a pendant element carrying the list of catalog
//! quotients it matches. Star atoms are matched stub by stub through
//! bipartite matching, with dipole quotients flattened into the stubs they
//! leave at a single vertex. `H` is expandable from a quotient `H_r` of
//! `G_r` when, for some choice of core, the reduced `H` matches the reduced
//! `H_r` with every pendant element landing on a stub from its list.

use super::{certificate_for_group, fold_number, isomorphism, prepare, CoverError, CoverOptions, CoverVerdict};
use crate::covering::quotient_unchecked;
use crate::decomposition::{
    find_atoms, Atom, AtomGraph, AtomKind, AtomOptions, BlockTree, Node, BOUNDARY_MARK,
};
use crate::multigraph::{find_isomorphism, EdgeType, IsoOptions, Multigraph, Shape};
use crate::reduction::{dipole_half_involutions, replace_atoms, Catalog};
use std::collections::{BTreeMap, BTreeSet};

/// Colors from here on mark pendant elements; `ELEMENT_BASE + i` is
/// element `i`.
pub const ELEMENT_BASE: u32 = 1 << 30;
/// Color of the stub standing in for the rest of the graph while a
/// quotient form is reduced.
const CONTEXT_COLOR: u32 = ELEMENT_BASE - 1;

/// Upper bound on flattened stub variants tried for one vertex.
const VARIANT_LIMIT: usize = 1 << 14;

/// A quotient of a catalog class that can hang at a single vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Descriptor {
    /// The block atom itself.
    Edge(u32),
    /// A proper atom or dipole with its boundary glued.
    Loop(u32),
    /// A proper atom or dipole folded by a boundary-swapping involution.
    Half(u32),
}

/// A stub seen during matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Stub {
    /// A stub with a color that is not a catalog class.
    Plain(u32, EdgeType, Shape),
    Desc(Descriptor),
    Element(usize),
}

#[derive(Clone, Debug, Default)]
pub struct ListStats {
    pub list_star_calls: u64,
    pub list_nonstar_calls: u64,
    pub candidate_groups: usize,
    pub cores_tried: usize,
    /// Lists with more than one `Edge` member.
    pub ambiguous_lists: u64,
    /// Vertices whose flattened variants hit [`VARIANT_LIMIT`].
    pub truncated: u64,
    /// Groups accepted by the list test whose certificate search failed.
    pub unconfirmed: u64,
}

/// Where the core of `H` sits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorePos {
    /// A block, given by its vertices.
    Block(Vec<usize>),
    /// An articulation.
    Cut(usize),
}

/// Evidence that `H` expands from the reduced quotient.
#[derive(Clone, Debug)]
pub struct ExpandWitness {
    pub core: CorePos,
    pub levels: usize,
    /// Vertex map from the reduced `H` onto the reduced quotient.
    pub vertex_map: Vec<usize>,
}

/// Catalog, quotient forms and pendant elements shared by one decision.
pub struct ListContext<'a> {
    catalog: &'a mut Catalog,
    elements: Vec<BTreeSet<Descriptor>>,
    /// Reduced rooted loop- and half-quotients of proper classes, root
    /// first.
    forms: BTreeMap<Descriptor, Vec<Multigraph>>,
    flat: BTreeMap<Descriptor, Vec<Vec<Stub>>>,
    pub stats: ListStats,
}

/// Maximum matching of a bipartite graph given by left adjacency lists.
/// Returns the partner of every left vertex if the matching is perfect.
pub fn bipartite_perfect_matching(left: usize, right: usize, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    if left != right {
        return None;
    }
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &w in &adj[u] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            if owner[w].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[w] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    for u in 0..left {
        let mut seen = vec![false; right];
        if !augment(u, adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut out = vec![0; left];
    for (w, o) in owner.iter().enumerate() {
        out[o.unwrap()] = w;
    }
    Some(out)
}

/// True if `h` is a single block with no loops, pendant edges or
/// half-edges.
pub fn is_two_connected(h: &Multigraph) -> bool {
    if h.vertex_count() < 2 || (0..h.half_count()).any(|x| h.shape(x) != Shape::Normal) {
        return false;
    }
    match BlockTree::new(h) {
        Ok(t) => t.blocks.len() == 1,
        Err(_) => false,
    }
}

fn glue_boundary(rep: &Multigraph) -> Multigraph {
    let n = rep.vertex_count();
    let map = |v: usize| v.saturating_sub(1);
    let mut q = Multigraph::with_vertices(n - 1);
    for v in 2..n {
        q.set_vertex_color(v - 1, rep.vertex_color(v));
    }
    q.set_vertex_color(0, rep.vertex_color(0));
    for x in rep.edge_reps() {
        let he = rep.half_edge(x);
        let u = he.vertex.map(map);
        match he.partner {
            Some(p) => {
                let w = rep.half_edge(p).vertex.map(map);
                q.add_typed(u, w, he.color, he.etype);
            }
            None => {
                q.add_half_edge(u.unwrap(), he.color, he.etype);
            }
        }
    }
    q
}

/// Copy of `g` with `root` moved to index 0.
fn root_first(g: &Multigraph, root: usize) -> Multigraph {
    let mut order = vec![root];
    order.extend((0..g.vertex_count()).filter(|&v| v != root));
    let halves: Vec<usize> = (0..g.half_count()).collect();
    g.subgraph(&order, &halves, false).0
}

fn locate(tree: &BlockTree, core: &CorePos) -> Option<usize> {
    let block_with = |vs: &[usize]| {
        (0..tree.nodes.len()).find(|&x| match tree.nodes[x] {
            Node::Block(b) => !tree.blocks[b].stub && vs.iter().all(|v| tree.blocks[b].vertices.contains(v)),
            Node::Cut(_) => false,
        })
    };
    match core {
        CorePos::Cut(v) => tree.cut_node_of(*v).or_else(|| block_with(&[*v])),
        CorePos::Block(vs) if vs.len() >= 2 => block_with(vs),
        CorePos::Block(vs) => tree.cut_node_of(*vs.first()?).or_else(|| block_with(vs)),
    }
}

/// Every block and articulation of `g`.
pub fn core_positions(g: &Multigraph) -> Vec<CorePos> {
    let Ok(tree) = BlockTree::new(g) else {
        return Vec::new();
    };
    tree.nodes
        .iter()
        .filter_map(|n| match *n {
            Node::Block(b) if !tree.blocks[b].stub => Some(CorePos::Block(tree.blocks[b].vertices.clone())),
            Node::Block(_) => None,
            Node::Cut(v) => Some(CorePos::Cut(v)),
        })
        .collect()
}

fn center_position(g: &Multigraph) -> Option<CorePos> {
    let tree = BlockTree::new(g).ok()?;
    Some(match tree.center_node() {
        Node::Block(b) => CorePos::Block(tree.blocks[b].vertices.clone()),
        Node::Cut(v) => CorePos::Cut(v),
    })
}

enum Replace {
    Edge { color: u32, etype: EdgeType, tail: usize, head: usize },
    Element(usize),
}

/// Rebuilds `g` with every atom replaced. Returns the next graph and the
/// old index of each of its vertices.
fn rebuild(g: &Multigraph, atoms: &[Atom], reps: &[Replace]) -> (Multigraph, Vec<usize>) {
    let mut in_v = vec![false; g.vertex_count()];
    let mut in_h = vec![false; g.half_count()];
    for a in atoms {
        for &v in &a.interior {
            in_v[v] = true;
        }
        for &x in &a.halves {
            in_h[x] = true;
        }
    }
    let kept_v: Vec<usize> = (0..g.vertex_count()).filter(|&v| !in_v[v]).collect();
    let kept_h: Vec<usize> = (0..g.half_count()).filter(|&x| !in_h[x]).collect();
    let (mut next, vmap, _) = g.subgraph(&kept_v, &kept_h, false);
    for (a, r) in atoms.iter().zip(reps) {
        match *r {
            Replace::Edge { color, etype, tail, head } => {
                let (t, h) = (vmap[&tail], vmap[&head]);
                if etype.is_directed() {
                    next.add_arc(t, h, color);
                } else {
                    next.add_edge(t, h, color, etype);
                }
            }
            Replace::Element(id) => {
                next.add_pendant(vmap[&a.boundary[0]], ELEMENT_BASE + id as u32, EdgeType::Halvable);
            }
        }
    }
    (next, kept_v)
}

fn loop_type(a: EdgeType, b: EdgeType) -> EdgeType {
    a.min(b)
}

impl<'a> ListContext<'a> {
    pub fn new(catalog: &'a mut Catalog) -> ListContext<'a> {
        ListContext {
            catalog,
            elements: Vec::new(),
            forms: BTreeMap::new(),
            flat: BTreeMap::new(),
            stats: ListStats::default(),
        }
    }

    /// Computes the reduced loop- and half-quotients of every proper class
    /// currently in the catalog.
    pub fn prepare_forms(&mut self) {
        let proper: Vec<u32> = self
            .catalog
            .entries
            .iter()
            .filter(|e| e.kind == AtomKind::Proper)
            .map(|e| e.color)
            .collect();
        for c in proper {
            let entry = self.catalog.entry(c).unwrap();
            let glued = glue_boundary(&entry.rep.graph);
            let halves: Vec<(Multigraph, usize)> = entry
                .half_quotients
                .iter()
                .map(|q| (q.quotient.clone(), q.root))
                .collect();
            let lf = self.reduce_rooted(&glued, 0);
            self.forms.insert(Descriptor::Loop(c), vec![lf]);
            let hf: Vec<Multigraph> = halves.iter().map(|(q, r)| self.reduce_rooted(q, *r)).collect();
            if !hf.is_empty() {
                self.forms.insert(Descriptor::Half(c), hf);
            }
        }
    }

    /// Reduces a rooted form as it would be reduced inside a larger graph
    /// hanging at its root, stopping before the root block itself.
    fn reduce_rooted(&mut self, q: &Multigraph, root: usize) -> Multigraph {
        let mut g = q.clone();
        g.add_pendant(root, CONTEXT_COLOR, EdgeType::Halvable);
        let mut root = root;
        let mut level = 0;
        loop {
            let mut tree = BlockTree::new(&g).expect("quotient forms are connected");
            let Some(c) = tree.cut_node_of(root) else { break };
            tree.reroot(c);
            let opts = AtomOptions {
                protect_root_children: true,
                ..AtomOptions::default()
            };
            let atoms = find_atoms(&g, &tree, opts);
            if atoms.is_empty() {
                break;
            }
            let (next, step) = replace_atoms(&g, &atoms, self.catalog, level);
            root = step.vertex_back.iter().position(|&v| v == root).unwrap();
            g = next;
            level += 1;
        }
        let keep: Vec<usize> = (0..g.half_count())
            .filter(|&x| g.half_edge(x).color != CONTEXT_COLOR)
            .collect();
        let verts: Vec<usize> = (0..g.vertex_count()).collect();
        let g = g.subgraph(&verts, &keep, false).0;
        root_first(&g, root)
    }

    /// Reduces a quotient of `G_r` with respect to its central node,
    /// adding new classes to the catalog.
    pub fn reduce_quotient(&mut self, hr: &Multigraph) -> Option<Multigraph> {
        let core = center_position(hr)?;
        self.reduce_from(hr, core, false).map(|(g, _)| g)
    }

    /// Reduces `g` with respect to a fixed core. With `lists` set, block
    /// atoms become pendant elements and 2-boundary atoms must already be in
    /// the catalog; otherwise atoms are classified and added.
    fn reduce_from(&mut self, g0: &Multigraph, mut core: CorePos, lists: bool) -> Option<(Multigraph, usize)> {
        let mut g = g0.clone();
        let mut level = 0;
        loop {
            let mut tree = BlockTree::new(&g).ok()?;
            let node = locate(&tree, &core)?;
            tree.reroot(node);
            let atoms = find_atoms(&g, &tree, AtomOptions::default());
            if atoms.is_empty() {
                return Some((g, level));
            }
            let (next, back) = if lists {
                let mut kept = Vec::new();
                let mut reps = Vec::new();
                for a in &atoms {
                    match self.replacement(&g, a) {
                        Some(r) => {
                            kept.push(a.clone());
                            reps.push(r);
                        }
                        None if a.kind == AtomKind::Dipole => {
                            for (sub, r) in self.carve_dipoles(&g, a) {
                                kept.push(sub);
                                reps.push(r);
                            }
                        }
                        None if a.kind.is_block() => return None,
                        None => {}
                    }
                }
                if kept.is_empty() {
                    return Some((g, level));
                }
                rebuild(&g, &kept, &reps)
            } else {
                let (next, step) = replace_atoms(&g, &atoms, self.catalog, level);
                (next, step.vertex_back)
            };
            let mut fwd = vec![None; g.vertex_count()];
            for (n, &o) in back.iter().enumerate() {
                fwd[o] = Some(n);
            }
            core = match core {
                CorePos::Cut(v) => CorePos::Cut(fwd[v]?),
                CorePos::Block(vs) => CorePos::Block(vs.iter().filter_map(|&v| fwd[v]).collect()),
            };
            g = next;
            level += 1;
        }
    }

    fn replacement(&mut self, g: &Multigraph, a: &Atom) -> Option<Replace> {
        match a.kind {
            AtomKind::Proper | AtomKind::Dipole => self.lookup_edge(g, a),
            AtomKind::StarBlock | AtomKind::NonStarBlock => {
                let list = if a.kind == AtomKind::StarBlock {
                    self.list_star(g, a)
                } else {
                    self.list_nonstar(g, a)
                };
                if list.is_empty() {
                    return None;
                }
                if list.iter().filter(|d| matches!(d, Descriptor::Edge(_))).count() > 1 {
                    self.stats.ambiguous_lists += 1;
                }
                self.elements.push(list);
                Some(Replace::Element(self.elements.len() - 1))
            }
        }
    }

    fn lookup_edge(&mut self, g: &Multigraph, a: &Atom) -> Option<Replace> {
        let ag = AtomGraph::from_atom(g, a);
        let found = match self.catalog.lookup(&ag) {
            Some((color, m)) => Some((color, ag.host_vertex[m.vertex[0]])),
            None => {
                let mut hit = None;
                let candidates: Vec<(u32, Multigraph)> = self
                    .catalog
                    .entries
                    .iter()
                    .filter(|e| e.kind == a.kind && e.rep.graph.vertex_count() == ag.graph.vertex_count())
                    .map(|e| (e.color, e.rep.graph.clone()))
                    .collect();
                for (c, rep) in candidates {
                    if let Some(vm) = self.match_form(&ag.graph, 2, &rep) {
                        let x0 = vm.iter().position(|&w| w == 0).unwrap();
                        hit = Some((c, ag.host_vertex[x0]));
                        break;
                    }
                }
                hit
            }
        }?;
        let (color, tail) = found;
        let etype = self.catalog.entry(color).unwrap().edge_type();
        let head = if tail == a.boundary[0] { a.boundary[1] } else { a.boundary[0] };
        Some(Replace::Edge { color, etype, tail, head })
    }

    /// Splits a bundle of parallel edges that is not a catalog class into
    /// sub-bundles that are, largest classes first. The edges left over
    /// stay in the graph.
    fn carve_dipoles(&self, g: &Multigraph, a: &Atom) -> Vec<(Atom, Replace)> {
        let (x, y) = (a.boundary[0], a.boundary[1]);
        let mut free: Vec<(usize, (u32, EdgeType), (u32, EdgeType))> = a
            .halves
            .iter()
            .filter(|&&h| g.vertex_of(h) == Some(x))
            .map(|&h| (h, g.label(h), g.label(g.partner(h).unwrap())))
            .collect();
        let mut dipoles: Vec<(u32, Vec<((u32, EdgeType), (u32, EdgeType))>)> = self
            .catalog
            .entries
            .iter()
            .filter(|e| e.kind == AtomKind::Dipole)
            .map(|e| {
                let r = &e.rep.graph;
                let edges = r
                    .incident(0)
                    .iter()
                    .map(|&h| (r.label(h), r.label(r.partner(h).unwrap())))
                    .collect();
                (e.color, edges)
            })
            .collect();
        dipoles.sort_by_key(|(c, e)| (std::cmp::Reverse(e.len()), *c));
        let mut out = Vec::new();
        for (color, edges) in dipoles {
            for flip in [false, true] {
                loop {
                    let mut taken = Vec::new();
                    let mut used = vec![false; free.len()];
                    for &(l0, l1) in &edges {
                        let want = if flip { (l1, l0) } else { (l0, l1) };
                        let hit = (0..free.len()).find(|&i| !used[i] && (free[i].1, free[i].2) == want);
                        match hit {
                            Some(i) => {
                                used[i] = true;
                                taken.push(free[i].0);
                            }
                            None => break,
                        }
                    }
                    if taken.len() != edges.len() {
                        break;
                    }
                    let mut halves: Vec<usize> = taken.iter().flat_map(|&h| [h, g.partner(h).unwrap()]).collect();
                    halves.sort_unstable();
                    free = free.into_iter().enumerate().filter(|(i, _)| !used[*i]).map(|(_, f)| f).collect();
                    let etype = self.catalog.entry(color).unwrap().edge_type();
                    let (tail, head) = if flip { (y, x) } else { (x, y) };
                    out.push((
                        Atom {
                            kind: AtomKind::Dipole,
                            boundary: a.boundary.clone(),
                            interior: Vec::new(),
                            halves,
                        },
                        Replace::Edge { color, etype, tail, head },
                    ));
                }
            }
        }
        out
    }

    fn stub_of(&self, g: &Multigraph, x: usize) -> Option<Stub> {
        let he = g.half_edge(x);
        let shape = g.shape(x);
        let (color, etype) = match shape {
            Shape::Normal | Shape::Free => return None,
            Shape::Loop => {
                let p = he.partner.unwrap();
                if p < x {
                    return None;
                }
                (he.color, loop_type(he.etype, g.half_edge(p).etype))
            }
            _ => (he.color, he.etype),
        };
        if color >= ELEMENT_BASE {
            return Some(Stub::Element((color - ELEMENT_BASE) as usize));
        }
        Some(match self.catalog.entry(color) {
            Some(_) => Stub::Desc(match shape {
                Shape::Pendant => Descriptor::Edge(color),
                Shape::Loop => Descriptor::Loop(color),
                _ => Descriptor::Half(color),
            }),
            None => Stub::Plain(color, etype, shape),
        })
    }

    fn stub_for_color(&self, color: u32, etype: EdgeType, shape: Shape) -> Stub {
        match (self.catalog.entry(color), shape) {
            (Some(_), Shape::Loop) => Stub::Desc(Descriptor::Loop(color)),
            (Some(_), _) => Stub::Desc(Descriptor::Half(color)),
            (None, _) => Stub::Plain(color, etype, shape),
        }
    }

    /// The stubs a dipole quotient leaves at one vertex, one list per
    /// quotient class. `None` for descriptors that are not dipole quotients.
    fn dipole_stubs(&mut self, d: Descriptor) -> Option<Vec<Vec<Stub>>> {
        let c = match d {
            Descriptor::Loop(c) | Descriptor::Half(c) => c,
            Descriptor::Edge(_) => return None,
        };
        let entry = self.catalog.entry(c)?;
        if entry.kind != AtomKind::Dipole {
            return None;
        }
        if let Some(v) = self.flat.get(&d) {
            return Some(v.clone());
        }
        let rep = entry.rep.graph.clone();
        let mut out = Vec::new();
        match d {
            Descriptor::Loop(_) => {
                let stubs = rep
                    .edge_reps()
                    .into_iter()
                    .map(|x| {
                        let p = rep.partner(x).unwrap();
                        let t = loop_type(rep.half_edge(x).etype, rep.half_edge(p).etype);
                        self.stub_for_color(rep.half_edge(x).color, t, Shape::Loop)
                    })
                    .collect();
                out.push(stubs);
            }
            _ => {
                for t in dipole_half_involutions(&rep) {
                    let mut stubs = Vec::new();
                    let mut done = vec![false; rep.half_count()];
                    for &a in rep.incident(0) {
                        if done[a] {
                            continue;
                        }
                        let b = rep.partner(a).unwrap();
                        let img = t.half[a];
                        let he = rep.half_edge(a);
                        if img == b {
                            stubs.push(self.stub_for_color(he.color, he.etype, Shape::Standalone));
                        } else {
                            let a2 = rep.partner(img).unwrap();
                            done[a2] = true;
                            let lt = loop_type(he.etype, rep.half_edge(img).etype);
                            stubs.push(self.stub_for_color(he.color, lt, Shape::Loop));
                        }
                        done[a] = true;
                    }
                    out.push(stubs);
                }
            }
        }
        self.flat.insert(d, out.clone());
        Some(out)
    }

    /// Alternatives for one stub: itself, or any flattening of a dipole
    /// quotient.
    fn alternatives(&mut self, s: Stub, depth: usize) -> Vec<Vec<Stub>> {
        let mut out = vec![vec![s]];
        let Stub::Desc(d) = s else { return out };
        if depth > 16 {
            return out;
        }
        let Some(variants) = self.dipole_stubs(d) else { return out };
        for v in variants {
            let mut acc: Vec<Vec<Stub>> = vec![Vec::new()];
            for &t in &v {
                let alts = self.alternatives(t, depth + 1);
                let mut next = Vec::new();
                for a in &acc {
                    for b in &alts {
                        if next.len() >= VARIANT_LIMIT {
                            break;
                        }
                        let mut c = a.clone();
                        c.extend(b.iter().copied());
                        next.push(c);
                    }
                }
                acc = next;
            }
            out.extend(acc);
            if out.len() >= VARIANT_LIMIT {
                self.stats.truncated += 1;
                out.truncate(VARIANT_LIMIT);
                break;
            }
        }
        out
    }

    fn element_fits(&self, id: usize, d: Descriptor) -> bool {
        self.elements[id].contains(&d)
    }

    /// Whether the stubs of `H` at a vertex can be the expansion of the
    /// stubs of a form at a vertex.
    fn compatible(&mut self, xs: &[Stub], qs: &[Stub]) -> bool {
        if xs.is_empty() || qs.is_empty() {
            return xs.is_empty() && qs.is_empty();
        }
        let mut combos: Vec<Vec<Stub>> = vec![Vec::new()];
        for &s in qs {
            let alts = self.alternatives(s, 0);
            let mut next = Vec::new();
            for a in &combos {
                for b in &alts {
                    if next.len() >= VARIANT_LIMIT {
                        break;
                    }
                    let mut c = a.clone();
                    c.extend(b.iter().copied());
                    next.push(c);
                }
            }
            combos = next;
        }
        let mut x_plain: Vec<Stub> = xs.iter().copied().filter(|s| matches!(s, Stub::Plain(..))).collect();
        x_plain.sort_unstable();
        let x_elems: Vec<usize> = xs
            .iter()
            .filter_map(|s| match s {
                Stub::Element(i) => Some(*i),
                _ => None,
            })
            .collect();
        for combo in combos {
            if combo.len() != xs.len() {
                continue;
            }
            let mut q_plain: Vec<Stub> = combo.iter().copied().filter(|s| matches!(s, Stub::Plain(..))).collect();
            q_plain.sort_unstable();
            if q_plain != x_plain {
                continue;
            }
            let q_desc: Vec<Descriptor> = combo
                .iter()
                .filter_map(|s| match s {
                    Stub::Desc(d) => Some(*d),
                    _ => None,
                })
                .collect();
            let adj: Vec<Vec<usize>> = x_elems
                .iter()
                .map(|&i| (0..q_desc.len()).filter(|&j| self.element_fits(i, q_desc[j])).collect())
                .collect();
            if bipartite_perfect_matching(x_elems.len(), q_desc.len(), &adj).is_some() {
                return true;
            }
        }
        false
    }

    /// Graph without stubs, boundary marked, and the stubs at each vertex.
    fn strip(&self, g: &Multigraph, boundary: usize) -> (Multigraph, Vec<Vec<Stub>>) {
        let mut stubs = vec![Vec::new(); g.vertex_count()];
        let mut normal = Vec::new();
        for x in 0..g.half_count() {
            if g.shape(x) == Shape::Normal {
                normal.push(x);
            } else if let Some(s) = self.stub_of(g, x) {
                stubs[g.vertex_of(x).unwrap()].push(s);
            }
        }
        let verts: Vec<usize> = (0..g.vertex_count()).collect();
        let (mut s, _, _) = g.subgraph(&verts, &normal, false);
        for v in 0..boundary {
            s.set_vertex_color(v, BOUNDARY_MARK);
        }
        (s, stubs)
    }

    /// A vertex map from `x` (stubs of `H`) onto form `q` matching stubs by
    /// lists. The first `boundary` vertices of both are boundary.
    fn match_form(&mut self, x: &Multigraph, boundary: usize, q: &Multigraph) -> Option<Vec<usize>> {
        if x.vertex_count() != q.vertex_count() {
            return None;
        }
        let (xs, xstubs) = self.strip(x, boundary);
        let (qs, qstubs) = self.strip(q, boundary);
        if xs.half_count() != qs.half_count() || xs.label_census() != qs.label_census() {
            return None;
        }
        let mut cache: BTreeMap<(Vec<Stub>, Vec<Stub>), bool> = BTreeMap::new();
        let mut lists = Vec::with_capacity(x.vertex_count());
        for v in 0..x.vertex_count() {
            let mut xv = xstubs[v].clone();
            xv.sort_unstable();
            let mut l = Vec::new();
            for w in 0..q.vertex_count() {
                if xs.vertex_color(v) != qs.vertex_color(w) {
                    continue;
                }
                let mut qw = qstubs[w].clone();
                qw.sort_unstable();
                let key = (xv.clone(), qw);
                let ok = match cache.get(&key) {
                    Some(&b) => b,
                    None => {
                        let b = self.compatible(&key.0, &key.1);
                        cache.insert(key, b);
                        b
                    }
                };
                if ok {
                    l.push(w);
                }
            }
            if l.is_empty() {
                return None;
            }
            lists.push(l);
        }
        let opts = IsoOptions {
            bound: usize::MAX,
            node_budget: 5_000_000,
        };
        find_isomorphism(&xs, &qs, Some(&lists), opts)
            .ok()
            .flatten()
            .map(|m| m.vertex)
    }

    /// Catalog quotients a non-star block atom of the current graph could
    /// be.
    pub(crate) fn list_nonstar(&mut self, g: &Multigraph, a: &Atom) -> BTreeSet<Descriptor> {
        self.stats.list_nonstar_calls += 1;
        let ag = AtomGraph::from_atom(g, a);
        let mut out = BTreeSet::new();
        let blocks: Vec<(u32, Multigraph)> = self
            .catalog
            .entries
            .iter()
            .filter(|e| e.kind == AtomKind::NonStarBlock && e.rep.graph.vertex_count() == ag.graph.vertex_count())
            .map(|e| (e.color, e.rep.graph.clone()))
            .collect();
        for (c, rep) in blocks {
            if self.match_form(&ag.graph, 1, &rep).is_some() {
                out.insert(Descriptor::Edge(c));
            }
        }
        let forms: Vec<(Descriptor, Vec<Multigraph>)> = self
            .forms
            .iter()
            .map(|(d, fs)| {
                let fs = fs
                    .iter()
                    .filter(|f| f.vertex_count() == ag.graph.vertex_count())
                    .cloned()
                    .collect();
                (*d, fs)
            })
            .collect();
        for (d, fs) in forms {
            if fs.iter().any(|f| self.match_form(&ag.graph, 1, f).is_some()) {
                out.insert(d);
            }
        }
        out
    }

    /// Catalog quotients a star atom of the current graph could be.
    pub(crate) fn list_star(&mut self, g: &Multigraph, a: &Atom) -> BTreeSet<Descriptor> {
        self.stats.list_star_calls += 1;
        let mut xs: Vec<Stub> = a.halves.iter().filter_map(|&x| self.stub_of(g, x)).collect();
        xs.sort_unstable();
        let mut out = BTreeSet::new();
        let candidates: Vec<(u32, AtomKind, Option<Vec<Stub>>)> = self
            .catalog
            .entries
            .iter()
            .filter(|e| matches!(e.kind, AtomKind::StarBlock | AtomKind::Dipole))
            .map(|e| {
                let stubs = (e.kind == AtomKind::StarBlock).then(|| {
                    let r = &e.rep.graph;
                    (0..r.half_count()).filter_map(|x| self.stub_of(r, x)).collect()
                });
                (e.color, e.kind, stubs)
            })
            .collect();
        for (c, kind, stubs) in candidates {
            if kind == AtomKind::StarBlock {
                if self.compatible(&xs, &stubs.unwrap()) {
                    out.insert(Descriptor::Edge(c));
                }
                continue;
            }
            for d in [Descriptor::Loop(c), Descriptor::Half(c)] {
                let Some(variants) = self.dipole_stubs(d) else { continue };
                if variants.is_empty() {
                    continue;
                }
                if self.compatible(&xs, &[Stub::Desc(d)]) {
                    out.insert(d);
                }
            }
        }
        out
    }

    /// Reduces `h` with lists around `core`.
    pub fn reduce_with_lists(&mut self, h: &Multigraph, core: CorePos) -> Option<(Multigraph, usize)> {
        self.elements.clear();
        self.reduce_from(h, core, true)
    }
}

/// Tests whether `h` is an expansion of the quotient whose reduced form is
/// `hs`, trying every core position of `h`.
pub fn test_expandable(ctx: &mut ListContext, hs: &Multigraph, h: &Multigraph) -> Option<ExpandWitness> {
    for core in core_positions(h) {
        ctx.stats.cores_tried += 1;
        let Some((rt, levels)) = ctx.reduce_with_lists(h, core.clone()) else {
            continue;
        };
        if let Some(vertex_map) = ctx.match_form(&rt, 0, hs) {
            return Some(ExpandWitness {
                core,
                levels,
                vertex_map,
            });
        }
    }
    None
}

/// Decides `G -> H` by testing each candidate quotient of `G_r` for
/// expandability with lists. A positive answer is confirmed by building a
/// certificate through the extension search for that candidate.
pub fn regular_cover_with_lists(
    g: &Multigraph,
    h: &Multigraph,
    opts: &CoverOptions,
) -> Result<(CoverVerdict, ListStats), CoverError> {
    let mut stats = ListStats::default();
    let Some(k) = fold_number(g, h) else {
        return Ok((CoverVerdict::No, stats));
    };
    if k == 1 {
        let v = match isomorphism(g, h) {
            Some(iso) => CoverVerdict::Yes(super::identity_certificate(g, iso)),
            None => CoverVerdict::No,
        };
        return Ok((v, stats));
    }
    let Some(prep) = prepare(g, opts)? else {
        return Ok((CoverVerdict::No, stats));
    };
    let hn = h.normalize().graph;
    let mut catalog = prep.catalog.clone();
    let top = catalog.entries.last().map_or(0, |e| e.color);
    if top >= CONTEXT_COLOR / 2 {
        return Err(CoverError::InvalidInput("colors too large for the list test".into()));
    }
    let mut ctx = ListContext::new(&mut catalog);
    ctx.prepare_forms();
    let gr = prep.series.primitive();
    for group in prep.subgroups.iter().filter(|s| s.len() == k) {
        ctx.stats.candidate_groups += 1;
        let (hr, _) = quotient_unchecked(gr, group);
        let Some(hs) = ctx.reduce_quotient(&hr) else {
            continue;
        };
        if test_expandable(&mut ctx, &hs, &hn).is_none() {
            continue;
        }
        if let Some(cert) = certificate_for_group(g, h, &prep, &hn, group, opts)? {
            stats = ctx.stats.clone();
            return Ok((CoverVerdict::Yes(cert), stats));
        }
        ctx.stats.unconfirmed += 1;
    }
    stats = ctx.stats.clone();
    Ok((CoverVerdict::No, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::parse_graph;

    #[test]
    fn matching_examples() {
        // K3,3 has a perfect matching, K1,3 does not.
        let k33 = vec![vec![0, 1, 2]; 3];
        assert!(bipartite_perfect_matching(3, 3, &k33).is_some());
        let k13 = vec![vec![0, 1, 2]];
        assert!(bipartite_perfect_matching(1, 3, &k13).is_none());
        let blocked = vec![vec![0], vec![0], vec![1, 2]];
        assert!(bipartite_perfect_matching(3, 3, &blocked).is_none());
        let m = bipartite_perfect_matching(3, 3, &[vec![0, 1], vec![0], vec![1, 2]]).unwrap();
        assert_eq!(m, vec![1, 0, 2]);
    }

    #[test]
    fn two_connectivity() {
        let c4 = parse_graph("v 1\nv 2\nv 3\nv 4\ne 1 2\ne 2 3\ne 3 4\ne 4 1").unwrap();
        assert!(is_two_connected(&c4));
        let bowtie = parse_graph("v 1\nv 2\nv 3\nv 4\nv 5\ne 1 2\ne 2 3\ne 3 1\ne 3 4\ne 4 5\ne 5 3").unwrap();
        assert!(!is_two_connected(&bowtie));
        let looped = parse_graph("v 1\nv 2\nv 3\ne 1 2\ne 2 3\ne 3 1\ne 1 1").unwrap();
        assert!(!is_two_connected(&looped));
    }

    #[test]
    fn glue_keeps_interior() {
        let mut rep = Multigraph::with_vertices(3);
        rep.add_edge(0, 2, 0, EdgeType::Halvable);
        rep.add_edge(2, 1, 0, EdgeType::Halvable);
        let q = glue_boundary(&rep);
        assert_eq!(q.vertex_count(), 2);
        assert_eq!(q.half_edges_between(0, 1).len(), 2);
    }
}
