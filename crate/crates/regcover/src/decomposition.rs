//! Block-trees, centers and atoms.
//!
//! Loops, pendant edges and standalone half-edges are all treated as leaf
//! blocks hanging at their vertex ("stubs"). Atoms are the inclusion-minimal
//! block parts, proper parts and dipoles relative to a core node of the
//! block-tree which is never reduced.

use crate::multigraph::{
    automorphisms_bruteforce, find_isomorphism, EdgeType, IsoOptions, Multigraph, Shape,
    VertexMapping,
};
use std::collections::{BTreeMap, VecDeque};

/// Vertex color used to pin boundary vertices during isomorphism tests.
pub const BOUNDARY_MARK: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub vertices: Vec<usize>,
    pub halves: Vec<usize>,
    /// A loop, pendant edge or standalone half-edge.
    pub stub: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Block(usize),
    Cut(usize),
}

#[derive(Clone, Debug)]
pub struct BlockTree {
    pub blocks: Vec<Block>,
    pub nodes: Vec<Node>,
    pub adj: Vec<Vec<usize>>,
    /// Root of the rooted orientation; the center unless re-rooted.
    pub root: usize,
    /// Center of the tree.
    pub center: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    cut_node: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompositionError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
}

fn blocks_of(g: &Multigraph) -> Vec<Block> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();

    // Iterative DFS over normal edges, identified by their smaller half.
    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        disc[s] = time;
        low[s] = time;
        time += 1;
        // (vertex, half-edge used to enter, next incidence index)
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(s, None, 0)];
        while let Some(&mut (v, via, ref mut idx)) = stack.last_mut() {
            let inc = g.incident(v);
            if *idx < inc.len() {
                let h = inc[*idx];
                *idx += 1;
                if g.shape(h) != Shape::Normal {
                    continue;
                }
                let e = g.edge_of(h);
                if via.map(|x| g.edge_of(x)) == Some(e) {
                    continue;
                }
                let w = g.opposite_vertex(h).unwrap();
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, Some(h), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some((u, _, _)) = stack.last().copied() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let e_in = g.edge_of(via.unwrap());
                        let mut halves = Vec::new();
                        let mut verts = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            let p = g.partner(e).unwrap();
                            halves.push(e);
                            halves.push(p);
                            verts.push(g.vertex_of(e).unwrap());
                            verts.push(g.vertex_of(p).unwrap());
                            if e == e_in {
                                break;
                            }
                        }
                        halves.sort_unstable();
                        verts.sort_unstable();
                        verts.dedup();
                        out.push(Block {
                            vertices: verts,
                            halves,
                            stub: false,
                        });
                    }
                }
            }
        }
    }
    for v in 0..n {
        for &h in g.incident(v) {
            match g.shape(h) {
                Shape::Normal => {}
                Shape::Loop => {
                    let p = g.partner(h).unwrap();
                    if h < p {
                        out.push(Block {
                            vertices: vec![v],
                            halves: vec![h, p],
                            stub: true,
                        });
                    }
                }
                Shape::Pendant => {
                    let p = g.partner(h).unwrap();
                    let mut halves = vec![h, p];
                    halves.sort_unstable();
                    out.push(Block {
                        vertices: vec![v],
                        halves,
                        stub: true,
                    });
                }
                _ => out.push(Block {
                    vertices: vec![v],
                    halves: vec![h],
                    stub: true,
                }),
            }
        }
    }
    out.sort_by(|a, b| (a.vertices[0], &a.halves).cmp(&(b.vertices[0], &b.halves)));
    out
}

impl BlockTree {
    /// Builds the block-tree rooted at its center.
    pub fn new(g: &Multigraph) -> Result<BlockTree, DecompositionError> {
        let n = g.vertex_count();
        if n == 0 {
            return Err(DecompositionError::Empty);
        }
        if !g.is_connected() {
            return Err(DecompositionError::Disconnected);
        }
        let blocks = blocks_of(g);
        let mut count = vec![0usize; n];
        for b in &blocks {
            for &v in &b.vertices {
                count[v] += 1;
            }
        }
        let only_stubs = blocks.iter().all(|b| b.stub);
        let mut nodes: Vec<Node> = (0..blocks.len()).map(Node::Block).collect();
        let mut cut_node = vec![None; n];
        for v in 0..n {
            if count[v] >= 2 || (only_stubs && v == 0) {
                cut_node[v] = Some(nodes.len());
                nodes.push(Node::Cut(v));
            }
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (i, b) in blocks.iter().enumerate() {
            for &v in &b.vertices {
                if let Some(c) = cut_node[v] {
                    adj[i].push(c);
                    adj[c].push(i);
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let center = match cut_node.iter().flatten().next() {
            Some(&c) if only_stubs => c,
            _ => tree_center(&adj),
        };
        let mut t = BlockTree {
            blocks,
            nodes,
            adj,
            root: center,
            center,
            parent: Vec::new(),
            children: Vec::new(),
            cut_node,
        };
        t.reroot(center);
        Ok(t)
    }

    /// Re-roots the tree at an arbitrary node (the core).
    pub fn reroot(&mut self, root: usize) {
        let m = self.nodes.len();
        self.root = root;
        self.parent = vec![None; m];
        self.children = vec![Vec::new(); m];
        let mut seen = vec![false; m];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    self.parent[y] = Some(x);
                    self.children[x].push(y);
                    q.push_back(y);
                }
            }
        }
    }

    pub fn center_node(&self) -> Node {
        self.nodes[self.center]
    }

    pub fn center_is_block(&self) -> bool {
        matches!(self.nodes[self.center], Node::Block(_))
    }

    pub fn cut_node_of(&self, v: usize) -> Option<usize> {
        self.cut_node[v]
    }

    /// Node of the block containing half-edge `h`.
    pub fn block_node_of_half(&self, h: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.halves.binary_search(&h).is_ok())
    }

    /// Parent articulation vertex of a block node.
    fn parent_cut_vertex(&self, node: usize) -> Option<usize> {
        match self.parent[node].map(|p| self.nodes[p]) {
            Some(Node::Cut(v)) => Some(v),
            _ => None,
        }
    }

    /// All blocks in the subtree below `node` (inclusive).
    pub fn subtree_blocks(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if let Node::Block(b) = self.nodes[x] {
                out.push(b);
            }
            stack.extend(self.children[x].iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// Indented text dump of the rooted tree.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(self.root, 0usize)];
        while let Some((x, d)) = stack.pop() {
            let label = match self.nodes[x] {
                Node::Block(b) => {
                    let bl = &self.blocks[b];
                    let kind = if bl.stub { "stub" } else { "block" };
                    let vs: Vec<String> = bl.vertices.iter().map(|v| (v + 1).to_string()).collect();
                    format!("{kind} {{{}}}", vs.join(","))
                }
                Node::Cut(v) => format!("cut {}", v + 1),
            };
            out.push_str(&"  ".repeat(d));
            out.push_str(&label);
            out.push('\n');
            for &c in self.children[x].iter().rev() {
                stack.push((c, d + 1));
            }
        }
        out
    }
}

fn bfs_far(adj: &[Vec<usize>], s: usize) -> (usize, Vec<Option<usize>>) {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut prev = vec![None; adj.len()];
    dist[s] = 0;
    let mut q = VecDeque::from([s]);
    let mut last = s;
    while let Some(x) = q.pop_front() {
        if dist[x] > dist[last] || (dist[x] == dist[last] && x < last) {
            last = x;
        }
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                prev[y] = Some(x);
                q.push_back(y);
            }
        }
    }
    (last, prev)
}

fn tree_center(adj: &[Vec<usize>]) -> usize {
    let (a, _) = bfs_far(adj, 0);
    let (b, prev) = bfs_far(adj, a);
    let mut path = vec![b];
    let mut x = b;
    while let Some(p) = prev[x] {
        path.push(p);
        x = p;
    }
    debug_assert!(path.len() % 2 == 1);
    path[path.len() / 2]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    StarBlock,
    NonStarBlock,
    Proper,
    Dipole,
}

impl AtomKind {
    pub fn is_block(self) -> bool {
        matches!(self, AtomKind::StarBlock | AtomKind::NonStarBlock)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymmetryType {
    Halvable,
    Symmetric,
    Asymmetric,
}

/// An atom located in a host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub kind: AtomKind,
    /// One vertex for block atoms, two (sorted) otherwise.
    pub boundary: Vec<usize>,
    /// Interior vertices, sorted.
    pub interior: Vec<usize>,
    /// All half-edges of the atom, sorted.
    pub halves: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct AtomOptions {
    /// Allow a star of stubs at an articulation core to be reduced into a
    /// single pendant edge.
    pub core_star: bool,
    /// Report star block atoms.
    pub stars: bool,
    /// Never report block parts hanging directly below the root.
    pub protect_root_children: bool,
}

impl Default for AtomOptions {
    fn default() -> Self {
        AtomOptions {
            core_star: false,
            stars: true,
            protect_root_children: false,
        }
    }
}

struct Part {
    atom: Atom,
    vmask: Vec<usize>,
}

fn block_degree(g: &Multigraph, block: &Block, v: usize) -> usize {
    g.incident(v)
        .iter()
        .filter(|h| block.halves.binary_search(h).is_ok())
        .count()
}

/// Finds all atoms of `g` with respect to the root of `tree`.
pub fn find_atoms(g: &Multigraph, tree: &BlockTree, opts: AtomOptions) -> Vec<Atom> {
    let mut parts: Vec<Atom> = Vec::new();
    let core = tree.root;

    let subtree_part = |node: usize| -> (Vec<usize>, Vec<usize>) {
        let mut vs = Vec::new();
        let mut hs = Vec::new();
        for b in tree.subtree_blocks(node) {
            vs.extend(tree.blocks[b].vertices.iter().copied());
            hs.extend(tree.blocks[b].halves.iter().copied());
        }
        vs.sort_unstable();
        vs.dedup();
        hs.sort_unstable();
        hs.dedup();
        (vs, hs)
    };

    // Block parts.
    for x in 0..tree.nodes.len() {
        match tree.nodes[x] {
            Node::Cut(w) => {
                if x == core && !opts.core_star {
                    continue;
                }
                if !opts.stars {
                    continue;
                }
                let ch = &tree.children[x];
                let all_stubs = ch.iter().all(|&c| match tree.nodes[c] {
                    Node::Block(b) => tree.blocks[b].stub,
                    _ => false,
                });
                if ch.len() >= 2 && all_stubs {
                    let (vs, hs) = subtree_part(x);
                    parts.push(Atom {
                        kind: AtomKind::StarBlock,
                        boundary: vec![w],
                        interior: vs.into_iter().filter(|&v| v != w).collect(),
                        halves: hs,
                    });
                }
            }
            Node::Block(b) => {
                if x == core || tree.blocks[b].stub {
                    continue;
                }
                if opts.protect_root_children && tree.parent[x] == Some(core) {
                    continue;
                }
                let Some(p) = tree.parent_cut_vertex(x) else { continue };
                let single = tree.children[x].iter().all(|&c| {
                    tree.children[c].len() == 1
                        && matches!(tree.nodes[tree.children[c][0]], Node::Block(bb) if tree.blocks[bb].stub)
                });
                if single {
                    let (vs, hs) = subtree_part(x);
                    parts.push(Atom {
                        kind: AtomKind::NonStarBlock,
                        boundary: vec![p],
                        interior: vs.into_iter().filter(|&v| v != p).collect(),
                        halves: hs,
                    });
                }
            }
        }
    }

    // Proper parts.
    for (bi, block) in tree.blocks.iter().enumerate() {
        if block.stub || block.vertices.len() < 4 {
            continue;
        }
        let node = bi;
        let forbidden = if node == core {
            None
        } else {
            tree.parent_cut_vertex(node)
        };
        let heavy: Vec<usize> = block
            .vertices
            .iter()
            .copied()
            .filter(|&v| block_degree(g, block, v) >= 3)
            .collect();
        let index: BTreeMap<usize, usize> =
            block.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut badj: Vec<Vec<usize>> = vec![Vec::new(); block.vertices.len()];
        for &h in &block.halves {
            let (a, b) = (g.vertex_of(h).unwrap(), g.opposite_vertex(h).unwrap());
            badj[index[&a]].push(index[&b]);
        }
        for (i, &u) in heavy.iter().enumerate() {
            for &v in &heavy[i + 1..] {
                let comps = components_without(&badj, index[&u], index[&v]);
                if comps.len() < 2 {
                    continue;
                }
                for comp in comps {
                    let kverts: Vec<usize> = comp.iter().map(|&i| block.vertices[i]).collect();
                    if let Some(f) = forbidden {
                        if f != u && f != v && kverts.contains(&f) {
                            continue;
                        }
                    }
                    let mut vs = kverts.clone();
                    let mut hs: Vec<usize> = block
                        .halves
                        .iter()
                        .copied()
                        .filter(|&h| {
                            let a = g.vertex_of(h).unwrap();
                            let b = g.opposite_vertex(h).unwrap();
                            kverts.contains(&a) || kverts.contains(&b)
                        })
                        .collect();
                    for &x in &kverts {
                        if let Some(c) = tree.cut_node_of(x) {
                            for &child in &tree.children[c] {
                                let (cv, ch) = subtree_part(child);
                                vs.extend(cv);
                                hs.extend(ch);
                            }
                        }
                    }
                    vs.sort_unstable();
                    vs.dedup();
                    hs.sort_unstable();
                    hs.dedup();
                    parts.push(Atom {
                        kind: AtomKind::Proper,
                        boundary: vec![u, v],
                        interior: vs,
                        halves: hs,
                    });
                }
            }
        }
    }

    // Dipoles.
    let n = g.vertex_count();
    for u in 0..n {
        if g.degree(u) < 3 {
            continue;
        }
        let mut by_nbr: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &h in g.incident(u) {
            if g.shape(h) == Shape::Normal {
                let w = g.opposite_vertex(h).unwrap();
                if w > u {
                    by_nbr.entry(w).or_default().push(h);
                }
            }
        }
        for (w, hs) in by_nbr {
            if hs.len() >= 2 && g.degree(w) >= 3 {
                let mut halves: Vec<usize> = hs
                    .iter()
                    .flat_map(|&h| [h, g.partner(h).unwrap()])
                    .collect();
                halves.sort_unstable();
                parts.push(Atom {
                    kind: AtomKind::Dipole,
                    boundary: vec![u, w],
                    interior: Vec::new(),
                    halves,
                });
            }
        }
    }

    minimal_parts(g, parts)
}

fn components_without(adj: &[Vec<usize>], a: usize, b: usize) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    seen[a] = true;
    seen[b] = true;
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let x = comp[i];
            i += 1;
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn minimal_parts(g: &Multigraph, parts: Vec<Atom>) -> Vec<Atom> {
    let n = g.vertex_count();
    let mut parts: Vec<Part> = parts
        .into_iter()
        .map(|atom| {
            let mut vmask: Vec<usize> = atom.interior.clone();
            vmask.extend(atom.boundary.iter().copied());
            vmask.sort_unstable();
            vmask.dedup();
            Part { atom, vmask }
        })
        .collect();
    parts.sort_by(|a, b| (&a.vmask, &a.atom.halves).cmp(&(&b.vmask, &b.atom.halves)));
    parts.dedup_by(|a, b| a.vmask == b.vmask && a.atom.halves == b.atom.halves);
    let mut vin = vec![false; n];
    let mut hin = vec![false; g.half_count()];
    let mut keep = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for &v in &p.vmask {
            vin[v] = true;
        }
        for &h in &p.atom.halves {
            hin[h] = true;
        }
        let dominated = parts.iter().enumerate().any(|(j, q)| {
            j != i
                && q.vmask.len() <= p.vmask.len()
                && q.atom.halves.len() <= p.atom.halves.len()
                && (q.vmask.len(), q.atom.halves.len()) != (p.vmask.len(), p.atom.halves.len())
                && q.vmask.iter().all(|&v| vin[v])
                && q.atom.halves.iter().all(|&h| hin[h])
        });
        for &v in &p.vmask {
            vin[v] = false;
        }
        for &h in &p.atom.halves {
            hin[h] = false;
        }
        if !dominated {
            keep.push(p.atom.clone());
        }
    }
    keep.sort_by(|a, b| (&a.halves, &a.boundary).cmp(&(&b.halves, &b.boundary)));
    keep
}

/// Shape of a primitive graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Primitive {
    Essentially3Connected,
    EssentiallyCycle,
    K2Variant,
    K1Variant,
    NotPrimitive,
}

/// Classifies `g` relative to its center. `NotPrimitive` if any atom exists.
pub fn classify_primitive(g: &Multigraph) -> Primitive {
    let Ok(tree) = BlockTree::new(g) else {
        return Primitive::NotPrimitive;
    };
    let opts = AtomOptions {
        core_star: true,
        ..AtomOptions::default()
    };
    if !find_atoms(g, &tree, opts).is_empty() {
        return Primitive::NotPrimitive;
    }
    classify_shape(&tree)
}

fn classify_shape(tree: &BlockTree) -> Primitive {
    match tree.center_node() {
        Node::Cut(_) => Primitive::K1Variant,
        Node::Block(b) => {
            let block = &tree.blocks[b];
            if block.stub {
                return Primitive::K1Variant;
            }
            let nv = block.vertices.len();
            let ne = block.halves.len() / 2;
            if nv == 2 && ne == 1 {
                Primitive::K2Variant
            } else if ne == nv {
                Primitive::EssentiallyCycle
            } else {
                Primitive::Essentially3Connected
            }
        }
    }
}

/// A standalone copy of an atom, boundary vertices first with color 0.
#[derive(Clone, Debug)]
pub struct AtomGraph {
    pub kind: AtomKind,
    pub graph: Multigraph,
    pub boundary: usize,
    pub host_vertex: Vec<usize>,
    pub host_half: Vec<usize>,
}

impl AtomGraph {
    pub fn from_atom(host: &Multigraph, atom: &Atom) -> AtomGraph {
        let mut verts = atom.boundary.clone();
        verts.extend(atom.interior.iter().copied());
        let (mut graph, _, hmap) = host.subgraph(&verts, &atom.halves, false);
        for i in 0..atom.boundary.len() {
            graph.set_vertex_color(i, 0);
        }
        let mut host_half = vec![0; hmap.len()];
        for (&old, &new) in &hmap {
            host_half[new] = old;
        }
        AtomGraph {
            kind: atom.kind,
            graph,
            boundary: atom.boundary.len(),
            host_vertex: verts,
            host_half,
        }
    }

    /// Copy with boundary vertices recolored by [`BOUNDARY_MARK`].
    pub fn marked(&self) -> Multigraph {
        let mut g = self.graph.clone();
        for i in 0..self.boundary {
            g.set_vertex_color(i, BOUNDARY_MARK);
        }
        g
    }

    /// Interior vertex count and edge count (standalone half-edges count as
    /// edges), the sizes used for pruning.
    pub fn size(&self) -> (usize, usize) {
        (
            self.graph.vertex_count() - self.boundary,
            self.graph.edge_reps().len(),
        )
    }
}

fn iso_opts(n: usize) -> IsoOptions {
    IsoOptions {
        bound: n.max(crate::multigraph::DEFAULT_ORACLE_BOUND),
        node_budget: 5_000_000,
    }
}

/// Cheap isomorphism invariant of an atom.
pub fn atom_key(a: &AtomGraph) -> (AtomKind, usize, usize, Vec<u32>, Vec<(usize, u32)>) {
    let g = &a.graph;
    let mut vc: Vec<u32> = g.vertex_colors()[a.boundary..].to_vec();
    vc.sort_unstable();
    let mut degs: Vec<(usize, u32)> = (0..g.vertex_count())
        .map(|v| (g.degree(v), if v < a.boundary { 1 } else { 0 }))
        .collect();
    degs.sort_unstable();
    (a.kind, g.vertex_count(), g.half_count(), vc, degs)
}

/// An isomorphism `a -> b` mapping boundary onto boundary, if one exists.
pub fn atoms_isomorphic(a: &AtomGraph, b: &AtomGraph) -> Option<VertexMapping> {
    if a.kind != b.kind || a.boundary != b.boundary || atom_key(a) != atom_key(b) {
        return None;
    }
    let (ma, mb) = (a.marked(), b.marked());
    if a.kind == AtomKind::Dipole {
        return dipole_iso(&ma, &mb);
    }
    find_isomorphism(&ma, &mb, None, iso_opts(ma.vertex_count()))
        .ok()
        .flatten()
}

fn dipole_iso(a: &Multigraph, b: &Multigraph) -> Option<VertexMapping> {
    for vmap in [[0usize, 1], [1, 0]] {
        let ext = crate::multigraph::half_edge_extensions(a, b, &vmap, 1);
        if let Some(half) = ext.into_iter().next() {
            return Some(VertexMapping {
                vertex: vmap.to_vec(),
                half,
            });
        }
    }
    None
}

/// Symmetry type of a dipole by counting edge types per color class.
pub fn dipole_symmetry_type(a: &AtomGraph) -> SymmetryType {
    let g = &a.graph;
    let mut directed: BTreeMap<u32, (i64, i64)> = BTreeMap::new();
    let mut undirected: BTreeMap<u32, usize> = BTreeMap::new();
    for &h in g.incident(0) {
        let he = g.half_edge(h);
        match he.etype {
            EdgeType::Tail => directed.entry(he.color).or_default().0 += 1,
            EdgeType::Head => directed.entry(he.color).or_default().1 += 1,
            EdgeType::Undirected => *undirected.entry(he.color).or_default() += 1,
            EdgeType::Halvable => {}
        }
    }
    if directed.values().any(|(x, y)| x != y) {
        SymmetryType::Asymmetric
    } else if undirected.values().any(|c| c % 2 == 1) {
        SymmetryType::Symmetric
    } else {
        SymmetryType::Halvable
    }
}

/// Automorphisms of an atom that preserve the boundary setwise.
pub fn atom_automorphisms(a: &AtomGraph) -> Vec<VertexMapping> {
    let m = a.marked();
    automorphisms_bruteforce(&m, iso_opts(m.vertex_count())).unwrap_or_default()
}

/// True if `t` is an involution with no fixed vertex or half-edge that
/// reverses only halvable edges.
pub fn is_semiregular_involution(g: &Multigraph, t: &VertexMapping) -> bool {
    if t.vertex.iter().enumerate().any(|(i, &v)| v == i || t.vertex[v] != i) {
        return false;
    }
    for x in 0..g.half_count() {
        let y = t.half[x];
        if y == x || t.half[y] != x {
            return false;
        }
        if g.partner(x) == Some(y) && g.half_edge(x).etype != EdgeType::Halvable {
            return false;
        }
    }
    true
}

/// Symmetry type of a proper atom together with one boundary-swapping
/// automorphism (if any) and all boundary-swapping semiregular involutions.
pub fn proper_atom_symmetry(
    a: &AtomGraph,
) -> (SymmetryType, Option<VertexMapping>, Vec<VertexMapping>) {
    let auts = atom_automorphisms(a);
    let swaps: Vec<VertexMapping> = auts.into_iter().filter(|m| m.vertex[0] == 1).collect();
    let Some(first) = swaps.first().cloned() else {
        return (SymmetryType::Asymmetric, None, Vec::new());
    };
    let invs: Vec<VertexMapping> = swaps
        .into_iter()
        .filter(|t| is_semiregular_involution(&a.graph, t))
        .collect();
    if invs.is_empty() {
        (SymmetryType::Symmetric, Some(first), invs)
    } else {
        (SymmetryType::Halvable, Some(invs[0].clone()), invs)
    }
}

/// Symmetry type of any atom; block atoms are symmetric by definition.
pub fn symmetry_type(a: &AtomGraph) -> SymmetryType {
    match a.kind {
        AtomKind::StarBlock | AtomKind::NonStarBlock => SymmetryType::Symmetric,
        AtomKind::Dipole => dipole_symmetry_type(a),
        AtomKind::Proper => proper_atom_symmetry(a).0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::parse_graph;

    fn atoms(text: &str) -> (Multigraph, BlockTree, Vec<Atom>) {
        let g = parse_graph(text).unwrap().normalize().graph;
        let t = BlockTree::new(&g).unwrap();
        let a = find_atoms(&g, &t, AtomOptions::default());
        (g, t, a)
    }

    #[test]
    fn centers() {
        let p5 = parse_graph("v 1\nv 2\nv 3\nv 4\nv 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5").unwrap();
        let t = BlockTree::new(&p5).unwrap();
        assert_eq!(t.blocks.len(), 4);
        assert_eq!(t.center_node(), Node::Cut(2));

        let bowtie = parse_graph("v 1\nv 2\nv 3\nv 4\nv 5\ne 1 2\ne 2 3\ne 3 1\ne 3 4\ne 4 5\ne 5 3")
            .unwrap();
        let t = BlockTree::new(&bowtie).unwrap();
        assert_eq!(t.blocks.len(), 2);
        assert_eq!(t.center_node(), Node::Cut(2));

        let k4 = parse_graph("v 1\nv 2\nv 3\nv 4\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4").unwrap();
        let t = BlockTree::new(&k4).unwrap();
        assert_eq!(t.blocks.len(), 1);
        assert!(t.center_is_block());
    }

    #[test]
    fn star_and_dipole_atoms() {
        // K4 with a two-leaf star hanging from vertices 1 and 2 via bridges.
        let (_, t, a) = atoms(
            "v 1\nv 2\nv 3\nv 4\nv 5\nv 6\nv 7\nv 8\nv 9\nv 10\n\
             e 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\ne 1 5\ne 5 6\ne 5 7\ne 2 8\ne 8 9\ne 8 10",
        );
        assert!(t.center_is_block());
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|x| x.kind == AtomKind::StarBlock));
        let mut b: Vec<usize> = a.iter().map(|x| x.boundary[0]).collect();
        b.sort_unstable();
        assert_eq!(b, vec![4, 5]);

        let (_, _, a) = atoms("v 1\nv 2\ne 1 2\ne 1 2\ne 1 2");
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].kind, AtomKind::Dipole);
        assert_eq!(a[0].boundary, vec![0, 1]);
    }

    #[test]
    fn proper_atoms_of_theta() {
        // Three paths of length 2 between hubs 1 and 2.
        let (g, _, a) = atoms("v 1\nv 2\nv 3\nv 4\nv 5\ne 1 3\ne 3 2\ne 1 4\ne 4 2\ne 1 5\ne 5 2");
        assert_eq!(a.len(), 3);
        for atom in &a {
            assert_eq!(atom.kind, AtomKind::Proper);
            assert_eq!(atom.boundary, vec![0, 1]);
            assert_eq!(atom.interior.len(), 1);
            let ag = AtomGraph::from_atom(&g, atom);
            assert_eq!(symmetry_type(&ag), SymmetryType::Symmetric);
        }
        let x = AtomGraph::from_atom(&g, &a[0]);
        let y = AtomGraph::from_atom(&g, &a[1]);
        assert!(atoms_isomorphic(&x, &y).is_some());
    }

    #[test]
    fn four_cycle_proper_atom_is_halvable() {
        // Hubs 1,2 joined by three 4-cycles-with-hubs, i.e. paths 1-x-2 and
        // 1-y-2 grouped in pairs to force a 2-cut with a C4 side.
        let (g, _, a) = atoms(
            "v 1\nv 2\nv 3\nv 4\nv 5\nv 6\nv 7\nv 8\n\
             e 1 3\ne 3 4\ne 4 2\ne 1 5\ne 5 6\ne 6 2\ne 1 7\ne 7 8\ne 8 2",
        );
        assert_eq!(a.len(), 3);
        let ag = AtomGraph::from_atom(&g, &a[0]);
        assert_eq!(symmetry_type(&ag), SymmetryType::Halvable);
    }

    #[test]
    fn dipole_types() {
        let mk = |text: &str| {
            let g = parse_graph(text).unwrap();
            let atom = Atom {
                kind: AtomKind::Dipole,
                boundary: vec![0, 1],
                interior: vec![],
                halves: (0..g.half_count()).collect(),
            };
            dipole_symmetry_type(&AtomGraph::from_atom(&g, &atom))
        };
        assert_eq!(mk("v 1\nv 2\na 1 2\na 1 2\na 2 1\na 2 1"), SymmetryType::Halvable);
        assert_eq!(mk("v 1\nv 2\na 1 2\na 1 2\na 2 1"), SymmetryType::Asymmetric);
        assert_eq!(
            mk("v 1\nv 2\ne 1 2 tundirected\ne 1 2 tundirected\ne 1 2 tundirected"),
            SymmetryType::Symmetric
        );
    }

    #[test]
    fn primitive_shapes() {
        let k4p = parse_graph("v 1\nv 2\nv 3\nv 4\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\np 1\np 2")
            .unwrap();
        assert_eq!(classify_primitive(&k4p), Primitive::Essentially3Connected);
        let c6 = parse_graph("v 1\nv 2\nv 3\nv 4\nv 5\nv 6\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 6\ne 6 1")
            .unwrap();
        assert_eq!(classify_primitive(&c6), Primitive::EssentiallyCycle);
        let bowtie = parse_graph("v 1\nv 2\nv 3\nv 4\nv 5\ne 1 2\ne 2 3\ne 3 1\ne 3 4\ne 4 5\ne 5 3")
            .unwrap();
        assert_eq!(classify_primitive(&bowtie), Primitive::NotPrimitive);
    }
}
