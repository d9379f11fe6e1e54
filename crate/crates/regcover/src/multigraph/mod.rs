//! Half-edge multigraphs with colored vertices, colored and typed edges, loops,
//! pendant edges and standalone half-edges.
//!
//! Every edge is stored as two half-edges that point at each other through
//! `partner`. A pendant edge has one half-edge attached to a vertex and one
//! free half-edge (`vertex == None`). A standalone half-edge has no partner.
//! Quotients by group actions therefore reduce to partitioning index sets.

mod io;
mod iso;

pub use io::{
    parse_certificate, parse_graph, parse_mapping, serialize_certificate, serialize_graph,
    serialize_mapping, CertificateText, ParseError,
};
pub use iso::{
    automorphisms_bruteforce, backtrack_list_iso, find_isomorphism, half_edge_extensions, IsoError,
    IsoOptions, DEFAULT_ORACLE_BOUND,
};

use std::collections::BTreeMap;

/// The type of an edge. Directed edges carry `Tail` on the half-edge at the
/// tail vertex and `Head` on the half-edge at the head vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeType {
    Halvable,
    Undirected,
    Tail,
    Head,
}

impl EdgeType {
    /// Type carried by the partner half-edge.
    pub fn opposite(self) -> EdgeType {
        match self {
            EdgeType::Tail => EdgeType::Head,
            EdgeType::Head => EdgeType::Tail,
            t => t,
        }
    }

    pub fn is_directed(self) -> bool {
        matches!(self, EdgeType::Tail | EdgeType::Head)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfEdge {
    pub vertex: Option<usize>,
    pub partner: Option<usize>,
    pub color: u32,
    pub etype: EdgeType,
}

/// Geometric shape of the edge a half-edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    /// Two half-edges attached to two distinct vertices.
    Normal,
    Loop,
    /// One attached half-edge, one free.
    Pendant,
    /// A free half-edge of a pendant edge.
    Free,
    /// Unpartnered half-edge.
    Standalone,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multigraph {
    vcolor: Vec<u32>,
    half: Vec<HalfEdge>,
    inc: Vec<Vec<usize>>,
}

/// A morphism between two multigraphs given on vertices and half-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMapping {
    pub vertex: Vec<usize>,
    pub half: Vec<usize>,
}

impl VertexMapping {
    pub fn identity(g: &Multigraph) -> Self {
        VertexMapping {
            vertex: (0..g.vertex_count()).collect(),
            half: (0..g.half_count()).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut vertex = vec![usize::MAX; self.vertex.len()];
        for (a, &b) in self.vertex.iter().enumerate() {
            vertex[b] = a;
        }
        let mut half = vec![usize::MAX; self.half.len()];
        for (a, &b) in self.half.iter().enumerate() {
            half[b] = a;
        }
        VertexMapping { vertex, half }
    }

    /// Recovers the vertex part of a half-edge permutation of `g`. Vertices
    /// without half-edges stay fixed. `None` when the image of some vertex
    /// is not well defined.
    pub fn from_half_permutation(g: &Multigraph, half: Vec<usize>) -> Option<Self> {
        if half.len() != g.half_count() || half.iter().any(|&y| y >= g.half_count()) {
            return None;
        }
        let mut vertex: Vec<Option<usize>> = vec![None; g.vertex_count()];
        for (x, &y) in half.iter().enumerate() {
            match (g.vertex_of(x), g.vertex_of(y)) {
                (Some(a), Some(b)) => match vertex[a] {
                    None => vertex[a] = Some(b),
                    Some(c) if c != b => return None,
                    _ => {}
                },
                (None, None) => {}
                _ => return None,
            }
        }
        let vertex = vertex.iter().enumerate().map(|(v, m)| m.unwrap_or(v)).collect();
        Some(VertexMapping { vertex, half })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &VertexMapping) -> Self {
        VertexMapping {
            vertex: self.vertex.iter().map(|&v| other.vertex[v]).collect(),
            half: self.half.iter().map(|&h| other.half[h]).collect(),
        }
    }
}

/// Structural violation found by [`Multigraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("half-edge {0} has an inconsistent partner")]
    Partner(usize),
    #[error("half-edge {0} has a type that does not match its partner")]
    Type(usize),
    #[error("half-edge {0} has a color that does not match its partner")]
    Color(usize),
    #[error("half-edge {0} refers to a missing vertex")]
    Vertex(usize),
    #[error("half-edge {0} is free and unpartnered")]
    Detached(usize),
    #[error("free half-edge {0} is partnered with a free half-edge")]
    FreeEdge(usize),
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(n: usize) -> Self {
        Multigraph {
            vcolor: vec![0; n],
            half: Vec::new(),
            inc: vec![Vec::new(); n],
        }
    }

    pub fn add_vertex(&mut self, color: u32) -> usize {
        self.vcolor.push(color);
        self.inc.push(Vec::new());
        self.vcolor.len() - 1
    }

    pub(crate) fn push_half(&mut self, vertex: Option<usize>, color: u32, etype: EdgeType) -> usize {
        let id = self.half.len();
        self.half.push(HalfEdge {
            vertex,
            partner: None,
            color,
            etype,
        });
        if let Some(v) = vertex {
            self.inc[v].push(id);
        }
        id
    }

    pub(crate) fn pair(&mut self, a: usize, b: usize) {
        self.half[a].partner = Some(b);
        self.half[b].partner = Some(a);
    }

    /// Adds an undirected or halvable edge; `u == v` gives a loop.
    pub fn add_edge(&mut self, u: usize, v: usize, color: u32, etype: EdgeType) -> (usize, usize) {
        debug_assert!(!etype.is_directed());
        let a = self.push_half(Some(u), color, etype);
        let b = self.push_half(Some(v), color, etype);
        self.pair(a, b);
        (a, b)
    }

    /// Adds a directed edge from `tail` to `head`.
    pub fn add_arc(&mut self, tail: usize, head: usize, color: u32) -> (usize, usize) {
        let a = self.push_half(Some(tail), color, EdgeType::Tail);
        let b = self.push_half(Some(head), color, EdgeType::Head);
        self.pair(a, b);
        (a, b)
    }

    /// Adds an edge whose half-edges carry the given types (used when copying
    /// edges between graphs).
    pub fn add_typed(
        &mut self,
        u: Option<usize>,
        v: Option<usize>,
        color: u32,
        tu: EdgeType,
    ) -> (usize, usize) {
        let a = self.push_half(u, color, tu);
        let b = self.push_half(v, color, tu.opposite());
        self.pair(a, b);
        (a, b)
    }

    pub fn add_pendant(&mut self, v: usize, color: u32, etype: EdgeType) -> (usize, usize) {
        self.add_typed(Some(v), None, color, etype)
    }

    pub fn add_half_edge(&mut self, v: usize, color: u32, etype: EdgeType) -> usize {
        self.push_half(Some(v), color, etype)
    }

    pub fn set_vertex_color(&mut self, v: usize, color: u32) {
        self.vcolor[v] = color;
    }

    pub fn vertex_count(&self) -> usize {
        self.vcolor.len()
    }

    pub fn half_count(&self) -> usize {
        self.half.len()
    }

    /// Number of edges, counting loops and pendant edges once each. Standalone
    /// half-edges are not edges.
    pub fn edge_count(&self) -> usize {
        self.half.iter().filter(|h| h.partner.is_some()).count() / 2
    }

    pub fn standalone_count(&self) -> usize {
        self.half.iter().filter(|h| h.partner.is_none()).count()
    }

    pub fn vertex_color(&self, v: usize) -> u32 {
        self.vcolor[v]
    }

    pub fn vertex_colors(&self) -> &[u32] {
        &self.vcolor
    }

    pub fn half_edge(&self, h: usize) -> &HalfEdge {
        &self.half[h]
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half
    }

    pub fn partner(&self, h: usize) -> Option<usize> {
        self.half[h].partner
    }

    pub fn vertex_of(&self, h: usize) -> Option<usize> {
        self.half[h].vertex
    }

    /// Half-edges attached to `v`, in increasing order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.inc[v].len()
    }

    pub fn shape(&self, h: usize) -> Shape {
        let he = &self.half[h];
        match (he.vertex, he.partner) {
            (None, _) => Shape::Free,
            (Some(_), None) => Shape::Standalone,
            (Some(v), Some(p)) => match self.half[p].vertex {
                None => Shape::Pendant,
                Some(w) if w == v => Shape::Loop,
                Some(_) => Shape::Normal,
            },
        }
    }

    /// The other endpoint of the edge through `h`, if it is attached to a vertex.
    pub fn opposite_vertex(&self, h: usize) -> Option<usize> {
        self.half[h].partner.and_then(|p| self.half[p].vertex)
    }

    /// Representative half-edge of each edge or standalone half-edge: the
    /// smaller index of a partnered pair.
    pub fn edge_reps(&self) -> Vec<usize> {
        (0..self.half.len())
            .filter(|&h| match self.half[h].partner {
                None => true,
                Some(p) => h < p,
            })
            .collect()
    }

    /// Canonical edge id of the edge containing `h`.
    pub fn edge_of(&self, h: usize) -> usize {
        match self.half[h].partner {
            Some(p) if p < h => p,
            _ => h,
        }
    }

    /// Half-edges of normal edges joining `u` and `v` seen from `u`.
    pub fn half_edges_between(&self, u: usize, v: usize) -> Vec<usize> {
        self.inc[u]
            .iter()
            .copied()
            .filter(|&h| u != v && self.opposite_vertex(h) == Some(v))
            .collect()
    }

    /// Distinct neighbours of `v` through normal edges.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.inc[v]
            .iter()
            .filter_map(|&h| self.opposite_vertex(h))
            .filter(|&w| w != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        self.component_of(0).len() == n
    }

    /// Vertices reachable from `start` through normal edges, sorted.
    pub fn component_of(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut out = Vec::new();
        while let Some(v) = stack.pop() {
            out.push(v);
            for &h in &self.inc[v] {
                if let Some(w) = self.opposite_vertex(h) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// True if the graph has no loops, parallel edges, pendant edges or
    /// standalone half-edges.
    pub fn is_simple(&self) -> bool {
        for v in 0..self.vertex_count() {
            let mut seen = Vec::new();
            for &h in &self.inc[v] {
                if self.shape(h) != Shape::Normal {
                    return false;
                }
                let w = self.opposite_vertex(h).unwrap();
                if seen.contains(&w) {
                    return false;
                }
                seen.push(w);
            }
        }
        true
    }

    /// Checks the structural invariants of the half-edge model.
    pub fn validate(&self) -> Result<(), GraphError> {
        for (i, he) in self.half.iter().enumerate() {
            if let Some(v) = he.vertex {
                if v >= self.vcolor.len() || !self.inc[v].contains(&i) {
                    return Err(GraphError::Vertex(i));
                }
            }
            match he.partner {
                Some(p) => {
                    if p == i || p >= self.half.len() || self.half[p].partner != Some(i) {
                        return Err(GraphError::Partner(i));
                    }
                    if self.half[p].etype != he.etype.opposite() {
                        return Err(GraphError::Type(i));
                    }
                    if self.half[p].color != he.color {
                        return Err(GraphError::Color(i));
                    }
                    if he.vertex.is_none() && self.half[p].vertex.is_none() {
                        return Err(GraphError::FreeEdge(i));
                    }
                }
                None => {
                    if he.vertex.is_none() {
                        return Err(GraphError::Detached(i));
                    }
                }
            }
        }
        for (v, list) in self.inc.iter().enumerate() {
            for &h in list {
                if self.half[h].vertex != Some(v) {
                    return Err(GraphError::Vertex(h));
                }
            }
        }
        Ok(())
    }

    /// Builds the subgraph spanned by the given vertices and half-edges. Every
    /// half-edge whose partner is not selected becomes standalone unless
    /// `cut_to_pendant` is set, in which case its partner is kept as a free
    /// half-edge. Returns the subgraph together with the old-to-new maps.
    pub fn subgraph(
        &self,
        vertices: &[usize],
        halves: &[usize],
        cut_to_pendant: bool,
    ) -> (Multigraph, BTreeMap<usize, usize>, BTreeMap<usize, usize>) {
        let mut g = Multigraph::new();
        let mut vmap = BTreeMap::new();
        for &v in vertices {
            vmap.insert(v, g.add_vertex(self.vcolor[v]));
        }
        let mut hmap = BTreeMap::new();
        let mut selected: Vec<usize> = halves.to_vec();
        selected.sort_unstable();
        selected.dedup();
        for &h in &selected {
            let he = self.half[h];
            let vertex = he.vertex.map(|v| vmap[&v]);
            let id = g.push_half(vertex, he.color, he.etype);
            hmap.insert(h, id);
        }
        for &h in &selected {
            if let Some(p) = self.half[h].partner {
                if let Some(&q) = hmap.get(&p) {
                    g.half[hmap[&h]].partner = Some(q);
                } else if cut_to_pendant {
                    let he = self.half[p];
                    let id = g.push_half(None, he.color, he.etype);
                    let a = hmap[&h];
                    g.pair(a, id);
                }
            }
        }
        (g, vmap, hmap)
    }

    /// True if `m` is a color-, type- and incidence-preserving bijection
    /// from `self` onto `h`.
    pub fn is_isomorphism(&self, h: &Multigraph, m: &VertexMapping) -> bool {
        let n = self.vertex_count();
        if n != h.vertex_count()
            || self.half_count() != h.half_count()
            || m.vertex.len() != n
            || m.half.len() != self.half_count()
        {
            return false;
        }
        let mut seen_v = vec![false; n];
        for (v, &w) in m.vertex.iter().enumerate() {
            if w >= n || seen_v[w] || self.vcolor[v] != h.vcolor[w] {
                return false;
            }
            seen_v[w] = true;
        }
        let mut seen_h = vec![false; self.half_count()];
        for (x, &y) in m.half.iter().enumerate() {
            if y >= seen_h.len() || seen_h[y] {
                return false;
            }
            seen_h[y] = true;
            let a = &self.half[x];
            let b = &h.half[y];
            if a.color != b.color
                || a.etype != b.etype
                || a.vertex.map(|v| m.vertex[v]) != b.vertex
                || a.partner.map(|p| m.half[p]) != b.partner
            {
                return false;
            }
        }
        true
    }

    /// Recolors a single half-edge without touching its partner. Used to pin
    /// half-edges before an isomorphism search; the result may not validate.
    pub fn mark_half(&mut self, h: usize, color: u32) {
        self.half[h].color = color;
    }

    /// Label of a half-edge used by isomorphism tests.
    pub fn label(&self, h: usize) -> (u32, EdgeType) {
        (self.half[h].color, self.half[h].etype)
    }

    /// Removes vertices of degree one whose only half-edge belongs to an edge
    /// towards a vertex of degree at least two. The removed vertex's half-edge
    /// stays as the free end of a pendant edge. Colored vertices are kept, as
    /// is any `K2` component. Returns the normalized graph and, for each of
    /// its vertices, the original vertex index.
    pub fn normalize(&self) -> Normalized {
        let n = self.vertex_count();
        let mut removed = vec![false; n];
        for v in 0..n {
            if self.vcolor[v] != 0 || self.inc[v].len() != 1 {
                continue;
            }
            let h = self.inc[v][0];
            if self.shape(h) != Shape::Normal {
                continue;
            }
            let w = self.opposite_vertex(h).unwrap();
            if self.inc[w].len() >= 2 {
                removed[v] = true;
            }
        }
        let mut g = Multigraph::new();
        let mut new_of = vec![None; n];
        let mut original = Vec::new();
        for v in 0..n {
            if !removed[v] {
                new_of[v] = Some(g.add_vertex(self.vcolor[v]));
                original.push(v);
            }
        }
        for (i, he) in self.half.iter().enumerate() {
            let vertex = he.vertex.and_then(|v| new_of[v]);
            let id = g.push_half(vertex, he.color, he.etype);
            debug_assert_eq!(id, i);
        }
        for (i, he) in self.half.iter().enumerate() {
            g.half[i].partner = he.partner;
        }
        Normalized {
            graph: g,
            original_vertex: original,
            removed_vertex_of_half: (0..self.half.len())
                .map(|h| self.half[h].vertex.filter(|&v| removed[v]))
                .collect(),
        }
    }

    /// Total number of attached half-edges in each `(color, type, shape)`
    /// class; a cheap isomorphism invariant.
    pub fn label_census(&self) -> BTreeMap<(u32, EdgeType, Shape), usize> {
        let mut out = BTreeMap::new();
        for h in 0..self.half.len() {
            *out.entry((self.half[h].color, self.half[h].etype, self.shape(h)))
                .or_insert(0) += 1;
        }
        out
    }

    /// Renumbers the vertices of the graph by `perm[v]` (new index of `v`).
    pub fn relabel_vertices(&self, perm: &[usize]) -> Multigraph {
        let n = self.vertex_count();
        let mut g = Multigraph::with_vertices(n);
        for v in 0..n {
            g.vcolor[perm[v]] = self.vcolor[v];
        }
        for he in &self.half {
            g.push_half(he.vertex.map(|v| perm[v]), he.color, he.etype);
        }
        for (i, he) in self.half.iter().enumerate() {
            g.half[i].partner = he.partner;
        }
        for list in &mut g.inc {
            list.sort_unstable();
        }
        g
    }
}

/// Result of [`Multigraph::normalize`]. Half-edge indices are unchanged.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub graph: Multigraph,
    pub original_vertex: Vec<usize>,
    /// For each half-edge, the removed degree-one vertex it was attached to.
    pub removed_vertex_of_half: Vec<Option<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Multigraph {
        let mut g = Multigraph::with_vertices(2);
        g.add_edge(0, 1, 0, EdgeType::Halvable);
        g
    }

    #[test]
    fn shapes_and_counts() {
        let mut g = Multigraph::with_vertices(2);
        g.add_edge(0, 1, 0, EdgeType::Halvable);
        g.add_edge(0, 0, 2, EdgeType::Undirected);
        g.add_pendant(1, 0, EdgeType::Halvable);
        g.add_half_edge(1, 3, EdgeType::Halvable);
        g.validate().unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.standalone_count(), 1);
        assert_eq!(g.half_count(), 7);
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.degree(1), 3);
        assert_eq!(g.shape(0), Shape::Normal);
        assert_eq!(g.shape(2), Shape::Loop);
        assert_eq!(g.shape(4), Shape::Pendant);
        assert_eq!(g.shape(5), Shape::Free);
        assert_eq!(g.shape(6), Shape::Standalone);
        assert!(!g.is_simple());
        assert!(k2().is_simple());
    }

    #[test]
    fn normalization_keeps_k2_and_strips_leaves() {
        let g = k2();
        assert_eq!(g.normalize().graph.vertex_count(), 2);

        let mut p3 = Multigraph::with_vertices(3);
        p3.add_edge(0, 1, 0, EdgeType::Halvable);
        p3.add_edge(1, 2, 0, EdgeType::Halvable);
        let n = p3.normalize();
        assert_eq!(n.graph.vertex_count(), 1);
        assert_eq!(n.graph.edge_count(), 2);
        assert_eq!(n.original_vertex, vec![1]);
        n.graph.validate().unwrap();
        assert_eq!(n.graph.shape(1), Shape::Pendant);
    }

    #[test]
    fn subgraph_cuts_edges() {
        let mut g = Multigraph::with_vertices(3);
        g.add_edge(0, 1, 0, EdgeType::Halvable);
        g.add_edge(1, 2, 0, EdgeType::Halvable);
        let (s, vmap, _) = g.subgraph(&[0, 1], &[0, 1, 2], true);
        s.validate().unwrap();
        assert_eq!(s.vertex_count(), 2);
        assert_eq!(s.edge_count(), 2);
        assert_eq!(vmap[&1], 1);
    }
}
