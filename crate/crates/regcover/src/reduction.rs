//! Reduction series and the atom catalog.
//!
//! Each step replaces every atom of the current graph by a colored edge:
//! block atoms become pendant edges, proper atoms and dipoles become edges
//! whose type records the atom's symmetry. The catalog keeps one
//! representative per isomorphism class together with the data needed to
//! expand the edge back.

use crate::covering::quotient_unchecked;
use crate::decomposition::{
    atom_key, atoms_isomorphic, dipole_symmetry_type, find_atoms, proper_atom_symmetry, Atom,
    AtomGraph, AtomKind, AtomOptions, BlockTree, SymmetryType, BOUNDARY_MARK,
};
use crate::multigraph::{
    backtrack_list_iso, half_edge_extensions, EdgeType, Multigraph, Shape, VertexMapping,
};
use std::collections::BTreeMap;
use std::fmt::Write;

/// A quotient of an atom by an involution that swaps its two boundary
/// vertices. `root` is the image of the boundary.
#[derive(Clone, Debug)]
pub struct HalfQuotient {
    pub involution: VertexMapping,
    pub quotient: Multigraph,
    pub root: usize,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub color: u32,
    pub level: usize,
    pub kind: AtomKind,
    pub symmetry: SymmetryType,
    pub rep: AtomGraph,
    /// An automorphism of the representative exchanging its boundary.
    pub swap: Option<VertexMapping>,
    /// Half-quotients of proper atoms, one per rooted isomorphism class.
    pub half_quotients: Vec<HalfQuotient>,
    /// Vertices and edges the colored edge stands for in the input graph.
    pub expanded: (usize, usize),
}

impl CatalogEntry {
    /// Type of the edge replacing atoms of this class.
    pub fn edge_type(&self) -> EdgeType {
        match self.symmetry {
            _ if self.kind.is_block() => EdgeType::Halvable,
            SymmetryType::Halvable => EdgeType::Halvable,
            SymmetryType::Symmetric => EdgeType::Undirected,
            SymmetryType::Asymmetric => EdgeType::Tail,
        }
    }

    /// Involutions of the representative, one per half-quotient class.
    pub fn half_involutions(&self) -> Vec<VertexMapping> {
        match self.kind {
            AtomKind::Dipole if self.symmetry == SymmetryType::Halvable => {
                dipole_half_involutions(&self.rep.graph)
            }
            AtomKind::Proper => self.half_quotients.iter().map(|q| q.involution.clone()).collect(),
            _ => Vec::new(),
        }
    }
}

/// Color classes of atoms seen so far.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    first_color: u32,
    by_key: BTreeMap<String, Vec<usize>>,
}

impl Catalog {
    /// A catalog whose colors start above every color used in `graphs`.
    pub fn for_graphs(graphs: &[&Multigraph]) -> Catalog {
        let mut max = 0;
        for g in graphs {
            max = max.max(g.vertex_colors().iter().copied().max().unwrap_or(0));
            max = max.max(g.half_edges().iter().map(|h| h.color).max().unwrap_or(0));
        }
        Catalog {
            entries: Vec::new(),
            first_color: max + 1,
            by_key: BTreeMap::new(),
        }
    }

    pub fn entry(&self, color: u32) -> Option<&CatalogEntry> {
        if color < self.first_color {
            return None;
        }
        self.entries.get((color - self.first_color) as usize)
    }

    /// Vertices and edges a half-edge of the given color stands for.
    pub fn expanded(&self, color: u32) -> (usize, usize) {
        self.entry(color).map(|e| e.expanded).unwrap_or((0, 1))
    }

    /// The class of `ag` if it is already known.
    pub fn lookup(&self, ag: &AtomGraph) -> Option<(u32, VertexMapping)> {
        let key = format!("{:?}", atom_key(ag));
        for &i in self.by_key.get(&key)? {
            if let Some(m) = atoms_isomorphic(&self.entries[i].rep, ag) {
                return Some((self.entries[i].color, m));
            }
        }
        None
    }

    /// Finds or creates the class of `ag`. Returns the color and an
    /// isomorphism from the representative onto `ag`.
    pub fn classify(&mut self, ag: &AtomGraph, level: usize) -> (u32, VertexMapping) {
        if let Some(found) = self.lookup(ag) {
            return found;
        }
        let key = format!("{:?}", atom_key(ag));
        let color = self.first_color + self.entries.len() as u32;
        let (symmetry, swap, half_quotients) = match ag.kind {
            AtomKind::StarBlock | AtomKind::NonStarBlock => {
                (SymmetryType::Symmetric, None, Vec::new())
            }
            AtomKind::Dipole => {
                let t = dipole_symmetry_type(ag);
                let swap = if t == SymmetryType::Asymmetric {
                    None
                } else {
                    let m = ag.marked();
                    half_edge_extensions(&m, &m, &[1, 0], 1)
                        .into_iter()
                        .next()
                        .map(|half| VertexMapping {
                            vertex: vec![1, 0],
                            half,
                        })
                };
                (t, swap, Vec::new())
            }
            AtomKind::Proper => {
                let (t, swap, invs) = proper_atom_symmetry(ag);
                (t, swap, distinct_half_quotients(&ag.graph, invs))
            }
        };
        let mut expanded = (ag.graph.vertex_count() - ag.boundary, 0);
        for h in ag.graph.edge_reps() {
            let (v, e) = self.expanded(ag.graph.half_edge(h).color);
            expanded.0 += v;
            expanded.1 += e;
        }
        let idx = self.entries.len();
        self.entries.push(CatalogEntry {
            color,
            level,
            kind: ag.kind,
            symmetry,
            rep: ag.clone(),
            swap,
            half_quotients,
            expanded,
        });
        self.by_key.entry(key).or_default().push(idx);
        let id = VertexMapping {
            vertex: (0..ag.graph.vertex_count()).collect(),
            half: (0..ag.graph.half_count()).collect(),
        };
        (color, id)
    }
}

/// Quotient of an atom by `{1, t}` with the boundary image.
pub fn half_quotient(rep: &Multigraph, t: &VertexMapping) -> (Multigraph, usize) {
    let id = VertexMapping {
        vertex: (0..rep.vertex_count()).collect(),
        half: (0..rep.half_count()).collect(),
    };
    let (q, proj) = quotient_unchecked(rep, &[id, t.clone()]);
    (q, proj.vertex[0])
}

fn rooted(q: &Multigraph, root: usize) -> Multigraph {
    let mut m = q.clone();
    m.set_vertex_color(root, BOUNDARY_MARK);
    m
}

fn distinct_half_quotients(rep: &Multigraph, invs: Vec<VertexMapping>) -> Vec<HalfQuotient> {
    let mut out: Vec<HalfQuotient> = Vec::new();
    for t in invs {
        let (q, root) = half_quotient(rep, &t);
        let rq = rooted(&q, root);
        let dup = out.iter().any(|o| {
            backtrack_list_iso(&rooted(&o.quotient, o.root), &rq, None)
                .ok()
                .flatten()
                .is_some()
        });
        if !dup {
            out.push(HalfQuotient {
                involution: t,
                quotient: q,
                root,
            });
        }
    }
    out
}

/// Half-quotients of a dipole representative, one per rooted isomorphism
/// class.
pub fn dipole_half_quotients(rep: &Multigraph) -> Vec<HalfQuotient> {
    distinct_half_quotients(rep, dipole_half_involutions(rep))
}

/// Every half-quotient class of a halvable dipole, as involutions of the
/// representative. Each halvable color class of size `m` contributes
/// `h` reversed edges and `l` swapped pairs with `h + 2l = m`; other edges
/// are always swapped in pairs.
pub fn dipole_half_involutions(rep: &Multigraph) -> Vec<VertexMapping> {
    let mut classes: BTreeMap<(u32, EdgeType), Vec<usize>> = BTreeMap::new();
    for &h in rep.incident(0) {
        let he = rep.half_edge(h);
        classes.entry((he.color, he.etype)).or_default().push(h);
    }
    let mut base = VertexMapping {
        vertex: vec![1, 0],
        half: (0..rep.half_count()).collect(),
    };
    let swap_pair = |m: &mut VertexMapping, a: usize, b: usize| {
        // a, b are half-edges at vertex 0 of two distinct edges.
        let (pa, pb) = (rep.partner(a).unwrap(), rep.partner(b).unwrap());
        m.half[a] = pb;
        m.half[pb] = a;
        m.half[b] = pa;
        m.half[pa] = b;
    };
    let mut halvable: Vec<Vec<usize>> = Vec::new();
    for ((color, t), hs) in &classes {
        match t {
            EdgeType::Halvable => halvable.push(hs.clone()),
            EdgeType::Undirected => {
                for pair in hs.chunks(2) {
                    swap_pair(&mut base, pair[0], pair[1]);
                }
            }
            EdgeType::Tail => {
                let heads = &classes[&(*color, EdgeType::Head)];
                for (&a, &b) in hs.iter().zip(heads) {
                    swap_pair(&mut base, a, b);
                }
            }
            EdgeType::Head => {}
        }
    }
    let mut out = vec![base];
    for hs in halvable {
        let m = hs.len();
        let mut next = Vec::new();
        for m0 in &out {
            for pairs in 0..=m / 2 {
                let mut t = m0.clone();
                for j in 0..pairs {
                    swap_pair(&mut t, hs[2 * j], hs[2 * j + 1]);
                }
                for &a in &hs[2 * pairs..] {
                    let p = rep.partner(a).unwrap();
                    t.half[a] = p;
                    t.half[p] = a;
                }
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// An atom replaced in one step.
#[derive(Clone, Debug)]
pub struct ReplacedAtom {
    pub atom: Atom,
    pub color: u32,
    /// Isomorphism from the catalog representative into the host graph.
    pub rep_to_host: VertexMapping,
    /// Half-edges of the replacing edge in the next graph: the one at the
    /// image of the representative's first boundary vertex, then the other.
    pub edge: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub atoms: Vec<ReplacedAtom>,
    /// Vertex of the next graph to vertex of this graph.
    pub vertex_back: Vec<usize>,
    /// Half-edge of the next graph to half-edge of this graph, `None` for
    /// replacing edges.
    pub half_back: Vec<Option<usize>>,
    /// Replacing half-edge of the next graph to its atom.
    pub atom_of_half: Vec<Option<usize>>,
}

#[derive(Clone, Debug)]
pub struct ReductionSeries {
    pub graphs: Vec<Multigraph>,
    pub steps: Vec<ReductionStep>,
}

impl ReductionSeries {
    pub fn primitive(&self) -> &Multigraph {
        self.graphs.last().unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesMode {
    /// Every graph must have a central block; reduction stops otherwise.
    Cover,
    /// Any center; a star at a central articulation is reduced too.
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("no central block at level {0}")]
    NoCenter(usize),
    #[error("graph is disconnected or empty")]
    Disconnected,
}

/// Replaces the given atoms of `g` and returns the next graph.
pub fn replace_atoms(
    g: &Multigraph,
    atoms: &[Atom],
    catalog: &mut Catalog,
    level: usize,
) -> (Multigraph, ReductionStep) {
    let mut in_atom_v = vec![false; g.vertex_count()];
    let mut in_atom_h = vec![false; g.half_count()];
    for a in atoms {
        for &v in &a.interior {
            in_atom_v[v] = true;
        }
        for &h in &a.halves {
            in_atom_h[h] = true;
        }
    }
    let kept_v: Vec<usize> = (0..g.vertex_count()).filter(|&v| !in_atom_v[v]).collect();
    let kept_h: Vec<usize> = (0..g.half_count()).filter(|&h| !in_atom_h[h]).collect();
    let (mut next, vmap, hmap) = g.subgraph(&kept_v, &kept_h, false);
    let mut half_back = vec![None; next.half_count()];
    for (&old, &new) in &hmap {
        half_back[new] = Some(old);
    }
    let mut replaced = Vec::new();
    for a in atoms {
        let ag = AtomGraph::from_atom(g, a);
        let (color, rep_to_atom) = catalog.classify(&ag, level);
        let rep_to_host = VertexMapping {
            vertex: rep_to_atom.vertex.iter().map(|&x| ag.host_vertex[x]).collect(),
            half: rep_to_atom.half.iter().map(|&x| ag.host_half[x]).collect(),
        };
        let entry = catalog.entry(color).unwrap();
        let b0 = vmap[&rep_to_host.vertex[0]];
        let edge = if a.boundary.len() == 1 {
            next.add_pendant(b0, color, EdgeType::Halvable)
        } else {
            let b1 = vmap[&rep_to_host.vertex[1]];
            match entry.edge_type() {
                EdgeType::Tail => next.add_arc(b0, b1, color),
                t => next.add_edge(b0, b1, color, t),
            }
        };
        replaced.push(ReplacedAtom {
            atom: a.clone(),
            color,
            rep_to_host,
            edge,
        });
    }
    let mut atom_of_half = vec![None; next.half_count()];
    half_back.resize(next.half_count(), None);
    for (i, r) in replaced.iter().enumerate() {
        atom_of_half[r.edge.0] = Some(i);
        atom_of_half[r.edge.1] = Some(i);
    }
    (
        next,
        ReductionStep {
            atoms: replaced,
            vertex_back: kept_v,
            half_back,
            atom_of_half,
        },
    )
}

/// Reduces `g` until it is primitive.
pub fn reduction_series(
    g: &Multigraph,
    catalog: &mut Catalog,
    mode: SeriesMode,
) -> Result<ReductionSeries, ReductionError> {
    let mut graphs = vec![g.clone()];
    let mut steps = Vec::new();
    loop {
        let cur = graphs.last().unwrap();
        let tree = BlockTree::new(cur).map_err(|_| ReductionError::Disconnected)?;
        if mode == SeriesMode::Cover && !tree.center_is_block() {
            return Err(ReductionError::NoCenter(steps.len()));
        }
        let opts = AtomOptions {
            core_star: mode == SeriesMode::Plain,
            ..AtomOptions::default()
        };
        let atoms = find_atoms(cur, &tree, opts);
        if atoms.is_empty() {
            break;
        }
        let (next, step) = replace_atoms(cur, &atoms, catalog, steps.len());
        graphs.push(next);
        steps.push(step);
    }
    Ok(ReductionSeries { graphs, steps })
}

/// Total vertex and edge counts a graph stands for after full expansion.
pub fn expanded_size(g: &Multigraph, catalog: &Catalog) -> (usize, usize) {
    let mut out = (g.vertex_count(), 0);
    for h in g.edge_reps() {
        let (v, e) = catalog.expanded(g.half_edge(h).color);
        out.0 += v;
        out.1 += e;
    }
    out
}

/// Human-readable dump of a series and the catalog entries it uses.
pub fn dump_series(series: &ReductionSeries, catalog: &Catalog) -> String {
    let mut out = String::new();
    for (i, step) in series.steps.iter().enumerate() {
        let g = &series.graphs[i];
        let _ = writeln!(
            out,
            "level {i}: {} vertices, {} edges, {} atoms",
            g.vertex_count(),
            g.edge_reps().len(),
            step.atoms.len()
        );
        for a in &step.atoms {
            let e = catalog.entry(a.color).unwrap();
            let b: Vec<String> = a.rep_to_host.vertex[..e.rep.boundary]
                .iter()
                .map(|v| (v + 1).to_string())
                .collect();
            let _ = writeln!(
                out,
                "  {:?} atom -> color {} ({:?}), boundary {}, {} interior vertices",
                e.kind,
                a.color,
                e.symmetry,
                b.join(" "),
                a.atom.interior.len()
            );
        }
    }
    let r = series.primitive();
    let _ = writeln!(
        out,
        "primitive: {} vertices, {} edges ({:?})",
        r.vertex_count(),
        r.edge_reps().len(),
        crate::decomposition::classify_primitive(r)
    );
    out
}

/// Vertices of `g` that are not endpoints of normal edges or loops, which
/// only happens for K1 variants.
pub fn is_k1_variant(g: &Multigraph) -> bool {
    g.vertex_count() == 1
        && (0..g.half_count()).all(|h| matches!(g.shape(h), Shape::Pendant | Shape::Free | Shape::Standalone | Shape::Loop))
}
