//! Isomorphism by simultaneous reduction.
//!
//! Both graphs are reduced against one catalog. Isomorphic graphs have
//! isomorphic series level by level, so an isomorphism of the primitive
//! graphs is lifted back through the steps by swapping in catalog copies of
//! the atoms.

use crate::decomposition::classify_primitive;
use crate::decomposition::Primitive;
use crate::multigraph::{find_isomorphism, IsoOptions, Multigraph, VertexMapping};
use crate::planar::list_iso_3conn;
use crate::reduction::{reduction_series, Catalog, ReductionStep, SeriesMode};

/// Graphs up to this many vertices go straight to the generic search.
const DIRECT_LIMIT: usize = 48;

/// An isomorphism `g -> h`, if any. Connected inputs only.
pub fn isomorphism(g: &Multigraph, h: &Multigraph) -> Option<VertexMapping> {
    if g.vertex_count() != h.vertex_count()
        || g.half_count() != h.half_count()
        || g.label_census() != h.label_census()
    {
        return None;
    }
    if g.vertex_count() <= DIRECT_LIMIT {
        let opts = IsoOptions {
            bound: DIRECT_LIMIT,
            node_budget: 200_000,
        };
        if let Ok(r) = find_isomorphism(g, h, None, opts) {
            return r;
        }
    }
    reduced_isomorphism(g, h)
}

/// Isomorphism test through simultaneous reduction series.
pub fn reduced_isomorphism(g: &Multigraph, h: &Multigraph) -> Option<VertexMapping> {
    if !g.is_connected() || !h.is_connected() {
        return None;
    }
    let mut catalog = Catalog::for_graphs(&[g, h]);
    let sg = reduction_series(g, &mut catalog, SeriesMode::Plain).ok()?;
    let sh = reduction_series(h, &mut catalog, SeriesMode::Plain).ok()?;
    if sg.steps.len() != sh.steps.len() {
        return None;
    }
    let mut phi = primitive_isomorphism(sg.primitive(), sh.primitive())?;
    for i in (0..sg.steps.len()).rev() {
        phi = lift_isomorphism(
            &sg.graphs[i],
            &sh.graphs[i],
            &sg.steps[i],
            &sh.steps[i],
            &catalog,
            &phi,
        )?;
    }
    g.is_isomorphism(h, &phi).then_some(phi)
}

fn primitive_isomorphism(g: &Multigraph, h: &Multigraph) -> Option<VertexMapping> {
    if classify_primitive(g) == Primitive::Essentially3Connected {
        if let Ok(r) = list_iso_3conn(g, h, None) {
            return r;
        }
    }
    let opts = IsoOptions {
        bound: usize::MAX,
        node_budget: 50_000_000,
    };
    find_isomorphism(g, h, None, opts).ok().flatten()
}

pub(crate) fn forward_maps(gi: &Multigraph, step: &ReductionStep) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut fv = vec![None; gi.vertex_count()];
    for (new, &old) in step.vertex_back.iter().enumerate() {
        fv[old] = Some(new);
    }
    let mut fh = vec![None; gi.half_count()];
    for (new, old) in step.half_back.iter().enumerate() {
        if let Some(old) = old {
            fh[*old] = Some(new);
        }
    }
    (fv, fh)
}

/// Lifts an isomorphism of the next graphs to one of `gi -> hi`.
fn lift_isomorphism(
    gi: &Multigraph,
    hi: &Multigraph,
    sg: &ReductionStep,
    sh: &ReductionStep,
    catalog: &Catalog,
    phi: &VertexMapping,
) -> Option<VertexMapping> {
    if gi.vertex_count() != hi.vertex_count() || gi.half_count() != hi.half_count() {
        return None;
    }
    let (fv, fh) = forward_maps(gi, sg);
    let mut vertex = vec![usize::MAX; gi.vertex_count()];
    let mut half = vec![usize::MAX; gi.half_count()];
    for v in 0..gi.vertex_count() {
        if let Some(x) = fv[v] {
            vertex[v] = sh.vertex_back[phi.vertex[x]];
        }
    }
    for x in 0..gi.half_count() {
        if let Some(y) = fh[x] {
            half[x] = sh.half_back[phi.half[y]]?;
        }
    }
    for a in &sg.atoms {
        let y = phi.half[a.edge.0];
        let b = &sh.atoms[sh.atom_of_half[y]?];
        if b.color != a.color {
            return None;
        }
        let entry = catalog.entry(a.color)?;
        let m = if y == b.edge.0 {
            VertexMapping {
                vertex: (0..entry.rep.graph.vertex_count()).collect(),
                half: (0..entry.rep.graph.half_count()).collect(),
            }
        } else {
            entry.swap.clone()?
        };
        for r in 0..m.vertex.len() {
            vertex[a.rep_to_host.vertex[r]] = b.rep_to_host.vertex[m.vertex[r]];
        }
        for q in 0..m.half.len() {
            half[a.rep_to_host.half[q]] = b.rep_to_host.half[m.half[q]];
        }
    }
    if vertex.contains(&usize::MAX) || half.contains(&usize::MAX) {
        return None;
    }
    Some(VertexMapping { vertex, half })
}
