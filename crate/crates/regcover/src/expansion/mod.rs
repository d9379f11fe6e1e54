//! Regular covering decisions and quotient enumeration.
//!
//! `G` is reduced to a primitive graph `G_r`. Every semiregular group on `G`
//! is the extension of a semiregular group on `G_r`, and the quotients of
//! `G` are the expansions of the quotients of `G_r` by edge-, loop- and
//! half-quotients of atoms. The search extends each candidate group on
//! `G_r` level by level, choosing a half-quotient class whenever an atom's
//! edge is reversed, and tests the final quotient against `H`.

mod engine;
mod iso;
pub mod lists;

pub use iso::{isomorphism, reduced_isomorphism};
pub use lists::{bipartite_perfect_matching, test_expandable, ExpandWitness, ListStats};

use crate::covering::{certificate_check, quotient_unchecked};
use crate::multigraph::{find_isomorphism, EdgeType, IsoOptions, Multigraph, Normalized, VertexMapping};
use crate::planar::{is_planar, primitive_automorphisms, semiregular_subgroups};
use crate::reduction::{reduction_series, Catalog, ReductionError, SeriesMode};
use engine::{Pipeline, Search};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Tuning for [`regular_cover`] and [`enumerate_quotients`].
#[derive(Clone, Copy, Debug)]
pub struct CoverOptions {
    /// Maximum number of search nodes per candidate group on `G_r`.
    pub budget: u64,
    /// Worker threads for independent candidate groups; 1 runs serially.
    pub jobs: usize,
    /// Non-planar `G` is accepted only up to this many vertices.
    pub nonplanar_bound: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            budget: 1_000_000,
            jobs: 1,
            nonplanar_bound: crate::oracle::ORACLE_BOUND,
        }
    }
}

/// A semiregular group on `G`, an isomorphism from `G/Γ` (numbered as by
/// [`quotient_unchecked`]) onto `H`, and the induced projection.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub k: usize,
    pub elements: Vec<VertexMapping>,
    pub iso: VertexMapping,
    pub projection: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum CoverVerdict {
    Yes(Certificate),
    No,
}

impl CoverVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, CoverVerdict::Yes(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("refused: G is not planar ({vertices} vertices, bound {bound})")]
    NonPlanar { vertices: usize, bound: usize },
    #[error("search budget of {0} nodes exhausted")]
    Budget(u64),
}

/// Counters from one decision.
#[derive(Clone, Debug, Default)]
pub struct CoverStats {
    pub levels: usize,
    pub candidate_groups: usize,
    pub nodes: u64,
    pub list_star_calls: u64,
}

fn check_input(g: &Multigraph, what: &str) -> Result<(), CoverError> {
    if g.vertex_count() == 0 {
        return Err(CoverError::InvalidInput(format!("{what} has no vertices")));
    }
    if !g.is_connected() {
        return Err(CoverError::InvalidInput(format!("{what} is disconnected")));
    }
    g.validate()
        .map_err(|e| CoverError::InvalidInput(format!("{what}: {e}")))
}

fn dart_labels(g: &Multigraph) -> BTreeMap<(u32, EdgeType), usize> {
    let mut out = BTreeMap::new();
    for h in 0..g.half_count() {
        *out.entry(g.label(h)).or_insert(0) += 1;
    }
    out
}

fn vertex_colors(g: &Multigraph) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    for &c in g.vertex_colors() {
        *out.entry(c).or_insert(0) += 1;
    }
    out
}

/// The fold number if `G` could cover `H` by counting alone.
pub fn fold_number(g: &Multigraph, h: &Multigraph) -> Option<usize> {
    let (ng, nh) = (g.vertex_count(), h.vertex_count());
    if nh == 0 || ng % nh != 0 {
        return None;
    }
    let k = ng / nh;
    if g.half_count() != k * h.half_count() {
        return None;
    }
    fn scale<K: Ord>(m: BTreeMap<K, usize>, k: usize) -> BTreeMap<K, usize> {
        m.into_iter().map(|(key, c)| (key, c * k)).collect()
    }
    if dart_labels(g) != scale(dart_labels(h), k) || vertex_colors(g) != scale(vertex_colors(h), k) {
        return None;
    }
    Some(k)
}

pub(crate) fn identity_certificate(g: &Multigraph, iso: VertexMapping) -> Certificate {
    Certificate {
        k: 1,
        elements: vec![VertexMapping::identity(g)],
        projection: iso.half.clone(),
        iso,
    }
}

/// Carries a group on the normalized graph to the raw graph.
fn lift_to_raw(raw: &Multigraph, norm: &Normalized, elems: &[VertexMapping]) -> Option<Vec<VertexMapping>> {
    let mut out = Vec::with_capacity(elems.len());
    for m in elems {
        let mut vertex = vec![usize::MAX; raw.vertex_count()];
        for (v, &img) in m.vertex.iter().enumerate() {
            vertex[norm.original_vertex[v]] = norm.original_vertex[img];
        }
        for (x, w) in norm.removed_vertex_of_half.iter().enumerate() {
            if let Some(w) = w {
                vertex[*w] = norm.removed_vertex_of_half[m.half[x]]?;
            }
        }
        if vertex.contains(&usize::MAX) {
            return None;
        }
        out.push(VertexMapping {
            vertex,
            half: m.half.clone(),
        });
    }
    Some(out)
}

/// Builds and checks a certificate for raw `g`, `h` from a group on the
/// normalized `g` whose quotient is isomorphic to the normalized `h` via
/// `iso_norm`.
fn certify(
    g: &Multigraph,
    gn: &Normalized,
    h: &Multigraph,
    elems: &[VertexMapping],
    iso_norm: &VertexMapping,
) -> Option<Certificate> {
    let raw = lift_to_raw(g, gn, elems)?;
    let (q, proj) = quotient_unchecked(g, &raw);
    let mut vertex = vec![0; q.vertex_count()];
    for (v, slot) in vertex.iter_mut().enumerate() {
        if let Some(&x) = q.incident(v).first() {
            *slot = h.vertex_of(iso_norm.half[x])?;
        }
    }
    let mut iso = VertexMapping {
        vertex,
        half: iso_norm.half.clone(),
    };
    if !q.is_isomorphism(h, &iso) {
        let opts = IsoOptions {
            bound: usize::MAX,
            node_budget: 5_000_000,
        };
        iso = find_isomorphism(&q, h, None, opts).ok().flatten()?;
    }
    let projection = proj.half.iter().map(|&x| iso.half[x]).collect();
    let cert = Certificate {
        k: raw.len(),
        elements: raw,
        iso,
        projection,
    };
    certificate_check(g, h, &cert.elements, &cert.iso).ok()?;
    Some(cert)
}

pub(crate) struct Prepared {
    gn: Normalized,
    catalog: Catalog,
    series: crate::reduction::ReductionSeries,
    subgroups: Vec<Vec<VertexMapping>>,
}

pub(crate) fn prepare(g: &Multigraph, opts: &CoverOptions) -> Result<Option<Prepared>, CoverError> {
    let gn = g.normalize();
    if gn.graph.vertex_count() > opts.nonplanar_bound && !is_planar(&gn.graph) {
        return Err(CoverError::NonPlanar {
            vertices: gn.graph.vertex_count(),
            bound: opts.nonplanar_bound,
        });
    }
    let mut catalog = Catalog::for_graphs(&[&gn.graph]);
    let series = match reduction_series(&gn.graph, &mut catalog, SeriesMode::Cover) {
        Ok(s) => s,
        Err(ReductionError::NoCenter(_)) => return Ok(None),
        Err(ReductionError::Disconnected) => {
            return Err(CoverError::InvalidInput("G is disconnected".into()))
        }
    };
    let iso_opts = IsoOptions {
        bound: usize::MAX,
        node_budget: 50_000_000,
    };
    let gr = series.primitive();
    let auts = primitive_automorphisms(gr, iso_opts).map_err(|_| CoverError::Budget(iso_opts.node_budget))?;
    let subgroups = semiregular_subgroups(gr, &auts);
    Ok(Some(Prepared {
        gn,
        catalog,
        series,
        subgroups,
    }))
}

/// Decides whether `g` regularly covers `h`.
pub fn regular_cover(
    g: &Multigraph,
    h: &Multigraph,
    opts: &CoverOptions,
) -> Result<(CoverVerdict, CoverStats), CoverError> {
    check_input(g, "G")?;
    check_input(h, "H")?;
    let mut stats = CoverStats::default();
    let Some(k) = fold_number(g, h) else {
        return Ok((CoverVerdict::No, stats));
    };
    if k == 1 {
        return Ok(match isomorphism(g, h) {
            Some(iso) => (CoverVerdict::Yes(identity_certificate(g, iso)), stats),
            None => (CoverVerdict::No, stats),
        });
    }
    let Some(prep) = prepare(g, opts)? else {
        return Ok((CoverVerdict::No, stats));
    };
    let hn = h.normalize().graph;
    stats.levels = prep.series.steps.len();
    let candidates: Vec<&Vec<VertexMapping>> =
        prep.subgroups.iter().filter(|s| s.len() == k).collect();
    stats.candidate_groups = candidates.len();

    let try_group = |group: &Vec<VertexMapping>| -> Result<(Option<Certificate>, u64), CoverError> {
        search_group(g, h, &prep, &hn, group, opts, false)
    };

    let results: Vec<Result<(Option<Certificate>, u64), CoverError>> = if opts.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| CoverError::InvalidInput(e.to_string()))?;
        pool.install(|| candidates.par_iter().map(|gr| try_group(gr)).collect())
    } else {
        let mut out = Vec::new();
        for gr in &candidates {
            let res = try_group(gr);
            let stop = matches!(res, Ok((Some(_), _)));
            out.push(res);
            if stop {
                break;
            }
        }
        out
    };
    let mut budget_err = None;
    for res in results {
        match res {
            Ok((found, nodes)) => {
                stats.nodes += nodes;
                if let Some(cert) = found {
                    return Ok((CoverVerdict::Yes(cert), stats));
                }
            }
            Err(e) => budget_err = Some(e),
        }
    }
    match budget_err {
        Some(e) => Err(e),
        None => Ok((CoverVerdict::No, stats)),
    }
}

/// Runs the extension search below one group on `G_r`, returning a
/// certificate for `G -> H` if some extension has quotient `H`.
fn search_group(
    g: &Multigraph,
    h: &Multigraph,
    prep: &Prepared,
    hn: &Multigraph,
    group: &[VertexMapping],
    opts: &CoverOptions,
    forced: bool,
) -> Result<(Option<Certificate>, u64), CoverError> {
    let r = prep.series.steps.len();
    let mut search = Search::new(Pipeline::new(&prep.series, &prep.catalog), opts.budget, true);
    search.prune_reversed = forced;
    let mut found = None;
    let mut visit = |elems: &[VertexMapping], q: &Multigraph| -> bool {
        if let Some(iso) = isomorphism(q, hn) {
            found = certify(g, &prep.gn, h, elems, &iso);
        }
        found.is_some()
    };
    match search.run(r, group.to_vec(), &mut visit) {
        Ok(_) => Ok((found, search.nodes)),
        Err(_) => Err(CoverError::Budget(opts.budget)),
    }
}

pub(crate) fn certificate_for_group(
    g: &Multigraph,
    h: &Multigraph,
    prep: &Prepared,
    hn: &Multigraph,
    group: &[VertexMapping],
    opts: &CoverOptions,
) -> Result<Option<Certificate>, CoverError> {
    search_group(g, h, prep, hn, group, opts, false).map(|(c, _)| c)
}

/// One regular quotient of `G`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub k: usize,
    pub graph: Multigraph,
    pub elements: Vec<VertexMapping>,
}

/// Streams every regular quotient of `g`, deduplicated up to isomorphism
/// when `dedup` is set. `emit` returns `true` to stop early.
pub fn enumerate_quotients(
    g: &Multigraph,
    opts: &CoverOptions,
    dedup: bool,
    emit: &mut dyn FnMut(&Quotient) -> bool,
) -> Result<(), CoverError> {
    check_input(g, "G")?;
    let trivial = Quotient {
        k: 1,
        graph: g.clone(),
        elements: vec![VertexMapping::identity(g)],
    };
    if emit(&trivial) {
        return Ok(());
    }
    let Some(prep) = prepare(g, opts)? else {
        return Ok(());
    };
    let r = prep.series.steps.len();
    let mut emitted: Vec<Multigraph> = Vec::new();
    for group in prep.subgroups.iter().filter(|s| s.len() > 1) {
        let mut search = Search::new(Pipeline::new(&prep.series, &prep.catalog), opts.budget, dedup);
        let mut visit = |elems: &[VertexMapping], _q: &Multigraph| -> bool {
            let Some(raw) = lift_to_raw(g, &prep.gn, elems) else {
                return false;
            };
            let (q, _) = quotient_unchecked(g, &raw);
            if dedup && emitted.iter().any(|e| isomorphism(e, &q).is_some()) {
                return false;
            }
            if dedup {
                emitted.push(q.clone());
            }
            emit(&Quotient {
                k: raw.len(),
                graph: q,
                elements: raw,
            })
        };
        if search.run(r, group.clone(), &mut visit).map_err(|_| CoverError::Budget(opts.budget))? {
            return Ok(());
        }
    }
    Ok(())
}

/// Collects [`enumerate_quotients`] with deduplication.
pub fn quotient_list(g: &Multigraph, opts: &CoverOptions) -> Result<Vec<Quotient>, CoverError> {
    let mut out = Vec::new();
    enumerate_quotients(g, opts, true, &mut |q| {
        out.push(q.clone());
        false
    })?;
    Ok(out)
}

/// Which polynomial special case applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastPath {
    ThreeConnectedG,
    TwoConnectedH,
    OddFold,
}

/// Chooses a polynomial special case for the pair, if any.
pub fn fast_path_kind(g: &Multigraph, h: &Multigraph) -> Option<FastPath> {
    let k = fold_number(g, h)?;
    let gn = g.normalize().graph;
    let adj = crate::planar::simple_adjacency(&gn);
    if gn.vertex_count() == g.vertex_count()
        && (0..gn.half_count()).all(|x| gn.shape(x) == crate::multigraph::Shape::Normal)
        && crate::planar::is_three_connected(&adj)
    {
        return Some(FastPath::ThreeConnectedG);
    }
    if lists::is_two_connected(h) {
        return Some(FastPath::TwoConnectedH);
    }
    if k % 2 == 1 {
        return Some(FastPath::OddFold);
    }
    None
}

/// Decision through a polynomial special case. `Ok(None)` when none
/// applies.
pub fn fast_paths(
    g: &Multigraph,
    h: &Multigraph,
    opts: &CoverOptions,
) -> Result<Option<(CoverVerdict, CoverStats)>, CoverError> {
    check_input(g, "G")?;
    check_input(h, "H")?;
    let Some(kind) = fast_path_kind(g, h) else {
        return Ok(None);
    };
    let k = fold_number(g, h).unwrap();
    let mut stats = CoverStats::default();
    if k == 1 {
        return Ok(Some(match isomorphism(g, h) {
            Some(iso) => (CoverVerdict::Yes(identity_certificate(g, iso)), stats),
            None => (CoverVerdict::No, stats),
        }));
    }
    match kind {
        FastPath::ThreeConnectedG => {
            let auts = primitive_automorphisms(
                g,
                IsoOptions {
                    bound: usize::MAX,
                    node_budget: 50_000_000,
                },
            )
            .map_err(|_| CoverError::Budget(50_000_000))?;
            for group in semiregular_subgroups(g, &auts).into_iter().filter(|s| s.len() == k) {
                stats.candidate_groups += 1;
                let (q, proj) = quotient_unchecked(g, &group);
                if let Some(iso) = isomorphism(&q, h) {
                    let projection = proj.half.iter().map(|&x| iso.half[x]).collect();
                    let cert = Certificate {
                        k,
                        elements: group,
                        iso,
                        projection,
                    };
                    if certificate_check(g, h, &cert.elements, &cert.iso).is_ok() {
                        return Ok(Some((CoverVerdict::Yes(cert), stats)));
                    }
                }
            }
            Ok(Some((CoverVerdict::No, stats)))
        }
        FastPath::TwoConnectedH => {
            // No atom can be folded onto itself, so every level extends in
            // exactly one way and no star lists are needed.
            let Some(prep) = prepare(g, opts)? else {
                return Ok(Some((CoverVerdict::No, stats)));
            };
            let hn = h.normalize().graph;
            stats.levels = prep.series.steps.len();
            for group in prep.subgroups.iter().filter(|s| s.len() == k) {
                stats.candidate_groups += 1;
                let (found, nodes) = search_group(g, h, &prep, &hn, group, opts, true)?;
                stats.nodes += nodes;
                if let Some(cert) = found {
                    return Ok(Some((CoverVerdict::Yes(cert), stats)));
                }
            }
            Ok(Some((CoverVerdict::No, stats)))
        }
        FastPath::OddFold => {
            // Groups of odd order contain no involutions, so the extension
            // is forced at every level.
            let (v, s) = regular_cover(g, h, opts)?;
            Ok(Some((v, s)))
        }
    }
}
