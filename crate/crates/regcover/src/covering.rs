//! Quotients by semiregular actions, covering projections and the
//! regularity test through voltage permutations.

use crate::multigraph::{EdgeType, Multigraph, Shape, VertexMapping};
use std::collections::{BTreeSet, HashSet, VecDeque};

/// Why a set of permutations is not a semiregular group of automorphisms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionError {
    #[error("element {0} is not an automorphism")]
    NotAutomorphism(usize),
    #[error("the identity is missing")]
    NoIdentity,
    #[error("elements {0} and {1} compose outside the set")]
    NotClosed(usize, usize),
    #[error("element {element} fixes vertex {vertex}")]
    FixesVertex { element: usize, vertex: usize },
    #[error("element {element} fixes half-edge {half}")]
    FixesHalf { element: usize, half: usize },
    #[error("element {element} reverses non-halvable edge at half-edge {half}")]
    ReversesEdge { element: usize, half: usize },
}

/// A group of automorphisms listed element by element; the identity comes
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiregularAction {
    pub elements: Vec<VertexMapping>,
}

impl SemiregularAction {
    /// Checks closure and semiregularity on `g`.
    pub fn new(g: &Multigraph, mut elements: Vec<VertexMapping>) -> Result<Self, ActionError> {
        sort_elements(g, &mut elements);
        check_action(g, &elements)?;
        Ok(SemiregularAction { elements })
    }

    pub fn trivial(g: &Multigraph) -> Self {
        SemiregularAction {
            elements: vec![VertexMapping::identity(g)],
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Puts the identity first and the rest in lexicographic order.
pub fn sort_elements(g: &Multigraph, elements: &mut [VertexMapping]) {
    let id = VertexMapping::identity(g);
    elements.sort_by(|a, b| {
        (a != &id, &a.half, &a.vertex).cmp(&(b != &id, &b.half, &b.vertex))
    });
}

fn is_identity(m: &VertexMapping) -> bool {
    m.vertex.iter().enumerate().all(|(i, &v)| i == v)
        && m.half.iter().enumerate().all(|(i, &h)| i == h)
}

/// Checks that `elements` is a group of automorphisms of `g` acting
/// semiregularly: no non-identity element fixes a vertex or half-edge, and
/// only halvable edges may be reversed.
pub fn check_action(g: &Multigraph, elements: &[VertexMapping]) -> Result<(), ActionError> {
    if !elements.iter().any(is_identity) {
        return Err(ActionError::NoIdentity);
    }
    for (i, m) in elements.iter().enumerate() {
        if !g.is_isomorphism(g, m) {
            return Err(ActionError::NotAutomorphism(i));
        }
    }
    let set: HashSet<&Vec<usize>> = elements.iter().map(|m| &m.half).collect();
    let vset: HashSet<(&Vec<usize>, &Vec<usize>)> =
        elements.iter().map(|m| (&m.half, &m.vertex)).collect();
    if set.len() != elements.len() && g.half_count() > 0 {
        return Err(ActionError::NotClosed(0, 0));
    }
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let c = b.then(a);
            if !vset.contains(&(&c.half, &c.vertex)) {
                return Err(ActionError::NotClosed(i, j));
            }
        }
    }
    for (i, m) in elements.iter().enumerate() {
        if is_identity(m) {
            continue;
        }
        if let Some(v) = (0..g.vertex_count()).find(|&v| m.vertex[v] == v) {
            return Err(ActionError::FixesVertex {
                element: i,
                vertex: v,
            });
        }
        for x in 0..g.half_count() {
            if m.half[x] == x {
                return Err(ActionError::FixesHalf { element: i, half: x });
            }
            if Some(m.half[x]) == g.partner(x) && g.half_edge(x).etype != EdgeType::Halvable {
                return Err(ActionError::ReversesEdge { element: i, half: x });
            }
        }
    }
    Ok(())
}

/// A half-edge map from a cover onto its base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringProjection {
    pub half: Vec<usize>,
    pub vertex: Vec<usize>,
}

/// Builds `g / action` and the natural projection. Quotient vertices and
/// half-edges are numbered by the smallest member of their orbit.
pub fn quotient(
    g: &Multigraph,
    action: &SemiregularAction,
) -> Result<(Multigraph, CoveringProjection), ActionError> {
    check_action(g, &action.elements)?;
    Ok(quotient_unchecked(g, &action.elements))
}

/// [`quotient`] without the semiregularity check.
pub fn quotient_unchecked(
    g: &Multigraph,
    elements: &[VertexMapping],
) -> (Multigraph, CoveringProjection) {
    let n = g.vertex_count();
    let mut vrep = vec![usize::MAX; n];
    let mut q = Multigraph::new();
    for v in 0..n {
        if vrep[v] == usize::MAX {
            let id = q.add_vertex(g.vertex_color(v));
            for m in elements {
                vrep[m.vertex[v]] = id;
            }
        }
    }
    let mut hrep = vec![usize::MAX; g.half_count()];
    for x in 0..g.half_count() {
        if hrep[x] == usize::MAX {
            let he = g.half_edge(x);
            let id = q.push_half(he.vertex.map(|v| vrep[v]), he.color, he.etype);
            for m in elements {
                hrep[m.half[x]] = id;
            }
        }
    }
    for x in 0..g.half_count() {
        if let Some(p) = g.partner(x) {
            let (a, b) = (hrep[x], hrep[p]);
            if a != b && q.partner(a).is_none() {
                q.pair(a, b);
            }
        }
    }
    (
        q,
        CoveringProjection {
            half: hrep,
            vertex: vrep,
        },
    )
}

/// Outcome of [`verify_covering`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverStatus {
    NotCovering { witness: String },
    /// A covering whose voltage group has more than `k` elements. The order
    /// is reported when it was computed within the cap.
    Covering { k: usize, theta_order: Option<usize> },
    Regular { k: usize },
}

const THETA_CAP: usize = 200_000;

/// Derives the vertex part of a half-edge map, checking consistency.
fn vertex_part(g: &Multigraph, h: &Multigraph, phalf: &[usize]) -> Result<Vec<usize>, String> {
    let mut pv = vec![usize::MAX; g.vertex_count()];
    for x in 0..g.half_count() {
        let y = phalf[x];
        match (g.vertex_of(x), h.vertex_of(y)) {
            (Some(v), Some(w)) => {
                if pv[v] != usize::MAX && pv[v] != w {
                    return Err(format!("vertex {v} has two images"));
                }
                pv[v] = w;
            }
            (None, None) => {}
            _ => return Err(format!("half-edge {x} changes attachment")),
        }
    }
    for (v, image) in pv.iter_mut().enumerate() {
        if *image == usize::MAX {
            if g.degree(v) == 0 && h.vertex_count() == 1 && h.degree(0) == 0 {
                *image = 0;
            } else {
                return Err(format!("vertex {v} has no image"));
            }
        }
    }
    Ok(pv)
}

/// Checks that `phalf` is a covering projection `g -> h` and decides
/// whether it is regular. Both graphs must be connected.
pub fn verify_covering(g: &Multigraph, h: &Multigraph, phalf: &[usize]) -> CoverStatus {
    let bad = |w: String| CoverStatus::NotCovering { witness: w };
    if phalf.len() != g.half_count() || phalf.iter().any(|&y| y >= h.half_count()) {
        return bad("half-edge map has the wrong size".into());
    }
    let pv = match vertex_part(g, h, phalf) {
        Ok(pv) => pv,
        Err(w) => return bad(w),
    };
    for x in 0..g.half_count() {
        let (a, b) = (g.half_edge(x), h.half_edge(phalf[x]));
        if a.color != b.color || a.etype != b.etype {
            return bad(format!("half-edge {x} changes color or type"));
        }
        let ok = match (a.partner, b.partner) {
            (Some(p), Some(q)) => phalf[p] == q,
            (Some(p), None) => phalf[p] == phalf[x],
            (None, None) => true,
            (None, Some(_)) => false,
        };
        if !ok {
            return bad(format!("half-edge {x} breaks the edge structure"));
        }
    }
    for v in 0..g.vertex_count() {
        if g.vertex_color(v) != h.vertex_color(pv[v]) {
            return bad(format!("vertex {v} changes color"));
        }
        let mut img: Vec<usize> = g.incident(v).iter().map(|&x| phalf[x]).collect();
        img.sort_unstable();
        if img != h.incident(pv[v]) {
            return bad(format!("not locally bijective at vertex {v}"));
        }
    }
    let nh = h.vertex_count();
    if nh == 0 || !g.vertex_count().is_multiple_of(nh) {
        return bad("vertex counts are not divisible".into());
    }
    let k = g.vertex_count() / nh;
    let mut fiber = vec![Vec::new(); nh];
    for (v, &w) in pv.iter().enumerate() {
        fiber[w].push(v);
    }
    if fiber.iter().any(|f| f.len() != k) {
        return bad("fibers differ in size".into());
    }

    // Lift a BFS tree of h from each vertex over the root.
    let mut label = vec![usize::MAX; g.vertex_count()];
    let mut order = vec![0usize];
    let mut tree_half = vec![false; h.half_count()];
    let mut seen = vec![false; nh];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &x in h.incident(u) {
            if let (Some(w), Some(p)) = (h.opposite_vertex(x), h.partner(x)) {
                if !seen[w] {
                    seen[w] = true;
                    tree_half[x] = true;
                    tree_half[p] = true;
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return bad("base graph is disconnected".into());
    }
    let lift_at = |v: usize, x: usize| -> usize {
        *g.incident(v).iter().find(|&&y| phalf[y] == x).unwrap()
    };
    for (i, &r) in fiber[0].iter().enumerate() {
        label[r] = i;
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            for &x in h.incident(pv[v]) {
                if !tree_half[x] {
                    continue;
                }
                let y = lift_at(v, x);
                let w = g.opposite_vertex(y).unwrap();
                if label[w] == usize::MAX {
                    label[w] = i;
                    stack.push(w);
                }
            }
        }
    }
    if label.contains(&usize::MAX) {
        return bad("cover is disconnected".into());
    }
    let mut copy_of = vec![vec![usize::MAX; k]; nh];
    for (v, &l) in label.iter().enumerate() {
        copy_of[pv[v]][l] = v;
    }
    let mut gens: Vec<Vec<usize>> = Vec::new();
    for u in 0..nh {
        for &x in h.incident(u) {
            if tree_half[x] || h.shape(x) == Shape::Pendant {
                continue;
            }
            let sigma: Vec<usize> = (0..k)
                .map(|i| {
                    let y = lift_at(copy_of[u][i], x);
                    match g.opposite_vertex(y) {
                        Some(w) => label[w],
                        None => i,
                    }
                })
                .collect();
            if sigma.iter().enumerate().any(|(i, &j)| i != j) {
                gens.push(sigma);
            }
        }
    }
    match permutation_group_order(&gens, k, THETA_CAP.max(k)) {
        Some(o) if o == k => CoverStatus::Regular { k },
        o => CoverStatus::Covering { k, theta_order: o },
    }
}

/// Order of the permutation group on `0..n` generated by `gens`, or `None`
/// if it exceeds `cap`.
pub fn permutation_group_order(gens: &[Vec<usize>], n: usize, cap: usize) -> Option<usize> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for s in gens {
            let q: Vec<usize> = p.iter().map(|&i| s[i]).collect();
            if seen.insert(q.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(q);
            }
        }
    }
    Some(seen.len())
}

/// Closure of a set of automorphisms under composition, or `None` if it
/// grows beyond `cap` elements.
pub fn generate_group(
    g: &Multigraph,
    gens: &[VertexMapping],
    cap: usize,
) -> Option<Vec<VertexMapping>> {
    let id = VertexMapping::identity(g);
    let mut seen: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();
    seen.insert((id.vertex.clone(), id.half.clone()));
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for s in gens {
            let q = p.then(s);
            if seen.insert((q.vertex.clone(), q.half.clone())) {
                if out.len() >= cap {
                    return None;
                }
                out.push(q.clone());
                queue.push_back(q);
            }
        }
    }
    sort_elements(g, &mut out);
    Some(out)
}

/// Why a certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("group: {0}")]
    Action(#[from] ActionError),
    #[error("the map is not an isomorphism from the quotient onto the target")]
    NotIsomorphism,
    #[error("projection: {0}")]
    Projection(String),
}

/// Verifies a certificate given as a group and an isomorphism from the
/// quotient (as built by [`quotient`]) onto `h`.
pub fn certificate_check(
    g: &Multigraph,
    h: &Multigraph,
    elements: &[VertexMapping],
    iso: &VertexMapping,
) -> Result<(), CertificateError> {
    check_action(g, elements)?;
    let (q, _) = quotient_unchecked(g, elements);
    if q.is_isomorphism(h, iso) {
        Ok(())
    } else {
        Err(CertificateError::NotIsomorphism)
    }
}

/// Verifies a certificate given as a group and a projection `g -> h` whose
/// fibres must be exactly the orbits of the group.
pub fn certificate_check_projection(
    g: &Multigraph,
    h: &Multigraph,
    elements: &[VertexMapping],
    phalf: &[usize],
) -> Result<(), CertificateError> {
    check_action(g, elements)?;
    if let CoverStatus::NotCovering { witness } = verify_covering(g, h, phalf) {
        return Err(CertificateError::Projection(witness));
    }
    let (_, proj) = quotient_unchecked(g, elements);
    let mut pairs: Vec<(usize, usize)> = proj.half.iter().copied().zip(phalf.iter().copied()).collect();
    pairs.sort_unstable();
    pairs.dedup();
    let orbits: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let images: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    if pairs.len() != orbits.len() || pairs.len() != images.len() {
        return Err(CertificateError::Projection(
            "fibres differ from the group orbits".into(),
        ));
    }
    Ok(())
}

/// Verifies a certificate read from text: every `g` line must be a
/// half-edge permutation of `g` and the `m` lines a projection onto `h`
/// whose fibres are the orbits of the group.
pub fn check_certificate_text(
    g: &Multigraph,
    h: &Multigraph,
    cert: &crate::multigraph::CertificateText,
) -> Result<Vec<VertexMapping>, CertificateError> {
    let mut elements = Vec::with_capacity(cert.elements.len());
    for (i, perm) in cert.elements.iter().enumerate() {
        let m = VertexMapping::from_half_permutation(g, perm.clone())
            .ok_or(CertificateError::Action(ActionError::NotAutomorphism(i)))?;
        elements.push(m);
    }
    let mut phalf = vec![usize::MAX; g.half_count()];
    for &(x, y) in &cert.projection {
        if x >= phalf.len() || phalf[x] != usize::MAX {
            return Err(CertificateError::Projection(format!("half-edge {} mapped twice or out of range", x + 1)));
        }
        phalf[x] = y;
    }
    if phalf.contains(&usize::MAX) {
        return Err(CertificateError::Projection("some half-edge has no image".into()));
    }
    certificate_check_projection(g, h, &elements, &phalf)?;
    Ok(elements)
}

/// Composes the quotient projection with an isomorphism to get `g -> h`.
pub fn projection_through(proj: &CoveringProjection, iso: &VertexMapping) -> Vec<usize> {
    proj.half.iter().map(|&x| iso.half[x]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::{automorphisms_bruteforce, backtrack_list_iso, parse_graph, IsoOptions};

    fn cube() -> Multigraph {
        let mut g = Multigraph::with_vertices(8);
        for v in 0..8usize {
            for b in 0..3 {
                let w = v ^ (1 << b);
                if v < w {
                    g.add_edge(v, w, 0, EdgeType::Halvable);
                }
            }
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

    fn element_with_vertices(g: &Multigraph, vmap: &[usize]) -> VertexMapping {
        automorphisms_bruteforce(g, IsoOptions::default())
            .unwrap()
            .into_iter()
            .find(|m| m.vertex == vmap)
            .unwrap()
    }

    #[test]
    fn cube_antipodal_quotient_is_k4() {
        let g = cube();
        let anti = element_with_vertices(&g, &(0..8).map(|v| v ^ 7).collect::<Vec<_>>());
        let action = SemiregularAction::new(&g, generate_group(&g, &[anti], 10).unwrap()).unwrap();
        let (q, proj) = quotient(&g, &action).unwrap();
        let iso = backtrack_list_iso(&q, &complete(4), None).unwrap().unwrap();
        assert!(certificate_check(&g, &complete(4), &action.elements, &iso).is_ok());
        let p = projection_through(&proj, &iso);
        assert_eq!(verify_covering(&g, &complete(4), &p), CoverStatus::Regular { k: 2 });
        assert!(certificate_check_projection(&g, &complete(4), &action.elements, &p).is_ok());
    }

    #[test]
    fn k4_involution_halves_two_edges() {
        let g = complete(4);
        let inv = element_with_vertices(&g, &[1, 0, 3, 2]);
        let els = generate_group(&g, &[inv], 10).unwrap();
        let (q, _) = quotient(&g, &SemiregularAction::new(&g, els).unwrap()).unwrap();
        let expect = parse_graph("v 1\nv 2\ne 1 2\ne 1 2\nh 1\nh 2").unwrap();
        assert!(backtrack_list_iso(&q, &expect, None).unwrap().is_some());
    }

    #[test]
    fn rejects_non_semiregular_and_non_closed() {
        let g = complete(4);
        let t = element_with_vertices(&g, &[1, 0, 2, 3]);
        let els = generate_group(&g, std::slice::from_ref(&t), 10).unwrap();
        assert!(matches!(check_action(&g, &els), Err(ActionError::FixesVertex { .. })));
        let c = cube();
        let r = element_with_vertices(&c, &(0..8).map(|v| v ^ 1).collect::<Vec<_>>());
        let s = element_with_vertices(&c, &(0..8).map(|v| v ^ 2).collect::<Vec<_>>());
        let bad = vec![VertexMapping::identity(&c), r, s];
        assert!(matches!(check_action(&c, &bad), Err(ActionError::NotClosed(..))));
    }

    #[test]
    fn undirected_edge_cannot_be_halved() {
        let g = parse_graph("v 1\nv 2\ne 1 2 tundirected").unwrap();
        let sw = element_with_vertices(&g, &[1, 0]);
        let els = vec![VertexMapping::identity(&g), sw];
        assert!(matches!(check_action(&g, &els), Err(ActionError::ReversesEdge { .. })));
    }

    #[test]
    fn identity_is_regular() {
        let g = cube();
        let p: Vec<usize> = (0..g.half_count()).collect();
        assert_eq!(verify_covering(&g, &g, &p), CoverStatus::Regular { k: 1 });
    }

    #[test]
    fn group_orders() {
        let gens = vec![vec![1, 2, 0], vec![1, 0, 2]];
        assert_eq!(permutation_group_order(&gens, 3, 100), Some(6));
        assert_eq!(permutation_group_order(&gens, 3, 4), None);
    }
}
