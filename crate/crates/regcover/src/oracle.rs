//! Brute-force reference implementations for small graphs.
//!
//! Everything here works from the full automorphism group listed element by
//! element and shares nothing with the reduction pipeline apart from the
//! multigraph type and the generic isomorphism search.

use crate::multigraph::{
    automorphisms_bruteforce, backtrack_list_iso, EdgeType, IsoError, IsoOptions, Multigraph,
    VertexMapping,
};
use std::collections::{BTreeSet, HashMap, VecDeque};

/// Default vertex bound for the oracle.
pub const ORACLE_BOUND: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("refused: oracle scale only ({0} vertices, bound {1})")]
    Refused(usize, usize),
    #[error("search budget exhausted")]
    Budget,
}

impl From<IsoError> for OracleError {
    fn from(e: IsoError) -> Self {
        match e {
            IsoError::Refused { vertices, bound } => OracleError::Refused(vertices, bound),
            IsoError::Budget(_) => OracleError::Budget,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub bound: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            bound: ORACLE_BOUND,
        }
    }
}

/// A regular covering witness: the group and an isomorphism from the
/// quotient onto `H`, plus the composed half-edge projection.
#[derive(Clone, Debug)]
pub struct OracleCertificate {
    pub k: usize,
    pub elements: Vec<VertexMapping>,
    pub iso: VertexMapping,
    pub projection: Vec<usize>,
}

fn is_identity(m: &VertexMapping) -> bool {
    m.vertex.iter().enumerate().all(|(i, &v)| i == v)
        && m.half.iter().enumerate().all(|(i, &h)| i == h)
}

/// Fixed-point free on vertices and half-edges, reversing only halvable
/// edges.
fn acts_freely(g: &Multigraph, m: &VertexMapping) -> bool {
    if m.vertex.iter().enumerate().any(|(i, &v)| i == v) {
        return false;
    }
    for x in 0..g.half_count() {
        if m.half[x] == x {
            return false;
        }
        if g.partner(x) == Some(m.half[x]) && g.half_edge(x).etype != EdgeType::Halvable {
            return false;
        }
    }
    true
}

impl Oracle {
    fn opts(&self) -> IsoOptions {
        IsoOptions {
            bound: self.bound,
            ..IsoOptions::default()
        }
    }

    fn guard(&self, g: &Multigraph) -> Result<(), OracleError> {
        if g.vertex_count() > self.bound {
            Err(OracleError::Refused(g.vertex_count(), self.bound))
        } else {
            Ok(())
        }
    }

    /// The full automorphism group, identity first.
    pub fn aut(&self, g: &Multigraph) -> Result<Vec<VertexMapping>, OracleError> {
        self.guard(g)?;
        let mut all = automorphisms_bruteforce(g, self.opts())?;
        all.sort_by(|a, b| (!is_identity(a), &a.half, &a.vertex).cmp(&(!is_identity(b), &b.half, &b.vertex)));
        Ok(all)
    }

    /// Every semiregular subgroup, each listed element by element with the
    /// identity first. The trivial group comes first; the rest are ordered by
    /// size and then by element indices.
    pub fn semiregular_subgroups(
        &self,
        g: &Multigraph,
    ) -> Result<Vec<Vec<VertexMapping>>, OracleError> {
        let aut = self.aut(g)?;
        let key = |m: &VertexMapping| (m.vertex.clone(), m.half.clone());
        let index: HashMap<(Vec<usize>, Vec<usize>), usize> =
            aut.iter().enumerate().map(|(i, m)| (key(m), i)).collect();
        let free: Vec<bool> = aut.iter().map(|m| is_identity(m) || acts_freely(g, m)).collect();
        let mul = |a: usize, b: usize| -> usize { index[&key(&aut[a].then(&aut[b]))] };

        let closure = |gens: &[usize]| -> Option<BTreeSet<usize>> {
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

        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue: VecDeque<(Vec<usize>, BTreeSet<usize>)> = VecDeque::new();
        found.insert(vec![0]);
        queue.push_back((Vec::new(), BTreeSet::from([0])));
        while let Some((gens, set)) = queue.pop_front() {
            for f in 1..aut.len() {
                if !free[f] || set.contains(&f) {
                    continue;
                }
                let mut ng = gens.clone();
                ng.push(f);
                if let Some(s) = closure(&ng) {
                    let list: Vec<usize> = s.iter().copied().collect();
                    if found.insert(list) {
                        queue.push_back((ng, s));
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = found.into_iter().collect();
        groups.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        Ok(groups
            .into_iter()
            .map(|s| s.into_iter().map(|i| aut[i].clone()).collect())
            .collect())
    }

    /// Decides whether `g` regularly covers `h` by trying every semiregular
    /// subgroup of the right order.
    pub fn regular_cover(
        &self,
        g: &Multigraph,
        h: &Multigraph,
    ) -> Result<Option<OracleCertificate>, OracleError> {
        self.guard(g)?;
        let (ng, nh) = (g.vertex_count(), h.vertex_count());
        if nh == 0 || ng % nh != 0 || g.half_count() != (ng / nh) * h.half_count() {
            return Ok(None);
        }
        let k = ng / nh;
        for group in self.semiregular_subgroups(g)? {
            if group.len() != k {
                continue;
            }
            let (q, proj) = crate::covering::quotient_unchecked(g, &group);
            if let Some(iso) = backtrack_list_iso(&q, h, None)? {
                let projection = proj.half.iter().map(|&x| iso.half[x]).collect();
                return Ok(Some(OracleCertificate {
                    k,
                    elements: group,
                    iso,
                    projection,
                }));
            }
        }
        Ok(None)
    }

    /// All quotients of `g`, one per isomorphism class, with the order of the
    /// group producing them.
    pub fn quotient_set(&self, g: &Multigraph) -> Result<Vec<(usize, Multigraph)>, OracleError> {
        let mut out: Vec<(usize, Multigraph)> = Vec::new();
        for group in self.semiregular_subgroups(g)? {
            let (q, _) = crate::covering::quotient_unchecked(g, &group);
            let mut dup = false;
            for (k, r) in &out {
                if *k == group.len() && backtrack_list_iso(&q, r, None)?.is_some() {
                    dup = true;
                    break;
                }
            }
            if !dup {
                out.push((group.len(), q));
            }
        }
        Ok(out)
    }
}

/// Every simple graph on `n` vertices up to isomorphism, grown one edge at
/// a time and deduplicated by isomorphism. Exponential; `n <= 7` is quick.
pub fn simple_graphs(n: usize) -> Vec<Multigraph> {
    fn invariant(g: &Multigraph) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = (0..g.vertex_count())
            .map(|v| {
                let mut nd: Vec<usize> = g.neighbors(v).iter().map(|&w| g.degree(w)).collect();
                nd.sort_unstable();
                (g.degree(v), nd)
            })
            .collect();
        out.sort();
        out
    }
    let opts = IsoOptions {
        bound: n.max(1),
        node_budget: 1_000_000,
    };
    let mut layer = vec![Multigraph::with_vertices(n)];
    let mut all = layer.clone();
    while !layer.is_empty() {
        let mut buckets: HashMap<Vec<(usize, Vec<usize>)>, Vec<Multigraph>> = HashMap::new();
        let mut next = Vec::new();
        for g in &layer {
            for u in 0..n {
                for v in u + 1..n {
                    if !g.half_edges_between(u, v).is_empty() {
                        continue;
                    }
                    let mut h = g.clone();
                    h.add_edge(u, v, 0, EdgeType::Halvable);
                    let bucket = buckets.entry(invariant(&h)).or_default();
                    let seen = bucket
                        .iter()
                        .any(|r| backtrack_list_iso_with(r, &h, opts));
                    if !seen {
                        bucket.push(h.clone());
                        next.push(h);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn backtrack_list_iso_with(a: &Multigraph, b: &Multigraph, opts: IsoOptions) -> bool {
    crate::multigraph::find_isomorphism(a, b, None, opts)
        .ok()
        .flatten()
        .is_some()
}

/// Connected planar simple graphs on `n` vertices up to isomorphism.
pub fn connected_planar_graphs(n: usize) -> Vec<Multigraph> {
    simple_graphs(n)
        .into_iter()
        .filter(|g| g.is_connected() && crate::planar::is_planar(g))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{certificate_check, verify_covering, CoverStatus};
    use crate::multigraph::parse_graph;

    fn cycle(n: usize) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n, 0, EdgeType::Halvable);
        }
        g
    }

    fn cube() -> Multigraph {
        let mut g = Multigraph::with_vertices(8);
        for v in 0..8usize {
            for b in 0..3 {
                if v < v ^ (1 << b) {
                    g.add_edge(v, v ^ (1 << b), 0, EdgeType::Halvable);
                }
            }
        }
        g
    }

    fn k4() -> Multigraph {
        parse_graph("v 1\nv 2\nv 3\nv 4\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4").unwrap()
    }

    #[test]
    fn automorphism_group_orders() {
        let o = Oracle::default();
        assert_eq!(o.aut(&k4()).unwrap().len(), 24);
        assert_eq!(o.aut(&cube()).unwrap().len(), 48);
        assert_eq!(o.aut(&cycle(5)).unwrap().len(), 10);
    }

    #[test]
    fn semiregular_subgroups_small() {
        let o = Oracle::default();
        let k2 = parse_graph("v 1\nv 2\ne 1 2").unwrap();
        assert_eq!(o.semiregular_subgroups(&k2).unwrap().len(), 2);
        let p3 = parse_graph("v 1\nv 2\nv 3\ne 1 2\ne 2 3").unwrap();
        assert_eq!(o.semiregular_subgroups(&p3).unwrap().len(), 1);
        // Subgroups of D4 acting freely on C4 vertices and half-edges: the
        // trivial group, the two rotation subgroups, and the two reflections
        // through edge midpoints together with the Klein group they generate.
        let groups = o.semiregular_subgroups(&cycle(4)).unwrap();
        let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2, 4, 4]);
    }

    #[test]
    fn quotient_sets() {
        let o = Oracle::default();
        let k1 = parse_graph("v 1").unwrap();
        assert_eq!(o.quotient_set(&k1).unwrap().len(), 1);
        let k2 = parse_graph("v 1\nv 2\ne 1 2").unwrap();
        let qs = o.quotient_set(&k2).unwrap();
        assert_eq!(qs.len(), 2);
        let half = parse_graph("v 1\nh 1").unwrap();
        assert!(qs.iter().any(|(_, q)| backtrack_list_iso(q, &half, None).unwrap().is_some()));
    }

    #[test]
    fn regular_cover_decisions() {
        let o = Oracle::default();
        let cert = o.regular_cover(&cube(), &k4()).unwrap().unwrap();
        assert_eq!(cert.k, 2);
        assert!(certificate_check(&cube(), &k4(), &cert.elements, &cert.iso).is_ok());
        assert_eq!(
            verify_covering(&cube(), &k4(), &cert.projection),
            CoverStatus::Regular { k: 2 }
        );
        assert!(o.regular_cover(&cycle(6), &cycle(3)).unwrap().is_some());
        let k3 = cycle(3);
        assert!(o.regular_cover(&k4(), &k3).unwrap().is_none());
    }

    #[test]
    fn small_graph_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| connected_planar_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 20, 99]);
        assert_eq!(simple_graphs(4).len(), 11);
    }

    #[test]
    fn refuses_large_graphs() {
        let o = Oracle { bound: 4 };
        assert!(matches!(o.aut(&cube()), Err(OracleError::Refused(8, 4))));
    }
}
