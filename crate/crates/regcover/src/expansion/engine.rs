//! Extension of semiregular groups down a reduction series.
//!
//! A group on `G_{i+1}` is carried to `G_i` by mapping every atom onto the
//! atom its replacing edge is sent to, through catalog frames. Orbits whose
//! edge is reversed by some element need an involution of the atom; one is
//! picked per half-quotient class and the choices are searched depth first.

use crate::covering::quotient_unchecked;
use crate::multigraph::{Multigraph, VertexMapping};
use crate::reduction::{Catalog, ReductionSeries};

use super::iso::{forward_maps, isomorphism};

/// Atom orbits of a group acting on the next graph of a step.
pub(crate) struct Orbits {
    /// Orbit representative of each atom.
    pub rep: Vec<usize>,
    /// Index of an element sending the representative's edge onto this one.
    pub frame: Vec<usize>,
    /// Whether that element reverses the edge.
    pub flip: Vec<bool>,
    /// Representatives of orbits whose edge is reversed by some element.
    pub stabilized: Vec<usize>,
}

pub(crate) struct Pipeline<'a> {
    pub series: &'a ReductionSeries,
    pub catalog: &'a Catalog,
    fwd: Vec<(Vec<Option<usize>>, Vec<Option<usize>>)>,
}

fn identity_on(g: &Multigraph) -> VertexMapping {
    VertexMapping::identity(g)
}

impl<'a> Pipeline<'a> {
    pub fn new(series: &'a ReductionSeries, catalog: &'a Catalog) -> Pipeline<'a> {
        let fwd = series
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| forward_maps(&series.graphs[i], s))
            .collect();
        Pipeline {
            series,
            catalog,
            fwd,
        }
    }

    pub fn levels(&self) -> usize {
        self.series.steps.len()
    }

    pub fn orbits(&self, i: usize, elems: &[VertexMapping]) -> Orbits {
        let step = &self.series.steps[i];
        let na = step.atoms.len();
        let mut o = Orbits {
            rep: vec![usize::MAX; na],
            frame: vec![0; na],
            flip: vec![false; na],
            stabilized: Vec::new(),
        };
        for j in 0..na {
            if o.rep[j] != usize::MAX {
                continue;
            }
            let x = step.atoms[j].edge.0;
            for (ei, g) in elems.iter().enumerate() {
                let y = g.half[x];
                let l = step.atom_of_half[y].expect("replacing edges map to replacing edges");
                if o.rep[l] == usize::MAX {
                    o.rep[l] = j;
                    o.frame[l] = ei;
                    o.flip[l] = y != step.atoms[l].edge.0;
                } else if l == j && y != x && !o.stabilized.contains(&j) {
                    o.stabilized.push(j);
                }
            }
        }
        o
    }

    /// Candidate involutions for each reversed orbit, in `o.stabilized`
    /// order.
    pub fn choices(&self, i: usize, o: &Orbits) -> Vec<Vec<VertexMapping>> {
        let step = &self.series.steps[i];
        o.stabilized
            .iter()
            .map(|&j| {
                self.catalog
                    .entry(step.atoms[j].color)
                    .map(|e| e.half_involutions())
                    .unwrap_or_default()
            })
            .collect()
    }

    /// Carries `elems` from `G_{i+1}` to `G_i`. `taus[t]` is the involution
    /// for the orbit `o.stabilized[t]`.
    pub fn extend(
        &self,
        i: usize,
        elems: &[VertexMapping],
        o: &Orbits,
        taus: &[&VertexMapping],
    ) -> Vec<VertexMapping> {
        let gi = &self.series.graphs[i];
        let step = &self.series.steps[i];
        let (fv, fh) = &self.fwd[i];
        let mut out = Vec::with_capacity(elems.len());
        for g in elems {
            let mut vertex = vec![usize::MAX; gi.vertex_count()];
            let mut half = vec![usize::MAX; gi.half_count()];
            for v in 0..gi.vertex_count() {
                if let Some(x) = fv[v] {
                    vertex[v] = step.vertex_back[g.vertex[x]];
                }
            }
            for x in 0..gi.half_count() {
                if let Some(y) = fh[x] {
                    half[x] = step.half_back[g.half[y]].expect("kept half-edges stay kept");
                }
            }
            for (j, a) in step.atoms.iter().enumerate() {
                let y = g.half[a.edge.0];
                let l = step.atom_of_half[y].unwrap();
                let b = &step.atoms[l];
                let reversed = y != b.edge.0;
                let entry = self.catalog.entry(a.color).unwrap();
                let id = identity_on(&entry.rep.graph);
                let frame = |flip: bool| -> VertexMapping {
                    if flip {
                        entry.swap.clone().expect("reversed atoms have a swap")
                    } else {
                        id.clone()
                    }
                };
                let eps = o.flip[j] ^ reversed ^ o.flip[l];
                let mut m = frame(o.flip[j]).inverse();
                if eps {
                    let t = o
                        .stabilized
                        .iter()
                        .position(|&r| r == o.rep[j])
                        .expect("reversal implies a reversed orbit");
                    m = m.then(taus[t]);
                }
                m = m.then(&frame(o.flip[l]));
                for r in 0..m.vertex.len() {
                    let src = a.rep_to_host.vertex[r];
                    let dst = b.rep_to_host.vertex[m.vertex[r]];
                    debug_assert!(vertex[src] == usize::MAX || vertex[src] == dst);
                    vertex[src] = dst;
                }
                for q in 0..m.half.len() {
                    half[a.rep_to_host.half[q]] = b.rep_to_host.half[m.half[q]];
                }
            }
            debug_assert!(!vertex.contains(&usize::MAX) && !half.contains(&usize::MAX));
            out.push(VertexMapping { vertex, half });
        }
        out
    }
}

/// Depth-first search over extension choices.
pub(crate) struct Search<'a> {
    pub p: Pipeline<'a>,
    pub budget: u64,
    pub nodes: u64,
    pub dedup: bool,
    /// Drops every branch with a reversed orbit. Such orbits fold an atom
    /// onto itself and leave a cut vertex, loop or half-edge in the quotient.
    pub prune_reversed: bool,
    seen: Vec<Vec<Multigraph>>,
}

/// The node budget ran out.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OutOfBudget;

fn quick_key(q: &Multigraph) -> (usize, usize, Vec<usize>) {
    let mut degs: Vec<usize> = (0..q.vertex_count()).map(|v| q.degree(v)).collect();
    degs.sort_unstable();
    (q.vertex_count(), q.edge_reps().len(), degs)
}

impl<'a> Search<'a> {
    pub fn new(p: Pipeline<'a>, budget: u64, dedup: bool) -> Search<'a> {
        let levels = p.levels() + 1;
        Search {
            p,
            budget,
            nodes: 0,
            dedup,
            prune_reversed: false,
            seen: vec![Vec::new(); levels],
        }
    }

    fn fresh(&mut self, level: usize, q: &Multigraph) -> bool {
        if !self.dedup {
            return true;
        }
        let key = quick_key(q);
        for r in &self.seen[level] {
            if quick_key(r) == key && r.label_census() == q.label_census() && isomorphism(r, q).is_some() {
                return false;
            }
        }
        self.seen[level].push(q.clone());
        true
    }

    /// Explores all extensions of `elems` (a group on `G_level`). `visit`
    /// receives each group on `G_0` with its quotient and returns `true` to
    /// stop. Returns whether the search was stopped.
    pub fn run(
        &mut self,
        level: usize,
        elems: Vec<VertexMapping>,
        visit: &mut dyn FnMut(&[VertexMapping], &Multigraph) -> bool,
    ) -> Result<bool, OutOfBudget> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OutOfBudget);
        }
        let q = quotient_unchecked(&self.p.series.graphs[level], &elems).0;
        if !self.fresh(level, &q) {
            return Ok(false);
        }
        if level == 0 {
            return Ok(visit(&elems, &q));
        }
        let i = level - 1;
        let o = self.p.orbits(i, &elems);
        if self.prune_reversed && !o.stabilized.is_empty() {
            return Ok(false);
        }
        let options = self.p.choices(i, &o);
        if options.iter().any(|c| c.is_empty()) {
            return Ok(false);
        }
        let mut idx = vec![0usize; options.len()];
        loop {
            let taus: Vec<&VertexMapping> =
                idx.iter().enumerate().map(|(t, &c)| &options[t][c]).collect();
            let ext = self.p.extend(i, &elems, &o, &taus);
            if self.run(i, ext, visit)? {
                return Ok(true);
            }
            // Odometer over the choice vector.
            let mut t = 0;
            loop {
                if t == idx.len() {
                    return Ok(false);
                }
                idx[t] += 1;
                if idx[t] < options[t].len() {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
        }
    }
}
