use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regcover::ivmatch::{
    brute_force, chain_next, check_subgraph, derive_instance, flow_feasibility, parse_instance,
    serialize_instance, solve, star_direct, star_via_instances, DipoleEdge, IvInstance, Parity,
    PendantItem, Size, SolveOptions, StarInput, BRUTE_FORCE_BOUND,
};
use std::collections::BTreeSet;

/// Random instance. Half of the time the level sizes are chosen so that
/// the forced edge counts are consistent, which makes solvable instances
/// common.
fn random_instance(rng: &mut ChaCha8Rng, max_vertices: usize) -> IvInstance {
    let mut inst = IvInstance {
        v_within_cluster: rng.gen_bool(0.3),
        ..Default::default()
    };
    let start_odd = rng.gen_bool(0.7);
    let nlev = rng.gen_range(1..=5);
    let sizes: Vec<usize> = if rng.gen_bool(0.5) {
        // Pick b and even b' per pair, then derive a and s.
        let pairs = (nlev + usize::from(!start_odd)).div_ceil(2);
        let mut out = Vec::new();
        let mut carry = 0;
        for t in 0..pairs {
            let b = rng.gen_range(0..=2);
            let bp = if t + 1 < pairs { 2 * rng.gen_range(0..=1) } else { 0 };
            out.push(b + carry);
            out.push(b + bp);
            carry = bp / 2;
        }
        if !start_odd {
            out.remove(0);
        }
        out.truncate(nlev);
        out
    } else {
        (0..nlev).map(|_| rng.gen_range(1..=4)).collect()
    };
    let total: usize = sizes.iter().sum();
    if total > max_vertices || total == 0 {
        return random_instance(rng, max_vertices);
    }
    for (l, &sz) in sizes.iter().enumerate() {
        let p = if (l % 2 == 0) == start_odd { Parity::Odd } else { Parity::Even };
        inst.add_level(p);
        let mut left = sz;
        while left > 0 {
            let s = rng.gen_range(1..=left);
            left -= s;
            inst.add_cluster(l, s);
        }
    }
    let n = inst.clusters.len();
    for a in 0..n {
        for b in 0..n {
            if inst.clusters[b].level == inst.clusters[a].level + 1 && rng.gen_bool(0.7) {
                inst.connect(a, b);
                if inst.validate().is_err() {
                    inst.adj.pop();
                }
            }
        }
    }
    inst
}

/// A star test with a planted solution, perturbed half of the time. At
/// each level all pendant elements accepting loops share one list, so each
/// loop color is accepted by a single pendant class.
fn random_star(rng: &mut ChaCha8Rng) -> StarInput {
    let base: Size = if rng.gen_bool(0.5) { (2, 1) } else { (2, 3) };
    let level_size = |m: usize| (0..m).fold(base, |s, _| chain_next(s));
    let mut star = StarInput::default();
    let ncolors = rng.gen_range(1..=3u32);
    // Targets (is_loop, color, level).
    let mut targets: Vec<(bool, u32, usize)> = Vec::new();
    let mut loop_colors: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); 4];
    for c in 0..ncolors {
        let m = rng.gen_range(0..2);
        let s = level_size(m);
        let halvable = rng.gen_bool(0.8);
        let count = rng.gen_range(1..=4);
        for _ in 0..count {
            star.dipole.push(DipoleEdge { color: c, size: (2 * s.0, 2 * s.1), halvable });
        }
        let loops = if halvable { rng.gen_range(0..=count / 2) } else { count / 2 };
        for _ in 0..loops {
            targets.push((true, c, m + 1));
        }
        for _ in 0..count - 2 * loops {
            targets.push((false, c, m));
        }
        loop_colors[m + 1].insert(c);
    }
    for _ in 0..rng.gen_range(0..=3) {
        let (c, m) = (10 + rng.gen_range(0..2), rng.gen_range(0..3));
        star.halves.push((c, level_size(m)));
        targets.push((false, c, m));
    }
    let all: Vec<u32> = (0..ncolors).chain(10..12).collect();
    let random_halves = |rng: &mut ChaCha8Rng, must: Option<u32>| -> BTreeSet<u32> {
        let mut h: BTreeSet<u32> = all.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        h.extend(must);
        h
    };
    let shared: Vec<BTreeSet<u32>> = (0..4).map(|_| random_halves(rng, None)).collect();
    for &(lp, c, m) in &targets {
        let size = level_size(m);
        let item = if lp || (shared[m].contains(&c) && rng.gen_bool(0.5)) {
            PendantItem { size, halves: shared[m].clone(), loops: loop_colors[m].clone() }
        } else {
            PendantItem { size, halves: random_halves(rng, Some(c)), loops: BTreeSet::new() }
        };
        star.pendant.push(item);
    }
    if rng.gen_bool(0.5) && !star.pendant.is_empty() {
        let i = rng.gen_range(0..star.pendant.len());
        match rng.gen_range(0..3) {
            0 => {
                star.pendant.remove(i);
            }
            1 => {
                let p = star.pendant[i].clone();
                star.pendant.push(p);
            }
            _ => {
                // Lists with loops stay shared, so only edit the others.
                let p = &mut star.pendant[i];
                if p.loops.is_empty() {
                    if let Some(&c) = p.halves.iter().next() {
                        p.halves.remove(&c);
                    }
                } else if let Some(&c) = p.loops.iter().next() {
                    // Every loop pendant loses the same color.
                    for q in star.pendant.iter_mut().filter(|q| q.loops.contains(&c)) {
                        q.loops.remove(&c);
                    }
                }
            }
        }
    }
    star
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn solve_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 14);
        let (sub, _) = solve(&inst, SolveOptions::default()).unwrap();
        let brute = brute_force(&inst, BRUTE_FORCE_BOUND).unwrap();
        prop_assert_eq!(sub.is_some(), brute.is_some(), "{}", serialize_instance(&inst));
        if let Some(s) = &brute {
            prop_assert!(check_subgraph(&inst, s).is_ok());
        }
        // Flow counts are necessary for a solution.
        if sub.is_some() {
            prop_assert!(flow_feasibility(&inst).is_some());
        }
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 14);
        let back = parse_instance(&serialize_instance(&inst)).unwrap();
        prop_assert_eq!(back.vertex_count(), inst.vertex_count());
        prop_assert_eq!(
            solve(&back, SolveOptions::default()).unwrap().0.is_some(),
            solve(&inst, SolveOptions::default()).unwrap().0.is_some()
        );
    }

    #[test]
    fn star_instances_match_direct_check(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let star = random_star(&mut rng);
        prop_assert!(derive_instance(&star).is_ok());
        let direct = star_direct(&star);
        let via = star_via_instances(&star, SolveOptions::default()).unwrap();
        prop_assert_eq!(direct, via, "{:?}", star);
    }
}

#[test]
fn chain_levels_grow_geometrically() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let star = random_star(&mut rng);
        for inst in derive_instance(&star).unwrap().unwrap_or_default() {
            // Pendant sizes double per level, so a chain over sizes that
            // stay below a bound has logarithmically many levels.
            assert!(inst.levels.len() <= 2 * 3 + 1);
        }
    }
}

#[test]
fn random_suites_hit_both_answers() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..500 {
        let star = random_star(&mut rng);
        if star_direct(&star) {
            yes += 1;
        } else {
            no += 1;
        }
    }
    let (mut iy, mut ino) = (0, 0);
    for _ in 0..500 {
        let inst = random_instance(&mut rng, 14);
        if solve(&inst, SolveOptions::default()).unwrap().0.is_some() {
            iy += 1;
        } else {
            ino += 1;
        }
    }
    eprintln!("stars yes {yes} no {no}; instances yes {iy} no {ino}");
    assert!(yes > 0 && no > 0 && iy > 0 && ino > 0);
}
