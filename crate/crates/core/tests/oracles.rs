mod common;

use std::collections::BTreeSet;

use cascade_core::components::{boolean_realization, decompose, recompose};
use cascade_core::failure::{self, maximal_weaknesses};
use cascade_core::laws::enumerate_systems;
use cascade_core::models::realize_monotone;
use cascade_core::{ElemId, Lattice, Model, ModelSpec, System};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shock_sets(f: &System) -> Vec<Vec<ElemId>> {
    let mut v: Vec<Vec<ElemId>> = maximal_weaknesses(f)
        .unwrap()
        .minimal_shocks
        .iter()
        .map(fixed)
        .collect();
    v.sort();
    v
}

fn small_lattices() -> Vec<(&'static str, Lattice)> {
    vec![
        ("chain2", chain(2)),
        ("chain4", chain(4)),
        ("square", boolean(2)),
        ("cube", boolean(3)),
        ("diamond", diamond()),
        ("pentagon", pentagon()),
        ("chain3xchain2", chain(3).product(&chain(2)).unwrap().lattice().clone()),
    ]
}

#[test]
fn enumeration_matches_subset_filter() {
    for (name, l) in small_lattices() {
        let mut ours: Vec<Vec<ElemId>> = enumerate_systems(&l).unwrap().iter().map(fixed).collect();
        ours.sort();
        let mut brute = all_moore_families(&l);
        brute.sort();
        assert_eq!(ours, brute, "{name}");
    }
    assert_eq!(all_moore_families(&boolean(3)).len(), 61);
}

#[test]
fn weaknesses_match_brute_force_over_all_shocks() {
    for (name, l) in small_lattices() {
        let candidates = all_moore_families(&l);
        for f in enumerate_systems(&l).unwrap() {
            let expect = brute_minimal_shocks(&l, &fixed(&f), &candidates);
            assert_eq!(shock_sets(&f), expect, "{name}: {:?}", fixed(&f));
        }
    }
}

#[test]
fn weaknesses_match_brute_force_on_random_hypercube_systems() {
    let l = boolean(4);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for _ in 0..30 {
        let density = rng.gen_range(0.05..0.5);
        let f = random_system(&l, &mut rng, density);
        let ws = maximal_weaknesses(&f).unwrap();
        let mut ours: Vec<Vec<ElemId>> = ws
            .non_fixed
            .iter()
            .map(|t| t.iter().map(|i| l.elem(i).unwrap()).collect())
            .collect();
        ours.sort();
        assert_eq!(ours, brute_maximal_closed(&l, &fixed(&f)));
    }
}

#[test]
fn weaknesses_match_brute_force_on_a_grid() {
    let l = chain(3).product(&chain(3)).unwrap().lattice().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for _ in 0..20 {
        let f = random_system(&l, &mut rng, 0.3);
        let ws = maximal_weaknesses(&f).unwrap();
        let mut ours: Vec<Vec<ElemId>> = ws
            .non_fixed
            .iter()
            .map(|t| t.iter().map(|i| l.elem(i).unwrap()).collect())
            .collect();
        ours.sort();
        assert_eq!(ours, brute_maximal_closed(&l, &fixed(&f)));
    }
}

#[test]
fn combine_and_project_match_fixed_point_descriptions() {
    let l = boolean(4);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    for _ in 0..50 {
        let f = random_system(&l, &mut rng, 0.3);
        let g = random_system(&l, &mut rng, 0.3);
        let (pf, pg) = (fixed(&f), fixed(&g));
        let inter: Vec<ElemId> = pf.iter().filter(|x| pg.contains(x)).copied().collect();
        assert_eq!(fixed(&f.combine(&g).unwrap()), inter);
        let meets: BTreeSet<ElemId> = pf
            .iter()
            .flat_map(|&a| pg.iter().map(move |&b| (a, b)))
            .map(|(a, b)| l.meet(a, b).unwrap())
            .collect();
        assert_eq!(fixed(&f.project(&g).unwrap()), meets.into_iter().collect::<Vec<_>>());
    }
}

#[test]
fn apply_is_least_fixed_point_above() {
    let l = pentagon();
    for f in enumerate_systems(&l).unwrap() {
        let pf = fixed(&f);
        for a in l.elements() {
            let above: Vec<ElemId> = pf.iter().copied().filter(|&x| l.leq(a, x).unwrap()).collect();
            let least = above
                .iter()
                .copied()
                .find(|&x| above.iter().all(|&y| l.leq(x, y).unwrap()))
                .unwrap();
            assert_eq!(f.apply(a).unwrap(), least);
        }
    }
}

#[test]
fn map_constructor_round_trips() {
    let l = diamond();
    for f in enumerate_systems(&l).unwrap() {
        let table: Vec<ElemId> = l.elements().map(|a| f.apply(a).unwrap()).collect();
        assert_eq!(System::from_map(&l, &table).unwrap(), f);
    }
}

fn threshold_as_monotone(ground: &[String], neighbors: &[Vec<usize>], thresholds: &[u32]) -> ModelSpec {
    // node i fires on every k_i-subset of N_i
    let minimal_sets = neighbors
        .iter()
        .zip(thresholds)
        .map(|(ns, &k)| {
            let ns: Vec<usize> = ns.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
            (0u32..1 << ns.len())
                .filter(|m| m.count_ones() == k)
                .map(|m| (0..ns.len()).filter(|j| m >> j & 1 == 1).map(|j| ns[j]).collect())
                .collect()
        })
        .collect();
    ModelSpec::new(ground.to_vec(), Model::Monotone { minimal_sets })
}

fn group_as_monotone(ground: &[String], sets: &[Vec<usize>], thresholds: &[u32]) -> ModelSpec {
    let n = ground.len();
    let mut triggers: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for (c, &k) in sets.iter().zip(thresholds) {
        let cm: u32 = c.iter().fold(0, |m, &i| m | 1 << i);
        for sub in 0u32..1 << n {
            if sub & !cm == 0 && sub.count_ones() == k {
                for &i in c {
                    triggers[i].insert(sub);
                }
            }
        }
    }
    let minimal_sets = triggers
        .iter()
        .map(|t| {
            t.iter()
                .filter(|&&x| !t.iter().any(|&y| y != x && y & !x == 0))
                .map(|&x| (0..n).filter(|j| x >> j & 1 == 1).collect())
                .collect()
        })
        .collect();
    ModelSpec::new(ground.to_vec(), Model::Monotone { minimal_sets })
}

fn ground(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
}

#[test]
fn model_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0020);
    for _ in 0..60 {
        let n = rng.gen_range(1..=5);
        let g = ground(n);
        // digraph as threshold-1 model on in-neighbourhoods
        let arcs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.3))
            .collect();
        let mut into = vec![Vec::new(); n];
        for &(i, j) in &arcs {
            into[j].push(i);
        }
        let digraph = ModelSpec::new(g.clone(), Model::Digraph { arcs });
        let as_threshold = ModelSpec::new(
            g.clone(),
            Model::Threshold {
                neighbors: into,
                thresholds: vec![1; n],
            },
        );
        assert!(cascade_core::models::same_system(&digraph, &as_threshold).unwrap());

        let neighbors: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && rng.gen_bool(0.5)).collect())
            .collect();
        let thresholds: Vec<u32> = neighbors
            .iter()
            .map(|ns| rng.gen_range(0..=ns.len() as u32 + 1))
            .collect();
        let threshold = ModelSpec::new(
            g.clone(),
            Model::Threshold {
                neighbors: neighbors.clone(),
                thresholds: thresholds.clone(),
            },
        );
        let mono = threshold_as_monotone(&g, &neighbors, &thresholds);
        assert!(cascade_core::models::same_system(&threshold, &mono).unwrap());

        let sets: Vec<Vec<usize>> = (0..rng.gen_range(0..4))
            .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        let ks: Vec<u32> = sets.iter().map(|c| rng.gen_range(0..=c.len() as u32)).collect();
        let group = ModelSpec::new(
            g.clone(),
            Model::CollectiveThreshold {
                sets: sets.clone(),
                thresholds: ks.clone(),
            },
        );
        assert!(cascade_core::models::same_system(&group, &group_as_monotone(&g, &sets, &ks)).unwrap());

        // every system round-trips through its monotone realization
        let f = threshold.build().unwrap();
        let realized = realize_monotone(&f).unwrap();
        assert_eq!(realized.build_on(f.lattice()).unwrap(), f);
    }
}

#[test]
fn group_models_are_closed_under_combination() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0021);
    let g = ground(4);
    let l = Lattice::boolean(&g).unwrap();
    for _ in 0..40 {
        let make = |rng: &mut ChaCha8Rng| {
            let sets: Vec<Vec<usize>> = (0..rng.gen_range(1..4))
                .map(|_| (0..4).filter(|_| rng.gen_bool(0.5)).collect())
                .collect();
            let ks: Vec<u32> = sets.iter().map(|c| rng.gen_range(0..=c.len() as u32)).collect();
            (sets, ks)
        };
        let (s1, k1) = make(&mut rng);
        let (s2, k2) = make(&mut rng);
        let f = ModelSpec::new(g.clone(), Model::CollectiveThreshold { sets: s1.clone(), thresholds: k1.clone() });
        let h = ModelSpec::new(g.clone(), Model::CollectiveThreshold { sets: s2.clone(), thresholds: k2.clone() });
        let both = ModelSpec::new(
            g.clone(),
            Model::CollectiveThreshold {
                sets: [s1, s2].concat(),
                thresholds: [k1, k2].concat(),
            },
        );
        let sum = f.build_on(&l).unwrap().combine(&h.build_on(&l).unwrap()).unwrap();
        assert_eq!(sum, both.build_on(&l).unwrap());
    }
}

#[test]
fn group_models_are_not_closed_under_projection() {
    // Every group model on three nodes: each non-empty set is absent or
    // present with some threshold 0..=|C|.
    let g = ground(3);
    let l = Lattice::boolean(&g).unwrap();
    let subsets: Vec<Vec<usize>> = (1u32..8)
        .map(|m| (0..3).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    let options: Vec<usize> = subsets.iter().map(|c| c.len() + 2).collect();
    let total: usize = options.iter().product();
    let mut realizable: BTreeSet<Vec<ElemId>> = BTreeSet::new();
    for code in 0..total {
        let mut rest = code;
        let mut sets = Vec::new();
        let mut ks = Vec::new();
        for (c, &opts) in subsets.iter().zip(&options) {
            let choice = rest % opts;
            rest /= opts;
            if choice > 0 {
                sets.push(c.clone());
                ks.push(choice as u32 - 1);
            }
        }
        let spec = ModelSpec::new(g.clone(), Model::CollectiveThreshold { sets, thresholds: ks });
        realizable.insert(fixed(&spec.build_on(&l).unwrap()));
    }
    assert_eq!(total, 3usize.pow(3) * 4usize.pow(3) * 5);
    let f = ModelSpec::new(g.clone(), Model::CollectiveThreshold { sets: vec![vec![0, 1]], thresholds: vec![1] });
    let h = ModelSpec::new(g.clone(), Model::CollectiveThreshold { sets: vec![vec![1, 2]], thresholds: vec![1] });
    let (f, h) = (f.build_on(&l).unwrap(), h.build_on(&l).unwrap());
    let meet = f.project(&h).unwrap();
    assert!(!meet.is_fixed(l.parse("AbC").unwrap()).unwrap());
    assert!(!realizable.contains(&fixed(&meet)));
    assert!(realizable.contains(&fixed(&f.combine(&h).unwrap())));
}

#[test]
fn every_cube_system_decomposes() {
    let l = boolean(3);
    let r = boolean_realization(&l).unwrap();
    for f in enumerate_systems(&l).unwrap() {
        let parts = decompose(&f, &r).unwrap();
        assert_eq!(recompose(&l, &parts).unwrap(), f);
        for a in l.elements() {
            let join = parts
                .iter()
                .fold(l.bottom(), |acc, p| l.join(acc, p.apply(a).unwrap()).unwrap());
            assert_eq!(join, f.apply(a).unwrap());
        }
    }
}

#[test]
fn minimum_seed_matches_exhaustive_search() {
    let l = boolean(4);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0030);
    for _ in 0..40 {
        let f = random_system(&l, &mut rng, 0.3);
        let best = l
            .elements()
            .filter(|&a| f.apply(a).unwrap() == l.top())
            .map(|a| a.index().count_ones() as usize)
            .min()
            .unwrap();
        let (k, witness) = failure::min_seed(&f).unwrap();
        assert_eq!(k, best);
        assert_eq!(f.apply(witness).unwrap(), l.top());
        assert!(failure::fails(&f, &System::free(&l, witness).unwrap()).unwrap());
    }
}
