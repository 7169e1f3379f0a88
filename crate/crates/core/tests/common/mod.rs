#![allow(dead_code)]

pub mod props;

use cascade_core::{ElemId, Lattice, System};
use rand::Rng;

pub fn boolean(n: usize) -> Lattice {
    let labels: Vec<String> = (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
    Lattice::boolean(&labels).unwrap()
}

pub fn chain(n: usize) -> Lattice {
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let covers: Vec<(String, String)> = (1..n).map(|i| ((i - 1).to_string(), i.to_string())).collect();
    Lattice::from_covers(&labels, &covers).unwrap()
}

/// The five-element lattice with three incomparable atoms.
pub fn diamond() -> Lattice {
    Lattice::from_covers(
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
    )
    .unwrap()
}

/// The five-element non-modular lattice.
pub fn pentagon() -> Lattice {
    Lattice::from_covers(
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
    )
    .unwrap()
}

pub fn ids(l: &Lattice) -> Vec<ElemId> {
    l.elements().collect()
}

/// Smallest meet-closed superset of `seed` containing the top, by repeated
/// pairwise meets.
pub fn close(l: &Lattice, seed: &[ElemId]) -> Vec<ElemId> {
    let mut set: Vec<ElemId> = seed.to_vec();
    set.push(l.top());
    set.sort();
    set.dedup();
    loop {
        let mut grown = set.clone();
        for &a in &set {
            for &b in &set {
                let m = l.meet(a, b).unwrap();
                if !grown.contains(&m) {
                    grown.push(m);
                }
            }
        }
        grown.sort();
        if grown.len() == set.len() {
            return set;
        }
        set = grown;
    }
}

pub fn random_system(l: &Lattice, rng: &mut impl Rng, density: f64) -> System {
    let seed: Vec<ElemId> = l.elements().filter(|_| rng.gen_bool(density)).collect();
    System::from_fixed_points(l, close(l, &seed)).unwrap()
}

pub fn fixed(s: &System) -> Vec<ElemId> {
    s.fixed_points().unwrap()
}

pub fn is_meet_closed(l: &Lattice, set: &[ElemId]) -> bool {
    set.iter()
        .all(|&a| set.iter().all(|&b| set.contains(&l.meet(a, b).unwrap())))
}

/// All Moore families by filtering every subset of `P − {top}`.
pub fn all_moore_families(l: &Lattice) -> Vec<Vec<ElemId>> {
    let rest: Vec<ElemId> = l.elements().filter(|&e| e != l.top()).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << rest.len() {
        let mut set: Vec<ElemId> = (0..rest.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| rest[i])
            .collect();
        set.push(l.top());
        if is_meet_closed(l, &set) {
            set.sort();
            out.push(set);
        }
    }
    out
}

/// Minimal failing shocks of `f` among the given candidate fixed-point sets:
/// those meeting `Φf` only at the top, minimal in the system order (maximal
/// fixed-point set) by pairwise comparison.
pub fn brute_minimal_shocks(l: &Lattice, f: &[ElemId], candidates: &[Vec<ElemId>]) -> Vec<Vec<ElemId>> {
    let failing: Vec<&Vec<ElemId>> = candidates
        .iter()
        .filter(|s| s.iter().all(|x| *x == l.top() || !f.contains(x)))
        .collect();
    let mut out: Vec<Vec<ElemId>> = failing
        .iter()
        .filter(|s| {
            !failing
                .iter()
                .any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x)))
        })
        .map(|s| (*s).clone())
        .collect();
    out.sort();
    out
}

/// All inclusion-maximal meet-closed subsets of `P − Φf`, by filtering every
/// subset of the non-fixed points.
pub fn brute_maximal_closed(l: &Lattice, f: &[ElemId]) -> Vec<Vec<ElemId>> {
    let non_fixed: Vec<ElemId> = l.elements().filter(|e| !f.contains(e)).collect();
    assert!(non_fixed.len() <= 20);
    let closed: Vec<u64> = (0u64..1 << non_fixed.len())
        .filter(|&mask| {
            let set: Vec<ElemId> = (0..non_fixed.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| non_fixed[i])
                .collect();
            is_meet_closed(l, &set)
        })
        .collect();
    let mut out: Vec<Vec<ElemId>> = closed
        .iter()
        .filter(|&&m| !closed.iter().any(|&o| o != m && o & m == m))
        .map(|&m| {
            let mut v: Vec<ElemId> = (0..non_fixed.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| non_fixed[i])
                .collect();
            v.sort();
            v
        })
        .collect();
    out.sort();
    out
}
