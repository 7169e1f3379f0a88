//! Seeded property checks shared by the core property tests and the
//! acceptance suite. Each check draws its systems from a `u64` seed.

use std::collections::BTreeSet;

use cascade_core::components::{boolean_realization, decompose, recompose};
use cascade_core::failure::{fails, is_prime, maximal_weaknesses, negate, unique_minimal_shock};
use cascade_core::metrics::{fragility, murank, Measure};
use cascade_core::{ElemId, Lattice, System};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fixed, random_system};

pub const CASES: u32 = 200;

pub type Check = fn(&Lattice, u64) -> Result<(), String>;

/// Runs `check` on `CASES` seeds drawn from a fixed generator.
pub fn run(lattice: &Lattice, check: Check, seed: u64) -> Result<(), String> {
    let config = Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new(config);
    runner
        .run(&any::<u64>(), |s| check(lattice, s).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw(l: &Lattice, rng: &mut ChaCha8Rng) -> System {
    let density = rng.gen_range(0.05..0.6);
    random_system(l, rng, density)
}

fn pair(l: &Lattice, seed: u64) -> (System, System) {
    let mut r = rng(seed);
    (draw(l, &mut r), draw(l, &mut r))
}

fn table(f: &System) -> Vec<ElemId> {
    f.lattice().elements().map(|a| f.apply(a).unwrap()).collect()
}

fn rank(f: &System) -> usize {
    f.lattice().size() - fixed(f).len()
}

pub fn fixed_point_identities(l: &Lattice, seed: u64) -> Result<(), String> {
    let (f, g) = pair(l, seed);
    let (pf, pg) = (fixed(&f), fixed(&g));
    let inter: Vec<ElemId> = pf.iter().copied().filter(|x| pg.contains(x)).collect();
    ensure(fixed(&f.combine(&g).unwrap()) == inter, || "Φ(f+g) ≠ Φf ∩ Φg".into())?;
    let meets: BTreeSet<ElemId> = pf
        .iter()
        .flat_map(|&a| pg.iter().map(move |&b| l.meet(a, b).unwrap()))
        .collect();
    let meets: Vec<ElemId> = meets.into_iter().collect();
    ensure(fixed(&f.project(&g).unwrap()) == meets, || "Φ(f·g) ≠ pairwise meets".into())
}

pub fn alternating_composition(l: &Lattice, seed: u64) -> Result<(), String> {
    let (f, g) = pair(l, seed);
    let (tf, tg) = (table(&f), table(&g));
    let sum = table(&f.combine(&g).unwrap());
    let n = l.size();
    let mut x: Vec<ElemId> = l.elements().collect();
    for _ in 0..n {
        for v in x.iter_mut() {
            *v = tf[tg[v.index() as usize].index() as usize];
        }
    }
    ensure(x == sum, || "(fg)^|P| ≠ f+g".into())?;

    // |P| rounds, each applying both maps at least once in a random order
    let mut r = rng(seed ^ 0x1eaf);
    let mut y: Vec<ElemId> = l.elements().collect();
    for _ in 0..n {
        let mut round = vec![0usize, 1];
        round.extend((0..r.gen_range(0..4)).map(|_| r.gen_range(0..2)));
        round.shuffle(&mut r);
        for k in round {
            let t = if k == 0 { &tf } else { &tg };
            for v in y.iter_mut() {
                *v = t[v.index() as usize];
            }
        }
    }
    ensure(y == sum, || "interleaving differs from f+g".into())
}

pub fn adjunction(l: &Lattice, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let f = draw(l, &mut r);
    let e = f.eval();
    for a in l.elements() {
        let left = System::free(l, a).unwrap().leq(&f).unwrap();
        ensure(left == l.leq(a, e).unwrap(), || {
            format!("free({}) ≤ f disagrees with a ≤ eval f", l.label(a).unwrap())
        })?;
    }
    Ok(())
}

pub fn eval_preserves_meets(l: &Lattice, seed: u64) -> Result<(), String> {
    let (f, g) = pair(l, seed);
    let expect = l.meet(f.eval(), g.eval()).unwrap();
    ensure(f.project(&g).unwrap().eval() == expect, || "eval(f·g) ≠ eval f ∧ eval g".into())?;
    let sum = f.combine(&g).unwrap().eval();
    ensure(l.leq(l.join(f.eval(), g.eval()).unwrap(), sum).unwrap(), || {
        "eval f ∨ eval g ≰ eval(f+g)".into()
    })
}

pub fn minimal_shocks_are_prime(l: &Lattice, seed: u64) -> Result<(), String> {
    let f = draw(l, &mut rng(seed));
    let ws = maximal_weaknesses(&f).unwrap();
    ensure(!ws.is_empty(), || "no minimal shock".into())?;
    for (s, w) in ws.minimal_shocks.iter().zip(&ws.weaknesses) {
        ensure(is_prime(s).unwrap(), || "minimal shock is not prime".into())?;
        ensure(fails(&f, s).unwrap(), || "minimal shock does not fail f".into())?;
        ensure(negate(s).unwrap() == *w, || "weakness is not the negated shock".into())?;
    }
    Ok(())
}

pub fn prime_iff_unique_shock(l: &Lattice, seed: u64) -> Result<(), String> {
    let f = draw(l, &mut rng(seed));
    let ws = maximal_weaknesses(&f).unwrap();
    let prime = is_prime(&f).unwrap();
    ensure(prime == (ws.len() == 1), || {
        format!("prime = {prime} but {} minimal shocks", ws.len())
    })?;
    let unique = unique_minimal_shock(&f).unwrap();
    ensure(unique.is_some() == prime, || "unique_minimal_shock disagrees".into())?;
    if let Some(s) = unique {
        ensure(s == negate(&f).unwrap() && s == ws.minimal_shocks[0], || {
            "unique shock is not ¬f".into()
        })?;
    }
    Ok(())
}

pub fn fragility_subadditive(l: &Lattice, seed: u64) -> Result<(), String> {
    let (f, g) = pair(l, seed);
    let mu = Measure::counting(l);
    let sum = fragility(&f.combine(&g).unwrap(), &mu).unwrap();
    let bound = fragility(&f, &mu).unwrap() + fragility(&g, &mu).unwrap();
    ensure(sum <= bound, || format!("fragility(f+g) = {sum} > {bound}"))
}

pub fn fragility_below_rank(l: &Lattice, seed: u64) -> Result<(), String> {
    let f = draw(l, &mut rng(seed));
    let mu = Measure::counting(l);
    let (fr, r) = (fragility(&f, &mu).unwrap(), murank(&f, &mu).unwrap());
    ensure(fr <= r, || "fragility exceeds rank".into())?;
    ensure((fr == r) == is_prime(&f).unwrap(), || "fragility = rank without primality".into())
}

pub fn rank_modular_pairs(l: &Lattice, seed: u64) -> Result<(), String> {
    let (f, g) = pair(l, seed);
    let mu = Measure::counting(l);
    let r = |s: &System| murank(s, &mu).unwrap();
    let (sum, meet) = (f.combine(&g).unwrap(), f.project(&g).unwrap());
    if f.leq(&g).unwrap() {
        ensure(r(&f) <= r(&g), || "rank is not monotone".into())?;
    }
    if f.is_modular_pair(&g).unwrap() {
        ensure(r(&sum) == r(&f) + r(&g) - r(&meet), || "rank not modular on a modular pair".into())?;
    }
    Ok(())
}

pub fn rank_inequality(l: &Lattice, seed: u64) -> Result<(), String> {
    let (f, g) = pair(l, seed);
    let (sum, meet) = (f.combine(&g).unwrap(), f.project(&g).unwrap());
    ensure(rank(&sum) + rank(&meet) <= rank(&f) + rank(&g), || {
        "ρ(f+g) + ρ(f·g) > ρ(f) + ρ(g)".into()
    })
}

pub fn failing_shock_above_minimal(l: &Lattice, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let f = draw(l, &mut r);
    let ws = maximal_weaknesses(&f).unwrap();
    for _ in 0..8 {
        let s = draw(l, &mut r);
        if fails(&f, &s).unwrap() {
            ensure(ws.minimal_shocks.iter().any(|m| m.leq(&s).unwrap()), || {
                "failing shock above no minimal shock".into()
            })?;
        }
    }
    Ok(())
}

pub fn weakness_combination_bound(l: &Lattice, seed: u64) -> Result<(), String> {
    let (f, g) = pair(l, seed);
    let wf = maximal_weaknesses(&f).unwrap().weaknesses;
    let wg = maximal_weaknesses(&g).unwrap().weaknesses;
    let sums: Vec<System> = wf
        .iter()
        .flat_map(|u| wg.iter().map(move |v| u.combine(v).unwrap()))
        .collect();
    for w in maximal_weaknesses(&f.combine(&g).unwrap()).unwrap().weaknesses {
        ensure(sums.iter().any(|uv| w.leq(uv).unwrap()), || "weakness of f+g above no u+v".into())?;
    }
    Ok(())
}

pub fn decomposition(l: &Lattice, seed: u64) -> Result<(), String> {
    let f = draw(l, &mut rng(seed));
    let r = boolean_realization(l).unwrap();
    let parts = decompose(&f, &r).unwrap();
    ensure(recompose(l, &parts).unwrap() == f, || "f ≠ Σ f·e_I".into())
}
