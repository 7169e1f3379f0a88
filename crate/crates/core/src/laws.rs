//! Exhaustive checks of the structure of the lattice of all systems on a
//! small state lattice.
//!
//! Systems are enumerated as Moore families, then the lattice they form under
//! `+` and `·` is tested for semimodularity, gradedness, co-atomisticity and
//! the other structural facts listed on [`LawReport`]. Statements that hold on
//! every lattice are reported as errors when they fail; the rest are verdicts.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::failure::is_prime;
use crate::lattice::Lattice;
use crate::system::System;

/// Default limit on `|P|` for enumerating all systems.
pub const DEFAULT_LAW_CAP: usize = 10;

/// Every system on `lattice`, ordered by rank and then by fixed-point set.
pub fn enumerate_systems(lattice: &Lattice) -> Result<Vec<System>> {
    enumerate_systems_with_cap(lattice, DEFAULT_LAW_CAP)
}

pub fn enumerate_systems_with_cap(lattice: &Lattice, cap: usize) -> Result<Vec<System>> {
    let n = lattice.size();
    if n > cap.min(64) {
        return Err(Error::capability(
            format!("enumerating all systems on a lattice of {n} elements"),
            cap.min(64),
        ));
    }
    let top = lattice.top_index();
    // Decide elements from the top down, so meets of chosen elements are
    // always still undecided and can be recorded as requirements.
    let order: Vec<u32> = lattice
        .ascending()
        .into_iter()
        .rev()
        .filter(|&x| x != top)
        .collect();
    let mut found = Vec::new();
    collect_families(lattice, &order, 0, 1 << top, 0, &mut found);
    let mut systems: Vec<(usize, BitSet)> = found
        .into_iter()
        .map(|mask| {
            let set = BitSet::from_indices(n, (0..n as u32).filter(|i| mask >> i & 1 == 1));
            (n - set.len(), set)
        })
        .collect();
    systems.sort();
    Ok(systems
        .into_iter()
        .map(|(_, set)| System::from_set_unchecked(lattice, set))
        .collect())
}

fn collect_families(
    l: &Lattice,
    order: &[u32],
    pos: usize,
    chosen: u64,
    required: u64,
    out: &mut Vec<u64>,
) {
    let Some(&x) = order.get(pos) else {
        out.push(chosen);
        return;
    };
    let bit = 1u64 << x;
    // include x
    let mut req = required;
    for y in bits(chosen) {
        req |= 1 << l.meet_of(x, y);
    }
    collect_families(l, order, pos + 1, chosen | bit, req & !(chosen | bit), out);
    // exclude x
    if required & bit == 0 {
        collect_families(l, order, pos + 1, chosen, required, out);
    }
}

fn bits(mask: u64) -> impl Iterator<Item = u32> {
    (0..64u32).filter(move |i| mask >> i & 1 == 1)
}

/// Verdicts on the lattice of systems over one state lattice.
#[derive(Clone, Debug)]
pub struct LawReport {
    pub system_count: usize,
    /// Join covers both elements whenever both cover their meet.
    pub semimodular: bool,
    pub state_lattice_is_chain: bool,
    pub distributive: bool,
    pub modular: bool,
    /// Every cover raises the number of non-fixed points by exactly one.
    pub graded: bool,
    /// Every system is the `·` of the coatoms above it.
    pub coatomistic: bool,
    /// Every system is the `+` of the join-irreducibles below it.
    pub join_generated: bool,
    /// Join-irreducibles are exactly the systems built from cover pairs.
    pub join_irreducibles_from_covers: bool,
    pub join_irreducible_count: usize,
    /// `+` and `·` agree with their fixed-point descriptions, and `+` agrees
    /// with iterated alternating composition.
    pub fixed_point_isomorphism: bool,
    /// `ρ(f+g) + ρ(f·g) ≤ ρ(f) + ρ(g)` for all pairs.
    pub rank_inequality: bool,
    pub non_prime: Vec<System>,
    /// Unordered pairs whose projection has more fixed points than the union.
    pub non_modular_pairs: Vec<(System, System)>,
    /// A triple violating distributivity, if any.
    pub distributivity_witness: Option<[System; 3]>,
    /// A triple `f ≤ h` with `f + (g·h) ≠ (f + g)·h`, if any.
    pub modularity_witness: Option<[System; 3]>,
}

fn violation(law: &'static str, witness: String) -> Error {
    Error::LawViolation { law, witness }
}

struct Family<'a> {
    l: &'a Lattice,
    systems: Vec<System>,
    masks: Vec<u64>,
    index: BTreeMap<u64, usize>,
    join: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
    /// `leq[i][j]`: system `i` ≤ system `j`, i.e. `Φi ⊇ Φj`.
    leq: Vec<Vec<bool>>,
}

impl<'a> Family<'a> {
    fn new(l: &'a Lattice, systems: Vec<System>) -> Result<Self> {
        let masks: Vec<u64> = systems
            .iter()
            .map(|s| s.fixed_set().map(|set| set.iter().fold(0u64, |m, i| m | 1 << i)))
            .collect::<Result<_>>()?;
        let index: BTreeMap<u64, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let k = systems.len();
        let mut fam = Family {
            l,
            systems,
            masks,
            index,
            join: vec![vec![0; k]; k],
            meet: vec![vec![0; k]; k],
            leq: vec![vec![false; k]; k],
        };
        for i in 0..k {
            for j in 0..k {
                let (a, b) = (fam.masks[i], fam.masks[j]);
                fam.leq[i][j] = b & !a == 0;
                fam.join[i][j] = fam.lookup(a & b, "Φ(f+g) = Φf ∩ Φg is a system", i, j)?;
                let mut meets = 0u64;
                for x in bits(a) {
                    for y in bits(b) {
                        meets |= 1 << l.meet_of(x, y);
                    }
                }
                fam.meet[i][j] = fam.lookup(meets, "Φ(f·g) = Φf ∧ Φg is a system", i, j)?;
            }
        }
        Ok(fam)
    }

    fn lookup(&self, mask: u64, law: &'static str, i: usize, j: usize) -> Result<usize> {
        self.index
            .get(&mask)
            .copied()
            .ok_or_else(|| violation(law, format!("{} and {}", self.show(i), self.show(j))))
    }

    fn show(&self, i: usize) -> String {
        let names: Vec<String> = bits(self.masks[i]).map(|x| self.l.label_of(x)).collect();
        format!("{{{}}}", names.join(","))
    }

    fn rho(&self, i: usize) -> usize {
        self.l.size() - self.masks[i].count_ones() as usize
    }

    fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    /// `covers[j]` lists the `i` with `i ≺ j`.
    fn lower_covers(&self) -> Vec<Vec<usize>> {
        let k = self.systems.len();
        (0..k)
            .map(|j| {
                (0..k)
                    .filter(|&i| self.lt(i, j) && !(0..k).any(|h| self.lt(i, h) && self.lt(h, j)))
                    .collect()
            })
            .collect()
    }
}

/// Enumerates all systems on `lattice` and checks the structure they form.
pub fn check_laws(lattice: &Lattice) -> Result<LawReport> {
    check_laws_with_cap(lattice, DEFAULT_LAW_CAP)
}

pub fn check_laws_with_cap(lattice: &Lattice, cap: usize) -> Result<LawReport> {
    let systems = enumerate_systems_with_cap(lattice, cap)?;
    let fam = Family::new(lattice, systems)?;
    let k = fam.systems.len();
    let covers = fam.lower_covers();
    let covered = |i: usize, j: usize| covers[j].contains(&i);

    let fixed_point_isomorphism = check_isomorphism(&fam)?;

    let mut semimodular = true;
    for a in 0..k {
        for b in 0..k {
            let m = fam.meet[a][b];
            if a != b && covered(m, a) && covered(m, b) {
                let j = fam.join[a][b];
                if !(covered(a, j) && covered(b, j)) {
                    semimodular = false;
                }
            }
        }
    }
    if !semimodular {
        return Err(violation("lattice of systems is semimodular", String::from("cover condition fails")));
    }

    for (j, lower) in covers.iter().enumerate() {
        for &i in lower {
            if fam.rho(j) != fam.rho(i) + 1 {
                return Err(violation(
                    "lattice of systems is graded by the number of non-fixed points",
                    format!("{} ≺ {}", fam.show(i), fam.show(j)),
                ));
            }
        }
    }

    let mut rank_inequality = true;
    for a in 0..k {
        for b in 0..k {
            if fam.rho(fam.join[a][b]) + fam.rho(fam.meet[a][b]) > fam.rho(a) + fam.rho(b) {
                rank_inequality = false;
            }
        }
    }
    if !rank_inequality {
        return Err(violation("semimodular rank inequality", String::from("some pair violates it")));
    }

    // Extremes: the identity has every point fixed, 1 only the top.
    let all = (1u64 << lattice.size()) - 1;
    let bottom = fam.index[&all];
    let top = fam.index[&(1u64 << lattice.top_index())];

    let coatoms: Vec<usize> = covers[top].clone();
    let mut coatomistic = true;
    for f in 0..k {
        let meet = coatoms
            .iter()
            .filter(|&&c| fam.leq[f][c])
            .fold(top, |acc, &c| fam.meet[acc][c]);
        if meet != f {
            coatomistic = false;
        }
        let via_api = fam.systems[f]
            .meet_of_coatoms()?
            .iter()
            .try_fold(System::top(lattice), |acc, c| acc.project(c))?;
        if via_api != fam.systems[f] {
            return Err(violation("every system is the meet of its coatoms", fam.show(f)));
        }
    }
    if !coatomistic {
        return Err(violation("lattice of systems is co-atomistic", String::from("some system is not a meet of coatoms")));
    }
    let coatom_masks: BTreeMap<u64, ()> = coatoms.iter().map(|&c| (fam.masks[c], ())).collect();
    for a in lattice.elements().filter(|&a| a != lattice.top()) {
        let c = System::coatom(lattice, a)?;
        let mask = c.fixed_set()?.iter().fold(0u64, |m, i| m | 1 << i);
        if !coatom_masks.contains_key(&mask) {
            return Err(violation("coatoms have two fixed points", lattice.label(a)?));
        }
    }

    let irreducibles: Vec<usize> = (0..k)
        .filter(|&j| j != bottom && covers[j].len() == 1)
        .collect();
    let mut from_covers = BTreeMap::new();
    for (s, t) in lattice.cover_pairs() {
        let f = System::join_irreducible(lattice, s, t)?;
        if !is_prime(&f)? {
            return Err(violation(
                "systems built from cover pairs are prime",
                format!("({}, {})", lattice.label(s)?, lattice.label(t)?),
            ));
        }
        let mask = f.fixed_set()?.iter().fold(0u64, |m, i| m | 1 << i);
        from_covers.insert(mask, ());
    }
    let irr_masks: BTreeMap<u64, ()> = irreducibles.iter().map(|&i| (fam.masks[i], ())).collect();
    let join_irreducibles_from_covers = irr_masks == from_covers;
    if !join_irreducibles_from_covers {
        return Err(violation(
            "join-irreducibles are the cover-pair systems",
            format!("{} irreducibles, {} cover pairs", irr_masks.len(), from_covers.len()),
        ));
    }
    for f in 0..k {
        let join = irreducibles
            .iter()
            .filter(|&&j| fam.leq[j][f])
            .fold(bottom, |acc, &j| fam.join[acc][j]);
        if join != f {
            return Err(violation("every system is the join of join-irreducibles below it", fam.show(f)));
        }
    }

    let mut non_prime = Vec::new();
    for s in &fam.systems {
        if !is_prime(s)? {
            non_prime.push(s.clone());
        }
    }

    let (non_modular_pairs, modularity_witness) = check_modular_pairs(&fam)?;
    let modular = modularity_witness.is_none();

    let mut distributivity_witness = None;
    'outer: for f in 0..k {
        for g in 0..k {
            for h in 0..k {
                let lhs = fam.meet[f][fam.join[g][h]];
                let rhs = fam.join[fam.meet[f][g]][fam.meet[f][h]];
                if lhs != rhs {
                    distributivity_witness = Some([f, g, h].map(|i| fam.systems[i].clone()));
                    break 'outer;
                }
            }
        }
    }
    let distributive = distributivity_witness.is_none();
    let chain = is_chain(lattice);
    if !(chain == distributive && distributive == modular) {
        return Err(violation(
            "distributive ⇔ modular ⇔ the state lattice is a chain",
            format!("chain {chain}, distributive {distributive}, modular {modular}"),
        ));
    }

    Ok(LawReport {
        system_count: k,
        semimodular,
        state_lattice_is_chain: chain,
        distributive,
        modular,
        graded: true,
        coatomistic,
        join_generated: true,
        join_irreducibles_from_covers,
        join_irreducible_count: irreducibles.len(),
        fixed_point_isomorphism,
        rank_inequality,
        non_prime,
        non_modular_pairs,
        distributivity_witness,
        modularity_witness,
    })
}

fn is_chain(l: &Lattice) -> bool {
    let n = l.size() as u32;
    (0..n).all(|a| (0..n).all(|b| l.leq_of(a, b) || l.leq_of(b, a)))
}

/// Compares the library's `+` and `·` with the fixed-point descriptions, and
/// `+` with `|P|`-fold alternating composition of the two maps.
fn check_isomorphism(fam: &Family<'_>) -> Result<bool> {
    let n = fam.l.size();
    let tables: Vec<Vec<u32>> = fam
        .systems
        .iter()
        .map(System::map_table)
        .collect::<Result<_>>()?;
    for (i, f) in fam.systems.iter().enumerate() {
        for (j, g) in fam.systems.iter().enumerate() {
            if f.combine(g)? != fam.systems[fam.join[i][j]] {
                return Err(violation("Φ(f+g) = Φf ∩ Φg", format!("{} and {}", fam.show(i), fam.show(j))));
            }
            if f.project(g)? != fam.systems[fam.meet[i][j]] {
                return Err(violation("Φ(f·g) = Φf ∧ Φg", format!("{} and {}", fam.show(i), fam.show(j))));
            }
            let sum = &tables[fam.join[i][j]];
            for (a, &expect) in sum.iter().enumerate() {
                let mut x = a as u32;
                for _ in 0..n {
                    x = tables[i][tables[j][x as usize] as usize];
                }
                if x != expect {
                    return Err(violation(
                        "f + g = (fg)^|P|",
                        format!("{} and {} at {}", fam.show(i), fam.show(j), fam.l.label_of(a as u32)),
                    ));
                }
            }
        }
    }
    Ok(true)
}

/// Non-modular pairs and a witness triple against modularity.
type ModularPairs = (Vec<(System, System)>, Option<[System; 3]>);

/// Lists non-modular pairs by the fixed-point criterion and checks it against
/// the order-theoretic definition: `(a, b)` is modular when
/// `(c + a)·b = c + (a·b)` for every `c ≤ b`.
fn check_modular_pairs(fam: &Family<'_>) -> Result<ModularPairs> {
    let k = fam.systems.len();
    let mut pairs = Vec::new();
    let mut witness = None;
    for a in 0..k {
        for b in 0..k {
            let by_definition = (0..k).filter(|&c| fam.leq[c][b]).find(|&c| {
                fam.meet[fam.join[c][a]][b] != fam.join[c][fam.meet[a][b]]
            });
            let by_criterion = fam.systems[a].is_modular_pair(&fam.systems[b])?;
            if by_criterion != by_definition.is_none() {
                return Err(violation(
                    "modular pairs are those with Φ(f·g) = Φf ∪ Φg",
                    format!("{} and {}", fam.show(a), fam.show(b)),
                ));
            }
            if let Some(c) = by_definition {
                if witness.is_none() {
                    witness = Some([c, a, b].map(|i| fam.systems[i].clone()));
                }
                if a < b {
                    pairs.push((fam.systems[a].clone(), fam.systems[b].clone()));
                }
            }
        }
    }
    Ok((pairs, witness))
}
