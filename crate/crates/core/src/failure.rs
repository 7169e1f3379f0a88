//! Shocks, prime systems, weaknesses and minimal failing shocks.
//!
//! A shock `s` fails `f` when `f + s = 1`, i.e. when the two systems share no
//! fixed point but the top. The minimal failing shocks are the systems whose
//! fixed points are `T ∪ {top}` for a maximal meet-closed `T ⊆ P − Φf`; they
//! are prime, and negating them gives the maximal weaknesses of `f`.

use alloc::format;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::lattice::{ElemId, Lattice};
use crate::system::{is_meet_closed, System};

/// Default limit on `|P|` for weakness enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 64;

/// Whether shock `s` fails `f`.
pub fn fails(f: &System, s: &System) -> Result<bool> {
    if !f.lattice().same(s.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    if f.is_explicit() && s.is_explicit() {
        let common = f.fixed_set()?.intersection(&*s.fixed_set()?);
        Ok(common.len() == 1)
    } else {
        Ok(f.combine(s)?.is_top())
    }
}

/// `P − Φf` is closed under meet.
pub fn is_prime(f: &System) -> Result<bool> {
    let non_fixed = f.non_fixed_set()?;
    Ok(is_meet_closed(f.lattice(), &non_fixed))
}

/// `¬f`, with fixed points `P − (Φf − {top})`. Only defined for prime `f`.
pub fn negate(f: &System) -> Result<System> {
    if !is_prime(f)? {
        return Err(Error::NotPrime);
    }
    let l = f.lattice();
    let mut fixed = f.non_fixed_set()?;
    fixed.insert(l.top_index());
    Ok(System::from_set_unchecked(l, fixed))
}

/// The single minimal failing shock `¬f` when `f` is prime, `None` otherwise.
pub fn unique_minimal_shock(f: &System) -> Result<Option<System>> {
    if is_prime(f)? {
        negate(f).map(Some)
    } else {
        Ok(None)
    }
}

/// Maximal weaknesses of a system together with the matching minimal shocks.
///
/// `weaknesses[i]` and `minimal_shocks[i]` are negations of each other and
/// share the set `non_fixed[i]`: it is the non-fixed set of the weakness and,
/// with the top added, the fixed-point set of the shock. Entries are sorted by
/// decreasing set size, then by the ascending member list.
#[derive(Clone, Debug)]
pub struct WeaknessSet {
    pub owner: System,
    pub non_fixed: Vec<BitSet>,
    pub weaknesses: Vec<System>,
    pub minimal_shocks: Vec<System>,
}

impl WeaknessSet {
    pub fn len(&self) -> usize {
        self.weaknesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weaknesses.is_empty()
    }
}

pub fn maximal_weaknesses(f: &System) -> Result<WeaknessSet> {
    maximal_weaknesses_with_cap(f, DEFAULT_ENUMERATION_CAP)
}

/// As [`maximal_weaknesses`] with an explicit limit on the lattice size.
pub fn maximal_weaknesses_with_cap(f: &System, cap: usize) -> Result<WeaknessSet> {
    let l = f.lattice();
    if l.size() > cap {
        return Err(Error::capability(
            format!("weakness enumeration on a lattice of {} elements", l.size()),
            cap,
        ));
    }
    let fixed = f.fixed_set()?.into_owned();
    let mut sets = maximal_meet_closed_subsets(l, &fixed);
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

    let top = l.top_index();
    let full = BitSet::full(l.size());
    let mut weaknesses = Vec::with_capacity(sets.len());
    let mut minimal_shocks = Vec::with_capacity(sets.len());
    for t in &sets {
        let mut shock = t.clone();
        shock.insert(top);
        let weak = full.difference(t);
        // Both are Moore families by the theory; a failure here is a bug.
        for (name, set) in [("minimal shock", &shock), ("weakness", &weak)] {
            if let Some((a, b, m)) = crate::system::meet_violation(l, set) {
                return Err(Error::LawViolation {
                    law: "minimal shocks are prime",
                    witness: format!(
                        "{name} with non-fixed set {:?}: {} ∧ {} = {} escapes",
                        t.iter().map(|x| l.label_of(x)).collect::<Vec<_>>(),
                        l.label_of(a),
                        l.label_of(b),
                        l.label_of(m)
                    ),
                });
            }
        }
        minimal_shocks.push(System::from_set_unchecked(l, shock));
        weaknesses.push(System::from_set_unchecked(l, weak));
    }
    Ok(WeaknessSet {
        owner: f.clone(),
        non_fixed: sets,
        weaknesses,
        minimal_shocks,
    })
}

/// All inclusion-maximal meet-closed subsets of `P − fixed`.
///
/// A non-empty meet-closed set has a least element `m`, so the search runs
/// once per candidate minimum over `N ∩ ↑m`. Maximal sets are prime, so the
/// search only builds sets `T` for which both `T` and `↑m − T − {top}` are
/// closed under meet. Elements are decided in descending index order and each
/// decision is propagated through both closures. An excluded element of `N`
/// must end up blocked, meaning some member `t` has `x ∧ t` fixed, or `T`
/// would not be maximal; branches where that becomes impossible are cut.
fn maximal_meet_closed_subsets(l: &Lattice, fixed: &BitSet) -> Vec<BitSet> {
    let n = l.size();
    let non_fixed = fixed.complement();
    if non_fixed.is_empty() {
        return alloc::vec![BitSet::new(n)];
    }
    // partners[x] = { t ∈ N : x ∧ t is fixed }
    let mut partners = alloc::vec![BitSet::new(n); n];
    for x in non_fixed.iter() {
        for t in non_fixed.iter() {
            if fixed.contains(l.meet_of(x, t)) {
                partners[x as usize].insert(t);
            }
        }
    }
    let top = l.top_index();
    let mut out = Vec::new();
    for m in non_fixed.iter() {
        let up = l.up_set(m);
        let region = up.intersection(&non_fixed);
        let outside = non_fixed.difference(&region);
        if outside
            .iter()
            .any(|y| partners[y as usize].is_disjoint(&region))
        {
            continue;
        }
        let mut rest = up.intersection(fixed);
        rest.remove(top);
        let mut candidates: Vec<u32> = region.iter().filter(|&x| x != m).collect();
        candidates.reverse();
        let mut search = Search {
            l,
            partners: &partners,
            candidates: &candidates,
            out: &mut out,
        };
        let state = State {
            members: BitSet::from_indices(n, [m]),
            excluded: outside,
            rest,
            available: region,
        };
        search.run(0, state);
    }
    out
}

#[derive(Clone)]
struct State {
    members: BitSet,
    /// Elements of `N` kept out of the set.
    excluded: BitSet,
    /// `↑m − T − {top}`: excluded elements above the minimum plus the fixed
    /// ones. Must stay closed under meet.
    rest: BitSet,
    /// Members plus undecided candidates.
    available: BitSet,
}

struct Search<'a> {
    l: &'a Lattice,
    partners: &'a [BitSet],
    candidates: &'a [u32],
    out: &'a mut Vec<BitSet>,
}

impl Search<'_> {
    fn run(&mut self, pos: usize, state: State) {
        let next = self.candidates[pos..]
            .iter()
            .position(|&x| !state.members.contains(x) && !state.excluded.contains(x))
            .map(|k| pos + k);
        let Some(pos) = next else {
            self.out.push(state.members);
            return;
        };
        let x = self.candidates[pos];
        if let Some(s) = self.include(&state, x) {
            self.run(pos + 1, s);
        }
        if let Some(s) = self.exclude(state, x) {
            self.run(pos + 1, s);
        }
    }

    fn include(&self, state: &State, x: u32) -> Option<State> {
        if !self.partners[x as usize].is_disjoint(&state.members) {
            return None;
        }
        let mut s = state.clone();
        s.members.insert(x);
        for t in state.members.iter() {
            let m = self.l.meet_of(x, t);
            if s.rest.contains(m) || s.excluded.contains(m) {
                return None;
            }
            s.members.insert(m);
        }
        Some(s)
    }

    fn exclude(&self, mut s: State, x: u32) -> Option<State> {
        let mut queue = alloc::vec![x];
        while let Some(y) = queue.pop() {
            if s.members.contains(y) {
                return None;
            }
            if !s.rest.insert(y) {
                continue;
            }
            s.excluded.insert(y);
            s.available.remove(y);
            for u in s.rest.iter() {
                let m = self.l.meet_of(y, u);
                if !s.rest.contains(m) {
                    queue.push(m);
                }
            }
        }
        let viable = s
            .excluded
            .iter()
            .all(|y| !self.partners[y as usize].is_disjoint(&s.available));
        viable.then_some(s)
    }
}

/// Smallest initial failure set that drives `f` to the top, with the first
/// such set in increasing bitmask order as a witness.
pub fn min_seed(f: &System) -> Result<(usize, ElemId)> {
    let l = f.lattice();
    let labels = l.boolean_labels().ok_or(Error::NotBoolean)?;
    let n = labels.len() as u32;
    let top = l.top_index();
    for k in 0..=n {
        let hit = (0..1u32 << n)
            .filter(|x| x.count_ones() == k)
            .find(|&x| f.apply_index(x) == top);
        if let Some(x) = hit {
            return Ok((k as usize, l.id(x)));
        }
    }
    unreachable!("the full set always reaches the top")
}
