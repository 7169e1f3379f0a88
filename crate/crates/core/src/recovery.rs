//! Recovery mechanisms as kernel operators.
//!
//! A kernel operator moves every state to a better one (`k a ≤ a`), is
//! order-preserving and idempotent. It is a system on the dual lattice, and is
//! stored that way. A protected system pairs a kernel `k` with a system `f`:
//! a failure state `a` first recovers to `k a` and then evolves to `f(k a)`.

use alloc::format;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::laws::enumerate_systems_with_cap;
use crate::lattice::{ElemId, Lattice};
use crate::metrics::{Measure, Rational};
use crate::system::System;

/// Largest lattice for the brute-force kernel search.
pub const KERNEL_SEARCH_CAP: usize = 10;

#[derive(Clone, Debug)]
pub struct KernelOperator {
    lattice: Lattice,
    carrier: System,
}

impl KernelOperator {
    /// Reinterprets a system on `lattice.dual()` (or any structurally equal
    /// lattice) as a kernel on `lattice`.
    pub fn from_dual_system(lattice: &Lattice, carrier: System) -> Result<Self> {
        if !carrier.lattice().structurally_equal(&lattice.dual()) {
            return Err(Error::LatticeMismatch);
        }
        Ok(KernelOperator {
            lattice: lattice.clone(),
            carrier,
        })
    }

    /// The kernel whose fixed points are `points`: `k a` is the greatest point
    /// below `a`. `points` must contain the bottom and be closed under join.
    pub fn from_fixed_points(
        lattice: &Lattice,
        points: impl IntoIterator<Item = ElemId>,
    ) -> Result<Self> {
        let n = lattice.size();
        let mut set = BitSet::new(n);
        for p in points {
            set.insert(lattice.check(p)?);
        }
        let bottom = lattice.bottom_index();
        if !set.contains(bottom) {
            return Err(Error::MissingBottom(lattice.label_of(bottom)));
        }
        let members: Vec<u32> = set.iter().collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let j = lattice.join_of(a, b);
                if !set.contains(j) {
                    return Err(Error::NotJoinClosed {
                        a: lattice.label_of(a),
                        b: lattice.label_of(b),
                        join: lattice.label_of(j),
                    });
                }
            }
        }
        let dual = lattice.dual();
        let carrier = System::from_set_unchecked(&dual, set);
        Ok(KernelOperator {
            lattice: lattice.clone(),
            carrier,
        })
    }

    /// No recovery: `k a = a`.
    pub fn identity(lattice: &Lattice) -> Self {
        KernelOperator {
            lattice: lattice.clone(),
            carrier: System::identity(&lattice.dual()),
        }
    }

    /// Total recovery: every state goes to the bottom.
    pub fn total(lattice: &Lattice) -> Self {
        KernelOperator {
            lattice: lattice.clone(),
            carrier: System::top(&lattice.dual()),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The kernel as a system on the dual lattice.
    pub fn carrier(&self) -> &System {
        &self.carrier
    }

    pub fn fixed_points(&self) -> Result<Vec<ElemId>> {
        Ok(self
            .carrier
            .fixed_set()?
            .iter()
            .map(|i| self.lattice.id(i))
            .collect())
    }

    pub fn apply(&self, a: ElemId) -> Result<ElemId> {
        let a = self.lattice.check(a)?;
        Ok(self.lattice.id(self.carrier.apply_index(a)))
    }

    /// μ-rank of the kernel: the measure of its non-fixed states.
    pub fn murank(&self, mu: &Measure) -> Result<Rational> {
        if !mu.lattice().same(&self.lattice) {
            return Err(Error::LatticeMismatch);
        }
        Ok(mu.of_set(&self.carrier.non_fixed_set()?))
    }
}

/// A system with a recovery mechanism on the same lattice.
#[derive(Clone, Debug)]
pub struct ProtectedPair {
    pub recovery: KernelOperator,
    pub system: System,
}

/// How an orbit of `f ∘ k` ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitEnd {
    /// The last state is fixed by `f ∘ k`.
    FixedPoint,
    /// The orbit re-entered an earlier state, `period` steps after it.
    Cycle { start: usize, period: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// `a, fk(a), (fk)²(a), …` up to and including the first repeated state.
    pub states: Vec<ElemId>,
    pub end: OrbitEnd,
}

impl ProtectedPair {
    pub fn new(recovery: KernelOperator, system: System) -> Result<Self> {
        if !recovery.lattice.same(system.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        Ok(ProtectedPair { recovery, system })
    }

    /// `f(k(a))`.
    pub fn apply(&self, a: ElemId) -> Result<ElemId> {
        self.system.apply(self.recovery.apply(a)?)
    }

    pub fn orbit(&self, a: ElemId) -> Result<Orbit> {
        let l = &self.recovery.lattice;
        let mut x = l.check(a)?;
        let mut seen: Vec<u32> = Vec::new();
        loop {
            if let Some(start) = seen.iter().position(|&y| y == x) {
                let period = seen.len() - start;
                let end = if period == 1 {
                    OrbitEnd::FixedPoint
                } else {
                    OrbitEnd::Cycle { start, period }
                };
                seen.push(x);
                return Ok(Orbit {
                    states: seen.into_iter().map(|i| l.id(i)).collect(),
                    end,
                });
            }
            seen.push(x);
            x = self.system.apply_index(self.recovery.carrier.apply_index(x));
        }
    }
}

/// Height of each element: the length of a longest chain from the bottom.
pub fn heights(lattice: &Lattice) -> Vec<usize> {
    let mut h = alloc::vec![0usize; lattice.size()];
    for x in lattice.ascending() {
        for y in lattice.upper_covers(x) {
            h[y as usize] = h[y as usize].max(h[x as usize] + 1);
        }
    }
    h
}

/// Experimental. Among all kernels on a small lattice, one of least μ-rank
/// such that every state of height below `source_height` ends, after recovery
/// and evolution under `f`, at height below `target_height`. Ties go to the
/// first kernel in enumeration order. `None` if no kernel qualifies.
pub fn min_rank_kernel(
    f: &System,
    mu: &Measure,
    source_height: usize,
    target_height: usize,
) -> Result<Option<(KernelOperator, Rational)>> {
    let l = f.lattice();
    if l.size() > KERNEL_SEARCH_CAP {
        return Err(Error::capability(
            format!("kernel search on a lattice of {} elements", l.size()),
            KERNEL_SEARCH_CAP,
        ));
    }
    if !mu.lattice().same(l) {
        return Err(Error::LatticeMismatch);
    }
    let h = heights(l);
    let table = f.map_table()?;
    let sources: Vec<u32> = (0..l.size() as u32)
        .filter(|&a| h[a as usize] < source_height)
        .collect();
    let dual = l.dual();
    let mut best: Option<(KernelOperator, Rational)> = None;
    for carrier in enumerate_systems_with_cap(&dual, KERNEL_SEARCH_CAP)? {
        let ok = sources.iter().all(|&a| {
            let out = table[carrier.apply_index(a) as usize];
            h[out as usize] < target_height
        });
        if !ok {
            continue;
        }
        let k = KernelOperator {
            lattice: l.clone(),
            carrier,
        };
        let rank = k.murank(mu)?;
        if best.as_ref().is_none_or(|(_, r)| rank < *r) {
            best = Some((k, rank));
        }
    }
    Ok(best)
}
