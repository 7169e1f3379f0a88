//! Systems: closure operators on a finite lattice, stored canonically by their
//! fixed-point sets (Moore families).
//!
//! A system `f` is expansive (`a ≤ f a`), order-preserving and idempotent. Its
//! fixed-point set contains the top element and is closed under meet, and
//! conversely every such set determines exactly one system, sending `a` to the
//! least fixed point above it. That correspondence turns the lattice of
//! systems into plain set algebra:
//!
//! * `f + g` (combine) has fixed points `Φf ∩ Φg`;
//! * `f · g` (project) sends `a` to `f a ∧ g a`, with fixed points
//!   `{x ∧ y : x ∈ Φf, y ∈ Φg}`;
//! * `f ≤ g` exactly when `Φf ⊇ Φg`.
//!
//! Systems over boolean lattices too large to enumerate may instead be held
//! implicitly as a list of monotone update rules. Those support application,
//! evaluation and combination only.

use alloc::borrow::Cow;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::lattice::{ElemId, Lattice};

/// Largest lattice on which fixed-point sets are materialized.
pub const EXPLICIT_SYSTEM_CAP: usize = 1 << 16;

/// A monotone one-step update on boolean states (bitmasks). The system it
/// generates iterates `x ↦ x ∪ rule(x)` to a fixed point.
pub type StepFn = dyn Fn(u32) -> u32 + Send + Sync;

#[derive(Clone)]
pub struct Rule(Arc<StepFn>);

impl Rule {
    pub fn new(step: impl Fn(u32) -> u32 + Send + Sync + 'static) -> Self {
        Rule(Arc::new(step))
    }

    #[inline]
    pub fn step(&self, x: u32) -> u32 {
        (self.0)(x)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Rule(..)")
    }
}

#[derive(Clone)]
enum Repr {
    Explicit(BitSet),
    Implicit(Vec<Rule>),
}

/// A cascade system on a finite lattice. Shocks are systems too.
#[derive(Clone)]
pub struct System {
    lattice: Lattice,
    repr: Repr,
}

impl fmt::Debug for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Explicit(set) => {
                let labels: Vec<String> = set.iter().map(|i| self.lattice.label_of(i)).collect();
                f.debug_struct("System").field("fixed_points", &labels).finish()
            }
            Repr::Implicit(rules) => f
                .debug_struct("System")
                .field("rules", &rules.len())
                .finish_non_exhaustive(),
        }
    }
}

/// Systems compare equal when they live on the same lattice and have the same
/// fixed points. Implicit systems too large to enumerate only compare equal
/// to themselves.
impl PartialEq for System {
    fn eq(&self, other: &Self) -> bool {
        if !self.lattice.same(&other.lattice) {
            return false;
        }
        match (self.fixed_set(), other.fixed_set()) {
            (Ok(a), Ok(b)) => a == b,
            _ => match (&self.repr, &other.repr) {
                (Repr::Implicit(a), Repr::Implicit(b)) => {
                    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| Arc::ptr_eq(&x.0, &y.0))
                }
                _ => false,
            },
        }
    }
}

impl Eq for System {}

fn explicit_cap(lattice: &Lattice) -> Result<()> {
    if lattice.size() > EXPLICIT_SYSTEM_CAP {
        Err(Error::capability(
            format!("enumerating fixed points on a lattice of {} elements", lattice.size()),
            EXPLICIT_SYSTEM_CAP,
        ))
    } else {
        Ok(())
    }
}

impl System {
    pub(crate) fn from_set_unchecked(lattice: &Lattice, fixed: BitSet) -> System {
        debug_assert_eq!(fixed.capacity(), lattice.size());
        System {
            lattice: lattice.clone(),
            repr: Repr::Explicit(fixed),
        }
    }

    /// The system whose fixed points are exactly `points`.
    ///
    /// `points` must contain the top element and be closed under meet; the
    /// first violation found is reported.
    pub fn from_fixed_points(
        lattice: &Lattice,
        points: impl IntoIterator<Item = ElemId>,
    ) -> Result<System> {
        explicit_cap(lattice)?;
        let mut set = BitSet::new(lattice.size());
        for p in points {
            set.insert(lattice.check(p)?);
        }
        validate_moore_family(lattice, &set)?;
        Ok(System::from_set_unchecked(lattice, set))
    }

    /// Validates a full map table (`table[i]` is the image of element `i`)
    /// against the three system axioms.
    pub fn from_map(lattice: &Lattice, table: &[ElemId]) -> Result<System> {
        explicit_cap(lattice)?;
        let n = lattice.size();
        if table.len() != n {
            return Err(Error::TableSize {
                got: table.len(),
                expected: n,
            });
        }
        let image: Vec<u32> = table
            .iter()
            .map(|&e| lattice.check(e))
            .collect::<Result<_>>()?;
        let label = |i: u32| lattice.label_of(i);
        for a in 0..n as u32 {
            let fa = image[a as usize];
            if !lattice.leq_of(a, fa) {
                return Err(Error::NotExpansive {
                    at: label(a),
                    image: label(fa),
                });
            }
        }
        // order-preservation along covers implies it everywhere
        for a in 0..n as u32 {
            for b in lattice.upper_covers(a) {
                let (fa, fb) = (image[a as usize], image[b as usize]);
                if !lattice.leq_of(fa, fb) {
                    return Err(Error::NotMonotone {
                        a: label(a),
                        b: label(b),
                        fa: label(fa),
                        fb: label(fb),
                    });
                }
            }
        }
        for a in 0..n as u32 {
            let fa = image[a as usize];
            let ffa = image[fa as usize];
            if ffa != fa {
                return Err(Error::NotIdempotent {
                    at: label(a),
                    once: label(fa),
                    twice: label(ffa),
                });
            }
        }
        let fixed = BitSet::from_indices(n, (0..n as u32).filter(|&a| image[a as usize] == a));
        Ok(System::from_set_unchecked(lattice, fixed))
    }

    /// The system generated by iterating `x ↦ x ∨ h(x)` for an
    /// order-preserving `h`. Monotonicity is checked on every cover pair.
    pub fn close_expansive(lattice: &Lattice, h: impl Fn(ElemId) -> ElemId) -> Result<System> {
        explicit_cap(lattice)?;
        let n = lattice.size();
        let mut image = Vec::with_capacity(n);
        for a in 0..n as u32 {
            image.push(lattice.check(h(lattice.id(a)))?);
        }
        for a in 0..n as u32 {
            for b in lattice.upper_covers(a) {
                let (fa, fb) = (image[a as usize], image[b as usize]);
                if !lattice.leq_of(fa, fb) {
                    return Err(Error::NotMonotone {
                        a: lattice.label_of(a),
                        b: lattice.label_of(b),
                        fa: lattice.label_of(fa),
                        fb: lattice.label_of(fb),
                    });
                }
            }
        }
        // x is a fixed point of x ↦ x ∨ h(x) iff h(x) ≤ x
        let fixed =
            BitSet::from_indices(n, (0..n as u32).filter(|&x| lattice.leq_of(image[x as usize], x)));
        Ok(System::from_set_unchecked(lattice, fixed))
    }

    /// A system on a boolean lattice held as update rules rather than fixed
    /// points. The rules must be monotone; this is trusted.
    pub fn implicit(lattice: &Lattice, rules: Vec<Rule>) -> Result<System> {
        if !lattice.is_boolean() {
            return Err(Error::NotBoolean);
        }
        Ok(System {
            lattice: lattice.clone(),
            repr: Repr::Implicit(rules),
        })
    }

    /// The identity system `0`.
    pub fn identity(lattice: &Lattice) -> System {
        if lattice.size() > EXPLICIT_SYSTEM_CAP {
            return System {
                lattice: lattice.clone(),
                repr: Repr::Implicit(Vec::new()),
            };
        }
        System::from_set_unchecked(lattice, BitSet::full(lattice.size()))
    }

    /// The maximum system `1`, sending everything to the top.
    pub fn top(lattice: &Lattice) -> System {
        if lattice.size() > EXPLICIT_SYSTEM_CAP {
            let full = lattice.top_index();
            return System {
                lattice: lattice.clone(),
                repr: Repr::Implicit(alloc::vec![Rule::new(move |_| full)]),
            };
        }
        let mut set = BitSet::new(lattice.size());
        set.insert(lattice.top_index());
        System::from_set_unchecked(lattice, set)
    }

    /// `free(a)`: the system `x ↦ x ∨ a`, whose fixed points are the
    /// principal filter of `a`.
    pub fn free(lattice: &Lattice, a: ElemId) -> Result<System> {
        let a = lattice.check(a)?;
        if lattice.size() > EXPLICIT_SYSTEM_CAP {
            return System::implicit(lattice, alloc::vec![Rule::new(move |_| a)]);
        }
        Ok(System::from_set_unchecked(lattice, lattice.up_set(a)))
    }

    /// `f_st`: the least system sending `s` to `t`, for `t` covering `s`.
    /// Its fixed points are the elements `x` with `s ≰ x` or `t ≤ x`.
    pub fn join_irreducible(lattice: &Lattice, s: ElemId, t: ElemId) -> Result<System> {
        explicit_cap(lattice)?;
        let (s, t) = (lattice.check(s)?, lattice.check(t)?);
        if !lattice.is_cover_of(s, t) {
            return Err(Error::NotACover {
                s: lattice.label_of(s),
                t: lattice.label_of(t),
            });
        }
        let n = lattice.size();
        let fixed = BitSet::from_indices(
            n,
            (0..n as u32).filter(|&x| !lattice.leq_of(s, x) || lattice.leq_of(t, x)),
        );
        Ok(System::from_set_unchecked(lattice, fixed))
    }

    /// `c_a`: the coatom of the lattice of systems with fixed points `{a, top}`.
    pub fn coatom(lattice: &Lattice, a: ElemId) -> Result<System> {
        explicit_cap(lattice)?;
        let a = lattice.check(a)?;
        if a == lattice.top_index() {
            return Err(Error::CoatomOfTop);
        }
        let set = BitSet::from_indices(lattice.size(), [a, lattice.top_index()]);
        Ok(System::from_set_unchecked(lattice, set))
    }

    /// `u_C`: the least system sending every state of `failing` to the top.
    ///
    /// Its fixed points are the states above no member of `failing`, plus the
    /// top. That set is a down-set plus the top, hence meet-closed.
    pub fn least_failing_states(
        lattice: &Lattice,
        failing: impl IntoIterator<Item = ElemId>,
    ) -> Result<System> {
        explicit_cap(lattice)?;
        let n = lattice.size();
        let mut fixed = BitSet::full(n);
        for c in failing {
            fixed.difference_with(&lattice.up_set(lattice.check(c)?));
        }
        fixed.insert(lattice.top_index());
        Ok(System::from_set_unchecked(lattice, fixed))
    }

    // ---- queries ----

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.repr, Repr::Explicit(_))
    }

    /// The fixed-point set as a bit set over element indices. Implicit systems
    /// are materialized when the lattice is small enough.
    pub fn fixed_set(&self) -> Result<Cow<'_, BitSet>> {
        match &self.repr {
            Repr::Explicit(set) => Ok(Cow::Borrowed(set)),
            Repr::Implicit(rules) => {
                explicit_cap(&self.lattice)?;
                let n = self.lattice.size();
                let fixed = BitSet::from_indices(
                    n,
                    (0..n as u32).filter(|&x| rules.iter().all(|r| r.step(x) & !x == 0)),
                );
                Ok(Cow::Owned(fixed))
            }
        }
    }

    /// The same system with its fixed points materialized.
    pub fn to_explicit(&self) -> Result<System> {
        Ok(System::from_set_unchecked(&self.lattice, self.fixed_set()?.into_owned()))
    }

    /// `P − Φf`
    pub fn non_fixed_set(&self) -> Result<BitSet> {
        Ok(self.fixed_set()?.complement())
    }

    /// Fixed points in increasing index (bitmask) order.
    pub fn fixed_points(&self) -> Result<Vec<ElemId>> {
        Ok(self.fixed_set()?.iter().map(|i| self.lattice.id(i)).collect())
    }

    pub fn is_fixed(&self, a: ElemId) -> Result<bool> {
        let a = self.lattice.check(a)?;
        Ok(self.apply_index(a) == a)
    }

    /// `f(a)`: the least fixed point above `a`.
    pub fn apply(&self, a: ElemId) -> Result<ElemId> {
        let a = self.lattice.check(a)?;
        Ok(self.lattice.id(self.apply_index(a)))
    }

    pub(crate) fn apply_index(&self, a: u32) -> u32 {
        match &self.repr {
            Repr::Explicit(set) => {
                let l = &self.lattice;
                set.iter()
                    .filter(|&x| l.leq_of(a, x))
                    .fold(l.top_index(), |acc, x| l.meet_of(acc, x))
            }
            Repr::Implicit(rules) => {
                let mut x = a;
                loop {
                    let before = x;
                    for r in rules {
                        x |= r.step(x);
                    }
                    if x == before {
                        return x;
                    }
                }
            }
        }
    }

    /// `eval(f)`: the least fixed point, `f(bottom)`.
    pub fn eval(&self) -> ElemId {
        self.lattice.id(self.apply_index(self.lattice.bottom_index()))
    }

    /// The whole map as a table indexed by element.
    ///
    /// For a non-fixed `x`, `f(x)` is the meet of `f(y)` over the upper covers
    /// `y` of `x`, so the table fills in one top-down pass.
    pub fn map_table(&self) -> Result<Vec<u32>> {
        let fixed = self.fixed_set()?;
        let l = &self.lattice;
        let mut table = alloc::vec![0u32; l.size()];
        for x in l.ascending().into_iter().rev() {
            table[x as usize] = if fixed.contains(x) {
                x
            } else {
                l.upper_covers(x)
                    .into_iter()
                    .fold(l.top_index(), |acc, y| l.meet_of(acc, table[y as usize]))
            };
        }
        Ok(table)
    }

    fn same_lattice(&self, other: &System) -> Result<()> {
        if self.lattice.same(&other.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    /// `f + g`, the least system above both.
    pub fn combine(&self, other: &System) -> Result<System> {
        self.same_lattice(other)?;
        match (&self.repr, &other.repr) {
            (Repr::Implicit(a), Repr::Implicit(b)) => Ok(System {
                lattice: self.lattice.clone(),
                repr: Repr::Implicit(a.iter().chain(b).cloned().collect()),
            }),
            _ => {
                let mut fixed = self.fixed_set()?.into_owned();
                fixed.intersect_with(&*other.fixed_set()?);
                Ok(System::from_set_unchecked(&self.lattice, fixed))
            }
        }
    }

    /// `f · g`, the greatest system below both: `a ↦ f a ∧ g a`.
    pub fn project(&self, other: &System) -> Result<System> {
        self.same_lattice(other)?;
        let l = &self.lattice;
        let (tf, tg) = (self.map_table()?, other.map_table()?);
        let n = l.size();
        let fixed = BitSet::from_indices(
            n,
            (0..n as u32).filter(|&a| l.meet_of(tf[a as usize], tg[a as usize]) == a),
        );
        Ok(System::from_set_unchecked(l, fixed))
    }

    /// `f ≤ g`, i.e. `Φf ⊇ Φg`.
    pub fn leq(&self, other: &System) -> Result<bool> {
        self.same_lattice(other)?;
        Ok(other.fixed_set()?.is_subset(&*self.fixed_set()?))
    }

    pub fn equals(&self, other: &System) -> Result<bool> {
        self.same_lattice(other)?;
        Ok(*self.fixed_set()? == *other.fixed_set()?)
    }

    pub fn is_identity(&self) -> Result<bool> {
        Ok(self.fixed_set()?.len() == self.lattice.size())
    }

    pub fn is_top(&self) -> bool {
        self.apply_index(self.lattice.bottom_index()) == self.lattice.top_index()
    }

    /// Rank in the lattice of systems: the number of non-fixed points.
    pub fn rho(&self) -> Result<usize> {
        Ok(self.lattice.size() - self.fixed_set()?.len())
    }

    /// `(f, g)` is a modular pair iff `Φ(f·g) = Φf ∪ Φg`.
    pub fn is_modular_pair(&self, other: &System) -> Result<bool> {
        let meet = self.project(other)?;
        let union = self.fixed_set()?.union(&*other.fixed_set()?);
        Ok(*meet.fixed_set()? == union)
    }

    /// The coatoms `c_a` for `a ∈ Φf − {top}`, whose `·`-fold is `f`.
    pub fn meet_of_coatoms(&self) -> Result<Vec<System>> {
        let top = self.lattice.top_index();
        self.fixed_set()?
            .iter()
            .filter(|&a| a != top)
            .map(|a| System::coatom(&self.lattice, self.lattice.id(a)))
            .collect()
    }
}

/// Checks that `set` contains the top and is closed under meet.
pub(crate) fn validate_moore_family(lattice: &Lattice, set: &BitSet) -> Result<()> {
    let top = lattice.top_index();
    if !set.contains(top) {
        return Err(Error::MissingTop(lattice.label_of(top)));
    }
    if let Some((a, b, m)) = meet_violation(lattice, set) {
        return Err(Error::NotMeetClosed {
            a: lattice.label_of(a),
            b: lattice.label_of(b),
            meet: lattice.label_of(m),
        });
    }
    Ok(())
}

/// First pair of members whose meet falls outside `set`.
pub(crate) fn meet_violation(lattice: &Lattice, set: &BitSet) -> Option<(u32, u32, u32)> {
    let members: Vec<u32> = set.iter().collect();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            let m = lattice.meet_of(a, b);
            if !set.contains(m) {
                return Some((a, b, m));
            }
        }
    }
    None
}

pub(crate) fn is_meet_closed(lattice: &Lattice, set: &BitSet) -> bool {
    meet_violation(lattice, set).is_none()
}

/// Closes `set` under pairwise meets by saturation.
pub fn meet_closure(lattice: &Lattice, set: &BitSet) -> BitSet {
    let mut closed = set.clone();
    let mut frontier: Vec<u32> = set.iter().collect();
    while let Some(a) = frontier.pop() {
        let members: Vec<u32> = closed.iter().collect();
        for b in members {
            let m = lattice.meet_of(a, b);
            if closed.insert(m) {
                frontier.push(m);
            }
        }
    }
    closed
}
