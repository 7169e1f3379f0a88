//! Finite lattices used as state spaces.
//!
//! Two backends are provided. The boolean backend represents `2^S` implicitly,
//! with each element encoded as a bitmask over the ground labels. The explicit
//! backend stores full meet and join tables computed once from a cover
//! relation, so every query is a table lookup.
//!
//! Element handles ([`ElemId`]) carry the identity of the lattice that issued
//! them; mixing handles from different lattices is reported as
//! [`Error::LatticeMismatch`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Largest ground set accepted by the boolean backend.
pub const BOOLEAN_LABEL_CAP: usize = 20;
/// Largest element count accepted by the explicit backend.
pub const EXPLICIT_SIZE_CAP: usize = 4096;

static NEXT_TOKEN: AtomicUsize = AtomicUsize::new(1);

fn fresh_token() -> usize {
    NEXT_TOKEN.fetch_add(1, Ordering::Relaxed)
}

/// An element of a particular [`Lattice`].
///
/// For boolean lattices the index is the subset bitmask, bit `i` standing for
/// the `i`-th ground label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId {
    token: usize,
    index: u32,
}

impl ElemId {
    #[inline]
    pub fn index(self) -> u32 {
        self.index
    }
}

/// A finite lattice. Cloning is cheap and clones share identity.
#[derive(Clone)]
pub struct Lattice(Arc<Inner>);

struct Inner {
    token: usize,
    backend: Backend,
}

enum Backend {
    Boolean(BooleanSpace),
    Explicit(ExplicitLattice),
}

struct BooleanSpace {
    labels: Vec<String>,
    /// Order reversed (the dual of `2^S`): meet is union, top is the empty set.
    reversed: bool,
    /// Every label is a single ASCII letter, so states render as `AbC`.
    letters: bool,
}

struct ExplicitLattice {
    labels: Vec<String>,
    by_label: BTreeMap<String, u32>,
    meet: Vec<u16>,
    join: Vec<u16>,
    upper: Vec<Vec<u32>>,
    lower: Vec<Vec<u32>>,
    ascending: Vec<u32>,
    top: u32,
    bottom: u32,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.backend {
            Backend::Boolean(b) => f
                .debug_struct("Lattice")
                .field("kind", &if b.reversed { "boolean-dual" } else { "boolean" })
                .field("labels", &b.labels)
                .finish(),
            Backend::Explicit(e) => f
                .debug_struct("Lattice")
                .field("kind", &"explicit")
                .field("elements", &e.labels)
                .finish(),
        }
    }
}

impl Lattice {
    fn wrap(backend: Backend) -> Lattice {
        Lattice(Arc::new(Inner {
            token: fresh_token(),
            backend,
        }))
    }

    /// The boolean lattice `2^labels` ordered by inclusion.
    pub fn boolean<S: AsRef<str>>(labels: &[S]) -> Result<Lattice> {
        if labels.len() > BOOLEAN_LABEL_CAP {
            return Err(Error::capability(
                format!("boolean ground set of {} labels", labels.len()),
                BOOLEAN_LABEL_CAP,
            ));
        }
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = BTreeMap::new();
        for l in &labels {
            if seen.insert(l.as_str(), ()).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let letters = {
            let mut upper: Vec<char> = Vec::new();
            labels.iter().all(|l| {
                let mut chars = l.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_alphabetic() => {
                        let u = c.to_ascii_uppercase();
                        if upper.contains(&u) {
                            false
                        } else {
                            upper.push(u);
                            true
                        }
                    }
                    _ => false,
                }
            })
        };
        Ok(Lattice::wrap(Backend::Boolean(BooleanSpace {
            labels,
            reversed: false,
            letters,
        })))
    }

    /// Builds an explicit lattice from element labels and a generating
    /// relation of `(lower, upper)` pairs, usually the cover pairs.
    ///
    /// The order is the reflexive-transitive closure of the relation. Fails if
    /// the relation has a cycle or if some pair of elements lacks a meet or a
    /// join.
    pub fn from_covers<S: AsRef<str>, T: AsRef<str>>(
        labels: &[S],
        covers: &[(T, T)],
    ) -> Result<Lattice> {
        let n = labels.len();
        if n > EXPLICIT_SIZE_CAP {
            return Err(Error::capability(
                format!("explicit lattice of {n} elements"),
                EXPLICIT_SIZE_CAP,
            ));
        }
        if n == 0 {
            return Err(Error::NotALattice {
                a: String::new(),
                b: String::new(),
                kind: "top (the element list is empty)",
            });
        }
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut by_label = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if by_label.insert(l.clone(), i as u32).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let lookup = |s: &str| {
            by_label
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };

        let mut up_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for (lo, hi) in covers {
            let (lo, hi) = (lookup(lo.as_ref())?, lookup(hi.as_ref())?);
            if lo == hi {
                return Err(Error::CoverCycle(labels[lo as usize].clone()));
            }
            if !up_edges[lo as usize].contains(&hi) {
                up_edges[lo as usize].push(hi);
                indegree[hi as usize] += 1;
            }
        }

        // Kahn's algorithm gives a linear extension, or exposes a cycle.
        let mut ascending = Vec::with_capacity(n);
        let mut ready: Vec<u32> = (0..n as u32).filter(|&i| indegree[i as usize] == 0).collect();
        ready.reverse();
        while let Some(v) = ready.pop() {
            ascending.push(v);
            for &w in &up_edges[v as usize] {
                indegree[w as usize] -= 1;
                if indegree[w as usize] == 0 {
                    ready.push(w);
                }
            }
        }
        if ascending.len() != n {
            let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
            return Err(Error::CoverCycle(labels[stuck].clone()));
        }

        let mut down_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (lo, ups) in up_edges.iter().enumerate() {
            for &hi in ups {
                down_edges[hi as usize].push(lo as u32);
            }
        }

        // below[a] = { x : x <= a }
        let mut below: Vec<BitSet> = vec![BitSet::new(n); n];
        for &a in &ascending {
            let mut set = BitSet::new(n);
            set.insert(a);
            for &c in &down_edges[a as usize] {
                set.union_with(&below[c as usize]);
            }
            below[a as usize] = set;
        }
        let leq = |a: u32, b: u32| below[b as usize].contains(a);

        let meet = bound_table(n, &ascending, &down_edges, &leq)
            .map_err(|(a, b)| Error::NotALattice {
                a: labels[a as usize].clone(),
                b: labels[b as usize].clone(),
                kind: "meet",
            })?;
        let descending: Vec<u32> = ascending.iter().rev().copied().collect();
        let join = bound_table(n, &descending, &up_edges, &|a, b| leq(b, a))
            .map_err(|(a, b)| Error::NotALattice {
                a: labels[a as usize].clone(),
                b: labels[b as usize].clone(),
                kind: "join",
            })?;

        // Hasse covers are the generating edges with nothing strictly between.
        let mut upper: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (lo, ups) in up_edges.iter().enumerate() {
            let lo = lo as u32;
            for &hi in ups {
                let between = below[hi as usize]
                    .iter()
                    .any(|c| c != lo && c != hi && leq(lo, c));
                if !between {
                    upper[lo as usize].push(hi);
                }
            }
            upper[lo as usize].sort_unstable();
        }

        Ok(Lattice::wrap(Backend::Explicit(ExplicitLattice::from_tables(
            labels, by_label, meet, join, upper,
        ))))
    }

    /// The direct product `self × other` with componentwise order.
    pub fn product(&self, other: &Lattice) -> Result<Product> {
        Lattice::product_of(&[self.clone(), other.clone()])
    }

    /// The direct product of one or more factors with componentwise order.
    ///
    /// Elements are numbered in mixed radix with the last factor varying
    /// fastest, and labelled `(a,b,..)` from the factor labels.
    pub fn product_of(factors: &[Lattice]) -> Result<Product> {
        if factors.is_empty() {
            return Err(Error::InvalidRealization("a product needs at least one factor".into()));
        }
        let sizes: Vec<usize> = factors.iter().map(Lattice::size).collect();
        let n = sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s).filter(|&m| m <= EXPLICIT_SIZE_CAP))
            .ok_or_else(|| {
                let dims: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
                Error::capability(
                    format!("product lattice of {} elements", dims.join("×")),
                    EXPLICIT_SIZE_CAP,
                )
            })?;
        let mut strides = vec![1u32; factors.len()];
        for k in (0..factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1] as u32;
        }
        let coords: Vec<Vec<u32>> = (0..n as u32)
            .map(|p| {
                strides
                    .iter()
                    .zip(&sizes)
                    .map(|(&s, &size)| (p / s) % size as u32)
                    .collect()
            })
            .collect();
        let mut labels = Vec::with_capacity(n);
        let mut upper = vec![Vec::new(); n];
        for (p, c) in coords.iter().enumerate() {
            let parts: Vec<String> = factors
                .iter()
                .zip(c)
                .map(|(f, &a)| f.label_of(a))
                .collect();
            labels.push(format!("({})", parts.join(",")));
            let ups = &mut upper[p];
            for (k, f) in factors.iter().enumerate() {
                for u in f.upper_covers(c[k]) {
                    ups.push(p as u32 - c[k] * strides[k] + u * strides[k]);
                }
            }
            ups.sort_unstable();
        }
        let mut meet = vec![0u16; n * n];
        let mut join = vec![0u16; n * n];
        for (p, cp) in coords.iter().enumerate() {
            for (q, cq) in coords.iter().enumerate() {
                let (mut m, mut j) = (0u32, 0u32);
                for (k, f) in factors.iter().enumerate() {
                    m += f.meet_of(cp[k], cq[k]) * strides[k];
                    j += f.join_of(cp[k], cq[k]) * strides[k];
                }
                meet[p * n + q] = m as u16;
                join[p * n + q] = j as u16;
            }
        }
        let mut by_label = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if by_label.insert(l.clone(), i as u32).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let lattice = Lattice::wrap(Backend::Explicit(ExplicitLattice::from_tables(
            labels, by_label, meet, join, upper,
        )));
        Ok(Product {
            lattice,
            factors: factors.to_vec(),
            strides,
        })
    }

    /// The same elements under the reversed order.
    pub fn dual(&self) -> Lattice {
        match &self.0.backend {
            Backend::Boolean(b) => Lattice::wrap(Backend::Boolean(BooleanSpace {
                labels: b.labels.clone(),
                reversed: !b.reversed,
                letters: b.letters,
            })),
            Backend::Explicit(e) => Lattice::wrap(Backend::Explicit(ExplicitLattice {
                labels: e.labels.clone(),
                by_label: e.by_label.clone(),
                meet: e.join.clone(),
                join: e.meet.clone(),
                upper: e.lower.clone(),
                lower: e.upper.clone(),
                ascending: e.ascending.iter().rev().copied().collect(),
                top: e.bottom,
                bottom: e.top,
            })),
        }
    }

    /// True if both handles refer to the same lattice instance.
    pub fn same(&self, other: &Lattice) -> bool {
        self.0.token == other.0.token
    }

    /// Element-by-element equality of labels and operations, regardless of
    /// instance identity.
    pub fn structurally_equal(&self, other: &Lattice) -> bool {
        match (&self.0.backend, &other.0.backend) {
            (Backend::Boolean(a), Backend::Boolean(b)) => {
                a.labels == b.labels && a.reversed == b.reversed
            }
            (Backend::Explicit(a), Backend::Explicit(b)) => {
                a.labels == b.labels && a.meet == b.meet && a.join == b.join
            }
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match &self.0.backend {
            Backend::Boolean(b) => 1usize << b.labels.len(),
            Backend::Explicit(e) => e.labels.len(),
        }
    }

    /// Ground labels when this is a (non-reversed) boolean lattice.
    pub fn boolean_labels(&self) -> Option<&[String]> {
        match &self.0.backend {
            Backend::Boolean(b) if !b.reversed => Some(&b.labels),
            _ => None,
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.boolean_labels().is_some()
    }

    /// Whether this lattice uses the implicit boolean backend (either order).
    pub fn is_boolean_backend(&self) -> bool {
        matches!(self.0.backend, Backend::Boolean(_))
    }

    /// Whether this is the order-reversed boolean backend.
    pub fn is_reversed_boolean(&self) -> bool {
        matches!(&self.0.backend, Backend::Boolean(b) if b.reversed)
    }

    /// Labels of an explicit lattice, in index order.
    pub fn element_labels(&self) -> Option<&[String]> {
        match &self.0.backend {
            Backend::Explicit(e) => Some(&e.labels),
            Backend::Boolean(_) => None,
        }
    }

    // ---- handles ----

    pub fn elem(&self, index: u32) -> Result<ElemId> {
        if (index as usize) < self.size() {
            Ok(self.id(index))
        } else {
            Err(Error::UnknownElement(format!("#{index}")))
        }
    }

    #[inline]
    pub(crate) fn id(&self, index: u32) -> ElemId {
        ElemId {
            token: self.0.token,
            index,
        }
    }

    /// Validates that `e` belongs to this lattice and returns its index.
    #[inline]
    pub fn check(&self, e: ElemId) -> Result<u32> {
        if e.token == self.0.token {
            Ok(e.index)
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = ElemId> + '_ {
        (0..self.size() as u32).map(move |i| self.id(i))
    }

    pub fn top(&self) -> ElemId {
        self.id(self.top_index())
    }

    pub fn bottom(&self) -> ElemId {
        self.id(self.bottom_index())
    }

    pub fn meet(&self, a: ElemId, b: ElemId) -> Result<ElemId> {
        Ok(self.id(self.meet_of(self.check(a)?, self.check(b)?)))
    }

    pub fn join(&self, a: ElemId, b: ElemId) -> Result<ElemId> {
        Ok(self.id(self.join_of(self.check(a)?, self.check(b)?)))
    }

    pub fn leq(&self, a: ElemId, b: ElemId) -> Result<bool> {
        Ok(self.leq_of(self.check(a)?, self.check(b)?))
    }

    /// Elements covering `a`.
    pub fn covers_of(&self, a: ElemId) -> Result<Vec<ElemId>> {
        let a = self.check(a)?;
        Ok(self.upper_covers(a).into_iter().map(|i| self.id(i)).collect())
    }

    /// Whether `t` covers `s`.
    pub fn is_cover(&self, s: ElemId, t: ElemId) -> Result<bool> {
        let (s, t) = (self.check(s)?, self.check(t)?);
        Ok(self.is_cover_of(s, t))
    }

    /// All cover pairs `(s, t)` with `t` covering `s`, ordered by `s` then `t`.
    pub fn cover_pairs(&self) -> Vec<(ElemId, ElemId)> {
        (0..self.size() as u32)
            .flat_map(|s| {
                self.upper_covers(s)
                    .into_iter()
                    .map(move |t| (self.id(s), self.id(t)))
            })
            .collect()
    }

    // ---- index-level operations (no identity checks) ----

    #[inline]
    pub(crate) fn top_index(&self) -> u32 {
        match &self.0.backend {
            Backend::Boolean(b) if b.reversed => 0,
            Backend::Boolean(b) => (1u32 << b.labels.len()) - 1,
            Backend::Explicit(e) => e.top,
        }
    }

    #[inline]
    pub(crate) fn bottom_index(&self) -> u32 {
        match &self.0.backend {
            Backend::Boolean(b) if b.reversed => (1u32 << b.labels.len()) - 1,
            Backend::Boolean(_) => 0,
            Backend::Explicit(e) => e.bottom,
        }
    }

    #[inline]
    pub(crate) fn meet_of(&self, a: u32, b: u32) -> u32 {
        match &self.0.backend {
            Backend::Boolean(s) if s.reversed => a | b,
            Backend::Boolean(_) => a & b,
            Backend::Explicit(e) => e.meet[a as usize * e.labels.len() + b as usize] as u32,
        }
    }

    #[inline]
    pub(crate) fn join_of(&self, a: u32, b: u32) -> u32 {
        match &self.0.backend {
            Backend::Boolean(s) if s.reversed => a & b,
            Backend::Boolean(_) => a | b,
            Backend::Explicit(e) => e.join[a as usize * e.labels.len() + b as usize] as u32,
        }
    }

    #[inline]
    pub(crate) fn leq_of(&self, a: u32, b: u32) -> bool {
        match &self.0.backend {
            Backend::Boolean(s) if s.reversed => b & !a == 0,
            Backend::Boolean(_) => a & !b == 0,
            Backend::Explicit(e) => e.meet[a as usize * e.labels.len() + b as usize] as u32 == a,
        }
    }

    pub(crate) fn upper_covers(&self, a: u32) -> Vec<u32> {
        match &self.0.backend {
            Backend::Boolean(s) => {
                let n = s.labels.len();
                (0..n)
                    .map(|k| 1u32 << k)
                    .filter(|bit| (a & bit == 0) != s.reversed)
                    .map(|bit| a ^ bit)
                    .collect()
            }
            Backend::Explicit(e) => e.upper[a as usize].clone(),
        }
    }

    pub(crate) fn is_cover_of(&self, s: u32, t: u32) -> bool {
        match &self.0.backend {
            Backend::Boolean(b) => {
                let diff = s ^ t;
                diff.count_ones() == 1 && ((s & diff == 0) != b.reversed)
            }
            Backend::Explicit(e) => e.upper[s as usize].binary_search(&t).is_ok(),
        }
    }

    /// A linear extension: every element appears after all elements below it.
    pub(crate) fn ascending(&self) -> Vec<u32> {
        match &self.0.backend {
            Backend::Boolean(b) if b.reversed => (0..self.size() as u32).rev().collect(),
            Backend::Boolean(_) => (0..self.size() as u32).collect(),
            Backend::Explicit(e) => e.ascending.clone(),
        }
    }

    /// `{ x : a <= x }`
    pub(crate) fn up_set(&self, a: u32) -> BitSet {
        let n = self.size();
        match &self.0.backend {
            Backend::Boolean(b) if !b.reversed => {
                let full = (n - 1) as u32;
                let rest = full & !a;
                let mut set = BitSet::new(n);
                // enumerate supersets of `a` as a | (submasks of rest)
                let mut sub = rest;
                loop {
                    set.insert(a | sub);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
                set
            }
            _ => BitSet::from_indices(n, (0..n as u32).filter(|&x| self.leq_of(a, x))),
        }
    }

    // ---- labels ----

    /// Renders an element. Boolean states over single-letter labels use the
    /// upper/lowercase string notation (`AbC` = {A, C}); other boolean states
    /// use `{x,y}`.
    pub fn label(&self, e: ElemId) -> Result<String> {
        Ok(self.label_of(self.check(e)?))
    }

    pub(crate) fn label_of(&self, index: u32) -> String {
        match &self.0.backend {
            Backend::Boolean(b) => {
                if b.letters {
                    b.labels
                        .iter()
                        .enumerate()
                        .map(|(i, l)| {
                            let c = l.chars().next().unwrap_or('?');
                            if index & (1 << i) != 0 {
                                c.to_ascii_uppercase()
                            } else {
                                c.to_ascii_lowercase()
                            }
                        })
                        .collect()
                } else {
                    let members: Vec<&str> = b
                        .labels
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| index & (1 << i) != 0)
                        .map(|(_, l)| l.as_str())
                        .collect();
                    format!("{{{}}}", members.join(","))
                }
            }
            Backend::Explicit(e) => e.labels[index as usize].clone(),
        }
    }

    /// Ground labels contained in a boolean state.
    pub fn members(&self, e: ElemId) -> Result<Vec<String>> {
        let index = self.check(e)?;
        match &self.0.backend {
            Backend::Boolean(b) => Ok(b
                .labels
                .iter()
                .enumerate()
                .filter(|(i, _)| index & (1 << i) != 0)
                .map(|(_, l)| l.clone())
                .collect()),
            Backend::Explicit(_) => Err(Error::NotBoolean),
        }
    }

    /// The boolean state containing exactly the given labels.
    pub fn subset<S: AsRef<str>>(&self, members: &[S]) -> Result<ElemId> {
        match &self.0.backend {
            Backend::Boolean(b) => {
                let mut mask = 0u32;
                for m in members {
                    let m = m.as_ref();
                    let i = b
                        .labels
                        .iter()
                        .position(|l| l == m)
                        .ok_or_else(|| Error::UnknownElement(m.to_string()))?;
                    mask |= 1 << i;
                }
                Ok(self.id(mask))
            }
            Backend::Explicit(_) => Err(Error::NotBoolean),
        }
    }

    /// Parses an element label. Boolean lattices accept the letter notation
    /// (every label exactly once, uppercase = member) and `{x,y}` lists.
    pub fn parse(&self, text: &str) -> Result<ElemId> {
        let text = text.trim();
        match &self.0.backend {
            Backend::Explicit(e) => e
                .by_label
                .get(text)
                .map(|&i| self.id(i))
                .ok_or_else(|| Error::UnknownElement(text.to_string())),
            Backend::Boolean(b) => {
                if let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
                    let members: Vec<&str> = inner
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .collect();
                    return self.subset(&members);
                }
                let unknown = || Error::UnknownElement(text.to_string());
                if !b.letters || text.chars().count() != b.labels.len() {
                    return Err(unknown());
                }
                let mut mask = 0u32;
                let mut seen = 0u32;
                for c in text.chars() {
                    let i = b
                        .labels
                        .iter()
                        .position(|l| l.chars().next().map(|x| x.eq_ignore_ascii_case(&c)) == Some(true))
                        .ok_or_else(unknown)?;
                    if seen & (1 << i) != 0 {
                        return Err(unknown());
                    }
                    seen |= 1 << i;
                    if c.is_ascii_uppercase() {
                        mask |= 1 << i;
                    }
                }
                Ok(self.id(mask))
            }
        }
    }
}

/// Computes the meet table (or, along the reversed order, the join table) by dynamic programming
/// along a linear extension. For `a ≰ b`, the greatest lower bound of `a` and
/// `b` is the greatest among the bounds of `(c, b)` over lower covers `c` of
/// `a`. Returns the first pair without a bound on failure.
fn bound_table(
    n: usize,
    order: &[u32],
    toward: &[Vec<u32>],
    leq: &dyn Fn(u32, u32) -> bool,
) -> core::result::Result<Vec<u16>, (u32, u32)> {
    const UNSET: u16 = u16::MAX;
    let mut table = vec![UNSET; n * n];
    for &a in order {
        for b in 0..n as u32 {
            let value = if leq(a, b) {
                a
            } else if leq(b, a) {
                b
            } else {
                let mut best: Option<u32> = None;
                for &c in &toward[a as usize] {
                    let m = table[c as usize * n + b as usize];
                    if m == UNSET {
                        return Err((c, b));
                    }
                    let m = m as u32;
                    best = Some(match best {
                        Some(cur) if leq(m, cur) => cur,
                        _ => m,
                    });
                }
                let best = best.ok_or((a, b))?;
                // the candidate must dominate every other candidate
                for &c in &toward[a as usize] {
                    let m = table[c as usize * n + b as usize] as u32;
                    if !leq(m, best) {
                        return Err((a, b));
                    }
                }
                best
            };
            table[a as usize * n + b as usize] = value as u16;
        }
    }
    Ok(table)
}

impl ExplicitLattice {
    fn from_tables(
        labels: Vec<String>,
        by_label: BTreeMap<String, u32>,
        meet: Vec<u16>,
        join: Vec<u16>,
        upper: Vec<Vec<u32>>,
    ) -> Self {
        let n = labels.len();
        let mut lower = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for (lo, ups) in upper.iter().enumerate() {
            for &hi in ups {
                lower[hi as usize].push(lo as u32);
                indegree[hi as usize] += 1;
            }
        }
        for l in &mut lower {
            l.sort_unstable();
        }
        let mut ascending = Vec::with_capacity(n);
        let mut ready: Vec<u32> = (0..n as u32).filter(|&i| indegree[i as usize] == 0).collect();
        ready.reverse();
        while let Some(v) = ready.pop() {
            ascending.push(v);
            for &w in &upper[v as usize] {
                indegree[w as usize] -= 1;
                if indegree[w as usize] == 0 {
                    ready.push(w);
                }
            }
        }
        let bottom = (0..n).fold(0u32, |acc, x| meet[acc as usize * n + x] as u32);
        let top = (0..n).fold(0u32, |acc, x| join[acc as usize * n + x] as u32);
        ExplicitLattice {
            labels,
            by_label,
            meet,
            join,
            upper,
            lower,
            ascending,
            top,
            bottom,
        }
    }
}

/// A product lattice together with its factors, for composing and splitting
/// elements into coordinates.
#[derive(Clone, Debug)]
pub struct Product {
    lattice: Lattice,
    factors: Vec<Lattice>,
    strides: Vec<u32>,
}

impl Product {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn factors(&self) -> &[Lattice] {
        &self.factors
    }

    /// The element with the given coordinates, one per factor.
    pub fn compose(&self, coords: &[ElemId]) -> Result<ElemId> {
        if coords.len() != self.factors.len() {
            return Err(Error::LatticeMismatch);
        }
        let mut p = 0;
        for ((f, &c), &s) in self.factors.iter().zip(coords).zip(&self.strides) {
            p += f.check(c)? * s;
        }
        Ok(self.lattice.id(p))
    }

    /// Coordinates of a product element.
    pub fn coords(&self, p: ElemId) -> Result<Vec<ElemId>> {
        let p = self.lattice.check(p)?;
        Ok(self
            .factors
            .iter()
            .zip(&self.strides)
            .map(|(f, &s)| f.id(self.coord_of(p, s, f)))
            .collect())
    }

    fn coord_of(&self, p: u32, stride: u32, factor: &Lattice) -> u32 {
        (p / stride) % factor.size() as u32
    }

    /// Index of coordinate `k` of element index `p`.
    pub(crate) fn coord_index(&self, p: u32, k: usize) -> u32 {
        self.coord_of(p, self.strides[k], &self.factors[k])
    }

    pub fn pair(&self, a: ElemId, b: ElemId) -> Result<ElemId> {
        self.compose(&[a, b])
    }

    pub fn unpair(&self, p: ElemId) -> Result<(ElemId, ElemId)> {
        match self.coords(p)?.as_slice() {
            &[a, b] => Ok((a, b)),
            _ => Err(Error::LatticeMismatch),
        }
    }
}
