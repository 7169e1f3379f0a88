//! Measures on states, μ-rank, fragility and resilience.
//!
//! All quantities are exact rationals.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::failure::{maximal_weaknesses_with_cap, WeaknessSet, DEFAULT_ENUMERATION_CAP};
use crate::lattice::{ElemId, Lattice};
use crate::system::System;

pub type Rational = BigRational;

/// Largest lattice on which per-state weights are accepted.
pub const WEIGHTED_SIZE_CAP: usize = 1 << 16;

/// An additive non-negative measure on the states of a lattice.
#[derive(Clone, Debug)]
pub struct Measure {
    lattice: Lattice,
    weights: Option<Vec<Rational>>,
}

impl Measure {
    /// Weight 1 on every state.
    pub fn counting(lattice: &Lattice) -> Measure {
        Measure {
            lattice: lattice.clone(),
            weights: None,
        }
    }

    /// Per-state weights. Every state except the top must be given; the top
    /// defaults to 0 since no metric depends on it.
    pub fn from_weights(
        lattice: &Lattice,
        weights: impl IntoIterator<Item = (ElemId, Rational)>,
    ) -> Result<Measure> {
        let n = lattice.size();
        if n > WEIGHTED_SIZE_CAP {
            return Err(Error::capability(
                format!("per-state weights on a lattice of {n} elements"),
                WEIGHTED_SIZE_CAP,
            ));
        }
        let mut table: Vec<Option<Rational>> = alloc::vec![None; n];
        for (e, w) in weights {
            let i = lattice.check(e)?;
            if w.is_negative() {
                return Err(Error::InvalidMeasure(format!(
                    "weight {w} on `{}` is negative",
                    lattice.label_of(i)
                )));
            }
            if table[i as usize].replace(w).is_some() {
                return Err(Error::InvalidMeasure(format!(
                    "`{}` is weighted twice",
                    lattice.label_of(i)
                )));
            }
        }
        let top = lattice.top_index() as usize;
        if table[top].is_none() {
            table[top] = Some(Rational::zero());
        }
        let weights = table
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| {
                    Error::InvalidMeasure(format!("no weight for `{}`", lattice.label_of(i as u32)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Measure {
            lattice: lattice.clone(),
            weights: Some(weights),
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn is_counting(&self) -> bool {
        self.weights.is_none()
    }

    pub fn weight(&self, e: ElemId) -> Result<Rational> {
        let i = self.lattice.check(e)?;
        Ok(self.weight_of(i))
    }

    fn weight_of(&self, i: u32) -> Rational {
        match &self.weights {
            None => Rational::from_integer(BigInt::from(1)),
            Some(w) => w[i as usize].clone(),
        }
    }

    /// `μ(set)` for a set of element indices.
    pub fn of_set(&self, set: &BitSet) -> Rational {
        match &self.weights {
            None => Rational::from_integer(BigInt::from(set.len())),
            Some(w) => set.iter().map(|i| &w[i as usize]).sum(),
        }
    }

    /// True when the top carries weight; it never affects any metric.
    pub fn weights_top(&self) -> bool {
        !self.weight_of(self.lattice.top_index()).is_zero()
    }

    fn check(&self, f: &System) -> Result<()> {
        if self.lattice.same(f.lattice()) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }
}

/// `r(f) = μ(P − Φf)`.
pub fn murank(f: &System, mu: &Measure) -> Result<Rational> {
    mu.check(f)?;
    Ok(mu.of_set(&f.non_fixed_set()?))
}

/// `r(1) = μ(P − {top})`.
pub fn rank_of_top(mu: &Measure) -> Rational {
    let l = &mu.lattice;
    let mut set = BitSet::full(l.size());
    set.remove(l.top_index());
    mu.of_set(&set)
}

/// Largest μ-rank of a maximal weakness.
pub fn fragility(f: &System, mu: &Measure) -> Result<Rational> {
    mu.check(f)?;
    let ws = maximal_weaknesses_with_cap(f, DEFAULT_ENUMERATION_CAP)?;
    Ok(fragility_of(&ws, mu))
}

/// Smallest μ-rank of a minimal failing shock.
pub fn resilience(f: &System, mu: &Measure) -> Result<Rational> {
    mu.check(f)?;
    let ws = maximal_weaknesses_with_cap(f, DEFAULT_ENUMERATION_CAP)?;
    resilience_of(&ws, mu)
}

pub fn fragility_of(ws: &WeaknessSet, mu: &Measure) -> Rational {
    ws.non_fixed
        .iter()
        .map(|t| mu.of_set(t))
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn resilience_of(ws: &WeaknessSet, mu: &Measure) -> Result<Rational> {
    ws.minimal_shocks
        .iter()
        .map(|s| murank(s, mu))
        .try_fold(None::<Rational>, |best, r| {
            let r = r?;
            Ok(Some(match best {
                Some(b) if b <= r => b,
                _ => r,
            }))
        })
        .map(|r| r.unwrap_or_else(Rational::zero))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricReport {
    pub rank: Rational,
    pub fragility: Rational,
    pub resilience: Rational,
    pub rank_of_top: Rational,
    /// `fragility + resilience = r(1)`.
    pub identity_holds: bool,
    /// `r(f) − fragility(f)`; zero exactly for prime systems.
    pub gap: Rational,
    /// An explicit measure puts weight on the top, which is ignored.
    pub top_weight_ignored: bool,
}

pub fn metric_report(f: &System, mu: &Measure) -> Result<MetricReport> {
    metric_report_with_cap(f, mu, DEFAULT_ENUMERATION_CAP)
}

pub fn metric_report_with_cap(f: &System, mu: &Measure, cap: usize) -> Result<MetricReport> {
    mu.check(f)?;
    let ws = maximal_weaknesses_with_cap(f, cap)?;
    metric_report_from(f, &ws, mu)
}

/// Builds the report from an already computed weakness set.
pub fn metric_report_from(f: &System, ws: &WeaknessSet, mu: &Measure) -> Result<MetricReport> {
    let rank = murank(f, mu)?;
    let fragility = fragility_of(ws, mu);
    let resilience = resilience_of(ws, mu)?;
    let r1 = rank_of_top(mu);
    Ok(MetricReport {
        identity_holds: &fragility + &resilience == r1,
        gap: &rank - &fragility,
        rank,
        fragility,
        resilience,
        rank_of_top: r1,
        top_weight_ignored: !mu.is_counting() && mu.weights_top(),
    })
}
