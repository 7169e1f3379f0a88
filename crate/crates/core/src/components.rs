//! Component realizations, projection onto components, and cascade detection.
//!
//! A realization splits the state space into components `I`, each with an
//! elementary system `e_I` that drives component `I` to its worst state and
//! leaves the rest alone. Projecting `f · e_I` isolates how `f` acts on
//! component `I`; summing the projections recovers `f`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Product};
use crate::models::ModelSpec;
use crate::system::{Rule, System};
use crate::BitSet;

#[derive(Clone, Debug)]
pub struct ComponentRealization {
    lattice: Lattice,
    elementary: Vec<System>,
    factor_labels: Vec<String>,
    product: Option<Product>,
}

impl ComponentRealization {
    fn checked(
        lattice: Lattice,
        elementary: Vec<System>,
        factor_labels: Vec<String>,
        product: Option<Product>,
    ) -> Result<Self> {
        let r = ComponentRealization {
            lattice,
            elementary,
            factor_labels,
            product,
        };
        r.verify()?;
        Ok(r)
    }

    /// Checks `Σ e_I = 1` and `e_I · e_J = 0` for `I ≠ J`.
    pub fn verify(&self) -> Result<()> {
        if self.elementary.is_empty() {
            return Err(Error::InvalidRealization("no components".into()));
        }
        let mut sum = System::identity(&self.lattice);
        for e in &self.elementary {
            sum = sum.combine(e)?;
        }
        if !sum.is_top() {
            return Err(Error::InvalidRealization(
                "the elementary systems do not add up to 1".into(),
            ));
        }
        for (i, ei) in self.elementary.iter().enumerate() {
            for (j, ej) in self.elementary.iter().enumerate().skip(i + 1) {
                if !ei.project(ej)?.is_identity()? {
                    return Err(Error::InvalidRealization(format!(
                        "e_{} · e_{} is not 0",
                        self.factor_labels[i], self.factor_labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.elementary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elementary.is_empty()
    }

    pub fn elementary(&self) -> &[System] {
        &self.elementary
    }

    pub fn factor_labels(&self) -> &[String] {
        &self.factor_labels
    }

    /// The product structure, for realizations built from factors.
    pub fn product(&self) -> Option<&Product> {
        self.product.as_ref()
    }

    /// Renames the components.
    pub fn with_labels<S: AsRef<str>>(mut self, labels: &[S]) -> Result<Self> {
        if labels.len() != self.elementary.len() {
            return Err(Error::InvalidRealization(format!(
                "{} labels for {} components",
                labels.len(),
                self.elementary.len()
            )));
        }
        self.factor_labels = labels.iter().map(|s| s.as_ref().to_string()).collect();
        Ok(self)
    }

    pub fn component(&self, index: usize) -> Result<&System> {
        self.elementary
            .get(index)
            .ok_or(Error::ComponentOutOfRange {
                index,
                len: self.elementary.len(),
            })
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.factor_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    fn check_lattice(&self, f: &System) -> Result<()> {
        if f.lattice().same(&self.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }
}

/// One elementary system per ground label: `e_i` adds `i` to every state.
pub fn boolean_realization(lattice: &Lattice) -> Result<ComponentRealization> {
    let labels = lattice.boolean_labels().ok_or(Error::NotBoolean)?.to_vec();
    let elementary = (0..labels.len())
        .map(|i| System::free(lattice, lattice.elem(1 << i)?))
        .collect::<Result<Vec<_>>>()?;
    ComponentRealization::checked(lattice.clone(), elementary, labels, None)
}

/// Builds the product of `factors` and realizes each factor as a component:
/// `e_I` sends coordinate `I` to that factor's top. Components are labelled
/// `0`, `1`, ... until renamed with [`ComponentRealization::with_labels`].
pub fn product_realization(factors: &[Lattice]) -> Result<ComponentRealization> {
    let product = Lattice::product_of(factors)?;
    let lattice = product.lattice().clone();
    let n = lattice.size() as u32;
    let elementary = factors
        .iter()
        .enumerate()
        .map(|(k, factor)| {
            let top = factor.top().index();
            let fixed = BitSet::from_indices(
                n as usize,
                (0..n).filter(|&p| product.coord_index(p, k) == top),
            );
            System::from_fixed_points(&lattice, fixed.iter().map(|p| lattice.id(p)))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..factors.len()).map(|k| k.to_string()).collect();
    ComponentRealization::checked(lattice, elementary, labels, Some(product))
}

/// `f · e_I`: how `f` acts on component `I` alone.
pub fn project_component(
    f: &System,
    realization: &ComponentRealization,
    index: usize,
) -> Result<System> {
    realization.check_lattice(f)?;
    f.project(realization.component(index)?)
}

/// The parts `f · e_I` for every component, in component order. Their `+` is
/// `f` again.
pub fn decompose(f: &System, realization: &ComponentRealization) -> Result<Vec<System>> {
    (0..realization.len())
        .map(|i| project_component(f, realization, i))
        .collect()
}

/// `+` of a list of systems on one lattice; the empty sum is `0`.
pub fn recompose(lattice: &Lattice, parts: &[System]) -> Result<System> {
    parts
        .iter()
        .try_fold(System::identity(lattice), |acc, p| acc.combine(p))
}

/// A local rule for one component.
#[derive(Clone, Debug)]
pub enum ComponentRule {
    /// A system `f_I ≤ e_I`.
    System(System),
    /// A model; only the update rule of the component's own node is kept.
    Model(ModelSpec),
}

impl From<System> for ComponentRule {
    fn from(s: System) -> Self {
        ComponentRule::System(s)
    }
}

impl From<ModelSpec> for ComponentRule {
    fn from(m: ModelSpec) -> Self {
        ComponentRule::Model(m)
    }
}

#[derive(Clone, Debug)]
pub struct ComponentOutcome {
    pub index: usize,
    pub label: String,
    /// The local rule `f_I` as given.
    pub rule: System,
    /// `f · e_I` for the combined system `f`.
    pub projected: System,
    pub cascade: bool,
}

#[derive(Clone, Debug)]
pub struct CascadeReport {
    /// `f = Σ f_I`.
    pub combined: System,
    pub components: Vec<ComponentOutcome>,
}

impl CascadeReport {
    /// Indices `I` with `f · e_I ≠ f_I`.
    pub fn cascading(&self) -> Vec<usize> {
        self.components
            .iter()
            .filter(|c| c.cascade)
            .map(|c| c.index)
            .collect()
    }

    pub fn cascading_labels(&self) -> Vec<&str> {
        self.components
            .iter()
            .filter(|c| c.cascade)
            .map(|c| c.label.as_str())
            .collect()
    }

    pub fn has_cascade(&self) -> bool {
        self.components.iter().any(|c| c.cascade)
    }
}

fn local_rule(
    rule: &ComponentRule,
    realization: &ComponentRealization,
    index: usize,
) -> Result<System> {
    let e = realization.component(index)?;
    match rule {
        ComponentRule::System(f) => {
            realization.check_lattice(f)?;
            if !f.leq(e)? {
                return Err(Error::RuleNotLocal(realization.factor_labels[index].clone()));
            }
            Ok(f.clone())
        }
        ComponentRule::Model(spec) => {
            if realization.product.is_some() {
                return Err(Error::NotBoolean);
            }
            let lattice = &realization.lattice;
            // Validate and check the ground set against the lattice.
            spec.build_on(lattice)?;
            let step = spec.step_rule();
            let bit = 1u32 << index;
            let own = Rule::new(move |x| step.step(x) & bit);
            let f = System::close_expansive(lattice, |x| lattice.id(own.step(x.index()) | x.index()))?;
            f.project(e)
        }
    }
}

/// Combines one local rule per component and reports, for each component,
/// whether the combined system acts on it differently from its own rule.
pub fn detect_cascade(
    rules: &[ComponentRule],
    realization: &ComponentRealization,
) -> Result<CascadeReport> {
    if rules.len() != realization.len() {
        return Err(Error::InvalidRealization(format!(
            "{} rules for {} components",
            rules.len(),
            realization.len()
        )));
    }
    let locals = rules
        .iter()
        .enumerate()
        .map(|(i, r)| local_rule(r, realization, i))
        .collect::<Result<Vec<_>>>()?;
    let combined = recompose(&realization.lattice, &locals)?;
    let components = locals
        .into_iter()
        .enumerate()
        .map(|(index, rule)| {
            let projected = project_component(&combined, realization, index)?;
            let cascade = !projected.equals(&rule)?;
            Ok(ComponentOutcome {
                index,
                label: realization.factor_labels[index].clone(),
                rule,
                projected,
                cascade,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CascadeReport {
        combined,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Model;
    use alloc::vec;

    fn triangle() -> ModelSpec {
        ModelSpec::new(
            vec!["A".into(), "B".into(), "C".into()],
            Model::Threshold {
                neighbors: vec![vec![1, 2], vec![0, 2], vec![0, 1]],
                thresholds: vec![2, 1, 2],
            },
        )
    }

    fn labels(l: &Lattice, f: &System) -> Vec<String> {
        f.fixed_points()
            .unwrap()
            .into_iter()
            .map(|e| l.label(e).unwrap())
            .collect()
    }

    #[test]
    fn boolean_elementary_systems() {
        let l = Lattice::boolean(&["A", "B", "C"]).unwrap();
        let r = boolean_realization(&l).unwrap();
        assert_eq!(r.factor_labels(), ["A", "B", "C"]);
        assert_eq!(labels(&l, &r.elementary()[0]), ["Abc", "ABc", "AbC", "ABC"]);
    }

    #[test]
    fn projection_of_running_example() {
        let f = triangle().build().unwrap();
        let l = f.lattice().clone();
        let r = boolean_realization(&l).unwrap();
        let fa = project_component(&f, &r, 0).unwrap();
        assert_eq!(labels(&l, &fa), ["abc", "Abc", "aBc", "ABc", "AbC", "ABC"]);
        assert_eq!(
            fa.apply(l.parse("abC").unwrap()).unwrap(),
            l.parse("AbC").unwrap()
        );
        assert!(project_component(&f, &r, 3).is_err());
    }

    #[test]
    fn bounds_project_to_bounds() {
        let l = Lattice::boolean(&["A", "B"]).unwrap();
        let r = boolean_realization(&l).unwrap();
        for (i, e) in r.elementary().iter().enumerate() {
            assert_eq!(&project_component(&System::top(&l), &r, i).unwrap(), e);
            assert!(project_component(&System::identity(&l), &r, i)
                .unwrap()
                .is_identity()
                .unwrap());
        }
    }

    #[test]
    fn decomposition_recombines() {
        let f = triangle().build().unwrap();
        let r = boolean_realization(f.lattice()).unwrap();
        let parts = decompose(&f, &r).unwrap();
        assert_eq!(parts.len(), 3);
        assert_eq!(recompose(f.lattice(), &parts).unwrap(), f);
    }

    #[test]
    fn running_rules_cascade_at_a_and_c() {
        let spec = triangle();
        let l = Lattice::boolean(&spec.ground).unwrap();
        let r = boolean_realization(&l).unwrap();
        let rules: Vec<ComponentRule> = (0..3).map(|_| spec.clone().into()).collect();
        let report = detect_cascade(&rules, &r).unwrap();
        assert_eq!(report.cascading(), [0, 2]);
        assert_eq!(report.cascading_labels(), ["A", "C"]);
        assert_eq!(report.combined, spec.build_on(&l).unwrap());
    }

    #[test]
    fn lone_rule_has_no_cascade() {
        let f = triangle().build().unwrap();
        let l = f.lattice().clone();
        let r = boolean_realization(&l).unwrap();
        let fb = project_component(&f, &r, 1).unwrap();
        let zero = System::identity(&l);
        let rules = [zero.clone().into(), fb.into(), zero.into()];
        assert!(!detect_cascade(&rules, &r).unwrap().has_cascade());
    }

    #[test]
    fn non_local_rule_is_rejected() {
        let f = triangle().build().unwrap();
        let l = f.lattice().clone();
        let r = boolean_realization(&l).unwrap();
        let zero = System::identity(&l);
        let rules = [f.into(), zero.clone().into(), zero.into()];
        assert!(matches!(detect_cascade(&rules, &r), Err(Error::RuleNotLocal(_))));
    }

    #[test]
    fn product_of_two_chains_matches_boolean_square() {
        let chain = Lattice::from_covers(&["0", "1"], &[("0", "1")]).unwrap();
        let r = product_realization(&[chain.clone(), chain.clone()]).unwrap();
        let b = Lattice::boolean(&["A", "B"]).unwrap();
        let rb = boolean_realization(&b).unwrap();
        let p = r.product().unwrap();
        // (x, y) ↔ bit 0 = x, bit 1 = y
        let to_bool = |e| {
            let c = p.coords(e).unwrap();
            c[0].index() | (c[1].index() << 1)
        };
        for (e, eb) in r.elementary().iter().zip(rb.elementary()) {
            for x in r.lattice().elements() {
                let image = to_bool(e.apply(x).unwrap());
                assert_eq!(image, eb.apply(b.elem(to_bool(x)).unwrap()).unwrap().index());
            }
        }
    }

    #[test]
    fn single_factor_is_top() {
        let chain = Lattice::from_covers(&["0", "1", "2"], &[("0", "1"), ("1", "2")]).unwrap();
        let r = product_realization(&[chain]).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r.elementary()[0].is_top());
    }

    #[test]
    fn three_factor_product_is_a_realization() {
        let chain = Lattice::from_covers(&["0", "1", "2"], &[("0", "1"), ("1", "2")]).unwrap();
        let two = Lattice::boolean(&["x"]).unwrap();
        let r = product_realization(&[chain.clone(), two, chain])
            .unwrap()
            .with_labels(&["p", "q", "r"])
            .unwrap();
        assert_eq!(r.lattice().size(), 18);
        r.verify().unwrap();
        assert_eq!(r.index_of("q").unwrap(), 1);
    }
}
