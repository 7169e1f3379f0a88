//! Contagion and threshold models on boolean lattices.
//!
//! Each model describes a one-step update `X ↦ X ∪ h(X)` on sets of failed
//! (black) nodes; the system it defines is the limit of that iteration. The
//! four supported forms, with the tags used in model files:
//!
//! | tag  | variant                        | node `i` joins when                          |
//! |------|--------------------------------|----------------------------------------------|
//! | `M0` | [`Model::Digraph`]             | some in-neighbour is already black           |
//! | `M1` | [`Model::Threshold`]           | at least `k_i` of its neighbours `N_i` are    |
//! | `M2` | [`Model::CollectiveThreshold`] | some group `C ∋ i` has `≥ k_C` black members |
//! | `M3` | [`Model::Monotone`]            | some listed minimal set is entirely black    |

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use alloc::format;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, ElemId};
use crate::system::{Rule, System};

/// Largest ground set for which models are built with explicit fixed points.
pub const EXPLICIT_GROUND_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    /// Arcs `(i, j)`: `j` turns black once `i` is black.
    Digraph { arcs: Vec<(usize, usize)> },
    /// Per-node neighbourhood `N_i` and threshold `k_i`.
    Threshold {
        neighbors: Vec<Vec<usize>>,
        thresholds: Vec<u32>,
    },
    /// Groups `C` with thresholds `k_C`, keyed by the group's position so the
    /// same set may appear twice with different thresholds.
    CollectiveThreshold {
        sets: Vec<Vec<usize>>,
        thresholds: Vec<u32>,
    },
    /// Per-node monotone predicate given by its minimal true sets.
    Monotone { minimal_sets: Vec<Vec<Vec<usize>>> },
}

/// A model instance over a labelled ground set. Node references are indices
/// into `ground`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub ground: Vec<String>,
    pub model: Model,
}

impl ModelSpec {
    pub fn new(ground: Vec<String>, model: Model) -> Self {
        ModelSpec { ground, model }
    }

    /// File tag of the model form: `M0`..`M3`.
    pub fn tag(&self) -> &'static str {
        match self.model {
            Model::Digraph { .. } => "M0",
            Model::Threshold { .. } => "M1",
            Model::CollectiveThreshold { .. } => "M2",
            Model::Monotone { .. } => "M3",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ground.len();
        let node = |field: &str, i: usize| {
            if i < n {
                Ok(())
            } else {
                Err(Error::model(field, format!("node index {i} outside the ground set of {n}")))
            }
        };
        match &self.model {
            Model::Digraph { arcs } => {
                for &(i, j) in arcs {
                    node("arcs", i)?;
                    node("arcs", j)?;
                }
            }
            Model::Threshold {
                neighbors,
                thresholds,
            } => {
                if neighbors.len() != n {
                    return Err(Error::model(
                        "neighbors",
                        format!("{} neighbourhoods for {n} nodes", neighbors.len()),
                    ));
                }
                if thresholds.len() != n {
                    return Err(Error::model(
                        "thresholds",
                        format!("{} thresholds for {n} nodes", thresholds.len()),
                    ));
                }
                for ns in neighbors {
                    for &j in ns {
                        node("neighbors", j)?;
                    }
                }
            }
            Model::CollectiveThreshold { sets, thresholds } => {
                if sets.len() != thresholds.len() {
                    return Err(Error::model(
                        "thresholds",
                        format!("{} thresholds for {} sets", thresholds.len(), sets.len()),
                    ));
                }
                for s in sets {
                    for &j in s {
                        node("sets", j)?;
                    }
                }
            }
            Model::Monotone { minimal_sets } => {
                if minimal_sets.len() != n {
                    return Err(Error::model(
                        "minimal_sets",
                        format!("{} predicates for {n} nodes", minimal_sets.len()),
                    ));
                }
                for (i, family) in minimal_sets.iter().enumerate() {
                    let masks: Vec<u32> = family.iter().map(|s| mask_of(s)).collect();
                    for s in family {
                        for &j in s {
                            node("minimal_sets", j)?;
                        }
                    }
                    for (a, &x) in masks.iter().enumerate() {
                        for (b, &y) in masks.iter().enumerate() {
                            if a != b && x & !y == 0 {
                                return Err(Error::model(
                                    format!("minimal_sets.{}", self.ground[i]),
                                    "sets must form an antichain (one contains another)",
                                ));
                            }
                        }
                    }
                }
            }
        }
        if n > crate::lattice::BOOLEAN_LABEL_CAP {
            return Err(Error::capability(
                format!("model ground set of {n} nodes"),
                crate::lattice::BOOLEAN_LABEL_CAP,
            ));
        }
        Ok(())
    }

    /// The one-step update `h` as a function on bitmasks.
    pub fn step_rule(&self) -> Rule {
        let n = self.ground.len();
        match &self.model {
            Model::Digraph { arcs } => {
                let mut succ = vec![0u32; n];
                for &(i, j) in arcs {
                    succ[i] |= 1 << j;
                }
                Rule::new(move |x| {
                    succ.iter()
                        .enumerate()
                        .filter(|(i, _)| x & (1 << i) != 0)
                        .fold(0, |acc, (_, s)| acc | s)
                })
            }
            Model::Threshold {
                neighbors,
                thresholds,
            } => {
                let rules: Vec<(u32, u32)> = neighbors
                    .iter()
                    .zip(thresholds)
                    .map(|(ns, &k)| (mask_of(ns), k))
                    .collect();
                Rule::new(move |x| {
                    rules
                        .iter()
                        .enumerate()
                        .filter(|(_, &(nbrs, k))| (nbrs & x).count_ones() >= k)
                        .fold(0, |acc, (i, _)| acc | 1 << i)
                })
            }
            Model::CollectiveThreshold { sets, thresholds } => {
                let groups: Vec<(u32, u32)> = sets
                    .iter()
                    .zip(thresholds)
                    .map(|(s, &k)| (mask_of(s), k))
                    .collect();
                Rule::new(move |x| {
                    groups
                        .iter()
                        .filter(|&&(c, k)| (c & x).count_ones() >= k)
                        .fold(0, |acc, &(c, _)| acc | c)
                })
            }
            Model::Monotone { minimal_sets } => {
                let preds: Vec<Vec<u32>> = minimal_sets
                    .iter()
                    .map(|fam| fam.iter().map(|s| mask_of(s)).collect())
                    .collect();
                Rule::new(move |x| {
                    preds
                        .iter()
                        .enumerate()
                        .filter(|(_, fam)| fam.iter().any(|&m| m & !x == 0))
                        .fold(0, |acc, (i, _)| acc | 1 << i)
                })
            }
        }
    }

    /// The limit map `X_0 ↦ X_|S|` as a system on `2^ground`.
    ///
    /// Ground sets up to [`EXPLICIT_GROUND_CAP`] give explicit systems; larger
    /// ones (up to the boolean cap) give implicit, apply-only systems.
    pub fn build(&self) -> Result<System> {
        let lattice = Lattice::boolean(&self.ground)?;
        self.build_on(&lattice)
    }

    /// Like [`build`](Self::build) but on a given boolean lattice, which must
    /// have the same ground labels.
    pub fn build_on(&self, lattice: &Lattice) -> Result<System> {
        self.validate()?;
        match lattice.boolean_labels() {
            Some(labels) if labels == self.ground.as_slice() => {}
            Some(_) => {
                return Err(Error::model("ground", "lattice labels differ from the model's ground set"))
            }
            None => return Err(Error::NotBoolean),
        }
        let rule = self.step_rule();
        if self.ground.len() > EXPLICIT_GROUND_CAP {
            return System::implicit(lattice, vec![rule]);
        }
        System::close_expansive(lattice, |x: ElemId| {
            lattice.elem(rule.step(x.index())).expect("step stays in the ground set")
        })
    }
}

fn mask_of(nodes: &[usize]) -> u32 {
    nodes.iter().fold(0, |acc, &i| acc | 1 << i)
}

fn nodes_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Realizes any system on a boolean lattice as a monotone-rule model:
/// node `i`'s predicate holds on `X` exactly when `i ∈ f(X)`. Minimal sets are
/// listed in increasing bitmask order.
pub fn realize_monotone(f: &System) -> Result<ModelSpec> {
    let lattice = f.lattice();
    let ground = lattice.boolean_labels().ok_or(Error::NotBoolean)?.to_vec();
    let table = f.map_table()?;
    let n = ground.len();
    let minimal_sets = (0..n)
        .map(|i| {
            let bit = 1u32 << i;
            (0..table.len() as u32)
                .filter(|&x| table[x as usize] & bit != 0)
                .filter(|&x| {
                    // minimal: removing any member loses `i`
                    nodes_of(x)
                        .into_iter()
                        .all(|j| table[(x & !(1 << j)) as usize] & bit == 0)
                })
                .map(nodes_of)
                .collect()
        })
        .collect();
    Ok(ModelSpec {
        ground,
        model: Model::Monotone { minimal_sets },
    })
}

/// Whether two model instances define the same system.
pub fn same_system(a: &ModelSpec, b: &ModelSpec) -> Result<bool> {
    if a.ground != b.ground {
        return Err(Error::model("ground", "the two models have different ground sets"));
    }
    let lattice = Lattice::boolean(&a.ground)?;
    a.build_on(&lattice)?.equals(&b.build_on(&lattice)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    pub(crate) fn triangle() -> ModelSpec {
        ModelSpec::new(
            labels(&["A", "B", "C"]),
            Model::Threshold {
                neighbors: vec![vec![1, 2], vec![0, 2], vec![0, 1]],
                thresholds: vec![2, 1, 2],
            },
        )
    }

    fn names(l: &Lattice, f: &System) -> Vec<String> {
        f.fixed_points()
            .unwrap()
            .into_iter()
            .map(|e| l.label(e).unwrap())
            .collect()
    }

    #[test]
    fn triangle_is_the_running_example() {
        let f = triangle().build().unwrap();
        let l = f.lattice().clone();
        assert_eq!(names(&l, &f), ["abc", "aBc", "ABC"]);
        assert_eq!(f.apply(l.parse("Abc").unwrap()).unwrap(), l.top());
        assert_eq!(f.apply(l.parse("abC").unwrap()).unwrap(), l.top());
    }

    #[test]
    fn single_arc() {
        let spec = ModelSpec::new(labels(&["1", "2"]), Model::Digraph { arcs: vec![(0, 1)] });
        let f = spec.build().unwrap();
        let l = f.lattice().clone();
        assert_eq!(names(&l, &f), ["{}", "{2}", "{1,2}"]);
    }

    #[test]
    fn unreachable_and_trivial_thresholds() {
        let mk = |k: u32| {
            ModelSpec::new(
                labels(&["A", "B", "C"]),
                Model::Threshold {
                    neighbors: vec![vec![1, 2], vec![0, 2], vec![0, 1]],
                    thresholds: vec![k; 3],
                },
            )
            .build()
            .unwrap()
        };
        let never = mk(3);
        assert_eq!(never, System::identity(never.lattice()));
        let always = mk(0);
        assert_eq!(always, System::top(always.lattice()));
    }

    #[test]
    fn realize_round_trip() {
        let spec = triangle();
        let f = spec.build().unwrap();
        let m3 = realize_monotone(&f).unwrap();
        let Model::Monotone { minimal_sets } = &m3.model else {
            panic!("expected monotone model")
        };
        // A is reached from {A} itself or from {C} alone
        assert_eq!(minimal_sets[0], vec![vec![0], vec![2]]);
        assert_eq!(m3.build_on(f.lattice()).unwrap(), f);
        assert!(same_system(&spec, &m3).unwrap());
    }

    #[test]
    fn realize_extremes() {
        let l = Lattice::boolean(&["A", "B"]).unwrap();
        let zero = realize_monotone(&System::identity(&l)).unwrap();
        assert_eq!(
            zero.model,
            Model::Monotone {
                minimal_sets: vec![vec![vec![0]], vec![vec![1]]]
            }
        );
        let one = realize_monotone(&System::top(&l)).unwrap();
        assert_eq!(
            one.model,
            Model::Monotone {
                minimal_sets: vec![vec![vec![]], vec![vec![]]]
            }
        );
    }

    #[test]
    fn reversed_cycles_give_the_same_system() {
        let g = labels(&["1", "2", "3"]);
        let fwd = ModelSpec::new(g.clone(), Model::Digraph { arcs: vec![(0, 1), (1, 2), (2, 0)] });
        let back = ModelSpec::new(g, Model::Digraph { arcs: vec![(1, 0), (2, 1), (0, 2)] });
        assert!(same_system(&fwd, &back).unwrap());
    }

    #[test]
    fn opposite_arcs_differ() {
        let g = labels(&["1", "2"]);
        let a = ModelSpec::new(g.clone(), Model::Digraph { arcs: vec![(0, 1)] });
        let b = ModelSpec::new(g, Model::Digraph { arcs: vec![(1, 0)] });
        assert!(!same_system(&a, &b).unwrap());
    }

    #[test]
    fn validation_errors() {
        let bad_arc = ModelSpec::new(labels(&["1"]), Model::Digraph { arcs: vec![(0, 3)] });
        assert!(matches!(bad_arc.build(), Err(Error::InvalidModel { .. })));
        let not_antichain = ModelSpec::new(
            labels(&["A", "B"]),
            Model::Monotone {
                minimal_sets: vec![vec![vec![1], vec![0, 1]], vec![]],
            },
        );
        assert!(matches!(not_antichain.validate(), Err(Error::InvalidModel { .. })));
        let g1 = ModelSpec::new(labels(&["A"]), Model::Digraph { arcs: vec![] });
        let g2 = ModelSpec::new(labels(&["B"]), Model::Digraph { arcs: vec![] });
        assert!(same_system(&g1, &g2).is_err());
    }

    #[test]
    fn large_ground_sets_build_implicitly() {
        let g: Vec<String> = (0..18).map(|i| format!("v{i}")).collect();
        let arcs = (0..17).map(|i| (i, i + 1)).collect();
        let f = ModelSpec::new(g, Model::Digraph { arcs }).build().unwrap();
        assert!(!f.is_explicit());
        let l = f.lattice().clone();
        assert_eq!(f.apply(l.subset(&["v0"]).unwrap()).unwrap(), l.top());
    }
}
