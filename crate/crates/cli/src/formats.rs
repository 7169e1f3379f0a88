//! JSON input and output formats for lattices, models, systems, kernels and
//! measures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cascade_core::recovery::KernelOperator;
use cascade_core::{ElemId, Lattice, Measure, Model, ModelSpec, Rational, System};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LatticeFile {
    Boolean {
        labels: Vec<String>,
    },
    Explicit {
        elements: Vec<String>,
        covers: Vec<(String, String)>,
    },
}

impl LatticeFile {
    pub fn build(&self) -> Result<Lattice, CliError> {
        Ok(match self {
            LatticeFile::Boolean { labels } => Lattice::boolean(labels)?,
            LatticeFile::Explicit { elements, covers } => Lattice::from_covers(elements, covers)?,
        })
    }

    pub fn describe(l: &Lattice) -> LatticeFile {
        if let Some(labels) = l.boolean_labels() {
            return LatticeFile::Boolean {
                labels: labels.to_vec(),
            };
        }
        let label = |e: ElemId| l.label(e).expect("own element");
        LatticeFile::Explicit {
            elements: l.elements().map(label).collect(),
            covers: l
                .cover_pairs()
                .into_iter()
                .map(|(s, t)| (label(s), label(t)))
                .collect(),
        }
    }
}

/// An element: a label string (letter notation, `{x,y}` or an explicit
/// label) or, for boolean lattices, an array of member labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemRef {
    Label(String),
    Members(Vec<String>),
}

impl ElemRef {
    pub fn resolve(&self, l: &Lattice) -> Result<ElemId, CliError> {
        Ok(match self {
            ElemRef::Label(s) => l.parse(s)?,
            ElemRef::Members(m) => l.subset(m)?,
        })
    }

    pub fn of(l: &Lattice, e: ElemId) -> ElemRef {
        if l.is_boolean() {
            ElemRef::Members(l.members(e).expect("own element"))
        } else {
            ElemRef::Label(l.label(e).expect("own element"))
        }
    }
}

/// A lattice given inline or as a path relative to the referring file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeRef {
    Inline(LatticeFile),
    Path(String),
}

pub type Loader<'a> = &'a mut dyn FnMut(&Path) -> Result<Vec<u8>, CliError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub lattice: LatticeRef,
    pub fixed_points: Vec<ElemRef>,
    /// Marks a kernel: `fixed_points` are the states kept by recovery.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dual: bool,
}

impl SystemFile {
    pub fn describe(f: &System) -> Result<SystemFile, CliError> {
        let l = f.lattice();
        Ok(SystemFile {
            lattice: LatticeRef::Inline(LatticeFile::describe(l)),
            fixed_points: elems(l, &f.fixed_points()?),
            dual: false,
        })
    }

    pub fn describe_kernel(k: &KernelOperator) -> Result<SystemFile, CliError> {
        let l = k.lattice();
        Ok(SystemFile {
            lattice: LatticeRef::Inline(LatticeFile::describe(l)),
            fixed_points: elems(l, &k.fixed_points()?),
            dual: true,
        })
    }

    fn lattice(&self, base: &Path, load: Loader) -> Result<Lattice, CliError> {
        match &self.lattice {
            LatticeRef::Inline(file) => file.build(),
            LatticeRef::Path(p) => {
                let path = base.join(p);
                let file: LatticeFile = parse_json(&path, &load(&path)?)?;
                file.build()
            }
        }
    }

    fn points(&self, l: &Lattice) -> Result<Vec<ElemId>, CliError> {
        self.fixed_points.iter().map(|e| e.resolve(l)).collect()
    }

    /// `base` is the directory that relative lattice paths start from; `load`
    /// reads a referenced lattice file.
    pub fn build(&self, base: &Path, load: Loader) -> Result<System, CliError> {
        if self.dual {
            return Err(CliError::invalid("a kernel file (\"dual\": true) was given as a system"));
        }
        let l = self.lattice(base, load)?;
        let points = self.points(&l)?;
        Ok(System::from_fixed_points(&l, points)?)
    }

    pub fn build_kernel(&self, base: &Path, load: Loader) -> Result<KernelOperator, CliError> {
        if !self.dual {
            return Err(CliError::invalid("kernel file must set \"dual\": true"));
        }
        let l = self.lattice(base, load)?;
        let points = self.points(&l)?;
        Ok(KernelOperator::from_fixed_points(&l, points)?)
    }
}

pub fn elems(l: &Lattice, points: &[ElemId]) -> Vec<ElemRef> {
    points.iter().map(|&e| ElemRef::of(l, e)).collect()
}

/// An arc as a `[from, to]` pair or a DOT edge statement such as
/// `"A -> B -> C"` (a chain of arcs) or `"A -- B"` (both directions).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArcRef {
    Pair(String, String),
    Dot(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ModelFile {
    M0 {
        ground: Vec<String>,
        arcs: Vec<ArcRef>,
    },
    M1 {
        ground: Vec<String>,
        #[serde(default)]
        neighbors: BTreeMap<String, Vec<String>>,
        thresholds: BTreeMap<String, u32>,
    },
    M2 {
        ground: Vec<String>,
        sets: Vec<Vec<String>>,
        thresholds: Vec<u32>,
    },
    M3 {
        ground: Vec<String>,
        minimal_sets: BTreeMap<String, Vec<Vec<String>>>,
    },
}

fn dot_arcs(stmt: &str) -> Result<Vec<(String, String)>, CliError> {
    let (sep, both) = if stmt.contains("->") {
        ("->", false)
    } else if stmt.contains("--") {
        ("--", true)
    } else {
        return Err(CliError::invalid(format!("edge `{stmt}` has no `->` or `--`")));
    };
    let nodes: Vec<String> = stmt
        .trim()
        .trim_end_matches(';')
        .split(sep)
        .map(|n| n.trim().trim_matches('"').to_string())
        .collect();
    if nodes.iter().any(|n| n.is_empty()) {
        return Err(CliError::invalid(format!("edge `{stmt}` has an empty endpoint")));
    }
    let mut arcs = Vec::new();
    for w in nodes.windows(2) {
        arcs.push((w[0].clone(), w[1].clone()));
        if both {
            arcs.push((w[1].clone(), w[0].clone()));
        }
    }
    Ok(arcs)
}

impl ModelFile {
    pub fn ground(&self) -> &[String] {
        match self {
            ModelFile::M0 { ground, .. }
            | ModelFile::M1 { ground, .. }
            | ModelFile::M2 { ground, .. }
            | ModelFile::M3 { ground, .. } => ground,
        }
    }

    pub fn to_spec(&self) -> Result<ModelSpec, CliError> {
        let ground = self.ground();
        let index = |field: &str, name: &str| {
            ground.iter().position(|g| g == name).ok_or_else(|| {
                CliError::invalid(format!("{field}: `{name}` is not in the ground set"))
            })
        };
        let per_node = |field: &str, keys: Vec<&String>| -> Result<(), CliError> {
            for k in keys {
                index(field, k)?;
            }
            Ok(())
        };
        let indices = |field: &str, names: &[String]| -> Result<Vec<usize>, CliError> {
            names.iter().map(|n| index(field, n)).collect()
        };
        let model = match self {
            ModelFile::M0 { arcs, .. } => {
                let mut out = Vec::new();
                for arc in arcs {
                    let pairs = match arc {
                        ArcRef::Pair(a, b) => vec![(a.clone(), b.clone())],
                        ArcRef::Dot(s) => dot_arcs(s)?,
                    };
                    for (a, b) in pairs {
                        out.push((index("arcs", &a)?, index("arcs", &b)?));
                    }
                }
                Model::Digraph { arcs: out }
            }
            ModelFile::M1 {
                neighbors,
                thresholds,
                ..
            } => {
                per_node("neighbors", neighbors.keys().collect())?;
                per_node("thresholds", thresholds.keys().collect())?;
                let mut ns = Vec::with_capacity(ground.len());
                let mut ks = Vec::with_capacity(ground.len());
                for g in ground {
                    ns.push(indices("neighbors", neighbors.get(g).map_or(&[][..], |v| v))?);
                    ks.push(*thresholds.get(g).ok_or_else(|| {
                        CliError::invalid(format!("thresholds: no threshold for `{g}`"))
                    })?);
                }
                Model::Threshold {
                    neighbors: ns,
                    thresholds: ks,
                }
            }
            ModelFile::M2 {
                sets, thresholds, ..
            } => Model::CollectiveThreshold {
                sets: sets
                    .iter()
                    .map(|s| indices("sets", s))
                    .collect::<Result<_, _>>()?,
                thresholds: thresholds.clone(),
            },
            ModelFile::M3 { minimal_sets, .. } => {
                per_node("minimal_sets", minimal_sets.keys().collect())?;
                let mut out = Vec::with_capacity(ground.len());
                for g in ground {
                    let sets = minimal_sets.get(g).map_or(&[][..], |v| v);
                    out.push(
                        sets.iter()
                            .map(|s| indices("minimal_sets", s))
                            .collect::<Result<_, _>>()?,
                    );
                }
                Model::Monotone { minimal_sets: out }
            }
        };
        let spec = ModelSpec::new(ground.to_vec(), model);
        spec.validate()?;
        Ok(spec)
    }

    /// The file form of a model spec; M0 arcs are written as pairs.
    pub fn describe(spec: &ModelSpec) -> ModelFile {
        let ground = spec.ground.clone();
        let name = |i: usize| spec.ground[i].clone();
        let names = |v: &[usize]| v.iter().map(|&i| name(i)).collect::<Vec<_>>();
        match &spec.model {
            Model::Digraph { arcs } => ModelFile::M0 {
                ground,
                arcs: arcs.iter().map(|&(a, b)| ArcRef::Pair(name(a), name(b))).collect(),
            },
            Model::Threshold {
                neighbors,
                thresholds,
            } => ModelFile::M1 {
                neighbors: (0..ground.len())
                    .filter(|&i| !neighbors[i].is_empty())
                    .map(|i| (name(i), names(&neighbors[i])))
                    .collect(),
                thresholds: (0..ground.len()).map(|i| (name(i), thresholds[i])).collect(),
                ground,
            },
            Model::CollectiveThreshold { sets, thresholds } => ModelFile::M2 {
                ground,
                sets: sets.iter().map(|s| names(s)).collect(),
                thresholds: thresholds.clone(),
            },
            Model::Monotone { minimal_sets } => ModelFile::M3 {
                minimal_sets: (0..ground.len())
                    .filter(|&i| !minimal_sets[i].is_empty())
                    .map(|i| (name(i), minimal_sets[i].iter().map(|s| names(s)).collect()))
                    .collect(),
                ground,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureFile {
    Counting,
    Explicit { weights: BTreeMap<String, Value> },
}

/// Parses `"p/q"`, `"p"` or a JSON integer into an exact rational.
pub fn parse_rational(v: &Value) -> Result<Rational, CliError> {
    let bad = || CliError::invalid(format!("weight {v} is not an integer or a \"p/q\" string"));
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(BigInt::from(i)))
            .ok_or_else(bad),
        Value::String(s) => {
            let s = s.trim();
            let (p, q) = match s.split_once('/') {
                Some((p, q)) => (p.trim(), q.trim()),
                None => (s, "1"),
            };
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(CliError::invalid(format!("weight {v} has a zero denominator")));
            }
            Ok(Rational::new(p, q))
        }
        _ => Err(bad()),
    }
}

impl MeasureFile {
    pub fn build(&self, l: &Lattice) -> Result<Measure, CliError> {
        match self {
            MeasureFile::Counting => Ok(Measure::counting(l)),
            MeasureFile::Explicit { weights } => {
                let pairs = weights
                    .iter()
                    .map(|(k, v)| Ok((l.parse(k)?, parse_rational(v)?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(Measure::from_weights(l, pairs)?)
            }
        }
    }
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn dot_edges() {
        assert_eq!(
            dot_arcs("A -> B -> C;").unwrap(),
            [("A".into(), "B".into()), ("B".into(), "C".into())]
        );
        assert_eq!(dot_arcs("\"x\" -- y").unwrap().len(), 2);
        assert!(dot_arcs("A B").is_err());
        assert!(dot_arcs("A -> ").is_err());
    }

    #[test]
    fn rationals() {
        let r = |v| parse_rational(&v).unwrap().to_string();
        assert_eq!(r(json!("6/4")), "3/2");
        assert_eq!(r(json!(3)), "3");
        assert_eq!(r(json!(" 5 ")), "5");
        assert!(parse_rational(&json!("1/0")).is_err());
        assert!(parse_rational(&json!(0.5)).is_err());
    }

    #[test]
    fn threshold_model_needs_every_threshold() {
        let file: ModelFile = serde_json::from_value(json!({
            "kind": "M1", "ground": ["A", "B"],
            "neighbors": {"A": ["B"]}, "thresholds": {"A": 1}
        }))
        .unwrap();
        assert!(file.to_spec().is_err());
        let file: ModelFile = serde_json::from_value(json!({
            "kind": "M1", "ground": ["A", "B"],
            "neighbors": {"A": ["Z"]}, "thresholds": {"A": 1, "B": 1}
        }))
        .unwrap();
        assert!(file.to_spec().is_err());
    }

    #[test]
    fn model_file_round_trip() {
        let file: ModelFile = serde_json::from_value(json!({
            "kind": "M0", "ground": ["A", "B", "C"], "arcs": [["A", "B"], "B -- C"]
        }))
        .unwrap();
        let spec = file.to_spec().unwrap();
        assert_eq!(spec.model, Model::Digraph { arcs: vec![(0, 1), (1, 2), (2, 1)] });
        assert_eq!(ModelFile::describe(&spec).to_spec().unwrap(), spec);
    }

    #[test]
    fn system_file_round_trip() {
        let l = Lattice::from_covers(&["0", "a", "b", "1"], &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
            .unwrap();
        let f = System::from_fixed_points(&l, [l.parse("a").unwrap(), l.top()]).unwrap();
        let file = SystemFile::describe(&f).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let back: SystemFile = serde_json::from_str(&text).unwrap();
        let g = back.build(Path::new(""), &mut |p| read(p)).unwrap();
        assert_eq!(g.fixed_points().unwrap().len(), 2);
        assert!(g.lattice().structurally_equal(&l));
    }
}
