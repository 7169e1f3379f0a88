//! Graphviz export of Hasse diagrams, drawn bottom to top.

use std::fmt::Write;

use cascade_core::{ElemId, Lattice, System};

use crate::error::CliError;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram of a lattice; `marked` states are filled.
pub fn lattice(l: &Lattice, marked: &[ElemId]) -> Result<String, CliError> {
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
    for e in l.elements() {
        let name = quote(&l.label(e)?);
        if marked.contains(&e) {
            writeln!(out, "  {name} [style=filled, fillcolor=lightgrey];").unwrap();
        } else {
            writeln!(out, "  {name};").unwrap();
        }
    }
    for (s, t) in l.cover_pairs() {
        writeln!(out, "  {} -> {};", quote(&l.label(s)?), quote(&l.label(t)?)).unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

/// Label of a system: its fixed points in braces.
pub fn system_label(f: &System) -> Result<String, CliError> {
    let l = f.lattice();
    let points = f
        .fixed_points()?
        .into_iter()
        .map(|e| l.label(e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(format!("{{{}}}", points.join(",")))
}

/// Hasse diagram of a family of systems under the system order.
pub fn systems(family: &[System]) -> Result<String, CliError> {
    let n = family.len();
    let mut below = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            below[i][j] = i != j && family[i].leq(&family[j])?;
        }
    }
    let labels = family.iter().map(system_label).collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from("digraph systems {\n  rankdir=BT;\n  node [shape=box];\n");
    for l in &labels {
        writeln!(out, "  {};", quote(l)).unwrap();
    }
    for i in 0..n {
        for j in 0..n {
            if below[i][j] && !(0..n).any(|k| below[i][k] && below[k][j]) {
                writeln!(out, "  {} -> {};", quote(&labels[i]), quote(&labels[j])).unwrap();
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
