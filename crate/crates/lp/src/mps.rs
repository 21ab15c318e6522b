//! Free-format MPS writer for inspecting models in other solvers.
//!
//! Layout: `NAME`, `ROWS` (objective row `COST` first, then one `L`/`E`/`G`
//! line per constraint), `COLUMNS` (integer columns wrapped in
//! `MARKER INTORG`/`INTEND` pairs), `RHS`, `BOUNDS`, `ENDATA`. Row and column
//! names are `R<i>` and `C<j>` so external tools never see spaces.

use std::fmt::Write;

use crate::model::{LinearModel, Sense};

pub fn write_mps(model: &LinearModel, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n N COST\n");
    for (i, c) in model.constraints().iter().enumerate() {
        let t = match c.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        let _ = writeln!(out, " {t} R{i}");
    }

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (i, c) in model.constraints().iter().enumerate() {
        for &(v, a) in &c.terms {
            cols[v.0].push((i, a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (j, v) in model.vars().iter().enumerate() {
        if v.integer != in_int {
            let kind = if v.integer { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " M{marker} 'MARKER' '{kind}'");
            marker += 1;
            in_int = v.integer;
        }
        if v.cost != 0.0 {
            let _ = writeln!(out, " C{j} COST {}", v.cost);
        }
        for &(i, a) in &cols[j] {
            let _ = writeln!(out, " C{j} R{i} {a}");
        }
        if v.cost == 0.0 && cols[j].is_empty() {
            let _ = writeln!(out, " C{j} COST 0");
        }
    }
    if in_int {
        let _ = writeln!(out, " M{marker} 'MARKER' 'INTEND'");
    }

    out.push_str("RHS\n");
    for (i, c) in model.constraints().iter().enumerate() {
        if c.rhs != 0.0 {
            let _ = writeln!(out, " RHS R{i} {}", c.rhs);
        }
    }

    out.push_str("BOUNDS\n");
    for (j, v) in model.vars().iter().enumerate() {
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (true, true) if v.lower == v.upper => {
                let _ = writeln!(out, " FX BND C{j} {}", v.lower);
            }
            (false, false) => {
                let _ = writeln!(out, " FR BND C{j}");
            }
            (lo, up) => {
                if !lo {
                    let _ = writeln!(out, " MI BND C{j}");
                } else if v.lower != 0.0 {
                    let _ = writeln!(out, " LO BND C{j} {}", v.lower);
                }
                if up {
                    let _ = writeln!(out, " UP BND C{j} {}", v.upper);
                } else if v.integer {
                    let _ = writeln!(out, " PL BND C{j}");
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}
