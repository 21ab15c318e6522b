use std::fmt;

use crate::LpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * x[v.0]).sum()
    }
}

/// A minimisation model over bounded variables and linear rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearModel {
    vars: Vec<Variable>,
    cons: Vec<Constraint>,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        integer: bool,
        cost: f64,
    ) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            integer,
            cost,
        });
        VarId(self.vars.len() - 1)
    }

    /// Continuous variable in `[0, +inf)`.
    pub fn add_nonneg(&mut self, name: impl Into<String>, cost: f64) -> VarId {
        self.add_var(name, 0.0, f64::INFINITY, false, cost)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> ConId {
        self.cons.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
        ConId(self.cons.len() - 1)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.cons
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn var_mut(&mut self, id: VarId) -> &mut Variable {
        &mut self.vars[id.0]
    }

    pub fn constraint(&self, id: ConId) -> &Constraint {
        &self.cons[id.0]
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.cons.len()
    }

    pub fn set_integer(&mut self, id: VarId, integer: bool) {
        self.vars[id.0].integer = integer;
    }

    /// Copy of the model with every integrality flag cleared.
    pub fn relaxed(&self) -> LinearModel {
        let mut m = self.clone();
        for v in &mut m.vars {
            v.integer = false;
        }
        m
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, &xv)| v.cost * xv).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, &xv) in self.vars.iter().zip(x) {
            worst = worst.max(v.lower - xv).max(xv - v.upper);
        }
        for c in &self.cons {
            let act = c.activity(x);
            let viol = match c.sense {
                Sense::Le => act - c.rhs,
                Sense::Ge => c.rhs - act,
                Sense::Eq => (act - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (j, v) in self.vars.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() || !v.cost.is_finite() {
                return Err(LpError::NonFinite(format!("variable {j} ({})", v.name)));
            }
            if v.lower > v.upper {
                return Err(LpError::EmptyBounds(j));
            }
        }
        for (i, c) in self.cons.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(LpError::NonFinite(format!("rhs of row {i} ({})", c.name)));
            }
            for &(v, a) in &c.terms {
                if v.0 >= self.vars.len() {
                    return Err(LpError::UnknownVariable { row: i, var: v.0 });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite(format!("row {i} ({})", c.name)));
                }
            }
        }
        Ok(())
    }
}
