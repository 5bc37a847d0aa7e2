//! Solver-agnostic linear programs and the bounded-variable simplex behind them.

mod simplex;

use std::fmt;

use crate::error::{Error, Result};
use num_traits::Zero;

use crate::scalar::{Rational, Scalar};

/// Exact solves are refused above this many variables.
pub const EXACT_VARIABLE_CAP: usize = 250;

/// Primal feasibility tolerance for floating-point solutions.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-7;

/// Relative tolerance for comparing optimal objective values.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
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

#[derive(Clone, Debug)]
pub struct Variable<T> {
    pub name: String,
    /// `None` is minus infinity.
    pub lower: Option<T>,
    /// `None` is plus infinity.
    pub upper: Option<T>,
}

#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub name: String,
    pub terms: Vec<(VarId, T)>,
    pub sense: Sense,
    pub rhs: T,
}

/// `minimize objective · x + offset` subject to linear constraints and bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    variables: Vec<Variable<T>>,
    objective: Vec<T>,
    offset: T,
    constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> Default for LinearProgram<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new() -> Self {
        LinearProgram {
            variables: Vec::new(),
            objective: Vec::new(),
            offset: T::zero(),
            constraints: Vec::new(),
        }
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lower: Option<T>,
        upper: Option<T>,
    ) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.objective.push(T::zero());
        VarId(self.variables.len() - 1)
    }

    /// Variable bounded below by zero, unbounded above.
    pub fn add_nonneg(&mut self, name: impl Into<String>) -> VarId {
        self.add_variable(name, Some(T::zero()), None)
    }

    pub fn add_free(&mut self, name: impl Into<String>) -> VarId {
        self.add_variable(name, None, None)
    }

    /// Adds `coef` to the objective coefficient of `var`.
    pub fn add_objective(&mut self, var: VarId, coef: T) {
        let slot = &mut self.objective[var.0];
        *slot = slot.clone() + coef;
    }

    pub fn add_objective_offset(&mut self, value: T) {
        self.offset = self.offset.clone() + value;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, T)>,
        sense: Sense,
        rhs: T,
    ) {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
    }

    pub fn variables(&self) -> &[Variable<T>] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn offset(&self) -> &T {
        &self.offset
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Every constraint references a declared variable.
    pub fn validate(&self) -> Result<()> {
        for c in &self.constraints {
            if let Some((v, _)) = c.terms.iter().find(|(v, _)| v.0 >= self.variables.len()) {
                return Err(Error::invalid(format!(
                    "constraint {} references undeclared variable {}",
                    c.name, v.0
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate_objective(&self, values: &[T]) -> T {
        self.objective
            .iter()
            .zip(values)
            .fold(self.offset.clone(), |acc, (c, x)| {
                acc + c.clone() * x.clone()
            })
    }

    /// Largest violation of any constraint or bound at `values`, scaled by
    /// `max(1, |rhs|)` per row.
    pub fn max_violation(&self, values: &[T]) -> T {
        let mut worst = T::zero();
        for (var, x) in self.variables.iter().zip(values) {
            if let Some(l) = &var.lower {
                worst = T::max_of(worst, l.clone() - x.clone());
            }
            if let Some(u) = &var.upper {
                worst = T::max_of(worst, x.clone() - u.clone());
            }
        }
        for c in &self.constraints {
            let lhs = c.terms.iter().fold(T::zero(), |acc, (v, a)| {
                acc + a.clone() * values[v.0].clone()
            });
            let gap = lhs - c.rhs.clone();
            let violation = match c.sense {
                Sense::Le => gap,
                Sense::Ge => -gap,
                Sense::Eq => gap.abs(),
            };
            let scale = T::max_of(T::one(), c.rhs.abs());
            worst = T::max_of(worst, violation / scale);
        }
        worst
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearProgram<U> {
        LinearProgram {
            variables: self
                .variables
                .iter()
                .map(|v| Variable {
                    name: v.name.clone(),
                    lower: v.lower.as_ref().map(&f),
                    upper: v.upper.as_ref().map(&f),
                })
                .collect(),
            objective: self.objective.iter().map(&f).collect(),
            offset: f(&self.offset),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    name: c.name.clone(),
                    terms: c.terms.iter().map(|(v, a)| (*v, f(a))).collect(),
                    sense: c.sense,
                    rhs: f(&c.rhs),
                })
                .collect(),
        }
    }
}

/// Human-readable dump in CPLEX LP style; for debugging only.
impl<T: Scalar> fmt::Display for LinearProgram<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |f: &mut fmt::Formatter<'_>, first: bool, coef: &T, name: &str| -> fmt::Result {
            let sign = if coef.is_negative() {
                " -"
            } else if first {
                ""
            } else {
                " +"
            };
            write!(f, "{sign} {} {name}", coef.abs())
        };
        writeln!(f, "Minimize")?;
        write!(f, " obj:")?;
        let mut first = true;
        for (k, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                term(f, first, c, &self.variables[k].name)?;
                first = false;
            }
        }
        if !self.offset.is_zero() || first {
            write!(f, " + {}", self.offset)?;
        }
        writeln!(f)?;
        writeln!(f, "Subject To")?;
        for c in &self.constraints {
            write!(f, " {}:", c.name)?;
            for (k, (v, a)) in c.terms.iter().enumerate() {
                term(f, k == 0, a, &self.variables[v.0].name)?;
            }
            writeln!(f, " {} {}", c.sense, c.rhs)?;
        }
        writeln!(f, "Bounds")?;
        for v in &self.variables {
            match (&v.lower, &v.upper) {
                (Some(l), Some(u)) => writeln!(f, " {l} <= {} <= {u}", v.name)?,
                (Some(l), None) => writeln!(f, " {} >= {l}", v.name)?,
                (None, Some(u)) => writeln!(f, " -inf <= {} <= {u}", v.name)?,
                (None, None) => writeln!(f, " {} free", v.name)?,
            }
        }
        writeln!(f, "End")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Meaningful only when `status` is `Optimal`.
    pub objective: T,
    /// One value per variable; empty unless `status` is `Optimal`.
    pub values: Vec<T>,
}

impl<T: Scalar> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self, var: VarId) -> &T {
        &self.values[var.0]
    }

    /// The solution itself when optimal, otherwise a typed error.
    pub fn into_optimal(self) -> Result<Self> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            other => Err(Error::NotOptimal(other)),
        }
    }
}

/// Floating-point solve. An `Optimal` verdict is certified against the
/// original constraints at [`FEASIBILITY_TOLERANCE`]; a point that fails the
/// check is reported as a solver failure.
pub fn solve(lp: &LinearProgram<f64>) -> Result<LpSolution<f64>> {
    lp.validate()?;
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("objective coefficients must be finite"));
    }
    let sol = simplex::solve(lp)?;
    if sol.is_optimal() {
        let violation = lp.max_violation(&sol.values);
        // Also rejects NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(violation <= FEASIBILITY_TOLERANCE) {
            return Err(Error::SolverFailure(format!(
                "optimal point violates constraints by {violation:e}"
            )));
        }
    }
    Ok(sol)
}

/// Exact rational solve for small programs; used to certify the float path.
pub fn solve_exact(lp: &LinearProgram<Rational>) -> Result<LpSolution<Rational>> {
    lp.validate()?;
    if lp.num_variables() > EXACT_VARIABLE_CAP {
        return Err(Error::TooLarge {
            variables: lp.num_variables(),
            cap: EXACT_VARIABLE_CAP,
        });
    }
    let sol = simplex::solve(lp)?;
    if sol.is_optimal() && !lp.max_violation(&sol.values).is_zero() {
        return Err(Error::SolverFailure(
            "exact solution violates constraints".into(),
        ));
    }
    Ok(sol)
}

/// Scalars with a solving path: floats via [`solve`], rationals via [`solve_exact`].
pub trait Solvable: Scalar {
    fn solve_lp(lp: &LinearProgram<Self>) -> Result<LpSolution<Self>>;
}

impl Solvable for f64 {
    fn solve_lp(lp: &LinearProgram<f64>) -> Result<LpSolution<f64>> {
        solve(lp)
    }
}

impl Solvable for Rational {
    fn solve_lp(lp: &LinearProgram<Rational>) -> Result<LpSolution<Rational>> {
        solve_exact(lp)
    }
}

/// Objective agreement in the `1e-6 · max(1, |a|)` sense.
pub fn objectives_agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= OBJECTIVE_TOLERANCE * a.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational_int, Rational};

    fn single_var<T: Scalar>(lower: Option<T>, upper: Option<T>) -> (LinearProgram<T>, VarId) {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x", lower, upper);
        (lp, x)
    }

    #[test]
    fn minimizes_against_lower_constraint() {
        let (mut lp, x) = single_var::<f64>(None, None);
        lp.add_objective(x, 1.0);
        lp.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 3.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-9);

        let exact = solve_exact(&lp.map(|v| Rational::from_float(*v).unwrap())).unwrap();
        assert_eq!(exact.objective, rational_int(3));
    }

    #[test]
    fn detects_infeasibility() {
        let (mut lp, x) = single_var::<f64>(None, None);
        lp.add_objective(x, 1.0);
        lp.add_constraint("lo", vec![(x, 1.0)], Sense::Ge, 3.0);
        lp.add_constraint("hi", vec![(x, 1.0)], Sense::Le, 2.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
        let exact = solve_exact(&lp.map(|v| Rational::from_float(*v).unwrap())).unwrap();
        assert_eq!(exact.status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unboundedness() {
        let (mut lp, x) = single_var::<f64>(Some(0.0), None);
        lp.add_objective(x, -1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
        let exact = solve_exact(&lp.map(|v| Rational::from_float(*v).unwrap())).unwrap();
        assert_eq!(exact.status, LpStatus::Unbounded);
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let (mut lp, x) = single_var::<f64>(Some(2.0), Some(1.0));
        lp.add_objective(x, 1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn handles_free_and_upper_only_variables() {
        // min x - y  s.t. x + y = 1, x free, y <= 4  ->  x = -3, y = 4.
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_free("x");
        let y = lp.add_variable("y", None, Some(4.0));
        lp.add_objective(x, 1.0);
        lp.add_objective(y, -1.0);
        lp.add_constraint("sum", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 1.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective + 7.0).abs() < 1e-9);
        assert!((sol.values[0] + 3.0).abs() < 1e-9);
    }

    #[test]
    fn bounded_variables_flip() {
        // max x + y with x, y in [0, 2] and x + 2y <= 5  ->  x = 2, y = 1.5.
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_variable("x", Some(0.0), Some(2.0));
        let y = lp.add_variable("y", Some(0.0), Some(2.0));
        lp.add_objective(x, -1.0);
        lp.add_objective(y, -1.0);
        lp.add_constraint("c", vec![(x, 1.0), (y, 2.0)], Sense::Le, 5.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective + 3.5).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.add_objective(x, 2.0);
        lp.add_objective(y, 1.0);
        for k in 0..3 {
            lp.add_constraint(format!("dup{k}"), vec![(x, 1.0), (y, 1.0)], Sense::Eq, 4.0);
        }
        lp.add_constraint("ycap", vec![(y, 1.0)], Sense::Le, 3.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective - 5.0).abs() < 1e-9);
    }

    #[test]
    fn offset_is_part_of_objective() {
        let (mut lp, x) = single_var::<f64>(Some(1.0), Some(5.0));
        lp.add_objective(x, 1.0);
        lp.add_objective_offset(-10.0);
        assert!((solve(&lp).unwrap().objective + 9.0).abs() < 1e-12);
    }

    #[test]
    fn exact_solve_refuses_large_programs() {
        let mut lp = LinearProgram::<Rational>::new();
        for k in 0..=EXACT_VARIABLE_CAP {
            lp.add_nonneg(format!("v{k}"));
        }
        assert!(matches!(solve_exact(&lp), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn undeclared_variable_is_rejected() {
        let mut lp = LinearProgram::<f64>::new();
        lp.add_constraint("bad", vec![(VarId(3), 1.0)], Sense::Le, 1.0);
        assert!(matches!(solve(&lp), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dump_is_readable() {
        let (mut lp, x) = single_var::<f64>(Some(0.0), None);
        lp.add_objective(x, 1.0);
        lp.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 3.0);
        let text = lp.to_string();
        assert!(text.contains("Minimize"));
        assert!(text.contains(" c: 1 x >= 3"));
    }
}
