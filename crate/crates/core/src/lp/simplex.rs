//! Dense two-phase primal simplex with bounded variables.
//!
//! The program is rewritten as `A y = b, 0 <= y <= u` with `b >= 0`, slack
//! columns for inequalities and artificial columns wherever no slack can start
//! basic. Pricing is Dantzig's rule, switching to Bland's rule during runs of
//! degenerate pivots. The ratio test is Harris' two-pass test; with exact
//! scalars its tolerance is zero and it reduces to the textbook test.

use super::{LinearProgram, LpSolution, LpStatus, Sense};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How each original variable is recovered from standard-form columns.
enum Recover<T> {
    /// `x = base + y_col`
    Shifted { col: usize, base: T },
    /// `x = base - y_col`
    Mirrored { col: usize, base: T },
    /// `x = y_pos - y_neg`
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum State {
    Basic,
    Lower,
    Upper,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    xb: Vec<T>,
    basis: Vec<usize>,
    state: Vec<State>,
    upper: Vec<Option<T>>,
    cost: Vec<T>,
    reduced: Vec<T>,
    barred: Vec<bool>,
    artificial: Vec<bool>,
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 25;

pub(super) fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
    // Column layout for the structural variables.
    let mut recover = Vec::with_capacity(lp.num_variables());
    let mut col_upper: Vec<Option<T>> = Vec::new();
    let mut col_cost: Vec<T> = Vec::new();
    let obj = lp.objective();
    for (k, var) in lp.variables().iter().enumerate() {
        let c = obj[k].clone();
        match (&var.lower, &var.upper) {
            (Some(l), u) => {
                let width = match u {
                    Some(u) => {
                        let w = u.clone() - l.clone();
                        if w.is_negative_beyond_tolerance() {
                            return Ok(infeasible());
                        }
                        Some(T::max_of(w, T::zero()))
                    }
                    None => None,
                };
                recover.push(Recover::Shifted {
                    col: col_upper.len(),
                    base: l.clone(),
                });
                col_upper.push(width);
                col_cost.push(c);
            }
            (None, Some(u)) => {
                recover.push(Recover::Mirrored {
                    col: col_upper.len(),
                    base: u.clone(),
                });
                col_upper.push(None);
                col_cost.push(-c);
            }
            (None, None) => {
                let pos = col_upper.len();
                recover.push(Recover::Split { pos, neg: pos + 1 });
                col_upper.push(None);
                col_upper.push(None);
                col_cost.push(c.clone());
                col_cost.push(-c);
            }
        }
    }
    let n_struct = col_upper.len();

    // Rows over structural columns, rhs adjusted for the substitutions.
    let m = lp.num_constraints();
    let mut dense: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut rhs: Vec<T> = Vec::with_capacity(m);
    let mut senses: Vec<Sense> = Vec::with_capacity(m);
    for con in lp.constraints() {
        let mut row = vec![T::zero(); n_struct];
        let mut b = con.rhs.clone();
        for (v, a) in &con.terms {
            match &recover[v.0] {
                Recover::Shifted { col, base } => {
                    row[*col] = row[*col].clone() + a.clone();
                    b = b - a.clone() * base.clone();
                }
                Recover::Mirrored { col, base } => {
                    row[*col] = row[*col].clone() - a.clone();
                    b = b - a.clone() * base.clone();
                }
                Recover::Split { pos, neg } => {
                    row[*pos] = row[*pos].clone() + a.clone();
                    row[*neg] = row[*neg].clone() - a.clone();
                }
            }
        }
        dense.push(row);
        rhs.push(b);
        senses.push(con.sense);
    }

    // Slack and artificial columns.
    let n_slack = senses.iter().filter(|s| **s != Sense::Eq).count();
    let mut slack_of_row: Vec<Option<(usize, T)>> = Vec::with_capacity(m);
    let mut next = n_struct;
    for s in &senses {
        match s {
            Sense::Le => {
                slack_of_row.push(Some((next, T::one())));
                next += 1;
            }
            Sense::Ge => {
                slack_of_row.push(Some((next, -T::one())));
                next += 1;
            }
            Sense::Eq => slack_of_row.push(None),
        }
    }
    debug_assert_eq!(next, n_struct + n_slack);
    // Normalize b >= 0 and decide which rows need an artificial.
    let mut needs_art = Vec::with_capacity(m);
    for i in 0..m {
        let flip = rhs[i].is_negative();
        if flip {
            rhs[i] = -rhs[i].clone();
            for v in dense[i].iter_mut() {
                *v = -v.clone();
            }
            if let Some((_, sign)) = &mut slack_of_row[i] {
                *sign = -sign.clone();
            }
        }
        needs_art.push(!matches!(&slack_of_row[i], Some((_, sign)) if sign.is_positive()));
    }
    let n_art = needs_art.iter().filter(|x| **x).count();
    let ncols = n_struct + n_slack + n_art;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        xb: rhs.clone(),
        basis: Vec::with_capacity(m),
        state: vec![State::Lower; ncols],
        upper: col_upper,
        cost: col_cost,
        reduced: vec![T::zero(); ncols],
        barred: vec![false; ncols],
        artificial: vec![false; ncols],
    };
    tab.upper.resize(ncols, None);
    tab.cost.resize(ncols, T::zero());
    let mut art = n_struct + n_slack;
    for (i, mut row) in dense.into_iter().enumerate() {
        row.resize(ncols, T::zero());
        if let Some((col, sign)) = &slack_of_row[i] {
            row[*col] = sign.clone();
        }
        if needs_art[i] {
            row[art] = T::one();
            tab.artificial[art] = true;
            tab.basis.push(art);
            tab.state[art] = State::Basic;
            art += 1;
        } else {
            let (col, _) = slack_of_row[i]
                .as_ref()
                .expect("row without artificial has a slack");
            tab.basis.push(*col);
            tab.state[*col] = State::Basic;
        }
        tab.rows.push(row);
    }

    let max_iter = 50 * (m + ncols) + 1000;

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        let phase_one_cost: Vec<T> = (0..ncols)
            .map(|j| {
                if tab.artificial[j] {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        tab.price(&phase_one_cost);
        match tab.iterate(max_iter)? {
            Outcome::Optimal => {}
            Outcome::Unbounded => {
                return Err(Error::SolverFailure("phase one reported unbounded".into()));
            }
        }
        let infeasibility = (0..m)
            .filter(|&i| tab.artificial[tab.basis[i]])
            .fold(T::zero(), |acc, i| acc + tab.xb[i].clone());
        let scale = rhs.iter().fold(T::one(), |acc, b| T::max_of(acc, b.abs()));
        let threshold = if T::is_exact() {
            T::zero()
        } else {
            T::from_f64(super::FEASIBILITY_TOLERANCE).unwrap() * scale
        };
        if infeasibility > threshold {
            return Ok(infeasible());
        }
        tab.drive_out_artificials();
        for j in 0..ncols {
            if tab.artificial[j] {
                tab.barred[j] = true;
                tab.upper[j] = Some(T::zero());
            }
        }
    }

    // Phase 2.
    let cost = tab.cost.clone();
    tab.price(&cost);
    match tab.iterate(max_iter)? {
        Outcome::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective: T::zero(),
                values: Vec::new(),
            })
        }
        Outcome::Optimal => {}
    }

    let mut y: Vec<T> = tab
        .state
        .iter()
        .zip(&tab.upper)
        .map(|(state, upper)| match state {
            State::Upper => upper.clone().unwrap_or_else(T::zero),
            State::Lower | State::Basic => T::zero(),
        })
        .collect();
    for (i, &col) in tab.basis.iter().enumerate() {
        let v = tab.xb[i].clone();
        // Clamp round-off just outside the column bounds.
        y[col] = if !T::is_exact() && v.is_negative() && !v.is_negative_beyond_tolerance() {
            T::zero()
        } else {
            v
        };
    }
    let values: Vec<T> = recover
        .iter()
        .map(|r| match r {
            Recover::Shifted { col, base } => base.clone() + y[*col].clone(),
            Recover::Mirrored { col, base } => base.clone() - y[*col].clone(),
            Recover::Split { pos, neg } => y[*pos].clone() - y[*neg].clone(),
        })
        .collect();
    let objective = lp.evaluate_objective(&values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        values,
    })
}

fn infeasible<T: Scalar>() -> LpSolution<T> {
    LpSolution {
        status: LpStatus::Infeasible,
        objective: T::zero(),
        values: Vec::new(),
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    /// Reduced costs `c_j - c_B · B⁻¹ A_j` for the given cost vector.
    fn price(&mut self, cost: &[T]) {
        self.reduced = cost.to_vec();
        for (i, &col) in self.basis.iter().enumerate() {
            let cb = cost[col].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    self.reduced[j] = self.reduced[j].clone() - cb.clone() * a.clone();
                }
            }
        }
        for &col in &self.basis {
            self.reduced[col] = T::zero();
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, bool)> {
        let tol = T::tolerance();
        let mut best: Option<(usize, bool, T)> = None;
        for j in 0..self.reduced.len() {
            if self.barred[j] {
                continue;
            }
            let d = &self.reduced[j];
            let (increase, score) = match self.state[j] {
                State::Basic => continue,
                State::Lower if *d < -tol.clone() => (true, -d.clone()),
                State::Upper if *d > tol => (false, d.clone()),
                _ => continue,
            };
            if bland {
                return Some((j, increase));
            }
            if best.as_ref().is_none_or(|(_, _, s)| score > *s) {
                best = Some((j, increase, score));
            }
        }
        best.map(|(j, inc, _)| (j, inc))
    }

    fn iterate(&mut self, max_iter: usize) -> Result<Outcome> {
        let ptol = T::pivot_tolerance();
        let ftol = T::tolerance();
        let mut degenerate = 0usize;
        for _ in 0..max_iter {
            let bland = degenerate >= DEGENERATE_RUN;
            let Some((q, increase)) = self.choose_entering(bland) else {
                return Ok(Outcome::Optimal);
            };
            let dir = if increase { T::one() } else { -T::one() };
            let m = self.rows.len();

            // Harris pass one: relaxed step bound.
            let mut relaxed: Option<T> = None;
            for i in 0..m {
                let a = dir.clone() * self.rows[i][q].clone();
                let limit = if a > ptol {
                    (self.xb[i].clone() + ftol.clone()) / a
                } else if a < -ptol.clone() {
                    match &self.upper[self.basis[i]] {
                        Some(u) => (u.clone() - self.xb[i].clone() + ftol.clone()) / (-a),
                        None => continue,
                    }
                } else {
                    continue;
                };
                let limit = T::max_of(limit, T::zero());
                relaxed = Some(match relaxed {
                    Some(r) => T::min_of(r, limit),
                    None => limit,
                });
            }
            // Pass two: among rows within the relaxed bound take the largest
            // pivot (or the smallest basic index under Bland's rule).
            let mut leave: Option<(usize, T, bool, T)> = None; // (row, step, to_upper, |a|)
            if let Some(bound) = &relaxed {
                for i in 0..m {
                    let a = dir.clone() * self.rows[i][q].clone();
                    let (step, to_upper) = if a > ptol {
                        (T::max_of(self.xb[i].clone(), T::zero()) / a.clone(), false)
                    } else if a < -ptol.clone() {
                        match &self.upper[self.basis[i]] {
                            Some(u) => (
                                T::max_of(u.clone() - self.xb[i].clone(), T::zero()) / (-a.clone()),
                                true,
                            ),
                            None => continue,
                        }
                    } else {
                        continue;
                    };
                    if step > *bound {
                        continue;
                    }
                    let mag = a.abs();
                    let better = match &leave {
                        None => true,
                        Some((r, best_step, _, best_mag)) => {
                            if T::is_exact() {
                                step < *best_step
                                    || (step == *best_step
                                        && if bland {
                                            self.basis[i] < self.basis[*r]
                                        } else {
                                            mag > *best_mag
                                        })
                            } else if bland {
                                self.basis[i] < self.basis[*r]
                            } else {
                                mag > *best_mag
                            }
                        }
                    };
                    if better {
                        leave = Some((i, step, to_upper, mag));
                    }
                }
            }

            let flip_step = self.upper[q].clone();
            let use_flip = match (&flip_step, &leave) {
                (Some(u), Some((_, step, _, _))) => *u <= *step,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => return Ok(Outcome::Unbounded),
            };

            let step = if use_flip {
                flip_step.clone().unwrap()
            } else {
                leave.as_ref().unwrap().1.clone()
            };
            if step > ftol {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            let delta = dir.clone() * step.clone();
            if !delta.is_zero() {
                for i in 0..m {
                    let a = &self.rows[i][q];
                    if !a.is_zero() {
                        self.xb[i] = self.xb[i].clone() - a.clone() * delta.clone();
                    }
                }
            }
            if use_flip {
                self.state[q] = if increase { State::Upper } else { State::Lower };
                continue;
            }
            let (r, _, to_upper, _) = leave.unwrap();
            let entering_value = match self.state[q] {
                State::Upper => self.upper[q].clone().unwrap() + delta,
                _ => delta,
            };
            let leaving = self.basis[r];
            self.pivot(r, q);
            self.xb[r] = entering_value;
            self.state[leaving] = if to_upper { State::Upper } else { State::Lower };
        }
        Err(Error::SolverFailure(format!(
            "iteration limit {max_iter} reached"
        )))
    }

    /// Gauss-Jordan pivot on `(r, q)`; updates rows, reduced costs and basis.
    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.rows[r][q].clone();
        let mut nz: Vec<usize> = Vec::new();
        for (j, v) in self.rows[r].iter_mut().enumerate() {
            if !v.is_zero() {
                *v = v.clone() / piv.clone();
                nz.push(j);
            }
        }
        self.rows[r][q] = T::one();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let snap = T::is_exact();
        let dust = T::from_f64(1e-13).unwrap_or_else(T::zero);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                let v = row[j].clone() - f.clone() * pivot_row[j].clone();
                row[j] = if !snap && v.abs() < dust {
                    T::zero()
                } else {
                    v
                };
            }
            row[q] = T::zero();
        }
        let f = self.reduced[q].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.reduced[j] = self.reduced[j].clone() - f.clone() * pivot_row[j].clone();
            }
        }
        self.reduced[q] = T::zero();
        self.rows[r] = pivot_row;
        self.basis[r] = q;
        self.state[q] = State::Basic;
    }

    /// After phase one, replace zero-valued basic artificials by structural or
    /// slack columns. Rows where no replacement exists are redundant.
    fn drive_out_artificials(&mut self) {
        let ptol = T::pivot_tolerance();
        for r in 0..self.rows.len() {
            if !self.artificial[self.basis[r]] {
                continue;
            }
            let mut best: Option<(usize, T)> = None;
            for (j, a) in self.rows[r].iter().enumerate() {
                if self.artificial[j] || self.state[j] == State::Basic {
                    continue;
                }
                let mag = a.abs();
                if mag > ptol && best.as_ref().is_none_or(|(_, b)| mag > *b) {
                    best = Some((j, mag));
                }
            }
            if let Some((q, _)) = best {
                let value = match self.state[q] {
                    State::Upper => self.upper[q].clone().unwrap(),
                    _ => T::zero(),
                };
                let leaving = self.basis[r];
                self.pivot(r, q);
                self.xb[r] = value;
                self.state[leaving] = State::Lower;
            }
        }
    }
}
