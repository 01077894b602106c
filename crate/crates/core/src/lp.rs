//! Bounded-variable primal simplex for LPs over the box `0 ≤ x ≤ 1`.
//!
//! The solver works on a dense tableau. Inequality rows get a slack column,
//! rows whose slack cannot start basic get an artificial column, and a
//! phase-1 pass drives the artificials to zero before they are fixed at
//! zero for phase 2. Entering columns are picked by largest reduced cost
//! until a run of degenerate pivots exceeds the stall threshold, after which
//! Bland's rule is used for the rest of the phase. Every tie is broken by the
//! lowest index, so repeated solves are bit-identical.

use crate::error::{Error, Result};
use crate::model::{Problem, RowSense, NUM_OBJECTIVES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Constraint and bound feasibility.
    pub feas: f64,
    /// Objective-space comparisons.
    pub obj: f64,
    /// Distance to {0, 1} below which a component counts as integral.
    pub int: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas: 1e-7,
            obj: 1e-6,
            int: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolveResult {
    pub status: LpStatus,
    /// Structural variable values, empty unless optimal.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// A row `coeffs · x (sense) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub sense: RowSense,
    pub rhs: f64,
}

const PIVOT_TOL: f64 = 1e-9;
const STALL_THRESHOLD: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NonBasic {
    AtLower,
    AtUpper,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows × cols`, row-major, holds `B⁻¹A`.
    body: Vec<f64>,
    /// Current values of the basic variables.
    beta: Vec<f64>,
    basis: Vec<usize>,
    /// `Some(state)` for nonbasic columns, `None` for basic ones.
    state: Vec<Option<NonBasic>>,
    upper: Vec<f64>,
    reduced: Vec<f64>,
    iterations: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.body[i * self.cols + j]
    }

    fn price(&mut self, costs: &[f64]) {
        self.reduced.copy_from_slice(costs);
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                let row = &self.body[i * self.cols..(i + 1) * self.cols];
                for (d, a) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    fn entering(&self, opt_tol: f64, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cols {
            let dir = match self.state[j] {
                None => continue,
                Some(_) if self.upper[j] <= 0.0 => continue,
                Some(NonBasic::AtLower) if self.reduced[j] < -opt_tol => 1.0,
                Some(NonBasic::AtUpper) if self.reduced[j] > opt_tol => -1.0,
                Some(_) => continue,
            };
            if bland {
                return Some((j, dir));
            }
            let score = self.reduced[j].abs();
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let p = self.at(r, j);
        for v in &mut self.body[r * cols..(r + 1) * cols] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.body[r * cols..(r + 1) * cols].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.at(i, j);
            if f != 0.0 {
                for (v, a) in self.body[i * cols..(i + 1) * cols]
                    .iter_mut()
                    .zip(&pivot_row)
                {
                    *v -= f * a;
                }
                self.body[i * cols + j] = 0.0;
            }
        }
        let f = self.reduced[j];
        if f != 0.0 {
            for (d, a) in self.reduced.iter_mut().zip(&pivot_row) {
                *d -= f * a;
            }
            self.reduced[j] = 0.0;
        }
    }

    fn run_phase(&mut self, costs: &[f64], max_iterations: usize) -> Result<PhaseOutcome> {
        self.price(costs);
        let scale = costs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let opt_tol = 1e-9 * (1.0 + scale);
        let mut bland = false;
        let mut degenerate_run = 0;
        loop {
            let Some((j, dir)) = self.entering(opt_tol, bland) else {
                return Ok(PhaseOutcome::Optimal);
            };
            self.iterations += 1;
            if self.iterations > max_iterations {
                return Err(Error::NumericalFailure {
                    iterations: self.iterations,
                });
            }

            // Ratio test. `step` is how far the entering variable moves.
            let mut step = self.upper[j];
            let mut leaving: Option<(usize, bool)> = None;
            for i in 0..self.rows {
                let alpha = dir * self.at(i, j);
                let b = self.basis[i];
                let limit = if alpha > PIVOT_TOL {
                    (self.beta[i].max(0.0)) / alpha
                } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                    (self.upper[b] - self.beta[i]).max(0.0) / -alpha
                } else {
                    continue;
                };
                let better = match leaving {
                    _ if limit < step => true,
                    Some((r, _)) if limit == step => b < self.basis[r],
                    _ => false,
                };
                if better {
                    step = limit;
                    leaving = Some((i, alpha > 0.0));
                }
            }
            if step.is_infinite() {
                return Ok(PhaseOutcome::Unbounded);
            }

            if step <= PIVOT_TOL {
                degenerate_run += 1;
                if degenerate_run > STALL_THRESHOLD {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }

            for i in 0..self.rows {
                let a = self.at(i, j);
                if a != 0.0 {
                    self.beta[i] -= dir * step * a;
                }
            }
            let entering_value = match self.state[j] {
                Some(NonBasic::AtLower) => step,
                _ => self.upper[j] - step,
            };

            match leaving {
                None => {
                    self.state[j] = Some(match self.state[j] {
                        Some(NonBasic::AtLower) => NonBasic::AtUpper,
                        _ => NonBasic::AtLower,
                    });
                }
                Some((r, to_lower)) => {
                    let out = self.basis[r];
                    self.state[out] = Some(if to_lower {
                        NonBasic::AtLower
                    } else {
                        NonBasic::AtUpper
                    });
                    self.pivot(r, j);
                    self.basis[r] = j;
                    self.state[j] = None;
                    self.beta[r] = entering_value;
                }
            }
        }
    }

    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            Some(NonBasic::AtLower) => 0.0,
            Some(NonBasic::AtUpper) => self.upper[j],
            None => {
                let r = self
                    .basis
                    .iter()
                    .position(|&b| b == j)
                    .expect("basic column");
                self.beta[r]
            }
        }
    }
}

/// Solves `min c·x` subject to `rows` and `0 ≤ x ≤ 1`.
pub fn solve_box_lp(costs: &[f64], rows: &[LpRow]) -> Result<LpSolveResult> {
    let n = costs.len();
    let m = rows.len();
    for row in rows {
        if row.coeffs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: row.coeffs.len(),
            });
        }
    }

    // Column layout: structural, slacks, artificials.
    let slack_of: Vec<Option<usize>> = {
        let mut next = n;
        rows.iter()
            .map(|r| match r.sense {
                RowSense::Eq => None,
                _ => {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let slack_count = slack_of.iter().flatten().count();
    let mut signs = Vec::with_capacity(m);
    let mut needs_artificial = Vec::with_capacity(m);
    for row in rows {
        let flip = row.rhs < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        let slack_coeff = match row.sense {
            RowSense::Le => sign,
            RowSense::Ge => -sign,
            RowSense::Eq => 0.0,
        };
        signs.push(sign);
        needs_artificial.push(slack_coeff != 1.0);
    }
    let art_count = needs_artificial.iter().filter(|&&a| a).count();
    let cols = n + slack_count + art_count;

    let mut body = vec![0.0; m * cols];
    let mut beta = vec![0.0; m];
    let mut basis = vec![0; m];
    let mut upper = vec![f64::INFINITY; cols];
    upper[..n].fill(1.0);
    let mut next_art = n + slack_count;
    for (i, row) in rows.iter().enumerate() {
        let sign = signs[i];
        let line = &mut body[i * cols..(i + 1) * cols];
        for (v, a) in line.iter_mut().zip(&row.coeffs) {
            *v = sign * a;
        }
        if let Some(s) = slack_of[i] {
            line[s] = match row.sense {
                RowSense::Le => sign,
                _ => -sign,
            };
        }
        beta[i] = sign * row.rhs;
        if needs_artificial[i] {
            line[next_art] = 1.0;
            basis[i] = next_art;
            next_art += 1;
        } else {
            basis[i] = slack_of[i].expect("slack basis");
        }
    }
    let mut state = vec![Some(NonBasic::AtLower); cols];
    for &b in &basis {
        state[b] = None;
    }

    let mut tab = Tableau {
        rows: m,
        cols,
        body,
        beta,
        basis,
        state,
        upper,
        reduced: vec![0.0; cols],
        iterations: 0,
    };
    let max_iterations = 200 * (m + cols) + 1000;
    let scale = rows.iter().map(|r| r.rhs.abs()).fold(1.0f64, f64::max);

    if art_count > 0 {
        let mut phase1 = vec![0.0; cols];
        phase1[n + slack_count..].fill(1.0);
        tab.run_phase(&phase1, max_iterations)?;
        let infeasibility: f64 = (n + slack_count..cols).map(|j| tab.value(j)).sum();
        if infeasibility > 1e-7 * scale {
            return Ok(LpSolveResult {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::NAN,
                iterations: tab.iterations,
            });
        }
        for j in n + slack_count..cols {
            tab.upper[j] = 0.0;
        }
    }

    let mut phase2 = vec![0.0; cols];
    phase2[..n].copy_from_slice(costs);
    if let PhaseOutcome::Unbounded = tab.run_phase(&phase2, max_iterations)? {
        return Ok(LpSolveResult {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: f64::NEG_INFINITY,
            iterations: tab.iterations,
        });
    }

    let mut x = vec![0.0; n];
    for (j, xj) in x.iter_mut().enumerate() {
        *xj = tab.value(j).clamp(0.0, 1.0);
    }
    let objective = costs.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolveResult {
        status: LpStatus::Optimal,
        x,
        objective,
        iterations: tab.iterations,
    })
}

/// Solves the weighted-sum LP relaxations of one problem and counts them.
#[derive(Debug, Clone)]
pub struct LpSolver<'a> {
    problem: &'a Problem,
    rows: Vec<LpRow>,
    solves: usize,
    iterations: usize,
}

impl<'a> LpSolver<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        let rows = problem
            .constraints()
            .iter()
            .map(|c| LpRow {
                coeffs: c.coeffs.iter().map(|&a| a as f64).collect(),
                sense: c.sense,
                rhs: c.rhs as f64,
            })
            .collect();
        LpSolver {
            problem,
            rows,
            solves: 0,
            iterations: 0,
        }
    }

    /// Minimizes `(wᵀC)·x` over the LP relaxation.
    pub fn solve(&mut self, weights: &[f64; NUM_OBJECTIVES]) -> Result<LpSolveResult> {
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) || weights.iter().all(|&w| w == 0.0) {
            return Err(Error::Config(format!(
                "weights must be nonnegative and not all zero, got {weights:?}"
            )));
        }
        let objectives = self.problem.objectives();
        let costs: Vec<f64> = (0..self.problem.n())
            .map(|j| {
                (0..NUM_OBJECTIVES)
                    .map(|k| weights[k] * objectives[k][j] as f64)
                    .sum()
            })
            .collect();
        self.solves += 1;
        let result = solve_box_lp(&costs, &self.rows)?;
        self.iterations += result.iterations;
        Ok(result)
    }

    /// Number of LPs solved so far.
    pub fn solve_count(&self) -> usize {
        self.solves
    }

    pub fn total_iterations(&self) -> usize {
        self.iterations
    }
}

pub fn solve_weighted_lp(
    problem: &Problem,
    weights: &[f64; NUM_OBJECTIVES],
) -> Result<LpSolveResult> {
    LpSolver::new(problem).solve(weights)
}
