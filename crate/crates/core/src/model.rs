//! Tri-objective binary programs.
//!
//! A [`Problem`] stores every objective in minimization form. Objectives that
//! were ingested as maximization are negated exactly once on construction and
//! the original sense is kept so reported values can be converted back.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub mod generate;

/// Number of objectives. Fixed for this crate.
pub const NUM_OBJECTIVES: usize = 3;

/// An objective point in minimization form.
pub type Point = [i64; NUM_OBJECTIVES];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// Maps a value between original and minimization form. Self-inverse.
    pub fn convert(self, value: i64) -> i64 {
        match self {
            Sense::Min => value,
            Sense::Max => -value,
        }
    }

    pub fn convert_f64(self, value: f64) -> f64 {
        match self {
            Sense::Min => value,
            Sense::Max => -value,
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Min => "min",
            Sense::Max => "max",
        })
    }
}

impl FromStr for Sense {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "min" => Ok(Sense::Min),
            "max" => Ok(Sense::Max),
            other => Err(format!("unknown objective sense '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

impl RowSense {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            RowSense::Le => lhs <= rhs,
            RowSense::Ge => lhs >= rhs,
            RowSense::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for RowSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        })
    }
}

impl FromStr for RowSense {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "<=" => Ok(RowSense::Le),
            ">=" => Ok(RowSense::Ge),
            "=" | "==" => Ok(RowSense::Eq),
            other => Err(format!("unknown row sense '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<i64>,
    pub sense: RowSense,
    pub rhs: i64,
}

impl Constraint {
    pub fn new(coeffs: Vec<i64>, sense: RowSense, rhs: i64) -> Self {
        Constraint { coeffs, sense, rhs }
    }

    pub fn activity(&self, x: &[u8]) -> i64 {
        self.coeffs
            .iter()
            .zip(x)
            .filter(|(_, &xj)| xj == 1)
            .map(|(&a, _)| a)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Knapsack,
    Assignment { tasks: usize },
    General,
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Knapsack => "knapsack",
            ProblemKind::Assignment { .. } => "assignment",
            ProblemKind::General => "general",
        }
    }
}

/// A tri-objective binary program `min Cx` subject to row constraints and
/// `x ∈ {0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    kind: ProblemKind,
    n: usize,
    senses: [Sense; NUM_OBJECTIVES],
    /// Objective rows in minimization form.
    objectives: [Vec<i64>; NUM_OBJECTIVES],
    constraints: Vec<Constraint>,
}

impl Problem {
    /// Builds a problem from objective rows given in their original sense.
    pub fn new(
        kind: ProblemKind,
        senses: [Sense; NUM_OBJECTIVES],
        original_objectives: [Vec<i64>; NUM_OBJECTIVES],
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let n = original_objectives[0].len();
        let mut objectives = original_objectives;
        for (row, sense) in objectives.iter_mut().zip(senses) {
            for c in row.iter_mut() {
                *c = sense.convert(*c);
            }
        }
        let problem = Problem {
            kind,
            n,
            senses,
            objectives,
            constraints,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Knapsack with profits to be maximized (`profits[k][j]` is the k-th
    /// profit of item j).
    pub fn knapsack(
        profits: [Vec<i64>; NUM_OBJECTIVES],
        weights: Vec<i64>,
        capacity: i64,
    ) -> Result<Self> {
        Problem::new(
            ProblemKind::Knapsack,
            [Sense::Max; NUM_OBJECTIVES],
            profits,
            vec![Constraint::new(weights, RowSense::Le, capacity)],
        )
    }

    /// Assignment problem with costs to be minimized. `costs[k]` is a
    /// row-major `tasks × tasks` matrix; variable `r * tasks + l` assigns
    /// task `l` to agent `r`.
    pub fn assignment(tasks: usize, costs: [Vec<i64>; NUM_OBJECTIVES]) -> Result<Self> {
        Problem::new(
            ProblemKind::Assignment { tasks },
            [Sense::Min; NUM_OBJECTIVES],
            costs,
            assignment_constraints(tasks),
        )
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Validation(
                "problem needs at least one variable".into(),
            ));
        }
        for (k, row) in self.objectives.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::Validation(format!(
                    "objective {} has {} coefficients, expected {}",
                    k + 1,
                    row.len(),
                    self.n
                )));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != self.n {
                return Err(Error::Validation(format!(
                    "constraint {} has {} coefficients, expected {}",
                    i + 1,
                    row.coeffs.len(),
                    self.n
                )));
            }
        }
        match self.kind {
            ProblemKind::Knapsack => {
                let [row] = self.constraints.as_slice() else {
                    return Err(Error::Validation(
                        "knapsack needs exactly one capacity constraint".into(),
                    ));
                };
                if row.sense != RowSense::Le {
                    return Err(Error::Validation("knapsack constraint must be <=".into()));
                }
                if let Some(w) = row.coeffs.iter().find(|&&w| w < 0) {
                    return Err(Error::Validation(format!("negative knapsack weight {w}")));
                }
                if row.rhs < 0 {
                    return Err(Error::Validation(format!(
                        "negative knapsack capacity {}",
                        row.rhs
                    )));
                }
                for k in 0..NUM_OBJECTIVES {
                    if let Some(&v) = self.original_row(k).iter().find(|&&v| v < 0) {
                        return Err(Error::Validation(format!("negative knapsack profit {v}")));
                    }
                }
            }
            ProblemKind::Assignment { tasks } => {
                if tasks == 0 || tasks * tasks != self.n {
                    return Err(Error::Validation(format!(
                        "assignment with {tasks} tasks needs {} variables, got {}",
                        tasks * tasks,
                        self.n
                    )));
                }
                if self.constraints != assignment_constraints(tasks) {
                    return Err(Error::Validation(
                        "assignment constraints must be the agent and task equality rows".into(),
                    ));
                }
            }
            ProblemKind::General => {}
        }
        Ok(())
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of constraint rows.
    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn senses(&self) -> [Sense; NUM_OBJECTIVES] {
        self.senses
    }

    /// Objective rows in minimization form.
    pub fn objectives(&self) -> &[Vec<i64>; NUM_OBJECTIVES] {
        &self.objectives
    }

    /// Objective row `k` in its original sense.
    pub fn original_row(&self, k: usize) -> Vec<i64> {
        self.objectives[k]
            .iter()
            .map(|&c| self.senses[k].convert(c))
            .collect()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Minimization-form objective column of variable `j`.
    pub fn column(&self, j: usize) -> Point {
        [
            self.objectives[0][j],
            self.objectives[1][j],
            self.objectives[2][j],
        ]
    }

    /// Knapsack weights and capacity, if this is a knapsack.
    pub fn knapsack_data(&self) -> Option<(&[i64], i64)> {
        match self.kind {
            ProblemKind::Knapsack => {
                let row = &self.constraints[0];
                Some((&row.coeffs, row.rhs))
            }
            _ => None,
        }
    }

    fn check_len(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        if let Some(&v) = x.iter().find(|&&v| v > 1) {
            return Err(Error::Validation(format!("non-binary entry {v}")));
        }
        Ok(())
    }

    /// `C·x` in minimization form.
    pub fn evaluate(&self, x: &[u8]) -> Result<Point> {
        self.check_len(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[u8]) -> Point {
        let mut y = [0i64; NUM_OBJECTIVES];
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = self.objectives[k]
                .iter()
                .zip(x)
                .filter(|(_, &xj)| xj == 1)
                .map(|(&c, _)| c)
                .sum();
        }
        y
    }

    pub fn is_feasible(&self, x: &[u8]) -> Result<bool> {
        self.check_len(x)?;
        Ok(self.is_feasible_unchecked(x))
    }

    pub(crate) fn is_feasible_unchecked(&self, x: &[u8]) -> bool {
        self.constraints
            .iter()
            .all(|row| row.sense.holds(row.activity(x), row.rhs))
    }

    /// Converts a minimization-form point to the original objective senses.
    pub fn to_original(&self, y: Point) -> Point {
        to_original(self.senses, y)
    }
}

pub fn to_original(senses: [Sense; NUM_OBJECTIVES], y: Point) -> Point {
    [
        senses[0].convert(y[0]),
        senses[1].convert(y[1]),
        senses[2].convert(y[2]),
    ]
}

/// Agent rows `Σ_l x_rl = 1` followed by task rows `Σ_r x_rl = 1`.
pub fn assignment_constraints(tasks: usize) -> Vec<Constraint> {
    let n = tasks * tasks;
    let mut rows = Vec::with_capacity(2 * tasks);
    for r in 0..tasks {
        let mut coeffs = vec![0; n];
        coeffs[r * tasks..(r + 1) * tasks].fill(1);
        rows.push(Constraint::new(coeffs, RowSense::Eq, 1));
    }
    for l in 0..tasks {
        let mut coeffs = vec![0; n];
        for r in 0..tasks {
            coeffs[r * tasks + l] = 1;
        }
        rows.push(Constraint::new(coeffs, RowSense::Eq, 1));
    }
    rows
}

/// A binary assignment together with its objective point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub x: Vec<u8>,
    pub y: Point,
    pub feasible: bool,
}

impl Solution {
    pub fn new(problem: &Problem, x: Vec<u8>) -> Result<Self> {
        let y = problem.evaluate(&x)?;
        let feasible = problem.is_feasible_unchecked(&x);
        Ok(Solution { x, y, feasible })
    }

    pub(crate) fn new_unchecked(problem: &Problem, x: Vec<u8>) -> Self {
        let y = problem.evaluate_unchecked(&x);
        let feasible = problem.is_feasible_unchecked(&x);
        Solution { x, y, feasible }
    }

    /// The assignment as a string of `0`/`1` characters.
    pub fn bits(&self) -> String {
        bits_to_string(&self.x)
    }
}

pub fn bits_to_string(x: &[u8]) -> String {
    x.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

pub fn bits_from_str(s: &str) -> Option<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Four-item knapsack with the profit matrix used to illustrate path
    /// relinking. Unit weights, so `capacity = 4` admits every subset.
    pub fn p_matrix_knapsack(capacity: i64) -> Problem {
        Problem::knapsack(
            [vec![4, 2, 3, 6], vec![5, 3, 1, 8], vec![6, 4, 2, 7]],
            vec![1, 1, 1, 1],
            capacity,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::p_matrix_knapsack;
    use super::*;

    #[test]
    fn evaluate_p_matrix() {
        let p = p_matrix_knapsack(4);
        let y = p.evaluate(&[1, 0, 1, 0]).unwrap();
        assert_eq!(y, [-7, -6, -8]);
        assert_eq!(p.to_original(y), [7, 6, 8]);
        assert_eq!(p.evaluate(&[0, 0, 0, 0]).unwrap(), [0, 0, 0]);
        // column sums of the first three items
        assert_eq!(
            p.to_original(p.evaluate(&[1, 1, 1, 0]).unwrap()),
            [9, 9, 12]
        );
    }

    #[test]
    fn evaluate_rejects_bad_length() {
        let p = p_matrix_knapsack(4);
        assert!(matches!(
            p.evaluate(&[1, 0, 1]),
            Err(Error::Dimension {
                expected: 4,
                got: 3
            })
        ));
        assert!(p.is_feasible(&[1, 0, 1, 0, 1]).is_err());
        assert!(p.evaluate(&[1, 0, 2, 0]).is_err());
    }

    #[test]
    fn knapsack_feasibility() {
        let p = p_matrix_knapsack(2);
        assert!(p.is_feasible(&[1, 0, 1, 0]).unwrap());
        assert!(!p.is_feasible(&[1, 1, 1, 0]).unwrap());
    }

    #[test]
    fn assignment_feasibility() {
        let p =
            Problem::assignment(2, [vec![1, 2, 3, 4], vec![4, 3, 2, 1], vec![1, 1, 1, 1]]).unwrap();
        assert_eq!(p.m(), 4);
        assert!(p.is_feasible(&[1, 0, 0, 1]).unwrap());
        assert!(p.is_feasible(&[0, 1, 1, 0]).unwrap());
        assert!(!p.is_feasible(&[1, 1, 0, 0]).unwrap());
        assert!(!p.is_feasible(&[0, 0, 0, 0]).unwrap());
    }

    #[test]
    fn sense_conversion_is_involution() {
        for v in [-5, 0, 17] {
            for s in [Sense::Min, Sense::Max] {
                assert_eq!(s.convert(s.convert(v)), v);
            }
        }
        let p = p_matrix_knapsack(4);
        assert_eq!(p.original_row(0), vec![4, 2, 3, 6]);
        assert_eq!(p.objectives()[0], vec![-4, -2, -3, -6]);
    }

    #[test]
    fn validation_errors() {
        assert!(Problem::knapsack([vec![1], vec![1], vec![1]], vec![-1], 3).is_err());
        assert!(Problem::knapsack([vec![1], vec![1], vec![1]], vec![1], -1).is_err());
        assert!(Problem::knapsack([vec![1, 2], vec![1], vec![1]], vec![1, 1], 1).is_err());
        assert!(Problem::knapsack([vec![], vec![], vec![]], vec![], 1).is_err());
        assert!(Problem::assignment(2, [vec![1; 3], vec![1; 3], vec![1; 3]]).is_err());
        let bad_rows = Problem::new(
            ProblemKind::Assignment { tasks: 2 },
            [Sense::Min; 3],
            [vec![1; 4], vec![1; 4], vec![1; 4]],
            vec![Constraint::new(vec![1; 4], RowSense::Eq, 2)],
        );
        assert!(bad_rows.is_err());
    }
}
