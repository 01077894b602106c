//! Extreme supported points of the LP relaxation.
//!
//! Weights are restricted to the triangle spanned by the normalized seeds
//! `(1,ε,ε)`, `(ε,1,ε)`, `(ε,ε,1)` and parameterized by their first two
//! components. For every known point the solver keeps the polygon of weights
//! where that point is best among the known set. The piecewise-linear
//! function `w ↦ min_{y ∈ S} w·y` is concave with breakpoints at the polygon
//! vertices, and so is the true LP value function, which never exceeds it.
//! Once the LP value at every polygon vertex matches the known minimum the
//! two functions coincide on the whole triangle and the set is complete.
//! Unconfirmed vertices are probed with a weighted LP; a strictly better
//! optimum becomes a new point.
//!
//! Points whose polygon has no area are not extreme (they lie on an edge or
//! face spanned by others) and are dropped from the result.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lp::{LpSolver, LpStatus, Tolerances};
use crate::model::{Problem, NUM_OBJECTIVES};

pub type Weight = [f64; NUM_OBJECTIVES];

#[derive(Debug, Clone, PartialEq)]
pub struct LbPoint {
    /// Fractional LP solution.
    pub x: Vec<f64>,
    /// `C·x` in minimization form.
    pub y: [f64; NUM_OBJECTIVES],
    /// A strictly positive weight for which `x` is optimal.
    pub weight: Weight,
}

impl LbPoint {
    pub fn is_integral(&self, tol: f64) -> bool {
        self.x
            .iter()
            .all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol)
    }
}

/// One weighted LP solved during enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightProbe {
    pub weight: Weight,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbSet {
    pub points: Vec<LbPoint>,
    pub lp_count: usize,
    pub probes: Vec<WeightProbe>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbConfig {
    /// Off-axis component of the seed weights.
    pub epsilon: f64,
    pub tolerances: Tolerances,
    /// Upper bound on LPs before giving up.
    pub max_lps: usize,
}

impl Default for LbConfig {
    fn default() -> Self {
        LbConfig {
            epsilon: 1e-4,
            tolerances: Tolerances::default(),
            max_lps: 200_000,
        }
    }
}

type Planar = [f64; 2];

const VERTEX_TOL: f64 = 1e-10;
const AREA_TOL: f64 = 1e-13;

fn lift(w: Planar) -> Weight {
    [w[0], w[1], 1.0 - w[0] - w[1]]
}

fn dot(w: &Weight, y: &[f64; NUM_OBJECTIVES]) -> f64 {
    w[0] * y[0] + w[1] * y[1] + w[2] * y[2]
}

fn seed_triangle(epsilon: f64) -> Vec<Planar> {
    let s = 1.0 + 2.0 * epsilon;
    let (hi, lo) = (1.0 / s, epsilon / s);
    // counter-clockwise in the (w1, w2) plane
    vec![[lo, lo], [hi, lo], [lo, hi]]
}

/// Keeps the part of `poly` where `a·w1 + b·w2 + c ≤ 0`.
fn clip(poly: &[Planar], a: f64, b: f64, c: f64) -> Vec<Planar> {
    let scale = a.abs() + b.abs() + c.abs();
    if scale == 0.0 {
        return poly.to_vec();
    }
    let tol = 1e-12 * scale;
    let f = |p: &Planar| a * p[0] + b * p[1] + c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let next = poly[(i + 1) % poly.len()];
        let (fc, fn_) = (f(&cur), f(&next));
        let cur_in = fc <= tol;
        let next_in = fn_ <= tol;
        if cur_in {
            out.push(cur);
        }
        if cur_in != next_in && (fc - fn_).abs() > 0.0 {
            let t = fc / (fc - fn_);
            let t = t.clamp(0.0, 1.0);
            out.push([
                cur[0] + t * (next[0] - cur[0]),
                cur[1] + t * (next[1] - cur[1]),
            ]);
        }
    }
    out.dedup_by(|p, q| (p[0] - q[0]).abs() < VERTEX_TOL && (p[1] - q[1]).abs() < VERTEX_TOL);
    if out.len() > 1 {
        let (first, last) = (out[0], out[out.len() - 1]);
        if (first[0] - last[0]).abs() < VERTEX_TOL && (first[1] - last[1]).abs() < VERTEX_TOL {
            out.pop();
        }
    }
    out
}

fn area(poly: &[Planar]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        s += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * s.abs()
}

/// Keeps the part of `poly` where `yi` is no worse than `other`.
fn clip_against(poly: &[Planar], yi: &[f64; 3], other: &[f64; 3]) -> Vec<Planar> {
    let d = [yi[0] - other[0], yi[1] - other[1], yi[2] - other[2]];
    clip(poly, d[0] - d[2], d[1] - d[2], d[2])
}

/// Weight region where `points[i]` is best among `points`.
fn region(points: &[LbPoint], i: usize, domain: &[Planar]) -> Vec<Planar> {
    let mut poly = domain.to_vec();
    for (j, other) in points.iter().enumerate() {
        if j == i {
            continue;
        }
        poly = clip_against(&poly, &points[i].y, &other.y);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Planar vertices with tolerance lookup through a coarse grid.
#[derive(Default)]
struct VertexSet {
    cells: HashMap<(i64, i64), Vec<Planar>>,
}

impl VertexSet {
    const CELL: f64 = 1e-8;

    fn cell(w: &Planar) -> (i64, i64) {
        (
            (w[0] / Self::CELL).floor() as i64,
            (w[1] / Self::CELL).floor() as i64,
        )
    }

    fn contains(&self, w: &Planar) -> bool {
        let (a, b) = Self::cell(w);
        (a - 1..=a + 1).any(|i| {
            (b - 1..=b + 1).any(|j| {
                self.cells
                    .get(&(i, j))
                    .is_some_and(|vs| vs.iter().any(|v| near(v, w)))
            })
        })
    }

    fn insert(&mut self, w: Planar) {
        self.cells.entry(Self::cell(&w)).or_default().push(w);
    }
}

fn same_point(a: &[f64; 3], b: &[f64; 3], tol: f64) -> bool {
    a.iter().zip(b).all(|(u, v)| (u - v).abs() <= tol)
}

fn near(a: &Planar, b: &Planar) -> bool {
    (a[0] - b[0]).abs() < VERTEX_TOL && (a[1] - b[1]).abs() < VERTEX_TOL
}

struct Enumerator<'a> {
    problem: &'a Problem,
    solver: LpSolver<'a>,
    config: LbConfig,
    points: Vec<LbPoint>,
    probes: Vec<WeightProbe>,
    probed: VertexSet,
    domain: Vec<Planar>,
    /// Weight region of each point among all points found so far.
    regions: Vec<Vec<Planar>>,
}

impl<'a> Enumerator<'a> {
    fn known_min(&self, w: &Weight) -> f64 {
        self.points
            .iter()
            .map(|p| dot(w, &p.y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Probes `w`; returns the index of a newly added point, if any.
    fn probe(&mut self, w: Planar) -> Result<Option<usize>> {
        if self.solver.solve_count() >= self.config.max_lps {
            return Err(Error::NumericalFailure {
                iterations: self.solver.solve_count(),
            });
        }
        let weight = lift(w);
        let result = self.solver.solve(&weight)?;
        match result.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(Error::Infeasible),
            LpStatus::Unbounded => return Err(Error::Unbounded),
        }
        self.probed.insert(w);
        self.probes.push(WeightProbe {
            weight,
            value: result.objective,
        });

        let mut y = [0.0; NUM_OBJECTIVES];
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = self.problem.objectives()[k]
                .iter()
                .zip(&result.x)
                .map(|(&c, &v)| c as f64 * v)
                .sum();
        }
        let tol = self.config.tolerances.obj;
        if dot(&weight, &y) >= self.known_min(&weight) - tol {
            return Ok(None);
        }
        if self.points.iter().any(|p| same_point(&p.y, &y, tol)) {
            return Ok(None);
        }
        for (region, p) in self.regions.iter_mut().zip(&self.points) {
            if !region.is_empty() {
                *region = clip_against(region, &p.y, &y);
            }
        }
        self.points.push(LbPoint {
            x: result.x,
            y,
            weight,
        });
        let k = self.points.len() - 1;
        self.regions.push(region(&self.points, k, &self.domain));
        Ok(Some(k))
    }

    fn run(mut self) -> Result<LbSet> {
        for corner in self.domain.clone() {
            self.probe(corner)?;
        }
        loop {
            let mut candidates: Vec<Planar> = Vec::new();
            let mut seen = VertexSet::default();
            for v in self.regions.iter().flatten() {
                if !seen.contains(v) && !self.probed.contains(v) {
                    seen.insert(*v);
                    candidates.push(*v);
                }
            }
            if candidates.is_empty() {
                break;
            }
            candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));

            let round_start = self.points.len();
            for w in candidates {
                // Skip vertices already cut off by a point found this round.
                let weight = lift(w);
                let before = self.points[..round_start]
                    .iter()
                    .map(|p| dot(&weight, &p.y))
                    .fold(f64::INFINITY, f64::min);
                let tol = self.config.tolerances.obj;
                if self.points[round_start..]
                    .iter()
                    .any(|p| dot(&weight, &p.y) < before - tol)
                {
                    continue;
                }
                self.probe(w)?;
            }
        }

        let mut points: Vec<LbPoint> = Vec::new();
        for (i, poly) in self.regions.iter().enumerate() {
            if area(poly) <= AREA_TOL {
                continue;
            }
            let k = poly.len() as f64;
            let centroid = [
                poly.iter().map(|p| p[0]).sum::<f64>() / k,
                poly.iter().map(|p| p[1]).sum::<f64>() / k,
            ];
            let mut point = self.points[i].clone();
            point.weight = lift(centroid);
            points.push(point);
        }
        points.sort_by(|a, b| a.y.partial_cmp(&b.y).expect("finite objective values"));
        Ok(LbSet {
            points,
            lp_count: self.solver.solve_count(),
            probes: self.probes,
        })
    }
}

pub fn compute_lb_set(problem: &Problem) -> Result<LbSet> {
    compute_lb_set_with(problem, LbConfig::default())
}

pub fn compute_lb_set_with(problem: &Problem, config: LbConfig) -> Result<LbSet> {
    if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
        return Err(Error::Config(format!(
            "seed epsilon must lie in (0, 1), got {}",
            config.epsilon
        )));
    }
    Enumerator {
        problem,
        solver: LpSolver::new(problem),
        config,
        points: Vec::new(),
        probes: Vec::new(),
        probed: VertexSet::default(),
        domain: seed_triangle(config.epsilon),
        regions: Vec::new(),
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate::{generate_assignment, generate_knapsack};

    fn ys(set: &LbSet) -> Vec<[f64; 3]> {
        set.points.iter().map(|p| p.y).collect()
    }

    fn assert_close(a: &[[f64; 3]], b: &[[f64; 3]]) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        for (p, q) in a.iter().zip(b) {
            assert!(same_point(p, q, 1e-9), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn three_specialist_items() {
        let p = Problem::knapsack(
            [vec![10, 1, 1], vec![1, 10, 1], vec![1, 1, 10]],
            vec![1, 1, 1],
            1,
        )
        .unwrap();
        let set = compute_lb_set(&p).unwrap();
        assert_close(
            &ys(&set),
            &[
                [-10.0, -1.0, -1.0],
                [-1.0, -10.0, -1.0],
                [-1.0, -1.0, -10.0],
            ],
        );
        assert!(set.lp_count >= 3);
    }

    #[test]
    fn dominated_item_gives_single_point() {
        let p = Problem::knapsack([vec![5, 3], vec![6, 2], vec![7, 1]], vec![1, 1], 1).unwrap();
        let set = compute_lb_set(&p).unwrap();
        assert_close(&ys(&set), &[[-5.0, -6.0, -7.0]]);
    }

    #[test]
    fn zero_capacity() {
        let p = generate_knapsack(6, 2, 1..=100).unwrap();
        let (w, _) = p.knapsack_data().unwrap();
        let p = Problem::knapsack(
            [p.original_row(0), p.original_row(1), p.original_row(2)],
            w.to_vec(),
            0,
        )
        .unwrap();
        let set = compute_lb_set(&p).unwrap();
        assert_close(&ys(&set), &[[0.0, 0.0, 0.0]]);
    }

    #[test]
    fn points_are_nondominated_and_optimal_for_their_weight() {
        let p = generate_knapsack(15, 5, 1..=1000).unwrap();
        let set = compute_lb_set(&p).unwrap();
        assert!(set.points.len() > 3);
        for (i, a) in set.points.iter().enumerate() {
            assert!(a.weight.iter().all(|&w| w > 0.0));
            let own = dot(&a.weight, &a.y);
            for (j, b) in set.points.iter().enumerate() {
                if i == j {
                    continue;
                }
                assert!(!same_point(&a.y, &b.y, 1e-6));
                let dominated = (0..3).all(|k| b.y[k] <= a.y[k]) && (0..3).any(|k| b.y[k] < a.y[k]);
                assert!(!dominated);
                assert!(dot(&a.weight, &b.y) >= own - 1e-6);
            }
        }
    }

    #[test]
    fn deterministic() {
        let p = generate_knapsack(12, 9, 1..=1000).unwrap();
        assert_eq!(compute_lb_set(&p).unwrap(), compute_lb_set(&p).unwrap());
    }

    #[test]
    fn assignment_points_are_integral() {
        let p = generate_assignment(4, 1, 1..=1000).unwrap();
        let set = compute_lb_set(&p).unwrap();
        assert!(!set.points.is_empty());
        for point in &set.points {
            assert!(point.is_integral(1e-6));
        }
    }

    #[test]
    fn clip_and_area() {
        let tri = seed_triangle(0.0);
        assert!((area(&tri) - 0.5).abs() < 1e-12);
        // keep w1 <= 0.5
        let half = clip(&tri, 1.0, 0.0, -0.5);
        assert!((area(&half) - 0.375).abs() < 1e-12);
        assert!(clip(&tri, 0.0, 0.0, 1.0).is_empty());
    }
}
