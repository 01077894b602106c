//! Rounding and path relinking on top of the LP lower bound set.
//!
//! A run computes the lower bound set, rounds its fractional solutions down
//! to the integer rounded (IR) set and, for the path-relinking variants,
//! walks between pairs of IR solutions for `|IR₀| × multiplier` iterations.
//! Every feasible solution met on a walk that is not yet in IR is archived
//! and added to IR. The final front is the nondominated subset of IR.
//!
//! All random choices come from one `ChaCha8Rng` seeded with the run seed,
//! drawn in this order per iteration: the initiating index, then (random
//! pair rule only) the guiding index; per walk step: for the `PI*` variants
//! one `f64` coin compared against the best-move probability, then, when the
//! move is random, the neighbor index.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lbset::{compute_lb_set_with, LbConfig, LbSet};
use crate::metrics::{dominates_point, filter_nondominated_solutions};
use crate::model::{Point, Problem, ProblemKind, Solution, NUM_OBJECTIVES};

/// How the guiding solution is picked (SelectionRule I).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairRule {
    Random,
    /// Most similar to the initiating solution.
    Similar,
    /// Least similar to the initiating solution.
    Different,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Rounding only.
    Rd,
    PrRand,
    PrSim,
    PrDif,
    Pi,
    PiSim,
    PiDif,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Rd,
        Variant::PrRand,
        Variant::PrSim,
        Variant::PrDif,
        Variant::Pi,
        Variant::PiSim,
        Variant::PiDif,
    ];

    /// `None` for rounding only.
    pub fn pair_rule(self) -> Option<PairRule> {
        match self {
            Variant::Rd => None,
            Variant::PrRand | Variant::Pi => Some(PairRule::Random),
            Variant::PrSim | Variant::PiSim => Some(PairRule::Similar),
            Variant::PrDif | Variant::PiDif => Some(PairRule::Different),
        }
    }

    /// Whether walk steps use the best-move analysis.
    pub fn uses_best_move(self) -> bool {
        matches!(self, Variant::Pi | Variant::PiSim | Variant::PiDif)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Rd => "RD",
            Variant::PrRand => "PRrand",
            Variant::PrSim => "PRsim",
            Variant::PrDif => "PRdif",
            Variant::Pi => "PI",
            Variant::PiSim => "PIsim",
            Variant::PiDif => "PIdif",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown variant '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrConfig {
    pub variant: Variant,
    pub seed: u64,
    pub iteration_multiplier: usize,
    pub best_move_probability: f64,
    /// Run rounding and path relinking on assignment instances too.
    pub force_pr: bool,
    pub lb: LbConfig,
}

impl PrConfig {
    pub fn new(variant: Variant, seed: u64) -> Self {
        PrConfig {
            variant,
            seed,
            iteration_multiplier: 50,
            best_move_probability: 0.7,
            force_pr: false,
            lb: LbConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.best_move_probability) {
            return Err(Error::Config(format!(
                "best-move probability {} outside [0, 1]",
                self.best_move_probability
            )));
        }
        Ok(())
    }
}

/// Integer rounded solutions. Every member is feasible and the `x` vectors
/// are pairwise distinct.
#[derive(Debug, Clone, Default)]
pub struct IrSet {
    solutions: Vec<Solution>,
    origins: Vec<Option<usize>>,
    /// Rounded vectors dropped for infeasibility.
    pub dropped_infeasible: usize,
    members: HashSet<Vec<u8>>,
    /// Bit-packed copies of the member vectors, `words` per member.
    packed: Vec<u64>,
    words: usize,
}

impl IrSet {
    pub fn from_solutions(solutions: Vec<Solution>) -> Self {
        let mut ir = IrSet::default();
        for s in solutions {
            ir.insert(s, None);
        }
        ir
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    /// Index of the originating LB point, `None` for solutions found by
    /// path relinking.
    pub fn origins(&self) -> &[Option<usize>] {
        &self.origins
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn contains(&self, x: &[u8]) -> bool {
        self.members.contains(x)
    }

    /// Adds a feasible solution unless its vector is already present.
    pub fn insert(&mut self, solution: Solution, origin: Option<usize>) -> bool {
        if !solution.feasible || !self.members.insert(solution.x.clone()) {
            return false;
        }
        self.push(solution, origin);
        true
    }

    fn push(&mut self, solution: Solution, origin: Option<usize>) {
        if self.solutions.is_empty() {
            self.words = solution.x.len().div_ceil(64);
        }
        let start = self.packed.len();
        self.packed.resize(start + self.words, 0);
        for (j, &b) in solution.x.iter().enumerate() {
            self.packed[start + j / 64] |= u64::from(b) << (j % 64);
        }
        self.solutions.push(solution);
        self.origins.push(origin);
    }

    fn packed(&self, i: usize) -> &[u64] {
        &self.packed[i * self.words..(i + 1) * self.words]
    }

    /// Hamming distance from member `a` to every member, in index order.
    fn distances(&self, a: usize) -> impl Iterator<Item = u32> + '_ {
        let pa = self.packed(a);
        self.packed
            .chunks_exact(self.words.max(1))
            .map(move |pb| pa.iter().zip(pb).map(|(u, v)| (u ^ v).count_ones()).sum())
    }

    #[cfg(test)]
    fn similarity(&self, a: usize, b: usize) -> usize {
        let differ: u32 = self
            .packed(a)
            .iter()
            .zip(self.packed(b))
            .map(|(u, v)| (u ^ v).count_ones())
            .sum();
        self.solutions[a].x.len() - differ as usize
    }
}

/// Floors every LB solution component. Components within `int_tol` of an
/// integer are snapped to it first, so integral LB solutions pass through.
pub fn round_down(lb: &LbSet, problem: &Problem, int_tol: f64) -> Result<IrSet> {
    let mut ir = IrSet::default();
    for (origin, point) in lb.points.iter().enumerate() {
        if point.x.len() != problem.n() {
            return Err(Error::Dimension {
                expected: problem.n(),
                got: point.x.len(),
            });
        }
        let x: Vec<u8> = point
            .x
            .iter()
            .map(|&v| if (v + int_tol).floor() >= 1.0 { 1 } else { 0 })
            .collect();
        let solution = Solution::new_unchecked(problem, x);
        if !solution.feasible {
            ir.dropped_infeasible += 1;
            continue;
        }
        ir.insert(solution, Some(origin));
    }
    if ir.dropped_infeasible > 0 {
        log::warn!(
            "{} rounded solutions were infeasible and dropped",
            ir.dropped_infeasible
        );
    }
    if ir.is_empty() {
        return Err(Error::NoFeasibleRounded);
    }
    Ok(ir)
}

/// Number of positions where `a` and `b` agree.
pub fn similarity(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// Picks the guiding solution for a given initiating index.
pub fn select_guide<R: Rng>(ir: &IrSet, initiating: usize, rule: PairRule, rng: &mut R) -> usize {
    let len = ir.len();
    match rule {
        PairRule::Random => {
            let g = rng.gen_range(0..len - 1);
            if g >= initiating {
                g + 1
            } else {
                g
            }
        }
        PairRule::Similar | PairRule::Different => {
            // first index wins ties; similarity is length minus distance
            let mut best: Option<(usize, u32)> = None;
            for (g, d) in ir.distances(initiating).enumerate() {
                if g == initiating {
                    continue;
                }
                let better = match (best, rule) {
                    (None, _) => true,
                    (Some((_, b)), PairRule::Similar) => d < b,
                    (Some((_, b)), _) => d > b,
                };
                if better {
                    best = Some((g, d));
                }
            }
            best.expect("at least two solutions").0
        }
    }
}

/// SelectionRule I: initiating index uniform, guiding index by `rule`.
pub fn select_pair<R: Rng>(ir: &IrSet, rule: PairRule, rng: &mut R) -> Result<(usize, usize)> {
    if ir.len() < 2 {
        return Err(Error::InsufficientSolutions(ir.len()));
    }
    let initiating = rng.gen_range(0..ir.len());
    let guiding = select_guide(ir, initiating, rule, rng);
    Ok((initiating, guiding))
}

/// Flips each differing position of `si` in turn, in ascending index order.
pub fn generate_neighborhood(si: &[u8], sg: &[u8]) -> Result<Vec<Vec<u8>>> {
    if si.len() != sg.len() {
        return Err(Error::Dimension {
            expected: si.len(),
            got: sg.len(),
        });
    }
    let neighbors: Vec<Vec<u8>> = differing(si, sg)
        .map(|j| {
            let mut x = si.to_vec();
            x[j] ^= 1;
            x
        })
        .collect();
    if neighbors.is_empty() {
        return Err(Error::IdenticalPair);
    }
    Ok(neighbors)
}

fn differing<'a>(si: &'a [u8], sg: &'a [u8]) -> impl Iterator<Item = usize> + 'a {
    si.iter()
        .zip(sg)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(j, _)| j)
}

/// Rank-sum choice among mutually nondominated points. Returns an index into
/// `nd`; repeated points count as their first occurrence.
pub fn improved_nd(current: &Point, nd: &[Point]) -> Result<usize> {
    if nd.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let rows: Vec<usize> = (0..nd.len())
        .filter(|&i| !nd[..i].contains(&nd[i]))
        .collect();
    if rows.len() == 1 {
        return Ok(rows[0]);
    }

    let mut ratio_table = vec![[0.0f64; NUM_OBJECTIVES]; rows.len()];
    for (r, &i) in rows.iter().enumerate() {
        for j in 0..NUM_OBJECTIVES {
            ratio_table[r][j] = if current[j] != 0 {
                nd[i][j] as f64 / current[j] as f64
            } else {
                f64::NAN
            };
        }
    }

    // Improvement per column, larger is better. Dividing by a negative
    // current value flips the order, by zero falls back to the raw value.
    let improvement = |r: usize, j: usize| -> f64 {
        match current[j].signum() {
            -1 => ratio_table[r][j],
            1 => -ratio_table[r][j],
            _ => -(nd[rows[r]][j] as f64),
        }
    };

    let mut degree = vec![0usize; rows.len()];
    for j in 0..NUM_OBJECTIVES {
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&a, &b| {
            improvement(a, j)
                .partial_cmp(&improvement(b, j))
                .expect("finite ratios")
                .then(a.cmp(&b))
        });
        for (rank, &r) in order.iter().enumerate() {
            degree[r] += rank + 1;
        }
    }

    let mut best = 0;
    for r in 1..rows.len() {
        if degree[r] > degree[best] {
            best = r;
        }
    }
    Ok(rows[best])
}

/// SelectionRule II: the unique nondominated neighbor, or the ImprovedND
/// choice among several. Returns an index into `points`.
pub fn best_move(current: &Point, points: &[Point]) -> Result<usize> {
    let mut nd: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let dominated = points.iter().any(|q| dominates_point(q, p));
        if !dominated && !nd.iter().any(|&k| points[k] == *p) {
            nd.push(i);
        }
    }
    match nd.as_slice() {
        [] => Err(Error::EmptyCandidates),
        [only] => Ok(*only),
        _ => {
            let nd_points: Vec<Point> = nd.iter().map(|&i| points[i]).collect();
            Ok(nd[improved_nd(current, &nd_points)?])
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PrArchives {
    /// Feasible solutions found by path relinking, in discovery order.
    pub cand_x: Vec<Solution>,
    /// Ordered `(initiating, guiding)` pairs already walked.
    pub ig_pairs: HashSet<(Vec<u8>, Vec<u8>)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WalkOutcome {
    /// Successive initiating solutions, excluding the start.
    pub visited: Vec<Vec<u8>>,
    /// Number of solutions added to IR during this walk.
    pub added: usize,
}

/// Walks from `ir[pair.0]` towards `ir[pair.1]`.
pub fn path_relink_once<R: Rng>(
    problem: &Problem,
    ir: &mut IrSet,
    archives: &mut PrArchives,
    pair: (usize, usize),
    config: &PrConfig,
    rng: &mut R,
) -> Result<WalkOutcome> {
    let start = ir.solutions[pair.0].x.clone();
    let guide = ir.solutions[pair.1].x.clone();
    let mut outcome = WalkOutcome::default();

    let rows = problem.constraints();
    let current = start.clone();
    let mut y = ir.solutions[pair.0].y;
    let mut activity: Vec<i64> = rows.iter().map(|r| r.activity(&current)).collect();

    let mut key = (current, guide);
    while key.0 != key.1 && !archives.ig_pairs.contains(&key) {
        let (current, guide) = &mut key;
        let flips: Vec<usize> = differing(current, guide).collect();
        let points: Vec<Point> = flips
            .iter()
            .map(|&j| {
                let col = problem.column(j);
                let sign = if current[j] == 0 { 1 } else { -1 };
                [
                    y[0] + sign * col[0],
                    y[1] + sign * col[1],
                    y[2] + sign * col[2],
                ]
            })
            .collect();

        let best =
            config.variant.uses_best_move() && rng.gen::<f64>() < config.best_move_probability;
        let pick = if best {
            best_move(&y, &points)?
        } else {
            rng.gen_range(0..flips.len())
        };

        let j = flips[pick];
        let sign = if current[j] == 0 { 1 } else { -1 };
        current[j] ^= 1;
        y = points[pick];
        for (a, r) in activity.iter_mut().zip(rows) {
            *a += sign * r.coeffs[j];
        }
        outcome.visited.push(current.clone());

        let feasible = rows
            .iter()
            .zip(&activity)
            .all(|(r, &a)| r.sense.holds(a, r.rhs));
        if feasible && !ir.contains(current) {
            let solution = Solution {
                x: current.clone(),
                y,
                feasible: true,
            };
            archives.cand_x.push(solution.clone());
            ir.insert(solution, None);
            outcome.added += 1;
        }
    }
    archives.ig_pairs.insert((start, key.1));
    Ok(outcome)
}

/// Per-run counters and timings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub variant: Variant,
    pub seed: u64,
    pub front_size: usize,
    /// Seconds for the whole run, LB set included.
    pub wall_time: f64,
    /// Seconds spent computing the LB set.
    pub lb_time: f64,
    pub lp_count: usize,
    pub lb_size: usize,
    pub ir_initial: usize,
    pub ir_final: usize,
    pub pr_iterations: usize,
    pub dropped_infeasible: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub front: Vec<Solution>,
    pub stats: RunStats,
    pub lb: LbSet,
}

/// The full pipeline: LB set, rounding, path relinking, dominance filter.
pub fn run(problem: &Problem, config: &PrConfig) -> Result<RunOutput> {
    config.validate()?;
    let started = Instant::now();
    let lb = compute_lb_set_with(problem, config.lb)?;
    let lb_time = started.elapsed().as_secs_f64();
    let mut ir = round_down(&lb, problem, config.lb.tolerances.int)?;
    let ir_initial = ir.len();

    let skip_pr = matches!(problem.kind(), ProblemKind::Assignment { .. }) && !config.force_pr;
    let mut pr_iterations = 0;
    if let (Some(rule), false) = (config.variant.pair_rule(), skip_pr) {
        if ir_initial < 2 {
            log::warn!(
                "path relinking skipped: {}",
                Error::InsufficientSolutions(ir_initial)
            );
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut archives = PrArchives::default();
            let limit = ir_initial * config.iteration_multiplier;
            while pr_iterations < limit {
                let pair = select_pair(&ir, rule, &mut rng)?;
                path_relink_once(problem, &mut ir, &mut archives, pair, config, &mut rng)?;
                pr_iterations += 1;
            }
        }
    }

    let front = filter_nondominated_solutions(&ir.solutions);
    let stats = RunStats {
        variant: config.variant,
        seed: config.seed,
        front_size: front.len(),
        wall_time: started.elapsed().as_secs_f64(),
        lb_time,
        lp_count: lb.lp_count,
        lb_size: lb.points.len(),
        ir_initial,
        ir_final: ir.len(),
        pr_iterations,
        dropped_infeasible: ir.dropped_infeasible,
    };
    Ok(RunOutput { front, stats, lb })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lbset::LbPoint;
    use crate::model::fixtures::p_matrix_knapsack;
    use crate::model::generate::{generate_assignment, generate_knapsack};
    use proptest::prelude::*;
    use rand::Rng;

    fn ir_of(problem: &Problem, xs: &[&[u8]]) -> IrSet {
        IrSet::from_solutions(
            xs.iter()
                .map(|x| Solution::new(problem, x.to_vec()).unwrap())
                .collect(),
        )
    }

    fn lb_of(xs: Vec<Vec<f64>>) -> LbSet {
        LbSet {
            points: xs
                .into_iter()
                .map(|x| LbPoint {
                    x,
                    y: [0.0; 3],
                    weight: [1.0 / 3.0; 3],
                })
                .collect(),
            lp_count: 0,
            probes: Vec::new(),
        }
    }

    #[test]
    fn round_down_floors_fractions() {
        let p = p_matrix_knapsack(2);
        let ir = round_down(&lb_of(vec![vec![1.0, 0.6, 1.0, 0.0]]), &p, 1e-6).unwrap();
        assert_eq!(ir.solutions[0].x, vec![1, 0, 1, 0]);
        assert_eq!(ir.origins, vec![Some(0)]);
    }

    #[test]
    fn round_down_keeps_near_integral_values() {
        let p = p_matrix_knapsack(4);
        let ir = round_down(
            &lb_of(vec![
                vec![0.9999999, 1e-9, 1.0, 0.0],
                vec![1.0, 0.0, 1.0, 0.0],
            ]),
            &p,
            1e-6,
        )
        .unwrap();
        // duplicates merged
        assert_eq!(ir.len(), 1);
        assert_eq!(ir.solutions[0].x, vec![1, 0, 1, 0]);
    }

    #[test]
    fn round_down_drops_infeasible_and_errors_when_empty() {
        let p = Problem::new(
            ProblemKind::General,
            [crate::model::Sense::Min; 3],
            [vec![1, 1], vec![1, 1], vec![1, 1]],
            vec![crate::model::Constraint::new(
                vec![1, 1],
                crate::model::RowSense::Ge,
                1,
            )],
        )
        .unwrap();
        let err = round_down(&lb_of(vec![vec![0.5, 0.5]]), &p, 1e-6).unwrap_err();
        assert!(matches!(err, Error::NoFeasibleRounded));
        let ir = round_down(&lb_of(vec![vec![0.5, 0.5], vec![1.0, 0.0]]), &p, 1e-6).unwrap();
        assert_eq!(ir.dropped_infeasible, 1);
        assert_eq!(ir.len(), 1);
    }

    #[test]
    fn assignment_lb_passes_through() {
        let p = generate_assignment(3, 2, 1..=100).unwrap();
        let lb = crate::lbset::compute_lb_set(&p).unwrap();
        let ir = round_down(&lb, &p, 1e-6).unwrap();
        assert_eq!(ir.len(), lb.points.len());
        for (s, point) in ir.solutions.iter().zip(&lb.points) {
            for (&b, &v) in s.x.iter().zip(&point.x) {
                assert!((b as f64 - v).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn similarity_rules() {
        let p = p_matrix_knapsack(4);
        let ir = ir_of(&p, &[&[0, 0, 1, 0], &[1, 0, 1, 0], &[1, 1, 0, 0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_guide(&ir, 0, PairRule::Similar, &mut rng), 1);
        assert_eq!(select_guide(&ir, 0, PairRule::Different, &mut rng), 2);
        assert_eq!(similarity(&[0, 0, 1, 0], &[1, 0, 1, 0]), 3);
        assert_eq!(similarity(&[0, 0, 1, 0], &[1, 1, 0, 0]), 1);
    }

    #[test]
    fn select_pair_needs_two() {
        let p = p_matrix_knapsack(4);
        let ir = ir_of(&p, &[&[0, 0, 1, 0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            select_pair(&ir, PairRule::Random, &mut rng),
            Err(Error::InsufficientSolutions(1))
        ));
    }

    #[test]
    fn random_pairs_are_distinct() {
        let p = p_matrix_knapsack(4);
        let ir = ir_of(&p, &[&[0, 0, 1, 0], &[1, 0, 1, 0], &[1, 1, 0, 0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (i, g) = select_pair(&ir, PairRule::Random, &mut rng).unwrap();
            assert_ne!(i, g);
            assert_ne!(ir.solutions[i].x, ir.solutions[g].x);
        }
    }

    #[test]
    fn neighborhoods_from_table() {
        assert_eq!(
            generate_neighborhood(&[0, 0, 1, 0], &[1, 1, 0, 0]).unwrap(),
            vec![vec![1, 0, 1, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 0]]
        );
        assert_eq!(
            generate_neighborhood(&[1, 0, 1, 0], &[1, 1, 0, 0]).unwrap(),
            vec![vec![1, 1, 1, 0], vec![1, 0, 0, 0]]
        );
        assert_eq!(
            generate_neighborhood(&[1, 1, 1, 0], &[1, 1, 0, 0]).unwrap(),
            vec![vec![1, 1, 0, 0]]
        );
        assert!(matches!(
            generate_neighborhood(&[1, 0], &[1, 0]),
            Err(Error::IdenticalPair)
        ));
    }

    /// Straight-line transcription of the rank-sum rule used as an oracle.
    fn improved_nd_oracle(current: &Point, nd: &[Point]) -> usize {
        let m = nd.len();
        let mut ratio = vec![vec![0.0; 3]; m];
        for i in 0..m {
            for j in 0..3 {
                ratio[i][j] = nd[i][j] as f64 / current[j] as f64;
            }
        }
        let mut rank = vec![vec![0usize; 3]; m];
        for j in 0..3 {
            for i in 0..m {
                // 1 + number of rows that improve less, or equally with lower index
                let mut r = 1;
                for k in 0..m {
                    let (a, b) = (ratio[k][j], ratio[i][j]);
                    let less = if current[j] < 0 { a < b } else { a > b };
                    if less || (a == b && k < i) {
                        r += 1;
                    }
                }
                rank[i][j] = r;
            }
        }
        let degree: Vec<usize> = rank.iter().map(|r| r.iter().sum()).collect();
        let mut best = 0;
        for i in 1..m {
            if degree[i] > degree[best] {
                best = i;
            }
        }
        best
    }

    #[test]
    fn improved_nd_worked_example() {
        let current = [-10, -10, -10];
        let nd = [[-12, -11, -10], [-11, -13, -10], [-10, -10, -14]];
        assert_eq!(improved_nd(&current, &nd).unwrap(), 1);
        assert_eq!(improved_nd_oracle(&current, &nd), 1);
    }

    #[test]
    fn improved_nd_edge_cases() {
        assert_eq!(improved_nd(&[-1, -1, -1], &[[-5, 0, 3]]).unwrap(), 0);
        assert_eq!(
            improved_nd(&[-1, -1, -1], &[[-5, 0, 3], [-5, 0, 3]]).unwrap(),
            0
        );
        assert!(matches!(
            improved_nd(&[-1, -1, -1], &[]),
            Err(Error::EmptyCandidates)
        ));
        // zero component falls back to raw values: column 2 favors the smaller value
        let pick = improved_nd(&[0, 5, 5], &[[-3, 4, 6], [-1, 6, 3]]).unwrap();
        assert!(pick < 2);
    }

    proptest! {
        #[test]
        fn packed_similarity_matches(a in prop::collection::vec(0u8..2, 1..150), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b: Vec<u8> = a.iter().map(|_| rng.gen_range(0..2)).collect();
            let mut ir = IrSet::default();
            for x in [&a, &b] {
                ir.push(Solution { x: x.clone(), y: [0; 3], feasible: true }, None);
            }
            prop_assert_eq!(ir.similarity(0, 1), similarity(&a, &b));
        }
    }

    proptest! {
        #[test]
        fn improved_nd_matches_oracle(
            current in prop::array::uniform3(-500i64..-1),
            pts in prop::collection::vec(prop::array::uniform3(-600i64..0), 1..8)
        ) {
            let mut nd: Vec<Point> = Vec::new();
            for p in &pts {
                if !pts.iter().any(|q| dominates_point(q, p)) && !nd.contains(p) {
                    nd.push(*p);
                }
            }
            prop_assert_eq!(improved_nd(&current, &nd).unwrap(), improved_nd_oracle(&current, &nd));
        }

        #[test]
        fn neighborhood_size_is_hamming_distance(
            a in prop::collection::vec(0u8..2, 12),
            b in prop::collection::vec(0u8..2, 12)
        ) {
            let dist = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            match generate_neighborhood(&a, &b) {
                Ok(ns) => {
                    prop_assert_eq!(ns.len(), dist);
                    for n in ns {
                        prop_assert_eq!(similarity(&n, &a), 11);
                    }
                }
                Err(_) => prop_assert_eq!(dist, 0),
            }
        }
    }

    #[test]
    fn best_move_prefers_unique_nondominated() {
        let current = [0, 0, 0];
        let pts = [[-7, -6, -8], [-5, -4, -6], [0, 0, 0]];
        assert_eq!(best_move(&current, &pts).unwrap(), 0);
    }

    fn table_walk(start: &[u8], guide: &[u8]) -> (WalkOutcome, PrArchives, IrSet) {
        let p = p_matrix_knapsack(4);
        let mut ir = ir_of(&p, &[start, guide]);
        let mut archives = PrArchives::default();
        let mut config = PrConfig::new(Variant::Pi, 1);
        config.best_move_probability = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = path_relink_once(&p, &mut ir, &mut archives, (0, 1), &config, &mut rng).unwrap();
        (out, archives, ir)
    }

    #[test]
    fn table_trace() {
        let (out, archives, ir) = table_walk(&[0, 0, 1, 0], &[1, 1, 0, 0]);
        assert_eq!(
            out.visited,
            vec![vec![1, 0, 1, 0], vec![1, 1, 1, 0], vec![1, 1, 0, 0]]
        );
        // the guide is already in IR, so two new solutions
        assert_eq!(out.added, 2);
        assert_eq!(archives.cand_x.len(), 2);
        assert_eq!(ir.len(), 4);
        assert!(archives
            .ig_pairs
            .contains(&(vec![0, 0, 1, 0], vec![1, 1, 0, 0])));
    }

    #[test]
    fn repeated_pair_exits_immediately() {
        let p = p_matrix_knapsack(4);
        let mut ir = ir_of(&p, &[&[0, 0, 1, 0], &[1, 1, 0, 0]]);
        let mut archives = PrArchives::default();
        let config = PrConfig::new(Variant::Pi, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        path_relink_once(&p, &mut ir, &mut archives, (0, 1), &config, &mut rng).unwrap();
        let before = (archives.cand_x.len(), ir.len());
        let again =
            path_relink_once(&p, &mut ir, &mut archives, (0, 1), &config, &mut rng).unwrap();
        assert!(again.visited.is_empty());
        assert_eq!((archives.cand_x.len(), ir.len()), before);
        assert_eq!(archives.ig_pairs.len(), 1);
    }

    #[test]
    fn identical_pair_records_without_steps() {
        let p = p_matrix_knapsack(4);
        let mut ir = ir_of(&p, &[&[0, 0, 1, 0]]);
        ir.push(ir.solutions[0].clone(), None);
        let mut archives = PrArchives::default();
        let config = PrConfig::new(Variant::PrRand, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = path_relink_once(&p, &mut ir, &mut archives, (0, 1), &config, &mut rng).unwrap();
        assert!(out.visited.is_empty());
        assert_eq!(archives.ig_pairs.len(), 1);
    }

    #[test]
    fn zero_capacity_walk_archives_nothing() {
        let p = p_matrix_knapsack(0);
        let mut ir = IrSet::from_solutions(vec![Solution::new(&p, vec![0, 0, 0, 0]).unwrap()]);
        // an infeasible guide is never in IR normally; place it directly
        ir.push(Solution::new(&p, vec![1, 1, 1, 1]).unwrap(), None);
        let mut archives = PrArchives::default();
        let config = PrConfig::new(Variant::PrRand, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = path_relink_once(&p, &mut ir, &mut archives, (0, 1), &config, &mut rng).unwrap();
        assert_eq!(out.visited.len(), 4);
        assert!(archives.cand_x.is_empty());
    }

    #[test]
    fn rd_on_assignment_is_filtered_lb() {
        let p = generate_assignment(2, 4, 1..=1000).unwrap();
        let out = run(&p, &PrConfig::new(Variant::Rd, 0)).unwrap();
        let lb_solutions: Vec<Solution> = out
            .lb
            .points
            .iter()
            .map(|pt| Solution::new(&p, pt.x.iter().map(|v| v.round() as u8).collect()).unwrap())
            .collect();
        assert_eq!(out.front, filter_nondominated_solutions(&lb_solutions));
        assert_eq!(out.stats.pr_iterations, 0);
    }

    #[test]
    fn pr_runs_are_reproducible_and_count_iterations() {
        let p = generate_knapsack(10, 17, 1..=1000).unwrap();
        for variant in Variant::ALL {
            let config = PrConfig::new(variant, 42);
            let a = run(&p, &config).unwrap();
            let b = run(&p, &config).unwrap();
            assert_eq!(a.front, b.front, "{variant}");
            let expected = if variant == Variant::Rd || a.stats.ir_initial < 2 {
                0
            } else {
                a.stats.ir_initial * 50
            };
            assert_eq!(a.stats.pr_iterations, expected);
            for s in &a.front {
                assert!(p.is_feasible(&s.x).unwrap());
                assert_eq!(p.evaluate(&s.x).unwrap(), s.y);
            }
            for (i, s) in a.front.iter().enumerate() {
                for (k, t) in a.front.iter().enumerate() {
                    assert!(i == k || !dominates_point(&t.y, &s.y));
                }
            }
        }
    }

    #[test]
    fn front_is_never_dominated_by_initial_ir() {
        let p = generate_knapsack(12, 3, 1..=1000).unwrap();
        let rd = run(&p, &PrConfig::new(Variant::Rd, 0)).unwrap();
        let pi = run(&p, &PrConfig::new(Variant::Pi, 9)).unwrap();
        for s in &pi.front {
            assert!(!rd.front.iter().any(|r| dominates_point(&r.y, &s.y)));
        }
    }

    #[test]
    fn variant_names_parse() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("pisim".parse::<Variant>().unwrap(), Variant::PiSim);
        assert!("XY".parse::<Variant>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = PrConfig::new(Variant::Pi, 0);
        c.best_move_probability = 1.5;
        assert!(c.validate().is_err());
    }
}
