//! Dominance, hypervolume and the brute-force Pareto oracle.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Point, Problem, ProblemKind, Solution, NUM_OBJECTIVES};

/// `a` dominates `b` under minimization.
pub fn dominates<T: PartialOrd>(a: &[T], b: &[T]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(dominates_unchecked(a, b))
}

fn dominates_unchecked<T: PartialOrd>(a: &[T], b: &[T]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

pub(crate) fn dominates_point(a: &Point, b: &Point) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && a[2] <= b[2] && a != b
}

/// Maximal nondominated subset, duplicates collapsed, sorted lexicographically.
pub fn filter_nondominated(points: &[Point]) -> Vec<Point> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    // Any dominator of a point sorts before it.
    let mut kept: Vec<Point> = Vec::new();
    for p in sorted {
        if !kept.iter().any(|k| dominates_point(k, &p)) {
            kept.push(p);
        }
    }
    kept
}

/// Nondominated solutions, sorted by objective point. Among solutions with
/// equal points the first one in `solutions` is kept.
pub fn filter_nondominated_solutions(solutions: &[Solution]) -> Vec<Solution> {
    let mut order: Vec<&Solution> = solutions.iter().collect();
    order.sort_by_key(|s| s.y);
    order.dedup_by_key(|s| s.y);
    let mut kept: Vec<&Solution> = Vec::new();
    for s in order {
        if !kept.iter().any(|k| dominates_point(&k.y, &s.y)) {
            kept.push(s);
        }
    }
    kept.into_iter().cloned().collect()
}

/// The exact nondominated set of an instance together with its ideal and
/// worst values per objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFront {
    pub points: Vec<Point>,
    pub min: Point,
    pub max: Point,
}

impl ReferenceFront {
    pub fn from_points(points: &[Point]) -> Self {
        let points = filter_nondominated(points);
        let mut min = [i64::MAX; NUM_OBJECTIVES];
        let mut max = [i64::MIN; NUM_OBJECTIVES];
        for p in &points {
            for k in 0..NUM_OBJECTIVES {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        ReferenceFront { points, min, max }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub points: Vec<[f64; NUM_OBJECTIVES]>,
    /// Coordinates that fell below the ideal value. On an exact reference
    /// this means the reference is wrong.
    pub below_ideal: usize,
}

/// Maps each objective onto `[0, 1]` using the reference front's range.
/// Coordinates above 1 are clamped to 1.
pub fn normalize(points: &[Point], reference: &ReferenceFront) -> Result<Normalized> {
    for k in 0..NUM_OBJECTIVES {
        if reference.max[k] <= reference.min[k] {
            return Err(Error::DegenerateReference(k + 1));
        }
    }
    let mut below_ideal = 0;
    let points = points
        .iter()
        .map(|p| {
            let mut q = [0.0; NUM_OBJECTIVES];
            for k in 0..NUM_OBJECTIVES {
                let span = (reference.max[k] - reference.min[k]) as f64;
                let v = (p[k] - reference.min[k]) as f64 / span;
                if v < 0.0 {
                    below_ideal += 1;
                }
                q[k] = v.min(1.0);
            }
            q
        })
        .collect();
    if below_ideal > 0 {
        log::warn!("{below_ideal} normalized coordinates below the reference ideal point");
    }
    Ok(Normalized {
        points,
        below_ideal,
    })
}

/// Hypervolume of normalized points with reference point `(1, 1, 1)`.
pub fn hypervolume(points: &[[f64; NUM_OBJECTIVES]]) -> Result<f64> {
    hypervolume_with_reference(points, &[1.0; NUM_OBJECTIVES])
}

/// Exact volume of the union of boxes `[p, reference]`, by sweeping the third
/// objective and maintaining the 2-D staircase of the first two.
pub fn hypervolume_with_reference(
    points: &[[f64; NUM_OBJECTIVES]],
    reference: &[f64; NUM_OBJECTIVES],
) -> Result<f64> {
    for (index, p) in points.iter().enumerate() {
        if let Some(&value) = p.iter().zip(reference).find(|(v, r)| v > r).map(|(v, _)| v) {
            return Err(Error::OutsideReference { index, value });
        }
    }
    let mut boxes: Vec<[f64; 3]> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v < r))
        .copied()
        .collect();
    boxes.sort_by(|a, b| a[2].partial_cmp(&b[2]).expect("finite coordinates"));

    // (x ascending, y descending) staircase of mutually nondominated points
    let mut stair: Vec<[f64; 2]> = Vec::new();
    let mut volume = 0.0;
    for (i, p) in boxes.iter().enumerate() {
        let q = [p[0], p[1]];
        if !stair.iter().any(|s| s[0] <= q[0] && s[1] <= q[1]) {
            stair.retain(|s| !(q[0] <= s[0] && q[1] <= s[1]));
            let at = stair.partition_point(|s| s[0] < q[0]);
            stair.insert(at, q);
        }
        let next_z = boxes.get(i + 1).map_or(reference[2], |b| b[2]);
        if next_z > p[2] {
            volume += staircase_area(&stair, reference) * (next_z - p[2]);
        }
    }
    Ok(volume)
}

fn staircase_area(stair: &[[f64; 2]], reference: &[f64; 3]) -> f64 {
    let mut area = 0.0;
    for (i, s) in stair.iter().enumerate() {
        let next_x = stair.get(i + 1).map_or(reference[0], |t| t[0]);
        area += (next_x - s[0]) * (reference[1] - s[1]);
    }
    area
}

/// Monte-Carlo estimate over the unit cube with reference point `(1, 1, 1)`.
pub fn hypervolume_monte_carlo<R: Rng>(
    points: &[[f64; NUM_OBJECTIVES]],
    samples: usize,
    rng: &mut R,
) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    for _ in 0..samples {
        let s: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        if points
            .iter()
            .any(|p| p[0] <= s[0] && p[1] <= s[1] && p[2] <= s[2])
        {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

/// Hypervolume of `front` as a percentage of the reference front's own
/// hypervolume, both normalized by the reference range.
pub fn hv_percent(front: &[Point], reference: &ReferenceFront) -> Result<f64> {
    let reference_hv = hypervolume(&normalize(&reference.points, reference)?.points)?;
    if reference_hv <= 0.0 {
        return Err(Error::ZeroReferenceVolume);
    }
    if front.is_empty() {
        return Ok(0.0);
    }
    let hv = hypervolume(&normalize(front, reference)?.points)?;
    Ok(100.0 * hv / reference_hv)
}

/// Normalized hypervolume of `front` against a reference front.
pub fn normalized_hv(front: &[Point], reference: &ReferenceFront) -> Result<f64> {
    hypervolume(&normalize(front, reference)?.points)
}

pub const MAX_ENUMERATED_VARIABLES: usize = 25;
pub const MAX_ENUMERATED_TASKS: usize = 8;

/// Inserts into a nondominated archive; keeps the first solution per point.
fn archive_insert(archive: &mut Vec<Solution>, y: Point, make: impl FnOnce() -> Solution) {
    if archive
        .iter()
        .any(|s| s.y == y || dominates_point(&s.y, &y))
    {
        return;
    }
    archive.retain(|s| !dominates_point(&y, &s.y));
    archive.push(make());
}

/// Every nondominated point of the instance with one solution each, by
/// complete enumeration. Sorted by objective point.
pub fn exact_solutions(problem: &Problem) -> Result<Vec<Solution>> {
    let mut archive = match problem.kind() {
        ProblemKind::Assignment { tasks } => {
            if tasks > MAX_ENUMERATED_TASKS {
                return Err(Error::EnumerationLimit(format!(
                    "assignment with {tasks} tasks (limit {MAX_ENUMERATED_TASKS})"
                )));
            }
            enumerate_permutations(problem, tasks)
        }
        _ => {
            if problem.n() > MAX_ENUMERATED_VARIABLES {
                return Err(Error::EnumerationLimit(format!(
                    "{} variables (limit {MAX_ENUMERATED_VARIABLES})",
                    problem.n()
                )));
            }
            enumerate_subsets(problem)
        }
    };
    archive.sort_by_key(|s| s.y);
    Ok(archive)
}

pub fn exact_front(problem: &Problem) -> Result<ReferenceFront> {
    let points: Vec<Point> = exact_solutions(problem)?.iter().map(|s| s.y).collect();
    Ok(ReferenceFront::from_points(&points))
}

/// Gray-code walk over `{0,1}^n` with incremental objective and row sums.
fn enumerate_subsets(problem: &Problem) -> Vec<Solution> {
    let n = problem.n();
    let rows = problem.constraints();
    let mut x = vec![0u8; n];
    let mut y = [0i64; NUM_OBJECTIVES];
    let mut activity = vec![0i64; rows.len()];
    let mut archive = Vec::new();
    let feasible = |activity: &[i64]| {
        rows.iter()
            .zip(activity)
            .all(|(r, &a)| r.sense.holds(a, r.rhs))
    };
    if feasible(&activity) {
        archive_insert(&mut archive, y, || Solution {
            x: x.clone(),
            y,
            feasible: true,
        });
    }
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        let sign = if x[j] == 0 { 1 } else { -1 };
        x[j] ^= 1;
        let col = problem.column(j);
        for k in 0..NUM_OBJECTIVES {
            y[k] += sign * col[k];
        }
        for (a, r) in activity.iter_mut().zip(rows) {
            *a += sign * r.coeffs[j];
        }
        if feasible(&activity) {
            archive_insert(&mut archive, y, || Solution {
                x: x.clone(),
                y,
                feasible: true,
            });
        }
    }
    archive
}

/// Heap's algorithm over agent-to-task permutations.
fn enumerate_permutations(problem: &Problem, tasks: usize) -> Vec<Solution> {
    let mut perm: Vec<usize> = (0..tasks).collect();
    let mut archive = Vec::new();
    let visit = |perm: &[usize], archive: &mut Vec<Solution>| {
        let mut y = [0i64; NUM_OBJECTIVES];
        for (r, &l) in perm.iter().enumerate() {
            let col = problem.column(r * tasks + l);
            for k in 0..NUM_OBJECTIVES {
                y[k] += col[k];
            }
        }
        archive_insert(archive, y, || {
            let mut x = vec![0u8; tasks * tasks];
            for (r, &l) in perm.iter().enumerate() {
                x[r * tasks + l] = 1;
            }
            Solution {
                x,
                y,
                feasible: true,
            }
        });
    };
    visit(&perm, &mut archive);
    let mut c = vec![0usize; tasks];
    let mut i = 1;
    while i < tasks {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm, &mut archive);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    archive
}
