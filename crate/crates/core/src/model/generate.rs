//! Seeded random instance generators.
//!
//! Defaults follow the usual uncorrelated benchmark style: integer
//! coefficients drawn uniformly from `[1, 1000]` and a knapsack capacity of
//! half the total weight (rounded up). All draws come from a `ChaCha8Rng`
//! seeded with the given seed, in row-major order: the three objective rows
//! first, then the knapsack weights.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Problem, NUM_OBJECTIVES};
use crate::error::{Error, Result};

pub const DEFAULT_COEFF_RANGE: RangeInclusive<i64> = 1..=1000;

fn check_range(range: &RangeInclusive<i64>) -> Result<()> {
    if range.is_empty() || *range.start() < 0 {
        return Err(Error::Config(format!(
            "coefficient range {}..={} must be nonempty and nonnegative",
            range.start(),
            range.end()
        )));
    }
    Ok(())
}

fn draw_rows(rng: &mut ChaCha8Rng, len: usize, range: &RangeInclusive<i64>) -> [Vec<i64>; 3] {
    let mut rows: [Vec<i64>; NUM_OBJECTIVES] = Default::default();
    for row in rows.iter_mut() {
        *row = (0..len).map(|_| rng.gen_range(range.clone())).collect();
    }
    rows
}

pub fn generate_knapsack(n: usize, seed: u64, coeff_range: RangeInclusive<i64>) -> Result<Problem> {
    if n == 0 {
        return Err(Error::Config("knapsack needs at least one item".into()));
    }
    check_range(&coeff_range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profits = draw_rows(&mut rng, n, &coeff_range);
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(coeff_range.clone())).collect();
    let total: i64 = weights.iter().sum();
    let capacity = (total + 1) / 2;
    Problem::knapsack(profits, weights, capacity)
}

pub fn generate_assignment(
    tasks: usize,
    seed: u64,
    coeff_range: RangeInclusive<i64>,
) -> Result<Problem> {
    if tasks == 0 {
        return Err(Error::Config("assignment needs at least one task".into()));
    }
    check_range(&coeff_range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs = draw_rows(&mut rng, tasks * tasks, &coeff_range);
    Problem::assignment(tasks, costs)
}
