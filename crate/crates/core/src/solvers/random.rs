use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Scenario, SolverReport};
use crate::scalar::Scalar;
use crate::solvers::{to_allocation, Residual, RNG_ALGORITHM};

/// Random baseline.
///
/// Users are taken in scenario order. Each picks uniformly among its
/// candidate servers that can still host the lowest level, then uniformly
/// among levels `1..=max`, where `max` is the highest level that fits the
/// server's remaining capacity.
pub fn solve_random<T: Scalar>(sc: &Scenario<T>, seed: u64) -> SolverReport<T> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let catalog = sc.catalog();
    let lowest = catalog.lowest().demand.components();
    let mut res = Residual::new(sc);
    let mut picks = vec![None; sc.users().len()];
    let mut eligible = Vec::new();

    for (i, pick) in picks.iter_mut().enumerate() {
        eligible.clear();
        eligible.extend(sc.candidates(i).iter().copied().filter(|&j| res.fits(j, lowest)));
        if eligible.is_empty() {
            continue;
        }
        let j = eligible[rng.random_range(0..eligible.len())];
        let max = catalog.highest_fitting(res.room(j), T::tolerance()).expect("lowest level fits");
        let level = rng.random_range(1..=max);
        res.take(j, catalog.levels()[level - 1].demand.components());
        *pick = Some((j, level));
    }

    let alloc = to_allocation(sc, &picks);
    let elapsed = start.elapsed();
    let mut report = SolverReport::new("random", alloc, sc, elapsed).expect("allocation built for this scenario");
    report.rng = Some(RNG_ALGORITHM);
    report.seed = Some(seed);
    report
}
