use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Scenario, SolverReport};
use crate::scalar::Scalar;
use crate::solvers::{to_allocation, Residual, RNG_ALGORITHM};

/// Bin-packing baseline with preset QoS levels.
///
/// This is a proxy for the variable-sized vector bin packing approach to
/// edge user allocation, which has fixed per-user demands and aims to
/// allocate as many users as possible on as few servers as possible:
///
/// 1. every user draws a level uniformly from the catalog (in scenario order);
/// 2. users are packed in ascending order of candidate-set size;
/// 3. a user goes to the already-opened candidate server with the smallest
///    normalized residual after placement (best fit), otherwise the
///    unopened candidate with the largest total capacity is opened;
/// 4. a user whose preset demand fits nowhere stays unallocated.
pub fn solve_vsvbp<T: Scalar>(sc: &Scenario<T>, seed: u64) -> SolverReport<T> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let catalog = sc.catalog();
    let n = sc.users().len();
    let preset: Vec<usize> = (0..n).map(|_| rng.random_range(1..=catalog.len())).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| sc.candidates(i).len());

    let mut res = Residual::new(sc);
    let mut opened = vec![false; sc.servers().len()];
    let mut picks = vec![None; n];
    let id = |j: usize| sc.servers()[j].id;

    for i in order {
        let demand = catalog.levels()[preset[i] - 1].demand.components();
        let fitting = || sc.candidates(i).iter().copied().filter(|&j| res.fits(j, demand));

        let best_fit = fitting().filter(|&j| opened[j]).min_by(|&a, &b| {
            let (ra, rb) = (res.normalized_after(a, Some(demand)), res.normalized_after(b, Some(demand)));
            ra.partial_cmp(&rb).expect("finite residuals").then(id(a).cmp(&id(b)))
        });
        let target = best_fit.or_else(|| {
            fitting().filter(|&j| !opened[j]).max_by(|&a, &b| {
                let (ca, cb) = (res.initial_total(a), res.initial_total(b));
                ca.partial_cmp(&cb).expect("finite capacities").then(id(b).cmp(&id(a)))
            })
        });
        if let Some(j) = target {
            opened[j] = true;
            res.take(j, demand);
            picks[i] = Some((j, preset[i]));
        }
    }

    let alloc = to_allocation(sc, &picks);
    let elapsed = start.elapsed();
    let mut report = SolverReport::new("vsvbp", alloc, sc, elapsed).expect("allocation built for this scenario");
    report.rng = Some(RNG_ALGORITHM);
    report.seed = Some(seed);
    report
}
