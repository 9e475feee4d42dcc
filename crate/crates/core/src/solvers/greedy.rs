use std::time::Instant;

use crate::model::{Scenario, SolverReport};
use crate::scalar::Scalar;
use crate::solvers::{to_allocation, Residual};

/// Greedy heuristic.
///
/// Users are taken in scenario order. Each covered user goes to the
/// candidate server with the most remaining resources among those that can
/// still host the lowest level, where "most" is the sum over dimensions of
/// remaining / initial capacity (ties: lowest server id). The user then gets
/// the highest level that fits that server's remaining capacity.
pub fn solve_greedy<T: Scalar>(sc: &Scenario<T>) -> SolverReport<T> {
    let start = Instant::now();
    let mut res = Residual::new(sc);
    let order: Vec<usize> = (0..sc.users().len()).collect();
    let mut picks = vec![None; sc.users().len()];
    greedy_into(sc, &mut res, &order, sc.catalog().len(), &mut picks);
    let alloc = to_allocation(sc, &picks);
    let elapsed = start.elapsed();
    SolverReport::new("greedy", alloc, sc, elapsed).expect("allocation built for this scenario")
}

/// Runs the greedy rule over `users` (indices, in that order) against `res`,
/// granting at most `max_level`. Writes `(server index, level)` picks.
pub(crate) fn greedy_into<T: Scalar>(
    sc: &Scenario<T>,
    res: &mut Residual<T>,
    users: &[usize],
    max_level: usize,
    picks: &mut [Option<(usize, usize)>],
) {
    let catalog = sc.catalog();
    let lowest = catalog.lowest().demand.components();
    for &i in users {
        let mut chosen: Option<(usize, T)> = None;
        for &j in sc.candidates(i) {
            if !res.fits(j, lowest) {
                continue;
            }
            let slack = res.normalized_remaining(j);
            let better = match chosen {
                None => true,
                Some((cj, cs)) => slack > cs || (slack == cs && sc.servers()[j].id < sc.servers()[cj].id),
            };
            if better {
                chosen = Some((j, slack));
            }
        }
        let Some((j, _)) = chosen else { continue };
        let level = catalog.highest_fitting(res.room(j), T::tolerance()).expect("lowest level fits").min(max_level);
        res.take(j, catalog.levels()[level - 1].demand.components());
        picks[i] = Some((j, level));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::motivating_example;
    use crate::geometry::{DistanceMetric, Point};
    use crate::model::{check_feasible, Assignment, EdgeServer, QoeParams, QosCatalog, ResourceVector, ServerId, User, UserId};

    #[test]
    fn motivating_example_takes_the_top_level_first() {
        let sc = motivating_example();
        let r = solve_greedy(&sc);
        assert_eq!(r.allocation.get(0), Assignment::Assigned { server: ServerId(4), level: 3 });
        assert_eq!(r.allocation.get(1), Assignment::Assigned { server: ServerId(4), level: 1 });
        assert!((r.total_qoe - 6.59).abs() <= 0.01);
        assert_eq!(r.nodes_explored, 0);
    }

    fn two_server_scenario(cap_a: [f64; 4], cap_b: [f64; 4], users: &[(f64, f64)]) -> Scenario<f64> {
        let servers = vec![
            EdgeServer { id: ServerId(1), position: Point(0.0, 0.0), radius: 10.0, capacity: ResourceVector::new(cap_a.to_vec()).unwrap() },
            EdgeServer { id: ServerId(2), position: Point(5.0, 0.0), radius: 10.0, capacity: ResourceVector::new(cap_b.to_vec()).unwrap() },
        ];
        let users = users.iter().enumerate().map(|(i, p)| User { id: UserId(i as u32 + 1), position: Point(p.0, p.1) }).collect();
        Scenario::new(users, servers, QosCatalog::standard(), QoeParams::standard(), DistanceMetric::Planar, 0).unwrap()
    }

    #[test]
    fn picks_server_with_most_normalized_room_and_breaks_ties_by_id() {
        let sc = two_server_scenario([10.0; 4], [10.0; 4], &[(1.0, 0.0), (2.0, 0.0)]);
        let r = solve_greedy(&sc);
        assert_eq!(r.allocation.get(0), Assignment::Assigned { server: ServerId(1), level: 3 });
        assert_eq!(r.allocation.get(1), Assignment::Assigned { server: ServerId(2), level: 3 });
    }

    #[test]
    fn uncovered_user_stays_in_the_cloud() {
        let sc = two_server_scenario([10.0; 4], [10.0; 4], &[(100.0, 100.0)]);
        let r = solve_greedy(&sc);
        assert_eq!(r.allocation.get(0), Assignment::Unallocated);
        assert_eq!(r.total_qoe, 0.0);
    }

    #[test]
    fn ample_capacity_gives_everyone_the_top_level() {
        let users: Vec<_> = (0..8).map(|i| (i as f64 * 0.5, 1.0)).collect();
        let big = [5.0 * 8.0, 7.0 * 8.0, 6.0 * 8.0, 6.0 * 8.0];
        let sc = two_server_scenario(big, big, &users);
        let r = solve_greedy(&sc);
        assert!(r.allocation.assignments().iter().all(|a| matches!(a, Assignment::Assigned { level: 3, .. })));
        assert!(check_feasible(&r.allocation, &sc).unwrap().is_feasible());
    }
}
