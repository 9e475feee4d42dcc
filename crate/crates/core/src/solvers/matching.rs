//! Server loads realizable by a user-to-server matching.
//!
//! Once the number of users `n_j` on each server is chosen, which users they
//! are no longer matters: a server's best QoE is its best level mix for
//! `n_j` users. The load vectors a bipartite matching can realize form a
//! polymatroid, so with concave gains the greedy rule (take the largest
//! marginal gain that still has an augmenting path) is optimal, also after
//! imposing per-server lower and upper load limits. Replacing each server's
//! mix curve by its upper concave envelope over `lo..=hi` therefore gives an
//! upper bound, attained when every load lands on a point where the curve
//! meets its envelope.

use crate::scalar::Scalar;

pub(crate) struct LoadPlan<T> {
    /// Value of the greedy loads under the concave envelopes.
    pub upper: T,
    /// Local server per position in the greedy matching.
    pub owner: Vec<Option<usize>>,
    pub load: Vec<usize>,
    /// Envelope minus curve at each server's load.
    pub excess: Vec<T>,
}

impl<T: Scalar> LoadPlan<T> {
    /// The server whose load is furthest below its envelope, if any is.
    pub fn loosest(&self) -> Option<usize> {
        let mut pick: Option<usize> = None;
        for (s, &e) in self.excess.iter().enumerate() {
            if e > T::tolerance() && pick.is_none_or(|p| e > self.excess[p]) {
                pick = Some(s);
            }
        }
        pick
    }
}

/// Per-unit increments of the upper concave envelope of `(n, f[n])` for
/// `n` in `lo..=hi`.
fn envelope_increments<T: Scalar>(f: &[T], lo: usize, hi: usize) -> Vec<T> {
    let mut hull: Vec<usize> = Vec::new();
    for n in lo..=hi {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or below the chord a -> n
            let lhs = (f[b] - f[a]) * T::of((n - a) as f64);
            let rhs = (f[n] - f[a]) * T::of((b - a) as f64);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(n);
    }
    let mut inc = Vec::with_capacity(hi - lo);
    for w in hull.windows(2) {
        let slope = (f[w[1]] - f[w[0]]) / T::of((w[1] - w[0]) as f64);
        inc.extend(std::iter::repeat_n(slope, w[1] - w[0]));
    }
    inc
}

/// `cands[pos]` lists local server indices; `curves[s][n]` is server `s`'s
/// nondecreasing value for `n` users, with `curves[s][0] == 0` and at least
/// `hi[s] + 1` entries. Returns `None` when the lower limits cannot all be met.
pub(crate) fn plan_loads<T: Scalar>(cands: &[Vec<usize>], curves: &[&[T]], lo: &[usize], hi: &[usize]) -> Option<LoadPlan<T>> {
    let ns = curves.len();
    let mut users_of: Vec<Vec<usize>> = vec![Vec::new(); ns];
    for (pos, cs) in cands.iter().enumerate() {
        for &s in cs {
            users_of[s].push(pos);
        }
    }
    let mut owner: Vec<Option<usize>> = vec![None; cands.len()];
    let mut load = vec![0usize; ns];
    let mut search = Augment::new(ns, cands.len());
    for s in 0..ns {
        while load[s] < lo[s] {
            if !search.run(s, &users_of, &mut owner) {
                return None;
            }
            load[s] += 1;
        }
    }

    let inc: Vec<Vec<T>> = (0..ns).map(|s| envelope_increments(curves[s], lo[s], hi[s])).collect();
    let mut upper: T = (0..ns).map(|s| curves[s][lo[s]]).sum();
    let mut saturated = vec![false; ns];
    loop {
        let mut pick: Option<(T, usize)> = None;
        for s in 0..ns {
            if saturated[s] || load[s] >= hi[s] {
                continue;
            }
            let g = inc[s][load[s] - lo[s]];
            if g > T::tolerance() && pick.is_none_or(|(b, _)| g > b) {
                pick = Some((g, s));
            }
        }
        let Some((g, s)) = pick else { break };
        if search.run(s, &users_of, &mut owner) {
            load[s] += 1;
            upper = upper + g;
        } else {
            saturated[s] = true;
        }
    }

    let mut excess = vec![T::zero(); ns];
    for s in 0..ns {
        let env = curves[s][lo[s]] + inc[s][..load[s] - lo[s]].iter().copied().sum::<T>();
        excess[s] = (env - curves[s][load[s]]).max(T::zero());
    }
    Some(LoadPlan { upper, owner, load, excess })
}

struct Augment {
    via_user: Vec<Option<usize>>,
    from_server: Vec<usize>,
    seen_server: Vec<bool>,
    seen_user: Vec<bool>,
    queue: Vec<usize>,
}

impl Augment {
    fn new(ns: usize, nu: usize) -> Self {
        Self { via_user: vec![None; ns], from_server: vec![0; nu], seen_server: vec![false; ns], seen_user: vec![false; nu], queue: Vec::new() }
    }

    /// Breadth-first search for a path that gives server `s` one more user
    /// without changing any other server's load.
    fn run(&mut self, s: usize, users_of: &[Vec<usize>], owner: &mut [Option<usize>]) -> bool {
        self.seen_server.iter_mut().for_each(|x| *x = false);
        self.seen_user.iter_mut().for_each(|x| *x = false);
        self.queue.clear();
        self.queue.push(s);
        self.seen_server[s] = true;
        self.via_user[s] = None;
        let mut head = 0;
        while head < self.queue.len() {
            let a = self.queue[head];
            head += 1;
            for &u in &users_of[a] {
                if self.seen_user[u] || owner[u] == Some(a) {
                    continue;
                }
                self.seen_user[u] = true;
                self.from_server[u] = a;
                match owner[u] {
                    None => {
                        let mut u = u;
                        loop {
                            let a = self.from_server[u];
                            owner[u] = Some(a);
                            match self.via_user[a] {
                                None => return true,
                                Some(prev) => u = prev,
                            }
                        }
                    }
                    Some(b) if !self.seen_server[b] => {
                        self.seen_server[b] = true;
                        self.via_user[b] = Some(u);
                        self.queue.push(b);
                    }
                    Some(_) => {}
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(curves: &[&[f64]]) -> (Vec<usize>, Vec<usize>) {
        (vec![0; curves.len()], curves.iter().map(|c| c.len() - 1).collect())
    }

    #[test]
    fn envelope_of_concave_curve_is_its_increments() {
        assert_eq!(envelope_increments(&[0.0, 5.0, 8.0, 9.0], 0, 3), vec![5.0, 3.0, 1.0]);
        assert_eq!(envelope_increments(&[0.0, 5.0, 8.0, 9.0], 1, 2), vec![3.0]);
    }

    #[test]
    fn envelope_bridges_a_dent() {
        // 0, 1, 4: the envelope is the straight line of slope 2.
        assert_eq!(envelope_increments(&[0.0, 1.0, 4.0], 0, 2), vec![2.0, 2.0]);
    }

    #[test]
    fn loads_respect_coverage() {
        // user 0 only reaches server 0; user 1 reaches both.
        let (a, b) = ([0.0, 5.0, 9.0], [0.0, 6.0, 6.0]);
        let curves: [&[f64]; 2] = [&a, &b];
        let (lo, hi) = full(&curves);
        let plan = plan_loads(&[vec![0], vec![0, 1]], &curves, &lo, &hi).unwrap();
        assert_eq!(plan.upper, 11.0);
        assert_eq!(plan.owner, vec![Some(0), Some(1)]);
        assert!(plan.loosest().is_none());
    }

    #[test]
    fn augmenting_paths_reshuffle_users() {
        // user 0 reaches both servers, user 1 only server 0.
        let (a, b) = ([0.0, 4.0, 4.0], [0.0, 3.0, 3.0]);
        let curves: [&[f64]; 2] = [&a, &b];
        let (lo, hi) = full(&curves);
        let plan = plan_loads(&[vec![0, 1], vec![0]], &curves, &lo, &hi).unwrap();
        assert_eq!(plan.upper, 7.0);
        assert_eq!(plan.load, vec![1, 1]);
        assert_eq!(plan.owner, vec![Some(1), Some(0)]);
    }

    #[test]
    fn non_tight_loads_are_reported() {
        // 0, 1, 4 has envelope 0, 2, 4; with one user the load sits at 1.
        let f = [0.0, 1.0, 4.0];
        let curves: [&[f64]; 1] = [&f];
        let plan = plan_loads(&[vec![0]], &curves, &[0], &[2]).unwrap();
        assert_eq!(plan.upper, 2.0);
        assert_eq!(plan.loosest(), Some(0));
        assert_eq!(plan.load, vec![1]);
        // Forcing the load to at least one makes it tight.
        let plan = plan_loads(&[vec![0]], &curves, &[1], &[2]).unwrap();
        assert_eq!(plan.upper, 1.0);
        assert!(plan.loosest().is_none());
    }

    #[test]
    fn unreachable_lower_limits_are_infeasible() {
        let f = [0.0, 1.0, 2.0];
        let curves: [&[f64]; 1] = [&f];
        assert!(plan_loads(&[vec![0]], &curves, &[2], &[2]).is_none());
    }
}
