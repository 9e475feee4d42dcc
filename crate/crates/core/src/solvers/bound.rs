//! Upper bounds for the exact solver.
//!
//! For a set of users that can only draw on a pool of capacity `C`, summing
//! the per-server resource constraints over the pool gives, for every
//! dimension `k`, the single-row constraint `sum_i W_{l_i}^k <= C^k`. Each of
//! those rows (and their average over dimensions) yields a multiple-choice
//! knapsack whose LP relaxation is solved exactly by taking, per user, the
//! upper concave hull of `(0,0), (W_1^k, E_1), ..., (W_c^k, E_c)` and filling
//! hull segments in decreasing slope order. The minimum over rows is a valid
//! upper bound on the pool's QoE.

use crate::model::QosCatalog;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    weight: T,
    value: T,
}

#[derive(Debug, Clone)]
pub(crate) struct Relaxation<T> {
    dim: usize,
    /// `hulls[row][cap - 1]`, rows `0..dim` are dimensions, row `dim` is the mean.
    hulls: Vec<Vec<Vec<Segment<T>>>>,
    scratch: Vec<(T, Segment<T>, usize)>,
}

impl<T: Scalar> Relaxation<T> {
    pub(crate) fn new(catalog: &QosCatalog<T>) -> Self {
        let dim = catalog.dim();
        let q = catalog.len();
        let hulls = (0..=dim)
            .map(|row| {
                let points: Vec<(T, T)> = catalog
                    .levels()
                    .iter()
                    .map(|lv| (if row == dim { lv.demand.mean() } else { lv.demand[row] }, lv.qoe))
                    .collect();
                (1..=q).map(|cap| upper_hull(&points[..cap])).collect()
            })
            .collect();
        Self { dim, hulls, scratch: Vec::new() }
    }

    /// Bound for `counts[c - 1]` users whose best attainable level is `c`,
    /// sharing the pooled `capacity`.
    pub(crate) fn bound(&mut self, counts: &[usize], capacity: &[T]) -> T {
        let mean_cap = capacity.iter().copied().sum::<T>() / T::of(self.dim as f64);
        let mut best = T::infinity();
        for row in 0..=self.dim {
            let cap = if row == self.dim { mean_cap } else { capacity[row] };
            best = best.min(self.fill(row, counts, cap));
        }
        best
    }

    fn fill(&mut self, row: usize, counts: &[usize], capacity: T) -> T {
        self.scratch.clear();
        for (c, &count) in counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            for seg in &self.hulls[row][c] {
                let slope = if seg.weight > T::zero() { seg.value / seg.weight } else { T::infinity() };
                self.scratch.push((slope, *seg, count));
            }
        }
        self.scratch.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite or infinite slopes"));

        let mut room = capacity.max(T::zero());
        let mut total = T::zero();
        for (_, seg, count) in &self.scratch {
            let count = T::of(*count as f64);
            if seg.weight <= T::zero() {
                total = total + seg.value * count;
                continue;
            }
            if room <= T::zero() {
                continue;
            }
            let take = count.min(room / seg.weight);
            total = total + take * seg.value;
            room = room - take * seg.weight;
        }
        total
    }
}

/// Segments of the upper concave hull of `(0,0)` and `points`, which are
/// sorted by non-decreasing weight with strictly increasing value.
fn upper_hull<T: Scalar>(points: &[(T, T)]) -> Vec<Segment<T>> {
    // Value reachable at zero weight.
    let free = points.iter().filter(|p| p.0 <= T::zero()).map(|p| p.1).fold(T::zero(), T::max);
    let mut hull: Vec<(T, T)> = vec![(T::zero(), free)];
    for &(w, v) in points.iter().filter(|p| p.0 > T::zero() && p.1 > free) {
        if let Some(last) = hull.last_mut() {
            if last.0 == w {
                last.1 = last.1.max(v);
                continue;
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (w - a.0) * (b.1 - a.1) - (v - a.1) * (b.0 - a.0);
            if cross <= T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((w, v));
    }
    let mut segments = Vec::with_capacity(hull.len());
    if free > T::zero() {
        segments.push(Segment { weight: T::zero(), value: free });
    }
    segments.extend(hull.windows(2).map(|p| Segment { weight: p[1].0 - p[0].0, value: p[1].1 - p[0].1 }));
    segments
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_drops_dominated_middle_point() {
        // (1,1), (2,1.2), (3,3): the middle point lies below the chord.
        let segs = upper_hull::<f64>(&[(1.0, 1.0), (2.0, 1.2), (3.0, 3.0)]);
        assert_eq!(segs.len(), 1);
        assert!((segs[0].weight - 3.0).abs() < 1e-12 && (segs[0].value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hull_keeps_concave_points() {
        let segs = upper_hull(&[(1.0, 2.0), (2.0, 3.0), (4.0, 3.5)]);
        assert_eq!(segs.len(), 3);
        let slopes: Vec<f64> = segs.iter().map(|s| s.value / s.weight).collect();
        assert!(slopes.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn zero_weight_levels_are_free() {
        let segs = upper_hull(&[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(segs[0].weight, 0.0);
        assert_eq!(segs[0].value, 1.0);
        assert_eq!(segs.len(), 2);
    }

    #[test]
    fn bound_is_not_below_the_motivating_optimum() {
        let catalog = QosCatalog::standard();
        let mut rel = Relaxation::new(&catalog);
        let b = rel.bound(&[0, 0, 2], &[6.0, 9.0, 7.0, 8.0]);
        assert!(b >= 8.18 - 0.01, "{b}");
        // Two users cannot beat two top levels.
        assert!(b <= 2.0 * catalog.highest().qoe + 1e-12);
        // No capacity, no QoE.
        assert_eq!(rel.bound(&[0, 0, 2], &[0.0; 4]), 0.0);
    }

    #[test]
    fn bound_dominates_every_feasible_level_mix_on_one_server() {
        // Brute force: every multiset of levels for up to 4 users on a single
        // server is checked against the relaxation.
        let catalog = QosCatalog::standard();
        let mut rel = Relaxation::new(&catalog);
        let caps = [[6.0, 9.0, 7.0, 8.0], [9.0, 15.0, 12.0, 10.0], [3.0, 5.0, 4.0, 6.0], [20.0, 20.0, 20.0, 20.0]];
        for cap in caps {
            for n in 1..=4usize {
                let mut best = 0.0f64;
                let mut levels = vec![0usize; n];
                loop {
                    let mut load = [0.0; 4];
                    let mut value = 0.0;
                    for &l in &levels {
                        if l > 0 {
                            let lv = &catalog.levels()[l - 1];
                            for k in 0..4 {
                                load[k] += lv.demand[k];
                            }
                            value += lv.qoe;
                        }
                    }
                    if (0..4).all(|k| load[k] <= cap[k]) {
                        best = best.max(value);
                    }
                    let mut p = 0;
                    while p < n && levels[p] == 3 {
                        levels[p] = 0;
                        p += 1;
                    }
                    if p == n {
                        break;
                    }
                    levels[p] += 1;
                }
                let b = rel.bound(&[0, 0, n], &cap);
                assert!(b + 1e-9 >= best, "cap {cap:?} n {n}: bound {b} < {best}");
            }
        }
    }
}
