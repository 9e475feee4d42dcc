//! Best level mixes on a single server.

use crate::model::QosCatalog;
use crate::scalar::Scalar;

/// `out[n]` is the highest total QoE that at most `n` users can reach on one
/// server with remaining capacity `room`, for `n` in `0..=max_n`.
///
/// Every count vector `(n_2, ..., n_q)` that fits is enumerated and the rest
/// is filled with `W_1`. Returns `None` once more than `budget` count vectors
/// have been visited.
pub(crate) fn level_mix<T: Scalar>(catalog: &QosCatalog<T>, room: &[T], max_n: usize, budget: usize) -> Option<Vec<T>> {
    let mut out = vec![T::neg_infinity(); max_n + 1];
    let mut left = room.to_vec();
    let mut visited = 0;
    enumerate(catalog, catalog.len(), &mut left, 0, T::zero(), max_n, &mut out, &mut visited, budget)?;
    for n in 1..=max_n {
        out[n] = out[n].max(out[n - 1]);
    }
    Some(out)
}

/// How many copies of `w` fit into `room`, capped at `cap`.
fn copies<T: Scalar>(w: &[T], room: &[T], cap: usize) -> usize {
    let mut k = cap;
    for (w, r) in w.iter().zip(room) {
        if *w > T::zero() {
            let f = ((*r + T::tolerance()) / *w).floor();
            k = k.min(if f < T::zero() { 0 } else { f.to_usize().unwrap_or(usize::MAX) });
        } else if *r < -T::tolerance() {
            return 0;
        }
    }
    k
}

#[allow(clippy::too_many_arguments)]
fn enumerate<T: Scalar>(
    catalog: &QosCatalog<T>,
    level: usize,
    room: &mut [T],
    used: usize,
    value: T,
    max_n: usize,
    out: &mut [T],
    visited: &mut usize,
    budget: usize,
) -> Option<()> {
    *visited += 1;
    if *visited > budget {
        return None;
    }
    let levels = catalog.levels();
    if level == 1 {
        let extra = copies(levels[0].demand.components(), room, max_n - used);
        let e1 = levels[0].qoe;
        for k in 0..=extra {
            let v = value + e1 * T::of(k as f64);
            if v > out[used + k] {
                out[used + k] = v;
            }
        }
        return Some(());
    }
    let lv = &levels[level - 1];
    let w = lv.demand.components();
    let most = copies(w, room, max_n - used);
    for k in 0..=most {
        enumerate(catalog, level - 1, room, used + k, value + lv.qoe * T::of(k as f64), max_n, out, visited, budget)?;
        if k < most {
            for (r, d) in room.iter_mut().zip(w) {
                *r = *r - *d;
            }
        }
    }
    for (r, d) in room.iter_mut().zip(w) {
        *r = *r + *d * T::of(most as f64);
    }
    Some(())
}

/// Levels of one best mix of at most `n` users on `room`, highest first.
pub(crate) fn best_mix_levels<T: Scalar>(catalog: &QosCatalog<T>, room: &[T], n: usize) -> Vec<usize> {
    fn go<T: Scalar>(cat: &QosCatalog<T>, level: usize, room: &mut [T], counts: &mut Vec<usize>, value: T, left: usize, best: &mut (T, Vec<usize>)) {
        let lv = &cat.levels()[level - 1];
        let w = lv.demand.components();
        let most = copies(w, room, left);
        if level == 1 {
            let v = value + lv.qoe * T::of(most as f64);
            if v > best.0 {
                counts[0] = most;
                *best = (v, counts.clone());
            }
            return;
        }
        for k in 0..=most {
            counts[level - 1] = k;
            go(cat, level - 1, room, counts, value + lv.qoe * T::of(k as f64), left - k, best);
            if k < most {
                for (r, d) in room.iter_mut().zip(w) {
                    *r = *r - *d;
                }
            }
        }
        for (r, d) in room.iter_mut().zip(w) {
            *r = *r + *d * T::of(most as f64);
        }
        counts[level - 1] = 0;
    }
    let q = catalog.len();
    let mut best = (T::neg_infinity(), vec![0; q]);
    go(catalog, q, &mut room.to_vec(), &mut vec![0; q], T::zero(), n, &mut best);
    (1..=q).rev().flat_map(|l| std::iter::repeat_n(l, best.1[l - 1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{QoeParams, ResourceVector};

    #[test]
    fn motivating_capacity() {
        let cat = QosCatalog::standard();
        let mix = level_mix(&cat, &[6.0, 9.0, 7.0, 8.0], 3, 1000).unwrap();
        let e: Vec<f64> = cat.levels().iter().map(|l| l.qoe).collect();
        assert_eq!(mix[0], 0.0);
        assert!((mix[1] - e[2]).abs() < 1e-12);
        assert!((mix[2] - 2.0 * e[1]).abs() < 1e-12);
        // <6,9,7,8> holds W2 + W1 + W1 = <4,7,5,8>, worth less than two W2.
        assert!((mix[3] - 2.0 * e[1]).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force() {
        let cat = QosCatalog::standard();
        let levels = cat.levels();
        for room in [[10.0, 10.0, 10.0, 10.0], [3.0, 20.0, 4.0, 9.0], [0.0, 5.0, 5.0, 5.0], [12.0, 15.0, 14.0, 13.0]] {
            let mix = level_mix(&cat, &room, 6, 100_000).unwrap();
            // every assignment of 6 users to levels 0..=3
            let mut best = [f64::NEG_INFINITY; 7];
            for code in 0..4usize.pow(6) {
                let (mut c, mut load, mut n, mut v) = (code, [0.0; 4], 0, 0.0);
                for _ in 0..6 {
                    let l = c % 4;
                    c /= 4;
                    if l > 0 {
                        n += 1;
                        v += levels[l - 1].qoe;
                        for (a, b) in load.iter_mut().zip(levels[l - 1].demand.components()) {
                            *a += b;
                        }
                    }
                }
                if load.iter().zip(&room).all(|(a, b)| a <= b) {
                    best[n] = best[n].max(v);
                }
            }
            for n in 1..7 {
                best[n] = best[n].max(best[n - 1]);
                assert!((best[n] - mix[n]).abs() < 1e-9, "{room:?} n={n}: {} vs {}", best[n], mix[n]);
            }
        }
    }

    #[test]
    fn zero_demand_lowest_level_is_capped_by_user_count() {
        let params = QoeParams::standard();
        let cat = QosCatalog::new(
            vec![ResourceVector::from_f64s(&[0.0, 0.0]).unwrap(), ResourceVector::from_f64s(&[1.0, 2.0]).unwrap()],
            &params,
        )
        .unwrap();
        let mix = level_mix(&cat, &[1.0, 2.0], 4, 1000).unwrap();
        let e: Vec<f64> = cat.levels().iter().map(|l| l.qoe).collect();
        assert!((mix[4] - (e[1] + 3.0 * e[0])).abs() < 1e-12);
    }

    #[test]
    fn best_levels_reach_the_mix_value() {
        let cat = QosCatalog::standard();
        for room in [[6.0, 9.0, 7.0, 8.0], [10.0, 10.0, 10.0, 10.0], [3.0, 20.0, 4.0, 9.0], [0.0, 9.0, 9.0, 9.0]] {
            let mix = level_mix(&cat, &room, 5, 100_000).unwrap();
            for n in 0..=5 {
                let levels = best_mix_levels(&cat, &room, n);
                assert!(levels.len() <= n);
                let v: f64 = levels.iter().map(|&l| cat.levels()[l - 1].qoe).sum();
                assert!((v - mix[n]).abs() < 1e-9, "{room:?} n={n}");
                let mut load = [0.0; 4];
                for &l in &levels {
                    for (a, b) in load.iter_mut().zip(cat.levels()[l - 1].demand.components()) {
                        *a += b;
                    }
                }
                assert!(load.iter().zip(&room).all(|(a, b)| a <= b));
            }
        }
    }

    #[test]
    fn gives_up_past_the_budget() {
        assert!(level_mix(&QosCatalog::standard(), &[100.0; 4], 100, 10).is_none());
    }
}
