//! Randomly generated planar scenarios for tests, fuzzing and timing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{DistanceMetric, Point};
use crate::model::{EdgeServer, QoeParams, QosCatalog, ResourceVector, Scenario, ServerId, User, UserId};

/// Users and servers scattered uniformly over a `side x side` square.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarSpec {
    pub n_users: usize,
    pub n_servers: usize,
    pub side: f64,
    pub radius: (f64, f64),
    /// Inclusive integer range of each capacity component.
    pub capacity: (u32, u32),
}

impl PlanarSpec {
    /// Overlapping coverage and capacities of a handful of users per server.
    pub fn contention(n_users: usize, n_servers: usize) -> Self {
        Self { n_users, n_servers, side: 10.0, radius: (1.5, 3.0), capacity: (4, 20) }
    }
}

pub fn random_planar(spec: &PlanarSpec, seed: u64) -> Scenario<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build(&mut rng, spec, QosCatalog::standard(), QoeParams::standard(), seed)
}

/// A tiny instance (n <= 6, m <= 3, q <= 3, d <= 4) with a random catalog and
/// random QoE parameters, small enough for the oracle.
pub fn random_small(seed: u64) -> Scenario<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = PlanarSpec {
        n_users: rng.random_range(1..=6),
        n_servers: rng.random_range(0..=3),
        side: 4.0,
        radius: (0.5, 3.0),
        capacity: (0, 12),
    };
    let (q, d) = (rng.random_range(1..=3), rng.random_range(1..=4));
    let (catalog, params) = random_catalog(&mut rng, q, d);
    build(&mut rng, &spec, catalog, params, seed)
}

/// Fuzzing instance with up to 200 users and 30 servers; half of them use a
/// random catalog.
pub fn random_fuzz(seed: u64) -> Scenario<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = rng.random_range(3..=40);
    let spec = PlanarSpec {
        n_users: rng.random_range(1..=200),
        n_servers: rng.random_range(0..=30),
        side: 20.0,
        radius: (1.0, 5.0),
        capacity: (hi / 3, hi),
    };
    let (catalog, params) = if rng.random_bool(0.5) {
        (QosCatalog::standard(), QoeParams::standard())
    } else {
        let q = rng.random_range(1..=4);
        random_catalog(&mut rng, q, 4)
    };
    build(&mut rng, &spec, catalog, params, seed)
}

fn random_catalog(rng: &mut ChaCha8Rng, q: usize, dim: usize) -> (QosCatalog<f64>, QoeParams<f64>) {
    loop {
        let params = QoeParams {
            max: rng.random_range(1.0..10.0),
            growth: rng.random_range(0.2..3.0),
            midpoint: rng.random_range(0.0..6.0),
        };
        let mut w: Vec<f64> = (0..dim).map(|_| rng.random_range(0..=3) as f64).collect();
        let mut demands = Vec::with_capacity(q);
        for l in 0..q {
            if l > 0 {
                for c in w.iter_mut() {
                    *c += rng.random_range(0..=3) as f64;
                }
                let k = rng.random_range(0..dim);
                w[k] += 1.0;
            }
            demands.push(ResourceVector::new(w.clone()).expect("non-negative"));
        }
        // Saturated logistic curves can make adjacent levels' QoE equal; redraw.
        if let Ok(c) = QosCatalog::new(demands, &params) {
            return (c, params);
        }
    }
}

fn build(rng: &mut ChaCha8Rng, spec: &PlanarSpec, catalog: QosCatalog<f64>, params: QoeParams<f64>, seed: u64) -> Scenario<f64> {
    let dim = catalog.dim();
    let servers = (0..spec.n_servers)
        .map(|j| EdgeServer {
            id: ServerId(j as u32 + 1),
            position: Point(rng.random_range(0.0..spec.side), rng.random_range(0.0..spec.side)),
            radius: rng.random_range(spec.radius.0..=spec.radius.1),
            capacity: ResourceVector::new((0..dim).map(|_| rng.random_range(spec.capacity.0..=spec.capacity.1) as f64).collect())
                .expect("non-negative"),
        })
        .collect();
    let users = (0..spec.n_users)
        .map(|i| User { id: UserId(i as u32 + 1), position: Point(rng.random_range(0.0..spec.side), rng.random_range(0.0..spec.side)) })
        .collect();
    Scenario::new(users, servers, catalog, params, DistanceMetric::Planar, seed).expect("generated scenario is valid")
}
