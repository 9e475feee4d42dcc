use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::error::DataError;
use crate::geometry::{distance_unchecked, DistanceMetric, Point};
use crate::model::{EdgeServer, QoeParams, QosCatalog, ResourceVector, Scenario, ServerId, User, UserId};

/// How to draw one scenario from a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSpec {
    pub n_users: usize,
    /// Share of the servers covering the sampled users that stay available.
    pub server_fraction: f64,
    /// Mean of the per-dimension capacity distribution.
    pub capacity_mean: f64,
    pub capacity_stddev: f64,
    pub catalog: QosCatalog<f64>,
    pub qoe_params: QoeParams<f64>,
    pub seed: u64,
}

impl GenerationSpec {
    /// Standard catalog and QoE parameters, capacity standard deviation 1.
    pub fn standard(n_users: usize, server_fraction: f64, capacity_mean: f64, seed: u64) -> Self {
        Self {
            n_users,
            server_fraction,
            capacity_mean,
            capacity_stddev: 1.0,
            catalog: QosCatalog::standard(),
            qoe_params: QoeParams::standard(),
            seed,
        }
    }

    fn validate(&self) -> Result<(), DataError> {
        if self.n_users == 0 {
            return Err(DataError::InvalidSpec("n_users must be >= 1".into()));
        }
        if !(self.server_fraction > 0.0 && self.server_fraction <= 1.0) {
            return Err(DataError::InvalidSpec(format!("server fraction {} not in (0, 1]", self.server_fraction)));
        }
        if !(self.capacity_mean > 0.0 && self.capacity_mean.is_finite()) {
            return Err(DataError::InvalidSpec(format!("capacity mean {} must be > 0", self.capacity_mean)));
        }
        if !(self.capacity_stddev >= 0.0 && self.capacity_stddev.is_finite()) {
            return Err(DataError::InvalidSpec(format!("capacity stddev {} must be >= 0", self.capacity_stddev)));
        }
        Ok(())
    }
}

/// Samples users, keeps a fraction of the servers that cover them, and
/// draws integer capacities from `N(mean, stddev^2)`.
///
/// Users are sampled uniformly without replacement and listed in dataset
/// order. The retained count is `round(fraction * covering)`, at least one
/// when any server covers a sampled user. Each capacity component is an
/// independent normal draw, rounded to the nearest integer and clamped at 0.
pub fn generate_scenario(d: &Dataset, g: &GenerationSpec) -> Result<Scenario<f64>, DataError> {
    g.validate()?;
    if d.end_users.len() < g.n_users {
        return Err(DataError::InsufficientUsers { available: d.end_users.len(), requested: g.n_users });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let metric = DistanceMetric::GreatCircle;

    let mut picked = sample(&mut rng, d.end_users.len(), g.n_users).into_vec();
    picked.sort_unstable();
    let users: Vec<User<f64>> = picked
        .iter()
        .map(|&i| {
            let u = &d.end_users[i];
            User { id: UserId(u.id), position: Point(u.lat, u.lon) }
        })
        .collect();

    let covering: Vec<usize> = (0..d.stations.len())
        .filter(|&s| {
            let st = &d.stations[s];
            users.iter().any(|u| distance_unchecked(Point(st.lat, st.lon), u.position, metric) <= st.radius_m)
        })
        .collect();
    let keep = if covering.is_empty() { 0 } else { ((g.server_fraction * covering.len() as f64).round() as usize).clamp(1, covering.len()) };
    let mut kept = sample(&mut rng, covering.len(), keep).into_vec();
    kept.sort_unstable();

    let normal = Normal::new(g.capacity_mean, g.capacity_stddev).map_err(|e| DataError::InvalidSpec(e.to_string()))?;
    let dim = g.catalog.dim();
    let servers = kept
        .iter()
        .map(|&k| {
            let st = &d.stations[covering[k]];
            let cap: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng).round().max(0.0)).collect();
            Ok(EdgeServer {
                id: ServerId(st.id),
                position: Point(st.lat, st.lon),
                radius: st.radius_m,
                capacity: ResourceVector::new(cap)?,
            })
        })
        .collect::<Result<Vec<_>, DataError>>()?;

    Ok(Scenario::new(users, servers, g.catalog.clone(), g.qoe_params, metric, g.seed)?)
}
