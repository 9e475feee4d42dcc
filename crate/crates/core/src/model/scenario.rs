use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::geometry::{covers, DistanceMetric, Point};
use crate::model::{QoeParams, QosCatalog, ResourceVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ServerId(pub u32);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ServerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct User<T> {
    pub id: UserId,
    pub position: Point<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeServer<T> {
    pub id: ServerId,
    pub position: Point<T>,
    /// Coverage radius, in the distance units of the scenario's metric.
    pub radius: T,
    /// Resources available to the app vendor on this server.
    pub capacity: ResourceVector<T>,
}

/// A validated allocation problem instance.
///
/// Candidate server sets are derived from geometry at construction and
/// stored as indices into [`Scenario::servers`], in server order.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    users: Vec<User<T>>,
    servers: Vec<EdgeServer<T>>,
    catalog: QosCatalog<T>,
    qoe_params: QoeParams<T>,
    metric: DistanceMetric,
    seed: u64,
    candidates: Vec<Vec<usize>>,
    user_index: HashMap<UserId, usize>,
    server_index: HashMap<ServerId, usize>,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(
        users: Vec<User<T>>,
        servers: Vec<EdgeServer<T>>,
        catalog: QosCatalog<T>,
        qoe_params: QoeParams<T>,
        metric: DistanceMetric,
        seed: u64,
    ) -> Result<Self, ModelError> {
        qoe_params.validate()?;
        let dim = catalog.dim();
        for level in catalog.levels() {
            let expected = qoe_params.qoe_of_mean(level.demand.mean());
            if (expected - level.qoe).abs() > T::tolerance() {
                return Err(ModelError::InvalidQoeParams(format!(
                    "catalog level {} was built with different QoE parameters",
                    level.index
                )));
            }
        }
        let mut server_index = HashMap::with_capacity(servers.len());
        for (i, s) in servers.iter().enumerate() {
            if server_index.insert(s.id, i).is_some() {
                return Err(ModelError::DuplicateServer(s.id.0));
            }
            if !(s.radius.is_finite() && s.radius >= T::zero()) {
                return Err(ModelError::InvalidRadius(s.id.0));
            }
            if s.capacity.dim() != dim {
                return Err(ModelError::DimensionMismatch { expected: dim, got: s.capacity.dim() });
            }
            metric.validate(s.position)?;
        }
        let mut user_index = HashMap::with_capacity(users.len());
        for (i, u) in users.iter().enumerate() {
            if user_index.insert(u.id, i).is_some() {
                return Err(ModelError::DuplicateUser(u.id.0));
            }
            metric.validate(u.position)?;
        }
        let candidates = users
            .iter()
            .map(|u| (0..servers.len()).filter(|&j| covers(&servers[j], u.position, metric)).collect())
            .collect();
        Ok(Self { users, servers, catalog, qoe_params, metric, seed, candidates, user_index, server_index })
    }

    pub fn users(&self) -> &[User<T>] {
        &self.users
    }

    pub fn servers(&self) -> &[EdgeServer<T>] {
        &self.servers
    }

    pub fn catalog(&self) -> &QosCatalog<T> {
        &self.catalog
    }

    pub fn qoe_params(&self) -> &QoeParams<T> {
        &self.qoe_params
    }

    pub fn metric(&self) -> DistanceMetric {
        self.metric
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.catalog.dim()
    }

    /// Candidate servers of the user at `user_idx`, as server indices.
    pub fn candidates(&self, user_idx: usize) -> &[usize] {
        &self.candidates[user_idx]
    }

    pub fn candidate_ids(&self, user_idx: usize) -> Vec<ServerId> {
        self.candidates[user_idx].iter().map(|&j| self.servers[j].id).collect()
    }

    pub fn user_idx(&self, id: UserId) -> Option<usize> {
        self.user_index.get(&id).copied()
    }

    pub fn server_idx(&self, id: ServerId) -> Option<usize> {
        self.server_index.get(&id).copied()
    }

    /// Same instance with users listed in the order given by `order`
    /// (a permutation of user indices).
    pub fn reordered(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.users.len(), "order must be a permutation of users");
        let users: Vec<_> = order.iter().map(|&i| self.users[i].clone()).collect();
        let candidates = order.iter().map(|&i| self.candidates[i].clone()).collect();
        let user_index = users.iter().enumerate().map(|(i, u)| (u.id, i)).collect();
        Self {
            users,
            servers: self.servers.clone(),
            catalog: self.catalog.clone(),
            qoe_params: self.qoe_params,
            metric: self.metric,
            seed: self.seed,
            candidates,
            user_index,
            server_index: self.server_index.clone(),
        }
    }

    /// Same instance with one server's capacity replaced.
    pub fn with_capacity(&self, server_idx: usize, capacity: ResourceVector<T>) -> Result<Self, ModelError> {
        let mut servers = self.servers.clone();
        servers[server_idx].capacity = capacity;
        Self::new(self.users.clone(), servers, self.catalog.clone(), self.qoe_params, self.metric, self.seed)
    }
}
