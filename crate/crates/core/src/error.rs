use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("resource vector is empty")]
    EmptyVector,
    #[error("resource component {0} is negative or not finite")]
    InvalidComponent(f64),
    #[error("resource vector has {got} components, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid QoE parameters: {0}")]
    InvalidQoeParams(String),
    #[error("QoS catalog is empty")]
    EmptyCatalog,
    #[error("QoS level {level} is not strictly above level {prev}")]
    CatalogNotIncreasing { prev: usize, level: usize },
    #[error("duplicate user id {0}")]
    DuplicateUser(u32),
    #[error("duplicate server id {0}")]
    DuplicateServer(u32),
    #[error("unknown user id {0}")]
    UnknownUser(u32),
    #[error("server {0} has a negative or non-finite radius")]
    InvalidRadius(u32),
    #[error("allocation covers {got} users, scenario has {expected}")]
    AllocationSize { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate ({0}, {1}) is not finite")]
    NonFinite(f64, f64),
    #[error("latitude {0} outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    Longitude(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("instance has {variables} decision variables, limit is {limit}")]
    TooManyVariables { variables: u128, limit: u128 },
    #[error("enumeration space {space} exceeds the oracle limit {limit}")]
    TooLargeForOracle { space: f64, limit: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown solver '{0}'")]
    UnknownSolver(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Row { path: PathBuf, line: u64, message: String },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("no stations in dataset")]
    NoStations,
    #[error("no end users in dataset")]
    NoUsers,
    #[error("dataset has {available} users, {requested} requested")]
    InsufficientUsers { available: usize, requested: usize },
    #[error("invalid generation parameters: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error("no run records to aggregate")]
    NoRecords,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}
