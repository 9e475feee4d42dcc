//! JSON scenario documents.
//!
//! ```json
//! {
//!   "metric": "planar",
//!   "seed": 0,
//!   "qoe_params": { "max": 5.0, "growth": 1.5, "midpoint": 2.0 },
//!   "catalog": [[1.0, 2.0, 1.0, 2.0], [2.0, 3.0, 3.0, 4.0], [5.0, 7.0, 6.0, 6.0]],
//!   "servers": [{ "id": 4, "position": [0.0, 0.0], "radius": 2.0, "capacity": [6.0, 9.0, 7.0, 8.0] }],
//!   "users": [{ "id": 7, "position": [1.0, 0.0] }]
//! }
//! ```
//!
//! Candidate sets are not stored; they are re-derived on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::io_err;
use crate::error::DataError;
use crate::geometry::{DistanceMetric, Point};
use crate::model::{EdgeServer, QoeParams, QosCatalog, ResourceVector, Scenario, ServerId, User, UserId};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    metric: DistanceMetric,
    seed: u64,
    qoe_params: QoeParams<f64>,
    catalog: Vec<Vec<f64>>,
    servers: Vec<ServerDoc>,
    users: Vec<UserDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ServerDoc {
    id: u32,
    position: Point<f64>,
    radius: f64,
    capacity: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UserDoc {
    id: u32,
    position: Point<f64>,
}

pub fn scenario_to_json(sc: &Scenario<f64>) -> String {
    let doc = ScenarioDoc {
        metric: sc.metric(),
        seed: sc.seed(),
        qoe_params: *sc.qoe_params(),
        catalog: sc.catalog().demands().map(|w| w.components().to_vec()).collect(),
        servers: sc
            .servers()
            .iter()
            .map(|s| ServerDoc { id: s.id.0, position: s.position, radius: s.radius, capacity: s.capacity.components().to_vec() })
            .collect(),
        users: sc.users().iter().map(|u| UserDoc { id: u.id.0, position: u.position }).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("scenario serializes");
    out.push('\n');
    out
}

pub fn scenario_from_json(text: &str) -> Result<Scenario<f64>, DataError> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| DataError::Format { path: "<scenario>".into(), message: e.to_string() })?;
    let demands = doc.catalog.into_iter().map(ResourceVector::new).collect::<Result<Vec<_>, _>>()?;
    let catalog = QosCatalog::new(demands, &doc.qoe_params)?;
    let servers = doc
        .servers
        .into_iter()
        .map(|s| Ok(EdgeServer { id: ServerId(s.id), position: s.position, radius: s.radius, capacity: ResourceVector::new(s.capacity)? }))
        .collect::<Result<Vec<_>, DataError>>()?;
    let users = doc.users.into_iter().map(|u| User { id: UserId(u.id), position: u.position }).collect();
    Ok(Scenario::new(users, servers, catalog, doc.qoe_params, doc.metric, doc.seed)?)
}

pub fn read_scenario(path: &Path) -> Result<Scenario<f64>, DataError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    scenario_from_json(&text).map_err(|e| match e {
        DataError::Format { message, .. } => DataError::Format { path: path.into(), message },
        DataError::Model(m) => DataError::Format { path: path.into(), message: m.to_string() },
        other => other,
    })
}

pub fn write_scenario(path: &Path, sc: &Scenario<f64>) -> Result<(), DataError> {
    fs::write(path, scenario_to_json(sc)).map_err(io_err(path))
}

/// First 16 hex digits of the SHA-256 of the scenario document.
pub fn scenario_digest(sc: &Scenario<f64>) -> String {
    let hash = Sha256::digest(scenario_to_json(sc).as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{motivating_example, ten_user_topology};
    use proptest::prelude::*;

    #[test]
    fn motivating_example_document() {
        let json = scenario_to_json(&motivating_example());
        assert!(json.contains("\"metric\": \"planar\""));
        let back = scenario_from_json(&json).unwrap();
        assert_eq!(back.candidate_ids(0), vec![ServerId(4)]);
        assert_eq!(scenario_to_json(&back), json);
        assert_ne!(scenario_digest(&back), scenario_digest(&ten_user_topology()));
        assert_eq!(scenario_digest(&back).len(), 16);
    }

    #[test]
    fn rejects_invalid_documents() {
        assert!(scenario_from_json("{}").is_err());
        let json = scenario_to_json(&motivating_example()).replace("\"radius\": 2.0", "\"radius\": -2.0");
        assert!(scenario_from_json(&json).is_err());
        let json = scenario_to_json(&motivating_example()).replace("\"id\": 8", "\"id\": 7");
        assert!(scenario_from_json(&json).is_err());
    }

    proptest! {
        #[test]
        fn documents_round_trip_losslessly(seed in any::<u64>()) {
            let sc = crate::data::synthetic::random_small(seed);
            let json = scenario_to_json(&sc);
            let back = scenario_from_json(&json).unwrap();
            prop_assert_eq!(scenario_to_json(&back), json);
            for i in 0..sc.users().len() {
                prop_assert_eq!(back.candidates(i), sc.candidates(i));
            }
        }
    }
}
