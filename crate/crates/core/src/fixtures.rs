//! Small hand-built instances used by tests, docs and the CLI examples.

use crate::geometry::{DistanceMetric, Point};
use crate::model::{EdgeServer, QoeParams, QosCatalog, ResourceVector, Scenario, ServerId, User, UserId};

fn server(id: u32, x: f64, y: f64, radius: f64, cap: [f64; 4]) -> EdgeServer<f64> {
    EdgeServer {
        id: ServerId(id),
        position: Point(x, y),
        radius,
        capacity: ResourceVector::new(cap.to_vec()).expect("valid capacity"),
    }
}

fn user(id: u32, x: f64, y: f64) -> User<f64> {
    User { id: UserId(id), position: Point(x, y) }
}

/// Two users (7 then 8) that can only reach server 4, whose capacity
/// `<6,9,7,8>` admits `{W2, W2}` and `{W3, W1}` but not `{W3, W2}`.
pub fn motivating_example() -> Scenario<f64> {
    Scenario::new(
        vec![user(7, 1.0, 0.0), user(8, 0.0, 1.0)],
        vec![server(4, 0.0, 0.0, 2.0, [6.0, 9.0, 7.0, 8.0])],
        QosCatalog::standard(),
        QoeParams::standard(),
        DistanceMetric::Planar,
        0,
    )
    .expect("fixture is valid")
}

/// Planar ten-user, four-server layout: user 3 sits in the overlap of
/// servers 1, 2 and 3; server 1 covers users 1, 3, 4 and 5; users 7 and 8
/// share server 4, and user 8 can also reach server 2.
pub fn ten_user_topology() -> Scenario<f64> {
    let cap = [9.0, 15.0, 12.0, 10.0];
    Scenario::new(
        vec![
            user(1, -2.0, 0.0),
            user(2, 4.0, -2.0),
            user(3, 2.0, 1.0),
            user(4, 0.0, -2.0),
            user(5, -1.0, 1.5),
            user(6, 2.0, 4.0),
            user(7, 8.0, 5.0),
            user(8, 6.5, 1.5),
            user(9, 5.0, 2.0),
            user(10, 9.0, 3.0),
        ],
        vec![
            server(1, 0.0, 0.0, 3.0, cap),
            server(2, 4.0, 0.0, 3.0, cap),
            server(3, 2.0, 3.0, 2.5, cap),
            server(4, 8.0, 4.0, 3.0, [6.0, 9.0, 7.0, 8.0]),
        ],
        QosCatalog::standard(),
        QoeParams::standard(),
        DistanceMetric::Planar,
        0,
    )
    .expect("fixture is valid")
}
