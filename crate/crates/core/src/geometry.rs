//! Distances and coverage sets.
//!
//! A server covers a user when their distance is at most the server's
//! radius (boundary inclusive).

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::model::{EdgeServer, ServerId, User, UserId};
use crate::scalar::Scalar;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A coordinate pair. For [`DistanceMetric::GreatCircle`] it is
/// `(latitude, longitude)` in degrees; for planar it is `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point<T>(pub T, pub T);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMetric {
    /// Euclidean distance in the input units.
    #[default]
    Planar,
    /// Haversine distance in meters on a sphere of radius [`EARTH_RADIUS_M`].
    GreatCircle,
}

impl std::str::FromStr for DistanceMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "planar" => Ok(Self::Planar),
            "greatcircle" | "great-circle" => Ok(Self::GreatCircle),
            other => Err(format!("unknown metric '{other}' (expected planar or greatcircle)")),
        }
    }
}

impl DistanceMetric {
    pub fn validate<T: Scalar>(self, p: Point<T>) -> Result<(), GeometryError> {
        let (a, b) = (p.0.as_f64(), p.1.as_f64());
        if !a.is_finite() || !b.is_finite() {
            return Err(GeometryError::NonFinite(a, b));
        }
        if self == Self::GreatCircle {
            if !(-90.0..=90.0).contains(&a) {
                return Err(GeometryError::Latitude(a));
            }
            if !(-180.0..=180.0).contains(&b) {
                return Err(GeometryError::Longitude(b));
            }
        }
        Ok(())
    }
}

/// Distance between two points under `metric`.
pub fn distance<T: Scalar>(a: Point<T>, b: Point<T>, metric: DistanceMetric) -> Result<T, GeometryError> {
    metric.validate(a)?;
    metric.validate(b)?;
    Ok(distance_unchecked(a, b, metric))
}

pub(crate) fn distance_unchecked<T: Scalar>(a: Point<T>, b: Point<T>, metric: DistanceMetric) -> T {
    match metric {
        DistanceMetric::Planar => (a.0 - b.0).hypot(a.1 - b.1),
        DistanceMetric::GreatCircle => {
            let (lat1, lat2) = (a.0.to_radians(), b.0.to_radians());
            let dlat = lat2 - lat1;
            let dlon = (b.1 - a.1).to_radians();
            let two = T::of(2.0);
            let h = (dlat / two).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / two).sin().powi(2);
            two * T::of(EARTH_RADIUS_M) * h.sqrt().min(T::one()).asin()
        }
    }
}

pub(crate) fn covers<T: Scalar>(server: &EdgeServer<T>, at: Point<T>, metric: DistanceMetric) -> bool {
    distance_unchecked(server.position, at, metric) <= server.radius
}

/// Ids of the servers whose coverage disk contains `user`, in server order.
pub fn candidate_servers<T: Scalar>(user: &User<T>, servers: &[EdgeServer<T>], metric: DistanceMetric) -> Vec<ServerId> {
    servers.iter().filter(|s| covers(s, user.position, metric)).map(|s| s.id).collect()
}

/// Ids of the users inside `server`'s coverage disk, in user order.
pub fn coverable_users<T: Scalar>(server: &EdgeServer<T>, users: &[User<T>], metric: DistanceMetric) -> Vec<UserId> {
    users.iter().filter(|u| covers(server, u.position, metric)).map(|u| u.id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ResourceVector;
    use proptest::prelude::*;

    fn server(id: u32, x: f64, y: f64, r: f64) -> EdgeServer<f64> {
        EdgeServer { id: ServerId(id), position: Point(x, y), radius: r, capacity: ResourceVector::zeros(4) }
    }

    fn user(id: u32, x: f64, y: f64) -> User<f64> {
        User { id: UserId(id), position: Point(x, y) }
    }

    #[test]
    fn planar_and_identity() {
        assert_eq!(distance(Point(0.0, 0.0), Point(3.0, 4.0), DistanceMetric::Planar).unwrap(), 5.0);
        let p = Point(-37.81, 144.96);
        assert_eq!(distance(p, p, DistanceMetric::GreatCircle).unwrap(), 0.0);
    }

    #[test]
    fn one_degree_along_equator() {
        let d: f64 = distance(Point(0.0, 0.0), Point(0.0, 1.0), DistanceMetric::GreatCircle).unwrap();
        // R * pi / 180
        let expected = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        assert!((expected - 111_194.93).abs() < 0.01);
        assert!((d - 111_195.0).abs() <= 10.0, "{d}");
        assert!((d - expected).abs() < 1e-6);
    }

    #[test]
    fn rejects_out_of_range_coordinates() {
        let bad = Point(91.0, 0.0);
        assert_eq!(
            distance(bad, Point(0.0, 0.0), DistanceMetric::GreatCircle),
            Err(GeometryError::Latitude(91.0))
        );
        assert!(distance(Point(0.0, 181.0), Point(0.0, 0.0), DistanceMetric::GreatCircle).is_err());
        assert!(distance(bad, Point(0.0, 0.0), DistanceMetric::Planar).is_ok());
        assert!(distance(Point(f64::NAN, 0.0), Point(0.0, 0.0), DistanceMetric::Planar).is_err());
    }

    #[test]
    fn coverage_boundary_is_inclusive() {
        let servers = vec![server(1, 0.0, 0.0, 5.0), server(2, 10.0, 0.0, 1.0)];
        assert_eq!(candidate_servers(&user(1, 3.0, 4.0), &servers, DistanceMetric::Planar), vec![ServerId(1)]);
        assert!(candidate_servers(&user(2, 50.0, 50.0), &servers, DistanceMetric::Planar).is_empty());
        assert_eq!(candidate_servers(&user(3, 10.0, 0.0), &servers, DistanceMetric::Planar), vec![ServerId(2)]);
    }

    #[test]
    fn zero_radius_server() {
        let s = server(1, 1.0, 1.0, 0.0);
        assert!(coverable_users(&s, &[user(1, 1.0, 2.0)], DistanceMetric::Planar).is_empty());
        assert_eq!(coverable_users(&s, &[user(1, 1.0, 1.0)], DistanceMetric::Planar), vec![UserId(1)]);
    }

    fn planar_point() -> impl Strategy<Value = Point<f64>> {
        (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point(x, y))
    }

    fn geo_point() -> impl Strategy<Value = Point<f64>> {
        (-89.0..89.0f64, -179.0..179.0f64).prop_map(|(x, y)| Point(x, y))
    }

    proptest! {
        #[test]
        fn triangle_inequality_planar(a in planar_point(), b in planar_point(), c in planar_point()) {
            let m = DistanceMetric::Planar;
            let (ab, bc, ac) = (distance(a, b, m).unwrap(), distance(b, c, m).unwrap(), distance(a, c, m).unwrap());
            prop_assert!(ac <= ab + bc + 1e-9);
            prop_assert_eq!(ab, distance(b, a, m).unwrap());
        }

        #[test]
        fn triangle_inequality_great_circle(a in geo_point(), b in geo_point(), c in geo_point()) {
            let m = DistanceMetric::GreatCircle;
            let (ab, bc, ac) = (distance(a, b, m).unwrap(), distance(b, c, m).unwrap(), distance(a, c, m).unwrap());
            prop_assert!(ac <= ab + bc + 1e-6);
            prop_assert!((ab - distance(b, a, m).unwrap()).abs() < 1e-6);
            prop_assert!(ab >= 0.0);
        }

        #[test]
        fn coverage_duality_and_radius_monotonicity(
            srv in prop::collection::vec((planar_point(), 0.0..60.0f64), 1..6),
            usr in prop::collection::vec(planar_point(), 0..12),
            grow in 0.0..30.0f64,
        ) {
            let m = DistanceMetric::Planar;
            let servers: Vec<_> = srv.iter().enumerate().map(|(i, (p, r))| server(i as u32, p.0, p.1, *r)).collect();
            let users: Vec<_> = usr.iter().enumerate().map(|(i, p)| user(i as u32, p.0, p.1)).collect();
            for s in &servers {
                let covered = coverable_users(s, &users, m);
                for u in &users {
                    let cands = candidate_servers(u, &servers, m);
                    prop_assert_eq!(covered.contains(&u.id), cands.contains(&s.id));
                }
                let mut bigger = s.clone();
                bigger.radius += grow;
                let wider = coverable_users(&bigger, &users, m);
                prop_assert!(covered.iter().all(|u| wider.contains(u)));
            }
        }
    }
}
