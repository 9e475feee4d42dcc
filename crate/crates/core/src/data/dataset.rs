use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::io_err;
use crate::error::DataError;
use crate::geometry::{DistanceMetric, Point, EARTH_RADIUS_M};

/// A base station hosting an edge server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub id: u32,
    pub lat: f64,
    pub lon: f64,
    pub radius_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndUser {
    pub id: u32,
    pub lat: f64,
    pub lon: f64,
}

/// Geographic base stations and end-user positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub stations: Vec<Station>,
    pub end_users: Vec<EndUser>,
}

const STATION_HEADER: [&str; 4] = ["id", "lat", "lon", "radius_m"];
const USER_HEADER: [&str; 3] = ["id", "lat", "lon"];

/// Loads and validates a stations CSV (`id,lat,lon,radius_m`) and a users
/// CSV (`id,lat,lon`).
pub fn load_dataset(stations: &Path, users: &Path) -> Result<Dataset, DataError> {
    let stations: Vec<Station> = read_rows(stations, &STATION_HEADER)?;
    if stations.is_empty() {
        return Err(DataError::NoStations);
    }
    let end_users: Vec<EndUser> = read_rows(users, &USER_HEADER)?;
    if end_users.is_empty() {
        return Err(DataError::NoUsers);
    }
    Ok(Dataset { stations, end_users })
}

trait Row {
    fn id(&self) -> u32;
    fn check(&self) -> Result<(), String>;
}

impl Row for Station {
    fn id(&self) -> u32 {
        self.id
    }

    fn check(&self) -> Result<(), String> {
        DistanceMetric::GreatCircle.validate(Point(self.lat, self.lon)).map_err(|e| e.to_string())?;
        if !(self.radius_m.is_finite() && self.radius_m >= 0.0) {
            return Err(format!("radius {} must be a non-negative number", self.radius_m));
        }
        Ok(())
    }
}

impl Row for EndUser {
    fn id(&self) -> u32 {
        self.id
    }

    fn check(&self) -> Result<(), String> {
        DistanceMetric::GreatCircle.validate(Point(self.lat, self.lon)).map_err(|e| e.to_string())
    }
}

fn read_rows<R: Row + for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> Result<Vec<R>, DataError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found = reader.headers().map_err(|e| DataError::Format { path: path.into(), message: e.to_string() })?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(DataError::Format {
            path: path.into(),
            message: format!("expected header '{}', found '{}'", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    let mut ids = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DataError::Row { path: path.into(), line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row_err = |message: String| DataError::Row { path: path.into(), line, message };
        let row: R = record.deserialize(Some(&found)).map_err(|e| row_err(e.to_string()))?;
        row.check().map_err(row_err)?;
        if !ids.insert(row.id()) {
            return Err(row_err(format!("duplicate id {}", row.id())));
        }
        rows.push(row);
    }
    Ok(rows)
}

impl Dataset {
    pub fn write(&self, stations: &Path, users: &Path) -> Result<(), DataError> {
        write_rows(stations, &self.stations)?;
        write_rows(users, &self.end_users)
    }

    /// A reproducible stand-in for a city-centre base-station dataset; see
    /// [`DeskLayout`].
    pub fn synthetic(layout: &DeskLayout, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lat0, lat1) = layout.lat_range;
        let (lon0, lon1) = layout.lon_range;
        let round6 = |v: f64| (v * 1e6).round() / 1e6;

        let stations: Vec<Station> = (0..layout.stations)
            .map(|i| Station {
                id: i as u32 + 1,
                lat: round6(rng.random_range(lat0..lat1)),
                lon: round6(rng.random_range(lon0..lon1)),
                radius_m: rng.random_range(layout.radius_m.0..=layout.radius_m.1).round(),
            })
            .collect();

        let end_users = (0..layout.users)
            .map(|i| {
                let (lat, lon) = if rng.random_bool(layout.covered_share) {
                    let s = &stations[rng.random_range(0..stations.len())];
                    let d = s.radius_m * rng.random::<f64>().sqrt();
                    let theta = rng.random_range(0.0..std::f64::consts::TAU);
                    let m_per_deg = EARTH_RADIUS_M.to_radians();
                    let dlat = d * theta.cos() / m_per_deg;
                    let dlon = d * theta.sin() / (m_per_deg * s.lat.to_radians().cos());
                    (s.lat + dlat, s.lon + dlon)
                } else {
                    (rng.random_range(lat0..lat1), rng.random_range(lon0..lon1))
                };
                EndUser { id: i as u32 + 1, lat: round6(lat), lon: round6(lon) }
            })
            .collect();
        Self { stations, end_users }
    }
}

fn write_rows<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), DataError> {
    let to_err = |e: csv::Error| DataError::Format { path: path.into(), message: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    for r in rows {
        w.serialize(r).map_err(to_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Parameters of [`Dataset::synthetic`]: stations scattered uniformly over a
/// lat/lon box, and users mostly dropped inside a random station's disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DeskLayout {
    pub stations: usize,
    pub users: usize,
    pub lat_range: (f64, f64),
    pub lon_range: (f64, f64),
    /// Inclusive range of station radii, meters.
    pub radius_m: (f64, f64),
    /// Probability that a user is placed inside some station's coverage.
    pub covered_share: f64,
}

impl Default for DeskLayout {
    /// 125 stations and 1,000 users over roughly 1.5 km x 1.8 km of a city
    /// centre, radii 100–150 m.
    fn default() -> Self {
        Self {
            stations: 125,
            users: 1000,
            lat_range: (-37.8200, -37.8070),
            lon_range: (144.9520, 144.9720),
            radius_m: (100.0, 150.0),
            covered_share: 0.9,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    const USERS: &str = "id,lat,lon\n1,-37.81,144.96\n";

    #[test]
    fn loads_well_formed_files() {
        let s = file("id,lat,lon,radius_m\n1,-37.81,144.96,120\n2,-37.812,144.961,100\n3,-37.815,144.97,150\n");
        let d = load_dataset(s.path(), file(USERS).path()).unwrap();
        assert_eq!(d.stations.len(), 3);
        assert_eq!(d.end_users.len(), 1);
        assert_eq!(d.stations[2].radius_m, 150.0);
    }

    #[test]
    fn empty_stations_file_is_rejected() {
        let s = file("id,lat,lon,radius_m\n");
        let err = load_dataset(s.path(), file(USERS).path()).unwrap_err();
        assert!(matches!(err, DataError::NoStations));
        assert_eq!(err.to_string(), "no stations in dataset");
    }

    #[test]
    fn latitude_out_of_range_names_the_row() {
        let s = file("id,lat,lon,radius_m\n1,-37.81,144.96,120\n2,91,144.96,120\n");
        match load_dataset(s.path(), file(USERS).path()).unwrap_err() {
            DataError::Row { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("latitude"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_and_duplicate_rows() {
        let s = file("id,lat,lon,radius_m\n1,-37.81,abc,120\n");
        assert!(matches!(load_dataset(s.path(), file(USERS).path()), Err(DataError::Row { line: 2, .. })));
        let s = file("id,lat,lon,radius_m\n1,-37.81,144.9,120\n1,-37.82,144.9,120\n");
        let err = load_dataset(s.path(), file(USERS).path()).unwrap_err();
        assert!(err.to_string().contains("duplicate id 1"), "{err}");
        let s = file("id,latitude,lon,radius_m\n1,-37.81,144.9,120\n");
        assert!(matches!(load_dataset(s.path(), file(USERS).path()), Err(DataError::Format { .. })));
    }

    #[test]
    fn synthetic_round_trips_through_csv() {
        let layout = DeskLayout { stations: 10, users: 40, ..DeskLayout::default() };
        let d = Dataset::synthetic(&layout, 5);
        assert_eq!(d, Dataset::synthetic(&layout, 5));
        let dir = tempfile::tempdir().unwrap();
        let (s, u) = (dir.path().join("s.csv"), dir.path().join("u.csv"));
        d.write(&s, &u).unwrap();
        assert_eq!(load_dataset(&s, &u).unwrap(), d);
    }
}
