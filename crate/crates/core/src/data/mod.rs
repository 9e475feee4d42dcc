//! Datasets, scenario generation and the on-disk formats.

mod allocation_file;
mod dataset;
mod generate;
mod scenario_file;
pub mod synthetic;

pub use allocation_file::{allocation_to_csv, read_allocation, write_allocation, AllocationFile, ALLOCATION_HEADER};
pub use dataset::{load_dataset, Dataset, DeskLayout, EndUser, Station};
pub use generate::{generate_scenario, GenerationSpec};
pub use scenario_file::{read_scenario, scenario_digest, scenario_from_json, scenario_to_json, write_scenario};

use std::path::Path;

use crate::error::DataError;

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io { path: path.to_path_buf(), source }
}
