//! Command-line front end for `gloss-core`: CSV ingestion, the JSON model
//! format, calibration files and thread-parallel folds and study repetitions.

pub mod calibration;
pub mod cli;
pub mod io;
pub mod model;
pub mod parallel;
