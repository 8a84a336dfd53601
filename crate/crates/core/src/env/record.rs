//! Trajectory rows and episode summaries.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engagement::Outcome;
use crate::{Error, Result};

/// One aircraft at one substep. Angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub side: Side,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub v: f64,
    pub mach: f64,
    pub alpha: f64,
    pub beta: f64,
    pub blood: f64,
    pub maneuver_id: usize,
    pub d: f64,
    pub ata: f64,
    pub aa: f64,
    pub hca: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Blue,
    Red,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub outcome: Outcome,
    pub steps: usize,
    pub blood_blue: f64,
    pub blood_red: f64,
    pub seed: Option<u64>,
}

pub fn write_trajectory<W: Write>(rows: &[TrajectoryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory_file(rows: &[TrajectoryRow], path: &Path) -> Result<()> {
    write_trajectory(rows, std::fs::File::create(path)?)
}

pub fn write_summary_file(summary: &EpisodeSummary, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(summary).map_err(|e| Error::Io(e.into()))?;
    std::fs::write(path, text)?;
    Ok(())
}
