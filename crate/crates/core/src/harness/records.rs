//! Learning-curve records and their CSV serialization.
//!
//! CSV schema: `iteration, emse_linear, emse_db, msd_linear, msd_db,
//! source, trials`. Floats are written with Rust's shortest round-trip
//! formatting so parsed records compare equal to the in-memory values.

use std::fmt;
use std::io::{BufRead, Write};

use super::{HarnessError, HarnessResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSource {
    Simulated,
    Theory,
}

impl CurveSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveSource::Simulated => "simulated",
            CurveSource::Theory => "theory",
        }
    }
}

impl fmt::Display for CurveSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CurveSource {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "simulated" => Ok(CurveSource::Simulated),
            "theory" => Ok(CurveSource::Theory),
            other => Err(HarnessError::Config(format!(
                "unknown curve source '{other}'"
            ))),
        }
    }
}

/// One per-iteration EMSE/MSD sample, simulated or predicted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningCurveRecord {
    pub iteration: usize,
    pub emse_linear: f64,
    pub emse_db: f64,
    pub msd_linear: f64,
    pub msd_db: f64,
    pub source: CurveSource,
    pub trials: usize,
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

impl LearningCurveRecord {
    pub fn new(
        iteration: usize,
        emse_linear: f64,
        msd_linear: f64,
        source: CurveSource,
        trials: usize,
    ) -> Self {
        Self {
            iteration,
            emse_linear,
            emse_db: to_db(emse_linear),
            msd_linear,
            msd_db: to_db(msd_linear),
            source,
            trials,
        }
    }
}

pub const CSV_HEADER: &str = "iteration,emse_linear,emse_db,msd_linear,msd_db,source,trials";

pub fn write_csv<W: Write>(out: &mut W, records: &[LearningCurveRecord]) -> HarnessResult<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iteration, r.emse_linear, r.emse_db, r.msd_linear, r.msd_db, r.source, r.trials
        )?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> HarnessResult<Vec<LearningCurveRecord>> {
    let mut lines = input.lines();
    match lines.next() {
        Some(header) => {
            let header = header?;
            if header.trim() != CSV_HEADER {
                return Err(HarnessError::Config(format!(
                    "unexpected CSV header '{header}'"
                )));
            }
        }
        None => return Ok(vec![]),
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(HarnessError::Config(format!(
                "expected 7 CSV fields, got {} in '{line}'",
                fields.len()
            )));
        }
        let parse_f = |s: &str| -> HarnessResult<f64> {
            s.parse::<f64>()
                .map_err(|e| HarnessError::Config(format!("bad float '{s}': {e}")))
        };
        records.push(LearningCurveRecord {
            iteration: fields[0]
                .parse()
                .map_err(|e| HarnessError::Config(format!("bad iteration '{}': {e}", fields[0])))?,
            emse_linear: parse_f(fields[1])?,
            emse_db: parse_f(fields[2])?,
            msd_linear: parse_f(fields[3])?,
            msd_db: parse_f(fields[4])?,
            source: fields[5].parse()?,
            trials: fields[6]
                .parse()
                .map_err(|e| HarnessError::Config(format!("bad trials '{}': {e}", fields[6])))?,
        });
    }
    Ok(records)
}

/// Mean of the final `fraction` of a curve (at least one sample).
pub fn steady_state_mean(values: &[f64], fraction: f64) -> f64 {
    assert!(!values.is_empty());
    let window = ((values.len() as f64 * fraction).round() as usize)
        .clamp(1, values.len());
    let tail = &values[values.len() - window..];
    tail.iter().sum::<f64>() / tail.len() as f64
}
