//! JSON-lines file formats: problem instances (one record per line with
//! domain text encodings) and solve results (one record per instance plus
//! a trailing summary line).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Format {
        path: String,
        line: usize,
        msg: String,
    },
}

/// One problem instance in domain text encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceLine {
    pub start: String,
    pub goal: String,
    pub gen_steps: usize,
}

/// One solved-or-failed search over one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveRecord {
    pub inst: usize,
    pub solved: bool,
    pub path: Vec<String>,
    /// Absent when unsolved.
    pub path_cost: Option<f64>,
    pub iterations: usize,
    pub nodes_generated: usize,
    pub secs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub count: usize,
    pub solved: usize,
    pub solve_rate: Option<f64>,
    pub path_cost_mean: Option<f64>,
    pub iterations_mean: Option<f64>,
    pub nodes_generated_mean: Option<f64>,
    pub secs_mean: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SummaryLine {
    summary: SolveSummary,
}

impl SolveSummary {
    pub fn from_records(records: &[SolveRecord]) -> Self {
        let count = records.len();
        let solved = records.iter().filter(|r| r.solved).count();
        let mean = |num: f64, den: usize| {
            if den == 0 {
                None
            } else {
                Some(num / den as f64)
            }
        };
        SolveSummary {
            count,
            solved,
            solve_rate: mean(solved as f64, count),
            path_cost_mean: mean(
                records.iter().filter_map(|r| r.path_cost).sum::<f64>(),
                solved,
            ),
            iterations_mean: mean(records.iter().map(|r| r.iterations as f64).sum(), count),
            nodes_generated_mean: mean(
                records.iter().map(|r| r.nodes_generated as f64).sum(),
                count,
            ),
            secs_mean: mean(records.iter().map(|r| r.secs).sum(), count),
        }
    }
}

pub fn write_instances(path: &Path, insts: &[InstanceLine]) -> Result<(), FileError> {
    let mut out = BufWriter::new(File::create(path)?);
    for inst in insts {
        serde_json::to_writer(&mut out, inst).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_instances(path: &Path) -> Result<Vec<InstanceLine>, FileError> {
    let reader = BufReader::new(File::open(path)?);
    let mut insts = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let inst: InstanceLine = serde_json::from_str(&line).map_err(|e| FileError::Format {
            path: path.display().to_string(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        insts.push(inst);
    }
    Ok(insts)
}

pub fn write_results(
    path: &Path,
    records: &[SolveRecord],
    summary: &SolveSummary,
) -> Result<(), FileError> {
    let mut out = BufWriter::new(File::create(path)?);
    for record in records {
        serde_json::to_writer(&mut out, record).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(
        &mut out,
        &SummaryLine {
            summary: summary.clone(),
        },
    )
    .map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<(Vec<SolveRecord>, SolveSummary), FileError> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    let mut summary = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Ok(s) = serde_json::from_str::<SummaryLine>(&line) {
            summary = Some(s.summary);
            continue;
        }
        let record: SolveRecord = serde_json::from_str(&line).map_err(|e| FileError::Format {
            path: path.display().to_string(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        records.push(record);
    }
    let summary = summary.ok_or_else(|| FileError::Format {
        path: path.display().to_string(),
        line: 0,
        msg: "missing trailing summary line".to_string(),
    })?;
    Ok((records, summary))
}
