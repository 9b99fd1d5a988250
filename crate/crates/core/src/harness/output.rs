//! CSV files written by an experiment run.
//!
//! ```text
//! <output_dir>/traces/<agent_id>_seed<NN>.csv   agent_id,seed,t,action_kind,action_index,observation,instant_regret,cum_regret
//! <output_dir>/aggregate/<agent_id>.csv         agent_id,t,mean_cum_regret,stderr,n_seeds
//! <output_dir>/aggregate.csv                    all agents, same columns
//! ```
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environment::RegretTrace;
use crate::harness::aggregate::{AggregateCurve, CurvePoint};
use crate::harness::episode::ExperimentResult;
use crate::harness::HarnessError;

pub const TRACE_COLUMNS: [&str; 8] = [
    "agent_id",
    "seed",
    "t",
    "action_kind",
    "action_index",
    "observation",
    "instant_regret",
    "cum_regret",
];

pub const AGGREGATE_COLUMNS: [&str; 5] = ["agent_id", "t", "mean_cum_regret", "stderr", "n_seeds"];

#[derive(Serialize)]
struct TraceRow<'a> {
    agent_id: &'a str,
    seed: u64,
    t: u64,
    action_kind: &'a str,
    action_index: usize,
    observation: u8,
    instant_regret: f64,
    cum_regret: f64,
}

#[derive(Serialize, Deserialize)]
struct AggregateRow {
    agent_id: String,
    t: u64,
    mean_cum_regret: f64,
    stderr: f64,
    n_seeds: u64,
}

/// Paths produced by one run.
#[derive(Debug, Clone, Default)]
pub struct OutputFiles {
    pub traces: Vec<PathBuf>,
    pub aggregates: Vec<PathBuf>,
    pub combined: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Raw trace CSV content for one episode.
pub fn trace_csv_string(agent_id: &str, trace: &RegretTrace) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(TRACE_COLUMNS)?;
    for r in &trace.records {
        w.serialize(TraceRow {
            agent_id,
            seed: trace.seed,
            t: r.t,
            action_kind: r.action.kind.as_str(),
            action_index: r.action.index,
            observation: r.observation.value(),
            instant_regret: r.instant_regret,
            cum_regret: r.cum_regret,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_trace_csv(path: &Path, agent_id: &str, trace: &RegretTrace) -> Result<(), HarnessError> {
    let body = trace_csv_string(agent_id, trace).map_err(csv_err(path))?;
    write_atomic(path, body.as_bytes())
}

fn aggregate_csv_string<'a>(curves: impl IntoIterator<Item = &'a AggregateCurve>) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(AGGREGATE_COLUMNS)?;
    for curve in curves {
        for p in &curve.points {
            w.serialize(AggregateRow {
                agent_id: curve.agent_id.clone(),
                t: p.t,
                mean_cum_regret: p.mean_cum_regret,
                stderr: p.stderr,
                n_seeds: p.n_seeds,
            })?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_aggregate_csv<'a>(
    path: &Path,
    curves: impl IntoIterator<Item = &'a AggregateCurve>,
) -> Result<(), HarnessError> {
    let body = aggregate_csv_string(curves).map_err(csv_err(path))?;
    write_atomic(path, body.as_bytes())
}

/// Reads an aggregate CSV back into one curve per agent, in order of first appearance.
pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateCurve>, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    let schema = |message: String| HarnessError::Schema {
        path: path.to_path_buf(),
        message,
    };
    for (i, want) in AGGREGATE_COLUMNS.iter().enumerate() {
        match headers.get(i) {
            Some(got) if got == *want => {}
            Some(got) => return Err(schema(format!("column {} is `{got}`, expected `{want}`", i + 1))),
            None => return Err(schema(format!("missing column `{want}`"))),
        }
    }
    if let Some(extra) = headers.get(AGGREGATE_COLUMNS.len()) {
        return Err(schema(format!("unexpected column `{extra}`")));
    }
    let mut curves: Vec<AggregateCurve> = Vec::new();
    for row in reader.deserialize::<AggregateRow>() {
        let row = row.map_err(csv_err(path))?;
        let point = CurvePoint {
            t: row.t,
            mean_cum_regret: row.mean_cum_regret,
            stderr: row.stderr,
            n_seeds: row.n_seeds,
        };
        match curves.iter_mut().find(|c| c.agent_id == row.agent_id) {
            Some(c) => c.points.push(point),
            None => curves.push(AggregateCurve {
                agent_id: row.agent_id,
                points: vec![point],
            }),
        }
    }
    for c in &curves {
        if c.points.windows(2).any(|w| w[0].t >= w[1].t) {
            return Err(schema(format!(
                "t is not strictly increasing for agent `{}`",
                c.agent_id
            )));
        }
    }
    Ok(curves)
}

pub(crate) fn write_outputs(dir: &Path, result: &ExperimentResult) -> Result<OutputFiles, HarnessError> {
    let trace_dir = dir.join("traces");
    let agg_dir = dir.join("aggregate");
    for d in [&trace_dir, &agg_dir] {
        fs::create_dir_all(d).map_err(io_err(d))?;
    }
    let mut files = OutputFiles::default();
    for ep in &result.episodes {
        let path = trace_dir.join(format!("{}_seed{:02}.csv", ep.agent_id, ep.seed_ordinal));
        write_trace_csv(&path, &ep.agent_id, &ep.trace)?;
        files.traces.push(path);
    }
    for curve in &result.curves {
        let path = agg_dir.join(format!("{}.csv", curve.agent_id));
        write_aggregate_csv(&path, [curve])?;
        files.aggregates.push(path);
    }
    files.combined = dir.join("aggregate.csv");
    write_aggregate_csv(&files.combined, &result.curves)?;
    Ok(files)
}
