use serde::{Deserialize, Serialize};

use crate::environment::RegretTrace;
use crate::harness::HarnessError;

/// Cross-seed summary of cumulative regret at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: u64,
    pub mean_cum_regret: f64,
    /// Sample standard deviation over seeds divided by `sqrt(n_seeds)`; zero for one seed.
    pub stderr: f64,
    pub n_seeds: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub agent_id: String,
    pub points: Vec<CurvePoint>,
}

impl AggregateCurve {
    /// Averages traces that share one checkpoint schedule.
    ///
    /// Values at each checkpoint are sorted before summation, so the result
    /// does not depend on seed order, bit for bit.
    pub fn from_traces(agent_id: &str, traces: &[&RegretTrace]) -> Result<Self, HarnessError> {
        let first = traces
            .first()
            .ok_or_else(|| HarnessError::Invalid(format!("no traces for agent `{agent_id}`")))?;
        let schedule: Vec<u64> = first.records.iter().map(|r| r.t).collect();
        for trace in traces {
            if trace.records.len() != schedule.len() || trace.records.iter().zip(&schedule).any(|(r, &t)| r.t != t) {
                return Err(HarnessError::Invalid(format!(
                    "traces for agent `{agent_id}` use different checkpoints"
                )));
            }
        }
        let n = traces.len();
        let mut column = Vec::with_capacity(n);
        let points = schedule
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                column.clear();
                column.extend(traces.iter().map(|tr| tr.records[k].cum_regret));
                column.sort_by(f64::total_cmp);
                let mean = column.iter().sum::<f64>() / n as f64;
                let stderr = if n > 1 {
                    let ss: f64 = column.iter().map(|x| (x - mean) * (x - mean)).sum();
                    (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
                } else {
                    0.0
                };
                CurvePoint {
                    t,
                    mean_cum_regret: mean,
                    stderr,
                    n_seeds: n as u64,
                }
            })
            .collect();
        Ok(Self {
            agent_id: agent_id.to_string(),
            points,
        })
    }

    pub fn final_point(&self) -> Option<&CurvePoint> {
        self.points.last()
    }

    /// Mean cumulative regret at the latest checkpoint with `t <= at`.
    pub fn mean_at(&self, at: u64) -> Option<f64> {
        let idx = self.points.partition_point(|p| p.t <= at);
        idx.checked_sub(1).map(|i| self.points[i].mean_cum_regret)
    }
}

/// Least-squares slope of `ln(mean cumulative regret)` against `ln t` over
/// checkpoints with `t_min <= t <= t_max`.
pub fn loglog_slope(curve: &AggregateCurve, t_min: u64, t_max: u64) -> Result<f64, HarnessError> {
    let window: Vec<&CurvePoint> = curve.points.iter().filter(|p| p.t >= t_min && p.t <= t_max).collect();
    if window.len() < 2 {
        return Err(HarnessError::Slope(format!(
            "need at least 2 checkpoints in [{t_min}, {t_max}], found {}",
            window.len()
        )));
    }
    if let Some(p) = window.iter().find(|p| !(p.mean_cum_regret > 0.0)) {
        return Err(HarnessError::Slope(format!(
            "cumulative regret {} at t={} is not positive",
            p.mean_cum_regret, p.t
        )));
    }
    let xs: Vec<f64> = window.iter().map(|p| (p.t as f64).ln()).collect();
    let ys: Vec<f64> = window.iter().map(|p| p.mean_cum_regret.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
