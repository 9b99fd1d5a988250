//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comment
//! arms = 16
//! horizon = 100000
//! seeds = 10
//! base_seed = 2024
//! mc_samples = 512
//! record_stride = 1
//! checkpoints = log
//! output_dir = results
//! agent = ids mc_samples=512
//! agent = ete tau=3200
//! agent = ts
//! ```
//!
//! `agent` may repeat; listing any agent replaces the default roster. Agent
//! kinds: `reward_greedy`, `info_greedy`, `ete tau=<int>`,
//! `epsilon_greedy epsilon=<real>`, `ts`, `mixed_ts epsilon=<real>`,
//! `ids [mc_samples=<int>]` (falls back to the top-level `mc_samples`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::agents::{AgentSpec, DEFAULT_MC_SAMPLES};
use crate::harness::HarnessError;

/// Interactions recorded densely before log spacing starts.
pub const DENSE_PREFIX: u64 = 1024;
/// Log-spaced checkpoints per decade after the dense prefix.
pub const POINTS_PER_DECADE: f64 = 100.0;

/// Which interactions an episode keeps in its trace. The final interaction is always kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckpointPolicy {
    /// Every `record_stride`-th interaction.
    Linear,
    /// Every interaction up to [`DENSE_PREFIX`], then about [`POINTS_PER_DECADE`]
    /// log-spaced points per decade. Ignores `record_stride`.
    #[default]
    Log,
}

impl FromStr for CheckpointPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Self::Linear),
            "log" => Ok(Self::Log),
            other => Err(format!("unknown checkpoint policy `{other}` (expected linear or log)")),
        }
    }
}

impl fmt::Display for CheckpointPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Log => "log",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub arms: usize,
    pub horizon: u64,
    pub seeds: u64,
    pub base_seed: u64,
    pub agents: Vec<AgentSpec>,
    pub mc_samples: usize,
    pub record_stride: u64,
    pub checkpoints: CheckpointPolicy,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    /// Sixteen arms, ten instances, IDS against both explore-then-exploit
    /// agents and Thompson sampling over 10^5 interactions.
    fn default() -> Self {
        Self {
            arms: 16,
            horizon: 100_000,
            seeds: 10,
            base_seed: 2024,
            agents: vec![
                AgentSpec::Ids {
                    mc_samples: DEFAULT_MC_SAMPLES,
                },
                AgentSpec::ExploreThenExploit { tau: 3200 },
                AgentSpec::ExploreThenExploit { tau: 16_000 },
                AgentSpec::Thompson,
            ],
            mc_samples: DEFAULT_MC_SAMPLES,
            record_stride: 1,
            checkpoints: CheckpointPolicy::Log,
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |m: &str| Err(HarnessError::Invalid(m.to_string()));
        if self.arms == 0 {
            return invalid("arms must be at least 1");
        }
        if self.horizon == 0 {
            return invalid("horizon must be at least 1");
        }
        if self.seeds == 0 {
            return invalid("seeds must be at least 1");
        }
        if self.record_stride == 0 {
            return invalid("record_stride must be at least 1");
        }
        if self.mc_samples == 0 {
            return invalid("mc_samples must be at least 1");
        }
        if self.agents.is_empty() {
            return invalid("at least one agent is required");
        }
        let mut seen = BTreeMap::new();
        for spec in &self.agents {
            spec.validate()?;
            if seen.insert(spec.id(), ()).is_some() {
                return Err(HarnessError::Invalid(format!("duplicate agent `{}`", spec.id())));
            }
        }
        Ok(())
    }

    /// Interactions (1-based) whose records are kept, ascending, always ending at `horizon`.
    /// The switch point of every explore-then-exploit agent is included.
    pub fn checkpoint_times(&self) -> Vec<u64> {
        let horizon = self.horizon;
        let mut times: Vec<u64> = match self.checkpoints {
            CheckpointPolicy::Linear => (1..=horizon / self.record_stride)
                .map(|k| k * self.record_stride)
                .collect(),
            CheckpointPolicy::Log => {
                let mut times: Vec<u64> = (1..=horizon.min(DENSE_PREFIX)).collect();
                let first = ((DENSE_PREFIX as f64).log10() * POINTS_PER_DECADE).ceil() as u64;
                let mut k = first;
                loop {
                    let t = 10f64.powf(k as f64 / POINTS_PER_DECADE).round() as u64;
                    if t > horizon {
                        break;
                    }
                    if t > *times.last().unwrap_or(&0) {
                        times.push(t);
                    }
                    k += 1;
                }
                times
            }
        };
        for spec in &self.agents {
            if let AgentSpec::ExploreThenExploit { tau } = *spec {
                if tau >= 1 && tau <= horizon {
                    times.push(tau);
                }
            }
        }
        times.push(horizon);
        times.sort_unstable();
        times.dedup();
        times
    }

    /// Parses the flat config format, starting from [`ExperimentConfig::default`].
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        let mut agent_lines: Vec<(usize, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarnessError::Config { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "arms" => cfg.arms = parse_value(value).map_err(err)?,
                "horizon" => cfg.horizon = parse_value(value).map_err(err)?,
                "seeds" => cfg.seeds = parse_value(value).map_err(err)?,
                "base_seed" => cfg.base_seed = parse_value(value).map_err(err)?,
                "mc_samples" => cfg.mc_samples = parse_value(value).map_err(err)?,
                "record_stride" => cfg.record_stride = parse_value(value).map_err(err)?,
                "checkpoints" => cfg.checkpoints = value.parse().map_err(err)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "agent" => agent_lines.push((line_no, value.to_string())),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        if !agent_lines.is_empty() {
            cfg.agents = agent_lines
                .iter()
                .map(|(line, text)| {
                    parse_agent(text, cfg.mc_samples).map_err(|message| HarnessError::Config { line: *line, message })
                })
                .collect::<Result<_, _>>()?;
        } else {
            for spec in &mut cfg.agents {
                if let AgentSpec::Ids { mc_samples } = spec {
                    *mc_samples = cfg.mc_samples;
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Renders the config in the format [`ExperimentConfig::parse`] reads.
    pub fn to_config_string(&self) -> String {
        let mut out = format!(
            "arms = {}\nhorizon = {}\nseeds = {}\nbase_seed = {}\nmc_samples = {}\nrecord_stride = {}\ncheckpoints = {}\noutput_dir = {}\n",
            self.arms,
            self.horizon,
            self.seeds,
            self.base_seed,
            self.mc_samples,
            self.record_stride,
            self.checkpoints,
            self.output_dir.display()
        );
        for spec in &self.agents {
            out.push_str("agent = ");
            out.push_str(&agent_entry(spec));
            out.push('\n');
        }
        out
    }
}

fn parse_value<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| format!("cannot parse `{value}`: {e}"))
}

fn agent_entry(spec: &AgentSpec) -> String {
    match *spec {
        AgentSpec::RewardGreedy => "reward_greedy".into(),
        AgentSpec::InfoGreedy => "info_greedy".into(),
        AgentSpec::ExploreThenExploit { tau } => format!("ete tau={tau}"),
        AgentSpec::EpsilonGreedy { epsilon } => format!("epsilon_greedy epsilon={epsilon}"),
        AgentSpec::Thompson => "ts".into(),
        AgentSpec::MixedThompson { epsilon } => format!("mixed_ts epsilon={epsilon}"),
        AgentSpec::Ids { mc_samples } => format!("ids mc_samples={mc_samples}"),
    }
}

/// Parses one agent entry such as `ete tau=3200`.
pub fn parse_agent(text: &str, default_mc_samples: usize) -> Result<AgentSpec, String> {
    let mut words = text.split_whitespace();
    let kind = words.next().ok_or("empty agent entry")?;
    let mut params = BTreeMap::new();
    for word in words {
        let (k, v) = word
            .split_once('=')
            .ok_or_else(|| format!("agent parameter `{word}` is not `name=value`"))?;
        params.insert(k.to_string(), v.to_string());
    }
    let mut take = |name: &str| params.remove(name);
    let spec = match kind {
        "reward_greedy" => AgentSpec::RewardGreedy,
        "info_greedy" => AgentSpec::InfoGreedy,
        "ete" | "explore_then_exploit" => AgentSpec::ExploreThenExploit {
            tau: parse_value(&take("tau").ok_or("ete requires tau=<int>")?)?,
        },
        "epsilon_greedy" | "egreedy" => AgentSpec::EpsilonGreedy {
            epsilon: parse_value(&take("epsilon").ok_or("epsilon_greedy requires epsilon=<real>")?)?,
        },
        "ts" | "thompson" => AgentSpec::Thompson,
        "mixed_ts" => AgentSpec::MixedThompson {
            epsilon: parse_value(&take("epsilon").ok_or("mixed_ts requires epsilon=<real>")?)?,
        },
        "ids" => AgentSpec::Ids {
            mc_samples: match take("mc_samples") {
                Some(v) => parse_value(&v)?,
                None => default_mc_samples,
            },
        },
        other => return Err(format!("unknown agent kind `{other}`")),
    };
    if let Some(extra) = params.keys().next() {
        return Err(format!("agent `{kind}` does not take parameter `{extra}`"));
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}
