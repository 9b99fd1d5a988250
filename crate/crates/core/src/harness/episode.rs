use rayon::prelude::*;

use crate::agents::AgentSpec;
use crate::belief::BeliefState;
use crate::environment::{ProblemInstance, RegretTrace};
use crate::harness::aggregate::AggregateCurve;
use crate::harness::output::{write_outputs, OutputFiles};
use crate::harness::{ExperimentConfig, HarnessError};
use crate::rng::{mix, stream_rng, Stream};

/// Root seed of the `ordinal`-th instance. Shared by every agent, so all
/// agents face the same instances and observation noise streams.
pub fn episode_seed(base_seed: u64, ordinal: u64) -> u64 {
    mix(&[base_seed, ordinal])
}

/// Plays one episode of `cfg.horizon` interactions.
///
/// The instance, observation noise, and agent randomness come from separate
/// child streams of `seed`, so the trace is a pure function of
/// `(cfg, spec, seed)`.
pub fn run_episode(cfg: &ExperimentConfig, spec: &AgentSpec, seed: u64) -> Result<RegretTrace, HarnessError> {
    let instance = ProblemInstance::sample(&mut stream_rng(seed, Stream::Instance), cfg.arms)?;
    let mut obs_rng = stream_rng(seed, Stream::Observation);
    let mut agent_rng = stream_rng(seed, Stream::Agent);
    let mut belief = BeliefState::prior(cfg.arms)?;
    let mut trace = RegretTrace::new(seed, &instance);

    let checkpoints = cfg.checkpoint_times();
    let mut next = checkpoints.iter().copied().peekable();
    for t in 1..=cfg.horizon {
        let action = spec.act(&belief, &mut agent_rng)?;
        let obs = instance.step(action, &mut obs_rng);
        belief.apply(action, obs);
        let keep = next.next_if_eq(&t).is_some();
        trace.push(&instance, action, obs, keep);
    }
    Ok(trace)
}

/// One finished episode.
#[derive(Debug, Clone)]
pub struct Episode {
    pub agent_id: String,
    pub seed_ordinal: u64,
    pub trace: RegretTrace,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// Agent-major, seed-minor.
    pub episodes: Vec<Episode>,
    /// One curve per agent, in config order.
    pub curves: Vec<AggregateCurve>,
}

impl ExperimentResult {
    pub fn curve(&self, agent_id: &str) -> Option<&AggregateCurve> {
        self.curves.iter().find(|c| c.agent_id == agent_id)
    }

    pub fn episodes_of<'a>(&'a self, agent_id: &'a str) -> impl Iterator<Item = &'a Episode> + 'a {
        self.episodes.iter().filter(move |e| e.agent_id == agent_id)
    }
}

/// Runs every (agent, seed) episode in parallel, then aggregates per agent.
pub fn simulate(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    let jobs: Vec<(&AgentSpec, u64)> = cfg
        .agents
        .iter()
        .flat_map(|spec| (0..cfg.seeds).map(move |s| (spec, s)))
        .collect();
    let episodes = jobs
        .into_par_iter()
        .map(|(spec, ordinal)| {
            let trace = run_episode(cfg, spec, episode_seed(cfg.base_seed, ordinal))?;
            Ok(Episode {
                agent_id: spec.id(),
                seed_ordinal: ordinal,
                trace,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let curves = cfg
        .agents
        .iter()
        .map(|spec| {
            let id = spec.id();
            let traces: Vec<&RegretTrace> = episodes.iter().filter(|e| e.agent_id == id).map(|e| &e.trace).collect();
            AggregateCurve::from_traces(&id, &traces)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentResult { episodes, curves })
}

/// [`simulate`], then writes raw traces and aggregate curves under `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(ExperimentResult, OutputFiles), HarnessError> {
    let result = simulate(cfg)?;
    let files = write_outputs(&cfg.output_dir, &result)?;
    Ok((result, files))
}
