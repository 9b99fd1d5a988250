//! Ground truth the agents never see: the sampled instance, observation
//! generation, and regret accounting.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{aligned_reward, Action, ActionKind, Observation};
use crate::error::{Error, Result};

/// True environment parameters `phi` and human preferences `theta`, one per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    phi: Vec<f64>,
    theta: Vec<f64>,
}

impl ProblemInstance {
    /// Draws `2 * arms` independent uniforms (the `beta(1, 1)` prior).
    /// All `phi` values are drawn before any `theta` value.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, arms: usize) -> Result<Self> {
        if arms == 0 {
            return Err(Error::NoArms);
        }
        let phi = (0..arms).map(|_| rng.random::<f64>()).collect();
        let theta = (0..arms).map(|_| rng.random::<f64>()).collect();
        Ok(Self { phi, theta })
    }

    /// Builds an instance from explicit parameters, each of which must lie in `[0, 1]`.
    pub fn new(phi: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::NoArms);
        }
        assert_eq!(phi.len(), theta.len(), "phi and theta must have one entry per arm");
        if let Some(&bad) = phi.iter().chain(&theta).find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability(bad));
        }
        Ok(Self { phi, theta })
    }

    pub fn arms(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Draws the observation produced by `action`.
    pub fn step<R: Rng + ?Sized>(&self, action: Action, rng: &mut R) -> Observation {
        let p = match action.kind {
            ActionKind::Env => self.phi[action.index],
            ActionKind::Query => self.theta[action.index],
        };
        Observation::from_bool(rng.random_bool(p))
    }

    /// Expected reward of `action` given the instance. Queries pay -1.
    pub fn expected_reward(&self, action: Action) -> f64 {
        match action.kind {
            ActionKind::Env => aligned_reward(self.phi[action.index], self.theta[action.index]),
            ActionKind::Query => -1.0,
        }
    }

    /// Best expected reward over environment arms (`r*`).
    pub fn optimal_reward(&self) -> f64 {
        (0..self.arms())
            .map(|i| self.expected_reward(Action::env(i)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn optimal_arm(&self) -> usize {
        let mut best = 0;
        for i in 1..self.arms() {
            if self.expected_reward(Action::env(i)) > self.expected_reward(Action::env(best)) {
                best = i;
            }
        }
        best
    }

    /// Expected regret of one step: `r* - E[R | action]`.
    pub fn step_regret(&self, action: Action) -> f64 {
        self.optimal_reward() - self.expected_reward(action)
    }
}

/// One recorded interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Interactions completed, including this one (1-based).
    pub t: u64,
    pub action: Action,
    pub observation: Observation,
    pub instant_regret: f64,
    pub cum_regret: f64,
}

/// Regret ledger of one episode.
///
/// Every step enters the running sum; `records` holds the checkpointed subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub seed: u64,
    pub r_star: f64,
    pub records: Vec<TraceRecord>,
    /// Selection counts per action ordinal (environment arms then queries).
    pub action_counts: Vec<u64>,
    steps: u64,
    cum_regret: f64,
}

impl RegretTrace {
    pub fn new(seed: u64, instance: &ProblemInstance) -> Self {
        Self {
            seed,
            r_star: instance.optimal_reward(),
            records: Vec::new(),
            action_counts: vec![0; 2 * instance.arms()],
            steps: 0,
            cum_regret: 0.0,
        }
    }

    /// Charges one step to the ledger, keeping a record when `keep` is set.
    pub fn push(&mut self, instance: &ProblemInstance, action: Action, observation: Observation, keep: bool) -> f64 {
        let instant_regret = self.r_star - instance.expected_reward(action);
        self.steps += 1;
        self.cum_regret += instant_regret;
        self.action_counts[action.ordinal(instance.arms())] += 1;
        if keep {
            self.records.push(TraceRecord {
                t: self.steps,
                action,
                observation,
                instant_regret,
                cum_regret: self.cum_regret,
            });
        }
        instant_regret
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn cum_regret(&self) -> f64 {
        self.cum_regret
    }

    pub fn arms(&self) -> usize {
        self.action_counts.len() / 2
    }

    pub fn queries(&self) -> u64 {
        self.action_counts[self.arms()..].iter().sum()
    }

    /// Cumulative regret at the latest record with `t <= at`.
    pub fn cum_regret_at(&self, at: u64) -> Option<f64> {
        let idx = self.records.partition_point(|r| r.t <= at);
        idx.checked_sub(1).map(|i| self.records[i].cum_regret)
    }
}
