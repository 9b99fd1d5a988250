//! Decision policies. Every agent maps a belief (and its step counter) plus an
//! RNG stream to one action; none of them sees the instance or any reward.
//!
//! Ties are broken towards the lowest action ordinal, so environment arms win
//! over queries and lower indices over higher ones.

use std::fmt;

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::belief::{aligned_reward, Action, BeliefState};
use crate::error::{Error, Result};
use crate::ids_solver::{minimize_info_ratio, ActionDistribution};
use crate::infotheory::{estimate_optimal_reward, expected_shortfalls, info_gain, info_gains};

/// Default Monte-Carlo budget for the optimal-reward estimate used by IDS.
pub const DEFAULT_MC_SAMPLES: usize = 512;

/// Agent kind with exactly the parameters that kind needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentSpec {
    RewardGreedy,
    InfoGreedy,
    /// Information-greedy while `t <= tau`, reward-greedy afterwards.
    ExploreThenExploit {
        tau: u64,
    },
    EpsilonGreedy {
        epsilon: f64,
    },
    Thompson,
    /// Thompson arm with probability `1 - epsilon`, its paired query otherwise.
    MixedThompson {
        epsilon: f64,
    },
    Ids {
        mc_samples: usize,
    },
}

impl AgentSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AgentSpec::EpsilonGreedy { epsilon } | AgentSpec::MixedThompson { epsilon }
                if !(0.0..=1.0).contains(&epsilon) =>
            {
                Err(Error::InvalidProbability(epsilon))
            }
            AgentSpec::Ids { mc_samples: 0 } => Err(Error::NoSamples),
            _ => Ok(()),
        }
    }

    /// Short identifier used in file names and CSV rows.
    pub fn id(&self) -> String {
        match *self {
            AgentSpec::RewardGreedy => "reward_greedy".into(),
            AgentSpec::InfoGreedy => "info_greedy".into(),
            AgentSpec::ExploreThenExploit { tau } => format!("ete_tau{tau}"),
            AgentSpec::EpsilonGreedy { epsilon } => format!("egreedy_eps{epsilon}"),
            AgentSpec::Thompson => "ts".into(),
            AgentSpec::MixedThompson { epsilon } => format!("mixed_ts_eps{epsilon}"),
            AgentSpec::Ids { mc_samples } if mc_samples == DEFAULT_MC_SAMPLES => "ids".into(),
            AgentSpec::Ids { mc_samples } => format!("ids_m{mc_samples}"),
        }
    }

    /// Chooses the next action.
    pub fn act<R: Rng + ?Sized>(&self, belief: &BeliefState, rng: &mut R) -> Result<Action> {
        Ok(match *self {
            AgentSpec::RewardGreedy => reward_greedy_act(belief),
            AgentSpec::InfoGreedy => info_greedy_act(belief),
            AgentSpec::ExploreThenExploit { tau } => explore_then_exploit_act(belief, belief.t(), tau),
            AgentSpec::EpsilonGreedy { epsilon } => epsilon_greedy_act(belief, epsilon, rng),
            AgentSpec::Thompson => thompson_act(belief, rng),
            AgentSpec::MixedThompson { epsilon } => mixed_ts_act(belief, epsilon, rng),
            AgentSpec::Ids { mc_samples } => return ids_act(belief, mc_samples, rng),
        })
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// First ordinal attaining the maximum of `score`.
fn argmax_ordinal(actions: usize, mut score: impl FnMut(usize) -> f64) -> usize {
    let mut best = 0;
    let mut best_score = score(0);
    for ord in 1..actions {
        let s = score(ord);
        if s > best_score {
            best = ord;
            best_score = s;
        }
    }
    best
}

/// Maximizes posterior-mean reward. Never queries: arms score in `[0, 1]`, queries `-1`.
pub fn reward_greedy_act(belief: &BeliefState) -> Action {
    let arms = belief.arms();
    let ord = argmax_ordinal(belief.num_actions(), |o| {
        belief.action_reward(Action::from_ordinal(o, arms))
    });
    Action::from_ordinal(ord, arms)
}

/// Maximizes the one-step mutual information with `(theta, phi)`.
pub fn info_greedy_act(belief: &BeliefState) -> Action {
    let arms = belief.arms();
    let ord = argmax_ordinal(belief.num_actions(), |o| {
        info_gain(belief, Action::from_ordinal(o, arms))
    });
    Action::from_ordinal(ord, arms)
}

/// Information-greedy for `t <= tau`, reward-greedy afterwards.
pub fn explore_then_exploit_act(belief: &BeliefState, t: u64, tau: u64) -> Action {
    if t <= tau {
        info_greedy_act(belief)
    } else {
        reward_greedy_act(belief)
    }
}

/// Uniform over all `2N` actions with probability `epsilon`, reward-greedy otherwise.
pub fn epsilon_greedy_act<R: Rng + ?Sized>(belief: &BeliefState, epsilon: f64, rng: &mut R) -> Action {
    if rng.random_bool(epsilon) {
        Action::from_ordinal(rng.random_range(0..belief.num_actions()), belief.arms())
    } else {
        reward_greedy_act(belief)
    }
}

/// Environment arm with the largest reward under one joint posterior sample.
fn thompson_arm<R: Rng + ?Sized>(belief: &BeliefState, rng: &mut R) -> usize {
    let mut sampled = belief
        .env()
        .iter()
        .zip(belief.pref())
        .map(|(env, pref)| aligned_reward(env.sampler().sample(rng), pref.sampler().sample(rng)));
    let mut best = 0;
    let mut best_score = sampled.next().expect("at least one arm");
    for (i, s) in sampled.enumerate() {
        if s > best_score {
            best = i + 1;
            best_score = s;
        }
    }
    best
}

/// Probability matching on the optimal action. Queries score -1 in every
/// sample, so only environment arms are ever drawn.
pub fn thompson_act<R: Rng + ?Sized>(belief: &BeliefState, rng: &mut R) -> Action {
    Action::env(thompson_arm(belief, rng))
}

/// Thompson arm `a`, then `a` with probability `1 - epsilon` or its query with probability `epsilon`.
pub fn mixed_ts_act<R: Rng + ?Sized>(belief: &BeliefState, epsilon: f64, rng: &mut R) -> Action {
    let arm = thompson_arm(belief, rng);
    if rng.random_bool(epsilon) {
        Action::query(arm)
    } else {
        Action::env(arm)
    }
}

/// Inputs and output of one IDS decision.
#[derive(Debug, Clone, PartialEq)]
pub struct IdsDecision {
    pub r_star_hat: f64,
    pub deltas: Vec<f64>,
    pub gains: Vec<f64>,
    pub distribution: ActionDistribution,
    pub ratio: f64,
}

/// Computes the IDS action distribution for `belief` without sampling from it.
pub fn ids_decision<R: Rng + ?Sized>(belief: &BeliefState, mc_samples: usize, rng: &mut R) -> Result<IdsDecision> {
    let r_star_hat = estimate_optimal_reward(belief, mc_samples, rng)?;
    let deltas = expected_shortfalls(belief, r_star_hat);
    let gains = info_gains(belief);
    let solution = minimize_info_ratio(&deltas, &gains)?;
    Ok(IdsDecision {
        r_star_hat,
        deltas,
        gains,
        distribution: solution.distribution,
        ratio: solution.ratio,
    })
}

/// Information-directed sampling: draws from the distribution minimizing
/// squared expected shortfall over expected information gain.
pub fn ids_act<R: Rng + ?Sized>(belief: &BeliefState, mc_samples: usize, rng: &mut R) -> Result<Action> {
    let decision = ids_decision(belief, mc_samples, rng)?;
    let ord = decision.distribution.sample(rng);
    Ok(Action::from_ordinal(ord, belief.arms()))
}
