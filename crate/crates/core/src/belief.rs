//! Actions, observations, and the conjugate belief state agents act on.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether an action touches the environment or asks the human.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    /// Pull environment arm `a`, observing `Bernoulli(phi_a)`.
    Env,
    /// Ask the human about arm `a`, observing `Bernoulli(theta_a)` at reward -1.
    Query,
}

impl ActionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Env => "env",
            ActionKind::Query => "query",
        }
    }
}

/// One of the `2N` actions. An environment arm and its paired query share an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    pub index: usize,
}

impl Action {
    pub const fn env(index: usize) -> Self {
        Self {
            kind: ActionKind::Env,
            index,
        }
    }

    pub const fn query(index: usize) -> Self {
        Self {
            kind: ActionKind::Query,
            index,
        }
    }

    pub fn is_query(self) -> bool {
        self.kind == ActionKind::Query
    }

    /// Position in the flat action list: environment arms `0..N`, then queries `N..2N`.
    pub fn ordinal(self, arms: usize) -> usize {
        match self.kind {
            ActionKind::Env => self.index,
            ActionKind::Query => arms + self.index,
        }
    }

    /// Inverse of [`Action::ordinal`]. Panics if `ordinal >= 2 * arms`.
    pub fn from_ordinal(ordinal: usize, arms: usize) -> Self {
        assert!(ordinal < 2 * arms, "action ordinal {ordinal} out of range");
        if ordinal < arms {
            Self::env(ordinal)
        } else {
            Self::query(ordinal - arms)
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ActionKind::Env => write!(f, "{}", self.index),
            ActionKind::Query => write!(f, "{}~", self.index),
        }
    }
}

/// A binary observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observation {
    Zero,
    One,
}

impl Observation {
    pub fn from_bool(bit: bool) -> Self {
        if bit {
            Observation::One
        } else {
            Observation::Zero
        }
    }

    pub fn value(self) -> u8 {
        match self {
            Observation::Zero => 0,
            Observation::One => 1,
        }
    }
}

/// Conjugate posterior `beta(alpha, beta)` over one unknown probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPosterior {
    alpha: f64,
    beta: f64,
}

impl Default for BetaPosterior {
    fn default() -> Self {
        Self::uniform()
    }
}

impl BetaPosterior {
    /// The `beta(1, 1)` prior.
    pub const fn uniform() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidBeta { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Incorporates one observation: a 1 increments `alpha`, a 0 increments `beta`.
    #[must_use]
    pub fn update(self, obs: Observation) -> Self {
        match obs {
            Observation::One => Self {
                alpha: self.alpha + 1.0,
                ..self
            },
            Observation::Zero => Self {
                beta: self.beta + 1.0,
                ..self
            },
        }
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Observations absorbed since the uniform prior.
    pub fn observations(&self) -> f64 {
        self.alpha + self.beta - 2.0
    }

    /// Sampler for this posterior.
    pub fn sampler(&self) -> BetaSampler {
        BetaSampler::new(self.alpha, self.beta)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// `beta(alpha, beta)` draws as `X / (X + Y)` with independent
/// `X ~ gamma(alpha)` and `Y ~ gamma(beta)`. For shapes of at least 1 the gamma
/// draws use the Marsaglia-Tsang squeeze, which rarely needs a logarithm.
#[derive(Debug, Clone, Copy)]
pub struct BetaSampler {
    x: Gamma<f64>,
    y: Gamma<f64>,
}

impl BetaSampler {
    fn new(alpha: f64, beta: f64) -> Self {
        Self {
            x: Gamma::new(alpha, 1.0).expect("positive shape"),
            y: Gamma::new(beta, 1.0).expect("positive shape"),
        }
    }
}

impl Distribution<f64> for BetaSampler {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.x.sample(rng);
        let y = self.y.sample(rng);
        x / (x + y)
    }
}

/// Mean reward of an arm whose outcome probability is `phi` and whose
/// preference is `theta`: `phi*theta + (1-phi)*(1-theta)`.
///
/// Evaluated in the centred form `1/2 + 2(phi - 1/2)(theta - 1/2)`, which is
/// exactly `0.5` whenever either argument is exactly `0.5`.
#[inline]
pub fn aligned_reward(phi: f64, theta: f64) -> f64 {
    0.5 + 2.0 * (phi - 0.5) * (theta - 0.5)
}

/// Per-arm posteriors over the environment (`phi`) and the human's preferences (`theta`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    env: Vec<BetaPosterior>,
    pref: Vec<BetaPosterior>,
    t: u64,
}

impl BeliefState {
    /// Uniform prior over all `2 * arms` unknowns.
    pub fn prior(arms: usize) -> Result<Self> {
        if arms == 0 {
            return Err(Error::NoArms);
        }
        Ok(Self {
            env: vec![BetaPosterior::uniform(); arms],
            pref: vec![BetaPosterior::uniform(); arms],
            t: 0,
        })
    }

    /// Builds a belief from explicit posteriors. `t` is set to the number of
    /// observations they encode, rounded down.
    pub fn from_posteriors(env: Vec<BetaPosterior>, pref: Vec<BetaPosterior>) -> Result<Self> {
        if env.is_empty() {
            return Err(Error::NoArms);
        }
        assert_eq!(env.len(), pref.len(), "env and pref must have one entry per arm");
        let t = env
            .iter()
            .chain(&pref)
            .map(BetaPosterior::observations)
            .sum::<f64>()
            .max(0.0) as u64;
        Ok(Self { env, pref, t })
    }

    pub fn arms(&self) -> usize {
        self.env.len()
    }

    pub fn num_actions(&self) -> usize {
        2 * self.env.len()
    }

    /// Number of observations absorbed so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn env(&self) -> &[BetaPosterior] {
        &self.env
    }

    pub fn pref(&self) -> &[BetaPosterior] {
        &self.pref
    }

    /// The posterior an action informs.
    pub fn posterior(&self, action: Action) -> &BetaPosterior {
        match action.kind {
            ActionKind::Env => &self.env[action.index],
            ActionKind::Query => &self.pref[action.index],
        }
    }

    pub fn set_env(&mut self, arm: usize, p: BetaPosterior) {
        self.env[arm] = p;
    }

    pub fn set_pref(&mut self, arm: usize, p: BetaPosterior) {
        self.pref[arm] = p;
    }

    /// Posterior-mean reward of environment arm `arm`. Relies on `phi_a` and
    /// `theta_a` being independent under the belief.
    pub fn expected_reward(&self, arm: usize) -> f64 {
        aligned_reward(self.env[arm].mean(), self.pref[arm].mean())
    }

    /// Posterior-mean reward of any action; queries always pay -1.
    pub fn action_reward(&self, action: Action) -> f64 {
        match action.kind {
            ActionKind::Env => self.expected_reward(action.index),
            ActionKind::Query => -1.0,
        }
    }

    /// Absorbs one (action, observation) pair in place.
    pub fn apply(&mut self, action: Action, obs: Observation) {
        let slot = match action.kind {
            ActionKind::Env => &mut self.env[action.index],
            ActionKind::Query => &mut self.pref[action.index],
        };
        *slot = slot.update(obs);
        self.t += 1;
    }

    /// Value-returning form of [`BeliefState::apply`].
    #[must_use]
    pub fn applied(mut self, action: Action, obs: Observation) -> Self {
        self.apply(action, obs);
        self
    }

    pub fn total_observations(&self) -> f64 {
        self.env.iter().chain(&self.pref).map(BetaPosterior::observations).sum()
    }
}
