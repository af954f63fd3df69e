//! Move-selection agents.

mod mcts;
mod random;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use mcts::{mcts_move, mcts_search, MctsConfig, SearchStats, DEFAULT_ROLLOUT_CAP};
pub use random::random_move;

use crate::error::{Error, Result};
use crate::game::GameState;
use crate::rules::Move;

/// Something that picks moves.
pub trait Agent: Send {
    fn select(&mut self, state: &GameState) -> Result<Move>;

    fn spec(&self) -> AgentSpec;
}

/// Parsed agent description: `random`, `mcts:<rollouts>` with an optional
/// `:c=<float>` suffix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AgentSpec {
    Random,
    Mcts(MctsConfig),
}

impl AgentSpec {
    pub fn build(&self, seed: u64) -> Box<dyn Agent> {
        let rng = ChaCha8Rng::seed_from_u64(seed);
        match *self {
            AgentSpec::Random => Box::new(RandomAgent { rng }),
            AgentSpec::Mcts(config) => Box::new(MctsAgent { config, rng }),
        }
    }
}

impl FromStr for AgentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::AgentSpec(s.to_string());
        let mut parts = s.trim().split(':');
        match parts.next() {
            Some("random") if parts.next().is_none() => Ok(AgentSpec::Random),
            Some("mcts") => {
                let rollouts: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if rollouts == 0 {
                    return Err(bad());
                }
                let mut config = MctsConfig {
                    rollouts,
                    ..MctsConfig::default()
                };
                if let Some(extra) = parts.next() {
                    let c = extra.strip_prefix("c=").ok_or_else(bad)?;
                    config.c = c.parse().map_err(|_| bad())?;
                    if !config.c.is_finite() || config.c < 0.0 {
                        return Err(bad());
                    }
                }
                if parts.next().is_some() {
                    return Err(bad());
                }
                Ok(AgentSpec::Mcts(config))
            }
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for AgentSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AgentSpec> for String {
    fn from(spec: AgentSpec) -> String {
        spec.to_string()
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Random => f.write_str("random"),
            AgentSpec::Mcts(config) => {
                write!(f, "mcts:{}", config.rollouts)?;
                if config.c != MctsConfig::default().c {
                    write!(f, ":c={}", config.c)?;
                }
                Ok(())
            }
        }
    }
}

pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl Agent for RandomAgent {
    fn select(&mut self, state: &GameState) -> Result<Move> {
        random_move(state, &mut self.rng)
    }

    fn spec(&self) -> AgentSpec {
        AgentSpec::Random
    }
}

pub struct MctsAgent {
    config: MctsConfig,
    rng: ChaCha8Rng,
}

impl Agent for MctsAgent {
    fn select(&mut self, state: &GameState) -> Result<Move> {
        mcts_move(state, &self.config, &mut self.rng)
    }

    fn spec(&self) -> AgentSpec {
        AgentSpec::Mcts(self.config)
    }
}
