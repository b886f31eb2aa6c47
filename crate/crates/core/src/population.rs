use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CulturalIdentity, WorldviewId, Worldviews};

/// Prototype provenance of an agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Inclusive,
    Exclusive,
}

impl Kind {
    pub const ALL: [Kind; 2] = [Kind::Inclusive, Kind::Exclusive];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Inclusive => "inclusive",
            Kind::Exclusive => "exclusive",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inclusive" => Ok(Kind::Inclusive),
            "exclusive" => Ok(Kind::Exclusive),
            other => Err(Error::InvalidParameter(format!("unknown agent kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Agent {
    pub id: usize,
    /// Declared cultural group (the prototype's group).
    pub group: WorldviewId,
    pub kind: Kind,
    pub identity: CulturalIdentity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    worldviews: Worldviews,
    agents: Vec<Agent>,
}

impl Population {
    pub fn new(worldviews: Worldviews, agents: Vec<Agent>) -> Result<Self> {
        for a in &agents {
            if a.identity.k() != worldviews.len() {
                return Err(Error::WorldviewMismatch {
                    observer: worldviews.len(),
                    target: a.identity.k(),
                });
            }
            if a.group.0 >= worldviews.len() {
                return Err(Error::InvalidParameter(format!(
                    "agent {} has group index {} out of range",
                    a.id, a.group.0
                )));
            }
        }
        Ok(Population { worldviews, agents })
    }

    pub fn worldviews(&self) -> &Worldviews {
        &self.worldviews
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub(crate) fn agents_mut(&mut self) -> &mut [Agent] {
        &mut self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn group_size(&self, group: WorldviewId) -> usize {
        self.agents.iter().filter(|a| a.group == group).count()
    }

    pub fn validate_agents(&self, epsilon: f64) -> Result<()> {
        for a in &self.agents {
            a.identity
                .validate_agent(epsilon)
                .map_err(|e| Error::InvalidIdentity(format!("agent {}: {e}", a.id)))?;
        }
        Ok(())
    }
}
