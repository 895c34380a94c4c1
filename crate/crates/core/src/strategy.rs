use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Forwarding strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyId {
    /// Pending-Interest equalization.
    Pe,
    /// RTT equalization.
    Re,
    /// Weighted round robin, weights inverse to RTT.
    Ug,
    /// Weighted round robin, weights inverse to pending Interests.
    Cf,
    /// Fast pipeline filling.
    Fpf,
}

impl StrategyId {
    pub const ALL: [StrategyId; 5] = [
        StrategyId::Pe,
        StrategyId::Re,
        StrategyId::Ug,
        StrategyId::Cf,
        StrategyId::Fpf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyId::Pe => "pe",
            StrategyId::Re => "re",
            StrategyId::Ug => "ug",
            StrategyId::Cf => "cf",
            StrategyId::Fpf => "fpf",
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown strategy `{0}` (expected one of pe, re, ug, cf, fpf)")]
pub struct ParseStrategyError(pub String);

impl FromStr for StrategyId {
    type Err = ParseStrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pe" => Ok(StrategyId::Pe),
            "re" => Ok(StrategyId::Re),
            "ug" => Ok(StrategyId::Ug),
            "cf" => Ok(StrategyId::Cf),
            "fpf" => Ok(StrategyId::Fpf),
            other => Err(ParseStrategyError(other.to_owned())),
        }
    }
}
