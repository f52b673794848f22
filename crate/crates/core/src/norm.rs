use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which induced p-norm to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::One, NormKind::Two, NormKind::Inf];

    /// Interprets a numeric p; only 1, 2 and +inf are supported.
    pub fn from_p(p: f64) -> Result<Self, Error> {
        if p == 1.0 {
            Ok(NormKind::One)
        } else if p == 2.0 {
            Ok(NormKind::Two)
        } else if p == f64::INFINITY {
            Ok(NormKind::Inf)
        } else {
            Err(Error::arg(format!("unsupported norm p = {p}; expected 1, 2 or inf")))
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::One => "1",
            NormKind::Two => "2",
            NormKind::Inf => "inf",
        })
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(NormKind::One),
            "2" => Ok(NormKind::Two),
            "inf" | "infinity" | "∞" => Ok(NormKind::Inf),
            other => Err(Error::arg(format!("unsupported norm '{other}'; expected 1, 2 or inf"))),
        }
    }
}
