//! JSON system specifications.
//!
//! ```json
//! {"d": 3, "m": 3, "p": ["1/8", "3/8", "3/8", "1/8"]}
//! {"preset": "cantor_convolution", "k": 4, "bias": 0.5}
//! {"preset": "uniform", "d": 4, "m": 4}
//! {"iterate": {"of": {"preset": "cantor_convolution", "k": 3}, "k": 2}}
//! ```
//!
//! Weights may be numbers or exact `"a/b"` strings; equal fractions then
//! give bitwise equal weights.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ifs::{cantor_convolution, iterate, new_system, uniform, DigitSystem, WeightVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Number(f64),
    Fraction(String),
}

impl Weight {
    pub fn value(&self) -> Result<f64> {
        match self {
            Weight::Number(x) => Ok(*x),
            Weight::Fraction(s) => parse_fraction(s),
        }
    }
}

fn parse_fraction(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("weight {s:?} is neither a number nor \"a/b\""));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(a as f64 / b as f64)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    CantorConvolution,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateSpec {
    pub of: Box<SystemSpec>,
    pub k: u32,
}

/// A digit system as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Explicit {
        d: u64,
        m: u64,
        p: Vec<Weight>,
    },
    Preset {
        preset: Preset,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bias: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<u64>,
    },
    Iterate {
        iterate: IterateSpec,
    },
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn build(&self, budget: &Budget) -> Result<DigitSystem> {
        match self {
            SystemSpec::Explicit { d, m, p } => {
                let w = p.iter().map(Weight::value).collect::<Result<Vec<_>>>()?;
                new_system(*d, *m, WeightVector::new(w)?)
            }
            SystemSpec::Preset {
                preset: Preset::CantorConvolution,
                k,
                bias,
                d,
                m,
            } => {
                if d.is_some() || m.is_some() {
                    return Err(Error::Config(
                        "cantor_convolution takes k and bias, not d or m".into(),
                    ));
                }
                let k = k.ok_or_else(|| Error::Config("cantor_convolution needs k".into()))?;
                cantor_convolution(k, bias.unwrap_or(0.5))
            }
            SystemSpec::Preset {
                preset: Preset::Uniform,
                k,
                bias,
                d,
                m,
            } => {
                if k.is_some() || bias.is_some() {
                    return Err(Error::Config("uniform takes d and m, not k or bias".into()));
                }
                match (d, m) {
                    (Some(d), Some(m)) => uniform(*d, *m),
                    _ => Err(Error::Config("uniform needs d and m".into())),
                }
            }
            SystemSpec::Iterate { iterate: it } => iterate(&it.of.build(budget)?, it.k, budget),
        }
    }
}
