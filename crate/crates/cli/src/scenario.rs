//! Scenario description: what to run, with which parameters, and where to
//! write it. Loaded from TOML and overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AsymVariant {
    OneGap,
    OneArc,
    Transition,
    TransitionLargeK,
    TwoArc,
    TwoGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    OneGap,
    Transition,
    Continuity,
    OneArc,
    Appendix,
    Diffid,
    Geometry,
    ThetaRegime,
    Legendre,
    Scaling,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::OneGap,
        Suite::Transition,
        Suite::Continuity,
        Suite::OneArc,
        Suite::Appendix,
        Suite::Diffid,
        Suite::Geometry,
        Suite::ThetaRegime,
        Suite::Legendre,
        Suite::Scaling,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Fredholm,
    Toeplitz,
    Asym(AsymVariant),
    Verify(Suite),
}

const ASYM_NAMES: [(&str, AsymVariant); 6] = [
    ("one-gap", AsymVariant::OneGap),
    ("one-arc", AsymVariant::OneArc),
    ("transition", AsymVariant::Transition),
    ("transition-large-k", AsymVariant::TransitionLargeK),
    ("two-arc", AsymVariant::TwoArc),
    ("two-gap", AsymVariant::TwoGap),
];

const SUITE_NAMES: [(&str, Suite); 11] = [
    ("one-gap", Suite::OneGap),
    ("transition", Suite::Transition),
    ("continuity", Suite::Continuity),
    ("one-arc", Suite::OneArc),
    ("appendix", Suite::Appendix),
    ("diffid", Suite::Diffid),
    ("geometry", Suite::Geometry),
    ("theta-regime", Suite::ThetaRegime),
    ("legendre", Suite::Legendre),
    ("scaling", Suite::Scaling),
    ("all", Suite::All),
];

pub fn parse_asym(name: &str) -> CliResult<AsymVariant> {
    ASYM_NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let known: Vec<&str> = ASYM_NAMES.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!("unknown asym variant '{name}' (known: {})", known.join(", ")))
        })
}

pub fn parse_suite(name: &str) -> CliResult<Suite> {
    SUITE_NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let known: Vec<&str> = SUITE_NAMES.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!("unknown verify suite '{name}' (known: {})", known.join(", ")))
        })
}

impl FromStr for Kind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "fredholm" => Ok(Kind::Fredholm),
            "toeplitz" => Ok(Kind::Toeplitz),
            _ => {
                if let Some(v) = s.strip_prefix("asym-") {
                    Ok(Kind::Asym(parse_asym(v)?))
                } else if let Some(v) = s.strip_prefix("verify-") {
                    Ok(Kind::Verify(parse_suite(v)?))
                } else {
                    Err(CliError::Config(format!(
                        "unknown kind '{s}' (expected fredholm, toeplitz, asym-<variant> or verify-<suite>)"
                    )))
                }
            }
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Fredholm => write!(f, "fredholm"),
            Kind::Toeplitz => write!(f, "toeplitz"),
            Kind::Asym(v) => {
                let name = ASYM_NAMES.iter().find(|(_, x)| x == v).unwrap().0;
                write!(f, "asym-{name}")
            }
            Kind::Verify(s) => {
                let name = SUITE_NAMES.iter().find(|(_, x)| x == s).unwrap().0;
                write!(f, "verify-{name}")
            }
        }
    }
}

/// Numeric scenario parameters. Unset values fall back to per-kind defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub s: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub nu: Option<f64>,
    pub n: Option<usize>,
    pub nodes: Option<usize>,
    pub k: Option<usize>,
}

/// Names accepted by `--axis`.
pub const AXES: [&str; 7] = ["s", "alpha", "beta", "nu", "n", "nodes", "k"];

impl Params {
    /// `other` wins wherever it is set.
    pub fn overridden_by(self, other: Params) -> Params {
        Params {
            s: other.s.or(self.s),
            alpha: other.alpha.or(self.alpha),
            beta: other.beta.or(self.beta),
            nu: other.nu.or(self.nu),
            n: other.n.or(self.n),
            nodes: other.nodes.or(self.nodes),
            k: other.k.or(self.k),
        }
    }

    pub fn with_axis(mut self, axis: &str, value: f64) -> CliResult<Params> {
        let as_count = |v: f64| -> CliResult<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(CliError::Config(format!(
                    "axis '{axis}' needs a non-negative integer, got {v}"
                )))
            }
        };
        match axis {
            "s" => self.s = Some(value),
            "alpha" => self.alpha = Some(value),
            "beta" => self.beta = Some(value),
            "nu" => self.nu = Some(value),
            "n" => self.n = Some(as_count(value)?),
            "nodes" => self.nodes = Some(as_count(value)?),
            "k" => self.k = Some(as_count(value)?),
            _ => {
                return Err(CliError::Config(format!(
                    "unknown axis '{axis}' (known: {})",
                    AXES.join(", ")
                )))
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Config(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Option<String>,
    pub values: Option<Vec<f64>>,
}

/// On-disk scenario file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<String>,
    #[serde(default)]
    pub parameters: Params,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(toml::from_str(&text)?)
    }
}

/// Fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: Kind,
    pub params: Params,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Parse `a,b,c` into numbers.
pub fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("'{v}' is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for name in [
            "fredholm",
            "toeplitz",
            "asym-two-gap",
            "verify-diffid",
            "verify-theta-regime",
        ] {
            assert_eq!(name.parse::<Kind>().unwrap().to_string(), name);
        }
        assert!("asym-three-gap".parse::<Kind>().is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let file = Params {
            s: Some(4.0),
            nu: Some(0.1),
            ..Params::default()
        };
        let flags = Params {
            s: Some(8.0),
            ..Params::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.s, Some(8.0));
        assert_eq!(merged.nu, Some(0.1));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let bad = "kind = \"fredholm\"\n[parameters]\nsigma = 3.0\n";
        assert!(toml::from_str::<ConfigFile>(bad).is_err());
        let good = "kind = \"fredholm\"\n[parameters]\ns = 3.0\n[sweep]\naxis = \"s\"\nvalues = [1, 2]\n";
        let cfg: ConfigFile = toml::from_str(good).unwrap();
        assert_eq!(cfg.parameters.s, Some(3.0));
        assert_eq!(cfg.sweep.values, Some(vec![1.0, 2.0]));
    }

    #[test]
    fn axis_values() {
        assert_eq!(parse_values("4, 8,12").unwrap(), vec![4.0, 8.0, 12.0]);
        assert!(parse_values("").unwrap().is_empty());
        assert!(parse_values("4,x").is_err());
        assert!(Params::default().with_axis("n", 2.5).is_err());
        assert_eq!(Params::default().with_axis("n", 256.0).unwrap().n, Some(256));
        assert!(Params::default().with_axis("theta", 1.0).is_err());
    }
}
