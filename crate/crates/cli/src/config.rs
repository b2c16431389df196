//! Experiment configuration and its flat `key = value` file format.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use dickson_core::rscode::{DEFAULT_DP_BUDGET, DEFAULT_SUBSET_BUDGET};
use dickson_core::FiniteField;
use serde::{Serialize, Serializer};

/// Non-empty sorted set of integers, written as `2..5,7`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSet(Vec<u64>);

impl IntSet {
    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

impl FromStr for IntSet {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BTreeSet::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.split_once("..") {
                Some((lo, hi)) => {
                    let lo: u64 = lo
                        .trim()
                        .parse()
                        .with_context(|| format!("bad range start in {item:?}"))?;
                    let hi: u64 = hi
                        .trim()
                        .parse()
                        .with_context(|| format!("bad range end in {item:?}"))?;
                    if lo > hi {
                        bail!("empty range {item:?}");
                    }
                    out.extend(lo..=hi);
                }
                None => {
                    out.insert(
                        item.parse::<u64>()
                            .with_context(|| format!("bad integer {item:?}"))?,
                    );
                }
            }
        }
        if out.is_empty() {
            bail!("empty range {s:?}");
        }
        Ok(IntSet(out.into_iter().collect()))
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let start = self.0[i];
            let mut j = i;
            while j + 1 < self.0.len() && self.0[j + 1] == self.0[j] + 1 {
                j += 1;
            }
            parts.push(if j == i {
                start.to_string()
            } else {
                format!("{start}..{}", self.0[j])
            });
            i = j + 1;
        }
        f.write_str(&parts.join(","))
    }
}

impl Serialize for IntSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parameter `a`: every nonzero element, or an explicit set of encodings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElemSelection {
    All,
    Set(IntSet),
}

impl ElemSelection {
    /// Nonzero encodings below `q`, in order.
    pub fn resolve(&self, q: u64) -> Vec<u64> {
        match self {
            ElemSelection::All => (1..q).collect(),
            ElemSelection::Set(s) => s
                .values()
                .iter()
                .copied()
                .filter(|&a| a != 0 && a < q)
                .collect(),
        }
    }
}

impl FromStr for ElemSelection {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "all" {
            Ok(ElemSelection::All)
        } else {
            Ok(ElemSelection::Set(s.parse()?))
        }
    }
}

impl fmt::Display for ElemSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElemSelection::All => f.write_str("all"),
            ElemSelection::Set(s) => s.fmt(f),
        }
    }
}

impl Serialize for ElemSelection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    ValueSet,
    Preimage,
    CharSum,
    Sieve,
    DeepHole,
    Region,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::ValueSet,
        Suite::Preimage,
        Suite::CharSum,
        Suite::Sieve,
        Suite::DeepHole,
        Suite::Region,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ValueSet => "valueset",
            Suite::Preimage => "preimage",
            Suite::CharSum => "charsum",
            Suite::Sieve => "sieve",
            Suite::DeepHole => "deephole",
            Suite::Region => "region",
        }
    }

    /// Whether instances also range over `k`.
    pub fn uses_k(self) -> bool {
        matches!(self, Suite::Sieve | Suite::DeepHole)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `valueset,region` or `all` into a sorted list.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    let mut out = BTreeSet::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if item == "all" {
            out.extend(Suite::ALL);
            continue;
        }
        let suite = Suite::ALL
            .into_iter()
            .find(|su| su.name() == item)
            .ok_or_else(|| anyhow!("unknown suite {item:?}"))?;
        out.insert(suite);
    }
    if out.is_empty() {
        bail!("no suites selected");
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => bail!("unknown format {s:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub field: Vec<String>,
    pub n: IntSet,
    pub a: ElemSelection,
    pub k: IntSet,
    pub suites: Vec<Suite>,
    pub c1: f64,
    /// Take every `stride`-th element where a suite sweeps the field.
    pub stride: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub format: Format,
    pub budget_subsets: u128,
    pub budget_dp: u128,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            field: Vec::new(),
            n: "2..6".parse().unwrap(),
            a: ElemSelection::All,
            k: "1..2".parse().unwrap(),
            suites: Suite::ALL.to_vec(),
            c1: 0.015,
            stride: 1,
            out: None,
            format: Format::Json,
            budget_subsets: DEFAULT_SUBSET_BUDGET,
            budget_dp: DEFAULT_DP_BUDGET,
        }
    }
}

const KEYS: [&str; 11] = [
    "field",
    "n",
    "a",
    "k",
    "suites",
    "c1",
    "stride",
    "out",
    "format",
    "budget-subsets",
    "budget-dp",
];

impl ExperimentConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "field" => self.field = value.split_whitespace().map(str::to_string).collect(),
            "n" => self.n = value.parse()?,
            "a" => self.a = value.parse()?,
            "k" => self.k = value.parse()?,
            "suites" => self.suites = parse_suites(value)?,
            "c1" => self.c1 = value.parse().with_context(|| format!("bad c1 {value:?}"))?,
            "stride" => {
                self.stride = value
                    .parse()
                    .with_context(|| format!("bad stride {value:?}"))?
            }
            "out" => self.out = Some(value.to_string()).filter(|v| !v.is_empty()),
            "format" => self.format = value.parse()?,
            "budget-subsets" => {
                self.budget_subsets = value
                    .parse()
                    .with_context(|| format!("bad budget {value:?}"))?
            }
            "budget-dp" => {
                self.budget_dp = value
                    .parse()
                    .with_context(|| format!("bad budget {value:?}"))?
            }
            _ => bail!("unknown config key {key:?}"),
        }
        Ok(())
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", lineno + 1))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                bail!("line {}: duplicate key {key:?}", lineno + 1);
            }
            cfg.set(key, value)
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(cfg)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "field" => self.field.join(" "),
                "n" => self.n.to_string(),
                "a" => self.a.to_string(),
                "k" => self.k.to_string(),
                "suites" => self
                    .suites
                    .iter()
                    .map(|s| s.name())
                    .collect::<Vec<_>>()
                    .join(","),
                "c1" => self.c1.to_string(),
                "stride" => self.stride.to_string(),
                "out" => match &self.out {
                    Some(o) => o.clone(),
                    None => continue,
                },
                "format" => self.format.to_string(),
                "budget-subsets" => self.budget_subsets.to_string(),
                "budget-dp" => self.budget_dp.to_string(),
                _ => unreachable!(),
            };
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }

    /// Checks everything that can be checked before any instance runs.
    pub fn validate(&self) -> Result<Vec<FiniteField>> {
        if self.field.is_empty() {
            bail!("no field given");
        }
        if self.stride == 0 || self.budget_subsets == 0 || self.budget_dp == 0 {
            bail!("stride and budgets must be positive");
        }
        if !(self.c1 > 0.0) {
            bail!("c1 must be positive");
        }
        if self.suites.is_empty() {
            bail!("no suites selected");
        }
        let fields = self
            .field
            .iter()
            .map(|s| FiniteField::from_spec(s).map_err(|e| anyhow!("field {s:?}: {e}")))
            .collect::<Result<Vec<_>>>()?;
        for f in &fields {
            if self.a.resolve(f.order()).is_empty() {
                bail!("no valid a for field {}", f.spec_string());
            }
        }
        Ok(fields)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_sets() {
        let s: IntSet = "5, 2..4,9,3".parse().unwrap();
        assert_eq!(s.values(), &[2, 3, 4, 5, 9]);
        assert_eq!(s.to_string(), "2..5,9");
        assert!("4..2".parse::<IntSet>().is_err());
        assert!("".parse::<IntSet>().is_err());
        assert!("x".parse::<IntSet>().is_err());
    }

    #[test]
    fn file_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.field = vec!["7".into(), "2^3".into(), "2^2/1,1,1".into()];
        cfg.a = "1,3..5".parse().unwrap();
        cfg.c1 = 0.1 + 0.2;
        cfg.out = Some("report.json".into());
        cfg.suites = parse_suites("region,valueset").unwrap();
        let text = cfg.to_file_string();
        assert_eq!(ExperimentConfig::parse_file(&text).unwrap(), cfg);
        let default = ExperimentConfig::default();
        assert_eq!(
            ExperimentConfig::parse_file(&default.to_file_string()).unwrap(),
            default
        );
    }

    #[test]
    fn file_errors() {
        assert!(ExperimentConfig::parse_file("n = 2\nn = 3").is_err());
        assert!(ExperimentConfig::parse_file("colour = red").is_err());
        assert!(ExperimentConfig::parse_file("n 2").is_err());
        assert!(ExperimentConfig::parse_file("suites = everything").is_err());
        let cfg = ExperimentConfig::parse_file("# comment\n\nfield = 7\n").unwrap();
        assert_eq!(cfg.field, vec!["7"]);
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_err());
        cfg.field = vec!["6".into()];
        assert!(cfg.validate().is_err());
        cfg.field = vec!["7".into()];
        assert_eq!(cfg.validate().unwrap().len(), 1);
        cfg.a = "7..9".parse().unwrap();
        assert!(cfg.validate().is_err());
    }
}
