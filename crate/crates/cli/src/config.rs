//! Experiment configuration: a flat `key = value` file (one key per line,
//! `#` comments) merged under command-line flags.
//!
//! Keys: n, checkpoints, window, pmax, case, seed, budget, out.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use multiquad::{RamificationCase, ShapeWindow};

use crate::commands::CliError;
use crate::ExperimentArgs;

pub const DEFAULT_PMAX: u64 = 100_000;
pub const N_CAP: u32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: u32,
    pub checkpoints: Vec<u128>,
    pub window: ShapeWindow,
    pub pmax: u64,
    pub cases: Vec<RamificationCase>,
    pub seed: u64,
    pub budget: u128,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 8] = ["n", "checkpoints", "window", "pmax", "case", "seed", "budget", "out"];

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Invalid(format!("config line {}: expected key = value", k + 1)))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Invalid(format!("config line {}: unknown key {key:?}", k + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Integers, optionally written as AeB (exact powers of ten).
pub fn parse_count(s: &str) -> Result<u128, CliError> {
    let s = s.trim();
    let bad = || CliError::Invalid(format!("cannot parse {s:?} as a nonnegative integer"));
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        let m: u128 = m.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        return 10u128.checked_pow(e).and_then(|p| p.checked_mul(m)).ok_or_else(bad);
    }
    s.parse().map_err(|_| bad())
}

pub fn parse_cases(s: &str) -> Result<Vec<RamificationCase>, CliError> {
    let mut cases = s
        .split(',')
        .map(|c| {
            let label: u8 = c.trim().parse().map_err(|_| CliError::Invalid(format!("bad case label {c:?}")))?;
            RamificationCase::from_label(label).map_err(CliError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    cases.sort();
    cases.dedup();
    Ok(cases)
}

impl ExperimentConfig {
    pub fn resolve(args: &ExperimentArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let get = |k: &str| file.get(k).cloned();
        let n = match args.n {
            Some(n) => n,
            None => get("n").map(|v| v.parse().map_err(|_| CliError::Invalid(format!("bad n {v:?}")))).transpose()?.unwrap_or(2),
        };
        if !(2..=N_CAP).contains(&n) {
            return Err(CliError::Invalid(format!("n = {n} must lie in 2..={N_CAP}")));
        }
        let ell = (1usize << n) - 1;
        let checkpoints: Vec<u128> = match args.checkpoints.clone().or_else(|| get("checkpoints")) {
            Some(s) => s.split(',').map(parse_count).collect::<Result<_, _>>()?,
            None => return Err(CliError::Invalid("no checkpoints given".into())),
        };
        if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Invalid("checkpoints must be strictly ascending".into()));
        }
        let window = match args.window.clone().or_else(|| get("window")) {
            Some(w) => w.parse::<ShapeWindow>()?,
            None => ShapeWindow::vacuous(ell),
        };
        if window.ell() != ell {
            return Err(CliError::Invalid(format!("window needs {} bounds for n = {n}", ell - 1)));
        }
        let pmax = match args.pmax {
            Some(p) => p,
            None => get("pmax").map(|v| parse_count(&v).map(|x| x as u64)).transpose()?.unwrap_or(DEFAULT_PMAX),
        };
        let cases = match args.case.clone().or_else(|| get("case")) {
            Some(c) => parse_cases(&c)?,
            None => vec![RamificationCase::One],
        };
        let seed = match args.seed {
            Some(s) => s,
            None => get("seed").map(|v| parse_count(&v).map(|x| x as u64)).transpose()?.unwrap_or(0),
        };
        let budget = match args.budget {
            Some(b) => b,
            None => get("budget").map(|v| parse_count(&v)).transpose()?.unwrap_or(multiquad::param::DEFAULT_NODE_BUDGET),
        };
        let out = args.out.clone().or_else(|| get("out").map(PathBuf::from));
        Ok(ExperimentConfig { n, checkpoints, window, pmax, cases, seed, budget, out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let m = parse_config("# comment\nn = 2\ncheckpoints = 1e6,1e7\n\nwindow=1,10\n").unwrap();
        assert_eq!(m["n"], "2");
        assert_eq!(m["checkpoints"], "1e6,1e7");
        assert_eq!(m["window"], "1,10");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("no equals sign").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e10").unwrap(), 10_000_000_000);
        assert_eq!(parse_count("25e2").unwrap(), 2500);
        assert_eq!(parse_count("1221025").unwrap(), 1_221_025);
        assert!(parse_count("1.5").is_err());
    }
}
