//! `derivelog.toml`: `key = value` lines giving default budgets and caps.
//! Flags override the file.

use std::time::Duration;

use derivelog::search::ValuationMode;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub max_worlds: Option<usize>,
    pub branching: Option<usize>,
    pub valuations: Option<ValuationMode>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub time_limit: Option<Duration>,
    pub subset_cap: Option<usize>,
    pub trials: Option<u64>,
}

pub const KEYS: [&str; 8] = [
    "max_worlds",
    "branching",
    "valuations",
    "seed",
    "jobs",
    "time_limit",
    "subset_cap",
    "trials",
];

/// Blank lines and `#` comments are skipped; values may be quoted.
pub fn parse_config(text: &str) -> Result<Config, String> {
    let mut cfg = Config::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| format!("config line {}: {msg}", i + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at("expected `key = value`".into()))?;
        let key = key.trim();
        let value = value.trim().trim_matches('"');
        let num = |v: &str| v.parse::<u64>().map_err(|e| at(format!("`{key}`: {e}")));
        match key {
            "max_worlds" => cfg.max_worlds = Some(num(value)? as usize),
            "branching" => cfg.branching = Some(num(value)? as usize),
            "valuations" => cfg.valuations = Some(value.parse().map_err(at)?),
            "seed" => cfg.seed = Some(num(value)?),
            "jobs" => cfg.jobs = Some(num(value)?.max(1) as usize),
            "time_limit" => {
                let secs: f64 = value
                    .parse()
                    .map_err(|e| at(format!("`time_limit`: {e}")))?;
                if !(secs.is_finite() && secs > 0.0) {
                    return Err(at(
                        "`time_limit` must be a positive number of seconds".into()
                    ));
                }
                cfg.time_limit = Some(Duration::from_secs_f64(secs));
            }
            "subset_cap" => cfg.subset_cap = Some(num(value)? as usize),
            "trials" => cfg.trials = Some(num(value)?),
            _ => {
                return Err(at(format!(
                    "unknown key `{key}` (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let cfg = parse_config("# defaults\nmax_worlds = 3\nvaluations = \"sampled:50\"\nseed=7 # pinned\n\ntime_limit = 1.5\n").unwrap();
        assert_eq!(cfg.max_worlds, Some(3));
        assert_eq!(cfg.valuations, Some(ValuationMode::Sampled(50)));
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.time_limit, Some(Duration::from_millis(1500)));
        assert_eq!(cfg.jobs, None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_config("colour = red")
            .unwrap_err()
            .contains("unknown key"));
        assert!(parse_config("max_worlds").unwrap_err().contains("line 1"));
        assert!(parse_config("seed = -1").is_err());
        assert!(parse_config("time_limit = 0").is_err());
        assert!(parse_config("valuations = sampled:0").is_err());
    }
}
