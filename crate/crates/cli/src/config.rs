//! Scenario files: flat TOML with `[links]`, `[powers]` and an optional
//! `[cognitive]` section. Powers and thresholds are given in dB.
//!
//! ```toml
//! [links]
//! m_sr = 2
//! pi_sr_db = 15
//! # ... m_rd, pi_rd_db, m_rr, pi_rr_db, optional m_sd, pi_sd_db
//!
//! [powers]
//! k = 3
//! p_s_db = 0
//! p_r_db = 0
//! lambda = 1
//!
//! [cognitive]
//! m_sp = 1
//! pi_sp_db = 0
//! m_rp = 1
//! pi_rp_db = 1
//! ith_db = 3
//! ```

use fdrs_core::channel::db_to_linear;
use fdrs_core::{Error as CoreError, LinkSpec, NetworkConfig};
use serde::Deserialize;
use std::fmt;
use std::path::Path;

/// Everything wrong with one scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub problems: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config {}:", self.path)?;
        for p in &self.problems {
            write!(f, "\n  {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    links: RawLinks,
    powers: RawPowers,
    cognitive: Option<RawCognitive>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinks {
    m_sr: Option<f64>,
    pi_sr_db: Option<f64>,
    m_rd: Option<f64>,
    pi_rd_db: Option<f64>,
    m_rr: Option<f64>,
    pi_rr_db: Option<f64>,
    m_sd: Option<f64>,
    pi_sd_db: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPowers {
    k: Option<i64>,
    p_s_db: Option<f64>,
    p_r_db: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCognitive {
    m_sp: Option<f64>,
    pi_sp_db: Option<f64>,
    m_rp: Option<f64>,
    pi_rp_db: Option<f64>,
    ith_db: Option<f64>,
}

/// Collects problems, each tagged with the line that defines its key.
struct Problems<'a> {
    text: &'a str,
    list: Vec<String>,
}

impl Problems<'_> {
    fn line_of(&self, key: &str) -> Option<usize> {
        self.text.lines().position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
    }

    fn push(&mut self, key: &str, msg: impl fmt::Display) {
        match self.line_of(key) {
            Some(n) => self.list.push(format!("line {}: {key}: {msg}", n + 1)),
            None => self.list.push(format!("{key}: {msg}")),
        }
    }

    fn need<T: Copy>(&mut self, section: &str, key: &str, v: Option<T>) -> Option<T> {
        if v.is_none() {
            self.list.push(format!("[{section}] {key}: missing"));
        }
        v
    }

    fn link(&mut self, section: &str, name: &str, m: Option<f64>, pi_db: Option<f64>) -> Option<LinkSpec> {
        let m = self.need(section, &format!("m_{name}"), m);
        let pi = self.need(section, &format!("pi_{name}_db"), pi_db);
        Some(LinkSpec {
            m: m?,
            avg_power: db_to_linear(pi?),
        })
    }

    /// Optional link: both keys or neither.
    fn optional_link(&mut self, section: &str, name: &str, m: Option<f64>, pi_db: Option<f64>) -> Option<LinkSpec> {
        if m.is_none() && pi_db.is_none() {
            return None;
        }
        self.link(section, name, m, pi_db)
    }
}

/// Maps a core validation field to the config key that sets it.
fn config_key(field: &str) -> String {
    match field {
        "p_s" | "p_r" | "ith" => format!("{field}_db"),
        "sp" | "rp" => format!("m_{field}"),
        f if f.starts_with("pi_") => format!("{f}_db"),
        f => f.to_string(),
    }
}

/// Parses scenario text; `origin` names it in messages.
pub fn parse_config_str(text: &str, origin: &str) -> Result<NetworkConfig, ConfigError> {
    let fail = |problems| ConfigError {
        path: origin.to_string(),
        problems,
    };
    let raw: RawConfig = toml::from_str(text).map_err(|e| fail(vec![e.to_string().trim_end().to_string()]))?;
    let mut p = Problems { text, list: Vec::new() };

    let l = &raw.links;
    let sr = p.link("links", "sr", l.m_sr, l.pi_sr_db);
    let rd = p.link("links", "rd", l.m_rd, l.pi_rd_db);
    let rr = p.link("links", "rr", l.m_rr, l.pi_rr_db);
    let sd = p.optional_link("links", "sd", l.m_sd, l.pi_sd_db);

    let w = &raw.powers;
    let k = p.need("powers", "k", w.k);
    let p_s = p.need("powers", "p_s_db", w.p_s_db);
    let p_r = p.need("powers", "p_r_db", w.p_r_db);
    let lambda = p.need("powers", "lambda", w.lambda);
    if let Some(k) = k {
        if k < 1 {
            p.push("k", format!("at least one relay is required, got {k}"));
        }
    }

    let (sp, rp, ith) = match &raw.cognitive {
        Some(c) => (
            p.optional_link("cognitive", "sp", c.m_sp, c.pi_sp_db),
            p.optional_link("cognitive", "rp", c.m_rp, c.pi_rp_db),
            c.ith_db.map(db_to_linear),
        ),
        None => (None, None, None),
    };

    let (Some(sr), Some(rd), Some(rr), Some(k), Some(p_s), Some(p_r), Some(lambda)) = (sr, rd, rr, k, p_s, p_r, lambda)
    else {
        return Err(fail(p.list));
    };
    if !p.list.is_empty() {
        return Err(fail(p.list));
    }
    let cfg = NetworkConfig {
        k: k as usize,
        p_s: db_to_linear(p_s),
        p_r: db_to_linear(p_r),
        lambda,
        sr,
        rd,
        rr,
        sd,
        sp,
        rp,
        ith,
        overrides: Vec::new(),
    };
    match cfg.validate() {
        Ok(()) => Ok(cfg),
        Err(CoreError::InvalidConfig(vs)) => {
            for v in vs {
                p.push(&config_key(&v.field), &v.message);
            }
            Err(fail(p.list))
        }
        Err(e) => Err(fail(vec![e.to_string()])),
    }
}

/// Reads and parses a scenario file, returning the configuration and the
/// raw bytes it came from.
pub fn parse_config(path: &Path) -> Result<(NetworkConfig, Vec<u8>), ConfigError> {
    let origin = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| ConfigError {
        path: origin.clone(),
        problems: vec![format!("cannot read file: {e}")],
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| ConfigError {
        path: origin.clone(),
        problems: vec!["file is not valid UTF-8".into()],
    })?;
    Ok((parse_config_str(&text, &origin)?, bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2B: &str = "\
[links]
m_sr = 2
pi_sr_db = 15
m_rd = 2
pi_rd_db = 15
m_rr = 2
pi_rr_db = 3
m_sd = 2
pi_sd_db = 5

[powers]
k = 3
p_s_db = 0
p_r_db = 0
lambda = 1

[cognitive]
m_sp = 1
pi_sp_db = 0
m_rp = 1
pi_rp_db = 1
ith_db = 3
";

    #[test]
    fn parses_reference_scenario() {
        let cfg = parse_config_str(FIG2B, "fig2b").unwrap();
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.lambda, 1.0);
        assert!((cfg.ith.unwrap() - 1.995_262_3).abs() < 1e-6);
        assert!((cfg.sr.avg_power - 31.622_776_6).abs() < 1e-6);
        assert_eq!(cfg.p_s, 1.0);
        assert!(cfg.is_cognitive());
    }

    #[test]
    fn missing_threshold_is_reported_with_context() {
        let text = FIG2B.replace("ith_db = 3\n", "");
        let e = parse_config_str(&text, "x").unwrap_err();
        assert_eq!(e.problems.len(), 1, "{e}");
        assert!(e.problems[0].contains("ith_db"), "{e}");
    }

    #[test]
    fn out_of_range_lambda_names_its_line() {
        let text = FIG2B.replace("lambda = 1", "lambda = 1.5");
        let e = parse_config_str(&text, "x").unwrap_err();
        assert!(e.problems.iter().any(|p| p.starts_with("line 15: lambda")), "{e}");
    }

    #[test]
    fn all_violations_are_listed() {
        let text = FIG2B.replace("lambda = 1", "lambda = -1").replace("m_sr = 2", "m_sr = 0.2");
        let e = parse_config_str(&text, "x").unwrap_err();
        assert_eq!(e.problems.len(), 2, "{e}");
        let text = FIG2B.replace("k = 3\n", "").replace("pi_rd_db = 15\n", "");
        assert_eq!(parse_config_str(&text, "x").unwrap_err().problems.len(), 2);
    }

    #[test]
    fn syntax_and_unknown_keys_fail() {
        assert!(parse_config_str("[links\n", "x").is_err());
        let e = parse_config_str(&FIG2B.replace("m_sr", "m_xx"), "x").unwrap_err();
        assert!(e.to_string().contains("m_xx"), "{e}");
    }

    #[test]
    fn direct_and_cognitive_sections_are_optional() {
        let text: String = FIG2B.split("[cognitive]").next().unwrap().replace("m_sd = 2\npi_sd_db = 5\n", "");
        let cfg = parse_config_str(&text, "x").unwrap();
        assert!(cfg.sd.is_none() && !cfg.is_cognitive());
    }
}
