use crate::config::{parse_config, ConfigError};
use crate::manifest::RunManifest;
use crate::{Cli, Command, DiversityArgs, OutageArgs, PlArgs, SweepArgs, ValidateArgs};
use fdrs_core::analysis::{
    diversity_fit, mc_fit_points, run_sweep, validate_report, DiversityFit, SweepMethod, SweepRow, SweepSpec,
};
use fdrs_core::analytic::{self, feasibility_dist};
use fdrs_core::channel::db_to_linear;
use fdrs_core::montecarlo::{estimate_feasibility_with, estimate_outage_batch, source_rate_query, Query, SimOptions};
use fdrs_core::{Error as CoreError, Method, NetworkConfig, Protocol};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Core(CoreError::InvalidConfig(_)) => 1,
            CliError::Core(CoreError::InvalidInput(_)) => 1,
            CliError::Io { .. } => 1,
            CliError::Core(_) | CliError::Failed(_) => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Where data and manifest go.
struct Sink<'a> {
    out: Option<&'a Path>,
}

impl Sink<'_> {
    fn emit(&self, data: &str, manifest: &RunManifest) -> Result<()> {
        let manifest = serde_json::to_string(manifest).expect("manifest serializes");
        match self.out {
            None => {
                print!("{data}");
                eprintln!("manifest: {manifest}");
            }
            Some(path) => {
                let io = |source| CliError::Io {
                    path: path.to_path_buf(),
                    source,
                };
                std::fs::write(path, data).map_err(io)?;
                let mut mpath = path.as_os_str().to_owned();
                mpath.push(".manifest.json");
                let mpath = PathBuf::from(mpath);
                std::fs::write(&mpath, manifest + "\n").map_err(|source| CliError::Io { path: mpath.clone(), source })?;
            }
        }
        Ok(())
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let sink = Sink { out: cli.out.as_deref() };
    match cli.command {
        Command::Outage(a) => outage(a, &sink),
        Command::Sweep(a) => sweep(a, &sink),
        Command::Pl(a) => pl(a, &sink),
        Command::Diversity(a) => diversity(a, &sink),
        Command::Validate(a) => validate(a, &sink),
    }
}

fn method_key(m: Method) -> &'static str {
    match m {
        Method::Analytic => "analytic",
        Method::MonteCarlo => "mc",
    }
}

fn wants(method: SweepMethod, m: Method) -> bool {
    matches!(
        (method, m),
        (SweepMethod::Both, _) | (SweepMethod::Analytic, Method::Analytic) | (SweepMethod::Mc, Method::MonteCarlo)
    )
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

fn outage(a: OutageArgs, sink: &Sink) -> Result<()> {
    let (cfg, bytes) = parse_config(&a.config)?;
    analytic_rate_check(a.rate)?;
    let p = a.protocol;
    let mut rec = Map::new();
    rec.insert("protocol".into(), json!(p.key()));
    rec.insert("rate".into(), json!(a.rate));
    rec.insert("threshold".into(), json!(p.outage_threshold(a.rate)));
    rec.insert("cognitive".into(), json!(a.cognitive));
    if wants(a.method, Method::Analytic) {
        let o = analytic::outage(&cfg, p, a.rate, a.cognitive)?;
        rec.insert("analytic".into(), json!({ "outage": o, "throughput": p.throughput(a.rate, o) }));
    }
    let sim = wants(a.method, Method::MonteCarlo);
    if sim {
        let opts = SimOptions::new(a.sim.trials, a.sim.seed);
        let q = [
            Query {
                protocol: p,
                threshold: p.outage_threshold(a.rate),
            },
            source_rate_query(p, a.rate),
        ];
        let e = estimate_outage_batch(&cfg, &q, a.cognitive, &opts)?;
        let t_out = if p.is_half_duplex() { e[1].p_hat } else { e[0].p_hat };
        rec.insert(
            "mc".into(),
            json!({
                "outage": e[0].p_hat,
                "stderr": e[0].stderr,
                "throughput": p.throughput(a.rate, t_out),
                "trials": e[0].trials,
                "seed": e[0].seed,
            }),
        );
    }
    let (seed, trials) = if sim { (Some(a.sim.seed), Some(a.sim.trials)) } else { (None, None) };
    sink.emit(&to_json(&Value::Object(rec)), &RunManifest::new("outage", &bytes, seed, trials))
}

fn analytic_rate_check(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("rate must be positive, got {rate}")))
    }
}

const CSV_HEADER: &str = "axis,protocol,method,outage,throughput,stderr,trials,seed\n";

fn csv_row(out: &mut String, r: &SweepRow) {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        r.axis,
        r.protocol.key(),
        method_key(r.method),
        r.outage,
        r.throughput,
        opt(r.stderr.map(|v| v.to_string())),
        opt(r.trials.map(|v| v.to_string())),
        opt(r.seed.map(|v| v.to_string())),
    );
}

fn sweep(a: SweepArgs, sink: &Sink) -> Result<()> {
    let (cfg, bytes) = parse_config(&a.config)?;
    let spec = SweepSpec {
        axis: a.axis,
        from: a.from,
        to: a.to,
        steps: a.steps,
        protocols: a.protocols,
        method: a.method,
        rate: a.rate,
        cognitive: a.cognitive,
        trials: a.sim.trials,
        seed: a.sim.seed,
    };
    let table = run_sweep(&spec, &cfg)?;
    let mut csv = String::from(CSV_HEADER);
    for r in &table.rows {
        csv_row(&mut csv, r);
    }
    let sim = wants(a.method, Method::MonteCarlo);
    let (seed, trials) = if sim { (Some(a.sim.seed), Some(a.sim.trials)) } else { (None, None) };
    sink.emit(&csv, &RunManifest::new("sweep", &bytes, seed, trials))?;
    if table.errors.is_empty() {
        Ok(())
    } else {
        let msgs: Vec<String> = table
            .errors
            .iter()
            .map(|(p, e)| format!("{}: {e}", p.label()))
            .collect();
        Err(CliError::Failed(format!("skipped protocols:\n  {}", msgs.join("\n  "))))
    }
}

fn pl(a: PlArgs, sink: &Sink) -> Result<()> {
    let (cfg, bytes) = parse_config(&a.config)?;
    let analytic = match (feasibility_dist(&cfg), a.trials) {
        (Ok(d), _) => Some(d),
        // Without a closed form the simulation alone can still answer.
        (Err(CoreError::InvalidConfig(_)), Some(_)) if cfg.is_cognitive() => None,
        (Err(e), _) => return Err(e.into()),
    };
    let sim = match a.trials {
        Some(n) => Some(estimate_feasibility_with(&cfg, &SimOptions::new(n, a.seed))?),
        None => None,
    };
    let sigma = |p: f64| a.trials.map(|n| (p * (1.0 - p) / n as f64).sqrt());
    let fmt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    let mut csv = String::from("l,p_analytic,p_mc,stderr\n");
    let mut row = |label: String, pa: Option<f64>, pm: Option<f64>| {
        let _ = writeln!(csv, "{label},{},{},{}", fmt(pa), fmt(pm), fmt(pm.and_then(sigma)));
    };
    for l in 0..=cfg.k {
        row(l.to_string(), analytic.as_ref().map(|d| d.p[l]), sim.as_ref().map(|d| d.p[l]));
    }
    row(
        "source_only".into(),
        analytic.as_ref().map(|d| d.p_tilde0),
        sim.as_ref().map(|d| d.p_tilde0),
    );
    sink.emit(&csv, &RunManifest::new("pl", &bytes, a.trials.map(|_| a.seed), a.trials))
}

fn fit_analytic(cfg: &NetworkConfig, p: Protocol, powers: &[f64], rate: f64, cognitive: bool) -> Result<DiversityFit> {
    let pts = powers
        .iter()
        .map(|&pw| analytic::outage(&cfg.clone().with_power(pw), p, rate, cognitive).map(|o| (pw, o)))
        .collect::<fdrs_core::Result<Vec<_>>>()?;
    Ok(diversity_fit(&pts)?)
}

fn fit_mc(cfg: &NetworkConfig, p: Protocol, powers: &[f64], rate: f64, cognitive: bool, opts: &SimOptions) -> Result<DiversityFit> {
    let q = [Query {
        protocol: p,
        threshold: p.outage_threshold(rate),
    }];
    let est = powers
        .iter()
        .map(|&pw| estimate_outage_batch(&cfg.clone().with_power(pw), &q, cognitive, opts).map(|e| e[0]))
        .collect::<fdrs_core::Result<Vec<_>>>()?;
    Ok(diversity_fit(&mc_fit_points(powers, &est)?)?)
}

fn diversity(a: DiversityArgs, sink: &Sink) -> Result<()> {
    let (cfg, bytes) = parse_config(&a.config)?;
    if a.points < 4 || !a.pmin_db.is_finite() || !a.pmax_db.is_finite() || a.pmin_db >= a.pmax_db {
        return Err(CliError::Usage(format!(
            "need --points >= 4 and --pmin-db < --pmax-db, got {} points over [{}, {}] dB",
            a.points, a.pmin_db, a.pmax_db
        )));
    }
    analytic_rate_check(a.rate)?;
    let step = (a.pmax_db - a.pmin_db) / (a.points - 1) as f64;
    let powers: Vec<f64> = (0..a.points)
        .map(|i| db_to_linear(if i + 1 == a.points { a.pmax_db } else { a.pmin_db + step * i as f64 }))
        .collect();
    let opts = SimOptions::new(a.sim.trials, a.sim.seed);
    let sim = wants(a.method, Method::MonteCarlo);
    let body = match a.method {
        SweepMethod::Analytic => to_json(&fit_analytic(&cfg, a.protocol, &powers, a.rate, a.cognitive)?),
        SweepMethod::Mc => to_json(&fit_mc(&cfg, a.protocol, &powers, a.rate, a.cognitive, &opts)?),
        SweepMethod::Both => to_json(&json!({
            "analytic": fit_analytic(&cfg, a.protocol, &powers, a.rate, a.cognitive)?,
            "mc": fit_mc(&cfg, a.protocol, &powers, a.rate, a.cognitive, &opts)?,
        })),
    };
    let (seed, trials) = if sim { (Some(a.sim.seed), Some(a.sim.trials)) } else { (None, None) };
    sink.emit(&body, &RunManifest::new("diversity", &bytes, seed, trials))
}

fn validate(a: ValidateArgs, sink: &Sink) -> Result<()> {
    let (cfg, bytes) = parse_config(&a.config)?;
    let protocols: Vec<Protocol> = if a.protocols.is_empty() {
        Protocol::FULL_DUPLEX
            .into_iter()
            .filter(|p| cfg.sd.is_some() || !p.needs_direct_link())
            .collect()
    } else {
        a.protocols
    };
    analytic_rate_check(a.rate)?;
    let cognitive = cfg.is_cognitive();
    let report = validate_report(&cfg, &protocols, a.rate, cognitive, &SimOptions::new(a.trials, a.seed))?;
    let mut text = format!(
        "rate {} bpcu, {} trials, seed {}, {}\n",
        a.rate,
        a.trials,
        a.seed,
        if cognitive { "cognitive" } else { "non-cognitive" }
    );
    let _ = writeln!(text, "{:<8} {:>14} {:>14} {:>12} {:>8}  verdict", "protocol", "analytic", "simulated", "stderr", "z");
    for r in &report.rows {
        let _ = writeln!(
            text,
            "{:<8} {:>14.6e} {:>14.6e} {:>12.3e} {:>8.2}  {}",
            r.protocol.label(),
            r.p_analytic,
            r.p_hat,
            r.stderr,
            r.z,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let ok = report.all_pass();
    let _ = writeln!(text, "overall: {}", if ok { "PASS" } else { "FAIL" });
    sink.emit(&text, &RunManifest::new("validate", &bytes, Some(a.seed), Some(a.trials)))?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed("simulation disagrees with the closed form".into()))
    }
}
