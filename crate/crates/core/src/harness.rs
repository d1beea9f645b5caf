//! Experiment configuration and the `simulate | bounds | chains | region`
//! pipelines. Every command returns its output as a string; writing it out
//! is left to the caller.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{proposed_bound, remark1_ratio, BoundReport};
use crate::chain::{
    algorithm1, algorithm2, d_value, parse_chain_list, strict_region_lhs, two_hop_d, validate_chains,
    region2_check, DeltaTable, Plan, RegionMode,
};
use crate::codec::{derive_codec_params, CodecParams, Combiner};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::sim::{generate_instance, monte_carlo, Instance, InstanceSpec};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "WZCHAIN_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Wz,
    Alg1,
    #[default]
    Alg2,
    File,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wz" => Ok(Strategy::Wz),
            "alg1" => Ok(Strategy::Alg1),
            "alg2" => Ok(Strategy::Alg2),
            "file" => Ok(Strategy::File),
            _ => Err(Error::Config(format!("unknown strategy '{s}' (wz|alg1|alg2|file)"))),
        }
    }
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Wz => "wz",
            Strategy::Alg1 => "alg1",
            Strategy::Alg2 => "alg2",
            Strategy::File => "file",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceMode {
    /// Head client plus satellites at prescribed distances.
    #[default]
    Star,
    /// Clients scattered around a random centre; tight realized table.
    Derive,
    /// Vectors and table read from `data`, constraints checked.
    Verify,
    /// Only a distance table, read from `data`; enough for `bounds` and `chains`.
    Table,
}

/// Flat experiment description. Distances are Euclidean norms in the units
/// of the data vectors; `r` is in bits per client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Number of clients.
    pub n: usize,
    /// Vector dimension before padding.
    pub d: usize,
    /// Bits per client message.
    pub r: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Independent instances drawn with the same settings (ignored by `verify`
    /// and `table`).
    #[serde(default = "default_one")]
    pub instances: usize,
    #[serde(default)]
    pub instance: InstanceMode,
    /// Star: head client index.
    #[serde(default)]
    pub head: usize,
    /// Star: head's side-information distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_t: Option<f64>,
    /// Star: distance from the head to every other client.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_ti: Option<f64>,
    /// Star: side-information distance of the other clients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_i: Option<f64>,
    /// Derive: distance of each client from the common centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    /// Derive: side distance of client 0; later clients interpolate
    /// linearly up to `noise_hi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_hi: Option<f64>,
    /// Verify / table: JSON file, relative paths resolve against the config
    /// file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub strategy: Strategy,
    /// Chain list for `strategy = "file"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains_file: Option<PathBuf>,
    #[serde(default)]
    pub combiner: Combiner,
    #[serde(default)]
    pub region_mode: RegionMode,
    /// Factor >= 1 applied to every declared distance.
    #[serde(default = "default_looseness")]
    pub looseness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Accept `r` outside `2 log k <= r <= d`.
    #[serde(default)]
    pub allow_out_of_regime: bool,
}

fn default_trials() -> usize {
    1000
}
fn default_one() -> usize {
    1
}
fn default_looseness() -> f64 {
    1.0
}

fn field_err(field: &str, why: impl std::fmt::Display) -> Error {
    Error::Config(format!("field `{field}`: {why}"))
}

impl ExperimentConfig {
    /// Minimal star configuration; the remaining keys take their defaults.
    pub fn star(n: usize, d: usize, r: usize, delta_t: f64, delta_ti: f64, delta_i: f64) -> Self {
        ExperimentConfig {
            n,
            d,
            r,
            trials: default_trials(),
            seed: 0,
            instances: 1,
            instance: InstanceMode::Star,
            head: 0,
            delta_t: Some(delta_t),
            delta_ti: Some(delta_ti),
            delta_i: Some(delta_i),
            spread: None,
            noise_lo: None,
            noise_hi: None,
            data: None,
            strategy: Strategy::Alg2,
            chains_file: None,
            combiner: Combiner::Scaled,
            region_mode: RegionMode::DConsistent,
            looseness: 1.0,
            threads: None,
            out: None,
            allow_out_of_regime: false,
        }
    }

    /// Parses TOML, or JSON when the text starts with `{`. A JSON document
    /// with a top-level `config` object (the `bounds --format json` output)
    /// is accepted too.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = if text.trim_start().starts_with('{') {
            let mut v: serde_json::Value =
                serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
            if let Some(inner) = v.get_mut("config") {
                v = inner.take();
            }
            serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        Ok(cfg)
    }

    /// Reads and parses a config file, resolving relative `data` and
    /// `chains_file` paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.data, &mut cfg.chains_file].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field and returns the derived codec parameters.
    pub fn validate(&self) -> Result<CodecParams> {
        if self.n < 2 {
            return Err(field_err("n", "must be >= 2"));
        }
        if self.d == 0 {
            return Err(field_err("d", "must be >= 1"));
        }
        if self.r == 0 {
            return Err(field_err("r", "must be >= 1"));
        }
        if self.trials == 0 {
            return Err(field_err("trials", "must be >= 1"));
        }
        if self.instances == 0 {
            return Err(field_err("instances", "must be >= 1"));
        }
        if !(self.looseness >= 1.0 && self.looseness.is_finite()) {
            return Err(field_err("looseness", "must be a finite number >= 1"));
        }
        if self.threads == Some(0) {
            return Err(field_err("threads", "must be >= 1"));
        }
        let params = derive_codec_params(self.n, self.d, self.r).map_err(|e| field_err("r", e))?;
        if !self.allow_out_of_regime && self.r > self.d {
            return Err(field_err(
                "r",
                format!(
                    "r = {} exceeds d = {}; set allow_out_of_regime = true to run anyway",
                    self.r, self.d
                ),
            ));
        }
        match self.instance {
            InstanceMode::Star => {
                if self.head >= self.n {
                    return Err(field_err("head", format!("must be < n = {}", self.n)));
                }
                for (name, v) in [
                    ("delta_t", self.delta_t),
                    ("delta_ti", self.delta_ti),
                    ("delta_i", self.delta_i),
                ] {
                    nonneg(name, v, "star")?;
                }
            }
            InstanceMode::Derive => {
                for (name, v) in [
                    ("spread", self.spread),
                    ("noise_lo", self.noise_lo),
                    ("noise_hi", self.noise_hi),
                ] {
                    nonneg(name, v, "derive")?;
                }
            }
            InstanceMode::Verify | InstanceMode::Table => match &self.data {
                None => return Err(field_err("data", "required for instance = verify/table")),
                Some(p) if !p.exists() => {
                    return Err(field_err("data", format!("{} does not exist", p.display())))
                }
                _ => {}
            },
        }
        if self.strategy == Strategy::File {
            match &self.chains_file {
                None => return Err(field_err("chains_file", "required for strategy = file")),
                Some(p) if !p.exists() => {
                    return Err(field_err("chains_file", format!("{} does not exist", p.display())))
                }
                _ => {}
            }
        }
        Ok(params)
    }
}

fn nonneg(name: &str, v: Option<f64>, mode: &str) -> Result<()> {
    match v {
        None => Err(field_err(name, format!("required for instance = {mode}"))),
        Some(x) if !(x >= 0.0 && x.is_finite()) => Err(field_err(name, "must be finite and >= 0")),
        _ => Ok(()),
    }
}

/// On-disk instance data. Matrix diagonals hold `delta_i`; `null` entries
/// mean "no bound" for a pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<Vec<f64>>>,
    pub table: Vec<Vec<Option<f64>>>,
}

impl InstanceData {
    fn delta_table(&self) -> Result<DeltaTable> {
        let m: Vec<Vec<f64>> = self
            .table
            .iter()
            .map(|row| row.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect())
            .collect();
        if m.iter().enumerate().any(|(i, row)| row.get(i).is_some_and(|v| v.is_infinite())) {
            return Err(field_err("data", "table diagonal (side distances) must be finite"));
        }
        DeltaTable::from_matrix(&m).map_err(|e| field_err("data", e))
    }
}

/// A generated or loaded instance; `table`-mode entries have no vectors.
pub struct Prepared {
    pub index: usize,
    pub table: DeltaTable,
    pub instance: Option<Instance>,
}

fn instance_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, &[0x1257_a4ce, index as u64])
}

/// Seed for the protocol randomness of instance `index`. Shared by every
/// estimator so they see the same rotations and subsets.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, &[0x7e1a_15ed, index as u64])
}

pub fn prepare_instances(cfg: &ExperimentConfig) -> Result<Vec<Prepared>> {
    let mut out = Vec::new();
    match cfg.instance {
        InstanceMode::Star | InstanceMode::Derive => {
            let spec = match cfg.instance {
                InstanceMode::Star => {
                    let mut side = vec![cfg.delta_i.unwrap_or(0.0); cfg.n];
                    side[cfg.head] = cfg.delta_t.unwrap_or(0.0);
                    let mut link = vec![cfg.delta_ti.unwrap_or(0.0); cfg.n];
                    link[cfg.head] = 0.0;
                    InstanceSpec::Star {
                        head: cfg.head,
                        side,
                        link,
                    }
                }
                _ => {
                    let lo = cfg.noise_lo.unwrap_or(0.0);
                    let hi = cfg.noise_hi.unwrap_or(0.0);
                    let noise = (0..cfg.n)
                        .map(|i| lo + (hi - lo) * i as f64 / (cfg.n - 1) as f64)
                        .collect();
                    InstanceSpec::Derive {
                        spread: cfg.spread.unwrap_or(0.0),
                        noise,
                    }
                }
            };
            for index in 0..cfg.instances {
                let inst = generate_instance(cfg.n, cfg.d, &spec, instance_seed(cfg.seed, index))?
                    .loosened(cfg.looseness)?;
                out.push(Prepared {
                    index,
                    table: inst.table.clone(),
                    instance: Some(inst),
                });
            }
        }
        InstanceMode::Verify | InstanceMode::Table => {
            let path = cfg.data.as_ref().ok_or_else(|| field_err("data", "missing"))?;
            let text = fs::read_to_string(path)?;
            let data: InstanceData =
                serde_json::from_str(&text).map_err(|e| field_err("data", e))?;
            let table = data.delta_table()?;
            if table.n() != cfg.n {
                return Err(field_err(
                    "data",
                    format!("table has {} clients, n = {}", table.n(), cfg.n),
                ));
            }
            let instance = match (cfg.instance, data.x, data.y) {
                (InstanceMode::Verify, Some(x), Some(y)) => Some(
                    generate_instance(cfg.n, cfg.d, &InstanceSpec::Verify { x, y, table: table.clone() }, 0)?
                        .loosened(cfg.looseness)?,
                ),
                (InstanceMode::Verify, _, _) => {
                    return Err(field_err("data", "verify mode needs `x` and `y`"))
                }
                _ => None,
            };
            let table = table.map(|v| v * cfg.looseness);
            out.push(Prepared {
                index: 0,
                table,
                instance,
            });
        }
    }
    Ok(out)
}

/// Chains for the configured strategy.
pub fn plan_for(cfg: &ExperimentConfig, table: &DeltaTable, params: &CodecParams) -> Result<Plan> {
    Ok(match cfg.strategy {
        Strategy::Wz => Plan::wyner_ziv(table),
        Strategy::Alg1 => algorithm1(table, params.dim, params.n).0,
        Strategy::Alg2 => algorithm2(table, params.n, cfg.region_mode),
        Strategy::File => {
            let path = cfg
                .chains_file
                .as_ref()
                .ok_or_else(|| field_err("chains_file", "missing"))?;
            parse_chain_list(&fs::read_to_string(path)?, table)
                .map_err(|e| field_err("chains_file", e))?
        }
    })
}

/// Runs `f` on a dedicated pool when a thread count is given.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| field_err("threads", e))?;
            Ok(pool.install(f))
        }
    }
}

/// Reads the thread count from the environment; `Ok(None)` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(Error::Config(format!("{THREADS_ENV}='{s}' is not a positive integer"))),
        },
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const SIMULATE_HEADER: &str = "estimator,n,d,r,k,trials,mse_empirical,mse_stderr,bound,ratio_emp_bound,sum_D,sum_delta_sq,improvement_region,seed";

fn estimator_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Wz => "wz",
        Strategy::Alg1 => "pro-alg1",
        Strategy::Alg2 => "pro-alg2",
        Strategy::File => "pro-file",
    }
}

/// One row of `simulate` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub estimator: String,
    pub instance: usize,
    pub mse: f64,
    pub stderr: f64,
    pub bound: f64,
    pub report: BoundReport,
}

/// Monte Carlo comparison: for every instance a `wz` row and, unless the
/// strategy is `wz`, a row for the chained estimator.
pub fn simulate_rows(cfg: &ExperimentConfig) -> Result<Vec<SimRow>> {
    let params = cfg.validate()?;
    if cfg.instance == InstanceMode::Table {
        return Err(field_err(
            "instance",
            "table mode has no vectors; simulate needs star, derive or verify",
        ));
    }
    let prepared = prepare_instances(cfg)?;
    let mut strategies = vec![Strategy::Wz];
    if cfg.strategy != Strategy::Wz {
        strategies.push(cfg.strategy);
    }
    with_threads(cfg.threads, || {
        let mut rows = Vec::new();
        for p in &prepared {
            let inst = p.instance.as_ref().expect("vectors present");
            let tseed = trial_seed(cfg.seed, p.index);
            for &s in &strategies {
                let plan = plan_for(&ExperimentConfig { strategy: s, ..cfg.clone() }, &p.table, &params)?;
                let rep = monte_carlo(inst, &plan, &params, cfg.trials, tseed, cfg.combiner)?;
                let bound = if s == Strategy::Wz {
                    rep.bounds.baseline
                } else {
                    rep.bounds.proposed
                };
                rows.push(SimRow {
                    estimator: estimator_name(s).into(),
                    instance: p.index,
                    mse: rep.mse,
                    stderr: rep.stderr,
                    bound,
                    report: rep.bounds,
                });
            }
        }
        Ok(rows)
    })?
}

pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<String> {
    let params = cfg.validate()?;
    let rows = simulate_rows(cfg)?;
    let mut out = String::from(SIMULATE_HEADER);
    out.push('\n');
    for row in rows {
        let ratio = if row.bound > 0.0 {
            row.mse / row.bound
        } else if row.mse == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.estimator,
            cfg.n,
            cfg.d,
            cfg.r,
            params.k,
            cfg.trials,
            fmt_g(row.mse),
            fmt_g(row.stderr),
            fmt_g(row.bound),
            fmt_g(ratio),
            fmt_g(row.report.sum_d),
            fmt_g(row.report.sum_delta_sq),
            row.report.improvement_region,
            cfg.seed
        )
        .expect("write to string");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (csv|json)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsEntry {
    pub instance: usize,
    pub strategy: Strategy,
    /// Closed-form improvement ratio; equals `report.ratio` inside the improvement
    /// region.
    pub remark1_ratio: f64,
    pub report: BoundReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsDocument {
    pub config: ExperimentConfig,
    pub reports: Vec<BoundsEntry>,
}

pub fn bounds_entries(cfg: &ExperimentConfig) -> Result<Vec<BoundsEntry>> {
    let params = cfg.validate()?;
    prepare_instances(cfg)?
        .iter()
        .map(|p| {
            let plan = plan_for(cfg, &p.table, &params)?;
            let report = proposed_bound(&plan.chains, &p.table, &params);
            Ok(BoundsEntry {
                instance: p.index,
                strategy: cfg.strategy,
                remark1_ratio: remark1_ratio(report.sum_d, report.sum_delta_sq, params.log_k),
                report,
            })
        })
        .collect()
}

pub fn cmd_bounds(cfg: &ExperimentConfig, format: OutputFormat) -> Result<String> {
    let entries = bounds_entries(cfg)?;
    Ok(match format {
        OutputFormat::Json => {
            let doc = BoundsDocument {
                config: cfg.clone(),
                reports: entries,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("bounds serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from(
                "instance,strategy,baseline,proposed,b_used,ratio,remark1_ratio,sum_D,sum_delta_sq,improvement_region,in_regime\n",
            );
            for e in entries {
                let r = e.report;
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    e.instance,
                    e.strategy.name(),
                    fmt_g(r.baseline),
                    fmt_g(r.proposed),
                    fmt_g(r.b_used),
                    fmt_g(r.ratio),
                    fmt_g(e.remark1_ratio),
                    fmt_g(r.sum_d),
                    fmt_g(r.sum_delta_sq),
                    r.improvement_region,
                    r.in_regime
                )
                .expect("write to string");
            }
            s
        }
    })
}

/// Chain listing in decode order, each line annotated with its Δ′ weight
/// `w` and effective squared distance `D` after a `#`, so the output can be
/// fed back through `strategy = "file"`.
pub fn cmd_chains(cfg: &ExperimentConfig, validate: bool) -> Result<String> {
    let params = cfg.validate()?;
    let mut s = String::new();
    for p in prepare_instances(cfg)? {
        let plan = plan_for(cfg, &p.table, &params)?;
        writeln!(
            s,
            "# instance={} strategy={} region_mode={} n={} dim={}",
            p.index,
            cfg.strategy.name(),
            cfg.region_mode,
            params.n,
            params.dim
        )
        .expect("write to string");
        for &c in &plan.decode_order {
            let ch = &plan.chains[c];
            let w: f64 = ch.hop_weights(params.dim, params.n).iter().sum();
            writeln!(s, "{ch}  # w={} D={}", fmt_g(w), fmt_g(d_value(ch, params.n)))
                .expect("write to string");
        }
        if validate {
            validate_chains(&plan.chains, &plan.decode_order)
                .map_err(|v| Error::InvalidChain(format!("instance {}: {v}", p.index)))?;
            writeln!(s, "# valid").expect("write to string");
        }
    }
    Ok(s)
}

/// Parameters of a region sweep over `delta_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSweep {
    pub n: usize,
    pub delta_t: f64,
    pub delta_ti: f64,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Default for RegionSweep {
    fn default() -> Self {
        RegionSweep {
            n: 16,
            delta_t: 1.0,
            delta_ti: 1.0,
            from: 0.5,
            to: 10.0,
            step: 0.1,
        }
    }
}

pub const REGION_HEADER: &str = "delta_i,d_value,eq17_lhs,in_region_eq15,in_region_strict_eq17";

pub fn cmd_region(sweep: &RegionSweep) -> Result<String> {
    let RegionSweep {
        n,
        delta_t,
        delta_ti,
        from,
        to,
        step,
    } = *sweep;
    if n < 2 {
        return Err(field_err("n", "must be >= 2"));
    }
    if !(step > 0.0 && step.is_finite()) || !(to >= from) || !(from >= 0.0) {
        return Err(Error::Config(format!(
            "bad sweep range from={from} to={to} step={step}"
        )));
    }
    for (name, v) in [("delta_t", delta_t), ("delta_ti", delta_ti)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(field_err(name, "must be finite and >= 0"));
        }
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    let d = two_hop_d(delta_t, delta_ti, n);
    let lhs = strict_region_lhs(delta_t, delta_ti, n);
    let mut s = String::from(REGION_HEADER);
    s.push('\n');
    for i in 0..count {
        let di = from + i as f64 * step;
        writeln!(
            s,
            "{},{},{},{},{}",
            fmt_g(di),
            fmt_g(d),
            fmt_g(lhs),
            region2_check(delta_t, delta_ti, di, n, RegionMode::DConsistent),
            region2_check(delta_t, delta_ti, di, n, RegionMode::Strict)
        )
        .expect("write to string");
    }
    Ok(s)
}
