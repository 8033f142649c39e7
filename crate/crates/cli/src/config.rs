//! Flat `key = value` run configuration.
//!
//! ```text
//! # Figure-2 style point
//! n = 100
//! k = 2
//! t = -10dB
//! p_s = inf
//! metric = eff_throughput
//! a = 0.5
//! sweep = n: 40, 100, 200
//! ```
//!
//! Unset system parameters default to `λ = 2`, `β = 3`, `m = 2`, `η = 20`,
//! `P_M = 0 dB`, `T = −10 dB`, `P_S = ∞`, `N = 40`, `k = 1`. `t`, `p_s`,
//! `p_m` and `x0` accept a `dB` suffix; `p_s` also accepts `inf`.

use std::collections::HashSet;
use std::path::PathBuf;

use kbest_core::montecarlo::{CsiMode, Scenario};
use kbest_core::presets::{base_params, db};
use kbest_core::{CsiParams, Metric, StPower, SystemParams};

use crate::CliError;

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Lambda,
    Beta,
    M,
    Eta,
    PM,
    T,
    PS,
    N,
    K,
    Rho,
    Delta,
    Gamma0,
    EtaHat,
    BetaHat,
}

impl SweepVar {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match canonical_key(s) {
            "lambda" => Self::Lambda,
            "beta" => Self::Beta,
            "m" => Self::M,
            "eta" => Self::Eta,
            "p_m" => Self::PM,
            "t" => Self::T,
            "p_s" => Self::PS,
            "n" => Self::N,
            "k" => Self::K,
            "rho" => Self::Rho,
            "delta" => Self::Delta,
            "gamma0" => Self::Gamma0,
            "eta_hat" => Self::EtaHat,
            "beta_hat" => Self::BetaHat,
            other => return Err(CliError::Config(format!("`{other}` cannot be swept"))),
        })
    }

    /// Column header for this variable.
    pub fn name(self) -> &'static str {
        match self {
            Self::Lambda => "lambda",
            Self::Beta => "beta",
            Self::M => "m",
            Self::Eta => "eta",
            Self::PM => "p_m",
            Self::T => "t",
            Self::PS => "p_s",
            Self::N => "n",
            Self::K => "k",
            Self::Rho => "rho",
            Self::Delta => "delta",
            Self::Gamma0 => "gamma0",
            Self::EtaHat => "eta_hat",
            Self::BetaHat => "beta_hat",
        }
    }

    fn allows_db(self) -> bool {
        matches!(self, Self::T | Self::PS | Self::PM)
    }

    fn is_csi(self) -> bool {
        matches!(self, Self::Rho | Self::Delta | Self::Gamma0 | Self::EtaHat | Self::BetaHat)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub csi: Option<CsiParams>,
    pub csi_mode: CsiMode,
    pub metric: Metric,
    pub sweep: Option<Sweep>,
    pub n_trials: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    /// Factor applied to the scale `b` of the asymptotic side of a comparison
    /// only; a diagnostic for checking that `compare` can fail.
    pub b_scale: f64,
}

pub const DEFAULT_TRIALS: u64 = 100_000;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: base_params(40, 1, StPower::Unlimited),
            csi: None,
            csi_mode: CsiMode::Substitution,
            metric: Metric::AvgThroughput,
            sweep: None,
            n_trials: DEFAULT_TRIALS,
            seed: 1,
            output_path: None,
            b_scale: 1.0,
        }
    }
}

fn canonical_key(k: &str) -> &str {
    match k {
        "t_intf" => "t",
        "n_users" => "n",
        "k_rank" => "k",
        "a_exp" => "a",
        other => other,
    }
}

fn bad(key: &str, value: &str, why: &str) -> CliError {
    CliError::Config(format!("{key} = {value}: {why}"))
}

/// Parses a real number, optionally in dB.
pub fn parse_real(key: &str, value: &str, allow_db: bool) -> Result<f64, CliError> {
    let v = value.trim();
    let (num, in_db) = match v.strip_suffix("dB").or_else(|| v.strip_suffix("db")) {
        Some(n) if allow_db => (n.trim(), true),
        Some(_) => return Err(bad(key, value, "dB values are only accepted for t, p_s, p_m and x0")),
        None => (v, false),
    };
    let x: f64 = num.parse().map_err(|_| bad(key, value, "not a number"))?;
    if !x.is_finite() {
        return Err(bad(key, value, "must be finite"));
    }
    Ok(if in_db { db(x) } else { x })
}

fn parse_count(key: &str, value: &str) -> Result<u32, CliError> {
    value.trim().parse().map_err(|_| bad(key, value, "expected a non-negative integer"))
}

fn parse_cap(key: &str, value: &str) -> Result<StPower, CliError> {
    if value.trim().eq_ignore_ascii_case("inf") {
        Ok(StPower::Unlimited)
    } else {
        parse_real(key, value, true).map(StPower::Limited)
    }
}

/// Partially specified CSI; completed once all keys are read.
#[derive(Default)]
struct CsiDraft {
    rho: Option<f64>,
    delta: Option<f64>,
    gamma0: Option<f64>,
    eta_hat: Option<f64>,
    beta_hat: Option<f64>,
}

impl CsiDraft {
    fn any(&self) -> bool {
        self.rho.is_some() || self.delta.is_some() || self.gamma0.is_some() || self.eta_hat.is_some() || self.beta_hat.is_some()
    }
}

impl RunConfig {
    /// Parses configuration text.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        let mut csi = CsiDraft::default();
        let mut metric_name: Option<String> = None;
        let (mut a, mut c, mut v, mut x0) = (None, None, None, None);
        let mut sweep_text: Option<String> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = canonical_key(key.trim());
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            let p = &mut cfg.params;
            match key {
                "lambda" => p.lambda = parse_real(key, value, false)?,
                "beta" => p.beta = parse_real(key, value, false)?,
                "m" => p.m = parse_real(key, value, false)?,
                "eta" => p.eta = parse_real(key, value, false)?,
                "p_m" => p.p_m = parse_real(key, value, true)?,
                "t" => p.t_intf = parse_real(key, value, true)?,
                "p_s" => p.p_s = parse_cap(key, value)?,
                "n" => p.n_users = parse_count(key, value)?,
                "k" => p.k_rank = parse_count(key, value)?,
                "metric" => metric_name = Some(value.to_ascii_lowercase()),
                "a" => a = Some(parse_real(key, value, false)?),
                "c" => c = Some(parse_real(key, value, false)?),
                "v" => v = Some(parse_real(key, value, false)?),
                "x0" => x0 = Some(parse_real(key, value, true)?),
                "rho" => csi.rho = Some(parse_real(key, value, false)?),
                "delta" => csi.delta = Some(parse_real(key, value, false)?),
                "gamma0" => csi.gamma0 = Some(parse_real(key, value, false)?),
                "eta_hat" => csi.eta_hat = Some(parse_real(key, value, false)?),
                "beta_hat" => csi.beta_hat = Some(parse_real(key, value, false)?),
                "csi_mode" => {
                    cfg.csi_mode = match value {
                        "substitution" => CsiMode::Substitution,
                        "estimate_select_truth_evaluate" => CsiMode::EstimateSelectTruthEvaluate,
                        _ => return Err(bad(key, value, "expected substitution or estimate_select_truth_evaluate")),
                    }
                }
                "sweep" => sweep_text = Some(value.to_string()),
                "trials" => cfg.n_trials = value.parse().map_err(|_| bad(key, value, "expected an integer"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad(key, value, "expected a 64-bit integer"))?,
                "out" => cfg.output_path = Some(PathBuf::from(value)),
                "b_scale" => cfg.b_scale = parse_real(key, value, false)?,
                other => return Err(CliError::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }

        cfg.metric = match metric_name.as_deref().unwrap_or("avg_throughput") {
            "avg_throughput" => Metric::AvgThroughput,
            "eff_throughput" => {
                let a = a.ok_or_else(|| CliError::Config("eff_throughput needs `a`".into()))?;
                // No delay constraint at A = 0.
                if a == 0.0 {
                    Metric::AvgThroughput
                } else {
                    Metric::EffThroughput { a_exp: a }
                }
            }
            "ber" => Metric::AvgBer {
                c: c.ok_or_else(|| CliError::Config("ber needs `c`".into()))?,
                v: v.ok_or_else(|| CliError::Config("ber needs `v`".into()))?,
            },
            "outage" => Metric::Outage {
                x0: x0.ok_or_else(|| CliError::Config("outage needs `x0`".into()))?,
            },
            other => {
                return Err(CliError::Config(format!(
                    "unknown metric `{other}` (avg_throughput, eff_throughput, ber, outage)"
                )))
            }
        };
        cfg.metric.validate().map_err(|e| CliError::Config(e.to_string()))?;

        if let Some(s) = sweep_text {
            let sweep = parse_sweep(&s)?;
            if sweep.var.is_csi() && csi.rho.is_none() {
                // Sweeping a CSI field needs the remaining CSI fields.
                csi.rho = Some(1.0);
            }
            cfg.sweep = Some(sweep);
        }
        if csi.any() {
            let gamma0 = csi.gamma0.ok_or_else(|| CliError::Config("CSI settings need `gamma0`".into()))?;
            cfg.csi = Some(CsiParams {
                rho: csi.rho.ok_or_else(|| CliError::Config("CSI settings need `rho`".into()))?,
                delta: csi.delta.unwrap_or(1.0),
                gamma0,
                eta_hat: csi.eta_hat.unwrap_or(cfg.params.eta),
                beta_hat: csi.beta_hat.unwrap_or(cfg.params.beta),
            });
        }
        if !(cfg.b_scale > 0.0) {
            return Err(CliError::Config("b_scale must be positive".into()));
        }
        for s in cfg.scenarios()? {
            s.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
            if let Some(c) = &s.csi {
                c.validate().map_err(|e| CliError::Config(e.to_string()))?;
            }
        }
        Ok(cfg)
    }

    /// Abscissa values and the scenario at each; a single unlabeled point
    /// when there is no sweep.
    pub fn scenarios(&self) -> Result<Vec<Scenario>, CliError> {
        let base = {
            let s = Scenario::new(self.metric, self.params);
            match self.csi {
                Some(c) => s.with_csi(c, self.csi_mode),
                None => s,
            }
        };
        let Some(sweep) = &self.sweep else {
            return Ok(vec![base]);
        };
        sweep.grid.iter().map(|&x| apply(&base, sweep.var, x)).collect()
    }

    /// Header of the abscissa column.
    pub fn x_name(&self) -> &'static str {
        self.sweep.as_ref().map_or("point", |s| s.var.name())
    }

    /// Abscissa values, `0` for the single point of an unswept config.
    pub fn x_values(&self) -> Vec<f64> {
        self.sweep.as_ref().map_or(vec![0.0], |s| s.grid.clone())
    }
}

fn as_count(var: SweepVar, x: f64) -> Result<u32, CliError> {
    if x.fract() != 0.0 || !(0.0..=f64::from(u32::MAX)).contains(&x) {
        return Err(CliError::Config(format!("{} grid value {x} is not a count", var.name())));
    }
    Ok(x as u32)
}

fn apply(base: &Scenario, var: SweepVar, x: f64) -> Result<Scenario, CliError> {
    let mut s = *base;
    let p = &mut s.params;
    match var {
        SweepVar::Lambda => p.lambda = x,
        SweepVar::Beta => p.beta = x,
        SweepVar::M => p.m = x,
        SweepVar::Eta => p.eta = x,
        SweepVar::PM => p.p_m = x,
        SweepVar::T => p.t_intf = x,
        SweepVar::PS => p.p_s = if x.is_infinite() { StPower::Unlimited } else { StPower::Limited(x) },
        SweepVar::N => p.n_users = as_count(var, x)?,
        SweepVar::K => p.k_rank = as_count(var, x)?,
        _ => {
            let c = s.csi.as_mut().ok_or_else(|| CliError::Config("CSI sweep without CSI settings".into()))?;
            match var {
                SweepVar::Rho => c.rho = x,
                SweepVar::Delta => c.delta = x,
                SweepVar::Gamma0 => c.gamma0 = x,
                SweepVar::EtaHat => c.eta_hat = x,
                _ => c.beta_hat = x,
            }
        }
    }
    Ok(s)
}

/// `var: v1, v2, …` with a strictly increasing grid.
fn parse_sweep(text: &str) -> Result<Sweep, CliError> {
    let (name, list) = text
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("sweep = {text}: expected `variable: v1, v2, ...`")))?;
    let var = SweepVar::parse(name.trim())?;
    let grid = list
        .split(',')
        .map(|s| {
            if var == SweepVar::PS && s.trim().eq_ignore_ascii_case("inf") {
                Ok(f64::INFINITY)
            } else {
                parse_real(var.name(), s, var.allows_db())
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CliError::Config(format!("sweep over {}: grid must be non-empty and strictly increasing", var.name())));
    }
    Ok(Sweep { var, grid })
}
