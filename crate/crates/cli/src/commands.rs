//! Subcommand bodies.

use kbest_core::asymptotics::{evaluate, AsymptoticResult};
use kbest_core::montecarlo::{estimate_batch, ks_statistic, Scenario};
use kbest_core::presets::{figure, FigureId};
use kbest_core::{Error, Metric};

use crate::config::{RunConfig, SweepVar};
use crate::csv::{fmt_f64, Table};
use crate::CliError;

/// Result status of a command that produced output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// `failed` of `points` comparison points exceeded their tolerance.
    CompareFailed { failed: usize, points: usize },
    /// `rows` rows carry a quadrature failure flag.
    NumericalFailure { rows: usize },
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::CompareFailed { .. } => 1,
            Outcome::NumericalFailure { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub csv: String,
    pub outcome: Outcome,
}

/// Asymptotic value of a scenario, with `b` scaled by `b_scale`.
fn asymptotic(s: &Scenario, b_scale: f64) -> Result<AsymptoticResult, Error> {
    let mut p = s.params;
    // b is proportional to λ, which enters nowhere else.
    p.lambda *= b_scale;
    evaluate(&s.metric, &p, s.csi.as_ref())
}

/// Row cells for an asymptotic value; quadrature failures become flagged rows.
fn asymptotic_cells(r: Result<AsymptoticResult, Error>) -> Result<([String; 3], bool), CliError> {
    match r {
        Ok(a) => Ok(([fmt_f64(a.value), fmt_f64(a.quadrature_err), "ok".into()], false)),
        Err(Error::Accuracy { estimate, error_bound }) => Ok((
            [fmt_f64(estimate), fmt_f64(error_bound), "quadrature_failure".into()],
            true,
        )),
        Err(e) => Err(e.into()),
    }
}

fn flagged(rows: usize) -> Outcome {
    if rows == 0 {
        Outcome::Ok
    } else {
        Outcome::NumericalFailure { rows }
    }
}

/// One row per grid point: `x, asymptotic, quadrature_err, status`.
pub fn cmd_asymptotic(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut t = Table::new([cfg.x_name(), "asymptotic", "quadrature_err", "status"]);
    let mut bad = 0;
    for (x, s) in cfg.x_values().into_iter().zip(cfg.scenarios()?) {
        let ([v, e, st], f) = asymptotic_cells(asymptotic(&s, cfg.b_scale))?;
        bad += usize::from(f);
        t.push(vec![fmt_f64(x), v, e, st]);
    }
    Ok(Report {
        csv: t.render(),
        outcome: flagged(bad),
    })
}

/// One row per grid point: `x, mc_mean, mc_stderr, n_trials`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report, CliError> {
    let est = estimate_batch(&cfg.scenarios()?, cfg.n_trials, cfg.seed)?;
    let mut t = Table::new([cfg.x_name(), "mc_mean", "mc_stderr", "n_trials"]);
    for (x, r) in cfg.x_values().into_iter().zip(&est) {
        t.push(vec![fmt_f64(x), fmt_f64(r.mean), fmt_f64(r.std_error), r.n_trials.to_string()]);
    }
    Ok(Report {
        csv: t.render(),
        outcome: Outcome::Ok,
    })
}

/// Asymptotic against Monte Carlo. A point fails when its relative error
/// exceeds `max(rel_tol, 3·stderr/|mean|)`.
pub fn cmd_compare(cfg: &RunConfig, rel_tol: f64) -> Result<Report, CliError> {
    if !(rel_tol >= 0.0) {
        return Err(CliError::Config(format!("rel-tol {rel_tol} must be non-negative")));
    }
    let scen = cfg.scenarios()?;
    let est = estimate_batch(&scen, cfg.n_trials, cfg.seed)?;
    let mut t = Table::new([cfg.x_name(), "asymptotic", "mc_mean", "mc_stderr", "rel_err", "pass"]);
    let mut failed = 0;
    for ((x, s), r) in cfg.x_values().into_iter().zip(&scen).zip(&est) {
        let a = asymptotic(s, cfg.b_scale).map_err(CliError::from)?.value;
        let rel_err = (a - r.mean).abs() / r.mean.abs();
        let allowed = rel_tol.max(3.0 * r.std_error / r.mean.abs());
        let pass = rel_err <= allowed;
        failed += usize::from(!pass);
        t.push(vec![
            fmt_f64(x),
            fmt_f64(a),
            fmt_f64(r.mean),
            fmt_f64(r.std_error),
            fmt_f64(rel_err),
            pass.to_string(),
        ]);
    }
    let outcome = if failed == 0 {
        Outcome::Ok
    } else {
        Outcome::CompareFailed {
            failed,
            points: scen.len(),
        }
    };
    Ok(Report {
        csv: t.render(),
        outcome,
    })
}

/// Default user counts for the convergence diagnostic.
pub const CONVERGENCE_GRID: [u32; 4] = [10, 50, 200, 1000];

/// KS distance to the limiting law over a user-count grid (the config's
/// `n` sweep, or [`CONVERGENCE_GRID`]). `n_trials` is the sample count.
pub fn cmd_convergence(cfg: &RunConfig) -> Result<Report, CliError> {
    let grid: Vec<u32> = match &cfg.sweep {
        Some(s) if s.var == SweepVar::N => s.grid.iter().map(|&x| x as u32).collect(),
        Some(s) => {
            return Err(CliError::Config(format!(
                "convergence sweeps the user count; got a sweep over {}",
                s.var.name()
            )))
        }
        None => CONVERGENCE_GRID.to_vec(),
    };
    let mut t = Table::new(["n", "k", "ks_distance", "decreasing"]);
    let mut prev = f64::INFINITY;
    for n in grid {
        let p = kbest_core::SystemParams { n_users: n, ..cfg.params };
        let d = ks_statistic(&p, cfg.n_trials, cfg.seed)?;
        t.push(vec![n.to_string(), p.k_rank.to_string(), fmt_f64(d), (d < prev).to_string()]);
        prev = d;
    }
    Ok(Report {
        csv: t.render(),
        outcome: Outcome::Ok,
    })
}

/// Asymptotic and Monte Carlo columns for every point of a figure.
pub fn cmd_figure(id: FigureId, n_trials: u64, seed: u64) -> Result<Report, CliError> {
    let fig = figure(id);
    let scen: Vec<Scenario> = fig.points.iter().map(|p| p.scenario).collect();
    let est = estimate_batch(&scen, n_trials, seed)?;
    let mut t = Table::new([
        "series",
        "k",
        fig.x_name,
        "metric",
        "asymptotic",
        "quadrature_err",
        "mc_mean",
        "mc_stderr",
        "status",
    ]);
    let mut bad = 0;
    for (pt, r) in fig.points.iter().zip(&est) {
        let ([v, e, st], f) = asymptotic_cells(asymptotic(&pt.scenario, 1.0))?;
        bad += usize::from(f);
        t.push(vec![
            pt.series.clone(),
            pt.scenario.params.k_rank.to_string(),
            fmt_f64(pt.x),
            metric_label(&pt.scenario.metric),
            v,
            e,
            fmt_f64(r.mean),
            fmt_f64(r.std_error),
            st,
        ]);
    }
    Ok(Report {
        csv: t.render(),
        outcome: flagged(bad),
    })
}

fn metric_label(m: &Metric) -> String {
    match m {
        Metric::EffThroughput { a_exp } => format!("{}(A={a_exp})", m.name()),
        _ => m.name().to_string(),
    }
}
