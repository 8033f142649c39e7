//! Exact-model Monte Carlo simulation.
//!
//! A trial draws `|h0|²`, then for each user `|h_i|² ~ Gamma(m, β)` and
//! `|g_i|² ~ Exp(λ)`, in that order. The draw sequence does not depend on
//! `k`, `T` or `P_S`, so [`estimate_batch`] can score many scenarios on the
//! same trials and still match [`estimate`] bit for bit.
//!
//! Trials run in blocks of 4096 on the rayon pool. Per-block moments are
//! merged in block order, so the thread count never changes a result.
//!
//! Standard errors, with `μ̂`, `s` the sample mean and standard deviation of
//! the per-trial quantity over `n` trials:
//!
//! - average throughput, BER: `s/√n` (BER scaled by `c`);
//! - effective throughput: delta method on `−log2(μ̂)/A`, i.e. `(s/√n)/(μ̂ A ln 2)`;
//! - outage: binomial, `√(p̂(1−p̂)/n)`.

mod rng;
mod select;

use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::{Distribution, Exp, Exp1, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{cap_power, effective_params, CsiParams, LimitingDistribution, Metric, StPower, SystemParams};

pub use rng::{trial_rng, StreamFamily};
pub use select::{select_kth_largest, select_kth_largest_by};

/// Smallest accepted trial count for [`estimate`].
pub const MIN_TRIALS: u64 = 100;
/// Smallest accepted sample count for [`ks_statistic`].
pub const MIN_KS_SAMPLES: u64 = 1000;
const BLOCK: u64 = 4096;

/// How outdated secondary-link CSI enters a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CsiMode {
    /// Select and evaluate on the estimated links `|ĥ_i|² ~ Gamma(m, β̂)`.
    /// This is the model behind the asymptotic expressions.
    #[default]
    Substitution,
    /// Extension beyond the analytical model: select on the estimates,
    /// evaluate the true link of the chosen user. True and estimated powers
    /// form a Kibble bivariate gamma pair with marginals `Gamma(m, β)`,
    /// `Gamma(m, β̂)` and power correlation `δ²`; for `m = 1`, `β̂ = β` this
    /// is the complex Gaussian model `h = δĥ + √(1−δ²)h̃`. No asymptotic
    /// counterpart exists.
    EstimateSelectTruthEvaluate,
}

/// One metric under one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub metric: Metric,
    pub params: SystemParams,
    pub csi: Option<CsiParams>,
    pub mode: CsiMode,
}

impl Scenario {
    pub fn new(metric: Metric, params: SystemParams) -> Self {
        Self {
            metric,
            params,
            csi: None,
            mode: CsiMode::Substitution,
        }
    }

    pub fn with_csi(self, csi: CsiParams, mode: CsiMode) -> Self {
        Self {
            csi: Some(csi),
            mode,
            ..self
        }
    }
}

/// Realization of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Transmit power `P`.
    pub st_power: f64,
    /// SIR of the selected user, `P·z_rank`.
    pub kth_sir: f64,
    /// k-th largest normalized channel ratio.
    pub z_rank: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_trials: u64,
    pub seed: u64,
    pub metric: Metric,
}

/// Everything that shapes the per-trial draws.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DrawKey {
    lambda: f64,
    beta: f64,
    m: f64,
    p_m: f64,
    n_users: u32,
    truth: Option<TruthKey>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TruthKey {
    power_corr: f64,
    beta_true: f64,
}

struct TruthSampler {
    key: TruthKey,
    m: f64,
    beta_hat: f64,
    independent: Gamma<f64>,
}

impl TruthSampler {
    fn sample<R: Rng + ?Sized>(&self, estimate: f64, rng: &mut R) -> f64 {
        let r = self.key.power_corr;
        if r >= 1.0 {
            return estimate * (self.key.beta_true / self.beta_hat);
        }
        if r <= 0.0 {
            return self.independent.sample(rng);
        }
        let rate = r * estimate / ((1.0 - r) * self.beta_hat);
        let extra: f64 = if rate > 0.0 {
            Poisson::new(rate).map_or(0.0, |d| d.sample(rng))
        } else {
            0.0
        };
        Gamma::new(self.m + extra, (1.0 - r) * self.key.beta_true)
            .map_or(0.0, |d| d.sample(rng))
    }
}

struct Sampler {
    gain: Gamma<f64>,
    interf: Exp<f64>,
    p_m: f64,
    n_users: usize,
    truth: Option<TruthSampler>,
}

impl Sampler {
    fn new(key: &DrawKey) -> Result<Self> {
        let gain = Gamma::new(key.m, key.beta).map_err(|e| Error::param("m/beta", e.to_string()))?;
        let interf = Exp::new(key.lambda).map_err(|e| Error::param("lambda", e.to_string()))?;
        let truth = match key.truth {
            Some(t) => Some(TruthSampler {
                key: t,
                m: key.m,
                beta_hat: key.beta,
                independent: Gamma::new(key.m, t.beta_true).map_err(|e| Error::param("beta", e.to_string()))?,
            }),
            None => None,
        };
        Ok(Self {
            gain,
            interf,
            p_m: key.p_m,
            n_users: key.n_users as usize,
            truth,
        })
    }

    /// Fills `users` with (selection ratio, evaluation ratio) pairs and
    /// returns the unit-rate exponential behind `|h0|²`.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, users: &mut Vec<(f64, f64)>) -> f64 {
        let e0: f64 = Exp1.sample(rng);
        users.clear();
        for _ in 0..self.n_users {
            let h = self.gain.sample(rng);
            let g = self.p_m * self.interf.sample(rng);
            let z = h / g;
            let z_eval = match &self.truth {
                Some(t) => t.sample(h, rng) / g,
                None => z,
            };
            users.push((z, z_eval));
        }
        e0
    }
}

/// A scenario reduced to what the trial loop needs.
#[derive(Debug, Clone, Copy)]
struct Resolved {
    metric: Metric,
    k_rank: usize,
    /// `T·η` of the effective parameters; `P = min(P_S, T·η / e0)`.
    t_eta: f64,
    p_s: StPower,
    key: DrawKey,
}

fn resolve(s: &Scenario) -> Result<Resolved> {
    s.metric.validate()?;
    s.params.validate_for_simulation()?;
    let eff = match &s.csi {
        Some(c) => effective_params(&s.params, c)?,
        None => s.params,
    };
    let truth = match (s.mode, &s.csi) {
        (CsiMode::EstimateSelectTruthEvaluate, Some(c)) => Some(TruthKey {
            power_corr: c.delta * c.delta,
            beta_true: s.params.beta,
        }),
        _ => None,
    };
    Ok(Resolved {
        metric: s.metric,
        k_rank: eff.k_rank as usize,
        t_eta: eff.t_intf * eff.eta,
        p_s: eff.p_s,
        key: DrawKey {
            lambda: eff.lambda,
            beta: eff.beta,
            m: eff.m,
            p_m: eff.p_m,
            n_users: eff.n_users,
            truth,
        },
    })
}

fn trial_value(metric: &Metric, x: f64) -> f64 {
    match *metric {
        Metric::AvgThroughput => x.ln_1p() / LN_2,
        Metric::EffThroughput { a_exp } => (-a_exp * x.ln_1p()).exp(),
        Metric::AvgBer { v, .. } => (-v * x).exp(),
        Metric::Outage { x0 } => f64::from(u8::from(x <= x0)),
    }
}

/// Running mean and centered second moment.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, o.n as f64, n as f64);
        self.mean += d * nb / nf;
        self.m2 += o.m2 + d * d * na * nb / nf;
        self.n = n;
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let var = (self.m2 / (self.n - 1) as f64).max(0.0);
        (var / self.n as f64).sqrt()
    }
}

fn finish(metric: Metric, mo: &Moments, seed: u64) -> EstimateResult {
    let n = mo.n;
    let (mean, std_error) = match metric {
        Metric::AvgThroughput => (mo.mean, mo.std_error()),
        Metric::EffThroughput { a_exp } => (
            -mo.mean.log2() / a_exp,
            mo.std_error() / (mo.mean * a_exp * LN_2),
        ),
        Metric::AvgBer { c, .. } => (c * mo.mean, c * mo.std_error()),
        Metric::Outage { .. } => {
            let p = mo.mean;
            (p, (p * (1.0 - p) / n as f64).max(0.0).sqrt())
        }
    };
    EstimateResult {
        mean,
        std_error,
        n_trials: n,
        seed,
        metric,
    }
}

fn block_ranges(n: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let blocks = usize::try_from(n.div_ceil(BLOCK)).unwrap_or(usize::MAX);
    (0..blocks).into_par_iter().map(move |b| {
        let b = b as u64;
        (b * BLOCK, ((b + 1) * BLOCK).min(n))
    })
}

/// Runs one draw group: all `members` share `key`.
fn run_group(key: &DrawKey, members: &[Resolved], n_trials: u64, seed: u64) -> Result<Vec<Moments>> {
    let sampler = Sampler::new(key)?;
    let family = StreamFamily::new(seed);
    let mut ranks: Vec<usize> = members.iter().map(|r| r.k_rank).collect();
    ranks.sort_unstable();
    ranks.dedup();
    let slot: Vec<usize> = members
        .iter()
        .map(|r| ranks.binary_search(&r.k_rank).unwrap_or(0))
        .collect();

    let blocks: Vec<Vec<Moments>> = block_ranges(n_trials)
        .map(|(start, end)| {
            let mut acc = vec![Moments::default(); members.len()];
            let mut users = Vec::with_capacity(sampler.n_users);
            let mut kth = vec![0.0; ranks.len()];
            for t in start..end {
                let mut rng = family.stream(t);
                let e0 = sampler.draw(&mut rng, &mut users);
                for (z, &k) in kth.iter_mut().zip(&ranks) {
                    *z = select_kth_largest_by(&mut users, k, |u| u.0).1;
                }
                for ((r, a), &j) in members.iter().zip(acc.iter_mut()).zip(&slot) {
                    let p = cap_power(r.p_s, r.t_eta / e0);
                    a.push(trial_value(&r.metric, p * kth[j]));
                }
            }
            acc
        })
        .collect();

    let mut total = vec![Moments::default(); members.len()];
    for b in &blocks {
        for (t, m) in total.iter_mut().zip(b) {
            t.merge(m);
        }
    }
    Ok(total)
}

/// Estimates every scenario from one shared set of `n_trials` trials per
/// draw group. Results equal those of separate [`estimate`] calls exactly.
pub fn estimate_batch(scenarios: &[Scenario], n_trials: u64, seed: u64) -> Result<Vec<EstimateResult>> {
    if n_trials < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            min: MIN_TRIALS,
            got: n_trials,
        });
    }
    let resolved = scenarios.iter().map(resolve).collect::<Result<Vec<_>>>()?;
    let mut groups: Vec<(DrawKey, Vec<usize>)> = Vec::new();
    for (i, r) in resolved.iter().enumerate() {
        match groups.iter_mut().find(|(k, _)| *k == r.key) {
            Some((_, idx)) => idx.push(i),
            None => groups.push((r.key, vec![i])),
        }
    }
    let mut out: Vec<Option<EstimateResult>> = vec![None; scenarios.len()];
    for (key, idx) in &groups {
        let members: Vec<Resolved> = idx.iter().map(|&i| resolved[i]).collect();
        let moments = run_group(key, &members, n_trials, seed)?;
        for (&i, mo) in idx.iter().zip(&moments) {
            out[i] = Some(finish(resolved[i].metric, mo, seed));
        }
    }
    Ok(out.into_iter().flatten().collect())
}

/// Monte Carlo estimate of `metric` with the substitution CSI semantics.
pub fn estimate(
    metric: &Metric,
    p: &SystemParams,
    csi: Option<&CsiParams>,
    n_trials: u64,
    seed: u64,
) -> Result<EstimateResult> {
    let mut s = Scenario::new(*metric, *p);
    if let Some(c) = csi {
        s = s.with_csi(*c, CsiMode::Substitution);
    }
    estimate_with(&s, n_trials, seed)
}

/// [`estimate`] for a fully specified scenario, including the CSI mode.
pub fn estimate_with(s: &Scenario, n_trials: u64, seed: u64) -> Result<EstimateResult> {
    Ok(estimate_batch(std::slice::from_ref(s), n_trials, seed)?.remove(0))
}

/// Simulates a single trial from `rng` under the substitution CSI semantics.
pub fn run_trial<R: Rng + ?Sized>(p: &SystemParams, csi: Option<&CsiParams>, rng: &mut R) -> Result<TrialOutcome> {
    let mut s = Scenario::new(Metric::AvgThroughput, *p);
    if let Some(c) = csi {
        s = s.with_csi(*c, CsiMode::Substitution);
    }
    let r = resolve(&s)?;
    let sampler = Sampler::new(&r.key)?;
    let mut users = Vec::with_capacity(sampler.n_users);
    let e0 = sampler.draw(rng, &mut users);
    let z_rank = select_kth_largest_by(&mut users, r.k_rank, |u| u.0).1;
    let st_power = cap_power(r.p_s, r.t_eta / e0);
    Ok(TrialOutcome {
        st_power,
        kth_sir: st_power * z_rank,
        z_rank,
    })
}

/// Supremum distance between the empirical CDF of `samples` and `cdf`.
/// Sorts `samples` in place.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Draws `n_samples` normalized order statistics `Z_(N−k+1)/b` (no power
/// adaptation).
pub fn order_statistic_samples(p: &SystemParams, n_samples: u64, seed: u64) -> Result<Vec<f64>> {
    p.validate_for_simulation()?;
    let b = p.scale_b()?;
    let r = resolve(&Scenario::new(Metric::AvgThroughput, *p))?;
    let sampler = Sampler::new(&r.key)?;
    let family = StreamFamily::new(seed);
    let blocks: Vec<Vec<f64>> = block_ranges(n_samples)
        .map(|(start, end)| {
            let mut users = Vec::with_capacity(sampler.n_users);
            (start..end)
                .map(|t| {
                    let mut rng = family.stream(t);
                    sampler.draw(&mut rng, &mut users);
                    select_kth_largest_by(&mut users, r.k_rank, |u| u.0).0 / b
                })
                .collect()
        })
        .collect();
    Ok(blocks.concat())
}

/// KS distance between simulated `Z_(N−k+1)/b` and its inverse-gamma limit.
pub fn ks_statistic(p: &SystemParams, n_samples: u64, seed: u64) -> Result<f64> {
    if n_samples < MIN_KS_SAMPLES {
        return Err(Error::TooFewTrials {
            min: MIN_KS_SAMPLES,
            got: n_samples,
        });
    }
    let mut samples = order_statistic_samples(p, n_samples, seed)?;
    let lim = LimitingDistribution::new(p.k_rank)?;
    Ok(ks_distance(&mut samples, |z| lim.cdf(z)))
}

/// Variance of the innovation `h̃0` in `h0 = ρĥ0 + √(1−ρ²)h̃0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Innovation {
    /// `h̃0 ~ CN(0, 1)`, consistent with [`CsiParams::true_eta`].
    #[default]
    Unit,
    /// `h̃0 ~ CN(0, 1/η̂)`, so `h0` and `ĥ0` are identically distributed.
    /// This is the setting under which the power margin attains `Γ0`.
    MatchEstimate,
}

/// Fraction of trials in which the margin-adjusted power violates the
/// interference cap on the true channel, `P·|h0|² > T`.
///
/// `ĥ0 ~ CN(0, 1/η̂)` and `h0 = ρĥ0 + √(1−ρ²)h̃0` with `h̃0 ~ CN(0, 1)`.
/// Unless `η̂ = 1`, the rate then differs from `Γ0`; see [`Innovation`].
pub fn interference_outage_rate(p: &SystemParams, csi: &CsiParams, n_trials: u64, seed: u64) -> Result<f64> {
    let r_i = csi.power_margin()?;
    interference_outage_rate_with(p, csi, r_i, Innovation::Unit, n_trials, seed)
}

/// [`interference_outage_rate`] with the power margin `r_i` supplied directly.
pub fn interference_outage_rate_with_margin(
    p: &SystemParams,
    csi: &CsiParams,
    r_i: f64,
    n_trials: u64,
    seed: u64,
) -> Result<f64> {
    interference_outage_rate_with(p, csi, r_i, Innovation::Unit, n_trials, seed)
}

/// Fully parameterized interference-outage simulation.
pub fn interference_outage_rate_with(
    p: &SystemParams,
    csi: &CsiParams,
    r_i: f64,
    innovation: Innovation,
    n_trials: u64,
    seed: u64,
) -> Result<f64> {
    p.validate()?;
    csi.validate()?;
    if !(r_i > 0.0 && r_i.is_finite()) {
        return Err(Error::param("r_i", format!("{r_i} must be positive")));
    }
    if n_trials == 0 {
        return Err(Error::TooFewTrials { min: 1, got: 0 });
    }
    let rho = csi.rho;
    let innov = (1.0 - rho * rho).sqrt();
    let sd_hat = (0.5 / csi.eta_hat).sqrt();
    let sd_new = match innovation {
        Innovation::Unit => 0.5f64.sqrt(),
        Innovation::MatchEstimate => sd_hat,
    };
    let t = p.t_intf;
    let family = StreamFamily::new(seed);
    let violations: u64 = block_ranges(n_trials)
        .map(|(start, end)| {
            let mut count = 0u64;
            for i in start..end {
                let mut rng = family.stream(i);
                let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
                let (er, ei) = (sd_hat * normal(), sd_hat * normal());
                let (nr, ni) = (sd_new * normal(), sd_new * normal());
                let (hr, hi) = (rho * er + innov * nr, rho * ei + innov * ni);
                let est = er * er + ei * ei;
                let truth = hr * hr + hi * hi;
                let capped = match p.p_s {
                    StPower::Limited(ps) => r_i * t / est >= ps,
                    StPower::Unlimited => false,
                };
                // Compared as ratios so that a perfect estimate is never
                // flagged through rounding of (rT/a)·a.
                let violated = if capped {
                    p.p_s.limit().unwrap_or(f64::INFINITY) * truth > t
                } else {
                    r_i * truth > est
                };
                count += u64::from(violated);
            }
            count
        })
        .sum();
    Ok(violations as f64 / n_trials as f64)
}
