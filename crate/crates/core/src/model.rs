//! System model: channel statistics, the SIR distribution of a single user,
//! the inverse-gamma limit of the k-th largest SIR, the secondary
//! transmitter's power law and the outdated-CSI parameter mapping.
//!
//! All powers are linear. dB conversion happens at the CLI boundary.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{Error, Result};
use crate::specfun::{ln_factorial_minus_one, upper_inc_gamma_reg_raw};

/// Maximum transmit power of the secondary transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StPower {
    /// Finite peak power `P_S` in watts.
    Limited(f64),
    /// No peak power constraint; only the interference cap applies.
    Unlimited,
}

impl StPower {
    pub fn limit(&self) -> Option<f64> {
        match *self {
            StPower::Limited(p) => Some(p),
            StPower::Unlimited => None,
        }
    }
}

/// Physical and statistical parameters of the primary/secondary network.
///
/// `|g_i|² ~ Exp(lambda)` (primary transmitter to user `i`),
/// `|h_i|² ~ Gamma(m, beta)` (secondary transmitter to user `i`),
/// `|h_0|² ~ Exp(eta)` (secondary transmitter to primary receiver).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub lambda: f64,
    pub beta: f64,
    pub m: f64,
    pub eta: f64,
    /// Primary transmitter power `P_M`.
    pub p_m: f64,
    /// Interference cap `T` at the primary receiver.
    pub t_intf: f64,
    pub p_s: StPower,
    pub n_users: u32,
    pub k_rank: u32,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be finite and > 0")))
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        positive("lambda", self.lambda)?;
        positive("beta", self.beta)?;
        positive("m", self.m)?;
        positive("eta", self.eta)?;
        positive("p_m", self.p_m)?;
        positive("t_intf", self.t_intf)?;
        if let StPower::Limited(p) = self.p_s {
            positive("p_s", p)?;
        }
        if self.n_users < 1 {
            return Err(Error::param("n_users", "must be >= 1"));
        }
        if self.k_rank < 1 {
            return Err(Error::param("k_rank", "must be >= 1"));
        }
        Ok(())
    }

    /// Validation for simulation use, which also needs `k <= N`.
    pub fn validate_for_simulation(&self) -> Result<()> {
        self.validate()?;
        if self.k_rank > self.n_users {
            return Err(Error::RankExceedsUsers {
                k: self.k_rank,
                n: self.n_users,
            });
        }
        Ok(())
    }

    /// `λβ / P_M`, the scale of the per-user SIR ratio `Z_i`.
    fn z_scale(&self) -> f64 {
        self.lambda * self.beta / self.p_m
    }

    /// CDF of `Z_i = |h_i|² / (P_M |g_i|²)`: `(P_M z / (λβ + P_M z))^m`.
    pub fn sir_cdf(&self, z: f64) -> f64 {
        if !(z > 0.0) {
            return 0.0;
        }
        if z.is_infinite() {
            return 1.0;
        }
        (-self.m * (self.z_scale() / z).ln_1p()).exp()
    }

    /// Density of `Z_i`.
    pub fn sir_pdf(&self, z: f64) -> f64 {
        if z < 0.0 || z.is_infinite() {
            return 0.0;
        }
        let s = self.z_scale();
        if z == 0.0 {
            return match self.m.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 1.0 / s,
                _ => 0.0,
            };
        }
        // m s^{-1} (z/s)^{m-1} (1 + z/s)^{-(m+1)}
        let r = z / s;
        (self.m.ln() - s.ln() + (self.m - 1.0) * r.ln() - (self.m + 1.0) * r.ln_1p()).exp()
    }

    /// Normalizing scale `b = F^{-1}(1 - 1/N)` of the k-th largest `Z`.
    pub fn scale_b(&self) -> Result<f64> {
        if self.n_users < 2 {
            return Err(Error::DegenerateN(self.n_users));
        }
        // (1 - 1/N)^{-1/m} - 1, without cancellation
        let denom = (-(-1.0 / self.n_users as f64).ln_1p() / self.m).exp_m1();
        Ok(self.z_scale() / denom)
    }

    /// CDF of the secondary transmit power `P = min(P_S, T/|h_0|²)`.
    ///
    /// Continuous part `e^{-ηT/t}` below `P_S`, with an atom of mass
    /// [`Self::st_power_atom`] at `P_S`.
    pub fn st_power_cdf(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        match self.p_s {
            StPower::Limited(ps) if t >= ps => 1.0,
            _ => (-self.eta * self.t_intf / t).exp(),
        }
    }

    /// Probability that the power cap binds, `1 - e^{-ηT/P_S}`; zero when unlimited.
    pub fn st_power_atom(&self) -> f64 {
        match self.p_s {
            StPower::Limited(ps) => -(-self.eta * self.t_intf / ps).exp_m1(),
            StPower::Unlimited => 0.0,
        }
    }

    /// Draws `|h_0|² ~ Exp(η)` and returns `min(P_S, T/|h_0|²)`.
    pub fn sample_st_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let h0: f64 = Exp1.sample(rng);
        cap_power(self.p_s, self.t_intf * self.eta / h0)
    }

    pub fn limiting(&self) -> LimitingDistribution {
        LimitingDistribution { k_rank: self.k_rank }
    }
}

/// `min(P_S, p)`; unlimited leaves `p` unchanged.
pub(crate) fn cap_power(p_s: StPower, p: f64) -> f64 {
    match p_s {
        StPower::Limited(ps) => p.min(ps),
        StPower::Unlimited => p,
    }
}

/// Outdated-CSI description.
///
/// `rho` correlates the estimate of `h_0` with the true channel, `delta`
/// does the same for the secondary links. `eta_hat` and `beta_hat` are the
/// parameters of the estimated channel powers and are treated as the
/// primitive inputs; the true `eta` follows from [`CsiParams::true_eta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiParams {
    pub rho: f64,
    pub delta: f64,
    /// Target interference outage probability `Γ0`.
    pub gamma0: f64,
    pub eta_hat: f64,
    pub beta_hat: f64,
}

impl CsiParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::param("rho", format!("{} must lie in [0, 1]", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::param("delta", format!("{} must lie in [0, 1]", self.delta)));
        }
        if !(self.gamma0 > 0.0 && self.gamma0 < 1.0) {
            return Err(Error::param("gamma0", format!("{} must lie in (0, 1)", self.gamma0)));
        }
        positive("eta_hat", self.eta_hat)?;
        positive("beta_hat", self.beta_hat)
    }

    /// Power margin `r_I` for this correlation and outage target.
    pub fn power_margin(&self) -> Result<f64> {
        power_margin(self.rho, self.gamma0)
    }

    /// Rate of the true `|h_0|²`: `η^{-1} = ρ² η̂^{-1} + (1 - ρ²)`.
    pub fn true_eta(&self) -> f64 {
        let r2 = self.rho * self.rho;
        1.0 / (r2 / self.eta_hat + (1.0 - r2))
    }
}

/// Power margin factor `r_I(ρ, Γ0)` that deflates the interference cap when
/// only an outdated estimate of `h_0` is available. Equals 1 at `ρ = 1`.
pub fn power_margin(rho: f64, gamma0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::domain("power_margin", format!("rho = {rho} must lie in [0, 1]")));
    }
    if !(gamma0 > 0.0 && gamma0 < 1.0) {
        return Err(Error::domain("power_margin", format!("gamma0 = {gamma0} must lie in (0, 1)")));
    }
    let r2 = rho * rho;
    let one_m_r2 = 1.0 - r2;
    let c = 1.0 - 2.0 * gamma0;
    let root = (one_m_r2 * (1.0 - c * c * r2)).sqrt();
    Ok((2.0 * r2 - 1.0) + (one_m_r2 - c * root) / (2.0 * gamma0 * (1.0 - gamma0)))
}

/// System parameters seen through outdated CSI: `η → η̂`, `T → r_I T`,
/// `β → β̂`, so that the scale of the result is `b̂`.
pub fn effective_params(p: &SystemParams, csi: &CsiParams) -> Result<SystemParams> {
    p.validate()?;
    csi.validate()?;
    let r_i = csi.power_margin()?;
    Ok(SystemParams {
        eta: csi.eta_hat,
        t_intf: r_i * p.t_intf,
        beta: csi.beta_hat,
        ..*p
    })
}

/// Inverse-gamma limit of `Z_(N-k+1) / b` for fixed `k` as `N → ∞`:
/// `G^(k)(z) = Q(k, 1/z)`, `f^(k)(z) = e^{-1/z} / (z^{k+1} (k-1)!)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitingDistribution {
    pub k_rank: u32,
}

impl LimitingDistribution {
    pub fn new(k_rank: u32) -> Result<Self> {
        if k_rank < 1 {
            return Err(Error::param("k_rank", "must be >= 1"));
        }
        Ok(Self { k_rank })
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if !(z > 0.0) {
            return 0.0;
        }
        upper_inc_gamma_reg_raw(self.k_rank as f64, 1.0 / z)
    }

    pub fn pdf(&self, z: f64) -> f64 {
        if !(z > 0.0) || z.is_infinite() {
            return 0.0;
        }
        let k = self.k_rank as f64;
        (-1.0 / z - (k + 1.0) * z.ln() - ln_factorial_minus_one(self.k_rank)).exp()
    }

    /// Inverse CDF for `u ∈ (0, 1)`, accurate to about 1e-12 relative.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain("limiting_quantile", format!("u = {u} must lie in (0, 1)")));
        }
        // Solve Q(k, x) = u for x = 1/z; Q is decreasing in x.
        let k = self.k_rank as f64;
        let q = |x: f64| upper_inc_gamma_reg_raw(k, x);
        let mut lo = 0.0;
        let mut hi = k.max(1.0);
        while q(hi) > u {
            lo = hi;
            hi *= 2.0;
        }
        let ln_norm = ln_factorial_minus_one(self.k_rank);
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = q(x) - u;
            if f > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            // dQ/dx = -x^{k-1} e^{-x} / (k-1)!
            let deriv = -((k - 1.0) * x.ln() - x - ln_norm).exp();
            let step = if deriv != 0.0 { f / deriv } else { f64::INFINITY };
            if step.abs() <= 1e-15 * x || (hi - lo) <= 1e-15 * x {
                break;
            }
            let newton = x - step;
            x = if newton >= lo && newton <= hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(1.0 / x)
    }

    /// Draws `1/G` with `G ~ Gamma(k, 1)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g = Gamma::new(self.k_rank as f64, 1.0).expect("k >= 1");
        1.0 / g.sample(rng)
    }
}

/// Performance metric requested from the asymptotic or simulation engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    /// `E[log2(1 + SIR)]`.
    AvgThroughput,
    /// `-(1/A) log2 E[(1 + SIR)^{-A}]` with normalized delay exponent `A`.
    EffThroughput { a_exp: f64 },
    /// `c E[e^{-v SIR}]`.
    AvgBer { c: f64, v: f64 },
    /// `Pr(SIR <= x0)`.
    Outage { x0: f64 },
}

impl Metric {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Metric::AvgThroughput => Ok(()),
            Metric::EffThroughput { a_exp } => positive("a_exp", a_exp),
            Metric::AvgBer { c, v } => {
                positive("c", c)?;
                positive("v", v)
            }
            Metric::Outage { x0 } => positive("x0", x0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::AvgThroughput => "avg_throughput",
            Metric::EffThroughput { .. } => "eff_throughput",
            Metric::AvgBer { .. } => "avg_ber",
            Metric::Outage { .. } => "outage",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadratureSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig2(n: u32) -> SystemParams {
        SystemParams {
            lambda: 2.0,
            beta: 3.0,
            m: 2.0,
            eta: 20.0,
            p_m: 1.0,
            t_intf: 0.1,
            p_s: StPower::Limited(10.0),
            n_users: n,
            k_rank: 1,
        }
    }

    fn unit(n: u32) -> SystemParams {
        SystemParams {
            lambda: 1.0,
            beta: 1.0,
            m: 1.0,
            p_m: 1.0,
            ..fig2(n)
        }
    }

    #[test]
    fn sir_cdf_examples() {
        assert_eq!(fig2(10).sir_cdf(0.0), 0.0);
        assert!((unit(10).sir_cdf(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sir_pdf_normalizes() {
        let p = fig2(10);
        let r = integrate(|z| p.sir_pdf(z), 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sir_pdf_is_cdf_derivative() {
        for p in [fig2(10), SystemParams { m: 0.5, ..fig2(10) }, SystemParams { m: 4.5, ..fig2(10) }] {
            for &z in &[0.1, 1.0, 10.0] {
                let h = 1e-5 * z;
                let fd = (p.sir_cdf(z + h) - p.sir_cdf(z - h)) / (2.0 * h);
                assert!(((fd - p.sir_pdf(z)) / p.sir_pdf(z)).abs() < 1e-6, "m={} z={z}", p.m);
            }
        }
    }

    #[test]
    fn scale_b_examples() {
        assert!((unit(2).scale_b().unwrap() - 1.0).abs() < 1e-14);
        // 30-digit direct evaluation: 470.981011897577988...
        let b = fig2(40).scale_b().unwrap();
        assert!(((b - 470.981_011_897_577_988) / b).abs() < 1e-13);
        for n in [5, 50, 500] {
            let p = fig2(n);
            let f = p.sir_cdf(p.scale_b().unwrap());
            assert!(((f - (1.0 - 1.0 / n as f64)) / f).abs() < 1e-12);
        }
        assert_eq!(fig2(1).scale_b(), Err(Error::DegenerateN(1)));
    }

    #[test]
    fn scale_b_monotone() {
        let base = fig2(40);
        let b0 = base.scale_b().unwrap();
        assert!(fig2(41).scale_b().unwrap() > b0);
        assert!(SystemParams { beta: 3.1, ..base }.scale_b().unwrap() > b0);
        assert!(SystemParams { lambda: 2.1, ..base }.scale_b().unwrap() > b0);
        assert!(SystemParams { p_m: 1.1, ..base }.scale_b().unwrap() < b0);
    }

    #[test]
    fn limiting_examples() {
        let e = (-1.0f64).exp();
        let g1 = LimitingDistribution::new(1).unwrap();
        let g2 = LimitingDistribution::new(2).unwrap();
        assert!((g1.cdf(1.0) - e).abs() < 1e-15);
        assert!((g2.cdf(1.0) - 2.0 * e).abs() < 1e-15);
        assert!((g1.quantile(e).unwrap() - 1.0).abs() < 1e-12);
        assert!(g1.quantile(0.0).is_err());
        assert!(g1.quantile(1.0).is_err());
        assert_eq!(g1.cdf(-1.0), 0.0);
        assert!(LimitingDistribution::new(0).is_err());
    }

    #[test]
    fn limiting_quantile_round_trip() {
        for k in 1..=6 {
            let g = LimitingDistribution::new(k).unwrap();
            for &u in &[1e-6, 0.01, 0.3, 0.5, 0.9, 0.999_999] {
                let z = g.quantile(u).unwrap();
                assert!((g.cdf(z) - u).abs() <= 1e-10, "k={k} u={u} z={z} cdf={}", g.cdf(z));
            }
        }
    }

    #[test]
    fn limiting_pdf_normalizes_and_orders() {
        for k in 1..=5 {
            let g = LimitingDistribution::new(k).unwrap();
            let r = integrate(|z| g.pdf(z), 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9, "k={k}");
            let next = LimitingDistribution::new(k + 1).unwrap();
            let mut z = 0.01;
            while z < 100.0 {
                assert!(next.cdf(z) >= g.cdf(z));
                z *= 1.3;
            }
        }
    }

    #[test]
    fn limiting_sampler_reproducible_and_mean() {
        let g = LimitingDistribution::new(1).unwrap();
        let a: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..5).map(|_| g.sample(&mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..5).map(|_| g.sample(&mut rng)).collect()
        };
        assert_eq!(a, b);

        let g3 = LimitingDistribution::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let inv: Vec<f64> = (0..n).map(|_| 1.0 / g3.sample(&mut rng)).collect();
        let mean = inv.iter().sum::<f64>() / n as f64;
        let var = inv.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 3.0).abs() < 3.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn st_power_examples() {
        let mut p = fig2(10);
        p.p_s = StPower::Unlimited;
        let t = p.eta * p.t_intf;
        assert!((p.st_power_cdf(t) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(p.st_power_atom(), 0.0);

        let q = fig2(10);
        assert!((q.st_power_atom() - (1.0 - (-0.2f64).exp())).abs() < 1e-15);
        assert!((q.st_power_atom() - 0.1813).abs() < 1e-4);
        assert_eq!(q.st_power_cdf(10.0), 1.0);
        let below = q.st_power_cdf(10.0 * (1.0 - 1e-12));
        assert!((1.0 - below - q.st_power_atom()).abs() < 1e-10);

        // ηT/P_S = 20: the cap binds almost surely.
        let r = SystemParams { t_intf: 10.0, p_s: StPower::Limited(10.0), ..fig2(10) };
        assert!(r.st_power_atom() > 1.0 - 3e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..10_000).all(|_| r.sample_st_power(&mut rng) == 10.0));
    }

    #[test]
    fn st_power_sampler_mean() {
        let p = fig2(10);
        let (ps, et) = (10.0, p.eta * p.t_intf);
        // E[P] = ∫_0^{P_S} t f_X(t) dt + P_S (1 - e^{-ηT/P_S})
        let cont = integrate(|t| if t > 0.0 { et / t * (-et / t).exp() } else { 0.0 }, 0.0, ps, &QuadratureSpec::default())
            .unwrap()
            .value;
        let want = cont + ps * p.st_power_atom();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| p.sample_st_power(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - want).abs() < 3.0 * (var / n as f64).sqrt(), "mean={mean} want={want}");
    }

    #[test]
    fn power_margin_examples() {
        assert_eq!(power_margin(1.0, 0.1).unwrap(), 1.0);
        for g in [0.01, 0.1, 0.3] {
            assert_eq!(power_margin(1.0, g).unwrap(), 1.0);
        }
        assert!((power_margin(0.0, 0.1).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        // 30-digit direct evaluation at the f64 inputs.
        let r = power_margin(0.9, 0.1).unwrap();
        assert!((r - 0.331_127_640_138_337_55).abs() < 1e-14);
        assert!(power_margin(1.1, 0.1).is_err());
        assert!(power_margin(0.5, 0.0).is_err());
        assert!(power_margin(0.5, 1.0).is_err());
    }

    #[test]
    fn effective_params_mapping() {
        let p = SystemParams { p_s: StPower::Unlimited, ..fig2(40) };
        let perfect = CsiParams { rho: 1.0, delta: 1.0, gamma0: 0.1, eta_hat: p.eta, beta_hat: p.beta };
        assert_eq!(effective_params(&p, &perfect).unwrap(), p);

        let csi = CsiParams { rho: 0.9, delta: 1.0, gamma0: 0.1, eta_hat: 20.0, beta_hat: 3.0 };
        assert!((csi.true_eta() - 4.338_394_793_926_247).abs() < 1e-12);
        let e = effective_params(&p, &csi).unwrap();
        assert_eq!(e.eta, 20.0);
        assert_eq!(e.beta, 3.0);
        assert!((e.t_intf - 0.1 * power_margin(0.9, 0.1).unwrap()).abs() < 1e-16);
        assert!(e.scale_b().unwrap() > 0.0);
    }

    #[test]
    fn validation() {
        assert!(fig2(10).validate().is_ok());
        assert!(SystemParams { lambda: 0.0, ..fig2(10) }.validate().is_err());
        assert!(SystemParams { p_s: StPower::Limited(-1.0), ..fig2(10) }.validate().is_err());
        assert!(SystemParams { k_rank: 0, ..fig2(10) }.validate().is_err());
        let bad = SystemParams { k_rank: 11, ..fig2(10) };
        assert!(bad.validate().is_ok());
        assert_eq!(bad.validate_for_simulation(), Err(Error::RankExceedsUsers { k: 11, n: 10 }));
        assert!(Metric::Outage { x0: 0.0 }.validate().is_err());
        assert!(Metric::EffThroughput { a_exp: -1.0 }.validate().is_err());
    }
}
