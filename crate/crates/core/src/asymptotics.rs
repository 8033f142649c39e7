//! Large-N approximations of the k-th best user's performance.
//!
//! Each metric conditions on the transmit power `P`, replaces the k-th
//! largest normalized SIR by its inverse-gamma limit `b·Z`, and then
//! averages over the law of `P`: a continuous part on `(0, P_S)` plus an
//! atom at `P_S`. Where the average has no closed form, the continuous part
//! is integrated in `u = ηT/t`, which maps `(0, P_S)` onto `(ηT/P_S, ∞)` and
//! turns the power density into `e^{-u} du`.
//!
//! Gamma-function ratios are composed in log space, so large ranks or
//! delay exponents do not overflow.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{effective_params, CsiParams, Metric, StPower, SystemParams};
use crate::specfun::{
    digamma_raw, exp_integral_e1_raw, integrate, ln_bessel_k_raw, ln_factorial_minus_one, ln_gamma_raw,
    ln_upper_inc_gamma_reg_raw, upper_inc_gamma_reg_raw, QuadratureSpec, EULER_GAMMA,
};

/// Value of an asymptotic metric and the absolute error of any quadrature
/// that went into it (0 for pure closed forms).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticResult {
    pub value: f64,
    pub quadrature_err: f64,
}

impl AsymptoticResult {
    fn exact(value: f64) -> Self {
        Self {
            value,
            quadrature_err: 0.0,
        }
    }
}

/// Quadrature settings for the un-closed power averages. Values can be tiny
/// (BER far below 1e-10), so only a relative target is used.
fn power_average_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-11,
        abs_tol: 0.0,
        max_subdivisions: 4000,
    }
}

fn check(p: &SystemParams) -> Result<f64> {
    p.validate()?;
    p.scale_b()
}

/// `ln E[e^{-s Z}]` for the limiting law of rank `k`:
/// `ln(2 s^{k/2} K_k(2√s) / (k-1)!)`.
pub(crate) fn ln_limiting_mgf(k: u32, s: f64) -> f64 {
    if s <= 1e-30 {
        return 0.0;
    }
    let x = 2.0 * s.sqrt();
    (LN_2 + 0.5 * k as f64 * s.ln() + ln_bessel_k_raw(k, x) - ln_factorial_minus_one(k)).min(0.0)
}

/// Moment generating function `E[e^{tZ}]` of the limiting law, `t < 0`.
pub fn limiting_mgf(k: u32, t: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::param("k_rank", "must be >= 1"));
    }
    if !(t < 0.0) {
        return Err(Error::domain("limiting_mgf", format!("t = {t} must be < 0")));
    }
    Ok(ln_limiting_mgf(k, -t).exp())
}

/// Average throughput in bit/s/Hz.
///
/// Limited: `(ln(b P_S) - E1(ηT/P_S) - ψ(k)) / ln 2`.
/// Unlimited: `(ln(b T η) - ψ(k) + γ) / ln 2`.
pub fn avg_throughput(p: &SystemParams) -> Result<AsymptoticResult> {
    let b = check(p)?;
    let psi_k = digamma_raw(p.k_rank as f64);
    let et = p.eta * p.t_intf;
    let nats = match p.p_s {
        StPower::Limited(ps) => (b * ps).ln() - exp_integral_e1_raw(et / ps) - psi_k,
        StPower::Unlimited => (b * et).ln() - psi_k + EULER_GAMMA,
    };
    Ok(AsymptoticResult::exact(nats / LN_2))
}

/// Effective throughput in bit/s/Hz for normalized delay exponent `A > 0`.
pub fn eff_throughput(p: &SystemParams, a_exp: f64) -> Result<AsymptoticResult> {
    Metric::EffThroughput { a_exp }.validate()?;
    let b = check(p)?;
    let k = p.k_rank as f64;
    let a = a_exp;
    let et = p.eta * p.t_intf;
    // ln(Γ(k + A) / (k - 1)!)
    let ln_rank = ln_gamma_raw(k + a) - ln_factorial_minus_one(p.k_rank);
    let value = match p.p_s {
        StPower::Limited(ps) => {
            let x = et / ps;
            // Γ(A+1, x) / (bηT)^A  +  (1 - e^{-x}) / (b P_S)^A
            let t1 = ln_gamma_raw(a + 1.0) + ln_upper_inc_gamma_reg_raw(a + 1.0, x) - a * (b * et).ln();
            let t2 = (-(-x).exp_m1()).ln() - a * (b * ps).ln();
            let ln_mean = ln_rank + log_add_exp(t1, t2);
            -ln_mean / (a * LN_2)
        }
        StPower::Unlimited => {
            (b * et).ln() / LN_2 - (ln_rank + ln_gamma_raw(a + 1.0)) / (a * LN_2)
        }
    };
    Ok(AsymptoticResult::exact(value))
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// Average BER `c E[e^{-v SIR}]` for modulations with conditional BER `c e^{-v γ}`.
///
/// The unlimited-power case is the integral form of the Meijer-G
/// expression; it is evaluated by quadrature, never symbolically.
pub fn avg_ber(p: &SystemParams, c: f64, v: f64) -> Result<AsymptoticResult> {
    Metric::AvgBer { c, v }.validate()?;
    let b = check(p)?;
    let k = p.k_rank;
    let et = p.eta * p.t_intf;
    let vb = v * b;
    let spec = power_average_spec();
    let integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        (ln_limiting_mgf(k, vb * et / u) - u).exp()
    };
    let (lower, atom) = match p.p_s {
        StPower::Limited(ps) => (et / ps, ln_limiting_mgf(k, vb * ps).exp() * p.st_power_atom()),
        StPower::Unlimited => (0.0, 0.0),
    };
    let cont = integrate(integrand, lower, f64::INFINITY, &spec)
        .map_err(|e| scale_accuracy(e, c, atom))?;
    let value = (c * (cont.value + atom)).clamp(0.0, c);
    Ok(AsymptoticResult {
        value,
        quadrature_err: c * cont.abs_err,
    })
}

/// Outage probability `Pr(SIR <= x0)`.
///
/// Unlimited power has the closed form `2 y^{k/2} K_k(2√y) / (k-1)!` with
/// `y = ηTb/x0`; limited power integrates `Q(k, b t / x0)` against the power law.
pub fn outage(p: &SystemParams, x0: f64) -> Result<AsymptoticResult> {
    Metric::Outage { x0 }.validate()?;
    let b = check(p)?;
    let k = p.k_rank;
    let et = p.eta * p.t_intf;
    match p.p_s {
        StPower::Unlimited => {
            let y = et * b / x0;
            Ok(AsymptoticResult::exact(ln_limiting_mgf(k, y).exp().clamp(0.0, 1.0)))
        }
        StPower::Limited(ps) => {
            let kf = k as f64;
            let integrand = |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                upper_inc_gamma_reg_raw(kf, b * et / (x0 * u)) * (-u).exp()
            };
            let atom = upper_inc_gamma_reg_raw(kf, b * ps / x0) * p.st_power_atom();
            let cont = integrate(integrand, et / ps, f64::INFINITY, &power_average_spec())
                .map_err(|e| scale_accuracy(e, 1.0, atom))?;
            Ok(AsymptoticResult {
                value: (cont.value + atom).clamp(0.0, 1.0),
                quadrature_err: cont.abs_err,
            })
        }
    }
}

/// Rewrites a quadrature accuracy failure so its estimate refers to the full metric.
fn scale_accuracy(e: Error, scale: f64, atom: f64) -> Error {
    match e {
        Error::Accuracy { estimate, error_bound } => Error::Accuracy {
            estimate: scale * (estimate + atom),
            error_bound: scale * error_bound,
        },
        other => other,
    }
}

/// Evaluates `metric`, first mapping `p` through the outdated-CSI
/// substitution when `csi` is given.
pub fn evaluate(metric: &Metric, p: &SystemParams, csi: Option<&CsiParams>) -> Result<AsymptoticResult> {
    let eff;
    let p = match csi {
        Some(c) => {
            eff = effective_params(p, c)?;
            &eff
        }
        None => p,
    };
    match *metric {
        Metric::AvgThroughput => avg_throughput(p),
        Metric::EffThroughput { a_exp } => eff_throughput(p, a_exp),
        Metric::AvgBer { c, v } => avg_ber(p, c, v),
        Metric::Outage { x0 } => outage(p, x0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_k;

    fn fig2(n: u32, k: u32, p_s: StPower) -> SystemParams {
        SystemParams {
            lambda: 2.0,
            beta: 3.0,
            m: 2.0,
            eta: 20.0,
            p_m: 1.0,
            t_intf: 0.1,
            p_s,
            n_users: n,
            k_rank: k,
        }
    }

    /// Unlimited-power params with `b T η` equal to `target`.
    fn with_bte(target: f64, k: u32) -> SystemParams {
        let mut p = fig2(40, k, StPower::Unlimited);
        let b = p.scale_b().unwrap();
        p.t_intf = target / (b * p.eta);
        p
    }

    #[test]
    fn unlimited_throughput_unit_argument() {
        let v = avg_throughput(&with_bte(1.0, 1)).unwrap().value;
        assert!((v - 2.0 * EULER_GAMMA / LN_2).abs() < 1e-12);
        assert!((v - 1.665_492_354_553_734).abs() < 1e-12);
    }

    #[test]
    fn limited_approaches_unlimited() {
        let lim = avg_throughput(&fig2(40, 1, StPower::Limited(1e9))).unwrap().value;
        let unl = avg_throughput(&fig2(40, 1, StPower::Unlimited)).unwrap().value;
        assert!((lim - unl).abs() < 1e-6);
    }

    #[test]
    fn eff_unlimited_example() {
        let v = eff_throughput(&with_bte(2.0, 1), 1.0).unwrap().value;
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eff_small_exponent_matches_average() {
        for p_s in [StPower::Limited(10f64.powf(0.5)), StPower::Unlimited] {
            let p = fig2(60, 1, p_s);
            let e = eff_throughput(&p, 1e-6).unwrap().value;
            let a = avg_throughput(&p).unwrap().value;
            assert!((e - a).abs() < 1e-4, "{p_s:?}: {e} vs {a}");
        }
    }

    #[test]
    fn eff_below_average_and_decreasing_in_a() {
        for p_s in [StPower::Limited(0.1), StPower::Limited(3.0), StPower::Unlimited] {
            let p = fig2(30, 2, p_s);
            let avg = avg_throughput(&p).unwrap().value;
            let mut prev = f64::INFINITY;
            let mut a = 0.1;
            while a <= 4.0 {
                let e = eff_throughput(&p, a).unwrap().value;
                assert!(e <= avg + 1e-12);
                assert!(e <= prev + 1e-12);
                prev = e;
                a += 0.1;
            }
        }
    }

    #[test]
    fn eff_large_arguments_stay_finite() {
        let p = fig2(200, 40, StPower::Limited(1e-3));
        let e = eff_throughput(&p, 150.0).unwrap().value;
        assert!(e.is_finite());
    }

    #[test]
    fn ber_linear_in_c() {
        for p_s in [StPower::Limited(0.316), StPower::Unlimited] {
            let p = fig2(100, 1, p_s);
            let one = avg_ber(&p, 0.5, 0.5).unwrap().value;
            let two = avg_ber(&p, 1.0, 0.5).unwrap().value;
            assert!(((two - 2.0 * one) / two).abs() < 1e-12);
        }
    }

    #[test]
    fn ber_unit_argument_regression() {
        // ηTvb = 1 with v = 1: E[e^{-P b Z}] = ∫ 2√(1/u) K_1(2/√u) e^{-u} du
        let p = with_bte(1.0, 1);
        let r = avg_ber(&p, 1.0, 1.0).unwrap();
        assert!((r.value - 0.223_612_753_113_263_82).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn outage_limits_and_unit_point() {
        let p = with_bte(1.0, 1);
        // ηTb/x0 = 1 at x0 = 1
        let v = outage(&p, 1.0).unwrap().value;
        assert!((v - 2.0 * bessel_k(1, 2.0).unwrap()).abs() < 1e-13);
        assert!((v - 0.279_731_8).abs() < 1e-7);
        assert!(outage(&p, 1e-8).unwrap().value < 1e-6);
        assert!(outage(&p, 1e8).unwrap().value > 1.0 - 1e-6);
    }

    #[test]
    fn limited_bounds_unlimited() {
        for &ps in &[0.01, 0.1, 1.0, 10.0] {
            for k in 1..=3 {
                let lim = fig2(50, k, StPower::Limited(ps));
                let unl = fig2(50, k, StPower::Unlimited);
                assert!(avg_throughput(&lim).unwrap().value <= avg_throughput(&unl).unwrap().value);
                assert!(eff_throughput(&lim, 0.5).unwrap().value <= eff_throughput(&unl, 0.5).unwrap().value);
                let (bl, bu) = (avg_ber(&lim, 0.5, 0.5).unwrap(), avg_ber(&unl, 0.5, 0.5).unwrap());
                assert!(bl.value >= bu.value * (1.0 - 1e-12), "{ps} {k} {bl:?} {bu:?}");
                let x0 = 10f64.powf(1.3);
                let (ol, ou) = (outage(&lim, x0).unwrap().value, outage(&unl, x0).unwrap().value);
                assert!(ol >= ou * (1.0 - 1e-12), "{ps} {k} {ol} {ou}");
            }
        }
    }

    #[test]
    fn throughputs_decrease_in_rank_increase_in_n() {
        for p_s in [StPower::Limited(10.0), StPower::Unlimited] {
            for k in 1..5 {
                let a = fig2(100, k, p_s);
                let b = fig2(100, k + 1, p_s);
                assert!(avg_throughput(&a).unwrap().value > avg_throughput(&b).unwrap().value);
                assert!(eff_throughput(&a, 0.5).unwrap().value > eff_throughput(&b, 0.5).unwrap().value);
            }
            let small = avg_throughput(&fig2(40, 1, p_s)).unwrap().value;
            let large = avg_throughput(&fig2(41, 1, p_s)).unwrap().value;
            assert!(large > small);
        }
    }

    #[test]
    fn throughput_saturates_in_t() {
        // Limited power: once e^{-ηT/P_S} < 1e-3 the curve sits on its plateau.
        let ps = 0.01;
        let p = fig2(20, 1, StPower::Limited(ps));
        let b = p.scale_b().unwrap();
        let plateau = ((b * ps).ln() - digamma_raw(1.0)) / LN_2;
        let t_sat = ps * 1000f64.ln() / p.eta;
        for f in [1.0, 2.0, 10.0, 100.0] {
            let q = SystemParams { t_intf: t_sat * f, ..p };
            let v = avg_throughput(&q).unwrap().value;
            assert!(v <= plateau && plateau - v < 1e-3);
        }
    }

    #[test]
    fn evaluate_dispatch_and_csi() {
        let p = fig2(40, 1, StPower::Unlimited);
        let perfect = CsiParams { rho: 1.0, delta: 1.0, gamma0: 0.1, eta_hat: 20.0, beta_hat: 3.0 };
        let m = Metric::EffThroughput { a_exp: 0.5 };
        assert_eq!(evaluate(&m, &p, Some(&perfect)).unwrap(), evaluate(&m, &p, None).unwrap());

        let imperfect = CsiParams { rho: 0.9, ..perfect };
        let lossy = evaluate(&m, &p, Some(&imperfect)).unwrap().value;
        assert!(lossy.is_finite() && lossy < evaluate(&m, &p, None).unwrap().value);

        let o = Metric::Outage { x0: 20.0 };
        let direct = outage(&effective_params(&p, &imperfect).unwrap(), 20.0).unwrap();
        assert_eq!(evaluate(&o, &p, Some(&imperfect)).unwrap(), direct);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(avg_throughput(&fig2(1, 1, StPower::Unlimited)), Err(Error::DegenerateN(1)));
        assert!(eff_throughput(&fig2(10, 1, StPower::Unlimited), 0.0).is_err());
        assert!(outage(&fig2(10, 1, StPower::Unlimited), -1.0).is_err());
        assert!(limiting_mgf(1, 0.5).is_err());
    }
}
