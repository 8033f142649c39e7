//! Modified Bessel function of the second kind for integer order.
//!
//! `K_0` and `K_1` come from Temme's series for `x < 2` and Steed's
//! continued fraction above; higher orders use the upward recurrence
//! `K_{n+1}(x) = K_{n-1}(x) + (2n/x) K_n(x)`, which is stable for `K`.

use super::gamma::EULER_GAMMA;
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;
const SERIES_LIMIT: f64 = 2.0;

/// `K_n(x)`.
pub fn bessel_k(n: u32, x: f64) -> Result<f64> {
    check(x)?;
    Ok(bessel_k_scaled_raw(n, x) * (-x).exp())
}

/// Exponentially scaled `e^x K_n(x)`; finite well past the underflow point of `K_n`.
pub fn bessel_k_scaled(n: u32, x: f64) -> Result<f64> {
    check(x)?;
    Ok(bessel_k_scaled_raw(n, x))
}

fn check(x: f64) -> Result<()> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::domain("bessel_k", format!("x = {x} must be finite and > 0")));
    }
    Ok(())
}

/// Returns `(e^x K_0(x), e^x K_1(x))`.
fn k0_k1_scaled(x: f64) -> (f64, f64) {
    if x < SERIES_LIMIT {
        let x2 = 0.5 * x;
        // Order-zero specialization: Γ-related coefficients reduce to
        // gam1 = -γ, gam2 = 1.
        let mut ff = -EULER_GAMMA - x2.ln();
        let mut sum = ff;
        let mut p = 0.5;
        let mut q = 0.5;
        let mut c = 1.0;
        let d = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi);
            c *= d / fi;
            p /= fi;
            q /= fi;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        let scale = x.exp();
        (sum * scale, sum1 * (2.0 / x) * scale)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
        let k1 = k0 * (x + 0.5 - h) / x;
        (k0, k1)
    }
}

pub(crate) fn bessel_k_scaled_raw(n: u32, x: f64) -> f64 {
    let (k0, k1) = k0_k1_scaled(x);
    match n {
        0 => k0,
        1 => k1,
        _ => {
            let (mut prev, mut cur) = (k0, k1);
            for j in 1..n {
                let next = prev + (2.0 * j as f64 / x) * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `ln K_n(x)`, finite for every `x > 0` where the scaled value is finite.
pub(crate) fn ln_bessel_k_raw(n: u32, x: f64) -> f64 {
    bessel_k_scaled_raw(n, x).ln() - x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad::{integrate, QuadratureSpec};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_values() {
        // 30-digit mpmath values.
        for &(n, x, want) in &[
            (0, 1.0, 0.421_024_438_240_708_333_34),
            (1, 2.0, 0.139_865_881_816_522_427_28),
            (0, 1e-6, 13.931_442_073_626_419_413),
            (1, 1e-6, 999_999.999_992_784_278_96),
            (2, 0.5, 7.550_183_551_240_869_436_6),
            (3, 3.0, 0.122_170_375_757_183_567_92),
            (5, 10.0, 5.754_184_998_531_227_927_6e-5),
            (0, 50.0, 3.410_167_749_789_495_513_9e-23),
            (1, 700.0, 4.673_110_796_707_966_109_1e-306),
            (4, 1.9999, 2.196_419_916_639_475_693_6),
            (4, 2.0001, 2.195_412_073_176_324_800_6),
            (2, 100.0, 4.750_225_303_888_640_204_7e-45),
        ] {
            let got = bessel_k(n, x).unwrap();
            assert!(rel(got, want) <= 1e-10, "n={n} x={x} got={got} want={want}");
        }
    }

    #[test]
    fn integral_representation() {
        // K_n(x) = ∫_0^∞ e^{-x cosh t} cosh(n t) dt
        let spec = QuadratureSpec::default();
        for &(n, x) in &[(0u32, 1.0), (1, 2.0), (2, 0.7), (3, 4.5)] {
            let integrand = |t: f64| if t > 40.0 { 0.0 } else { (-x * t.cosh()).exp() * (n as f64 * t).cosh() };
            let q = integrate(integrand, 0.0, f64::INFINITY, &spec)
                .unwrap();
            assert!(rel(bessel_k(n, x).unwrap(), q.value) < 1e-10, "n={n} x={x}");
        }
    }

    #[test]
    fn recurrence_residual() {
        let (n, x) = (1u32, 3.0);
        let km = bessel_k(n - 1, x).unwrap();
        let k = bessel_k(n, x).unwrap();
        let kp = bessel_k(n + 1, x).unwrap();
        let resid = kp - km - (2.0 * n as f64 / x) * k;
        assert!(resid.abs() <= 1e-12 * kp);
    }

    #[test]
    fn scaled_survives_underflow() {
        let s = bessel_k_scaled(2, 5000.0).unwrap();
        // e^x K_n(x) ~ sqrt(π/(2x)) (1 + (4n²-1)/(8x))
        let approx = (std::f64::consts::PI / 10000.0).sqrt() * (1.0 + 15.0 / 40000.0);
        assert!(rel(s, approx) < 1e-6);
        assert_eq!(bessel_k(2, 5000.0).unwrap(), 0.0);
    }

    #[test]
    fn positive_and_decreasing() {
        for n in 0..6 {
            let mut prev = f64::INFINITY;
            let mut x = 1e-3;
            while x < 600.0 {
                let k = bessel_k(n, x).unwrap();
                assert!(k > 0.0 && k < prev, "n={n} x={x}");
                prev = k;
                x *= 1.21;
            }
        }
    }

    #[test]
    fn domain() {
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k_scaled(1, -1.0).is_err());
    }
}
