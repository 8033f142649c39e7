use super::gamma::EULER_GAMMA;
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 1000;

/// Exponential integral `E1(x) = ∫_x^∞ e^{-y}/y dy` for `x > 0`.
///
/// Uses the convergent power series for `x <= 1` and a continued
/// fraction above.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("exp_integral_e1", format!("x = {x} must be > 0")));
    }
    Ok(exp_integral_e1_raw(x))
}

pub(crate) fn exp_integral_e1_raw(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    if x <= 1.0 {
        // E1(x) = -γ - ln x - Σ (-x)^n / (n n!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..MAX_ITER {
            let nf = n as f64;
            term *= -x / nf;
            let del = term / nf;
            sum += del;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        h * (-x).exp()
    }
}
