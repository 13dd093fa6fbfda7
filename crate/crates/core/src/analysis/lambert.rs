//! Principal branch of the Lambert W function on `[0, inf)`.

use crate::error::{Error, Result};

const MAX_ITER: usize = 64;

/// Three-term large-argument expansion `ln x - ln ln x + ln ln x / ln x`.
///
/// Only meaningful for `x > 1`; accuracy is a few percent at `x ~ 100` and
/// improves slowly with `x`.
pub fn lambert_w_asymptotic(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::domain(format!(
            "asymptotic Lambert W needs x > 1, got {x}"
        )));
    }
    let l1 = x.ln();
    let l2 = l1.ln();
    Ok(l1 - l2 + l2 / l1)
}

/// `W(x)` solving `w e^w = x` for `x >= 0`, by Halley iteration.
pub fn lambert_w(x: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::domain(format!(
            "Lambert W is evaluated on [0, inf), got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x > 3.0 {
        lambert_w_asymptotic(x)?
    } else {
        // Winitzki's uniform approximation
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}
