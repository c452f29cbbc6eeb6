//! Closed-form evaluator for the bounded-Hilbert-transform counterexample:
//! the function with Fourier coefficients i a^n (n > 0), -i a^(-n) (n < 0)
//! sums to -2a sin(2 pi x) / (1 - 2a cos(2 pi x) + a^2).

use crate::error::{Error, Result};
use crate::fixed::Frac;

pub fn hilbert_example_eval(a: f64, x: Frac) -> f64 {
    let t = 2.0 * std::f64::consts::PI * x.to_f64();
    let (s, c) = t.sin_cos();
    -2.0 * a * s / (1.0 - 2.0 * a * c + a * a)
}

pub fn check_param(a: f64) -> Result<()> {
    if !(0.0 < a && a < 1.0) {
        return Err(Error::InvalidInput(format!("need a in (0,1), got {a}")));
    }
    Ok(())
}
