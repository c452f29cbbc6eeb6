//! Coboundary transfer for trigonometric polynomials: every zero-mean trig
//! polynomial h is g o R_alpha - g with g-hat(k) = h-hat(k)/(e^(2 pi i k a) - 1),
//! and its Birkhoff sums telescope below C = 2 sum |g-hat(k)|.

use crate::error::{Error, Result};
use crate::fixed::Frac;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const MAX_DEGREE: i64 = 10_000;
pub const SMALL_DENOM_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferResult {
    /// (frequency k, h-hat(k)) with k != 0.
    pub h_coeffs: Vec<(i64, Complex64)>,
    /// (frequency k, g-hat(k)).
    pub g_coeffs: Vec<(i64, Complex64)>,
    /// 2 * sum |g-hat(k)|: uniform bound on every |S_n h|.
    pub sup_bound: f64,
}

impl TransferResult {
    pub fn eval_h(&self, x: Frac) -> f64 {
        eval_trig(&self.h_coeffs, x)
    }

    pub fn eval_g(&self, x: Frac) -> f64 {
        eval_trig(&self.g_coeffs, x)
    }
}

fn eval_trig(coeffs: &[(i64, Complex64)], x: Frac) -> f64 {
    let t = 2.0 * std::f64::consts::PI * x.to_f64();
    coeffs
        .iter()
        .map(|&(k, c)| {
            let e = Complex64::from_polar(1.0, k as f64 * t);
            (c * e).re
        })
        .sum()
}

pub fn trig_coboundary_transfer(
    h_coeffs: &[(i64, Complex64)],
    alpha: Frac,
) -> Result<TransferResult> {
    for &(k, c) in h_coeffs {
        if k == 0 && c.norm() != 0.0 {
            return Err(Error::InvalidInput("h-hat(0) must vanish".into()));
        }
        if k.abs() > MAX_DEGREE {
            return Err(Error::InvalidInput(format!("degree {k} exceeds {MAX_DEGREE}")));
        }
    }
    let h_coeffs: Vec<(i64, Complex64)> =
        h_coeffs.iter().copied().filter(|&(k, _)| k != 0).collect();
    let mut g_coeffs = Vec::with_capacity(h_coeffs.len());
    let mut sum_abs = 0.0f64;
    for &(k, c) in &h_coeffs {
        // ||k alpha|| exactly at fixed point, then refuse Liouville blowups
        let ka = if k >= 0 {
            alpha.mul_int(k as u128)
        } else {
            Frac::ZERO.sub(alpha.mul_int((-k) as u128))
        };
        let norm = ka.dist_to_zero() as f64 / crate::fixed::FULL as f64;
        if norm < SMALL_DENOM_FLOOR {
            return Err(Error::SmallDenominator { k, norm });
        }
        let theta = 2.0 * std::f64::consts::PI * ka.to_f64();
        let denom = Complex64::from_polar(1.0, theta) - Complex64::new(1.0, 0.0);
        let g = c / denom;
        sum_abs += g.norm();
        g_coeffs.push((k, g));
    }
    let result = TransferResult {
        h_coeffs,
        g_coeffs,
        sup_bound: 2.0 * sum_abs,
    };
    // verify h = g o R_alpha - g on a grid
    for i in 0..1000u32 {
        let x = Frac::from_ratio(i as u128, 1000);
        let lhs = result.eval_h(x);
        let rhs = result.eval_g(x.add(alpha)) - result.eval_g(x);
        if (lhs - rhs).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "transfer identity failed by {:.2e} at grid point {i}",
                (lhs - rhs).abs()
            )));
        }
    }
    Ok(result)
}
