//! Seeded Monte Carlo verification of the probabilistic ingredients: the
//! Menshov-Rademacher maximal inequality, the fixed-horizon law-of-iterated-
//! logarithm event, orthonormality of rotated copies, the dyadic-block decay
//! behind the square-root growth ceiling, and the composed key-lemma demo.
//!
//! Per-sample RNG streams are derived from (seed, sample index), so results
//! are bit-reproducible and independent of worker scheduling.

use crate::error::{Error, Result};
use crate::fixed::Frac;
use crate::zoo::rademacher::{RademacherStepSpec, StepFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A seeded Monte Carlo estimate with its 95% normal-approximation interval.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MCResult {
    pub estimate: f64,
    pub samples: u64,
    pub half_width: f64,
    pub seed: u64,
}

impl MCResult {
    pub fn proportion(hits: u64, samples: u64, seed: u64) -> MCResult {
        let p = hits as f64 / samples as f64;
        MCResult {
            estimate: p,
            samples,
            half_width: 1.96 * (p * (1.0 - p) / samples as f64).sqrt(),
            seed,
        }
    }
}

fn stream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MenshovReport {
    pub n: usize,
    pub empirical_mean: f64,
    pub std_err: f64,
    pub bound: f64,
    pub holds: bool,
}

/// E[max_n (sum_{j<=n} c_j X_j)^2] against log2(4N)^2 * sum c^2 for
/// independent random signs X_j.
pub fn menshov_check(coeffs: &[f64], trials: u64, seed: u64) -> Result<MenshovReport> {
    let n = coeffs.len();
    if n == 0 || trials < 1000 {
        return Err(Error::InvalidInput("need N >= 1 and >= 10^3 trials".into()));
    }
    let (sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let mut walk = 0.0f64;
            let mut max_sq = 0.0f64;
            for &c in coeffs {
                let x: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                walk += c * x;
                max_sq = max_sq.max(walk * walk);
            }
            (max_sq, max_sq * max_sq)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = sum / trials as f64;
    let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
    let std_err = (var / trials as f64).sqrt();
    let c_sq: f64 = coeffs.iter().map(|c| c * c).sum();
    let bound = (4.0 * n as f64).log2().powi(2) * c_sq;
    Ok(MenshovReport {
        n,
        empirical_mean: mean,
        std_err,
        bound,
        holds: mean <= bound + 3.0 * std_err,
    })
}

/// P(sup_{M <= n <= N} |W_n| / sqrt(n ln ln n) > 1/2) for a +-1 walk.
pub fn lil_probability(m: u64, n: u64, trials: u64, seed: u64) -> MCResult {
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, t);
            let mut walk = 0i64;
            for step in 1..=n {
                walk += if rng.gen::<bool>() { 1 } else { -1 };
                if step >= m {
                    let denom = (step as f64 * (step as f64).ln().ln()).sqrt();
                    if (walk.abs() as f64) / denom > 0.5 {
                        return 1u64;
                    }
                }
            }
            0u64
        })
        .sum();
    MCResult::proportion(hits, trials, seed)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LilHorizon {
    pub m: u64,
    pub n: u64,
    pub first_run: MCResult,
    pub confirmation: MCResult,
}

/// Smallest N in a doubling schedule whose empirical exceedance probability
/// clears 1 - eps by one half-width, confirmed with a fresh seed.
pub fn lil_horizon(eps: f64, m: u64, trials: u64, seed: u64) -> Result<LilHorizon> {
    if m < 16 {
        return Err(Error::InvalidInput("need M >= 16 so ln ln n > 0".into()));
    }
    if !(0.0..1.0).contains(&eps) || eps == 0.0 {
        return Err(Error::InvalidInput("need eps in (0,1)".into()));
    }
    let mut n = m.max(16);
    loop {
        let run = lil_probability(m, n, trials, seed);
        if run.estimate - run.half_width > 1.0 - eps {
            let confirmation = lil_probability(m, n, trials, seed ^ 0x9e37_79b9_7f4a_7c15);
            if confirmation.estimate + confirmation.half_width > 1.0 - eps {
                return Ok(LilHorizon {
                    m,
                    n,
                    first_run: run,
                    confirmation,
                });
            }
        }
        n = n
            .checked_mul(2)
            .filter(|&n| n <= 1 << 40)
            .ok_or(Error::HorizonBudget)?;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramReport {
    pub k_max: usize,
    pub samples: u64,
    /// empirical inner products, row-major (k, j) for 1 <= k, j <= k_max
    pub gram: Vec<Vec<f64>>,
    pub tolerance: f64,
    pub max_diag_deviation: f64,
    pub max_offdiag_deviation: f64,
}

/// Empirical Gram matrix of X_k(u, x) = f(x + k u) over uniform (u, x).
/// f must have zero mean and unit L2 norm (checked by quadrature).
pub fn orthonormality_check(
    f: impl Fn(f64) -> f64 + Sync,
    k_max: usize,
    samples: u64,
    seed: u64,
) -> Result<GramReport> {
    if k_max == 0 || k_max > 64 {
        return Err(Error::InvalidInput("need 1 <= k_max <= 64".into()));
    }
    let grid = 1u32 << 14;
    let (mut mean, mut norm_sq) = (0.0f64, 0.0f64);
    for i in 0..grid {
        let v = f((i as f64 + 0.5) / grid as f64);
        mean += v;
        norm_sq += v * v;
    }
    mean /= grid as f64;
    norm_sq /= grid as f64;
    if mean.abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "f must have zero mean (quadrature gives {mean:.2e})"
        )));
    }
    if (norm_sq - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "f must have unit L2 norm (quadrature gives {:.8})",
            norm_sq.sqrt()
        )));
    }
    let dim = k_max * k_max;
    let acc = (0..samples)
        .into_par_iter()
        .fold(
            || vec![0.0f64; dim],
            |mut acc, s| {
                let mut rng = stream(seed, s);
                let u: f64 = rng.gen();
                let x: f64 = rng.gen();
                let vals: Vec<f64> = (1..=k_max)
                    .map(|k| f((x + k as f64 * u).rem_euclid(1.0)))
                    .collect();
                for a in 0..k_max {
                    for b in 0..k_max {
                        acc[a * k_max + b] += vals[a] * vals[b];
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0.0f64; dim],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let gram: Vec<Vec<f64>> = (0..k_max)
        .map(|a| {
            (0..k_max)
                .map(|b| acc[a * k_max + b] / samples as f64)
                .collect()
        })
        .collect();
    let tolerance = 3.0 / (samples as f64).sqrt();
    let mut max_diag = 0.0f64;
    let mut max_off = 0.0f64;
    for a in 0..k_max {
        for b in 0..k_max {
            let dev = if a == b {
                (gram[a][b] - 1.0).abs()
            } else {
                gram[a][b].abs()
            };
            if a == b {
                max_diag = max_diag.max(dev);
            } else {
                max_off = max_off.max(dev);
            }
        }
    }
    Ok(GramReport {
        k_max,
        samples,
        gram,
        tolerance,
        max_diag_deviation: max_diag,
        max_offdiag_deviation: max_off,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayRow {
    pub k: u32,
    pub measure: MCResult,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DyadicDecayTable {
    pub nu: f64,
    pub rows: Vec<DecayRow>,
}

impl DyadicDecayTable {
    /// C fitted so the envelope C k^2 2^(k(1-2nu)) matches the row at k_fit.
    pub fn fitted_envelope_constant(&self, k_fit: u32) -> Option<f64> {
        let row = self.rows.iter().find(|r| r.k == k_fit)?;
        let shape = (k_fit as f64).powi(2) * (2.0f64).powf(k_fit as f64 * (1.0 - 2.0 * self.nu));
        Some(row.measure.estimate / shape)
    }
}

/// Empirical measures of E_k = {(u,x): exists n in [2^k, 2^(k+1)) with
/// |S_n f(x; u)| >= n^nu}, one orbit sweep per sample covering all k at once.
pub fn dyadic_decay(
    f: impl Fn(f64) -> f64 + Sync,
    nu: f64,
    k_max: u32,
    samples: u64,
    seed: u64,
) -> Result<DyadicDecayTable> {
    if !(0.5..1.0).contains(&nu) || nu == 0.5 {
        return Err(Error::InvalidInput("need nu in (1/2, 1)".into()));
    }
    if k_max > 20 {
        return Err(Error::BudgetExceeded(format!("k_max = {k_max} > 20")));
    }
    let n_max: u64 = 1 << (k_max + 1);
    let rows_hit = (0..samples)
        .into_par_iter()
        .fold(
            || vec![0u64; k_max as usize + 1],
            |mut acc, s| {
                let mut rng = stream(seed, s);
                let u: f64 = rng.gen();
                let x: f64 = rng.gen();
                let mut pos = x;
                let mut sum = 0.0f64;
                let mut hit = vec![false; k_max as usize + 1];
                let mut n = 0u64;
                while n < n_max {
                    sum += f(pos);
                    pos += u;
                    if pos >= 1.0 {
                        pos -= 1.0;
                    }
                    n += 1;
                    let k = 63 - n.leading_zeros() as u64; // floor(log2 n)
                    if k <= k_max as u64
                        && !hit[k as usize]
                        && sum.abs() >= (n as f64).powf(nu)
                    {
                        hit[k as usize] = true;
                    }
                }
                for (a, h) in acc.iter_mut().zip(hit) {
                    *a += h as u64;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; k_max as usize + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let rows = rows_hit
        .iter()
        .enumerate()
        .map(|(k, &hits)| DecayRow {
            k: k as u32,
            measure: MCResult::proportion(hits, samples, seed),
        })
        .collect();
    Ok(DyadicDecayTable { nu, rows })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KeyDemoReport {
    /// fraction of all (u, x) clearing the sqrt(n) threshold
    pub fraction: MCResult,
    /// fraction among samples with u in the ergodic set / outside it
    pub fraction_ergodic: MCResult,
    pub fraction_non_ergodic: MCResult,
    pub threshold: f64,
    pub ergodic_measure_exact: f64,
}

/// Empirical mu x mu fraction of (u, x) with
/// sup_{M <= n <= N} |S_n g(x; u)| / sqrt(n) > (eps/2) sqrt(ln ln M).
pub fn key_lemma_demo(
    g: &StepFn,
    spec: &RademacherStepSpec,
    m: u64,
    samples: u64,
    seed: u64,
) -> Result<KeyDemoReport> {
    if m < 16 || m > spec.horizon {
        return Err(Error::InvalidInput("need 16 <= M <= N".into()));
    }
    let threshold = (spec.eps / 2.0) * (m as f64).ln().ln().sqrt();
    let n = spec.horizon;
    let counts = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream(seed, s);
            let u = Frac::from_raw(rng.gen::<u128>());
            let x = Frac::from_raw(rng.gen::<u128>());
            let ergodic = spec.ergodic_set.contains(u);
            let mut pos = x;
            let mut sum = 0.0f64;
            let mut exceeds = false;
            for step in 1..=n {
                sum += g.eval(pos);
                pos = pos.add(u);
                if step >= m && sum.abs() / (step as f64).sqrt() > threshold {
                    exceeds = true;
                    break;
                }
            }
            // (total hits, ergodic samples, ergodic hits)
            (
                exceeds as u64,
                ergodic as u64,
                (exceeds && ergodic) as u64,
            )
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let (hits, ergodic_n, ergodic_hits) = counts;
    Ok(KeyDemoReport {
        fraction: MCResult::proportion(hits, samples, seed),
        fraction_ergodic: MCResult::proportion(ergodic_hits, ergodic_n.max(1), seed),
        fraction_non_ergodic: MCResult::proportion(
            hits - ergodic_hits,
            (samples - ergodic_n).max(1),
            seed,
        ),
        threshold,
        ergodic_measure_exact: spec.ergodic_measure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn menshov_single_variable() {
        // N = 1, c = 1: E[max] = 1 <= log2(4)^2 = 4
        let r = menshov_check(&[1.0], 1000, 1).unwrap();
        assert!((r.empirical_mean - 1.0).abs() < 1e-12);
        assert_eq!(r.bound, 4.0);
        assert!(r.holds);
    }

    #[test]
    fn menshov_flat_sixteen() {
        // bound = log2(64)^2 * 16 = 36 * 16 = 576; E[max W_n^2] ~ tens
        let r = menshov_check(&[1.0; 16], 10_000, 2).unwrap();
        assert_eq!(r.bound, 576.0);
        assert!(r.empirical_mean < 100.0);
        assert!(r.holds);
    }

    #[test]
    fn menshov_harmonic_coefficients() {
        let coeffs: Vec<f64> = (1..=64).map(|j| 1.0 / j as f64).collect();
        let r = menshov_check(&coeffs, 10_000, 3).unwrap();
        assert!(r.holds);
        assert!(r.empirical_mean < r.bound);
    }

    #[test]
    fn menshov_is_reproducible() {
        let a = menshov_check(&[1.0; 32], 2000, 42).unwrap();
        let b = menshov_check(&[1.0; 32], 2000, 42).unwrap();
        assert_eq!(a.empirical_mean, b.empirical_mean);
    }

    #[test]
    fn lil_weak_demand_returns_quickly() {
        // eps = 0.9 asks for probability > 0.1, often already true at N = M
        let r = lil_horizon(0.9, 16, 2000, 7).unwrap();
        assert!(r.n <= 64, "N = {}", r.n);
        assert!(r.first_run.estimate > 0.1);
    }

    #[test]
    fn lil_monotone_in_eps() {
        let strict = lil_horizon(0.2, 100, 4000, 11).unwrap();
        let loose = lil_horizon(0.5, 100, 4000, 11).unwrap();
        assert!(strict.n >= loose.n, "{} vs {}", strict.n, loose.n);
        assert!(strict.confirmation.estimate + 2.0 * strict.confirmation.half_width > 0.8);
    }

    #[test]
    fn gram_of_cosine_is_near_identity() {
        let f = |x: f64| std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI * x).cos();
        let r = orthonormality_check(f, 4, 200_000, 5).unwrap();
        assert!(r.max_diag_deviation < r.tolerance, "diag {}", r.max_diag_deviation);
        assert!(r.max_offdiag_deviation < r.tolerance, "off {}", r.max_offdiag_deviation);
    }

    #[test]
    fn gram_rejects_unnormalized() {
        assert!(orthonormality_check(|x| (2.0 * std::f64::consts::PI * x).cos(), 2, 1000, 5).is_err());
        assert!(orthonormality_check(|_| 1.0, 2, 1000, 5).is_err());
    }

    #[test]
    fn decay_of_zero_function() {
        let t = dyadic_decay(|_| 0.0, 0.8, 8, 500, 9).unwrap();
        assert!(t.rows.iter().all(|r| r.measure.estimate == 0.0));
    }

    #[test]
    fn decay_rows_shrink_for_cosine() {
        let f = |x: f64| std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI * x).cos();
        let t = dyadic_decay(f, 0.8, 10, 2000, 13).unwrap();
        let early = t.rows[4].measure.estimate;
        let late = t.rows[10].measure.estimate;
        assert!(late < early, "decay: {early} -> {late}");
        // summability proxy: partial sums settle
        let tail: f64 = t.rows[8..].iter().map(|r| r.measure.estimate).sum();
        assert!(tail < 0.05, "tail {tail}");
    }

    #[test]
    fn key_demo_zero_amplitude() {
        let (g, spec) =
            crate::zoo::rademacher::build_rademacher_step(1024, 64, 0.0, 3, 0.9).unwrap();
        let r = key_lemma_demo(&g, &spec, 16, 500, 17).unwrap();
        assert_eq!(r.fraction.estimate, 0.0);
    }

    #[test]
    fn key_demo_composition_bound() {
        let (g, spec) =
            crate::zoo::rademacher::build_rademacher_step(4096, 256, 1.0, 21, 0.5).unwrap();
        let demo = key_lemma_demo(&g, &spec, 64, 1000, 23).unwrap();
        // independent LIL estimate at the same (M, N)
        let lil = lil_probability(64, 256, 4000, 29);
        let floor = spec.ergodic_measure * lil.estimate
            - 3.0 * (demo.fraction.half_width + spec.ergodic_measure * lil.half_width);
        assert!(
            demo.fraction.estimate >= floor,
            "fraction {} below composition floor {floor}",
            demo.fraction.estimate
        );
        assert!(demo.threshold > 0.0);
    }
}
