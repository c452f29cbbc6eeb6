//! Birkhoff sums along rotation orbits and their diagnostics: the series
//! itself, exact star discrepancy, the Koksma-type inequality, block sums,
//! the one-sided ergodic Hilbert transform (direct and Fourier side), and
//! finite-horizon growth-exponent fits.

use crate::error::{Error, Result};
use crate::fixed::{mul_u128, Frac, FULL};
use crate::gauge::GrowthGauge;
use crate::piecewise::PiecewiseFn;

pub const EVAL_BUDGET: u64 = 100_000_000;
pub const DISCREPANCY_BUDGET: u64 = 10_000_000;

/// Neumaier-compensated accumulator; error stays O(eps) per element.
#[derive(Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// The trajectory n -> S_n f(x) with running maxima.
#[derive(Clone, Debug)]
pub struct BirkhoffSeries {
    pub x: Frac,
    pub step: Frac,
    pub stride: u64,
    /// S_1 .. S_N.
    pub values: Vec<f64>,
    /// running max of |S_m|, m <= n.
    pub running_max: Vec<f64>,
    /// running max of |S_m| / psi(m) when a gauge was supplied.
    pub gauge_ratio_max: Option<Vec<f64>>,
}

pub fn birkhoff_series(
    f: impl Fn(Frac) -> f64,
    alpha: Frac,
    x: Frac,
    n: u64,
    stride: u64,
    gauge: Option<&GrowthGauge>,
) -> Result<BirkhoffSeries> {
    if n == 0 || stride == 0 {
        return Err(Error::InvalidInput("need n >= 1 and stride >= 1".into()));
    }
    if n > EVAL_BUDGET {
        return Err(Error::BudgetExceeded(format!("series length {n}")));
    }
    let step = alpha.mul_int(stride as u128);
    let mut acc = Kahan::default();
    let mut values = Vec::with_capacity(n as usize);
    let mut running_max = Vec::with_capacity(n as usize);
    let mut ratios = gauge.map(|_| Vec::with_capacity(n as usize));
    let mut rmax = 0.0f64;
    let mut ratio_max = 0.0f64;
    let mut pos = x;
    for m in 1..=n {
        acc.add(f(pos));
        pos = pos.add(step);
        let s = acc.value();
        values.push(s);
        rmax = rmax.max(s.abs());
        running_max.push(rmax);
        if let (Some(rs), Some(g)) = (ratios.as_mut(), gauge) {
            ratio_max = ratio_max.max(s.abs() / g.eval(m));
            rs.push(ratio_max);
        }
    }
    Ok(BirkhoffSeries {
        x,
        step,
        stride,
        values,
        running_max,
        gauge_ratio_max: ratios,
    })
}

/// S_n for a single n without storing the trajectory.
pub fn birkhoff_sum(f: impl Fn(Frac) -> f64, alpha: Frac, x: Frac, n: u64) -> f64 {
    let mut acc = Kahan::default();
    let mut pos = x;
    for _ in 0..n {
        acc.add(f(pos));
        pos = pos.add(alpha);
    }
    acc.value()
}

#[derive(Clone, Debug)]
pub struct DiscrepancyReport {
    pub n: u64,
    pub d_star: f64,
    /// 1-based index of the sorted point achieving the supremum.
    pub achieving_index: u64,
}

/// Exact star discrepancy of (alpha, 2 alpha, ..., n alpha): after sorting the
/// points, D*_n = max_i max(i/n - u_(i), u_(i) - (i-1)/n); the maximizer is
/// selected by exact 256-bit cross-multiplication.
pub fn discrepancy_star(alpha: Frac, n: u64) -> Result<DiscrepancyReport> {
    if n == 0 {
        return Err(Error::InvalidInput("need n >= 1".into()));
    }
    if n > DISCREPANCY_BUDGET {
        return Err(Error::BudgetExceeded(format!("discrepancy at n = {n}")));
    }
    let mut pts: Vec<u128> = Vec::with_capacity(n as usize);
    let mut cur = alpha;
    for _ in 0..n {
        pts.push(cur.0);
        cur = cur.add(alpha);
    }
    pts.sort_unstable();
    // numerators of the two candidate gaps over the common denominator n*2^127
    let mut best: (u128, u128) = (0, 0);
    let mut best_idx = 1u64;
    for (i0, &u) in pts.iter().enumerate() {
        let i = (i0 + 1) as u128;
        let nu = mul_u128(n as u128, u);
        // A = i/n - u: numerator i*2^127 - n*u
        let i_full = (i >> 1, (i & 1) << 127);
        if let Some(a) = sub256(i_full, nu) {
            if a > best {
                best = a;
                best_idx = i as u64;
            }
        }
        // B = u - (i-1)/n: numerator n*u - (i-1)*2^127
        let im1 = i - 1;
        let im1_full = (im1 >> 1, (im1 & 1) << 127);
        if let Some(b) = sub256(nu, im1_full) {
            if b > best {
                best = b;
                best_idx = i as u64;
            }
        }
    }
    let num = best.0 as f64 * 2.0f64.powi(128) + best.1 as f64;
    let den = n as f64 * FULL as f64;
    Ok(DiscrepancyReport {
        n,
        d_star: num / den,
        achieving_index: best_idx,
    })
}

fn sub256(a: (u128, u128), b: (u128, u128)) -> Option<(u128, u128)> {
    if a < b {
        return None;
    }
    let (lo, borrow) = a.1.overflowing_sub(b.1);
    Some((a.0 - b.0 - borrow as u128, lo))
}

#[derive(Clone, Debug)]
pub struct KoksmaReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// |S_n f(x)|  vs  n * Lip_xi(f) * (D*_n)^xi.
pub fn koksma_check(
    f: &PiecewiseFn,
    xi: f64,
    alpha: Frac,
    x: Frac,
    n: u64,
    d_star: Option<f64>,
) -> Result<KoksmaReport> {
    let lip = f.lip_seminorm(xi)?;
    let d = match d_star {
        Some(d) => d,
        None => discrepancy_star(alpha, n)?.d_star,
    };
    let lhs = birkhoff_sum(|y| f.eval(y), alpha, x, n).abs();
    let rhs = n as f64 * lip * d.powf(xi);
    Ok(KoksmaReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
    })
}

/// Partial sums over consecutive index blocks [n_k, n_{k+1}).
pub fn block_sums(
    f: impl Fn(Frac) -> f64,
    alpha: Frac,
    x: Frac,
    breakpoints: &[u64],
) -> Result<Vec<f64>> {
    if breakpoints.len() < 2 || !breakpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput("breakpoints must be increasing".into()));
    }
    let total = breakpoints[breakpoints.len() - 1];
    if total > EVAL_BUDGET {
        return Err(Error::BudgetExceeded(format!("block sums to {total}")));
    }
    let mut out = Vec::with_capacity(breakpoints.len() - 1);
    let mut pos = x.add(alpha.mul_int(breakpoints[0] as u128));
    let mut whole = Kahan::default();
    for w in breakpoints.windows(2) {
        let mut acc = Kahan::default();
        for _ in w[0]..w[1] {
            let v = f(pos);
            acc.add(v);
            whole.add(v);
            pos = pos.add(alpha);
        }
        out.push(acc.value());
    }
    // blocks must add back to the spanning sum
    let direct: f64 = whole.value();
    let stacked: f64 = out.iter().sum();
    let scale = direct.abs().max(stacked.abs()).max(1.0);
    if (direct - stacked).abs() > 1e-9 * scale {
        return Err(Error::InternalCheck(
            "block sums inconsistent with spanning sum".into(),
        ));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct HilbertSeries {
    /// Partial sums sum_{m <= n} f(x + m alpha)/m for n = 1..N.
    pub partials: Vec<f64>,
    pub sup_abs: f64,
    /// n at which the running sup of |partial| was last improved.
    pub sup_attained_at: u64,
}

/// One-sided ergodic Hilbert transform partial sums.
pub fn hilbert_partial(
    f: impl Fn(Frac) -> f64,
    alpha: Frac,
    x: Frac,
    n: u64,
) -> Result<HilbertSeries> {
    if n == 0 {
        return Err(Error::InvalidInput("need n >= 1".into()));
    }
    if n > EVAL_BUDGET {
        return Err(Error::BudgetExceeded(format!("hilbert length {n}")));
    }
    let mut acc = Kahan::default();
    let mut partials = Vec::with_capacity(n as usize);
    let mut sup = 0.0f64;
    let mut sup_at = 1u64;
    let mut pos = x.add(alpha);
    for m in 1..=n {
        acc.add(f(pos) / m as f64);
        pos = pos.add(alpha);
        let v = acc.value();
        partials.push(v);
        if v.abs() > sup {
            sup = v.abs();
            sup_at = m;
        }
    }
    Ok(HilbertSeries {
        partials,
        sup_abs: sup,
        sup_attained_at: sup_at,
    })
}

/// Im G_N(t) = sum_{m<=N} sin(2 pi m t)/m at the supplied checkpoints,
/// by incremental complex rotation (no trig calls in the loop).
pub fn im_g_checkpoints(t: f64, checkpoints: &[u64]) -> Vec<f64> {
    let theta = 2.0 * std::f64::consts::PI * t;
    let (s1, c1) = theta.sin_cos();
    let (mut re, mut im) = (c1, s1);
    let mut acc = Kahan::default();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut ci = 0usize;
    let n_max = *checkpoints.last().unwrap_or(&0);
    for m in 1..=n_max {
        acc.add(im / m as f64);
        let (nre, nim) = (re * c1 - im * s1, re * s1 + im * c1);
        re = nre;
        im = nim;
        if ci < checkpoints.len() && checkpoints[ci] == m {
            out.push(acc.value());
            ci += 1;
        }
    }
    out
}

/// Running sup of |Im G_n(t)| over n <= n_max.
pub fn im_g_running_sup(t: f64, n_max: u64) -> f64 {
    let theta = 2.0 * std::f64::consts::PI * t;
    let (s1, c1) = theta.sin_cos();
    let (mut re, mut im) = (c1, s1);
    let mut acc = Kahan::default();
    let mut sup = 0.0f64;
    for m in 1..=n_max {
        acc.add(im / m as f64);
        let (nre, nim) = (re * c1 - im * s1, re * s1 + im * c1);
        re = nre;
        im = nim;
        sup = sup.max(acc.value().abs());
    }
    sup
}

/// Fourier-side evaluation of the Hilbert example at x = 0:
/// -2 sum_{k>0} a^k Im G_N(k alpha), geometric tail cut at a^k < 2^-60.
pub fn hilbert_fourier_side(a: f64, alpha: Frac, checkpoints: &[u64]) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&a) || a == 0.0 {
        return Err(Error::InvalidInput("need a in (0,1)".into()));
    }
    if checkpoints.is_empty() {
        return Ok(vec![]);
    }
    if !checkpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput("checkpoints must increase".into()));
    }
    let k_max = ((-60.0) * std::f64::consts::LN_2 / a.ln()).ceil() as u64;
    let mut sums = vec![Kahan::default(); checkpoints.len()];
    let mut weight = 1.0f64;
    for k in 1..=k_max {
        weight *= a;
        if weight < 2.0f64.powi(-60) {
            break;
        }
        let t = alpha.mul_int(k as u128).to_f64();
        let ims = im_g_checkpoints(t, checkpoints);
        for (s, v) in sums.iter_mut().zip(ims) {
            s.add(weight * v);
        }
    }
    Ok(sums.into_iter().map(|s| -2.0 * s.value()).collect())
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    /// Least-squares slope of log running-max against log n over dyadic n.
    pub nu_hat: f64,
    pub fit_residual: f64,
    pub dyadic_maxima: Vec<(u64, f64)>,
    /// max_n |S_n|/psi(n) for the supplied gauge.
    pub max_ratio: f64,
}

pub fn growth_report(series: &BirkhoffSeries, gauge: &GrowthGauge) -> Result<GrowthReport> {
    let n = series.values.len() as u64;
    if n < 16 {
        return Err(Error::InvalidInput("need series length >= 16".into()));
    }
    if series.values.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateSeries);
    }
    let mut dyadic = Vec::new();
    let mut m = 4u64;
    while m <= n {
        dyadic.push((m, series.running_max[(m - 1) as usize]));
        m *= 2;
    }
    let pts: Vec<(f64, f64)> = dyadic
        .iter()
        .filter(|&&(_, v)| v > 0.0)
        .map(|&(m, v)| ((m as f64).ln(), v.ln()))
        .collect();
    let (slope, _intercept, residual) = least_squares(&pts);
    let mut max_ratio = 0.0f64;
    for (i, &s) in series.values.iter().enumerate() {
        max_ratio = max_ratio.max(s.abs() / gauge.eval((i + 1) as u64));
    }
    Ok(GrowthReport {
        nu_hat: slope,
        fit_residual: residual,
        dyadic_maxima: dyadic,
        max_ratio,
    })
}

/// (slope, intercept, rms residual) of a least-squares line.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return (0.0, pts.first().map_or(0.0, |p| p.1), 0.0);
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (0.0, sy / n, 0.0);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let rss: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + intercept);
            e * e
        })
        .sum();
    (slope, intercept, (rss / n).sqrt())
}
