//! Random-sign step functions on K equal arcs, their ergodic-parameter set
//! E_O (rotation numbers whose length-N orbits never revisit an arc), and the
//! generic step-to-continuous smoothing.

use crate::arcs::{Arc, ArcSet};
use crate::error::{Error, Result};
use crate::fixed::{mul_u128, Frac, FULL};
use crate::piecewise::{PiecewiseFn, Segment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// g(x) = eps * X_k * (+1 on the first half of arc k, -1 on the second), so
/// each arc integrates to zero exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepFn {
    pub arcs: u64,
    pub eps: f64,
    pub signs: Vec<i8>,
}

impl StepFn {
    pub fn arc_index(&self, x: Frac) -> u64 {
        let (hi, lo) = mul_u128(x.0, self.arcs as u128);
        ((hi << 1) | (lo >> 127)) as u64
    }

    pub fn eval(&self, x: Frac) -> f64 {
        let (hi, lo) = mul_u128(x.0, self.arcs as u128);
        let idx = ((hi << 1) | (lo >> 127)) as usize;
        let offset = lo & (FULL - 1);
        let half = if offset < FULL / 2 { 1.0 } else { -1.0 };
        self.eps * self.signs[idx] as f64 * half
    }

    /// The step pieces (2K of them) as explicit arcs with values.
    pub fn pieces(&self) -> Vec<(Arc, f64)> {
        let mut out = Vec::with_capacity(2 * self.arcs as usize);
        for k in 0..self.arcs {
            let start = Frac::from_ratio(k as u128, self.arcs as u128);
            let mid = Frac::from_ratio(2 * k as u128 + 1, 2 * self.arcs as u128);
            let end = if k + 1 == self.arcs {
                Frac::ZERO
            } else {
                Frac::from_ratio(k as u128 + 1, self.arcs as u128)
            };
            let v = self.eps * self.signs[k as usize] as f64;
            out.push((Arc::new(start, mid.sub(start).0), v));
            out.push((Arc::new(mid, end.sub(mid).0), -v));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RademacherStepSpec {
    pub arcs: u64,
    pub horizon: u64,
    pub eps: f64,
    pub seed: u64,
    /// u with ||k u|| > 1/K for all 1 <= k <= N: orbits of length N starting
    /// anywhere visit pairwise distinct arcs.
    pub ergodic_set: ArcSet,
    pub ergodic_measure: f64,
}

/// Ceiling of FULL / d.
fn ceil_div_full(d: u128) -> u128 {
    FULL / d + u128::from(FULL % d != 0)
}

pub fn build_rademacher_step(
    arcs: u64,
    horizon: u64,
    eps: f64,
    seed: u64,
    measure_budget: f64,
) -> Result<(StepFn, RademacherStepSpec)> {
    if arcs < 2 || horizon < 1 {
        return Err(Error::InvalidInput("need K >= 2 arcs and N >= 1".into()));
    }
    if eps < 0.0 {
        return Err(Error::InvalidInput("need eps >= 0".into()));
    }
    // Bad set: union over 1 <= k <= N of {u : ||k u|| <= 1/K}, each a union of
    // k arcs of half-width 1/(kK) around the rationals r/k.  Half-widths are
    // rounded up so E_O is, if anything, slightly small (the distinctness
    // guarantee only needs a subset).
    let mut bad: Vec<Arc> = Vec::new();
    for k in 1..=horizon {
        let hw = ceil_div_full(k as u128 * arcs as u128);
        for r in 0..k {
            let center = Frac::from_ratio(r as u128, k as u128);
            bad.push(Arc::new(center.sub(Frac::from_raw(hw)), 2 * hw));
        }
    }
    let ergodic_set = ArcSet::from_arcs(bad).normalize().complement();
    let ergodic_measure = ergodic_set.measure();
    if ergodic_measure < 1.0 - measure_budget {
        return Err(Error::InsufficientK {
            k: arcs as usize,
            n: horizon as usize,
            budget: measure_budget,
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let signs: Vec<i8> = (0..arcs).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    let g = StepFn { arcs, eps, signs };
    let spec = RademacherStepSpec {
        arcs,
        horizon,
        eps,
        seed,
        ergodic_set,
        ergodic_measure,
    };
    Ok((g, spec))
}

/// Replace the jumps of a step function (given as arcs tiling the circle with
/// one value each) by linear ramps of total measure <= delta/4, then cancel
/// the residual mean with one triangular bump of base <= delta/2 placed in the
/// widest piece.  The result is continuous, differs from g on measure <= delta,
/// and ||f|| <= 2 ||g||.
pub fn smooth_step(pieces: &[(Arc, f64)], delta: f64) -> Result<PiecewiseFn> {
    if pieces.is_empty() {
        return Err(Error::InvalidInput("empty step function".into()));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidInput("need delta in (0,1)".into()));
    }
    let mut pieces: Vec<(Arc, f64)> = pieces.to_vec();
    pieces.sort_by_key(|(a, _)| a.start);
    // verify tiling and zero mean
    let n = pieces.len();
    let mut mean = 0.0f64;
    for i in 0..n {
        let (a, v) = pieces[i];
        let next = pieces[(i + 1) % n].0.start;
        if a.end() != next {
            return Err(Error::InvalidInput("step pieces must tile the circle".into()));
        }
        mean += v * a.len_f64();
    }
    if mean.abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("step function mean {mean:.3e} is not zero")));
    }
    let sup: f64 = pieces.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max);
    if sup == 0.0 {
        return Ok(PiecewiseFn::constant(0.0));
    }

    let jumps = (0..n)
        .filter(|&i| pieces[i].1 != pieces[(i + 1) % n].1)
        .count()
        .max(1);
    // ramps eat the start of the following piece
    let ramp_w = delta / (4.0 * jumps as f64);
    let ramp_raw = ((ramp_w * FULL as f64) as u128).max(1);

    // widest piece hosts the correction bump
    let widest = (0..n).max_by_key(|&i| pieces[i].0.len).unwrap();
    let widest_len = pieces[widest].0.len;
    let bump_base_raw = ((delta / 2.0) * FULL as f64) as u128;
    if widest_len <= 2 * ramp_raw + 2 * bump_base_raw {
        return Err(Error::NoRoomForBump(delta));
    }

    let mut breakpoints: Vec<Frac> = Vec::new();
    let mut segments: Vec<Segment> = Vec::new();
    let mut ramp_mean = 0.0f64; // exact dyadic-ish accumulation in f64
    for i in 0..n {
        let (a, v) = pieces[i];
        let prev_v = pieces[(i + n - 1) % n].1;
        if prev_v != v {
            // ramp from prev_v to v over [start, start + ramp_raw)
            if a.len <= 2 * ramp_raw {
                return Err(Error::InvalidInput(
                    "a step piece is too narrow for the requested ramps".into(),
                ));
            }
            breakpoints.push(a.start);
            segments.push(Segment::Affine { left: prev_v, right: v });
            breakpoints.push(a.start.add(Frac::from_raw(ramp_raw)));
            segments.push(Segment::Const { value: v });
            // the ramp replaces value v on measure ramp_raw: mean shift
            let w = ramp_raw as f64 / FULL as f64;
            ramp_mean += 0.5 * (prev_v - v) * w;
        } else {
            breakpoints.push(a.start);
            segments.push(Segment::Const { value: v });
        }
    }

    // triangular bump of area -ramp_mean inside the widest piece
    if ramp_mean != 0.0 {
        let height = -ramp_mean / (0.5 * bump_base_raw as f64 / FULL as f64);
        if height.abs() > sup {
            return Err(Error::NoRoomForBump(delta));
        }
        let (a, v) = pieces[widest];
        let bump_start = a.start.add(Frac::from_raw((a.len - bump_base_raw) / 2));
        let mid = bump_start.add(Frac::from_raw(bump_base_raw / 2));
        let bump_end = bump_start.add(Frac::from_raw(bump_base_raw));
        // splice into the Const run covering the widest piece
        let insert_at = breakpoints.partition_point(|b| *b <= bump_start);
        breakpoints.insert(insert_at, bump_end);
        segments.insert(insert_at, Segment::Const { value: v });
        breakpoints.insert(insert_at, mid);
        segments.insert(insert_at, Segment::Affine { left: v + height, right: v });
        breakpoints.insert(insert_at, bump_start);
        segments.insert(insert_at, Segment::Affine { left: v, right: v + height });
    }

    let f = PiecewiseFn::new(breakpoints, segments)?;
    debug_assert!(f.mean().abs() < 1e-12);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ergodic_set_example() {
        // K = 4096, N = 32: exact measure is far above 1/2
        let (_, spec) = build_rademacher_step(4096, 32, 1.0, 7, 0.5).unwrap();
        assert!(spec.ergodic_measure >= 0.5);
        assert!(spec.ergodic_measure > 0.96, "exact measure {}", spec.ergodic_measure);
        // u = 0 is never ergodic
        assert!(!spec.ergodic_set.contains(Frac::ZERO));
    }

    #[test]
    fn insufficient_k_refused() {
        assert!(matches!(
            build_rademacher_step(8, 64, 1.0, 7, 0.25),
            Err(Error::InsufficientK { .. })
        ));
    }

    #[test]
    fn orbit_arcs_distinct_on_ergodic_set() {
        let (g, spec) = build_rademacher_step(4096, 32, 1.0, 7, 0.5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1234);
        for _ in 0..1000 {
            let u = spec.ergodic_set.sample(&mut rng).unwrap();
            let x = Frac::from_raw(rng.gen::<u128>());
            let mut seen = std::collections::HashSet::new();
            let mut pos = x;
            for _ in 0..spec.horizon {
                assert!(seen.insert(g.arc_index(pos)), "arc revisited");
                pos = pos.add(u);
            }
        }
    }

    #[test]
    fn step_zero_mean_and_values() {
        let (g, _) = build_rademacher_step(64, 4, 0.25, 9, 0.9).unwrap();
        let mut mean = 0.0;
        let n = 1 << 16;
        for i in 0..n {
            let v = g.eval(Frac::from_ratio(i, n));
            assert!(v == 0.25 || v == -0.25);
            mean += v;
        }
        // halves cancel exactly on a grid aligned with the arcs
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn smooth_step_two_level() {
        // g = +1 on [0, 1/2), -1 on [1/2, 1)
        let pieces = vec![
            (Arc::new(Frac::ZERO, FULL / 2), 1.0),
            (Arc::new(Frac::from_ratio(1, 2), FULL / 2), -1.0),
        ];
        let f = smooth_step(&pieces, 0.01).unwrap();
        assert!(f.sup_norm() <= 2.0);
        assert!(f.mean().abs() < 1e-12);
        // differs from g on measure <= 0.01
        let grid = 100_000u64;
        let mut differs = 0u64;
        for i in 0..grid {
            let x = Frac::from_ratio(i as u128, grid as u128);
            let gv = if x.0 < FULL / 2 { 1.0 } else { -1.0 };
            if (f.eval(x) - gv).abs() > 1e-12 {
                differs += 1;
            }
        }
        assert!(
            (differs as f64 / grid as f64) <= 0.0101,
            "differs on {differs} of {grid}"
        );
    }

    #[test]
    fn smooth_step_of_zero_is_zero() {
        let pieces = vec![(Arc::new(Frac::ZERO, FULL), 0.0)];
        let f = smooth_step(&pieces, 0.1).unwrap();
        assert!(f.is_identically_zero());
    }

    #[test]
    fn smooth_rademacher_step_bound() {
        let (g, _) = build_rademacher_step(32, 2, 1.0, 3, 0.9).unwrap();
        let f = smooth_step(&g.pieces(), 0.001).unwrap();
        assert!(f.sup_norm() <= 2.0 * 1.0 + 1e-12);
        assert!(f.mean().abs() < 1e-12);
    }
}
