//! Piecewise functions on the circle: constant, affine, and power-cusp
//! segments over exact fixed-point breakpoints.
//!
//! Affine segments store both endpoint values so that joints built to agree
//! agree bitwise, and cusp segments are first-class because the Holder
//! constructions need their seminorm exactly, not from samples.

use crate::error::{Error, Result};
use crate::fixed::{Frac, Precision, FULL};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Const {
        value: f64,
    },
    /// Linear from `left` at the segment start to `right` at its end.
    Affine {
        left: f64,
        right: f64,
    },
    /// amplitude * sign * |x - anchor|^exponent; the anchor must be one of
    /// the segment's endpoints.
    Cusp {
        anchor: Frac,
        sign: i8,
        exponent: f64,
        amplitude: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiecewiseFn {
    /// Sorted cyclically; segment i lives on [breakpoints[i], breakpoints[i+1])
    /// and the last segment wraps around to breakpoints[0].
    breakpoints: Vec<Frac>,
    segments: Vec<Segment>,
    /// Builder's certificate that positive and negative parts cancel exactly
    /// (equal multisets of segment shapes with opposite signs).
    #[serde(default)]
    symmetric_zero_mean: bool,
}

impl PiecewiseFn {
    /// A constant function (single segment spanning the whole circle).
    pub fn constant(c: f64) -> PiecewiseFn {
        PiecewiseFn {
            breakpoints: vec![Frac::ZERO],
            segments: vec![Segment::Const { value: c }],
            symmetric_zero_mean: c == 0.0,
        }
    }

    pub fn new(breakpoints: Vec<Frac>, segments: Vec<Segment>) -> Result<PiecewiseFn> {
        let f = PiecewiseFn {
            breakpoints,
            segments,
            symmetric_zero_mean: false,
        };
        f.validate(Precision::default())?;
        Ok(f)
    }

    /// As `new`, with the builder certifying exact cancellation of the mean.
    pub fn new_symmetric_zero_mean(
        breakpoints: Vec<Frac>,
        segments: Vec<Segment>,
    ) -> Result<PiecewiseFn> {
        let mut f = PiecewiseFn::new(breakpoints, segments)?;
        f.symmetric_zero_mean = true;
        Ok(f)
    }

    pub fn breakpoints(&self) -> &[Frac] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn has_zero_mean_certificate(&self) -> bool {
        self.symmetric_zero_mean
    }

    /// Well-formedness: matching lengths, sorted deduplicated breakpoints
    /// (separation at least 2^(-P+4)), continuity at every joint within
    /// 2^(-P+8), cusp anchors on segment endpoints.
    pub fn validate(&self, precision: Precision) -> Result<()> {
        let n = self.breakpoints.len();
        if n == 0 || n != self.segments.len() {
            return Err(Error::InvalidInput(
                "breakpoints and segments must be nonempty and equal-length".into(),
            ));
        }
        let dedup_raw = 1u128 << (4 + crate::fixed::SCALE_BITS - precision.0).min(126);
        for i in 0..n {
            let b = self.breakpoints[i];
            let next = self.breakpoints[(i + 1) % n];
            if n > 1 {
                if i + 1 < n && next.0 <= b.0 {
                    return Err(Error::InvalidInput("breakpoints not sorted".into()));
                }
                if next.sub(b).0 < dedup_raw {
                    return Err(Error::InvalidInput(format!(
                        "breakpoints {i} and {} closer than the dedup tolerance (construction bug)",
                        (i + 1) % n
                    )));
                }
            }
            if let Segment::Cusp { anchor, .. } = self.segments[i] {
                if anchor != b && anchor != next {
                    return Err(Error::InvalidInput(format!(
                        "cusp anchor of segment {i} is not a segment endpoint"
                    )));
                }
            }
        }
        // continuity across joints
        let tol = precision.tolerance(8);
        for i in 0..n {
            if n == 1 {
                break;
            }
            let here = self.value_at_end(i);
            let there = self.value_at_start((i + 1) % n);
            if (here - there).abs() > tol {
                return Err(Error::InvalidInput(format!(
                    "discontinuity {:.3e} at joint {} exceeds tolerance {:.1e}",
                    (here - there).abs(),
                    (i + 1) % n,
                    tol
                )));
            }
        }
        Ok(())
    }

    fn seg_len_raw(&self, i: usize) -> u128 {
        let n = self.breakpoints.len();
        if n == 1 {
            return FULL;
        }
        self.breakpoints[(i + 1) % n].sub(self.breakpoints[i]).0
    }

    fn value_at_start(&self, i: usize) -> f64 {
        match self.segments[i] {
            Segment::Const { value } => value,
            Segment::Affine { left, .. } => left,
            Segment::Cusp {
                anchor,
                sign,
                exponent,
                amplitude,
            } => {
                if anchor == self.breakpoints[i] {
                    0.0
                } else {
                    let len = self.seg_len_raw(i) as f64 / FULL as f64;
                    amplitude * sign as f64 * len.powf(exponent)
                }
            }
        }
    }

    fn value_at_end(&self, i: usize) -> f64 {
        match self.segments[i] {
            Segment::Const { value } => value,
            Segment::Affine { right, .. } => right,
            Segment::Cusp {
                anchor,
                sign,
                exponent,
                amplitude,
            } => {
                if anchor == self.breakpoints[i] {
                    let len = self.seg_len_raw(i) as f64 / FULL as f64;
                    amplitude * sign as f64 * len.powf(exponent)
                } else {
                    0.0
                }
            }
        }
    }

    /// Index of the segment containing x.
    pub fn segment_index(&self, x: Frac) -> usize {
        let n = self.breakpoints.len();
        let idx = self.breakpoints.partition_point(|b| *b <= x);
        if idx == 0 {
            n - 1 // before the first breakpoint: wrapping segment
        } else {
            idx - 1
        }
    }

    pub fn eval(&self, x: Frac) -> f64 {
        let i = self.segment_index(x);
        match self.segments[i] {
            Segment::Const { value } => value,
            Segment::Affine { left, right } => {
                let len = self.seg_len_raw(i);
                let off = x.sub(self.breakpoints[i]).0;
                let t = off as f64 / len as f64;
                left + (right - left) * t
            }
            Segment::Cusp {
                anchor,
                sign,
                exponent,
                amplitude,
            } => {
                let d = x.circle_dist(anchor) as f64 / FULL as f64;
                amplitude * sign as f64 * d.powf(exponent)
            }
        }
    }

    /// Segment-exact mean: constants and affine pieces analytically, cusps by
    /// the closed form  int_0^h t^e dt = h^(e+1)/(e+1).  When the builder has
    /// certified exact +/- cancellation this is exactly zero.
    pub fn mean(&self) -> f64 {
        if self.symmetric_zero_mean {
            return 0.0;
        }
        {
            let mut sum = 0.0f64;
            let mut comp = 0.0f64;
            for (i, seg) in self.segments.iter().enumerate() {
                let len = self.seg_len_raw(i) as f64 / FULL as f64;
                let contrib = match *seg {
                    Segment::Const { value } => value * len,
                    Segment::Affine { left, right } => 0.5 * (left + right) * len,
                    Segment::Cusp {
                        sign,
                        exponent,
                        amplitude,
                        ..
                    } => sign as f64 * amplitude * len.powf(exponent + 1.0) / (exponent + 1.0),
                };
                // Neumaier compensation
                let t = sum + contrib;
                if sum.abs() >= contrib.abs() {
                    comp += (sum - t) + contrib;
                } else {
                    comp += (contrib - t) + sum;
                }
                sum = t;
            }
            sum + comp
        }
    }

    /// Exact sup norm: extrema sit at breakpoints or cusp peaks.
    pub fn sup_norm(&self) -> f64 {
        let mut sup = 0.0f64;
        for (i, seg) in self.segments.iter().enumerate() {
            let len = self.seg_len_raw(i) as f64 / FULL as f64;
            let m = match *seg {
                Segment::Const { value } => value.abs(),
                Segment::Affine { left, right } => left.abs().max(right.abs()),
                Segment::Cusp {
                    exponent, amplitude, ..
                } => amplitude * len.powf(exponent),
            };
            sup = sup.max(m);
        }
        sup
    }

    pub fn is_identically_zero(&self) -> bool {
        self.sup_norm() == 0.0
    }

    /// Certified upper bound for the xi-Holder seminorm, tight for the zoo's
    /// distance-profile components.
    ///
    /// The circle is split at joints where f vanishes into components of
    /// constant sign.  When every component is one of the certified shapes
    /// (a cusp pair anchored at the component's endpoints, or a same-sign
    /// affine bump with at most one plateau), each satisfies both
    /// |f(x)-f(y)| <= C|x-y|^xi within the component and |f| <= C d(., Z)^xi
    /// against the zero set, so the global seminorm is max C times 2^(1-xi)
    /// exactly when both signs occur (two points of opposite sign are
    /// separated by a zero, and u^xi + v^xi <= 2^(1-xi) (u+v)^xi).  Otherwise
    /// a generic chain bound through segment joints applies, sound for any
    /// continuous piecewise function but looser by up to 3^(1-xi).
    pub fn lip_seminorm(&self, xi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&xi) || xi == 0.0 {
            return Err(Error::InvalidInput("need xi in (0, 1]".into()));
        }
        for seg in &self.segments {
            if let Segment::Cusp { exponent, .. } = seg {
                if *exponent < xi {
                    return Err(Error::UnsupportedExponent {
                        exponent: *exponent,
                        requested: xi,
                    });
                }
            }
        }
        if self.is_identically_zero() {
            return Ok(0.0);
        }
        let comps = self.components();
        let mut max_bound = 0.0f64;
        let mut has_pos = false;
        let mut has_neg = false;
        let mut all_certified = true;
        for comp in &comps {
            match self.certified_shape_bound(comp, xi) {
                Some(b) => {
                    max_bound = max_bound.max(b.bound);
                    has_pos |= b.sign > 0;
                    has_neg |= b.sign < 0;
                }
                None => {
                    all_certified = false;
                    break;
                }
            }
        }
        if all_certified {
            let factor = if has_pos && has_neg {
                (2.0f64).powf(1.0 - xi)
            } else {
                1.0
            };
            return Ok(max_bound * factor);
        }
        Ok(self.chain_fallback_bound(xi))
    }

    /// Maximal runs of segments between zero-valued joints.
    fn components(&self) -> Vec<Component> {
        let n = self.segments.len();
        let joint_is_zero: Vec<bool> = (0..n)
            .map(|i| {
                // joint i = start of segment i
                let prev = (i + n - 1) % n;
                self.value_at_end(prev) == 0.0 && self.value_at_start(i) == 0.0
            })
            .collect();
        let zero_joints: Vec<usize> = (0..n).filter(|&i| joint_is_zero[i]).collect();
        if zero_joints.is_empty() {
            return vec![Component { segs: (0..n).collect() }];
        }
        let mut comps = Vec::new();
        for (zi, &start_joint) in zero_joints.iter().enumerate() {
            let end_joint = zero_joints[(zi + 1) % zero_joints.len()];
            let mut segs = Vec::new();
            let mut s = start_joint;
            loop {
                segs.push(s);
                s = (s + 1) % n;
                if s == end_joint {
                    break;
                }
            }
            let all_zero = segs.iter().all(|&i| match self.segments[i] {
                Segment::Const { value } => value == 0.0,
                Segment::Affine { left, right } => left == 0.0 && right == 0.0,
                Segment::Cusp { amplitude, .. } => amplitude == 0.0,
            });
            if !all_zero {
                comps.push(Component { segs });
            }
            if zero_joints.len() == 1 {
                break;
            }
        }
        comps
    }

    /// Bound for the two certified shapes; None if the component is neither.
    /// Certified components have zero-free interiors, so their boundary
    /// distance equals the distance to the zero set of f.
    fn certified_shape_bound(&self, comp: &Component, xi: f64) -> Option<CompBound> {
        let seg_len = |i: usize| self.seg_len_raw(i) as f64 / FULL as f64;
        let comp_len: f64 = comp.segs.iter().map(|&i| seg_len(i)).sum();

        // Cusp pair anchored at the outer endpoints: f = amp * d(x, edge)^e.
        if comp.segs.len() == 2 {
            let comp_start = self.breakpoints[comp.segs[0]];
            let last = *comp.segs.last().unwrap();
            let comp_end = self.breakpoints[(last + 1) % self.breakpoints.len()];
            let mut amp_common = None;
            let mut e_common = None;
            let mut sign_common = None;
            let mut shape_ok = true;
            for &i in &comp.segs {
                match self.segments[i] {
                    Segment::Cusp {
                        anchor,
                        sign,
                        exponent,
                        amplitude,
                    } => {
                        shape_ok &= anchor == comp_start || anchor == comp_end;
                        shape_ok &= *amp_common.get_or_insert(amplitude) == amplitude;
                        shape_ok &= *e_common.get_or_insert(exponent) == exponent;
                        shape_ok &= *sign_common.get_or_insert(sign) == sign;
                    }
                    _ => shape_ok = false,
                }
            }
            if shape_ok {
                let amp = amp_common.unwrap();
                let e = e_common.unwrap();
                let bound = if e == xi {
                    amp
                } else {
                    amp * (comp_len / 2.0).powf(e - xi)
                };
                return Some(CompBound {
                    bound,
                    sign: sign_common.unwrap(),
                });
            }
            // fall through to the trapezoid test
        }

        // Same-sign affine bump 0 -> peak -> 0 with at most one plateau run.
        self.trapezoid_bound(comp, xi)
    }

    /// Certified bound for components shaped 0 -> peak -> 0 out of affine
    /// pieces of one sign: C = s_max^xi * |peak|^(1-xi), from
    /// |f(x)-f(y)| <= min(s_max |x-y|, peak).
    fn trapezoid_bound(&self, comp: &Component, xi: f64) -> Option<CompBound> {
        let mut peak = 0.0f64;
        let mut s_max = 0.0f64;
        let mut prev = 0.0f64;
        let mut rising = true;
        let mut sign = 0i8;
        for (idx, &i) in comp.segs.iter().enumerate() {
            let len = self.seg_len_raw(i) as f64 / FULL as f64;
            let (l, r) = match self.segments[i] {
                Segment::Const { value } => (value, value),
                Segment::Affine { left, right } => (left, right),
                Segment::Cusp { .. } => return None,
            };
            for v in [l, r] {
                if v != 0.0 {
                    let s = if v > 0.0 { 1i8 } else { -1 };
                    if sign == 0 {
                        sign = s;
                    } else if sign != s {
                        return None; // mixed signs inside one component
                    }
                }
            }
            if idx == 0 && l != 0.0 {
                return None;
            }
            if l != prev {
                return None;
            }
            let (al, ar) = (l.abs(), r.abs());
            if ar > al && !rising {
                return None; // second rise: not a single bump
            }
            if ar < al {
                rising = false;
            }
            peak = peak.max(al.max(ar));
            if len > 0.0 {
                s_max = s_max.max((r - l).abs() / len);
            }
            prev = r;
        }
        if prev != 0.0 {
            return None;
        }
        Some(CompBound {
            bound: if peak == 0.0 {
                0.0
            } else {
                s_max.powf(xi) * peak.powf(1.0 - xi)
            },
            sign,
        })
    }

    /// Generic sound bound: any pair (x, y) decomposes as x -> nearest joint
    /// -> nearest joint to y -> y, so the seminorm is at most 3^(1-xi) times
    /// the worst of the per-segment bounds and the joint-pair ratios.
    fn chain_fallback_bound(&self, xi: f64) -> f64 {
        let n = self.segments.len();
        let mut seg_bound = 0.0f64;
        for i in 0..n {
            seg_bound = seg_bound.max(self.per_segment_bound(i, xi));
        }
        let joints: Vec<(Frac, f64)> = (0..n)
            .map(|i| (self.breakpoints[i], self.value_at_start(i)))
            .collect();
        let mut joint_bound = 0.0f64;
        if n <= 4096 {
            for a in 0..n {
                for b in a + 1..n {
                    let d = joints[a].0.circle_dist(joints[b].0) as f64 / FULL as f64;
                    if d > 0.0 {
                        let dv = (joints[a].1 - joints[b].1).abs();
                        joint_bound = joint_bound.max(dv / d.powf(xi));
                    }
                }
            }
        } else {
            // coarse but sound: value spread over the minimal joint gap
            let mut vmin = f64::INFINITY;
            let mut vmax = f64::NEG_INFINITY;
            let mut gap_min = f64::INFINITY;
            for i in 0..n {
                vmin = vmin.min(joints[i].1);
                vmax = vmax.max(joints[i].1);
                gap_min = gap_min.min(self.seg_len_raw(i) as f64 / FULL as f64);
            }
            joint_bound = (vmax - vmin) / gap_min.powf(xi);
        }
        (3.0f64).powf(1.0 - xi) * seg_bound.max(joint_bound)
    }

    /// sup over pairs inside one segment of |f(x)-f(y)|/|x-y|^xi, exactly.
    fn per_segment_bound(&self, i: usize, xi: f64) -> f64 {
        let len = self.seg_len_raw(i) as f64 / FULL as f64;
        match self.segments[i] {
            Segment::Const { .. } => 0.0,
            Segment::Affine { left, right } => (right - left).abs() / len.powf(xi),
            Segment::Cusp {
                exponent, amplitude, ..
            } => {
                if exponent == xi {
                    amplitude
                } else {
                    amplitude * len.powf(exponent - xi)
                }
            }
        }
    }
}

struct Component {
    segs: Vec<usize>,
}

struct CompBound {
    bound: f64,
    sign: i8,
}
