//! Arcs and finite unions of arcs on the circle, exact at 127 bits.
//!
//! Arcs are half-open [start, start+len) so that rotated families tile the
//! circle with no double-counted endpooints; a length of 2^127 is all of T.

use crate::fixed::{Frac, FULL};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub start: Frac,
    /// Raw length in units of 2^-127, in (0, 2^127].
    pub len: u128,
}

// Lengths are fixed-point values; serialize them as hex like circle points.
impl Serialize for Arc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Arc", 2)?;
        st.serialize_field("start", &self.start)?;
        st.serialize_field("len", &format!("{:033x}", self.len))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Arc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            start: Frac,
            len: String,
        }
        let raw = Raw::deserialize(d)?;
        let len = u128::from_str_radix(&raw.len, 16)
            .map_err(|_| serde::de::Error::custom("bad hex arc length"))?;
        if len == 0 || len > FULL {
            return Err(serde::de::Error::custom("arc length out of range"));
        }
        Ok(Arc {
            start: raw.start,
            len,
        })
    }
}

impl Arc {
    pub fn new(start: Frac, len: u128) -> Arc {
        assert!(len > 0 && len <= FULL, "arc length must be in (0, 1]");
        Arc { start, len }
    }

    pub fn from_f64(start: f64, len: f64) -> Arc {
        Arc::new(
            Frac::from_f64(start),
            ((len * FULL as f64).round() as u128).clamp(1, FULL),
        )
    }

    pub fn end(&self) -> Frac {
        self.start.add(Frac::from_raw(self.len & (FULL - 1)))
    }

    pub fn contains(&self, x: Frac) -> bool {
        if self.len == FULL {
            return true;
        }
        x.sub(self.start).0 < self.len
    }

    pub fn len_f64(&self) -> f64 {
        self.len as f64 / FULL as f64
    }

    /// Does the arc wrap through 0?
    fn wraps(&self) -> bool {
        self.len < FULL && self.start.0 + self.len > FULL
    }
}

/// A finite union of arcs.  In normalized form the arcs are pairwise disjoint,
/// non-touching, sorted by start, and none wraps through 0 except possibly by
/// being the full circle.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ArcSet {
    arcs: Vec<Arc>,
    normalized: bool,
}

impl ArcSet {
    pub fn empty() -> ArcSet {
        ArcSet {
            arcs: Vec::new(),
            normalized: true,
        }
    }

    pub fn full() -> ArcSet {
        ArcSet {
            arcs: vec![Arc::new(Frac::ZERO, FULL)],
            normalized: true,
        }
    }

    pub fn from_arcs(arcs: Vec<Arc>) -> ArcSet {
        ArcSet {
            arcs,
            normalized: false,
        }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn push(&mut self, arc: Arc) {
        self.arcs.push(arc);
        self.normalized = false;
    }

    /// Canonical form: split wrapping arcs, sort, merge overlaps and touches.
    pub fn normalize(&self) -> ArcSet {
        if self.normalized {
            return self.clone();
        }
        let mut pieces: Vec<(u128, u128)> = Vec::with_capacity(self.arcs.len() + 1);
        for a in &self.arcs {
            if a.len >= FULL {
                return ArcSet::full();
            }
            if a.wraps() {
                pieces.push((a.start.0, FULL));
                pieces.push((0, a.start.0 + a.len - FULL));
            } else {
                pieces.push((a.start.0, a.start.0 + a.len));
            }
        }
        pieces.sort_unstable();
        let mut merged: Vec<(u128, u128)> = Vec::with_capacity(pieces.len());
        for (s, e) in pieces {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        // join across 0 if the first piece starts at 0 and the last ends at 1
        if merged.len() > 1 {
            let touches_wrap = merged[0].0 == 0 && merged.last().unwrap().1 == FULL;
            if touches_wrap {
                let first = merged.remove(0);
                let last = merged.last_mut().unwrap();
                // becomes a wrapping arc [last.0, first.1 + FULL)
                if last.1 - last.0 + first.1 >= FULL {
                    return ArcSet::full();
                }
                let start = last.0;
                let len = FULL - last.0 + first.1;
                merged.pop();
                let mut arcs: Vec<Arc> = merged
                    .into_iter()
                    .map(|(s, e)| Arc::new(Frac::from_raw(s), e - s))
                    .collect();
                arcs.push(Arc::new(Frac::from_raw(start), len));
                return ArcSet {
                    arcs,
                    normalized: true,
                };
            }
        }
        if merged.len() == 1 && merged[0] == (0, FULL) {
            return ArcSet::full();
        }
        ArcSet {
            arcs: merged
                .into_iter()
                .map(|(s, e)| Arc::new(Frac::from_raw(s), e - s))
                .collect(),
            normalized: true,
        }
    }

    /// Total measure in units of 2^-127 (exact).
    pub fn measure_raw(&self) -> u128 {
        let n = self.normalize();
        n.arcs.iter().map(|a| a.len).sum()
    }

    pub fn measure(&self) -> f64 {
        self.measure_raw() as f64 / FULL as f64
    }

    pub fn complement(&self) -> ArcSet {
        let n = self.normalize();
        if n.arcs.is_empty() {
            return ArcSet::full();
        }
        if n.arcs.len() == 1 && n.arcs[0].len == FULL {
            return ArcSet::empty();
        }
        // The normalized set has at most one wrapping arc, stored last.
        let mut out = Vec::with_capacity(n.arcs.len());
        for w in n.arcs.windows(2) {
            let gap_start = w[0].end();
            let gap_len = w[1].start.sub(gap_start).0;
            if gap_len > 0 {
                out.push(Arc::new(gap_start, gap_len));
            }
        }
        let last = n.arcs.last().unwrap();
        let first = n.arcs.first().unwrap();
        let gap_start = last.end();
        let gap_len = first.start.sub(gap_start).0;
        if gap_len > 0 {
            out.push(Arc::new(gap_start, gap_len));
        }
        ArcSet::from_arcs(out).normalize()
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let a = self.normalize().unwrapped_spans();
        let b = other.normalize().unwrapped_spans();
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo < hi {
                out.push(Arc::new(Frac::from_raw(lo & (FULL - 1)), hi - lo));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        ArcSet::from_arcs(out).normalize()
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(&other.arcs);
        ArcSet::from_arcs(arcs).normalize()
    }

    /// Is `other` contained in `self` (as a set)?
    pub fn contains_set(&self, other: &ArcSet) -> bool {
        other.intersect(&self.complement()).measure_raw() == 0
    }

    pub fn contains(&self, x: Frac) -> bool {
        if self.normalized && self.arcs.len() > 8 {
            // arcs are sorted and disjoint; at most the predecessor (or the
            // trailing wrap-around arc) can contain x
            let idx = self.arcs.partition_point(|a| a.start <= x);
            if idx > 0 && self.arcs[idx - 1].contains(x) {
                return true;
            }
            return self.arcs.last().is_some_and(|a| a.contains(x));
        }
        self.arcs.iter().any(|a| a.contains(x))
    }

    /// Non-wrapping [lo, hi) spans on [0, 2*FULL); the wrapping arc, if any,
    /// is split so interval logic stays linear.
    fn unwrapped_spans(&self) -> Vec<(u128, u128)> {
        let mut spans = Vec::with_capacity(self.arcs.len() + 1);
        for a in &self.arcs {
            if a.len == FULL {
                return vec![(0, FULL)];
            }
            if a.wraps() {
                spans.push((a.start.0, FULL));
                spans.push((0, a.start.0 + a.len - FULL));
            } else {
                spans.push((a.start.0, a.start.0 + a.len));
            }
        }
        spans.sort_unstable();
        spans
    }

    /// Draw a uniform point of the set (by exact measure weighting).
    pub fn sample(&self, rng: &mut impl rand::Rng) -> Option<Frac> {
        let n = self.normalize();
        let total = n.measure_raw();
        if total == 0 {
            return None;
        }
        let mut r: u128 = rng.gen_range(0..total);
        for a in &n.arcs {
            if r < a.len {
                return Some(a.start.add(Frac::from_raw(r)));
            }
            r -= a.len;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(parts: &[(f64, f64)]) -> ArcSet {
        ArcSet::from_arcs(parts.iter().map(|&(s, l)| Arc::from_f64(s, l)).collect())
    }

    #[test]
    fn complement_of_quarter() {
        let s = set(&[(0.0, 0.25)]).normalize();
        let c = s.complement();
        assert_eq!(c.arcs().len(), 1);
        assert!((c.arcs()[0].start.to_f64() - 0.25).abs() < 1e-12);
        assert!((c.measure() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn intersect_half_open() {
        let a = set(&[(0.0, 0.5)]);
        let b = set(&[(0.25, 0.5)]);
        let i = a.intersect(&b);
        assert_eq!(i.arcs().len(), 1);
        assert!((i.arcs()[0].start.to_f64() - 0.25).abs() < 1e-12);
        assert!((i.measure() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn wraparound_merge() {
        // [0.9, 1) u [0, 0.2) overlapping [0.1, 0.3): total measure 0.4
        let s = set(&[(0.9, 0.3), (0.1, 0.2)]);
        let n = s.normalize();
        assert!((n.measure() - 0.4).abs() < 1e-12);
        assert_eq!(n.arcs().len(), 1, "merges into one wrapping arc");
        // interval-merge oracle on a fine grid
        let grid = 10_000u32;
        let brute = (0..grid)
            .filter(|&i| {
                let x = (i as f64 + 0.5) / grid as f64;
                (0.9..1.0).contains(&x) || (0.0..0.2).contains(&x) || (0.1..0.3).contains(&x)
            })
            .count();
        assert!((n.measure() - brute as f64 / grid as f64).abs() < 1e-3);
    }

    #[test]
    fn full_and_empty() {
        assert_eq!(ArcSet::full().measure_raw(), FULL);
        assert_eq!(ArcSet::full().complement().measure_raw(), 0);
        assert_eq!(ArcSet::empty().complement().measure_raw(), FULL);
    }

    proptest! {
        #[test]
        fn measure_plus_complement_is_one(
            parts in proptest::collection::vec((0u64..u64::MAX, 1u64..u64::MAX), 0..12)
        ) {
            let arcs: Vec<Arc> = parts
                .iter()
                .map(|&(s, l)| Arc::new(
                    Frac::from_raw((s as u128) << 63),
                    ((l as u128) << 40).clamp(1, FULL),
                ))
                .collect();
            let s = ArcSet::from_arcs(arcs);
            let m = s.measure_raw();
            let c = s.complement().measure_raw();
            prop_assert_eq!(m + c, FULL);
        }

        #[test]
        fn complement_is_involutive(
            parts in proptest::collection::vec((0u64..u64::MAX, 1u64..u64::MAX), 0..12)
        ) {
            let arcs: Vec<Arc> = parts
                .iter()
                .map(|&(s, l)| Arc::new(
                    Frac::from_raw((s as u128) << 63),
                    ((l as u128) << 40).clamp(1, FULL),
                ))
                .collect();
            let s = ArcSet::from_arcs(arcs).normalize();
            let cc = s.complement().complement();
            prop_assert_eq!(s.arcs(), cc.arcs());
        }

        #[test]
        fn sampled_points_belong(
            parts in proptest::collection::vec((0u64..u64::MAX, 1u64..u64::MAX), 1..8),
            seed in 0u64..u64::MAX
        ) {
            use rand::SeedableRng;
            let arcs: Vec<Arc> = parts
                .iter()
                .map(|&(s, l)| Arc::new(
                    Frac::from_raw((s as u128) << 63),
                    ((l as u128) << 40).clamp(1, FULL),
                ))
                .collect();
            let s = ArcSet::from_arcs(arcs).normalize();
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            if let Some(x) = s.sample(&mut rng) {
                prop_assert!(s.contains(x));
            }
        }
    }
}
