//! Plateau construction: a continuous zero-mean function that equals +-eps on
//! trimmed tower arcs, so that S_m f(x) = +-m*eps exactly on a good set E
//! whose complement is covered by explicitly counted small intervals.

use crate::arcs::{Arc, ArcSet};
use crate::cf::RotationNumber;
use crate::error::{Error, Result};
use crate::fixed::{Frac, FULL};
use crate::gauge::GrowthGauge;
use crate::piecewise::{PiecewiseFn, Segment};
use crate::tower::{Family, TowerPartition};
use serde::{Deserialize, Serialize};

/// One class of the complement cover: `count` intervals of length `len`
/// (the proof's counting; `arcs` is the explicit geometry, possibly fewer).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverClass {
    pub label: String,
    pub len: Frac,
    pub count: u64,
    pub arcs: ArcSet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlateauSpec {
    pub alpha: String,
    pub level: usize,
    pub eps: f64,
    /// ramp width, raw fixed point
    pub eta: Frac,
    pub m: u64,
    pub q_even_n: u64,
    pub q_even_n1: u64,
    pub good_set: ArcSet,
    pub good_measure: f64,
    pub cover: Vec<CoverClass>,
}

/// Smallest m >= 1 with m*eps > c*psi(m); scans upward like the table gauges
/// require and refuses past the budget.
pub fn minimal_sum_length(eps: f64, c: f64, gauge: &GrowthGauge) -> Result<u64> {
    let cap = 100_000_000u64;
    let mut m = 1u64;
    while m <= cap {
        if m as f64 * eps > c * gauge.eval(m) {
            return Ok(m);
        }
        m += 1;
    }
    Err(Error::BudgetExceeded(
        "no m with m*eps > C*psi(m) within budget".into(),
    ))
}

pub fn build_plateau(
    alpha: &RotationNumber,
    level: usize,
    eps: f64,
    eta: f64,
    gauge: &GrowthGauge,
    c: f64,
) -> Result<(PiecewiseFn, PlateauSpec, u64)> {
    if !(0.0..=1.0).contains(&eps) || eps == 0.0 {
        return Err(Error::InvalidInput("need eps in (0, 1]".into()));
    }
    let m = minimal_sum_length(eps, c, gauge)?;
    let part = TowerPartition::build(alpha, level)?;
    let (q_even_n, q_even_n1) = part.even_counts();
    if 4 * m >= q_even_n.min(q_even_n1) {
        return Err(Error::LevelTooSmall {
            level,
            reason: format!(
                "need 2m < min(q~_n, q~_n+1)/2, got m = {m}, q~ = ({q_even_n}, {q_even_n1})"
            ),
        });
    }
    let eta_raw = (eta * FULL as f64) as u128;
    if eta_raw == 0 || 4 * eta_raw >= part.d_n1 {
        return Err(Error::InvalidInput(format!(
            "ramp width eta = {eta:.3e} must be in (0, d_(n+1)/4)"
        )));
    }
    let eta = Frac::from_raw(eta_raw);

    // Sign by index: first even half +eps, second even half -eps, leftovers 0.
    let arc_sign = |fam: Family, j: u32| -> f64 {
        let (q_even, _q) = match fam {
            Family::Lower => (q_even_n1, part.q_n1),
            Family::Upper => (q_even_n, part.q_n),
        };
        let j = j as u64;
        if j < q_even / 2 {
            eps
        } else if j < q_even {
            -eps
        } else {
            0.0
        }
    };

    let mut breakpoints: Vec<Frac> = Vec::with_capacity(3 * part.arc_count());
    let mut segments: Vec<Segment> = Vec::with_capacity(3 * part.arc_count());
    // Partition arcs in circle order keep the breakpoint list sorted.
    let arcset = part.as_arcset();
    for arc in arcset.arcs() {
        let (fam, j) = part.locate(arc.start);
        let v = arc_sign(fam, j);
        if v == 0.0 {
            breakpoints.push(arc.start);
            segments.push(Segment::Const { value: 0.0 });
        } else {
            let up_end = arc.start.add(eta);
            let down_start = arc.start.add(Frac::from_raw(arc.len - eta.0));
            breakpoints.push(arc.start);
            segments.push(Segment::Affine { left: 0.0, right: v });
            breakpoints.push(up_end);
            segments.push(Segment::Const { value: v });
            breakpoints.push(down_start);
            segments.push(Segment::Affine { left: v, right: 0.0 });
        }
    }
    let f = PiecewiseFn::new_symmetric_zero_mean(breakpoints, segments)?;

    // Good set: plateau parts of the kept arcs (each half loses its last m).
    let mut good_arcs: Vec<Arc> = Vec::new();
    let mut keep = |fam: Family, j: u64| {
        let arc = part.arc(fam, j as u32);
        good_arcs.push(Arc::new(arc.start.add(eta), arc.len - 2 * eta.0));
    };
    for j in 0..q_even_n1 / 2 - m {
        keep(Family::Lower, j);
    }
    for j in q_even_n1 / 2..q_even_n1 - m {
        keep(Family::Lower, j);
    }
    for j in 0..q_even_n / 2 - m {
        keep(Family::Upper, j);
    }
    for j in q_even_n / 2..q_even_n - m {
        keep(Family::Upper, j);
    }
    let good_set = ArcSet::from_arcs(good_arcs).normalize();

    // Complement cover, class by class as the proof counts it.
    let mut dropped_lower: Vec<Arc> = Vec::new();
    for j in (q_even_n1 / 2 - m..q_even_n1 / 2).chain(q_even_n1 - m..part.q_n1) {
        dropped_lower.push(part.arc(Family::Lower, j as u32));
    }
    let mut dropped_upper: Vec<Arc> = Vec::new();
    for j in (q_even_n / 2 - m..q_even_n / 2).chain(q_even_n - m..part.q_n) {
        dropped_upper.push(part.arc(Family::Upper, j as u32));
    }
    let mut ramps: Vec<Arc> = Vec::new();
    for j in 0..q_even_n1 {
        let a = part.arc(Family::Lower, j as u32);
        ramps.push(Arc::new(a.start, eta.0));
        ramps.push(Arc::new(a.start.add(Frac::from_raw(a.len - eta.0)), eta.0));
    }
    for j in 0..q_even_n {
        let a = part.arc(Family::Upper, j as u32);
        ramps.push(Arc::new(a.start, eta.0));
        ramps.push(Arc::new(a.start.add(Frac::from_raw(a.len - eta.0)), eta.0));
    }
    let cover = vec![
        CoverClass {
            label: "dropped level-n arcs".into(),
            len: Frac::from_raw(part.d_n),
            count: 2 * m + 2,
            arcs: ArcSet::from_arcs(dropped_lower).normalize(),
        },
        CoverClass {
            label: "dropped level-(n+1) arcs".into(),
            len: Frac::from_raw(part.d_n1),
            count: 2 * m + 2,
            arcs: ArcSet::from_arcs(dropped_upper).normalize(),
        },
        CoverClass {
            label: "ramps".into(),
            len: eta,
            count: 2 * (q_even_n1 + q_even_n),
            arcs: ArcSet::from_arcs(ramps).normalize(),
        },
    ];

    let spec = PlateauSpec {
        alpha: alpha.source.to_string(),
        level,
        eps,
        eta,
        m,
        q_even_n,
        q_even_n1,
        good_measure: good_set.measure(),
        good_set,
        cover,
    };
    Ok((f, spec, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birkhoff::birkhoff_sum;
    use crate::fixed::Precision;
    use rand::SeedableRng;

    fn golden() -> RotationNumber {
        RotationNumber::golden(Precision::default())
    }

    #[test]
    fn minimal_m_for_sqrt_gauge() {
        // 0.1 m > sqrt(m)  <=>  m > 100
        let g = GrowthGauge::power(0.5).unwrap();
        assert_eq!(minimal_sum_length(0.1, 1.0, &g).unwrap(), 101);
    }

    #[test]
    fn level_too_small_is_refused() {
        let g = GrowthGauge::power(0.5).unwrap();
        // q~_6 = 12 at level 5: nowhere near 4m = 404
        assert!(matches!(
            build_plateau(&golden(), 5, 0.1, 1e-9, &g, 1.0),
            Err(Error::LevelTooSmall { .. })
        ));
    }

    #[test]
    fn plateau_sums_are_exact_on_good_set() {
        let g = GrowthGauge::power(0.5).unwrap();
        let a = golden();
        // first level with 4m < min(q~): m = 101 needs min(q~) > 404:
        // q = (610, 987) at level 14
        let (f, spec, m) = build_plateau(&a, 14, 0.1, 1e-9, &g, 1.0).unwrap();
        assert_eq!(m, 101);
        assert_eq!((spec.q_even_n, spec.q_even_n1), (610, 986));
        assert!(spec.good_measure > 1.0 - 0.35, "measure {}", spec.good_measure);
        assert!(f.has_zero_mean_certificate());
        assert_eq!(f.sup_norm(), 0.1);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = spec.good_set.sample(&mut rng).unwrap();
            let s = birkhoff_sum(|y| f.eval(y), a.value, x, m);
            assert!(
                (s.abs() - m as f64 * 0.1).abs() < 1e-9 * m as f64,
                "S_m = {s} at x = {x:?}"
            );
        }
        // off the good set, on a ramp: |S_m| <= m*eps always
        let ramp_x = spec.cover[2].arcs.arcs()[0].start;
        let s = birkhoff_sum(|y| f.eval(y), a.value, ramp_x, m);
        assert!(s.abs() <= m as f64 * 0.1 + 1e-9);
    }

    #[test]
    fn cover_classes_blanket_the_complement() {
        let g = GrowthGauge::power(0.5).unwrap();
        let a = golden();
        let (_, spec, _) = build_plateau(&a, 14, 0.1, 1e-9, &g, 1.0).unwrap();
        let mut union = ArcSet::empty();
        for class in &spec.cover {
            union = union.union(&class.arcs);
        }
        let complement = spec.good_set.complement();
        assert!(union.contains_set(&complement), "cover misses part of E^c");
        // and the counted classes match the construction
        assert_eq!(spec.cover[2].count, 2 * (986 + 610));
        // measure(E) plus the declared cover lengths covers the circle
        let declared: f64 = spec
            .cover
            .iter()
            .map(|c| c.count as f64 * c.len.to_f64())
            .sum();
        assert!(spec.good_set.measure() + declared >= 1.0);
    }

    #[test]
    fn plateau_value_and_orbit_indices() {
        use crate::tower::TowerPartition;
        let g = GrowthGauge::power(0.5).unwrap();
        let a = golden();
        let (f, spec, m) = build_plateau(&a, 14, 0.1, 1e-9, &g, 1.0).unwrap();
        let part = TowerPartition::build(&a, 14).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
        for _ in 0..50 {
            let x = spec.good_set.sample(&mut rng).unwrap();
            // interior plateau point evaluates to exactly +-eps, and the
            // orbit predicted by locate keeps the same value for m steps
            let v = f.eval(x);
            assert!(v == 0.1 || v == -0.1, "plateau value {v}");
            let (fam0, j0) = part.locate(x);
            let mut pos = x;
            for i in 0..m {
                let (fam, j) = part.locate(pos);
                assert_eq!(fam, fam0);
                assert_eq!(j, j0 + i as u32, "orbit left its index track");
                assert_eq!(f.eval(pos), v);
                pos = pos.add(a.value);
            }
        }
    }

    #[test]
    fn growth_ratio_at_designed_length() {
        use crate::birkhoff::{birkhoff_series, growth_report};
        let g = GrowthGauge::power(0.5).unwrap();
        let a = golden();
        let (f, spec, m) = build_plateau(&a, 14, 0.1, 1e-9, &g, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let x = spec.good_set.sample(&mut rng).unwrap();
        let series = birkhoff_series(|y| f.eval(y), a.value, x, m, 1, Some(&g)).unwrap();
        let rep = growth_report(&series, &g).unwrap();
        // |S_m|/sqrt(m) = eps * m^(1/2) at the designed m
        let expected = 0.1 * (m as f64).sqrt();
        assert!(rep.max_ratio >= expected - 1e-9, "{} vs {}", rep.max_ratio, expected);
    }

    #[test]
    fn mean_is_certified_zero() {
        let g = GrowthGauge::power(0.5).unwrap();
        let (f, _, _) = build_plateau(&golden(), 14, 0.1, 1e-9, &g, 1.0).unwrap();
        assert_eq!(f.mean(), 0.0);
        // numeric cross-check of the certificate
        let mut num = 0.0;
        let n = 200_001u64;
        for i in 0..n {
            num += f.eval(Frac::from_ratio(i as u128, n as u128));
        }
        assert!((num / n as f64).abs() < 1e-3);
    }
}
