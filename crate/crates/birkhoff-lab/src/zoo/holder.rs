//! Holder-class construction: power cusps of exponent xi planted on tower
//! arcs, trimmed so that every point of the good set carries |S_m f| >= A m^nu
//! for the designed m, with the complement covered by four counted classes.
//!
//! The cusp amplitude is 2^(xi-1): adjacent bumps of opposite sign realize
//! Holder ratios up to 2^(1-xi) times the amplitude, so this normalization is
//! what makes the certified seminorm exactly 1.

use crate::arcs::{Arc, ArcSet};
use crate::cf::RotationNumber;
use crate::error::{Error, Result};
use crate::fixed::{Frac, FULL};
use crate::piecewise::{PiecewiseFn, Segment};
use crate::tower::{Family, TowerPartition};
use crate::zoo::plateau::CoverClass;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolderCase {
    /// Large type: only the level-n family carries cusps.
    One,
    /// Small type (bounded quotients live here): both families carry cusps.
    Two,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HolderSpec {
    pub alpha: String,
    pub xi: f64,
    pub nu: f64,
    pub nu_prime: f64,
    pub a_target: f64,
    pub s: f64,
    pub case: HolderCase,
    pub level: usize,
    pub tau_n: f64,
    pub amplitude: f64,
    pub delta0: f64,
    pub gamma0: f64,
    pub delta1: Option<f64>,
    pub gamma1: Option<f64>,
    /// designed sum lengths for the two families
    pub m0: u64,
    pub m1: Option<u64>,
    /// trim widths (raw) actually used for the good sets
    pub trim0: Frac,
    pub trim1: Option<Frac>,
    pub good_set_e0: ArcSet,
    pub good_set_e1: Option<ArcSet>,
    pub cover: Vec<CoverClass>,
    pub cover_pre_measure: f64,
}

impl HolderSpec {
    /// E = E_0 u E_1.
    pub fn good_set(&self) -> ArcSet {
        match &self.good_set_e1 {
            Some(e1) => self.good_set_e0.union(e1),
            None => self.good_set_e0.clone(),
        }
    }
}

pub struct HolderParams {
    pub xi: f64,
    pub nu: f64,
    /// target constant A in |S_m f| >= A m^nu
    pub a_target: f64,
    /// pre-measure exponent, must exceed sqrt(xi/(1-nu))
    pub s: f64,
    /// cover budget: the level search accepts the first n whose cover
    /// pre-measure at exponent s is below this
    pub eps_budget: f64,
    /// explicit nu' (defaults to the midpoint of its admissible interval)
    pub nu_prime: Option<f64>,
    /// force a case instead of selecting by the measured tau window
    pub case_override: Option<HolderCase>,
    /// start the level search here
    pub min_level: usize,
    pub max_level: usize,
}

impl Default for HolderParams {
    fn default() -> Self {
        HolderParams {
            xi: 0.25,
            nu: 0.25,
            a_target: 2.0,
            s: (0.25f64 / 0.75).sqrt() + 0.05,
            eps_budget: 16.0,
            nu_prime: None,
            case_override: None,
            min_level: 2,
            max_level: 40,
        }
    }
}

struct LevelPlan {
    level: usize,
    case: HolderCase,
    tau_n: f64,
    d_n: u128,
    d_n1: u128,
    m0: u64,
    m1: Option<u64>,
    trim0: u128,
    trim1: Option<u128>,
    delta1: Option<f64>,
    gamma1: Option<f64>,
    pre_measure: f64,
}

/// A random member of the unit Holder-xi ball built from cusp pairs: signs
/// shuffled in balanced pairs over the tower arcs of one level, so the mean
/// cancels exactly and the certified seminorm is amplitude * 2^(1-xi).
pub fn random_cusp_function(
    alpha: &RotationNumber,
    level: usize,
    xi: f64,
    seed: u64,
) -> Result<PiecewiseFn> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let part = TowerPartition::build(alpha, level)?;
    let (q_even_n, q_even_n1) = part.even_counts();
    let kappa = amplitude_for(xi);
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut signs_lower: Vec<i8> = (0..q_even_n1).map(|j| if j < q_even_n1 / 2 { 1 } else { -1 }).collect();
    let mut signs_upper: Vec<i8> = (0..q_even_n).map(|j| if j < q_even_n / 2 { 1 } else { -1 }).collect();
    signs_lower.shuffle(&mut rng);
    signs_upper.shuffle(&mut rng);
    let mut breakpoints = Vec::with_capacity(2 * part.arc_count());
    let mut segments = Vec::with_capacity(2 * part.arc_count());
    for arc in part.as_arcset().arcs() {
        let (fam, j) = part.locate(arc.start);
        let sign = match fam {
            Family::Lower if (j as u64) < q_even_n1 => signs_lower[j as usize],
            Family::Upper if (j as u64) < q_even_n => signs_upper[j as usize],
            _ => 0,
        };
        if sign == 0 {
            breakpoints.push(arc.start);
            segments.push(Segment::Const { value: 0.0 });
        } else {
            let mid = arc.start.add(Frac::from_raw(arc.len / 2));
            let end = arc.start.add(Frac::from_raw(arc.len));
            breakpoints.push(arc.start);
            segments.push(Segment::Cusp { anchor: arc.start, sign, exponent: xi, amplitude: kappa });
            breakpoints.push(mid);
            segments.push(Segment::Cusp { anchor: end, sign, exponent: xi, amplitude: kappa });
        }
    }
    PiecewiseFn::new_symmetric_zero_mean(breakpoints, segments)
}

/// Amplitude kappa with kappa * 2^(1-xi) <= 1 guaranteed in floating point.
fn amplitude_for(xi: f64) -> f64 {
    let cross = (2.0f64).powf(1.0 - xi);
    let mut amp = 1.0 / cross;
    while amp * cross > 1.0 {
        amp = f64::from_bits(amp.to_bits() - 1);
    }
    amp
}

/// Trim width making m * kappa * w^xi >= A m^nu hold pointwise, as raw units
/// (capped at the full circle: the caller rejects such levels anyway).
fn guarantee_trim(a_target: f64, kappa: f64, m: u64, nu: f64, xi: f64) -> u128 {
    let w = (a_target / (kappa * (m as f64).powf(1.0 - nu))).powf(1.0 / xi);
    // widen by a hair so pow rounding can't break the >= direction
    let w = (w * (1.0 + 1e-9)).min(1.0);
    ((w * FULL as f64).ceil() as u128).min(FULL)
}

pub fn build_holder(
    alpha: &RotationNumber,
    params: &HolderParams,
) -> Result<(PiecewiseFn, HolderSpec)> {
    let (xi, nu, s) = (params.xi, params.nu, params.s);
    if !(0.0 < xi && xi < 1.0 && 0.0 < nu && nu < 1.0 && nu + xi < 1.0) {
        return Err(Error::InvalidInput(
            "need xi, nu in (0,1) with nu + xi < 1".into(),
        ));
    }
    let s_floor = (xi / (1.0 - nu)).sqrt();
    if !(s > s_floor && s <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "need sqrt(xi/(1-nu)) = {s_floor:.5} < s <= 1"
        )));
    }
    // nu' in (nu, 1 - xi/s^2), also below 1 - xi
    let nu_prime_max = (1.0 - xi / (s * s)).min(1.0 - xi);
    if nu_prime_max <= nu {
        return Err(Error::InvalidInput(
            "admissible nu' interval is empty; raise s".into(),
        ));
    }
    let nu_prime = params.nu_prime.unwrap_or(0.5 * (nu + nu_prime_max));
    if !(nu < nu_prime && nu_prime < nu_prime_max + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "nu' = {nu_prime} outside its admissible interval ({nu}, {nu_prime_max})"
        )));
    }
    let delta0 = (xi / (1.0 - nu_prime)).sqrt();
    let gamma0 = 1.0 / delta0;
    let kappa = amplitude_for(xi);

    // Case selection by the trailing tau window, unless overridden.
    let tau_threshold = ((1.0 - nu) / xi).sqrt();
    let convs = alpha.convergents(params.max_level + 2)?;
    let taus: Vec<f64> = {
        let te = alpha.type_exponents(params.max_level + 2, 5)?;
        te.entries.iter().map(|&(_, t)| t).collect()
    };
    let tau_window_estimate = taus
        .iter()
        .rev()
        .take(5)
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let case = params.case_override.unwrap_or(if tau_window_estimate >= tau_threshold {
        HolderCase::One
    } else {
        HolderCase::Two
    });

    let tau_prime_threshold = ((1.0 - nu_prime) / xi).sqrt();
    let mut plan: Option<LevelPlan> = None;
    for level in params.min_level.max(2)..=params.max_level {
        if level + 2 > convs.len() {
            break;
        }
        let q_n = match convs[level - 1].q.to_u64() {
            Some(q) => q,
            None => break,
        };
        let q_n1 = match convs[level].q.to_u64() {
            Some(q) => q,
            None => break,
        };
        if q_n1 + q_n > crate::tower::DEFAULT_ARC_BUDGET {
            break;
        }
        let tau_n = crate::cf::ln_big(&convs[level + 1].q) / crate::cf::ln_big(&convs[level - 1].q);
        let d_n = convs[level - 1].err_scaled.magnitude().to_u128().unwrap();
        let d_n1 = convs[level].err_scaled.magnitude().to_u128().unwrap();
        let q_even_n = q_n & !1;
        let q_even_n1 = q_n1 & !1;

        let m0 = (q_n1 as f64).powf(delta0).floor() as u64;
        if m0 < 1 || 2 * m0 + 2 >= q_even_n1 {
            continue;
        }
        let paper_trim0 = ((d_n as f64 / FULL as f64).powf(gamma0) * FULL as f64).ceil() as u128;
        let trim0 = paper_trim0.max(guarantee_trim(params.a_target, kappa, m0, nu, xi));
        if trim0 >= d_n / 4 {
            continue; // trimmed plateau would be empty or cross the peak
        }

        let (m1, trim1, delta1, gamma1) = match case {
            HolderCase::One => (None, None, None, None),
            HolderCase::Two => {
                if tau_n >= tau_prime_threshold {
                    continue; // need tau_n < sqrt((1-nu')/xi) at the level
                }
                let delta1 = tau_n.sqrt() * delta0;
                let gamma1 = 1.0 / delta1;
                let m1 = (q_n as f64).powf(delta1).floor() as u64;
                if m1 < 1 || 2 * m1 + 2 >= q_even_n {
                    continue;
                }
                let paper_trim1 =
                    ((d_n1 as f64 / FULL as f64).powf(gamma1) * FULL as f64).ceil() as u128;
                let trim1 = paper_trim1.max(guarantee_trim(params.a_target, kappa, m1, nu, xi));
                if trim1 >= d_n1 / 4 {
                    continue;
                }
                (Some(m1), Some(trim1), Some(delta1), Some(gamma1))
            }
        };

        // Cover pre-measure with the proof's class counts.
        let to_unit = |raw: u128| raw as f64 / FULL as f64;
        let mut pre = (2 * m0 + 2) as f64 * to_unit(d_n).powf(s)
            + 2.0 * q_n1 as f64 * to_unit(trim0).powf(s);
        match case {
            HolderCase::One => {
                pre += q_n as f64 * to_unit(d_n1).powf(s);
            }
            HolderCase::Two => {
                pre += (2 * m1.unwrap() + 2) as f64 * to_unit(d_n1).powf(s)
                    + 2.0 * q_n as f64 * to_unit(trim1.unwrap()).powf(s);
            }
        }
        if pre < params.eps_budget {
            plan = Some(LevelPlan {
                level,
                case,
                tau_n,
                d_n,
                d_n1,
                m0,
                m1,
                trim0,
                trim1,
                delta1,
                gamma1,
                pre_measure: pre,
            });
            break;
        }
    }
    let plan = plan.ok_or_else(|| Error::CaseSearchExhausted {
        n_max: params.max_level,
        tau_window: taus.iter().rev().take(5).copied().collect(),
    })?;

    build_from_plan(alpha, params, plan, nu_prime, delta0, gamma0, kappa)
}

fn build_from_plan(
    alpha: &RotationNumber,
    params: &HolderParams,
    plan: LevelPlan,
    nu_prime: f64,
    delta0: f64,
    gamma0: f64,
    kappa: f64,
) -> Result<(PiecewiseFn, HolderSpec)> {
    let part = TowerPartition::build(alpha, plan.level)?;
    debug_assert_eq!(part.d_n, plan.d_n);
    debug_assert_eq!(part.d_n1, plan.d_n1);
    let (q_even_n, q_even_n1) = part.even_counts();
    let xi = params.xi;

    // cusp sign per arc; zero on leftovers and (case one) the upper family
    let arc_sign = |fam: Family, j: u32| -> i8 {
        let j = j as u64;
        match fam {
            Family::Lower => {
                if j < q_even_n1 / 2 {
                    1
                } else if j < q_even_n1 {
                    -1
                } else {
                    0
                }
            }
            Family::Upper => match plan.case {
                HolderCase::One => 0,
                HolderCase::Two => {
                    if j < q_even_n / 2 {
                        1
                    } else if j < q_even_n {
                        -1
                    } else {
                        0
                    }
                }
            },
        }
    };

    let mut breakpoints: Vec<Frac> = Vec::with_capacity(2 * part.arc_count());
    let mut segments: Vec<Segment> = Vec::with_capacity(2 * part.arc_count());
    for arc in part.as_arcset().arcs() {
        let (fam, j) = part.locate(arc.start);
        let sign = arc_sign(fam, j);
        if sign == 0 {
            breakpoints.push(arc.start);
            segments.push(Segment::Const { value: 0.0 });
        } else {
            let mid = arc.start.add(Frac::from_raw(arc.len / 2));
            let end = arc.start.add(Frac::from_raw(arc.len));
            breakpoints.push(arc.start);
            segments.push(Segment::Cusp {
                anchor: arc.start,
                sign,
                exponent: xi,
                amplitude: kappa,
            });
            breakpoints.push(mid);
            segments.push(Segment::Cusp {
                anchor: end,
                sign,
                exponent: xi,
                amplitude: kappa,
            });
        }
    }
    let f = PiecewiseFn::new_symmetric_zero_mean(breakpoints, segments)?;

    // Good sets: trimmed arcs whose forward orbit of the designed length stays
    // inside the same sign block.
    let trimmed = |fam: Family, j: u64, trim: u128| {
        let a = part.arc(fam, j as u32);
        Arc::new(a.start.add(Frac::from_raw(trim)), a.len - 2 * trim)
    };
    let mut e0: Vec<Arc> = Vec::new();
    for j in 0..q_even_n1 / 2 - plan.m0 {
        e0.push(trimmed(Family::Lower, j, plan.trim0));
    }
    for j in q_even_n1 / 2..q_even_n1 - plan.m0 {
        e0.push(trimmed(Family::Lower, j, plan.trim0));
    }
    let good_set_e0 = ArcSet::from_arcs(e0).normalize();
    let good_set_e1 = plan.m1.map(|m1| {
        let trim1 = plan.trim1.unwrap();
        let mut e1: Vec<Arc> = Vec::new();
        for j in 0..q_even_n / 2 - m1 {
            e1.push(trimmed(Family::Upper, j, trim1));
        }
        for j in q_even_n / 2..q_even_n - m1 {
            e1.push(trimmed(Family::Upper, j, trim1));
        }
        ArcSet::from_arcs(e1).normalize()
    });

    // Cover classes: whole dropped arcs, per-arc trim margins, and in case
    // one the entire next family.
    let mut dropped0: Vec<Arc> = Vec::new();
    for j in (q_even_n1 / 2 - plan.m0..q_even_n1 / 2).chain(q_even_n1 - plan.m0..part.q_n1) {
        dropped0.push(part.arc(Family::Lower, j as u32));
    }
    let mut trims0: Vec<Arc> = Vec::new();
    for j in 0..q_even_n1 {
        let a = part.arc(Family::Lower, j as u32);
        trims0.push(Arc::new(a.start, plan.trim0));
        trims0.push(Arc::new(a.start.add(Frac::from_raw(a.len - plan.trim0)), plan.trim0));
    }
    let mut cover = vec![
        CoverClass {
            label: "dropped level-n arcs".into(),
            len: Frac::from_raw(part.d_n),
            count: 2 * plan.m0 + 2,
            arcs: ArcSet::from_arcs(dropped0).normalize(),
        },
        CoverClass {
            label: "level-n trim margins".into(),
            len: Frac::from_raw(plan.trim0),
            count: 2 * part.q_n1,
            arcs: ArcSet::from_arcs(trims0).normalize(),
        },
    ];
    match plan.case {
        HolderCase::One => {
            let all_upper: Vec<Arc> = (0..part.q_n)
                .map(|j| part.arc(Family::Upper, j as u32))
                .collect();
            cover.push(CoverClass {
                label: "entire level-(n+1) family".into(),
                len: Frac::from_raw(part.d_n1),
                count: part.q_n,
                arcs: ArcSet::from_arcs(all_upper).normalize(),
            });
        }
        HolderCase::Two => {
            let m1 = plan.m1.unwrap();
            let trim1 = plan.trim1.unwrap();
            let mut dropped1: Vec<Arc> = Vec::new();
            for j in (q_even_n / 2 - m1..q_even_n / 2).chain(q_even_n - m1..part.q_n) {
                dropped1.push(part.arc(Family::Upper, j as u32));
            }
            let mut trims1: Vec<Arc> = Vec::new();
            for j in 0..q_even_n {
                let a = part.arc(Family::Upper, j as u32);
                trims1.push(Arc::new(a.start, trim1));
                trims1.push(Arc::new(a.start.add(Frac::from_raw(a.len - trim1)), trim1));
            }
            cover.push(CoverClass {
                label: "dropped level-(n+1) arcs".into(),
                len: Frac::from_raw(part.d_n1),
                count: 2 * m1 + 2,
                arcs: ArcSet::from_arcs(dropped1).normalize(),
            });
            cover.push(CoverClass {
                label: "level-(n+1) trim margins".into(),
                len: Frac::from_raw(trim1),
                count: 2 * part.q_n,
                arcs: ArcSet::from_arcs(trims1).normalize(),
            });
        }
    }

    let spec = HolderSpec {
        alpha: alpha.source.to_string(),
        xi,
        nu: params.nu,
        nu_prime,
        a_target: params.a_target,
        s: params.s,
        case: plan.case,
        level: plan.level,
        tau_n: plan.tau_n,
        amplitude: kappa,
        delta0,
        gamma0,
        delta1: plan.delta1,
        gamma1: plan.gamma1,
        m0: plan.m0,
        m1: plan.m1,
        trim0: Frac::from_raw(plan.trim0),
        trim1: plan.trim1.map(Frac::from_raw),
        good_set_e0,
        good_set_e1,
        cover,
        cover_pre_measure: plan.pre_measure,
    };
    Ok((f, spec))
}
