//! Hausdorff pre-measures of explicit interval covers, audits of the
//! constructions' complement covers, and a box-counting sampler for
//! finite-horizon slow sets.
//!
//! Pre-measures of explicit covers are upper bounds for the covered set's
//! H^s_delta and that is all we ever claim; the box-counting estimate is a
//! labeled heuristic, not a Hausdorff dimension.

use crate::arcs::ArcSet;
use crate::birkhoff::least_squares;
use crate::error::{Error, Result};
use crate::fixed::{Frac, FULL};
use crate::gauge::GrowthGauge;
use crate::zoo::plateau::CoverClass;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cover {
    /// interval lengths (unit circle scale)
    pub lengths: Vec<f64>,
    /// mesh: every length must stay below it
    pub delta: f64,
}

/// sum |I_i|^s, an upper bound for H^s_delta of the covered set.
pub fn pre_measure(cover: &Cover, s: f64) -> Result<f64> {
    if !(0.0 < s && s <= 1.0) {
        return Err(Error::InvalidInput("need s in (0, 1]".into()));
    }
    for &len in &cover.lengths {
        if len > cover.delta {
            return Err(Error::MeshViolation {
                len,
                mesh: cover.delta,
            });
        }
        if len <= 0.0 {
            return Err(Error::InvalidInput("cover lengths must be positive".into()));
        }
    }
    Ok(cover.lengths.iter().map(|l| l.powf(s)).sum())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditClassReport {
    pub label: String,
    pub declared_count: u64,
    pub actual_arcs: u64,
    pub len: f64,
    pub contribution: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverAudit {
    pub classes: Vec<AuditClassReport>,
    pub pre_measure: f64,
    pub budget: f64,
    pub s: f64,
    pub delta: f64,
    pub pass: bool,
}

/// Check a construction's complement cover class by class: the declared
/// counts must dominate the stored geometry, the class arcs must blanket the
/// complement of the good set exactly, every class length must respect the
/// mesh, and the counted pre-measure must beat the budget.
pub fn construction_cover_audit(
    good_set: &ArcSet,
    cover: &[CoverClass],
    s: f64,
    delta: f64,
    budget: f64,
) -> Result<CoverAudit> {
    if !(0.0 < s && s <= 1.0) {
        return Err(Error::InvalidInput("need s in (0, 1]".into()));
    }
    let mut union = ArcSet::empty();
    let mut classes = Vec::with_capacity(cover.len());
    let mut total = 0.0f64;
    for class in cover {
        let len = class.len.to_f64();
        if len > delta {
            return Err(Error::MeshViolation { len, mesh: delta });
        }
        // the declared count must pay for the stored geometry, exactly
        let lhs = num_bigint::BigUint::from(class.arcs.measure_raw());
        let rhs = num_bigint::BigUint::from(class.len.0) * class.count;
        if lhs > rhs {
            return Err(Error::CoverMismatch(format!(
                "class '{}' stores more measure than its declared count covers",
                class.label
            )));
        }
        union = union.union(&class.arcs);
        let contribution = class.count as f64 * len.powf(s);
        total += contribution;
        classes.push(AuditClassReport {
            label: class.label.clone(),
            declared_count: class.count,
            actual_arcs: class.arcs.arcs().len() as u64,
            len,
            contribution,
        });
    }
    let complement = good_set.complement();
    if !union.contains_set(&complement) {
        let missed = complement.intersect(&union.complement());
        return Err(Error::CoverMismatch(format!(
            "cover misses {:.3e} of the complement",
            missed.measure()
        )));
    }
    Ok(CoverAudit {
        classes,
        pre_measure: total,
        budget,
        s,
        delta,
        pass: total < budget,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlowSetReport {
    pub grid: u64,
    pub slow_cells: u64,
    pub slow_fraction: f64,
    /// slow-cell proxy as arcs (merged runs of slow cells)
    pub proxy: ArcSet,
    /// least-squares slope of log2(box count) against scale index j,
    /// None when the slow set came up empty
    pub dimension_estimate: Option<f64>,
    pub fit_residual: f64,
    pub scales: (u32, u32),
}

/// Flag grid cells whose finite-horizon growth ratio stays below B, then
/// box-count the flagged set across dyadic scales.
#[allow(clippy::too_many_arguments)]
pub fn slow_set_sample(
    f: impl Fn(Frac) -> f64 + Sync,
    alpha: Frac,
    gauge: &GrowthGauge,
    threshold: f64,
    m: u64,
    n: u64,
    grid_log2: u32,
    scale_range: Option<(u32, u32)>,
) -> Result<SlowSetReport> {
    if grid_log2 > 24 {
        return Err(Error::BudgetExceeded("grid beyond 2^24".into()));
    }
    if n > 1_000_000 || m == 0 || m > n {
        return Err(Error::BudgetExceeded("need 1 <= M <= N <= 10^6".into()));
    }
    let grid: u64 = 1 << grid_log2;
    let flags: Vec<bool> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let x = Frac::from_raw(((i as u128) << (127 - grid_log2)) + (1 << (126 - grid_log2)));
            let mut pos = x;
            let mut sum = 0.0f64;
            let mut worst = 0.0f64;
            for step in 1..=n {
                sum += f(pos);
                pos = pos.add(alpha);
                if step >= m {
                    worst = worst.max(sum.abs() / gauge.eval(step));
                }
            }
            worst <= threshold
        })
        .collect();
    let slow_cells = flags.iter().filter(|&&b| b).count() as u64;
    // merge runs of slow cells into arcs
    let mut proxy_arcs = Vec::new();
    let cell = FULL >> grid_log2;
    let mut run_start: Option<u64> = None;
    for i in 0..=grid {
        let on = i < grid && flags[i as usize];
        match (on, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                proxy_arcs.push(crate::arcs::Arc::new(
                    Frac::from_raw((s as u128) << (127 - grid_log2)),
                    (i - s) as u128 * cell,
                ));
                run_start = None;
            }
            _ => {}
        }
    }
    let proxy = ArcSet::from_arcs(proxy_arcs).normalize();

    let (j_lo, j_hi) = scale_range.unwrap_or((6, grid_log2.min(16)));
    let (j_lo, j_hi) = (j_lo.min(grid_log2), j_hi.min(grid_log2));
    let dimension_estimate;
    let mut fit_residual = 0.0;
    if slow_cells == 0 {
        dimension_estimate = None;
    } else {
        let mut pts = Vec::new();
        for j in j_lo..=j_hi {
            // a box at scale 2^-j counts if it contains a slow fine cell
            let shift = grid_log2 - j;
            let mut count = 0u64;
            let mut current: i64 = -1;
            for (i, &s) in flags.iter().enumerate() {
                if s {
                    let box_idx = (i >> shift) as i64;
                    if box_idx != current {
                        count += 1;
                        current = box_idx;
                    }
                }
            }
            pts.push((j as f64, (count as f64).log2()));
        }
        let (slope, _, resid) = least_squares(&pts);
        dimension_estimate = Some(slope);
        fit_residual = resid;
    }
    Ok(SlowSetReport {
        grid,
        slow_cells,
        slow_fraction: slow_cells as f64 / grid as f64,
        proxy,
        dimension_estimate,
        fit_residual,
        scales: (j_lo, j_hi),
    })
}
