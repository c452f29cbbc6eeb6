//! The system of partitions of T attached to an irrational rotation: at level
//! n the q_{n+1} rotates of a base arc of length d_n together with the q_n
//! rotates of the next base arc of length d_{n+1} tile the circle exactly.

use crate::arcs::{Arc, ArcSet};
use crate::cf::RotationNumber;
use crate::error::{Error, Result};
use crate::fixed::{mul_u128, Frac, FULL};
use num_traits::ToPrimitive;

pub const DEFAULT_ARC_BUDGET: u64 = 10_000_000;

/// Which of the two arc families an arc belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// The q_{n+1} arcs of length d_n (level n).
    Lower,
    /// The q_n arcs of length d_{n+1} (level n+1).
    Upper,
}

#[derive(Clone, Debug)]
pub struct TowerPartition {
    pub level: usize,
    pub alpha: Frac,
    pub q_n: u64,
    pub q_n1: u64,
    /// Base arc starts for levels n and n+1.
    pub base_n: Frac,
    pub base_n1: Frac,
    /// Arc lengths d_n and d_{n+1}, raw.
    pub d_n: u128,
    pub d_n1: u128,
    /// All arcs sorted by start for O(log) location.
    starts: Vec<u128>,
    tags: Vec<(Family, u32)>,
}

fn base_arc(alpha: Frac, q: u64, level_parity: usize) -> (Frac, u128) {
    let frac_qa = alpha.mul_int(q as u128);
    if level_parity % 2 == 0 {
        // [0, {q alpha})
        (Frac::ZERO, frac_qa.0)
    } else {
        // [{q alpha}, 1)
        (frac_qa, FULL - frac_qa.0)
    }
}

impl TowerPartition {
    pub fn build(alpha: &RotationNumber, level: usize) -> Result<TowerPartition> {
        Self::build_with_budget(alpha, level, DEFAULT_ARC_BUDGET)
    }

    pub fn build_with_budget(
        alpha: &RotationNumber,
        level: usize,
        budget: u64,
    ) -> Result<TowerPartition> {
        if level < 1 {
            return Err(Error::InvalidInput("partition level must be >= 1".into()));
        }
        let convs = alpha.convergents(level + 1)?;
        let q_n = convs[level - 1]
            .q
            .to_u64()
            .ok_or_else(|| Error::BudgetExceeded("q_n exceeds u64".into()))?;
        let q_n1 = convs[level]
            .q
            .to_u64()
            .ok_or_else(|| Error::BudgetExceeded("q_{n+1} exceeds u64".into()))?;
        if q_n1 as u128 + q_n as u128 > budget as u128 {
            return Err(Error::BudgetExceeded(format!(
                "partition at level {level} needs {} arcs (budget {budget})",
                q_n1 + q_n
            )));
        }
        let a = alpha.value;
        let (base_n, d_n) = base_arc(a, q_n, level);
        let (base_n1, d_n1) = base_arc(a, q_n1, level + 1);

        let total = (q_n1 + q_n) as usize;
        let mut entries: Vec<(u128, Family, u32)> = Vec::with_capacity(total);
        let mut cur = base_n;
        for j in 0..q_n1 {
            entries.push((cur.0, Family::Lower, j as u32));
            cur = cur.add(a);
        }
        let mut cur = base_n1;
        for j in 0..q_n {
            entries.push((cur.0, Family::Upper, j as u32));
            cur = cur.add(a);
        }
        entries.sort_unstable_by_key(|e| e.0);

        // Exact tiling check: consecutive arcs must meet end-to-start and the
        // last must wrap onto the first.  This certifies pairwise disjointness
        // and total measure 1 in one pass.
        for w in entries.windows(2) {
            let len = match w[0].1 {
                Family::Lower => d_n,
                Family::Upper => d_n1,
            };
            if (w[0].0 + len) & (FULL - 1) != w[1].0 {
                return Err(Error::PartitionGap);
            }
        }
        let last = entries.last().unwrap();
        let last_len = match last.1 {
            Family::Lower => d_n,
            Family::Upper => d_n1,
        };
        if (last.0 + last_len) & (FULL - 1) != entries[0].0 {
            return Err(Error::PartitionGap);
        }
        // d_n within [1/(2 q_{n+1}), 1/q_{n+1}]
        let lower_ok = mul_u128(d_n, 2 * q_n1 as u128) >= (0, FULL);
        let upper_ok = mul_u128(d_n, q_n1 as u128) <= (0, FULL);
        if !(lower_ok && upper_ok) {
            return Err(Error::PartitionGap);
        }

        let starts = entries.iter().map(|e| e.0).collect();
        let tags = entries.iter().map(|e| (e.1, e.2)).collect();
        Ok(TowerPartition {
            level,
            alpha: a,
            q_n,
            q_n1,
            base_n,
            base_n1,
            d_n,
            d_n1,
            starts,
            tags,
        })
    }

    pub fn arc_count(&self) -> usize {
        self.starts.len()
    }

    /// Total measure as raw fixed point: q_{n+1} d_n + q_n d_{n+1}.
    pub fn total_measure_raw(&self) -> (u128, u128) {
        let (h1, l1) = mul_u128(self.d_n, self.q_n1 as u128);
        let (h2, l2) = mul_u128(self.d_n1, self.q_n as u128);
        let (lo, carry) = l1.overflowing_add(l2);
        (h1 + h2 + carry as u128, lo)
    }

    /// The unique arc containing x.
    pub fn locate(&self, x: Frac) -> (Family, u32) {
        let idx = self.starts.partition_point(|&s| s <= x.0);
        let idx = if idx == 0 { self.starts.len() - 1 } else { idx - 1 };
        self.tags[idx]
    }

    pub fn arc(&self, family: Family, j: u32) -> Arc {
        match family {
            Family::Lower => Arc::new(self.base_n.add(self.alpha.mul_int(j as u128)), self.d_n),
            Family::Upper => Arc::new(self.base_n1.add(self.alpha.mul_int(j as u128)), self.d_n1),
        }
    }

    /// Even-truncated family sizes 2*floor(q/2) used by the plateau and
    /// Holder constructions.
    pub fn even_counts(&self) -> (u64, u64) {
        (self.q_n & !1, self.q_n1 & !1)
    }

    /// The full families as one ArcSet (for audits).
    pub fn as_arcset(&self) -> ArcSet {
        let mut arcs = Vec::with_capacity(self.arc_count());
        for (i, &s) in self.starts.iter().enumerate() {
            let len = match self.tags[i].0 {
                Family::Lower => self.d_n,
                Family::Upper => self.d_n1,
            };
            arcs.push(Arc::new(Frac::from_raw(s), len));
        }
        ArcSet::from_arcs(arcs)
    }
}
