//! Exact counting of orbit hits {i*alpha} in circle windows.
//!
//! With alpha stored as an exact rational F/2^127, questions like
//! "how many i < N land in [u, v)?" reduce to lattice-point sums
//! sum_i floor((F*i + b) / 2^127), which a Euclid-style recursion answers in
//! O(log) big-integer steps.  This is what lets the deep stages of the
//! non-coboundary construction (index ranges around 10^24) be counted exactly
//! instead of enumerated.

use crate::fixed::{Frac, FULL};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// sum_{i=0}^{n-1} floor((a*i + b) / m) for m > 0, n >= 0, any-sign a and b.
pub fn floor_sum(n: &BigInt, a: &BigInt, b: &BigInt, m: &BigInt) -> BigInt {
    assert!(m.is_positive(), "floor_sum needs m > 0");
    assert!(!n.is_negative(), "floor_sum needs n >= 0");
    let mut ans = BigInt::zero();
    let mut n = n.clone();
    let mut m = m.clone();
    let mut a = a.clone();
    let mut b = b.clone();
    loop {
        if a.is_negative() || a >= m {
            let (q, r) = a.div_mod_floor(&m);
            // sum_i q*i = q * n(n-1)/2
            ans += &q * (&n * (&n - BigInt::one())) / 2;
            a = r;
        }
        if b.is_negative() || b >= m {
            let (q, r) = b.div_mod_floor(&m);
            ans += &q * &n;
            b = r;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            break;
        }
        let (n2, b2) = y_max.div_mod_floor(&m);
        n = n2;
        b = b2;
        std::mem::swap(&mut m, &mut a);
    }
    ans
}

fn big(x: u128) -> BigInt {
    BigInt::from(x)
}

/// #{0 <= i < n : {i * alpha} < t} with alpha = f/2^127, t = t_raw/2^127.
pub fn count_frac_below(n: u128, alpha: Frac, t_raw: u128) -> u128 {
    if t_raw == 0 || n == 0 {
        return 0;
    }
    if t_raw >= FULL {
        return n;
    }
    let nn = big(n);
    let f = big(alpha.0);
    let d = big(FULL);
    let total = floor_sum(&nn, &f, &BigInt::zero(), &d) - floor_sum(&nn, &f, &-big(t_raw), &d);
    u128::try_from(total).expect("count fits u128")
}

/// A half-open window on the circle, possibly wrapping through 0.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub start: Frac,
    pub end: Frac,
}

impl Window {
    /// Window centered at c with the given one-sided reaches (saturating to
    /// the full circle if they overlap).
    pub fn around(c: Frac, left: u128, right: u128) -> Window {
        Window {
            start: c.sub(Frac::from_raw(left)),
            end: c.add(Frac::from_raw(right)),
        }
    }

    pub fn width(&self) -> u128 {
        self.end.sub(self.start).0
    }

    pub fn contains(&self, x: Frac) -> bool {
        x.sub(self.start).0 < self.width()
    }
}

/// #{lo <= i < hi : {i * alpha} in window}, exact.
pub fn count_hits(lo: u128, hi: u128, alpha: Frac, w: Window) -> u128 {
    if hi <= lo {
        return 0;
    }
    let below = |n: u128, t: Frac| count_frac_below(n, alpha, t.0);
    let span = |t: Frac| below(hi, t) - below(lo, t);
    if w.start.0 <= w.end.0 {
        if w.start == w.end {
            return 0; // zero-width window
        }
        span(w.end) - span(w.start)
    } else {
        // wraps through 0: [start, 1) plus [0, end)
        (hi - lo - span(w.start)) + span(w.end)
    }
}

/// Smallest i in [lo, hi) with {i * alpha} in the window, if any,
/// by binary search on the counting function.
pub fn first_hit(lo: u128, hi: u128, alpha: Frac, w: Window) -> Option<u128> {
    if count_hits(lo, hi, alpha, w) == 0 {
        return None;
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 1 {
        let mid = a + (b - a) / 2;
        if count_hits(lo, mid, alpha, w) > 0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Some(a)
}

/// All hits in [lo, hi); only call when the count is known to be small.
pub fn enumerate_hits(lo: u128, hi: u128, alpha: Frac, w: Window) -> Vec<u128> {
    let mut out = Vec::new();
    let mut cursor = lo;
    while let Some(i) = first_hit(cursor, hi, alpha, w) {
        out.push(i);
        cursor = i + 1;
    }
    out
}
