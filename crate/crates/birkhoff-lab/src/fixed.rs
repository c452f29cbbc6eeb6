//! Fixed-point arithmetic on the unit circle.
//!
//! Every point of T = R/Z is stored as an unsigned 127-bit numerator over the
//! implicit denominator 2^127, so addition and subtraction mod 1 are exact
//! integer operations.  Rotation numbers are quantized to a configurable
//! number of bits P (default 127); once quantized, every orbit point {k·alpha}
//! is the exact orbit of that nearby rational, which is what makes the tower
//! partitions and plateau constructions downstream exact rather than
//! float-drifted.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Number of fractional bits in the internal representation.
pub const SCALE_BITS: u32 = 127;

/// 2^127, the full circle, as a raw numerator.
pub const FULL: u128 = 1u128 << SCALE_BITS;

/// Mask selecting the 127 value bits.
pub const MASK: u128 = FULL - 1;

/// Quantization precision for rotation numbers, in bits (<= 127).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision(pub u32);

impl Default for Precision {
    fn default() -> Self {
        Precision(127)
    }
}

impl Precision {
    pub fn new(bits: u32) -> Option<Self> {
        (16..=127).contains(&bits).then_some(Precision(bits))
    }

    /// 2^(-P + shift) as f64, the tolerance ladder used by the invariants.
    pub fn tolerance(&self, shift: i32) -> f64 {
        (2f64).powi(shift - self.0 as i32)
    }

    /// Round a raw 127-bit numerator to this precision (round to nearest,
    /// ties away from zero, wrapping the top back into the circle).
    pub fn quantize(&self, raw: u128) -> u128 {
        let drop = SCALE_BITS - self.0;
        if drop == 0 {
            return raw & MASK;
        }
        let unit = 1u128 << drop;
        let half = unit >> 1;
        (raw & MASK).wrapping_add(half) & MASK & !(unit - 1)
    }
}

/// A point of the circle T = R/Z at 127 fractional bits.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Frac(pub u128);

impl fmt::Debug for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frac({:.12} = {})", self.to_f64(), self.to_hex())
    }
}

#[allow(clippy::should_implement_trait)] // add/sub are the domain's mod-1 ops
impl Frac {
    pub const ZERO: Frac = Frac(0);

    /// Construct from a raw numerator; bits above 2^127 are discarded mod 1.
    pub fn from_raw(raw: u128) -> Self {
        Frac(raw & MASK)
    }

    /// Nearest representable point to an f64 in [0, 1).
    pub fn from_f64(x: f64) -> Self {
        let y = x.rem_euclid(1.0);
        let raw = (y * FULL as f64).round() as u128;
        Frac(raw & MASK)
    }

    /// Exact rational p/q in [0,1), rounded to the nearest 127-bit point.
    pub fn from_ratio(p: u128, q: u128) -> Self {
        assert!(q > 0 && p < q, "from_ratio wants p/q in [0,1)");
        // (p << 127) / q with rounding, via 256-bit intermediate.
        let (hi, lo) = shl_127(p);
        let (quot, rem) = div256_by_u128(hi, lo, q);
        let raw = if rem.checked_mul(2).is_none_or(|r2| r2 >= q) {
            quot + 1
        } else {
            quot
        };
        Frac(raw & MASK)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / FULL as f64
    }

    /// x + y mod 1, exact.
    pub fn add(self, other: Frac) -> Frac {
        Frac((self.0 + other.0) & MASK)
    }

    /// x - y mod 1, exact.
    pub fn sub(self, other: Frac) -> Frac {
        Frac(self.0.wrapping_sub(other.0) & MASK)
    }

    /// {k * x}, exact: only the low 127 bits of the product survive mod 1.
    pub fn mul_int(self, k: u128) -> Frac {
        Frac(self.0.wrapping_mul(k) & MASK)
    }

    /// Distance to the nearest integer, ||x||, as a raw numerator <= 2^126.
    pub fn dist_to_zero(self) -> u128 {
        self.0.min(FULL - self.0)
    }

    /// Circle distance ||x - y||.
    pub fn circle_dist(self, other: Frac) -> u128 {
        self.sub(other).dist_to_zero()
    }

    /// The orbit x, x+step, x+2*step, ... as an endless exact iterator.
    pub fn orbit(self, step: Frac) -> impl Iterator<Item = Frac> {
        let mut cur = self;
        std::iter::from_fn(move || {
            let out = cur;
            cur = cur.add(step);
            Some(out)
        })
    }

    /// Serialize as a fixed-width hex numerator (32 nibbles).
    pub fn to_hex(self) -> String {
        format!("{:032x}", self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let raw = u128::from_str_radix(s, 16).ok()?;
        (raw < FULL).then_some(Frac(raw))
    }
}

impl Serialize for Frac {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Frac {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Frac::from_hex(&s).ok_or_else(|| serde::de::Error::custom("bad hex fraction"))
    }
}

/// p << 127 as a (hi, lo) 256-bit pair.
fn shl_127(p: u128) -> (u128, u128) {
    (p >> 1, (p << 127))
}

/// Divide the 256-bit value hi*2^128 + lo by a u128 divisor.
/// Returns (quotient as u128, remainder); the caller guarantees the quotient fits.
fn div256_by_u128(hi: u128, lo: u128, d: u128) -> (u128, u128) {
    // Schoolbook in base 2^64 when the divisor fits one limb (remainder then
    // stays below 2^64 and each step's partial quotient below 2^64), bit by
    // bit otherwise.
    let mut rem: u128 = 0;
    let mut quot: u128 = 0;
    let limbs = [
        (hi >> 64) as u64,
        hi as u64,
        (lo >> 64) as u64,
        lo as u64,
    ];
    let small = d <= u64::MAX as u128;
    for &limb in &limbs {
        if small {
            rem = (rem << 64) | limb as u128;
            let q = rem / d;
            rem %= d;
            quot = (quot << 64) | q;
        } else {
            for bit in (0..64).rev() {
                let b = (limb >> bit) & 1;
                let carry = rem >> 127;
                rem = (rem << 1) | b as u128;
                if carry != 0 || rem >= d {
                    rem = rem.wrapping_sub(d);
                    quot = (quot << 1) | 1;
                } else {
                    quot <<= 1;
                }
            }
        }
    }
    (quot, rem)
}

/// Compare a/b with c/d for nonnegative 128-bit values without overflow.
pub fn cmp_ratio(a: u128, b: u128, c: u128, d: u128) -> std::cmp::Ordering {
    // a*d vs c*b in 256 bits.
    let left = mul_u128(a, d);
    let right = mul_u128(c, b);
    left.cmp(&right)
}

/// Full 256-bit product of two u128s as (hi, lo).
pub fn mul_u128(a: u128, b: u128) -> (u128, u128) {
    let a_lo = a & 0xffff_ffff_ffff_ffff;
    let a_hi = a >> 64;
    let b_lo = b & 0xffff_ffff_ffff_ffff;
    let b_hi = b >> 64;
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & 0xffff_ffff_ffff_ffff) + (hl & 0xffff_ffff_ffff_ffff);
    let lo = (mid << 64) | (ll & 0xffff_ffff_ffff_ffff);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}
