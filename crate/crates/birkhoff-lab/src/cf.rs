//! Continued-fraction arithmetic for the rotation number.
//!
//! A rotation number comes either from a partial-quotient description (finite
//! prefix plus optional periodic tail, covering the quadratic irrationals the
//! experiments actually use) or from a high-precision decimal string.  The
//! value is quantized to P bits; partial quotients of decimal sources are
//! certified against the string's +-1 ulp interval and refused beyond what the
//! precision supports.

use crate::error::{Error, Result};
use crate::fixed::{Frac, Precision, FULL, SCALE_BITS};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// How the rotation number was specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaSource {
    /// Partial quotients: finite prefix, then an optional repeating block.
    Quotients {
        prefix: Vec<u64>,
        periodic: Vec<u64>,
    },
    /// Decimal string "0.digits", uncertain by one unit in the last place.
    Decimal(String),
}

/// Grammar: `golden`, `sqrt2m1`, `quotients:1,1,2,periodic:3,4`,
/// `decimal:0.6180339887...`.
impl FromStr for AlphaSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<AlphaSource> {
        match s {
            "golden" => Ok(AlphaSource::Quotients {
                prefix: vec![],
                periodic: vec![1],
            }),
            "sqrt2m1" => Ok(AlphaSource::Quotients {
                prefix: vec![],
                periodic: vec![2],
            }),
            _ => {
                if let Some(rest) = s.strip_prefix("quotients:") {
                    let (prefix_part, periodic_part) = match rest.find("periodic:") {
                        Some(idx) => (&rest[..idx], &rest[idx + "periodic:".len()..]),
                        None => (rest, ""),
                    };
                    let parse_list = |part: &str| -> Result<Vec<u64>> {
                        part.split(',')
                            .filter(|t| !t.is_empty())
                            .map(|t| {
                                t.parse::<u64>().map_err(|_| {
                                    Error::InvalidInput(format!("bad quotient '{t}'"))
                                })
                            })
                            .collect()
                    };
                    let prefix = parse_list(prefix_part.trim_end_matches(','))?;
                    let periodic = parse_list(periodic_part)?;
                    if prefix.iter().chain(&periodic).any(|&a| a == 0) {
                        return Err(Error::InvalidInput("quotients must be >= 1".into()));
                    }
                    if prefix.is_empty() && periodic.is_empty() {
                        return Err(Error::InvalidInput("empty quotient list".into()));
                    }
                    Ok(AlphaSource::Quotients { prefix, periodic })
                } else if let Some(dec) = s.strip_prefix("decimal:") {
                    let ok = dec.starts_with("0.")
                        && dec.len() > 2
                        && dec[2..].bytes().all(|b| b.is_ascii_digit());
                    if !ok {
                        return Err(Error::InvalidInput(format!(
                            "decimal spec must look like 0.123..., got '{dec}'"
                        )));
                    }
                    Ok(AlphaSource::Decimal(dec.to_string()))
                } else {
                    Err(Error::InvalidInput(format!("unrecognized alpha spec '{s}'")))
                }
            }
        }
    }
}

impl fmt::Display for AlphaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSource::Quotients { prefix, periodic } => {
                if prefix.is_empty() && periodic == &[1] {
                    return write!(f, "golden");
                }
                if prefix.is_empty() && periodic == &[2] {
                    return write!(f, "sqrt2m1");
                }
                write!(f, "quotients:")?;
                let strs: Vec<String> = prefix.iter().map(|a| a.to_string()).collect();
                write!(f, "{}", strs.join(","))?;
                if !periodic.is_empty() {
                    if !prefix.is_empty() {
                        write!(f, ",")?;
                    }
                    let strs: Vec<String> = periodic.iter().map(|a| a.to_string()).collect();
                    write!(f, "periodic:{}", strs.join(","))?;
                }
                Ok(())
            }
            AlphaSource::Decimal(d) => write!(f, "decimal:{d}"),
        }
    }
}

/// One convergent p_k/q_k of the rotation number, with the exact signed error
/// q_k*alpha - p_k of the quantized alpha, scaled by 2^127.
#[derive(Clone, Debug)]
pub struct Convergent {
    pub k: usize,
    pub p: BigInt,
    pub q: BigInt,
    /// q*alpha - p in units of 2^-127, exact for the quantized alpha.
    pub err_scaled: BigInt,
}

impl Convergent {
    pub fn signed_error(&self) -> f64 {
        big_to_f64(&self.err_scaled) / FULL as f64
    }

    pub fn q_u128(&self) -> Option<u128> {
        self.q.to_u128()
    }
}

/// Growth exponents tau_n with q_{n+2} = q_n^{tau_n}.
#[derive(Clone, Debug)]
pub struct TypeExponents {
    /// (n, tau_n) for every n with q_n >= 2 and q_{n+2} computed.
    pub entries: Vec<(usize, f64)>,
    /// min over the trailing window; stands in for the liminf.
    pub liminf_estimate: f64,
    pub window: usize,
}

/// An irrational rotation number at P-bit precision.
#[derive(Clone, Debug)]
pub struct RotationNumber {
    pub source: AlphaSource,
    pub precision: Precision,
    /// Quantized value in [0, 1).
    pub value: Frac,
}

impl RotationNumber {
    pub fn new(source: AlphaSource, precision: Precision) -> Result<RotationNumber> {
        let value = match &source {
            AlphaSource::Quotients { prefix, periodic } => {
                quotient_value(prefix, periodic, precision)?
            }
            AlphaSource::Decimal(d) => decimal_value(d, precision)?,
        };
        if value == Frac::ZERO {
            return Err(Error::InvalidInput("alpha quantizes to zero".into()));
        }
        Ok(RotationNumber {
            source,
            precision,
            value,
        })
    }

    pub fn parse(spec: &str, precision: Precision) -> Result<RotationNumber> {
        RotationNumber::new(spec.parse()?, precision)
    }

    pub fn golden(precision: Precision) -> RotationNumber {
        RotationNumber::parse("golden", precision).expect("golden is valid")
    }

    pub fn sqrt2m1(precision: Precision) -> RotationNumber {
        RotationNumber::parse("sqrt2m1", precision).expect("sqrt2m1 is valid")
    }

    /// Partial quotients a_1..a_K.  Quotient sources extend their period;
    /// decimal sources return only digits certified by the string's interval.
    pub fn partial_quotients(&self, k: usize) -> Result<Vec<u64>> {
        if k == 0 {
            return Err(Error::InvalidInput("need K >= 1".into()));
        }
        match &self.source {
            AlphaSource::Quotients { prefix, periodic } => {
                let mut out = Vec::with_capacity(k);
                out.extend_from_slice(&prefix[..prefix.len().min(k)]);
                if out.len() < k {
                    if periodic.is_empty() {
                        return Err(Error::PrecisionExhausted(out.len() + 1));
                    }
                    let mut i = 0;
                    while out.len() < k {
                        out.push(periodic[i % periodic.len()]);
                        i += 1;
                    }
                }
                Ok(out)
            }
            AlphaSource::Decimal(d) => {
                let (num, den) = decimal_to_fraction(d);
                let lo = certified_cf(&(num.clone() - 1u8), &den, k + 1);
                let hi = certified_cf(&(num + 1u8), &den, k + 1);
                let mut out = Vec::new();
                for i in 0..k {
                    match (lo.get(i), hi.get(i)) {
                        (Some(a), Some(b)) if a == b => out.push(*a),
                        _ => return Err(Error::PrecisionExhausted(i + 1)),
                    }
                }
                Ok(out)
            }
        }
    }

    /// Convergents p_1/q_1 .. p_K/q_K with exact errors, all invariants
    /// verified against the quantized value.
    pub fn convergents(&self, k: usize) -> Result<Vec<Convergent>> {
        let quotients = self.partial_quotients(k)?;
        let mut out = Vec::with_capacity(k);
        // p_{-1}/q_{-1} = 1/0, p_0/q_0 = 0/1 (a_0 = 0).
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        let (mut p_cur, mut q_cur) = (BigInt::zero(), BigInt::one());
        let alpha_scaled = BigInt::from(self.value.0);
        let full = BigInt::from(FULL);
        for (i, &a) in quotients.iter().enumerate() {
            let a = BigInt::from(a);
            let p_next = &a * &p_cur + &p_prev;
            let q_next = &a * &q_cur + &q_prev;
            p_prev = std::mem::replace(&mut p_cur, p_next);
            q_prev = std::mem::replace(&mut q_cur, q_next);
            let k_index = i + 1;
            let err_scaled = &q_cur * &alpha_scaled - &p_cur * &full;
            let conv = Convergent {
                k: k_index,
                p: p_cur.clone(),
                q: q_cur.clone(),
                err_scaled,
            };
            verify_convergent(&conv, &q_prev, &quotients, k_index)?;
            out.push(conv);
        }
        // Two-sided error bound needs q_{k+1}; check it for all but the last.
        for w in out.windows(2) {
            let (c, next) = (&w[0], &w[1]);
            let abs_err = c.err_scaled.abs();
            let full = BigInt::from(FULL);
            // 1/(q_k + q_{k+1}) < |err| < 1/q_{k+1}
            if !(&abs_err * (&c.q + &next.q) > full.clone() && &abs_err * &next.q < full) {
                return Err(Error::PrecisionExhausted(next.k));
            }
        }
        Ok(out)
    }

    /// tau_n = ln q_{n+2} / ln q_n over the available depth.
    pub fn type_exponents(&self, k: usize, window: usize) -> Result<TypeExponents> {
        if k < 3 {
            return Err(Error::InsufficientDepth(3));
        }
        let convs = self.convergents(k)?;
        let mut entries = Vec::new();
        for n in 0..convs.len().saturating_sub(2) {
            let q_n = &convs[n].q;
            if q_n >= &BigInt::from(2) {
                let tau = ln_big(&convs[n + 2].q) / ln_big(q_n);
                entries.push((convs[n].k, tau));
            }
        }
        if entries.is_empty() {
            return Err(Error::InsufficientDepth(3));
        }
        let window = window.max(1);
        let tail = &entries[entries.len().saturating_sub(window)..];
        let liminf_estimate = tail.iter().map(|&(_, t)| t).fold(f64::INFINITY, f64::min);
        Ok(TypeExponents {
            entries,
            liminf_estimate,
            window,
        })
    }
}

fn verify_convergent(
    c: &Convergent,
    q_prev: &BigInt,
    quotients: &[u64],
    k: usize,
) -> Result<()> {
    // gcd(p, q) = 1 by the determinant identity; check directly anyway.
    let g = c.p.gcd(&c.q);
    if !g.is_one() {
        return Err(Error::InvalidInput(format!("gcd(p_{k}, q_{k}) = {g} != 1")));
    }
    if c.q <= *q_prev && k > 1 {
        return Err(Error::InvalidInput(format!("q_{k} not increasing")));
    }
    // sign(q_k alpha - p_k) = (-1)^k; fails only when the quantized alpha can
    // no longer separate the convergents, which we refuse to silently accept.
    let want_positive = k % 2 == 0;
    if c.err_scaled.is_zero() || (c.err_scaled.is_positive() != want_positive) {
        return Err(Error::PrecisionExhausted(k));
    }
    let _ = quotients;
    Ok(())
}

/// Evaluate a quotient description to a P-bit value by unrolling the period
/// until consecutive convergents agree to beyond P bits.
fn quotient_value(prefix: &[u64], periodic: &[u64], precision: Precision) -> Result<Frac> {
    let digits = |i: usize| -> u64 {
        if i < prefix.len() {
            prefix[i]
        } else if periodic.is_empty() {
            0 // signal: exhausted
        } else {
            periodic[(i - prefix.len()) % periodic.len()]
        }
    };
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_cur, mut q_cur) = (BigInt::zero(), BigInt::one());
    // Stability to P bits: |alpha - p_k/q_k| < 1/(q_k q_{k+1}) <= 1/q_k^2.
    let threshold = BigUint::one() << (precision.0 as usize + 8);
    let mut i = 0usize;
    loop {
        let a = digits(i);
        if a == 0 {
            if q_cur.is_one() && p_cur.is_zero() {
                return Err(Error::InvalidInput("finite quotient list describes a rational".into()));
            }
            break; // finite list exhausted: rational endpoint, best effort
        }
        let a = BigInt::from(a);
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        i += 1;
        let qq = (&q_cur * &q_prev).to_biguint().unwrap_or_default();
        if qq > threshold {
            break;
        }
        if i > 4096 {
            return Err(Error::BudgetExceeded("quotient unrolling depth".into()));
        }
    }
    let num = p_cur.to_biguint().ok_or_else(|| Error::InvalidInput("negative value".into()))?;
    let den = q_cur.to_biguint().ok_or_else(|| Error::InvalidInput("bad denominator".into()))?;
    Ok(ratio_to_frac(&num, &den, precision))
}

fn decimal_value(d: &str, precision: Precision) -> Result<Frac> {
    let (num, den) = decimal_to_fraction(d);
    let num = num.to_biguint().ok_or_else(|| Error::InvalidInput("negative decimal".into()))?;
    let den = den.to_biguint().unwrap();
    if num >= den {
        return Err(Error::InvalidInput("alpha must lie in (0,1)".into()));
    }
    Ok(ratio_to_frac(&num, &den, precision))
}

/// "0.digits" -> (digits as integer, 10^len).
fn decimal_to_fraction(d: &str) -> (BigInt, BigInt) {
    let frac_digits = &d[2..];
    let num = BigInt::parse_bytes(frac_digits.as_bytes(), 10).unwrap_or_default();
    let den = BigInt::from(10u8).pow(frac_digits.len() as u32);
    (num, den)
}

/// Round num/den (in [0,1)) to the nearest P-bit point.
fn ratio_to_frac(num: &BigUint, den: &BigUint, precision: Precision) -> Frac {
    let scaled: BigUint = (num << SCALE_BITS as usize) + (den >> 1usize);
    let raw = (scaled / den).to_u128().unwrap_or(0) & crate::fixed::MASK;
    Frac::from_raw(precision.quantize(raw))
}

/// Plain Euclid continued fraction of a nonnegative rational, up to k terms
/// after a_0 (which is always 0 here).
fn certified_cf(num: &BigInt, den: &BigInt, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if num <= &BigInt::zero() {
        return out;
    }
    let (mut a, mut b) = (den.clone(), num.clone()); // alpha = b/a in (0,1): a_1 = floor(a/b)
    while out.len() < k && !b.is_zero() {
        let (q, r) = a.div_mod_floor(&b);
        out.push(q.to_u64().unwrap_or(u64::MAX));
        a = b;
        b = r;
    }
    out
}

/// Natural log of a big positive integer, stable for any size.
pub fn ln_big(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 53 {
        return (mag.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 53;
    let top = (mag >> shift).to_u64().unwrap() as f64;
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> RotationNumber {
        RotationNumber::golden(Precision::default())
    }

    /// Independent big-integer oracle: continued fraction of (sqrt(5)-1)/2
    /// carried to 200 decimal digits.
    fn cf_oracle_quadratic(radicand: u64, sub: u64, div: u64, terms: usize) -> Vec<u64> {
        let digits = 200u32;
        let scale = BigUint::from(10u8).pow(digits);
        let target = BigUint::from(radicand) * &scale * &scale;
        let root = target.sqrt();
        let num = (&root - BigUint::from(sub) * &scale).to_bigint().unwrap();
        let den = (BigUint::from(div) * &scale).to_bigint().unwrap();
        certified_cf(&num, &den, terms)
    }

    use num_bigint::ToBigInt;

    #[test]
    fn golden_quotients_match_oracle() {
        let oracle = cf_oracle_quadratic(5, 1, 2, 40);
        assert_eq!(oracle, vec![1u64; 40]);
        assert_eq!(golden().partial_quotients(40).unwrap(), oracle);
    }

    #[test]
    fn sqrt2m1_quotients_match_oracle() {
        let oracle = cf_oracle_quadratic(2, 1, 1, 40);
        assert_eq!(oracle, vec![2u64; 40]);
        let a = RotationNumber::sqrt2m1(Precision::default());
        assert_eq!(a.partial_quotients(40).unwrap(), oracle);
    }

    #[test]
    fn rational_decimal_fails_certification() {
        let a = RotationNumber::parse("decimal:0.5000000000", Precision::default()).unwrap();
        assert!(matches!(
            a.partial_quotients(6),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn decimal_golden_certifies_a_prefix() {
        let a = RotationNumber::parse(
            "decimal:0.61803398874989484820458683436563811772030917980576",
            Precision::default(),
        )
        .unwrap();
        let qs = a.partial_quotients(40).unwrap();
        assert_eq!(qs, vec![1u64; 40]);
        // value agrees with the quotient-source construction to ~2^-127
        assert!((a.value.to_f64() - golden().value.to_f64()).abs() < 1e-30);
    }

    #[test]
    fn golden_convergents_are_fibonacci() {
        let convs = golden().convergents(6).unwrap();
        let qs: Vec<u64> = convs.iter().map(|c| c.q.to_u64().unwrap()).collect();
        assert_eq!(qs, vec![1, 2, 3, 5, 8, 13]);
        let ps: Vec<u64> = convs.iter().map(|c| c.p.to_u64().unwrap()).collect();
        assert_eq!(ps, vec![1, 1, 2, 3, 5, 8]);
    }

    #[test]
    fn sqrt2m1_convergents_match_recurrence_oracle() {
        let convs = RotationNumber::sqrt2m1(Precision::default()).convergents(4).unwrap();
        let pq: Vec<(u64, u64)> = convs
            .iter()
            .map(|c| (c.p.to_u64().unwrap(), c.q.to_u64().unwrap()))
            .collect();
        assert_eq!(pq, vec![(1, 2), (2, 5), (5, 12), (12, 29)]);
    }

    #[test]
    fn single_quotient_base_case() {
        let a = RotationNumber::parse("quotients:7,periodic:1,2", Precision::default()).unwrap();
        let convs = a.convergents(1).unwrap();
        assert_eq!(convs[0].p.to_u64().unwrap(), 1);
        assert_eq!(convs[0].q.to_u64().unwrap(), 7);
    }

    #[test]
    fn convergent_invariants_to_depth_40() {
        for spec in ["golden", "sqrt2m1"] {
            let a = RotationNumber::parse(spec, Precision::default()).unwrap();
            let convs = a.convergents(40).unwrap();
            // sign alternation and strictly decreasing |error|
            for w in convs.windows(2) {
                assert!(w[0].err_scaled.abs() > w[1].err_scaled.abs());
                assert_ne!(w[0].err_scaled.is_positive(), w[1].err_scaled.is_positive());
            }
        }
    }

    #[test]
    fn tau_for_golden() {
        let a = golden();
        let te = a.type_exponents(25, 5).unwrap();
        // q_2 = 2, q_4 = 5: tau = ln 5 / ln 2
        let first = te.entries.iter().find(|&&(n, _)| n == 2).unwrap().1;
        assert!((first - (5f64).ln() / (2f64).ln()).abs() < 1e-12);
        assert!((first - 2.3219).abs() < 1e-3);
        // Bounded quotients: q_{n+2} = q_n * (ratio -> golden^2), so
        // tau_n = 1 + 2 ln(phi)/ln(q_n) decreases toward 1.
        let at_20 = te.entries.iter().find(|&&(n, _)| n == 20).unwrap().1;
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let q20 = a.convergents(20).unwrap()[19].q.to_f64().unwrap();
        let predicted = 1.0 + 2.0 * phi.ln() / q20.ln();
        assert!((at_20 - predicted).abs() < 2e-3, "tau_20 = {at_20}, predicted {predicted}");
        assert!(at_20 < 1.2);
        // all tau_n >= 1 for strictly increasing q
        assert!(te.entries.iter().all(|&(_, t)| t >= 1.0));
        assert!(te.liminf_estimate >= 1.0 && te.liminf_estimate < 1.2);
    }

    #[test]
    fn reconstruction_roundtrip() {
        // quotients -> value -> quotients reproduces the prefix (via decimal
        // re-expansion of the quantized value).
        let a = golden();
        let dec = format!("{:.60}", a.value.to_f64());
        // the f64 rendering only certifies ~15 digits; use the exact value
        // instead: expand the quantized rational directly.
        let _ = dec;
        let num = BigInt::from(a.value.0);
        let den = BigInt::from(FULL);
        let cf = certified_cf(&(num.clone() - 1), &den, 40);
        let cf_hi = certified_cf(&(num + 1), &den, 40);
        let common: Vec<u64> = cf
            .iter()
            .zip(&cf_hi)
            .take_while(|(a, b)| a == b)
            .map(|(a, _)| *a)
            .collect();
        assert!(common.len() >= 40, "127-bit value certifies >= 40 golden quotients");
        assert_eq!(&common[..40], &vec![1u64; 40][..]);
    }

    #[test]
    fn insufficient_depth_error() {
        assert!(matches!(
            golden().type_exponents(2, 5),
            Err(Error::InsufficientDepth(_))
        ));
    }

    #[test]
    fn alpha_spec_roundtrip() {
        for s in ["golden", "sqrt2m1", "quotients:1,1,2,periodic:3,4", "decimal:0.618033"] {
            let src: AlphaSource = s.parse().unwrap();
            assert_eq!(src.to_string(), s);
        }
        assert!("quotients:0,1".parse::<AlphaSource>().is_err());
        assert!("bogus".parse::<AlphaSource>().is_err());
    }
}
