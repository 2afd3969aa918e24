//! Arbitrary-precision reals for reporting probabilities and Shannon terms.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::entropy::ExactEntropy;
use crate::{Error, Result};

/// Significant decimal digits in reports.
pub const DEFAULT_DIGITS: usize = 30;
/// Working precision in bits; comfortably above 30 decimal digits.
pub const WORK_BITS: usize = 192;

const RM: RoundingMode = RoundingMode::ToEven;

/// Scratch state for transcendental functions.
pub struct Numeric {
    pub bits: usize,
    cc: Consts,
}

impl Numeric {
    pub fn new(bits: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::InvalidInput(format!("numeric setup: {e:?}")))?;
        Ok(Numeric { bits, cc })
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_word(0, self.bits)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_word(1, self.bits)
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn from_biguint(&self, n: &BigUint) -> BigFloat {
        self.parse(&n.to_string())
    }

    pub fn from_rational(&self, x: &BigRational) -> BigFloat {
        let n = self.parse(&x.numer().to_string());
        let d = self.parse(&x.denom().to_string());
        n.div(&d, self.bits, RM)
    }

    fn parse(&self, s: &str) -> BigFloat {
        let mut cc = Consts::new().expect("constants");
        BigFloat::parse(s, Radix::Dec, self.bits, RM, &mut cc)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn log2(&mut self, x: &BigFloat) -> BigFloat {
        x.log2(self.bits, RM, &mut self.cc)
    }

    /// `2^x` for rational `x`.
    pub fn exp2(&mut self, x: &BigRational) -> BigFloat {
        let floor = x.floor();
        let frac = x - &floor;
        let whole = floor.to_integer();
        let mut out = if frac.is_zero() {
            self.one()
        } else {
            let two = BigFloat::from_word(2, self.bits);
            let f = self.from_rational(&frac);
            two.pow(&f, self.bits, RM, &mut self.cc)
        };
        let shift = whole.to_i64().expect("moderate exponent");
        let pow = self.pow2_int(shift);
        out = self.mul(&out, &pow);
        out
    }

    fn pow2_int(&self, k: i64) -> BigFloat {
        let p = self.from_biguint(&(BigUint::one() << k.unsigned_abs()));
        if k >= 0 {
            p
        } else {
            self.div(&self.one(), &p)
        }
    }

    /// `Σ count · 2^x`, the power sum behind an entropy value.
    pub fn power(&mut self, e: &ExactEntropy) -> BigFloat {
        let mut acc = self.zero();
        for (x, c) in e.terms() {
            let t = self.exp2(x);
            let t = self.mul(&t, &self.from_biguint(c));
            acc = self.add(&acc, &t);
        }
        acc
    }

    /// `log₂ Σ 2^x`.
    pub fn entropy(&mut self, e: &ExactEntropy) -> BigFloat {
        if let Some(r) = e.as_rational() {
            return self.from_rational(&r);
        }
        let p = self.power(e);
        self.log2(&p)
    }
}

/// The exact binary value of a finite float.
pub fn to_rational(x: &BigFloat) -> Option<BigRational> {
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let (words, nbits, sign, exp, _) = x.as_raw_parts()?;
    let mut m = BigUint::zero();
    for w in words.iter().rev() {
        m = (m << 64u32) | BigUint::from(*w as u64);
    }
    // value = 0.mantissa × 2^exp with the mantissa occupying `words.len() * 64` bits
    let total_bits = (words.len() * 64) as i64;
    let _ = nbits;
    let shift = i64::from(exp) - total_bits;
    let mut r = BigRational::from_integer(BigInt::from(m));
    let two = BigRational::from_integer(BigInt::from(2));
    if shift >= 0 {
        r *= num_traits::pow(two, shift as usize);
    } else {
        r /= num_traits::pow(two, (-shift) as usize);
    }
    if sign == Sign::Neg {
        r = -r;
    }
    Some(r)
}

pub fn to_f64(x: &BigFloat) -> f64 {
    to_rational(x).and_then(|r| r.to_f64()).unwrap_or(f64::NAN)
}

/// Decimal rendering with `digits` significant digits, rounded half to even.
pub fn to_decimal(x: &BigFloat, digits: usize) -> String {
    match to_rational(x) {
        Some(r) => rational_to_decimal(&r, digits),
        None => "NaN".to_owned(),
    }
}

/// Decimal rendering of a rational with `digits` significant digits.
pub fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return format!("0.{}", "0".repeat(digits.saturating_sub(1)));
    }
    let neg = r.is_negative();
    let a = r.abs();
    // exponent e with 10^e <= a < 10^(e+1)
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut e: i64 = (a.numer().to_string().len() as i64) - (a.denom().to_string().len() as i64);
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            BigRational::one() / num_traits::pow(ten.clone(), (-k) as usize)
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scale = digits as i64 - 1 - e;
    let scaled = &a * pow10(scale);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice: BigInt = rem * BigInt::from(2);
    let mut q = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal if q.is_odd() => q + 1,
        _ => q,
    };
    let mut e = e;
    if q.to_string().len() > digits {
        q /= 10;
        e += 1;
    }
    let s = q.to_string();
    let body = if e >= 0 && (e as usize) < digits {
        let (int, frac) = s.split_at(e as usize + 1);
        if frac.is_empty() {
            int.to_owned()
        } else {
            format!("{int}.{frac}")
        }
    } else if e < 0 && e > -8 {
        format!("0.{}{}", "0".repeat((-e - 1) as usize), s)
    } else {
        format!("{}.{}e{}", &s[..1], &s[1..], e)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}
