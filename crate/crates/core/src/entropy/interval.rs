//! Rigorous enclosures of sums of powers of two with rational exponents.
//!
//! Values are positive dyadic numbers `mant · 2^exp`. Lower bounds are always
//! rounded toward zero and upper bounds away from zero, so every interval
//! produced here contains the true value.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dyadic {
    mant: BigUint,
    exp: i64,
}

impl Dyadic {
    fn new(mant: BigUint, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    fn one() -> Self {
        Dyadic::new(BigUint::one(), 0)
    }

    fn round_down(mut self, bits: u64) -> Self {
        let len = self.mant.bits();
        if len > bits {
            let k = len - bits;
            self.mant >>= k;
            self.exp += k as i64;
        }
        self
    }

    fn round_up(mut self, bits: u64) -> Self {
        let len = self.mant.bits();
        if len > bits {
            let k = len - bits;
            let dropped = !(&self.mant & ((BigUint::one() << k) - 1u32)).is_zero();
            self.mant >>= k;
            if dropped {
                self.mant += 1u32;
            }
            self.exp += k as i64;
        }
        self
    }

    fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    fn scale(&self, count: &BigUint) -> Dyadic {
        Dyadic::new(&self.mant * count, self.exp)
    }

    fn add(&self, other: &Dyadic) -> Dyadic {
        if self.mant.is_zero() {
            return other.clone();
        }
        if other.mant.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    fn shift(&self, by: i64) -> Dyadic {
        Dyadic::new(self.mant.clone(), self.exp + by)
    }

    fn magnitude(&self) -> i64 {
        self.mant.bits() as i64 + self.exp
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mant.is_zero(), other.mant.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            return ma.cmp(&mb);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

/// A closed interval `[lo, hi]` of positive dyadic numbers.
#[derive(Clone, Debug)]
pub(crate) struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    fn zero() -> Self {
        Interval {
            lo: Dyadic::new(BigUint::zero(), 0),
            hi: Dyadic::new(BigUint::zero(), 0),
        }
    }

    pub fn mul(&self, other: &Interval, bits: u64) -> Interval {
        Interval {
            lo: self.lo.mul(&other.lo).round_down(bits),
            hi: self.hi.mul(&other.hi).round_up(bits),
        }
    }

    fn add(&self, other: &Interval, bits: u64) -> Interval {
        Interval {
            lo: self.lo.add(&other.lo).round_down(bits),
            hi: self.hi.add(&other.hi).round_up(bits),
        }
    }

    fn scale(&self, count: &BigUint, bits: u64) -> Interval {
        Interval {
            lo: self.lo.scale(count).round_down(bits),
            hi: self.hi.scale(count).round_up(bits),
        }
    }

    /// `Some(ordering)` when the intervals are disjoint (or both points and equal).
    pub fn separate(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Midpoint as an `f64`, for diagnostics.
    #[allow(dead_code)]
    pub fn approx_log2(&self) -> f64 {
        let f = |d: &Dyadic| {
            let bits = d.mant.bits() as i64;
            let top = if bits > 60 {
                (&d.mant >> (bits - 60) as u64).to_f64().unwrap().log2() + (bits - 60) as f64
            } else {
                d.mant.to_f64().unwrap().log2()
            };
            top + d.exp as f64
        };
        0.5 * (f(&self.lo) + f(&self.hi))
    }
}

/// Fixed-point enclosures of `ln 2` scaled by `2^g`.
pub(crate) struct Ln2 {
    g: u64,
    lo: BigUint,
    hi: BigUint,
}

impl Ln2 {
    /// `ln 2 = Σ_{k≥1} 1/(k 2^k)`; the tail after `k = g` is below `2^-g`.
    pub fn new(g: u64) -> Self {
        let mut lo = BigUint::zero();
        let mut hi = BigUint::zero();
        for k in 1..=g {
            let num = BigUint::one() << (g - k);
            let (q, r) = num.div_rem(&BigUint::from(k));
            if !r.is_zero() {
                hi += &q + 1u32;
            } else {
                hi += &q;
            }
            lo += q;
        }
        hi += 1u32;
        Ln2 { g, lo, hi }
    }
}

/// Enclosure of `2^(f/q)` for `0 < f/q < 1`, scaled by `2^g`.
fn exp2_fraction(f: &BigUint, q: &BigUint, ln2: &Ln2) -> (BigUint, BigUint) {
    let g = ln2.g;
    let unit = BigUint::one() << g;
    let z_lo = (f * &ln2.lo) / q;
    let z_hi = {
        let (d, r) = (f * &ln2.hi).div_rem(q);
        if r.is_zero() {
            d
        } else {
            d + 1u32
        }
    };

    // Taylor series with every term rounded down.
    let mut lo = BigUint::zero();
    let mut t = unit.clone();
    let mut n = 0u64;
    while !t.is_zero() {
        lo += &t;
        n += 1;
        t = (&t * &z_lo) / (&unit * n);
    }

    // Every term rounded up; once a term is at most one ulp, the remaining
    // tail is bounded by twice that term because z < 1.
    let mut hi = BigUint::zero();
    let mut u = unit.clone();
    let mut n = 0u64;
    loop {
        hi += &u;
        n += 1;
        let den = &unit * n;
        let (d, r) = (&u * &z_hi).div_rem(&den);
        u = if r.is_zero() { d } else { d + 1u32 };
        if u <= BigUint::one() {
            hi += &u * 2u32;
            break;
        }
    }
    (lo, hi)
}

/// Enclosure of `2^x` for rational `x`.
pub(crate) fn exp2(x: &BigRational, ln2: &Ln2, bits: u64) -> Result<Interval> {
    let floor = x.floor();
    let whole = floor
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::InvalidInput(format!("exponent {x} out of range")))?;
    let frac = x - floor;
    if frac.is_zero() {
        let one = Dyadic::one().shift(whole);
        return Ok(Interval {
            lo: one.clone(),
            hi: one,
        });
    }
    debug_assert!(frac.is_positive());
    let f = frac.numer().to_biguint().expect("positive");
    let q = frac.denom().to_biguint().expect("positive");
    let (lo, hi) = exp2_fraction(&f, &q, ln2);
    let shift = whole - ln2.g as i64;
    Ok(Interval {
        lo: Dyadic::new(lo, shift).round_down(bits),
        hi: Dyadic::new(hi, shift).round_up(bits),
    })
}

/// Enclosure of `Σ count · 2^exponent`.
pub(crate) fn power_sum(
    terms: &[(BigRational, BigUint)],
    ln2: &Ln2,
    bits: u64,
) -> Result<Interval> {
    let mut acc = Interval::zero();
    for (x, c) in terms {
        let p = exp2(x, ln2, bits)?.scale(c, bits);
        acc = acc.add(&p, bits);
    }
    Ok(acc)
}
