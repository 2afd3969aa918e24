//! Exact entropy values of the form `log₂ Σ 2^{xᵢ}` with rational `xᵢ`, and
//! decision procedures for comparing sums of them.
//!
//! Two facts make comparisons exact whenever they can be:
//!
//! * Merging equal exponents (`2^x + 2^x = 2^{x+1}`) until all exponents are
//!   distinct gives a canonical form that is unique per value. With a common
//!   denominator `D`, every value lies in `Q(2^{1/D})`, whose powers
//!   `1, t, …, t^{D-1}` are linearly independent, and each coordinate is a
//!   dyadic rational whose binary expansion is read off the canonical form.
//! * Sums of such logarithms are logarithms of products, and the product of
//!   two power sums is again a power sum (exponents add, counts multiply).
//!
//! Equal values are therefore detected exactly; unequal values are separated
//! by rigorous interval arithmetic at escalating precision.

pub(crate) mod interval;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};
use interval::{Interval, Ln2};

/// Environment variable holding the precision cap, in bits, for entropy comparisons.
pub const PRECISION_ENV: &str = "EIDOS_PRECISION_BITS";

/// Precision schedule for interval comparisons: start at `start_bits` and
/// double until `max_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 128,
            max_bits: 4096,
        }
    }
}

impl Precision {
    /// Default schedule with the cap taken from `EIDOS_PRECISION_BITS` when set.
    pub fn from_env() -> Self {
        let mut p = Precision::default();
        if let Some(bits) = std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
        {
            p.max_bits = bits.max(16);
            p.start_bits = p.start_bits.min(p.max_bits);
        }
        p
    }

    fn schedule(self) -> impl Iterator<Item = u32> {
        let max = self.max_bits;
        std::iter::successors(Some(self.start_bits.max(16)), move |b| {
            (*b < max).then(|| (b * 2).min(max))
        })
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `log₂ Σᵢ 2^{xᵢ}` over a multiset of rational exponents.
///
/// The multiset is stored as sorted `(exponent, multiplicity)` pairs so that
/// values such as `log₂ |I|` for huge information states stay small.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactEntropy {
    terms: Vec<(BigRational, BigUint)>,
}

impl ExactEntropy {
    pub fn from_exponents<I>(exponents: I) -> Result<Self>
    where
        I: IntoIterator<Item = BigRational>,
    {
        Self::from_counts(exponents.into_iter().map(|x| (x, BigUint::one())))
    }

    pub fn from_counts<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigRational, BigUint)>,
    {
        let mut map: BTreeMap<BigRational, BigUint> = BTreeMap::new();
        for (x, c) in terms {
            if !c.is_zero() {
                *map.entry(x).or_default() += c;
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidInput(
                "entropy needs at least one exponent".into(),
            ));
        }
        Ok(ExactEntropy {
            terms: map.into_iter().collect(),
        })
    }

    /// The value `x` itself.
    pub fn single(x: BigRational) -> Self {
        ExactEntropy {
            terms: vec![(x, BigUint::one())],
        }
    }

    pub fn zero() -> Self {
        Self::single(BigRational::zero())
    }

    /// `log₂ n`: `n` states of zero entropy.
    pub fn log2_count(n: BigUint) -> Result<Self> {
        Self::from_counts([(BigRational::zero(), n)])
    }

    pub fn terms(&self) -> &[(BigRational, BigUint)] {
        &self.terms
    }

    /// Number of exponents counted with multiplicity.
    pub fn multiplicity(&self) -> BigUint {
        self.terms.iter().map(|(_, c)| c).sum()
    }

    /// Exponents with multiplicity; `None` if there are more than `cap`.
    pub fn exponents(&self, cap: usize) -> Option<Vec<BigRational>> {
        let total = self.multiplicity().to_usize()?;
        if total > cap {
            return None;
        }
        let mut out = Vec::with_capacity(total);
        for (x, c) in &self.terms {
            for _ in 0..c.to_usize()? {
                out.push(x.clone());
            }
        }
        Some(out)
    }

    /// Multiset union: the entropy of a disjoint union of uniform eidostates.
    pub fn union(&self, other: &ExactEntropy) -> ExactEntropy {
        Self::from_counts(self.terms.iter().chain(&other.terms).cloned())
            .expect("both operands are nonempty")
    }

    /// Pairwise sums: the entropy of a Cartesian product.
    pub fn combine(&self, other: &ExactEntropy) -> ExactEntropy {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (x, c) in &self.terms {
            for (y, d) in &other.terms {
                out.push((x + y, c * d));
            }
        }
        Self::from_counts(out).expect("both operands are nonempty")
    }

    /// Adds the rational `delta` to the value.
    pub fn shift(&self, delta: &BigRational) -> ExactEntropy {
        ExactEntropy {
            terms: self
                .terms
                .iter()
                .map(|(x, c)| (x + delta, c.clone()))
                .collect(),
        }
    }

    /// Merge equal exponents pairwise until all are distinct.
    pub fn canonical(&self) -> ExactEntropy {
        let mut map: BTreeMap<BigRational, BigUint> = self.terms.iter().cloned().collect();
        let mut cursor: Option<BigRational> = None;
        loop {
            let next = {
                let mut range: Box<dyn Iterator<Item = (&BigRational, &BigUint)>> = match &cursor {
                    Some(c) => Box::new(map.range(c.clone()..)),
                    None => Box::new(map.iter()),
                };
                range
                    .find(|(_, c)| **c > BigUint::one())
                    .map(|(x, _)| x.clone())
            };
            let Some(x) = next else { break };
            let count = map.remove(&x).unwrap();
            let carry = &count >> 1u32;
            if count.bit(0) {
                map.insert(x.clone(), BigUint::one());
            }
            *map.entry(&x + BigRational::one()).or_default() += carry;
            cursor = Some(x);
        }
        ExactEntropy {
            terms: map.into_iter().collect(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_one())
    }

    /// The value as a rational, when the canonical form is a single exponent.
    pub fn as_rational(&self) -> Option<BigRational> {
        let c = self.canonical();
        (c.terms.len() == 1).then(|| c.terms[0].0.clone())
    }

    pub fn max_exponent(&self) -> &BigRational {
        &self.terms.last().expect("nonempty").0
    }

    pub fn min_exponent(&self) -> &BigRational {
        &self.terms[0].0
    }

    /// Double-precision approximation of the value.
    pub fn to_f64(&self) -> f64 {
        let top = self.max_exponent().clone();
        let sum: f64 = self
            .terms
            .iter()
            .map(|(x, c)| {
                let d = (x - &top).to_f64().unwrap_or(f64::NEG_INFINITY);
                biguint_to_f64(c) * d.exp2()
            })
            .sum();
        sum.log2() + top.to_f64().unwrap_or(f64::NAN)
    }
}

pub(crate) fn biguint_to_f64(n: &BigUint) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

impl fmt::Display for ExactEntropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (x, c) in &self.terms {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            match c.to_u32() {
                Some(n) if n <= 8 => {
                    for i in 0..n {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{x}")?;
                    }
                }
                _ => write!(f, "{x} x{c}")?,
            }
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ExactEntropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactEntropy{self}")
    }
}

/// A finite sum of entropies: `offset + Σₖ log₂ Sₖ`, where each `Sₖ` is a
/// canonical power sum that does not collapse to a single power of two and
/// whose smallest exponent is zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EntropySum {
    offset: BigRational,
    terms: Vec<ExactEntropy>,
}

impl EntropySum {
    pub fn zero() -> Self {
        EntropySum {
            offset: BigRational::zero(),
            terms: Vec::new(),
        }
    }

    pub fn rational(x: BigRational) -> Self {
        EntropySum {
            offset: x,
            terms: Vec::new(),
        }
    }

    pub fn offset(&self) -> &BigRational {
        &self.offset
    }

    pub fn terms(&self) -> &[ExactEntropy] {
        &self.terms
    }

    pub fn add(&self, other: &EntropySum) -> EntropySum {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        terms.sort();
        EntropySum {
            offset: &self.offset + &other.offset,
            terms,
        }
    }

    pub fn add_entropy(&self, e: &ExactEntropy) -> EntropySum {
        self.add(&EntropySum::from(e))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.terms.is_empty().then_some(&self.offset)
    }

    /// The whole sum as one power sum, if it has at most `cap` distinct exponents.
    pub fn to_entropy(&self, cap: usize) -> Option<ExactEntropy> {
        let mut acc = ExactEntropy::single(self.offset.clone());
        for t in &self.terms {
            if acc.terms.len() * t.terms.len() > cap {
                return None;
            }
            acc = acc.combine(t).canonical();
        }
        Some(acc)
    }

    pub fn to_f64(&self) -> f64 {
        self.offset.to_f64().unwrap_or(f64::NAN) + self.terms.iter().map(|t| t.to_f64()).sum::<f64>()
    }
}

impl From<&ExactEntropy> for EntropySum {
    fn from(e: &ExactEntropy) -> Self {
        let c = e.canonical();
        if c.terms.len() == 1 {
            return EntropySum::rational(c.terms[0].0.clone());
        }
        let min = c.min_exponent().clone();
        EntropySum {
            terms: vec![c.shift(&-&min)],
            offset: min,
        }
    }
}

impl From<ExactEntropy> for EntropySum {
    fn from(e: ExactEntropy) -> Self {
        EntropySum::from(&e)
    }
}

impl fmt::Display for EntropySum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.offset)?;
        for t in &self.terms {
            write!(f, " + log2 {t}")?;
        }
        Ok(())
    }
}

/// Largest number of distinct exponents the exact equality test will expand to.
const EXACT_EXPANSION_CAP: usize = 4096;

/// Compare two single entropy values.
pub fn compare_entropy(x: &ExactEntropy, y: &ExactEntropy, precision: Precision) -> Result<Ordering> {
    compare_sums(&EntropySum::from(x), &EntropySum::from(y), precision)
}

/// Compare two entropy sums. Ties are decided exactly; strict inequalities by
/// interval arithmetic. Fails with `PrecisionExhausted` rather than guess.
pub fn compare_sums(a: &EntropySum, b: &EntropySum, precision: Precision) -> Result<Ordering> {
    // Cancel terms common to both sides.
    let mut left: Vec<&ExactEntropy> = Vec::new();
    let mut right: Vec<&ExactEntropy> = b.terms.iter().collect();
    for t in &a.terms {
        if let Some(pos) = right.iter().position(|u| *u == t) {
            right.swap_remove(pos);
        } else {
            left.push(t);
        }
    }
    let diff = &a.offset - &b.offset;
    if left.is_empty() && right.is_empty() {
        return Ok(diff.cmp(&BigRational::zero()));
    }

    let mut known_unequal = false;
    let lhs = EntropySum {
        offset: diff.clone(),
        terms: left.iter().map(|t| (*t).clone()).collect(),
    };
    let rhs = EntropySum {
        offset: BigRational::zero(),
        terms: right.iter().map(|t| (*t).clone()).collect(),
    };
    if let (Some(l), Some(r)) = (
        lhs.to_entropy(EXACT_EXPANSION_CAP),
        rhs.to_entropy(EXACT_EXPANSION_CAP),
    ) {
        if l == r {
            return Ok(Ordering::Equal);
        }
        known_unequal = true;
    }

    let mut last_bits = precision.start_bits;
    for bits in precision.schedule() {
        last_bits = bits;
        let work = u64::from(bits);
        let ln2 = Ln2::new(work + 32);
        let l = product_interval(&lhs, &ln2, work)?;
        let r = product_interval(&rhs, &ln2, work)?;
        if let Some(ord) = l.separate(&r) {
            if ord != Ordering::Equal || !known_unequal {
                return Ok(ord);
            }
        }
    }
    Err(Error::PrecisionExhausted { bits: last_bits })
}

/// Enclosure of `2^sum`.
fn product_interval(sum: &EntropySum, ln2: &Ln2, bits: u64) -> Result<Interval> {
    let mut acc = interval::exp2(&sum.offset, ln2, bits)?;
    for t in &sum.terms {
        let s = interval::power_sum(&t.terms, ln2, bits)?;
        acc = acc.mul(&s, bits);
    }
    Ok(acc)
}

/// Rigorous check that `lo ≤ value ≤ hi` for a rational bracket.
pub fn bracket_contains(
    value: &EntropySum,
    lo: &BigRational,
    hi: &BigRational,
    precision: Precision,
) -> Result<bool> {
    let below = compare_sums(&EntropySum::rational(lo.clone()), value, precision)?;
    let above = compare_sums(value, &EntropySum::rational(hi.clone()), precision)?;
    Ok(below != Ordering::Greater && above != Ordering::Greater)
}

/// Helper for tests and callers that know a value is nonnegative.
pub fn is_nonnegative(x: &BigRational) -> bool {
    !x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(xs: &[(i64, i64)]) -> ExactEntropy {
        ExactEntropy::from_exponents(xs.iter().map(|&(n, d)| rational(n, d))).unwrap()
    }

    #[test]
    fn dyadic_merge_collapses_bit_state() {
        let ib = e(&[(0, 1), (0, 1)]);
        assert_eq!(ib.canonical(), e(&[(1, 1)]));
        assert_eq!(ib.as_rational(), Some(rational(1, 1)));
        assert_eq!(
            compare_entropy(&ib, &e(&[(1, 1)]), Precision::default()).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn merge_carries() {
        // 1 + 1 + 2 = 4
        assert_eq!(e(&[(0, 1), (0, 1), (1, 1)]).as_rational(), Some(rational(2, 1)));
        // 1 + 1 + 1 = 3 stays irrational
        assert_eq!(e(&[(0, 1), (0, 1), (0, 1)]).canonical(), e(&[(0, 1), (1, 1)]));
        let big = ExactEntropy::log2_count(BigUint::one() << 70u32).unwrap();
        assert_eq!(big.as_rational(), Some(rational(70, 1)));
    }

    #[test]
    fn log2_three_exceeds_three_halves() {
        // 3^2 = 9 > 8 = 2^3
        let ord = compare_entropy(&e(&[(0, 1), (1, 1)]), &e(&[(3, 2)]), Precision::default()).unwrap();
        assert_eq!(ord, Ordering::Greater);
    }

    #[test]
    fn reflexive() {
        let x = e(&[(1, 3), (2, 7), (-1, 2)]);
        assert_eq!(compare_entropy(&x, &x, Precision::default()).unwrap(), Ordering::Equal);
    }

    #[test]
    fn product_identity_detected_exactly() {
        // 2·log₂3 = log₂9 = log₂(2^0 + 2^3)
        let three = e(&[(0, 1), (1, 1)]);
        let lhs = EntropySum::from(&three).add(&EntropySum::from(&three));
        let rhs = EntropySum::from(&e(&[(0, 1), (3, 1)]));
        assert_eq!(compare_sums(&lhs, &rhs, Precision::default()).unwrap(), Ordering::Equal);
    }

    #[test]
    fn close_values_need_more_precision() {
        // log₂(1 + 2^(1/2)) vs a nearby rational
        let x = e(&[(0, 1), (1, 2)]);
        let truth = (1.0 + 2f64.sqrt()).log2();
        let below = EntropySum::rational(rational((truth * 1e6).floor() as i64, 1_000_000));
        assert_eq!(
            compare_sums(&EntropySum::from(&x), &below, Precision::default()).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn wide_sums_fall_back_to_intervals() {
        let xs: Vec<_> = (0..70).map(|i| rational(i, 71)).collect();
        let a = ExactEntropy::from_exponents(xs.clone()).unwrap();
        let b = ExactEntropy::from_exponents(xs.iter().map(|x| x + rational(1, 97))).unwrap();
        let lhs = EntropySum::from(&a).add(&EntropySum::from(&b));
        let rhs = EntropySum::from(&b);
        assert_eq!(
            compare_sums(&lhs, &rhs, Precision { start_bits: 64, max_bits: 128 }).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn undecidable_tie_reports_exhaustion() {
        // log a + log b = log(ab), but the product has too many exponents
        // for the exact test, so intervals can only overlap.
        let xs: Vec<_> = (0..70).map(|i| rational(i, 71)).collect();
        let a = ExactEntropy::from_exponents(xs.clone()).unwrap();
        let b = ExactEntropy::from_exponents(xs.iter().map(|x| x + rational(1, 97))).unwrap();
        let lhs = EntropySum::from(&a).add(&EntropySum::from(&b));
        let rhs = EntropySum::from(&a.combine(&b));
        assert_eq!(
            compare_sums(&lhs, &rhs, Precision { start_bits: 64, max_bits: 256 }),
            Err(Error::PrecisionExhausted { bits: 256 })
        );
    }

    #[test]
    fn union_and_combine() {
        let a = e(&[(0, 1)]);
        let b = e(&[(1, 1)]);
        assert_eq!(a.union(&b), e(&[(0, 1), (1, 1)]));
        assert_eq!(e(&[(0, 1), (1, 1)]).combine(&e(&[(0, 1), (1, 1)])), e(&[(0, 1), (1, 1), (1, 1), (2, 1)]));
        assert!((e(&[(0, 1), (1, 1)]).to_f64() - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn precision_env_default() {
        let p = Precision::default();
        assert_eq!(p.schedule().collect::<Vec<_>>(), vec![128, 256, 512, 1024, 2048, 4096]);
    }
}
