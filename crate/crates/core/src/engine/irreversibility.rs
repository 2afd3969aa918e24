//! Irreversibility brackets from bit processes, demon planning and the
//! Landauer checks.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::numeric::{to_decimal, Numeric};
use super::probability::shannon_decomposition;
use crate::eidostate::Eidostate;
use crate::entropy::{compare_sums, EntropySum};
use crate::oracle::{record_trees, ModelOracle};
use crate::state::StateExpr;
use crate::{Error, Result};

/// A bracket `lower ≤ 𝕀(⟨a,b⟩) ≤ upper` with `lower ∈ L` and `upper ∈ U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IrreversibilityEstimate {
    #[serde(serialize_with = "ser_rational")]
    pub lower: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub upper: BigRational,
    pub q_max: u64,
}

fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl IrreversibilityEstimate {
    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    /// `other` lies inside `self`.
    pub fn encloses(&self, other: &IrreversibilityEstimate) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

struct BitLadder<'a> {
    oracle: &'a dyn ModelOracle,
    a: Eidostate,
    b: Eidostate,
    bit: Eidostate,
    rec: Eidostate,
}

impl BitLadder<'_> {
    fn side(&self, base: &Eidostate, q: u64, pad: &Eidostate, k: u64) -> Result<Eidostate> {
        let body = base.n_copies(q as usize)?;
        Ok(if k == 0 {
            body
        } else {
            body.combine(&pad.n_copies(k as usize)?)
        })
    }

    /// `q·a + p·I_b` and `q·b + p·r`, with the pads swapped for `p < 0`.
    fn sides(&self, q: u64, p: i64) -> Result<(Eidostate, Eidostate)> {
        let k = p.unsigned_abs();
        if p >= 0 {
            Ok((self.side(&self.a, q, &self.bit, k)?, self.side(&self.b, q, &self.rec, k)?))
        } else {
            Ok((self.side(&self.a, q, &self.rec, k)?, self.side(&self.b, q, &self.bit, k)?))
        }
    }

    /// `p/q ∈ L`: `qα → pΘ_b`.
    fn lower_member(&self, q: u64, p: i64) -> Result<bool> {
        let (x, y) = self.sides(q, p)?;
        self.oracle.arrow(&x, &y)
    }

    /// `p/q ∈ U`: `qα ← pΘ_b`.
    fn upper_member(&self, q: u64, p: i64) -> Result<bool> {
        let (x, y) = self.sides(q, p)?;
        self.oracle.arrow(&y, &x)
    }
}

/// Largest `p` in `[lo, hi]` with `pred(p)`, for `pred` true below a threshold
/// and false above it. Gallops outward from `hint`, then bisects.
fn last_true(
    lo: i64,
    hi: i64,
    hint: i64,
    mut pred: impl FnMut(i64) -> Result<bool>,
) -> Result<Option<i64>> {
    let h = hint.clamp(lo, hi);
    let (mut yes, mut no);
    if pred(h)? {
        yes = h;
        let mut step = 1i64;
        loop {
            let cand = (yes + step).min(hi);
            if cand == yes {
                return Ok(Some(yes));
            }
            if pred(cand)? {
                yes = cand;
                step *= 2;
            } else {
                no = cand;
                break;
            }
        }
    } else {
        no = h;
        let mut step = 1i64;
        loop {
            let cand = (no - step).max(lo);
            if cand == no {
                return Ok(None);
            }
            if pred(cand)? {
                yes = cand;
                break;
            }
            no = cand;
            step *= 2;
        }
    }
    while no - yes > 1 {
        let mid = yes + (no - yes) / 2;
        if pred(mid)? {
            yes = mid;
        } else {
            no = mid;
        }
    }
    Ok(Some(yes))
}

fn ceil_abs(e: &EntropySum) -> i64 {
    e.to_f64().abs().ceil().min(1e12) as i64
}

/// Dedekind-cut estimate of `𝕀(⟨a,b⟩)` from the arrow relation alone.
///
/// For every `q ≤ q_max` the largest `p` with `qα → pΘ_b` and the smallest
/// `p` with `pΘ_b → qα` are located; the tightest ratios form the bracket.
pub fn irreversibility_estimate(
    a: &StateExpr,
    b: &StateExpr,
    q_max: u64,
    oracle: &dyn ModelOracle,
) -> Result<IrreversibilityEstimate> {
    if q_max == 0 {
        return Err(Error::InvalidInput("q_max must be at least 1".into()));
    }
    let sa = Eidostate::singleton(a.clone());
    let sb = Eidostate::singleton(b.clone());
    if !oracle.possible(&sa, &sb)? {
        return Err(Error::ImpossibleProcess(format!("<{a}, {b}>")));
    }
    let scale = ceil_abs(&oracle.state_entropy(a)?.into()) + ceil_abs(&oracle.state_entropy(b)?.into());
    let ladder = BitLadder {
        oracle,
        a: sa,
        b: sb,
        bit: oracle.make_bit_state(),
        rec: Eidostate::singleton(oracle.make_record()),
    };
    let mut lower: Option<BigRational> = None;
    let mut upper: Option<BigRational> = None;
    for q in 1..=q_max {
        let cap = (q as i64).saturating_mul(scale).saturating_add(8);
        let mid = match (&lower, &upper) {
            (Some(l), Some(u)) => (l + u) / BigInt::from(2),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => BigRational::zero(),
        };
        let hint = (mid * BigInt::from(q)).round().to_integer().to_i64().unwrap_or(0);
        let pl = last_true(-cap, cap, hint, |p| ladder.lower_member(q, p))?;
        let pu = last_true(-cap, cap, -hint, |p| ladder.upper_member(q, -p))?.map(|p| -p);
        if let Some(p) = pl {
            let x = BigRational::new(p.into(), BigInt::from(q));
            if lower.as_ref().map_or(true, |l| &x > l) {
                lower = Some(x);
            }
        }
        if let Some(p) = pu {
            let x = BigRational::new(p.into(), BigInt::from(q));
            if upper.as_ref().map_or(true, |u| &x < u) {
                upper = Some(x);
            }
        }
    }
    match (lower, upper) {
        (Some(lower), Some(upper)) => Ok(IrreversibilityEstimate { lower, upper, q_max }),
        _ => Err(Error::ResourceLimit {
            what: "irreversibility search range",
            size: q_max,
            limit: scale.unsigned_abs(),
        }),
    }
}

/// Outcome of a search for the smallest information state `J` with `A → B + J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "size")]
pub enum DemonPlan {
    Found(u64),
    /// Not reached with `|J| ≤ n_max`.
    ExceedsBound,
    /// The components of content differ, so no `J` can help.
    Blocked,
}

impl DemonPlan {
    pub fn found(self) -> Option<u64> {
        match self {
            DemonPlan::Found(n) => Some(n),
            _ => None,
        }
    }
}

fn common_components(e: &Eidostate, oracle: &dyn ModelOracle) -> Result<Option<Vec<BigRational>>> {
    let mut seen: Option<Vec<BigRational>> = None;
    for x in super::elements(e)? {
        let c = oracle.components(&x)?;
        match &seen {
            None => seen = Some(c),
            Some(s) if *s != c => return Ok(None),
            Some(_) => {}
        }
    }
    Ok(seen)
}

pub fn min_information_to_transform(
    a: &Eidostate,
    b: &Eidostate,
    n_max: u64,
    oracle: &dyn ModelOracle,
) -> Result<DemonPlan> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    if let (Some(ca), Some(cb)) = (common_components(a, oracle)?, common_components(b, oracle)?) {
        if ca != cb {
            return Ok(DemonPlan::Blocked);
        }
    }
    let n_max_usize = usize::try_from(n_max).map_err(|_| Error::ResourceLimit {
        what: "information state size",
        size: n_max,
        limit: usize::MAX as u64,
    })?;
    let trees = record_trees(&oracle.make_record(), n_max_usize);
    let reach = |n: u64| -> Result<bool> {
        let j = Eidostate::from_states(trees[..n as usize].iter().cloned())?;
        oracle.arrow(a, &b.combine(&j))
    };
    if !reach(n_max)? {
        return Ok(DemonPlan::ExceedsBound);
    }
    let (mut no, mut yes) = (0u64, n_max);
    while yes - no > 1 {
        let mid = no + (yes - no) / 2;
        if reach(mid)? {
            yes = mid;
        } else {
            no = mid;
        }
    }
    Ok(DemonPlan::Found(yes))
}

/// Some `J` with `|J| ≤ n_max` gives `A → B + J` or `B → A + J`.
pub fn demonically_possible(
    a: &Eidostate,
    b: &Eidostate,
    n_max: u64,
    oracle: &dyn ModelOracle,
) -> Result<bool> {
    Ok(min_information_to_transform(a, b, n_max, oracle)?.found().is_some()
        || min_information_to_transform(b, a, n_max, oracle)?.found().is_some())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandauerVerdict {
    /// `a + I_b → b`.
    pub applicable: bool,
    /// `𝕊(b) ≥ 𝕊(a) + 1`.
    pub bound_holds: bool,
    pub margin: f64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub margin_exact: Option<BigRational>,
}

fn ser_opt_rational<S: serde::Serializer>(
    x: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl LandauerVerdict {
    pub fn violated(&self) -> bool {
        self.applicable && !self.bound_holds
    }
}

pub fn landauer_check(a: &StateExpr, b: &StateExpr, oracle: &dyn ModelOracle) -> Result<LandauerVerdict> {
    let erase = Eidostate::singleton(a.clone()).combine(&oracle.make_bit_state());
    let applicable = oracle.arrow(&erase, &Eidostate::singleton(b.clone()))?;
    let sa = EntropySum::from(oracle.state_entropy(a)?);
    let sb = EntropySum::from(oracle.state_entropy(b)?);
    let one = EntropySum::rational(BigRational::from_integer(1.into()));
    let bound_holds = compare_sums(&sb, &sa.add(&one), oracle.precision())? != Ordering::Less;
    let margin_exact = match (sa.as_rational(), sb.as_rational()) {
        (Some(x), Some(y)) => Some(y - x - BigRational::from_integer(1.into())),
        _ => None,
    };
    let margin = match &margin_exact {
        Some(m) => m.to_f64().unwrap_or(f64::NAN),
        None => sb.to_f64() - sa.to_f64() - 1.0,
    };
    Ok(LandauerVerdict {
        applicable,
        bound_holds,
        margin,
        margin_exact,
    })
}

/// `Δ⟨𝕊⟩ ≥ −ΔH` for a natural process between uniform eidostates.
#[derive(Debug, Clone)]
pub struct InfoBalance {
    pub applicable: bool,
    pub delta_mean: BigFloat,
    pub delta_shannon: BigFloat,
    pub holds: bool,
}

impl InfoBalance {
    pub fn describe(&self, digits: usize) -> String {
        format!(
            "applicable={} delta_mean={} delta_shannon={} holds={}",
            self.applicable,
            to_decimal(&self.delta_mean, digits),
            to_decimal(&self.delta_shannon, digits),
            self.holds
        )
    }
}

pub fn info_balance_check(
    a: &Eidostate,
    b: &Eidostate,
    oracle: &dyn ModelOracle,
    bits: usize,
) -> Result<InfoBalance> {
    let ra = shannon_decomposition(a, oracle, bits, super::numeric::DEFAULT_DIGITS)?;
    let rb = shannon_decomposition(b, oracle, bits, super::numeric::DEFAULT_DIGITS)?;
    let applicable = oracle.arrow(a, b)?;
    let num = Numeric::new(bits)?;
    let delta_mean = num.sub(&rb.mean_state_entropy, &ra.mean_state_entropy);
    let delta_shannon = num.sub(&rb.shannon_term, &ra.shannon_term);
    let slack = num.add(&delta_mean, &delta_shannon);
    let tol = num.from_f64(2f64.powi(-(bits as i32) / 2));
    let holds = !applicable || !slack.add(&tol, bits, astro_float::RoundingMode::ToEven).is_negative();
    Ok(InfoBalance {
        applicable,
        delta_mean,
        delta_shannon,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::rational;
    use crate::macrostate::MacroModel;
    use crate::quantum::QuantumModel;

    fn s(n: i64, d: i64) -> StateExpr {
        MacroModel::s(&rational(n, d))
    }

    #[test]
    fn galloping_search_finds_threshold() {
        for t in [-40i64, -1, 0, 3, 17, 99] {
            for hint in [-50, 0, 5, 200] {
                let got = last_true(-100, 100, hint, |p| Ok(p <= t)).unwrap();
                assert_eq!(got, Some(t));
            }
        }
        assert_eq!(last_true(-5, 5, 0, |_| Ok(false)).unwrap(), None);
        assert_eq!(last_true(-5, 5, 0, |_| Ok(true)).unwrap(), Some(5));
    }

    #[test]
    fn brackets_around_entropy_differences() {
        let m = MacroModel::new();
        let est = irreversibility_estimate(&s(0, 1), &s(1, 1), 16, &m).unwrap();
        assert!(est.contains(&rational(1, 1)));
        assert!(est.width() <= rational(2, 16));
        let est = irreversibility_estimate(&s(1, 2), &s(1, 1), 16, &m).unwrap();
        assert!(est.contains(&rational(1, 2)));
        let est = irreversibility_estimate(&s(1, 3), &s(1, 3), 8, &m).unwrap();
        assert!(est.contains(&rational(0, 1)));
        assert!(est.width() <= rational(2, 8));
        let err = irreversibility_estimate(&m.make_record(), &s(1, 1), 4, &m);
        assert!(matches!(err, Err(Error::ImpossibleProcess(_))));
    }

    #[test]
    fn brackets_are_nested_in_q_max() {
        let m = MacroModel::new();
        let a = StateExpr::pair(s(1, 3), s(0, 1));
        let b = StateExpr::pair(s(1, 1), s(1, 5));
        let coarse = irreversibility_estimate(&a, &b, 5, &m).unwrap();
        let fine = irreversibility_estimate(&a, &b, 12, &m).unwrap();
        assert!(coarse.encloses(&fine));
        assert!(fine.contains(&rational(13, 15)));
    }

    #[test]
    fn quantum_bracket_for_irrational_difference() {
        let q = QuantumModel::new();
        let est = irreversibility_estimate(&QuantumModel::d(2), &QuantumModel::d(3), 16, &q).unwrap();
        let d = 3f64.log2() - 1.0;
        assert!(est.lower.to_f64().unwrap() <= d && d <= est.upper.to_f64().unwrap());
        assert!(est.width() <= rational(2, 16));
    }

    #[test]
    fn demon_plans() {
        let m = MacroModel::new();
        let one = |x: StateExpr| Eidostate::singleton(x);
        assert_eq!(
            min_information_to_transform(&one(s(0, 1)), &one(s(1, 1)), 64, &m).unwrap(),
            DemonPlan::Found(1)
        );
        assert_eq!(
            min_information_to_transform(&one(s(1, 1)), &one(s(0, 1)), 64, &m).unwrap(),
            DemonPlan::Found(2)
        );
        assert_eq!(
            min_information_to_transform(&one(s(1, 1)), &one(s(0, 1)), 1, &m).unwrap(),
            DemonPlan::ExceedsBound
        );
        let r = m.make_record();
        assert_eq!(
            min_information_to_transform(&one(r.clone()), &one(s(0, 1)), 64, &m).unwrap(),
            DemonPlan::Blocked
        );
        assert!(demonically_possible(&one(s(1, 1)), &one(s(0, 1)), 1024, &m).unwrap());
        assert!(!demonically_possible(&one(r), &one(s(0, 1)), 1024, &m).unwrap());
        assert!(demonically_possible(&one(s(1, 4)), &one(s(1, 4)), 1, &m).unwrap());
    }

    #[test]
    fn landauer_cases() {
        let m = MacroModel::new();
        let v = landauer_check(&s(0, 1), &s(1, 1), &m).unwrap();
        assert!(v.applicable && v.bound_holds);
        assert_eq!(v.margin_exact, Some(rational(0, 1)));
        let v = landauer_check(&s(0, 1), &s(1, 2), &m).unwrap();
        assert!(!v.applicable && !v.violated());
        let v = landauer_check(&s(1, 2), &s(1, 2), &m).unwrap();
        assert!(!v.applicable);
        assert_eq!(v.margin, -1.0);
    }

    #[test]
    fn information_balance() {
        let m = MacroModel::new();
        let r = m.make_record();
        let a = Eidostate::singleton(s(0, 1)).combine(&m.make_bit_state());
        let b = Eidostate::singleton(StateExpr::pair(s(1, 1), r));
        let ib = info_balance_check(&a, &b, &m, 192).unwrap();
        assert!(ib.applicable && ib.holds);
        let x = Eidostate::from_states([s(0, 1), s(1, 2)]).unwrap();
        let same = info_balance_check(&x, &x, &m, 192).unwrap();
        assert!(same.holds && same.delta_mean.is_zero());
    }
}
