//! Entropic probability and the Shannon split of a uniform entropy.

use std::collections::BTreeSet;

use astro_float::BigFloat;
use serde::Serialize;

use super::numeric::{to_decimal, to_f64, Numeric};
use super::{entropy_of_states, require_uniform};
use crate::eidostate::Eidostate;
use crate::oracle::ModelOracle;
use crate::state::StateExpr;
use crate::{Error, Result};

/// `P(a|E) = 2^{𝕊(a) − 𝕊(E)}` for `a ∈ E`, else 0.
pub fn entropic_probability(
    a: &StateExpr,
    e: &Eidostate,
    oracle: &dyn ModelOracle,
    bits: usize,
) -> Result<BigFloat> {
    let xs = require_uniform(e, oracle)?;
    let mut num = Numeric::new(bits)?;
    if !e.contains(a) {
        return Ok(num.zero());
    }
    let total = num.power(&entropy_of_states(&xs, oracle)?);
    let part = num.power(&oracle.state_entropy(a)?);
    Ok(num.div(&part, &total))
}

fn mass(
    xs: &BTreeSet<&StateExpr>,
    e: &Eidostate,
    oracle: &dyn ModelOracle,
    num: &mut Numeric,
) -> Result<BigFloat> {
    let mut acc = num.zero();
    for x in xs.iter().filter(|x| e.contains(x)) {
        let p = num.power(&oracle.state_entropy(x)?);
        acc = num.add(&acc, &p);
    }
    Ok(acc)
}

/// `P(B | A ∩ E) = P(B ∩ A | E) / P(A | E)`.
pub fn conditional_probability(
    b: &[StateExpr],
    a: &[StateExpr],
    e: &Eidostate,
    oracle: &dyn ModelOracle,
    bits: usize,
) -> Result<BigFloat> {
    require_uniform(e, oracle)?;
    let a_set: BTreeSet<&StateExpr> = a.iter().collect();
    if !a_set.iter().any(|x| e.contains(x)) {
        return Err(Error::InvalidInput("conditioning set misses the eidostate".into()));
    }
    let b_set: BTreeSet<&StateExpr> = b.iter().collect();
    let both: BTreeSet<&StateExpr> = a_set.intersection(&b_set).copied().collect();
    let mut num = Numeric::new(bits)?;
    let den = mass(&a_set, e, oracle, &mut num)?;
    let top = mass(&both, e, oracle, &mut num)?;
    Ok(num.div(&top, &den))
}

/// The split `𝕊(E) = ⟨𝕊⟩ + H` with entropic probabilities.
#[derive(Debug, Clone)]
pub struct ProbabilityReport {
    pub support: Vec<(StateExpr, BigFloat)>,
    pub entropy_total: BigFloat,
    pub mean_state_entropy: BigFloat,
    pub shannon_term: BigFloat,
    /// `|𝕊(E) − ⟨𝕊⟩ − H|`.
    pub residual: BigFloat,
    pub digits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityEntry {
    pub state: String,
    pub probability: String,
}

/// Decimal rendering of a [`ProbabilityReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityView {
    pub support: Vec<ProbabilityEntry>,
    pub entropy_total: String,
    pub mean_state_entropy: String,
    pub shannon_term: String,
    pub residual: String,
}

impl ProbabilityReport {
    pub fn view(&self) -> ProbabilityView {
        let d = |x: &BigFloat| to_decimal(x, self.digits);
        ProbabilityView {
            support: self
                .support
                .iter()
                .map(|(s, p)| ProbabilityEntry {
                    state: s.to_string(),
                    probability: d(p),
                })
                .collect(),
            entropy_total: d(&self.entropy_total),
            mean_state_entropy: d(&self.mean_state_entropy),
            shannon_term: d(&self.shannon_term),
            residual: to_decimal(&self.residual, 3),
        }
    }

    pub fn probability_sum(&self, bits: usize) -> Result<BigFloat> {
        let num = Numeric::new(bits)?;
        Ok(self.support.iter().fold(num.zero(), |acc, (_, p)| num.add(&acc, p)))
    }

    pub fn residual_f64(&self) -> f64 {
        to_f64(&self.residual)
    }
}

pub fn shannon_decomposition(
    e: &Eidostate,
    oracle: &dyn ModelOracle,
    bits: usize,
    digits: usize,
) -> Result<ProbabilityReport> {
    let xs = require_uniform(e, oracle)?;
    let mut num = Numeric::new(bits)?;
    let whole = entropy_of_states(&xs, oracle)?;
    let total_power = num.power(&whole);
    let entropy_total = num.log2(&total_power);
    let mut support = Vec::with_capacity(xs.len());
    let mut mean = num.zero();
    let mut h = num.zero();
    for x in xs {
        let sx = oracle.state_entropy(&x)?;
        let px = num.power(&sx);
        let p = num.div(&px, &total_power);
        let s_val = num.entropy(&sx);
        mean = num.add(&mean, &num.mul(&p, &s_val));
        let lp = num.log2(&p);
        h = num.sub(&h, &num.mul(&p, &lp));
        support.push((x, p));
    }
    let residual = num.sub(&num.sub(&entropy_total, &mean), &h).abs();
    Ok(ProbabilityReport {
        support,
        entropy_total,
        mean_state_entropy: mean,
        shannon_term: h,
        residual,
        digits,
    })
}

/// `𝕊(E) − (⟨𝕊⟩_{P'} + H(P'))`, the Gibbs gap of a trial distribution given
/// in the canonical element order of `E`.
pub fn gibbs_gap(
    e: &Eidostate,
    dist: &[f64],
    oracle: &dyn ModelOracle,
    bits: usize,
) -> Result<BigFloat> {
    let xs = require_uniform(e, oracle)?;
    if dist.len() != xs.len() {
        return Err(Error::InvalidDistribution(format!(
            "{} weights for {} states",
            dist.len(),
            xs.len()
        )));
    }
    if dist.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidDistribution("weights must be finite and nonnegative".into()));
    }
    let sum: f64 = dist.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
    }
    let mut num = Numeric::new(bits)?;
    let norm = dist.iter().fold(num.zero(), |acc, p| num.add(&acc, &num.from_f64(*p)));
    let whole = entropy_of_states(&xs, oracle)?;
    let mut gap = num.entropy(&whole);
    for (x, p) in xs.iter().zip(dist) {
        if *p == 0.0 {
            continue;
        }
        let p = num.div(&num.from_f64(*p), &norm);
        let s_val = num.entropy(&oracle.state_entropy(x)?);
        let lp = num.log2(&p);
        gap = num.sub(&gap, &num.mul(&p, &num.sub(&s_val, &lp)));
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::numeric::{to_rational, WORK_BITS};
    use crate::entropy::rational;
    use crate::macrostate::MacroModel;

    fn s(n: i64, d: i64) -> StateExpr {
        MacroModel::s(&rational(n, d))
    }

    #[test]
    fn probabilities_of_small_sets() {
        let m = MacroModel::new();
        let ib = m.make_bit_state();
        let r = m.make_record();
        let p = entropic_probability(&r, &ib, &m, WORK_BITS).unwrap();
        assert_eq!(to_rational(&p).unwrap(), rational(1, 2));
        let e = Eidostate::from_states([s(0, 1), s(1, 1)]).unwrap();
        let p = entropic_probability(&s(1, 1), &e, &m, WORK_BITS).unwrap();
        assert_eq!(to_decimal(&p, 6), "0.666667");
        let p = entropic_probability(&s(1, 2), &e, &m, WORK_BITS).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn conditional_rules() {
        let m = MacroModel::new();
        let all = [s(0, 1), s(1, 2), s(1, 1)];
        let e = Eidostate::from_states(all.clone()).unwrap();
        let one = conditional_probability(&all, &all, &e, &m, WORK_BITS).unwrap();
        assert_eq!(to_decimal(&one, 10), "1.000000000");
        let zero = conditional_probability(&[s(0, 1)], &[s(1, 1)], &e, &m, WORK_BITS).unwrap();
        assert!(zero.is_zero());
        assert!(conditional_probability(&all, &[s(1, 4)], &e, &m, WORK_BITS).is_err());
    }

    #[test]
    fn shannon_split_cases() {
        let m = MacroModel::new();
        let info = crate::oracle::information_state(&m.make_record(), 4).unwrap();
        let rep = shannon_decomposition(&info, &m, WORK_BITS, 30).unwrap();
        assert!(rep.mean_state_entropy.is_zero());
        assert_eq!(to_decimal(&rep.shannon_term, 10), "2.000000000");

        let single = Eidostate::singleton(s(1, 2));
        let rep = shannon_decomposition(&single, &m, WORK_BITS, 30).unwrap();
        assert!(rep.shannon_term.is_zero());

        let e = Eidostate::from_states([s(0, 1), s(1, 1)]).unwrap();
        let rep = shannon_decomposition(&e, &m, WORK_BITS, 30).unwrap();
        let v = rep.view();
        assert_eq!(v.entropy_total, "1.58496250072115618145373894395");
        assert_eq!(v.mean_state_entropy, "0.666666666666666666666666666667");
        // log2(3) - 2/3
        assert_eq!(v.shannon_term, "0.918295834054489514787072277281");
        assert!(rep.residual_f64() < 1e-40);
    }

    #[test]
    fn gibbs_gap_cases() {
        let m = MacroModel::new();
        let e = Eidostate::from_states([s(0, 1), s(1, 1)]).unwrap();
        let g = gibbs_gap(&e, &[1.0 / 3.0, 2.0 / 3.0], &m, WORK_BITS).unwrap();
        assert!(to_f64(&g).abs() < 1e-12);
        // log2(3) - 3/2
        let g = gibbs_gap(&e, &[0.5, 0.5], &m, WORK_BITS).unwrap();
        assert!((to_f64(&g) - 0.084_962_500_721_156_2).abs() < 1e-15);
        // log2(3) - 1
        let g = gibbs_gap(&e, &[0.0, 1.0], &m, WORK_BITS).unwrap();
        assert!((to_f64(&g) - 0.584_962_500_721_156_2).abs() < 1e-15);
        assert!(gibbs_gap(&e, &[0.5, 0.6], &m, WORK_BITS).is_err());
        assert!(gibbs_gap(&e, &[1.0], &m, WORK_BITS).is_err());
    }
}
