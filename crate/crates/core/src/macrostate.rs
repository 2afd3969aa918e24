//! The atomic-state model with a single component of content.
//!
//! Atoms carry an integer content `Q` and a rational entropy `𝕊`. Besides
//! registered atoms, two names always resolve: `r` (the record atom, `Q = 0`,
//! `𝕊 = 0`) and the family `s[λ]` for a reduced rational `0 ≤ λ ≤ 1`
//! (`Q = 1`, `𝕊 = λ`), e.g. `s[0]`, `s[1/2]`, `s[1]`.
//!
//! `A → B` holds when the N-, Q- and 𝕊-criteria hold on the NU-decompositions
//! of `A` and `B`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};

use crate::eidostate::Eidostate;
use crate::entropy::{compare_sums, EntropySum, ExactEntropy, Precision};
use crate::oracle::{ModelOracle, StateEquivalence};
use crate::state::{AtomId, StateExpr};
use crate::{Error, Result};

/// Largest denominator accepted for built-in `s[p/q]` atoms.
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1 << 16;

pub const RECORD_ATOM: &str = "r";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomDef {
    pub q: u64,
    pub s: BigRational,
}

impl AtomDef {
    pub fn new(q: u64, s: BigRational) -> Result<Self> {
        if s.is_negative() || s > BigRational::one() {
            return Err(Error::InvalidAtom(format!("S = {s} is outside [0, 1]")));
        }
        if q == 0 && !s.is_zero() {
            return Err(Error::InvalidAtom(format!(
                "S = {s} exceeds Q = 0; atoms with no content carry no entropy"
            )));
        }
        Ok(AtomDef { q, s })
    }

    pub fn record() -> Self {
        AtomDef {
            q: 0,
            s: BigRational::zero(),
        }
    }

    pub fn s_lambda(lambda: BigRational) -> Result<Self> {
        AtomDef::new(1, lambda)
    }
}

/// Deliberate corruptions of the arrow relation, for checking that the
/// harness notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fault {
    /// Skip the Q-criterion.
    DropQCriterion,
    /// Require `𝕊(U_A) ≥ 𝕊(U_B)` instead of `≤`.
    FlipEntropyCriterion,
    /// Give the record atom entropy 1 inside the arrow decision.
    BreakRecordFreeness,
}

impl Fault {
    pub const ALL: [Fault; 3] = [
        Fault::DropQCriterion,
        Fault::FlipEntropyCriterion,
        Fault::BreakRecordFreeness,
    ];
}

/// Prime factors split by whether `Q` is constant over each factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuDecomposition {
    pub non_uniform: Vec<Eidostate>,
    pub uniform: Vec<Eidostate>,
}

/// Summary of the uniform part of an NU-decomposition.
#[derive(Debug, Clone)]
struct UniformPart {
    q: u64,
    entropy: EntropySum,
}

#[derive(Debug, Clone)]
pub struct MacroModel {
    atoms: BTreeMap<AtomId, AtomDef>,
    order: Vec<AtomId>,
    max_denominator: u64,
    precision: Precision,
    fault: Option<Fault>,
}

impl Default for MacroModel {
    fn default() -> Self {
        MacroModel::new()
    }
}

impl MacroModel {
    pub fn new() -> Self {
        MacroModel {
            atoms: BTreeMap::new(),
            order: Vec::new(),
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            precision: Precision::from_env(),
            fault: None,
        }
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_max_denominator(mut self, d: u64) -> Self {
        self.max_denominator = d.max(1);
        self
    }

    pub fn fault(&self) -> Option<Fault> {
        self.fault
    }

    pub fn register(&mut self, name: impl AsRef<str>, def: AtomDef) -> Result<AtomId> {
        let id = AtomId::new(name);
        if self.atoms.contains_key(&id) {
            return Err(Error::InvalidAtom(format!("atom `{id}` is already defined")));
        }
        self.atoms.insert(id.clone(), def);
        self.order.push(id.clone());
        Ok(id)
    }

    /// Registered atoms in registration order.
    pub fn registered(&self) -> impl Iterator<Item = (&AtomId, &AtomDef)> {
        self.order.iter().map(move |id| (id, &self.atoms[id]))
    }

    /// Name of the built-in atom `s[λ]`.
    pub fn s_name(lambda: &BigRational) -> String {
        format!("s[{lambda}]")
    }

    /// The state `s[λ]`.
    pub fn s(lambda: &BigRational) -> StateExpr {
        StateExpr::atom(Self::s_name(lambda))
    }

    pub fn resolve(&self, id: &AtomId) -> Result<AtomDef> {
        if let Some(def) = self.atoms.get(id) {
            return Ok(def.clone());
        }
        let name = id.as_str();
        if name == RECORD_ATOM {
            return Ok(AtomDef::record());
        }
        if let Some(inner) = name.strip_prefix("s[").and_then(|s| s.strip_suffix(']')) {
            let lambda = parse_rational(inner)
                .filter(|l| l.to_string() == inner)
                .ok_or_else(|| Error::UnknownAtom(name.to_owned()))?;
            if lambda.denom() > &BigInt::from(self.max_denominator) {
                return Err(Error::InvalidAtom(format!(
                    "denominator of {lambda} exceeds {}",
                    self.max_denominator
                )));
            }
            return AtomDef::s_lambda(lambda);
        }
        Err(Error::UnknownAtom(name.to_owned()))
    }

    /// `Q(a)`: sum over leaves.
    pub fn q_value(&self, a: &StateExpr) -> Result<u64> {
        a.fold_leaves(|id| self.resolve(id).map(|d| d.q), |x, y| x + y)
    }

    /// `𝕊(a)`: sum over leaves.
    pub fn s_value(&self, a: &StateExpr) -> Result<BigRational> {
        a.fold_leaves(|id| self.resolve(id).map(|d| d.s), |x, y| x + y)
    }

    /// Entropy as seen by the arrow decision, which differs from `s_value`
    /// only under [`Fault::BreakRecordFreeness`].
    fn arrow_s_value(&self, a: &StateExpr) -> Result<BigRational> {
        if self.fault != Some(Fault::BreakRecordFreeness) {
            return self.s_value(a);
        }
        let record = self.record_id();
        a.fold_leaves(
            |id| {
                if *id == record {
                    Ok(BigRational::one())
                } else {
                    self.resolve(id).map(|d| d.s)
                }
            },
            |x, y| x + y,
        )
    }

    /// `Q` if it is the same for every element of `e`.
    pub fn uniform_q(&self, e: &Eidostate) -> Result<Option<u64>> {
        let mut q = None;
        for f in e.prime_factors() {
            let mut it = f.iter();
            let first = self.q_value(&it.next().expect("nonempty"))?;
            for s in it {
                if self.q_value(&s)? != first {
                    return Ok(None);
                }
            }
            q = Some(q.unwrap_or(0) + first);
        }
        Ok(q)
    }

    pub fn is_uniform(&self, e: &Eidostate) -> Result<bool> {
        Ok(self.uniform_q(e)?.is_some())
    }

    pub fn nu_decompose(&self, e: &Eidostate) -> Result<NuDecomposition> {
        let mut dec = NuDecomposition {
            non_uniform: Vec::new(),
            uniform: Vec::new(),
        };
        for f in e.prime_factors() {
            if self.uniform_q(&f)?.is_some() {
                dec.uniform.push(f);
            } else {
                dec.non_uniform.push(f);
            }
        }
        Ok(dec)
    }

    /// Exponent multiset `{ 𝕊(e) : e ∈ E }` of a uniform eidostate, when it
    /// is small enough to list.
    pub fn entropy_exact(&self, e: &Eidostate) -> Result<ExactEntropy> {
        if !self.is_uniform(e)? {
            return Err(Error::NonUniform(format!("{e}")));
        }
        let mut acc: Option<ExactEntropy> = None;
        for f in e.prime_factors() {
            let part = ExactEntropy::from_exponents(
                f.iter().map(|s| self.s_value(&s)).collect::<Result<Vec<_>>>()?,
            )?;
            acc = Some(match acc {
                None => part,
                Some(prev) => prev.combine(&part),
            });
        }
        Ok(acc.expect("at least one factor"))
    }

    /// `𝕊` of a uniform eidostate as a sum of per-factor logarithms.
    pub fn entropy_sum(&self, e: &Eidostate) -> Result<EntropySum> {
        Ok(self.uniform_part(&self.nu_decompose(e)?.uniform, false)?
            .map(|u| u.entropy)
            .unwrap_or_else(EntropySum::zero))
    }

    fn uniform_part(&self, factors: &[Eidostate], faulty: bool) -> Result<Option<UniformPart>> {
        if factors.is_empty() {
            return Ok(None);
        }
        let mut q = 0;
        let mut entropy = EntropySum::zero();
        for f in factors {
            q += self.q_value(&f.iter().next().expect("nonempty"))?;
            let exps = f
                .iter()
                .map(|s| {
                    if faulty {
                        self.arrow_s_value(&s)
                    } else {
                        self.s_value(&s)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            entropy = entropy.add_entropy(&ExactEntropy::from_exponents(exps)?);
        }
        Ok(Some(UniformPart { q, entropy }))
    }

    pub fn compare_entropy(&self, x: &ExactEntropy, y: &ExactEntropy) -> Result<Ordering> {
        crate::entropy::compare_entropy(x, y, self.precision)
    }

    /// Id of the record atom: the first registered atom with `Q = 0`, or `r`.
    pub fn record_id(&self) -> AtomId {
        self.registered()
            .find(|(_, d)| d.q == 0)
            .map(|(id, _)| id.clone())
            .unwrap_or_else(|| AtomId::new(RECORD_ATOM))
    }

    fn cmp(&self, a: &EntropySum, b: &EntropySum) -> Result<Ordering> {
        compare_sums(a, b, self.precision)
    }

    fn zero_atoms(&self) -> StateExpr {
        Self::s(&BigRational::zero())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

impl ModelOracle for MacroModel {
    fn name(&self) -> &str {
        "macro"
    }

    fn arrow(&self, a: &Eidostate, b: &Eidostate) -> Result<bool> {
        let da = self.nu_decompose(a)?;
        let db = self.nu_decompose(b)?;

        let mut na = da.non_uniform.clone();
        let mut nb = db.non_uniform.clone();
        na.sort();
        nb.sort();
        if na != nb {
            return Ok(false);
        }

        let ua = self.uniform_part(&da.uniform, true)?;
        let ub = self.uniform_part(&db.uniform, true)?;

        if self.fault != Some(Fault::DropQCriterion) {
            let q_ok = match (&ua, &ub) {
                (None, None) => true,
                (Some(u), None) | (None, Some(u)) => u.q == 0,
                (Some(x), Some(y)) => x.q == y.q,
            };
            if !q_ok {
                return Ok(false);
            }
        }

        let zero = EntropySum::zero();
        Ok(match (&ua, &ub) {
            (None, None) => true,
            (Some(x), None) => self.cmp(&x.entropy, &zero)? == Ordering::Equal,
            (None, Some(y)) => self.cmp(&y.entropy, &zero)? != Ordering::Less,
            (Some(x), Some(y)) => {
                let ord = self.cmp(&x.entropy, &y.entropy)?;
                if self.fault == Some(Fault::FlipEntropyCriterion) {
                    ord != Ordering::Less
                } else {
                    ord != Ordering::Greater
                }
            }
        })
    }

    fn state_entropy(&self, a: &StateExpr) -> Result<ExactEntropy> {
        Ok(ExactEntropy::single(self.s_value(a)?))
    }

    fn components(&self, a: &StateExpr) -> Result<Vec<BigRational>> {
        Ok(vec![BigRational::from_integer(self.q_value(a)?.into())])
    }

    fn is_record(&self, a: &StateExpr) -> Result<bool> {
        for id in a.leaves() {
            if self.resolve(id)?.q != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn is_mechanical(&self, a: &StateExpr) -> Result<bool> {
        for id in a.leaves() {
            let d = self.resolve(id)?;
            if d.q == 0 || !d.s.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn make_record(&self) -> StateExpr {
        StateExpr::Atom(self.record_id())
    }

    fn mechanical_family(&self, bound: usize) -> Vec<StateExpr> {
        let s0 = self.zero_atoms();
        (1..=bound.max(1))
            .map(|k| s0.copies(k).expect("k >= 1"))
            .collect()
    }

    fn atom_pool(&self) -> Vec<StateExpr> {
        let mut pool = vec![self.make_record()];
        for (n, d) in [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)] {
            pool.push(Self::s(&BigRational::new(n.into(), d.into())));
        }
        for (id, def) in self.registered() {
            let s = StateExpr::Atom(id.clone());
            if def.q > 0 && !pool.contains(&s) {
                pool.push(s);
            }
        }
        pool
    }

    fn random_atom(&self, rng: &mut dyn RngCore) -> StateExpr {
        if rng.gen_bool(0.5) {
            let pool = self.atom_pool();
            return pool[rng.gen_range(0..pool.len())].clone();
        }
        let d = rng.gen_range(1..=16u64);
        random_s_atom(rng.gen_range(0..=d), d)
    }

    fn state_equivalence(&self, e: &Eidostate) -> Result<StateEquivalence> {
        let q = self
            .uniform_q(e)?
            .ok_or_else(|| Error::NonUniform(format!("{e}")))?;
        let sigma = self.entropy_sum(e)?;
        let n = sigma.to_f64().floor() as i64 + 1;
        let n = {
            // make sure n > σ exactly
            let mut n = n.max(1);
            while self.cmp(&EntropySum::rational(BigRational::from_integer(n.into())), &sigma)?
                != Ordering::Greater
            {
                n += 1;
            }
            n as usize
        };
        let record = self.make_record();
        let s0 = self.zero_atoms();
        let e_state = if q == 0 {
            record
        } else {
            s0.copies(q as usize)?
        };
        let x = s0.copies(n)?;
        let nr = BigRational::from_integer(BigInt::from(n));

        if let Some(s) = sigma.as_rational() {
            let lambda = s / &nr;
            if lambda.denom() <= &BigInt::from(self.max_denominator) {
                let y = Self::s(&lambda).copies(n)?;
                return Ok(StateEquivalence {
                    e: e_state,
                    x,
                    y,
                    bracket: None,
                });
            }
        }

        // Nearest grid points below and above σ/n.
        let grid = BigRational::from_integer(BigInt::from(self.max_denominator));
        let value = |k: i64| -> BigRational {
            &nr * BigRational::new(BigInt::from(k), grid.to_integer())
        };
        let approx = sigma.to_f64() / n as f64 * self.max_denominator as f64;
        let mut k = approx.floor().to_i64().unwrap_or(0);
        while k > 0 && self.cmp(&EntropySum::rational(value(k)), &sigma)? == Ordering::Greater {
            k -= 1;
        }
        while self.cmp(&EntropySum::rational(value(k + 1)), &sigma)? != Ordering::Greater {
            k += 1;
        }
        let lo = BigRational::new(BigInt::from(k), grid.to_integer());
        let hi = BigRational::new(BigInt::from(k + 1), grid.to_integer());
        let y_lo = Self::s(&lo).copies(n)?;
        let y_hi = Self::s(&hi).copies(n)?;
        Ok(StateEquivalence {
            e: e_state,
            x,
            y: y_lo.clone(),
            bracket: Some((y_lo, y_hi)),
        })
    }

    fn precision(&self) -> Precision {
        self.precision
    }
}

/// Fresh `s[k/d]` atom for random generation.
pub fn random_s_atom(k: u64, d: u64) -> StateExpr {
    let d = d.max(1);
    MacroModel::s(&BigRational::new(BigInt::from(k.min(d)), BigInt::from(d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::rational;

    fn s(n: i64, d: i64) -> StateExpr {
        MacroModel::s(&rational(n, d))
    }

    fn r() -> StateExpr {
        StateExpr::atom("r")
    }

    fn one(x: StateExpr) -> Eidostate {
        Eidostate::singleton(x)
    }

    fn set(xs: &[StateExpr]) -> Eidostate {
        Eidostate::from_states(xs.iter().cloned()).unwrap()
    }

    fn p(a: StateExpr, b: StateExpr) -> StateExpr {
        StateExpr::pair(a, b)
    }

    #[test]
    fn q_and_s_values() {
        let m = MacroModel::new();
        assert_eq!(m.q_value(&r()).unwrap(), 0);
        assert_eq!(m.q_value(&p(s(1, 1), s(0, 1))).unwrap(), 2);
        assert_eq!(m.q_value(&p(r(), r())).unwrap(), 0);
        assert_eq!(m.s_value(&p(s(1, 1), s(0, 1))).unwrap(), rational(1, 1));
        assert_eq!(m.s_value(&p(s(1, 2), s(1, 2))).unwrap(), rational(1, 1));
        assert_eq!(m.s_value(&r()).unwrap(), rational(0, 1));
    }

    #[test]
    fn builtin_names() {
        let m = MacroModel::new();
        assert!(m.resolve(&AtomId::new("s[2/4]")).is_err());
        assert!(m.resolve(&AtomId::new("s[3/2]")).is_err());
        assert!(m.resolve(&AtomId::new("s[1/131072]")).is_err());
        assert!(m.resolve(&AtomId::new("t")).is_err());
        assert_eq!(m.resolve(&AtomId::new("s[1/3]")).unwrap().s, rational(1, 3));
    }

    #[test]
    fn atom_invariants() {
        assert!(AtomDef::new(0, rational(1, 2)).is_err());
        assert!(AtomDef::new(1, rational(-1, 2)).is_err());
        assert!(AtomDef::new(2, rational(1, 1)).is_ok());
    }

    #[test]
    fn uniformity() {
        let m = MacroModel::new();
        assert!(m.is_uniform(&set(&[s(0, 1), s(1, 1)])).unwrap());
        assert!(!m.is_uniform(&set(&[r(), s(0, 1)])).unwrap());
        assert!(m.is_uniform(&one(p(r(), s(1, 2)))).unwrap());
    }

    #[test]
    fn nu_decomposition() {
        let m = MacroModel::new();
        let d = m.nu_decompose(&set(&[s(0, 1), s(1, 1)])).unwrap();
        assert!(d.non_uniform.is_empty());
        let mixed = set(&[r(), s(0, 1)]);
        let d = m.nu_decompose(&mixed).unwrap();
        assert!(d.uniform.is_empty());
        assert_eq!(d.non_uniform, vec![mixed.clone()]);
        let both = mixed.combine(&set(&[s(0, 1), s(1, 1)]));
        let d = m.nu_decompose(&both).unwrap();
        assert_eq!(d.non_uniform.len(), 1);
        assert_eq!(d.uniform.len(), 1);
    }

    #[test]
    fn entropy_of_bit_state_and_pairs() {
        let m = MacroModel::new();
        let ib = set(&[r(), p(r(), r())]);
        let e = m.entropy_exact(&ib).unwrap();
        assert_eq!(e, ExactEntropy::from_exponents([rational(0, 1), rational(0, 1)]).unwrap());
        assert_eq!(e.as_rational(), Some(rational(1, 1)));
        let e = m.entropy_exact(&set(&[s(0, 1), s(1, 1)])).unwrap();
        assert!((e.to_f64() - 1.584962500721156).abs() < 1e-12);
        assert!(m.entropy_exact(&set(&[r(), s(0, 1)])).is_err());
    }

    #[test]
    fn arrow_examples() {
        let m = MacroModel::new();
        let ib = set(&[r(), p(r(), r())]);
        assert!(m.arrow(&one(r()), &ib).unwrap());
        assert!(!m.arrow(&ib, &one(r())).unwrap());
        let a = one(p(s(0, 1), s(1, 1)));
        let b = one(p(s(1, 2), s(1, 2)));
        assert!(m.arrow(&a, &b).unwrap() && m.arrow(&b, &a).unwrap());
        assert!(!m.arrow(&one(r()), &one(s(1, 1))).unwrap());
        assert!(!m.arrow(&one(s(1, 1)), &one(r())).unwrap());
    }

    #[test]
    fn records_are_free() {
        let m = MacroModel::new();
        let mixed = set(&[r(), s(0, 1)]);
        let with_r = mixed.combine(&one(r()));
        assert!(m.arrow(&mixed, &with_r).unwrap());
        assert!(m.arrow(&with_r, &mixed).unwrap());
    }

    #[test]
    fn predicates() {
        let m = MacroModel::new();
        assert!(m.is_record(&p(r(), r())).unwrap());
        assert!(m.is_mechanical(&p(s(0, 1), s(0, 1))).unwrap());
        assert!(!m.is_record(&s(1, 1)).unwrap());
        assert!(!m.is_mechanical(&s(1, 1)).unwrap());
    }

    #[test]
    fn state_equivalence_for_bit_state() {
        let m = MacroModel::new();
        let ib = set(&[r(), p(r(), r())]);
        let w = m.state_equivalence(&ib).unwrap();
        assert_eq!(w.e, r());
        assert_eq!(w.x, s(0, 1).copies(2).unwrap());
        assert_eq!(w.y, s(1, 2).copies(2).unwrap());
        assert!(!w.is_approximate());
        let lhs = ib.combine(&one(w.x.clone()));
        let rhs = one(p(w.e.clone(), w.y.clone()));
        assert!(m.arrow(&lhs, &rhs).unwrap() && m.arrow(&rhs, &lhs).unwrap());
        assert!(m.arrow_states(&w.x, &w.y).unwrap());
    }

    #[test]
    fn state_equivalence_singleton_and_irrational() {
        let m = MacroModel::new();
        let w = m.state_equivalence(&one(s(0, 1))).unwrap();
        assert_eq!(w.e, s(0, 1));
        assert!(!w.is_approximate());

        let e = set(&[s(0, 1), s(1, 1)]);
        let w = m.state_equivalence(&e).unwrap();
        let (lo, hi) = w.bracket.clone().unwrap();
        let ex = e.combine(&one(w.x.clone()));
        assert!(m.arrow(&one(p(w.e.clone(), lo)), &ex).unwrap());
        assert!(m.arrow(&ex, &one(p(w.e.clone(), hi))).unwrap());
    }

    #[test]
    fn faults_change_verdicts() {
        let ib = set(&[r(), p(r(), r())]);
        let flip = MacroModel::new().with_fault(Fault::FlipEntropyCriterion);
        assert!(flip.arrow(&ib, &one(r())).unwrap());
        let drop = MacroModel::new().with_fault(Fault::DropQCriterion);
        assert!(drop.arrow(&one(r()), &one(s(0, 1))).unwrap());
        let broken = MacroModel::new().with_fault(Fault::BreakRecordFreeness);
        let a = one(s(1, 2));
        assert!(!broken.arrow(&a.combine(&one(r())), &a).unwrap());
    }
}
