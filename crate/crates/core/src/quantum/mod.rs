//! The qubit-world model. Each atom names a subspace of dimension `d` in a
//! register of `L` qubits; dimensions multiply under combination and add
//! over the elements of an eidostate, and `A → B` iff `d_A ≤ d_B`.
//!
//! Besides registered atoms, `d[k]` always resolves to an atom of dimension
//! `k` on `max(1, ⌈log₂ k⌉)` qubits.

mod realize;

pub use realize::{find_isometry, leak_residual, realize, ExplicitRealization, QubitBudget};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::eidostate::Eidostate;
use crate::entropy::ExactEntropy;
use crate::oracle::{ModelOracle, StateEquivalence};
use crate::state::{AtomId, StateExpr};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QAtom {
    pub dim: BigUint,
    pub len: u64,
}

impl QAtom {
    pub fn new(dim: BigUint, len: u64) -> Result<Self> {
        if dim.is_zero() {
            return Err(Error::InvalidAtom("dimension must be at least 1".into()));
        }
        if len == 0 {
            return Err(Error::InvalidAtom("length must be at least 1".into()));
        }
        if len > 4096 || dim > BigUint::one() << len {
            return Err(Error::InvalidAtom(format!("dimension {dim} exceeds 2^{len}")));
        }
        Ok(QAtom { dim, len })
    }

    /// The smallest register holding a `k`-dimensional subspace.
    pub fn with_dim(k: BigUint) -> Result<Self> {
        let len = if k > BigUint::one() {
            (&k - 1u32).bits()
        } else {
            1
        };
        QAtom::new(k, len)
    }
}

#[derive(Debug, Clone, Default)]
pub struct QuantumModel {
    atoms: BTreeMap<AtomId, QAtom>,
    order: Vec<AtomId>,
}

impl QuantumModel {
    pub fn new() -> Self {
        QuantumModel::default()
    }

    pub fn register(&mut self, name: impl AsRef<str>, atom: QAtom) -> Result<AtomId> {
        let id = AtomId::new(name);
        if self.atoms.contains_key(&id) {
            return Err(Error::InvalidAtom(format!("atom `{id}` is already defined")));
        }
        self.atoms.insert(id.clone(), atom);
        self.order.push(id.clone());
        Ok(id)
    }

    pub fn registered(&self) -> impl Iterator<Item = (&AtomId, &QAtom)> {
        self.order.iter().map(move |id| (id, &self.atoms[id]))
    }

    pub fn d_name(k: &BigUint) -> String {
        format!("d[{k}]")
    }

    /// The built-in atom `d[k]`.
    pub fn d(k: u64) -> StateExpr {
        StateExpr::atom(Self::d_name(&BigUint::from(k)))
    }

    pub fn resolve(&self, id: &AtomId) -> Result<QAtom> {
        if let Some(a) = self.atoms.get(id) {
            return Ok(a.clone());
        }
        let name = id.as_str();
        name.strip_prefix("d[")
            .and_then(|s| s.strip_suffix(']'))
            .and_then(|s| s.parse::<BigUint>().ok().filter(|k| k.to_string() == s))
            .ok_or_else(|| Error::UnknownAtom(name.to_owned()))
            .and_then(QAtom::with_dim)
    }

    /// Subspace dimension of a state: the product over its leaves.
    pub fn state_dim(&self, a: &StateExpr) -> Result<BigUint> {
        a.fold_leaves(|id| self.resolve(id).map(|q| q.dim), |x, y| x * y)
    }

    /// Register length of a state: the sum over its leaves.
    pub fn state_len(&self, a: &StateExpr) -> Result<u64> {
        a.fold_leaves(|id| self.resolve(id).map(|q| q.len), |x, y| x + y)
    }

    /// Dimension and length of `a + b`.
    pub fn q_combine(&self, a: &StateExpr, b: &StateExpr) -> Result<QAtom> {
        Ok(QAtom {
            dim: self.state_dim(a)? * self.state_dim(b)?,
            len: self.state_len(a)? + self.state_len(b)?,
        })
    }

    /// `d_E = Σ_{a ∈ E} d_a`, computed factor by factor.
    pub fn q_dim(&self, e: &Eidostate) -> Result<BigUint> {
        let mut total = BigUint::one();
        for f in e.prime_factors() {
            let mut sum = BigUint::zero();
            for s in f.iter() {
                sum += self.state_dim(&s)?;
            }
            total *= sum;
        }
        Ok(total)
    }

    pub fn record_id(&self) -> AtomId {
        self.registered()
            .find(|(_, a)| a.dim.is_one())
            .map(|(id, _)| id.clone())
            .unwrap_or_else(|| AtomId::new("d[1]"))
    }
}

impl ModelOracle for QuantumModel {
    fn name(&self) -> &str {
        "quantum"
    }

    fn arrow(&self, a: &Eidostate, b: &Eidostate) -> Result<bool> {
        Ok(self.q_dim(a)? <= self.q_dim(b)?)
    }

    fn state_entropy(&self, a: &StateExpr) -> Result<ExactEntropy> {
        ExactEntropy::log2_count(self.state_dim(a)?)
    }

    fn components(&self, a: &StateExpr) -> Result<Vec<BigRational>> {
        self.state_dim(a)?;
        Ok(Vec::new())
    }

    fn is_record(&self, a: &StateExpr) -> Result<bool> {
        Ok(self.state_dim(a)?.is_one())
    }

    fn is_mechanical(&self, a: &StateExpr) -> Result<bool> {
        self.state_dim(a)?;
        Ok(false)
    }

    fn make_record(&self) -> StateExpr {
        StateExpr::Atom(self.record_id())
    }

    fn mechanical_family(&self, _bound: usize) -> Vec<StateExpr> {
        Vec::new()
    }

    fn atom_pool(&self) -> Vec<StateExpr> {
        let mut pool: Vec<StateExpr> = vec![self.make_record()];
        for k in 2..=8 {
            pool.push(Self::d(k));
        }
        for (id, _) in self.registered() {
            let s = StateExpr::Atom(id.clone());
            if !pool.contains(&s) {
                pool.push(s);
            }
        }
        pool
    }

    fn state_equivalence(&self, e: &Eidostate) -> Result<StateEquivalence> {
        let d = self.q_dim(e)?;
        let r = self.make_record();
        Ok(StateEquivalence {
            e: StateExpr::atom(Self::d_name(&d)),
            x: r.clone(),
            y: r,
            bracket: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(x: StateExpr) -> Eidostate {
        Eidostate::singleton(x)
    }

    #[test]
    fn combine_multiplies_dims_and_adds_lengths() {
        let m = QuantumModel::new();
        let c = m.q_combine(&QuantumModel::d(3), &QuantumModel::d(5)).unwrap();
        assert_eq!(c.dim, BigUint::from(15u32));
        assert_eq!(c.len, 2 + 3);
        let c = m.q_combine(&QuantumModel::d(1), &QuantumModel::d(7)).unwrap();
        assert_eq!(c.dim, BigUint::from(7u32));
    }

    #[test]
    fn atom_invariants() {
        assert!(QAtom::new(BigUint::from(5u32), 2).is_err());
        assert!(QAtom::new(BigUint::from(4u32), 2).is_ok());
        assert!(QAtom::new(BigUint::zero(), 2).is_err());
        assert_eq!(QAtom::with_dim(BigUint::from(1u32)).unwrap().len, 1);
        assert_eq!(QAtom::with_dim(BigUint::from(5u32)).unwrap().len, 3);
        assert_eq!(QAtom::with_dim(BigUint::from(8u32)).unwrap().len, 3);
    }

    #[test]
    fn eidostate_dimensions() {
        let m = QuantumModel::new();
        let r = m.make_record();
        let ib = m.make_bit_state();
        assert_eq!(m.q_dim(&ib).unwrap(), BigUint::from(2u32));
        let info = crate::oracle::information_state(&r, 7).unwrap();
        assert_eq!(m.q_dim(&info).unwrap(), BigUint::from(7u32));
        let a = Eidostate::from_states([QuantumModel::d(2), QuantumModel::d(3)]).unwrap();
        let b = Eidostate::from_states([QuantumModel::d(4), QuantumModel::d(1)]).unwrap();
        assert_eq!(m.q_dim(&a.combine(&b)).unwrap(), BigUint::from(25u32));
    }

    #[test]
    fn dimension_criterion() {
        let m = QuantumModel::new();
        assert!(m.arrow(&one(QuantumModel::d(2)), &one(QuantumModel::d(3))).unwrap());
        assert!(!m.arrow(&one(QuantumModel::d(3)), &one(QuantumModel::d(2))).unwrap());
        assert!(m.arrow(&one(QuantumModel::d(3)), &one(QuantumModel::d(3))).unwrap());
    }

    #[test]
    fn state_equivalence_matches_dimension() {
        let m = QuantumModel::new();
        let e = Eidostate::from_states([QuantumModel::d(2), QuantumModel::d(3)]).unwrap();
        let w = m.state_equivalence(&e).unwrap();
        let lhs = e.combine(&one(w.x.clone()));
        let rhs = one(StateExpr::pair(w.e.clone(), w.y.clone()));
        assert!(m.arrow(&lhs, &rhs).unwrap() && m.arrow(&rhs, &lhs).unwrap());
    }
}
