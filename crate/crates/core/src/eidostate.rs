//! Eidostates: finite nonempty sets of states, combined by Cartesian product.
//!
//! An eidostate is stored in its canonical factored form. A set whose
//! elements are all pairs splits at the top level exactly when it equals
//! `lefts × rights`; the split is then unique, so recursively splitting
//! yields a tree of prime factors that is determined by the set alone.
//! Two eidostates are therefore equal as sets iff their trees are equal,
//! and products never need to be materialized.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::state::StateExpr;
use crate::{Error, Result};

/// Default cap on the size of an explicitly enumerated set (subset
/// enumeration and brute-force product checks).
pub const ENUMERATION_CAP: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Eidostate(Arc<Node>);

#[derive(PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    /// Sorted, distinct elements that admit no top-level split.
    Prime(Box<[StateExpr]>),
    Product {
        left: Eidostate,
        right: Eidostate,
        len: BigUint,
    },
}

impl Eidostate {
    /// Builds an eidostate from any collection of states; duplicates collapse.
    pub fn from_states<I>(states: I) -> Result<Self>
    where
        I: IntoIterator<Item = StateExpr>,
    {
        let set: BTreeSet<StateExpr> = states.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyEidostate);
        }
        Ok(Self::canonical(set))
    }

    pub fn singleton(state: StateExpr) -> Self {
        match state {
            StateExpr::Atom(_) => Eidostate(Arc::new(Node::Prime(Box::new([state])))),
            StateExpr::Pair(l, r) => {
                Self::singleton((*l).clone()).combine(&Self::singleton((*r).clone()))
            }
        }
    }

    fn canonical(set: BTreeSet<StateExpr>) -> Self {
        if set.len() == 1 {
            return Self::singleton(set.into_iter().next().unwrap());
        }
        if set.iter().all(StateExpr::is_pair) {
            let mut lefts = BTreeSet::new();
            let mut rights = BTreeSet::new();
            for s in &set {
                let (l, r) = s.split().unwrap();
                lefts.insert(l.clone());
                rights.insert(r.clone());
            }
            // set ⊆ lefts × rights, so equal cardinality means equality
            if lefts.len() * rights.len() == set.len() {
                return Self::canonical(lefts).combine(&Self::canonical(rights));
            }
        }
        Eidostate(Arc::new(Node::Prime(set.into_iter().collect())))
    }

    /// Cartesian product `{ (a, b) : a ∈ self, b ∈ other }`.
    pub fn combine(&self, other: &Eidostate) -> Eidostate {
        let len = self.len() * other.len();
        Eidostate(Arc::new(Node::Product {
            left: self.clone(),
            right: other.clone(),
            len,
        }))
    }

    /// `n` right-nested copies `A + (A + (A + ...))`.
    pub fn n_copies(&self, n: usize) -> Result<Eidostate> {
        if n == 0 {
            return Err(Error::ZeroCopies);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.combine(&acc);
        }
        Ok(acc)
    }

    pub fn len(&self) -> BigUint {
        match &*self.0 {
            Node::Prime(v) => BigUint::from(v.len()),
            Node::Product { len, .. } => len.clone(),
        }
    }

    /// Cardinality when it fits in a `usize`.
    pub fn len_usize(&self) -> Option<usize> {
        self.len().to_usize()
    }

    pub fn is_singleton(&self) -> bool {
        self.len().is_one()
    }

    /// The single element, if this is a singleton eidostate.
    pub fn as_singleton(&self) -> Option<StateExpr> {
        match &*self.0 {
            Node::Prime(v) if v.len() == 1 => Some(v[0].clone()),
            Node::Prime(_) => None,
            Node::Product { left, right, .. } => {
                Some(StateExpr::pair(left.as_singleton()?, right.as_singleton()?))
            }
        }
    }

    pub fn contains(&self, state: &StateExpr) -> bool {
        match &*self.0 {
            Node::Prime(v) => v.binary_search(state).is_ok(),
            Node::Product { left, right, .. } => match state.split() {
                Some((l, r)) => left.contains(l) && right.contains(r),
                None => false,
            },
        }
    }

    /// Elements in canonical (sorted) order, produced lazily.
    pub fn iter(&self) -> Box<dyn Iterator<Item = StateExpr> + '_> {
        match &*self.0 {
            Node::Prime(v) => Box::new(v.iter().cloned()),
            Node::Product { left, right, .. } => Box::new(
                left.iter()
                    .flat_map(move |a| right.iter().map(move |b| StateExpr::pair(a.clone(), b))),
            ),
        }
    }

    /// All elements, refusing sets larger than `cap`.
    pub fn to_vec(&self, cap: usize) -> Result<Vec<StateExpr>> {
        match self.len_usize() {
            Some(n) if n <= cap => Ok(self.iter().collect()),
            _ => Err(Error::ResourceLimit {
                what: "eidostate enumeration",
                size: self.len().to_u64().unwrap_or(u64::MAX),
                limit: cap as u64,
            }),
        }
    }

    pub fn is_prime(&self) -> bool {
        matches!(&*self.0, Node::Prime(_))
    }

    /// Top-level factors, if this eidostate is a product.
    pub fn split(&self) -> Option<(&Eidostate, &Eidostate)> {
        match &*self.0 {
            Node::Prime(_) => None,
            Node::Product { left, right, .. } => Some((left, right)),
        }
    }

    /// Prime factors in left-to-right order.
    pub fn prime_factors(&self) -> Vec<Eidostate> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            match &*e.0 {
                Node::Prime(_) => out.push(e.clone()),
                Node::Product { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    pub fn prime_factorize(&self) -> PrimeFactorization {
        fn walk(e: &Eidostate, factors: &mut Vec<Eidostate>) -> Shape {
            match &*e.0 {
                Node::Prime(_) => {
                    factors.push(e.clone());
                    Shape::Factor(factors.len() - 1)
                }
                Node::Product { left, right, .. } => {
                    let l = walk(left, factors);
                    let r = walk(right, factors);
                    Shape::Join(Box::new(l), Box::new(r))
                }
            }
        }
        let mut factors = Vec::new();
        let shape = walk(self, &mut factors);
        PrimeFactorization { factors, shape }
    }

    /// Same prime factors with the same multiplicities, in any arrangement.
    pub fn similar(&self, other: &Eidostate) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut a = self.prime_factors();
        let mut b = other.prime_factors();
        a.sort();
        b.sort();
        a == b
    }

    pub fn is_subset_of(&self, other: &Eidostate) -> bool {
        self.len() <= other.len() && self.iter().all(|s| other.contains(&s))
    }

    pub fn is_proper_subset_of(&self, other: &Eidostate) -> bool {
        self.len() < other.len() && self.iter().all(|s| other.contains(&s))
    }

    /// Every nonempty subset, for sets of at most `cap` elements.
    pub fn subsets(&self, cap: usize) -> Result<impl Iterator<Item = Eidostate>> {
        let elems = self.to_vec(cap)?;
        let n = elems.len();
        Ok((1u64..(1u64 << n)).map(move |mask| {
            let picked = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| elems[i].clone());
            Eidostate::from_states(picked).expect("mask is nonzero")
        }))
    }

    pub fn union(&self, other: &Eidostate, cap: usize) -> Result<Eidostate> {
        let mut all = self.to_vec(cap)?;
        all.extend(other.to_vec(cap)?);
        Eidostate::from_states(all)
    }

    /// Elements of `self` that lie in `other`; `None` when the intersection is empty.
    pub fn intersection(&self, other: &Eidostate, cap: usize) -> Result<Option<Eidostate>> {
        let kept: Vec<_> = self
            .to_vec(cap)?
            .into_iter()
            .filter(|s| other.contains(s))
            .collect();
        Ok(Eidostate::from_states(kept).ok())
    }

    pub fn is_disjoint(&self, other: &Eidostate, cap: usize) -> Result<bool> {
        Ok(self.to_vec(cap)?.iter().all(|s| !other.contains(s)))
    }
}

impl std::ops::Add for &Eidostate {
    type Output = Eidostate;

    fn add(self, rhs: &Eidostate) -> Eidostate {
        self.combine(rhs)
    }
}

impl From<StateExpr> for Eidostate {
    fn from(s: StateExpr) -> Self {
        Eidostate::singleton(s)
    }
}

impl fmt::Display for Eidostate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 16;
        f.write_str("{ ")?;
        for (i, s) in self.iter().take(SHOWN).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        if self.len() > BigUint::from(SHOWN) {
            write!(f, ", ... ({} elements)", self.len())?;
        }
        f.write_str(" }")
    }
}

impl fmt::Debug for Eidostate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// How prime factors recombine into the original eidostate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Factor(usize),
    Join(Box<Shape>, Box<Shape>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFactorization {
    pub factors: Vec<Eidostate>,
    pub shape: Shape,
}

impl PrimeFactorization {
    pub fn recombine(&self) -> Eidostate {
        fn build(shape: &Shape, factors: &[Eidostate]) -> Eidostate {
            match shape {
                Shape::Factor(i) => factors[*i].clone(),
                Shape::Join(l, r) => build(l, factors).combine(&build(r, factors)),
            }
        }
        build(&self.shape, &self.factors)
    }
}

/// True iff `parts` are pairwise disjoint and their union is `whole`.
pub fn disjoint_partition_check(whole: &Eidostate, parts: &[Eidostate]) -> bool {
    if parts.is_empty() {
        return false;
    }
    let mut seen = BTreeSet::new();
    for part in parts {
        for s in part.iter() {
            if !whole.contains(&s) || !seen.insert(s) {
                return false;
            }
        }
    }
    BigUint::from(seen.len()) == whole.len()
}

/// A formal process: an ordered pair of eidostates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Process {
    pub initial: Eidostate,
    pub final_: Eidostate,
}

impl Process {
    pub fn new(initial: Eidostate, final_: Eidostate) -> Self {
        Process { initial, final_ }
    }

    /// `⟨A,B⟩ + ⟨C,D⟩ = ⟨A+C, B+D⟩`.
    pub fn sum(&self, other: &Process) -> Process {
        Process::new(
            self.initial.combine(&other.initial),
            self.final_.combine(&other.final_),
        )
    }

    /// `−⟨A,B⟩ = ⟨B,A⟩`.
    pub fn negate(&self) -> Process {
        Process::new(self.final_.clone(), self.initial.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessType {
    NaturalIrreversible,
    AntinaturalIrreversible,
    Reversible,
    Impossible,
}

impl ProcessType {
    pub fn from_arrows(forward: bool, backward: bool) -> Self {
        match (forward, backward) {
            (true, true) => ProcessType::Reversible,
            (true, false) => ProcessType::NaturalIrreversible,
            (false, true) => ProcessType::AntinaturalIrreversible,
            (false, false) => ProcessType::Impossible,
        }
    }

    pub fn is_possible(self) -> bool {
        self != ProcessType::Impossible
    }
}

impl fmt::Display for ProcessType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessType::NaturalIrreversible => "natural irreversible",
            ProcessType::AntinaturalIrreversible => "antinatural irreversible",
            ProcessType::Reversible => "reversible",
            ProcessType::Impossible => "impossible",
        })
    }
}
