//! The contract a concrete model exposes to the engine and the harness.

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, RngCore};

use crate::eidostate::Eidostate;
use crate::entropy::{ExactEntropy, Precision};
use crate::state::StateExpr;
use crate::{Error, Result};

/// A witness for the state-equivalence axiom: `x → y` and `E + x ↔ e + y`.
///
/// When the model cannot hit `𝕊(E)` exactly, `bracket` holds two candidates
/// `(y_lo, y_hi)` with `e + y_lo → E + x → e + y_hi`, and `y` is the nearer one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEquivalence {
    pub e: StateExpr,
    pub x: StateExpr,
    pub y: StateExpr,
    pub bracket: Option<(StateExpr, StateExpr)>,
}

impl StateEquivalence {
    pub fn is_approximate(&self) -> bool {
        self.bracket.is_some()
    }
}

pub trait ModelOracle: Send + Sync {
    fn name(&self) -> &str;

    /// The arrow relation `A → B`.
    fn arrow(&self, a: &Eidostate, b: &Eidostate) -> Result<bool>;

    /// Entropy of a single state, as a power sum.
    fn state_entropy(&self, a: &StateExpr) -> Result<ExactEntropy>;

    /// Components of content; empty when the model has none.
    fn components(&self, a: &StateExpr) -> Result<Vec<BigRational>>;

    fn is_record(&self, a: &StateExpr) -> Result<bool>;

    fn is_mechanical(&self, a: &StateExpr) -> Result<bool>;

    /// A record state `r`.
    fn make_record(&self) -> StateExpr;

    /// A bit state; `{ r, r + r }` unless the model prefers another.
    fn make_bit_state(&self) -> Eidostate {
        let r = self.make_record();
        Eidostate::from_states([r.clone(), StateExpr::pair(r.clone(), r)])
            .expect("two states")
    }

    /// Mechanical states with at most `bound` leaves; empty when `ℳ = ∅`.
    fn mechanical_family(&self, bound: usize) -> Vec<StateExpr>;

    /// Atoms to draw random states from.
    fn atom_pool(&self) -> Vec<StateExpr>;

    /// One random atom; the pool by default.
    fn random_atom(&self, rng: &mut dyn RngCore) -> StateExpr {
        let pool = self.atom_pool();
        pool[rng.gen_range(0..pool.len())].clone()
    }

    /// Construct the state-equivalence witness for a uniform eidostate.
    fn state_equivalence(&self, e: &Eidostate) -> Result<StateEquivalence>;

    fn precision(&self) -> Precision {
        Precision::from_env()
    }

    fn arrow_states(&self, a: &StateExpr, b: &StateExpr) -> Result<bool> {
        self.arrow(
            &Eidostate::singleton(a.clone()),
            &Eidostate::singleton(b.clone()),
        )
    }

    /// `a → b` or `b → a`.
    fn possible(&self, a: &Eidostate, b: &Eidostate) -> Result<bool> {
        Ok(self.arrow(a, b)? || self.arrow(b, a)?)
    }
}

/// Record states with distinct shapes: every binary tree over `r`, in order
/// of leaf count. Used to build information states of any size with shallow
/// trees.
pub fn record_trees(r: &StateExpr, n: usize) -> Vec<StateExpr> {
    let mut by_leaves: Vec<Vec<StateExpr>> = vec![Vec::new(), vec![r.clone()]];
    let mut out: Vec<StateExpr> = vec![r.clone()];
    let mut k = 1;
    while out.len() < n {
        k += 1;
        let mut level = Vec::new();
        for i in 1..k {
            for left in &by_leaves[i] {
                for right in &by_leaves[k - i] {
                    level.push(StateExpr::pair(left.clone(), right.clone()));
                }
            }
        }
        out.extend(level.iter().cloned());
        by_leaves.push(level);
    }
    out.truncate(n);
    out
}

/// An information state of exactly `n` record states.
pub fn information_state(r: &StateExpr, n: usize) -> Result<Eidostate> {
    if n == 0 {
        return Err(Error::EmptyEidostate);
    }
    Eidostate::from_states(record_trees(r, n))
}

/// `|E|` as a power of two exponent when it is one.
pub fn exact_log2(n: &BigUint) -> Option<u64> {
    (n.count_ones() == 1).then(|| n.bits() - 1)
}
