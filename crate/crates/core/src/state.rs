//! State expressions: binary trees whose leaves are opaque atom identifiers.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Opaque atom identifier. The core attaches no meaning to the name;
/// models resolve it against their registries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AtomId(Arc<str>);

impl AtomId {
    pub fn new(name: impl AsRef<str>) -> Self {
        AtomId(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AtomId {
    fn from(s: &str) -> Self {
        AtomId::new(s)
    }
}

/// A state: an atom or an ordered pair of states.
///
/// `Pair(a, b)` and `Pair(b, a)` are different states unless `a == b`, and
/// `Pair(Pair(a, b), c)` differs from `Pair(a, Pair(b, c))`. The derived
/// order (atoms first, by name; then pairs, lexicographically) is the
/// canonical order used for eidostate elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateExpr {
    Atom(AtomId),
    Pair(Arc<StateExpr>, Arc<StateExpr>),
}

impl StateExpr {
    pub fn atom(name: impl AsRef<str>) -> Self {
        StateExpr::Atom(AtomId::new(name))
    }

    pub fn pair(left: StateExpr, right: StateExpr) -> Self {
        StateExpr::Pair(Arc::new(left), Arc::new(right))
    }

    /// `n` right-nested copies: `s + (s + (s + ...))`. `n = 0` is rejected.
    pub fn copies(&self, n: usize) -> crate::Result<StateExpr> {
        if n == 0 {
            return Err(crate::Error::ZeroCopies);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = StateExpr::pair(self.clone(), acc);
        }
        Ok(acc)
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, StateExpr::Pair(..))
    }

    pub fn as_atom(&self) -> Option<&AtomId> {
        match self {
            StateExpr::Atom(id) => Some(id),
            StateExpr::Pair(..) => None,
        }
    }

    pub fn split(&self) -> Option<(&StateExpr, &StateExpr)> {
        match self {
            StateExpr::Pair(l, r) => Some((l, r)),
            StateExpr::Atom(_) => None,
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&AtomId> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                StateExpr::Atom(id) => out.push(id),
                StateExpr::Pair(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    /// Fold over leaves with an additive combiner, without recursion.
    pub fn fold_leaves<T, E>(
        &self,
        mut leaf: impl FnMut(&AtomId) -> Result<T, E>,
        mut join: impl FnMut(T, T) -> T,
    ) -> Result<T, E> {
        let mut leaves = self.leaves().into_iter();
        let first = leaf(leaves.next().expect("a state has at least one leaf"))?;
        leaves.try_fold(first, |acc, id| Ok(join(acc, leaf(id)?)))
    }

    pub fn depth(&self) -> usize {
        match self {
            StateExpr::Atom(_) => 0,
            StateExpr::Pair(l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

impl fmt::Display for StateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateExpr::Atom(id) => write!(f, "{id}"),
            StateExpr::Pair(l, r) => write!(f, "({l} + {r})"),
        }
    }
}

impl fmt::Debug for StateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
