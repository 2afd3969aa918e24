use std::collections::BTreeSet;
use std::fmt::Display;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::SuiteConfig;
use crate::eidostate::Eidostate;
use crate::oracle::{record_trees, ModelOracle};
use crate::state::StateExpr;
use crate::{Error, Result};

const LIKE_TRIES: usize = 48;
const RECORD_POOL: usize = 256;

/// Random inputs for one case, with a log of what was drawn.
pub struct Gen<'a> {
    pub oracle: &'a dyn ModelOracle,
    pub rng: ChaCha8Rng,
    pub cfg: &'a SuiteConfig,
    inputs: Vec<String>,
}

impl<'a> Gen<'a> {
    pub fn new(oracle: &'a dyn ModelOracle, rng: ChaCha8Rng, cfg: &'a SuiteConfig) -> Self {
        Gen {
            oracle,
            rng,
            cfg,
            inputs: Vec::new(),
        }
    }

    pub fn note(&mut self, label: &str, value: impl Display) {
        self.inputs.push(format!("{label} = {value}"));
    }

    pub fn take_inputs(&mut self) -> Vec<String> {
        std::mem::take(&mut self.inputs)
    }

    pub fn size(&mut self) -> usize {
        self.rng.gen_range(1..=self.cfg.max_size)
    }

    pub fn state(&mut self) -> StateExpr {
        let d = self.cfg.max_depth;
        self.state_to_depth(d)
    }

    pub fn state_to_depth(&mut self, depth: usize) -> StateExpr {
        if depth == 0 || self.rng.gen_bool(0.55) {
            return self.oracle.random_atom(&mut self.rng);
        }
        let l = self.state_to_depth(depth - 1);
        let r = self.state_to_depth(depth - 1);
        StateExpr::pair(l, r)
    }

    /// A random state with the same components of content as `a`.
    pub fn state_like(&mut self, a: &StateExpr) -> Result<StateExpr> {
        let target = self.oracle.components(a)?;
        for _ in 0..LIKE_TRIES {
            let s = self.state();
            if self.oracle.components(&s)? == target {
                return Ok(s);
            }
        }
        self.reshuffle(a)
    }

    /// The leaves of `a`, each possibly swapped for an atom with equal
    /// components, reassembled in a random shape.
    fn reshuffle(&mut self, a: &StateExpr) -> Result<StateExpr> {
        let mut leaves: Vec<StateExpr> = Vec::new();
        for id in a.leaves() {
            let leaf = StateExpr::Atom(id.clone());
            let want = self.oracle.components(&leaf)?;
            let mut pick = leaf.clone();
            for _ in 0..8 {
                let cand = self.oracle.random_atom(&mut self.rng);
                if self.oracle.components(&cand)? == want {
                    pick = cand;
                    break;
                }
            }
            leaves.push(pick);
        }
        leaves.shuffle(&mut self.rng);
        while leaves.len() > 1 {
            let i = self.rng.gen_range(0..leaves.len() - 1);
            let r = leaves.remove(i + 1);
            let l = leaves.remove(i);
            leaves.insert(i, StateExpr::pair(l, r));
        }
        Ok(leaves.pop().expect("a state has a leaf"))
    }

    fn collect(&mut self, n: usize, mut draw: impl FnMut(&mut Self) -> Result<StateExpr>) -> Result<Eidostate> {
        let mut seen = BTreeSet::new();
        for _ in 0..n * 16 {
            if seen.len() == n {
                break;
            }
            seen.insert(draw(self)?);
        }
        Eidostate::from_states(seen)
    }

    /// Up to `n` distinct random states.
    pub fn states(&mut self, n: usize) -> Result<Eidostate> {
        self.collect(n, |g| Ok(g.state()))
    }

    /// A random eidostate: a plain set or, sometimes, a product of two.
    pub fn eidostate(&mut self) -> Result<Eidostate> {
        if self.rng.gen_bool(0.3) && self.cfg.max_size >= 4 {
            let half = (self.cfg.max_size / 2).max(2);
            let a = self.rng.gen_range(1..=half);
            let b = self.rng.gen_range(1..=(self.cfg.max_size / a).max(1));
            let x = self.states(a)?;
            let y = self.states(b)?;
            return Ok(x.combine(&y));
        }
        let n = self.size();
        self.states(n)
    }

    /// Up to `n` distinct states sharing the components of `base` (which is included).
    pub fn uniform_like(&mut self, base: &StateExpr, n: usize) -> Result<Eidostate> {
        let mut seen = BTreeSet::new();
        seen.insert(base.clone());
        for _ in 0..n * 16 {
            if seen.len() >= n {
                break;
            }
            let s = self.state_like(base)?;
            seen.insert(s);
        }
        Eidostate::from_states(seen)
    }

    pub fn uniform(&mut self, n: usize) -> Result<Eidostate> {
        let base = self.state();
        self.uniform_like(&base, n)
    }

    /// `n` distinct record states.
    pub fn info_state(&mut self, n: usize) -> Result<Eidostate> {
        if n == 0 {
            return Err(Error::EmptyEidostate);
        }
        let pool = record_trees(&self.oracle.make_record(), RECORD_POOL.max(n));
        let picked: Vec<StateExpr> = pool.choose_multiple(&mut self.rng, n).cloned().collect();
        Eidostate::from_states(picked)
    }

    /// A split of `e` into two disjoint nonempty parts.
    pub fn split(&mut self, e: &Eidostate) -> Result<Option<(Eidostate, Eidostate)>> {
        let mut xs = e.to_vec(crate::eidostate::ENUMERATION_CAP)?;
        if xs.len() < 2 {
            return Ok(None);
        }
        xs.shuffle(&mut self.rng);
        let k = self.rng.gen_range(1..xs.len());
        let right = xs.split_off(k);
        Ok(Some((Eidostate::from_states(xs)?, Eidostate::from_states(right)?)))
    }

    /// A random nonempty subset, proper when `proper` and `|e| > 1`.
    pub fn subset(&mut self, e: &Eidostate, proper: bool) -> Result<Eidostate> {
        let mut xs = e.to_vec(crate::eidostate::ENUMERATION_CAP)?;
        xs.shuffle(&mut self.rng);
        let hi = if proper && xs.len() > 1 { xs.len() - 1 } else { xs.len() };
        let k = self.rng.gen_range(1..=hi);
        xs.truncate(k);
        Eidostate::from_states(xs)
    }

    pub fn pick<T: Clone>(&mut self, xs: &[T]) -> T {
        xs[self.rng.gen_range(0..xs.len())].clone()
    }
}
