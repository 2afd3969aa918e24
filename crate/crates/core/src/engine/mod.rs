//! Model-generic computations over any [`ModelOracle`].

pub mod irreversibility;
pub mod numeric;
pub mod probability;

pub use irreversibility::{
    demonically_possible, info_balance_check, irreversibility_estimate, landauer_check,
    min_information_to_transform, DemonPlan, InfoBalance, IrreversibilityEstimate, LandauerVerdict,
};
pub use numeric::Numeric;
pub use probability::{
    conditional_probability, entropic_probability, gibbs_gap, shannon_decomposition,
    ProbabilityReport, ProbabilityView,
};

use crate::eidostate::{Eidostate, Process, ProcessType};
use crate::entropy::ExactEntropy;
use crate::oracle::ModelOracle;
use crate::state::StateExpr;
use crate::{Error, Result};

/// Largest eidostate checked for uniformity pair by pair.
pub const PAIRWISE_UNIFORM_CAP: usize = 64;
/// Largest eidostate the engine will enumerate.
pub const ELEMENT_CAP: usize = 1 << 16;

pub fn classify(p: &Process, oracle: &dyn ModelOracle) -> Result<ProcessType> {
    let forward = oracle.arrow(&p.initial, &p.final_)?;
    let backward = oracle.arrow(&p.final_, &p.initial)?;
    Ok(ProcessType::from_arrows(forward, backward))
}

pub(crate) fn elements(e: &Eidostate) -> Result<Vec<StateExpr>> {
    e.to_vec(ELEMENT_CAP)
}

/// Every pair of elements is connected by a possible process.
///
/// Up to [`PAIRWISE_UNIFORM_CAP`] elements all pairs are tested; beyond that
/// every element is tested against the first, which suffices because
/// possibility is transitive on singletons.
pub fn is_uniform(e: &Eidostate, oracle: &dyn ModelOracle) -> Result<bool> {
    let xs = elements(e)?;
    let single = |s: &StateExpr| Eidostate::singleton(s.clone());
    if xs.len() <= PAIRWISE_UNIFORM_CAP {
        for (i, a) in xs.iter().enumerate() {
            for b in &xs[i + 1..] {
                if !oracle.possible(&single(a), &single(b))? {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    let first = single(&xs[0]);
    for b in &xs[1..] {
        if !oracle.possible(&first, &single(b))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn require_uniform(e: &Eidostate, oracle: &dyn ModelOracle) -> Result<Vec<StateExpr>> {
    if !is_uniform(e, oracle)? {
        return Err(Error::NonUniform(e.to_string()));
    }
    elements(e)
}

/// `𝕊(E) = log₂ Σ_{e ∈ E} 2^{𝕊(e)}`.
pub fn entropy_uniform(e: &Eidostate, oracle: &dyn ModelOracle) -> Result<ExactEntropy> {
    let xs = require_uniform(e, oracle)?;
    entropy_of_states(&xs, oracle)
}

pub(crate) fn entropy_of_states(xs: &[StateExpr], oracle: &dyn ModelOracle) -> Result<ExactEntropy> {
    let mut acc: Option<ExactEntropy> = None;
    for x in xs {
        let s = oracle.state_entropy(x)?;
        acc = Some(match acc {
            None => s,
            Some(a) => a.union(&s),
        });
    }
    acc.map(|a| a.canonical()).ok_or(Error::EmptyEidostate)
}

pub fn process_sum(p: &Process, q: &Process) -> Process {
    p.sum(q)
}

pub fn process_negate(p: &Process) -> Process {
    p.negate()
}

/// Bounded search for pads `x`, `y` with `A + x ∼ C + y` and `B + x ∼ D + y`.
///
/// The candidates always include the empty pad. `false` only means no pair
/// was found among the candidates.
pub fn process_equivalent(p1: &Process, p2: &Process, pads: &[StateExpr]) -> bool {
    let mut options: Vec<Option<Eidostate>> = vec![None];
    options.extend(pads.iter().map(|s| Some(Eidostate::singleton(s.clone()))));
    let padded = |e: &Eidostate, pad: &Option<Eidostate>| match pad {
        None => e.clone(),
        Some(x) => e.combine(x),
    };
    options.iter().any(|x| {
        options.iter().any(|y| {
            padded(&p1.initial, x).similar(&padded(&p2.initial, y))
                && padded(&p1.final_, x).similar(&padded(&p2.final_, y))
        })
    })
}

/// `a ≺ b`: some mechanical `l`, `m` from the oracle's family (or no pad)
/// give `a + l → b + m`.
pub fn adiabatically_accessible(
    a: &StateExpr,
    b: &StateExpr,
    oracle: &dyn ModelOracle,
    bound: usize,
) -> Result<bool> {
    let mut pads: Vec<Option<StateExpr>> = vec![None];
    pads.extend(oracle.mechanical_family(bound).into_iter().map(Some));
    let padded = |s: &StateExpr, pad: &Option<StateExpr>| match pad {
        None => s.clone(),
        Some(m) => StateExpr::pair(s.clone(), m.clone()),
    };
    for l in &pads {
        for m in &pads {
            if oracle.arrow_states(&padded(a, l), &padded(b, m))? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
