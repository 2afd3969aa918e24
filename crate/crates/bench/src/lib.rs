//! Fixtures shared by the benchmarks.

use eidos_core::entropy::rational;
use eidos_core::{Eidostate, EntropySum, ExactEntropy, MacroModel, StateExpr};

/// `s[k/8]` for `k` in `0..=8`.
pub fn s8(k: i64) -> StateExpr {
    MacroModel::s(&rational(k, 8))
}

/// A left-leaning chain of `n` atoms cycling through `s[k/8]`.
pub fn chain(n: usize, offset: i64) -> StateExpr {
    (1..n).fold(s8(offset % 9), |acc, i| StateExpr::pair(acc, s8((i as i64 + offset) % 9)))
}

/// A uniform eidostate of `n` distinct equal-content states.
pub fn uniform(n: usize, depth: usize) -> Eidostate {
    Eidostate::from_states((0..n as i64).map(|k| chain(depth, k))).expect("nonempty")
}

/// `log2(2^{1/3} + 2^{1/5} + ...)`, a sum of `n` irrational entropies.
pub fn irrational_sum(n: usize, shift: i64) -> EntropySum {
    (0..n as i64).fold(EntropySum::zero(), |acc, k| {
        let e = ExactEntropy::from_exponents([rational(1, 3 + k + shift), rational(2, 7 + k)]).expect("two terms");
        acc.add_entropy(&e)
    })
}
