use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::{ok_if, Check, Gen, Verdict};
use crate::eidostate::Eidostate;
use crate::engine::numeric::{to_f64, Numeric};
use crate::engine::{
    conditional_probability, demonically_possible, entropic_probability, entropy_uniform,
    irreversibility_estimate, landauer_check, shannon_decomposition,
};
use crate::entropy::{compare_sums, EntropySum, ExactEntropy, Precision};
use crate::oracle::{ModelOracle, StateEquivalence};
use crate::state::StateExpr;
use crate::Result;

pub(crate) const CHECKS: &[Check] = &[
    Check { id: "T3", run: t3 },
    Check { id: "T5", run: t5 },
    Check { id: "T6", run: t6 },
    Check { id: "T8", run: t8 },
    Check { id: "T9", run: t9 },
    Check { id: "T15", run: t15 },
    Check { id: "T16", run: t16 },
    Check { id: "T17", run: t17 },
    Check { id: "cancellation", run: cancellation },
    Check { id: "demonic", run: demonic },
    Check { id: "landauer", run: landauer },
    Check { id: "prob-additivity", run: prob_additivity },
    Check { id: "prob-independence", run: prob_independence },
    Check { id: "prob-invariance", run: prob_invariance },
];

const BITS: usize = 128;
const PROB_TOL: f64 = 1e-28;
const IRREV_Q: u64 = 8;

fn one(s: &StateExpr) -> Eidostate {
    Eidostate::singleton(s.clone())
}

fn sum_of(g: &Gen, s: &StateExpr) -> Result<EntropySum> {
    Ok(EntropySum::from(g.oracle.state_entropy(s)?))
}

fn log_size(e: &Eidostate) -> Result<EntropySum> {
    Ok(EntropySum::from(ExactEntropy::log2_count(e.len())?))
}

fn t3(g: &mut Gen) -> Result<Verdict> {
    let n = g.rng.gen_range(1..=64);
    let m = g.rng.gen_range(1..=64);
    let i = g.info_state(n)?;
    let j = g.info_state(m)?;
    g.note("|I|", n);
    g.note("|J|", m);
    let got = g.oracle.arrow(&i, &j)?;
    ok_if(got == (n <= m), || format!("arrow(I, J) = {got}"))
}

fn t5(g: &mut Gen) -> Result<Verdict> {
    let a = g.state();
    let b = if g.rng.gen_bool(0.7) { g.state_like(&a)? } else { g.state() };
    let c = if g.rng.gen_bool(0.7) { g.state_like(&a)? } else { g.state() };
    g.note("a", &a);
    g.note("b", &b);
    g.note("c", &c);
    let o = g.oracle;
    if !(o.possible(&one(&a), &one(&b))? && o.possible(&one(&a), &one(&c))?) {
        return Ok(Verdict::Pass);
    }
    ok_if(o.possible(&one(&b), &one(&c))?, || "<a,b>, <a,c> possible but <b,c> is not".into())
}

fn t6(g: &mut Gen) -> Result<Verdict> {
    let a = g.state();
    let b = g.state_like(&a)?;
    let ni = g.rng.gen_range(1..=16);
    let nj = g.rng.gen_range(1..=16);
    let i = g.info_state(ni)?;
    let j = g.info_state(nj)?;
    g.note("a", &a);
    g.note("b", &b);
    g.note("|I|", ni);
    g.note("|J|", nj);
    let o = g.oracle;
    if !o.possible(&one(&a), &one(&b))? {
        return Ok(Verdict::Pass);
    }
    let got = o.arrow(&one(&a).combine(&i), &one(&b).combine(&j))?;
    let lhs = sum_of(g, &b)?.add(&log_size(&j)?);
    let rhs = sum_of(g, &a)?.add(&log_size(&i)?);
    let predicted = compare_sums(&lhs, &rhs, o.precision())? != Ordering::Less;
    ok_if(got == predicted, || format!("arrow = {got}, irreversibility sum predicts {predicted}"))
}

fn t8(g: &mut Gen) -> Result<Verdict> {
    let a = g.state_to_depth(2);
    let b = g.state_like(&a)?;
    g.note("a", &a);
    g.note("b", &b);
    let o = g.oracle;
    if !o.possible(&one(&a), &one(&b))? {
        return Ok(Verdict::Pass);
    }
    let est = irreversibility_estimate(&a, &b, IRREV_Q, o)?;
    g.note("bracket", format!("[{}, {}]", est.lower, est.upper));
    let (sa, sb) = (sum_of(g, &a)?, sum_of(g, &b)?);
    let p = o.precision();
    let above = compare_sums(&sa.add(&EntropySum::rational(est.lower.clone())), &sb, p)? != Ordering::Greater;
    let below = compare_sums(&sb, &sa.add(&EntropySum::rational(est.upper.clone())), p)? != Ordering::Greater;
    let narrow = est.width() <= BigRational::new(BigInt::from(2), BigInt::from(IRREV_Q));
    ok_if(above && below && narrow, || format!("bracket misses S(b) - S(a) for S(a) = {sa}, S(b) = {sb}"))
}

fn t9(g: &mut Gen) -> Result<Verdict> {
    let a = g.state();
    let b = if g.rng.gen_bool(0.5) { g.state_like(&a)? } else { g.state() };
    g.note("a", &a);
    g.note("b", &b);
    let o = g.oracle;
    let (ca, cb) = (o.components(&a)?, o.components(&b)?);
    let (sa, sb) = (sum_of(g, &a)?, sum_of(g, &b)?);
    let arrow = o.arrow(&one(&a), &one(&b))?;
    if arrow && ca != cb {
        return Ok(Verdict::Fail("a -> b with different components of content".into()));
    }
    let le = compare_sums(&sa, &sb, o.precision())? != Ordering::Greater;
    if ca == cb && arrow != le {
        return Ok(Verdict::Fail(format!("arrow = {arrow} but S(a) <= S(b) is {le}")));
    }
    let ab = StateExpr::pair(a.clone(), b.clone());
    let additive = compare_sums(&sum_of(g, &ab)?, &sa.add(&sb), o.precision())? == Ordering::Equal;
    let cab = o.components(&ab)?;
    let comp_additive = cab.len() == ca.len() && cab.iter().zip(ca.iter().zip(&cb)).all(|(s, (x, y))| *s == x + y);
    ok_if(additive && comp_additive, || "entropy or components not additive on a + b".into())
}

fn t15(g: &mut Gen) -> Result<Verdict> {
    let base = g.state();
    let n1 = g.size();
    let e1 = g.uniform_like(&base, n1)?;
    let n2 = g.size();
    let pool = g.uniform_like(&base, n2 + n1)?;
    let rest: Vec<StateExpr> = pool.iter().filter(|s| !e1.contains(s)).take(n2).collect();
    let Ok(e2) = Eidostate::from_states(rest) else {
        return Ok(Verdict::Pass);
    };
    g.note("E1", &e1);
    g.note("E2", &e2);
    let o = g.oracle;
    let both = e1.union(&e2, crate::eidostate::ENUMERATION_CAP)?;
    let whole = entropy_uniform(&both, o)?;
    let parts = entropy_uniform(&e1, o)?.union(&entropy_uniform(&e2, o)?).canonical();
    ok_if(whole == parts, || format!("S(E1 u E2) = {whole}, union of parts = {parts}"))
}

fn witness_sum(g: &Gen, w: &StateEquivalence, y: &StateExpr) -> Result<EntropySum> {
    Ok(sum_of(g, &w.e)?.add(&sum_of(g, y)?))
}

fn t16(g: &mut Gen) -> Result<Verdict> {
    let n = g.size();
    let e = g.uniform(n)?;
    g.note("E", &e);
    let o = g.oracle;
    let w = o.state_equivalence(&e)?;
    let lhs = EntropySum::from(entropy_uniform(&e, o)?).add(&sum_of(g, &w.x)?);
    match &w.bracket {
        None => {
            let rhs = witness_sum(g, &w, &w.y)?;
            ok_if(compare_sums(&lhs, &rhs, o.precision())? == Ordering::Equal, || {
                format!("S(E) + S(x) = {lhs} but S(e) + S(y) = {rhs}")
            })
        }
        Some((lo, hi)) => {
            let below = compare_sums(&witness_sum(g, &w, lo)?, &lhs, o.precision())? != Ordering::Greater;
            let above = compare_sums(&lhs, &witness_sum(g, &w, hi)?, o.precision())? != Ordering::Greater;
            if below && above {
                Ok(Verdict::Approximate)
            } else {
                Ok(Verdict::Fail("entropy formula escapes the witness bracket".into()))
            }
        }
    }
}

fn t17(g: &mut Gen) -> Result<Verdict> {
    let n = g.size();
    let e = g.uniform(n)?;
    g.note("E", &e);
    let rep = shannon_decomposition(&e, g.oracle, BITS, 30)?;
    let total = to_f64(&rep.probability_sum(BITS)?);
    ok_if(rep.residual_f64() <= 1e-12 && (total - 1.0).abs() <= 1e-12, || {
        format!("residual {} and probability total {total}", rep.residual_f64())
    })
}

fn cancellation(g: &mut Gen) -> Result<Verdict> {
    let base = g.state();
    let na = g.rng.gen_range(1..=3);
    let nb = g.rng.gen_range(1..=3);
    let a = g.uniform_like(&base, na)?;
    let b = g.uniform_like(&base, nb)?;
    let m = g.rng.gen_range(1..=16);
    let i = g.info_state(m)?;
    g.note("A", &a);
    g.note("B", &b);
    g.note("|I|", m);
    if !g.oracle.arrow(&a.combine(&i), &b.combine(&i))? {
        return Ok(Verdict::Pass);
    }
    ok_if(g.oracle.arrow(&a, &b)?, || "A + I -> B + I but A -/-> B".into())
}

fn demonic(g: &mut Gen) -> Result<Verdict> {
    let a = g.state();
    let b = if g.rng.gen_bool(0.6) { g.state_like(&a)? } else { g.state() };
    g.note("a", &a);
    g.note("b", &b);
    let o = g.oracle;
    let demon = demonically_possible(&one(&a), &one(&b), 64, o)?;
    let direct = o.possible(&one(&a), &one(&b))?;
    if direct && !demon {
        return Ok(Verdict::Inconclusive("possible, but no J within 64 records".into()));
    }
    ok_if(demon == direct, || format!("demonic {demon}, direct {direct}"))
}

fn landauer(g: &mut Gen) -> Result<Verdict> {
    let a = g.state();
    let b = g.state_like(&a)?;
    g.note("a", &a);
    g.note("b", &b);
    let v = landauer_check(&a, &b, g.oracle)?;
    ok_if(!v.violated(), || format!("a + I_b -> b with margin {}", v.margin))
}

fn close(num: &Numeric, x: &BigFloat, y: &BigFloat) -> bool {
    to_f64(&num.sub(x, y)).abs() <= PROB_TOL
}

fn prob_additivity(g: &mut Gen) -> Result<Verdict> {
    let n = g.rng.gen_range(2..=g.cfg.max_size.max(2));
    let e = g.uniform(n)?;
    g.note("E", &e);
    let Some((x, rest)) = g.split(&e)? else {
        return Ok(Verdict::Pass);
    };
    let y = g.subset(&rest, false)?;
    let o = g.oracle;
    let all: Vec<StateExpr> = e.iter().collect();
    let xs: Vec<StateExpr> = x.iter().collect();
    let ys: Vec<StateExpr> = y.iter().collect();
    let xy: Vec<StateExpr> = xs.iter().chain(&ys).cloned().collect();
    let num = Numeric::new(BITS)?;
    let p = |set: &[StateExpr]| conditional_probability(set, &all, &e, o, BITS);
    let whole = p(&all)?;
    if !close(&num, &whole, &num.one()) {
        return Ok(Verdict::Fail("P(E|E) != 1".into()));
    }
    let (px, py, pxy) = (p(&xs)?, p(&ys)?, p(&xy)?);
    if !close(&num, &pxy, &num.add(&px, &py)) {
        return Ok(Verdict::Fail("P(X u Y | E) != P(X|E) + P(Y|E)".into()));
    }
    let chain = num.mul(&conditional_probability(&ys, &xy, &e, o, BITS)?, &pxy);
    ok_if(close(&num, &chain, &py), || "chain rule fails".into())
}

fn prob_independence(g: &mut Gen) -> Result<Verdict> {
    let n = g.rng.gen_range(1..=g.cfg.max_size.min(4));
    let m = g.rng.gen_range(1..=g.cfg.max_size.min(4));
    let e = g.uniform(n)?;
    let f = g.uniform(m)?;
    let x = g.pick(&e.iter().collect::<Vec<_>>());
    let y = g.pick(&f.iter().collect::<Vec<_>>());
    g.note("E", &e);
    g.note("F", &f);
    g.note("x", &x);
    g.note("y", &y);
    let o = g.oracle;
    let num = Numeric::new(BITS)?;
    let joint = entropic_probability(&StateExpr::pair(x.clone(), y.clone()), &e.combine(&f), o, BITS)?;
    let split = num.mul(&entropic_probability(&x, &e, o, BITS)?, &entropic_probability(&y, &f, o, BITS)?);
    ok_if(close(&num, &joint, &split), || "P(x+y|E+F) != P(x|E) P(y|F)".into())
}

/// The same model with `𝕊 + c·Q₀`.
struct Shifted<'a> {
    inner: &'a dyn ModelOracle,
    c: BigRational,
}

impl ModelOracle for Shifted<'_> {
    fn name(&self) -> &str {
        "shifted"
    }
    fn arrow(&self, a: &Eidostate, b: &Eidostate) -> Result<bool> {
        self.inner.arrow(a, b)
    }
    fn state_entropy(&self, a: &StateExpr) -> Result<ExactEntropy> {
        let s = self.inner.state_entropy(a)?;
        let q = self.inner.components(a)?;
        Ok(match q.first() {
            Some(q0) => s.shift(&(&self.c * q0)),
            None => s,
        })
    }
    fn components(&self, a: &StateExpr) -> Result<Vec<BigRational>> {
        self.inner.components(a)
    }
    fn is_record(&self, a: &StateExpr) -> Result<bool> {
        self.inner.is_record(a)
    }
    fn is_mechanical(&self, a: &StateExpr) -> Result<bool> {
        self.inner.is_mechanical(a)
    }
    fn make_record(&self) -> StateExpr {
        self.inner.make_record()
    }
    fn mechanical_family(&self, bound: usize) -> Vec<StateExpr> {
        self.inner.mechanical_family(bound)
    }
    fn atom_pool(&self) -> Vec<StateExpr> {
        self.inner.atom_pool()
    }
    fn state_equivalence(&self, e: &Eidostate) -> Result<StateEquivalence> {
        self.inner.state_equivalence(e)
    }
    fn precision(&self) -> Precision {
        self.inner.precision()
    }
}

fn prob_invariance(g: &mut Gen) -> Result<Verdict> {
    let n = g.size();
    let e = g.uniform(n)?;
    let a = g.pick(&e.iter().collect::<Vec<_>>());
    let c = BigRational::new(BigInt::from(g.rng.gen_range(-24..=24)), BigInt::from(g.rng.gen_range(1..=8)));
    g.note("E", &e);
    g.note("a", &a);
    g.note("c", &c);
    let shifted = Shifted { inner: g.oracle, c };
    let num = Numeric::new(BITS)?;
    let p = entropic_probability(&a, &e, g.oracle, BITS)?;
    let q = entropic_probability(&a, &e, &shifted, BITS)?;
    ok_if(close(&num, &p, &q), || "probability depends on the shift by c Q".into())
}
