use rand::Rng;

use super::{ok_if, Check, Gen, Verdict};
use crate::eidostate::{Eidostate, Process};
use crate::engine::classify;
use crate::oracle::information_state;
use crate::state::StateExpr;
use crate::Result;

pub(crate) const CHECKS: &[Check] = &[
    Check { id: "A1a", run: a1a },
    Check { id: "A1b", run: a1b },
    Check { id: "A1c", run: a1c },
    Check { id: "A2a", run: a2a },
    Check { id: "A2b", run: a2b },
    Check { id: "A2c", run: a2c },
    Check { id: "A2d", run: a2d },
    Check { id: "A3", run: a3 },
    Check { id: "A4a", run: a4a },
    Check { id: "A4b", run: a4b },
    Check { id: "A5", run: a5 },
    Check { id: "A6", run: a6 },
    Check { id: "A7", run: a7 },
    Check { id: "A8", run: a8 },
    Check { id: "A9", run: a9 },
];

/// Largest `k` tried when searching information states of size `2^k`.
const DEMON_SEARCH_BITS: u32 = 64;

fn one(s: &StateExpr) -> Eidostate {
    Eidostate::singleton(s.clone())
}

fn a1a(g: &mut Gen) -> Result<Verdict> {
    let e = g.eidostate()?;
    g.note("E", &e);
    let f = e.prime_factorize();
    let primes = f.factors.iter().all(|x| x.is_prime());
    ok_if(f.recombine() == e && primes, || format!("factorization of {e} does not recombine into primes"))
}

fn a1b(g: &mut Gen) -> Result<Verdict> {
    let a = g.eidostate()?;
    let b = g.eidostate()?;
    g.note("A", &a);
    g.note("B", &b);
    let c = a.combine(&b);
    let mut joint = a.prime_factors();
    joint.extend(b.prime_factors());
    joint.sort();
    let mut got = c.prime_factors();
    got.sort();
    let split_ok = c.split() == Some((&a, &b));
    ok_if(c.len() == a.len() * b.len() && got == joint && split_ok, || {
        "A + B does not decompose into A and B".to_owned()
    })
}

fn a1c(g: &mut Gen) -> Result<Verdict> {
    let e = g.states(g.cfg.max_size)?;
    g.note("E", &e);
    let sub = g.subset(&e, false)?;
    g.note("subset", &sub);
    let n = e.len_usize().unwrap_or(usize::MAX);
    let count = e.subsets(crate::eidostate::ENUMERATION_CAP)?.count();
    ok_if(sub.is_subset_of(&e) && count == (1usize << n) - 1, || {
        format!("{count} subsets for {n} elements")
    })
}

fn a2a(g: &mut Gen) -> Result<Verdict> {
    let small = g.cfg.max_size.min(3);
    let mut parts = Vec::new();
    for _ in 0..3 {
        let n = g.rng.gen_range(1..=small);
        parts.push(g.states(n)?);
    }
    let (e1, e2, e3) = (&parts[0], &parts[1], &parts[2]);
    let a = e1.combine(e2).combine(e3);
    let b = match g.rng.gen_range(0..4) {
        0 => e2.combine(&e1.combine(e3)),
        1 => e3.combine(&e2.combine(e1)),
        2 => e3.combine(e1).combine(e2),
        _ => e1.combine(&e2.combine(e3)),
    };
    g.note("A", &a);
    g.note("B", &b);
    if !a.similar(&b) {
        return Ok(Verdict::Fail("rearranged factors are not similar".into()));
    }
    ok_if(g.oracle.arrow(&a, &b)?, || "A ~ B but A -/-> B".into())
}

/// Singletons or uniform eidostates sharing components, `k` of them.
fn related(g: &mut Gen, k: usize) -> Result<Vec<Eidostate>> {
    let base = g.state();
    let singletons = g.rng.gen_bool(0.5);
    let mut out = Vec::new();
    for _ in 0..k {
        if singletons {
            let s = g.state_like(&base)?;
            out.push(one(&s));
        } else {
            let n = g.rng.gen_range(1..=g.cfg.max_size.min(4));
            out.push(g.uniform_like(&base, n)?);
        }
    }
    Ok(out)
}

fn a2b(g: &mut Gen) -> Result<Verdict> {
    let mut xs = related(g, 3)?;
    let o = g.oracle;
    for _ in 0..3 {
        for i in 0..2 {
            if !o.arrow(&xs[i], &xs[i + 1])? && o.arrow(&xs[i + 1], &xs[i])? {
                xs.swap(i, i + 1);
            }
        }
    }
    g.note("A", &xs[0]);
    g.note("B", &xs[1]);
    g.note("C", &xs[2]);
    if !(o.arrow(&xs[0], &xs[1])? && o.arrow(&xs[1], &xs[2])?) {
        return Ok(Verdict::Pass);
    }
    ok_if(o.arrow(&xs[0], &xs[2])?, || "A -> B -> C but A -/-> C".into())
}

/// A related pair oriented so that `A → B` when either direction holds.
fn oriented(g: &mut Gen) -> Result<Option<(Eidostate, Eidostate)>> {
    let mut xs = related(g, 2)?;
    let (b, a) = (xs.pop().expect("two"), xs.pop().expect("two"));
    if g.oracle.arrow(&a, &b)? {
        Ok(Some((a, b)))
    } else if g.oracle.arrow(&b, &a)? {
        Ok(Some((b, a)))
    } else {
        Ok(None)
    }
}

fn a2c(g: &mut Gen) -> Result<Verdict> {
    let Some((a, b)) = oriented(g)? else {
        return Ok(Verdict::Pass);
    };
    let c = g.eidostate()?;
    g.note("A", &a);
    g.note("B", &b);
    g.note("C", &c);
    let (ac, bc) = if g.rng.gen_bool(0.5) {
        (a.combine(&c), b.combine(&c))
    } else {
        (c.combine(&a), c.combine(&b))
    };
    ok_if(g.oracle.arrow(&ac, &bc)?, || "A -> B but A + C -/-> B + C".into())
}

fn a2d(g: &mut Gen) -> Result<Verdict> {
    let mut xs = related(g, 2)?;
    let (b, a) = (xs.pop().expect("two"), xs.pop().expect("two"));
    let s = g.state();
    g.note("A", &a);
    g.note("B", &b);
    g.note("s", &s);
    let pad = one(&s);
    if !g.oracle.arrow(&a.combine(&pad), &b.combine(&pad))? {
        return Ok(Verdict::Pass);
    }
    ok_if(g.oracle.arrow(&a, &b)?, || "A + s -> B + s but A -/-> B".into())
}

fn a3(g: &mut Gen) -> Result<Verdict> {
    let a = if g.rng.gen_bool(0.5) {
        let n = g.rng.gen_range(2..=g.cfg.max_size.max(2));
        g.uniform(n)?
    } else {
        g.eidostate()?
    };
    g.note("A", &a);
    if a.is_singleton() {
        return Ok(Verdict::Pass);
    }
    let b = g.subset(&a, true)?;
    g.note("B", &b);
    ok_if(!g.oracle.arrow(&a, &b)?, || "B is a proper subset of A but A -> B".into())
}

fn a4a(g: &mut Gen) -> Result<Verdict> {
    let base = g.state();
    let n = g.rng.gen_range(2..=g.cfg.max_size.max(2));
    let a = g.uniform_like(&base, n)?;
    g.note("A", &a);
    let mut target = None;
    for _ in 0..8 {
        let b = g.state_like(&base)?;
        if g.oracle.arrow(&a, &one(&b))? {
            target = Some(b);
            break;
        }
    }
    let Some(b) = target else {
        return Ok(Verdict::Pass);
    };
    g.note("b", &b);
    for sub in a.subsets(crate::eidostate::ENUMERATION_CAP)? {
        if !g.oracle.arrow(&sub, &one(&b))? {
            return Ok(Verdict::Fail(format!("A -> b but {sub} -/-> b")));
        }
    }
    Ok(Verdict::Pass)
}

fn a4b(g: &mut Gen) -> Result<Verdict> {
    let base = g.state();
    let n = g.rng.gen_range(2..=g.cfg.max_size.max(2));
    let a = g.uniform_like(&base, n)?;
    let b = g.uniform_like(&base, n)?;
    g.note("A", &a);
    g.note("B", &b);
    for _ in 0..4 {
        let (Some((a1, a2)), Some((b1, b2))) = (g.split(&a)?, g.split(&b)?) else {
            return Ok(Verdict::Pass);
        };
        if g.oracle.arrow(&a1, &b1)? && g.oracle.arrow(&a2, &b2)? {
            g.note("A1", &a1);
            g.note("B1", &b1);
            return ok_if(g.oracle.arrow(&a, &b)?, || "A1 -> B1 and A2 -> B2 but A -/-> B".into());
        }
    }
    Ok(Verdict::Pass)
}

fn a5(g: &mut Gen) -> Result<Verdict> {
    let o = g.oracle;
    let bit = o.make_bit_state();
    let r = o.make_record();
    g.note("I_b", &bit);
    let elems = bit.to_vec(2)?;
    if elems.len() != 2 {
        return Ok(Verdict::Fail("bit state does not have two elements".into()));
    }
    for x in &elems {
        if !o.is_record(x)? {
            return Ok(Verdict::Fail(format!("{x} in the bit state is not a record")));
        }
    }
    let kind = classify(&Process::new(one(&r), bit.clone()), o)?;
    if !kind.is_possible() {
        return Ok(Verdict::Fail("the bit process is impossible".into()));
    }
    let a = g.state();
    g.note("a", &a);
    for x in elems.iter().chain(std::iter::once(&r)) {
        let ax = one(&StateExpr::pair(a.clone(), x.clone()));
        if !(o.arrow(&one(&a), &ax)? && o.arrow(&ax, &one(&a))?) {
            return Ok(Verdict::Fail(format!("a and a + {x} are not reversible")));
        }
    }
    Ok(Verdict::Pass)
}

/// An information state of size `2^k`: `{r}` or `k` copies of the bit state.
fn pow2_info(g: &Gen, k: u32) -> Result<Eidostate> {
    if k == 0 {
        return information_state(&g.oracle.make_record(), 1);
    }
    g.oracle.make_bit_state().n_copies(k as usize)
}

fn a6(g: &mut Gen) -> Result<Verdict> {
    let a = g.state();
    let b = g.state_like(&a)?;
    g.note("a", &a);
    g.note("b", &b);
    let o = g.oracle;
    let mut found = None;
    for k in 0..=DEMON_SEARCH_BITS {
        let j = pow2_info(g, k)?;
        if o.arrow(&one(&a), &one(&b).combine(&j))? {
            found = Some(k);
            break;
        }
    }
    let Some(k) = found else {
        return Ok(Verdict::Pass);
    };
    g.note("|J|", format!("2^{k}"));
    let mut clause_a = false;
    for k in 0..=DEMON_SEARCH_BITS {
        let i = pow2_info(g, k)?;
        if o.arrow(&one(&b), &one(&a).combine(&i))? {
            clause_a = true;
            break;
        }
    }
    let n = g.rng.gen_range(1..=64);
    let i = g.info_state(n)?;
    g.note("I", &i);
    let bi = one(&b).combine(&i);
    let clause_b = o.arrow(&one(&a), &bi)? || o.arrow(&bi, &one(&a))?;
    if !clause_b {
        return Ok(Verdict::Fail("neither a -> b + I nor b + I -> a".into()));
    }
    if !clause_a {
        return Ok(Verdict::Inconclusive(format!(
            "no I with b -> a + I among sizes up to 2^{DEMON_SEARCH_BITS}"
        )));
    }
    Ok(Verdict::Pass)
}

fn a7(g: &mut Gen) -> Result<Verdict> {
    let base = g.state();
    let na = g.rng.gen_range(1..=3);
    let nb = g.rng.gen_range(1..=3);
    let a = g.uniform_like(&base, na)?;
    let b = g.uniform_like(&base, nb)?;
    let m = g.rng.gen_range(1..=4);
    let j = g.info_state(m)?;
    g.note("A", &a);
    g.note("B", &b);
    g.note("J", &j);
    for n in 1..=g.cfg.stability_n {
        if !g.oracle.arrow(&a.n_copies(n)?, &b.n_copies(n)?.combine(&j))? {
            return Ok(Verdict::Pass);
        }
    }
    if g.oracle.arrow(&a, &b)? {
        Ok(Verdict::Pass)
    } else {
        Ok(Verdict::Anomaly(format!(
            "nA -> nB + J for n <= {} but A -/-> B",
            g.cfg.stability_n
        )))
    }
}

fn a8(g: &mut Gen) -> Result<Verdict> {
    let fam = g.oracle.mechanical_family(4);
    if fam.is_empty() {
        return Ok(Verdict::Pass);
    }
    let l = g.pick(&fam);
    let m = g.pick(&fam);
    g.note("l", &l);
    g.note("m", &m);
    let o = g.oracle;
    if !(o.is_mechanical(&l)? && o.is_mechanical(&m)?) {
        return Ok(Verdict::Fail("family member is not mechanical".into()));
    }
    if !o.is_mechanical(&StateExpr::pair(l.clone(), m.clone()))? {
        return Ok(Verdict::Fail("l + m is not mechanical".into()));
    }
    if o.arrow(&one(&l), &one(&m))? && !o.arrow(&one(&m), &one(&l))? {
        return Ok(Verdict::Fail("l -> m but m -/-> l".into()));
    }
    Ok(Verdict::Pass)
}

fn a9(g: &mut Gen) -> Result<Verdict> {
    let n = g.size();
    let e = g.uniform(n)?;
    g.note("E", &e);
    let o = g.oracle;
    let w = o.state_equivalence(&e)?;
    g.note("e", &w.e);
    g.note("x", &w.x);
    g.note("y", &w.y);
    if !o.arrow_states(&w.x, &w.y)? {
        return Ok(Verdict::Fail("x -/-> y".into()));
    }
    let ex = e.combine(&one(&w.x));
    let with = |y: &StateExpr| one(&StateExpr::pair(w.e.clone(), y.clone()));
    match &w.bracket {
        None => {
            let ey = with(&w.y);
            ok_if(o.arrow(&ex, &ey)? && o.arrow(&ey, &ex)?, || "E + x and e + y are not reversible".into())
        }
        Some((lo, hi)) => {
            if o.arrow(&with(lo), &ex)? && o.arrow(&ex, &with(hi))? {
                Ok(Verdict::Approximate)
            } else {
                Ok(Verdict::Fail("bracketing witness does not enclose E + x".into()))
            }
        }
    }
}
