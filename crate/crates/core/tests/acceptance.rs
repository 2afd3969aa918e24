//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p eidos-core --test acceptance`; pass criterion
//! numbers after `--` to run a subset.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eidos_core::engine::numeric::to_f64;
use eidos_core::engine::{
    demonically_possible, entropy_uniform, gibbs_gap, irreversibility_estimate, landauer_check,
    shannon_decomposition,
};
use eidos_core::entropy::bracket_contains;
use eidos_core::harness::{run_axiom_suite, run_theorem_suite, Gen, SuiteConfig};
use eidos_core::oracle::information_state;
use eidos_core::quantum::{find_isometry, leak_residual, realize, QubitBudget};
use eidos_core::{
    Eidostate, EntropySum, ExactEntropy, Fault, MacroModel, ModelOracle, Precision, QuantumModel,
    StateExpr,
};

type Outcome = Result<String, String>;

const SEED: u64 = 42;

fn gen<'a>(oracle: &'a dyn ModelOracle, cfg: &'a SuiteConfig, case: u64) -> Gen<'a> {
    Gen::new(oracle, ChaCha8Rng::seed_from_u64(SEED ^ (case << 20)), cfg)
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn axiom_conformance(oracle: &dyn ModelOracle) -> Outcome {
    let t = Instant::now();
    let report = run_axiom_suite(oracle, &SuiteConfig::with_seed(SEED)).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let detail = format!(
        "{} counterexamples, {} inconclusive, {} anomalies, {} bracketed, {}",
        report.counterexamples.len(),
        report.inconclusive.len(),
        report.anomalies.len(),
        report.approximate(),
        secs(elapsed)
    );
    if let Some(c) = report.counterexamples.first() {
        return Err(format!("{detail}; first: {} seed {} {}", c.check_id, c.seed, c.observed));
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("{detail}; over 60 s"));
    }
    Ok(detail)
}

fn c1() -> Outcome {
    axiom_conformance(&MacroModel::new())
}

fn c2() -> Outcome {
    axiom_conformance(&QuantumModel::new())
}

fn c3() -> Outcome {
    let m = MacroModel::new();
    let cfg = SuiteConfig::default();
    for case in 0..500 {
        let mut g = gen(&m, &cfg, case);
        let n = g.rng.gen_range(1..=64);
        let k = g.rng.gen_range(1..=64);
        let i = g.info_state(n).map_err(|e| e.to_string())?;
        let j = g.info_state(k).map_err(|e| e.to_string())?;
        let arrow = m.arrow(&i, &j).map_err(|e| e.to_string())?;
        if arrow != (n <= k) {
            return Err(format!("|I| = {n}, |J| = {k}, arrow = {arrow}"));
        }
    }
    Ok("500 cases, 0 failures".into())
}

/// `log2 n` truncated to 32 decimals.
const LOG2_TABLE: [(u64, &str); 57] = [
    (3, "1.58496250072115618145373894394781"),
    (5, "2.32192809488736234787031942948939"),
    (6, "2.58496250072115618145373894394781"),
    (7, "2.80735492205760410744196931723183"),
    (9, "3.16992500144231236290747788789563"),
    (10, "3.32192809488736234787031942948939"),
    (11, "3.45943161863729725619936304672579"),
    (12, "3.58496250072115618145373894394781"),
    (13, "3.70043971814109216039681265425669"),
    (14, "3.80735492205760410744196931723183"),
    (15, "3.90689059560851852932405837343720"),
    (17, "4.08746284125033940825406601081040"),
    (18, "4.16992500144231236290747788789563"),
    (19, "4.24792751344358549379351942290683"),
    (20, "4.32192809488736234787031942948939"),
    (21, "4.39231742277876028889570826117964"),
    (22, "4.45943161863729725619936304672579"),
    (23, "4.52356195605701287229414824416266"),
    (24, "4.58496250072115618145373894394781"),
    (25, "4.64385618977472469574063885897878"),
    (26, "4.70043971814109216039681265425669"),
    (27, "4.75488750216346854436121683184344"),
    (28, "4.80735492205760410744196931723183"),
    (29, "4.85798099512757212071977332462798"),
    (30, "4.90689059560851852932405837343720"),
    (31, "4.95419631038687520880612359917555"),
    (33, "5.04439411935845343765310199067360"),
    (34, "5.08746284125033940825406601081040"),
    (35, "5.12928301694496645531228874672122"),
    (36, "5.16992500144231236290747788789563"),
    (37, "5.20945336562894978185780417761317"),
    (38, "5.24792751344358549379351942290683"),
    (39, "5.28540221886224834185055159820451"),
    (40, "5.32192809488736234787031942948939"),
    (41, "5.35755200461808369316597130752290"),
    (42, "5.39231742277876028889570826117964"),
    (43, "5.42626475470209793888414164046806"),
    (44, "5.45943161863729725619936304672579"),
    (45, "5.49185309632967471077779731738502"),
    (46, "5.52356195605701287229414824416266"),
    (47, "5.55458885167763737217081075423064"),
    (48, "5.58496250072115618145373894394781"),
    (49, "5.61470984411520821488393863446366"),
    (50, "5.64385618977472469574063885897878"),
    (51, "5.67242534197149558970780495475822"),
    (52, "5.70043971814109216039681265425669"),
    (53, "5.72792045456319917928077801854008"),
    (54, "5.75488750216346854436121683184344"),
    (55, "5.78135971352465960406968247621518"),
    (56, "5.80735492205760410744196931723183"),
    (57, "5.83289001416474167524725836685465"),
    (58, "5.85798099512757212071977332462798"),
    (59, "5.88264304936184125880740693193240"),
    (60, "5.90689059560851852932405837343720"),
    (61, "5.93073733756288627647220222298523"),
    (62, "5.95419631038687520880612359917555"),
    (63, "5.97727992349991647034944720512746"),
];

fn decimal(s: &str) -> BigRational {
    let (int, frac) = s.split_once('.').expect("a decimal point");
    let num: BigInt = format!("{int}{frac}").parse().expect("digits");
    BigRational::new(num, BigInt::from(10).pow(frac.len() as u32))
}

fn c4() -> Outcome {
    let precision = Precision::from_env();
    for oracle in [&MacroModel::new() as &dyn ModelOracle, &QuantumModel::new()] {
        let bit = oracle.make_bit_state();
        let s = entropy_uniform(&bit, oracle).map_err(|e| e.to_string())?;
        if s.canonical() != ExactEntropy::single(BigRational::from_integer(1.into())) {
            return Err(format!("{}: S(I_b) = {s:?}", oracle.name()));
        }
        let r = oracle.make_record();
        for n in 1..=64u64 {
            let i = information_state(&r, n as usize).map_err(|e| e.to_string())?;
            let s = entropy_uniform(&i, oracle).map_err(|e| e.to_string())?;
            if n.is_power_of_two() {
                let want = BigRational::from_integer(n.trailing_zeros().into());
                if s.as_rational() != Some(want) {
                    return Err(format!("{}: S(I) for |I| = {n} is {s:?}", oracle.name()));
                }
                continue;
            }
            let (_, digits) = LOG2_TABLE.iter().find(|(k, _)| *k == n).expect("tabulated");
            let lo = decimal(digits);
            let hi = &lo + decimal("0.00000000000000000000000000000001");
            let inside = bracket_contains(&EntropySum::from(&s), &lo, &hi, precision)
                .map_err(|e| e.to_string())?;
            if !inside {
                return Err(format!("{}: S(I) for |I| = {n} outside [{digits}, +1e-32]", oracle.name()));
            }
        }
    }
    Ok("S(I_b) = 1; 64 sizes exact or within 1e-32, both models".into())
}

fn c5() -> Outcome {
    let m = MacroModel::new();
    let cfg = SuiteConfig::default();
    let mut done = 0;
    let mut case = 0;
    while done < 200 {
        case += 1;
        let mut g = gen(&m, &cfg, 1_000 + case);
        let n = g.rng.gen_range(2..=cfg.max_size);
        let e = g.uniform(n).map_err(|e| e.to_string())?;
        let Some((e1, e2)) = g.split(&e).map_err(|e| e.to_string())? else {
            continue;
        };
        let whole = m.entropy_exact(&e1.union(&e2, 1 << 10).map_err(|e| e.to_string())?);
        let whole = whole.map_err(|e| e.to_string())?;
        let s1 = m.entropy_exact(&e1).map_err(|e| e.to_string())?;
        let s2 = m.entropy_exact(&e2).map_err(|e| e.to_string())?;
        if whole.canonical() != s1.union(&s2).canonical() {
            return Err(format!("E1 = {e1:?}, E2 = {e2:?}"));
        }
        done += 1;
    }
    Ok("200 pairs, exact".into())
}

fn c6() -> Outcome {
    let mut worst = 0.0f64;
    for oracle in [&MacroModel::new() as &dyn ModelOracle, &QuantumModel::new()] {
        let cfg = SuiteConfig::default();
        for case in 0..200 {
            let mut g = gen(oracle, &cfg, 2_000 + case);
            let n = g.size();
            let e = g.uniform(n).map_err(|e| e.to_string())?;
            let report = shannon_decomposition(&e, oracle, 128, 30).map_err(|e| e.to_string())?;
            let r = report.residual_f64();
            worst = worst.max(r);
            if r > 1e-12 {
                return Err(format!("{}: residual {r:e} for {e:?}", oracle.name()));
            }
        }
    }
    Ok(format!("200 eidostates per model, worst residual {worst:e}"))
}

fn c7() -> Outcome {
    let m = MacroModel::new();
    let cfg = SuiteConfig::default();
    let t = Instant::now();
    let limit = BigRational::new(1.into(), 32.into());
    let mut widest = BigRational::from_integer(0.into());
    for case in 0..50 {
        let mut g = gen(&m, &cfg, 3_000 + case);
        let a = g.state();
        let b = g.state_like(&a).map_err(|e| e.to_string())?;
        let est = irreversibility_estimate(&a, &b, 64, &m).map_err(|e| e.to_string())?;
        let sa = m.state_entropy(&a).map_err(|e| e.to_string())?.as_rational();
        let sb = m.state_entropy(&b).map_err(|e| e.to_string())?.as_rational();
        let (Some(sa), Some(sb)) = (sa, sb) else {
            return Err(format!("irrational singleton entropy for {a} or {b}"));
        };
        let delta = sb - sa;
        if !est.contains(&delta) {
            return Err(format!("{a} -> {b}: [{}, {}] misses {delta}", est.lower, est.upper));
        }
        if est.width() > limit {
            return Err(format!("{a} -> {b}: width {}", est.width()));
        }
        if est.width() > widest {
            widest = est.width();
        }
    }
    let elapsed = t.elapsed();
    if elapsed > Duration::from_secs(120) {
        return Err(format!("50 pairs took {}", secs(elapsed)));
    }
    Ok(format!("50 pairs, widest bracket {widest}, {}", secs(elapsed)))
}

fn landauer_states() -> (Vec<StateExpr>, Vec<StateExpr>) {
    let mut atoms: Vec<StateExpr> = (0..=8)
        .map(|k| MacroModel::s(&BigRational::new(k.into(), 8.into())))
        .collect();
    atoms.push(StateExpr::atom(eidos_core::macrostate::RECORD_ATOM));
    let mut shallow = atoms.clone();
    for x in &atoms {
        for y in &atoms {
            shallow.push(StateExpr::pair(x.clone(), y.clone()));
        }
    }
    let mut deep = shallow.clone();
    for x in &shallow[atoms.len()..] {
        for y in &shallow {
            deep.push(StateExpr::pair(x.clone(), y.clone()));
            deep.push(StateExpr::pair(y.clone(), x.clone()));
        }
    }
    deep.sort();
    deep.dedup();
    (shallow, deep)
}

fn c8() -> Outcome {
    let m = MacroModel::new();
    let (shallow, deep) = landauer_states();
    let mut checked = 0usize;
    let mut applicable = 0usize;
    let mut visit = |a: &StateExpr, b: &StateExpr| -> Result<(), String> {
        let v = landauer_check(a, b, &m).map_err(|e| e.to_string())?;
        checked += 1;
        if v.applicable {
            applicable += 1;
        }
        if v.violated() {
            return Err(format!("{a} + I_b -> {b} with margin {:?}", v.margin_exact));
        }
        Ok(())
    };
    for a in &shallow {
        for b in &shallow {
            visit(a, b)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut sampled = 0;
    while sampled < 100_000 {
        let a = &deep[rng.gen_range(0..deep.len())];
        let b = &deep[rng.gen_range(0..deep.len())];
        if m.q_value(a).ok() != m.q_value(b).ok() {
            continue;
        }
        visit(a, b)?;
        sampled += 1;
    }
    Ok(format!(
        "{} shallow states exhaustive plus 100000 deep equal-Q pairs; {checked} checked, {applicable} erasures, 0 violations",
        shallow.len()
    ))
}

fn c9() -> Outcome {
    let m = QuantumModel::new();
    let budget = QubitBudget::default();
    let mut worst = 0.0f64;
    for da in 1..=8u64 {
        for db in 1..=8u64 {
            let states = [QuantumModel::d(da), QuantumModel::d(db)];
            let real = realize(&m, &states, budget, da * 8 + db).map_err(|e| e.to_string())?;
            let (pa, pb) = if da == db {
                (&real.projectors[0], &real.projectors[0])
            } else {
                (&real.projectors[0], &real.projectors[1])
            };
            let u = find_isometry(pa, pb).map_err(|e| e.to_string())?;
            match (u, da <= db) {
                (Some(u), true) => {
                    let r = leak_residual(&u, pa, pb);
                    worst = worst.max(r);
                    if r > 1e-10 {
                        return Err(format!("d_A = {da}, d_B = {db}: residual {r:e}"));
                    }
                }
                (None, false) => {}
                (u, _) => {
                    return Err(format!("d_A = {da}, d_B = {db}: isometry found = {}", u.is_some()));
                }
            }
            let arrow = m.arrow_states(&states[0], &states[1]).map_err(|e| e.to_string())?;
            if arrow != (da <= db) {
                return Err(format!("d_A = {da}, d_B = {db}: arrow = {arrow}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mixture = 0.0f64;
    for case in 0..50u64 {
        let mut dims: Vec<u64> = (1..=8).filter(|_| rng.gen_bool(0.5)).collect();
        if dims.is_empty() {
            dims.push(rng.gen_range(1..=8));
        }
        let states: Vec<StateExpr> = dims.iter().map(|&d| QuantumModel::d(d)).collect();
        let real = realize(&m, &states, budget, case).map_err(|e| e.to_string())?;
        let e = Eidostate::from_states(states.clone()).map_err(|e| e.to_string())?;
        let report = shannon_decomposition(&e, &m, 128, 30).map_err(|e| e.to_string())?;
        let mut members = Vec::new();
        let mut probs = Vec::new();
        for (s, p) in &report.support {
            members.push(real.index_of(s).ok_or("state missing from realization")?);
            probs.push(to_f64(p));
        }
        let r = real.mixture_residual(&members, &probs);
        mixture = mixture.max(r);
        if r > 1e-10 {
            return Err(format!("dims {dims:?}: mixture residual {r:e}"));
        }
    }
    Ok(format!("64 dimension pairs, worst leak {worst:e}; 50 mixtures, worst {mixture:e}"))
}

fn c10() -> Outcome {
    let m = MacroModel::new();
    let cfg = SuiteConfig::default();
    let mut done = 0;
    let mut case = 0;
    let mut smallest = f64::INFINITY;
    while done < 100 {
        case += 1;
        let mut g = gen(&m, &cfg, 4_000 + case);
        let n = g.rng.gen_range(2..=cfg.max_size);
        let e = g.uniform(n).map_err(|e| e.to_string())?;
        if e.len_usize().unwrap_or(0) < 2 {
            continue;
        }
        let report = shannon_decomposition(&e, &m, 128, 30).map_err(|e| e.to_string())?;
        let p: Vec<f64> = report.support.iter().map(|(_, x)| to_f64(x)).collect();
        let own = to_f64(&gibbs_gap(&e, &p, &m, 128).map_err(|e| e.to_string())?);
        if own.abs() > 1e-12 {
            return Err(format!("entropic distribution gap {own:e} for {e:?}"));
        }
        let noise: Vec<f64> = (0..p.len()).map(|_| g.rng.gen_range(0.0..1.0)).collect();
        let total: f64 = noise.iter().sum();
        let t = g.rng.gen_range(0.01..1.0);
        let trial: Vec<f64> = p.iter().zip(&noise).map(|(a, b)| (1.0 - t) * a + t * b / total).collect();
        let tv = 0.5 * p.iter().zip(&trial).map(|(a, b)| (a - b).abs()).sum::<f64>();
        if tv < 1e-3 {
            continue;
        }
        let gap = to_f64(&gibbs_gap(&e, &trial, &m, 128).map_err(|e| e.to_string())?);
        if gap <= 0.0 {
            return Err(format!("gap {gap:e} at total variation {tv:e} for {e:?}"));
        }
        smallest = smallest.min(gap);
        done += 1;
    }
    Ok(format!("100 perturbations, smallest gap {smallest:e}"))
}

fn c11() -> Outcome {
    let mut agree = 0;
    for oracle in [&MacroModel::new() as &dyn ModelOracle, &QuantumModel::new()] {
        let cfg = SuiteConfig::default();
        for case in 0..500 {
            let mut g = gen(oracle, &cfg, 5_000 + case);
            let a = g.state();
            let b = if g.rng.gen_bool(0.5) {
                g.state_like(&a).map_err(|e| e.to_string())?
            } else {
                g.state()
            };
            let (ea, eb) = (Eidostate::singleton(a.clone()), Eidostate::singleton(b.clone()));
            let direct = oracle.possible(&ea, &eb).map_err(|e| e.to_string())?;
            let demonic = demonically_possible(&ea, &eb, 1024, oracle).map_err(|e| e.to_string())?;
            if direct != demonic {
                return Err(format!("{}: {a} vs {b}: possible {direct}, demonic {demonic}", oracle.name()));
            }
            agree += usize::from(direct);
        }
    }
    Ok(format!("500 pairs per model, 0 disagreements ({agree} possible)"))
}

fn c12() -> Outcome {
    let cfg = SuiteConfig::with_seed(SEED);
    let mut found = Vec::new();
    for fault in Fault::ALL {
        let m = MacroModel::new().with_fault(fault);
        let mut report = run_axiom_suite(&m, &cfg).map_err(|e| e.to_string())?;
        if report.passed() {
            report = report.merge(run_theorem_suite(&m, &cfg).map_err(|e| e.to_string())?);
        }
        let Some(first) = report.counterexamples.first() else {
            return Err(format!("{fault:?} went undetected"));
        };
        found.push(format!("{fault:?} by {}", first.check_id));
    }
    Ok(found.join(", "))
}

const CRITERIA: [(u32, &str, fn() -> Outcome); 12] = [
    (1, "axiom conformance, macrostate model", c1),
    (2, "axiom conformance, quantum model", c2),
    (3, "information states compare by size", c3),
    (4, "bit-state and information-state entropy", c4),
    (5, "entropy of a disjoint union", c5),
    (6, "mean entropy plus Shannon information", c6),
    (7, "irreversibility emerges from the arrow", c7),
    (8, "Landauer bound", c8),
    (9, "quantum isometries and mixtures", c9),
    (10, "Gibbs uniqueness", c10),
    (11, "demonic equivalence", c11),
    (12, "fault-injection sensitivity", c12),
];

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, run) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = secs(t.elapsed());
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} [{took}]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail} [{took}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
