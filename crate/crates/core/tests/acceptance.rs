//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wittbox::count::{count_bruteforce, verify, CountOptions, Tier};
use wittbox::suite::{power_box_instance, product_box_instance, run_suite, teichmuller_linear_instance, SuiteReport};
use wittbox::witt::{
    check_ghost_additivity, check_ghost_multiplicativity, closed_form_s1, is_weighted_homogeneous_of, witt_prod_polys,
    witt_sum_polys, WittVarLayout, DEFAULT_TERM_BUDGET,
};
use wittbox::zq::check_prop14;
use wittbox::{FieldCtx, ZqCtx};

/// Counts and valuations are compared exactly.
const COUNT_TOLERANCE: u64 = 0;
const PRODUCT_BOX_LIMIT: Duration = Duration::from_millis(1);
const POWER_BOX_LIMIT: Duration = Duration::from_secs(10);
const TEICHMULLER_LIMIT: Duration = Duration::from_secs(2);
const SUITE_LIMIT: Duration = Duration::from_secs(300);
const SUITE_SEED: u64 = 2024;
const SUITE_SIZE: u64 = 500;
const GHOST_TRIALS: usize = 100;
/// Rings up to this size get an exhaustive digit round trip.
const EXHAUSTIVE_RING: u64 = 10_000;
/// Rings up to this size get every pair checked against Witt addition.
const ALL_PAIRS_RING: u64 = 256;
const RANDOM_PAIRS: usize = 10_000;

type Outcome = Result<String, String>;

fn exact(what: &str, got: u64, want: u64) -> Result<(), String> {
    if got.abs_diff(want) > COUNT_TOLERANCE {
        Err(format!("{what}: got {got}, want {want}"))
    } else {
        Ok(())
    }
}

fn within(what: &str, took: Duration, limit: Duration) -> Result<(), String> {
    if took > limit {
        Err(format!("{what} took {took:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn product_boxes() -> Outcome {
    let opts = CountOptions::default();
    let mut notes = Vec::new();
    for (a, want) in [(0u64, 1u64), (1, 7)] {
        let inst = product_box_instance(a).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let count = count_bruteforce(&inst, &opts).map_err(|e| e.to_string())?;
        within("count", t.elapsed(), PRODUCT_BOX_LIMIT)?;
        let r = verify(&inst, &opts).map_err(|e| e.to_string())?;
        exact(&format!("|V_{a}|"), count, want)?;
        if r.fq_count != Some(count) {
            return Err(format!("a = {a}: reduced count {:?} vs {count}", r.fq_count));
        }
        notes.push(format!("|V_{a}| = {count}"));
    }
    Ok(format!("{}, counters agree", notes.join(", ")))
}

fn power_boxes() -> Outcome {
    let rows: [([u32; 5], u64, u32); 6] = [
        ([4, 4, 4, 4, 4], 1206, 2),
        ([5, 5, 5, 5, 5], 2601, 2),
        ([6, 6, 6, 6, 6], 864, 3),
        ([7, 7, 7, 7, 7], 1881, 2),
        ([8, 8, 8, 8, 8], 606, 1),
        ([4, 7, 2, 5, 8], 660, 1),
    ];
    let opts = CountOptions::default();
    let t = Instant::now();
    let mut mismatches = Vec::new();
    let mut seen = Vec::new();
    for (u, count, ord) in rows {
        let inst = power_box_instance(&u).map_err(|e| e.to_string())?;
        let r = verify(&inst, &opts).map_err(|e| e.to_string())?;
        let got_ord = r.ordp.unwrap_or(0);
        seen.push(format!("{}:{}/{}", u.map(|d| d.to_string()).join(""), r.count, got_ord));
        if exact("count", r.count, count).is_err() || got_ord != ord {
            mismatches.push(format!("u = {u:?}: got {} (ord {got_ord}), want {count} (ord {ord})", r.count));
        }
    }
    within("six rows", t.elapsed(), POWER_BOX_LIMIT)?;
    if mismatches.is_empty() {
        Ok(seen.join(" "))
    } else {
        Err(mismatches.join("; "))
    }
}

fn teichmuller_baseline() -> Outcome {
    let inst = teichmuller_linear_instance(3, 2, 5, 2).map_err(|e| e.to_string())?;
    let t = Instant::now();
    let r = verify(&inst, &CountOptions::default()).map_err(|e| e.to_string())?;
    within("count", t.elapsed(), TEICHMULLER_LIMIT)?;
    let ord = r.ordp.unwrap_or(0);
    if ord != 8 {
        return Err(format!("|V| = {}, ord_p = {ord}, want ord_p = 8", r.count));
    }
    Ok(format!("|V| = {}, ord_p = 8", r.count))
}

fn teichmuller_residues() -> Outcome {
    for p in [2u64, 3, 5] {
        for m in [2u32, 3] {
            let rep = check_prop14(p, m).map_err(|e| e.to_string())?;
            if !rep.passed() {
                return Err(format!("p = {p}, m = {m}: {:?}", rep.failures));
            }
        }
    }
    Ok("p in {2,3,5}, m in {2,3}, exhaustive".into())
}

fn structure_identities() -> Outcome {
    let b = DEFAULT_TERM_BUDGET;
    let err = |e: wittbox::Error| e.to_string();
    for p in [2u64, 3, 5] {
        for r in 2..=5 {
            let set = witt_sum_polys(p, r, 1, b).map_err(err)?;
            if *set.s[1] != closed_form_s1(p, r) {
                return Err(format!("S_1 closed form fails at p = {p}, r = {r}"));
            }
        }
        let m = witt_prod_polys(p, 1, b).map_err(err)?;
        let pe = p as u32;
        let m0 = wittbox::mpoly::int_poly(2, &[(1, &[1, 1])]);
        let m1 = wittbox::mpoly::int_poly(4, &[(1, &[pe, 0, 0, 1]), (1, &[0, pe, 1, 0]), (p as i64, &[0, 0, 1, 1])]);
        if *m[0] != m0 || *m[1] != m1 {
            return Err(format!("M_0 or M_1 wrong at p = {p}"));
        }
    }
    let mut checked = 0;
    for (p, nmax) in [(2u64, 3usize), (3, 2)] {
        for r in 2..=4 {
            let set = witt_sum_polys(p, r, nmax, b).map_err(err)?;
            for (n, f) in set.s.iter().enumerate() {
                let w = WittVarLayout::new(r, n).weights(p);
                if !is_weighted_homogeneous_of(f, &w, p.pow(n as u32)) {
                    return Err(format!("S_{n}^({r}) at p = {p} is not homogeneous"));
                }
                checked += 1;
            }
            let rep = check_ghost_additivity(&set, GHOST_TRIALS, 5).map_err(err)?;
            if !rep.passed() {
                return Err(format!("ghost additivity fails at p = {p}, r = {r}"));
            }
        }
        let m = witt_prod_polys(p, nmax, b).map_err(err)?;
        for (n, f) in m.iter().enumerate() {
            let w = WittVarLayout::new(2, n).weights(p);
            if !is_weighted_homogeneous_of(f, &w, 2 * p.pow(n as u32)) {
                return Err(format!("M_{n} at p = {p} is not homogeneous"));
            }
            checked += 1;
        }
        if !check_ghost_multiplicativity(p, &m, GHOST_TRIALS, 5).map_err(err)?.passed() {
            return Err(format!("ghost multiplicativity fails at p = {p}"));
        }
    }
    Ok(format!("S_1 closed forms, M_0/M_1, {checked} homogeneity checks, {GHOST_TRIALS} ghost trials each"))
}

fn suite_oracle(report: &SuiteReport, took: Duration) -> Outcome {
    within("suite", took, SUITE_LIMIT)?;
    if let Some(f) = report.failures.first() {
        return Err(format!("{} failures; first #{}: {}", report.failures.len(), f.index, f.error));
    }
    if report.cross_checked != SUITE_SIZE {
        return Err(format!("only {} of {SUITE_SIZE} instances cross-checked", report.cross_checked));
    }
    Ok(format!("{SUITE_SIZE} instances (seed {SUITE_SEED}) cross-checked in {took:.1?}"))
}

fn suite_bounds(report: &SuiteReport) -> Outcome {
    if !report.failures.is_empty() {
        return Err(format!("{} failures", report.failures.len()));
    }
    if report.bound_enforced == 0 || report.ax_katz_cases == 0 {
        return Err("suite exercised no bound or no Ax-Katz case".into());
    }
    Ok(format!(
        "strong {}, weak {}, none {}; bound enforced on {}, vacuous {}, Ax-Katz cases {}",
        report.strong, report.weak, report.no_hypothesis, report.bound_enforced, report.vacuous, report.ax_katz_cases
    ))
}

fn digit_round_trips() -> Outcome {
    let err = |e: wittbox::Error| e.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut rings = 0;
    for (p, h, m) in [
        (2u64, 1usize, 6u32),
        (3, 1, 4),
        (5, 1, 3),
        (7, 1, 3),
        (2, 2, 4),
        (3, 2, 4),
        (2, 3, 3),
        (2, 4, 4),
        (5, 2, 3),
        (7, 2, 3),
    ] {
        let ring = ZqCtx::new(FieldCtx::new(p, h).map_err(err)?, m).map_err(err)?;
        let size = ring.size().unwrap();
        let elems: Vec<_> = if size <= EXHAUSTIVE_RING {
            (0..size).map(|i| ring.from_index(i)).collect()
        } else {
            (0..RANDOM_PAIRS).map(|_| ring.from_index(rng.gen_range(0..size))).collect()
        };
        for a in &elems {
            if ring.from_digits(&ring.digits(a).map_err(err)?).map_err(err)? != *a {
                return Err(format!("round trip fails in ring {p}^{h}, m = {m}"));
            }
        }
        let pairs: Vec<(u64, u64)> = if size <= ALL_PAIRS_RING {
            (0..size).flat_map(|i| (0..size).map(move |j| (i, j))).collect()
        } else {
            (0..RANDOM_PAIRS).map(|_| (rng.gen_range(0..size), rng.gen_range(0..size))).collect()
        };
        for (i, j) in pairs {
            let (a, b) = (ring.from_index(i), ring.from_index(j));
            let (da, db) = (ring.digits(&a).map_err(err)?, ring.digits(&b).map_err(err)?);
            let sum = ring.from_digits(&ring.witt_add_digits(&da, &db).map_err(err)?).map_err(err)?;
            let prod = ring.from_digits(&ring.witt_mul_digits(&da, &db).map_err(err)?).map_err(err)?;
            if sum != ring.add(&a, &b) || prod != ring.mul(&a, &b) {
                return Err(format!("Witt arithmetic disagrees in ring {p}^{h}, m = {m}"));
            }
        }
        rings += 1;
    }
    Ok(format!("{rings} rings"))
}

fn counterexamples() -> Outcome {
    let opts = CountOptions::default();
    let mut cases = vec![("product box a = 1".to_string(), product_box_instance(1))];
    for u in [[8u32, 8, 8, 8, 8], [4, 7, 2, 5, 8]] {
        cases.push((format!("power box u = {u:?}"), power_box_instance(&u)));
    }
    let mut notes = Vec::new();
    for (name, inst) in cases {
        let inst = inst.map_err(|e| e.to_string())?;
        let r = verify(&inst, &opts).map_err(|e| e.to_string())?;
        let ord = r.ordp.map_or(u64::MAX, u64::from);
        if r.tier != Tier::None || r.strong_violations.is_empty() {
            return Err(format!("{name}: hypothesis check passed"));
        }
        if ord >= r.required_ordp {
            return Err(format!("{name}: ord_p {ord} meets h * bound = {}", r.required_ordp));
        }
        notes.push(format!("{name}: ord_p {ord} < {}", r.required_ordp));
    }
    Ok(notes.join("; "))
}

fn main() {
    let t = Instant::now();
    let suite = run_suite(SUITE_SEED, SUITE_SIZE, &CountOptions::default());
    let suite_time = t.elapsed();
    let results: Vec<(&str, Outcome)> = vec![
        ("AC1 product-box counts", product_boxes()),
        ("AC2 power-box table", power_boxes()),
        ("AC3 Teichmuller baseline valuation", teichmuller_baseline()),
        ("AC4 Teichmuller residues", teichmuller_residues()),
        ("AC5 structure polynomial identities", structure_identities()),
        ("AC6 reduced-system oracle", suite_oracle(&suite, suite_time)),
        ("AC7 divisibility bounds", suite_bounds(&suite)),
        ("AC8 digit round trip and Witt arithmetic", digit_round_trips()),
        ("AC9 counterexamples", counterexamples()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
