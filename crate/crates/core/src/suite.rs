//! Fixed instances with known counts, and a seeded generator of random
//! instances for cross-checking the counters and the bounds.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boxes::BoxSpec;
use crate::count::{ax_katz, bound_main, verify, CountOptions, Instance, Tier, Verdict};
use crate::error::{ErrorClass, Result};
use crate::ff::FieldCtx;
use crate::instance::instance_to_json;
use crate::mpoly::{num_points, point_from_index, FqPoly, Poly};
use crate::zq::{ZqCtx, ZqElem};

/// `x_1 + ... + x_n`.
pub fn linear_form(ring: &ZqCtx, n: usize) -> Poly<ZqElem> {
    let terms = (0..n).map(|j| {
        let mut e = vec![0; n];
        e[j] = 1;
        (e, ring.one())
    });
    Poly::from_terms(ring, n, terms)
}

/// Over Z/4 with n = 4: `x_1 + ... + x_4 = 0 mod 4` on the box whose first
/// coordinate carries `x_1 x_2 x_3 x_4 + a` in its second digit.
pub fn product_box_instance(a: u64) -> Result<Instance> {
    let ring = ZqCtx::new(FieldCtx::new(2, 1)?, 2)?;
    let field = ring.field();
    let n = 4;
    let mut g1 = vec![FqPoly::zero(n); n];
    g1[0] = Poly::from_terms(field, n, [(vec![1, 1, 1, 1], field.one()), (vec![0; 4], field.from_u64(a))]);
    let boxspec = BoxSpec::poly_defined(&ring, n, vec![g1])?;
    Instance::new(boxspec, vec![(linear_form(&ring, n), 2, None)])
}

/// Over Z_9 / 9 with n = 5: `x_1 + ... + x_5 = 0 mod 9` on the split box
/// `{X + X^u p}`.
pub fn power_box_instance(u: &[u32]) -> Result<Instance> {
    let ring = ZqCtx::new(FieldCtx::new(3, 2)?, 2)?;
    let field = ring.field();
    let digit_polys = u
        .iter()
        .map(|&d| vec![Poly::from_terms(field, 1, [(vec![d], field.one())])])
        .collect();
    let boxspec = BoxSpec::split(&ring, digit_polys)?;
    Instance::new(boxspec, vec![(linear_form(&ring, u.len()), 2, None)])
}

/// `x_1 + ... + x_n = 0 mod p^m` on the Teichmuller box.
pub fn teichmuller_linear_instance(p: u64, h: usize, n: usize, m: u32) -> Result<Instance> {
    let ring = ZqCtx::new(FieldCtx::new(p, h)?, m)?;
    let f = linear_form(&ring, n);
    Instance::new(BoxSpec::teichmuller(&ring, n), vec![(f, m, None)])
}

const FIELDS: [(u64, usize); 5] = [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)];

fn random_elem(ring: &ZqCtx, rng: &mut ChaCha8Rng) -> ZqElem {
    let size = ring.size().expect("suite rings are small");
    ring.from_index(rng.gen_range(0..size))
}

fn random_exps(rng: &mut ChaCha8Rng, arity: usize, max_total: u32, max_each: u32) -> Vec<u32> {
    let mut e = vec![0u32; arity];
    let total = rng.gen_range(0..=max_total);
    for _ in 0..total {
        let j = rng.gen_range(0..arity);
        if e[j] < max_each {
            e[j] += 1;
        }
    }
    e
}

fn random_fq_poly(field: &FieldCtx, rng: &mut ChaCha8Rng, arity: usize, terms: usize, max_total: u32) -> FqPoly {
    let max_each = (field.q() - 1) as u32;
    let ts: Vec<_> = (0..terms)
        .map(|_| {
            let c = field.from_index(rng.gen_range(1..field.q()));
            (random_exps(rng, arity, max_total, max_each), c)
        })
        .collect();
    Poly::from_terms(field, arity, ts)
}

/// Largest degree allowed for level `i` by the weak box condition, and at most `q - 1`.
fn tame_degree(field: &FieldCtx, i: usize) -> u32 {
    let cap = (field.p() as u64).pow((field.h() * (i / field.h())) as u32);
    cap.min(field.q() - 1) as u32
}

fn random_box(ring: &ZqCtx, n: usize, rng: &mut ChaCha8Rng) -> Result<BoxSpec> {
    let field = ring.field();
    let levels = ring.m() as usize - 1;
    let tame = rng.gen_bool(0.5);
    let degree_for = |i: usize, rng: &mut ChaCha8Rng| {
        if tame {
            tame_degree(field, i)
        } else {
            rng.gen_range(1..=(field.q() as u32 - 1).max(1) + 1)
        }
    };
    match rng.gen_range(0..100) {
        0..=29 => Ok(BoxSpec::teichmuller(ring, n)),
        30..=54 => {
            let mut dp = Vec::with_capacity(n);
            for _ in 0..n {
                let mut row = Vec::with_capacity(levels);
                for i in 1..=levels {
                    let terms = rng.gen_range(0..=2);
                    let deg = degree_for(i, rng);
                    row.push(random_fq_poly(field, rng, 1, terms, deg));
                }
                dp.push(row);
            }
            BoxSpec::split(ring, dp)
        }
        55..=79 => {
            let mut g = Vec::with_capacity(levels);
            for i in 1..=levels {
                let mut row = Vec::with_capacity(n);
                for _ in 0..n {
                    let terms = rng.gen_range(0..=2);
                    let deg = degree_for(i, rng);
                    row.push(random_fq_poly(field, rng, n, terms, deg));
                }
                g.push(row);
            }
            BoxSpec::poly_defined(ring, n, g)
        }
        _ => {
            let p = ring.p();
            let total = num_points(field, n)?;
            let mut points: Vec<Vec<ZqElem>> = (0..total)
                .map(|idx| {
                    point_from_index(field, n, idx)
                        .iter()
                        .map(|x| {
                            let high = random_elem(ring, rng);
                            ring.add(&ring.lift_verbatim(x), &ring.scale(p, &high))
                        })
                        .collect()
                })
                .collect();
            points.shuffle(rng);
            BoxSpec::enumerated(ring, n, points)
        }
    }
}

fn random_constraint(ring: &ZqCtx, n: usize, m: u32, rng: &mut ChaCha8Rng) -> (Poly<ZqElem>, u32, Option<u64>) {
    loop {
        let terms: Vec<_> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let mut c = random_elem(ring, rng);
                if rng.gen_bool(0.3) {
                    c = ring.scale(ring.p(), &c);
                }
                (random_exps(rng, n, 3, 2), c)
            })
            .collect();
        let f = Poly::from_terms(ring, n, terms);
        if f.is_zero() {
            continue;
        }
        let deg = f.total_degree().finite().unwrap_or(0).max(1);
        let d = rng.gen_bool(0.2).then(|| rng.gen_range(1..=deg));
        return (f, m, d);
    }
}

/// A random instance: q in {2, 3, 4, 5, 9}, n <= 4 (n <= 3 for q = 9),
/// m <= 3, at most two constraints, any box kind.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    random_instance_upto(rng, 9)
}

/// As [`random_instance`], with `q <= max_q` (at least q = 2).
pub fn random_instance_upto(rng: &mut ChaCha8Rng, max_q: u64) -> Result<Instance> {
    let fields: Vec<(u64, usize)> = FIELDS
        .iter()
        .copied()
        .filter(|&(p, h)| p.pow(h as u32) <= max_q.max(2))
        .collect();
    let (p, h) = fields[rng.gen_range(0..fields.len())];
    let field = FieldCtx::new(p, h)?;
    let n = rng.gen_range(1..=if field.q() == 9 { 3 } else { 4 });
    let big_m = if rng.gen_bool(0.25) { 1 } else { rng.gen_range(1..=3) };
    let ring = ZqCtx::new(field, big_m)?;
    let s = if rng.gen_bool(0.05) { 0 } else { rng.gen_range(1..=2) };
    let boxspec = random_box(&ring, n, rng)?;
    let polys = (0..s)
        .map(|k| {
            let m = if k == 0 { big_m } else { rng.gen_range(1..=big_m) };
            random_constraint(&ring, n, m, rng)
        })
        .collect();
    Instance::new(boxspec, polys)
}

/// The generator for instance `index` of the suite seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteFailure {
    pub index: u64,
    pub class: ErrorClass,
    pub error: String,
    /// Instance file reproducing the failure.
    pub instance: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub max_q: u64,
    pub instances: u64,
    /// Instances whose reduced system was counted and matched brute force.
    pub cross_checked: u64,
    pub strong: u64,
    pub weak: u64,
    pub no_hypothesis: u64,
    /// Instances under a hypothesis with `|V| > 0`, where the bound was enforced.
    pub bound_enforced: u64,
    pub vacuous: u64,
    /// Instances with every `m_k = 1` where the bound was compared to Ax-Katz.
    pub ax_katz_cases: u64,
    pub digit_round_trips: u64,
    pub failures: Vec<SuiteFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_instance(
    inst: &Instance,
    opts: &CountOptions,
    rng: &mut ChaCha8Rng,
    report: &mut SuiteReport,
) -> Result<Option<(ErrorClass, String)>> {
    let r = verify(inst, opts)?;
    if r.fq_count.is_some() {
        report.cross_checked += 1;
    }
    match r.tier {
        Tier::Strong => report.strong += 1,
        Tier::Weak => report.weak += 1,
        Tier::None => report.no_hypothesis += 1,
    }
    match r.verdict {
        Verdict::Holds => report.bound_enforced += 1,
        Verdict::Vacuous => report.vacuous += 1,
        Verdict::Informational { .. } => {}
    }
    if !inst.system().is_empty() && inst.system().iter().all(|c| c.m == 1) {
        report.ax_katz_cases += 1;
        let degrees: Vec<u64> = inst.system().iter().map(|c| c.degree_at_least_one()).collect();
        let params: Vec<(u64, u32)> = degrees.iter().map(|&d| (d, 1)).collect();
        let ak = ax_katz(inst.n(), &degrees);
        if bound_main(inst.ring().p(), inst.n(), &params) != ak {
            return Ok(Some((ErrorClass::Invariant, format!("bound with all m_k = 1 differs from Ax-Katz {ak}"))));
        }
        if let Some(o) = r.ordp {
            if (o as u64) < inst.ring().h() as u64 * ak {
                return Ok(Some((ErrorClass::Refutation, format!("Ax-Katz fails: ord_p {o} < h * {ak}"))));
            }
        }
    }
    // digit round trip and Witt addition in the instance ring
    let ring = inst.ring();
    for _ in 0..8 {
        let (a, b) = (random_elem(ring, rng), random_elem(ring, rng));
        let (da, db) = (ring.digits(&a)?, ring.digits(&b)?);
        if ring.from_digits(&da)? != a {
            return Ok(Some((ErrorClass::Invariant, "digits do not round-trip".into())));
        }
        if ring.from_digits(&ring.witt_add_digits(&da, &db)?)? != ring.add(&a, &b) {
            return Ok(Some((ErrorClass::Invariant, "Witt addition disagrees with ring addition".into())));
        }
        report.digit_round_trips += 1;
    }
    Ok(None)
}

/// Generates `count` instances from `seed` and verifies each one. Any error
/// (oracle mismatch, refutation, ...) is recorded with the instance file.
pub fn run_suite(seed: u64, count: u64, opts: &CountOptions) -> SuiteReport {
    run_suite_upto(seed, count, 9, opts)
}

pub fn run_suite_upto(seed: u64, count: u64, max_q: u64, opts: &CountOptions) -> SuiteReport {
    let mut report = SuiteReport {
        seed,
        max_q,
        instances: count,
        ..SuiteReport::default()
    };
    for index in 0..count {
        let mut rng = instance_rng(seed, index);
        let inst = match random_instance_upto(&mut rng, max_q) {
            Ok(inst) => inst,
            Err(e) => {
                report.failures.push(SuiteFailure {
                    index,
                    class: e.class(),
                    error: format!("generation: {e}"),
                    instance: String::new(),
                });
                continue;
            }
        };
        let outcome = check_instance(&inst, opts, &mut rng, &mut report);
        let (class, error) = match outcome {
            Ok(None) => continue,
            Ok(Some(failure)) => failure,
            Err(e) => (e.class(), e.to_string()),
        };
        report.failures.push(SuiteFailure {
            index,
            class,
            error,
            instance: instance_to_json(&inst),
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::count_bruteforce;

    #[test]
    fn fixtures_have_the_expected_shape() {
        let inst = product_box_instance(1).unwrap();
        assert_eq!((inst.n(), inst.ring().p(), inst.max_m()), (4, 2, 2));
        let inst = power_box_instance(&[4, 7, 2, 5, 8]).unwrap();
        assert_eq!((inst.n(), inst.field().q()), (5, 9));
    }

    #[test]
    fn generator_is_deterministic() {
        for index in 0..20 {
            let a = random_instance(&mut instance_rng(7, index)).unwrap();
            let b = random_instance(&mut instance_rng(7, index)).unwrap();
            assert_eq!(instance_to_json(&a), instance_to_json(&b));
        }
    }

    #[test]
    fn small_suite_passes() {
        let report = run_suite(1, 40, &CountOptions::default());
        assert!(report.passed(), "{:#?}", report.failures);
        assert_eq!(report, run_suite(1, 40, &CountOptions::default()));
    }

    #[test]
    fn product_box_counts() {
        let opts = CountOptions::default();
        assert_eq!(count_bruteforce(&product_box_instance(0).unwrap(), &opts).unwrap(), 1);
        assert_eq!(count_bruteforce(&product_box_instance(1).unwrap(), &opts).unwrap(), 7);
    }
}
