use std::time::Instant;

use serde::Serialize;

use super::reduce::{expansions, reduce_with_algebra};
use super::{
    ax_katz, bound_main, check_strong_hypothesis, count_bruteforce, count_fq_system, CountOptions, Instance, Route,
    StrongViolation,
};
use crate::boxes::{check_box_hypothesis, interpolate_box, BoxAlgebra, BoxHypothesis, DegreeViolation};
use crate::error::{Error, Result};
use crate::mpoly::FqPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// The term-by-term degree condition holds with the declared `d_k`.
    Strong,
    /// The box passes the weak degree check; the bound uses `deg f_k`.
    Weak,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "status")]
pub enum Verdict {
    /// A hypothesis holds and `ord_p |V| >= h * bound`.
    Holds,
    /// `|V| = 0`, divisible by everything.
    Vacuous,
    /// No hypothesis holds; the inequality is reported but not enforced.
    Informational { satisfied: bool },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Vacuous => "vacuous (ord = inf)",
            Verdict::Informational { satisfied: true } => "informational (satisfied)",
            Verdict::Informational { satisfied: false } => "informational (violated)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemDegree {
    pub k: usize,
    pub level: usize,
    /// `None` for the zero polynomial.
    pub degree: Option<u64>,
    pub allowed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub count_ms: f64,
    pub reduce_ms: Option<f64>,
    pub fq_count_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub box_kind: &'static str,
    pub p: u64,
    pub h: usize,
    pub n: usize,
    /// `max m_k`.
    pub m: u32,
    pub s: usize,
    pub count: u64,
    /// `None` when the count is 0.
    pub ordp: Option<u32>,
    pub tier: Tier,
    /// The bound for the tier that applies (with `d_k` when no tier holds).
    pub bound: u64,
    /// `h * bound`, the required `ord_p`.
    pub required_ordp: u64,
    pub verdict: Verdict,
    pub strong_violations: Vec<StrongViolation>,
    pub weak_violations: Vec<DegreeViolation>,
    /// Whether every `g_ij` depends on `x_j` alone; `None` for Teichmuller boxes.
    pub split: Option<bool>,
    /// Constraints (from 1) that vanish identically mod `p^(m_k)`.
    pub vanishing: Vec<usize>,
    pub route: Option<Route>,
    pub fq_count: Option<u64>,
    pub system_degrees: Vec<SystemDegree>,
    /// Ax-Katz bound on `ord_q` for the reduced system over F_q.
    pub fq_ax_katz: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

pub fn ord_p(p: u64, mut v: u64) -> Option<u32> {
    if v == 0 {
        return None;
    }
    let mut k = 0;
    while v % p == 0 {
        v /= p;
        k += 1;
    }
    Some(k)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Counts `V` by brute force, cross-checks it against the reduced system over
/// F_q when that is within budget, classifies the hypotheses and checks the
/// divisibility bound. Disagreement between the counters, or a bound that
/// fails under a hypothesis that holds, is an error.
pub fn verify(inst: &Instance, opts: &CountOptions) -> Result<CountReport> {
    let ring = inst.ring();
    let (p, h, n) = (ring.p(), ring.h(), inst.n());
    let big_m = inst.max_m();

    let t = Instant::now();
    let count = count_bruteforce(inst, opts)?;
    let count_ms = ms(t);

    let alg = if inst.boxspec().is_teichmuller() {
        BoxAlgebra {
            n,
            m: ring.m(),
            g: vec![vec![FqPoly::zero(n); n]; ring.m() as usize - 1],
        }
    } else {
        interpolate_box(inst.boxspec())?
    };
    // only levels below max m_k reach the constraints
    let relevant = BoxAlgebra {
        n,
        m: big_m,
        g: alg.g.iter().take(big_m as usize - 1).cloned().collect(),
    };
    let exps = expansions(inst)?;
    let strong = check_strong_hypothesis(inst, &relevant, &exps);
    let weak = check_box_hypothesis(&relevant, ring, BoxHypothesis::Weak);
    let split = (!inst.boxspec().is_teichmuller())
        .then(|| check_box_hypothesis(&relevant, ring, BoxHypothesis::Split).not_split.is_empty());
    let tier = if strong.holds() {
        Tier::Strong
    } else if weak.holds() {
        Tier::Weak
    } else {
        Tier::None
    };

    let params: Vec<(u64, u32)> = inst
        .system()
        .iter()
        .map(|c| match tier {
            Tier::Weak => (c.degree_at_least_one(), c.m),
            _ => (c.d, c.m),
        })
        .collect();
    let bound = bound_main(p, n, &params);
    let required = h as u64 * bound;
    let ordp = ord_p(p, count);
    let verdict = match (ordp, tier) {
        (None, _) => Verdict::Vacuous,
        (Some(o), Tier::None) => Verdict::Informational {
            satisfied: o as u64 >= required,
        },
        (Some(o), _) => {
            if (o as u64) < required {
                return Err(Error::Refutation(format!(
                    "{tier:?} hypothesis holds but ord_p |V| = {o} < {required} (|V| = {count})"
                )));
            }
            Verdict::Holds
        }
    };

    let t = Instant::now();
    let reduced = match reduce_with_algebra(inst, Some(&alg), opts) {
        Ok(sys) => Some(sys),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let reduce_ms = reduced.as_ref().map(|_| ms(t));
    let mut fq_count = None;
    let mut fq_count_ms = None;
    let mut route = None;
    let mut system_degrees = Vec::new();
    let mut fq_ax_katz = None;
    if let Some(sys) = &reduced {
        route = Some(sys.route);
        let t = Instant::now();
        let polys = sys.polys();
        let c = count_fq_system(inst.field(), &polys, n, opts)?;
        fq_count_ms = Some(ms(t));
        if c != count {
            return Err(Error::OracleMismatch { brute: count, reduced: c });
        }
        fq_count = Some(c);

        for sp in &sys.polys {
            let d = params[sp.k - 1].0;
            system_degrees.push(SystemDegree {
                k: sp.k,
                level: sp.level,
                degree: sp.poly.total_degree().finite(),
                allowed: d * p.pow(sp.level as u32),
            });
        }
        if tier != Tier::None {
            if let Some(bad) = system_degrees.iter().find(|s| s.degree.is_some_and(|d| d > s.allowed)) {
                return Err(Error::Internal(format!(
                    "reduced polynomial for constraint {} at level {} has degree {} > {}",
                    bad.k,
                    bad.level,
                    bad.degree.unwrap_or(0),
                    bad.allowed
                )));
            }
        }

        // Ax-Katz for the reduced system; a nonzero constant means no zeros
        let degrees: Vec<u64> = system_degrees.iter().filter_map(|s| s.degree).collect();
        if !degrees.contains(&0) {
            let ak = ax_katz(n, &degrees);
            if let Some(o) = ordp {
                if (o as u64) < h as u64 * ak {
                    return Err(Error::Refutation(format!(
                        "reduced system: ord_p |V| = {o} < h * {ak} (Ax-Katz)"
                    )));
                }
            }
            fq_ax_katz = Some(ak);
        }
    }

    Ok(CountReport {
        box_kind: inst.boxspec().kind_name(),
        p,
        h,
        n,
        m: big_m,
        s: inst.system().len(),
        count,
        ordp,
        tier,
        bound,
        required_ordp: required,
        verdict,
        strong_violations: strong.violations,
        weak_violations: weak.violations,
        split,
        vanishing: inst
            .system()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.vanishes)
            .map(|(k, _)| k + 1)
            .collect(),
        route,
        fq_count,
        system_degrees,
        fq_ax_katz,
        timings: Some(Timings {
            count_ms,
            reduce_ms,
            fq_count_ms,
        }),
    })
}
