//! Counting solutions of congruence systems over a box, two ways, and
//! checking the divisibility bounds against the result.

mod bounds;
mod brute;
mod hypothesis;
mod reduce;
mod verify;

pub use bounds::{ax_katz, bound_main, ceil_star};
pub use brute::{count_bruteforce, count_fq_system};
pub use hypothesis::{check_strong_hypothesis, StrongReport, StrongViolation};
pub use reduce::{reduce_to_fq, reduce_via, FqSystem, Route, SystemPoly};
pub use verify::{ord_p, verify, CountReport, SystemDegree, Tier, Timings, Verdict};

use crate::boxes::BoxSpec;
use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::mpoly::{Degree, FqPoly, Poly};
use crate::witt::DEFAULT_TERM_BUDGET;
use crate::zq::{ZqCtx, ZqElem};

/// Default cap on enumerated points.
pub const DEFAULT_POINT_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// Largest q^n that may be enumerated or interpolated.
    pub cap: u64,
    /// Term budget for structure polynomials.
    pub budget: usize,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            cap: DEFAULT_POINT_CAP,
            budget: DEFAULT_TERM_BUDGET,
            workers: 0,
        }
    }
}

/// One congruence `f(X) = 0 mod p^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    /// Coefficients reduced mod p^m, stored in the instance ring.
    pub f: Poly<ZqElem>,
    pub m: u32,
    pub d: u64,
    pub d_declared: bool,
    /// `f` is nonzero as given but vanishes mod p^m.
    pub vanishes: bool,
}

impl Constraint {
    pub fn degree(&self) -> Degree {
        self.f.total_degree()
    }

    /// `deg f`, or 1 when `f` is constant or vanishes.
    pub fn degree_at_least_one(&self) -> u64 {
        self.degree().finite().unwrap_or(0).max(1)
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    boxspec: BoxSpec,
    system: Vec<Constraint>,
}

impl Instance {
    /// `polys` lists `(f_k, m_k, declared d_k)`; `f_k` lives in the box's ring.
    pub fn new(boxspec: BoxSpec, polys: Vec<(Poly<ZqElem>, u32, Option<u64>)>) -> Result<Self> {
        let ring = boxspec.ring().clone();
        let n = boxspec.n();
        let mut system = Vec::with_capacity(polys.len());
        for (k, (f, m, d)) in polys.into_iter().enumerate() {
            let label = k + 1;
            if f.arity() != n {
                return Err(Error::InvalidInstance(format!(
                    "polynomial {label} has arity {}, box has {n}",
                    f.arity()
                )));
            }
            if m == 0 || m > ring.m() {
                return Err(Error::InvalidInstance(format!(
                    "polynomial {label}: modulus exponent {m} outside [1, {}]",
                    ring.m()
                )));
            }
            if f.is_zero() {
                return Err(Error::InvalidInstance(format!("polynomial {label} is zero")));
            }
            if d == Some(0) {
                return Err(Error::InvalidInstance(format!("polynomial {label}: d must be >= 1")));
            }
            let reduced = f.map_coeffs(&ring, |c| ring.truncate(c, m));
            let vanishes = reduced.is_zero();
            let d_value = d.unwrap_or_else(|| reduced.total_degree().finite().unwrap_or(0).max(1));
            system.push(Constraint {
                f: reduced,
                m,
                d: d_value,
                d_declared: d.is_some(),
                vanishes,
            });
        }
        Ok(Instance { boxspec, system })
    }

    pub fn boxspec(&self) -> &BoxSpec {
        &self.boxspec
    }

    pub fn ring(&self) -> &ZqCtx {
        self.boxspec.ring()
    }

    pub fn field(&self) -> &FieldCtx {
        self.ring().field()
    }

    pub fn n(&self) -> usize {
        self.boxspec.n()
    }

    pub fn system(&self) -> &[Constraint] {
        &self.system
    }

    /// `max m_k`, or 1 for an empty system.
    pub fn max_m(&self) -> u32 {
        self.system.iter().map(|c| c.m).max().unwrap_or(1)
    }
}

/// `f = sum_i p^i tau(levels[i])` modulo p^m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeichExpansion {
    pub levels: Vec<FqPoly>,
}

impl TeichExpansion {
    /// `(level, coefficient, exponents)` for every term.
    pub fn terms(&self) -> Vec<(usize, crate::ff::FqElem, Vec<u32>)> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(i, f)| f.terms().map(move |(mono, c)| (i, *c, mono.exps().to_vec())))
            .collect()
    }

    /// Reassembles `sum_i p^i tau(levels[i])` in `ring`.
    pub fn reassemble(&self, ring: &ZqCtx) -> Result<Poly<ZqElem>> {
        let n = self.levels.first().map_or(0, |f| f.arity());
        let mut acc = Poly::zero(n);
        let mut pi = 1u64;
        for f in &self.levels {
            let lifted = f.map_coeffs(ring, |c| ring.scale(pi, &ring.teichmuller_lift(c)));
            acc = acc.add(&lifted, ring)?;
            pi = pi.saturating_mul(ring.p());
        }
        Ok(acc)
    }
}

/// Coefficientwise Teichmuller digits of `f`, keeping levels `0..m`.
pub fn teich_expand(ring: &ZqCtx, f: &Poly<ZqElem>, m: u32) -> Result<TeichExpansion> {
    if f.is_zero() {
        return Err(Error::InvalidInstance("cannot expand the zero polynomial".into()));
    }
    if m == 0 || m > ring.m() {
        return Err(Error::PrecisionOutOfRange { m, max: ring.m() });
    }
    let field = ring.field();
    let mut per_level: Vec<Vec<(Vec<u32>, crate::ff::FqElem)>> = vec![Vec::new(); m as usize];
    for (mono, c) in f.terms() {
        let digits = ring.digits(c)?;
        for (i, a) in digits.0.iter().take(m as usize).enumerate() {
            if !a.is_zero() {
                per_level[i].push((mono.exps().to_vec(), *a));
            }
        }
    }
    let levels = per_level
        .into_iter()
        .map(|ts| Poly::from_terms(field, f.arity(), ts))
        .collect();
    Ok(TeichExpansion { levels })
}

/// Checks that an element of `ring` is zero modulo p^k, via its coefficients.
pub(crate) fn vanishes_mod(ring: &ZqCtx, v: &ZqElem, k: u32) -> bool {
    ring.divisible_by_pk(v, k)
}
