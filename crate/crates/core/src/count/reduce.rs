use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{teich_expand, CountOptions, Instance, TeichExpansion};
use crate::boxes::{eval_teich, interpolate_box, BoxAlgebra};
use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FqElem};
use crate::mpoly::{function_reduce, interpolate, num_points, point_from_index, FqPoly};
use crate::witt::witt_sum_polys;
use crate::zq::WittDigitArith;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// `s_t^(r)` evaluated on the term array of a Teichmuller-box instance.
    Symbolic,
    /// Witt coordinates of `f_k(Y(X))` tabulated over F_q^n and interpolated.
    Pointwise,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemPoly {
    /// Constraint index, from 1.
    pub k: usize,
    /// Witt coordinate index `t` in `[0, m_k - 1]`.
    pub level: usize,
    pub poly: FqPoly,
}

/// Polynomials over F_q whose common zeros correspond one to one with `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqSystem {
    pub n: usize,
    pub polys: Vec<SystemPoly>,
    pub route: Route,
}

impl FqSystem {
    pub fn polys(&self) -> Vec<FqPoly> {
        self.polys.iter().map(|s| s.poly.clone()).collect()
    }
}

/// Reduces the congruence system to a system over F_q. Teichmuller boxes go
/// through the structure polynomials symbolically (falling back to the
/// pointwise route if they exceed the term budget); other boxes go pointwise.
pub fn reduce_to_fq(inst: &Instance, opts: &CountOptions) -> Result<FqSystem> {
    reduce_with_algebra(inst, None, opts)
}

/// Reduces along a fixed route. The symbolic route needs a Teichmuller box.
pub fn reduce_via(inst: &Instance, route: Route, opts: &CountOptions) -> Result<FqSystem> {
    let expansions = expansions(inst)?;
    let polys = match route {
        Route::Symbolic => {
            if !inst.boxspec().is_teichmuller() {
                return Err(Error::InvalidBox(format!(
                    "the symbolic route needs a Teichmuller box, not {}",
                    inst.boxspec().kind_name()
                )));
            }
            symbolic(inst, &expansions, opts)?
        }
        Route::Pointwise => {
            check_cap(inst, opts)?;
            pointwise(inst, &interpolate_box(inst.boxspec())?, &expansions)?
        }
    };
    Ok(FqSystem {
        n: inst.n(),
        polys,
        route,
    })
}

pub(crate) fn reduce_with_algebra(inst: &Instance, alg: Option<&BoxAlgebra>, opts: &CountOptions) -> Result<FqSystem> {
    let expansions = expansions(inst)?;
    if inst.boxspec().is_teichmuller() {
        match symbolic(inst, &expansions, opts) {
            Ok(polys) => {
                return Ok(FqSystem {
                    n: inst.n(),
                    polys,
                    route: Route::Symbolic,
                })
            }
            Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    check_cap(inst, opts)?;
    let owned;
    let alg = match alg {
        Some(a) => a,
        None => {
            owned = interpolate_box(inst.boxspec())?;
            &owned
        }
    };
    Ok(FqSystem {
        n: inst.n(),
        polys: pointwise(inst, alg, &expansions)?,
        route: Route::Pointwise,
    })
}

fn check_cap(inst: &Instance, opts: &CountOptions) -> Result<()> {
    let total = num_points(inst.field(), inst.n())?;
    if total > opts.cap {
        return Err(Error::BudgetExceeded {
            what: "points to interpolate",
            size: total,
            limit: opts.cap,
        });
    }
    Ok(())
}

/// Teichmuller expansions of every constraint; vanishing ones expand to zero levels.
pub(crate) fn expansions(inst: &Instance) -> Result<Vec<TeichExpansion>> {
    inst.system()
        .iter()
        .map(|c| {
            if c.vanishes {
                Ok(TeichExpansion {
                    levels: vec![FqPoly::zero(inst.n()); c.m as usize],
                })
            } else {
                teich_expand(inst.ring(), &c.f, c.m)
            }
        })
        .collect()
}

fn symbolic(inst: &Instance, expansions: &[TeichExpansion], opts: &CountOptions) -> Result<Vec<SystemPoly>> {
    let field = inst.field();
    let (p, h, n) = (inst.ring().p(), field.h(), inst.n());
    let mut out = Vec::new();
    for (k, (c, exp)) in inst.system().iter().zip(expansions).enumerate() {
        // distinct monomials index the summands
        let mut monos: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for (_, _, e) in exp.terms() {
            let next = monos.len();
            monos.entry(e).or_insert(next);
        }
        let r = monos.len();
        if r == 0 {
            out.extend((0..c.m as usize).map(|t| SystemPoly { k: k + 1, level: t, poly: FqPoly::zero(n) }));
            continue;
        }
        let mut coeff = vec![vec![FqElem::ZERO; r]; c.m as usize];
        let mut exps = vec![Vec::new(); r];
        for (i, a, e) in exp.terms() {
            let j = monos[&e];
            coeff[i][j] = a;
            exps[j] = e;
        }
        let set = witt_sum_polys(p, r, c.m as usize - 1, opts.budget)?;
        let big_p = BigInt::from(p);
        for (t, s) in set.s.iter().enumerate() {
            let mut terms = Vec::with_capacity(s.num_terms());
            'term: for (mono, z) in s.terms() {
                let z = z.mod_floor(&big_p).to_u64().expect("residue");
                if z == 0 {
                    continue;
                }
                let mut a = field.from_u64(z);
                let mut e_out = vec![0u32; n];
                for (idx, &e) in mono.exps().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let (i, j) = (idx / r, idx % r);
                    let aij = coeff[i][j];
                    if aij.is_zero() {
                        continue 'term;
                    }
                    // (a X^u)^(p^i) agrees with (a X^u)^(p^(i mod h)) on F_q
                    let twist = p.pow((i % h) as u32) as u32;
                    a = field.mul(&a, &field.pow(&field.frobenius(&aij, i as i64), e as u64));
                    for (slot, &u) in e_out.iter_mut().zip(&exps[j]) {
                        *slot += u * twist * e;
                    }
                }
                terms.push((e_out, a));
            }
            let g = FqPoly::from_terms(field, n, terms);
            out.push(SystemPoly {
                k: k + 1,
                level: t,
                poly: function_reduce(field, field.q(), &g),
            });
        }
    }
    Ok(out)
}

/// Witt coordinate vectors over F_q, truncated to a common length.
struct WittVectors<'a> {
    field: &'a FieldCtx,
    arith: &'a WittDigitArith,
}

impl WittVectors<'_> {
    fn teich(&self, v: FqElem, len: usize) -> Vec<FqElem> {
        let mut out = vec![FqElem::ZERO; len];
        out[0] = v;
        out
    }

    /// Multiplication by `p^i`: Verschiebung after Frobenius, `i` times.
    fn shift(&self, a: &[FqElem], i: usize) -> Vec<FqElem> {
        (0..a.len())
            .map(|t| if t < i { FqElem::ZERO } else { self.field.frobenius(&a[t - i], i as i64) })
            .collect()
    }

    fn add(&self, a: &[FqElem], b: &[FqElem]) -> Result<Vec<FqElem>> {
        self.arith.add_coords(a, b)
    }

    fn mul(&self, a: &[FqElem], b: &[FqElem]) -> Result<Vec<FqElem>> {
        self.arith.mul_coords(a, b)
    }
}

fn pointwise(inst: &Instance, alg: &BoxAlgebra, expansions: &[TeichExpansion]) -> Result<Vec<SystemPoly>> {
    let ring = inst.ring();
    let field = ring.field();
    let n = inst.n();
    let big_m = inst.max_m() as usize;
    let w = WittVectors {
        field,
        arith: ring.witt_arith()?,
    };
    let total = num_points(field, n)? as usize;
    let terms: Vec<_> = expansions.iter().map(|e| e.terms()).collect();
    let max_exp: Vec<u32> = (0..n)
        .map(|l| terms.iter().flatten().map(|(_, _, e)| e[l]).max().unwrap_or(0))
        .collect();
    let one = field.one();
    // tables[k][t][point]
    let mut tables: Vec<Vec<Vec<FqElem>>> = inst
        .system()
        .iter()
        .map(|c| vec![vec![FqElem::ZERO; total]; c.m as usize])
        .collect();
    for idx in 0..total {
        let x = point_from_index(field, n, idx as u64);
        // powers[l][e] = Y_l^e
        let mut powers: Vec<Vec<Vec<FqElem>>> = Vec::with_capacity(n);
        for l in 0..n {
            // the box point itself, then its Witt coordinates
            let mut y = ring.teichmuller_lift(&x[l]);
            let mut pi = 1u64;
            for row in alg.g.iter().take(big_m - 1) {
                pi *= ring.p();
                y = ring.add(&y, &ring.scale(pi, &eval_teich(ring, &row[l], &x)));
            }
            let digits = ring.digits(&y)?;
            let y = w.arith.to_coords(&digits.0[..big_m]);
            let mut pw = vec![w.teich(one, big_m), y.clone()];
            for _ in 2..=max_exp[l] {
                let next = w.mul(pw.last().unwrap(), &y)?;
                pw.push(next);
            }
            powers.push(pw);
        }
        for (k, c) in inst.system().iter().enumerate() {
            let len = c.m as usize;
            let mut acc = vec![FqElem::ZERO; len];
            for (i, a, e) in &terms[k] {
                let mut prod: Option<Vec<FqElem>> = None;
                for (l, &el) in e.iter().enumerate() {
                    if el == 0 {
                        continue;
                    }
                    let f = &powers[l][el as usize][..len];
                    prod = Some(match prod {
                        None => f.to_vec(),
                        Some(pr) => w.mul(&pr, f)?,
                    });
                }
                let mut prod = prod.unwrap_or_else(|| w.teich(one, len));
                if *a != one {
                    prod = w.mul(&w.teich(*a, len), &prod)?;
                }
                acc = w.add(&acc, &w.shift(&prod, *i))?;
            }
            for (t, v) in acc.into_iter().enumerate() {
                tables[k][t][idx] = v;
            }
        }
    }
    let mut out = Vec::new();
    for (k, levels) in tables.into_iter().enumerate() {
        for (t, table) in levels.into_iter().enumerate() {
            out.push(SystemPoly {
                k: k + 1,
                level: t,
                poly: interpolate(field, n, &table)?,
            });
        }
    }
    Ok(out)
}
