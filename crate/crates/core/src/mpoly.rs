//! Sparse multivariate polynomials over a [`Ring`].
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose order is graded
//! lexicographic, so iteration and text output are canonical.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FqElem};
use crate::ring::{Integers, Ring};

/// Exponent vector, one entry per variable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Total or weighted degree; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightedDegree {
    pub degree: Degree,
    pub homogeneous: bool,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly<E> {
    arity: usize,
    terms: BTreeMap<Monomial, E>,
}

pub type IntPoly = Poly<BigInt>;
pub type FqPoly = Poly<FqElem>;

impl<E: fmt::Debug> fmt::Debug for Poly<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().rev()).finish()
    }
}

impl<E: Clone + Eq + std::hash::Hash + fmt::Debug> Poly<E> {
    pub fn zero(arity: usize) -> Self {
        Poly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<R: Ring<Elem = E>>(ring: &R, c: E, arity: usize) -> Self {
        Self::from_terms(ring, arity, [(vec![0; arity], c)])
    }

    pub fn var<R: Ring<Elem = E>>(ring: &R, i: usize, arity: usize) -> Self {
        assert!(i < arity, "variable {i} out of range for arity {arity}");
        let mut e = vec![0; arity];
        e[i] = 1;
        Self::from_terms(ring, arity, [(e, ring.one())])
    }

    /// Collects terms, merging equal monomials and dropping zeros.
    ///
    /// Panics if an exponent vector has the wrong length.
    pub fn from_terms<R, I>(ring: &R, arity: usize, terms: I) -> Self
    where
        R: Ring<Elem = E>,
        I: IntoIterator<Item = (Vec<u32>, E)>,
    {
        let mut acc: HashMap<Monomial, E> = HashMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent vector length");
            accumulate(ring, &mut acc, Monomial(e), c);
        }
        Self::from_map(ring, arity, acc)
    }

    fn from_map<R: Ring<Elem = E>>(ring: &R, arity: usize, acc: HashMap<Monomial, E>) -> Self {
        let terms = acc.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect();
        Poly { arity, terms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &E)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&E> {
        self.terms.get(&Monomial(exps.to_vec()))
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .next_back()
            .map_or(Degree::NegInfinity, |m| Degree::Finite(m.degree()))
    }

    /// Highest exponent of variable `i` over all terms (0 for the zero polynomial).
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    /// Variables that occur with a positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.arity).filter(|&i| self.degree_in(i) > 0).collect()
    }

    pub fn weighted_degree(&self, weights: &[u64]) -> Result<WeightedDegree> {
        check_arity(self.arity, weights.len())?;
        let mut degs = self.terms.keys().map(|m| {
            m.0.iter()
                .zip(weights)
                .map(|(&e, &w)| e as u64 * w)
                .sum::<u64>()
        });
        let Some(first) = degs.next() else {
            return Ok(WeightedDegree {
                degree: Degree::NegInfinity,
                homogeneous: true,
            });
        };
        let (mut max, mut homogeneous) = (first, true);
        for d in degs {
            homogeneous &= d == first;
            max = max.max(d);
        }
        Ok(WeightedDegree {
            degree: Degree::Finite(max),
            homogeneous,
        })
    }

    pub fn add<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        check_arity(self.arity, other.arity)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            merge_into(ring, &mut terms, m, c.clone());
        }
        Ok(Poly {
            arity: self.arity,
            terms,
        })
    }

    pub fn neg<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        Poly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), ring.neg(c)))
                .collect(),
        }
    }

    pub fn sub<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        self.add(&other.neg(ring), ring)
    }

    pub fn scale<R: Ring<Elem = E>>(&self, c: &E, ring: &R) -> Self {
        let terms = self.terms.iter().map(|(m, a)| (m.0.clone(), ring.mul(a, c)));
        Self::from_terms(ring, self.arity, terms)
    }

    pub fn mul<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        check_arity(self.arity, other.arity)?;
        let mut acc: HashMap<Monomial, E> =
            HashMap::with_capacity((self.terms.len() * other.terms.len()).min(1 << 16));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(ring, &mut acc, ma.mul(mb), ring.mul(ca, cb));
            }
        }
        Ok(Self::from_map(ring, self.arity, acc))
    }

    pub fn pow<R: Ring<Elem = E>>(&self, mut e: u64, ring: &R) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(ring, ring.one(), self.arity);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ring).expect("same arity");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, ring).expect("same arity");
            }
        }
        acc
    }

    pub fn eval<R: Ring<Elem = E>>(&self, ring: &R, point: &[E]) -> Result<E> {
        if point.len() != self.arity {
            return Err(Error::LengthMismatch {
                expected: self.arity,
                found: point.len(),
            });
        }
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = ring.mul(&t, &ring.pow(x, e as u64));
                }
            }
            acc = ring.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Composition: variable `i` is replaced by `images[i]`.
    pub fn substitute<R: Ring<Elem = E>>(&self, ring: &R, images: &[Poly<E>]) -> Result<Self> {
        check_arity(self.arity, images.len())?;
        let target = images.first().map_or(0, |g| g.arity);
        if let Some(bad) = images.iter().find(|g| g.arity != target) {
            return Err(Error::ArityMismatch {
                expected: target,
                found: bad.arity,
            });
        }
        // powers of each image, built on demand
        let mut powers: Vec<Vec<Poly<E>>> = images
            .iter()
            .map(|g| vec![Self::constant(ring, ring.one(), target), g.clone()])
            .collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut t = Self::constant(ring, c.clone(), target);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i], ring)?;
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize], ring)?;
            }
            out = out.add(&t, ring)?;
        }
        Ok(out)
    }

    /// Rewrites every monomial's exponents; coefficients of colliding monomials are summed.
    pub fn map_exponents<R, F>(&self, ring: &R, arity: usize, f: F) -> Self
    where
        R: Ring<Elem = E>,
        F: Fn(&[u32]) -> Vec<u32>,
    {
        let terms = self.terms.iter().map(|(m, c)| (f(&m.0), c.clone()));
        Self::from_terms(ring, arity, terms)
    }

    /// Coefficientwise image in another ring.
    pub fn map_coeffs<R2, F>(&self, ring: &R2, f: F) -> Poly<R2::Elem>
    where
        R2: Ring,
        F: Fn(&E) -> R2::Elem,
    {
        Poly::from_terms(
            ring,
            self.arity,
            self.terms.iter().map(|(m, c)| (m.0.clone(), f(c))),
        )
    }

    /// One term per line, `coeff : e1 e2 ... en`, highest graded-lex term first.
    pub fn to_text<R: Ring<Elem = E>>(&self, ring: &R) -> String {
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let exps: Vec<String> = m.0.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("{} : {}\n", ring.fmt_elem(c), exps.join(" ")));
        }
        out
    }

    /// Readable form such as `x1 + y1 - x0*y0`, highest term first. Extension
    /// field coefficients print as polynomials in `t`.
    pub fn to_expr<R: Ring<Elem = E>>(&self, ring: &R, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let mut coeff = coeff_expr(&ring.fmt_elem(c));
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .zip(names)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, name)| if e == 1 { name.clone() } else { format!("{name}^{e}") })
                .collect();
            let mut parts = Vec::new();
            if coeff != "1" || vars.is_empty() {
                parts.push(coeff);
            }
            parts.extend(vars);
            let term = parts.join("*");
            match (out.is_empty(), negative) {
                (true, false) => out.push_str(&term),
                (true, true) => out.push_str(&format!("-{term}")),
                (false, false) => out.push_str(&format!(" + {term}")),
                (false, true) => out.push_str(&format!(" - {term}")),
            }
        }
        out
    }

    pub fn parse_text<R: Ring<Elem = E>>(ring: &R, arity: usize, text: &str) -> Result<Self> {
        Self::parse_lines(ring, arity, text.lines())
    }

    /// Like [`parse_text`](Self::parse_text), one term per item. Blank items and `#` comments are skipped.
    pub fn parse_lines<'a, R, I>(ring: &R, arity: usize, lines: I) -> Result<Self>
    where
        R: Ring<Elem = E>,
        I: IntoIterator<Item = &'a str>,
    {
        let mut terms = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (c, e) = line
                .rsplit_once(':')
                .ok_or_else(|| Error::parse(format!("term {line:?} lacks ':'")))?;
            let exps = e
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::parse(format!("bad exponent {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if exps.len() != arity {
                return Err(Error::parse(format!(
                    "term {line:?} has {} exponents, expected {arity}",
                    exps.len()
                )));
            }
            terms.push((exps, ring.parse_elem(c)?));
        }
        Ok(Self::from_terms(ring, arity, terms))
    }
}

fn check_arity(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ArityMismatch { expected, found })
    }
}

fn accumulate<R: Ring>(ring: &R, acc: &mut HashMap<Monomial, R::Elem>, m: Monomial, c: R::Elem) {
    match acc.get_mut(&m) {
        Some(slot) => *slot = ring.add(slot, &c),
        None => {
            acc.insert(m, c);
        }
    }
}

fn merge_into<R: Ring>(ring: &R, terms: &mut BTreeMap<Monomial, R::Elem>, m: &Monomial, c: R::Elem) {
    match terms.get_mut(m) {
        Some(slot) => {
            let s = ring.add(slot, &c);
            if ring.is_zero(&s) {
                terms.remove(m);
            } else {
                *slot = s;
            }
        }
        None => {
            if !ring.is_zero(&c) {
                terms.insert(m.clone(), c);
            }
        }
    }
}

/// Divides every coefficient by `c`; any remainder is an error, never rounded.
/// `[c]` becomes `c`; `[c0, c1, ...]` becomes `(c0 + c1*t + ...)` without zero terms.
fn coeff_expr(s: &str) -> String {
    let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) else {
        return s.to_string();
    };
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() == 1 {
        return parts[0].to_string();
    }
    let terms: Vec<String> = parts
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != "0")
        .map(|(i, c)| match (i, *c) {
            (0, c) => c.to_string(),
            (1, "1") => "t".into(),
            (1, c) => format!("{c}*t"),
            (i, "1") => format!("t^{i}"),
            (i, c) => format!("{c}*t^{i}"),
        })
        .collect();
    if terms.len() == 1 {
        terms[0].clone()
    } else {
        format!("({})", terms.join(" + "))
    }
}

pub fn exact_div_int(f: &IntPoly, c: &BigInt) -> Result<IntPoly> {
    if c.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut terms = BTreeMap::new();
    for (m, a) in &f.terms {
        let (q, r) = a.div_rem(c);
        if !r.is_zero() {
            return Err(Error::NotDivisible {
                coeff: a.to_string(),
                divisor: c.to_string(),
            });
        }
        terms.insert(m.clone(), q);
    }
    Ok(Poly {
        arity: f.arity,
        terms,
    })
}

/// Reduces `f` modulo `p` into F_p inside `ctx`.
pub fn int_poly_mod_p(ctx: &FieldCtx, f: &IntPoly) -> FqPoly {
    let p = BigInt::from(ctx.p());
    f.map_coeffs(ctx, |c| {
        let r = c.mod_floor(&p);
        ctx.from_u64(r.try_into().expect("residue fits in u64"))
    })
}

/// Replaces each exponent `e >= 1` by `((e - 1) mod (q - 1)) + 1`: the same
/// function on F_q^n with per-variable degree at most `q - 1`.
pub fn function_reduce<E>(ring: &impl Ring<Elem = E>, q: u64, f: &Poly<E>) -> Poly<E>
where
    E: Clone + Eq + std::hash::Hash + fmt::Debug,
{
    f.map_exponents(ring, f.arity, |e| {
        e.iter()
            .map(|&x| {
                if x == 0 {
                    0
                } else {
                    (((x as u64 - 1) % (q - 1)) + 1) as u32
                }
            })
            .collect()
    })
}

/// Points of F_q^n in odometer order: the last coordinate moves fastest.
pub fn point_from_index(ctx: &FieldCtx, n: usize, mut idx: u64) -> Vec<FqElem> {
    let q = ctx.q();
    let mut pt = vec![FqElem::ZERO; n];
    for slot in pt.iter_mut().rev() {
        *slot = ctx.from_index(idx % q);
        idx /= q;
    }
    pt
}

/// Inverse of [`point_from_index`].
pub fn index_of_point(ctx: &FieldCtx, x: &[FqElem]) -> u64 {
    x.iter().fold(0, |acc, a| acc * ctx.q() + ctx.index_of(a))
}

pub fn num_points(ctx: &FieldCtx, n: usize) -> Result<u64> {
    ctx.q().checked_pow(n as u32).ok_or(Error::BudgetExceeded {
        what: "point count",
        size: u64::MAX,
        limit: u64::MAX,
    })
}

/// Values of `f` at every point of F_q^n, in [`point_from_index`] order.
pub fn value_table(ctx: &FieldCtx, f: &FqPoly) -> Result<Vec<FqElem>> {
    let n = f.arity;
    let total = num_points(ctx, n)?;
    (0..total)
        .map(|i| f.eval(ctx, &point_from_index(ctx, n, i)))
        .collect()
}

/// The unique reduced polynomial (per-variable degree <= q - 1) taking the
/// given values on F_q^n, indexed as in [`point_from_index`].
///
/// Expands the indicator basis `prod_l (1 - (x_l - c_l)^(q-1))` one variable
/// at a time, using `(x - a)^(q-1) = sum_e a^(q-1-e) x^e` over F_q.
pub fn interpolate(ctx: &FieldCtx, n: usize, table: &[FqElem]) -> Result<FqPoly> {
    let total = num_points(ctx, n)? as usize;
    if table.len() != total {
        return Err(Error::IncompleteTable {
            expected: total,
            found: table.len(),
        });
    }
    let q = ctx.q() as usize;
    let elems = ctx.enumerate();
    // basis[a][e] = coefficient of x^e in the indicator of elems[a]
    let basis: Vec<Vec<FqElem>> = elems
        .iter()
        .map(|a| {
            (0..q)
                .map(|e| {
                    let term = ctx.neg(&ctx.pow(a, (q - 1 - e) as u64));
                    if e == 0 {
                        ctx.add(&ctx.one(), &term)
                    } else {
                        term
                    }
                })
                .collect()
        })
        .collect();
    let mut data = table.to_vec();
    let mut line = vec![FqElem::ZERO; q];
    for axis in 0..n {
        let stride = q.pow((n - 1 - axis) as u32);
        let block = stride * q;
        for start in (0..total).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (a, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + a * stride];
                }
                for e in 0..q {
                    let mut acc = FqElem::ZERO;
                    for (a, v) in line.iter().enumerate() {
                        if !v.is_zero() {
                            acc = ctx.add(&acc, &ctx.mul(v, &basis[a][e]));
                        }
                    }
                    data[base + e * stride] = acc;
                }
            }
        }
    }
    let terms = data.into_iter().enumerate().map(|(idx, c)| {
        let mut exps = vec![0u32; n];
        let mut rest = idx;
        for slot in exps.iter_mut().rev() {
            *slot = (rest % q) as u32;
            rest /= q;
        }
        (exps, c)
    });
    Ok(Poly::from_terms(ctx, n, terms))
}

/// Shorthand for integer polynomials in tests and the Witt module.
pub fn int_poly(arity: usize, terms: &[(i64, &[u32])]) -> IntPoly {
    Poly::from_terms(
        &Integers,
        arity,
        terms.iter().map(|(c, e)| (e.to_vec(), BigInt::from(*c))),
    )
}
