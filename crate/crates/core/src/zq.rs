//! The truncated unramified ring Z_q / p^m Z_q, Teichmuller digits, and
//! digit-level Witt arithmetic carried out purely in F_q.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FqElem, MAX_DEGREE};
use crate::mpoly::{int_poly_mod_p, FqPoly};
use crate::ring::{fmt_list, parse_int_list, Ring};
use crate::witt::{witt_prod_polys, witt_sum_polys, DEFAULT_TERM_BUDGET};

/// Default cap on the precision m.
pub const MAX_PRECISION: u32 = 8;

/// An element in the basis 1, t, ..., t^(h-1) with residues mod p^m.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ZqElem {
    c: [u64; MAX_DEGREE],
}

impl ZqElem {
    pub const ZERO: ZqElem = ZqElem { c: [0; MAX_DEGREE] };

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
}

impl fmt::Debug for ZqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.c.iter().rposition(|&x| x != 0).map_or(1, |i| i + 1);
        write!(f, "{:?}", &self.c[..last])
    }
}

/// Teichmuller digits `(a_0, ..., a_{m-1})` of `sum tau(a_i) p^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitVector(pub Vec<FqElem>);

#[derive(Clone)]
pub struct ZqCtx {
    field: FieldCtx,
    m: u32,
    pm: u64,
    modulus: Vec<u64>,
    tau: Arc<OnceLock<Vec<ZqElem>>>,
    arith: Arc<OnceLock<Result<WittDigitArith>>>,
}

impl fmt::Debug for ZqCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZqCtx")
            .field("p", &self.field.p())
            .field("h", &self.field.h())
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for ZqCtx {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.m == other.m
    }
}

impl Eq for ZqCtx {}

impl ZqCtx {
    /// Z_q / p^m with the field modulus lifted verbatim.
    pub fn new(field: FieldCtx, m: u32) -> Result<Self> {
        Self::with_max_precision(field, m, MAX_PRECISION)
    }

    pub fn with_max_precision(field: FieldCtx, m: u32, max: u32) -> Result<Self> {
        let err = Error::PrecisionOutOfRange { m, max };
        if m == 0 || m > max {
            return Err(err);
        }
        let pm = (field.p() as u64)
            .checked_pow(m)
            .filter(|&v| v < 1 << 62)
            .ok_or(err)?;
        let modulus = field.modulus().iter().map(|&c| c as u64).collect();
        Ok(ZqCtx {
            field,
            m,
            pm,
            modulus,
            tau: Arc::new(OnceLock::new()),
            arith: Arc::new(OnceLock::new()),
        })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> u64 {
        self.field.p() as u64
    }

    pub fn h(&self) -> usize {
        self.field.h()
    }

    /// p^m.
    pub fn modulus_pm(&self) -> u64 {
        self.pm
    }

    pub fn lifted_modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of ring elements, `p^(m h)`, if it fits.
    pub fn size(&self) -> Option<u64> {
        self.pm.checked_pow(self.h() as u32)
    }

    pub fn coeffs<'a>(&self, a: &'a ZqElem) -> &'a [u64] {
        &a.c[..self.h()]
    }

    pub fn elem(&self, coeffs: &[i64]) -> Result<ZqElem> {
        if coeffs.len() > self.h() {
            return Err(Error::LengthMismatch {
                expected: self.h(),
                found: coeffs.len(),
            });
        }
        let mut c = [0u64; MAX_DEGREE];
        for (slot, &x) in c.iter_mut().zip(coeffs) {
            *slot = (x as i128).rem_euclid(self.pm as i128) as u64;
        }
        Ok(ZqElem { c })
    }

    pub fn from_int(&self, n: i64) -> ZqElem {
        self.elem(&[n]).expect("one coefficient")
    }

    /// Position in lexicographic coefficient order, coefficient 0 most significant.
    pub fn index_of(&self, a: &ZqElem) -> u64 {
        self.coeffs(a).iter().fold(0, |acc, &x| acc * self.pm + x)
    }

    pub fn from_index(&self, mut idx: u64) -> ZqElem {
        let mut c = [0u64; MAX_DEGREE];
        for slot in c[..self.h()].iter_mut().rev() {
            *slot = idx % self.pm;
            idx /= self.pm;
        }
        ZqElem { c }
    }

    pub fn add(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.h() {
            c[i] = (a.c[i] + b.c[i]) % self.pm;
        }
        ZqElem { c }
    }

    pub fn neg(&self, a: &ZqElem) -> ZqElem {
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.h() {
            c[i] = (self.pm - a.c[i]) % self.pm;
        }
        ZqElem { c }
    }

    pub fn sub(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        let h = self.h();
        let pm = self.pm as u128;
        let mut prod = [0u128; 2 * MAX_DEGREE];
        for i in 0..h {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..h {
                prod[i + j] = (prod[i + j] + a.c[i] as u128 * b.c[j] as u128) % pm;
            }
        }
        // t^h = -(m_0 + m_1 t + ... + m_{h-1} t^(h-1))
        for k in (h..2 * h - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..h {
                let sub = top * self.modulus[i] as u128 % pm;
                let slot = &mut prod[k - h + i];
                *slot = (*slot + pm - sub) % pm;
            }
        }
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..h {
            c[i] = prod[i] as u64;
        }
        ZqElem { c }
    }

    pub fn scale(&self, k: u64, a: &ZqElem) -> ZqElem {
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.h() {
            c[i] = (a.c[i] as u128 * k as u128 % self.pm as u128) as u64;
        }
        ZqElem { c }
    }

    pub fn pow(&self, a: &ZqElem, mut e: u64) -> ZqElem {
        let mut base = *a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn one(&self) -> ZqElem {
        self.from_int(1)
    }

    /// Reduction modulo p into the residue field.
    pub fn reduce(&self, a: &ZqElem) -> FqElem {
        let p = self.p();
        let c: Vec<i64> = self.coeffs(a).iter().map(|&x| (x % p) as i64).collect();
        self.field.elem(&c).expect("h coefficients")
    }

    /// Coefficients read as integers in [0, p - 1].
    pub fn lift_verbatim(&self, a: &FqElem) -> ZqElem {
        let mut c = [0u64; MAX_DEGREE];
        for (slot, &x) in c.iter_mut().zip(self.field.coeffs(a)) {
            *slot = x as u64;
        }
        ZqElem { c }
    }

    /// The same element read modulo p^k for `k <= m`.
    pub fn truncate(&self, a: &ZqElem, k: u32) -> ZqElem {
        let pk = self.p().pow(k.min(self.m));
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.h() {
            c[i] = a.c[i] % pk;
        }
        ZqElem { c }
    }

    /// Whether `p^k` divides `a` (always true for `k = 0`).
    pub fn divisible_by_pk(&self, a: &ZqElem, k: u32) -> bool {
        let pk = self.p().pow(k.min(self.m));
        self.coeffs(a).iter().all(|&x| x % pk == 0)
    }

    /// Largest `k <= m` with `p^k | a`; 0 gives m.
    pub fn ord_p(&self, a: &ZqElem) -> u32 {
        (0..self.m)
            .find(|&k| !self.divisible_by_pk(a, k + 1))
            .unwrap_or(self.m)
    }

    /// The unique `x` with `x^q = x` and `x = a mod p`, by iterating `x -> x^q`
    /// from the verbatim lift.
    pub fn teichmuller_lift_iterated(&self, a: &FqElem) -> Result<ZqElem> {
        let q = self.field.q();
        let mut x = self.lift_verbatim(a);
        for _ in 0..=self.m {
            let next = self.pow(&x, q);
            if next == x {
                return Ok(x);
            }
            x = next;
        }
        Err(Error::NoFixedPoint(self.m + 1))
    }

    /// Table lookup of [`teichmuller_lift_iterated`](Self::teichmuller_lift_iterated).
    pub fn teichmuller_lift(&self, a: &FqElem) -> ZqElem {
        self.tau_table()[self.field.index_of(a) as usize]
    }

    /// Lifts of every field element, in [`FieldCtx::enumerate`] order.
    pub fn tau_table(&self) -> &[ZqElem] {
        self.tau.get_or_init(|| {
            self.field
                .enumerate()
                .iter()
                .map(|a| {
                    self.teichmuller_lift_iterated(a)
                        .expect("Teichmuller iteration converges within m steps")
                })
                .collect()
        })
    }

    /// Exact division by p; the result is meaningful modulo p^(m-1).
    fn div_p(&self, a: &ZqElem) -> Result<ZqElem> {
        let p = self.p();
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.h() {
            if a.c[i] % p != 0 {
                return Err(Error::NotDivisible {
                    coeff: a.c[i].to_string(),
                    divisor: p.to_string(),
                });
            }
            c[i] = a.c[i] / p;
        }
        Ok(ZqElem { c })
    }

    pub fn digits(&self, x: &ZqElem) -> Result<DigitVector> {
        let mut cur = *x;
        let mut out = Vec::with_capacity(self.m as usize);
        for i in 0..self.m {
            let a = self.reduce(&cur);
            out.push(a);
            if i + 1 < self.m {
                cur = self.div_p(&self.sub(&cur, &self.teichmuller_lift(&a)))?;
            }
        }
        Ok(DigitVector(out))
    }

    pub fn from_digits(&self, d: &DigitVector) -> Result<ZqElem> {
        if d.0.len() != self.m as usize {
            return Err(Error::LengthMismatch {
                expected: self.m as usize,
                found: d.0.len(),
            });
        }
        let mut acc = ZqElem::ZERO;
        let mut pi = 1u64;
        for a in &d.0 {
            acc = self.add(&acc, &self.scale(pi, &self.teichmuller_lift(a)));
            pi = pi.saturating_mul(self.p());
        }
        Ok(acc)
    }

    /// Binary structure polynomials reduced mod p, built on first use.
    pub fn witt_arith(&self) -> Result<&WittDigitArith> {
        self.arith
            .get_or_init(|| WittDigitArith::new(&self.field, self.m as usize - 1))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Digit vector of the sum, computed in F_q through `S_n mod p`.
    pub fn witt_add_digits(&self, a: &DigitVector, b: &DigitVector) -> Result<DigitVector> {
        let w = self.witt_arith()?;
        let ca = w.to_coords(&a.0);
        let cb = w.to_coords(&b.0);
        Ok(DigitVector(w.to_digits(&w.add_coords(&ca, &cb)?)))
    }

    /// Digit vector of the product, computed in F_q through `M_n mod p`.
    pub fn witt_mul_digits(&self, a: &DigitVector, b: &DigitVector) -> Result<DigitVector> {
        let w = self.witt_arith()?;
        let ca = w.to_coords(&a.0);
        let cb = w.to_coords(&b.0);
        Ok(DigitVector(w.to_digits(&w.mul_coords(&ca, &cb)?)))
    }

    pub fn fmt_with_modulus(&self, a: &ZqElem) -> String {
        format!("{} mod {}^{}", fmt_list(self.coeffs(a)), self.p(), self.m)
    }
}

impl Ring for ZqCtx {
    type Elem = ZqElem;

    fn zero(&self) -> ZqElem {
        ZqElem::ZERO
    }
    fn one(&self) -> ZqElem {
        ZqCtx::one(self)
    }
    fn is_zero(&self, a: &ZqElem) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        ZqCtx::add(self, a, b)
    }
    fn neg(&self, a: &ZqElem) -> ZqElem {
        ZqCtx::neg(self, a)
    }
    fn mul(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        ZqCtx::mul(self, a, b)
    }
    fn pow(&self, a: &ZqElem, e: u64) -> ZqElem {
        ZqCtx::pow(self, a, e)
    }
    fn from_int(&self, n: i64) -> ZqElem {
        ZqCtx::from_int(self, n)
    }
    fn fmt_elem(&self, a: &ZqElem) -> String {
        fmt_list(self.coeffs(a))
    }
    fn parse_elem(&self, s: &str) -> Result<ZqElem> {
        self.elem(&parse_int_list(s)?)
    }
}

/// Witt vector arithmetic over F_q in coordinates `(x_0, x_1, ...)`, where
/// the digit vector `(a_0, a_1, ...)` has coordinates `x_i = a_i^(p^i)`.
#[derive(Clone, Debug)]
pub struct WittDigitArith {
    field: FieldCtx,
    /// Binary `S_n mod p` in `(x0, y0, x1, y1, ...)`.
    sum: Vec<FqPoly>,
    /// Binary `M_n mod p`, same layout.
    prod: Vec<FqPoly>,
}

impl WittDigitArith {
    pub fn new(field: &FieldCtx, nmax: usize) -> Result<Self> {
        let p = field.p() as u64;
        let s = witt_sum_polys(p, 2, nmax, DEFAULT_TERM_BUDGET)?;
        let m = witt_prod_polys(p, nmax, DEFAULT_TERM_BUDGET)?;
        Ok(WittDigitArith {
            field: field.clone(),
            sum: s.s.iter().map(|f| int_poly_mod_p(field, f)).collect(),
            prod: m.iter().map(|f| int_poly_mod_p(field, f)).collect(),
        })
    }

    pub fn levels(&self) -> usize {
        self.sum.len()
    }

    pub fn to_coords(&self, digits: &[FqElem]) -> Vec<FqElem> {
        digits
            .iter()
            .enumerate()
            .map(|(i, a)| self.field.frobenius(a, i as i64))
            .collect()
    }

    pub fn to_digits(&self, coords: &[FqElem]) -> Vec<FqElem> {
        coords
            .iter()
            .enumerate()
            .map(|(i, a)| self.field.frobenius(a, -(i as i64)))
            .collect()
    }

    fn apply(&self, polys: &[FqPoly], a: &[FqElem], b: &[FqElem]) -> Result<Vec<FqElem>> {
        if a.len() != b.len() || a.len() > polys.len() {
            return Err(Error::LengthMismatch {
                expected: polys.len().min(a.len().max(b.len())),
                found: a.len().min(b.len()),
            });
        }
        let point: Vec<FqElem> = a.iter().zip(b).flat_map(|(x, y)| [*x, *y]).collect();
        (0..a.len())
            .map(|n| polys[n].eval(&self.field, &point[..2 * (n + 1)]))
            .collect()
    }

    /// Coordinates of the Witt sum; the length of `a` sets the precision.
    pub fn add_coords(&self, a: &[FqElem], b: &[FqElem]) -> Result<Vec<FqElem>> {
        self.apply(&self.sum, a, b)
    }

    pub fn mul_coords(&self, a: &[FqElem], b: &[FqElem]) -> Result<Vec<FqElem>> {
        self.apply(&self.prod, a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prop14Report {
    pub p: u64,
    pub m: u32,
    /// Teichmuller residues as integers in [0, p^m - 1], in field order.
    pub residues: Vec<u64>,
    pub complete_mod_p: bool,
    pub failures: Vec<String>,
}

impl Prop14Report {
    pub fn passed(&self) -> bool {
        self.complete_mod_p && self.failures.is_empty()
    }
}

/// Checks that the Teichmuller residues mod p^m form a complete residue
/// system mod p with `x^(p-1) = 1 mod p^m` for units and `0^(p-1) = 0`.
pub fn check_prop14(p: u64, m: u32) -> Result<Prop14Report> {
    let ctx = ZqCtx::new(FieldCtx::new(p, 1)?, m)?;
    let pm = ctx.modulus_pm() as u128;
    let residues: Vec<u64> = ctx.tau_table().iter().map(|x| ctx.coeffs(x)[0]).collect();
    let mut seen = vec![false; p as usize];
    for &x in &residues {
        seen[(x % p) as usize] = true;
    }
    let complete_mod_p = residues.len() == p as usize && seen.iter().all(|&b| b);
    let mut failures = Vec::new();
    for &x in &residues {
        let mut pw = 1u128;
        for _ in 0..p - 1 {
            pw = pw * x as u128 % pm;
        }
        let expect = if x % p == 0 { 0 } else { 1 };
        if pw != expect {
            failures.push(format!("{x}^{} = {pw} mod {pm}, expected {expect}", p - 1));
        }
    }
    Ok(Prop14Report {
        p,
        m,
        residues,
        complete_mod_p,
        failures,
    })
}
