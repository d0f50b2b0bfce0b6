//! The finite field F_q = F_p[t]/(modulus) for small q.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{fmt_list, parse_int_list, Ring};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 8;

/// Default cap on the number of field elements.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 16;

/// An element of F_q in the basis 1, t, ..., t^(h-1). Entries past `h` are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem {
    c: [u32; MAX_DEGREE],
}

impl FqElem {
    pub const ZERO: FqElem = FqElem { c: [0; MAX_DEGREE] };

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// All `MAX_DEGREE` slots; use [`FieldCtx::coeffs`] for exactly `h` of them.
    pub fn raw(&self) -> &[u32; MAX_DEGREE] {
        &self.c
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.c.iter().rposition(|&x| x != 0).map_or(1, |i| i + 1);
        write!(f, "{:?}", &self.c[..last])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    h: usize,
    q: u64,
    /// Monic, h + 1 entries, ascending degree.
    modulus: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Builds F_{p^h} using the lexicographically smallest monic irreducible
    /// of degree `h`, comparing coefficient vectors from the constant term up.
    pub fn new(p: u64, h: usize) -> Result<Self> {
        Self::with_cap(p, h, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u64, h: usize, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if h == 0 || h > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange { h, max: MAX_DEGREE });
        }
        let q = p
            .checked_pow(h as u32)
            .filter(|&q| q <= cap && q <= DEFAULT_FIELD_CAP)
            .ok_or(Error::FieldTooLarge { p, h, cap })?;
        let p32 = p as u32;
        let modulus = (0..q)
            .map(|idx| {
                let mut m = digits_msd_first(idx, p32, h);
                m.push(1);
                m
            })
            .find(|m| is_irreducible(m, p32))
            .ok_or_else(|| Error::Internal(format!("no irreducible of degree {h} over F_{p}")))?;
        Ok(FieldCtx {
            p: p32,
            h,
            q,
            modulus,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus coefficients, ascending, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn coeffs<'a>(&self, a: &'a FqElem) -> &'a [u32] {
        &a.c[..self.h]
    }

    /// Builds an element from `h` residues (longer input is an error, shorter is zero-padded).
    pub fn elem(&self, coeffs: &[i64]) -> Result<FqElem> {
        if coeffs.len() > self.h {
            return Err(Error::LengthMismatch {
                expected: self.h,
                found: coeffs.len(),
            });
        }
        let mut c = [0u32; MAX_DEGREE];
        for (slot, &x) in c.iter_mut().zip(coeffs) {
            *slot = x.rem_euclid(self.p as i64) as u32;
        }
        Ok(FqElem { c })
    }

    pub fn from_u64(&self, n: u64) -> FqElem {
        let mut c = [0u32; MAX_DEGREE];
        c[0] = (n % self.p as u64) as u32;
        FqElem { c }
    }

    /// `t`, the class of the generator of the extension (equals 0 when h = 1).
    pub fn gen(&self) -> FqElem {
        if self.h == 1 {
            // t is a root of the modulus t - (-m0)
            return self.from_u64(((self.p - self.modulus[0]) % self.p) as u64);
        }
        let mut c = [0u32; MAX_DEGREE];
        c[1] = 1;
        FqElem { c }
    }

    /// Position in [`enumerate`](Self::enumerate) order.
    pub fn index_of(&self, a: &FqElem) -> u64 {
        a.c[..self.h]
            .iter()
            .fold(0u64, |acc, &x| acc * self.p as u64 + x as u64)
    }

    pub fn from_index(&self, idx: u64) -> FqElem {
        let d = digits_msd_first(idx, self.p, self.h);
        let mut c = [0u32; MAX_DEGREE];
        c[..self.h].copy_from_slice(&d);
        FqElem { c }
    }

    /// All q elements, coefficient vectors in lexicographic order, zero first.
    pub fn enumerate(&self) -> Vec<FqElem> {
        (0..self.q).map(|i| self.from_index(i)).collect()
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let mut c = [0u32; MAX_DEGREE];
        for i in 0..self.h {
            let s = a.c[i] + b.c[i];
            c[i] = if s >= self.p { s - self.p } else { s };
        }
        FqElem { c }
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        let mut c = [0u32; MAX_DEGREE];
        for i in 0..self.h {
            c[i] = if a.c[i] == 0 { 0 } else { self.p - a.c[i] };
        }
        FqElem { c }
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p as u64;
        let h = self.h;
        if h == 1 {
            let mut c = [0u32; MAX_DEGREE];
            c[0] = ((a.c[0] as u64 * b.c[0] as u64) % p) as u32;
            return FqElem { c };
        }
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..h {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..h {
                prod[i + j] = (prod[i + j] + a.c[i] as u64 * b.c[j] as u64) % p;
            }
        }
        // t^h = -(m_0 + m_1 t + ... + m_{h-1} t^{h-1})
        for k in (h..2 * h - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..h {
                let m = self.modulus[i] as u64;
                prod[k - h + i] = (prod[k - h + i] + (p - m) % p * top) % p;
            }
        }
        let mut c = [0u32; MAX_DEGREE];
        for i in 0..h {
            c[i] = prod[i] as u32;
        }
        FqElem { c }
    }

    pub fn scale(&self, k: u32, a: &FqElem) -> FqElem {
        let k = (k % self.p) as u64;
        let mut c = [0u32; MAX_DEGREE];
        for i in 0..self.h {
            c[i] = ((a.c[i] as u64 * k) % self.p as u64) as u32;
        }
        FqElem { c }
    }

    pub fn pow(&self, a: &FqElem, mut e: u64) -> FqElem {
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

    pub fn one(&self) -> FqElem {
        self.from_u64(1)
    }

    pub fn inv(&self, a: &FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// `a^(p^k)` for any integer `k`; `k = -1` gives the p-th root.
    pub fn frobenius(&self, a: &FqElem, k: i64) -> FqElem {
        let e = k.rem_euclid(self.h as i64) as u32;
        let mut x = *a;
        for _ in 0..e {
            x = self.pow(&x, self.p as u64);
        }
        x
    }
}

impl Ring for FieldCtx {
    type Elem = FqElem;

    fn zero(&self) -> FqElem {
        FqElem::ZERO
    }
    fn one(&self) -> FqElem {
        FieldCtx::one(self)
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FieldCtx::add(self, a, b)
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        FieldCtx::neg(self, a)
    }
    fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FieldCtx::sub(self, a, b)
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FieldCtx::mul(self, a, b)
    }
    fn pow(&self, a: &FqElem, e: u64) -> FqElem {
        FieldCtx::pow(self, a, e)
    }
    fn from_int(&self, n: i64) -> FqElem {
        self.from_u64(n.rem_euclid(self.p as i64) as u64)
    }
    fn fmt_elem(&self, a: &FqElem) -> String {
        fmt_list(self.coeffs(a))
    }
    fn parse_elem(&self, s: &str) -> Result<FqElem> {
        self.elem(&parse_int_list(s)?)
    }
}

/// `h` base-p digits of `idx`, most significant first.
fn digits_msd_first(mut idx: u64, p: u32, h: usize) -> Vec<u32> {
    let mut d = vec![0u32; h];
    for slot in d.iter_mut().rev() {
        *slot = (idx % p as u64) as u32;
        idx /= p as u64;
    }
    d
}

/// Remainder of `a` modulo the monic `b` over F_p (ascending coefficients).
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let db = b.len() - 1;
    while r.len() > db {
        let top = r.pop().unwrap() % p64;
        if top == 0 {
            continue;
        }
        let shift = r.len() - db;
        for (i, &bc) in b[..db].iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p64 - bc as u64) * top) % p64;
        }
    }
    r.into_iter().map(|x| (x % p64) as u32).collect()
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut f = digits_msd_first(idx, p, d);
            f.push(1);
            if poly_rem(m, &f, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}
