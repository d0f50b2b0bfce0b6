//! Witt structure polynomials: ghost components, r-fold sums, binary products.
//!
//! Variables use a level-major layout: for `r` summands the flat index of
//! `x_{ij}` (level `i`, summand `j`) is `i * r + j`, so the layout up to level
//! `n` is a prefix of the layout up to any higher level. `S_n` therefore has
//! arity `(n + 1) * r` and can be evaluated on any longer point's prefix.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mpoly::{exact_div_int, IntPoly, Poly};
use crate::ring::Integers;

/// Default cap on the number of terms of any intermediate polynomial.
pub const DEFAULT_TERM_BUDGET: usize = 500_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WittVarLayout {
    pub r: usize,
    pub nmax: usize,
}

impl WittVarLayout {
    pub fn new(r: usize, nmax: usize) -> Self {
        WittVarLayout { r, nmax }
    }

    pub fn arity(&self) -> usize {
        (self.nmax + 1) * self.r
    }

    /// Flat index of `x_{ij}`, with `j` counted from 0.
    pub fn index(&self, level: usize, j: usize) -> usize {
        debug_assert!(level <= self.nmax && j < self.r);
        level * self.r + j
    }

    /// Inverse of [`index`](Self::index).
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.r, idx % self.r)
    }

    /// `wt(x_{ij}) = p^i`.
    pub fn weights(&self, p: u64) -> Vec<u64> {
        (0..self.arity())
            .map(|idx| p.pow(self.split(idx).0 as u32))
            .collect()
    }

    /// Human-readable names; `x0, y0, x1, y1, ...` in the binary case.
    pub fn var_names(&self) -> Vec<String> {
        (0..self.arity())
            .map(|idx| {
                let (i, j) = self.split(idx);
                if self.r == 2 {
                    format!("{}{i}", ["x", "y"][j])
                } else {
                    format!("x{i}_{}", j + 1)
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct StructurePolySet {
    pub p: u64,
    pub r: usize,
    pub nmax: usize,
    /// `s[n]` has arity `(n + 1) * r`.
    pub s: Vec<Arc<IntPoly>>,
}

impl StructurePolySet {
    pub fn layout(&self) -> WittVarLayout {
        WittVarLayout::new(self.r, self.nmax)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Sum,
    Prod,
}

type CacheKey = (Kind, u64, usize, usize);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<IntPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<IntPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Drops every cached structure polynomial; later calls recompute them.
pub fn clear_structure_cache() {
    cache().lock().unwrap().clear();
}

fn check_budget(f: &IntPoly, budget: usize) -> Result<()> {
    if f.num_terms() > budget {
        return Err(Error::BudgetExceeded {
            what: "structure polynomial terms",
            size: f.num_terms() as u64,
            limit: budget as u64,
        });
    }
    Ok(())
}

fn checked_mul(a: &IntPoly, b: &IntPoly, budget: usize) -> Result<IntPoly> {
    // term pairs are the real cost; refuse products far beyond the budget up front
    let pairs = a.num_terms() as u64 * b.num_terms() as u64;
    if pairs > budget as u64 * 100 {
        return Err(Error::BudgetExceeded {
            what: "structure polynomial term products",
            size: pairs,
            limit: budget as u64 * 100,
        });
    }
    let out = a.mul(b, &Integers)?;
    check_budget(&out, budget)?;
    Ok(out)
}

fn checked_pow(f: &IntPoly, mut e: u64, budget: usize) -> Result<IntPoly> {
    let mut base = f.clone();
    let mut acc = IntPoly::constant(&Integers, BigInt::one(), f.arity());
    while e > 0 {
        if e & 1 == 1 {
            acc = checked_mul(&acc, &base, budget)?;
        }
        e >>= 1;
        if e > 0 {
            base = checked_mul(&base, &base, budget)?;
        }
    }
    Ok(acc)
}

fn pow_big(p: u64, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(p), e)
}

/// `x_0^(p^n) + p x_1^(p^(n-1)) + ... + p^n x_n` in variables `x_0..x_n`.
pub fn ghost_poly(p: u64, n: usize) -> IntPoly {
    ghost_in_layout(p, n, WittVarLayout::new(1, n), 0)
}

/// Ghost component `n` of summand `j` inside `layout`.
fn ghost_in_layout(p: u64, n: usize, layout: WittVarLayout, j: usize) -> IntPoly {
    let arity = layout.arity();
    let terms = (0..=n).map(|i| {
        let mut e = vec![0u32; arity];
        e[layout.index(i, j)] = p.pow((n - i) as u32) as u32;
        (e, pow_big(p, i))
    });
    Poly::from_terms(&Integers, arity, terms)
}

/// Solves `sum_i p^i T_i^(p^(n-i)) = target_n` level by level for `T_n`,
/// where `targets(n)` is the level-`n` ghost image, all exact over Z.
fn solve_ghost_recursion<F>(
    kind: Kind,
    p: u64,
    r: usize,
    nmax: usize,
    budget: usize,
    targets: F,
) -> Result<Vec<Arc<IntPoly>>>
where
    F: Fn(usize) -> Result<IntPoly>,
{
    {
        let c = cache().lock().unwrap();
        let hit: Option<Vec<_>> = (0..=nmax).map(|n| c.get(&(kind, p, r, n)).cloned()).collect();
        if let Some(all) = hit {
            return Ok(all);
        }
    }
    let mut out: Vec<Arc<IntPoly>> = Vec::with_capacity(nmax + 1);
    // powers[i] = T_i^(p^(n-1-i)) at the start of round n, lifted to the current arity
    let mut powers: Vec<IntPoly> = Vec::new();
    for n in 0..=nmax {
        let arity = (n + 1) * r;
        let key = (kind, p, r, n);
        let cached = cache().lock().unwrap().get(&key).cloned();
        for pw in powers.iter_mut() {
            *pw = pad(pw, arity);
            *pw = checked_pow(pw, p, budget)?;
        }
        let tn = match cached {
            Some(t) => t,
            None => {
                let mut rest = targets(n)?;
                for (i, pw) in powers.iter().enumerate() {
                    rest = rest.sub(&pw.scale(&pow_big(p, i), &Integers), &Integers)?;
                }
                let tn = exact_div_int(&rest, &pow_big(p, n))?;
                check_budget(&tn, budget)?;
                let tn = Arc::new(tn);
                cache().lock().unwrap().insert(key, tn.clone());
                tn
            }
        };
        if n < nmax {
            powers.push(pad(&tn, arity));
        }
        out.push(tn);
    }
    Ok(out)
}

/// Re-embeds `f` into a larger prefix-compatible layout.
fn pad(f: &IntPoly, arity: usize) -> IntPoly {
    if f.arity() == arity {
        return f.clone();
    }
    f.map_exponents(&Integers, arity, |e| {
        let mut v = e.to_vec();
        v.resize(arity, 0);
        v
    })
}

/// `S_0^(r), ..., S_nmax^(r)` from the ghost recursion, with every division by
/// `p^n` checked to be exact.
pub fn witt_sum_polys(p: u64, r: usize, nmax: usize, budget: usize) -> Result<StructurePolySet> {
    check_prime(p)?;
    if r < 1 {
        return Err(Error::InvalidInstance("need at least one summand".into()));
    }
    let s = solve_ghost_recursion(Kind::Sum, p, r, nmax, budget, |n| {
        let layout = WittVarLayout::new(r, n);
        let mut acc = IntPoly::zero(layout.arity());
        for j in 0..r {
            acc = acc.add(&ghost_in_layout(p, n, layout, j), &Integers)?;
        }
        Ok(acc)
    })?;
    Ok(StructurePolySet { p, r, nmax, s })
}

/// Binary product polynomials `M_0..M_nmax` in the layout `(x0, y0, x1, y1, ...)`.
pub fn witt_prod_polys(p: u64, nmax: usize, budget: usize) -> Result<Vec<Arc<IntPoly>>> {
    check_prime(p)?;
    solve_ghost_recursion(Kind::Prod, p, 2, nmax, budget, |n| {
        let layout = WittVarLayout::new(2, n);
        let wx = ghost_in_layout(p, n, layout, 0);
        let wy = ghost_in_layout(p, n, layout, 1);
        checked_mul(&wx, &wy, budget)
    })
}

/// `s_n^(r)`: `S_n^(r)` with `x_{ij}` replaced by `x_{ij}^(p^i)`.
pub fn substituted_sum_polys(p: u64, r: usize, nmax: usize, budget: usize) -> Result<Vec<IntPoly>> {
    let set = witt_sum_polys(p, r, nmax, budget)?;
    Ok(set
        .s
        .iter()
        .map(|f| substitute_frobenius_twist(p, r, f))
        .collect())
}

fn substitute_frobenius_twist(p: u64, r: usize, f: &IntPoly) -> IntPoly {
    f.map_exponents(&Integers, f.arity(), |e| {
        e.iter()
            .enumerate()
            .map(|(idx, &x)| x * p.pow((idx / r) as u32) as u32)
            .collect()
    })
}

/// r-fold sum polynomials obtained by folding binary sums left to right.
pub fn folded_sum_polys(p: u64, r: usize, nmax: usize, budget: usize) -> Result<Vec<IntPoly>> {
    let binary = witt_sum_polys(p, 2, nmax, budget)?;
    let layout = WittVarLayout::new(r, nmax);
    let arity = layout.arity();
    let var = |i: usize, j: usize| IntPoly::var(&Integers, layout.index(i, j), arity);
    let mut acc: Vec<IntPoly> = (0..=nmax).map(|i| var(i, 0)).collect();
    for j in 1..r {
        let mut next = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            let mut images = Vec::with_capacity(2 * (n + 1));
            for (i, a) in acc.iter().enumerate().take(n + 1) {
                images.push(a.clone());
                images.push(var(i, j));
            }
            let t = binary.s[n].substitute(&Integers, &images)?;
            check_budget(&t, budget)?;
            next.push(t);
        }
        acc = next;
    }
    // drop to the natural arity of each level
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(n, f)| {
            let a = (n + 1) * r;
            f.map_exponents(&Integers, a, |e| e[..a].to_vec())
        })
        .collect())
}

fn check_prime(p: u64) -> Result<()> {
    if crate::ff::is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostReport {
    pub trials: usize,
    pub failures: Vec<String>,
}

impl GhostReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluates the ghost component `n` of a Witt vector given by its coordinates.
pub fn ghost_value(p: u64, n: usize, coords: &[BigInt]) -> BigInt {
    (0..=n).fold(BigInt::zero(), |acc, i| {
        acc + pow_big(p, i) * num_traits::pow(coords[i].clone(), p.pow((n - i) as u32) as usize)
    })
}

fn random_point(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigInt> {
    (0..len).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect()
}

/// Checks `w_n(S(X_1, ..., X_r)) = sum_j w_n(X_j)` on seeded random integer
/// vectors with entries in [-9, 9].
pub fn check_ghost_additivity(set: &StructurePolySet, trials: usize, seed: u64) -> Result<GhostReport> {
    let layout = set.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let pt = if t == 0 {
            vec![BigInt::zero(); layout.arity()]
        } else {
            random_point(&mut rng, layout.arity())
        };
        let sums = set
            .s
            .iter()
            .enumerate()
            .map(|(n, f)| f.eval(&Integers, &pt[..(n + 1) * set.r]))
            .collect::<Result<Vec<_>>>()?;
        for n in 0..=set.nmax {
            let lhs = ghost_value(set.p, n, &sums);
            let rhs: BigInt = (0..set.r)
                .map(|j| {
                    let coords: Vec<BigInt> =
                        (0..=n).map(|i| pt[layout.index(i, j)].clone()).collect();
                    ghost_value(set.p, n, &coords)
                })
                .sum();
            if lhs != rhs {
                failures.push(format!("trial {t}, level {n}: {lhs} != {rhs}"));
            }
        }
    }
    Ok(GhostReport { trials, failures })
}

/// Checks `w_n(M(X, Y)) = w_n(X) w_n(Y)` on seeded random integer vectors.
pub fn check_ghost_multiplicativity(
    p: u64,
    m: &[Arc<IntPoly>],
    trials: usize,
    seed: u64,
) -> Result<GhostReport> {
    let nmax = m.len().saturating_sub(1);
    let layout = WittVarLayout::new(2, nmax);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for t in 0..trials {
        let pt = random_point(&mut rng, layout.arity());
        let prods = m
            .iter()
            .enumerate()
            .map(|(n, f)| f.eval(&Integers, &pt[..(n + 1) * 2]))
            .collect::<Result<Vec<_>>>()?;
        for n in 0..m.len() {
            let x: Vec<BigInt> = (0..=n).map(|i| pt[2 * i].clone()).collect();
            let y: Vec<BigInt> = (0..=n).map(|i| pt[2 * i + 1].clone()).collect();
            let lhs = ghost_value(p, n, &prods);
            let rhs = ghost_value(p, n, &x) * ghost_value(p, n, &y);
            if lhs != rhs {
                failures.push(format!("trial {t}, level {n}: {lhs} != {rhs}"));
            }
        }
    }
    Ok(GhostReport { trials, failures })
}

/// `sum_j x_{1j} - (1/p) sum multinomial(p; t) prod x_{0j}^{t_j}` over
/// compositions `t` of `p` with every part below `p`.
pub fn closed_form_s1(p: u64, r: usize) -> IntPoly {
    let layout = WittVarLayout::new(r, 1);
    let arity = layout.arity();
    let mut terms: Vec<(Vec<u32>, BigInt)> = (0..r)
        .map(|j| {
            let mut e = vec![0; arity];
            e[layout.index(1, j)] = 1;
            (e, BigInt::one())
        })
        .collect();
    let mut fact = vec![BigInt::one()];
    for k in 1..=p {
        let next = &fact[k as usize - 1] * BigInt::from(k);
        fact.push(next);
    }
    let mut comp = vec![0u32; r];
    compositions(p as u32, 0, &mut comp, &mut |t| {
        if t.iter().any(|&x| x as u64 == p) {
            return;
        }
        let denom: BigInt = t.iter().map(|&x| fact[x as usize].clone()).product();
        let coeff = &fact[p as usize] / denom / BigInt::from(p);
        let mut e = vec![0; arity];
        for (j, &x) in t.iter().enumerate() {
            e[layout.index(0, j)] = x;
        }
        terms.push((e, -coeff));
    });
    Poly::from_terms(&Integers, arity, terms)
}

fn compositions(left: u32, pos: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        f(cur);
        return;
    }
    for x in 0..=left {
        cur[pos] = x;
        compositions(left - x, pos + 1, cur, f);
    }
}

/// Integer polynomial with coefficients written as `i64`; a convenience for literals.
pub fn int_terms(arity: usize, terms: &[(i64, &[u32])]) -> IntPoly {
    crate::mpoly::int_poly(arity, terms)
}

/// Whether every term of `f` has weighted degree exactly `target` under `weights`.
pub fn is_weighted_homogeneous_of(f: &IntPoly, weights: &[u64], target: u64) -> bool {
    f.terms().all(|(m, _)| {
        m.exps()
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as u64 * w)
            .sum::<u64>()
            == target
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::int_poly;

    const B: usize = DEFAULT_TERM_BUDGET;

    #[test]
    fn ghost_polynomials() {
        assert_eq!(ghost_poly(5, 0), int_poly(1, &[(1, &[1])]));
        assert_eq!(ghost_poly(2, 1), int_poly(2, &[(1, &[2, 0]), (2, &[0, 1])]));
        assert_eq!(
            ghost_poly(3, 2),
            int_poly(3, &[(1, &[9, 0, 0]), (3, &[0, 3, 0]), (9, &[0, 0, 1])])
        );
    }

    #[test]
    fn layout_is_level_major() {
        let l = WittVarLayout::new(2, 2);
        assert_eq!(l.var_names(), ["x0", "y0", "x1", "y1", "x2", "y2"]);
        assert_eq!(l.index(1, 1), 3);
        assert_eq!(l.split(4), (2, 0));
        assert_eq!(l.weights(3), [1, 1, 3, 3, 9, 9]);
    }

    #[test]
    fn binary_sum_at_p2() {
        let set = witt_sum_polys(2, 2, 1, B).unwrap();
        assert_eq!(*set.s[0], int_poly(2, &[(1, &[1, 0]), (1, &[0, 1])]));
        let s1 = int_poly(4, &[(1, &[0, 0, 1, 0]), (1, &[0, 0, 0, 1]), (-1, &[1, 1, 0, 0])]);
        assert_eq!(*set.s[1], s1);
    }

    #[test]
    fn s1_closed_form() {
        for p in [2, 3, 5] {
            for r in 2..=5 {
                let set = witt_sum_polys(p, r, 1, B).unwrap();
                assert_eq!(*set.s[1], closed_form_s1(p, r), "p={p} r={r}");
                let s0: Vec<(i64, Vec<u32>)> = (0..r)
                    .map(|j| {
                        let mut e = vec![0; r];
                        e[j] = 1;
                        (1, e)
                    })
                    .collect();
                let s0: Vec<(i64, &[u32])> = s0.iter().map(|(c, e)| (*c, e.as_slice())).collect();
                assert_eq!(*set.s[0], int_poly(r, &s0));
            }
        }
    }

    #[test]
    fn products_m0_m1() {
        for p in [2, 3, 5] {
            let m = witt_prod_polys(p, 1, B).unwrap();
            assert_eq!(*m[0], int_poly(2, &[(1, &[1, 1])]));
            let pe = p as u32;
            let m1 = int_poly(
                4,
                &[
                    (1, &[pe, 0, 0, 1]),
                    (1, &[0, pe, 1, 0]),
                    (p as i64, &[0, 0, 1, 1]),
                ],
            );
            assert_eq!(*m[1], m1, "p={p}");
        }
    }

    #[test]
    fn weighted_homogeneity() {
        for (p, nmax) in [(2u64, 3usize), (3, 2)] {
            for r in 2..=4 {
                let set = witt_sum_polys(p, r, nmax, B).unwrap();
                for (n, f) in set.s.iter().enumerate() {
                    let w = WittVarLayout::new(r, n).weights(p);
                    assert!(is_weighted_homogeneous_of(f, &w, p.pow(n as u32)), "p={p} r={r} n={n}");
                }
            }
            let m = witt_prod_polys(p, nmax, B).unwrap();
            for (n, f) in m.iter().enumerate() {
                let w = WittVarLayout::new(2, n).weights(p);
                assert!(is_weighted_homogeneous_of(f, &w, 2 * p.pow(n as u32)));
            }
        }
    }

    #[test]
    fn substituted_forms_are_homogeneous() {
        let s = substituted_sum_polys(2, 2, 1, B).unwrap();
        let expect = int_poly(4, &[(1, &[0, 0, 2, 0]), (1, &[0, 0, 0, 2]), (-1, &[1, 1, 0, 0])]);
        assert_eq!(s[1], expect);
        for (p, r, nmax) in [(2u64, 3usize, 3usize), (3, 2, 2), (5, 2, 1)] {
            for (n, f) in substituted_sum_polys(p, r, nmax, B).unwrap().iter().enumerate() {
                let wd = f.weighted_degree(&vec![1; f.arity()]).unwrap();
                assert!(wd.homogeneous);
                assert_eq!(wd.degree.finite(), Some(p.pow(n as u32)));
            }
        }
    }

    #[test]
    fn ghost_identities_on_random_vectors() {
        for (p, r, nmax) in [(2u64, 2usize, 3usize), (2, 4, 3), (3, 2, 2), (3, 4, 2), (5, 3, 1)] {
            let set = witt_sum_polys(p, r, nmax, B).unwrap();
            let rep = check_ghost_additivity(&set, 100, 7).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures);
        }
        for (p, nmax) in [(2u64, 3usize), (3, 2)] {
            let m = witt_prod_polys(p, nmax, B).unwrap();
            assert!(check_ghost_multiplicativity(p, &m, 100, 7).unwrap().passed());
        }
    }

    #[test]
    fn folding_matches_direct_sum() {
        for nmax in 0..=2 {
            let direct = witt_sum_polys(2, 3, nmax, B).unwrap();
            let folded = folded_sum_polys(2, 3, nmax, B).unwrap();
            for n in 0..=nmax {
                assert_eq!(*direct.s[n], folded[n]);
            }
        }
    }

    #[test]
    fn sum_is_symmetric_in_summands() {
        let set = witt_sum_polys(3, 3, 2, B).unwrap();
        let layout = set.layout();
        for (n, f) in set.s.iter().enumerate() {
            let swapped = f.map_exponents(&Integers, f.arity(), |e| {
                let mut v = e.to_vec();
                for i in 0..=n {
                    v.swap(layout.index(i, 0), layout.index(i, 2));
                }
                v
            });
            assert_eq!(&swapped, f.as_ref());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = witt_sum_polys(5, 6, 3, 50).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(matches!(witt_sum_polys(4, 2, 1, B), Err(Error::NotPrime(4))));
    }
}
