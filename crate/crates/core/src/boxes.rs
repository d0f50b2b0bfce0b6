//! Boxes: liftings of F_q^n into (Z_q / p^m)^n, and their representing
//! polynomials `g_ij`.
//!
//! A box point above `X` is `Y_j = tau(x_j) + sum_{i >= 1} p^i G_ij(tau X)`,
//! where `G_ij` is the Teichmuller lift (coefficientwise) of a reduced
//! polynomial `g_ij` over F_q evaluated in Z_q. Each level's `g_ij` is read off
//! as the residue mod p of what remains after removing the lower levels.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::FqElem;
use crate::mpoly::{interpolate, num_points, point_from_index, Degree, FqPoly, Poly};
use crate::ring::Ring;
use crate::zq::{ZqCtx, ZqElem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoxKind {
    Teichmuller,
    /// `digit_polys[j][i - 1]`: univariate level-`i` polynomial of coordinate `j`.
    Split { digit_polys: Vec<Vec<FqPoly>> },
    /// `g[i - 1][j]`: level-`i` polynomial of coordinate `j` in all `n` variables.
    PolyDefined { g: Vec<Vec<FqPoly>> },
    /// One point per residue class; order is irrelevant.
    Enumerated { points: Vec<Vec<ZqElem>> },
}

#[derive(Clone, Debug)]
pub struct BoxSpec {
    kind: BoxKind,
    n: usize,
    ring: ZqCtx,
    /// Enumerated boxes only: point index of each residue class.
    lookup: Vec<u32>,
}

impl BoxSpec {
    pub fn teichmuller(ring: &ZqCtx, n: usize) -> Self {
        Self::unchecked(ring, n, BoxKind::Teichmuller)
    }

    pub fn split(ring: &ZqCtx, digit_polys: Vec<Vec<FqPoly>>) -> Result<Self> {
        let n = digit_polys.len();
        for (j, levels) in digit_polys.iter().enumerate() {
            check_levels(ring, levels.len())?;
            if let Some(bad) = levels.iter().find(|g| g.arity() != 1) {
                return Err(Error::InvalidBox(format!(
                    "split coordinate {} has a digit polynomial of arity {}",
                    j + 1,
                    bad.arity()
                )));
            }
        }
        Ok(Self::unchecked(ring, n, BoxKind::Split { digit_polys }))
    }

    pub fn poly_defined(ring: &ZqCtx, n: usize, g: Vec<Vec<FqPoly>>) -> Result<Self> {
        check_levels(ring, g.len())?;
        for (i, row) in g.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidBox(format!(
                    "level {} lists {} polynomials for {n} coordinates",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|f| f.arity() != n) {
                return Err(Error::InvalidBox(format!(
                    "level {} polynomial has arity {}, expected {n}",
                    i + 1,
                    bad.arity()
                )));
            }
        }
        Ok(Self::unchecked(ring, n, BoxKind::PolyDefined { g }))
    }

    /// Rejects sets that do not reduce bijectively onto F_q^n, naming the
    /// missing and repeated residues.
    pub fn enumerated(ring: &ZqCtx, n: usize, points: Vec<Vec<ZqElem>>) -> Result<Self> {
        let field = ring.field();
        let total = num_points(field, n)?;
        let mut lookup = vec![u32::MAX; total as usize];
        let mut repeated = Vec::new();
        for (idx, pt) in points.iter().enumerate() {
            if pt.len() != n {
                return Err(Error::InvalidBox(format!(
                    "point {} has {} coordinates, expected {n}",
                    idx + 1,
                    pt.len()
                )));
            }
            let key = residue_index(ring, pt);
            if lookup[key as usize] != u32::MAX {
                repeated.push(key);
            } else {
                lookup[key as usize] = idx as u32;
            }
        }
        let missing: Vec<u64> = (0..total).filter(|&k| lookup[k as usize] == u32::MAX).collect();
        if !missing.is_empty() || !repeated.is_empty() {
            let show = |ks: &[u64]| -> String {
                let shown: Vec<String> = ks
                    .iter()
                    .take(8)
                    .map(|&k| {
                        let pt = point_from_index(field, n, k);
                        let cs: Vec<String> = pt.iter().map(|a| field.fmt_elem(a)).collect();
                        format!("({})", cs.join(", "))
                    })
                    .collect();
                let more = if ks.len() > 8 { format!(" and {} more", ks.len() - 8) } else { String::new() };
                format!("{}{more}", shown.join(" "))
            };
            return Err(Error::InvalidBox(format!(
                "not a system of representatives: missing [{}], repeated [{}]",
                show(&missing),
                show(&repeated)
            )));
        }
        let mut spec = Self::unchecked(ring, n, BoxKind::Enumerated { points });
        spec.lookup = lookup;
        Ok(spec)
    }

    fn unchecked(ring: &ZqCtx, n: usize, kind: BoxKind) -> Self {
        BoxSpec {
            kind,
            n,
            ring: ring.clone(),
            lookup: Vec::new(),
        }
    }

    pub fn kind(&self) -> &BoxKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &ZqCtx {
        &self.ring
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            BoxKind::Teichmuller => "teichmuller",
            BoxKind::Split { .. } => "split",
            BoxKind::PolyDefined { .. } => "poly",
            BoxKind::Enumerated { .. } => "enumerated",
        }
    }

    pub fn is_teichmuller(&self) -> bool {
        matches!(self.kind, BoxKind::Teichmuller)
    }

    /// The unique box point reducing to `x` modulo p.
    pub fn lift_point(&self, x: &[FqElem]) -> Result<Vec<ZqElem>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let ring = &self.ring;
        let tau: Vec<ZqElem> = x.iter().map(|a| ring.teichmuller_lift(a)).collect();
        match &self.kind {
            BoxKind::Teichmuller => Ok(tau),
            BoxKind::Split { digit_polys } => Ok(tau
                .iter()
                .zip(digit_polys)
                .zip(x)
                .map(|((t, levels), xj)| add_levels(ring, *t, levels, std::slice::from_ref(xj)))
                .collect()),
            BoxKind::PolyDefined { g } => Ok((0..self.n)
                .map(|j| {
                    let mut y = tau[j];
                    let mut pi = 1u64;
                    for row in g {
                        pi *= ring.p();
                        y = ring.add(&y, &ring.scale(pi, &eval_teich(ring, &row[j], x)));
                    }
                    y
                })
                .collect()),
            BoxKind::Enumerated { points } => {
                let key = crate::mpoly::index_of_point(ring.field(), x);
                let idx = self.lookup[key as usize];
                Ok(points[idx as usize].iter().map(|c| ring.truncate(c, ring.m())).collect())
            }
        }
    }
}

fn check_levels(ring: &ZqCtx, levels: usize) -> Result<()> {
    if levels + 1 > ring.m() as usize {
        return Err(Error::InvalidBox(format!(
            "{levels} digit levels above the Teichmuller level, but precision m = {} allows {}",
            ring.m(),
            ring.m() - 1
        )));
    }
    Ok(())
}

fn add_levels(ring: &ZqCtx, base: ZqElem, levels: &[FqPoly], x: &[FqElem]) -> ZqElem {
    let mut y = base;
    let mut pi = 1u64;
    for g in levels {
        pi *= ring.p();
        y = ring.add(&y, &ring.scale(pi, &eval_teich(ring, g, x)));
    }
    y
}

/// `G(tau X)` for the coefficientwise Teichmuller lift `G` of `g`, using
/// `tau(c) tau(x)^u = tau(c x^u)`.
pub fn eval_teich(ring: &ZqCtx, g: &FqPoly, x: &[FqElem]) -> ZqElem {
    let field = ring.field();
    let mut acc = ZqElem::ZERO;
    for (mono, c) in g.terms() {
        let mut v = *c;
        for (xi, &e) in x.iter().zip(mono.exps()) {
            if e > 0 {
                v = field.mul(&v, &field.pow(xi, e as u64));
            }
        }
        acc = ring.add(&acc, &ring.teichmuller_lift(&v));
    }
    acc
}

fn residue_index(ring: &ZqCtx, pt: &[ZqElem]) -> u64 {
    let x: Vec<FqElem> = pt.iter().map(|c| ring.reduce(c)).collect();
    crate::mpoly::index_of_point(ring.field(), &x)
}

/// The reduced representing polynomials of a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxAlgebra {
    pub n: usize,
    pub m: u32,
    /// `g[i - 1][j]` for levels `i` in `[1, m - 1]`.
    pub g: Vec<Vec<FqPoly>>,
}

impl BoxAlgebra {
    /// `deg(g_ij)`; level 0 is the coordinate itself.
    pub fn degree(&self, i: usize, j: usize) -> Degree {
        if i == 0 {
            Degree::Finite(1)
        } else {
            self.g[i - 1][j].total_degree()
        }
    }

    pub fn degree_profile(&self) -> Vec<Vec<Degree>> {
        self.g.iter().map(|row| row.iter().map(FqPoly::total_degree).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().flatten().all(FqPoly::is_zero)
    }

    /// The same box, described by its reduced polynomials.
    pub fn to_box(&self, ring: &ZqCtx) -> Result<BoxSpec> {
        BoxSpec::poly_defined(ring, self.n, self.g.clone())
    }
}

/// Extracts `g_ij` level by level: the residue mod p of the current
/// remainder is tabulated and interpolated, then its Teichmuller lift is
/// subtracted before dividing by p again.
pub fn interpolate_box(spec: &BoxSpec) -> Result<BoxAlgebra> {
    let ring = &spec.ring;
    let field = ring.field();
    let (n, m) = (spec.n, ring.m());
    let levels = m as usize - 1;
    if spec.is_teichmuller() {
        return Ok(BoxAlgebra {
            n,
            m,
            g: vec![vec![FqPoly::zero(n); n]; levels],
        });
    }
    let total = num_points(field, n)?;
    let points: Vec<Vec<FqElem>> = (0..total).map(|i| point_from_index(field, n, i)).collect();
    // rem[point][j] = (Y_j - tau(x_j) - ...) / p^i
    let mut rem: Vec<Vec<ZqElem>> = Vec::with_capacity(points.len());
    for x in &points {
        let y = spec.lift_point(x)?;
        rem.push(
            y.iter()
                .zip(x)
                .map(|(yj, xj)| ring.sub(yj, &ring.teichmuller_lift(xj)))
                .collect(),
        );
    }
    let mut g = Vec::with_capacity(levels);
    for level in 1..=levels {
        for r in rem.iter_mut().flatten() {
            *r = div_p(ring, r)?;
        }
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let table: Vec<FqElem> = rem.iter().map(|r| ring.reduce(&r[j])).collect();
            row.push(interpolate(field, n, &table)?);
        }
        if level < levels {
            for (x, r) in points.iter().zip(rem.iter_mut()) {
                for (j, rj) in r.iter_mut().enumerate() {
                    *rj = ring.sub(rj, &eval_teich(ring, &row[j], x));
                }
            }
        }
        g.push(row);
    }
    Ok(BoxAlgebra { n, m, g })
}

/// Exact division by p; the top digit becomes zero.
fn div_p(ring: &ZqCtx, a: &ZqElem) -> Result<ZqElem> {
    let p = ring.p() as i64;
    let cs = ring.coeffs(a);
    if let Some(bad) = cs.iter().find(|&&c| c % p as u64 != 0) {
        return Err(Error::Internal(format!("box remainder {bad} is not divisible by {p}")));
    }
    ring.elem(&cs.iter().map(|&c| c as i64 / p).collect::<Vec<_>>())
}

/// `g_j = sum_{i >= 1} p^(i-1) tau(g_ij)` as polynomials over Z_q / p^(m-1),
/// together with that ring. `None` when m = 1 (there is nothing above level 0).
pub fn combined_g(alg: &BoxAlgebra, ring: &ZqCtx) -> Result<Option<(ZqCtx, Vec<Poly<ZqElem>>)>> {
    if alg.m <= 1 {
        return Ok(None);
    }
    let low = ZqCtx::new(ring.field().clone(), alg.m - 1)?;
    let mut out = Vec::with_capacity(alg.n);
    for j in 0..alg.n {
        let mut acc = Poly::zero(alg.n);
        let mut pi = 1u64;
        for row in &alg.g {
            let lifted = row[j].map_coeffs(&low, |c| low.scale(pi, &low.teichmuller_lift(c)));
            acc = acc.add(&lifted, &low)?;
            pi *= ring.p();
        }
        out.push(acc);
    }
    Ok(Some((low, out)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxHypothesis {
    /// `deg(g_ij) <= p^(h floor(i / h))` for every level `i` in `[1, m - 1]`.
    Weak,
    /// Weak, and each `g_ij` depends on `x_j` alone.
    Split,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeViolation {
    /// Level `i` and coordinate `j`, both as in the text (`j` from 1).
    pub level: usize,
    pub coord: usize,
    pub degree: u64,
    pub allowed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxHypothesisReport {
    pub variant: BoxHypothesis,
    pub violations: Vec<DegreeViolation>,
    /// `(level, coord)` pairs whose polynomial involves another variable.
    pub not_split: Vec<(usize, usize)>,
}

impl BoxHypothesisReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
            && (self.variant == BoxHypothesis::Weak || self.not_split.is_empty())
    }
}

/// `p^(h floor(i / h))`.
pub fn weak_degree_cap(p: u64, h: usize, i: usize) -> u64 {
    p.pow((h * (i / h)) as u32)
}

pub fn check_box_hypothesis(alg: &BoxAlgebra, ring: &ZqCtx, variant: BoxHypothesis) -> BoxHypothesisReport {
    let (p, h) = (ring.p(), ring.h());
    let mut violations = Vec::new();
    let mut not_split = Vec::new();
    for (idx, row) in alg.g.iter().enumerate() {
        let level = idx + 1;
        let allowed = weak_degree_cap(p, h, level);
        for (j, g) in row.iter().enumerate() {
            if let Degree::Finite(d) = g.total_degree() {
                if d > allowed {
                    violations.push(DegreeViolation {
                        level,
                        coord: j + 1,
                        degree: d,
                        allowed,
                    });
                }
            }
            if g.support_vars().iter().any(|&v| v != j) {
                not_split.push((level, j + 1));
            }
        }
    }
    BoxHypothesisReport {
        variant,
        violations,
        not_split,
    }
}

/// Degrees of `g` grouped for display: `level -> [deg per coordinate]`.
pub fn degree_table(alg: &BoxAlgebra) -> BTreeMap<usize, Vec<String>> {
    alg.degree_profile()
        .into_iter()
        .enumerate()
        .map(|(i, row)| (i + 1, row.iter().map(|d| d.to_string()).collect()))
        .collect()
}
