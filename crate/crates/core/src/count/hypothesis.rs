use serde::Serialize;

use super::{Instance, TeichExpansion};
use crate::boxes::BoxAlgebra;
use crate::mpoly::Degree;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongViolation {
    /// Constraint index, from 1.
    pub k: usize,
    /// Teichmuller level of the term.
    pub level: usize,
    pub exps: Vec<u32>,
    /// `|beta|`.
    pub shift: usize,
    pub degree: u64,
    pub allowed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StrongReport {
    pub violations: Vec<StrongViolation>,
}

impl StrongReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every term `a X^u` at level `i` of `f_k` and every way of assigning box
/// levels `beta` to the factors of `X^u` with `i + |beta| <= m_k - 1`, checks
/// `deg(a prod g_{beta, l}) <= d_k p^(h floor((i + |beta|) / h))`.
///
/// Only the largest degree for each `|beta|` matters, found by a knapsack over
/// the factors. Assignments that pick a zero `g` give the zero product and are skipped.
pub fn check_strong_hypothesis(inst: &Instance, alg: &BoxAlgebra, expansions: &[TeichExpansion]) -> StrongReport {
    let (p, h) = (inst.ring().p(), inst.ring().h());
    let mut violations = Vec::new();
    for (k, (c, exp)) in inst.system().iter().zip(expansions).enumerate() {
        for (level, _, exps) in exp.terms() {
            let max_shift = c.m as usize - 1 - level;
            let best = max_degree_by_shift(alg, &exps, max_shift);
            for (shift, deg) in best.iter().enumerate() {
                let Some(deg) = *deg else { continue };
                let allowed = c.d * p.pow((h * ((level + shift) / h)) as u32);
                if deg > allowed {
                    violations.push(StrongViolation {
                        k: k + 1,
                        level,
                        exps: exps.clone(),
                        shift,
                        degree: deg,
                        allowed,
                    });
                }
            }
        }
    }
    StrongReport { violations }
}

/// `best[b]`: largest `sum deg g_{beta_t, l_t}` over assignments with `|beta| = b`.
fn max_degree_by_shift(alg: &BoxAlgebra, exps: &[u32], max_shift: usize) -> Vec<Option<u64>> {
    let mut best: Vec<Option<u64>> = vec![None; max_shift + 1];
    best[0] = Some(0);
    for (l, &e) in exps.iter().enumerate() {
        let options: Vec<(usize, u64)> = (0..=max_shift)
            .filter_map(|beta| match alg.degree(beta, l) {
                Degree::Finite(d) => Some((beta, d)),
                Degree::NegInfinity => None,
            })
            .collect();
        for _ in 0..e {
            let mut next = vec![None; max_shift + 1];
            for (b, cur) in best.iter().enumerate() {
                let Some(cur) = cur else { continue };
                for &(beta, d) in &options {
                    if b + beta <= max_shift {
                        let cand = cur + d;
                        next[b + beta] = Some(next[b + beta].map_or(cand, |x: u64| x.max(cand)));
                    }
                }
            }
            best = next;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldCtx;
    use crate::mpoly::FqPoly;

    fn alg_with(g: Vec<Vec<FqPoly>>, n: usize, m: u32) -> BoxAlgebra {
        BoxAlgebra { n, m, g }
    }

    #[test]
    fn knapsack_picks_the_heaviest_assignment() {
        let f = FieldCtx::new(2, 1).unwrap();
        let x = |i| FqPoly::var(&f, i, 2);
        let quad = x(0).mul(&x(1), &f).unwrap().mul(&x(1), &f).unwrap();
        // level 1: deg 3 in coordinate 1, zero in coordinate 2; level 2: deg 1 both
        let alg = alg_with(vec![vec![quad, FqPoly::zero(2)], vec![x(0), x(1)]], 2, 3);
        let best = max_degree_by_shift(&alg, &[2, 1], 2);
        // |beta| = 0: 3 linear factors; 1: one g_1 on x1; 2: two g_1 on x1, or one g_2
        assert_eq!(best, vec![Some(3), Some(5), Some(7)]);
        let best = max_degree_by_shift(&alg, &[0, 1], 2);
        assert_eq!(best, vec![Some(1), None, Some(1)]);
    }
}
