//! JSON instance files.
//!
//! ```json
//! {"p": 2, "h": 1, "m": 2, "n": 4,
//!  "box": {"kind": "poly", "g": [[[{"c": 1, "e": [1, 1, 1, 1]}, {"c": 1, "e": [0, 0, 0, 0]}], [], [], []]]},
//!  "polys": [{"terms": [{"c": 1, "e": [1, 0, 0, 0]}], "m": 2}]}
//! ```
//!
//! Coefficients are an integer or a list of coefficients in `1, t, ..., t^(h-1)`.
//! A polynomial is given either by `terms` over Z_q / p^m or by `levels`,
//! its Teichmuller digit polynomials over F_q.

use serde::{Deserialize, Serialize};

use crate::boxes::{BoxKind, BoxSpec};
use crate::count::Instance;
use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FqElem};
use crate::mpoly::{FqPoly, Poly};
use crate::zq::{ZqCtx, ZqElem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffRepr {
    Int(i64),
    List(Vec<i64>),
}

impl CoeffRepr {
    fn as_slice(&self) -> Vec<i64> {
        match self {
            CoeffRepr::Int(v) => vec![*v],
            CoeffRepr::List(v) => v.clone(),
        }
    }

    fn from_coeffs<T: Copy + Into<u64>>(cs: &[T]) -> Self {
        let mut v: Vec<i64> = cs.iter().map(|&c| c.into() as i64).collect();
        while v.len() > 1 && v.last() == Some(&0) {
            v.pop();
        }
        if v.len() == 1 {
            CoeffRepr::Int(v[0])
        } else {
            CoeffRepr::List(v)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRepr {
    pub c: CoeffRepr,
    pub e: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoxRepr {
    Teichmuller,
    /// `digit_polys[j][i - 1]`, univariate in `x_j` (exponent lists of length 1).
    Split { digit_polys: Vec<Vec<Vec<TermRepr>>> },
    /// `g[i - 1][j]` in all variables.
    Poly { g: Vec<Vec<Vec<TermRepr>>> },
    /// `points[k][j]`: coordinate `j` of the `k`-th point, as a ring element.
    Enumerated { points: Vec<Vec<CoeffRepr>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Vec<TermRepr>>>,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRepr {
    pub p: u64,
    pub h: usize,
    pub m: u32,
    pub n: usize,
    #[serde(rename = "box")]
    pub boxspec: BoxRepr,
    #[serde(default)]
    pub polys: Vec<PolyRepr>,
}

fn fq_poly(field: &FieldCtx, arity: usize, terms: &[TermRepr]) -> Result<FqPoly> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.e.len() != arity {
            return Err(Error::Parse(format!("exponent list {:?} has length {}, expected {arity}", t.e, t.e.len())));
        }
        out.push((t.e.clone(), field.elem(&t.c.as_slice())?));
    }
    Ok(Poly::from_terms(field, arity, out))
}

fn zq_poly(ring: &ZqCtx, arity: usize, terms: &[TermRepr]) -> Result<Poly<ZqElem>> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.e.len() != arity {
            return Err(Error::Parse(format!("exponent list {:?} has length {}, expected {arity}", t.e, t.e.len())));
        }
        out.push((t.e.clone(), ring.elem(&t.c.as_slice())?));
    }
    Ok(Poly::from_terms(ring, arity, out))
}

fn fq_terms(field: &FieldCtx, f: &FqPoly) -> Vec<TermRepr> {
    f.terms()
        .map(|(mono, c)| TermRepr {
            c: CoeffRepr::from_coeffs(field.coeffs(c)),
            e: mono.exps().to_vec(),
        })
        .collect()
}

fn zq_coeff(ring: &ZqCtx, c: &ZqElem) -> CoeffRepr {
    CoeffRepr::from_coeffs(ring.coeffs(c))
}

impl InstanceRepr {
    pub fn build(&self) -> Result<Instance> {
        let field = FieldCtx::new(self.p, self.h)?;
        let ring = ZqCtx::new(field.clone(), self.m)?;
        let n = self.n;
        let boxspec = match &self.boxspec {
            BoxRepr::Teichmuller => BoxSpec::teichmuller(&ring, n),
            BoxRepr::Split { digit_polys } => {
                if digit_polys.len() != n {
                    return Err(Error::Parse(format!("split box lists {} coordinates, n = {n}", digit_polys.len())));
                }
                let dp = digit_polys
                    .iter()
                    .map(|levels| levels.iter().map(|ts| fq_poly(&field, 1, ts)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                BoxSpec::split(&ring, dp)?
            }
            BoxRepr::Poly { g } => {
                let g = g
                    .iter()
                    .map(|row| row.iter().map(|ts| fq_poly(&field, n, ts)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                BoxSpec::poly_defined(&ring, n, g)?
            }
            BoxRepr::Enumerated { points } => {
                let pts = points
                    .iter()
                    .map(|pt| pt.iter().map(|c| ring.elem(&c.as_slice())).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                BoxSpec::enumerated(&ring, n, pts)?
            }
        };
        let mut polys = Vec::with_capacity(self.polys.len());
        for (k, pr) in self.polys.iter().enumerate() {
            let f = match (&pr.terms, &pr.levels) {
                (Some(ts), None) => zq_poly(&ring, n, ts)?,
                (None, Some(levels)) => {
                    let mut acc = Poly::zero(n);
                    let mut pi = 1u64;
                    for ts in levels {
                        let g = fq_poly(&field, n, ts)?;
                        let lifted = g.map_coeffs(&ring, |c| ring.scale(pi, &ring.teichmuller_lift(c)));
                        acc = acc.add(&lifted, &ring)?;
                        pi = pi.saturating_mul(self.p);
                    }
                    acc
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "polynomial {} needs exactly one of `terms` and `levels`",
                        k + 1
                    )))
                }
            };
            polys.push((f, pr.m, pr.d));
        }
        Instance::new(boxspec, polys)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let ring = inst.ring();
        let field = ring.field();
        let boxspec = match inst.boxspec().kind() {
            BoxKind::Teichmuller => BoxRepr::Teichmuller,
            BoxKind::Split { digit_polys } => BoxRepr::Split {
                digit_polys: digit_polys
                    .iter()
                    .map(|levels| levels.iter().map(|g| fq_terms(field, g)).collect())
                    .collect(),
            },
            BoxKind::PolyDefined { g } => BoxRepr::Poly {
                g: g.iter().map(|row| row.iter().map(|f| fq_terms(field, f)).collect()).collect(),
            },
            BoxKind::Enumerated { points } => BoxRepr::Enumerated {
                points: points
                    .iter()
                    .map(|pt| pt.iter().map(|c| zq_coeff(ring, c)).collect())
                    .collect(),
            },
        };
        let polys = inst
            .system()
            .iter()
            .map(|c| PolyRepr {
                terms: Some(
                    c.f.terms()
                        .map(|(mono, a)| TermRepr {
                            c: zq_coeff(ring, a),
                            e: mono.exps().to_vec(),
                        })
                        .collect(),
                ),
                levels: None,
                m: c.m,
                d: c.d_declared.then_some(c.d),
            })
            .collect();
        InstanceRepr {
            p: ring.p(),
            h: ring.h(),
            m: ring.m(),
            n: inst.n(),
            boxspec,
            polys,
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let repr: InstanceRepr = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    repr.build()
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string(&InstanceRepr::from_instance(inst)).expect("instance serializes")
}

/// Teichmuller digits of a field element as stored in files.
pub fn fq_coeff(field: &FieldCtx, a: &FqElem) -> CoeffRepr {
    CoeffRepr::from_coeffs(field.coeffs(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRODUCT_BOX: &str = r#"{"p": 2, "h": 1, "m": 2, "n": 4,
        "box": {"kind": "poly", "g": [[[{"c": 1, "e": [1, 1, 1, 1]}, {"c": 1, "e": [0, 0, 0, 0]}], [], [], []]]},
        "polys": [{"terms": [{"c": 1, "e": [1, 0, 0, 0]}, {"c": 1, "e": [0, 1, 0, 0]},
                             {"c": 1, "e": [0, 0, 1, 0]}, {"c": 1, "e": [0, 0, 0, 1]}], "m": 2}]}"#;

    #[test]
    fn parses_and_round_trips() {
        let inst = parse_instance(PRODUCT_BOX).unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.boxspec().kind_name(), "poly");
        let again = parse_instance(&instance_to_json(&inst)).unwrap();
        assert_eq!(instance_to_json(&again), instance_to_json(&inst));
        assert_eq!(again.system(), inst.system());
    }

    #[test]
    fn levels_form_matches_terms_form() {
        // 2 x1 over Z/4 is p * tau(1) x1
        let a = r#"{"p":2,"h":1,"m":2,"n":1,"box":{"kind":"teichmuller"},
                    "polys":[{"terms":[{"c":2,"e":[1]}],"m":2}]}"#;
        let b = r#"{"p":2,"h":1,"m":2,"n":1,"box":{"kind":"teichmuller"},
                    "polys":[{"levels":[[],[{"c":1,"e":[1]}]],"m":2}]}"#;
        assert_eq!(parse_instance(a).unwrap().system(), parse_instance(b).unwrap().system());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_instance("{"), Err(Error::Parse(_))));
        let wrong_arity = r#"{"p":2,"h":1,"m":1,"n":2,"box":{"kind":"teichmuller"},
                              "polys":[{"terms":[{"c":1,"e":[1]}],"m":1}]}"#;
        assert!(matches!(parse_instance(wrong_arity), Err(Error::Parse(_))));
        let zero = r#"{"p":2,"h":1,"m":1,"n":1,"box":{"kind":"teichmuller"},
                       "polys":[{"terms":[],"m":1}]}"#;
        assert!(matches!(parse_instance(zero), Err(Error::InvalidInstance(_))));
    }
}
