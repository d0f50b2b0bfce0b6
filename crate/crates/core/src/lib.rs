//! Point counting over finite Witt rings, restricted to combinatorial boxes,
//! with p-adic divisibility checks.

pub mod boxes;
pub mod count;
pub mod error;
pub mod ff;
pub mod instance;
pub mod mpoly;
pub mod ring;
pub mod suite;
pub mod witt;
pub mod zq;

pub use boxes::{BoxAlgebra, BoxKind, BoxSpec};
pub use count::{CountOptions, CountReport, FqSystem, Instance, Tier, Verdict};
pub use error::{Error, ErrorClass, Result};
pub use ff::{FieldCtx, FqElem};
pub use mpoly::{Degree, FqPoly, IntPoly, Monomial, Poly};
pub use ring::{Integers, Ring};
pub use zq::{DigitVector, ZqCtx, ZqElem};
