//! Exact workbench for R(p,q)-deformed calculus.
//!
//! The crate implements, on exact rational data:
//!
//! - deformation systems (five builtin quantum algebras plus a generic
//!   two-argument rational deformation function) with deformed numbers,
//!   factorials and binomials ([`algebra`]);
//! - exact Laurent polynomials in one and N variables, the representation
//!   space for every operator ([`laurent`]);
//! - graded operators, two-coefficient brackets, the deformed oscillator
//!   realization, central-extension evaluators and a closure analyzer that
//!   solves for bracket coefficients degree by degree ([`operator`],
//!   [`central`], [`closure`]);
//! - the graded shift operators `T_m^(a)`, `I_m^(a)`, their commutator
//!   closed forms, Levi-Civita n-brackets and grid-decomposition
//!   certificates ([`witt`]);
//! - complete Bell polynomials, Newton's-identity determinants and the
//!   `D_N` substitution identity ([`combinat`]);
//! - deformed Pochhammer symbols (finite, infinite, elliptic), theta and
//!   elliptic gamma products with certified truncation error, Gaussian
//!   densities and the Jackson-type integral ([`special`]);
//! - desk-scale eigenvalue ensembles: moment quadrature vs. closed form,
//!   partition sums, matrix constraint operators on Laurent polynomials and
//!   on truncated coupling series, and the toy-model constraint operators
//!   ([`matmodel`], [`toy`], [`series`]).
//!
//! All algebraic checks run on exact rationals; infinite products and
//! quadrature carry explicit truncation depths and tail bounds.

pub mod algebra;
pub mod central;
pub mod closure;
pub mod combinat;
pub mod error;
pub mod gradefn;
pub mod laurent;
pub mod matmodel;
pub mod operator;
pub mod rexpr;
pub mod rng;
pub mod scalar;
pub mod series;
pub mod special;
pub mod toy;
pub mod witt;

pub use algebra::{AlgebraKind, AlgebraSpec};
pub use error::Error;
pub use scalar::Rat;
