//! Exact computer algebra for the mod-p motivic Steenrod algebra and its
//! dual over the universal bigraded coefficient ring `F_p[tau, rho]`.
//!
//! The crate provides:
//!
//! - [`coeff`]: sparse exact arithmetic in `F_p[tau, rho]` with base-mode
//!   specializations of `tau` and `rho`;
//! - [`dual`]: the dual algebra `A_{*,*}` on Milnor monomials, with the
//!   exotic characteristic-2 relation, the coproduct, and the
//!   Hopf-algebroid coefficient-crossing rule;
//! - [`op`]: the operation algebra `A^{*,*}` in the Milnor basis, with all
//!   products computed by dualization, the comultiplication, and the
//!   closed Cartan forms;
//! - [`bmu`]: the cohomology of `B mu_p` as a truncated module with its
//!   coaction, operation actions, and the power-series identities relating
//!   the two;
//! - [`margolis`]: Margolis homology of finite bigraded modules by exact
//!   (fraction-free) elimination;
//! - [`parse`]: the expression grammars used by the command line;
//! - [`verify`]: the axiom-verification suites.

pub mod bmu;
pub mod coeff;
pub mod dual;
pub mod error;
pub mod margolis;
pub mod op;
pub mod parse;
pub mod verify;

pub use coeff::{BaseMode, Bidegree, Coeff, Homogeneity};
pub use dual::{Algebra, Crossing, DualElement, DualTensor, Gen, Monomial};
pub use error::{Error, Result};
pub use op::{CartanKind, OpElement, OpTensor};
