//! Log-domain numerics for Denjoy–Carleman classes.
//!
//! * [`sequences`]: weight sequences, named families and their conditions.
//! * [`quasianalytic`]: Taylor propagation radius and step plan.
//! * [`gorny`]: the Cartan–Gorny intermediate-derivative bound.
//! * [`certify`]: class-membership certificates from sparse derivative bounds.
//! * [`counterexample`]: sequences that match `M` on sparse orders yet escape `C^M`.
//! * [`extremal`]: trigonometric series attaining prescribed derivative bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod counterexample;
pub mod extremal;
pub mod gorny;
pub mod logmath;
pub mod quasianalytic;
pub mod sequences;
pub mod serde_log;

pub use logmath::CMP_EPS;
