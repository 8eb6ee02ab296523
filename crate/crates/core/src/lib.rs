//! Curvature tensors of Riemannian metrics given in closed form, and
//! classification into real space forms, quasi-Einstein, quasi-constant
//! curvature and Deszcz symmetric spaces.
//!
//! Pipeline: [`dsl`] parses a metric and evaluates exact second-order jets,
//! [`engine`] builds the curvature tensors at a point, [`classify`] labels the
//! point, [`sweep`] samples a chart and aggregates, and [`theorems`] turns the
//! labels into implication checks.

// `!(a < b)` deliberately rejects NaN; `Expr::add` and friends are
// constructors, not operator methods.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

pub mod catalog;
pub mod classify;
pub mod conventions;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod planes;
pub mod report;
pub mod sweep;
pub mod tensor;
pub mod theorems;
