//! Metric definition front end: expression parsing, jet evaluation and the
//! metric file format.

mod expr;
mod jet;
mod metric;
mod parser;

pub use expr::{BinOp, Expr, ExprDisplay, Func};
pub use jet::{eval_jet2, eval_value, Jet2};
pub use metric::{parse_metric_source, MetricField, MetricJets, DEFAULT_DOMAIN};
pub use parser::{parse_expr, parse_expr_at};
