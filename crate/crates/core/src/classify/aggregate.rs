use std::collections::BTreeSet;

use super::{ClassifyConfig, Label, PointClassification};
use crate::error::{GeometryError, Result};

/// Classification over a point sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub dim: usize,
    pub points: Vec<PointClassification>,
    /// Labels that hold at every sampled point.
    pub labels: BTreeSet<Label>,
    /// Mean `L` when the space is Deszcz and `L` is constant over the sample.
    /// Constant-curvature samples, where `L` is undefined, report `0`.
    pub constant_type: Option<f64>,
    /// Range of the defined pointwise `L` values.
    pub l_range: Option<(f64, f64)>,
    /// `max |L − mean L|` over the sample.
    pub l_spread: Option<f64>,
    /// Whether the Ricci multiplicities agree at every point.
    pub multiplicity_constant: bool,
    pub notes: Vec<String>,
    pub config: ClassifyConfig,
}

impl ClassificationReport {
    pub fn has(&self, l: Label) -> bool {
        self.labels.contains(&l)
    }
}

/// Fold pointwise classifications in point order.
pub fn aggregate(points: Vec<PointClassification>, cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    let first = points.first().ok_or(GeometryError::EmptySample)?;
    let dim = first.dim;
    let mut labels = first.labels.clone();
    for p in &points[1..] {
        labels.retain(|l| p.labels.contains(l));
    }
    let mut notes = Vec::new();

    let mults = first.spectrum.multiplicities();
    let multiplicity_constant = points.iter().all(|p| p.spectrum.multiplicities() == mults);
    if !multiplicity_constant {
        labels.remove(&Label::QuasiEinstein);
        labels.remove(&Label::QuasiConstantCurvature);
        notes.push("non-constant multiplicity: Ricci multiplicities vary across the sample".into());
    }
    let boundary = points.iter().filter(|p| p.has(Label::CcBoundary)).count();
    if boundary > 0 {
        notes.push(format!("{boundary} point(s) where the curvature functions are not distinct"));
    }
    let violations = points.iter().filter(|p| !p.lattice_violations.is_empty()).count();
    if violations > 0 {
        notes.push(format!("{violations} point(s) violate label implications"));
    }

    let ls: Vec<f64> = points.iter().filter_map(|p| p.l).collect();
    let l_range = (!ls.is_empty()).then(|| {
        ls.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)))
    });
    let (constant_type, l_spread) = if ls.is_empty() {
        (labels.contains(&Label::Deszcz).then_some(0.0), None)
    } else {
        let mean = ls.iter().sum::<f64>() / ls.len() as f64;
        let spread = ls.iter().map(|l| (l - mean).abs()).fold(0.0, f64::max);
        let constant = labels.contains(&Label::Deszcz) && spread <= cfg.tol.constant * (1.0 + mean.abs());
        (constant.then_some(mean), Some(spread))
    };

    Ok(ClassificationReport {
        dim,
        points,
        labels,
        constant_type,
        l_range,
        l_spread,
        multiplicity_constant,
        notes,
        config: *cfg,
    })
}
