//! Pointwise and aggregate classification.
//!
//! Every label is decided by a relative residual compared against
//! [`Tolerances::label`]; all residuals are kept so reports can show how
//! close each decision was.

mod aggregate;
mod config;
mod qcc;
mod spectrum;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate, ClassificationReport};
pub use config::{ClassifyConfig, Tolerances};
pub use qcc::{detect_qcc, lemma_residual, NotQcc, QccDiagnostics, QccStructure};
pub use spectrum::{ricci_spectrum, RicciCluster, RicciSpectrum};

use crate::engine::CurvaturePack;
use crate::error::Result;
use crate::tensor::{frobenius_norm, inner_product, DenseTensor, MetricAtPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Flat,
    ConstantCurvature,
    Einstein,
    QuasiEinstein,
    QuasiConstantCurvature,
    /// `C = 0` (`n ≥ 3`).
    ConformallyFlat,
    SemiSymmetric,
    Deszcz,
    RicciDeszcz,
    /// Two Ricci eigenvalues whose curvature functions are not distinct.
    CcBoundary,
    /// Three distinct Ricci eigenvalues in dimension 3.
    WildlyAnisotropic,
    /// None of the structural labels hold.
    Generic,
}

impl Label {
    pub const ALL: [Label; 12] = [
        Label::Flat,
        Label::ConstantCurvature,
        Label::Einstein,
        Label::QuasiEinstein,
        Label::QuasiConstantCurvature,
        Label::ConformallyFlat,
        Label::SemiSymmetric,
        Label::Deszcz,
        Label::RicciDeszcz,
        Label::CcBoundary,
        Label::WildlyAnisotropic,
        Label::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Label::Flat => "flat",
            Label::ConstantCurvature => "constant-curvature",
            Label::Einstein => "einstein",
            Label::QuasiEinstein => "quasi-einstein",
            Label::QuasiConstantCurvature => "quasi-constant-curvature",
            Label::ConformallyFlat => "conformally-flat",
            Label::SemiSymmetric => "semi-symmetric",
            Label::Deszcz => "deszcz",
            Label::RicciDeszcz => "ricci-deszcz",
            Label::CcBoundary => "cc-boundary",
            Label::WildlyAnisotropic => "wildly-anisotropic",
            Label::Generic => "generic",
        }
    }

    pub fn from_name(s: &str) -> Option<Label> {
        Label::ALL.into_iter().find(|l| l.name() == s)
    }

    fn is_structural(self) -> bool {
        matches!(
            self,
            Label::Flat
                | Label::ConstantCurvature
                | Label::Einstein
                | Label::QuasiEinstein
                | Label::QuasiConstantCurvature
                | Label::SemiSymmetric
                | Label::Deszcz
        )
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Relative residuals behind each label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `‖R‖`
    pub riemann: f64,
    /// `‖∧g·R‖ / (1 + ‖R‖)`
    pub tachibana: f64,
    /// `‖S − (τ/n) g‖ / (1 + ‖S‖)`
    pub einstein: f64,
    /// `‖C‖ / (1 + ‖R‖)`; absent for `n = 2`.
    pub weyl: Option<f64>,
    /// `‖R·R‖ / (1 + ‖R‖²)`
    pub semi_symmetric: f64,
    /// `‖R·R − L ∧g·R‖ / (1 + ‖R·R‖)`; absent where `∧g·R = 0`.
    pub deszcz: Option<f64>,
    /// `‖R·S − L ∧g·S‖ / (1 + ‖R·S‖)`
    pub ricci_deszcz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointClassification {
    pub point: Vec<f64>,
    pub dim: usize,
    pub labels: BTreeSet<Label>,
    pub residuals: Residuals,
    /// Fitted double sectional curvature; `None` where `∧g·R = 0`.
    pub l: Option<f64>,
    /// `c = τ / (n(n−1))` where the point has constant curvature.
    pub curvature: Option<f64>,
    pub tau: f64,
    pub spectrum: RicciSpectrum,
    pub qcc: Option<QccStructure>,
    pub not_qcc: Option<NotQcc>,
    /// Present at points with exactly two Ricci eigenvalues.
    pub lemma_residual: Option<f64>,
    /// Implications between labels that failed at this point.
    pub lattice_violations: Vec<String>,
}

impl PointClassification {
    pub fn has(&self, l: Label) -> bool {
        self.labels.contains(&l)
    }
}

/// Result of fitting `R·R = L ∧g·R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LFit {
    Fitted { l: f64, residual: f64 },
    /// `‖∧g·R‖` is below the cutoff: constant curvature, `L` undefined.
    TriviallyDeszcz,
}

/// Least-squares `L = ⟨R·R, ∧g·R⟩ / ⟨∧g·R, ∧g·R⟩` with residual
/// `‖R·R − L ∧g·R‖ / (1 + ‖R·R‖)`.
pub fn fit_l(rr: &DenseTensor, tach_r: &DenseTensor, g: &MetricAtPoint, cutoff: f64) -> Result<LFit> {
    let tt = inner_product(tach_r, tach_r, g)?;
    if tt.max(0.0).sqrt() <= cutoff {
        return Ok(LFit::TriviallyDeszcz);
    }
    let l = inner_product(rr, tach_r, g)? / tt;
    let diff = rr.axpy(-l, tach_r)?;
    Ok(LFit::Fitted {
        l,
        residual: frobenius_norm(&diff, g) / (1.0 + frobenius_norm(rr, g)),
    })
}

/// `‖R·S − L ∧g·S‖ / (1 + ‖R·S‖)`.
pub fn verify_ricci_deszcz(pack: &CurvaturePack, l: f64) -> f64 {
    let g = &pack.metric;
    let diff = pack.rs.axpy(-l, &pack.tach_s).expect("same shape");
    frobenius_norm(&diff, g) / (1.0 + frobenius_norm(&pack.rs, g))
}

/// Classify one point.
pub fn classify_point(pack: &CurvaturePack, cfg: &ClassifyConfig) -> Result<PointClassification> {
    let tol = cfg.tol;
    let g = &pack.metric;
    let n = pack.dim();
    let nf = n as f64;

    let r_norm = frobenius_norm(&pack.riemann, g);
    let tachibana = frobenius_norm(&pack.tach_r, g) / (1.0 + r_norm);
    let trace_free = DenseTensor::from_fn(n, 2, |i| pack.ricci.get(i).unwrap() - pack.tau / nf * g.g[(i[0], i[1])]);
    let einstein = frobenius_norm(&trace_free, g) / (1.0 + frobenius_norm(&pack.ricci, g));
    let weyl = pack.weyl.as_ref().map(|c| frobenius_norm(c, g) / (1.0 + r_norm));
    let semi_symmetric = frobenius_norm(&pack.rr, g) / (1.0 + r_norm * r_norm);

    let mut labels = BTreeSet::new();
    let mut add = |l: Label, ok: bool| {
        if ok {
            labels.insert(l);
        }
    };
    let cc = tachibana <= tol.label;
    add(Label::Flat, r_norm <= tol.label);
    add(Label::ConstantCurvature, cc);
    add(Label::Einstein, einstein <= tol.label);
    add(Label::ConformallyFlat, weyl.is_some_and(|w| w <= tol.label));
    add(Label::SemiSymmetric, semi_symmetric <= tol.label);

    let (l, deszcz) = match fit_l(&pack.rr, &pack.tach_r, g, tol.label * (1.0 + r_norm))? {
        LFit::TriviallyDeszcz => (None, None),
        LFit::Fitted { l, residual } => (Some(l), Some(residual)),
    };
    let is_deszcz = deszcz.is_none_or(|r| r <= tol.label);
    add(Label::Deszcz, is_deszcz);

    let l_ricci = match l {
        Some(l) if is_deszcz => l,
        _ => {
            let tt = inner_product(&pack.tach_s, &pack.tach_s, g)?;
            if tt > 0.0 {
                inner_product(&pack.rs, &pack.tach_s, g)? / tt
            } else {
                0.0
            }
        }
    };
    let ricci_deszcz = verify_ricci_deszcz(pack, l_ricci);
    add(Label::RicciDeszcz, ricci_deszcz <= tol.label);

    let spectrum = ricci_spectrum(&pack.ricci_op, g, tol.cluster)?;
    let clusters = spectrum.clusters.len();
    let (mut qcc, mut not_qcc, mut lemma) = (None, None, None);
    if clusters == 2 {
        add(Label::QuasiEinstein, true);
        let frame = spectrum.frame();
        lemma = Some(lemma_residual(&pack.riemann.in_frame(&frame), r_norm));
        match detect_qcc(pack, &spectrum, cfg) {
            Ok(s) => {
                add(Label::QuasiConstantCurvature, true);
                qcc = Some(s);
            }
            Err(e) => {
                add(Label::CcBoundary, matches!(e, NotQcc::NotDistinct { .. }));
                not_qcc = Some(e);
            }
        }
    }
    add(Label::WildlyAnisotropic, n == 3 && clusters >= 3);
    if !labels.iter().any(|l| l.is_structural()) {
        labels.insert(Label::Generic);
    }

    let mut pc = PointClassification {
        point: pack.point.clone(),
        dim: n,
        labels,
        residuals: Residuals {
            riemann: r_norm,
            tachibana,
            einstein,
            weyl,
            semi_symmetric,
            deszcz,
            ricci_deszcz,
        },
        l,
        curvature: cc.then(|| pack.tau / (nf * (nf - 1.0))),
        tau: pack.tau,
        spectrum,
        qcc,
        not_qcc,
        lemma_residual: lemma,
        lattice_violations: Vec::new(),
    };
    pc.lattice_violations = lattice_violations(&pc, &tol);
    Ok(pc)
}

/// Implications that must hold between the labels of one point.
pub fn lattice_violations(pc: &PointClassification, tol: &Tolerances) -> Vec<String> {
    use Label::*;
    let has = |l| pc.has(l);
    let n = pc.dim;
    let mut out = Vec::new();
    let mut need = |ok: bool, msg: &str| {
        if !ok {
            out.push(msg.to_string());
        }
    };
    need(!has(Flat) || has(ConstantCurvature), "flat without constant curvature");
    need(
        !has(ConstantCurvature) || (has(Einstein) && has(SemiSymmetric) && has(Deszcz)),
        "constant curvature without Einstein, semi-symmetric and Deszcz",
    );
    need(
        !has(SemiSymmetric) || (has(Deszcz) && pc.l.is_none_or(|l| l.abs() <= tol.check)),
        "semi-symmetric without Deszcz L = 0",
    );
    need(!has(Einstein) || !has(QuasiEinstein), "both Einstein and quasi-Einstein");
    need(!has(QuasiConstantCurvature) || has(QuasiEinstein), "quasi-constant curvature without quasi-Einstein");
    let boundary = has(CcBoundary);
    let cf = has(ConformallyFlat);
    if !boundary && (n == 3 || (n >= 4 && cf)) {
        need(
            has(QuasiEinstein) == has(QuasiConstantCurvature),
            "quasi-Einstein and quasi-constant curvature disagree",
        );
    }
    if n >= 4 && cf && has(Einstein) {
        need(has(ConstantCurvature), "conformally flat Einstein without constant curvature");
    }
    if n >= 3 && cf && has(Deszcz) && !boundary {
        need(
            has(ConstantCurvature) || has(QuasiConstantCurvature),
            "conformally flat Deszcz point is neither constant nor quasi-constant curvature",
        );
    }
    if let (Some(s), Some(l)) = (&pc.qcc, pc.l) {
        need(
            (l - s.k_bar).abs() <= tol.check * (1.0 + s.k_bar.abs()),
            "quasi-constant curvature with L different from K̄",
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_metric_source;
    use crate::engine::curvature_pack;

    fn classify(src: &str, p: &[f64]) -> PointClassification {
        let m = parse_metric_source(src).unwrap();
        classify_point(&curvature_pack(&m, p).unwrap(), &ClassifyConfig::default()).unwrap()
    }

    const SOL: &str = "dim = 3\ncoords = x, y, z\ng[1][1] = exp(2*z)\ng[2][2] = exp(-2*z)\ng[3][3] = 1";
    const S2XE1: &str = "dim = 3\ncoords = u, v, w\ng[1][1] = 1\ng[2][2] = sin(u)^2\ng[3][3] = 1";

    #[test]
    fn sol_point() {
        let pc = classify(SOL, &[0.1, -0.3, 0.2]);
        assert!(pc.lattice_violations.is_empty(), "{:?}", pc.lattice_violations);
        for l in [Label::QuasiEinstein, Label::QuasiConstantCurvature, Label::Deszcz, Label::RicciDeszcz] {
            assert!(pc.has(l), "missing {l}");
        }
        assert!(!pc.has(Label::SemiSymmetric));
        assert!((pc.l.unwrap() + 1.0).abs() < 1e-10);
        let s = pc.qcc.unwrap();
        assert_eq!(s.q, 1);
        assert!((s.k_bar + 1.0).abs() < 1e-10 && (s.k_perp - 1.0).abs() < 1e-10);
        assert!((s.diagnostics.tach_probe - 2.0).abs() < 1e-10);
        assert!((s.diagnostics.rr_probe + 2.0).abs() < 1e-10);
        assert_eq!(pc.spectrum.multiplicities(), vec![2, 1]);
    }

    #[test]
    fn s2xe1_point() {
        let pc = classify(S2XE1, &[1.0, 0.3, 0.0]);
        assert!(pc.lattice_violations.is_empty(), "{:?}", pc.lattice_violations);
        for l in [Label::SemiSymmetric, Label::Deszcz, Label::QuasiConstantCurvature, Label::ConformallyFlat] {
            assert!(pc.has(l), "missing {l}");
        }
        let s = pc.qcc.unwrap();
        assert!(s.k_bar.abs() < 1e-10 && (s.k_perp - 1.0).abs() < 1e-10);
    }

    #[test]
    fn flat_point() {
        let pc = classify("dim = 3\ncoords = x, y, z\ng[1][1] = 1\ng[2][2] = 1\ng[3][3] = 1", &[0.0; 3]);
        assert!(pc.has(Label::Flat) && pc.has(Label::ConstantCurvature) && pc.has(Label::Einstein));
        assert_eq!(pc.l, None);
        assert_eq!(pc.curvature, Some(0.0));
        assert!(!pc.has(Label::Generic));
    }

    #[test]
    fn three_clusters_in_dimension_three() {
        let pc = classify(
            "dim = 3\ncoords = x, y, z\ng[1][1] = 1\ng[2][2] = exp(2*x)\ng[3][3] = exp(4*x)",
            &[0.1, 0.2, 0.3],
        );
        assert!(pc.has(Label::WildlyAnisotropic) && pc.has(Label::Generic));
        assert!(!pc.has(Label::Deszcz));
        assert_eq!(pc.spectrum.clusters.len(), 3);
    }

    #[test]
    fn label_names_round_trip() {
        for l in Label::ALL {
            assert_eq!(Label::from_name(l.name()), Some(l));
            assert_eq!(serde_json::to_string(&l).unwrap(), format!("\"{}\"", l.name()));
        }
    }
}
