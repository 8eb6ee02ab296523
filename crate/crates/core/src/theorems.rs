//! Theorem checks as pointwise residual tests over classified metrics.
//!
//! Equivalences are tested extensionally: every check runs over a set of
//! concrete metrics and reports each direction separately. A PASS is a
//! confirmed instance, not a proof.

use std::fmt;

use serde::Serialize;

use crate::catalog::{self, CatalogEntry};
use crate::classify::{ClassificationReport, ClassifyConfig, Label, NotQcc, PointClassification, Tolerances};
use crate::error::Result;
use crate::sweep::classify_metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CheckId {
    T1,
    T2,
    T3,
    T4,
    #[serde(rename = "PROP")]
    Prop,
    TK,
    TL,
    #[serde(rename = "EQ1617")]
    Eq1617,
    #[serde(rename = "PROFILE")]
    Profile,
    TE,
    TF,
    TG,
    TH,
    TJ,
    #[serde(rename = "LEMMA")]
    Lemma,
}

impl CheckId {
    pub const ALL: [CheckId; 15] = [
        CheckId::T1,
        CheckId::T2,
        CheckId::T3,
        CheckId::T4,
        CheckId::Prop,
        CheckId::TK,
        CheckId::TL,
        CheckId::Eq1617,
        CheckId::Profile,
        CheckId::TE,
        CheckId::TF,
        CheckId::TG,
        CheckId::TH,
        CheckId::TJ,
        CheckId::Lemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::T1 => "T1",
            CheckId::T2 => "T2",
            CheckId::T3 => "T3",
            CheckId::T4 => "T4",
            CheckId::Prop => "PROP",
            CheckId::TK => "TK",
            CheckId::TL => "TL",
            CheckId::Eq1617 => "EQ1617",
            CheckId::Profile => "PROFILE",
            CheckId::TE => "TE",
            CheckId::TF => "TF",
            CheckId::TG => "TG",
            CheckId::TH => "TH",
            CheckId::TJ => "TJ",
            CheckId::Lemma => "LEMMA",
        }
    }

    /// Case-insensitive lookup.
    pub fn from_name(s: &str) -> Option<CheckId> {
        CheckId::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A metric under test.
#[derive(Debug, Clone)]
pub struct Subject {
    pub name: String,
    pub report: ClassificationReport,
    /// Known conformal flatness of the whole chart, independent of the
    /// numerical Weyl tensor.
    pub conformally_euclidean: Option<bool>,
}

impl Subject {
    pub fn from_catalog(entry: &CatalogEntry, samples: usize, cfg: &ClassifyConfig) -> Result<Subject> {
        Ok(Subject {
            name: entry.name.to_string(),
            report: classify_metric(&entry.metric, samples, cfg)?,
            conformally_euclidean: entry.expected.conformally_euclidean,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Arrow {
    #[serde(rename = "=>")]
    Forward,
    #[serde(rename = "<=")]
    Backward,
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arrow::Forward => "=>",
            Arrow::Backward => "<=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "NOT-APPLICABLE",
        })
    }
}

/// A point where a premise held and its conclusion failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub metric: String,
    pub point: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionResult {
    pub arrow: Arrow,
    pub statement: &'static str,
    pub status: Status,
    /// Points where the premise held.
    pub instances: usize,
    pub worst_residual: Option<f64>,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: CheckId,
    pub anchor: &'static str,
    pub statement: &'static str,
    pub status: Status,
    pub worst_residual: Option<f64>,
    pub metrics: Vec<String>,
    /// Metrics outside the check's hypotheses.
    pub excluded: Vec<String>,
    pub directions: Vec<DirectionResult>,
}

impl CheckResult {
    pub fn witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.directions.iter().flat_map(|d| &d.witnesses)
    }
}

/// Label formula evaluated at one point.
#[derive(Debug, Clone, Copy)]
enum Cond {
    Has(Label),
    Lacks(Label),
    All(&'static [Cond]),
    Any(&'static [Cond]),
    /// The subject's known conformal flatness.
    ConformallyEuclidean,
    Always,
}

/// `(holds, residual)` for a numeric predicate.
type NumericFn = fn(&Subject, &PointClassification, &Tolerances) -> (bool, Option<f64>, String);

#[derive(Clone, Copy)]
enum Pred {
    Cond(Cond),
    Numeric(NumericFn),
}

struct Direction {
    arrow: Arrow,
    statement: &'static str,
    premise: Pred,
    conclusion: Pred,
}

/// Executable form of one theorem.
pub struct TheoremCheck {
    pub id: CheckId,
    pub anchor: &'static str,
    pub statement: &'static str,
    /// Catalog entries with a non-vacuous premise, used when no metric is
    /// named.
    pub subset: &'static [&'static str],
    scope: fn(&Subject) -> bool,
    directions: Vec<Direction>,
}

fn label_residual(pc: &PointClassification, l: Label) -> Option<f64> {
    let r = &pc.residuals;
    match l {
        Label::Flat => Some(r.riemann),
        Label::ConstantCurvature => Some(r.tachibana),
        Label::Einstein => Some(r.einstein),
        Label::ConformallyFlat => r.weyl,
        Label::SemiSymmetric => Some(r.semi_symmetric),
        Label::Deszcz => Some(r.deszcz.unwrap_or(0.0)),
        Label::RicciDeszcz => Some(r.ricci_deszcz),
        Label::QuasiConstantCurvature => match (&pc.qcc, &pc.not_qcc) {
            (Some(s), _) => Some(s.model_residual),
            (None, Some(NotQcc::Model { residual, .. })) => Some(*residual),
            _ => None,
        },
        _ => None,
    }
}

fn eval_cond(c: &Cond, s: &Subject, pc: &PointClassification) -> (bool, Option<f64>, String) {
    match c {
        Cond::Has(l) => {
            let r = label_residual(pc, *l);
            let state = if pc.has(*l) { "holds" } else { "absent" };
            let detail = match r {
                Some(r) => format!("{l} {state} (residual {r:e})"),
                None => format!("{l} {state}"),
            };
            (pc.has(*l), r, detail)
        }
        Cond::Lacks(l) => (!pc.has(*l), None, format!("{l} {}", if pc.has(*l) { "holds" } else { "absent" })),
        Cond::Always => (true, None, "true".to_string()),
        Cond::ConformallyEuclidean => (
            s.conformally_euclidean == Some(true),
            None,
            "conformally Euclidean".to_string(),
        ),
        Cond::All(cs) | Cond::Any(cs) => {
            let parts: Vec<_> = cs.iter().map(|c| eval_cond(c, s, pc)).collect();
            let all = matches!(c, Cond::All(_));
            let ok = if all {
                parts.iter().all(|p| p.0)
            } else {
                parts.iter().any(|p| p.0)
            };
            // A disjunction is as good as its best branch that holds.
            let residual = if all {
                parts.iter().filter_map(|p| p.1).reduce(f64::max)
            } else {
                parts.iter().filter(|p| p.0 || !ok).filter_map(|p| p.1).reduce(f64::min)
            };
            let text: Vec<_> = parts.iter().map(|p| p.2.clone()).collect();
            (ok, residual, text.join(if all { " and " } else { " or " }))
        }
    }
}

fn eval_pred(p: &Pred, s: &Subject, pc: &PointClassification) -> (bool, Option<f64>, String) {
    match p {
        Pred::Cond(c) => eval_cond(c, s, pc),
        Pred::Numeric(f) => f(s, pc, &s.report.config.tol),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

fn has_qcc(_: &Subject, pc: &PointClassification, _: &Tolerances) -> (bool, Option<f64>, String) {
    (pc.qcc.is_some(), None, "quasi-constant-curvature".into())
}

fn prop_conclusion(_: &Subject, pc: &PointClassification, tol: &Tolerances) -> (bool, Option<f64>, String) {
    let s = pc.qcc.as_ref().expect("premise");
    match (pc.l, pc.residuals.deszcz) {
        (Some(l), Some(d)) => {
            let r = d.max(rel(l, s.k_bar));
            (r <= tol.check, Some(r), format!("L = {l}, K̄ = {}, Deszcz residual {d:e}", s.k_bar))
        }
        _ => (false, None, "L undefined at a quasi-constant-curvature point".into()),
    }
}

fn probe_conclusion(_: &Subject, pc: &PointClassification, tol: &Tolerances) -> (bool, Option<f64>, String) {
    let s = pc.qcc.as_ref().expect("premise");
    let d = &s.diagnostics;
    (
        d.probe_residual <= tol.check,
        Some(d.probe_residual),
        format!(
            "(∧g·R, R·R) probes = ({}, {}), expected ({}, {})",
            d.tach_probe,
            d.rr_probe,
            s.k_perp - s.k_bar,
            s.k_bar * (s.k_perp - s.k_bar)
        ),
    )
}

fn profile_conclusion(_: &Subject, pc: &PointClassification, tol: &Tolerances) -> (bool, Option<f64>, String) {
    let d = &pc.qcc.as_ref().expect("premise").diagnostics;
    let r = d
        .rho_residual
        .max(d.rho_perp_residual)
        .max(d.tau_residual)
        .max(d.profile_residual);
    (
        r <= tol.label && !d.profile_interior_extremum,
        Some(r),
        format!(
            "ρ {:e}, ρ⊥ {:e}, τ {:e}, profile {:e}, interior extremum {}",
            d.rho_residual, d.rho_perp_residual, d.tau_residual, d.profile_residual, d.profile_interior_extremum
        ),
    )
}

fn two_clusters_conformally_flat(_: &Subject, pc: &PointClassification, _: &Tolerances) -> (bool, Option<f64>, String) {
    (
        pc.has(Label::QuasiEinstein) && pc.has(Label::ConformallyFlat),
        None,
        "quasi-einstein and conformally-flat".into(),
    )
}

fn lemma_conclusion(_: &Subject, pc: &PointClassification, tol: &Tolerances) -> (bool, Option<f64>, String) {
    let r = pc.lemma_residual.expect("two Ricci eigenvalues");
    (
        r <= tol.label,
        Some(r),
        format!("largest frame component with three distinct indices {r:e}"),
    )
}

/// One of the three local models of a conformally flat semi-symmetric space.
fn szabo_model(s: &Subject, pc: &PointClassification, tol: &Tolerances) -> (bool, Option<f64>, String) {
    if pc.has(Label::ConstantCurvature) {
        return (true, label_residual(pc, Label::ConstantCurvature), "real space form".into());
    }
    let Some(q) = &pc.qcc else {
        return (false, None, "neither constant nor quasi-constant curvature".into());
    };
    let scale = 1.0 + q.k_perp.abs() + q.k.map_or(0.0, f64::abs);
    let mut r = q.k_bar.abs() / scale;
    let first = s.report.points.iter().find_map(|p| p.qcc.as_ref()).expect("this point");
    r = r.max(rel(q.k_perp, first.k_perp));
    let form = match q.k {
        Some(k) => {
            r = r.max((k + q.k_perp).abs() / scale);
            format!("M^{}({k}) x M^{}({})", q.q, pc.dim - q.q, q.k_perp)
        }
        None => format!("M^{}({}) x M^1", pc.dim - 1, q.k_perp),
    };
    (r <= tol.check, Some(r), format!("{form}, K̄ = {}", q.k_bar))
}

fn ricci_deszcz_conclusion(_: &Subject, pc: &PointClassification, tol: &Tolerances) -> (bool, Option<f64>, String) {
    let r = pc.residuals.ricci_deszcz;
    (
        r <= tol.check,
        Some(r),
        format!("‖R·S − L ∧g·S‖/(1 + ‖R·S‖) = {r:e} with L = {:?}", pc.l),
    )
}

use Cond::*;
use Label::*;

const QCC_SET: &[&str] = &["s2xe1", "h2xe1", "nil", "sol", "sl2r", "s2xh2", "s3xe1", "warped"];
const DIM3_SET: &[&str] = &[
    "e3", "s3", "h3", "s2xe1", "h2xe1", "nil", "sol", "sl2r", "warped", "hwarped", "generic3",
];
const DIM4_SET: &[&str] = &["e4", "s4", "h4", "s2xh2", "s3xe1", "generic4"];
const ALL_SET: &[&str] = &[
    "e3", "e4", "s3", "s4", "h3", "h4", "s2xe1", "h2xe1", "nil", "sol", "sl2r", "s2xh2", "s3xe1", "warped",
    "hwarped", "generic3", "generic4",
];

const CC_OR_QCC: Cond = Any(&[Has(ConstantCurvature), Has(QuasiConstantCurvature)]);

fn dim3(s: &Subject) -> bool {
    s.report.dim == 3
}
fn dim4(s: &Subject) -> bool {
    s.report.dim >= 4
}
fn dim3_fixed_mult(s: &Subject) -> bool {
    s.report.dim == 3 && s.report.multiplicity_constant
}
fn fixed_mult(s: &Subject) -> bool {
    s.report.dim >= 3 && s.report.multiplicity_constant
}
fn any_dim(s: &Subject) -> bool {
    s.report.dim >= 3
}

fn dir(arrow: Arrow, statement: &'static str, premise: Pred, conclusion: Pred) -> Direction {
    Direction {
        arrow,
        statement,
        premise,
        conclusion,
    }
}

use Arrow::{Backward, Forward};

pub fn check(id: CheckId) -> TheoremCheck {
    let c = Pred::Cond;
    let n = Pred::Numeric;
    let (anchor, statement, subset, scope, directions): (_, _, _, fn(&Subject) -> bool, _) = match id {
        CheckId::T1 => (
            "Theorem 1",
            "n >= 4: conformally Euclidean quasi-Einstein <=> quasi space form",
            DIM4_SET,
            dim4,
            vec![
                dir(
                    Forward,
                    "C = 0 and two Ricci eigenvalues => quasi-constant curvature",
                    c(All(&[Has(ConformallyFlat), Has(QuasiEinstein), Lacks(CcBoundary)])),
                    c(Has(QuasiConstantCurvature)),
                ),
                dir(
                    Backward,
                    "quasi-constant curvature => C = 0 and quasi-Einstein",
                    c(Has(QuasiConstantCurvature)),
                    c(All(&[Has(ConformallyFlat), Has(QuasiEinstein)])),
                ),
            ],
        ),
        CheckId::T2 => (
            "Theorem 2",
            "n = 3: quasi-Einstein <=> quasi space form",
            DIM3_SET,
            dim3,
            vec![
                dir(
                    Forward,
                    "two Ricci eigenvalues => quasi-constant curvature",
                    c(All(&[Has(QuasiEinstein), Lacks(CcBoundary)])),
                    c(Has(QuasiConstantCurvature)),
                ),
                dir(
                    Backward,
                    "quasi-constant curvature => quasi-Einstein",
                    c(Has(QuasiConstantCurvature)),
                    c(Has(QuasiEinstein)),
                ),
            ],
        ),
        CheckId::T3 => (
            "Theorem 3",
            "n = 3: Deszcz symmetric <=> real space form or quasi space form",
            DIM3_SET,
            dim3,
            vec![
                dir(
                    Forward,
                    "R·R = L ∧g·R => constant or quasi-constant curvature",
                    c(All(&[Has(Deszcz), Lacks(CcBoundary)])),
                    c(CC_OR_QCC),
                ),
                dir(Backward, "constant or quasi-constant curvature => Deszcz", c(CC_OR_QCC), c(Has(Deszcz))),
            ],
        ),
        CheckId::T4 => (
            "Theorem 4",
            "n >= 4, C = 0: Deszcz symmetric <=> real space form or quasi space form",
            DIM4_SET,
            dim4,
            vec![
                dir(
                    Forward,
                    "C = 0 and R·R = L ∧g·R => constant or quasi-constant curvature",
                    c(All(&[Has(ConformallyFlat), Has(Deszcz), Lacks(CcBoundary)])),
                    c(CC_OR_QCC),
                ),
                dir(
                    Backward,
                    "constant or quasi-constant curvature => C = 0 and Deszcz",
                    c(CC_OR_QCC),
                    c(All(&[Has(ConformallyFlat), Has(Deszcz)])),
                ),
            ],
        ),
        CheckId::Prop => (
            "Proposition",
            "quasi space forms M(K̄, K⊥) are Deszcz symmetric with L = K̄",
            QCC_SET,
            any_dim,
            vec![dir(
                Forward,
                "quasi-constant curvature => R·R = K̄ ∧g·R",
                n(has_qcc),
                n(prop_conclusion),
            )],
        ),
        CheckId::TK => (
            "Theorem K",
            "C = 0, R·R = 0 => M(c), M^q(c) x M^(n-q)(-c) or M^(n-1)(c) x curve",
            &["e3", "s3", "h3", "s2xe1", "h2xe1", "s2xh2", "s3xe1", "e4", "s4", "h4"],
            fixed_mult,
            vec![
                dir(
                    Forward,
                    "C = 0 and R·R = 0 => one of the three local models",
                    c(All(&[Has(ConformallyFlat), Has(SemiSymmetric)])),
                    n(szabo_model),
                ),
                dir(
                    Backward,
                    "one of the three local models => C = 0 and R·R = 0",
                    n(szabo_model),
                    c(All(&[Has(ConformallyFlat), Has(SemiSymmetric)])),
                ),
            ],
        ),
        CheckId::TL => (
            "Theorem L",
            "C = 0: R·R = L ∧g·R <=> R·S = L ∧g·S",
            ALL_SET,
            fixed_mult,
            vec![
                dir(
                    Forward,
                    "C = 0 and R·R = L ∧g·R => R·S = L ∧g·S with the same L",
                    c(All(&[Has(ConformallyFlat), Has(Deszcz)])),
                    n(ricci_deszcz_conclusion),
                ),
                dir(
                    Backward,
                    "C = 0 and R·S = L ∧g·S => R·R = L ∧g·R",
                    c(All(&[Has(ConformallyFlat), Has(RicciDeszcz)])),
                    c(Has(Deszcz)),
                ),
            ],
        ),
        CheckId::Eq1617 => (
            "Proposition, probe evaluations",
            "(∧g·R, R·R)(X̃,Y⊥,Y⊥,X̃; X,X⊥) = (K⊥ − K̄, K̄(K⊥ − K̄))",
            QCC_SET,
            any_dim,
            vec![dir(
                Forward,
                "quasi-constant curvature => probe values match",
                n(has_qcc),
                n(probe_conclusion),
            )],
        ),
        CheckId::Profile => (
            "Ricci curvatures of a quasi space form",
            "ρ = (q−1)K + q⊥K̄, ρ⊥ = qK̄ + (q⊥−1)K⊥, τ = qρ + q⊥ρ⊥, ρ(ψ) extremal only at ψ = 0, π/2",
            QCC_SET,
            any_dim,
            vec![dir(
                Forward,
                "quasi-constant curvature => Ricci bookkeeping and endpoint extrema",
                n(has_qcc),
                n(profile_conclusion),
            )],
        ),
        CheckId::TE => (
            "Theorem E",
            "n = 3: Einstein <=> real space form",
            DIM3_SET,
            dim3,
            vec![
                dir(Forward, "Einstein => constant curvature", c(Has(Einstein)), c(Has(ConstantCurvature))),
                dir(Backward, "constant curvature => Einstein", c(Has(ConstantCurvature)), c(Has(Einstein))),
            ],
        ),
        CheckId::TF => (
            "Theorem F",
            "n = 3, fixed multiplicities: Deszcz symmetric <=> Einstein or quasi-Einstein",
            DIM3_SET,
            dim3_fixed_mult,
            vec![
                dir(
                    Forward,
                    "R·R = L ∧g·R => at most two Ricci eigenvalues",
                    c(Has(Deszcz)),
                    c(Any(&[Has(Einstein), Has(QuasiEinstein)])),
                ),
                dir(
                    Backward,
                    "at most two Ricci eigenvalues => Deszcz",
                    c(Any(&[Has(Einstein), Has(QuasiEinstein)])),
                    c(Has(Deszcz)),
                ),
            ],
        ),
        CheckId::TG => (
            "Theorem G",
            "n = 3: C = 0",
            DIM3_SET,
            dim3,
            vec![dir(
                Forward,
                "dimension three => C = 0",
                c(Always),
                c(Has(ConformallyFlat)),
            )],
        ),
        CheckId::TH => (
            "Theorem H",
            "n >= 4: C = 0 <=> conformally Euclidean",
            &["e4", "s4", "h4", "s2xh2", "s3xe1"],
            dim4,
            vec![
                dir(Forward, "C = 0 => conformally Euclidean", c(Has(ConformallyFlat)), c(ConformallyEuclidean)),
                dir(Backward, "conformally Euclidean => C = 0", c(ConformallyEuclidean), c(Has(ConformallyFlat))),
            ],
        ),
        CheckId::TJ => (
            "Theorem J",
            "n >= 4: conformally Euclidean Einstein <=> real space form",
            DIM4_SET,
            dim4,
            vec![
                dir(
                    Forward,
                    "C = 0 and Einstein => constant curvature",
                    c(All(&[Has(ConformallyFlat), Has(Einstein)])),
                    c(Has(ConstantCurvature)),
                ),
                dir(
                    Backward,
                    "constant curvature => C = 0 and Einstein",
                    c(Has(ConstantCurvature)),
                    c(All(&[Has(ConformallyFlat), Has(Einstein)])),
                ),
            ],
        ),
        CheckId::Lemma => (
            "Lemma",
            "C = 0, two Ricci eigenvalues: R vanishes on eigenframe 4-tuples with three distinct members",
            QCC_SET,
            any_dim,
            vec![dir(
                Forward,
                "C = 0 and two Ricci eigenvalues => R(Ea, Eb, Ec, Ed) = 0",
                n(two_clusters_conformally_flat),
                n(lemma_conclusion),
            )],
        ),
    };
    TheoremCheck {
        id,
        anchor,
        statement,
        subset,
        scope,
        directions,
    }
}

fn fold_status(statuses: impl Iterator<Item = Status>) -> Status {
    let mut out = Status::NotApplicable;
    for s in statuses {
        match s {
            Status::Fail => return Status::Fail,
            Status::Pass => out = Status::Pass,
            Status::NotApplicable => {}
        }
    }
    out
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Witnesses kept per direction.
const MAX_WITNESSES: usize = 5;

impl TheoremCheck {
    /// Evaluate every direction at every point of every in-scope subject.
    pub fn run(&self, subjects: &[Subject]) -> CheckResult {
        let (inside, outside): (Vec<&Subject>, Vec<&Subject>) = subjects.iter().partition(|s| (self.scope)(s));
        let directions: Vec<DirectionResult> = self
            .directions
            .iter()
            .map(|d| {
                let mut instances = 0;
                let mut worst = None;
                let mut witnesses = Vec::new();
                let mut failed = false;
                for s in &inside {
                    for pc in &s.report.points {
                        if !eval_pred(&d.premise, s, pc).0 {
                            continue;
                        }
                        instances += 1;
                        let (ok, r, detail) = eval_pred(&d.conclusion, s, pc);
                        worst = max_opt(worst, r);
                        if !ok {
                            failed = true;
                            if witnesses.len() < MAX_WITNESSES {
                                witnesses.push(Witness {
                                    metric: s.name.clone(),
                                    point: pc.point.clone(),
                                    detail,
                                });
                            }
                        }
                    }
                }
                DirectionResult {
                    arrow: d.arrow,
                    statement: d.statement,
                    status: match (instances, failed) {
                        (0, _) => Status::NotApplicable,
                        (_, true) => Status::Fail,
                        _ => Status::Pass,
                    },
                    instances,
                    worst_residual: worst,
                    witnesses,
                }
            })
            .collect();
        CheckResult {
            id: self.id,
            anchor: self.anchor,
            statement: self.statement,
            status: fold_status(directions.iter().map(|d| d.status)),
            worst_residual: directions.iter().fold(None, |a, d| max_opt(a, d.worst_residual)),
            metrics: inside.iter().map(|s| s.name.clone()).collect(),
            excluded: outside.iter().map(|s| s.name.clone()).collect(),
            directions,
        }
    }

    /// Classify the default catalog subset.
    pub fn default_subjects(&self, samples: usize, cfg: &ClassifyConfig) -> Result<Vec<Subject>> {
        self.subset
            .iter()
            .map(|name| {
                let e = catalog::get(name).expect("subset names are catalog entries");
                Subject::from_catalog(&e, samples, cfg)
            })
            .collect()
    }
}

pub fn run_check(id: CheckId, subjects: &[Subject]) -> CheckResult {
    check(id).run(subjects)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subject(name: &str) -> Subject {
        Subject::from_catalog(&catalog::get(name).unwrap(), 8, &ClassifyConfig::default()).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(CheckId::from_name(id.name()), Some(id));
            assert_eq!(CheckId::from_name(&id.name().to_lowercase()), Some(id));
        }
        assert_eq!(CheckId::from_name("T9"), None);
    }

    #[test]
    fn subsets_name_catalog_entries() {
        let names = catalog::names_list();
        for id in CheckId::ALL {
            for s in check(id).subset {
                assert!(names.contains(s), "{id}: {s}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_not_applicable() {
        let g4 = subject("generic4");
        let r = run_check(CheckId::T3, std::slice::from_ref(&g4));
        assert_eq!(r.status, Status::NotApplicable);
        assert_eq!(r.excluded, vec!["generic4".to_string()]);
        let r = run_check(CheckId::TF, &[g4]);
        assert_eq!(r.status, Status::NotApplicable);
    }

    #[test]
    fn failing_direction_carries_a_witness() {
        // generic4 has C != 0, so a false conformal-flatness flag must fail.
        let mut s = subject("generic4");
        s.conformally_euclidean = Some(true);
        let r = run_check(CheckId::TH, &[s]);
        assert_eq!(r.status, Status::Fail);
        assert!(r.witnesses().next().is_some());
        assert_eq!(r.directions[1].status, Status::Fail);
    }

    #[test]
    fn sol_proposition_passes() {
        let r = run_check(CheckId::Prop, &[subject("sol")]);
        assert_eq!(r.status, Status::Pass);
        assert!(r.worst_residual.unwrap() <= 1e-8);
    }
}
