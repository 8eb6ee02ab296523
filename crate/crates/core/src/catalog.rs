//! Built-in metrics with known curvature, and the ground truth the
//! classifier is expected to reproduce on them.

use std::f64::consts::PI;

use serde::Serialize;

use crate::classify::{ClassificationReport, Label};
use crate::dsl::{eval_value, parse_metric_source, Expr, MetricField};
use crate::error::MetricError;

/// Polar angles stay this far from the coordinate singularities.
const POLAR_MARGIN: f64 = 0.2;
/// Relative tolerance on expected scalars.
pub const SCALAR_TOL: f64 = 1e-7;

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Stated in the published literature.
    Published,
    /// Computed independently (closed form or brute force).
    Derived,
    /// Immediate from the definitions.
    Elementary,
}

/// Quasi-constant-curvature constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QccConstants {
    pub q: usize,
    pub k: Option<f64>,
    pub k_perp: f64,
    pub k_bar: f64,
}

/// Verdict on the double sectional curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeExpect {
    /// Deszcz of constant type `L`.
    Constant(f64),
    /// Deszcz with non-constant `L`.
    NonConstant,
    NotDeszcz,
}

/// `(K̄, K⊥)` as functions of the chart point.
pub type QccOracle = fn(&[f64]) -> (f64, f64);

#[derive(Debug, Clone, Serialize)]
pub struct Expected {
    /// Must hold at every sample point.
    pub labels: Vec<Label>,
    /// Must fail somewhere (checked on the aggregate).
    pub absent: Vec<Label>,
    /// Constant sectional curvature.
    pub curvature: Option<f64>,
    pub qcc: Option<QccConstants>,
    #[serde(skip)]
    pub qcc_oracle: Option<QccOracle>,
    pub constant_type: TypeExpect,
    /// Known conformal flatness, for `n ≥ 4`.
    pub conformally_euclidean: Option<bool>,
    pub provenance: Provenance,
    pub note: &'static str,
}

impl Expected {
    /// Every way `report` disagrees with this ground truth.
    pub fn mismatches(&self, report: &ClassificationReport) -> Vec<String> {
        let mut out = Vec::new();
        let close = |a: f64, b: f64| (a - b).abs() <= SCALAR_TOL * (1.0 + b.abs());
        for l in &self.labels {
            if !report.has(*l) {
                out.push(format!("missing label {l}"));
            }
        }
        for l in &self.absent {
            if report.has(*l) {
                out.push(format!("unexpected label {l}"));
            }
        }
        for p in &report.points {
            let at = format!("{:?}", p.point);
            if let Some(c) = self.curvature {
                match p.curvature {
                    Some(v) if close(v, c) => {}
                    other => out.push(format!("curvature {other:?} != {c} at {at}")),
                }
            }
            let want = self.qcc.map(|c| (c.q, c.k, c.k_bar, c.k_perp)).or_else(|| {
                self.qcc_oracle.map(|f| {
                    let (kb, kp) = f(&p.point);
                    (1, None, kb, kp)
                })
            });
            if let Some((q, k, kb, kp)) = want {
                match &p.qcc {
                    Some(s) => {
                        let k_ok = match (k, s.k) {
                            (Some(a), Some(b)) => close(b, a),
                            (None, None) => true,
                            _ => false,
                        };
                        if s.q != q || !k_ok || !close(s.k_bar, kb) || !close(s.k_perp, kp) {
                            out.push(format!(
                                "qcc (q={}, K={:?}, K̄={}, K⊥={}) != (q={q}, K={k:?}, K̄={kb}, K⊥={kp}) at {at}",
                                s.q, s.k, s.k_bar, s.k_perp
                            ));
                        }
                    }
                    None => out.push(format!("no qcc structure at {at}")),
                }
            }
        }
        match (self.constant_type, report.constant_type) {
            (TypeExpect::Constant(l), Some(v)) if close(v, l) => {}
            (TypeExpect::NonConstant, None) if report.has(Label::Deszcz) => {}
            (TypeExpect::NotDeszcz, None) if !report.has(Label::Deszcz) => {}
            (want, got) => out.push(format!("constant type {got:?}, expected {want:?}")),
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub metric: MetricField,
    pub expected: Expected,
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn source(coords: &[String], comps: &[((usize, usize), String)], domain: &[(f64, f64)]) -> String {
    let mut s = format!("dim = {}\ncoords = {}\n", coords.len(), coords.join(", "));
    for (c, (lo, hi)) in coords.iter().zip(domain) {
        s += &format!("domain {c} = [{lo}, {hi}]\n");
    }
    for ((i, j), e) in comps {
        s += &format!("g[{}][{}] = {e}\n", i + 1, j + 1);
    }
    s
}

fn build(coords: &[String], comps: &[((usize, usize), String)], domain: &[(f64, f64)]) -> MetricField {
    parse_metric_source(&source(coords, comps, domain)).expect("catalog metric is well formed")
}

/// `δ` on the chart `coords`.
pub fn flat(coords: &[String]) -> MetricField {
    let comps: Vec<_> = (0..coords.len()).map(|i| ((i, i), "1".to_string())).collect();
    build(coords, &comps, &vec![(-1.0, 1.0); coords.len()])
}

/// Round sphere of curvature `c > 0` in polar coordinates.
pub fn sphere(coords: &[String], c: f64) -> MetricField {
    assert!(c > 0.0);
    let r2 = 1.0 / c;
    let mut comps = Vec::new();
    let mut factor = format!("{r2}");
    for (i, c) in coords.iter().enumerate() {
        comps.push(((i, i), factor.clone()));
        factor = format!("{factor}*sin({c})^2");
    }
    build(coords, &comps, &vec![(POLAR_MARGIN, PI - POLAR_MARGIN); coords.len()])
}

/// `4δ/(1 + c|x|²)²`, curvature `c < 0` on the ball `|x|² < −1/c`.
pub fn poincare_ball(coords: &[String], c: f64) -> MetricField {
    assert!(c < 0.0);
    let sq: Vec<String> = coords.iter().map(|x| format!("{x}^2")).collect();
    let e = format!("4/(1 - {}*({}))^2", -c, sq.join(" + "));
    let comps: Vec<_> = (0..coords.len()).map(|i| ((i, i), e.clone())).collect();
    let r = 0.4 / (-c).sqrt();
    build(coords, &comps, &vec![(-r, r); coords.len()])
}

/// Upper half-plane `(dx² + dy²)/(−c y²)`, curvature `c < 0`.
pub fn half_plane(x: &str, y: &str, c: f64) -> MetricField {
    assert!(c < 0.0);
    let e = format!("{}/{y}^2", -1.0 / c);
    let coords = [x.to_string(), y.to_string()];
    build(&coords, &[((0, 0), e.clone()), ((1, 1), e)], &[(-1.0, 1.0), (0.5, 2.0)])
}

/// Space form `M^n(c)`: identity chart, polar sphere chart, or Poincaré ball.
pub fn make_space_form(n: usize, c: f64) -> MetricField {
    assert!(n >= 2, "space forms need n >= 2");
    if c == 0.0 {
        flat(&names("x", n))
    } else if c > 0.0 {
        sphere(&names("a", n), c)
    } else {
        poincare_ball(&names("x", n), c)
    }
}

pub fn make_product(a: &MetricField, b: &MetricField) -> Result<MetricField, MetricError> {
    MetricField::product(a, b)
}

/// `a × E¹` with the line coordinate `t` on `[−1, 1]`.
pub fn times_line(a: &MetricField, t: &str) -> Result<MetricField, MetricError> {
    let n = a.dim();
    let mut comps = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for i in 0..=n {
        for j in 0..=i {
            comps.push(match (i == n, j == n) {
                (false, _) => a.component(i, j).clone(),
                (true, true) => Expr::num(1.0),
                (true, false) => Expr::num(0.0),
            });
        }
    }
    let coords = a.coords().iter().cloned().chain([t.to_string()]).collect();
    let domain = a.domain().iter().copied().chain([(-1.0, 1.0)]).collect();
    MetricField::from_lower(coords, comps, domain)
}

/// The left-invariant metrics on the non-isotropic Thurston groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Thurston {
    /// `dx² + dy² + (dz − x dy)²`
    Nil,
    /// `e^{2z} dx² + e^{−2z} dy² + dz²`
    Sol,
    /// `(dx² + dy²)/y² + (dz + dx/y)²` on the upper half-plane times a line.
    Sl2r,
}

pub fn make_thurston(t: Thurston) -> MetricField {
    let xyz: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let s = |v: &str| v.to_string();
    match t {
        Thurston::Nil => build(
            &xyz,
            &[((0, 0), s("1")), ((1, 1), s("1 + x^2")), ((2, 1), s("-x")), ((2, 2), s("1"))],
            &[(-1.0, 1.0); 3],
        ),
        Thurston::Sol => build(
            &xyz,
            &[((0, 0), s("exp(2*z)")), ((1, 1), s("exp(-2*z)")), ((2, 2), s("1"))],
            &[(-1.0, 1.0); 3],
        ),
        Thurston::Sl2r => build(
            &xyz,
            &[((0, 0), s("2/y^2")), ((1, 1), s("1/y^2")), ((2, 0), s("1/y")), ((2, 2), s("1"))],
            &[(-1.0, 1.0), (0.5, 2.0), (-1.0, 1.0)],
        ),
    }
}

/// `dt² + f(t)² g_k` with `g_k` a space form of curvature `k` in `n − 1`
/// dimensions. `f` is an expression in `Var(0) = t`.
pub fn make_warped(f: &Expr, k: f64, n: usize, t_range: (f64, f64)) -> Result<MetricField, MetricError> {
    if n < 3 {
        return Err(MetricError::Dimension(n));
    }
    if f.max_var().is_some_and(|v| v > 0) {
        return Err(MetricError::Invalid("warping function may only depend on t".into()));
    }
    for i in 0..=64 {
        let t = t_range.0 + (t_range.1 - t_range.0) * i as f64 / 64.0;
        let v = eval_value(f, &[t]).map_err(|e| MetricError::Invalid(e.to_string()))?;
        if !(v > 0.0) {
            return Err(MetricError::Invalid(format!("warping function is not positive at t = {t}")));
        }
    }
    let fiber_coords = names("x", n - 1);
    let fiber = if k == 0.0 {
        flat(&fiber_coords)
    } else if k > 0.0 {
        sphere(&fiber_coords, k)
    } else {
        poincare_ball(&fiber_coords, k)
    };
    let f2 = Expr::pow(f.clone(), Expr::num(2.0));
    let mut comps = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            comps.push(match (i, j) {
                (0, 0) => Expr::num(1.0),
                (0, _) | (_, 0) => Expr::num(0.0),
                _ => {
                    let e = fiber.component(i - 1, j - 1);
                    if e.is_zero_literal() {
                        Expr::num(0.0)
                    } else {
                        Expr::mul(f2.clone(), e.shift_vars(1))
                    }
                }
            });
        }
    }
    let coords = std::iter::once("t".to_string()).chain(fiber_coords).collect();
    let domain = std::iter::once(t_range).chain(fiber.domain().iter().copied()).collect();
    MetricField::from_lower(coords, comps, domain)
}

/// Fixed 4D negative control: `diag(1, 1 + w², 1 + x², 1 + y²)` plus
/// `g_wx = 0.3 sin(y)`.
pub fn make_generic4() -> MetricField {
    let coords: Vec<String> = ["w", "x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let s = |v: &str| v.to_string();
    build(
        &coords,
        &[
            ((0, 0), s("1")),
            ((1, 0), s("0.3*sin(y)")),
            ((1, 1), s("1 + w^2")),
            ((2, 2), s("1 + x^2")),
            ((3, 3), s("1 + y^2")),
        ],
        &[(-1.0, 1.0); 4],
    )
}

/// `dx² + e^{2x} dy² + e^{4x} dz²`: three distinct Ricci curvatures.
pub fn make_generic3() -> MetricField {
    let xyz: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    build(
        &xyz,
        &[((0, 0), "1".into()), ((1, 1), "exp(2*x)".into()), ((2, 2), "exp(4*x)".into())],
        &[(-1.0, 1.0); 3],
    )
}

fn warped_sin_oracle(p: &[f64]) -> (f64, f64) {
    let t = p[0];
    let f = 2.0 + t.sin();
    (t.sin() / f, -(t.cos() * t.cos()) / (f * f))
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn space_form_expected(n: usize, c: f64) -> Expected {
    use Label::*;
    let mut labels = vec![ConstantCurvature, Einstein, ConformallyFlat, SemiSymmetric, Deszcz, RicciDeszcz];
    let mut absent = vec![QuasiEinstein, QuasiConstantCurvature, Generic];
    if c == 0.0 {
        labels.push(Flat);
    } else {
        absent.push(Flat);
    }
    Expected {
        labels,
        absent,
        curvature: Some(c),
        qcc: None,
        qcc_oracle: None,
        constant_type: TypeExpect::Constant(0.0),
        conformally_euclidean: (n >= 4).then_some(true),
        provenance: if c == 0.0 { Provenance::Elementary } else { Provenance::Published },
        note: "R = cG",
    }
}

#[allow(clippy::too_many_arguments)]
fn qcc_expected(
    q: usize,
    k: Option<f64>,
    k_bar: f64,
    k_perp: f64,
    semi: bool,
    n: usize,
    provenance: Provenance,
    note: &'static str,
) -> Expected {
    use Label::*;
    let mut labels = vec![QuasiEinstein, QuasiConstantCurvature, ConformallyFlat, Deszcz, RicciDeszcz];
    let mut absent = vec![ConstantCurvature, Einstein, Flat, Generic];
    if semi {
        labels.push(SemiSymmetric);
    } else {
        absent.push(SemiSymmetric);
    }
    Expected {
        labels,
        absent,
        curvature: None,
        qcc: Some(QccConstants { q, k, k_perp, k_bar }),
        qcc_oracle: None,
        constant_type: TypeExpect::Constant(k_bar),
        conformally_euclidean: (n >= 4).then_some(true),
        provenance,
        note,
    }
}

/// All built-in entries, in listing order.
pub fn entries() -> Vec<CatalogEntry> {
    use Label::*;
    let mut out = Vec::new();
    for (name, n, c, description) in [
        ("e3", 3, 0.0, "Euclidean space E3"),
        ("e4", 4, 0.0, "Euclidean space E4"),
        ("s3", 3, 1.0, "unit sphere S3, polar chart"),
        ("s4", 4, 1.0, "unit sphere S4, polar chart"),
        ("h3", 3, -1.0, "hyperbolic space H3, Poincare ball"),
        ("h4", 4, -1.0, "hyperbolic space H4, Poincare ball"),
    ] {
        out.push(CatalogEntry {
            name,
            description,
            metric: make_space_form(n, c),
            expected: space_form_expected(n, c),
        });
    }
    let product = |a: MetricField, b: MetricField| make_product(&a, &b).expect("disjoint coordinates");
    out.push(CatalogEntry {
        name: "s2xe1",
        description: "S2(1) x E1",
        metric: times_line(&sphere(&strs(&["u", "v"]), 1.0), "w").expect("fresh coordinate"),
        expected: qcc_expected(1, None, 0.0, 1.0, true, 3, Provenance::Published, "symmetric product; K̄ = 0, K⊥ = 1"),
    });
    out.push(CatalogEntry {
        name: "h2xe1",
        description: "H2(-1) x E1, upper half-plane",
        metric: times_line(&half_plane("x", "y", -1.0), "z").expect("fresh coordinate"),
        expected: qcc_expected(1, None, 0.0, -1.0, true, 3, Provenance::Published, "symmetric product; K̄ = 0, K⊥ = −1"),
    });
    out.push(CatalogEntry {
        name: "nil",
        description: "Heisenberg group, dx^2 + dy^2 + (dz - x dy)^2",
        metric: make_thurston(Thurston::Nil),
        expected: qcc_expected(
            1,
            None,
            0.25,
            -0.75,
            false,
            3,
            Provenance::Derived,
            "positive constant type; magnitude 1/4 for this normalization",
        ),
    });
    out.push(CatalogEntry {
        name: "sol",
        description: "Sol, e^(2z) dx^2 + e^(-2z) dy^2 + dz^2",
        metric: make_thurston(Thurston::Sol),
        expected: qcc_expected(1, None, -1.0, 1.0, false, 3, Provenance::Published, "constant type -1"),
    });
    out.push(CatalogEntry {
        name: "sl2r",
        description: "universal cover of SL(2,R), (dx^2 + dy^2)/y^2 + (dz + dx/y)^2",
        metric: make_thurston(Thurston::Sl2r),
        expected: qcc_expected(
            1,
            None,
            0.25,
            -1.75,
            false,
            3,
            Provenance::Derived,
            "bundle over H2(-1) with fibre curvature 1/2: vertical planes 1/4, horizontal -7/4",
        ),
    });
    out.push(CatalogEntry {
        name: "s2xh2",
        description: "S2(1) x H2(-1)",
        metric: product(sphere(&strs(&["u", "v"]), 1.0), half_plane("x", "y", -1.0)),
        expected: qcc_expected(
            2,
            Some(1.0),
            0.0,
            -1.0,
            true,
            4,
            Provenance::Published,
            "product of space forms with opposite curvatures",
        ),
    });
    out.push(CatalogEntry {
        name: "s3xe1",
        description: "S3(1) x E1",
        metric: times_line(&sphere(&strs(&["a", "b", "c"]), 1.0), "w").expect("fresh coordinate"),
        expected: qcc_expected(1, None, 0.0, 1.0, true, 4, Provenance::Published, "space form times a line"),
    });
    let sin_f = crate::dsl::parse_expr("2 + sin(t)", &strs(&["t"])).expect("valid");
    out.push(CatalogEntry {
        name: "warped",
        description: "dt^2 + (2 + sin t)^2 (dx^2 + dy^2)",
        metric: make_warped(&sin_f, 0.0, 3, (0.1, 3.0)).expect("positive warping"),
        expected: Expected {
            labels: vec![QuasiEinstein, QuasiConstantCurvature, ConformallyFlat, Deszcz, RicciDeszcz],
            absent: vec![ConstantCurvature, Einstein, SemiSymmetric, Generic],
            curvature: None,
            qcc: None,
            qcc_oracle: Some(warped_sin_oracle),
            constant_type: TypeExpect::NonConstant,
            conformally_euclidean: None,
            provenance: Provenance::Derived,
            note: "K̄ = -f''/f = sin t/(2 + sin t), K⊥ = (k - f'^2)/f^2",
        },
    });
    let cosh_f = crate::dsl::parse_expr("cosh(t)", &strs(&["t"])).expect("valid");
    out.push(CatalogEntry {
        name: "hwarped",
        description: "dt^2 + cosh(t)^2 g_H2(-1), a chart of H3(-1)",
        metric: make_warped(&cosh_f, -1.0, 3, (-1.0, 1.0)).expect("positive warping"),
        expected: Expected {
            labels: vec![ConstantCurvature, Einstein, ConformallyFlat, SemiSymmetric, Deszcz],
            absent: vec![QuasiEinstein, QuasiConstantCurvature, Flat],
            curvature: Some(-1.0),
            qcc: None,
            qcc_oracle: None,
            constant_type: TypeExpect::Constant(0.0),
            conformally_euclidean: None,
            provenance: Provenance::Derived,
            note: "K̄ = -f''/f = -1 and K⊥ = (k - f'^2)/f^2 = -1 coincide",
        },
    });
    out.push(CatalogEntry {
        name: "generic3",
        description: "dx^2 + e^(2x) dy^2 + e^(4x) dz^2",
        metric: make_generic3(),
        expected: Expected {
            labels: vec![WildlyAnisotropic, Generic, ConformallyFlat],
            absent: vec![Einstein, QuasiEinstein, QuasiConstantCurvature, SemiSymmetric, Deszcz],
            curvature: None,
            qcc: None,
            qcc_oracle: None,
            constant_type: TypeExpect::NotDeszcz,
            conformally_euclidean: None,
            provenance: Provenance::Derived,
            note: "Ricci curvatures -5, -3, -6",
        },
    });
    out.push(CatalogEntry {
        name: "generic4",
        description: "diag(1, 1 + w^2, 1 + x^2, 1 + y^2) + 0.3 sin(y) (dw dx + dx dw)",
        metric: make_generic4(),
        expected: Expected {
            labels: vec![Generic],
            absent: vec![Einstein, QuasiEinstein, QuasiConstantCurvature, ConformallyFlat, SemiSymmetric, Deszcz],
            curvature: None,
            qcc: None,
            qcc_oracle: None,
            constant_type: TypeExpect::NotDeszcz,
            conformally_euclidean: None,
            provenance: Provenance::Derived,
            note: "negative control",
        },
    });
    out
}

pub fn names_list() -> Vec<&'static str> {
    entries().iter().map(|e| e.name).collect()
}

pub fn get(name: &str) -> Option<CatalogEntry> {
    entries().into_iter().find(|e| e.name == name)
}

/// The entry as a metric file.
pub fn export(name: &str) -> Option<String> {
    get(name).map(|e| e.metric.to_source())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_least_twelve_entries_with_all_thurston_geometries() {
        let names = names_list();
        assert!(names.len() >= 12);
        for t in ["e3", "s3", "h3", "s2xe1", "h2xe1", "sl2r", "nil", "sol"] {
            assert!(names.contains(&t), "{t}");
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }

    #[test]
    fn exports_round_trip() {
        for e in entries() {
            let src = e.metric.to_source();
            assert_eq!(parse_metric_source(&src).unwrap(), e.metric, "{}", e.name);
        }
    }

    #[test]
    fn warped_rejects_non_positive_f() {
        let f = crate::dsl::parse_expr("sin(t)", &strs(&["t"])).unwrap();
        assert!(make_warped(&f, 0.0, 3, (-1.0, 1.0)).is_err());
        let one = Expr::num(1.0);
        assert!(make_warped(&one, 0.0, 3, (0.0, 1.0)).is_ok());
    }

    #[test]
    fn product_rejects_name_clash() {
        let a = flat(&strs(&["x", "y"]));
        assert!(make_product(&a, &a).is_err());
    }
}
