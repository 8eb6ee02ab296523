//! Tangent 2-planes and the curvature numbers attached to them: plane angles,
//! sectional and Weyl sectional curvature, Ricci curvature of a direction,
//! double sectional curvature, and the quasi-constant-curvature model.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, Matrix2};

use crate::engine::CurvaturePack;
use crate::error::{GeometryError, Result};
use crate::tensor::{DenseTensor, MetricAtPoint};

const UNIT_TOL: f64 = 1e-10;

/// A 2-plane stored by a g-orthonormal basis `(v, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPlane {
    v: Vec<f64>,
    w: Vec<f64>,
}

impl TwoPlane {
    /// Orthonormalizes `(v, w)` by Gram–Schmidt in that order.
    pub fn new(v: &[f64], w: &[f64], g: &MetricAtPoint) -> Result<Self> {
        let mut on = g
            .gram_schmidt(&[v.to_vec(), w.to_vec()])
            .ok_or(GeometryError::DegeneratePlane)?;
        let w = on.pop().unwrap();
        let v = on.pop().unwrap();
        Ok(TwoPlane { v, w })
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// The same plane with its basis rotated by `alpha` inside it.
    pub fn rotated(&self, alpha: f64) -> TwoPlane {
        let (s, c) = alpha.sin_cos();
        let v = self.v.iter().zip(&self.w).map(|(a, b)| c * a + s * b).collect();
        let w = self.v.iter().zip(&self.w).map(|(a, b)| -s * a + c * b).collect();
        TwoPlane { v, w }
    }
}

/// `M_ab = g(A_a, B_b)` for orthonormal bases of two planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleMatrix(pub Matrix2<f64>);

impl AngleMatrix {
    pub fn new(a: &TwoPlane, b: &TwoPlane, g: &MetricAtPoint) -> Self {
        AngleMatrix(Matrix2::new(
            g.dot(&a.v, &b.v),
            g.dot(&a.v, &b.w),
            g.dot(&a.w, &b.v),
            g.dot(&a.w, &b.w),
        ))
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    /// `cos²ψ = (det M)²`, clamped to `[0, 1]`.
    pub fn cos2_psi(&self) -> f64 {
        self.det().powi(2).min(1.0)
    }
}

/// Angle `ψ ∈ [0, π/2]` between two planes at the same point.
pub fn plane_angle(a: &TwoPlane, b: &TwoPlane, g: &MetricAtPoint) -> f64 {
    AngleMatrix::new(a, b, g).det().abs().min(1.0).acos()
}

/// `K(π) = R(v, w, w, v) / G(v, w, w, v)`.
pub fn sectional(r: &DenseTensor, g_tensor: &DenseTensor, plane: &TwoPlane) -> f64 {
    let (v, w) = (plane.v(), plane.w());
    r.eval(&[v, w, w, v]) / g_tensor.eval(&[v, w, w, v])
}

/// Sectional curvature of the plane spanned by two arbitrary vectors.
pub fn sectional_of(r: &DenseTensor, g: &MetricAtPoint, v: &[f64], w: &[f64]) -> Result<f64> {
    let p = TwoPlane::new(v, w, g)?;
    Ok(r.eval(&[p.v(), p.w(), p.w(), p.v()]))
}

/// `K_C = K − (ρ(X) + ρ(Y))/(n−2) + τ/((n−1)(n−2))` for an orthonormal plane `X ∧ Y`.
pub fn weyl_sectional(k: f64, rho_v: f64, rho_w: f64, tau: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(GeometryError::WeylDimension(n));
    }
    let nf = n as f64;
    Ok(k - (rho_v + rho_w) / (nf - 2.0) + tau / ((nf - 1.0) * (nf - 2.0)))
}

/// `ρ(u) = S(u, u)` for a unit vector `u`.
pub fn ricci_direction(s: &DenseTensor, g: &MetricAtPoint, u: &[f64]) -> Result<f64> {
    let n2 = g.dot(u, u);
    if (n2 - 1.0).abs() > UNIT_TOL {
        return Err(GeometryError::NotUnit(n2));
    }
    Ok(s.eval(&[u, u]))
}

/// Outcome of evaluating the double sectional curvature on a plane pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DoubleSectional {
    Value(f64),
    /// The Tachibana denominator is below the cutoff.
    CurvatureIndependent { denominator: f64 },
}

impl DoubleSectional {
    pub fn value(self) -> Option<f64> {
        match self {
            DoubleSectional::Value(l) => Some(l),
            DoubleSectional::CurvatureIndependent { .. } => None,
        }
    }
}

/// `L(π₁, π₂) = (R·R)(v, w, w, v; x, y) / (∧g·R)(v, w, w, v; x, y)` with
/// `π₁ = x ∧ y`, `π₂ = v ∧ w`. Pairs with `|denominator| ≤ cutoff` are
/// curvature-independent; the classifier uses `cutoff = tol_dep·(1 + ‖R‖)`.
pub fn double_sectional(
    rr: &DenseTensor,
    tach_r: &DenseTensor,
    p1: &TwoPlane,
    p2: &TwoPlane,
    cutoff: f64,
) -> DoubleSectional {
    let (x, y) = (p1.v(), p1.w());
    let (v, w) = (p2.v(), p2.w());
    let den = tach_r.eval(&[v, w, w, v, x, y]);
    if den.abs() <= cutoff {
        return DoubleSectional::CurvatureIndependent { denominator: den };
    }
    DoubleSectional::Value(rr.eval(&[v, w, w, v, x, y]) / den)
}

/// The two six-argument evaluations `(∧g·R)(X̃, Y⊥, Y⊥, X̃; X, X⊥)` and
/// `(R·R)(X̃, Y⊥, Y⊥, X̃; X, X⊥)` with `X̃ = (X + X⊥)/√2`.
pub fn qcc_probe_eval(
    rr: &DenseTensor,
    tach_r: &DenseTensor,
    g: &MetricAtPoint,
    x: &[f64],
    x_perp: &[f64],
    y_perp: &[f64],
) -> Result<(f64, f64)> {
    let vs = [x, x_perp, y_perp];
    let mut worst: f64 = 0.0;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g.dot(a, b) - target).abs());
        }
    }
    if worst > UNIT_TOL {
        return Err(GeometryError::NotOrthonormal(worst));
    }
    let xt: Vec<f64> = x.iter().zip(x_perp).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect();
    let args: [&[f64]; 6] = [&xt, y_perp, y_perp, &xt, x, x_perp];
    Ok((tach_r.eval(&args), rr.eval(&args)))
}

/// [`qcc_probe_eval`] on a pack, vectors in chart coordinates.
pub fn qcc_probe_values(pack: &CurvaturePack, x: &[f64], x_perp: &[f64], y_perp: &[f64]) -> Result<(f64, f64)> {
    qcc_probe_eval(&pack.rr, &pack.tach_r, &pack.metric, x, x_perp, y_perp)
}

/// Model sectional curvature of a plane at angles `(θ, φ)` to `D`. For
/// `q = 1`, `k` and `phi` are ignored.
pub fn qcc_predicted_k(q: usize, k: f64, k_perp: f64, k_bar: f64, theta: f64, phi: f64) -> Result<f64> {
    let (c2t, s2t) = (theta.cos().powi(2), theta.sin().powi(2));
    match q {
        0 => Err(GeometryError::InvalidMultiplicity(0)),
        1 => Ok(k_bar * c2t + k_perp * s2t),
        _ => {
            let (c2p, s2p) = (phi.cos().powi(2), phi.sin().powi(2));
            Ok(k * c2t * c2p + k_perp * s2t * s2p + k_bar * (c2t * s2p + s2t * c2p))
        }
    }
}

/// Ricci curvature of `X cos ψ + X⊥ sin ψ` on a quasi-constant-curvature
/// space (`X ∈ D`, `X⊥ ∈ D⊥` unit).
pub fn ricci_profile(q: usize, n: usize, k: f64, k_perp: f64, k_bar: f64, psi: f64) -> f64 {
    let (c2, s2) = (psi.cos().powi(2), psi.sin().powi(2));
    let nf = n as f64;
    if q <= 1 {
        k_bar + (nf - 2.0) * (k_bar * c2 + k_perp * s2)
    } else {
        let qf = q as f64;
        k_bar + (qf - 1.0) * (k * c2 + k_bar * s2) + (nf - qf - 1.0) * (k_perp * s2 + k_bar * c2)
    }
}

/// `dρ/dψ` of [`ricci_profile`], using `K̄ = (K + K⊥)/2` when `q > 1`.
pub fn ricci_profile_derivative(q: usize, n: usize, k: f64, k_perp: f64, k_bar: f64, psi: f64) -> f64 {
    let cs = psi.cos() * psi.sin();
    let nf = n as f64;
    if q <= 1 {
        2.0 * (nf - 2.0) * cs * (k_perp - k_bar)
    } else {
        (nf - 2.0) * cs * (k_perp - k)
    }
}

/// Angles `(θ, φ)` between a plane and the span of the orthonormal vectors
/// `d_basis`, from the singular values of `M_ai = g(v_a, E_i)`. For a
/// one-dimensional `D` only `θ` is meaningful and `φ = π/2`.
pub fn plane_angles(plane: &TwoPlane, d_basis: &[Vec<f64>], g: &MetricAtPoint) -> (f64, f64) {
    let q = d_basis.len();
    let m = DMatrix::from_fn(2, q, |a, i| {
        let va = if a == 0 { plane.v() } else { plane.w() };
        g.dot(va, &d_basis[i])
    });
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.resize(2, 0.0);
    (sv[0].min(1.0).acos(), sv[1].min(1.0).acos())
}
