//! Pointwise curvature: Christoffel symbols, Riemann, Ricci, scalar and Weyl
//! curvature, and the derivation-built tensors `R·R`, `∧g·R`, `R·S`, `∧g·S`.
//!
//! Sign conventions are collected in [`crate::conventions`].

use nalgebra::DMatrix;

use crate::dsl::{MetricField, MetricJets};
use crate::error::{GeometryError, Result, TensorError};
use crate::tensor::{frobenius_norm, index_tuples, DenseTensor, MetricAtPoint, Variance};

/// Relative tolerance for the structural checks run on every pack in debug
/// builds.
pub const INVARIANT_TOL: f64 = 1e-9;

/// Christoffel symbols and their first derivatives at a point.
#[derive(Debug, Clone)]
pub struct Connection {
    n: usize,
    /// `gamma[(k*n + i)*n + j] = Γ^k_ij`
    gamma: Vec<f64>,
    /// `dgamma[((m*n + k)*n + i)*n + j] = ∂_m Γ^k_ij`
    dgamma: Vec<f64>,
}

impl Connection {
    pub fn from_jets(jets: &MetricJets, g: &MetricAtPoint) -> Self {
        let n = jets.n;
        let gi = &g.g_inv;
        // Γ_{l,ij} and ∂_m Γ_{l,ij}
        let mut low = vec![0.0; n * n * n];
        let mut dlow = vec![0.0; n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    low[(l * n + i) * n + j] = 0.5 * (jets.dg(i, j, l) + jets.dg(j, i, l) - jets.dg(l, i, j));
                    for m in 0..n {
                        dlow[((m * n + l) * n + i) * n + j] =
                            0.5 * (jets.ddg(m, i, j, l) + jets.ddg(m, j, i, l) - jets.ddg(m, l, i, j));
                    }
                }
            }
        }
        // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
        let mut dginv = vec![0.0; n * n * n];
        for m in 0..n {
            let dg = DMatrix::from_fn(n, n, |a, b| jets.dg(m, a, b));
            let d = -(gi * dg * gi);
            for k in 0..n {
                for l in 0..n {
                    dginv[(m * n + k) * n + l] = d[(k, l)];
                }
            }
        }
        let mut gamma = vec![0.0; n * n * n];
        let mut dgamma = vec![0.0; n * n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += gi[(k, l)] * low[(l * n + i) * n + j];
                    }
                    gamma[(k * n + i) * n + j] = s;
                    for m in 0..n {
                        let mut d = 0.0;
                        for l in 0..n {
                            d += dginv[(m * n + k) * n + l] * low[(l * n + i) * n + j]
                                + gi[(k, l)] * dlow[((m * n + l) * n + i) * n + j];
                        }
                        dgamma[((m * n + k) * n + i) * n + j] = d;
                    }
                }
            }
        }
        Connection { n, gamma, dgamma }
    }

    /// `Γ^k_ij`
    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.n + i) * self.n + j]
    }

    /// `∂_m Γ^k_ij`
    #[inline]
    pub fn dgamma(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.dgamma[((m * n + k) * n + i) * n + j]
    }

    /// As a `(1,2)` tensor with slots `[k][i][j]`.
    pub fn to_tensor(&self) -> DenseTensor {
        let mut t = DenseTensor::with_variance(
            self.n,
            vec![Variance::Contravariant, Variance::Covariant, Variance::Covariant],
        );
        t.data_mut().copy_from_slice(&self.gamma);
        t
    }

    /// Fully covariant Riemann tensor.
    pub fn riemann(&self, g: &MetricAtPoint) -> DenseTensor {
        let n = self.n;
        // R^l_{kij}
        let mut up = vec![0.0; n * n * n * n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = self.dgamma(i, l, j, k) - self.dgamma(j, l, i, k);
                        for m in 0..n {
                            v += self.gamma(l, i, m) * self.gamma(m, j, k) - self.gamma(l, j, m) * self.gamma(m, i, k);
                        }
                        up[((l * n + k) * n + i) * n + j] = v;
                    }
                }
            }
        }
        DenseTensor::from_fn(n, 4, |idx| {
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            (0..n).map(|m| g.g[(l, m)] * up[((m * n + k) * n + i) * n + j]).sum()
        })
    }
}

pub fn metric_at(m: &MetricField, p: &[f64]) -> Result<(MetricJets, MetricAtPoint)> {
    let jets = m.jets(p)?;
    let g = MetricAtPoint::new(jets.g_matrix(), p.to_vec())?;
    Ok((jets, g))
}

/// `Γ^k_ij` at `p` as a `(1,2)` tensor.
pub fn christoffel(m: &MetricField, p: &[f64]) -> Result<DenseTensor> {
    let (jets, g) = metric_at(m, p)?;
    Ok(Connection::from_jets(&jets, &g).to_tensor())
}

pub fn riemann(m: &MetricField, p: &[f64]) -> Result<DenseTensor> {
    let (jets, g) = metric_at(m, p)?;
    Ok(Connection::from_jets(&jets, &g).riemann(&g))
}

/// `G_{ijkl} = g_il g_jk − g_ik g_jl`
pub fn g_tensor(g: &MetricAtPoint) -> DenseTensor {
    let m = &g.g;
    DenseTensor::from_fn(g.dim(), 4, |i| {
        m[(i[0], i[3])] * m[(i[1], i[2])] - m[(i[0], i[2])] * m[(i[1], i[3])]
    })
}

/// Ricci tensor, its `(1,1)` form and the scalar curvature.
pub fn ricci_scalar(r: &DenseTensor, g: &MetricAtPoint) -> (DenseTensor, DMatrix<f64>, f64) {
    let n = g.dim();
    let gi = &g.g_inv;
    let s = DenseTensor::from_fn(n, 2, |ij| {
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += gi[(a, b)] * r.get(&[ij[0], a, b, ij[1]]).unwrap();
            }
        }
        acc
    });
    let s_mat = DMatrix::from_fn(n, n, |i, j| s.get(&[i, j]).unwrap());
    let s_op = gi * &s_mat;
    let tau = s_op.trace();
    (s, s_op, tau)
}

/// Weyl conformal curvature tensor (`n ≥ 3`).
pub fn weyl(r: &DenseTensor, s: &DenseTensor, tau: f64, g: &MetricAtPoint) -> Result<DenseTensor> {
    let n = g.dim();
    if n < 3 {
        return Err(GeometryError::WeylDimension(n));
    }
    let nf = n as f64;
    let m = &g.g;
    let sv = |i: usize, j: usize| s.get(&[i, j]).unwrap();
    Ok(DenseTensor::from_fn(n, 4, |idx| {
        let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
        let gs = m[(a, d)] * sv(b, c) - m[(a, c)] * sv(b, d) + m[(b, c)] * sv(a, d) - m[(b, d)] * sv(a, c);
        let gg = m[(a, d)] * m[(b, c)] - m[(a, c)] * m[(b, d)];
        r.get(idx).unwrap() - gs / (nf - 2.0) + tau * gg / ((nf - 1.0) * (nf - 2.0))
    }))
}

/// `(Q·T)(V_1..V_k; X, Y) = −Σ_s T(.., Q(X,Y)V_s, ..)` where the operator
/// is read off a `(0,4)` tensor: `g(Q(X,Y)V, W) = Q(X,Y,V,W)`.
fn derive(op: &DenseTensor, t: &DenseTensor, g: &MetricAtPoint) -> Result<DenseTensor> {
    let k = t.rank();
    if k != 2 && k != 4 {
        return Err(TensorError::UnsupportedRank(k).into());
    }
    let n = g.dim();
    // act[x][y][a][m]: component m of Q(∂x, ∂y)∂a
    let act = op.raise(3, g);
    let act = act.data();
    let td = t.data();
    let strides: Vec<usize> = (0..k).map(|s| n.pow((k - s - 1) as u32)).collect();
    let mut out = DenseTensor::zeros(n, k + 2);
    let od = out.data_mut();
    for (o, idx) in index_tuples(n, k + 2).enumerate() {
        let (x, y) = (idx[k], idx[k + 1]);
        let base: usize = idx[..k].iter().zip(&strides).map(|(i, s)| i * s).sum();
        let mut acc = 0.0;
        for s in 0..k {
            let a = idx[s];
            let row = ((x * n + y) * n + a) * n;
            let without = base - a * strides[s];
            for m in 0..n {
                acc += act[row + m] * td[without + m * strides[s]];
            }
        }
        od[o] = -acc;
    }
    Ok(out)
}

/// `R·T` for a `(0,2)` or `(0,4)` tensor `T`.
pub fn derive_by_curvature(t: &DenseTensor, r: &DenseTensor, g: &MetricAtPoint) -> Result<DenseTensor> {
    derive(r, t, g)
}

/// `∧g·T` for a `(0,2)` or `(0,4)` tensor `T`.
pub fn derive_by_wedge(t: &DenseTensor, g: &MetricAtPoint) -> Result<DenseTensor> {
    derive(&g_tensor(g), t, g)
}

/// Every curvature quantity at one point.
#[derive(Debug, Clone)]
pub struct CurvaturePack {
    pub point: Vec<f64>,
    pub metric: MetricAtPoint,
    pub gamma: DenseTensor,
    pub riemann: DenseTensor,
    pub g_tensor: DenseTensor,
    pub ricci: DenseTensor,
    pub ricci_op: DMatrix<f64>,
    pub tau: f64,
    /// `None` in dimension 2.
    pub weyl: Option<DenseTensor>,
    pub rr: DenseTensor,
    pub tach_r: DenseTensor,
    pub rs: DenseTensor,
    pub tach_s: DenseTensor,
}

/// Worst relative violations of the algebraic identities a pack must obey.
#[derive(Debug, Clone, Copy, Default)]
pub struct SymmetryResiduals {
    pub riemann: f64,
    pub g_tensor: f64,
    pub weyl: f64,
    pub weyl_trace: f64,
    pub ricci_symmetry: f64,
    pub tau_trace: f64,
    pub rr: f64,
    pub tach_r: f64,
}

impl SymmetryResiduals {
    pub fn worst(&self) -> f64 {
        [
            self.riemann,
            self.g_tensor,
            self.weyl,
            self.weyl_trace,
            self.ricci_symmetry,
            self.tau_trace,
            self.rr,
            self.tach_r,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Max violation of antisymmetry in (1,2), (3,4), pair symmetry and the first
/// Bianchi identity over the first four slots, relative to `1 + max|T|`.
pub fn curvature_symmetry_residual(t: &DenseTensor) -> f64 {
    let n = t.dim();
    let k = t.rank();
    let scale = 1.0 + t.max_abs();
    let mut worst: f64 = 0.0;
    for idx in index_tuples(n, k) {
        let v = t.get(&idx).unwrap();
        let mut j = idx.clone();
        j.swap(0, 1);
        worst = worst.max((v + t.get(&j).unwrap()).abs());
        let mut j = idx.clone();
        j.swap(2, 3);
        worst = worst.max((v + t.get(&j).unwrap()).abs());
        let mut j = idx.clone();
        j[..4].copy_from_slice(&[idx[2], idx[3], idx[0], idx[1]]);
        worst = worst.max((v - t.get(&j).unwrap()).abs());
        let mut a = idx.clone();
        a[..4].copy_from_slice(&[idx[0], idx[2], idx[3], idx[1]]);
        let mut b = idx.clone();
        b[..4].copy_from_slice(&[idx[0], idx[3], idx[1], idx[2]]);
        worst = worst.max((v + t.get(&a).unwrap() + t.get(&b).unwrap()).abs());
        if k == 6 {
            let mut j = idx.clone();
            j.swap(4, 5);
            worst = worst.max((v + t.get(&j).unwrap()).abs());
        }
    }
    worst / scale
}

/// Largest contraction of `C` over any slot pair, relative to `1 + |C|`.
pub fn weyl_trace_residual(c: &DenseTensor, g: &MetricAtPoint) -> f64 {
    let n = g.dim();
    let scale = 1.0 + frobenius_norm(c, g);
    let mut worst: f64 = 0.0;
    for p in 0..4 {
        for q in p + 1..4 {
            let rest: Vec<usize> = (0..4).filter(|s| *s != p && *s != q).collect();
            for u in 0..n {
                for v in 0..n {
                    let mut acc = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            let mut idx = [0; 4];
                            idx[p] = a;
                            idx[q] = b;
                            idx[rest[0]] = u;
                            idx[rest[1]] = v;
                            acc += g.g_inv[(a, b)] * c.get(&idx).unwrap();
                        }
                    }
                    worst = worst.max(acc.abs());
                }
            }
        }
    }
    worst / scale
}

impl CurvaturePack {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        let g = &self.metric;
        let n = self.dim();
        let mut ricci_symmetry: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                ricci_symmetry =
                    ricci_symmetry.max((self.ricci.get(&[i, j]).unwrap() - self.ricci.get(&[j, i]).unwrap()).abs());
            }
        }
        let s_scale = 1.0 + self.ricci.max_abs();
        let trace: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| g.g_inv[(i, j)] * self.ricci.get(&[i, j]).unwrap())
            .sum();
        SymmetryResiduals {
            riemann: curvature_symmetry_residual(&self.riemann),
            g_tensor: curvature_symmetry_residual(&self.g_tensor),
            weyl: self.weyl.as_ref().map_or(0.0, curvature_symmetry_residual),
            weyl_trace: self.weyl.as_ref().map_or(0.0, |c| weyl_trace_residual(c, g)),
            ricci_symmetry: ricci_symmetry / s_scale,
            tau_trace: (trace - self.tau).abs() / (1.0 + self.tau.abs()),
            rr: curvature_symmetry_residual(&self.rr),
            tach_r: curvature_symmetry_residual(&self.tach_r),
        }
    }

    pub fn verify(&self, tol: f64) -> Result<()> {
        let r = self.symmetry_residuals();
        if r.worst() > tol {
            return Err(GeometryError::Invariant(format!("{r:?} exceeds {tol:e} at {:?}", self.point)));
        }
        Ok(())
    }
}

/// Everything at `p`. Debug builds check the algebraic identities too.
pub fn curvature_pack(m: &MetricField, p: &[f64]) -> Result<CurvaturePack> {
    let (jets, g) = metric_at(m, p)?;
    let conn = Connection::from_jets(&jets, &g);
    let riemann = conn.riemann(&g);
    let g_t = g_tensor(&g);
    let (ricci, ricci_op, tau) = ricci_scalar(&riemann, &g);
    let weyl = if g.dim() >= 3 {
        Some(weyl(&riemann, &ricci, tau, &g)?)
    } else {
        None
    };
    let rr = derive_by_curvature(&riemann, &riemann, &g)?;
    let tach_r = derive_by_wedge(&riemann, &g)?;
    let rs = derive_by_curvature(&ricci, &riemann, &g)?;
    let tach_s = derive_by_wedge(&ricci, &g)?;
    let pack = CurvaturePack {
        point: p.to_vec(),
        gamma: conn.to_tensor(),
        metric: g,
        riemann,
        g_tensor: g_t,
        ricci,
        ricci_op,
        tau,
        weyl,
        rr,
        tach_r,
        rs,
        tach_s,
    };
    if cfg!(debug_assertions) {
        pack.verify(INVARIANT_TOL)?;
    }
    Ok(pack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_metric_source;
    use crate::tensor::inner_product;
    use std::f64::consts::PI;

    fn sphere2() -> MetricField {
        parse_metric_source("dim = 2\ncoords = th, ph\ng[1][1] = 1\ng[2][2] = sin(th)^2").unwrap()
    }

    fn sol() -> MetricField {
        parse_metric_source("dim = 3\ncoords = x, y, z\ng[1][1] = exp(2*z)\ng[2][2] = exp(-2*z)\ng[3][3] = 1").unwrap()
    }

    fn unit_s3() -> MetricField {
        parse_metric_source("dim = 3\ncoords = a, b, c\ng[1][1] = 1\ng[2][2] = sin(a)^2\ng[3][3] = sin(a)^2*sin(b)^2")
            .unwrap()
    }

    #[test]
    fn flat_christoffel_vanish() {
        let m = parse_metric_source("dim = 3\ncoords = x, y, z\ng[1][1] = 1\ng[2][2] = 1\ng[3][3] = 1").unwrap();
        assert_eq!(christoffel(&m, &[0.1, 0.2, 0.3]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn sphere_christoffel_against_finite_differences() {
        let m = sphere2();
        let th = PI / 4.0;
        let gam = christoffel(&m, &[th, 0.3]).unwrap();
        // Γ^θ_φφ = −½ g^θθ ∂_θ g_φφ, with ∂_θ g_φφ from a central difference
        let h = 1e-5;
        let gpp = |t: f64| m.matrix_at(&[t, 0.3]).unwrap()[(1, 1)];
        let fd = -0.5 * (gpp(th + h) - gpp(th - h)) / (2.0 * h);
        assert!((gam.get(&[0, 1, 1]).unwrap() - fd).abs() < 1e-6);
        assert!((gam.get(&[0, 1, 1]).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn sol_christoffel_at_origin() {
        let gam = christoffel(&sol(), &[0.0, 0.0, 0.0]).unwrap();
        // Γ^x_xz = ½ g^xx ∂_z g_xx = 1
        assert!((gam.get(&[0, 0, 2]).unwrap() - 1.0).abs() < 1e-15);
        assert!((gam.get(&[0, 2, 0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_sphere_riemann_equals_g() {
        let m = unit_s3();
        let p = [1.1, 0.7, 0.2];
        let pack = curvature_pack(&m, &p).unwrap();
        let diff = pack.riemann.sub(&pack.g_tensor).unwrap();
        assert!(diff.max_abs() < 1e-12);
        let g = &pack.metric;
        let norm2 = inner_product(&pack.riemann, &pack.riemann, g).unwrap();
        // brute force ⟨G, G⟩ = 2 n (n − 1) in an orthonormal frame
        assert!((norm2 - 12.0).abs() < 1e-10);
        assert!((pack.tau - 6.0).abs() < 1e-12);
        let s = DMatrix::from_fn(3, 3, |i, j| pack.ricci.get(&[i, j]).unwrap());
        assert!((s - &g.g * 2.0).abs().max() < 1e-12);
        assert!(frobenius_norm(pack.weyl.as_ref().unwrap(), g) < 1e-9);
        assert!(frobenius_norm(&pack.rr, g) < 1e-9);
        assert!(frobenius_norm(&pack.tach_r, g) < 1e-9);
    }

    #[test]
    fn e4_g_tensor_has_24_unit_components() {
        let g = MetricAtPoint::euclidean(4);
        let t = g_tensor(&g);
        let nz: Vec<f64> = t.data().iter().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(nz.len(), 24);
        assert!(nz.iter().all(|v| v.abs() == 1.0));
        assert_eq!(t.get(&[0, 1, 1, 0]), Some(1.0));
        assert_eq!(t.get(&[0, 0, 2, 3]), Some(0.0));
    }

    #[test]
    fn sol_curvature_in_frame() {
        let m = sol();
        let p = [0.3, -0.4, 0.25];
        let pack = curvature_pack(&m, &p).unwrap();
        let frame = pack.metric.orthonormal_frame();
        let rf = pack.riemann.in_frame(&frame);
        let k = |a: usize, b: usize| rf.get(&[a, b, b, a]).unwrap();
        assert!((k(0, 1) - 1.0).abs() < 1e-12);
        assert!((k(0, 2) + 1.0).abs() < 1e-12);
        assert!((k(1, 2) + 1.0).abs() < 1e-12);
        assert!((pack.tau + 2.0).abs() < 1e-12);
        // R·R = −(∧g·R)
        let sum = pack.rr.axpy(1.0, &pack.tach_r).unwrap();
        assert!(frobenius_norm(&sum, &pack.metric) < 1e-10);
        assert!(frobenius_norm(&pack.tach_r, &pack.metric) > 1.0);
    }

    #[test]
    fn metric_is_parallel_under_both_derivations() {
        let pack = curvature_pack(&sol(), &[0.1, 0.2, 0.3]).unwrap();
        let gt = DenseTensor::from_matrix(&pack.metric.g);
        let a = derive_by_curvature(&gt, &pack.riemann, &pack.metric).unwrap();
        let b = derive_by_wedge(&gt, &pack.metric).unwrap();
        assert!(a.max_abs() < 1e-12 && b.max_abs() < 1e-12);
    }

    #[test]
    fn unsupported_rank_and_dimension() {
        let g = MetricAtPoint::euclidean(3);
        let t = DenseTensor::zeros(3, 3);
        assert!(derive_by_wedge(&t, &g).is_err());
        let g2 = MetricAtPoint::euclidean(2);
        let z = DenseTensor::zeros(2, 4);
        assert!(matches!(
            weyl(&z, &DenseTensor::zeros(2, 2), 0.0, &g2),
            Err(GeometryError::WeylDimension(2))
        ));
    }
}
