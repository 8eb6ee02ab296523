//! Detection and validation of quasi-constant-curvature structure.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::ClassifyConfig;
use super::spectrum::RicciSpectrum;
use crate::engine::CurvaturePack;
use crate::planes::{
    double_sectional, qcc_probe_eval, plane_angles, qcc_predicted_k, ricci_direction, ricci_profile, TwoPlane,
};
use crate::tensor::{frobenius_norm, index_tuples, DenseTensor, MetricAtPoint};

/// Samples of `ψ ∈ [0, π/2]` for the Ricci profile.
const PROFILE_SAMPLES: usize = 21;

/// `q`, the distributions `D`, `D⊥` and the curvature functions at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct QccStructure {
    pub q: usize,
    pub d_basis: Vec<Vec<f64>>,
    pub d_perp_basis: Vec<Vec<f64>>,
    /// Curvature of planes inside `D`; only for `q > 1`.
    pub k: Option<f64>,
    pub k_perp: f64,
    pub k_bar: f64,
    pub rho: f64,
    pub rho_perp: f64,
    /// Worst deviation of sampled planes from the model curvature.
    pub model_residual: f64,
    /// `|K̄ − (K + K⊥)/2|`, relative; only for `q > 1`.
    pub midpoint_residual: Option<f64>,
    pub diagnostics: QccDiagnostics,
}

/// Pointwise identities a quasi-constant-curvature point must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QccDiagnostics {
    /// `(∧g·R)(X̃, Y⊥, Y⊥, X̃; X, X⊥)`
    pub tach_probe: f64,
    /// `(R·R)(X̃, Y⊥, Y⊥, X̃; X, X⊥)`
    pub rr_probe: f64,
    /// Deviation of the two values above from `(K⊥ − K̄, K̄(K⊥ − K̄))`.
    pub probe_residual: f64,
    /// `ρ = (q−1)K + q⊥K̄`
    pub rho_residual: f64,
    /// `ρ⊥ = qK̄ + (q⊥−1)K⊥`
    pub rho_perp_residual: f64,
    /// `τ = qρ + q⊥ρ⊥`
    pub tau_residual: f64,
    /// Measured `ρ(X cos ψ + X⊥ sin ψ)` against the closed-form profile.
    pub profile_residual: f64,
    /// Whether the sampled profile has an extremum strictly inside `(0, π/2)`.
    pub profile_interior_extremum: bool,
    /// Worst `|L − K̄|/(1 + |K̄|)` over curvature-dependent random plane pairs.
    pub pair_l_deviation: Option<f64>,
    pub dependent_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NotQcc {
    Dimension(usize),
    ClusterCount(usize),
    /// The curvature functions coincide within the distinctness tolerance.
    NotDistinct { k: Option<f64>, k_perp: f64, k_bar: f64 },
    /// Sampled planes deviate from the model.
    Model { residual: f64, midpoint: Option<f64> },
}

/// Tensors re-expressed in an orthonormal frame, where planes are plain
/// Euclidean objects.
pub(crate) struct FrameTensors {
    pub r: DenseTensor,
    pub rr: DenseTensor,
    pub tach_r: DenseTensor,
    pub ricci: DenseTensor,
    pub r_norm: f64,
}

impl FrameTensors {
    pub fn new(pack: &CurvaturePack, frame: &DMatrix<f64>) -> Self {
        FrameTensors {
            r: pack.riemann.in_frame(frame),
            rr: pack.rr.in_frame(frame),
            tach_r: pack.tach_r.in_frame(frame),
            ricci: pack.ricci.in_frame(frame),
            r_norm: frobenius_norm(&pack.riemann, &pack.metric),
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn random_plane(rng: &mut ChaCha8Rng, e: &MetricAtPoint) -> TwoPlane {
    let n = e.dim();
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Ok(p) = TwoPlane::new(&v, &w, e) {
            return p;
        }
    }
}

/// Largest frame component `R(E_a, E_b, E_c, E_d)` with at least three
/// distinct indices, relative to `1 + ‖R‖`.
pub fn lemma_residual(r_frame: &DenseTensor, r_norm: f64) -> f64 {
    let n = r_frame.dim();
    index_tuples(n, 4)
        .filter(|i| {
            let mut s = i.clone();
            s.sort_unstable();
            s.dedup();
            s.len() >= 3
        })
        .map(|i| r_frame.get(&i).unwrap().abs())
        .fold(0.0, f64::max)
        / (1.0 + r_norm)
}

/// Take `D` as the smaller Ricci eigenspace, read `K̄`, `K⊥` (and `K`) off
/// canonical planes, then validate the model on `cfg.planes` seeded random
/// planes.
pub fn detect_qcc(pack: &CurvaturePack, spectrum: &RicciSpectrum, cfg: &ClassifyConfig) -> Result<QccStructure, NotQcc> {
    let n = pack.dim();
    if n < 3 {
        return Err(NotQcc::Dimension(n));
    }
    let (di, pi) = spectrum.split().ok_or(NotQcc::ClusterCount(spectrum.clusters.len()))?;
    let (d, p) = (&spectrum.clusters[di], &spectrum.clusters[pi]);
    let (q, qp) = (d.multiplicity, p.multiplicity);
    let cols: Vec<&Vec<f64>> = d.basis.iter().chain(&p.basis).collect();
    let frame = DMatrix::from_fn(n, n, |r, c| cols[c][r]);
    let ft = FrameTensors::new(pack, &frame);
    let e = MetricAtPoint::euclidean(n);
    let kf = |a: usize, b: usize| ft.r.get(&[a, b, b, a]).unwrap();

    let k_bar = kf(0, q);
    let k_perp = kf(q, q + 1);
    let k = (q > 1).then(|| kf(0, 1));
    let scale = 1.0 + k_bar.abs() + k_perp.abs() + k.map_or(0.0, f64::abs);
    let tol = &cfg.tol;
    let distinct = |a: f64, b: f64| (a - b).abs() > tol.distinct * scale;
    let ok = match k {
        None => distinct(k_bar, k_perp),
        Some(k) => distinct(k, k_perp) && distinct(k_bar, k_perp),
    };
    if !ok {
        return Err(NotQcc::NotDistinct { k, k_perp, k_bar });
    }

    let d_frame: Vec<Vec<f64>> = (0..q).map(|i| unit(n, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model_residual: f64 = 0.0;
    for _ in 0..cfg.planes {
        let plane = random_plane(&mut rng, &e);
        let (th, ph) = plane_angles(&plane, &d_frame, &e);
        let (v, w) = (plane.v(), plane.w());
        let measured = ft.r.eval(&[v, w, w, v]);
        let predicted = qcc_predicted_k(q, k.unwrap_or(0.0), k_perp, k_bar, th, ph).expect("q >= 1");
        model_residual = model_residual.max((measured - predicted).abs() / scale);
    }
    let midpoint_residual = k.map(|k| (k_bar - 0.5 * (k + k_perp)).abs() / scale);
    if model_residual > tol.label || midpoint_residual.is_some_and(|m| m > tol.label) {
        return Err(NotQcc::Model {
            residual: model_residual,
            midpoint: midpoint_residual,
        });
    }

    let (x, xp, yp) = (unit(n, 0), unit(n, q), unit(n, q + 1));
    let (tach_probe, rr_probe) = qcc_probe_eval(&ft.rr, &ft.tach_r, &e, &x, &xp, &yp).expect("frame is orthonormal");
    let probe_residual = ((tach_probe - (k_perp - k_bar)).abs() / scale).max((rr_probe - k_bar * (k_perp - k_bar)).abs() / (scale * scale));

    let (rho, rho_perp) = (d.value, p.value);
    let (qf, qpf) = (q as f64, qp as f64);
    let rho_residual = (rho - ((qf - 1.0) * k.unwrap_or(0.0) + qpf * k_bar)).abs() / (1.0 + rho.abs());
    let rho_perp_residual = (rho_perp - (qf * k_bar + (qpf - 1.0) * k_perp)).abs() / (1.0 + rho_perp.abs());
    let tau_residual = (pack.tau - (qf * rho + qpf * rho_perp)).abs() / (1.0 + pack.tau.abs());

    let mut profile_residual: f64 = 0.0;
    let mut samples = Vec::with_capacity(PROFILE_SAMPLES);
    let pscale = 1.0 + rho.abs() + rho_perp.abs();
    for i in 0..PROFILE_SAMPLES {
        let psi = i as f64 * std::f64::consts::FRAC_PI_2 / (PROFILE_SAMPLES - 1) as f64;
        let (s, c) = psi.sin_cos();
        let u: Vec<f64> = x.iter().zip(&xp).map(|(a, b)| c * a + s * b).collect();
        let measured = ricci_direction(&ft.ricci, &e, &u).expect("unit vector");
        let closed = ricci_profile(q, n, k.unwrap_or(0.0), k_perp, k_bar, psi);
        let blend = rho * c * c + rho_perp * s * s;
        profile_residual = profile_residual.max((measured - closed).abs().max((measured - blend).abs()) / pscale);
        samples.push(measured);
    }
    let argext = |better: fn(f64, f64) -> bool| {
        (1..samples.len()).fold(0, |best, i| if better(samples[i], samples[best]) { i } else { best })
    };
    let last = PROFILE_SAMPLES - 1;
    let profile_interior_extremum = [argext(|a, b| a > b), argext(|a, b| a < b)]
        .iter()
        .any(|&i| i != 0 && i != last);

    let cutoff = tol.dep * (1.0 + ft.r_norm);
    let mut dependent_pairs = 0;
    let mut pair_l_deviation: Option<f64> = None;
    for _ in 0..cfg.planes / 2 {
        let p1 = random_plane(&mut rng, &e);
        let p2 = random_plane(&mut rng, &e);
        if let Some(l) = double_sectional(&ft.rr, &ft.tach_r, &p1, &p2, cutoff).value() {
            dependent_pairs += 1;
            let dev = (l - k_bar).abs() / (1.0 + k_bar.abs());
            pair_l_deviation = Some(pair_l_deviation.map_or(dev, |m| m.max(dev)));
        }
    }

    Ok(QccStructure {
        q,
        d_basis: d.basis.clone(),
        d_perp_basis: p.basis.clone(),
        k,
        k_perp,
        k_bar,
        rho,
        rho_perp,
        model_residual,
        midpoint_residual,
        diagnostics: QccDiagnostics {
            tach_probe,
            rr_probe,
            probe_residual,
            rho_residual,
            rho_perp_residual,
            tau_residual,
            profile_residual,
            profile_interior_extremum,
            pair_l_deviation,
            dependent_pairs,
        },
    })
}
