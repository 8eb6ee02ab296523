//! Acceptance criteria; prints one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use curvlab::catalog::{self, CatalogEntry};
use curvlab::classify::{ClassificationReport, ClassifyConfig, Label, PointClassification};
use curvlab::engine::curvature_pack;
use curvlab::planes::{qcc_probe_values, sectional_of};
use curvlab::report::{JsonReport, MetricInfo};
use curvlab::sweep::{classify_at, classify_metric, sample_points};
use curvlab::tensor::{frobenius_norm, DenseTensor};
use curvlab::theorems::{check, CheckId, Status, Subject};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 50;

type Outcome = Result<String, String>;

fn entry(name: &str) -> CatalogEntry {
    catalog::get(name).unwrap_or_else(|| panic!("catalog entry {name}"))
}

fn classify(name: &str) -> ClassificationReport {
    classify_metric(&entry(name).metric, SAMPLES, &ClassifyConfig::default()).expect("classification")
}

fn subject(name: &str) -> Subject {
    Subject::from_catalog(&entry(name), SAMPLES, &ClassifyConfig::default()).expect("classification")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn space_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut w_tach, mut w_k, mut w_rho, mut w_c) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (name, n, c) in [("e3", 3, 0.0), ("e4", 4, 0.0), ("s3", 3, 1.0), ("s4", 4, 1.0), ("h3", 3, -1.0), ("h4", 4, -1.0)] {
        let m = entry(name).metric;
        for p in sample_points(m.domain(), SAMPLES, 42) {
            let pack = curvature_pack(&m, &p).map_err(|e| e.to_string())?;
            let g = &pack.metric;
            w_tach = w_tach.max(frobenius_norm(&pack.tach_r, g));
            for _ in 0..200 {
                let (v, w) = (random_vec(&mut rng, n), random_vec(&mut rng, n));
                if let Ok(k) = sectional_of(&pack.riemann, g, &v, &w) {
                    w_k = w_k.max((k - c).abs());
                }
            }
            let rho = (n as f64 - 1.0) * c;
            // ‖S − ρg‖ bounds every |λ − ρ| over the Ricci eigenvalues.
            let trace_free = DenseTensor::from_fn(n, 2, |i| pack.ricci.get(i).unwrap() - rho * g.g[(i[0], i[1])]);
            w_rho = w_rho.max(frobenius_norm(&trace_free, g));
            w_c = w_c.max(frobenius_norm(pack.weyl.as_ref().ok_or("Weyl tensor")?, g));
        }
        let report = classify(name);
        for l in [Label::ConstantCurvature, Label::Einstein, Label::ConformallyFlat] {
            ensure(report.has(l), || format!("{name} lacks {l}"))?;
        }
    }
    ensure(w_tach <= 1e-8, || format!("‖∧g·R‖ = {w_tach:e}"))?;
    ensure(w_k <= 1e-8, || format!("|K − c| = {w_k:e}"))?;
    ensure(w_rho <= 1e-8, || format!("|ρ − (n−1)c| = {w_rho:e}"))?;
    ensure(w_c <= 1e-9, || format!("‖C‖ = {w_c:e}"))?;
    Ok(format!(
        "‖∧g·R‖ {w_tach:.1e}, |K−c| {w_k:.1e}, |ρ−(n−1)c| {w_rho:.1e}, ‖C‖ {w_c:.1e}"
    ))
}

fn thurston() -> Outcome {
    let sol = classify("sol");
    let nil = classify("nil");
    let l_sol = sol.constant_type.ok_or("sol: no constant type")?;
    let l_nil = nil.constant_type.ok_or("nil: no constant type")?;
    ensure(sol.has(Label::Deszcz) && (l_sol + 1.0).abs() <= 1e-7, || format!("sol L = {l_sol}"))?;
    ensure(nil.has(Label::Deszcz) && (l_nil - 0.25).abs() <= 1e-7, || format!("nil L = {l_nil}"))?;
    let mut w_rr = 0.0f64;
    for (name, k_perp) in [("s2xe1", 1.0), ("h2xe1", -1.0)] {
        let m = entry(name).metric;
        for p in sample_points(m.domain(), SAMPLES, 42) {
            let pack = curvature_pack(&m, &p).map_err(|e| e.to_string())?;
            w_rr = w_rr.max(frobenius_norm(&pack.rr, &pack.metric));
        }
        let r = classify(name);
        ensure(r.has(Label::SemiSymmetric) && r.has(Label::QuasiConstantCurvature), || {
            format!("{name} labels {:?}", r.labels)
        })?;
        for pc in &r.points {
            let q = pc.qcc.as_ref().ok_or_else(|| format!("{name}: no structure at {:?}", pc.point))?;
            ensure(q.k_bar.abs() <= 1e-8 && (q.k_perp - k_perp).abs() <= 1e-8, || {
                format!("{name}: (K̄, K⊥) = ({}, {})", q.k_bar, q.k_perp)
            })?;
        }
    }
    ensure(w_rr <= 1e-8, || format!("‖R·R‖ = {w_rr:e}"))?;
    Ok(format!("sol L {l_sol:.9}, nil L {l_nil:.9}, products ‖R·R‖ {w_rr:.1e}"))
}

const QCC_METRICS: [&str; 8] = ["sol", "nil", "sl2r", "s2xe1", "h2xe1", "s2xh2", "s3xe1", "warped"];

fn proposition() -> Outcome {
    let mut w = 0.0f64;
    for name in QCC_METRICS {
        for pc in &classify(name).points {
            let q = pc.qcc.as_ref().ok_or_else(|| format!("{name}: no structure at {:?}", pc.point))?;
            let l = pc.l.ok_or_else(|| format!("{name}: L undefined"))?;
            w = w.max((l - q.k_bar).abs());
        }
    }
    ensure(w <= 1e-7, || format!("|L − K̄| = {w:e}"))?;
    let warped = classify("warped");
    ensure(warped.constant_type.is_none() && warped.has(Label::Deszcz), || {
        "warped: L reported constant".into()
    })?;
    let (lo, hi) = warped.l_range.ok_or("warped: no L range")?;
    ensure(hi - lo > 1e-2, || format!("warped: L range [{lo}, {hi}]"))?;
    let mut w_oracle = 0.0f64;
    for pc in &warped.points {
        let t = pc.point[0];
        let oracle = t.sin() / (2.0 + t.sin());
        w_oracle = w_oracle.max((pc.l.ok_or("warped: L undefined")? - oracle).abs());
    }
    ensure(w_oracle <= 1e-7, || format!("warped |L − sin t/(2 + sin t)| = {w_oracle:e}"))?;
    Ok(format!("|L − K̄| {w:.1e}, warped L ∈ [{lo:.3}, {hi:.3}] vs oracle {w_oracle:.1e}"))
}

fn theorem_one() -> Outcome {
    let r = classify("s2xh2");
    let mut w_c = 0.0f64;
    let mut w_mid = 0.0f64;
    for pc in &r.points {
        // Undo the 1 + ‖R‖ normalization to compare the absolute norm.
        w_c = w_c.max(pc.residuals.weyl.ok_or("no Weyl")? * (1.0 + pc.residuals.riemann));
        let q = pc.qcc.as_ref().ok_or("s2xh2: no structure")?;
        let k = q.k.ok_or("s2xh2: no K")?;
        ensure(q.q == 2 && pc.spectrum.multiplicities() == vec![2, 2], || format!("q = {}", q.q))?;
        ensure(
            (k - 1.0).abs() <= 1e-8 && (q.k_perp + 1.0).abs() <= 1e-8 && q.k_bar.abs() <= 1e-8,
            || format!("(K, K⊥, K̄) = ({k}, {}, {})", q.k_perp, q.k_bar),
        )?;
        w_mid = w_mid.max((q.k_bar - 0.5 * (k + q.k_perp)).abs());
    }
    ensure(w_c <= 1e-9, || format!("s2xh2 C = {w_c:e}"))?;
    ensure(w_mid <= 1e-9, || format!("midpoint {w_mid:e}"))?;
    for l in [Label::ConformallyFlat, Label::QuasiEinstein, Label::QuasiConstantCurvature] {
        ensure(r.has(l), || format!("s2xh2 lacks {l}"))?;
    }
    let g = classify("generic4");
    for l in [Label::ConformallyFlat, Label::QuasiEinstein, Label::QuasiConstantCurvature] {
        ensure(g.points.iter().all(|p| !p.has(l)), || format!("generic4 has {l} somewhere"))?;
    }
    let t1 = check(CheckId::T1).run(&[subject("s2xh2"), subject("generic4")]);
    ensure(t1.status == Status::Pass, || format!("T1 {}", t1.status))?;
    Ok(format!("s2xh2 ‖C‖ {w_c:.1e}, midpoint {w_mid:.1e}; generic4 fails both sides"))
}

fn run_checks(ids: &[CheckId], names: &[&str]) -> Result<f64, String> {
    let subjects: Vec<Subject> = names.iter().map(|n| subject(n)).collect();
    let mut w = 0.0f64;
    for id in ids {
        let r = check(*id).run(&subjects);
        ensure(r.status == Status::Pass, || {
            let wit = r.witnesses().next().map(|w| format!("{} at {:?}: {}", w.metric, w.point, w.detail));
            format!("{id} {}: {wit:?}", r.status)
        })?;
        ensure(r.directions.iter().all(|d| d.instances > 0), || format!("{id} has a vacuous direction"))?;
        w = w.max(r.worst_residual.unwrap_or(0.0));
    }
    Ok(w)
}

fn theorems_two_to_four() -> Outcome {
    let dim3: Vec<&str> = catalog::entries()
        .iter()
        .filter(|e| e.metric.dim() == 3)
        .map(|e| e.name)
        .collect();
    let w3 = run_checks(&[CheckId::T2, CheckId::T3], &dim3)?;
    ensure(w3 <= 1e-7, || format!("worst residual {w3:e}"))?;
    let w4 = run_checks(&[CheckId::T4], &["e4", "s4", "h4", "s2xh2", "s3xe1", "generic4"])?;
    ensure(w4 <= 1e-7, || format!("worst residual {w4:e}"))?;
    Ok(format!("{} metrics in dimension 3, worst {w3:.1e}; n = 4 worst {w4:.1e}", dim3.len()))
}

fn theorem_l() -> Outcome {
    let mut w = 0.0f64;
    let mut metrics = 0;
    for e in catalog::entries() {
        let r = classify_metric(&e.metric, SAMPLES, &ClassifyConfig::default()).map_err(|e| e.to_string())?;
        if !r.has(Label::ConformallyFlat) {
            continue;
        }
        metrics += 1;
        for pc in r.points.iter().filter(|p| p.has(Label::Deszcz)) {
            w = w.max(pc.residuals.ricci_deszcz);
        }
    }
    ensure(w <= 1e-7, || format!("‖R·S − L ∧g·S‖/(1 + ‖R·S‖) = {w:e}"))?;
    Ok(format!("{metrics} conformally flat metrics, worst {w:.1e}"))
}

fn probes() -> Outcome {
    let m = entry("sol").metric;
    let cfg = ClassifyConfig::default();
    let mut w_sol = 0.0f64;
    for pc in &classify("sol").points {
        let q = pc.qcc.as_ref().ok_or("sol: no structure")?;
        let pack = curvature_pack(&m, &pc.point).map_err(|e| e.to_string())?;
        let (t, rr) = qcc_probe_values(&pack, &q.d_basis[0], &q.d_perp_basis[0], &q.d_perp_basis[1])
            .map_err(|e| e.to_string())?;
        w_sol = w_sol.max((t - 2.0).abs()).max((rr + 2.0).abs());
    }
    ensure(w_sol <= 1e-8, || format!("sol probes off by {w_sol:e}"))?;
    let mut w = 0.0f64;
    for name in QCC_METRICS {
        let r = classify_metric(&entry(name).metric, SAMPLES, &cfg).map_err(|e| e.to_string())?;
        for pc in &r.points {
            w = w.max(pc.qcc.as_ref().ok_or("no structure")?.diagnostics.probe_residual);
        }
    }
    ensure(w <= 1e-7, || format!("probe residual {w:e}"))?;
    Ok(format!("sol (2, −2) within {w_sol:.1e}; all structures within {w:.1e}"))
}

fn ricci_bookkeeping() -> Outcome {
    let mut w = 0.0f64;
    for name in QCC_METRICS {
        for pc in &classify(name).points {
            let d = &pc.qcc.as_ref().ok_or("no structure")?.diagnostics;
            w = w
                .max(d.rho_residual)
                .max(d.rho_perp_residual)
                .max(d.tau_residual)
                .max(d.profile_residual);
            ensure(!d.profile_interior_extremum, || format!("{name}: interior extremum at {:?}", pc.point))?;
        }
    }
    ensure(w <= 1e-8, || format!("Ricci bookkeeping residual {w:e}"))?;
    Ok(format!("worst {w:.1e}, extrema at the endpoints"))
}

fn labels_per_point(r: &ClassificationReport) -> Vec<BTreeSet<Label>> {
    r.points.iter().map(|p: &PointClassification| p.labels.clone()).collect()
}

fn robustness() -> Outcome {
    let cfg = ClassifyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut w_fd = 0.0f64;
    for e in catalog::entries() {
        let m = &e.metric;
        for _ in 0..100 {
            let p: Vec<f64> = m.domain().iter().map(|(lo, hi)| rng.gen_range(*lo..=*hi)).collect();
            w_fd = w_fd.max(common::jet_fd_error(m, &p));
        }
    }
    ensure(w_fd <= 1e-5, || format!("jets vs finite differences {w_fd:e}"))?;

    for e in catalog::entries() {
        let m = &e.metric;
        let n = m.dim();
        let pts = sample_points(m.domain(), 20, 42);
        let base = labels_per_point(&classify_at(m, &pts, &cfg).map_err(|e| e.to_string())?);
        for lambda in [0.5, 2.0] {
            let scaled = classify_at(&m.scaled(lambda * lambda), &pts, &cfg).map_err(|e| e.to_string())?;
            ensure(labels_per_point(&scaled) == base, || format!("{}: labels change under λ = {lambda}", e.name))?;
        }
        let a = common::chart_change(n);
        let inv = a.clone().try_inverse().ok_or("singular chart change")?;
        let names: Vec<String> = (1..=n).map(|k| format!("y{k}")).collect();
        let pulled = m.linear_pullback(&a, names).map_err(|e| e.to_string())?;
        let ys: Vec<Vec<f64>> = pts
            .iter()
            .map(|x| (&inv * nalgebra::DVector::from_column_slice(x)).iter().copied().collect())
            .collect();
        let moved = classify_at(&pulled, &ys, &cfg).map_err(|e| e.to_string())?;
        ensure(labels_per_point(&moved) == base, || format!("{}: labels change under the chart change", e.name))?;
    }

    for name in ["sol", "warped", "generic4"] {
        let m = entry(name).metric;
        let json = || {
            let r = classify_metric(&m, SAMPLES, &cfg).expect("classification");
            JsonReport::new(MetricInfo::new(name, &m), SAMPLES, &r).to_json()
        };
        ensure(json() == json(), || format!("{name}: JSON differs between runs"))?;
    }
    Ok(format!("jets vs differences {w_fd:.1e}; labels invariant; JSON bit-identical"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("space forms: R = cG, Einstein, C = 0", space_forms),
        ("Thurston geometries: Sol L = −1, Nil L = 1/4, semi-symmetric products", thurston),
        ("quasi space forms have L = K̄; warped L matches its oracle", proposition),
        ("S2 x H2 is a conformally flat quasi space form; generic4 is not", theorem_one),
        ("quasi-Einstein ⇔ QCC and Deszcz ⇔ CC ∨ QCC", theorems_two_to_four),
        ("C = 0: R·S = L ∧g·S with L from R·R", theorem_l),
        ("probe evaluations of ∧g·R and R·R", probes),
        ("Ricci curvatures and profile of quasi space forms", ricci_bookkeeping),
        ("finite differences, scaling and chart invariance, determinism", robustness),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}: {name} [{detail}] ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} [{why}] ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
