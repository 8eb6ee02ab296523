//! JSON and text renderings of classification reports and check results.
//!
//! Both renderings are built from the same [`JsonReport`] value, so they
//! always carry the same labels and residuals. Floats print in shortest
//! round-trip form.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::{ClassificationReport, ClassifyConfig, Residuals};
use crate::dsl::MetricField;
use crate::theorems::{CheckResult, Status};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricInfo {
    pub name: String,
    pub dim: usize,
    pub coords: Vec<String>,
    pub domain: Vec<(f64, f64)>,
}

impl MetricInfo {
    pub fn new(name: &str, m: &MetricField) -> Self {
        MetricInfo {
            name: name.to_string(),
            dim: m.dim(),
            coords: m.coords().to_vec(),
            domain: m.domain().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub samples: usize,
    pub seed: u64,
    pub planes: usize,
    pub tol_cluster: f64,
    pub tol_label: f64,
    pub tol_distinct: f64,
    pub tol_const: f64,
    pub tol_dep: f64,
    pub tol_check: f64,
}

impl RunInfo {
    pub fn new(samples: usize, cfg: &ClassifyConfig) -> Self {
        let t = &cfg.tol;
        RunInfo {
            samples,
            seed: cfg.seed,
            planes: cfg.planes,
            tol_cluster: t.cluster,
            tol_label: t.label,
            tol_distinct: t.distinct,
            tol_const: t.constant,
            tol_dep: t.dep,
            tol_check: t.check,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciJson {
    pub values: Vec<f64>,
    pub mults: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct QccJson {
    pub q: usize,
    pub K: Option<f64>,
    pub Kperp: f64,
    pub Kbar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct PointJson {
    pub coords: Vec<f64>,
    pub labels: BTreeSet<String>,
    pub residuals: Residuals,
    pub L: Option<f64>,
    pub ricci: RicciJson,
    pub qcc: Option<QccJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct AggregateJson {
    pub labels: BTreeSet<String>,
    pub constant_type: Option<f64>,
    pub L_range: Option<(f64, f64)>,
    pub notes: Vec<String>,
}

/// The documented report schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonReport {
    pub metric: MetricInfo,
    pub config: RunInfo,
    pub points: Vec<PointJson>,
    pub aggregate: AggregateJson,
}

impl JsonReport {
    pub fn new(metric: MetricInfo, samples: usize, report: &ClassificationReport) -> Self {
        let names = |ls: &BTreeSet<crate::classify::Label>| ls.iter().map(|l| l.name().to_string()).collect();
        JsonReport {
            metric,
            config: RunInfo::new(samples, &report.config),
            points: report
                .points
                .iter()
                .map(|p| PointJson {
                    coords: p.point.clone(),
                    labels: names(&p.labels),
                    residuals: p.residuals,
                    L: p.l,
                    ricci: RicciJson {
                        values: p.spectrum.values(),
                        mults: p.spectrum.multiplicities(),
                    },
                    qcc: p.qcc.as_ref().map(|s| QccJson {
                        q: s.q,
                        K: s.k,
                        Kperp: s.k_perp,
                        Kbar: s.k_bar,
                    }),
                })
                .collect(),
            aggregate: AggregateJson {
                labels: names(&report.labels),
                constant_type: report.constant_type,
                L_range: report.l_range,
                notes: report.notes.clone(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let m = &self.metric;
        let c = &self.config;
        let _ = writeln!(s, "metric {} (n = {}, coords {})", m.name, m.dim, m.coords.join(", "));
        let _ = writeln!(
            s,
            "config samples={} seed={} planes={} tol_cluster={:e} tol_label={:e} tol_distinct={:e} tol_const={:e} tol_dep={:e} tol_check={:e}",
            c.samples, c.seed, c.planes, c.tol_cluster, c.tol_label, c.tol_distinct, c.tol_const, c.tol_dep, c.tol_check
        );
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(s, "point {i} at {}", fmt_vec(&p.coords));
            let _ = writeln!(s, "  labels: {}", join(&p.labels));
            let r = &p.residuals;
            let _ = writeln!(
                s,
                "  residuals: riemann={} tachibana={} einstein={} weyl={} semi_symmetric={} deszcz={} ricci_deszcz={}",
                fe(r.riemann),
                fe(r.tachibana),
                fe(r.einstein),
                fo(r.weyl),
                fe(r.semi_symmetric),
                fo(r.deszcz),
                fe(r.ricci_deszcz)
            );
            let mults: Vec<String> = p.ricci.mults.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(
                s,
                "  L={} ricci values={} mults=[{}]",
                fo(p.L),
                fmt_vec(&p.ricci.values),
                mults.join(", ")
            );
            if let Some(q) = &p.qcc {
                let _ = writeln!(s, "  qcc q={} K={} Kperp={} Kbar={}", q.q, fo(q.K), fe(q.Kperp), fe(q.Kbar));
            }
        }
        let a = &self.aggregate;
        let _ = writeln!(s, "aggregate labels: {}", join(&a.labels));
        let _ = writeln!(s, "aggregate constant_type: {}", fo(a.constant_type));
        let range = a.L_range.map_or("none".to_string(), |(lo, hi)| format!("[{}, {}]", fe(lo), fe(hi)));
        let _ = writeln!(s, "aggregate L_range: {range}");
        for n in &a.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

fn fe(x: f64) -> String {
    format!("{x:e}")
}

fn fo(x: Option<f64>) -> String {
    x.map_or("none".to_string(), fe)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fe(*x)).collect();
    format!("[{}]", parts.join(", "))
}

fn join(ls: &BTreeSet<String>) -> String {
    if ls.is_empty() {
        "none".to_string()
    } else {
        ls.iter().cloned().collect::<Vec<_>>().join(", ")
    }
}

pub const CHECK_HEADER: &str = "instances verified over the listed metrics; a PASS is not a proof";

pub fn check_to_json(r: &CheckResult) -> String {
    serde_json::to_string_pretty(r).expect("check result is serializable")
}

pub fn check_to_text(r: &CheckResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {CHECK_HEADER}");
    let _ = writeln!(s, "{} ({}): {}", r.id, r.anchor, r.statement);
    let _ = writeln!(s, "metrics: {}", if r.metrics.is_empty() { "none".into() } else { r.metrics.join(", ") });
    if !r.excluded.is_empty() {
        let _ = writeln!(s, "outside hypotheses: {}", r.excluded.join(", "));
    }
    for d in &r.directions {
        let _ = writeln!(
            s,
            "  {} {}: {} ({} instances, worst residual {})",
            d.arrow,
            d.statement,
            d.status,
            d.instances,
            fo(d.worst_residual)
        );
        for w in &d.witnesses {
            let _ = writeln!(s, "    witness {} at {}: {}", w.metric, fmt_vec(&w.point), w.detail);
        }
    }
    let verdict = match r.status {
        Status::Fail => format!("FAIL({})", r.witnesses().count()),
        st => st.to_string(),
    };
    let _ = writeln!(s, "{} {verdict} worst residual {}", r.id, fo(r.worst_residual));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::sweep::classify_metric;

    fn sol_report() -> JsonReport {
        let e = catalog::get("sol").unwrap();
        let cfg = ClassifyConfig::default();
        let r = classify_metric(&e.metric, 4, &cfg).unwrap();
        JsonReport::new(MetricInfo::new("sol", &e.metric), 4, &r)
    }

    #[test]
    fn json_has_documented_fields() {
        let v: serde_json::Value = serde_json::from_str(&sol_report().to_json()).unwrap();
        for k in ["metric", "config", "points", "aggregate"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        let p = &v["points"][0];
        for k in ["coords", "labels", "residuals", "L", "ricci", "qcc"] {
            assert!(p.get(k).is_some(), "{k}");
        }
        assert!(p["ricci"].get("values").is_some() && p["ricci"].get("mults").is_some());
        for k in ["q", "K", "Kperp", "Kbar"] {
            assert!(p["qcc"].get(k).is_some(), "{k}");
        }
        for k in ["labels", "constant_type", "L_range"] {
            assert!(v["aggregate"].get(k).is_some(), "{k}");
        }
    }

    #[test]
    fn text_carries_the_json_labels_and_residuals() {
        let r = sol_report();
        let text = r.to_text();
        for p in &r.points {
            assert!(text.contains(&format!("labels: {}", join(&p.labels))));
            assert!(text.contains(&format!("deszcz={}", fo(p.residuals.deszcz))));
            assert!(text.contains(&format!("tachibana={}", fe(p.residuals.tachibana))));
        }
        assert!(text.contains(&format!("aggregate labels: {}", join(&r.aggregate.labels))));
    }
}
