use curvlab::classify::ClassifyConfig;
use curvlab::theorems::{check, CheckId, Status};

#[test]
fn every_direction_passes_non_vacuously_on_its_default_subset() {
    let cfg = ClassifyConfig::default();
    let mut report = Vec::new();
    let mut bad = false;
    for id in CheckId::ALL {
        let c = check(id);
        let r = c.run(&c.default_subjects(50, &cfg).unwrap());
        for d in &r.directions {
            report.push(format!(
                "{id} {} {:?} n={} worst={:?} {:?}",
                d.arrow, d.status, d.instances, d.worst_residual, d.witnesses.first()
            ));
            bad |= d.status != Status::Pass || d.instances == 0;
        }
        bad |= r.status != Status::Pass;
    }
    assert!(!bad, "\n{}", report.join("\n"));
}
