use curvlab::catalog::entries;
use curvlab::classify::ClassifyConfig;
use curvlab::sweep::classify_metric;

#[test]
fn every_entry_matches_its_ground_truth() {
    let cfg = ClassifyConfig::default();
    let mut failures = Vec::new();
    for e in entries() {
        let report = classify_metric(&e.metric, 50, &cfg).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        let mism = e.expected.mismatches(&report);
        if !mism.is_empty() {
            failures.push(format!("{}: labels {:?}; {}", e.name, report.labels, mism.iter().take(3).cloned().collect::<Vec<_>>().join("; ")));
        }
    }
    assert!(failures.is_empty(), "\n{}", failures.join("\n"));
}
