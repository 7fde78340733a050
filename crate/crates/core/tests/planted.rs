use commdet_core::generate::planted_partition;
use commdet_core::*;

#[test]
fn louvain_recovers_planted_structure() {
    let (g, truth) = planted_partition(400, 50, 8, 1, 11);
    let truth_q = modularity(&g, &truth).unwrap();
    for deterministic in [false, true] {
        let cfg = LouvainConfig {
            deterministic,
            ..LouvainConfig::default()
        };
        let (d, _) = louvain_run(&g, &cfg).unwrap();
        let q = modularity(&g, &d.final_partition).unwrap();
        assert!(q >= truth_q - 0.02, "louvain {q} vs planted {truth_q}");
    }
}

#[test]
fn lpa_recovers_planted_structure() {
    let (g, truth) = planted_partition(200, 50, 10, 1, 5);
    let out = lpa_run(&g, &LpaConfig::default()).unwrap();
    let q = modularity(&g, &out.partition).unwrap();
    let truth_q = modularity(&g, &truth).unwrap();
    assert!(q >= truth_q - 0.1, "lpa {q} vs planted {truth_q}");
    assert!(*out.updates_per_iteration.last().unwrap() == 0 || out.iterations == 100);
}
