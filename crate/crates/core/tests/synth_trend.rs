use flowtopo::detector::{summarize_flows, FeatureSet};
use flowtopo::flow::{pair_bidirectional, parse_flows_str, serialize_flows};
use flowtopo::synth::{generate_normal, inject_scan, ScanSpec, TrafficProfile};
use flowtopo::{Execution, Feature};

#[test]
fn scan_raises_in_degree_over_every_normal_window() {
    let set = FeatureSet::new(vec![Feature::MaxEcpInDegree, Feature::NUniqueDport]).unwrap();
    for seed in 1..=5 {
        let p = TrafficProfile { seed, ..TrafficProfile::default() };
        let w = 17;
        let flows = inject_scan(&generate_normal(&p).unwrap(), &p, &ScanSpec::default_at(w)).unwrap();
        let vs = summarize_flows(&flows, p.window_width, 0.0, &set, Execution::Sequential).unwrap();
        assert_eq!(vs.len(), p.n_windows());
        let normal_max = vs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != w)
            .map(|(_, v)| v.values[0])
            .fold(0.0, f64::max);
        assert!(vs[w].values[0] > normal_max, "seed {seed}");
        assert_eq!(vs[w].values[1], 101.0);
    }
}

#[test]
fn synthetic_flows_survive_csv_and_pair_up() {
    let p = TrafficProfile::default();
    let flows = generate_normal(&p).unwrap();
    let back = parse_flows_str(&serialize_flows(&flows)).unwrap();
    assert_eq!(back, flows);
    // every request overlaps its reply
    let sessions = pair_bidirectional(&flows);
    assert_eq!(sessions.len() * 2, flows.len());
    assert!(sessions.iter().all(|s| s.constituent_count == 2 && s.server_port < 1024));
}

#[test]
fn execution_modes_agree_on_features() {
    let p = TrafficProfile { duration: 20.0 * 300.0, ..TrafficProfile::default() };
    let flows = inject_scan(&generate_normal(&p).unwrap(), &p, &ScanSpec::default_at(4)).unwrap();
    let set = FeatureSet::default();
    let a = summarize_flows(&flows, 300.0, 0.0, &set, Execution::Sequential).unwrap();
    let b = summarize_flows(&flows, 300.0, 0.0, &set, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
