use proptest::prelude::*;

use super::*;
use crate::ansatz::{build_ansatz, AnsatzSpec, GateMode, Problem};
use crate::circuit::Gate;
use crate::graph::Graph;

fn dc_qaoa(n: usize) -> Circuit {
    let p = Problem::maxcut(&Graph::complete(n)).unwrap();
    let spec = AnsatzSpec::new("ZY-ZZ-X", GateMode::AoqFs, 1).unwrap();
    let c = build_ansatz(&spec, &p.hamiltonian, &vec![0.3; spec.n_params()]).unwrap();
    decompose_circuit(&c).unwrap()
}

/// Line 0-1-...-(n-1) with uniform calibration.
fn uniform_line(n: usize) -> DeviceModel {
    let q = QubitCalibration {
        t1_us: 100.0,
        t2_us: 100.0,
        frequency_ghz: 5.0,
        anharmonicity_ghz: -0.34,
        prob_meas0_prep1: 0.01,
        prob_meas1_prep0: 0.01,
        readout_length_ns: 700.0,
        readout_error: 0.01,
        single_qubit_gate_error: 3e-4,
        estimated: false,
    };
    DeviceModel {
        name: "line".into(),
        n_qubits: n,
        basis_gates: vec![],
        gate_durations_ns: BTreeMap::new(),
        qubits: vec![q; n],
        edges: (1..n).map(|i| EdgeCalibration { qubits: [i - 1, i], cx_error: 0.01, estimated: false }).collect(),
    }
}

fn perfect(mut d: DeviceModel) -> DeviceModel {
    for q in &mut d.qubits {
        q.readout_error = 0.0;
        q.single_qubit_gate_error = 0.0;
        q.t1_us = f64::MAX;
        q.t2_us = f64::MAX;
    }
    for e in &mut d.edges {
        e.cx_error = 0.0;
    }
    d
}

/// Brute force: every ordered injective sequence that is a path, halved.
fn count_paths(d: &DeviceModel, n: usize) -> usize {
    fn go(d: &DeviceModel, adj: &[Vec<usize>], path: &mut Vec<usize>, n: usize) -> usize {
        if path.len() == n {
            return 1;
        }
        let mut total = 0;
        for q in 0..d.n_qubits {
            let ok = !path.contains(&q) && path.last().map_or(true, |&l| adj[l].contains(&q));
            if ok {
                path.push(q);
                total += go(d, adj, path, n);
                path.pop();
            }
        }
        total
    }
    let adj = d.neighbors();
    let ordered = go(d, &adj, &mut Vec::new(), n);
    if n == 1 {
        ordered
    } else {
        ordered / 2
    }
}

#[test]
fn bundled_fixtures_load() {
    let perth = DeviceModel::bundled("perth").unwrap();
    assert_eq!(perth.n_qubits, 7);
    let mut edges: Vec<[usize; 2]> = perth.edges.iter().map(|e| e.qubits).collect();
    edges.sort();
    assert_eq!(edges, vec![[0, 1], [1, 2], [1, 3], [3, 5], [4, 5], [5, 6]]);
    assert_eq!(perth.cx_error(3, 1), Some(0.0045));
    for name in ["ehningen", "cairo"] {
        let d = DeviceModel::bundled(name).unwrap();
        assert_eq!((d.n_qubits, d.edges.len()), (27, 28), "{name}");
    }
    let cairo = DeviceModel::bundled("cairo").unwrap();
    assert!(!cairo.qubits[13].estimated && cairo.qubits[0].estimated);
    assert!(DeviceModel::bundled("tokyo").is_err());
}

#[test]
fn malformed_documents_are_rejected() {
    assert!(matches!(DeviceModel::from_json(""), Err(Error::Parse { .. })));
    let mut d = uniform_line(3);
    d.qubits[1].t1_us = -5.0;
    match DeviceModel::from_json(&d.to_json()) {
        Err(Error::Validation { field, .. }) => assert_eq!(field, "qubits[1].t1_us"),
        other => panic!("{other:?}"),
    }
    let mut d = uniform_line(3);
    d.edges[0].qubits = [0, 9];
    assert!(matches!(d.validate(), Err(Error::Validation { field, .. }) if field == "edges[0].qubits"));
    let mut d = uniform_line(3);
    d.qubits[2].readout_error = 1.5;
    assert!(matches!(d.validate(), Err(Error::Validation { field, .. }) if field == "qubits[2].readout_error"));
    let mut d = uniform_line(3);
    d.gate_durations_ns.insert("CNOT".into(), 300.0);
    assert!(d.validate().is_err());
    let mut d = uniform_line(3);
    d.qubits.pop();
    assert!(d.validate().is_err());
}

#[test]
fn save_then_load_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    for name in BUNDLED {
        let d = DeviceModel::bundled(name).unwrap();
        let path = dir.path().join(format!("{name}.json"));
        save_device(&d, &path).unwrap();
        assert_eq!(load_device(&path).unwrap(), d);
        // document level: the bundled text re-serializes to the same JSON value
        let original: serde_json::Value = serde_json::from_str(match name {
            "perth" => PERTH,
            "ehningen" => EHNINGEN,
            _ => CAIRO,
        })
        .unwrap();
        let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(original, saved, "{name}");
    }
}

#[test]
fn chain_counts_match_brute_force() {
    let perth = DeviceModel::bundled("perth").unwrap();
    for n in 1..=8 {
        assert_eq!(find_linear_chains(&perth, n).len(), count_paths(&perth, n), "n={n}");
    }
    assert_eq!(find_linear_chains(&perth, 2).len(), perth.edges.len());
    assert!(find_linear_chains(&perth, 8).is_empty());
    let cairo = DeviceModel::bundled("cairo").unwrap();
    for n in [2, 3, 5] {
        assert_eq!(find_linear_chains(&cairo, n).len(), count_paths(&cairo, n), "n={n}");
    }
}

#[test]
fn chains_are_simple_paths_unique_up_to_reversal() {
    let d = DeviceModel::bundled("ehningen").unwrap();
    let chains = find_linear_chains(&d, 6);
    let mut seen = BTreeSet::new();
    for ch in &chains {
        assert_eq!(ch.iter().collect::<BTreeSet<_>>().len(), 6);
        assert!(ch.windows(2).all(|w| d.cx_error(w[0], w[1]).is_some()));
        let rev: Vec<usize> = ch.iter().rev().copied().collect();
        assert!(seen.insert(ch.clone().min(rev)));
    }
}

#[test]
fn perfect_calibration_scores_one() {
    let d = perfect(DeviceModel::bundled("perth").unwrap());
    let c = dc_qaoa(3);
    assert_eq!(score_chain(&[2, 1, 3], &c, &d).unwrap(), 1.0);
}

#[test]
fn single_cx_scores_one_minus_edge_error() {
    let mut d = perfect(uniform_line(2));
    d.edges[0].cx_error = 0.01;
    let c = Circuit::from_gates(2, [Gate::cx(0, 1)]).unwrap();
    assert!((score_chain(&[0, 1], &c, &d).unwrap() - 0.99).abs() < 1e-15);
    assert!((score_chain(&[1, 0], &c, &d).unwrap() - 0.99).abs() < 1e-15);
}

#[test]
fn idle_decoherence_enters_the_score() {
    let mut d = perfect(uniform_line(2));
    d.qubits[1].t1_us = 50.0;
    d.qubits[1].t2_us = 40.0;
    let c = Circuit::from_gates(2, [Gate::cx(0, 1), Gate::x(0), Gate::x(0), Gate::x(0), Gate::cx(0, 1)]).unwrap();
    // wire 1 waits through three 35.56 ns pulses
    let t = 3.0 * 35.56;
    let want = (-t / 50e3f64).exp() * (-t / 40e3f64).exp();
    assert!((score_chain(&[0, 1], &c, &d).unwrap() - want).abs() < 1e-12);
}

#[test]
fn score_rejects_bad_chains() {
    let d = DeviceModel::bundled("perth").unwrap();
    let c = dc_qaoa(3);
    assert!(matches!(score_chain(&[1, 2], &c, &d), Err(Error::ChainMismatch(_))));
    assert!(matches!(score_chain(&[0, 2, 4], &c, &d), Err(Error::ChainMismatch(_))));
    assert!(matches!(score_chain(&[1, 1, 2], &c, &d), Err(Error::ChainMismatch(_))));
    assert!(matches!(select(&d, &dc_qaoa(8)), Err(Error::NoChain(8))));
}

#[test]
fn selection_is_exhaustive_argmax_on_fixtures() {
    for name in BUNDLED {
        let d = DeviceModel::bundled(name).unwrap();
        for n in [2, 3, 4, 5] {
            let c = dc_qaoa(n);
            let sel = select(&d, &c).unwrap();
            let mut best = f64::NEG_INFINITY;
            for ch in find_linear_chains(&d, n) {
                let rev: Vec<usize> = ch.iter().rev().copied().collect();
                best = best.max(score_chain(&ch, &c, &d).unwrap()).max(score_chain(&rev, &c, &d).unwrap());
            }
            assert_eq!(sel.score, best, "{name} n={n}");
            assert_eq!(score_chain(&sel.chain, &c, &d).unwrap(), sel.score);
            assert!(sel.score > 0.0 && sel.score <= 1.0);
        }
    }
}

#[test]
fn perth_three_qubit_choice() {
    // the chain through the low-error (1,3) coupler and away from the poor
    // readout of qubits 0 and 4
    let d = DeviceModel::bundled("perth").unwrap();
    let sel = select(&d, &dc_qaoa(3)).unwrap();
    let mut set = sel.chain.clone();
    set.sort();
    assert_eq!(set, vec![1, 2, 3]);
}

#[test]
fn ties_go_to_the_lowest_chain() {
    let d = uniform_line(5);
    let c = Circuit::from_gates(2, [Gate::cx(0, 1)]).unwrap();
    let sel = select(&d, &c).unwrap();
    assert_eq!(sel.chain, vec![0, 1]);
    assert_eq!(sel.candidates, 4);

    let mut d = uniform_line(3);
    d.edges[0].cx_error = 0.02;
    assert_eq!(select(&d, &c).unwrap().chain, vec![1, 2]);
}

#[test]
fn derived_models_follow_calibration() {
    let d = DeviceModel::bundled("cairo").unwrap();
    let t = d.thermal_model(&[12, 15]).unwrap();
    // 334.49 µs reported against T1 = 130.63 µs
    assert_eq!(t.t2_us[1], 2.0 * 130.63);
    assert_eq!(t.durations.get(GateKind::Measure), Some(732.44));
    let noise = d.noise_model(&[12, 13, 14]).unwrap();
    assert!((noise.depolarizing_2q - (0.0116 + 0.0048) / 2.0).abs() < 1e-15);
    assert!(d.noise_model(&[12, 14]).is_err());
    let c = Circuit::new(2);
    let m = d.confusion_model(&[16, 14], &c).unwrap();
    assert_eq!(m.flips[0], (0.1018, 0.0192));
    let mut swapped = Circuit::new(2);
    swapped.set_out_permutation(vec![1, 0]).unwrap();
    let m = d.confusion_model(&[16, 14], &swapped).unwrap();
    assert_eq!(m.flips[1], (0.1018, 0.0192));
}

fn perturb(d: &mut DeviceModel, which: usize, amount: f64) {
    let nq = d.n_qubits;
    let q = which % nq;
    match (which / nq) % 5 {
        0 => d.qubits[q].readout_error = (d.qubits[q].readout_error + amount).min(1.0),
        1 => d.qubits[q].single_qubit_gate_error = (d.qubits[q].single_qubit_gate_error + amount).min(1.0),
        2 => d.qubits[q].t1_us *= 1.0 - amount,
        3 => d.qubits[q].t2_us *= 1.0 - amount,
        _ => {
            let i = which % d.edges.len();
            let e = &mut d.edges[i];
            e.cx_error = (e.cx_error + amount).min(1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn worsening_calibration_never_raises_a_score(which in 0usize..1000, amount in 0.0f64..0.5, n in 2usize..5) {
        let d = DeviceModel::bundled("perth").unwrap();
        let c = dc_qaoa(n);
        let mut worse = d.clone();
        perturb(&mut worse, which, amount);
        for ch in find_linear_chains(&d, n) {
            prop_assert!(score_chain(&ch, &c, &worse).unwrap() <= score_chain(&ch, &c, &d).unwrap());
        }
    }
}
