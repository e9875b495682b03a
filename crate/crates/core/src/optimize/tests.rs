use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::ansatz::{AnsatzSpec, GateMode, Problem, ProblemHamiltonian};
use crate::circuit::GateKind;
use crate::graph::Graph;
use crate::sim::{simulate, Counts, SimOptions};

fn gd(maxiter: usize, n_starts: usize) -> OptimizationConfig {
    OptimizationConfig { optimizer: Optimizer::GradientDescent, maxiter, n_starts, seed: 7, refine_maxiter: None }
}

fn simplex(maxiter: usize, n_starts: usize) -> OptimizationConfig {
    OptimizationConfig { optimizer: Optimizer::SimplexFree, ..gd(maxiter, n_starts) }
}

#[test]
fn oracle_examples() {
    let tri = Problem::maxcut(&Graph::complete(3)).unwrap();
    let o = brute_force(&tri).unwrap();
    assert_eq!((o.e0, o.e_max), (2.0, 0.0));
    assert_eq!(o.optimal, vec![1, 2, 3, 4, 5, 6]);
    assert_eq!(o.feasible.len(), 8);

    let h = ProblemHamiltonian::new(3, [(0, 1, 0.3)], [(2, -0.5)], 0.1).unwrap();
    let full = Problem::portfolio(h.clone(), Some(3)).unwrap();
    let o = brute_force(&full).unwrap();
    assert_eq!(o.optimal, vec![0b111]);
    assert_eq!(o.feasible, vec![0b111]);

    let empty = Problem::portfolio(ProblemHamiltonian::new(2, [], [], 1.25).unwrap(), None).unwrap();
    let o = brute_force(&empty).unwrap();
    assert_eq!((o.e0, o.e_max), (1.25, 1.25));
    assert_eq!(o.optimal, vec![0, 1, 2, 3]);
}

#[test]
fn oracle_size_limit() {
    let h = ProblemHamiltonian::new(25, [], [], 0.0).unwrap();
    let p = Problem::portfolio(h, None).unwrap();
    assert!(matches!(brute_force(&p), Err(crate::Error::ResourceLimit(_))));
}

#[test]
fn objective_examples() {
    let g = Graph::random_regular(6, 3, 4).unwrap();
    let p = Problem::maxcut(&g).unwrap();
    let spec = AnsatzSpec::new("ZY-ZZ-X", GateMode::AoqFs, 2).unwrap();
    let obj = Objective::new(&p, &spec).unwrap();
    assert!((obj.value(&[0.0; 6]).unwrap() + 9.0 / 2.0).abs() < 1e-12);

    let h = ProblemHamiltonian::new(3, [(0, 1, 0.5), (1, 2, -0.2)], [(0, 0.3)], -1.0).unwrap();
    let port = Problem::portfolio(h.clone(), Some(1)).unwrap();
    let spec = AnsatzSpec::new("ZZ-Z-X", GateMode::Orig, 1).unwrap();
    let obj = Objective::new(&port, &spec).unwrap();
    let mut probs = vec![0.0; 8];
    probs[0b011] = 1.0;
    assert_eq!(obj.value_of(&probs), 0.0);
    probs[0b011] = 0.6;
    probs[0b010] = 0.4;
    assert!((obj.value_of(&probs) - 0.4 * h.energy(0b010)).abs() < 1e-15);

    // literal rule: only feasible outcomes contribute
    let all = Problem::portfolio(h.clone(), Some(3)).unwrap();
    let obj = Objective::new(&all, &spec).unwrap();
    let params = [0.3, -0.2, 0.9];
    let q = obj.probabilities(&params).unwrap();
    assert!((obj.value(&params).unwrap() - q[7] * h.energy(7)).abs() < 1e-14);
}

#[test]
fn quadratic_bowl() {
    let f = |x: &[f64]| (x[0] - 1.0).powi(2);
    for cfg in [gd(1000, 3), simplex(1000, 3)] {
        let r = minimize(&f, 1, &cfg).unwrap();
        assert!((r.params[0] - 1.0).abs() < 1e-3, "{cfg:?} {r:?}");
    }
    let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + (x[0] * x[2] - 0.2).powi(2) + x[2].powi(2);
    for cfg in [gd(2000, 2), simplex(2000, 2)] {
        let r = minimize(&f, 3, &cfg).unwrap();
        let want = minimize(&f, 3, &gd(20_000, 1)).unwrap();
        assert!((r.energy - want.energy).abs() < 1e-6, "{cfg:?}: {} vs {}", r.energy, want.energy);
    }
}

#[test]
fn single_edge_reaches_the_optimum() {
    let p = Problem::maxcut(&Graph::unweighted(2, &[(0, 1)]).unwrap()).unwrap();
    let spec = AnsatzSpec::new("ZZ-X", GateMode::Orig, 1).unwrap();
    let obj = Objective::new(&p, &spec).unwrap();
    for cfg in [gd(1000, 4), simplex(1000, 4)] {
        let res = minimize(&|x: &[f64]| obj.call(x), 2, &cfg).unwrap();
        let r = approximation_ratio_maxcut(-res.energy, 1.0).unwrap();
        assert!(1.0 - r < 1e-6, "{cfg:?}: r = {r}");
    }
}

#[test]
fn one_iteration_returns_the_start() {
    let f = |x: &[f64]| x[0].sin() + x[1].cos();
    for cfg in [gd(1, 1), simplex(1, 1)] {
        let r = minimize(&f, 2, &cfg).unwrap();
        let x0 = initial_point(2, cfg.seed, 0);
        assert_eq!(r.params, x0);
        assert_eq!(r.energy, f(&x0));
    }
}

#[test]
fn starts_are_uniform_and_seeded() {
    let a = initial_point(1000, 3, 2);
    assert_eq!(a, initial_point(1000, 3, 2));
    assert_ne!(a, initial_point(1000, 3, 1));
    assert!(a.iter().all(|v| (0.0..std::f64::consts::TAU).contains(v)));
    let mean = a.iter().sum::<f64>() / 1000.0;
    assert!((mean - std::f64::consts::PI).abs() < 0.2);
}

#[test]
fn failed_starts_are_recorded() {
    let f = |x: &[f64]| if x[0] < 3.0 { f64::NAN } else { 0.0 };
    let r = minimize(&f, 1, &gd(50, 8)).unwrap();
    assert!(r.failed_starts() > 0);
    assert!(r.failed_starts() < 8);
    assert!(minimize(&|_: &[f64]| f64::INFINITY, 1, &gd(5, 3)).is_err());
    assert!(minimize(&f, 0, &gd(5, 3)).is_err());
    assert!(minimize(&f, 1, &gd(0, 3)).is_err());
}

#[test]
fn best_energy_is_min_over_starts_and_deterministic() {
    let f = |x: &[f64]| (3.0 * x[0]).sin() + 0.1 * x[0] * x[0];
    let r = minimize(&f, 1, &gd(200, 6)).unwrap();
    let m = r.starts.iter().filter_map(|s| s.result.as_ref()).map(|s| s.energy).fold(f64::INFINITY, f64::min);
    assert_eq!(r.energy, m);
    assert_eq!(r, minimize(&f, 1, &gd(200, 6)).unwrap());
}

#[test]
fn more_budget_never_hurts() {
    let p = Problem::maxcut(&Graph::random_regular(6, 3, 1).unwrap()).unwrap();
    let spec = AnsatzSpec::new("ZY-ZZ-X", GateMode::AoqFs, 2).unwrap();
    let obj = Objective::new(&p, &spec).unwrap();
    let f = |x: &[f64]| obj.call(x);
    for mk in [gd as fn(usize, usize) -> OptimizationConfig, simplex] {
        let mut last = f64::INFINITY;
        for m in [1, 5, 20, 80] {
            let e = minimize(&f, 6, &mk(m, 2)).unwrap().energy;
            assert!(e <= last);
            last = e;
        }
    }
}

#[test]
fn refinement_continues_from_the_best_start() {
    let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(4);
    let mut cfg = gd(3, 4);
    let plain = minimize(&f, 2, &cfg).unwrap();
    cfg.refine_maxiter = Some(500);
    let refined = minimize(&f, 2, &cfg).unwrap();
    assert!(refined.energy <= plain.energy);
    assert!(refined.iterations > plain.iterations);
}

#[test]
fn fd_gradient_matches_parameter_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let w: Vec<f64> = (0..3).map(|_| rng.random_range(0.2..2.0)).collect();
        let g = Graph::new(3, vec![(0, 1, w[0]), (1, 2, w[1]), (0, 2, w[2])]).unwrap();
        let p = Problem::maxcut(&g).unwrap();
        let spec = AnsatzSpec::new("ZZ-X", GateMode::Orig, 1).unwrap();
        let obj = Objective::new(&p, &spec).unwrap();
        let params = [rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)];
        let fd: Vec<f64> = (0..2)
            .map(|i| {
                let (mut up, mut down) = (params, params);
                up[i] += FD_STEP;
                down[i] -= FD_STEP;
                (obj.value(&up).unwrap() - obj.value(&down).unwrap()) / (2.0 * FD_STEP)
            })
            .collect();
        // shift each gate individually and chain through its angle's dependence
        let c = obj.circuit(&params).unwrap();
        let eval = |k: usize, delta: f64| {
            let mut gates = c.gates().to_vec();
            gates[k].param = Some(gates[k].angle() + delta);
            obj.value_of(&simulate(&c.with_gates(gates).unwrap(), None, &SimOptions::default()).unwrap())
        };
        let mut shift = [0.0; 2];
        for (k, gate) in c.gates().iter().enumerate() {
            match gate.kind {
                GateKind::Zz => {
                    let wij = gate.angle() / params[0];
                    shift[0] += wij * (eval(k, FRAC_PI_4) - eval(k, -FRAC_PI_4));
                }
                GateKind::Rx => shift[1] += eval(k, FRAC_PI_2) - eval(k, -FRAC_PI_2),
                _ => {}
            }
        }
        for i in 0..2 {
            assert!((fd[i] - shift[i]).abs() < 1e-5, "{fd:?} vs {shift:?}");
        }
    }
}

#[test]
fn maxcut_ratio() {
    assert_eq!(approximation_ratio_maxcut(1.5, 2.0).unwrap(), 0.75);
    assert_eq!(approximation_ratio_maxcut(2.0, 2.0).unwrap(), 1.0);
    assert_eq!(approximation_ratio_maxcut(0.0, 2.0).unwrap(), 0.0);
    assert!(approximation_ratio_maxcut(1.0, 0.0).is_err());
    // uniform state on the triangle
    let p = Problem::maxcut(&Graph::complete(3)).unwrap();
    let e = crate::sim::expectation(&[0.125; 8], &p.hamiltonian).unwrap();
    assert_eq!(approximation_ratio_maxcut(e, brute_force(&p).unwrap().e0).unwrap(), 0.75);
}

fn toy_portfolio() -> (Problem, OracleResult) {
    // costs by bitstring with budget 1: 0b001 → −1, 0b010 → 0, 0b100 → 1
    let h = ProblemHamiltonian::new(3, [], [(0, 0.5), (2, -0.5)], 0.0).unwrap();
    let p = Problem::portfolio(h, Some(1)).unwrap();
    let o = brute_force(&p).unwrap();
    (p, o)
}

#[test]
fn portfolio_ratio_examples() {
    let (p, o) = toy_portfolio();
    assert_eq!((o.e0, o.e_max), (-1.0, 1.0));
    assert_eq!(o.optimal, vec![0b001]);
    assert_eq!(approximation_ratio_portfolio(o.e0, &o, true).unwrap(), 1.0);
    assert_eq!(approximation_ratio_portfolio(o.e_max, &o, true).unwrap(), 0.0);
    assert_eq!(approximation_ratio_portfolio(0.0, &o, true).unwrap(), 0.5);
    assert_eq!(approximation_ratio_portfolio(-1.0, &o, false).unwrap(), 0.0);

    let mut probs = vec![0.0; 8];
    probs[0b001] = 0.5;
    probs[0b100] = 0.25;
    probs[0b111] = 0.25;
    // conditioned energy (−0.5 + 0.25)/0.75 = −1/3 → r = 2/3
    assert!((portfolio_ratio(&probs, &p, &o).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    probs[0b111] = 0.5;
    probs[0b001] = 0.25;
    assert_eq!(portfolio_ratio(&probs, &p, &o).unwrap(), 0.0);

    let flat = Problem::portfolio(ProblemHamiltonian::new(2, [], [], 0.0).unwrap(), Some(1)).unwrap();
    assert!(approximation_ratio_portfolio(0.0, &brute_force(&flat).unwrap(), true).is_err());
}

#[test]
fn success_probability_examples() {
    let (_, o) = toy_portfolio();
    let counts: Counts = [(0b001, 100)].into_iter().collect();
    assert_eq!(success_probability(&counts, &o), 1.0);
    let counts: Counts = [(0b011, 100), (0b000, 7)].into_iter().collect();
    assert_eq!(success_probability(&counts, &o), 0.0);
    let counts: Counts = [(0b001, 30), (0b010, 20), (0b100, 10), (0b111, 500)].into_iter().collect();
    assert_eq!(success_probability(&counts, &o), 0.5);
    let mut probs = vec![0.0; 8];
    probs[0b001] = 0.2;
    probs[0b010] = 0.2;
    probs[0b110] = 0.6;
    assert_eq!(success_probability_from_probs(&probs, &o), 0.5);
}

#[test]
fn pipeline_single_candidate_matches_minimize() {
    let p = Problem::maxcut(&Graph::random_regular(6, 3, 2).unwrap()).unwrap();
    let spec = AnsatzSpec::new("ZZ-X", GateMode::Orig, 1).unwrap();
    let cfg = PipelineConfig { optimization: gd(100, 3), order_budget: 1 };
    let run = run_pipeline(&p, std::slice::from_ref(&spec), &cfg).unwrap();
    let obj = Objective::new(&p, &spec).unwrap();
    let direct = minimize(&|x: &[f64]| obj.call(x), 2, &cfg.optimization).unwrap();
    assert_eq!(run.best, 0);
    assert_eq!(run.winner().energy, direct.energy);
    assert!((run.winner().expectation + direct.energy).abs() < 1e-12);
    assert!(run_pipeline(&p, &[], &cfg).is_err());
}

#[test]
fn pipeline_on_complete_graph_keeps_identity_order() {
    let p = Problem::maxcut(&Graph::complete(5)).unwrap();
    let spec = AnsatzSpec::new("ZY-ZZ-X", GateMode::AoqFs, 1).unwrap();
    let cfg = PipelineConfig { optimization: gd(20, 1), order_budget: 10 };
    let run = run_pipeline(&p, &[spec], &cfg).unwrap();
    assert_eq!(run.winner().order, vec![0, 1, 2, 3, 4]);
    assert_eq!(run.winner().cx, 52);
}

#[test]
fn pipeline_ratio_bounds_and_selection() {
    let p = Problem::maxcut(&Graph::random_regular(8, 3, 5).unwrap()).unwrap();
    let specs = [
        AnsatzSpec::new("ZZ-X-ZY", GateMode::Orig, 1).unwrap(),
        AnsatzSpec::new("ZY-ZZ-X", GateMode::AoqFs, 1).unwrap(),
        AnsatzSpec::new("ZZ-X", GateMode::Orig, 1).unwrap(),
    ];
    let cfg = PipelineConfig { optimization: simplex(150, 2), order_budget: 20 };
    let run = run_pipeline(&p, &specs, &cfg).unwrap();
    for c in &run.candidates {
        assert!((-1e-9..=1.0 + 1e-9).contains(&c.r), "{}", c.r);
    }
    let min = run.candidates.iter().map(|c| c.energy).fold(f64::INFINITY, f64::min);
    assert_eq!(run.winner().energy, min);
    // routed candidate's order search never loses to identity
    let edges = p.hamiltonian.zz.keys().copied().collect();
    let id = crate::router::partial_overhead(&edges, 8, &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
    assert!(run.candidates[1].extra_cx <= id);
}

#[test]
fn repeats_and_csv() {
    let p = Problem::maxcut(&Graph::complete(3)).unwrap();
    let spec = AnsatzSpec::new("ZZ-X", GateMode::Orig, 1).unwrap();
    let cfg = PipelineConfig { optimization: gd(30, 2), order_budget: 1 };
    let runs = run_repeats(&p, &[spec], &cfg, 3).unwrap();
    assert_eq!(runs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![7, 8, 9]);
    let mut out = Vec::new();
    write_csv(&mut out, "complete", &runs).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("complete,3,1,ZZ-X,ORIG,7,"));
    assert!(run_repeats(&p, &runs[0].candidates.iter().map(|c| c.spec.clone()).collect::<Vec<_>>(), &cfg, 0).is_err());
}

#[test]
fn mean_and_sem() {
    assert_eq!(mean_sem(&[2.0]), (2.0, 0.0));
    let (m, s) = mean_sem(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(m, 2.5);
    assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
}

