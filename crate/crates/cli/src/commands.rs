use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use aoqmap_core::ansatz::{build_ansatz_with_order, markowitz_instance, AnsatzSpec, GateMode, Problem, ProblemKind};
use aoqmap_core::circuit::{cx_count, decompose_circuit, depth, from_text, identity_permutation, to_text};
use aoqmap_core::device::{load_device, select, DeviceModel, BUNDLED};
use aoqmap_core::graph::Graph;
use aoqmap_core::mitigate::{
    apply_confusion, counts_distribution, insert_dd, materialize_idles, quasi_expectation, rem_correct, schedule_alap,
    zne_with, ConfusionModel, Extrapolation,
};
use aoqmap_core::optimize::{
    approximation_ratio_maxcut, approximation_ratio_portfolio, brute_force, initial_point, mean_sem, run_pipeline,
    run_repeats, write_csv, OptimizationConfig, OracleResult, PipelineConfig, PipelineResult,
};
use aoqmap_core::router::optimize_initial_order;
use aoqmap_core::sim::{bitstring, expectation, sample, simulate, GateDurations, NoiseModel, SimOptions, ThermalModel};
use aoqmap_core::{Circuit, Gate, GateKind};
use serde::{Deserialize, Serialize};

use crate::args::{
    AnsatzArgs, Command, DeviceSelectArgs, Generator, OptimizeArgs, OptimizerArgs, OracleArgs, ProblemArgs, RouteArgs,
    SimulateArgs,
};
use crate::{CliError, CliResult};

pub fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Route(a) => route(a),
        Command::Optimize(a) => optimize(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Oracle(a) => oracle(a),
        Command::DeviceSelect(a) => device_select(a),
    }
}

fn user(msg: impl Into<String>) -> CliError {
    CliError::User(msg.into())
}

fn output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| user(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| user(format!("cannot read {}: {e}", path.display())))
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// The instance and a label that is enough to regenerate it.
fn load_problem(a: &ProblemArgs) -> CliResult<(Problem, String)> {
    if let Some(p) = &a.problem_file {
        let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok((Problem::from_json(&read(p)?)?, label));
    }
    if let Some(p) = &a.graph_file {
        let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok((Problem::maxcut(&Graph::parse_edge_list(&read(p)?)?)?, label));
    }
    let Some(kind) = a.problem else {
        return Err(user("give one of --problem, --problem-file or --graph-file"));
    };
    let n = a.n.ok_or_else(|| user("--problem needs --n"))?;
    Ok(match kind {
        Generator::Complete => (Problem::maxcut(&Graph::complete(n))?, format!("complete-n{n}")),
        Generator::Regular => {
            let g = Graph::random_regular(n, a.degree, a.instance_seed)?;
            (Problem::maxcut(&g)?, format!("regular{}-n{n}-s{}", a.degree, a.instance_seed))
        }
        Generator::Portfolio => {
            let budget = a.budget.unwrap_or(n / 2);
            (
                markowitz_instance(n, budget, a.risk, a.instance_seed)?,
                format!("portfolio-n{n}-b{budget}-q{}-s{}", a.risk, a.instance_seed),
            )
        }
    })
}

fn ansatz_spec(a: &AnsatzArgs) -> CliResult<AnsatzSpec> {
    Ok(AnsatzSpec::new(&a.sequence, a.mode.parse()?, a.depth)?)
}

fn parse_candidate(s: &str, depth: usize) -> CliResult<AnsatzSpec> {
    let (seq, mode) = s.split_once(':').ok_or_else(|| user(format!("candidate {s:?} is not SEQUENCE:MODE")))?;
    Ok(AnsatzSpec::new(seq, mode.parse::<GateMode>()?, depth)?)
}

fn optimization_config(a: &OptimizerArgs) -> CliResult<OptimizationConfig> {
    let cfg = OptimizationConfig {
        optimizer: a.optimizer.parse()?,
        maxiter: a.maxiter,
        n_starts: a.starts,
        seed: a.seed,
        refine_maxiter: a.refine_maxiter,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Initial order for the routed modes, identity otherwise.
fn initial_order(problem: &Problem, spec: &AnsatzSpec, budget: usize, seed: u64) -> CliResult<Vec<usize>> {
    let n = problem.n();
    if !spec.gate_mode.is_routed() {
        return Ok(identity_permutation(n));
    }
    let edges = problem.hamiltonian.zz.keys().copied().collect();
    Ok(optimize_initial_order(&edges, n, budget, seed)?.0)
}

fn check_params(spec: &AnsatzSpec, params: &[f64]) -> CliResult<()> {
    if params.len() != spec.n_params() {
        return Err(user(format!("{} takes {} angles, got {}", spec.label(), spec.n_params(), params.len())));
    }
    Ok(())
}

fn lowered(problem: &Problem, spec: &AnsatzSpec, params: &[f64], order: &[usize]) -> CliResult<Circuit> {
    check_params(spec, params)?;
    Ok(decompose_circuit(&build_ansatz_with_order(spec, &problem.hamiltonian, params, order)?)?)
}

fn route(a: RouteArgs) -> CliResult<()> {
    let (problem, label) = load_problem(&a.problem)?;
    let spec = ansatz_spec(&a.ansatz)?;
    let params = a.params.clone().unwrap_or_else(|| initial_point(spec.n_params(), a.seed, 0));
    let order = initial_order(&problem, &spec, a.order_budget, a.seed)?;
    let c = lowered(&problem, &spec, &params, &order)?;
    if let Some(p) = &a.circuit_out {
        std::fs::write(p, to_text(&c)).map_err(|e| user(format!("cannot write {}: {e}", p.display())))?;
    }
    let mut w = output(&a.out)?;
    writeln!(w, "problem,n,p,sequence,gate_mode,cx,depth")?;
    writeln!(
        w,
        "{label},{},{},{},{},{},{}",
        problem.n(),
        spec.depth,
        spec.label(),
        spec.gate_mode,
        cx_count(&c)?,
        depth(&c)
    )?;
    w.flush()?;
    Ok(())
}

/// Winning ansatz of an optimization run, reusable by `simulate`.
#[derive(Debug, Serialize, Deserialize)]
struct ParamsDoc {
    problem: String,
    sequence: String,
    gate_mode: String,
    depth: usize,
    order: Vec<usize>,
    params: Vec<f64>,
    energy: f64,
}

impl ParamsDoc {
    fn from_run(label: &str, run: &PipelineResult) -> ParamsDoc {
        let w = run.winner();
        ParamsDoc {
            problem: label.to_string(),
            sequence: w.spec.label(),
            gate_mode: w.spec.gate_mode.to_string(),
            depth: w.spec.depth,
            order: w.order.clone(),
            params: w.params.clone(),
            energy: w.energy,
        }
    }
}

fn optimize(a: OptimizeArgs) -> CliResult<()> {
    let (problem, label) = load_problem(&a.problem)?;
    let specs = a.candidate.iter().map(|s| parse_candidate(s, a.depth)).collect::<CliResult<Vec<_>>>()?;
    let cfg = PipelineConfig { optimization: optimization_config(&a.optimizer)?, order_budget: a.optimizer.order_budget };
    let runs = run_repeats(&problem, &specs, &cfg, a.repeats)?;

    let mut w = output(&a.out)?;
    write_csv(&mut w, &label, &runs)?;
    w.flush()?;

    let mut s: Box<dyn Write> = match &a.summary {
        Some(_) => output(&a.summary)?,
        None => Box::new(io::stderr().lock()),
    };
    writeln!(s, "problem,n,p,sequence,gate_mode,repeats,energy_mean,energy_sem,r_mean,r_sem,iters_mean,iters_sem")?;
    for (i, spec) in specs.iter().enumerate() {
        let pick = |f: &dyn Fn(&PipelineResult) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
        let (e, e_sem) = mean_sem(&pick(&|r| r.candidates[i].energy));
        let (r, r_sem) = mean_sem(&pick(&|r| r.candidates[i].r));
        let (it, it_sem) = mean_sem(&pick(&|r| r.candidates[i].optimization.iterations as f64));
        writeln!(
            s,
            "{label},{},{},{},{},{},{e},{e_sem},{r},{r_sem},{it},{it_sem}",
            problem.n(),
            spec.depth,
            spec.label(),
            spec.gate_mode,
            runs.len()
        )?;
    }
    s.flush()?;

    if let Some(p) = &a.params_out {
        let doc = serde_json::to_string_pretty(&ParamsDoc::from_run(&label, &runs[0]))
            .map_err(|e| CliError::Internal(e.to_string()))?;
        std::fs::write(p, doc + "\n").map_err(|e| user(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn load_device_arg(s: &str) -> CliResult<DeviceModel> {
    if BUNDLED.contains(&s) {
        Ok(DeviceModel::bundled(s)?)
    } else {
        Ok(load_device(s)?)
    }
}

/// Same construction as the acceptance check: a barrier-delimited DELAY on
/// every wire halfway through the gate list.
fn open_idle_window(c: &Circuit, ns: f64) -> CliResult<Circuit> {
    if !(ns > 0.0 && ns.is_finite()) {
        return Err(user("--idle-ns must be positive"));
    }
    let n = c.n_qubits();
    let mid = c.len() / 2;
    let mut gates = c.gates()[..mid].to_vec();
    gates.push(Gate::barrier((0..n).collect()));
    gates.extend((0..n).map(|q| Gate::delay(q, ns)));
    gates.push(Gate::barrier((0..n).collect()));
    gates.extend_from_slice(&c.gates()[mid..]);
    Ok(c.with_gates(gates)?)
}

fn ratio(problem: &Problem, oracle: &OracleResult, e: f64) -> CliResult<f64> {
    Ok(match problem.kind {
        ProblemKind::Maxcut => approximation_ratio_maxcut(e, oracle.e0)?,
        // no distribution survives extrapolation, so the unconditioned
        // expectation is used and the most likely outcome assumed feasible
        ProblemKind::Portfolio => approximation_ratio_portfolio(e, oracle, true)?,
    })
}

fn simulate_cmd(a: SimulateArgs) -> CliResult<()> {
    let (problem, _) = load_problem(&a.problem)?;
    let h = &problem.hamiltonian;
    let n = problem.n();

    let (spec, order, params) = if let Some(p) = &a.params_file {
        let doc: ParamsDoc =
            serde_json::from_str(&read(p)?).map_err(|e| user(format!("{}: {e}", p.display())))?;
        (AnsatzSpec::new(&doc.sequence, doc.gate_mode.parse()?, doc.depth)?, doc.order, doc.params)
    } else {
        let spec = ansatz_spec(&a.ansatz)?;
        match &a.params {
            Some(params) => {
                let order = initial_order(&problem, &spec, a.optimizer.order_budget, a.optimizer.seed)?;
                (spec, order, params.clone())
            }
            None => {
                let cfg = PipelineConfig {
                    optimization: optimization_config(&a.optimizer)?,
                    order_budget: a.optimizer.order_budget,
                };
                let run = run_pipeline(&problem, std::slice::from_ref(&spec), &cfg)?;
                let w = run.winner();
                (spec, w.order.clone(), w.params.clone())
            }
        }
    };
    if order.len() != n {
        return Err(user(format!("order has {} entries for {n} qubits", order.len())));
    }
    let mut circuit = lowered(&problem, &spec, &params, &order)?;
    if let Some(ns) = a.idle_ns {
        circuit = open_idle_window(&circuit, ns)?;
    }

    let (noise, durations, confusion) = match &a.device {
        Some(d) => {
            let device = load_device_arg(d)?;
            let chain = match &a.chain {
                Some(c) => c.clone(),
                None => select(&device, &circuit)?.chain,
            };
            if chain.len() != n {
                return Err(user(format!("chain has {} qubits, circuit has {n}", chain.len())));
            }
            (device.noise_model(&chain)?, device.durations(), device.confusion_model(&chain, &circuit)?)
        }
        None => {
            let (e1, e2) = match a.eps {
                Some(e) => (e, (10.0 * e).min(1.0)),
                None => (a.eps1.unwrap_or(0.0), a.eps2.unwrap_or(0.0)),
            };
            let mut noise = NoiseModel::depolarizing(e1, e2)?;
            let durations = GateDurations::default();
            if let (Some(t1), Some(t2)) = (a.t1, a.t2) {
                noise = noise.with_thermal(ThermalModel::uniform(n, t1, t2, durations.clone())?)?;
            }
            (noise, durations, ConfusionModel::new(vec![(a.readout, a.readout); n])?)
        }
    };
    let method: Extrapolation = a.extrapolation.parse()?;
    let opts = SimOptions { trajectories: a.trajectories, seed: a.optimizer.seed, ..SimOptions::default() };

    let ideal = expectation(&simulate(&circuit, None, &opts)?, h)?;
    let oracle = brute_force(&problem)?;
    let sc = schedule_alap(&circuit, &durations)?;
    let mut variants = vec![("raw", materialize_idles(&sc)?)];
    if a.dd {
        let x = durations.get(GateKind::X).ok_or(aoqmap_core::Error::MissingDuration(GateKind::X))?;
        variants.push(("dd", insert_dd(&sc, x)?));
    }

    let exact = |c: &Circuit| expectation(&simulate(c, Some(&noise), &opts)?, h);
    // readout noise applied to sampled counts, optionally corrected
    let sampled = |c: &Circuit, correct: bool| -> aoqmap_core::Result<f64> {
        let probs = simulate(c, Some(&noise), &opts)?;
        let counts = apply_confusion(&sample(&probs, a.shots, opts.seed)?, &confusion, opts.seed.wrapping_add(1))?;
        if correct {
            Ok(quasi_expectation(&rem_correct(&counts, &confusion)?, h))
        } else {
            Ok(quasi_expectation(&counts_distribution(&counts), h))
        }
    };

    let mut rows: Vec<(String, f64)> = Vec::new();
    let readout_modes: &[(bool, &str)] = if a.rem { &[(false, ""), (true, "+rem")] } else { &[(false, "")] };
    for (name, c) in &variants {
        for &(correct, suffix) in readout_modes {
            let eval = |c: &Circuit| if a.rem { sampled(c, correct) } else { exact(c) };
            rows.push((format!("{name}{suffix}"), eval(c)?));
            if a.zne {
                let rep = zne_with(c, &a.scales, method, eval)?;
                let base = if *name == "raw" { "zne".to_string() } else { format!("{name}+zne") };
                rows.push((format!("{base}{suffix}"), rep.mitigated));
            }
        }
    }

    let mut w = output(&a.out)?;
    writeln!(w, "method,energy,ideal,abs_error,r,r_gt_1")?;
    for (name, e) in rows {
        let r = ratio(&problem, &oracle, e)?;
        writeln!(w, "{name},{e},{ideal},{},{r},{}", (e - ideal).abs(), r > 1.0)?;
    }
    w.flush()?;
    Ok(())
}

fn oracle(a: OracleArgs) -> CliResult<()> {
    let (problem, label) = load_problem(&a.problem)?;
    let o = brute_force(&problem)?;
    let n = problem.n();
    let mut w = output(&a.out)?;
    writeln!(w, "problem,n,e0,e_max,optimal")?;
    let optimal: Vec<String> = o.optimal.iter().map(|&b| bitstring(b, n)).collect();
    writeln!(w, "{label},{n},{},{},{}", o.e0, o.e_max, optimal.join(" "))?;
    w.flush()?;
    Ok(())
}

fn device_select(a: DeviceSelectArgs) -> CliResult<()> {
    let device = load_device_arg(&a.device)?;
    let c = match &a.circuit {
        Some(p) => from_text(&read(p)?)?,
        None => {
            let (problem, _) = load_problem(&a.problem)?;
            let spec = ansatz_spec(&a.ansatz)?;
            let params = a.params.clone().unwrap_or_else(|| initial_point(spec.n_params(), a.seed, 0));
            lowered(&problem, &spec, &params, &identity_permutation(problem.n()))?
        }
    };
    let sel = select(&device, &c)?;
    let mut w = output(&a.out)?;
    writeln!(w, "device,n,chain,score,candidates")?;
    writeln!(w, "{},{},{},{},{}", device.name, c.n_qubits(), join(&sel.chain, " "), sel.score, sel.candidates)?;
    w.flush()?;
    Ok(())
}
