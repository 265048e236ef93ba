//! One function per subcommand. Each returns the `result` object of the
//! report; the caller wraps it with the version and the resolved config.

use crate::args::*;
use qkit::algorithms::{self as alg, hhl::named_rhs, qaoa::qaoa_sampled};
use qkit::circuit::{emit_qasm, exact_distribution, parse_qasm};
use qkit::qec::{run_ghz_test, QecNoise};
use qkit::qstate::index_to_bits;
use qkit::stateprep::{prep_four_qubit, prep_single, prep_two_qubit, synth_two_qubit_gate};
use qkit::tomography::{self as tomo, MeasurementRecord, MlConfig, Povm};
use qkit::transforms::{qft_circuit, Oracle, Part};
use qkit::{c64, CMatrix, DensityMatrix, NoiseModel, StateVector, C64};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

/// Why a command failed; each kind has its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// Input that could not be parsed (QASM, JSON files).
    Parse(String),
    /// A valid request that failed while running.
    Execution(String),
    /// Parameters rejected by validation.
    Params(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Execution(_) => 3,
            Failure::Params(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Execution(m) | Failure::Params(m) => m,
        }
    }
}

impl From<qkit::Error> for Failure {
    fn from(e: qkit::Error) -> Self {
        use qkit::Error as E;
        match e {
            E::Parse { .. } => Failure::Parse(e.to_string()),
            E::Execution(_) | E::Unroutable(..) => Failure::Execution(e.to_string()),
            _ => Failure::Params(e.to_string()),
        }
    }
}

type Out = Result<Value, Failure>;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn params(msg: impl Into<String>) -> Failure {
    Failure::Params(msg.into())
}

/// Parses a JSON amplitude list: `[[re, im], …]` or `[re, …]`.
fn parse_amplitudes(text: &str) -> Result<Vec<C64>, Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| params(format!("amplitude list is not JSON: {e}")))?;
    let items = v.as_array().ok_or_else(|| params("amplitudes must be a JSON array"))?;
    items.iter().map(parse_complex).collect()
}

fn parse_complex(v: &Value) -> Result<C64, Failure> {
    if let Some(x) = v.as_f64() {
        return Ok(c64(x, 0.0));
    }
    match v.as_array().map(|a| a.iter().map(Value::as_f64).collect::<Vec<_>>()) {
        Some(p) if p.len() == 2 && p.iter().all(Option::is_some) => Ok(c64(p[0].unwrap(), p[1].unwrap())),
        _ => Err(params(format!("{v} is neither a number nor an [re, im] pair"))),
    }
}

fn parse_state(text: &str) -> Result<StateVector, Failure> {
    Ok(StateVector::normalized(parse_amplitudes(text)?)?)
}

fn amplitude_map(s: &StateVector) -> Value {
    let n = s.n_qubits();
    let m: Map<String, Value> = s.amps().iter().enumerate().map(|(i, a)| (index_to_bits(i, n), json!([a.re, a.im]))).collect();
    Value::Object(m)
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect())).collect())
}

fn read_file(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn run(a: &RunArgs, seed: u64) -> Out {
    let circuit = parse_qasm(&read_file(&a.path)?)?;
    let noise = NoiseModel::new(a.over_rotation, a.bitflip, a.idle_flip)?;
    let exec = |e: qkit::Error| match e {
        qkit::Error::Invalid(m) => Failure::Params(m),
        other => Failure::Execution(other.to_string()),
    };
    match a.mode {
        Mode::Statevector => {
            if !noise.is_noiseless() {
                return Err(params("noise needs --mode sampled"));
            }
            let s = circuit.run_statevector().map_err(exec)?;
            let all: Vec<usize> = (0..s.n_qubits()).collect();
            Ok(json!({
                "n_qubits": s.n_qubits(),
                "amplitudes": amplitude_map(&s),
                "probabilities": exact_distribution(&s, &all),
            }))
        }
        Mode::Sampled => {
            if a.shots == 0 {
                return Err(params("--shots must be at least 1 in sampled mode"));
            }
            let h = circuit.sample(a.shots, Some(&noise), &mut qkit::seeded(seed)).map_err(exec)?;
            Ok(to_value(&h))
        }
    }
}

pub fn grover(a: &GroverArgs, seed: u64) -> Out {
    let o = Oracle::from_marked(a.n, &a.targets)?;
    let r = alg::grover_search(&o, &mut qkit::seeded(seed))?;
    Ok(to_value(&r))
}

pub fn bv(a: &BvArgs, seed: u64) -> Out {
    let o = alg::bv_oracle(&a.secret)?;
    Ok(to_value(&alg::bv_hidden_string(&o, &mut qkit::seeded(seed))?))
}

pub fn qft(a: &QftArgs) -> Out {
    if a.n == 0 || a.n > 12 {
        return Err(params("--n must lie in 1..=12"));
    }
    if a.input >> a.n != 0 {
        return Err(params(format!("input {} does not fit in {} qubits", a.input, a.n)));
    }
    let s = qft_circuit(a.n)?.run_statevector_from(&StateVector::basis(a.n, a.input))?;
    Ok(json!({ "n_qubits": a.n, "input": index_to_bits(a.input, a.n), "amplitudes": amplitude_map(&s) }))
}

pub fn shor(a: &ShorArgs, seed: u64) -> Out {
    let r = alg::shor_factor(a.n, &mut qkit::seeded(seed))?;
    let mut v = to_value(&r);
    if a.compiled {
        let dist: BTreeMap<String, f64> = alg::compiled_shor15_distribution()?.into_iter().map(|(k, p)| (k.to_string(), p)).collect();
        v["compiled_15_distribution"] = to_value(&dist);
    }
    Ok(v)
}

pub fn hhl(a: &HhlArgs, seed: u64) -> Out {
    let p = alg::HhlProblem::standard(named_rhs(&a.b)?)?;
    let mut rng = qkit::seeded(seed);
    let axes = match a.observable {
        Some(x) => vec![x],
        None => vec![Axis::X, Axis::Y, Axis::Z],
    };
    let mut out = Map::new();
    for axis in axes {
        let (key, pa) = match axis {
            Axis::X => ("x", alg::PauliAxis::X),
            Axis::Y => ("y", alg::PauliAxis::Y),
            Axis::Z => ("z", alg::PauliAxis::Z),
        };
        let r = alg::hhl_solve(&p, pa, a.shots, &mut rng)?;
        let mut v = to_value(&r);
        v["classical"] = json!(alg::hhl_classical(&p, pa));
        out.insert(key.to_string(), v);
    }
    Ok(json!({ "observables": out }))
}

pub fn qaoa(a: &QaoaArgs, seed: u64) -> Out {
    let g = match (&a.graph, &a.edges) {
        (Some(NamedGraph::Edge), _) => alg::MaxCutInstance::single_edge(),
        (Some(NamedGraph::Triangle), _) => alg::MaxCutInstance::triangle(),
        (Some(NamedGraph::TriangleEdge), _) => alg::MaxCutInstance::triangle_plus_edge(),
        (None, Some(edges)) => {
            let n = a.nodes.unwrap_or_else(|| edges.iter().map(|&(x, y)| x.max(y) + 1).max().unwrap_or(0));
            alg::MaxCutInstance::new(n, edges)?
        }
        (None, None) => return Err(params("give --graph or --edges")),
    };
    let (p, searched) = match (&a.gamma, &a.beta) {
        (Some(gm), Some(bt)) => {
            if a.r.is_some_and(|r| r != gm.len()) {
                return Err(params(format!("--r {} does not match {} angle pairs", a.r.unwrap_or(0), gm.len())));
            }
            (alg::QaoaParams::new(gm.clone(), bt.clone())?, false)
        }
        (None, None) => {
            if a.grid == 0 {
                return Err(params("--grid must be positive"));
            }
            (alg::qaoa_grid_search(&g, a.r.unwrap_or(1), a.grid)?.0, true)
        }
        _ => return Err(params("--gamma and --beta go together")),
    };
    let r = alg::qaoa_maxcut(&g, &p)?;
    let mut v = json!({
        "graph": to_value(&g),
        "gamma": p.gamma,
        "beta": p.beta,
        "grid_searched": searched,
        "exact": to_value(&r),
    });
    if let Some(shots) = a.shots {
        v["sampled"] = to_value(&qaoa_sampled(&g, &p, shots, &mut qkit::seeded(seed))?);
    }
    Ok(v)
}

pub fn walk(a: &WalkArgs, seed: u64) -> Out {
    Ok(to_value(&alg::quantum_walk_cycle(a.nodes, a.steps, a.start, a.shots, &mut qkit::seeded(seed))?))
}

pub fn vqe(a: &VqeArgs, seed: u64) -> Out {
    let m = alg::IsingModel::new(a.n, a.h, !a.open)?;
    let cfg = alg::VqeConfig { restarts: a.restarts, max_iters: a.max_iters, ..Default::default() };
    let kind = match a.ansatz {
        Ansatz::Product => alg::AnsatzKind::Product,
        Ansatz::Entangled => alg::AnsatzKind::Entangled,
    };
    let r = alg::vqe_ising(&m, kind, &cfg, a.shots, &mut qkit::seeded(seed))?;
    let exact = alg::exact_ising_ground(&m)?;
    let mut v = to_value(&r);
    v["exact_energy"] = json!(exact);
    v["relative_error"] = json!((r.energy - exact).abs() / exact.abs().max(f64::MIN_POSITIVE));
    v["optimizer"] = to_value(&cfg);
    Ok(v)
}

pub fn pca(a: &PcaArgs, seed: u64) -> Out {
    Ok(to_value(&alg::qpca_two_feature(&a.x1, &a.x2, a.shots, &mut qkit::seeded(seed))?))
}

pub fn potts(a: &PottsArgs, seed: u64) -> Out {
    let m = match &a.edges {
        Some(e) => {
            let n = a.nodes.unwrap_or_else(|| e.iter().map(|&(x, y, _)| x.max(y) + 1).max().unwrap_or(0));
            alg::PottsModel::new(n, e.clone(), a.q, a.beta)?
        }
        None => alg::PottsModel::triangle(a.q, a.beta)?,
    };
    let z = alg::potts_partition(&m)?;
    let frag = alg::potts_qft2_fragment(a.shots, &mut qkit::seeded(seed))?;
    Ok(json!({ "model": to_value(&m), "partition_function": z, "qft2_fragment": frag }))
}

pub fn schrodinger(a: &SchrodingerArgs) -> Out {
    if a.n == 0 || a.n > 12 {
        return Err(params("--n must lie in 1..=12"));
    }
    let d = 1usize << a.n;
    let potential = a.potential.clone().unwrap_or_else(|| vec![0.0; d]);
    let init = match &a.initial {
        Some(t) => parse_state(t)?,
        None => StateVector::zero(a.n),
    };
    let out = alg::schrodinger_evolve(&init, &potential, a.phi, a.steps)?;
    let all: Vec<usize> = (0..a.n).collect();
    Ok(json!({
        "amplitudes": amplitude_map(&out),
        "probabilities": exact_distribution(&out, &all),
        "norm": out.norm_sqr().sqrt(),
    }))
}

pub fn minfind(a: &MinfindArgs, seed: u64) -> Out {
    if a.values.is_empty() || a.values.iter().any(|v| v.is_nan()) {
        return Err(params("--values needs at least one number and no NaN"));
    }
    let r = alg::min_find(&a.values, &mut qkit::seeded(seed));
    let mut v = to_value(&r);
    v["value"] = json!(a.values[r.index]);
    v["budget"] = json!(alg::min_find_budget(a.values.len()));
    Ok(v)
}

pub fn layered(a: &LayeredArgs, seed: u64) -> Out {
    let mut adj = vec![vec![false; a.nodes]; a.nodes];
    for &(x, y) in &a.edges {
        if x >= a.nodes || y >= a.nodes {
            return Err(params(format!("edge {x}-{y} leaves the graph")));
        }
        adj[x][y] = true;
        adj[y][x] = true;
    }
    let r = alg::layered_partition(&adj, a.source, &mut qkit::seeded(seed))?;
    let classical: Vec<Option<usize>> =
        alg::bfs_layers(&adj, a.source)?.into_iter().map(|l| (l != alg::UNREACHED).then_some(l)).collect();
    let quantum: Vec<Option<usize>> = r.layers.iter().map(|&l| (l != alg::UNREACHED).then_some(l)).collect();
    Ok(json!({
        "layers": quantum,
        "classical_layers": classical,
        "unreached": r.unreached,
        "grover_iterations": r.grover_iterations,
        "searches": r.searches,
    }))
}

pub fn group(a: &GroupArgs, seed: u64) -> Out {
    let g = match a.group.as_str() {
        "s3" => alg::s3(),
        other => match other.strip_prefix('a').and_then(|k| k.parse::<usize>().ok()) {
            Some(k) => alg::a_n(k)?,
            None => return Err(params(format!("unknown group '{other}' (use s3 or aN)"))),
        },
    };
    if a.element >= g.order() {
        return Err(params(format!("element {} not in a group of order {}", a.element, g.order())));
    }
    let rep = alg::regular_representation(&g, a.element)?;
    let width = rep.arity();
    let psi = match &a.psi {
        Some(t) => parse_state(t)?,
        None => StateVector::zero(width),
    };
    let part = match a.part {
        PartArg::Re => Part::Real,
        PartArg::Im => Part::Imaginary,
    };
    let estimate = alg::rep_matrix_element(&g, a.element, &psi, part, a.shots, &mut qkit::seeded(seed))?;
    let exact = psi.inner(&StateVector::new(psi.mul_matrix(&rep.matrix()))?)?;
    Ok(json!({
        "order": g.order(),
        "table": g.table(),
        "element": a.element,
        "qubits": width,
        "estimate": estimate,
        "exact": match part { Part::Real => exact.re, Part::Imaginary => exact.im },
    }))
}

pub fn prep(a: &PrepArgs) -> Out {
    let amps = parse_amplitudes(&a.amplitudes)?;
    let r = match amps.len() {
        2 => prep_single(amps[0], amps[1])?,
        4 => prep_two_qubit(&amps)?,
        16 => prep_four_qubit(&amps)?,
        k => return Err(params(format!("{k} amplitudes; prep handles 2, 4 or 16"))),
    };
    let mut v = to_value(&r);
    v["qasm"] = json!(emit_qasm(&r.circuit)?);
    v["gate_count"] = json!(r.circuit.gate_count());
    Ok(v)
}

pub fn synth(a: &SynthArgs) -> Out {
    let v: Value = serde_json::from_str(&a.unitary).map_err(|e| params(format!("unitary is not JSON: {e}")))?;
    let rows = v.as_array().filter(|r| r.len() == 4).ok_or_else(|| params("unitary must have 4 rows"))?;
    let mut u = CMatrix::zeros(4, 4);
    for (i, row) in rows.iter().enumerate() {
        let cols = row.as_array().filter(|c| c.len() == 4).ok_or_else(|| params("every row needs 4 entries"))?;
        for (j, x) in cols.iter().enumerate() {
            u[(i, j)] = parse_complex(x)?;
        }
    }
    let r = synth_two_qubit_gate(&u)?;
    let mut out = to_value(&r);
    out["qasm"] = json!(emit_qasm(&r.circuit)?);
    Ok(out)
}

fn build_povm(spec: &str) -> Result<Povm, Failure> {
    Ok(match spec {
        "single" => Povm::single_qubit(),
        "bell" => Povm::bell_quorum(),
        s => match s.strip_prefix("products:") {
            Some(k) => Povm::all_products(k.parse().map_err(|_| params(format!("bad qubit count in '{s}'")))?)?,
            None => Povm::pauli(&s.split(',').map(str::trim).collect::<Vec<_>>())?,
        },
    })
}

/// Reads `{"counts": {basis: {label: count}}}` into the POVM's ordering.
/// Outcomes missing from a basis count as zero.
fn read_record(path: &std::path::Path, povm: &Povm) -> Result<MeasurementRecord, Failure> {
    let v: Value = serde_json::from_str(&read_file(path)?).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let counts = v.get("counts").and_then(Value::as_object).ok_or_else(|| Failure::Parse("record needs a \"counts\" object".into()))?;
    let mut rows = Vec::new();
    for b in povm.bases() {
        let row = counts.get(&b.name).and_then(Value::as_object).ok_or_else(|| params(format!("record lacks basis '{}'", b.name)))?;
        if let Some(extra) = row.keys().find(|k| !b.labels.contains(k)) {
            return Err(params(format!("basis '{}' has no outcome '{extra}'", b.name)));
        }
        rows.push(
            b.labels
                .iter()
                .map(|l| row.get(l).map_or(Some(0), Value::as_u64).ok_or_else(|| params(format!("count {}/{l} is not a count", b.name))))
                .collect::<Result<Vec<u64>, _>>()?,
        );
    }
    Ok(MeasurementRecord::from_counts(rows)?)
}

fn density_json(rho: &DensityMatrix) -> Value {
    let spectrum: Vec<Value> = tomo::spectral_report(rho)
        .into_iter()
        .map(|(l, v)| json!({ "eigenvalue": l, "eigenvector": v.to_pairs() }))
        .collect();
    json!({ "matrix": matrix_json(rho.matrix()), "purity": rho.purity(), "spectrum": spectrum })
}

pub fn tomography(a: &TomographyArgs, seed: u64) -> Out {
    let povm = build_povm(&a.povm)?;
    let mut rng = qkit::seeded(seed);
    let (rec, truth) = if let Some(path) = &a.record {
        (read_record(path, &povm)?, None)
    } else {
        let s = match (&a.state, &a.circuit) {
            (Some(t), _) => parse_state(t)?,
            (None, Some(path)) => parse_qasm(&read_file(path)?)?.run_statevector()?,
            (None, None) => return Err(params("give one of --state, --circuit or --record")),
        };
        (tomo::simulate_povm_pure(&s, &povm, a.shots, &mut rng)?, Some(s))
    };
    let mut out = json!({ "record": rec.to_map(&povm), "shots": rec.shots });
    if matches!(a.method, Method::Linear | Method::Both) {
        let raw = tomo::linear_inversion(&rec, &povm)?;
        let rho = tomo::psd_project(&raw)?;
        let mut v = json!({ "raw": matrix_json(&raw), "projected": density_json(&rho) });
        if let Some(s) = &truth {
            v["fidelity"] = json!(rho.fidelity_with_pure(s));
        }
        out["linear"] = v;
    }
    if matches!(a.method, Method::Ml | Method::Both) {
        let est = tomo::ml_estimate(&rec, &povm, &MlConfig::default())?;
        let mut v = density_json(&est.rho);
        v["log_likelihood"] = json!(est.objective.last().copied());
        v["iterations"] = json!(est.iterations);
        if let Some(s) = &truth {
            v["fidelity"] = json!(est.rho.fidelity_with_pure(s));
        }
        out["ml"] = v;
    }
    Ok(out)
}

pub fn qec(a: &QecArgs, seed: u64) -> Out {
    let noise = match a.noise_kind {
        NoiseKind::Bitflip => QecNoise::bitflip(a.p),
        NoiseKind::Rotation => QecNoise::rotation(a.sigma),
        NoiseKind::Both => QecNoise { readout_flip_p: a.p, correlated_sigma: a.sigma, ..Default::default() },
    };
    let r = run_ghz_test(a.idle, &noise, a.shots, &mut qkit::seeded(seed))?;
    let mut v = to_value(&r);
    v["noise"] = to_value(&noise);
    Ok(v)
}
