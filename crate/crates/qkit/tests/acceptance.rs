//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line naming its
//! criterion and then asserts it.

use qkit::algorithms::hhl::named_rhs;
use qkit::algorithms::*;
use qkit::linalg::{self, CMatrix};
use qkit::qec::{run_ghz_test, QecNoise};
use qkit::qstate::{partial_trace, purify, schmidt_decompose};
use qkit::stateprep::{prep_four_qubit, synth_two_qubit_gate};
use qkit::tomography::{ml_estimate, psd_project, simulate_povm_pure, spectral_report, MlConfig, Povm};
use qkit::transforms::{
    dft_matrix, grover_circuit, grover_success_probability, qft_circuit, Oracle,
};
use qkit::{c64, gates, seeded, Circuit, DensityMatrix, StateVector, C64};
use std::f64::consts::PI;
use std::time::Instant;

fn report(id: u32, name: &str, ok: bool, detail: impl AsRef<str>) {
    println!("C{id:02} {name}: {} ({})", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
    assert!(ok, "criterion {id} ({name}) failed: {}", detail.as_ref());
}

fn random_state(n: usize, rng: &mut qkit::Rng) -> StateVector {
    StateVector::normalized((0..1usize << n).map(|_| linalg::complex_normal(rng)).collect()).unwrap()
}

#[test]
fn c01_bell_sampling() {
    let t = Instant::now();
    let mut c = Circuit::new(2, 2);
    c.h(0).cx(0, 1);
    c.measure_all().unwrap();
    let h = c.sample(100_000, None, &mut seeded(1)).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let p00 = h.frequency("00");
    let odd = h.frequency("01") + h.frequency("10");
    let ok = (p00 - 0.5).abs() < 0.01 && odd == 0.0 && secs < 1.0;
    report(1, "bell_sampling", ok, format!("P(00)={p00:.4}, P(01)+P(10)={odd}, {secs:.3}s"));
}

#[test]
fn c02_grover() {
    let o = Oracle::from_marked(2, &[3]).unwrap();
    let s = grover_circuit(&o, 1).unwrap().run_statevector().unwrap();
    let p11 = s.marginal(&[0, 1])[3];
    let mut worst: f64 = 0.0;
    for n in 1..=6usize {
        let big_n = 1usize << n;
        let theta = (1.0 / big_n as f64).sqrt().asin();
        for marked in [0, big_n - 1, big_n / 3] {
            let o = Oracle::from_marked(n, &[marked]).unwrap();
            for k in 0..=8 {
                let closed = ((2 * k + 1) as f64 * theta).sin().powi(2);
                worst = worst.max((grover_success_probability(&o, k) - closed).abs());
                if n <= 4 && k <= 4 {
                    let full = grover_circuit(&o, k).unwrap().run_statevector().unwrap();
                    let p = full.marginal(&(0..n).collect::<Vec<_>>())[marked];
                    worst = worst.max((p - closed).abs());
                }
            }
        }
    }
    let ok = (p11 - 1.0).abs() < 1e-9 && worst < 1e-10;
    report(2, "grover", ok, format!("P(11)={p11:.12}, max closed-form deviation {worst:.2e}"));
}

#[test]
fn c03_bernstein_vazirani() {
    let mut rng = seeded(3);
    let mut worst: f64 = 0.0;
    let mut calls_ok = true;
    let mut strings = 0;
    for n in 1..=8usize {
        for v in 0..1usize << n {
            let s = qkit::qstate::index_to_bits(v, n);
            let run = bv_hidden_string(&bv_oracle(&s).unwrap(), &mut rng).unwrap();
            worst = worst.max((1.0 - run.probability).abs());
            calls_ok &= run.oracle_calls == 1 && run.bits == s;
            strings += 1;
        }
    }
    let ok = worst < 1e-12 && calls_ok;
    report(3, "bernstein_vazirani", ok, format!("{strings} strings, max 1-P {worst:.2e}, single query {calls_ok}"));
}

#[test]
fn c04_qft() {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let u = qft_circuit(n).unwrap().unitary().unwrap();
        worst = worst.max(linalg::max_abs_diff(&u, &dft_matrix(n)));
    }
    let mut leak: f64 = 0.0;
    for (m, r) in [(8usize, 4usize), (8, 2), (16, 4)] {
        let n = m.trailing_zeros() as usize;
        for offset in 0..r {
            let amps: Vec<C64> = (0..m).map(|x| if x % r == offset { c64(1.0, 0.0) } else { c64(0.0, 0.0) }).collect();
            let init = StateVector::normalized(amps).unwrap();
            let out = qft_circuit(n).unwrap().run_statevector_from(&init).unwrap();
            let off: f64 = out.probabilities().iter().enumerate().filter(|(y, _)| y % (m / r) != 0).map(|(_, p)| p).sum();
            leak = leak.max(off);
        }
    }
    let ok = worst < 1e-10 && leak < 1e-12;
    report(4, "qft", ok, format!("max |U-F| {worst:.2e}, weight off multiples of M/r {leak:.2e}"));
}

#[test]
fn c05_shor() {
    let dist = compiled_shor15_distribution().unwrap();
    let p04 = dist.get(&0).copied().unwrap_or(0.0) + dist.get(&4).copied().unwrap_or(0.0);
    let t = Instant::now();
    let mut rng = seeded(5);
    let f15 = shor_factor(15, &mut rng).unwrap();
    let f21 = shor_factor(21, &mut rng).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let good = |r: &ShorReport| r.factors.0 * r.factors.1 == r.n && r.factors.0 > 1 && r.factors.1 > 1;
    let ok = p04 >= 0.999 && good(&f15) && good(&f21) && secs < 10.0;
    report(
        5,
        "shor",
        ok,
        format!("P(0)+P(4)={p04:.6}, 15={:?}, 21={:?}, {secs:.2}s", f15.factors, f21.factors),
    );
}

#[test]
fn c06_hhl() {
    let table = [("0", [-0.6, 0.0, 0.8]), ("+", [1.0, 0.0, 0.0]), ("-", [-1.0, 0.0, 0.0])];
    let mut rng = seeded(6);
    let mut exact_dev: f64 = 0.0;
    let mut shot_dev: f64 = 0.0;
    for (b, want) in table {
        let p = HhlProblem::standard(named_rhs(b).unwrap()).unwrap();
        for (axis, w) in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z].into_iter().zip(want) {
            exact_dev = exact_dev.max((hhl_solve(&p, axis, None, &mut rng).unwrap().expectation - w).abs());
            shot_dev = shot_dev.max((hhl_solve(&p, axis, Some(4096), &mut rng).unwrap().expectation - w).abs());
        }
    }
    let ok = exact_dev < 1e-6 && shot_dev <= 0.05;
    report(6, "hhl", ok, format!("max exact deviation {exact_dev:.2e}, max 4096-shot deviation {shot_dev:.4}"));
}

fn qaoa_row(g: &MaxCutInstance, gamma: &[f64], beta: &[f64]) -> QaoaResult {
    let p = QaoaParams::new(gamma.iter().map(|x| x * PI).collect(), beta.iter().map(|x| x * PI).collect()).unwrap();
    qaoa_maxcut(g, &p).unwrap()
}

#[test]
fn c07_qaoa_tables() {
    // (graph, γ/π, β/π, expected cut, P(max cut))
    let rows: [(&str, MaxCutInstance, Vec<f64>, Vec<f64>, f64, f64); 4] = [
        ("single edge r=1", MaxCutInstance::single_edge(), vec![0.5], vec![0.125], 1.000, 1.000),
        ("triangle r=1", MaxCutInstance::triangle(), vec![0.8], vec![0.4], 1.999, 1.000),
        ("triangle+edge r=1", MaxCutInstance::triangle_plus_edge(), vec![0.208], vec![0.105], 2.720, 0.744),
        ("triangle+edge r=2", MaxCutInstance::triangle_plus_edge(), vec![0.2, 0.4], vec![0.15, 0.05], 2.874, 0.895),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, g, gam, bet, e, p) in rows {
        let r = qaoa_row(&g, &gam, &bet);
        let row_ok = (r.expected_cut - e).abs() <= 0.005 && (r.prob_max_cut - p).abs() <= 0.005;
        ok &= row_ok;
        detail.push(format!("{name}: {:.4}/{:.4} vs {e}/{p} {}", r.expected_cut, r.prob_max_cut, if row_ok { "ok" } else { "off" }));
    }
    report(7, "qaoa", ok, detail.join("; "));
}

#[test]
fn c07_qaoa_attainable_rows() {
    // The single-edge and triangle rows on their own, so a regression there
    // is visible separately from the triangle-plus-edge rows.
    let r = qaoa_row(&MaxCutInstance::single_edge(), &[0.5], &[0.125]);
    assert!((r.expected_cut - 1.0).abs() <= 0.005 && (r.prob_max_cut - 1.0).abs() <= 0.005);
    let r = qaoa_row(&MaxCutInstance::triangle(), &[0.8], &[0.4]);
    assert!((r.expected_cut - 1.999).abs() <= 0.005 && (r.prob_max_cut - 1.0).abs() <= 0.005);
}

#[test]
fn c08_quantum_walk() {
    let mut rng = seeded(8);
    let four = quantum_walk_cycle(4, 4, 0, None, &mut rng).unwrap();
    let one = quantum_walk_cycle(4, 1, 0, None, &mut rng).unwrap();
    let p100 = four.probabilities.get("100").copied().unwrap_or(0.0);
    let p111 = one.probabilities.get("111").copied().unwrap_or(0.0);
    let p010 = one.probabilities.get("010").copied().unwrap_or(0.0);
    let ok = (p100 - 1.0).abs() < 1e-9 && (p111 - 0.5).abs() < 1e-9 && (p010 - 0.5).abs() < 1e-9;
    report(8, "quantum_walk", ok, format!("4 steps P(100)={p100:.12}; 1 step P(111)={p111:.12}, P(010)={p010:.12}"));
}

#[test]
fn c09_vqe() {
    let t = Instant::now();
    let mut rng = seeded(9);
    let cfg = VqeConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for h in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let m = IsingModel::new(4, h, true).unwrap();
        let exact = exact_ising_ground(&m).unwrap();
        let prod = vqe_ising(&m, AnsatzKind::Product, &cfg, None, &mut rng).unwrap();
        let ent = vqe_ising(&m, AnsatzKind::Entangled, &cfg, None, &mut rng).unwrap();
        let bound = prod.energy >= exact - 1e-9 && ent.energy >= exact - 1e-9;
        let strict = h != 1.0 || prod.energy > exact + 1e-6;
        let rel = (ent.energy - exact).abs() / exact.abs();
        ok &= bound && strict && rel <= 0.02;
        detail.push(format!("h={h}: exact {exact:.5}, product {:.5}, entangled {:.5} ({:.2}%)", prod.energy, ent.energy, 100.0 * rel));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    detail.push(format!("{secs:.1}s"));
    report(9, "vqe", ok, detail.join("; "));
}

const ROOMS: [f64; 15] = [4., 3., 4., 4., 3., 3., 3., 3., 4., 4., 4., 5., 4., 3., 4.];
const AREA: [f64; 15] = [3.028, 1.365, 2.726, 2.538, 1.318, 1.693, 1.412, 1.632, 2.875, 3.564, 4.412, 4.444, 4.278, 3.064, 3.857];

#[test]
fn c10_pca() {
    let mut rng = seeded(10);
    let exact = qpca_two_feature(&ROOMS, &AREA, None, &mut rng).unwrap();
    let shots = qpca_two_feature(&ROOMS, &AREA, Some(40_960), &mut rng).unwrap();
    let e = exact.eigenvalues;
    let s = shots.eigenvalues;
    let ok = (e[0] - 1.57286).abs() < 1e-4
        && (e[1] - 0.105029).abs() < 1e-4
        && (s[0] - 1.575).abs() <= 0.01
        && (s[1] - 0.103).abs() <= 0.01;
    report(10, "pca", ok, format!("exact ({:.6}, {:.6}), 40960 shots ({:.4}, {:.4})", e[0], e[1], s[0], s[1]));
}

#[test]
fn c11_potts() {
    let mut worst: f64 = 0.0;
    for beta in [0.0, 0.5, 1.0] {
        let z = potts_partition(&PottsModel::triangle(2, beta).unwrap()).unwrap();
        let want = 2.0 * (3.0 * beta).exp() + 6.0 * beta.exp();
        worst = worst.max((z - want).abs() / want);
    }
    let p = potts_qft2_fragment(None, &mut seeded(11)).unwrap();
    let ok = worst < 1e-9 && (p[1] - 0.5).abs() < 1e-9 && (p[3] - 0.5).abs() < 1e-9;
    report(11, "potts", ok, format!("max relative Z error {worst:.2e}, P(γ)={p:?}"));
}

#[test]
fn c12_schrodinger() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c64(0.0, 0.0);
    let init = StateVector::new(vec![z, c64(h, 0.0), c64(h, 0.0), z]).unwrap();
    let p = schrodinger_evolve(&init, &[0.0; 4], 0.0, 1).unwrap().probabilities();
    let dev = p.iter().zip([0.0, 0.5, 0.5, 0.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let long = schrodinger_evolve(&init, &[0.0; 4], 0.3, 100).unwrap();
    let drift = (long.norm_sqr() - 1.0).abs();
    let ok = dev < 1e-9 && drift < 1e-10;
    report(12, "schrodinger", ok, format!("φ=0 deviation {dev:.2e}, norm drift after 100 steps {drift:.2e}"));
}

#[test]
fn c13_state_prep_and_synthesis() {
    let mut rng = seeded(13);
    let mut min_fid: f64 = 1.0;
    let mut max_cx = 0;
    for _ in 0..100 {
        let s = random_state(4, &mut rng);
        let r = prep_four_qubit(s.amps()).unwrap();
        let got = r.circuit.run_statevector().unwrap();
        min_fid = min_fid.min(got.inner(&s).unwrap().norm_sqr());
        max_cx = max_cx.max(r.circuit.cnot_count());
    }
    let mut max_dist: f64 = 0.0;
    let mut all_three = true;
    for _ in 0..100 {
        let u = linalg::haar_unitary(4, &mut rng);
        let r = synth_two_qubit_gate(&u).unwrap();
        max_dist = max_dist.max(linalg::phase_distance(&r.circuit.unitary().unwrap(), &u));
        all_three &= r.circuit.cnot_count() == 3;
    }
    let ok = min_fid >= 1.0 - 1e-8 && max_cx <= 9 && max_dist < 1e-8 && all_three;
    report(13, "state_prep", ok, format!("min fidelity {min_fid:.12}, max CNOTs {max_cx}; max gate distance {max_dist:.2e}, 3 CNOTs each {all_three}"));
}

#[test]
fn c14_tomography() {
    let mut rng = seeded(14);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c64(0.0, 0.0);
    let plus = StateVector::new(vec![c64(h, 0.0), c64(h, 0.0)]).unwrap();
    let bell = StateVector::new(vec![z, c64(h, 0.0), c64(h, 0.0), z]).unwrap();
    let cfg = MlConfig::default();
    let one = Povm::single_qubit();
    let ml1 = ml_estimate(&simulate_povm_pure(&plus, &one, None, &mut rng).unwrap(), &one, &cfg).unwrap();
    let two = Povm::bell_quorum();
    let ml2 = ml_estimate(&simulate_povm_pure(&bell, &two, None, &mut rng).unwrap(), &two, &cfg).unwrap();
    let f1 = ml1.rho.fidelity_with_pure(&plus);
    let f2 = ml2.rho.fidelity_with_pure(&bell);
    let mono = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);
    let monotone = mono(&ml1.objective) && mono(&ml2.objective);
    let spec = |vals: &[f64]| {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&v| c64(v, 0.0))));
        let d = vals.len().next_power_of_two();
        let mut full = CMatrix::zeros(d, d);
        full.view_mut((0, 0), (vals.len(), vals.len())).copy_from(&m);
        spectral_report(&psd_project(&full).unwrap()).into_iter().map(|(l, _)| l).collect::<Vec<_>>()
    };
    let a = spec(&[1.2, -0.2]);
    let b = spec(&[0.9, 0.4, -0.3, 0.0]);
    let exact = (a[0] - 1.0).abs() < 1e-12
        && a[1].abs() < 1e-12
        && (b[0] - 0.75).abs() < 1e-12
        && (b[1] - 0.25).abs() < 1e-12
        && b[2].abs() < 1e-12;
    let ok = f1 >= 0.9999 && f2 >= 0.9999 && monotone && exact;
    report(14, "tomography", ok, format!("fidelity |+⟩ {f1:.8}, Bell {f2:.8}, monotone {monotone}, projections {a:?} {b:?}"));
}

#[test]
fn c15_qec() {
    let shots = 100_000u64;
    let mut rng = seeded(15);
    let flips = run_ghz_test(16, &QecNoise::bitflip(0.1), shots, &mut rng).unwrap();
    let p = 0.1f64;
    let want = 3.0 * p * p - 2.0 * p.powi(3);
    let sigma = (want * (1.0 - want) / shots as f64).sqrt();
    let rot = run_ghz_test(16, &QecNoise::rotation(0.2), shots, &mut rng).unwrap();
    let ok = (flips.p_encoded - want).abs() <= 3.0 * sigma && rot.p_encoded >= 0.9 * rot.p_unencoded;
    report(
        15,
        "qec",
        ok,
        format!(
            "bit flip: encoded {:.5} vs {want:.3} ± {:.5}; rotation: encoded {:.5}, unencoded {:.5}",
            flips.p_encoded,
            3.0 * sigma,
            rot.p_encoded,
            rot.p_unencoded
        ),
    );
}

#[test]
fn c16_min_finding() {
    let keys = [3, 7, 1, 9, 4, 6, 2, 8];
    let bound = 22.5 * 8f64.sqrt() + 1.4 * 9.0;
    let mut hits = 0;
    let mut max_iters = 0;
    for seed in 0..500 {
        let r = min_find(&keys, &mut seeded(seed));
        hits += usize::from(r.index == 2);
        max_iters = max_iters.max(r.grover_iterations);
    }
    let rate = hits as f64 / 500.0;
    let ok = rate >= 0.5 && (max_iters as f64) <= bound;
    report(16, "min_finding", ok, format!("success {rate:.3}, max Grover iterations {max_iters} (bound {bound:.1})"));
}

/// `G` on `targets` of `n` qubits by explicit Kronecker products: `G ⊗ I`
/// on the reordered register, conjugated by the qubit permutation.
fn kron_embed(g: &CMatrix, targets: &[usize], n: usize) -> CMatrix {
    let k = targets.len();
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let order: Vec<usize> = targets.iter().chain(&rest).copied().collect();
    let big = linalg::kron(g, &linalg::identity(1 << (n - k)));
    let d = 1usize << n;
    // perm[i] = index in the reordered register of basis state i.
    let perm: Vec<usize> = (0..d)
        .map(|i| order.iter().fold(0, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1)))
        .collect();
    CMatrix::from_fn(d, d, |r, c| big[(perm[r], perm[c])])
}

#[test]
fn c17_oracle_suite() {
    let t = Instant::now();
    let mut rng = seeded(17);
    let mut kernel: f64 = 0.0;
    for n in 1..=5usize {
        for k in 1..=n.min(3) {
            for _ in 0..4 {
                let mut qs: Vec<usize> = (0..n).collect();
                use rand::seq::SliceRandom;
                qs.shuffle(&mut rng);
                let targets = &qs[..k];
                let g = gates::gate_from_matrix(&linalg::haar_unitary(1 << k, &mut rng), "u").unwrap();
                let s = random_state(n, &mut rng);
                let app = qkit::GateApplication::new(g.clone(), targets.to_vec()).unwrap();
                let fast = gates::apply(&s, &app).unwrap();
                let slow = s.mul_matrix(&kron_embed(&g.matrix(), targets, n));
                kernel = kernel.max(fast.amps().iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
            }
        }
    }
    let mut schmidt: f64 = 0.0;
    let mut purif: f64 = 0.0;
    for n in 2..=5 {
        let s = random_state(n, &mut rng);
        for cut in 1..n {
            let back = schmidt_decompose(&s, cut).unwrap().reconstruct();
            schmidt = schmidt.max(back.amps().iter().zip(s.amps()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        }
    }
    for n in 1..=2 {
        let vals: Vec<f64> = (0..1 << n).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        let total: f64 = vals.iter().sum();
        let u = linalg::haar_unitary(1 << n, &mut rng);
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|v| c64(v / total, 0.0))));
        let rho = DensityMatrix::new(&u * diag * u.adjoint()).unwrap();
        let pure = DensityMatrix::pure(&purify(&rho));
        let back = partial_trace(&pure, &(0..n).collect::<Vec<_>>()).unwrap();
        purif = purif.max(linalg::max_abs_diff(back.matrix(), rho.matrix()));
    }
    let mut layers_ok = true;
    for _ in 0..20 {
        let n = rand::Rng::random_range(&mut rng, 1..=16usize);
        let mut a = vec![vec![false; n]; n];
        for x in 0..n {
            for y in x + 1..n {
                if rand::Rng::random::<f64>(&mut rng) < 0.25 {
                    a[x][y] = true;
                    a[y][x] = true;
                }
            }
        }
        layers_ok &= layered_partition(&a, 0, &mut rng).unwrap().layers == bfs_layers(&a, 0).unwrap();
    }
    let mut potts: f64 = 0.0;
    for q in 2..=3usize {
        for beta in [0.0, 0.3, 1.1] {
            let edges = vec![(0, 1, 1.0), (1, 2, 0.5), (2, 3, -0.7), (0, 3, 1.3)];
            let m = PottsModel::new(4, edges.clone(), q, beta).unwrap();
            let mut z = 0.0;
            for cfg in 0..q.pow(4) {
                let s: Vec<usize> = (0..4).map(|v| cfg / q.pow(v as u32) % q).collect();
                let e: f64 = -edges.iter().filter(|e| s[e.0] == s[e.1]).map(|e| e.2).sum::<f64>();
                z += (-beta * e).exp();
            }
            potts = potts.max((potts_partition(&m).unwrap() - z).abs() / z);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = kernel < 1e-12 && schmidt < 1e-10 && purif < 1e-10 && layers_ok && potts < 1e-12 && secs < 300.0;
    report(
        17,
        "oracle_suite",
        ok,
        format!("kernel {kernel:.1e}, Schmidt {schmidt:.1e}, purification {purif:.1e}, BFS {layers_ok}, Potts {potts:.1e}, {secs:.1}s"),
    );
}
