//! Acceptance criteria 1–10, one status line each. Runs without the libtest
//! harness so the lines always reach stdout.

use std::process::Command;
use std::time::{Duration, Instant};

use srank::als::CERTIFICATE_TOL;
use srank::circuit::parse;
use srank::claims::{
    classify_m1, cnot_chain_expansion, cnot_chain_with_locals, haar_unitary,
    permutation_isomorphism, random_m1_sweep,
};
use srank::gates::{hadamard, id2, s, CATALOG_NAMES};
use srank::matrix::kron_all;
use srank::schmidt::bipartite_rank;
use srank::{
    als_fit, flattening_lower_bound, matmul_tensor, operator_tensor3, paper_gate, rank_search,
    strassen_certificate, verify_decomposition, AlsConfig, ComplexMatrix, Cut, Tensor3, Verdict,
    IDENTITY_TOL, RANK_TOL,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn finish(
    n: u32,
    name: &str,
    failures: &[String],
    detail: &str,
    start: Instant,
    budget: Duration,
) -> bool {
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let ok = failures.is_empty() && in_time;
    println!(
        "criterion {n:>2} [{}] {name}: {detail} ({:.2}s of {}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    for f in failures {
        println!("             {f}");
    }
    if !in_time {
        println!("             {elapsed:?} exceeds {budget:?}");
    }
    ok
}

fn tensor(name: &str) -> Tensor3 {
    paper_gate(name).unwrap().operator_tensor().unwrap()
}

fn circuit(text: &str) -> ComplexMatrix {
    parse(text).unwrap().evaluate().unwrap()
}

fn criterion_01_unitarity_suite() -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for name in CATALOG_NAMES {
        let g = paper_gate(name).unwrap();
        if !g.claimed_unitary {
            continue;
        }
        checked += 1;
        let d = g.matrix.unitarity_defect();
        worst = worst.max(d);
        if d > IDENTITY_TOL {
            failures.push(format!("{name}: {d:e}"));
        }
    }
    for name in [
        "U3_pauli", "U5_thm1", "U6_thm1", "U7", "U8", "finagler", "M3", "TOFFOLI", "FREDKIN",
    ] {
        if !paper_gate(name).unwrap().claimed_unitary {
            failures.push(format!("{name} not marked unitary"));
        }
    }
    finish(
        1,
        "unitarity suite",
        &failures,
        &format!("{checked} gates, worst |MM†−I| {worst:.1e} ≤ 1e-12"),
        start,
        Duration::from_secs(1),
    )
}

fn criterion_02_certificate_suite() -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, terms) in [
        ("U5_thm1", 5),
        ("U6_thm1", 6),
        ("U7", 8),
        ("U8", 8),
        ("FREDKIN", 4),
        ("finagler", 4),
    ] {
        let g = paper_gate(name).unwrap();
        let d = g.decomposition().unwrap();
        let res = verify_decomposition(&g.operator_tensor().unwrap(), &d).unwrap();
        worst = worst.max(res);
        if d.len() != terms || res > CERTIFICATE_TOL {
            failures.push(format!("{name}: {} terms, residual {res:e}", d.len()));
        }
    }
    let b = paper_gate("bullock16").unwrap();
    let cert = b.certificate.as_ref().unwrap();
    let res = (&cert.reconstruct() - &b.matrix).frobenius_norm();
    worst = worst.max(res);
    if cert.len() != 16 || res > CERTIFICATE_TOL {
        failures.push(format!("bullock16: {} terms, residual {res:e}", cert.len()));
    }
    let st = strassen_certificate();
    let res = verify_decomposition(&matmul_tensor(), &st).unwrap();
    worst = worst.max(res);
    if st.len() != 7 || res > CERTIFICATE_TOL {
        failures.push(format!("Strassen: {} terms, residual {res:e}", st.len()));
    }
    finish(
        2,
        "certificate suite",
        &failures,
        &format!("8 certificates, worst residual {worst:.1e} ≤ 1e-12"),
        start,
        Duration::from_secs(1),
    )
}

fn criterion_03_circuit_identities() -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut check = |label: &str, a: &ComplexMatrix, b: &ComplexMatrix| {
        let d = a.max_abs_diff(b);
        worst = worst.max(d);
        if d > IDENTITY_TOL {
            failures.push(format!("{label}: {d:e}"));
        }
    };
    let i2 = id2();
    let h = hadamard();
    let t3 = paper_gate("TOFFOLI").unwrap().matrix;
    let hc = kron_all(&[i2.clone(), i2.clone(), h.clone()]);
    let phase = &ComplexMatrix::identity(8) - &kron_all(&[s(3), s(3), s(3)]).scale_real(2.0);
    check("T3", &t3, &(&(&hc * &phase) * &hc));
    check("T3 circuit", &t3, &circuit("toffoli 0 1 2"));

    let u3 = paper_gate("U3_circ").unwrap();
    let t_ab_h = srank::gates::cnot().kron(&h);
    check("U3 product", &u3.matrix, &(&(&t_ab_h * &t3) * &hc));
    check(
        "U3 closed form",
        &u3.matrix,
        &u3.certificate.as_ref().unwrap().reconstruct(),
    );

    let u4 = paper_gate("U4").unwrap().matrix;
    check("U4", &u4, &circuit("cnot 1 2\ncnot 0 1"));

    let u5 = paper_gate("U5_circ").unwrap();
    let f3 = paper_gate("FREDKIN").unwrap().matrix;
    check(
        "U5 product",
        &u5.matrix,
        &(&srank::gates::cnot().kron(&i2) * &f3),
    );
    check(
        "U5 expansion",
        &u5.matrix,
        &u5.certificate.as_ref().unwrap().reconstruct(),
    );

    let u6 = paper_gate("U6_circ").unwrap();
    let t_ac = &kron_all(&[s(0), i2.clone(), i2.clone()])
        + &kron_all(&[s(3), i2.clone(), srank::gates::pauli_x()]);
    let h_a = kron_all(&[h.clone(), i2.clone(), i2.clone()]);
    check("U6 product", &u6.matrix, &(&(&t_ac * &h_a) * &u3.matrix));
    check(
        "U6 expansion",
        &u6.matrix,
        &u6.certificate.as_ref().unwrap().reconstruct(),
    );

    let m3 = paper_gate("M3").unwrap();
    check(
        "M3 circuit",
        &m3.matrix,
        &circuit("cnot 2 0\ncnot 1 2\ncnot 0 1"),
    );
    check(
        "M3 expansion",
        &m3.matrix,
        &m3.certificate.as_ref().unwrap().reconstruct(),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for k in 0..20 {
        let (v1, v2, w1, x2) = (
            haar_unitary(2, &mut rng),
            haar_unitary(2, &mut rng),
            haar_unitary(2, &mut rng),
            haar_unitary(2, &mut rng),
        );
        check(
            &format!("local sample {k}"),
            &cnot_chain_with_locals(&v1, &v2, &w1, &x2),
            &cnot_chain_expansion(&v1, &v2, &w1, &x2),
        );
    }
    finish(
        3,
        "circuit identities",
        &failures,
        &format!("12 identities + 20 random locals, worst deviation {worst:.1e} ≤ 1e-12"),
        start,
        Duration::from_secs(1),
    )
}

fn criterion_04_flattening_table() -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, t, want) in [
        ("U3_pauli", tensor("U3_pauli"), [3, 3, 3]),
        ("U4", tensor("U4"), [2, 4, 2]),
        ("U5_thm1", tensor("U5_thm1"), [2, 4, 4]),
        ("matmul", matmul_tensor(), [4, 4, 4]),
    ] {
        let got = flattening_lower_bound(&t, RANK_TOL).unwrap().mode_ranks;
        if got != want {
            failures.push(format!("{name}: {got:?} != {want:?}"));
        }
    }
    for (name, cut, want) in [
        ("TOFFOLI", "A|BC", 2),
        ("FREDKIN", "A|BC", 2),
        ("FREDKIN", "C|AB", 4),
    ] {
        let cut: Cut = cut.parse().unwrap();
        let got = bipartite_rank(
            &paper_gate(name).unwrap().matrix,
            &cut,
            &[2, 2, 2],
            RANK_TOL,
        )
        .unwrap();
        if got != want {
            failures.push(format!("{name} {cut}: {got} != {want}"));
        }
    }
    finish(
        4,
        "flattening table",
        &failures,
        "7 exact integer entries",
        start,
        Duration::from_secs(1),
    )
}

fn matmul_or(name: &str) -> Tensor3 {
    if name == "matmul" {
        matmul_tensor()
    } else {
        tensor(name)
    }
}

fn criterion_05_als_confirmations() -> bool {
    let start = Instant::now();
    let cfg = AlsConfig::default();
    assert_eq!((cfg.seed, cfg.restarts), (0, 50));
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let targets = [
        ("TOFFOLI", 2),
        ("U3_pauli", 3),
        ("U4", 4),
        ("finagler", 4),
        ("FREDKIN", 4),
        ("U5_thm1", 5),
        ("U5_circ", 5),
        ("U6_thm1", 6),
        ("U6_circ", 6),
        ("T_lemma2", 6),
        ("matmul", 7),
        ("U7", 7),
        ("M3", 7),
    ];
    for (name, rank) in targets {
        let fit = als_fit(&matmul_or(name), rank, &cfg).unwrap();
        worst = worst.max(fit.best_residual);
        if !fit.converged || fit.best_residual > 1e-8 || fit.restarts_used > 50 {
            failures.push(format!(
                "{name} rank {rank}: {:e} after {}",
                fit.best_residual, fit.restarts_used
            ));
        }
    }
    finish(
        5,
        "ALS rank confirmations",
        &failures,
        &format!("{} fits, worst residual {worst:.2e} ≤ 1e-8", targets.len()),
        start,
        Duration::from_secs(120),
    )
}

fn criterion_06_als_negative_evidence() -> bool {
    let start = Instant::now();
    let cfg = AlsConfig::default();
    let mut failures = Vec::new();
    let mut lowest = f64::INFINITY;
    let targets = [
        ("U3_pauli", 2),
        ("U5_thm1", 4),
        ("U6_thm1", 5),
        ("U7", 6),
        ("M3", 6),
        ("T_lemma2", 5),
        ("U8", 6),
    ];
    for (name, rank) in targets {
        let fit = als_fit(&tensor(name), rank, &cfg).unwrap();
        lowest = lowest.min(fit.best_residual);
        if fit.converged || fit.best_residual <= 1e-4 || fit.restarts_used != 50 {
            failures.push(format!("{name} rank {rank}: {:e}", fit.best_residual));
        }
    }
    finish(
        6,
        "ALS negative evidence (OPEN-EVIDENCE, heuristic)",
        &failures,
        &format!(
            "{} stalls over 50 restarts, smallest best residual {lowest:.2e} > 1e-4",
            targets.len()
        ),
        start,
        Duration::from_secs(120),
    )
}

fn criterion_07_two_cnot_sweep() -> bool {
    let start = Instant::now();
    let cfg = AlsConfig::default();
    let mut failures = Vec::new();
    let sweep = random_m1_sweep(100, 0, &cfg).unwrap();
    if sweep.agreements != 100 || sweep.outside_two_four != 0 {
        failures.push(format!(
            "{} agreements, {} outside {{2,4}}",
            sweep.agreements, sweep.outside_two_four
        ));
    }
    for (label, w, want) in [("H", hadamard(), 2), ("I", id2(), 4)] {
        let wit = classify_m1(&w).unwrap();
        let t = operator_tensor3(&wit.matrix).unwrap();
        let rep = rank_search(label, &t, wit.certificate.as_ref(), None, &cfg).unwrap();
        if wit.predicted_rank != want || rep.als_upper != Some(want) {
            failures.push(format!(
                "w = {label}: predicted {}, ALS {:?}",
                wit.predicted_rank, rep.als_upper
            ));
        }
    }
    finish(
        7,
        "two-CNOT sweep",
        &failures,
        &format!(
            "{}/100 agree ({} rank 2, {} rank 4), w = H gives 2, w = I gives 4",
            sweep.agreements, sweep.predicted_two, sweep.predicted_four
        ),
        start,
        Duration::from_secs(120),
    )
}

fn criterion_08_strassen_isomorphism() -> bool {
    let start = Instant::now();
    let found = permutation_isomorphism(&tensor("U7"), &matmul_tensor()).unwrap();
    let failures = if found.is_some() {
        vec![]
    } else {
        vec!["no triple".to_string()]
    };
    finish(
        8,
        "Strassen isomorphism",
        &failures,
        &format!("first triple {found:?} among 24³"),
        start,
        Duration::from_secs(5),
    )
}

fn criterion_09_u8_report() -> bool {
    let start = Instant::now();
    let g = paper_gate("U8").unwrap();
    let rep = rank_search(
        "U8",
        &g.operator_tensor().unwrap(),
        g.decomposition().as_ref(),
        g.claimed_rank.as_ref(),
        &AlsConfig::default(),
    )
    .unwrap();
    let mut failures = Vec::new();
    if rep.certified_upper != Some(8) {
        failures.push(format!("certified_upper {:?}", rep.certified_upper));
    }
    let six = rep.als_failures.iter().find(|a| a.rank == 6);
    if !six.is_some_and(|a| a.best_residual > 1e-4) {
        failures.push("no recorded ALS failure at 6".into());
    }
    if rep.verdict != Verdict::Open {
        failures.push(format!("verdict {:?}", rep.verdict));
    }
    let seven = rep.als_attempts.iter().find(|a| a.rank == 7);
    if seven.is_none() {
        failures.push("rank-7 outcome not recorded".into());
    }
    let seven = seven.map_or("missing".to_string(), |a| {
        format!("converged {} at {:.2e}", a.converged, a.best_residual)
    });
    finish(
        9,
        "U8 report",
        &failures,
        &format!("certified 8, ALS stalls at 6, verdict OPEN, rank 7 {seven} (recorded only)"),
        start,
        Duration::from_secs(120),
    )
}

fn criterion_10_verify_all() -> bool {
    let start = Instant::now();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_srank"))
            .args(["verify", "all", "--json", "--seed", "0"])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    let mut failures = Vec::new();
    if first.status.code() != Some(0) || second.status.code() != Some(0) {
        failures.push(format!(
            "exit codes {:?} {:?}",
            first.status.code(),
            second.status.code()
        ));
    }
    if first.stdout != second.stdout {
        failures.push("JSON differs between runs".into());
    }
    let doc: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    let verdicts = doc["verdicts"].as_object().unwrap();
    if verdicts.len() != 17 {
        failures.push(format!("{} claims reported", verdicts.len()));
    }
    let fails: Vec<&String> = verdicts
        .iter()
        .filter(|(_, v)| *v == "FAIL")
        .map(|(k, _)| k)
        .collect();
    if !fails.is_empty() {
        failures.push(format!("FAIL: {fails:?}"));
    }
    let pass = verdicts.values().filter(|v| *v == "PASS").count();
    finish(
        10,
        "verify all",
        &failures,
        &format!(
            "exit 0 twice, byte-identical JSON, {pass} PASS + {} OPEN-EVIDENCE, no FAIL",
            verdicts.len() - pass
        ),
        start,
        Duration::from_secs(300),
    )
}

fn main() {
    let criteria: [fn() -> bool; 10] = [
        criterion_01_unitarity_suite,
        criterion_02_certificate_suite,
        criterion_03_circuit_identities,
        criterion_04_flattening_table,
        criterion_05_als_confirmations,
        criterion_06_als_negative_evidence,
        criterion_07_two_cnot_sweep,
        criterion_08_strassen_isomorphism,
        criterion_09_u8_report,
        criterion_10_verify_all,
    ];
    let start = Instant::now();
    let passed = criteria.iter().filter(|c| c()).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.1}s",
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
