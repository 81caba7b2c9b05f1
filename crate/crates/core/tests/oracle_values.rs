//! Values frozen from an independent numpy computation.

use srank::claims::{classify_m1, permutation_isomorphism};
use srank::gates::{hadamard, id2};
use srank::schmidt::bipartite_rank;
use srank::{
    bipartite_schmidt, flattening_lower_bound, matmul_tensor, mode_flatten, operator_tensor3,
    paper_gate, svd, Cut, RANK_TOL,
};

fn close(got: &[f64], want: &[f64]) {
    assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= 1e-12, "{got:?} vs {want:?}");
    }
}

fn schmidt_weights(name: &str, cut: &str) -> Vec<f64> {
    let g = paper_gate(name).unwrap();
    let cut: Cut = cut.parse().unwrap();
    bipartite_schmidt(&g.matrix, &cut, &[2, 2, 2], RANK_TOL)
        .unwrap()
        .weights
}

#[test]
fn fredkin_schmidt_weights() {
    close(
        &schmidt_weights("FREDKIN", "C|AB"),
        &[5f64.sqrt(), 1.0, 1.0, 1.0],
    );
    close(
        &schmidt_weights("FREDKIN", "A|BC"),
        &[6f64.sqrt(), 2f64.sqrt()],
    );
}

#[test]
fn toffoli_schmidt_weights() {
    close(
        &schmidt_weights("TOFFOLI", "A|BC"),
        &[6f64.sqrt(), 2f64.sqrt()],
    );
}

#[test]
fn u3_pauli_flattening_spectrum() {
    let t = paper_gate("U3_pauli").unwrap().operator_tensor().unwrap();
    let s = (8.0f64 / 3.0).sqrt();
    for mode in 1..=3 {
        let sv = svd(&mode_flatten(&t, mode).unwrap())
            .unwrap()
            .singular_values;
        close(&sv[..3], &[s, s, s]);
        assert!(sv[3] <= 1e-12);
    }
    close(&schmidt_weights("U3_pauli", "A|BC")[..3], &[s, s, s]);
}

#[test]
fn u4_flattening_spectrum() {
    let t = paper_gate("U4").unwrap().operator_tensor().unwrap();
    let sv1 = svd(&mode_flatten(&t, 1).unwrap()).unwrap().singular_values;
    let sv2 = svd(&mode_flatten(&t, 2).unwrap()).unwrap().singular_values;
    close(&sv1[..2], &[2.0, 2.0]);
    close(&sv2, &[2f64.sqrt(); 4]);
}

#[test]
fn three_cnot_tensors() {
    let m3 = paper_gate("M3").unwrap().operator_tensor().unwrap();
    assert_eq!(m3.count_nonzero(1e-12), 8);
    assert!((m3.frobenius_norm().powi(2) - 8.0).abs() <= 1e-12);
    let d = paper_gate("M3_dressed").unwrap().operator_tensor().unwrap();
    assert_eq!(d.count_nonzero(1e-12), 32);
    assert_eq!(
        flattening_lower_bound(&d, RANK_TOL).unwrap().mode_ranks,
        [4, 4, 4]
    );
    assert!(permutation_isomorphism(&m3, &matmul_tensor())
        .unwrap()
        .is_some());
}

#[test]
fn u8_is_not_a_relabelled_matmul_tensor() {
    let u8t = paper_gate("U8").unwrap().operator_tensor().unwrap();
    assert_eq!(
        permutation_isomorphism(&u8t, &matmul_tensor()).unwrap(),
        None
    );
}

#[test]
fn two_cnot_family_endpoints() {
    let h = classify_m1(&hadamard()).unwrap();
    assert!(h.condition_holds);
    let t = operator_tensor3(&h.matrix).unwrap();
    assert_eq!(
        flattening_lower_bound(&t, RANK_TOL).unwrap().mode_ranks,
        [2, 2, 2]
    );
    let i = classify_m1(&id2()).unwrap();
    let ti = operator_tensor3(&i.matrix).unwrap();
    assert_eq!(
        flattening_lower_bound(&ti, RANK_TOL).unwrap().mode_ranks,
        [2, 4, 2]
    );
    let cut: Cut = "B|AC".parse().unwrap();
    assert_eq!(
        bipartite_rank(&i.matrix, &cut, &[2, 2, 2], RANK_TOL).unwrap(),
        4
    );
}
