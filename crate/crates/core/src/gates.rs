//! Gate catalog: elementary qubit gates plus the named three-qubit
//! constructions whose Schmidt ranks are analysed elsewhere in the crate.
//!
//! Qubit ordering: qubit 0 (system A) is the leftmost tensor factor and the
//! most significant bit of a basis index.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, kron_all, r, ComplexMatrix, IDENTITY_TOL};
use crate::schmidt::operator_tensor3;
use crate::tensor::{Decomposition, Tensor3, Triple};

/// Names accepted by [`elementary`].
pub const ELEMENTARY_NAMES: &[&str] = &[
    "I2", "S0", "S1", "S2", "S3", "X", "Y", "Z", "H", "CNOT", "CZ", "SWAP", "TOFFOLI", "FREDKIN",
];

/// Names accepted by [`paper_gate`].
pub const CATALOG_NAMES: &[&str] = &[
    "TOFFOLI",
    "FREDKIN",
    "U3_pauli",
    "U5_thm1",
    "U6_thm1",
    "U7",
    "U8",
    "finagler",
    "bullock16",
    "T_lemma2",
    "U3_circ",
    "U4",
    "U5_circ",
    "U6_circ",
    "M3",
    "M3_dressed",
];

/// Matrix unit `S_k`: `S0 = |0><0|`, `S1 = |0><1|`, `S2 = |1><0|`, `S3 = |1><1|`.
pub fn s(k: usize) -> ComplexMatrix {
    assert!(k < 4, "matrix units are S0..S3");
    ComplexMatrix::unit(2, k / 2, k % 2)
}

pub fn id2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[r(0.), c(0., -1.)], [c(0., 1.), r(0.)]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1., 0., 0., -1.])
}

pub fn hadamard() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1., 1., 1., -1.]).scale_real(FRAC_1_SQRT_2)
}

/// `|0><0| ⊗ I + |1><1| ⊗ X`, control on the first qubit.
pub fn cnot() -> ComplexMatrix {
    &s(0).kron(&id2()) + &s(3).kron(&pauli_x())
}

pub fn swap() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (row, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(row, col)] = r(1.0);
    }
    m
}

/// Looks up a standard gate or matrix unit by name.
pub fn elementary(name: &str) -> Result<ComplexMatrix> {
    let m = match name {
        "I2" => id2(),
        "S0" => s(0),
        "S1" => s(1),
        "S2" => s(2),
        "S3" => s(3),
        "X" => pauli_x(),
        "Y" => pauli_y(),
        "Z" => pauli_z(),
        "H" => hadamard(),
        "CNOT" => cnot(),
        "CZ" => ComplexMatrix::diag(&[r(1.), r(1.), r(1.), r(-1.)]),
        "SWAP" => swap(),
        "TOFFOLI" => &s(0).kron(&ComplexMatrix::identity(4)) + &s(3).kron(&cnot()),
        "FREDKIN" => &s(0).kron(&ComplexMatrix::identity(4)) + &s(3).kron(&swap()),
        other => return Err(Error::UnknownGate(other.to_string())),
    };
    Ok(m)
}

/// A scalar times a tensor product of local operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub coeff: C64,
    pub factors: Vec<ComplexMatrix>,
}

impl ProductTerm {
    pub fn new(coeff: C64, factors: Vec<ComplexMatrix>) -> Self {
        Self { coeff, factors }
    }

    pub fn real(coeff: f64, factors: Vec<ComplexMatrix>) -> Self {
        Self::new(r(coeff), factors)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        kron_all(&self.factors).scale(self.coeff)
    }
}

/// An explicit sum of product operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductExpansion {
    pub terms: Vec<ProductTerm>,
}

impl ProductExpansion {
    pub fn new(terms: Vec<ProductTerm>) -> Self {
        Self { terms }
    }

    pub fn single(factors: Vec<ComplexMatrix>) -> Self {
        Self::new(vec![ProductTerm::real(1.0, factors)])
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn parties(&self) -> usize {
        self.terms.first().map_or(0, |t| t.factors.len())
    }

    /// Sum of the Kronecker products of all terms.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut iter = self.terms.iter();
        let first = iter.next().expect("non-empty expansion").to_matrix();
        iter.fold(first, |acc, t| &acc + &t.to_matrix())
    }

    /// Operator product `self · other`, expanded term by term.
    pub fn compose(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                let factors = a
                    .factors
                    .iter()
                    .zip(&b.factors)
                    .map(|(x, y)| x * y)
                    .collect();
                terms.push(ProductTerm::new(a.coeff * b.coeff, factors));
            }
        }
        Self::new(terms)
    }

    /// Coefficient-space view: each 2×2 factor becomes its four matrix-unit
    /// coefficients (row-major), with the scalar folded into the first one.
    pub fn to_decomposition(&self) -> Result<Decomposition> {
        let triples = self
            .terms
            .iter()
            .map(|t| {
                if t.factors.len() != 3 {
                    return Err(Error::DimensionMismatch(format!(
                        "expected three factors, got {}",
                        t.factors.len()
                    )));
                }
                let a: Vec<C64> = t.factors[0]
                    .as_slice()
                    .iter()
                    .map(|z| z * t.coeff)
                    .collect();
                Ok(Triple::new(
                    a,
                    t.factors[1].as_slice().to_vec(),
                    t.factors[2].as_slice().to_vec(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Decomposition::new(triples)
    }
}

/// What the construction is claimed to have as Schmidt rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimedRank {
    Exact(usize),
    OneOf(Vec<usize>),
    AtMost(usize),
}

impl ClaimedRank {
    pub fn min(&self) -> usize {
        match self {
            ClaimedRank::Exact(r) => *r,
            ClaimedRank::OneOf(v) => *v.iter().min().expect("non-empty"),
            ClaimedRank::AtMost(_) => 1,
        }
    }

    pub fn max(&self) -> usize {
        match self {
            ClaimedRank::Exact(r) | ClaimedRank::AtMost(r) => *r,
            ClaimedRank::OneOf(v) => *v.iter().max().expect("non-empty"),
        }
    }

    pub fn contains(&self, rank: usize) -> bool {
        match self {
            ClaimedRank::Exact(r) => rank == *r,
            ClaimedRank::OneOf(v) => v.contains(&rank),
            ClaimedRank::AtMost(r) => rank >= 1 && rank <= *r,
        }
    }

    pub fn exact(&self) -> Option<usize> {
        match self {
            ClaimedRank::Exact(r) => Some(*r),
            _ => None,
        }
    }
}

impl std::fmt::Display for ClaimedRank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClaimedRank::Exact(r) => write!(f, "{r}"),
            ClaimedRank::OneOf(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            ClaimedRank::AtMost(r) => write!(f, "<= {r}"),
        }
    }
}

/// An alternative reading of an ambiguously printed construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateVariant {
    pub label: String,
    pub matrix: ComplexMatrix,
    pub certificate: ProductExpansion,
    pub unitarity_defect: f64,
}

impl GateVariant {
    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect <= IDENTITY_TOL
    }
}

/// A named construction together with its certificate and claimed rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateEntry {
    pub name: String,
    /// Local dimensions, e.g. `[2, 2, 2]`.
    pub systems: Vec<usize>,
    pub matrix: ComplexMatrix,
    /// Explicit product terms summing to `matrix`.
    pub certificate: Option<ProductExpansion>,
    pub claimed_rank: Option<ClaimedRank>,
    pub claimed_unitary: bool,
    /// Short description of how the construction is defined.
    pub anchor: String,
    pub variants: Vec<GateVariant>,
}

impl GateEntry {
    pub fn is_three_qubit(&self) -> bool {
        self.systems == [2, 2, 2]
    }

    /// Matrix-unit coefficient tensor; `None` unless the gate acts on three qubits.
    pub fn operator_tensor(&self) -> Option<Tensor3> {
        if self.is_three_qubit() {
            operator_tensor3(&self.matrix).ok()
        } else {
            None
        }
    }

    pub fn decomposition(&self) -> Option<Decomposition> {
        if !self.is_three_qubit() {
            return None;
        }
        self.certificate
            .as_ref()
            .and_then(|c| c.to_decomposition().ok())
    }

    pub fn certificate_len(&self) -> Option<usize> {
        self.certificate.as_ref().map(ProductExpansion::len)
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.matrix.unitarity_defect()
    }
}

fn term(coeff: f64, factors: [ComplexMatrix; 3]) -> ProductTerm {
    ProductTerm::real(coeff, factors.into())
}

fn unit_term(a: usize, b: usize, cc: usize) -> ProductTerm {
    term(1.0, [s(a), s(b), s(cc)])
}

fn cnot_expansion(control: usize, target: usize) -> ProductExpansion {
    let mut off = vec![id2(), id2(), id2()];
    off[control] = s(0);
    let mut on = vec![id2(), id2(), id2()];
    on[control] = s(3);
    on[target] = pauli_x();
    ProductExpansion::new(vec![
        ProductTerm::real(1.0, off),
        ProductTerm::real(1.0, on),
    ])
}

fn local(a: ComplexMatrix, b: ComplexMatrix, cc: ComplexMatrix) -> ProductExpansion {
    ProductExpansion::single(vec![a, b, cc])
}

/// CNOT on three qubits written as a sum of local operators; used to build
/// products independently of the circuit evaluator.
fn cnot3(control: usize, target: usize) -> ComplexMatrix {
    cnot_expansion(control, target).reconstruct()
}

fn toffoli_hadamard_form() -> ComplexMatrix {
    let hc = kron_all(&[id2(), id2(), hadamard()]);
    let phase = &ComplexMatrix::identity(8) - &kron_all(&[s(3), s(3), s(3)]).scale_real(2.0);
    &(&hc * &phase) * &hc
}

fn sum_of(terms: &[ProductTerm]) -> ComplexMatrix {
    ProductExpansion::new(terms.to_vec()).reconstruct()
}

/// Builds the catalog entry for `name`.
pub fn paper_gate(name: &str) -> Result<GateEntry> {
    let inv_sqrt3 = 1.0 / 3f64.sqrt();
    let (i2, x, y, z, h) = (id2(), pauli_x(), pauli_y(), pauli_z(), hadamard());

    let entry = |name: &str,
                 matrix: ComplexMatrix,
                 cert: Option<ProductExpansion>,
                 rank: Option<ClaimedRank>,
                 unitary: bool,
                 anchor: &str| GateEntry {
        name: name.to_string(),
        systems: vec![2, 2, 2],
        matrix,
        certificate: cert,
        claimed_rank: rank,
        claimed_unitary: unitary,
        anchor: anchor.to_string(),
        variants: Vec::new(),
    };

    let g = match name {
        "TOFFOLI" => {
            // I⊗I⊗I − S3⊗S3⊗(I − X), i.e. the Hadamard-conjugated phase flip.
            let cert = ProductExpansion::new(vec![
                term(1.0, [i2.clone(), i2.clone(), i2.clone()]),
                term(1.0, [s(3), s(3), &x - &i2]),
            ]);
            entry(
                name,
                elementary("TOFFOLI")?,
                Some(cert),
                Some(ClaimedRank::Exact(2)),
                true,
                "controlled-CNOT; equals (I⊗I⊗H)(I8 − 2|111><111|)(I⊗I⊗H)",
            )
        }
        "FREDKIN" => {
            let cert = ProductExpansion::new(vec![
                term(1.0, [&s(0) + &s(3).scale_real(0.5), i2.clone(), i2.clone()]),
                term(0.5, [s(3), z.clone(), z.clone()]),
                unit_term(3, 1, 2),
                unit_term(3, 2, 1),
            ]);
            entry(
                name,
                elementary("FREDKIN")?,
                Some(cert),
                Some(ClaimedRank::Exact(4)),
                true,
                "controlled-SWAP with its four-term matrix-unit expansion",
            )
        }
        "U3_pauli" => {
            let cert = ProductExpansion::new(vec![
                ProductTerm::real(inv_sqrt3, vec![i2.clone(), i2.clone(), i2.clone()]),
                ProductTerm::new(c(0., inv_sqrt3), vec![x.clone(), x.clone(), x.clone()]),
                ProductTerm::new(c(0., inv_sqrt3), vec![z.clone(), z.clone(), z.clone()]),
            ]);
            let m = &(&ComplexMatrix::identity(8)
                + &kron_all(&[x.clone(), x.clone(), x.clone()]).scale(c(0., 1.)))
                + &kron_all(&[z.clone(), z.clone(), z.clone()]).scale(c(0., 1.));
            entry(
                name,
                m.scale_real(inv_sqrt3),
                Some(cert),
                Some(ClaimedRank::Exact(3)),
                true,
                "(1/√3)(I⊗I⊗I + i X⊗X⊗X + i Z⊗Z⊗Z)",
            )
        }
        "U5_thm1" => {
            let cert = ProductExpansion::new(vec![
                term(0.5, [s(0), i2.clone(), i2.clone()]),
                term(0.5, [s(0), x.clone(), x.clone()]),
                term(1.0, [s(3), i2.clone(), x.clone()]),
                term(0.5, [s(0), y.clone(), y.clone()]),
                term(0.5, [s(0), z.clone(), z.clone()]),
            ]);
            let bc = &(&(&i2.kron(&i2) + &x.kron(&x)) + &y.kron(&y)) + &z.kron(&z);
            let m = &s(0).kron(&bc).scale_real(0.5) + &kron_all(&[s(3), i2.clone(), x.clone()]);
            entry(
                name,
                m,
                Some(cert),
                Some(ClaimedRank::Exact(5)),
                true,
                "½ S0⊗(I⊗I + X⊗X + Y⊗Y + Z⊗Z) + S3⊗I⊗X",
            )
        }
        "U6_thm1" => {
            let cert = ProductExpansion::new(vec![
                term(0.5, [s(0), i2.clone(), i2.clone()]),
                term(0.5, [s(0), x.clone(), x.clone()]),
                term(FRAC_1_SQRT_2, [s(3), i2.clone(), x.clone()]),
                term(0.5, [s(0), y.clone(), y.clone()]),
                term(0.5, [s(0), z.clone(), z.clone()]),
                term(FRAC_1_SQRT_2, [s(3), y.clone(), z.clone()]),
            ]);
            let bc = &(&(&i2.kron(&i2) + &x.kron(&x)) + &y.kron(&y)) + &z.kron(&z);
            let tail = &i2.kron(&x) + &y.kron(&z);
            let m = &s(0).kron(&bc).scale_real(0.5) + &s(3).kron(&tail).scale_real(FRAC_1_SQRT_2);
            entry(
                name,
                m,
                Some(cert),
                Some(ClaimedRank::Exact(6)),
                true,
                "½ S0⊗(I⊗I + X⊗X + Y⊗Y + Z⊗Z) + (1/√2) S3⊗(I⊗X + Y⊗Z)",
            )
        }
        "U7" => {
            let terms: Vec<ProductTerm> = [
                (1, 2, 0),
                (2, 3, 0),
                (0, 0, 1),
                (3, 1, 1),
                (1, 1, 2),
                (2, 0, 2),
                (0, 3, 3),
                (3, 2, 3),
            ]
            .iter()
            .map(|&(a, b, cc)| unit_term(a, b, cc))
            .collect();
            entry(
                name,
                sum_of(&terms),
                Some(ProductExpansion::new(terms)),
                Some(ClaimedRank::Exact(7)),
                true,
                "eight matrix-unit triples, index-isomorphic to the 2×2 matrix multiplication tensor",
            )
        }
        "U8" => {
            let terms: Vec<ProductTerm> = [
                (0, 0, 0),
                (1, 3, 0),
                (2, 0, 1),
                (3, 2, 1),
                (0, 1, 2),
                (1, 2, 2),
                (2, 1, 3),
                (3, 3, 3),
            ]
            .iter()
            .map(|&(a, b, cc)| unit_term(a, b, cc))
            .collect();
            entry(
                name,
                sum_of(&terms),
                Some(ProductExpansion::new(terms)),
                Some(ClaimedRank::OneOf(vec![7, 8])),
                true,
                "eight matrix-unit triples; rank 7 or 8",
            )
        }
        "T_lemma2" => {
            let terms: Vec<ProductTerm> = [
                (1, 3, 0),
                (2, 0, 1),
                (3, 2, 1),
                (1, 2, 2),
                (2, 1, 3),
                (3, 3, 3),
            ]
            .iter()
            .map(|&(a, b, cc)| unit_term(a, b, cc))
            .collect();
            entry(
                name,
                sum_of(&terms),
                Some(ProductExpansion::new(terms)),
                Some(ClaimedRank::Exact(6)),
                false,
                "U8 with its two S0-on-A terms projected away (six matrix-unit triples)",
            )
        }
        "finagler" => {
            let cert = ProductExpansion::new(vec![
                term(FRAC_1_SQRT_2, [s(0), i2.clone(), i2.clone()]),
                term(FRAC_1_SQRT_2, [s(1), z.clone(), z.clone()]),
                term(FRAC_1_SQRT_2, [s(2), x.clone(), x.clone()]),
                term(FRAC_1_SQRT_2, [s(3), y.clone(), y.clone()]),
            ]);
            // Block form (1/√2)[[I⊗I, Z⊗Z], [X⊗X, Y⊗Y]] assembled entrywise.
            let blocks = [i2.kron(&i2), z.kron(&z), x.kron(&x), y.kron(&y)];
            let mut m = ComplexMatrix::zeros(8, 8);
            for (bi, blk) in blocks.iter().enumerate() {
                let (r0, c0) = (4 * (bi / 2), 4 * (bi % 2));
                for i in 0..4 {
                    for j in 0..4 {
                        m[(r0 + i, c0 + j)] = blk[(i, j)] * FRAC_1_SQRT_2;
                    }
                }
            }
            entry(
                name,
                m,
                Some(cert),
                Some(ClaimedRank::Exact(4)),
                true,
                "(1/√2)(S0⊗I⊗I + S1⊗Z⊗Z + S2⊗X⊗X + S3⊗Y⊗Y)",
            )
        }
        "bullock16" => return Ok(bullock16()),
        "U3_circ" => {
            let cert = ProductExpansion::new(vec![
                term(1.0, [s(0), i2.clone(), i2.clone()]),
                term(1.0, [s(3), x.clone(), i2.clone()]),
                term(-2.0, [s(3), s(1), s(3)]),
            ]);
            let m = &(&cnot3(0, 1) * &kron_all(&[i2.clone(), i2.clone(), h.clone()]))
                * &(&toffoli_hadamard_form() * &kron_all(&[i2.clone(), i2.clone(), h.clone()]));
            entry(
                name,
                m,
                Some(cert),
                Some(ClaimedRank::Exact(3)),
                true,
                "(T_AB⊗H) T3 (I⊗I⊗H) = T_AB⊗I − 2|1><1|⊗|0><1|⊗|1><1|",
            )
        }
        "U4" => {
            let cert = cnot_expansion(0, 1).compose(&cnot_expansion(1, 2));
            entry(
                name,
                &cnot3(0, 1) * &cnot3(1, 2),
                Some(cert),
                Some(ClaimedRank::Exact(4)),
                true,
                "(T_AB⊗I)(I⊗T_BC)",
            )
        }
        "U5_circ" => {
            let cert = ProductExpansion::new(vec![
                term(1.0, [s(0), i2.clone(), i2.clone()]),
                term(0.5, [s(3), x.clone(), i2.clone()]),
                term(0.5, [s(3), &x * &z, z.clone()]),
                unit_term(3, 3, 2),
                unit_term(3, 0, 1),
            ]);
            entry(
                name,
                &cnot3(0, 1) * &elementary("FREDKIN")?,
                Some(cert),
                Some(ClaimedRank::Exact(5)),
                true,
                "(T_AB⊗I) F3",
            )
        }
        "U6_circ" => {
            let cert = ProductExpansion::new(vec![
                term(FRAC_1_SQRT_2, [s(0), i2.clone(), i2.clone()]),
                term(FRAC_1_SQRT_2, [s(1), x.clone(), i2.clone()]),
                term(-2.0 * FRAC_1_SQRT_2, [s(1), s(1), s(3)]),
                term(FRAC_1_SQRT_2, [s(2), i2.clone(), x.clone()]),
                term(2.0 * FRAC_1_SQRT_2, [s(3), s(1), s(1)]),
                term(-FRAC_1_SQRT_2, [s(3), x.clone(), x.clone()]),
            ]);
            let u3 = paper_gate("U3_circ")?.matrix;
            let m = &(&cnot3(0, 2) * &kron_all(&[h.clone(), i2.clone(), i2.clone()])) * &u3;
            entry(
                name,
                m,
                Some(cert),
                Some(ClaimedRank::Exact(6)),
                true,
                "(T_AC⊗I_B)(H⊗I⊗I) U3",
            )
        }
        "M3" => {
            let cert = cnot_expansion(0, 1)
                .compose(&cnot_expansion(1, 2))
                .compose(&cnot_expansion(2, 0));
            entry(
                name,
                &(&cnot3(0, 1) * &cnot3(1, 2)) * &cnot3(2, 0),
                Some(cert),
                Some(ClaimedRank::Exact(7)),
                true,
                "(T_AB⊗I_C)(I_A⊗T_BC)(T_CA⊗I_B), three CNOTs",
            )
        }
        "M3_dressed" => {
            let dress = kron_all(&[h.clone(), i2.clone(), h.clone()]);
            let cert = cnot_expansion(0, 1)
                .compose(&cnot_expansion(1, 2))
                .compose(&local(h.clone(), i2.clone(), h.clone()))
                .compose(&cnot_expansion(0, 2));
            entry(
                name,
                &(&(&cnot3(0, 1) * &cnot3(1, 2)) * &dress) * &cnot3(0, 2),
                Some(cert),
                None,
                true,
                "(T_AB⊗I)(I⊗T_BC)(H⊗I⊗H)(T_AC⊗I_B), three CNOTs with Hadamard dressing",
            )
        }
        other => return Err(Error::UnknownGate(other.to_string())),
    };
    Ok(g)
}

fn bullock16() -> GateEntry {
    let tails = [
        ComplexMatrix::from_rows(&[[r(1.), c(0., 1.)], [r(0.), r(0.)]]),
        ComplexMatrix::from_rows(&[[r(0.), r(0.)], [r(1.), c(0., 1.)]]),
        ComplexMatrix::from_rows(&[[r(0.), r(0.)], [r(1.), c(0., -1.)]]),
        ComplexMatrix::from_rows(&[[r(-1.), c(0., 1.)], [r(0.), r(0.)]]),
    ];
    let groups: [[(f64, [usize; 3]); 4]; 4] = [
        [
            (1., [0, 0, 0]),
            (1., [0, 1, 2]),
            (1., [1, 2, 0]),
            (1., [1, 3, 2]),
        ],
        [
            (1., [0, 0, 1]),
            (1., [0, 1, 3]),
            (1., [1, 2, 1]),
            (1., [1, 3, 3]),
        ],
        [
            (1., [2, 2, 2]),
            (-1., [2, 3, 0]),
            (-1., [3, 0, 2]),
            (1., [3, 1, 0]),
        ],
        [
            (1., [2, 2, 3]),
            (-1., [2, 3, 1]),
            (-1., [3, 0, 3]),
            (1., [3, 1, 1]),
        ],
    ];

    // `scale[g]` multiplies every term of group g.
    let build = |scale: [f64; 4]| {
        let mut terms = Vec::with_capacity(16);
        for (g, group) in groups.iter().enumerate() {
            for &(sign, [a, b, cc]) in group {
                terms.push(ProductTerm::real(
                    sign * scale[g],
                    vec![s(a), s(b), s(cc), tails[g].clone()],
                ));
            }
        }
        ProductExpansion::new(terms)
    };
    let assemble = |cert: &ProductExpansion| {
        // Direct placement of each term's single nonzero 8×8 block entry.
        let mut m = ComplexMatrix::zeros(16, 16);
        for t in &cert.terms {
            let head = kron_all(&t.factors[..3]);
            for i in 0..8 {
                for j in 0..8 {
                    let v = head[(i, j)];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..2 {
                        for l in 0..2 {
                            m[(2 * i + k, 2 * j + l)] += t.coeff * v * t.factors[3][(k, l)];
                        }
                    }
                }
            }
        }
        m
    };

    let literal_cert = build([FRAC_1_SQRT_2, 1.0, 1.0, 1.0]);
    let global_cert = build([FRAC_1_SQRT_2; 4]);
    let literal = assemble(&literal_cert);
    let global = assemble(&global_cert);
    let variants = vec![
        GateVariant {
            label: "literal (1/√2 on the first group only)".into(),
            unitarity_defect: literal.unitarity_defect(),
            matrix: literal,
            certificate: literal_cert,
        },
        GateVariant {
            label: "global (1/√2 on all sixteen terms)".into(),
            unitarity_defect: global.unitarity_defect(),
            matrix: global.clone(),
            certificate: global_cert.clone(),
        },
    ];
    GateEntry {
        name: "bullock16".into(),
        systems: vec![2, 2, 2, 2],
        matrix: global,
        certificate: Some(global_cert),
        claimed_rank: Some(ClaimedRank::AtMost(16)),
        claimed_unitary: true,
        anchor: "four-qubit canonical-form gate written as sixteen product terms".into(),
        variants,
    }
}

/// The 2×2 matrix multiplication tensor `Σ e_ij ⊗ e_jk ⊗ e_ki`, with `e_ij`
/// at coefficient index `2i + j`.
pub fn matmul_tensor() -> Tensor3 {
    let mut t = Tensor3::zeros([4, 4, 4]);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                t[(2 * i + j, 2 * j + k, 2 * k + i)] = r(1.0);
            }
        }
    }
    t
}

/// Strassen's seven products as a rank-7 decomposition of [`matmul_tensor`].
///
/// Each product `(α·A)(β·B)` feeds the entries `C_ik` listed in `γ`; since
/// the third mode of the tensor is indexed by `(k, i)`, `γ` is stored
/// transposed.
pub fn strassen_certificate() -> Decomposition {
    const PRODUCTS: [([f64; 4], [f64; 4], [f64; 4]); 7] = [
        ([1., 0., 0., 1.], [1., 0., 0., 1.], [1., 0., 0., 1.]),
        ([0., 0., 1., 1.], [1., 0., 0., 0.], [0., 1., 0., -1.]),
        ([1., 0., 0., 0.], [0., 1., 0., -1.], [0., 0., 1., 1.]),
        ([0., 0., 0., 1.], [-1., 0., 1., 0.], [1., 1., 0., 0.]),
        ([1., 1., 0., 0.], [0., 0., 0., 1.], [-1., 0., 1., 0.]),
        ([-1., 0., 1., 0.], [1., 1., 0., 0.], [0., 0., 0., 1.]),
        ([0., 1., 0., -1.], [0., 0., 1., 1.], [1., 0., 0., 0.]),
    ];
    let v = |x: &[f64; 4]| x.iter().map(|&e| r(e)).collect::<Vec<_>>();
    Decomposition::new(
        PRODUCTS
            .iter()
            .map(|(a, b, cc)| Triple::new(v(a), v(b), v(cc)))
            .collect(),
    )
    .expect("seven well-formed triples")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{numerical_rank, RANK_TOL};
    use crate::tensor::mode_flatten;

    #[test]
    fn matrix_units() {
        assert_eq!(
            elementary("S1").unwrap(),
            ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.])
        );
        assert_eq!(s(2), s(1).dagger());
    }

    #[test]
    fn hadamard_is_involution() {
        let h = elementary("H").unwrap();
        assert!((&h * &h).approx_eq(&id2(), IDENTITY_TOL));
    }

    #[test]
    fn toffoli_swaps_only_110_and_111() {
        let t = elementary("TOFFOLI").unwrap();
        for col in 0..8 {
            let row = match col {
                6 => 7,
                7 => 6,
                c => c,
            };
            for i in 0..8 {
                let want = if i == row { 1.0 } else { 0.0 };
                assert_eq!(t[(i, col)], r(want));
            }
        }
    }

    #[test]
    fn fredkin_swaps_only_101_and_110() {
        let f = elementary("FREDKIN").unwrap();
        assert_eq!(f[(6, 5)], r(1.0));
        assert_eq!(f[(5, 6)], r(1.0));
        assert_eq!(f[(5, 5)], r(0.0));
        assert_eq!(f[(4, 4)], r(1.0));
    }

    #[test]
    fn unknown_names() {
        assert_eq!(elementary("T"), Err(Error::UnknownGate("T".into())));
        assert!(paper_gate("U9").is_err());
    }

    #[test]
    fn toffoli_hadamard_identity() {
        assert!(toffoli_hadamard_form().approx_eq(&elementary("TOFFOLI").unwrap(), IDENTITY_TOL));
    }

    #[test]
    fn u3_pauli_literal_form() {
        let g = paper_gate("U3_pauli").unwrap();
        let k = 1.0 / 3f64.sqrt();
        // Diagonal of I + iZZZ: (1+i)/√3 on even-parity states.
        assert!((g.matrix[(0, 0)] - c(k, k)).norm() < 1e-15);
        assert!((g.matrix[(0, 7)] - c(0., k)).norm() < 1e-15);
        assert_eq!(g.claimed_rank, Some(ClaimedRank::Exact(3)));
        assert!(g.matrix.is_unitary(IDENTITY_TOL));
    }

    #[test]
    fn u5_certificate_has_five_terms() {
        let g = paper_gate("U5_thm1").unwrap();
        assert_eq!(g.certificate_len(), Some(5));
        assert!(g.matrix.is_unitary(IDENTITY_TOL));
    }

    #[test]
    fn u4_expansion_matches_hand_expansion() {
        // S0⊗S0⊗I + S0⊗S3⊗X + S3⊗S2⊗I + S3⊗S1⊗X
        let hand = sum_of(&[
            term(1.0, [s(0), s(0), id2()]),
            term(1.0, [s(0), s(3), pauli_x()]),
            term(1.0, [s(3), s(2), id2()]),
            term(1.0, [s(3), s(1), pauli_x()]),
        ]);
        let g = paper_gate("U4").unwrap();
        assert!(g.matrix.approx_eq(&hand, IDENTITY_TOL));
        assert_eq!(g.certificate_len(), Some(4));
    }

    #[test]
    fn bullock16_variants() {
        let g = paper_gate("bullock16").unwrap();
        assert_eq!(g.systems, vec![2, 2, 2, 2]);
        assert!(g.operator_tensor().is_none());
        assert_eq!(g.variants.len(), 2);
        assert!(!g.variants[0].is_unitary());
        assert!(g.variants[1].is_unitary());
        for v in &g.variants {
            assert_eq!(v.certificate.len(), 16);
            assert!(v
                .certificate
                .reconstruct()
                .approx_eq(&v.matrix, IDENTITY_TOL));
        }
    }

    #[test]
    fn matmul_tensor_basics() {
        let t = matmul_tensor();
        assert_eq!(t[(0, 0, 0)], r(1.0));
        assert!((t.frobenius_norm().powi(2) - 8.0).abs() < 1e-12);
        for mode in 1..=3 {
            let m = mode_flatten(&t, mode).unwrap();
            assert_eq!(numerical_rank(&m, RANK_TOL).unwrap(), 4);
        }
    }

    // Brute-force oracle: multiply two 2×2 matrices with the seven products
    // and compare against the schoolbook product.
    #[test]
    fn strassen_products_multiply_matrices() {
        let d = strassen_certificate();
        let a = [1.5, -2.0, 0.25, 3.0];
        let b = [-1.0, 0.5, 2.0, 4.0];
        let dot = |u: &[C64], x: &[f64; 4]| -> f64 { u.iter().zip(x).map(|(p, q)| p.re * q).sum() };
        let mut cmat = [0.0; 4];
        for t in d.terms() {
            let m = dot(&t.a, &a) * dot(&t.b, &b);
            for (idx, g) in t.c.iter().enumerate() {
                // transposed storage: index 2k + i holds C_ik
                let (k, i) = (idx / 2, idx % 2);
                cmat[2 * i + k] += g.re * m;
            }
        }
        let want = [
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ];
        for (got, w) in cmat.iter().zip(want) {
            assert!((got - w).abs() < 1e-12);
        }
    }

    #[test]
    fn strassen_reconstructs_matmul_tensor() {
        let d = strassen_certificate();
        assert_eq!(d.len(), 7);
        assert!(d.reconstruct().distance(&matmul_tensor()) <= 1e-12);
        for t in d.terms() {
            for v in [&t.a, &t.b, &t.c] {
                assert!(v
                    .iter()
                    .all(|z| z.im == 0.0 && [-1.0, 0.0, 1.0].contains(&z.re)));
            }
        }
    }
}
