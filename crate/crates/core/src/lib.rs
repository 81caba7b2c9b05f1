//! Operator Schmidt rank analysis for small multi-qubit gates.
//!
//! The crate builds a catalog of three-qubit constructions, evaluates CNOT
//! circuits, and checks rank claims three ways: exact certificate
//! reconstruction (upper bounds), flattening ranks (lower bounds) and CP-ALS
//! fits (numerical evidence).

pub mod als;
pub mod circuit;
pub mod claims;
pub mod error;
pub mod gates;
pub mod matrix;
pub mod schmidt;
pub mod tensor;

pub use als::{als_fit, rank_search, AlsConfig, AlsResult, RankReport, Verdict};
pub use circuit::{embed, evaluate, parse, Circuit, GateKind, PlacedGate};
pub use claims::{verify_all, verify_claim, ClaimReport, Status as ClaimStatus, CLAIM_IDS};
pub use error::{Error, ParseErrorKind, Result};
pub use gates::{
    elementary, matmul_tensor, paper_gate, strassen_certificate, ClaimedRank, GateEntry,
};
pub use matrix::{dagger, kron, numerical_rank, svd, ComplexMatrix, IDENTITY_TOL, RANK_TOL};
pub use schmidt::{
    bipartite_schmidt, flattening_lower_bound, operator_tensor3, realign, verify_decomposition,
    BipartiteSchmidt, Cut, FlatteningBound,
};
pub use tensor::{mode_flatten, reconstruct_cp, Decomposition, Tensor3, Triple};
