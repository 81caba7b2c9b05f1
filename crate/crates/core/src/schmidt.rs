//! Operator Schmidt machinery: realignment across bipartite cuts, the
//! matrix-unit coefficient tensor of a tripartite operator, flattening lower
//! bounds and certificate checks.
//!
//! The operator basis is the matrix units `|i><j|`, indexed `i * d + j`. With
//! that choice every rearrangement below is a permutation of entries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{numerical_rank, ComplexMatrix};
use crate::tensor::{mode_flatten, reconstruct_cp, Decomposition, Tensor3};

/// A bipartition of the systems: `left` versus everything else.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    left: Vec<usize>,
    n_systems: usize,
}

impl Cut {
    pub fn new(left: &[usize], n_systems: usize) -> Result<Self> {
        let mut l = left.to_vec();
        l.sort_unstable();
        l.dedup();
        if l.len() != left.len() {
            return Err(Error::InvalidCut("repeated system".into()));
        }
        if l.is_empty() || l.len() >= n_systems {
            return Err(Error::InvalidCut("both sides must be non-empty".into()));
        }
        if l.iter().any(|&s| s >= n_systems) {
            return Err(Error::InvalidCut(format!(
                "system index out of range for {n_systems} systems"
            )));
        }
        Ok(Self { left: l, n_systems })
    }

    /// The systems on the left of the cut, ascending.
    pub fn left(&self) -> &[usize] {
        &self.left
    }

    /// The complementary systems, ascending.
    pub fn right(&self) -> Vec<usize> {
        (0..self.n_systems)
            .filter(|s| !self.left.contains(s))
            .collect()
    }

    pub fn n_systems(&self) -> usize {
        self.n_systems
    }

    /// Left systems followed by right systems.
    fn order(&self) -> Vec<usize> {
        let mut o = self.left.clone();
        o.extend(self.right());
        o
    }
}

fn system_letter(s: usize) -> char {
    (b'A' + s as u8) as char
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: String = self.left.iter().map(|&s| system_letter(s)).collect();
        let r: String = self.right().into_iter().map(system_letter).collect();
        write!(f, "{l}|{r}")
    }
}

impl FromStr for Cut {
    type Err = Error;

    /// Parses cuts written with system letters, e.g. `A|BC` or `AC|B`. The
    /// number of systems is the number of distinct letters.
    fn from_str(s: &str) -> Result<Self> {
        let (l, r) = s
            .split_once('|')
            .ok_or_else(|| Error::InvalidCut(format!("`{s}` has no `|`")))?;
        let parse = |side: &str| -> Result<Vec<usize>> {
            side.trim()
                .chars()
                .map(|ch| {
                    let up = ch.to_ascii_uppercase();
                    if up.is_ascii_uppercase() {
                        Ok((up as u8 - b'A') as usize)
                    } else {
                        Err(Error::InvalidCut(format!("bad system letter `{ch}`")))
                    }
                })
                .collect()
        };
        let left = parse(l)?;
        let right = parse(r)?;
        let n = left.len() + right.len();
        let mut all: Vec<usize> = left.iter().chain(&right).copied().collect();
        all.sort_unstable();
        if all != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidCut(format!(
                "`{s}` must name each of the first {n} systems exactly once"
            )));
        }
        Cut::new(&left, n)
    }
}

fn check_operator(u: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if !u.is_square() || u.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, local dimensions {dims:?} need {total}x{total}",
            u.rows(),
            u.cols()
        )));
    }
    Ok(total)
}

fn digits(mut x: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = x % d;
        x /= d;
    }
    out
}

fn undigits(ds: &[usize], dims: &[usize]) -> usize {
    ds.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Reorders the tensor factors of an operator: system `m` of the result is
/// system `order[m]` of `u`. Returns the new operator and its local dims.
pub fn permute_systems(
    u: &ComplexMatrix,
    dims: &[usize],
    order: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    let total = check_operator(u, dims)?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!(
            "{order:?} is not a permutation"
        )));
    }
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let relabel: Vec<usize> = (0..total)
        .map(|x| {
            let old = digits(x, dims);
            let new: Vec<usize> = order.iter().map(|&o| old[o]).collect();
            undigits(&new, &new_dims)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(total, total);
    for row in 0..total {
        for col in 0..total {
            out[(relabel[row], relabel[col])] = u[(row, col)];
        }
    }
    Ok((out, new_dims))
}

fn realign_contiguous(u: &ComplexMatrix, d_left: usize, d_right: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d_left * d_left, d_right * d_right);
    for il in 0..d_left {
        for jl in 0..d_left {
            for ir in 0..d_right {
                for jr in 0..d_right {
                    out[(il * d_left + jl, ir * d_right + jr)] =
                        u[(il * d_right + ir, jl * d_right + jr)];
                }
            }
        }
    }
    out
}

fn side_dims(cut: &Cut, dims: &[usize]) -> Result<(usize, usize)> {
    if cut.n_systems() != dims.len() {
        return Err(Error::InvalidCut(format!(
            "cut {cut} is over {} systems, operator has {}",
            cut.n_systems(),
            dims.len()
        )));
    }
    let dl = cut.left().iter().map(|&s| dims[s]).product();
    let dr = cut.right().iter().map(|&s| dims[s]).product();
    Ok((dl, dr))
}

/// Coefficient matrix of `u` across `cut`: rows enumerate left-side matrix
/// units, columns right-side ones. Its rank is the bipartite Schmidt rank.
pub fn realign(u: &ComplexMatrix, cut: &Cut, dims: &[usize]) -> Result<ComplexMatrix> {
    check_operator(u, dims)?;
    let (dl, dr) = side_dims(cut, dims)?;
    let (p, _) = permute_systems(u, dims, &cut.order())?;
    Ok(realign_contiguous(&p, dl, dr))
}

/// Operator Schmidt decomposition `u = Σ w_i · left_i ⊗ right_i` across a cut.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BipartiteSchmidt {
    pub cut: Cut,
    pub dims: Vec<usize>,
    pub rank: usize,
    pub weights: Vec<f64>,
    pub left_ops: Vec<ComplexMatrix>,
    pub right_ops: Vec<ComplexMatrix>,
}

impl BipartiteSchmidt {
    /// Sums the Schmidt terms and restores the original system order.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let total: usize = self.dims.iter().product();
        let mut acc = ComplexMatrix::zeros(total, total);
        for ((w, l), r) in self.weights.iter().zip(&self.left_ops).zip(&self.right_ops) {
            acc = &acc + &l.kron(r).scale_real(*w);
        }
        let order = self.cut.order();
        let permuted_dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let mut inverse = vec![0; order.len()];
        for (m, &o) in order.iter().enumerate() {
            inverse[o] = m;
        }
        permute_systems(&acc, &permuted_dims, &inverse)
            .expect("consistent dims")
            .0
    }
}

fn reshape_square(v: &[num_complex::Complex64], d: usize) -> ComplexMatrix {
    ComplexMatrix::from_vec(d, d, v.to_vec()).expect("d*d entries")
}

/// SVD of the realignment, folded back into operator factors.
pub fn bipartite_schmidt(
    u: &ComplexMatrix,
    cut: &Cut,
    dims: &[usize],
    tol: f64,
) -> Result<BipartiteSchmidt> {
    let (dl, dr) = side_dims(cut, dims)?;
    let realigned = realign(u, cut, dims)?;
    let svd = realigned.svd()?;
    let rank = crate::matrix::rank_from_singular_values(&svd.singular_values, tol);
    let mut left_ops = Vec::with_capacity(rank);
    let mut right_ops = Vec::with_capacity(rank);
    for k in 0..rank {
        left_ops.push(reshape_square(&svd.u.column(k), dl));
        let v: Vec<_> = svd.v.column(k).iter().map(|z| z.conj()).collect();
        right_ops.push(reshape_square(&v, dr));
    }
    Ok(BipartiteSchmidt {
        cut: cut.clone(),
        dims: dims.to_vec(),
        rank,
        weights: svd.singular_values[..rank].to_vec(),
        left_ops,
        right_ops,
    })
}

/// Bipartite Schmidt rank across `cut`.
pub fn bipartite_rank(u: &ComplexMatrix, cut: &Cut, dims: &[usize], tol: f64) -> Result<usize> {
    numerical_rank(&realign(u, cut, dims)?, tol)
}

/// Matrix-unit coefficient tensor of a tripartite operator with local
/// dimensions `dims`: `u = Σ t[a,b,c] E_a ⊗ E_b ⊗ E_c`.
pub fn operator_tensor(u: &ComplexMatrix, dims: [usize; 3]) -> Result<Tensor3> {
    check_operator(u, &dims)?;
    let [d1, d2, d3] = dims;
    let mut t = Tensor3::zeros([d1 * d1, d2 * d2, d3 * d3]);
    let total = d1 * d2 * d3;
    for row in 0..total {
        let ri = digits(row, &dims);
        for col in 0..total {
            let ci = digits(col, &dims);
            t[(ri[0] * d1 + ci[0], ri[1] * d2 + ci[1], ri[2] * d3 + ci[2])] = u[(row, col)];
        }
    }
    Ok(t)
}

/// Matrix-unit coefficient tensor of an 8×8 three-qubit operator.
pub fn operator_tensor3(u: &ComplexMatrix) -> Result<Tensor3> {
    operator_tensor(u, [2, 2, 2])
}

/// Inverse of [`operator_tensor3`].
pub fn tensor_to_operator3(t: &Tensor3) -> Result<ComplexMatrix> {
    if t.dims() != [4, 4, 4] {
        return Err(Error::DimensionMismatch(format!(
            "expected a 4x4x4 tensor, got {:?}",
            t.dims()
        )));
    }
    let dims = [2, 2, 2];
    let mut u = ComplexMatrix::zeros(8, 8);
    for row in 0..8 {
        let ri = digits(row, &dims);
        for col in 0..8 {
            let ci = digits(col, &dims);
            u[(row, col)] = t[(2 * ri[0] + ci[0], 2 * ri[1] + ci[1], 2 * ri[2] + ci[2])];
        }
    }
    Ok(u)
}

/// Ranks of the three mode flattenings; the largest lower-bounds the tensor rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatteningBound {
    pub mode_ranks: [usize; 3],
    pub lower_bound: usize,
}

pub fn flattening_lower_bound(t: &Tensor3, tol: f64) -> Result<FlatteningBound> {
    let mut mode_ranks = [0; 3];
    for (m, slot) in mode_ranks.iter_mut().enumerate() {
        *slot = numerical_rank(&mode_flatten(t, m + 1)?, tol)?;
    }
    Ok(FlatteningBound {
        mode_ranks,
        lower_bound: *mode_ranks.iter().max().expect("three modes"),
    })
}

/// Frobenius residual `‖t − Σ terms‖`. A residual at rounding level certifies
/// `rank(t) ≤ d.len()`.
pub fn verify_decomposition(t: &Tensor3, d: &Decomposition) -> Result<f64> {
    Ok(t.distance(&reconstruct_cp(d, t.dims())?))
}
