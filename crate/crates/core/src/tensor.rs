//! Three-mode tensors, their flattenings, and CP factor lists.
//!
//! Entries are stored in lexicographic `(i, j, k)` order. Mode flattenings
//! keep the remaining two indices in lexicographic order as well:
//!
//! | mode | rows | column index    |
//! |------|------|-----------------|
//! | 1    | `i`  | `j * d3 + k`    |
//! | 2    | `j`  | `i * d3 + k`    |
//! | 3    | `k`  | `i * d2 + j`    |

use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// A dense complex tensor of shape `d1 × d2 × d3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(dims: [usize; 3]) -> Self {
        Self {
            dims,
            data: vec![C64::new(0.0, 0.0); dims.iter().product()],
        }
    }

    pub fn from_vec(dims: [usize; 3], data: Vec<C64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "tensor dimensions must be positive, got {dims:?}"
            )));
        }
        if data.len() != dims.iter().product::<usize>() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dims:?} tensor",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("tensor"));
        }
        Ok(Self { dims, data })
    }

    /// Outer product `u ∘ v ∘ w`.
    pub fn outer(u: &[C64], v: &[C64], w: &[C64]) -> Self {
        let mut t = Self::zeros([u.len(), v.len(), w.len()]);
        for (i, &a) in u.iter().enumerate() {
            for (j, &b) in v.iter().enumerate() {
                let ab = a * b;
                for (k, &cc) in w.iter().enumerate() {
                    t[(i, j, k)] = ab * cc;
                }
            }
        }
        t
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance; infinite when the shapes differ.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Number of entries with modulus above `tol`.
    pub fn count_nonzero(&self, tol: f64) -> usize {
        self.data.iter().filter(|z| z.norm() > tol).count()
    }

    /// Indices and values of entries with modulus above `tol`.
    pub fn nonzero_cells(&self, tol: f64) -> Vec<([usize; 3], C64)> {
        let [_, d2, d3] = self.dims;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > tol)
            .map(|(idx, &z)| ([idx / (d2 * d3), (idx / d3) % d2, idx % d3], z))
            .collect()
    }

    /// Returns the tensor with mode indices relabelled so that
    /// `out[i, j, k] = self[p1[i], p2[j], p3[k]]`.
    pub fn permute_indices(&self, p1: &[usize], p2: &[usize], p3: &[usize]) -> Self {
        let mut out = Self::zeros(self.dims);
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                for k in 0..self.dims[2] {
                    out[(i, j, k)] = self[(p1[i], p2[j], p3[k])];
                }
            }
        }
        out
    }

    /// Reorders the modes: mode `m` of the result is mode `order[m]` of `self`.
    pub fn transpose_modes(&self, order: [usize; 3]) -> Self {
        let dims = [
            self.dims[order[0]],
            self.dims[order[1]],
            self.dims[order[2]],
        ];
        let mut out = Self::zeros(dims);
        let mut src = [0usize; 3];
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    src[order[0]] = i;
                    src[order[1]] = j;
                    src[order[2]] = k;
                    out[(i, j, k)] = self[(src[0], src[1], src[2])];
                }
            }
        }
        out
    }

    /// Mode-`mode` flattening (`mode` in 1..=3), layout as in the module docs.
    pub fn flatten(&self, mode: usize) -> Result<ComplexMatrix> {
        mode_flatten(self, mode)
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = C64;

    fn index(&self, (i, j, k): (usize, usize, usize)) -> &C64 {
        let [d1, d2, d3] = self.dims;
        assert!(i < d1 && j < d2 && k < d3, "tensor index out of bounds");
        &self.data[(i * d2 + j) * d3 + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut C64 {
        let [d1, d2, d3] = self.dims;
        assert!(i < d1 && j < d2 && k < d3, "tensor index out of bounds");
        &mut self.data[(i * d2 + j) * d3 + k]
    }
}

/// Mode-`mode` flattening of `t` (`mode` in 1..=3).
pub fn mode_flatten(t: &Tensor3, mode: usize) -> Result<ComplexMatrix> {
    let [d1, d2, d3] = t.dims;
    let mut out = match mode {
        1 => ComplexMatrix::zeros(d1, d2 * d3),
        2 => ComplexMatrix::zeros(d2, d1 * d3),
        3 => ComplexMatrix::zeros(d3, d1 * d2),
        m => return Err(Error::InvalidMode(m)),
    };
    for i in 0..d1 {
        for j in 0..d2 {
            for k in 0..d3 {
                let z = t[(i, j, k)];
                match mode {
                    1 => out[(i, j * d3 + k)] = z,
                    2 => out[(j, i * d3 + k)] = z,
                    _ => out[(k, i * d2 + j)] = z,
                }
            }
        }
    }
    Ok(out)
}

/// One rank-one term `a ∘ b ∘ c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub c: Vec<C64>,
}

impl Triple {
    pub fn new(a: Vec<C64>, b: Vec<C64>, c: Vec<C64>) -> Self {
        Self { a, b, c }
    }

    fn dims(&self) -> [usize; 3] {
        [self.a.len(), self.b.len(), self.c.len()]
    }
}

/// A list of rank-one terms whose sum is claimed to equal some tensor. When
/// the sum is verified, its length is an upper bound on the tensor rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    dims: [usize; 3],
    terms: Vec<Triple>,
}

impl Decomposition {
    pub fn new(terms: Vec<Triple>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| {
            Error::InvalidArgument("a decomposition needs at least one term".into())
        })?;
        let dims = first.dims();
        if dims.contains(&0) {
            return Err(Error::DimensionMismatch("empty factor vector".into()));
        }
        if let Some(bad) = terms.iter().position(|t| t.dims() != dims) {
            return Err(Error::DimensionMismatch(format!(
                "term {bad} has factor lengths {:?}, expected {dims:?}",
                terms[bad].dims()
            )));
        }
        Ok(Self { dims, terms })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn terms(&self) -> &[Triple] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn reconstruct(&self) -> Tensor3 {
        let mut t = Tensor3::zeros(self.dims);
        for term in &self.terms {
            accumulate_outer(&mut t, term);
        }
        t
    }

    /// Relabels the coefficient indices of every factor: the result `d'`
    /// satisfies `d'.reconstruct()[i,j,k] = d.reconstruct()[p1[i],p2[j],p3[k]]`.
    pub fn permute_indices(&self, p1: &[usize], p2: &[usize], p3: &[usize]) -> Self {
        let pick = |v: &[C64], p: &[usize]| p.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Self {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|t| Triple::new(pick(&t.a, p1), pick(&t.b, p2), pick(&t.c, p3)))
                .collect(),
        }
    }
}

fn accumulate_outer(t: &mut Tensor3, term: &Triple) {
    for (i, &a) in term.a.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, &b) in term.b.iter().enumerate() {
            let ab = a * b;
            for (k, &cc) in term.c.iter().enumerate() {
                t[(i, j, k)] += ab * cc;
            }
        }
    }
}

/// Sums the terms of `d` into a tensor of shape `dims`.
pub fn reconstruct_cp(d: &Decomposition, dims: [usize; 3]) -> Result<Tensor3> {
    if d.dims != dims {
        return Err(Error::DimensionMismatch(format!(
            "decomposition has factor lengths {:?}, target is {dims:?}",
            d.dims
        )));
    }
    Ok(d.reconstruct())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{numerical_rank, r, RANK_TOL};

    #[test]
    fn zero_tensor_flattens_to_zero() {
        let t = Tensor3::zeros([4, 4, 4]);
        let m = mode_flatten(&t, 1).unwrap();
        assert_eq!(m.dims(), (4, 16));
        assert_eq!(m.max_abs(), 0.0);
    }

    #[test]
    fn rank_one_flattening_is_outer_product() {
        let u = vec![r(1.), r(2.), r(0.), r(-1.)];
        let v = vec![r(0.5), r(0.), r(1.), r(3.)];
        let w = vec![r(1.), r(-1.), r(2.), r(0.)];
        let t = Tensor3::outer(&u, &v, &w);
        let m = mode_flatten(&t, 1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert_eq!(m[(i, j * 4 + k)], u[i] * v[j] * w[k]);
                }
            }
        }
        for mode in 1..=3 {
            assert_eq!(
                numerical_rank(&mode_flatten(&t, mode).unwrap(), RANK_TOL).unwrap(),
                1
            );
        }
    }

    #[test]
    fn flatten_layouts() {
        let data: Vec<C64> = (0..24).map(|x| r(x as f64)).collect();
        let t = Tensor3::from_vec([2, 3, 4], data).unwrap();
        let m2 = mode_flatten(&t, 2).unwrap();
        assert_eq!(m2.dims(), (3, 8));
        assert_eq!(m2[(2, 4 + 3)], t[(1, 2, 3)]);
        let m3 = mode_flatten(&t, 3).unwrap();
        assert_eq!(m3.dims(), (4, 6));
        assert_eq!(m3[(3, 3 + 2)], t[(1, 2, 3)]);
        assert_eq!(mode_flatten(&t, 0), Err(Error::InvalidMode(0)));
        assert_eq!(mode_flatten(&t, 4), Err(Error::InvalidMode(4)));
    }

    #[test]
    fn reconstruct_single_triple() {
        let s0 = vec![r(1.), r(0.), r(0.), r(0.)];
        let id = vec![r(1.), r(0.), r(0.), r(1.)];
        let d = Decomposition::new(vec![Triple::new(s0.clone(), id.clone(), id.clone())]).unwrap();
        let t = reconstruct_cp(&d, [4, 4, 4]).unwrap();
        assert_eq!(t, Tensor3::outer(&s0, &id, &id));
        assert!(reconstruct_cp(&d, [4, 4, 2]).is_err());
    }

    #[test]
    fn decomposition_validation() {
        assert!(Decomposition::new(vec![]).is_err());
        let bad = vec![
            Triple::new(vec![r(1.)], vec![r(1.)], vec![r(1.)]),
            Triple::new(vec![r(1.), r(0.)], vec![r(1.)], vec![r(1.)]),
        ];
        assert!(Decomposition::new(bad).is_err());
    }

    #[test]
    fn transpose_modes_moves_entries() {
        let data: Vec<C64> = (0..24).map(|x| r(x as f64)).collect();
        let t = Tensor3::from_vec([2, 3, 4], data).unwrap();
        let p = t.transpose_modes([2, 0, 1]);
        assert_eq!(p.dims(), [4, 2, 3]);
        assert_eq!(p[(3, 1, 2)], t[(1, 2, 3)]);
    }
}
