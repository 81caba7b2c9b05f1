//! CP decomposition by alternating least squares, and a rank search that
//! combines flattening bounds, certificates and ALS fits into one report.
//!
//! An ALS failure at rank `r` is evidence that the rank exceeds `r`, never a
//! proof: border-rank effects let ALS creep toward zero residual without
//! reaching it. [`RankReport`] therefore keeps proved bounds and ALS outcomes
//! in separate fields.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::ClaimedRank;
use crate::matrix::RANK_TOL;
use crate::schmidt::{flattening_lower_bound, verify_decomposition};
use crate::tensor::{mode_flatten, Decomposition, Tensor3, Triple};

/// Residual at or below which a certificate counts as exact.
pub const CERTIFICATE_TOL: f64 = 1e-12;

const RIDGE: f64 = 1e-12;

/// Stream index of the warm-started run; random restarts use `0..restarts`.
const WARM_STREAM: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlsConfig {
    pub max_iters: usize,
    pub restarts: usize,
    /// Relative Frobenius residual that counts as converged.
    pub converge_residual: f64,
    pub stall_window: usize,
    /// A restart stops when the relative improvement over `stall_window`
    /// iterations drops below this.
    pub stall_delta: f64,
    pub seed: u64,
}

impl Default for AlsConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            restarts: 50,
            converge_residual: 1e-8,
            stall_window: 50,
            stall_delta: 1e-12,
            seed: 0,
        }
    }
}

impl AlsConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.restarts > 0
            && self.stall_window > 0
            && self.converge_residual > 0.0
            && self.converge_residual < 1.0
            && self.stall_delta > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid ALS configuration {self:?}"
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlsResult {
    pub rank_tried: usize,
    /// Relative Frobenius residual of the best fit.
    pub best_residual: f64,
    pub converged: bool,
    pub factors: Decomposition,
    pub restarts_used: usize,
    pub iterations_of_best: usize,
}

/// Outcome of a single ALS run from one starting point.
#[derive(Clone, Debug)]
pub struct AlsRun {
    pub factors: Decomposition,
    /// Relative residual after initialisation and after every sweep.
    pub history: Vec<f64>,
}

impl AlsRun {
    pub fn residual(&self) -> f64 {
        *self.history.last().expect("non-empty history")
    }

    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }
}

/// Factor matrices, each `d × rank` row-major.
#[derive(Clone, Debug)]
struct Factors {
    rank: usize,
    mats: [Vec<C64>; 3],
}

impl Factors {
    fn from_decomposition(d: &Decomposition, rank: usize) -> Self {
        let dims = d.dims();
        let mut mats = [
            vec![C64::new(0.0, 0.0); dims[0] * rank],
            vec![C64::new(0.0, 0.0); dims[1] * rank],
            vec![C64::new(0.0, 0.0); dims[2] * rank],
        ];
        for (col, term) in d.terms().iter().enumerate().take(rank) {
            for (m, v) in [&term.a, &term.b, &term.c].into_iter().enumerate() {
                for (row, &z) in v.iter().enumerate() {
                    mats[m][row * rank + col] = z;
                }
            }
        }
        Self { rank, mats }
    }

    fn random(dims: [usize; 3], rank: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut draw = |n: usize| -> Vec<C64> {
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                })
                .collect()
        };
        let mats = [
            draw(dims[0] * rank),
            draw(dims[1] * rank),
            draw(dims[2] * rank),
        ];
        Self { rank, mats }
    }

    fn to_decomposition(&self, dims: [usize; 3]) -> Decomposition {
        let r = self.rank;
        let col = |m: usize, k: usize| -> Vec<C64> {
            (0..dims[m]).map(|row| self.mats[m][row * r + k]).collect()
        };
        Decomposition::new(
            (0..r)
                .map(|k| Triple::new(col(0, k), col(1, k), col(2, k)))
                .collect(),
        )
        .expect("rank >= 1")
    }

    /// Moves the norms of the B and C columns into A.
    fn normalize(&mut self, dims: [usize; 3]) {
        let r = self.rank;
        for k in 0..r {
            for m in 1..3 {
                let norm = (0..dims[m])
                    .map(|row| self.mats[m][row * r + k].norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if norm > 0.0 && norm.is_finite() {
                    for row in 0..dims[m] {
                        self.mats[m][row * r + k] /= norm;
                    }
                    for row in 0..dims[0] {
                        self.mats[0][row * r + k] *= norm;
                    }
                }
            }
        }
    }
}

/// The three flattenings, computed once per fit.
struct Unfoldings {
    dims: [usize; 3],
    flat: [Vec<C64>; 3],
    norm: f64,
    data: Vec<C64>,
}

impl Unfoldings {
    fn new(t: &Tensor3) -> Self {
        let flat = [1, 2, 3].map(|m| mode_flatten(t, m).expect("valid mode").into_vec());
        Self {
            dims: t.dims(),
            flat,
            norm: t.frobenius_norm(),
            data: t.as_slice().to_vec(),
        }
    }

    fn relative_residual(&self, f: &Factors) -> f64 {
        let [d1, d2, d3] = self.dims;
        let r = f.rank;
        let [a, b, c] = &f.mats;
        let mut err = 0.0;
        for i in 0..d1 {
            for j in 0..d2 {
                for k in 0..d3 {
                    let mut model = C64::new(0.0, 0.0);
                    for q in 0..r {
                        model += a[i * r + q] * b[j * r + q] * c[k * r + q];
                    }
                    err += (self.data[(i * d2 + j) * d3 + k] - model).norm_sqr();
                }
            }
        }
        let err = err.sqrt();
        if self.norm > 0.0 {
            err / self.norm
        } else {
            err
        }
    }

    /// Exact least-squares update of factor `mode` with the others fixed.
    fn update(&self, f: &mut Factors, mode: usize) {
        let r = f.rank;
        let (p, q) = match mode {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (dp, dq, dm) = (self.dims[p], self.dims[q], self.dims[mode]);
        let fp = &f.mats[p];
        let fq = &f.mats[q];
        let x = &self.flat[mode];
        let cols = dp * dq;

        // rhs[i, s] = Σ_{u,v} X[i, u*dq + v] conj(Fp[u,s]) conj(Fq[v,s])
        let mut kr = vec![C64::new(0.0, 0.0); cols * r];
        for u in 0..dp {
            for v in 0..dq {
                for s in 0..r {
                    kr[(u * dq + v) * r + s] = (fp[u * r + s] * fq[v * r + s]).conj();
                }
            }
        }
        let mut rhs = Mat::<C64>::zeros(r, dm);
        for i in 0..dm {
            for col in 0..cols {
                let xv = x[i * cols + col];
                if xv == C64::new(0.0, 0.0) {
                    continue;
                }
                for s in 0..r {
                    rhs[(s, i)] += xv * kr[col * r + s];
                }
            }
        }

        // gram[s, t] = conj( (Fp^T conj Fp)[s,t] (Fq^T conj Fq)[s,t] ), the
        // Hermitian system for the transposed unknown.
        let gram_of = |fm: &Vec<C64>, d: usize| {
            let mut g = Mat::<C64>::zeros(r, r);
            for row in 0..d {
                for s in 0..r {
                    for t in 0..r {
                        g[(s, t)] += fm[row * r + s] * fm[row * r + t].conj();
                    }
                }
            }
            g
        };
        let gp = gram_of(fp, dp);
        let gq = gram_of(fq, dq);
        let gram = Mat::from_fn(r, r, |s, t| (gp[(s, t)] * gq[(s, t)]).conj());

        let sol = solve_hermitian(&gram, &rhs);
        let out = &mut f.mats[mode];
        for i in 0..dm {
            for s in 0..r {
                out[i * r + s] = sol[(s, i)];
            }
        }
    }
}

fn finite(m: &Mat<C64>) -> bool {
    (0..m.ncols())
        .all(|j| (0..m.nrows()).all(|i| m[(i, j)].re.is_finite() && m[(i, j)].im.is_finite()))
}

fn cholesky_solve(g: &Mat<C64>, rhs: &Mat<C64>) -> Option<Mat<C64>> {
    let x = g.llt(Side::Lower).ok()?.solve(rhs);
    finite(&x).then_some(x)
}

/// Solves `g x = rhs` for Hermitian positive semidefinite `g`, adding a
/// ridge of `1e-12 · max(diag)` when the plain factorisation fails.
fn solve_hermitian(g: &Mat<C64>, rhs: &Mat<C64>) -> Mat<C64> {
    if let Some(x) = cholesky_solve(g, rhs) {
        return x;
    }
    let n = g.nrows();
    let scale = (0..n)
        .map(|i| g[(i, i)].re)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut reg = g.clone();
    for i in 0..n {
        reg[(i, i)] += C64::new(RIDGE * scale, 0.0);
    }
    if let Some(x) = cholesky_solve(&reg, rhs) {
        return x;
    }
    let x = reg.partial_piv_lu().solve(rhs);
    if finite(&x) {
        x
    } else {
        Mat::zeros(rhs.nrows(), rhs.ncols())
    }
}

fn run_from(u: &Unfoldings, mut f: Factors, cfg: &AlsConfig) -> (Factors, Vec<f64>) {
    let mut history = Vec::with_capacity(cfg.max_iters + 1);
    history.push(u.relative_residual(&f));
    for it in 1..=cfg.max_iters {
        if history[it - 1] <= cfg.converge_residual {
            break;
        }
        for mode in 0..3 {
            u.update(&mut f, mode);
        }
        f.normalize(u.dims);
        let res = u.relative_residual(&f);
        history.push(res);
        if res <= cfg.converge_residual {
            break;
        }
        if it >= cfg.stall_window {
            let old = history[it - cfg.stall_window];
            if old - res < cfg.stall_delta * old {
                break;
            }
        }
    }
    (f, history)
}

/// One ALS run from the given starting factors.
pub fn als_run(t: &Tensor3, start: &Decomposition, cfg: &AlsConfig) -> Result<AlsRun> {
    cfg.validate()?;
    if start.dims() != t.dims() {
        return Err(Error::DimensionMismatch(format!(
            "start factors have lengths {:?}, tensor is {:?}",
            start.dims(),
            t.dims()
        )));
    }
    let u = Unfoldings::new(t);
    let (f, history) = run_from(&u, Factors::from_decomposition(start, start.len()), cfg);
    Ok(AlsRun {
        factors: f.to_decomposition(t.dims()),
        history,
    })
}

fn restart_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Best rank-`rank` CP fit over `cfg.restarts` seeded random starts.
/// Deterministic in `(t, rank, cfg)`.
pub fn als_fit(t: &Tensor3, rank: usize, cfg: &AlsConfig) -> Result<AlsResult> {
    als_fit_from(t, rank, cfg, None)
}

/// Like [`als_fit`], but first tries `warm` padded to `rank` terms. The
/// padded warm start is itself a candidate, so the result is never worse
/// than `warm`.
pub fn als_fit_from(
    t: &Tensor3,
    rank: usize,
    cfg: &AlsConfig,
    warm: Option<&Decomposition>,
) -> Result<AlsResult> {
    cfg.validate()?;
    if rank == 0 {
        return Err(Error::InvalidArgument("ALS rank must be at least 1".into()));
    }
    let dims = t.dims();
    let u = Unfoldings::new(t);

    struct Best {
        factors: Factors,
        residual: f64,
        iterations: usize,
    }
    let mut best: Option<Best> = None;
    fn consider(best: &mut Option<Best>, factors: Factors, residual: f64, iterations: usize) {
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            *best = Some(Best {
                factors,
                residual,
                iterations,
            });
        }
    }

    let mut restarts_used = 0;
    if let Some(w) = warm {
        if w.dims() != dims || w.len() > rank {
            return Err(Error::DimensionMismatch(format!(
                "warm start of {} terms over {:?} does not fit rank {rank} over {dims:?}",
                w.len(),
                w.dims()
            )));
        }
        let padded = Factors::from_decomposition(w, rank);
        let res = u.relative_residual(&padded);
        consider(&mut best, padded.clone(), res, 0);

        // Seed the extra columns with small random values so they can move.
        let mut perturbed = padded;
        let mut rng = restart_rng(cfg.seed, WARM_STREAM);
        let noise = Factors::random(dims, rank, &mut rng);
        let scale = 1e-3 * (1.0 + u.norm);
        for (m, &d) in dims.iter().enumerate() {
            for row in 0..d {
                for k in w.len()..rank {
                    perturbed.mats[m][row * rank + k] = noise.mats[m][row * rank + k] * scale;
                }
            }
        }
        let (f, hist) = run_from(&u, perturbed, cfg);
        let res = *hist.last().expect("non-empty");
        consider(&mut best, f, res, hist.len() - 1);
        restarts_used += 1;
    }

    for restart in 0..cfg.restarts {
        if best
            .as_ref()
            .is_some_and(|b| b.residual <= cfg.converge_residual)
        {
            break;
        }
        let mut rng = restart_rng(cfg.seed, restart as u64);
        let start = Factors::random(dims, rank, &mut rng);
        let (f, hist) = run_from(&u, start, cfg);
        let res = *hist.last().expect("non-empty");
        consider(&mut best, f, res, hist.len() - 1);
        restarts_used += 1;
    }

    let b = best.expect("at least one restart");
    Ok(AlsResult {
        rank_tried: rank,
        best_residual: b.residual,
        converged: b.residual <= cfg.converge_residual,
        factors: b.factors.to_decomposition(dims),
        restarts_used,
        iterations_of_best: b.iterations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Open,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Inconsistent => "INCONSISTENT",
            Verdict::Open => "OPEN",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlsAttempt {
    pub rank: usize,
    pub best_residual: f64,
    pub converged: bool,
    pub restarts: usize,
}

/// Proved bounds, certificate and ALS evidence for one tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub target: String,
    pub mode_ranks: [usize; 3],
    /// Largest flattening rank: a proved lower bound.
    pub proved_lower: usize,
    /// Length of a certificate verified to `CERTIFICATE_TOL`.
    pub certified_upper: Option<usize>,
    pub certificate_residual: Option<f64>,
    /// Smallest rank at which ALS converged.
    pub als_upper: Option<usize>,
    /// Ranks at which ALS did not converge, with the best residual reached.
    pub als_failures: Vec<AlsAttempt>,
    /// Every ALS fit performed, in rank order.
    pub als_attempts: Vec<AlsAttempt>,
    pub claimed: Option<ClaimedRank>,
    pub verdict: Verdict,
}

fn decide(
    proved_lower: usize,
    certified_upper: Option<usize>,
    als_upper: Option<usize>,
    claim: Option<&ClaimedRank>,
) -> Verdict {
    if certified_upper.is_some_and(|u| u < proved_lower)
        || als_upper.is_some_and(|a| a < proved_lower)
    {
        return Verdict::Inconsistent;
    }
    let Some(claim) = claim else {
        // No claim: the search is conclusive when ALS closes the gap.
        return match als_upper {
            Some(a) if a == proved_lower => Verdict::Consistent,
            _ => Verdict::Open,
        };
    };
    if claim.max() < proved_lower
        || certified_upper.is_some_and(|u| u < claim.min())
        || als_upper.is_some_and(|a| a < claim.min())
    {
        return Verdict::Inconsistent;
    }
    match claim.exact() {
        Some(r) if proved_lower == r || als_upper == Some(r) => Verdict::Consistent,
        _ => Verdict::Open,
    }
}

/// Rank search: flattening bound, certificate check, then ALS at each rank
/// from the flattening bound upward until a fit converges or the certified
/// (or dimensional) upper bound is reached. Each fit is warm-started from the
/// previous rank's best factors.
pub fn rank_search(
    target: &str,
    t: &Tensor3,
    hint: Option<&Decomposition>,
    claim: Option<&ClaimedRank>,
    cfg: &AlsConfig,
) -> Result<RankReport> {
    cfg.validate()?;
    let fb = flattening_lower_bound(t, RANK_TOL)?;
    let proved_lower = fb.lower_bound;

    let (certified_upper, certificate_residual) = match hint {
        Some(d) => {
            let res = verify_decomposition(t, d)?;
            ((res <= CERTIFICATE_TOL).then_some(d.len()), Some(res))
        }
        None => (None, None),
    };

    let [d1, d2, d3] = t.dims();
    let dims_bound = (d1 * d2).min(d1 * d3).min(d2 * d3);
    let upper = certified_upper.unwrap_or(dims_bound);

    let mut attempts = Vec::new();
    let mut als_upper = if proved_lower == 0 { Some(0) } else { None };
    let mut prev: Option<Decomposition> = None;
    if proved_lower > 0 {
        for rank in proved_lower..=upper.max(proved_lower) {
            let fit = als_fit_from(t, rank, cfg, prev.as_ref())?;
            attempts.push(AlsAttempt {
                rank,
                best_residual: fit.best_residual,
                converged: fit.converged,
                restarts: fit.restarts_used,
            });
            if fit.converged {
                als_upper = Some(rank);
                break;
            }
            prev = Some(fit.factors);
        }
    }

    Ok(RankReport {
        target: target.to_string(),
        mode_ranks: fb.mode_ranks,
        proved_lower,
        certified_upper,
        certificate_residual,
        als_upper,
        als_failures: attempts.iter().filter(|a| !a.converged).copied().collect(),
        als_attempts: attempts,
        claimed: claim.cloned(),
        verdict: decide(proved_lower, certified_upper, als_upper, claim),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::r;

    fn quick() -> AlsConfig {
        AlsConfig {
            restarts: 5,
            ..AlsConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(AlsConfig::default().validate().is_ok());
        let bad = AlsConfig {
            converge_residual: 1.0,
            ..AlsConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AlsConfig {
            restarts: 0,
            ..AlsConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rank_one_fit() {
        let u = vec![r(1.), C64::new(0.5, -1.), r(0.), r(2.)];
        let v = vec![r(0.3), r(1.), C64::new(0., 1.), r(-1.)];
        let w = vec![r(1.), r(1.), r(1.), r(0.5)];
        let t = Tensor3::outer(&u, &v, &w);
        let fit = als_fit(&t, 1, &quick()).unwrap();
        assert!(fit.converged);
        assert!(fit.best_residual <= 1e-10);
        assert_eq!(fit.factors.len(), 1);
    }

    #[test]
    fn zero_rank_rejected() {
        assert!(als_fit(&Tensor3::zeros([2, 2, 2]), 0, &quick()).is_err());
    }

    #[test]
    fn zero_tensor_converges() {
        let fit = als_fit(&Tensor3::zeros([2, 2, 2]), 1, &quick()).unwrap();
        assert!(fit.converged);
        let rep = rank_search("zero", &Tensor3::zeros([2, 2, 2]), None, None, &quick()).unwrap();
        assert_eq!(rep.proved_lower, 0);
        assert_eq!(rep.als_upper, Some(0));
        assert!(rep.als_attempts.is_empty());
    }

    #[test]
    fn deterministic() {
        let t = crate::gates::matmul_tensor();
        let cfg = AlsConfig {
            restarts: 2,
            max_iters: 200,
            ..AlsConfig::default()
        };
        assert_eq!(als_fit(&t, 5, &cfg).unwrap(), als_fit(&t, 5, &cfg).unwrap());
    }

    #[test]
    fn warm_start_never_worse() {
        let t = crate::gates::matmul_tensor();
        let cfg = AlsConfig {
            restarts: 1,
            max_iters: 100,
            ..AlsConfig::default()
        };
        let r5 = als_fit(&t, 5, &cfg).unwrap();
        let r6 = als_fit_from(&t, 6, &cfg, Some(&r5.factors)).unwrap();
        assert!(r6.best_residual <= r5.best_residual + 1e-10);
    }

    #[test]
    fn verdict_rules() {
        let exact = ClaimedRank::Exact(6);
        assert_eq!(
            decide(4, Some(6), Some(6), Some(&exact)),
            Verdict::Consistent
        );
        assert_eq!(decide(4, Some(6), None, Some(&exact)), Verdict::Open);
        assert_eq!(
            decide(4, Some(6), Some(5), Some(&exact)),
            Verdict::Inconsistent
        );
        assert_eq!(decide(6, Some(6), None, Some(&exact)), Verdict::Consistent);
        assert_eq!(decide(4, Some(3), None, None), Verdict::Inconsistent);
        let set = ClaimedRank::OneOf(vec![7, 8]);
        assert_eq!(decide(4, Some(8), Some(7), Some(&set)), Verdict::Open);
        assert_eq!(decide(4, Some(8), Some(8), Some(&set)), Verdict::Open);
        assert_eq!(
            decide(4, Some(8), Some(6), Some(&set)),
            Verdict::Inconsistent
        );
        assert_eq!(decide(3, None, Some(3), None), Verdict::Consistent);
        assert_eq!(decide(3, None, Some(4), None), Verdict::Open);
    }
}
