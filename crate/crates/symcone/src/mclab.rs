//! Monte Carlo experiments on the quotient construction U = g(X+Y)(X):
//! with the Cholesky division algorithm the quotient is independent of the
//! sum for Riesz-distributed inputs, while the quadratic-representation
//! algorithm breaks that independence for non-Wishart exponents. The
//! instrument is distance correlation with a permutation test, plus
//! per-marginal goodness of fit for the sum.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma_lr;

use crate::element::{ConeElement, SymElement};
use crate::error::{Error, Result};
use crate::power::PowerParam;
use crate::riesz::RieszParams;
use crate::rng::stream_rng;
use crate::stats::{ks_pvalue, ks_test};
use crate::triangular::DivisionAlgorithm;

/// Pairwise-distance matrix of the rows of `x`, doubly centered.
fn centered_distance_matrix(x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.nrows();
    let mut d = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let dist = (x.row(i) - x.row(j)).norm();
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    let grand = d.sum() / (m * m) as f64;
    let row_means: Vec<f64> = (0..m).map(|i| d.row(i).sum() / m as f64).collect();
    for i in 0..m {
        for j in 0..m {
            d[(i, j)] += grand - row_means[i] - row_means[j];
        }
    }
    d
}

fn dcor_from_centered(ca: &DMatrix<f64>, cb: &DMatrix<f64>) -> f64 {
    let m = ca.nrows() as f64;
    let dcov2 = ca.iter().zip(cb.iter()).map(|(a, b)| a * b).sum::<f64>() / (m * m);
    let va = ca.iter().map(|a| a * a).sum::<f64>() / (m * m);
    let vb = cb.iter().map(|b| b * b).sum::<f64>() / (m * m);
    let denom = (va * vb).sqrt();
    if denom <= 0.0 {
        return 0.0;
    }
    (dcov2 / denom).max(0.0).sqrt()
}

/// Empirical distance correlation between two samples given as the rows of
/// `a` and `b` (one observation per row, equal counts). Zero for a
/// degenerate (constant) sample.
pub fn distance_correlation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows(), "sample counts must match");
    assert!(a.nrows() >= 2, "need at least two observations");
    dcor_from_centered(&centered_distance_matrix(a), &centered_distance_matrix(b))
}

/// Permutation p-value (1 + #{permuted ≥ observed}) / (n_perm + 1) for an
/// arbitrary bivariate statistic, permuting the rows of `b`.
pub fn permutation_pvalue(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    statistic: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> f64,
    n_perm: usize,
    rng: &mut impl Rng,
) -> f64 {
    assert!(n_perm >= 99, "need at least 99 permutations");
    let observed = statistic(a, b);
    let m = b.nrows();
    let mut idx: Vec<usize> = (0..m).collect();
    let mut exceed = 0usize;
    for _ in 0..n_perm {
        idx.shuffle(rng);
        let permuted = DMatrix::from_fn(m, b.ncols(), |i, j| b[(idx[i], j)]);
        if statistic(a, &permuted) >= observed {
            exceed += 1;
        }
    }
    (1 + exceed) as f64 / (n_perm + 1) as f64
}

/// Distance correlation with a permutation test, reusing the centered
/// distance matrices across permutations (a row permutation of the sample
/// permutes rows and columns of the centered matrix simultaneously).
///
/// Permutations are pre-generated from the RNG, so the parallel evaluation
/// is deterministic.
pub fn dcor_permutation_test(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    n_perm: usize,
    rng: &mut impl Rng,
) -> (f64, f64) {
    assert!(n_perm >= 99, "need at least 99 permutations");
    let ca = centered_distance_matrix(a);
    let cb = centered_distance_matrix(b);
    let observed = dcor_from_centered(&ca, &cb);
    let m = a.nrows();
    // flat row-major copies keep the permuted traversal inside one cached
    // row of cb at a time
    let flat = |x: &DMatrix<f64>| -> Vec<f64> {
        let mut v = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                v.push(x[(i, j)]);
            }
        }
        v
    };
    let fa = flat(&ca);
    let fb = flat(&cb);
    let mf = m as f64;
    let va = fa.iter().map(|v| v * v).sum::<f64>() / (mf * mf);
    let vb = fb.iter().map(|v| v * v).sum::<f64>() / (mf * mf);
    let denom = (va * vb).sqrt();
    let perms: Vec<Vec<u32>> = (0..n_perm)
        .map(|_| {
            let mut idx: Vec<u32> = (0..m as u32).collect();
            idx.shuffle(rng);
            idx
        })
        .collect();
    let stats: Vec<f64> = perms
        .par_iter()
        .map(|idx| {
            let mut dcov2 = 0.0;
            for i in 0..m {
                let ca_row = &fa[i * m..(i + 1) * m];
                let pi = idx[i] as usize;
                let cb_row = &fb[pi * m..(pi + 1) * m];
                let mut acc = 0.0;
                for j in 0..m {
                    acc += ca_row[j] * cb_row[idx[j] as usize];
                }
                dcov2 += acc;
            }
            dcov2 /= mf * mf;
            if denom <= 0.0 {
                0.0
            } else {
                (dcov2 / denom).max(0.0).sqrt()
            }
        })
        .collect();
    let exceed = stats.iter().filter(|&&s| s >= observed).count();
    let p = (1 + exceed) as f64 / (n_perm + 1) as f64;
    (observed, p)
}

/// Configuration of the quotient-independence experiments.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub s: PowerParam,
    pub s_prime: PowerParam,
    pub sigma: ConeElement,
    pub n_samples: usize,
    pub seed: u64,
    pub algorithm: DivisionAlgorithm,
    pub n_permutations: usize,
    /// Pair count for the O(N²) distance correlation, drawn
    /// deterministically from the seed; at most 4000.
    pub dcor_subsample: usize,
}

impl ExperimentConfig {
    pub fn rank(&self) -> usize {
        self.s.rank()
    }

    pub fn validate(&self) -> Result<()> {
        self.s.require_riesz_admissible()?;
        self.s_prime.require_riesz_admissible()?;
        if self.s.rank() != self.s_prime.rank() || self.s.rank() != self.sigma.dim() {
            return Err(Error::InvalidParameter(
                "s, s' and sigma must have the same rank".into(),
            ));
        }
        if self.n_samples < 100 {
            return Err(Error::InvalidParameter(format!(
                "N = {} violates N >= 100",
                self.n_samples
            )));
        }
        if self.n_permutations < 99 {
            return Err(Error::InvalidParameter(format!(
                "permutations = {} violates permutations >= 99",
                self.n_permutations
            )));
        }
        if self.dcor_subsample < 10 || self.dcor_subsample > 4000 {
            return Err(Error::InvalidParameter(format!(
                "dcor subsample = {} must lie in 10..=4000",
                self.dcor_subsample
            )));
        }
        Ok(())
    }
}

/// Goodness of fit of one transported diagonal marginal of V.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalKs {
    /// Diagonal position (1-based).
    pub index: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// Outcome of one independence experiment.
#[derive(Debug, Clone, Serialize)]
pub struct IndependenceResult {
    pub algorithm: String,
    pub n_samples: usize,
    pub dcor_subsample: usize,
    pub dcor: f64,
    pub permutation_p_value: f64,
    /// Squared Bartlett diagonals of the standardized sum against their
    /// gamma laws.
    pub marginal_ks: Vec<MarginalKs>,
    pub mean_u: SymElement,
    pub mean_v: SymElement,
    /// Entrywise standard error of `mean_v`.
    pub mean_v_se: SymElement,
}

struct PairDraws {
    xs: Vec<ConeElement>,
    vs: Vec<ConeElement>,
}

const STREAM_SAMPLING: u64 = 0;
const STREAM_SUBSAMPLE: u64 = 1;
const STREAM_PERMUTATIONS: u64 = 2;

fn draw_pairs(cfg: &ExperimentConfig) -> Result<PairDraws> {
    let px = RieszParams::new(cfg.s.clone(), cfg.sigma.clone())?;
    let py = RieszParams::new(cfg.s_prime.clone(), cfg.sigma.clone())?;
    let mut rng = stream_rng(cfg.seed, STREAM_SAMPLING);
    let mut xs = Vec::with_capacity(cfg.n_samples);
    let mut vs = Vec::with_capacity(cfg.n_samples);
    for _ in 0..cfg.n_samples {
        let x = px.sample(&mut rng);
        let y = py.sample(&mut rng);
        vs.push(ConeElement::new_unchecked(x.as_sym() + y.as_sym()));
        xs.push(x);
    }
    Ok(PairDraws { xs, vs })
}

fn analyze(
    cfg: &ExperimentConfig,
    draws: &PairDraws,
    algorithm: DivisionAlgorithm,
) -> IndependenceResult {
    let r = cfg.rank();
    let n = cfg.n_samples;
    let e = SymElement::identity(r);
    // standardizer: with σ⁻¹ = W·Wᵀ, the factor of W⁻¹·V·W⁻ᵀ is W⁻¹·chol(V)
    let w = cfg.sigma.inverse().cholesky_factor();
    let w_inv = w
        .solve_lower_triangular(&DMatrix::identity(r, r))
        .expect("Cholesky factor is invertible");

    let m = cfg.dcor_subsample.min(n);
    let mut sub_rng = stream_rng(cfg.seed, STREAM_SUBSAMPLE);
    let chosen = rand::seq::index::sample(&mut sub_rng, n, m).into_vec();
    let mut in_subsample = vec![usize::MAX; n];
    for (row, &i) in chosen.iter().enumerate() {
        in_subsample[i] = row;
    }

    let dim = r * (r + 1) / 2;
    let mut u_rows = DMatrix::zeros(m, dim);
    let mut v_rows = DMatrix::zeros(m, dim);
    let mut sum_u = SymElement::zeros(r);
    let mut sum_v = SymElement::zeros(r);
    let mut sum_v_sq = DMatrix::zeros(r, r);
    let mut bartlett: Vec<Vec<f64>> = vec![Vec::with_capacity(n); r];

    for (i, (x, v)) in draws.xs.iter().zip(&draws.vs).enumerate() {
        let u = algorithm.operator(v).apply(x.as_sym());
        // quotient must land in Ω ∩ (e − Ω), with no tolerance
        assert!(
            u.matrix().clone().cholesky().is_some(),
            "quotient left the cone"
        );
        assert!(
            (&e - &u).matrix().clone().cholesky().is_some(),
            "unit minus quotient left the cone"
        );
        sum_u = &sum_u + &u;
        sum_v = &sum_v + v.as_sym();
        sum_v_sq += v.matrix().map(|t| t * t);
        let t = &w_inv * v.cholesky_factor();
        for k in 0..r {
            bartlett[k].push(t[(k, k)] * t[(k, k)]);
        }
        if in_subsample[i] != usize::MAX {
            let row = in_subsample[i];
            u_rows.set_row(row, &u.vectorize().transpose());
            v_rows.set_row(row, &v.vectorize().transpose());
        }
    }

    let mut perm_rng = stream_rng(cfg.seed, STREAM_PERMUTATIONS);
    let (dcor, p) = dcor_permutation_test(&u_rows, &v_rows, cfg.n_permutations, &mut perm_rng);

    let s_total = cfg.s.plus(&cfg.s_prime).expect("ranks match");
    let marginal_ks = (0..r)
        .map(|k| {
            let shape = s_total.get(k) - k as f64 / 2.0;
            let (stat, _) = ks_test(&bartlett[k], |x| gamma_lr(shape, x));
            MarginalKs {
                index: k + 1,
                statistic: stat,
                p_value: ks_pvalue(n, stat),
            }
        })
        .collect();

    let mean_v = sum_v.scale(1.0 / n as f64);
    let se = DMatrix::from_fn(r, r, |i, j| {
        let var = sum_v_sq[(i, j)] / n as f64 - mean_v.entry(i, j).powi(2);
        (var.max(0.0) / n as f64).sqrt()
    });
    IndependenceResult {
        algorithm: algorithm.as_str().to_string(),
        n_samples: n,
        dcor_subsample: m,
        dcor,
        permutation_p_value: p,
        marginal_ks,
        mean_u: sum_u.scale(1.0 / n as f64),
        mean_v,
        mean_v_se: SymElement::symmetrize(se),
    }
}

/// Draws N independent pairs X ~ R(s, σ), Y ~ R(s′, σ), forms V = X + Y and
/// U = g(V)(X) with the configured division algorithm, and measures the
/// dependence between U and V along with the marginal laws of V.
pub fn run_independence_experiment(cfg: &ExperimentConfig) -> Result<IndependenceResult> {
    cfg.validate()?;
    let draws = draw_pairs(cfg)?;
    Ok(analyze(cfg, &draws, cfg.algorithm))
}

/// Vectorized (U, V) observations of the experiment, one row per sample:
/// the same draws the analysis consumes, for external processing.
pub fn sample_rows(cfg: &ExperimentConfig) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    cfg.validate()?;
    let draws = draw_pairs(cfg)?;
    let dim = cfg.rank() * (cfg.rank() + 1) / 2;
    let mut u_rows = DMatrix::zeros(cfg.n_samples, dim);
    let mut v_rows = DMatrix::zeros(cfg.n_samples, dim);
    for (i, (x, v)) in draws.xs.iter().zip(&draws.vs).enumerate() {
        let u = cfg.algorithm.operator(v).apply(x.as_sym());
        u_rows.set_row(i, &u.vectorize().transpose());
        v_rows.set_row(i, &v.vectorize().transpose());
    }
    Ok((u_rows, v_rows))
}

/// Runs the analysis twice on the same draws, once per division algorithm.
/// Requires a clearly non-constant exponent vector (max sᵢ − min sᵢ ≥ 1):
/// for constant s the two algorithms are statistically indistinguishable.
pub fn run_contrast(cfg: &ExperimentConfig) -> Result<(IndependenceResult, IndependenceResult)> {
    cfg.validate()?;
    let spread = cfg
        .s
        .as_slice()
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - cfg
            .s
            .as_slice()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
    if spread < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "contrast experiment needs max(s) - min(s) >= 1 (got {spread}); \
             a near-constant s is Wishart-like and both algorithms preserve independence"
        )));
    }
    let draws = draw_pairs(cfg)?;
    Ok((
        analyze(cfg, &draws, DivisionAlgorithm::Cholesky),
        analyze(cfg, &draws, DivisionAlgorithm::Quadratic),
    ))
}
