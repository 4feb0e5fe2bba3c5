//! Riesz and beta-Riesz distributions on the cone.
//!
//! R(s, σ) has density Γ_Ω(s)⁻¹ Δ_s(σ⁻¹)⁻¹ e^{−⟨σ,x⟩} Δ_{s−n/r}(x) on Ω,
//! with respect to the Lebesgue measure of the orthonormal coordinates of
//! the trace form. It reduces to the Wishart family for constant s and to
//! the gamma distribution at rank 1. The beta-Riesz law is the distribution
//! of U = g(X+Y)(X) under the Cholesky division algorithm; its density on
//! Ω∩(e−Ω) is B_Ω(s,s′)⁻¹ Δ_{s−n/r}(x) Δ_{s′−n/r}(e−x).

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use statrs::function::gamma::ln_gamma;

use crate::element::{inner, ConeElement, SymElement};
use crate::error::{Error, Result};
use crate::power::{log_gen_power_from_factor, PowerParam};
use crate::triangular::cholesky_div;

/// log Γ_Ω(s) = ((n−r)/2)·log(2π) + Σ_j log Γ(s_j − (j−1)/2),
/// n = r(r+1)/2.
pub fn log_gamma_omega(s: &PowerParam) -> Result<f64> {
    s.require_riesz_admissible()?;
    let r = s.rank();
    let n = r * (r + 1) / 2;
    let mut acc = 0.5 * (n - r) as f64 * (2.0 * std::f64::consts::PI).ln();
    for (j, &sj) in s.as_slice().iter().enumerate() {
        acc += ln_gamma(sj - j as f64 / 2.0);
    }
    Ok(acc)
}

/// log B_Ω(s, s′) = log Γ_Ω(s) + log Γ_Ω(s′) − log Γ_Ω(s + s′).
pub fn log_beta_omega(s: &PowerParam, s_prime: &PowerParam) -> Result<f64> {
    Ok(log_gamma_omega(s)? + log_gamma_omega(s_prime)? - log_gamma_omega(&s.plus(s_prime)?)?)
}

/// log Δ_s(x) if x admits a Cholesky factorization, i.e. lies in the cone.
fn try_log_gen_power(s: &[f64], x: &SymElement) -> Option<f64> {
    let chol = x.matrix().clone().cholesky()?;
    Some(log_gen_power_from_factor(s, &chol.l()))
}

/// Parameters of the Riesz distribution R(s, σ): an admissible exponent
/// vector (sᵢ > (i−1)/2) and a cone element σ.
#[derive(Debug, Clone)]
pub struct RieszParams {
    s: PowerParam,
    sigma: ConeElement,
    /// Lower Cholesky factor W of σ⁻¹; the sampler transports the σ = e
    /// construction by x ↦ W·x·Wᵀ.
    w: DMatrix<f64>,
    /// s − n/r entrywise, the exponent of Δ in the density.
    shifted: PowerParam,
    /// −log Γ_Ω(s) − log Δ_s(σ⁻¹).
    log_norm: f64,
}

impl RieszParams {
    pub fn new(s: PowerParam, sigma: ConeElement) -> Result<Self> {
        s.require_riesz_admissible()?;
        if s.rank() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                got: s.rank(),
            });
        }
        let r = s.rank();
        let sigma_inv = sigma.inverse();
        let w = sigma_inv.cholesky_factor();
        let log_norm = -log_gamma_omega(&s)? - log_gen_power_from_factor(s.as_slice(), &w);
        let shifted = s.offset(-((r + 1) as f64) / 2.0);
        Ok(RieszParams {
            s,
            sigma,
            w,
            shifted,
            log_norm,
        })
    }

    pub fn s(&self) -> &PowerParam {
        &self.s
    }

    pub fn sigma(&self) -> &ConeElement {
        &self.sigma
    }

    pub fn rank(&self) -> usize {
        self.s.rank()
    }

    /// Log density at x; −∞ for points outside the cone.
    pub fn log_density(&self, x: &SymElement) -> f64 {
        assert_eq!(x.dim(), self.rank(), "dimension mismatch");
        match try_log_gen_power(self.shifted.as_slice(), x) {
            Some(lp) => self.log_norm - inner(self.sigma.as_sym(), x) + lp,
            None => f64::NEG_INFINITY,
        }
    }

    /// Log density at x; out-of-support points are an error.
    pub fn log_density_checked(&self, x: &SymElement) -> Result<f64> {
        let v = self.log_density(x);
        if v == f64::NEG_INFINITY {
            Err(Error::OutOfSupport)
        } else {
            Ok(v)
        }
    }

    /// Exact draw by the triangular construction: a lower factor T with
    /// Tᵢᵢ² ~ Gamma(sᵢ − (i−1)/2, rate 1) and Tⱼᵢ ~ N(0, ½) gives
    /// T·Tᵀ ~ R(s, e), which is transported by W·x·Wᵀ.
    pub fn sample(&self, rng: &mut impl Rng) -> ConeElement {
        let x0 = sample_riesz_standard(&self.s, rng);
        let m = &self.w * x0.matrix() * self.w.transpose();
        ConeElement::new_unchecked(SymElement::symmetrize(m))
    }

    /// The mean W·diag(s)·Wᵀ (equals diag(s) when σ = e).
    pub fn mean(&self) -> SymElement {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(self.s.as_slice()));
        SymElement::symmetrize(&self.w * d * self.w.transpose())
    }
}

/// Draw from R(s, e) by the triangular construction.
pub fn sample_riesz_standard(s: &PowerParam, rng: &mut impl Rng) -> ConeElement {
    let r = s.rank();
    let half_normal = Normal::new(0.0, 0.5_f64.sqrt()).expect("valid std");
    let mut t = DMatrix::zeros(r, r);
    for i in 0..r {
        let shape = s.get(i) - i as f64 / 2.0;
        let g = Gamma::new(shape, 1.0)
            .expect("admissible shape")
            .sample(rng);
        t[(i, i)] = g.sqrt();
        for j in 0..i {
            t[(i, j)] = half_normal.sample(rng);
        }
    }
    ConeElement::new_unchecked(SymElement::symmetrize(&t * t.transpose()))
}

/// Parameters of the beta-Riesz distribution: two admissible exponent
/// vectors of the same rank.
#[derive(Debug, Clone)]
pub struct BetaRieszParams {
    s: PowerParam,
    s_prime: PowerParam,
    shifted_s: PowerParam,
    shifted_s_prime: PowerParam,
    log_beta: f64,
}

impl BetaRieszParams {
    pub fn new(s: PowerParam, s_prime: PowerParam) -> Result<Self> {
        s.require_riesz_admissible()?;
        s_prime.require_riesz_admissible()?;
        if s.rank() != s_prime.rank() {
            return Err(Error::DimensionMismatch {
                expected: s.rank(),
                got: s_prime.rank(),
            });
        }
        let r = s.rank();
        let log_beta = log_beta_omega(&s, &s_prime)?;
        let shift = -((r + 1) as f64) / 2.0;
        Ok(BetaRieszParams {
            shifted_s: s.offset(shift),
            shifted_s_prime: s_prime.offset(shift),
            s,
            s_prime,
            log_beta,
        })
    }

    pub fn s(&self) -> &PowerParam {
        &self.s
    }

    pub fn s_prime(&self) -> &PowerParam {
        &self.s_prime
    }

    pub fn rank(&self) -> usize {
        self.s.rank()
    }

    /// Log density at x; −∞ outside Ω∩(e−Ω).
    pub fn log_density(&self, x: &SymElement) -> f64 {
        assert_eq!(x.dim(), self.rank(), "dimension mismatch");
        let e_minus_x = &SymElement::identity(self.rank()) - x;
        match (
            try_log_gen_power(self.shifted_s.as_slice(), x),
            try_log_gen_power(self.shifted_s_prime.as_slice(), &e_minus_x),
        ) {
            (Some(a), Some(b)) => -self.log_beta + a + b,
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn log_density_checked(&self, x: &SymElement) -> Result<f64> {
        let v = self.log_density(x);
        if v == f64::NEG_INFINITY {
            Err(Error::OutOfSupport)
        } else {
            Ok(v)
        }
    }

    /// Constructive draw: X ~ R(s, e), Y ~ R(s′, e) independent, return
    /// g(X+Y)(X) under the Cholesky division algorithm. The law does not
    /// depend on the σ used for X and Y, so σ = e is fixed internally.
    pub fn sample(&self, rng: &mut impl Rng) -> ConeElement {
        let x = sample_riesz_standard(&self.s, rng);
        let y = sample_riesz_standard(&self.s_prime, rng);
        let v = ConeElement::new_unchecked(x.as_sym() + y.as_sym());
        ConeElement::new_unchecked(cholesky_div(&v).apply(x.as_sym()))
    }
}
