//! Principal minors and the generalized power function Δ_s, together with
//! the leading-block projections they are built from.
//!
//! Δ_s(x) = Δ₁(x)^{s₁−s₂} Δ₂(x)^{s₂−s₃} ··· Δ_r(x)^{s_r}, where Δ_k is the
//! determinant of the leading k×k block. On the cone, minors are evaluated
//! in log space through the Cholesky factor: log Δ_k(x) = 2 Σ_{i≤k} log T_ii
//! for x = T·Tᵀ, which collapses the product to log Δ_s(x) = 2 Σ_i s_i log T_ii
//! and avoids determinant overflow at larger ranks.

use nalgebra::DMatrix;

use crate::element::{ConeElement, SymElement};
use crate::endo::EndoE;
use crate::error::{Error, Result};
use crate::jordan::{quad_rep, JordanFrame};

/// Exponent vector s ∈ ℝʳ for the generalized power Δ_s and the Riesz laws.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerParam {
    s: Vec<f64>,
}

impl PowerParam {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidParameter("s must be nonempty".into()));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("s entries must be finite".into()));
        }
        Ok(PowerParam { s })
    }

    /// The constant vector (p, …, p), for which Δ_s = det^p.
    pub fn constant(r: usize, p: f64) -> Self {
        PowerParam { s: vec![p; r] }
    }

    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.s
    }

    pub fn get(&self, i: usize) -> f64 {
        self.s[i]
    }

    /// Whether sᵢ > (i−1)/2 for all i (1-based), the admissible range of the
    /// Riesz distribution parameters.
    pub fn riesz_admissible(&self) -> bool {
        self.s.iter().enumerate().all(|(i, &v)| v > i as f64 / 2.0)
    }

    /// Errors with a message naming the first violated constraint.
    pub fn require_riesz_admissible(&self) -> Result<()> {
        for (i, &v) in self.s.iter().enumerate() {
            if v <= i as f64 / 2.0 {
                return Err(Error::InvalidParameter(format!(
                    "s[{}] = {} violates s_i > (i-1)/2",
                    i + 1,
                    v
                )));
            }
        }
        Ok(())
    }

    /// Entrywise sum s + s'.
    pub fn plus(&self, other: &PowerParam) -> Result<PowerParam> {
        if self.rank() != other.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: other.rank(),
            });
        }
        Ok(PowerParam {
            s: self.s.iter().zip(&other.s).map(|(a, b)| a + b).collect(),
        })
    }

    /// Entrywise shift s + m·(1, …, 1).
    pub fn offset(&self, m: f64) -> PowerParam {
        PowerParam {
            s: self.s.iter().map(|v| v + m).collect(),
        }
    }
}

/// Principal minor Δ_k(x): determinant of the leading k×k block, k in 1..=r.
pub fn principal_minor(k: usize, x: &SymElement) -> Result<f64> {
    let r = x.dim();
    if k == 0 || k > r {
        return Err(Error::BlockIndexOutOfRange { k, r });
    }
    Ok(x.matrix().view((0, 0), (k, k)).determinant())
}

/// log Δ_s(x) on the cone, evaluated through the Cholesky factor.
pub fn log_gen_power(s: &PowerParam, x: &ConeElement) -> Result<f64> {
    if s.rank() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: s.rank(),
        });
    }
    let l = x.cholesky_factor();
    Ok(log_gen_power_from_factor(s.as_slice(), &l))
}

/// Δ_s(x) on the cone.
pub fn gen_power(s: &PowerParam, x: &ConeElement) -> Result<f64> {
    log_gen_power(s, x).map(f64::exp)
}

/// log Δ_s computed from a lower Cholesky factor with positive diagonal:
/// 2 Σ_i s_i log L_ii.
pub(crate) fn log_gen_power_from_factor(s: &[f64], l: &DMatrix<f64>) -> f64 {
    s.iter()
        .enumerate()
        .map(|(i, &si)| 2.0 * si * l[(i, i)].ln())
        .sum()
}

/// Orthogonal projection onto the leading k×k subalgebra: zeroes every entry
/// outside the leading block.
pub fn proj_pk(k: usize, x: &SymElement) -> Result<SymElement> {
    let r = x.dim();
    if k == 0 || k > r {
        return Err(Error::BlockIndexOutOfRange { k, r });
    }
    let mut m = DMatrix::zeros(r, r);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = x.entry(i, j);
        }
    }
    Ok(SymElement::from_symmetric(m))
}

/// Inverse of the leading k×k block, embedded back into the corner with
/// zeros elsewhere: the inverse of P_k(x) taken inside the subalgebra.
pub fn padded_block_inverse(k: usize, x: &ConeElement) -> Result<SymElement> {
    padded_block_inverse_sym(k, x.as_sym())
}

/// Same as [`padded_block_inverse`] but accepts any symmetric matrix whose
/// leading block is positive definite; used by finite-difference probes.
pub(crate) fn padded_block_inverse_sym(k: usize, x: &SymElement) -> Result<SymElement> {
    let r = x.dim();
    if k == 0 || k > r {
        return Err(Error::BlockIndexOutOfRange { k, r });
    }
    let block = x.matrix().view((0, 0), (k, k)).into_owned();
    let inv = block
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("leading block is singular".into()))?
        .inverse();
    let mut m = DMatrix::zeros(r, r);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = (inv[(i, j)] + inv[(j, i)]) * 0.5;
        }
    }
    Ok(SymElement::from_symmetric(m))
}

/// The operator q_r P(c₁+…+c_r) + Σ_{k<r} (q_k − q_{k+1}) P(c₁+…+c_k),
/// whose action multiplies the Peirce component x_ij (i ≤ j) by q_max(i,j).
///
/// Both characterizations are assembled and compared; disagreement beyond
/// rounding indicates a broken invariant.
pub fn peirce_reweight_operator(q: &[f64]) -> EndoE {
    let r = q.len();
    assert!(r >= 1, "q must be nonempty");
    let frame = JordanFrame::new(r);
    let mut op = quad_rep(&frame.partial_sum(r)).scale(q[r - 1]);
    for k in 1..r {
        let w = q[k - 1] - q[k];
        if w != 0.0 {
            op = &op + &quad_rep(&frame.partial_sum(k)).scale(w);
        }
    }
    let direct = EndoE::from_action(r, |x| {
        let mut m = x.matrix().clone();
        for i in 0..r {
            for j in 0..r {
                m[(i, j)] *= q[i.max(j)];
            }
        }
        SymElement::from_symmetric(m)
    });
    let scale = q.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let diff = (&op - &direct).norm();
    assert!(
        diff <= 1e-12 * scale.max(1.0),
        "reweighting operator characterizations disagree by {diff:.3e}"
    );
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::inner;
    use crate::rng::stream_rng;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn random_spd(r: usize, rng: &mut impl Rng) -> ConeElement {
        let l = DMatrix::from_fn(r, r, |i, j| {
            if i > j {
                rng.random_range(-1.0..1.0)
            } else if i == j {
                rng.random_range(-1.0..1.0f64).exp()
            } else {
                0.0
            }
        });
        ConeElement::new_unchecked(SymElement::symmetrize(&l * l.transpose()))
    }

    fn random_sym(r: usize, rng: &mut impl Rng) -> SymElement {
        SymElement::symmetrize(DMatrix::from_fn(r, r, |_, _| rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn minor_examples() {
        let e = SymElement::identity(3);
        for k in 1..=3 {
            assert_relative_eq!(principal_minor(k, &e).unwrap(), 1.0);
        }
        let x = SymElement::new(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        assert_relative_eq!(principal_minor(1, &x).unwrap(), 2.0);
        assert_relative_eq!(principal_minor(2, &x).unwrap(), 3.0);
        let d = SymElement::from_diagonal(&[2.0, 3.0, 4.0]);
        assert_relative_eq!(principal_minor(1, &d).unwrap(), 2.0);
        assert_relative_eq!(principal_minor(2, &d).unwrap(), 6.0);
        assert_relative_eq!(principal_minor(3, &d).unwrap(), 24.0, epsilon = 1e-12);
        assert!(principal_minor(0, &d).is_err());
        assert!(principal_minor(4, &d).is_err());
    }

    #[test]
    fn gen_power_on_diagonal_elements() {
        let lam = [0.7, 2.0, 3.5];
        let x = ConeElement::try_new(SymElement::from_diagonal(&lam)).unwrap();
        let s = PowerParam::new(vec![1.2, -0.4, 2.0]).unwrap();
        let expected: f64 = lam
            .iter()
            .zip(s.as_slice())
            .map(|(l, si)| l.powf(*si))
            .product();
        assert_relative_eq!(gen_power(&s, &x).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn constant_exponent_is_det_power() {
        let mut rng = stream_rng(20, 0);
        for _ in 0..20 {
            let x = random_spd(4, &mut rng);
            let p = rng.random_range(-2.0..2.0);
            let s = PowerParam::constant(4, p);
            let expected = x.matrix().determinant().powf(p);
            assert_relative_eq!(gen_power(&s, &x).unwrap(), expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn gen_power_is_additive_in_s() {
        let mut rng = stream_rng(21, 0);
        for _ in 0..50 {
            let x = random_spd(5, &mut rng);
            let s = PowerParam::new((0..5).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
            let s2 =
                PowerParam::new((0..5).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
            let lhs = log_gen_power(&s.plus(&s2).unwrap(), &x).unwrap();
            let rhs = log_gen_power(&s, &x).unwrap() + log_gen_power(&s2, &x).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn scalar_shift_multiplies_by_det_power() {
        let mut rng = stream_rng(22, 0);
        for _ in 0..20 {
            let x = random_spd(4, &mut rng);
            let s = PowerParam::new((0..4).map(|_| rng.random_range(-1.5..1.5)).collect()).unwrap();
            let m = rng.random_range(-1.0..1.0);
            let lhs = log_gen_power(&s.offset(m), &x).unwrap();
            let rhs = log_gen_power(&s, &x).unwrap() + m * x.matrix().determinant().ln();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn gen_power_matches_direct_minor_product() {
        let mut rng = stream_rng(23, 0);
        for _ in 0..20 {
            let x = random_spd(4, &mut rng);
            let s: Vec<f64> = (0..4).map(|_| rng.random_range(-1.5..1.5)).collect();
            let mut direct = 0.0;
            for k in 1..=4 {
                let exp = s[k - 1] - if k < 4 { s[k] } else { 0.0 };
                direct += exp * principal_minor(k, &x).unwrap().ln();
            }
            let via_factor = log_gen_power(&PowerParam::new(s).unwrap(), &x).unwrap();
            assert!((via_factor - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn admissibility_predicate() {
        assert!(PowerParam::new(vec![0.1, 0.6, 1.1])
            .unwrap()
            .riesz_admissible());
        let bad = PowerParam::new(vec![0.1, 0.4]).unwrap();
        assert!(!bad.riesz_admissible());
        let msg = bad.require_riesz_admissible().unwrap_err().to_string();
        assert_eq!(msg, "s[2] = 0.4 violates s_i > (i-1)/2");
    }

    #[test]
    fn projection_and_block_inverse() {
        let e = ConeElement::identity(3);
        for k in 1..=3 {
            let jk = JordanFrame::new(3).partial_sum(k);
            assert!((&proj_pk(k, &e).unwrap() - &jk).norm() < 1e-15);
            assert!((&padded_block_inverse(k, &e).unwrap() - &jk).norm() < 1e-14);
        }

        let mut rng = stream_rng(24, 0);
        let x = random_spd(3, &mut rng);
        // k = r is the full inverse
        let full = padded_block_inverse(3, &x).unwrap();
        assert!((&full - x.inverse().as_sym()).norm() < 1e-10);
        // k = 2: block of the product is the 2×2 identity
        let pbi = padded_block_inverse(2, &x).unwrap();
        let prod = pbi.matrix().view((0, 0), (2, 2)) * x.matrix().view((0, 0), (2, 2));
        assert!((prod - DMatrix::<f64>::identity(2, 2)).norm() < 1e-11);
    }

    #[test]
    fn reweight_operator_examples() {
        // constant q is a scalar multiple of the identity
        let op = peirce_reweight_operator(&[1.7, 1.7, 1.7]);
        assert!((op.matrix() - DMatrix::<f64>::identity(6, 6).scale(1.7)).norm() < 1e-13);

        // rank 2 hand case: x₁₁ ↦ q₁x₁₁, x₁₂ ↦ q₂x₁₂, x₂₂ ↦ q₂x₂₂
        let (q1, q2) = (2.0, -0.5);
        let op = peirce_reweight_operator(&[q1, q2]);
        let mut rng = stream_rng(25, 0);
        let x = random_sym(2, &mut rng);
        let y = op.apply(&x);
        assert_relative_eq!(y.entry(0, 0), q1 * x.entry(0, 0), epsilon = 1e-13);
        assert_relative_eq!(y.entry(0, 1), q2 * x.entry(0, 1), epsilon = 1e-13);
        assert_relative_eq!(y.entry(1, 1), q2 * x.entry(1, 1), epsilon = 1e-13);

        // random rank 4 instance against entrywise reweighting
        let q: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
        let op = peirce_reweight_operator(&q);
        let x = random_sym(4, &mut rng);
        let y = op.apply(&x);
        for i in 0..4 {
            for j in 0..4 {
                assert_relative_eq!(y.entry(i, j), q[i.max(j)] * x.entry(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gradient_of_log_minor_at_identity() {
        // directional derivative of log Δ_k at e is ⟨J_k, h⟩
        let r = 3;
        let e = SymElement::identity(r);
        let mut rng = stream_rng(26, 0);
        let h = random_sym(r, &mut rng);
        let eps = 1e-6;
        for k in 1..=r {
            let fd = (principal_minor(k, &(&e + &h.scale(eps))).unwrap().ln()
                - principal_minor(k, &(&e - &h.scale(eps))).unwrap().ln())
                / (2.0 * eps);
            let grad = JordanFrame::new(r).partial_sum(k);
            assert!((fd - inner(&grad, &h)).abs() < 1e-8);
        }
    }
}
