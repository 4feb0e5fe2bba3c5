//! Elements of the algebra of real symmetric r×r matrices and of its open
//! cone of positive definite matrices.
//!
//! The space carries the trace inner product ⟨x, y⟩ = tr(x·y). The fixed
//! orthonormal basis is {e_ii} followed by {(e_ij + e_ji)/√2, i < j} in
//! row-major order; all operator matrices and vectorizations use this basis
//! and ordering so that results are reproducible across runs.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative threshold below which an eigenvalue counts as non-positive.
pub const SPD_EIG_TOLERANCE: f64 = 1e-12;

/// Dimension of the symmetric matrix space, n = r(r+1)/2.
pub fn sym_dim(r: usize) -> usize {
    r * (r + 1) / 2
}

/// Basis index pairs: the r diagonal positions, then the off-diagonal
/// positions (i, j), i < j, in row-major order.
pub fn basis_pairs(r: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(sym_dim(r));
    for i in 0..r {
        pairs.push((i, i));
    }
    for i in 0..r {
        for j in (i + 1)..r {
            pairs.push((i, j));
        }
    }
    pairs
}

/// A real symmetric matrix, the element type of the algebra.
///
/// Construction symmetrizes, so the stored matrix always equals its
/// transpose entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct SymElement {
    m: DMatrix<f64>,
}

impl SymElement {
    /// Builds an element from an arbitrary square matrix by symmetrizing
    /// (m + mᵀ)/2. Fails on non-square input or non-finite entries.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self::symmetrize(m))
    }

    /// (m + mᵀ)/2 of a square matrix known to have finite entries.
    pub(crate) fn symmetrize(m: DMatrix<f64>) -> Self {
        let s = (&m + m.transpose()) * 0.5;
        SymElement { m: s }
    }

    /// Wraps a matrix that is already exactly symmetric.
    pub(crate) fn from_symmetric(m: DMatrix<f64>) -> Self {
        debug_assert!(m == m.transpose(), "matrix must be exactly symmetric");
        SymElement { m }
    }

    pub fn zeros(r: usize) -> Self {
        SymElement {
            m: DMatrix::zeros(r, r),
        }
    }

    /// The unit element e (identity matrix).
    pub fn identity(r: usize) -> Self {
        SymElement {
            m: DMatrix::identity(r, r),
        }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        SymElement {
            m: DMatrix::from_diagonal(&DVector::from_row_slice(d)),
        }
    }

    /// The matrix unit e_ii, the i-th standard frame idempotent (0-based).
    pub fn frame_unit(r: usize, i: usize) -> Self {
        let mut m = DMatrix::zeros(r, r);
        m[(i, i)] = 1.0;
        SymElement { m }
    }

    /// e_ij + e_ji for i ≠ j (unnormalized off-diagonal symmetric unit).
    pub fn sym_unit(r: usize, i: usize, j: usize) -> Self {
        assert_ne!(i, j, "off-diagonal unit needs i != j");
        let mut m = DMatrix::zeros(r, r);
        m[(i, j)] = 1.0;
        m[(j, i)] = 1.0;
        SymElement { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Norm induced by the trace inner product (Frobenius norm).
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, a: f64) -> SymElement {
        SymElement { m: &self.m * a }
    }

    /// Coordinates in the orthonormal basis; off-diagonal coordinates carry
    /// the √2 factor so that ‖vectorize(x)‖² = ⟨x, x⟩.
    pub fn vectorize(&self) -> DVector<f64> {
        let r = self.dim();
        let pairs = basis_pairs(r);
        let sqrt2 = std::f64::consts::SQRT_2;
        DVector::from_iterator(
            pairs.len(),
            pairs.iter().map(|&(i, j)| {
                if i == j {
                    self.m[(i, i)]
                } else {
                    sqrt2 * self.m[(i, j)]
                }
            }),
        )
    }

    /// Inverse of [`SymElement::vectorize`].
    pub fn devectorize(r: usize, v: &DVector<f64>) -> SymElement {
        let pairs = basis_pairs(r);
        assert_eq!(v.len(), pairs.len(), "coordinate vector has wrong length");
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::zeros(r, r);
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if i == j {
                m[(i, i)] = v[k];
            } else {
                m[(i, j)] = inv_sqrt2 * v[k];
                m[(j, i)] = inv_sqrt2 * v[k];
            }
        }
        SymElement { m }
    }
}

impl serde::Serialize for SymElement {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.m[(i, j)]).collect())
            .collect();
        rows.serialize(ser)
    }
}

impl std::ops::Add for &SymElement {
    type Output = SymElement;
    fn add(self, rhs: &SymElement) -> SymElement {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        SymElement {
            m: &self.m + &rhs.m,
        }
    }
}

impl std::ops::Sub for &SymElement {
    type Output = SymElement;
    fn sub(self, rhs: &SymElement) -> SymElement {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        SymElement {
            m: &self.m - &rhs.m,
        }
    }
}

impl std::ops::Neg for &SymElement {
    type Output = SymElement;
    fn neg(self) -> SymElement {
        SymElement { m: -&self.m }
    }
}

impl std::ops::Mul<f64> for &SymElement {
    type Output = SymElement;
    fn mul(self, a: f64) -> SymElement {
        self.scale(a)
    }
}

/// Trace inner product ⟨x, y⟩ = tr(x·y).
pub fn inner(x: &SymElement, y: &SymElement) -> f64 {
    assert_eq!(x.dim(), y.dim(), "dimension mismatch");
    // tr(x·y) = Σ_ij x_ij y_ij for symmetric x, y.
    x.matrix()
        .iter()
        .zip(y.matrix().iter())
        .map(|(a, b)| a * b)
        .sum()
}

/// An element of the open cone Ω of positive definite matrices.
///
/// Construction checks strict positivity of the spectrum; semidefinite
/// inputs are rejected rather than perturbed.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeElement {
    x: SymElement,
}

impl ConeElement {
    pub fn try_new(x: SymElement) -> Result<Self> {
        let eig = x.matrix().clone().symmetric_eigenvalues();
        let min = eig.min();
        let max = eig.max();
        if min <= SPD_EIG_TOLERANCE * 1.0_f64.max(max) {
            return Err(Error::NotPositiveDefinite(format!(
                "min eigenvalue {min:.3e}, max eigenvalue {max:.3e}"
            )));
        }
        Ok(ConeElement { x })
    }

    /// Wraps an element that lies in the cone by construction
    /// (e.g. L·Lᵀ with invertible L).
    pub(crate) fn new_unchecked(x: SymElement) -> Self {
        ConeElement { x }
    }

    pub fn identity(r: usize) -> Self {
        ConeElement {
            x: SymElement::identity(r),
        }
    }

    pub fn as_sym(&self) -> &SymElement {
        &self.x
    }

    pub fn into_sym(self) -> SymElement {
        self.x
    }

    /// Lower Cholesky factor T with positive diagonal, x = T·Tᵀ.
    pub fn cholesky_factor(&self) -> DMatrix<f64> {
        self.x
            .matrix()
            .clone()
            .cholesky()
            .expect("cone element must admit a Cholesky factorization")
            .l()
    }

    /// Matrix inverse; stays in the cone.
    pub fn inverse(&self) -> ConeElement {
        let inv = self
            .x
            .matrix()
            .clone()
            .cholesky()
            .expect("cone element must admit a Cholesky factorization")
            .inverse();
        ConeElement {
            x: SymElement::symmetrize(inv),
        }
    }

    /// Unique positive definite square root, via the symmetric
    /// eigendecomposition.
    pub fn sym_sqrt(&self) -> ConeElement {
        let eig = self.x.matrix().clone().symmetric_eigen();
        let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let m =
            &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
        ConeElement {
            x: SymElement::symmetrize(m),
        }
    }
}

impl std::ops::Deref for ConeElement {
    type Target = SymElement;
    fn deref(&self) -> &SymElement {
        &self.x
    }
}
