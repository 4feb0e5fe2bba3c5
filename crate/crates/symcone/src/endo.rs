//! Linear operators on the symmetric matrix space, stored as dense n×n
//! matrices (n = r(r+1)/2) in the fixed orthonormal basis.

use nalgebra::DMatrix;

use crate::element::{basis_pairs, sym_dim, SymElement};

/// Endomorphism of the space of symmetric r×r matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct EndoE {
    r: usize,
    m: DMatrix<f64>,
}

impl EndoE {
    pub fn identity(r: usize) -> Self {
        let n = sym_dim(r);
        EndoE {
            r,
            m: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(r: usize) -> Self {
        let n = sym_dim(r);
        EndoE {
            r,
            m: DMatrix::zeros(n, n),
        }
    }

    /// Assembles the operator matrix column by column from the action on the
    /// orthonormal basis elements.
    pub fn from_action(r: usize, f: impl Fn(&SymElement) -> SymElement) -> Self {
        let n = sym_dim(r);
        let pairs = basis_pairs(r);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::zeros(n, n);
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let b = if i == j {
                SymElement::frame_unit(r, i)
            } else {
                SymElement::sym_unit(r, i, j).scale(inv_sqrt2)
            };
            m.set_column(k, &f(&b).vectorize());
        }
        EndoE { r, m }
    }

    /// Rank of the underlying matrix algebra (elements are r×r).
    pub fn rank(&self) -> usize {
        self.r
    }

    /// Dimension n of the space the operator acts on.
    pub fn vec_dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn apply(&self, x: &SymElement) -> SymElement {
        assert_eq!(x.dim(), self.r, "dimension mismatch");
        SymElement::devectorize(self.r, &(&self.m * x.vectorize()))
    }

    /// Composition self ∘ other.
    pub fn compose(&self, other: &EndoE) -> EndoE {
        assert_eq!(self.r, other.r, "dimension mismatch");
        EndoE {
            r: self.r,
            m: &self.m * &other.m,
        }
    }

    /// Adjoint with respect to the trace inner product (matrix transpose in
    /// the orthonormal basis).
    pub fn adjoint(&self) -> EndoE {
        EndoE {
            r: self.r,
            m: self.m.transpose(),
        }
    }

    pub fn scale(&self, a: f64) -> EndoE {
        EndoE {
            r: self.r,
            m: &self.m * a,
        }
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }
}

impl std::ops::Add for &EndoE {
    type Output = EndoE;
    fn add(self, rhs: &EndoE) -> EndoE {
        assert_eq!(self.r, rhs.r, "dimension mismatch");
        EndoE {
            r: self.r,
            m: &self.m + &rhs.m,
        }
    }
}

impl std::ops::Sub for &EndoE {
    type Output = EndoE;
    fn sub(self, rhs: &EndoE) -> EndoE {
        assert_eq!(self.r, rhs.r, "dimension mismatch");
        EndoE {
            r: self.r,
            m: &self.m - &rhs.m,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_acts_trivially() {
        let x = SymElement::sym_unit(3, 0, 2);
        let id = EndoE::identity(3);
        assert!((&id.apply(&x) - &x).norm() < 1e-15);
    }

    #[test]
    fn from_action_matches_action() {
        // x ↦ a·x·a for a fixed symmetric a
        let a = SymElement::new(nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[1.0, 0.5, 0.5, 2.0],
        ))
        .unwrap();
        let op = EndoE::from_action(2, |h| {
            SymElement::symmetrize(a.matrix() * h.matrix() * a.matrix())
        });
        let x = SymElement::sym_unit(2, 0, 1);
        let direct = SymElement::symmetrize(a.matrix() * x.matrix() * a.matrix());
        assert!((&op.apply(&x) - &direct).norm() < 1e-13);
    }

    #[test]
    fn compose_is_matrix_product() {
        let a = EndoE::from_action(2, |h| h.scale(2.0));
        let b = EndoE::from_action(2, |h| h.scale(3.0));
        let c = a.compose(&b);
        let x = SymElement::identity(2);
        assert!((&c.apply(&x) - &x.scale(6.0)).norm() < 1e-14);
    }
}
