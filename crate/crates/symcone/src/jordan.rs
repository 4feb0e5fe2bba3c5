//! The Jordan algebra structure on symmetric matrices: the product
//! x∘y = (x·y + y·x)/2, its multiplication operator L(x), the quadratic
//! representation P(x) = 2L(x)² − L(x²), the box operator
//! x□y = L(x∘y) + [L(x), L(y)], and Peirce decompositions.

use std::collections::BTreeMap;

use crate::element::{ConeElement, SymElement};
use crate::endo::EndoE;
use crate::error::{Error, Result};

/// Tolerance for the idempotency check ‖c∘c − c‖.
pub const IDEMPOTENT_TOLERANCE: f64 = 1e-12;

/// Jordan product (x·y + y·x)/2.
pub fn jordan_product(x: &SymElement, y: &SymElement) -> Result<SymElement> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(jp(x, y))
}

/// Jordan product for internal callers with matching dimensions.
pub(crate) fn jp(x: &SymElement, y: &SymElement) -> SymElement {
    let m = (x.matrix() * y.matrix() + y.matrix() * x.matrix()) * 0.5;
    // with symmetric inputs the sum above is exactly symmetric
    SymElement::symmetrize(m)
}

/// Multiplication operator L(x): y ↦ x∘y. Self-adjoint in the trace form.
pub fn lmap(x: &SymElement) -> EndoE {
    EndoE::from_action(x.dim(), |y| jp(x, y))
}

/// Quadratic representation P(x) = 2L(x)² − L(x²). Its action coincides
/// with h ↦ x·h·x.
pub fn quad_rep(x: &SymElement) -> EndoE {
    let l = lmap(x);
    let lsq = lmap(&jp(x, x));
    &l.compose(&l).scale(2.0) - &lsq
}

/// Box operator x□y = L(x∘y) + L(x)L(y) − L(y)L(x).
pub fn box_op(x: &SymElement, y: &SymElement) -> EndoE {
    assert_eq!(x.dim(), y.dim(), "dimension mismatch");
    let lx = lmap(x);
    let ly = lmap(y);
    &(&lmap(&jp(x, y)) + &lx.compose(&ly)) - &ly.compose(&lx)
}

/// The standard Jordan frame c_i = e_ii of diagonal matrix units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JordanFrame {
    r: usize,
}

impl JordanFrame {
    pub fn new(r: usize) -> Self {
        assert!(r >= 1, "rank must be positive");
        JordanFrame { r }
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// The i-th primitive idempotent c_i (0-based).
    pub fn idempotent(&self, i: usize) -> SymElement {
        assert!(i < self.r, "frame index out of range");
        SymElement::frame_unit(self.r, i)
    }

    /// Partial sum c_1 + … + c_k for k in 1..=r, the unit of the leading
    /// k×k subalgebra.
    pub fn partial_sum(&self, k: usize) -> SymElement {
        assert!(k >= 1 && k <= self.r, "partial sum index out of range");
        let mut d = vec![0.0; self.r];
        d[..k].fill(1.0);
        SymElement::from_diagonal(&d)
    }
}

/// Components of an element in the Peirce grading with respect to the
/// standard frame: x = Σ xᵢcᵢ + Σ_{i<j} xᵢⱼ.
#[derive(Debug, Clone)]
pub struct PeirceComponents {
    r: usize,
    /// Coefficients of the frame idempotents (the diagonal entries).
    pub diag: Vec<f64>,
    /// Off-diagonal components keyed by (i, j), i < j; only nonzero ones are
    /// stored. Each value is supported on the entries (i, j) and (j, i).
    pub off: BTreeMap<(usize, usize), SymElement>,
}

impl PeirceComponents {
    pub fn reassemble(&self) -> SymElement {
        let mut x = SymElement::from_diagonal(&self.diag);
        for comp in self.off.values() {
            x = &x + comp;
        }
        debug_assert_eq!(x.dim(), self.r);
        x
    }
}

/// Splits x into its Peirce components with respect to the standard frame.
pub fn peirce_decompose(x: &SymElement) -> PeirceComponents {
    let r = x.dim();
    let diag = (0..r).map(|i| x.entry(i, i)).collect();
    let mut off = BTreeMap::new();
    for i in 0..r {
        for j in (i + 1)..r {
            let v = x.entry(i, j);
            if v != 0.0 {
                off.insert((i, j), SymElement::sym_unit(r, i, j).scale(v));
            }
        }
    }
    PeirceComponents { r, diag, off }
}

/// Peirce decomposition of x with respect to an arbitrary idempotent c:
/// the components (x₁, x_½, x₀) in the eigenspaces of L(c) for the
/// eigenvalues 1, ½, 0.
///
/// The spectral projectors are the quadratic interpolation polynomials in
/// L(c) through the known spectrum {0, ½, 1}, which is exact.
pub fn peirce_wrt_idempotent(
    x: &SymElement,
    c: &SymElement,
) -> Result<(SymElement, SymElement, SymElement)> {
    require_idempotent(c)?;
    if x.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: x.dim(),
        });
    }
    let cx = jp(c, x);
    let ccx = jp(c, &cx);
    // eigenprojections: p₁(λ) = 2λ² − λ, p_½(λ) = 4λ − 4λ²
    let x1 = &ccx.scale(2.0) - &cx;
    let xh = &cx.scale(4.0) - &ccx.scale(4.0);
    let x0 = &(x - &x1) - &xh;
    Ok((x1, xh, x0))
}

pub(crate) fn require_idempotent(c: &SymElement) -> Result<()> {
    let deviation = (&jp(c, c) - c).norm();
    if deviation > IDEMPOTENT_TOLERANCE {
        return Err(Error::NotIdempotent { deviation });
    }
    Ok(())
}

/// Checks that z lies in the half eigenspace E(c, ½), up to `tol` leakage
/// into the 0- and 1-eigenspaces.
pub(crate) fn require_half_space(z: &SymElement, c: &SymElement, tol: f64) -> Result<()> {
    let (z1, _, z0) = peirce_wrt_idempotent(z, c)?;
    let leak = z1.norm().max(z0.norm());
    if leak > tol * 1.0_f64.max(z.norm()) {
        return Err(Error::NotInHalfSpace(leak));
    }
    Ok(())
}

/// Jordan-algebra-level inverse; delegates to the cone element.
pub fn inverse(x: &ConeElement) -> ConeElement {
    x.inverse()
}

/// Positive definite square root; delegates to the cone element.
pub fn sym_sqrt(x: &ConeElement) -> ConeElement {
    x.sym_sqrt()
}
