//! The triangular group acting on the cone, its Frobenius generators, the
//! E₊ coordinate chart with its Jacobian, and the two division algorithms
//! (Cholesky and quadratic-representation).
//!
//! A triangular transform acts as x ↦ L·x·Lᵀ with L lower triangular and
//! positive diagonal; the group acts simply transitively on the cone, which
//! is what makes b ↦ t⁻¹ (for the unique t with t(e) = b) a division
//! algorithm.

use nalgebra::{DMatrix, DVector};

use crate::element::{sym_dim, ConeElement, SymElement};
use crate::endo::EndoE;
use crate::error::{Error, Result};
use crate::jordan::{
    box_op, jp, peirce_decompose, peirce_wrt_idempotent, quad_rep, require_half_space,
    require_idempotent, JordanFrame,
};

/// Element of the triangular group: x ↦ L·x·Lᵀ, L lower triangular with
/// strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularTransform {
    l: DMatrix<f64>,
}

impl TriangularTransform {
    /// Validates that `l` is lower triangular (strict upper part exactly
    /// zero) with positive diagonal.
    pub fn new(l: DMatrix<f64>) -> Result<Self> {
        if l.nrows() != l.ncols() {
            return Err(Error::DimensionMismatch {
                expected: l.nrows(),
                got: l.ncols(),
            });
        }
        for i in 0..l.nrows() {
            let d = l[(i, i)];
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "triangular factor diagonal entry L[{i},{i}] = {d} is not positive"
                )));
            }
            for j in (i + 1)..l.ncols() {
                if l[(i, j)] != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "triangular factor has nonzero upper entry L[{i},{j}] = {}",
                        l[(i, j)]
                    )));
                }
            }
        }
        Ok(TriangularTransform { l })
    }

    pub(crate) fn from_lower_unchecked(l: DMatrix<f64>) -> Self {
        TriangularTransform { l }
    }

    pub fn identity(r: usize) -> Self {
        TriangularTransform {
            l: DMatrix::identity(r, r),
        }
    }

    /// The unique triangular transform with t(e) = y, from the Cholesky
    /// factorization of y.
    pub fn from_cone(y: &ConeElement) -> Self {
        TriangularTransform {
            l: y.cholesky_factor(),
        }
    }

    pub fn rank(&self) -> usize {
        self.l.nrows()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// t(x) = L·x·Lᵀ.
    pub fn apply(&self, x: &SymElement) -> SymElement {
        assert_eq!(x.dim(), self.rank(), "dimension mismatch");
        SymElement::symmetrize(&self.l * x.matrix() * self.l.transpose())
    }

    /// t(x) for x in the cone; the image stays in the cone.
    pub fn apply_cone(&self, x: &ConeElement) -> ConeElement {
        ConeElement::new_unchecked(self.apply(x.as_sym()))
    }

    /// Adjoint action t*(x) = Lᵀ·x·L (with respect to the trace form).
    pub fn adjoint_apply(&self, x: &SymElement) -> SymElement {
        assert_eq!(x.dim(), self.rank(), "dimension mismatch");
        SymElement::symmetrize(self.l.transpose() * x.matrix() * &self.l)
    }

    /// Group inverse; the factor of t⁻¹ is L⁻¹.
    pub fn inverse(&self) -> TriangularTransform {
        let r = self.rank();
        let inv = self
            .l
            .solve_lower_triangular(&DMatrix::identity(r, r))
            .expect("triangular factor has positive diagonal");
        TriangularTransform { l: inv }
    }

    pub fn to_endo(&self) -> EndoE {
        EndoE::from_action(self.rank(), |x| self.apply(x))
    }
}

/// Point of the E₊ chart: u = Σ uᵢcᵢ + Σ_{i<j} uᵢⱼ with uᵢ > 0. The
/// off-diagonal coordinates are stored as the raw matrix entries vᵢⱼ (not
/// the √2-scaled basis coordinates); the Jacobian formula below is stated
/// in these coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EPlusPoint {
    diag: Vec<f64>,
    /// Entries v_ij for i < j in row-major order.
    off: Vec<f64>,
}

impl EPlusPoint {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        let r = diag.len();
        if r == 0 {
            return Err(Error::InvalidParameter("rank must be positive".into()));
        }
        if off.len() != r * (r - 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: r * (r - 1) / 2,
                got: off.len(),
            });
        }
        for (i, &u) in diag.iter().enumerate() {
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "u[{}] = {} must be positive",
                    i + 1,
                    u
                )));
            }
        }
        if off.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("off entries must be finite".into()));
        }
        Ok(EPlusPoint { diag, off })
    }

    /// The chart point of the unit element (uᵢ = 1, v = 0).
    pub fn identity(r: usize) -> Self {
        EPlusPoint {
            diag: vec![1.0; r],
            off: vec![0.0; r * (r - 1) / 2],
        }
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_entries(&self) -> &[f64] {
        &self.off
    }

    fn off_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.rank());
        let r = self.rank();
        // entries before row i, plus the offset within row i
        i * r - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Off-diagonal entry v_ij, i < j.
    pub fn off(&self, i: usize, j: usize) -> f64 {
        self.off[self.off_index(i, j)]
    }

    /// The element Σ uᵢcᵢ + Σ uᵢⱼ of the algebra.
    pub fn to_element(&self) -> SymElement {
        let r = self.rank();
        let mut m = DMatrix::zeros(r, r);
        for i in 0..r {
            m[(i, i)] = self.diag[i];
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let v = self.off(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymElement::from_symmetric(m)
    }

    /// Reads a chart point off an element with positive diagonal.
    pub fn from_element(x: &SymElement) -> Result<Self> {
        let r = x.dim();
        let diag: Vec<f64> = (0..r).map(|i| x.entry(i, i)).collect();
        let mut off = Vec::with_capacity(r * (r - 1) / 2);
        for i in 0..r {
            for j in (i + 1)..r {
                off.push(x.entry(i, j));
            }
        }
        EPlusPoint::new(diag, off)
    }

    /// Chart coordinates as a vector of length n: diagonal entries first,
    /// then the raw off-diagonal entries in row-major order.
    pub fn coords(&self) -> DVector<f64> {
        let mut v = DVector::zeros(sym_dim(self.rank()));
        for (i, &u) in self.diag.iter().enumerate() {
            v[i] = u;
        }
        for (k, &w) in self.off.iter().enumerate() {
            v[self.rank() + k] = w;
        }
        v
    }

    pub fn from_coords(r: usize, v: &DVector<f64>) -> Result<Self> {
        if v.len() != sym_dim(r) {
            return Err(Error::DimensionMismatch {
                expected: sym_dim(r),
                got: v.len(),
            });
        }
        EPlusPoint::new(v.as_slice()[..r].to_vec(), v.as_slice()[r..].to_vec())
    }
}

/// The triangular transform t_u of a chart point: its factor has diagonal
/// L_ii = u_i and strictly lower entries L_ji = v_ij (j > i).
///
/// [`eplus_frobenius_endo`] assembles the same operator independently as a
/// product of Frobenius transforms; the two routes are compared in tests.
pub fn triangular_from_eplus(u: &EPlusPoint) -> TriangularTransform {
    let r = u.rank();
    let mut l = DMatrix::zeros(r, r);
    for i in 0..r {
        l[(i, i)] = u.diag()[i];
        for j in (i + 1)..r {
            l[(j, i)] = u.off(i, j);
        }
    }
    TriangularTransform::from_lower_unchecked(l)
}

/// The chart point of a cone element under the bijection u ↦ t_u(e): read
/// off the Cholesky factor of y.
pub fn eplus_from_cone(y: &ConeElement) -> EPlusPoint {
    let l = y.cholesky_factor();
    let r = y.dim();
    let diag: Vec<f64> = (0..r).map(|i| l[(i, i)]).collect();
    let mut off = Vec::with_capacity(r * (r - 1) / 2);
    for i in 0..r {
        for j in (i + 1)..r {
            off.push(l[(j, i)]);
        }
    }
    EPlusPoint::new(diag, off).expect("Cholesky diagonal is positive")
}

/// Proportion of ‖N³‖ allowed relative to ‖N‖³ when asserting nilpotency of
/// the Frobenius generator.
const NILPOTENCY_TOLERANCE: f64 = 1e-12;

fn frobenius_from_box(n: EndoE) -> EndoE {
    // exp(N) for a nilpotent N of order 3 is exactly I + N + N²/2
    let n2 = n.compose(&n);
    let n3 = n2.compose(&n);
    let scale = 1.0_f64.max(n.norm().powi(3));
    assert!(
        n3.norm() <= NILPOTENCY_TOLERANCE * scale,
        "Frobenius generator is not nilpotent: |N^3| = {:.3e}",
        n3.norm()
    );
    &(&EndoE::identity(n.rank()) + &n) + &n2.scale(0.5)
}

/// Frobenius transformation τ_{c_j}(z) = exp(2 z□c_j) for the j-th standard
/// frame idempotent (0-based j) and z supported on the entries (j, k),
/// (k, j) with k > j.
///
/// The exponential is the exact three-term series of the nilpotent
/// generator.
pub fn frobenius_tau(j: usize, z: &SymElement) -> Result<EndoE> {
    let r = z.dim();
    if j >= r {
        return Err(Error::BlockIndexOutOfRange { k: j + 1, r });
    }
    let tol = 1e-12 * 1.0_f64.max(z.norm());
    for a in 0..r {
        for b in a..r {
            let in_support = a == j && b > j;
            if !in_support && z.entry(a, b).abs() > tol {
                return Err(Error::NotInHalfSpace(z.entry(a, b).abs()));
            }
        }
    }
    let c = SymElement::frame_unit(r, j);
    Ok(frobenius_from_box(box_op(z, &c).scale(2.0)))
}

/// Frobenius transformation τ_c(z) = exp(2 z□c) for an arbitrary idempotent
/// c and z in the half eigenspace E(c, ½).
pub fn frobenius_tau_idem(c: &SymElement, z: &SymElement) -> Result<EndoE> {
    require_idempotent(c)?;
    require_half_space(z, c, 1e-12)?;
    Ok(frobenius_from_box(box_op(z, c).scale(2.0)))
}

/// Adjoint Frobenius action τ_c(z)*(x), computed two ways: through the
/// transpose of the operator matrix, and through the closed Peirce form
///
///   y₁ = 2c∘[z∘(z∘x₀) + z∘x_½] + x₁,  y_½ = 2 z∘x₀ + x_½,  y₀ = x₀.
///
/// The two routes are asserted to agree; the operator route is returned.
pub fn tau_adjoint_peirce(c: &SymElement, z: &SymElement, x: &SymElement) -> Result<SymElement> {
    let tau = frobenius_tau_idem(c, z)?;
    if x.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: x.dim(),
        });
    }
    let by_operator = tau.adjoint().apply(x);

    let (x1, xh, x0) = peirce_wrt_idempotent(x, c)?;
    let zx0 = jp(z, &x0);
    let y1 = &jp(c, &(&jp(z, &zx0) + &jp(z, &xh))).scale(2.0) + &x1;
    let yh = &zx0.scale(2.0) + &xh;
    let by_peirce = &(&y1 + &yh) + &x0;

    let diff = (&by_operator - &by_peirce).norm();
    let scale = 1.0_f64.max(x.norm()) * 1.0_f64.max(z.norm()).powi(2);
    assert!(
        diff <= 1e-12 * scale,
        "adjoint Frobenius routes disagree by {diff:.3e}"
    );
    Ok(by_operator)
}

/// The operator t_u assembled as the product
/// τ_{c₁}(z⁽¹⁾)···τ_{c_{r−1}}(z^{(r−1)})·P(Σ uᵢcᵢ) with z_ij = u_ij/u_i.
///
/// Independent of [`triangular_from_eplus`]; serves as its cross-check.
pub fn eplus_frobenius_endo(u: &EPlusPoint) -> EndoE {
    let r = u.rank();
    let mut op = quad_rep(&SymElement::from_diagonal(u.diag()));
    for j in (0..r.saturating_sub(1)).rev() {
        let mut m = DMatrix::zeros(r, r);
        for k in (j + 1)..r {
            let zjk = u.off(j, k) / u.diag()[j];
            m[(j, k)] = zjk;
            m[(k, j)] = zjk;
        }
        let z = SymElement::from_symmetric(m);
        let tau = frobenius_tau(j, &z).expect("z is supported on row j beyond the diagonal");
        op = tau.compose(&op);
    }
    op
}

/// Jacobian determinant of the chart map u ↦ t_u(e) in the coordinates of
/// [`EPlusPoint::coords`] against raw matrix entries: 2ʳ Π uᵢ^{1+(r−i)}.
pub fn eplus_jacobian(u: &EPlusPoint) -> f64 {
    let r = u.rank();
    let mut jac = (2.0_f64).powi(r as i32);
    for (i, &ui) in u.diag().iter().enumerate() {
        jac *= ui.powi(1 + (r - 1 - i) as i32);
    }
    jac
}

/// Derivative at the unit chart point of u ↦ t_u, as an operator-valued
/// linear map evaluated in the direction h:
///
///   2·[Σ_j h⁽ʲ⁾□c_j + L(h̄)]
///
/// with h̄ the diagonal part of h and h⁽ʲ⁾ the strict off-diagonal part of
/// row j to the right of the diagonal.
pub fn chart_derivative_at_e(h: &SymElement) -> EndoE {
    let r = h.dim();
    let frame = JordanFrame::new(r);
    let pc = peirce_decompose(h);
    let mut op = crate::jordan::lmap(&SymElement::from_diagonal(&pc.diag));
    for j in 0..r.saturating_sub(1) {
        let mut row = SymElement::zeros(r);
        for k in (j + 1)..r {
            if let Some(comp) = pc.off.get(&(j, k)) {
                row = &row + comp;
            }
        }
        if row.norm() > 0.0 {
            op = &op + &box_op(&row, &frame.idempotent(j));
        }
    }
    op.scale(2.0)
}

/// A division operator g(y): the congruence x ↦ F·x·Fᵀ with g(y)(y) = e.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisionOperator {
    factor: DMatrix<f64>,
}

impl DivisionOperator {
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn rank(&self) -> usize {
        self.factor.nrows()
    }

    pub fn apply(&self, x: &SymElement) -> SymElement {
        assert_eq!(x.dim(), self.rank(), "dimension mismatch");
        SymElement::symmetrize(&self.factor * x.matrix() * self.factor.transpose())
    }

    pub fn to_endo(&self) -> EndoE {
        EndoE::from_action(self.rank(), |x| self.apply(x))
    }
}

/// Cholesky division: g(y) = t⁻¹ for the unique triangular t with t(e) = y,
/// i.e. x ↦ T⁻¹·x·T⁻ᵀ where y = T·Tᵀ.
pub fn cholesky_div(y: &ConeElement) -> DivisionOperator {
    DivisionOperator {
        factor: TriangularTransform::from_cone(y).inverse().l,
    }
}

/// Quadratic-representation division: g(y) = P(y^{−½}), i.e.
/// x ↦ y^{−½}·x·y^{−½}.
pub fn quadratic_div(y: &ConeElement) -> DivisionOperator {
    DivisionOperator {
        factor: y.inverse().sym_sqrt().matrix().clone(),
    }
}

/// Choice of division algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisionAlgorithm {
    Cholesky,
    Quadratic,
}

impl DivisionAlgorithm {
    pub fn operator(self, y: &ConeElement) -> DivisionOperator {
        match self {
            DivisionAlgorithm::Cholesky => cholesky_div(y),
            DivisionAlgorithm::Quadratic => quadratic_div(y),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DivisionAlgorithm::Cholesky => "cholesky",
            DivisionAlgorithm::Quadratic => "quadratic",
        }
    }
}

impl std::str::FromStr for DivisionAlgorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cholesky" => Ok(DivisionAlgorithm::Cholesky),
            "quadratic" => Ok(DivisionAlgorithm::Quadratic),
            other => Err(Error::InvalidParameter(format!(
                "unknown division algorithm '{other}' (expected cholesky or quadratic)"
            ))),
        }
    }
}

impl std::fmt::Display for DivisionAlgorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
