//! Residual verification of the functional-equation solution families and
//! the differential identities behind them. Every check draws seeded random
//! instances, measures the worst absolute residual, and reports it against
//! a fixed tolerance: exact-algebra identities at 1e-10…1e-12, finite
//! difference probes at 1e-5…1e-6 (truncation error dominates there).

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::element::{inner, ConeElement, SymElement};
use crate::error::Result;
use crate::jordan::{jp, peirce_wrt_idempotent, quad_rep, JordanFrame};
use crate::power::{
    log_gen_power, padded_block_inverse, padded_block_inverse_sym, peirce_reweight_operator,
    principal_minor, PowerParam,
};
use crate::riesz::BetaRieszParams;
use crate::rng::stream_rng;
use crate::triangular::{
    chart_derivative_at_e, frobenius_tau_idem, triangular_from_eplus, EPlusPoint,
    TriangularTransform,
};

pub const TOL_FUNCEQ: f64 = 1e-9;
pub const TOL_GRADIENT_FD: f64 = 1e-6;
pub const TOL_SECOND_FD: f64 = 1e-5;
pub const TOL_TRANSPORT: f64 = 1e-10;
pub const TOL_EXACT: f64 = 1e-12;

const FD_STEP: f64 = 1e-5;

/// Outcome of one randomized check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new(name: &str, trials: usize, max_residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.to_string(),
            trials,
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
        }
    }
}

/// Solution family of the difference equation a(x) = g(tx) − g(t(e−x)):
/// a(x) = log Δ_p(x) − log Δ_p(e−x), g(y) = log Δ_p(y) + c.
#[derive(Debug, Clone)]
pub struct DifferenceEqSolution {
    pub p: PowerParam,
    pub c: f64,
}

impl DifferenceEqSolution {
    pub fn new(p: PowerParam, c: f64) -> Self {
        DifferenceEqSolution { p, c }
    }

    fn a(&self, x: &ConeElement, e_minus_x: &ConeElement) -> f64 {
        log_gen_power(&self.p, x).unwrap() - log_gen_power(&self.p, e_minus_x).unwrap()
    }

    fn g(&self, y: &ConeElement) -> f64 {
        log_gen_power(&self.p, y).unwrap() + self.c
    }
}

/// Solution family of the sum equation a₁(x) + a₂(te) = g(tx) + g(t(e−x)):
/// g(y) = log Δ_{p′}(y) + ⟨δ, y⟩ + c₁, a₁ and a₂ as below, with the
/// constants tied by 2c₁ = c₂ + c₃ (enforced exactly at construction).
#[derive(Debug, Clone)]
pub struct SumEqSolution {
    pub p_prime: PowerParam,
    pub delta: SymElement,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl SumEqSolution {
    /// c₃ is derived as 2c₁ − c₂ so the constraint holds exactly.
    pub fn new(p_prime: PowerParam, delta: SymElement, c1: f64, c2: f64) -> Self {
        SumEqSolution {
            p_prime,
            delta,
            c1,
            c2,
            c3: 2.0 * c1 - c2,
        }
    }

    fn g(&self, y: &ConeElement) -> f64 {
        log_gen_power(&self.p_prime, y).unwrap() + inner(&self.delta, y) + self.c1
    }

    fn a1(&self, x: &ConeElement, e_minus_x: &ConeElement) -> f64 {
        log_gen_power(&self.p_prime, x).unwrap()
            + log_gen_power(&self.p_prime, e_minus_x).unwrap()
            + self.c2
    }

    fn a2(&self, y: &ConeElement) -> f64 {
        2.0 * log_gen_power(&self.p_prime, y).unwrap() + inner(&self.delta, y) + self.c3
    }
}

/// Random point of Ω ∩ (e − Ω), drawn through the quotient construction
/// with Wishart exponents (in-set by construction, no rejection step).
fn random_unit_interval_point(r: usize, rng: &mut impl Rng) -> (ConeElement, ConeElement) {
    let p = PowerParam::constant(r, r as f64);
    let params = BetaRieszParams::new(p.clone(), p).expect("constant exponent is admissible");
    let x = params.sample(rng);
    let e_minus_x = ConeElement::new_unchecked(&SymElement::identity(r) - x.as_sym());
    (x, e_minus_x)
}

/// Random triangular transform with log uᵢ ~ U(−1, 1) and vᵢⱼ ~ U(−1, 1),
/// which keeps the conditioning bounded.
fn random_triangular(r: usize, rng: &mut impl Rng) -> TriangularTransform {
    triangular_from_eplus(&random_eplus(r, rng))
}

fn random_eplus(r: usize, rng: &mut impl Rng) -> EPlusPoint {
    let diag: Vec<f64> = (0..r)
        .map(|_| rng.random_range(-1.0..1.0f64).exp())
        .collect();
    let off: Vec<f64> = (0..r * (r - 1) / 2)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    EPlusPoint::new(diag, off).expect("diagonal is positive")
}

fn random_sym(r: usize, rng: &mut impl Rng) -> SymElement {
    SymElement::symmetrize(DMatrix::from_fn(r, r, |_, _| rng.random_range(-1.0..1.0)))
}

fn random_spd(r: usize, rng: &mut impl Rng) -> ConeElement {
    random_triangular(r, rng).apply_cone(&ConeElement::identity(r))
}

fn transported_pair(
    t: &TriangularTransform,
    x: &ConeElement,
    e_minus_x: &ConeElement,
) -> (ConeElement, ConeElement) {
    (t.apply_cone(x), t.apply_cone(e_minus_x))
}

fn difference_equation_residual(
    sol: &DifferenceEqSolution,
    x: &ConeElement,
    e_minus_x: &ConeElement,
    t: &TriangularTransform,
) -> f64 {
    let (tx, tex) = transported_pair(t, x, e_minus_x);
    (sol.a(x, e_minus_x) - sol.g(&tx) + sol.g(&tex)).abs()
}

fn sum_equation_residual(
    sol: &SumEqSolution,
    x: &ConeElement,
    e_minus_x: &ConeElement,
    t: &TriangularTransform,
) -> f64 {
    let (tx, tex) = transported_pair(t, x, e_minus_x);
    let te = t.apply_cone(&ConeElement::identity(x.dim()));
    (sol.a1(x, e_minus_x) + sol.a2(&te) - sol.g(&tx) - sol.g(&tex)).abs()
}

/// Residuals of a fixed solution of the difference equation over random
/// (x, t) draws.
pub fn check_difference_equation(
    sol: &DifferenceEqSolution,
    trials: usize,
    rng: &mut impl Rng,
) -> CheckReport {
    let r = sol.p.rank();
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let (x, e_minus_x) = random_unit_interval_point(r, rng);
        let t = random_triangular(r, rng);
        worst = worst.max(difference_equation_residual(sol, &x, &e_minus_x, &t));
    }
    CheckReport::new("difference_equation_solution", trials, worst, TOL_FUNCEQ)
}

/// Residuals of a fixed solution of the sum equation over random (x, t)
/// draws.
pub fn check_sum_equation(sol: &SumEqSolution, trials: usize, rng: &mut impl Rng) -> CheckReport {
    let r = sol.p_prime.rank();
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let (x, e_minus_x) = random_unit_interval_point(r, rng);
        let t = random_triangular(r, rng);
        worst = worst.max(sum_equation_residual(sol, &x, &e_minus_x, &t));
    }
    CheckReport::new("sum_equation_solution", trials, worst, TOL_FUNCEQ)
}

/// Difference-equation family with the exponent vector redrawn every trial
/// (p ∈ U(−2,2)ʳ). With `fault` set, g is evaluated with a perturbed
/// exponent, which must produce a visible residual: the negative control.
pub fn check_difference_equation_family(
    r: usize,
    trials: usize,
    rng: &mut impl Rng,
    fault: bool,
) -> CheckReport {
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let p: Vec<f64> = (0..r).map(|_| rng.random_range(-2.0..2.0)).collect();
        let c = rng.random_range(-1.0..1.0);
        let sol = DifferenceEqSolution::new(PowerParam::new(p.clone()).unwrap(), c);
        let (x, e_minus_x) = random_unit_interval_point(r, rng);
        let t = random_triangular(r, rng);
        let res = if fault {
            let g_sol = DifferenceEqSolution::new(
                PowerParam::new(p.iter().map(|v| v + 0.01).collect()).unwrap(),
                c,
            );
            let (tx, tex) = transported_pair(&t, &x, &e_minus_x);
            (sol.a(&x, &e_minus_x) - g_sol.g(&tx) + g_sol.g(&tex)).abs()
        } else {
            difference_equation_residual(&sol, &x, &e_minus_x, &t)
        };
        worst = worst.max(res);
    }
    CheckReport::new("difference_equation_family", trials, worst, TOL_FUNCEQ)
}

/// Sum-equation family with (p′, δ, c₁, c₂) redrawn every trial.
pub fn check_sum_equation_family(r: usize, trials: usize, rng: &mut impl Rng) -> CheckReport {
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let p: Vec<f64> = (0..r).map(|_| rng.random_range(-2.0..2.0)).collect();
        let sol = SumEqSolution::new(
            PowerParam::new(p).unwrap(),
            random_sym(r, rng),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let (x, e_minus_x) = random_unit_interval_point(r, rng);
        let t = random_triangular(r, rng);
        worst = worst.max(sum_equation_residual(&sol, &x, &e_minus_x, &t));
    }
    CheckReport::new("sum_equation_family", trials, worst, TOL_FUNCEQ)
}

/// Gradient identity ∇ log Δ_k(x) = (P_k(x))⁻¹, probed by central
/// directional differences for every k.
pub fn check_log_minor_gradient(r: usize, trials: usize, rng: &mut impl Rng) -> CheckReport {
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let x = random_spd(r, rng);
        let h = {
            let h = random_sym(r, rng);
            let n = h.norm();
            h.scale(1.0 / n)
        };
        for k in 1..=r {
            let up = x.as_sym() + &h.scale(FD_STEP);
            let dn = x.as_sym() - &h.scale(FD_STEP);
            let fd = (principal_minor(k, &up).unwrap().ln()
                - principal_minor(k, &dn).unwrap().ln())
                / (2.0 * FD_STEP);
            let grad = padded_block_inverse(k, &x).unwrap();
            let exact = inner(&grad, &h);
            worst = worst.max((fd - exact).abs() / 1.0_f64.max(exact.abs()));
        }
    }
    CheckReport::new("log_minor_gradient", trials, worst, TOL_GRADIENT_FD)
}

/// Differential identity: the derivative of x ↦ (P_k(x))⁻¹ in direction h
/// is −P((P_k(x))⁻¹)(h).
pub fn check_block_inverse_differential(
    r: usize,
    trials: usize,
    rng: &mut impl Rng,
) -> CheckReport {
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let x = random_spd(r, rng);
        let h = {
            let h = random_sym(r, rng);
            let n = h.norm();
            h.scale(1.0 / n)
        };
        for k in 1..=r {
            let up = padded_block_inverse_sym(k, &(x.as_sym() + &h.scale(FD_STEP))).unwrap();
            let dn = padded_block_inverse_sym(k, &(x.as_sym() - &h.scale(FD_STEP))).unwrap();
            let fd = (&up - &dn).scale(1.0 / (2.0 * FD_STEP));
            let pbi = padded_block_inverse(k, &x).unwrap();
            let exact = quad_rep(&pbi).apply(&h).scale(-1.0);
            worst = worst.max((&fd - &exact).norm() / 1.0_f64.max(exact.norm()));
        }
    }
    CheckReport::new("block_inverse_differential", trials, worst, TOL_SECOND_FD)
}

/// Triangular transport of the block inverse: for x = t_u(e) = L·Lᵀ,
/// (P_k(x))⁻¹ = L⁻ᵀ·J_k·L⁻¹ for every k.
pub fn check_block_inverse_transport(r: usize, trials: usize, rng: &mut impl Rng) -> CheckReport {
    let frame = JordanFrame::new(r);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let t = random_triangular(r, rng);
        let x = t.apply_cone(&ConeElement::identity(r));
        let t_inv = t.inverse();
        for k in 1..=r {
            let transported = t_inv.adjoint_apply(&frame.partial_sum(k));
            let direct = padded_block_inverse(k, &x).unwrap();
            worst = worst.max(
                (&transported - &direct)
                    .matrix()
                    .iter()
                    .fold(0.0_f64, |m, v| m.max(v.abs())),
            );
        }
    }
    CheckReport::new("block_inverse_transport", trials, worst, TOL_TRANSPORT)
}

/// Peirce reweighting: the assembled operator multiplies entry (i, j) by
/// q_max(i,j).
pub fn check_peirce_reweighting(r: usize, trials: usize, rng: &mut impl Rng) -> CheckReport {
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let q: Vec<f64> = (0..r).map(|_| rng.random_range(-2.0..2.0)).collect();
        let op = peirce_reweight_operator(&q);
        let x = random_sym(r, rng);
        let y = op.apply(&x);
        for i in 0..r {
            for j in 0..r {
                worst = worst.max((y.entry(i, j) - q[i.max(j)] * x.entry(i, j)).abs());
            }
        }
    }
    CheckReport::new("peirce_reweighting", trials, worst, TOL_EXACT)
}

/// Closed form of the chart derivative at the unit point against central
/// finite differences of u ↦ t_u.
pub fn check_chart_derivative_at_e(r: usize, trials: usize, rng: &mut impl Rng) -> CheckReport {
    let mut worst = 0.0_f64;
    let e = SymElement::identity(r);
    for _ in 0..trials {
        let h = {
            let h = random_sym(r, rng);
            let n = h.norm();
            h.scale(1.0 / n)
        };
        let closed = chart_derivative_at_e(&h);
        let endo_at = |sign: f64| {
            let point = &e + &h.scale(sign * FD_STEP);
            triangular_from_eplus(&EPlusPoint::from_element(&point).unwrap()).to_endo()
        };
        let fd = (&endo_at(1.0) - &endo_at(-1.0)).scale(1.0 / (2.0 * FD_STEP));
        worst = worst.max((&fd - &closed).norm());
    }
    CheckReport::new("chart_derivative_at_e", trials, worst, TOL_GRADIENT_FD)
}

/// Adjoint Frobenius action: operator transpose against the closed Peirce
/// form, for random idempotents c = c₁+…+c_k and z ∈ E(c, ½).
pub fn check_adjoint_frobenius_dual_path(
    r: usize,
    trials: usize,
    rng: &mut impl Rng,
) -> CheckReport {
    let frame = JordanFrame::new(r);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        if r < 2 {
            break;
        }
        let k = rng.random_range(1..r);
        let c = frame.partial_sum(k);
        // z supported on the off-block entries (i, j), i < k <= j
        let mut zm = DMatrix::zeros(r, r);
        for i in 0..k {
            for j in k..r {
                let v = rng.random_range(-1.0..1.0);
                zm[(i, j)] = v;
                zm[(j, i)] = v;
            }
        }
        let z = SymElement::from_symmetric(zm);
        let x = random_sym(r, rng);

        let by_operator = frobenius_tau_idem(&c, &z).unwrap().adjoint().apply(&x);
        let (x1, xh, x0) = peirce_wrt_idempotent(&x, &c).unwrap();
        let zx0 = jp(&z, &x0);
        let y1 = &jp(&c, &(&jp(&z, &zx0) + &jp(&z, &xh))).scale(2.0) + &x1;
        let by_peirce = &(&y1 + &(&zx0.scale(2.0) + &xh)) + &x0;
        worst = worst.max((&by_operator - &by_peirce).norm());
    }
    CheckReport::new("adjoint_frobenius_dual_path", trials, worst, TOL_EXACT)
}

/// Homogeneity of the principal minors under the triangular action:
/// Δ_k(t_u(x)) = Δ_k(t_u(e))·Δ_k(x), in log space.
pub fn check_minor_homogeneity(r: usize, trials: usize, rng: &mut impl Rng) -> CheckReport {
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let t = random_triangular(r, rng);
        let x = random_spd(r, rng);
        let tx = t.apply_cone(&x);
        let te = t.apply_cone(&ConeElement::identity(r));
        for k in 1..=r {
            let lhs = principal_minor(k, &tx).unwrap().ln();
            let rhs = principal_minor(k, &te).unwrap().ln() + principal_minor(k, &x).unwrap().ln();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    CheckReport::new("minor_homogeneity", trials, worst, TOL_TRANSPORT)
}

/// Configuration of the full verification run.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    /// Negative control: corrupt one solution family so the suite must
    /// report a failure.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            r: 3,
            trials: 1000,
            seed: 0,
            inject_fault: false,
        }
    }
}

/// Runs every check with its own deterministic stream; the suite passing
/// constitutes the machine verification of the identities above.
pub fn run_suite(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    if cfg.r == 0 {
        return Err(crate::error::Error::InvalidParameter(
            "rank must be positive".into(),
        ));
    }
    if cfg.trials == 0 {
        return Err(crate::error::Error::InvalidParameter(
            "trials must be positive".into(),
        ));
    }
    let (r, n) = (cfg.r, cfg.trials);
    let s = cfg.seed;
    Ok(vec![
        check_difference_equation_family(r, n, &mut stream_rng(s, 101), cfg.inject_fault),
        check_sum_equation_family(r, n, &mut stream_rng(s, 102)),
        check_log_minor_gradient(r, n, &mut stream_rng(s, 103)),
        check_block_inverse_differential(r, n, &mut stream_rng(s, 104)),
        check_block_inverse_transport(r, n, &mut stream_rng(s, 105)),
        check_peirce_reweighting(r, n, &mut stream_rng(s, 106)),
        check_chart_derivative_at_e(r, n, &mut stream_rng(s, 107)),
        check_adjoint_frobenius_dual_path(r, n, &mut stream_rng(s, 108)),
        check_minor_homogeneity(r, n, &mut stream_rng(s, 109)),
    ])
}
