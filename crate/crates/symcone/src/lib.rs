//! Numerical laboratory for the symmetric cone of positive definite
//! matrices: the Jordan-algebra machinery (multiplication and quadratic
//! representations, Peirce decompositions, triangular group), generalized
//! power functions, Riesz and beta-Riesz distributions with exact samplers,
//! and Monte Carlo instruments for testing the independence properties that
//! distinguish the Cholesky division algorithm from the quadratic one.

pub mod element;
pub mod endo;
pub mod error;
pub mod jordan;
pub mod mclab;
pub mod power;
pub mod riesz;
pub mod rng;
pub mod stats;
pub mod triangular;
pub mod verify;

pub use element::{inner, ConeElement, SymElement};
pub use endo::EndoE;
pub use error::{Error, Result};
pub use jordan::{
    box_op, jordan_product, lmap, peirce_decompose, peirce_wrt_idempotent, quad_rep, JordanFrame,
    PeirceComponents,
};
pub use mclab::{
    distance_correlation, permutation_pvalue, run_contrast, run_independence_experiment,
    ExperimentConfig, IndependenceResult,
};
pub use power::{
    gen_power, log_gen_power, padded_block_inverse, peirce_reweight_operator, principal_minor,
    proj_pk, PowerParam,
};
pub use riesz::{log_beta_omega, log_gamma_omega, BetaRieszParams, RieszParams};
pub use triangular::{
    chart_derivative_at_e, cholesky_div, eplus_jacobian, frobenius_tau, quadratic_div,
    tau_adjoint_peirce, triangular_from_eplus, DivisionAlgorithm, DivisionOperator, EPlusPoint,
    TriangularTransform,
};
pub use verify::{run_suite, CheckReport, DifferenceEqSolution, SumEqSolution, VerifyConfig};
