//! Cross-module invariants of the cone machinery: the defining law of the
//! division algorithms over many random draws, the chart bijection, and
//! the directional outcome of the division-algorithm contrast at rank 3.

use nalgebra::DMatrix;
use rand::Rng;

use symcone::element::{ConeElement, SymElement};
use symcone::mclab::{run_contrast, ExperimentConfig};
use symcone::power::PowerParam;
use symcone::riesz::RieszParams;
use symcone::rng::stream_rng;
use symcone::triangular::{
    eplus_from_cone, triangular_from_eplus, DivisionAlgorithm, EPlusPoint, TriangularTransform,
};

fn random_spd(r: usize, rng: &mut impl Rng) -> ConeElement {
    let diag: Vec<f64> = (0..r)
        .map(|_| rng.random_range(-1.0..1.0f64).exp())
        .collect();
    let off: Vec<f64> = (0..r * (r - 1) / 2)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    triangular_from_eplus(&EPlusPoint::new(diag, off).unwrap())
        .apply_cone(&ConeElement::identity(r))
}

#[test]
fn division_law_over_many_draws() {
    for r in [2usize, 3, 5] {
        let mut rng = stream_rng(2001, r as u64);
        let e = SymElement::identity(r);
        for _ in 0..1000 {
            let y = random_spd(r, &mut rng);
            for alg in [DivisionAlgorithm::Cholesky, DivisionAlgorithm::Quadratic] {
                let res = (&alg.operator(&y).apply(y.as_sym()) - &e).norm() / y.norm().max(1.0);
                assert!(res < 1e-10, "rank {r} {alg}: residual {res}");
            }
        }
    }
}

#[test]
fn chart_bijection_round_trip() {
    let e = SymElement::identity(4);
    let mut rng = stream_rng(2002, 0);
    for _ in 0..1000 {
        let x = random_spd(4, &mut rng);
        let u = eplus_from_cone(&x);
        let back = triangular_from_eplus(&u).apply(&e);
        let rel = (&back - x.as_sym()).norm() / x.norm();
        assert!(rel < 1e-10, "round trip error {rel}");
        // the triangular representative with t(e) = x is unique: the factor
        // must be the Cholesky factor
        let t = TriangularTransform::from_cone(&x);
        assert!((t.factor() - triangular_from_eplus(&u).factor()).norm() < 1e-12);
    }
}

#[test]
fn sampled_matrices_lie_in_the_cone() {
    let s = PowerParam::new(vec![1.0, 2.0, 3.5]).unwrap();
    let mut rng = stream_rng(2003, 0);
    let sigma = random_spd(3, &mut rng);
    let params = RieszParams::new(s, sigma).unwrap();
    for _ in 0..500 {
        let x = params.sample(&mut rng);
        assert!(x.matrix().clone().cholesky().is_some());
    }
}

#[test]
fn contrast_direction_holds_at_rank_three() {
    let cfg = ExperimentConfig {
        s: PowerParam::new(vec![1.0, 2.5, 4.0]).unwrap(),
        s_prime: PowerParam::new(vec![1.5, 3.0, 4.5]).unwrap(),
        sigma: ConeElement::identity(3),
        n_samples: 30_000,
        seed: 0,
        algorithm: DivisionAlgorithm::Cholesky,
        n_permutations: 399,
        dcor_subsample: 2000,
    };
    let (chol, quad) = run_contrast(&cfg).unwrap();
    assert!(
        chol.permutation_p_value > 0.01,
        "p = {}",
        chol.permutation_p_value
    );
    assert!(
        quad.permutation_p_value < 0.01,
        "p = {}",
        quad.permutation_p_value
    );
}

#[test]
fn riesz_log_density_is_finite_on_interior_grid() {
    // no NaN or infinities on a compact grid inside the cone
    let s = PowerParam::new(vec![0.8, 1.4]).unwrap();
    let params = RieszParams::new(s, ConeElement::identity(2)).unwrap();
    for a in 1..20 {
        for b in 1..20 {
            for c in -9..=9 {
                let (x11, x22) = (a as f64 * 0.25, b as f64 * 0.25);
                let x12 = c as f64 / 10.0 * (x11 * x22).sqrt();
                let x =
                    SymElement::new(DMatrix::from_row_slice(2, 2, &[x11, x12, x12, x22])).unwrap();
                let v = params.log_density(&x);
                assert!(
                    v.is_finite(),
                    "non-finite log density at ({x11},{x22},{x12})"
                );
            }
        }
    }
}
