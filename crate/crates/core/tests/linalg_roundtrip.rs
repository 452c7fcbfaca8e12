use nalgebra::DMatrix;
use numrange_core::linalg::{
    exp_i_hermitian, geodesic_point, herm_eig, principal_log_unitary, reduce_to_generator, schatten_inf,
    schatten_norm, ComplexMatrix, HermitianMatrix,
};
use numrange_core::numrange::support_function;
use numrange_core::perturb::{perturbed_unitary, Direction, PerturbationGenerator};
use numrange_core::steering::phase_perturbation_norm;
use numrange_core::testkit::{haar_unitary, haar_unitary_from, random_probability, rng};
use numrange_core::Complex64;
use rand::Rng;

const TRIALS: u64 = 100;

fn dim_for(seed: u64) -> usize {
    2 + (seed % 7) as usize
}

fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    schatten_inf(&a.sub(b))
}

#[test]
fn exp_of_log_recovers_haar_unitaries() {
    let mut worst: f64 = 0.0;
    for seed in 0..TRIALS {
        let u = haar_unitary(dim_for(seed), seed);
        let log = principal_log_unitary(&u).unwrap();
        let back = exp_i_hermitian(&log.hermitian, 1.0).unwrap();
        worst = worst.max(dist(&back, &u));
    }
    assert!(worst <= 1e-9, "worst = {worst:e}");
}

#[test]
fn log_agrees_with_pade_exponential() {
    // nalgebra's scaling-and-squaring exponential as an independent path
    for seed in 0..TRIALS {
        let u = haar_unitary(dim_for(seed), 1000 + seed);
        let log = principal_log_unitary(&u).unwrap();
        let ih: DMatrix<Complex64> = log.hermitian.inner() * Complex64::new(0.0, 1.0);
        let back = ComplexMatrix::new(ih.exp()).unwrap();
        assert!(dist(&back, &u) <= 1e-9, "seed {seed}");
        let spectrum = herm_eig(&log.hermitian).unwrap().values;
        assert!(spectrum.iter().all(|&x| x > -std::f64::consts::PI && x <= std::f64::consts::PI));
    }
}

#[test]
fn geodesic_endpoints() {
    let mut worst: f64 = 0.0;
    for seed in 0..TRIALS {
        let mut r = rng(seed);
        let d = dim_for(seed);
        let u = haar_unitary_from(d, &mut r);
        let v = haar_unitary_from(d, &mut r);
        let start = geodesic_point(&u, &v, 0.0).unwrap().point;
        let end = geodesic_point(&u, &v, 1.0).unwrap().point;
        worst = worst.max(dist(&start, &u)).max(dist(&end, &v));
        let mid = geodesic_point(&u, &v, 0.5).unwrap().point;
        assert!(mid.residual() < 1e-10);
    }
    assert!(worst <= 1e-9, "worst = {worst:e}");
}

#[test]
fn perturbation_distance_has_closed_form() {
    let mut worst: f64 = 0.0;
    for seed in 0..TRIALS {
        let mut r = rng(seed);
        let d = dim_for(seed);
        let u = haar_unitary_from(d, &mut r);
        let dir = if r.random() { Direction::Clockwise } else { Direction::Counterclockwise };
        let g = PerturbationGenerator::new(random_probability(d, &mut r), dir).unwrap();
        let t = r.random_range(0.0..20.0);
        let uv = perturbed_unitary(&u, &g, t).unwrap();
        worst = worst.max((dist(&u, &uv) - phase_perturbation_norm(&g, t)).abs());
    }
    assert!(worst <= 1e-10, "worst = {worst:e}");
}

#[test]
fn schatten_norms_match_gram_spectrum() {
    let mut r = rng(7);
    for _ in 0..50 {
        let d = r.random_range(1..=6);
        let a = ComplexMatrix::new(DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0))
        }))
        .unwrap();
        let gram = HermitianMatrix::new(&a.adjoint() * &a).unwrap();
        let sigma: Vec<f64> = herm_eig(&gram).unwrap().values.iter().map(|&x| x.max(0.0).sqrt()).collect();
        for p in [1.0, 2.0, 3.0, 7.5] {
            let oracle = sigma.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p);
            let got = schatten_norm(&a, p).unwrap();
            assert!((got - oracle).abs() <= 1e-10 * oracle.max(1.0), "p={p}: {got} vs {oracle}");
        }
        let top = sigma.iter().copied().fold(0.0, f64::max);
        assert!((schatten_inf(&a) - top).abs() <= 1e-10 * top.max(1.0));
        let p64 = schatten_norm(&a, 64.0).unwrap();
        assert!(p64 >= top - 1e-12 && p64 <= top * 1.05);
    }
}

/// `W(U exp(itH)) = e^{i t shift} W(B^H U B exp(i t scale diag(p)))` when
/// the reduction basis `B` diagonalizes `H`.
#[test]
fn reduced_generator_reproduces_support_function() {
    for seed in 0..20 {
        let mut r = rng(500 + seed);
        let d = r.random_range(2..=5);
        let h = {
            let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
            HermitianMatrix::new(ComplexMatrix::new(&a + a.adjoint()).unwrap()).unwrap()
        };
        let u = haar_unitary_from(d, &mut r);
        let red = match reduce_to_generator(&h) {
            Ok(red) => red,
            Err(e) => panic!("seed {seed}: {e}"),
        };
        assert!(dist(&red.reconstruct(), &h) < 1e-10);
        let t = 0.7;
        let lhs = u.compose(&exp_i_hermitian(&h, t).unwrap());
        let b = &red.basis;
        let rotated = b.adjoint().compose(&u).compose(b);
        let rhs = perturbed_unitary(&rotated, &red.generator, t * red.scale).unwrap();
        let alpha = t * red.shift;
        for k in 0..64 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            let h1 = support_function(&lhs, theta).unwrap().h;
            let h2 = support_function(&rhs, theta - alpha).unwrap().h;
            assert!((h1 - h2).abs() < 1e-10, "seed {seed} theta {theta}: {h1} vs {h2}");
        }
    }
}
