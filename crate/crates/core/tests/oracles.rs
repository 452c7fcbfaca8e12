use numrange_core::linalg::{unitary_eig, ComplexMatrix, UnitaryMatrix};
use numrange_core::numrange::{contains_zero_general, contains_zero_unitary, Membership, SupportProfile};
use numrange_core::testkit::{brute_membership, haar_unitary, DENSE_ANGLES};
use numrange_core::tol;
use numrange_core::Complex64;

#[test]
fn gap_test_agrees_with_support_sweep_on_haar_unitaries() {
    let mut compared = 0;
    let mut inside = 0;
    for seed in 0..200u64 {
        let d = 1 + (seed % 8) as usize;
        let u = haar_unitary(d, seed);
        let gap = contains_zero_unitary(&unitary_eig(&u).unwrap());
        let sweep = contains_zero_general(&u, tol::DECISION_ANGLES).unwrap();
        if gap == Membership::OnBoundary || sweep == Membership::OnBoundary {
            continue;
        }
        assert_eq!(gap, sweep, "seed {seed}, d = {d}");
        compared += 1;
        inside += usize::from(gap == Membership::Inside);
    }
    assert!(compared >= 190);
    assert!(inside > 20 && inside < compared - 20, "both verdicts exercised: {inside}/{compared}");
}

#[test]
fn brute_force_oracle_agrees_with_gap_test() {
    for seed in 0..200u64 {
        let d = 2 + (seed % 7) as usize;
        let u = haar_unitary(d, 10_000 + seed);
        let gap = contains_zero_unitary(&unitary_eig(&u).unwrap());
        let brute = brute_membership(&u, DENSE_ANGLES);
        if gap == Membership::OnBoundary || brute == Membership::OnBoundary {
            continue;
        }
        assert_eq!(gap, brute, "seed {seed}, d = {d}");
    }
}

#[test]
fn thin_ranges_are_classified_exactly() {
    // segment from 1 to e^{i phi}: distance to the origin is cos(phi / 2)
    for &phi in &[3.0, 3.1, 3.13, pi_minus(1e-6)] {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, phi]);
        assert_eq!(contains_zero_general(&u, 2048).unwrap(), Membership::Outside, "phi = {phi}");
    }
    // the unrefined dense sweep resolves windows wider than its spacing
    for &phi in &[3.0, 3.1, 3.13] {
        let u = UnitaryMatrix::diagonal_phases(&[0.0, phi]);
        assert_eq!(brute_membership(&u, DENSE_ANGLES), Membership::Outside, "phi = {phi}");
    }
    let half_turn = UnitaryMatrix::diagonal_phases(&[0.0, std::f64::consts::PI]);
    assert_eq!(contains_zero_general(&half_turn, 2048).unwrap(), Membership::OnBoundary);
}

fn pi_minus(eps: f64) -> f64 {
    std::f64::consts::PI - eps
}

#[test]
fn support_profile_is_convex_for_random_matrices() {
    for seed in 0..20u64 {
        let u = haar_unitary(4, seed);
        let a = u.matrix().add(&ComplexMatrix::from_real_diagonal(&[0.5, -0.3, 0.0, 0.2]));
        let profile = SupportProfile::compute(&a, 720).unwrap();
        assert!(profile.convexity_violation() <= 1e-10);
        assert!(profile.polygon().is_convex());
    }
}

#[test]
fn identity_range_is_one_point() {
    let profile = SupportProfile::compute(&ComplexMatrix::identity(2), 64).unwrap();
    for z in &profile.boundary_points {
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }
    assert_eq!(profile.polygon().vertices.len(), 1);
}

/// Eigenvalue arguments of Haar unitaries are uniform on the circle; a
/// loose chi-square sanity check over 10^4 draws of size 2.
#[test]
fn haar_eigenvalue_arguments_look_uniform() {
    const BINS: usize = 16;
    let mut counts = [0usize; BINS];
    for seed in 0..5_000u64 {
        for z in unitary_eig(&haar_unitary(2, 77_000 + seed)).unwrap().eigenvalues() {
            let x = (z.arg() + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
            counts[((x * BINS as f64) as usize).min(BINS - 1)] += 1;
        }
    }
    let n: usize = counts.iter().sum();
    let expected = n as f64 / BINS as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 15 degrees of freedom, p = 0.001 critical value
    assert!(chi2 < 37.7, "chi2 = {chi2}, counts = {counts:?}");
}
