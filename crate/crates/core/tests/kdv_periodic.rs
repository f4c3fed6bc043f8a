use std::f64::consts::PI;

use spectral_poisson_core::kdv::*;
use spectral_poisson_core::{Error, C64};

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn free_potential_closed_forms() {
    let l = 1.3;
    let u = PeriodicPotential::zero(l, 64).unwrap();
    for k in [0.4, 1.1, 2.7] {
        let m = monodromy(&u, C64::new(k * k, 0.0), Sheet::Plus).unwrap();
        assert!((m.delta - (2.0 * l * k).cos()).norm() < 1e-9);
    }
    for z in [C64::new(0.8, 0.3), C64::new(-2.0, 0.5), C64::new(3.0, -0.7)] {
        let plus = monodromy(&u, z, Sheet::Plus).unwrap();
        let minus = monodromy(&u, z, Sheet::Minus).unwrap();
        assert!(rel(plus.chi, free_chi(z)) < 1e-9);
        assert!(rel(minus.chi, -free_chi(z)) < 1e-9);
        assert!(rel(omega_factor(&u, z, Sheet::Plus).unwrap(), free_omega(l, z)) < 1e-9);
        assert!((plus.omega.unwrap() + minus.omega.unwrap()).norm() < 1e-8);
    }
}

#[test]
fn wronskian_and_multiplier_consistency() {
    let u = PeriodicPotential::new(PI, vec![(1, C64::new(0.15, 0.1)), (2, C64::new(-0.2, 0.05))], 64).unwrap();
    let mut state = 17u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..50 {
        let z = C64::new(-1.0 + 5.0 * next(), -2.0 + 4.0 * next());
        let m = monodromy(&u, z, Sheet::Plus).unwrap();
        assert!((m.det() - 1.0).norm() < 1e-8);
        assert!((m.w + m.w.inv() - m.delta * 2.0).norm() < 1e-8 * (1.0 + m.delta.norm()));
    }
}

#[test]
fn branch_points_are_rejected() {
    // u = 0: Delta(z) = cos(2 l sqrt z) = 1 at z = 0 and z = (pi / l)^2.
    let u = PeriodicPotential::zero(PI, 64).unwrap();
    assert!(matches!(omega_factor(&u, C64::new(1.0, 0.0), Sheet::Plus), Err(Error::BranchProximity(_))));
    assert!(matches!(
        deformed_ah_rhs(&u, C64::new(1.0, 0.0), C64::new(0.5, 0.5), (Sheet::Plus, Sheet::Plus)),
        Err(Error::BranchProximity(_))
    ));
}

#[test]
fn free_gradient_matches_squared_floquet_solution() {
    let u = PeriodicPotential::zero(PI, 128).unwrap();
    let cfg = PerturbationConfig::default();
    let p = C64::new(1.3, 0.5);
    let grad = variational_derivative_chi(&u, p, Sheet::Plus, &cfg).unwrap();
    // The bump of width sigma multiplies each Fourier mode e^{2 i k x} by
    // e^{-2 sigma^2 k^2}; undo that before comparing away from the base point.
    let sigma = cfg.width * u.period() / u.grid_size() as f64;
    let smear = (-(p.sqrt() * p.sqrt()) * 2.0 * sigma * sigma).exp();
    for (m, x) in u.grid().points().iter().enumerate().skip(4).take(120) {
        let exact = free_chi_gradient(PI, p, *x) * smear;
        assert!(rel(grad[m], exact) < 1e-6, "m={m}: {} vs {exact}", grad[m]);
    }
    // Not translation invariant: the gradient rotates with e^{2 i sqrt(P) x}.
    assert!(rel(grad[64], grad[32]) > 0.1);
}

#[test]
fn gradient_is_second_order_in_epsilon_and_conjugation_symmetric() {
    let u = PeriodicPotential::cosine(PI, 0.3, 64).unwrap();
    let p = C64::new(0.9, 0.6);
    let big = PerturbationConfig { epsilon: 1e-2, ..Default::default() };
    let half = PerturbationConfig { epsilon: 5e-3, ..Default::default() };
    let tiny = PerturbationConfig { epsilon: 1e-5, ..Default::default() };
    let gb = variational_derivative_chi(&u, p, Sheet::Plus, &big).unwrap();
    let gh = variational_derivative_chi(&u, p, Sheet::Plus, &half).unwrap();
    let gt = variational_derivative_chi(&u, p, Sheet::Plus, &tiny).unwrap();
    let err = |g: &[C64]| g.iter().zip(&gt).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let ratio = err(&gb) / err(&gh);
    assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");

    // Conjugation swaps the sheets: chi_+(conj z) = -conj chi_-(z).
    let mp = monodromy(&u, p, Sheet::Minus).unwrap();
    let mc = monodromy(&u, p.conj(), Sheet::Plus).unwrap();
    assert!((mc.chi + mp.chi.conj()).norm() < 1e-10);
    let gm = variational_derivative_chi(&u, p, Sheet::Minus, &tiny).unwrap();
    let gc = variational_derivative_chi(&u, p.conj(), Sheet::Plus, &tiny).unwrap();
    for (a, b) in gm.iter().zip(&gc) {
        assert!((a.conj() + b).norm() < 1e-7 * (1.0 + a.norm()));
    }
}

#[test]
fn gardner_bracket_is_antisymmetric() {
    let u = PeriodicPotential::cosine(PI, 0.3, 64).unwrap();
    let cfg = PerturbationConfig::default();
    let (p, q) = (C64::new(1.3, 0.5), C64::new(-0.4, 0.8));
    let sheets = (Sheet::Plus, Sheet::Plus);
    let same = gardner_bracket_chi(&u, p, p, sheets, &cfg).unwrap();
    assert!(same.norm() < 1e-8);
    let a = gardner_bracket_chi(&u, p, q, sheets, &cfg).unwrap();
    let b = gardner_bracket_chi(&u, q, p, sheets, &cfg).unwrap();
    assert!((a + b).norm() < 1e-8);
}

#[test]
fn deformed_rhs_examples() {
    let u = PeriodicPotential::zero(PI, 64).unwrap();
    let (p, q) = (C64::new(1.3, 0.5), C64::new(-0.4, 0.8));
    let plus = (Sheet::Plus, Sheet::Plus);
    let rhs = deformed_ah_rhs(&u, p, q, plus).unwrap();
    let d = free_chi(p) - free_chi(q);
    let exact = d * d / (p - q) * (free_omega(PI, p) + free_omega(PI, q)) * 0.5;
    assert!(rel(rhs, exact) < 1e-8);
    let swapped = deformed_ah_rhs(&u, q, p, plus).unwrap();
    assert!((rhs + swapped).norm() < 1e-12 * rhs.norm());
    let flipped = deformed_ah_rhs(&u, p, q, (Sheet::Minus, Sheet::Minus)).unwrap();
    assert!((rhs + flipped).norm() < 1e-9 * rhs.norm());
    assert_eq!(deformed_ah_rhs(&u, p, p, plus), Err(Error::CoincidentPoints));
}

#[test]
fn hierarchy_vector_fields() {
    let u = PeriodicPotential::new(PI, vec![(1, C64::new(0.3, 0.1)), (3, C64::new(-0.05, 0.02))], 256).unwrap();
    let d = |k| u.derivative_samples(k);
    let (u0, u1, u2, u3, u5) = (d(0), d(1), d(2), d(3), d(5));
    let x0 = kdv_vector_field(&u, 0).unwrap();
    let x1 = kdv_vector_field(&u, 1).unwrap();
    let x2 = kdv_vector_field(&u, 2).unwrap();
    for m in 0..u0.len() {
        assert!((x0[m] - u1[m]).abs() < 1e-8);
        let e1 = 1.5 * u0[m] * u1[m] - 0.25 * u3[m];
        assert!((x1[m] - e1).abs() < 1e-7);
        let e2 = u5[m] / 16.0 - 1.25 * u1[m] * u2[m] - 0.625 * u0[m] * u3[m] + 1.875 * u0[m] * u0[m] * u1[m];
        assert!((x2[m] - e2).abs() < 1e-6);
    }
}

#[test]
fn hamiltonians_commute() {
    let u = PeriodicPotential::cosine(PI, 0.3, 256).unwrap();
    for m in 0..3 {
        for n in 0..3 {
            assert!(hamiltonian_bracket(&u, m, n).unwrap().abs() < 1e-6);
        }
    }
    // H_0 = 1/2 int (0.3 cos x)^2 over [0, 2 pi].
    assert!((kdv_hamiltonian(&u, 0).unwrap() - 0.5 * 0.09 * PI).abs() < 1e-12);
    assert!(kdv_hamiltonian(&u, 3).is_err());
}

#[test]
fn potential_validation() {
    assert!(matches!(
        PeriodicPotential::new(1.0, vec![(1, C64::new(1.0, 0.0)), (-1, C64::new(0.0, 1.0))], 64),
        Err(Error::NonRealPotential(_))
    ));
    assert!(PeriodicPotential::new(1.0, vec![(40, C64::new(1.0, 0.0))], 64).is_err());
    assert!(PeriodicPotential::new(-1.0, vec![], 64).is_err());
    let u = PeriodicPotential::cosine(2.0, 0.3, 64).unwrap();
    assert!((u.value(0.0) - 0.3).abs() < 1e-15 && (u.value(2.0) + 0.3).abs() < 1e-15);
}

/// `int g_P d/dx g_Q` for the free gradients `g = A e^{2 i k x}` on one period,
/// with the jump at the base point weighted by the midpoint value of `g_P`.
fn free_gardner_midpoint(l: f64, p: C64, q: C64) -> C64 {
    let (kp, kq) = (p.sqrt(), q.sqrt());
    let (wp, wq) = ((C64::i() * kp * 2.0 * l).exp(), (C64::i() * kq * 2.0 * l).exp());
    let (ap, aq) = ((C64::i() * (wp * wp - 1.0)).inv(), (C64::i() * (wq * wq - 1.0)).inv());
    let interior = ap * aq * kq * (wp * wp * wq * wq - 1.0) / (kp + kq);
    let jump = ap * aq * (wp * wp + 1.0) * (-(wq * wq) + 1.0) * 0.5;
    interior + jump
}

#[test]
fn free_gardner_bracket_converges_to_midpoint_formula() {
    let (p, q) = (C64::new(1.3, 0.5), C64::new(-0.4, 0.8));
    let exact = free_gardner_midpoint(PI, p, q);
    // The same number in spectral form: rhs / 2 + (Omega_P - Omega_Q) / 4.
    let rhs = (free_chi(p) - free_chi(q)).powi(2) / (p - q) * (free_omega(PI, p) + free_omega(PI, q)) * 0.5;
    let spectral = rhs * 0.5 + (free_omega(PI, p) - free_omega(PI, q)) * 0.25;
    assert!(rel(spectral, exact) < 1e-12);
    let cfg = PerturbationConfig::default();
    let mut errors = Vec::new();
    for g in [64, 128] {
        let u = PeriodicPotential::zero(PI, g).unwrap();
        let b = gardner_bracket_chi(&u, p, q, (Sheet::Plus, Sheet::Plus), &cfg).unwrap();
        errors.push(rel(b, exact));
        assert!(rel(b, rhs) > 0.3);
    }
    // First order in the grid spacing.
    let ratio = errors[0] / errors[1];
    assert!(errors[1] < 0.15 && ratio > 1.7 && ratio < 2.3, "{errors:?}");
}
