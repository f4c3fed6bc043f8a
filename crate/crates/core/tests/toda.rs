use nalgebra::{DMatrix, SymmetricEigen};
use spectral_poisson_core::sample::StateSampler;
use spectral_poisson_core::toda::*;
use spectral_poisson_core::{QuadratureConfig, C64, Error};

fn random_state(s: &mut StateSampler, n: usize) -> TodaState {
    let q = (0..n).map(|_| s.uniform(-1.0, 1.0)).collect();
    let p = (0..n).map(|_| s.uniform(-1.0, 1.0)).collect();
    TodaState::new(q, p).unwrap()
}

#[test]
fn flaschka_matches_dense_eigensolver() {
    let mut s = StateSampler::new(301);
    for n in 1..=6 {
        let st = random_state(&mut s, n);
        let j = flaschka(&st).unwrap();
        let dense = DMatrix::from_fn(n, n, |a, b| {
            if a == b {
                j.diag[a]
            } else if a + 1 == b {
                j.offdiag[a]
            } else if b + 1 == a {
                j.offdiag[b]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(dense);
        let mut pairs: Vec<(f64, f64)> =
            (0..n).map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2))).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (k, (lam, w)) in pairs.iter().enumerate() {
            assert!((j.eigenvalues[k] - lam).abs() < 1e-12);
            assert!((j.weights[k] - w).abs() < 1e-12);
        }
    }
}

#[test]
fn weyl_functions_are_r_functions_in_rat_prime() {
    let mut s = StateSampler::new(303);
    for k in 0..100 {
        let st = random_state(&mut s, 1 + k % 6);
        let j = flaschka(&st).unwrap();
        assert!((j.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(j.weights.iter().all(|&w| w > 0.0));
        let chi = weyl_from_jacobi(&j).unwrap();
        for _ in 0..20 {
            let lam = C64::new(s.uniform(-4.0, 4.0), s.uniform(0.01, 3.0));
            assert!(chi.evaluate(lam).unwrap().im > 0.0);
        }
    }
}

#[test]
fn small_examples() {
    let j = JacobiMatrixData::from_entries(vec![0.0, 0.0], vec![1.0]).unwrap();
    let chi = weyl_from_jacobi(&j).unwrap();
    let lam = C64::new(0.3, 0.4);
    let exact = 0.5 / (1.0 - lam) + 0.5 / (-1.0 - lam);
    assert!((chi.evaluate(lam).unwrap() - exact).norm() < 1e-15);
    assert!(JacobiMatrixData::from_entries(vec![0.0, 0.0], vec![-1.0]).is_err());
}

#[test]
fn flow_is_isospectral_and_conservative() {
    let st = TodaState::new(vec![-0.5, 0.7], vec![0.8, -0.3]).unwrap();
    let traj = toda_flow(&st, 10.0, 1e-3, 20).unwrap();
    let j0 = flaschka(&st).unwrap();
    let h0 = st.hamiltonian();
    for s in &traj.states {
        let j = flaschka(s).unwrap();
        for (a, b) in j.eigenvalues.iter().zip(&j0.eigenvalues) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((j.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((s.hamiltonian() - h0).abs() < 1e-9);
    }
    assert_eq!(toda_flow(&st, 1.0, 0.0, 1).map(|_| ()), Err(Error::StepSize));
}

#[test]
fn spectral_jacobian_examples() {
    let one = TodaState::new(vec![0.2], vec![0.4]).unwrap();
    let jac = spectral_jacobian(&one, 1e-5).unwrap();
    assert_eq!((jac[(1, 0)], jac[(1, 1)]), (0.0, 0.0));
    assert!((jac[(0, 1)] + 0.5).abs() < 1e-10);

    let rest = TodaState::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
    let jac = spectral_jacobian(&rest, 1e-5).unwrap();
    for row in 0..2 {
        assert!((jac[(row, 0)] + jac[(row, 1)]).abs() < 1e-10);
    }

    let st = TodaState::new(vec![0.3, -0.2, 0.5], vec![0.1, 0.6, -0.4]).unwrap();
    let (a, b, c) = (
        spectral_jacobian(&st, 4e-4).unwrap(),
        spectral_jacobian(&st, 2e-4).unwrap(),
        spectral_jacobian(&st, 1e-4).unwrap(),
    );
    // Second order: successive differences shrink by about four.
    let (d1, d2) = (a.sub(&b).unwrap().max_abs(), b.sub(&c).unwrap().max_abs());
    assert!(d2 < d1 / 3.0 && d1 < 1e-6, "{d1:e} {d2:e}");

    let degenerate = TodaState::new(vec![0.0, 40.0], vec![0.0, 0.0]).unwrap();
    assert!(matches!(spectral_jacobian(&degenerate, 1e-5), Err(Error::DegenerateSpectrum(_))));
}

#[test]
fn canonical_pushforward_puts_eigenvalues_in_involution() {
    let mut s = StateSampler::new(307);
    for n in 2..=4 {
        let st = random_state(&mut s, n);
        let pi = canonical_pushforward(&st, 1e-5).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(pi[(i, j)].abs() < 1e-7);
            }
        }
        assert!(pi.add(&pi.transpose()).unwrap().max_abs() < 1e-8);
    }
}

#[test]
fn comparison_report_covers_requested_powers() {
    let st = TodaState::new(vec![0.1, -0.4, 0.3], vec![0.2, -0.5, 0.4]).unwrap();
    let rows = compare_with_restricted(&st, 1e-5, &[0, 1, 2], &QuadratureConfig::default()).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![0, 1, 2]);
    for r in &rows {
        assert!(r.c2.abs() < 1e-12);
        assert!(r.comparison.relative_deviation.is_finite());
    }
}
