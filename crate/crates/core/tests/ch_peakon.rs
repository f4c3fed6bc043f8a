use nalgebra::{DMatrix, SymmetricEigen};
use spectral_poisson_core::peakon::*;
use spectral_poisson_core::sample::StateSampler;
use spectral_poisson_core::{Error, C64};

fn random_string(s: &mut StateSampler, n: usize) -> DiscreteString {
    let mut x: Vec<f64> = (0..n).map(|_| s.uniform(-3.0, 3.0)).collect();
    x.sort_by(f64::total_cmp);
    let p = (0..n).map(|_| s.uniform(0.2, 2.0)).collect();
    peakons_to_string(&PeakonState::new(x, p).unwrap()).unwrap()
}

/// Eigenvalues of `K f = lambda M f` for the piecewise-linear string, Dirichlet
/// (fixed) or Neumann (free) at both ends.
fn fem_spectrum(d: &DiscreteString, fixed_ends: bool) -> Vec<f64> {
    let (xi, g) = (d.xi(), d.masses());
    let n = xi.len();
    let mut lengths = vec![xi[0] + 2.0];
    lengths.extend(xi.windows(2).map(|w| w[1] - w[0]));
    lengths.push(2.0 - xi[n - 1]);
    let mut k = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        if fixed_ends || i > 0 {
            k[(i, i)] += 1.0 / lengths[i];
        }
        if fixed_ends || i + 1 < n {
            k[(i, i)] += 1.0 / lengths[i + 1];
        }
        if i + 1 < n {
            k[(i, i + 1)] = -1.0 / lengths[i + 1];
            k[(i + 1, i)] = -1.0 / lengths[i + 1];
        }
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| k[(i, j)] / (g[i] * g[j]).sqrt());
    let mut ev: Vec<f64> = SymmetricEigen::new(scaled).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn single_mass_weyl_function() {
    let d = DiscreteString::new(vec![0.0], vec![1.0]).unwrap();
    for lam in [C64::new(0.3, 0.2), C64::new(-2.0, 0.0), C64::new(5.0, -1.0)] {
        let exact = -(1.0 - 2.0 * lam) / (4.0 - 4.0 * lam);
        assert!((string_weyl_lambda(&d, lam).unwrap() - exact).norm() < 1e-12);
    }
    let data = string_weyl(&d).unwrap();
    assert!((data.weyl.const_term() + 0.25).norm() < 1e-9);
    let z = C64::new(0.4, 0.9);
    let exact = -0.25 - 1.0 / (4.0 * (z + 1.0));
    assert!((data.weyl.evaluate(z).unwrap() - exact).norm() < 1e-12);
    let (dir, neu) = spectra(&d).unwrap();
    assert_eq!((dir, neu), (vec![1.0], vec![0.0]));
}

#[test]
fn spectra_match_finite_element_oracle() {
    let mut s = StateSampler::new(211);
    for n in 1..=6 {
        let d = random_string(&mut s, n);
        let (dir, neu) = spectra(&d).unwrap();
        assert_eq!(dir.len(), n);
        for (a, b) in dir.iter().zip(fem_spectrum(&d, true)) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
        for (a, b) in neu.iter().zip(fem_spectrum(&d, false)) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn weyl_function_invariants() {
    let mut s = StateSampler::new(223);
    for n in 1..=6 {
        let d = random_string(&mut s, n);
        let data = string_weyl(&d).unwrap();
        assert_eq!(data.weyl.len(), n);
        assert!((data.weyl.const_term() + 0.25).norm() < 1e-9);
        for r in data.weyl.residues() {
            assert!(r.re > 0.0 && r.im.abs() < 1e-12);
        }
        for z in data.weyl.poles() {
            assert!(z.re < 0.0);
        }
        // Fixing both ends is a rank-two change of the free-free problem:
        // gamma_k <= lambda_k <= gamma_{k+2}.
        assert!(data.neumann[0].abs() < 1e-9);
        for k in 0..n {
            assert!(data.neumann[k] < data.dirichlet[k]);
            if k + 2 < n {
                assert!(data.dirichlet[k] < data.neumann[k + 2]);
            }
        }
        // Releasing only the left end is rank one: the zeros of phi(2, .) alternate strictly.
        let mixed = data.polynomials.phi.real_roots(1e-8).unwrap();
        assert_eq!(mixed.len(), n);
        for k in 0..n {
            assert!(mixed[k] < data.dirichlet[k]);
            if k + 1 < n {
                assert!(data.dirichlet[k] < mixed[k + 1]);
            }
        }
        let mut by_modulus = data.pole_moduli();
        by_modulus.dedup();
        assert_eq!(by_modulus.len(), n);
        // Against the defining ratio.
        let z = C64::new(-0.3, 0.7);
        let exact = string_weyl_lambda(&d, -z.inv()).unwrap();
        assert!((data.weyl.evaluate(z).unwrap() - exact).norm() < 1e-10 * exact.norm());
    }
}

#[test]
fn state_validation() {
    assert_eq!(PeakonState::new(vec![0.0], vec![-1.0]), Err(Error::MassPositivity(0)));
    assert_eq!(PeakonState::new(vec![0.0, 0.0], vec![1.0, 1.0]), Err(Error::Ordering(1)));
    let s = PeakonState::new(vec![0.0], vec![1.0]).unwrap();
    let d = peakons_to_string(&s).unwrap();
    assert_eq!((d.xi(), d.masses()), (&[0.0][..], &[1.0][..]));
}

#[test]
fn two_peakon_conservation_and_isospectrality() {
    let s = PeakonState::new(vec![-1.0, 0.5], vec![1.5, 0.7]).unwrap();
    let traj = peakon_flow(&s, 10.0, 1e-3, 50).unwrap();
    let (h0, m0) = (s.hamiltonian(), s.total_momentum());
    for st in &traj.states {
        assert!((st.hamiltonian() - h0).abs() < 1e-8 * h0);
        assert!((st.total_momentum() - m0).abs() < 1e-8 * m0);
    }
    assert!(isospectral_drift(&traj).unwrap() < 1e-6);
    let tampered = peakon_flow_perturbed(&s, 10.0, 1e-3, 50, |_, dy| dy[3] += 0.01).unwrap();
    assert!(isospectral_drift(&tampered).unwrap() > 1e-3);
}

#[test]
fn single_peakon_spectrum_is_static() {
    let s = PeakonState::new(vec![0.3], vec![0.8]).unwrap();
    let traj = peakon_flow(&s, 3.0, 1e-3, 30).unwrap();
    assert!(isospectral_drift(&traj).unwrap() < 1e-10);
}

#[test]
fn collision_is_reported() {
    let s = PeakonState::new(vec![0.0, 0.5], vec![1.0, 1.0]).unwrap();
    let r = peakon_flow_perturbed(&s, 2.0, 1e-3, 10, |_, dy| dy[0] += 5.0);
    assert_eq!(r.map(|_| ()), Err(Error::CollisionDetected(0, 1)));
}

#[test]
fn pushforward_of_canonical_bracket_is_antisymmetric() {
    let s = PeakonState::new(vec![-0.4, 0.6], vec![1.2, 0.5]).unwrap();
    let pi = canonical_pushforward(&s, 1e-6).unwrap();
    assert!(pi.antisymmetry_defect() < 1e-12);
    assert!(pi.max_abs() > 1e-3);
}
