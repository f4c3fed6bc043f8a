//! Open Toda lattice, its Jacobi (Flaschka) matrix and Weyl function.
//!
//! Convention: `a_k = e^{(q_k - q_{k+1})/2} / 2`, `b_k = -p_k / 2`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::bracket::{compare_matrices, pushforward, structure_matrix, BracketSpec, MatrixComparison};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_tridiagonal_eigen, RMatrix};
use crate::ode::{step_plan, Rk4};
use crate::quadrature::QuadratureConfig;
use crate::ratfun::WeylRational;
use crate::C64;

/// Smallest eigenvalue gap accepted by [`spectral_jacobian`].
pub const MIN_SPECTRAL_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TodaState {
    q: Vec<f64>,
    p: Vec<f64>,
}

impl TodaState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: q.len(), found: p.len() });
        }
        if q.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if q.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("non-finite Toda coordinate"));
        }
        Ok(TodaState { q, p })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `H = sum p^2/2 + sum_k e^{q_k - q_{k+1}}`
    pub fn hamiltonian(&self) -> f64 {
        let kinetic: f64 = self.p.iter().map(|p| 0.5 * p * p).sum();
        let potential: f64 = self.q.windows(2).map(|w| (w[0] - w[1]).exp()).sum();
        kinetic + potential
    }

    fn packed(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    fn unpack(y: &[f64]) -> Self {
        let n = y.len() / 2;
        TodaState { q: y[..n].to_vec(), p: y[n..].to_vec() }
    }
}

/// Symmetric tridiagonal matrix with its spectral data.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrixData {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Squared first components of the normalized eigenvectors.
    pub weights: Vec<f64>,
}

impl JacobiMatrixData {
    pub fn from_entries(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len().saturating_sub(1), found: offdiag.len() });
        }
        if let Some(k) = offdiag.iter().position(|&a| !(a > 0.0)) {
            return Err(Error::MassPositivity(k));
        }
        let eig = symmetric_tridiagonal_eigen(&diag, &offdiag)?;
        let weights = (0..diag.len()).map(|k| eig.vectors[(0, k)].powi(2)).collect();
        Ok(JacobiMatrixData { diag, offdiag, eigenvalues: eig.values, weights })
    }

    pub fn min_gap(&self) -> f64 {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

pub fn flaschka(s: &TodaState) -> Result<JacobiMatrixData> {
    let diag = s.p.iter().map(|p| -0.5 * p).collect();
    let offdiag = s.q.windows(2).map(|w| 0.5 * (0.5 * (w[0] - w[1])).exp()).collect();
    JacobiMatrixData::from_entries(diag, offdiag)
}

/// `chi(lambda) = sum_k w_k / (lambda_k - lambda)`.
pub fn weyl_from_jacobi(j: &JacobiMatrixData) -> Result<WeylRational> {
    let poles = j.eigenvalues.iter().map(|&l| C64::new(l, 0.0)).collect();
    let residues = j.weights.iter().map(|&w| C64::new(w, 0.0)).collect();
    WeylRational::from_pole_residue(poles, residues, C64::zero())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintValues {
    pub phi1: C64,
    pub phi2: C64,
    /// A principal-branch logarithm was taken on the negative real axis.
    pub log_branch: bool,
}

/// `Phi_1 = sum_k I_k` (`log z_k` for `n = 1`, `z_k^{1-n}/(1-n)` for `n >= 2`),
/// `Phi_2 = log sum_k rho_k`.
pub fn constraint_values(chi: &WeylRational, n: u32) -> Result<ConstraintValues> {
    if n == 0 {
        return Err(Error::Phi1Undefined);
    }
    let on_cut = |z: C64| z.im == 0.0 && z.re < 0.0;
    let mut log_branch = false;
    let mut phi1 = C64::zero();
    for (k, &z) in chi.poles().iter().enumerate() {
        if z.is_zero() {
            return Err(Error::PoleProximity { index: k, distance: 0.0 });
        }
        if n == 1 {
            log_branch |= on_cut(z);
            phi1 += z.ln();
        } else {
            let e = 1.0 - n as f64;
            phi1 += z.powf(e) / e;
        }
    }
    let total: C64 = chi.residues().iter().sum();
    if total.is_zero() {
        return Err(Error::ZeroResidue(0));
    }
    log_branch |= on_cut(total);
    Ok(ConstraintValues { phi1, phi2: total.ln(), log_branch })
}

/// `q' = p`, `p_k' = -e^{q_k - q_{k+1}} + e^{q_{k-1} - q_k}` with `q_{-1} = -inf`, `q_N = +inf`.
pub fn toda_vector_field(y: &[f64], dy: &mut [f64]) {
    let n = y.len() / 2;
    let (q, p) = y.split_at(n);
    dy[..n].copy_from_slice(p);
    for k in 0..n {
        let mut f = 0.0;
        if k + 1 < n {
            f -= (q[k] - q[k + 1]).exp();
        }
        if k > 0 {
            f += (q[k - 1] - q[k]).exp();
        }
        dy[n + k] = f;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TodaTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<TodaState>,
}

/// RK4 integration over `[0, t_end]`, recording `samples + 1` evenly spaced states.
pub fn toda_flow(s: &TodaState, t_end: f64, dt: f64, samples: usize) -> Result<TodaTrajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::StepSize);
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidConfig("final time must be nonnegative"));
    }
    let samples = samples.max(1);
    let mut y = s.packed();
    let (steps, h) = if t_end == 0.0 { (0, 0.0) } else { step_plan(t_end, dt) };
    let mut rk = Rk4::new(y.len());
    let mut times = vec![0.0];
    let mut states = vec![s.clone()];
    let mut next_sample = 1;
    for k in 1..=steps {
        rk.step(&mut y, h, toda_vector_field);
        while next_sample <= samples && k * samples >= next_sample * steps {
            times.push(k as f64 * h);
            states.push(TodaState::unpack(&y));
            next_sample += 1;
        }
    }
    Ok(TodaTrajectory { times, states })
}

/// `(q, p) -> (lambda_0..lambda_{N-1}, w_0..w_{N-1})`.
pub fn spectral_coordinates(s: &TodaState) -> Result<Vec<f64>> {
    let j = flaschka(s)?;
    Ok(j.eigenvalues.into_iter().chain(j.weights).collect())
}

/// Central-difference Jacobian of [`spectral_coordinates`], step `step (1 + |x|)`.
pub fn spectral_jacobian(s: &TodaState, step: f64) -> Result<RMatrix> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig("finite-difference step must be positive"));
    }
    let gap = flaschka(s)?.min_gap();
    if gap < MIN_SPECTRAL_GAP {
        return Err(Error::DegenerateSpectrum(gap));
    }
    let base = s.packed();
    let d = base.len();
    let mut jac = RMatrix::zeros(d, d);
    for col in 0..d {
        let h = step * (1.0 + base[col].abs());
        let mut y = base.clone();
        y[col] = base[col] + h;
        let plus = spectral_coordinates(&TodaState::unpack(&y))?;
        y[col] = base[col] - h;
        let minus = spectral_coordinates(&TodaState::unpack(&y))?;
        for row in 0..d {
            jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Canonical tensor `{q_i, p_j} = delta_ij`.
pub fn canonical_tensor(n: usize) -> RMatrix {
    crate::peakon::canonical_tensor(n)
}

/// Push-forward of the canonical bracket onto `(lambda, w)`.
pub fn canonical_pushforward(s: &TodaState, step: f64) -> Result<RMatrix> {
    pushforward(&canonical_tensor(s.len()), &spectral_jacobian(s, step)?)
}

/// Comparison of the canonical push-forward with one restricted structure matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedComparison {
    pub n: u32,
    pub c2: f64,
    pub comparison: MatrixComparison,
}

/// Compares the canonical push-forward with `TodaRestricted { n, c2 = log sum w }`
/// for each requested `n`.
pub fn compare_with_restricted(
    s: &TodaState,
    step: f64,
    powers: &[u32],
    cfg: &QuadratureConfig,
) -> Result<Vec<RestrictedComparison>> {
    let pushed = canonical_pushforward(s, step)?.to_complex();
    let chi = weyl_from_jacobi(&flaschka(s)?)?;
    // c2 = Phi_2 = log sum w, which is zero on-shell up to rounding.
    let c2 = chi.residues().iter().map(|r| r.re).sum::<f64>().ln();
    powers
        .iter()
        .map(|&n| {
            let formula = structure_matrix(&chi, BracketSpec::TodaRestricted { n, c2 }, cfg)?;
            Ok(RestrictedComparison { n, c2, comparison: compare_matrices(&pushed, &formula.entries)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_particles_at_rest() {
        let j = flaschka(&TodaState::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(j.offdiag, vec![0.5]);
        assert_eq!(j.diag, vec![0.0, 0.0]);
        assert!((j.eigenvalues[0] + 0.5).abs() < 1e-15 && (j.eigenvalues[1] - 0.5).abs() < 1e-15);
        assert!((j.weights[0] - 0.5).abs() < 1e-15 && (j.weights[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_particle() {
        let j = flaschka(&TodaState::new(vec![0.0], vec![2.0]).unwrap()).unwrap();
        assert_eq!((j.diag[0], j.eigenvalues[0], j.weights[0]), (-1.0, -1.0, 1.0));
        let chi = weyl_from_jacobi(&JacobiMatrixData::from_entries(vec![3.0], vec![]).unwrap()).unwrap();
        assert_eq!(chi.evaluate(C64::new(1.0, 0.0)).unwrap(), C64::new(0.5, 0.0));
    }

    #[test]
    fn constraints() {
        let chi = WeylRational::from_real(&[1.0, core::f64::consts::E], &[0.5, 0.5]).unwrap();
        let c = constraint_values(&chi, 1).unwrap();
        assert!((c.phi1 - 1.0).norm() < 1e-15);
        assert!(c.phi2.norm() < 1e-15);
        assert!(!c.log_branch);
        assert_eq!(constraint_values(&chi, 0), Err(Error::Phi1Undefined));
        let neg = WeylRational::from_real(&[-1.0, 2.0], &[0.5, 0.5]).unwrap();
        assert!(constraint_values(&neg, 1).unwrap().log_branch);
    }

    #[test]
    fn free_particle() {
        let s = TodaState::new(vec![0.5], vec![1.5]).unwrap();
        let traj = toda_flow(&s, 2.0, 1e-2, 2).unwrap();
        assert!((traj.states[2].q()[0] - 3.5).abs() < 1e-12);
        assert_eq!(toda_flow(&s, 1.0, -1.0, 1), Err(Error::StepSize));
    }
}
