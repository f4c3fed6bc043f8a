//! Numerical checks that structure-matrix fields are Poisson: antisymmetry,
//! Jacobi identity, pencil compatibility and Casimir functionals.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::bracket::{structure_matrix, BracketSpec, SecondKindWeight};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::QuadratureConfig;
use crate::ratfun::WeylRational;
use crate::C64;

/// Relative finite-difference step for coordinate derivatives.
pub const DEFAULT_STEP: f64 = 1e-5;
pub const JACOBI_TOLERANCE: f64 = 1e-6;
pub const CASIMIR_TOLERANCE: f64 = 1e-5;
pub const ANTISYMMETRY_TOLERANCE: f64 = 1e-9;
/// Number of probe points for Casimir checks.
pub const CASIMIR_PROBES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectKind {
    Antisymmetry,
    Jacobi,
    Compatibility,
    Casimir,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub kind: DefectKind,
    pub defect: f64,
    pub state: WeylRational,
    pub specs: Vec<BracketSpec>,
    pub tolerance: f64,
    pub pass: bool,
}

impl DefectReport {
    pub fn new(
        kind: DefectKind,
        defect: f64,
        state: WeylRational,
        specs: Vec<BracketSpec>,
        tolerance: f64,
    ) -> Self {
        DefectReport { kind, defect, state, specs, tolerance, pass: defect < tolerance }
    }

    /// Re-judge against another tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.defect < tolerance;
        self
    }
}

/// Jacobi defect of an arbitrary matrix field `x -> pi(x)` at `coords`:
///
/// `max_{ijk} |sum_l pi_il d_l pi_jk + pi_jl d_l pi_ki + pi_kl d_l pi_ij|`
/// divided by `max(1, max|pi|^2 / max|x|)`.
pub fn jacobi_defect_of_field<F>(coords: &[C64], step: f64, mut field: F) -> Result<f64>
where
    F: FnMut(&[C64]) -> Result<CMatrix>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidConfig("finite-difference step must be positive"));
    }
    let d = coords.len();
    let pi = field(coords)?;
    if pi.rows() != d || pi.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: pi.rows() });
    }
    let mut grads: Vec<CMatrix> = Vec::with_capacity(d);
    let mut x = coords.to_vec();
    for l in 0..d {
        let h = step * (1.0 + coords[l].norm());
        x[l] = coords[l] + h;
        let plus = field(&x)?;
        x[l] = coords[l] - h;
        let minus = field(&x)?;
        x[l] = coords[l];
        grads.push(plus.sub(&minus)?.scale(C64::new(0.5 / h, 0.0)));
    }
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut acc = C64::zero();
                for (l, g) in grads.iter().enumerate() {
                    acc += pi[(i, l)] * g[(j, k)] + pi[(j, l)] * g[(k, i)] + pi[(k, l)] * g[(i, j)];
                }
                worst = worst.max(acc.norm());
            }
        }
    }
    let scale = coords.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let norm = if scale > 0.0 { (pi.max_abs().powi(2) / scale).max(1.0) } else { 1.0 };
    Ok(worst / norm)
}

/// The field `x -> pi_spec(x)` over `(z, rho)` coordinates.
pub fn structure_field(
    spec: BracketSpec,
    cfg: QuadratureConfig,
) -> impl Fn(&[C64]) -> Result<CMatrix> {
    move |x: &[C64]| {
        let chi = WeylRational::from_coordinates(x, C64::zero())?;
        Ok(structure_matrix(&chi, spec, &cfg)?.entries)
    }
}

/// Adds `delta` to `pi_01` and subtracts it from `pi_10`: an antisymmetric
/// tamper that keeps the field skew but breaks the Jacobi identity.
pub fn tampered<F>(delta: f64, field: F) -> impl Fn(&[C64]) -> Result<CMatrix>
where
    F: Fn(&[C64]) -> Result<CMatrix>,
{
    tampered_at(0, 1, delta, field)
}

/// Antisymmetric constant tamper of entries `(i, j)` and `(j, i)`. A constant
/// tamper is invisible to Jacobi when `pi` does not depend on `x_i` or `x_j`.
pub fn tampered_at<F>(i: usize, j: usize, delta: f64, field: F) -> impl Fn(&[C64]) -> Result<CMatrix>
where
    F: Fn(&[C64]) -> Result<CMatrix>,
{
    move |x: &[C64]| {
        let mut pi = field(x)?;
        if i >= pi.rows() || j >= pi.rows() || i == j {
            return Err(Error::InvalidConfig("tamper entry out of range"));
        }
        pi[(i, j)] += delta;
        pi[(j, i)] -= delta;
        Ok(pi)
    }
}

/// `pi_a + t pi_b`.
pub fn pencil<A, B>(a: A, b: B, t: f64) -> impl Fn(&[C64]) -> Result<CMatrix>
where
    A: Fn(&[C64]) -> Result<CMatrix>,
    B: Fn(&[C64]) -> Result<CMatrix>,
{
    move |x: &[C64]| a(x)?.add(&b(x)?.scale(C64::new(t, 0.0)))
}

pub fn jacobi_defect(
    spec: BracketSpec,
    chi: &WeylRational,
    step: f64,
    cfg: &QuadratureConfig,
) -> Result<DefectReport> {
    let defect = jacobi_defect_of_field(&chi.coordinates(), step, structure_field(spec, *cfg))?;
    Ok(DefectReport::new(DefectKind::Jacobi, defect, chi.clone(), vec![spec], JACOBI_TOLERANCE))
}

/// Entry pair a constant tamper should hit: `pi` of the `f = 1` second-kind
/// bracket depends on the residues only, so `(z_0, rho_0)` there, else `(z_0, z_1)`.
pub fn tamper_slot(spec: BracketSpec, len: usize) -> (usize, usize) {
    match spec {
        BracketSpec::SecondKind { weight: SecondKindWeight::One } => (0, len),
        _ => (0, 1),
    }
}

/// Structure field with `delta max(1, max|pi(chi)|)` added antisymmetrically at
/// [`tamper_slot`]. Scaling by the tensor keeps the normalized defect near `delta`
/// whatever the size of `pi`.
pub fn tampered_structure_field(
    spec: BracketSpec,
    chi: &WeylRational,
    delta: f64,
    cfg: &QuadratureConfig,
) -> Result<impl Fn(&[C64]) -> Result<CMatrix>> {
    let scale = structure_matrix(chi, spec, cfg)?.entries.max_abs().max(1.0);
    let (i, j) = tamper_slot(spec, chi.len());
    Ok(tampered_at(i, j, delta * scale, structure_field(spec, *cfg)))
}

/// Negative control: Jacobi defect of [`tampered_structure_field`].
pub fn tampered_jacobi_defect(
    spec: BracketSpec,
    chi: &WeylRational,
    step: f64,
    delta: f64,
    cfg: &QuadratureConfig,
) -> Result<DefectReport> {
    let field = tampered_structure_field(spec, chi, delta, cfg)?;
    let defect = jacobi_defect_of_field(&chi.coordinates(), step, field)?;
    Ok(DefectReport::new(DefectKind::Jacobi, defect, chi.clone(), vec![spec], JACOBI_TOLERANCE))
}

/// Jacobi defect of `pi_a + t pi_b`.
pub fn compatibility_defect(
    spec_a: BracketSpec,
    spec_b: BracketSpec,
    t: f64,
    chi: &WeylRational,
    step: f64,
    cfg: &QuadratureConfig,
) -> Result<DefectReport> {
    let field = pencil(structure_field(spec_a, *cfg), structure_field(spec_b, *cfg), t);
    let defect = jacobi_defect_of_field(&chi.coordinates(), step, field)?;
    Ok(DefectReport::new(
        DefectKind::Compatibility,
        defect,
        chi.clone(),
        vec![spec_a, spec_b],
        JACOBI_TOLERANCE,
    ))
}

/// Negative control: `pi_a + t pi_b` with `pi_b` from [`tampered_structure_field`].
pub fn tampered_compatibility_defect(
    spec_a: BracketSpec,
    spec_b: BracketSpec,
    t: f64,
    delta: f64,
    chi: &WeylRational,
    step: f64,
    cfg: &QuadratureConfig,
) -> Result<DefectReport> {
    let field = pencil(structure_field(spec_a, *cfg), tampered_structure_field(spec_b, chi, delta, cfg)?, t);
    let defect = jacobi_defect_of_field(&chi.coordinates(), step, field)?;
    Ok(DefectReport::new(
        DefectKind::Compatibility,
        defect,
        chi.clone(),
        vec![spec_a, spec_b],
        JACOBI_TOLERANCE,
    ))
}

/// Dirac constraint functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// `sum_k I_k`, `I_k` the primitive of `1/z^n` at `z_k`.
    Phi1 { n: u32 },
    /// `log sum_k rho_k`
    Phi2,
}

/// Analytic gradient in `(z, rho)` coordinates.
pub fn functional_gradient(functional: Functional, chi: &WeylRational) -> Result<Vec<C64>> {
    let n = chi.len();
    let mut grad = vec![C64::zero(); 2 * n];
    match functional {
        Functional::Phi1 { n: 0 } => return Err(Error::Phi1Undefined),
        Functional::Phi1 { n: power } => {
            for (k, z) in chi.poles().iter().enumerate() {
                grad[k] = z.powu(power).inv();
            }
        }
        Functional::Phi2 => {
            let total: C64 = chi.residues().iter().sum();
            if total.is_zero() {
                return Err(Error::ZeroResidue(0));
            }
            for g in &mut grad[n..] {
                *g = total.inv();
            }
        }
    }
    Ok(grad)
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `max_q |grad(Phi)^T pi grad(chi(q))|`, each term divided by
/// `|grad Phi| |pi|_F |grad chi(q)|`.
pub fn casimir_defect(
    spec: BracketSpec,
    functional: Functional,
    chi: &WeylRational,
    probes: &[C64],
    cfg: &QuadratureConfig,
) -> Result<DefectReport> {
    let grad_phi = functional_gradient(functional, chi)?;
    let pi = structure_matrix(chi, spec, cfg)?.entries;
    let d = grad_phi.len();
    let row: Vec<C64> = (0..d).map(|j| (0..d).map(|i| grad_phi[i] * pi[(i, j)]).sum()).collect();
    let scale = norm2(&grad_phi) * pi.frobenius();
    let mut worst = 0.0f64;
    for &q in probes {
        let g = chi.evaluation_gradient(q)?;
        let value: C64 = row.iter().zip(&g).map(|(a, b)| a * b).sum();
        let denom = scale * norm2(&g);
        if denom > 0.0 {
            worst = worst.max(value.norm() / denom);
        }
    }
    Ok(DefectReport::new(DefectKind::Casimir, worst, chi.clone(), vec![spec], CASIMIR_TOLERANCE))
}

/// `|pi + pi^T|_F / max(1, |pi|_F)`.
pub fn antisymmetry_defect(
    spec: BracketSpec,
    chi: &WeylRational,
    cfg: &QuadratureConfig,
) -> Result<DefectReport> {
    let pi = structure_matrix(chi, spec, cfg)?;
    Ok(DefectReport::new(
        DefectKind::Antisymmetry,
        pi.antisymmetry_defect(),
        chi.clone(),
        vec![spec],
        ANTISYMMETRY_TOLERANCE,
    ))
}

/// Negative control: antisymmetry of `pi` with `delta max(1, |pi|_F)` added to
/// `pi_01` only, so the tamper is on the scale the defect is normalized by.
pub fn tampered_antisymmetry_defect(
    spec: BracketSpec,
    chi: &WeylRational,
    delta: f64,
    cfg: &QuadratureConfig,
) -> Result<DefectReport> {
    let mut pi = structure_matrix(chi, spec, cfg)?.entries;
    if pi.rows() >= 2 {
        let scale = pi.frobenius().max(1.0);
        pi[(0, 1)] += delta * scale;
    }
    Ok(DefectReport::new(
        DefectKind::Antisymmetry,
        pi.antisymmetry_defect(),
        chi.clone(),
        vec![spec],
        ANTISYMMETRY_TOLERANCE,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_symplectic_field_is_poisson() {
        let field = |_: &[C64]| {
            Ok(CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 - j as f64, 0.0)))
        };
        let d = jacobi_defect_of_field(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)], 1e-5, field).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn non_poisson_field_detected() {
        // On R^3 Jacobi means v . curl v = 0 for v = (pi_12, pi_20, pi_01); v = (x_1, 0, 1) fails.
        let field = |x: &[C64]| {
            let mut m = CMatrix::zeros(3, 3);
            m[(0, 1)] = C64::new(1.0, 0.0);
            m[(1, 0)] = C64::new(-1.0, 0.0);
            m[(1, 2)] = x[1];
            m[(2, 1)] = -x[1];
            Ok(m)
        };
        let x = [C64::new(0.3, 0.0), C64::new(0.2, 0.0), C64::new(0.5, 0.0)];
        assert!(jacobi_defect_of_field(&x, 1e-5, field).unwrap() > 0.1);
    }

    #[test]
    fn phi1_undefined_for_constant_weight() {
        let chi = WeylRational::from_real(&[1.0, 2.0], &[0.5, 0.5]).unwrap();
        assert_eq!(functional_gradient(Functional::Phi1 { n: 0 }, &chi), Err(Error::Phi1Undefined));
    }
}
