//! Camassa–Holm peakons, the associated discrete string on [-2, 2] and its
//! Weyl function.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix};
use crate::ode::{step_plan, Rk4};
use crate::poly::Poly;
use crate::ratfun::WeylRational;
use crate::C64;

/// Minimum admissible gap between neighbouring peakons at construction.
pub const MIN_GAP: f64 = 1e-8;
/// Gap below which integration aborts.
pub const COLLISION_GAP: f64 = 1e-6;

/// `m = sum p_i delta(x - x_i)` with `x` strictly increasing and `p > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakonState {
    x: Vec<f64>,
    p: Vec<f64>,
}

impl PeakonState {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: p.len() });
        }
        if x.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for (i, &pi) in p.iter().enumerate() {
            if !(pi > 0.0) || !pi.is_finite() {
                return Err(Error::MassPositivity(i));
            }
        }
        for i in 1..x.len() {
            if !(x[i] - x[i - 1] > MIN_GAP) {
                return Err(Error::Ordering(i));
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("non-finite peakon position"));
        }
        Ok(PeakonState { x, p })
    }

    pub fn positions(&self) -> &[f64] {
        &self.x
    }

    pub fn momenta(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `H = 1/2 sum_{ij} p_i p_j e^{-|x_i - x_j|}`
    pub fn hamiltonian(&self) -> f64 {
        let mut h = 0.0;
        for i in 0..self.len() {
            for j in 0..self.len() {
                h += self.p[i] * self.p[j] * (-(self.x[i] - self.x[j]).abs()).exp();
            }
        }
        0.5 * h
    }

    pub fn total_momentum(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Point masses `g_i` at `xi_i` on (-2, 2).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteString {
    xi: Vec<f64>,
    masses: Vec<f64>,
}

impl DiscreteString {
    pub fn new(xi: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if xi.len() != masses.len() {
            return Err(Error::DimensionMismatch { expected: xi.len(), found: masses.len() });
        }
        for (i, &g) in masses.iter().enumerate() {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::MassPositivity(i));
            }
        }
        for (i, &s) in xi.iter().enumerate() {
            if !(s > -2.0 && s < 2.0) {
                return Err(Error::InvalidSpec("string point outside (-2, 2)"));
            }
            if i > 0 && !(s > xi[i - 1]) {
                return Err(Error::Ordering(i));
            }
        }
        Ok(DiscreteString { xi, masses })
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// `xi = 2 tanh(x/2)` and the point-mass weight `g = p / (1 - xi^2/4) = p cosh^2(x/2)`.
pub fn string_point(x: f64, p: f64) -> (f64, f64) {
    // cosh^2 avoids the cancellation in 1 - xi^2/4 near the ends.
    let c = (0.5 * x).cosh();
    (2.0 * (0.5 * x).tanh(), p * c * c)
}

pub fn peakons_to_string(s: &PeakonState) -> Result<DiscreteString> {
    let (xi, masses) = s.x.iter().zip(&s.p).map(|(&x, &p)| string_point(x, p)).unzip();
    // Far peakons saturate tanh at +-2 and leave the open interval.
    DiscreteString::new(xi, masses).map_err(|e| match e {
        Error::InvalidSpec(_) | Error::Ordering(_) => Error::DegenerateString,
        other => other,
    })
}

/// Exact values at `xi = 2` of the string solutions as polynomials in `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct StringPolynomials {
    /// `phi(2)`, with `phi(-2) = 1, phi'(-2) = 0`
    pub phi: Poly,
    /// `phi'(2)`
    pub dphi: Poly,
    /// `psi(2)`, with `psi(-2) = 0, psi'(-2) = 1`
    pub psi: Poly,
    /// `psi'(2)`
    pub dpsi: Poly,
}

/// Propagates `(f, f')` across the string: linear between masses, `f' -= lambda g f` at a mass.
pub fn string_polynomials(d: &DiscreteString) -> StringPolynomials {
    let lambda = Poly::from_real(&[0.0, 1.0]);
    let propagate = |mut f: Poly, mut df: Poly| {
        let mut at = -2.0;
        for (&s, &g) in d.xi.iter().zip(&d.masses) {
            f = f.add(&df.scale(C64::new(s - at, 0.0)));
            df = df.add(&f.mul(&lambda).scale(C64::new(-g, 0.0)));
            at = s;
        }
        let f_end = f.add(&df.scale(C64::new(2.0 - at, 0.0)));
        (f_end, df)
    };
    let (phi, dphi) = propagate(Poly::constant(C64::new(1.0, 0.0)), Poly::zero());
    let (psi, dpsi) = propagate(Poly::zero(), Poly::constant(C64::new(1.0, 0.0)));
    StringPolynomials { phi, dphi, psi, dpsi }
}

/// `chi(lambda) = -phi(2, lambda) / psi(2, lambda)`.
pub fn string_weyl_lambda(d: &DiscreteString, lambda: C64) -> Result<C64> {
    let polys = string_polynomials(d);
    let den = polys.psi.eval(lambda);
    if den.is_zero() {
        return Err(Error::PoleProximity { index: 0, distance: 0.0 });
    }
    Ok(-polys.phi.eval(lambda) / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StringSpectralData {
    /// Zeros of `psi(2, lambda)`, ascending.
    pub dirichlet: Vec<f64>,
    /// Zeros of `phi'(2, lambda)`, ascending.
    pub neumann: Vec<f64>,
    /// Weyl function in `z = -1/lambda`, constant term included.
    pub weyl: WeylRational,
    pub polynomials: StringPolynomials,
}

impl StringSpectralData {
    /// Pole moduli `|z_k|`, ascending.
    pub fn pole_moduli(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.weyl.poles().iter().map(|z| z.norm()).collect();
        m.sort_by(f64::total_cmp);
        m
    }
}

const ROOT_IMAG_TOL: f64 = 1e-8;

pub fn spectra(d: &DiscreteString) -> Result<(Vec<f64>, Vec<f64>)> {
    let polys = string_polynomials(d);
    spectra_of(&polys)
}

fn spectra_of(polys: &StringPolynomials) -> Result<(Vec<f64>, Vec<f64>)> {
    if polys.psi.is_zero() {
        return Err(Error::DegenerateString);
    }
    let dirichlet = polys.psi.real_roots(ROOT_IMAG_TOL)?;
    let neumann = if polys.dphi.is_zero() { Vec::new() } else { polys.dphi.real_roots(ROOT_IMAG_TOL)? };
    Ok((dirichlet, neumann))
}

/// Spectra and the Weyl function `chi(z) = c + sum rho_k / (z_k - z)` with
/// `z_k = -1/lambda_k` and `rho_k = phi(lambda_k) z_k^2 / psi'(lambda_k)`.
///
/// The constant is measured rather than assumed: it is the mean of
/// `chi(z) - sum rho_k/(z_k - z)` at a few sample points.
pub fn string_weyl(d: &DiscreteString) -> Result<StringSpectralData> {
    let polys = string_polynomials(d);
    let (dirichlet, neumann) = spectra_of(&polys)?;
    let dpsi_lambda = polys.psi.derivative();
    let mut poles = Vec::with_capacity(dirichlet.len());
    let mut residues = Vec::with_capacity(dirichlet.len());
    for &lam in &dirichlet {
        if lam == 0.0 {
            return Err(Error::DegenerateString);
        }
        let l = C64::new(lam, 0.0);
        let z = -l.inv();
        poles.push(z);
        residues.push(polys.phi.eval(l) * z * z / dpsi_lambda.eval(l));
    }
    let rational = if poles.is_empty() {
        WeylRational::constant(C64::zero())
    } else {
        WeylRational::from_pole_residue(poles, residues, C64::zero())?
    };
    let samples = [C64::new(0.3, 1.0), C64::new(-1.7, 0.6), C64::new(2.0, -1.5)];
    let mut c = C64::zero();
    for &z in &samples {
        let lambda = -z.inv();
        let exact = -polys.phi.eval(lambda) / polys.psi.eval(lambda);
        let partial = if rational.is_empty() { C64::zero() } else { rational.evaluate(z)? };
        c += exact - partial;
    }
    let c = c / samples.len() as f64;
    let weyl = if rational.is_empty() {
        WeylRational::constant(c)
    } else {
        WeylRational::in_order(rational.poles().to_vec(), rational.residues().to_vec(), c)?
    };
    Ok(StringSpectralData { dirichlet, neumann, weyl, polynomials: polys })
}

/// Peakon equations `x_i' = sum_j p_j E_ij`, `p_i' = sum_j p_i p_j sgn(x_i - x_j) E_ij`,
/// `E_ij = e^{-|x_i - x_j|}`, on the packed vector `(x, p)`.
pub fn peakon_vector_field(y: &[f64], dy: &mut [f64]) {
    let n = y.len() / 2;
    let (x, p) = y.split_at(n);
    for i in 0..n {
        let (mut vx, mut vp) = (0.0, 0.0);
        for j in 0..n {
            let d = x[i] - x[j];
            let e = (-d.abs()).exp();
            vx += p[j] * e;
            if j != i {
                vp += p[i] * p[j] * d.signum() * e;
            }
        }
        dy[i] = vx;
        dy[n + i] = vp;
    }
}

/// Sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakonTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PeakonState>,
}

/// RK4 integration over `[0, t_end]`, recording `samples + 1` evenly spaced states.
pub fn peakon_flow(s: &PeakonState, t_end: f64, dt: f64, samples: usize) -> Result<PeakonTrajectory> {
    peakon_flow_perturbed(s, t_end, dt, samples, |_, _| {})
}

/// As [`peakon_flow`] with `perturb(y, dy)` applied after the vector field.
pub fn peakon_flow_perturbed<F>(
    s: &PeakonState,
    t_end: f64,
    dt: f64,
    samples: usize,
    mut perturb: F,
) -> Result<PeakonTrajectory>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::StepSize);
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidConfig("final time must be nonnegative"));
    }
    let samples = samples.max(1);
    let n = s.len();
    let mut y: Vec<f64> = s.x.iter().chain(&s.p).copied().collect();
    let (steps, h) = if t_end == 0.0 { (0, 0.0) } else { step_plan(t_end, dt) };
    let mut rk = Rk4::new(2 * n);
    let mut times = vec![0.0];
    let mut states = vec![s.clone()];
    let mut next_sample = 1;
    for k in 1..=steps {
        rk.step(&mut y, h, |y, dy| {
            peakon_vector_field(y, dy);
            perturb(y, dy);
        });
        for i in 1..n {
            if !(y[i] - y[i - 1] >= COLLISION_GAP) {
                return Err(Error::CollisionDetected(i - 1, i));
            }
        }
        // Sample when k crosses the next of `samples` evenly spaced marks.
        while next_sample <= samples && k * samples >= next_sample * steps {
            times.push(k as f64 * h);
            states.push(PeakonState { x: y[..n].to_vec(), p: y[n..].to_vec() });
            next_sample += 1;
        }
    }
    Ok(PeakonTrajectory { times, states })
}

/// `max_k max_t |lambda_k(t) / lambda_k(0) - 1|` over the Dirichlet spectrum.
pub fn isospectral_drift(traj: &PeakonTrajectory) -> Result<f64> {
    let first = match traj.states.first() {
        Some(s) => s,
        None => return Ok(0.0),
    };
    let reference = spectra(&peakons_to_string(first)?)?.0;
    let mut worst = 0.0f64;
    for s in &traj.states[1..] {
        let lam = spectra(&peakons_to_string(s)?)?.0;
        if lam.len() != reference.len() {
            return Err(Error::RootFindingFailure);
        }
        for (a, b) in lam.iter().zip(&reference) {
            worst = worst.max((a / b - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Canonical tensor `{x_i, p_j} = delta_ij` on `(x, p)`.
pub fn canonical_tensor(n: usize) -> RMatrix {
    RMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n && i < n {
            1.0
        } else if i == j + n && j < n {
            -1.0
        } else {
            0.0
        }
    })
}

/// Constant-stripped Weyl coordinates `(z, rho)` of a peakon state.
pub fn weyl_coordinates(s: &PeakonState) -> Result<Vec<C64>> {
    Ok(string_weyl(&peakons_to_string(s)?)?.weyl.coordinates())
}

/// Central-difference Jacobian of `(x, p) -> (z, rho)` (constant stripped).
pub fn spectral_jacobian(s: &PeakonState, step: f64) -> Result<CMatrix> {
    let n = s.len();
    let base: Vec<f64> = s.x.iter().chain(&s.p).copied().collect();
    let mut jac = CMatrix::zeros(2 * n, 2 * n);
    for col in 0..2 * n {
        let h = step * (1.0 + base[col].abs());
        let eval = |delta: f64| -> Result<Vec<C64>> {
            let mut y = base.clone();
            y[col] += delta;
            weyl_coordinates(&PeakonState::new(y[..n].to_vec(), y[n..].to_vec())?)
        };
        let plus = eval(h)?;
        let minus = eval(-h)?;
        for row in 0..2 * n {
            jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Push-forward of the canonical peakon bracket onto the stripped Weyl coordinates.
pub fn canonical_pushforward(s: &PeakonState, step: f64) -> Result<CMatrix> {
    let jac = spectral_jacobian(s, step)?;
    crate::bracket::pushforward(&canonical_tensor(s.len()).to_complex(), &jac)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mass_string() {
        let d = DiscreteString::new(vec![0.0], vec![1.0]).unwrap();
        let polys = string_polynomials(&d);
        assert_eq!(polys.phi, Poly::from_real(&[1.0, -2.0]));
        assert_eq!(polys.psi, Poly::from_real(&[4.0, -4.0]));
        assert_eq!(polys.dphi, Poly::from_real(&[0.0, -1.0]));
        let data = string_weyl(&d).unwrap();
        assert_eq!(data.dirichlet, vec![1.0]);
        assert_eq!(data.neumann, vec![0.0]);
        assert!((data.weyl.poles()[0] + 1.0).norm() < 1e-15);
        assert!((data.weyl.residues()[0] - 0.25).norm() < 1e-15);
        assert!((data.weyl.const_term() + 0.25).norm() < 1e-15);
    }

    #[test]
    fn empty_string_is_constant() {
        let d = DiscreteString::new(vec![], vec![]).unwrap();
        let chi = string_weyl_lambda(&d, C64::new(0.7, 0.2)).unwrap();
        assert_eq!(chi, C64::new(-0.25, 0.0));
    }

    #[test]
    fn conversion_examples() {
        let d = peakons_to_string(&PeakonState::new(vec![0.0], vec![1.0]).unwrap()).unwrap();
        assert_eq!((d.xi()[0], d.masses()[0]), (0.0, 1.0));
        assert!((string_point(50.0, 1.0).0 - 2.0).abs() < 1e-10);
        assert_eq!(PeakonState::new(vec![0.0], vec![-1.0]), Err(Error::MassPositivity(0)));
    }

    #[test]
    fn single_peakon_travels_at_its_momentum() {
        let s = PeakonState::new(vec![0.0], vec![1.0]).unwrap();
        let traj = peakon_flow(&s, 2.0, 1e-3, 4).unwrap();
        let last = traj.states.last().unwrap();
        assert!((last.positions()[0] - 2.0).abs() < 1e-12);
        assert_eq!(last.momenta()[0], 1.0);
        assert_eq!(traj.times.len(), 5);
        assert!((traj.times[4] - 2.0).abs() < 1e-12);
        assert_eq!(peakon_flow(&s, 1.0, 0.0, 1), Err(Error::StepSize));
    }
}
