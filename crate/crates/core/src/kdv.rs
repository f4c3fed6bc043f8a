//! Periodic Schrödinger spectral data `-y'' + u y = z y` and the first KdV
//! Poisson structure.
//!
//! The monodromy `T` maps `(y(0), y'(0))` to `(y(L), y'(L))`, `L = 2l`. The
//! Floquet solution normalized at the base point `0` has `e'/e = i chi` there.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::spectral::PeriodicGrid;
use crate::C64;

pub const DEFAULT_GRID: usize = 256;
/// RK4 steps per period for the fine monodromy; the coarse check uses half.
pub const FINE_STEPS: usize = 4096;
pub const RICHARDSON_TOLERANCE: f64 = 1e-7;
pub const BRANCH_TOLERANCE: f64 = 1e-6;
pub const REALITY_TOLERANCE: f64 = 1e-12;

/// `u(x) = sum_j c_j e^{i pi j x / l}` with `c_{-j} = conj(c_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPotential {
    half_period: f64,
    fourier: Vec<(i64, C64)>,
    grid_size: usize,
}

impl PeriodicPotential {
    /// Missing partners `c_{-j}` are filled in by conjugation; given pairs must agree.
    pub fn new(half_period: f64, fourier: Vec<(i64, C64)>, grid_size: usize) -> Result<Self> {
        if !(half_period > 0.0) || !half_period.is_finite() {
            return Err(Error::InvalidConfig("half period must be positive"));
        }
        if grid_size < 16 || !grid_size.is_power_of_two() {
            return Err(Error::InvalidConfig("grid size must be a power of two >= 16"));
        }
        let mut coeffs: Vec<(i64, C64)> = Vec::new();
        for &(j, c) in &fourier {
            if let Some(slot) = coeffs.iter_mut().find(|(k, _)| *k == j) {
                slot.1 += c;
            } else {
                coeffs.push((j, c));
            }
        }
        let mut worst = 0.0f64;
        let snapshot = coeffs.clone();
        for &(j, c) in &snapshot {
            match snapshot.iter().find(|(k, _)| *k == -j) {
                Some(&(_, partner)) => worst = worst.max((partner - c.conj()).norm()),
                None => coeffs.push((-j, c.conj())),
            }
        }
        if worst > REALITY_TOLERANCE {
            return Err(Error::NonRealPotential(worst));
        }
        coeffs.retain(|(_, c)| !c.is_zero());
        coeffs.sort_by_key(|(j, _)| *j);
        let max_mode = coeffs.iter().map(|(j, _)| j.unsigned_abs()).max().unwrap_or(0);
        if 2 * max_mode as usize >= grid_size {
            return Err(Error::InvalidConfig("grid does not resolve the potential"));
        }
        Ok(PeriodicPotential { half_period, fourier: coeffs, grid_size })
    }

    pub fn zero(half_period: f64, grid_size: usize) -> Result<Self> {
        Self::new(half_period, Vec::new(), grid_size)
    }

    /// `u = a cos(pi x / l)`.
    pub fn cosine(half_period: f64, amplitude: f64, grid_size: usize) -> Result<Self> {
        Self::new(half_period, vec![(1, C64::new(0.5 * amplitude, 0.0))], grid_size)
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_period
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn fourier(&self) -> &[(i64, C64)] {
        &self.fourier
    }

    pub fn grid(&self) -> PeriodicGrid {
        PeriodicGrid::new(self.grid_size, self.period()).expect("validated grid")
    }

    /// `d^order u / dx^order` at `x`, from the Fourier series.
    pub fn derivative_at(&self, x: f64, order: u32) -> f64 {
        let base = PI / self.half_period;
        self.fourier
            .iter()
            .map(|&(j, c)| {
                let k = base * j as f64;
                (c * C64::new(0.0, k).powu(order) * C64::from_polar(1.0, k * x)).re
            })
            .sum()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative_at(x, 0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.fourier.iter().map(|(_, c)| c.norm()).sum()
    }

    /// Samples `u(x_m)` on the analysis grid.
    pub fn samples(&self) -> Vec<f64> {
        self.grid().points().iter().map(|&x| self.value(x)).collect()
    }

    /// Samples of `d^order u` on the analysis grid.
    pub fn derivative_samples(&self, order: u32) -> Vec<f64> {
        self.grid().points().iter().map(|&x| self.derivative_at(x, order)).collect()
    }

    /// `2 FINE_STEPS + 1` samples on `[0, L]` for the integrator.
    fn fine_samples(&self) -> Vec<f64> {
        let h = self.period() / (2 * FINE_STEPS) as f64;
        (0..=2 * FINE_STEPS).map(|i| self.value(i as f64 * h)).collect()
    }
}

/// Root of `w^2 - 2 Delta w + 1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// `|w| <= 1` for `Im z > 0` and in gaps; `chi = +sqrt(z)` at `u = 0`.
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }
}

pub type Transfer = [[C64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyData {
    pub z: C64,
    pub transfer: Transfer,
    /// `trace T / 2`
    pub delta: C64,
    pub w: C64,
    pub sheet: Sheet,
    /// Weyl value at the base point.
    pub chi: C64,
    /// `(w + 1/w) / (w - 1/w)`; `None` within the branch tolerance.
    pub omega: Option<C64>,
}

impl MonodromyData {
    pub fn det(&self) -> C64 {
        let t = &self.transfer;
        t[0][0] * t[1][1] - t[0][1] * t[1][0]
    }
}

/// RK4 transfer matrix over one period with `steps` steps on `fine` samples
/// (`fine` has `2 FINE_STEPS + 1` points; `steps` divides `FINE_STEPS`).
fn transfer(fine: &[f64], period: f64, z: C64, steps: usize) -> Transfer {
    let stride = (fine.len() - 1) / (2 * steps);
    let h = period / steps as f64;
    // State (y1, y1', y2, y2'); y'' = (u - z) y.
    let mut y = [C64::one(), C64::zero(), C64::zero(), C64::one()];
    let rhs = |u: f64, s: &[C64; 4]| -> [C64; 4] {
        let a = C64::new(u, 0.0) - z;
        [s[1], a * s[0], s[3], a * s[2]]
    };
    for k in 0..steps {
        let i = 2 * k * stride;
        let (u0, um, u1) = (fine[i], fine[i + stride], fine[i + 2 * stride]);
        let k1 = rhs(u0, &y);
        let t2 = core::array::from_fn(|j| y[j] + k1[j] * (0.5 * h));
        let k2 = rhs(um, &t2);
        let t3 = core::array::from_fn(|j| y[j] + k2[j] * (0.5 * h));
        let k3 = rhs(um, &t3);
        let t4 = core::array::from_fn(|j| y[j] + k3[j] * h);
        let k4 = rhs(u1, &t4);
        for j in 0..4 {
            y[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
        }
    }
    [[y[0], y[2]], [y[1], y[3]]]
}

/// Fine/coarse transfer with a Richardson consistency check; returns the extrapolated matrix.
fn checked_transfer(fine: &[f64], period: f64, z: C64) -> Result<Transfer> {
    let t_f = transfer(fine, period, z, FINE_STEPS);
    let t_c = transfer(fine, period, z, FINE_STEPS / 2);
    let mut diff = 0.0f64;
    let mut size = 1.0f64;
    let mut out = t_f;
    for i in 0..2 {
        for j in 0..2 {
            diff = diff.max((t_f[i][j] - t_c[i][j]).norm());
            size = size.max(t_f[i][j].norm());
            out[i][j] = t_f[i][j] + (t_f[i][j] - t_c[i][j]) / 15.0;
        }
    }
    let rel = diff / size;
    if rel > RICHARDSON_TOLERANCE {
        return Err(Error::StepResolution(rel));
    }
    Ok(out)
}

/// Both Floquet multipliers, ordered `(|w| <= 1, |w| >= 1)`.
fn multipliers(delta: C64) -> (C64, C64) {
    let s = (delta * delta - 1.0).sqrt();
    let (a, b) = (delta + s, delta - s);
    let big = if a.norm() >= b.norm() { a } else { b };
    (big.inv(), big)
}

fn assemble(z: C64, t: Transfer, sheet: Sheet, w_plus: C64) -> MonodromyData {
    let delta = (t[0][0] + t[1][1]) * 0.5;
    let w = match sheet {
        Sheet::Plus => w_plus,
        Sheet::Minus => w_plus.inv(),
    };
    let i = C64::i();
    // Two algebraically equal forms; use the better-conditioned denominator.
    let chi = if t[0][1].norm() >= (w - t[1][1]).norm() {
        (w - t[0][0]) / (i * t[0][1])
    } else {
        t[1][0] / (i * (w - t[1][1]))
    };
    let omega = if (delta * delta - 1.0).norm() < BRANCH_TOLERANCE {
        None
    } else {
        let winv = w.inv();
        Some((w + winv) / (w - winv))
    };
    MonodromyData { z, transfer: t, delta, w, sheet, chi, omega }
}

/// Precomputed integrator for one potential.
#[derive(Debug, Clone)]
pub struct Monodromy {
    period: f64,
    fine: Vec<f64>,
}

impl Monodromy {
    pub fn new(u: &PeriodicPotential) -> Self {
        Monodromy { period: u.period(), fine: u.fine_samples() }
    }

    fn with_samples(period: f64, fine: Vec<f64>) -> Self {
        Monodromy { period, fine }
    }

    pub fn transfer(&self, z: C64) -> Result<Transfer> {
        checked_transfer(&self.fine, self.period, z)
    }

    /// Multiplier on the `Plus` sheet. On the real axis inside a band both roots
    /// are unimodular and the choice is continued from `z + i eta`.
    fn plus_multiplier(&self, z: C64, t: &Transfer) -> Result<C64> {
        let delta = (t[0][0] + t[1][1]) * 0.5;
        let (small, big) = multipliers(delta);
        if z.im > 0.0 {
            return Ok(small);
        }
        if z.im < 0.0 {
            return Ok(big);
        }
        if (small.norm() - 1.0).abs() > 1e-9 {
            return Ok(small);
        }
        let eta = 1e-7 * (1.0 + z.norm());
        let t_up = self.transfer(z + C64::new(0.0, eta))?;
        let reference = multipliers((t_up[0][0] + t_up[1][1]) * 0.5).0;
        Ok(if (small - reference).norm() <= (big - reference).norm() { small } else { big })
    }

    pub fn evaluate(&self, z: C64, sheet: Sheet) -> Result<MonodromyData> {
        let t = self.transfer(z)?;
        let w_plus = self.plus_multiplier(z, &t)?;
        Ok(assemble(z, t, sheet, w_plus))
    }

    pub fn chi(&self, z: C64, sheet: Sheet) -> Result<C64> {
        Ok(self.evaluate(z, sheet)?.chi)
    }
}

pub fn monodromy(u: &PeriodicPotential, z: C64, sheet: Sheet) -> Result<MonodromyData> {
    Monodromy::new(u).evaluate(z, sheet)
}

pub fn omega_factor(u: &PeriodicPotential, z: C64, sheet: Sheet) -> Result<C64> {
    let m = monodromy(u, z, sheet)?;
    m.omega.ok_or(Error::BranchProximity((m.delta * m.delta - 1.0).norm()))
}

/// `dp/dz = (1/i) d log w / dz = Delta' / (i (w - Delta))`, with `Delta'` by a
/// central difference in `z`.
pub fn quasi_momentum_derivative(u: &PeriodicPotential, z: C64, sheet: Sheet) -> Result<C64> {
    let mono = Monodromy::new(u);
    let m = mono.evaluate(z, sheet)?;
    let h = 1e-5 * (1.0 + z.norm());
    let d = |zz: C64| -> Result<C64> {
        let t = mono.transfer(zz)?;
        Ok((t[0][0] + t[1][1]) * 0.5)
    };
    let ddelta = (d(z + h)? - d(z - h)?) / (2.0 * h);
    Ok(ddelta / (C64::i() * (m.w - m.delta)))
}

/// Periodic Gaussian of unit trapezoid integral on the fine grid, centred at index 0.
fn fine_bump(period: f64, width: f64) -> Vec<f64> {
    let n = 2 * FINE_STEPS;
    let h = period / n as f64;
    let mut b: Vec<f64> = (0..n)
        .map(|i| {
            let x = i as f64 * h;
            [x - period, x, x + period]
                .iter()
                .map(|d| (-0.5 * (d / width).powi(2)).exp())
                .sum()
        })
        .collect();
    let total: f64 = b.iter().sum::<f64>() * h;
    for v in &mut b {
        *v /= total;
    }
    b
}

/// Options for the grid-perturbation variational derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationConfig {
    /// Relative amplitude; the absolute one is `epsilon (1 + sup|u|)`.
    pub epsilon: f64,
    /// Bump width in units of the analysis grid spacing.
    pub width: f64,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        PerturbationConfig { epsilon: 1e-5, width: 0.5 }
    }
}

/// `delta chi(P) / delta u(x_m)` on the analysis grid: central difference of
/// `chi(P)` under `u -> u +- eps b_m`, `b_m` a narrow periodic bump of unit
/// integral centred at `x_m`.
pub fn variational_derivative_chi(
    u: &PeriodicPotential,
    p: C64,
    sheet: Sheet,
    cfg: &PerturbationConfig,
) -> Result<Vec<C64>> {
    if !(cfg.epsilon > 0.0) || !(cfg.width > 0.0) {
        return Err(Error::InvalidConfig("perturbation parameters must be positive"));
    }
    let g = u.grid_size();
    let period = u.period();
    let base = u.fine_samples();
    let n = 2 * FINE_STEPS;
    let stride = n / g;
    let bump = fine_bump(period, cfg.width * period / g as f64);
    let eps = cfg.epsilon * (1.0 + u.sup_norm());
    let reference = Monodromy::new(u);
    // Fix the multiplier branch from the unperturbed potential.
    let t0 = reference.transfer(p)?;
    let w_ref = reference.plus_multiplier(p, &t0)?;
    let perturbed_chi = |center: usize, sign: f64| -> Result<C64> {
        let mut fine = base.clone();
        for (i, v) in fine.iter_mut().enumerate() {
            *v += sign * eps * bump[(i + n - center % n) % n];
        }
        let mono = Monodromy::with_samples(period, fine);
        let t = mono.transfer(p)?;
        let delta = (t[0][0] + t[1][1]) * 0.5;
        let (small, big) = multipliers(delta);
        let w_plus = if (small - w_ref).norm() <= (big - w_ref).norm() { small } else { big };
        Ok(assemble(p, t, sheet, w_plus).chi)
    };
    (0..g)
        .map(|m| {
            let center = m * stride;
            Ok((perturbed_chi(center, 1.0)? - perturbed_chi(center, -1.0)?) / (2.0 * eps))
        })
        .collect()
}

/// `{A, B} = int (delta A / delta u) d/dx (delta B / delta u) dx` from grid gradients.
pub fn gardner_bracket(u: &PeriodicPotential, grad_a: &[C64], grad_b: &[C64]) -> Result<C64> {
    let g = u.grid_size();
    if grad_a.len() != g || grad_b.len() != g {
        return Err(Error::DimensionMismatch { expected: g, found: grad_a.len().min(grad_b.len()) });
    }
    Ok(u.grid().skew_pairing(grad_a, grad_b))
}

/// `{chi(P), chi(Q)}` under the Gardner bracket.
pub fn gardner_bracket_chi(
    u: &PeriodicPotential,
    p: C64,
    q: C64,
    sheets: (Sheet, Sheet),
    cfg: &PerturbationConfig,
) -> Result<C64> {
    let ga = variational_derivative_chi(u, p, sheets.0, cfg)?;
    let gb = variational_derivative_chi(u, q, sheets.1, cfg)?;
    gardner_bracket(u, &ga, &gb)
}

/// `(chi(P) - chi(Q))^2 / (z_P - z_Q) (Omega(P) + Omega(Q)) / 2`.
pub fn deformed_ah_rhs(u: &PeriodicPotential, p: C64, q: C64, sheets: (Sheet, Sheet)) -> Result<C64> {
    if (p - q).norm() <= 1e-14 * (1.0 + p.norm()) {
        return Err(Error::CoincidentPoints);
    }
    let mono = Monodromy::new(u);
    let mp = mono.evaluate(p, sheets.0)?;
    let mq = mono.evaluate(q, sheets.1)?;
    deformed_ah_from(&mp, &mq)
}

pub fn deformed_ah_from(mp: &MonodromyData, mq: &MonodromyData) -> Result<C64> {
    let op = mp.omega.ok_or(Error::BranchProximity((mp.delta * mp.delta - 1.0).norm()))?;
    let oq = mq.omega.ok_or(Error::BranchProximity((mq.delta * mq.delta - 1.0).norm()))?;
    let d = mp.chi - mq.chi;
    Ok(d * d / (mp.z - mq.z) * (op + oq) * 0.5)
}

/// Hamiltonian densities `L_n(u, u', u'')` and their partials `dL/du^(k)`, `k = 0, 1, 2`.
fn density(n: u32, u: f64, u1: f64, u2: f64) -> (f64, [f64; 3]) {
    match n {
        0 => (0.5 * u * u, [u, 0.0, 0.0]),
        1 => (0.25 * (u * u * u + 0.5 * u1 * u1), [0.75 * u * u, 0.25 * u1, 0.0]),
        _ => (
            (0.5 * u2 * u2 + 5.0 * u * u1 * u1 + 2.5 * u.powi(4)) / 16.0,
            [(5.0 * u1 * u1 + 10.0 * u.powi(3)) / 16.0, 10.0 * u * u1 / 16.0, u2 / 16.0],
        ),
    }
}

fn check_level(n: u32) -> Result<()> {
    if n > 2 {
        Err(Error::InvalidSpec("KdV Hamiltonians are available for n = 0, 1, 2"))
    } else {
        Ok(())
    }
}

/// `H_0 = 1/2 int u^2`, `H_1 = 1/4 int (u^3 + u'^2/2)`,
/// `H_2 = 1/16 int (u''^2/2 + 5 u u'^2 + 5/2 u^4)`.
pub fn kdv_hamiltonian(u: &PeriodicPotential, n: u32) -> Result<f64> {
    check_level(n)?;
    let grid = u.grid();
    let (s0, s1, s2) = (u.samples(), grid.derivative_real(&u.samples(), 1), grid.derivative_real(&u.samples(), 2));
    let dens: Vec<f64> = (0..s0.len()).map(|m| density(n, s0[m], s1[m], s2[m]).0).collect();
    Ok(grid.integrate_real(&dens))
}

/// Euler–Lagrange gradient `sum_k (-1)^k d^k (dL/du^(k))`.
pub fn hamiltonian_gradient(u: &PeriodicPotential, n: u32) -> Result<Vec<f64>> {
    check_level(n)?;
    let grid = u.grid();
    let s0 = u.samples();
    let s1 = grid.derivative_real(&s0, 1);
    let s2 = grid.derivative_real(&s0, 2);
    let partials: Vec<[f64; 3]> = (0..s0.len()).map(|m| density(n, s0[m], s1[m], s2[m]).1).collect();
    let column = |k: usize| -> Vec<f64> { partials.iter().map(|p| p[k]).collect() };
    let mut grad = column(0);
    let d1 = grid.derivative_real(&column(1), 1);
    let d2 = grid.derivative_real(&column(2), 2);
    for m in 0..grad.len() {
        grad[m] += -d1[m] + d2[m];
    }
    Ok(grad)
}

/// `X_n = d/dx (delta H_n / delta u)` on the grid.
pub fn kdv_vector_field(u: &PeriodicPotential, n: u32) -> Result<Vec<f64>> {
    let grad = hamiltonian_gradient(u, n)?;
    Ok(u.grid().derivative_real(&grad, 1))
}

/// `{H_m, H_n}` under the Gardner bracket.
pub fn hamiltonian_bracket(u: &PeriodicPotential, m: u32, n: u32) -> Result<f64> {
    let a: Vec<C64> = hamiltonian_gradient(u, m)?.into_iter().map(|v| C64::new(v, 0.0)).collect();
    let b: Vec<C64> = hamiltonian_gradient(u, n)?.into_iter().map(|v| C64::new(v, 0.0)).collect();
    Ok(gardner_bracket(u, &a, &b)?.re)
}

/// `u = 0` closed forms on the `Plus` sheet: `chi = sqrt z`, `Omega = -i cot(2 l sqrt z)`,
/// `Delta = cos(2 l sqrt z)`.
pub fn free_chi(z: C64) -> C64 {
    z.sqrt()
}

pub fn free_delta(half_period: f64, z: C64) -> C64 {
    (z.sqrt() * (2.0 * half_period)).cos()
}

pub fn free_omega(half_period: f64, z: C64) -> C64 {
    let a = z.sqrt() * (2.0 * half_period);
    -C64::i() * a.cos() / a.sin()
}

/// Exact `delta chi(P) / delta u(x)` at `u = 0` away from the base point:
/// `e^{2 i sqrt(P) x} / (i (w^2 - 1))`, `w = e^{2 i l sqrt P}`.
pub fn free_chi_gradient(half_period: f64, z: C64, x: f64) -> C64 {
    let k = z.sqrt();
    let w = (C64::i() * k * (2.0 * half_period)).exp();
    (C64::i() * k * (2.0 * x)).exp() / (C64::i() * (w * w - 1.0))
}
