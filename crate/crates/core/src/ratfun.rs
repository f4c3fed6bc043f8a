//! Rational Weyl functions `chi(z) = c + sum_k rho_k / (z_k - z)` with simple poles.
//!
//! Two charts are provided: pole/residue (`WeylRational`) and pole/zero
//! (`PoleZeroForm`, `chi = c - q(z) / p(z)` with `p` monic of degree N).

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::C64;

/// Evaluation is refused closer than this to a pole.
pub const POLE_PROXIMITY: f64 = 1e-10;
/// Poles closer than this fraction of `max |z_k|` are treated as coincident.
pub const DISTINCT_POLE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WeylRational {
    poles: Vec<C64>,
    residues: Vec<C64>,
    const_term: C64,
}

fn cmp_complex(a: &C64, b: &C64) -> core::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl WeylRational {
    /// Builds `c + sum rho_k / (z_k - z)`, sorting poles by real then imaginary part.
    pub fn from_pole_residue(poles: Vec<C64>, residues: Vec<C64>, const_term: C64) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if poles.len() != residues.len() {
            return Err(Error::DimensionMismatch { expected: poles.len(), found: residues.len() });
        }
        let mut pairs: Vec<(C64, C64)> = poles.into_iter().zip(residues).collect();
        pairs.sort_by(|a, b| cmp_complex(&a.0, &b.0));
        let (poles, residues) = pairs.into_iter().unzip();
        Self::in_order(poles, residues, const_term)
    }

    /// Rat_N element (vanishing at infinity) from real poles and residues.
    pub fn from_real(poles: &[f64], residues: &[f64]) -> Result<Self> {
        Self::from_pole_residue(
            poles.iter().map(|&z| C64::new(z, 0.0)).collect(),
            residues.iter().map(|&r| C64::new(r, 0.0)).collect(),
            C64::zero(),
        )
    }

    /// Keeps the given pole order; used by coordinate charts where indices must be stable.
    pub fn in_order(poles: Vec<C64>, residues: Vec<C64>, const_term: C64) -> Result<Self> {
        if poles.len() != residues.len() {
            return Err(Error::DimensionMismatch { expected: poles.len(), found: residues.len() });
        }
        let scale = poles.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for i in 0..poles.len() {
            for j in i + 1..poles.len() {
                if (poles[i] - poles[j]).norm() <= DISTINCT_POLE_RTOL * scale {
                    return Err(Error::DistinctPolesViolated(i, j));
                }
            }
        }
        Ok(WeylRational { poles, residues, const_term })
    }

    /// The constant function (no poles).
    pub fn constant(c: C64) -> Self {
        WeylRational { poles: Vec::new(), residues: Vec::new(), const_term: c }
    }

    /// Pole/residue coordinates `(z_0..z_{N-1}, rho_0..rho_{N-1})`.
    pub fn from_coordinates(coords: &[C64], const_term: C64) -> Result<Self> {
        if !coords.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: coords.len() + 1, found: coords.len() });
        }
        let n = coords.len() / 2;
        Self::in_order(coords[..n].to_vec(), coords[n..].to_vec(), const_term)
    }

    pub fn coordinates(&self) -> Vec<C64> {
        self.poles.iter().chain(&self.residues).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    pub fn residues(&self) -> &[C64] {
        &self.residues
    }

    pub fn const_term(&self) -> C64 {
        self.const_term
    }

    /// Same poles and residues, constant term dropped (the Rat_N part).
    pub fn without_const(&self) -> Self {
        WeylRational { const_term: C64::zero(), ..self.clone() }
    }

    /// Index of and distance to the nearest pole.
    pub fn nearest_pole(&self, z: C64) -> Option<(usize, f64)> {
        self.poles
            .iter()
            .map(|p| (p - z).norm())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub(crate) fn check_away_from_poles(&self, z: C64) -> Result<()> {
        match self.nearest_pole(z) {
            Some((index, distance)) if distance < POLE_PROXIMITY => {
                Err(Error::PoleProximity { index, distance })
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, z: C64) -> Result<C64> {
        self.check_away_from_poles(z)?;
        Ok(self.evaluate_unchecked(z))
    }

    #[inline]
    pub fn evaluate_unchecked(&self, z: C64) -> C64 {
        self.poles
            .iter()
            .zip(&self.residues)
            .fold(self.const_term, |acc, (&zk, &rk)| acc + rk / (zk - z))
    }

    /// `chi'(z) = sum rho_k / (z_k - z)^2`.
    pub fn derivative(&self, z: C64) -> Result<C64> {
        self.check_away_from_poles(z)?;
        Ok(self.derivative_unchecked(z))
    }

    #[inline]
    pub fn derivative_unchecked(&self, z: C64) -> C64 {
        self.poles.iter().zip(&self.residues).fold(C64::zero(), |acc, (&zk, &rk)| {
            let d = zk - z;
            acc + rk / (d * d)
        })
    }

    /// `s_j = sum rho_k z_k^j`; `chi - c = -sum_{j>=0} s_j z^{-j-1}` near infinity.
    pub fn moment(&self, j: u32) -> C64 {
        self.poles
            .iter()
            .zip(&self.residues)
            .fold(C64::zero(), |acc, (&zk, &rk)| acc + rk * zk.powu(j))
    }

    pub fn moments(&self, count: usize) -> Vec<C64> {
        (0..count as u32).map(|j| self.moment(j)).collect()
    }

    /// Gradient of the evaluation functional `chi(q)` in pole/residue coordinates.
    pub fn evaluation_gradient(&self, q: C64) -> Result<Vec<C64>> {
        self.check_away_from_poles(q)?;
        let dz = self.poles.iter().zip(&self.residues).map(|(&zk, &rk)| {
            let d = zk - q;
            -rk / (d * d)
        });
        let drho = self.poles.iter().map(|&zk| (zk - q).inv());
        Ok(dz.chain(drho).collect())
    }

    pub fn to_pole_zero(&self) -> Result<PoleZeroForm> {
        let p = Poly::from_roots(&self.poles);
        let mut q = Poly::zero();
        for (k, &rk) in self.residues.iter().enumerate() {
            let others: Vec<C64> = self
                .poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &z)| z)
                .collect();
            q = q.add(&Poly::from_roots(&others).scale(rk));
        }
        let gammas = if q.degree().unwrap_or(0) == 0 { Vec::new() } else { q.roots()? };
        Ok(PoleZeroForm { p, q, gammas, const_term: self.const_term })
    }
}

/// `chi(z) = c - q(z) / p(z)` with `p` monic.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleZeroForm {
    pub p: Poly,
    pub q: Poly,
    /// Roots of `q`.
    pub gammas: Vec<C64>,
    pub const_term: C64,
}

impl PoleZeroForm {
    /// Leading coefficient of `q`, equal to the residue sum.
    pub fn q0(&self) -> C64 {
        let n = self.p.degree().unwrap_or(0);
        self.q.coeffs().get(n.wrapping_sub(1)).copied().unwrap_or_else(C64::zero)
    }

    pub fn evaluate(&self, z: C64) -> Result<C64> {
        let pz = self.p.eval(z);
        if pz.norm() == 0.0 {
            return Err(Error::PoleProximity { index: 0, distance: 0.0 });
        }
        Ok(self.const_term - self.q.eval(z) / pz)
    }

    pub fn to_pole_residue(&self) -> Result<WeylRational> {
        let poles = self.p.roots()?;
        let dp = self.p.derivative();
        let residues = poles.iter().map(|&z| self.q.eval(z) / dp.eval(z)).collect();
        WeylRational::from_pole_residue(poles, residues, self.const_term)
    }
}
