//! Dense polynomials with complex coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::C64;

const ABERTH_MAX_ITER: usize = 2000;

/// Polynomial stored by ascending powers: `coeffs[k]` multiplies `z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = Poly::constant(C64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul_linear(r);
        }
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_else(C64::zero)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::zero(), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Multiply by `(z - a)`.
    pub fn mul_linear(&self, a: C64) -> Poly {
        let mut out = vec![C64::zero(); self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k + 1] += c;
            out[k] -= c * a;
        }
        Poly::new(out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C64::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, k: usize| p.coeffs.get(k).copied().unwrap_or_else(C64::zero);
        Poly::new((0..n).map(|k| get(self, k) + get(other, k)).collect())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// All complex roots, by Aberth–Ehrlich iteration followed by Newton polishing.
    ///
    /// Exact zero roots (vanishing low-order coefficients) are split off first.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let deg = match self.degree() {
            None => return Err(Error::RootFindingFailure),
            Some(d) => d,
        };
        let zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let mut out = vec![C64::zero(); zeros];
        if zeros == deg {
            return Ok(out);
        }
        let reduced = Poly::new(self.coeffs[zeros..].to_vec());
        out.extend(reduced.aberth()?);
        Ok(out)
    }

    fn aberth(&self) -> Result<Vec<C64>> {
        let n = self.degree().unwrap_or(0);
        if n == 0 {
            return Ok(Vec::new());
        }
        if n == 1 {
            return Ok(vec![-self.coeffs[0] / self.coeffs[1]]);
        }
        let lead = self.leading();
        let monic: Vec<C64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let p = Poly { coeffs: monic };
        let dp = p.derivative();

        // Geometric-mean radius of the roots as the starting circle.
        let radius = p.coeffs[0].norm().powf(1.0 / n as f64).max(1e-3);
        let mut z: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
            .collect();

        // A root is settled once |p(z)| is within the Horner rounding bound
        // or its correction is negligible.
        let abs_coeffs: Vec<f64> = p.coeffs.iter().map(|c| c.norm()).collect();
        let noise = |z: C64| {
            let r = z.norm();
            abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * r + a) * 8.0 * f64::EPSILON * n as f64
        };
        let mut done = vec![false; n];
        let mut converged = false;
        for _ in 0..ABERTH_MAX_ITER {
            for k in 0..n {
                if done[k] {
                    continue;
                }
                let pk = p.eval(z[k]);
                if pk.norm() <= noise(z[k]) {
                    done[k] = true;
                    continue;
                }
                let ratio = pk / dp.eval(z[k]);
                let repulsion: C64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| (z[k] - z[j]).inv())
                    .sum();
                let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
                if !step.re.is_finite() || !step.im.is_finite() {
                    continue;
                }
                z[k] -= step;
                if step.norm() <= 1e-15 * (1.0 + z[k].norm()) {
                    done[k] = true;
                }
            }
            if done.iter().all(|&d| d) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RootFindingFailure);
        }
        for zk in z.iter_mut() {
            for _ in 0..3 {
                let d = dp.eval(*zk);
                if d.is_zero() {
                    break;
                }
                let step = p.eval(*zk) / d;
                if !step.re.is_finite() || !step.im.is_finite() {
                    break;
                }
                *zk -= step;
            }
        }
        Ok(z)
    }

    /// Roots that are real up to `tol * (1 + |root|)`, sorted ascending.
    pub fn real_roots(&self, tol: f64) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for r in self.roots()? {
            if r.im.abs() > tol * (1.0 + r.norm()) {
                return Err(Error::RootFindingFailure);
            }
            out.push(r.re);
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn expands_roots() {
        let p = Poly::from_roots(&[c(1.0), c(2.0)]);
        assert_eq!(p.coeffs(), &[c(2.0), c(-3.0), c(1.0)]);
        assert_eq!(p.derivative().coeffs(), &[c(-3.0), c(2.0)]);
    }

    #[test]
    fn recovers_complex_roots() {
        let roots = [C64::new(0.5, 1.0), C64::new(0.5, -1.0), c(-2.0), c(3.5), c(0.0)];
        let mut found = Poly::from_roots(&roots).roots().unwrap();
        for r in roots {
            let (idx, d) = found
                .iter()
                .enumerate()
                .map(|(i, f)| (i, (f - r).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < 1e-12, "root {r} off by {d}");
            found.swap_remove(idx);
        }
    }

    #[test]
    fn clustered_real_roots() {
        let roots: Vec<C64> = (1..=8).map(|k| c(1.0 / k as f64)).collect();
        let found = Poly::from_roots(&roots).real_roots(1e-8).unwrap();
        for (f, k) in found.iter().zip((1..=8).rev()) {
            assert!((f - 1.0 / k as f64).abs() < 1e-9, "{f} vs {}", 1.0 / k as f64);
        }
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert_eq!(Poly::zero().roots(), Err(Error::RootFindingFailure));
        assert!(Poly::constant(c(2.0)).roots().unwrap().is_empty());
    }
}
