//! Periodic grids with Fourier differentiation.
//!
//! Transforms are direct `O(n^2)` sums with a precomputed twiddle table; the
//! grids used here have at most a few thousand points.

use alloc::vec::Vec;

use core::f64::consts::TAU;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone)]
pub struct PeriodicGrid {
    n: usize,
    length: f64,
    twiddle: Vec<C64>,
}

impl PeriodicGrid {
    /// `n` equispaced points `x_m = m length / n` on a period of `length`.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidConfig("grid size must be even and at least 4"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidConfig("period must be positive"));
        }
        let twiddle = (0..n).map(|k| C64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
        Ok(PeriodicGrid { n, length, twiddle })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|m| m as f64 * self.spacing()).collect()
    }

    /// Signed wavenumber index of slot `k` (`k > n/2` wraps to negative).
    pub fn mode(&self, k: usize) -> i64 {
        if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// `f_k = n^{-1} sum_m f_m e^{-2 pi i k m / n}`.
    pub fn forward(&self, f: &[C64]) -> Vec<C64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let s: C64 = f.iter().enumerate().map(|(m, &v)| v * self.twiddle[(k * m) % n].conj()).sum();
                s / n as f64
            })
            .collect()
    }

    /// `f_m = sum_k f_k e^{2 pi i k m / n}`.
    pub fn inverse(&self, coeffs: &[C64]) -> Vec<C64> {
        let n = self.n;
        (0..n)
            .map(|m| coeffs.iter().enumerate().map(|(k, &c)| c * self.twiddle[(k * m) % n]).sum())
            .collect()
    }

    /// `order`-th Fourier derivative. The Nyquist mode is dropped so that the
    /// first derivative is exactly skew under the trapezoid pairing.
    pub fn derivative(&self, f: &[C64], order: u32) -> Vec<C64> {
        let mut c = self.forward(f);
        for (k, ck) in c.iter_mut().enumerate() {
            if 2 * k == self.n {
                *ck = C64::zero();
                continue;
            }
            let kappa = TAU * self.mode(k) as f64 / self.length;
            *ck *= C64::new(0.0, kappa).powu(order);
        }
        self.inverse(&c)
    }

    pub fn derivative_real(&self, f: &[f64], order: u32) -> Vec<f64> {
        let fc: Vec<C64> = f.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.derivative(&fc, order).into_iter().map(|v| v.re).collect()
    }

    /// Trapezoid rule over one period.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        f.iter().sum::<C64>() * self.spacing()
    }

    pub fn integrate_real(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.spacing()
    }

    /// `int a (d/dx) b dx`.
    pub fn skew_pairing(&self, a: &[C64], b: &[C64]) -> C64 {
        let db = self.derivative(b, 1);
        let prod: Vec<C64> = a.iter().zip(&db).map(|(x, y)| x * y).collect();
        self.integrate(&prod)
    }
}
