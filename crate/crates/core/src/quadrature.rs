//! Trapezoid quadrature on circles.
//!
//! For a function analytic in an annulus around the circle, the M-node
//! trapezoid rule converges like `(r / d)^M` where `d` is the distance to
//! the nearest singularity outside (or inside) the contour.

use core::f64::consts::TAU;


use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Clockwise => -1.0,
            Orientation::CounterClockwise => 1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Trapezoid nodes per circle.
    pub nodes: usize,
    /// Circle radius as a fraction of the distance to the nearest other singularity.
    pub radius_factor: f64,
    /// Orientation of the circles around the poles.
    pub orientation: Orientation,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { nodes: 128, radius_factor: 0.25, orientation: Orientation::Clockwise }
    }
}

impl QuadratureConfig {
    pub fn with_nodes(nodes: usize) -> Self {
        QuadratureConfig { nodes, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 32 || !self.nodes.is_power_of_two() {
            return Err(Error::InvalidConfig("quadrature nodes must be a power of two >= 32"));
        }
        if !(self.radius_factor > 0.0 && self.radius_factor < 0.5) {
            return Err(Error::InvalidConfig("radius factor must lie in (0, 0.5)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: C64, radius: f64) -> Self {
        Circle { center, radius }
    }

    /// Node `k` of an `m`-point rule together with its weight for `(2 pi i)^{-1} \oint f dz`
    /// in counter-clockwise orientation.
    #[inline]
    pub fn node(&self, k: usize, m: usize) -> (C64, C64) {
        let offset = C64::from_polar(self.radius, TAU * k as f64 / m as f64);
        (self.center + offset, offset / m as f64)
    }

    /// `(2 pi i)^{-1} \oint f(z) dz` with `m` trapezoid nodes.
    pub fn integrate(
        &self,
        m: usize,
        orientation: Orientation,
        mut f: impl FnMut(C64) -> C64,
    ) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..m {
            let (z, w) = self.node(k, m);
            acc += f(z) * w;
        }
        acc * orientation.sign()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_of_simple_pole() {
        let c = Circle::new(C64::new(1.0, 0.5), 0.3);
        let pole = c.center;
        let v = c.integrate(32, Orientation::CounterClockwise, |z| (z - pole).inv() * 3.0);
        assert!((v - C64::new(3.0, 0.0)).norm() < 1e-14);
        let v = c.integrate(32, Orientation::Clockwise, |z| (z - pole).inv() * 3.0);
        assert!((v + C64::new(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig::with_nodes(48).validate().is_err());
        assert!(QuadratureConfig::with_nodes(16).validate().is_err());
        let overlapping = QuadratureConfig { radius_factor: 0.6, ..Default::default() };
        assert!(overlapping.validate().is_err());
    }
}
