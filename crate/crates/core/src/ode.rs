//! Classical fourth-order Runge–Kutta on real state vectors.

use alloc::vec;
use alloc::vec::Vec;

/// Reusable RK4 stepper for `y' = f(y)`.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Rk4 { k: [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]], tmp: vec![0.0; dim] }
    }

    pub fn step<F>(&mut self, y: &mut [f64], dt: f64, mut f: F)
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        f(y, k1);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        f(tmp, k2);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        f(tmp, k3);
        for i in 0..y.len() {
            tmp[i] = y[i] + dt * k3[i];
        }
        f(tmp, k4);
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Number of RK4 steps and the adjusted step covering `[0, t_end]`.
pub(crate) fn step_plan(t_end: f64, dt: f64) -> (usize, f64) {
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    (steps, t_end / steps as f64)
}
