//! Seeded random states and probe points.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ratfun::WeylRational;
use crate::C64;

pub const POLE_RANGE: (f64, f64) = (0.5, 5.0);
pub const MIN_POLE_SEPARATION: f64 = 0.2;
pub const RESIDUE_RANGE: (f64, f64) = (0.3, 2.0);

/// Deterministic generator of test states.
#[derive(Debug, Clone)]
pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        StateSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Real poles in [0.5, 5] pairwise at least 0.2 apart.
    pub fn real_poles(&mut self, n: usize) -> Vec<f64> {
        assert!(n <= 20, "too many poles for the sampling window");
        let mut poles: Vec<f64> = Vec::with_capacity(n);
        while poles.len() < n {
            let z = self.uniform(POLE_RANGE.0, POLE_RANGE.1);
            if poles.iter().all(|&w| (w - z).abs() >= MIN_POLE_SEPARATION) {
                poles.push(z);
            }
        }
        poles
    }

    /// Random Rat_N state: real poles, positive residues.
    pub fn rat_n(&mut self, n: usize) -> WeylRational {
        let poles = self.real_poles(n);
        let residues: Vec<f64> =
            (0..n).map(|_| self.uniform(RESIDUE_RANGE.0, RESIDUE_RANGE.1)).collect();
        WeylRational::from_real(&poles, &residues).expect("sampled poles are separated")
    }

    /// Random Rat'_N state (residues rescaled to sum to one).
    pub fn rat_n_normalized(&mut self, n: usize) -> WeylRational {
        let chi = self.rat_n(n);
        let total: C64 = chi.residues().iter().sum();
        let residues = chi.residues().iter().map(|r| r / total).collect();
        WeylRational::in_order(chi.poles().to_vec(), residues, C64::new(0.0, 0.0))
            .expect("same poles")
    }

    /// Off-axis points in a box around the poles, at least 0.3 from the real axis.
    pub fn probe_points(&mut self, chi: &WeylRational, count: usize) -> Vec<C64> {
        let (lo, hi) = chi
            .poles()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)));
        let (lo, hi) = if lo.is_finite() { (lo - 1.0, hi + 1.0) } else { (-1.0, 1.0) };
        let mean_im = chi.poles().iter().map(|z| z.im).sum::<f64>() / chi.len().max(1) as f64;
        (0..count)
            .map(|_| {
                let x = self.uniform(lo, hi);
                let y = self.uniform(0.3, 2.0);
                let sign = if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                C64::new(x, mean_im + sign * y)
            })
            .collect()
    }

    /// A pair of distinct probe points.
    pub fn point_pair(&mut self, chi: &WeylRational) -> (C64, C64) {
        loop {
            let v = self.probe_points(chi, 2);
            if (v[0] - v[1]).norm() > 0.1 {
                return (v[0], v[1]);
            }
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.gen()
    }
}
