//! Poisson brackets of evaluation functionals `{chi(p), chi(q)}` on Rat_N and
//! the coordinate structure matrices they induce.
//!
//! Third-kind family (weight `f(z) = z^n`):
//!
//! ```text
//! omega = eps_pq(z) / (p - q) * f(z) chi(z) (chi(p) - chi(q)),
//! eps_pq = (2 pi i)^{-1} [1/(z - p) - 1/(z - q)] dz,
//! ```
//!
//! summed over small circles around the poles of `chi`. The circles are
//! traversed clockwise so that the sum equals `res_p + res_q + res_inf`.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Matrix, Scalar};
use crate::quadrature::{Circle, Orientation, QuadratureConfig};
use crate::ratfun::WeylRational;
use crate::C64;

/// Highest admissible power `n` in `f(z) = z^n`.
pub const MAX_POWER: u32 = 8;

/// Weight of the second-kind brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondKindWeight {
    /// `f(z) = 1`
    One,
    /// `f(z) = z`
    Z,
}

/// Selects a bracket family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BracketSpec {
    ThirdKind { n: u32 },
    SecondKind { weight: SecondKindWeight },
    /// Dirac restriction to `Phi_1 = c_1, Phi_2 = c_2`.
    TodaRestricted { n: u32, c2: f64 },
}

impl BracketSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BracketSpec::ThirdKind { n } | BracketSpec::TodaRestricted { n, .. } if n > MAX_POWER => {
                Err(Error::InvalidSpec("power n exceeds 8"))
            }
            BracketSpec::TodaRestricted { c2, .. } if !c2.is_finite() => {
                Err(Error::InvalidSpec("c2 must be finite"))
            }
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            BracketSpec::ThirdKind { .. } => "ThirdKind",
            BracketSpec::SecondKind { .. } => "SecondKind",
            BracketSpec::TodaRestricted { .. } => "TodaRestricted",
        }
    }
}

/// A point together with the cached values `chi(z)` and `chi'(z)`.
#[derive(Debug, Clone, Copy)]
struct Sample {
    z: C64,
    chi: C64,
    dchi: C64,
}

/// Closed-form bracket kernel for one state.
struct Kernel<'a> {
    chi: &'a WeylRational,
    spec: BracketSpec,
    moments: Vec<C64>,
    toda_factor: f64,
}

impl<'a> Kernel<'a> {
    fn new(chi: &'a WeylRational, spec: BracketSpec) -> Result<Self> {
        spec.validate()?;
        require_rat_n(chi)?;
        let (moments, toda_factor) = match spec {
            BracketSpec::ThirdKind { n } => (chi.moments(n as usize), 0.0),
            BracketSpec::TodaRestricted { n, c2 } => (chi.moments(n as usize), (-c2).exp()),
            BracketSpec::SecondKind { .. } => (Vec::new(), 0.0),
        };
        Ok(Kernel { chi, spec, moments, toda_factor })
    }

    #[inline]
    fn sample(&self, z: C64) -> Sample {
        let dchi = match self.spec {
            BracketSpec::SecondKind { .. } => self.chi.derivative_unchecked(z),
            _ => C64::zero(),
        };
        Sample { z, chi: self.chi.evaluate_unchecked(z), dchi }
    }

    #[inline]
    fn eval(&self, p: &Sample, q: &Sample) -> C64 {
        match self.spec {
            BracketSpec::ThirdKind { n } => third_kind_closed_form(&self.moments, n, p, q),
            BracketSpec::TodaRestricted { n, .. } => {
                third_kind_closed_form(&self.moments, n, p, q)
                    - p.chi * q.chi * self.toda_factor * toda_sum(&self.moments, n, p, q)
            }
            BracketSpec::SecondKind { weight } => {
                let (fp, fq) = match weight {
                    SecondKindWeight::One => (C64::one(), C64::one()),
                    SecondKindWeight::Z => (p.z, q.z),
                };
                fp * p.dchi * q.chi - fq * q.dchi * p.chi
            }
        }
    }
}

fn require_rat_n(chi: &WeylRational) -> Result<()> {
    let c = chi.const_term();
    if c.is_zero() {
        Ok(())
    } else {
        Err(Error::NonzeroConstTerm(c.norm()))
    }
}

fn check_points(chi: &WeylRational, p: C64, q: C64) -> Result<()> {
    if (p - q).norm() <= 1e-14 * (1.0 + p.norm()) {
        return Err(Error::CoincidentPoints);
    }
    chi.check_away_from_poles(p)?;
    chi.check_away_from_poles(q)
}

/// `h_m(p, q) = sum_{a=0}^{m} p^a q^{m-a}`.
#[inline]
fn complete_homogeneous(m: u32, p: C64, q: C64) -> C64 {
    let mut acc = C64::zero();
    let mut pa = C64::one();
    for a in 0..=m {
        acc += pa * q.powu(m - a);
        pa *= p;
    }
    acc
}

/// Residue at infinity of `omega^{z^n}_{pq}` divided by `chi(p) - chi(q)`:
/// `sum_{j + m = n - 2} s_j h_m(p, q)`.
#[inline]
fn infinity_factor(moments: &[C64], n: u32, p: C64, q: C64) -> C64 {
    if n < 2 {
        return C64::zero();
    }
    (0..=n - 2)
        .map(|j| moments[j as usize] * complete_homogeneous(n - 2 - j, p, q))
        .sum()
}

#[inline]
fn third_kind_closed_form(moments: &[C64], n: u32, p: &Sample, q: &Sample) -> C64 {
    let diff = p.chi - q.chi;
    let local = (p.z.powu(n) * p.chi - q.z.powu(n) * q.chi) / (p.z - q.z) * diff;
    local + diff * infinity_factor(moments, n, p.z, q.z)
}

/// `sum_k rho_k z_k^n (1/(z_k - p) - 1/(z_k - q))` through the moments.
#[inline]
fn toda_sum(moments: &[C64], n: u32, p: &Sample, q: &Sample) -> C64 {
    let mut acc = p.z.powu(n) * p.chi - q.z.powu(n) * q.chi;
    for a in 0..n {
        acc += moments[a as usize] * (p.z.powu(n - 1 - a) - q.z.powu(n - 1 - a));
    }
    acc
}

/// Circles around every pole with radius `factor * distance to the nearest
/// other singularity` (other poles and the given extra points).
fn pole_circles(chi: &WeylRational, extra: &[C64], factor: f64) -> Vec<Circle> {
    let poles = chi.poles();
    poles
        .iter()
        .enumerate()
        .map(|(k, &zk)| {
            let mut d = f64::INFINITY;
            for (j, &zj) in poles.iter().enumerate() {
                if j != k {
                    d = d.min((zk - zj).norm());
                }
            }
            for &e in extra {
                d = d.min((zk - e).norm());
            }
            if !d.is_finite() {
                d = zk.norm().max(1.0);
            }
            Circle::new(zk, factor * d)
        })
        .collect()
}

/// `sum_k \oint_{O_k} g(z) dz / (2 pi i)` over the pole circles.
fn sum_over_pole_circles(
    chi: &WeylRational,
    p: C64,
    q: C64,
    cfg: &QuadratureConfig,
    mut density: impl FnMut(C64) -> C64,
) -> Result<C64> {
    cfg.validate()?;
    Ok(pole_circles(chi, &[p, q], cfg.radius_factor)
        .iter()
        .map(|c| c.integrate(cfg.nodes, cfg.orientation, &mut density))
        .sum())
}

/// Third-kind bracket by trapezoid quadrature of the one-form around the poles.
pub fn third_kind_bracket_quadrature(
    chi: &WeylRational,
    p: C64,
    q: C64,
    n: u32,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    BracketSpec::ThirdKind { n }.validate()?;
    third_kind_bracket_quadrature_with(chi, p, q, |z| z.powu(n), cfg)
}

/// Quadrature of `omega^f_{pq}` for an arbitrary entire weight `f`.
pub fn third_kind_bracket_quadrature_with(
    chi: &WeylRational,
    p: C64,
    q: C64,
    f: impl Fn(C64) -> C64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    require_rat_n(chi)?;
    check_points(chi, p, q)?;
    let diff = chi.evaluate_unchecked(p) - chi.evaluate_unchecked(q);
    sum_over_pole_circles(chi, p, q, cfg, |z| {
        let eps = (z - p).inv() - (z - q).inv();
        eps / (p - q) * f(z) * chi.evaluate_unchecked(z) * diff
    })
}

/// `(f(p) chi(p) - f(q) chi(q)) / (p - q) * (chi(p) - chi(q)) + res_inf`.
pub fn third_kind_bracket_closed(chi: &WeylRational, p: C64, q: C64, n: u32) -> Result<C64> {
    bracket(chi, BracketSpec::ThirdKind { n }, p, q)
}

/// Residue at infinity of the third-kind one-form, from the moment expansion.
pub fn residue_at_infinity(chi: &WeylRational, p: C64, q: C64, n: u32) -> Result<C64> {
    BracketSpec::ThirdKind { n }.validate()?;
    require_rat_n(chi)?;
    check_points(chi, p, q)?;
    let diff = chi.evaluate_unchecked(p) - chi.evaluate_unchecked(q);
    Ok(diff * infinity_factor(&chi.moments(n as usize), n, p, q))
}

/// Residue at infinity from a circle of radius `10 * max(|z_k|, |p|, |q|)`.
pub fn residue_at_infinity_quadrature(
    chi: &WeylRational,
    p: C64,
    q: C64,
    n: u32,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    BracketSpec::ThirdKind { n }.validate()?;
    require_rat_n(chi)?;
    check_points(chi, p, q)?;
    cfg.validate()?;
    let r = chi.poles().iter().chain([&p, &q]).fold(1.0f64, |m, z| m.max(z.norm())) * 10.0;
    let diff = chi.evaluate_unchecked(p) - chi.evaluate_unchecked(q);
    // res_inf = -(clockwise-around-infinity) = integral over a large clockwise circle.
    let big = Circle::new(C64::zero(), r);
    // Enough nodes to resolve z^n on the big circle.
    let nodes = cfg.nodes.max(64) * 4;
    Ok(big.integrate(nodes, Orientation::Clockwise, |z| {
        z.powu(n) * chi.evaluate_unchecked(z) * diff / ((z - p) * (z - q))
    }))
}

/// Second-kind bracket: `f(P) chi'(P) chi(Q) - f(Q) chi'(Q) chi(P)`.
pub fn second_kind_bracket(
    chi: &WeylRational,
    p: C64,
    q: C64,
    weight: SecondKindWeight,
) -> Result<C64> {
    bracket(chi, BracketSpec::SecondKind { weight }, p, q)
}

/// Dirac-restricted bracket by quadrature of the modified one-form
/// `eps/(p-q) f chi (chi(p)-chi(q)) - eps f chi chi(p) chi(q) e^{-c2}`.
pub fn toda_restricted_bracket(
    chi: &WeylRational,
    p: C64,
    q: C64,
    n: u32,
    c2: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    BracketSpec::TodaRestricted { n, c2 }.validate()?;
    require_rat_n(chi)?;
    check_points(chi, p, q)?;
    let (cp, cq) = (chi.evaluate_unchecked(p), chi.evaluate_unchecked(q));
    let damp = (-c2).exp();
    sum_over_pole_circles(chi, p, q, cfg, |z| {
        let eps = (z - p).inv() - (z - q).inv();
        let fchi = z.powu(n) * chi.evaluate_unchecked(z);
        eps / (p - q) * fchi * (cp - cq) - eps * fchi * cp * cq * damp
    })
}

/// Closed form of the restricted bracket.
pub fn toda_restricted_bracket_closed(
    chi: &WeylRational,
    p: C64,
    q: C64,
    n: u32,
    c2: f64,
) -> Result<C64> {
    bracket(chi, BracketSpec::TodaRestricted { n, c2 }, p, q)
}

/// Contour sum of the correction one-form `eps f chi chi(p) chi(q) e^{-c2}`, by quadrature.
pub fn toda_correction_quadrature(
    chi: &WeylRational,
    p: C64,
    q: C64,
    n: u32,
    c2: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    BracketSpec::TodaRestricted { n, c2 }.validate()?;
    require_rat_n(chi)?;
    check_points(chi, p, q)?;
    let scale = chi.evaluate_unchecked(p) * chi.evaluate_unchecked(q) * (-c2).exp();
    sum_over_pole_circles(chi, p, q, cfg, |z| {
        ((z - p).inv() - (z - q).inv()) * z.powu(n) * chi.evaluate_unchecked(z) * scale
    })
}

/// Same correction from the pole residues:
/// `-sum_k [1/(z_k-p) - 1/(z_k-q)] f(z_k) (-rho_k) chi(p) chi(q) e^{-c2}` for clockwise circles.
pub fn toda_correction_closed(
    chi: &WeylRational,
    p: C64,
    q: C64,
    n: u32,
    c2: f64,
    orientation: Orientation,
) -> Result<C64> {
    BracketSpec::TodaRestricted { n, c2 }.validate()?;
    require_rat_n(chi)?;
    check_points(chi, p, q)?;
    let scale = chi.evaluate_unchecked(p) * chi.evaluate_unchecked(q) * (-c2).exp();
    let ccw: C64 = chi
        .poles()
        .iter()
        .zip(chi.residues())
        .map(|(&zk, &rk)| ((zk - p).inv() - (zk - q).inv()) * zk.powu(n) * (-rk))
        .sum();
    Ok(ccw * scale * orientation.sign())
}

/// Closed-form bracket `{chi(p), chi(q)}` for any family.
pub fn bracket(chi: &WeylRational, spec: BracketSpec, p: C64, q: C64) -> Result<C64> {
    let kernel = Kernel::new(chi, spec)?;
    check_points(chi, p, q)?;
    Ok(kernel.eval(&kernel.sample(p), &kernel.sample(q)))
}

/// Bracket by contour quadrature; the second-kind family has no quadrature
/// route here and falls back to its closed form.
pub fn bracket_quadrature(
    chi: &WeylRational,
    spec: BracketSpec,
    p: C64,
    q: C64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    match spec {
        BracketSpec::ThirdKind { n } => third_kind_bracket_quadrature(chi, p, q, n, cfg),
        BracketSpec::TodaRestricted { n, c2 } => toda_restricted_bracket(chi, p, q, n, c2, cfg),
        BracketSpec::SecondKind { .. } => bracket(chi, spec, p, q),
    }
}

/// Coordinate Poisson tensor in the order `(z_0..z_{N-1}, rho_0..rho_{N-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrix {
    pub entries: CMatrix,
    pub state: WeylRational,
    pub spec: BracketSpec,
}

impl StructureMatrix {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        self.entries.antisymmetry_defect()
    }
}

/// Structure matrix by double-contour extraction with the closed-form kernel.
///
/// With `A_i = (2 pi i)^{-1} \oint_{O_i} chi dz = -rho_i` and
/// `B_i = (2 pi i)^{-1} \oint_{O_i} z chi dz = -rho_i z_i` (counter-clockwise),
/// the brackets `{A_i, A_j}`, `{A_i, B_j}`, `{B_i, A_j}`, `{B_i, B_j}` are double
/// trapezoid sums of `{chi(p), chi(q)}` over `O_i x O_j`; coordinate brackets follow
/// from `z_i = B_i / A_i`, `rho_i = -A_i`. On the diagonal `q` runs on a concentric
/// circle of half the radius.
pub fn structure_matrix(
    chi: &WeylRational,
    spec: BracketSpec,
    cfg: &QuadratureConfig,
) -> Result<StructureMatrix> {
    let kernel = Kernel::new(chi, spec)?;
    extract(chi, spec, cfg, |sp, sq| kernel.eval(sp, sq), |z| kernel.sample(z))
}

/// As [`structure_matrix`], with every inner bracket itself evaluated by contour
/// quadrature (slow; a cross-check of the closed-form kernel).
pub fn structure_matrix_nested(
    chi: &WeylRational,
    spec: BracketSpec,
    inner: &QuadratureConfig,
    outer: &QuadratureConfig,
) -> Result<StructureMatrix> {
    inner.validate()?;
    let kernel = Kernel::new(chi, spec)?;
    // Inner circles are orientation-corrected so the inner sum is the bracket.
    let inner_cfg = QuadratureConfig { orientation: Orientation::Clockwise, ..*inner };
    let mut failure = None;
    let m = extract(
        chi,
        spec,
        outer,
        |sp, sq| match bracket_quadrature(chi, spec, sp.z, sq.z, &inner_cfg) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                C64::zero()
            }
        },
        |z| kernel.sample(z),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

fn extract(
    chi: &WeylRational,
    spec: BracketSpec,
    cfg: &QuadratureConfig,
    mut eval: impl FnMut(&Sample, &Sample) -> C64,
    sample: impl Fn(C64) -> Sample,
) -> Result<StructureMatrix> {
    cfg.validate()?;
    let n = chi.len();
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    for (k, r) in chi.residues().iter().enumerate() {
        if r.is_zero() {
            return Err(Error::ZeroResidue(k));
        }
    }
    let m = cfg.nodes;
    let circles = pole_circles(chi, &[], cfg.radius_factor);
    let node_samples = |c: &Circle| -> Vec<(Sample, C64)> {
        (0..m)
            .map(|k| {
                let (z, w) = c.node(k, m);
                (sample(z), w)
            })
            .collect()
    };
    let outer: Vec<Vec<(Sample, C64)>> = circles.iter().map(node_samples).collect();
    let inner: Vec<Vec<(Sample, C64)>> = circles
        .iter()
        .map(|c| node_samples(&Circle::new(c.center, 0.5 * c.radius)))
        .collect();

    // Brackets of the functionals (A_0..A_{N-1}, B_0..B_{N-1}).
    let mut functional = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let qs = if i == j { &inner[j] } else { &outer[j] };
            let (mut aa, mut ab, mut ba, mut bb) =
                (C64::zero(), C64::zero(), C64::zero(), C64::zero());
            for (sp, wp) in &outer[i] {
                let (mut row_a, mut row_b) = (C64::zero(), C64::zero());
                for (sq, wq) in qs {
                    let v = eval(sp, sq) * wq;
                    row_a += v;
                    row_b += v * sq.z;
                }
                aa += row_a * wp;
                ab += row_b * wp;
                ba += row_a * wp * sp.z;
                bb += row_b * wp * sp.z;
            }
            functional[(i, j)] = aa;
            functional[(i, n + j)] = ab;
            functional[(n + i, j)] = ba;
            functional[(n + i, n + j)] = bb;
        }
    }

    // Chain rule from (A, B) to (z, rho).
    let mut jac = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let a = -chi.residues()[i];
        let b = a * chi.poles()[i];
        jac[(i, i)] = -b / (a * a);
        jac[(i, n + i)] = a.inv();
        jac[(n + i, i)] = -C64::one();
    }
    Ok(StructureMatrix { entries: functional.congruence(&jac)?, state: chi.clone(), spec })
}

/// `J pi J^T`: the tensor induced through a map with Jacobian `J`.
pub fn pushforward<T: Scalar>(pi_phase: &Matrix<T>, jacobian: &Matrix<T>) -> Result<Matrix<T>> {
    if pi_phase.rows() != pi_phase.cols() {
        return Err(Error::DimensionMismatch { expected: pi_phase.rows(), found: pi_phase.cols() });
    }
    if jacobian.cols() != pi_phase.rows() {
        return Err(Error::DimensionMismatch { expected: pi_phase.rows(), found: jacobian.cols() });
    }
    pi_phase.congruence(jacobian)
}

/// Least-squares comparison of a reference tensor against a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixComparison {
    /// `||ref - cand||_F / ||ref||_F`
    pub relative_deviation: f64,
    /// Scalar `s` minimizing `||ref - s cand||_F`.
    pub best_scale: C64,
    /// `||ref - s cand||_F / ||ref||_F`
    pub scaled_deviation: f64,
}

pub fn compare_matrices(reference: &CMatrix, candidate: &CMatrix) -> Result<MatrixComparison> {
    let diff = reference.sub(candidate)?;
    let norm = reference.frobenius().max(f64::MIN_POSITIVE);
    let (num, den) = reference
        .as_slice()
        .iter()
        .zip(candidate.as_slice())
        .fold((C64::zero(), 0.0), |(num, den), (r, c)| (num + c.conj() * r, den + c.norm_sqr()));
    let best_scale = if den > 0.0 { num / den } else { C64::zero() };
    let scaled = reference.sub(&candidate.scale(best_scale))?;
    Ok(MatrixComparison {
        relative_deviation: diff.frobenius() / norm,
        best_scale,
        scaled_deviation: scaled.frobenius() / norm,
    })
}
