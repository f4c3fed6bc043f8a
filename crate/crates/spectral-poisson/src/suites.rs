//! Verification suites behind `verify`.
//!
//! Random inputs are drawn sequentially from the seed before any parallel work,
//! so a report depends only on the seed and parameters.

use std::collections::BTreeMap;

use rayon::prelude::*;
use spectral_poisson_core::bracket::{
    bracket_quadrature, residue_at_infinity_quadrature, structure_matrix, third_kind_bracket_closed,
    compare_matrices, BracketSpec, SecondKindWeight,
};
use spectral_poisson_core::kdv::{
    deformed_ah_from, gardner_bracket, hamiltonian_bracket, kdv_vector_field, variational_derivative_chi,
    Monodromy, PerturbationConfig, Sheet,
};
use spectral_poisson_core::peakon::{
    self, isospectral_drift, peakon_flow, peakon_flow_perturbed, peakons_to_string, spectra,
    string_weyl, string_weyl_lambda, DiscreteString, PeakonState,
};
use spectral_poisson_core::sample::StateSampler;
use spectral_poisson_core::toda::{self, flaschka, toda_flow, weyl_from_jacobi, TodaState};
use spectral_poisson_core::verify::{
    antisymmetry_defect, casimir_defect, compatibility_defect, jacobi_defect_of_field, structure_field,
    tampered_antisymmetry_defect, tampered_compatibility_defect, tampered_structure_field, Functional,
    CASIMIR_PROBES,
};
use spectral_poisson_core::{Orientation, WeylRational, C64};

use crate::config::SuiteParams;
use crate::error::AppResult;
use crate::report::{Check, Report};

/// Runs one named suite (names already validated) and wraps it in a report.
pub fn run(suite: &str, params: &SuiteParams) -> AppResult<Report> {
    params.validate()?;
    let checks = match suite {
        "jacobi" => jacobi(params),
        "compat" => compat(params),
        "ch" => ch(params),
        "toda" => toda_suite(params),
        "kdv" => kdv(params),
        other => return Err(crate::error::AppError::config(format!("unknown suite '{other}'"))),
    };
    Ok(Report::new(suite, params.seed, flags(params), checks))
}

/// Conventions that change the numbers in a report.
pub fn flags(p: &SuiteParams) -> BTreeMap<String, String> {
    let orientation = match p.quadrature.orientation {
        Orientation::Clockwise => "clockwise",
        Orientation::CounterClockwise => "counter-clockwise",
    };
    let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    [
        ("pole_circle_orientation", orientation.to_string()),
        ("quadrature_nodes", p.quadrature.nodes.to_string()),
        ("radius_factor", p.quadrature.radius_factor.to_string()),
        ("structure_kernel", "closed-form bracket inside double-contour extraction".into()),
        ("fd_step", p.step.to_string()),
        ("ch_const_term", "stripped (-1/4 removed) before brackets".into()),
        ("ch_pole_sign", "z = -1/lambda (negative poles), moduli also reported".into()),
        ("flaschka", "a_k = exp((q_k - q_{k+1})/2)/2, b_k = -p_k/2".into()),
        ("toda_c2", "log of residue sum of the state".into()),
        ("phi1_weight", "same f = z^n as the bracket".into()),
        ("compare_n", list(&p.compare_n)),
        ("kdv_grid", p.kdv.grid.to_string()),
        ("kdv_perturbation", "gaussian bump, width 0.5 grid spacings, eps 1e-5 (1 + sup|u|)".into()),
        ("kdv_sheet", "|w| <= 1 for Im z > 0 on the plus sheet; base point x = 0".into()),
        ("tamper", p.tamper.to_string()),
        ("tamper_delta", p.tamper_delta.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn spec_label(spec: BracketSpec) -> String {
    match spec {
        BracketSpec::ThirdKind { n } => format!("third-kind n={n}"),
        BracketSpec::SecondKind { weight: SecondKindWeight::One } => "second-kind f=1".into(),
        BracketSpec::SecondKind { weight: SecondKindWeight::Z } => "second-kind f=z".into(),
        BracketSpec::TodaRestricted { n, c2 } => format!("toda-restricted n={n} c2={:.3}", c2 + 0.0),
    }
}

fn jacobi_value(spec: BracketSpec, chi: &WeylRational, p: &SuiteParams) -> spectral_poisson_core::Result<f64> {
    let coords = chi.coordinates();
    if p.tamper {
        jacobi_defect_of_field(&coords, p.step, tampered_structure_field(spec, chi, p.tamper_delta, &p.quadrature)?)
    } else {
        jacobi_defect_of_field(&coords, p.step, structure_field(spec, p.quadrature))
    }
}

fn measured(name: String, tol: f64, r: spectral_poisson_core::Result<f64>) -> Check {
    match r {
        Ok(v) => Check::below(name, v, tol),
        Err(e) => Check::errored(name, Some(tol), e),
    }
}

pub fn jacobi(p: &SuiteParams) -> Vec<Check> {
    let tol = p.tolerances;
    let mut sampler = StateSampler::new(p.seed);
    let mut jobs: Vec<(String, BracketSpec, WeylRational, f64)> = Vec::new();
    for &n in &p.powers {
        for &size in &p.sizes {
            for k in 0..p.states {
                let spec = BracketSpec::ThirdKind { n };
                jobs.push((format!("jacobi {} N={size} #{k}", spec_label(spec)), spec, sampler.rat_n(size), tol.jacobi));
            }
        }
    }
    for weight in [SecondKindWeight::One, SecondKindWeight::Z] {
        for &size in &p.sizes {
            for k in 0..p.states {
                let spec = BracketSpec::SecondKind { weight };
                let name = format!("jacobi {} N={size} #{k}", spec_label(spec));
                jobs.push((name, spec, sampler.rat_n(size), tol.second_kind));
            }
        }
    }
    for &n in p.powers.iter().filter(|&&n| n == 1 || n == 2) {
        for c2 in [0.0, 1.0] {
            for &size in &p.sizes {
                let spec = BracketSpec::TodaRestricted { n, c2 };
                let name = format!("jacobi {} N={size}", spec_label(spec));
                jobs.push((name, spec, sampler.rat_n(size), tol.toda_jacobi));
            }
        }
    }
    let mut checks: Vec<Check> = jobs
        .par_iter()
        .map(|(name, spec, chi, t)| measured(name.clone(), *t, jacobi_value(*spec, chi, p)))
        .collect();

    // Structure-matrix antisymmetry, one state per family and size.
    let mut anti = Vec::new();
    for &size in &p.sizes {
        let chi = sampler.rat_n(size);
        for &n in &p.powers {
            anti.push((BracketSpec::ThirdKind { n }, chi.clone()));
        }
        for weight in [SecondKindWeight::One, SecondKindWeight::Z] {
            anti.push((BracketSpec::SecondKind { weight }, chi.clone()));
        }
    }
    checks.par_extend(anti.par_iter().map(|(spec, chi)| {
        let name = format!("antisymmetry {} N={}", spec_label(*spec), chi.len());
        let r = if p.tamper {
            tampered_antisymmetry_defect(*spec, chi, p.tamper_delta, &p.quadrature)
        } else {
            antisymmetry_defect(*spec, chi, &p.quadrature)
        };
        let r = r.map(|d| d.defect);
        measured(name, tol.antisymmetry, r)
    }));

    checks.extend(closed_form_checks(p, &mut sampler));
    checks
}

/// Quadrature against the closed form on 200 random samples, and the
/// vanishing of the residue at infinity for `n = 0, 1`.
fn closed_form_checks(p: &SuiteParams, sampler: &mut StateSampler) -> Vec<Check> {
    let powers: Vec<u32> = p.powers.iter().copied().filter(|&n| n <= 3).collect();
    if powers.is_empty() {
        return Vec::new();
    }
    let samples: Vec<(u32, WeylRational, C64, C64)> = (0..200)
        .map(|k| {
            let chi = sampler.rat_n(p.sizes[k % p.sizes.len()]);
            let (a, b) = sampler.point_pair(&chi);
            (powers[k % powers.len()], chi, a, b)
        })
        .collect();
    let errors: Vec<spectral_poisson_core::Result<(f64, f64)>> = samples
        .par_iter()
        .map(|(n, chi, a, b)| {
            let spec = BracketSpec::ThirdKind { n: *n };
            let quad = bracket_quadrature(chi, spec, *a, *b, &p.quadrature)?;
            let closed = third_kind_bracket_closed(chi, *a, *b, *n)?;
            let rel = (quad - closed).norm() / closed.norm().max(f64::MIN_POSITIVE);
            let res_inf = if *n <= 1 {
                residue_at_infinity_quadrature(chi, *a, *b, *n, &p.quadrature)?.norm() / closed.norm()
            } else {
                0.0
            };
            Ok((rel, res_inf))
        })
        .collect();
    let mut worst = (0.0f64, 0.0f64);
    for e in errors {
        match e {
            Ok((r, i)) => worst = (worst.0.max(r), worst.1.max(i)),
            Err(e) => return vec![Check::errored("closed form vs quadrature", Some(p.tolerances.closed_form), e)],
        }
    }
    let mut out = vec![Check::below("closed form vs quadrature (200 samples, max rel)", worst.0, p.tolerances.closed_form)];
    if powers.iter().any(|&n| n <= 1) {
        out.push(Check::below("residue at infinity n<=1 (max rel)", worst.1, p.tolerances.closed_form));
    }
    out
}

pub fn compat(p: &SuiteParams) -> Vec<Check> {
    let mut sampler = StateSampler::new(p.seed ^ 0x636f_6d70);
    let mut jobs = Vec::new();
    for (ia, &a) in p.powers.iter().enumerate() {
        for &b in &p.powers[ia + 1..] {
            for k in 0..5 {
                let t = sampler.uniform(-2.0, 2.0);
                let chi = sampler.rat_n(p.sizes[k % p.sizes.len()]);
                jobs.push((a, b, t, chi));
            }
        }
    }
    jobs.par_iter()
        .map(|(a, b, t, chi)| {
            let name = format!("pencil n={a} + t n={b} t={t:.4} N={}", chi.len());
            let (sa, sb) = (BracketSpec::ThirdKind { n: *a }, BracketSpec::ThirdKind { n: *b });
            let r = if p.tamper {
                tampered_compatibility_defect(sa, sb, *t, p.tamper_delta, chi, p.step, &p.quadrature)
            } else {
                compatibility_defect(sa, sb, *t, chi, p.step, &p.quadrature)
            }
            .map(|d| d.defect);
            measured(name, p.tolerances.compat, r)
        })
        .collect()
}

pub fn ch(p: &SuiteParams) -> Vec<Check> {
    let tol = p.tolerances;
    let mut checks = Vec::new();

    // Single unit mass at the centre of the string.
    let single = DiscreteString::new(vec![0.0], vec![1.0]).and_then(|d| {
        let mut worst = 0.0f64;
        for lam in [C64::new(0.3, 0.2), C64::new(-2.0, 0.0), C64::new(5.0, -1.0), C64::new(0.5, 3.0)] {
            let exact = -(C64::new(1.0, 0.0) - lam * 2.0) / (C64::new(4.0, 0.0) - lam * 4.0);
            worst = worst.max((string_weyl_lambda(&d, lam)? - exact).norm());
        }
        Ok(worst)
    });
    checks.push(measured("single-mass Weyl function".into(), tol.ch_weyl, single));

    let state = match PeakonState::new(p.ch.x.clone(), p.ch.p.clone()) {
        Ok(s) => s,
        Err(e) => {
            checks.push(Check::errored("peakon state", None, e));
            return checks;
        }
    };
    match peakons_to_string(&state).and_then(|d| string_weyl(&d)) {
        Ok(data) => {
            let c = data.weyl.const_term();
            checks.push(Check::below("Weyl constant term + 1/4", (c + 0.25).norm(), tol.ch_const));
            let min_res = data.weyl.residues().iter().map(|r| r.re).fold(f64::INFINITY, f64::min);
            let max_im = data.weyl.residues().iter().map(|r| r.im.abs()).fold(0.0, f64::max);
            checks.push(Check::above("residues positive (min)", min_res, 0.0).with("max_abs_imag", max_im));
            let mut row = Check::info_only("pole sign (max real part)", data.weyl.poles().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max));
            for (k, m) in data.pole_moduli().iter().enumerate() {
                row = row.with(&format!("modulus_{k}"), *m);
            }
            checks.push(row);
            match peakon::canonical_pushforward(&state, p.step) {
                Ok(pushed) => {
                    let stripped = data.weyl.without_const();
                    for &n in &p.compare_n {
                        let name = format!("compare canonical pushforward vs third-kind n={n}");
                        let r = structure_matrix(&stripped, BracketSpec::ThirdKind { n }, &p.quadrature)
                            .and_then(|m| compare_matrices(&pushed, &m.entries));
                        checks.push(match r {
                            Ok(c) => Check::info_only(name, c.scaled_deviation)
                                .with("relative_deviation", c.relative_deviation)
                                .with("best_scale_re", c.best_scale.re)
                                .with("best_scale_im", c.best_scale.im),
                            Err(e) => Check::errored(name, None, e),
                        });
                    }
                }
                Err(e) => checks.push(Check::errored("canonical pushforward", None, e)),
            }
        }
        Err(e) => checks.push(Check::errored("string Weyl function", None, e)),
    }

    let flow = if p.tamper {
        let last = 2 * state.len() - 1;
        let delta = p.tamper_delta;
        peakon_flow_perturbed(&state, p.ch.t_end, p.ch.dt, p.ch.samples, move |_, dy| dy[last] += delta)
    } else {
        peakon_flow(&state, p.ch.t_end, p.ch.dt, p.ch.samples)
    };
    match flow {
        Ok(traj) => {
            checks.push(measured("Dirichlet spectrum drift".into(), tol.isospectral, isospectral_drift(&traj)));
            let (h0, m0) = (state.hamiltonian(), state.total_momentum());
            let (mut dh, mut dm) = (0.0f64, 0.0f64);
            for s in &traj.states {
                dh = dh.max((s.hamiltonian() / h0 - 1.0).abs());
                dm = dm.max((s.total_momentum() / m0 - 1.0).abs());
            }
            checks.push(Check::below("Hamiltonian drift (rel)", dh, tol.conservation));
            checks.push(Check::below("total momentum drift (rel)", dm, tol.conservation));
            if let Some(last) = traj.states.last() {
                if let Ok(d) = peakons_to_string(last).and_then(|d| spectra(&d)) {
                    let mut row = Check::info_only("final positions span", last.positions()[last.len() - 1] - last.positions()[0]);
                    for (k, l) in d.0.iter().enumerate() {
                        row = row.with(&format!("lambda_{k}"), *l);
                    }
                    checks.push(row);
                }
            }
        }
        Err(e) => checks.push(Check::errored("peakon flow", Some(tol.isospectral), e)),
    }
    checks
}

fn random_toda(sampler: &mut StateSampler, n: usize) -> TodaState {
    let q = (0..n).map(|_| sampler.uniform(-1.0, 1.0)).collect();
    let p = (0..n).map(|_| sampler.uniform(-1.0, 1.0)).collect();
    TodaState::new(q, p).expect("finite coordinates")
}

pub fn toda_suite(p: &SuiteParams) -> Vec<Check> {
    let tol = p.tolerances;
    let mut sampler = StateSampler::new(p.seed ^ 0x746f_6461);
    let mut checks = Vec::new();

    // (a) weights and R-function positivity.
    let mut sum_err = 0.0f64;
    let mut min_w = f64::INFINITY;
    let mut min_im = f64::INFINITY;
    for k in 0..p.toda.weight_states {
        let s = random_toda(&mut sampler, 1 + k % 6);
        match flaschka(&s).and_then(|j| Ok((weyl_from_jacobi(&j)?, j))) {
            Ok((chi, j)) => {
                sum_err = sum_err.max((j.weights.iter().sum::<f64>() - 1.0).abs());
                min_w = min_w.min(j.weights.iter().copied().fold(f64::INFINITY, f64::min));
                for _ in 0..20 {
                    let lam = C64::new(sampler.uniform(-4.0, 4.0), sampler.uniform(0.01, 3.0));
                    let v = chi.evaluate_unchecked(lam);
                    min_im = min_im.min(v.im / v.norm());
                }
            }
            Err(e) => checks.push(Check::errored(format!("flaschka state #{k}"), None, e)),
        }
    }
    checks.push(Check::below("weights sum to one (max error)", sum_err, tol.weights));
    checks.push(Check::above("weights positive (min)", min_w, 0.0));
    checks.push(Check::above("Im chi / |chi| on upper half plane (min)", min_im, 0.0));

    // (b) Casimirs of the restricted brackets on physical states.
    let mut jobs = Vec::new();
    for k in 0..3 {
        let s = random_toda(&mut sampler, p.toda.size);
        let chi = match flaschka(&s).and_then(|j| weyl_from_jacobi(&j)) {
            Ok(c) => c,
            Err(e) => {
                checks.push(Check::errored("casimir state", None, e));
                continue;
            }
        };
        let c2 = chi.residues().iter().map(|r| r.re).sum::<f64>().ln();
        let probes = sampler.probe_points(&chi, CASIMIR_PROBES);
        for &n in &p.compare_n {
            let spec = if p.tamper { BracketSpec::ThirdKind { n } } else { BracketSpec::TodaRestricted { n, c2 } };
            if n >= 1 {
                jobs.push((format!("casimir Phi1 under {} #{k}", spec_label(spec)), spec, Functional::Phi1 { n }, chi.clone(), probes.clone()));
            }
            jobs.push((format!("casimir Phi2 under {} #{k}", spec_label(spec)), spec, Functional::Phi2, chi.clone(), probes.clone()));
        }
    }
    checks.par_extend(jobs.par_iter().map(|(name, spec, f, chi, probes)| {
        measured(name.clone(), tol.casimir, casimir_defect(*spec, *f, chi, probes, &p.quadrature).map(|r| r.defect))
    }));

    // (c) canonical bracket pushed to (lambda, w).
    let state = random_toda(&mut sampler, p.toda.size);
    match toda::canonical_pushforward(&state, p.step) {
        Ok(pi) => {
            let n = state.len();
            let mut inv = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    inv = inv.max(pi[(i, j)].abs());
                }
            }
            checks.push(Check::below("eigenvalues in involution", inv, tol.involution));
            let anti = pi.add(&pi.transpose()).map(|m| m.max_abs());
            checks.push(measured("pushforward antisymmetry".into(), tol.pushforward_antisymmetry, anti));
        }
        Err(e) => checks.push(Check::errored("canonical pushforward", Some(tol.involution), e)),
    }

    // (d) exploratory comparison with the restricted formula.
    match toda::compare_with_restricted(&state, p.step, &p.compare_n, &p.quadrature) {
        Ok(rows) => {
            let best = rows.iter().min_by(|a, b| a.comparison.scaled_deviation.total_cmp(&b.comparison.scaled_deviation));
            for r in &rows {
                let c = r.comparison;
                checks.push(
                    Check::info_only(format!("compare canonical pushforward vs toda-restricted n={}", r.n), c.relative_deviation)
                        .with("scaled_deviation", c.scaled_deviation)
                        .with("best_scale_re", c.best_scale.re)
                        .with("best_scale_im", c.best_scale.im)
                        .with("c2", r.c2),
                );
            }
            if let Some(b) = best {
                checks.push(Check::info_only("best matching n (by scaled deviation)", b.n as f64));
            }
        }
        Err(e) => checks.push(Check::errored("restricted comparison", None, e)),
    }

    // Isospectral flow.
    let start = random_toda(&mut sampler, p.toda.size);
    match toda_flow(&start, p.toda.t_end, p.toda.dt, 20).and_then(|traj| {
        let j0 = flaschka(&start)?;
        let h0 = start.hamiltonian();
        let (mut de, mut dw, mut dh) = (0.0f64, 0.0f64, 0.0f64);
        for s in &traj.states {
            let j = flaschka(s)?;
            for (a, b) in j.eigenvalues.iter().zip(&j0.eigenvalues) {
                de = de.max((a - b).abs());
            }
            dw = dw.max((j.weights.iter().sum::<f64>() - 1.0).abs());
            dh = dh.max((s.hamiltonian() - h0).abs());
        }
        Ok((de, dw, dh))
    }) {
        Ok((de, dw, dh)) => {
            checks.push(Check::below("flow eigenvalue drift", de, tol.toda_flow));
            checks.push(Check::below("flow weight-sum drift", dw, tol.toda_flow));
            checks.push(Check::below("flow Hamiltonian drift", dh, tol.toda_flow));
        }
        Err(e) => checks.push(Check::errored("toda flow", Some(tol.toda_flow), e)),
    }
    checks
}

/// `(P, Q)` pairs for the bracket identity, away from the real axis where the
/// spectral bands and branch points live.
pub fn kdv_pairs(seed: u64, count: usize) -> Vec<(C64, C64)> {
    let mut s = StateSampler::new(seed ^ 0x006b_6476);
    let point = |s: &mut StateSampler| {
        let sign = if s.uniform(0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };
        C64::new(s.uniform(-1.0, 4.0), sign * s.uniform(0.3, 1.5))
    };
    (0..count)
        .map(|_| loop {
            let (a, b) = (point(&mut s), point(&mut s));
            if (a - b).norm() > 0.3 {
                break (a, b);
            }
        })
        .collect()
}

/// Gardner bracket of `chi(P), chi(Q)` against the deformed Atiyah-Hitchin
/// right-hand side, plus the boundary-corrected diagnostic `rhs/2 + (Omega_P - Omega_Q)/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpbSample {
    pub p: C64,
    pub q: C64,
    pub gardner: C64,
    pub rhs: C64,
    pub relative_error: f64,
    pub corrected_error: f64,
}

pub fn rpb_samples(
    u: &spectral_poisson_core::kdv::PeriodicPotential,
    pairs: &[(C64, C64)],
) -> spectral_poisson_core::Result<Vec<RpbSample>> {
    let cfg = PerturbationConfig::default();
    let points: Vec<C64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let grads: Vec<_> = points
        .par_iter()
        .map(|&z| variational_derivative_chi(u, z, Sheet::Plus, &cfg))
        .collect::<spectral_poisson_core::Result<_>>()?;
    let mono = Monodromy::new(u);
    pairs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let gardner = gardner_bracket(u, &grads[2 * k], &grads[2 * k + 1])?;
            let ma = mono.evaluate(a, Sheet::Plus)?;
            let mb = mono.evaluate(b, Sheet::Plus)?;
            let rhs = deformed_ah_from(&ma, &mb)?;
            let (oa, ob) = (ma.omega.unwrap_or_default(), mb.omega.unwrap_or_default());
            let corrected = rhs * 0.5 + (oa - ob) * 0.25;
            Ok(RpbSample {
                p: a,
                q: b,
                gardner,
                rhs,
                relative_error: (gardner - rhs).norm() / rhs.norm(),
                corrected_error: (gardner - corrected).norm() / corrected.norm(),
            })
        })
        .collect()
}

/// Maximum deviation of `X_0, X_1, X_2` from their closed forms in `u` and its
/// derivatives; `tamper` adds `delta u'''` to `X_1`.
pub fn kdv_field_errors(
    u: &spectral_poisson_core::kdv::PeriodicPotential,
    tamper: Option<f64>,
) -> spectral_poisson_core::Result<[f64; 3]> {
    let d: Vec<Vec<f64>> = (0..=5).map(|k| u.derivative_samples(k)).collect();
    let x0 = kdv_vector_field(u, 0)?;
    let mut x1 = kdv_vector_field(u, 1)?;
    let x2 = kdv_vector_field(u, 2)?;
    if let Some(delta) = tamper {
        for (v, u3) in x1.iter_mut().zip(&d[3]) {
            *v += delta * u3;
        }
    }
    let mut e = [0.0f64; 3];
    for m in 0..d[0].len() {
        let (u0, u1, u2, u3, u5) = (d[0][m], d[1][m], d[2][m], d[3][m], d[5][m]);
        e[0] = e[0].max((x0[m] - u1).abs());
        e[1] = e[1].max((x1[m] - (1.5 * u0 * u1 - 0.25 * u3)).abs());
        let x2e = u5 / 16.0 - 1.25 * u1 * u2 - 0.625 * u0 * u3 + 1.875 * u0 * u0 * u1;
        e[2] = e[2].max((x2[m] - x2e).abs());
    }
    Ok(e)
}

pub fn kdv(p: &SuiteParams) -> Vec<Check> {
    let tol = p.tolerances;
    let mut checks = Vec::new();
    let u = match p.kdv.potential.to_potential(p.kdv.grid) {
        Ok(u) => u,
        Err(e) => {
            checks.push(Check::errored("potential", None, e));
            return checks;
        }
    };
    match kdv_field_errors(&u, p.tamper.then_some(p.tamper_delta)) {
        Ok(e) => {
            for (k, v) in e.iter().enumerate() {
                checks.push(Check::below(format!("hierarchy field X{k}"), *v, tol.kdv_fields));
            }
        }
        Err(e) => checks.push(Check::errored("hierarchy fields", Some(tol.kdv_fields), e)),
    }
    for m in 0..3 {
        for n in m + 1..3 {
            let r = hamiltonian_bracket(&u, m, n).map(f64::abs);
            checks.push(measured(format!("{{H{m}, H{n}}}"), tol.kdv_commute, r));
        }
    }

    let mut sampler = StateSampler::new(p.seed ^ 0x6d6f_6e6f);
    let mono = Monodromy::new(&u);
    let mut det = 0.0f64;
    let mut sheet_sum = 0.0f64;
    let mut failure = None;
    for _ in 0..50 {
        let z = C64::new(sampler.uniform(-1.0, 4.0), sampler.uniform(-2.0, 2.0));
        match mono.evaluate(z, Sheet::Plus).and_then(|a| Ok((a, mono.evaluate(z, Sheet::Minus)?))) {
            Ok((a, b)) => {
                det = det.max((a.det() - 1.0).norm());
                if let (Some(x), Some(y)) = (a.omega, b.omega) {
                    sheet_sum = sheet_sum.max((x + y).norm());
                }
            }
            Err(e) => failure = Some(e),
        }
    }
    if let Some(e) = failure {
        checks.push(Check::errored("monodromy evaluation", Some(tol.monodromy_det), e));
    }
    checks.push(Check::below("det T = 1 (50 points)", det, tol.monodromy_det));
    checks.push(Check::below("Omega summed over sheets", sheet_sum, tol.monodromy_det));

    let pairs = kdv_pairs(p.seed, p.kdv.pairs);
    match rpb_samples(&u, &pairs) {
        Ok(rows) => {
            for (k, r) in rows.iter().enumerate() {
                checks.push(
                    Check::below(format!("bracket identity pair #{k}"), r.relative_error, tol.rpb)
                        .with("p_re", r.p.re)
                        .with("p_im", r.p.im)
                        .with("q_re", r.q.re)
                        .with("q_im", r.q.im)
                        .with("gardner_re", r.gardner.re)
                        .with("gardner_im", r.gardner.im)
                        .with("rhs_re", r.rhs.re)
                        .with("rhs_im", r.rhs.im)
                        .with("boundary_corrected_error", r.corrected_error),
                );
            }
        }
        Err(e) => checks.push(Check::errored("bracket identity", Some(tol.rpb), e)),
    }
    checks
}
