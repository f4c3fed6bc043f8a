//! JSON and CSV forms of the core types.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spectral_poisson_core::bracket::{BracketSpec, SecondKindWeight, StructureMatrix};
use spectral_poisson_core::kdv::PeriodicPotential;
use spectral_poisson_core::peakon::{PeakonState, PeakonTrajectory};
use spectral_poisson_core::toda::TodaState;
use spectral_poisson_core::{CMatrix, WeylRational, C64};

use crate::error::{AppError, AppResult};

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

/// `{"poles":[[re,im],...],"residues":[[re,im],...],"const":[re,im]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylJson {
    pub poles: Vec<[f64; 2]>,
    pub residues: Vec<[f64; 2]>,
    #[serde(rename = "const", default)]
    pub const_term: [f64; 2],
}

impl From<&WeylRational> for WeylJson {
    fn from(w: &WeylRational) -> Self {
        WeylJson {
            poles: w.poles().iter().copied().map(pair).collect(),
            residues: w.residues().iter().copied().map(pair).collect(),
            const_term: pair(w.const_term()),
        }
    }
}

impl TryFrom<WeylJson> for WeylRational {
    type Error = AppError;

    fn try_from(w: WeylJson) -> AppResult<Self> {
        Ok(WeylRational::from_pole_residue(
            w.poles.into_iter().map(complex).collect(),
            w.residues.into_iter().map(complex).collect(),
            complex(w.const_term),
        )?)
    }
}

/// `{"x":[...],"p":[...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakonJson {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl From<&PeakonState> for PeakonJson {
    fn from(s: &PeakonState) -> Self {
        PeakonJson { x: s.positions().to_vec(), p: s.momenta().to_vec() }
    }
}

impl TryFrom<PeakonJson> for PeakonState {
    type Error = AppError;

    fn try_from(s: PeakonJson) -> AppResult<Self> {
        Ok(PeakonState::new(s.x, s.p)?)
    }
}

/// `{"q":[...],"p":[...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TodaJson {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl From<&TodaState> for TodaJson {
    fn from(s: &TodaState) -> Self {
        TodaJson { q: s.q().to_vec(), p: s.p().to_vec() }
    }
}

impl TryFrom<TodaJson> for TodaState {
    type Error = AppError;

    fn try_from(s: TodaJson) -> AppResult<Self> {
        Ok(TodaState::new(s.q, s.p)?)
    }
}

/// `{"l":..., "fourier":[[j,re,im],...]}`; conjugate partners of listed modes are implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialJson {
    pub l: f64,
    pub fourier: Vec<(i64, f64, f64)>,
}

impl PotentialJson {
    pub fn cosine(l: f64, amplitude: f64) -> Self {
        PotentialJson { l, fourier: vec![(1, 0.5 * amplitude, 0.0)] }
    }

    pub fn to_potential(&self, grid: usize) -> AppResult<PeriodicPotential> {
        let modes = self.fourier.iter().map(|&(j, re, im)| (j, C64::new(re, im))).collect();
        Ok(PeriodicPotential::new(self.l, modes, grid)?)
    }
}

impl From<&PeriodicPotential> for PotentialJson {
    fn from(u: &PeriodicPotential) -> Self {
        PotentialJson {
            l: u.half_period(),
            fourier: u.fourier().iter().filter(|(j, _)| *j >= 0).map(|&(j, c)| (j, c.re, c.im)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum BracketSpecJson {
    ThirdKind { n: u32 },
    SecondKind { weight: WeightJson },
    TodaRestricted { n: u32, c2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightJson {
    One,
    Z,
}

impl From<BracketSpec> for BracketSpecJson {
    fn from(s: BracketSpec) -> Self {
        match s {
            BracketSpec::ThirdKind { n } => BracketSpecJson::ThirdKind { n },
            BracketSpec::SecondKind { weight: SecondKindWeight::One } => {
                BracketSpecJson::SecondKind { weight: WeightJson::One }
            }
            BracketSpec::SecondKind { weight: SecondKindWeight::Z } => {
                BracketSpecJson::SecondKind { weight: WeightJson::Z }
            }
            BracketSpec::TodaRestricted { n, c2 } => BracketSpecJson::TodaRestricted { n, c2 },
        }
    }
}

impl From<BracketSpecJson> for BracketSpec {
    fn from(s: BracketSpecJson) -> Self {
        match s {
            BracketSpecJson::ThirdKind { n } => BracketSpec::ThirdKind { n },
            BracketSpecJson::SecondKind { weight: WeightJson::One } => {
                BracketSpec::SecondKind { weight: SecondKindWeight::One }
            }
            BracketSpecJson::SecondKind { weight: WeightJson::Z } => {
                BracketSpec::SecondKind { weight: SecondKindWeight::Z }
            }
            BracketSpecJson::TodaRestricted { n, c2 } => BracketSpec::TodaRestricted { n, c2 },
        }
    }
}

/// Short command-line form: `third:N`, `second:one`, `second:z`, `toda:N[:C2]`.
pub fn parse_spec(s: &str) -> AppResult<BracketSpec> {
    let bad = || AppError::config(format!("bad bracket spec '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let spec = match parts.as_slice() {
        ["third", n] => BracketSpec::ThirdKind { n: n.parse().map_err(|_| bad())? },
        ["second", w] => match w.to_ascii_lowercase().as_str() {
            "one" | "1" => BracketSpec::SecondKind { weight: SecondKindWeight::One },
            "z" => BracketSpec::SecondKind { weight: SecondKindWeight::Z },
            _ => return Err(bad()),
        },
        ["toda", n] => BracketSpec::TodaRestricted { n: n.parse().map_err(|_| bad())?, c2: 0.0 },
        ["toda", n, c2] => BracketSpec::TodaRestricted {
            n: n.parse().map_err(|_| bad())?,
            c2: c2.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    };
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureMatrixJson {
    pub spec: BracketSpecJson,
    pub state: WeylJson,
    pub dim: usize,
    /// Row-major `[re, im]` entries.
    pub entries: Vec<Vec<[f64; 2]>>,
}

fn rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

impl From<&StructureMatrix> for StructureMatrixJson {
    fn from(m: &StructureMatrix) -> Self {
        StructureMatrixJson {
            spec: m.spec.into(),
            state: (&m.state).into(),
            dim: m.dim(),
            entries: rows(&m.entries),
        }
    }
}

/// Row-major CSV with one `re,im` cell per entry.
pub fn write_matrix_csv<W: Write>(m: &CMatrix, out: W) -> AppResult<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for i in 0..m.rows() {
        w.write_record((0..m.cols()).map(|j| {
            let z = m[(i, j)];
            format!("{:e},{:e}", z.re, z.im)
        }))?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, x_i..., p_i..., lambda_k...` where `lambda` holds the Dirichlet
/// spectrum of each sampled state.
pub fn write_trajectory_csv<W: Write>(
    traj: &PeakonTrajectory,
    spectra: &[Vec<f64>],
    out: W,
) -> AppResult<()> {
    let n = traj.states.first().map_or(0, PeakonState::len);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("x_{i}")));
    header.extend((0..n).map(|i| format!("p_{i}")));
    header.extend((0..n).map(|k| format!("lambda_{k}")));
    w.write_record(&header)?;
    for ((t, s), lam) in traj.times.iter().zip(&traj.states).zip(spectra) {
        let mut row = vec![format!("{t:e}")];
        row.extend(s.positions().iter().map(|v| format!("{v:e}")));
        row.extend(s.momenta().iter().map(|v| format!("{v:e}")));
        row.extend(lam.iter().map(|v| format!("{v:e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Comma-separated list such as `0,1,2`.
pub fn parse_list<T: FromStr>(s: &str) -> AppResult<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| AppError::config(format!("bad list entry '{t}' in '{s}'"))))
        .collect()
}

/// Fourier modes as `j:re:im` separated by commas, e.g. `1:0.15:0,2:0:0.05`.
pub fn parse_fourier(s: &str) -> AppResult<Vec<(i64, f64, f64)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let bad = || AppError::config(format!("bad Fourier mode '{t}'"));
            let f: Vec<&str> = t.trim().split(':').collect();
            match f.as_slice() {
                [j, re] => Ok((j.parse().map_err(|_| bad())?, re.parse().map_err(|_| bad())?, 0.0)),
                [j, re, im] => Ok((
                    j.parse().map_err(|_| bad())?,
                    re.parse().map_err(|_| bad())?,
                    im.parse().map_err(|_| bad())?,
                )),
                _ => Err(bad()),
            }
        })
        .collect()
}
