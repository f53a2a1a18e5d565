//! Matrix files and the textual state/channel specifications.
//!
//! A matrix file is a JSON object `{"rows": n, "cols": m, "data": [[re, im], ...]}`
//! with entries in row-major order.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channels::{zoo, KrausChannel, StandardChannel};
use crate::linalg::{c64, ComplexMatrix, ComplexVector};
use crate::states::{DensityOperator, PureState};

/// Failure to read or interpret a specification or file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    /// The offending token or path.
    pub token: String,
    pub reason: String,
}

impl SpecError {
    fn new(token: impl Into<String>, reason: impl fmt::Display) -> Self {
        Self {
            token: token.into(),
            reason: reason.to_string(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad token `{}`: {}", self.token, self.reason)
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.data.len() != self.rows * self.cols {
            return Err(format!(
                "data has {} entries, expected rows*cols = {}",
                self.data.len(),
                self.rows * self.cols
            ));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err("non-finite entry".into());
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |r, c| {
            let [re, im] = self.data[r * self.cols + c];
            c64(re, im)
        }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> std::io::Result<()> {
    fs::write(path, MatrixFile::from_matrix(m).to_json())
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, SpecError> {
    let token = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| SpecError::new(&token, e))?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| SpecError::new(&token, e))?;
    file.to_matrix().map_err(|e| SpecError::new(&token, e))
}

/// Kraus operators from a JSON array of matrix objects, or from a directory of
/// `A_<i>.json` files.
pub fn read_kraus(path: &Path) -> Result<Vec<ComplexMatrix>, SpecError> {
    let token = path.display().to_string();
    if path.is_dir() {
        let mut indexed = Vec::new();
        for entry in fs::read_dir(path).map_err(|e| SpecError::new(&token, e))? {
            let p = entry.map_err(|e| SpecError::new(&token, e))?.path();
            let index = p
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_prefix("A_"))
                .and_then(|n| n.strip_suffix(".json"))
                .and_then(|n| n.parse::<usize>().ok());
            if let Some(i) = index {
                indexed.push((i, p));
            }
        }
        indexed.sort();
        if indexed.is_empty() {
            return Err(SpecError::new(&token, "directory has no A_<i>.json files"));
        }
        return indexed.iter().map(|(_, p)| read_matrix(p)).collect();
    }
    let text = fs::read_to_string(path).map_err(|e| SpecError::new(&token, e))?;
    let files: Vec<MatrixFile> = serde_json::from_str(&text).map_err(|e| SpecError::new(&token, e))?;
    files
        .iter()
        .map(|f| f.to_matrix().map_err(|e| SpecError::new(&token, e)))
        .collect()
}

/// Writes `A_0.json`, `A_1.json`, … into `dir`, creating it if needed.
pub fn write_kraus_dir(dir: &Path, ch: &KrausChannel) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    ch.operators()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let p = dir.join(format!("A_{i}.json"));
            write_matrix(&p, a)?;
            Ok(p)
        })
        .collect()
}

fn split_spec(spec: &str) -> Result<(&str, &str), SpecError> {
    spec.split_once(':')
        .ok_or_else(|| SpecError::new(spec, "expected <kind>:<argument>"))
}

fn file_arg(arg: &str) -> Result<PathBuf, SpecError> {
    arg.strip_prefix('@')
        .filter(|p| !p.is_empty())
        .map(PathBuf::from)
        .ok_or_else(|| SpecError::new(arg, "expected @<file>"))
}

fn parse_number<T: std::str::FromStr>(token: &str) -> Result<T, SpecError>
where
    T::Err: fmt::Display,
{
    token.trim().parse::<T>().map_err(|e| SpecError::new(token, e))
}

/// Input state specification.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    MaxMixed(usize),
    Pure(PathBuf),
    Density(PathBuf),
    /// Uniform mixture of the orthonormal columns of the file's matrix.
    CodeSpace(PathBuf),
}

impl StateSpec {
    pub fn parse(spec: &str) -> Result<Self, SpecError> {
        let (kind, arg) = split_spec(spec)?;
        match kind {
            "maxmixed" => {
                let d: usize = parse_number(arg)?;
                if d == 0 {
                    return Err(SpecError::new(arg, "dimension must be at least 1"));
                }
                Ok(Self::MaxMixed(d))
            }
            "pure" => Ok(Self::Pure(file_arg(arg)?)),
            "density" => Ok(Self::Density(file_arg(arg)?)),
            "codespace" => Ok(Self::CodeSpace(file_arg(arg)?)),
            other => Err(SpecError::new(other, "unknown state kind")),
        }
    }

    pub fn resolve(&self) -> Result<DensityOperator, SpecError> {
        match self {
            Self::MaxMixed(d) => DensityOperator::maximally_mixed(*d).map_err(|e| SpecError::new(d.to_string(), e)),
            Self::Pure(path) => {
                let m = read_matrix(path)?;
                let token = path.display().to_string();
                if m.ncols() != 1 && m.nrows() != 1 {
                    return Err(SpecError::new(token, "pure state must be a single row or column"));
                }
                let v = ComplexVector::from_iterator(m.len(), m.iter().copied());
                let psi = PureState::on_system(v).map_err(|e| SpecError::new(&token, e))?;
                Ok(psi.density())
            }
            Self::Density(path) => {
                let m = read_matrix(path)?;
                DensityOperator::on_system(m).map_err(|e| SpecError::new(path.display().to_string(), e))
            }
            Self::CodeSpace(path) => {
                let m = read_matrix(path)?;
                let token = path.display().to_string();
                let defect = crate::linalg::orthonormality_defect(&m);
                if m.ncols() == 0 || m.ncols() > m.nrows() || defect > 1e-9 {
                    return Err(SpecError::new(token, "code-space columns are not orthonormal"));
                }
                let rho = (&m * m.adjoint()).unscale(m.ncols() as f64);
                DensityOperator::on_system(rho).map_err(|e| SpecError::new(token, e))
            }
        }
    }
}

/// Channel specification.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Standard(StandardChannel),
    Unitary(PathBuf),
    Kraus(PathBuf),
}

impl ChannelSpec {
    pub fn parse(spec: &str) -> Result<Self, SpecError> {
        let (kind, arg) = split_spec(spec)?;
        let prob = |arg: &str| -> Result<f64, SpecError> {
            let p: f64 = parse_number(arg)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(SpecError::new(arg, "parameter must lie in [0, 1]"));
            }
            Ok(p)
        };
        use StandardChannel::*;
        Ok(match kind {
            "identity" => {
                let d: usize = parse_number(arg)?;
                if d == 0 {
                    return Err(SpecError::new(arg, "dimension must be at least 1"));
                }
                Self::Standard(Identity(d))
            }
            "dephasing" => Self::Standard(Dephasing(prob(arg)?)),
            "bitflip" => Self::Standard(BitFlip(prob(arg)?)),
            "depolarizing" => Self::Standard(Depolarizing(prob(arg)?)),
            "amplitude-damping" => Self::Standard(AmplitudeDamping(prob(arg)?)),
            "unitary" => Self::Unitary(file_arg(arg)?),
            "kraus" => Self::Kraus(file_arg(arg)?),
            other => return Err(SpecError::new(other, "unknown channel kind")),
        })
    }

    pub fn resolve(&self) -> Result<KrausChannel, SpecError> {
        match self {
            Self::Standard(s) => zoo(s).map_err(|e| SpecError::new(format!("{s:?}"), e)),
            Self::Unitary(path) => {
                let u = read_matrix(path)?;
                zoo(&StandardChannel::Unitary(u)).map_err(|e| SpecError::new(path.display().to_string(), e))
            }
            Self::Kraus(path) => {
                let ops = read_kraus(path)?;
                KrausChannel::new(ops).map_err(|e| SpecError::new(path.display().to_string(), e))
            }
        }
    }
}

/// Channel spec with a `<p>` placeholder, for sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFamily(String);

impl ChannelFamily {
    pub fn parse(spec: &str) -> Result<Self, SpecError> {
        if !spec.contains("<p>") {
            return Err(SpecError::new(spec, "channel family needs a <p> placeholder"));
        }
        ChannelSpec::parse(&spec.replace("<p>", "0"))?;
        Ok(Self(spec.to_string()))
    }

    pub fn at(&self, p: f64) -> Result<ChannelSpec, SpecError> {
        ChannelSpec::parse(&self.0.replace("<p>", &format!("{p}")))
    }
}

/// `start,stop,steps` grid, inclusive at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepRange {
    pub fn parse(spec: &str) -> Result<Self, SpecError> {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() != 3 {
            return Err(SpecError::new(spec, "expected start,stop,steps"));
        }
        let start: f64 = parse_number(parts[0])?;
        let stop: f64 = parse_number(parts[1])?;
        let steps: usize = parse_number(parts[2])?;
        if steps < 2 {
            return Err(SpecError::new(parts[2], "steps must be at least 2"));
        }
        if !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(SpecError::new(spec, "need finite start <= stop"));
        }
        Ok(Self { start, stop, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }
}
