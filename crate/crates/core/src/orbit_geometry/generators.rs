//! Generating sets and the group definition file.
//!
//! ```json
//! {
//!   "model": {"kind": "real_hyperboloid", "n": 3},
//!   "generators": [
//!     {"label": "a", "matrix": [["3.76", "0", "3.62"], ...]}
//!   ],
//!   "base_point": ["0", "0", "0", "1"]
//! }
//! ```
//!
//! Matrix entries are row-major decimal strings, or `{"re": .., "im": ..}`
//! objects of decimal strings for the complex model. Inverses are computed
//! as `J M* J`. The group is assumed free on the listed generators; `free`
//! records that assumption and is not checked.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{CMat, CVec, IsometryModel};
use super::OrbitError;

/// Largest accepted [`IsometryModel::form_defect`] of a generator.
pub const FORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Generator {
    pub label: String,
    pub matrix: CMat,
    pub inverse: CMat,
}

#[derive(Debug, Clone)]
pub struct GroupGenerators {
    pub model: IsometryModel,
    pub generators: Vec<Generator>,
    pub base_point: Option<CVec>,
    /// Caller's claim that the generators generate a free group.
    pub assumed_free: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(String),
    Complex { re: String, im: String },
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GeneratorEntry {
    label: String,
    matrix: Vec<Vec<Entry>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    model: IsometryModel,
    generators: Vec<GeneratorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base_point: Option<Vec<Entry>>,
    #[serde(default = "default_free")]
    free: bool,
}

fn default_free() -> bool {
    true
}

fn parse_entry(e: &Entry) -> Result<Complex64, OrbitError> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| OrbitError::ParseError(format!("not a finite decimal: {s:?}")))
    };
    match e {
        Entry::Real(s) => Ok(Complex64::new(num(s)?, 0.0)),
        Entry::Complex { re, im } => Ok(Complex64::new(num(re)?, num(im)?)),
    }
}

fn format_entry(v: Complex64, real: bool) -> Entry {
    if real {
        Entry::Real(format!("{:?}", v.re))
    } else {
        Entry::Complex { re: format!("{:?}", v.re), im: format!("{:?}", v.im) }
    }
}

impl GroupGenerators {
    /// Checks shapes and form preservation and computes the inverses.
    pub fn new(model: IsometryModel, labeled: Vec<(String, CMat)>) -> Result<Self, OrbitError> {
        model.validate()?;
        if labeled.is_empty() {
            return Err(OrbitError::InvalidGenerator("no generators".into()));
        }
        let d = model.dim();
        let mut generators = Vec::with_capacity(labeled.len());
        for (label, matrix) in labeled {
            if matrix.shape() != (d, d) {
                return Err(OrbitError::InvalidGenerator(format!(
                    "{label}: shape {:?}, model needs {d}x{d}",
                    matrix.shape()
                )));
            }
            if model.is_real() && matrix.iter().any(|v| v.im != 0.0) {
                return Err(OrbitError::InvalidGenerator(format!("{label}: complex entries in the real model")));
            }
            let defect = model.form_defect(&matrix);
            if !(defect <= FORM_TOLERANCE) {
                return Err(OrbitError::InvalidGenerator(format!("{label}: form defect {defect:.3e}")));
            }
            let inverse = model.isometry_inverse(&matrix);
            generators.push(Generator { label, matrix, inverse });
        }
        Ok(GroupGenerators { model, generators, base_point: None, assumed_free: true })
    }

    pub fn with_base_point(mut self, base: CVec) -> Result<Self, OrbitError> {
        self.model.point_norm(base.as_slice())?;
        self.base_point = Some(base);
        Ok(self)
    }

    pub fn from_json_str(text: &str) -> Result<Self, OrbitError> {
        let file: GroupFile = serde_json::from_str(text).map_err(|e| OrbitError::ParseError(e.to_string()))?;
        let d = file.model.dim();
        let mut labeled = Vec::with_capacity(file.generators.len());
        for g in &file.generators {
            if g.matrix.len() != d || g.matrix.iter().any(|row| row.len() != d) {
                return Err(OrbitError::InvalidGenerator(format!("{}: matrix must be {d}x{d}", g.label)));
            }
            let mut m = CMat::zeros(d, d);
            for (i, row) in g.matrix.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    m[(i, j)] = parse_entry(e)?;
                }
            }
            labeled.push((g.label.clone(), m));
        }
        let mut gens = GroupGenerators::new(file.model, labeled)?;
        gens.assumed_free = file.free;
        if let Some(bp) = &file.base_point {
            let v: Vec<Complex64> = bp.iter().map(parse_entry).collect::<Result<_, _>>()?;
            gens = gens.with_base_point(CVec::from_vec(v))?;
        }
        Ok(gens)
    }

    pub fn from_file(path: &Path) -> Result<Self, OrbitError> {
        let text = std::fs::read_to_string(path).map_err(|e| OrbitError::ParseError(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// The group definition file for these generators.
    pub fn to_json(&self, description: Option<&str>) -> String {
        let real = self.model.is_real();
        let file = GroupFile {
            description: description.map(str::to_owned),
            model: self.model,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorEntry {
                    label: g.label.clone(),
                    matrix: g
                        .matrix
                        .row_iter()
                        .map(|row| row.iter().map(|&v| format_entry(v, real)).collect())
                        .collect(),
                })
                .collect(),
            base_point: self.base_point.as_ref().map(|b| b.iter().map(|&v| format_entry(v, real)).collect()),
            free: self.assumed_free,
        };
        serde_json::to_string_pretty(&file).expect("group file serializes")
    }

    /// Letters `g_0, g_0^-1, g_1, g_1^-1, ...`; letter `k` is inverse to `k ^ 1`.
    pub fn letters(&self) -> Vec<&CMat> {
        self.generators.iter().flat_map(|g| [&g.matrix, &g.inverse]).collect()
    }

    pub fn letter_label(&self, k: usize) -> String {
        let g = &self.generators[k / 2].label;
        if k % 2 == 0 {
            g.clone()
        } else {
            format!("{g}^-1")
        }
    }

    pub fn base(&self) -> CVec {
        self.base_point.clone().unwrap_or_else(|| self.model.base_point())
    }
}

fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Boost of parameter `t` in the `(e_axis, e_n)` plane of `R^(n, 1)`.
pub fn real_boost(n: usize, axis: usize, t: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n + 1, n + 1);
    m[(axis, axis)] = t.cosh();
    m[(n, n)] = t.cosh();
    m[(axis, n)] = t.sinh();
    m[(n, axis)] = t.sinh();
    m
}

/// The cyclic group generated by a translation of length `ell` in `H^n_R`.
pub fn cyclic_boost(n: usize, ell: f64) -> Result<GroupGenerators, OrbitError> {
    if n < 1 || !(ell > 0.0) {
        return Err(OrbitError::DomainError("need n >= 1 and ell > 0".into()));
    }
    GroupGenerators::new(IsometryModel::RealHyperboloid { n }, vec![("a".into(), to_complex(&real_boost(n, 0, ell)))])
}

/// Two translations of length `ell` in `H^2_R` whose axes are `separation`
/// apart: `a` along `e_0` and `b = T a T^-1` with `T` the boost of length
/// `separation` along `e_1`.
pub fn schottky_pair(ell: f64, separation: f64) -> Result<GroupGenerators, OrbitError> {
    if !(ell > 0.0 && separation > 0.0) {
        return Err(OrbitError::DomainError("need ell > 0 and separation > 0".into()));
    }
    let a = real_boost(2, 0, ell);
    let t = real_boost(2, 1, separation);
    let t_inv = real_boost(2, 1, -separation);
    let b = &t * &a * t_inv;
    GroupGenerators::new(
        IsometryModel::RealHyperboloid { n: 2 },
        vec![("a".into(), to_complex(&a)), ("b".into(), to_complex(&b))],
    )
}

/// Image of `g in SL(2, R)` in `SO(2, 1)` under `X -> g X g^T` on the
/// symmetric matrices `X = [[x2 + x0, x1], [x1, x2 - x0]]`, for which
/// `det X = -q(x, x)`.
pub fn sl2_to_so21(g: [[f64; 2]; 2]) -> DMatrix<f64> {
    let to_sym = |x: [f64; 3]| [[x[2] + x[0], x[1]], [x[1], x[2] - x[0]]];
    let from_sym = |s: [[f64; 2]; 2]| [(s[0][0] - s[1][1]) / 2.0, s[0][1], (s[0][0] + s[1][1]) / 2.0];
    let mut m = DMatrix::zeros(3, 3);
    for col in 0..3 {
        let mut e = [0.0; 3];
        e[col] = 1.0;
        let x = to_sym(e);
        let mut gx = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        gx[i][j] += g[i][k] * x[k][l] * g[j][l];
                    }
                }
            }
        }
        for (row, v) in from_sym(gx).into_iter().enumerate() {
            m[(row, col)] = v;
        }
    }
    m
}

/// The once-punctured torus group generated by `[[1, 1], [1, 2]]` and
/// `[[1, -1], [-1, 2]]`, whose commutator is parabolic. It is free of rank
/// two with finite covolume.
pub fn punctured_torus() -> GroupGenerators {
    let a = sl2_to_so21([[1.0, 1.0], [1.0, 2.0]]);
    let b = sl2_to_so21([[1.0, -1.0], [-1.0, 2.0]]);
    GroupGenerators::new(
        IsometryModel::RealHyperboloid { n: 2 },
        vec![("a".into(), to_complex(&a)), ("b".into(), to_complex(&b))],
    )
    .expect("integral SL(2) images preserve the form")
}
