//! Matrix Market files, the JSON pencil format and polynomial coefficient files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::birep::BivarPoly;
use crate::pencil::{HermitianPencil, DEFAULT_HERM_TOL};
use crate::{CMat, Error, Result, C64};

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

/// Parses a dense matrix in Matrix Market `coordinate` or `array` format.
pub fn parse_matrix_market(text: &str, path: &Path) -> Result<CMat> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(path, 1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let coordinate = match words[2].as_str() {
        "coordinate" => true,
        "array" => false,
        f => return Err(parse_err(path, 1, format!("unsupported format {f:?}"))),
    };
    let field = match words[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        f => return Err(parse_err(path, 1, format!("unsupported field {f:?}"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        s => return Err(parse_err(path, 1, format!("unsupported symmetry {s:?}"))),
    };
    let mut data = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));

    let (size_line, size) = data.next().ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    let dims = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| parse_err(path, size_line, format!("bad size line: {e}")))?;
    let (rows, cols) = match (coordinate, dims.as_slice()) {
        (true, &[r, c, _]) | (false, &[r, c]) => (r, c),
        _ => return Err(parse_err(path, size_line, "wrong number of size fields")),
    };
    let mut m = CMat::zeros(rows, cols);

    let value = |toks: &[&str], line: usize| -> Result<C64> {
        let num = |t: &str| t.parse::<f64>().map_err(|e| parse_err(path, line, format!("bad number {t:?}: {e}")));
        match (field, toks) {
            (Field::Real, [re]) => Ok(C64::new(num(re)?, 0.0)),
            (Field::Complex, [re, im]) => Ok(C64::new(num(re)?, num(im)?)),
            _ => Err(parse_err(path, line, "wrong number of value fields")),
        }
    };
    let mirror = |v: C64| match symmetry {
        Symmetry::General => None,
        Symmetry::Symmetric => Some(v),
        Symmetry::Hermitian => Some(v.conj()),
        Symmetry::Skew => Some(-v),
    };

    if coordinate {
        let nnz = dims[2];
        for _ in 0..nnz {
            let (line, l) = data
                .next()
                .ok_or_else(|| parse_err(path, size_line, format!("expected {nnz} entries")))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(parse_err(path, line, "missing indices"));
            }
            let idx = |t: &str| match t.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(parse_err(path, line, format!("bad index {t:?}"))),
            };
            let (i, j) = (idx(toks[0])?, idx(toks[1])?);
            if i >= rows || j >= cols {
                return Err(parse_err(path, line, format!("index ({}, {}) out of range", i + 1, j + 1)));
            }
            let v = value(&toks[2..], line)?;
            m[(i, j)] += v;
            if i != j {
                if let Some(w) = mirror(v) {
                    m[(j, i)] += w;
                }
            }
        }
    } else {
        // Column-major; symmetric variants store the lower triangle only.
        let mut next = || -> Result<C64> {
            let (line, l) = data.next().ok_or_else(|| parse_err(path, size_line, "too few entries"))?;
            value(&l.split_whitespace().collect::<Vec<_>>(), line)
        };
        for j in 0..cols {
            let first = match symmetry {
                Symmetry::General => 0,
                Symmetry::Skew => j + 1,
                _ => j,
            };
            for i in first..rows {
                let v = next()?;
                m[(i, j)] = v;
                if i != j {
                    if let Some(w) = mirror(v) {
                        m[(j, i)] = w;
                    }
                }
            }
        }
    }
    if let Some((line, _)) = data.next() {
        return Err(parse_err(path, line, "unexpected trailing data"));
    }
    Ok(m)
}

pub fn read_matrix_market(path: &Path) -> Result<CMat> {
    parse_matrix_market(&fs::read_to_string(path)?, path)
}

/// Writes `m` as a general complex array, full precision.
pub fn format_matrix_market(m: &CMat) -> String {
    let mut out = String::from("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            let _ = writeln!(out, "{:e} {:e}", z.re, z.im);
        }
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &CMat) -> Result<()> {
    Ok(fs::write(path, format_matrix_market(m))?)
}

/// `{"n": n, "A": [[re, im], ...], "B": [...]}` with row-major entries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilJson {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<[f64; 2]>,
    #[serde(rename = "B")]
    pub b: Vec<[f64; 2]>,
}

impl PencilJson {
    pub fn from_pencil(p: &HermitianPencil) -> Self {
        Self::from_matrices(p.a(), p.b())
    }

    pub fn from_matrices(a: &CMat, b: &CMat) -> Self {
        let flat = |m: &CMat| {
            (0..m.nrows())
                .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
                .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        };
        Self {
            n: a.nrows(),
            a: flat(a),
            b: flat(b),
        }
    }

    pub fn to_matrices(&self) -> Result<(CMat, CMat)> {
        let n = self.n;
        let build = |name: &str, v: &[[f64; 2]]| {
            if v.len() != n * n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has {} entries, expected {}",
                    v.len(),
                    n * n
                )));
            }
            Ok(CMat::from_fn(n, n, |i, j| {
                let [re, im] = v[i * n + j];
                C64::new(re, im)
            }))
        };
        Ok((build("A", &self.a)?, build("B", &self.b)?))
    }

    pub fn to_pencil(&self) -> Result<HermitianPencil> {
        let (a, b) = self.to_matrices()?;
        HermitianPencil::new(a, b, DEFAULT_HERM_TOL)
    }
}

pub fn read_pencil_json(path: &Path) -> Result<HermitianPencil> {
    let parsed: PencilJson = serde_json::from_str(&fs::read_to_string(path)?)?;
    parsed.to_pencil()
}

pub fn write_pencil_json(path: &Path, p: &HermitianPencil) -> Result<()> {
    Ok(fs::write(path, serde_json::to_string(&PencilJson::from_pencil(p))?)?)
}

/// Reads the coefficient matrices from one JSON file (`b = None`) or two
/// Matrix Market files, without any structure check.
pub fn read_matrices(a: &Path, b: Option<&Path>) -> Result<(CMat, CMat)> {
    match b {
        None => serde_json::from_str::<PencilJson>(&fs::read_to_string(a)?)?.to_matrices(),
        Some(b) => Ok((read_matrix_market(a)?, read_matrix_market(b)?)),
    }
}

/// As [`read_matrices`], checked and hermitized.
pub fn read_pencil(a: &Path, b: Option<&Path>) -> Result<HermitianPencil> {
    let (a, b) = read_matrices(a, b)?;
    HermitianPencil::new(a, b, DEFAULT_HERM_TOL)
}

/// Lines `i j a_ij`; blank lines and `#` comments are skipped.
pub fn parse_coefficients(text: &str, path: &Path) -> Result<BivarPoly> {
    let mut terms = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [i, j, a] = toks.as_slice() else {
            return Err(parse_err(path, line, "expected 'i j a_ij'"));
        };
        let exp = |t: &str| t.parse::<usize>().map_err(|_| parse_err(path, line, format!("bad exponent {t:?}")));
        let coeff = a
            .parse::<f64>()
            .map_err(|_| parse_err(path, line, format!("bad coefficient {a:?}")))?;
        terms.push((exp(i)?, exp(j)?, coeff));
    }
    BivarPoly::new(terms)
}

pub fn read_coefficients(path: &Path) -> Result<BivarPoly> {
    parse_coefficients(&fs::read_to_string(path)?, path)
}

pub fn format_coefficients(p: &BivarPoly) -> String {
    let mut out = String::new();
    for i in 0..=3 {
        for j in 0..=3 - i {
            let a = p.coeff(i, j);
            if a != 0.0 {
                let _ = writeln!(out, "{i} {j} {a:e}");
            }
        }
    }
    out
}

/// Real part of a matrix whose imaginary part is exactly zero.
pub fn real_part(m: &CMat) -> Option<DMatrix<f64>> {
    m.iter().all(|z| z.im == 0.0).then(|| m.map(|z| z.re))
}
