//! Input documents: explicit structure constants, a real Lie algebra with a
//! complex structure, or a catalog name; optionally a metric.
//!
//! Indices are 1-based. Each `C` entry sets `C^up_{i k}` and, unless the
//! swapped entry is listed too, `C^up_{k i} = −value`. `D` entries are set
//! exactly as listed.

use std::path::Path;

use hermitian_torsion::lie_hermitian::{complexify, RealLieData};
use hermitian_torsion::{catalog, CMat, CTensor3, HermMat, HermitianStructure, StructureConstants};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantEntry {
    pub up: usize,
    pub lo: [usize; 2],
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub up: usize,
    pub lo: [usize; 2],
    pub value: f64,
}

/// `[x_a, x_b] = Σ value·x_up` on a real basis of dimension `dim`, with complex structure `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealAlgebraInput {
    pub dim: usize,
    pub f: Vec<BracketEntry>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<ConstantEntry>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<ConstantEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_algebra: Option<RealAlgebraInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::invalid(msg.into())
}

impl InputDocument {
    pub fn catalog(name: &str) -> Self {
        Self {
            catalog: Some(name.to_string()),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("input schema: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Builds the structure and metric. Every failure here is an input error.
    pub fn build(&self) -> Result<HermitianStructure, CliError> {
        let explicit = self.c.is_some() || self.d.is_some();
        let sources = [explicit, self.real_algebra.is_some(), self.catalog.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(invalid("exactly one of (C/D), real_algebra, catalog must be given"));
        }
        let sc = if let Some(name) = &self.catalog {
            catalog::structure(name).map_err(|e| invalid(e.to_string()))?
        } else if let Some(ra) = &self.real_algebra {
            build_real(ra)?
        } else {
            self.build_explicit()?
        };
        if let Some(n) = self.n {
            if n != sc.dim() {
                return Err(invalid(format!("n = {n} but the structure has dimension {}", sc.dim())));
            }
        }
        let report = sc.validate();
        if !report.passed() {
            let failed: Vec<String> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} (residual {:.3e})", c.name, c.residual))
                .collect();
            return Err(invalid(format!("structure failed validation: {}", failed.join(", "))));
        }
        let metric = match &self.metric {
            None => HermMat::identity(sc.dim()),
            Some(rows) => parse_metric(rows, sc.dim())?,
        };
        HermitianStructure::new(sc, metric).map_err(|e| invalid(format!("metric: {e}")))
    }

    fn build_explicit(&self) -> Result<StructureConstants, CliError> {
        let n = self.n.ok_or_else(|| invalid("explicit C/D input needs n"))?;
        if n == 0 || n > hermitian_torsion::MAX_DIM {
            return Err(invalid(format!("n = {n} outside 1..={}", hermitian_torsion::MAX_DIM)));
        }
        let empty = Vec::new();
        let c_entries = self.c.as_ref().unwrap_or(&empty);
        let d_entries = self.d.as_ref().unwrap_or(&empty);
        let mut c = CTensor3::zeros(n);
        let mut listed = std::collections::HashSet::new();
        for e in c_entries {
            let (j, i, k) = index(e, n)?;
            listed.insert((j, i, k));
        }
        for e in c_entries {
            let (j, i, k) = index(e, n)?;
            let v = Complex64::new(e.re, e.im);
            c[(j, i, k)] = v;
            if !listed.contains(&(j, k, i)) {
                c[(j, k, i)] = -v;
            }
        }
        let mut d = CTensor3::zeros(n);
        for e in d_entries {
            let (j, i, k) = index(e, n)?;
            d[(j, i, k)] = Complex64::new(e.re, e.im);
        }
        StructureConstants::new(c, d).map_err(|e| invalid(e.to_string()))
    }
}

fn index(e: &ConstantEntry, n: usize) -> Result<(usize, usize, usize), CliError> {
    let ok = |x: usize| (1..=n).contains(&x);
    if !(ok(e.up) && ok(e.lo[0]) && ok(e.lo[1])) {
        return Err(invalid(format!("index ({}, {:?}) outside 1..={n}", e.up, e.lo)));
    }
    if !e.re.is_finite() || !e.im.is_finite() {
        return Err(invalid("non-finite structure constant"));
    }
    Ok((e.up - 1, e.lo[0] - 1, e.lo[1] - 1))
}

fn build_real(ra: &RealAlgebraInput) -> Result<StructureConstants, CliError> {
    let m = ra.dim;
    if ra.j.len() != m || ra.j.iter().any(|row| row.len() != m) {
        return Err(invalid(format!("J must be {m}×{m}")));
    }
    let j = DMatrix::from_fn(m, m, |r, c| ra.j[r][c]);
    let mut brackets = Vec::with_capacity(ra.f.len());
    for e in &ra.f {
        let ok = |x: usize| (1..=m).contains(&x);
        if !(ok(e.up) && ok(e.lo[0]) && ok(e.lo[1])) || e.lo[0] == e.lo[1] {
            return Err(invalid(format!("bracket index ({}, {:?}) invalid for dimension {m}", e.up, e.lo)));
        }
        brackets.push((e.up - 1, e.lo[0] - 1, e.lo[1] - 1, e.value));
    }
    let rl = RealLieData::from_brackets(m, &brackets, j).map_err(|e| invalid(e.to_string()))?;
    complexify(&rl).map_err(|e| invalid(e.to_string()))
}

fn parse_metric(rows: &[Vec<[f64; 2]>], n: usize) -> Result<HermMat, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(invalid(format!("metric must be {n}×{n}")));
    }
    let m = CMat::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
    HermMat::positive_definite(m).map_err(|e| invalid(format!("metric: {e}")))
}

/// Metric rows as `[re, im]` pairs.
pub fn metric_rows(h: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..h.nrows())
        .map(|i| (0..h.ncols()).map(|j| [h[(i, j)].re, h[(i, j)].im]).collect())
        .collect()
}
