//! JSON file formats: states, observable sets, reports and fuzz reproducers.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major arrays of
//! rows. Floats are written in shortest round-trip form, so every double
//! re-parses to the identical bit pattern.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, DensityMatrix, HermitianMatrix, RMatrix, Tolerances};
use crate::margin::{Margin, Verdict};
use crate::relations::Evaluation;
use crate::skew::{Determinants, ObservableSet};

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn decode_matrix(rows: &JsonMatrix, what: &str) -> Result<CMatrix> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::InvalidParameter(format!("{what}: empty matrix")));
    }
    let cols = rows[0].len();
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != cols) {
        return Err(Error::InvalidParameter(format!("{what}: row {i} has {} entries, expected {cols}", row.len())));
    }
    if rows.iter().flatten().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(CMatrix::from_fn(r, cols, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

/// `{"re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMatrix {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl SplitMatrix {
    pub fn from_complex(m: &CMatrix) -> Self {
        let part = |f: fn(&num_complex::Complex64) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        SplitMatrix { re: part(|z| z.re), im: part(|z| z.im) }
    }

    pub fn from_real(m: &RMatrix) -> Self {
        SplitMatrix {
            re: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect(),
            im: vec![vec![0.0; m.ncols()]; m.nrows()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix, label: Option<String>) -> Self {
        StateFile { dim: rho.dim(), matrix: encode_matrix(rho.matrix()), label }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let m = decode_matrix(&self.matrix, "state")?;
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.nrows() });
        }
        DensityMatrix::new(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservablesFile {
    pub dim: usize,
    pub observables: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl ObservablesFile {
    pub fn from_set(x: &ObservableSet, labels: Option<Vec<String>>) -> Self {
        ObservablesFile { dim: x.dim(), observables: x.iter().map(|o| encode_matrix(o.matrix())).collect(), labels }
    }

    pub fn to_set(&self) -> Result<ObservableSet> {
        if self.observables.is_empty() {
            return Err(Error::Empty("observable list"));
        }
        let mut out = Vec::with_capacity(self.observables.len());
        for (k, o) in self.observables.iter().enumerate() {
            let m = decode_matrix(o, &format!("observable {k}"))?;
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: m.nrows() });
            }
            out.push(HermitianMatrix::with_tolerance(m, Tolerances::DEFAULT.herm)?);
        }
        ObservableSet::new(out)
    }
}

/// A failing fuzz instance. It parses both as a [`StateFile`] (`dim`,
/// `matrix`) and as an [`ObservablesFile`] (`dim`, `observables`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproducer {
    pub dim: usize,
    pub matrix: JsonMatrix,
    pub observables: Vec<JsonMatrix>,
    pub relation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    pub seed: u64,
    pub trial: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Reproducer {
    pub fn state(&self) -> StateFile {
        StateFile { dim: self.dim, matrix: self.matrix.clone(), label: None }
    }

    pub fn observables(&self) -> ObservablesFile {
        ObservablesFile { dim: self.dim, observables: self.observables.clone(), labels: None }
    }
}

/// One margin with its verdict. A vacuous margin has `value = null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginEntry {
    pub value: Option<f64>,
    pub scale: f64,
    pub verdict: Verdict,
}

impl MarginEntry {
    pub fn new(m: &Margin, tol: &Tolerances) -> Self {
        MarginEntry { value: (!m.is_vacuous()).then_some(m.value), scale: m.scale, verdict: m.verdict(tol) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub state: StateFile,
    pub observables: ObservablesFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observables_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMatrices {
    pub sigma: SplitMatrix,
    pub delta: SplitMatrix,
    pub skew: SplitMatrix,
    pub classical: SplitMatrix,
    pub l: SplitMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub inputs: InputEcho,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    pub matrices: ReportMatrices,
    pub determinants: Determinants,
    pub rank_l: usize,
    pub delta_g: f64,
    pub margins: BTreeMap<String, MarginEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub skipped: BTreeMap<String, String>,
}

impl ReportFile {
    pub fn new(ev: &Evaluation, inputs: InputEcho, tol: &Tolerances, f: Option<String>) -> Self {
        let r = &ev.report;
        ReportFile {
            tool: "skewsharp".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            inputs,
            tolerances: *tol,
            f,
            matrices: ReportMatrices {
                sigma: SplitMatrix::from_real(&r.sigma),
                delta: SplitMatrix::from_real(&r.delta),
                skew: SplitMatrix::from_real(&r.skew),
                classical: SplitMatrix::from_real(&r.classical),
                l: SplitMatrix::from_complex(r.l.matrix()),
            },
            determinants: r.dets,
            rank_l: r.rank_l,
            delta_g: r.delta_g,
            margins: ev.margins.iter().map(|(k, m)| (k.clone(), MarginEntry::new(m, tol))).collect(),
            skipped: ev.skipped.clone(),
        }
    }

    pub fn any_violated(&self) -> bool {
        self.margins.values().any(|m| m.verdict == Verdict::Violated)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::q1;
    use crate::relations::{evaluate, RelationSet};

    #[test]
    fn state_round_trip_is_bit_exact() {
        let rho = DensityMatrix::from_diagonal(&[0.1 + 0.2, 1.0 - (0.1 + 0.2)]).unwrap();
        let text = to_json(&StateFile::from_density(&rho, Some("x".into())));
        let back: StateFile = from_json(&text).unwrap();
        assert_eq!(back.to_density().unwrap().matrix(), rho.matrix());
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = StateFile { dim: 2, matrix: vec![vec![[0.5, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.4, 0.0]]], label: None };
        assert!(matches!(bad.to_density(), Err(Error::InvalidTrace { .. })));
        let ragged = StateFile { dim: 2, matrix: vec![vec![[1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]], label: None };
        assert!(ragged.to_density().is_err());
        let obs = ObservablesFile {
            dim: 2,
            observables: vec![vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[2.0, 0.0], [0.0, 0.0]]]],
            labels: None,
        };
        assert!(matches!(obs.to_set(), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn reproducer_parses_as_inputs() {
        let (rho, x) = q1();
        let rep = Reproducer {
            dim: 2,
            matrix: encode_matrix(rho.matrix()),
            observables: ObservablesFile::from_set(&x, None).observables,
            relation: "eq3".into(),
            f: None,
            seed: 1,
            trial: 2,
            margin: Some(-1.0),
            error: None,
        };
        let text = to_json(&rep);
        let s: StateFile = from_json(&text).unwrap();
        let o: ObservablesFile = from_json(&text).unwrap();
        assert_eq!(s.to_density().unwrap().matrix(), rho.matrix());
        assert_eq!(o.to_set().unwrap().len(), 2);
    }

    #[test]
    fn report_round_trip_reproduces_margins() {
        let (rho, x) = q1();
        let tol = Tolerances::DEFAULT;
        let set = RelationSet::all(&["sld"], &["sld"]).unwrap();
        let ev = evaluate(&rho, &x, &set, &tol).unwrap();
        let echo = InputEcho {
            state: StateFile::from_density(&rho, None),
            observables: ObservablesFile::from_set(&x, None),
            state_sha256: None,
            observables_sha256: None,
        };
        let report = ReportFile::new(&ev, echo, &tol, Some("sld".into()));
        let text = to_json(&report);
        let back: ReportFile = from_json(&text).unwrap();
        assert_eq!(back, report);
        let ev2 = evaluate(&back.inputs.state.to_density().unwrap(), &back.inputs.observables.to_set().unwrap(), &set, &tol)
            .unwrap();
        assert_eq!(ReportFile::new(&ev2, back.inputs.clone(), &tol, Some("sld".into())), report);
        assert_eq!(report.margins["eq3"].verdict, Verdict::Saturated);
    }
}
