//! File formats: matrix JSON, model bundles, family manifests and CSV tables.
//!
//! Matrices are stored row-major as `{"dim": n, "re": [[...]], "im": [[...]]}`.
//! CSV numbers are written with `{:.17e}` so that a value read back is
//! bit-identical to the one written.

use std::fs;
use std::path::{Path, PathBuf};

use faer::Mat;
use krein_core::models::CutoffFamily;
use krein_core::singular::{CorrectionS, Perturbation, SingularModel};
use krein_core::{c64, CMat, FreeHamiltonian, OpAlgebra, OperatorModel};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_mat(m: &CMat) -> Self {
        let n = m.nrows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
        Self { dim: n, re, im }
    }

    pub fn to_mat(&self) -> Result<CMat, String> {
        let n = self.dim;
        if n == 0 {
            return Err("dim must be positive".into());
        }
        for (name, rows) in [("re", &self.re), ("im", &self.im)] {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(format!("`{name}` is not {n}×{n}"));
            }
            if rows.iter().flatten().any(|x| !x.is_finite()) {
                return Err(format!("`{name}` has non-finite entries"));
            }
        }
        Ok(Mat::from_fn(n, n, |i, j| c64::new(self.re[i][j], self.im[i][j])))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> LabResult<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_matrix(path: &Path, m: &CMat) -> LabResult<()> {
    write_json(path, &MatrixJson::from_mat(m))
}

pub fn read_matrix(path: &Path) -> LabResult<CMat> {
    let raw: MatrixJson = read_json(path)?;
    raw.to_mat().map_err(|reason| LabError::Format { path: path.to_path_buf(), reason })
}

/// `{"H", "A", "S", "s_exponent", "lambda_circ"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    #[serde(rename = "H")]
    pub h: MatrixJson,
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "S")]
    pub s: MatrixJson,
    pub s_exponent: f64,
    pub lambda_circ: f64,
}

impl ModelBundle {
    pub fn from_model(sm: &SingularModel<OperatorModel>) -> Self {
        Self {
            h: MatrixJson::from_mat(sm.model().h()),
            a: MatrixJson::from_mat(sm.a()),
            s: MatrixJson::from_mat(sm.corr().s()),
            s_exponent: sm.pert().s_exponent(),
            lambda_circ: sm.lambda_circ(),
        }
    }

    pub fn to_model(&self) -> LabResult<SingularModel<OperatorModel>> {
        let conv = |m: &MatrixJson, name: &str| {
            m.to_mat().map_err(|reason| LabError::Format { path: PathBuf::from(name), reason })
        };
        let model = OperatorModel::new(&conv(&self.h, "H")?)?;
        let pert = Perturbation::new(&model, conv(&self.a, "A")?, self.s_exponent)?;
        let corr = CorrectionS::new(&model, conv(&self.s, "S")?)?;
        Ok(SingularModel::new(model, pert, corr, self.lambda_circ)?)
    }
}

pub fn write_bundle(path: &Path, sm: &SingularModel<OperatorModel>) -> LabResult<()> {
    write_json(path, &ModelBundle::from_model(sm))
}

pub fn read_bundle(path: &Path) -> LabResult<SingularModel<OperatorModel>> {
    read_json::<ModelBundle>(path)?.to_model()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub n: usize,
    pub a_n: String,
    pub e_n: String,
}

/// Family export: levels with file references relative to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub family: String,
    pub dim: usize,
    pub s_exponent: f64,
    pub lambda_circ: f64,
    #[serde(rename = "H")]
    pub h: String,
    pub limit_a: String,
    #[serde(rename = "S")]
    pub s: String,
    pub has_target_a: bool,
    pub levels: Vec<LevelEntry>,
}

/// Writes `manifest.json` plus one matrix file per operator into `dir`.
pub fn write_family<F: FreeHamiltonian>(dir: &Path, name: &str, fam: &CutoffFamily<F>) -> LabResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let mut put = |file: String, m: &CMat| -> LabResult<String> {
        let p = dir.join(&file);
        write_matrix(&p, m)?;
        written.push(p);
        Ok(file)
    };
    let h = put("H.json".into(), &fam.model().h_op().to_dense())?;
    let limit_a = put("limit_A.json".into(), &fam.limit_a().to_dense())?;
    let s = put("S.json".into(), &fam.s().to_dense())?;
    let mut levels = Vec::new();
    for l in fam.levels() {
        let a_n = put(format!("A_{}.json", l.n), &l.a_n.to_dense())?;
        let e_n = put(format!("E_{}.json", l.n), &l.e_n.to_dense())?;
        levels.push(LevelEntry { n: l.n, a_n, e_n });
    }
    let manifest = FamilyManifest {
        family: name.into(),
        dim: fam.model().dim(),
        s_exponent: fam.s_exponent(),
        lambda_circ: fam.lambda_circ(),
        h,
        limit_a,
        s,
        has_target_a: fam.target_a().is_some(),
        levels,
    };
    let p = dir.join("manifest.json");
    write_json(&p, &manifest)?;
    written.push(p);
    Ok(written)
}

/// Reads a manifest written by [`write_family`] into a dense family.
pub fn read_family(manifest: &Path) -> LabResult<(String, CutoffFamily<OperatorModel>)> {
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let m: FamilyManifest = read_json(manifest)?;
    let model = OperatorModel::new(&read_matrix(&dir.join(&m.h))?)?;
    let limit_a = read_matrix(&dir.join(&m.limit_a))?;
    let s = read_matrix(&dir.join(&m.s))?;
    let levels = m
        .levels
        .iter()
        .map(|l| {
            Ok(krein_core::models::CutoffLevel {
                n: l.n,
                a_n: read_matrix(&dir.join(&l.a_n))?,
                e_n: read_matrix(&dir.join(&l.e_n))?,
            })
        })
        .collect::<LabResult<Vec<_>>>()?;
    let target = m.has_target_a.then(|| limit_a.clone());
    let fam = CutoffFamily::new(model, levels, target, limit_a, s, m.s_exponent, Some(m.lambda_circ))?;
    Ok((m.family, fam))
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.17e}")
}

/// Writes a CSV table with a header row and LF line endings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> LabResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_is_exact() {
        let m = Mat::from_fn(3, 3, |i, j| c64::new(0.1 * i as f64 - 1.0 / 3.0, (j as f64).sqrt()));
        let back = MatrixJson::from_mat(&m).to_mat().unwrap();
        assert_eq!(m, back);
        let text = serde_json::to_string(&MatrixJson::from_mat(&m)).unwrap();
        let parsed: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.to_mat().unwrap(), m);
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        let bad = MatrixJson { dim: 2, re: vec![vec![1.0, 2.0]], im: vec![vec![0.0; 2]; 2] };
        assert!(bad.to_mat().is_err());
        let bad = MatrixJson { dim: 0, re: vec![], im: vec![] };
        assert!(bad.to_mat().is_err());
    }

    #[test]
    fn numbers_round_trip_through_text() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }
}
