//! CSV emission. Every float is written as `{:.16e}` (17 significant
//! digits), so identical inputs produce byte-identical files.

use std::fs::File;
use std::path::{Path, PathBuf};

use lr_decoherence::auxiliary::AuxiliarySolution;
use lr_decoherence::decoherence::{ClassicalLimitScan, DecoherenceSeries};
use lr_decoherence::invariant::PhaseDecomposition;

use crate::error::{CliError, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvFile {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvFile {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        }
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(|source| CliError::Csv { path: path.into(), source })?;
        let mut out = Self { path: path.into(), writer };
        out.row(header)?;
        Ok(out)
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) -> Result<()> {
        self.writer.write_record(fields).map_err(|source| CliError::Csv { path: self.path.clone(), source })
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|source| CliError::Io { path: self.path.clone(), source })
    }
}

pub fn write_aux(path: &Path, sol: &AuxiliarySolution<f64>) -> Result<()> {
    let mut csv = CsvFile::create(path, &["t", "a", "b"])?;
    for k in 0..sol.len() {
        csv.row(&[fmt_f64(sol.times()[k]), fmt_f64(sol.a()[k]), fmt_f64(sol.b()[k])])?;
    }
    csv.finish()
}

pub fn write_phases(path: &Path, ph: &PhaseDecomposition<f64>) -> Result<()> {
    let mut csv = CsvFile::create(path, &["t", "phi_d", "phi_g", "phi_total"])?;
    for k in 0..ph.times.len() {
        csv.row(&[fmt_f64(ph.times[k]), fmt_f64(ph.phi_d[k]), fmt_f64(ph.phi_g[k]), fmt_f64(ph.total_at(k))])?;
    }
    csv.finish()
}

/// One block of rows per route, in the order given.
pub fn write_decoherence(path: &Path, series: &[DecoherenceSeries<f64>]) -> Result<()> {
    let mut csv = CsvFile::create(path, &["t", "re_F", "im_F", "abs_F", "route"])?;
    for s in series {
        for (t, f) in s.times.iter().zip(&s.values) {
            csv.row(&[fmt_f64(*t), fmt_f64(f.re), fmt_f64(f.im), fmt_f64(f.norm()), s.route.as_str().to_string()])?;
        }
    }
    csv.finish()
}

pub fn write_scan(path: &Path, scan: &ClassicalLimitScan<f64>) -> Result<()> {
    let mut csv = CsvFile::create(path, &["j", "abs_F"])?;
    for p in &scan.points {
        csv.row(&[fmt_f64(p.j.value()), fmt_f64(p.abs_f)])?;
    }
    csv.finish()
}

/// `key,value` rows describing how the data files were produced.
pub fn write_metadata(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut csv = CsvFile::create(path, &["key", "value"])?;
    for (k, v) in entries {
        csv.row(&[k, v])?;
    }
    csv.finish()
}
