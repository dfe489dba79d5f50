//! Survey datasets: CSV loading, binding columns to a spec by name, and
//! validation into a [`ValidatedSample`].

use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{std_dev, VARIANCE_FLOOR};
use crate::spec::{emit_model_spec, ModelSpec};

/// Closed interval of admissible responses on a 7-point anchored scale.
pub const LIKERT7: (f64, f64) = (1.0, 7.0);

/// Minimum subject-to-item ratio before a warning is raised.
pub const MIN_ADEQUACY: f64 = 10.0;

/// A respondent-by-indicator matrix with named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    column_names: Vec<String>,
    values: DMatrix<f64>,
    /// Admissible value range, `None` for unbounded (continuous synthetic) data.
    scale: Option<(f64, f64)>,
    /// Non-estimation columns kept as raw text.
    meta: Vec<(String, Vec<String>)>,
    /// Rows dropped at load because an estimation cell was empty.
    rejected_rows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    pub scale: Option<(f64, f64)>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            scale: Some(LIKERT7),
        }
    }
}

impl Dataset {
    /// Build a dataset from a value matrix. Every value must lie in `scale`
    /// when one is given.
    pub fn new(
        column_names: Vec<String>,
        values: DMatrix<f64>,
        scale: Option<(f64, f64)>,
    ) -> Result<Self> {
        if column_names.len() != values.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                column_names.len(),
                values.ncols()
            )));
        }
        for (j, name) in column_names.iter().enumerate() {
            for i in 0..values.nrows() {
                let v = values[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonNumeric {
                        row: i + 1,
                        column: name.clone(),
                        value: v.to_string(),
                    });
                }
                if let Some((lo, hi)) = scale {
                    if v < lo || v > hi {
                        return Err(Error::OutOfRange {
                            row: i + 1,
                            column: name.clone(),
                            value: v,
                            low: lo,
                            high: hi,
                        });
                    }
                }
            }
        }
        Ok(Dataset {
            column_names,
            values,
            scale,
            meta: Vec::new(),
            rejected_rows: 0,
        })
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn scale(&self) -> Option<(f64, f64)> {
        self.scale
    }

    pub fn meta(&self) -> &[(String, Vec<String>)] {
        &self.meta
    }

    pub fn rejected_rows(&self) -> usize {
        self.rejected_rows
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.column_index(name)
            .map(|j| self.values.column(j).iter().copied().collect())
    }

    /// Columns in the requested order, bound by name.
    pub fn matrix_for(&self, names: &[&str]) -> Result<DMatrix<f64>> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::MissingColumn(n.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(crate::linalg::select_columns(&self.values, &idx))
    }

    /// A new dataset made of the given rows (repeats allowed), meta included.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            column_names: self.column_names.clone(),
            values: crate::linalg::select_rows(&self.values, rows),
            scale: self.scale,
            meta: self
                .meta
                .iter()
                .map(|(n, v)| (n.clone(), rows.iter().map(|&r| v[r].clone()).collect()))
                .collect(),
            rejected_rows: 0,
        }
    }

    /// Replace one column's values. Used by diagnostics that perturb data.
    pub fn with_column(&self, name: &str, values: &[f64]) -> Result<Dataset> {
        let j = self
            .column_index(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        if values.len() != self.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "column `{name}` needs {} values",
                self.nrows()
            )));
        }
        let mut out = self.clone();
        for (i, v) in values.iter().enumerate() {
            out.values[(i, j)] = *v;
        }
        Ok(out)
    }

    /// Write the estimation columns (and meta) as CSV.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = self
            .column_names
            .iter()
            .map(String::as_str)
            .chain(self.meta.iter().map(|(n, _)| n.as_str()))
            .collect();
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.nrows() {
            let mut rec: Vec<String> = (0..self.values.ncols())
                .map(|j| format_cell(self.values[(i, j)]))
                .collect();
            rec.extend(self.meta.iter().map(|(_, v)| v[i].clone()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// SHA-256 over column names and values in row-major order.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for name in &self.column_names {
            h.update(name.as_bytes());
            h.update([0u8]);
        }
        for i in 0..self.nrows() {
            for j in 0..self.values.ncols() {
                h.update(self.values[(i, j)].to_le_bytes());
            }
        }
        hex_digest(h)
    }
}

fn format_cell(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub(crate) fn hex_digest(h: Sha256) -> String {
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Load a comma-separated file and bind every spec indicator by column name.
pub fn load_dataset(path: impl AsRef<Path>, spec: &ModelSpec) -> Result<Dataset> {
    load_dataset_with(path, spec, LoadOptions::default())
}

pub fn load_dataset_with(
    path: impl AsRef<Path>,
    spec: &ModelSpec,
    options: LoadOptions,
) -> Result<Dataset> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_dataset(file, spec, options)
}

/// Parse CSV text from any reader. Rows with an empty estimation cell are
/// dropped and counted; non-numeric and out-of-scale cells are errors.
pub fn read_dataset<R: Read>(reader: R, spec: &ModelSpec, options: LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let wanted = spec.all_indicators();
    let bound: Vec<usize> = wanted
        .iter()
        .map(|w| {
            headers
                .iter()
                .position(|h| h == w)
                .ok_or_else(|| Error::MissingColumn(w.to_string()))
        })
        .collect::<Result<_>>()?;
    let meta_cols: Vec<usize> = (0..headers.len()).filter(|j| !bound.contains(j)).collect();

    let mut flat = Vec::new();
    let mut meta: Vec<Vec<String>> = vec![Vec::new(); meta_cols.len()];
    let mut rejected = 0;
    let mut nrows = 0;
    for (ri, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row_no = ri + 1;
        if bound.iter().any(|&j| rec.get(j).is_none_or(str::is_empty)) {
            rejected += 1;
            continue;
        }
        for (k, &j) in bound.iter().enumerate() {
            let cell = &rec[j];
            let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                row: row_no,
                column: wanted[k].to_string(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonNumeric {
                    row: row_no,
                    column: wanted[k].to_string(),
                    value: cell.to_string(),
                });
            }
            if let Some((lo, hi)) = options.scale {
                if v < lo || v > hi {
                    return Err(Error::OutOfRange {
                        row: row_no,
                        column: wanted[k].to_string(),
                        value: v,
                        low: lo,
                        high: hi,
                    });
                }
            }
            flat.push(v);
        }
        for (slot, &j) in meta.iter_mut().zip(&meta_cols) {
            slot.push(rec.get(j).unwrap_or("").to_string());
        }
        nrows += 1;
    }
    let values = DMatrix::from_row_slice(nrows, wanted.len(), &flat);
    Ok(Dataset {
        column_names: wanted.iter().map(|s| s.to_string()).collect(),
        values,
        scale: options.scale,
        meta: meta_cols
            .iter()
            .zip(meta)
            .map(|(&j, v)| (headers[j].clone(), v))
            .collect(),
        rejected_rows: rejected,
    })
}

/// A dataset checked against a spec and ready for estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatedSample {
    pub dataset: Dataset,
    pub spec: ModelSpec,
    pub n: usize,
    pub p: usize,
    /// Subject-to-item ratio `n / p`.
    pub adequacy: f64,
    pub warnings: Vec<String>,
}

impl ValidatedSample {
    /// Hash binding the sample to its spec; reports built from the same
    /// sample carry the same value.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.dataset.content_hash().as_bytes());
        h.update(emit_model_spec(&self.spec).as_bytes());
        hex_digest(h)
    }
}

/// Check a dataset against a spec. Low subject-to-item ratios are warnings;
/// constant estimation columns and fewer than two rows are errors.
pub fn validate(dataset: &Dataset, spec: &ModelSpec) -> Result<ValidatedSample> {
    let n = dataset.nrows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let est = spec.estimation_indicators();
    let mut all = est.clone();
    all.extend(spec.marker_indicators());
    for name in &all {
        let col = dataset
            .column(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        let sd = std_dev(&col);
        if sd * sd < VARIANCE_FLOOR {
            return Err(Error::ConstantColumn(name.to_string()));
        }
    }
    let p = est.len();
    let adequacy = n as f64 / p as f64;
    let mut warnings = Vec::new();
    if adequacy < MIN_ADEQUACY {
        warnings.push(format!(
            "subject-to-item ratio {adequacy:.2} is below {MIN_ADEQUACY}:1"
        ));
    }
    if dataset.rejected_rows() > 0 {
        warnings.push(format!(
            "{} rows with missing estimation cells were dropped",
            dataset.rejected_rows()
        ));
    }
    Ok(ValidatedSample {
        dataset: dataset.clone(),
        spec: spec.clone(),
        n,
        p,
        adequacy,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_model_spec;

    fn spec() -> ModelSpec {
        parse_model_spec("plsspec 1\n[constructs]\nA = a1, a2\nB = b1\n[edges]\nA -> B\n").unwrap()
    }

    #[test]
    fn binds_by_name_and_keeps_meta() {
        let csv = "age,b1,a2,a1\n30,1,2,3\n41,4,5,6\n";
        let ds = read_dataset(csv.as_bytes(), &spec(), LoadOptions::default()).unwrap();
        assert_eq!(ds.column_names(), &["a1", "a2", "b1"]);
        assert_eq!(ds.column("a1").unwrap(), vec![3.0, 6.0]);
        assert_eq!(ds.meta()[0].0, "age");
    }

    #[test]
    fn column_order_does_not_matter() {
        let a = read_dataset("a1,a2,b1\n1,2,3\n4,5,6\n".as_bytes(), &spec(), LoadOptions::default()).unwrap();
        let b = read_dataset("b1,a2,a1\n3,2,1\n6,5,4\n".as_bytes(), &spec(), LoadOptions::default()).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn non_numeric_cell_is_located() {
        let csv = "a1,a2,b1\n1,2,3\n4,eight,6\n";
        let err = read_dataset(csv.as_bytes(), &spec(), LoadOptions::default()).unwrap_err();
        assert_eq!(
            err,
            Error::NonNumeric {
                row: 2,
                column: "a2".into(),
                value: "eight".into()
            }
        );
    }

    #[test]
    fn out_of_scale_value() {
        let csv = "a1,a2,b1\n1,2,3\n4,9,6\n";
        assert!(matches!(
            read_dataset(csv.as_bytes(), &spec(), LoadOptions::default()),
            Err(Error::OutOfRange { row: 2, .. })
        ));
    }

    #[test]
    fn missing_column() {
        let csv = "a1,b1\n1,3\n";
        assert_eq!(
            read_dataset(csv.as_bytes(), &spec(), LoadOptions::default()).unwrap_err(),
            Error::MissingColumn("a2".into())
        );
    }

    #[test]
    fn incomplete_rows_are_dropped() {
        let csv = "a1,a2,b1\n1,2,3\n4,,6\n2,3,4\n";
        let ds = read_dataset(csv.as_bytes(), &spec(), LoadOptions::default()).unwrap();
        assert_eq!(ds.nrows(), 2);
        assert_eq!(ds.rejected_rows(), 1);
    }

    #[test]
    fn adequacy_and_constant_columns() {
        let csv = "a1,a2,b1\n1,2,4\n4,5,4\n2,2,4\n";
        let ds = read_dataset(csv.as_bytes(), &spec(), LoadOptions::default()).unwrap();
        assert_eq!(validate(&ds, &spec()).unwrap_err(), Error::ConstantColumn("b1".into()));

        let csv = "a1,a2,b1\n1,2,4\n4,5,3\n2,2,4\n";
        let ds = read_dataset(csv.as_bytes(), &spec(), LoadOptions::default()).unwrap();
        let vs = validate(&ds, &spec()).unwrap();
        assert_eq!(vs.adequacy, 1.0);
        assert_eq!(vs.warnings.len(), 1);
    }
}
