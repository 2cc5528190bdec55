//! Loading observation matrices and building per-node regression views.
//!
//! Node indices are zero-based throughout the library.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// An `n x p` observation matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    values: DMatrix<f64>,
    column_names: Vec<String>,
}

impl RawDataset {
    pub fn new(values: DMatrix<f64>, column_names: Vec<String>) -> Result<Self> {
        if values.ncols() != column_names.len() {
            return Err(Error::Dimension(format!(
                "{} columns but {} names",
                values.ncols(),
                column_names.len()
            )));
        }
        if values.nrows() < 2 {
            return Err(Error::TooSmall {
                what: "observations",
                min: 2,
                found: values.nrows(),
            });
        }
        if values.ncols() < 2 {
            return Err(Error::TooSmall {
                what: "variables",
                min: 2,
                found: values.ncols(),
            });
        }
        check_unique(&column_names)?;
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            let (row, column) = (idx % values.nrows(), idx / values.nrows());
            return Err(Error::NonNumeric {
                row: row + 2,
                column: column + 1,
                name: column_names[column].clone(),
                value: values[idx].to_string(),
            });
        }
        Ok(Self {
            values,
            column_names,
        })
    }

    /// Names `X1..Xp`.
    pub fn with_default_names(values: DMatrix<f64>) -> Result<Self> {
        let names = (1..=values.ncols()).map(|j| format!("X{j}")).collect();
        Self::new(values, names)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (j, name) in names.iter().enumerate() {
        if let Some(&first) = seen.get(name.as_str()) {
            return Err(Error::DuplicateColumn {
                name: name.clone(),
                first: first + 1,
                second: j + 1,
            });
        }
        seen.insert(name, j);
    }
    Ok(())
}

/// Reads a numeric CSV with a mandatory header row.
///
/// Row numbers in errors count physical lines, with the header on row 1.
pub fn load_csv(path: impl AsRef<Path>) -> Result<RawDataset> {
    let (names, rows) = read_numeric_table(path.as_ref())?;
    let p = names.len();
    let n = rows.len();
    let values = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    RawDataset::new(values, names)
}

fn read_numeric_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let names: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect();
    check_unique(&names)?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i + 2;
        if record.len() != names.len() {
            return Err(Error::RaggedRow {
                row,
                expected: names.len(),
                found: record.len(),
            });
        }
        let parsed = record
            .iter()
            .enumerate()
            .map(|(j, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::NonNumeric {
                    row,
                    column: j + 1,
                    name: names[j].clone(),
                    value: cell.to_owned(),
                }),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(parsed);
    }
    Ok((names, rows))
}

/// Columns centered to mean zero and scaled to unit sample standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedDataset {
    values: DMatrix<f64>,
    column_names: Vec<String>,
    original_means: Vec<f64>,
    original_sds: Vec<f64>,
}

impl StandardizedDataset {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn original_means(&self) -> &[f64] {
        &self.original_means
    }

    pub fn original_sds(&self) -> &[f64] {
        &self.original_sds
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn to_raw(&self) -> RawDataset {
        RawDataset {
            values: self.values.clone(),
            column_names: self.column_names.clone(),
        }
    }
}

/// Centers each column and divides by its sample standard deviation (divisor `n - 1`).
pub fn standardize(raw: &RawDataset) -> Result<StandardizedDataset> {
    let n = raw.n();
    let mut values = raw.values.clone();
    let mut means = Vec::with_capacity(raw.p());
    let mut sds = Vec::with_capacity(raw.p());
    for (j, mut col) in values.column_iter_mut().enumerate() {
        let mean = col.sum() / n as f64;
        col.add_scalar_mut(-mean);
        let sd = (col.norm_squared() / (n - 1) as f64).sqrt();
        if !(sd > 1e-12 * mean.abs()) || sd == 0.0 {
            return Err(Error::ConstantColumn {
                name: raw.column_names[j].clone(),
            });
        }
        col /= sd;
        means.push(mean);
        sds.push(sd);
    }
    Ok(StandardizedDataset {
        values,
        column_names: raw.column_names.clone(),
        original_means: means,
        original_sds: sds,
    })
}

/// Regression view for node `a`: the response is column `a` and the design is
/// an intercept column followed by the remaining columns in ascending order.
#[derive(Debug, Clone)]
pub struct NodeView {
    node: usize,
    response: DVector<f64>,
    design: DMatrix<f64>,
    predictors: Vec<usize>,
}

impl NodeView {
    /// Builds a view from an explicit response and predictor matrix (no
    /// intercept); used for standalone regressions and tests.
    pub fn from_parts(response: DVector<f64>, predictors: &DMatrix<f64>) -> Result<Self> {
        if response.len() != predictors.nrows() {
            return Err(Error::Dimension(format!(
                "response has {} rows, predictors {}",
                response.len(),
                predictors.nrows()
            )));
        }
        let n = response.len();
        let k = predictors.ncols();
        let mut design = DMatrix::from_element(n, k + 1, 1.0);
        design.columns_mut(1, k).copy_from(predictors);
        Ok(Self {
            node: usize::MAX,
            response,
            design,
            predictors: (0..k).collect(),
        })
    }

    /// Wraps an arbitrary design matrix as-is, without adding an intercept.
    pub fn from_design(response: DVector<f64>, design: DMatrix<f64>) -> Result<Self> {
        if response.len() != design.nrows() {
            return Err(Error::Dimension(format!(
                "response has {} rows, design {}",
                response.len(),
                design.nrows()
            )));
        }
        let k = design.ncols().saturating_sub(1);
        Ok(Self {
            node: usize::MAX,
            response,
            design,
            predictors: (0..k).collect(),
        })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    /// `n x p` design whose first column is all ones.
    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    /// Original column index of design column `j + 1`.
    pub fn predictors(&self) -> &[usize] {
        &self.predictors
    }

    pub fn n(&self) -> usize {
        self.design.nrows()
    }

    /// Number of design columns including the intercept.
    pub fn n_coef(&self) -> usize {
        self.design.ncols()
    }
}

pub fn node_view(data: &StandardizedDataset, a: usize) -> Result<NodeView> {
    let p = data.p();
    if a >= p {
        return Err(Error::OutOfRange {
            what: "nodes",
            index: a,
            len: p,
        });
    }
    let n = data.n();
    let predictors: Vec<usize> = (0..p).filter(|&b| b != a).collect();
    let mut design = DMatrix::from_element(n, p, 1.0);
    for (j, &b) in predictors.iter().enumerate() {
        design.set_column(j + 1, &data.values.column(b));
    }
    Ok(NodeView {
        node: a,
        response: data.values.column(a).into_owned(),
        design,
        predictors,
    })
}

/// Writes a dense matrix as CSV with the given header.
pub fn write_matrix_csv(path: impl AsRef<Path>, names: &[String], m: &DMatrix<f64>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let io = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    w.write_record(names).map_err(io)?;
    for i in 0..m.nrows() {
        w.write_record(m.row(i).iter().map(|v| v.to_string()))
            .map_err(io)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_dataset_csv(path: impl AsRef<Path>, data: &RawDataset) -> Result<()> {
    write_matrix_csv(path, &data.column_names, &data.values)
}

/// Reads a square named matrix (header = names) as written by [`write_matrix_csv`].
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, DMatrix<f64>)> {
    let path = path.as_ref();
    let (names, rows) = read_numeric_table(path)?;
    let m = DMatrix::from_fn(rows.len(), names.len(), |i, j| rows[i][j]);
    Ok((names, m))
}

/// Writes `node_a,node_b` name pairs.
pub fn write_edge_list(
    path: impl AsRef<Path>,
    names: &[String],
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let io = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    w.write_record(["node_a", "node_b"]).map_err(io)?;
    for (a, b) in edges {
        w.write_record([&names[a], &names[b]]).map_err(io)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads an edge list and resolves names against `names`.
pub fn read_edge_list(path: impl AsRef<Path>, names: &[String]) -> Result<Vec<(usize, usize)>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut edges = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::RaggedRow {
                row: i + 2,
                expected: 2,
                found: record.len(),
            });
        }
        let lookup = |s: &str| {
            index.get(s).copied().ok_or_else(|| Error::Csv {
                path: path.to_path_buf(),
                message: format!("unknown node {s:?} at row {}", i + 2),
            })
        };
        edges.push((lookup(&record[0])?, lookup(&record[1])?));
    }
    Ok(edges)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn csv_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_small_csv() {
        let f = csv_file("a,b\n1,2\n3,4\n5,6\n");
        let d = load_csv(f.path()).unwrap();
        assert_eq!((d.n(), d.p()), (3, 2));
        assert_eq!(d.column_names(), ["a", "b"]);
        assert_eq!(d.values()[(2, 1)], 6.0);
    }

    #[test]
    fn ragged_row_reports_location() {
        let f = csv_file("a,b\n1,2,3\n");
        match load_csv(f.path()) {
            Err(Error::RaggedRow { row, found, .. }) => assert_eq!((row, found), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_location() {
        let f = csv_file("a,b\n1,2\n3,NA\n");
        match load_csv(f.path()) {
            Err(Error::NonNumeric { row, column, value, .. }) => {
                assert_eq!((row, column, value.as_str()), (3, 2, "NA"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_header_and_missing_file() {
        let f = csv_file("a,a\n1,2\n3,4\n");
        assert!(matches!(load_csv(f.path()), Err(Error::DuplicateColumn { .. })));
        assert!(matches!(
            load_csv("/nonexistent/data.csv"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn standardize_simple_column() {
        let raw = RawDataset::new(
            DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 0.0, 4.0, 2.0]),
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let s = standardize(&raw).unwrap();
        assert_eq!(s.values().column(0).as_slice(), &[-1.0, 0.0, 1.0]);
        assert_eq!(s.original_means()[0], 2.0);
        assert_eq!(s.original_sds()[0], 1.0);
    }

    #[test]
    fn constant_column_is_rejected() {
        let raw = RawDataset::new(
            DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 5.0, 5.0, 5.0]),
            vec!["a".into(), "flat".into()],
        )
        .unwrap();
        match standardize(&raw) {
            Err(Error::ConstantColumn { name }) => assert_eq!(name, "flat"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn node_view_ordering() {
        let raw = RawDataset::with_default_names(DMatrix::from_fn(4, 3, |i, j| {
            ((i * 7 + j * 3) % 5) as f64 + j as f64
        }))
        .unwrap();
        let s = standardize(&raw).unwrap();
        let v = node_view(&s, 1).unwrap();
        assert_eq!(v.predictors(), &[0, 2]);
        assert!(v.design().column(0).iter().all(|&x| x == 1.0));
        assert_eq!(v.design().column(1), s.values().column(0));
        assert_eq!(v.design().column(2), s.values().column(2));
        assert_eq!(v.response(), &s.values().column(1).into_owned());
        assert!(matches!(node_view(&s, 3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn minimal_two_column_view() {
        let raw = RawDataset::with_default_names(DMatrix::from_column_slice(
            3,
            2,
            &[1.0, 2.0, 4.0, 3.0, 1.0, 0.0],
        ))
        .unwrap();
        let v = node_view(&standardize(&raw).unwrap(), 0).unwrap();
        assert_eq!(v.n_coef(), 2);
        assert_eq!(v.predictors(), &[1]);
    }
}
