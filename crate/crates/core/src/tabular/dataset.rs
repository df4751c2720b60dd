use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Predictor matrix plus a response, both with column names.
///
/// Immutable after construction; every value is finite and names are unique.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    x: Array2<f64>,
    target_name: String,
    y: Vec<f64>,
}

fn check_finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    for (i, v) in values.into_iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(())
}

impl Dataset {
    /// Build from a row-major `n × p` predictor matrix.
    pub fn new(names: Vec<String>, x: Array2<f64>, target_name: impl Into<String>, y: Vec<f64>) -> Result<Self> {
        let target_name = target_name.into();
        if names.is_empty() || x.ncols() == 0 {
            return Err(Error::NoPredictors);
        }
        if names.len() != x.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{} names for {} predictor columns",
                names.len(),
                x.ncols()
            )));
        }
        if x.nrows() != y.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} predictor rows, {} target values",
                x.nrows(),
                y.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in names.iter().chain(std::iter::once(&target_name)) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        check_finite(x.iter().copied())?;
        check_finite(y.iter().copied())?;
        let x = if x.is_standard_layout() {
            x
        } else {
            x.as_standard_layout().into_owned()
        };
        Ok(Self {
            names,
            x,
            target_name,
            y,
        })
    }

    /// Build from predictor columns.
    pub fn from_columns(columns: Vec<(String, Vec<f64>)>, target_name: impl Into<String>, y: Vec<f64>) -> Result<Self> {
        let n = y.len();
        let p = columns.len();
        let mut x = Array2::zeros((n, p));
        let mut names = Vec::with_capacity(p);
        for (j, (name, col)) in columns.into_iter().enumerate() {
            if col.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "column '{name}' has {} rows, target has {n}",
                    col.len()
                )));
            }
            x.column_mut(j).assign(&ndarray::ArrayView1::from(&col));
            names.push(name);
        }
        Self::new(names, x, target_name, y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.x.column(j).to_vec()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Predictor rows and responses at the given indices, in index order.
    pub fn rows(&self, idx: &[usize]) -> (Array2<f64>, Vec<f64>) {
        let x = self.x.select(Axis(0), idx);
        let y = idx.iter().map(|&i| self.y[i]).collect();
        (x, y)
    }

    pub fn require_rows(&self, min: usize) -> Result<()> {
        if self.n() < min {
            Err(Error::TooFewRows { n: self.n(), min })
        } else {
            Ok(())
        }
    }

    /// Parse comma-separated text with a header row.
    pub fn read_csv<R: Read>(reader: R, target_name: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let target_col = headers
            .iter()
            .position(|h| h == target_name)
            .ok_or_else(|| Error::MissingColumn(target_name.to_owned()))?;
        if headers.len() < 2 {
            return Err(Error::NoPredictors);
        }
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            for (c, header) in headers.iter().enumerate() {
                let cell = record.get(c).unwrap_or("");
                let value = cell
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::BadCell {
                        row: r + 1,
                        column: header.clone(),
                        cell: cell.to_owned(),
                    })?;
                cols[c].push(value);
            }
        }
        if cols[0].is_empty() {
            return Err(Error::TooFewRows { n: 0, min: 1 });
        }
        let y = std::mem::take(&mut cols[target_col]);
        let columns = headers
            .into_iter()
            .zip(cols)
            .enumerate()
            .filter(|(c, _)| *c != target_col)
            .map(|(_, pair)| pair)
            .collect();
        Self::from_columns(columns, target_name, y)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(self.names.iter().chain(std::iter::once(&self.target_name)))?;
        for (row, y) in self.x.rows().into_iter().zip(&self.y) {
            let rec: Vec<String> = row.iter().chain(std::iter::once(y)).map(|v| format!("{v:?}")).collect();
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::Internal(e.to_string()))?;
        Ok(())
    }

    /// Dataset restricted to a subset of predictor columns.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let x = self.x.select(Axis(1), cols);
        let names = cols.iter().map(|&j| self.names[j].clone()).collect();
        Self::new(names, x, self.target_name.clone(), self.y.clone())
    }
}

/// Read a dataset from a CSV file; every non-target column becomes a predictor.
pub fn load_csv(path: impl AsRef<Path>, target_name: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    Dataset::read_csv(std::io::BufReader::new(file), target_name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str, target: &str) -> Result<Dataset> {
        Dataset::read_csv(text.as_bytes(), target)
    }

    #[test]
    fn three_rows() {
        let ds = parse("x1,x2,y\n1,2,3\n4,5,6\n7,8e-1,9\n", "y").unwrap();
        assert_eq!(ds.p(), 2);
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.names(), ["x1", "x2"]);
        assert_eq!(ds.column(1), vec![2.0, 5.0, 0.8]);
        assert_eq!(ds.y(), [3.0, 6.0, 9.0]);
    }

    #[test]
    fn target_in_the_middle() {
        let ds = parse("a,y,b\n1,2,3\n", "y").unwrap();
        assert_eq!(ds.names(), ["a", "b"]);
        assert_eq!(ds.y(), [2.0]);
    }

    #[test]
    fn only_target() {
        assert!(matches!(parse("y\n1\n2\n", "y"), Err(Error::NoPredictors)));
    }

    #[test]
    fn missing_target() {
        match parse("a,b\n1,2\n", "y") {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "y"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nan_cell_is_reported() {
        match parse("a,y\n1,2\nNaN,3\n", "y") {
            Err(Error::BadCell { row, column, cell }) => {
                assert_eq!((row, column.as_str(), cell.as_str()), (2, "a", "NaN"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("a,y\n1,\n", "y"), Err(Error::BadCell { .. })));
        assert!(matches!(parse("a,y\n1,abc\n", "y"), Err(Error::BadCell { .. })));
        assert!(matches!(parse("a,y\ninf,1\n", "y"), Err(Error::BadCell { .. })));
    }

    #[test]
    fn duplicate_names() {
        assert!(matches!(parse("a,a,y\n1,2,3\n", "y"), Err(Error::DuplicateColumn(_))));
    }

    #[test]
    fn no_rows() {
        assert!(matches!(parse("a,y\n", "y"), Err(Error::TooFewRows { n: 0, .. })));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_csv("/definitely/not/here.csv", "y"),
            Err(Error::Io { .. })
        ));
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            rows in prop::collection::vec(prop::collection::vec(-1e12f64..1e12, 3), 1..40)
        ) {
            let n = rows.len();
            let x = Array2::from_shape_fn((n, 2), |(i, j)| rows[i][j]);
            let y = rows.iter().map(|r| r[2]).collect();
            let ds = Dataset::new(vec!["u".into(), "v".into()], x, "t", y).unwrap();
            let mut buf = Vec::new();
            ds.write_csv(&mut buf).unwrap();
            let back = Dataset::read_csv(buf.as_slice(), "t").unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
