//! Column-oriented numeric datasets and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Data(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if let Some(first) = columns.first() {
            if let Some((j, c)) = columns.iter().enumerate().find(|(_, c)| c.len() != first.len()) {
                return Err(Error::Data(format!(
                    "column {:?} has {} rows, expected {}",
                    names[j],
                    c.len(),
                    first.len()
                )));
            }
        }
        Ok(Dataset { names, columns })
    }

    pub fn from_matrix(names: Vec<String>, m: &Matrix) -> Result<Self> {
        Dataset::new(names, (0..m.cols()).map(|j| m.column(j)).collect())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nrows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    /// Resolves a column by exact name, else by 1-based position.
    pub fn resolve(&self, key: &str) -> Result<usize> {
        if let Some(j) = self.names.iter().position(|n| n == key) {
            return Ok(j);
        }
        match key.parse::<usize>() {
            Ok(k) if (1..=self.ncols()).contains(&k) => Ok(k - 1),
            _ => Err(Error::Data(format!("no column named or numbered {key:?}"))),
        }
    }

    /// All columns as an `nrows × ncols` matrix.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_columns(&self.columns).expect("columns are rectangular and finite")
    }

    /// The listed columns as a matrix.
    pub fn select(&self, cols: &[usize]) -> Matrix {
        let picked: Vec<Vec<f64>> = cols.iter().map(|&j| self.columns[j].clone()).collect();
        Matrix::from_columns(&picked).expect("columns are rectangular and finite")
    }

    /// Every column except `skip`.
    pub fn without(&self, skip: usize) -> Vec<usize> {
        (0..self.ncols()).filter(|&j| j != skip).collect()
    }
}

/// Options for [`load_csv`].
#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// Keep only these header names (in this order), ignoring other columns.
    pub columns: Option<Vec<String>>,
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    read_csv(file, options)
}

/// Parses CSV with a header row. Data rows are numbered from 1.
pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let keep: Vec<usize> = match &options.columns {
        None => (0..header.len()).collect(),
        Some(wanted) => wanted
            .iter()
            .map(|w| {
                header
                    .iter()
                    .position(|h| h == w)
                    .ok_or_else(|| Error::Data(format!("no column named {w:?}")))
            })
            .collect::<Result<_>>()?,
    };
    let mut columns = vec![Vec::new(); keep.len()];
    for (r, record) in rdr.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { len, expected_len, .. } => Error::Data(format!(
                "row {row} has {len} fields, expected {expected_len}"
            )),
            _ => Error::Csv(e),
        })?;
        for (c, &j) in keep.iter().enumerate() {
            let cell = &record[j];
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                Error::Data(format!(
                    "row {row}, column {:?}: {cell:?} is not a finite number",
                    header[j]
                ))
            })?;
            columns[c].push(v);
        }
    }
    if columns.first().is_none_or(Vec::is_empty) {
        return Err(Error::Data("no data rows".into()));
    }
    Dataset::new(keep.iter().map(|&j| header[j].clone()).collect(), columns)
}

/// Writes a header and numeric rows. Reals use the shortest representation
/// that parses back to the identical value.
pub fn write_csv<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(data.names())?;
    let mut buf = Vec::with_capacity(data.ncols());
    for i in 0..data.nrows() {
        buf.clear();
        buf.extend((0..data.ncols()).map(|j| data.column(j)[i].to_string()));
        w.write_record(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_csv(std::io::BufWriter::new(file), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Dataset> {
        read_csv(text.as_bytes(), &CsvOptions::default())
    }

    #[test]
    fn small_numeric_file() {
        let d = parse("a,b\n1,2\n3,4.5\n-1e3,0\n").unwrap();
        assert_eq!(d.nrows(), 3);
        assert_eq!(d.ncols(), 2);
        assert_eq!(d.column(1), &[2.0, 4.5, 0.0]);
        assert_eq!(d.resolve("b").unwrap(), 1);
        assert_eq!(d.resolve("1").unwrap(), 0);
        assert!(d.resolve("3").is_err());
    }

    #[test]
    fn header_only() {
        let e = parse("a,b\n").unwrap_err();
        assert!(e.to_string().contains("no data rows"));
    }

    #[test]
    fn na_cell_names_row_and_column() {
        let e = parse("a,b\n1,2\n3,NA\n").unwrap_err().to_string();
        assert!(e.contains("row 2") && e.contains("\"b\""), "{e}");
    }

    #[test]
    fn ragged_rows() {
        let e = parse("a,b\n1,2\n3\n").unwrap_err().to_string();
        assert!(e.contains("row 2"), "{e}");
    }

    #[test]
    fn missing_file() {
        assert!(load_csv("/definitely/not/here.csv", &CsvOptions::default()).is_err());
    }

    #[test]
    fn column_selection_skips_text() {
        let opts = CsvOptions {
            columns: Some(vec!["n".into(), "time".into()]),
        };
        let d = read_csv("method,n,time\nfast,10,0.5\nnaive,20,1.5\n".as_bytes(), &opts).unwrap();
        assert_eq!(d.names(), &["n".to_string(), "time".to_string()]);
        assert_eq!(d.column(0), &[10.0, 20.0]);
    }

    proptest! {
        #[test]
        fn write_then_read_is_lossless(vals in prop::collection::vec(-1e300f64..1e300, 1..40)) {
            let d = Dataset::new(vec!["v".into(), "w".into()], vec![vals.clone(), vals.iter().map(|v| v / 3.0).collect()]).unwrap();
            let mut buf = Vec::new();
            write_csv(&mut buf, &d).unwrap();
            let back = read_csv(&buf[..], &CsvOptions::default()).unwrap();
            prop_assert_eq!(back, d);
        }
    }
}
