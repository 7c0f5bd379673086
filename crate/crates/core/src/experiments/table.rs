use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{ensure, Error, Result};

/// A rectangular numeric table with `key=value` metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        ResultTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        ensure(!self.columns.is_empty(), "columns", "a table needs at least one column")?;
        ensure(
            self.rows.iter().all(|r| r.len() == self.columns.len()),
            "rows",
            "every row must match the header width",
        )?;
        ensure(
            self.metadata.iter().all(|(k, v)| !k.contains(['=', '\n']) && !v.contains('\n')),
            "metadata",
            "keys may not contain '=' and entries may not span lines",
        )
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `# key=value` metadata lines, then the CSV header and rows.
/// Floats use the shortest representation that round-trips, so equal tables
/// give byte-identical files.
pub fn emit_table(table: &ResultTable, path: &Path) -> Result<()> {
    table.validate()?;
    let file = File::create(path).map_err(io_error(path))?;
    let mut out = BufWriter::new(file);
    for (k, v) in &table.metadata {
        writeln!(out, "# {k}={v}").map_err(io_error(path))?;
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Config(format!("{}: {other:?}", path.display())),
    };
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format!("{x}"))).map_err(csv_err)?;
    }
    w.flush().map_err(io_error(path))?;
    Ok(())
}

/// Reads a table written by [`emit_table`].
pub fn read_table(path: &Path) -> Result<ResultTable> {
    let file = File::open(path).map_err(io_error(path))?;
    let mut metadata = Vec::new();
    let mut body = String::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_error(path))?;
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("{}: bad metadata line `{line}`", path.display())))?;
            metadata.push((k.to_string(), v.to_string()));
        } else {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let bad = |e: csv::Error| Error::Config(format!("{}: {e}", path.display()));
    let columns = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(bad)?;
        let row = rec
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{}: non-numeric cell `{c}`", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let table = ResultTable {
        columns,
        rows,
        metadata,
    };
    table.validate()?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_has_header_and_metadata_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = ResultTable::new(&["a", "b"]);
        t.metadata.push(("seed".into(), "3".into()));
        emit_table(&t, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "# seed=3\na,b\n");
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = ResultTable::new(&["x", "y"]);
        t.metadata.push(("experiment.grid".into(), "1,2,3".into()));
        t.push(vec![0.1, 1.0 / 3.0]);
        t.push(vec![-2.5e-300, f64::MAX]);
        emit_table(&t, &path).unwrap();
        assert_eq!(read_table(&path).unwrap(), t);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("t.csv");
        let err = emit_table(&ResultTable::new(&["a"]), &path).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("missing"));
    }
}
