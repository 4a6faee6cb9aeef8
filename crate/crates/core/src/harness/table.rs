use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Numeric results with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Emitted as leading `# key: value` lines.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable { columns, rows: Vec::new(), metadata: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::config(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of column `name`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_to<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut out = out;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_g9(x)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Parses what [`emit_csv`] writes, skipping `#` lines.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let to_err = |e: csv::Error| Error::Csv { path: "<memory>".into(), source: e };
        let metadata = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .filter_map(|l| l[1..].trim().split_once(": "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns = r.headers().map_err(to_err)?.iter().map(str::to_string).collect();
        let mut table = ResultTable { columns, rows: Vec::new(), metadata };
        for rec in r.records() {
            let rec = rec.map_err(to_err)?;
            let row = rec
                .iter()
                .map(|c| c.parse::<f64>().map_err(|_| Error::config(format!("non-numeric cell '{c}'"))))
                .collect::<Result<Vec<f64>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }
}

/// Writes `table` to `path` as CSV.
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    table
        .write_to(std::io::BufWriter::new(file))
        .map_err(|source| Error::Csv { path: path.to_path_buf(), source })
}

/// `%.9g`: nine significant digits, plain notation for moderate exponents.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
