use std::cmp::Ordering;
use std::io::{self, Write};
use std::path::Path;

/// Significant digits of every floating-point cell.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats like C's `%.12g`: fixed notation for moderate exponents, trailing
/// zeros dropped, scientific notation otherwise.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let digits = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A numeric table written with a header row and rows in ascending order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row; panics when its width differs from the header.
    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// Column index by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn sorted_rows(&self) -> Vec<&Vec<f64>> {
        let mut rows: Vec<&Vec<f64>> = self.rows.iter().collect();
        rows.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        });
        rows
    }

    pub fn write_to<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in self.sorted_rows() {
            w.write_record(row.iter().map(|v| format_sig(*v)))?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }
}

/// Writes `table` to `path`, replacing any existing file.
pub fn emit_csv(table: &CsvTable, path: impl AsRef<Path>) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    table.write_to(io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(17.0), "17");
        assert_eq!(format_sig(0.00529), "0.00529");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0 * 1e-7), "6.66666666667e-08");
        assert_eq!(format_sig(-1234.5), "-1234.5");
        assert_eq!(format_sig(1e15), "1e+15");
    }

    #[test]
    fn rows_come_out_sorted() {
        let mut t = CsvTable::new(["l", "delta_h"]);
        t.push(vec![20.0, 0.5]);
        t.push(vec![10.0, 0.25]);
        t.push(vec![10.0, 0.125]);
        assert_eq!(t.to_csv_string(), "l,delta_h\n10,0.125\n10,0.25\n20,0.5\n");
    }

    #[test]
    fn empty_table_is_header_only() {
        let dir = std::env::temp_dir().join(format!("ans-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.csv");
        emit_csv(&CsvTable::new(["spread_id", "p", "delta_h"]), &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "spread_id,p,delta_h\n");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
