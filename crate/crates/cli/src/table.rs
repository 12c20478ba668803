//! Result tables and their CSV / JSON renderings.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Real(f64),
    Count(usize),
    Complex(Complex64),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Count(n)
    }
}

impl From<Complex64> for Cell {
    fn from(z: Complex64) -> Self {
        Cell::Complex(z)
    }
}

/// Scientific notation with 12 digits after the point; `-0` prints as `0`.
pub fn format_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12e}")
}

/// `re+imi` / `re-imi`, both parts as in [`format_real`].
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", format_real(z.re), format_real(z.im.abs()))
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Real(x) => format_real(*x),
            Cell::Count(n) => n.to_string(),
            Cell::Complex(z) => format_complex(*z),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        let real = |x: f64| if x.is_finite() { json!(x) } else { json!(format_real(x)) };
        match self {
            Cell::Text(s) => json!(s),
            Cell::Real(x) => real(*x),
            Cell::Count(n) => json!(n),
            Cell::Complex(z) => json!({ "re": real(z.re), "im": real(z.im) }),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::text)).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    /// `{"command": ..., "columns": [...], "rows": [{column: value}]}`.
    pub fn to_json(&self, command: &str) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let fields: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, cell)| (c.to_string(), cell.json())).collect();
                Value::Object(fields)
            })
            .collect();
        let doc = json!({ "command": command, "columns": self.columns, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_scientific_format() {
        assert_eq!(format_real(1.0), "1.000000000000e0");
        assert_eq!(format_real(-0.0), "0.000000000000e0");
        assert_eq!(format_real(-1.5e-7), "-1.500000000000e-7");
        assert_eq!(format_real(f64::INFINITY), "inf");
        assert_eq!(format_complex(Complex64::new(1.0, 0.0)), "1.000000000000e0+0.000000000000e0i");
        assert_eq!(format_complex(Complex64::new(0.0, -2.0)), "0.000000000000e0-2.000000000000e0i");
    }

    #[test]
    fn csv_and_json_carry_the_same_fields() {
        let mut t = Table::new(&["arm", "g", "w", "note"]);
        t.push(vec!["A".into(), 0.5.into(), Complex64::new(1.0, -1.0).into(), Cell::Empty]);
        assert_eq!(t.to_csv(), "arm,g,w,note\nA,5.000000000000e-1,1.000000000000e0-1.000000000000e0i,\n");
        let v: Value = serde_json::from_str(&t.to_json("x")).unwrap();
        assert_eq!(v["rows"][0]["w"]["im"], json!(-1.0));
        assert_eq!(v["rows"][0]["note"], Value::Null);
        assert_eq!(v["columns"], json!(["arm", "g", "w", "note"]));
    }
}
