use pearceylab::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Shortest round-trip decimal.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_string()
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Header, rows, and a trailing `#key=value` block.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn meta_f64(&mut self, key: &str, value: f64) {
        self.meta(key, fmt_f64(value));
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        for (k, v) in &self.meta {
            let _ = writeln!(s, "#{k}={v}");
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj = self.header.iter().zip(r).map(|(h, c)| {
                    let v = match c {
                        Cell::Num(x) if x.is_finite() => serde_json::json!(x),
                        Cell::Num(x) => serde_json::json!(fmt_f64(*x)),
                        Cell::Int(i) => serde_json::json!(i),
                        Cell::Text(t) => serde_json::json!(t),
                    };
                    (h.to_string(), v)
                });
                serde_json::Value::Object(obj.collect())
            })
            .collect();
        let meta: serde_json::Map<String, serde_json::Value> =
            self.meta.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
        serde_json::json!({ "rows": rows, "meta": meta })
    }
}

pub enum Artifact {
    Table(Table),
    Json(serde_json::Value),
}

impl Artifact {
    pub fn json(v: &impl Serialize) -> Result<Self> {
        serde_json::to_value(v)
            .map(Artifact::Json)
            .map_err(|e| Error::Numerical(format!("serializing output: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn render(a: &Artifact, format: Format) -> Result<String> {
    let v = match (a, format) {
        (Artifact::Table(t), Format::Csv) => return Ok(t.to_csv()),
        (Artifact::Table(t), Format::Json) => t.to_json(),
        (Artifact::Json(v), _) => v.clone(),
    };
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Numerical(format!("serializing output: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("writing {}: {e}", p.display()))),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            // A closed downstream pipe (`| head`) is not a failure.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r.map_err(|e| Error::Config(format!("writing stdout: {e}"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["x", "v"]);
        t.push(vec![0.1.into(), f64::NAN.into()]);
        t.meta_f64("mass", 1.0);
        assert_eq!(t.to_csv(), "x,v\n0.1,NaN\n#mass=1.0\n");
    }

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
