use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(usize),
    Flag(bool),
    Text(String),
}

impl Cell {
    /// 17 significant digits so every double round-trips.
    pub fn render(&self) -> String {
        match self {
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Flag(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub name: &'static str,
    pub schema: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: serde_json::Map<String, Value>,
}

#[derive(Debug, Clone)]
pub struct Written {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub rows: usize,
}

impl ResultTable {
    pub fn new(name: &'static str, schema: &[&'static str]) -> Self {
        Self {
            name,
            schema: schema.to_vec(),
            rows: Vec::new(),
            meta: serde_json::Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.schema.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.schema.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.schema)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| crate::error::CliError::Output(e.to_string()))
    }

    /// Writes `<name>.csv` and `<name>.meta.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Written> {
        fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.name));
        let meta = dir.join(format!("{}.meta.json", self.name));
        fs::write(&csv, self.to_csv()?)?;
        let mut m = self.meta.clone();
        m.insert("table".into(), Value::from(self.name));
        m.insert("columns".into(), Value::from(self.schema.clone()));
        m.insert("rows".into(), Value::from(self.rows.len()));
        let mut text = serde_json::to_string_pretty(&Value::Object(m))?;
        text.push('\n');
        fs::write(&meta, text)?;
        Ok(Written {
            csv,
            meta,
            rows: self.rows.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, -1.0 / 3.0, 6.02214076e23, f64::MIN_POSITIVE, 1.0 - f64::EPSILON] {
            let s = Cell::Real(x).render();
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(Cell::Real(0.5).render(), "5.0000000000000000e-1");
    }

    #[test]
    fn text_with_commas_is_quoted() {
        let mut t = ResultTable::new("x", &["symbol", "value"]);
        t.push(vec![Cell::Text("a, b".into()), Cell::Int(3)]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "symbol,value\n\"a, b\",3\n");
    }
}
