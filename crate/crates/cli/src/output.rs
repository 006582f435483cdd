//! JSON and CSV emission. Every artifact carries the resolved config, the
//! tool version and the seed.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use serde_json::{json, Value};

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub struct Emitter {
    out: Option<PathBuf>,
    csv: bool,
    config: Value,
    seed: Option<u64>,
    buf: Vec<u8>,
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

impl Emitter {
    pub fn new(out: Option<PathBuf>, format: Option<String>, config: Value, seed: Option<u64>) -> Self {
        let csv = match format.as_deref() {
            Some(f) => f == "csv",
            None => out
                .as_ref()
                .and_then(|p| p.extension())
                .is_some_and(|e| e.eq_ignore_ascii_case("csv")),
        };
        Self {
            out,
            csv,
            config,
            seed,
            buf: Vec::new(),
        }
    }

    fn meta(&self) -> Value {
        json!({
            "tool": "ulamfloat",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "config": self.config,
        })
    }

    /// Results without a natural table; CSV requests get the JSON anyway.
    pub fn json(&mut self, result: Value) -> anyhow::Result<()> {
        let mut obj = match result {
            Value::Object(m) => m,
            other => {
                let mut m = serde_json::Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        if let Value::Object(meta) = self.meta() {
            obj.extend(meta);
        }
        serde_json::to_writer_pretty(&mut self.buf, &Value::Object(obj))?;
        self.buf.push(b'\n');
        Ok(())
    }

    pub fn both(&mut self, result: Value, table: Table) -> anyhow::Result<()> {
        if !self.csv {
            return self.json(result);
        }
        writeln!(self.buf, "# tool: ulamfloat {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(self.buf, "# seed: {}", self.seed.map_or("none".to_string(), |s| s.to_string()))?;
        writeln!(self.buf, "# config: {}", serde_json::to_string(&self.config)?)?;
        writeln!(self.buf, "{}", table.header.join(","))?;
        for row in &table.rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&table.header)
                .map(|(&x, h)| if h == "k" { format!("{}", x as i64) } else { fmt17(x) })
                .collect();
            writeln!(self.buf, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn finish(self) -> anyhow::Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, &self.buf).with_context(|| format!("writing {}", p.display())),
            None => {
                std::io::stdout().write_all(&self.buf)?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.4700_f64, -1e-300, 123456.789] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }
}
