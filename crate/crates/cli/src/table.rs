use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use mvop::Scalar;

/// A named CSV table.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Rationals as `p/q` (integers get `/1`), floats in shortest round-trip form.
pub fn cell<S: Scalar>(value: &S) -> String {
    let text = value.to_string();
    if S::EXACT && !text.contains('/') {
        format!("{text}/1")
    } else {
        text
    }
}

pub fn float(value: f64) -> String {
    format!("{value:e}")
}

/// Writes each table to `dir/<name>.csv`, or all of them to stdout.
pub fn emit(tables: &[Table], dir: Option<&Path>) -> Result<()> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for t in tables {
                let path = dir.join(format!("{}.csv", t.name));
                let file = std::fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                t.write_to(file)?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for (k, t) in tables.iter().enumerate() {
                if tables.len() > 1 {
                    if k > 0 {
                        writeln!(lock)?;
                    }
                    writeln!(lock, "# {}", t.name)?;
                }
                t.write_to(&mut lock)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvop::Rational;

    #[test]
    fn rationals_always_carry_a_denominator() {
        assert_eq!(cell(&<Rational as Scalar>::from_ratio(-3, 4)), "-3/4");
        assert_eq!(cell(&<Rational as Scalar>::from_i64(2)), "2/1");
        assert_eq!(cell(&0.25f64), "0.25");
    }
}
