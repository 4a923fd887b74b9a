//! Rendering of command results to stdout or files.

use std::fs;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use zas_core::geometry::ExtendedMass;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Shortest round-trip decimal, with `inf`/`-inf`/`nan` spelled out.
pub fn num(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

pub fn mass(m: ExtendedMass) -> String {
    num(m.value())
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str], rows: Vec<Vec<String>>) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    fn render(&self) -> Result<String, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Failure::Compute(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Compute(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Failure::Compute(e.to_string()))
    }
}

pub struct Emitter {
    out: Option<PathBuf>,
    formats: Vec<Format>,
}

impl Emitter {
    pub fn new(out: Option<PathBuf>, formats: Vec<Format>) -> Result<Self, Failure> {
        if out.is_none() && formats.contains(&Format::Svg) {
            return Err(Failure::Input("svg output needs --out".into()));
        }
        if let Some(dir) = &out {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
        }
        Ok(Emitter { out, formats })
    }

    /// Without `--out` and `--format` the human text goes to stdout. With
    /// `--out`, every requested format (default: all available) becomes
    /// `<out>/<stem>.<ext>`.
    pub fn emit<T: Serialize>(
        &self,
        stem: &str,
        text: &str,
        table: Option<&CsvTable>,
        json: &T,
        svg: Option<&str>,
    ) -> Result<(), Failure> {
        let render = |f: Format| -> Result<Option<String>, Failure> {
            Ok(match f {
                Format::Csv => table.map(CsvTable::render).transpose()?,
                Format::Json => Some(
                    serde_json::to_string_pretty(json).map_err(|e| Failure::Compute(format!("json: {e}")))? + "\n",
                ),
                Format::Svg => svg.map(str::to_string),
            })
        };
        match &self.out {
            None if self.formats.is_empty() => print!("{text}"),
            None => {
                for &f in &self.formats {
                    match render(f)? {
                        Some(s) => print!("{s}"),
                        None => eprintln!("note: {stem} has no {} output", f.ext()),
                    }
                }
            }
            Some(dir) => {
                let formats = if self.formats.is_empty() {
                    vec![Format::Csv, Format::Json, Format::Svg]
                } else {
                    self.formats.clone()
                };
                for f in formats {
                    let Some(s) = render(f)? else {
                        if self.formats.contains(&f) {
                            eprintln!("note: {stem} has no {} output", f.ext());
                        }
                        continue;
                    };
                    let path = dir.join(format!("{stem}.{}", f.ext()));
                    fs::write(&path, s)
                        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
                }
                print!("{text}");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_roundtrip() {
        for v in [0.1, -0.25, 1e-300, 123456.789, -1.0 / 3.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_has_header() {
        let t = CsvTable::new(&["a", "b"], vec![vec!["1".into(), "x,y".into()]]);
        assert_eq!(t.render().ok().unwrap(), "a,b\n1,\"x,y\"\n");
    }
}
