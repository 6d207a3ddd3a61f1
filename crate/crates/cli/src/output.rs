//! Tables written as CSV (header row, complex values split into _re/_im
//! columns) or as JSON ({"metadata": …, "records": [...]}).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::config::{complex_json, Format};
use crate::error::CliError;

#[derive(Clone, Copy, Debug)]
pub enum Column {
    Plain(&'static str),
    Complex(&'static str),
}

#[derive(Clone, Debug)]
pub enum Cell {
    Value(Value),
    Complex(Complex64),
}

impl From<Complex64> for Cell {
    fn from(z: Complex64) -> Self {
        Cell::Complex(z)
    }
}

macro_rules! plain_cell {
    ($($t:ty),*) => {
        $(impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Value(v.into())
            }
        })*
    };
}

plain_cell!(i64, u32, usize, f64, bool, String, &str, Value);

#[derive(Clone, Debug)]
pub struct Table {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    fn header(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|c| match c {
                Column::Plain(name) => vec![name.to_string()],
                Column::Complex(name) => vec![format!("{name}_re"), format!("{name}_im")],
            })
            .collect()
    }

    fn records(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let mut rec = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    let name = match col {
                        Column::Plain(n) | Column::Complex(n) => n.to_string(),
                    };
                    let value = match cell {
                        Cell::Value(v) => v.clone(),
                        Cell::Complex(z) => complex_json(*z),
                    };
                    rec.insert(name, value);
                }
                Value::Object(rec)
            })
            .collect()
    }

    pub fn write(&self, metadata: Map<String, Value>, format: Format, output: Option<&Path>) -> Result<(), CliError> {
        let sink: Box<dyn Write> = match output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        };
        match format {
            Format::Json => {
                let doc = serde_json::json!({"metadata": metadata, "records": self.records()});
                write_json(sink, &doc)
            }
            Format::Csv => {
                eprintln!("# {}", Value::Object(metadata));
                let mut w = csv::Writer::from_writer(sink);
                w.write_record(self.header())?;
                for row in &self.rows {
                    let mut fields = Vec::new();
                    for cell in row {
                        match cell {
                            Cell::Value(Value::String(s)) => fields.push(s.clone()),
                            Cell::Value(v) => fields.push(v.to_string()),
                            Cell::Complex(z) => {
                                fields.push(float_text(z.re));
                                fields.push(float_text(z.im));
                            }
                        }
                    }
                    w.write_record(&fields)?;
                }
                w.flush()?;
                Ok(())
            }
        }
    }
}

pub fn write_json(mut sink: impl Write, doc: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut sink, doc)?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}

/// Same text serde_json would produce, so CSV and JSON agree digit for digit.
fn float_text(x: f64) -> String {
    Value::from(x).to_string()
}
