use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::params::{Format, Params};
use crate::CliError;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Validity {
    /// a/R for the smallest radius involved.
    pub a_over_r: Option<f64>,
    /// Largest |∇ψ| over the integration domain.
    pub max_gradient: Option<f64>,
    pub de_applicable: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub method: String,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub error_estimate: Option<f64>,
}

impl Tolerances {
    pub fn closed_form() -> Self {
        Self {
            method: "closed-form".into(),
            rel_tol: None,
            abs_tol: None,
            error_estimate: None,
        }
    }

    pub fn quadrature(method: &str, rel_tol: f64, error_estimate: Option<f64>) -> Self {
        Self {
            method: method.into(),
            rel_tol: Some(rel_tol),
            abs_tol: None,
            error_estimate,
        }
    }
}

/// Plot-ready rows emitted as CSV in place of the scalar results.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub inputs: Value,
    pub results: Map<String, Value>,
    pub validity: Validity,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &str, params: &Params, validity: Validity, tolerances: Tolerances) -> Self {
        let mut inputs = Map::new();
        inputs.insert("command".into(), command.into());
        if let Value::Object(p) = serde_json::to_value(params).expect("params serialize") {
            inputs.extend(p.into_iter().filter(|(k, v)| !v.is_null() && k != "output"));
        }
        Self {
            inputs: Value::Object(inputs),
            results: Map::new(),
            validity,
            tolerances,
            table: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.into(), value.into());
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        match &self.table {
            Some(t) => {
                w.write_record(&t.header).map_err(io)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(cell)).map_err(io)?;
                }
            }
            None => {
                let scalars: Vec<(&String, &Value)> =
                    self.results.iter().filter(|(_, v)| !v.is_array() && !v.is_object()).collect();
                w.write_record(scalars.iter().map(|(k, _)| k.as_str())).map_err(io)?;
                w.write_record(scalars.iter().map(|(_, v)| cell(v))).map_err(io)?;
            }
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn emit(&self, params: &Params, default: Format) -> Result<(), CliError> {
        let text = self.render(params.format.unwrap_or(default))?;
        match &params.output {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string())),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
