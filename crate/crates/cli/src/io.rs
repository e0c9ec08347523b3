//! File formats: model JSON, dataset CSV (17 significant digits for exact
//! round trips), and JSON result/report envelopes carrying a timestamp
//! plus a full echo of every effective parameter.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fs;
use std::io::Write;
use std::path::Path;

use rgmm::model::{Dataset, EstimationResult, Label, MixtureModel};
use rgmm::theory::SeparationReport;

use crate::{CliError, CliResult};

/// On-disk mixture description. `sigma` is row-major and optional
/// (identity when absent).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    #[serde(default)]
    pub sigma: Option<Vec<Vec<f64>>>,
}

impl ModelSpec {
    pub fn to_model(&self) -> CliResult<MixtureModel> {
        let n = self.mu1.len();
        let sigma = match &self.sigma {
            None => DMatrix::identity(n, n),
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::Validation(format!(
                        "sigma must be {n}x{n} to match mu1"
                    )));
                }
                DMatrix::from_fn(n, n, |i, j| rows[i][j])
            }
        };
        MixtureModel::new(
            self.w1,
            self.w2,
            self.w3,
            DVector::from_vec(self.mu1.clone()),
            DVector::from_vec(self.mu2.clone()),
            sigma,
        )
        .map_err(CliError::from)
    }

    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("model spec serializes")
    }
}

pub fn read_model(path: &Path) -> CliResult<ModelSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Floats printed with 17 significant digits so parsing returns the exact
/// double.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a dataset as CSV: a config-echo comment, a `x1,...,xn[,label]`
/// header, one point per row.
pub fn write_dataset(path: &Path, ds: &Dataset, echo: &Value) -> CliResult<()> {
    let mut out = String::new();
    out.push_str(&format!("# config_echo: {echo}\n"));
    let n = ds.dim();
    let mut header: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    if ds.labels.is_some() {
        header.push("label".into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, p) in ds.points.iter().enumerate() {
        let mut row: Vec<String> = p.iter().map(|&v| format_f64(v)).collect();
        if let Some(labels) = &ds.labels {
            row.push(labels[i].as_str().into());
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads a dataset CSV; `#` lines are skipped, the label column is
/// optional, and malformed rows report their 1-based line number.
pub fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());

    let (header_line_no, header) = lines
        .next()
        .ok_or_else(|| CliError::Io(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let labeled = cols.last() == Some(&"label");
    let n = if labeled { cols.len() - 1 } else { cols.len() };
    if n == 0 {
        return Err(CliError::Io(format!(
            "{}: line {}: no coordinate columns",
            path.display(),
            header_line_no + 1
        )));
    }
    for (j, c) in cols.iter().take(n).enumerate() {
        let expected = format!("x{}", j + 1);
        if *c != expected {
            return Err(CliError::Io(format!(
                "{}: line {}: expected column '{expected}', found '{c}'",
                path.display(),
                header_line_no + 1
            )));
        }
    }

    let mut points = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let expected = if labeled { n + 1 } else { n };
        if fields.len() != expected {
            return Err(CliError::Io(format!(
                "{}: line {}: expected {expected} fields, found {}",
                path.display(),
                line_no + 1,
                fields.len()
            )));
        }
        let mut coords = Vec::with_capacity(n);
        for f in &fields[..n] {
            let v: f64 = f.parse().map_err(|_| {
                CliError::Io(format!(
                    "{}: line {}: invalid float '{f}'",
                    path.display(),
                    line_no + 1
                ))
            })?;
            coords.push(v);
        }
        points.push(DVector::from_vec(coords));
        if labeled {
            let raw = fields[n];
            let label = Label::parse(raw).ok_or_else(|| {
                CliError::Io(format!(
                    "{}: line {}: unknown label '{raw}'",
                    path.display(),
                    line_no + 1
                ))
            })?;
            labels.push(label);
        }
    }
    Dataset::new(points, labeled.then_some(labels), None).map_err(CliError::from)
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// JSON envelope for an estimation result: means, row-major covariance,
/// diagnostics, timestamp and config echo.
pub fn result_json(result: &EstimationResult, echo: &Value) -> Value {
    let n = result.mu1_hat.len();
    let sigma_flat: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| result.sigma_hat[(i, j)])
        .collect();
    json!({
        "timestamp": timestamp(),
        "dim": n,
        "mu1_hat": result.mu1_hat.iter().cloned().collect::<Vec<f64>>(),
        "mu2_hat": result.mu2_hat.iter().cloned().collect::<Vec<f64>>(),
        "sigma_hat": sigma_flat,
        "diagnostics": result.diagnostics,
        "config_echo": echo,
    })
}

pub fn report_json(report: &SeparationReport, echo: &Value) -> Value {
    json!({
        "timestamp": timestamp(),
        "lambda": report.lambda,
        "conditions": report.conditions,
        "sample_bounds": report.sample_bounds,
        "config_echo": echo,
    })
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn print_json(value: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}").map_err(CliError::from)
}
