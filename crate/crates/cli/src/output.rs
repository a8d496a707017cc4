//! Deterministic CSV/JSON writers. Every output embeds the resolved config
//! and the seed; the timestamp is the only run-varying field.

use crate::config::ExperimentConfig;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

pub fn timestamp_unix_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// CSV with `# key: value` comment headers. Numeric cells are written with
/// 17 significant digits and '.' decimals, independent of locale.
pub struct CsvDoc {
    lines: Vec<String>,
}

impl CsvDoc {
    pub fn new(command: &str, config: &ExperimentConfig, columns: &str) -> Self {
        let cfg = serde_json::to_string(config).expect("config serializes");
        CsvDoc {
            lines: vec![
                format!("# huplab {command} v1"),
                format!("# config: {cfg}"),
                format!("# seed: {}", config.seed),
                format!("# timestamp_unix_ms: {}", timestamp_unix_ms()),
                columns.to_string(),
            ],
        }
    }

    pub fn row(&mut self, cells: &[CsvCell]) {
        let line = cells
            .iter()
            .map(|c| match c {
                CsvCell::Int(v) => v.to_string(),
                CsvCell::Num(v) => format!("{v:.16e}"),
                CsvCell::Text(s) => s.clone(),
            })
            .collect::<Vec<_>>()
            .join(",");
        self.lines.push(line);
    }

    pub fn finish(self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

pub enum CsvCell {
    Int(i64),
    Num(f64),
    Text(String),
}

/// JSON envelope shared by all report commands.
#[derive(Serialize)]
pub struct JsonDoc<T: Serialize> {
    pub command: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub timestamp_unix_ms: u128,
    pub report: T,
}

pub fn render_json<T: Serialize>(command: &str, config: &ExperimentConfig, report: T) -> String {
    let doc = JsonDoc {
        command: command.to_string(),
        config: config.clone(),
        seed: config.seed,
        timestamp_unix_ms: timestamp_unix_ms(),
        report,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_out(out: Option<&Path>, body: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())
        }
    }
}
