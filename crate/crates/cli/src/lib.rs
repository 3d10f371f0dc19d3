//! Command implementations behind the `hhf` binary. Each writes its table to
//! any `Write` so tests can run them in-process.

pub mod classify;
pub mod fmt;
pub mod report;
pub mod sweep;

use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (csv or json)")),
        }
    }
}
