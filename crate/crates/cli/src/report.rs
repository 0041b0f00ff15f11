//! Output sinks and the mapping from failures to exit codes.

use std::io::Write;
use std::path::PathBuf;

use serde_json::Value;

use hombundle_core::{CatalogError, CertifyError, GeoError, IsoError, RingError};

use crate::{Format, OutArgs};

/// Exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(m: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: m.into(),
        }
    }

    pub fn check(m: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: m.into(),
        }
    }
}

macro_rules! check_failure {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::check(e.to_string())
            }
        }
    )*};
}

check_failure!(RingError, IsoError, GeoError, CertifyError);

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::NonpositiveAlpha { .. } | CatalogError::SphereTooSmall { .. } => {
                Failure::usage(e.to_string())
            }
            _ => Failure::check(e.to_string()),
        }
    }
}

pub struct Output {
    pub format: Format,
    path: Option<PathBuf>,
}

impl Output {
    pub fn new(args: &OutArgs, default: Format, allowed: &[Format]) -> Result<Self, Failure> {
        let format = args.format.unwrap_or(default);
        if !allowed.contains(&format) {
            return Err(Failure::usage(format!(
                "format {format:?} not supported here"
            )));
        }
        Ok(Output {
            format,
            path: args.out.clone(),
        })
    }

    pub fn write(&self, text: &str) -> Result<(), Failure> {
        let res = match &self.path {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        };
        res.map_err(|e| Failure::check(format!("writing output: {e}")))
    }

    pub fn write_json(&self, v: &Value) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(v).expect("report serializes");
        s.push('\n');
        self.write(&s)
    }
}
