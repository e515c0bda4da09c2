use crate::error::{Error, Result};
use crate::exclusion::StatisticsParams;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Diagnostic {
    Number(f64),
    Integer(i64),
    Flag(bool),
    Text(String),
    Numbers(Vec<f64>),
}

impl From<f64> for Diagnostic {
    fn from(v: f64) -> Self {
        Self::Number(v)
    }
}
impl From<usize> for Diagnostic {
    fn from(v: usize) -> Self {
        Self::Integer(v as i64)
    }
}
impl From<u64> for Diagnostic {
    fn from(v: u64) -> Self {
        Self::Integer(v as i64)
    }
}
impl From<i64> for Diagnostic {
    fn from(v: i64) -> Self {
        Self::Integer(v)
    }
}
impl From<bool> for Diagnostic {
    fn from(v: bool) -> Self {
        Self::Flag(v)
    }
}
impl From<&str> for Diagnostic {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}
impl From<String> for Diagnostic {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}
impl From<Vec<f64>> for Diagnostic {
    fn from(v: Vec<f64>) -> Self {
        Self::Numbers(v)
    }
}

impl Diagnostic {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Number(v) => Some(*v),
            Self::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }
}

/// A lower bound together with every constant and intermediate quantity behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub value: f64,
    pub statistics: Option<StatisticsParams>,
    pub constants_used: BTreeMap<String, f64>,
    pub diagnostics: BTreeMap<String, Diagnostic>,
}

impl BoundReport {
    pub fn new(value: f64, statistics: Option<StatisticsParams>) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("bound value is not finite: {value}")));
        }
        Ok(Self {
            value,
            statistics,
            constants_used: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
        })
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constants_used.insert(name.to_string(), value);
        self
    }

    pub fn with_diagnostic(mut self, name: &str, value: impl Into<Diagnostic>) -> Self {
        self.diagnostics.insert(name.to_string(), value.into());
        self
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.get(name).and_then(Diagnostic::as_f64)
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        match self.diagnostics.get(name) {
            Some(Diagnostic::Flag(b)) => Some(*b),
            _ => None,
        }
    }
}
