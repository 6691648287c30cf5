use std::fmt::Debug;
use std::path::Path;

use picturedef::fillings::FillingError;
use picturedef::germ::{GermError, GermParseError};
use picturedef::plumbing::GraphParseError;
use picturedef::{IncidenceError, ParseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error in {path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{name}: {message}")]
    Domain { name: String, message: String },
    #[error("GoldenMismatch: {example} differs from its golden output at line {line}\n  expected: {expected}\n  found:    {found}")]
    GoldenMismatch {
        example: String,
        line: usize,
        expected: String,
        found: String,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } | Self::Parse { .. } | Self::Input { .. } => 2,
            Self::Domain { .. } | Self::GoldenMismatch { .. } => 1,
        }
    }

    pub fn domain<E: Debug + ToString>(e: &E) -> Self {
        Self::Domain {
            name: variant_name(e),
            message: e.to_string(),
        }
    }

    pub fn input(path: &Path, message: impl Into<String>) -> Self {
        Self::Input {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    fn parse(path: &Path, source: ParseError) -> Self {
        Self::Parse {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn from_germ(path: &Path, e: GermParseError) -> Self {
        match e {
            GermParseError::Syntax(p) => Self::parse(path, p),
            GermParseError::Invalid(e) => Self::from(e),
        }
    }

    pub fn from_graph(path: &Path, e: GraphParseError) -> Self {
        match e {
            GraphParseError::Syntax(p) => Self::parse(path, p),
            GraphParseError::Invalid(e) => Self::domain(&e),
        }
    }

    pub fn from_matrices(path: &Path, e: IncidenceError) -> Self {
        match e {
            IncidenceError::Parse(p) => Self::parse(path, p),
            IncidenceError::NegativeEntry { line, column } => {
                Self::parse(path, ParseError::new(line, column, "negative entry"))
            }
            other => Self::from(other),
        }
    }
}

/// The enum variant name of an error, read off its `Debug` form.
fn variant_name<E: Debug>(e: &E) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .next()
        .unwrap_or_default()
        .to_owned()
}

impl From<GermError> for CliError {
    fn from(e: GermError) -> Self {
        match e {
            GermError::Cluster(c) => Self::Domain {
                name: "ClusterError".into(),
                message: c.to_string(),
            },
            other => Self::domain(&other),
        }
    }
}

impl From<IncidenceError> for CliError {
    fn from(e: IncidenceError) -> Self {
        Self::domain(&e)
    }
}

impl From<FillingError> for CliError {
    fn from(e: FillingError) -> Self {
        match e {
            FillingError::Resolution(r) => Self::domain(&r),
            other => Self::domain(&other),
        }
    }
}

impl From<picturedef::ResolutionError> for CliError {
    fn from(e: picturedef::ResolutionError) -> Self {
        Self::domain(&e)
    }
}

impl From<picturedef::PlumbingError> for CliError {
    fn from(e: picturedef::PlumbingError) -> Self {
        Self::domain(&e)
    }
}
