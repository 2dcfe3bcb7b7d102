use std::fmt;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A measure that is only defined on supporting transactions was asked
    /// for a pattern with none.
    #[error("undefined measure: {0}")]
    UndefinedMeasure(String),

    #[error("no unit utility for item '{item}'{}", at_line(*.line))]
    MissingUtility { item: String, line: Option<usize> },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("value out of range at line {line}, column {column}: {message}")]
    Range {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid database ({} violation(s)): {}", .0.len(), first_violation(.0))]
    Validation(Vec<Violation>),

    #[error("enumeration budget of {budget} itemsets exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn at_line(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" (line {l})"),
        None => String::new(),
    }
}

fn first_violation(v: &[Violation]) -> String {
    v.first().map(|v| v.to_string()).unwrap_or_default()
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }

    pub(crate) fn range(line: usize, column: usize, message: impl fmt::Display) -> Self {
        Error::Range {
            line,
            column,
            message: message.to_string(),
        }
    }
}
