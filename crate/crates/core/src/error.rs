use std::path::PathBuf;

use thiserror::Error;

use crate::table::ColumnType;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exhausted: {what} holds {len} of at most {limit}")]
    CapacityExhausted {
        what: &'static str,
        len: usize,
        limit: usize,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: String,
        message: String,
    },

    #[error("arity mismatch at line {line}: expected {expected} fields, found {found}")]
    Arity { line: usize, expected: usize, found: usize },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("type mismatch on column `{column}`: expected {expected}, found {found}")]
    TypeMismatch {
        column: String,
        expected: String,
        found: ColumnType,
    },

    #[error("schemas differ: {0}")]
    SchemaMismatch(String),

    #[error("unknown node {0}")]
    UnknownNode(i64),

    #[error("graph is empty")]
    EmptyGraph,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node values cover {values} ids but the graph has {nodes} nodes (first mismatch: {example})")]
    Coverage { values: usize, nodes: usize, example: i64 },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn type_mismatch(column: &str, expected: impl Into<String>, found: ColumnType) -> Self {
        Error::TypeMismatch {
            column: column.to_string(),
            expected: expected.into(),
            found,
        }
    }
}
