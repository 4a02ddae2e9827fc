use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = IronyError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum IronyError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("missing resource `{resource}` ({path})")]
    MissingResource {
        resource: &'static str,
        path: PathBuf,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("task mismatch: {0}")]
    TaskMismatch(String),

    #[error("model file integrity error: {0}")]
    Integrity(String),

    #[error("unsupported model format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("{block} block: {source}")]
    Block {
        block: &'static str,
        #[source]
        source: Box<IronyError>,
    },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<IronyError>,
    },

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl IronyError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IronyError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        IronyError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn in_block(self, block: &'static str) -> Self {
        IronyError::Block {
            block,
            source: Box::new(self),
        }
    }

    pub fn in_fold(self, fold: usize) -> Self {
        IronyError::Fold {
            fold,
            source: Box::new(self),
        }
    }

    /// Innermost error once block/fold attribution is peeled off.
    pub fn root(&self) -> &IronyError {
        match self {
            IronyError::Block { source, .. } | IronyError::Fold { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code for the CLI. `2` is reserved for usage errors.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            IronyError::Io { .. } => 3,
            IronyError::Parse { .. } | IronyError::Validation(_) => 4,
            IronyError::MissingResource { .. } => 5,
            IronyError::Config(_) => 6,
            IronyError::TaskMismatch(_) => 7,
            IronyError::Integrity(_) | IronyError::Version { .. } => 8,
            IronyError::Internal(_) | IronyError::Block { .. } | IronyError::Fold { .. } => 9,
        }
    }

    pub fn category(&self) -> &'static str {
        match self.root() {
            IronyError::Io { .. } => "io",
            IronyError::Parse { .. } => "parse",
            IronyError::Validation(_) => "validation",
            IronyError::MissingResource { .. } => "resource",
            IronyError::Config(_) => "config",
            IronyError::TaskMismatch(_) => "task-mismatch",
            IronyError::Integrity(_) | IronyError::Version { .. } => "model",
            _ => "internal",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attribution_keeps_root_exit_code() {
        let e = IronyError::Config("k".into()).in_block("lsi").in_fold(3);
        assert_eq!(e.exit_code(), 6);
        assert_eq!(e.category(), "config");
        assert!(e.to_string().starts_with("fold 3: lsi block"));
    }
}
