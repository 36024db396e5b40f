// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// The computation ran but missed its goal. Artifacts are still written.
    #[error("{0}")]
    Shortfall(String),

    #[error(transparent)]
    Core(#[from] spinact::Error),

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 1 for domain failures, 2 for usage and configuration errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Shortfall(_) => 1,
            CliError::Core(e) if e.is_domain_failure() => 1,
            CliError::Usage(_) | CliError::Core(_) | CliError::Write { .. } => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
