use std::fmt;
use std::path::PathBuf;

use ffem_core::fem1d::RodError;
use ffem_core::fem2d::FemError;
use ffem_core::linalg::LinalgError;
use ffem_core::mesh::MeshError;
use ffem_core::uq::UqError;
use thiserror::Error;

/// Machine-readable error class, printed as `error[<category>]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Config,
    Scenario,
    SingularSystem,
    Solver,
    Io,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Config => "config",
            Category::Scenario => "scenario",
            Category::SingularSystem => "singular-system",
            Category::Solver => "solver",
            Category::Io => "io",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 2,
            Category::Scenario => 3,
            Category::SingularSystem => 4,
            Category::Solver => 5,
            Category::Io => 6,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Scenario(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Uq(#[from] UqError),
    #[error(transparent)]
    Rod(#[from] RodError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

fn linalg_category(e: &LinalgError) -> Category {
    match e {
        LinalgError::NotPositiveDefinite { .. } | LinalgError::Singular { .. } => {
            Category::SingularSystem
        }
        LinalgError::DimensionMismatch { .. } => Category::Solver,
    }
}

fn fem_category(e: &FemError) -> Category {
    match e {
        FemError::Solve(l) => linalg_category(l),
        FemError::InvalidParameters(_) => Category::Config,
        _ => Category::Solver,
    }
}

impl CliError {
    pub fn category(&self) -> Category {
        match self {
            CliError::Parse { .. } | CliError::Config(_) | CliError::Mesh(_) => Category::Config,
            CliError::Scenario(_) => Category::Scenario,
            CliError::Fem(e) => fem_category(e),
            CliError::Uq(e) => match e {
                UqError::VertexSolve { source, .. } => fem_category(source),
                UqError::NoFuzzyParameter => Category::Scenario,
                UqError::Fuzzy(_) => Category::Config,
                _ => Category::Solver,
            },
            CliError::Rod(e) => match e {
                RodError::Singular(l) => linalg_category(l),
                RodError::InvalidRod(_) | RodError::InvalidStep(_) => Category::Config,
                _ => Category::Solver,
            },
            CliError::Io { .. } | CliError::Csv { .. } => Category::Io,
        }
    }

    /// The single diagnostic line printed on failure.
    pub fn report_line(&self) -> String {
        let msg = self.to_string();
        let msg: Vec<&str> = msg.split_whitespace().collect();
        format!("error[{}]: {}", self.category(), msg.join(" "))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        CliError::Csv {
            path: path.into(),
            source,
        }
    }
}
