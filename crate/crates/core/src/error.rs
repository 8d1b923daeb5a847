use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {requested} table entries requested, limit is {limit}")]
    Capacity { requested: u64, limit: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("cost budget exceeded: about {estimated:.3e} operations needed, budget is {budget:.3e}")]
    Cost { estimated: f64, budget: f64 },

    #[error("degree must lie in 1..=6 (got {0})")]
    Degree(u32),

    #[error("coverage error: {0}")]
    Coverage(String),

    /// A standing parameter hypothesis failed; `constraint` names it.
    #[error("{constraint} violated: {context}")]
    Hypothesis {
        constraint: &'static str,
        context: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cache file error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
