use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Brute-force enumeration would visit more tuples than the budget allows.
    #[error("enumeration budget exceeded: ~{estimate} tuple visits, budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u64 },

    /// A profile request exceeds the configured memory cap.
    #[error("memory budget exceeded: N={requested} beyond cap {cap}")]
    MemoryBudget { requested: u64, cap: u64 },

    /// An index lies outside the support of a sampled set.
    #[error("index {x} out of range [0, {n_max}]")]
    Range { x: u64, n_max: u64 },

    /// An operation mode does not apply to the given input.
    #[error("mode `{mode}` requires {requirement}")]
    Mode {
        mode: &'static str,
        requirement: &'static str,
    },

    /// The FFT integer round-trip failed its residual check.
    #[error("fft integer round-trip failed: max residual {residual}")]
    PrecisionLoss { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
