use thiserror::Error;

/// Failure modes of the engine. Variant names are surfaced verbatim by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("NotNormal: {0}")]
    NotNormal(String),
    #[error("UnsupportedLeading: {0}")]
    UnsupportedLeading(String),
    #[error("NotOnSolutionSpace: expression does not vanish on the solution space")]
    NotOnSolutionSpace,
    #[error("NotADivergence: Euler operator does not annihilate the expression")]
    NotADivergence,
    #[error("NotConserved: current is not conserved on the solution space")]
    NotConserved,
    #[error("NotAMultiplier: E_u(Q G) does not vanish identically")]
    NotAMultiplier,
    #[error("NotAdjointSymmetry: G'*(Q) does not vanish on the solution space")]
    NotAdjointSymmetry,
    #[error("NotASymmetry: G'(P) does not vanish on the solution space")]
    NotASymmetry,
    #[error("TrivialMultiplier: multiplier vanishes on the solution space")]
    TrivialMultiplier,
    #[error("NotClosed: symmetry action leaves the span of the multiplier basis")]
    NotClosed,
    #[error("DependentBasis: multiplier basis is linearly dependent on the solution space")]
    DependentBasis,
    #[error("InvalidAnsatz: {0}")]
    InvalidAnsatz(String),
    #[error("SyntaxError at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("NonPolynomial at {pos}: division by a non-constant expression")]
    NonPolynomial { pos: usize },
    #[error("SessionError: {0}")]
    Session(String),
}

impl Error {
    /// Bare variant name, e.g. `NotNormal`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotNormal(_) => "NotNormal",
            Error::UnsupportedLeading(_) => "UnsupportedLeading",
            Error::NotOnSolutionSpace => "NotOnSolutionSpace",
            Error::NotADivergence => "NotADivergence",
            Error::NotConserved => "NotConserved",
            Error::NotAMultiplier => "NotAMultiplier",
            Error::NotAdjointSymmetry => "NotAdjointSymmetry",
            Error::NotASymmetry => "NotASymmetry",
            Error::TrivialMultiplier => "TrivialMultiplier",
            Error::NotClosed => "NotClosed",
            Error::DependentBasis => "DependentBasis",
            Error::InvalidAnsatz(_) => "InvalidAnsatz",
            Error::Syntax { .. } => "SyntaxError",
            Error::NonPolynomial { .. } => "NonPolynomial",
            Error::Session(_) => "SessionError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
