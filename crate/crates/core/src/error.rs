use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{material}: wavelength {wavelength_um} um outside valid range [{min_um}, {max_um}] um")]
    OutOfRange {
        material: String,
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("material table: {0}")]
    MaterialTable(String),
    #[error("phase matching: {0}")]
    PhaseMatching(String),
    #[error("no root of the extremum condition for d0 in [{lower_cm}, {upper_cm}] cm")]
    NoRootInBracket { lower_cm: f64, upper_cm: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("modes {n} and {} are not degenerate: |lambda_n - lambda_n+1| = {gap:e}", n + 1)]
    NonDegeneratePair { n: usize, gap: f64 },
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error("observable undefined: {0}")]
    Undefined(String),
    #[error("no half-maximum crossing inside the grid on the {0} side")]
    Edge(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{}", format_issues(.0))]
    Config(Vec<crate::scenario::ConfigIssue>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_issues(issues: &[crate::scenario::ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    /// True for errors caused by bad input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownMaterial(_) | Error::MaterialTable(_)
        )
    }
}
