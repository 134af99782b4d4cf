use core::fmt;

/// Every failure the numerical core can report.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Kernel requested at a point where it diverges (ε = 0 at the origin).
    SingularPoint,
    /// Quadrature could not reach its tolerance within the panel budget.
    QuadratureFailure { reached: f64, panels: usize },
    /// The 3D oracle would need more nodes than its budget allows.
    BudgetExceeded { needed: usize, budget: usize },
    /// Parameters violate a model invariant.
    InvalidParams(&'static str),
    /// Time grid or ensemble shape is unusable.
    InvalidGrid(&'static str),
    /// Action route not allowed for these parameters.
    RouteForbidden(&'static str),
    /// Test function cannot be used as an importance-sampling proposal.
    ProposalMismatch,
    /// A path weight overflowed or became NaN.
    NonFiniteWeight { path: usize, seed: u64, stream: u64 },
    /// Monte Carlo mean was not positive, so its logarithm is undefined.
    NonPositiveEstimate,
    /// Charge profile fails the H^{-1/2} integrability check.
    ProfileNotAdmissible,
    /// Potential failed the analytic Kato-class criterion.
    PreflightFailed,
}

impl Error {
    /// Stable short code used in CSV error rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SingularPoint => "SingularPoint",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::RouteForbidden(_) => "RouteForbidden",
            Error::ProposalMismatch => "ProposalMismatch",
            Error::NonFiniteWeight { .. } => "NonFiniteWeight",
            Error::NonPositiveEstimate => "NonPositiveEstimate",
            Error::ProfileNotAdmissible => "ProfileNotAdmissible",
            Error::PreflightFailed => "PreflightFailed",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularPoint => write!(f, "kernel is singular at this point"),
            Error::QuadratureFailure { reached, panels } => {
                write!(f, "quadrature failed to converge ({panels} panels, reached r = {reached})")
            }
            Error::BudgetExceeded { needed, budget } => {
                write!(f, "oracle needs {needed} nodes, budget is {budget}")
            }
            Error::InvalidParams(m) => write!(f, "invalid parameters: {m}"),
            Error::InvalidGrid(m) => write!(f, "invalid grid: {m}"),
            Error::RouteForbidden(m) => write!(f, "route forbidden: {m}"),
            Error::ProposalMismatch => write!(f, "test function is not a gaussian packet"),
            Error::NonFiniteWeight { path, seed, stream } => {
                write!(f, "non-finite weight on path {path} (seed {seed}, stream {stream})")
            }
            Error::NonPositiveEstimate => write!(f, "Monte Carlo mean is not positive"),
            Error::ProfileNotAdmissible => write!(f, "charge profile is not admissible"),
            Error::PreflightFailed => write!(f, "potential fails the Kato-class criterion"),
        }
    }
}

impl core::error::Error for Error {}
