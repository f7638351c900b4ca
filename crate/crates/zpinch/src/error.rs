use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by equilibrium construction, energy assembly, eigen-solves,
/// time integration and scaling fits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed user input (grid sizes, profile parameters, ranges).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `−∫₀^r s² p′ ds` became negative, so `B_θ²` would be negative.
    #[error("negative magnetic pressure integral {value:.3e} at r = {r}")]
    NonpositiveIntegrand { r: f64, value: f64 },

    /// The profile fails the admissibility requirements in strict mode.
    #[error("pressure profile is not admissible: {0}")]
    AdmissibilityViolation(String),

    /// Axis extrapolation of `J_z` and `J_z′` did not settle under refinement.
    #[error("axis expansion did not converge: {0}")]
    AxisSingularity(String),

    /// A criterion that must have a negative witness produced none.
    #[error("no negative witness found for the m = {m} criterion")]
    NoWitness { m: i32 },

    /// A `1/r`-weighted integrand was requested at the axis itself.
    #[error("integrand evaluated at the axis r = 0")]
    QuadratureBlowup,

    /// Interface coupling `m B̂ ξ(r₀) = r₀ Q̂(r₀)` or `Q̂(r_w) = 0` violated.
    #[error("interface constraint violated by {0:.3e}")]
    ConstraintViolation(f64),

    /// The vacuum two-point problem could not be solved.
    #[error("vacuum boundary-value problem failed: {0}")]
    BvpFailure(String),

    /// The eigen-iteration hit its iteration cap.
    #[error("eigensolver stalled after {iterations} iterations")]
    SolverStall { iterations: usize },

    /// The eigenvalue still moves between the last two grid refinements.
    #[error(
        "eigenvalue not converged under refinement: last change {change:.3e}, tolerance {tol:.3e}"
    )]
    NonConvergedGrid { change: f64, tol: f64 },

    /// Time step exceeds the explicit stability limit or the ledger drifted.
    #[error("time integration unstable: {0}")]
    StabilityViolation(String),

    /// The trajectory never grew by the factor required for a growth fit.
    #[error("insufficient growth for a rate fit (max amplification {amplification:.3})")]
    InsufficientGrowth { amplification: f64 },

    /// An upper bound on λ turned positive where a negative value was expected.
    #[error("λ upper bound positive ({lambda:.3e}) at k = {k}")]
    SignFlip { k: i64, lambda: f64 },

    /// The scaled test-function support left `(0, r₀)`.
    #[error("test-function support leaves the plasma at k = {k}")]
    SupportOverflow { k: i64 },
}
