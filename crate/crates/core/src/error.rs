use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Dimensions or parameters of a simulation/factor configuration are invalid.
    Config(&'static str),
    /// Truncation level leaves no probability mass (σ_C = 0).
    DegenerateTruncation {
        level: f64,
    },
    /// Lag or panel shape does not fit the requested operation.
    Dimension {
        needed: usize,
        available: usize,
    },
    /// Matrix handed to a Hermitian constructor is not exactly Hermitian.
    NotHermitian {
        row: usize,
        col: usize,
    },
    /// QL iteration hit its per-eigenvalue cap.
    SolverFailure {
        iterations: usize,
    },
    EmptyInput,
    /// Leading coefficient of a cubic is zero.
    Degree,
    /// Evaluation at x = 0 where the cubic for y₀ is singular.
    SingularPoint,
    /// Stieltjes evaluation requested off the upper half-plane.
    HalfPlane {
        im: f64,
    },
    /// Branch selection found `count` admissible branches instead of one.
    BranchAmbiguity {
        count: usize,
    },
    /// Interval with a > b.
    Interval {
        a: f64,
        b: f64,
    },
    /// Adaptive quadrature ran out of subdivisions before reaching tolerance.
    Quadrature {
        error_estimate: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::DegenerateTruncation { level } => {
                write!(f, "truncation at C = {level} removes all mass")
            }
            Error::Dimension { needed, available } => {
                write!(
                    f,
                    "dimension error: need {needed} columns, have {available}"
                )
            }
            Error::NotHermitian { row, col } => {
                write!(f, "matrix is not Hermitian at ({row}, {col})")
            }
            Error::SolverFailure { iterations } => {
                write!(
                    f,
                    "eigensolver did not converge after {iterations} iterations"
                )
            }
            Error::EmptyInput => f.write_str("empty input"),
            Error::Degree => f.write_str("leading coefficient is zero"),
            Error::SingularPoint => f.write_str("cubic for y0 is singular at x = 0"),
            Error::HalfPlane { im } => {
                write!(f, "Stieltjes transform needs Im(z) > 0, got {im}")
            }
            Error::BranchAmbiguity { count } => {
                write!(f, "expected one admissible Stieltjes branch, found {count}")
            }
            Error::Interval { a, b } => write!(f, "empty interval [{a}, {b}]"),
            Error::Quadrature { error_estimate } => {
                write!(
                    f,
                    "quadrature did not converge (error estimate {error_estimate:e})"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
