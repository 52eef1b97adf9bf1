use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A modelling hypothesis on the rates or capacities does not hold.
    Hypothesis(String),
    /// An argument lies outside the domain of the operation.
    InvalidArgument(String),
    /// An invasion coefficient has the wrong sign for the requested object.
    GammaSign {
        name: &'static str,
        value: f64,
        required: &'static str,
    },
    /// Both sides share the same capacities, so no front is pinned at the interface.
    HomogeneousEnvironment,
    /// A point handed to the stability classifier does not zero the right-hand side.
    NotAnEquilibrium { residual: f64 },
    /// Time step above the reaction stability bound.
    TimeStepTooLarge { dt: f64, bound: f64 },
    /// Negative undershoots removed by clamping grew too large.
    ClampOverflow { clamped: f64, mass: f64 },
    ZeroPivot { row: usize },
    /// An internal invariant failed; indicates a bug or a degenerate input.
    Inconsistent(String),
    NonFinite(&'static str),
}

impl Error {
    /// True for errors caused by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ClampOverflow { .. }
                | Error::ZeroPivot { .. }
                | Error::Inconsistent(_)
                | Error::NonFinite(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Hypothesis(msg) => write!(f, "hypothesis violated: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::GammaSign {
                name,
                value,
                required,
            } => write!(f, "{name} = {value:e} but {required} is required"),
            Error::HomogeneousEnvironment => {
                f.write_str("homogeneous environment, front position undetermined")
            }
            Error::NotAnEquilibrium { residual } => {
                write!(f, "point is not an equilibrium (residual {residual:e})")
            }
            Error::TimeStepTooLarge { dt, bound } => write!(
                f,
                "time step {dt:e} exceeds the reaction stability bound; use dt <= {bound:e}"
            ),
            Error::ClampOverflow { clamped, mass } => write!(
                f,
                "clamped negative mass {clamped:e} exceeds 1e-8 of total mass {mass:e}; reduce dt"
            ),
            Error::ZeroPivot { row } => write!(f, "zero pivot in tridiagonal solve at row {row}"),
            Error::Inconsistent(msg) => write!(f, "internal consistency check failed: {msg}"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
