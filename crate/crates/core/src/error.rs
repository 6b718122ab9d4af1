use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    IndexOutOfRange { index: usize, len: usize },
    LengthMismatch { expected: usize, found: usize },
    NonPositiveWeight { index: usize, value: f64 },
    /// Diagonal, symmetry or positivity failure of a distance matrix.
    BadDistance { i: usize, j: usize, value: f64, reason: &'static str },
    /// `d(i,k) > d(i,j) + d(j,k)`.
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
    EmptySet,
    TooFewPoints { needed: usize, found: usize },
    BadExponent { index: usize, value: f64, reason: &'static str },
    /// A pointwise precondition failed at `index`.
    Precondition { index: Option<usize>, message: String },
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfRange { index, len } => {
                write!(f, "point index {index} out of range for {len} points")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
            Error::NonPositiveWeight { index, value } => {
                write!(f, "weight of point {index} is {value}, must be > 0")
            }
            Error::BadDistance { i, j, value, reason } => {
                write!(f, "distance d({i},{j}) = {value}: {reason}")
            }
            Error::Triangle { i, j, k, excess } => write!(
                f,
                "triangle inequality fails for ({i},{j},{k}): d({i},{k}) exceeds d({i},{j}) + d({j},{k}) by {excess}"
            ),
            Error::EmptySet => write!(f, "point set is empty"),
            Error::TooFewPoints { needed, found } => {
                write!(f, "need at least {needed} points, found {found}")
            }
            Error::BadExponent { index, value, reason } => {
                write!(f, "exponent value {value} at point {index}: {reason}")
            }
            Error::Precondition { index: Some(i), message } => write!(f, "at point {i}: {message}"),
            Error::Precondition { index: None, message } => write!(f, "{message}"),
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
        }
    }
}

impl core::error::Error for Error {}
