use thiserror::Error;

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different fields ({0} and {1})")]
    MixedFields(Field, Field),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is infinite and cannot be enumerated")]
    InfiniteField(Field),
    #[error("enumeration needs {needed} candidates but the budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector is not regular")]
    NotRegular,
    #[error("linear map is not invertible")]
    NotInvertible,
    #[error("linear map is not a similarity")]
    NotSimilarity,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("operation requires characteristic different from 2")]
    CharTwo,
    #[error("bilinear form is degenerate")]
    DegenerateForm,
    #[error("multivectors belong to different algebras")]
    SpaceMismatch,
    #[error("element is zero")]
    ZeroElement,
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("ratio must be nonzero")]
    ZeroRatio,
    #[error("element is not an invertible Lipschitz element")]
    NotLipschitzUnit,
    #[error("algebra dimension {0} exceeds the supported maximum of {max}", max = crate::clifford::MAX_DIM)]
    TooLarge(usize),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
}

impl Error {
    pub(crate) fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            line: 1,
            column: 1,
            message: message.into(),
        }
    }

    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
