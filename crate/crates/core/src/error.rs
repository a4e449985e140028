use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix data has {got} entries, expected {rows}x{cols}")]
    Shape { rows: usize, cols: usize, got: usize },

    #[error("dimension mismatch: {what} ({left} vs {right})")]
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("the all-ones vector is not in the column space of the design matrix")]
    JNotInColumnSpace,

    #[error("vector is not in the kernel of the circuit basis matrix")]
    NotInKernel,

    #[error("vector is not a randomisation vector: {0}")]
    NotARandomisationVector(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid directed graph: {0}")]
    InvalidGraph(String),

    #[error("directed graph is not balanced: vertex {vertex} has out-degree {out_degree} and in-degree {in_degree}")]
    NotBalanced {
        vertex: usize,
        out_degree: usize,
        in_degree: usize,
    },

    #[error("invalid latin square: {0}")]
    InvalidLatinSquare(String),

    #[error("{what} is out of budget: {detail}")]
    OutOfBudget { what: &'static str, detail: String },

    #[error("total unimodularity check needs {submatrices} submatrix determinants, cap is {cap}")]
    TooLarge { submatrices: u128, cap: u128 },

    #[error("design with blocks is rank deficient")]
    RankDeficient,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
