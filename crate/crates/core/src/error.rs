use crate::lattice::PicardLattice;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("lattice mismatch: {0} vs {1}")]
    LatticeMismatch(PicardLattice, PicardLattice),
    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not an r-class: {0}")]
    NotRClass(String),
    #[error("not a (-2)-class: {0}")]
    NotRoot(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("unknown surface `{0}`")]
    UnknownSurface(String),
    #[error("not an irreducible (-1)-curve: {0}")]
    NotIrreducibleCurve(String),
    #[error("invalid toric system: {0}")]
    InvalidToricSystem(String),
    #[error("invalid segment [{0}..{1}] for length {2}")]
    InvalidSegment(usize, usize, usize),
    #[error("index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("transposition perm_{0} needs A_{0}^2 = -2, found {1}")]
    NotTransposable(usize, i64),
    #[error("registry: {0}")]
    Registry(String),
    #[error("system fails its own grade check: {0}")]
    GradeCheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
