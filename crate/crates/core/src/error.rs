use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("unknown generator `{generator}`: surface has {bands} band(s)")]
    UnknownGenerator { generator: char, bands: usize },
    #[error("malformed letter `{0}`")]
    BadLetter(String),
    #[error("too many bands ({0}); at most 26 generators are supported")]
    TooManyBands(usize),
    #[error("RP2 and closed surfaces unsupported: d^2=0 fails over Z")]
    Closed,
    #[error("invalid surface: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("slot {crossing}.{slot} is {problem}")]
    Slot { crossing: usize, slot: u8, problem: &'static str },
    #[error("invalid site: {0}")]
    Site(String),
    #[error("not a permutation of 0..{0}")]
    Permutation(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("d^2 != 0 in block j={j} s={s} at i={i}")]
    NonzeroSquare { i: i64, j: i64, s: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainMapError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("{0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeinError {
    #[error("coefficients cannot be inverted on an unorientable surface")]
    Unorientable,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("monomial {0} is not in the image of the substitution")]
    NotInImage(String),
}
