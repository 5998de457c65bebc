use thiserror::Error;

use crate::scalar::ScalarError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("operands live on different charts (`{0}` vs `{1}`)")]
    ChartMismatch(String, String),
    #[error("degree {0} exceeds what this object supports")]
    DegreeOverflow(usize),
    #[error("coordinate maps are not mutually inverse: {0}")]
    NotInverse(String),
    #[error("denominator `{0}` is not certified nonvanishing on the target chart")]
    DenominatorNotCertified(String),
    #[error("sections are of different kinds")]
    KindMismatch,
    #[error("the minus pairing is not defined for E1 sections")]
    MinusPairingUndefinedForE1,
    #[error("frame is not isotropic: <e{i}, e{j}> = {value}")]
    NotIsotropic { i: usize, j: usize, value: String },
    #[error("rank not certified: {0}")]
    RankNotCertified(String),
    #[error("expected {expected} generators, got {got}")]
    WrongFrameSize { expected: usize, got: usize },
    #[error("point outside the domain: {0}")]
    PointOutsideDomain(String),
    #[error("no solution over the fraction field")]
    NoSolutionOverFractionField,
    #[error("function is not admissible: {0}")]
    NotAdmissible(String),
    #[error("function is not basic: {0}")]
    NotBasic(String),
    #[error("regraph not possible: {0}")]
    RegraphNotInvertible(String),
    #[error("form is not contact: {0}")]
    NotContact(String),
    #[error("bracket of frame generators {0} and {1} leaves the span")]
    BracketNotInSpan(usize, usize),
    #[error("Omega is not closed: d Omega = {0}")]
    OmegaNotClosed(String),
    #[error("could not solve for an isotropic pair; supply A and alpha explicitly")]
    SolverNeedsExplicitPair,
    #[error("no xi with A + xi in L: {0}")]
    XiANotSolvable(String),
    #[error("supplied data invalid: {0}")]
    SuppliedDataInvalid(String),
    #[error("section not in the polarized domain: {0}")]
    NotInDomain(String),
    #[error("coefficient `{0}` is not polynomial at the point")]
    NonPolynomialAtPoint(String),
    #[error("denominator `{0}` survives the substitution")]
    FractionalPowerResidue(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
