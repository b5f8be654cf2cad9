use std::fmt;

use crate::system::Violation;

/// Crate-wide error type.
#[derive(Debug, Clone)]
pub enum Error {
    /// A matrix or vector had the wrong length.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// The system violates its structural invariants.
    InvalidSystem(Vec<Violation>),
    /// Removing redundant affectors would leave no affectors at all.
    EmptyAffectorSet,
    /// The supporter-multiplicity pattern fits none of the three system
    /// families.
    Unclassifiable(String),
    /// An operation that requires a square system was called on a nonsquare
    /// one.
    NotSquare,
    /// A selection picked an affector that does not support the entity.
    NotASupporter { entity: usize, affector: usize },
    /// A sub-solution vector does not match the selected subsystem.
    IndexMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Redundant affectors must be stripped before this operation.
    RedundantAffectors(Vec<usize>),
    /// A square kernel operation hit a zero supporter diagonal entry.
    ZeroDiagonal { entity: usize },
    /// The supporter matrix of a square system is not diagonal under the
    /// canonical ordering.
    NondiagonalSupport { entity: usize, affector: usize },
    /// The matrix handed to the square spectral kernel is reducible.
    ReducibleMatrix,
    /// Power iteration did not converge; carries the best iterate found.
    MaxIterExceeded {
        iterations: usize,
        best_root: f64,
        residual: f64,
    },
    /// Exact characteristic-polynomial work is capped at a small dimension.
    DegreeOverLimit { n: usize, limit: usize },
    /// Total support is zero everywhere, so no ratio is defined.
    ZeroSupport,
    /// `beta` must be positive.
    NonpositiveBeta,
    /// Enumerating all selections would exceed the caller's budget.
    BudgetExceeded { required: u128, budget: u64 },
    /// The system is reducible, so the solver contract does not apply.
    Reducible(Box<crate::irreducibility::IrreducibilityReport>),
    /// A selection induced a reducible square system while enumerating an
    /// allegedly irreducible system; signals an upstream bug.
    ReducibleSelection(crate::system::Selection),
    /// No supporter of the entity keeps the partial system feasible; the
    /// bracket is not tight enough.
    NoExtendingSupporter { entity: usize },
    /// The feasibility oracle failed in a way the theory rules out.
    OracleFailed(String),
    /// The solution failed post-hoc verification after all retries.
    VerificationFailed { diagnostics: Vec<String> },
    /// The theoretical gap bound requires integer gains.
    NonIntegerGains,
    /// A generator scenario is degenerate (e.g. a receiver with no
    /// interferers) and is flagged rather than repaired.
    DegenerateScenario(String),
    /// Two scenario elements coincide where a positive distance is needed.
    CoincidentPositions { receiver: usize, transmitter: usize },
    /// A scenario violates its own invariants.
    InvalidScenario(String),
    /// Malformed instance or scenario JSON.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected length {expected}, got {got}"),
            Error::InvalidSystem(violations) => {
                write!(f, "invalid system ({} violations):", violations.len())?;
                for v in violations {
                    write!(f, " {v};")?;
                }
                Ok(())
            }
            Error::EmptyAffectorSet => {
                write!(f, "removing redundant affectors would empty the system")
            }
            Error::Unclassifiable(reason) => write!(f, "unclassifiable system: {reason}"),
            Error::NotSquare => write!(f, "operation requires a square system"),
            Error::NotASupporter { entity, affector } => write!(
                f,
                "affector {affector} is not a supporter of entity {entity}"
            ),
            Error::IndexMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected {expected} entries, got {got}"),
            Error::RedundantAffectors(idx) => {
                write!(f, "redundant affectors present: {idx:?}; strip them first")
            }
            Error::ZeroDiagonal { entity } => {
                write!(f, "zero supporter diagonal entry for entity {entity}")
            }
            Error::NondiagonalSupport { entity, affector } => write!(
                f,
                "supporter matrix not diagonal: entity {entity} gains from column {affector}"
            ),
            Error::ReducibleMatrix => write!(f, "matrix is reducible"),
            Error::MaxIterExceeded {
                iterations,
                best_root,
                residual,
            } => write!(
                f,
                "power iteration did not converge after {iterations} iterations \
                 (best root {best_root}, residual {residual})"
            ),
            Error::DegreeOverLimit { n, limit } => {
                write!(f, "exact path limited to n <= {limit}, got n = {n}")
            }
            Error::ZeroSupport => write!(f, "total support is zero for every entity"),
            Error::NonpositiveBeta => write!(f, "beta must be positive"),
            Error::BudgetExceeded { required, budget } => write!(
                f,
                "enumeration requires {required} selections, budget is {budget}"
            ),
            Error::Reducible(report) => write!(f, "system is reducible: {}", report.summary()),
            Error::ReducibleSelection(sel) => write!(
                f,
                "reducible selection encountered in an allegedly irreducible system: {sel:?}"
            ),
            Error::NoExtendingSupporter { entity } => write!(
                f,
                "no supporter of entity {entity} keeps the system feasible at beta-"
            ),
            Error::OracleFailed(msg) => write!(f, "feasibility oracle failed: {msg}"),
            Error::VerificationFailed { diagnostics } => {
                write!(f, "solution verification failed:")?;
                for d in diagnostics {
                    write!(f, " {d};")?;
                }
                Ok(())
            }
            Error::NonIntegerGains => {
                write!(f, "the theoretical gap bound requires integer gains")
            }
            Error::DegenerateScenario(reason) => write!(f, "degenerate scenario: {reason}"),
            Error::CoincidentPositions {
                receiver,
                transmitter,
            } => write!(
                f,
                "receiver {receiver} coincides with transmitter {transmitter}"
            ),
            Error::InvalidScenario(reason) => write!(f, "invalid scenario: {reason}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
