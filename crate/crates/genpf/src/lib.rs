//! Generalized Perron-Frobenius theory for nonsquare nonnegative systems.
//!
//! A *system* pairs an `n x m` supporter-gain matrix with an `n x m`
//! repressor-gain matrix (`m >= n`). Each of the `n` entities is backed by
//! one or more supporter affectors and repressed by others; the solver finds
//! the largest `beta` for which some nonnegative assignment `x` satisfies
//! every support-repression constraint, together with an optimal `x` that
//! activates exactly one supporter per entity.
//!
//! The crate provides:
//!
//! - the system model, selections and hidden square subsystems ([`system`]),
//! - constraint graphs and connectivity machinery ([`graph`]),
//! - a polynomial-time irreducibility test with brute-force cross-check
//!   ([`irreducibility`]),
//! - the classical square Perron-Frobenius kernel with an exact
//!   characteristic-polynomial path ([`spectral`]),
//! - an LP feasibility oracle with exact rational pivoting ([`lp`]),
//! - the binary-search + affector-elimination solver ([`solver`]),
//! - a brute-force enumeration oracle ([`oracle`]),
//! - instance generators for wireless power control and input-output
//!   economies ([`apps`]).

pub mod apps;
pub mod corpus;
pub mod graph;
pub mod irreducibility;
pub mod json;
pub mod lp;
pub mod matrix;
pub mod numeric;
pub mod oracle;
pub mod spectral;
pub mod solver;
pub mod system;
pub mod verify;

mod error;

pub use error::Error;
pub use system::{GainSystem, MaxGain, Selection, SystemClass};

pub type Result<T> = std::result::Result<T, Error>;

// Chapters of the guide double as doc-tests so the book's snippets cannot
// drift from the API. `cargo test --doc` runs them.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/irreducibility.md")]
    mod irreducibility {}
    #[doc = include_str!("../../../book/src/square-systems.md")]
    mod square_systems {}
    #[doc = include_str!("../../../book/src/feasibility.md")]
    mod feasibility {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/applications.md")]
    mod applications {}
}
