//! Brute-force ground truth: enumerate every hidden square subsystem,
//! solve each classically, and keep the minimum root.
//!
//! The generalized root is by definition the minimum over all complete
//! selections of the square subsystem roots, so this module is the oracle
//! the fast solver is tested against. Selections are independent, so the
//! enumeration runs in parallel and merges deterministically.

use num::bigint::BigInt;
use num::traits::One;
use rayon::prelude::*;

use crate::numeric::Rat;
use crate::spectral::{self, ExactRoot};
use crate::system::{GainSystem, Selection};
use crate::{Error, Result};

/// Relative tolerance for calling two float roots a tie.
pub const TIE_TOL: f64 = 1e-9;

/// One enumerated selection with its square root.
#[derive(Debug, Clone)]
pub struct SelectionRoot {
    pub selection: Selection,
    pub root: f64,
    /// Exact isolating interval, present when the dimension allows it.
    pub exact: Option<ExactRoot>,
}

/// Result of exhaustive enumeration.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Minimum square-subsystem root.
    pub best_root: f64,
    /// `1 / best_root`, the optimal `beta`.
    pub best_beta: f64,
    /// Exact isolating interval of the best root, when available.
    pub best_root_interval: Option<(Rat, Rat)>,
    /// Every selection within [`TIE_TOL`] of the best root (always
    /// including exact char-poly ties), lexicographic order.
    pub optimal_selections: Vec<Selection>,
    /// Per-selection roots, lexicographic order.
    pub table: Vec<SelectionRoot>,
    pub enumerated: u64,
}

/// Enumerates all complete selections and solves each square subsystem.
///
/// Requires an irreducible system; hitting a reducible subsystem mid-way
/// is reported as an error because it contradicts that premise.
pub fn enumerate_solve(system: &GainSystem, budget: u64) -> Result<OracleResult> {
    let count = system.selection_count();
    if count > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: count,
            budget,
        });
    }
    if count == 0 {
        return Err(Error::InvalidSystem(system.validate()));
    }
    let selections: Vec<Selection> = system.selections().collect();
    let exact_limit = spectral::DEFAULT_EXACT_LIMIT;
    let precision = Rat::new(BigInt::one(), BigInt::from(2u8).pow(44));
    let table: Vec<SelectionRoot> = selections
        .into_par_iter()
        .map(|selection| -> Result<SelectionRoot> {
            let sub = system.apply_selection(&selection)?;
            if !crate::irreducibility::is_irreducible_square(&sub.system)? {
                return Err(Error::ReducibleSelection(selection));
            }
            let z = spectral::z_matrix(&sub.system)?;
            let tol = 1e-13;
            let pf = spectral::pf_root_vector(
                &z.to_f64(),
                tol,
                spectral::default_max_iter(system.entities(), tol),
            )?;
            let exact = if system.entities() <= exact_limit {
                Some(spectral::char_poly_root_exact(&z, exact_limit, &precision)?)
            } else {
                None
            };
            Ok(SelectionRoot {
                selection,
                root: pf.root,
                exact,
            })
        })
        .collect::<Result<_>>()?;

    let best_root = table
        .iter()
        .map(|e| e.root)
        .fold(f64::INFINITY, f64::min);
    let best_entry = table
        .iter()
        .find(|e| e.root == best_root)
        .expect("nonempty table");
    let best_poly = best_entry.exact.as_ref().map(|e| e.char_poly.clone());
    let optimal_selections = table
        .iter()
        .filter(|e| {
            let exact_tie = match (&best_poly, &e.exact) {
                (Some(p), Some(q)) => *p == q.char_poly,
                _ => false,
            };
            exact_tie || (e.root - best_root).abs() <= TIE_TOL * best_root.abs().max(1.0)
        })
        .map(|e| e.selection.clone())
        .collect();
    Ok(OracleResult {
        best_root,
        best_beta: 1.0 / best_root,
        best_root_interval: best_entry.exact.as_ref().map(|e| e.interval.clone()),
        optimal_selections,
        table,
        enumerated: count as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::fixtures;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} within {tol}");
    }

    #[test]
    fn all_four_selections_of_sys_a_tie() {
        let r = enumerate_solve(&fixtures::sys_a(), 100).unwrap();
        assert_eq!(r.enumerated, 4);
        approx(r.best_root, 2.0, 1e-12);
        approx(r.best_beta, 0.5, 1e-12);
        assert_eq!(r.optimal_selections.len(), 4);
        assert!(r.table.iter().all(|e| (e.root - 2.0).abs() < 1e-10));
    }

    #[test]
    fn sys_b_table_has_two_distinct_roots() {
        let r = enumerate_solve(&fixtures::sys_b(), 100).unwrap();
        assert_eq!(r.enumerated, 2);
        let roots: Vec<f64> = r.table.iter().map(|e| e.root).collect();
        approx(roots[0], 1.0, 1e-12);
        approx(roots[1], 1.0 / 2.0_f64.sqrt(), 1e-12);
        approx(r.best_beta, 2.0_f64.sqrt(), 1e-10);
        assert_eq!(r.optimal_selections.len(), 1);
        assert_eq!(r.optimal_selections[0].affectors(), vec![0, 2]);
    }

    #[test]
    fn square_system_has_single_entry() {
        let r = enumerate_solve(&fixtures::sys_c(), 100).unwrap();
        assert_eq!(r.enumerated, 1);
        approx(r.best_root, 2.0_f64.sqrt(), 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_solve(&fixtures::sys_a(), 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn reducible_selection_is_reported() {
        // SYS-D violates the irreducibility premise.
        assert!(matches!(
            enumerate_solve(&fixtures::sys_d(), 100),
            Err(Error::ReducibleSelection(_))
        ));
    }

    #[test]
    fn min_root_bounds_table() {
        let r = enumerate_solve(&fixtures::sys_b(), 100).unwrap();
        assert!(r.table.iter().all(|e| e.root >= r.best_root - 1e-15));
    }

    #[test]
    fn best_interval_contains_best_root() {
        let r = enumerate_solve(&fixtures::sys_b(), 100).unwrap();
        let (lo, hi) = r.best_root_interval.clone().unwrap();
        let lo = crate::numeric::rat_to_f64(&lo);
        let hi = crate::numeric::rat_to_f64(&hi);
        assert!(r.best_root >= lo - 1e-9 && r.best_root <= hi + 1e-9);
    }
}
