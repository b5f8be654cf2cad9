//! The feasibility oracle: given `beta`, decide whether some nonnegative
//! `x` with unit L1 norm satisfies every support-repression constraint.
//!
//! The oracle minimizes the worst constraint violation
//! `t* = min_x max_i ((repressors - (1/beta) supporters) x)_i` over the
//! simplex, so the verdict is `t* <= 0` and the minimizer doubles as a
//! witness. Minimizing the violation (rather than asking an LP solver a
//! yes/no question) makes the verdict monotone in `beta` even in float
//! arithmetic. Pivoting follows Bland's rule; the exact mode runs the same
//! simplex over rationals, which is what makes verdicts decisive next to
//! the optimum where float tolerances blur the boundary.

use num::traits::{Signed, Zero};

use crate::numeric::{rat_from_f64, rat_to_f64, Rat};
use crate::system::GainSystem;
use crate::{Error, Result};

/// Tolerance on constraint satisfaction in float mode.
pub const FLOAT_TOL: f64 = 1e-9;

/// Pivot threshold for float simplex arithmetic.
const FLOAT_PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticMode {
    Float,
    Exact,
}

impl std::fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArithmeticMode::Float => write!(f, "float"),
            ArithmeticMode::Exact => write!(f, "exact"),
        }
    }
}

/// Outcome of one oracle call.
#[derive(Debug, Clone)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// L1-normalized witness when feasible.
    pub witness: Option<Vec<f64>>,
    /// Exact witness, in exact mode.
    pub witness_exact: Option<Vec<Rat>>,
    /// Smallest achievable worst-case violation when infeasible.
    pub max_violation: Option<f64>,
    pub mode: ArithmeticMode,
}

/// Decides feasibility of the system at `beta > 0`.
///
/// Float mode certifies its witness against [`FLOAT_TOL`] and falls back
/// to exact arithmetic when certification fails.
pub fn feasible(system: &GainSystem, beta: &Rat, mode: ArithmeticMode) -> Result<FeasibilityVerdict> {
    if !beta.is_positive() {
        return Err(Error::NonpositiveBeta);
    }
    match mode {
        ArithmeticMode::Exact => feasible_exact(system, beta),
        ArithmeticMode::Float => {
            let verdict = feasible_float(system, beta)?;
            if verdict.feasible {
                // Certify the witness; a wobbly basis retries exactly.
                let witness = verdict.witness.as_ref().expect("feasible carries witness");
                let res = residuals_f64(system, witness, rat_to_f64(beta))?;
                let scale = max_abs(system, beta);
                if res.iter().any(|&r| r < -FLOAT_TOL * scale.max(1.0)) {
                    return feasible_exact(system, beta);
                }
            }
            Ok(verdict)
        }
    }
}

/// Convenience wrapper converting a float `beta` exactly.
pub fn feasible_f64(system: &GainSystem, beta: f64, mode: ArithmeticMode) -> Result<FeasibilityVerdict> {
    feasible(system, &rat_from_f64(beta)?, mode)
}

/// Per-entity slack `(1/beta) * total_support_i - total_repression_i`;
/// nonnegative everywhere iff `x` is feasible for `beta`.
pub fn residuals(system: &GainSystem, x: &[f64], beta: f64) -> Result<Vec<f64>> {
    if beta <= 0.0 {
        return Err(Error::NonpositiveBeta);
    }
    let (tot_s, tot_r) = system.totals(x)?;
    Ok(tot_s
        .iter()
        .zip(&tot_r)
        .map(|(s, r)| s / beta - r)
        .collect())
}

/// Plain float residuals, for hot-path certification.
fn residuals_f64(system: &GainSystem, x: &[f64], beta: f64) -> Result<Vec<f64>> {
    if x.len() != system.affectors() {
        return Err(Error::DimensionMismatch {
            what: "assignment",
            expected: system.affectors(),
            got: x.len(),
        });
    }
    let sup = system.supporter_gains();
    let rep = system.repressor_gains();
    Ok((0..system.entities())
        .map(|i| {
            let mut s = 0.0;
            let mut r = 0.0;
            for (j, xj) in x.iter().enumerate() {
                s += rat_to_f64(sup.get(i, j)) * xj;
                r += rat_to_f64(rep.get(i, j)) * xj;
            }
            s / beta - r
        })
        .collect())
}

/// Exact residuals for rational data.
pub fn residuals_exact(system: &GainSystem, x: &[Rat], beta: &Rat) -> Result<Vec<Rat>> {
    if !beta.is_positive() {
        return Err(Error::NonpositiveBeta);
    }
    let (tot_s, tot_r) = system.totals_exact(x)?;
    Ok(tot_s
        .iter()
        .zip(&tot_r)
        .map(|(s, r)| s / beta - r)
        .collect())
}

fn max_abs(system: &GainSystem, beta: &Rat) -> f64 {
    let g = system.max_gain().to_f64();
    let inv = 1.0 / rat_to_f64(beta);
    g.max(g * inv)
}

fn constraint_rows_exact(system: &GainSystem, beta: &Rat) -> Vec<Vec<Rat>> {
    let n = system.entities();
    let m = system.affectors();
    let inv = beta.recip();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    system.repressor_gains().get(i, j)
                        - system.supporter_gains().get(i, j) * &inv
                })
                .collect()
        })
        .collect()
}

fn feasible_exact(system: &GainSystem, beta: &Rat) -> Result<FeasibilityVerdict> {
    let rows = constraint_rows_exact(system, beta);
    // Clearing denominators row by row leaves the verdict and the witness
    // set unchanged (each row is scaled by a positive constant) but keeps
    // the pivot arithmetic on small integers.
    let scaled: Vec<Vec<Rat>> = rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(num::BigInt::from(1), |acc, v| {
                num::integer::lcm(acc, v.denom().clone())
            });
            let factor = Rat::from_integer(lcm);
            row.iter().map(|v| v * &factor).collect()
        })
        .collect();
    let (t_star, x) = simplex::min_max_violation(&scaled, &Rat::zero())?;
    let feasible = !t_star.is_positive();
    // Report the violation against the unscaled constraints.
    let max_violation = (!feasible).then(|| {
        rows.iter()
            .map(|row| {
                row.iter()
                    .zip(&x)
                    .map(|(c, xi)| c * xi)
                    .fold(Rat::zero(), |acc, v| acc + v)
            })
            .fold(f64::NEG_INFINITY, |acc, v| acc.max(rat_to_f64(&v)))
    });
    Ok(FeasibilityVerdict {
        feasible,
        witness: feasible.then(|| x.iter().map(rat_to_f64).collect()),
        witness_exact: feasible.then_some(x),
        max_violation,
        mode: ArithmeticMode::Exact,
    })
}

/// Unbiased float verdict for internal bisection: no feasibility slack, so
/// the sign flip happens within float rounding of the true threshold.
pub(crate) fn feasible_float_unbiased(system: &GainSystem, beta: f64) -> Result<bool> {
    if beta <= 0.0 {
        return Err(Error::NonpositiveBeta);
    }
    let n = system.entities();
    let m = system.affectors();
    let inv = 1.0 / beta;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    rat_to_f64(system.repressor_gains().get(i, j))
                        - rat_to_f64(system.supporter_gains().get(i, j)) * inv
                })
                .collect()
        })
        .collect();
    let scale = system.max_gain().to_f64().max(1.0) * inv.max(1.0);
    let (t_star, _) = simplex::min_max_violation(&rows, &(FLOAT_PIVOT_EPS * scale))?;
    Ok(t_star <= 0.0)
}

fn feasible_float(system: &GainSystem, beta: &Rat) -> Result<FeasibilityVerdict> {
    let n = system.entities();
    let m = system.affectors();
    let inv = 1.0 / rat_to_f64(beta);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    rat_to_f64(system.repressor_gains().get(i, j))
                        - rat_to_f64(system.supporter_gains().get(i, j)) * inv
                })
                .collect()
        })
        .collect();
    let scale = max_abs(system, beta).max(1.0);
    let (t_star, x) = simplex::min_max_violation(&rows, &(FLOAT_PIVOT_EPS * scale))?;
    let feasible = t_star <= FLOAT_TOL * scale;
    Ok(FeasibilityVerdict {
        feasible,
        witness: feasible.then_some(x),
        witness_exact: None,
        max_violation: (!feasible).then_some(t_star),
        mode: ArithmeticMode::Float,
    })
}

/// Dense two-phase tableau simplex, generic over the scalar so the same
/// pivoting runs in floats and in exact rationals.
pub mod simplex {
    use super::*;

    /// Scalar requirements for the tableau.
    pub trait LpScalar: Clone + PartialOrd + Signed + std::fmt::Debug {}
    impl<T: Clone + PartialOrd + Signed + std::fmt::Debug> LpScalar for T {}

    /// Minimizes `max_i (C x)_i` subject to `sum x = 1`, `x >= 0`.
    ///
    /// Returns the optimal violation `t*` and a minimizer. Columns:
    /// `m` variables, the split objective `t = u - w`, `n` row slacks and
    /// one artificial for the simplex-sum row.
    pub fn min_max_violation<T: LpScalar>(c_rows: &[Vec<T>], eps: &T) -> Result<(T, Vec<T>)> {
        let n = c_rows.len();
        let m = c_rows.first().map(Vec::len).unwrap_or(0);
        if m == 0 {
            return Err(Error::DimensionMismatch {
                what: "constraint matrix",
                expected: 1,
                got: 0,
            });
        }
        let cols = m + 2 + n + 1;
        let art = cols - 1;
        let (u_col, w_col) = (m, m + 1);

        // Rows 0..n: C x - u + w + s_i = 0. Row n: sum x + a = 1.
        let mut tab: Vec<Vec<T>> = Vec::with_capacity(n + 1);
        for row in c_rows.iter() {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "constraint row",
                    expected: m,
                    got: row.len(),
                });
            }
            let mut r = vec![T::zero(); cols];
            r[..m].clone_from_slice(row);
            r[u_col] = -T::one();
            r[w_col] = T::one();
            tab.push(r);
        }
        for (i, row) in tab.iter_mut().enumerate() {
            row[m + 2 + i] = T::one();
        }
        let mut sum_row = vec![T::zero(); cols];
        for c in sum_row.iter_mut().take(m) {
            *c = T::one();
        }
        sum_row[art] = T::one();
        tab.push(sum_row);
        let mut rhs = vec![T::zero(); n + 1];
        rhs[n] = T::one();
        let mut basis: Vec<usize> = (0..n).map(|i| m + 2 + i).collect();
        basis.push(art);

        // Phase 1: minimize the artificial variable.
        let mut cost = vec![T::zero(); cols];
        cost[art] = T::one();
        run(&mut tab, &mut rhs, &mut basis, &cost, None, eps)?;
        if let Some(row) = basis.iter().position(|&b| b == art) {
            if rhs[row].abs() > *eps {
                return Err(Error::OracleFailed(
                    "phase 1 ended with a positive artificial".into(),
                ));
            }
            // Degenerate zero-level artificial: pivot it out so later
            // pivots cannot push it positive again.
            match (0..cols).find(|&j| j != art && tab[row][j].abs() > *eps) {
                Some(j) => {
                    pivot(&mut tab, &mut rhs, row, j);
                    basis[row] = j;
                }
                None => {
                    return Err(Error::OracleFailed(
                        "degenerate artificial row has no pivot".into(),
                    ))
                }
            }
        }

        // Phase 2: minimize u - w; the artificial may no longer enter.
        let mut cost = vec![T::zero(); cols];
        cost[u_col] = T::one();
        cost[w_col] = -T::one();
        run(&mut tab, &mut rhs, &mut basis, &cost, Some(art), eps)?;

        let value = |col: usize| {
            basis
                .iter()
                .position(|&b| b == col)
                .map(|i| rhs[i].clone())
                .unwrap_or_else(T::zero)
        };
        let t_star = value(u_col) - value(w_col);
        let x: Vec<T> = (0..m).map(value).collect();
        Ok((t_star, x))
    }

    /// Bland-rule simplex loop: entering variable is the lowest-index
    /// column with negative reduced cost, leaving row breaks ratio ties by
    /// lowest basic index. Terminates on any (possibly degenerate) LP.
    fn run<T: LpScalar>(
        tab: &mut [Vec<T>],
        rhs: &mut [T],
        basis: &mut [usize],
        cost: &[T],
        banned: Option<usize>,
        eps: &T,
    ) -> Result<()> {
        let rows = tab.len();
        let cols = cost.len();
        // Bland's rule guarantees termination; the cap only turns a float
        // numeric failure into an error instead of a hang.
        let max_pivots = 200 * (rows + cols) * (rows + cols);
        for _ in 0..max_pivots {
            let entering = (0..cols).find(|&j| {
                if Some(j) == banned || basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (i, row) in tab.iter().enumerate() {
                    let cb = &cost[basis[i]];
                    if !cb.is_zero() {
                        d = d - cb.clone() * row[j].clone();
                    }
                }
                d < -eps.clone()
            });
            let Some(j) = entering else { return Ok(()) };
            let mut leave: Option<usize> = None;
            for i in 0..rows {
                if tab[i][j] > *eps {
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            let lhs = rhs[i].clone() * tab[l][j].clone();
                            let rhs_v = rhs[l].clone() * tab[i][j].clone();
                            match lhs.partial_cmp(&rhs_v) {
                                Some(std::cmp::Ordering::Less) => true,
                                Some(std::cmp::Ordering::Equal) => basis[i] < basis[l],
                                _ => false,
                            }
                        }
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
            let Some(l) = leave else {
                return Err(Error::OracleFailed("unbounded pivot column".into()));
            };
            pivot(tab, rhs, l, j);
            basis[l] = j;
        }
        Err(Error::OracleFailed("pivot limit exceeded".into()))
    }

    fn pivot<T: LpScalar>(tab: &mut [Vec<T>], rhs: &mut [T], l: usize, j: usize) {
        let p = tab[l][j].clone();
        for v in tab[l].iter_mut() {
            *v = v.clone() / p.clone();
        }
        rhs[l] = rhs[l].clone() / p.clone();
        for i in 0..tab.len() {
            if i == l {
                continue;
            }
            let f = tab[i][j].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..tab[i].len() {
                let delta = f.clone() * tab[l][c].clone();
                tab[i][c] = tab[i][c].clone() - delta;
            }
            let delta = f * rhs[l].clone();
            rhs[i] = rhs[i].clone() - delta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, rat_int};
    use crate::system::fixtures;

    #[test]
    fn sys_b_feasible_at_one() {
        let sys = fixtures::sys_b();
        for mode in [ArithmeticMode::Float, ArithmeticMode::Exact] {
            let v = feasible(&sys, &rat_int(1), mode).unwrap();
            assert!(v.feasible, "mode {mode}");
            let w = v.witness.unwrap();
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let res = residuals(&sys, &w, 1.0).unwrap();
            assert!(res.iter().all(|&r| r >= -1e-9));
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn sys_b_feasible_near_sqrt2_infeasible_above() {
        let sys = fixtures::sys_b();
        // Deliberately a truncated approximation strictly below sqrt(2).
        let near = rat_from_f64(1.41421356).unwrap();
        assert!(feasible(&sys, &near, ArithmeticMode::Exact).unwrap().feasible);
        let v = feasible(&sys, &rat(3, 2), ArithmeticMode::Exact).unwrap();
        assert!(!v.feasible);
        assert!(v.max_violation.unwrap() > 0.0);
    }

    #[test]
    fn known_witness_is_certified() {
        // (2, 1/2, 0) rescaled to the simplex is feasible at beta = 1.
        let sys = fixtures::sys_b();
        let w = [0.8, 0.2, 0.0];
        let res = residuals(&sys, &w, 1.0).unwrap();
        assert!(res.iter().all(|&r| r.abs() < 1e-12));
    }

    #[test]
    fn residuals_on_known_boundary_points() {
        let sys = fixtures::sys_b();
        let res = residuals(&sys, &[2.0, 0.5, 0.0], 1.0).unwrap();
        assert!(res.iter().all(|&r| r.abs() < 1e-12));
        let res = residuals(&sys, &[0.0, 0.0, 0.0], 4.0).unwrap();
        assert_eq!(res, vec![0.0, 0.0]);
        // All mass on one affector violates some constraint at beta equal
        // to the largest gain.
        let res = residuals(&sys, &[1.0, 0.0, 0.0], 4.0).unwrap();
        assert!(res.iter().any(|&r| r < 0.0));
    }

    #[test]
    fn verdicts_monotone_in_beta() {
        let sys = fixtures::sys_b();
        let mut seen_infeasible = false;
        for k in 1..=40 {
            let beta = rat(k, 20);
            let v = feasible(&sys, &beta, ArithmeticMode::Exact).unwrap();
            if seen_infeasible {
                assert!(!v.feasible, "feasible-above-infeasible at beta {k}/20");
            }
            if !v.feasible {
                seen_infeasible = true;
            }
        }
        assert!(seen_infeasible);
    }

    #[test]
    fn exact_boundary_is_closed_for_rational_optimum() {
        // SYS-A has optimum beta = 1/2 exactly.
        let sys = fixtures::sys_a();
        assert!(feasible(&sys, &rat(1, 2), ArithmeticMode::Exact)
            .unwrap()
            .feasible);
        assert!(!feasible(&sys, &rat(501, 1000), ArithmeticMode::Exact)
            .unwrap()
            .feasible);
    }

    #[test]
    fn column_scaling_preserves_verdicts() {
        let base = fixtures::sys_b();
        // Scale affector column 2 of both matrices by 3.
        let scale = |m: &crate::matrix::RatMatrix| {
            (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| {
                            let v = m.get(i, j).clone();
                            if j == 2 {
                                v * rat_int(3)
                            } else {
                                v
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let scaled = crate::system::GainSystem::from_split(
            scale(base.supporter_gains()),
            scale(base.repressor_gains()),
        )
        .unwrap();
        for k in [1, 2, 3] {
            let beta = rat(k, 2);
            let a = feasible(&base, &beta, ArithmeticMode::Exact).unwrap();
            let b = feasible(&scaled, &beta, ArithmeticMode::Exact).unwrap();
            assert_eq!(a.feasible, b.feasible, "beta {k}/2");
        }
    }

    #[test]
    fn exact_witnesses_satisfy_constraints_exactly() {
        use num::traits::Signed;
        for (sys, beta) in [
            (fixtures::sys_a(), rat(1, 2)),
            (fixtures::sys_b(), rat_int(1)),
            (fixtures::sys_c(), rat(7, 10)),
        ] {
            let v = feasible(&sys, &beta, ArithmeticMode::Exact).unwrap();
            assert!(v.feasible);
            let witness = v.witness_exact.unwrap();
            let res = residuals_exact(&sys, &witness, &beta).unwrap();
            assert!(res.iter().all(|r| !r.is_negative()), "beta {beta}");
        }
    }

    #[test]
    fn nonpositive_beta_rejected() {
        let sys = fixtures::sys_c();
        assert!(matches!(
            feasible(&sys, &rat_int(0), ArithmeticMode::Exact),
            Err(Error::NonpositiveBeta)
        ));
        assert!(matches!(
            residuals(&sys, &[1.0, 0.0], -1.0),
            Err(Error::NonpositiveBeta)
        ));
    }

    #[test]
    fn float_and_exact_agree_away_from_boundary() {
        let sys = fixtures::sys_a();
        for (beta, expect) in [(rat(1, 4), true), (rat(1, 2), true), (rat(3, 4), false)] {
            let f = feasible(&sys, &beta, ArithmeticMode::Float).unwrap();
            let e = feasible(&sys, &beta, ArithmeticMode::Exact).unwrap();
            assert_eq!(f.feasible, expect);
            assert_eq!(e.feasible, expect);
        }
    }
}
