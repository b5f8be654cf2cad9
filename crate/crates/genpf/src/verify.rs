//! Post-hoc checks a claimed solution must pass against its system.
//!
//! The generalized theorem promises a positive root, a nonnegative optimal
//! vector with exactly one active supporter per entity, support-repression
//! equality at the optimum, an upper bound by the largest gain, and
//! optimality over every hidden square subsystem. Each promise becomes a
//! named, machine-checkable item here; the solver, the command-line
//! `verify` command and the acceptance suite all run the same checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp;
use crate::numeric::rat_from_f64;
use crate::solver::PfSolution;
use crate::spectral;
use crate::system::{GainSystem, Selection};
use crate::Result;

/// Tolerance on support-repression equality at the optimum.
pub const SR_EQUALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail,
    }
}

/// Core invariants of a claimed solution; pure float checks.
pub fn verify_solution(system: &GainSystem, sol: &PfSolution) -> Result<VerificationReport> {
    let mut checks = Vec::new();

    checks.push(check(
        "root-positive",
        sol.root > 0.0 && sol.beta_star > 0.0,
        format!("root = {}, beta* = {}", sol.root, sol.beta_star),
    ));
    checks.push(check(
        "root-reciprocal",
        (sol.root * sol.beta_star - 1.0).abs() <= 1e-12,
        format!("root * beta* = {}", sol.root * sol.beta_star),
    ));
    checks.push(check(
        "x-nonnegative",
        sol.x.iter().all(|&v| v >= 0.0),
        format!("min x = {:?}", sol.x.iter().cloned().fold(f64::INFINITY, f64::min)),
    ));
    checks.push(check(
        "x-length",
        sol.x.len() == system.affectors(),
        format!("|x| = {}, m = {}", sol.x.len(), system.affectors()),
    ));

    // Exactly one active supporter per entity, n nonzeros in total.
    let nonzeros = sol.x.iter().filter(|&&v| v > 0.0).count();
    let mut one_per_entity = nonzeros == system.entities();
    let mut detail = format!("{nonzeros} nonzeros");
    for entity in 0..system.entities() {
        let active = system
            .supporters(entity)
            .iter()
            .filter(|&&j| sol.x.get(j).copied().unwrap_or(0.0) > 0.0)
            .count();
        if active != 1 {
            one_per_entity = false;
            detail.push_str(&format!("; entity {entity} has {active} active supporters"));
        }
    }
    checks.push(check("one-active-supporter-per-entity", one_per_entity, detail));

    // Support-repression equality at the optimum.
    let residuals = lp::residuals(system, &sol.x, sol.beta_star)?;
    let (tot_s, _) = system.totals(&sol.x)?;
    let scale = tot_s.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let worst = residuals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    checks.push(check(
        "sr-equality",
        worst <= SR_EQUALITY_TOL * scale,
        format!("worst residual {worst} against scale {scale}"),
    ));

    // Selection consistency: the claimed selection is legal and active.
    let sel_ok = system.check_selection(&sol.selection).is_ok()
        && sol.selection.is_complete_for(system.entities())
        && sol
            .selection
            .iter()
            .all(|(_, a)| sol.x.get(a).copied().unwrap_or(0.0) > 0.0);
    checks.push(check(
        "selection-active",
        sel_ok,
        format!("selection {:?}", sol.selection.affectors()),
    ));

    // Bounded by the largest gain whenever every gain is at least one.
    if system.gains_at_least_one() {
        let g = system.max_gain().to_f64();
        checks.push(check(
            "beta-below-max-gain",
            sol.beta_star <= g * (1.0 + 1e-9),
            format!("beta* = {}, G = {g}", sol.beta_star),
        ));
    }

    Ok(VerificationReport { checks })
}

/// Exact threshold check: feasible just below the claimed optimum and
/// infeasible just above it.
pub fn verify_threshold(
    system: &GainSystem,
    beta_star: f64,
    eps: f64,
) -> Result<VerificationReport> {
    let below = rat_from_f64(beta_star * (1.0 - eps))?;
    let above = rat_from_f64(beta_star * (1.0 + eps))?;
    let below_ok = lp::feasible(system, &below, lp::ArithmeticMode::Exact)?.feasible;
    let above_bad = !lp::feasible(system, &above, lp::ArithmeticMode::Exact)?.feasible;
    Ok(VerificationReport {
        checks: vec![
            check(
                "feasible-below",
                below_ok,
                format!("beta* (1 - {eps}) feasible: {below_ok}"),
            ),
            check(
                "infeasible-above",
                above_bad,
                format!("beta* (1 + {eps}) infeasible: {above_bad}"),
            ),
        ],
    })
}

/// Samples complete selections and checks the claimed `beta*` dominates
/// each square subsystem's optimum.
pub fn verify_against_sampled_selections(
    system: &GainSystem,
    beta_star: f64,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let tol = 1e-9 * beta_star.abs().max(1.0);
    for k in 0..samples {
        let picks: Vec<usize> = (0..system.entities())
            .map(|i| {
                let supporters = system.supporters(i);
                supporters[rng.gen_range(0..supporters.len())]
            })
            .collect();
        let sel = Selection::complete(&picks);
        let sub = system.apply_selection(&sel)?;
        if !crate::irreducibility::is_irreducible_square(&sub.system)? {
            // Cannot happen for irreducible systems; fail loudly.
            checks.push(check(
                "selection-dominance",
                false,
                format!("sample {k}: selection {picks:?} is reducible"),
            ));
            continue;
        }
        let z = spectral::z_matrix(&sub.system)?;
        let pf = spectral::pf_root_vector(&z.to_f64(), 1e-12, spectral::default_max_iter(system.entities(), 1e-12))?;
        let beta_sub = 1.0 / pf.root;
        checks.push(check(
            "selection-dominance",
            beta_star >= beta_sub - tol,
            format!("sample {k}: beta* = {beta_star} vs selection {picks:?} at {beta_sub}"),
        ));
    }
    Ok(VerificationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve, SolverConfig};
    use crate::system::fixtures;

    #[test]
    fn solver_output_passes_all_checks() {
        for sys in [fixtures::sys_a(), fixtures::sys_b(), fixtures::sys_c()] {
            let sol = solve(&sys, &SolverConfig::default()).unwrap();
            let report = verify_solution(&sys, &sol).unwrap();
            assert!(report.passed(), "failures: {:?}", report.failures());
            let threshold = verify_threshold(&sys, sol.beta_star, 1e-10).unwrap();
            assert!(threshold.passed(), "failures: {:?}", threshold.failures());
            let dominance =
                verify_against_sampled_selections(&sys, sol.beta_star, 20, 7).unwrap();
            assert!(dominance.passed(), "failures: {:?}", dominance.failures());
        }
    }

    #[test]
    fn tampered_solution_fails() {
        let sys = fixtures::sys_b();
        let mut sol = solve(&sys, &SolverConfig::default()).unwrap();
        sol.x[1] = 0.1;
        let report = verify_solution(&sys, &sol).unwrap();
        assert!(!report.passed());
        let names: Vec<&str> = report.failures().iter().map(|c| c.name).collect();
        assert!(names.contains(&"one-active-supporter-per-entity"));
    }

    #[test]
    fn wrong_beta_fails_threshold() {
        let sys = fixtures::sys_b();
        let report = verify_threshold(&sys, 1.3, 1e-10).unwrap();
        assert!(!report.passed());
    }
}
