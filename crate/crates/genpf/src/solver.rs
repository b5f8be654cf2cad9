//! The main solver: bracket the optimal `beta` by binary search over the
//! feasibility oracle, extract a complete selection by affector
//! elimination, then read the exact optimum off the selected square
//! subsystem.
//!
//! The theory guarantees that distinct hidden square subsystems have
//! reciprocal roots at least `(n G)^(-8 n^3)` apart, so once the bracket is
//! narrower than that gap the selected subsystem is exactly optimal. That
//! theoretical width underflows any fixed-precision scale for `n >= 2`, so
//! the default configuration brackets to a practical width `tau` and
//! recovers soundness post hoc: the candidate optimum must be infeasible
//! just above and feasible just below, checked in exact arithmetic, with
//! the bracket re-run at `tau / 2` on failure.

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

use crate::irreducibility::test_irreducible;
use crate::lp::{self, ArithmeticMode};
use crate::numeric::{rat_from_f64, rat_to_f64, Rat};
use crate::spectral::{self, ExactRoot};
use crate::system::{GainSystem, MaxGain, Selection};
use crate::{Error, Result};

/// How the binary search decides it has bracketed tightly enough.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    /// Bracket to the configured practical width `tau`; soundness comes
    /// from post-hoc verification.
    Practical,
    /// Bracket to the theoretical width `(n G)^(-8 n^3)` in exact
    /// arithmetic. Requires integer gains; expensive beyond tiny `n`.
    Theoretical,
}

/// Deterministic tie-breaking for the elimination phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Lowest affector index among the supporters that keep the partial
    /// system feasible.
    LowestIndex,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub gap_mode: GapMode,
    /// Practical bracket width target.
    pub tau: f64,
    /// Verification retries; each retry halves `tau`.
    pub max_retries: u32,
    /// Re-check the candidate optimum with the exact oracle.
    pub exact_verification: bool,
    pub tie_break: TieBreak,
    /// Collatz-Wielandt bracket tolerance for the square kernel.
    pub pf_tol: f64,
    /// Dimension cap for the exact characteristic-polynomial report.
    pub exact_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap_mode: GapMode::Practical,
            tau: 1e-12,
            max_retries: 6,
            exact_verification: true,
            tie_break: TieBreak::LowestIndex,
            pf_tol: 1e-13,
            exact_limit: spectral::DEFAULT_EXACT_LIMIT,
        }
    }
}

/// Log-domain descriptor of the theoretical minimum gap between the
/// reciprocal roots of distinct hidden square subsystems. The gap itself
/// is astronomically small, so it is never materialized on a linear scale;
/// only its base-2 logarithm and, on demand, its exact rational value.
#[derive(Debug, Clone, PartialEq)]
pub struct GapDescriptor {
    pub n: usize,
    pub max_gain: Rat,
    /// `log2((n G)^(-8 n^3)) = -8 n^3 log2(n G)`.
    pub log2_delta_beta: f64,
}

impl GapDescriptor {
    /// Exact rational `(n G)^(-8 n^3)`; only sensible for integer gains.
    pub fn delta_beta(&self) -> Result<Rat> {
        if !self.max_gain.denom().is_one() {
            return Err(Error::NonIntegerGains);
        }
        let ng = BigInt::from(self.n) * self.max_gain.numer();
        let exp = 8 * self.n.pow(3) as u32;
        Ok(Rat::new(BigInt::one(), ng.pow(exp)))
    }

    /// Whether a practical width `tau` is at least as tight as the
    /// theoretical gap.
    pub fn met_by(&self, tau: f64) -> bool {
        tau > 0.0 && tau.log2() <= self.log2_delta_beta
    }
}

/// `log2(delta_beta) = -8 n^3 log2(n G)` for an `n`-entity system with
/// maximum absolute gain `G`.
pub fn theoretical_gap(n: usize, g: &MaxGain) -> GapDescriptor {
    let ng = n as f64 * g.to_f64();
    GapDescriptor {
        n,
        max_gain: g.0.clone(),
        log2_delta_beta: -8.0 * (n as f64).powi(3) * ng.log2(),
    }
}

/// Bisection history of one solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchTrace {
    /// `beta` values probed during the doubling phase.
    pub doubling: Vec<f64>,
    /// Bracket `(beta-, beta+)` after each bisection step.
    pub bisection: Vec<(f64, f64)>,
    /// Oracle calls spent certifying and re-tightening in exact mode.
    pub exact_fixup_calls: usize,
    pub oracle_calls: usize,
}

/// One elimination decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationStep {
    pub entity: usize,
    pub chosen: usize,
    /// Supporters that failed the oracle before the chosen one, in order.
    pub rejected: Vec<usize>,
}

/// Exact algebraic description of the optimum for small systems.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    /// Monic characteristic polynomial of the winning `Z`, low to high.
    pub char_poly: Vec<Rat>,
    /// Isolating interval for the root `r`.
    pub root_interval: (Rat, Rat),
    /// Isolating interval for `beta* = 1/r`.
    pub beta_interval: (Rat, Rat),
}

/// The generalized Perron-Frobenius solution of a system.
#[derive(Debug, Clone)]
pub struct PfSolution {
    /// Optimal `beta`, the largest feasible support-repression ratio.
    pub beta_star: f64,
    /// Generalized root `r = 1/beta*`.
    pub root: f64,
    /// Optimal assignment with exactly one active supporter per entity.
    pub x: Vec<f64>,
    pub selection: Selection,
    /// Per-entity slack at the optimum; all within tolerance of zero.
    pub residuals: Vec<f64>,
    pub exact: Option<ExactSolution>,
    pub trace: SearchTrace,
    pub elimination: Vec<EliminationStep>,
    /// Bracket width actually used (after retries).
    pub tau_used: f64,
    pub retries_used: u32,
    pub log2_theoretical_gap: f64,
    /// Whether `tau_used` is as tight as the theoretical gap.
    pub tau_meets_theoretical_gap: bool,
    pub pf_iterations: usize,
    pub pf_residual: f64,
}

/// The bracket produced by the binary-search phase.
#[derive(Debug, Clone)]
pub struct Bracket {
    /// Feasible lower end (exact-certified).
    pub beta_minus: Rat,
    /// Infeasible upper end (exact-certified).
    pub beta_plus: Rat,
    pub trace: SearchTrace,
}

/// Binary-search phase: doubles `beta` until infeasible, then bisects to
/// the configured gap. The returned ends are certified by the exact
/// oracle: `beta-` feasible, `beta+` infeasible, so the optimum lies in
/// `[beta-, beta+)`.
pub fn binary_search_beta(system: &GainSystem, cfg: &SolverConfig) -> Result<Bracket> {
    let report = test_irreducible(system)?;
    if !report.irreducible {
        return Err(Error::Reducible(Box::new(report)));
    }
    let width = match cfg.gap_mode {
        GapMode::Practical => rat_from_f64(cfg.tau)?,
        GapMode::Theoretical => {
            if !system.has_integer_gains() {
                return Err(Error::NonIntegerGains);
            }
            theoretical_gap(system.entities(), &system.max_gain()).delta_beta()?
        }
    };
    if !width.is_positive() {
        return Err(Error::OracleFailed("bracket width must be positive".into()));
    }
    match cfg.gap_mode {
        GapMode::Practical => practical_bracket(system, &width),
        GapMode::Theoretical => exact_bracket(system, &width),
    }
}

fn practical_bracket(system: &GainSystem, width: &Rat) -> Result<Bracket> {
    let mut trace = SearchTrace::default();
    let float_oracle = |beta: f64, trace: &mut SearchTrace| -> Result<bool> {
        trace.oracle_calls += 1;
        lp::feasible_float_unbiased(system, beta)
    };

    // Doubling: beta* is finite for irreducible systems, so the loop exits.
    let mut beta = 1.0_f64;
    let mut doubled = false;
    for _ in 0..=200 {
        trace.doubling.push(beta);
        if !float_oracle(beta, &mut trace)? {
            break;
        }
        doubled = true;
        beta *= 2.0;
        if beta > 1e45 {
            return Err(Error::OracleFailed(
                "feasible at every probed beta; doubling did not terminate".into(),
            ));
        }
    }
    let mut lo = if doubled { beta / 2.0 } else { 0.0 };
    let mut hi = beta;

    let width_f = rat_to_f64(width).max(f64::MIN_POSITIVE);
    for _ in 0..400 {
        if hi - lo < width_f {
            break;
        }
        let mid = lo / 2.0 + hi / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if float_oracle(mid, &mut trace)? {
            lo = mid;
        } else {
            hi = mid;
        }
        trace.bisection.push((lo, hi));
    }

    let mut bm = rat_from_f64(lo)?;
    let mut bp = rat_from_f64(hi)?;
    let exact_oracle = |beta: &Rat, trace: &mut SearchTrace| -> Result<bool> {
        trace.oracle_calls += 1;
        trace.exact_fixup_calls += 1;
        Ok(lp::feasible(system, beta, ArithmeticMode::Exact)?.feasible)
    };

    // Certify the lower end; float tolerance may have placed it past the
    // optimum, in which case walk down geometrically.
    if !bm.is_positive() {
        let mut cand = &bp / crate::numeric::rat_int(2);
        for _ in 0..20_000 {
            if exact_oracle(&cand, &mut trace)? {
                break;
            }
            bp = cand.clone();
            cand = &cand / crate::numeric::rat_int(2);
        }
        bm = cand;
        if !exact_oracle(&bm, &mut trace)? {
            return Err(Error::OracleFailed(
                "no feasible beta found above zero".into(),
            ));
        }
    } else {
        let mut step = width.clone();
        for _ in 0..20_000 {
            if exact_oracle(&bm, &mut trace)? {
                break;
            }
            bp = bm.clone();
            let lowered = &bm - &step;
            bm = if lowered.is_positive() {
                lowered
            } else {
                &bm / crate::numeric::rat_int(2)
            };
            step = &step * crate::numeric::rat_int(2);
        }
    }
    // Certify the upper end (defensive; float infeasibility is reliable).
    let mut step = width.clone();
    for _ in 0..20_000 {
        if !exact_oracle(&bp, &mut trace)? {
            break;
        }
        bm = bp.clone();
        bp = &bp + &step;
        step = &step * crate::numeric::rat_int(2);
    }
    // Re-tighten after any fixup.
    let two = crate::numeric::rat_int(2);
    for _ in 0..20_000 {
        if (&bp - &bm) <= *width {
            break;
        }
        let mid = (&bm + &bp) / &two;
        if exact_oracle(&mid, &mut trace)? {
            bm = mid;
        } else {
            bp = mid;
        }
        trace.bisection.push((rat_to_f64(&bm), rat_to_f64(&bp)));
    }
    Ok(Bracket {
        beta_minus: bm,
        beta_plus: bp,
        trace,
    })
}

fn exact_bracket(system: &GainSystem, width: &Rat) -> Result<Bracket> {
    let mut trace = SearchTrace::default();
    let oracle = |beta: &Rat, trace: &mut SearchTrace| -> Result<bool> {
        trace.oracle_calls += 1;
        Ok(lp::feasible(system, beta, ArithmeticMode::Exact)?.feasible)
    };
    let two = crate::numeric::rat_int(2);
    let mut beta = Rat::one();
    let mut doubled = false;
    for _ in 0..=300 {
        trace.doubling.push(rat_to_f64(&beta));
        if !oracle(&beta, &mut trace)? {
            break;
        }
        doubled = true;
        beta = &beta * &two;
    }
    let mut lo = if doubled {
        &beta / &two
    } else {
        Rat::zero()
    };
    let mut hi = beta;
    while (&hi - &lo) >= *width {
        let mid = (&lo + &hi) / &two;
        if oracle(&mid, &mut trace)? {
            lo = mid;
        } else {
            hi = mid;
        }
        trace.bisection.push((rat_to_f64(&lo), rat_to_f64(&hi)));
    }
    if !lo.is_positive() {
        return Err(Error::OracleFailed(
            "exact bisection ended at a nonpositive lower bound".into(),
        ));
    }
    Ok(Bracket {
        beta_minus: lo,
        beta_plus: hi,
        trace,
    })
}

/// Affector-elimination phase: entity by entity, commit the lowest-index
/// supporter that keeps the contracted system feasible at `beta-`.
pub fn eliminate_affectors(
    system: &GainSystem,
    beta_minus: &Rat,
    cfg: &SolverConfig,
) -> Result<(Selection, Vec<EliminationStep>)> {
    let TieBreak::LowestIndex = cfg.tie_break;
    let mut sel = Selection::empty();
    let mut steps = Vec::with_capacity(system.entities());
    for entity in 0..system.entities() {
        let mut rejected = Vec::new();
        let mut chosen = None;
        let supporters = system.supporters(entity);
        if supporters.len() == 1 {
            // Forced choice: the partial system stays feasible through it
            // whenever the invariant held so far, so skip the oracle. A bad
            // bracket surfaces in post-hoc verification instead.
            chosen = Some(supporters[0]);
        }
        for &affector in supporters {
            if chosen.is_some() {
                break;
            }
            let cand = sel.with(entity, affector);
            let sub = system.apply_selection(&cand)?;
            if lp::feasible(&sub.system, beta_minus, ArithmeticMode::Exact)?.feasible {
                chosen = Some(affector);
                break;
            }
            rejected.push(affector);
        }
        match chosen {
            Some(affector) => {
                sel = sel.with(entity, affector);
                steps.push(EliminationStep {
                    entity,
                    chosen: affector,
                    rejected,
                });
            }
            None => return Err(Error::NoExtendingSupporter { entity }),
        }
    }
    Ok((sel, steps))
}

/// Full solve: bracket, eliminate, square solve, verify. Retries with a
/// halved bracket width when verification fails.
pub fn solve(system: &GainSystem, cfg: &SolverConfig) -> Result<PfSolution> {
    let violations = system.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidSystem(violations));
    }
    let redundant = system.redundant_affectors();
    if !redundant.is_empty() {
        return Err(Error::RedundantAffectors(redundant));
    }
    let report = test_irreducible(system)?;
    if !report.irreducible {
        return Err(Error::Reducible(Box::new(report)));
    }

    let gap = theoretical_gap(system.entities(), &system.max_gain());
    let retries = cfg.max_retries.max(1);
    let mut last_failure: Vec<String> = Vec::new();
    for attempt in 0..retries {
        let mut attempt_cfg = cfg.clone();
        attempt_cfg.tau = cfg.tau / f64::powi(2.0, attempt as i32);
        match solve_attempt(system, &attempt_cfg, &gap, attempt) {
            Ok(solution) => return Ok(solution),
            Err(AttemptError::Retryable(diag)) => {
                last_failure = diag;
            }
            Err(AttemptError::Fatal(e)) => return Err(e),
        }
    }
    Err(Error::VerificationFailed {
        diagnostics: last_failure,
    })
}

enum AttemptError {
    Retryable(Vec<String>),
    Fatal(Error),
}

impl From<Error> for AttemptError {
    fn from(e: Error) -> Self {
        AttemptError::Fatal(e)
    }
}

fn solve_attempt(
    system: &GainSystem,
    cfg: &SolverConfig,
    gap: &GapDescriptor,
    attempt: u32,
) -> std::result::Result<PfSolution, AttemptError> {
    let bracket = binary_search_beta(system, cfg)?;
    let (selection, elimination) =
        match eliminate_affectors(system, &bracket.beta_minus, cfg) {
            Ok(v) => v,
            Err(Error::NoExtendingSupporter { entity }) => {
                return Err(AttemptError::Retryable(vec![format!(
                    "elimination stalled at entity {entity}; bracket not tight enough"
                )]));
            }
            Err(e) => return Err(e.into()),
        };
    let contraction = system.apply_selection(&selection)?;
    let z = spectral::z_matrix(&contraction.system)?;
    let zf = z.to_f64();
    let max_iter = spectral::default_max_iter(system.entities(), cfg.pf_tol);
    let pf = spectral::pf_root_vector(&zf, cfg.pf_tol, max_iter)?;
    let root = pf.root;
    let beta_star = 1.0 / root;
    let x = contraction.extend(&pf.vector)?;
    let residuals = lp::residuals(system, &x, beta_star)?;

    let mut diagnostics = Vec::new();

    // (a) Support-repression equality at the optimum.
    let (tot_s, _) = system.totals(&x)?;
    let scale = tot_s.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let worst = residuals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if worst > 1e-8 * scale {
        diagnostics.push(format!(
            "residual {worst} exceeds 1e-8 * {scale} at the candidate optimum"
        ));
    }

    // (b) The candidate is a true threshold: feasible just below,
    // infeasible just above, decided exactly.
    if cfg.exact_verification {
        let eps = 10.0 * cfg.tau;
        let below = rat_from_f64(beta_star * (1.0 - eps)).map_err(AttemptError::Fatal)?;
        let above = rat_from_f64(beta_star * (1.0 + eps)).map_err(AttemptError::Fatal)?;
        let below_ok = lp::feasible(system, &below, ArithmeticMode::Exact)
            .map_err(AttemptError::Fatal)?
            .feasible;
        let above_bad = !lp::feasible(system, &above, ArithmeticMode::Exact)
            .map_err(AttemptError::Fatal)?
            .feasible;
        if !below_ok {
            diagnostics.push(format!("beta* (1 - {eps}) unexpectedly infeasible"));
        }
        if !above_bad {
            diagnostics.push(format!("beta* (1 + {eps}) unexpectedly feasible"));
        }
    }

    // (c) Exactly one active supporter per entity.
    let nonzeros = x.iter().filter(|&&v| v > 0.0).count();
    if nonzeros != system.entities() {
        diagnostics.push(format!(
            "expected {} nonzeros, found {nonzeros}",
            system.entities()
        ));
    }
    for entity in 0..system.entities() {
        let active: Vec<usize> = system
            .supporters(entity)
            .iter()
            .copied()
            .filter(|&j| x[j] > 0.0)
            .collect();
        if active.len() != 1 {
            diagnostics.push(format!(
                "entity {entity} has {} active supporters",
                active.len()
            ));
        }
    }

    // (d) For gains >= 1 the optimum never exceeds the largest gain.
    if system.gains_at_least_one() {
        let g = system.max_gain().to_f64();
        if beta_star > g * (1.0 + 1e-9) {
            diagnostics.push(format!("beta* = {beta_star} exceeds the max gain {g}"));
        }
    }

    // (e) Exact characteristic-polynomial cross-check for small systems.
    let exact = if system.entities() <= cfg.exact_limit {
        let precision = Rat::new(BigInt::one(), BigInt::from(2u8).pow(44));
        let exact_root = spectral::char_poly_root_exact(&z, cfg.exact_limit, &precision)
            .map_err(AttemptError::Fatal)?;
        if !exact_root.contains(root, 1e-9 * root.abs().max(1.0)) {
            let (lo, hi) = exact_root.interval_f64();
            diagnostics.push(format!(
                "power-iteration root {root} outside the exact isolating interval [{lo}, {hi}]"
            ));
        }
        Some(build_exact_solution(exact_root))
    } else {
        None
    };

    if !diagnostics.is_empty() {
        return Err(AttemptError::Retryable(diagnostics));
    }

    Ok(PfSolution {
        beta_star,
        root,
        x,
        selection,
        residuals,
        exact,
        trace: bracket.trace,
        elimination,
        tau_used: cfg.tau,
        retries_used: attempt,
        log2_theoretical_gap: gap.log2_delta_beta,
        tau_meets_theoretical_gap: match cfg.gap_mode {
            GapMode::Theoretical => true,
            GapMode::Practical => gap.met_by(cfg.tau),
        },
        pf_iterations: pf.iterations,
        pf_residual: pf.residual,
    })
}

fn build_exact_solution(exact_root: ExactRoot) -> ExactSolution {
    let (lo, hi) = exact_root.interval.clone();
    let beta_interval = if lo.is_positive() {
        (hi.recip(), lo.recip())
    } else {
        // The root interval must stay positive for a meaningful reciprocal;
        // fall back to the degenerate interval at the upper end.
        (hi.recip(), hi.recip())
    };
    ExactSolution {
        char_poly: exact_root.char_poly,
        root_interval: (lo, hi),
        beta_interval,
    }
}
