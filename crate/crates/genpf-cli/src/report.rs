//! Report assembly: every command prints one self-contained JSON document
//! (or a text summary) that echoes its configuration and input hash, so a
//! run can be reproduced from its own output.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use genpf::numeric::{format_rational, Rat};
use genpf::solver::PfSolution;

pub fn input_sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A float-valued quantity with an optional exact rational enclosure.
pub fn number(decimal: f64, interval: Option<(&Rat, &Rat)>) -> Value {
    match interval {
        Some((lo, hi)) => json!({
            "decimal": decimal,
            "exact_interval": [format_rational(lo), format_rational(hi)],
        }),
        None => json!({ "decimal": decimal, "exact_interval": null }),
    }
}

pub fn run_report(
    command: &str,
    input_hash: Option<String>,
    config: Value,
    arithmetic: &str,
    seed: Option<u64>,
    result: Value,
) -> Value {
    let mut obj = Map::new();
    obj.insert("command".into(), json!(command));
    obj.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    obj.insert("input_sha256".into(), json!(input_hash));
    obj.insert("config".into(), config);
    obj.insert("arithmetic".into(), json!(arithmetic));
    obj.insert("seed".into(), json!(seed));
    obj.insert("result".into(), result);
    Value::Object(obj)
}

pub fn solution_value(sol: &PfSolution, removed_affectors: &[usize]) -> Value {
    let exact = sol.exact.as_ref();
    json!({
        "beta_star": number(
            sol.beta_star,
            exact.map(|e| (&e.beta_interval.0, &e.beta_interval.1)),
        ),
        "root": number(
            sol.root,
            exact.map(|e| (&e.root_interval.0, &e.root_interval.1)),
        ),
        "x": sol.x,
        "selection": sol.selection.affectors(),
        "residuals": sol.residuals,
        "exact_poly": exact.map(|e| json!({
            "coefficients": e.char_poly.iter().map(format_rational).collect::<Vec<_>>(),
            "root_interval": [
                format_rational(&e.root_interval.0),
                format_rational(&e.root_interval.1),
            ],
            "beta_interval": [
                format_rational(&e.beta_interval.0),
                format_rational(&e.beta_interval.1),
            ],
        })),
        "tau_used": sol.tau_used,
        "retries_used": sol.retries_used,
        "log2_theoretical_gap": sol.log2_theoretical_gap,
        "tau_meets_theoretical_gap": sol.tau_meets_theoretical_gap,
        "pf_iterations": sol.pf_iterations,
        "pf_residual": sol.pf_residual,
        "removed_affectors": removed_affectors,
    })
}

pub fn trace_value(sol: &PfSolution) -> Value {
    json!({
        "doubling": sol.trace.doubling,
        "bisection": sol.trace.bisection,
        "exact_fixup_calls": sol.trace.exact_fixup_calls,
        "oracle_calls": sol.trace.oracle_calls,
        "elimination": sol.elimination.iter().map(|s| json!({
            "entity": s.entity,
            "chosen": s.chosen,
            "rejected": s.rejected,
        })).collect::<Vec<_>>(),
    })
}
