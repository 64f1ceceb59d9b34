//! Command implementations behind the `rankhull` binary.
//!
//! Every command returns an [`Outcome`]: a JSON report plus whether all of
//! its embedded checks passed. Input problems are [`CliError`]s and map to
//! exit status 2; failed checks map to exit status 1.

pub mod demo;
pub mod explore;
pub mod verify;

use serde_json::{json, Value};
use thiserror::Error;

use crate::assoc::{self, AssocError, VectorRoute};
use crate::json::{self, CodeDoc, JsonError};
use crate::variation::{self, VariationError};

pub use demo::{cmd_demo, demo_with};
pub use explore::{cmd_explore, ExploreParams};
pub use verify::{cmd_verify, RunConfig, Suite};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(#[from] JsonError),
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
    /// One-line human summary.
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }
}

/// Errors of a construction: an inadmissible request is a usage error, a
/// failed internal postcondition becomes a failing report.
fn construction_failure(input: &CodeDoc, e: VariationError) -> Result<Outcome, CliError> {
    if is_usage(&e) {
        Err(CliError::Usage(e.to_string()))
    } else {
        Ok(failed_report(input, e.to_string()))
    }
}

fn is_usage(e: &VariationError) -> bool {
    matches!(
        e,
        VariationError::Inadmissible { .. } | VariationError::WrongRegime(_) | VariationError::WrongHull(_)
    )
}

fn failed_report(input: &CodeDoc, message: String) -> Outcome {
    Outcome {
        report: json!({
            "input": json::code_to_json(input),
            "error": message,
            "checks": {"postconditions": false},
        }),
        ok: false,
        summary: format!("FAILED: {message}"),
    }
}

pub fn cmd_reduce(code_text: &str, ell: usize) -> Result<Outcome, CliError> {
    let input = json::parse_code(code_text)?;
    let r = match variation::reduce_hull(&input.code, ell) {
        Ok(r) => r,
        Err(e) => return construction_failure(&input, e),
    };
    let (report, ok) = json::reduction_report(&input, &r);
    Ok(Outcome {
        summary: format!(
            "hull dimension {} -> {} ({})",
            r.input_hull_dim,
            r.code.hull_dim(),
            if ok { "all checks pass" } else { "CHECK FAILURE" }
        ),
        report,
        ok,
    })
}

pub fn cmd_lcd(code_text: &str) -> Result<Outcome, CliError> {
    let input = json::parse_code(code_text)?;
    let h = input.code.hull_dim();
    let o = match variation::make_lcd(&input.code) {
        Ok(o) => o,
        Err(e) => return construction_failure(&input, e),
    };
    let (report, ok) = json::lcd_report(&input, &o);
    Ok(Outcome {
        summary: format!(
            "hull dimension {h} -> {} ({})",
            o.code.hull_dim(),
            if ok { "all checks pass" } else { "CHECK FAILURE" }
        ),
        report,
        ok,
    })
}

/// Associated matrix code under a self-dual basis, its hull transfer chain
/// and, with `ell`, the matrix code of a hull-reduced equivalent code.
pub fn cmd_associate(code_text: &str, ell: Option<usize>, seed: u64, budget: u64) -> Result<Outcome, CliError> {
    let input = json::parse_code(code_text)?;
    let code = &input.code;
    let tower = code.tower();
    let basis = match assoc::find_self_dual_basis(tower, seed, budget) {
        Ok(b) => b,
        Err(e @ (AssocError::NoSelfDualBasis { .. } | AssocError::SearchExhausted { .. })) => {
            return Err(CliError::Usage(e.to_string()))
        }
        Err(e) => return Ok(failed_report(&input, e.to_string())),
    };
    let chain = match assoc::hull_transfer_chain(code, &basis) {
        Ok(c) => c,
        Err(e) => return Ok(failed_report(&input, e.to_string())),
    };
    let d = assoc::associate(code, &basis);
    let mut ok = chain.ok();
    let mut report = json!({
        "input": json::code_to_json(&input),
        "basis": json::basis_to_json(tower, &basis),
        "matrix_code": json::matrix_code_to_json(&d),
        "vector_hull_dim": chain.vector_hull_dim,
        "matrix_hull_dim": chain.block_hull_dim,
        "transfer_chain": chain,
    });
    let mut summary = format!(
        "matrix hull dimension {} = {} x {}",
        chain.block_hull_dim,
        tower.m(),
        chain.vector_hull_dim
    );
    if let Some(ell) = ell {
        match assoc::reduce_hull_matrix(code, &basis, ell) {
            Ok(r) => {
                let certificate = match &r.route {
                    VectorRoute::HullOne(h) => json::certificate_to_json(tower, &h.cert),
                    VectorRoute::Reduction(_) => Value::Null,
                };
                let (checks, vec_ok) = json::report_checks(&r.vector_code, ell, &r.witness.matrix);
                let matrix_ok = r.matrix_hull_dim == tower.m() * ell;
                ok &= vec_ok && matrix_ok;
                json::insert(
                    &mut report,
                    "reduction",
                    json!({
                        "ell": ell,
                        "output": json::code_to_json(&input.extended(r.vector_code.clone(), &r.witness.matrix)),
                        "witness": json::mid_matrix_to_json(tower, &r.witness.matrix),
                        "certificate": certificate,
                        "matrix_code": json::matrix_code_to_json(&r.matrix_code),
                        "matrix_hull_dim": r.matrix_hull_dim,
                        "checks": checks,
                    }),
                );
                summary.push_str(&format!("; after reduction {}", r.matrix_hull_dim));
            }
            Err(AssocError::Variation(e)) if is_usage(&e) => return Err(CliError::Usage(e.to_string())),
            Err(e) => {
                ok = false;
                json::insert(&mut report, "reduction", json!({"ell": ell, "error": e.to_string()}));
            }
        }
    }
    Ok(Outcome {
        report,
        ok,
        summary: format!("{summary} ({})", if ok { "all checks pass" } else { "CHECK FAILURE" }),
    })
}
