//! Re-executes the two worked `F_4/F_2` constructions and compares every
//! intermediate matrix against golden data files.
//!
//! A golden file lists named matrices whose entries are symbols (such as
//! `"w^2"` or `"1+w"`) resolved through the file's own symbol table into the
//! element JSON encoding. The demo takes its input generator from the
//! golden entry `G`.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};

use super::{CliError, Outcome};
use crate::code::RankMetricCode;
use crate::field::{FieldTower, MidElement, TopElement};
use crate::json::{self, JsonError};
use crate::linalg::{self, Matrix};
use crate::variation;

pub const GOLDEN_REDUCTION: &str = include_str!("../../golden/hull_reduction_f4.json");
pub const GOLDEN_LCD: &str = include_str!("../../golden/lcd_h1_f4.json");

#[derive(Deserialize)]
struct FieldSpec {
    p: u32,
    e: usize,
    m: usize,
}

#[derive(Deserialize)]
struct GoldenMatrix {
    name: String,
    level: String,
    entries: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct GoldenInt {
    name: String,
    value: usize,
}

#[derive(Deserialize)]
struct Golden {
    description: String,
    field: FieldSpec,
    symbols: BTreeMap<String, Value>,
    ell: usize,
    matrices: Vec<GoldenMatrix>,
    integers: Vec<GoldenInt>,
}

enum Computed {
    Top(Matrix<TopElement>),
    Mid(Matrix<MidElement>),
    Int(usize),
}

struct Resolver<'a> {
    tower: &'a FieldTower,
    symbols: &'a BTreeMap<String, Value>,
}

impl Resolver<'_> {
    fn top(&self, sym: &str, path: &str) -> Result<TopElement, JsonError> {
        let v = self.symbols.get(sym).ok_or_else(|| JsonError {
            field: path.to_string(),
            reason: format!("unknown symbol {sym:?}"),
        })?;
        json::top_from_json(self.tower, v, &format!("symbols.{sym}"))
    }

    fn mid(&self, sym: &str, path: &str) -> Result<MidElement, JsonError> {
        let x = self.top(sym, path)?;
        self.tower.project(x).ok_or_else(|| JsonError {
            field: path.to_string(),
            reason: format!("symbol {sym:?} is not in the base field"),
        })
    }

    fn matrix<E: Copy>(
        &self,
        g: &GoldenMatrix,
        path: &str,
        elem: impl Fn(&str, &str) -> Result<E, JsonError>,
    ) -> Result<Matrix<E>, JsonError> {
        let cols = g.entries.first().map_or(0, Vec::len);
        let mut data = Vec::new();
        for (i, row) in g.entries.iter().enumerate() {
            if row.len() != cols {
                return Err(JsonError {
                    field: format!("{path}.entries[{i}]"),
                    reason: "ragged row".into(),
                });
            }
            for (j, s) in row.iter().enumerate() {
                data.push(elem(s, &format!("{path}.entries[{i}][{j}]"))?);
            }
        }
        Ok(Matrix::new(g.entries.len(), cols, data))
    }
}

fn parse_golden(text: &str) -> Result<(Golden, FieldTower), CliError> {
    let g: Golden = serde_json::from_str(text).map_err(|e| JsonError {
        field: "<golden>".into(),
        reason: e.to_string(),
    })?;
    let tower = FieldTower::new(g.field.p, g.field.e, g.field.m).map_err(|e| JsonError {
        field: "field".into(),
        reason: e.to_string(),
    })?;
    Ok((g, tower))
}

fn golden_top(g: &Golden, tower: &FieldTower, name: &str) -> Result<Matrix<TopElement>, CliError> {
    let r = Resolver {
        tower,
        symbols: &g.symbols,
    };
    let (i, m) = g
        .matrices
        .iter()
        .enumerate()
        .find(|(_, m)| m.name == name)
        .ok_or_else(|| CliError::Usage(format!("golden data has no matrix {name:?}")))?;
    Ok(r.matrix(m, &format!("matrices[{i}]"), |s, p| r.top(s, p))?)
}

/// Compares one golden matrix against a computed one, cell by cell.
fn diff_matrix<E: Copy + Eq>(
    gm: &GoldenMatrix,
    got: &Matrix<E>,
    resolve: impl Fn(&str, &str) -> Result<E, JsonError>,
    show: impl Fn(E) -> String,
    path: &str,
) -> Result<Vec<String>, JsonError> {
    let rows = gm.entries.len();
    let cols = gm.entries.first().map_or(0, Vec::len);
    if (rows, cols) != got.shape() {
        return Ok(vec![format!(
            "matrix `{}`: expected shape {rows}x{cols}, got {}x{}",
            gm.name,
            got.rows(),
            got.cols()
        )]);
    }
    let mut diffs = Vec::new();
    for (i, row) in gm.entries.iter().enumerate() {
        for (j, sym) in row.iter().enumerate() {
            let want = resolve(sym, &format!("{path}.entries[{i}][{j}]"))?;
            if want != got[(i, j)] {
                diffs.push(format!(
                    "matrix `{}` cell ({i}, {j}): expected {sym}, got {}",
                    gm.name,
                    show(got[(i, j)])
                ));
            }
        }
    }
    Ok(diffs)
}

/// Compares the computed values against the golden file.
fn compare(g: &Golden, tower: &FieldTower, computed: &[(&str, Computed)]) -> Result<Vec<Value>, CliError> {
    let r = Resolver {
        tower,
        symbols: &g.symbols,
    };
    // Prefer plain symbols over sums such as "1+w" when naming a value.
    let name_top = |x: TopElement| {
        g.symbols
            .iter()
            .filter(|(_, v)| json::top_from_json(tower, v, "").ok() == Some(x))
            .map(|(k, _)| k.clone())
            .min_by_key(|k| (k.contains('+'), k.len(), k.clone()))
            .unwrap_or_else(|| json::top_to_json(tower, x).to_string())
    };
    let lookup = |name: &str| computed.iter().find(|(n, _)| *n == name).map(|(_, c)| c);
    let mut checks = Vec::new();
    for (idx, gm) in g.matrices.iter().enumerate() {
        let path = format!("matrices[{idx}]");
        let diffs = match (lookup(&gm.name), gm.level.as_str()) {
            (None, _) => vec![format!("matrix `{}` was not computed", gm.name)],
            (Some(Computed::Top(m)), "top") => diff_matrix(gm, m, |s, p| r.top(s, p), name_top, &path)?,
            (Some(Computed::Mid(m)), "mid") => {
                diff_matrix(gm, m, |s, p| r.mid(s, p), |x| name_top(tower.lift(x)), &path)?
            }
            (Some(_), level) => vec![format!("matrix `{}`: level mismatch (golden {level})", gm.name)],
        };
        checks.push(json!({"name": gm.name, "passed": diffs.is_empty(), "diffs": diffs}));
    }
    for gi in &g.integers {
        let diffs = match lookup(&gi.name) {
            Some(Computed::Int(v)) if *v == gi.value => vec![],
            Some(Computed::Int(v)) => vec![format!("value `{}`: expected {}, got {v}", gi.name, gi.value)],
            _ => vec![format!("value `{}` was not computed", gi.name)],
        };
        checks.push(json!({"name": gi.name, "passed": diffs.is_empty(), "diffs": diffs}));
    }
    Ok(checks)
}

fn scalar(x: TopElement) -> Matrix<TopElement> {
    Matrix::new(1, 1, vec![x])
}

/// Hull reduction to `ell` with the block-diagonal plan.
fn run_reduction(g: &Golden, tower: &FieldTower) -> Result<Vec<(&'static str, Computed)>, String> {
    let top = tower.top();
    let mid = tower.mid();
    let gen = golden_top(g, tower, "G").map_err(|e| e.to_string())?;
    let code = RankMetricCode::new(tower, &gen).map_err(|e| e.to_string())?;
    let h = code.hull_dim();
    let r = variation::reduce_hull(&code, g.ell).map_err(|e| e.to_string())?;
    let (form, plan) = match (&r.form, &r.plan) {
        (Some(f), Some(p)) => (f, p),
        _ => return Err("the reduction was the identity".into()),
    };
    let s = plan.y.rows();
    let defect = plan
        .y
        .gram(mid)
        .sub(mid, &Matrix::identity(mid, s))
        .map_err(|e| e.to_string())?;
    Ok(vec![
        ("G", Computed::Top(form.std_gen.clone())),
        ("A", Computed::Top(form.a.clone())),
        ("A A^T", Computed::Top(form.a.gram(top))),
        ("Y", Computed::Mid(plan.y.clone())),
        ("Y Y^T - I", Computed::Mid(defect)),
        ("M", Computed::Mid(plan.m.clone())),
        ("witness", Computed::Mid(r.witness.matrix.clone())),
        ("G'", Computed::Top(r.transformed_gen.clone())),
        ("G' G'^T", Computed::Top(r.gram.clone())),
        ("hull_dim(C)", Computed::Int(h)),
        ("rank(G' G'^T)", Computed::Int(linalg::rank(top, &r.gram))),
        ("hull_dim(C')", Computed::Int(r.code.hull_dim())),
    ])
}

/// The hull-one LCD construction.
fn run_lcd_h1(g: &Golden, tower: &FieldTower) -> Result<Vec<(&'static str, Computed)>, String> {
    let top = tower.top();
    let gen = golden_top(g, tower, "G").map_err(|e| e.to_string())?;
    let code = RankMetricCode::new(tower, &gen).map_err(|e| e.to_string())?;
    let r = variation::make_lcd_h1(&code).map_err(|e| e.to_string())?;
    let f = &r.form;
    let gram0 = f.std_gen.gram(top);
    let one = Matrix::identity(top, f.h);
    let aat1 = f.a.gram(top).add(top, &one).map_err(|e| e.to_string())?;
    let abt = f.a.matmul(top, &f.b.transpose()).map_err(|e| e.to_string())?;
    let det = linalg::determinant(top, &r.gram).map_err(|e| e.to_string())?;
    let v = Matrix::row_vector(&r.cert.v);
    Ok(vec![
        ("G", Computed::Top(f.std_gen.clone())),
        ("A", Computed::Top(f.a.clone())),
        ("B", Computed::Top(f.b.clone())),
        ("A A^T + 1", Computed::Top(aat1)),
        ("A B^T", Computed::Top(abt)),
        ("G G^T", Computed::Top(gram0.clone())),
        ("S", Computed::Top(r.cert.s.clone())),
        ("S^-1", Computed::Top(r.cert.s_inv.clone())),
        ("M", Computed::Mid(r.m.clone())),
        ("v", Computed::Mid(v)),
        ("P", Computed::Top(r.cert.p.clone())),
        ("Q", Computed::Top(r.cert.q.clone())),
        ("f(v)", Computed::Top(scalar(r.cert.fv))),
        ("G'", Computed::Top(r.transformed_gen.clone())),
        ("G' G'^T", Computed::Top(r.gram.clone())),
        ("det(G' G'^T)", Computed::Top(scalar(det))),
        ("rank(G G^T)", Computed::Int(linalg::rank(top, &gram0))),
        ("hull_dim(C)", Computed::Int(code.hull_dim())),
        ("rank(G' G'^T)", Computed::Int(linalg::rank(top, &r.gram))),
        ("hull_dim(C')", Computed::Int(r.code.hull_dim())),
    ])
}

type Runner = fn(&Golden, &FieldTower) -> Result<Vec<(&'static str, Computed)>, String>;

fn run_example(name: &str, text: &str, run: Runner) -> Result<(Value, bool), CliError> {
    let (g, tower) = parse_golden(text)?;
    let (checks, error) = match run(&g, &tower) {
        Ok(computed) => (compare(&g, &tower, &computed)?, None),
        Err(e) => (Vec::new(), Some(e)),
    };
    let passed = error.is_none() && checks.iter().all(|c| c["passed"] == true);
    Ok((
        json!({
            "name": name,
            "description": g.description,
            "passed": passed,
            "error": error,
            "checks": checks,
        }),
        passed,
    ))
}

/// Runs both worked constructions against the given golden texts.
pub fn demo_with(reduction_golden: &str, lcd_golden: &str) -> Result<Outcome, CliError> {
    let (a, a_ok) = run_example("hull reduction over F_4/F_2", reduction_golden, run_reduction)?;
    let (b, b_ok) = run_example("hull-one LCD over F_4/F_2", lcd_golden, run_lcd_h1)?;
    let passed = usize::from(a_ok) + usize::from(b_ok);
    let diffs: Vec<String> = [&a, &b]
        .iter()
        .flat_map(|ex| ex["checks"].as_array().cloned().unwrap_or_default())
        .flat_map(|c| c["diffs"].as_array().cloned().unwrap_or_default())
        .filter_map(|d| d.as_str().map(str::to_string))
        .collect();
    let mut summary = format!("{passed}/2 examples reproduced");
    for d in &diffs {
        summary.push_str("\n  ");
        summary.push_str(d);
    }
    Ok(Outcome {
        report: json!({
            "version": super::VERSION,
            "examples": [a, b],
            "summary": {"passed": passed, "total": 2},
        }),
        ok: passed == 2,
        summary,
    })
}

pub fn cmd_demo() -> Result<Outcome, CliError> {
    demo_with(GOLDEN_REDUCTION, GOLDEN_LCD)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_examples_reproduce() {
        let out = cmd_demo().unwrap();
        assert!(out.ok, "{}", out.summary);
        assert_eq!(out.report, cmd_demo().unwrap().report);
    }

    #[test]
    fn corrupted_golden_names_matrix_and_cell() {
        let bad = GOLDEN_LCD.replacen(
            r#"{"name": "G'", "level": "top", "entries": [["1", "w^2""#,
            r#"{"name": "G'", "level": "top", "entries": [["1", "w""#,
            1,
        );
        assert_ne!(bad, GOLDEN_LCD);
        let out = demo_with(GOLDEN_REDUCTION, &bad).unwrap();
        assert!(!out.ok);
        assert!(out.summary.contains("matrix `G'` cell (0, 1): expected w, got w^2"), "{}", out.summary);
    }
}
