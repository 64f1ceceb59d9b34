//! JSON interchange for elements, matrices, codes, bases and reports.
//!
//! Elements are arrays of base-`p` digits, innermost level first: an
//! `F_q` element is `e` digits and an `F_{q^m}` element is `m` arrays of
//! `e` digits. Parsing walks a [`serde_json::Value`] by hand so that every
//! error names the path of the offending field.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::assoc::{ExtensionBasis, MatrixCode};
use crate::code::RankMetricCode;
use crate::field::{FieldTower, MidElement, TopElement};
use crate::linalg::{self, Matrix};
use crate::variation::{LcdH1Certificate, LcdOutcome, LcdRoute, Reduction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("field `{field}`: {reason}")]
pub struct JsonError {
    pub field: String,
    pub reason: String,
}

fn err<T>(field: &str, reason: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError {
        field: field.to_string(),
        reason: reason.into(),
    })
}

fn get<'a>(obj: &'a Value, path: &str, key: &str) -> Result<&'a Value, JsonError> {
    let full = join(path, key);
    match obj {
        Value::Object(map) => map.get(key).map_or_else(|| err(&full, "missing"), Ok),
        _ => err(path_or_root(path), "expected an object"),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn path_or_root(path: &str) -> &str {
    if path.is_empty() {
        "<root>"
    } else {
        path
    }
}

fn as_u64(v: &Value, path: &str) -> Result<u64, JsonError> {
    v.as_u64().map_or_else(|| err(path, "expected a non-negative integer"), Ok)
}

fn get_u64(obj: &Value, path: &str, key: &str) -> Result<u64, JsonError> {
    as_u64(get(obj, path, key)?, &join(path, key))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().map_or_else(|| err(path, "expected an array"), Ok)
}

fn small<T: TryFrom<u64>>(v: u64, path: &str) -> Result<T, JsonError> {
    T::try_from(v).map_or_else(|_| err(path, format!("{v} is out of range")), Ok)
}

pub fn mid_to_json(tower: &FieldTower, x: MidElement) -> Value {
    json!(tower.mid().coeffs(x))
}

pub fn top_to_json(tower: &FieldTower, x: TopElement) -> Value {
    json!(tower.top_digits(x))
}

fn digits(v: &Value, len: usize, path: &str) -> Result<Vec<u32>, JsonError> {
    let arr = as_array(v, path)?;
    if arr.len() != len {
        return err(path, format!("expected {len} digits, got {}", arr.len()));
    }
    arr.iter()
        .enumerate()
        .map(|(i, d)| {
            let p = format!("{path}[{i}]");
            small(as_u64(d, &p)?, &p)
        })
        .collect()
}

pub fn mid_from_json(tower: &FieldTower, v: &Value, path: &str) -> Result<MidElement, JsonError> {
    let d = digits(v, tower.e(), path)?;
    tower.mid().from_coeffs(&d).or_else(|e| err(path, e.to_string()))
}

pub fn top_from_json(tower: &FieldTower, v: &Value, path: &str) -> Result<TopElement, JsonError> {
    let arr = as_array(v, path)?;
    if arr.len() != tower.m() {
        return err(path, format!("expected {} coordinate arrays, got {}", tower.m(), arr.len()));
    }
    let d = arr
        .iter()
        .enumerate()
        .map(|(i, x)| digits(x, tower.e(), &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    tower.top_from_digits(&d).or_else(|e| err(path, e.to_string()))
}

fn matrix_json<E: Copy>(m: &Matrix<E>, level: &str, elem: impl Fn(E) -> Value) -> Value {
    let entries: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(|&x| elem(x)).collect()))
        .collect();
    json!({"rows": m.rows(), "cols": m.cols(), "level": level, "entries": entries})
}

pub fn mid_matrix_to_json(tower: &FieldTower, m: &Matrix<MidElement>) -> Value {
    matrix_json(m, "mid", |x| mid_to_json(tower, x))
}

pub fn top_matrix_to_json(tower: &FieldTower, m: &Matrix<TopElement>) -> Value {
    matrix_json(m, "top", |x| top_to_json(tower, x))
}

fn matrix_from_json<E: Copy>(
    v: &Value,
    path: &str,
    level: &str,
    elem: impl Fn(&Value, &str) -> Result<E, JsonError>,
) -> Result<Matrix<E>, JsonError> {
    let rows: usize = small(get_u64(v, path, "rows")?, &join(path, "rows"))?;
    let cols: usize = small(get_u64(v, path, "cols")?, &join(path, "cols"))?;
    let lv = get(v, path, "level")?;
    if lv.as_str() != Some(level) {
        return err(&join(path, "level"), format!("expected \"{level}\", got {lv}"));
    }
    let ep = join(path, "entries");
    let entries = as_array(get(v, path, "entries")?, &ep)?;
    if entries.len() != rows {
        return err(&ep, format!("expected {rows} rows, got {}", entries.len()));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, r) in entries.iter().enumerate() {
        let rp = format!("{ep}[{i}]");
        let r = as_array(r, &rp)?;
        if r.len() != cols {
            return err(&rp, format!("expected {cols} entries, got {}", r.len()));
        }
        for (j, x) in r.iter().enumerate() {
            data.push(elem(x, &format!("{rp}[{j}]"))?);
        }
    }
    Ok(Matrix::new(rows, cols, data))
}

pub fn mid_matrix_from_json(tower: &FieldTower, v: &Value, path: &str) -> Result<Matrix<MidElement>, JsonError> {
    matrix_from_json(v, path, "mid", |x, p| mid_from_json(tower, x, p))
}

pub fn top_matrix_from_json(tower: &FieldTower, v: &Value, path: &str) -> Result<Matrix<TopElement>, JsonError> {
    matrix_from_json(v, path, "top", |x, p| top_from_json(tower, x, p))
}

/// A code together with the witnesses applied since it was first ingested.
///
/// The product of `witness_chain`, in order, maps the original generator to
/// one spanning `code`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeDoc {
    pub code: RankMetricCode,
    pub witness_chain: Vec<Matrix<MidElement>>,
}

impl CodeDoc {
    pub fn fresh(code: RankMetricCode) -> Self {
        CodeDoc {
            code,
            witness_chain: Vec::new(),
        }
    }

    /// Cumulative witness (identity for an empty chain).
    pub fn cumulative(&self) -> Matrix<MidElement> {
        let t = self.code.tower();
        self.witness_chain
            .iter()
            .fold(Matrix::identity(t.mid(), self.code.n()), |acc, w| {
                acc.matmul(t.mid(), w).expect("chain of n×n matrices")
            })
    }

    /// The document after one more witness.
    pub fn extended(&self, code: RankMetricCode, witness: &Matrix<MidElement>) -> Self {
        let mut chain = self.witness_chain.clone();
        chain.push(witness.clone());
        CodeDoc {
            code,
            witness_chain: chain,
        }
    }
}

pub fn tower_to_json(tower: &FieldTower) -> Value {
    json!({"p": tower.p(), "e": tower.e(), "m": tower.m()})
}

pub fn code_to_json(doc: &CodeDoc) -> Value {
    let c = &doc.code;
    let t = c.tower();
    json!({
        "p": t.p(),
        "e": t.e(),
        "m": t.m(),
        "n": c.n(),
        "k": c.k(),
        "generator": top_matrix_to_json(t, c.generator()),
        "witness_chain": doc.witness_chain.iter().map(|w| mid_matrix_to_json(t, w)).collect::<Vec<_>>(),
    })
}

pub fn tower_from_json(v: &Value, path: &str) -> Result<FieldTower, JsonError> {
    let p: u32 = small(get_u64(v, path, "p")?, &join(path, "p"))?;
    let e: usize = small(get_u64(v, path, "e")?, &join(path, "e"))?;
    let m: usize = small(get_u64(v, path, "m")?, &join(path, "m"))?;
    FieldTower::new(p, e, m).or_else(|x| err(&join(path, "p"), x.to_string()))
}

pub fn code_from_json(v: &Value) -> Result<CodeDoc, JsonError> {
    let tower = tower_from_json(v, "")?;
    let n: usize = small(get_u64(v, "", "n")?, "n")?;
    let k: usize = small(get_u64(v, "", "k")?, "k")?;
    let gen = top_matrix_from_json(&tower, get(v, "", "generator")?, "generator")?;
    if gen.cols() != n {
        return err("n", format!("generator has {} columns but n = {n}", gen.cols()));
    }
    let rank = linalg::rank(tower.top(), &gen);
    if rank != k {
        return err("k", format!("generator has rank {rank} but k = {k}"));
    }
    if k > n {
        return err("k", format!("k = {k} exceeds n = {n}"));
    }
    let code = RankMetricCode::from_space(&tower, linalg::RowSpace::from_generators(tower.top(), &gen));
    let chain = match v.get("witness_chain") {
        None | Some(Value::Null) => Vec::new(),
        Some(c) => {
            let arr = as_array(c, "witness_chain")?;
            let mut out = Vec::with_capacity(arr.len());
            for (i, w) in arr.iter().enumerate() {
                let p = format!("witness_chain[{i}]");
                let w = mid_matrix_from_json(&tower, w, &p)?;
                if w.shape() != (n, n) {
                    return err(&p, format!("expected {n}x{n}, got {:?}", w.shape()));
                }
                if linalg::rank(tower.mid(), &w) != n {
                    return err(&p, "witness is not invertible");
                }
                out.push(w);
            }
            out
        }
    };
    Ok(CodeDoc {
        code,
        witness_chain: chain,
    })
}

pub fn parse_code(text: &str) -> Result<CodeDoc, JsonError> {
    let v: Value = serde_json::from_str(text).or_else(|e| err("<root>", e.to_string()))?;
    code_from_json(&v)
}

pub fn basis_to_json(tower: &FieldTower, b: &ExtensionBasis) -> Value {
    json!({
        "gammas": b.gammas().iter().map(|&g| top_to_json(tower, g)).collect::<Vec<_>>(),
        "gram": mid_matrix_to_json(tower, b.gram()),
        "self_dual": b.is_self_dual(tower),
    })
}

pub fn basis_from_json(tower: &FieldTower, v: &Value, path: &str) -> Result<ExtensionBasis, JsonError> {
    let gp = join(path, "gammas");
    let gammas = as_array(get(v, path, "gammas")?, &gp)?
        .iter()
        .enumerate()
        .map(|(i, g)| top_from_json(tower, g, &format!("{gp}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    ExtensionBasis::new(tower, gammas).or_else(|e| err(&gp, e.to_string()))
}

pub fn matrix_code_to_json(d: &MatrixCode) -> Value {
    let (n, m) = d.shape();
    json!({
        "n": n,
        "m": m,
        "q_spec": tower_to_json(d.tower()),
        "gen_rho": mid_matrix_to_json(d.tower(), d.gen_rho()),
    })
}

pub fn matrix_code_from_json(v: &Value) -> Result<MatrixCode, JsonError> {
    let tower = tower_from_json(get(v, "", "q_spec")?, "q_spec")?;
    let n: usize = small(get_u64(v, "", "n")?, "n")?;
    let m: usize = small(get_u64(v, "", "m")?, "m")?;
    let gen = mid_matrix_from_json(&tower, get(v, "", "gen_rho")?, "gen_rho")?;
    MatrixCode::from_rho(&tower, n, m, &gen).or_else(|e| err("gen_rho", e.to_string()))
}

pub fn certificate_to_json(tower: &FieldTower, c: &LcdH1Certificate) -> Value {
    json!({
        "v": c.v.iter().map(|&x| mid_to_json(tower, x)).collect::<Vec<_>>(),
        "theta": top_to_json(tower, c.theta),
        "f_v": top_to_json(tower, c.fv),
        "S": top_matrix_to_json(tower, &c.s),
        "S_inv": top_matrix_to_json(tower, &c.s_inv),
        "P": top_matrix_to_json(tower, &c.p),
        "Q": top_matrix_to_json(tower, &c.q),
    })
}

/// The three embedded checks of a report and whether all of them pass.
pub fn report_checks(output: &RankMetricCode, ell: usize, witness: &Matrix<MidElement>) -> (Value, bool) {
    let t = output.tower();
    let formula = output.hull_dim();
    let oracle = output.hull_dim_oracle();
    let invertible = witness.is_square() && linalg::rank(t.mid(), witness) == witness.rows();
    let ok = formula == ell && oracle == ell && invertible;
    (
        json!({"hull_dim_formula": formula, "hull_dim_oracle": oracle, "witness_invertible": invertible}),
        ok,
    )
}

fn report(
    input: &CodeDoc,
    ell: usize,
    output: RankMetricCode,
    witness: &Matrix<MidElement>,
    certificate: Value,
) -> (Value, bool) {
    let t = output.tower().clone();
    let (checks, ok) = report_checks(&output, ell, witness);
    let out_doc = input.extended(output, witness);
    (
        json!({
            "input": code_to_json(input),
            "ell": ell,
            "output": code_to_json(&out_doc),
            "witness": mid_matrix_to_json(&t, witness),
            "certificate": certificate,
            "checks": checks,
        }),
        ok,
    )
}

/// Reduction report for [`crate::variation::reduce_hull`].
pub fn reduction_report(input: &CodeDoc, r: &Reduction) -> (Value, bool) {
    report(input, r.ell, r.code.clone(), &r.witness.matrix, Value::Null)
}

/// Reduction report for [`crate::variation::make_lcd`]; the certificate is
/// present on the hull-one route.
pub fn lcd_report(input: &CodeDoc, o: &LcdOutcome) -> (Value, bool) {
    let t = input.code.tower();
    let cert = match &o.route {
        LcdRoute::HullOne(h) => certificate_to_json(t, &h.cert),
        _ => Value::Null,
    };
    report(input, 0, o.code.clone(), &o.witness.matrix, cert)
}

/// Adds a key to a JSON object in place.
pub fn insert(obj: &mut Value, key: &str, value: Value) {
    if let Value::Object(map) = obj {
        map.insert(key.to_string(), value);
    } else {
        let mut map = Map::new();
        map.insert(key.to_string(), value);
        *obj = Value::Object(map);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn f4() -> FieldTower {
        FieldTower::new(2, 1, 2).unwrap()
    }

    fn sample_code(t: &FieldTower) -> RankMetricCode {
        let e = |x| t.top().element(x);
        let g = Matrix::new(2, 4, vec![e(1), e(0), e(2), e(3), e(0), e(1), e(3), e(2)]);
        RankMetricCode::new(t, &g).unwrap()
    }

    #[test]
    fn element_encoding() {
        let t = FieldTower::new(3, 2, 2).unwrap();
        for i in [0, 1, 5, 80] {
            let x = t.top().element(i);
            let v = top_to_json(&t, x);
            assert_eq!(v.as_array().unwrap().len(), 2);
            assert_eq!(top_from_json(&t, &v, "x").unwrap(), x);
        }
        let bad = json!([[0, 3], [0, 0]]);
        let e = top_from_json(&t, &bad, "x").unwrap_err();
        assert_eq!(e.field, "x");
    }

    #[test]
    fn code_round_trip() {
        let t = f4();
        let doc = CodeDoc::fresh(sample_code(&t));
        let v = code_to_json(&doc);
        assert_eq!(v["level"], Value::Null);
        assert_eq!(v["generator"]["level"], "top");
        let back = code_from_json(&v).unwrap();
        assert_eq!(back, doc);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(parse_code(&text).unwrap(), doc);
    }

    #[test]
    fn parse_errors_name_the_field() {
        let t = f4();
        let v = code_to_json(&CodeDoc::fresh(sample_code(&t)));
        let mut broken = v.clone();
        broken["generator"]["entries"][1][2] = json!([1]);
        assert_eq!(code_from_json(&broken).unwrap_err().field, "generator.entries[1][2]");
        let mut broken = v.clone();
        broken["k"] = json!(3);
        assert_eq!(code_from_json(&broken).unwrap_err().field, "k");
        let mut broken = v.clone();
        broken.as_object_mut().unwrap().remove("p");
        assert_eq!(code_from_json(&broken).unwrap_err().field, "p");
        let mut broken = v;
        broken["generator"]["level"] = json!("mid");
        assert_eq!(code_from_json(&broken).unwrap_err().field, "generator.level");
        assert_eq!(parse_code("{").unwrap_err().field, "<root>");
    }

    #[test]
    fn basis_and_matrix_code_round_trip() {
        let t = f4();
        let b = ExtensionBasis::new(&t, vec![t.top().element(2), t.top().element(3)]).unwrap();
        let v = basis_to_json(&t, &b);
        assert_eq!(v["self_dual"], true);
        assert_eq!(basis_from_json(&t, &v, "").unwrap(), b);
        let d = crate::assoc::associate(&sample_code(&t), &b);
        assert_eq!(matrix_code_from_json(&matrix_code_to_json(&d)).unwrap(), d);
    }
}
