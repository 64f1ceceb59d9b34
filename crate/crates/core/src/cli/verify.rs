//! Seeded randomized verification sweeps.
//!
//! A job is one (grid tuple, trial, suite) triple. Jobs run in parallel;
//! each draws from its own ChaCha8 stream selected by the job's global index,
//! so the report depends only on the configuration. Records are sorted by
//! trial index and suite before serialization.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{CliError, Outcome};
use crate::assoc::{self, MatrixCode, VectorRoute};
use crate::code::{EquivalenceWitness, RankMetricCode};
use crate::field::{Field, FieldTower};
use crate::json::{self, CodeDoc};
use crate::linalg::{self, Matrix, RowSpace};
use crate::sample;
use crate::variation::{self, QRegime};

/// Codeword enumeration is used as an oracle up to this many codewords.
pub const ENUMERATION_LIMIT: u64 = 1 << 14;
/// Rank-weight distributions are compared up to this many codewords.
pub const ISOMETRY_LIMIT: u64 = 1 << 10;
pub const ISOMETRY_WITNESSES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Field,
    Linalg,
    Codes,
    Reduction,
    Lcd,
    Transfer,
    Isometry,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Field,
        Suite::Linalg,
        Suite::Codes,
        Suite::Reduction,
        Suite::Lcd,
        Suite::Transfer,
        Suite::Isometry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Field => "field",
            Suite::Linalg => "linalg",
            Suite::Codes => "codes",
            Suite::Reduction => "reduction",
            Suite::Lcd => "lcd",
            Suite::Transfer => "transfer",
            Suite::Isometry => "isometry",
        }
    }

    pub fn parse(s: &str) -> Result<Suite, CliError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                CliError::Usage(format!("unknown check suite {s:?}; expected one of {}", names.join(", ")))
            })
    }

    pub fn parse_list(s: &str) -> Result<Vec<Suite>, CliError> {
        let mut out: Vec<Suite> = s.split(',').filter(|x| !x.trim().is_empty()).map(Suite::parse).collect::<Result<_, _>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&x| x == self).expect("listed") as u64
    }
}

/// `(p, e, m, n, k)`.
pub type GridPoint = [u64; 5];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Trials per grid point.
    pub trials: u64,
    pub grid: Vec<GridPoint>,
    pub checks: Vec<Suite>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            trials: 50,
            grid: default_grid(),
            checks: Suite::ALL.to_vec(),
        }
    }
}

/// Base fields `F_2, F_3, F_4, F_5`, `m ≤ 3`, `n ≤ 7`.
pub fn default_grid() -> Vec<GridPoint> {
    vec![
        [2, 1, 1, 6, 3],
        [2, 1, 2, 4, 2],
        [2, 1, 2, 6, 3],
        [2, 1, 2, 7, 3],
        [2, 1, 3, 5, 2],
        [3, 1, 1, 7, 3],
        [3, 1, 2, 5, 2],
        [3, 1, 3, 4, 2],
        [3, 1, 3, 6, 3],
        [2, 2, 1, 6, 3],
        [2, 2, 2, 5, 2],
        [2, 2, 3, 7, 3],
        [5, 1, 1, 6, 3],
        [5, 1, 2, 4, 2],
    ]
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Parse(json::JsonError {
                field: "<config>".into(),
                reason: e.to_string(),
            })
        })
    }

    pub fn grid_from_json(text: &str) -> Result<Vec<GridPoint>, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Parse(json::JsonError {
                field: "grid".into(),
                reason: e.to_string(),
            })
        })
    }

    pub fn validate(&self) -> Result<Vec<FieldTower>, CliError> {
        if self.trials < 1 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(CliError::Usage("the parameter grid is empty".into()));
        }
        if self.checks.is_empty() {
            return Err(CliError::Usage("no check suites selected".into()));
        }
        self.grid
            .iter()
            .map(|&[p, e, m, n, k]| {
                if k < 1 || k > n {
                    return Err(CliError::Usage(format!("grid point {:?}: need 1 <= k <= n", [p, e, m, n, k])));
                }
                let small = |x: u64| u32::try_from(x).map_err(|_| CliError::Usage(format!("{x} is out of range")));
                FieldTower::new(small(p)?, small(e)? as usize, small(m)? as usize)
                    .map_err(|err| CliError::Usage(format!("grid point {:?}: {err}", [p, e, m, n, k])))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub messages: Vec<String>,
    pub seed: u64,
    pub stream: u64,
    pub code: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub trial: u64,
    pub suite: Suite,
    pub params: GridPoint,
    pub status: Status,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
}

#[derive(Clone, Debug)]
pub struct VerifyRun {
    pub config: RunConfig,
    pub records: Vec<Record>,
    pub summary: BTreeMap<Suite, Counts>,
}

impl VerifyRun {
    pub fn failed(&self) -> u64 {
        self.summary.values().map(|c| c.failed).sum()
    }

    pub fn report(&self) -> Value {
        let summary: BTreeMap<&str, Counts> = self.summary.iter().map(|(s, c)| (s.name(), *c)).collect();
        json!({
            "version": super::VERSION,
            "seed": self.config.seed,
            "prng": sample::PRNG_NAME,
            "config": self.config,
            "summary": summary,
            "records": self.records,
        })
    }
}

/// Outcome of one job before it is turned into a record.
#[derive(Default)]
struct Trial {
    messages: Vec<String>,
    details: serde_json::Map<String, Value>,
    code: Option<RankMetricCode>,
    skipped: bool,
}

impl Trial {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) -> bool {
        if !ok {
            self.messages.push(what());
        }
        ok
    }

    fn note(&mut self, key: &str, v: Value) {
        self.details.insert(key.to_string(), v);
    }

    fn skip(mut self, why: &str) -> Self {
        self.skipped = true;
        self.note("skipped", json!(why));
        self
    }
}

struct Job<'a> {
    tower: &'a FieldTower,
    n: usize,
    k: usize,
    /// Trial index within the grid point.
    local: u64,
}

pub fn run(config: &RunConfig) -> Result<VerifyRun, CliError> {
    let towers = config.validate()?;
    let mut jobs = Vec::new();
    for (gi, point) in config.grid.iter().enumerate() {
        for t in 0..config.trials {
            for &suite in &config.checks {
                jobs.push((gi, t, suite, *point));
            }
        }
    }
    let mut records: Vec<Record> = jobs
        .into_par_iter()
        .map(|(gi, t, suite, params)| {
            let trial = gi as u64 * config.trials + t;
            let stream = trial * Suite::ALL.len() as u64 + suite.index();
            let mut rng = sample::trial_rng(config.seed, stream);
            let job = Job {
                tower: &towers[gi],
                n: params[3] as usize,
                k: params[4] as usize,
                local: t,
            };
            let result = panic::catch_unwind(AssertUnwindSafe(|| run_suite(suite, &job, &mut rng)));
            let out = result.unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Trial {
                    messages: vec![format!("panic: {msg}")],
                    ..Trial::default()
                }
            });
            let status = if !out.messages.is_empty() {
                Status::Failed
            } else if out.skipped {
                Status::Skipped
            } else {
                Status::Passed
            };
            let failure = (status == Status::Failed).then(|| Failure {
                messages: out.messages.clone(),
                seed: config.seed,
                stream,
                code: out
                    .code
                    .as_ref()
                    .map_or(Value::Null, |c| json::code_to_json(&CodeDoc::fresh(c.clone()))),
            });
            Record {
                trial,
                suite,
                params,
                status,
                details: Value::Object(out.details),
                failure,
            }
        })
        .collect();
    records.sort_by_key(|r| (r.trial, r.suite));
    let mut summary: BTreeMap<Suite, Counts> = config.checks.iter().map(|&s| (s, Counts::default())).collect();
    for r in &records {
        let c = summary.entry(r.suite).or_default();
        match r.status {
            Status::Passed => c.passed += 1,
            Status::Failed => c.failed += 1,
            Status::Skipped => c.skipped += 1,
        }
    }
    Ok(VerifyRun {
        config: config.clone(),
        records,
        summary,
    })
}

pub fn cmd_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let run = run(config)?;
    let mut summary = String::new();
    for (s, c) in &run.summary {
        summary.push_str(&format!(
            "{:<10} passed {:>5}  failed {:>3}  skipped {:>5}\n",
            s.name(),
            c.passed,
            c.failed,
            c.skipped
        ));
    }
    let failed = run.failed();
    summary.push_str(&format!("{} failed check(s)", failed));
    Ok(Outcome {
        report: run.report(),
        ok: failed == 0,
        summary,
    })
}

fn run_suite(suite: Suite, job: &Job, rng: &mut ChaCha8Rng) -> Trial {
    match suite {
        Suite::Field => field_suite(job, rng),
        Suite::Linalg => linalg_suite(job, rng),
        Suite::Codes => codes_suite(job, rng),
        Suite::Reduction => reduction_suite(job, rng),
        Suite::Lcd => lcd_suite(job, rng),
        Suite::Transfer => transfer_suite(job, rng),
        Suite::Isometry => isometry_suite(job, rng),
    }
}

/// Largest hull dimension an `[n, k]` code can have.
pub fn max_hull(n: usize, k: usize) -> usize {
    k.min(n - k)
}

/// A code whose hull dimension is drawn uniformly from the reachable range,
/// falling back to an unconstrained random code.
pub fn varied_code(tower: &FieldTower, n: usize, k: usize, rng: &mut ChaCha8Rng) -> RankMetricCode {
    if rng.gen_bool(0.25) {
        return sample::random_code(tower, n, k, rng);
    }
    let h = rng.gen_range(0..=max_hull(n, k));
    sample::random_code_with_hull(tower, n, k, h, rng).unwrap_or_else(|| sample::random_code(tower, n, k, rng))
}

fn q_pow(tower: &FieldTower, k: usize) -> Option<u64> {
    (tower.top().order() as u64).checked_pow(k as u32)
}

fn field_suite(job: &Job, rng: &mut ChaCha8Rng) -> Trial {
    let mut t = Trial::default();
    let tower = job.tower;
    let (top, mid) = (tower.top(), tower.mid());
    for _ in 0..8 {
        let (a, b, c) = (top.random(rng), top.random(rng), top.random(rng));
        t.check(top.add(top.add(a, b), c) == top.add(a, top.add(b, c)), || "top addition is not associative".into());
        t.check(top.mul(top.mul(a, b), c) == top.mul(a, top.mul(b, c)), || "top multiplication is not associative".into());
        t.check(top.mul(a, b) == top.mul(b, a), || "top multiplication is not commutative".into());
        t.check(
            top.mul(a, top.add(b, c)) == top.add(top.mul(a, b), top.mul(a, c)),
            || "top distributivity fails".into(),
        );
        t.check(top.is_zero(top.add(a, top.neg(a))), || "a + (−a) ≠ 0".into());
        if let Some(inv) = top.inv(a) {
            t.check(top.mul(a, inv) == top.one(), || "a · a⁻¹ ≠ 1".into());
        } else {
            t.check(top.is_zero(a), || "nonzero element without inverse".into());
        }
        t.check(tower.frobenius(a, tower.m()) == a, || "Frobenius^m is not the identity".into());
        t.check(
            tower.frobenius(top.mul(a, b), 1) == top.mul(tower.frobenius(a, 1), tower.frobenius(b, 1)),
            || "Frobenius is not multiplicative".into(),
        );
        t.check(
            tower.frobenius(top.add(a, b), 1) == top.add(tower.frobenius(a, 1), tower.frobenius(b, 1)),
            || "Frobenius is not additive".into(),
        );
        let s = mid.random(rng);
        match (tower.trace(a), tower.trace(b), tower.trace(top.add(a, b)), tower.trace(top.mul(tower.lift(s), a))) {
            (Ok(ta), Ok(tb), Ok(tab), Ok(tsa)) => {
                t.check(tab == mid.add(ta, tb), || "trace is not additive".into());
                t.check(tsa == mid.mul(s, ta), || "trace is not F_q-linear".into());
            }
            _ => {
                t.check(false, || "trace left the base field".into());
            }
        }
        t.check(tower.project(tower.lift(s)) == Some(s), || "lift/project round trip fails".into());
        let (x, y, z) = (mid.random(rng), mid.random(rng), mid.random(rng));
        t.check(
            mid.mul(x, mid.add(y, z)) == mid.add(mid.mul(x, y), mid.mul(x, z)),
            || "F_q distributivity fails".into(),
        );
        t.check(mid.mul(mid.mul(x, y), z) == mid.mul(x, mid.mul(y, z)), || "F_q multiplication is not associative".into());
    }
    if job.local == 0 && top.order() <= 1 << 12 {
        let mut hit = vec![false; mid.order() as usize];
        for i in 0..top.order() {
            if let Ok(v) = tower.trace(top.element(i)) {
                hit[mid.index(v) as usize] = true;
            }
        }
        t.check(hit.iter().all(|&h| h), || "trace is not surjective onto F_q".into());
        t.note("trace_surjectivity_checked", json!(true));
    }
    t
}

fn linalg_suite(job: &Job, rng: &mut ChaCha8Rng) -> Trial {
    let mut t = Trial::default();
    let tower = job.tower;
    let (top, mid) = (tower.top(), tower.mid());
    let n = job.n;
    let rows = rng.gen_range(1..=n);
    let m = sample::random_matrix(top, rows, n, rng);
    let rr = linalg::rref(top, &m);
    let r = rr.rank();
    t.check(r <= rows.min(n), || "rank exceeds the matrix size".into());
    t.check(linalg::rref(top, &rr.reduced).reduced == rr.reduced, || "RREF is not idempotent".into());
    let ker = linalg::kernel(top, &m);
    t.check(ker.dim() + r == n, || format!("rank–nullity fails: {} + {r} ≠ {n}", ker.dim()));
    let kb = ker.basis();
    t.check(
        ker.dim() == 0 || m.matmul(top, &kb.transpose()).map(|p| p.is_zero(top)).unwrap_or(false),
        || "kernel vector not annihilated".into(),
    );

    let u = RowSpace::from_generators(top, &sample::random_matrix(top, rng.gen_range(1..=n), n, rng));
    let v = RowSpace::from_generators(top, &sample::random_matrix(top, rng.gen_range(1..=n), n, rng));
    match (u.sum(top, &v), u.intersect(top, &v)) {
        (Ok(s), Ok(i)) => {
            t.check(s.dim() + i.dim() == u.dim() + v.dim(), || "Grassmann identity fails".into());
            t.check(u.contains_space(top, &i) && v.contains_space(top, &i), || "intersection not contained in both".into());
        }
        _ => {
            t.check(false, || "sum or intersection failed".into());
        }
    }
    let perp = u.orthogonal(top);
    t.check(perp.dim() + u.dim() == n, || "dim U + dim U^⊥ ≠ n".into());
    t.check(perp.orthogonal(top) == u, || "(U^⊥)^⊥ ≠ U".into());

    let a = sample::random_invertible(mid, n, rng);
    let b = sample::random_invertible(mid, n, rng);
    match linalg::inverse(mid, &a) {
        Ok(ai) => {
            t.check(a.matmul(mid, &ai).ok() == Some(Matrix::identity(mid, n)), || "A A⁻¹ ≠ I".into());
        }
        Err(e) => {
            t.check(false, || format!("inverse of an invertible matrix failed: {e}"));
        }
    }
    let det = |x: &Matrix<_>| linalg::determinant(mid, x).ok();
    let ab = a.matmul(mid, &b).expect("square");
    t.check(
        det(&ab) == det(&a).zip(det(&b)).map(|(x, y)| mid.mul(x, y)),
        || "det(AB) ≠ det(A) det(B)".into(),
    );
    t
}

fn codes_suite(job: &Job, rng: &mut ChaCha8Rng) -> Trial {
    let mut t = Trial::default();
    let tower = job.tower;
    let top = tower.top();
    let code = varied_code(tower, job.n, job.k, rng);
    t.code = Some(code.clone());
    let dual = code.dual();
    t.check(dual.k() == code.n() - code.k(), || "dim C^⊥ ≠ n − k".into());
    t.check(dual.dual() == code, || "(C^⊥)^⊥ ≠ C".into());
    let h = code.hull_dim();
    let oracle = code.hull_dim_oracle();
    t.check(h == oracle, || format!("hull formula {h} ≠ intersection oracle {oracle}"));
    let hull = code.hull();
    t.check(
        code.space().contains_space(top, &hull) && dual.space().contains_space(top, &hull),
        || "hull not contained in C and C^⊥".into(),
    );
    t.check(
        linalg::RowSpace::from_generators(top, code.generator()).basis() == code.generator(),
        || "stored generator is not canonical".into(),
    );
    if let Some(count) = code.hull_count_by_enumeration(ENUMERATION_LIMIT) {
        let want = q_pow(tower, h);
        t.check(Some(count) == want, || format!("enumeration found {count} hull codewords, expected {want:?}"));
        t.note("enumerated", json!(true));
    }
    let back = json::code_from_json(&json::code_to_json(&CodeDoc::fresh(code.clone())));
    t.check(back.map(|d| d.code).ok() == Some(code.clone()), || "code JSON round trip changed the code".into());

    let w1 = sample::random_witness(tower, job.n, rng);
    let w2 = sample::random_witness(tower, job.n, rng);
    let step = EquivalenceWitness::from_matrix(&code, w1).and_then(|a| {
        let b = EquivalenceWitness::from_matrix(a.target_code(), w2)?;
        Ok((a.compose(&b)?, b))
    });
    match step {
        Ok((total, last)) => {
            let direct = code.apply_witness(&total);
            t.check(direct.as_ref().ok() == Some(last.target_code()), || "composed witness disagrees with the chain".into());
            let back = total
                .inverse(&code)
                .and_then(|inv| total.target_code().apply_witness(&inv));
            t.check(back.ok() == Some(code.clone()), || "inverse witness does not return to the source".into());
            let hull_after = total.target_code().hull_dim();
            t.note("hull_dim_after_random_witness", json!(hull_after));
        }
        Err(e) => {
            t.check(false, || format!("witness construction failed: {e}"));
        }
    }
    t.note("k", json!(code.k()));
    t.note("hull_dim", json!(h));
    t
}

/// Checks an equivalence: the witness is invertible and maps `from` onto `to`.
fn check_witness(t: &mut Trial, from: &RankMetricCode, to: &RankMetricCode, w: &Matrix<crate::field::MidElement>) {
    let mid = from.tower().mid();
    t.check(
        w.is_square() && linalg::rank(mid, w) == from.n(),
        || "witness is not invertible over F_q".into(),
    );
    t.check(from.transform(w).ok().as_ref() == Some(to), || "G · witness does not reproduce the output".into());
}

fn check_hull(t: &mut Trial, code: &RankMetricCode, want: usize, what: &str) {
    let h = code.hull_dim();
    let o = code.hull_dim_oracle();
    t.check(h == want, || format!("{what}: hull formula gives {h}, expected {want}"));
    t.check(o == want, || format!("{what}: intersection oracle gives {o}, expected {want}"));
    if let Some(count) = code.hull_count_by_enumeration(ENUMERATION_LIMIT) {
        let q = q_pow(code.tower(), want);
        t.check(Some(count) == q, || format!("{what}: enumeration gives {count} hull codewords, expected {q:?}"));
    }
}

fn reduction_suite(job: &Job, rng: &mut ChaCha8Rng) -> Trial {
    let mut t = Trial::default();
    let tower = job.tower;
    let code = varied_code(tower, job.n, job.k, rng);
    t.code = Some(code.clone());
    let h = code.hull_dim();
    t.check(h == code.hull_dim_oracle(), || "input hull formula disagrees with the oracle".into());
    let targets = variation::admissible_targets(tower.q(), h);
    for &ell in &targets {
        match variation::reduce_hull(&code, ell) {
            Ok(r) => {
                check_hull(&mut t, &r.code, ell, &format!("ell = {ell}"));
                check_witness(&mut t, &code, &r.code, &r.witness.matrix);
            }
            Err(e) => {
                t.check(false, || format!("reduce_hull(ell = {ell}) failed: {e}"));
            }
        }
    }
    t.note("hull_dim", json!(h));
    t.note("targets", json!(targets));
    t.note("enumerated", json!(q_pow(tower, code.k()).is_some_and(|c| c <= ENUMERATION_LIMIT)));
    t
}

fn lcd_suite(job: &Job, rng: &mut ChaCha8Rng) -> Trial {
    let t = Trial::default();
    let tower = job.tower;
    if QRegime::of(tower.q()) != QRegime::Small {
        return t.skip("q > 3");
    }
    let mut t = t;
    // Half of the trials target the hull-one construction directly.
    let code = if job.local.is_multiple_of(2) && max_hull(job.n, job.k) >= 1 {
        sample::random_code_with_hull(tower, job.n, job.k, 1, rng)
            .unwrap_or_else(|| varied_code(tower, job.n, job.k, rng))
    } else {
        varied_code(tower, job.n, job.k, rng)
    };
    t.code = Some(code.clone());
    let h = code.hull_dim();
    match variation::make_lcd(&code) {
        Ok(o) => {
            check_hull(&mut t, &o.code, 0, "make_lcd");
            check_witness(&mut t, &code, &o.code, &o.witness.matrix);
        }
        Err(e) => {
            t.check(false, || format!("make_lcd failed: {e}"));
        }
    }
    if h == 1 {
        match variation::make_lcd_h1(&code) {
            Ok(r) => {
                let top = tower.top();
                t.check(r.cert.q.is_symmetric(), || "certificate Q is not symmetric".into());
                t.check(!top.is_zero(r.cert.fv), || "certificate f(v) is zero".into());
                check_hull(&mut t, &r.code, 0, "make_lcd_h1");
                check_witness(&mut t, &code, &r.code, &r.witness.matrix);
            }
            Err(e) => {
                t.check(false, || format!("make_lcd_h1 failed: {e}"));
            }
        }
    }
    t.note("hull_dim", json!(h));
    t
}

fn random_matrix_code(tower: &FieldTower, n: usize, m: usize, rng: &mut ChaCha8Rng) -> MatrixCode {
    let count = rng.gen_range(0..=n * m);
    let mats: Vec<Matrix<_>> = (0..count).map(|_| sample::random_matrix(tower.mid(), n, m, rng)).collect();
    MatrixCode::from_matrices(tower, n, m, &mats).expect("shapes agree")
}

fn transfer_suite(job: &Job, rng: &mut ChaCha8Rng) -> Trial {
    let t = Trial::default();
    let tower = job.tower;
    let (q, m) = (tower.q(), tower.m());
    if !assoc::self_dual_basis_exists(q, m) {
        return t.skip("no self-dual basis (q odd, m even)");
    }
    let mut t = t;
    let basis = match assoc::find_self_dual_basis(tower, rng.gen(), 1 << 22) {
        Ok(b) => b,
        Err(e) => {
            t.check(false, || format!("self-dual basis search failed: {e}"));
            return t;
        }
    };
    t.check(
        *basis.gram() == Matrix::identity(tower.mid(), m),
        || "self-dual basis Gram matrix is not the identity".into(),
    );
    let code = varied_code(tower, job.n, job.k, rng);
    t.code = Some(code.clone());
    let h = code.hull_dim();

    match assoc::hull_transfer_chain(&code, &basis) {
        Ok(chain) => {
            for s in chain.steps.iter().filter(|s| !s.holds) {
                t.check(false, || format!("chain step failed: {} ({} vs {})", s.name, s.lhs_dim, s.rhs_dim));
            }
            t.check(chain.block_hull_dim == m * h, || {
                format!("matrix hull dimension {} ≠ m · h = {}", chain.block_hull_dim, m * h)
            });
        }
        Err(e) => {
            t.check(false, || format!("transfer chain failed: {e}"));
        }
    }

    // Duality against an arbitrary basis and its dual basis.
    let rb = sample::random_basis(tower, rng);
    match rb.dual(tower) {
        Ok(rbd) => {
            t.check(rbd.dual(tower).ok().as_ref() == Some(&rb), || "dual basis is not an involution".into());
            let lhs = assoc::associate(&code.dual(), &rbd);
            let d = assoc::associate(&code, &rb);
            t.check(lhs == d.dual(), || "associate(C^⊥, B') ≠ associate(C, B)^⊥".into());
            match d.dual_by_trace() {
                Ok(td) => {
                    t.check(td == d.dual(), || "trace-product dual ≠ dual of the flattening".into());
                }
                Err(e) => {
                    t.check(false, || format!("trace-product dual failed: {e}"));
                }
            }
        }
        Err(e) => {
            t.check(false, || format!("dual basis failed: {e}"));
        }
    }

    let (c1, c2) = (
        random_matrix_code(tower, job.n, m, rng),
        random_matrix_code(tower, job.n, m, rng),
    );
    t.check(
        c1.intersect(&c2).ok() == c1.intersect_via_columns(&c2).ok(),
        || "flattening does not commute with intersection".into(),
    );

    let mut targets = variation::admissible_targets(q, h);
    if QRegime::of(q) == QRegime::Small && h == 1 {
        targets.insert(0, 0);
    }
    for &ell in &targets {
        match assoc::reduce_hull_matrix(&code, &basis, ell) {
            Ok(r) => {
                t.check(r.matrix_hull_dim == m * ell, || {
                    format!("reduced matrix hull {} ≠ m · ell = {}", r.matrix_hull_dim, m * ell)
                });
                t.check(r.matrix_code.hull().dim() == m * r.vector_code.hull_dim(), || {
                    "matrix hull of the reduced code ≠ m · vector hull".into()
                });
                if let VectorRoute::HullOne(h1) = &r.route {
                    t.check(!tower.top().is_zero(h1.cert.fv), || "certificate f(v) is zero".into());
                }
                check_witness(&mut t, &code, &r.vector_code, &r.witness.matrix);
            }
            Err(e) => {
                t.check(false, || format!("reduce_hull_matrix(ell = {ell}) failed: {e}"));
            }
        }
    }
    t.note("hull_dim", json!(h));
    t.note("targets", json!(targets));
    t
}

fn isometry_suite(job: &Job, rng: &mut ChaCha8Rng) -> Trial {
    let t = Trial::default();
    let tower = job.tower;
    if q_pow(tower, job.k).is_none_or(|c| c > ISOMETRY_LIMIT) {
        return t.skip("too many codewords to enumerate");
    }
    let mut t = t;
    let code = varied_code(tower, job.n, job.k, rng);
    t.code = Some(code.clone());
    let base = code.rank_weights();
    for i in 0..ISOMETRY_WITNESSES {
        let w = sample::random_witness(tower, job.n, rng);
        match EquivalenceWitness::from_matrix(&code, w).and_then(|w| code.apply_witness(&w)) {
            Ok(image) => {
                t.check(image.rank_weights() == base, || format!("witness {i} changed the rank-weight multiset"));
            }
            Err(e) => {
                t.check(false, || format!("witness {i} failed: {e}"));
            }
        }
    }
    t.note("codewords", json!(base.len()));
    t.note("witnesses", json!(ISOMETRY_WITNESSES));
    t
}
