//! Equivalence transformations that lower the hull dimension.
//!
//! Every transformation is right multiplication of a generator by a matrix
//! in `GL_n(F_q)`, which preserves rank weights. Each constructive
//! postcondition is re-checked at runtime: a failed check is reported as
//! [`VariationError::Verification`] rather than trusted.

use thiserror::Error;

use crate::code::{CodeError, EquivalenceWitness, HullForm, RankMetricCode};
use crate::field::{Field, FieldTower, MidElement, MidField, TopElement};
use crate::linalg::{self, LinalgError, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VariationError {
    #[error("no Y construction of size 1 exists over F_{q}")]
    NoConstruction { q: u32 },
    #[error("size must be at least 1")]
    EmptyBlock,
    #[error("target hull dimension {ell} is not reachable from {h} over F_{q}: {reason}")]
    Inadmissible {
        q: u32,
        h: usize,
        ell: usize,
        reason: &'static str,
    },
    #[error("the hull-one LCD construction needs q in {{2, 3}}, got q = {0}")]
    WrongRegime(u32),
    #[error("the hull-one LCD construction needs hull dimension 1, got {0}")]
    WrongHull(usize),
    #[error("postcondition failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn verify(ok: bool, what: &str) -> Result<(), VariationError> {
    if ok {
        Ok(())
    } else {
        Err(VariationError::Verification(what.to_string()))
    }
}

/// Whether the base field is `F_2`/`F_3` or larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QRegime {
    Small,
    Large,
}

impl QRegime {
    pub fn of(q: u32) -> Self {
        if q <= 3 {
            QRegime::Small
        } else {
            QRegime::Large
        }
    }
}

/// Targets reachable by block-diagonal reduction from hull dimension `h`,
/// including the trivial target `h` itself.
pub fn admissible_targets(q: u32, h: usize) -> Vec<usize> {
    let mut out: Vec<usize> = match QRegime::of(q) {
        QRegime::Large => (0..h).collect(),
        QRegime::Small if h >= 2 => (0..h - 1).collect(),
        QRegime::Small => Vec::new(),
    };
    out.push(h);
    out
}

fn check_target(q: u32, h: usize, ell: usize) -> Result<(), VariationError> {
    let fail = |reason| Err(VariationError::Inadmissible { q, h, ell, reason });
    if ell > h {
        return fail("hull dimension cannot be increased");
    }
    if ell == h {
        return Ok(());
    }
    if QRegime::of(q) == QRegime::Small && ell + 1 == h {
        return fail("over F_2 and F_3 the block construction lowers the hull by at least 2");
    }
    Ok(())
}

fn z2(mid: &MidField) -> Matrix<MidElement> {
    let (o, z) = (mid.one(), mid.zero());
    Matrix::new(2, 2, vec![o, z, o, o])
}

fn z3(mid: &MidField) -> Matrix<MidElement> {
    let (o, z) = (mid.one(), mid.zero());
    Matrix::new(3, 3, vec![o, z, z, o, o, z, z, o, o])
}

/// Smallest `a ∈ F_q` (enumeration order) with `a ≠ 0` and `a² ≠ 1`.
pub fn smallest_non_involution(mid: &MidField) -> Option<MidElement> {
    (2..mid.order())
        .map(|i| mid.element(i))
        .find(|&a| mid.mul(a, a) != mid.one())
}

/// An `s × s` matrix `Y ∈ GL_s(F_q)` with `Y Yᵀ − I` invertible.
///
/// Over `F_2`/`F_3`, `s = 2a + 3b` with as many `Z₂` blocks as possible
/// (at most one `Z₃`, placed last). Over larger fields, `Y` is the scalar
/// matrix of [`smallest_non_involution`].
pub fn build_y(mid: &MidField, s: usize) -> Result<Matrix<MidElement>, VariationError> {
    if s == 0 {
        return Err(VariationError::EmptyBlock);
    }
    let y = match QRegime::of(mid.order()) {
        QRegime::Small => {
            if s == 1 {
                return Err(VariationError::NoConstruction { q: mid.order() });
            }
            let (a, b) = if s.is_multiple_of(2) { (s / 2, 0) } else { ((s - 3) / 2, 1) };
            let mut blocks = vec![z2(mid); a];
            blocks.extend(std::iter::repeat_n(z3(mid), b));
            linalg::block_diag(mid, &blocks)?
        }
        QRegime::Large => {
            let a = smallest_non_involution(mid).expect("q > 3 has such an element");
            Matrix::identity(mid, s).scale(mid, a)
        }
    };
    let defect = y.gram(mid).sub(mid, &Matrix::identity(mid, s))?;
    verify(linalg::rank(mid, &defect) == s, "Y Yᵀ − I is singular")?;
    Ok(y)
}

/// The matrices `Y`, `X = diag(Y, I_ℓ)` and `M = diag(X, I_{n−h})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionPlan {
    pub regime: QRegime,
    pub h: usize,
    pub ell: usize,
    pub y: Matrix<MidElement>,
    pub x: Matrix<MidElement>,
    pub m: Matrix<MidElement>,
}

impl ReductionPlan {
    pub fn new(tower: &FieldTower, n: usize, h: usize, ell: usize) -> Result<Self, VariationError> {
        let mid = tower.mid();
        check_target(tower.q(), h, ell)?;
        let s = h - ell;
        let y = if s == 0 {
            Matrix::zeros(mid, 0, 0)
        } else {
            build_y(mid, s)?
        };
        let x = linalg::block_diag(mid, &[y.clone(), Matrix::identity(mid, ell)])?;
        let m = linalg::block_diag(mid, &[x.clone(), Matrix::identity(mid, n - h)])?;
        Ok(ReductionPlan {
            regime: QRegime::of(tower.q()),
            h,
            ell,
            y,
            x,
            m,
        })
    }
}

/// Output of [`reduce_hull`].
#[derive(Clone, Debug)]
pub struct Reduction {
    pub input_hull_dim: usize,
    pub ell: usize,
    /// `None` for the identity plan.
    pub form: Option<HullForm>,
    pub plan: Option<ReductionPlan>,
    /// `G' = G₀ M` where `G₀` is the standardized generator.
    pub transformed_gen: Matrix<TopElement>,
    /// `G' G'ᵀ`.
    pub gram: Matrix<TopElement>,
    pub code: RankMetricCode,
    /// From the input code to `code`; the matrix is `perm · M`.
    pub witness: EquivalenceWitness,
}

/// An equivalent code whose hull has dimension exactly `ell`.
pub fn reduce_hull(code: &RankMetricCode, ell: usize) -> Result<Reduction, VariationError> {
    let tower = code.tower();
    let top = tower.top();
    let h = code.hull_dim();
    check_target(tower.q(), h, ell)?;
    if ell == h {
        return Ok(Reduction {
            input_hull_dim: h,
            ell,
            form: None,
            plan: None,
            transformed_gen: code.generator().clone(),
            gram: code.gram(),
            code: code.clone(),
            witness: EquivalenceWitness::identity(code),
        });
    }

    let form = code.standardize_hull()?;
    let plan = ReductionPlan::new(tower, code.n(), h, ell)?;
    let g_prime = form.std_gen.matmul(top, &linalg::lift(tower, &plan.m))?;
    let gram = g_prime.gram(top);

    // G'G'ᵀ = diag(Y Yᵀ − I, 0_ℓ, B Bᵀ).
    let s = h - ell;
    let lift = |m: &Matrix<MidElement>| linalg::lift(tower, m);
    let defect = plan.y.gram(tower.mid()).sub(tower.mid(), &Matrix::identity(tower.mid(), s))?;
    let expected = linalg::block_diag(
        top,
        &[lift(&defect), Matrix::zeros(top, ell, ell), form.b.gram(top)],
    )?;
    verify(gram == expected, "G'G'ᵀ does not have the expected block shape")?;
    verify(
        linalg::rank(top, &gram) == code.k() - ell,
        "rank of G'G'ᵀ differs from k − ell",
    )?;

    let total = form.perm_matrix.matmul(tower.mid(), &plan.m)?;
    let witness = EquivalenceWitness::from_matrix(code, total)?;
    let out = witness.target_code().clone();
    verify(
        out == RankMetricCode::new(tower, &g_prime)?,
        "witness does not reproduce the transformed generator",
    )?;
    verify(out.hull_dim() == ell, "transformed hull dimension differs from the target")?;
    verify(out.hull_dim_oracle() == ell, "intersection oracle disagrees with the target")?;

    Ok(Reduction {
        input_hull_dim: h,
        ell,
        form: Some(form),
        plan: Some(plan),
        transformed_gen: g_prime,
        gram,
        code: out,
        witness,
    })
}

/// Data certifying the hull-one LCD construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcdH1Certificate {
    pub v: Vec<MidElement>,
    /// `v vᵀ + 2 v Aᵀ`.
    pub theta: TopElement,
    /// `f(v) = v Q vᵀ + 2 v Aᵀ`.
    pub fv: TopElement,
    /// `S = B Bᵀ`.
    pub s: Matrix<TopElement>,
    pub s_inv: Matrix<TopElement>,
    /// `P = Bᵀ S⁻¹ B`.
    pub p: Matrix<TopElement>,
    /// `Q = I − P`.
    pub q: Matrix<TopElement>,
}

#[derive(Clone, Debug)]
pub struct LcdH1 {
    pub form: HullForm,
    pub cert: LcdH1Certificate,
    /// `[[1, v], [0, I]]`.
    pub m: Matrix<MidElement>,
    pub transformed_gen: Matrix<TopElement>,
    pub gram: Matrix<TopElement>,
    pub code: RankMetricCode,
    pub witness: EquivalenceWitness,
}

/// `v Q vᵀ + 2 v Aᵀ` with `v` over the base field.
fn quadratic_value(tower: &FieldTower, v: &[MidElement], q: &Matrix<TopElement>, a: &[TopElement]) -> TopElement {
    let top = tower.top();
    let lv: Vec<TopElement> = v.iter().map(|&x| tower.lift(x)).collect();
    let qv = linalg::vec_mat(top, &lv, q);
    let quad = linalg::dot(top, &qv, &lv);
    let lin = linalg::dot(top, &lv, a);
    top.add(quad, top.add(lin, lin))
}

/// Makes a code with one-dimensional hull over `F_2` or `F_3` LCD.
///
/// The witness is `[[1, v], [0, I_{n−1}]]` after standardization, with `v`
/// a signed unit vector chosen so that `f(v) ≠ 0`.
pub fn make_lcd_h1(code: &RankMetricCode) -> Result<LcdH1, VariationError> {
    let tower = code.tower();
    let (top, mid) = (tower.top(), tower.mid());
    let q = tower.q();
    if QRegime::of(q) != QRegime::Small {
        return Err(VariationError::WrongRegime(q));
    }
    let h = code.hull_dim();
    if h != 1 {
        return Err(VariationError::WrongHull(h));
    }
    let (n, k) = (code.n(), code.k());
    let form = code.standardize_hull()?;
    let a: Vec<TopElement> = form.a.row(0).to_vec();
    let b = &form.b;

    let s = b.gram(top);
    let s_inv = linalg::inverse(top, &s)?;
    let p = b.transpose().matmul(top, &s_inv)?.matmul(top, b)?;
    let qm = Matrix::identity(top, n - 1).sub(top, &p)?;
    verify(qm.is_symmetric(), "Q is not symmetric")?;
    let aqa = linalg::dot(top, &linalg::vec_mat(top, &a, &qm), &a);
    verify(aqa == top.neg(top.one()), "A Q Aᵀ differs from −1")?;

    let unit = |i: usize| {
        let mut v = vec![mid.zero(); n - 1];
        v[i] = mid.one();
        v
    };
    let v = if q == 2 {
        let i = (0..n - 1)
            .find(|&i| !top.is_zero(qm[(i, i)]))
            .ok_or_else(|| VariationError::Verification("Q has zero diagonal".into()))?;
        unit(i)
    } else {
        let i = (0..n - 1)
            .find(|&i| !top.is_zero(a[i]))
            .ok_or_else(|| VariationError::Verification("A is zero".into()))?;
        let v = unit(i);
        if top.is_zero(quadratic_value(tower, &v, &qm, &a)) {
            v.iter().map(|&x| mid.neg(x)).collect()
        } else {
            v
        }
    };

    let lv: Vec<TopElement> = v.iter().map(|&x| tower.lift(x)).collect();
    let vvt = linalg::dot(top, &lv, &lv);
    let vat = linalg::dot(top, &lv, &a);
    let theta = top.add(vvt, top.add(vat, vat));
    let fv = quadratic_value(tower, &v, &qm, &a);
    verify(!top.is_zero(fv), "f(v) vanishes")?;
    let bv = b.matmul(top, &Matrix::row_vector(&lv).transpose())?;
    let correction = bv.transpose().matmul(top, &s_inv)?.matmul(top, &bv)?;
    let schur = top.sub(theta, correction[(0, 0)]);
    verify(schur == fv, "f(v) differs from θ − v Bᵀ S⁻¹ B vᵀ")?;

    let mut m = Matrix::identity(mid, n);
    for (j, &x) in v.iter().enumerate() {
        m[(0, j + 1)] = x;
    }
    let g_prime = form.std_gen.matmul(top, &linalg::lift(tower, &m))?;
    let gram = g_prime.gram(top);
    // The product is k×k, so the full-rank statement is rank k.
    verify(linalg::rank(top, &gram) == k, "G'G'ᵀ is not of full rank k")?;

    let total = form.perm_matrix.matmul(mid, &m)?;
    let witness = EquivalenceWitness::from_matrix(code, total)?;
    let out = witness.target_code().clone();
    verify(
        out == RankMetricCode::new(tower, &g_prime)?,
        "witness does not reproduce the transformed generator",
    )?;
    verify(out.hull_dim() == 0 && out.hull_dim_oracle() == 0, "output is not LCD")?;

    Ok(LcdH1 {
        form,
        cert: LcdH1Certificate {
            v,
            theta,
            fv,
            s,
            s_inv,
            p,
            q: qm,
        },
        m,
        transformed_gen: g_prime,
        gram,
        code: out,
        witness,
    })
}

#[derive(Clone, Debug)]
pub enum LcdRoute {
    AlreadyLcd,
    Reduction(Box<Reduction>),
    HullOne(Box<LcdH1>),
}

#[derive(Clone, Debug)]
pub struct LcdOutcome {
    pub route: LcdRoute,
    pub code: RankMetricCode,
    pub witness: EquivalenceWitness,
}

/// An equivalent LCD code for any input.
pub fn make_lcd(code: &RankMetricCode) -> Result<LcdOutcome, VariationError> {
    let h = code.hull_dim();
    let small = QRegime::of(code.tower().q()) == QRegime::Small;
    let outcome = if h == 0 {
        LcdOutcome {
            route: LcdRoute::AlreadyLcd,
            code: code.clone(),
            witness: EquivalenceWitness::identity(code),
        }
    } else if small && h == 1 {
        let r = make_lcd_h1(code)?;
        LcdOutcome {
            code: r.code.clone(),
            witness: r.witness.clone(),
            route: LcdRoute::HullOne(Box::new(r)),
        }
    } else {
        let r = reduce_hull(code, 0)?;
        LcdOutcome {
            code: r.code.clone(),
            witness: r.witness.clone(),
            route: LcdRoute::Reduction(Box::new(r)),
        }
    };
    verify(outcome.code.is_lcd(), "make_lcd output is not LCD")?;
    Ok(outcome)
}
