//! Bases of `F_{q^m}/F_q`, associated matrix codes and extended block codes.
//!
//! A [`MatrixCode`] is stored only through its row-major flattening
//! `ρ(C) ⊆ F_q^{nm}`; the `n × m` matrices are views of its rows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::code::{CodeError, EquivalenceWitness, RankMetricCode};
use crate::field::{Field, FieldError, FieldTower, MidElement, TopElement};
use crate::linalg::{self, LinalgError, Matrix, RowSpace};
use crate::variation::{self, QRegime, VariationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssocError {
    #[error("a basis needs {expected} elements, got {got}")]
    BasisSize { expected: usize, got: usize },
    #[error("basis elements are linearly dependent over F_q")]
    Dependent,
    #[error("no self-dual basis of F_{{{q}^{m}}} over F_{q} exists (q odd and m even)")]
    NoSelfDualBasis { q: u32, m: usize },
    #[error("self-dual basis search gave up after {budget} candidates")]
    SearchExhausted { budget: u64 },
    #[error("basis is not self-dual")]
    NotSelfDual,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Variation(#[from] VariationError),
}

/// A basis `γ₁, …, γ_m` of `F_{q^m}` over `F_q` with its trace Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionBasis {
    gammas: Vec<TopElement>,
    gram: Matrix<MidElement>,
    /// Inverse of the matrix whose rows are the power-basis coordinates of the `γⱼ`.
    coords_inv: Matrix<MidElement>,
}

/// `Trace(γᵢ γⱼ)`.
pub fn trace_gram(tower: &FieldTower, gammas: &[TopElement]) -> Result<Matrix<MidElement>, FieldError> {
    let top = tower.top();
    let m = gammas.len();
    let mut data = Vec::with_capacity(m * m);
    for &a in gammas {
        for &b in gammas {
            data.push(tower.trace(top.mul(a, b))?);
        }
    }
    Ok(Matrix::new(m, m, data))
}

fn coordinate_matrix(tower: &FieldTower, gammas: &[TopElement]) -> Matrix<MidElement> {
    let rows: Vec<Vec<MidElement>> = gammas.iter().map(|&g| tower.top().coeffs(g)).collect();
    Matrix::from_rows(tower.m(), &rows).expect("m coordinates each")
}

impl ExtensionBasis {
    pub fn new(tower: &FieldTower, gammas: Vec<TopElement>) -> Result<Self, AssocError> {
        if gammas.len() != tower.m() {
            return Err(AssocError::BasisSize {
                expected: tower.m(),
                got: gammas.len(),
            });
        }
        let coords = coordinate_matrix(tower, &gammas);
        let coords_inv = match linalg::inverse(tower.mid(), &coords) {
            Ok(inv) => inv,
            Err(LinalgError::Singular { .. }) => return Err(AssocError::Dependent),
            Err(e) => return Err(e.into()),
        };
        let gram = trace_gram(tower, &gammas)?;
        debug_assert!(gram.is_symmetric());
        Ok(ExtensionBasis {
            gammas,
            gram,
            coords_inv,
        })
    }

    pub fn power(tower: &FieldTower) -> Self {
        Self::new(tower, tower.top().power_basis()).expect("power basis is a basis")
    }

    pub fn gammas(&self) -> &[TopElement] {
        &self.gammas
    }

    pub fn gram(&self) -> &Matrix<MidElement> {
        &self.gram
    }

    pub fn is_self_dual(&self, tower: &FieldTower) -> bool {
        self.gram == Matrix::identity(tower.mid(), self.gammas.len())
    }

    /// The basis `γ'` with `Trace(γᵢ γ'ⱼ) = δᵢⱼ`, namely `γ'ⱼ = Σₖ (Gram⁻¹)ₖⱼ γₖ`.
    pub fn dual(&self, tower: &FieldTower) -> Result<ExtensionBasis, AssocError> {
        let top = tower.top();
        // The trace form is nondegenerate, so a singular Gram matrix is a bug.
        let ginv = linalg::inverse(tower.mid(), &self.gram)
            .expect("trace form of a finite field extension is nondegenerate");
        let m = self.gammas.len();
        let gammas: Vec<TopElement> = (0..m)
            .map(|j| {
                (0..m).fold(top.zero(), |acc, k| {
                    top.add(acc, top.mul(tower.lift(ginv[(k, j)]), self.gammas[k]))
                })
            })
            .collect();
        let dual = ExtensionBasis::new(tower, gammas)?;
        let cross: Vec<Vec<MidElement>> = self
            .gammas
            .iter()
            .map(|&a| {
                dual.gammas
                    .iter()
                    .map(|&b| tower.trace(top.mul(a, b)))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        assert_eq!(
            Matrix::from_rows(m, &cross)?,
            Matrix::identity(tower.mid(), m),
            "dual basis does not satisfy Trace(γᵢγ'ⱼ) = δᵢⱼ"
        );
        Ok(dual)
    }
}

/// Whether a self-dual basis of `F_{q^m}/F_q` exists.
pub fn self_dual_basis_exists(q: u32, m: usize) -> bool {
    q.is_multiple_of(2) || m % 2 == 1
}

/// Random search for a basis with identity Gram matrix.
///
/// Candidates are `T · (1, x, …, x^{m−1})ᵀ` for random invertible `T`; the
/// Gram matrix of a candidate is `T Γ₀ Tᵀ` with `Γ₀` the Gram matrix of the
/// power basis. The accepted basis is re-verified by direct trace evaluation.
pub fn find_self_dual_basis(tower: &FieldTower, seed: u64, budget: u64) -> Result<ExtensionBasis, AssocError> {
    let (q, m) = (tower.q(), tower.m());
    if !self_dual_basis_exists(q, m) {
        return Err(AssocError::NoSelfDualBasis { q, m });
    }
    let mid = tower.mid();
    let power = tower.top().power_basis();
    let gram0 = trace_gram(tower, &power)?;
    let ident = Matrix::identity(mid, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let data: Vec<MidElement> = (0..m * m).map(|_| mid.random(&mut rng)).collect();
        let t = Matrix::new(m, m, data);
        if t.matmul(mid, &gram0)?.matmul(mid, &t.transpose())? != ident {
            continue;
        }
        if linalg::rank(mid, &t) != m {
            continue;
        }
        let top = tower.top();
        let gammas: Vec<TopElement> = (0..m)
            .map(|i| {
                t.row(i).iter().zip(&power).fold(top.zero(), |acc, (&c, &g)| {
                    top.add(acc, top.mul(tower.lift(c), g))
                })
            })
            .collect();
        let basis = ExtensionBasis::new(tower, gammas)?;
        assert!(basis.is_self_dual(tower), "Gram shortcut disagrees with trace evaluation");
        return Ok(basis);
    }
    Err(AssocError::SearchExhausted { budget })
}

/// Coordinates of each `αᵢ` in the basis: `αᵢ = Σⱼ M[i][j] γⱼ`.
pub fn expand(tower: &FieldTower, alpha: &[TopElement], basis: &ExtensionBasis) -> Matrix<MidElement> {
    let mid = tower.mid();
    let top = tower.top();
    let m = tower.m();
    let mut data = Vec::with_capacity(alpha.len() * m);
    for &a in alpha {
        let row = linalg::vec_mat(mid, &top.coeffs(a), &basis.coords_inv);
        let back = row.iter().zip(basis.gammas()).fold(top.zero(), |acc, (&c, &g)| {
            top.add(acc, top.mul(tower.lift(c), g))
        });
        assert_eq!(back, a, "basis expansion does not reconstruct the coordinate");
        data.extend(row);
    }
    Matrix::new(alpha.len(), m, data)
}

/// Row-major flattening of a matrix.
pub fn rho_flatten<E: Copy>(x: &Matrix<E>) -> Vec<E> {
    x.data().to_vec()
}

pub fn rho_unflatten<E: Copy>(v: &[E], n: usize, m: usize) -> Result<Matrix<E>, AssocError> {
    if v.len() != n * m {
        return Err(AssocError::Shape(format!(
            "vector of length {} cannot be an {n}x{m} matrix",
            v.len()
        )));
    }
    Ok(Matrix::new(n, m, v.to_vec()))
}

/// Column-major flattening, the transpose-then-flatten alternative to `ρ`.
fn col_flatten<E: Copy>(x: &Matrix<E>) -> Vec<E> {
    x.transpose().data().to_vec()
}

/// `Tr(M Nᵀ)`; also asserts it equals `ρ(M) · ρ(N)`.
pub fn trace_product(
    tower: &FieldTower,
    a: &Matrix<MidElement>,
    b: &Matrix<MidElement>,
) -> Result<MidElement, AssocError> {
    if a.shape() != b.shape() {
        return Err(AssocError::Shape(format!(
            "trace product of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let mid = tower.mid();
    let prod = a.matmul(mid, &b.transpose())?;
    let tr = (0..prod.rows()).fold(mid.zero(), |acc, i| mid.add(acc, prod[(i, i)]));
    assert_eq!(tr, linalg::dot(mid, a.data(), b.data()), "trace product differs from ρ dot product");
    Ok(tr)
}

/// An `F_q`-linear space of `n × m` matrices, stored as `ρ(C)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixCode {
    tower: FieldTower,
    n: usize,
    m: usize,
    rho: RowSpace<MidElement>,
}

impl MatrixCode {
    pub fn from_rho(tower: &FieldTower, n: usize, m: usize, gen_rho: &Matrix<MidElement>) -> Result<Self, AssocError> {
        if gen_rho.cols() != n * m {
            return Err(AssocError::Shape(format!(
                "generator width {} is not {n}*{m}",
                gen_rho.cols()
            )));
        }
        Ok(MatrixCode {
            tower: tower.clone(),
            n,
            m,
            rho: RowSpace::from_generators(tower.mid(), gen_rho),
        })
    }

    pub fn from_matrices(tower: &FieldTower, n: usize, m: usize, mats: &[Matrix<MidElement>]) -> Result<Self, AssocError> {
        if let Some(x) = mats.iter().find(|x| x.shape() != (n, m)) {
            return Err(AssocError::Shape(format!("{:?} is not {n}x{m}", x.shape())));
        }
        let rows: Vec<Vec<MidElement>> = mats.iter().map(rho_flatten).collect();
        Self::from_rho(tower, n, m, &Matrix::from_rows(n * m, &rows)?)
    }

    fn with_space(&self, rho: RowSpace<MidElement>) -> Self {
        MatrixCode {
            tower: self.tower.clone(),
            n: self.n,
            m: self.m,
            rho,
        }
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// Dimension over `F_q`.
    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// Generator of `ρ(C)` in RREF.
    pub fn gen_rho(&self) -> &Matrix<MidElement> {
        self.rho.basis()
    }

    pub fn rho(&self) -> &RowSpace<MidElement> {
        &self.rho
    }

    /// The generators as `n × m` matrices.
    pub fn matrices(&self) -> Vec<Matrix<MidElement>> {
        (0..self.dim())
            .map(|i| rho_unflatten(self.gen_rho().row(i), self.n, self.m).expect("row width"))
            .collect()
    }

    /// Dual under the trace product: the kernel of the flattened generator.
    pub fn dual(&self) -> MatrixCode {
        let d = self.with_space(self.rho.orthogonal(self.tower.mid()));
        debug_assert_eq!(d.dim(), self.n * self.m - self.dim());
        d
    }

    /// Dual computed from trace products against the unit matrices.
    pub fn dual_by_trace(&self) -> Result<MatrixCode, AssocError> {
        let mid = self.tower.mid();
        let (n, m) = (self.n, self.m);
        let gens = self.matrices();
        let mut rows = Vec::with_capacity(gens.len());
        for g in &gens {
            let mut row = Vec::with_capacity(n * m);
            for i in 0..n {
                for j in 0..m {
                    let mut unit = Matrix::zeros(mid, n, m);
                    unit[(i, j)] = mid.one();
                    row.push(trace_product(&self.tower, g, &unit)?);
                }
            }
            rows.push(row);
        }
        let system = Matrix::from_rows(n * m, &rows)?;
        let space = if gens.is_empty() {
            RowSpace::full(mid, n * m)
        } else {
            linalg::kernel(mid, &system)
        };
        Ok(self.with_space(space))
    }

    pub fn hull(&self) -> MatrixCode {
        let mid = self.tower.mid();
        self.with_space(self.rho.intersect(mid, &self.dual().rho).expect("same ambient"))
    }

    pub fn intersect(&self, other: &MatrixCode) -> Result<MatrixCode, AssocError> {
        if self.shape() != other.shape() {
            return Err(AssocError::Shape("matrix codes of different shapes".into()));
        }
        Ok(self.with_space(self.rho.intersect(self.tower.mid(), &other.rho)?))
    }

    /// Intersection computed on column-major flattenings and mapped back to `ρ`.
    pub fn intersect_via_columns(&self, other: &MatrixCode) -> Result<MatrixCode, AssocError> {
        if self.shape() != other.shape() {
            return Err(AssocError::Shape("matrix codes of different shapes".into()));
        }
        let mid = self.tower.mid();
        let (n, m) = (self.n, self.m);
        let cols = |c: &MatrixCode| -> Result<RowSpace<MidElement>, AssocError> {
            let rows: Vec<Vec<MidElement>> = c.matrices().iter().map(col_flatten).collect();
            Ok(RowSpace::from_generators(mid, &Matrix::from_rows(n * m, &rows)?))
        };
        let meet = cols(self)?.intersect(mid, &cols(other)?)?;
        let mats: Vec<Matrix<MidElement>> = (0..meet.dim())
            .map(|i| Matrix::new(m, n, meet.basis().row(i).to_vec()).transpose())
            .collect();
        MatrixCode::from_matrices(&self.tower, n, m, &mats)
    }

    pub fn is_lcd(&self) -> bool {
        self.hull().dim() == 0
    }
}

/// The matrix code `{M_G(α) : α ∈ C}`, generated by the `m k` products `γⱼ gᵢ`.
pub fn associate(code: &RankMetricCode, basis: &ExtensionBasis) -> MatrixCode {
    let tower = code.tower();
    let top = tower.top();
    let (n, m) = (code.n(), tower.m());
    let mut rows = Vec::with_capacity(code.k() * m);
    for i in 0..code.k() {
        let g = code.generator().row(i);
        for &gamma in basis.gammas() {
            let scaled: Vec<TopElement> = g.iter().map(|&x| top.mul(gamma, x)).collect();
            rows.push(rho_flatten(&expand(tower, &scaled, basis)));
        }
    }
    let gen = Matrix::from_rows(n * m, &rows).expect("row width");
    let d = MatrixCode::from_rho(tower, n, m, &gen).expect("shape");
    assert_eq!(d.dim(), m * code.k(), "association is not injective");
    d
}

/// Vector-level result behind [`reduce_hull_matrix`].
#[derive(Clone, Debug)]
pub enum VectorRoute {
    Reduction(Box<variation::Reduction>),
    HullOne(Box<variation::LcdH1>),
}

#[derive(Clone, Debug)]
pub struct MatrixReduction {
    pub route: VectorRoute,
    pub vector_code: RankMetricCode,
    pub witness: EquivalenceWitness,
    pub matrix_code: MatrixCode,
    pub matrix_hull_dim: usize,
}

/// The associated matrix code of an equivalent vector code with hull `ell`.
///
/// Over `F_2`/`F_3` with hull dimension one, `ell = 0` goes through the
/// hull-one LCD construction.
pub fn reduce_hull_matrix(
    code: &RankMetricCode,
    basis: &ExtensionBasis,
    ell: usize,
) -> Result<MatrixReduction, AssocError> {
    let tower = code.tower();
    if !basis.is_self_dual(tower) {
        return Err(AssocError::NotSelfDual);
    }
    let h = code.hull_dim();
    let small = QRegime::of(tower.q()) == QRegime::Small;
    let (vector_code, witness, route) = if small && h == 1 && ell == 0 {
        let r = variation::make_lcd_h1(code)?;
        (r.code.clone(), r.witness.clone(), VectorRoute::HullOne(Box::new(r)))
    } else {
        let r = variation::reduce_hull(code, ell)?;
        (r.code.clone(), r.witness.clone(), VectorRoute::Reduction(Box::new(r)))
    };
    let matrix_code = associate(&vector_code, basis);
    let matrix_hull_dim = matrix_code.hull().dim();
    if matrix_hull_dim != tower.m() * ell {
        return Err(VariationError::Verification(format!(
            "matrix hull dimension {matrix_hull_dim} differs from m·ell = {}",
            tower.m() * ell
        ))
        .into());
    }
    Ok(MatrixReduction {
        route,
        vector_code,
        witness,
        matrix_code,
        matrix_hull_dim,
    })
}

/// One equality in the hull transfer chain, with both sides' dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub name: &'static str,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferChain {
    pub steps: Vec<ChainStep>,
    pub vector_hull_dim: usize,
    pub block_hull_dim: usize,
    pub expected_dim: usize,
}

impl TransferChain {
    pub fn ok(&self) -> bool {
        self.steps.iter().all(|s| s.holds) && self.block_hull_dim == self.expected_dim
    }
}

fn step(name: &'static str, lhs: &MatrixCode, rhs: &MatrixCode) -> ChainStep {
    ChainStep {
        name,
        lhs_dim: lhs.dim(),
        rhs_dim: rhs.dim(),
        holds: lhs == rhs,
    }
}

/// Evaluates each equality of
/// `H(D) = ρ(C_G(C)) ∩ ρ(C_G(C))^⊥ = … = ρ(C_G(H(C)))` on a concrete code.
pub fn hull_transfer_chain(code: &RankMetricCode, basis: &ExtensionBasis) -> Result<TransferChain, AssocError> {
    let tower = code.tower();
    if !basis.is_self_dual(tower) {
        return Err(AssocError::NotSelfDual);
    }
    let dual_basis = basis.dual(tower)?;
    let d = associate(code, basis);
    let block_dual = d.dual();
    let trace_dual = d.dual_by_trace()?;
    let assoc_of_dual = associate(&code.dual(), &dual_basis);
    let hull_block = d.intersect(&block_dual)?;
    let hull_matrix = d.intersect_via_columns(&assoc_of_dual)?;
    let hull_assoc = associate(&RankMetricCode::from_space(tower, code.hull()), basis);

    let steps = vec![
        step("flattening commutes with duality", &block_dual, &trace_dual),
        step("dual of association is association of dual", &trace_dual, &assoc_of_dual),
        step(
            "flattening commutes with intersection",
            &d.intersect(&assoc_of_dual)?,
            &hull_matrix,
        ),
        step("association commutes with hull", &hull_matrix, &hull_assoc),
        step("block hull equals associated hull", &hull_block, &hull_assoc),
    ];
    let h = code.hull_dim();
    Ok(TransferChain {
        steps,
        vector_hull_dim: h,
        block_hull_dim: hull_block.dim(),
        expected_dim: tower.m() * h,
    })
}
