//! Vector rank-metric codes `[n,k]_{q^m/q}`.
//!
//! A code is stored through the RREF of its generator matrix, so two codes
//! are equal exactly when their generators are equal. The zero code is
//! representable (empty generator) so that the dual of the full space is
//! well typed.

use std::fmt;

use thiserror::Error;

use crate::field::{Field, FieldTower, MidElement, TopElement};
use crate::linalg::{self, LinalgError, Matrix, RowSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("generator matrix is zero")]
    ZeroGenerator,
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("the code is LCD, there is no hull to standardize")]
    TrivialHull,
    #[error("witness matrix is singular (rank {rank} of {size})")]
    SingularWitness { rank: usize, size: usize },
    #[error("witness does not start at this code (expected {expected}, got {got})")]
    WitnessSource { expected: CodeId, got: CodeId },
    #[error("witnesses do not chain ({0} then {1})")]
    WitnessChain(CodeId, CodeId),
    #[error("different field towers")]
    TowerMismatch,
    #[error("postcondition failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Fingerprint of a code: FNV-1a over the tower parameters and the
/// canonical generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeId(pub u64);

impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankMetricCode {
    tower: FieldTower,
    n: usize,
    gen: Matrix<TopElement>,
}

impl RankMetricCode {
    /// Canonicalizes `gen` to RREF; `k` is its rank.
    pub fn new(tower: &FieldTower, gen: &Matrix<TopElement>) -> Result<Self, CodeError> {
        if gen.is_zero(tower.top()) {
            return Err(CodeError::ZeroGenerator);
        }
        Ok(Self::from_space(tower, RowSpace::from_generators(tower.top(), gen)))
    }

    pub fn zero(tower: &FieldTower, n: usize) -> Self {
        Self::from_space(tower, RowSpace::zero(n))
    }

    pub fn from_space(tower: &FieldTower, space: RowSpace<TopElement>) -> Self {
        RankMetricCode {
            tower: tower.clone(),
            n: space.ambient(),
            gen: space.into_basis(),
        }
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    /// Canonical (RREF) generator matrix.
    pub fn generator(&self) -> &Matrix<TopElement> {
        &self.gen
    }

    pub fn space(&self) -> RowSpace<TopElement> {
        RowSpace::from_generators(self.tower.top(), &self.gen)
    }

    pub fn id(&self) -> CodeId {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        feed(self.tower.p() as u64);
        feed(self.tower.e() as u64);
        feed(self.tower.m() as u64);
        feed(self.n as u64);
        feed(self.k() as u64);
        for x in self.gen.data() {
            feed(x.index() as u64);
        }
        CodeId(h)
    }

    pub fn contains(&self, v: &[TopElement]) -> bool {
        self.space().contains(self.tower.top(), v)
    }

    pub fn dual(&self) -> RankMetricCode {
        let space = self.space().orthogonal(self.tower.top());
        Self::from_space(&self.tower, space)
    }

    /// `G Gᵀ` of the canonical generator.
    pub fn gram(&self) -> Matrix<TopElement> {
        self.gen.gram(self.tower.top())
    }

    /// `k − rank(G Gᵀ)`.
    ///
    /// With debug assertions (or the `crosscheck` feature) the value is
    /// compared against the dimension of `C ∩ C^⊥`.
    pub fn hull_dim(&self) -> usize {
        let h = hull_dim_of(&self.tower, &self.gen);
        if cfg!(any(debug_assertions, feature = "crosscheck")) {
            let oracle = self.hull_dim_oracle();
            assert_eq!(h, oracle, "hull dimension formula disagrees with intersection");
        }
        h
    }

    /// Dimension of `C ∩ C^⊥` by explicit intersection.
    pub fn hull_dim_oracle(&self) -> usize {
        self.hull().dim()
    }

    pub fn hull(&self) -> RowSpace<TopElement> {
        let top = self.tower.top();
        self.space()
            .intersect(top, &self.dual().space())
            .expect("same ambient")
    }

    pub fn is_lcd(&self) -> bool {
        self.hull_dim() == 0
    }

    /// Generator of the code obtained by permuting columns: column `j` of
    /// the result is column `perm[j]` of this code.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<RankMetricCode, CodeError> {
        let w = permutation_matrix(&self.tower, perm)?;
        let wit = EquivalenceWitness::from_matrix(self, w)?;
        Ok(wit.target_code)
    }

    /// Brings the code to the shape `[[I_h, A], [0, B]]` after moving the
    /// pivot columns of the hull's RREF basis to the front.
    pub fn standardize_hull(&self) -> Result<HullForm, CodeError> {
        let top = self.tower.top();
        let hull = self.hull();
        let h = hull.dim();
        if h == 0 {
            return Err(CodeError::TrivialHull);
        }
        let (n, k) = (self.n, self.k());
        let pivots = hull.pivots(top);
        let mut perm = pivots.clone();
        perm.extend((0..n).filter(|c| !pivots.contains(c)));

        let basis = linalg::complete_basis(top, &hull, &self.space())?;
        let mut std_gen = basis.select_cols(&perm);
        // Clear the leading h columns of the completion rows.
        for r in h..k {
            for i in 0..h {
                let c = std_gen[(r, i)];
                if top.is_zero(c) {
                    continue;
                }
                for j in 0..n {
                    let v = top.sub(std_gen[(r, j)], top.mul(c, std_gen[(i, j)]));
                    std_gen[(r, j)] = v;
                }
            }
        }
        let a = std_gen.submatrix(0, h, h, n);
        let b = std_gen.submatrix(h, k, h, n);
        let perm_matrix = permutation_matrix(&self.tower, &perm)?;
        let form = HullForm {
            h,
            perm,
            perm_matrix,
            std_gen,
            a,
            b,
        };
        form.verify(self)?;
        Ok(form)
    }

    pub fn apply_witness(&self, w: &EquivalenceWitness) -> Result<RankMetricCode, CodeError> {
        if w.source != self.id() {
            return Err(CodeError::WitnessSource {
                expected: self.id(),
                got: w.source,
            });
        }
        let out = self.transform(&w.matrix)?;
        if out.id() != w.target {
            return Err(CodeError::Verification(
                "witness target does not match the transformed code".into(),
            ));
        }
        Ok(out)
    }

    /// The code generated by `G · M` for `M ∈ GL_n(F_q)`.
    pub fn transform(&self, m: &Matrix<MidElement>) -> Result<RankMetricCode, CodeError> {
        check_invertible(&self.tower, m, self.n)?;
        let product = self.gen.matmul(self.tower.top(), &linalg::lift(&self.tower, m))?;
        Ok(Self::from_space(
            &self.tower,
            RowSpace::from_generators(self.tower.top(), &product),
        ))
    }

    /// Every codeword, in enumeration order of the message vector.
    pub fn codewords(&self) -> Vec<Vec<TopElement>> {
        let top = self.tower.top();
        let q = top.order() as u64;
        let k = self.k();
        let total = q.pow(k as u32);
        let mut out = Vec::with_capacity(total as usize);
        for idx in 0..total {
            let mut x = Vec::with_capacity(k);
            let mut t = idx;
            for _ in 0..k {
                x.push(top.element((t % q) as u32));
                t /= q;
            }
            out.push(linalg::vec_mat(top, &x, &self.gen));
        }
        out
    }

    /// Number of codewords orthogonal to every generator row, by walking all
    /// `Q^k` codewords; `None` when `Q^k` exceeds `limit`.
    pub fn hull_count_by_enumeration(&self, limit: u64) -> Option<u64> {
        let top = self.tower.top();
        let q = top.order() as u64;
        let k = self.k();
        let total = q.checked_pow(k as u32).filter(|&t| t <= limit)?;
        let rows: Vec<&[TopElement]> = (0..k).map(|i| self.gen.row(i)).collect();
        let mut msg = vec![0u32; k];
        let mut word = vec![top.zero(); self.n];
        let mut count = 0;
        for _ in 0..total {
            if rows.iter().all(|r| top.is_zero(linalg::dot(top, &word, r))) {
                count += 1;
            }
            // Odometer step: bump the lowest digit, carrying into the next.
            for (i, digit) in msg.iter_mut().enumerate() {
                let old = top.element(*digit);
                *digit = (*digit + 1) % q as u32;
                let delta = top.sub(top.element(*digit), old);
                for (w, &g) in word.iter_mut().zip(rows[i]) {
                    *w = top.add(*w, top.mul(delta, g));
                }
                if *digit != 0 {
                    break;
                }
            }
        }
        Some(count)
    }

    /// Sorted multiset of rank weights over all codewords.
    pub fn rank_weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self
            .codewords()
            .iter()
            .map(|c| rank_weight(&self.tower, c))
            .collect();
        w.sort_unstable();
        w
    }
}

pub(crate) fn hull_dim_of(tower: &FieldTower, gen: &Matrix<TopElement>) -> usize {
    gen.rows() - linalg::rank(tower.top(), &gen.gram(tower.top()))
}

fn check_invertible(tower: &FieldTower, m: &Matrix<MidElement>, n: usize) -> Result<(), CodeError> {
    if m.shape() != (n, n) {
        return Err(CodeError::Length {
            expected: n,
            got: m.rows().max(m.cols()),
        });
    }
    let r = linalg::rank(tower.mid(), m);
    if r != n {
        return Err(CodeError::SingularWitness { rank: r, size: n });
    }
    Ok(())
}

/// `P` with `(G P)[:, j] = G[:, perm[j]]`.
pub fn permutation_matrix(tower: &FieldTower, perm: &[usize]) -> Result<Matrix<MidElement>, CodeError> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(CodeError::Verification(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let mid = tower.mid();
    let mut m = Matrix::zeros(mid, n, n);
    for (j, &p) in perm.iter().enumerate() {
        m[(p, j)] = mid.one();
    }
    Ok(m)
}

/// Rank weight: `dim_{F_q}` of the span of the coordinates of `v`.
pub fn rank_weight(tower: &FieldTower, v: &[TopElement]) -> usize {
    let m = tower.m();
    let mut data = Vec::with_capacity(v.len() * m);
    for &x in v {
        data.extend(tower.top().coeffs(x));
    }
    linalg::rank(tower.mid(), &Matrix::new(v.len(), m, data))
}

/// Standardized generator `[[I_h, A], [0, B]]` of a column-permuted code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullForm {
    pub h: usize,
    /// Column `j` of `std_gen` is column `perm[j]` of the original code.
    pub perm: Vec<usize>,
    pub perm_matrix: Matrix<MidElement>,
    pub std_gen: Matrix<TopElement>,
    pub a: Matrix<TopElement>,
    pub b: Matrix<TopElement>,
}

impl HullForm {
    /// Checks the structural identities of the form against `code`.
    pub fn verify(&self, code: &RankMetricCode) -> Result<(), CodeError> {
        let t = code.tower();
        let top = t.top();
        let k = code.k();
        let permuted = code.transform(&self.perm_matrix)?;
        if RowSpace::from_generators(top, &self.std_gen) != permuted.space() {
            return Err(CodeError::Verification(
                "standard generator does not span the permuted code".into(),
            ));
        }
        let ident = Matrix::identity(top, self.h);
        if self.std_gen.submatrix(0, self.h, 0, self.h) != ident
            || !self.std_gen.submatrix(self.h, k, 0, self.h).is_zero(top)
        {
            return Err(CodeError::Verification("generator is not in [[I, A], [0, B]] shape".into()));
        }
        let aat_plus_i = self.a.gram(top).add(top, &ident)?;
        if !aat_plus_i.is_zero(top) {
            return Err(CodeError::Verification("A Aᵀ + I is nonzero".into()));
        }
        let abt = self.a.matmul(top, &self.b.transpose())?;
        if !abt.is_zero(top) {
            return Err(CodeError::Verification("A Bᵀ is nonzero".into()));
        }
        if linalg::rank(top, &self.b.gram(top)) != k - self.h {
            return Err(CodeError::Verification("B Bᵀ is not of rank k − h".into()));
        }
        Ok(())
    }
}

/// `target = source · matrix` with `matrix ∈ GL_n(F_q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub matrix: Matrix<MidElement>,
    pub source: CodeId,
    pub target: CodeId,
    target_code: RankMetricCode,
}

impl EquivalenceWitness {
    pub fn identity(code: &RankMetricCode) -> Self {
        EquivalenceWitness {
            matrix: Matrix::identity(code.tower().mid(), code.n()),
            source: code.id(),
            target: code.id(),
            target_code: code.clone(),
        }
    }

    pub fn from_matrix(source: &RankMetricCode, matrix: Matrix<MidElement>) -> Result<Self, CodeError> {
        let target_code = source.transform(&matrix)?;
        Ok(EquivalenceWitness {
            matrix,
            source: source.id(),
            target: target_code.id(),
            target_code,
        })
    }

    pub fn target_code(&self) -> &RankMetricCode {
        &self.target_code
    }

    /// `self` followed by `next`.
    pub fn compose(&self, next: &EquivalenceWitness) -> Result<Self, CodeError> {
        if self.target != next.source {
            return Err(CodeError::WitnessChain(self.target, next.source));
        }
        let tower = self.target_code.tower();
        Ok(EquivalenceWitness {
            matrix: self.matrix.matmul(tower.mid(), &next.matrix)?,
            source: self.source,
            target: next.target,
            target_code: next.target_code.clone(),
        })
    }

    pub fn inverse(&self, source: &RankMetricCode) -> Result<Self, CodeError> {
        if source.id() != self.source {
            return Err(CodeError::WitnessSource {
                expected: self.source,
                got: source.id(),
            });
        }
        let tower = source.tower();
        Ok(EquivalenceWitness {
            matrix: linalg::inverse(tower.mid(), &self.matrix)?,
            source: self.target,
            target: self.source,
            target_code: source.clone(),
        })
    }
}
