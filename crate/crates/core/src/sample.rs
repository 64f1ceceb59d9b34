//! Seeded random instances: codes, invertible matrices and bases.
//!
//! Every random stream is a ChaCha8 generator. Independent trials use
//! [`trial_rng`], which selects a separate stream of the same seed so that
//! results do not depend on scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assoc::ExtensionBasis;
use crate::code::RankMetricCode;
use crate::field::{Field, FieldTower, MidElement, TopElement};
use crate::linalg::{self, Matrix, RowSpace};

/// Name of the generator recorded in reports.
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha 0.3), stream = trial index";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

pub fn random_matrix<F: Field, R: Rng + ?Sized>(f: &F, rows: usize, cols: usize, rng: &mut R) -> Matrix<F::Elem> {
    let data = (0..rows * cols).map(|_| f.random(rng)).collect();
    Matrix::new(rows, cols, data)
}

/// Uniform element of `GL_n` by rejection.
pub fn random_invertible<F: Field, R: Rng + ?Sized>(f: &F, n: usize, rng: &mut R) -> Matrix<F::Elem> {
    loop {
        let m = random_matrix(f, n, n, rng);
        if linalg::rank(f, &m) == n {
            return m;
        }
    }
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    perm
}

/// A uniformly random `[n, k]` code (full-rank generator by rejection).
pub fn random_code<R: Rng + ?Sized>(tower: &FieldTower, n: usize, k: usize, rng: &mut R) -> RankMetricCode {
    assert!(k <= n, "k = {k} exceeds n = {n}");
    let top = tower.top();
    loop {
        let g = random_matrix(top, k, n, rng);
        if linalg::rank(top, &g) == k {
            return RankMetricCode::new(tower, &g).expect("nonzero generator of full rank");
        }
    }
}

fn random_in<R: Rng + ?Sized>(tower: &FieldTower, space: &RowSpace<TopElement>, rng: &mut R) -> Vec<TopElement> {
    let top = tower.top();
    let coeffs: Vec<TopElement> = (0..space.dim()).map(|_| top.random(rng)).collect();
    linalg::vec_mat(top, &coeffs, space.basis())
}

/// A random `[n, k]` code whose hull has dimension exactly `h`.
///
/// The generator is `[A; B]` with `A` spanning a self-orthogonal space and
/// `B ⊆ A^⊥` with `B Bᵀ` invertible, followed by a random column
/// permutation. Returns `None` when `2h > n`, `k + h > n`, `h > k`, or the
/// rejection budget runs out.
pub fn random_code_with_hull<R: Rng + ?Sized>(
    tower: &FieldTower,
    n: usize,
    k: usize,
    h: usize,
    rng: &mut R,
) -> Option<RankMetricCode> {
    if h > k || 2 * h > n || k + h > n {
        return None;
    }
    // In characteristic 2 a self-orthogonal A containing the all-ones vector
    // forces b·b = 0 on all of A^⊥, so a stuck search restarts from a new A.
    // Some targets are impossible (no self-dual [6, 3] code over F_27), so
    // the budgets stay modest.
    (0..16).find_map(|_| try_code_with_hull(tower, n, k, h, rng))
}

fn try_code_with_hull<R: Rng + ?Sized>(
    tower: &FieldTower,
    n: usize,
    k: usize,
    h: usize,
    rng: &mut R,
) -> Option<RankMetricCode> {
    let top = tower.top();
    // A random vector is isotropic with probability about 1/|F_{q^m}|.
    let budget = 32 * top.order() as usize * h.max(1);
    let mut a_rows: Vec<Vec<TopElement>> = Vec::with_capacity(h);
    let mut span = RowSpace::zero(n);
    let mut tries = 0;
    while a_rows.len() < h {
        tries += 1;
        if tries > budget {
            return None;
        }
        let v = random_in(tower, &span.orthogonal(top), rng);
        if !top.is_zero(linalg::dot(top, &v, &v)) || span.contains(top, &v) {
            continue;
        }
        a_rows.push(v);
        span = RowSpace::from_generators(top, &Matrix::from_rows(n, &a_rows).ok()?);
    }
    let perp = span.orthogonal(top);
    for _ in 0..200 {
        let b_rows: Vec<Vec<TopElement>> = (0..k - h).map(|_| random_in(tower, &perp, rng)).collect();
        let b = Matrix::from_rows(n, &b_rows).ok()?;
        if linalg::rank(top, &b.gram(top)) != k - h {
            continue;
        }
        let mut rows = a_rows.clone();
        rows.extend(b_rows);
        let g = Matrix::from_rows(n, &rows).ok()?;
        if linalg::rank(top, &g) != k {
            continue;
        }
        let code = RankMetricCode::new(tower, &g).ok()?;
        let code = code.permute_columns(&random_permutation(n, rng)).ok()?;
        debug_assert_eq!(code.hull_dim(), h);
        return Some(code);
    }
    None
}

/// A random basis of `F_{q^m}/F_q`: the power basis under a random change of basis.
pub fn random_basis<R: Rng + ?Sized>(tower: &FieldTower, rng: &mut R) -> ExtensionBasis {
    let mid = tower.mid();
    let top = tower.top();
    let t = random_invertible(mid, tower.m(), rng);
    let power = top.power_basis();
    let gammas = (0..tower.m())
        .map(|i| {
            t.row(i).iter().zip(&power).fold(top.zero(), |acc, (&c, &g)| {
                top.add(acc, top.mul(tower.lift(c), g))
            })
        })
        .collect();
    ExtensionBasis::new(tower, gammas).expect("invertible change of basis")
}

pub fn random_witness<R: Rng + ?Sized>(tower: &FieldTower, n: usize, rng: &mut R) -> Matrix<MidElement> {
    random_invertible(tower.mid(), n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prescribed_hulls() {
        let mut r = rng(3);
        for &(p, e, m) in &[(2, 1, 2), (3, 1, 2), (2, 2, 1), (5, 1, 1)] {
            let t = FieldTower::new(p, e, m).unwrap();
            for h in 0..=2 {
                let c = random_code_with_hull(&t, 6, 3, h, &mut r).unwrap_or_else(|| panic!("{p} {e} {m} {h}"));
                assert_eq!((c.k(), c.hull_dim(), c.hull_dim_oracle()), (3, h, h));
            }
            assert!(random_code_with_hull(&t, 4, 3, 2, &mut r).is_none());
        }
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: u64 = trial_rng(5, 1).gen();
        let b: u64 = trial_rng(5, 1).gen();
        let c: u64 = trial_rng(5, 2).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn permutations() {
        let mut r = rng(0);
        let mut p = random_permutation(7, &mut r);
        p.sort_unstable();
        assert_eq!(p, (0..7).collect::<Vec<_>>());
    }
}
