//! Test-side reference arithmetic, independent of the library's field code.
//!
//! Elements of `F_{q^m}` are packed from their `F_p` digits (innermost level
//! first) and the operation tables are built by schoolbook polynomial
//! multiplication modulo the tower's defining polynomials. Only the moduli and
//! the digit conversions are taken from the library.

#![allow(dead_code)]

use rankhull::field::{FieldTower, MidElement, TopElement};
use rankhull::linalg::Matrix;

pub type Rows = Vec<Vec<u32>>;

pub struct RefTower {
    pub p: u32,
    pub e: usize,
    pub m: usize,
    /// Base field order.
    pub q: u32,
    /// Extension field order.
    pub big: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let d = modulus.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for top in (d..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for (i, &mc) in modulus.iter().enumerate() {
            let idx = top - d + i;
            prod[idx] = (prod[idx] + (p - c) * mc % p) % p;
        }
    }
    prod.truncate(d);
    prod.resize(d, 0);
    prod
}

impl RefTower {
    pub fn new(tower: &FieldTower) -> Self {
        let (p, e, m) = (tower.p(), tower.e(), tower.m());
        let q = p.pow(e as u32);
        let big = q.pow(m as u32);
        assert!(big <= 1 << 10, "reference tables are limited to 1024 elements");
        let mid_mod = tower.mid_modulus().to_vec();
        assert_eq!(mid_mod.len(), e + 1);
        assert_eq!(mid_mod[e], 1, "base modulus must be monic");
        let top_mod: Vec<Vec<u32>> = tower.top_modulus().iter().map(|&c| tower.mid().coeffs(c)).collect();
        assert_eq!(top_mod.len(), m + 1);

        let digits = |x: u32| -> Vec<u32> {
            let mut x = x;
            (0..m * e)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let pack = |d: &[u32]| d.iter().rev().fold(0u32, |acc, &x| acc * p + x);

        let mid_mul = |a: &[u32], b: &[u32]| poly_mul_mod(a, b, &mid_mod, p);
        let mid_add = |a: &[u32], b: &[u32]| -> Vec<u32> { a.iter().zip(b).map(|(x, y)| (x + y) % p).collect() };
        let top_mul = |a: &[u32], b: &[u32]| -> Vec<u32> {
            let blocks = |x: &[u32]| -> Vec<Vec<u32>> { x.chunks(e).map(|c| c.to_vec()).collect() };
            let (ab, bb) = (blocks(a), blocks(b));
            let zero = vec![0u32; e];
            let mut prod = vec![zero.clone(); 2 * m - 1];
            for i in 0..m {
                for j in 0..m {
                    prod[i + j] = mid_add(&prod[i + j], &mid_mul(&ab[i], &bb[j]));
                }
            }
            assert_eq!(top_mod[m][0], 1, "extension modulus must be monic");
            assert!(top_mod[m][1..].iter().all(|&x| x == 0), "extension modulus must be monic");
            for t in (m..prod.len()).rev() {
                let c = prod[t].clone();
                if c.iter().all(|&x| x == 0) {
                    continue;
                }
                for (i, mc) in top_mod.iter().enumerate() {
                    let sub = mid_mul(&c, mc);
                    let neg: Vec<u32> = sub.iter().map(|&x| (p - x) % p).collect();
                    prod[t - m + i] = mid_add(&prod[t - m + i], &neg);
                }
            }
            prod.truncate(m);
            prod.concat()
        };

        let n = big as usize;
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        let mut neg = vec![0u32; n];
        for a in 0..big {
            let da = digits(a);
            neg[a as usize] = pack(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>());
            for b in 0..big {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * n + b as usize] = pack(&s);
                mul[a as usize * n + b as usize] = pack(&top_mul(&da, &db));
            }
        }
        let mut inv = vec![0u32; n];
        for a in 1..big {
            inv[a as usize] = (1..big)
                .find(|&b| mul[a as usize * n + b as usize] == 1)
                .expect("every nonzero element is invertible");
        }
        RefTower {
            p,
            e,
            m,
            q,
            big,
            add,
            mul,
            neg,
            inv,
        }
    }

    fn digits(&self, mut x: u32) -> Vec<u32> {
        (0..self.m * self.e)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    fn pack(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0u32, |acc, &x| acc * self.p + x)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.big + b) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.big + b) as usize]
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: u32, mut k: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Base-field elements are exactly the packed values below `q`.
    pub fn is_base(&self, a: u32) -> bool {
        a < self.q
    }

    /// `Σ_{i<m} a^{q^i}`.
    pub fn trace(&self, a: u32) -> u32 {
        let mut sum = 0;
        let mut conj = a;
        for _ in 0..self.m {
            sum = self.add(sum, conj);
            conj = self.pow(conj, self.q as u64);
        }
        sum
    }

    /// Coordinates over `F_q` in the power basis.
    pub fn coords(&self, a: u32) -> Vec<u32> {
        self.digits(a).chunks(self.e).map(|c| self.pack(c)).collect()
    }

    pub fn from_top(&self, tower: &FieldTower, x: TopElement) -> u32 {
        self.pack(&tower.top_digits(x).concat())
    }

    pub fn from_mid(&self, tower: &FieldTower, x: MidElement) -> u32 {
        self.pack(&tower.mid().coeffs(x))
    }

    pub fn to_top(&self, tower: &FieldTower, a: u32) -> TopElement {
        let d = self.digits(a);
        let blocks: Vec<Vec<u32>> = d.chunks(self.e).map(|c| c.to_vec()).collect();
        tower.top_from_digits(&blocks).expect("digits in range")
    }

    pub fn top_rows(&self, tower: &FieldTower, m: &Matrix<TopElement>) -> Rows {
        m.to_rows().into_iter().map(|r| r.into_iter().map(|x| self.from_top(tower, x)).collect()).collect()
    }

    pub fn mid_rows(&self, tower: &FieldTower, m: &Matrix<MidElement>) -> Rows {
        m.to_rows().into_iter().map(|r| r.into_iter().map(|x| self.from_mid(tower, x)).collect()).collect()
    }

    pub fn dot(&self, a: &[u32], b: &[u32]) -> u32 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    pub fn matmul(&self, a: &Rows, b: &Rows) -> Rows {
        let cols = b.first().map_or(0, |r| r.len());
        a.iter()
            .map(|row| {
                (0..cols)
                    .map(|j| row.iter().zip(b).fold(0, |acc, (&x, br)| self.add(acc, self.mul(x, br[j]))))
                    .collect()
            })
            .collect()
    }

    pub fn gram(&self, a: &Rows) -> Rows {
        a.iter().map(|r| a.iter().map(|s| self.dot(r, s)).collect()).collect()
    }

    pub fn identity(&self, n: usize) -> Rows {
        (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect()
    }

    /// Row echelon form by plain Gaussian elimination; returns the rank.
    pub fn rank(&self, a: &Rows) -> usize {
        let mut a = a.clone();
        let cols = a.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else {
                continue;
            };
            a.swap(r, piv);
            let inv = self.inv(a[r][c]).unwrap();
            for i in r + 1..a.len() {
                if a[i][c] != 0 {
                    let f = self.mul(a[i][c], inv);
                    for j in c..cols {
                        a[i][j] = self.sub(a[i][j], self.mul(f, a[r][j]));
                    }
                }
            }
            r += 1;
        }
        r
    }

    pub fn det(&self, a: &Rows) -> u32 {
        let mut a = a.clone();
        let n = a.len();
        let mut det = 1;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| a[i][c] != 0) else {
                return 0;
            };
            if piv != c {
                a.swap(c, piv);
                det = self.neg(det);
            }
            det = self.mul(det, a[c][c]);
            let inv = self.inv(a[c][c]).unwrap();
            for i in c + 1..n {
                let f = self.mul(a[i][c], inv);
                for j in c..n {
                    a[i][j] = self.sub(a[i][j], self.mul(f, a[c][j]));
                }
            }
        }
        det
    }

    /// Inverse by cofactor-free Gauss–Jordan on `[A | I]`.
    pub fn inverse(&self, a: &Rows) -> Option<Rows> {
        let n = a.len();
        let mut aug: Rows = a
            .iter()
            .zip(self.identity(n))
            .map(|(r, i)| r.iter().copied().chain(i).collect())
            .collect();
        for c in 0..n {
            let piv = (c..n).find(|&i| aug[i][c] != 0)?;
            aug.swap(c, piv);
            let inv = self.inv(aug[c][c]).unwrap();
            for x in aug[c].iter_mut() {
                *x = self.mul(*x, inv);
            }
            for i in 0..n {
                if i != c && aug[i][c] != 0 {
                    let f = aug[i][c];
                    for j in 0..2 * n {
                        aug[i][j] = self.sub(aug[i][j], self.mul(f, aug[c][j]));
                    }
                }
            }
        }
        Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    pub fn transpose(&self, a: &Rows) -> Rows {
        let cols = a.first().map_or(0, |r| r.len());
        (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
    }

    /// Whether two generator matrices span the same row space.
    pub fn same_span(&self, a: &Rows, b: &Rows) -> bool {
        let ra = self.rank(a);
        let joint: Rows = a.iter().chain(b).cloned().collect();
        ra == self.rank(b) && ra == self.rank(&joint)
    }

    /// `k − rank(G Gᵀ)`.
    pub fn hull_dim(&self, g: &Rows) -> usize {
        g.len() - self.rank(&self.gram(g))
    }

    /// Calls `f` on every codeword `u G`, `u ∈ F_{q^m}^k`.
    pub fn for_each_codeword(&self, g: &Rows, mut f: impl FnMut(&[u32])) {
        let k = g.len();
        let n = g.first().map_or(0, |r| r.len());
        let mut msg = vec![0u32; k];
        let mut word = vec![0u32; n];
        loop {
            word.iter_mut().for_each(|w| *w = 0);
            for (u, row) in msg.iter().zip(g) {
                if *u != 0 {
                    for (w, &x) in word.iter_mut().zip(row) {
                        *w = self.add(*w, self.mul(*u, x));
                    }
                }
            }
            f(&word);
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                msg[i] += 1;
                if msg[i] < self.big {
                    break;
                }
                msg[i] = 0;
                i += 1;
            }
        }
    }

    /// Number of codewords, if at most `limit`.
    pub fn code_size(&self, k: usize, limit: u64) -> Option<u64> {
        (self.big as u64).checked_pow(k as u32).filter(|&s| s <= limit)
    }

    /// Codewords orthogonal to every generator row, counted by brute force.
    pub fn hull_size_by_enumeration(&self, g: &Rows) -> u64 {
        let mut count = 0;
        self.for_each_codeword(g, |w| {
            if g.iter().all(|r| self.dot(w, r) == 0) {
                count += 1;
            }
        });
        count
    }

    /// Rank over `F_q` of the `n × m` coordinate matrix of `v`.
    pub fn rank_weight(&self, v: &[u32]) -> usize {
        let rows: Rows = v.iter().map(|&x| self.coords(x)).collect();
        self.rank(&rows)
    }

    /// Sorted rank weights of all codewords.
    pub fn rank_weights(&self, g: &Rows) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_codeword(g, |w| out.push(self.rank_weight(w)));
        out.sort_unstable();
        out
    }
}
