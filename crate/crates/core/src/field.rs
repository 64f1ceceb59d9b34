//! Two-level extension towers `F_p ⊂ F_q ⊂ F_{q^m}`.
//!
//! Elements at both levels are stored as packed base-`p` digit strings:
//! a [`MidElement`] holds the `e` coefficients of its power-basis expansion
//! over `F_p`, and a [`TopElement`] holds `m` such blocks, innermost level
//! first. The packed value doubles as the deterministic enumeration index
//! of the field, so `0` is zero and `1` is one at every level, and the
//! inclusion `F_q ⊂ F_{q^m}` is the identity on indices below `q`.
//!
//! Arithmetic works on dense coefficient vectors. Small fields additionally
//! cache multiplication tables; the tables are filled from the same
//! coefficient routines and never change results.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Largest supported top-field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Fields at or below this order get cached operation tables.
const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1 (got e={e}, m={m})")]
    ZeroDegree { e: usize, m: usize },
    #[error("field of order {p}^{degree} exceeds the supported size {MAX_FIELD_ORDER}")]
    TooLarge { p: u32, degree: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("digit {digit} is out of range for characteristic {p}")]
    DigitOutOfRange { digit: u32, p: u32 },
    #[error("trace value {0:?} does not lie in the base field")]
    TraceOutsideBase(TopElement),
    #[error("no irreducible polynomial of degree {0} found")]
    NoIrreducible(usize),
}

/// Arithmetic over a finite field whose elements are plain `Copy` values.
///
/// Every element has an enumeration index in `0..order()`; index 0 is zero
/// and index 1 is one.
pub trait Field {
    type Elem: Copy + Eq + Ord + Hash + fmt::Debug;

    fn order(&self) -> u32;
    fn characteristic(&self) -> u32;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;
    fn element(&self, index: u32) -> Self::Elem;
    fn index(&self, a: Self::Elem) -> u32;

    fn zero(&self) -> Self::Elem {
        self.element(0)
    }

    fn one(&self) -> Self::Elem {
        self.element(1)
    }

    fn is_zero(&self, a: Self::Elem) -> bool {
        self.index(a) == 0
    }

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Result<Self::Elem, FieldError> {
        let inv = self.inv(b).ok_or(FieldError::DivisionByZero)?;
        Ok(self.mul(a, inv))
    }

    fn pow(&self, a: Self::Elem, mut exp: u64) -> Self::Elem {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// The image of an integer under `Z -> F`.
    fn from_int(&self, n: u64) -> Self::Elem {
        let p = self.characteristic() as u64;
        self.element((n % p) as u32)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        self.element(rng.gen_range(0..self.order()))
    }

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        self.element(rng.gen_range(1..self.order()))
    }
}

/// An element of the middle field `F_q`, packed as base-`p` digits.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MidElement(u32);

/// An element of the top field `F_{q^m}`, packed as `m` blocks of `e` base-`p` digits.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TopElement(u32);

impl MidElement {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl TopElement {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for MidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

impl fmt::Debug for TopElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// `Z/pZ` with elements as plain integers. Used to search for the middle modulus.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PrimeField {
    p: u32,
}

impl Field for PrimeField {
    type Elem = u32;

    fn order(&self) -> u32 {
        self.p
    }
    fn characteristic(&self) -> u32 {
        self.p
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }
    fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }
    fn element(&self, index: u32) -> u32 {
        debug_assert!(index < self.p);
        index
    }
    fn index(&self, a: u32) -> u32 {
        a
    }
}

/// The middle field `F_q = F_p[y] / (mid_modulus)`.
#[derive(Debug, Clone)]
pub struct MidField {
    p: u32,
    e: usize,
    q: u32,
    /// Monic, low degree first, length `e + 1`.
    modulus: Vec<u32>,
    mul_table: Option<Vec<u32>>,
    inv_table: Vec<u32>,
}

impl MidField {
    fn new(p: u32, e: usize, modulus: Vec<u32>) -> Self {
        let q = p.pow(e as u32);
        let mut field = MidField {
            p,
            e,
            q,
            modulus,
            mul_table: None,
            inv_table: Vec::new(),
        };
        if q <= TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.mul_raw(a, b);
                }
            }
            field.mul_table = Some(table);
        }
        let mut inv = vec![0u32; q as usize];
        if q <= 1 << 16 {
            for a in 1..q {
                inv[a as usize] = field.pow(MidElement(a), q as u64 - 2).0;
            }
            field.inv_table = inv;
        }
        field
    }

    pub fn degree(&self) -> usize {
        self.e
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn digits(&self, mut a: u32) -> [u32; 32] {
        let mut out = [0u32; 32];
        for d in out.iter_mut().take(self.e) {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn pack(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    /// Digits of `a` over `F_p`, low degree first.
    pub fn coeffs(&self, a: MidElement) -> Vec<u32> {
        self.digits(a.0)[..self.e].to_vec()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<MidElement, FieldError> {
        if coeffs.len() != self.e {
            return Err(FieldError::BadLength {
                expected: self.e,
                got: coeffs.len(),
            });
        }
        if let Some(&digit) = coeffs.iter().find(|&&d| d >= self.p) {
            return Err(FieldError::DigitOutOfRange { digit, p: self.p });
        }
        Ok(MidElement(self.pack(coeffs)))
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let e = self.e;
        let p = self.p as u64;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = [0u64; 64];
        for i in 0..e {
            if da[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for deg in (e..2 * e - 1).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for i in 0..e {
                let sub = c * self.modulus[i] as u64 % p;
                prod[deg - e + i] = (prod[deg - e + i] + p - sub) % p;
            }
        }
        let digits: Vec<u32> = prod[..e].iter().map(|&x| x as u32).collect();
        self.pack(&digits)
    }
}

impl Field for MidField {
    type Elem = MidElement;

    fn order(&self) -> u32 {
        self.q
    }

    fn characteristic(&self) -> u32 {
        self.p
    }

    fn add(&self, a: MidElement, b: MidElement) -> MidElement {
        if self.p == 2 {
            return MidElement(a.0 ^ b.0);
        }
        let da = self.digits(a.0);
        let db = self.digits(b.0);
        let mut out = [0u32; 32];
        for i in 0..self.e {
            out[i] = (da[i] + db[i]) % self.p;
        }
        MidElement(self.pack(&out[..self.e]))
    }

    fn neg(&self, a: MidElement) -> MidElement {
        if self.p == 2 {
            return a;
        }
        let da = self.digits(a.0);
        let mut out = [0u32; 32];
        for i in 0..self.e {
            out[i] = (self.p - da[i]) % self.p;
        }
        MidElement(self.pack(&out[..self.e]))
    }

    fn mul(&self, a: MidElement, b: MidElement) -> MidElement {
        match &self.mul_table {
            Some(t) => MidElement(t[(a.0 * self.q + b.0) as usize]),
            None => MidElement(self.mul_raw(a.0, b.0)),
        }
    }

    fn inv(&self, a: MidElement) -> Option<MidElement> {
        if a.0 == 0 {
            return None;
        }
        if !self.inv_table.is_empty() {
            return Some(MidElement(self.inv_table[a.0 as usize]));
        }
        Some(self.pow(a, self.q as u64 - 2))
    }

    fn element(&self, index: u32) -> MidElement {
        debug_assert!(index < self.q);
        MidElement(index)
    }

    fn index(&self, a: MidElement) -> u32 {
        a.0
    }
}

/// The top field `F_{q^m} = F_q[x] / (top_modulus)`.
#[derive(Debug, Clone)]
pub struct TopField {
    mid: MidField,
    m: usize,
    order: u32,
    /// Monic, low degree first, length `m + 1`.
    modulus: Vec<MidElement>,
    mul_table: Option<Vec<u32>>,
    inv_table: Option<Vec<u32>>,
}

impl TopField {
    fn new(mid: MidField, m: usize, modulus: Vec<MidElement>) -> Self {
        let order = mid.q.pow(m as u32);
        let mut field = TopField {
            mid,
            m,
            order,
            modulus,
            mul_table: None,
            inv_table: None,
        };
        if order <= TABLE_LIMIT {
            let mut table = vec![0u32; (order * order) as usize];
            for a in 0..order {
                for b in 0..order {
                    table[(a * order + b) as usize] = field.mul_raw(a, b);
                }
            }
            field.mul_table = Some(table);
            let mut inv = vec![0u32; order as usize];
            for a in 1..order {
                inv[a as usize] = field.pow(TopElement(a), order as u64 - 2).0;
            }
            field.inv_table = Some(inv);
        }
        field
    }

    pub fn mid(&self) -> &MidField {
        &self.mid
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[MidElement] {
        &self.modulus
    }

    fn blocks(&self, mut a: u32) -> [u32; 32] {
        let mut out = [0u32; 32];
        for b in out.iter_mut().take(self.m) {
            *b = a % self.mid.q;
            a /= self.mid.q;
        }
        out
    }

    fn pack(&self, blocks: &[u32]) -> u32 {
        blocks.iter().rev().fold(0, |acc, &d| acc * self.mid.q + d)
    }

    /// Coordinates over `F_q` in the power basis, low degree first.
    pub fn coeffs(&self, a: TopElement) -> Vec<MidElement> {
        self.blocks(a.0)[..self.m]
            .iter()
            .map(|&c| MidElement(c))
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[MidElement]) -> Result<TopElement, FieldError> {
        if coeffs.len() != self.m {
            return Err(FieldError::BadLength {
                expected: self.m,
                got: coeffs.len(),
            });
        }
        let raw: Vec<u32> = coeffs.iter().map(|c| c.0).collect();
        Ok(TopElement(self.pack(&raw)))
    }

    /// The power basis `1, x, …, x^{m-1}`.
    pub fn power_basis(&self) -> Vec<TopElement> {
        (0..self.m)
            .map(|i| TopElement(self.mid.q.pow(i as u32)))
            .collect()
    }

    pub fn lift(&self, a: MidElement) -> TopElement {
        TopElement(a.0)
    }

    /// The base-field value of `a`, if it has one.
    pub fn project(&self, a: TopElement) -> Option<MidElement> {
        (a.0 < self.mid.q).then_some(MidElement(a.0))
    }

    /// Scalar multiplication by a base-field element.
    pub fn scale(&self, c: MidElement, a: TopElement) -> TopElement {
        self.mul(self.lift(c), a)
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let m = self.m;
        let mid = &self.mid;
        let da = self.blocks(a);
        let db = self.blocks(b);
        let mut prod = [MidElement(0); 64];
        for i in 0..m {
            if da[i] == 0 {
                continue;
            }
            for j in 0..m {
                let t = mid.mul(MidElement(da[i]), MidElement(db[j]));
                prod[i + j] = mid.add(prod[i + j], t);
            }
        }
        for deg in (m..2 * m - 1).rev() {
            let c = prod[deg];
            if c.0 == 0 {
                continue;
            }
            prod[deg] = MidElement(0);
            for i in 0..m {
                let t = mid.mul(c, self.modulus[i]);
                prod[deg - m + i] = mid.sub(prod[deg - m + i], t);
            }
        }
        let raw: Vec<u32> = prod[..m].iter().map(|c| c.0).collect();
        self.pack(&raw)
    }
}

impl Field for TopField {
    type Elem = TopElement;

    fn order(&self) -> u32 {
        self.order
    }

    fn characteristic(&self) -> u32 {
        self.mid.p
    }

    fn add(&self, a: TopElement, b: TopElement) -> TopElement {
        if self.mid.p == 2 {
            return TopElement(a.0 ^ b.0);
        }
        let da = self.blocks(a.0);
        let db = self.blocks(b.0);
        let mut out = [0u32; 32];
        for i in 0..self.m {
            out[i] = self.mid.add(MidElement(da[i]), MidElement(db[i])).0;
        }
        TopElement(self.pack(&out[..self.m]))
    }

    fn neg(&self, a: TopElement) -> TopElement {
        if self.mid.p == 2 {
            return a;
        }
        let da = self.blocks(a.0);
        let mut out = [0u32; 32];
        for i in 0..self.m {
            out[i] = self.mid.neg(MidElement(da[i])).0;
        }
        TopElement(self.pack(&out[..self.m]))
    }

    fn mul(&self, a: TopElement, b: TopElement) -> TopElement {
        match &self.mul_table {
            Some(t) => TopElement(t[(a.0 * self.order + b.0) as usize]),
            None => TopElement(self.mul_raw(a.0, b.0)),
        }
    }

    fn inv(&self, a: TopElement) -> Option<TopElement> {
        if a.0 == 0 {
            return None;
        }
        match &self.inv_table {
            Some(t) => Some(TopElement(t[a.0 as usize])),
            None => Some(self.pow(a, self.order as u64 - 2)),
        }
    }

    fn element(&self, index: u32) -> TopElement {
        debug_assert!(index < self.order);
        TopElement(index)
    }

    fn index(&self, a: TopElement) -> u32 {
        a.0
    }
}

/// The tower `F_p ⊂ F_q ⊂ F_{q^m}` with `q = p^e`. Cheap to clone.
#[derive(Clone)]
pub struct FieldTower {
    inner: Arc<TopField>,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTower")
            .field("p", &self.p())
            .field("e", &self.e())
            .field("m", &self.m())
            .field("mid_modulus", &self.mid_modulus())
            .field("top_modulus", &self.top_modulus())
            .finish()
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.p() == other.p()
                && self.e() == other.e()
                && self.m() == other.m()
                && self.mid_modulus() == other.mid_modulus()
                && self.top_modulus() == other.top_modulus())
    }
}

impl Eq for FieldTower {}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldTower {
    /// Builds the tower for `F_{p^e}` and its degree-`m` extension.
    ///
    /// Both moduli are the lexicographically smallest monic irreducible
    /// polynomials with nonzero constant term, comparing coefficient tuples
    /// low degree first.
    pub fn new(p: u32, e: usize, m: usize) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 || m == 0 {
            return Err(FieldError::ZeroDegree { e, m });
        }
        let degree = e * m;
        let order = (p as u64).checked_pow(degree as u32);
        if order.is_none_or(|o| o > MAX_FIELD_ORDER) {
            return Err(FieldError::TooLarge { p, degree });
        }
        let prime = PrimeField { p };
        let mid_modulus = smallest_irreducible(&prime, e)?;
        let mid = MidField::new(p, e, mid_modulus);
        let top_modulus = smallest_irreducible(&mid, m)?;
        Ok(FieldTower {
            inner: Arc::new(TopField::new(mid, m, top_modulus)),
        })
    }

    pub fn p(&self) -> u32 {
        self.inner.mid.p
    }

    pub fn e(&self) -> usize {
        self.inner.mid.e
    }

    pub fn m(&self) -> usize {
        self.inner.m
    }

    /// Order of the middle field.
    pub fn q(&self) -> u32 {
        self.inner.mid.q
    }

    pub fn mid(&self) -> &MidField {
        &self.inner.mid
    }

    pub fn top(&self) -> &TopField {
        &self.inner
    }

    pub fn mid_modulus(&self) -> &[u32] {
        &self.inner.mid.modulus
    }

    pub fn top_modulus(&self) -> &[MidElement] {
        &self.inner.modulus
    }

    pub fn lift(&self, a: MidElement) -> TopElement {
        self.inner.lift(a)
    }

    pub fn project(&self, a: TopElement) -> Option<MidElement> {
        self.inner.project(a)
    }

    /// `x^(q^i)`.
    pub fn frobenius(&self, x: TopElement, i: usize) -> TopElement {
        let top = self.top();
        let q = self.q() as u64;
        (0..i).fold(x, |acc, _| top.pow(acc, q))
    }

    /// Relative trace `F_{q^m} -> F_q`.
    pub fn trace(&self, x: TopElement) -> Result<MidElement, FieldError> {
        let top = self.top();
        let q = self.q() as u64;
        let mut sum = top.zero();
        let mut conj = x;
        for _ in 0..self.m() {
            sum = top.add(sum, conj);
            conj = top.pow(conj, q);
        }
        self.project(sum).ok_or(FieldError::TraceOutsideBase(sum))
    }

    /// All digits of `x` over `F_p`, innermost level first.
    pub fn top_digits(&self, x: TopElement) -> Vec<Vec<u32>> {
        self.top()
            .coeffs(x)
            .into_iter()
            .map(|c| self.mid().coeffs(c))
            .collect()
    }

    pub fn top_from_digits(&self, digits: &[Vec<u32>]) -> Result<TopElement, FieldError> {
        let coeffs = digits
            .iter()
            .map(|d| self.mid().from_coeffs(d))
            .collect::<Result<Vec<_>, _>>()?;
        self.top().from_coeffs(&coeffs)
    }
}

/// Remainder of `a` modulo the monic polynomial `b` (both low degree first).
fn poly_rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if !f.is_zero(lead) {
            for (i, &c) in b.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(lead, c));
            }
        }
        r.pop();
    }
    r
}

/// Monic polynomial of the given degree at position `index` of the
/// lexicographic order (constant term most significant).
fn monic_at<F: Field>(f: &F, degree: usize, mut index: u64) -> Vec<F::Elem> {
    let q = f.order() as u64;
    let mut coeffs = vec![f.zero(); degree + 1];
    for i in (0..degree).rev() {
        coeffs[i] = f.element((index % q) as u32);
        index /= q;
    }
    coeffs[degree] = f.one();
    coeffs
}

pub(crate) fn is_irreducible<F: Field>(f: &F, poly: &[F::Elem]) -> bool {
    let degree = poly.len() - 1;
    if degree <= 1 {
        return degree == 1;
    }
    let q = f.order() as u64;
    for d in 1..=degree / 2 {
        for idx in 0..q.pow(d as u32) {
            let divisor = monic_at(f, d, idx);
            if poly_rem(f, poly, &divisor).iter().all(|&c| f.is_zero(c)) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible<F: Field>(f: &F, degree: usize) -> Result<Vec<F::Elem>, FieldError> {
    let q = f.order() as u64;
    let total = q.pow(degree as u32);
    // Constant term zero means x divides the polynomial; skip that block.
    let first = total / q;
    (first..total)
        .map(|idx| monic_at(f, degree, idx))
        .find(|poly| is_irreducible(f, poly))
        .ok_or(FieldError::NoIrreducible(degree))
}
