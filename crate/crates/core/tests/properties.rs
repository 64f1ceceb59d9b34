//! Property tests of the library against the reference arithmetic in `common`.

mod common;

use proptest::prelude::*;
use rand::Rng;

use common::{RefTower, Rows};
use rankhull::assoc::{self, MatrixCode};
use rankhull::cli::verify;
use rankhull::code::RankMetricCode;
use rankhull::field::{Field, FieldTower};
use rankhull::json::{self, CodeDoc};
use rankhull::linalg::{self, Matrix, RowSpace};
use rankhull::sample;
use rankhull::variation::{self, QRegime};

/// `(p, e, m)` with at most 1024 extension elements.
const TOWERS: &[(u32, usize, usize)] = &[
    (2, 1, 1),
    (2, 1, 2),
    (2, 1, 3),
    (2, 1, 4),
    (3, 1, 1),
    (3, 1, 2),
    (3, 1, 3),
    (2, 2, 1),
    (2, 2, 2),
    (2, 2, 3),
    (5, 1, 1),
    (5, 1, 2),
    (5, 1, 3),
    (7, 1, 2),
    (2, 3, 2),
    (3, 2, 2),
];

fn tower(i: usize) -> (FieldTower, RefTower) {
    let (p, e, m) = TOWERS[i];
    let t = FieldTower::new(p, e, m).unwrap();
    let rt = RefTower::new(&t);
    (t, rt)
}

fn small_tower() -> impl Strategy<Value = usize> {
    0..TOWERS.len()
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), 1..n))
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn arithmetic_matches_polynomial_reference(ti in small_tower(), a in any::<u32>(), b in any::<u32>()) {
        let (t, rt) = tower(ti);
        let top = t.top();
        let (a, b) = (top.element(a % rt.big), top.element(b % rt.big));
        let (ra, rb) = (rt.from_top(&t, a), rt.from_top(&t, b));
        prop_assert_eq!(rt.from_top(&t, top.add(a, b)), rt.add(ra, rb));
        prop_assert_eq!(rt.from_top(&t, top.mul(a, b)), rt.mul(ra, rb));
        prop_assert_eq!(rt.from_top(&t, top.neg(a)), rt.neg(ra));
        match top.inv(a) {
            Some(inv) => prop_assert_eq!(top.mul(a, inv), top.one()),
            None => prop_assert!(top.is_zero(a)),
        }
        if !top.is_zero(b) {
            let q = top.div(a, b).unwrap();
            prop_assert_eq!(top.mul(q, b), a);
        }
    }

    #[test]
    fn frobenius_and_trace(ti in small_tower(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let (t, rt) = tower(ti);
        let (top, mid) = (t.top(), t.mid());
        let (a, b) = (top.element(a % rt.big), top.element(b % rt.big));
        let c = mid.element(c % rt.q);
        prop_assert_eq!(t.frobenius(a, t.m()), a);
        prop_assert_eq!(t.frobenius(a, 1), top.pow(a, t.q() as u64));
        let ta = t.trace(a).unwrap();
        prop_assert_eq!(rt.from_mid(&t, ta), rt.trace(rt.from_top(&t, a)));
        let lin = t.trace(top.add(top.mul(t.lift(c), a), b)).unwrap();
        prop_assert_eq!(lin, mid.add(mid.mul(c, ta), t.trace(b).unwrap()));
    }

    #[test]
    fn rref_invariants(ti in small_tower(), seed in any::<u64>(), rows in 1usize..6, cols in 1usize..7) {
        let (t, rt) = tower(ti);
        let top = t.top();
        let mut rng = sample::rng(seed);
        let m = sample::random_matrix(top, rows, cols, &mut rng);
        let r = linalg::rref(top, &m);
        prop_assert_eq!(&linalg::rref(top, &r.reduced).reduced, &r.reduced);
        prop_assert_eq!(&r.transform.matmul(top, &m).unwrap(), &r.reduced);
        prop_assert_eq!(linalg::rank(top, &r.transform), rows);
        let reference = rt.rank(&rt.top_rows(&t, &m));
        prop_assert_eq!(r.rank(), reference);
        prop_assert_eq!(linalg::rank(top, &m.transpose()), reference);
        for (i, &c) in r.pivots.iter().enumerate() {
            prop_assert_eq!(r.reduced[(i, c)], top.one());
            for j in 0..rows {
                if j != i {
                    prop_assert!(top.is_zero(r.reduced[(j, c)]));
                }
            }
        }
    }

    #[test]
    fn subspace_identities(ti in 0usize..9, seed in any::<u64>(), n in 1usize..=8) {
        let (t, rt) = tower(ti);
        let top = t.top();
        let mut rng = sample::rng(seed);
        let u = RowSpace::from_generators(top, &sample::random_matrix(top, rng.gen_range(1..=n), n, &mut rng));
        let v = RowSpace::from_generators(top, &sample::random_matrix(top, rng.gen_range(1..=n), n, &mut rng));
        let sum = u.sum(top, &v).unwrap();
        let cap = u.intersect(top, &v).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), u.dim() + v.dim());
        let joint: Rows = rt.top_rows(&t, u.basis()).into_iter().chain(rt.top_rows(&t, v.basis())).collect();
        prop_assert_eq!(sum.dim(), rt.rank(&joint));
        prop_assert!(u.contains_space(top, &cap) && v.contains_space(top, &cap));
        let perp = u.orthogonal(top);
        prop_assert_eq!(perp.dim() + u.dim(), n);
        for x in rt.top_rows(&t, perp.basis()) {
            for y in rt.top_rows(&t, u.basis()) {
                prop_assert_eq!(rt.dot(&x, &y), 0);
            }
        }
        let full = RowSpace::full(top, n);
        let completed = linalg::complete_basis(top, &cap, &full).unwrap();
        prop_assert_eq!(linalg::rank(top, &completed), n);
        let head = completed.submatrix(0, cap.dim(), 0, n);
        prop_assert_eq!(&RowSpace::from_generators(top, &head), &cap);
    }

    #[test]
    fn hull_dimension_agrees_with_references(ti in small_tower(), seed in any::<u64>(), (n, k) in shape()) {
        let (t, rt) = tower(ti);
        let mut rng = sample::rng(seed);
        let code = verify::varied_code(&t, n, k, &mut rng);
        let g = rt.top_rows(&t, code.generator());
        let h = code.hull_dim();
        prop_assert_eq!(h, code.hull_dim_oracle());
        prop_assert_eq!(h, rt.hull_dim(&g));
        prop_assert!(h <= k.min(n - k));
        if rt.code_size(k, 1 << 12).is_some() {
            prop_assert_eq!(rt.hull_size_by_enumeration(&g), (rt.big as u64).pow(h as u32));
            prop_assert_eq!(code.hull_count_by_enumeration(1 << 12), Some((rt.big as u64).pow(h as u32)));
        }
        let dual = code.dual();
        prop_assert_eq!(dual.k(), n - k);
        prop_assert_eq!(&dual.dual(), &code);
        prop_assert_eq!(dual.hull_dim(), h);
        for x in rt.top_rows(&t, dual.generator()) {
            for y in &g {
                prop_assert_eq!(rt.dot(&x, y), 0);
            }
        }
        let perm = sample::random_permutation(n, &mut rng);
        prop_assert_eq!(code.permute_columns(&perm).unwrap().hull_dim(), h);
    }

    #[test]
    fn standard_hull_form(ti in small_tower(), seed in any::<u64>(), (n, k) in shape()) {
        let (t, rt) = tower(ti);
        let mut rng = sample::rng(seed);
        let code = verify::varied_code(&t, n, k, &mut rng);
        let h = code.hull_dim();
        if h == 0 {
            prop_assert!(code.standardize_hull().is_err());
            return Ok(());
        }
        let form = code.standardize_hull().unwrap();
        prop_assert!(form.verify(&code).is_ok());
        prop_assert_eq!(form.h, h);
        let a = rt.top_rows(&t, &form.a);
        let b = rt.top_rows(&t, &form.b);
        let aat = rt.gram(&a);
        for (i, row) in aat.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                prop_assert_eq!(x, if i == j { rt.neg(1) } else { 0 });
            }
        }
        prop_assert!(rt.matmul(&a, &rt.transpose(&b)).iter().flatten().all(|&x| x == 0));
        prop_assert_eq!(rt.rank(&rt.gram(&b)), k - h);
        let permuted = rt.matmul(&rt.top_rows(&t, code.generator()), &rt.mid_rows(&t, &form.perm_matrix));
        prop_assert!(rt.same_span(&permuted, &rt.top_rows(&t, &form.std_gen)));
    }

    #[test]
    fn witnesses_preserve_rank_weights(ti in 0usize..9, seed in any::<u64>(), (n, k) in shape()) {
        let (t, rt) = tower(ti);
        prop_assume!(rt.code_size(k, 1 << 9).is_some());
        let mut rng = sample::rng(seed);
        let code = sample::random_code(&t, n, k, &mut rng);
        let w = sample::random_witness(&t, n, &mut rng);
        let image = code.transform(&w).unwrap();
        let g = rt.top_rows(&t, code.generator());
        prop_assert_eq!(rt.rank_weights(&g), rt.rank_weights(&rt.top_rows(&t, image.generator())));
        prop_assert_eq!(code.rank_weights(), rt.rank_weights(&g));
    }

    #[test]
    fn reduction_block_shape(ti in small_tower(), seed in any::<u64>(), (n, k) in shape()) {
        let (t, rt) = tower(ti);
        let mut rng = sample::rng(seed);
        let code = verify::varied_code(&t, n, k, &mut rng);
        let h = code.hull_dim();
        for ell in variation::admissible_targets(t.q(), h) {
            let r = variation::reduce_hull(&code, ell).unwrap();
            let gp = rt.top_rows(&t, &r.transformed_gen);
            prop_assert_eq!(rt.hull_dim(&gp), ell);
            let (Some(form), Some(plan)) = (&r.form, &r.plan) else {
                prop_assert_eq!(ell, h);
                continue;
            };
            let s = h - ell;
            let gram = rt.gram(&gp);
            let y = rt.mid_rows(&t, &plan.y);
            let yy = rt.gram(&y);
            let bb = rt.gram(&rt.top_rows(&t, &form.b));
            for i in 0..k {
                for j in 0..k {
                    let want = if i < s && j < s {
                        rt.sub(yy[i][j], u32::from(i == j))
                    } else if i >= h && j >= h {
                        bb[i - h][j - h]
                    } else {
                        0
                    };
                    prop_assert_eq!(gram[i][j], want, "cell ({}, {})", i, j);
                }
            }
            let wr = rt.mid_rows(&t, &r.witness.matrix);
            prop_assert_eq!(rt.rank(&wr), n);
            let gw = rt.matmul(&rt.top_rows(&t, code.generator()), &wr);
            prop_assert!(rt.same_span(&gw, &gp));
        }
    }

    #[test]
    fn make_lcd_is_total(ti in small_tower(), seed in any::<u64>(), (n, k) in shape()) {
        let (t, rt) = tower(ti);
        let mut rng = sample::rng(seed);
        let code = verify::varied_code(&t, n, k, &mut rng);
        let out = variation::make_lcd(&code).unwrap();
        prop_assert_eq!(rt.hull_dim(&rt.top_rows(&t, out.code.generator())), 0);
        prop_assert_eq!(code.transform(&out.witness.matrix).unwrap(), out.code);
    }

    #[test]
    fn hull_one_certificate(ti in 0usize..7, seed in any::<u64>(), (n, k) in shape()) {
        let (t, rt) = tower(ti);
        prop_assume!(QRegime::of(t.q()) == QRegime::Small && k.min(n - k) >= 1);
        let mut rng = sample::rng(seed);
        let code = sample::random_code_with_hull(&t, n, k, 1, &mut rng);
        prop_assume!(code.is_some());
        let code = code.unwrap();
        let r = variation::make_lcd_h1(&code).unwrap();
        let q = rt.top_rows(&t, &r.cert.q);
        prop_assert_eq!(&q, &rt.transpose(&q));
        let a = rt.top_rows(&t, &r.form.a)[0].clone();
        let aqa = rt.dot(&rt.matmul(&vec![a.clone()], &q)[0], &a);
        prop_assert_eq!(aqa, rt.neg(1));
        let v: Vec<u32> = r.cert.v.iter().map(|&x| rt.from_mid(&t, x)).collect();
        let lin = rt.dot(&v, &a);
        let fv = rt.add(rt.dot(&rt.matmul(&vec![v.clone()], &q)[0], &v), rt.add(lin, lin));
        prop_assert_ne!(fv, 0);
        prop_assert_eq!(fv, rt.from_top(&t, r.cert.fv));
        prop_assert_eq!(rt.hull_dim(&rt.top_rows(&t, r.code.generator())), 0);
    }

    #[test]
    fn code_json_round_trip(ti in small_tower(), seed in any::<u64>(), (n, k) in shape()) {
        let (t, _) = tower(ti);
        let mut rng = sample::rng(seed);
        let code = sample::random_code(&t, n, k, &mut rng);
        let doc = CodeDoc::fresh(code.clone());
        let w = sample::random_witness(&t, n, &mut rng);
        let next = doc.extended(code.transform(&w).unwrap(), &w);
        for d in [doc, next] {
            let text = serde_json::to_string(&json::code_to_json(&d)).unwrap();
            let back = json::parse_code(&text).unwrap();
            prop_assert_eq!(&back.code, &d.code);
            prop_assert_eq!(back.cumulative(), d.cumulative());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn association_and_duality(ti in prop::sample::select(vec![1usize, 2, 8, 6, 14]), seed in any::<u64>(), (n, k) in shape()) {
        let (t, rt) = tower(ti);
        let m = t.m();
        let mut rng = sample::rng(seed);
        let code = verify::varied_code(&t, n, k, &mut rng);
        let basis = assoc::find_self_dual_basis(&t, seed, 1 << 22).unwrap();
        prop_assert!(basis.is_self_dual(&t));
        let rb = sample::random_basis(&t, &mut rng);
        let rbd = rb.dual(&t).unwrap();
        prop_assert_eq!(&rbd.dual(&t).unwrap(), &rb);
        let d = assoc::associate(&code, &rb);
        prop_assert_eq!(d.dim(), m * k);
        prop_assert_eq!(&assoc::associate(&code.dual(), &rbd), &d.dual());
        prop_assert_eq!(&d.dual_by_trace().unwrap(), &d.dual());
        let sd = assoc::associate(&code, &basis);
        let hull_code = RankMetricCode::from_space(&t, code.hull());
        prop_assert_eq!(&assoc::associate(&hull_code, &basis), &sd.hull());
        let gen = rt.mid_rows(&t, sd.gen_rho());
        prop_assert_eq!(rt.hull_dim(&gen), m * code.hull_dim());
        let json = json::matrix_code_to_json(&sd);
        prop_assert_eq!(&json::matrix_code_from_json(&json).unwrap(), &sd);
    }

    #[test]
    fn flattening_commutes_with_intersection(ti in 0usize..9, seed in any::<u64>(), n in 1usize..=4) {
        let (t, _) = tower(ti);
        let (mid, m) = (t.mid(), t.m());
        let mut rng = sample::rng(seed);
        let code = |rng: &mut rand_chacha::ChaCha8Rng| {
            let count = rng.gen_range(0..=n * m);
            let mats: Vec<Matrix<_>> = (0..count).map(|_| sample::random_matrix(mid, n, m, rng)).collect();
            MatrixCode::from_matrices(&t, n, m, &mats).unwrap()
        };
        let (a, b) = (code(&mut rng), code(&mut rng));
        prop_assert_eq!(a.intersect(&b).unwrap(), a.intersect_via_columns(&b).unwrap());
    }
}

#[test]
fn trace_is_onto_the_base_field() {
    for i in 0..TOWERS.len() {
        let (t, rt) = tower(i);
        let mut hit = vec![false; rt.q as usize];
        for x in 0..rt.big {
            let tr = rt.from_mid(&t, t.trace(rt.to_top(&t, x)).unwrap());
            hit[tr as usize] = true;
        }
        assert!(hit.iter().all(|&h| h), "{:?}", TOWERS[i]);
    }
}

#[test]
fn y_blocks_for_every_admissible_size() {
    for &(p, e) in &[(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        let t = FieldTower::new(p, e, 1).unwrap();
        let rt = RefTower::new(&t);
        let first = if QRegime::of(t.q()) == QRegime::Small { 2 } else { 1 };
        if first == 2 {
            assert!(variation::build_y(t.mid(), 1).is_err());
        }
        for s in first..=12 {
            let y = rt.mid_rows(&t, &variation::build_y(t.mid(), s).unwrap());
            let defect: Rows = rt
                .gram(&y)
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().enumerate().map(|(j, &x)| rt.sub(x, u32::from(i == j))).collect())
                .collect();
            assert_ne!(rt.det(&defect), 0, "q = {}, s = {s}", t.q());
        }
    }
}

#[test]
fn self_dual_bases_where_they_exist() {
    for &(p, e, m) in &[(2, 1, 2), (2, 1, 3), (2, 2, 2), (2, 3, 2), (3, 1, 3), (5, 1, 3)] {
        let t = FieldTower::new(p, e, m).unwrap();
        let rt = RefTower::new(&t);
        assert!(assoc::self_dual_basis_exists(t.q(), m));
        let b = assoc::find_self_dual_basis(&t, 7, 1 << 22).unwrap();
        let g: Vec<u32> = b.gammas().iter().map(|&x| rt.from_top(&t, x)).collect();
        for (i, &x) in g.iter().enumerate() {
            for (j, &y) in g.iter().enumerate() {
                assert_eq!(rt.trace(rt.mul(x, y)), u32::from(i == j), "{:?}", (p, e, m));
            }
        }
    }
    let odd_even = FieldTower::new(3, 1, 2).unwrap();
    assert!(!assoc::self_dual_basis_exists(3, 2));
    assert!(assoc::find_self_dual_basis(&odd_even, 0, 1000).is_err());
}
