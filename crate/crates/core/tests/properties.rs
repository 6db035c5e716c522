use std::sync::OnceLock;

use bqpolyak::arrow::{expand, labeled_diagram, pair_with_expansion, LabeledArrowDiagram};
use bqpolyak::biquandle::Biquandle;
use bqpolyak::enhance::{enhancement, parity_element, EnhancementValue};
use bqpolyak::gauss::{parse_gauss_code, GaussDiagram};
use bqpolyak::labeling::{counting_invariant, enumerate_labelings, is_labeling};
use bqpolyak::linalg::{hnf, integer_kernel, IntMatrix};
use bqpolyak::oracle::{brute_labelings, random_move_walk};
use bqpolyak::polyak::{polyak_basis, random_diagram, PolyakBasis};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diagram(seed: u64, m: usize, c: usize) -> GaussDiagram {
    random_diagram(&mut ChaCha8Rng::seed_from_u64(seed), m, c)
}

fn small_biquandle(i: usize) -> Biquandle {
    static ALL: OnceLock<Vec<Biquandle>> = OnceLock::new();
    let all = ALL.get_or_init(|| (1..=3).flat_map(Biquandle::enumerate_all).collect());
    all[i % all.len()].clone()
}

fn x2() -> Biquandle {
    Biquandle::constant_action(&[1, 0]).unwrap()
}

fn x2_basis(n: usize) -> &'static PolyakBasis {
    static CACHE: OnceLock<[PolyakBasis; 2]> = OnceLock::new();
    &CACHE.get_or_init(|| [polyak_basis(&x2(), 1, 1), polyak_basis(&x2(), 2, 1)])[n - 1]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_ignores_rotations(seed: u64, m in 0usize..7, c in 1usize..3, rots in prop::collection::vec(0usize..20, 2)) {
        let d = diagram(seed, m, c);
        let mut r = d.clone();
        for (ci, &k) in rots.iter().enumerate().take(c) {
            r = r.rotated(ci, k);
        }
        prop_assert_eq!(r.canonical(), d.canonical());
        prop_assert!(d.canonical().is_canonical());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gauss_code_round_trip(seed: u64, m in 0usize..8, c in 1usize..4) {
        let d = diagram(seed, m, c);
        let back = parse_gauss_code(&d.to_code()).unwrap();
        prop_assert_eq!(back.canonical(), d.canonical());
        let json = GaussDiagram::from_json_value(&d.to_json_value()).unwrap();
        prop_assert_eq!(json, d);
    }

    #[test]
    fn backtracking_matches_brute_force(seed: u64, m in 0usize..5, c in 1usize..3, bi in 0usize..39) {
        let b = small_biquandle(bi);
        let d = diagram(seed, m, c);
        let mut fast = enumerate_labelings(&d, &b);
        fast.sort();
        prop_assert!(fast.iter().all(|f| is_labeling(&d, &b, f)));
        prop_assert_eq!(brute_labelings(&d, &b).unwrap(), fast);
    }

    #[test]
    fn moves_preserve_counting(seed: u64, m in 0usize..5, bi in 0usize..39, steps in 1usize..20) {
        let b = small_biquandle(bi);
        let d = diagram(seed, m, 1);
        let before = counting_invariant(&d, &b);
        if let Some(f) = enumerate_labelings(&d, &b).first() {
            let (d2, f2) = random_move_walk(&d, f, &b, steps, seed);
            prop_assert!(is_labeling(&d2, &b, &f2));
            prop_assert_eq!(counting_invariant(&d2, &b), before);
        }
    }

    #[test]
    fn enhancement_sums_to_counting(seed: u64, m in 0usize..6) {
        let b = x2();
        let a = parity_element(x2_basis(1)).unwrap();
        let d = diagram(seed, m, 1);
        let v = enhancement(&d, &b, &a, 1).unwrap();
        prop_assert_eq!(v.polynomial().values().sum::<usize>(), counting_invariant(&d, &b));
        prop_assert_eq!(EnhancementValue::from_polynomial(&v.polynomial()), v);
    }

    #[test]
    fn pairing_matches_explicit_expansion(seed: u64, m in 0usize..6, n in 1usize..3) {
        let b = x2();
        let d = diagram(seed, m, 1);
        let p = x2_basis(n);
        for f in enumerate_labelings(&d, &b) {
            let e = expand(&d, &f, n);
            for a in p.elements() {
                prop_assert_eq!(pair_with_expansion(&a, &labeled_diagram(&d, &f), n), bqpolyak::arrow::inner_product(&a, &e));
            }
        }
    }

    #[test]
    fn labeled_json_round_trip(seed: u64, m in 0usize..6) {
        let b = Biquandle::dihedral(3);
        let d = diagram(seed, m, 1);
        for f in enumerate_labelings(&d, &b) {
            let ld = labeled_diagram(&d, &f);
            prop_assert_eq!(LabeledArrowDiagram::from_json_value(&ld.to_json_value()).unwrap(), ld);
        }
    }

    #[test]
    fn hnf_and_kernel(rows in prop::collection::vec(prop::collection::vec(-4i64..5, 5), 1..6)) {
        let m = IntMatrix::from_dense(&rows);
        let (h, u) = hnf(&m);
        prop_assert_eq!(u.mul(&m), h);
        let k = integer_kernel(&m.transpose());
        prop_assert_eq!(k.len(), m.rows() - m.rank());
        for v in &k {
            for j in 0..m.cols() {
                let s: BigInt = v.iter().map(|(i, x)| x * m.get(*i, j)).sum();
                prop_assert!(s.is_zero());
            }
        }
    }
}

#[test]
fn s_inverse_is_an_inverse() {
    for b in (1..=3).flat_map(Biquandle::enumerate_all) {
        let n = b.size();
        for x in 0..n {
            for y in 0..n {
                assert_eq!(b.invert_s(b.under(y, x), b.over(x, y)), (x, y));
            }
        }
    }
}
