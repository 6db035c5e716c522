use bqpolyak::arrow::Basis;
use bqpolyak::biquandle::Biquandle;
use bqpolyak::oracle::global_relation_stack;
use bqpolyak::polyak::relation_echelon;

fn cases(max: usize) -> impl Iterator<Item = (Biquandle, usize)> {
    (1..=2).flat_map(move |c| (1..=max).flat_map(Biquandle::enumerate_all).map(move |b| (b, c)))
}

#[test]
fn whole_diagram_relations_are_local() {
    for (b, c) in cases(2) {
        let basis = Basis::new(&b, 1, c);
        let local = relation_echelon(&b, 1, c, &basis);
        let global = global_relation_stack(&b, 1, c).unwrap();
        for i in 0..global.rows() {
            assert!(local.contains(&global.row(i).to_vec()), "{b:?} c={c}");
        }
    }
}

#[test]
fn one_element_and_x2_ranks_agree() {
    for (b, c) in [(Biquandle::trivial(1), 1), (Biquandle::trivial(1), 2), (Biquandle::constant_action(&[1, 0]).unwrap(), 1)] {
        let basis = Basis::new(&b, 1, c);
        assert_eq!(relation_echelon(&b, 1, c, &basis).rank(), global_relation_stack(&b, 1, c).unwrap().rank());
    }
}

/// Local relations label strands independently, so they reach label
/// patterns that no whole labeled diagram with few arrows carries; the
/// ranks then differ (X1 on one circle: 6 against 4).
#[test]
#[ignore = "rank equality does not hold for most biquandles of order 3 or for X1"]
fn local_and_global_ranks_agree() {
    for (b, c) in cases(3) {
        let basis = Basis::new(&b, 1, c);
        let local = relation_echelon(&b, 1, c, &basis).rank();
        let global = global_relation_stack(&b, 1, c).unwrap().rank();
        assert_eq!(local, global, "{b:?} c={c}");
    }
}
