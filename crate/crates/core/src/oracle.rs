//! Slow brute-force references for the test suite.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arrow::{expand, skeletons, Basis};
use crate::biquandle::Biquandle;
use crate::gauss::{GaussDiagram, Sign};
use crate::labeling::{apply_move_labeled, enumerate_labelings, random_labeled_step, CrossingTable, Labeling};
use crate::linalg::{make_primitive, IntMatrix, SparseVec};

/// Largest search space either oracle will walk.
pub const SIZE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space of {0} exceeds the oracle limit")]
    TooLarge(u128),
}

/// Every assignment of elements to semiarcs, kept when each crossing
/// satisfies its rule. Lexicographic order.
pub fn brute_labelings(d: &GaussDiagram, b: &Biquandle) -> Result<Vec<Labeling>, OracleError> {
    let s = d.num_semiarcs();
    let n = b.size();
    let space = (n as u128).checked_pow(s as u32).unwrap_or(u128::MAX);
    if space > SIZE_LIMIT {
        return Err(OracleError::TooLarge(space));
    }
    let crossings = d.crossing_semiarcs();
    let mut out = Vec::new();
    let mut f = vec![0usize; s];
    for mut code in 0..space as usize {
        for v in f.iter_mut().rev() {
            *v = code % n;
            code /= n;
        }
        let ok = crossings.iter().enumerate().all(|(a, c)| {
            b.crossing_outputs(*d.arrow(a), f[c.under_in], f[c.over_in]) == (f[c.under_out], f[c.over_out])
        });
        if ok {
            out.push(f.clone());
        }
    }
    Ok(out)
}

/// All signed canonical diagrams with at most `max` arrows on `c` circles.
pub fn signed_diagrams(max: usize, c: usize) -> Vec<GaussDiagram> {
    let mut out = BTreeSet::new();
    for m in 0..=max {
        for sk in skeletons(m, c) {
            for bits in 0..1u32 << m {
                let d = sk.map(|a, _| if bits >> a & 1 == 1 { Sign::Negative } else { Sign::Positive });
                out.insert(d.canonical());
            }
        }
    }
    out.into_iter().collect()
}

/// Rows `expand(D, f) - expand(D', f')` in the coordinates of the degree
/// `n` basis, over every labeled diagram with at most `n + 2` arrows and
/// every deletion or triangle move on it. Duplicate rows are dropped.
pub fn global_relation_stack(b: &Biquandle, n: usize, c: usize) -> Result<IntMatrix, OracleError> {
    global_relation_stack_within(b, n, c, n + 2)
}

/// As [`global_relation_stack`] with an explicit bound on the arrow count.
pub fn global_relation_stack_within(
    b: &Biquandle,
    n: usize,
    c: usize,
    max_arrows: usize,
) -> Result<IntMatrix, OracleError> {
    let diagrams = signed_diagrams(max_arrows, c);
    let space: u128 = diagrams.iter().map(|d| (b.size() as u128).pow(d.num_components() as u32) * (1 + d.num_arrows() as u128)).sum();
    if space > SIZE_LIMIT {
        return Err(OracleError::TooLarge(space));
    }
    let basis = Basis::new(b, n, c);
    let table = CrossingTable::new(b);
    let mut seen: HashSet<SparseVec> = HashSet::new();
    let mut rows = Vec::new();
    for d in &diagrams {
        let moves = d.local_moves();
        if moves.is_empty() {
            continue;
        }
        for f in enumerate_labelings(d, b) {
            let here = expand(d, &f, n);
            for mv in &moves {
                let (d2, f2) = apply_move_labeled(d, &table, &f, mv).expect("labelings carry across moves");
                let mut diff = here.clone();
                diff.add(&expand(&d2, &f2, n), -1);
                let mut row: SparseVec = basis.coordinates(&diff).into_iter().map(|(j, v)| (j, BigInt::from(v))).collect();
                if row.is_empty() {
                    continue;
                }
                make_primitive(&mut row);
                if seen.insert(row.clone()) {
                    rows.push(row);
                }
            }
        }
    }
    Ok(IntMatrix::from_rows(basis.len(), rows))
}

/// `steps` random labeled moves from `(d, f)`, reproducible from `seed`.
pub fn random_move_walk(d: &GaussDiagram, f: &[usize], b: &Biquandle, steps: usize, seed: u64) -> (GaussDiagram, Labeling) {
    let table = CrossingTable::new(b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = d.num_arrows() + 4;
    let (mut d, mut f) = (d.clone(), f.to_vec());
    for _ in 0..steps {
        let (d2, f2, _) = random_labeled_step(&mut rng, &d, &f, &table, bound);
        d = d2;
        f = f2;
    }
    (d, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{braid_closure, parse_gauss_code, Move};
    use crate::labeling::counting_invariant;

    #[test]
    fn brute_counts() {
        let fox = Biquandle::dihedral(3);
        assert_eq!(brute_labelings(&braid_closure(2, &[1, 1, 1]), &fox).unwrap().len(), 9);
        assert_eq!(brute_labelings(&GaussDiagram::empty(1), &fox).unwrap().len(), 3);
        let x2 = Biquandle::constant_action(&[1, 0]).unwrap();
        assert!(brute_labelings(&parse_gauss_code("U1+;O1+").unwrap(), &x2).unwrap().is_empty());
        let big = braid_closure(3, &[1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2]);
        assert!(matches!(brute_labelings(&big, &fox), Err(OracleError::TooLarge(_))));
    }

    #[test]
    fn degree_one_ranks() {
        let x2 = Biquandle::constant_action(&[1, 0]).unwrap();
        assert_eq!(global_relation_stack(&x2, 1, 1).unwrap().rank(), 6);
        assert_eq!(global_relation_stack(&Biquandle::trivial(1), 1, 1).unwrap().rank(), 2);
    }

    #[test]
    fn walks() {
        let x2 = Biquandle::constant_action(&[1, 0]).unwrap();
        let vt = parse_gauss_code("O1+U2+U1+O2+").unwrap();
        let f = enumerate_labelings(&vt, &x2).remove(0);
        assert_eq!(random_move_walk(&vt, &f, &x2, 0, 3), (vt.clone(), f.clone()));
        let (d, _) = random_move_walk(&vt, &f, &x2, 20, 3);
        assert_eq!(counting_invariant(&d, &x2), 2);
        assert_eq!(random_move_walk(&vt, &f, &x2, 20, 3).0, d);

        let table = CrossingTable::new(&x2);
        let mv = Move::R1Insert { circle: 0, gap: 1, head_first: false, sign: Sign::Negative };
        let (d1, f1) = apply_move_labeled(&vt, &table, &f, &mv).unwrap();
        let undo = d1.local_moves().into_iter().find(|m| matches!(m, Move::R1Delete { .. })).unwrap();
        let (d2, _) = apply_move_labeled(&d1, &table, &f1, &undo).unwrap();
        assert_eq!(d2.canonical(), vt.canonical());
    }
}
