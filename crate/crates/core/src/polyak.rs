//! Labeled Reidemeister relations and the truncated labeled Polyak algebra.
//!
//! A relation generator is built from a move site (one, two or three short
//! strand segments called blocks, shown before and after the move) and a
//! context of `k` further locally labeled arrows placed anywhere on the
//! circles. Its value is the sum, over every nonempty set `T` of site arrows
//! with `k + |T| <= n`, of the subdiagram on the context and `T` after the
//! move, minus the same sum before the move. Subsets that avoid the site
//! cancel, and subsets that drop context arrows are themselves generators
//! with a smaller context, so these span every truncated move difference.
//!
//! The Polyak algebra is the integer kernel of the generator matrix over the
//! distinguished basis of [`Basis`].

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrow::{pair_with_expansion, labeled_diagram, AlgebraElement, Basis, LabeledArrow, LabeledArrowDiagram};
use crate::biquandle::Biquandle;
use crate::gauss::{r3_keys, Crossing, Diagram, End, GaussDiagram, Move, Sign, Slot};
use crate::labeling::{enumerate_labelings, enumerate_network, random_labeled_step, CrossingTable, Labeling};
use crate::linalg::{integer_kernel, to_i64_dense, IntMatrix, RowEchelon, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    R1,
    R2,
    R3,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A move site: blocks of site-arrow ends before and after the move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Site {
    pub kind: MoveKind,
    pub description: String,
    pub signs: Vec<Sign>,
    pub before: Vec<Vec<(usize, End)>>,
    pub after: Vec<Vec<(usize, End)>>,
}

impl Site {
    pub fn blocks(&self) -> usize {
        self.after.len()
    }

    fn side(&self, after: bool) -> &[Vec<(usize, End)>] {
        if after {
            &self.after
        } else {
            &self.before
        }
    }

    /// One side as open strands: block `i` runs through semiarcs
    /// `entry[i]..=exit[i]`. Returns the crossing semiarcs (empty when the
    /// side has no arrows), the semiarc count and `(entry, exit)` per block.
    fn open_network(&self, after: bool) -> (Vec<Crossing<usize>>, usize, Vec<(usize, usize)>) {
        let side = self.side(after);
        let mut ends = Vec::with_capacity(side.len());
        let mut pos = vec![[(0usize, 0usize); 2]; self.signs.len()];
        let mut next = 0;
        for blk in side {
            for (j, &(a, end)) in blk.iter().enumerate() {
                let i = if end == End::Tail { 0 } else { 1 };
                pos[a][i] = (next + j, next + j + 1);
            }
            ends.push((next, next + blk.len()));
            next += blk.len() + 1;
        }
        let crossings = if side.iter().all(Vec::is_empty) {
            Vec::new()
        } else {
            pos.iter()
                .map(|p| Crossing {
                    over_in: p[0].0,
                    over_out: p[0].1,
                    under_in: p[1].0,
                    under_out: p[1].1,
                })
                .collect()
        };
        (crossings, next, ends)
    }

    /// Every labeling of the strands before the move, with the matching
    /// labeling after it (same labels entering and leaving every block).
    pub fn labelings(&self, table: &CrossingTable) -> Vec<SiteLabeling> {
        let (bc, bn, bends) = self.open_network(false);
        let (ac, an, aends) = self.open_network(true);
        let signs_of = |cs: &[Crossing<usize>]| self.signs[..cs.len()].to_vec();
        let arrows = |cs: &[Crossing<usize>], f: &[usize]| -> Option<Vec<LabeledArrow>> {
            if cs.is_empty() {
                return None;
            }
            Some(
                cs.iter()
                    .zip(&self.signs)
                    .map(|(c, &sign)| LabeledArrow {
                        sign,
                        labels: Crossing {
                            over_in: f[c.over_in],
                            over_out: f[c.over_out],
                            under_in: f[c.under_in],
                            under_out: f[c.under_out],
                        },
                    })
                    .collect(),
            )
        };
        let mut out = Vec::new();
        for f in enumerate_network(&signs_of(&bc), &bc, table, &vec![None; bn]) {
            let entries: Vec<usize> = bends.iter().map(|e| f[e.0]).collect();
            let exits: Vec<usize> = bends.iter().map(|e| f[e.1]).collect();
            let mut fixed = vec![None; an];
            for (i, e) in aends.iter().enumerate() {
                fixed[e.0] = Some(entries[i]);
                fixed[e.1] = Some(exits[i]);
            }
            let g = enumerate_network(&signs_of(&ac), &ac, table, &fixed);
            assert_eq!(g.len(), 1, "{}: labels must carry across uniquely", self.description);
            out.push(SiteLabeling {
                before: arrows(&bc, &f),
                after: arrows(&ac, &g[0]),
                entries,
                exits,
            });
        }
        out
    }
}

/// Labels of a move site on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteLabeling {
    pub entries: Vec<usize>,
    pub exits: Vec<usize>,
    pub before: Option<Vec<LabeledArrow>>,
    pub after: Option<Vec<LabeledArrow>>,
}

/// Every oriented move site: four R1 kinks, four R2 bigons and one R3
/// triangle per valid configuration.
pub fn sites() -> Vec<Site> {
    use End::{Head as H, Tail as T};
    let mut out = Vec::new();
    for sign in Sign::BOTH {
        for (name, blk) in [("tail first", vec![(0, T), (0, H)]), ("head first", vec![(0, H), (0, T)])] {
            out.push(Site {
                kind: MoveKind::R1,
                description: format!("R1 {sign} kink, {name}"),
                signs: vec![sign],
                before: vec![vec![]],
                after: vec![blk],
            });
        }
    }
    for first in Sign::BOTH {
        for parallel in [true, false] {
            let heads = if parallel { vec![(0, H), (1, H)] } else { vec![(1, H), (0, H)] };
            out.push(Site {
                kind: MoveKind::R2,
                description: format!(
                    "R2 {} bigon, first arrow {first}",
                    if parallel { "parallel" } else { "antiparallel" }
                ),
                signs: vec![first, first.flip()],
                before: vec![vec![], vec![]],
                after: vec![vec![(0, T), (1, T)], heads],
            });
        }
    }
    let mut keys: Vec<_> = r3_keys().iter().copied().collect();
    keys.sort();
    for (order, signs) in keys {
        let blocks = |o: [bool; 3]| {
            let pair = |first: bool, x: (usize, End), y: (usize, End)| if first { vec![x, y] } else { vec![y, x] };
            vec![pair(o[0], (0, T), (1, T)), pair(o[1], (0, H), (2, T)), pair(o[2], (1, H), (2, H))]
        };
        let bits: String = order.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let sg: String = signs.iter().map(|s| s.to_string()).collect();
        out.push(Site {
            kind: MoveKind::R3,
            description: format!("R3 triangle, order {bits}, signs {sg}"),
            signs: signs.to_vec(),
            before: blocks(order),
            after: blocks(order.map(|b| !b)),
        });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Token {
    Block(usize),
    Ctx(Slot),
}

/// Cyclic arrangements of `blocks` blocks and the ends of `k` context arrows
/// on `c` ordered circles.
fn arrangements(blocks: usize, k: usize, c: usize) -> Vec<Vec<Vec<Token>>> {
    let items: Vec<Token> = (0..blocks)
        .map(Token::Block)
        .chain((0..2 * k).map(|i| {
            Token::Ctx(Slot {
                arrow: i / 2,
                end: if i % 2 == 0 { End::Tail } else { End::Head },
            })
        }))
        .collect();
    fn rec(i: usize, items: &[Token], circles: &mut Vec<Vec<Token>>, out: &mut Vec<Vec<Vec<Token>>>) {
        if i == items.len() {
            out.push(circles.clone());
            return;
        }
        for ci in 0..circles.len() {
            let len = circles[ci].len();
            for p in (if len == 0 { 0 } else { 1 })..=len {
                circles[ci].insert(p, items[i]);
                rec(i + 1, items, circles, out);
                circles[ci].remove(p);
            }
        }
    }
    let mut out = Vec::new();
    rec(0, &items, &mut vec![Vec::new(); c], &mut out);
    out
}

/// Provenance of a generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationGenerator {
    pub element: AlgebraElement,
    pub kind: MoveKind,
    pub site: String,
    /// Label entering each block, 0-based.
    pub inputs: Vec<usize>,
    pub context_arrows: usize,
}

/// Visits every local relation generator (before deduplication) for
/// degree `n` on `c` circles.
pub fn for_each_generator(
    b: &Biquandle,
    n: usize,
    c: usize,
    visit: &mut dyn FnMut(&Site, &[usize], usize, &AlgebraElement),
) {
    let table = CrossingTable::new(b);
    let ctx_arrows = LabeledArrow::all(b);
    let mut arr_cache: HashMap<(usize, usize), Vec<Vec<Vec<Token>>>> = HashMap::new();
    for site in sites() {
        let t = site.blocks();
        for lab in site.labelings(&table) {
            for k in 0..n {
                let arrs = arr_cache.entry((t, k)).or_insert_with(|| arrangements(t, k, c));
                let mut choice = vec![0usize; k];
                loop {
                    let ctx: Vec<LabeledArrow> = choice.iter().map(|&i| ctx_arrows[i]).collect();
                    for arr in arrs.iter() {
                        let mut e = AlgebraElement::new();
                        if let Some(l) = &lab.after {
                            add_side(&mut e, arr, &site.after, &ctx, l, n, 1);
                        }
                        if let Some(l) = &lab.before {
                            add_side(&mut e, arr, &site.before, &ctx, l, n, -1);
                        }
                        visit(&site, &lab.entries, k, &e);
                    }
                    if !next_choice(&mut choice, ctx_arrows.len()) {
                        break;
                    }
                }
            }
        }
    }
}

fn next_choice(v: &mut [usize], base: usize) -> bool {
    for x in v.iter_mut() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

fn add_side(
    e: &mut AlgebraElement,
    arr: &[Vec<Token>],
    blocks: &[Vec<(usize, End)>],
    ctx: &[LabeledArrow],
    site: &[LabeledArrow],
    n: usize,
    coeff: i64,
) {
    let k = ctx.len();
    let circles: Vec<Vec<Slot>> = arr
        .iter()
        .map(|circle| {
            circle
                .iter()
                .flat_map(|tok| match *tok {
                    Token::Ctx(s) => vec![s],
                    Token::Block(i) => blocks[i].iter().map(|&(a, end)| Slot { arrow: k + a, end }).collect(),
                })
                .collect()
        })
        .collect();
    let arrows: Vec<LabeledArrow> = ctx.iter().chain(site).copied().collect();
    let d = Diagram::new(circles, arrows).expect("arranged site is a diagram");
    let m = site.len();
    let mut mask = vec![true; k + m];
    for t in 1u32..(1 << m) {
        if k + t.count_ones() as usize > n {
            continue;
        }
        for i in 0..m {
            mask[k + i] = t >> i & 1 == 1;
        }
        e.add_term(d.subdiagram(&mask).canonical(), coeff);
    }
}

/// Deduplicated nonzero local relation generators, normalized to primitive
/// form with positive leading coefficient.
pub fn relation_generators(b: &Biquandle, n: usize, c: usize) -> Vec<RelationGenerator> {
    let mut seen: HashSet<Vec<(LabeledArrowDiagram, i64)>> = HashSet::new();
    let mut out = Vec::new();
    for_each_generator(b, n, c, &mut |site, inputs, k, e| {
        if e.is_empty() {
            return;
        }
        let e = e.normalized();
        let key: Vec<_> = e.terms().map(|(d, c)| (d.clone(), c)).collect();
        if seen.insert(key) {
            out.push(RelationGenerator {
                element: e,
                kind: site.kind,
                site: site.description.clone(),
                inputs: inputs.to_vec(),
                context_arrows: k,
            });
        }
    });
    out
}

/// Coordinates of a generator as a sparse row with primitive content.
fn row_of(basis: &Basis, e: &AlgebraElement) -> SparseVec {
    basis.coordinates(e).into_iter().map(|(j, v)| (j, v.into())).collect()
}

/// Echelon form of the local relation rows.
pub fn relation_echelon(b: &Biquandle, n: usize, c: usize, basis: &Basis) -> RowEchelon {
    let mut ech = RowEchelon::new(basis.len());
    let mut seen: HashSet<Vec<(usize, i64)>> = HashSet::new();
    for_each_generator(b, n, c, &mut |_, _, _, e| {
        if e.is_empty() {
            return;
        }
        let coords = basis.coordinates(&e.normalized());
        if seen.insert(coords.clone()) {
            ech.insert(coords.into_iter().map(|(j, v)| (j, v.into())).collect());
        }
    });
    ech
}

/// Basis of the truncated labeled Polyak algebra as integer vectors over
/// the distinguished basis.
#[derive(Clone, Debug)]
pub struct PolyakBasis {
    pub biquandle: Biquandle,
    pub degree: usize,
    pub components: usize,
    pub basis: Basis,
    pub relation_rank: usize,
    pub vectors: Vec<Vec<i64>>,
}

impl PolyakBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn element(&self, i: usize) -> AlgebraElement {
        self.basis.element(&self.vectors[i])
    }

    pub fn elements(&self) -> Vec<AlgebraElement> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// Whether `e` is orthogonal to every relation, i.e. lies in the
    /// rational span of the basis vectors.
    pub fn contains(&self, e: &AlgebraElement) -> bool {
        let mut ech = RowEchelon::new(self.basis.len());
        for v in &self.vectors {
            ech.insert(v.iter().enumerate().filter(|(_, x)| **x != 0).map(|(j, x)| (j, (*x).into())).collect());
        }
        let coords = self.basis.coordinates(e);
        coords.len() == e.len() && ech.contains(&row_of(&self.basis, e))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "biquandle_size": self.biquandle.size(),
            "degree": self.degree,
            "components": self.components,
            "dim_a": self.basis.len(),
            "relation_rank": self.relation_rank,
            "dim_p": self.dim(),
            "basis": self.basis.diagrams().iter().map(|d| d.to_json_value()).collect::<Vec<_>>(),
            "vectors": self.vectors,
        })
    }
}

/// Computes the Polyak algebra of degree `n` on `c` circles.
pub fn polyak_basis(b: &Biquandle, n: usize, c: usize) -> PolyakBasis {
    let basis = Basis::new(b, n, c);
    let ech = relation_echelon(b, n, c, &basis);
    polyak_from_relations(b, n, c, basis, &ech.to_matrix())
}

/// Kernel of an explicit relation matrix over `basis`.
pub fn polyak_from_relations(b: &Biquandle, n: usize, c: usize, basis: Basis, rel: &IntMatrix) -> PolyakBasis {
    let vectors = integer_kernel(rel).iter().map(|v| to_i64_dense(v, basis.len())).collect();
    PolyakBasis {
        biquandle: b.clone(),
        degree: n,
        components: c,
        relation_rank: rel.rank(),
        basis,
        vectors,
    }
}

/// One violated invariance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceFailure {
    pub vector: usize,
    pub before: String,
    pub labeling: Labeling,
    pub mv: Move,
    pub after: String,
    pub values: (i64, i64),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvarianceReport {
    pub steps: usize,
    pub r3_steps: usize,
    pub failures: Vec<InvarianceFailure>,
}

/// A random diagram with `m` arrows on `c` circles.
pub fn random_diagram(rng: &mut impl Rng, m: usize, c: usize) -> GaussDiagram {
    let mut circles: Vec<Vec<Slot>> = vec![Vec::new(); c];
    for a in 0..m {
        for end in [End::Tail, End::Head] {
            let ci = rng.gen_range(0..c);
            let p = rng.gen_range(0..=circles[ci].len());
            circles[ci].insert(p, Slot { arrow: a, end });
        }
    }
    let signs = (0..m).map(|_| if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative }).collect();
    Diagram::new(circles, signs).expect("random arrangement is valid")
}

/// A random diagram with at least one labeling, and one of its labelings.
pub fn random_labeled_diagram(
    rng: &mut impl Rng,
    b: &Biquandle,
    max_arrows: usize,
    c: usize,
) -> (GaussDiagram, Labeling) {
    loop {
        let m = rng.gen_range(0..=max_arrows);
        let d = random_diagram(rng, m, c);
        let ls = enumerate_labelings(&d, b);
        if let Some(f) = ls.choose(rng) {
            return (d, f.clone());
        }
    }
}

/// Random labeled move walks: after every step each basis vector must pair
/// to the same value with the expansion as before.
pub fn verify_invariance(p: &PolyakBasis, steps: usize, seed: u64) -> InvarianceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = CrossingTable::new(&p.biquandle);
    let elems = p.elements();
    let n = p.degree;
    let mut report = InvarianceReport::default();
    let restart = 25;
    let (mut d, mut f) = random_labeled_diagram(&mut rng, &p.biquandle, 6, p.components);
    let mut values: Vec<i64> = elems.iter().map(|a| pair_with_expansion(a, &labeled_diagram(&d, &f), n)).collect();
    for step in 0..steps {
        if step % restart == restart - 1 {
            (d, f) = random_labeled_diagram(&mut rng, &p.biquandle, 6, p.components);
            values = elems.iter().map(|a| pair_with_expansion(a, &labeled_diagram(&d, &f), n)).collect();
        }
        let (d2, f2, mv) = random_labeled_step(&mut rng, &d, &f, &table, 8);
        report.steps += 1;
        if matches!(mv, Move::R3 { .. }) {
            report.r3_steps += 1;
        }
        let ld2 = labeled_diagram(&d2, &f2);
        for (i, a) in elems.iter().enumerate() {
            let v = pair_with_expansion(a, &ld2, n);
            if v != values[i] {
                report.failures.push(InvarianceFailure {
                    vector: i,
                    before: d.to_code(),
                    labeling: f.clone(),
                    mv,
                    after: d2.to_code(),
                    values: (values[i], v),
                });
                values[i] = v;
            }
        }
        d = d2;
        f = f2;
    }
    report
}

/// `phi(a, b)`: the positive one-arrow diagram with under-in label `a` and
/// over-in label `b`, on one circle.
pub fn phi(b: &Biquandle, under_in: usize, over_in: usize) -> LabeledArrowDiagram {
    let a = LabeledArrow::from_inputs(b, Sign::Positive, over_in, under_in);
    let d = Diagram::new(
        vec![vec![Slot { arrow: 0, end: End::Tail }, Slot { arrow: 0, end: End::Head }]],
        vec![a],
    )
    .expect("one arrow");
    d.canonical()
}

/// The degree-one relation of the all-positive triangle with strands
/// labeled `x` (bottom), `y`, `z` (top), written with [`phi`]:
/// `phi(y,z) + phi(x,z_y) + phi(x^{z_y},y^z) - phi(x,y) - phi(x^y,z) -
/// phi(y_x,z_{x^y})`.
pub fn cocycle_relation(b: &Biquandle, x: usize, y: usize, z: usize) -> AlgebraElement {
    let zy = b.under(z, y);
    let xy = b.over(x, y);
    let mut e = AlgebraElement::new();
    for (u, o, c) in [
        (y, z, 1),
        (x, zy, 1),
        (b.over(x, zy), b.over(y, z), 1),
        (x, y, -1),
        (xy, z, -1),
        (b.under(y, x), b.under(z, xy), -1),
    ] {
        e.add_term(phi(b, u, o), c);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::parse_gauss_code;

    fn x2() -> Biquandle {
        Biquandle::constant_action(&[1, 0]).unwrap()
    }

    #[test]
    fn site_counts() {
        let s = sites();
        assert_eq!(s.iter().filter(|x| x.kind == MoveKind::R1).count(), 4);
        assert_eq!(s.iter().filter(|x| x.kind == MoveKind::R2).count(), 4);
        assert_eq!(s.iter().filter(|x| x.kind == MoveKind::R3).count(), r3_keys().len());
    }

    #[test]
    fn site_labels_are_unique_for_small_biquandles() {
        for b in Biquandle::enumerate_all(3) {
            let table = CrossingTable::new(&b);
            for site in sites() {
                let labs = site.labelings(&table);
                let expect = if site.kind == MoveKind::R3 { 27 } else { 3usize.pow(site.blocks() as u32) };
                assert_eq!(labs.len(), expect, "{}", site.description);
            }
        }
    }

    #[test]
    fn arrangement_counts() {
        assert_eq!(arrangements(1, 0, 1).len(), 1);
        assert_eq!(arrangements(2, 0, 1).len(), 1);
        assert_eq!(arrangements(3, 0, 1).len(), 2);
        assert_eq!(arrangements(2, 0, 2).len(), 4);
    }

    #[test]
    fn example_x2_degree_one() {
        let p = polyak_basis(&x2(), 1, 1);
        assert_eq!(p.basis.len(), 8);
        assert_eq!(p.relation_rank, 6);
        assert_eq!(p.dim(), 2);
    }

    #[test]
    fn degenerate_cases() {
        assert_eq!(polyak_basis(&Biquandle::trivial(1), 1, 1).dim(), 0);
        let p = polyak_basis(&Biquandle::trivial(2), 1, 1);
        assert_eq!((p.relation_rank, p.dim()), (6, 2));
    }

    #[test]
    fn generators_are_orthogonal_to_basis() {
        for b in [x2(), Biquandle::trivial(2), Biquandle::dihedral(3)] {
            let p = polyak_basis(&b, 1, 1);
            for g in relation_generators(&b, 1, 1) {
                for a in p.elements() {
                    assert_eq!(crate::arrow::inner_product(&a, &g.element), 0);
                }
            }
        }
    }

    #[test]
    fn invariance_small() {
        let p = polyak_basis(&x2(), 1, 1);
        let r = verify_invariance(&p, 200, 7);
        assert!(r.failures.is_empty(), "{:?}", r.failures.first());
    }

    #[test]
    fn x2_trefoil_vs_stabilized() {
        let p = polyak_basis(&x2(), 1, 1);
        let table = CrossingTable::new(&x2());
        let k = parse_gauss_code("O1+U2+U1+O2+").unwrap();
        let mv = Move::R2Insert { over: (0, 0), under: (0, 2), parallel: true, first_sign: Sign::Positive, under_first: false };
        for f in enumerate_labelings(&k, &x2()) {
            let (k2, f2) = crate::labeling::apply_move_labeled(&k, &table, &f, &mv).unwrap();
            for a in p.elements() {
                assert_eq!(
                    pair_with_expansion(&a, &labeled_diagram(&k, &f), 1),
                    pair_with_expansion(&a, &labeled_diagram(&k2, &f2), 1)
                );
            }
        }
    }
}
