//! Biquandle labelings of Gauss diagrams and the counting invariant.
//!
//! A labeling assigns an element to every semiarc (indexed as in
//! [`Diagram::semiarc_offsets`](crate::gauss::Diagram::semiarc_offsets)) so
//! that every crossing satisfies the rule of
//! [`Biquandle::crossing_outputs`].

use crate::biquandle::Biquandle;
use crate::gauss::{Crossing, Decoration, Diagram, GaussDiagram, GaussError, Move, Rewritten, Sign};

/// Element of each semiarc, 0-based.
pub type Labeling = Vec<usize>;

/// Valid crossing 4-tuples `[under_in, over_in, under_out, over_out]` for
/// each sign, indexed for completion from any two known positions.
#[derive(Clone, Debug)]
pub struct CrossingTable {
    n: usize,
    tuples: [Vec<[usize; 4]>; 2],
    /// `by_pair[sign][pair * n * n + x * n + y]`: tuples with value `x` at
    /// the pair's first position and `y` at its second.
    by_pair: [Vec<Vec<u32>>; 2],
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn sign_index(s: Sign) -> usize {
    match s {
        Sign::Positive => 0,
        Sign::Negative => 1,
    }
}

impl CrossingTable {
    pub fn new(b: &Biquandle) -> Self {
        let n = b.size();
        let build = |sign: Sign| {
            let mut tuples = Vec::with_capacity(n * n);
            for u in 0..n {
                for o in 0..n {
                    let (uo, oo) = b.crossing_outputs(sign, u, o);
                    tuples.push([u, o, uo, oo]);
                }
            }
            let mut by_pair = vec![Vec::new(); 6 * n * n];
            for (t, tup) in tuples.iter().enumerate() {
                for (pi, &(p, q)) in PAIRS.iter().enumerate() {
                    by_pair[pi * n * n + tup[p] * n + tup[q]].push(t as u32);
                }
            }
            (tuples, by_pair)
        };
        let (tp, bp) = build(Sign::Positive);
        let (tn, bn) = build(Sign::Negative);
        CrossingTable {
            n,
            tuples: [tp, tn],
            by_pair: [bp, bn],
        }
    }

    /// Tuples compatible with the known positions (`None` = unknown).
    fn candidates(&self, sign: Sign, known: &[Option<usize>; 4]) -> Candidates<'_> {
        let si = sign_index(sign);
        let fixed: Vec<usize> = (0..4).filter(|&i| known[i].is_some()).collect();
        if fixed.len() < 2 {
            return Candidates::Many;
        }
        let (p, q) = (fixed[0], fixed[1]);
        let pi = PAIRS.iter().position(|&pq| pq == (p, q)).expect("ordered pair");
        let list = &self.by_pair[si][pi * self.n * self.n + known[p].unwrap() * self.n + known[q].unwrap()];
        let mut found = None;
        for &t in list {
            let tup = &self.tuples[si][t as usize];
            if fixed[2..].iter().all(|&i| known[i] == Some(tup[i])) {
                if found.is_some() {
                    return Candidates::Many;
                }
                found = Some(tup);
            }
        }
        match found {
            None => Candidates::None,
            Some(t) => Candidates::One(t),
        }
    }
}

enum Candidates<'a> {
    None,
    One(&'a [usize; 4]),
    Many,
}

/// Constraint network of a diagram: semiarcs of each crossing in tuple
/// order, and the crossings touching each semiarc.
struct Network {
    signs: Vec<Sign>,
    cross: Vec<[usize; 4]>,
    touching: Vec<Vec<usize>>,
}

impl Network {
    fn new<A: Decoration>(d: &Diagram<A>) -> Self {
        let signs: Vec<Sign> = d.arrows().iter().map(Decoration::sign).collect();
        Network::from_parts(&signs, &d.crossing_semiarcs(), d.num_semiarcs())
    }

    fn from_parts(signs: &[Sign], cs: &[Crossing<usize>], semiarcs: usize) -> Self {
        let cross: Vec<[usize; 4]> = cs
            .iter()
            .map(|c: &Crossing<usize>| [c.under_in, c.over_in, c.under_out, c.over_out])
            .collect();
        let mut touching = vec![Vec::new(); semiarcs];
        for (a, c) in cross.iter().enumerate() {
            for &s in c {
                if !touching[s].contains(&a) {
                    touching[s].push(a);
                }
            }
        }
        Network {
            signs: signs.to_vec(),
            cross,
            touching,
        }
    }
}

struct Search<'a> {
    table: &'a CrossingTable,
    net: &'a Network,
    assign: Vec<Option<usize>>,
    trail: Vec<usize>,
}

impl Search<'_> {
    fn set(&mut self, s: usize, v: usize, queue: &mut Vec<usize>) {
        self.assign[s] = Some(v);
        self.trail.push(s);
        queue.extend(self.net.touching[s].iter().copied());
    }

    /// Forces labels through crossings with a unique completion. Returns
    /// false on a contradiction.
    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        while let Some(a) = queue.pop() {
            let sem = self.net.cross[a];
            let known = sem.map(|s| self.assign[s]);
            match self.table.candidates(self.net.signs[a], &known) {
                Candidates::None => return false,
                Candidates::Many => {}
                Candidates::One(tup) => {
                    for i in 0..4 {
                        match self.assign[sem[i]] {
                            Some(v) if v != tup[i] => return false,
                            Some(_) => {}
                            None => self.set(sem[i], tup[i], &mut queue),
                        }
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let s = self.trail.pop().unwrap();
            self.assign[s] = None;
        }
    }

    fn run(&mut self, visit: &mut dyn FnMut(&[usize])) {
        match self.assign.iter().position(Option::is_none) {
            None => {
                // Crossings with fewer than two fixed ends were never
                // checked; with everything assigned, check all.
                let full: Vec<usize> = self.assign.iter().map(|v| v.unwrap()).collect();
                let ok = (0..self.net.cross.len()).all(|a| {
                    let known = self.net.cross[a].map(|s| Some(full[s]));
                    matches!(self.table.candidates(self.net.signs[a], &known), Candidates::One(_))
                });
                if ok {
                    visit(&full);
                }
            }
            Some(s) => {
                for v in 0..self.table.n {
                    let mark = self.trail.len();
                    let mut queue = Vec::new();
                    self.set(s, v, &mut queue);
                    if self.propagate(queue) {
                        self.run(visit);
                    }
                    self.undo(mark);
                }
            }
        }
    }
}

/// Calls `visit` on every labeling extending `fixed`, in lexicographic
/// order of the semiarc label vector.
pub fn for_each_labeling<A: Decoration>(
    d: &Diagram<A>,
    table: &CrossingTable,
    fixed: &[Option<usize>],
    visit: &mut dyn FnMut(&[usize]),
) {
    assert_eq!(fixed.len(), d.num_semiarcs(), "one entry per semiarc");
    search_network(&Network::new(d), table, fixed, visit);
}

/// Labelings of an arbitrary crossing network: `crossings[a]` names the
/// semiarcs around crossing `a`, whose sign is `signs[a]`. Semiarcs are
/// `0..fixed.len()`.
pub fn enumerate_network(
    signs: &[Sign],
    crossings: &[Crossing<usize>],
    table: &CrossingTable,
    fixed: &[Option<usize>],
) -> Vec<Labeling> {
    let mut out = Vec::new();
    let net = Network::from_parts(signs, crossings, fixed.len());
    search_network(&net, table, fixed, &mut |l| out.push(l.to_vec()));
    out
}

fn search_network(net: &Network, table: &CrossingTable, fixed: &[Option<usize>], visit: &mut dyn FnMut(&[usize])) {
    let mut search = Search {
        table,
        net,
        assign: vec![None; fixed.len()],
        trail: Vec::new(),
    };
    let mut queue = Vec::new();
    for (s, v) in fixed.iter().enumerate() {
        if let Some(v) = *v {
            if v >= table.n {
                return;
            }
            search.set(s, v, &mut queue);
        }
    }
    if search.propagate(queue) {
        search.run(visit);
    }
}

/// All labelings extending a partial assignment.
pub fn enumerate_constrained<A: Decoration>(
    d: &Diagram<A>,
    table: &CrossingTable,
    fixed: &[Option<usize>],
) -> Vec<Labeling> {
    let mut out = Vec::new();
    for_each_labeling(d, table, fixed, &mut |l| out.push(l.to_vec()));
    out
}

/// All labelings of `d` by `b`, in lexicographic order.
pub fn enumerate_labelings<A: Decoration>(d: &Diagram<A>, b: &Biquandle) -> Vec<Labeling> {
    enumerate_constrained(d, &CrossingTable::new(b), &vec![None; d.num_semiarcs()])
}

/// Number of labelings.
pub fn counting_invariant<A: Decoration>(d: &Diagram<A>, b: &Biquandle) -> usize {
    let mut count = 0;
    for_each_labeling(d, &CrossingTable::new(b), &vec![None; d.num_semiarcs()], &mut |_| count += 1);
    count
}

/// Whether `f` satisfies every crossing rule of `d`.
pub fn is_labeling<A: Decoration>(d: &Diagram<A>, b: &Biquandle, f: &[usize]) -> bool {
    f.len() == d.num_semiarcs()
        && f.iter().all(|&v| v < b.size())
        && d.crossing_semiarcs().iter().enumerate().all(|(a, c)| {
            b.crossing_outputs(d.arrow(a).sign(), f[c.under_in], f[c.over_in]) == (f[c.under_out], f[c.over_out])
        })
}

/// Labels at each crossing of a labeled diagram.
pub fn crossing_labels<A: Decoration>(d: &Diagram<A>, f: &[usize]) -> Vec<Crossing<usize>> {
    d.crossing_semiarcs()
        .iter()
        .map(|c| Crossing {
            over_in: f[c.over_in],
            over_out: f[c.over_out],
            under_in: f[c.under_in],
            under_out: f[c.under_out],
        })
        .collect()
}

/// `1:2 2:1 ...` with 1-based semiarcs and elements.
pub fn format_labeling(f: &[usize]) -> String {
    f.iter()
        .enumerate()
        .map(|(s, v)| format!("{}:{}", s + 1, v + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Carries a labeling through a rewrite: semiarcs that continue an old one
/// keep its label, new ones are solved for. `None` unless the extension
/// exists and is unique.
pub fn transport<A: Decoration>(
    rewritten: &Rewritten<A>,
    table: &CrossingTable,
    f: &[usize],
) -> Option<Labeling> {
    let fixed: Vec<Option<usize>> = rewritten.gap_source.iter().map(|s| s.map(|s| f[s])).collect();
    let mut found = None;
    let mut count = 0;
    for_each_labeling(&rewritten.diagram, table, &fixed, &mut |l| {
        count += 1;
        if found.is_none() {
            found = Some(l.to_vec());
        }
    });
    (count == 1).then(|| found.unwrap())
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MoveError {
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error("the labeling does not extend uniquely across the move")]
    NoTransport,
}

/// Applies a move to a labeled diagram.
pub fn apply_move_labeled(
    d: &GaussDiagram,
    table: &CrossingTable,
    f: &[usize],
    mv: &Move,
) -> Result<(GaussDiagram, Labeling), MoveError> {
    let r = d.apply_move(mv)?;
    let g = transport(&r, table, f).ok_or(MoveError::NoTransport)?;
    Ok((r.diagram, g))
}

/// One random legal move with its labeling carried along. Triangles are
/// taken whenever one exists and a coin flip says so; insertions are only
/// offered while the result stays within `max_arrows`.
pub fn random_labeled_step(
    rng: &mut impl rand::Rng,
    d: &GaussDiagram,
    f: &[usize],
    table: &CrossingTable,
    max_arrows: usize,
) -> (GaussDiagram, Labeling, Move) {
    use rand::seq::SliceRandom;
    let local = d.local_moves();
    let r3: Vec<&Move> = local.iter().filter(|m| matches!(m, Move::R3 { .. })).collect();
    let mv = if !r3.is_empty() && rng.gen_bool(0.5) {
        **r3.choose(rng).unwrap()
    } else {
        let m = d.num_arrows();
        let mut pool = local.clone();
        pool.extend(d.insertion_moves().into_iter().filter(|mv| match mv {
            Move::R1Insert { .. } => m < max_arrows,
            _ => m + 2 <= max_arrows,
        }));
        *pool.choose(rng).expect("insertions are always available below the bound")
    };
    let (d2, f2) = apply_move_labeled(d, table, f, &mv).expect("labelings extend across every move");
    (d2, f2, mv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{braid_closure, parse_gauss_code};

    fn d(code: &str) -> GaussDiagram {
        parse_gauss_code(code).unwrap()
    }

    fn x2() -> Biquandle {
        Biquandle::constant_action(&[1, 0]).unwrap()
    }

    #[test]
    fn fox_counts() {
        let fox = Biquandle::dihedral(3);
        assert_eq!(counting_invariant(&d(""), &fox), 3);
        assert_eq!(counting_invariant(&d("O1+U2+O3+U1+O2+U3+"), &fox), 9);
        assert_eq!(counting_invariant(&d("U1-O2-U3+O4+U2-O1-U4+O3+"), &fox), 3);
    }

    #[test]
    fn x2_counts() {
        assert_eq!(counting_invariant(&d("O1+U2+U1+O2+"), &x2()), 2);
        assert_eq!(counting_invariant(&d("U1+;O1+"), &x2()), 0);
        assert_eq!(counting_invariant(&braid_closure(2, &[1, 1]), &x2()), 4);
    }

    #[test]
    fn listing_is_lexicographic_and_valid() {
        let fox = Biquandle::dihedral(3);
        let t = d("O1+U2+O3+U1+O2+U3+");
        let all = enumerate_labelings(&t, &fox);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert!(all.iter().all(|f| is_labeling(&t, &fox, f)));
        assert_eq!(all[0], vec![0; 6]);
    }

    #[test]
    fn x1_labelings_are_monochromatic() {
        let x1 = Biquandle::trivial(2);
        for f in enumerate_labelings(&d("U1-O2-U3+O4+U2-O1-U4+O3+"), &x1) {
            assert!(f.iter().all(|&v| v == f[0]));
        }
    }

    #[test]
    fn constrained_enumeration() {
        let fox = Biquandle::dihedral(3);
        let t = d("O1+U2+O3+U1+O2+U3+");
        let table = CrossingTable::new(&fox);
        let mut fixed = vec![None; 6];
        fixed[0] = Some(1);
        let got = enumerate_constrained(&t, &table, &fixed);
        assert_eq!(got.len(), 3);
        assert!(got.iter().all(|f| f[0] == 1));
    }

    #[test]
    fn moves_carry_labelings() {
        let b = Biquandle::alexander(3, 1, 2).unwrap();
        let table = CrossingTable::new(&b);
        let k = d("O1+U2+U1+O2+");
        for f in enumerate_labelings(&k, &b) {
            for mv in k.insertion_moves() {
                let (k2, g) = apply_move_labeled(&k, &table, &f, &mv).unwrap();
                assert!(is_labeling(&k2, &b, &g));
                for back in k2.local_moves() {
                    let (k3, h) = apply_move_labeled(&k2, &table, &g, &back).unwrap();
                    assert!(is_labeling(&k3, &b, &h));
                }
            }
        }
    }

    #[test]
    fn format() {
        assert_eq!(format_labeling(&[0, 2, 1]), "1:1 2:3 3:2");
    }
}
