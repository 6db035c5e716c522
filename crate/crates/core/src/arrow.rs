//! Locally labeled arrow diagrams and the free abelian group they span.
//!
//! Each arrow carries a sign and the four labels of its crossing, which must
//! satisfy the crossing rule on their own. Labels of different arrows need
//! not agree along the circles: subdiagrams of a labeled knot are only
//! locally labeled.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::biquandle::Biquandle;
use crate::gauss::{Crossing, Decoration, Diagram, End, GaussDiagram, JsonDecoration, Sign, Slot};
use crate::labeling::crossing_labels;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledArrow {
    pub sign: Sign,
    pub labels: Crossing<usize>,
}

impl Decoration for LabeledArrow {
    fn sign(&self) -> Sign {
        self.sign
    }
}

impl JsonDecoration for LabeledArrow {
    /// `[over_in, over_out, under_in, under_out]`, 1-based.
    type Labels = [usize; 4];

    fn to_json(&self) -> (Sign, Option<[usize; 4]>) {
        let l = self.labels;
        (self.sign, Some([l.over_in + 1, l.over_out + 1, l.under_in + 1, l.under_out + 1]))
    }

    fn from_json(sign: Sign, labels: Option<[usize; 4]>) -> Result<Self, String> {
        let l = labels.ok_or("labeled arrow without labels")?;
        if l.contains(&0) {
            return Err("labels are 1-based".into());
        }
        Ok(LabeledArrow {
            sign,
            labels: Crossing {
                over_in: l[0] - 1,
                over_out: l[1] - 1,
                under_in: l[2] - 1,
                under_out: l[3] - 1,
            },
        })
    }
}

impl LabeledArrow {
    /// Completes a crossing from its two incoming labels.
    pub fn from_inputs(b: &Biquandle, sign: Sign, over_in: usize, under_in: usize) -> Self {
        let (under_out, over_out) = b.crossing_outputs(sign, under_in, over_in);
        LabeledArrow {
            sign,
            labels: Crossing {
                over_in,
                over_out,
                under_in,
                under_out,
            },
        }
    }

    /// Completes a crossing from its two outgoing labels.
    pub fn from_outputs(b: &Biquandle, sign: Sign, over_out: usize, under_out: usize) -> Self {
        let (under_in, over_in) = b.crossing_inputs(sign, under_out, over_out);
        LabeledArrow {
            sign,
            labels: Crossing {
                over_in,
                over_out,
                under_in,
                under_out,
            },
        }
    }

    pub fn is_valid(&self, b: &Biquandle) -> bool {
        let l = self.labels;
        b.crossing_outputs(self.sign, l.under_in, l.over_in) == (l.under_out, l.over_out)
    }

    /// Every valid labeled arrow: both signs, all incoming pairs.
    pub fn all(b: &Biquandle) -> Vec<LabeledArrow> {
        let n = b.size();
        let mut out = Vec::with_capacity(2 * n * n);
        for sign in Sign::BOTH {
            for o in 0..n {
                for u in 0..n {
                    out.push(LabeledArrow::from_inputs(b, sign, o, u));
                }
            }
        }
        out.sort();
        out
    }
}

pub type LabeledArrowDiagram = Diagram<LabeledArrow>;

/// Sparse integer combination of canonical labeled arrow diagrams.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraElement {
    terms: BTreeMap<LabeledArrowDiagram, i64>,
}

impl AlgebraElement {
    pub fn new() -> Self {
        Self::default()
    }

    /// `coeff * d`, with `d` canonicalized.
    pub fn term(d: &LabeledArrowDiagram, coeff: i64) -> Self {
        let mut e = Self::new();
        e.add_term(d.canonical(), coeff);
        e
    }

    /// Adds `coeff` times an already canonical diagram.
    pub fn add_term(&mut self, d: LabeledArrowDiagram, coeff: i64) {
        if coeff == 0 {
            return;
        }
        debug_assert!(d.is_canonical());
        let entry = self.terms.entry(d);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn add(&mut self, other: &AlgebraElement, scale: i64) {
        for (d, &c) in &other.terms {
            self.add_term(d.clone(), c * scale);
        }
    }

    pub fn scaled(&self, k: i64) -> AlgebraElement {
        let mut out = AlgebraElement::new();
        out.add(self, k);
        out
    }

    pub fn coeff(&self, d: &LabeledArrowDiagram) -> i64 {
        self.terms.get(d).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LabeledArrowDiagram, i64)> {
        self.terms.iter().map(|(d, &c)| (d, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops terms with more than `n` arrows.
    pub fn truncated(&self, n: usize) -> AlgebraElement {
        AlgebraElement {
            terms: self.terms.iter().filter(|(d, _)| d.num_arrows() <= n).map(|(d, &c)| (d.clone(), c)).collect(),
        }
    }

    /// Divides by the gcd of the coefficients and makes the leading
    /// coefficient positive.
    pub fn normalized(&self) -> AlgebraElement {
        let g = self.terms.values().fold(0i64, |g, &c| num_integer::gcd(g, c));
        if g == 0 {
            return self.clone();
        }
        let lead = *self.terms.values().next().unwrap();
        let g = if lead < 0 { -g } else { g };
        AlgebraElement {
            terms: self.terms.iter().map(|(d, &c)| (d.clone(), c / g)).collect(),
        }
    }

    /// Number of components of the diagrams (`None` when empty or mixed).
    pub fn components(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|d| d.num_components());
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(d, c)| serde_json::json!({"diagram": d.to_json_value(), "coeff": c}))
                .collect(),
        )
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<AlgebraElement, String> {
        let items = v.as_array().ok_or("an algebra element is a JSON list")?;
        let mut out = AlgebraElement::new();
        for item in items {
            let d = LabeledArrowDiagram::from_json_value(&item["diagram"]).map_err(|e| e.to_string())?;
            let c = item["coeff"].as_i64().ok_or("coeff must be an integer")?;
            out.add_term(d.canonical(), c);
        }
        Ok(out)
    }
}

/// `<a, b>`: diagrams form an orthonormal basis.
pub fn inner_product(a: &AlgebraElement, b: &AlgebraElement) -> i64 {
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.terms().map(|(d, c)| c * big.coeff(d)).sum()
}

/// The labeled arrow diagram of a labeled Gauss diagram.
pub fn labeled_diagram(d: &GaussDiagram, f: &[usize]) -> LabeledArrowDiagram {
    let labels = crossing_labels(d, f);
    d.map(|a, &sign| LabeledArrow { sign, labels: labels[a] })
}

/// Calls `visit` with every arrow subset of size at most `n` (as a mask).
pub fn for_each_subset(m: usize, n: usize, visit: &mut dyn FnMut(&[bool])) {
    fn rec(i: usize, left: usize, mask: &mut Vec<bool>, visit: &mut dyn FnMut(&[bool])) {
        if i == mask.len() {
            visit(mask);
            return;
        }
        rec(i + 1, left, mask, visit);
        if left > 0 {
            mask[i] = true;
            rec(i + 1, left - 1, mask, visit);
            mask[i] = false;
        }
    }
    rec(0, n, &mut vec![false; m], visit);
}

/// Sum of the canonical labeled subdiagrams with at most `n` arrows,
/// including the empty one.
pub fn expand(d: &GaussDiagram, f: &[usize], n: usize) -> AlgebraElement {
    expand_labeled(&labeled_diagram(d, f), n)
}

pub fn expand_labeled(ld: &LabeledArrowDiagram, n: usize) -> AlgebraElement {
    let mut out = AlgebraElement::new();
    for_each_subset(ld.num_arrows(), n, &mut |mask| {
        out.add_term(ld.subdiagram(mask).canonical(), 1);
    });
    out
}

/// `<a, expand(d, f, n)>` without building the expansion.
pub fn pair_with_expansion(a: &AlgebraElement, ld: &LabeledArrowDiagram, n: usize) -> i64 {
    let mut total = 0;
    for_each_subset(ld.num_arrows(), n, &mut |mask| {
        total += a.coeff(&ld.subdiagram(mask).canonical());
    });
    total
}

/// Canonical arrangements of `m` arrows on `c` circles, every arrow carrying
/// the placeholder decoration `Sign::Positive`.
pub fn skeletons(m: usize, c: usize) -> Vec<GaussDiagram> {
    fn rec(i: usize, m: usize, circles: &mut Vec<Vec<Slot>>, out: &mut BTreeSet<GaussDiagram>) {
        if i == 2 * m {
            let d = Diagram::new(circles.clone(), vec![Sign::Positive; m]).expect("complete arrangement");
            out.insert(d.canonical());
            return;
        }
        let slot = Slot {
            arrow: i / 2,
            end: if i.is_multiple_of(2) { End::Tail } else { End::Head },
        };
        for ci in 0..circles.len() {
            // Cyclic order: inserting at position 0 of a nonempty circle is
            // the same as appending, so skip it.
            let len = circles[ci].len();
            let start = if len == 0 { 0 } else { 1 };
            for p in start..=len {
                circles[ci].insert(p, slot);
                rec(i + 1, m, circles, out);
                circles[ci].remove(p);
            }
        }
    }
    let mut out = BTreeSet::new();
    rec(0, m, &mut vec![Vec::new(); c], &mut out);
    out.into_iter().collect()
}

/// Ordered distinguished basis of the truncated algebra: canonical locally
/// labeled diagrams with `1..=n` arrows on `c` circles.
#[derive(Clone, Debug)]
pub struct Basis {
    diagrams: Vec<LabeledArrowDiagram>,
    index: HashMap<LabeledArrowDiagram, usize>,
}

impl Basis {
    pub fn new(b: &Biquandle, n: usize, c: usize) -> Basis {
        Basis::from_diagrams(enumerate_basis(b, n, c))
    }

    pub fn from_diagrams(diagrams: Vec<LabeledArrowDiagram>) -> Basis {
        let index = diagrams.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
        Basis { diagrams, index }
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    pub fn diagrams(&self) -> &[LabeledArrowDiagram] {
        &self.diagrams
    }

    pub fn index_of(&self, d: &LabeledArrowDiagram) -> Option<usize> {
        self.index.get(d).copied()
    }

    /// Coordinates of an element; terms outside the basis (such as the empty
    /// diagram) are dropped.
    pub fn coordinates(&self, e: &AlgebraElement) -> Vec<(usize, i64)> {
        let mut v: Vec<(usize, i64)> = e.terms().filter_map(|(d, c)| self.index_of(d).map(|i| (i, c))).collect();
        v.sort_unstable();
        v
    }

    pub fn element(&self, coords: &[i64]) -> AlgebraElement {
        let mut e = AlgebraElement::new();
        for (d, &c) in self.diagrams.iter().zip(coords) {
            e.add_term(d.clone(), c);
        }
        e
    }
}

/// All canonical locally labeled diagrams with between 1 and `n` arrows on
/// `c` circles, sorted.
pub fn enumerate_basis(b: &Biquandle, n: usize, c: usize) -> Vec<LabeledArrowDiagram> {
    let arrows = LabeledArrow::all(b);
    let mut out = BTreeSet::new();
    for m in 1..=n {
        for sk in skeletons(m, c) {
            let mut choice = vec![0usize; m];
            loop {
                let d = sk.map(|a, _| arrows[choice[a]]);
                out.insert(d.canonical());
                let mut i = 0;
                while i < m {
                    choice[i] += 1;
                    if choice[i] < arrows.len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == m {
                    break;
                }
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::parse_gauss_code;
    use crate::labeling::enumerate_labelings;

    fn x2() -> Biquandle {
        Biquandle::constant_action(&[1, 0]).unwrap()
    }

    #[test]
    fn completes_labels() {
        let a = LabeledArrow::from_inputs(&x2(), Sign::Positive, 0, 0);
        assert_eq!(a.labels, Crossing { over_in: 0, over_out: 1, under_in: 0, under_out: 1 });
        let x1 = Biquandle::trivial(2);
        for sign in Sign::BOTH {
            let a = LabeledArrow::from_inputs(&x1, sign, 0, 1);
            assert_eq!((a.labels.over_out, a.labels.under_out), (0, 1));
        }
        let fox = Biquandle::dihedral(3);
        for x in 0..3 {
            let a = LabeledArrow::from_inputs(&fox, Sign::Positive, x, x);
            assert_eq!(a.labels.under_out, fox.over(x, x));
            assert_eq!(a.labels.over_out, fox.under(x, x));
        }
        let z = Biquandle::alexander(5, 2, 3).unwrap();
        for a in LabeledArrow::all(&z) {
            assert!(a.is_valid(&z));
            let l = a.labels;
            assert_eq!(LabeledArrow::from_outputs(&z, a.sign, l.over_out, l.under_out), a);
        }
    }

    #[test]
    fn inner_products() {
        let b = Basis::new(&x2(), 1, 1);
        let (d, e) = (&b.diagrams()[0], &b.diagrams()[1]);
        let da = AlgebraElement::term(d, 1);
        assert_eq!(inner_product(&da, &da), 1);
        let mut lhs = AlgebraElement::term(d, 2);
        lhs.add_term(e.clone(), -1);
        let mut rhs = AlgebraElement::term(d, 1);
        rhs.add_term(e.clone(), 3);
        assert_eq!(inner_product(&lhs, &rhs), -1);
        assert_eq!(inner_product(&rhs, &lhs), -1);
    }

    #[test]
    fn unknot_expands_to_empty_diagram() {
        let u = parse_gauss_code("").unwrap();
        for n in 0..3 {
            let e = expand(&u, &[0], n);
            assert_eq!(inner_product(&e, &AlgebraElement::term(&Diagram::empty(1), 1)), 1);
            assert_eq!(e.len(), 1);
        }
    }

    #[test]
    fn virtual_trefoil_degree_one() {
        let k = parse_gauss_code("O1+U2+U1+O2+").unwrap();
        let b = x2();
        for f in enumerate_labelings(&k, &b) {
            let e = expand(&k, &f, 1);
            assert_eq!(e.len(), 3);
            assert!(e.terms().all(|(_, c)| c == 1));
            let ones: Vec<_> = e.terms().filter(|(d, _)| d.num_arrows() == 1).collect();
            assert!(ones.iter().all(|(d, _)| d.arrow(0).sign == Sign::Positive));
            assert!(ones.iter().all(|(d, _)| d.arrow(0).is_valid(&b)));
        }
    }

    #[test]
    fn full_expansion_has_all_subsets() {
        let k = parse_gauss_code("U1-O2-U3+O4+U2-O1-U4+O3+").unwrap();
        let b = Biquandle::dihedral(3);
        for f in enumerate_labelings(&k, &b) {
            let e = expand(&k, &f, 4);
            let total: i64 = e.terms().map(|(_, c)| c).sum();
            assert_eq!(total, 16);
        }
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(enumerate_basis(&x2(), 1, 1).len(), 8);
        assert_eq!(enumerate_basis(&Biquandle::trivial(1), 1, 1).len(), 2);
        // One arrow on two circles: on circle 1, on circle 2, or between
        // them in either direction.
        assert_eq!(enumerate_basis(&x2(), 1, 2).len(), 4 * 8);
        assert_eq!(skeletons(1, 1).len(), 1);
        assert_eq!(skeletons(2, 1).len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let b = Basis::new(&x2(), 2, 1);
        let e = b.element(&(0..b.len() as i64).map(|i| i % 3 - 1).collect::<Vec<_>>());
        let v = e.to_json_value();
        assert_eq!(AlgebraElement::from_json_value(&v).unwrap(), e);
    }
}
