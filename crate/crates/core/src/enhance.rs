//! Enhanced counting invariants: each labeling contributes `u^e`, where
//! `e` pairs a Polyak vector with the labeled diagram.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::arrow::{labeled_diagram, pair_with_expansion, AlgebraElement};
use crate::biquandle::Biquandle;
use crate::gauss::{braid_closure, parse_gauss_code, GaussDiagram};
use crate::labeling::enumerate_labelings;
use crate::polyak::{random_diagram, PolyakBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnhanceError {
    #[error("element lives on {element} components but the diagram has {diagram}")]
    ComponentMismatch { element: usize, diagram: usize },
    #[error("expected a one-component diagram, got {0} components")]
    NotAKnot(usize),
    #[error("component {index} out of range for a diagram with {components} components")]
    BadComponent { index: usize, components: usize },
    #[error("linking number needs two distinct components")]
    SameComponent,
}

/// The multiset of exponents, one per labeling, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EnhancementValue {
    exponents: Vec<i64>,
}

impl EnhancementValue {
    pub fn from_exponents(mut exponents: Vec<i64>) -> Self {
        exponents.sort_unstable();
        EnhancementValue { exponents }
    }

    pub fn from_polynomial(poly: &BTreeMap<i64, usize>) -> Self {
        let exponents = poly.iter().flat_map(|(&e, &c)| std::iter::repeat_n(e, c)).collect();
        EnhancementValue { exponents }
    }

    pub fn multiset(&self) -> &[i64] {
        &self.exponents
    }

    /// Exponent to coefficient.
    pub fn polynomial(&self) -> BTreeMap<i64, usize> {
        let mut p = BTreeMap::new();
        for &e in &self.exponents {
            *p.entry(e).or_insert(0) += 1;
        }
        p
    }

    /// The plain counting invariant.
    pub fn counting(&self) -> usize {
        self.exponents.len()
    }

    /// True when some labeling pairs to a nonzero value.
    pub fn has_nonzero_exponent(&self) -> bool {
        self.exponents.iter().any(|&e| e != 0)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "counting": self.counting(),
            "multiset": self.exponents,
            "polynomial": self.to_string(),
        })
    }
}

impl fmt::Display for EnhancementValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.polynomial();
        if p.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = p
            .iter()
            .map(|(&e, &c)| {
                let coeff = if c == 1 && e != 0 { String::new() } else { c.to_string() };
                match e {
                    0 => coeff,
                    1 => format!("{coeff}u"),
                    _ => format!("{coeff}u^{e}"),
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Pairs `a` with the degree `n` expansion of every labeling of `d`.
pub fn enhancement(
    d: &GaussDiagram,
    b: &Biquandle,
    a: &AlgebraElement,
    n: usize,
) -> Result<EnhancementValue, EnhanceError> {
    if let Some(c) = a.components() {
        if c != d.num_components() {
            return Err(EnhanceError::ComponentMismatch { element: c, diagram: d.num_components() });
        }
    }
    let exps = enumerate_labelings(d, b)
        .iter()
        .map(|f| pair_with_expansion(a, &labeled_diagram(d, f), n))
        .collect();
    Ok(EnhancementValue::from_exponents(exps))
}

/// Signed count of arrows with an odd number of endpoints strictly between
/// their two ends.
pub fn parity_oracle(d: &GaussDiagram) -> Result<i64, EnhanceError> {
    if d.num_components() != 1 {
        return Err(EnhanceError::NotAKnot(d.num_components()));
    }
    Ok((0..d.num_arrows())
        .filter(|&a| d.endpoints_between(a).is_some_and(|k| k % 2 == 1))
        .map(|a| d.arrow(a).value())
        .sum())
}

/// Directed linking numbers between two components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkingNumber {
    /// Signed count of arrows with tail on the first component, head on the second.
    pub forward: i64,
    pub backward: i64,
}

impl LinkingNumber {
    /// `forward + backward`, twice the symmetric linking number.
    pub fn doubled(&self) -> i64 {
        self.forward + self.backward
    }

    pub fn is_integral(&self) -> bool {
        self.doubled() % 2 == 0
    }
}

impl fmt::Display for LinkingNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.doubled() / 2)
        } else {
            write!(f, "{}/2", self.doubled())
        }
    }
}

pub fn linking_number(d: &GaussDiagram, i: usize, j: usize) -> Result<LinkingNumber, EnhanceError> {
    let c = d.num_components();
    for index in [i, j] {
        if index >= c {
            return Err(EnhanceError::BadComponent { index, components: c });
        }
    }
    if i == j {
        return Err(EnhanceError::SameComponent);
    }
    Ok(LinkingNumber { forward: d.directed_linking(i, j), backward: d.directed_linking(j, i) })
}

/// Searches small integer combinations of the basis vectors, by increasing
/// size, for one whose enhancement agrees with `target` on every probe.
pub fn find_element(
    p: &PolyakBasis,
    probes: &[GaussDiagram],
    target: &dyn Fn(&GaussDiagram) -> EnhancementValue,
) -> Option<AlgebraElement> {
    let dim = p.dim();
    if dim == 0 || dim > 6 {
        return None;
    }
    let expected: Vec<EnhancementValue> = probes.iter().map(target).collect();
    let mut coeffs: Vec<Vec<i64>> = itertools::Itertools::multi_cartesian_product((0..dim).map(|_| -2i64..=2))
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect();
    coeffs.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.iter().map(|x| -x).collect::<Vec<_>>()));
    let elems = p.elements();
    coeffs.into_iter().find_map(|v| {
        let mut a = AlgebraElement::new();
        for (e, &k) in elems.iter().zip(&v) {
            a.add(e, k);
        }
        probes
            .iter()
            .zip(&expected)
            .all(|(d, want)| enhancement(d, &p.biquandle, &a, p.degree).ok().as_ref() == Some(want))
            .then_some(a)
    })
}

fn random_probes(seed: u64, count: usize, c: usize) -> Vec<GaussDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_diagram(&mut rng, 1 + i % 5, c)).collect()
}

/// The vector whose enhancement on every labeling is `u^(P-N)` with
/// `P - N` the signed count of odd arrows. Only exists for some biquandles.
pub fn parity_element(p: &PolyakBasis) -> Option<AlgebraElement> {
    if p.components != 1 {
        return None;
    }
    let mut probes = vec![parse_gauss_code("O1+U2+U1+O2+").expect("valid code"), braid_closure(2, &[1, 1, 1])];
    probes.extend(random_probes(7, 24, 1));
    let b = &p.biquandle;
    find_element(p, &probes, &|d| {
        let e = parity_oracle(d).expect("one component");
        EnhancementValue::from_exponents(vec![e; enumerate_labelings(d, b).len()])
    })
}

/// Signed sum of the one-arrow diagrams joining two different components
/// whose over and under strands carry different labels. Returned only when
/// it lies in `p`; its enhancement then counts differently colored
/// component pairs weighted by `u^(2 lk)`.
pub fn linking_element(p: &PolyakBasis) -> Option<AlgebraElement> {
    if p.components != 2 {
        return None;
    }
    let mut a = AlgebraElement::new();
    for d in p.basis.diagrams() {
        if d.num_arrows() != 1 {
            continue;
        }
        let arrow = d.arrow(0);
        if d.tail(0).0 != d.head(0).0 && arrow.labels.over_in != arrow.labels.under_in {
            a.add_term(d.clone(), arrow.sign.value());
        }
    }
    (!a.is_empty() && p.contains(&a)).then_some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyak::polyak_basis;

    fn x1() -> Biquandle {
        Biquandle::trivial(2)
    }

    fn x2() -> Biquandle {
        Biquandle::constant_action(&[1, 0]).unwrap()
    }

    #[test]
    fn rendering() {
        let v = EnhancementValue::from_exponents(vec![2, 0, 2, 0]);
        assert_eq!(v.to_string(), "2 + 2u^2");
        assert_eq!(EnhancementValue::from_exponents(vec![-1, 1, 0]).to_string(), "u^-1 + 1 + u");
        assert_eq!(EnhancementValue::from_exponents(vec![]).to_string(), "0");
        assert_eq!(EnhancementValue::from_polynomial(&v.polynomial()), v);
        assert_eq!(v.counting(), 4);
    }

    #[test]
    fn parity_oracle_values() {
        assert_eq!(parity_oracle(&parse_gauss_code("O1+U2+U1+O2+").unwrap()), Ok(2));
        assert_eq!(parity_oracle(&braid_closure(2, &[1, 1, 1])), Ok(0));
        assert_eq!(parity_oracle(&parse_gauss_code("O1-U2-O3+U1-O2-U3+").unwrap()), Ok(0));
        assert!(parity_oracle(&parse_gauss_code("U1+;O1+").unwrap()).is_err());
    }

    #[test]
    fn linking_values() {
        let vh = parse_gauss_code("U1+;O1+").unwrap();
        let lk = linking_number(&vh, 0, 1).unwrap();
        assert_eq!((lk.forward, lk.backward), (0, 1));
        assert_eq!(lk.to_string(), "1/2");
        assert_eq!(linking_number(&braid_closure(2, &[1, 1]), 0, 1).unwrap().to_string(), "1");
        assert!(linking_number(&vh, 0, 0).is_err());
        assert!(linking_number(&vh, 0, 2).is_err());
        let promoted = parse_gauss_code("O1+U2+U1+O2+").unwrap().with_empty_circles(1);
        assert_eq!(linking_number(&promoted, 0, 1).unwrap().doubled(), 0);
    }

    #[test]
    fn x2_parity_element() {
        let p = polyak_basis(&x2(), 1, 1);
        let a = parity_element(&p).expect("parity element");
        assert!(p.contains(&a));
        let b = x2();
        let vt = parse_gauss_code("O1+U2+U1+O2+").unwrap();
        assert_eq!(enhancement(&vt, &b, &a, 1).unwrap().to_string(), "2u^2");
        assert_eq!(enhancement(&GaussDiagram::empty(1), &b, &a, 1).unwrap().to_string(), "2");
    }

    #[test]
    fn x1_linking_element() {
        let p = polyak_basis(&x1(), 1, 2);
        let l = linking_element(&p).expect("linking element");
        assert!(p.contains(&l));
        let hopf = braid_closure(2, &[1, 1]);
        assert_eq!(enhancement(&hopf, &x1(), &l, 1).unwrap().to_string(), "2 + 2u^2");
        let err = enhancement(&parse_gauss_code("O1+U1+").unwrap(), &x1(), &l, 1);
        assert_eq!(err, Err(EnhanceError::ComponentMismatch { element: 2, diagram: 1 }));
    }

    #[test]
    fn trivial_biquandle_has_no_parity_element() {
        assert!(parity_element(&polyak_basis(&Biquandle::trivial(1), 1, 1)).is_none());
    }
}
