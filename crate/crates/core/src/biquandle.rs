//! Finite biquandles stored as a pair of operation tables.
//!
//! Elements are `0..n` in memory. Every text format (biquandle files, the
//! CLI, JSON labels) uses `1..=n`, matching the usual block-matrix notation
//! `[x^y | x_y]` with row `x` and column `y`.
//!
//! # Crossing convention
//!
//! At a positive crossing with under-strand input `x` and over-strand input
//! `y` the outputs are `x^y` (under) and `y_x` (over). A negative crossing is
//! the inverse relation: its outputs `(x', y')` are the unique pair whose
//! positive outputs are its inputs.
//!
//! The axioms checked by [`Biquandle::validate`] are exactly the conditions
//! under which labelings with this convention correspond bijectively across
//! every oriented Reidemeister move:
//!
//! * **kink**: for each `a` there is exactly one `u` with `a_u = u`, and
//!   it satisfies `u^a = a`; there is exactly one `o` with `a^o = o`, and it
//!   satisfies `o_a = a`.
//! * **invertibility**: `x ↦ x^y` and `y ↦ y_x` are bijections, and so is
//!   `S(x, y) = (y_x, x^y)`.
//! * **exchange**: for all `x, y, z`
//!   ```text
//!   (x^{z_y})^{(y^z)}       = (x^y)^z
//!   (y^z)_{(x^{z_y})}       = (y_x)^{(z_{x^y})}
//!   (z_y)_x                 = (z_{x^y})_{(y_x)}
//!   ```
//!   which is the braid relation for three strands labeled `x`, `y`, `z`
//!   from bottom to top.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::gauss::Sign;

/// The axiom family a violation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Kink,
    Invertibility,
    Exchange,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Kink => "kink axiom",
            Axiom::Invertibility => "invertibility axiom",
            Axiom::Exchange => "exchange axiom",
        })
    }
}

/// One failed instance of an axiom. `witness` holds 0-based elements; it is
/// displayed 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.witness.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "{} at ({}): {}", self.axiom, w.join(", "), self.detail)
    }
}

#[derive(Debug, Error)]
pub enum BiquandleError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("row {row}: expected {expected} entries, found {found}")]
    Dimension {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry {value} at row {row}, column {col} is outside 1..={size}")]
    OutOfRange {
        row: usize,
        col: usize,
        value: i64,
        size: usize,
    },
    #[error("{} axiom violation(s), first: {}", .0.len(), .0[0])]
    Axioms(Vec<AxiomViolation>),
    #[error("{value} is not a unit modulo {modulus}")]
    NotUnit { value: i64, modulus: usize },
    #[error("not a permutation of 1..={0}")]
    NotPermutation(usize),
    #[error("not a group: {0}")]
    NotGroup(String),
    #[error("a biquandle needs at least one element")]
    Empty,
}

/// A finite biquandle. Immutable once constructed; every constructor
/// validates the axioms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Biquandle {
    size: usize,
    over: Vec<usize>,
    under: Vec<usize>,
    /// `s_inv[u * n + v] = (x, y)` with `S(x, y) = (u, v)`.
    s_inv: Vec<(usize, usize)>,
}

impl fmt::Debug for Biquandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Biquandle({})", self.to_text().trim_end().replace('\n', "; "))
    }
}

impl Biquandle {
    /// Builds and validates a biquandle from row-major tables with 0-based
    /// entries: `over[x * n + y] = x^y`, `under[x * n + y] = x_y`.
    pub fn from_tables(
        size: usize,
        over: Vec<usize>,
        under: Vec<usize>,
    ) -> Result<Self, BiquandleError> {
        if size == 0 {
            return Err(BiquandleError::Empty);
        }
        for (table, vals) in [(&over, "x^y"), (&under, "x_y")] {
            if table.len() != size * size {
                return Err(BiquandleError::Parse {
                    line: 0,
                    msg: format!("{vals} table has {} entries, expected {}", table.len(), size * size),
                });
            }
            if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(BiquandleError::OutOfRange {
                    row: i / size + 1,
                    col: i % size + 1,
                    value: v as i64 + 1,
                    size,
                });
            }
        }
        let violations = check_axioms(size, &over, &under);
        if !violations.is_empty() {
            return Err(BiquandleError::Axioms(violations));
        }
        let mut s_inv = vec![(0, 0); size * size];
        for x in 0..size {
            for y in 0..size {
                let (u, v) = (under[y * size + x], over[x * size + y]);
                s_inv[u * size + v] = (x, y);
            }
        }
        Ok(Biquandle {
            size,
            over,
            under,
            s_inv,
        })
    }

    /// Checks the three axiom families on raw tables, returning every
    /// violation found (empty when the tables form a biquandle).
    pub fn validate(size: usize, over: &[usize], under: &[usize]) -> Vec<AxiomViolation> {
        check_axioms(size, over, under)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `x^y`.
    #[inline]
    pub fn over(&self, x: usize, y: usize) -> usize {
        self.over[x * self.size + y]
    }

    /// `x_y`.
    #[inline]
    pub fn under(&self, x: usize, y: usize) -> usize {
        self.under[x * self.size + y]
    }

    /// The unique `(x, y)` with `S(x, y) = (y_x, x^y) = (u, v)`.
    #[inline]
    pub fn invert_s(&self, u: usize, v: usize) -> (usize, usize) {
        self.s_inv[u * self.size + v]
    }

    /// Outputs `(under_out, over_out)` of a crossing from its inputs.
    #[inline]
    pub fn crossing_outputs(&self, sign: Sign, under_in: usize, over_in: usize) -> (usize, usize) {
        match sign {
            Sign::Positive => (self.over(under_in, over_in), self.under(over_in, under_in)),
            Sign::Negative => {
                let (x, y) = self.invert_s(over_in, under_in);
                (x, y)
            }
        }
    }

    /// Inputs `(under_in, over_in)` of a crossing from its outputs.
    #[inline]
    pub fn crossing_inputs(&self, sign: Sign, under_out: usize, over_out: usize) -> (usize, usize) {
        self.crossing_outputs(sign.flip(), under_out, over_out)
    }

    /// Whether `y_x = y` for all `x, y`.
    pub fn is_quandle(&self) -> bool {
        (0..self.size).all(|x| (0..self.size).all(|y| self.under(y, x) == y))
    }

    /// The trivial biquandle on `n` elements: `x^y = x_y = x`.
    pub fn trivial(n: usize) -> Self {
        let t: Vec<usize> = (0..n * n).map(|i| i / n).collect();
        Self::from_tables(n, t.clone(), t).expect("trivial biquandle")
    }

    /// The dihedral quandle `x^y = 2y - x (mod n)`; its labelings are Fox
    /// `n`-colorings.
    pub fn dihedral(n: usize) -> Self {
        let over = (0..n * n).map(|i| (2 * (i % n) + n - i / n) % n).collect();
        let under = (0..n * n).map(|i| i / n).collect();
        Self::from_tables(n, over, under).expect("dihedral quandle")
    }

    /// Alexander biquandle on `Z_m`: `x^y = t x + (1 - s^{-1} t) y`,
    /// `x_y = s^{-1} x`.
    pub fn alexander(m: usize, t: i64, s: i64) -> Result<Self, BiquandleError> {
        if m == 0 {
            return Err(BiquandleError::Empty);
        }
        let mi = m as i64;
        let t = t.rem_euclid(mi);
        let s = s.rem_euclid(mi);
        if inverse_mod(t, mi).is_none() {
            return Err(BiquandleError::NotUnit { value: t, modulus: m });
        }
        let s_inv = inverse_mod(s, mi).ok_or(BiquandleError::NotUnit { value: s, modulus: m })?;
        let c = (1 - s_inv * t).rem_euclid(mi);
        let mut over = Vec::with_capacity(m * m);
        let mut under = Vec::with_capacity(m * m);
        for x in 0..mi {
            for y in 0..mi {
                over.push(((t * x + c * y).rem_euclid(mi)) as usize);
                under.push(((s_inv * x).rem_euclid(mi)) as usize);
            }
        }
        Self::from_tables(m, over, under)
    }

    /// Constant action biquandle of a permutation `sigma` (0-based images):
    /// `x^y = sigma(x)`, `x_y = sigma^{-1}(x)`.
    pub fn constant_action(sigma: &[usize]) -> Result<Self, BiquandleError> {
        let n = sigma.len();
        let inv = invert_permutation(sigma).ok_or(BiquandleError::NotPermutation(n))?;
        let over = (0..n * n).map(|i| sigma[i / n]).collect();
        let under = (0..n * n).map(|i| inv[i / n]).collect();
        Self::from_tables(n, over, under)
    }

    /// `k`-fold conjugation quandle of a group given by its Cayley table
    /// (`table[a][b] = a * b`, 0-based): `x^y = y^{-k} x y^k`, `x_y = x`.
    pub fn conjugation(table: &[Vec<usize>], k: i64) -> Result<Self, BiquandleError> {
        let g = Group::from_cayley(table)?;
        let n = g.order();
        let mut over = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let yk = g.pow(y, k);
                over.push(g.mul(g.mul(g.inv(yk), x), yk));
            }
        }
        let under = (0..n * n).map(|i| i / n).collect();
        Self::from_tables(n, over, under)
    }

    /// Parses the block-matrix text format: an optional header line `n`,
    /// then `n` rows of `2n` integers in `1..=n` (left block `x^y`, right
    /// block `x_y`). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, BiquandleError> {
        let mut rows: Vec<(usize, Vec<i64>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<i64>().map_err(|_| BiquandleError::Parse {
                        line: i + 1,
                        msg: format!("not an integer: {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((i + 1, vals));
        }
        let declared = match rows.first() {
            Some((line, v)) if v.len() == 1 => {
                let n = v[0];
                if n < 1 {
                    return Err(BiquandleError::Parse {
                        line: *line,
                        msg: format!("size must be positive, got {n}"),
                    });
                }
                rows.remove(0);
                Some(n as usize)
            }
            _ => None,
        };
        let n = declared.unwrap_or(rows.len());
        if n == 0 {
            return Err(BiquandleError::Empty);
        }
        if rows.len() != n {
            return Err(BiquandleError::Parse {
                line: rows.last().map(|r| r.0).unwrap_or(1),
                msg: format!("expected {n} rows, found {}", rows.len()),
            });
        }
        let mut over = Vec::with_capacity(n * n);
        let mut under = Vec::with_capacity(n * n);
        for (r, (_, vals)) in rows.iter().enumerate() {
            if vals.len() != 2 * n {
                return Err(BiquandleError::Dimension {
                    row: r + 1,
                    expected: 2 * n,
                    found: vals.len(),
                });
            }
            for (c, &v) in vals.iter().enumerate() {
                if v < 1 || v > n as i64 {
                    return Err(BiquandleError::OutOfRange {
                        row: r + 1,
                        col: c + 1,
                        value: v,
                        size: n,
                    });
                }
                let e = (v - 1) as usize;
                if c < n {
                    over.push(e);
                } else {
                    under.push(e);
                }
            }
        }
        Self::from_tables(n, over, under)
    }

    /// Serializes to the block-matrix format with a size header.
    pub fn to_text(&self) -> String {
        let n = self.size;
        let mut out = format!("{n}\n");
        for x in 0..n {
            let row: Vec<String> = (0..n)
                .map(|y| self.over(x, y))
                .chain((0..n).map(|y| self.under(x, y)))
                .map(|v| (v + 1).to_string())
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Applies a relabeling `perm` (element `x` becomes `perm[x]`).
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let n = self.size;
        let inv = invert_permutation(perm).expect("relabeling must be a permutation");
        let mut over = vec![0; n * n];
        let mut under = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                over[x * n + y] = perm[self.over(inv[x], inv[y])];
                under[x * n + y] = perm[self.under(inv[x], inv[y])];
            }
        }
        Self::from_tables(n, over, under).expect("relabeling preserves the axioms")
    }

    /// Lexicographically smallest `(over, under)` table pair over all
    /// relabelings; equal for isomorphic biquandles.
    pub fn isomorphism_key(&self) -> (Vec<usize>, Vec<usize>) {
        use itertools::Itertools;
        (0..self.size)
            .permutations(self.size)
            .map(|p| {
                let r = self.relabeled(&p);
                (r.over, r.under)
            })
            .min()
            .expect("at least one permutation")
    }

    /// Every biquandle on `n` elements, exhaustively (feasible for `n <= 3`).
    /// Tables are searched with bijective columns only, which the invertibility axiom
    /// forces anyway.
    pub fn enumerate_all(n: usize) -> Vec<Biquandle> {
        use itertools::Itertools;
        let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        let mut out = Vec::new();
        // over[x][y] with x -> x^y bijective for fixed y: choose a
        // permutation per column y. under[y][x] with y -> y_x bijective for
        // fixed x: again one permutation per column.
        let cols = || std::iter::repeat_n(perms.iter(), n).multi_cartesian_product();
        for oc in cols() {
            let mut over = vec![0; n * n];
            for (y, p) in oc.iter().enumerate() {
                for x in 0..n {
                    over[x * n + y] = p[x];
                }
            }
            for uc in cols() {
                let mut under = vec![0; n * n];
                for (x, p) in uc.iter().enumerate() {
                    for y in 0..n {
                        under[y * n + x] = p[y];
                    }
                }
                if check_axioms(n, &over, &under).is_empty() {
                    out.push(Self::from_tables(n, over.clone(), under).unwrap());
                }
            }
        }
        out
    }
}

fn check_axioms(n: usize, over: &[usize], under: &[usize]) -> Vec<AxiomViolation> {
    let up = |x: usize, y: usize| over[x * n + y];
    let lo = |x: usize, y: usize| under[x * n + y];
    let mut out = Vec::new();

    for y in 0..n {
        if let Some((a, b)) = first_collision((0..n).map(|x| up(x, y))) {
            out.push(AxiomViolation {
                axiom: Axiom::Invertibility,
                witness: vec![a, b, y],
                detail: format!("x -> x^{} is not injective", y + 1),
            });
        }
    }
    for x in 0..n {
        if let Some((a, b)) = first_collision((0..n).map(|y| lo(y, x))) {
            out.push(AxiomViolation {
                axiom: Axiom::Invertibility,
                witness: vec![a, b, x],
                detail: format!("y -> y_{} is not injective", x + 1),
            });
        }
    }
    let pairs = (0..n * n).map(|i| {
        let (x, y) = (i / n, i % n);
        lo(y, x) * n + up(x, y)
    });
    if let Some((a, b)) = first_collision(pairs) {
        out.push(AxiomViolation {
            axiom: Axiom::Invertibility,
            witness: vec![a / n, a % n, b / n, b % n],
            detail: "S(x, y) = (y_x, x^y) is not injective".into(),
        });
    }

    for a in 0..n {
        let us: Vec<usize> = (0..n).filter(|&u| lo(a, u) == u).collect();
        if us.len() != 1 {
            out.push(AxiomViolation {
                axiom: Axiom::Kink,
                witness: vec![a],
                detail: format!("{} solutions u of a_u = u, expected 1", us.len()),
            });
        } else if up(us[0], a) != a {
            out.push(AxiomViolation {
                axiom: Axiom::Kink,
                witness: vec![a, us[0]],
                detail: "u^a != a for the fixed point u of a_u = u".into(),
            });
        }
        let os: Vec<usize> = (0..n).filter(|&o| up(a, o) == o).collect();
        if os.len() != 1 {
            out.push(AxiomViolation {
                axiom: Axiom::Kink,
                witness: vec![a],
                detail: format!("{} solutions o of a^o = o, expected 1", os.len()),
            });
        } else if lo(os[0], a) != a {
            out.push(AxiomViolation {
                axiom: Axiom::Kink,
                witness: vec![a, os[0]],
                detail: "o_a != a for the fixed point o of a^o = o".into(),
            });
        }
    }

    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let zy = lo(z, y);
                let x_zy = up(x, zy);
                let yz = up(y, z);
                let xy = up(x, y);
                let z_xy = lo(z, xy);
                let yx = lo(y, x);
                let laws = [
                    (up(x_zy, yz), up(xy, z), "bottom strand"),
                    (lo(yz, x_zy), up(yx, z_xy), "middle strand"),
                    (lo(zy, x), lo(z_xy, yx), "top strand"),
                ];
                for (lhs, rhs, which) in laws {
                    if lhs != rhs {
                        out.push(AxiomViolation {
                            axiom: Axiom::Exchange,
                            witness: vec![x, y, z],
                            detail: format!("{which} law: {} != {}", lhs + 1, rhs + 1),
                        });
                    }
                }
            }
        }
    }
    out
}

fn first_collision(values: impl Iterator<Item = usize>) -> Option<(usize, usize)> {
    let mut seen = std::collections::HashMap::new();
    for (i, v) in values.enumerate() {
        if let Some(&j) = seen.get(&v) {
            return Some((j, i));
        }
        seen.insert(v, i);
    }
    None
}

fn invert_permutation(p: &[usize]) -> Option<Vec<usize>> {
    let n = p.len();
    let mut inv = vec![usize::MAX; n];
    for (i, &v) in p.iter().enumerate() {
        if v >= n || inv[v] != usize::MAX {
            return None;
        }
        inv[v] = i;
    }
    Some(inv)
}

fn inverse_mod(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m))
}

struct Group<'a> {
    table: &'a [Vec<usize>],
    identity: usize,
    inverse: Vec<usize>,
}

impl<'a> Group<'a> {
    fn from_cayley(table: &'a [Vec<usize>]) -> Result<Self, BiquandleError> {
        let n = table.len();
        if n == 0 {
            return Err(BiquandleError::Empty);
        }
        if let Some(r) = table.iter().position(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(BiquandleError::NotGroup(format!("row {} is malformed", r + 1)));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(BiquandleError::NotGroup(format!(
                            "not associative at ({}, {}, {})",
                            a + 1,
                            b + 1,
                            c + 1
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| BiquandleError::NotGroup("no identity element".into()))?;
        let inverse = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| table[a][b] == identity && table[b][a] == identity)
                    .ok_or_else(|| BiquandleError::NotGroup(format!("{} has no inverse", a + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Group {
            table,
            identity,
            inverse,
        })
    }

    fn order(&self) -> usize {
        self.table.len()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        (0..k.unsigned_abs()).fold(self.identity, |acc, _| self.mul(acc, base))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOX: &str = "1 3 2 1 1 1\n3 2 1 2 2 2\n2 1 3 3 3 3\n";

    fn s3_table() -> Vec<Vec<usize>> {
        use itertools::Itertools;
        let perms: Vec<Vec<usize>> = (0..3).permutations(3).collect();
        let idx = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| idx(&(0..3).map(|i| a[b[i]]).collect()))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn parses_fox_matrix_and_trivial_pair() {
        let fox = Biquandle::parse(FOX).unwrap();
        assert_eq!(fox.size(), 3);
        assert!(fox.is_quandle());
        assert_eq!(fox, Biquandle::dihedral(3));
        let x1 = Biquandle::parse("1 1 1 1\n2 2 2 2").unwrap();
        assert_eq!(x1, Biquandle::trivial(2));
    }

    #[test]
    fn header_and_comments_round_trip() {
        let fox = Biquandle::parse(FOX).unwrap();
        let text = format!("# Fox 3-colorings\n{}", fox.to_text());
        assert_eq!(Biquandle::parse(&text).unwrap(), fox);
    }

    #[test]
    fn rejects_non_bijective_column() {
        // x^y = 1 for every x in column 1.
        let err = Biquandle::parse("1 2 1 1\n1 1 2 2").unwrap_err();
        match err {
            BiquandleError::Axioms(v) => {
                assert!(v.iter().any(|a| a.axiom == Axiom::Invertibility && a.witness[2] == 0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            Biquandle::parse("1 1 1\n2 2 2 2"),
            Err(BiquandleError::Dimension { row: 1, .. })
        ));
        assert!(matches!(
            Biquandle::parse("1 3 1 1\n2 2 2 2"),
            Err(BiquandleError::OutOfRange { value: 3, .. })
        ));
        assert!(matches!(Biquandle::parse("3\n1 1 1 1 1 1"), Err(BiquandleError::Parse { .. })));
    }

    #[test]
    fn reports_every_violation() {
        // Z_2 with x^y = x + y, x_y = x: no fixed point structure for kinks.
        let v = Biquandle::validate(2, &[0, 1, 1, 0], &[0, 0, 1, 1]);
        assert!(v.iter().filter(|a| a.axiom == Axiom::Kink).count() >= 2);
    }

    #[test]
    fn alexander_z3_matches_printed_tables() {
        let b = Biquandle::alexander(3, 1, 2).unwrap();
        // x^y = x + 2y and x_y = 2x on {0, 1, 2}.
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(b.over(x, y), (x + 2 * y) % 3);
                assert_eq!(b.under(x, y), (2 * x) % 3);
            }
        }
        assert!(!b.is_quandle());
    }

    #[test]
    fn alexander_collapses_and_rejects_non_units() {
        assert_eq!(Biquandle::alexander(2, 1, 1).unwrap(), Biquandle::trivial(2));
        assert!(matches!(
            Biquandle::alexander(4, 2, 1),
            Err(BiquandleError::NotUnit { value: 2, modulus: 4 })
        ));
    }

    #[test]
    fn constant_actions() {
        assert_eq!(Biquandle::constant_action(&[0, 1]).unwrap(), Biquandle::trivial(2));
        let x2 = Biquandle::constant_action(&[1, 0]).unwrap();
        assert_eq!(x2, Biquandle::parse("2 2 2 2\n1 1 1 1").unwrap());
        Biquandle::constant_action(&[1, 2, 0]).unwrap();
        assert!(matches!(
            Biquandle::constant_action(&[0, 0]),
            Err(BiquandleError::NotPermutation(2))
        ));
    }

    #[test]
    fn conjugation_quandles() {
        let triv = Biquandle::conjugation(&[vec![0]], 5).unwrap();
        assert_eq!(triv, Biquandle::trivial(1));
        let s3 = Biquandle::conjugation(&s3_table(), 1).unwrap();
        assert!(s3.is_quandle());
        let z2 = Biquandle::conjugation(&[vec![0, 1], vec![1, 0]], 1).unwrap();
        assert_eq!(z2, Biquandle::trivial(2));
        assert!(matches!(
            Biquandle::conjugation(&[vec![0, 0], vec![1, 1]], 1),
            Err(BiquandleError::NotGroup(_))
        ));
    }

    #[test]
    fn generators_validate_exhaustively() {
        use itertools::Itertools;
        for m in 1..=6usize {
            for t in 0..m as i64 {
                for s in 0..m as i64 {
                    if inverse_mod(t, m as i64).is_some() && inverse_mod(s, m as i64).is_some() {
                        Biquandle::alexander(m, t, s).unwrap();
                    }
                }
            }
            for p in (0..m).permutations(m) {
                Biquandle::constant_action(&p).unwrap();
            }
            let cyclic: Vec<Vec<usize>> = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
            for k in -2..=2 {
                Biquandle::conjugation(&cyclic, k).unwrap();
            }
        }
        for k in -2..=3 {
            Biquandle::conjugation(&s3_table(), k).unwrap();
        }
    }

    #[test]
    fn invert_s_examples() {
        let x1 = Biquandle::trivial(2);
        assert_eq!(x1.invert_s(0, 1), (1, 0));
        let x2 = Biquandle::constant_action(&[1, 0]).unwrap();
        assert_eq!(x2.invert_s(0, 0), (1, 1));
        let fox = Biquandle::dihedral(3);
        for x in 0..3 {
            assert_eq!(fox.invert_s(fox.under(x, x), fox.over(x, x)), (x, x));
        }
    }

    #[test]
    fn invert_s_inverts_s() {
        for b in [Biquandle::alexander(5, 2, 3).unwrap(), Biquandle::dihedral(5)] {
            let n = b.size();
            for x in 0..n {
                for y in 0..n {
                    assert_eq!(b.invert_s(b.under(y, x), b.over(x, y)), (x, y));
                }
            }
        }
    }

    #[test]
    fn crossing_inputs_invert_outputs() {
        let b = Biquandle::alexander(5, 2, 3).unwrap();
        for sign in [Sign::Positive, Sign::Negative] {
            for u in 0..5 {
                for o in 0..5 {
                    let (uo, oo) = b.crossing_outputs(sign, u, o);
                    assert_eq!(b.crossing_inputs(sign, uo, oo), (u, o));
                }
            }
        }
    }

    #[test]
    fn two_element_sweep() {
        let all = Biquandle::enumerate_all(2);
        assert_eq!(all, vec![Biquandle::trivial(2), Biquandle::constant_action(&[1, 0]).unwrap()]);
    }
}
