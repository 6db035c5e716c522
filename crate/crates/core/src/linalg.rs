//! Exact integer linear algebra on sparse matrices with arbitrary precision
//! entries: Hermite normal form, rank and saturated integer kernels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse vector: `(column, value)` pairs sorted by column, no zeros.
pub type SparseVec = Vec<(usize, BigInt)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, BigInt::one())]).collect(),
        }
    }

    pub fn from_dense<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix");
                r.iter()
                    .enumerate()
                    .map(|(j, v)| (j, v.clone().into()))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds from sparse rows; entries are sorted and zeros dropped.
    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        let data: Vec<SparseVec> = rows.into_iter().map(|r| clean(r, cols)).collect();
        IntMatrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match self.data[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        self.data
            .iter()
            .map(|r| {
                let mut d = vec![BigInt::zero(); self.cols];
                for (j, v) in r {
                    d[*j] = v.clone();
                }
                d
            })
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut data = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                data[*j].push((i, v.clone()));
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (k, a) in r {
                    for (j, b) in &other.data[*k] {
                        *acc.entry(*j).or_insert_with(BigInt::zero) += a * b;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        IntMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    /// `rows cols` followed by one `i j value` line per nonzero entry.
    pub fn to_triplets(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                let _ = writeln!(s, "{i} {j} {v}");
            }
        }
        s
    }

    pub fn rank(&self) -> usize {
        let mut e = RowEchelon::new(self.cols);
        for r in &self.data {
            e.insert(r.clone());
        }
        e.rank()
    }
}

fn clean(mut r: SparseVec, cols: usize) -> SparseVec {
    r.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(r.len());
    for (j, v) in r {
        assert!(j < cols, "column {j} out of range");
        match out.last_mut() {
            Some((lj, lv)) if *lj == j => *lv += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

pub fn dot(a: &SparseVec, b: &SparseVec) -> BigInt {
    let (mut i, mut j) = (0, 0);
    let mut acc = BigInt::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &a[i].1 * &b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// `x * a + y * b`.
fn combine(x: &BigInt, a: &SparseVec, y: &BigInt, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (col, v) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            i += 1;
            (a[i - 1].0, x * &a[i - 1].1)
        } else if i == a.len() || b[j].0 < a[i].0 {
            j += 1;
            (b[j - 1].0, y * &b[j - 1].1)
        } else {
            i += 1;
            j += 1;
            (a[i - 1].0, x * &a[i - 1].1 + y * &b[j - 1].1)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    out
}

fn content(v: &SparseVec) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x))
}

/// Divides by the content and makes the leading entry positive.
pub fn make_primitive(v: &mut SparseVec) {
    let mut g = content(v);
    if g.is_zero() {
        return;
    }
    if v[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, x) in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Incremental row echelon form over the rationals, stored as primitive
/// integer rows keyed by pivot column. Tracks the rational row space only.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    cols: usize,
    rows: BTreeMap<usize, SparseVec>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> Self {
        RowEchelon {
            cols,
            rows: BTreeMap::new(),
        }
    }

    /// Adds a row; returns whether it enlarged the row space.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut v = clean(v, self.cols);
        make_primitive(&mut v);
        while let Some((lead, lv)) = v.first().cloned() {
            match self.rows.get(&lead) {
                None => {
                    self.rows.insert(lead, v);
                    return true;
                }
                Some(r) => {
                    let rl = &r[0].1;
                    let g = rl.gcd(&lv);
                    v = combine(&(rl / &g), &v, &(-(&lv / &g)), r);
                    make_primitive(&mut v);
                }
            }
        }
        false
    }

    /// Whether `v` lies in the rational row space.
    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut probe = self.clone();
        !probe.insert(v.clone())
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows.len(),
            cols: self.cols,
            data: self.rows.values().cloned().collect(),
        }
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `H = U * m`, `U`
/// unimodular, pivots positive, entries above each pivot reduced into
/// `[0, pivot)`, zero rows last. The pivot in each column is the smallest
/// nonzero absolute value, ties broken by row index.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h: Vec<SparseVec> = m.data.clone();
    let mut u: Vec<SparseVec> = IntMatrix::identity(m.rows).data;
    let mut r = 0;
    for col in 0..m.cols {
        if r == h.len() {
            break;
        }
        loop {
            let at = |row: &SparseVec| row.binary_search_by_key(&col, |e| e.0).ok().map(|k| row[k].1.clone());
            let best = (r..h.len())
                .filter_map(|i| at(&h[i]).map(|v| (v.abs(), i)))
                .min();
            let Some((_, p)) = best else { break };
            h.swap(r, p);
            u.swap(r, p);
            let pv = at(&h[r]).unwrap();
            let mut done = true;
            for i in r + 1..h.len() {
                if let Some(x) = at(&h[i]) {
                    let q = x.div_floor(&pv);
                    h[i] = combine(&BigInt::one(), &h[i], &(-&q), &h[r]);
                    u[i] = combine(&BigInt::one(), &u[i], &(-&q), &u[r]);
                    if at(&h[i]).is_some() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        let lead = h[r].binary_search_by_key(&col, |e| e.0).ok().map(|k| h[r][k].1.clone());
        let Some(mut pv) = lead else { continue };
        if pv.is_negative() {
            let neg = -BigInt::one();
            h[r] = combine(&neg, &h[r], &BigInt::zero(), &Vec::new());
            u[r] = combine(&neg, &u[r], &BigInt::zero(), &Vec::new());
            pv = -pv;
        }
        for i in 0..r {
            if let Ok(k) = h[i].binary_search_by_key(&col, |e| e.0) {
                let q = h[i][k].1.div_floor(&pv);
                if !q.is_zero() {
                    h[i] = combine(&BigInt::one(), &h[i], &(-&q), &h[r]);
                    u[i] = combine(&BigInt::one(), &u[i], &(-&q), &u[r]);
                }
            }
        }
        r += 1;
    }
    (
        IntMatrix {
            rows: m.rows,
            cols: m.cols,
            data: h,
        },
        IntMatrix {
            rows: m.rows,
            cols: m.rows,
            data: u,
        },
    )
}

/// A basis of `{v in Z^cols : m v = 0}`, saturated and in Hermite normal
/// form. Its size is `cols - rank(m)`.
pub fn integer_kernel(m: &IntMatrix) -> Vec<SparseVec> {
    // The kernel depends only on the rational row space, so shrink `m` to
    // an echelon basis first.
    let mut e = RowEchelon::new(m.cols);
    for r in &m.data {
        e.insert(r.clone());
    }
    let reduced = e.to_matrix();
    // Rows of U killing m^T form a saturated kernel basis since U is
    // unimodular.
    let (h, u) = hnf(&reduced.transpose());
    let kernel: Vec<SparseVec> = (0..h.rows).filter(|&i| h.data[i].is_empty()).map(|i| u.data[i].clone()).collect();
    let (kh, _) = hnf(&IntMatrix {
        rows: kernel.len(),
        cols: m.cols,
        data: kernel,
    });
    kh.data.into_iter().filter(|r| !r.is_empty()).collect()
}

/// Diagonal of the Smith normal form (nonzero elementary divisors).
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows, m.cols);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let pos = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| a[i][j].abs());
        let Some((pi, pj)) = pos else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t].clone();
            let mut changed = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&p);
                    for j in t..cols {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    changed |= !a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&p);
                    for row in a.iter_mut().skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    changed |= !a[t][j].is_zero();
                }
            }
            if !changed {
                // Divisibility: fold any entry not divisible by the pivot
                // into row t and repeat.
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&a[i][j] % &p).is_zero());
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            let v = a[i][j].clone();
                            a[t][j] += v;
                        }
                        continue;
                    }
                }
            }
            // Move the smallest entry of row/column t into the pivot.
            let cand = (t..rows)
                .map(|i| (i, t))
                .chain((t..cols).map(|j| (t, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by_key(|&(i, j)| a[i][j].abs())
                .unwrap();
            a.swap(t, cand.0);
            for row in a.iter_mut() {
                row.swap(t, cand.1);
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Converts a sparse vector to dense `i64`, panicking on overflow.
pub fn to_i64_dense(v: &SparseVec, len: usize) -> Vec<i64> {
    let mut d = vec![0i64; len];
    for (j, x) in v {
        d[*j] = i64::try_from(x).expect("coefficient fits in i64");
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_dense(rows)
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hnf(&IntMatrix::identity(3));
        assert_eq!(h, IntMatrix::identity(3));
        assert_eq!(u, IntMatrix::identity(3));
        let a = m(&[vec![2, 4], vec![1, 2]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, m(&[vec![1, 2], vec![0, 0]]));
        assert_eq!(u.mul(&a), h);
    }

    #[test]
    fn hnf_reduces_above_pivots() {
        let a = m(&[vec![3, 5, 7], vec![0, 4, 1], vec![6, 2, 2]]);
        let (h, u) = hnf(&a);
        assert_eq!(u.mul(&a), h);
        let d = h.to_dense();
        assert!(d[0][0].is_positive());
        for i in 0..3 {
            for k in 0..i {
                assert!(d[i][k].is_zero());
            }
        }
        assert_eq!(elementary_divisors(&u).iter().filter(|x| !x.is_one()).count(), 0);
    }

    #[test]
    fn kernels() {
        let z = IntMatrix::zero(2, 3);
        assert_eq!(integer_kernel(&z).len(), 3);
        let k = integer_kernel(&m(&[vec![1, 1]]));
        assert_eq!(k, vec![vec![(0, BigInt::from(1)), (1, BigInt::from(-1))]]);
        // Saturation: 2x + 4y = 0 has kernel generated by (2, -1).
        let k = integer_kernel(&m(&[vec![2, 4]]));
        assert_eq!(k, vec![vec![(0, BigInt::from(2)), (1, BigInt::from(-1))]]);
    }

    #[test]
    fn echelon_rank() {
        let mut e = RowEchelon::new(3);
        assert!(e.insert(vec![(0, 2.into()), (1, 4.into())]));
        assert!(!e.insert(vec![(0, 1.into()), (1, 2.into())]));
        assert!(e.insert(vec![(1, 1.into())]));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&vec![(0, 1.into())]));
        assert!(!e.contains(&vec![(2, 1.into())]));
    }

    #[test]
    fn smith() {
        let a = m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(elementary_divisors(&a), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn triplets() {
        assert_eq!(m(&[vec![0, 3]]).to_triplets(), "1 2\n0 1 3\n");
    }
}
