//! Dense integer and rational matrices, Hermite normal form, integral kernels.
//!
//! Everything is arbitrary precision. Matrices are stored row-major.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Int>>", into = "Vec<Vec<Int>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension { expected: c, got: row.len() });
            }
            data.extend(row);
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    /// Panics on ragged input; meant for literals.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| ints(r)).collect()).expect("ragged matrix literal")
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Int>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::Dimension { expected: rows, got: col.len() });
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Int]) -> Result<Vec<Int>> {
        if self.cols != v.len() {
            return Err(Error::Dimension { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, k: &Int) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j { v.is_one() } else { v.is_zero() }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension { expected: self.rows, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<Int> {
        if !self.is_square() {
            return Err(Error::Dimension { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Int::one());
        }
        let mut m = self.to_rows();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(Int::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        Ok(sign * &m[n - 1][n - 1])
    }

    /// Exact inverse for unimodular matrices, `None` otherwise.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        if !self.is_square() {
            return None;
        }
        let d = self.det().ok()?;
        if !d.abs().is_one() {
            return None;
        }
        let inv = rational_inverse(&to_rational(self))?;
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = &inv[i][j];
                if !v.is_integer() {
                    return None;
                }
                out.set(i, j, v.to_integer());
            }
        }
        Some(out)
    }

    pub fn pow(&self, e: u64) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension { expected: self.rows, got: self.cols });
        }
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }
}

impl TryFrom<Vec<Vec<Int>>> for IntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<Int>>) -> Result<Self> {
        IntMatrix::from_rows(rows)
    }
}

impl From<IntMatrix> for Vec<Vec<Int>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", v)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Column-style Hermite normal form: `a · u = h` with `u` unimodular and `h`
/// in lower column-echelon form. The first `rank` columns of `h` are the pivot
/// columns; the remaining columns of `h` are zero.
#[derive(Clone, Debug)]
pub struct ColumnHermite {
    pub h: IntMatrix,
    pub u: Option<IntMatrix>,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
}

/// (g, x, y) with a·x + b·y = g ≥ 0.
fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

struct ColumnWork {
    cols: Vec<Vec<Int>>,
    transform: Option<Vec<Vec<Int>>>,
}

impl ColumnWork {
    // [c_p, c_j] <- [x c_p + y c_j, s c_p + t c_j]
    fn combine(v: &mut [Vec<Int>], p: usize, j: usize, x: &Int, y: &Int, s: &Int, t: &Int) {
        let (lo, hi) = v.split_at_mut(j);
        let cp = &mut lo[p];
        let cj = &mut hi[0];
        for (a, b) in cp.iter_mut().zip(cj.iter_mut()) {
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let na = x * &*a + y * &*b;
            let nb = s * &*a + t * &*b;
            *a = na;
            *b = nb;
        }
    }

    fn apply(&mut self, p: usize, j: usize, x: &Int, y: &Int, s: &Int, t: &Int) {
        Self::combine(&mut self.cols, p, j, x, y, s, t);
        if let Some(u) = self.transform.as_mut() {
            Self::combine(u, p, j, x, y, s, t);
        }
    }

    fn sub_multiple(&mut self, target: usize, src: usize, q: &Int) {
        fn go(v: &mut [Vec<Int>], target: usize, src: usize, q: &Int) {
            let s = v[src].clone();
            for (a, b) in v[target].iter_mut().zip(s.iter()) {
                if !b.is_zero() {
                    *a -= q * b;
                }
            }
        }
        go(&mut self.cols, target, src, q);
        if let Some(u) = self.transform.as_mut() {
            go(u, target, src, q);
        }
    }

    fn negate(&mut self, c: usize) {
        for v in self.cols[c].iter_mut() {
            *v = -&*v;
        }
        if let Some(u) = self.transform.as_mut() {
            for v in u[c].iter_mut() {
                *v = -&*v;
            }
        }
    }
}

pub fn column_hermite(a: &IntMatrix, track_transform: bool) -> ColumnHermite {
    let (m, n) = (a.rows(), a.cols());
    let mut w = ColumnWork {
        cols: (0..n).map(|j| a.column(j)).collect(),
        transform: track_transform.then(|| {
            (0..n)
                .map(|j| (0..n).map(|i| if i == j { Int::one() } else { Int::zero() }).collect())
                .collect()
        }),
    };
    let mut p = 0usize;
    let mut pivot_rows = Vec::new();
    for r in 0..m {
        if p >= n {
            break;
        }
        for j in p + 1..n {
            if w.cols[j][r].is_zero() {
                continue;
            }
            let a_p = w.cols[p][r].clone();
            let a_j = w.cols[j][r].clone();
            let (g, x, y) = ext_gcd(&a_p, &a_j);
            let s = -(&a_j / &g);
            let t = &a_p / &g;
            w.apply(p, j, &x, &y, &s, &t);
        }
        if w.cols[p][r].is_zero() {
            continue;
        }
        if w.cols[p][r].is_negative() {
            w.negate(p);
        }
        // reduce earlier pivot columns in this row into [0, pivot)
        let piv = w.cols[p][r].clone();
        for c in 0..p {
            let q = w.cols[c][r].div_floor(&piv);
            if !q.is_zero() {
                w.sub_multiple(c, p, &q);
            }
        }
        pivot_rows.push(r);
        p += 1;
    }
    let h = IntMatrix::from_columns(m, &w.cols).expect("shape preserved");
    let u = w.transform.map(|t| IntMatrix::from_columns(n, &t).expect("shape preserved"));
    ColumnHermite { h, u, rank: p, pivot_rows }
}

/// Rank over the integers (equivalently over Q).
pub fn integer_rank(a: &IntMatrix) -> usize {
    column_hermite(a, false).rank
}

/// A basis of `{x ∈ Z^n : a·x = 0}`. The basis spans the full integral kernel,
/// so every vector in it is primitive and the count is `n - rank(a)`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<Int>> {
    let hermite = column_hermite(a, true);
    let u = hermite.u.expect("transform tracked");
    let mut basis: Vec<Vec<Int>> = (hermite.rank..a.cols()).map(|j| u.column(j)).collect();
    size_reduce(&mut basis);
    basis
}

/// Cheap pairwise size reduction of a lattice basis. Keeps it a basis.
/// Kernel vectors are usually sparse, so dot products run over supports.
fn size_reduce(basis: &mut [Vec<Int>]) {
    fn support(v: &[Int]) -> Vec<usize> {
        (0..v.len()).filter(|&i| !v[i].is_zero()).collect()
    }
    fn sparse_dot(a: &[Int], sa: &[usize], b: &[Int], sb: &[usize]) -> Int {
        let (short, other) = if sa.len() <= sb.len() { (sa, b) } else { (sb, a) };
        let long = if sa.len() <= sb.len() { a } else { b };
        short.iter().map(|&i| &long[i] * &other[i]).sum()
    }
    let mut supp: Vec<Vec<usize>> = basis.iter().map(|v| support(v)).collect();
    let mut norms: Vec<Int> = basis.iter().zip(&supp).map(|(v, s)| sparse_dot(v, s, v, s)).collect();
    for _ in 0..4 {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j || norms[j].is_zero() {
                    continue;
                }
                let dot = sparse_dot(&basis[i], &supp[i], &basis[j], &supp[j]);
                if dot.is_zero() {
                    continue;
                }
                // nearest integer to dot / nj
                let nj = &norms[j];
                let q = (Int::from(2) * &dot + nj).div_floor(&(Int::from(2) * nj));
                if !q.is_zero() {
                    let bj = basis[j].clone();
                    for &c in &supp[j] {
                        basis[i][c] -= &q * &bj[c];
                    }
                    supp[i] = support(&basis[i]);
                    norms[i] = sparse_dot(&basis[i], &supp[i], &basis[i], &supp[i]);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for v in basis.iter_mut() {
        if let Some(first) = v.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                for x in v.iter_mut() {
                    *x = -&*x;
                }
            }
        }
    }
}

pub fn gcd_of(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Divides out the content; the zero vector is returned unchanged.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = gcd_of(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn to_rational(m: &IntMatrix) -> Vec<Vec<Rat>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| Rat::from_integer(x.clone())).collect()).collect()
}

pub fn rational_inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Clears denominators and returns the primitive integer vector on the same ray.
pub fn rational_to_primitive(v: &[Rat]) -> Vec<Int> {
    let l = v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<Int> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    primitive(&scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(integer_kernel(&IntMatrix::identity(3)).is_empty());
    }

    #[test]
    fn kernel_of_zero_row_is_everything() {
        let k = integer_kernel(&IntMatrix::zeros(1, 3));
        assert_eq!(k.len(), 3);
        let m = IntMatrix::from_columns(3, &k).unwrap();
        assert!(m.det().unwrap().abs().is_one());
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x + 4y = 0 has kernel generated by (2,-1), not (4,-2)
        let a = IntMatrix::from_i64(&[&[2, 4]]);
        let k = integer_kernel(&a);
        assert_eq!(k, vec![ints(&[2, -1])]);
    }

    #[test]
    fn hermite_transform_is_unimodular() {
        let a = IntMatrix::from_i64(&[&[3, 5, 7, 2], &[1, 0, 4, 6], &[2, 2, 2, 2]]);
        let hermite = column_hermite(&a, true);
        let u = hermite.u.unwrap();
        assert!(u.det().unwrap().abs().is_one());
        assert_eq!(a.mul(&u).unwrap(), hermite.h);
        assert_eq!(hermite.rank, 3);
    }

    #[test]
    fn det_bareiss() {
        let m = IntMatrix::from_i64(&[&[1, 2, 6], &[0, -1, -2], &[0, 2, 3]]);
        assert_eq!(m.det().unwrap(), int(1));
        let s = IntMatrix::from_i64(&[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]]);
        assert_eq!(s.det().unwrap(), int(16));
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let m = IntMatrix::from_i64(&[&[1, 2, 6], &[0, -1, -2], &[0, 2, 3]]);
        let inv = m.unimodular_inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(IntMatrix::from_i64(&[&[2, 0], &[0, 1]]).unimodular_inverse().is_none());
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![Rat::new(int(1), int(2)), Rat::new(int(-3), int(4))];
        assert_eq!(rational_to_primitive(&v), ints(&[2, -3]));
    }
}
