//! Arithmetic and dense elimination over the prime field F_p, p = 2^31 - 1.
//!
//! Used for the large graded pieces where exact rational elimination is too
//! slow. Values are kept reduced in `[0, p)` and stored as `u32`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub const P: u32 = 2_147_483_647;
const P64: u64 = P as u64;

#[inline(always)]
pub fn reduce(x: u64) -> u32 {
    let t = (x & P64) + (x >> 31);
    let t = (t & P64) + (t >> 31);
    (if t >= P64 { t - P64 } else { t }) as u32
}

#[inline(always)]
pub fn add(a: u32, b: u32) -> u32 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline(always)]
pub fn sub(a: u32, b: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline(always)]
pub fn neg(a: u32) -> u32 {
    if a == 0 {
        0
    } else {
        P - a
    }
}

#[inline(always)]
pub fn mul(a: u32, b: u32) -> u32 {
    reduce(a as u64 * b as u64)
}

pub fn pow(mut b: u32, mut e: u64) -> u32 {
    let mut r = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    r
}

pub fn inv(a: u32) -> u32 {
    assert!(a != 0, "inverse of zero in F_p");
    pow(a, P64 - 2)
}

pub fn from_i64(x: i64) -> u32 {
    let r = x.rem_euclid(P as i64);
    r as u32
}

pub fn from_bigint(x: &BigInt) -> u32 {
    let m = BigInt::from(P);
    let r = x.mod_floor(&m);
    r.to_u32().unwrap()
}

/// Reduces a rational number; the denominator must be prime to p.
pub fn from_rational(x: &BigRational) -> u32 {
    let n = from_bigint(x.numer());
    let d = from_bigint(x.denom());
    mul(n, inv(d))
}

/// Symmetric lift to a signed integer in `(-p/2, p/2]`.
pub fn lift(a: u32) -> i64 {
    if a > P / 2 {
        a as i64 - P as i64
    } else {
        a as i64
    }
}

pub fn is_unit_rational(x: &BigRational) -> bool {
    !x.denom().is_zero() && (x.denom().abs() % BigInt::from(P)) != BigInt::zero()
}

/// `row[i] += f * src[i]` over the whole slice.
#[inline]
pub fn axpy(row: &mut [u32], f: u32, src: &[u32]) {
    let f = f as u64;
    for (a, &b) in row.iter_mut().zip(src) {
        *a = reduce(*a as u64 + f * b as u64);
    }
}

#[inline]
pub fn scale(row: &mut [u32], f: u32) {
    for a in row.iter_mut() {
        *a = mul(*a, f);
    }
}

/// Row-major dense matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut m = Mat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.row_mut(i).copy_from_slice(r);
        }
        m
    }

    /// Builds a matrix from `(row, col, value)` triples, summing duplicates.
    pub fn from_triplets(rows: usize, cols: usize, entries: &[(usize, usize, u32)]) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for &(r, c, v) in entries {
            let x = &mut m.data[r * cols + c];
            *x = add(*x, v);
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u32;
                for (a, b) in self.row(r).iter().zip(v) {
                    if *b != 0 {
                        acc = reduce(acc as u64 + *a as u64 * *b as u64);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let orow = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a != 0 {
                    axpy(orow, a, other.row(k));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Forward elimination in place. Returns the pivot columns; afterwards the
    /// first `pivots.len()` rows form an echelon basis of the row space, each
    /// normalized to a leading 1.
    pub fn echelonize(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if p != r {
                for k in c..cols {
                    self.data.swap(p * cols + k, r * cols + k);
                }
            }
            let iv = inv(self.data[r * cols + c]);
            scale(&mut self.data[r * cols + c..(r + 1) * cols], iv);
            let (top, bottom) = self.data.split_at_mut((r + 1) * cols);
            let piv = &top[r * cols + c..];
            for row in bottom.chunks_exact_mut(cols) {
                let f = row[c];
                if f != 0 {
                    axpy(&mut row[c..], P - f, piv);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Eliminate along the longer side so fewer rows get updated per pivot.
        if self.rows > self.cols {
            self.transpose().echelonize().len()
        } else {
            self.clone().echelonize().len()
        }
    }

    /// Reduced row echelon form in place; returns pivot columns. Rows beyond
    /// the rank are zero.
    pub fn rref(&mut self) -> Vec<usize> {
        let pivots = self.echelonize();
        let cols = self.cols;
        for (i, &c) in pivots.iter().enumerate().rev() {
            let (top, rest) = self.data.split_at_mut(i * cols);
            let piv = &rest[..cols];
            for row in top.chunks_exact_mut(cols) {
                let f = row[c];
                if f != 0 {
                    axpy(&mut row[c..], P - f, &piv[c..]);
                }
            }
        }
        pivots
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_piv = vec![false; self.cols];
        for &c in &pivots {
            is_piv[c] = true;
        }
        let mut out = Vec::new();
        for fc in 0..self.cols {
            if is_piv[fc] {
                continue;
            }
            let mut v = vec![0u32; self.cols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = neg(m.get(i, fc));
            }
            out.push(v);
        }
        out
    }
}

/// A subspace of F_p^dim kept in reduced echelon form, with cheap membership
/// and normal-form queries. Pivots are the first nonzero coordinate of each
/// basis row, so with coordinates ordered from largest to smallest term the
/// pivot is the leading term.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pub dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    pivot_row: Vec<u32>,
}

const NO_ROW: u32 = u32::MAX;

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new(), pivots: Vec::new(), pivot_row: vec![NO_ROW; dim] }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivot_row[c] != NO_ROW
    }

    /// Subtracts basis rows to clear every pivot coordinate of `v`.
    pub fn reduce(&self, v: &mut [u32]) {
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c];
            if f != 0 {
                axpy(v, P - f, row);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span. Returns true if the dimension grew.
    pub fn insert(&mut self, mut v: Vec<u32>) -> bool {
        self.reduce(&mut v);
        self.insert_reduced(v)
    }

    /// Like `insert`, for a vector already reduced against this basis.
    pub fn insert_reduced(&mut self, mut v: Vec<u32>) -> bool {
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let iv = inv(v[c]);
        scale(&mut v, iv);
        for row in self.rows.iter_mut() {
            let f = row[c];
            if f != 0 {
                axpy(row, P - f, &v);
            }
        }
        self.pivot_row[c] = self.rows.len() as u32;
        self.rows.push(v);
        self.pivots.push(c);
        true
    }

    /// Coordinates of the non-pivot part, i.e. the class of `v` in the
    /// quotient by this subspace written in the standard complement basis.
    pub fn quotient_coords(&self, v: &[u32]) -> Vec<u32> {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        (0..self.dim).filter(|&c| !self.is_pivot(c)).map(|c| w[c]).collect()
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim).filter(|&c| !self.is_pivot(c)).collect()
    }
}

/// Solves `a x = b` for each right-hand side; free variables are set to
/// zero. `None` if some system is inconsistent.
pub fn solve_many(a: &Mat, rhs: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
    let (rows, cols) = (a.rows, a.cols);
    let w = cols + rhs.len();
    let mut m = Mat::zeros(rows, w);
    for r in 0..rows {
        m.row_mut(r)[..cols].copy_from_slice(a.row(r));
        for (i, b) in rhs.iter().enumerate() {
            m.set(r, cols + i, b[r]);
        }
    }
    let pivots = m.rref();
    if pivots.iter().any(|&c| c >= cols) {
        return None;
    }
    let mut out = vec![vec![0u32; cols]; rhs.len()];
    for (i, &c) in pivots.iter().enumerate() {
        for (k, x) in out.iter_mut().enumerate() {
            x[c] = m.get(i, cols + k);
        }
    }
    Some(out)
}

/// Rank of the span of a list of vectors.
pub fn span_rank(dim: usize, vecs: impl IntoIterator<Item = Vec<u32>>) -> usize {
    let mut e = Echelon::new(dim);
    for v in vecs {
        e.insert(v);
    }
    e.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        assert_eq!(mul(inv(12345), 12345), 1);
        assert_eq!(add(P - 1, 5), 4);
        assert_eq!(sub(3, 5), P - 2);
        assert_eq!(from_i64(-1), P - 1);
        assert_eq!(lift(P - 3), -3);
        assert_eq!(reduce(u64::MAX >> 2), ((u64::MAX >> 2) % P as u64) as u32);
    }

    #[test]
    fn rank_and_kernel() {
        let m = Mat::from_rows(3, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|&x| x == 0));
    }

    #[test]
    fn echelon_reduce() {
        let mut e = Echelon::new(3);
        assert!(e.insert(vec![1, 1, 0]));
        assert!(!e.insert(vec![2, 2, 0]));
        assert!(e.insert(vec![0, 1, 1]));
        assert!(e.contains(&[1, 0, P - 1]));
        assert_eq!(e.complement(), vec![2]);
    }
}
