//! Exact linear algebra over the rationals: ranks, kernels, subquotients and
//! maps induced on subquotients.
//!
//! Matrices are stored as coordinate lists and densified for elimination.
//! Ranks use fraction-free (Bareiss) elimination over the integers after
//! clearing denominators row by row; kernels and solves use Gauss-Jordan over
//! `BigRational`.

pub mod modp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("boundary space is not contained in cycle space")]
    NotContained,
    #[error("ambient map does not descend to the subquotients")]
    NotWellDefined,
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Sparse rational matrix in coordinate form. Entries are kept sorted by
/// `(row, col)` with no duplicates and no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(usize, usize, Q)>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        QMatrix { rows: n, cols: n, entries: (0..n).map(|i| (i, i, Q::one())).collect() }
    }

    /// Builds from triplets, summing duplicates and dropping zeros.
    pub fn from_triplets(rows: usize, cols: usize, mut t: Vec<(usize, usize, Q)>) -> Self {
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut entries: Vec<(usize, usize, Q)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| !e.2.is_zero());
        QMatrix { rows, cols, entries }
    }

    pub fn from_dense(d: &[Vec<Q>]) -> Self {
        let rows = d.len();
        let cols = d.first().map_or(0, |r| r.len());
        let mut t = Vec::new();
        for (i, r) in d.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, v) in r.iter().enumerate() {
                if !v.is_zero() {
                    t.push((i, j, v.clone()));
                }
            }
        }
        QMatrix { rows, cols, entries: t }
    }

    pub fn from_i64(d: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<Q>> = d.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        if dense.is_empty() {
            return QMatrix::zeros(0, 0);
        }
        Self::from_dense(&dense)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut t = Vec::new();
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                if !v.is_zero() {
                    t.push((i, j, v.clone()));
                }
            }
        }
        Self::from_triplets(rows, cols.len(), t)
    }

    pub fn entries(&self) -> &[(usize, usize, Q)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        match self.entries.binary_search_by(|e| (e.0, e.1).cmp(&(r, c))) {
            Ok(i) => self.entries[i].2.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut d = vec![vec![Q::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            d[*r][*c] = v.clone();
        }
        d
    }

    pub fn columns(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.rows]; self.cols];
        for (r, c, v) in &self.entries {
            out[*c][*r] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> QMatrix {
        let t = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        QMatrix::from_triplets(self.cols, self.rows, t)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "product shape mismatch");
        let mut by_row: Vec<Vec<(usize, &Q)>> = vec![Vec::new(); other.rows];
        for (r, c, v) in &other.entries {
            by_row[*r].push((*c, v));
        }
        let mut t = Vec::new();
        for (r, k, a) in &self.entries {
            for (c, b) in &by_row[*k] {
                t.push((*r, *c, a * *b));
            }
        }
        QMatrix::from_triplets(self.rows, other.cols, t)
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Q::zero(); self.rows];
        for (r, c, a) in &self.entries {
            if !v[*c].is_zero() {
                out[*r] += a * &v[*c];
            }
        }
        out
    }

    pub fn neg(&self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(r, c, v)| (*r, *c, -v.clone())).collect(),
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut t = self.entries.clone();
        t.extend(other.entries.iter().map(|(r, c, v)| (*r, c + self.cols, v.clone())));
        QMatrix::from_triplets(self.rows, self.cols + other.cols, t)
    }

    /// Reduction mod p; every denominator must be a unit.
    pub fn to_modp(&self) -> modp::Mat {
        let t: Vec<(usize, usize, u32)> =
            self.entries.iter().map(|(r, c, v)| (*r, *c, modp::from_rational(v))).collect();
        modp::Mat::from_triplets(self.rows, self.cols, &t)
    }
}

fn integer_rows(m: &QMatrix) -> Vec<Vec<BigInt>> {
    let dense = m.to_dense();
    dense
        .into_iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.into_iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

/// Exact rank by fraction-free Bareiss elimination.
pub fn rank(m: &QMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 || m.is_zero() {
        return 0;
    }
    let t;
    let src = if m.rows > m.cols {
        t = m.transpose();
        &t
    } else {
        m
    };
    bareiss_rank(&mut integer_rows(src))
}

fn bareiss_rank(a: &mut [Vec<BigInt>]) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            let (top, bot) = a.split_at_mut(i);
            let piv = &top[r];
            let row = &mut bot[0];
            for k in c + 1..cols {
                let v = &piv[c] * &row[k] - &row[c] * &piv[k];
                row[k] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form over Q. Returns the nonzero rows and pivot columns.
pub fn rref(m: &QMatrix) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut a = m.to_dense();
    let rows = m.rows;
    let cols = m.cols;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let iv = a[r][c].recip();
        for x in a[r][c..].iter_mut() {
            *x *= &iv;
        }
        let piv = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for k in c..cols {
                if !piv[k].is_zero() {
                    row[k] -= &f * &piv[k];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Basis of `ker M` as the columns of the result. Columns correspond to free
/// variables, so the result is already in a canonical form.
pub fn kernel_basis(m: &QMatrix) -> QMatrix {
    let (red, pivots) = rref(m);
    let mut is_piv = vec![false; m.cols];
    for &c in &pivots {
        is_piv[c] = true;
    }
    let mut cols = Vec::new();
    for fc in (0..m.cols).filter(|&c| !is_piv[c]) {
        let mut v = vec![Q::zero(); m.cols];
        v[fc] = Q::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -red[i][fc].clone();
        }
        cols.push(v);
    }
    QMatrix::from_columns(m.cols, &cols)
}

/// Solves `A x = b`; returns `None` when inconsistent. Free variables are 0.
pub fn solve(a: &QMatrix, b: &[Q]) -> Option<Vec<Q>> {
    assert_eq!(b.len(), a.rows);
    let rhs = QMatrix::from_columns(a.rows, &[b.to_vec()]);
    let aug = a.hcat(&rhs);
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![Q::zero(); a.cols];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = red[i][a.cols].clone();
    }
    Some(x)
}

/// Columns of `m` that form a basis of its column space, greedily from left.
fn independent_columns(cols: &[Vec<Q>], start: &[Vec<Q>]) -> Vec<usize> {
    let dim = cols.first().or(start.first()).map_or(0, |c| c.len());
    let mut basis: Vec<Vec<Q>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let reduce = |v: &mut Vec<Q>, basis: &[Vec<Q>], pivots: &[usize]| {
        for (b, &p) in basis.iter().zip(pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for k in 0..dim {
                    if !b[k].is_zero() {
                        v[k] -= &f * &b[k];
                    }
                }
            }
        }
    };
    let push = |mut v: Vec<Q>, basis: &mut Vec<Vec<Q>>, pivots: &mut Vec<usize>| -> bool {
        reduce(&mut v, basis, pivots);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let iv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &iv;
        }
        basis.push(v);
        pivots.push(p);
        true
    };
    for v in start {
        push(v.clone(), &mut basis, &mut pivots);
    }
    let mut chosen = Vec::new();
    for (i, v) in cols.iter().enumerate() {
        if push(v.clone(), &mut basis, &mut pivots) {
            chosen.push(i);
        }
    }
    chosen
}

/// A quotient Z/B of subspaces of Q^ambient, with B ⊆ Z.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub ambient_dim: usize,
    pub cycles: QMatrix,
    pub boundaries: QMatrix,
}

impl Subquotient {
    pub fn new(cycles: QMatrix, boundaries: QMatrix) -> Result<Self, LinalgError> {
        if cycles.rows != boundaries.rows {
            return Err(LinalgError::Shape(format!(
                "cycles in Q^{} but boundaries in Q^{}",
                cycles.rows, boundaries.rows
            )));
        }
        if rank(&cycles.hcat(&boundaries)) != rank(&cycles) {
            return Err(LinalgError::NotContained);
        }
        Ok(Subquotient { ambient_dim: cycles.rows, cycles, boundaries })
    }

    pub fn dim(&self) -> usize {
        rank(&self.cycles) - rank(&self.boundaries)
    }

    /// Cycle vectors whose classes form a basis of Z/B.
    pub fn representatives(&self) -> Vec<Vec<Q>> {
        let zc = self.cycles.columns();
        let bc = self.boundaries.columns();
        independent_columns(&zc, &bc).into_iter().map(|i| zc[i].clone()).collect()
    }

    /// Coordinates of the class of `v` in the basis `reps`, or `None` if `v`
    /// is not a cycle modulo boundaries.
    pub fn coordinates(&self, reps: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
        let mut cols = reps.to_vec();
        cols.extend(self.boundaries.columns());
        let a = QMatrix::from_columns(self.ambient_dim, &cols);
        let x = solve(&a, v)?;
        Some(x[..reps.len()].to_vec())
    }
}

/// `rank(Z) - rank(B)` after checking `B ⊆ Z`.
pub fn subquotient_dim(z: &QMatrix, b: &QMatrix) -> Result<usize, LinalgError> {
    Ok(Subquotient::new(z.clone(), b.clone())?.dim())
}

/// Matrix of the map induced by `ambient_map` from `source` to `target`, in
/// the bases returned by `representatives` (rows index target classes).
pub fn induced_map(
    source: &Subquotient,
    target: &Subquotient,
    ambient_map: &QMatrix,
) -> Result<QMatrix, LinalgError> {
    if ambient_map.cols != source.ambient_dim || ambient_map.rows != target.ambient_dim {
        return Err(LinalgError::Shape(format!(
            "map is {}x{}, subquotients live in Q^{} and Q^{}",
            ambient_map.rows, ambient_map.cols, source.ambient_dim, target.ambient_dim
        )));
    }
    let sreps = source.representatives();
    let treps = target.representatives();
    // Boundaries must go to boundaries for the map to descend.
    for b in source.boundaries.columns() {
        let img = ambient_map.mul_vec(&b);
        let c = target.coordinates(&treps, &img).ok_or(LinalgError::NotWellDefined)?;
        if c.iter().any(|x| !x.is_zero()) {
            return Err(LinalgError::NotWellDefined);
        }
    }
    let mut cols = Vec::with_capacity(sreps.len());
    for s in &sreps {
        let img = ambient_map.mul_vec(s);
        cols.push(target.coordinates(&treps, &img).ok_or(LinalgError::NotWellDefined)?);
    }
    Ok(QMatrix::from_columns(treps.len(), &cols))
}

pub fn is_integral(x: &Q) -> bool {
    x.denom().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&QMatrix::from_i64(&[vec![1, 2], vec![2, 4]])), 1);
        assert_eq!(rank(&QMatrix::zeros(3, 3)), 0);
        assert_eq!(rank(&QMatrix::identity(4)), 4);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&QMatrix::from_i64(&[vec![1, 1]]));
        assert_eq!(k.cols, 1);
        assert_eq!(k.columns()[0], vec![q(-1), q(1)]);
        assert_eq!(kernel_basis(&QMatrix::identity(3)).cols, 0);
        let m = QMatrix::from_i64(&[vec![1, 2], vec![2, 4]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols, 1);
        let v = &k.columns()[0];
        // spans (2, -1)
        assert_eq!(&v[0] * q(-1), &v[1] * q(2));
        assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn subquotient_examples() {
        assert_eq!(subquotient_dim(&QMatrix::identity(3), &QMatrix::zeros(3, 0)), Ok(3));
        let z = QMatrix::identity(3);
        assert_eq!(subquotient_dim(&z, &z), Ok(0));
        let plane = QMatrix::from_i64(&[vec![1, 0], vec![0, 1], vec![0, 0]]);
        let line = QMatrix::from_i64(&[vec![1], vec![1], vec![0]]);
        assert_eq!(subquotient_dim(&plane, &line), Ok(1));
        let out = QMatrix::from_i64(&[vec![0], vec![0], vec![1]]);
        assert_eq!(subquotient_dim(&plane, &out), Err(LinalgError::NotContained));
    }

    #[test]
    fn induced_map_examples() {
        let sq = Subquotient::new(QMatrix::identity(2), QMatrix::zeros(2, 0)).unwrap();
        let m = induced_map(&sq, &sq, &QMatrix::identity(2)).unwrap();
        assert_eq!(m, QMatrix::identity(2));
        let z = induced_map(&sq, &sq, &QMatrix::zeros(2, 2)).unwrap();
        assert!(z.is_zero());
        let empty = Subquotient::new(QMatrix::zeros(2, 0), QMatrix::zeros(2, 0)).unwrap();
        let e = induced_map(&empty, &sq, &QMatrix::identity(2)).unwrap();
        assert_eq!((e.rows, e.cols), (2, 0));
    }

    #[test]
    fn bareiss_matches_rref() {
        let m = QMatrix::from_i64(&[vec![2, 4, 1], vec![1, 2, 7], vec![3, 6, 8], vec![0, 0, 5]]);
        assert_eq!(rank(&m), rref(&m).1.len());
        assert_eq!(rank(&m), 2);
    }
}
