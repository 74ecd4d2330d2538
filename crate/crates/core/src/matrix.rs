//! Dense row-major matrices, exact rank by fraction-free elimination, and
//! singular-value rank for complex matrices.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    entries: Vec<F>,
}

impl<F: Scalar> Mat<F> {
    pub fn new(rows: usize, cols: usize, entries: Vec<F>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Consistency(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Mat {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    /// Builds from rows of equal length; `cols` is needed for the empty case.
    pub fn from_rows(rows: Vec<Vec<F>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut entries = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Consistency(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Mat::new(r, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Consistency(format!(
                "cannot stack {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Mat::new(self.rows + other.rows, self.cols, entries)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Consistency("dimension mismatch in product".into()));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        Ok(out)
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Mat<G> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn to_c64(&self) -> Mat<C64> {
        self.map(|x| x.to_c64())
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_c64())
    }
}

impl<F> std::ops::Index<(usize, usize)> for Mat<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.entries[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.entries[i * self.cols + j]
    }
}

impl Mat<Rational> {
    /// Exact rank. Rows are scaled to integers, then Bareiss elimination keeps
    /// every intermediate entry integral.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                row.iter()
                    .map(|q| q.numer() * (&lcm / q.denom()))
                    .collect()
            })
            .collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, piv);
            for r in rank + 1..rows {
                for c in col + 1..cols {
                    let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                    a[r][c] = v / &prev;
                }
                a[r][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form and pivot columns. Zero rows are dropped.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.row_vecs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == a.len() {
                break;
            }
            let Some(piv) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(r, piv);
            let inv = a[r][col].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..a.len() {
                if i != r && !a[i][col].is_zero() {
                    let f = a[i][col].clone();
                    for c in 0..self.cols {
                        let v = &f * &a[r][c];
                        a[i][c] -= v;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        a.truncate(r);
        (
            Mat::from_rows(a, self.cols).expect("rows have equal length"),
            pivots,
        )
    }

    /// Determinant by Gaussian elimination over Q.
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut a = self.row_vecs();
        let n = self.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= &a[col][col];
            let inv = a[col][col].recip();
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] * &inv;
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
            }
        }
        det
    }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Numeric rank: number of singular values above `threshold * sigma_max`.
///
/// Fails with [`Error::AmbiguousRank`] when some singular value lies within a
/// factor `margin` of the threshold on either side.
pub fn numeric_rank(m: &DMatrix<C64>, threshold: f64, margin: f64) -> Result<usize> {
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("numeric_rank"));
    }
    let s = singular_values(m);
    let Some(&smax) = s.first() else {
        return Ok(0);
    };
    if smax == 0.0 {
        return Ok(0);
    }
    let cut = threshold * smax;
    for &v in &s {
        if v > cut / margin && v < cut * margin {
            return Err(Error::AmbiguousRank {
                value: v / smax,
                threshold,
            });
        }
    }
    Ok(s.iter().filter(|&&v| v > cut).count())
}

/// Orthonormal basis (as rows) for the row space of `m`, by SVD.
pub fn orthonormal_rows(m: &DMatrix<C64>, threshold: f64) -> DMatrix<C64> {
    if m.nrows() == 0 {
        return DMatrix::zeros(0, m.ncols());
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > threshold * smax)
        .map(|(i, _)| i)
        .collect();
    DMatrix::from_fn(keep.len(), m.ncols(), |i, j| v_t[(keep[i], j)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Mat<Rational> {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
            cols,
        )
        .unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::<Rational>::identity(3).rank(), 3);
        assert_eq!(Mat::<Rational>::zeros(2, 4).rank(), 0);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Mat::<Rational>::zeros(0, 3).rank(), 0);
    }

    #[test]
    fn rank_with_fractions() {
        let a = Mat::from_rows(
            vec![vec![rat(1, 2), rat(1, 3)], vec![rat(3, 2), int(1)]],
            2,
        )
        .unwrap();
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn numeric_rank_examples() {
        let a = m(&[&[1, 2], &[2, 4]]).to_nalgebra();
        assert_eq!(numeric_rank(&a, 1e-8, 10.0).unwrap(), 1);
        let b = Mat::<Rational>::identity(3).to_nalgebra();
        assert_eq!(numeric_rank(&b, 1e-8, 10.0).unwrap(), 3);
        let mut c = Mat::<C64>::identity(2);
        c[(1, 1)] = C64::new(1e-8, 0.0);
        assert!(matches!(
            numeric_rank(&c.to_nalgebra(), 1e-8, 10.0),
            Err(Error::AmbiguousRank { .. })
        ));
    }

    #[test]
    fn rref_and_determinant() {
        let a = m(&[&[0, 2, 4], &[1, 1, 1], &[1, 3, 5]]);
        let (r, piv) = a.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, m(&[&[1, 0, -1], &[0, 1, 2]]));
        assert_eq!(a.determinant(), int(0));
        assert_eq!(m(&[&[2, 1], &[1, 3]]).determinant(), int(5));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant(), int(-1));
    }

    fn arb_mat() -> impl Strategy<Value = Mat<Rational>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
                Mat::new(r, c, v.into_iter().map(int).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_invariant_under_transpose_and_permutation(a in arb_mat(), seed in 0u64..1000) {
            let r = a.rank();
            prop_assert_eq!(a.transpose().rank(), r);
            let mut rows = a.row_vecs();
            let k = (seed as usize) % rows.len();
            rows.rotate_left(k);
            for row in rows.iter_mut() {
                let k2 = (seed as usize / 7) % row.len();
                row.rotate_left(k2);
            }
            let b = Mat::from_rows(rows, a.cols()).unwrap();
            prop_assert_eq!(b.rank(), r);
            prop_assert_eq!(a.rref().1.len(), r);
        }
    }
}
