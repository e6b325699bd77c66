//! Dense matrices over a [`FieldCtx`] with exact Gaussian elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(ctx: FieldCtx, rows: usize, cols: usize) -> Matrix {
        Matrix { ctx, rows, cols, data: vec![ctx.zero(); rows * cols] }
    }

    pub fn identity(ctx: FieldCtx, n: usize) -> Matrix {
        Matrix::scalar(ctx, n, &ctx.one())
    }

    pub fn scalar(ctx: FieldCtx, n: usize, s: &Scalar) -> Matrix {
        let mut m = Matrix::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = s.clone();
        }
        m
    }

    pub fn diagonal(ctx: FieldCtx, entries: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(ctx, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(ctx: FieldCtx, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { ctx, rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints(ctx: FieldCtx, rows: &[&[i64]]) -> Matrix {
        let data = rows.iter().map(|row| row.iter().map(|&v| ctx.from_int(v)).collect()).collect();
        Matrix::from_rows(ctx, data).expect("rectangular literal")
    }

    pub fn from_fn(ctx: FieldCtx, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ctx, rows, cols, data }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
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

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Matrix {
        self.submatrix(0, j, self.rows, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| {
                let x = &self[(i, j)];
                if i == j { x.is_one() } else { x.is_zero() }
            }))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.ctx, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// `m^J`: the transpose with the involution applied entrywise.
    pub fn conj_transpose(&self) -> Matrix {
        Matrix::from_fn(self.ctx, self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix { ctx: self.ctx, rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        self.map(|x| s * x)
    }

    pub fn neg(&self) -> Matrix {
        self.map(|x| -x)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { ctx: self.ctx, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference shape");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { ctx: self.ctx, rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other))
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(self.ctx, rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack rows");
        Matrix::from_fn(self.ctx, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack cols");
        Matrix::from_fn(self.ctx, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        })
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        Matrix::from_fn(self.ctx, r + other.rows, c + other.cols, |i, j| {
            if i < r && j < c {
                self[(i, j)].clone()
            } else if i >= r && j >= c {
                other[(i - r, j - c)].clone()
            } else {
                self.ctx.zero()
            }
        })
    }

    /// `[[a, b], [c, d]]` from four blocks.
    pub fn blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        a.hstack(b).vstack(&c.hstack(d))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let delta = &f * &m[(r, j)];
                        m[(i, j)] = &m[(i, j)] - &delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Scalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let mut det = self.ctx.one();
        for c in 0..m.cols {
            let Some(pr) = (c..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                return self.ctx.zero();
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("pivot is nonzero");
            for i in c + 1..m.rows {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] * &inv;
                    for j in c..m.cols {
                        let delta = &f * &m[(c, j)];
                        m[(i, j)] = &m[(i, j)] - &delta;
                    }
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let (r, pivots) = self.hstack(&Matrix::identity(self.ctx, n)).rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularInput);
        }
        Ok(r.submatrix(0, n, n, n))
    }

    /// Columns spanning the right kernel.
    pub fn kernel(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.ctx, self.cols, free.len());
        for (idx, &f) in free.iter().enumerate() {
            k[(f, idx)] = self.ctx.one();
            for (row, &p) in pivots.iter().enumerate() {
                k[(p, idx)] = -&r[(row, f)];
            }
        }
        k
    }

    /// Reduced column echelon form; canonical for the column span.
    pub fn column_echelon(&self) -> Matrix {
        let (r, pivots) = self.transpose().rref();
        r.submatrix(0, 0, pivots.len(), r.cols).transpose()
    }

    /// Columns of the identity completing the column span to the whole space.
    pub fn complement_columns(&self) -> Matrix {
        let (_, pivots) = self.hstack(&Matrix::identity(self.ctx, self.rows)).rref();
        let idx: Vec<usize> = pivots.into_iter().filter(|&p| p >= self.cols).map(|p| p - self.cols).collect();
        let mut out = Matrix::zeros(self.ctx, self.rows, idx.len());
        for (k, &i) in idx.iter().enumerate() {
            out[(i, k)] = self.ctx.one();
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn random<R: Rng + ?Sized>(ctx: FieldCtx, rng: &mut R, rows: usize, cols: usize, bound: i64) -> Matrix {
        Matrix::from_fn(ctx, rows, cols, |_, _| ctx.random(rng, bound))
    }

    pub fn random_invertible<R: Rng + ?Sized>(ctx: FieldCtx, rng: &mut R, n: usize, bound: i64) -> Matrix {
        loop {
            let m = Matrix::random(ctx, rng, n, n, bound);
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// Every `n×n` matrix over a finite field, in a fixed order.
    pub fn all_matrices(ctx: FieldCtx, rows: usize, cols: usize) -> Option<Vec<Matrix>> {
        let elems = ctx.elements()?;
        let q = elems.len();
        let cells = rows * cols;
        let total = q.checked_pow(cells as u32)?;
        let mut out = Vec::with_capacity(total);
        for mut code in 0..total {
            let mut data = Vec::with_capacity(cells);
            for _ in 0..cells {
                data.push(elems[code % q].clone());
                code /= q;
            }
            out.push(Matrix { ctx, rows, cols, data });
        }
        Some(out)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_and_determinant() {
        let ctx = FieldCtx::rationals();
        let m = Matrix::from_ints(ctx, &[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det(), ctx.from_int(18));
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
        let s = Matrix::from_ints(ctx, &[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse(), Err(Error::SingularInput));
        assert_eq!(s.det(), ctx.zero());
    }

    #[test]
    fn kernel_and_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ctx in [FieldCtx::rationals(), FieldCtx::prime(3).unwrap(), FieldCtx::frobenius(3).unwrap()] {
            for _ in 0..50 {
                let a = Matrix::random(ctx, &mut rng, 3, 2, 2);
                let m = a.mul(&Matrix::random(ctx, &mut rng, 2, 4, 2));
                let k = m.kernel();
                assert!(m.mul(&k).is_zero());
                assert_eq!(k.cols() + m.rank(), 4);
                let c = m.column_echelon();
                assert_eq!(c.cols(), m.rank());
                assert_eq!(c.hstack(&c.complement_columns()).rank(), 3);
            }
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for ctx in [FieldCtx::rationals(), FieldCtx::quad(-2).unwrap(), FieldCtx::frobenius(5).unwrap()] {
            for _ in 0..50 {
                let a = Matrix::random(ctx, &mut rng, 3, 3, 3);
                let b = Matrix::random(ctx, &mut rng, 3, 3, 3);
                assert_eq!(a.mul(&b).det(), &a.det() * &b.det());
                assert_eq!(a.conj_transpose().det(), a.det().conj());
            }
        }
    }

    #[test]
    fn enumerates_all_small_matrices() {
        let ctx = FieldCtx::prime(3).unwrap();
        let all = Matrix::all_matrices(ctx, 2, 2).unwrap();
        assert_eq!(all.len(), 81);
        // |GL_2(F_3)| = (9-1)(9-3)
        assert_eq!(all.iter().filter(|m| m.is_invertible()).count(), 48);
    }
}
