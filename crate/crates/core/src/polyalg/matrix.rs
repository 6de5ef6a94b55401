use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

/// Dense row-major matrix over a ring.
#[derive(Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| R::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { R::one() } else { R::zero() })
    }

    pub fn diagonal(values: &[R]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i].clone() } else { R::zero() })
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

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<S: Ring>(&self, f: impl FnMut(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<S: Ring, E>(&self, f: impl FnMut(&R) -> std::result::Result<S, E>) -> std::result::Result<Matrix<S>, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<std::result::Result<_, _>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = R::zero();
            for k in 0..self.cols {
                let a = &self[(i, k)];
                let b = &other[(k, j)];
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * b.clone();
            }
            acc
        }))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(R, R) -> R) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, k: &R) -> Self {
        self.map(|a| a.clone() * k.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn trace(&self) -> Result<R> {
        let n = self.ensure_square()?;
        Ok((0..n).fold(R::zero(), |acc, i| acc + self[(i, i)].clone()))
    }

    /// Determinant by fraction-free (Bareiss) elimination. Every division
    /// is exact in the ring.
    pub fn det(&self) -> Result<R> {
        let n = self.ensure_square()?;
        if n == 0 {
            return Ok(R::one());
        }
        let mut a = self.clone();
        let mut negate = false;
        let mut prev = R::one();
        for k in 0..n - 1 {
            let Some(p) = pick_pivot(&a, k, k) else {
                return Ok(R::zero());
            };
            if p != k {
                a.swap_rows(p, k);
                negate = !negate;
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                let aik = a[(i, k)].clone();
                for j in k + 1..n {
                    let num = pivot.clone() * a[(i, j)].clone() - aik.clone() * a[(k, j)].clone();
                    a[(i, j)] = num
                        .div_exact(&prev)
                        .expect("Bareiss division is exact");
                }
                a[(i, k)] = R::zero();
            }
            prev = pivot;
        }
        let d = a[(n - 1, n - 1)].clone();
        Ok(if negate { -d } else { d })
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Row index `>= from` in column `col` with the cheapest nonzero pivot.
fn pick_pivot<R: Ring>(a: &Matrix<R>, col: usize, from: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in from..a.rows {
        if let Some(cost) = a[(i, col)].pivot_cost() {
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((i, cost));
            }
        }
    }
    best.map(|b| b.0)
}

impl<F: Field> Matrix<F> {
    pub fn inverse(&self) -> Result<Self> {
        F::invert(self)
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn gauss_jordan_inverse(&self) -> Result<Self> {
        let n = self.ensure_square()?;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let p = pick_pivot(&a, k, k).ok_or(Error::Singular)?;
            a.swap_rows(p, k);
            inv.swap_rows(p, k);
            let r = a[(k, k)].recip().ok_or(Error::Singular)?;
            for j in 0..n {
                if j > k {
                    a[(k, j)] = a[(k, j)].clone() * r.clone();
                }
                inv[(k, j)] = inv[(k, j)].clone() * r.clone();
            }
            a[(k, k)] = F::one();
            for i in 0..n {
                if i == k {
                    continue;
                }
                let factor = a[(i, k)].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    if j > k {
                        let v = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                        a[(i, j)] = v;
                    }
                    let w = inv[(k, j)].clone();
                    if !w.is_zero() {
                        let v = inv[(i, j)].clone() - factor.clone() * w;
                        inv[(i, j)] = v;
                    }
                }
                a[(i, k)] = F::zero();
            }
        }
        Ok(inv)
    }

    /// Solves `self * x = rhs` for a square nonsingular matrix.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.ensure_square()?;
        if rhs.rows != n {
            return Err(Error::Dimension("right-hand side rows".into()));
        }
        let m = rhs.cols;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for k in 0..n {
            let p = pick_pivot(&a, k, k).ok_or(Error::Singular)?;
            a.swap_rows(p, k);
            b.swap_rows(p, k);
            let r = a[(k, k)].recip().ok_or(Error::Singular)?;
            for i in k + 1..n {
                let factor = a[(i, k)].clone() * r.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                }
                for j in 0..m {
                    let v = b[(i, j)].clone() - factor.clone() * b[(k, j)].clone();
                    b[(i, j)] = v;
                }
                a[(i, k)] = F::zero();
            }
        }
        let mut x = Self::zeros(n, m);
        for j in 0..m {
            for i in (0..n).rev() {
                let mut acc = b[(i, j)].clone();
                for k in i + 1..n {
                    if !a[(i, k)].is_zero() {
                        acc = acc - a[(i, k)].clone() * x[(k, j)].clone();
                    }
                }
                x[(i, j)] = acc.div_exact(&a[(i, i)]).ok_or(Error::Singular)?;
            }
        }
        Ok(x)
    }
}

impl<R> Index<(usize, usize)> for Matrix<R> {
    type Output = R;

    fn index(&self, (i, j): (usize, usize)) -> &R {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<R> IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<R: fmt::Debug> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.rows {
            list.entry(&&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        list.finish()
    }
}

impl Matrix<crate::Expr> {
    /// Exact evaluation of every entry at a rational point.
    pub fn eval(&self, point: &[crate::Rational]) -> Result<Matrix<crate::Rational>> {
        self.try_map(|e| e.eval(point))
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<Matrix<f64>> {
        self.try_map(|e| e.eval_f64(point))
    }

    /// Entry-wise variable substitution, see [`crate::Expr::substitute`].
    pub fn substitute(&self, values: &[crate::Expr]) -> Result<Self> {
        self.try_map(|e| e.substitute(values))
    }
}

/// Inverse of a matrix of rational functions; see [`fraction_free_solve`].
pub fn fraction_free_inverse(m: &Matrix<crate::Expr>) -> Result<Matrix<crate::Expr>> {
    let n = m.ensure_square()?;
    fraction_free_solve(m, &Matrix::identity(n))
}

/// Solves `m x = rhs` over rational functions without intermediate
/// fractions: rows are cleared of denominators, the polynomial system is
/// reduced by fraction-free Gauss-Jordan elimination (every division exact),
/// and each entry is put in lowest terms once at the end.
pub fn fraction_free_solve(m: &Matrix<crate::Expr>, rhs: &Matrix<crate::Expr>) -> Result<Matrix<crate::Expr>> {
    use crate::symexpr::{gcd, Poly};
    let n = m.ensure_square()?;
    if rhs.rows() != n {
        return Err(Error::Dimension("right-hand side rows".into()));
    }
    let cols = rhs.cols();
    let lcm = |acc: Poly, d: &Poly| {
        let g = gcd(&acc, d);
        acc.mul(&d.div_exact(&g).expect("gcd divides"))
    };
    // rhs = R / c_j column by column, R polynomial
    let col_scales: Vec<Poly> = (0..cols)
        .map(|j| (0..n).fold(Poly::one(), |acc, i| lcm(acc, rhs[(i, j)].denom())))
        .collect();
    // s_i = lcm of the denominators in row i of m
    let row_scales: Vec<Poly> = (0..n)
        .map(|i| m.row(i).iter().fold(Poly::one(), |acc, e| lcm(acc, e.denom())))
        .collect();
    let width = n + cols;
    let mut a: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            let s = &row_scales[i];
            let mut row: Vec<Poly> = m
                .row(i)
                .iter()
                .map(|e| e.numer().mul(&s.div_exact(e.denom()).expect("lcm")))
                .collect();
            row.extend((0..cols).map(|j| {
                let e = &rhs[(i, j)];
                e.numer().mul(&col_scales[j].div_exact(e.denom()).expect("lcm")).mul(s)
            }));
            row
        })
        .collect();
    let mut prev = Poly::one();
    for k in 0..n {
        let p = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| a[i][k].len())
            .ok_or(Error::Singular)?;
        a.swap(p, k);
        let pivot_row = a[k].clone();
        let pivot = pivot_row[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = std::mem::take(&mut row[k]);
            for j in k + 1..width {
                let mut v = pivot.mul(&row[j]);
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    v = v.sub(&factor.mul(&pivot_row[j]));
                }
                row[j] = v.div_exact(&prev).expect("fraction-free division is exact");
            }
            // columns left of k are zero off the diagonal; the diagonal
            // entries scale from prev to pivot
            if i < k {
                row[i] = pivot.clone();
            }
        }
        prev = pivot;
    }
    // Left block is now prev·I.
    Ok(Matrix::from_fn(n, cols, |i, j| {
        crate::Expr::from_polys(std::mem::take(&mut a[i][n + j]), prev.mul(&col_scales[j]))
    }))
}
