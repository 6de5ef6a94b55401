use crate::error::{Error, Result};
use crate::polyalg::Matrix;
use crate::scalar::{Field, Rational, Ring};
use crate::Expr;

/// A (1,1) tensor field `A^i_j`, stored with the upper index as the row.
#[derive(Clone, PartialEq, Debug)]
pub struct OperatorField<F = Expr> {
    a: Matrix<F>,
}

impl<F: Ring> OperatorField<F> {
    /// Rejects non-square input and operators whose determinant vanishes
    /// identically.
    pub fn new(a: Matrix<F>) -> Result<Self> {
        a.ensure_square()?;
        if a.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(OperatorField { a })
    }

    pub fn identity(n: usize) -> Self {
        OperatorField { a: Matrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.a
    }

    pub fn into_matrix(self) -> Matrix<F> {
        self.a
    }

    /// `A^i_j` with 0-based indices.
    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.a[(i, j)]
    }
}

impl OperatorField<Expr> {
    pub fn eval(&self, point: &[Rational]) -> Result<Matrix<Rational>> {
        self.a.eval(point)
    }
}

/// What to do with a connection whose input is not symmetric in its lower
/// indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Reject,
    Symmetrize,
}

/// Three-index array `Γ^k_ij`, symmetric in `i, j`. Also used for `θ^r_pq`
/// and the right-hand sides `w^r_ij`.
#[derive(Clone, PartialEq, Debug)]
pub struct Connection<F = Expr> {
    n: usize,
    data: Vec<F>,
}

impl<F: Field> Connection<F> {
    pub fn zero(n: usize) -> Self {
        Connection {
            n,
            data: vec![F::zero(); n * n * n],
        }
    }

    /// Builds from `f(k, i, j)` evaluated on `i <= j` only; the other half
    /// is mirrored.
    pub fn from_lower(n: usize, mut f: impl FnMut(usize, usize, usize) -> F) -> Self {
        let mut c = Self::zero(n);
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = f(k, i, j);
                    if i != j {
                        c.data[k * n * n + j * n + i] = v.clone();
                    }
                    c.data[k * n * n + i * n + j] = v;
                }
            }
        }
        c
    }

    /// Builds from a full `n³` array indexed `[k][i][j]`.
    pub fn from_full(n: usize, data: Vec<F>, policy: Symmetry) -> Result<Self> {
        if data.len() != n * n * n {
            return Err(Error::Dimension(format!(
                "connection needs {} components, got {}",
                n * n * n,
                data.len()
            )));
        }
        let at = |k: usize, i: usize, j: usize| &data[k * n * n + i * n + j];
        let half = F::from_ratio(1, 2);
        for k in 0..n {
            for i in 0..n {
                for j in i + 1..n {
                    if (at(k, i, j).clone() - at(k, j, i).clone()).is_zero() {
                        continue;
                    }
                    if policy == Symmetry::Reject {
                        return Err(Error::AsymmetricConnection(format!(
                            "({},{},{})",
                            k + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(Self::from_lower(n, |k, i, j| {
            if i == j {
                at(k, i, j).clone()
            } else {
                (at(k, i, j).clone() + at(k, j, i).clone()) * half.clone()
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ^k_ij` with 0-based indices.
    pub fn get(&self, k: usize, i: usize, j: usize) -> &F {
        &self.data[k * self.n * self.n + i * self.n + j]
    }

    pub fn components(&self) -> &[F] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn map<G: Field>(&self, f: impl FnMut(&F) -> G) -> Connection<G> {
        Connection {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<G: Field>(&self, f: impl FnMut(&F) -> Result<G>) -> Result<Connection<G>> {
        Ok(Connection {
            n: self.n,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// The matrix `(Θ_q)_{r,p} = θ^r_pq` for a fixed last index `q`.
    pub fn slice(&self, q: usize) -> Matrix<F> {
        Matrix::from_fn(self.n, self.n, |r, p| self.get(r, p, q).clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension("connection dimensions differ".into()));
        }
        Ok(Connection {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }
}

impl Connection<Expr> {
    pub fn eval(&self, point: &[Rational]) -> Result<Connection<Rational>> {
        self.try_map(|e| e.eval(point))
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<Connection<f64>> {
        self.try_map(|e| e.eval_f64(point))
    }

    pub fn substitute(&self, values: &[Expr]) -> Result<Self> {
        self.try_map(|e| e.substitute(values))
    }
}

/// Flat numbering of the pairs `i <= j`, ordered by `j` and then by `i`:
/// (1,1), (1,2), (2,2), (1,3), ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPairIndex {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl SymPairIndex {
    pub fn new(n: usize) -> Self {
        let pairs = (0..n).flat_map(|j| (0..=j).map(move |i| (i, j))).collect();
        SymPairIndex { n, pairs }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `n(n+1)/2`
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The 0-based pair `(i, j)`, `i <= j`, at a flat position.
    pub fn pair(&self, flat: usize) -> (usize, usize) {
        self.pairs[flat]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Flat position of the unordered pair `{i, j}`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        j * (j + 1) / 2 + i
    }
}

/// Matrix of a linear map on symmetric bilinear forms, in the
/// [`SymPairIndex`] basis.
pub type SymOperator<F = Expr> = Matrix<F>;

/// The four-index tensor `Λ^{pq}_{ij}` acting on bilinear forms.
#[derive(Clone, PartialEq, Debug)]
pub struct LambdaTensor<F = Expr> {
    n: usize,
    data: Vec<F>,
}

impl<F: Field> LambdaTensor<F> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Λ^{pq}_{ij}` with 0-based indices.
    pub fn get(&self, p: usize, q: usize, i: usize, j: usize) -> &F {
        let n = self.n;
        &self.data[((p * n + q) * n + i) * n + j]
    }

    /// `(Λω)_{ij} = Σ_{p,q} Λ^{pq}_{ij} ω_pq` for a full n×n form.
    pub fn apply(&self, omega: &Matrix<F>) -> Matrix<F> {
        let n = self.n;
        Matrix::from_fn(n, n, |i, j| {
            let mut acc = F::zero();
            for p in 0..n {
                for q in 0..n {
                    acc = acc + self.get(p, q, i, j).clone() * omega[(p, q)].clone();
                }
            }
            acc
        })
    }
}

/// `Λ^{pq}_{ij} = (A^p_i δ^q_j + A^p_j δ^q_i + A^q_i δ^p_j + A^q_j δ^p_i) / 4`
pub fn build_lambda<F: Field>(a: &OperatorField<F>) -> LambdaTensor<F> {
    let n = a.dim();
    let quarter = F::from_ratio(1, 4);
    let mut data = Vec::with_capacity(n * n * n * n);
    for p in 0..n {
        for q in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = F::zero();
                    if q == j {
                        acc = acc + a.get(p, i).clone();
                    }
                    if q == i {
                        acc = acc + a.get(p, j).clone();
                    }
                    if p == j {
                        acc = acc + a.get(q, i).clone();
                    }
                    if p == i {
                        acc = acc + a.get(q, j).clone();
                    }
                    data.push(acc * quarter.clone());
                }
            }
        }
    }
    LambdaTensor { n, data }
}

/// Restriction of Λ to symmetric forms, acting on coordinates
/// `c_{p<=q} = θ_pq`: `M[(i,j),(p,q)] = Λ^{pq}_{ij}·(2 if p<q else 1)`.
pub fn lambda_sym_matrix<F: Field>(lambda: &LambdaTensor<F>, idx: &SymPairIndex) -> SymOperator<F> {
    let two = F::from_i64(2);
    Matrix::from_fn(idx.len(), idx.len(), |row, col| {
        let (i, j) = idx.pair(row);
        let (p, q) = idx.pair(col);
        let v = lambda.get(p, q, i, j).clone();
        if p < q {
            v * two.clone()
        } else {
            v
        }
    })
}
