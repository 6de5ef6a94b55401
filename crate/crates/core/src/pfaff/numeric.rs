use num_traits::ToPrimitive;

use crate::geometry::{Connection, OperatorField};
use crate::polyalg::Matrix;
use crate::symexpr::Poly;
use crate::Expr;

use super::Real;

/// A polynomial with float coefficients, for fast repeated evaluation.
#[derive(Clone, Debug)]
struct FloatPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl FloatPoly {
    fn new(p: &Poly) -> Self {
        FloatPoly {
            terms: p
                .terms()
                .iter()
                .map(|(e, c)| {
                    let powers = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(i, &k)| (i, k as i32))
                        .collect();
                    (c.to_f64().unwrap_or(f64::NAN), powers)
                })
                .collect(),
        }
    }

    fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, powers)| powers.iter().fold(*c, |acc, &(i, k)| acc * y[i].powi(k)))
            .sum()
    }
}

/// A rational function compiled for float evaluation.
#[derive(Clone, Debug)]
pub(crate) struct FloatExpr {
    numer: FloatPoly,
    denom: FloatPoly,
}

impl FloatExpr {
    pub(crate) fn new(e: &Expr) -> Self {
        FloatExpr {
            numer: FloatPoly::new(e.numer()),
            denom: FloatPoly::new(e.denom()),
        }
    }

    /// `None` at a pole.
    pub(crate) fn eval(&self, y: &[f64]) -> Option<f64> {
        let d = self.denom.eval(y);
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let v = self.numer.eval(y) / d;
        v.is_finite().then_some(v)
    }
}

/// θ compiled for evaluation of the slices `(Θ_q)_{r,p} = θ^r_pq`.
#[derive(Clone, Debug)]
pub(crate) struct FloatConnection {
    n: usize,
    comps: Vec<FloatExpr>,
}

impl FloatConnection {
    pub(crate) fn new(c: &Connection) -> Self {
        FloatConnection {
            n: c.dim(),
            comps: c.components().iter().map(FloatExpr::new).collect(),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.n
    }

    /// `Θ_q` at `y`; `None` at a pole.
    pub(crate) fn slice<F: Real>(&self, q: usize, y: &[F]) -> Option<Matrix<F>> {
        let n = self.n;
        let yf: Vec<f64> = y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        let mut out = Matrix::zeros(n, n);
        for r in 0..n {
            for p in 0..n {
                let v = self.comps[r * n * n + p * n + q].eval(&yf)?;
                out[(r, p)] = F::from(v)?;
            }
        }
        Some(out)
    }

    pub(crate) fn get<F: Real>(&self, k: usize, i: usize, j: usize, y: &[f64]) -> Option<F> {
        F::from(self.comps[k * self.n * self.n + i * self.n + j].eval(y)?)
    }
}

/// A and its first derivatives, compiled.
#[derive(Clone, Debug)]
pub(crate) struct FloatOperator {
    n: usize,
    a: Vec<FloatExpr>,
    /// `da[j]` holds ∂A/∂y^j.
    da: Vec<Vec<FloatExpr>>,
}

impl FloatOperator {
    pub(crate) fn new(a: &OperatorField) -> Self {
        let n = a.dim();
        let m = a.matrix();
        FloatOperator {
            n,
            a: m.entries().iter().map(FloatExpr::new).collect(),
            da: (0..n)
                .map(|j| m.entries().iter().map(|e| FloatExpr::new(&e.diff(j))).collect())
                .collect(),
        }
    }

    fn matrix<F: Real>(&self, entries: &[FloatExpr], y: &[f64]) -> Option<Matrix<F>> {
        let vals = entries
            .iter()
            .map(|e| e.eval(y).and_then(F::from))
            .collect::<Option<Vec<F>>>()?;
        Some(Matrix::from_fn(self.n, self.n, |i, j| vals[i * self.n + j]))
    }

    pub(crate) fn value<F: Real>(&self, y: &[f64]) -> Option<Matrix<F>> {
        self.matrix(&self.a, y)
    }

    pub(crate) fn derivative<F: Real>(&self, j: usize, y: &[f64]) -> Option<Matrix<F>> {
        self.matrix(&self.da[j], y)
    }
}
