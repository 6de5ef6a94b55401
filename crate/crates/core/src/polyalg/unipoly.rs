use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Field, Ring};

/// Dense univariate polynomial `c0 + c1 x + ... + cd x^d` with
/// coefficients in a ring. The leading coefficient is never zero.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> UniPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    /// `x - root`
    pub fn linear_factor(root: R) -> Self {
        Self::new(vec![-root, R::one()])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn map<S: Ring>(&self, f: impl FnMut(&R) -> S) -> UniPoly<S> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, k: &R) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    /// `p(x)` with `x` replaced by the polynomial `arg` (Horner).
    pub fn compose(&self, arg: &UniPoly<R>) -> UniPoly<R> {
        self.coeffs.iter().rev().fold(UniPoly::zero(), |acc, c| {
            acc * arg.clone() + UniPoly::constant(c.clone())
        })
    }

    /// Embeds this polynomial as one whose coefficients are constants of the
    /// polynomial ring `R[t]`.
    pub fn lift(&self) -> UniPoly<UniPoly<R>>
    where
        R: Field,
    {
        UniPoly::new(self.coeffs.iter().map(|c| UniPoly::constant(c.clone())).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self.clone())
    }
}

impl<F: Field> UniPoly<F> {
    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        let inv = divisor.leading()?.recip()?;
        let mut rem = self.coeffs.clone();
        let Some(ds) = self.degree() else {
            return Some((Self::zero(), Self::zero()));
        };
        if ds < dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![F::zero(); ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let c = rem[k + dd].clone() * inv.clone();
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].clone() - c.clone() * d.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Some((Self::new(quot), Self::new(rem)))
    }
}

impl<R: Ring> Zero for UniPoly<R> {
    fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<R: Ring> One for UniPoly<R> {
    fn one() -> Self {
        Self::constant(R::one())
    }
}

impl<R: Ring> Add for UniPoly<R> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<R: Ring> Sub for UniPoly<R> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<R: Ring> Neg for UniPoly<R> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<R: Ring> Mul for UniPoly<R> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl<F: Field> Ring for UniPoly<F> {
    fn from_i64(value: i64) -> Self {
        Self::constant(F::from_i64(value))
    }

    fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor)?;
        r.is_zero().then_some(q)
    }

    fn pivot_cost(&self) -> Option<f64> {
        (!self.is_zero()).then(|| self.coeffs.len() as f64)
    }
}
