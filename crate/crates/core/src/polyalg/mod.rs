//! Matrix and univariate polynomial algebra over any [`Ring`] or [`Field`]:
//! determinants, inverses, characteristic polynomials, Sylvester
//! resultants and matrix polynomial evaluation.

mod matrix;
mod unipoly;

pub use matrix::{fraction_free_inverse, fraction_free_solve, Matrix};
pub use unipoly::UniPoly;

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

pub fn det<R: Ring>(m: &Matrix<R>) -> Result<R> {
    m.det()
}

pub fn inverse<F: Field>(m: &Matrix<F>) -> Result<Matrix<F>> {
    m.inverse()
}

/// `f(λ) = det(M - λI)`, computed with the Faddeev–LeVerrier recurrence.
///
/// With this sign convention `f(λ) = (-λ)^n + Σ σ_s (-λ)^(n-s)` where `σ_s`
/// are the elementary symmetric functions of the eigenvalues; see
/// [`sigma`].
pub fn char_poly<F: Field>(m: &Matrix<F>) -> Result<UniPoly<F>> {
    let n = m.ensure_square()?;
    // monic[k] is the coefficient of λ^k in det(λI - M).
    let mut monic = vec![F::zero(); n + 1];
    monic[n] = F::one();
    let mut aux = Matrix::<F>::zeros(n, n);
    for k in 1..=n {
        // aux_k = M aux_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&aux)?;
        for i in 0..n {
            next[(i, i)] = next[(i, i)].clone() + monic[n - k + 1].clone();
        }
        aux = next;
        let tr = m.mul(&aux)?.trace()?;
        let c = (-tr)
            .div_exact(&F::from_i64(k as i64))
            .expect("division by a nonzero integer");
        monic[n - k] = c;
    }
    let poly = UniPoly::new(monic);
    Ok(if n % 2 == 1 { -poly } else { poly })
}

/// Elementary symmetric function `σ_s` of the eigenvalues, read off a
/// characteristic polynomial of degree `n` in the `det(M - λI)` convention.
/// `σ_0 = 1`, `σ_n = det M`.
pub fn sigma<F: Field>(f: &UniPoly<F>, s: usize) -> F {
    let n = f.degree().unwrap_or(0);
    assert!(s <= n, "σ index out of range");
    let c = f.coeff(n - s);
    if (n - s) % 2 == 1 {
        -c
    } else {
        c
    }
}

/// Sylvester matrix of `f` (degree m) and `g` (degree n): n shifted rows of
/// f's coefficients followed by m shifted rows of g's, highest power first.
pub fn sylvester_matrix<R: Ring>(f: &UniPoly<R>, g: &UniPoly<R>) -> Result<Matrix<R>> {
    let (m, n) = match (f.degree(), g.degree()) {
        (Some(m), Some(n)) if m >= 1 && n >= 1 => (m, n),
        (a, b) => return Err(Error::DegenerateDegree(a.unwrap_or(0), b.unwrap_or(0))),
    };
    let size = m + n;
    Ok(Matrix::from_fn(size, size, |i, j| {
        let (poly, deg, shift) = if i < n { (f, m, i) } else { (g, n, i - n) };
        // column j holds the coefficient of x^(size-1-j) in x^(rows_left) * poly
        match (j).checked_sub(shift) {
            Some(k) if k <= deg => poly.coeff(deg - k),
            _ => R::zero(),
        }
    }))
}

/// `Res(f, g) = det Sylvester(f, g)`.
///
/// For `f = a Π(x - α_i)` of degree m and `g = b Π(x - β_j)` of degree n
/// this equals `a^n b^m Π(α_i - β_j)`; in particular
/// `Res(x - a, x - b) = a - b`.
pub fn sylvester_resultant<R: Ring>(f: &UniPoly<R>, g: &UniPoly<R>) -> Result<R> {
    sylvester_matrix(f, g)?.det()
}

/// The squared characteristic polynomial of the symmetric part of Λ,
/// expressed through the characteristic polynomial `f` of an n×n operator:
///
/// `ε(μ) = 2^(-n²) f(μ) Res_λ[f(μ - λ), f(λ + μ)]`
///
/// The resultant is a Sylvester determinant whose entries are polynomials
/// in μ. The result has degree `n(n+1)`.
pub fn epsilon_poly<F: Field>(f: &UniPoly<F>, n: usize) -> Result<UniPoly<F>> {
    if f.degree() != Some(n) {
        return Err(Error::DegenerateDegree(f.degree().unwrap_or(0), n));
    }
    let mu = UniPoly::new(vec![F::zero(), F::one()]);
    let one = UniPoly::constant(F::one());
    // As polynomials in λ with coefficients in F[μ].
    let mu_minus_lambda = UniPoly::new(vec![mu.clone(), -one.clone()]);
    let lambda_plus_mu = UniPoly::new(vec![mu, one]);
    let lifted = f.lift();
    let g = lifted.compose(&mu_minus_lambda);
    let h = lifted.compose(&lambda_plus_mu);
    let res = sylvester_resultant(&g, &h)?;
    let scale = F::one()
        .div_exact(&F::from_i64(2).pow_u32((n * n) as u32))
        .expect("nonzero power of two");
    Ok((f.clone() * res).scale(&scale))
}

/// Horner evaluation `p(M) = Σ p_i M^i`.
pub fn poly_of_operator<R: Ring>(p: &UniPoly<R>, m: &Matrix<R>) -> Result<Matrix<R>> {
    let n = m.ensure_square()?;
    let mut acc = Matrix::<R>::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(m)?;
        for i in 0..n {
            acc[(i, i)] = acc[(i, i)].clone() + c.clone();
        }
    }
    Ok(acc)
}

trait PowU32: Sized {
    fn pow_u32(self, k: u32) -> Self;
}

impl<R: Ring> PowU32 for R {
    fn pow_u32(self, k: u32) -> Self {
        (0..k).fold(R::one(), |acc, _| acc * self.clone())
    }
}
