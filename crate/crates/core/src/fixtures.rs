//! Seeded generators of test systems with known answers.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::geometry::{
    diffusion_connection, pull_back_connection, pull_back_operator, theta_from_transform, Connection, OperatorField,
    PointTransform,
};
use crate::polyalg::Matrix;
use crate::scalar::{Field, Rational, Ring};
use crate::Expr;

fn small_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(-num..=num).into(), rng.gen_range(1..=den).into())
}

/// Integer matrix with determinant ±1: a product of random elementary
/// row operations and a permutation.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    let mut m = Matrix::<Rational>::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k = Rational::from_i64(rng.gen_range(-2..=2));
        for c in 0..n {
            let v = m[(i, c)].clone() + k.clone() * m[(j, c)].clone();
            m[(i, c)] = v;
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Matrix::from_fn(n, n, |i, j| m[(perm[i], j)].clone())
}

/// Distinct nonzero rationals with no two summing to zero.
pub fn simple_spectrum<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    while out.len() < n {
        let v = small_rational(rng, 9, 4);
        if v.is_zero() || out.iter().any(|w| *w == v || (w.clone() + v.clone()).is_zero()) {
            continue;
        }
        out.push(v);
    }
    out
}

/// `P diag(λ) P⁻¹` for a random unimodular P; returns the matrix and λ.
pub fn matrix_with_spectrum<R: Rng>(rng: &mut R, eigenvalues: &[Rational]) -> Matrix<Rational> {
    let n = eigenvalues.len();
    let p = unimodular(rng, n);
    let pinv = p.inverse().expect("unimodular");
    p.mul(&Matrix::diagonal(eigenvalues))
        .and_then(|m| m.mul(&pinv))
        .expect("square")
}

/// A random invertible rational n×n matrix with entries of small height.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| small_rational(rng, 6, 3));
        if !m.det().expect("square").is_zero() {
            return m;
        }
    }
}

/// A 2×2 rational matrix with eigenvalues λ and −λ.
pub fn opposite_pair<R: Rng>(rng: &mut R) -> Matrix<Rational> {
    let lambda = loop {
        let v = small_rational(rng, 9, 4);
        if !v.is_zero() {
            break v;
        }
    };
    matrix_with_spectrum(rng, &[lambda.clone(), -lambda])
}

/// A system obtained by pulling a diffusion-form system back through a
/// random polynomial change of variables, with the θ that change implies.
#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub transform: PointTransform,
    pub a_tilde: OperatorField,
    pub a: OperatorField,
    pub gamma: Connection,
    pub theta: Connection,
    pub base: Vec<Rational>,
}

/// `ỹ = L τ(y) + c`, with `τ_i = y_i + (quadratic in y_1..y_{i−1})`, L
/// unimodular. Its inverse is polynomial.
pub fn random_transform<R: Rng>(rng: &mut R, n: usize) -> Result<PointTransform> {
    let y: Vec<Expr> = (0..n).map(Expr::var).collect();
    let coeff = |rng: &mut R| Expr::rational(&Rational::new(rng.gen_range(-2i64..=2).into(), rng.gen_range(1i64..=2).into()));
    // τ and its inverse, built component by component.
    let mut tau = Vec::with_capacity(n);
    let mut tau_inv: Vec<Expr> = Vec::with_capacity(n);
    for i in 0..n {
        let mut q = Expr::zero();
        for j in 0..i {
            q = &q + &(&coeff(rng) * &y[j]);
            for k in j..i {
                q = &q + &(&coeff(rng) * &(&y[j] * &y[k]));
            }
        }
        if i > 0 && q.is_zero() {
            q = &y[i - 1] * &y[i - 1];
        }
        tau.push(&y[i] + &q);
        // y_i = z_i − q(y_1..y_{i−1}) with earlier y already expressed in z
        let mut prefix = tau_inv.clone();
        prefix.extend(y[i..].iter().cloned());
        tau_inv.push(&y[i] - &q.substitute(&prefix)?);
    }
    let l = unimodular(rng, n);
    let c: Vec<Rational> = (0..n).map(|_| small_rational(rng, 3, 2)).collect();
    let forward: Vec<Expr> = (0..n)
        .map(|i| {
            (0..n).fold(Expr::rational(&c[i]), |acc, j| &acc + &(&Expr::rational(&l[(i, j)]) * &tau[j]))
        })
        .collect();
    let linv = l.inverse()?;
    let shifted: Vec<Expr> = (0..n)
        .map(|j| {
            (0..n).fold(Expr::zero(), |acc, i| {
                &acc + &(&Expr::rational(&linv[(j, i)]) * &(&y[i] - &Expr::rational(&c[i])))
            })
        })
        .collect();
    let inverse = tau_inv
        .iter()
        .map(|e| e.substitute(&shifted))
        .collect::<Result<Vec<_>>>()?;
    PointTransform::new(forward, Some(inverse))
}

/// Constant diagonal with distinct positive entries plus a small linear
/// perturbation, as a function of ỹ.
pub fn random_diffusion_operator<R: Rng>(rng: &mut R, n: usize) -> Result<OperatorField> {
    let mut diag: Vec<i64> = (1..=(2 * n as i64 + 2)).collect();
    diag.shuffle(rng);
    let m = Matrix::from_fn(n, n, |i, j| {
        let mut e = if i == j { Expr::integer(diag[i]) } else { Expr::zero() };
        if rng.gen_bool(0.5) {
            let v = rng.gen_range(0..n);
            let k = Rational::new(rng.gen_range(-1i64..=1).into(), 8.into());
            e = &e + &(&Expr::rational(&k) * &Expr::var(v));
        }
        e
    });
    OperatorField::new(m)
}

/// Builds a round-trip fixture. The base point is resampled until the
/// non-degeneracy gate passes there.
pub fn round_trip<R: Rng>(rng: &mut R, n: usize) -> Result<RoundTrip> {
    let transform = random_transform(rng, n)?;
    let a_tilde = random_diffusion_operator(rng, n)?;
    let gamma_tilde = diffusion_connection(&a_tilde)?;
    let a = pull_back_operator(&a_tilde, &transform)?;
    let gamma = pull_back_connection(&gamma_tilde, &transform)?;
    let theta = theta_from_transform(&transform);
    let base = loop {
        let p: Vec<Rational> = (0..n).map(|_| small_rational(rng, 2, 4)).collect();
        if crate::criterion::nondegeneracy_gate(&a, &p).is_ok_and(|g| g.passed()) {
            break p;
        }
    };
    Ok(RoundTrip {
        transform,
        a_tilde,
        a,
        gamma,
        theta,
        base,
    })
}

/// `Π_{i≤j} (λ_i + λ_j)/2`
pub fn lambda_sym_det_from_spectrum<F: Field>(eigenvalues: &[F]) -> F {
    let half = F::from_ratio(1, 2);
    let mut acc = F::one();
    for j in 0..eigenvalues.len() {
        for i in 0..=j {
            acc = acc * (eigenvalues[i].clone() + eigenvalues[j].clone()) * half.clone();
        }
    }
    acc
}

/// The constant connection with `Γ¹₁₂ = Γ¹₂₁ = 1`, `Γ²₁₁ = 1`.
pub fn curved_constant_connection() -> Connection {
    Connection::from_lower(2, |k, i, j| {
        if (k, i, j) == (0, 0, 1) || (k, i, j) == (1, 0, 0) {
            Expr::one()
        } else {
            Expr::zero()
        }
    })
}
