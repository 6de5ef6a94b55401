use crate::error::{Error, Result};
use crate::geometry::{build_lambda, lambda_sym_matrix, Connection, OperatorField, SymOperator, SymPairIndex};
use crate::polyalg::{char_poly, epsilon_poly, fraction_free_solve, poly_of_operator, Matrix, UniPoly};
use crate::scalar::Field;
use crate::Expr;

/// How the inverse of Λ_sym is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DRoute {
    /// Direct linear solve.
    #[default]
    Solve,
    /// Cayley–Hamilton through the squared characteristic polynomial.
    Cayley,
    /// Both, required to agree.
    Both,
}

/// `Λ_sym` for an operator field.
pub fn lambda_sym<F: Field>(a: &OperatorField<F>) -> SymOperator<F> {
    lambda_sym_matrix(&build_lambda(a), &SymPairIndex::new(a.dim()))
}

/// Inverse of Λ_sym by linear solve.
pub fn d_tensor_solve<F: Field>(a: &OperatorField<F>) -> Result<SymOperator<F>> {
    lambda_sym(a).inverse()
}

/// Inverse of Λ_sym as a polynomial in Λ_sym:
/// `Λ⁻¹ = −Σ_{i=1..M} (ε_i/ε_0) Λ^(i−1)`, where `ε(μ) = Σ ε_i μ^i` is the
/// squared characteristic polynomial of Λ_sym obtained from that of A.
pub fn d_tensor_cayley<F: Field>(a: &OperatorField<F>) -> Result<SymOperator<F>> {
    let n = a.dim();
    let f = char_poly(a.matrix())?;
    let eps = epsilon_poly(&f, n)?;
    let e0 = eps.coeff(0);
    let inv0 = e0.recip().ok_or(Error::ZeroEpsilon)?;
    let tail = UniPoly::new(eps.coeffs().get(1..).unwrap_or_default().to_vec());
    let p = poly_of_operator(&tail, &lambda_sym(a))?;
    Ok(p.scale(&(-inv0)))
}

/// The n = 2 closed form
/// `Λ_sym⁻¹ = (2Λ² − 3σ₁Λ + (σ₁² + 2σ₂)I) / (σ₁σ₂)`, with σ₁ = tr A and
/// σ₂ = det A.
pub fn d_tensor_cayley_2d<F: Field>(a: &OperatorField<F>) -> Result<SymOperator<F>> {
    if a.dim() != 2 {
        return Err(Error::Dimension("closed form needs n = 2".into()));
    }
    let s1 = a.matrix().trace()?;
    let s2 = a.matrix().det()?;
    let l = lambda_sym(a);
    let two = F::from_i64(2);
    let three = F::from_i64(3);
    let c0 = s1.clone() * s1.clone() + two.clone() * s2.clone();
    let p = UniPoly::new(vec![c0, -(three * s1.clone()), two]);
    let denom = (s1 * s2).recip().ok_or(Error::Singular)?;
    Ok(poly_of_operator(&p, &l)?.scale(&denom))
}

/// Inverse of Λ_sym by the selected route. `Both` fails with
/// [`Error::Dimension`] if the routes disagree, which would indicate an
/// arithmetic bug.
pub fn d_tensor<F: Field>(a: &OperatorField<F>, route: DRoute) -> Result<SymOperator<F>> {
    match route {
        DRoute::Solve => d_tensor_solve(a),
        DRoute::Cayley => d_tensor_cayley(a),
        DRoute::Both => {
            let d = d_tensor_solve(a)?;
            if d_tensor_cayley(a)?.sub(&d)?.is_zero() {
                Ok(d)
            } else {
                Err(Error::Dimension("solve and Cayley routes disagree".into()))
            }
        }
    }
}

/// Tensor component `D^{ij}_pq` (0-based) of the inverse, read from its
/// matrix in the pair basis.
pub fn d_component<F: Field>(d: &SymOperator<F>, idx: &SymPairIndex, i: usize, j: usize, p: usize, q: usize) -> F {
    let v = d[(idx.index(p, q), idx.index(i, j))].clone();
    if i != j {
        v * F::from_ratio(1, 2)
    } else {
        v
    }
}

/// Right-hand sides
/// `w^r_ij = Σ_k A^r_k Γ^k_ij − ½(∂A^r_i/∂y^j + ∂A^r_j/∂y^i)`.
pub fn rhs_w(a: &OperatorField, gamma: &Connection) -> Result<Connection> {
    let n = a.dim();
    if gamma.dim() != n {
        return Err(Error::Dimension(format!(
            "operator has dimension {n}, connection {}",
            gamma.dim()
        )));
    }
    let half = Expr::from_ratio(1, 2);
    Ok(Connection::from_lower(n, |r, i, j| {
        let mut acc = Expr::integer(0);
        for k in 0..n {
            let g = gamma.get(k, i, j);
            if !g.is_zero() {
                acc = &acc + &(a.get(r, k) * g);
            }
        }
        let sym = &a.get(r, i).diff(j) + &a.get(r, j).diff(i);
        &acc - &(&sym * &half)
    }))
}

/// `θ^r_pq = Σ_{i,j} D^{ij}_pq w^r_ij`, which in the pair basis is the
/// matrix product of D with the stacked right-hand sides.
pub fn theta_from_d<F: Field>(d: &SymOperator<F>, w: &Connection<F>) -> Result<Connection<F>> {
    let theta = d.mul(&stack_rhs(w))?;
    Ok(unstack_theta(&theta, w.dim()))
}

/// `w` as an N×n matrix, one column per upper index.
fn stack_rhs<F: Field>(w: &Connection<F>) -> Matrix<F> {
    let idx = SymPairIndex::new(w.dim());
    Matrix::from_fn(idx.len(), w.dim(), |row, r| {
        let (i, j) = idx.pair(row);
        w.get(r, i, j).clone()
    })
}

fn unstack_theta<F: Field>(theta: &Matrix<F>, n: usize) -> Connection<F> {
    let idx = SymPairIndex::new(n);
    Connection::from_lower(n, |r, p, q| theta[(idx.index(p, q), r)].clone())
}

/// Solves the linear equations for θ given A and Γ.
pub fn solve_theta(a: &OperatorField, gamma: &Connection, route: DRoute) -> Result<Connection> {
    let w = rhs_w(a, gamma)?;
    if route == DRoute::Solve {
        // no need to form D itself
        let theta = fraction_free_solve(&lambda_sym(a), &stack_rhs(&w))?;
        return Ok(unstack_theta(&theta, a.dim()));
    }
    let d = d_tensor(a, route)?;
    theta_from_d(&d, &w)
}

/// Residual of
/// `Γ^k_ij = Σ_r B^k_r/2 (∂A^r_i/∂y^j + ∂A^r_j/∂y^i)
///         + Σ_{r,p,q} B^k_r θ^r_pq (A^p_i δ^q_j + A^p_j δ^q_i)/2`,
/// with `B = A⁻¹`; all components vanish when θ solves the system.
pub fn theta_residual(a: &OperatorField, gamma: &Connection, theta: &Connection) -> Result<Connection> {
    let n = a.dim();
    let b = a.matrix().inverse()?;
    let half = Expr::from_ratio(1, 2);
    Ok(Connection::from_lower(n, |k, i, j| {
        let mut inner = Vec::with_capacity(n);
        for r in 0..n {
            // Σ_p θ^r_pj A^p_i + Σ_p θ^r_pi A^p_j
            let mut t = &a.get(r, i).diff(j) + &a.get(r, j).diff(i);
            for p in 0..n {
                t = &t + &(theta.get(r, p, j) * a.get(p, i));
                t = &t + &(theta.get(r, p, i) * a.get(p, j));
            }
            inner.push(t);
        }
        let mut rhs = Expr::integer(0);
        for (r, t) in inner.iter().enumerate() {
            if !t.is_zero() {
                rhs = &rhs + &(&b[(k, r)] * t);
            }
        }
        gamma.get(k, i, j) - &(&rhs * &half)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::{parse_expr, VarSet};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn op(rows: &[&[&str]]) -> OperatorField {
        let v = VarSet::standard(4);
        OperatorField::new(
            Matrix::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|s| parse_expr(s, &v).unwrap()).collect())
                    .collect(),
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identity_gives_identity() {
        let a = OperatorField::<Rational>::identity(3);
        assert_eq!(d_tensor_solve(&a).unwrap(), Matrix::identity(6));
        assert_eq!(d_tensor_cayley(&a).unwrap(), Matrix::identity(6));
    }

    #[test]
    fn diag_2_3() {
        let a = OperatorField::new(Matrix::diagonal(&[q(2, 1), q(3, 1)])).unwrap();
        let d = d_tensor_solve(&a).unwrap();
        assert_eq!(d, Matrix::diagonal(&[q(1, 2), q(2, 5), q(1, 3)]));
        assert_eq!(d_tensor_cayley(&a).unwrap(), d);
        assert_eq!(d_tensor_cayley_2d(&a).unwrap(), d);
    }

    #[test]
    fn routes_agree_on_rational_3x3() {
        let rows = [[2, 1, 0], [0, 3, 1], [1, 0, 5]];
        let m = Matrix::from_fn(3, 3, |i, j| q(rows[i][j], 1));
        let a = OperatorField::new(m).unwrap();
        assert_eq!(d_tensor_solve(&a).unwrap(), d_tensor_cayley(&a).unwrap());
        assert!(d_tensor(&a, DRoute::Both).is_ok());
    }

    #[test]
    fn w_examples() {
        let a = OperatorField::<Expr>::identity(2);
        let gamma = Connection::from_lower(2, |k, i, j| Expr::var((k + i + j) % 2));
        assert_eq!(rhs_w(&a, &gamma).unwrap(), gamma);

        let a = op(&[&["y1", "0"], &["0", "1"]]);
        let w = rhs_w(&a, &Connection::zero(2)).unwrap();
        assert_eq!(*w.get(0, 0, 0), Expr::integer(-1));
        assert!(w.get(0, 0, 1).is_zero());
        assert!(w.get(1, 0, 0).is_zero());

        let v = VarSet::standard(1);
        let a = op(&[&["y1^2"]]);
        let gamma = Connection::from_lower(1, |_, _, _| parse_expr("y1 + 1", &v).unwrap());
        let w = rhs_w(&a, &gamma).unwrap();
        assert_eq!(*w.get(0, 0, 0), parse_expr("y1^2*(y1 + 1) - 2*y1", &v).unwrap());
    }

    #[test]
    fn scalar_theta() {
        let v = VarSet::standard(1);
        let a = op(&[&["y1^2 + 1"]]);
        let gamma = Connection::from_lower(1, |_, _, _| parse_expr("3*y1", &v).unwrap());
        let theta = solve_theta(&a, &gamma, DRoute::Both).unwrap();
        assert_eq!(*theta.get(0, 0, 0), parse_expr("3*y1 - 2*y1/(y1^2 + 1)", &v).unwrap());
        assert!(theta_residual(&a, &gamma, &theta).unwrap().is_zero());
    }

    #[test]
    fn residual_vanishes_for_symbolic_2d() {
        let a = op(&[&["y1 + 2", "y2"], &["1", "3 + y1*y2"]]);
        let gamma = Connection::from_lower(2, |k, i, j| {
            &Expr::var((k + j) % 2) * &Expr::integer((i + 1) as i64)
        });
        let theta = solve_theta(&a, &gamma, DRoute::Solve).unwrap();
        assert!(theta_residual(&a, &gamma, &theta).unwrap().is_zero());
        // and a wrong θ leaves a residual
        assert!(!theta_residual(&a, &gamma, &Connection::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn d_components_of_symbolic_2d() {
        // A = [[a, b], [c, d]] with a..d = y1..y4
        let a = op(&[&["y1", "y2"], &["y3", "y4"]]);
        let d = d_tensor_solve(&a).unwrap();
        let idx = SymPairIndex::new(2);
        let v = VarSet::standard(4);
        let p = |s: &str| parse_expr(s, &v).unwrap();
        let den = "((y1 + y4)*(y1*y4 - y2*y3))";
        assert_eq!(d_component(&d, &idx, 0, 0, 0, 0), p(&format!("(y1*y4 - y2*y3 + y4^2)/{den}")));
        assert_eq!(d_component(&d, &idx, 0, 1, 1, 0), p(&format!("y1*y4/{den}")));
        assert_eq!(d_component(&d, &idx, 1, 1, 0, 1), p(&format!("-y3*y1/{den}")));
        assert_eq!(d_tensor_cayley_2d(&a).unwrap(), d);
    }
}
