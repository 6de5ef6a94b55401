use crate::error::{Error, Result};
use crate::polyalg::Matrix;
use crate::scalar::{Field, Rational};
use crate::Expr;
use num_traits::Zero;

use super::tensors::{Connection, OperatorField};

/// A change of variables `ỹ^m = ỹ^m(y^1, ..., y^n)`, optionally with its
/// inverse `y^i = y^i(ỹ^1, ..., ỹ^n)`. Both charts use variable indices
/// `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTransform {
    forward: Vec<Expr>,
    inverse: Option<Vec<Expr>>,
    t: Matrix<Expr>,
    s: Matrix<Expr>,
}

/// Which chart a transformed object is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// Functions of the new variables ỹ.
    Target,
    /// Functions of the original variables y (no inverse was available).
    Source,
}

impl PointTransform {
    /// Validates the Jacobian and, when given, that `inverse` undoes
    /// `forward`. For affine maps without a supplied inverse, the inverse is
    /// computed.
    pub fn new(forward: Vec<Expr>, inverse: Option<Vec<Expr>>) -> Result<Self> {
        let n = forward.len();
        check_span(&forward, n)?;
        let t = Matrix::from_fn(n, n, |m, p| forward[m].diff(p));
        if t.det()?.is_zero() {
            return Err(Error::SingularJacobian);
        }
        let s = t.inverse().map_err(|_| Error::SingularJacobian)?;
        let inverse = match inverse {
            Some(inv) => {
                if inv.len() != n {
                    return Err(Error::Dimension(format!(
                        "inverse has {} components, expected {n}",
                        inv.len()
                    )));
                }
                check_span(&inv, n)?;
                for (m, f) in forward.iter().enumerate() {
                    let back = f.substitute(&inv)?;
                    if !(&back - &Expr::var(m)).is_zero() {
                        return Err(Error::InverseMismatch(format!(
                            "component {} maps to {back}",
                            m + 1
                        )));
                    }
                }
                Some(inv)
            }
            None if t.entries().iter().all(Expr::is_constant) => Some(affine_inverse(&forward, &s)?),
            None => None,
        };
        Ok(PointTransform { forward, inverse, t, s })
    }

    pub fn identity(n: usize) -> Self {
        let vars: Vec<Expr> = (0..n).map(Expr::var).collect();
        Self::new(vars.clone(), Some(vars)).expect("identity is invertible")
    }

    /// `ỹ = M y + c`.
    pub fn affine(m: &Matrix<Rational>, c: &[Rational]) -> Result<Self> {
        let n = m.ensure_square()?;
        if c.len() != n {
            return Err(Error::Dimension("offset length".into()));
        }
        let forward = (0..n)
            .map(|i| {
                (0..n).fold(Expr::rational(&c[i]), |acc, j| {
                    &acc + &(&Expr::rational(&m[(i, j)]) * &Expr::var(j))
                })
            })
            .collect();
        Self::new(forward, None)
    }

    pub fn dim(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[Expr] {
        &self.forward
    }

    pub fn inverse(&self) -> Option<&[Expr]> {
        self.inverse.as_deref()
    }

    /// `T^m_p = ∂ỹ^m/∂y^p`, as functions of y.
    pub fn jacobian(&self) -> &Matrix<Expr> {
        &self.t
    }

    /// `S = T⁻¹`, as functions of y.
    pub fn inverse_jacobian(&self) -> &Matrix<Expr> {
        &self.s
    }

    pub fn is_affine(&self) -> bool {
        self.t.entries().iter().all(Expr::is_constant)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &PointTransform) -> Result<Self> {
        if self.dim() != first.dim() {
            return Err(Error::Dimension("transform dimensions differ".into()));
        }
        let forward = self
            .forward
            .iter()
            .map(|f| f.substitute(&first.forward))
            .collect::<Result<Vec<_>>>()?;
        let inverse = match (&first.inverse, &self.inverse) {
            (Some(a), Some(b)) => Some(a.iter().map(|e| e.substitute(b)).collect::<Result<Vec<_>>>()?),
            _ => None,
        };
        Self::new(forward, inverse)
    }
}

fn check_span(exprs: &[Expr], n: usize) -> Result<()> {
    match exprs.iter().map(Expr::var_span).max() {
        Some(span) if span > n => Err(Error::VariableIndex { index: span - 1, count: n }),
        _ => Ok(()),
    }
}

fn affine_inverse(forward: &[Expr], s: &Matrix<Expr>) -> Result<Vec<Expr>> {
    let n = forward.len();
    let origin = vec![Expr::zero(); n];
    let offset = forward
        .iter()
        .map(|f| f.substitute(&origin))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..n)
        .map(|i| {
            (0..n).fold(Expr::zero(), |acc, m| {
                &acc + &(&s[(i, m)] * &(&Expr::var(m) - &offset[m]))
            })
        })
        .collect())
}

/// `θ^r_pq = Σ_m S^r_m ∂²ỹ^m/∂y^p∂y^q`, as functions of y.
pub fn theta_from_transform(phi: &PointTransform) -> Connection {
    let n = phi.dim();
    let hess: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|m| {
            (0..n)
                .map(|p| (0..n).map(|q| phi.t[(m, p)].diff(q)).collect())
                .collect()
        })
        .collect();
    Connection::from_lower(n, |r, p, q| {
        (0..n).fold(Expr::zero(), |acc, m| {
            let h = &hess[m][p][q];
            if h.is_zero() {
                acc
            } else {
                &acc + &(&phi.s[(r, m)] * h)
            }
        })
    })
}

/// `Ã = T A S`, re-expressed in ỹ when the inverse map is known.
pub fn transform_operator(a: &OperatorField, phi: &PointTransform) -> Result<(OperatorField, Chart)> {
    check_dims(a.dim(), phi)?;
    let pushed = phi.t.mul(a.matrix())?.mul(&phi.s)?;
    let (m, chart) = match &phi.inverse {
        Some(inv) => (pushed.substitute(inv)?, Chart::Target),
        None => (pushed, Chart::Source),
    };
    Ok((OperatorField::new(m)?, chart))
}

/// `Γ̃^m_pq = Σ T^m_k (Γ^k_ij − θ^k_ij) S^i_p S^j_q`, re-expressed in ỹ when
/// the inverse map is known.
pub fn transform_connection(gamma: &Connection, phi: &PointTransform) -> Result<(Connection, Chart)> {
    check_dims(gamma.dim(), phi)?;
    let diff = gamma.sub(&theta_from_transform(phi))?;
    let pushed = contract(&phi.t, &diff, &phi.s);
    match phi.inverse {
        Some(ref inv) => Ok((pushed.substitute(inv)?, Chart::Target)),
        None => Ok((pushed, Chart::Source)),
    }
}

/// Inverse direction of [`transform_operator`]: given Ã as a function of ỹ,
/// returns `A = S Ã(ỹ(y)) T` as a function of y. Needs no inverse map.
pub fn pull_back_operator(a_tilde: &OperatorField, phi: &PointTransform) -> Result<OperatorField> {
    check_dims(a_tilde.dim(), phi)?;
    let composed = a_tilde.matrix().substitute(&phi.forward)?;
    OperatorField::new(phi.s.mul(&composed)?.mul(&phi.t)?)
}

/// Inverse direction of [`transform_connection`]:
/// `Γ^k_ij = Σ S^k_m T^p_i T^q_j Γ̃^m_pq(ỹ(y)) + θ^k_ij`.
pub fn pull_back_connection(gamma_tilde: &Connection, phi: &PointTransform) -> Result<Connection> {
    check_dims(gamma_tilde.dim(), phi)?;
    let composed = gamma_tilde.substitute(&phi.forward)?;
    let homogeneous = contract(&phi.s, &composed, &phi.t);
    let theta = theta_from_transform(phi);
    let n = phi.dim();
    Ok(Connection::from_lower(n, |k, i, j| {
        homogeneous.get(k, i, j) + theta.get(k, i, j)
    }))
}

/// Point transforms act on the pair (A, Γ) together.
pub fn transform_system(
    a: &OperatorField,
    gamma: &Connection,
    phi: &PointTransform,
) -> Result<(OperatorField, Connection, Chart)> {
    let (a2, chart) = transform_operator(a, phi)?;
    let (g2, _) = transform_connection(gamma, phi)?;
    Ok((a2, g2, chart))
}

/// The connection of a system in diffusion form:
/// `Γ^m_pq = ½ Σ_s B^m_s (∂A^s_p/∂y^q + ∂A^s_q/∂y^p)` with `B = A⁻¹`.
pub fn diffusion_connection(a: &OperatorField) -> Result<Connection> {
    let n = a.dim();
    let b = a.matrix().inverse()?;
    let half = Expr::from_ratio(1, 2);
    let da: Vec<Matrix<Expr>> = (0..n).map(|q| a.matrix().map(|e| e.diff(q))).collect();
    Ok(Connection::from_lower(n, |m, p, q| {
        let mut acc = Expr::zero();
        for s in 0..n {
            let sum = &da[q][(s, p)] + &da[p][(s, q)];
            if !sum.is_zero() {
                acc = &acc + &(&b[(m, s)] * &sum);
            }
        }
        &acc * &half
    }))
}

/// `out^m_pq = Σ L^m_k Γ^k_ij R^i_p R^j_q`.
fn contract<F: Field>(left: &Matrix<F>, gamma: &Connection<F>, right: &Matrix<F>) -> Connection<F> {
    let n = gamma.dim();
    // lower[k][p][q] = Σ_ij Γ^k_ij R^i_p R^j_q, computed in two stages.
    let mut half = vec![F::zero(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for q in 0..n {
                let mut acc = F::zero();
                for j in 0..n {
                    let g = gamma.get(k, i, j);
                    if !g.is_zero() && !right[(j, q)].is_zero() {
                        acc = acc + g.clone() * right[(j, q)].clone();
                    }
                }
                half[(k * n + i) * n + q] = acc;
            }
        }
    }
    let lower: Vec<F> = (0..n * n * n)
        .map(|idx| {
            let (k, p, q) = (idx / (n * n), (idx / n) % n, idx % n);
            let mut acc = F::zero();
            for i in 0..n {
                let h = &half[(k * n + i) * n + q];
                if !h.is_zero() && !right[(i, p)].is_zero() {
                    acc = acc + right[(i, p)].clone() * h.clone();
                }
            }
            acc
        })
        .collect();
    Connection::from_lower(n, |m, p, q| {
        let mut acc = F::zero();
        for k in 0..n {
            let v = &lower[(k * n + p) * n + q];
            if !v.is_zero() && !left[(m, k)].is_zero() {
                acc = acc + left[(m, k)].clone() * v.clone();
            }
        }
        acc
    })
}

fn check_dims(n: usize, phi: &PointTransform) -> Result<()> {
    if n == phi.dim() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "system has dimension {n}, transform has {}",
            phi.dim()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::char_poly;
    use crate::scalar::Ring;
    use crate::{parse_expr, VarSet};

    fn exprs(src: &[&str]) -> Vec<Expr> {
        let v = VarSet::standard(src.len());
        src.iter().map(|s| parse_expr(s, &v).unwrap()).collect()
    }

    fn op(rows: &[&[&str]]) -> OperatorField {
        let v = VarSet::standard(rows.len());
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
    fn square_map_theta() {
        let phi = PointTransform::new(exprs(&["y1^2"]), None).unwrap();
        assert_eq!(phi.jacobian()[(0, 0)], exprs(&["2*y1"])[0]);
        assert_eq!(*theta_from_transform(&phi).get(0, 0, 0), exprs(&["1/y1"])[0]);
        assert!(phi.inverse().is_none());
    }

    #[test]
    fn affine_maps_have_no_theta_and_invert() {
        let m = Matrix::from_rows(vec![
            vec![Rational::from_i64(2), Rational::from_i64(1)],
            vec![Rational::from_i64(1), Rational::from_i64(1)],
        ])
        .unwrap();
        let phi = PointTransform::affine(&m, &[Rational::from_i64(3), Rational::from_i64(-1)]).unwrap();
        assert!(theta_from_transform(&phi).is_zero());
        let inv = phi.inverse().unwrap().to_vec();
        for (k, f) in phi.forward().iter().enumerate() {
            assert_eq!(f.substitute(&inv).unwrap(), Expr::var(k));
        }
        // linear map: Ã = M A M⁻¹ for constant A, and Γ picks up nothing inhomogeneous
        let a = op(&[&["1", "2"], &["0", "3"]]);
        let (at, chart) = transform_operator(&a, &phi).unwrap();
        assert_eq!(chart, Chart::Target);
        let mq = m.map(Expr::rational);
        let expected = mq.mul(a.matrix()).unwrap().mul(&mq.inverse().unwrap()).unwrap();
        assert_eq!(at.matrix(), &expected);
        let (g, _) = transform_connection(&Connection::zero(2), &phi).unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn identity_changes_nothing() {
        let phi = PointTransform::identity(2);
        let a = op(&[&["y1", "y2"], &["1", "2"]]);
        let gamma = Connection::from_lower(2, |k, i, j| Expr::var((k + i + j) % 2));
        assert_eq!(transform_operator(&a, &phi).unwrap().0, a);
        assert_eq!(transform_connection(&gamma, &phi).unwrap().0, gamma);
    }

    #[test]
    fn inverse_is_validated() {
        let bad = PointTransform::new(exprs(&["y1 + y2^2", "y2"]), Some(exprs(&["y1 + y2^2", "y2"])));
        assert!(matches!(bad, Err(Error::InverseMismatch(_))));
        assert_eq!(
            PointTransform::new(exprs(&["y1 + y2", "2*y1 + 2*y2"]), None),
            Err(Error::SingularJacobian)
        );
        assert!(PointTransform::new(exprs(&["y1 + y2", "y2 + y1^2"]), None).unwrap().inverse().is_none());
    }

    #[test]
    fn push_then_pull_round_trips() {
        let phi = PointTransform::new(exprs(&["y1 + y2^2", "y2"]), Some(exprs(&["y1 - y2^2", "y2"]))).unwrap();
        let a = op(&[&["y1 + 2", "y2"], &["1", "3"]]);
        let gamma = Connection::from_lower(2, |k, i, j| Expr::var((k + i * j) % 2));
        let (at, chart) = transform_operator(&a, &phi).unwrap();
        let (gt, _) = transform_connection(&gamma, &phi).unwrap();
        assert_eq!(chart, Chart::Target);
        assert_eq!(pull_back_operator(&at, &phi).unwrap(), a);
        assert_eq!(pull_back_connection(&gt, &phi).unwrap(), gamma);
        // similarity invariance of the characteristic polynomial
        let f = char_poly(a.matrix()).unwrap();
        let ft = char_poly(at.matrix()).unwrap();
        let inv = phi.inverse().unwrap();
        assert_eq!(f.map(|c| c.substitute(inv).unwrap()), ft);
    }

    #[test]
    fn transforms_compose() {
        let phi1 = PointTransform::new(exprs(&["y1 + y2^2", "y2"]), Some(exprs(&["y1 - y2^2", "y2"]))).unwrap();
        let phi2 = PointTransform::new(exprs(&["y1", "y2 - y1^2"]), Some(exprs(&["y1", "y2 + y1^2"]))).unwrap();
        let both = phi2.after(&phi1).unwrap();
        let a = op(&[&["y1 + 2", "y2"], &["1", "3"]]);
        let gamma = Connection::from_lower(2, |k, i, j| Expr::var((k + i + j) % 2));
        let (a1, g1, _) = transform_system(&a, &gamma, &phi1).unwrap();
        let (a2, g2, _) = transform_system(&a1, &g1, &phi2).unwrap();
        let (a12, g12, _) = transform_system(&a, &gamma, &both).unwrap();
        assert_eq!(a2, a12);
        assert_eq!(g2, g12);
    }

    #[test]
    fn diffusion_connection_of_constant_operator_vanishes() {
        let a = op(&[&["2", "1"], &["0", "3"]]);
        assert!(diffusion_connection(&a).unwrap().is_zero());
        let a = op(&[&["y1"]]);
        assert_eq!(*diffusion_connection(&a).unwrap().get(0, 0, 0), exprs(&["1/y1"])[0]);
    }

    #[test]
    fn nonlinear_push_of_zero_connection_is_pure_second_derivative() {
        let phi = PointTransform::new(exprs(&["y1 + y2^2", "y2"]), None).unwrap();
        let (g, chart) = transform_connection(&Connection::zero(2), &phi).unwrap();
        assert_eq!(chart, Chart::Source);
        // Γ̃^1_22 = −T^1_k θ^k_22 = −2
        assert_eq!(*g.get(0, 1, 1), Expr::integer(-2));
        assert!(g.get(1, 1, 1).is_zero());
    }
}
