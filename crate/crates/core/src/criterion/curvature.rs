use rayon::prelude::*;

use crate::geometry::Connection;
use crate::Expr;

/// Components `R^m_{kqp}` of the zero-curvature residual for `k < q`
/// (it is antisymmetric in `k, q`), in lexicographic order of
/// `(m, k, q, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature {
    n: usize,
    components: Vec<((usize, usize, usize, usize), Expr)>,
}

impl Curvature {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_flat(&self) -> bool {
        self.components.iter().all(|(_, e)| e.is_zero())
    }

    /// All stored components with 0-based indices `(m, k, q, p)`.
    pub fn components(&self) -> &[((usize, usize, usize, usize), Expr)] {
        &self.components
    }

    /// `R^m_{kqp}` for any `k, q`.
    pub fn get(&self, m: usize, k: usize, q: usize, p: usize) -> Expr {
        if k == q {
            return Expr::integer(0);
        }
        let (lo, hi, sign) = if k < q { (k, q, false) } else { (q, k, true) };
        let e = self
            .components
            .iter()
            .find(|(idx, _)| *idx == (m, lo, hi, p))
            .map(|(_, e)| e.clone())
            .expect("index in range");
        if sign {
            -e
        } else {
            e
        }
    }

    /// Nonzero components, first one being the lexicographically smallest.
    pub fn nonzero(&self) -> impl Iterator<Item = &((usize, usize, usize, usize), Expr)> {
        self.components.iter().filter(|(_, e)| !e.is_zero())
    }
}

/// `R^m_{kqp} = ∂θ^m_kp/∂y^q − ∂θ^m_qp/∂y^k + Σ_r θ^m_qr θ^r_kp − Σ_r θ^m_kr θ^r_qp`.
pub fn zero_curvature(theta: &Connection) -> Curvature {
    let n = theta.dim();
    let mut indices = Vec::new();
    for m in 0..n {
        for k in 0..n {
            for q in k + 1..n {
                for p in 0..n {
                    indices.push((m, k, q, p));
                }
            }
        }
    }
    let components = indices
        .into_par_iter()
        .map(|(m, k, q, p)| {
            let mut acc = &theta.get(m, k, p).diff(q) - &theta.get(m, q, p).diff(k);
            for r in 0..n {
                acc = &acc + &(theta.get(m, q, r) * theta.get(r, k, p));
                acc = &acc - &(theta.get(m, k, r) * theta.get(r, q, p));
            }
            ((m, k, q, p), acc)
        })
        .collect();
    Curvature { n, components }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{theta_from_transform, PointTransform};
    use crate::{parse_expr, VarSet};

    #[test]
    fn flat_cases() {
        assert!(zero_curvature(&Connection::zero(3)).is_flat());
        let theta = Connection::from_lower(1, |_, _, _| Expr::var(0));
        let c = zero_curvature(&theta);
        assert!(c.is_flat());
        assert!(c.components().is_empty());
    }

    #[test]
    fn constant_noncommuting_theta() {
        let theta = Connection::from_lower(2, |k, i, j| {
            Expr::integer(((k, i, j) == (0, 0, 1) || (k, i, j) == (1, 0, 0)) as i64)
        });
        let c = zero_curvature(&theta);
        assert!(!c.is_flat());
        let (idx, e) = c.nonzero().next().unwrap();
        assert_eq!(*idx, (0, 0, 1, 1));
        assert_eq!(*e, Expr::integer(1));
        assert_eq!(c.get(0, 1, 0, 1), Expr::integer(-1));
    }

    #[test]
    fn theta_of_a_transform_is_flat() {
        let v = VarSet::standard(3);
        let forward = ["y1 + y2^2", "y2 + y3^2 - y1*y3", "y3 + y1^2"]
            .iter()
            .map(|s| parse_expr(s, &v).unwrap())
            .collect();
        let phi = PointTransform::new(forward, None).unwrap();
        assert!(zero_curvature(&theta_from_transform(&phi)).is_flat());
    }
}
