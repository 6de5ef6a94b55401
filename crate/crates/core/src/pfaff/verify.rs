use crate::error::{Error, Result};
use crate::geometry::{Connection, OperatorField};
use crate::polyalg::Matrix;

use super::integrate::GridSolution;
use super::numeric::{FloatConnection, FloatOperator};
use super::Real;

/// Largest violation of the diffusion-form connection identity in the new
/// chart, overall and per sample point.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionCheck<F = f64> {
    pub max_residual: F,
    /// `(index into sol.points, residual)`.
    pub per_point: Vec<(usize, F)>,
}

/// At each sample point, transforms (A, Γ) with the numeric T and compares
/// the new connection Γ̃ with `½ Σ_s B̃^m_s (∂Ã^s_p/∂ỹ^q + ∂Ã^s_q/∂ỹ^p)`.
///
/// Derivatives of T come from the Pfaff equations (`∂_j T = T Θ_j`), those
/// of S from `∂S = −S (∂T) S`, those of A symbolically; `∂/∂ỹ^q = Σ_j S^j_q
/// ∂/∂y^j`. `samples` are indices into `sol.points`; all points when `None`.
pub fn verify_diffusion_form<F: Real>(
    a: &OperatorField,
    gamma: &Connection,
    theta: &Connection,
    sol: &GridSolution<F>,
    samples: Option<&[usize]>,
) -> Result<DiffusionCheck<F>> {
    let n = a.dim();
    if gamma.dim() != n || theta.dim() != n || sol.dim() != n {
        return Err(Error::Dimension("A, Γ, θ and the solution must share a dimension".into()));
    }
    let all: Vec<usize> = (0..sol.points.len()).collect();
    let samples = samples.unwrap_or(&all);
    let fa = FloatOperator::new(a);
    let fg = FloatConnection::new(gamma);
    let ft = FloatConnection::new(theta);
    let mut per_point = Vec::with_capacity(samples.len());
    let mut max_residual = F::zero();
    for &idx in samples {
        let point = sol
            .points
            .get(idx)
            .ok_or_else(|| Error::Grid(format!("sample {idx} is not a retained grid point")))?;
        let r = residual_at(&fa, &fg, &ft, point.y.as_slice(), &point.t)?;
        max_residual = max_residual.max(r);
        per_point.push((idx, r));
    }
    Ok(DiffusionCheck { max_residual, per_point })
}

fn residual_at<F: Real>(
    fa: &FloatOperator,
    fg: &FloatConnection,
    ft: &FloatConnection,
    y: &[F],
    t: &Matrix<F>,
) -> Result<F> {
    let n = t.rows();
    let yf: Vec<f64> = y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    let pole = || Error::PoleOnPath(yf.clone());
    let s = t.inverse()?;
    let a = fa.value::<F>(&yf).ok_or_else(pole)?;
    let at = t.mul(&a)?.mul(&s)?;
    let bt = at.inverse()?;
    // ∂Ã/∂y^j
    let mut d_at_y = Vec::with_capacity(n);
    for j in 0..n {
        let dt = t.mul(&ft.slice(j, y).ok_or_else(pole)?)?;
        let ds = s.mul(&dt)?.mul(&s)?.scale(&-F::one());
        let da = fa.derivative::<F>(j, &yf).ok_or_else(pole)?;
        let term = dt
            .mul(&a)?
            .mul(&s)?
            .add(&t.mul(&da)?.mul(&s)?)?
            .add(&t.mul(&a)?.mul(&ds)?)?;
        d_at_y.push(term);
    }
    // ∂Ã/∂ỹ^q = Σ_j S^j_q ∂Ã/∂y^j
    let d_at: Vec<Matrix<F>> = (0..n)
        .map(|q| {
            (0..n).fold(Matrix::zeros(n, n), |acc, j| {
                acc.add(&d_at_y[j].scale(&s[(j, q)])).expect("same shape")
            })
        })
        .collect();
    // Γ^k_ij − θ^k_ij at y
    let mut diff = vec![F::zero(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let g: F = fg.get(k, i, j, &yf).ok_or_else(pole)?;
                let th: F = ft.get(k, i, j, &yf).ok_or_else(pole)?;
                diff[(k * n + i) * n + j] = g - th;
            }
        }
    }
    let half = F::from(0.5).unwrap();
    let mut worst = F::zero();
    for m in 0..n {
        for p in 0..n {
            for q in p..n {
                let mut pushed = F::zero();
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            pushed = pushed + t[(m, k)] * diff[(k * n + i) * n + j] * s[(i, p)] * s[(j, q)];
                        }
                    }
                }
                let mut rhs = F::zero();
                for sidx in 0..n {
                    rhs = rhs + bt[(m, sidx)] * (d_at[q][(sidx, p)] + d_at[p][(sidx, q)]);
                }
                worst = worst.max((pushed - half * rhs).abs());
            }
        }
    }
    Ok(worst)
}
