use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Connection;
use crate::polyalg::Matrix;
use crate::scalar::{rational_to_float, Rational};

use super::grid::GridSpec;
use super::numeric::FloatConnection;
use super::Real;

/// Points whose |det T| falls below this along their path are dropped.
pub const DET_THRESHOLD: f64 = 1e-9;

/// T and ỹ at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint<F = f64> {
    pub y: Vec<F>,
    pub t: Matrix<F>,
    pub ytilde: Vec<F>,
}

/// A grid point excluded from the solution, with the reason.
#[derive(Clone, Debug, PartialEq)]
pub struct DroppedPoint {
    pub y: Vec<f64>,
    pub reason: Error,
}

/// Numeric solution of the Pfaff system on a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSolution<F = f64> {
    pub base_point: Vec<Rational>,
    pub grid: GridSpec,
    /// Integration step per axis.
    pub steps: Vec<F>,
    pub method_order: u32,
    pub t0: Matrix<F>,
    pub ytilde_base: Vec<F>,
    pub points: Vec<GridPoint<F>>,
    pub dropped: Vec<DroppedPoint>,
    /// Largest difference in T or ỹ between sweeping the axes in forward
    /// and in reverse order. Small exactly when the system is integrable.
    pub compatibility_residual: F,
    /// Richardson estimate of the integration error at the retained point
    /// farthest from the base.
    pub estimated_error: F,
}

impl<F: Real> GridSolution<F> {
    pub fn dim(&self) -> usize {
        self.t0.rows()
    }
}

type State<F> = (Matrix<F>, Vec<F>);

/// Joint state `(T, ỹ)` advanced along one axis from `y` by `length`, with
/// classical fourth-order Runge–Kutta steps no longer than `h`.
fn advance<F: Real>(
    theta: &FloatConnection,
    axis: usize,
    y: &mut [F],
    state: State<F>,
    length: F,
    h: F,
    sign: F,
) -> std::result::Result<State<F>, Error> {
    let count = (length.abs() / h - F::from(1e-9).unwrap()).ceil().max(F::one());
    let ds = length / count;
    let half = F::from(0.5).unwrap();
    let sixth = F::from(1.0 / 6.0).unwrap();
    let n = state.1.len();
    let start = y[axis];
    let pole = |y: &[F]| Error::PoleOnPath(y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect());
    let rhs = |y: &[F], t: &Matrix<F>| -> std::result::Result<State<F>, Error> {
        let slice = theta.slice(axis, y).ok_or_else(|| pole(y))?;
        let dt = t.mul(&slice).expect("square");
        let dy = (0..n).map(|m| t[(m, axis)]).collect();
        Ok((dt, dy))
    };
    let combine = |s: &State<F>, d: &State<F>, k: F| -> State<F> {
        (
            s.0.add(&d.0.scale(&k)).expect("same shape"),
            s.1.iter().zip(&d.1).map(|(&a, &b)| a + b * k).collect(),
        )
    };
    let mut s = state;
    let steps = count.to_usize().unwrap_or(1);
    for step in 0..steps {
        let s0 = start + ds * F::from(step).unwrap();
        y[axis] = s0;
        let k1 = rhs(y, &s.0)?;
        y[axis] = s0 + ds * half;
        let m1 = combine(&s, &k1, ds * half);
        let k2 = rhs(y, &m1.0)?;
        let m2 = combine(&s, &k2, ds * half);
        let k3 = rhs(y, &m2.0)?;
        y[axis] = s0 + ds;
        let m3 = combine(&s, &k3, ds);
        let k4 = rhs(y, &m3.0)?;
        let two = F::from(2.0).unwrap();
        let t = (0..n * n).fold(s.0.clone(), |mut acc, idx| {
            let (i, j) = (idx / n, idx % n);
            acc[(i, j)] = acc[(i, j)]
                + ds * sixth * (k1.0[(i, j)] + two * k2.0[(i, j)] + two * k3.0[(i, j)] + k4.0[(i, j)]);
            acc
        });
        let yt = (0..n)
            .map(|m| s.1[m] + ds * sixth * (k1.1[m] + two * k2.1[m] + two * k3.1[m] + k4.1[m]))
            .collect();
        s = (t, yt);
        let det = s.0.det().expect("square");
        if det.abs() < F::from(DET_THRESHOLD).unwrap() || det * sign < F::zero() {
            return Err(Error::DeterminantCollapse {
                point: y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
                det: det.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    y[axis] = start + length;
    Ok(s)
}

/// Integrates from `base` to `target` moving along the axes in `order`.
fn sweep<F: Real>(
    theta: &FloatConnection,
    base: &[F],
    target: &[F],
    order: &[usize],
    t0: &Matrix<F>,
    steps: &[F],
) -> std::result::Result<State<F>, Error> {
    let n = base.len();
    let sign = t0.det().expect("square").signum();
    let mut y = base.to_vec();
    let mut s = (t0.clone(), vec![F::zero(); n]);
    for &axis in order {
        let length = target[axis] - base[axis];
        if length != F::zero() {
            s = advance(theta, axis, &mut y, s, length, steps[axis], sign)?;
        }
    }
    Ok(s)
}

fn max_diff<F: Real>(a: &State<F>, b: &State<F>) -> F {
    let t = a.0.entries().iter().zip(b.0.entries()).map(|(x, y)| (*x - *y).abs());
    let v = a.1.iter().zip(&b.1).map(|(x, y)| (*x - *y).abs());
    t.chain(v).fold(F::zero(), F::max)
}

fn check_start<F: Real>(theta: &FloatConnection, base: &[F], t0: &Matrix<F>) -> Result<()> {
    let n = theta.dim();
    if base.len() != n || t0.rows() != n || t0.cols() != n {
        return Err(Error::Dimension("base point, T0 and θ must share a dimension".into()));
    }
    if (0..n).any(|q| theta.slice(q, base).is_none()) {
        return Err(Error::PoleOnPath(base.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()));
    }
    let det = t0.det()?;
    if det.abs() < F::from(DET_THRESHOLD).unwrap() {
        return Err(Error::DeterminantCollapse {
            point: base.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
            det: det.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn to_float<F: Real>(base: &[Rational]) -> Vec<F> {
    base.iter().map(rational_to_float::<F>).collect()
}

/// Solves `∂T^m_p/∂y^q = Σ_r θ^r_pq T^m_r` together with `∂ỹ^m/∂y^p = T^m_p`
/// (ỹ = 0 at the base) at every grid point, sweeping the axes in order from
/// the base point. `steps` defaults to 1/64 of each axis extent.
pub fn integrate_t<F: Real>(
    theta: &Connection,
    base: &[Rational],
    t0: &Matrix<F>,
    grid: &GridSpec,
    steps: Option<&[F]>,
) -> Result<GridSolution<F>> {
    let n = theta.dim();
    if grid.dim() != n {
        return Err(Error::Grid(format!("grid has {} axes, expected {n}", grid.dim())));
    }
    let compiled = FloatConnection::new(theta);
    let b: Vec<F> = to_float(base);
    check_start(&compiled, &b, t0)?;
    let steps: Vec<F> = match steps {
        Some(s) if s.len() == n && s.iter().all(|h| *h > F::zero()) => s.to_vec(),
        Some(_) => return Err(Error::Grid("need one positive step per axis".into())),
        None => grid.default_steps().into_iter().map(|h| F::from(h).unwrap()).collect(),
    };
    let forward: Vec<usize> = (0..n).collect();
    let backward: Vec<usize> = (0..n).rev().collect();
    let results: Vec<_> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let yf = grid.point(flat);
            let y: Vec<F> = yf.iter().map(|&v| F::from(v).unwrap()).collect();
            let run = sweep(&compiled, &b, &y, &forward, t0, &steps).and_then(|s| {
                let other = if n > 1 {
                    max_diff(&s, &sweep(&compiled, &b, &y, &backward, t0, &steps)?)
                } else {
                    F::zero()
                };
                Ok((s, other))
            });
            (yf, y, run)
        })
        .collect();
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    let mut compat = F::zero();
    for (yf, y, run) in results {
        match run {
            Ok(((t, ytilde), diff)) => {
                compat = compat.max(diff);
                points.push(GridPoint { y, t, ytilde });
            }
            Err(reason) => dropped.push(DroppedPoint { y: yf, reason }),
        }
    }
    let estimated_error = richardson(&compiled, &b, t0, &steps, &points);
    Ok(GridSolution {
        base_point: base.to_vec(),
        grid: grid.clone(),
        steps,
        method_order: 4,
        t0: t0.clone(),
        ytilde_base: vec![F::zero(); n],
        points,
        dropped,
        compatibility_residual: compat,
        estimated_error,
    })
}

/// `|u_h − u_{h/2}| / 15` at the retained point farthest from the base.
fn richardson<F: Real>(theta: &FloatConnection, base: &[F], t0: &Matrix<F>, steps: &[F], points: &[GridPoint<F>]) -> F {
    let dist = |p: &GridPoint<F>| {
        p.y.iter()
            .zip(base)
            .fold(F::zero(), |acc, (a, b)| acc + (*a - *b).abs())
    };
    let Some(far) = points.iter().max_by(|a, b| dist(a).partial_cmp(&dist(b)).unwrap_or(std::cmp::Ordering::Equal))
    else {
        return F::zero();
    };
    let order: Vec<usize> = (0..base.len()).collect();
    let halves: Vec<F> = steps.iter().map(|h| *h / F::from(2.0).unwrap()).collect();
    match sweep(theta, base, &far.y, &order, t0, &halves) {
        Ok(fine) => max_diff(&(far.t.clone(), far.ytilde.clone()), &fine) / F::from(15.0).unwrap(),
        Err(_) => F::nan(),
    }
}

/// Fixes the additive freedom in ỹ: the solution takes the value
/// `ytilde_base` at the base point.
pub fn integrate_coordinates<F: Real>(mut sol: GridSolution<F>, ytilde_base: &[F]) -> Result<GridSolution<F>> {
    if ytilde_base.len() != sol.dim() {
        return Err(Error::Dimension("base values of ỹ".into()));
    }
    let shift: Vec<F> = ytilde_base.iter().zip(&sol.ytilde_base).map(|(a, b)| *a - *b).collect();
    for p in &mut sol.points {
        for (v, c) in p.ytilde.iter_mut().zip(&shift) {
            *v = *v + *c;
        }
    }
    sol.ytilde_base = ytilde_base.to_vec();
    Ok(sol)
}

/// Integrates T from `base` to `target` along the axes in forward and in
/// reverse order and returns the largest entrywise difference.
pub fn path_independence_check<F: Real>(
    theta: &Connection,
    base: &[Rational],
    target: &[F],
    t0: &Matrix<F>,
    steps: &[F],
) -> Result<F> {
    let n = theta.dim();
    let compiled = FloatConnection::new(theta);
    let b: Vec<F> = to_float(base);
    check_start(&compiled, &b, t0)?;
    if target.len() != n || steps.len() != n {
        return Err(Error::Dimension("target and steps need one entry per axis".into()));
    }
    let forward: Vec<usize> = (0..n).collect();
    let backward: Vec<usize> = (0..n).rev().collect();
    let a = sweep(&compiled, &b, target, &forward, t0, steps)?;
    let c = sweep(&compiled, &b, target, &backward, t0, steps)?;
    Ok(a.0
        .entries()
        .iter()
        .zip(c.0.entries())
        .map(|(x, y)| (*x - *y).abs())
        .fold(F::zero(), F::max))
}
