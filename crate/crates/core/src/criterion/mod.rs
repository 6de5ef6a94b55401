//! The reducibility test: non-degeneracy gate, inversion of Λ_sym,
//! reconstruction of θ and the zero-curvature check.

mod curvature;
mod dtensor;
mod gate;

pub use curvature::{zero_curvature, Curvature};
pub use dtensor::{
    d_component, d_tensor, d_tensor_cayley, d_tensor_cayley_2d, d_tensor_solve, lambda_sym, rhs_w, solve_theta,
    theta_from_d, theta_residual, DRoute,
};
pub use gate::{nondegeneracy_gate, sign_resultant, DegeneracyKind, DegeneracyWitness, GateReport};

use crate::error::{Error, Result};
use crate::geometry::{Connection, OperatorField};
use crate::scalar::Rational;
use crate::Expr;

/// Right-hand sides `w^r_ij`; same shape and symmetry as a connection.
pub type RhsW = Connection;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Reducible,
    NotReducible,
    Degenerate,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Reducible => "Reducible",
            Status::NotReducible => "NotReducible",
            Status::Degenerate => "Degenerate",
        }
    }
}

/// A nonzero component of the curvature residual.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureWitness {
    /// 0-based `(m, k, q, p)` with `k < q`.
    pub index: (usize, usize, usize, usize),
    pub expr: Expr,
    /// Value at the base point; `None` on a pole.
    pub value: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub gate: GateReport,
    /// Present unless degenerate.
    pub theta: Option<Connection>,
    /// Nonzero curvature components in index order; empty unless
    /// `NotReducible`.
    pub curvature_witnesses: Vec<CurvatureWitness>,
    pub base_point: Vec<Rational>,
}

impl Verdict {
    pub fn degeneracy_witness(&self) -> Option<&DegeneracyWitness> {
        self.gate.witness.as_ref()
    }
}

/// Runs the whole test at a base point.
pub fn decide(a: &OperatorField, gamma: &Connection, base: &[Rational], route: DRoute) -> Result<Verdict> {
    let n = a.dim();
    if gamma.dim() != n {
        return Err(Error::Dimension(format!(
            "operator has dimension {n}, connection {}",
            gamma.dim()
        )));
    }
    if base.len() != n {
        return Err(Error::PointLength {
            expected: n,
            got: base.len(),
        });
    }
    gamma.eval(base)?;
    let gate = nondegeneracy_gate(a, base)?;
    if !gate.passed() {
        return Ok(Verdict {
            status: Status::Degenerate,
            gate,
            theta: None,
            curvature_witnesses: Vec::new(),
            base_point: base.to_vec(),
        });
    }
    let theta = solve_theta(a, gamma, route)?;
    let curvature = zero_curvature(&theta);
    let curvature_witnesses: Vec<CurvatureWitness> = curvature
        .nonzero()
        .map(|(index, expr)| CurvatureWitness {
            index: *index,
            expr: expr.clone(),
            value: expr.eval(base).ok(),
        })
        .collect();
    let status = if curvature_witnesses.is_empty() {
        Status::Reducible
    } else {
        Status::NotReducible
    };
    Ok(Verdict {
        status,
        gate,
        theta: Some(theta),
        curvature_witnesses,
        base_point: base.to_vec(),
    })
}
