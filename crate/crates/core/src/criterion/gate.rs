use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::OperatorField;
use crate::polyalg::{char_poly, sigma, sylvester_resultant, UniPoly};
use crate::scalar::{Field, Rational};
use crate::Expr;

/// Which expression vanished and made the system degenerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyKind {
    Determinant,
    /// Only used for n = 2.
    Trace,
    Resultant,
}

impl DegeneracyKind {
    pub fn name(self) -> &'static str {
        match self {
            DegeneracyKind::Determinant => "det",
            DegeneracyKind::Trace => "trace",
            DegeneracyKind::Resultant => "resultant",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyWitness {
    pub kind: DegeneracyKind,
    pub expr: Expr,
    pub value: Rational,
    /// The expression vanishes everywhere, not just at the base point.
    pub identically_zero: bool,
}

/// Everything the non-degeneracy gate computed, for auditing.
#[derive(Clone, Debug, PartialEq)]
pub struct GateReport {
    pub det: Expr,
    pub det_value: Rational,
    /// Elementary symmetric functions σ_1..σ_n of the eigenvalues of A.
    pub sigma: Vec<Expr>,
    pub sigma_values: Vec<Rational>,
    /// `Res_λ[f(λ), f(−λ)]` for `f(λ) = det(A − λI)`.
    pub resultant: Expr,
    pub resultant_value: Rational,
    /// Trace and its value, n = 2 only.
    pub trace: Option<(Expr, Rational)>,
    pub witness: Option<DegeneracyWitness>,
}

impl GateReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    /// Resultant test alone: `det A ≠ 0` and `R ≠ 0` at the base point.
    pub fn resultant_test(&self) -> bool {
        !self.det_value.is_zero() && !self.resultant_value.is_zero()
    }

    /// The n = 2 test `det A ≠ 0` and `tr A ≠ 0`; `None` for other n.
    pub fn trace_test(&self) -> Option<bool> {
        self.trace
            .as_ref()
            .map(|(_, t)| !self.det_value.is_zero() && !t.is_zero())
    }
}

/// `Res_λ[f(λ), f(−λ)]`.
pub fn sign_resultant<F: Field>(f: &UniPoly<F>) -> Result<F> {
    let minus = UniPoly::new(vec![F::zero(), -F::one()]);
    sylvester_resultant(f, &f.compose(&minus))
}

/// Checks that `det A` and `Res_λ[f(λ), f(−λ)]` do not vanish at the base
/// point. For n = 2 the trace test is evaluated too; it must agree with the
/// resultant test.
pub fn nondegeneracy_gate(a: &OperatorField, base: &[Rational]) -> Result<GateReport> {
    let n = a.dim();
    if base.len() < n {
        return Err(Error::PointLength {
            expected: n,
            got: base.len(),
        });
    }
    a.eval(base)?;
    let f = char_poly(a.matrix())?;
    let sigmas: Vec<Expr> = (1..=n).map(|s| sigma(&f, s)).collect();
    let det = sigmas[n - 1].clone();
    let resultant = sign_resultant(&f)?;
    let value = |e: &Expr| e.eval(base);
    let det_value = value(&det)?;
    let sigma_values = sigmas.iter().map(value).collect::<Result<Vec<_>>>()?;
    let resultant_value = value(&resultant)?;
    let trace = if n == 2 {
        let tr = a.matrix().trace()?;
        let v = value(&tr)?;
        Some((tr, v))
    } else {
        None
    };
    let witness_of = |kind, expr: &Expr, value: &Rational| DegeneracyWitness {
        kind,
        expr: expr.clone(),
        value: value.clone(),
        identically_zero: expr.is_zero(),
    };
    let witness = if det_value.is_zero() {
        Some(witness_of(DegeneracyKind::Determinant, &det, &det_value))
    } else if let Some((tr, v)) = trace.as_ref().filter(|(_, v)| v.is_zero()) {
        Some(witness_of(DegeneracyKind::Trace, tr, v))
    } else if resultant_value.is_zero() {
        Some(witness_of(DegeneracyKind::Resultant, &resultant, &resultant_value))
    } else {
        None
    };
    let report = GateReport {
        det,
        det_value,
        sigma: sigmas,
        sigma_values,
        resultant,
        resultant_value,
        trace,
        witness,
    };
    if let Some(t) = report.trace_test() {
        assert_eq!(t, report.resultant_test(), "trace and resultant gates disagree");
    }
    Ok(report)
}
