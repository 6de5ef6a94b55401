//! Reports of `check`, as text for people or JSON for scripts.

use std::fmt::Write as _;

use parabolic_core::criterion::{DRoute, Status, Verdict};
use parabolic_core::VarSet;
use serde::{Deserialize, Serialize};

use crate::problem::route_name;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: String,
    pub expr: String,
    pub value: String,
    pub identically_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub det: String,
    pub det_value: String,
    /// σ_1..σ_n.
    pub sigma: Vec<String>,
    pub sigma_values: Vec<String>,
    pub resultant: String,
    pub resultant_value: String,
    /// n = 2 only.
    pub trace: Option<String>,
    pub trace_value: Option<String>,
    pub passed: bool,
    pub witness: Option<Witness>,
}

/// θ^k_ij with 1-based `[k, i, j]`, `i ≤ j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub index: [usize; 3],
    pub expr: String,
}

/// Curvature component with 1-based `[m, k, q, p]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureEntry {
    pub index: [usize; 4],
    pub expr: String,
    pub value: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub status: String,
    pub exit_code: i32,
    pub variables: Vec<String>,
    pub base_point: Vec<String>,
    pub d_route: String,
    pub gate: Gate,
    /// Every component with `i ≤ j`, zeros included; empty when degenerate.
    pub theta: Vec<ThetaEntry>,
    pub curvature_witnesses: Vec<CurvatureEntry>,
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Reducible => 0,
        Status::NotReducible => 1,
        Status::Degenerate => 2,
    }
}

impl Report {
    pub fn new(verdict: &Verdict, vars: &VarSet, route: DRoute) -> Self {
        let show = |e: &parabolic_core::Expr| e.display(vars).to_string();
        let g = &verdict.gate;
        let gate = Gate {
            det: show(&g.det),
            det_value: g.det_value.to_string(),
            sigma: g.sigma.iter().map(show).collect(),
            sigma_values: g.sigma_values.iter().map(|v| v.to_string()).collect(),
            resultant: show(&g.resultant),
            resultant_value: g.resultant_value.to_string(),
            trace: g.trace.as_ref().map(|(e, _)| show(e)),
            trace_value: g.trace.as_ref().map(|(_, v)| v.to_string()),
            passed: g.passed(),
            witness: g.witness.as_ref().map(|w| Witness {
                kind: w.kind.name().to_string(),
                expr: show(&w.expr),
                value: w.value.to_string(),
                identically_zero: w.identically_zero,
            }),
        };
        let mut theta = Vec::new();
        if let Some(t) = &verdict.theta {
            let n = t.dim();
            for k in 0..n {
                for i in 0..n {
                    for j in i..n {
                        theta.push(ThetaEntry {
                            index: [k + 1, i + 1, j + 1],
                            expr: show(t.get(k, i, j)),
                        });
                    }
                }
            }
        }
        let curvature_witnesses = verdict
            .curvature_witnesses
            .iter()
            .map(|w| {
                let (m, k, q, p) = w.index;
                CurvatureEntry {
                    index: [m + 1, k + 1, q + 1, p + 1],
                    expr: show(&w.expr),
                    value: w.value.as_ref().map(|v| v.to_string()),
                }
            })
            .collect();
        Report {
            status: verdict.status.name().to_string(),
            exit_code: exit_code(verdict.status),
            variables: vars.names().to_vec(),
            base_point: verdict.base_point.iter().map(|v| v.to_string()).collect(),
            d_route: route_name(route).to_string(),
            gate,
            theta,
            curvature_witnesses,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "status: {}", self.status).unwrap();
        writeln!(w, "variables: {}", self.variables.join(", ")).unwrap();
        writeln!(w, "base point: ({})", self.base_point.join(", ")).unwrap();
        writeln!(w).unwrap();
        let g = &self.gate;
        writeln!(w, "non-degeneracy gate: {}", if g.passed { "passed" } else { "failed" }).unwrap();
        writeln!(w, "  det A = {}", g.det).unwrap();
        writeln!(w, "        = {} at base", g.det_value).unwrap();
        for (s, (e, v)) in g.sigma.iter().zip(&g.sigma_values).enumerate() {
            writeln!(w, "  sigma{} = {}   [{} at base]", s + 1, e, v).unwrap();
        }
        if let (Some(t), Some(v)) = (&g.trace, &g.trace_value) {
            writeln!(w, "  tr A = {}   [{} at base]", t, v).unwrap();
        }
        writeln!(w, "  Res[f(l), f(-l)] = {} at base", g.resultant_value).unwrap();
        if let Some(wit) = &g.witness {
            writeln!(
                w,
                "  degenerate: {} = {} at base{}",
                wit.kind,
                wit.value,
                if wit.identically_zero { " (identically zero)" } else { "" }
            )
            .unwrap();
            writeln!(w, "    {} = {}", wit.kind, wit.expr).unwrap();
        }
        if !self.theta.is_empty() {
            writeln!(w).unwrap();
            writeln!(w, "theta ({} route), nonzero components:", self.d_route).unwrap();
            let mut any = false;
            for t in self.theta.iter().filter(|t| t.expr != "0") {
                let [k, i, j] = t.index;
                writeln!(w, "  theta^{k}_{i}{j} = {}", t.expr).unwrap();
                any = true;
            }
            if !any {
                writeln!(w, "  (all zero)").unwrap();
            }
        }
        if !self.curvature_witnesses.is_empty() {
            writeln!(w).unwrap();
            writeln!(w, "curvature, nonzero components (m, k, q, p):").unwrap();
            for c in &self.curvature_witnesses {
                let [m, k, q, p] = c.index;
                let at = c.value.as_deref().unwrap_or("pole");
                writeln!(w, "  R^{m}_{k}{q}{p} = {}   [{} at base]", c.expr, at).unwrap();
            }
        }
        out
    }
}
