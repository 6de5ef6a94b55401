//! Problem files: the coefficients A and Γ of a system, a base point and
//! run options, in a small TOML layout.
//!
//! ```toml
//! [dimension]
//! n = 2
//!
//! [variables]
//! names = ["u", "v"]
//!
//! [A]
//! "1 1" = "u"
//! "2 2" = "1"
//!
//! [Gamma]
//! "1 1 2" = "1/u"
//!
//! [point]
//! base = ["1", "1/2"]
//!
//! [options]
//! d_route = "solve"
//! grid = "0.5:1.5:9,0:1:9"
//! step = 0.015625
//! output = "solution.tsv"
//! ```
//!
//! Indices are 1-based. `A` keys are `"row col"`; `Gamma` keys are
//! `"k i j"` with `i ≤ j`. Omitted entries are zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_bigint::BigInt;
use parabolic_core::criterion::DRoute;
use parabolic_core::geometry::{Connection, OperatorField};
use parabolic_core::polyalg::Matrix;
use parabolic_core::{parse_expr, Expr, Rational, VarSet};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    pub d_route: Option<DRoute>,
    pub grid: Option<String>,
    pub step: Option<f64>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub vars: VarSet,
    pub a: OperatorField,
    pub gamma: Connection,
    pub base: Vec<Rational>,
    pub options: Options,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    dimension: RawDimension,
    variables: Option<RawVariables>,
    #[serde(rename = "A")]
    a: BTreeMap<String, Spanned<String>>,
    #[serde(rename = "Gamma", default)]
    gamma: BTreeMap<String, Spanned<String>>,
    point: RawPoint,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDimension {
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariables {
    names: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    base: Spanned<Vec<NumberText>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    d_route: Option<Spanned<String>>,
    grid: Option<String>,
    step: Option<f64>,
    output: Option<PathBuf>,
}

/// A coordinate written either as a string (`"1/3"`, `"-0.25"`) or as a
/// bare TOML integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum NumberText {
    Text(String),
    Int(i64),
}

/// 1-based line and column of a byte offset.
pub(crate) fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

fn at(src: &str, span: std::ops::Range<usize>) -> String {
    let (l, c) = line_col(src, span.start);
    format!("line {l}, column {c}")
}

/// Exact rational from `p`, `p/q` or a decimal such as `-1.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.starts_with('-');
        let digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        if digits.is_empty() && frac.is_empty() {
            return None;
        }
        let whole: BigInt = format!("{digits}{frac}").parse().ok()?;
        let scale: BigInt = format!("1{}", "0".repeat(frac.len())).parse().ok()?;
        let v = Rational::new(whole, scale);
        return Some(if negative { -v } else { v });
    }
    t.parse().ok()
}

fn indices(key: &str, count: usize, n: usize) -> Option<Vec<usize>> {
    let parts: Vec<&str> = key
        .split(|c: char| c.is_whitespace() || c == ',' || c == '_')
        .filter(|s| !s.is_empty())
        .collect();
    if parts.len() != count {
        return None;
    }
    parts
        .iter()
        .map(|p| p.parse::<usize>().ok().filter(|&i| (1..=n).contains(&i)).map(|i| i - 1))
        .collect()
}

impl ProblemFile {
    pub fn parse(src: &str) -> Result<Self, CliError> {
        let raw: RawProblem = toml::from_str(src).map_err(|e| CliError::Input(format!("problem file: {e}")))?;
        let n = raw.dimension.n;
        if n == 0 {
            return Err(CliError::Input("[dimension] n must be at least 1".into()));
        }
        let vars = match raw.variables {
            Some(v) => {
                if v.names.len() != n {
                    return Err(CliError::Input(format!(
                        "[variables] names lists {} variables but n = {n}",
                        v.names.len()
                    )));
                }
                VarSet::new(&v.names).map_err(|e| CliError::Input(format!("[variables] names: {e}")))?
            }
            None => VarSet::standard(n),
        };
        let expr = |section: &str, key: &str, value: &Spanned<String>| -> Result<Expr, CliError> {
            parse_expr(value.get_ref(), &vars).map_err(|e| {
                CliError::Input(format!("[{section}] \"{key}\" at {}: {e}", at(src, value.span())))
            })
        };

        let mut a = Matrix::from_fn(n, n, |_, _| Expr::integer(0));
        for (key, value) in &raw.a {
            let ix = indices(key, 2, n).ok_or_else(|| {
                CliError::Input(format!(
                    "[A] key \"{key}\" at {}: expected two indices in 1..={n}",
                    at(src, value.span())
                ))
            })?;
            a[(ix[0], ix[1])] = expr("A", key, value)?;
        }
        let a = OperatorField::new(a).map_err(|e| CliError::Input(format!("[A]: {e}")))?;

        // Collected first so that mirrored entries can be compared.
        let mut entries: BTreeMap<(usize, usize, usize), (String, Expr)> = BTreeMap::new();
        let mut mirrored: Vec<(String, (usize, usize, usize), Expr, String)> = Vec::new();
        for (key, value) in &raw.gamma {
            let ix = indices(key, 3, n).ok_or_else(|| {
                CliError::Input(format!(
                    "[Gamma] key \"{key}\" at {}: expected three indices in 1..={n}",
                    at(src, value.span())
                ))
            })?;
            let e = expr("Gamma", key, value)?;
            let (k, i, j) = (ix[0], ix[1], ix[2]);
            if i > j {
                mirrored.push((key.clone(), (k, j, i), e, at(src, value.span())));
                continue;
            }
            if let Some((other, prev)) = entries.get(&(k, i, j)) {
                if *prev != e {
                    return Err(CliError::Input(format!(
                        "[Gamma] \"{key}\" at {} conflicts with \"{other}\"",
                        at(src, value.span())
                    )));
                }
            }
            entries.insert((k, i, j), (key.clone(), e));
        }
        for (key, canonical, e, pos) in mirrored {
            match entries.get(&canonical) {
                Some((_, prev)) if *prev == e => {}
                Some((other, _)) => {
                    return Err(CliError::Input(format!(
                        "[Gamma] \"{key}\" at {pos}: asymmetric, differs from \"{other}\""
                    )))
                }
                None => {
                    let (k, i, j) = canonical;
                    return Err(CliError::Input(format!(
                        "[Gamma] \"{key}\" at {pos}: lower indices must satisfy i <= j; write it as \"{} {} {}\"",
                        k + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let gamma = Connection::from_lower(n, |k, i, j| {
            entries.get(&(k, i, j)).map_or_else(|| Expr::integer(0), |(_, e)| e.clone())
        });

        let base_span = raw.point.base.span();
        let base_items = raw.point.base.into_inner();
        if base_items.len() != n {
            return Err(CliError::Input(format!(
                "[point] base at {} has {} coordinates, expected {n}",
                at(src, base_span),
                base_items.len()
            )));
        }
        let base = base_items
            .iter()
            .enumerate()
            .map(|(i, item)| match item {
                NumberText::Int(v) => Ok(Rational::from_integer((*v).into())),
                NumberText::Text(t) => parse_rational(t).ok_or_else(|| {
                    CliError::Input(format!(
                        "[point] base at {}: coordinate {} `{t}` is not a rational number",
                        at(src, base_span.clone()),
                        i + 1
                    ))
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;

        let d_route = match raw.options.d_route {
            Some(r) => Some(parse_route(r.get_ref()).ok_or_else(|| {
                CliError::Input(format!(
                    "[options] d_route at {}: expected solve, cayley or both",
                    at(src, r.span())
                ))
            })?),
            None => None,
        };
        let problem = ProblemFile {
            vars,
            a,
            gamma,
            base,
            options: Options {
                d_route,
                grid: raw.options.grid,
                step: raw.options.step,
                output: raw.options.output,
            },
        };
        problem.check_base()?;
        Ok(problem)
    }

    /// Every coefficient must be finite at the base point.
    pub fn check_base(&self) -> Result<(), CliError> {
        let n = self.vars.len();
        if self.base.len() != n {
            return Err(CliError::Input(format!(
                "base point has {} coordinates, expected {n}",
                self.base.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if self.a.get(i, j).eval(&self.base).is_err() {
                    return Err(CliError::Input(format!("A \"{} {}\" has a pole at the base point", i + 1, j + 1)));
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    if self.gamma.get(k, i, j).eval(&self.base).is_err() {
                        return Err(CliError::Input(format!(
                            "Gamma \"{} {} {}\" has a pole at the base point",
                            k + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Canonical text form; zero entries are left out.
    pub fn to_text(&self) -> String {
        let n = self.dim();
        let mut out = String::new();
        let quoted = |s: &str| toml::Value::String(s.to_string()).to_string();
        writeln!(out, "[dimension]\nn = {n}\n").unwrap();
        let names: Vec<String> = self.vars.names().iter().map(|s| quoted(s)).collect();
        writeln!(out, "[variables]\nnames = [{}]\n", names.join(", ")).unwrap();
        writeln!(out, "[A]").unwrap();
        for i in 0..n {
            for j in 0..n {
                let e = self.a.get(i, j);
                if !e.is_zero() {
                    writeln!(out, "\"{} {}\" = {}", i + 1, j + 1, quoted(&e.display(&self.vars).to_string())).unwrap();
                }
            }
        }
        writeln!(out, "\n[Gamma]").unwrap();
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let e = self.gamma.get(k, i, j);
                    if !e.is_zero() {
                        writeln!(
                            out,
                            "\"{} {} {}\" = {}",
                            k + 1,
                            i + 1,
                            j + 1,
                            quoted(&e.display(&self.vars).to_string())
                        )
                        .unwrap();
                    }
                }
            }
        }
        let base: Vec<String> = self.base.iter().map(|v| quoted(&v.to_string())).collect();
        writeln!(out, "\n[point]\nbase = [{}]", base.join(", ")).unwrap();
        let o = &self.options;
        if o != &Options::default() {
            writeln!(out, "\n[options]").unwrap();
            if let Some(r) = o.d_route {
                writeln!(out, "d_route = {}", quoted(route_name(r))).unwrap();
            }
            if let Some(g) = &o.grid {
                writeln!(out, "grid = {}", quoted(g)).unwrap();
            }
            if let Some(h) = o.step {
                writeln!(out, "step = {}", toml::Value::Float(h)).unwrap();
            }
            if let Some(p) = &o.output {
                writeln!(out, "output = {}", quoted(&p.to_string_lossy())).unwrap();
            }
        }
        out
    }
}

pub fn parse_route(s: &str) -> Option<DRoute> {
    match s.trim().to_ascii_lowercase().as_str() {
        "solve" => Some(DRoute::Solve),
        "cayley" => Some(DRoute::Cayley),
        "both" => Some(DRoute::Both),
        _ => None,
    }
}

pub fn route_name(r: DRoute) -> &'static str {
    match r {
        DRoute::Solve => "solve",
        DRoute::Cayley => "cayley",
        DRoute::Both => "both",
    }
}
