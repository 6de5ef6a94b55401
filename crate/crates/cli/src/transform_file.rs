//! Transform files: a change of variables `ỹ = φ(y)` and optionally its
//! inverse.
//!
//! ```toml
//! source = ["u", "v"]          # names of y; default: the problem's names
//! target = ["p", "q"]          # names of ỹ; default: same as source
//! forward = ["u + v^2", "v"]   # in source names
//! inverse = ["p - q^2", "q"]   # in target names, optional
//! ```
//!
//! The inverse may be left out for affine maps; it is then computed.

use parabolic_core::geometry::PointTransform;
use parabolic_core::{parse_expr, Expr, VarSet};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;
use crate::problem::line_col;

#[derive(Clone, Debug)]
pub struct TransformFile {
    pub source: VarSet,
    pub target: VarSet,
    pub transform: PointTransform,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransform {
    source: Option<Vec<String>>,
    target: Option<Vec<String>>,
    forward: Vec<Spanned<String>>,
    inverse: Option<Vec<Spanned<String>>>,
}

fn exprs(src: &str, field: &str, items: &[Spanned<String>], vars: &VarSet) -> Result<Vec<Expr>, CliError> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| {
            parse_expr(s.get_ref(), vars).map_err(|e| {
                let (l, c) = line_col(src, s.span().start);
                CliError::Input(format!("{field}[{}] at line {l}, column {c}: {e}", i + 1))
            })
        })
        .collect()
}

impl TransformFile {
    /// `default_names` are used for the source variables when the file
    /// does not name them.
    pub fn parse(src: &str, default_names: &VarSet) -> Result<Self, CliError> {
        let raw: RawTransform = toml::from_str(src).map_err(|e| CliError::Input(format!("transform file: {e}")))?;
        let n = raw.forward.len();
        let names = |field: &str, list: Option<Vec<String>>, fallback: &VarSet| -> Result<VarSet, CliError> {
            match list {
                Some(l) if l.len() != n => Err(CliError::Input(format!(
                    "transform file: {field} names {} variables, forward has {n} components",
                    l.len()
                ))),
                Some(l) => VarSet::new(&l).map_err(|e| CliError::Input(format!("transform file: {field}: {e}"))),
                None => Ok(fallback.clone()),
            }
        };
        let source = names("source", raw.source, default_names)?;
        if source.len() != n {
            return Err(CliError::Input(format!(
                "transform file: forward has {n} components for {} variables",
                source.len()
            )));
        }
        let target = names("target", raw.target, &source)?;
        let forward = exprs(src, "forward", &raw.forward, &source)?;
        let inverse = match &raw.inverse {
            Some(items) if items.len() != n => {
                return Err(CliError::Input(format!(
                    "transform file: inverse has {} components, expected {n}",
                    items.len()
                )))
            }
            Some(items) => Some(exprs(src, "inverse", items, &target)?),
            None => None,
        };
        let transform = PointTransform::new(forward, inverse).map_err(|e| CliError::Input(format!("transform file: {e}")))?;
        Ok(TransformFile {
            source,
            target,
            transform,
        })
    }
}
