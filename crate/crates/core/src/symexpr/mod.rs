//! Exact symbolic expressions: rational functions over the integers in a
//! fixed set of variables.

mod expr;
mod gcd;
mod parse;
mod poly;
mod varset;

pub use expr::{monomial_exponents, Expr, ExprDisplay};
pub use gcd::gcd;
pub use parse::parse_expr;
pub use poly::{Exponents, Poly};
pub use varset::VarSet;

use crate::error::{Error, Result};

/// Partial derivative with respect to variable `var`, checked against the
/// variable set.
pub fn differentiate(e: &Expr, var: usize, vars: &VarSet) -> Result<Expr> {
    if var >= vars.len() {
        return Err(Error::VariableIndex {
            index: var,
            count: vars.len(),
        });
    }
    Ok(e.diff(var))
}

/// Partial derivative with respect to the named variable.
pub fn differentiate_by_name(e: &Expr, name: &str, vars: &VarSet) -> Result<Expr> {
    let var = vars.index_of(name).ok_or_else(|| Error::UnknownVariable {
        name: name.to_string(),
        position: 0,
    })?;
    Ok(e.diff(var))
}
