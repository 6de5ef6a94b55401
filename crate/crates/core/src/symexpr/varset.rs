use crate::error::{Error, Result};

/// Ordered, duplicate-free list of variable names. Position `i` is the
/// variable with index `i` in every [`crate::Expr`] of the problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::VarSet("at least one variable is required".into()));
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref().trim();
            if !is_identifier(name) {
                return Err(Error::VarSet(format!("`{name}` is not an identifier")));
            }
            if out.iter().any(|n| n == name) {
                return Err(Error::VarSet(format!("duplicate variable `{name}`")));
            }
            out.push(name.to_string());
        }
        Ok(VarSet { names: out })
    }

    /// `y1, ..., yn`.
    pub fn standard(n: usize) -> Self {
        VarSet {
            names: (1..=n).map(|i| format!("y{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(VarSet::new(&["y1", "y1"]).is_err());
        assert!(VarSet::new(&["1y"]).is_err());
        assert!(VarSet::new::<&str>(&[]).is_err());
        assert_eq!(VarSet::new(&["u", "v"]).unwrap().index_of("v"), Some(1));
    }
}
