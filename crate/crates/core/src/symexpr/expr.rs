use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::gcd::gcd;
use super::poly::{Exponents, Poly};
use super::varset::VarSet;
use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

/// Exact rational function `numer / denom` with integer coefficients.
///
/// Always held in canonical form: the two polynomials are coprime over the
/// integers and the leading coefficient of the denominator is positive.
/// Equal functions therefore have identical representations and the zero
/// test is a look at the numerator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    numer: Poly,
    denom: Poly,
}

impl Expr {
    /// Builds `numer / denom` and normalizes. Panics on a zero denominator.
    pub fn from_polys(numer: Poly, denom: Poly) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        if numer.is_zero() {
            return Expr::zero();
        }
        let g = gcd(&numer, &denom);
        let (mut numer, mut denom) = if g.is_one() {
            (numer, denom)
        } else {
            (
                numer.div_exact(&g).expect("gcd divides numerator"),
                denom.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        if denom.leading_sign_negative() {
            numer = numer.neg();
            denom = denom.neg();
        }
        Expr { numer, denom }
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            numer: p,
            denom: Poly::one(),
        }
    }

    pub fn var(index: usize) -> Self {
        Self::from_poly(Poly::var(index))
    }

    pub fn integer(value: impl Into<BigInt>) -> Self {
        Self::from_poly(Poly::constant(value.into()))
    }

    pub fn rational(value: &BigRational) -> Self {
        Self::from_polys(
            Poly::constant(value.numer().clone()),
            Poly::constant(value.denom().clone()),
        )
    }

    pub fn numer(&self) -> &Poly {
        &self.numer
    }

    pub fn denom(&self) -> &Poly {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.numer.is_constant() && self.denom.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denom.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        Some(BigRational::new(
            self.numer.as_constant()?,
            self.denom.as_constant()?,
        ))
    }

    /// Number of terms in numerator and denominator.
    pub fn size(&self) -> usize {
        self.numer.len() + self.denom.len()
    }

    /// Number of variable slots referenced.
    pub fn var_span(&self) -> usize {
        self.numer.var_span().max(self.denom.var_span())
    }

    pub fn recip(&self) -> Option<Expr> {
        if self.is_zero() {
            return None;
        }
        let (mut numer, mut denom) = (self.denom.clone(), self.numer.clone());
        if denom.leading_sign_negative() {
            numer = numer.neg();
            denom = denom.neg();
        }
        Some(Expr { numer, denom })
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        Some(self * &other.recip()?)
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn powi(&self, exp: i64) -> Option<Expr> {
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let k = exp.unsigned_abs() as u32;
        Some(Expr {
            numer: base.numer.pow(k),
            denom: base.denom.pow(k),
        })
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Expr {
        let dn = self.numer.derivative(var);
        if self.denom.is_constant() {
            return Expr::from_polys(dn, self.denom.clone());
        }
        let dd = self.denom.derivative(var);
        if dd.is_zero() {
            return Expr::from_polys(dn, self.denom.clone());
        }
        // (n/d)' = (n' d - n d') / d^2
        let top = dn.mul(&self.denom).sub(&self.numer.mul(&dd));
        Expr::from_polys(top, self.denom.mul(&self.denom))
    }

    /// Exact value at a rational point; fails at a pole.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational> {
        self.check_point_len(point.len())?;
        let d = self.denom.eval(point);
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.numer.eval(point) / d)
    }

    /// Floating-point value; fails where the denominator evaluates to zero.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        self.check_point_len(point.len())?;
        let d = self.denom.eval_f64(point);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Pole);
        }
        Ok(self.numer.eval_f64(point) / d)
    }

    fn check_point_len(&self, len: usize) -> Result<()> {
        let span = self.var_span();
        if len < span {
            Err(Error::PointLength {
                expected: span,
                got: len,
            })
        } else {
            Ok(())
        }
    }

    /// Composition: variable `i` is replaced by `values[i]`.
    pub fn substitute(&self, values: &[Expr]) -> Result<Expr> {
        self.check_point_len(values.len())?;
        let n = substitute_poly(&self.numer, values);
        let d = substitute_poly(&self.denom, values);
        n.checked_div(&d).ok_or(Error::Pole)
    }

    /// Random nonzero probe: evaluates at `rounds` seeded random rational
    /// points and reports whether any non-pole value was nonzero. A `true`
    /// result proves the expression is not identically zero.
    pub fn probe_nonzero<R: Rng>(&self, rng: &mut R, nvars: usize, rounds: usize) -> bool {
        for _ in 0..rounds {
            let point: Vec<BigRational> = (0..nvars.max(self.var_span()))
                .map(|_| BigRational::new(rng.gen_range(-97i64..=97).into(), rng.gen_range(1i64..=31).into()))
                .collect();
            if let Ok(v) = self.eval(&point) {
                if !v.is_zero() {
                    return true;
                }
            }
        }
        false
    }

    /// Zero test with an optional random pre-check. The pre-check can only
    /// short-circuit to `false`; the verdict is always the canonical one.
    pub fn is_zero_with_probe<R: Rng>(&self, rng: Option<&mut R>) -> bool {
        if let Some(rng) = rng {
            if self.probe_nonzero(rng, self.var_span(), 2) {
                return false;
            }
        }
        self.is_zero()
    }

    pub fn display<'a>(&'a self, vars: &'a VarSet) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, vars: Some(vars) }
    }
}

fn substitute_poly(p: &Poly, values: &[Expr]) -> Expr {
    let span = p.var_span();
    // powers[i][k] = values[i]^k, grown on demand
    let mut powers: Vec<Vec<Expr>> = (0..span).map(|_| vec![Expr::one()]).collect();
    let mut acc = Expr::zero();
    for (e, c) in p.terms() {
        let mut term = Expr::integer(c.clone());
        for (i, &k) in e.iter().enumerate() {
            let k = k as usize;
            if k == 0 {
                continue;
            }
            while powers[i].len() <= k {
                let next = powers[i].last().unwrap() * &values[i];
                powers[i].push(next);
            }
            term = &term * &powers[i][k];
        }
        acc = &acc + &term;
    }
    acc
}

impl Zero for Expr {
    fn zero() -> Self {
        Expr::from_poly(Poly::zero())
    }

    fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }
}

impl One for Expr {
    fn one() -> Self {
        Expr::from_poly(Poly::one())
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;

    fn add(self, rhs: &Expr) -> Expr {
        combine(self, rhs, false)
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;

    fn sub(self, rhs: &Expr) -> Expr {
        combine(self, rhs, true)
    }
}

/// a/b ± c/d with the denominator gcd split off first, so that only the
/// gcd of the new numerator with gcd(b, d) has to be removed afterwards.
fn combine(x: &Expr, y: &Expr, negate: bool) -> Expr {
    let rhs = |p: &Poly| if negate { p.neg() } else { p.clone() };
    if y.is_zero() {
        return x.clone();
    }
    if x.is_zero() {
        return Expr {
            numer: rhs(&y.numer),
            denom: y.denom.clone(),
        };
    }
    if x.denom == y.denom {
        let top = if negate {
            x.numer.sub(&y.numer)
        } else {
            x.numer.add(&y.numer)
        };
        if x.denom.is_one() {
            return Expr::from_poly(top);
        }
        return Expr::from_polys(top, x.denom.clone());
    }
    let g = gcd(&x.denom, &y.denom);
    let xd = x.denom.div_exact(&g).expect("gcd divides");
    let yd = y.denom.div_exact(&g).expect("gcd divides");
    let top = x.numer.mul(&yd).add(&rhs(&y.numer).mul(&xd));
    if top.is_zero() {
        return Expr::zero();
    }
    let h = gcd(&top, &g);
    let (top, g) = if h.is_one() {
        (top, g)
    } else {
        (top.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
    };
    let mut denom = xd.mul(&yd).mul(&g);
    let mut numer = top;
    if denom.leading_sign_negative() {
        numer = numer.neg();
        denom = denom.neg();
    }
    Expr { numer, denom }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;

    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.denom.is_one() && rhs.denom.is_one() {
            return Expr::from_poly(self.numer.mul(&rhs.numer));
        }
        let reduce = |n: &Poly, d: &Poly| -> (Poly, Poly) {
            let g = gcd(n, d);
            if g.is_one() {
                (n.clone(), d.clone())
            } else {
                (n.div_exact(&g).unwrap(), d.div_exact(&g).unwrap())
            }
        };
        let (a, d) = reduce(&self.numer, &rhs.denom);
        let (c, b) = reduce(&rhs.numer, &self.denom);
        let mut numer = a.mul(&c);
        let mut denom = b.mul(&d);
        if denom.leading_sign_negative() {
            numer = numer.neg();
            denom = denom.neg();
        }
        Expr { numer, denom }
    }
}

impl<'a> Div<&'a Expr> for &'a Expr {
    type Output = Expr;

    /// Panics on division by zero; see [`Expr::checked_div`].
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

impl Neg for &Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        Expr {
            numer: self.numer.neg(),
            denom: self.denom.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(value: i64) -> Self {
        Expr::integer(value)
    }
}

impl From<&BigRational> for Expr {
    fn from(value: &BigRational) -> Self {
        Expr::rational(value)
    }
}

impl Ring for Expr {
    fn from_i64(value: i64) -> Self {
        Expr::integer(value)
    }

    fn div_exact(&self, divisor: &Self) -> Option<Self> {
        self.checked_div(divisor)
    }

    fn pivot_cost(&self) -> Option<f64> {
        (!self.is_zero()).then(|| self.size() as f64)
    }
}

impl Field for Expr {
    fn recip(&self) -> Option<Self> {
        Expr::recip(self)
    }

    fn invert(m: &crate::polyalg::Matrix<Self>) -> crate::Result<crate::polyalg::Matrix<Self>> {
        crate::polyalg::fraction_free_inverse(m)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Expr::rational(&BigRational::new(numer.into(), denom.into()))
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    vars: Option<&'a VarSet>,
}

impl ExprDisplay<'_> {
    fn name(&self, i: usize) -> String {
        match self.vars.and_then(|v| v.names().get(i)) {
            Some(n) => n.clone(),
            None => format!("y{}", i + 1),
        }
    }

    fn write_poly(&self, f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
        if p.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in p.terms().iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !magnitude.is_one() || e.is_empty() {
                factors.push(magnitude.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.name(i)),
                    _ => factors.push(format!("{}^{}", self.name(i), x)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.expr;
        if e.denom.is_one() {
            return self.write_poly(f, &e.numer);
        }
        let wrap_n = e.numer.len() > 1;
        let wrap_d = e.denom.len() > 1 || !e.denom.is_constant();
        if wrap_n {
            write!(f, "(")?;
        }
        self.write_poly(f, &e.numer)?;
        if wrap_n {
            write!(f, ")")?;
        }
        write!(f, "/")?;
        if wrap_d {
            write!(f, "(")?;
        }
        self.write_poly(f, &e.denom)?;
        if wrap_d {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ExprDisplay { expr: self, vars: None }.fmt(f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// `y_{i+1}^k` as an [`Exponents`] vector; handy when assembling monomials.
pub fn monomial_exponents(pairs: &[(usize, u16)]) -> Exponents {
    let span = pairs.iter().map(|p| p.0 + 1).max().unwrap_or(0);
    let mut e: Exponents = smallvec::SmallVec::from_elem(0, span);
    for &(i, k) in pairs {
        e[i] += k;
    }
    e
}

impl Expr {
    /// Lossy conversion of a constant expression to `f64`.
    pub fn to_f64(&self) -> Option<f64> {
        let r = self.as_rational()?;
        Some(crate::scalar::rational_to_float(&r))
    }

    /// Integer value if this is an integer constant that fits `i64`.
    pub fn as_i64(&self) -> Option<i64> {
        let r = self.as_rational()?;
        if r.is_integer() {
            r.numer().to_i64()
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: usize) -> Expr {
        Expr::var(i)
    }

    fn k(v: i64) -> Expr {
        Expr::integer(v)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cancellation_yields_canonical_form() {
        let e = &(&(&y(0) * &y(0)) - &k(1)) / &(&y(0) - &k(1));
        assert_eq!(e, &y(0) + &k(1));
        assert!(e.is_polynomial());
    }

    #[test]
    fn rational_constants_normalize() {
        let a = &k(2) / &k(-4);
        assert_eq!(a.as_rational(), Some(q(-1, 2)));
        assert!(!a.denom().leading_sign_negative());
    }

    #[test]
    fn quotient_rule() {
        let e = &y(0) / &y(1);
        let expected = -&(&y(0) / &(&y(1) * &y(1)));
        assert_eq!(e.diff(1), expected);
        assert!(e.diff(2).is_zero());
    }

    #[test]
    fn eval_and_pole() {
        let e = &(&y(0) + &y(1)) / &k(2);
        assert_eq!(e.eval(&[q(1, 1), q(3, 1)]).unwrap(), q(2, 1));
        let inv = k(1).checked_div(&y(0)).unwrap();
        assert_eq!(inv.eval(&[q(0, 1), q(1, 1)]), Err(Error::Pole));
        let e = &y(0) * &(&y(1) * &y(1));
        assert_eq!(e.eval(&[q(2, 1), q(3, 1)]).unwrap(), q(18, 1));
    }

    #[test]
    fn substitution_composes() {
        // (y1 / y2) with y1 -> y1 + y2, y2 -> y2^2
        let e = &y(0) / &y(1);
        let s = e
            .substitute(&[&y(0) + &y(1), &y(1) * &y(1)])
            .unwrap();
        let expected = &(&y(0) + &y(1)) / &(&y(1) * &y(1));
        assert_eq!(s, expected);
    }

    #[test]
    fn powi_handles_negative_exponents() {
        let e = (&y(0) + &k(1)).powi(-2).unwrap();
        assert_eq!(e.recip().unwrap(), &(&y(0) + &k(1)) * &(&y(0) + &k(1)));
        assert!(k(0).powi(-1).is_none());
    }
}
