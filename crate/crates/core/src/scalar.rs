//! Scalar abstractions shared by the matrix and polynomial algebra.
//!
//! The algebra in [`crate::polyalg`] and the Λ construction in
//! [`crate::geometry`] only need ring or field operations, so they are
//! written once over these traits and instantiated with exact rationals,
//! symbolic [`crate::Expr`] values, or machine floats.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative ring with exact (possibly partial) division.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_i64(value: i64) -> Self;

    /// Quotient `self / divisor` when it exists in the ring.
    fn div_exact(&self, divisor: &Self) -> Option<Self>;

    /// Cost of using this entry as an elimination pivot; `None` for zero.
    /// Smaller is better.
    fn pivot_cost(&self) -> Option<f64> {
        if self.is_zero() {
            None
        } else {
            Some(0.0)
        }
    }
}

/// A field: every nonzero element is invertible.
pub trait Field: Ring {
    fn recip(&self) -> Option<Self>;

    /// Inverse of a square matrix. Gauss-Jordan elimination unless the
    /// type has something better.
    fn invert(m: &crate::polyalg::Matrix<Self>) -> crate::Result<crate::polyalg::Matrix<Self>> {
        m.gauss_jordan_inverse()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_i64(numer)
            .div_exact(&Self::from_i64(denom))
            .expect("nonzero denominator")
    }
}

pub type Rational = BigRational;

impl Ring for BigRational {
    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn div_exact(&self, divisor: &Self) -> Option<Self> {
        (!divisor.is_zero()).then(|| self / divisor)
    }

    fn pivot_cost(&self) -> Option<f64> {
        (!self.is_zero()).then(|| (self.numer().bits() + self.denom().bits()) as f64)
    }
}

impl Field for BigRational {
    fn recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| BigRational::recip(self))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(numer.into(), denom.into())
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Ring for $t {
            fn from_i64(value: i64) -> Self {
                value as $t
            }

            fn div_exact(&self, divisor: &Self) -> Option<Self> {
                (*divisor != 0.0).then(|| self / divisor)
            }

            fn pivot_cost(&self) -> Option<f64> {
                (*self != 0.0).then(|| -(self.abs() as f64))
            }
        }

        impl Field for $t {
            fn recip(&self) -> Option<Self> {
                (*self != 0.0).then(|| 1.0 / self)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Lossy conversion of an exact rational to a float type.
pub fn rational_to_float<F: num_traits::Float>(value: &BigRational) -> F {
    let numer = value.numer();
    let denom = value.denom();
    match (numer.to_f64(), denom.to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => F::from(n / d).unwrap(),
        _ => {
            // Rescale huge operands before dividing.
            let shift = numer.bits().max(denom.bits()).saturating_sub(900);
            let n = (numer.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let d = (denom >> shift).to_f64().unwrap_or(f64::INFINITY);
            let v = if d == 0.0 { f64::INFINITY } else { n / d };
            F::from(if numer.is_negative() { -v } else { v }).unwrap()
        }
    }
}

/// Parses `p`, `p/q` or a decimal literal such as `-0.125` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_part: BigInt = match int.trim() {
            "" | "-" | "+" => BigInt::zero(),
            s => s.parse().ok()?,
        };
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().ok()?
        };
        let magnitude = int_part.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(BigRational::new(numer, scale));
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}
