//! Sparse multivariate polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Terms are kept sorted by descending graded-lexicographic order of their
//! exponent vectors. Exponent vectors carry no trailing zeros, so a
//! polynomial does not need to know how many variables exist: `y3` is the
//! vector `[0, 0, 1]` and the constant monomial is the empty vector.

use std::cmp::Ordering;
use std::collections::btree_map::{BTreeMap, Entry};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

pub type Exponents = SmallVec<[u16; 6]>;

pub(crate) fn total_degree(e: &[u16]) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

/// Graded-lexicographic comparison; `y1 > y2 > ...` within a degree.
pub(crate) fn grlex(a: &[u16], b: &[u16]) -> Ordering {
    total_degree(a).cmp(&total_degree(b)).then_with(|| {
        let len = a.len().max(b.len());
        for i in 0..len {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            match x.cmp(&y) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    })
}

#[derive(PartialEq, Eq)]
struct GrlexKey(Exponents);

impl PartialOrd for GrlexKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GrlexKey {
    fn cmp(&self, other: &Self) -> Ordering {
        grlex(&self.0, &other.0)
    }
}

fn trim(e: &mut Exponents) {
    while e.last() == Some(&0) {
        e.pop();
    }
}

fn mul_exponents(a: &[u16], b: &[u16]) -> Exponents {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out: Exponents = long.into();
    for (slot, &x) in out.iter_mut().zip(short) {
        *slot += x;
    }
    out
}

/// `a / b` on monomials when `b` divides `a`.
fn div_exponents(a: &[u16], b: &[u16]) -> Option<Exponents> {
    if b.len() > a.len() {
        return None;
    }
    let mut out: Exponents = a.into();
    for (slot, &y) in out.iter_mut().zip(b) {
        if *slot < y {
            return None;
        }
        *slot -= y;
    }
    trim(&mut out);
    Some(out)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: Vec<(Exponents, BigInt)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly {
                terms: vec![(Exponents::new(), c)],
            }
        }
    }

    /// The monomial `y_{index+1}`.
    pub fn var(index: usize) -> Self {
        Self::monomial(
            {
                let mut e: Exponents = SmallVec::from_elem(0, index + 1);
                e[index] = 1;
                e
            },
            BigInt::one(),
        )
    }

    pub fn monomial(mut exponents: Exponents, c: BigInt) -> Self {
        trim(&mut exponents);
        if c.is_zero() {
            Self::zero()
        } else {
            Poly {
                terms: vec![(exponents, c)],
            }
        }
    }

    /// Builds a polynomial from arbitrary (unsorted, possibly repeated) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, BigInt)>) -> Self {
        let mut terms: Vec<_> = terms
            .into_iter()
            .map(|(mut e, c)| {
                trim(&mut e);
                (e, c)
            })
            .collect();
        terms.sort_unstable_by(|a, b| grlex(&b.0, &a.0));
        Poly {
            terms: merge_sorted(terms),
        }
    }

    pub fn terms(&self) -> &[(Exponents, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_empty())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_empty() && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(e, c)] if e.is_empty() => Some(c.clone()),
            _ => None,
        }
    }

    /// Leading coefficient in graded-lexicographic order (zero for the zero polynomial).
    pub fn leading_coeff(&self) -> BigInt {
        self.terms
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_else(BigInt::zero)
    }

    pub fn leading_sign_negative(&self) -> bool {
        self.terms.first().is_some_and(|t| t.1.is_negative())
    }

    /// Number of variable slots any term uses.
    pub fn var_span(&self) -> usize {
        self.terms.iter().map(|t| t.0.len()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| total_degree(&t.0))
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .iter()
            .map(|t| t.0.get(var).copied().unwrap_or(0) as u32)
            .max()
            .unwrap_or(0)
    }

    /// Positive integer content (gcd of coefficients); zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    /// Exact division of every coefficient by `k`.
    pub fn div_integer(&self, k: &BigInt) -> Self {
        if k.is_one() {
            return self.clone();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    debug_assert!((c % k).is_zero());
                    (e.clone(), c / k)
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.combine(other, true)
    }

    fn combine(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match grlex(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    fn mul_term(&self, e: &[u16], c: &BigInt) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(f, d)| (mul_exponents(f, e), d * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.terms.len() == 1 {
            let (e, c) = &small.terms[0];
            return large.mul_term(e, c);
        }
        let mut products = Vec::with_capacity(small.terms.len() * large.terms.len());
        for (e, c) in &small.terms {
            for (f, d) in &large.terms {
                products.push((mul_exponents(e, f), c * d));
            }
        }
        products.sort_unstable_by(|a, b| grlex(&b.0, &a.0));
        Poly {
            terms: merge_sorted(products),
        }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = divisor.as_constant() {
            if self.terms.iter().all(|t| (&t.1 % &c).is_zero()) {
                return Some(Poly {
                    terms: self.terms.iter().map(|(e, d)| (e.clone(), d / &c)).collect(),
                });
            }
            return None;
        }
        if self == divisor {
            return Some(Poly::one());
        }
        if self.total_degree() < divisor.total_degree() {
            return None;
        }
        for v in 0..divisor.var_span() {
            if divisor.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let (lead_e, lead_c) = &divisor.terms[0];
        let tail = &divisor.terms[1..];
        let mut quotient = Vec::new();
        let mut rem: BTreeMap<GrlexKey, BigInt> = self
            .terms
            .iter()
            .map(|(e, c)| (GrlexKey(e.clone()), c.clone()))
            .collect();
        while let Some((GrlexKey(e), c)) = rem.pop_last() {
            let qe = div_exponents(&e, lead_e)?;
            let (qc, r) = c.div_rem(lead_c);
            if !r.is_zero() {
                return None;
            }
            for (f, d) in tail {
                let key = GrlexKey(mul_exponents(f, &qe));
                let prod = d * &qc;
                match rem.entry(key) {
                    Entry::Occupied(mut slot) => {
                        *slot.get_mut() -= prod;
                        if slot.get().is_zero() {
                            slot.remove();
                        }
                    }
                    Entry::Vacant(slot) => {
                        slot.insert(-prod);
                    }
                }
            }
            quotient.push((qe, qc));
        }
        // Quotient terms are produced in descending order.
        Some(Poly { terms: quotient })
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, c)| {
                let k = e.get(var).copied().unwrap_or(0);
                if k == 0 {
                    return None;
                }
                let mut f = e.clone();
                f[var] -= 1;
                trim(&mut f);
                Some((f, c * BigInt::from(k)))
            })
            .collect::<Vec<_>>();
        // Differentiation can reorder terms of different degrees only uniformly,
        // but ties between distinct monomials may change; re-sort to be safe.
        Poly::from_terms(terms)
    }

    /// Coefficients with respect to `var`, lowest power first. Each
    /// coefficient is free of `var`.
    pub fn to_univariate(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Exponents, BigInt)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let k = e.get(var).copied().unwrap_or(0) as usize;
            let mut f = e.clone();
            if k > 0 {
                f[var] = 0;
                trim(&mut f);
            }
            buckets[k].push((f, c.clone()));
        }
        buckets
            .into_iter()
            .map(|terms| {
                // Removing one variable's exponent keeps relative grlex order
                // among terms sharing that exponent only up to degree shifts,
                // so re-sort.
                let mut terms = terms;
                terms.sort_unstable_by(|a, b| grlex(&b.0, &a.0));
                Poly { terms }
            })
            .collect()
    }

    pub fn from_univariate(coeffs: &[Poly], var: usize) -> Poly {
        let mut terms = Vec::new();
        for (k, p) in coeffs.iter().enumerate() {
            for (e, c) in &p.terms {
                let mut f = e.clone();
                if k > 0 {
                    if f.len() <= var {
                        f.resize(var + 1, 0);
                    }
                    f[var] += k as u16;
                }
                terms.push((f, c.clone()));
            }
        }
        Poly::from_terms(terms)
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = BigRational::from_integer(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term *= num_traits::pow(point[i].clone(), k as usize);
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = c.to_f64().unwrap_or(f64::NAN);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term *= point[i].powi(k as i32);
                }
            }
            acc += term;
        }
        acc
    }

    /// Univariate image modulo `p`: every variable except `var` is replaced
    /// by its residue in `point`. Lowest power first.
    pub(crate) fn image_mod(&self, var: usize, point: &[u64], p: u64) -> Vec<u64> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![0u64; deg + 1];
        for (e, c) in &self.terms {
            let mut term = mod_bigint(c, p);
            let mut k = 0usize;
            for (i, &x) in e.iter().enumerate() {
                if i == var {
                    k = x as usize;
                } else if x > 0 {
                    term = mul_mod(term, pow_mod(point[i], x as u64, p), p);
                }
            }
            out[k] = (out[k] + term) % p;
        }
        out
    }
}

fn merge_sorted(sorted: Vec<(Exponents, BigInt)>) -> Vec<(Exponents, BigInt)> {
    let mut out: Vec<(Exponents, BigInt)> = Vec::with_capacity(sorted.len());
    for (e, c) in sorted {
        match out.last_mut() {
            Some(last) if last.0 == e => last.1 += c,
            _ => {
                if let Some(last) = out.last() {
                    if last.1.is_zero() {
                        out.pop();
                    }
                }
                out.push((e, c));
            }
        }
    }
    if out.last().is_some_and(|t| t.1.is_zero()) {
        out.pop();
    }
    out
}

pub(crate) fn mod_bigint(c: &BigInt, p: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}
