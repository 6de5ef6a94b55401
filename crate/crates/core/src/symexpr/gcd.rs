//! Multivariate polynomial GCD over the integers.
//!
//! The general case is a recursive subresultant PRS in one main variable
//! with coefficients in the remaining variables. Before falling into it,
//! univariate images modulo a word-sized prime give upper bounds on the
//! degree of the GCD in every variable. Most GCDs arising from rational
//! function arithmetic are trivial, and those bounds prove it cheaply.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::poly::{mul_mod, pow_mod, Poly};

/// Largest prime below 2^62.
const PRIME: u64 = 4_611_686_018_427_387_847;

/// Fixed evaluation residues; results never depend on them, only speed does.
const PROBES: [u64; 16] = [
    0x2545_F491_4F6C_DD1D,
    0x9E37_79B9_7F4A_7C15,
    0x1656_67B1_9E37_79F9,
    0x27D4_EB2F_1656_67C5,
    0x85EB_CA77_C2B2_AE63,
    0xC2B2_AE3D_27D4_EB4F,
    0x94D0_49BB_1331_11EB,
    0xBF58_476D_1CE4_E5B9,
    0x369D_EA0F_31A5_3F85,
    0xDB4F_0B91_75AE_2165,
    0x6A09_E667_F3BC_C909,
    0xBB67_AE85_84CA_A73B,
    0x3C6E_F372_FE94_F82B,
    0xA54F_F53A_5F1D_36F1,
    0x510E_527F_ADE6_82D1,
    0x9B05_688C_2B3E_6C1F,
];

/// Greatest common divisor with positive leading coefficient.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    normalize_sign(gcd_inner(a, b))
}

fn normalize_sign(p: Poly) -> Poly {
    if p.leading_sign_negative() {
        p.neg()
    } else {
        p
    }
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    if a == b {
        return a.clone();
    }
    if a.len() == 1 || b.len() == 1 {
        return monomial_gcd(a, b);
    }

    // A variable present in only one operand cannot occur in the gcd.
    let span = a.var_span().max(b.var_span());
    for v in 0..span {
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da > 0 && db == 0 {
            return gcd_inner(&content_in(a, v), b);
        }
        if db > 0 && da == 0 {
            return gcd_inner(a, &content_in(b, v));
        }
    }

    let ca = a.content();
    let cb = b.content();
    let c = ca.gcd(&cb);
    let a = a.div_integer(&ca);
    let b = b.div_integer(&cb);

    let bounds = degree_bounds(&a, &b, span);
    let present: Vec<usize> = (0..span).filter(|&v| a.degree_in(v) > 0).collect();
    if bounds.iter().all(|&d| d == 0) {
        return Poly::constant(c);
    }

    // Cheap attempt: one divides the other.
    let (small, large) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    let small_fits = present.iter().all(|&v| small.degree_in(v) <= bounds[v]);
    if small_fits && large.div_exact(small).is_some() {
        return small.scale(&c);
    }

    if let Some(&v) = present.iter().find(|&&v| bounds[v] == 0) {
        let g = gcd_inner(&content_in(&a, v), &content_in(&b, v));
        return g.scale(&c);
    }

    let main = present
        .iter()
        .copied()
        .min_by_key(|&v| (a.degree_in(v).min(b.degree_in(v)), v))
        .expect("nonconstant operands");
    prs_gcd(&a, &b, main).scale(&c)
}

/// gcd when at least one operand is a single term.
fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mono, other) = if a.len() == 1 { (a, b) } else { (b, a) };
    let (me, mc) = &mono.terms()[0];
    let mut exps = me.clone();
    for (e, _) in other.terms() {
        for (i, slot) in exps.iter_mut().enumerate() {
            *slot = (*slot).min(e.get(i).copied().unwrap_or(0));
        }
    }
    Poly::monomial(exps, mc.gcd(&other.content()))
}

/// gcd of the coefficients of `p` viewed as a polynomial in `var`.
pub(crate) fn content_in(p: &Poly, var: usize) -> Poly {
    let mut coeffs: Vec<Poly> = p
        .to_univariate(var)
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect();
    coeffs.sort_by_key(|c| c.len());
    let mut g = Poly::zero();
    for coeff in &coeffs {
        g = gcd_inner(&g, coeff);
        if g.is_constant() {
            return Poly::constant(p.content());
        }
    }
    normalize_sign(g)
}

/// Upper bounds on the degree of gcd(a, b) in each variable, from univariate
/// images modulo a prime. An image whose degree drops is discarded and the
/// trivial bound `min(deg a, deg b)` is kept.
fn degree_bounds(a: &Poly, b: &Poly, span: usize) -> Vec<u32> {
    let mut bounds = Vec::with_capacity(span);
    for v in 0..span {
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        let mut bound = da.min(db);
        for attempt in 0..3 {
            let point: Vec<u64> = (0..span)
                .map(|i| PROBES[(i * 3 + v * 5 + attempt * 7) % PROBES.len()] % PRIME)
                .collect();
            let ia = trim_mod(a.image_mod(v, &point, PRIME));
            let ib = trim_mod(b.image_mod(v, &point, PRIME));
            if ia.len() as u32 != da + 1 || ib.len() as u32 != db + 1 {
                continue;
            }
            let g = gcd_mod(ia, ib, PRIME);
            bound = bound.min(g.len() as u32 - 1);
            break;
        }
        bounds.push(bound);
    }
    bounds
}

fn trim_mod(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Monic gcd of two dense univariate polynomials over Z/p.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = inv_mod(*b.last().unwrap(), p);
        while a.len() >= b.len() && !a.is_empty() {
            let factor = mul_mod(*a.last().unwrap(), inv, p);
            let shift = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                let sub = mul_mod(factor, bc, p);
                a[shift + i] = (a[shift + i] + p - sub) % p;
            }
            a = trim_mod(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead, p);
        for c in a.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    a
}

fn lc(u: &[Poly]) -> &Poly {
    u.last().expect("nonzero univariate")
}

fn uni_trim(mut u: Vec<Poly>) -> Vec<Poly> {
    while u.last().is_some_and(|c| c.is_zero()) {
        u.pop();
    }
    u
}

/// Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = lc(b).clone();
    let mut r = a.to_vec();
    let mut steps = 0usize;
    let total = a.len() - b.len() + 1;
    while r.len() > db && !r.is_empty() {
        let lr = lc(&r).clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c = c.mul(&lb);
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = r[shift + i].sub(&bc.mul(&lr));
        }
        r = uni_trim(r);
        steps += 1;
    }
    if steps < total {
        let k = lb.pow((total - steps) as u32);
        for c in r.iter_mut() {
            *c = c.mul(&k);
        }
    }
    r
}

fn uni_content(u: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    let mut sorted: Vec<&Poly> = u.iter().filter(|c| !c.is_zero()).collect();
    sorted.sort_by_key(|c| c.len());
    for c in &sorted {
        g = gcd_inner(&g, c);
        if g.is_constant() {
            let k = sorted.iter().fold(BigInt::zero(), |acc, c| acc.gcd(&c.content()));
            return Poly::constant(k);
        }
    }
    normalize_sign(g)
}

fn uni_div(u: &[Poly], d: &Poly) -> Vec<Poly> {
    if d.is_one() {
        return u.to_vec();
    }
    u.iter()
        .map(|c| c.div_exact(d).expect("exact division in PRS"))
        .collect()
}

/// gcd of `a` and `b` (integer-primitive) via the subresultant PRS in `var`.
fn prs_gcd(a: &Poly, b: &Poly, var: usize) -> Poly {
    let mut ua = a.to_univariate(var);
    let mut ub = b.to_univariate(var);
    let ca = uni_content(&ua);
    let cb = uni_content(&ub);
    let content = gcd_inner(&ca, &cb);
    ua = uni_div(&ua, &ca);
    ub = uni_div(&ub, &cb);
    if ua.len() < ub.len() {
        std::mem::swap(&mut ua, &mut ub);
    }

    let mut g = Poly::one();
    let mut h = Poly::one();
    let result = loop {
        let delta = (ua.len() - ub.len()) as u32;
        let r = prem(&ua, &ub);
        if r.is_empty() {
            break ub;
        }
        if r.len() == 1 {
            break vec![Poly::one()];
        }
        ua = ub;
        let divisor = g.mul(&h.pow(delta));
        ub = uni_div(&r, &divisor);
        g = lc(&ua).clone();
        h = if delta == 0 {
            h
        } else {
            let num = g.pow(delta);
            num.div_exact(&h.pow(delta - 1)).expect("exact subresultant step")
        };
    };
    let pc = uni_content(&result);
    let primitive = uni_div(&result, &pc);
    let g = Poly::from_univariate(&primitive, var);
    normalize_sign(g.mul(&content))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: usize) -> Poly {
        Poly::var(i)
    }

    fn c(k: i64) -> Poly {
        Poly::constant(BigInt::from(k))
    }

    #[test]
    fn recovers_planted_common_factor() {
        let g = y(0).mul(&y(1)).add(&c(3)).sub(&y(2).pow(2));
        let a = g.mul(&y(0).add(&y(1)).pow(2).add(&c(1)));
        let b = g.mul(&y(2).sub(&y(0).mul(&c(4))));
        assert_eq!(gcd(&a, &b), g);
    }

    #[test]
    fn coprime_inputs_give_integer_gcd() {
        let a = y(0).mul(&c(6)).add(&c(4));
        let b = y(1).mul(&c(10)).add(&c(2));
        assert_eq!(gcd(&a, &b), c(2));
    }

    #[test]
    fn monomial_cases() {
        let a = y(0).pow(3).mul(&y(1)).scale(&BigInt::from(4));
        let b = y(0).pow(2).add(&y(0).pow(5).mul(&y(1)));
        assert_eq!(gcd(&a, &b), y(0).pow(2));
    }

    #[test]
    fn sign_is_normalized() {
        let a = y(0).sub(&c(1)).neg().mul(&y(1));
        let b = y(0).sub(&c(1)).mul(&c(-3));
        assert_eq!(gcd(&a, &b), y(0).sub(&c(1)));
    }

    #[test]
    fn univariate_high_degree() {
        let f = y(0).pow(5).sub(&y(0).mul(&c(3))).add(&c(1));
        let a = f.mul(&y(0).pow(4).add(&c(7)));
        let b = f.mul(&y(0).pow(3).sub(&c(2))).mul(&f);
        assert_eq!(gcd(&a, &b), f);
    }

    #[test]
    fn modular_gcd_basic() {
        // (x-1)(x-2) and (x-1)(x+5) over Z/p share x-1.
        let p = PRIME;
        let a = vec![2, p - 3, 1];
        let b = vec![p - 5, 4, 1];
        assert_eq!(gcd_mod(a, b, p), vec![p - 1, 1]);
    }
}
