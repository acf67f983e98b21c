//! Dense univariate polynomials over ℚ, constant term first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{lcm_denominators, Rational};

pub type Poly = Vec<Rational>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

#[cfg(test)]
pub fn add(a: &[Rational], b: &[Rational]) -> Poly {
    let n = a.len().max(b.len());
    let zero = Rational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Poly {
    let n = a.len().max(b.len());
    let zero = Rational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

pub fn mul(a: &[Rational], b: &[Rational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(a: &[Rational], b: &[Rational]) -> (Poly, Poly) {
    let db = degree(b).expect("division by zero polynomial");
    let lead = &b[db];
    let mut r = trim(a.to_vec());
    let mut q = vec![Rational::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let coef = &r[dr] / lead;
        let shift = dr - db;
        for (k, bk) in b.iter().enumerate().take(db + 1) {
            let t = &coef * bk;
            r[shift + k] -= t;
        }
        q[shift] = coef;
        r = trim(r);
    }
    (trim(q), r)
}

pub fn derivative(p: &[Rational]) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

pub fn monic(p: &[Rational]) -> Poly {
    let p = trim(p.to_vec());
    match p.last() {
        Some(lead) => {
            let lead = lead.clone();
            p.iter().map(|c| c / &lead).collect()
        }
        None => p,
    }
}

/// Monic gcd.
pub fn gcd(a: &[Rational], b: &[Rational]) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while degree(&y).is_some() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

/// Returns `(g, s)` with `s·a ≡ g (mod m)` and `g` the monic gcd of `a` and `m`.
pub fn ext_gcd_inverse_part(a: &[Rational], m: &[Rational]) -> (Poly, Poly) {
    let (mut r0, mut r1) = (trim(m.to_vec()), trim(a.to_vec()));
    let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![Rational::one()]);
    while degree(&r1).is_some() {
        let (q, r) = divrem(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    let lead = r0.last().cloned().unwrap_or_else(Rational::one);
    (
        r0.iter().map(|c| c / &lead).collect(),
        s0.iter().map(|c| c / &lead).collect(),
    )
}

pub fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}

pub fn eval_f64(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm sequence of a squarefree polynomial.
pub fn sturm_sequence(p: &[Rational]) -> Vec<Poly> {
    let mut seq = vec![trim(p.to_vec()), derivative(p)];
    loop {
        let n = seq.len();
        if degree(&seq[n - 1]).is_none() {
            seq.pop();
            break;
        }
        let (_, r) = divrem(&seq[n - 2], &seq[n - 1]);
        if degree(&r).is_none() {
            break;
        }
        seq.push(r.iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &Rational) -> usize {
    let signs: Vec<i32> = seq.iter().map(|p| sign(&eval(p, x))).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the half-open interval (lo, hi].
pub fn count_roots(p: &[Rational], lo: &Rational, hi: &Rational) -> usize {
    let seq = sturm_sequence(p);
    sign_changes(&seq, lo).saturating_sub(sign_changes(&seq, hi))
}

/// Scales a monic rational polynomial to a monic integer one by x ↦ x/D.
fn integral_monic(p: &[Rational]) -> Vec<BigInt> {
    let p = monic(p);
    let n = p.len() - 1;
    let d = lcm_denominators(p.iter());
    p.iter()
        .enumerate()
        .map(|(k, c)| (c * Rational::from_integer(num_traits::pow(d.clone(), n - k))).to_integer())
        .collect()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let r = n.sqrt();
    let mut k = BigInt::one();
    while k <= r {
        if (&n % &k).is_zero() {
            out.push(k.clone());
            let other = &n / &k;
            if other != k {
                out.push(other);
            }
        }
        k += 1;
    }
    out
}

fn has_integer_root(p: &[BigInt]) -> bool {
    if p[0].is_zero() {
        return true;
    }
    let evalz = |x: &BigInt| p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c);
    divisors(&p[0])
        .into_iter()
        .any(|d| evalz(&d).is_zero() || evalz(&-d).is_zero())
}

fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Monic integer quartic x⁴+e3x³+e2x²+e1x+e0 splits into two monic integer quadratics.
fn quartic_has_quadratic_factor(p: &[BigInt]) -> bool {
    let (e0, e1, e2, e3) = (&p[0], &p[1], &p[2], &p[3]);
    for b in divisors(e0).into_iter().flat_map(|b| [b.clone(), -b]) {
        let d = e0 / &b;
        if d != b {
            let num = e1 - &b * e3;
            let den = &d - &b;
            if !(&num % &den).is_zero() {
                continue;
            }
            let a = num / den;
            let c = e3 - &a;
            if &a * &c + &b + &d == *e2 {
                return true;
            }
        } else {
            if *e1 != &b * e3 {
                continue;
            }
            // a + c = e3, ac = e2 - 2b.
            let disc = e3 * e3 - BigInt::from(4) * (e2 - BigInt::from(2) * &b);
            if let Some(s) = is_square(&disc) {
                if (e3 + &s).is_even() {
                    return true;
                }
            }
        }
    }
    false
}

/// Irreducibility over ℚ, decided for degree ≤ 4. `None` above that.
pub fn is_irreducible_small(p: &[Rational]) -> Option<bool> {
    let n = degree(p)?;
    match n {
        0 => Some(false),
        1 => Some(true),
        2 | 3 => Some(!has_integer_root(&integral_monic(p))),
        4 => {
            let z = integral_monic(p);
            Some(!has_integer_root(&z) && !quartic_has_quadratic_factor(&z))
        }
        _ => None,
    }
}
