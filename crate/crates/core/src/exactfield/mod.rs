//! Exact arithmetic in a real number field ℚ(α).
//!
//! A field is declared by the minimal polynomial of α together with a rational
//! interval isolating the real root that fixes the embedding. Elements are
//! coefficient vectors in the power basis 1, α, …, α^(n−1), always reduced
//! modulo the minimal polynomial, so equality is coefficientwise.

mod poly;
pub mod rational;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use rational::{format_rational, parse_rational, Rational};

use poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different number fields")]
    FieldMismatch,
    #[error("minimal polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("minimal polynomial is not squarefree")]
    NotSquarefree,
    #[error("minimal polynomial is reducible over the rationals")]
    Reducible,
    #[error("root interval must satisfy lo < hi with no root at either end")]
    BadInterval,
    #[error("root interval contains {0} real roots, expected exactly one")]
    RootCount(usize),
    #[error("expected {expected} coefficients, got {got}")]
    Length { expected: usize, got: usize },
}

/// User-facing declaration of ℚ(α): minimal polynomial (constant term first)
/// and an isolating interval for the chosen real root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub minpoly: Vec<Rational>,
    pub root_interval: (Rational, Rational),
}

impl FieldSpec {
    /// The field ℚ itself, presented as ℚ(0).
    pub fn rationals() -> Self {
        FieldSpec {
            minpoly: vec![Rational::zero(), Rational::one()],
            root_interval: (rational::int(-1), rational::int(1)),
        }
    }

    /// ℚ(√n) for a positive non-square integer n, embedded with √n > 0.
    pub fn quadratic(n: i64) -> Self {
        let hi = (n as f64).sqrt().ceil() as i64 + 1;
        FieldSpec {
            minpoly: vec![rational::int(-n), Rational::zero(), Rational::one()],
            root_interval: (rational::int(0), rational::int(hi)),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpecRepr {
    minpoly: Vec<RationalText>,
    root_interval: (RationalText, RationalText),
}

/// Serde adapter for one rational in `"p/q"` form (bare JSON integers accepted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalText(pub Rational);

impl Serialize for RationalText {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => parse_rational(&s)
                .map(RationalText)
                .map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(RationalText(rational::int(i))),
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldSpecRepr {
            minpoly: self.minpoly.iter().cloned().map(RationalText).collect(),
            root_interval: (
                RationalText(self.root_interval.0.clone()),
                RationalText(self.root_interval.1.clone()),
            ),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FieldSpecRepr::deserialize(d)?;
        Ok(FieldSpec {
            minpoly: r.minpoly.into_iter().map(|q| q.0).collect(),
            root_interval: (r.root_interval.0 .0, r.root_interval.1 .0),
        })
    }
}

/// A validated number field. Shared behind an `Arc`; see [`Field`].
#[derive(Debug)]
pub struct NumberField {
    spec: FieldSpec,
    modulus: Poly,
    /// Refined isolating interval of α with the sign of the minimal polynomial at `lo`.
    lo: Rational,
    hi: Rational,
    sign_at_lo: i32,
    alpha: f64,
}

pub type Field = Arc<NumberField>;

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.lo <= other.hi && other.lo <= self.hi
    }
}

impl NumberField {
    pub fn new(spec: FieldSpec) -> Result<Field, FieldError> {
        let f = poly::trim(spec.minpoly.clone());
        let n = poly::degree(&f).ok_or(FieldError::ConstantPolynomial)?;
        if n == 0 {
            return Err(FieldError::ConstantPolynomial);
        }
        let modulus = poly::monic(&f);
        if poly::degree(&poly::gcd(&modulus, &poly::derivative(&modulus))) != Some(0) {
            return Err(FieldError::NotSquarefree);
        }
        if poly::is_irreducible_small(&modulus) == Some(false) {
            return Err(FieldError::Reducible);
        }
        let (lo, hi) = spec.root_interval.clone();
        if lo >= hi
            || poly::eval(&modulus, &lo).is_zero()
            || poly::eval(&modulus, &hi).is_zero()
        {
            return Err(FieldError::BadInterval);
        }
        let count = poly::count_roots(&modulus, &lo, &hi);
        if count != 1 {
            return Err(FieldError::RootCount(count));
        }
        let sign_at_lo = signum(&poly::eval(&modulus, &lo));
        let mut field = NumberField {
            spec,
            modulus,
            lo,
            hi,
            sign_at_lo,
            alpha: 0.0,
        };
        field.refine_to_bits(96);
        field.alpha = rational::rat_to_f64(&((&field.lo + &field.hi) / rational::int(2)));
        Ok(Arc::new(field))
    }

    pub fn rationals() -> Field {
        Self::new(FieldSpec::rationals()).expect("ℚ is a valid field")
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Floating approximation of the generator α.
    pub fn alpha_f64(&self) -> f64 {
        self.alpha
    }

    /// Bisects the stored interval until its width is below 2^-bits.
    fn refine_to_bits(&mut self, bits: u32) {
        let target = Rational::new(One::one(), num_bigint::BigInt::one() << bits as usize);
        while &self.hi - &self.lo > target {
            let (lo, hi, exact) = bisect(&self.modulus, &self.lo, &self.hi, self.sign_at_lo);
            if exact {
                self.lo = lo.clone();
                self.hi = lo;
                return;
            }
            self.lo = lo;
            self.hi = hi;
        }
    }
}

fn signum(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// One bisection step; the flag reports that the midpoint is the root.
fn bisect(f: &[Rational], lo: &Rational, hi: &Rational, sign_lo: i32) -> (Rational, Rational, bool) {
    let mid = (lo + hi) / rational::int(2);
    let s = signum(&poly::eval(f, &mid));
    if s == 0 {
        (mid.clone(), mid, true)
    } else if s == sign_lo {
        (mid, hi.clone(), false)
    } else {
        (lo.clone(), mid, false)
    }
}

/// Interval Horner evaluation of a polynomial on [lo, hi].
fn eval_interval(p: &[Rational], lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    for c in p.iter().rev() {
        let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mn = prods.iter().min().unwrap().clone();
        let mx = prods.iter().max().unwrap().clone();
        a = mn + c;
        b = mx + c;
    }
    (a, b)
}

/// Element Σ coeffs[t]·α^t of a number field.
#[derive(Clone)]
pub struct AlgebraicNumber {
    field: Field,
    coeffs: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked field arithmetic.
pub fn nf_arith(
    op: ArithOp,
    a: &AlgebraicNumber,
    b: &AlgebraicNumber,
) -> Result<AlgebraicNumber, FieldError> {
    a.same_field(b)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a * &b.inv()?,
    })
}

/// Exact sign of the real embedding.
pub fn nf_sign(a: &AlgebraicNumber) -> i32 {
    a.sign()
}

/// Splits a vector over ℚ(α) as v = Σ α^t v_t with rational v_t.
pub fn nf_coefficient_vectors(v: &[AlgebraicNumber]) -> Vec<Vec<Rational>> {
    let deg = v.first().map_or(1, |x| x.field.degree());
    (0..deg)
        .map(|t| v.iter().map(|x| x.coeffs[t].clone()).collect())
        .collect()
}

impl AlgebraicNumber {
    /// Coefficients in the power basis; shorter lists are zero-padded.
    pub fn from_coeffs(field: &Field, mut coeffs: Vec<Rational>) -> Result<Self, FieldError> {
        let n = field.degree();
        if coeffs.is_empty() || coeffs.len() > n {
            return Err(FieldError::Length {
                expected: n,
                got: coeffs.len(),
            });
        }
        coeffs.resize(n, Rational::zero());
        Ok(AlgebraicNumber {
            field: field.clone(),
            coeffs,
        })
    }

    /// Reduces an arbitrary polynomial in α.
    pub fn from_poly(field: &Field, p: &[Rational]) -> Self {
        let (_, r) = poly::divrem(p, &field.modulus);
        let mut coeffs = r;
        coeffs.resize(field.degree(), Rational::zero());
        AlgebraicNumber {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_rational(field: &Field, q: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); field.degree()];
        coeffs[0] = q;
        AlgebraicNumber {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_int(field: &Field, n: i64) -> Self {
        Self::from_rational(field, rational::int(n))
    }

    pub fn zero(field: &Field) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Field) -> Self {
        Self::from_int(field, 1)
    }

    /// The generator α.
    pub fn generator(field: &Field) -> Self {
        Self::from_poly(field, &[Rational::zero(), Rational::one()])
    }

    /// Parses the JSON coefficient form (constant term first).
    pub fn parse(field: &Field, coeffs: &[&str]) -> Result<Self, FieldError> {
        let qs = coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(field, qs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    pub fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    /// The value as a rational, if it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.coeffs[0].is_integer()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        AlgebraicNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(&self.field, self.coeffs[0].recip()));
        }
        let (g, s) = poly::ext_gcd_inverse_part(&poly::trim(self.coeffs.clone()), &self.field.modulus);
        debug_assert_eq!(poly::degree(&g), Some(0));
        Ok(Self::from_poly(&self.field, &s))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        nf_arith(ArithOp::Div, self, other)
    }

    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if self.is_rational() {
            return signum(&self.coeffs[0]);
        }
        let f = &self.field;
        let (mut lo, mut hi) = (f.lo.clone(), f.hi.clone());
        loop {
            if lo == hi {
                return signum(&poly::eval(&self.coeffs, &lo));
            }
            let (a, b) = eval_interval(&self.coeffs, &lo, &hi);
            if a.is_positive() {
                return 1;
            }
            if b.is_negative() {
                return -1;
            }
            let (l, h, exact) = bisect(&f.modulus, &lo, &hi, f.sign_at_lo);
            if exact {
                return signum(&poly::eval(&self.coeffs, &l));
            }
            lo = l;
            hi = h;
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact comparison of real embeddings.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }

    pub fn to_f64(&self) -> f64 {
        let x = self.field.alpha;
        let c: Vec<f64> = self.coeffs.iter().map(rational::rat_to_f64).collect();
        poly::eval_f64(&c, x)
    }

    /// Rational part reduced into [0, 1); irrational coefficients untouched.
    pub fn reduce_rational_part(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = rational::frac(&coeffs[0]);
        AlgebraicNumber {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.same_field(other).is_ok()
    }
}

impl Eq for AlgebraicNumber {}

impl Hash for AlgebraicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (t, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = format_rational(c);
            terms.push(match t {
                0 => c,
                1 => format!("{c}·α"),
                _ => format!("{c}·α^{t}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn check(a: &AlgebraicNumber, b: &AlgebraicNumber) {
    if !Arc::ptr_eq(&a.field, &b.field) && *a.field != *b.field {
        panic!("{}", FieldError::FieldMismatch);
    }
}

impl Add for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        check(self, rhs);
        AlgebraicNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        check(self, rhs);
        AlgebraicNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        check(self, rhs);
        if self.is_rational() {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.is_rational() {
            return self.scale(&rhs.coeffs[0]);
        }
        AlgebraicNumber::from_poly(&self.field, &poly::mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}
