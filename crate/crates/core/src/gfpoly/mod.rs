//! Polynomials over a prime field `F_p`.
//!
//! Coefficients are stored lowest degree first with no trailing zeros, so the
//! zero polynomial is the empty vector. Mixing polynomials from different
//! fields in an operator is a programming error and panics; the fallible
//! entry points report [`Error::FieldMismatch`] instead.

pub(crate) mod factor;
mod text;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{Pow, Zero};

use crate::arith::is_probable_prime;
use crate::error::{Error, Result};

pub use factor::{factorize_poly, mobius_poly, monic_divisors, phi_poly, FactoredPolynomial};

/// The field `F_p`, `p` prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || !is_probable_prime(&BigInt::from(p)) {
            return Err(Error::NotPrime(p));
        }
        if p > u32::MAX as u64 {
            return Err(Error::UnsupportedShape(format!("field size {p} exceeds 2^32")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn reduce(self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_big(self, c: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = ((c % &p) + &p) % &p;
        u64::try_from(r).expect("residue below p")
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn neg(self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element.
    pub fn inv(self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in GF({})", self.p);
        self.pow(a, self.p - 2)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GfPoly {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl GfPoly {
    pub fn new(field: PrimeField, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % field.p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        GfPoly { field, coeffs }
    }

    /// Coefficients lowest degree first, reduced into `[0, p)`.
    pub fn from_i64(field: PrimeField, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.reduce(c)).collect())
    }

    pub fn zero(field: PrimeField) -> Self {
        GfPoly { field, coeffs: Vec::new() }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: PrimeField, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    /// The indeterminate `t`.
    pub fn t(field: PrimeField) -> Self {
        Self::monomial(field, 1, 1)
    }

    pub fn monomial(field: PrimeField, c: u64, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        Self::new(field, coeffs)
    }

    /// The residue with base-`p` digits of `index` as coefficients, lowest
    /// first; `index < p^len` enumerates every polynomial of degree `< len`.
    pub fn from_index(field: PrimeField, mut index: u64, len: usize) -> Self {
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            coeffs.push(index % field.p);
            index /= field.p;
        }
        Self::new(field, coeffs)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// `(monic associate, leading coefficient)`; zero maps to itself with 0.
    pub fn monic(&self) -> (GfPoly, u64) {
        let lead = self.leading();
        if lead == 0 || lead == 1 {
            return (self.clone(), lead);
        }
        (self.scale(self.field.inv(lead)), lead)
    }

    pub fn to_monic(&self) -> GfPoly {
        self.monic().0
    }

    pub fn scale(&self, c: u64) -> GfPoly {
        let f = self.field;
        Self::new(f, self.coeffs.iter().map(|&a| f.mul(a, c % f.p)).collect())
    }

    /// `|H| = p^deg H`; the zero polynomial has norm 0.
    pub fn norm(&self) -> BigInt {
        match self.degree() {
            None => BigInt::zero(),
            Some(d) => Pow::pow(BigInt::from(self.field.p), d),
        }
    }

    pub fn derivative(&self) -> GfPoly {
        let f = self.field;
        Self::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, i as u64 % f.p))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    fn check_field(&self, other: &GfPoly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.p, other.field.p))
        }
    }

    /// `self = q * b + r` with `deg r < deg b`.
    pub fn divmod(&self, b: &GfPoly) -> Result<(GfPoly, GfPoly)> {
        self.check_field(b)?;
        if b.is_zero() {
            return Err(Error::ZeroPolynomial("divisor"));
        }
        let f = self.field;
        let db = b.coeffs.len() - 1;
        if self.coeffs.len() <= db {
            return Ok((GfPoly::zero(f), self.clone()));
        }
        let inv = f.inv(b.leading());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len() - db];
        for i in (0..quot.len()).rev() {
            let c = f.mul(rem[i + db], inv);
            if c == 0 {
                continue;
            }
            quot[i] = c;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                rem[i + j] = f.sub(rem[i + j], f.mul(c, bj));
            }
        }
        rem.truncate(db);
        Ok((GfPoly::new(f, quot), GfPoly::new(f, rem)))
    }

    pub fn rem(&self, b: &GfPoly) -> Result<GfPoly> {
        Ok(self.divmod(b)?.1)
    }

    /// Exact quotient, `None` when `b` does not divide `self`.
    pub fn exact_div(&self, b: &GfPoly) -> Option<GfPoly> {
        let (q, r) = self.divmod(b).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &GfPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &GfPoly) -> Result<GfPoly> {
        let mut acc = GfPoly::one(self.field).rem(m)?;
        let base = self.rem(m)?;
        for i in (0..e.bits()).rev() {
            acc = (&acc * &acc).rem(m)?;
            if e.bit(i) {
                acc = (&acc * &base).rem(m)?;
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> GfPoly {
        let mut acc = GfPoly::one(self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Monic gcd; errors when both inputs are zero.
    pub fn gcd(&self, other: &GfPoly) -> Result<GfPoly> {
        self.check_field(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroPolynomial("gcd(0, 0)"));
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.to_monic())
    }

    /// `(g, x, y)` with `g = x * self + y * other` monic.
    pub fn ext_gcd(&self, other: &GfPoly) -> Result<(GfPoly, GfPoly, GfPoly)> {
        self.check_field(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroPolynomial("gcd(0, 0)"));
        }
        let f = self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (GfPoly::one(f), GfPoly::zero(f));
        let (mut t0, mut t1) = (GfPoly::zero(f), GfPoly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1)?;
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = f.inv(r0.leading());
        Ok((r0.scale(inv), s0.scale(inv), t0.scale(inv)))
    }

    /// Monic lcm of nonzero polynomials.
    pub fn lcm(&self, other: &GfPoly) -> Result<GfPoly> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroPolynomial("lcm argument"));
        }
        let g = self.gcd(other)?;
        Ok((&self.exact_div(&g).expect("gcd divides") * other).to_monic())
    }
}

/// Monic gcd of a nonempty list, not all zero.
pub fn poly_gcd_all(values: &[GfPoly]) -> Result<GfPoly> {
    let (first, rest) = values.split_first().ok_or(Error::Empty("gcd argument list"))?;
    let mut acc = first.clone();
    for v in rest {
        acc = if acc.is_zero() { v.to_monic() } else { acc.gcd(v)? };
    }
    if acc.is_zero() {
        return Err(Error::ZeroPolynomial("gcd(0, 0)"));
    }
    Ok(acc.to_monic())
}

pub fn poly_divmod(a: &GfPoly, b: &GfPoly) -> Result<(GfPoly, GfPoly)> {
    a.divmod(b)
}

pub fn poly_gcd(a: &GfPoly, b: &GfPoly) -> Result<GfPoly> {
    a.gcd(b)
}

/// Degree first, then the coefficient sequence lowest degree first.
impl Ord for GfPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .p
            .cmp(&other.field.p)
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for GfPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn same_field(a: &GfPoly, b: &GfPoly) -> PrimeField {
    assert_eq!(a.field, b.field, "polynomials over different fields");
    a.field
}

impl Add for &GfPoly {
    type Output = GfPoly;

    fn add(self, rhs: &GfPoly) -> GfPoly {
        let f = same_field(self, rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        GfPoly::new(f, (0..len).map(|i| f.add(self.coeff(i), rhs.coeff(i))).collect())
    }
}

impl Sub for &GfPoly {
    type Output = GfPoly;

    fn sub(self, rhs: &GfPoly) -> GfPoly {
        let f = same_field(self, rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        GfPoly::new(f, (0..len).map(|i| f.sub(self.coeff(i), rhs.coeff(i))).collect())
    }
}

impl Mul for &GfPoly {
    type Output = GfPoly;

    fn mul(self, rhs: &GfPoly) -> GfPoly {
        let f = same_field(self, rhs);
        if self.is_zero() || rhs.is_zero() {
            return GfPoly::zero(f);
        }
        let mut out = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % f.p;
            }
        }
        GfPoly::new(f, out)
    }
}

impl Neg for &GfPoly {
    type Output = GfPoly;

    fn neg(self) -> GfPoly {
        let f = self.field;
        GfPoly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for GfPoly {
            type Output = GfPoly;

            fn $method(self, rhs: GfPoly) -> GfPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for GfPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.field)
    }
}

/// `|H|` as used in counting formulas.
pub fn norm(h: &GfPoly) -> BigInt {
    h.norm()
}

/// `p^k` as a big integer.
pub(crate) fn field_power(field: PrimeField, k: usize) -> BigInt {
    Pow::pow(BigInt::from(field.p), k)
}
