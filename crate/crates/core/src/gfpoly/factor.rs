//! Factorization in `F_p[t]`: squarefree decomposition, distinct-degree
//! splitting and Cantor–Zassenhaus equal-degree splitting.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{field_power, GfPoly, PrimeField};
use crate::error::{Error, Result};
use crate::ramanujan::for_each_tuple;

const SPLIT_SEED: u64 = 0x006c_696e_636f_6e67;

/// `unit * prod factor^exponent`, factors monic irreducible and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPolynomial {
    pub unit: u64,
    pub factors: Vec<(GfPoly, u32)>,
    field: PrimeField,
}

impl FactoredPolynomial {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn product(&self) -> GfPoly {
        self.factors
            .iter()
            .fold(GfPoly::constant(self.field, self.unit), |acc, (f, e)| &acc * &f.pow(*e))
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.factors.iter().map(|(_, e)| *e).collect()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e <= 1)
    }

    /// Monic divisor with the given exponents.
    pub fn divisor_from_exponents(&self, exps: &[u32]) -> GfPoly {
        self.factors
            .iter()
            .zip(exps)
            .fold(GfPoly::one(self.field), |acc, ((f, _), e)| &acc * &f.pow(*e))
    }

    /// `|D|` for the divisor with exponents `exps`.
    pub fn norm_of_exponents(&self, exps: &[u32]) -> BigInt {
        let deg: usize = self
            .factors
            .iter()
            .zip(exps)
            .map(|((f, _), e)| f.degree().unwrap() * *e as usize)
            .sum();
        field_power(self.field, deg)
    }

    /// Exponent of each prime factor in `g`, capped at its exponent in this
    /// polynomial; the zero polynomial gets the full exponents.
    pub fn capped_valuations(&self, g: &GfPoly) -> Vec<u32> {
        self.factors
            .iter()
            .map(|(f, e)| {
                let mut v = 0;
                let mut rest = g.clone();
                while v < *e {
                    match rest.exact_div(f) {
                        Some(q) => {
                            rest = q;
                            v += 1;
                        }
                        None => break,
                    }
                }
                v
            })
            .collect()
    }

    /// Every exponent vector `0 <= f_i <= e_i`, in odometer order.
    pub fn divisor_exponents(&self) -> Vec<Vec<u32>> {
        exponent_box(&self.exponents())
    }
}

/// All vectors `0 <= f_i <= bound_i`.
pub(crate) fn exponent_box(bounds: &[u32]) -> Vec<Vec<u32>> {
    let ranges: Vec<Vec<u32>> = bounds.iter().map(|&e| (0..=e).collect()).collect();
    let refs: Vec<&[u32]> = ranges.iter().map(Vec::as_slice).collect();
    let mut out = Vec::new();
    for_each_tuple(&refs, |pick| out.push(pick.iter().map(|&&x| x).collect()));
    out
}

/// Möbius value of the monic polynomial with the given exponents.
pub(crate) fn mobius_of_exponents(exps: &[u32]) -> i32 {
    if exps.iter().any(|&e| e > 1) {
        0
    } else if exps.iter().filter(|&&e| e == 1).count() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn factorize_poly(h: &GfPoly) -> Result<FactoredPolynomial> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial("factorization input"));
    }
    let field = h.field();
    let (monic, unit) = h.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut factors: Vec<(GfPoly, u32)> = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic)? {
        for (block, degree) in distinct_degree(&part)? {
            let mut pieces = Vec::new();
            equal_degree(&block, degree, &mut rng, &mut pieces)?;
            for piece in pieces {
                factors.push((piece, mult));
            }
        }
    }
    factors.sort();
    // squarefree parts are pairwise coprime, but merge defensively
    let mut merged: Vec<(GfPoly, u32)> = Vec::with_capacity(factors.len());
    for (f, e) in factors {
        match merged.last_mut() {
            Some((g, m)) if *g == f => *m += e,
            _ => merged.push((f, e)),
        }
    }
    Ok(FactoredPolynomial {
        unit,
        factors: merged,
        field,
    })
}

fn pth_root(f: &GfPoly) -> GfPoly {
    let p = f.field().p() as usize;
    GfPoly::new(f.field(), f.coeffs().iter().step_by(p).copied().collect())
}

/// `(squarefree part, multiplicity)` pairs of a monic polynomial.
fn squarefree_decomposition(f: &GfPoly) -> Result<Vec<(GfPoly, u32)>> {
    let field = f.field();
    let p = field.p() as u32;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let df = f.derivative();
    if df.is_zero() {
        for (g, m) in squarefree_decomposition(&pth_root(f))? {
            out.push((g, m * p));
        }
        return Ok(out);
    }
    let mut c = f.gcd(&df)?;
    let mut w = f.exact_div(&c).expect("gcd divides");
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c)?;
        let z = w.exact_div(&y).expect("gcd divides");
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        c = c.exact_div(&y).expect("gcd divides");
        w = y;
    }
    if !c.is_one() {
        for (g, m) in squarefree_decomposition(&pth_root(&c))? {
            out.push((g, m * p));
        }
    }
    Ok(out)
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree, tagged with that degree.
fn distinct_degree(f: &GfPoly) -> Result<Vec<(GfPoly, usize)>> {
    let field = f.field();
    let p = BigUint::from(field.p());
    let x = GfPoly::t(field);
    let mut rest = f.clone();
    let mut h = x.rem(&rest)?;
    let mut out = Vec::new();
    let mut i = 1;
    while rest.degree().unwrap_or(0) >= 2 * i {
        h = h.pow_mod(&p, &rest)?;
        let g = (&h - &x).gcd(&rest)?;
        if !g.is_one() {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest)?;
            out.push((g, i));
        }
        i += 1;
    }
    if rest.degree().unwrap_or(0) > 0 {
        let d = rest.degree().unwrap();
        out.push((rest, d));
    }
    Ok(out)
}

fn random_poly(field: PrimeField, below: usize, rng: &mut ChaCha8Rng) -> GfPoly {
    GfPoly::new(field, (0..below).map(|_| rng.gen_range(0..field.p())).collect())
}

fn equal_degree(f: &GfPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<GfPoly>) -> Result<()> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Ok(());
    }
    if n == d {
        out.push(f.clone());
        return Ok(());
    }
    let field = f.field();
    loop {
        let a = random_poly(field, n, rng);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let candidate = if field.p() == 2 {
            // absolute trace a + a^2 + .. + a^(2^(d-1))
            let mut term = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                term = (&term * &term).rem(f)?;
                acc = &acc + &term;
            }
            acc
        } else {
            let q: BigUint = Pow::pow(BigUint::from(field.p()), d);
            let e = (q - BigUint::one()) / BigUint::from(2u32);
            &a.pow_mod(&e, f)? - &GfPoly::one(field)
        };
        if candidate.is_zero() {
            continue;
        }
        let g = candidate.gcd(f)?;
        if !g.is_one() && g.degree() != f.degree() {
            let rest = f.exact_div(&g).expect("gcd divides");
            equal_degree(&g, d, rng, out)?;
            equal_degree(&rest, d, rng, out)?;
            return Ok(());
        }
    }
}

/// All monic divisors ordered by degree, then coefficients lowest first.
pub fn monic_divisors(h: &GfPoly) -> Result<Vec<GfPoly>> {
    let fact = factorize_poly(h)?;
    let mut out: Vec<GfPoly> = fact
        .divisor_exponents()
        .iter()
        .map(|e| fact.divisor_from_exponents(e))
        .collect();
    out.sort();
    Ok(out)
}

/// `mu(0) = 0`; otherwise the usual case split, invariant under units.
pub fn mobius_poly(h: &GfPoly) -> Result<i32> {
    if h.is_zero() {
        return Ok(0);
    }
    Ok(mobius_of_exponents(&factorize_poly(h)?.exponents()))
}

/// `phi(0) = 0`, `phi(unit) = 1`, else `sum_{D | H} mu(H/D) |D|`.
pub fn phi_poly(h: &GfPoly) -> Result<BigInt> {
    if h.is_zero() {
        return Ok(BigInt::zero());
    }
    Ok(phi_factored(&factorize_poly(h)?))
}

pub(crate) fn phi_factored(fact: &FactoredPolynomial) -> BigInt {
    phi_of_exponents(fact, &fact.exponents())
}

/// Totient of the monic divisor of `fact` with exponents `exps`, by the
/// divisor sum.
pub(crate) fn phi_of_exponents(fact: &FactoredPolynomial, exps: &[u32]) -> BigInt {
    let mut total = BigInt::zero();
    for f in exponent_box(exps) {
        let co: Vec<u32> = exps.iter().zip(&f).map(|(e, x)| e - x).collect();
        match mobius_of_exponents(&co) {
            0 => {}
            1 => total += fact.norm_of_exponents(&f),
            _ => total -= fact.norm_of_exponents(&f),
        }
    }
    total
}
