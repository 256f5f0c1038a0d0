//! Integer number theory: factorization, divisors, n-ary gcd/lcm, the Möbius
//! function and Euler's totient.
//!
//! All values are arbitrary precision. Factorization runs trial division by
//! the primes below 10^6 and hands any remaining cofactor to Miller–Rabin and
//! Brent's variant of Pollard rho.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;

/// Witnesses that make Miller–Rabin deterministic below 3.3 * 10^24.
const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
/// Extra witnesses for larger inputs (probabilistic beyond the bound above).
const MR_EXTRA_BASES: [u32; 12] = [43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// A positive integer together with its canonical prime factorization.
#[derive(Clone)]
pub struct FactoredInteger {
    value: BigInt,
    factors: Vec<(BigInt, u32)>,
    divisors: OnceLock<Vec<BigInt>>,
}

impl PartialEq for FactoredInteger {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for FactoredInteger {}

impl fmt::Debug for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FactoredInteger")
            .field("value", &self.value)
            .field("factors", &self.factors)
            .finish()
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FactoredInteger {
    fn from_parts(value: BigInt, factors: Vec<(BigInt, u32)>) -> Self {
        FactoredInteger {
            value,
            factors,
            divisors: OnceLock::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_parts(BigInt::one(), Vec::new())
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    /// All positive divisors in increasing order, computed once.
    pub fn divisors(&self) -> &[BigInt] {
        self.divisors.get_or_init(|| {
            let mut out = vec![BigInt::one()];
            for (p, e) in &self.factors {
                let len = out.len();
                let mut power = BigInt::one();
                for _ in 0..*e {
                    power *= p;
                    for i in 0..len {
                        out.push(&out[i] * &power);
                    }
                }
            }
            out.sort();
            out
        })
    }

    pub fn divisor_count(&self) -> usize {
        self.factors.iter().map(|(_, e)| *e as usize + 1).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// Exponent of `p` in this integer (zero when `p` does not divide it).
    pub fn valuation(&self, p: &BigInt) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map_or(0, |(_, e)| *e)
    }

    /// Factorization of `self / d`, reusing the known primes. `None` if `d`
    /// is not a positive divisor.
    pub fn quotient(&self, d: &BigInt) -> Option<FactoredInteger> {
        if !d.is_positive() || !self.value.is_multiple_of(d) {
            return None;
        }
        let mut rest = d.clone();
        let mut factors = Vec::with_capacity(self.factors.len());
        for (p, e) in &self.factors {
            let mut k = 0u32;
            while k < *e && rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            if k < *e {
                factors.push((p.clone(), e - k));
            }
        }
        debug_assert!(rest.is_one());
        Some(Self::from_parts(&self.value / d, factors))
    }

    /// Factorization of a divisor `d` of `self`.
    pub fn divisor(&self, d: &BigInt) -> Option<FactoredInteger> {
        if !d.is_positive() || !self.value.is_multiple_of(d) {
            return None;
        }
        let mut rest = d.clone();
        let mut factors = Vec::new();
        for (p, _) in &self.factors {
            let mut k = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            if k > 0 {
                factors.push((p.clone(), k));
            }
        }
        Some(Self::from_parts(d.clone(), factors))
    }
}

/// Canonical prime factorization of `n >= 1`.
pub fn factorize(n: &BigInt) -> Result<FactoredInteger> {
    if !n.is_positive() {
        return Err(Error::NonPositive {
            what: "factorization input",
            value: n.clone(),
        });
    }
    let mut rest = n.magnitude().clone();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();

    if let Some(mut small) = rest.to_u64() {
        for &p in small_primes() {
            let p = p as u64;
            if p * p > small {
                break;
            }
            if small % p == 0 {
                let mut e = 0;
                while small % p == 0 {
                    small /= p;
                    e += 1;
                }
                factors.push((BigUint::from(p), e));
            }
        }
        rest = BigUint::from(small);
    } else {
        for &p in small_primes() {
            let pb = BigUint::from(p);
            if &pb * &pb > rest {
                break;
            }
            if (&rest % &pb).is_zero() {
                let mut e = 0;
                while (&rest % &pb).is_zero() {
                    rest /= &pb;
                    e += 1;
                }
                factors.push((pb, e));
            }
        }
    }

    if !rest.is_one() {
        let limit = BigUint::from(TRIAL_LIMIT);
        if rest < &limit * &limit {
            // no prime factor below the trial bound, so the cofactor is prime
            factors.push((rest, 1));
        } else {
            let mut large = Vec::new();
            split_large(rest, &mut large);
            large.sort();
            for p in large {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }

    let factors = factors
        .into_iter()
        .map(|(p, e)| (BigInt::from_biguint(Sign::Plus, p), e))
        .collect();
    Ok(FactoredInteger::from_parts(n.clone(), factors))
}

fn split_large(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime_u(&n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(&n);
    let other = &n / &d;
    split_large(d, out);
    split_large(other, out);
}

fn pollard_brent(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let batch: u64 = 128;
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..batch.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
    }
    unreachable!("rho exhausted constants")
}

fn is_probable_prime_u(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &p in MR_BASES.iter().chain(MR_EXTRA_BASES.iter()) {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let deterministic_bound = BigUint::parse_bytes(b"3317044064679887385961981", 10).unwrap();
    let bases: Vec<u32> = if n < &deterministic_bound {
        MR_BASES.to_vec()
    } else {
        MR_BASES.iter().chain(MR_EXTRA_BASES.iter()).copied().collect()
    };
    'witness: for a in bases {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin test; deterministic below 3.3 * 10^24.
pub fn is_probable_prime(n: &BigInt) -> bool {
    n.is_positive() && is_probable_prime_u(n.magnitude())
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: &FactoredInteger) -> Vec<BigInt> {
    n.divisors().to_vec()
}

/// Greatest common divisor of a non-empty sequence; signs are ignored and
/// the gcd of all zeros is zero.
pub fn nary_gcd(values: &[BigInt]) -> Result<BigInt> {
    if values.is_empty() {
        return Err(Error::Empty("gcd argument list"));
    }
    Ok(values
        .iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v)))
}

/// Least common multiple of a non-empty sequence of positive integers.
pub fn nary_lcm(values: &[BigInt]) -> Result<BigInt> {
    if values.is_empty() {
        return Err(Error::Empty("lcm argument list"));
    }
    let mut acc = BigInt::one();
    for v in values {
        if !v.is_positive() {
            return Err(Error::NonPositive {
                what: "lcm argument",
                value: v.clone(),
            });
        }
        acc = acc.lcm(v);
    }
    Ok(acc)
}

pub fn mobius(n: &FactoredInteger) -> i32 {
    if !n.is_squarefree() {
        0
    } else if n.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: &FactoredInteger) -> BigInt {
    let mut phi = BigInt::one();
    for (p, e) in &n.factors {
        phi *= p - 1;
        for _ in 1..*e {
            phi *= p;
        }
    }
    phi
}

/// Reduce `a` into `[0, m)` for `m > 0`.
pub fn modulo(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Pairwise coprimality check; returns the first offending index pair.
pub fn first_non_coprime_pair(values: &[BigInt]) -> Option<(usize, usize)> {
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if !values[i].gcd(&values[j]).is_one() {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn as_u64_pairs(f: &FactoredInteger) -> Vec<(u64, u32)> {
        f.factors()
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }

    #[test]
    fn factorize_small_values() {
        assert!(factorize(&int(1)).unwrap().factors().is_empty());
        assert_eq!(
            as_u64_pairs(&factorize(&int(210)).unwrap()),
            trial_division(210)
        );
        assert_eq!(
            as_u64_pairs(&factorize(&int(720)).unwrap()),
            vec![(2, 4), (3, 2), (5, 1)]
        );
        for n in 1..3000u64 {
            assert_eq!(
                as_u64_pairs(&factorize(&BigInt::from(n)).unwrap()),
                trial_division(n)
            );
        }
    }

    #[test]
    fn factorize_rejects_non_positive() {
        assert!(factorize(&int(0)).is_err());
        assert!(factorize(&int(-6)).is_err());
    }

    #[test]
    fn factorize_large_semiprimes() {
        // two primes above the trial bound
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(998_244_353u64);
        let f = factorize(&(&p * &q)).unwrap();
        assert_eq!(f.factors(), &[(p.clone(), 1), (q.clone(), 1)]);

        let r = BigInt::parse_bytes(b"1000000000000000003", 10).unwrap();
        assert!(is_probable_prime(&r));
        let f = factorize(&(&p * &p * &r)).unwrap();
        assert_eq!(f.factors(), &[(p, 2), (r, 1)]);

        // Mersenne 2^67 - 1 = 193707721 * 761838257287
        let m67 = (BigInt::one() << 67u32) - 1;
        let f = factorize(&m67).unwrap();
        assert_eq!(
            f.factors(),
            &[
                (BigInt::from(193_707_721u64), 1),
                (BigInt::from(761_838_257_287u64), 1)
            ]
        );
    }

    #[test]
    fn divisor_lists() {
        let one = factorize(&int(1)).unwrap();
        assert_eq!(divisors(&one), vec![int(1)]);
        let d210: Vec<i64> = vec![1, 2, 3, 5, 6, 7, 10, 14, 15, 21, 30, 35, 42, 70, 105, 210];
        assert_eq!(
            divisors(&factorize(&int(210)).unwrap()),
            d210.into_iter().map(int).collect::<Vec<_>>()
        );
        let brute: Vec<BigInt> = (1..=12).filter(|d| 12 % d == 0).map(int).collect();
        assert_eq!(divisors(&factorize(&int(12)).unwrap()), brute);
        let f = factorize(&int(720)).unwrap();
        assert_eq!(f.divisors().len(), f.divisor_count());
    }

    #[test]
    fn gcd_and_lcm() {
        assert_eq!(nary_gcd(&[int(2), int(2), int(12)]).unwrap(), int(2));
        assert_eq!(nary_gcd(&[int(5), int(7), int(35)]).unwrap(), int(1));
        assert_eq!(nary_gcd(&[int(840), int(420)]).unwrap(), int(420));
        assert_eq!(nary_gcd(&[int(0), int(0)]).unwrap(), int(0));
        assert_eq!(nary_gcd(&[int(-4), int(6)]).unwrap(), int(2));
        assert!(nary_gcd(&[]).is_err());

        assert_eq!(nary_lcm(&[int(15), int(14)]).unwrap(), int(210));
        assert_eq!(nary_lcm(&[int(12), int(35)]).unwrap(), int(420));
        assert_eq!(nary_lcm(&[int(9)]).unwrap(), int(9));
        assert!(nary_lcm(&[int(3), int(0)]).is_err());
        assert!(nary_lcm(&[]).is_err());
    }

    #[test]
    fn mobius_and_phi_values() {
        let f = |n: i64| factorize(&int(n)).unwrap();
        assert_eq!(mobius(&f(1)), 1);
        assert_eq!(mobius(&f(4)), 0);
        assert_eq!(mobius(&f(6)), 1);
        assert_eq!(mobius(&f(30)), -1);
        assert_eq!(euler_phi(&f(1)), int(1));
        assert_eq!(euler_phi(&f(21)), int(12));
        assert_eq!(euler_phi(&f(10)), int(4));
    }

    #[test]
    fn phi_counts_coprime_residues() {
        for n in 1..400i64 {
            let direct = (1..=n).filter(|k| int(*k).gcd(&int(n)).is_one()).count();
            assert_eq!(euler_phi(&factorize(&int(n)).unwrap()), int(direct as i64));
        }
    }

    #[test]
    fn quotient_and_divisor_factorizations() {
        let f = factorize(&int(720)).unwrap();
        for d in f.divisors() {
            let q = f.quotient(d).unwrap();
            assert_eq!(q.factors(), factorize(&(&int(720) / d)).unwrap().factors());
            let dd = f.divisor(d).unwrap();
            assert_eq!(dd.factors(), factorize(d).unwrap().factors());
        }
        assert!(f.quotient(&int(7)).is_none());
    }
}
