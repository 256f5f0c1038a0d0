//! Ramanujan sums over the integers and the integer-only evaluations built on
//! them: transforms of r-even functions, the twisted multivariate function E,
//! its divisor-summatory partner J, and the unit-coefficient restricted count.
//!
//! Every quantity here is an integer. Sums of the form `(1/m) * sum e(..)`
//! are evaluated through their divisor-sum forms and each final division is
//! checked for exactness.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, euler_phi, factorize, mobius, FactoredInteger};
use crate::error::{Error, Result};
use crate::report::{DivisorTable, TableRow};

fn positive(value: &BigInt, what: &'static str) -> Result<()> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            what,
            value: value.clone(),
        })
    }
}

/// `C_m(a)` by the divisor sum over `d | (a, m)` of `mu(m/d) * d`.
pub fn ramanujan_c(m: &BigInt, a: &BigInt) -> Result<BigInt> {
    positive(m, "Ramanujan sum modulus")?;
    Ok(ramanujan_c_factored(&factorize(m)?, a))
}

/// `C_m(a)` through `phi(m) mu(N) / phi(N)` with `N = m / (a, m)`.
pub fn ramanujan_c_closed(m: &BigInt, a: &BigInt) -> Result<BigInt> {
    positive(m, "Ramanujan sum modulus")?;
    Ok(ramanujan_c_closed_factored(&factorize(m)?, a))
}

pub(crate) fn ramanujan_c_factored(m: &FactoredInteger, a: &BigInt) -> BigInt {
    let g = a.gcd(m.value());
    let g = m.divisor(&g).expect("gcd divides the modulus");
    let mut sum = BigInt::zero();
    for d in g.divisors() {
        let quotient = m.quotient(d).expect("divisor of gcd divides m");
        match mobius(&quotient) {
            0 => {}
            1 => sum += d,
            _ => sum -= d,
        }
    }
    sum
}

pub(crate) fn ramanujan_c_closed_factored(m: &FactoredInteger, a: &BigInt) -> BigInt {
    let g = a.gcd(m.value());
    let n = m.quotient(&g).expect("gcd divides the modulus");
    let mu = mobius(&n);
    if mu == 0 {
        return BigInt::zero();
    }
    let value = euler_phi(m) / euler_phi(&n);
    if mu > 0 {
        value
    } else {
        -value
    }
}

/// An r-even arithmetic function, stored by its values on the divisors of r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenFunctionTable {
    period: FactoredInteger,
    values: BTreeMap<BigInt, BigInt>,
}

impl EvenFunctionTable {
    /// Build from explicit values; the key set must equal the divisor set.
    pub fn new(period: &BigInt, values: BTreeMap<BigInt, BigInt>) -> Result<Self> {
        positive(period, "period")?;
        let period = factorize(period)?;
        let keys_match = values.len() == period.divisors().len()
            && period.divisors().iter().all(|d| values.contains_key(d));
        if !keys_match {
            return Err(Error::LengthMismatch {
                what: "even function keys vs divisors of the period",
                left: values.len(),
                right: period.divisors().len(),
            });
        }
        Ok(EvenFunctionTable { period, values })
    }

    pub fn from_fn(period: &BigInt, mut f: impl FnMut(&BigInt) -> BigInt) -> Result<Self> {
        positive(period, "period")?;
        let fact = factorize(period)?;
        let values = fact.divisors().iter().map(|d| (d.clone(), f(d))).collect();
        Ok(EvenFunctionTable {
            period: fact,
            values,
        })
    }

    pub fn period(&self) -> &BigInt {
        self.period.value()
    }

    /// Value at any integer `k`, via `f(k) = f((k, r))`.
    pub fn eval(&self, k: &BigInt) -> BigInt {
        let g = k.gcd(self.period.value());
        self.values[&g].clone()
    }

    pub fn values(&self) -> &BTreeMap<BigInt, BigInt> {
        &self.values
    }
}

/// Discrete Fourier transform of an r-even function at `b`:
/// `sum_{d | r} f(d) C_{r/d}(b)`.
pub fn even_dft(f: &EvenFunctionTable, b: &BigInt) -> BigInt {
    let mut total = BigInt::zero();
    for (d, value) in &f.values {
        if value.is_zero() {
            continue;
        }
        let order = f.period.quotient(d).expect("key divides period");
        total += value * ramanujan_c_factored(&order, b);
    }
    total
}

/// Moduli `m_1..m_n` together with an ambient modulus `m` that their lcm
/// divides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex {
    moduli: Vec<BigInt>,
    ambient: BigInt,
}

impl MultiIndex {
    pub fn new(moduli: Vec<BigInt>, ambient: BigInt) -> Result<Self> {
        let lcm = arith::nary_lcm(&moduli)?;
        positive(&ambient, "ambient modulus")?;
        if !ambient.is_multiple_of(&lcm) {
            return Err(Error::NotDivisor {
                what: "lcm of moduli must divide the ambient modulus",
                divisor: lcm.to_string(),
                value: ambient.to_string(),
            });
        }
        Ok(MultiIndex { moduli, ambient })
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn ambient(&self) -> &BigInt {
        &self.ambient
    }
}

fn j_value(b: &BigInt, moduli: &[&BigInt], ambient: &BigInt) -> BigInt {
    let mut lcm = BigInt::one();
    let mut product = BigInt::one();
    for m in moduli {
        lcm = lcm.lcm(m);
        product *= *m;
    }
    if b.is_multiple_of(&(ambient / &lcm)) {
        product / lcm
    } else {
        BigInt::zero()
    }
}

/// `J(b; m_1..m_n) = m_1...m_n / [m_1..m_n]` when `m / [m_1..m_n]` divides
/// `b`, and zero otherwise.
pub fn j_function(b: &BigInt, idx: &MultiIndex) -> BigInt {
    let refs: Vec<&BigInt> = idx.moduli.iter().collect();
    j_value(b, &refs, &idx.ambient)
}

/// Visit every tuple `(d_1, .., d_n)` with `d_i` drawn from `lists[i]`.
pub(crate) fn for_each_tuple<T>(lists: &[&[T]], mut visit: impl FnMut(&[&T])) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut current: Vec<&T> = lists.iter().map(|l| &l[0]).collect();
    loop {
        visit(&current);
        let mut pos = lists.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                current[pos] = &lists[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            current[pos] = &lists[pos][0];
        }
    }
}

/// `E(b; m_1..m_n)` via the Möbius expansion
/// `sum_{d_i | m_i} J(b; d_1..d_n) mu(m_1/d_1)...mu(m_n/d_n)`.
pub fn e_function(b: &BigInt, idx: &MultiIndex) -> Result<BigInt> {
    let facts = idx
        .moduli
        .iter()
        .map(factorize)
        .collect::<Result<Vec<_>>>()?;
    // each divisor paired with mu(m_i / d_i), dropping the zero terms
    let weighted: Vec<Vec<(BigInt, i32)>> = facts
        .iter()
        .map(|f| {
            f.divisors()
                .iter()
                .filter_map(|d| {
                    let mu = mobius(&f.quotient(d).unwrap());
                    (mu != 0).then(|| (d.clone(), mu))
                })
                .collect()
        })
        .collect();
    let lists: Vec<&[(BigInt, i32)]> = weighted.iter().map(|v| v.as_slice()).collect();
    let mut total = BigInt::zero();
    for_each_tuple(&lists, |tuple| {
        let ds: Vec<&BigInt> = tuple.iter().map(|(d, _)| d).collect();
        let sign: i32 = tuple.iter().map(|(_, mu)| *mu).product();
        let j = j_value(b, &ds, &idx.ambient);
        if sign > 0 {
            total += j;
        } else {
            total -= j;
        }
    });
    Ok(total)
}

/// Rows `d | m` of the divisor sum `sum_d C_d(b) prod_l C_{r_l}(m/d)`.
pub(crate) fn divisor_sum_table(
    m: &FactoredInteger,
    b: &BigInt,
    orders: &[FactoredInteger],
) -> DivisorTable {
    let mut columns = vec!["C_divisor(b)".to_string()];
    columns.extend(
        orders
            .iter()
            .map(|r| format!("C_{}(m/divisor)", r.value())),
    );
    let rows = m
        .divisors()
        .iter()
        .map(|d| {
            let mut values = vec![ramanujan_c_factored(&m.divisor(d).unwrap(), b)];
            let cofactor = m.value() / d;
            for r in orders {
                values.push(ramanujan_c_factored(r, &cofactor));
            }
            let product = values.iter().product();
            TableRow {
                divisor: d.to_string(),
                values,
                product,
            }
        })
        .collect();
    DivisorTable { columns, rows }
}

pub(crate) fn exact_div(num: &BigInt, den: &BigInt, what: &str) -> Result<BigInt> {
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::Inexact(format!("{what}: {num} is not divisible by {den}")))
    }
}

/// Count of `x_1 + .. + x_n = b (mod m)` with `(x_i, m) = t_i`, from
/// `(1/m) sum_{d | m} C_d(b) prod_i C_{m/t_i}(m/d)`.
pub fn restricted_count_unit_coeffs(m: &BigInt, b: &BigInt, t: &[BigInt]) -> Result<BigInt> {
    let (count, _) = restricted_count_unit_coeffs_table(m, b, t)?;
    Ok(count)
}

pub(crate) fn restricted_count_unit_coeffs_table(
    m: &BigInt,
    b: &BigInt,
    t: &[BigInt],
) -> Result<(BigInt, DivisorTable)> {
    positive(m, "modulus")?;
    let mf = factorize(m)?;
    let mut orders = Vec::with_capacity(t.len());
    for ti in t {
        let order = mf.quotient(ti).ok_or_else(|| Error::NotDivisor {
            what: "restriction must divide the modulus",
            divisor: ti.to_string(),
            value: m.to_string(),
        })?;
        orders.push(order);
    }
    let table = divisor_sum_table(&mf, b, &orders);
    let count = exact_div(&table.total(), m, "unit-coefficient divisor sum")?;
    if count.is_negative() {
        return Err(Error::Inexact(format!("negative count {count}")));
    }
    Ok((count, table))
}
