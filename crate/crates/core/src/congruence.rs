//! Linear congruence systems over the integers: CRT with arbitrary moduli,
//! solvability tests and exact solution counts (with and without gcd
//! restrictions), plus an exhaustive enumeration oracle.
//!
//! Counts are taken over `Z_m^n`. The closed-form counts need pairwise
//! coprime moduli and then `m` is their product; the oracle scans residues
//! modulo the lcm of the moduli, which coincides in the coprime case.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{self, euler_phi, factorize, first_non_coprime_pair, modulo};
use crate::error::{Error, Result};
use crate::ramanujan::{exact_div, for_each_tuple, restricted_count_unit_coeffs_table};
use crate::report::{CountReport, Detail, Method};

/// Default bound on the number of candidate tuples the oracle may scan.
pub const DEFAULT_CAP: u64 = 100_000_000;
/// Solutions are listed only when there are at most this many.
pub const SOLUTION_LIST_LIMIT: usize = 1000;

/// `k` congruences `a_i1 x_1 + .. + a_in x_n = b_i (mod m_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSystem {
    coefficients: Vec<Vec<BigInt>>,
    moduli: Vec<BigInt>,
    rhs: Vec<BigInt>,
}

impl CongruenceSystem {
    pub fn new(coefficients: Vec<Vec<BigInt>>, moduli: Vec<BigInt>, rhs: Vec<BigInt>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::Empty("congruence system"));
        }
        if coefficients.len() != moduli.len() {
            return Err(Error::LengthMismatch {
                what: "coefficient rows vs moduli",
                left: coefficients.len(),
                right: moduli.len(),
            });
        }
        if rhs.len() != moduli.len() {
            return Err(Error::LengthMismatch {
                what: "right-hand sides vs moduli",
                left: rhs.len(),
                right: moduli.len(),
            });
        }
        let n = coefficients[0].len();
        if n == 0 {
            return Err(Error::Empty("variable list"));
        }
        for row in &coefficients {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    what: "coefficient row length",
                    left: row.len(),
                    right: n,
                });
            }
        }
        for m in &moduli {
            if *m < BigInt::from(2) {
                return Err(Error::ModulusTooSmall(m.to_string()));
            }
        }
        Ok(CongruenceSystem {
            coefficients,
            moduli,
            rhs,
        })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(coefficients: &[&[i64]], moduli: &[i64], rhs: &[i64]) -> Result<Self> {
        Self::new(
            coefficients
                .iter()
                .map(|row| row.iter().map(|&a| BigInt::from(a)).collect())
                .collect(),
            moduli.iter().map(|&m| BigInt::from(m)).collect(),
            rhs.iter().map(|&b| BigInt::from(b)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.moduli.len()
    }

    pub fn vars(&self) -> usize {
        self.coefficients[0].len()
    }

    pub fn coefficients(&self) -> &[Vec<BigInt>] {
        &self.coefficients
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.rhs
    }

    /// Row `i` with coefficients and right-hand side reduced into `[0, m_i)`.
    pub fn normalized_row(&self, i: usize) -> (Vec<BigInt>, BigInt) {
        let m = &self.moduli[i];
        (
            self.coefficients[i].iter().map(|a| modulo(a, m)).collect(),
            modulo(&self.rhs[i], m),
        )
    }

    fn require_coprime(&self) -> Result<()> {
        match first_non_coprime_pair(&self.moduli) {
            None => Ok(()),
            Some((a, b)) => Err(Error::NotCoprime {
                row_a: a,
                row_b: b,
                first: self.moduli[a].to_string(),
                second: self.moduli[b].to_string(),
            }),
        }
    }

    pub fn modulus_product(&self) -> BigInt {
        self.moduli.iter().product()
    }

    pub fn modulus_lcm(&self) -> BigInt {
        arith::nary_lcm(&self.moduli).expect("moduli are at least 2")
    }
}

/// Gcd restrictions `(x_j, m_i) = t_ij`. Missing entries leave the pair
/// unconstrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionTable {
    entries: Vec<Vec<Option<BigInt>>>,
}

impl RestrictionTable {
    pub fn new(entries: Vec<Vec<BigInt>>) -> Self {
        RestrictionTable {
            entries: entries
                .into_iter()
                .map(|row| row.into_iter().map(Some).collect())
                .collect(),
        }
    }

    pub fn from_i64(entries: &[&[i64]]) -> Self {
        Self::new(
            entries
                .iter()
                .map(|row| row.iter().map(|&t| BigInt::from(t)).collect())
                .collect(),
        )
    }

    pub fn partial(entries: Vec<Vec<Option<BigInt>>>) -> Self {
        RestrictionTable { entries }
    }

    pub fn unrestricted(rows: usize, vars: usize) -> Self {
        RestrictionTable {
            entries: vec![vec![None; vars]; rows],
        }
    }

    pub fn get(&self, row: usize, var: usize) -> Option<&BigInt> {
        self.entries.get(row)?.get(var)?.as_ref()
    }

    pub fn set(&mut self, row: usize, var: usize, value: BigInt) {
        self.entries[row][var] = Some(value);
    }

    pub fn entries(&self) -> &[Vec<Option<BigInt>>] {
        &self.entries
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().flatten().all(Option::is_some)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().flatten().all(Option::is_none)
    }

    /// Check shape and `t_ij | m_i` against a system.
    pub fn validate(&self, sys: &CongruenceSystem) -> Result<()> {
        if self.entries.len() != sys.rows() {
            return Err(Error::LengthMismatch {
                what: "restriction rows vs congruences",
                left: self.entries.len(),
                right: sys.rows(),
            });
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != sys.vars() {
                return Err(Error::LengthMismatch {
                    what: "restriction row length vs variables",
                    left: row.len(),
                    right: sys.vars(),
                });
            }
            for t in row.iter().flatten() {
                if !t.is_positive() {
                    return Err(Error::NonPositive {
                        what: "restriction",
                        value: t.clone(),
                    });
                }
                if !sys.moduli[i].is_multiple_of(t) {
                    return Err(Error::NotDivisor {
                        what: "restriction must divide its modulus",
                        divisor: t.to_string(),
                        value: sys.moduli[i].to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Every complete table agreeing with the specified entries, each missing
    /// `t_ij` ranging over the divisors of `m_i`.
    pub fn completions(&self, sys: &CongruenceSystem) -> Result<Vec<RestrictionTable>> {
        self.validate(sys)?;
        let divisor_lists = sys
            .moduli
            .iter()
            .map(|m| Ok(factorize(m)?.divisors().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let mut slots: Vec<(usize, usize)> = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                if t.is_none() {
                    slots.push((i, j));
                }
            }
        }
        let choices: Vec<&[BigInt]> = slots.iter().map(|(i, _)| divisor_lists[*i].as_slice()).collect();
        let mut out = Vec::new();
        for_each_tuple(&choices, |picked| {
            let mut table = self.clone();
            for ((i, j), t) in slots.iter().zip(picked) {
                table.set(*i, *j, (*t).clone());
            }
            out.push(table);
        });
        Ok(out)
    }
}

/// Solution `b` of `x = r_i (mod m_i)` with `0 <= b < lcm`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtSolution {
    pub residue: BigInt,
    pub modulus: BigInt,
}

/// Solve `x = r_i (mod m_i)` for arbitrary moduli `>= 2`. Returns `None` when
/// some pair violates `r_i = r_j (mod (m_i, m_j))`.
pub fn crt_solve(residues: &[BigInt], moduli: &[BigInt]) -> Result<Option<CrtSolution>> {
    if residues.len() != moduli.len() {
        return Err(Error::LengthMismatch {
            what: "residues vs moduli",
            left: residues.len(),
            right: moduli.len(),
        });
    }
    if moduli.is_empty() {
        return Err(Error::Empty("CRT input"));
    }
    let two = BigInt::from(2);
    if let Some(m) = moduli.iter().find(|m| **m < two) {
        return Err(Error::ModulusTooSmall(m.to_string()));
    }
    let mut residue = modulo(&residues[0], &moduli[0]);
    let mut modulus = moduli[0].clone();
    for (r, m) in residues.iter().zip(moduli).skip(1) {
        let egcd = modulus.extended_gcd(m);
        let g = egcd.gcd;
        let diff = r - &residue;
        if !diff.is_multiple_of(&g) {
            return Ok(None);
        }
        let step = m / &g;
        // modulus * x = g (mod m) so modulus * x * diff/g = diff (mod m)
        let k = modulo(&(&diff / &g * &egcd.x), &step);
        residue += &modulus * k;
        modulus *= step;
        residue = modulo(&residue, &modulus);
    }
    Ok(Some(CrtSolution { residue, modulus }))
}

/// Count of solutions in `Z_m^n` of `a_1 x_1 + .. + a_n x_n = b (mod m)`:
/// `l * m^(n-1)` when `l = (a_1, .., a_n, m)` divides `b`, else zero.
pub fn lehmer_count(a: &[BigInt], b: &BigInt, m: &BigInt) -> Result<CountReport> {
    if a.is_empty() {
        return Err(Error::Empty("coefficient list"));
    }
    if *m < BigInt::from(2) {
        return Err(Error::ModulusTooSmall(m.to_string()));
    }
    let ell = a.iter().fold(m.clone(), |acc, x| acc.gcd(x));
    let count = if b.is_multiple_of(&ell) {
        &ell * Pow::pow(m, (a.len() - 1) as u32)
    } else {
        BigInt::zero()
    };
    Ok(CountReport::new(Method::Lehmer, count)
        .with("modulus", Detail::Int(m.clone()))
        .with("ell", Detail::Ints(vec![ell])))
}

/// Count of solutions in `Z_m^n`, `m = m_1...m_k` pairwise coprime: the
/// system is solvable iff `l_i | b_i` with `l_i = (a_i1, .., a_in, m_i)`, and
/// then has `m^(n-1) * prod l_i` solutions.
pub fn system_count(sys: &CongruenceSystem) -> Result<CountReport> {
    sys.require_coprime()?;
    let m = sys.modulus_product();
    let mut ells = Vec::with_capacity(sys.rows());
    let mut solvable = true;
    for i in 0..sys.rows() {
        let (row, b) = sys.normalized_row(i);
        let ell = row.iter().fold(sys.moduli[i].clone(), |acc, a| acc.gcd(a));
        solvable &= b.is_multiple_of(&ell);
        ells.push(ell);
    }
    let count = if solvable {
        Pow::pow(&m, (sys.vars() - 1) as u32) * ells.iter().product::<BigInt>()
    } else {
        BigInt::zero()
    };
    Ok(CountReport::new(Method::CoprimeSystem, count)
        .with("modulus", Detail::Int(m))
        .with("ell", Detail::Ints(ells)))
}

/// Solutions of `a x = b (mod m)` with `(x, m) = t`.
///
/// Solvable iff `t | (b, m)` and `(a, m/t) = (b/t, m/t)`; the count is then
/// `phi(m/t) / phi(m/(t d))` with `d = (a, m/t)`.
pub fn single_restricted_count(a: &BigInt, b: &BigInt, m: &BigInt, t: &BigInt) -> Result<CountReport> {
    if *m < BigInt::from(2) {
        return Err(Error::ModulusTooSmall(m.to_string()));
    }
    if !t.is_positive() {
        return Err(Error::NonPositive {
            what: "restriction",
            value: t.clone(),
        });
    }
    let a = modulo(a, m);
    let b = modulo(b, m);
    let bm = b.gcd(m);
    let unsolvable = |reason: &str| {
        CountReport::new(Method::SingleRestricted, BigInt::zero()).with("reason", Detail::Text(reason.to_string()))
    };
    if !bm.is_multiple_of(t) {
        return Ok(unsolvable("restriction does not divide (b, m)"));
    }
    let reduced = m / t;
    let d = a.gcd(&reduced);
    if d != (&b / t).gcd(&reduced) {
        return Ok(unsolvable("(a, m/t) differs from (b/t, m/t)"));
    }
    let mf = factorize(m)?;
    let num = euler_phi(&mf.quotient(t).unwrap());
    let den = euler_phi(&mf.quotient(&(t * &d)).unwrap());
    let count = exact_div(&num, &den, "totient ratio")?;
    Ok(CountReport::new(Method::SingleRestricted, count).with("d", Detail::Int(d)))
}

/// Count of solutions in `Z_m^n` (`m = prod m_i`, pairwise coprime) with
/// `(x_j, m_i) = t_ij`, from
/// `(1/m) prod_j phi(m/t_j)/phi(m/(t_j d_j)) sum_{divisor | m} C_divisor(b) prod_l C_{m/(t_l d_l)}(m/divisor)`
/// where `t_j = prod_i t_ij`, `d_ij = (a_ij, m_i/t_ij)`, `d_j = prod_i d_ij`
/// and `b` solves `x = b_i (mod m_i)`.
///
/// A table with missing entries is summed over all its completions.
pub fn restricted_system_count(sys: &CongruenceSystem, r: &RestrictionTable) -> Result<CountReport> {
    sys.require_coprime()?;
    r.validate(sys)?;
    if r.is_complete() {
        return restricted_system_count_complete(sys, r);
    }
    let completions = r.completions(sys)?;
    let mut total = BigInt::zero();
    for table in &completions {
        total += restricted_system_count_complete(sys, table)?.count;
    }
    Ok(CountReport::new(Method::RestrictedSystem, total)
        .with("modulus", Detail::Int(sys.modulus_product()))
        .with("completions", Detail::Int(BigInt::from(completions.len()))))
}

fn restricted_system_count_complete(sys: &CongruenceSystem, r: &RestrictionTable) -> Result<CountReport> {
    let k = sys.rows();
    let n = sys.vars();
    let m = sys.modulus_product();
    let b = crt_solve(sys.rhs(), sys.moduli())?
        .expect("coprime moduli always admit a CRT solution")
        .residue;

    let mut t = vec![BigInt::one(); n];
    let mut d = vec![BigInt::one(); n];
    for i in 0..k {
        let (row, _) = sys.normalized_row(i);
        for j in 0..n {
            let tij = r.get(i, j).expect("complete table");
            let dij = row[j].gcd(&(&sys.moduli[i] / tij));
            t[j] *= tij;
            d[j] *= dij;
        }
    }

    let mf = factorize(&m)?;
    let mut ratio = BigInt::one();
    let mut shifted = Vec::with_capacity(n);
    for j in 0..n {
        let td = &t[j] * &d[j];
        let num = euler_phi(&mf.quotient(&t[j]).expect("t_j divides m"));
        let den = euler_phi(&mf.quotient(&td).expect("t_j d_j divides m"));
        ratio *= exact_div(&num, &den, "totient ratio")?;
        shifted.push(td);
    }

    let (unit_count, table) = restricted_count_unit_coeffs_table(&m, &b, &shifted)?;
    let count = unit_count.clone() * &ratio;
    Ok(CountReport::new(Method::RestrictedSystem, count)
        .with("modulus", Detail::Int(m))
        .with("b", Detail::Int(b))
        .with("t", Detail::Ints(t))
        .with("d", Detail::Ints(d))
        .with("totient_ratio", Detail::Int(ratio))
        .with("unit_coefficient_count", Detail::Int(unit_count))
        .with("divisor_sum", Detail::Int(table.total()))
        .with("table", Detail::Table(table)))
}

/// Result of an exhaustive scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub count: BigInt,
    /// Modulus of the scanned residue ring.
    pub modulus: BigInt,
    /// All solutions in scan order when there are at most
    /// [`SOLUTION_LIST_LIMIT`].
    pub solutions: Option<Vec<Vec<BigInt>>>,
}

impl Enumeration {
    pub fn report(&self) -> CountReport {
        CountReport::new(Method::Enumeration, self.count.clone()).with("modulus", Detail::Int(self.modulus.clone()))
    }
}

struct Scan {
    moduli: Vec<u64>,
    coeffs: Vec<Vec<u64>>,
    rhs: Vec<u64>,
    restrictions: Vec<Vec<Option<u64>>>,
    candidates: Vec<Option<Vec<u64>>>,
    modulus: u64,
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Scan {
    fn allowed(&self, var: usize, x: u64) -> bool {
        self.moduli
            .iter()
            .enumerate()
            .all(|(i, m)| self.restrictions[i][var].is_none_or(|t| gcd_u64(x, *m) == t))
    }

    fn visit_var(&self, var: usize, mut f: impl FnMut(u64)) {
        match &self.candidates[var] {
            Some(list) => list.iter().for_each(|&x| f(x)),
            None => {
                let restricted = self.restrictions.iter().any(|row| row[var].is_some());
                for x in 0..self.modulus {
                    if !restricted || self.allowed(var, x) {
                        f(x);
                    }
                }
            }
        }
    }

    fn step(&self, var: usize, sums: &mut [u64], x: u64) {
        for (i, s) in sums.iter_mut().enumerate() {
            let m = self.moduli[i];
            *s = ((*s as u128 + self.coeffs[i][var] as u128 * x as u128) % m as u128) as u64;
        }
    }

    fn dfs(&self, var: usize, sums: &mut Vec<u64>, prefix: &mut Vec<u64>, out: &mut (u64, Vec<Vec<u64>>)) {
        let n = self.coeffs[0].len();
        if var == n {
            if sums.iter().zip(&self.rhs).all(|(s, b)| s == b) {
                out.0 += 1;
                if out.1.len() <= SOLUTION_LIST_LIMIT {
                    out.1.push(prefix.clone());
                }
            }
            return;
        }
        self.visit_var(var, |x| {
            let saved = sums.clone();
            self.step(var, sums, x);
            prefix.push(x);
            self.dfs(var + 1, sums, prefix, out);
            prefix.pop();
            sums.copy_from_slice(&saved);
        });
    }
}

/// Exhaustive scan of `Z_L^n` (`L` the lcm of the moduli) for tuples meeting
/// every congruence and every given restriction. Fails when `L^n > cap`.
pub fn enumerate_solutions(
    sys: &CongruenceSystem,
    restrictions: Option<&RestrictionTable>,
    cap: u64,
) -> Result<Enumeration> {
    if let Some(r) = restrictions {
        r.validate(sys)?;
    }
    let lcm = sys.modulus_lcm();
    let n = sys.vars();
    let space = Pow::pow(&lcm, n as u32);
    if space > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            space: space.to_string(),
            cap,
        });
    }
    let modulus = lcm.to_u64().expect("bounded by cap");
    let k = sys.rows();
    let mut coeffs = Vec::with_capacity(k);
    let mut rhs = Vec::with_capacity(k);
    for i in 0..k {
        let (row, b) = sys.normalized_row(i);
        coeffs.push(row.iter().map(|a| a.to_u64().unwrap()).collect());
        rhs.push(b.to_u64().unwrap());
    }
    let restrictions_u64: Vec<Vec<Option<u64>>> = match restrictions {
        Some(r) => r
            .entries()
            .iter()
            .map(|row| row.iter().map(|t| t.as_ref().map(|t| t.to_u64().unwrap())).collect())
            .collect(),
        None => vec![vec![None; n]; k],
    };
    let mut scan = Scan {
        moduli: sys.moduli.iter().map(|m| m.to_u64().unwrap()).collect(),
        coeffs,
        rhs,
        restrictions: restrictions_u64,
        candidates: vec![None; n],
        modulus,
    };
    const LIST_LIMIT: u64 = 1 << 22;
    for var in 0..n {
        let restricted = scan.restrictions.iter().any(|row| row[var].is_some());
        if restricted && modulus <= LIST_LIMIT {
            let list: Vec<u64> = (0..modulus).filter(|&x| scan.allowed(var, x)).collect();
            scan.candidates[var] = Some(list);
        }
    }

    let mut first = Vec::new();
    scan.visit_var(0, |x| first.push(x));
    let parts: Vec<(u64, Vec<Vec<u64>>)> = first
        .par_iter()
        .map(|&x0| {
            let mut sums = vec![0u64; k];
            scan.step(0, &mut sums, x0);
            let mut prefix = vec![x0];
            let mut out = (0u64, Vec::new());
            scan.dfs(1, &mut sums, &mut prefix, &mut out);
            out
        })
        .collect();

    let count: u64 = parts.iter().map(|p| p.0).sum();
    let solutions = (count as usize <= SOLUTION_LIST_LIMIT).then(|| {
        parts
            .into_iter()
            .flat_map(|p| p.1)
            .map(|tuple| tuple.into_iter().map(BigInt::from).collect())
            .collect()
    });
    Ok(Enumeration {
        count: BigInt::from(count),
        modulus: lcm,
        solutions,
    })
}
