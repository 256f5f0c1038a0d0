//! Linear congruences over `F_p[t]`: additive characters and the polynomial
//! Ramanujan sum `eta`, CRT, solution counts with and without gcd
//! restrictions, the `I`/`J` inversion pair and an exhaustive oracle.
//!
//! Character values `e(c/p)` are never materialized; every sum reduces to an
//! integer divisor sum, and the direct oracle tallies exponent classes.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gfpoly::factor::{exponent_box, mobius_of_exponents, phi_of_exponents};
use crate::gfpoly::{factorize_poly, mobius_poly, monic_divisors, phi_poly, poly_gcd_all, GfPoly, PrimeField};
use crate::ramanujan::{exact_div, for_each_tuple};
use crate::report::{CountReport, Detail, DivisorTable, Method, TableRow};
use crate::congruence::SOLUTION_LIST_LIMIT;

/// Upper bound on `|H|` for the direct character-sum oracle.
pub const ETA_ORACLE_LIMIT: u64 = 100_000;

/// `k` congruences `A_i1 X_1 + .. + A_in X_n = B_i (mod H_i)` over `F_p[t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCongruenceSystem {
    field: PrimeField,
    coefficients: Vec<Vec<GfPoly>>,
    moduli: Vec<GfPoly>,
    rhs: Vec<GfPoly>,
}

fn require_field(field: PrimeField, p: &GfPoly) -> Result<()> {
    if p.field() == field {
        Ok(())
    } else {
        Err(Error::FieldMismatch(field.p(), p.field().p()))
    }
}

fn require_nonconstant(h: &GfPoly) -> Result<()> {
    match h.degree() {
        Some(d) if d >= 1 => Ok(()),
        _ => Err(Error::ConstantModulus(h.to_string())),
    }
}

impl PolyCongruenceSystem {
    pub fn new(
        field: PrimeField,
        coefficients: Vec<Vec<GfPoly>>,
        moduli: Vec<GfPoly>,
        rhs: Vec<GfPoly>,
    ) -> Result<Self> {
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
            for a in row {
                require_field(field, a)?;
            }
        }
        for h in &moduli {
            require_field(field, h)?;
            require_nonconstant(h)?;
        }
        for b in &rhs {
            require_field(field, b)?;
        }
        Ok(PolyCongruenceSystem {
            field,
            coefficients,
            moduli,
            rhs,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.moduli.len()
    }

    pub fn vars(&self) -> usize {
        self.coefficients[0].len()
    }

    pub fn coefficients(&self) -> &[Vec<GfPoly>] {
        &self.coefficients
    }

    pub fn moduli(&self) -> &[GfPoly] {
        &self.moduli
    }

    pub fn rhs(&self) -> &[GfPoly] {
        &self.rhs
    }

    fn require_coprime(&self) -> Result<()> {
        for i in 0..self.rows() {
            for j in i + 1..self.rows() {
                if !self.moduli[i].gcd(&self.moduli[j])?.is_one() {
                    return Err(Error::NotCoprime {
                        row_a: i,
                        row_b: j,
                        first: self.moduli[i].to_string(),
                        second: self.moduli[j].to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Monic product of the moduli.
    pub fn modulus_product(&self) -> GfPoly {
        self.moduli
            .iter()
            .fold(GfPoly::one(self.field), |acc, h| &acc * h)
            .to_monic()
    }

    /// Monic lcm of the moduli.
    pub fn modulus_lcm(&self) -> GfPoly {
        let mut acc = GfPoly::one(self.field);
        for h in &self.moduli {
            acc = acc.lcm(h).expect("moduli are nonzero");
        }
        acc
    }
}

/// Gcd restrictions `(X_j, H_i) = T_ij` with monic `T_ij`; missing entries
/// leave the pair unconstrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRestrictionTable {
    entries: Vec<Vec<Option<GfPoly>>>,
}

impl PolyRestrictionTable {
    /// Entries are normalized to their monic associates.
    pub fn new(entries: Vec<Vec<GfPoly>>) -> Self {
        Self::partial(
            entries
                .into_iter()
                .map(|row| row.into_iter().map(Some).collect())
                .collect(),
        )
    }

    pub fn partial(entries: Vec<Vec<Option<GfPoly>>>) -> Self {
        PolyRestrictionTable {
            entries: entries
                .into_iter()
                .map(|row| row.into_iter().map(|t| t.map(|t| t.to_monic())).collect())
                .collect(),
        }
    }

    pub fn unrestricted(rows: usize, vars: usize) -> Self {
        PolyRestrictionTable {
            entries: vec![vec![None; vars]; rows],
        }
    }

    pub fn get(&self, row: usize, var: usize) -> Option<&GfPoly> {
        self.entries.get(row)?.get(var)?.as_ref()
    }

    pub fn set(&mut self, row: usize, var: usize, value: GfPoly) {
        self.entries[row][var] = Some(value.to_monic());
    }

    pub fn entries(&self) -> &[Vec<Option<GfPoly>>] {
        &self.entries
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().flatten().all(Option::is_some)
    }

    pub fn validate(&self, sys: &PolyCongruenceSystem) -> Result<()> {
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
                require_field(sys.field, t)?;
                if t.is_zero() {
                    return Err(Error::ZeroPolynomial("restriction"));
                }
                if !t.divides(&sys.moduli[i]) {
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

    /// Every complete table agreeing with the specified entries.
    pub fn completions(&self, sys: &PolyCongruenceSystem) -> Result<Vec<PolyRestrictionTable>> {
        self.validate(sys)?;
        let divisor_lists = sys.moduli.iter().map(monic_divisors).collect::<Result<Vec<_>>>()?;
        let mut slots = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                if t.is_none() {
                    slots.push((i, j));
                }
            }
        }
        let choices: Vec<&[GfPoly]> = slots.iter().map(|(i, _)| divisor_lists[*i].as_slice()).collect();
        let mut out = Vec::new();
        for_each_tuple(&choices, |picked| {
            let mut table = self.clone();
            for ((i, j), t) in slots.iter().zip(picked) {
                table.entries[*i][*j] = Some((*t).clone());
            }
            out.push(table);
        });
        Ok(out)
    }
}

/// Exponent `c` of the additive character value `e(c/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterExponent(pub u64);

/// Coefficient of `t^(deg H - 1)` in `A mod H`.
pub fn tau(a: &GfPoly, h: &GfPoly) -> Result<u64> {
    require_nonconstant(h)?;
    let r = a.rem(h)?;
    Ok(r.coeff(h.degree().unwrap() - 1))
}

/// `tau(G A mod H)`, the exponent of `E(G, H)(A)`.
pub fn char_exponent(g: &GfPoly, h: &GfPoly, a: &GfPoly) -> Result<CharacterExponent> {
    Ok(CharacterExponent(tau(&(g * a), h)?))
}

/// `eta(G, H) = sum_{D | (G, H)} |D| mu(H/D)`, `H` taken up to units.
pub fn eta(g: &GfPoly, h: &GfPoly) -> Result<BigInt> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial("eta modulus"));
    }
    let fact = factorize_poly(h)?;
    let exps = fact.exponents();
    let caps = fact.capped_valuations(g);
    let mut total = BigInt::zero();
    for f in exponent_box(&caps) {
        let co: Vec<u32> = exps.iter().zip(&f).map(|(e, x)| e - x).collect();
        match mobius_of_exponents(&co) {
            0 => {}
            1 => total += fact.norm_of_exponents(&f),
            _ => total -= fact.norm_of_exponents(&f),
        }
    }
    Ok(total)
}

/// `phi(H) mu(N) / phi(N)` with `N = H / (G, H)`.
pub fn eta_closed(g: &GfPoly, h: &GfPoly) -> Result<BigInt> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial("eta modulus"));
    }
    let fact = factorize_poly(h)?;
    let exps = fact.exponents();
    let caps = fact.capped_valuations(g);
    let n_exps: Vec<u32> = exps.iter().zip(&caps).map(|(e, c)| e - c).collect();
    let mu = mobius_of_exponents(&n_exps);
    if mu == 0 {
        return Ok(BigInt::zero());
    }
    let num = phi_of_exponents(&fact, &exps) * mu;
    exact_div(&num, &phi_of_exponents(&fact, &n_exps), "eta closed form")
}

/// Tally of `char_exponent(G, H, A)` over the units `A` modulo `H`.
pub fn exponent_tally(g: &GfPoly, h: &GfPoly) -> Result<Vec<u64>> {
    require_nonconstant(h)?;
    let field = h.field();
    let size = h.norm();
    if size > BigInt::from(ETA_ORACLE_LIMIT) {
        return Err(Error::CapExceeded {
            space: size.to_string(),
            cap: ETA_ORACLE_LIMIT,
        });
    }
    let deg = h.degree().unwrap();
    let mut counts = vec![0u64; field.p() as usize];
    for i in 0..size.to_u64().unwrap() {
        let a = GfPoly::from_index(field, i, deg);
        if a.is_zero() || !a.gcd(h)?.is_one() {
            continue;
        }
        counts[char_exponent(g, h, &a)?.0 as usize] += 1;
    }
    Ok(counts)
}

/// Evaluates the defining character sum of `eta` by tallying exponents. A
/// rational sum forces equal counts on every nonzero exponent, so the value is
/// `n_0 - n_1`; anything else is reported as an error.
pub fn eta_direct_oracle(g: &GfPoly, h: &GfPoly) -> Result<BigInt> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial("eta modulus"));
    }
    if h.is_unit() {
        return Ok(BigInt::one());
    }
    let counts = exponent_tally(g, h)?;
    let nonzero = &counts[1..];
    if nonzero.iter().any(|c| *c != nonzero[0]) {
        return Err(Error::Equidistribution(format!("{counts:?}")));
    }
    Ok(BigInt::from(counts[0]) - BigInt::from(nonzero[0]))
}

/// Solution of `X = B_i (mod H_i)` reduced below the (monic) lcm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCrtSolution {
    pub residue: GfPoly,
    pub modulus: GfPoly,
}

/// CRT over `F_p[t]`. Non-coprime moduli are merged when compatible; `None`
/// means some pair disagrees modulo its gcd.
pub fn crt_poly(residues: &[GfPoly], moduli: &[GfPoly]) -> Result<Option<PolyCrtSolution>> {
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
    let field = moduli[0].field();
    for (r, h) in residues.iter().zip(moduli) {
        require_field(field, r)?;
        require_field(field, h)?;
        require_nonconstant(h)?;
    }
    let mut modulus = moduli[0].to_monic();
    let mut residue = residues[0].rem(&modulus)?;
    for (r, h) in residues.iter().zip(moduli).skip(1) {
        let h = h.to_monic();
        let (g, x, _) = modulus.ext_gcd(&h)?;
        let diff = r - &residue;
        let Some(scaled) = diff.exact_div(&g) else {
            return Ok(None);
        };
        let step = h.exact_div(&g).expect("gcd divides");
        let k = (&scaled * &x).rem(&step)?;
        residue = &residue + &(&modulus * &k);
        modulus = &modulus * &step;
        residue = residue.rem(&modulus)?;
    }
    Ok(Some(PolyCrtSolution { residue, modulus }))
}

/// Theorem-4 style count modulo `H = prod H_i` (pairwise coprime): solvable
/// iff `L_i | B_i` with `L_i = (A_i1, .., A_in, H_i)`, then
/// `|H|^(n-1) prod |L_i|` solutions.
pub fn system_count_ff(sys: &PolyCongruenceSystem) -> Result<CountReport> {
    sys.require_coprime()?;
    let h = sys.modulus_product();
    let mut ells = Vec::with_capacity(sys.rows());
    let mut solvable = true;
    for i in 0..sys.rows() {
        let mut row = sys.coefficients[i].clone();
        row.push(sys.moduli[i].clone());
        let ell = poly_gcd_all(&row)?;
        solvable &= ell.divides(&sys.rhs[i]);
        ells.push(ell);
    }
    let count = if solvable {
        Pow::pow(h.norm(), sys.vars() - 1) * ells.iter().map(GfPoly::norm).product::<BigInt>()
    } else {
        BigInt::zero()
    };
    Ok(CountReport::new(Method::CoprimeSystemPoly, count)
        .with("modulus", Detail::Text(h.to_string()))
        .with("ell", Detail::Texts(ells.iter().map(ToString::to_string).collect())))
}

/// Solutions of `A X = B (mod H)` with `(X, H) = T`: solvable iff
/// `T | (B, H)` and `(A, H/T) = (B/T, H/T)`, count `phi(H/T) / phi(H/(D T))`
/// with `D = (A, H/T)`.
pub fn single_restricted_count_ff(a: &GfPoly, b: &GfPoly, h: &GfPoly, t: &GfPoly) -> Result<CountReport> {
    let field = h.field();
    require_nonconstant(h)?;
    for x in [a, b, t] {
        require_field(field, x)?;
    }
    if t.is_zero() {
        return Err(Error::ZeroPolynomial("restriction"));
    }
    let t = t.to_monic();
    let h = h.to_monic();
    let unsolvable = |reason: &str| {
        CountReport::new(Method::SingleRestrictedPoly, BigInt::zero())
            .with("reason", Detail::Text(reason.to_string()))
    };
    let bh = b.gcd(&h)?;
    if !t.divides(&bh) {
        return Ok(unsolvable("restriction does not divide (B, H)"));
    }
    let reduced = h.exact_div(&t).expect("T divides H");
    let d = a.gcd(&reduced)?;
    let bt = b.exact_div(&t).expect("T divides B");
    if d != bt.gcd(&reduced)? {
        return Ok(unsolvable("(A, H/T) differs from (B/T, H/T)"));
    }
    let dt = &d * &t;
    let num = phi_poly(&reduced)?;
    let den = phi_poly(&h.exact_div(&dt).expect("DT divides H"))?;
    let count = exact_div(&num, &den, "totient ratio")?;
    Ok(CountReport::new(Method::SingleRestrictedPoly, count).with("d", Detail::Text(d.to_string())))
}

/// Rows `D | H` of `sum_D eta(B, D) prod_l eta(H/D, H/S_l)`.
fn eta_table(h: &GfPoly, b: &GfPoly, shifted: &[GfPoly]) -> Result<DivisorTable> {
    let mut columns = vec!["eta(B,D)".to_string()];
    let cofactors: Vec<GfPoly> = shifted
        .iter()
        .map(|s| h.exact_div(s).expect("restriction divides H"))
        .collect();
    columns.extend(cofactors.iter().map(|c| format!("eta(H/D,{c})")));
    let mut rows = Vec::new();
    for d in monic_divisors(h)? {
        let mut values = vec![eta(b, &d)?];
        let hd = h.exact_div(&d).expect("divisor");
        for c in &cofactors {
            values.push(eta(&hd, c)?);
        }
        let product = values.iter().product();
        rows.push(TableRow {
            divisor: d.to_string(),
            values,
            product,
        });
    }
    Ok(DivisorTable { columns, rows })
}

fn unit_coeffs_table(h: &GfPoly, b: &GfPoly, t: &[GfPoly]) -> Result<(BigInt, DivisorTable)> {
    require_nonconstant(h)?;
    let h = h.to_monic();
    let mut shifted = Vec::with_capacity(t.len());
    for ti in t {
        require_field(h.field(), ti)?;
        if ti.is_zero() || !ti.divides(&h) {
            return Err(Error::NotDivisor {
                what: "restriction must divide the modulus",
                divisor: ti.to_string(),
                value: h.to_string(),
            });
        }
        shifted.push(ti.to_monic());
    }
    let table = eta_table(&h, b, &shifted)?;
    let count = exact_div(&table.total(), &h.norm(), "eta divisor sum")?;
    if count.is_negative() {
        return Err(Error::Inexact(format!("negative count {count}")));
    }
    Ok((count, table))
}

/// Count of `X_1 + .. + X_k = B (mod H)` with `(X_i, H) = H_i`, from
/// `(1/|H|) sum_{D | H} eta(B, D) prod_i eta(H/D, H/H_i)`.
pub fn restricted_count_unit_coeffs_ff(h: &GfPoly, b: &GfPoly, t: &[GfPoly]) -> Result<CountReport> {
    let (count, table) = unit_coeffs_table(h, b, t)?;
    Ok(CountReport::new(Method::UnitCoefficientRestrictedPoly, count)
        .with("divisor_sum", Detail::Int(table.total()))
        .with("table", Detail::Table(table)))
}

/// Theorem-7 style count modulo `H = prod H_i` (pairwise coprime) with
/// `(X_j, H_i) = T_ij`:
/// `(1/|H|) prod_j phi(H/T_j)/phi(H/(T_j D_j)) sum_{D | H} eta(B, D) prod_l eta(H/D, H/(T_l D_l))`.
///
/// A table with missing entries is summed over all its completions.
pub fn restricted_system_count_ff(sys: &PolyCongruenceSystem, r: &PolyRestrictionTable) -> Result<CountReport> {
    sys.require_coprime()?;
    r.validate(sys)?;
    if r.is_complete() {
        return restricted_system_count_ff_complete(sys, r);
    }
    let completions = r.completions(sys)?;
    let mut total = BigInt::zero();
    for table in &completions {
        total += restricted_system_count_ff_complete(sys, table)?.count;
    }
    Ok(CountReport::new(Method::RestrictedSystemPoly, total)
        .with("modulus", Detail::Text(sys.modulus_product().to_string()))
        .with("completions", Detail::Int(BigInt::from(completions.len()))))
}

fn restricted_system_count_ff_complete(
    sys: &PolyCongruenceSystem,
    r: &PolyRestrictionTable,
) -> Result<CountReport> {
    let field = sys.field;
    let n = sys.vars();
    let h = sys.modulus_product();
    let b = crt_poly(&sys.rhs, &sys.moduli)?
        .expect("coprime moduli always admit a CRT solution")
        .residue;
    let mut t = vec![GfPoly::one(field); n];
    let mut d = vec![GfPoly::one(field); n];
    for i in 0..sys.rows() {
        for j in 0..n {
            let tij = r.get(i, j).expect("complete table");
            let quotient = sys.moduli[i].exact_div(tij).expect("validated");
            let dij = sys.coefficients[i][j].gcd(&quotient)?;
            t[j] = &t[j] * tij;
            d[j] = &d[j] * &dij;
        }
    }
    let mut ratio = BigInt::one();
    let mut shifted = Vec::with_capacity(n);
    for j in 0..n {
        let td = &t[j] * &d[j];
        let num = phi_poly(&h.exact_div(&t[j]).expect("T_j divides H"))?;
        let den = phi_poly(&h.exact_div(&td).expect("T_j D_j divides H"))?;
        ratio *= exact_div(&num, &den, "totient ratio")?;
        shifted.push(td);
    }
    let (unit_count, table) = unit_coeffs_table(&h, &b, &shifted)?;
    let count = &unit_count * &ratio;
    let show = |v: &[GfPoly]| Detail::Texts(v.iter().map(ToString::to_string).collect());
    Ok(CountReport::new(Method::RestrictedSystemPoly, count)
        .with("modulus", Detail::Text(h.to_string()))
        .with("b", Detail::Text(b.to_string()))
        .with("t", show(&t))
        .with("d", show(&d))
        .with("totient_ratio", Detail::Int(ratio))
        .with("unit_coefficient_count", Detail::Int(unit_count))
        .with("divisor_sum", Detail::Int(table.total()))
        .with("table", Detail::Table(table)))
}

fn j_value_ff(a: &GfPoly, moduli: &[GfPoly], ambient: &GfPoly) -> Result<BigInt> {
    let mut lcm = GfPoly::one(ambient.field());
    for h in moduli {
        lcm = lcm.lcm(h)?;
    }
    let quotient = ambient.exact_div(&lcm).ok_or_else(|| Error::NotDivisor {
        what: "lcm of moduli must divide the ambient modulus",
        divisor: lcm.to_string(),
        value: ambient.to_string(),
    })?;
    if quotient.divides(a) {
        let num: BigInt = moduli.iter().map(GfPoly::norm).product();
        Ok(num / lcm.norm())
    } else {
        Ok(BigInt::zero())
    }
}

/// `(I, J)` at `A`: `J = prod |H_i| / |[H_1, .., H_n]|` when
/// `H / [H_1, .., H_n]` divides `A`, else 0; `I` by Möbius inversion of
/// `sum_{D_i | H_i} I(A; D) = J(A; H)`.
pub fn i_and_j_functions_ff(a: &GfPoly, moduli: &[GfPoly], ambient: &GfPoly) -> Result<(BigInt, BigInt)> {
    if moduli.is_empty() {
        return Err(Error::Empty("modulus list"));
    }
    if ambient.is_zero() {
        return Err(Error::ZeroPolynomial("ambient modulus"));
    }
    let ambient = ambient.to_monic();
    for h in moduli {
        require_field(ambient.field(), h)?;
        if h.is_zero() {
            return Err(Error::ZeroPolynomial("modulus"));
        }
    }
    let j = j_value_ff(a, moduli, &ambient)?;
    let lists = moduli.iter().map(monic_divisors).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[GfPoly]> = lists.iter().map(Vec::as_slice).collect();
    let mut i_total = BigInt::zero();
    let mut failure = None;
    for_each_tuple(&refs, |ds| {
        if failure.is_some() {
            return;
        }
        let step = || -> Result<BigInt> {
            let mut sign = 1;
            for (h, d) in moduli.iter().zip(ds) {
                sign *= mobius_poly(&h.exact_div(d).expect("divisor"))?;
                if sign == 0 {
                    return Ok(BigInt::zero());
                }
            }
            let chosen: Vec<GfPoly> = ds.iter().map(|d| (*d).clone()).collect();
            Ok(j_value_ff(a, &chosen, &ambient)? * sign)
        };
        match step() {
            Ok(v) => i_total += v,
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((i_total, j))
}

/// `sum_{D | H} f(D) eta(G, H/D)`, the transform of an `H`-even function given
/// by its values on monic divisors.
pub fn even_dft_ff(h: &GfPoly, g: &GfPoly, mut f: impl FnMut(&GfPoly) -> BigInt) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for d in monic_divisors(h)? {
        let value = f(&d);
        if value.is_zero() {
            continue;
        }
        total += value * eta(g, &h.exact_div(&d).expect("divisor"))?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyEnumeration {
    pub count: BigInt,
    /// Monic lcm of the moduli; residues are taken below its degree.
    pub modulus: GfPoly,
    pub solutions: Option<Vec<Vec<GfPoly>>>,
}

impl PolyEnumeration {
    pub fn report(&self) -> CountReport {
        CountReport::new(Method::EnumerationPoly, self.count.clone())
            .with("modulus", Detail::Text(self.modulus.to_string()))
    }
}

struct PolyScan {
    p: u64,
    /// Degree of each `H_i`.
    widths: Vec<usize>,
    /// `contrib[j][x][i]`: coefficients of `A_ij X mod H_i` for residue index `x`.
    contrib: Vec<Vec<Vec<Vec<u64>>>>,
    targets: Vec<Vec<u64>>,
    allowed: Vec<Vec<u64>>,
}

impl PolyScan {
    fn add_into(&self, sums: &mut [Vec<u64>], var: usize, x: u64) {
        for (s, c) in sums.iter_mut().zip(&self.contrib[var][x as usize]) {
            for (a, b) in s.iter_mut().zip(c) {
                *a = (*a + b) % self.p;
            }
        }
    }

    /// Key of the residue vector the last variable must contribute.
    fn needed_key(&self, sums: &[Vec<u64>]) -> Vec<u64> {
        let mut key = Vec::with_capacity(sums.len());
        for (i, s) in sums.iter().enumerate() {
            let mut v = 0u64;
            for c in (0..self.widths[i]).rev() {
                let need = (self.targets[i][c] + self.p - s[c]) % self.p;
                v = v * self.p + need;
            }
            key.push(v);
        }
        key
    }

    fn key_of(&self, var: usize, x: u64) -> Vec<u64> {
        self.contrib[var][x as usize]
            .iter()
            .map(|c| c.iter().rev().fold(0u64, |v, d| v * self.p + d))
            .collect()
    }
}

fn coeff_vec(p: &GfPoly, width: usize) -> Vec<u64> {
    (0..width).map(|i| p.coeff(i)).collect()
}

/// Exhaustive scan of residue tuples modulo the lcm `H` of the moduli, in
/// base-`p` index order. Fails when `|H|^n > cap`.
pub fn enumerate_solutions_ff(
    sys: &PolyCongruenceSystem,
    restrictions: Option<&PolyRestrictionTable>,
    cap: u64,
) -> Result<PolyEnumeration> {
    if let Some(r) = restrictions {
        r.validate(sys)?;
    }
    let field = sys.field;
    let lcm = sys.modulus_lcm();
    let n = sys.vars();
    let k = sys.rows();
    let space = Pow::pow(lcm.norm(), n);
    if space > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            space: space.to_string(),
            cap,
        });
    }
    let size = lcm.norm().to_u64().unwrap();
    let deg = lcm.degree().unwrap();
    let widths: Vec<usize> = sys.moduli.iter().map(|h| h.degree().unwrap()).collect();

    let residue = |x: u64| GfPoly::from_index(field, x, deg);
    let allowed: Vec<Vec<u64>> = (0..n)
        .map(|j| {
            (0..size)
                .into_par_iter()
                .filter(|&x| {
                    let xp = residue(x);
                    (0..k).all(|i| match restrictions.and_then(|r| r.get(i, j)) {
                        None => true,
                        Some(t) => xp.gcd(&sys.moduli[i]).map(|g| &g == t).unwrap_or(false),
                    })
                })
                .collect()
        })
        .collect();
    let contrib: Vec<Vec<Vec<Vec<u64>>>> = (0..n)
        .map(|j| {
            (0..size)
                .into_par_iter()
                .map(|x| {
                    let xp = residue(x);
                    (0..k)
                        .map(|i| {
                            let v = (&sys.coefficients[i][j] * &xp).rem(&sys.moduli[i]).unwrap();
                            coeff_vec(&v, widths[i])
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let targets: Vec<Vec<u64>> = (0..k)
        .map(|i| coeff_vec(&sys.rhs[i].rem(&sys.moduli[i]).unwrap(), widths[i]))
        .collect();
    let scan = PolyScan {
        p: field.p(),
        widths: widths.clone(),
        contrib,
        targets,
        allowed,
    };

    // index the last variable by the residue vector it contributes
    let last = n - 1;
    let mut by_key: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
    for &x in &scan.allowed[last] {
        by_key.entry(scan.key_of(last, x)).or_default().push(x);
    }

    fn walk(
        scan: &PolyScan,
        by_key: &HashMap<Vec<u64>, Vec<u64>>,
        var: usize,
        sums: &mut Vec<Vec<u64>>,
        prefix: &mut Vec<u64>,
        out: &mut (u64, Vec<Vec<u64>>),
    ) {
        let last = scan.contrib.len() - 1;
        if var == last {
            if let Some(xs) = by_key.get(&scan.needed_key(sums)) {
                out.0 += xs.len() as u64;
                for &x in xs {
                    if out.1.len() > SOLUTION_LIST_LIMIT {
                        break;
                    }
                    let mut tuple = prefix.clone();
                    tuple.push(x);
                    out.1.push(tuple);
                }
            }
            return;
        }
        for &x in &scan.allowed[var] {
            let saved = sums.clone();
            scan.add_into(sums, var, x);
            prefix.push(x);
            walk(scan, by_key, var + 1, sums, prefix, out);
            prefix.pop();
            *sums = saved;
        }
    }

    let zero_sums: Vec<Vec<u64>> = widths.iter().map(|w| vec![0; *w]).collect();
    let parts: Vec<(u64, Vec<Vec<u64>>)> = if n == 1 {
        let mut out = (0, Vec::new());
        walk(&scan, &by_key, 0, &mut zero_sums.clone(), &mut Vec::new(), &mut out);
        vec![out]
    } else {
        scan.allowed[0]
            .par_iter()
            .map(|&x0| {
                let mut sums = zero_sums.clone();
                scan.add_into(&mut sums, 0, x0);
                let mut out = (0, Vec::new());
                walk(&scan, &by_key, 1, &mut sums, &mut vec![x0], &mut out);
                out
            })
            .collect()
    };
    let count: u64 = parts.iter().map(|p| p.0).sum();
    let solutions = (count as usize <= SOLUTION_LIST_LIMIT).then(|| {
        parts
            .into_iter()
            .flat_map(|p| p.1)
            .map(|tuple| tuple.into_iter().map(residue).collect())
            .collect()
    });
    Ok(PolyEnumeration {
        count: BigInt::from(count),
        modulus: lcm,
        solutions,
    })
}

/// Integer `|H|` of each polynomial; handy for reports.
pub fn norms(polys: &[GfPoly]) -> Vec<BigInt> {
    polys.iter().map(GfPoly::norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn poly(p: u64, c: &[i64]) -> GfPoly {
        GfPoly::from_i64(gf(p), c)
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn t4_system(q: u64, b: &[i64]) -> PolyCongruenceSystem {
        let f = gf(q);
        PolyCongruenceSystem::new(
            f,
            vec![vec![poly(q, &[0, 1]), poly(q, &[0, 0, 1])]],
            vec![poly(q, &[0, 0, 0, 0, 1])],
            vec![poly(q, b)],
        )
        .unwrap()
    }

    fn restricted_example(q: u64) -> (PolyCongruenceSystem, PolyRestrictionTable) {
        let sys = PolyCongruenceSystem::new(
            gf(q),
            vec![
                vec![poly(q, &[1]), poly(q, &[1, 1])],
                vec![poly(q, &[1]), poly(q, &[1])],
            ],
            vec![poly(q, &[0, 0, 1]), poly(q, &[1, 1])],
            vec![poly(q, &[1, 3]), poly(q, &[-2])],
        )
        .unwrap();
        let r = PolyRestrictionTable::new(vec![
            vec![poly(q, &[1]), poly(q, &[0, 1])],
            vec![poly(q, &[1]), poly(q, &[1])],
        ]);
        (sys, r)
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&poly(5, &[0, 2, 0, 1]), &poly(5, &[0, 0, 0, 0, 1])).unwrap(), 1);
        let h = poly(5, &[1, 2, 3]);
        assert_eq!(tau(&h, &h).unwrap(), 0);
        assert_eq!(tau(&poly(5, &[0, 1]), &poly(5, &[0, 0, 1])).unwrap(), 1);
        assert!(tau(&poly(5, &[1]), &poly(5, &[2])).is_err());
    }

    #[test]
    fn char_exponent_examples() {
        let h = poly(3, &[0, 1]);
        assert_eq!(char_exponent(&poly(3, &[1]), &h, &poly(3, &[2])).unwrap(), CharacterExponent(2));
        assert_eq!(char_exponent(&poly(3, &[]), &h, &poly(3, &[2])).unwrap(), CharacterExponent(0));
    }

    #[test]
    fn eta_examples() {
        for q in [3u64, 5, 7] {
            let g = poly(q, &[1, 3]);
            assert_eq!(eta(&g, &poly(q, &[0, 1])).unwrap(), int(-1));
            assert_eq!(eta(&g, &poly(q, &[0, 0, 1])).unwrap(), int(0));
            assert_eq!(eta(&g, &poly(q, &[0, 1, 1])).unwrap(), int(1));
            let h = poly(q, &[0, 0, 1, 1]);
            assert_eq!(eta(&poly(q, &[]), &h).unwrap(), phi_poly(&h).unwrap());
        }
        assert!(eta(&poly(3, &[1]), &poly(3, &[])).is_err());
    }

    #[test]
    fn eta_oracle_matches_on_worked_modulus() {
        let h = poly(3, &[0, 0, 1, 1]);
        for d in monic_divisors(&h).unwrap() {
            for i in 0..27 {
                let g = GfPoly::from_index(gf(3), i, 3);
                let expected = eta(&g, &d).unwrap();
                assert_eq!(eta_closed(&g, &d).unwrap(), expected);
                assert_eq!(eta_direct_oracle(&g, &d).unwrap(), expected, "g = {g}, h = {d}");
            }
        }
        // unit multiples of the modulus give the same value
        assert_eq!(eta_direct_oracle(&poly(3, &[1]), &poly(3, &[0, 0, 2, 2])).unwrap(), int(0));
        assert_eq!(eta(&poly(3, &[1]), &poly(3, &[0, 0, 2, 2])).unwrap(), int(0));
    }

    #[test]
    fn crt_examples() {
        for q in [3u64, 5, 7] {
            let s = crt_poly(&[poly(q, &[1, 3]), poly(q, &[-2])], &[poly(q, &[0, 0, 1]), poly(q, &[1, 1])])
                .unwrap()
                .unwrap();
            assert_eq!(s.residue, poly(q, &[1, 3]));
            assert_eq!(s.modulus, poly(q, &[0, 0, 1, 1]));
        }
        let s = crt_poly(&[poly(3, &[1]), poly(3, &[])], &[poly(3, &[0, 1]), poly(3, &[1, 1])])
            .unwrap()
            .unwrap();
        // scan of all residues below degree 2
        let hits: Vec<GfPoly> = (0..9)
            .map(|i| GfPoly::from_index(gf(3), i, 2))
            .filter(|x| x.rem(&poly(3, &[0, 1])).unwrap().is_one() && x.rem(&poly(3, &[1, 1])).unwrap().is_zero())
            .collect();
        assert_eq!(hits, vec![s.residue.clone()]);
        assert_eq!(s.residue, poly(3, &[1, 1]));
        let s = crt_poly(&[poly(5, &[1, 2, 3])], &[poly(5, &[0, 1])]).unwrap().unwrap();
        assert_eq!(s.residue, poly(5, &[1]));
        assert_eq!(
            crt_poly(&[poly(3, &[1]), poly(3, &[2])], &[poly(3, &[0, 1]), poly(3, &[0, 0, 1])]).unwrap(),
            None
        );
    }

    #[test]
    fn theorem_four_example() {
        for (q, expected) in [(3u64, 243), (5, 3125)] {
            let sys = t4_system(q, &[0, 2, 0, 1]);
            assert_eq!(system_count_ff(&sys).unwrap().count, int(expected));
        }
        let sys = t4_system(3, &[1]);
        assert_eq!(system_count_ff(&sys).unwrap().count, int(0));
        let e = enumerate_solutions_ff(&t4_system(3, &[0, 2, 0, 1]), None, 10_000).unwrap();
        assert_eq!(e.count, int(243));
        let sys = PolyCongruenceSystem::new(gf(3), vec![vec![poly(3, &[1])]], vec![poly(3, &[0, 1])], vec![poly(3, &[2])])
            .unwrap();
        assert_eq!(system_count_ff(&sys).unwrap().count, int(1));
    }

    #[test]
    fn single_restricted_examples() {
        let h = poly(3, &[0, 0, 1]);
        let t = poly(3, &[0, 1]);
        let r = single_restricted_count_ff(&poly(3, &[2]), &t, &h, &t).unwrap();
        assert_eq!(r.count, int(1));
        let b = poly(5, &[0, 3, 1]);
        let h = poly(5, &[0, 0, 1, 1]);
        let tb = b.gcd(&h).unwrap();
        assert_eq!(single_restricted_count_ff(&poly(5, &[1]), &b, &h, &tb).unwrap().count, int(1));
        let r = single_restricted_count_ff(&poly(5, &[1]), &poly(5, &[1]), &h, &poly(5, &[0, 1])).unwrap();
        assert_eq!(r.count, int(0));
        assert!(r.text("reason").is_some());
    }

    #[test]
    fn unit_coefficient_example() {
        for (q, expected) in [(3u64, 2), (5, 12), (7, 30)] {
            let h = poly(q, &[0, 0, 1, 1]);
            let r = restricted_count_unit_coeffs_ff(&h, &poly(q, &[1, 3]), &[poly(q, &[1]), poly(q, &[0, 1])]).unwrap();
            assert_eq!(r.count, int(expected));
        }
    }

    #[test]
    fn theorem_seven_example() {
        for q in [3u64, 5, 7] {
            let (sys, r) = restricted_example(q);
            let report = restricted_system_count_ff(&sys, &r).unwrap();
            let q = q as i64;
            assert_eq!(report.count, int((q - 1) * (q - 2)));
            let table = report.table().unwrap();
            assert_eq!(table.rows.len(), 6);
            let col = |d: &str| table.row(d).unwrap().product.clone();
            assert_eq!(col("1"), int(q * (q - 1).pow(4)));
            assert_eq!(col("t"), int(q * (q - 1).pow(3)));
            assert_eq!(col("t + 1"), int(-q * (q - 1).pow(2)));
            assert_eq!(col("t^2"), int(0));
            assert_eq!(col("t^2 + t"), int(-q * (q - 1)));
            assert_eq!(col("t^3 + t^2"), int(0));
        }
        let (sys, r) = restricted_example(3);
        let e = enumerate_solutions_ff(&sys, Some(&r), 1_000_000).unwrap();
        assert_eq!(e.count, int(2));
        assert!(e.solutions.unwrap().contains(&vec![poly(3, &[1, 2]), poly(3, &[0, 1])]));
    }

    #[test]
    fn i_and_j_small_cases() {
        let h = poly(3, &[0, 0, 1, 1]);
        let (i, j) = i_and_j_functions_ff(&poly(3, &[]), &[poly(3, &[1])], &h).unwrap();
        assert_eq!((i, j), (int(1), int(1)));
        // with H_1 = 1 the defining sum is the orthogonality sum, zero unless H | A
        let (i, j) = i_and_j_functions_ff(&poly(3, &[1]), &[poly(3, &[1])], &h).unwrap();
        assert_eq!((i, j), (int(0), int(0)));
        let moduli = [poly(3, &[0, 1]), poly(3, &[0, 0, 1])];
        let (_, j) = i_and_j_functions_ff(&poly(3, &[]), &moduli, &h).unwrap();
        assert_eq!(j, int(3));
        assert!(i_and_j_functions_ff(&poly(3, &[]), &[poly(3, &[0, 0, 0, 1])], &h).is_err());
    }

    #[test]
    fn enumeration_respects_cap_and_empty_restrictions() {
        let sys = t4_system(3, &[0, 2, 0, 1]);
        assert!(matches!(enumerate_solutions_ff(&sys, None, 100), Err(Error::CapExceeded { .. })));
        let empty = PolyRestrictionTable::unrestricted(1, 2);
        assert_eq!(enumerate_solutions_ff(&sys, Some(&empty), 10_000).unwrap().count, int(243));
    }

    #[test]
    fn partial_restriction_tables_sum_completions() {
        let (sys, _) = restricted_example(3);
        let mut r = PolyRestrictionTable::unrestricted(2, 2);
        r.set(0, 1, poly(3, &[0, 1]));
        let formula = restricted_system_count_ff(&sys, &r).unwrap();
        let oracle = enumerate_solutions_ff(&sys, Some(&r), 1_000_000).unwrap();
        assert_eq!(formula.count, oracle.count);
    }
}
