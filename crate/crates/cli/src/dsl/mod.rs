//! Text format for congruence systems over `Z` and `F_p[t]`.
//!
//! ```text
//! # integer mode
//! mod 15: x1 + 2*x2 = 7
//! mod 14: 3*x1 + x2 = 9
//! gcd(x1, 15) = 5
//!
//! # polynomial mode is selected by a field header
//! field GF(3)
//! mod t^2: x1 + (1+t)*x2 = 3*t+1
//! gcd(x2, t^2) = t
//! ```

mod diagnostic;
mod lexer;
mod parser;

use std::fmt;

use lincong::{
    CongruenceSystem, GfPoly, PolyCongruenceSystem, PolyRestrictionTable, PrimeField, RestrictionTable,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use diagnostic::{Diagnostic, Severity, Span};
pub use parser::parse_system;

/// A value paired with its source location. Equality ignores the location,
/// so documents compare by content.
#[derive(Debug, Clone)]
pub struct Spanned<T> {
    pub value: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: Span) -> Self {
        Spanned { value, span }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T: Eq> Eq for Spanned<T> {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Integer,
    Polynomial(PrimeField),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(BigInt),
    Poly(GfPoly),
}

impl Value {
    pub fn as_int(&self) -> &BigInt {
        match self {
            Value::Int(v) => v,
            Value::Poly(_) => panic!("polynomial value in integer mode"),
        }
    }

    pub fn as_poly(&self) -> &GfPoly {
        match self {
            Value::Poly(v) => v,
            Value::Int(_) => panic!("integer value in polynomial mode"),
        }
    }

    fn is_one(&self) -> bool {
        match self {
            Value::Int(v) => v.is_one(),
            Value::Poly(v) => v.is_one(),
        }
    }

    /// Same ideal: equal integers, or polynomials equal up to a unit.
    fn same_modulus(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Poly(a), Value::Poly(b)) => a.to_monic() == b.to_monic(),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Poly(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coefficient: Spanned<Value>,
    pub variable: Spanned<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    pub modulus: Spanned<Value>,
    pub terms: Vec<Term>,
    pub rhs: Spanned<Value>,
}

/// `gcd(variable, modulus) = value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub variable: Spanned<String>,
    pub modulus: Spanned<Value>,
    pub value: Spanned<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemDocument {
    pub mode: Mode,
    pub congruences: Vec<Spanned<Congruence>>,
    pub restrictions: Vec<Spanned<Restriction>>,
}

/// Sort key for `x<digits>`: numeric index, then spelling (`x1` before `x01`
/// is arbitrary but fixed).
fn variable_key(name: &str) -> (BigInt, String) {
    let index = name[1..].parse::<BigInt>().unwrap_or_default();
    (index, name.to_string())
}

impl SystemDocument {
    /// Variables in index order; column `j` of the system is `variables()[j]`.
    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .congruences
            .iter()
            .flat_map(|c| c.value.terms.iter().map(|t| t.variable.value.clone()))
            .collect();
        vars.sort_by_key(|v| variable_key(v));
        vars.dedup();
        vars
    }

    pub fn field(&self) -> Option<PrimeField> {
        match self.mode {
            Mode::Integer => None,
            Mode::Polynomial(f) => Some(f),
        }
    }

    fn coefficient_rows(&self) -> Vec<Vec<Option<&Value>>> {
        let vars = self.variables();
        self.congruences
            .iter()
            .map(|c| {
                let mut row = vec![None; vars.len()];
                for t in &c.value.terms {
                    let j = vars.iter().position(|v| *v == t.variable.value).expect("collected");
                    row[j] = Some(&t.coefficient.value);
                }
                row
            })
            .collect()
    }

    /// Restriction cells `(row, column, value)`. A restriction names a modulus,
    /// and applies to every row declared with that modulus.
    fn restriction_cells(&self) -> Vec<(usize, usize, &Value)> {
        let vars = self.variables();
        let mut cells = Vec::new();
        for r in &self.restrictions {
            let j = vars.iter().position(|v| *v == r.value.variable.value).expect("validated");
            for (i, c) in self.congruences.iter().enumerate() {
                if c.value.modulus.value.same_modulus(&r.value.modulus.value) {
                    cells.push((i, j, &r.value.value.value));
                }
            }
        }
        cells
    }

    /// The integer system and, when the document has restrictions, a
    /// (possibly partial) restriction table.
    pub fn integer_system(&self) -> lincong::Result<(CongruenceSystem, Option<RestrictionTable>)> {
        assert_eq!(self.mode, Mode::Integer, "integer_system on a polynomial document");
        let coeffs = self
            .coefficient_rows()
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.map_or_else(BigInt::zero, |v| v.as_int().clone())).collect())
            .collect();
        let moduli = self.congruences.iter().map(|c| c.value.modulus.value.as_int().clone()).collect();
        let rhs = self.congruences.iter().map(|c| c.value.rhs.value.as_int().clone()).collect();
        let sys = CongruenceSystem::new(coeffs, moduli, rhs)?;
        if self.restrictions.is_empty() {
            return Ok((sys, None));
        }
        let mut table = RestrictionTable::unrestricted(sys.rows(), sys.vars());
        for (i, j, v) in self.restriction_cells() {
            table.set(i, j, v.as_int().clone());
        }
        Ok((sys, Some(table)))
    }

    pub fn poly_system(&self) -> lincong::Result<(PolyCongruenceSystem, Option<PolyRestrictionTable>)> {
        let field = self.field().expect("poly_system on an integer document");
        let coeffs = self
            .coefficient_rows()
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| v.map_or_else(|| GfPoly::zero(field), |v| v.as_poly().clone()))
                    .collect()
            })
            .collect();
        let moduli = self.congruences.iter().map(|c| c.value.modulus.value.as_poly().clone()).collect();
        let rhs = self.congruences.iter().map(|c| c.value.rhs.value.as_poly().clone()).collect();
        let sys = PolyCongruenceSystem::new(field, coeffs, moduli, rhs)?;
        if self.restrictions.is_empty() {
            return Ok((sys, None));
        }
        let mut table = PolyRestrictionTable::unrestricted(sys.rows(), sys.vars());
        for (i, j, v) in self.restriction_cells() {
            table.set(i, j, v.as_poly().to_monic());
        }
        Ok((sys, Some(table)))
    }
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: &Value, first: bool) -> fmt::Result {
    let (negative, text) = match c {
        Value::Int(v) if v.is_negative() => (true, (-v).to_string()),
        Value::Int(v) => (false, v.to_string()),
        Value::Poly(p) => {
            let s = p.to_string();
            // sums need parentheses to bind to the variable
            let multi = p.coeffs().iter().filter(|c| **c != 0).count() > 1;
            (false, if multi { format!("({s})") } else { s })
        }
    };
    match (first, negative) {
        (true, true) => f.write_str("-")?,
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
        (true, false) => {}
    }
    let unit = match c {
        Value::Int(v) => v.abs().is_one(),
        Value::Poly(_) => c.is_one(),
    };
    if !unit {
        write!(f, "{text}*")?;
    }
    Ok(())
}

/// Canonical text; parsing it gives back an equal document.
impl fmt::Display for SystemDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Mode::Polynomial(field) = self.mode {
            writeln!(f, "field GF({})", field.p())?;
        }
        for c in &self.congruences {
            let c = &c.value;
            write!(f, "mod {}: ", c.modulus.value)?;
            for (k, t) in c.terms.iter().enumerate() {
                write_coefficient(f, &t.coefficient.value, k == 0)?;
                f.write_str(&t.variable.value)?;
            }
            writeln!(f, " = {}", c.rhs.value)?;
        }
        for r in &self.restrictions {
            let r = &r.value;
            writeln!(f, "gcd({}, {}) = {}", r.variable.value, r.modulus.value, r.value.value)?;
        }
        Ok(())
    }
}
