//! Solution-count reports shared by every counting routine.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Which counting method produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lehmer,
    CoprimeSystem,
    SingleRestricted,
    UnitCoefficientRestricted,
    RestrictedSystem,
    ButsonStewart,
    Enumeration,
    CoprimeSystemPoly,
    SingleRestrictedPoly,
    UnitCoefficientRestrictedPoly,
    RestrictedSystemPoly,
    EnumerationPoly,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Lehmer => "lehmer",
            Method::CoprimeSystem => "coprime-system",
            Method::SingleRestricted => "single-restricted",
            Method::UnitCoefficientRestricted => "unit-coefficient-restricted",
            Method::RestrictedSystem => "restricted-system",
            Method::ButsonStewart => "butson-stewart",
            Method::Enumeration => "enumeration",
            Method::CoprimeSystemPoly => "coprime-system-poly",
            Method::SingleRestrictedPoly => "single-restricted-poly",
            Method::UnitCoefficientRestrictedPoly => "unit-coefficient-restricted-poly",
            Method::RestrictedSystemPoly => "restricted-system-poly",
            Method::EnumerationPoly => "enumeration-poly",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One row of a divisor-sum table: the summation divisor (printed), the
/// per-column factors, and their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub divisor: String,
    pub values: Vec<BigInt>,
    pub product: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTable {
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl DivisorTable {
    pub fn total(&self) -> BigInt {
        self.rows.iter().map(|r| &r.product).sum()
    }

    pub fn row(&self, divisor: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.divisor == divisor)
    }
}

/// A named intermediate quantity attached to a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detail {
    Int(BigInt),
    Ints(Vec<BigInt>),
    Text(String),
    Texts(Vec<String>),
    Flag(bool),
    Table(DivisorTable),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub count: BigInt,
    pub solvable: bool,
    pub method: Method,
    /// Intermediates in insertion order.
    pub details: Vec<(String, Detail)>,
}

impl CountReport {
    pub fn new(method: Method, count: BigInt) -> Self {
        debug_assert!(!count.is_negative());
        CountReport {
            solvable: !count.is_zero(),
            count,
            method,
            details: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, detail: Detail) -> Self {
        self.push(name, detail);
        self
    }

    pub fn push(&mut self, name: &str, detail: Detail) {
        self.details.push((name.to_string(), detail));
    }

    pub fn detail(&self, name: &str) -> Option<&Detail> {
        self.details
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
    }

    pub fn int(&self, name: &str) -> Option<&BigInt> {
        match self.detail(name)? {
            Detail::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn ints(&self, name: &str) -> Option<&[BigInt]> {
        match self.detail(name)? {
            Detail::Ints(v) => Some(v),
            _ => None,
        }
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        match self.detail(name)? {
            Detail::Text(v) => Some(v),
            _ => None,
        }
    }

    pub fn table(&self) -> Option<&DivisorTable> {
        self.details.iter().find_map(|(_, v)| match v {
            Detail::Table(t) => Some(t),
            _ => None,
        })
    }
}
