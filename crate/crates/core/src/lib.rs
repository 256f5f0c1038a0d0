//! Counting solutions of linear congruence systems, with and without gcd
//! restrictions on the unknowns, over the integers and over `F_p[t]`.

pub mod arith;
pub mod congruence;
pub mod congruence_ff;
pub mod error;
pub mod gfpoly;
pub mod ramanujan;
pub mod report;
pub mod snf;

pub use arith::{euler_phi, factorize, mobius, FactoredInteger};
pub use congruence::{
    crt_solve, enumerate_solutions, lehmer_count, restricted_system_count, single_restricted_count,
    system_count, CongruenceSystem, CrtSolution, Enumeration, RestrictionTable, DEFAULT_CAP,
};
pub use error::{Error, Result};
pub use ramanujan::{
    e_function, even_dft, j_function, ramanujan_c, ramanujan_c_closed, restricted_count_unit_coeffs,
    EvenFunctionTable, MultiIndex,
};
pub use report::{CountReport, Detail, DivisorTable, Method, TableRow};
pub use snf::{butson_stewart_count, lift_to_common_modulus, smith_normal_form, LiftedSystem, SnfResult};
pub use gfpoly::{
    factorize_poly, mobius_poly, monic_divisors, norm, phi_poly, poly_divmod, poly_gcd, poly_gcd_all, FactoredPolynomial,
    GfPoly, PrimeField,
};
pub use congruence_ff::{
    char_exponent, crt_poly, enumerate_solutions_ff, eta, eta_closed, eta_direct_oracle, even_dft_ff,
    i_and_j_functions_ff, restricted_count_unit_coeffs_ff, restricted_system_count_ff, single_restricted_count_ff,
    system_count_ff, tau, CharacterExponent, PolyCongruenceSystem, PolyCrtSolution, PolyEnumeration,
    PolyRestrictionTable,
};
