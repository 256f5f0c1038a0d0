//! Smith normal form over the integers and the Butson–Stewart count of a
//! congruence system lifted to a single modulus.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::arith::modulo;
use crate::congruence::CongruenceSystem;
use crate::error::{Error, Result};
use crate::report::{CountReport, Detail, Method};

pub type Matrix = Vec<Vec<BigInt>>;

/// `U * A * V = diag(e_1, .., e_r, 0, ..)` with `e_1 | e_2 | .. | e_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub u: Matrix,
    pub v: Matrix,
}

/// The system with every row multiplied by `m / m_i`, all rows now modulo
/// `m = lcm(m_1, .., m_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedSystem {
    pub matrix: Matrix,
    pub rhs: Vec<BigInt>,
    pub modulus: BigInt,
}

pub fn lift_to_common_modulus(sys: &CongruenceSystem) -> LiftedSystem {
    let modulus = sys.modulus_lcm();
    let mut matrix = Vec::with_capacity(sys.rows());
    let mut rhs = Vec::with_capacity(sys.rows());
    for i in 0..sys.rows() {
        let scale = &modulus / &sys.moduli()[i];
        matrix.push(sys.coefficients()[i].iter().map(|a| a * &scale).collect());
        rhs.push(&sys.rhs()[i] * &scale);
    }
    LiftedSystem { matrix, rhs, modulus }
}

fn identity(size: usize) -> Matrix {
    (0..size)
        .map(|i| (0..size).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn add_row_multiple(m: &mut Matrix, target: usize, source: usize, factor: &BigInt) {
    if factor.is_zero() {
        return;
    }
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(&src) {
        *t += factor * s;
    }
}

fn add_col_multiple(m: &mut Matrix, target: usize, source: usize, factor: &BigInt) {
    if factor.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let s = row[source].clone();
        row[target] += factor * s;
    }
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Smith normal form by elementary row and column operations, choosing the
/// entry of least absolute value as pivot.
pub fn smith_normal_form(matrix: &[Vec<BigInt>]) -> Result<SnfResult> {
    let k = matrix.len();
    if k == 0 {
        return Err(Error::Empty("matrix"));
    }
    let n = matrix[0].len();
    if let Some(row) = matrix.iter().find(|r| r.len() != n) {
        return Err(Error::LengthMismatch {
            what: "matrix row length",
            left: row.len(),
            right: n,
        });
    }
    let mut a: Matrix = matrix.to_vec();
    let mut u = identity(k);
    let mut v = identity(n);
    let mut t = 0;
    while t < k.min(n) {
        let Some((pi, pj)) = min_abs_entry(&a, t..k, t..n) else {
            break;
        };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            for i in t + 1..k {
                let q = a[i][t].div_floor(&a[t][t]);
                add_row_multiple(&mut a, i, t, &-&q);
                add_row_multiple(&mut u, i, t, &-&q);
            }
            for j in t + 1..n {
                let q = a[t][j].div_floor(&a[t][t]);
                add_col_multiple(&mut a, j, t, &-&q);
                add_col_multiple(&mut v, j, t, &-&q);
            }
            let col_left = (t + 1..k).any(|i| !a[i][t].is_zero());
            let row_left = (t + 1..n).any(|j| !a[t][j].is_zero());
            if col_left || row_left {
                // a remainder is smaller than the pivot; promote it
                if let Some((i, _)) = min_abs_entry(&a, t + 1..k, t..t + 1) {
                    if a[i][t].abs() < a[t][t].abs() {
                        a.swap(t, i);
                        u.swap(t, i);
                    }
                }
                if let Some((_, j)) = min_abs_entry(&a, t..t + 1, t + 1..n) {
                    if a[t][j].abs() < a[t][t].abs() {
                        swap_cols(&mut a, t, j);
                        swap_cols(&mut v, t, j);
                    }
                }
                continue;
            }
            let bad_row = (t + 1..k).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad_row {
                Some(i) => {
                    add_row_multiple(&mut a, t, i, &BigInt::one());
                    add_row_multiple(&mut u, t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        t += 1;
    }
    let invariant_factors = (0..t).map(|i| a[i][i].clone()).collect();
    Ok(SnfResult {
        invariant_factors,
        rank: t,
        u,
        v,
    })
}

fn min_abs_entry(
    a: &Matrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if a[i][j].is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[bi][bj].abs() <= a[i][j].abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Count in `Z_m^n` after lifting to `m = lcm(m_i)`: `m^(n-k) prod (e_i, m)`
/// when every diagonal row `e_i y_i = c_i` of `S y = U b` is solvable.
///
/// Restricted to `k <= n` with a lifted matrix of rank `k`.
pub fn butson_stewart_count(sys: &CongruenceSystem) -> Result<CountReport> {
    let lifted = lift_to_common_modulus(sys);
    let k = sys.rows();
    let n = sys.vars();
    if k > n {
        return Err(Error::UnsupportedShape(format!(
            "{k} congruences in {n} unknowns; need at most as many congruences as unknowns"
        )));
    }
    let snf = smith_normal_form(&lifted.matrix)?;
    if snf.rank < k {
        return Err(Error::UnsupportedShape(format!(
            "lifted matrix has rank {} < {k}",
            snf.rank
        )));
    }
    let m = &lifted.modulus;
    let transformed: Vec<BigInt> = snf
        .u
        .iter()
        .map(|row| modulo(&row.iter().zip(&lifted.rhs).map(|(x, y)| x * y).sum(), m))
        .collect();
    let gcds: Vec<BigInt> = snf.invariant_factors.iter().map(|e| e.gcd(m)).collect();
    let solvable = gcds.iter().zip(&transformed).all(|(g, c)| c.is_multiple_of(g));
    let count = if solvable {
        Pow::pow(m, (n - k) as u32) * gcds.iter().product::<BigInt>()
    } else {
        BigInt::zero()
    };
    Ok(CountReport::new(Method::ButsonStewart, count)
        .with("modulus", Detail::Int(m.clone()))
        .with("invariant_factors", Detail::Ints(snf.invariant_factors))
        .with("gcds", Detail::Ints(gcds))
        .with("transformed_rhs", Detail::Ints(transformed)))
}
