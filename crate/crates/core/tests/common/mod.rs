//! Oracles and generators shared by the integration suites.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Mutex;

use lincong::ramanujan::{e_function, MultiIndex};
use lincong::{
    i_and_j_functions_ff, monic_divisors, CongruenceSystem, GfPoly, PolyCongruenceSystem, PolyRestrictionTable,
    PrimeField, RestrictionTable,
};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

fn poly_divrem(num: &[i128], den: &[i128]) -> (Vec<i128>, Vec<i128>) {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let mut quot = vec![0i128; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    rem.truncate(dd);
    (quot, rem)
}

static CYCLOTOMIC: Mutex<Option<HashMap<usize, Vec<i128>>>> = Mutex::new(None);

/// Integer coefficients of the cyclotomic polynomial of order `m`, lowest
/// degree first, from `x^m - 1 = prod_{d | m} Phi_d`.
pub fn cyclotomic(m: usize) -> Vec<i128> {
    if let Some(p) = CYCLOTOMIC.lock().unwrap().get_or_insert_with(HashMap::new).get(&m) {
        return p.clone();
    }
    let mut poly = vec![0i128; m + 1];
    poly[0] = -1;
    poly[m] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            let (q, r) = poly_divrem(&poly, &cyclotomic(d));
            assert!(r.iter().all(|&c| c == 0));
            poly = q;
        }
    }
    CYCLOTOMIC
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(m, poly.clone());
    poly
}

/// Exact value of `sum_k counts[k] zeta_m^k`, which must be rational; the
/// powers of `zeta_m` below `phi(m)` are linearly independent, so reducing
/// modulo the cyclotomic polynomial must leave a constant.
pub fn root_of_unity_sum(counts: &[i128]) -> i128 {
    let m = counts.len();
    let (_, rem) = poly_divrem(counts, &cyclotomic(m));
    assert!(rem.iter().skip(1).all(|&c| c == 0), "irrational root-of-unity sum");
    rem.first().copied().unwrap_or(0)
}

/// `C_m(a) = sum_{(j, m) = 1} e(j a / m)` evaluated exactly.
pub fn ramanujan_oracle(m: i64, a: i64) -> i128 {
    let mut counts = vec![0i128; m as usize];
    for j in 1..=m {
        if gcd(j, m) == 1 {
            counts[(j * a).rem_euclid(m) as usize] += 1;
        }
    }
    root_of_unity_sum(&counts)
}

/// `E(b; m_1..m_n) = (1/m) sum_j prod C_{m_i}(j) e(b j / m)` from the
/// definition, with the Ramanujan sums themselves taken from the oracle.
pub fn e_oracle(b: i64, moduli: &[i64], m: i64) -> i128 {
    let mut counts = vec![0i128; m as usize];
    let mut cache: HashMap<(i64, i64), i128> = HashMap::new();
    for j in 1..=m {
        let mut prod = 1i128;
        for &mi in moduli {
            let key = (mi, j % mi);
            let c = *cache.entry(key).or_insert_with(|| ramanujan_oracle(mi, j % mi));
            prod *= c;
        }
        counts[(b * j).rem_euclid(m) as usize] += prod;
    }
    let total = root_of_unity_sum(&counts);
    assert_eq!(total % m as i128, 0);
    total / m as i128
}

pub fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

pub fn poly(p: u64, c: &[i64]) -> GfPoly {
    GfPoly::from_i64(field(p), c)
}

pub fn random_poly(f: PrimeField, max_deg: usize, rng: &mut ChaCha8Rng) -> GfPoly {
    let len = rng.gen_range(0..=max_deg + 1);
    GfPoly::new(f, (0..len).map(|_| rng.gen_range(0..f.p())).collect())
}

pub fn random_monic(f: PrimeField, deg: usize, rng: &mut ChaCha8Rng) -> GfPoly {
    let mut c: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..f.p())).collect();
    c.push(1);
    GfPoly::new(f, c)
}

/// Every monic polynomial of exactly the given degree.
pub fn all_monic(f: PrimeField, deg: usize) -> Vec<GfPoly> {
    let count = f.p().pow(deg as u32);
    (0..count)
        .map(|i| {
            let mut c: Vec<u64> = GfPoly::from_index(f, i, deg).coeffs().to_vec();
            c.resize(deg, 0);
            c.push(1);
            GfPoly::new(f, c)
        })
        .collect()
}

/// Every residue of degree below `deg`.
pub fn residues(f: PrimeField, deg: usize) -> Vec<GfPoly> {
    (0..f.p().pow(deg as u32)).map(|i| GfPoly::from_index(f, i, deg)).collect()
}

pub fn divisors_i64(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Pairwise coprime moduli `>= 2` with product at most `max_product`.
pub fn coprime_moduli(k: usize, max_product: i64, rng: &mut ChaCha8Rng) -> Vec<i64> {
    loop {
        let mut out: Vec<i64> = Vec::with_capacity(k);
        let mut product = 1;
        for _ in 0..k {
            let room = max_product / product;
            if room < 2 {
                break;
            }
            let m = rng.gen_range(2..=room.min(60));
            if out.iter().all(|&x| gcd(x, m) == 1) {
                product *= m;
                out.push(m);
            }
        }
        if out.len() == k {
            return out;
        }
    }
}

/// Calls `f` on every tuple taking one element from each list.
pub fn for_each_tuple<T: Clone>(lists: &[Vec<T>], mut f: impl FnMut(&[T])) {
    let mut idx = vec![0usize; lists.len()];
    loop {
        let tuple: Vec<T> = idx.iter().zip(lists).map(|(&i, l)| l[i].clone()).collect();
        f(&tuple);
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `sum_{d_i | m_i} E(b; d_1..d_n)` with the ambient modulus fixed at `m`.
pub fn e_lattice_sum(b: i64, moduli: &[i64], m: i64) -> BigInt {
    let lists: Vec<Vec<i64>> = moduli.iter().map(|&x| divisors_i64(x)).collect();
    let mut total = BigInt::from(0);
    for_each_tuple(&lists, |ds| {
        total += e_function(&int(b), &MultiIndex::new(ints(ds), int(m)).unwrap()).unwrap();
    });
    total
}

/// `sum_{D_i | H_i} I(A; D_1..D_n)` with the ambient modulus fixed at `h`.
pub fn i_lattice_sum(a: &GfPoly, moduli: &[GfPoly], h: &GfPoly) -> BigInt {
    let lists: Vec<Vec<GfPoly>> = moduli.iter().map(|m| monic_divisors(m).unwrap()).collect();
    let mut total = BigInt::from(0);
    for_each_tuple(&lists, |ds| total += i_and_j_functions_ff(a, ds, h).unwrap().0);
    total
}

pub struct IntInstance {
    pub sys: CongruenceSystem,
    pub moduli: Vec<i64>,
    pub coeffs: Vec<Vec<i64>>,
    pub n: usize,
    /// Tuple used to build some of the right-hand sides.
    pub planted: Vec<i64>,
}

/// Random pairwise-coprime system with `m <= 300`, `n <= 3`, `k <= 2` and
/// `m^n <= 10^6`. Half of the right-hand sides come from a planted solution
/// so most instances are solvable.
pub fn random_int_instance(rng: &mut ChaCha8Rng) -> IntInstance {
    loop {
        let k = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=3);
        let moduli = coprime_moduli(k, 300, rng);
        let m: i64 = moduli.iter().product();
        if (m as f64).powi(n as i32) > 1e6 {
            continue;
        }
        let coeffs: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-50..50)).collect()).collect();
        let planted: Vec<i64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let rhs: Vec<i64> = (0..k)
            .map(|i| {
                if rng.gen_bool(0.5) {
                    coeffs[i].iter().zip(&planted).map(|(a, x)| a * x).sum::<i64>()
                } else {
                    rng.gen_range(0..moduli[i])
                }
            })
            .collect();
        let rows: Vec<&[i64]> = coeffs.iter().map(Vec::as_slice).collect();
        let sys = CongruenceSystem::from_i64(&rows, &moduli, &rhs).unwrap();
        return IntInstance {
            sys,
            moduli,
            coeffs,
            n,
            planted,
        };
    }
}

/// Restrictions read off the planted tuple, or drawn at random.
pub fn random_int_restrictions(inst: &IntInstance, rng: &mut ChaCha8Rng) -> RestrictionTable {
    let table: Vec<Vec<i64>> = inst
        .moduli
        .iter()
        .map(|&m| {
            (0..inst.n)
                .map(|j| {
                    if rng.gen_bool(0.6) {
                        gcd(inst.planted[j], m)
                    } else {
                        let d = divisors_i64(m);
                        d[rng.gen_range(0..d.len())]
                    }
                })
                .collect()
        })
        .collect();
    let rows: Vec<&[i64]> = table.iter().map(Vec::as_slice).collect();
    RestrictionTable::from_i64(&rows)
}

fn coprime_poly_moduli(f: PrimeField, k: usize, max_total: usize, rng: &mut ChaCha8Rng) -> Vec<GfPoly> {
    loop {
        let degs: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=max_total)).collect();
        if degs.iter().sum::<usize>() > max_total {
            continue;
        }
        let moduli: Vec<GfPoly> = degs
            .iter()
            .map(|&d| {
                let h = random_monic(f, d, rng);
                // occasionally non-monic, which must be handled up to units
                if rng.gen_bool(0.2) {
                    h.scale(f.p() - 1)
                } else {
                    h
                }
            })
            .collect();
        let coprime = (0..k).all(|i| (i + 1..k).all(|j| moduli[i].gcd(&moduli[j]).unwrap().is_one()));
        if coprime {
            return moduli;
        }
    }
}

/// Random coprime polynomial system over F_3 (total degree <= 4) or F_5
/// (total degree <= 3) with `n <= 2`, plus the planted tuple.
pub fn random_poly_instance(rng: &mut ChaCha8Rng) -> (PolyCongruenceSystem, Vec<GfPoly>) {
    let p = if rng.gen_bool(0.5) { 3 } else { 5 };
    let f = field(p);
    let max_total = if p == 3 { 4 } else { 3 };
    let k = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=2);
    let moduli = coprime_poly_moduli(f, k, max_total, rng);
    let total: usize = moduli.iter().map(|h| h.degree().unwrap()).sum();
    let coeffs: Vec<Vec<GfPoly>> = (0..k)
        .map(|_| (0..n).map(|_| random_poly(f, total, rng)).collect())
        .collect();
    let planted: Vec<GfPoly> = (0..n).map(|_| random_poly(f, total - 1, rng)).collect();
    let rhs: Vec<GfPoly> = (0..k)
        .map(|i| {
            if rng.gen_bool(0.6) {
                coeffs[i]
                    .iter()
                    .zip(&planted)
                    .fold(GfPoly::zero(f), |acc, (a, x)| &acc + &(a * x))
            } else {
                random_poly(f, total, rng)
            }
        })
        .collect();
    (PolyCongruenceSystem::new(f, coeffs, moduli, rhs).unwrap(), planted)
}

pub fn random_poly_restrictions(
    sys: &PolyCongruenceSystem,
    planted: &[GfPoly],
    rng: &mut ChaCha8Rng,
) -> PolyRestrictionTable {
    let entries = sys
        .moduli()
        .iter()
        .map(|h| {
            let divs = monic_divisors(h).unwrap();
            planted
                .iter()
                .map(|x| {
                    if rng.gen_bool(0.6) {
                        if x.is_zero() {
                            h.to_monic()
                        } else {
                            x.gcd(h).unwrap()
                        }
                    } else {
                        divs[rng.gen_range(0..divs.len())].clone()
                    }
                })
                .collect()
        })
        .collect();
    PolyRestrictionTable::new(entries)
}
