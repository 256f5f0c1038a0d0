//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//!
//! Counts are compared exactly. Each criterion also has a wall-clock budget.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use lincong::arith::{nary_gcd, nary_lcm};
use lincong::ramanujan::{j_function, MultiIndex};
use lincong::{
    butson_stewart_count, enumerate_solutions, enumerate_solutions_ff, eta, eta_closed, eta_direct_oracle,
    euler_phi, factorize, i_and_j_functions_ff, mobius, ramanujan_c, ramanujan_c_closed, restricted_system_count,
    restricted_system_count_ff, system_count, system_count_ff, GfPoly, DEFAULT_CAP,
};
use lincong_cli::{parse_system, run_cli};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn example(name: &str) -> String {
    crate_dir().join("examples").join(name).to_str().unwrap().to_string()
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["lincong"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut out, &mut err);
    if code != 0 {
        return Err(format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

/// Counts and table entries are JSON strings.
fn same(v: &Value, expected: impl std::fmt::Display) -> bool {
    v.as_str() == Some(expected.to_string().as_str())
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .map(|a| a.iter().map(|x| x.as_str().unwrap_or_default().to_string()).collect())
        .unwrap_or_default()
}

fn criterion_1() -> Check {
    let file = example("coprime_pair.lc");
    let count = cli(&["count", &file])?;
    ensure(count["count"] == "840", || format!("count gave {}", count["count"]))?;
    let scan = cli(&["enumerate", &file])?;
    ensure(scan["count"] == "840" && scan["modulus"] == "420", || format!("enumerate gave {scan}"))?;
    let snf = cli(&["snf", &file])?;
    let factors = strings(&snf["details"]["invariant_factors"]);
    ensure(factors == ["2", "840"], || format!("invariant factors {factors:?}"))?;
    ensure(snf["count"] == "840", || format!("snf count {}", snf["count"]))?;
    Ok("count 840, enumeration over Z_420^2 840, SNF (2, 840) -> 840".into())
}

fn criterion_2() -> Check {
    let file = example("three_moduli.lc");
    let count = cli(&["count", &file])?;
    ensure(count["count"] == "3110400", || format!("count gave {}", count["count"]))?;
    let snf = cli(&["snf", &file])?;
    let factors = strings(&snf["details"]["invariant_factors"]);
    ensure(factors == ["6", "720", "3600"], || format!("invariant factors {factors:?}"))?;
    ensure(snf["count"] == "3110400", || format!("snf count {}", snf["count"]))?;
    Ok("count 3110400, SNF (6, 720, 3600) -> 3110400; 720^3 oracle not run".into())
}

fn criterion_3() -> Check {
    // divisor, C_d(37), C_21(210/d), C_10(210/d), product
    const TABLE: [(i64, i64, i64, i64, i64); 16] = [
        (1, 1, 12, 4, 48),
        (2, -1, 12, -4, 48),
        (3, -1, -6, 4, 24),
        (5, -1, 12, -1, 12),
        (7, -1, -2, 4, 8),
        (6, 1, -6, -4, 24),
        (10, 1, 12, 1, 12),
        (14, 1, -2, -4, 8),
        (15, 1, -6, -1, 6),
        (21, 1, 1, 4, 4),
        (35, 1, -2, -1, 2),
        (30, -1, -6, 1, 6),
        (42, -1, 1, -4, 4),
        (70, -1, -2, 1, 2),
        (105, -1, 1, -1, 1),
        (210, 1, 1, 1, 1),
    ];
    let file = example("restricted_210.lc");
    let count = cli(&["count", &file])?;
    ensure(count["count"] == "1", || format!("count gave {}", count["count"]))?;
    let rows = count["details"]["table"]["rows"].as_array().cloned().unwrap_or_default();
    ensure(rows.len() == 16, || format!("{} table rows", rows.len()))?;
    let mut total = 0;
    for (d, c1, c2, c3, product) in TABLE {
        let row = rows
            .iter()
            .find(|r| same(&r["divisor"], d))
            .ok_or_else(|| format!("no row for d = {d}"))?;
        let values = strings(&row["values"]);
        let expected = [c1, c2, c3].map(|v| v.to_string());
        ensure(values == expected, || format!("d = {d}: {values:?} vs {expected:?}"))?;
        ensure(same(&row["product"], product), || format!("d = {d}: product {}", row["product"]))?;
        // the three factors are also checked against the root-of-unity oracle
        let oracle = [ramanujan_oracle(d, 37), ramanujan_oracle(21, 210 / d), ramanujan_oracle(10, 210 / d)];
        ensure(oracle == [c1 as i128, c2 as i128, c3 as i128], || format!("oracle disagrees at d = {d}"))?;
        total += product;
    }
    ensure(total == 210, || format!("products sum to {total}"))?;
    let crt = cli(&["crt", &file])?;
    ensure(crt["residue"] == "37" && crt["modulus"] == "210", || format!("crt gave {crt}"))?;
    let scan = cli(&["enumerate", &file, "--list"])?;
    ensure(scan["solutions"] == serde_json::json!([["10", "21"]]), || format!("enumerate gave {scan}"))?;
    Ok("count 1, 16 table rows summing to 210, b = 37 mod 210, unique solution (10, 21)".into())
}

fn criterion_4() -> Check {
    let mut parts = Vec::new();
    for (p, expected) in [(3u64, 243), (5, 3125)] {
        let file = example(&format!("poly_t4_gf{p}.lc"));
        let count = cli(&["count", &file])?;
        ensure(same(&count["count"], expected), || format!("q = {p}: count {}", count["count"]))?;
        parts.push(format!("q = {p}: {expected}"));
    }
    let scan = cli(&["enumerate", &example("poly_t4_gf3.lc")])?;
    ensure(scan["count"] == "243", || format!("enumeration gave {}", scan["count"]))?;
    Ok(format!("{}; enumeration of 6561 pairs at q = 3 agrees", parts.join(", ")))
}

fn criterion_5() -> Check {
    for q in [3i64, 5, 7] {
        let file = example(&format!("poly_restricted_gf{q}.lc"));
        let count = cli(&["count", &file])?;
        let expected = (q - 1) * (q - 2);
        ensure(same(&count["count"], expected), || format!("q = {q}: count {}", count["count"]))?;

        let rows = count["details"]["table"]["rows"].as_array().cloned().unwrap_or_default();
        ensure(rows.len() == 6, || format!("q = {q}: {} rows", rows.len()))?;
        let s = |v: i64| v.to_string();
        let r = q - 1;
        // divisor, first three values (None where the product is already 0), product
        let table: [(&str, Option<[i64; 3]>, i64); 6] = [
            ("1", Some([1, q * r * r, r * r]), q * r.pow(4)),
            ("t", Some([-1, -q * r, r * r]), q * r.pow(3)),
            ("t + 1", Some([-1, -q * r, -r]), -q * r * r),
            ("t^2", None, 0),
            ("t^2 + t", Some([1, q, -r]), -q * r),
            ("t^3 + t^2", None, 0),
        ];
        for (d, values, product) in table {
            let row = rows
                .iter()
                .find(|x| x["divisor"] == d)
                .ok_or_else(|| format!("q = {q}: no row {d}"))?;
            ensure(same(&row["product"], product), || format!("q = {q}, D = {d}: product {}", row["product"]))?;
            if let Some(v) = values {
                let got = strings(&row["values"]);
                ensure(got == v.map(s), || format!("q = {q}, D = {d}: values {got:?}"))?;
            } else {
                ensure(strings(&row["values"])[0] == "0", || format!("q = {q}, D = {d}: eta(B, D) not 0"))?;
            }
        }
        if q <= 5 {
            let scan = cli(&["enumerate", &file])?;
            ensure(same(&scan["count"], expected), || format!("q = {q}: enumeration {}", scan["count"]))?;
        }
    }
    Ok("counts 2, 12, 30; six table rows match at each q; enumeration agrees at q = 3, 5".into())
}

fn ramanujan_suite() -> Check {
    for m in 1..=300i64 {
        let mi = int(m);
        let f = factorize(&mi).map_err(|e| e.to_string())?;
        let c0 = ramanujan_c(&mi, &int(0)).unwrap();
        ensure(c0 == euler_phi(&f), || format!("C_{m}(0)"))?;
        ensure(ramanujan_c(&mi, &int(1)).unwrap() == BigInt::from(mobius(&f)), || format!("C_{m}(1)"))?;
        for a in 0..=m {
            let explicit = ramanujan_c(&mi, &int(a)).unwrap();
            ensure(explicit == ramanujan_c_closed(&mi, &int(a)).unwrap(), || format!("closed form C_{m}({a})"))?;
            ensure(explicit == ramanujan_c(&mi, &int(a.gcd(&m))).unwrap(), || format!("evenness C_{m}({a})"))?;
        }
    }
    Ok("m <= 300".into())
}

fn mi_suite(rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..250 {
        let n = rng.gen_range(1..=3);
        let moduli: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=20)).collect();
        let m = moduli.iter().fold(1i64, |acc, x| acc.lcm(x)) * rng.gen_range(1..=4);
        let b = rng.gen_range(0..400);
        let idx = MultiIndex::new(ints(&moduli), int(m)).unwrap();
        ensure(e_lattice_sum(b, &moduli, m) == j_function(&int(b), &idx), || {
            format!("E lattice at b = {b}, {moduli:?} mod {m}")
        })?;
    }
    let mut checked = 0;
    while checked < 250 {
        let p = if rng.gen_bool(0.5) { 3 } else { 5 };
        let f = field(p);
        let moduli: Vec<GfPoly> = (0..rng.gen_range(1..=3))
            .map(|_| random_monic(f, rng.gen_range(0..=2), rng))
            .collect();
        let lcm = moduli.iter().fold(GfPoly::one(f), |acc, x| acc.lcm(x).unwrap());
        let h = &lcm * &random_monic(f, rng.gen_range(0..=1), rng);
        let deg = h.degree().unwrap();
        if deg == 0 || deg > 4 {
            continue;
        }
        let a = random_poly(f, deg, rng);
        let (_, j) = i_and_j_functions_ff(&a, &moduli, &h).unwrap();
        ensure(i_lattice_sum(&a, &moduli, &h) == j, || format!("I lattice at A = {a}, H = {h}"))?;
        checked += 1;
    }
    Ok("250 integer and 250 polynomial lattices".into())
}

fn gcd_lcm_suite(rng: &mut ChaCha8Rng) -> Check {
    let mut checked = 0;
    while checked < 600 {
        let (m1, m2, m) = (rng.gen_range(1..5000i64), rng.gen_range(1..5000i64), rng.gen_range(1..5000i64));
        if m1.gcd(&m2) != 1 {
            continue;
        }
        ensure((m1 * m2).gcd(&m) == m1.gcd(&m) * m2.gcd(&m), || format!("gcd split {m1} {m2} {m}"))?;
        let lhs = int(m1 * m2).lcm(&int(m));
        ensure(lhs == int(m1).lcm(&int(m)) * int(m2).lcm(&int(m)) / int(m), || format!("lcm split {m1} {m2} {m}"))?;

        let a: Vec<i64> = (0..rng.gen_range(1..=5)).map(|_| rng.gen_range(1..100_000)).collect();
        let cofactors: Vec<BigInt> = a.iter().map(|&x| int(m / x.gcd(&m))).collect();
        let mut all = ints(&a);
        all.push(int(m));
        ensure(nary_lcm(&cofactors).unwrap() == int(m) / nary_gcd(&all).unwrap(), || format!("single modulus {m} {a:?}"))?;

        let moduli = coprime_moduli(rng.gen_range(1..=3), 10_000, rng);
        let n = rng.gen_range(1..=4);
        let coeffs: Vec<Vec<i64>> = moduli.iter().map(|_| (0..n).map(|_| rng.gen_range(-1000..1000)).collect()).collect();
        let total: i64 = moduli.iter().product();
        let columns: Vec<BigInt> = (0..n)
            .map(|j| int(total / moduli.iter().zip(&coeffs).map(|(mi, row)| row[j].gcd(mi)).product::<i64>()))
            .collect();
        let ell: i64 = moduli.iter().zip(&coeffs).map(|(mi, row)| row.iter().fold(*mi, |g, x| g.gcd(x))).product();
        ensure(nary_lcm(&columns).unwrap() == int(total / ell), || format!("coprime moduli {moduli:?}"))?;
        checked += 1;
    }
    Ok("600 instances of each identity".into())
}

fn eta_suite() -> Check {
    let f = field(3);
    let mut pairs = 0;
    for deg in 1..=4 {
        for h in all_monic(f, deg) {
            for g in residues(f, deg) {
                let v = eta(&g, &h).unwrap();
                ensure(eta_closed(&g, &h).unwrap() == v, || format!("closed form at G = {g}, H = {h}"))?;
                ensure(eta_direct_oracle(&g, &h).unwrap() == v, || format!("character sum at G = {g}, H = {h}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs over F_3"))
}

fn differential_suite(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..520 {
        let inst = random_int_instance(rng);
        let oracle = enumerate_solutions(&inst.sys, None, DEFAULT_CAP).unwrap().count;
        ensure(system_count(&inst.sys).unwrap().count == oracle, || format!("int case {case}: system count"))?;
        if let Ok(r) = butson_stewart_count(&inst.sys) {
            ensure(r.count == oracle, || format!("int case {case}: SNF count"))?;
        }
        let r = random_int_restrictions(&inst, rng);
        let restricted = enumerate_solutions(&inst.sys, Some(&r), DEFAULT_CAP).unwrap().count;
        ensure(restricted_system_count(&inst.sys, &r).unwrap().count == restricted, || {
            format!("int case {case}: restricted count")
        })?;
    }
    for case in 0..220 {
        let (sys, planted) = random_poly_instance(rng);
        let oracle = enumerate_solutions_ff(&sys, None, DEFAULT_CAP).unwrap().count;
        ensure(system_count_ff(&sys).unwrap().count == oracle, || format!("poly case {case}: system count"))?;
        let r = random_poly_restrictions(&sys, &planted, rng);
        let restricted = enumerate_solutions_ff(&sys, Some(&r), DEFAULT_CAP).unwrap().count;
        ensure(restricted_system_count_ff(&sys, &r).unwrap().count == restricted, || {
            format!("poly case {case}: restricted count")
        })?;
    }
    Ok("520 integer and 220 polynomial systems".into())
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let parts = [
        ("Ramanujan sums", ramanujan_suite()?),
        ("inversion identities", mi_suite(&mut rng)?),
        ("gcd/lcm lemmas", gcd_lcm_suite(&mut rng)?),
        ("eta three ways", eta_suite()?),
        ("formula vs oracle", differential_suite(&mut rng)?),
    ];
    Ok(parts.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join("; "))
}

fn criterion_7() -> Check {
    let mut files: Vec<PathBuf> = fs::read_dir(crate_dir().join("examples"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "lc"))
        .collect();
    files.sort();
    for path in &files {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let doc = parse_system(&text).map_err(|d| format!("{}: {d}", path.display()))?;
        let printed = doc.to_string();
        let again = parse_system(&printed).map_err(|d| format!("reparse {}: {d}", path.display()))?;
        ensure(again == doc && again.to_string() == printed, || format!("round trip {}", path.display()))?;
        let v = cli(&["verify", path.to_str().unwrap()])?;
        ensure(v["agree"] == true, || format!("verify {}", path.display()))?;
    }

    std::env::set_current_dir(crate_dir()).map_err(|e| e.to_string())?;
    let mut bad: Vec<PathBuf> = fs::read_dir("tests/golden/errors")
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "lc"))
        .collect();
    bad.sort();
    let mut positioned = 0;
    for input in &bad {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(["lincong", "count", input.to_str().unwrap()], &mut out, &mut err);
        let actual = format!("exit: {code}\n{}", String::from_utf8_lossy(&err));
        let golden = fs::read_to_string(input.with_extension("out")).map_err(|e| e.to_string())?;
        ensure(actual == golden, || format!("golden mismatch for {}", input.display()))?;
        if actual.contains(" --> ") {
            positioned += 1;
        }
    }
    Ok(format!(
        "{} examples parse, verify and round-trip; {} malformed inputs match golden diagnostics ({} positioned)",
        files.len(),
        bad.len(),
        positioned
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("coprime pair (12, 35)", criterion_1, Duration::from_secs(1)),
        ("three moduli (9, 16, 5)", criterion_2, Duration::from_secs(1)),
        ("restricted system modulo 210", criterion_3, Duration::from_secs(1)),
        ("polynomial system modulo t^4", criterion_4, Duration::from_secs(1)),
        ("restricted polynomial system", criterion_5, Duration::from_secs(5)),
        ("property suites", criterion_6, Duration::from_secs(60)),
        ("parser and examples", criterion_7, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {}: {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
