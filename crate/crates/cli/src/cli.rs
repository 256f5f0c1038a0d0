use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use lincong::{
    butson_stewart_count, crt_poly, crt_solve, enumerate_solutions, enumerate_solutions_ff, eta, euler_phi, factorize,
    lift_to_common_modulus, phi_poly, ramanujan_c, restricted_system_count, restricted_system_count_ff, system_count,
    system_count_ff, CountReport, GfPoly, PrimeField,
};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::dsl::{parse_system, Mode, SystemDocument};
use crate::json;

/// Default search-space cap for `enumerate` and `verify`.
pub const DEFAULT_CLI_CAP: u64 = 1_000_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lincong", version, about = "Count solutions of linear congruence systems over Z and F_p[t]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count solutions with the closed-form formula.
    Count { file: PathBuf },
    /// Count solutions by exhaustive search.
    Enumerate {
        file: PathBuf,
        /// Largest search space to scan.
        #[arg(long, default_value_t = DEFAULT_CLI_CAP)]
        cap: u64,
        /// Also print the solutions (up to 1000).
        #[arg(long)]
        list: bool,
    },
    /// Compare the formula, the Smith normal form count and the exhaustive search.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CLI_CAP)]
        cap: u64,
    },
    /// Ramanujan sum C_M(A).
    Ramanujan {
        m: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Polynomial Ramanujan sum eta(G, H) over GF(P).
    Eta {
        p: u64,
        #[arg(allow_hyphen_values = true)]
        g: String,
        #[arg(allow_hyphen_values = true)]
        h: String,
    },
    /// Euler totient of an integer, or of a polynomial with --gf P.
    Phi {
        #[arg(long, value_name = "P")]
        gf: Option<u64>,
        #[arg(allow_hyphen_values = true)]
        value: String,
    },
    /// Invariant factors of the lifted system and the Butson-Stewart count.
    Snf { file: PathBuf },
    /// Combine the right-hand sides into one residue modulo the lcm of the moduli.
    Crt { file: PathBuf },
}

enum Failure {
    Usage(String),
    Parse(String),
    Library(lincong::Error),
}

impl From<lincong::Error> for Failure {
    fn from(e: lincong::Error) -> Self {
        Failure::Library(e)
    }
}

type Output = Result<(Map<String, Value>, i32), Failure>;

/// Runs one command line (`args[0]` is the program name). JSON goes to
/// `stdout`, diagnostics to `stderr`; the return value is the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((out, code)) => {
            let _ = stdout.write_all(json::render(&out).as_bytes());
            if code == EXIT_MISMATCH {
                let _ = writeln!(stderr, "error: methods disagree");
            }
            code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Parse(rendered)) => {
            let _ = write!(stderr, "{rendered}");
            EXIT_USAGE
        }
        Err(Failure::Library(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_hypothesis() {
                EXIT_HYPOTHESIS
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn dispatch(command: Command) -> Output {
    match command {
        Command::Count { file } => count(&load(&file)?),
        Command::Enumerate { file, cap, list } => enumerate(&load(&file)?, cap, list),
        Command::Verify { file, cap } => verify(&load(&file)?, cap),
        Command::Ramanujan { m, a } => ramanujan(&m, &a),
        Command::Eta { p, g, h } => eta_command(p, &g, &h),
        Command::Phi { gf, value } => phi(gf, &value),
        Command::Snf { file } => snf(&load(&file)?),
        Command::Crt { file } => crt(&load(&file)?),
    }
}

fn load(path: &Path) -> Result<SystemDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_system(&text).map_err(|d| Failure::Parse(d.render(&path.display().to_string())))
}

fn describe(command: &str, doc: &SystemDocument) -> Map<String, Value> {
    let mut out = json::envelope(command);
    let mode = match doc.mode {
        Mode::Integer => "integer".to_string(),
        Mode::Polynomial(f) => f.to_string(),
    };
    out.insert("mode".into(), Value::String(mode));
    out.insert("variables".into(), json!(doc.variables()));
    out
}

fn formula(doc: &SystemDocument) -> lincong::Result<CountReport> {
    match doc.mode {
        Mode::Integer => {
            let (sys, r) = doc.integer_system()?;
            match r {
                Some(r) => restricted_system_count(&sys, &r),
                None => system_count(&sys),
            }
        }
        Mode::Polynomial(_) => {
            let (sys, r) = doc.poly_system()?;
            match r {
                Some(r) => restricted_system_count_ff(&sys, &r),
                None => system_count_ff(&sys),
            }
        }
    }
}

struct Scan {
    count: BigInt,
    modulus: String,
    solutions: Option<Vec<Vec<String>>>,
}

fn scan(doc: &SystemDocument, cap: u64) -> lincong::Result<Scan> {
    match doc.mode {
        Mode::Integer => {
            let (sys, r) = doc.integer_system()?;
            let e = enumerate_solutions(&sys, r.as_ref(), cap)?;
            Ok(Scan {
                count: e.count,
                modulus: e.modulus.to_string(),
                solutions: e
                    .solutions
                    .map(|s| s.iter().map(|x| x.iter().map(|v| v.to_string()).collect()).collect()),
            })
        }
        Mode::Polynomial(_) => {
            let (sys, r) = doc.poly_system()?;
            let e = enumerate_solutions_ff(&sys, r.as_ref(), cap)?;
            Ok(Scan {
                count: e.count,
                modulus: e.modulus.to_string(),
                solutions: e
                    .solutions
                    .map(|s| s.iter().map(|x| x.iter().map(|v| v.to_string()).collect()).collect()),
            })
        }
    }
}

fn count(doc: &SystemDocument) -> Output {
    let mut out = describe("count", doc);
    out.extend(json::report(&formula(doc)?));
    Ok((out, EXIT_OK))
}

fn enumerate(doc: &SystemDocument, cap: u64, list: bool) -> Output {
    let mut out = describe("enumerate", doc);
    let s = scan(doc, cap)?;
    out.insert("count".into(), json::int(&s.count));
    out.insert("modulus".into(), Value::String(s.modulus));
    out.insert("cap".into(), Value::String(cap.to_string()));
    if list {
        let solutions = match s.solutions {
            Some(rows) => json!(rows),
            None => {
                out.insert("note".into(), json!("too many solutions to list"));
                Value::Null
            }
        };
        out.insert("solutions".into(), solutions);
    }
    Ok((out, EXIT_OK))
}

fn skipped(reason: String) -> Value {
    json!({ "skipped": reason })
}

fn verify(doc: &SystemDocument, cap: u64) -> Output {
    let mut out = describe("verify", doc);
    let mut methods = Map::new();
    let mut counts: Vec<BigInt> = Vec::new();

    match formula(doc) {
        Ok(r) => {
            counts.push(r.count.clone());
            methods.insert("formula".into(), json!({ "theorem": r.method.tag(), "count": json::int(&r.count) }));
        }
        Err(e) if e.is_hypothesis() => {
            methods.insert("formula".into(), skipped(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    }

    let snf_entry = match doc.mode {
        Mode::Polynomial(_) => skipped("not available over F_p[t]".into()),
        Mode::Integer if !doc.restrictions.is_empty() => skipped("not available with gcd restrictions".into()),
        Mode::Integer => match butson_stewart_count(&doc.integer_system()?.0) {
            Ok(r) => {
                counts.push(r.count.clone());
                json!({ "count": json::int(&r.count) })
            }
            Err(e) if e.is_hypothesis() => skipped(e.to_string()),
            Err(e) => return Err(e.into()),
        },
    };
    methods.insert("snf".into(), snf_entry);

    match scan(doc, cap) {
        Ok(s) => {
            counts.push(s.count.clone());
            methods.insert("enumeration".into(), json!({ "count": json::int(&s.count), "modulus": s.modulus }));
        }
        Err(e @ lincong::Error::CapExceeded { .. }) => {
            methods.insert("enumeration".into(), skipped(format!("oracle skipped: {e}")));
        }
        Err(e) => return Err(e.into()),
    }

    let agree = counts.windows(2).all(|w| w[0] == w[1]);
    out.insert("methods".into(), Value::Object(methods));
    out.insert("compared".into(), json!(counts.len()));
    out.insert("agree".into(), json!(agree));
    let code = if !agree {
        EXIT_MISMATCH
    } else if counts.is_empty() {
        EXIT_HYPOTHESIS
    } else {
        EXIT_OK
    };
    Ok((out, code))
}

fn snf(doc: &SystemDocument) -> Output {
    if doc.mode != Mode::Integer {
        return Err(Failure::Usage("snf needs an integer system".into()));
    }
    let mut out = describe("snf", doc);
    let (sys, _) = doc.integer_system()?;
    let lifted = lift_to_common_modulus(&sys);
    let report = butson_stewart_count(&sys)?;
    out.insert(
        "lifted".into(),
        json!({
            "modulus": json::int(&lifted.modulus),
            "rows": lifted.matrix.iter().map(|r| json::ints(r)).collect::<Vec<_>>(),
            "rhs": json::ints(&lifted.rhs),
        }),
    );
    out.extend(json::report(&report));
    if !doc.restrictions.is_empty() {
        out.insert("note".into(), json!("gcd restrictions are ignored by snf"));
    }
    Ok((out, EXIT_OK))
}

fn crt(doc: &SystemDocument) -> Output {
    let mut out = describe("crt", doc);
    let (residue, modulus) = match doc.mode {
        Mode::Integer => {
            let (sys, _) = doc.integer_system()?;
            match crt_solve(sys.rhs(), sys.moduli())? {
                Some(s) => (json::int(&s.residue), json::int(&s.modulus)),
                None => (Value::Null, Value::Null),
            }
        }
        Mode::Polynomial(_) => {
            let (sys, _) = doc.poly_system()?;
            match crt_poly(sys.rhs(), sys.moduli())? {
                Some(s) => (json!(s.residue.to_string()), json!(s.modulus.to_string())),
                None => (Value::Null, Value::Null),
            }
        }
    };
    out.insert("solvable".into(), json!(!residue.is_null()));
    out.insert("residue".into(), residue);
    out.insert("modulus".into(), modulus);
    Ok((out, EXIT_OK))
}

fn integer_arg(name: &str, text: &str) -> Result<BigInt, Failure> {
    text.trim()
        .parse::<BigInt>()
        .map_err(|_| Failure::Usage(format!("{name} must be an integer, got '{text}'")))
}

fn ramanujan(m: &str, a: &str) -> Output {
    let m = integer_arg("M", m)?;
    let a = integer_arg("A", a)?;
    let value = ramanujan_c(&m, &a)?;
    let mut out = json::envelope("ramanujan");
    out.insert("m".into(), json::int(&m));
    out.insert("a".into(), json::int(&a));
    out.insert("value".into(), json::int(&value));
    Ok((out, EXIT_OK))
}

fn eta_command(p: u64, g: &str, h: &str) -> Output {
    let field = PrimeField::new(p)?;
    let g = GfPoly::parse(field, g)?;
    let h = GfPoly::parse(field, h)?;
    let value = eta(&g, &h)?;
    let mut out = json::envelope("eta");
    out.insert("field".into(), json!(field.to_string()));
    out.insert("g".into(), json!(g.to_string()));
    out.insert("h".into(), json!(h.to_string()));
    out.insert("value".into(), json::int(&value));
    Ok((out, EXIT_OK))
}

fn phi(gf: Option<u64>, value: &str) -> Output {
    let mut out = json::envelope("phi");
    let result = match gf {
        Some(p) => {
            let field = PrimeField::new(p)?;
            let h = GfPoly::parse(field, value)?;
            out.insert("field".into(), json!(field.to_string()));
            out.insert("argument".into(), json!(h.to_string()));
            phi_poly(&h)?
        }
        None => {
            let n = integer_arg("N", value)?;
            out.insert("argument".into(), json::int(&n));
            euler_phi(&factorize(&n)?)
        }
    };
    out.insert("value".into(), json::int(&result));
    Ok((out, EXIT_OK))
}
