//! `ordsmith`: elementary divisors, equivalence and existence for matrices over maximal orders.
//!
//! Exit codes: 0 yes/success, 1 no, 2 inconclusive, 3 input error.

use clap::{Parser, Subcommand};
use ordsmith_core::algebra::AlgebraDescriptor;
use ordsmith_core::ideal::LeftIdeal;
use ordsmith_core::local::{self, Profile};
use ordsmith_core::modular::{self, ModularProfile, DEFAULT_COSET_BOUND};
use ordsmith_core::modules::DEFAULT_CANDIDATE_LIMIT;
use ordsmith_core::unimodular::{self, Existence};
use ordsmith_core::{forms, Algebra, Error, Int, Mat, MatrixFile, Place, PlaceKind};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ordsmith", version, about = "Matrices over maximal orders: elementary divisors, equivalence, existence")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Candidate limit for short-vector and basis searches.
    #[arg(long, global = true, env = "ORDSMITH_SEARCH_BOUND", default_value_t = DEFAULT_CANDIDATE_LIMIT)]
    search_bound: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local invariants at every place and the global elementary divisor ideals.
    Ed {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Local Smith form at one place, with the transforming words.
    SnfLocal {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        prime: i64,
        /// split-first, split-second, inert, ramified or split
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 1)]
        min_precision: u32,
    },
    /// Whether `U M V = M2` for unimodular `U`, `V`.
    Equiv {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        matrix2: PathBuf,
        #[arg(long)]
        witness: bool,
    },
    /// Build a matrix with the given local profile, or show why none exists.
    Construct {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Modular invariants of a similitude.
    ModularEd {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Whether `U M V = M2` for `U`, `V` in the symplectic group.
    ModularEquiv {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        matrix2: PathBuf,
        #[arg(long)]
        witness: bool,
    },
    /// Build a similitude of multiplier `m` with the given invariants, or show why none exists.
    ModularExists {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// Multiplier; overrides an `m` field in the profile file.
        #[arg(short, long)]
        m: Option<i64>,
    },
    /// Class group of a quadratic order.
    Class {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Right-coset representatives of a double coset (quadratic algebras).
    Cosets {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, required_unless_present = "matrix")]
        profile: Option<PathBuf>,
        #[arg(long, conflicts_with = "profile")]
        matrix: Option<PathBuf>,
        #[arg(short, long)]
        m: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_COSET_BOUND)]
        max_cosets: usize,
    },
    /// Check that the order basis is a maximal order.
    ValidateOrder {
        #[arg(long)]
        algebra: PathBuf,
    },
}

enum Failure {
    Input(String),
    Inconclusive(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconclusive(_) | Error::BoundExceeded(_) | Error::PrecisionExhausted(_) | Error::LiftFailure(_) => {
                Failure::Inconclusive(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Exit status and what to print.
struct Report {
    code: u8,
    value: Value,
    text: String,
}

impl Report {
    fn new(code: u8, value: Value, text: impl Into<String>) -> Self {
        Report { code, value, text: text.into() }
    }
}

type Outcome = Result<Report, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let raw = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{what} {}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| Failure::Input(format!("{what} {}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<Algebra, Failure> {
    let d: AlgebraDescriptor = read_json(path, "algebra")?;
    d.build().map_err(|e| Failure::Input(format!("algebra {}: {e}", path.display())))
}

fn load_matrix(alg: &Algebra, path: &Path) -> Result<(Mat, Option<Int>), Failure> {
    let f: MatrixFile = read_json(path, "matrix")?;
    let m = f.to_mat(alg).map_err(|e| Failure::Input(format!("matrix {}: {e}", path.display())))?;
    Ok((m, f.m))
}

fn load_similitude(alg: &Algebra, path: &Path) -> Result<Mat, Failure> {
    let (m, declared) = load_matrix(alg, path)?;
    let Some(mult) = modular::multiplier(alg, &m) else {
        return Err(Failure::Input(format!("matrix {}: entries: not a similitude", path.display())));
    };
    if let Some(d) = declared {
        if d != mult {
            return Err(Failure::Input(format!("matrix {}: m: declared {d} but the multiplier is {mult}", path.display())));
        }
    }
    Ok(m)
}

fn load_modular_profile(path: &Path, m: Option<i64>) -> Result<ModularProfile, Failure> {
    let raw: Value = read_json(path, "profile")?;
    let mult = match (m, raw.get("m")) {
        (Some(m), _) => Int::from(m),
        (None, Some(v)) => parse_int(v).ok_or_else(|| Failure::Input(format!("profile {}: m: expected an integer", path.display())))?,
        (None, None) => return Err(Failure::Input(format!("profile {}: m: missing; pass -m", path.display()))),
    };
    let profile: Profile =
        serde_json::from_value(raw).map_err(|e| Failure::Input(format!("profile {}: {e}", path.display())))?;
    Ok(ModularProfile { m: mult, profile })
}

/// Integers in input files are JSON numbers or decimal strings.
fn parse_int(v: &Value) -> Option<Int> {
    match v {
        Value::Number(n) => n.as_i64().map(Int::from).or_else(|| n.as_u64().map(Int::from)),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn parse_kind(s: &str) -> Result<PlaceKind, Failure> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| Failure::Input(format!("kind: `{s}` is not one of split-first, split-second, inert, ramified, split")))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn ideal_value(alg: &Algebra, i: &LeftIdeal) -> Value {
    let hnf: Vec<Vec<Value>> = i.basis.iter().map(|r| r.iter().map(int_value).collect()).collect();
    json!({ "hnf": hnf, "generators": i.format(alg) })
}

/// Same convention as the input files: a JSON number when it fits in `i64`, else a decimal string.
fn int_value(x: &Int) -> Value {
    i64::try_from(x).map(Value::from).unwrap_or_else(|_| Value::String(x.to_string()))
}

fn profile_text(p: &Profile) -> String {
    if p.places.is_empty() {
        return "all local invariants trivial".into();
    }
    p.places
        .iter()
        .map(|e| format!("{}: {}", e.place, serde_json::to_string(&e.invariants).expect("invariants serialize")))
        .collect::<Vec<_>>()
        .join("\n")
}

fn matrix_value(m: &Mat, mult: Option<&Int>) -> Value {
    let mut f = m.to_file();
    f.m = mult.cloned();
    to_value(&f)
}

fn ed(alg: &Algebra, m: &Mat) -> Outcome {
    let profile = local::local_profile(alg, m)?;
    let ideals = unimodular::ed_ideals(alg, &profile)?;
    let mut text = profile_text(&profile);
    for (i, e) in ideals.iter().enumerate() {
        text.push_str(&format!("\ne{} = {}", i + 1, e.format(alg)));
    }
    let value = json!({
        "profile": to_value(&profile),
        "ideals": ideals.iter().map(|i| ideal_value(alg, i)).collect::<Vec<_>>(),
    });
    Ok(Report::new(0, value, text))
}

fn equiv(alg: &Algebra, a: &Mat, b: &Mat, witness: bool, modular_case: bool) -> Outcome {
    let same = if modular_case {
        modular::modular_equivalent(alg, a, b)?
    } else {
        unimodular::unimodular_equivalent(alg, a, b)?
    };
    if !same {
        return Ok(Report::new(1, json!({ "equivalent": false }), "not equivalent"));
    }
    let mut value = json!({ "equivalent": true });
    let mut text = String::from("equivalent");
    if witness {
        let (u, v) = if modular_case {
            modular::recover_modular_transform(alg, a, b)?
        } else {
            unimodular::recover_transform(alg, a, b)?
        };
        if u.mul(alg, a).mul(alg, &v) != *b {
            return Err(Failure::Inconclusive("recovered transform does not verify".into()));
        }
        value["witness"] = json!({ "u": matrix_value(&u, None), "v": matrix_value(&v, None) });
        text.push_str(&format!("\nU = {}\nV = {}", u.format(alg), v.format(alg)));
    }
    Ok(Report::new(0, value, text))
}

fn existence(alg: &Algebra, out: Existence, mult: Option<&Int>) -> Outcome {
    Ok(match out {
        Existence::Yes(m) => Report::new(0, json!({ "exists": true, "matrix": matrix_value(&m, mult) }), m.format(alg)),
        Existence::No(f) => Report::new(
            1,
            json!({ "exists": false, "class": to_value(&f) }),
            format!("no: the product of the elementary divisors lies in the class of ({}, {}, {})", f.a, f.b, f.c),
        ),
        Existence::Inconclusive { candidates } => Report::new(
            2,
            json!({ "exists": Value::Null, "candidates": candidates }),
            format!("inconclusive after {candidates} candidates"),
        ),
    })
}

fn class(alg: &Algebra) -> Outcome {
    let g = forms::class_group(alg)?;
    let mut reps = Vec::new();
    let mut lines = vec![format!("class number {}", g.order())];
    for f in &g.forms {
        let i = forms::ideal_of_form(alg, f)?;
        lines.push(format!("({}, {}, {})  {}", f.a, f.b, f.c, i.format(alg)));
        reps.push(json!({ "form": to_value(f), "ideal": ideal_value(alg, &i) }));
    }
    let value = json!({ "order": g.order(), "discriminant": int_value(&g.discriminant), "representatives": reps });
    Ok(Report::new(0, value, lines.join("\n")))
}

fn cosets(alg: &Algebra, reps: Vec<Mat>) -> Outcome {
    let mult = reps.first().and_then(|r| modular::multiplier(alg, r));
    let text = std::iter::once(format!("{} right cosets", reps.len()))
        .chain(reps.iter().map(|r| r.format(alg)))
        .collect::<Vec<_>>()
        .join("\n");
    let value = json!({
        "count": reps.len(),
        "representatives": reps.iter().map(|r| matrix_value(r, mult.as_ref())).collect::<Vec<_>>(),
    });
    Ok(Report::new(0, value, text))
}

fn run(cli: &Cli) -> Outcome {
    let limit = cli.search_bound;
    if limit == 0 {
        return Err(Failure::Input("search bound must be positive".into()));
    }
    match &cli.command {
        Command::Ed { algebra, matrix } => {
            let alg = load_algebra(algebra)?;
            let (m, _) = load_matrix(&alg, matrix)?;
            ed(&alg, &m)
        }
        Command::SnfLocal { algebra, matrix, prime, kind, min_precision } => {
            let alg = load_algebra(algebra)?;
            let (m, _) = load_matrix(&alg, matrix)?;
            let place = Place::new(*prime, parse_kind(kind)?);
            let s = local::local_snf(&alg, &m, &place, *min_precision)?;
            let text = format!("{place}: {}", serde_json::to_string(&s.invariants).expect("invariants serialize"));
            Ok(Report::new(0, to_value(&s), text))
        }
        Command::Equiv { algebra, matrix, matrix2, witness } => {
            let alg = load_algebra(algebra)?;
            let (a, _) = load_matrix(&alg, matrix)?;
            let (b, _) = load_matrix(&alg, matrix2)?;
            equiv(&alg, &a, &b, *witness, false)
        }
        Command::Construct { algebra, profile } => {
            let alg = load_algebra(algebra)?;
            let p: Profile = read_json(profile, "profile")?;
            p.validate(&alg)?;
            existence(&alg, unimodular::exists_with_eds(&alg, &p, limit)?, None)
        }
        Command::ModularEd { algebra, matrix } => {
            let alg = load_algebra(algebra)?;
            let m = load_similitude(&alg, matrix)?;
            let mp = modular::modular_profile(&alg, &m)?;
            let text = format!("m = {}\n{}", mp.m, profile_text(&mp.profile));
            Ok(Report::new(0, to_value(&mp), text))
        }
        Command::ModularEquiv { algebra, matrix, matrix2, witness } => {
            let alg = load_algebra(algebra)?;
            let a = load_similitude(&alg, matrix)?;
            let b = load_similitude(&alg, matrix2)?;
            equiv(&alg, &a, &b, *witness, true)
        }
        Command::ModularExists { algebra, profile, m } => {
            let alg = load_algebra(algebra)?;
            let mp = load_modular_profile(profile, *m)?;
            mp.profile.validate(&alg)?;
            let mult = mp.m.clone();
            existence(&alg, modular::modular_exists_with_eds(&alg, &mp, limit)?, Some(&mult))
        }
        Command::Class { algebra } => class(&load_algebra(algebra)?),
        Command::Cosets { algebra, profile, matrix, m, max_cosets } => {
            let alg = load_algebra(algebra)?;
            let reps = match (profile, matrix) {
                (_, Some(path)) => modular::right_cosets_of(&alg, &load_similitude(&alg, path)?, *max_cosets)?,
                (Some(path), None) => {
                    let mp = load_modular_profile(path, *m)?;
                    mp.profile.validate(&alg)?;
                    modular::enumerate_right_cosets(&alg, &mp, *max_cosets)?
                }
                (None, None) => return Err(Failure::Input("pass --profile or --matrix".into())),
            };
            cosets(&alg, reps)
        }
        Command::ValidateOrder { algebra } => {
            let alg = load_algebra(algebra)?;
            let r = alg.validate_maximal_order();
            let ok = r.is_valid();
            let text = if ok {
                format!("maximal order, discriminant {}", r.discriminant)
            } else {
                format!("not maximal: {}", r.failures.join("; "))
            };
            Ok(Report::new(if ok { 0 } else { 1 }, to_value(&r), text))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&r.value).expect("report serializes"));
            } else {
                println!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(Failure::Inconclusive(msg)) => {
            if cli.json {
                println!("{}", json!({ "inconclusive": msg }));
            }
            eprintln!("ordsmith: inconclusive: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("ordsmith: {msg}");
            ExitCode::from(3)
        }
    }
}
