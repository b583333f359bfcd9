use clap::{Parser, Subcommand};
use h2sl2::arith::{Rational, SIntegerRing};
use h2sl2::bar::BarChain;
use h2sl2::matrix::Mat2;
use h2sl2::steinberg::{invariant_of_factors, simplify, Word, DEFAULT_BUDGET};
use h2sl2::structure::{
    certificate, certify, check_lambda_for, generators_with_bound, morita_table, steinberg_cross_check,
    structure, GeneratorCertificate, DEFAULT_LAMBDA, DEFAULT_SEARCH_BOUND,
};
use h2sl2::symbol::{decompose, invariant_of_generators, invariant_of_symbol, tame_symbol};
use h2sl2::tree::delta;
use h2sl2::Error;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "h2sl2", version, about = "Second homology of SL_2(Z[1/m]) with certified generators")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cyclic decomposition of H_2(SL_2(Z[1/m])) for 6 | m.
    Structure { m: u64 },
    /// Certified generators C(-1,-1) and C(u_q, q), one per summand.
    Generators {
        m: u64,
        #[arg(long)]
        lambda: Option<Rational>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compute classes even when 6 does not divide m (nothing is certified then).
        #[arg(long)]
        force: bool,
        /// Exponent bound for the unit search.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        bound: u32,
        /// Also evaluate every cycle through the Steinberg engine with this budget.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Checks a chain, a certificate, or a list of certificates read from JSON.
    VerifyCycle {
        file: PathBuf,
        /// Certify certificates against Z[1/m].
        #[arg(long)]
        m: Option<u64>,
    },
    /// The connecting map delta of a 2-cycle at a prime.
    Delta {
        file: PathBuf,
        #[arg(long)]
        prime: u64,
    },
    /// Sign and tame invariants of c(a, b).
    Invariants {
        #[arg(long, allow_hyphen_values = true)]
        a: Rational,
        #[arg(long, allow_hyphen_values = true)]
        b: Rational,
    },
    /// Tame symbol of (a, b) at p.
    Tame {
        #[arg(long, allow_hyphen_values = true)]
        a: Rational,
        #[arg(long, allow_hyphen_values = true)]
        b: Rational,
        #[arg(long)]
        prime: u64,
    },
    /// Writes c(a, b) as a product of symbols c(x, u) with v_p(x) = 1, v_p(u) = 0.
    Decompose {
        #[arg(long, allow_hyphen_values = true)]
        a: Rational,
        #[arg(long, allow_hyphen_values = true)]
        b: Rational,
        #[arg(long)]
        prime: u64,
    },
    /// Reduces a Steinberg word mapping to the identity to a product of symbols.
    Simplify {
        word: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// S-sets for which the Steinberg extension of SL_2(Z_S) is known to be universal.
    Morita,
}

enum Failure {
    Lib(Error),
    Io(String),
    Certification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Certification(_) => 3,
            Failure::Lib(Error::Timeout { .. }) => 4,
            Failure::Lib(Error::Unsound(_)) | Failure::Lib(Error::FactorTooLarge(_)) => 1,
            Failure::Lib(_) | Failure::Io(_) => 2,
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::Certification(msg) => eprintln!("certification failed: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn emit(json_mode: bool, value: &Value, text: impl FnOnce() -> String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
    } else {
        println!("{}", text());
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let s = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::Io(e.to_string()))
}

/// A chain file may hold a bare chain, a certificate, or the output of `generators`.
fn read_chains(path: &Path) -> Result<Vec<(String, BarChain<Mat2>)>, Failure> {
    let v = read_json(path)?;
    if let Some(cs) = v.get("certificates") {
        let certs: Vec<GeneratorCertificate> = parse(cs.clone())?;
        return Ok(certs.into_iter().map(|c| (c.name, c.cycle)).collect());
    }
    if v.get("cycle").is_some() {
        let c: GeneratorCertificate = parse(v)?;
        return Ok(vec![(c.name, c.cycle)]);
    }
    Ok(vec![("chain".into(), parse(v)?)])
}

fn run(cli: &Cli) -> CliResult {
    let js = cli.json;
    match &cli.cmd {
        Cmd::Structure { m } => {
            let s = structure(*m)?;
            emit(js, &serde_json::to_value(&s).unwrap(), || format!("H_2(SL_2(Z[1/{m}])) = {s}"));
        }
        Cmd::Generators {
            m,
            lambda,
            out,
            force,
            bound,
            budget,
        } => generators_cmd(js, *m, lambda.as_ref(), out.as_deref(), *force, *bound, *budget)?,
        Cmd::VerifyCycle { file, m } => verify_cmd(js, file, *m)?,
        Cmd::Delta { file, prime } => {
            let mut values = Vec::new();
            let mut lines = Vec::new();
            for (name, z) in read_chains(file)? {
                let d = delta(&z, *prime)?;
                values.push(json!({"name": name, "prime": prime, "value": d.value, "order": d.order()}));
                lines.push(format!("{name}: delta at {prime} = {} (order {})", d.value, d.order()));
            }
            let v = if values.len() == 1 { values.remove(0) } else { Value::Array(values) };
            emit(js, &v, || lines.join("\n"));
        }
        Cmd::Invariants { a, b } => {
            let inv = invariant_of_symbol(a, b)?;
            let v = json!({"sigma": inv.sigma, "tame": inv.tame, "order": inv.order()});
            emit(js, &v, || format!("c({a},{b}): {inv}, order {}", inv.order()));
        }
        Cmd::Tame { a, b, prime } => {
            let t = tame_symbol(a, b, *prime)?;
            let v = json!({"prime": prime, "value": t.value, "order": t.order()});
            emit(js, &v, || format!("tame_{prime}({a},{b}) = {} (order {})", t.value, t.order()));
        }
        Cmd::Decompose { a, b, prime } => {
            let gens = decompose(a, b, *prime)?;
            let total = invariant_of_generators(&gens)?;
            let direct = invariant_of_symbol(a, b)?;
            let v = json!({"factors": gens, "invariant": total, "matches": total == direct});
            emit(js, &v, || {
                let fs: Vec<String> = gens.iter().map(|g| format!("c({},{})^{}", g.x, g.u, g.exponent)).collect();
                format!("c({a},{b}) = {}\ninvariant {total} (direct {direct})", fs.join(" "))
            });
            if total != direct {
                return Err(Failure::Certification("decomposition invariant differs".into()));
            }
        }
        Cmd::Simplify { word, budget } => {
            let w: Word = word.parse()?;
            let factors = simplify(&w, *budget)?;
            let inv = invariant_of_factors(&factors)?;
            let v = json!({"factors": factors, "invariant": inv});
            emit(js, &v, || {
                let fs: Vec<String> = factors
                    .iter()
                    .map(|f| format!("c({},{})^{}", f.u, f.v, f.exponent))
                    .collect();
                let shown = if fs.is_empty() { "1".to_string() } else { fs.join(" ") };
                format!("{shown}\ninvariant {inv}")
            });
        }
        Cmd::Morita => {
            let t = morita_table();
            emit(js, &serde_json::to_value(&t).unwrap(), || {
                t.iter()
                    .map(|e| {
                        let uce = if e.universal_central_extension {
                            "universal central extension"
                        } else {
                            "K_2 isomorphism only"
                        };
                        format!("{:<16} {uce}", e.primes.to_string())
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
        }
    }
    Ok(())
}

fn generators_cmd(
    js: bool,
    m: u64,
    lambda: Option<&Rational>,
    out: Option<&Path>,
    force: bool,
    bound: u32,
    budget: Option<usize>,
) -> CliResult {
    let (value, ok) = if !m.is_multiple_of(6) && force {
        (forced_classes(m, lambda)?, true)
    } else {
        let set = generators_with_bound(m, lambda, bound)?;
        let mut cross = Vec::new();
        if let Some(b) = budget {
            for c in &set.certificates {
                cross.push(json!({"name": c.name, "agrees": steinberg_cross_check(c, b)?}));
            }
        }
        let cross_ok = cross.iter().all(|c| c["agrees"] == json!(true));
        let mut v = serde_json::to_value(&set).unwrap();
        if budget.is_some() {
            v["steinberg"] = Value::Array(cross);
        }
        (v, (set.all_certified() || set.decomposition) && cross_ok)
    };
    let text = serde_json::to_string_pretty(&value).unwrap();
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            if !js {
                println!("{}", summary(&value));
            }
        }
        None if js => println!("{text}"),
        None => println!("{}", summary(&value)),
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Certification(format!("not every generator of m = {m} certified")))
    }
}

fn tame_text(t: &Value) -> String {
    let mut entries: Vec<(u64, &str)> = t
        .as_object()
        .into_iter()
        .flatten()
        .filter_map(|(p, x)| Some((p.parse().ok()?, x.as_str()?)))
        .collect();
    entries.sort_unstable();
    let parts: Vec<String> = entries.iter().map(|(p, x)| format!("{p}:{x}")).collect();
    format!("{{{}}}", parts.join(" "))
}

fn summary(v: &Value) -> String {
    let mut lines = Vec::new();
    if let Some(note) = v.get("note").and_then(Value::as_str) {
        lines.push(note.to_string());
    }
    for c in v["certificates"].as_array().into_iter().flatten() {
        lines.push(format!(
            "{:<12} order {:<4} sigma {} tame {} certified {}",
            c["name"].as_str().unwrap_or("?"),
            c["order"].as_str().unwrap_or("?"),
            c["sigma"].as_str().unwrap_or("?"),
            tame_text(&c["tame"]),
            c["certified"]
        ));
    }
    for q in v["not_found"].as_array().into_iter().flatten() {
        lines.push(format!("no unit satisfying both conditions for q = {q}"));
    }
    for c in v["substitutes"].as_array().into_iter().flatten() {
        lines.push(format!(
            "substitute {:<12} order {:<4} tame {}",
            c["name"].as_str().unwrap_or("?"),
            c["order"].as_str().unwrap_or("?"),
            tame_text(&c["tame"])
        ));
    }
    if let Some(d) = v.get("decomposition") {
        lines.push(format!("family splits Z + sum F_q^*: {d}"));
    }
    lines.join("\n")
}

fn forced_classes(m: u64, lambda: Option<&Rational>) -> Result<Value, Failure> {
    let ring = SIntegerRing::new(m)?;
    // Without 2 and 3 inverted there may be no admissible lambda at all, so the cycles
    // are only required to live over Q here.
    let lambda = match lambda {
        Some(l) => {
            check_lambda_for(&ring, l)?;
            l.clone()
        }
        None => Rational::from_int(DEFAULT_LAMBDA),
    };
    let mut certs = vec![certificate(m, &Rational::from_int(-1), &Rational::from_int(-1), &lambda)?];
    let mut not_found = Vec::new();
    for &q in ring.primes.iter().filter(|&&q| q != 2) {
        match h2sl2::arith::find_su_primitive_root(&ring, q, DEFAULT_SEARCH_BOUND)? {
            Some(u) => certs.push(certificate(m, &Rational::from_bigint(u), &Rational::from_int(q as i64), &lambda)?),
            None => not_found.push(q),
        }
    }
    Ok(json!({
        "m": m,
        "note": "not certified by the structure theorem",
        "certificates": certs,
        "not_found": not_found,
    }))
}

fn verify_cmd(js: bool, file: &Path, m: Option<u64>) -> CliResult {
    let v = read_json(file)?;
    let certs: Vec<GeneratorCertificate> = if v.get("certificates").is_some() {
        parse(v["certificates"].clone())?
    } else if v.is_array() {
        parse(v)?
    } else if v.get("cycle").is_some() {
        vec![parse(v)?]
    } else {
        let z: BarChain<Mat2> = parse(v)?;
        let ok = z.is_cycle();
        emit(js, &json!({"degree": z.degree(), "terms": z.len(), "cycle": ok}), || {
            format!("degree {} chain with {} terms: {}", z.degree(), z.len(), if ok { "cycle" } else { "not a cycle" })
        });
        return if ok {
            Ok(())
        } else {
            Err(Failure::Certification("chain is not a cycle".into()))
        };
    };

    let mut all_ok = true;
    let mut reports = Vec::new();
    for c in &certs {
        match m {
            Some(m) => {
                let rep = certify(c, m);
                all_ok &= rep.passed();
                if !js {
                    print!("{rep}");
                }
                reports.push(serde_json::to_value(&rep).unwrap());
            }
            None => {
                let ok = c.cycle.is_cycle();
                all_ok &= ok;
                if !js {
                    println!("{}: {}", c.name, if ok { "cycle" } else { "not a cycle" });
                }
                reports.push(json!({"certificate": c.name, "cycle": ok}));
            }
        }
    }
    if js {
        println!("{}", serde_json::to_string_pretty(&Value::Array(reports)).unwrap());
    }
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Certification(format!("{} certificate(s) checked, some failed", certs.len())))
    }
}
