use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use etaforms_core::arith::prime_power;
use etaforms_core::cusps::{expansion_at_cusp, maingen_suite, CuspOrderReport, MaingenSuiteReport};
use etaforms_core::eisenstein::{verify_identities, IdentityReport, IdentityStatus};
use etaforms_core::search::{
    antiderivative, dual_pairs_prime_power, enumerate_eta_in_e, verify_corollary_lists, verify_second_derivatives,
    CorollaryReport, DualPairsReport, SecondDerivReport,
};
use etaforms_core::{Cusp, EisensteinElement, Error, EtaQuotient, QSeries};

const DEFAULT_LEVELS: [u64; 12] = [2, 4, 8, 16, 32, 3, 9, 27, 5, 25, 7, 49];
const DEFAULT_WEIGHTS: [u32; 3] = [2, 4, 6];

#[derive(Parser)]
#[command(name = "etaforms", version, about = "Eta quotients, Eisenstein series and their expansions at cusps")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Human-readable output (the default).
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// q-expansion of an eta quotient or an Eisenstein element.
    Expand {
        #[arg(long, conflicts_with = "element", required_unless_present = "element")]
        eta: Option<String>,
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        level: Option<u64>,
        /// Exclusive bound on the power of q.
        #[arg(long, default_value_t = 20)]
        prec: i64,
    },
    /// Orders of an eta quotient at the cusps and its modularity conditions.
    EtaOrder {
        #[arg(long)]
        eta: String,
        #[arg(long)]
        level: Option<u64>,
    },
    /// Expansion of an Eisenstein element at a cusp `a/c`.
    CuspExpand {
        #[arg(long)]
        element: String,
        #[arg(long)]
        level: Option<u64>,
        #[arg(long)]
        cusp: String,
        #[arg(long, default_value_t = 10)]
        prec: i64,
    },
    /// Eta quotients of a prime power level lying in the Eisenstein space.
    Search {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        level: u64,
    },
    /// Eta quotients whose derivative is an eta quotient.
    DualPairs {
        /// Antiderivative of one weight-2 quotient instead of the full list.
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        level: Option<u64>,
    },
    /// Level-4 eta quotients whose second derivative is an eta quotient.
    SecondDerivative,
    /// Verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Coefficients compared by the identity suite (at least twice the Sturm bound).
        #[arg(long)]
        prec: Option<i64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS)]
        levels: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_WEIGHTS)]
        weights: Vec<u32>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Corollaries,
    Maingen,
    SecondDerivative,
    All,
}

/// Output of a command: JSON, text, and whether it verified.
struct Report {
    json: Value,
    text: String,
    ok: bool,
}

fn usage(msg: String) -> Error {
    Error::Domain(msg)
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn series_json(s: &QSeries) -> Value {
    json!({ "scale": s.scale(), "prec": s.prec(), "terms": s.to_json_triples() })
}

fn expand(eta: Option<String>, element: Option<String>, level: Option<u64>, prec: i64) -> Result<Report, Error> {
    let (name, series) = match (eta, element) {
        (Some(s), _) => {
            let f = EtaQuotient::parse_with_level(&s, level)?;
            (f.to_string(), f.expansion(prec)?)
        }
        (None, Some(s)) => {
            let f = EisensteinElement::parse_with_level(&s, level)?;
            (f.to_string(), f.expansion(prec)?)
        }
        (None, None) => return Err(usage("expand needs --eta or --element".into())),
    };
    Ok(Report {
        json: json!({ "input": name, "series": series_json(&series) }),
        text: format!("{name} = {series}\n"),
        ok: true,
    })
}

fn eta_order(eta: &str, level: Option<u64>) -> Result<Report, Error> {
    let f = EtaQuotient::parse_with_level(eta, level)?;
    let m = f.modularity();
    let mut text = format!("{f}\nlevel {}, weight {}\n", f.level(), f.weight());
    for (c, o) in &m.order_map {
        let _ = writeln!(text, "  order at c = {c}: {o}");
    }
    for c in &m.conditions {
        let _ = writeln!(text, "  {}: {}", c.name, if c.satisfied { "yes" } else { "no" });
    }
    let _ = writeln!(text, "holomorphic modular form: {}", m.is_holomorphic_form());
    Ok(Report {
        json: json!({
            "eta": f,
            "weight": f.weight().to_string(),
            "modularity": m,
            "holomorphic_form": m.is_holomorphic_form(),
        }),
        text,
        ok: true,
    })
}

fn cusp_expand(element: &str, level: Option<u64>, cusp: &str, prec: i64) -> Result<Report, Error> {
    let f = EisensteinElement::parse_with_level(element, level)?;
    let cusp = Cusp::parse(cusp, f.level())?;
    let x = expansion_at_cusp(&f, &cusp, prec)?;
    let terms: Vec<Value> = x
        .series
        .terms()
        .map(|(e, c)| json!([e, c.canonical().to_string()]))
        .collect();
    let mut text = format!("{f} at {cusp} (width {}, zeta order {})\n", cusp.width(), x.cyclotomic_order);
    let order = match CuspOrderReport::from_expansion(&x) {
        Ok(r) => {
            let _ = writeln!(text, "order {} with leading coefficient {}", r.order, r.leading_coeff);
            Some(r)
        }
        Err(_) => {
            let _ = writeln!(text, "no nonzero coefficient below q^{prec}");
            None
        }
    };
    for (e, c) in x.series.terms() {
        let _ = writeln!(text, "  q^{e}: {}", c.canonical());
    }
    Ok(Report {
        json: json!({
            "element": f,
            "cusp": cusp.to_string(),
            "width": cusp.width(),
            "cyclotomic_order": x.cyclotomic_order,
            "prec": prec,
            "order": order,
            "terms": terms,
        }),
        ok: order.is_some(),
        text,
    })
}

fn search(weight: u32, level: u64) -> Result<Report, Error> {
    let (p, m) = prime_power(level)
        .filter(|&(p, _)| p > 1)
        .or((level == 1).then_some((2, 0)))
        .ok_or_else(|| usage(format!("level {level} is not a prime power")))?;
    let r = enumerate_eta_in_e(weight, p, m)?;
    let mut text = format!(
        "weight {weight}, level {level}: {} candidates, {} quotients\n",
        r.candidates,
        r.pairs.len()
    );
    for x in &r.pairs {
        let _ = writeln!(
            text,
            "  {} = {}{}",
            x.eta,
            x.eisenstein,
            if x.primitive { "" } else { "  (not primitive)" }
        );
    }
    Ok(Report {
        json: to_json(&r),
        text,
        ok: true,
    })
}

fn dual_pairs_text(r: &DualPairsReport) -> String {
    let mut text = format!("{} dual pairs, {} in the printed list\n", r.count, r.printed_matched);
    for e in &r.pairs {
        let _ = writeln!(
            text,
            "  D({}) = {}{}   [{}]",
            e.pair.f,
            if e.pair.scalar == 1 { String::new() } else { format!("{} * ", e.pair.scalar) },
            e.pair.g,
            if e.certified { format!("certified, {} steps", e.certified_steps) } else { "NOT certified".into() }
        );
    }
    text
}

fn dual_pairs(eta: Option<String>, level: Option<u64>) -> Result<Report, Error> {
    if let Some(s) = eta {
        let g = EtaQuotient::parse_with_level(&s, level)?;
        let pair = antiderivative(&g)?;
        let mismatch = pair.first_mismatch(100)?;
        let text = format!(
            "D({}) = {} * {}  ({})\n",
            pair.f,
            pair.scalar,
            pair.g,
            match &mismatch {
                None => "certified through 100 steps".to_string(),
                Some(e) => format!("differs at q^{e}"),
            }
        );
        return Ok(Report {
            json: json!({ "pair": pair, "certified": mismatch.is_none() }),
            text,
            ok: mismatch.is_none(),
        });
    }
    let r = dual_pairs_prime_power()?;
    Ok(Report {
        json: to_json(&r),
        text: dual_pairs_text(&r),
        ok: r.holds,
    })
}

fn second_text(r: &SecondDerivReport) -> String {
    let mut text = format!(
        "{} solutions, {} beyond z -> tz images; D^2(eta^2(2z)/eta^4(z)) = 4 eta^18(2z)/eta^12(z): {}\n",
        r.solutions.len(),
        r.beyond_rescaling,
        if r.known_identity_certified { "certified" } else { "NOT certified" }
    );
    for s in &r.solutions {
        let how = match &s.relation {
            Some(p) if p.is_empty() => "seed".to_string(),
            Some(p) => p.join(", "),
            None => "outside the symmetry orbit".to_string(),
        };
        let _ = writeln!(
            text,
            "  r = {:?}: D^2({}) = {} * {}   [{how}{}]",
            s.r,
            s.f,
            s.scalar,
            s.second_derivative,
            if s.certified { "" } else { "; NOT certified" }
        );
    }
    text
}

fn identities_text(rs: &[IdentityReport]) -> String {
    let mut text = String::new();
    for r in rs {
        let status = match r.status {
            IdentityStatus::Ok => "ok".to_string(),
            IdentityStatus::Mismatch => format!("MISMATCH at q^{}", r.first_mismatch.as_deref().unwrap_or("?")),
            IdentityStatus::AsymptoticOnly => format!(
                "asymptotic only, constant terms differ by {}",
                r.constant_term_discrepancy.as_deref().unwrap_or("?")
            ),
        };
        let _ = writeln!(text, "  {:<28} k={} N={:<3} through q^{}: {status}", r.identity, r.weight, r.level, r.prec);
    }
    text
}

fn corollaries_text(r: &CorollaryReport, d: &DualPairsReport) -> String {
    let mut text = String::new();
    for c in &r.counts {
        let _ = writeln!(text, "  k={} N={}: {} found, {} expected", c.k, c.level, c.found, c.expected);
    }
    let empty = r.excluded.iter().filter(|c| c.found == 0).count();
    let _ = writeln!(text, "  excluded (k, N): {empty}/{} empty", r.excluded.len());
    let _ = writeln!(
        text,
        "  weight 2: {} printed entries verbatim, {} verbatim and primitive; weight 4 exact: {}",
        r.weight2_verbatim, r.weight2_verbatim_primitive, r.weight4_exact
    );
    for x in &r.discrepancies {
        let _ = writeln!(text, "  discrepancy at level {}: {}", x.level, x.note);
    }
    text.push_str(&dual_pairs_text(d));
    text
}

fn maingen_text(r: &MaingenSuiteReport) -> String {
    let mut text = format!("seed {}\n", r.seed);
    for c in &r.cases {
        let _ = writeln!(
            text,
            "  k={} N={:<3} bound {:<3} max total {:<3} max order {} ({} of {} with a zero){}",
            c.weight,
            c.level,
            c.bound,
            c.max_total,
            c.max_order,
            c.with_zeros,
            c.samples,
            if c.counterexamples.is_empty() { String::new() } else { format!("  {} COUNTEREXAMPLES", c.counterexamples.len()) }
        );
    }
    text
}

fn verify(suite: Suite, prec: Option<i64>, seed: u64, samples: usize, levels: &[u64], weights: &[u32]) -> Result<Report, Error> {
    let run = |s: Suite| suite == s || suite == Suite::All;
    let mut json = serde_json::Map::new();
    let mut text = String::new();
    let mut ok = true;
    if run(Suite::Identities) {
        let rs = verify_identities(prec)?;
        let holds = rs.iter().all(|r| r.status != IdentityStatus::Mismatch);
        ok &= holds;
        let _ = writeln!(text, "identities: {}", if holds { "ok" } else { "FAILED" });
        text.push_str(&identities_text(&rs));
        json.insert("identities".into(), json!({ "holds": holds, "reports": rs }));
    }
    if run(Suite::Corollaries) {
        let r = verify_corollary_lists()?;
        let d = dual_pairs_prime_power()?;
        let holds = r.holds && d.holds;
        ok &= holds;
        let _ = writeln!(text, "corollaries: {}", if holds { "ok" } else { "FAILED" });
        text.push_str(&corollaries_text(&r, &d));
        json.insert("corollaries".into(), json!({ "holds": holds, "lists": r, "dual_pairs": d }));
    }
    if run(Suite::Maingen) {
        let r = maingen_suite(levels, weights, samples, seed)?;
        ok &= r.holds;
        let _ = writeln!(text, "maingen: {}", if r.holds { "ok" } else { "FAILED" });
        text.push_str(&maingen_text(&r));
        json.insert("maingen".into(), to_json(&r));
    }
    if run(Suite::SecondDerivative) {
        let r = verify_second_derivatives()?;
        ok &= r.holds;
        let _ = writeln!(
            text,
            "second-derivative: {}",
            if r.holds { "ok" } else { "FAILED (solutions beyond z -> tz images)" }
        );
        text.push_str(&second_text(&r));
        json.insert("second_derivative".into(), to_json(&r));
    }
    json.insert("holds".into(), Value::from(ok));
    Ok(Report {
        json: Value::Object(json),
        text,
        ok,
    })
}

fn run(cli: Cli) -> Result<Report, Error> {
    match cli.command {
        Command::Expand { eta, element, level, prec } => expand(eta, element, level, prec),
        Command::EtaOrder { eta, level } => eta_order(&eta, level),
        Command::CuspExpand { element, level, cusp, prec } => cusp_expand(&element, level, &cusp, prec),
        Command::Search { weight, level } => search(weight, level),
        Command::DualPairs { eta, level } => dual_pairs(eta, level),
        Command::SecondDerivative => {
            let r = verify_second_derivatives()?;
            Ok(Report {
                text: second_text(&r),
                json: to_json(&r),
                ok: r.all_certified,
            })
        }
        Command::Verify {
            suite,
            prec,
            seed,
            samples,
            levels,
            weights,
        } => verify(suite, prec, seed, samples, &levels, &weights),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_json = cli.json;
    match run(cli) {
        Ok(r) => {
            let out = if as_json {
                serde_json::to_string_pretty(&r.json).expect("json") + "\n"
            } else {
                r.text
            };
            // a closed pipe is not an error for a report printer
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("etaforms: {e}");
            match e {
                Error::PrecisionExhausted(_) | Error::DivisionByNonunit(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
