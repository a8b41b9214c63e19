use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use permmut::findim::{BracketMode, FiniteAlgebra, Vector, Witness};
use permmut::identities::{
    degree3_matrix, new_identities, MagmaticBasis, DEFAULT_DEGREE_LIMIT, MAX_DEGREE_LIMIT,
};
use permmut::linalg::rank;
use permmut::mutation::{expand_generic, verify_basis_b};
use permmut::speciality::{cohn_check, cohn_instance, Verdict};
use permmut::terms::{BracketPolynomial, IdentityTemplate, NodeKind};
use permmut::verify::{criteria, run_criterion, Status, VerifyOptions};

#[derive(Parser)]
#[command(name = "permmut", version, about = "Exact computations with mutations of perm algebras")]
struct Cli {
    /// Output as readable text or as one JSON record.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 2024, global = true)]
    seed: u64,
    /// Random samples per randomized check.
    #[arg(long, default_value_t = 100, global = true)]
    samples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Record,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a bracket polynomial in the free perm algebra on x1, x2, ..., p, q.
    Expand { expr: String },
    /// Compare the identities of a degree with the consequences of known ones.
    Identities {
        #[arg(long)]
        degree: usize,
        /// Comma-separated template names (f, ftilde, wa, flex, hbar, ibar,
        /// conj4a, conj4b).
        #[arg(long, value_delimiter = ',')]
        known: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_DEGREE_LIMIT)]
        limit: usize,
        /// Also print the degree-3 matrix of f and WA in the preset column order.
        #[arg(long)]
        paper_order: bool,
        /// Number of new identities to print.
        #[arg(long, default_value_t = 5)]
        show: usize,
    },
    /// Decide membership of a target in the mutation ideal and the perm ideal.
    Cohn {
        #[arg(long = "generator")]
        generators: Vec<String>,
        #[arg(long)]
        target: Option<String>,
    },
    /// Check identities of an algebra given by structure constants.
    Findim {
        /// Algebra file; the bundled three-dimensional example when absent.
        file: Option<PathBuf>,
        /// Comma-separated checks: template names, `criterion`, `jacobi`,
        /// `mutate`, or `expr:<polynomial>`.
        #[arg(long, value_delimiter = ',', default_value = "f,wa")]
        check: Vec<String>,
        /// Read brackets as the mutation at p and q (e.g. "e1 - e3").
        #[arg(long, requires = "q")]
        p: Option<String>,
        #[arg(long, requires = "p")]
        q: Option<String>,
    },
    /// Run the twelve reproduction criteria.
    VerifyPaper {
        #[arg(long, default_value_t = DEFAULT_DEGREE_LIMIT)]
        limit: usize,
        /// Last degree of the conjecture scan; 6 takes minutes and needs --limit 6.
        #[arg(long, default_value_t = 5)]
        scan_to: usize,
        /// Extra polynomial required to vanish under expansion.
        #[arg(long = "extra-identity")]
        extra: Vec<String>,
    },
    /// Verify the basis B of the mutation subalgebra.
    Basis {
        #[arg(long)]
        vars: u32,
        #[arg(long)]
        degree: u32,
    },
}

/// Bad input; exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Output {
    inputs: Value,
    results: Value,
    text: String,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Vec<String> = std::env::args().collect();
    let start = Instant::now();
    let out = match run(&cli) {
        Ok(out) => out,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let elapsed = start.elapsed();
    match cli.format {
        Format::Text => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
        }
        Format::Record => {
            let record = json!({
                "command": command,
                "inputs": out.inputs,
                "results": out.results,
                "passed": out.passed,
                "elapsed_ms": elapsed.as_millis() as u64,
            });
            println!("{}", serde_json::to_string_pretty(&record).expect("record serializes"));
        }
    }
    if out.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Expand { expr } => expand(expr),
        Command::Identities { degree, known, limit, paper_order, show } => {
            identities(*degree, known, *limit, *paper_order, *show)
        }
        Command::Cohn { generators, target } => cohn(generators, target.as_deref()),
        Command::Findim { file, check, p, q } => findim(file.as_ref(), check, p.as_deref(), q.as_deref(), cli),
        Command::VerifyPaper { limit, scan_to, extra } => verify_paper(*limit, *scan_to, extra, cli),
        Command::Basis { vars, degree } => basis(*vars, *degree),
    }
}

fn expand(expr: &str) -> Result<Output, Failure> {
    let poly: BracketPolynomial = expr.parse()?;
    let e = expand_generic(&poly);
    Ok(Output {
        inputs: json!({ "expr": expr }),
        results: json!({ "expansion": e.to_string(), "terms": e.len() }),
        text: format!("{poly} = {e}"),
        passed: true,
    })
}

fn template(name: &str) -> Result<BracketPolynomial, Failure> {
    let t = IdentityTemplate::builtin(name).ok_or_else(|| Failure(format!("unknown template {name:?}")))?;
    let slots: Vec<&str> = t.slots.iter().map(String::as_str).collect();
    Ok(t.instantiate(&slots)?)
}

fn identities(degree: usize, known: &[String], limit: usize, paper_order: bool, show: usize) -> Result<Output, Failure> {
    if limit > MAX_DEGREE_LIMIT {
        return Err(Failure(format!("--limit is at most {MAX_DEGREE_LIMIT}")));
    }
    if paper_order && degree != 3 {
        return Err(Failure("--paper-order applies to degree 3 only".into()));
    }
    let mut named = Vec::new();
    for name in known.iter().filter(|n| !n.is_empty() && n.as_str() != "none") {
        named.push((name.clone(), template(name)?));
    }
    let r = new_identities(&named, degree, limit)?;
    let mut text = format!(
        "degree {degree}\n  identities: {}\n  consequences of [{}]: {}\n  new (dimension): {}\n  new (generators): {}\n",
        r.kernel_dim,
        known.join(", "),
        r.consequence_dim,
        r.new_dim,
        r.new_generators,
    );
    if !r.quotient_multiplicities.is_empty() {
        let parts: Vec<String> = r.quotient_multiplicities.iter().map(|(l, m)| format!("{l}: {m}")).collect();
        text.push_str(&format!("  irreducible multiplicities: {}\n", parts.join(", ")));
    }
    for rep in r.representatives.iter().take(show) {
        text.push_str(&format!("  {rep}\n"));
    }
    if r.representatives.len() > show {
        text.push_str(&format!("  ... {} more\n", r.representatives.len() - show));
    }
    let mut results = serde_json::to_value(&r).expect("report serializes");
    if paper_order {
        let basis = MagmaticBasis::paper_order(NodeKind::Bracket);
        let m = degree3_matrix();
        let columns: Vec<String> = basis.terms().iter().map(|t| t.to_string()).collect();
        let rows: Vec<Vec<String>> =
            m.to_dense().iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
        text.push_str(&format!("columns: {}\n", columns.join(" ")));
        for row in &rows {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>3}")).collect();
            text.push_str(&format!("{}\n", cells.join("")));
        }
        text.push_str(&format!("rank {}\n", rank(&m)));
        results["matrix"] = json!({ "columns": columns, "rows": rows, "rank": rank(&m) });
    }
    Ok(Output {
        inputs: json!({ "degree": degree, "known": known, "limit": limit, "paper_order": paper_order }),
        results,
        text,
        passed: true,
    })
}

fn cohn(generators: &[String], target: Option<&str>) -> Result<Output, Failure> {
    let (default_gens, default_target) = cohn_instance();
    let gens = if generators.is_empty() {
        default_gens
    } else {
        generators.iter().map(|g| g.parse()).collect::<Result<Vec<BracketPolynomial>, _>>()?
    };
    let target = match target {
        Some(t) => t.parse()?,
        None => default_target,
    };
    let r = cohn_check(&gens, &target)?;
    let results = json!({
        "unknowns": r.unknowns.iter().map(|u| u.to_string()).collect::<Vec<_>>(),
        "equations": r.equations.iter().map(|e| json!({
            "monomial": e.monomial.to_string(),
            "coefficients": e.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "rhs": e.rhs.to_string(),
        })).collect::<Vec<_>>(),
        "in_perm_ideal": r.in_perm_ideal,
        "in_mutation_ideal": r.in_mutation_ideal,
        "solution": r.solution.as_ref().map(|s| s.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        "certificate": r.certificate.as_ref().map(|s| s.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        "verdict": match r.verdict {
            Verdict::ExceptionalImageCertified => "exceptional image certified",
            Verdict::NotCertified => "not certified",
        },
    });
    Ok(Output {
        inputs: json!({
            "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "target": target.to_string(),
        }),
        results,
        text: r.to_string(),
        passed: true,
    })
}

fn describe(a: &FiniteAlgebra, w: &Witness) -> (String, Value) {
    let at: Vec<String> = w.assignment.iter().map(|(v, e)| format!("{v} = {e}")).collect();
    let value = a.render(&w.value);
    (format!("{} gives {value}", at.join(", ")), json!({ "assignment": w.assignment, "value": value }))
}

fn findim(file: Option<&PathBuf>, checks: &[String], p: Option<&str>, q: Option<&str>, cli: &Cli) -> Result<Output, Failure> {
    let a = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            FiniteAlgebra::from_json(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?
        }
        None => FiniteAlgebra::prop35(),
    };
    let pq: Option<(Vector, Vector)> = match (p, q) {
        (Some(p), Some(q)) => Some((a.parse_vector(p)?, a.parse_vector(q)?)),
        _ => None,
    };
    let mode = match &pq {
        Some((p, q)) => BracketMode::Mutation { p, q },
        None => BracketMode::Native,
    };
    let mut text = String::new();
    let mut results = Vec::new();
    let mut passed = true;
    for check in checks {
        let (holds, detail, witness) = match check.as_str() {
            "criterion" => match a.lie_admissible_criterion() {
                None => (true, String::new(), Value::Null),
                Some(w) => {
                    let (d, v) = describe(&a, &w);
                    (false, d, v)
                }
            },
            "jacobi" => {
                let target = match &pq {
                    Some((p, q)) => a.mutation_algebra(p, q)?,
                    None => a.clone(),
                };
                match target.jacobi_test() {
                    None => (true, String::new(), Value::Null),
                    Some(w) => {
                        let names: Vec<&str> = w.triple.iter().map(|&i| a.names()[i].as_str()).collect();
                        let value = a.render(&w.value);
                        let d = format!("commutator Jacobi sum at ({}) is {value}", names.join(", "));
                        (false, d, json!({ "triple": names, "value": value }))
                    }
                }
            }
            "mutate" => match &pq {
                Some((p, q)) => {
                    let m = a.mutation_algebra(p, q)?;
                    let table: Value = serde_json::from_str(&m.to_json()).expect("valid json");
                    let ok = m.jacobi_test().is_none();
                    let d = format!("mutation table {}; Lie-admissible: {}", m.to_json(), if ok { "yes" } else { "no" });
                    (ok, d, json!({ "table": table }))
                }
                None => match a.sample_mutations(cli.seed, cli.samples) {
                    None => (true, format!("{} random pairs", cli.samples), Value::Null),
                    Some((p, q, w)) => {
                        let d = format!("p = {}, q = {}: Jacobi fails at {:?}", a.render(&p), a.render(&q), w.triple);
                        (false, d, json!({ "p": a.render(&p), "q": a.render(&q), "triple": w.triple }))
                    }
                },
            },
            other => {
                let poly = match other.strip_prefix("expr:") {
                    Some(expr) => expr.parse()?,
                    None => template(other)?,
                };
                match a.satisfies(&poly, mode)? {
                    None => (true, String::new(), Value::Null),
                    Some(w) => {
                        let (d, v) = describe(&a, &w);
                        (false, d, v)
                    }
                }
            }
        };
        passed &= holds;
        let verdict = if holds { "yes" } else { "no" };
        if detail.is_empty() {
            text.push_str(&format!("{check}: {verdict}\n"));
        } else {
            text.push_str(&format!("{check}: {verdict} ({detail})\n"));
        }
        results.push(json!({ "check": check, "holds": holds, "witness": witness }));
    }
    Ok(Output {
        inputs: json!({
            "file": file.map(|f| f.display().to_string()),
            "dim": a.dim(),
            "checks": checks,
            "p": pq.as_ref().map(|(p, _)| a.render(p)),
            "q": pq.as_ref().map(|(_, q)| a.render(q)),
            "seed": cli.seed,
            "samples": cli.samples,
        }),
        results: Value::Array(results),
        text,
        passed,
    })
}

fn verify_paper(limit: usize, scan_to: usize, extra: &[String], cli: &Cli) -> Result<Output, Failure> {
    if limit > MAX_DEGREE_LIMIT {
        return Err(Failure(format!("--limit is at most {MAX_DEGREE_LIMIT}")));
    }
    let mut extra_vanishing = Vec::new();
    for e in extra {
        extra_vanishing.push((e.clone(), e.parse()?));
    }
    let options = VerifyOptions { limit, seed: cli.seed, samples: cli.samples, scan_to, extra_vanishing, ..Default::default() };
    let all = criteria();
    let outcomes: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = all.iter().map(|c| s.spawn(|| run_criterion(c, &options))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut text = String::new();
    for o in &outcomes {
        let mark = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        text.push_str(&format!("{:>2} [{mark}] {} ({:.2} s)\n", o.number, o.title, o.elapsed_ms as f64 / 1000.0));
        for c in o.report.failures() {
            text.push_str(&format!("      failed: {}: {}\n", c.name, c.detail));
        }
    }
    let failed = outcomes.iter().filter(|o| o.status == Status::Fail).count();
    let skipped = outcomes.iter().filter(|o| o.status == Status::Skipped).count();
    text.push_str(&format!(
        "{} passed, {failed} failed, {skipped} skipped\n",
        outcomes.len() - failed - skipped
    ));
    Ok(Output {
        inputs: json!({ "limit": limit, "scan_to": scan_to, "seed": cli.seed, "samples": cli.samples, "extra": extra }),
        results: serde_json::to_value(&outcomes).expect("outcomes serialize"),
        text,
        passed: failed == 0,
    })
}

fn basis(vars: u32, degree: u32) -> Result<Output, Failure> {
    if vars == 0 || degree == 0 || degree > 7 {
        return Err(Failure("need --vars >= 1 and 1 <= --degree <= 7".into()));
    }
    let r = verify_basis_b(vars, degree);
    let mark = |b: bool| if b { "yes" } else { "no" };
    let mut text = format!(
        "B over {vars} letters up to degree {degree}: {} elements ({} in B1, {} of them off the diagonal)\n",
        r.b_count, r.b1_count, r.b1_off_diagonal
    );
    let rows: BTreeMap<&str, bool> = [
        ("independent", r.independent),
        ("spans the mutation subalgebra", r.spans),
        ("members are mutation elements", r.members_are_mutation_elements),
        ("closed under the bracket", r.closed_under_bracket),
    ]
    .into_iter()
    .collect();
    for (k, v) in &rows {
        text.push_str(&format!("  {k}: {}\n", mark(*v)));
    }
    if r.multilinear_dim > 0 {
        text.push_str(&format!("  multilinear dimension: {}\n", r.multilinear_dim));
    }
    for f in r.failures.iter().take(5) {
        text.push_str(&format!("  {f}\n"));
    }
    Ok(Output {
        inputs: json!({ "vars": vars, "degree": degree }),
        results: serde_json::to_value(&r).expect("report serializes"),
        passed: r.passed(),
        text,
    })
}
