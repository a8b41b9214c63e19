//! The reproduction suite: twelve numbered criteria, each a group of exact
//! checks with a runtime budget.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::findim::{criterion_algebra, random_vector, BracketMode, FiniteAlgebra};
use crate::identities::{
    consequence_span, degree3_matrix, identity_kernel, new_identities, standardize, tideal_membership,
    ConsequenceOptions, MagmaticBasis, DEFAULT_DEGREE_LIMIT,
};
use crate::linalg::{kernel_basis, rank, rref, Rational, RationalMatrix};
use crate::mutation::{check_relations, enumerate_b, expand_generic, verify_basis_b, BFamily, MutationSpans};
use crate::perm::{Generator, PermElement, PermMonomial};
use crate::report::Report;
use crate::speciality::{cohn_check, cohn_instance, cohn_perm_witness, Verdict};
use crate::terms::{BracketPolynomial, IdentityTemplate, NodeKind};

pub const DEGREE3_FIXTURE: &str = include_str!("../fixtures/degree3.matrix");
pub const COHN_SYSTEM_FIXTURE: &str = include_str!("../fixtures/cohn.system");
pub const CONJECTURE_FIXTURE: &str = include_str!("../fixtures/conjecture.ids");

/// Whitespace-separated integer rows; blank lines and `#` comments skipped.
pub fn parse_integer_rows(text: &str) -> Vec<Vec<i64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|x| x.parse().expect("integer entry")).collect())
        .collect()
}

/// One polynomial per line, named by its source text.
pub fn parse_identity_list(text: &str) -> Result<Vec<(String, BracketPolynomial)>, crate::terms::TermError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| Ok((l.to_string(), l.parse()?)))
        .collect()
}

/// The six identities of the degree-5 scan.
pub fn conjecture_identities() -> Vec<(String, BracketPolynomial)> {
    parse_identity_list(CONJECTURE_FIXTURE).expect("bundled identities parse")
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Largest degree the identity engine is allowed to enumerate; criteria
    /// that need more are skipped.
    pub limit: usize,
    pub seed: u64,
    /// Random triples for the relations.
    pub random_elements: usize,
    /// Random algebras for the Lie-admissibility property.
    pub algebras: usize,
    /// Random `(p, q)` pairs per algebra.
    pub samples: usize,
    /// Last degree of the conjecture scan (at least 5).
    pub scan_to: usize,
    /// Polynomials added to the vanishing list.
    pub extra_vanishing: Vec<(String, BracketPolynomial)>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            limit: DEFAULT_DEGREE_LIMIT,
            seed: 2024,
            random_elements: 20,
            algebras: 20,
            samples: 100,
            scan_to: 5,
            extra_vanishing: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub number: usize,
    pub title: String,
    pub status: Status,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
    pub report: Report,
}

pub struct Criterion {
    pub number: usize,
    pub title: &'static str,
    pub budget: Duration,
    /// Largest identity-engine degree used; 0 when none is.
    pub degree: usize,
    run: fn(&VerifyOptions) -> Report,
}

pub fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    let c = |number, title, budget, degree, run| Criterion { number, title, budget, degree, run };
    vec![
        c(1, "degree-3 and degree-4 expansions", secs(1), 0, expansions as fn(&VerifyOptions) -> Report),
        c(2, "mutation relations", secs(1), 0, relations),
        c(3, "members of B2 and B3 are mutation elements", secs(120), 0, mutation_elements),
        c(4, "basis B", secs(300), 5, basis),
        c(5, "vanishing identities", secs(5), 0, vanishing),
        c(6, "degree-3 completeness", secs(10), 3, degree_three),
        c(7, "three-dimensional counterexample", secs(1), 0, counterexample),
        c(8, "new identities at degree 4", secs(120), 4, degree_four),
        c(9, "conjecture scan", secs(1800), 5, scan),
        c(10, "exceptional homomorphic image", secs(5), 0, speciality),
        c(11, "Lie-admissibility of mutations", secs(600), 5, lie_admissible),
        c(12, "infrastructure", secs(60), 4, infrastructure),
    ]
}

pub fn run_criterion(c: &Criterion, options: &VerifyOptions) -> Outcome {
    let skipped = c.degree > options.limit;
    let start = Instant::now();
    let mut report = if skipped {
        let mut r = Report::new(c.title);
        r.push("degree limit", true, format!("needs degree {} > limit {}", c.degree, options.limit));
        r
    } else {
        (c.run)(options)
    };
    let elapsed = start.elapsed();
    if !skipped {
        report.push(
            "runtime",
            elapsed <= c.budget,
            format!("{:.2} s of {} s", elapsed.as_secs_f64(), c.budget.as_secs()),
        );
    }
    let status = match (skipped, report.passed()) {
        (true, _) => Status::Skipped,
        (false, true) => Status::Pass,
        (false, false) => Status::Fail,
    };
    Outcome {
        number: c.number,
        title: c.title.to_string(),
        status,
        elapsed_ms: elapsed.as_millis(),
        budget_ms: c.budget.as_millis(),
        report,
    }
}

pub fn run_all(options: &VerifyOptions) -> Vec<Outcome> {
    criteria().iter().map(|c| run_criterion(c, options)).collect()
}

fn bp(s: &str) -> BracketPolynomial {
    s.parse().expect("valid polynomial")
}

fn pe(s: &str) -> PermElement {
    s.parse().expect("valid perm element")
}

fn named(names: &[&str]) -> Vec<(String, BracketPolynomial)> {
    names
        .iter()
        .map(|n| {
            let t = IdentityTemplate::builtin(n).expect("built-in template");
            let slots: Vec<&str> = t.slots.iter().map(String::as_str).collect();
            (n.to_string(), t.instantiate(&slots).expect("slot count"))
        })
        .collect()
}

fn expansions(_: &VerifyOptions) -> Report {
    let mut r = Report::new("expansions");
    for (term, want) in [
        ("<<x1,x2>,x3>", "(p-q)^2 x1 x2 x3 + p q x1[x2,x3] - q^2 x2[x1,x3]"),
        ("<x1,<x2,x3>>", "(p-q)^2 x1 x2 x3 + p q x1[x2,x3] + p q x2[x1,x3] - q^2 x2[x1,x3]"),
        (
            "<<x1,x2>,<x3,x4>>",
            "(p-q)^3 x1 x2 x3 x4 + (p-q) p q x1 x2 [x3,x4] + (p-q) p q x1 x3 [x2,x4] - (p-q) q^2 x2 x3 [x1,x4]",
        ),
    ] {
        let got = expand_generic(&bp(term)).to_string();
        let want = pe(want).to_string();
        r.push(term, got == want, got);
    }
    r
}

fn relations(o: &VerifyOptions) -> Report {
    check_relations(o.seed, o.random_elements)
}

fn mutation_elements(_: &VerifyOptions) -> Report {
    let mut r = Report::new("mutation elements");
    let mut spans = MutationSpans::new();
    let elems = enumerate_b(6, 6);
    for family in [BFamily::B2, BFamily::B3] {
        let members: Vec<_> = elems.iter().filter(|e| e.family == family).collect();
        let bad: Vec<String> =
            members.iter().filter(|e| !spans.contains(&e.value)).map(|e| e.value.to_string()).collect();
        let detail = match bad.first() {
            None => format!("{} elements over 6 letters up to degree 6", members.len()),
            Some(e) => format!("{} of {} fail, first {e}", bad.len(), members.len()),
        };
        r.push(format!("{family}"), bad.is_empty() && !members.is_empty(), detail);
    }
    r
}

fn basis(_: &VerifyOptions) -> Report {
    let mut r = Report::new("basis B");
    for (n, dim) in [(3u32, 7usize), (4, 13), (5, 21)] {
        let b = verify_basis_b(n, n);
        let detail = if b.passed() {
            format!("multilinear dimension {}, {} elements of B", b.multilinear_dim, b.b_count)
        } else {
            b.failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        };
        r.push(
            format!("{n} letters up to degree {n}, expected dimension {dim}"),
            b.passed() && b.multilinear_dim == dim,
            detail,
        );
    }
    r
}

fn vanishing(o: &VerifyOptions) -> Report {
    let mut r = Report::new("vanishing identities");
    let ncj = bp("<<<x,x>,y>,x> - <<x,x>,<y,x>>").multilinearize();
    let mut list: Vec<(String, BracketPolynomial)> = [
        "f(a,b,c)",
        "ftilde(a,b,c)",
        "wa(a,b,c)",
        "flex(a,b,c)",
        "hbar(a,b,c,d)",
        "ibar(a,b,c,d)",
        "<circ(a,b),circ(c,d)>",
        "conj4a(a,b,c,d)",
        "conj4b(a,b,c,d)",
    ]
    .iter()
    .map(|s| (s.to_string(), bp(s)))
    .collect();
    list.push(("noncommutative Jordan, linearized".into(), ncj));
    list.extend(o.extra_vanishing.iter().cloned());
    for (name, p) in &list {
        let e = expand_generic(p);
        r.push(name.as_str(), e.is_zero(), if e.is_zero() { String::new() } else { e.to_string() });
    }
    let circ = &expand_generic(&bp("circ(x1,x2)")) - &pe("(p+q)[x1,x2]");
    r.push("circ(x,y) - (p+q)[x,y]", circ.is_zero(), if circ.is_zero() { String::new() } else { circ.to_string() });
    r
}

fn degree_three(o: &VerifyOptions) -> Report {
    let mut r = Report::new("degree 3");
    let published = RationalMatrix::from_integers(&parse_integer_rows(DEGREE3_FIXTURE));
    let ours = degree3_matrix();
    r.push("published matrix has rank 5", rank(&published) == 5, format!("rank {}", rank(&published)));
    let sorted = |m: &RationalMatrix| {
        let mut rows = m.to_dense();
        rows.sort();
        rows
    };
    let same = ours.ncols() == published.ncols() && sorted(&ours) == sorted(&published);
    let order = if ours == published { "same row order" } else { "rows permuted" };
    r.push("computed matrix matches the published rows", same, if same { order } else { "differs" });
    let kernel = identity_kernel(3, o.limit);
    let kdim = kernel.as_ref().map_or(0, Vec::len);
    r.push("identity kernel has dimension 5", kdim == 5, format!("{kdim}"));
    let ids: Vec<BracketPolynomial> = named(&["f", "wa"]).into_iter().map(|(_, p)| p).collect();
    let opts = ConsequenceOptions { limit: o.limit, ..Default::default() };
    let equal = match (consequence_span(&ids, 3, &opts), &kernel) {
        (Ok(span), Ok(kernel)) => {
            span.dim() == kernel.len() && kernel.iter().all(|k| span.contains(k).unwrap_or(false))
        }
        _ => false,
    };
    r.push("consequences of f and WA equal the kernel", equal, "");
    match new_identities(&named(&["f", "wa"]), 3, o.limit) {
        Ok(n) => r.push("no new identities", n.new_dim == 0, format!("{}", n.new_dim)),
        Err(e) => r.push("no new identities", false, e.to_string()),
    }
    r
}

fn counterexample(_: &VerifyOptions) -> Report {
    let mut r = Report::new("counterexample");
    let a = FiniteAlgebra::prop35();
    let f = a.satisfies_template(&IdentityTemplate::builtin("f").expect("f"), BracketMode::Native);
    r.push("satisfies f", matches!(f, Ok(None)), "");
    let wa = a.satisfies_template(&IdentityTemplate::builtin("wa").expect("wa"), BracketMode::Native);
    let (ok, detail) = match wa {
        Ok(Some(w)) => {
            let at: Vec<&str> = w.assignment.iter().map(|(_, e)| e.as_str()).collect();
            let value = a.render(&w.value);
            (at == ["e1", "e1", "e3"] && value == "-e1", format!("WA({}) = {value}", at.join(", ")))
        }
        Ok(None) => (false, "WA holds".into()),
        Err(e) => (false, e.to_string()),
    };
    r.push("fails WA at (e1, e1, e3) with value -e1", ok, detail);
    let lhs = bp("ftilde(x,y,z)");
    let rhs = bp("wa(z,y,x) - wa(z,x,y) - f(z,y,x)");
    r.push("ftilde(x,y,z) = WA(z,y,x) - WA(z,x,y) - f(z,y,x)", lhs.structural_equal(&rhs), "");
    r
}

fn degree_four(o: &VerifyOptions) -> Report {
    let mut r = Report::new("degree 4");
    let base = named(&["f", "wa", "hbar", "ibar"]);
    match new_identities(&base, 4, o.limit) {
        Ok(n) => r.push(
            "two new identities beyond f, WA, H, I",
            n.new_generators == 2,
            format!(
                "{} generators; quotient dimension {}, multiplicities {:?}",
                n.new_generators, n.new_dim, n.quotient_multiplicities
            ),
        ),
        Err(e) => r.push("two new identities beyond f, WA, H, I", false, e.to_string()),
    }
    let all = named(&["f", "wa", "hbar", "ibar", "conj4a", "conj4b"]);
    match new_identities(&all, 4, o.limit) {
        Ok(n) => r.push(
            "none left with the two conjectured identities",
            n.new_dim == 0 && n.new_generators == 0,
            format!("kernel {}, consequences {}", n.kernel_dim, n.consequence_dim),
        ),
        Err(e) => r.push("none left with the two conjectured identities", false, e.to_string()),
    }
    r
}

fn scan(o: &VerifyOptions) -> Report {
    let mut r = Report::new("conjecture scan");
    let ids = conjecture_identities();
    for n in 5..=o.scan_to.max(5) {
        let name = format!("degree {n}");
        if n > o.limit {
            r.push(name, true, format!("skipped, limit {}", o.limit));
            continue;
        }
        let start = Instant::now();
        match new_identities(&ids, n, o.limit) {
            Ok(rep) => r.push(
                name,
                rep.new_dim == 0 && rep.consequences_are_identities,
                format!(
                    "kernel {}, consequences {} ({:.1} s)",
                    rep.kernel_dim,
                    rep.consequence_dim,
                    start.elapsed().as_secs_f64()
                ),
            ),
            Err(e) => r.push(name, false, e.to_string()),
        }
    }
    r
}

fn speciality(_: &VerifyOptions) -> Report {
    let mut r = Report::new("speciality");
    let (gens, target) = cohn_instance();
    let rep = match cohn_check(&gens, &target) {
        Ok(rep) => rep,
        Err(e) => {
            r.push("instance", false, e.to_string());
            return r;
        }
    };
    r.push("four spanning words", rep.unknowns.len() == 4, format!("{}", rep.unknowns.len()));
    let witness = expand_generic(&target) == cohn_perm_witness();
    r.push("target = x1 p f1 - x4 q f2", witness, "");
    r.push("target in the perm ideal", rep.in_perm_ideal, "");
    let published: Vec<(Vec<Rational>, Rational)> = parse_integer_rows(COHN_SYSTEM_FIXTURE)
        .into_iter()
        .map(|mut row| {
            let b = Rational::from_integer(row.pop().expect("nonempty row"));
            (row.into_iter().map(Rational::from_integer).collect(), b)
        })
        .collect();
    r.push(
        "12 equations matching the published system",
        rep.match_rows(&published).is_some(),
        format!("{} equations in {} unknowns", rep.equations.len(), rep.unknowns.len()),
    );
    let certified = rep.certificate.as_ref().is_some_and(|y| {
        let (m, rhs) = rep.system();
        let y = crate::linalg::SparseVector::from_dense(y);
        m.left_mul(&y).is_zero() && y.dot(&rhs).is_one()
    });
    r.push("system inconsistent, with certificate", !rep.in_mutation_ideal && certified, "");
    r.push("verdict", rep.verdict == Verdict::ExceptionalImageCertified, format!("{:?}", rep.verdict));
    r
}

fn lie_admissible(o: &VerifyOptions) -> Report {
    let mut r = Report::new("Lie-admissibility");
    let mut rng = StdRng::seed_from_u64(o.seed);
    let bicomm = [bp("(a*b)*c - (a*c)*b"), bp("a*(b*c) - b*(a*c)")];
    let mut bicommutative = 0;
    let mut criterion_failures = 0;
    let mut jacobi_failures = Vec::new();
    for i in 0..o.algebras {
        let a = criterion_algebra(i, &mut rng);
        if bicomm.iter().all(|p| matches!(a.satisfies(p, BracketMode::Native), Ok(None))) {
            bicommutative += 1;
        }
        if a.lie_admissible_criterion().is_some() {
            criterion_failures += 1;
            continue;
        }
        for _ in 0..o.samples {
            let p = random_vector(&mut rng, a.dim());
            let q = random_vector(&mut rng, a.dim());
            let m = a.mutation_algebra(&p, &q).expect("matching dimensions");
            if let Some(w) = m.jacobi_test() {
                jacobi_failures.push(format!("algebra {i}: triple {:?}", w.triple));
            }
        }
    }
    r.push(
        "sampled algebras satisfy the criterion",
        criterion_failures == 0 && o.algebras > 0,
        format!("{} algebras, {bicommutative} bicommutative", o.algebras),
    );
    r.push("bicommutative algebras sampled", bicommutative > 0, format!("{bicommutative}"));
    r.push(
        "every sampled mutation is Lie-admissible",
        jacobi_failures.is_empty(),
        jacobi_failures.first().cloned().unwrap_or_else(|| format!("{} pairs each", o.samples)),
    );
    let crit = IdentityTemplate::builtin("crit36").expect("built-in").body;
    let follows = standardize(&crit).and_then(|c| tideal_membership(&c, &bicomm, o.limit));
    r.push(
        "criterion follows from bicommutativity at degree 5",
        matches!(follows, Ok(true)),
        match follows {
            Ok(b) => b.to_string(),
            Err(e) => e.to_string(),
        },
    );
    r
}

fn infrastructure(o: &VerifyOptions) -> Report {
    let mut r = Report::new("infrastructure");
    let dims: Vec<usize> = (1..=6u32)
        .map(|n| {
            let letters: Vec<Generator> = (1..=n).map(Generator::X).collect();
            PermMonomial::all_with_letters(&letters).len()
        })
        .collect();
    r.push("multilinear perm dimension is n for n <= 6", dims == [1, 2, 3, 4, 5, 6], format!("{dims:?}"));
    let counts: Vec<usize> = [3, 4]
        .iter()
        .map(|&n| MagmaticBasis::new(n, NodeKind::Bracket, o.limit).map_or(0, |b| b.len()))
        .collect();
    r.push("magmatic counts 12 and 120", counts == [12, 120], format!("{counts:?}"));
    let mut rng = StdRng::seed_from_u64(o.seed);
    let mut bad = 0;
    for _ in 0..100 {
        let m = random_matrix(&mut rng);
        let e = rref(&m);
        let idempotent = rref(&e.echelon) == e;
        let kernel = kernel_basis(&m);
        let nullity = e.rank + kernel.len() == m.ncols() && kernel.iter().all(|v| m.mul_vector(v).is_zero());
        if !(idempotent && nullity) {
            bad += 1;
        }
    }
    r.push("rref idempotent, rank + nullity = columns", bad == 0, format!("{bad} of 100 failed"));
    r
}

fn random_matrix(rng: &mut StdRng) -> RationalMatrix {
    use rand::Rng;
    let rows = rng.gen_range(1..=7);
    let cols = rng.gen_range(1..=7);
    let m: Vec<Vec<i64>> =
        (0..rows).map(|_| (0..cols).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(-3..=3) }).collect()).collect();
    RationalMatrix::from_integers(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        let m = parse_integer_rows(DEGREE3_FIXTURE);
        assert_eq!((m.len(), m[0].len()), (12, 12));
        assert_eq!(parse_integer_rows(COHN_SYSTEM_FIXTURE).len(), 12);
        assert_eq!(conjecture_identities().len(), 6);
    }

    #[test]
    fn limit_skips() {
        let o = VerifyOptions { limit: 2, ..Default::default() };
        let c = criteria();
        let out = run_criterion(&c[5], &o);
        assert_eq!(out.status, Status::Skipped);
        let out = run_criterion(&c[0], &o);
        assert_eq!(out.status, Status::Pass);
    }

    #[test]
    fn corrupted_identity_fails() {
        let o = VerifyOptions { extra_vanishing: vec![("broken".into(), bp("<a,b> - <b,a>"))], ..Default::default() };
        let out = run_criterion(&criteria()[4], &o);
        assert_eq!(out.status, Status::Fail);
        assert_eq!(out.report.failures().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["broken"]);
    }
}
