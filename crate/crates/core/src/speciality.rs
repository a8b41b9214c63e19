//! Ideals of the mutation subalgebra versus the ideals they generate in the
//! free perm algebra, and the resulting certificate that a homomorphic image
//! is exceptional.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::linalg::{solve, Echelon, Rational, RationalMatrix, Solution, SparseVector};
use crate::mutation::{bracket_monomials, expand, Assignment, ComponentSpace};
use crate::perm::{Generator, Multidegree, PermElement, PermMonomial};
use crate::terms::{BracketPolynomial, BracketTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecialityError {
    #[error("multidegree {0} is not reachable from any generator")]
    Unreachable(String),
    #[error("{0} is not homogeneous in the variables x1, x2, ...")]
    NotHomogeneous(String),
    #[error("variable {0:?} is not of the form x<i>")]
    BadVariable(String),
}

fn poly_multidegree(p: &BracketPolynomial) -> Result<Multidegree, SpecialityError> {
    let mut md: Option<Multidegree> = None;
    for (t, _) in p.terms() {
        let mut indices = Vec::new();
        for leaf in t.leaves() {
            match leaf.parse::<Generator>() {
                Ok(Generator::X(i)) => indices.push(i),
                _ => return Err(SpecialityError::BadVariable(leaf.to_string())),
            }
        }
        let m = Multidegree::of_indices(indices);
        match &md {
            None => md = Some(m),
            Some(prev) if *prev == m => {}
            Some(_) => return Err(SpecialityError::NotHomogeneous(p.to_string())),
        }
    }
    md.ok_or_else(|| SpecialityError::NotHomogeneous(p.to_string()))
}

fn expand_x(p: &BracketPolynomial) -> PermElement {
    expand(p, &Assignment::new()).expect("leaves are generator names")
}

/// Spanning words of the component of multidegree `target` in the ideal of
/// the mutation subalgebra generated by `generators`: each generator of that
/// multidegree, and `<w,u>`, `<u,w>` for words `w` of the ideal at a smaller
/// multidegree and bracket monomials `u` of the complementary multidegree.
/// Returned with their expansions, without repetitions.
pub fn mutation_ideal_component(
    generators: &[BracketPolynomial],
    target: &Multidegree,
) -> Result<Vec<(BracketPolynomial, PermElement)>, SpecialityError> {
    // zero generators generate nothing
    let gens: Vec<(BracketPolynomial, Multidegree)> = generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| Ok((g.clone(), poly_multidegree(g)?)))
        .collect::<Result<_, _>>()?;
    if gens.is_empty() {
        return Ok(Vec::new());
    }
    if !gens.iter().any(|(_, m)| target.dominates(m)) {
        return Err(SpecialityError::Unreachable(target.to_string()));
    }
    let words = ideal_words(&gens, target);
    Ok(words.into_iter().map(|w| {
        let e = expand_x(&w);
        (w, e)
    }).collect())
}

fn ideal_words(gens: &[(BracketPolynomial, Multidegree)], m: &Multidegree) -> Vec<BracketPolynomial> {
    let mut out: Vec<BracketPolynomial> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |p: BracketPolynomial, out: &mut Vec<BracketPolynomial>| {
        if seen.insert(p.to_string()) {
            out.push(p);
        }
    };
    for (g, gm) in gens {
        if gm == m {
            push(g.clone(), &mut out);
        }
    }
    for m1 in m.proper_parts() {
        if !gens.iter().any(|(_, gm)| m1.dominates(gm)) {
            continue;
        }
        let m2 = m.checked_sub(&m1).unwrap();
        let inner = ideal_words(gens, &m1);
        if inner.is_empty() {
            continue;
        }
        let others: Vec<BracketPolynomial> =
            bracket_monomials(&m2).into_iter().map(BracketPolynomial::from_term).collect();
        for w in &inner {
            for u in &others {
                push(w.bracket(u), &mut out);
                push(u.bracket(w), &mut out);
            }
        }
    }
    out
}

/// Spanning set of the component of multidegree `target` (with parameter
/// degree `|target| - 1`) of the ideal of the free perm algebra generated by
/// `generators`: all `g`, `u g`, `g v`, `u g v` with monomials `u`, `v`.
pub fn perm_ideal_component(generators: &[PermElement], target: &Multidegree) -> Vec<PermElement> {
    let mut out = Vec::new();
    for g in generators {
        let parts = g.homogeneous_parts();
        let Some(gm) = parts.keys().next().cloned() else {
            continue;
        };
        if parts.len() != 1 || !target.dominates(&gm) {
            continue;
        }
        let Some(g_params) = g.terms().next().map(|(m, _)| {
            let (a, b) = m.param_degrees();
            a + b
        }) else {
            continue;
        };
        let rest = target.checked_sub(&gm).unwrap();
        let Some(extra) = (target.degree() as usize - 1).checked_sub(g_params) else {
            continue;
        };
        let xs: Vec<Generator> = rest.letters().into_iter().map(Generator::X).collect();
        for n_p in 0..=extra {
            let mut letters = xs.clone();
            letters.extend(std::iter::repeat(Generator::P).take(n_p));
            letters.extend(std::iter::repeat(Generator::Q).take(extra - n_p));
            for (left, right) in submultisets(&letters) {
                let us = monomials_or_empty(&left);
                let vs = monomials_or_empty(&right);
                for u in &us {
                    for v in &vs {
                        let mut e = g.clone();
                        if let Some(u) = u {
                            e = PermElement::monomial(u.clone()).multiply(&e);
                        }
                        if let Some(v) = v {
                            e = e.multiply(&PermElement::monomial(v.clone()));
                        }
                        out.push(e);
                    }
                }
            }
        }
    }
    out
}

fn monomials_or_empty(letters: &[Generator]) -> Vec<Option<PermMonomial>> {
    if letters.is_empty() {
        vec![None]
    } else {
        PermMonomial::all_with_letters(letters).into_iter().map(Some).collect()
    }
}

/// Every split of a sorted multiset into two sub-multisets.
fn submultisets(letters: &[Generator]) -> Vec<(Vec<Generator>, Vec<Generator>)> {
    let mut counts: BTreeMap<Generator, usize> = BTreeMap::new();
    for &g in letters {
        *counts.entry(g).or_default() += 1;
    }
    let items: Vec<(Generator, usize)> = counts.into_iter().collect();
    let mut out = vec![(Vec::new(), Vec::new())];
    for (g, c) in items {
        let mut next = Vec::new();
        for (l, r) in &out {
            for k in 0..=c {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2.extend(std::iter::repeat(g).take(k));
                r2.extend(std::iter::repeat(g).take(c - k));
                next.push((l2, r2));
            }
        }
        out = next;
    }
    out
}

/// One coefficient comparison: `sum_i coeffs[i] * λ_i = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearEquation {
    pub monomial: PermMonomial,
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl LinearEquation {
    /// Coefficients and right-hand side scaled so the first nonzero
    /// coefficient is positive.
    pub fn normalized(&self) -> (Vec<Rational>, Rational) {
        let neg = self.coeffs.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
        let s = if neg { -Rational::one() } else { Rational::one() };
        (self.coeffs.iter().map(|c| c * &s).collect(), &self.rhs * &s)
    }
}

/// Rendered with the first nonzero coefficient positive.
impl fmt::Display for LinearEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (coeffs, rhs) = self.normalized();
        let mut lhs = String::new();
        for (i, c) in coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let mag = c.abs();
            match (lhs.is_empty(), c.is_negative()) {
                (true, false) => {}
                (true, true) => lhs.push('-'),
                (false, false) => lhs.push_str(" + "),
                (false, true) => lhs.push_str(" - "),
            }
            if !mag.is_one() {
                lhs.push_str(&mag.to_string());
            }
            lhs.push_str(&format!("λ{}", i + 1));
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        write!(f, "{lhs} = {rhs}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The target lies in the perm ideal but not in the mutation ideal.
    ExceptionalImageCertified,
    NotCertified,
}

#[derive(Clone, Debug)]
pub struct CohnReport {
    pub target: BracketPolynomial,
    pub unknowns: Vec<BracketPolynomial>,
    pub equations: Vec<LinearEquation>,
    pub in_perm_ideal: bool,
    pub in_mutation_ideal: bool,
    /// Values of the unknowns when the system is solvable.
    pub solution: Option<Vec<Rational>>,
    /// Multipliers `y` of the equations with `y A = 0` and `y b = 1` when it
    /// is not.
    pub certificate: Option<Vec<Rational>>,
    pub verdict: Verdict,
}

impl CohnReport {
    /// For each row `(coefficients, rhs)` of `listing`, the index of an
    /// equation equal to it up to sign, each equation used once. `None` if
    /// the systems differ.
    pub fn match_rows(&self, listing: &[(Vec<Rational>, Rational)]) -> Option<Vec<usize>> {
        if listing.len() != self.equations.len() {
            return None;
        }
        let mut used = vec![false; self.equations.len()];
        let mut out = Vec::with_capacity(listing.len());
        for (coeffs, rhs) in listing {
            let want = LinearEquation { monomial: self.equations[0].monomial.clone(), coeffs: coeffs.clone(), rhs: rhs.clone() }
                .normalized();
            let i = (0..self.equations.len()).find(|&i| !used[i] && self.equations[i].normalized() == want)?;
            used[i] = true;
            out.push(i);
        }
        Some(out)
    }

    pub fn system(&self) -> (RationalMatrix, SparseVector) {
        let rows: Vec<SparseVector> = self.equations.iter().map(|e| SparseVector::from_dense(&e.coeffs)).collect();
        let rhs = SparseVector::from_pairs(self.equations.iter().enumerate().map(|(i, e)| (i, e.rhs.clone())));
        (RationalMatrix::new(rows, self.unknowns.len()), rhs)
    }
}

impl fmt::Display for CohnReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target: {}", self.target)?;
        for (i, u) in self.unknowns.iter().enumerate() {
            writeln!(f, "  λ{} : {}", i + 1, u)?;
        }
        writeln!(f, "{} equations in {} unknowns:", self.equations.len(), self.unknowns.len())?;
        for e in &self.equations {
            writeln!(f, "  {e}    [{}]", e.monomial)?;
        }
        writeln!(f, "in perm ideal: {}", yes_no(self.in_perm_ideal))?;
        writeln!(f, "in mutation ideal: {}", yes_no(self.in_mutation_ideal))?;
        if let Some(y) = &self.certificate {
            let y: Vec<String> = y.iter().map(|c| c.to_string()).collect();
            writeln!(f, "inconsistency multipliers: [{}]", y.join(", "))?;
        }
        let verdict = match self.verdict {
            Verdict::ExceptionalImageCertified => "exceptional image certified",
            Verdict::NotCertified => "not certified",
        };
        write!(f, "verdict: {verdict}")
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Decides whether `target` lies in the ideal generated by `generators` in
/// the mutation subalgebra and in the ideal they generate in the free perm
/// algebra, at the multidegree of `target`.
pub fn cohn_check(generators: &[BracketPolynomial], target: &BracketPolynomial) -> Result<CohnReport, SpecialityError> {
    let md = poly_multidegree(target)?;
    let words = mutation_ideal_component(generators, &md)?;
    let t = expand_x(target);

    let mut monomials: BTreeSet<PermMonomial> = t.terms().map(|(m, _)| m.clone()).collect();
    for (_, e) in &words {
        monomials.extend(e.terms().map(|(m, _)| m.clone()));
    }
    let equations: Vec<LinearEquation> = monomials
        .into_iter()
        .map(|m| LinearEquation { coeffs: words.iter().map(|(_, e)| e.coeff(&m)).collect(), rhs: t.coeff(&m), monomial: m })
        .collect();
    let unknowns: Vec<BracketPolynomial> = words.iter().map(|(w, _)| w.clone()).collect();
    let rows: Vec<SparseVector> = equations.iter().map(|e| SparseVector::from_dense(&e.coeffs)).collect();
    let rhs = SparseVector::from_pairs(equations.iter().enumerate().map(|(i, e)| (i, e.rhs.clone())));
    let (solution, certificate) = match solve(&RationalMatrix::new(rows, unknowns.len()), &rhs) {
        Solution::Consistent(x) => (Some(x.to_dense(unknowns.len())), None),
        Solution::Inconsistent { certificate } => (None, Some(certificate.to_dense(equations.len()))),
    };

    let gens: Vec<PermElement> = generators.iter().map(expand_x).collect();
    let space = ComponentSpace::new(&md);
    let mut ech = Echelon::new(space.dim());
    for e in perm_ideal_component(&gens, &md) {
        ech.insert(&space.vector(&e).expect("ideal element lies in the component"));
    }
    let in_perm_ideal = space.vector(&t).is_some_and(|v| ech.contains(&v));
    let in_mutation_ideal = solution.is_some();
    let verdict = if in_perm_ideal && !in_mutation_ideal {
        Verdict::ExceptionalImageCertified
    } else {
        Verdict::NotCertified
    };
    Ok(CohnReport {
        target: target.clone(),
        unknowns,
        equations,
        in_perm_ideal,
        in_mutation_ideal,
        solution,
        certificate,
        verdict,
    })
}

/// Generators `<<x2,x3>,x4>`, `<<x2,x3>,x1>` and target `<<x2,x3>,<x1,x4>>`.
pub fn cohn_instance() -> (Vec<BracketPolynomial>, BracketPolynomial) {
    let p = |s: &str| s.parse::<BracketPolynomial>().expect("valid instance");
    (vec![p("<<x2,x3>,x4>"), p("<<x2,x3>,x1>")], p("<<x2,x3>,<x1,x4>>"))
}

/// `x1 p f1 - x4 q f2` with `f1`, `f2` the expanded instance generators;
/// equal to the expanded target.
pub fn cohn_perm_witness() -> PermElement {
    let (gens, _) = cohn_instance();
    let f1 = expand_x(&gens[0]);
    let f2 = expand_x(&gens[1]);
    let l: PermElement = "x1 p".parse().expect("valid");
    let r: PermElement = "x4 q".parse().expect("valid");
    &l.multiply(&f1) - &r.multiply(&f2)
}

/// Bracket terms of the component words, for display.
pub fn word_terms(words: &[(BracketPolynomial, PermElement)]) -> Vec<BracketTerm> {
    words.iter().filter_map(|(w, _)| w.terms().next().map(|(t, _)| t.clone())).collect()
}
