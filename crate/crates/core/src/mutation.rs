//! The (p,q)-mutation of the free perm algebra: expansion of bracket
//! polynomials, the spanning set B, and membership in the subalgebra generated
//! by the variables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::linalg::{Echelon, Rational, SparseVector};
use crate::perm::{Generator, Multidegree, PermElement, PermMonomial};
use crate::report::Report;
use crate::terms::{BracketPolynomial, BracketTerm, NodeKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MutationError {
    #[error("variable {0:?} has no assignment and is not a generator name")]
    Unresolved(String),
}

/// Values for the leaves of a bracket polynomial.
pub type Assignment = BTreeMap<String, PermElement>;

/// `<u,v> = (u p) v - (v q) u`.
pub fn mutate(u: &PermElement, v: &PermElement) -> PermElement {
    let p = PermElement::p();
    let q = PermElement::q();
    &u.multiply(&p).multiply(v) - &v.multiply(&q).multiply(u)
}

/// Evaluates `poly` in the free perm algebra on `X ∪ {p,q}`: brackets become
/// [`mutate`], products become the perm product. Leaves are looked up in
/// `assignment` first and otherwise read as generator names (`x3`, `p`, `q`).
pub fn expand(poly: &BracketPolynomial, assignment: &Assignment) -> Result<PermElement, MutationError> {
    let mut out = PermElement::zero();
    let mut memo = HashMap::new();
    for (t, c) in poly.terms() {
        let e = expand_term(t, assignment, &mut memo)?;
        out = &out + &e.scale(c);
    }
    Ok(out)
}

fn expand_term(
    t: &BracketTerm,
    assignment: &Assignment,
    memo: &mut HashMap<BracketTerm, PermElement>,
) -> Result<PermElement, MutationError> {
    if let Some(e) = memo.get(t) {
        return Ok(e.clone());
    }
    let e = match t {
        BracketTerm::Leaf(name) => match assignment.get(name) {
            Some(e) => e.clone(),
            None => {
                let g: Generator = name.parse().map_err(|_| MutationError::Unresolved(name.clone()))?;
                PermElement::generator(g)
            }
        },
        BracketTerm::Node(kind, l, r) => {
            let u = expand_term(l, assignment, memo)?;
            let v = expand_term(r, assignment, memo)?;
            match kind {
                NodeKind::Bracket => mutate(&u, &v),
                NodeKind::Product => u.multiply(&v),
            }
        }
    };
    if matches!(t, BracketTerm::Node(..)) {
        memo.insert(t.clone(), e.clone());
    }
    Ok(e)
}

/// Sends every variable of `poly` that is not already a generator name to a
/// distinct fresh `x_k`, in sorted name order.
pub fn generic_assignment(poly: &BracketPolynomial) -> Assignment {
    let vars = poly.variables();
    let mut next = vars
        .iter()
        .filter_map(|v| v.parse::<Generator>().ok().and_then(Generator::var_index))
        .max()
        .unwrap_or(0);
    let mut out = Assignment::new();
    for v in vars {
        if v.parse::<Generator>().is_err() {
            next += 1;
            out.insert(v, PermElement::x(next));
        }
    }
    out
}

/// Expansion with [`generic_assignment`].
pub fn expand_generic(poly: &BracketPolynomial) -> PermElement {
    expand(poly, &generic_assignment(poly)).expect("generic assignment covers every variable")
}

/// Whether every monomial ends in a variable.
pub fn tails_in_x(e: &PermElement) -> bool {
    e.terms().all(|(m, _)| !m.tail().is_param())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BFamily {
    X,
    B1,
    B2,
    B3,
}

impl fmt::Display for BFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BFamily::X => "X",
            BFamily::B1 => "B1",
            BFamily::B2 => "B2",
            BFamily::B3 => "B3",
        };
        f.write_str(s)
    }
}

/// A member of `B = X ∪ B1 ∪ B2 ∪ B3`.
///
/// `indices` lists `j1, j2, ..., jn`: for `X` the single variable, for `B1`
/// the pair `(i, j)` of `x_i p x_j - x_j q x_i`, for `B2` the tail followed by
/// the sorted remaining letters, for `B3` the smallest letter, the letter in
/// the commutator with it, then the sorted rest. `exponent` is the power of
/// `q` in `B3` and 0 otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSetElement {
    pub family: BFamily,
    pub exponent: u32,
    pub indices: Vec<u32>,
    pub value: PermElement,
}

impl BSetElement {
    pub fn multidegree(&self) -> Multidegree {
        Multidegree::of_indices(self.indices.iter().copied())
    }
}

fn left_normed(letters: &[Generator]) -> PermElement {
    PermElement::word(letters).expect("nonempty word")
}

/// The members of B of the given multidegree, in a fixed order.
pub fn b_elements(md: &Multidegree) -> Vec<BSetElement> {
    let d = md.degree();
    let letters = md.letters();
    let x = Generator::X;
    let mut out = Vec::new();
    match d {
        0 => {}
        1 => out.push(BSetElement {
            family: BFamily::X,
            exponent: 0,
            indices: letters.clone(),
            value: PermElement::x(letters[0]),
        }),
        2 => {
            let (a, b) = (letters[0], letters[1]);
            let pairs = if a == b { vec![(a, a)] } else { vec![(a, b), (b, a)] };
            for (i, j) in pairs {
                let value = &left_normed(&[x(i), Generator::P, x(j)]) - &left_normed(&[x(j), Generator::Q, x(i)]);
                out.push(BSetElement { family: BFamily::B1, exponent: 0, indices: vec![i, j], value });
            }
        }
        _ => {
            let pq = &PermElement::p() - &PermElement::q();
            let scalar = pq.pow(d - 1);
            for j1 in md.support() {
                let rest = md.checked_sub(&Multidegree::of_indices([j1])).unwrap().letters();
                let mut word: Vec<Generator> = rest.iter().rev().map(|&j| x(j)).collect();
                word.push(x(j1));
                let mut indices = vec![j1];
                indices.extend(&rest);
                out.push(BSetElement {
                    family: BFamily::B2,
                    exponent: 0,
                    indices,
                    value: scalar.multiply(&left_normed(&word)),
                });
            }
            let j1 = letters[0];
            for j2 in md.support().filter(|&j| j > j1) {
                let rest = md.checked_sub(&Multidegree::of_indices([j1, j2])).unwrap().letters();
                let comm = PermElement::x(j2).commutator(&PermElement::x(j1));
                for i in 1..d {
                    let mut word = vec![Generator::P; (d - 1 - i) as usize];
                    word.extend(std::iter::repeat(Generator::Q).take(i as usize));
                    word.extend(rest.iter().rev().map(|&j| x(j)));
                    let mut indices = vec![j1, j2];
                    indices.extend(&rest);
                    out.push(BSetElement {
                        family: BFamily::B3,
                        exponent: i,
                        indices,
                        value: left_normed(&word).multiply(&comm),
                    });
                }
            }
        }
    }
    out
}

/// All members of B over `x1..x{n_vars}` of x-degree at most `max_degree`,
/// ordered by degree, then multidegree, then family.
pub fn enumerate_b(n_vars: u32, max_degree: u32) -> Vec<BSetElement> {
    let mut out = Vec::new();
    for d in 1..=max_degree {
        for md in Multidegree::all_of_degree(n_vars, d) {
            out.extend(b_elements(&md));
        }
    }
    out
}

/// Coordinates for the homogeneous component of `P(X ∪ {p,q})` with a given
/// x-multidegree `m` and parameter degree `|m| - 1`, where all mutation
/// elements of multidegree `m` live.
#[derive(Clone, Debug)]
pub struct ComponentSpace {
    monomials: Vec<PermMonomial>,
    index: HashMap<PermMonomial, usize>,
}

impl ComponentSpace {
    pub fn new(md: &Multidegree) -> Self {
        let d = md.degree() as usize;
        let xs: Vec<Generator> = md.letters().into_iter().map(Generator::X).collect();
        let mut monomials = Vec::new();
        for n_p in 0..d {
            let mut letters = xs.clone();
            letters.extend(std::iter::repeat(Generator::P).take(n_p));
            letters.extend(std::iter::repeat(Generator::Q).take(d - 1 - n_p));
            monomials.extend(PermMonomial::all_with_letters(&letters));
        }
        monomials.sort();
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        ComponentSpace { monomials, index }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    /// `None` if `e` has a monomial outside the component.
    pub fn vector(&self, e: &PermElement) -> Option<SparseVector> {
        let mut pairs = Vec::with_capacity(e.len());
        for (m, c) in e.terms() {
            pairs.push((*self.index.get(m)?, c.clone()));
        }
        Some(SparseVector::from_pairs(pairs))
    }

    pub fn element(&self, v: &SparseVector) -> PermElement {
        PermElement::from_terms(v.iter().map(|(i, c)| (self.monomials[i].clone(), c.clone())))
    }

    pub fn echelon_of<'a>(&self, elems: impl IntoIterator<Item = &'a PermElement>) -> Echelon {
        let mut ech = Echelon::new(self.dim());
        for e in elems {
            ech.insert(&self.vector(e).expect("element lies in the component"));
        }
        ech
    }
}

/// Relabels a multidegree so that counts decrease along `x1, x2, ...`.
/// Returns the canonical multidegree and, for each canonical variable
/// `k` (1-based), the original variable it stands for.
fn canonical_relabel(md: &Multidegree) -> (Multidegree, Vec<u32>) {
    let mut vars: Vec<(u32, u32)> = md.iter().collect();
    vars.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let canon = Multidegree::from_counts(vars.iter().enumerate().map(|(k, &(_, c))| (k as u32 + 1, c)));
    (canon, vars.into_iter().map(|(i, _)| i).collect())
}

fn relabel(e: &PermElement, map: &[u32]) -> PermElement {
    e.rename(|g| match g {
        Generator::X(k) => Generator::X(map[k as usize - 1]),
        other => other,
    })
}

/// Bases of the homogeneous components of the mutation subalgebra, computed
/// recursively: the component of `m` is spanned by `<a,b>` with `a`, `b`
/// running over bases of complementary components. Results are cached up to
/// relabeling of variables.
#[derive(Default)]
pub struct MutationSpans {
    cache: HashMap<Multidegree, Vec<PermElement>>,
}

impl MutationSpans {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(&mut self, md: &Multidegree) -> Vec<PermElement> {
        let (canon, map) = canonical_relabel(md);
        let basis = self.canonical_basis(&canon);
        basis.iter().map(|e| relabel(e, &map)).collect()
    }

    fn canonical_basis(&mut self, md: &Multidegree) -> Vec<PermElement> {
        if let Some(b) = self.cache.get(md) {
            return b.clone();
        }
        let basis = if md.degree() == 1 {
            vec![PermElement::x(md.letters()[0])]
        } else {
            let space = ComponentSpace::new(md);
            let mut ech = Echelon::new(space.dim());
            let mut basis = Vec::new();
            'outer: for m1 in md.proper_parts() {
                let m2 = md.checked_sub(&m1).unwrap();
                let left = self.basis(&m1);
                let right = self.basis(&m2);
                for a in &left {
                    for b in &right {
                        let e = mutate(a, b);
                        if ech.insert(&space.vector(&e).expect("bracket stays in the component")) {
                            basis.push(e);
                            if ech.is_full() {
                                break 'outer;
                            }
                        }
                    }
                }
            }
            basis
        };
        self.cache.insert(md.clone(), basis.clone());
        basis
    }

    /// Dimension of the component of multidegree `md`.
    pub fn dim(&mut self, md: &Multidegree) -> usize {
        let (canon, _) = canonical_relabel(md);
        self.canonical_basis(&canon).len()
    }

    pub fn contains(&mut self, e: &PermElement) -> bool {
        for (md, part) in e.homogeneous_parts() {
            let graded = part.terms().all(|(m, _)| {
                let (a, b) = m.param_degrees();
                m.x_degree() >= 1 && a + b + 1 == m.x_degree()
            });
            if !graded {
                return false;
            }
            let space = ComponentSpace::new(&md);
            let basis = self.basis(&md);
            let ech = space.echelon_of(&basis);
            if !ech.contains(&space.vector(&part).expect("graded part lies in the component")) {
                return false;
            }
        }
        true
    }
}

/// Every bracket monomial of the given multidegree, as a bracket term over
/// leaves `x_i`: all tree shapes times all arrangements of the letters.
pub fn bracket_monomials(md: &Multidegree) -> Vec<BracketTerm> {
    if md.degree() == 1 {
        return vec![BracketTerm::leaf(format!("x{}", md.letters()[0]))];
    }
    let mut out = Vec::new();
    for m1 in md.proper_parts() {
        let m2 = md.checked_sub(&m1).unwrap();
        let right = bracket_monomials(&m2);
        for a in bracket_monomials(&m1) {
            for b in &right {
                out.push(BracketTerm::bracket(a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Expansions of all bracket monomials of multidegree `md`.
pub fn bracket_span(md: &Multidegree) -> Vec<PermElement> {
    bracket_monomials(md)
        .into_iter()
        .map(|t| expand(&BracketPolynomial::from_term(t), &Assignment::new()).expect("leaves are generators"))
        .collect()
}

/// Whether `e` lies in the subalgebra of the mutation generated by `X`.
pub fn is_mutation_element(e: &PermElement) -> bool {
    MutationSpans::new().contains(e)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BasisReport {
    pub n_vars: u32,
    pub degree: u32,
    pub independent: bool,
    pub spans: bool,
    pub members_are_mutation_elements: bool,
    pub closed_under_bracket: bool,
    /// Dimension of the multilinear component in `x1..x{degree}` (0 when
    /// there are fewer variables than the degree).
    pub multilinear_dim: usize,
    pub b_count: usize,
    pub b1_count: usize,
    pub b1_off_diagonal: usize,
    pub failures: Vec<String>,
}

impl BasisReport {
    pub fn passed(&self) -> bool {
        self.independent && self.spans && self.members_are_mutation_elements && self.closed_under_bracket
    }
}

/// Checks, one multidegree at a time up to `degree`, that B is independent,
/// spans the mutation subalgebra, lies in it, and that brackets of members of
/// combined degree at most `degree` stay in its span.
pub fn verify_basis_b(n_vars: u32, degree: u32) -> BasisReport {
    let mut spans_cache = MutationSpans::new();
    let mut report = BasisReport {
        n_vars,
        degree,
        independent: true,
        spans: true,
        members_are_mutation_elements: true,
        closed_under_bracket: true,
        multilinear_dim: 0,
        b_count: 0,
        b1_count: 0,
        b1_off_diagonal: 0,
        failures: Vec::new(),
    };
    let mut by_md: BTreeMap<Multidegree, (Vec<BSetElement>, ComponentSpace, Echelon)> = BTreeMap::new();
    for d in 1..=degree {
        for md in Multidegree::all_of_degree(n_vars, d) {
            let b = b_elements(&md);
            let space = ComponentSpace::new(&md);
            let ech = space.echelon_of(b.iter().map(|e| &e.value));
            report.b_count += b.len();
            for e in b.iter().filter(|e| e.family == BFamily::B1) {
                report.b1_count += 1;
                if e.indices[0] != e.indices[1] {
                    report.b1_off_diagonal += 1;
                }
            }
            if ech.rank() != b.len() {
                report.independent = false;
                report.failures.push(format!("B is dependent in multidegree {md}"));
            }
            let mutation_basis = spans_cache.basis(&md);
            let mutation_ech = space.echelon_of(&mutation_basis);
            if let Some(e) = mutation_basis.iter().find(|e| !ech.contains(&space.vector(e).unwrap())) {
                report.spans = false;
                report.failures.push(format!("{e} is outside span(B) in multidegree {md}"));
            }
            if let Some(e) = b.iter().find(|e| !mutation_ech.contains(&space.vector(&e.value).unwrap())) {
                report.members_are_mutation_elements = false;
                report.failures.push(format!("{} member {} is not a mutation element", e.family, e.value));
            }
            if md == Multidegree::multilinear(d) && d == degree {
                report.multilinear_dim = mutation_ech.rank();
            }
            by_md.insert(md, (b, space, ech));
        }
    }
    let keys: Vec<Multidegree> = by_md.keys().cloned().collect();
    for m1 in &keys {
        for m2 in &keys {
            if m1.degree() + m2.degree() > degree {
                continue;
            }
            let target = m1.sum(m2);
            let (_, space, ech) = &by_md[&target];
            for a in &by_md[m1].0 {
                for b in &by_md[m2].0 {
                    let e = mutate(&a.value, &b.value);
                    if !ech.contains(&space.vector(&e).expect("bracket stays in the component")) {
                        report.closed_under_bracket = false;
                        report.failures.push(format!("<{}, {}> leaves span(B)", a.value, b.value));
                    }
                }
            }
        }
    }
    report
}

/// A random element over `x1, x2, x3, p, q` with small integer coefficients.
pub fn random_element(rng: &mut impl Rng) -> PermElement {
    let alphabet = [Generator::X(1), Generator::X(2), Generator::X(3), Generator::P, Generator::Q];
    let mut e = PermElement::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(1..=3);
        let word: Vec<Generator> = (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        let c = loop {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                break c;
            }
        };
        e.add_term(PermMonomial::from_word(&word).unwrap(), Rational::from(c));
    }
    e
}

type Relation = (&'static str, fn(&PermElement, &PermElement, &PermElement) -> (PermElement, PermElement));

fn relations() -> Vec<Relation> {
    fn m(a: &PermElement, b: &PermElement) -> PermElement {
        a.multiply(b)
    }
    vec![
        ("<a,b> = (p-q)ab + q[a,b]", |a, b, _| {
            let pq = &PermElement::p() - &PermElement::q();
            (mutate(a, b), &m(&m(&pq, a), b) + &m(&PermElement::q(), &a.commutator(b)))
        }),
        ("<a,bc> = b<a,c>", |a, b, c| (mutate(a, &m(b, c)), m(b, &mutate(a, c)))),
        ("<ab,c> = a<b,c>", |a, b, c| (mutate(&m(a, b), c), m(a, &mutate(b, c)))),
        ("<a,[b,c]> = p a[b,c]", |a, b, c| (mutate(a, &b.commutator(c)), m(&m(&PermElement::p(), a), &b.commutator(c)))),
        ("<[a,b],c> = -q c[a,b]", |a, b, c| {
            (mutate(&a.commutator(b), c), -&m(&m(&PermElement::q(), c), &a.commutator(b)))
        }),
        ("<b,<a,c>> = ap<b,c> - cq<b,a>", |a, b, c| {
            let (p, q) = (PermElement::p(), PermElement::q());
            (mutate(b, &mutate(a, c)), &m(&m(a, &p), &mutate(b, c)) - &m(&m(c, &q), &mutate(b, a)))
        }),
    ]
}

/// The bracket-rewriting relations of the mutation, checked at `a, b, c =
/// x1, x2, x3`, with `a = 0`, and at `samples` random triples.
pub fn check_relations(seed: u64, samples: usize) -> Report {
    let mut report = Report::new("mutation relations");
    let mut rng = StdRng::seed_from_u64(seed);
    let triples: Vec<[PermElement; 3]> = (0..samples)
        .map(|_| [random_element(&mut rng), random_element(&mut rng), random_element(&mut rng)])
        .collect();
    let symbolic = [PermElement::x(1), PermElement::x(2), PermElement::x(3)];
    let with_zero = [PermElement::zero(), PermElement::x(2), PermElement::x(3)];
    for (name, rel) in relations() {
        let check = |[a, b, c]: &[PermElement; 3]| {
            let (l, r) = rel(a, b, c);
            if l == r {
                None
            } else {
                Some(format!("a = {a}, b = {b}, c = {c}: {l} != {r}"))
            }
        };
        let sym = check(&symbolic);
        report.push(format!("{name} (generators)"), sym.is_none(), sym.unwrap_or_default());
        let zero = check(&with_zero);
        report.push(format!("{name} (a = 0)"), zero.is_none(), zero.unwrap_or_default());
        let rand_fail = triples.iter().find_map(check);
        let detail = rand_fail.clone().unwrap_or_else(|| format!("{samples} random triples"));
        report.push(format!("{name} (random)"), rand_fail.is_none(), detail);
    }
    report
}
