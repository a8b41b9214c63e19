//! Multilinear identities of the mutation: the magmatic basis, the expansion
//! map into the free perm algebra, its kernel, and consequences of a set of
//! identities computed one degree at a time.

use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

use crate::linalg::{kernel_basis, Echelon, Rational, RationalMatrix, SparseVector};
use crate::mutation::{expand_generic, mutate, ComponentSpace};
use crate::perm::{Multidegree, PermElement};
use crate::symmetric;
use crate::terms::{BracketPolynomial, BracketTerm, IdentityTemplate, NodeKind, TermError};

pub const DEFAULT_DEGREE_LIMIT: usize = 5;
pub const MAX_DEGREE_LIMIT: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("degree {degree} exceeds the configured limit {limit}")]
    LimitExceeded { degree: usize, limit: usize },
    #[error("identity {name} has degree {degree}, above the target degree {target}")]
    DegreeTooHigh { name: String, degree: usize, target: usize },
    #[error("{0} is not multilinear and homogeneous")]
    NotMultilinear(String),
    #[error("{name} is not an identity: it expands to {witness}")]
    NotAnIdentity { name: String, witness: String },
    #[error("identities mix the bracket and the ordinary product")]
    MixedKinds,
    #[error("term {term} does not use the basis node kind or leaves x1..x{degree}")]
    OutsideBasis { term: String, degree: usize },
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Polish encoding of a magmatic monomial: `NODE` followed by the encodings
/// of the two children, or a leaf index `1..=n`.
pub type Code = Vec<u8>;
const NODE: u8 = 0;

fn shapes(n: usize) -> Vec<Code> {
    if n == 1 {
        return vec![vec![1]];
    }
    let mut out = Vec::new();
    for l in 1..n {
        let right = shapes(n - l);
        for a in shapes(l) {
            for b in &right {
                let mut c = Vec::with_capacity(2 * n - 1);
                c.push(NODE);
                c.extend(&a);
                c.extend(b);
                out.push(c);
            }
        }
    }
    out
}

fn relabel_code(code: &[u8], mut f: impl FnMut(u8) -> u8) -> Code {
    code.iter().map(|&b| if b == NODE { NODE } else { f(b) }).collect()
}

fn code_to_term(code: &[u8], kind: NodeKind) -> BracketTerm {
    fn go(code: &[u8], pos: &mut usize, kind: NodeKind) -> BracketTerm {
        let b = code[*pos];
        *pos += 1;
        if b == NODE {
            let l = go(code, pos, kind);
            let r = go(code, pos, kind);
            BracketTerm::Node(kind, Box::new(l), Box::new(r))
        } else {
            BracketTerm::leaf(format!("x{b}"))
        }
    }
    go(code, &mut 0, kind)
}

fn term_to_code(t: &BracketTerm, kind: NodeKind, out: &mut Code) -> Option<()> {
    match t {
        BracketTerm::Leaf(name) => {
            let i: u8 = name.strip_prefix('x')?.parse().ok()?;
            (i != NODE).then_some(())?;
            out.push(i);
        }
        BracketTerm::Node(k, l, r) => {
            (*k == kind).then_some(())?;
            out.push(NODE);
            term_to_code(l, kind, out)?;
            term_to_code(r, kind, out)?;
        }
    }
    Some(())
}

/// The multilinear monomials of one degree over one binary operation.
///
/// Canonical order: tree shapes ordered recursively by the size of the left
/// subtree (smaller first), and for each shape all labelings by permutations
/// of `x1..xn` in lexicographic order.
#[derive(Clone, Debug)]
pub struct MagmaticBasis {
    degree: usize,
    kind: NodeKind,
    codes: Vec<Code>,
    index: HashMap<Code, usize>,
}

impl MagmaticBasis {
    pub fn new(n: usize, kind: NodeKind, limit: usize) -> Result<Self, IdentityError> {
        if n == 0 || n > limit.min(MAX_DEGREE_LIMIT) {
            return Err(IdentityError::LimitExceeded { degree: n, limit: limit.min(MAX_DEGREE_LIMIT) });
        }
        let perms: Vec<Vec<u8>> = (1..=n as u8).permutations(n).collect();
        let mut codes = Vec::new();
        for shape in shapes(n) {
            for perm in &perms {
                let mut leaf = perm.iter();
                codes.push(relabel_code(&shape, |_| *leaf.next().unwrap()));
            }
        }
        Ok(Self::from_codes(n, kind, codes))
    }

    /// The degree-3 order `a(bc), a(cb), b(ac), b(ca), c(ab), c(ba), (ab)c,
    /// (ac)b, (ba)c, (bc)a, (ca)b, (cb)a` with `a, b, c = x1, x2, x3`.
    pub fn paper_order(kind: NodeKind) -> Self {
        let words = ["abc", "acb", "bac", "bca", "cab", "cba"];
        let letter = |c: char| c as u8 - b'a' + 1;
        let mut codes = Vec::new();
        for w in words {
            let l: Vec<u8> = w.chars().map(letter).collect();
            codes.push(vec![NODE, l[0], NODE, l[1], l[2]]);
        }
        for w in words {
            let l: Vec<u8> = w.chars().map(letter).collect();
            codes.push(vec![NODE, NODE, l[0], l[1], l[2]]);
        }
        Self::from_codes(3, kind, codes)
    }

    fn from_codes(degree: usize, kind: NodeKind, codes: Vec<Code>) -> Self {
        let index = codes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        MagmaticBasis { degree, kind, codes, index }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[Code] {
        &self.codes
    }

    pub fn index_of(&self, code: &[u8]) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn term(&self, i: usize) -> BracketTerm {
        code_to_term(&self.codes[i], self.kind)
    }

    pub fn terms(&self) -> Vec<BracketTerm> {
        (0..self.len()).map(|i| self.term(i)).collect()
    }

    pub fn to_vector(&self, poly: &BracketPolynomial) -> Result<SparseVector, IdentityError> {
        let mut pairs = Vec::with_capacity(poly.len());
        for (t, c) in poly.terms() {
            let mut code = Vec::new();
            let i = term_to_code(t, self.kind, &mut code)
                .and_then(|_| self.index_of(&code))
                .ok_or_else(|| IdentityError::OutsideBasis { term: t.to_string(), degree: self.degree })?;
            pairs.push((i, c.clone()));
        }
        Ok(SparseVector::from_pairs(pairs))
    }

    pub fn to_polynomial(&self, v: &SparseVector) -> BracketPolynomial {
        BracketPolynomial::from_terms(v.iter().map(|(i, c)| (self.term(i), c.clone())))
    }
}

/// Expands magmatic bracket monomials, sharing work between common subtrees.
#[derive(Default)]
struct Expander {
    memo: HashMap<Code, PermElement>,
}

impl Expander {
    fn expand(&mut self, code: &[u8]) -> PermElement {
        if code.len() == 1 {
            return PermElement::x(code[0] as u32);
        }
        if let Some(e) = self.memo.get(code) {
            return e.clone();
        }
        let split = subtree_end(code, 1);
        let l = self.expand(&code[1..split]);
        let r = self.expand(&code[split..]);
        let e = mutate(&l, &r);
        self.memo.insert(code.to_vec(), e.clone());
        e
    }
}

/// End (exclusive) of the subtree starting at `start`.
fn subtree_end(code: &[u8], start: usize) -> usize {
    let mut need = 1usize;
    let mut pos = start;
    while need > 0 {
        if code[pos] == NODE {
            need += 1;
        } else {
            need -= 1;
        }
        pos += 1;
    }
    pos
}

/// Rows: magmatic bracket monomials of `basis`; columns: monomials of the
/// multilinear component of the free perm algebra in the global order.
pub fn expansion_matrix(basis: &MagmaticBasis) -> (RationalMatrix, ComponentSpace) {
    let space = ComponentSpace::new(&Multidegree::multilinear(basis.degree() as u32));
    let mut ex = Expander::default();
    let rows = basis
        .codes()
        .iter()
        .map(|c| space.vector(&ex.expand(c)).expect("expansion lies in the multilinear component"))
        .collect();
    (RationalMatrix::new(rows, space.dim()), space)
}

/// Basis (as coefficient vectors over `basis`) of the multilinear
/// identities of the given degree.
pub fn kernel_vectors(basis: &MagmaticBasis) -> Vec<SparseVector> {
    let (m, _) = expansion_matrix(basis);
    kernel_basis(&m.transpose())
}

pub fn identity_kernel(n: usize, limit: usize) -> Result<Vec<BracketPolynomial>, IdentityError> {
    let basis = MagmaticBasis::new(n, NodeKind::Bracket, limit)?;
    Ok(kernel_vectors(&basis).iter().map(|v| basis.to_polynomial(v)).collect())
}

/// Renames an identity to the variables `x1..xk` (in sorted order of the
/// original names) after full polarization, checking that every monomial
/// uses every variable exactly once.
pub fn standardize(poly: &BracketPolynomial) -> Result<BracketPolynomial, IdentityError> {
    let lin = poly.multilinearize();
    let vars = lin.variables();
    for (t, _) in lin.terms() {
        if t.degree() != vars.len() {
            return Err(IdentityError::NotMultilinear(poly.to_string()));
        }
    }
    let map = vars.iter().enumerate().map(|(i, v)| (v.clone(), format!("x{}", i + 1))).collect();
    Ok(lin.rename(&map))
}

/// A standardized identity from a template.
pub fn template_identity(t: &IdentityTemplate) -> Result<BracketPolynomial, IdentityError> {
    let slots: Vec<String> = (1..=t.arity()).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = slots.iter().map(String::as_str).collect();
    standardize(&t.instantiate(&refs)?)
}

fn degree_of(poly: &BracketPolynomial) -> usize {
    poly.variables().len()
}

fn kind_of(polys: &[BracketPolynomial]) -> Result<NodeKind, IdentityError> {
    let mut kinds = std::collections::BTreeSet::new();
    for p in polys {
        kinds.extend(p.node_kinds());
    }
    match kinds.len() {
        0 | 1 => Ok(kinds.into_iter().next().unwrap_or(NodeKind::Bracket)),
        _ => Err(IdentityError::MixedKinds),
    }
}

#[derive(Clone, Debug)]
pub struct ConsequenceOptions {
    /// Close the lifted vectors under all of `S_{d+1}` instead of coset
    /// representatives of `S_{d+1} / S_d`.
    pub full_permutations: bool,
    /// Per-degree dimension at which the span is known to be complete
    /// (e.g. the kernel dimension, once every input is known to be an
    /// identity). Reaching it ends the work at that degree early.
    pub ceilings: HashMap<usize, usize>,
    pub limit: usize,
}

impl Default for ConsequenceOptions {
    fn default() -> Self {
        ConsequenceOptions { full_permutations: false, ceilings: HashMap::new(), limit: DEFAULT_DEGREE_LIMIT }
    }
}

/// The span of consequences at one degree.
pub struct ConsequenceSpan {
    pub basis: MagmaticBasis,
    pub span: Echelon,
}

impl ConsequenceSpan {
    pub fn dim(&self) -> usize {
        self.span.rank()
    }

    pub fn contains(&self, poly: &BracketPolynomial) -> Result<bool, IdentityError> {
        Ok(self.span.contains(&self.basis.to_vector(&standardize(poly)?)?))
    }

    pub fn vectors(&self) -> Vec<SparseVector> {
        self.span.sorted_rows()
    }
}

fn insert_all(ech: &mut Echelon, vectors: impl IntoIterator<Item = SparseVector>, ceiling: Option<usize>) {
    for v in vectors {
        if ceiling.is_some_and(|c| ech.rank() >= c) || ech.is_full() {
            return;
        }
        ech.insert(&v);
    }
}

fn permuted(basis: &MagmaticBasis, v: &SparseVector, perm: &[u8]) -> SparseVector {
    SparseVector::from_pairs(v.iter().map(|(i, c)| {
        let code = relabel_code(&basis.codes()[i], |b| perm[b as usize - 1]);
        (basis.index_of(&code).expect("relabeling stays in the basis"), c.clone())
    }))
}

/// The ways of adding the variable `x{d+1}` to a degree-`d` monomial by one
/// application of the binary operation.
fn lifts(code: &[u8], d: usize) -> Vec<Code> {
    let x = (d + 1) as u8;
    let mut out = Vec::with_capacity(2 * d + 2);
    let mut outer = vec![NODE];
    outer.extend(code);
    outer.push(x);
    out.push(outer);
    let mut outer = vec![NODE, x];
    outer.extend(code);
    out.push(outer);
    for leaf in 1..=d as u8 {
        for right in [true, false] {
            let mut c = Vec::with_capacity(code.len() + 2);
            for &b in code {
                if b == leaf {
                    if right {
                        c.extend([NODE, leaf, x]);
                    } else {
                        c.extend([NODE, x, leaf]);
                    }
                } else {
                    c.push(b);
                }
            }
            out.push(c);
        }
    }
    out
}

fn lift_vector(from: &MagmaticBasis, to: &MagmaticBasis, v: &SparseVector) -> Vec<SparseVector> {
    let d = from.degree();
    let mut per_lift: Vec<Vec<(usize, Rational)>> = vec![Vec::with_capacity(v.nnz()); 2 * d + 2];
    for (i, c) in v.iter() {
        for (k, code) in lifts(&from.codes()[i], d).into_iter().enumerate() {
            per_lift[k].push((to.index_of(&code).expect("lift stays in the basis"), c.clone()));
        }
    }
    per_lift.into_iter().map(SparseVector::from_pairs).collect()
}

/// Multilinear consequences of `identities` at degree `n`.
///
/// Identities are standardized first. Starting from the lowest degree, the
/// span at degree `d` is lifted to `d + 1` by the four one-step operations,
/// closed under permutations, joined with the identities of degree `d + 1`
/// (with all their permutations) and reduced.
pub fn consequence_span(
    identities: &[BracketPolynomial],
    n: usize,
    options: &ConsequenceOptions,
) -> Result<ConsequenceSpan, IdentityError> {
    let std: Vec<BracketPolynomial> = identities.iter().map(standardize).collect::<Result<_, _>>()?;
    let kind = kind_of(&std)?;
    for (p, s) in identities.iter().zip(&std) {
        if degree_of(s) > n {
            return Err(IdentityError::DegreeTooHigh { name: p.to_string(), degree: degree_of(s), target: n });
        }
    }
    let start = std.iter().map(degree_of).min().unwrap_or(n).max(1);
    let mut prev: Option<ConsequenceSpan> = None;
    for d in start..=n {
        let basis = MagmaticBasis::new(d, kind, options.limit)?;
        let mut span = Echelon::new(basis.len());
        let ceiling = options.ceilings.get(&d).copied();
        let perms: Vec<Vec<u8>> = (1..=d as u8).permutations(d).collect();
        for id in std.iter().filter(|s| degree_of(s) == d) {
            let v = basis.to_vector(id)?;
            insert_all(&mut span, perms.iter().map(|p| permuted(&basis, &v, p)), ceiling);
        }
        if let Some(prev) = &prev {
            let reps: Vec<Vec<u8>> = if options.full_permutations {
                perms.clone()
            } else {
                let mut reps = vec![(1..=d as u8).collect::<Vec<u8>>()];
                for k in 1..d {
                    let mut t: Vec<u8> = (1..=d as u8).collect();
                    t.swap(k - 1, d - 1);
                    reps.push(t);
                }
                reps
            };
            for row in prev.vectors() {
                if ceiling.is_some_and(|c| span.rank() >= c) || span.is_full() {
                    break;
                }
                for lifted in lift_vector(&prev.basis, &basis, &row) {
                    insert_all(&mut span, reps.iter().map(|p| permuted(&basis, &lifted, p)), ceiling);
                }
            }
        }
        prev = Some(ConsequenceSpan { basis, span });
    }
    Ok(prev.expect("at least one degree"))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct NewIdentitiesReport {
    pub degree: usize,
    pub kernel_dim: usize,
    pub consequence_dim: usize,
    pub new_dim: usize,
    /// Fewest additional identities of this degree whose consequences
    /// close the gap, from the decomposition of the quotient of the kernel
    /// by the consequences into irreducible modules of the symmetric group.
    pub new_generators: usize,
    /// Nonzero multiplicities of irreducibles in that quotient, keyed by
    /// partition.
    pub quotient_multiplicities: Vec<(String, usize)>,
    pub consequences_are_identities: bool,
    /// Identities of the kernel reduced modulo the consequences, rendered.
    pub representatives: Vec<String>,
}

/// Compares the identities of degree `n` with the consequences of `known`.
pub fn new_identities(
    known: &[(String, BracketPolynomial)],
    n: usize,
    limit: usize,
) -> Result<NewIdentitiesReport, IdentityError> {
    let mut std = Vec::new();
    for (name, p) in known {
        let s = standardize(p)?;
        if kind_of(std::slice::from_ref(&s))? != NodeKind::Bracket {
            return Err(IdentityError::MixedKinds);
        }
        let e = expand_generic(&s);
        if !e.is_zero() {
            return Err(IdentityError::NotAnIdentity { name: name.clone(), witness: e.to_string() });
        }
        std.push(s);
    }
    let basis = MagmaticBasis::new(n, NodeKind::Bracket, limit)?;
    let (m, _) = expansion_matrix(&basis);
    let kernel = kernel_basis(&m.transpose());
    let mut ceilings = HashMap::new();
    for d in 1..n {
        let b = MagmaticBasis::new(d, NodeKind::Bracket, limit)?;
        let (md, _) = expansion_matrix(&b);
        ceilings.insert(d, b.len() - crate::linalg::rank(&md));
    }
    ceilings.insert(n, kernel.len());
    let cons = if std.is_empty() {
        ConsequenceSpan { span: Echelon::new(basis.len()), basis: basis.clone() }
    } else {
        consequence_span(&std, n, &ConsequenceOptions { ceilings, limit, ..Default::default() })?
    };
    let rows = cons.vectors();
    let consequences_are_identities = rows.iter().all(|r| m.left_mul(r).is_zero());
    let mut ech = cons.span.clone();
    let mut representatives = Vec::new();
    for v in &kernel {
        let r = ech.reduce(v);
        if !r.is_zero() {
            ech.insert(&r);
            let lead = r.entries()[0].1.clone();
            representatives.push(basis.to_polynomial(&r.scale(&lead.recip())).to_string());
        }
    }
    let mut kernel_span = Echelon::new(basis.len());
    for v in &kernel {
        kernel_span.insert(v);
    }
    let multiplicities = quotient_multiplicities(&basis, &kernel_span, &cons.span);
    let new_generators = multiplicities
        .iter()
        .map(|(lambda, m)| m.div_ceil(symmetric::dimension(lambda) as usize))
        .max()
        .unwrap_or(0);
    Ok(NewIdentitiesReport {
        degree: n,
        kernel_dim: kernel.len(),
        consequence_dim: cons.dim(),
        new_dim: representatives.len(),
        new_generators,
        quotient_multiplicities: multiplicities
            .into_iter()
            .map(|(l, m)| (format!("({})", l.iter().join(",")), m))
            .collect(),
        consequences_are_identities,
        representatives,
    })
}

/// Trace of the permutation `perm` on the span of `ech`, which must be
/// invariant under it.
fn trace_on(basis: &MagmaticBasis, ech: &Echelon, perm: &[u8]) -> Rational {
    ech.sorted_rows()
        .iter()
        .map(|w| permuted(basis, w, perm).get(w.first_index().expect("nonzero row")))
        .sum()
}

/// Multiplicities of the irreducible modules in `sup / sub`, both invariant
/// under all permutations of the variables.
pub fn quotient_multiplicities(basis: &MagmaticBasis, sup: &Echelon, sub: &Echelon) -> Vec<(Vec<usize>, usize)> {
    let n = basis.degree();
    let classes = symmetric::partitions(n);
    let chi: Vec<Rational> = classes
        .iter()
        .map(|mu| {
            let rep = symmetric::representative(mu);
            trace_on(basis, sup, &rep) - trace_on(basis, sub, &rep)
        })
        .collect();
    let order: i64 = (1..=n as i64).product();
    let mut out = Vec::new();
    for lambda in symmetric::partitions(n) {
        let ip: Rational = classes
            .iter()
            .zip(&chi)
            .map(|(mu, c)| c * &Rational::from(symmetric::class_size(mu) as i64 * symmetric::character(&lambda, mu)))
            .sum();
        let m = ip / Rational::from(order);
        assert!(m.is_integer() && !m.is_negative(), "quotient is not a module");
        let m = m.numer().to_string().parse::<usize>().expect("small multiplicity");
        if m > 0 {
            out.push((lambda, m));
        }
    }
    out
}

/// Whether `target` follows from `defining` (all over the same operation)
/// at the degree of `target`.
pub fn tideal_membership(
    target: &BracketPolynomial,
    defining: &[BracketPolynomial],
    limit: usize,
) -> Result<bool, IdentityError> {
    let t = standardize(target)?;
    let mut all = defining.to_vec();
    all.push(t.clone());
    kind_of(&all)?;
    let options = ConsequenceOptions { limit, ..Default::default() };
    let span = consequence_span(defining, degree_of(&t), &options)?;
    Ok(span.span.contains(&span.basis.to_vector(&t)?))
}

/// The twelve polynomials `f` and `WA` at all permutations of `a, b, c`
/// (`f` first, permutations in lexicographic order) against the degree-3
/// monomials in [`MagmaticBasis::paper_order`].
pub fn degree3_matrix() -> RationalMatrix {
    let basis = MagmaticBasis::paper_order(NodeKind::Bracket);
    let mut rows = Vec::new();
    for name in ["f", "wa"] {
        let t = IdentityTemplate::builtin(name).expect("built-in");
        for perm in ["x1", "x2", "x3"].into_iter().permutations(3) {
            let p = t.instantiate(&perm).expect("arity 3");
            rows.push(basis.to_vector(&p).expect("degree-3 bracket polynomial"));
        }
    }
    RationalMatrix::new(rows, basis.len())
}
