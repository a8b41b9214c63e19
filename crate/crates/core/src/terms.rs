//! Bracket polynomials: rational combinations of binary trees over named
//! variables, with two node kinds.
//!
//! `<a,b>` is the mutation bracket and `a*b` the ordinary product of the
//! underlying algebra. Square brackets are not used here; they belong to the
//! perm-side commutator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use thiserror::Error;

use crate::linalg::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error("{name} expects {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    /// The mutation bracket `<x,y>`.
    Bracket,
    /// The ordinary product `x*y`.
    Product,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BracketTerm {
    Leaf(String),
    Node(NodeKind, Box<BracketTerm>, Box<BracketTerm>),
}

impl BracketTerm {
    pub fn leaf(name: impl Into<String>) -> Self {
        BracketTerm::Leaf(name.into())
    }

    pub fn bracket(l: BracketTerm, r: BracketTerm) -> Self {
        BracketTerm::Node(NodeKind::Bracket, Box::new(l), Box::new(r))
    }

    pub fn product(l: BracketTerm, r: BracketTerm) -> Self {
        BracketTerm::Node(NodeKind::Product, Box::new(l), Box::new(r))
    }

    pub fn degree(&self) -> usize {
        match self {
            BracketTerm::Leaf(_) => 1,
            BracketTerm::Node(_, l, r) => l.degree() + r.degree(),
        }
    }

    /// Leaf names from left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            BracketTerm::Leaf(n) => out.push(n),
            BracketTerm::Node(_, l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn node_kinds(&self, out: &mut BTreeSet<NodeKind>) {
        if let BracketTerm::Node(k, l, r) = self {
            out.insert(*k);
            l.node_kinds(out);
            r.node_kinds(out);
        }
    }

    /// Replaces the leaves, in left-to-right order, by `names`.
    fn with_leaves(&self, names: &mut impl Iterator<Item = String>) -> BracketTerm {
        match self {
            BracketTerm::Leaf(_) => BracketTerm::Leaf(names.next().expect("leaf count")),
            BracketTerm::Node(k, l, r) => {
                let l = l.with_leaves(names);
                let r = r.with_leaves(names);
                BracketTerm::Node(*k, Box::new(l), Box::new(r))
            }
        }
    }
}

impl fmt::Display for BracketTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketTerm::Leaf(n) => f.write_str(n),
            BracketTerm::Node(NodeKind::Bracket, l, r) => write!(f, "<{l},{r}>"),
            BracketTerm::Node(NodeKind::Product, l, r) => write!(f, "({l}*{r})"),
        }
    }
}

/// A rational linear combination of [`BracketTerm`]s.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BracketPolynomial {
    terms: BTreeMap<BracketTerm, Rational>,
}

impl BracketPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(name: impl Into<String>) -> Self {
        Self::from_term(BracketTerm::leaf(name))
    }

    pub fn from_term(t: BracketTerm) -> Self {
        Self::from_terms([(t, Rational::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (BracketTerm, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (t, c) in terms {
            p.add_term(t, c);
        }
        p
    }

    pub fn add_term(&mut self, t: BracketTerm, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(t).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BracketTerm, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &BracketTerm) -> Rational {
        self.terms.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BracketPolynomial { terms: self.terms.iter().map(|(t, v)| (t.clone(), v * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// Bilinear extension of a node constructor.
    pub fn combine(&self, kind: NodeKind, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(BracketTerm::Node(kind, Box::new(a.clone()), Box::new(b.clone())), ca * cb);
            }
        }
        out
    }

    /// `<self, other>`.
    pub fn bracket(&self, other: &Self) -> Self {
        self.combine(NodeKind::Bracket, other)
    }

    /// `self * other` in the underlying algebra.
    pub fn product(&self, other: &Self) -> Self {
        self.combine(NodeKind::Product, other)
    }

    /// `<a,b> - <b,a>`.
    pub fn circ(&self, other: &Self) -> Self {
        self.bracket(other).sub(&other.bracket(self))
    }

    /// `<a,b> + <b,a>`.
    pub fn bullet(&self, other: &Self) -> Self {
        self.bracket(other).add(&other.bracket(self))
    }

    /// Bracket associator `<<a,b>,c> - <a,<b,c>>`.
    pub fn assoc(a: &Self, b: &Self, c: &Self) -> Self {
        a.bracket(b).bracket(c).sub(&a.bracket(&b.bracket(c)))
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|t| t.leaves().into_iter().map(str::to_string)).collect()
    }

    pub fn node_kinds(&self) -> BTreeSet<NodeKind> {
        let mut out = BTreeSet::new();
        for t in self.terms.keys() {
            t.node_kinds(&mut out);
        }
        out
    }

    /// Whether every monomial uses each of its variables exactly once.
    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|t| t.leaves().iter().all_unique())
    }

    /// Simultaneous substitution of variables by polynomials; unmapped
    /// variables stay as they are.
    pub fn substitute(&self, map: &BTreeMap<String, BracketPolynomial>) -> Self {
        let mut out = Self::zero();
        for (t, c) in &self.terms {
            out = out.add(&substitute_term(t, map).scale(c));
        }
        out
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Self {
        let polys = map.iter().map(|(k, v)| (k.clone(), Self::var(v.clone()))).collect();
        self.substitute(&polys)
    }

    /// Full polarization in characteristic zero.
    ///
    /// In every monomial, a variable `y` occurring `k > 1` times is replaced by
    /// the sum over all ways of assigning `y#1 .. y#k` to its `k` occurrences.
    /// Variables occurring once are left alone.
    pub fn multilinearize(&self) -> Self {
        let mut out = Self::zero();
        for (t, c) in &self.terms {
            let leaves: Vec<String> = t.leaves().into_iter().map(str::to_string).collect();
            let mut positions: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, l) in leaves.iter().enumerate() {
                positions.entry(l.as_str()).or_default().push(i);
            }
            let repeated: Vec<(&str, &Vec<usize>)> =
                positions.iter().filter(|(_, p)| p.len() > 1).map(|(n, p)| (*n, p)).collect();
            if repeated.is_empty() {
                out.add_term(t.clone(), c.clone());
                continue;
            }
            let choices = repeated
                .iter()
                .map(|(_, p)| (1..=p.len()).permutations(p.len()).collect::<Vec<_>>())
                .multi_cartesian_product();
            for assignment in choices {
                let mut names = leaves.clone();
                for ((name, pos), perm) in repeated.iter().zip(&assignment) {
                    for (&at, copy) in pos.iter().zip(perm) {
                        names[at] = format!("{name}#{copy}");
                    }
                }
                out.add_term(t.with_leaves(&mut names.into_iter()), c.clone());
            }
        }
        out
    }

    /// Exact equality as formal combinations of trees.
    pub fn structural_equal(&self, other: &Self) -> bool {
        self == other
    }

    pub fn parse(text: &str) -> Result<Self, TermError> {
        text.parse()
    }
}

fn substitute_term(t: &BracketTerm, map: &BTreeMap<String, BracketPolynomial>) -> BracketPolynomial {
    match t {
        BracketTerm::Leaf(n) => map.get(n).cloned().unwrap_or_else(|| BracketPolynomial::var(n.clone())),
        BracketTerm::Node(k, l, r) => substitute_term(l, map).combine(*k, &substitute_term(r, map)),
    }
}

impl fmt::Display for BracketPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (t, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BracketPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BracketPolynomial({self})")
    }
}

impl FromStr for BracketPolynomial {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let poly = p.poly()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(poly)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> TermError {
        TermError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), TermError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn poly(&mut self) -> Result<BracketPolynomial, TermError> {
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = BracketPolynomial::zero();
        loop {
            let t = self.term()?;
            acc = if negate { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn term(&mut self) -> Result<BracketPolynomial, TermError> {
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let mut text = self.digits();
            if self.src.get(self.pos) == Some(&b'/') {
                self.pos += 1;
                let den = self.digits();
                if den.is_empty() {
                    return Err(self.err("expected denominator"));
                }
                text = format!("{text}/{den}");
            }
            let c: Rational = text.parse().map_err(|_| self.err("bad rational"))?;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                return Ok(self.product()?.scale(&c));
            }
            if c.is_zero() {
                return Ok(BracketPolynomial::zero());
            }
            return Err(self.err("a coefficient must be followed by '*'"));
        }
        self.product()
    }

    fn product(&mut self) -> Result<BracketPolynomial, TermError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = acc.product(&rhs);
        }
        Ok(acc)
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => self.pos += 1,
            _ => return None,
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || matches!(self.src[self.pos], b'_' | b'#'))
        {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<BracketPolynomial, TermError> {
        match self.peek() {
            Some(b'<') => {
                self.pos += 1;
                let l = self.poly()?;
                self.expect(b',')?;
                let r = self.poly()?;
                self.expect(b'>')?;
                Ok(l.bracket(&r))
            }
            Some(b'(') => {
                self.pos += 1;
                let p = self.poly()?;
                self.expect(b')')?;
                Ok(p)
            }
            _ => {
                let at = self.pos;
                let Some(name) = self.ident() else {
                    return Err(self.err("expected a variable, '<', '(' or a function call"));
                };
                if self.src.get(self.pos) != Some(&b'(') {
                    return Ok(BracketPolynomial::var(name));
                }
                self.pos += 1;
                let mut args = vec![self.poly()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    args.push(self.poly()?);
                }
                self.expect(b')')?;
                apply_function(&name, &args).map_err(|e| match e {
                    TermError::Syntax { msg, .. } => TermError::Syntax { pos: at, msg },
                    other => other,
                })
            }
        }
    }
}

fn apply_function(name: &str, args: &[BracketPolynomial]) -> Result<BracketPolynomial, TermError> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(TermError::Arity { name: name.to_string(), expected: n, got: args.len() })
        }
    };
    match name {
        "circ" => {
            arity(2)?;
            Ok(args[0].circ(&args[1]))
        }
        "bullet" => {
            arity(2)?;
            Ok(args[0].bullet(&args[1]))
        }
        "assoc" => {
            arity(3)?;
            Ok(BracketPolynomial::assoc(&args[0], &args[1], &args[2]))
        }
        _ => {
            let t = IdentityTemplate::builtin(name).ok_or_else(|| TermError::UnknownFunction(name.to_string()))?;
            t.instantiate_polys(args)
        }
    }
}

/// A named polynomial in formal slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityTemplate {
    pub name: String,
    pub slots: Vec<String>,
    pub body: BracketPolynomial,
}

/// `(name, slots, body)` for every built-in template.
const BUILTINS: &[(&str, &[&str], &str)] = &[
    ("f", &["a", "b", "c"], "<<a,b>,c> - <<a,c>,b> - <<b,a>,c> + <<b,c>,a> + <<c,a>,b> - <<c,b>,a>"),
    ("ftilde", &["a", "b", "c"], "<a,<b,c>> - <a,<c,b>> - <b,<a,c>> + <b,<c,a>> + <c,<a,b>> - <c,<b,a>>"),
    ("wa", &["a", "b", "c"], "assoc(a,b,c) + assoc(b,c,a) - assoc(b,a,c)"),
    ("flex", &["a", "b", "c"], "assoc(a,b,c) + assoc(c,b,a)"),
    (
        "hbar",
        &["a", "b", "c", "d"],
        "<<a,b>,<c,d>> + <<a,c>,<b,d>> + <<b,a>,<c,d>> + <<b,c>,<a,d>> + <<c,a>,<b,d>> + <<c,b>,<a,d>> \
         - <a,<<b,c>,d>> - <a,<<c,b>,d>> - <b,<<a,c>,d>> - <b,<<c,a>,d>> - <c,<<a,b>,d>> - <c,<<b,a>,d>>",
    ),
    // slots follow the argument order (x1, x3, x2, x4)
    (
        "ibar",
        &["a", "b", "c", "d"],
        "assoc(c, bullet(a,d), b) - bullet(assoc(c,d,b), a) - bullet(assoc(c,a,b), d)",
    ),
    ("conj4a", &["a", "b", "c", "d"], "<<<a,b>,c>,d> + <<<c,d>,a>,b> - <<<a,d>,c>,b> - <<<c,b>,a>,d>"),
    (
        "conj4b",
        &["a", "b", "c", "d"],
        "<<a,b>,<d,c>> + <<c,<b,a>>,d> + <<<b,a>,c>,d> - <<<a,b>,d>,c> - <<<b,c>,a>,d> - <<<c,a>,b>,d>",
    ),
    (
        "crit36",
        &["a", "b", "c", "y"],
        "(a*y)*((b*y)*c) - (((a*y)*b)*y)*c - (a*y)*((c*y)*b) + (((a*y)*c)*y)*b \
         - (b*y)*((a*y)*c) + (((b*y)*a)*y)*c + (b*y)*((c*y)*a) - (((b*y)*c)*y)*a \
         + (c*y)*((a*y)*b) - (((c*y)*a)*y)*b - (c*y)*((b*y)*a) + (((c*y)*b)*y)*a",
    ),
];

impl IdentityTemplate {
    pub fn new(name: impl Into<String>, slots: Vec<String>, body: BracketPolynomial) -> Self {
        IdentityTemplate { name: name.into(), slots, body }
    }

    pub fn builtin(name: &str) -> Option<IdentityTemplate> {
        let (n, slots, body) = BUILTINS.iter().find(|(n, _, _)| *n == name)?;
        let body: BracketPolynomial = body.parse().expect("built-in template parses");
        Some(IdentityTemplate::new(*n, slots.iter().map(|s| s.to_string()).collect(), body))
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTINS.iter().map(|(n, _, _)| *n)
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    /// Degree of the body (all built-ins are homogeneous).
    pub fn degree(&self) -> usize {
        self.body.terms().map(|(t, _)| t.degree()).max().unwrap_or(0)
    }

    pub fn instantiate(&self, args: &[&str]) -> Result<BracketPolynomial, TermError> {
        let polys: Vec<BracketPolynomial> = args.iter().map(|a| BracketPolynomial::var(*a)).collect();
        self.instantiate_polys(&polys)
    }

    pub fn instantiate_polys(&self, args: &[BracketPolynomial]) -> Result<BracketPolynomial, TermError> {
        if args.len() != self.arity() {
            return Err(TermError::Arity { name: self.name.clone(), expected: self.arity(), got: args.len() });
        }
        let map = self.slots.iter().cloned().zip(args.iter().cloned()).collect();
        Ok(self.body.substitute(&map))
    }
}
