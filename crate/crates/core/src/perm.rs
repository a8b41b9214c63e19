//! The free perm algebra on `x1, x2, ...` and the two parameters `p`, `q`.
//!
//! A perm algebra is associative and left-commutative (`abc = bac`), so a
//! left-normed word is determined by the multiset of all letters but the last
//! plus the last letter. [`PermMonomial`] stores exactly that.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use itertools::Itertools;
use thiserror::Error;

use crate::linalg::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("empty word")]
    EmptyWord,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A generator of `P(X ∪ {p, q})`. Ordered `x1 < x2 < ... < p < q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    X(u32),
    P,
    Q,
}

impl Generator {
    pub fn is_param(self) -> bool {
        matches!(self, Generator::P | Generator::Q)
    }

    pub fn var_index(self) -> Option<u32> {
        match self {
            Generator::X(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::X(i) => write!(f, "x{i}"),
            Generator::P => f.write_str("p"),
            Generator::Q => f.write_str("q"),
        }
    }
}

impl FromStr for Generator {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p" => Ok(Generator::P),
            "q" => Ok(Generator::Q),
            _ => s
                .strip_prefix('x')
                .and_then(|d| d.parse::<u32>().ok())
                .filter(|&i| i >= 1 && !s[1..].starts_with('+'))
                .map(Generator::X)
                .ok_or(PermError::Parse { pos: 0, msg: format!("not a generator: {s:?}") }),
        }
    }
}

/// Multiplicities of the variables `x_i` (parameters are not counted).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multidegree(BTreeMap<u32, u32>);

impl Multidegree {
    pub fn new() -> Self {
        Self::default()
    }

    /// `x1 .. xn`, each once.
    pub fn multilinear(n: u32) -> Self {
        Multidegree((1..=n).map(|i| (i, 1)).collect())
    }

    pub fn from_counts<I: IntoIterator<Item = (u32, u32)>>(counts: I) -> Self {
        let mut m = Multidegree::new();
        for (i, c) in counts {
            m.add_var(i, c);
        }
        m
    }

    /// Multidegree of a sequence of variable indices.
    pub fn of_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        Self::from_counts(indices.into_iter().map(|i| (i, 1)))
    }

    pub fn add_var(&mut self, var: u32, count: u32) {
        if count > 0 {
            *self.0.entry(var).or_insert(0) += count;
        }
    }

    pub fn get(&self, var: u32) -> u32 {
        self.0.get(&var).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.values().all(|&c| c == 1)
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().map(|(&i, &c)| (i, c))
    }

    /// Letters of the multiset in ascending order, with repetition.
    pub fn letters(&self) -> Vec<u32> {
        self.0.iter().flat_map(|(&i, &c)| std::iter::repeat(i).take(c as usize)).collect()
    }

    pub fn dominates(&self, other: &Multidegree) -> bool {
        other.iter().all(|(i, c)| self.get(i) >= c)
    }

    /// `self - other`; `None` unless `self` dominates `other`.
    pub fn checked_sub(&self, other: &Multidegree) -> Option<Multidegree> {
        if !self.dominates(other) {
            return None;
        }
        Some(Multidegree::from_counts(self.iter().map(|(i, c)| (i, c - other.get(i)))))
    }

    pub fn sum(&self, other: &Multidegree) -> Multidegree {
        Multidegree::from_counts(self.iter().chain(other.iter()))
    }

    /// All `m` with `0 < m < self` componentwise, in a fixed order.
    pub fn proper_parts(&self) -> Vec<Multidegree> {
        let vars: Vec<(u32, u32)> = self.iter().collect();
        let total = self.degree();
        vars.iter()
            .map(|&(_, c)| 0..=c)
            .multi_cartesian_product()
            .map(|counts| Multidegree::from_counts(vars.iter().zip(counts).map(|(&(i, _), k)| (i, k))))
            .filter(|m| m.degree() > 0 && m.degree() < total)
            .collect()
    }

    /// All multidegrees over `x1..x{n_vars}` of total degree exactly `degree`.
    pub fn all_of_degree(n_vars: u32, degree: u32) -> Vec<Multidegree> {
        (1..=n_vars)
            .combinations_with_replacement(degree as usize)
            .map(Multidegree::of_indices)
            .collect()
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(i, c)| format!("x{i}:{c}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Canonical word of the free perm algebra: sorted prefix multiset plus tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermMonomial {
    prefix: Vec<Generator>,
    tail: Generator,
}

impl PermMonomial {
    pub fn new(mut prefix: Vec<Generator>, tail: Generator) -> Self {
        prefix.sort_unstable();
        PermMonomial { prefix, tail }
    }

    pub fn generator(g: Generator) -> Self {
        PermMonomial { prefix: Vec::new(), tail: g }
    }

    /// Normal form of the left-normed word `((w1 w2) ...) wn`.
    pub fn from_word(word: &[Generator]) -> Result<Self, PermError> {
        let (&tail, prefix) = word.split_last().ok_or(PermError::EmptyWord)?;
        Ok(Self::new(prefix.to_vec(), tail))
    }

    pub fn prefix(&self) -> &[Generator] {
        &self.prefix
    }

    pub fn tail(&self) -> Generator {
        self.tail
    }

    pub fn degree(&self) -> usize {
        self.prefix.len() + 1
    }

    fn letters(&self) -> impl Iterator<Item = Generator> + '_ {
        self.prefix.iter().copied().chain(std::iter::once(self.tail))
    }

    pub fn multidegree(&self) -> Multidegree {
        Multidegree::of_indices(self.letters().filter_map(Generator::var_index))
    }

    pub fn x_degree(&self) -> usize {
        self.letters().filter(|g| !g.is_param()).count()
    }

    /// `(count of p, count of q)`.
    pub fn param_degrees(&self) -> (usize, usize) {
        let p = self.letters().filter(|&g| g == Generator::P).count();
        let q = self.letters().filter(|&g| g == Generator::Q).count();
        (p, q)
    }

    pub fn mul(&self, other: &PermMonomial) -> PermMonomial {
        let mut prefix = Vec::with_capacity(self.prefix.len() + other.prefix.len() + 1);
        prefix.extend_from_slice(&self.prefix);
        prefix.push(self.tail);
        prefix.extend_from_slice(&other.prefix);
        PermMonomial::new(prefix, other.tail)
    }

    pub fn rename(&self, f: &impl Fn(Generator) -> Generator) -> PermMonomial {
        PermMonomial::new(self.prefix.iter().map(|&g| f(g)).collect(), f(self.tail))
    }

    /// Every canonical monomial whose letters are exactly `letters` (a multiset).
    pub fn all_with_letters(letters: &[Generator]) -> Vec<PermMonomial> {
        let mut sorted = letters.to_vec();
        sorted.sort_unstable();
        let mut out: Vec<PermMonomial> = sorted
            .iter()
            .dedup()
            .map(|&t| {
                let mut rest = sorted.clone();
                let pos = rest.iter().position(|&g| g == t).unwrap();
                rest.remove(pos);
                PermMonomial::new(rest, t)
            })
            .collect();
        out.sort();
        out
    }
}

impl Ord for PermMonomial {
    /// Total degree, then tail, then the sorted prefix lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.tail.cmp(&other.tail))
            .then_with(|| self.prefix.cmp(&other.prefix))
    }
}

impl PartialOrd for PermMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PermMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (count, g) in self.prefix.iter().dedup_with_count() {
            match count {
                1 => write!(f, "{g} ")?,
                k => write!(f, "{g}^{k} ")?,
            }
        }
        write!(f, "{}", self.tail)
    }
}

/// A finite rational combination of [`PermMonomial`]s.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PermElement {
    terms: BTreeMap<PermMonomial, Rational>,
}

impl PermElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator(g: Generator) -> Self {
        Self::monomial(PermMonomial::generator(g))
    }

    pub fn x(i: u32) -> Self {
        Self::generator(Generator::X(i))
    }

    pub fn p() -> Self {
        Self::generator(Generator::P)
    }

    pub fn q() -> Self {
        Self::generator(Generator::Q)
    }

    pub fn monomial(m: PermMonomial) -> Self {
        Self::term(m, Rational::one())
    }

    pub fn term(m: PermMonomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        PermElement { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (PermMonomial, Rational)>>(terms: I) -> Self {
        let mut e = PermElement::zero();
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    /// Product of generators, left-normed.
    pub fn word(word: &[Generator]) -> Result<Self, PermError> {
        PermMonomial::from_word(word).map(Self::monomial)
    }

    pub fn add_term(&mut self, m: PermMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
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

    pub fn terms(&self) -> impl Iterator<Item = (&PermMonomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &PermMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PermElement { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn multiply(&self, other: &PermElement) -> PermElement {
        let mut out = PermElement::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, other: &PermElement) -> PermElement {
        &self.multiply(other) - &other.multiply(self)
    }

    pub fn pow(&self, k: u32) -> PermElement {
        assert!(k >= 1, "the free perm algebra has no unit");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.multiply(self);
        }
        acc
    }

    pub fn rename(&self, f: impl Fn(Generator) -> Generator) -> PermElement {
        PermElement::from_terms(self.terms.iter().map(|(m, c)| (m.rename(&f), c.clone())))
    }

    /// Splits by x-multidegree.
    pub fn homogeneous_parts(&self) -> BTreeMap<Multidegree, PermElement> {
        let mut parts: BTreeMap<Multidegree, PermElement> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts.entry(m.multidegree()).or_default().add_term(m.clone(), c.clone());
        }
        parts
    }

    pub fn parse(text: &str) -> Result<Self, PermError> {
        text.parse()
    }
}

impl Add for &PermElement {
    type Output = PermElement;
    fn add(self, rhs: &PermElement) -> PermElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &PermElement {
    type Output = PermElement;
    fn sub(self, rhs: &PermElement) -> PermElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &PermElement {
    type Output = PermElement;
    fn neg(self) -> PermElement {
        self.scale(&-Rational::one())
    }
}

impl Mul for &PermElement {
    type Output = PermElement;
    fn mul(self, rhs: &PermElement) -> PermElement {
        self.multiply(rhs)
    }
}

impl fmt::Display for PermElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag} ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PermElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermElement({self})")
    }
}

impl FromStr for PermElement {
    type Err = PermError;

    /// Parses perm-side expressions such as `(p-q)^2 x1 x2 x3 + p q x1 [x2,x3]`.
    ///
    /// Juxtaposition (or `*`) is the left-normed perm product, `[a,b]` the
    /// commutator, `^k` a positive power; rational coefficients may lead a term.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = PermParser { src: s.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }
}

struct PermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl PermParser<'_> {
    fn err(&self, msg: &str) -> PermError {
        PermError::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<PermElement, PermError> {
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        let mut acc = PermElement::zero();
        loop {
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn coefficient(&mut self) -> Result<Option<Rational>, PermError> {
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Ok(None);
        }
        let num = self.digits().to_string();
        let mut text = num;
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let den = self.digits();
            if den.is_empty() {
                return Err(self.err("expected denominator"));
            }
            text = format!("{text}/{den}");
        }
        text.parse().map(Some).map_err(|_| self.err("bad rational"))
    }

    fn term(&mut self) -> Result<PermElement, PermError> {
        let coeff = self.coefficient()?;
        if coeff.is_some() && self.peek() == Some(b'*') {
            self.pos += 1;
        }
        let mut product: Option<PermElement> = None;
        loop {
            match self.peek() {
                Some(b'x' | b'p' | b'q' | b'(' | b'[') => {
                    let f = self.factor()?;
                    product = Some(match product {
                        None => f,
                        Some(acc) => acc.multiply(&f),
                    });
                }
                Some(b'*') if product.is_some() => self.pos += 1,
                _ => break,
            }
        }
        match (coeff, product) {
            (Some(c), Some(e)) => Ok(e.scale(&c)),
            (None, Some(e)) => Ok(e),
            (Some(c), None) if c.is_zero() => Ok(PermElement::zero()),
            (Some(_), None) => Err(self.err("constant terms are not allowed (no unit)")),
            (None, None) => Err(self.err("expected a term")),
        }
    }

    fn factor(&mut self) -> Result<PermElement, PermError> {
        let base = match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let d = self.digits();
                let i: u32 = d.parse().map_err(|_| self.err("expected variable index"))?;
                if i == 0 {
                    return Err(self.err("variable indices start at 1"));
                }
                PermElement::x(i)
            }
            Some(b'p') => {
                self.pos += 1;
                PermElement::p()
            }
            Some(b'q') => {
                self.pos += 1;
                PermElement::q()
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                e
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b']')?;
                a.commutator(&b)
            }
            _ => return Err(self.err("expected a factor")),
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k: u32 = self.digits().parse().map_err(|_| self.err("expected exponent"))?;
            if k == 0 {
                return Err(self.err("exponent must be positive"));
            }
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn expect(&mut self, c: u8) -> Result<(), PermError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Echelon, SparseVector};
    use Generator::{P, Q, X};

    fn pe(s: &str) -> PermElement {
        s.parse().unwrap()
    }

    #[test]
    fn normalize_word_sorts_prefix() {
        let a = PermMonomial::from_word(&[X(2), X(1), X(3)]).unwrap();
        let b = PermMonomial::from_word(&[X(1), X(2), X(3)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.prefix(), &[X(1), X(2)]);
        assert_eq!(a.tail(), X(3));
        let single = PermMonomial::from_word(&[X(1)]).unwrap();
        assert!(single.prefix().is_empty());
        assert_eq!(PermMonomial::from_word(&[]), Err(PermError::EmptyWord));
    }

    /// Closure of a word under the rewrite `..abc.. -> ..bac..` applied to
    /// adjacent letters in left-normed position, by breadth-first search.
    fn rewrite_class(word: Vec<Generator>) -> std::collections::BTreeSet<Vec<Generator>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut todo = vec![word];
        while let Some(w) = todo.pop() {
            if !seen.insert(w.clone()) {
                continue;
            }
            // (...(u a) b) c = (...(u b) a) c: swap positions i, i+1 when a later letter exists
            for i in 0..w.len().saturating_sub(2) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                todo.push(v);
            }
        }
        seen
    }

    #[test]
    fn degree_three_words_have_three_normal_forms() {
        let words: Vec<Vec<Generator>> =
            [X(1), X(2), X(3)].into_iter().permutations(3).collect();
        let classes: std::collections::BTreeSet<_> =
            words.iter().map(|w| rewrite_class(w.clone())).collect();
        let normal: std::collections::BTreeSet<_> =
            words.iter().map(|w| PermMonomial::from_word(w).unwrap()).collect();
        assert_eq!(classes.len(), 3);
        assert_eq!(normal.len(), 3);
        for w in &words {
            for v in rewrite_class(w.clone()) {
                assert_eq!(PermMonomial::from_word(&v), PermMonomial::from_word(w));
            }
        }
    }

    #[test]
    fn multilinear_dimension_is_degree() {
        for n in 1..=6u32 {
            let forms: std::collections::BTreeSet<PermMonomial> = (1..=n)
                .map(X)
                .permutations(n as usize)
                .map(|w| PermMonomial::from_word(&w).unwrap())
                .collect();
            assert_eq!(forms.len(), n as usize);
        }
    }

    #[test]
    fn products() {
        let e = PermElement::x(2).multiply(&PermElement::x(1));
        assert_eq!(e, PermElement::monomial(PermMonomial::new(vec![X(2)], X(1))));
        let (x1, x2, x3) = (PermElement::x(1), PermElement::x(2), PermElement::x(3));
        let a = x1.multiply(&x2).multiply(&x3);
        assert_eq!(a, x1.multiply(&x2.multiply(&x3)));
        assert_eq!(a, x2.multiply(&x1).multiply(&x3));
    }

    #[test]
    fn commutators() {
        let x1 = PermElement::x(1);
        assert!(x1.commutator(&x1).is_zero());
        let c = PermElement::x(2).commutator(&x1);
        assert_eq!(c, pe("x2 x1 - x1 x2"));
        let x3 = PermElement::x(3);
        assert_eq!(x3.multiply(&c), x3.commutator(&c));
    }

    #[test]
    fn monomial_order() {
        let m = |w: &[Generator]| PermMonomial::from_word(w).unwrap();
        assert!(m(&[X(9)]) < m(&[X(1), X(1)]));
        assert!(m(&[X(1)]) < m(&[X(2)]));
        assert!(m(&[X(5)]) < m(&[P]));
        assert!(m(&[X(2), X(1)]) < m(&[X(1), X(2)]));
    }

    #[test]
    fn monomial_order_is_total_on_degree_five() {
        // one x from each of x1..x3 plus two parameters, all tails
        let mut ms = Vec::new();
        for params in [[P, P], [P, Q], [Q, Q]] {
            let letters = [X(1), X(2), X(3), params[0], params[1]];
            ms.extend(PermMonomial::all_with_letters(&letters));
        }
        for a in &ms {
            for b in &ms {
                assert_eq!(a.cmp(b), b.cmp(a).reverse());
                assert_eq!(a.cmp(b) == Ordering::Equal, a == b);
                for c in &ms {
                    if a <= b && b <= c {
                        assert!(a <= c);
                    }
                }
            }
        }
        let mut sorted = ms.clone();
        sorted.sort();
        let mut again = ms.clone();
        again.reverse();
        again.sort();
        assert_eq!(sorted, again);
    }

    #[test]
    fn rendering_and_parsing() {
        let m = PermMonomial::new(vec![P, X(2), X(1)], X(3));
        assert_eq!(m.to_string(), "x1 x2 p x3");
        let e = pe("(p-q)^2 x1 x2 x3");
        assert_eq!(e.to_string(), "x1 x2 p^2 x3 - 2 x1 x2 p q x3 + x1 x2 q^2 x3");
        assert_eq!(pe(&e.to_string()), e);
        assert_eq!(pe("0"), PermElement::zero());
        assert_eq!(pe("pq x1"), pe("p q x1"));
        assert_eq!(pe("3/2*x1 x2"), pe("x1 x2").scale(&Rational::new(3, 2)));
        assert!(PermElement::parse("2").is_err());
        assert!(PermElement::parse("x0").is_err());
        assert!(PermElement::parse("[x1 x2]").is_err());
    }

    #[test]
    fn metabelian_rewriting() {
        // x_{i_n}...x_{i_3}[x_{i_2},x_{i_1}] lies in the span of the
        // normalized elements with j2 > j1 <= j3 <= ... <= jn
        let n = 4usize;
        let vars = 3u32;
        let element = |idx: &[u32]| -> PermElement {
            let mut e = PermElement::x(idx[1]).commutator(&PermElement::x(idx[0]));
            for &i in &idx[2..] {
                e = PermElement::x(i).multiply(&e);
            }
            e
        };
        let mut all = Vec::new();
        for idx in std::iter::repeat(1..=vars).take(n).multi_cartesian_product() {
            all.push(idx);
        }
        let mut columns: Vec<PermMonomial> = Vec::new();
        let col = |m: &PermMonomial, columns: &mut Vec<PermMonomial>| -> usize {
            match columns.iter().position(|c| c == m) {
                Some(i) => i,
                None => {
                    columns.push(m.clone());
                    columns.len() - 1
                }
            }
        };
        let to_vec = |e: &PermElement, columns: &mut Vec<PermMonomial>| {
            SparseVector::from_pairs(e.terms().map(|(m, c)| (col(m, columns), c.clone())).collect::<Vec<_>>())
        };
        let normal: Vec<SparseVector> = all
            .iter()
            .filter(|j| j[1] > j[0] && j[2..].iter().all(|&k| k >= j[0]) && j[2..].windows(2).all(|w| w[0] <= w[1]))
            .map(|j| to_vec(&element(j), &mut columns))
            .collect();
        let others: Vec<SparseVector> = all.iter().map(|i| to_vec(&element(i), &mut columns)).collect();
        let mut e = Echelon::new(columns.len());
        for v in &normal {
            e.insert(v);
        }
        for v in &others {
            let padded = v.clone();
            assert!(e.contains(&padded));
        }
    }
}
