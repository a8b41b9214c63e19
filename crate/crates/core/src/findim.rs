//! Finite-dimensional algebras given by structure constants.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{rank, solve, Rational, RationalMatrix, Solution, SparseVector};
use crate::perm::{Generator, PermMonomial};
use crate::terms::{BracketPolynomial, BracketTerm, IdentityTemplate, NodeKind};

pub const PROP35_FIXTURE: &str = include_str!("../fixtures/prop35.alg");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FindimError {
    #[error("invalid algebra file: {0}")]
    Json(String),
    #[error("table entry {entry}: {msg}")]
    Entry { entry: usize, msg: String },
    #[error("expected {expected} basis names, found {found}")]
    Names { expected: usize, found: usize },
    #[error("vector of length {found} in an algebra of dimension {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("variable {0:?} has no value")]
    Unassigned(String),
    #[error("unknown basis element {0:?}")]
    UnknownBasis(String),
}

/// An element given by its coordinates in the basis of its algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector {
    pub coords: Vec<Rational>,
}

impl Vector {
    pub fn zero(dim: usize) -> Self {
        Vector { coords: vec![Rational::zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.coords[i] = Rational::one();
        v
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Vector { coords: values.iter().map(|&v| Rational::from(v)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Rational::is_zero)
    }

    fn sparse(&self) -> SparseVector {
        SparseVector::from_dense(&self.coords)
    }

    fn from_sparse(v: &SparseVector, dim: usize) -> Self {
        Vector { coords: v.to_dense(dim) }
    }
}

/// How `<x,y>` is read in an algebra.
#[derive(Clone, Copy, Debug)]
pub enum BracketMode<'a> {
    /// The algebra's own product: its table is a bracket table.
    Native,
    /// The mutation `(x p) y - (y q) x` of the algebra's product.
    Mutation { p: &'a Vector, q: &'a Vector },
}

/// A nonassociative algebra with basis `names` and
/// `e_i e_j = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    names: Vec<String>,
    /// Row-major `dim x dim` products of basis elements.
    products: Vec<SparseVector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    dim: usize,
    names: Vec<String>,
    table: Vec<(usize, usize, usize, String)>,
}

impl FiniteAlgebra {
    pub fn zero(dim: usize) -> Self {
        FiniteAlgebra { names: default_names(dim), products: vec![SparseVector::new(); dim * dim] }
    }

    /// Builds an algebra from 0-based entries `(i, j, k, c)`; repeated entries
    /// are summed.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize, usize, Rational)>>(dim: usize, entries: I) -> Self {
        let mut grouped: BTreeMap<(usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
        for (i, j, k, c) in entries {
            assert!(i < dim && j < dim && k < dim, "index out of range");
            grouped.entry((i, j)).or_default().push((k, c));
        }
        let mut a = Self::zero(dim);
        for ((i, j), pairs) in grouped {
            a.products[i * dim + j] = SparseVector::from_pairs(pairs);
        }
        a
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, FindimError> {
        if names.len() != self.dim() {
            return Err(FindimError::Names { expected: self.dim(), found: names.len() });
        }
        self.names = names;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVector {
        &self.products[i * self.dim() + j]
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.basis_product(i, j).get(k)
    }

    /// 0-based nonzero entries `(i, j, k, c)` in lexicographic order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Rational)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (k, c) in self.basis_product(i, j).iter() {
                    out.push((i, j, k, c.clone()));
                }
            }
        }
        out
    }

    pub fn is_zero_algebra(&self) -> bool {
        self.products.iter().all(SparseVector::is_zero)
    }

    fn mul_sparse(&self, x: &SparseVector, y: &SparseVector) -> SparseVector {
        let mut pairs = Vec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let ab = a * b;
                pairs.extend(self.basis_product(i, j).iter().map(|(k, c)| (k, c * &ab)));
            }
        }
        SparseVector::from_pairs(pairs)
    }

    fn check(&self, v: &Vector) -> Result<(), FindimError> {
        if v.dim() == self.dim() {
            Ok(())
        } else {
            Err(FindimError::Dimension { expected: self.dim(), found: v.dim() })
        }
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Result<Vector, FindimError> {
        self.check(x)?;
        self.check(y)?;
        Ok(Vector::from_sparse(&self.mul_sparse(&x.sparse(), &y.sparse()), self.dim()))
    }

    fn bracket_sparse(&self, x: &SparseVector, y: &SparseVector, mode: &SparseMode) -> SparseVector {
        match mode {
            SparseMode::Native => self.mul_sparse(x, y),
            SparseMode::Mutation(p, q) => {
                let l = self.mul_sparse(&self.mul_sparse(x, p), y);
                let r = self.mul_sparse(&self.mul_sparse(y, q), x);
                l.add_scaled(&-Rational::one(), &r)
            }
        }
    }

    fn sparse_mode(&self, mode: BracketMode) -> Result<SparseMode, FindimError> {
        Ok(match mode {
            BracketMode::Native => SparseMode::Native,
            BracketMode::Mutation { p, q } => {
                self.check(p)?;
                self.check(q)?;
                SparseMode::Mutation(p.sparse(), q.sparse())
            }
        })
    }

    fn eval_term(
        &self,
        t: &BracketTerm,
        env: &HashMap<&str, SparseVector>,
        mode: &SparseMode,
    ) -> Result<SparseVector, FindimError> {
        match t {
            BracketTerm::Leaf(n) => env.get(n.as_str()).cloned().ok_or_else(|| FindimError::Unassigned(n.clone())),
            BracketTerm::Node(kind, l, r) => {
                let x = self.eval_term(l, env, mode)?;
                if x.is_zero() {
                    return Ok(x);
                }
                let y = self.eval_term(r, env, mode)?;
                Ok(match kind {
                    NodeKind::Product => self.mul_sparse(&x, &y),
                    NodeKind::Bracket => self.bracket_sparse(&x, &y, mode),
                })
            }
        }
    }

    fn eval_poly(
        &self,
        poly: &BracketPolynomial,
        env: &HashMap<&str, SparseVector>,
        mode: &SparseMode,
    ) -> Result<SparseVector, FindimError> {
        let mut acc = SparseVector::new();
        for (t, c) in poly.terms() {
            acc = acc.add_scaled(c, &self.eval_term(t, env, mode)?);
        }
        Ok(acc)
    }

    /// Value of `poly` at `assignment`. Products are this algebra's product;
    /// brackets are read according to `mode`.
    pub fn evaluate(
        &self,
        poly: &BracketPolynomial,
        assignment: &BTreeMap<String, Vector>,
        mode: BracketMode,
    ) -> Result<Vector, FindimError> {
        let mode = self.sparse_mode(mode)?;
        let mut env = HashMap::new();
        for (k, v) in assignment {
            self.check(v)?;
            env.insert(k.as_str(), v.sparse());
        }
        Ok(Vector::from_sparse(&self.eval_poly(poly, &env, &mode)?, self.dim()))
    }

    /// Evaluates the full polarization of `poly` at every tuple of basis
    /// elements (variables in sorted order, tuples in lexicographic order)
    /// and returns the first nonzero value.
    pub fn satisfies(&self, poly: &BracketPolynomial, mode: BracketMode) -> Result<Option<Witness>, FindimError> {
        let mode = self.sparse_mode(mode)?;
        let lin = poly.multilinearize();
        let vars: Vec<String> = lin.variables().into_iter().collect();
        let units: Vec<SparseVector> = (0..self.dim()).map(SparseVector::unit).collect();
        for tuple in std::iter::repeat(0..self.dim()).take(vars.len()).multi_cartesian_product() {
            let env: HashMap<&str, SparseVector> =
                vars.iter().zip(&tuple).map(|(v, &i)| (v.as_str(), units[i].clone())).collect();
            let value = self.eval_poly(&lin, &env, &mode)?;
            if !value.is_zero() {
                return Ok(Some(Witness {
                    assignment: vars.iter().cloned().zip(tuple.iter().map(|&i| self.names[i].clone())).collect(),
                    value: Vector::from_sparse(&value, self.dim()),
                }));
            }
        }
        if vars.is_empty() {
            let value = self.eval_poly(&lin, &HashMap::new(), &mode)?;
            if !value.is_zero() {
                return Ok(Some(Witness { assignment: Vec::new(), value: Vector::from_sparse(&value, self.dim()) }));
            }
        }
        Ok(None)
    }

    pub fn satisfies_template(&self, t: &IdentityTemplate, mode: BracketMode) -> Result<Option<Witness>, FindimError> {
        let slots: Vec<&str> = t.slots.iter().map(String::as_str).collect();
        let poly = t.instantiate(&slots).expect("slot count matches");
        self.satisfies(&poly, mode)
    }

    /// The algebra with the same space and product `(x p) y - (y q) x`.
    pub fn mutation_algebra(&self, p: &Vector, q: &Vector) -> Result<FiniteAlgebra, FindimError> {
        let mode = self.sparse_mode(BracketMode::Mutation { p, q })?;
        let n = self.dim();
        let mut products = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                products.push(self.bracket_sparse(&SparseVector::unit(i), &SparseVector::unit(j), &mode));
            }
        }
        Ok(FiniteAlgebra { names: self.names.clone(), products })
    }

    /// The algebra with product `xy - yx`.
    pub fn commutator_algebra(&self) -> FiniteAlgebra {
        let n = self.dim();
        let mut products = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                products.push(self.basis_product(i, j).add_scaled(&-Rational::one(), self.basis_product(j, i)));
            }
        }
        FiniteAlgebra { names: self.names.clone(), products }
    }

    /// The full polarization of the Lie-admissibility criterion for
    /// mutations, on all basis tuples.
    pub fn lie_admissible_criterion(&self) -> Option<Witness> {
        let crit = IdentityTemplate::builtin("crit36").expect("built-in");
        self.satisfies_template(&crit, BracketMode::Native).expect("native mode")
    }

    /// Jacobi identity for the commutator of this algebra's product, on basis
    /// triples `i < j < k` (the Jacobiator of an anticommutative product is
    /// alternating).
    pub fn jacobi_test(&self) -> Option<JacobiWitness> {
        let c = self.commutator_algebra();
        let n = self.dim();
        let e = |i: usize| SparseVector::unit(i);
        for (i, j, k) in (0..n).tuple_combinations() {
            let t1 = c.mul_sparse(&c.mul_sparse(&e(i), &e(j)), &e(k));
            let t2 = c.mul_sparse(&c.mul_sparse(&e(j), &e(k)), &e(i));
            let t3 = c.mul_sparse(&c.mul_sparse(&e(k), &e(i)), &e(j));
            let sum = t1.add_scaled(&Rational::one(), &t2).add_scaled(&Rational::one(), &t3);
            if !sum.is_zero() {
                return Some(JacobiWitness { triple: [i, j, k], value: Vector::from_sparse(&sum, n) });
            }
        }
        None
    }

    /// Tests the mutations at `samples` random pairs `(p, q)` (coordinates in
    /// `-2..=2`, zero allowed) and returns the first pair whose mutation is
    /// not Lie-admissible. Passing proves nothing about the pairs not drawn.
    pub fn sample_mutations(&self, seed: u64, samples: usize) -> Option<(Vector, Vector, JacobiWitness)> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for _ in 0..samples {
            let p = random_vector(&mut rng, self.dim());
            let q = random_vector(&mut rng, self.dim());
            let m = self.mutation_algebra(&p, &q).expect("dimensions match");
            if let Some(w) = m.jacobi_test() {
                return Some((p, q, w));
            }
        }
        None
    }

    /// The same algebra in the basis whose `i`-th element has old coordinates
    /// `m[i]`. `None` if `m` is singular.
    pub fn change_basis(&self, m: &[Vec<Rational>]) -> Option<FiniteAlgebra> {
        let n = self.dim();
        let mm = RationalMatrix::from_dense(m);
        if mm.nrows() != n || mm.ncols() != n || rank(&mm) != n {
            return None;
        }
        let mt = mm.transpose();
        let rows: Vec<SparseVector> = mm.rows().to_vec();
        let mut products = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let old = self.mul_sparse(&rows[i], &rows[j]);
                match solve(&mt, &old) {
                    Solution::Consistent(y) => products.push(y),
                    Solution::Inconsistent { .. } => unreachable!("invertible change of basis"),
                }
            }
        }
        Some(FiniteAlgebra { names: default_names(n), products })
    }

    pub fn to_json(&self) -> String {
        let file = AlgebraFile {
            dim: self.dim(),
            names: self.names.clone(),
            table: self.entries().into_iter().map(|(i, j, k, c)| (i + 1, j + 1, k + 1, c.to_string())).collect(),
        };
        serde_json::to_string_pretty(&file).expect("algebra serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FindimError> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| FindimError::Json(e.to_string()))?;
        if file.names.len() != file.dim {
            return Err(FindimError::Names { expected: file.dim, found: file.names.len() });
        }
        let mut seen = std::collections::HashSet::new();
        let mut entries = Vec::with_capacity(file.table.len());
        for (pos, (i, j, k, c)) in file.table.into_iter().enumerate() {
            let entry = pos + 1;
            for idx in [i, j, k] {
                if idx == 0 || idx > file.dim {
                    return Err(FindimError::Entry { entry, msg: format!("index {idx} outside 1..={}", file.dim) });
                }
            }
            if !seen.insert((i, j, k)) {
                return Err(FindimError::Entry { entry, msg: format!("duplicate entry for ({i}, {j}, {k})") });
            }
            let c: Rational = c.parse().map_err(|_| FindimError::Entry { entry, msg: format!("bad rational {c:?}") })?;
            entries.push((i - 1, j - 1, k - 1, c));
        }
        Self::from_entries(file.dim, entries).with_names(file.names)
    }

    /// The bundled three-dimensional bracket table satisfying `f` but not
    /// `WA`.
    pub fn prop35() -> Self {
        Self::from_json(PROP35_FIXTURE).expect("bundled fixture parses")
    }

    pub fn render(&self, v: &Vector) -> String {
        let mut out = String::new();
        for (i, c) in v.coords.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let mag = c.abs();
            match (out.is_empty(), c.is_negative()) {
                (true, false) => {}
                (true, true) => out.push('-'),
                (false, false) => out.push_str(" + "),
                (false, true) => out.push_str(" - "),
            }
            if !mag.is_one() {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(&self.names[i]);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Parses `"e1 - 2*e3"`-style combinations of basis names.
    pub fn parse_vector(&self, text: &str) -> Result<Vector, FindimError> {
        let poly: BracketPolynomial = text.parse().map_err(|e| FindimError::Json(format!("{e}")))?;
        let mut v = Vector::zero(self.dim());
        for (t, c) in poly.terms() {
            let BracketTerm::Leaf(name) = t else {
                return Err(FindimError::UnknownBasis(t.to_string()));
            };
            let i = self.basis_index(name).ok_or_else(|| FindimError::UnknownBasis(name.clone()))?;
            v.coords[i] += c.clone();
        }
        Ok(v)
    }
}

enum SparseMode {
    Native,
    Mutation(SparseVector, SparseVector),
}

fn default_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("e{i}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Variable name and basis element, in the order the variables were
    /// enumerated.
    pub assignment: Vec<(String, String)>,
    pub value: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiWitness {
    pub triple: [usize; 3],
    pub value: Vector,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.assignment.iter().map(|(v, e)| format!("{v} = {e}")).collect();
        write!(f, "{} gives nonzero coordinates {:?}", parts.join(", "), self.value.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

/// The truncation of the free perm algebra on `letters` to words of degree at
/// most `max_degree`: products of higher degree are set to 0. Returns the
/// algebra and its basis monomials.
pub fn perm_truncation(letters: &[Generator], max_degree: usize) -> (FiniteAlgebra, Vec<PermMonomial>) {
    let mut basis: Vec<PermMonomial> = Vec::new();
    for d in 1..=max_degree {
        for word in letters.iter().copied().combinations_with_replacement(d) {
            basis.extend(PermMonomial::all_with_letters(&word));
        }
    }
    basis.sort();
    basis.dedup();
    let index: HashMap<&PermMonomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut entries = Vec::new();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            if a.degree() + b.degree() <= max_degree {
                entries.push((i, j, index[&a.mul(b)], Rational::one()));
            }
        }
    }
    let names = basis.iter().map(|m| m.to_string()).collect();
    let alg = FiniteAlgebra::from_entries(basis.len(), entries).with_names(names).expect("one name per monomial");
    (alg, basis)
}

fn random_invertible(rng: &mut impl Rng, n: usize) -> Vec<Vec<Rational>> {
    loop {
        let m: Vec<Vec<Rational>> =
            (0..n).map(|_| (0..n).map(|_| Rational::from(rng.gen_range(-2i64..=2))).collect()).collect();
        if rank(&RationalMatrix::from_dense(&m)) == n {
            return m;
        }
    }
}

fn small(rng: &mut impl Rng) -> Rational {
    Rational::from(rng.gen_range(-3i64..=3))
}

/// Families of algebras known to satisfy the Lie-admissibility criterion:
/// commutative associative truncated polynomial algebras in a random basis,
/// three-dimensional nilpotent bicommutative algebras, the two-dimensional
/// algebra with `e1 e1 = e2`, and truncated free perm algebras.
pub fn random_criterion_algebra(rng: &mut impl Rng) -> FiniteAlgebra {
    let family = rng.gen_range(0..CRITERION_FAMILIES);
    criterion_algebra(family, rng)
}

/// Number of families drawn from by [`random_criterion_algebra`].
pub const CRITERION_FAMILIES: usize = 4;

/// A random member of one family of algebras satisfying the criterion:
/// 0 truncated polynomial algebras in a random basis, 1 three-dimensional
/// nilpotent bicommutative, 2 the two-dimensional algebra with `e1 e1 = e2`,
/// 3 a truncated free perm algebra. All but the last are bicommutative.
pub fn criterion_algebra(family: usize, rng: &mut impl Rng) -> FiniteAlgebra {
    match family % CRITERION_FAMILIES {
        0 => {
            // span{1, t, ..., t^(n-1)} in k[t]/(t^n), or its augmentation ideal
            let n = rng.gen_range(2..=4);
            let unital = rng.gen_bool(0.5);
            let alg = if unital {
                FiniteAlgebra::from_entries(
                    n,
                    (0..n).flat_map(|i| (0..n - i).map(move |j| (i, j, i + j, Rational::one()))),
                )
            } else {
                // basis t, t^2, ..., t^n
                FiniteAlgebra::from_entries(
                    n,
                    (0..n).flat_map(|i| (0..n).filter(move |j| i + j + 1 < n).map(move |j| (i, j, i + j + 1, Rational::one()))),
                )
            };
            alg.change_basis(&random_invertible(rng, n)).expect("invertible")
        }
        1 => {
            let (a, b, c, d) = (small(rng), small(rng), small(rng), small(rng));
            FiniteAlgebra::from_entries(3, [(0, 0, 1, a), (0, 0, 2, b), (0, 1, 2, c), (1, 0, 2, d)])
        }
        2 => FiniteAlgebra::from_entries(2, [(0, 0, 1, Rational::one())]),
        _ => {
            let letters = [Generator::X(1), Generator::X(2)];
            perm_truncation(&letters, 3).0
        }
    }
}

/// An algebra with random structure constants in `{-1, 0, 1}`.
pub fn random_algebra(rng: &mut impl Rng, dim: usize) -> FiniteAlgebra {
    let mut entries = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let c: i64 = rng.gen_range(-1..=1);
                if c != 0 {
                    entries.push((i, j, k, Rational::from(c)));
                }
            }
        }
    }
    FiniteAlgebra::from_entries(dim, entries)
}

pub fn random_vector(rng: &mut impl Rng, dim: usize) -> Vector {
    Vector { coords: (0..dim).map(|_| Rational::from(rng.gen_range(-2i64..=2))).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::expand;
    use crate::perm::PermElement;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn bp(s: &str) -> BracketPolynomial {
        s.parse().unwrap()
    }

    fn assign(a: &FiniteAlgebra, pairs: &[(&str, &str)]) -> BTreeMap<String, Vector> {
        pairs.iter().map(|(k, v)| (k.to_string(), a.parse_vector(v).unwrap())).collect()
    }

    #[test]
    fn fixture_round_trip() {
        let a = FiniteAlgebra::prop35();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.structure_constant(0, 1, 0), Rational::one());
        assert_eq!(a.structure_constant(1, 0, 0), -Rational::one());
        assert_eq!(a.structure_constant(2, 0, 1), Rational::one());
        assert_eq!(a.entries().len(), 3);
        assert_eq!(FiniteAlgebra::from_json(&a.to_json()).unwrap(), a);
        let (t, _) = perm_truncation(&[Generator::X(1), Generator::P], 3);
        assert_eq!(FiniteAlgebra::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn json_errors() {
        let bad_index = r#"{"dim": 2, "names": ["a","b"], "table": [[1, 3, 1, "1"]]}"#;
        assert!(matches!(FiniteAlgebra::from_json(bad_index), Err(FindimError::Entry { entry: 1, .. })));
        let bad_rat = r#"{"dim": 1, "names": ["a"], "table": [[1, 1, 1, "1/0"]]}"#;
        assert!(matches!(FiniteAlgebra::from_json(bad_rat), Err(FindimError::Entry { .. })));
        let names = r#"{"dim": 2, "names": ["a"], "table": []}"#;
        assert!(matches!(FiniteAlgebra::from_json(names), Err(FindimError::Names { .. })));
        assert!(matches!(FiniteAlgebra::from_json("{"), Err(FindimError::Json(_))));
        let dup = r#"{"dim": 1, "names": ["a"], "table": [[1,1,1,"1"],[1,1,1,"2"]]}"#;
        assert!(matches!(FiniteAlgebra::from_json(dup), Err(FindimError::Entry { entry: 2, .. })));
    }

    #[test]
    fn prop35_identities() {
        let a = FiniteAlgebra::prop35();
        let f = IdentityTemplate::builtin("f").unwrap();
        let wa = IdentityTemplate::builtin("wa").unwrap();
        assert_eq!(a.satisfies_template(&f, BracketMode::Native).unwrap(), None);
        let w = a.satisfies_template(&wa, BracketMode::Native).unwrap().unwrap();
        assert_eq!(w.assignment, vec![("a".into(), "e1".into()), ("b".into(), "e1".into()), ("c".into(), "e3".into())]);
        assert_eq!(a.render(&w.value), "-e1");
        let direct = a
            .evaluate(&bp("wa(a,b,c)"), &assign(&a, &[("a", "e1"), ("b", "e1"), ("c", "e3")]), BracketMode::Native)
            .unwrap();
        assert_eq!(a.render(&direct), "-e1");
    }

    #[test]
    fn zero_cases() {
        let a = FiniteAlgebra::prop35();
        let v = a.evaluate(&BracketPolynomial::zero(), &BTreeMap::new(), BracketMode::Native).unwrap();
        assert!(v.is_zero());
        let z = FiniteAlgebra::zero(3);
        for name in IdentityTemplate::builtin_names() {
            let t = IdentityTemplate::builtin(name).unwrap();
            assert_eq!(z.satisfies_template(&t, BracketMode::Native).unwrap(), None, "{name}");
        }
        assert!(z.lie_admissible_criterion().is_none());
        assert!(z.jacobi_test().is_none());
        let zero = Vector::zero(3);
        assert!(a.mutation_algebra(&zero, &zero).unwrap().is_zero_algebra());
        let mismatch = Vector::zero(2);
        assert!(a.mutation_algebra(&mismatch, &zero).is_err());
        assert!(matches!(
            a.evaluate(&bp("<x,y>"), &assign(&a, &[("x", "e1")]), BracketMode::Native),
            Err(FindimError::Unassigned(_))
        ));
    }

    fn matrix_algebra() -> FiniteAlgebra {
        // E11, E12, E21, E22 with E_ab E_cd = [b = c] E_ad
        let idx = |a: usize, b: usize| 2 * a + b;
        let mut entries = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for d in 0..2 {
                    entries.push((idx(a, b), idx(b, d), idx(a, d), Rational::one()));
                }
            }
        }
        FiniteAlgebra::from_entries(4, entries)
    }

    fn mat_mul(x: &[i64], y: &[i64]) -> Vec<i64> {
        vec![
            x[0] * y[0] + x[1] * y[2],
            x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3],
        ]
    }

    #[test]
    fn matrix_circ() {
        let m = matrix_algebra();
        let id = Vector::from_integers(&[1, 0, 0, 1]);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let x: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
            let y: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
            let mut env = BTreeMap::new();
            env.insert("x".to_string(), Vector::from_integers(&x));
            env.insert("y".to_string(), Vector::from_integers(&y));
            let got = m.evaluate(&bp("circ(x,y)"), &env, BracketMode::Mutation { p: &id, q: &id }).unwrap();
            let xy = mat_mul(&x, &y);
            let yx = mat_mul(&y, &x);
            let want: Vec<i64> = (0..4).map(|i| 2 * (xy[i] - yx[i])).collect();
            assert_eq!(got, Vector::from_integers(&want));
        }
    }

    #[test]
    fn satisfies_agrees_with_random_evaluation() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_algebra(&mut rng, 2);
            for name in ["f", "wa", "flex"] {
                let t = IdentityTemplate::builtin(name).unwrap();
                let holds = a.satisfies_template(&t, BracketMode::Native).unwrap().is_none();
                let poly = t.instantiate(&["a", "b", "c"]).unwrap();
                let random_zero = (0..20).all(|_| {
                    let env = ["a", "b", "c"].iter().map(|v| (v.to_string(), random_vector(&mut rng, 2))).collect();
                    a.evaluate(&poly, &env, BracketMode::Native).unwrap().is_zero()
                });
                if holds {
                    assert!(random_zero, "{name}");
                }
                if !random_zero {
                    assert!(!holds, "{name}");
                }
            }
        }
    }

    #[test]
    fn truncation_matches_expansion() {
        let letters = [Generator::X(1), Generator::X(2), Generator::P, Generator::Q];
        let (alg, basis) = perm_truncation(&letters, 5);
        let index: HashMap<&PermMonomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let to_vec = |e: &PermElement| {
            let mut v = Vector::zero(alg.dim());
            for (m, c) in e.terms() {
                v.coords[index[m]] = c.clone();
            }
            v
        };
        let p = to_vec(&PermElement::p());
        let q = to_vec(&PermElement::q());
        let args = ["x1", "x2", "x1 x2", "x2 x1", "x1 x1"];
        for u in args {
            for v in args {
                let pu: PermElement = u.parse().unwrap();
                let pv: PermElement = v.parse().unwrap();
                if pu.terms().next().unwrap().0.degree() + pv.terms().next().unwrap().0.degree() + 1 > 5 {
                    continue;
                }
                let mut env = BTreeMap::new();
                env.insert("u".to_string(), to_vec(&pu));
                env.insert("v".to_string(), to_vec(&pv));
                let got = alg.evaluate(&bp("<u,v>"), &env, BracketMode::Mutation { p: &p, q: &q }).unwrap();
                let mut asg = BTreeMap::new();
                asg.insert("u".to_string(), pu);
                asg.insert("v".to_string(), pv);
                let want = expand(&bp("<u,v>"), &asg).unwrap();
                assert_eq!(got, to_vec(&want), "<{u},{v}>");
            }
        }
    }

    #[test]
    fn circ_table_is_scaled_commutator_on_truncations() {
        let letters = [Generator::X(1), Generator::X(2), Generator::P, Generator::Q];
        let (alg, basis) = perm_truncation(&letters, 3);
        let p_idx = basis.iter().position(|m| *m == PermMonomial::generator(Generator::P)).unwrap();
        let q_idx = basis.iter().position(|m| *m == PermMonomial::generator(Generator::Q)).unwrap();
        let p = Vector::basis(alg.dim(), p_idx);
        let q = Vector::basis(alg.dim(), q_idx);
        let mut s = p.clone();
        s.coords[q_idx] = Rational::one();
        let circ = alg.mutation_algebra(&p, &q).unwrap().commutator_algebra();
        let scaled = alg.mutation_algebra(&s, &s).unwrap();
        assert_eq!(circ, scaled);
        // and (p+q)[x1,x2] directly
        let x1 = basis.iter().position(|m| *m == PermMonomial::generator(Generator::X(1))).unwrap();
        let x2 = basis.iter().position(|m| *m == PermMonomial::generator(Generator::X(2))).unwrap();
        let got = circ.basis_product(x1, x2);
        let want: PermElement = "(p+q)[x1,x2]".parse().unwrap();
        assert_eq!(got.nnz(), want.len());
        for (m, c) in want.terms() {
            let i = basis.iter().position(|b| b == m).unwrap();
            assert_eq!(&got.get(i), c);
        }
    }

    fn is_bicommutative(a: &FiniteAlgebra) -> bool {
        a.satisfies(&bp("(a*b)*c - (a*c)*b"), BracketMode::Native).unwrap().is_none()
            && a.satisfies(&bp("a*(b*c) - b*(a*c)"), BracketMode::Native).unwrap().is_none()
    }

    #[test]
    fn bicommutative_examples_satisfy_criterion() {
        let a = FiniteAlgebra::from_entries(2, [(0, 0, 1, Rational::one())]);
        assert!(is_bicommutative(&a));
        assert!(a.lie_admissible_criterion().is_none());
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..8 {
            let b = random_criterion_algebra(&mut rng);
            assert!(b.lie_admissible_criterion().is_none());
        }
    }

    #[test]
    fn prop35_criterion_matches_exhaustive_oracle() {
        let a = FiniteAlgebra::prop35();
        // exhaustive: x's and y over all basis vectors, unpolarized form
        let crit = IdentityTemplate::builtin("crit36").unwrap();
        let poly = crit.instantiate(&["a", "b", "c", "y"]).unwrap();
        let mut all_zero = true;
        for t in std::iter::repeat(0..3).take(4).multi_cartesian_product() {
            let env = ["a", "b", "c", "y"].iter().zip(&t).map(|(v, &i)| (v.to_string(), Vector::basis(3, i))).collect();
            all_zero &= a.evaluate(&poly, &env, BracketMode::Native).unwrap().is_zero();
        }
        // the unpolarized form vanishing on basis vectors does not decide the
        // identity, so only a failure transfers
        let result = a.lie_admissible_criterion();
        if !all_zero {
            assert!(result.is_some());
        }
        // sums of two basis vectors for y do decide it
        let mut decided = true;
        for t in std::iter::repeat(0..3).take(5).multi_cartesian_product() {
            let mut y = Vector::basis(3, t[3]);
            y.coords[t[4]] += Rational::one();
            let mut env: BTreeMap<String, Vector> =
                ["a", "b", "c"].iter().zip(&t).map(|(v, &i)| (v.to_string(), Vector::basis(3, i))).collect();
            env.insert("y".into(), y);
            decided &= a.evaluate(&poly, &env, BracketMode::Native).unwrap().is_zero();
        }
        assert_eq!(result.is_none(), decided);
    }

    #[test]
    fn jacobi_on_mutations() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..5 {
            let a = random_criterion_algebra(&mut rng);
            for _ in 0..10 {
                let p = random_vector(&mut rng, a.dim());
                let q = random_vector(&mut rng, a.dim());
                assert!(a.mutation_algebra(&p, &q).unwrap().jacobi_test().is_none());
            }
        }
    }

    #[test]
    fn falsification_search() {
        let mut rng = StdRng::seed_from_u64(1);
        let mut found = None;
        'search: for _ in 0..20 {
            let a = random_algebra(&mut rng, 3);
            if a.lie_admissible_criterion().is_none() {
                continue;
            }
            for _ in 0..20 {
                let p = random_vector(&mut rng, 3);
                let q = random_vector(&mut rng, 3);
                if let Some(w) = a.mutation_algebra(&p, &q).unwrap().jacobi_test() {
                    found = Some((p, q, w));
                    break 'search;
                }
            }
        }
        assert!(found.is_some());
    }

    #[test]
    fn change_basis_preserves_identities() {
        let a = FiniteAlgebra::prop35();
        let m = vec![
            vec![Rational::from(1), Rational::from(1), Rational::from(0)],
            vec![Rational::from(0), Rational::from(1), Rational::from(0)],
            vec![Rational::from(2), Rational::from(0), Rational::from(1)],
        ];
        let b = a.change_basis(&m).unwrap();
        let f = IdentityTemplate::builtin("f").unwrap();
        let wa = IdentityTemplate::builtin("wa").unwrap();
        assert!(b.satisfies_template(&f, BracketMode::Native).unwrap().is_none());
        assert!(b.satisfies_template(&wa, BracketMode::Native).unwrap().is_some());
        assert!(a.change_basis(&[vec![Rational::one(); 3], vec![Rational::one(); 3], vec![Rational::one(); 3]]).is_none());
    }

    #[test]
    fn sampled_mutations() {
        let a = perm_truncation(&[Generator::X(1), Generator::X(2)], 3).0;
        assert!(a.sample_mutations(1, 20).is_none());
        // random structure constants almost never survive
        let mut rng = StdRng::seed_from_u64(9);
        let found = (0..10).any(|_| random_algebra(&mut rng, 3).sample_mutations(3, 20).is_some());
        assert!(found);
    }
}
