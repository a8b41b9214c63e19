use std::collections::BTreeMap;

use proptest::prelude::*;

use permmut::findim::{perm_truncation, BracketMode, FiniteAlgebra, Vector};
use permmut::linalg::{kernel_basis, rank, rref, solve, Rational, RationalMatrix, Solution, SparseVector};
use permmut::mutation::{expand, expand_generic, mutate, tails_in_x, Assignment};
use permmut::perm::{Generator, PermElement, PermMonomial};
use permmut::terms::{BracketPolynomial, BracketTerm, IdentityTemplate};

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![2 => Just(0i64), 3 => -3i64..=3], c), r)
    })
}

/// Fraction-free elimination over machine integers.
fn bareiss_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (rows, cols) = (a.len(), a[0].len());
    let mut prev = 1i128;
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        (1u32..=3).prop_map(Generator::X),
        Just(Generator::P),
        Just(Generator::Q),
    ]
}

fn perm_element() -> impl Strategy<Value = PermElement> {
    prop::collection::vec((prop::collection::vec(generator(), 1..=3), -3i64..=3), 0..=3).prop_map(|terms| {
        let mut e = PermElement::zero();
        for (word, c) in terms {
            e.add_term(PermMonomial::from_word(&word).unwrap(), Rational::from_integer(c));
        }
        e
    })
}

fn bracket_term(kinds: bool) -> impl Strategy<Value = BracketTerm> {
    let leaf = prop::sample::select(vec!["a", "b", "c", "x1", "y"]).prop_map(BracketTerm::leaf);
    leaf.prop_recursive(4, 12, 2, move |inner| {
        (inner.clone(), inner, any::<bool>()).prop_map(move |(l, r, product)| {
            if kinds && product {
                BracketTerm::product(l, r)
            } else {
                BracketTerm::bracket(l, r)
            }
        })
    })
}

fn bracket_polynomial(kinds: bool) -> impl Strategy<Value = BracketPolynomial> {
    prop::collection::vec((bracket_term(kinds), -4i64..=4, 1i64..=3), 0..=4).prop_map(|terms| {
        BracketPolynomial::from_terms(terms.into_iter().map(|(t, n, d)| (t, Rational::new(n, d))))
    })
}

fn vector_of(e: &PermElement, index: &mut BTreeMap<PermMonomial, usize>) -> SparseVector {
    let mut pairs = Vec::new();
    for (m, c) in e.terms() {
        let n = index.len();
        pairs.push((*index.entry(m.clone()).or_insert(n), c.clone()));
    }
    SparseVector::from_pairs(pairs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rref_is_idempotent(m in small_matrix()) {
        let m = RationalMatrix::from_integers(&m);
        let e = rref(&m);
        prop_assert_eq!(rref(&e.echelon), e.clone());
        prop_assert_eq!(rref(&m), e);
    }

    #[test]
    fn rank_plus_nullity(m in small_matrix()) {
        let mm = RationalMatrix::from_integers(&m);
        let k = kernel_basis(&mm);
        prop_assert_eq!(rank(&mm) + k.len(), mm.ncols());
        prop_assert_eq!(rank(&mm), bareiss_rank(&m));
        for v in &k {
            prop_assert!(mm.mul_vector(v).is_zero());
        }
    }

    #[test]
    fn consistent_solutions_are_exact(m in small_matrix(), x in prop::collection::vec(-3i64..=3, 6)) {
        let mm = RationalMatrix::from_integers(&m);
        let x0 = SparseVector::from_pairs(x.iter().take(mm.ncols()).enumerate().map(|(i, &v)| (i, Rational::from_integer(v))));
        let rhs = mm.mul_vector(&x0);
        match solve(&mm, &rhs) {
            Solution::Consistent(s) => prop_assert_eq!(mm.mul_vector(&s), rhs),
            Solution::Inconsistent { .. } => prop_assert!(false, "solvable system reported inconsistent"),
        }
    }

    #[test]
    fn inconsistency_certificates(m in small_matrix(), b in prop::collection::vec(-3i64..=3, 6)) {
        let mm = RationalMatrix::from_integers(&m);
        let rhs = SparseVector::from_pairs(b.iter().take(mm.nrows()).enumerate().map(|(i, &v)| (i, Rational::from_integer(v))));
        match solve(&mm, &rhs) {
            Solution::Consistent(s) => prop_assert_eq!(mm.mul_vector(&s), rhs),
            Solution::Inconsistent { certificate } => {
                prop_assert!(mm.left_mul(&certificate).is_zero());
                prop_assert!(!certificate.dot(&rhs).is_zero());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn perm_product_is_associative(a in perm_element(), b in perm_element(), c in perm_element()) {
        prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
    }

    #[test]
    fn perm_product_is_left_commutative(a in perm_element(), b in perm_element(), c in perm_element()) {
        prop_assert_eq!(a.multiply(&b).multiply(&c), b.multiply(&a).multiply(&c));
        prop_assert_eq!(a.multiply(&b.multiply(&c)), b.multiply(&a.multiply(&c)));
    }

    #[test]
    fn metabelian_rewriting(word in prop::collection::vec(1u32..=4, 0..=3), i1 in 1u32..=4, i2 in 1u32..=4) {
        // every word times a commutator lies in the span of the sorted ones
        let mut letters = word.clone();
        letters.extend([i1, i2]);
        let target = PermElement::word(&word.iter().map(|&i| Generator::X(i)).collect::<Vec<_>>())
            .map(|w| w.multiply(&PermElement::x(i2).commutator(&PermElement::x(i1))))
            .unwrap_or_else(|_| PermElement::x(i2).commutator(&PermElement::x(i1)));
        let mut index = BTreeMap::new();
        let mut rows = Vec::new();
        let n = letters.len();
        for j1 in 0..n {
            for j2 in 0..n {
                if j1 == j2 || letters[j2] <= letters[j1] {
                    continue;
                }
                let mut rest: Vec<u32> = (0..n).filter(|&k| k != j1 && k != j2).map(|k| letters[k]).collect();
                rest.sort();
                if rest.first().is_some_and(|&r| r < letters[j1]) {
                    continue;
                }
                let comm = PermElement::x(letters[j2]).commutator(&PermElement::x(letters[j1]));
                let e = if rest.is_empty() {
                    comm
                } else {
                    PermElement::word(&rest.iter().rev().map(|&i| Generator::X(i)).collect::<Vec<_>>()).unwrap().multiply(&comm)
                };
                rows.push(vector_of(&e, &mut index));
            }
        }
        let t = vector_of(&target, &mut index);
        let width = index.len();
        let mut all = rows.clone();
        let base = rank(&RationalMatrix::new(rows, width));
        all.push(t);
        prop_assert_eq!(rank(&RationalMatrix::new(all, width)), base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parse_render_round_trip(p in bracket_polynomial(true)) {
        let back: BracketPolynomial = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn multilinearize_uses_each_variable_once(p in bracket_polynomial(true)) {
        let lin = p.multilinearize();
        for (t, _) in lin.terms() {
            let mut leaves = t.leaves();
            let n = leaves.len();
            leaves.sort();
            leaves.dedup();
            prop_assert_eq!(leaves.len(), n);
        }
    }

    #[test]
    fn instantiate_commutes_with_multilinearize(name in prop::sample::select(vec!["f", "wa", "flex", "hbar", "conj4a"])) {
        let t = IdentityTemplate::builtin(name).unwrap();
        let fresh: Vec<String> = (0..t.arity()).map(|i| format!("z{i}")).collect();
        let args: Vec<&str> = fresh.iter().map(String::as_str).collect();
        let inst = t.instantiate(&args).unwrap();
        let rename: BTreeMap<String, String> = t.slots.iter().cloned().zip(fresh.iter().cloned()).collect();
        prop_assert_eq!(inst.multilinearize(), t.body.multilinearize().rename(&rename));
    }

    #[test]
    fn expansion_is_a_homomorphism(u in bracket_polynomial(false), v in bracket_polynomial(false)) {
        let asg: Assignment = [("a", 1), ("b", 2), ("c", 3), ("y", 4)]
            .into_iter()
            .map(|(n, i)| (n.to_string(), PermElement::x(i)))
            .collect();
        let lhs = expand(&u.bracket(&v), &asg).unwrap();
        let rhs = mutate(&expand(&u, &asg).unwrap(), &expand(&v, &asg).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn expansion_tails_stay_in_x(u in bracket_polynomial(false)) {
        prop_assert!(tails_in_x(&expand_generic(&u)));
    }

    #[test]
    fn satisfies_agrees_with_random_evaluation(
        name in prop::sample::select(vec!["f", "wa", "flex"]),
        coords in prop::collection::vec(-2i64..=2, 18),
    ) {
        // the three-dimensional counterexample and the zero algebra
        for a in [FiniteAlgebra::prop35(), FiniteAlgebra::zero(3)] {
            let t = IdentityTemplate::builtin(name).unwrap();
            let holds = a.satisfies_template(&t, BracketMode::Native).unwrap().is_none();
            let vars: Vec<Vector> = coords.chunks(3).take(t.arity()).map(Vector::from_integers).collect();
            let assignment: BTreeMap<String, Vector> = t.slots.iter().cloned().zip(vars).collect();
            let value = a.evaluate(&t.body, &assignment, BracketMode::Native).unwrap();
            if holds {
                prop_assert!(value.is_zero());
            }
        }
    }
}

#[test]
fn commutator_of_mutation_on_perm_truncations() {
    // in a perm algebra x∘y = <x,y> - <y,x> equals (p+q)[x,y]; compare tables
    // on products that stay inside the truncation
    let (a, basis) = perm_truncation(&[Generator::X(1), Generator::X(2), Generator::P, Generator::Q], 3);
    let find = |g: Generator| basis.iter().position(|m| *m == PermMonomial::generator(g)).unwrap();
    let p = Vector::basis(a.dim(), find(Generator::P));
    let q = Vector::basis(a.dim(), find(Generator::Q));
    let comm = a.mutation_algebra(&p, &q).unwrap().commutator_algebra();
    let pq = &PermElement::p() + &PermElement::q();
    for (i, mi) in basis.iter().enumerate() {
        for (j, mj) in basis.iter().enumerate() {
            if mi.degree() + mj.degree() + 1 > 3 {
                continue;
            }
            let (x, y) = (PermElement::monomial(mi.clone()), PermElement::monomial(mj.clone()));
            let want = pq.multiply(&x.commutator(&y));
            let got = comm.basis_product(i, j);
            let got: PermElement = PermElement::from_terms(got.iter().map(|(k, c)| (basis[k].clone(), c.clone())));
            assert_eq!(got, want, "{mi} {mj}");
        }
    }
}
