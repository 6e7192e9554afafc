//! Property tests for the algebraic invariants: canonical scalar arithmetic,
//! row-reduction stability, projection round trips, transpose
//! anti-isomorphism and equivalence fingerprints.

use proptest::prelude::*;

use projmon::analysis;
use projmon::fields::{make_field, order_of_unity, FieldSpec, Scalar};
use projmon::linalg::{image_space, kernel_line, prj, Matrix, Subspace};
use projmon::monoid::{close, fingerprint};

fn rational(bound: i64) -> impl Strategy<Value = Scalar> {
    (-bound..=bound, 1i64..=4).prop_map(|(n, d)| {
        Scalar::from_rational(FieldSpec::Rationals, n, d).unwrap()
    })
}

fn cyclotomic3() -> impl Strategy<Value = Scalar> {
    (-2i64..=2, -2i64..=2).prop_map(|(a, b)| {
        let c3 = FieldSpec::Cyclotomic(3);
        Scalar::from_integer(c3, a)
            .add(
                &Scalar::zeta(3)
                    .mul(&Scalar::from_integer(c3, b))
                    .unwrap(),
            )
            .unwrap()
    })
}

fn prime7() -> impl Strategy<Value = Scalar> {
    (0i64..7).prop_map(|v| Scalar::from_integer(FieldSpec::PrimeField(7), v))
}

fn scalar_laws(a: &Scalar, b: &Scalar) {
    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
    assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
    assert!(a.add(&a.neg()).unwrap().is_zero());
    if !a.is_zero() {
        assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_scalar_laws(a in rational(20), b in rational(20)) {
        scalar_laws(&a, &b);
    }

    #[test]
    fn cyclotomic_scalar_laws(a in cyclotomic3(), b in cyclotomic3()) {
        scalar_laws(&a, &b);
    }

    #[test]
    fn prime_scalar_laws(a in prime7(), b in prime7()) {
        scalar_laws(&a, &b);
    }

    /// Subspace canonical form is stable under invertible row mixing.
    #[test]
    fn rref_stability(
        rows in proptest::collection::vec(
            proptest::collection::vec(-3i64..=3, 3), 2),
        mix in -2i64..=2,
    ) {
        let q = FieldSpec::Rationals;
        let to_scalars = |r: &Vec<i64>| -> Vec<Scalar> {
            r.iter().map(|&x| Scalar::from_integer(q, x)).collect()
        };
        let a = Subspace::from_rows(q, 3, rows.iter().map(to_scalars).collect());
        // Mix: r0' = r0 + mix * r1, swapped order.
        let mixed: Vec<Vec<Scalar>> = vec![
            to_scalars(&rows[1]),
            rows[0]
                .iter()
                .zip(&rows[1])
                .map(|(&x, &y)| Scalar::from_integer(q, x + mix * y))
                .collect(),
        ];
        let b = Subspace::from_rows(q, 3, mixed);
        prop_assert_eq!(a, b);
    }

    /// prj round-trips its kernel and image data in dimension 3.
    #[test]
    fn prj_round_trip(
        k in proptest::collection::vec(-3i64..=3, 3),
        u in proptest::collection::vec(-3i64..=3, 3),
    ) {
        let q = FieldSpec::Rationals;
        prop_assume!(k.iter().any(|&x| x != 0));
        prop_assume!(u.iter().any(|&x| x != 0));
        // Hyperplane with normal u; need u.k != 0.
        let dot: i64 = k.iter().zip(&u).map(|(a, b)| a * b).sum();
        prop_assume!(dot != 0);
        let kernel = Subspace::line_from_ints(q, &k);
        let image = Subspace::line_from_ints(q, &u).annihilator();
        let p = prj(&kernel, &image).unwrap();
        prop_assert!(p.is_idempotent());
        prop_assert_eq!(kernel_line(&p).unwrap(), kernel);
        prop_assert_eq!(image_space(&p), image);
        prop_assert!(projmon::linalg::is_projection(&p));
    }

    /// Transposition is an anti-isomorphism.
    #[test]
    fn transpose_antiisomorphism(
        a in proptest::collection::vec(-2i64..=2, 9),
        b in proptest::collection::vec(-2i64..=2, 9),
    ) {
        let q = FieldSpec::Rationals;
        let mk = |v: &Vec<i64>| {
            Matrix::from_int_rows(q, &[&v[0..3], &v[3..6], &v[6..9]])
        };
        let (x, y) = (mk(&a), mk(&b));
        prop_assert_eq!(x.mul(&y).transpose(), y.transpose().mul(&x.transpose()));
    }

    /// Taking linear parts is a homomorphism for affine composition.
    #[test]
    fn linear_part_homomorphism(
        a in proptest::collection::vec(-2i64..=2, 4),
        b in proptest::collection::vec(-2i64..=2, 4),
        ta in proptest::collection::vec(-2i64..=2, 2),
        tb in proptest::collection::vec(-2i64..=2, 2),
    ) {
        let q = FieldSpec::Rationals;
        let mk = |m: &Vec<i64>, t: &Vec<i64>| {
            projmon::AffineMap::new(
                Matrix::from_int_rows(q, &[&m[0..2], &m[2..4]]),
                t.iter().map(|&x| Scalar::from_integer(q, x)).collect(),
            )
            .unwrap()
        };
        let (x, y) = (mk(&a, &ta), mk(&b, &tb));
        prop_assert_eq!(
            projmon::linear_part(&x.compose(&y)),
            projmon::linear_part(&x).mul(&projmon::linear_part(&y))
        );
    }
}

#[test]
fn dual_of_unbalanced_family_is_inequivalent() {
    // Four images against six kernels rules out self-duality by counting.
    let a3 = projmon::catalog::make_a(3, FieldSpec::Rationals).unwrap().monoid;
    let d = projmon::dual(&a3).unwrap();
    assert_eq!(d.size(), a3.size());
    assert!(projmon::equivalent(&a3, &d).unwrap().is_none());
}

#[test]
fn unity_orders_are_certified() {
    // For every root of unity z of order k: z^k = 1 and z^j != 1 for j < k.
    for spec in [
        FieldSpec::Cyclotomic(12),
        FieldSpec::PrimeField(13),
        FieldSpec::Rationals,
    ] {
        let f = make_field(spec).unwrap();
        for z in f.roots_of_unity() {
            let k = order_of_unity(&z).unwrap().expect("root of unity");
            assert!(z.pow(k).unwrap().is_one());
            for j in 1..k {
                assert!(!z.pow(j).unwrap().is_one());
            }
        }
    }
}

#[test]
fn equivalence_preserves_fingerprints() {
    // Conjugating a finite monoid by an invertible matrix preserves size,
    // kernel/image counts, their overlap, and the singular trace multiset.
    let q = FieldSpec::Rationals;
    let gens = vec![
        Matrix::from_int_rows(q, &[&[1, -1], &[0, 0]]),
        Matrix::from_int_rows(q, &[&[0, 0], &[-1, 1]]),
        Matrix::from_int_rows(q, &[&[1, 0], &[0, 0]]),
    ];
    let m = close(&gens, 1000).unwrap();
    let trace_multiset = |m: &projmon::monoid::MonoidHandle| {
        let mut ts: Vec<Scalar> = m
            .elements()
            .iter()
            .filter(|e| !e.is_invertible())
            .map(|e| e.trace())
            .collect();
        ts.sort();
        ts
    };
    for f_rows in [
        [[1i64, 1], [0, 1]],
        [[2, 1], [1, 1]],
        [[0, 1], [-1, 3]],
    ] {
        let f = Matrix::from_int_rows(q, &[&f_rows[0], &f_rows[1]]);
        assert!(f.is_invertible());
        let fi = f.inverse().unwrap();
        let conj_gens: Vec<Matrix> = gens.iter().map(|g| f.mul(g).mul(&fi)).collect();
        let conj = close(&conj_gens, 1000).unwrap();
        assert_eq!(fingerprint(&m).unwrap(), fingerprint(&conj).unwrap());
        assert_eq!(trace_multiset(&m), trace_multiset(&conj));
    }
}

#[test]
fn closure_invariants_on_small_catalog() {
    // Product closure and closure idempotence, checked exhaustively on the
    // mid-sized catalog entries.
    for m in [
        projmon::catalog::make_a(3, FieldSpec::Rationals).unwrap().monoid,
        projmon::catalog::make_b(3, 1, FieldSpec::Rationals).unwrap().monoid,
        projmon::catalog::make_z(5, FieldSpec::Cyclotomic(3)).unwrap(),
    ] {
        assert!(m.verify_product_closure().unwrap());
        let again = close(m.elements(), m.size()).unwrap();
        assert_eq!(again.size(), m.size());
    }
}

#[test]
fn product_closure_exhaustive_on_largest_catalog_entry() {
    // The 3002-element closure is closed under all pairwise products.
    let a4 = projmon::catalog::make_a(4, FieldSpec::Rationals).unwrap().monoid;
    assert_eq!(a4.size(), 3002);
    assert!(a4.verify_product_closure().unwrap());
}

#[test]
fn power_inside_finite_monoid_reaches_idempotent() {
    // For a nullity-1 element of a finite monoid whose image does not
    // contain its kernel, some power is the projection with the same
    // kernel/image data.
    let a3 = projmon::catalog::make_a(3, FieldSpec::Rationals).unwrap().monoid;
    let mut checked = 0;
    for e in a3.elements() {
        if e.rank() != 2 {
            continue;
        }
        let k = kernel_line(e).unwrap();
        let l = image_space(e);
        if l.contains(&k) {
            continue;
        }
        let target = prj(&k, &l).unwrap();
        let mut cur = e.clone();
        let mut hit = false;
        for _ in 0..a3.size() {
            if cur == target {
                hit = true;
                break;
            }
            cur = cur.mul(e);
        }
        assert!(hit, "no power reached the projection");
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn irreducibility_witnesses_are_invariant() {
    // Whenever the bipartition search reports reducible, the witness passes
    // the per-generator invariance condition.
    let q = FieldSpec::Rationals;
    let e1 = Subspace::line_from_ints(q, &[1, 0, 0]);
    let e2 = Subspace::line_from_ints(q, &[0, 1, 0]);
    let plane23 = e1.annihilator().map(&Matrix::identity(q, 3));
    let plane13 = e2.annihilator();
    let configs: Vec<Vec<Matrix>> = vec![
        vec![prj(&e1, &plane23).unwrap(), prj(&e2, &plane13).unwrap()],
        vec![prj(&e1, &plane23).unwrap()],
    ];
    for gens in configs {
        let m = close(&gens, 1000).unwrap();
        let (irr, witness) = analysis::is_irreducible(&m).unwrap();
        assert!(!irr);
        let w = witness.unwrap();
        for g in &gens {
            assert!(analysis::projection_leaves_invariant(g, &w).unwrap());
        }
    }
}
