//! The normalising reflection group of a finite projection monoid: find all
//! reflections r with r M r^-1 = M, and the order of the group they generate.
//!
//! Candidates come from the line-constraint search (any normalising map must
//! permute the kernel lines and the image hyperplanes), each determined up to
//! a scalar. The scalar is resolved without square-root extraction in any
//! cyclotomic field: a reflection scaled by mu has eigenvalues mu (n-1 times)
//! and mu*zeta, so mu = Tr(A)/(n-1+zeta) whenever that denominator is
//! non-zero; the degenerate case falls back to det(A) = mu^n zeta, solved by
//! sweeping root-of-unity multiples of rational square roots (or, over a
//! prime field, all residues).

use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::fields::{make_field, order_of_unity, Field, FieldSpec, Scalar};
use crate::frames::{conjugator_search, SearchMode};
use crate::linalg::{Matrix, Subspace};
use crate::monoid::{close, kernels, MonoidHandle};

pub const SEARCH_NOTE: &str = "search space: reflections with entries in the working field whose \
non-unit eigenvalue is a root of unity in that field, plus transvections; \
reflections of infinite multiplicative order are not searched";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReflectionEigen {
    /// Non-unit eigenvalue with its multiplicative order.
    Root { value: Scalar, order: u64 },
    Transvection,
}

#[derive(Debug, Clone)]
pub struct ReflectionWitness {
    pub matrix: Matrix,
    pub eigen: ReflectionEigen,
    /// Index permutation induced on the sorted kernel-line list.
    pub kernel_permutation: Vec<usize>,
    /// The scalar dividing the frame candidate down to the reflection.
    pub scale: Scalar,
}

#[derive(Debug, Clone)]
pub struct NormalizerReport {
    pub reflections: Vec<ReflectionWitness>,
    pub group_order: u64,
    pub identified_as: Option<String>,
    pub search_note: &'static str,
}

/// Order of the imprimitive reflection group G(m, p, n): m^n n! / p.
pub fn expected_gmpn_order(m: u64, p: u64, n: u32) -> Result<u64> {
    if p == 0 || m % p != 0 {
        return Err(Error::InvalidParams("p must divide m".into()));
    }
    let fact: u64 = (1..=n as u64).product();
    Ok(m.pow(n) * fact / p)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let num = q.numer().sqrt();
    if &(&num * &num) != q.numer() {
        return None;
    }
    let den = q.denom().sqrt();
    if &(&den * &den) != q.denom() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// All scalars mu in the field with mu^2 = c, found by sweeping mu = q z over
/// roots of unity z and rational q. Complete for rational-times-unity values.
fn square_roots(c: &Scalar, field: &Field) -> Vec<Scalar> {
    let mut out = vec![];
    for z in field.roots_of_unity() {
        let z2 = z.mul(&z).unwrap();
        let Ok(ratio) = c.div(&z2) else { continue };
        let Some(q2) = ratio.as_rational() else { continue };
        let Some(q) = rational_sqrt(&q2) else { continue };
        let Ok(qs) = Scalar::from_big_rational(field.spec, q) else {
            continue;
        };
        for mu in [qs.mul(&z).unwrap(), qs.mul(&z).unwrap().neg()] {
            if !mu.is_zero() && !out.contains(&mu) {
                out.push(mu);
            }
        }
    }
    out
}

/// All reflections r (with the scalar used) such that mu r equals the
/// candidate, over the declared search space.
pub fn reflections_from_candidate(a: &Matrix, field: &Field) -> Vec<(Matrix, ReflectionEigen, Scalar)> {
    let n = a.dim;
    let id = Matrix::identity(a.field, n);
    let det = a.det();
    if det.is_zero() {
        return vec![];
    }
    let mut out: Vec<(Matrix, ReflectionEigen, Scalar)> = vec![];
    for zeta in field.roots_of_unity() {
        let denom = Scalar::from_integer(a.field, n as i64 - 1).add(&zeta).unwrap();
        let mus: Vec<Scalar> = if !denom.is_zero() {
            let mu = a.trace().div(&denom).unwrap_or_else(|_| field.zero());
            if mu.is_zero() {
                continue;
            }
            vec![mu]
        } else {
            // det(A) = mu^n zeta with the trace uninformative.
            let c = det.div(&zeta).unwrap();
            match field.spec {
                FieldSpec::PrimeField(p) => (1..p as i64)
                    .map(|v| field.int(v))
                    .filter(|mu| mu.pow(n as u64).unwrap() == c)
                    .collect(),
                _ => {
                    if n == 2 {
                        square_roots(&c, field)
                    } else {
                        vec![]
                    }
                }
            }
        };
        for mu in mus {
            let r = a.scale(&mu.inv().unwrap());
            if r == id {
                continue;
            }
            if r.det() != zeta {
                continue;
            }
            let diff = r.sub(&id);
            if diff.rank() != 1 {
                continue;
            }
            let eigen = if zeta.is_one() {
                if diff.mul(&diff) != Matrix::zero(a.field, n) {
                    continue;
                }
                ReflectionEigen::Transvection
            } else {
                let order = order_of_unity(&zeta).ok().flatten().expect("zeta is a root");
                ReflectionEigen::Root { value: zeta.clone(), order }
            };
            if !out.iter().any(|(m, _, _)| *m == r) {
                out.push((r, eigen, mu));
            }
        }
    }
    out
}

/// Compute the normalising reflection group of a finite monoid in dimension 2
/// or 3.
pub fn normalizing_reflections(m: &MonoidHandle) -> Result<NormalizerReport> {
    m.require_finite()?;
    if !(2..=3).contains(&m.dim) {
        return Err(Error::OutOfRange(
            "normalizer search supports dimensions 2 and 3".into(),
        ));
    }
    let field = make_field(m.field)?;
    let candidates = conjugator_search(m, m, SearchMode::Equivalence, true)
        .map_err(|e| match e {
            Error::EquivalenceInconclusive => Error::NormalizerInconclusive,
            other => other,
        })?;
    let ker = kernels(m)?;
    let mut reflections: Vec<ReflectionWitness> = vec![];
    for a in &candidates {
        for (r, eigen, mu) in reflections_from_candidate(a, &field) {
            if reflections.iter().any(|w| w.matrix == r) {
                continue;
            }
            let perm: Vec<usize> = ker
                .iter()
                .map(|k| {
                    let image = k.map(&r);
                    ker.iter().position(|x| *x == image).expect("kernel permuted")
                })
                .collect();
            reflections.push(ReflectionWitness {
                matrix: r,
                eigen,
                kernel_permutation: perm,
                scale: mu,
            });
        }
    }
    reflections.sort_by(|a, b| a.matrix.cmp(&b.matrix));
    let group_order = if reflections.is_empty() {
        1
    } else {
        let gens: Vec<Matrix> = reflections.iter().map(|w| w.matrix.clone()).collect();
        let group = close(&gens, 1_000_000)?;
        group.require_finite()?;
        for e in group.elements() {
            if !e.is_invertible() {
                return Err(Error::Inconsistency(
                    "reflection closure contains a singular element".into(),
                ));
            }
        }
        group.size() as u64
    };
    let identified_as = label_for(m.dim, group_order);
    Ok(NormalizerReport {
        reflections,
        group_order,
        identified_as,
        search_note: SEARCH_NOTE,
    })
}

fn label_for(dim: usize, order: u64) -> Option<String> {
    match (dim, order) {
        (_, 1) => Some("trivial".into()),
        (2, 2) => Some("C2".into()),
        (2, 3) => Some("C3".into()),
        (2, 4) => Some("C2 x C2".into()),
        (2, 12) => Some("D12".into()),
        (2, 16) => Some("G(4,2,2)".into()),
        (2, 36) => Some("G(6,2,2)".into()),
        (2, 72) => Some("G5".into()),
        (3, 24) => Some("S4".into()),
        (3, 48) => Some("S4 x C2 or G(2,1,3)-sized".into()),
        _ => None,
    }
}

/// Subgroup-sanity helper used by tests: every reported reflection permutes
/// the kernel and image sets.
pub fn reflection_preserves_line_sets(m: &MonoidHandle, r: &Matrix) -> Result<bool> {
    let ker = kernels(m)?;
    let im = crate::monoid::images(m)?;
    let ker_ok = ker.iter().all(|k| ker.contains(&k.map(r)));
    let im_ok = im
        .iter()
        .all(|l| im.contains(&Subspace::from_rows(l.field, l.ambient_dim, l.basis().iter().map(|v| r.apply(v)).collect())));
    Ok(ker_ok && im_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_a, make_y};

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn gmpn_orders() {
        assert_eq!(expected_gmpn_order(6, 2, 2).unwrap(), 36);
        assert_eq!(expected_gmpn_order(4, 2, 2).unwrap(), 16);
        assert_eq!(expected_gmpn_order(2, 2, 2).unwrap(), 4);
        assert!(expected_gmpn_order(5, 2, 2).is_err());
    }

    #[test]
    fn scalar_recovery_round_trip() {
        // For sample reflections r and scalars s, the resolution recovers r
        // from s*r.
        let field = make_field(FieldSpec::Cyclotomic(3)).unwrap();
        let w = field.primitive_cube_root().unwrap();
        let samples = [
            Matrix::from_int_rows(field.spec, &[&[1, 0], &[0, -1]]),
            Matrix::from_int_rows(field.spec, &[&[0, 1], &[1, 0]]),
            Matrix::from_int_rows(field.spec, &[&[1, 1], &[0, 1]]),
            Matrix::from_rows(
                field.spec,
                vec![
                    vec![field.zero(), w.clone()],
                    vec![w.neg(), w.neg()],
                ],
            )
            .unwrap(),
        ];
        let scales = [
            field.int(3),
            field.int(-2),
            w.clone(),
            w.mul(&field.int(5)).unwrap(),
        ];
        for r in &samples {
            for s in &scales {
                let a = r.scale(s);
                let found = reflections_from_candidate(&a, &field);
                assert!(
                    found.iter().any(|(m, _, _)| m == r),
                    "failed to recover reflection from scale {s}"
                );
            }
        }
    }

    #[test]
    fn normalizer_of_y_omega() {
        let c3 = FieldSpec::Cyclotomic(3);
        let field = make_field(c3).unwrap();
        let w = field.primitive_cube_root().unwrap();
        let m = make_y(&w, c3).unwrap();
        let report = normalizing_reflections(&m).unwrap();
        // The stated generator (1/w) * (1, w-1; w+1, -1) is found.
        let wi = w.inv().unwrap();
        let one = field.one();
        let stated = Matrix::from_rows(
            c3,
            vec![
                vec![wi.clone(), w.sub(&one).unwrap().mul(&wi).unwrap()],
                vec![w.add(&one).unwrap().mul(&wi).unwrap(), wi.neg()],
            ],
        )
        .unwrap();
        assert!(report.reflections.iter().any(|r| r.matrix == stated));
        // Its negative is an equally valid normalising reflection (an
        // involution scaled by -1 stays a reflection and conjugation is
        // unchanged by scalars), so the full group has order 4, not 2.
        assert!(report
            .reflections
            .iter()
            .any(|r| r.matrix == stated.scale(&field.int(-1))));
        assert_eq!(report.reflections.len(), 2);
        assert_eq!(report.group_order, 4);
        for r in &report.reflections {
            assert!(reflection_preserves_line_sets(&m, &r.matrix).unwrap());
            let ri = r.matrix.inverse().unwrap();
            for e in m.elements() {
                assert!(m.contains(&r.matrix.mul(e).mul(&ri)));
            }
        }
    }

    #[test]
    fn normalizer_of_a2_is_field_relative() {
        let a2q = make_a(2, Q).unwrap();
        let report = normalizing_reflections(&a2q.monoid).unwrap();
        assert_eq!(report.group_order, 12);

        let a2c3 = make_a(2, FieldSpec::Cyclotomic(3)).unwrap();
        let report = normalizing_reflections(&a2c3.monoid).unwrap();
        assert_eq!(report.group_order, 36);
    }

    #[test]
    fn reflection_sets_are_conjugation_closed_and_transvection_free() {
        let c3 = FieldSpec::Cyclotomic(3);
        let cases = vec![
            make_a(2, Q).unwrap().monoid,
            make_a(2, c3).unwrap().monoid,
            crate::catalog::make_z(2, c3).unwrap(),
            crate::catalog::make_z(5, c3).unwrap(),
        ];
        for m in cases {
            let report = normalizing_reflections(&m).unwrap();
            let set: Vec<Matrix> = report.reflections.iter().map(|w| w.matrix.clone()).collect();
            for r in &set {
                // No transvections over characteristic zero.
                assert!(!matches!(
                    report
                        .reflections
                        .iter()
                        .find(|w| w.matrix == *r)
                        .unwrap()
                        .eigen,
                    ReflectionEigen::Transvection
                ));
                // Conjugating one reported reflection by another stays in
                // the reported set.
                for s in &set {
                    let si = s.inverse().unwrap();
                    let conj = s.mul(r).mul(&si);
                    assert!(set.contains(&conj), "reflection set not conjugation-closed");
                }
            }
        }
    }
}
