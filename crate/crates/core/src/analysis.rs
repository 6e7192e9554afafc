//! Structural analyzers for finite projection monoids: kernel and image
//! sets, completeness, irreducibility, complete reducibility, trace groups,
//! cardinality prediction and the dimension-3 predicates.

use crate::error::{Error, Result};
use crate::fields::{unity_subgroup_order, FieldSpec, Scalar};
use crate::linalg::{is_projection, prj, Matrix, Subspace};
use crate::monoid::{images, kernels, MonoidHandle};

/// Full structural report for one finite monoid.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub kernels: Vec<Subspace>,
    pub images: Vec<Subspace>,
    pub complete: bool,
    pub completeness_counterexample: Option<(Subspace, Subspace)>,
    pub irreducible: bool,
    pub invariant_witness: Option<Subspace>,
    pub completely_reducible: bool,
    pub decomposition: Option<Vec<Subspace>>,
    pub kernel_sum: Subspace,
    pub image_intersection: Subspace,
    pub trace_group_order: Option<u64>,
    pub pairs_trace_order: Option<u64>,
    pub pairs_method_unreliable: bool,
    pub predicted_count: Option<u64>,
    pub actual_count: u64,
    pub zero_present: bool,
    pub projection_part_is_all_singulars: Option<bool>,
    pub star: Option<bool>,
    pub split: Option<bool>,
}

/// Sum of the kernels of M (zero when M has no projections).
pub fn kernel_sum(m: &MonoidHandle) -> Result<Subspace> {
    let mut s = Subspace::zero(m.field, m.dim);
    for k in kernels(m)? {
        s = s.sum(&k);
    }
    Ok(s)
}

/// Intersection of the images of M (all of V when M has no projections).
pub fn image_intersection(m: &MonoidHandle) -> Result<Subspace> {
    let mut t = Subspace::full(m.field, m.dim);
    for l in images(m)? {
        t = t.intersect(&l);
    }
    Ok(t)
}

/// Exhaustive completeness check: prj(K, L) must lie in M for every kernel K
/// and image L with K not inside L. Returns a counterexample pair on failure.
pub fn is_complete(m: &MonoidHandle) -> Result<(bool, Option<(Subspace, Subspace)>)> {
    let ker = kernels(m)?;
    let im = images(m)?;
    for k in &ker {
        for l in &im {
            if l.contains(k) {
                continue;
            }
            let p = prj(k, l)?;
            if !m.contains(&p) {
                return Ok((false, Some((k.clone(), l.clone()))));
            }
        }
    }
    Ok((true, None))
}

/// Invariance test for one subspace against one projection: the kernel lies
/// inside W or W lies inside the image.
pub fn projection_leaves_invariant(p: &Matrix, w: &Subspace) -> Result<bool> {
    let k = crate::linalg::kernel_line(p)?;
    if w.contains(&k) {
        return Ok(true);
    }
    Ok(crate::linalg::image_space(p).contains(w))
}

const BIPARTITION_CAP: usize = 25;

/// Irreducibility by bipartition of the generating projections. A proper
/// non-zero invariant subspace exists iff some bipartition (P1, P2) has
/// sum(ker P1) inside every image of P2, with the boundary cases handled
/// separately; the witness returned is invariant for the whole monoid.
pub fn is_irreducible(m: &MonoidHandle) -> Result<(bool, Option<Subspace>)> {
    m.require_finite()?;
    let n = m.dim;
    let field = m.field;
    if m.generators.is_empty() || m.size() == 1 {
        // The trivial monoid is irreducible only in dimension 1.
        return if n == 1 {
            Ok((true, None))
        } else {
            Ok((false, Some(Subspace::line_from_ints(field, &unit_vec(n, 0)))))
        };
    }
    let gens: Vec<Matrix> = m
        .generators
        .iter()
        .filter(|g| !g.is_identity())
        .cloned()
        .collect();
    irreducibility_from_projections(field, n, &gens)
}

/// The bipartition search over a projection generating set, independent of
/// any closure.
///
/// An invariant W induces the bipartition P1 = {p : ker(p) <= W}, and the
/// span of the kernels inside W is then invariant itself, so it suffices to
/// sweep subsets of the distinct kernel lines (plus the empty case, where any
/// line inside the intersection of all images works).
pub fn irreducibility_from_projections(
    field: FieldSpec,
    n: usize,
    gens: &[Matrix],
) -> Result<(bool, Option<Subspace>)> {
    for g in gens {
        if !is_projection(g) {
            return Err(Error::InvalidParams(
                "irreducibility test needs projection generators".into(),
            ));
        }
    }
    let ker: Vec<Subspace> = gens
        .iter()
        .map(crate::linalg::kernel_line)
        .collect::<Result<_>>()?;
    let im: Vec<Subspace> = gens.iter().map(crate::linalg::image_space).collect();
    let mut distinct: Vec<Subspace> = vec![];
    for k in &ker {
        if !distinct.contains(k) {
            distinct.push(k.clone());
        }
    }
    let dk = distinct.len();
    if dk > BIPARTITION_CAP {
        return Err(Error::TooManyGenerators(dk));
    }
    // Empty subset: any line inside every image.
    if n >= 2 {
        let mut w_high = Subspace::full(field, n);
        for l in &im {
            w_high = w_high.intersect(l);
        }
        if w_high.dim() >= 1 {
            let line = Subspace::line(field, w_high.basis()[0].clone());
            return Ok((false, Some(line)));
        }
    }
    for mask in 1u64..(1u64 << dk) {
        let mut w = Subspace::zero(field, n);
        for (i, k) in distinct.iter().enumerate() {
            if mask >> i & 1 == 1 {
                w = w.sum(k);
            }
        }
        if w.dim() == 0 || w.dim() >= n {
            continue;
        }
        let invariant = ker
            .iter()
            .zip(&im)
            .all(|(k, l)| w.contains(k) || l.contains(&w));
        if invariant {
            return Ok((false, Some(w)));
        }
    }
    Ok((true, None))
}

fn unit_vec(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0i64; n];
    v[i] = 1;
    v
}

/// Complete reducibility: exactly (V = S + T direct) and completeness, by the
/// two-way finite-monoid criterion. When the monoid is also reducible, a
/// direct-sum decomposition V = W + X into invariant subspaces is emitted.
pub fn is_completely_reducible(
    m: &MonoidHandle,
) -> Result<(bool, Option<Vec<Subspace>>)> {
    let n = m.dim;
    let field = m.field;
    let s = kernel_sum(m)?;
    let t = image_intersection(m)?;
    let direct = s.intersect(&t).dim() == 0 && s.sum(&t).dim() == n;
    let (complete, _) = is_complete(m)?;
    if !(direct && complete) {
        return Ok((false, None));
    }
    let (irr, witness) = is_irreducible(m)?;
    if irr {
        return Ok((true, Some(vec![Subspace::full(field, n)])));
    }
    let w = witness.expect("reducible monoid carries a witness");
    // Split the generators along the invariant subspace, then pick the
    // complementary invariant X with sum(ker P2) <= X <= inter(im P1).
    let mut s2 = Subspace::zero(field, n);
    let mut t1 = Subspace::full(field, n);
    for p in &m.generators {
        if p.is_identity() {
            continue;
        }
        let k = crate::linalg::kernel_line(p)?;
        if w.contains(&k) {
            t1 = t1.intersect(&crate::linalg::image_space(p));
        } else {
            s2 = s2.sum(&k);
        }
    }
    let x = complement_between(&s2, &t1, &w, n, field).ok_or_else(|| {
        Error::Inconsistency("no invariant complement despite CR criterion".into())
    })?;
    Ok((true, Some(vec![w, x])))
}

/// A subspace X with s2 <= X <= t1, X direct-complementary to w.
fn complement_between(
    s2: &Subspace,
    t1: &Subspace,
    w: &Subspace,
    n: usize,
    field: FieldSpec,
) -> Option<Subspace> {
    let mut x = s2.clone();
    if x.intersect(w).dim() != 0 {
        return None;
    }
    for v in t1.basis() {
        if x.dim() + w.dim() == n {
            break;
        }
        let bigger = x.sum(&Subspace::line(field, v.clone()));
        if bigger.dim() > x.dim() && bigger.intersect(w).dim() == 0 {
            x = bigger;
        }
    }
    if x.dim() + w.dim() == n && x.intersect(w).dim() == 0 && t1.contains(&x) {
        Some(x)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMethod {
    /// Scan all non-invertible elements; authoritative.
    Full,
    /// Scan products of projection pairs; unreliable exactly on monoids with
    /// the counting fingerprint of the three-line self-paired family.
    Pairs,
}

#[derive(Debug, Clone)]
pub struct TraceGroup {
    pub full_order: u64,
    pub pairs_order: u64,
    pub pairs_unreliable: bool,
}

/// Trace group of a finite irreducible monoid in dimension 2, by both methods.
pub fn trace_group(m: &MonoidHandle) -> Result<TraceGroup> {
    m.require_finite()?;
    if m.dim != 2 {
        return Err(Error::OutOfRange("trace group is defined in dimension 2".into()));
    }
    let mut full_traces: Vec<Scalar> = vec![];
    for e in m.elements() {
        if e.is_invertible() {
            continue;
        }
        let t = e.trace();
        if !t.is_zero() && !full_traces.contains(&t) {
            full_traces.push(t);
        }
    }
    let full_order = unity_subgroup_order(full_traces.iter()).map_err(|_| {
        Error::Inconsistency("trace condition violated: non-root-of-unity trace".into())
    })?;
    let projs = m.projections();
    let mut pair_traces: Vec<Scalar> = vec![];
    for p in &projs {
        for q in &projs {
            let t = p.mul(q).trace();
            if !t.is_zero() && !pair_traces.contains(&t) {
                pair_traces.push(t);
            }
        }
    }
    let pairs_order = unity_subgroup_order(pair_traces.iter()).map_err(|_| {
        Error::Inconsistency("trace condition violated: non-root-of-unity trace".into())
    })?;
    // The pairs method misses traces exactly when the monoid has the
    // fingerprint of the complete three-line family with equal kernel and
    // image sets.
    let ker = kernels(m)?;
    let im = images(m)?;
    let (complete, _) = is_complete(m)?;
    let pairs_unreliable = complete && ker == im && ker.len() == 3;
    Ok(TraceGroup {
        full_order,
        pairs_order,
        pairs_unreliable,
    })
}

/// Authoritative trace-group order (FULL method).
pub fn trace_group_order(m: &MonoidHandle) -> Result<u64> {
    Ok(trace_group(m)?.full_order)
}

/// Predicted cardinality k*l*|G| + 1 (+1 when the zero map is present) for a
/// finite irreducible monoid in dimension 2; errors when the prediction does
/// not match the actual closure size.
pub fn predicted_count(m: &MonoidHandle) -> Result<u64> {
    let predicted = predicted_count_unchecked(m)?;
    if predicted != m.size() as u64 {
        return Err(Error::Inconsistency(format!(
            "predicted count {predicted} differs from closure size {}",
            m.size()
        )));
    }
    Ok(predicted)
}

pub fn predicted_count_unchecked(m: &MonoidHandle) -> Result<u64> {
    if m.dim != 2 {
        return Err(Error::OutOfRange(
            "cardinality prediction is defined in dimension 2".into(),
        ));
    }
    let ker = kernels(m)?;
    let im = images(m)?;
    let g = trace_group_order(m)?;
    let zero = ker.iter().any(|k| im.contains(k));
    Ok(ker.len() as u64 * im.len() as u64 * g + 1 + zero as u64)
}

/// Is the zero map an element?
pub fn zero_present(m: &MonoidHandle) -> bool {
    m.contains(&Matrix::zero(m.field, m.dim))
}

/// Dimension-3 condition: every kernel lies inside one of any three images
/// with zero common intersection.
pub fn star_condition(m: &MonoidHandle) -> Result<bool> {
    if m.dim != 3 {
        return Err(Error::OutOfRange("star condition is defined in dimension 3".into()));
    }
    let ker = kernels(m)?;
    let im = images(m)?;
    for a in 0..im.len() {
        for b in a + 1..im.len() {
            for c in b + 1..im.len() {
                let triple = im[a].intersect(&im[b]).intersect(&im[c]);
                if triple.dim() != 0 {
                    continue;
                }
                for k in &ker {
                    if !(im[a].contains(k) || im[b].contains(k) || im[c].contains(k)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Dimension-3 split test: some kernel K and image A such that every other
/// image contains K and every other kernel lies inside A.
pub fn is_split(m: &MonoidHandle) -> Result<bool> {
    if m.dim != 3 {
        return Err(Error::OutOfRange("split test is defined in dimension 3".into()));
    }
    let ker = kernels(m)?;
    let im = images(m)?;
    for k in &ker {
        for a in &im {
            let images_ok = im.iter().filter(|l| *l != a).all(|l| l.contains(k));
            let kernels_ok = ker.iter().filter(|kk| *kk != k).all(|kk| a.contains(kk));
            if images_ok && kernels_ok {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Open-question probe: does the projection part contain every singular
/// element of M?
pub fn projection_part_is_all_singulars(m: &MonoidHandle) -> Result<bool> {
    let (_, m0) = crate::monoid::units_and_projection_part(m)?;
    for e in m.elements() {
        if !e.is_invertible() && !m0.contains(e) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Assemble the full report. Dimension-specific entries are left empty where
/// they do not apply; the trace/cardinality slots need irreducibility.
pub fn analyze(m: &MonoidHandle) -> Result<AnalysisReport> {
    m.require_finite()?;
    let ker = kernels(m)?;
    let im = images(m)?;
    let (complete, counterexample) = is_complete(m)?;
    let (irr, witness) = is_irreducible(m)?;
    let (cr, decomposition) = is_completely_reducible(m)?;
    let s = kernel_sum(m)?;
    let t = image_intersection(m)?;
    let (trace_full, trace_pairs, unreliable) = if m.dim == 2 && irr {
        let tg = trace_group(m)?;
        (
            Some(tg.full_order),
            Some(tg.pairs_order),
            tg.pairs_unreliable,
        )
    } else {
        (None, None, false)
    };
    let predicted = if m.dim == 2 && irr {
        Some(predicted_count_unchecked(m)?)
    } else {
        None
    };
    let (star, split) = if m.dim == 3 {
        (Some(star_condition(m)?), Some(is_split(m)?))
    } else {
        (None, None)
    };
    let all_singular = projection_part_is_all_singulars(m).ok();
    Ok(AnalysisReport {
        kernels: ker,
        images: im,
        complete,
        completeness_counterexample: counterexample,
        irreducible: irr,
        invariant_witness: witness,
        completely_reducible: cr,
        decomposition,
        kernel_sum: s,
        image_intersection: t,
        trace_group_order: trace_full,
        pairs_trace_order: trace_pairs,
        pairs_method_unreliable: unreliable,
        predicted_count: predicted,
        actual_count: m.size() as u64,
        zero_present: zero_present(m),
        projection_part_is_all_singulars: all_singular,
        star,
        split,
    })
}

/// All lines of GF(p)^n, one canonical spanning vector each. Used for brute
/// force invariant-line checks over small prime fields.
pub fn all_lines_prime_field(field: FieldSpec, n: usize) -> Result<Vec<Subspace>> {
    let FieldSpec::PrimeField(p) = field else {
        return Err(Error::OutOfRange("line enumeration needs a prime field".into()));
    };
    let p = p as u64;
    let mut out = vec![];
    // First non-zero coordinate normalised to 1.
    let mut counter = vec![0u64; n];
    loop {
        if counter.iter().any(|&c| c != 0) {
            let first = counter.iter().position(|&c| c != 0).unwrap();
            if counter[first] == 1 {
                let v: Vec<Scalar> = counter
                    .iter()
                    .map(|&c| Scalar::from_integer(field, c as i64))
                    .collect();
                out.push(Subspace::line(field, v));
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            counter[i] += 1;
            if counter[i] < p {
                break;
            }
            counter[i] = 0;
        }
    }
}

/// Lines fixed setwise by every matrix in the list (prime fields only).
pub fn invariant_lines_prime_field(gens: &[Matrix]) -> Result<Vec<Subspace>> {
    let first = gens
        .first()
        .ok_or_else(|| Error::InvalidParams("no matrices".into()))?;
    let lines = all_lines_prime_field(first.field, first.dim)?;
    Ok(lines
        .into_iter()
        .filter(|line| {
            gens.iter().all(|g| {
                let image = line.map(g);
                image.dim() == 0 || image == *line
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::close;

    const Q: FieldSpec = FieldSpec::Rationals;

    /// Shared-eigenline family in dimension 2: projections with a common
    /// eigenline L, kernel side and image side mixed.
    fn shared_line_monoid() -> MonoidHandle {
        let l = Subspace::line_from_ints(Q, &[1, 0]);
        let e2 = Subspace::line_from_ints(Q, &[0, 1]);
        let diag = Subspace::line_from_ints(Q, &[1, 1]);
        let p1 = prj(&l, &e2).unwrap();
        let p2 = prj(&l, &diag).unwrap();
        let q1 = prj(&e2, &l).unwrap();
        close(&[p1, p2, q1], 1000).unwrap()
    }

    #[test]
    fn shared_line_example_is_reducible_not_cr() {
        let m = shared_line_monoid();
        let (irr, witness) = is_irreducible(&m).unwrap();
        assert!(!irr);
        let w = witness.unwrap();
        assert_eq!(w, Subspace::line_from_ints(Q, &[1, 0]));
        // Witness really is invariant for every generator.
        for g in &m.generators {
            assert!(projection_leaves_invariant(g, &w).unwrap());
        }
        let (cr, _) = is_completely_reducible(&m).unwrap();
        assert!(!cr);
        let (complete, cex) = is_complete(&m).unwrap();
        assert!(!complete);
        assert!(cex.is_some());
    }

    #[test]
    fn block_sum_is_reducible_and_cr() {
        // {1,0} + {1,0} on the two axes.
        let p1 = Matrix::from_int_rows(Q, &[&[0, 0], &[0, 1]]);
        let p2 = Matrix::from_int_rows(Q, &[&[1, 0], &[0, 0]]);
        let m = close(&[p1, p2], 100).unwrap();
        let (irr, _) = is_irreducible(&m).unwrap();
        assert!(!irr);
        let (cr, decomp) = is_completely_reducible(&m).unwrap();
        assert!(cr);
        let parts = decomp.unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].sum(&parts[1]).dim(), 2);
        assert_eq!(parts[0].intersect(&parts[1]).dim(), 0);
        for part in &parts {
            for g in &m.generators {
                assert!(projection_leaves_invariant(g, part).unwrap());
            }
        }
    }

    #[test]
    fn trivial_monoid_cases() {
        let m = close(&[Matrix::identity(Q, 2)], 10).unwrap();
        let (irr, _) = is_irreducible(&m).unwrap();
        assert!(!irr, "trivial monoid reducible in dimension 2");
        let (cr, _) = is_completely_reducible(&m).unwrap();
        assert!(cr);
        let one = close(&[Matrix::identity(Q, 1)], 10).unwrap();
        let (irr1, _) = is_irreducible(&one).unwrap();
        assert!(irr1, "trivial monoid irreducible in dimension 1");
    }

    #[test]
    fn split_and_star_hand_examples() {
        // A split configuration: K = <e3>, A = <e1,e2>, all other images
        // contain K, all other kernels inside A.
        let e3 = Subspace::line_from_ints(Q, &[0, 0, 1]);
        let e1 = Subspace::line_from_ints(Q, &[1, 0, 0]);
        let plane12 = Subspace::from_rows(
            Q,
            3,
            vec![
                vec![Scalar::one(Q), Scalar::zero(Q), Scalar::zero(Q)],
                vec![Scalar::zero(Q), Scalar::one(Q), Scalar::zero(Q)],
            ],
        );
        let plane23 = Subspace::from_rows(
            Q,
            3,
            vec![
                vec![Scalar::zero(Q), Scalar::one(Q), Scalar::zero(Q)],
                vec![Scalar::zero(Q), Scalar::zero(Q), Scalar::one(Q)],
            ],
        );
        let m = close(
            &[prj(&e3, &plane12).unwrap(), prj(&e1, &plane23).unwrap()],
            1000,
        )
        .unwrap();
        assert!(is_split(&m).unwrap());

        // Kernel (1,1,1) against the coordinate-plane images fails the
        // line-in-union condition.
        let diag = Subspace::line_from_ints(Q, &[1, 1, 1]);
        let plane13 = Subspace::from_rows(
            Q,
            3,
            vec![
                vec![Scalar::one(Q), Scalar::zero(Q), Scalar::zero(Q)],
                vec![Scalar::zero(Q), Scalar::zero(Q), Scalar::one(Q)],
            ],
        );
        let gens = vec![
            prj(&diag, &plane12).unwrap(),
            prj(&diag, &plane23).unwrap(),
            prj(&diag, &plane13).unwrap(),
        ];
        let m = close(&gens, 1000).unwrap();
        assert!(!star_condition(&m).unwrap());
    }

    #[test]
    fn prime_field_line_enumeration() {
        let f3 = FieldSpec::PrimeField(3);
        let lines = all_lines_prime_field(f3, 2).unwrap();
        assert_eq!(lines.len(), 4);
        let distinct: std::collections::HashSet<_> = lines.iter().collect();
        assert_eq!(distinct.len(), 4);
    }

    #[test]
    fn kernel_image_counts_of_catalog_families() {
        let a2 = crate::catalog::make_a(2, Q).unwrap().monoid;
        assert_eq!(kernels(&a2).unwrap().len(), 3);
        assert_eq!(images(&a2).unwrap().len(), 3);
        let a3 = crate::catalog::make_a(3, Q).unwrap().monoid;
        assert_eq!(kernels(&a3).unwrap().len(), 6);
        assert_eq!(images(&a3).unwrap().len(), 4);
        let z2 = crate::catalog::make_z(2, FieldSpec::Cyclotomic(3)).unwrap();
        assert_eq!(kernels(&z2).unwrap().len(), 4);
        assert_eq!(images(&z2).unwrap().len(), 3);
    }

    #[test]
    fn star_and_split_on_type_families() {
        let a3 = crate::catalog::make_a(3, Q).unwrap().monoid;
        assert!(star_condition(&a3).unwrap());
        assert!(!is_split(&a3).unwrap());
        let b32 = crate::catalog::make_b(3, 2, Q).unwrap().monoid;
        assert!(star_condition(&b32).unwrap());
        assert!(!is_split(&b32).unwrap());
    }
}
