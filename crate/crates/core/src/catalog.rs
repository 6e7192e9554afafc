//! Constructors for the named monoid families, the transformation-monoid
//! model, the brute-force idempotent-generation cross-check and the
//! infinite-closure fixtures.

use crate::error::{Error, Result};
use crate::fields::{make_field, order_of_unity, Field, FieldSpec, Scalar};
use crate::linalg::{prj, AffineMap, AffineSubspace, Matrix, Subspace};
use crate::monoid::{close, close_affine, AffineMonoidHandle, MonoidHandle, DEFAULT_CAP};

/// Parameters naming one catalog instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyParams {
    A { n: usize },
    Aplus { n: usize },
    B { n: usize, t: u64 },
    X { s: Vec<Scalar>, i: u8 },
    Y { w: Scalar },
    Z { i: u8 },
    AffineC { n: usize },
    AffineD { n: usize, t: u64, x: Vec<Scalar> },
}

// ---------------------------------------------------------------------------
// Type A
// ---------------------------------------------------------------------------

/// Type A family on n coordinates: for each ordered pair (i, j) over
/// {0..n} the projection with kernel <e_i - e_j> and image spanned by the
/// differences avoiding index i, written in the basis f_k = e_k - e_0.
pub struct TypeA {
    pub monoid: MonoidHandle,
    /// Arc label (i, j) of each generator, parallel to the generator list.
    pub arcs: Vec<(usize, usize)>,
}

/// e_k - e_l in the f-basis (f_0 is zero).
fn diff_vector(field: FieldSpec, n: usize, k: usize, l: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(field); n];
    if k >= 1 {
        v[k - 1] = Scalar::one(field);
    }
    if l >= 1 {
        v[l - 1] = v[l - 1].sub(&Scalar::one(field)).unwrap();
    }
    v
}

pub fn generators_a(n: usize, field: FieldSpec) -> Result<(Vec<Matrix>, Vec<(usize, usize)>)> {
    if n < 1 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    field.validate()?;
    let mut gens = vec![];
    let mut arcs = vec![];
    for i in 0..=n {
        for j in 0..=n {
            if i == j {
                continue;
            }
            let kernel = Subspace::line(field, diff_vector(field, n, i, j));
            let mut image_rows = vec![];
            for k in 0..=n {
                for l in 0..=n {
                    if k == i || l == i || k == l {
                        continue;
                    }
                    image_rows.push(diff_vector(field, n, k, l));
                }
            }
            let image = Subspace::from_rows(field, n, image_rows);
            gens.push(prj(&kernel, &image)?);
            arcs.push((i, j));
        }
    }
    Ok((gens, arcs))
}

pub fn make_a(n: usize, field: FieldSpec) -> Result<TypeA> {
    make_a_with_cap(n, field, DEFAULT_CAP)
}

pub fn make_a_with_cap(n: usize, field: FieldSpec, cap: usize) -> Result<TypeA> {
    let (gens, arcs) = generators_a(n, field)?;
    Ok(TypeA {
        monoid: close(&gens, cap)?,
        arcs,
    })
}

/// Closed-form size of the type A family.
pub fn order_a_formula(n: u64, characteristic: u32) -> u64 {
    let m = n + 1;
    let pow = m.pow(m as u32);
    let fact: u64 = (1..=m).product();
    if characteristic != 2 {
        pow - fact - n + 1
    } else {
        let choose2 = |x: u64| x * (x.saturating_sub(1)) / 2;
        pow - fact - (1u64 << n) * choose2(m) + choose2(n) + 1
    }
}

// ---------------------------------------------------------------------------
// Extended type A on n+1 coordinates plus the transformation model
// ---------------------------------------------------------------------------

/// The transformation-monoid model: functions on {0..domain-1} as arrays.
#[derive(Debug, Clone)]
pub struct TransformationModel {
    pub domain: usize,
    pub functions: Vec<Vec<u8>>,
}

pub fn function_matrix(field: FieldSpec, f: &[u8]) -> Matrix {
    let n = f.len();
    let mut m = Matrix::zero(field, n);
    for (i, &fi) in f.iter().enumerate() {
        *m.at_mut(fi as usize, i) = Scalar::one(field);
    }
    m
}

fn compose_functions(f: &[u8], g: &[u8]) -> Vec<u8> {
    g.iter().map(|&x| f[x as usize]).collect()
}

/// The extended family on n+1 coordinates: e_i maps to e_j, other basis
/// vectors fixed. Returns the monoid together with the transformation model
/// of its non-invertible part plus the identity.
pub fn make_a_plus(n: usize, field: FieldSpec) -> Result<(MonoidHandle, TransformationModel)> {
    make_a_plus_with_cap(n, field, DEFAULT_CAP)
}

pub fn make_a_plus_with_cap(
    n: usize,
    field: FieldSpec,
    cap: usize,
) -> Result<(MonoidHandle, TransformationModel)> {
    if n < 1 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    field.validate()?;
    let dim = n + 1;
    let mut gens = vec![];
    let mut fgens = vec![];
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let mut f: Vec<u8> = (0..dim as u8).collect();
            f[i] = j as u8;
            gens.push(function_matrix(field, &f));
            fgens.push(f);
        }
    }
    let monoid = close(&gens, cap)?;
    // Closure in the function model, seeded with the identity.
    let mut functions: Vec<Vec<u8>> = vec![(0..dim as u8).collect()];
    let mut seen: std::collections::HashSet<Vec<u8>> =
        functions.iter().cloned().collect();
    let mut frontier = functions.clone();
    while !frontier.is_empty() {
        let mut next = vec![];
        for f in &frontier {
            for g in &fgens {
                let h = compose_functions(f, g);
                if seen.insert(h.clone()) {
                    functions.push(h.clone());
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    Ok((
        monoid,
        TransformationModel {
            domain: dim,
            functions,
        },
    ))
}

pub fn order_a_plus_formula(n: u64) -> u64 {
    let m = n + 1;
    let fact: u64 = (1..=m).product();
    m.pow(m as u32) - fact + 1
}

// ---------------------------------------------------------------------------
// Type B
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BLabel {
    /// Projection with kernel <e_i> (1-indexed).
    Diag(usize),
    /// Projection with kernel <e_i - z e_j> and image avoiding index i.
    Arrow { from: usize, to: usize, z: Scalar },
}

pub struct TypeB {
    pub monoid: MonoidHandle,
    pub labels: Vec<BLabel>,
    pub roots: Vec<Scalar>,
}

/// The t-th roots of unity in the field, or the smallest cyclotomic field
/// that would contain them as an error.
pub fn tth_roots(field: &Field, t: u64) -> Result<Vec<Scalar>> {
    let m = field.unity_count();
    if m % t != 0 {
        let minimal = (1u32..=4 * t as u32 + 1)
            .find(|&n| FieldSpec::Cyclotomic(n).unity_count() % t == 0)
            .unwrap_or(t as u32);
        return Err(Error::MissingRoots(minimal));
    }
    let g = field.unity_generator().pow(m / t)?;
    let mut out = vec![];
    let mut cur = field.one();
    for _ in 0..t {
        out.push(cur.clone());
        cur = cur.mul(&g)?;
    }
    out.sort();
    Ok(out)
}

pub fn generators_b(
    n: usize,
    t: u64,
    field: FieldSpec,
) -> Result<(Vec<Matrix>, Vec<BLabel>, Vec<Scalar>)> {
    if n < 1 || t < 1 {
        return Err(Error::InvalidParams("need n >= 1 and t >= 1".into()));
    }
    let f = make_field(field)?;
    let roots = tth_roots(&f, t)?;
    let mut gens = vec![];
    let mut labels = vec![];
    let mut seen_pairs: Vec<(Subspace, Subspace)> = vec![];
    let coordinate_image = |i: usize| -> Subspace {
        let rows: Vec<Vec<Scalar>> = (0..n)
            .filter(|&k| k != i)
            .map(|k| {
                let mut v = vec![Scalar::zero(field); n];
                v[k] = Scalar::one(field);
                v
            })
            .collect();
        Subspace::from_rows(field, n, rows)
    };
    for i in 0..n {
        let mut kv = vec![Scalar::zero(field); n];
        kv[i] = Scalar::one(field);
        let kernel = Subspace::line(field, kv);
        let image = coordinate_image(i);
        seen_pairs.push((kernel.clone(), image.clone()));
        gens.push(prj(&kernel, &image)?);
        labels.push(BLabel::Diag(i + 1));
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for z in &roots {
                let mut kv = vec![Scalar::zero(field); n];
                kv[i] = Scalar::one(field);
                kv[j] = z.neg();
                let kernel = Subspace::line(field, kv);
                let image = coordinate_image(i);
                let pair = (kernel.clone(), image.clone());
                if seen_pairs.contains(&pair) {
                    continue;
                }
                seen_pairs.push(pair);
                gens.push(prj(&kernel, &image)?);
                labels.push(BLabel::Arrow {
                    from: i + 1,
                    to: j + 1,
                    z: z.clone(),
                });
            }
        }
    }
    Ok((gens, labels, roots))
}

pub fn make_b(n: usize, t: u64, field: FieldSpec) -> Result<TypeB> {
    make_b_with_cap(n, t, field, DEFAULT_CAP)
}

pub fn make_b_with_cap(n: usize, t: u64, field: FieldSpec, cap: usize) -> Result<TypeB> {
    let (gens, labels, roots) = generators_b(n, t, field)?;
    Ok(TypeB {
        monoid: close(&gens, cap)?,
        labels,
        roots,
    })
}

pub fn order_b_formula(n: u64, t: u64) -> u64 {
    let fact: u64 = (1..=n).product();
    (n * t + 1).pow(n as u32) - t.pow(n as u32) * fact + 1
}

// ---------------------------------------------------------------------------
// The dimension-2 catalog: X, Y, Z
// ---------------------------------------------------------------------------

fn line2(field: FieldSpec, x: &Scalar, y: &Scalar) -> Subspace {
    Subspace::line(field, vec![x.clone(), y.clone()])
}

/// Closure of all projections prj(K, L) over K in `ker`, L in `im`, K != L.
pub fn monoid_from_lines(
    ker: &[Subspace],
    im: &[Subspace],
    cap: usize,
) -> Result<MonoidHandle> {
    let mut gens = vec![];
    for k in ker {
        for l in im {
            if l.contains(k) {
                continue;
            }
            gens.push(prj(k, l)?);
        }
    }
    close(&gens, cap)
}

/// Validate and normalise the X parameter set: roots of unity containing 1.
fn check_x_params(s: &[Scalar], i: u8) -> Result<Vec<Scalar>> {
    if i > 2 {
        return Err(Error::InvalidParams("index i must be 0, 1 or 2".into()));
    }
    let mut sorted: Vec<Scalar> = s.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.is_empty() {
        return Err(Error::InvalidParams("S must be non-empty".into()));
    }
    let field = sorted[0].field;
    if !sorted.contains(&Scalar::one(field)) {
        return Err(Error::InvalidParams("S must contain 1".into()));
    }
    for z in &sorted {
        if order_of_unity(z)?.is_none() {
            return Err(Error::InvalidParams(format!("{z} is not a root of unity")));
        }
    }
    if i as usize + sorted.len() < 2 {
        return Err(Error::InvalidParams("need i + |S| >= 2".into()));
    }
    Ok(sorted)
}

/// Kernel and image line sets of the two-image family.
pub fn x_lines(s: &[Scalar], i: u8, field: FieldSpec) -> Result<(Vec<Subspace>, Vec<Subspace>)> {
    let s = check_x_params(s, i)?;
    let one = Scalar::one(field);
    let zero = Scalar::zero(field);
    let e1 = line2(field, &one, &zero);
    let e2 = line2(field, &zero, &one);
    let mut ker: Vec<Subspace> = s.iter().map(|v| line2(field, &one, v)).collect();
    if i >= 1 {
        ker.push(e1.clone());
    }
    if i >= 2 {
        ker.push(e2.clone());
    }
    Ok((ker, vec![e1, e2]))
}

pub fn make_x(s: &[Scalar], i: u8, field: FieldSpec) -> Result<MonoidHandle> {
    make_x_with_cap(s, i, field, DEFAULT_CAP)
}

pub fn make_x_with_cap(s: &[Scalar], i: u8, field: FieldSpec, cap: usize) -> Result<MonoidHandle> {
    let (ker, im) = x_lines(s, i, field)?;
    monoid_from_lines(&ker, &im, cap)
}

/// Kernel and image line sets of the one-parameter family.
pub fn y_lines(w: &Scalar, field: FieldSpec) -> Result<(Vec<Subspace>, Vec<Subspace>)> {
    let one = Scalar::one(field);
    let zero = Scalar::zero(field);
    if order_of_unity(w)?.is_none() || *w == one || *w == one.neg() {
        return Err(Error::InvalidParams(
            "w must be a root of unity different from 1 and -1".into(),
        ));
    }
    let im = vec![
        line2(field, &one, &one),
        line2(field, &one, &zero),
        line2(field, &one, &one.add(w)?),
    ];
    let ker = vec![
        line2(field, &one, &one),
        line2(field, &zero, &one),
        line2(field, &one.sub(w)?, &one),
    ];
    Ok((ker, im))
}

pub fn make_y(w: &Scalar, field: FieldSpec) -> Result<MonoidHandle> {
    make_y_with_cap(w, field, DEFAULT_CAP)
}

pub fn make_y_with_cap(w: &Scalar, field: FieldSpec, cap: usize) -> Result<MonoidHandle> {
    let (ker, im) = y_lines(w, field)?;
    monoid_from_lines(&ker, &im, cap)
}

/// Kernel and image line sets of the six sporadic instances.
pub fn z_lines(i: u8, field: FieldSpec) -> Result<(Vec<Subspace>, Vec<Subspace>)> {
    if i > 5 {
        return Err(Error::InvalidParams("index must be 0..5".into()));
    }
    let f = make_field(field)?;
    let one = f.one();
    let zero = f.zero();
    let a = line2(field, &one, &zero);
    let b = line2(field, &zero, &one);
    let c = line2(field, &one.neg(), &one);
    if i == 0 {
        return Ok((vec![a.clone(), b.clone(), c.clone()], vec![a, b, c]));
    }
    let omega = f
        .primitive_cube_root()
        .ok_or(Error::MissingRoots(3))?;
    let d = line2(field, &omega, &one);
    let e = line2(field, &omega.mul(&omega)?, &one);
    let im = vec![a.clone(), b.clone(), c.clone()];
    let (ker, im) = match i {
        1 => (vec![a, b, d], im),
        2 => (vec![a, b, d, e], im),
        3 => (vec![a, b, c, d], im),
        4 => (vec![a, b, c, d, e], im),
        5 => (
            vec![a.clone(), b.clone(), c.clone(), d.clone()],
            vec![a, b, c, d],
        ),
        _ => unreachable!(),
    };
    Ok((ker, im))
}

pub fn make_z(i: u8, field: FieldSpec) -> Result<MonoidHandle> {
    make_z_with_cap(i, field, DEFAULT_CAP)
}

pub fn make_z_with_cap(i: u8, field: FieldSpec, cap: usize) -> Result<MonoidHandle> {
    let (ker, im) = z_lines(i, field)?;
    monoid_from_lines(&ker, &im, cap)
}

// ---------------------------------------------------------------------------
// Affine families
// ---------------------------------------------------------------------------

pub struct AffineC {
    pub monoid: AffineMonoidHandle,
    pub arcs: Vec<(usize, usize)>,
}

/// Restriction of the extended type A generators to the affine chart with
/// coordinate sum 1, coordinatised by dropping the zeroth coordinate.
pub fn generators_affine_c(
    n: usize,
    field: FieldSpec,
) -> Result<(Vec<AffineMap>, Vec<(usize, usize)>)> {
    if n < 1 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    field.validate()?;
    let mut gens = vec![];
    let mut arcs = vec![];
    for i in 0..=n {
        for j in 0..=n {
            if i == j {
                continue;
            }
            let mut a = Matrix::identity(field, n);
            let mut b = vec![Scalar::zero(field); n];
            if i == 0 {
                // x_j picks up the hidden coordinate: x_j' = 1 - sum_{k != j} x_k.
                for k in 0..n {
                    *a.at_mut(j - 1, k) = if k == j - 1 {
                        Scalar::zero(field)
                    } else {
                        Scalar::from_integer(field, -1)
                    };
                }
                b[j - 1] = Scalar::one(field);
            } else if j == 0 {
                for k in 0..n {
                    *a.at_mut(i - 1, k) = Scalar::zero(field);
                }
            } else {
                for k in 0..n {
                    *a.at_mut(i - 1, k) = Scalar::zero(field);
                }
                *a.at_mut(j - 1, i - 1) = Scalar::one(field);
            }
            gens.push(AffineMap::new(a, b)?);
            arcs.push((i, j));
        }
    }
    Ok((gens, arcs))
}

pub fn make_affine_c(n: usize, field: FieldSpec) -> Result<AffineC> {
    make_affine_c_with_cap(n, field, DEFAULT_CAP)
}

pub fn make_affine_c_with_cap(n: usize, field: FieldSpec, cap: usize) -> Result<AffineC> {
    let (gens, arcs) = generators_affine_c(n, field)?;
    for g in &gens {
        if !g.is_affine_projection() {
            return Err(Error::Inconsistency("affine generator not a projection".into()));
        }
    }
    Ok(AffineC {
        monoid: close_affine(&gens, cap)?,
        arcs,
    })
}

/// Generators of the affine family built on the dual of type B: for each
/// i != j and z a t-th root, the projection with kernel <e_i> and image
/// {x_i = z x_j}; for each i and each x in X, the projection with kernel
/// <e_i> and image {x_i = x}.
pub fn generators_affine_d(
    n: usize,
    t: u64,
    xs: &[Scalar],
    field: FieldSpec,
) -> Result<Vec<AffineMap>> {
    if n < 1 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let f = make_field(field)?;
    let roots = tth_roots(&f, t)?;
    let mut gens = vec![];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for z in &roots {
                let mut a = Matrix::identity(field, n);
                for k in 0..n {
                    *a.at_mut(i, k) = Scalar::zero(field);
                }
                *a.at_mut(i, j) = z.clone();
                gens.push(AffineMap::new(a, vec![Scalar::zero(field); n])?);
            }
        }
    }
    for i in 0..n {
        for x in xs {
            let mut a = Matrix::identity(field, n);
            for k in 0..n {
                *a.at_mut(i, k) = Scalar::zero(field);
            }
            let mut b = vec![Scalar::zero(field); n];
            b[i] = x.clone();
            gens.push(AffineMap::new(a, b)?);
        }
    }
    Ok(gens)
}

pub fn make_affine_d(
    n: usize,
    t: u64,
    xs: &[Scalar],
    field: FieldSpec,
) -> Result<AffineMonoidHandle> {
    make_affine_d_with_cap(n, t, xs, field, DEFAULT_CAP)
}

pub fn make_affine_d_with_cap(
    n: usize,
    t: u64,
    xs: &[Scalar],
    field: FieldSpec,
    cap: usize,
) -> Result<AffineMonoidHandle> {
    let gens = generators_affine_d(n, t, xs, field)?;
    close_affine(&gens, cap)
}

/// Shape predicate for the closure of the affine type-B-dual family: each row
/// of A carries at most one non-zero entry, drawn from the t-th roots; rows
/// with a non-zero entry force the matching translation entry to vanish, and
/// empty rows allow translation entries only from Z*X and 0.
pub fn in_shape_ntx(m: &AffineMap, roots: &[Scalar], xs: &[Scalar]) -> bool {
    let n = m.dim();
    let field = m.field();
    let mut zx = vec![Scalar::zero(field)];
    for z in roots {
        for x in xs {
            zx.push(z.mul(x).unwrap());
        }
    }
    for i in 0..n {
        let nonzero: Vec<&Scalar> = (0..n).map(|j| m.linear.at(i, j)).filter(|s| !s.is_zero()).collect();
        match nonzero.len() {
            0 => {
                if !zx.contains(&m.translation[i]) {
                    return false;
                }
            }
            1 => {
                if !roots.contains(nonzero[0]) {
                    return false;
                }
                if !m.translation[i].is_zero() {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// The two-parallel-image affine example: projections prj(K, L_i) for affine
/// lines L_i parallel to L, plus prj(L, J_i) for affine lines J_i.
pub fn parallel_image_example(field: FieldSpec) -> Result<AffineMonoidHandle> {
    parallel_image_example_with_cap(field, DEFAULT_CAP)
}

pub fn parallel_image_example_with_cap(
    field: FieldSpec,
    cap: usize,
) -> Result<AffineMonoidHandle> {
    let k = Subspace::line_from_ints(field, &[1, 0]);
    let l = Subspace::line_from_ints(field, &[0, 1]);
    let zero = Scalar::zero(field);
    let one = Scalar::one(field);
    // L1, L2 parallel to l at first coordinate 0 and 1.
    let l1 = AffineSubspace::new(vec![zero.clone(), zero.clone()], l.clone());
    let l2 = AffineSubspace::new(vec![one.clone(), zero.clone()], l.clone());
    // J1 the diagonal direction through the origin: not parallel to l or k.
    let j_dir = Subspace::line_from_ints(field, &[1, 1]);
    let j1 = AffineSubspace::new(vec![zero.clone(), zero.clone()], j_dir);
    let gens = vec![
        crate::linalg::affine_prj(&k, &l1)?,
        crate::linalg::affine_prj(&k, &l2)?,
        crate::linalg::affine_prj(&l, &j1)?,
    ];
    close_affine(&gens, cap)
}

// ---------------------------------------------------------------------------
// Affine analysis helpers
// ---------------------------------------------------------------------------

/// Kernels (linear lines) and images (affine subspaces) of the affine
/// projections in a finite affine monoid.
pub fn affine_kernels_images(
    m: &AffineMonoidHandle,
) -> Result<(Vec<Subspace>, Vec<AffineSubspace>)> {
    m.require_finite()?;
    let mut ker = vec![];
    let mut im = vec![];
    for e in m.elements() {
        if !e.is_affine_projection() {
            continue;
        }
        let k = crate::linalg::affine_kernel(e)?;
        if !ker.contains(&k) {
            ker.push(k);
        }
        let l = crate::linalg::affine_image(e)?;
        if !im.contains(&l) {
            im.push(l);
        }
    }
    ker.sort();
    im.sort();
    Ok((ker, im))
}

/// Affine completeness: for every kernel K and image L with K not parallel to
/// L, the affine projection onto L along K lies in M.
pub fn is_complete_affine(m: &AffineMonoidHandle) -> Result<(bool, Option<(Subspace, AffineSubspace)>)> {
    let (ker, im) = affine_kernels_images(m)?;
    for k in &ker {
        for l in im.iter() {
            if l.direction.contains(k) {
                continue;
            }
            let p = crate::linalg::affine_prj(k, l)?;
            if !m.contains(&p) {
                return Ok((false, Some((k.clone(), l.clone()))));
            }
        }
    }
    Ok((true, None))
}

/// The underlying linear monoid: linear parts of all elements.
pub fn underlying_linear(m: &AffineMonoidHandle) -> Result<MonoidHandle> {
    m.require_finite()?;
    let gens: Vec<Matrix> = m.generators.iter().map(|g| g.linear.clone()).collect();
    close(&gens, m.size().max(2))
}

/// Invariant affine lines of a dimension-2 affine monoid, by sweeping the
/// candidate directions (which must be an eigen-direction of every linear
/// part) and solving the offset constraints.
pub fn affine_invariant_lines(m: &AffineMonoidHandle) -> Result<Vec<AffineSubspace>> {
    m.require_finite()?;
    if m.dim != 2 {
        return Err(Error::OutOfRange(
            "affine invariant-line search is implemented in dimension 2".into(),
        ));
    }
    let field = m.field;
    // Candidate directions: common eigen-directions of the generator linear
    // parts. For a rank-1 idempotent these are exactly kernel and image.
    let mut candidates: Option<Vec<Subspace>> = None;
    for g in &m.generators {
        let a = &g.linear;
        let mut dirs = vec![];
        if a.is_identity() {
            continue;
        }
        let ns = crate::linalg::nullspace(a);
        if ns.dim() == 1 {
            dirs.push(ns);
        }
        let fixed = crate::linalg::nullspace(&a.sub(&Matrix::identity(field, 2)));
        if fixed.dim() == 1 {
            dirs.push(fixed);
        }
        candidates = Some(match candidates {
            None => dirs,
            Some(prev) => prev.into_iter().filter(|d| dirs.contains(d)).collect(),
        });
    }
    let Some(dirs) = candidates else {
        return Ok(vec![]);
    };
    let mut found = vec![];
    for d in dirs {
        // Solve for a base point x0: for every generator (A, b) we need
        // (A - I) x0 + b inside <d>, i.e. orthogonal to the annihilator u of d.
        let u = d.annihilator();
        let u = u.line_vector();
        let mut rows: Vec<Vec<Scalar>> = vec![];
        for g in &m.generators {
            let a = &g.linear;
            let mut row = vec![Scalar::zero(field); 3];
            for col in 0..2 {
                let mut acc = Scalar::zero(field);
                for r in 0..2 {
                    let coeff = if r == col {
                        a.at(r, col).sub(&Scalar::one(field)).unwrap()
                    } else {
                        a.at(r, col).clone()
                    };
                    acc = acc.add(&u[r].mul(&coeff).unwrap()).unwrap();
                }
                row[col] = acc;
            }
            let mut rhs = Scalar::zero(field);
            for r in 0..2 {
                rhs = rhs.add(&u[r].mul(&g.translation[r]).unwrap()).unwrap();
            }
            row[2] = rhs.neg();
            rows.push(row);
        }
        let pivots = crate::linalg::rref_in_place(&mut rows);
        if pivots.contains(&2) {
            continue; // inconsistent: no invariant line with this direction
        }
        let mut base = vec![Scalar::zero(field); 2];
        for (ri, &pc) in pivots.iter().enumerate() {
            base[pc] = rows[ri][2].clone();
        }
        found.push(AffineSubspace::new(base, d));
    }
    Ok(found)
}

// ---------------------------------------------------------------------------
// Brute-force idempotent generation check in the transformation model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct HowieReport {
    pub ok: bool,
    pub singular_count: u64,
    pub defect1_idempotent_count: u64,
}

/// Verify that the defect-1 idempotent transformations of {0..n} generate
/// exactly the non-bijective transformations, by semigroup closure.
pub fn howie_check(n: usize) -> Result<HowieReport> {
    if !(1..=4).contains(&n) {
        return Err(Error::OutOfRange("supported range is 1..=4".into()));
    }
    let dom = n + 1;
    let mut gens: Vec<Vec<u8>> = vec![];
    for i in 0..dom {
        for j in 0..dom {
            if i != j {
                let mut f: Vec<u8> = (0..dom as u8).collect();
                f[i] = j as u8;
                gens.push(f);
            }
        }
    }
    let mut seen: std::collections::HashSet<Vec<u8>> = gens.iter().cloned().collect();
    let mut frontier: Vec<Vec<u8>> = gens.clone();
    while !frontier.is_empty() {
        let mut next = vec![];
        for f in &frontier {
            for g in &gens {
                let h = compose_functions(f, g);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    let all: u64 = (dom as u64).pow(dom as u32);
    let fact: u64 = (1..=dom as u64).product();
    let expected_singular = all - fact;
    let all_singular = seen.iter().all(|f| {
        let mut hit = vec![false; dom];
        for &v in f {
            hit[v as usize] = true;
        }
        hit.iter().any(|&h| !h)
    });
    Ok(HowieReport {
        ok: all_singular && seen.len() as u64 == expected_singular,
        singular_count: seen.len() as u64,
        defect1_idempotent_count: gens.len() as u64,
    })
}

// ---------------------------------------------------------------------------
// Infinite-closure fixtures
// ---------------------------------------------------------------------------

pub struct Fixture {
    pub name: &'static str,
    pub generators: Vec<Matrix>,
    /// A product of the generators whose powers are all distinct.
    pub unbounded_product: Matrix,
}

/// The dimension-3 projection sets whose closures are infinite, each paired
/// with the explicit product that certifies unboundedness.
pub fn section5_fixtures() -> Vec<Fixture> {
    let q = FieldSpec::Rationals;
    let mut out = vec![];
    // Kernel pair (1,a,b) with (1,1,1) against coordinate-plane images:
    // the disallowed parameter choices blow up.
    let pair = |a: i64, b: i64| -> Vec<Matrix> {
        vec![
            Matrix::from_int_rows(q, &[&[0, 0, 0], &[-a, 1, 0], &[-b, 0, 1]]),
            Matrix::from_int_rows(q, &[&[1, -1, 0], &[0, 0, 0], &[0, -1, 1]]),
        ]
    };
    out.push(Fixture {
        name: "kernel-pair-a2-b0",
        generators: pair(2, 0),
        unbounded_product: Matrix::from_int_rows(q, &[&[0, 0, 0], &[-2, 2, 0], &[0, -1, 1]]),
    });
    out.push(Fixture {
        name: "kernel-pair-a1-bm1",
        generators: pair(1, -1),
        unbounded_product: Matrix::from_int_rows(q, &[&[0, 0, 0], &[-1, 1, 0], &[1, -2, 1]]),
    });
    out.push(Fixture {
        name: "kernel-pair-a1-b0",
        generators: pair(1, 0),
        unbounded_product: Matrix::from_int_rows(q, &[&[0, 0, 0], &[-1, 1, 0], &[0, -1, 1]]),
    });
    out.push(Fixture {
        name: "three-kernels-three-images",
        generators: vec![
            Matrix::from_int_rows(q, &[&[0, 0, 0], &[0, 1, 0], &[1, 0, 1]]),
            Matrix::from_int_rows(q, &[&[1, 1, 0], &[0, 0, 0], &[0, 0, 1]]),
            Matrix::from_int_rows(q, &[&[1, 0, -1], &[0, 1, -1], &[0, 0, 0]]),
        ],
        unbounded_product: Matrix::from_int_rows(q, &[&[0, 0, 0], &[0, 0, 0], &[1, 1, -2]]),
    });
    out.push(Fixture {
        name: "three-kernels-with-axis",
        generators: vec![
            Matrix::from_int_rows(q, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            Matrix::from_int_rows(q, &[&[1, -1, 0], &[0, 0, 0], &[0, -1, 1]]),
            Matrix::from_int_rows(q, &[&[0, 0, 0], &[1, 1, 0], &[0, 0, 1]]),
            Matrix::from_int_rows(q, &[&[1, 0, -1], &[0, 1, -1], &[0, 0, 0]]),
        ],
        unbounded_product: Matrix::from_int_rows(q, &[&[0, 0, 0], &[0, 0, 0], &[-1, -1, 2]]),
    });
    // Fourth-image configurations from the classification endgame.
    let half = Scalar::from_rational(q, 1, 2).unwrap();
    let third_gen = Matrix::from_rows(
        q,
        vec![
            vec![Scalar::zero(q), half.clone(), half.clone()],
            vec![Scalar::zero(q), Scalar::one(q), Scalar::zero(q)],
            vec![Scalar::zero(q), Scalar::zero(q), Scalar::one(q)],
        ],
    )
    .unwrap();
    let product1 = Matrix::from_rows(
        q,
        vec![
            vec![Scalar::zero(q), Scalar::zero(q), Scalar::zero(q)],
            vec![Scalar::zero(q), Scalar::zero(q), Scalar::zero(q)],
            vec![Scalar::zero(q), half.neg(), half],
        ],
    )
    .unwrap();
    out.push(Fixture {
        name: "fourth-image-generic",
        generators: vec![
            Matrix::from_int_rows(q, &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 1]]),
            Matrix::from_int_rows(q, &[&[0, 0, 0], &[-1, 1, 0], &[-1, 0, 1]]),
            third_gen,
        ],
        unbounded_product: product1,
    });
    out.push(Fixture {
        name: "fourth-image-special",
        generators: vec![
            Matrix::from_int_rows(q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]),
            Matrix::from_int_rows(q, &[&[1, -1, 0], &[0, 0, 0], &[0, -1, 1]]),
            Matrix::from_int_rows(q, &[&[1, 0, 0], &[-1, 0, 2], &[0, 0, 1]]),
        ],
        unbounded_product: Matrix::from_int_rows(q, &[&[2, 0, -2], &[0, 0, 0], &[0, 0, 0]]),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_projection;
    use crate::monoid::ClosureStatus;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn type_a_small_orders() {
        assert_eq!(order_a_formula(1, 0), 2);
        assert_eq!(order_a_formula(2, 0), 20);
        assert_eq!(order_a_formula(3, 0), 230);
        assert_eq!(order_a_formula(4, 0), 3002);
        assert_eq!(order_a_formula(2, 2), 11);
        assert_eq!(order_a_formula(3, 2), 188);

        let a1 = make_a(1, Q).unwrap();
        assert_eq!(a1.monoid.size(), 2);
        assert!(a1.monoid.contains(&Matrix::zero(Q, 1)));

        let a2 = make_a(2, Q).unwrap();
        assert_eq!(a2.monoid.size(), 20);
        assert_eq!(a2.arcs.len(), 6);
        for g in &a2.monoid.generators {
            assert!(is_projection(g));
        }
    }

    #[test]
    fn type_a_char2() {
        let a2 = make_a(2, FieldSpec::PrimeField(2)).unwrap();
        assert_eq!(a2.monoid.size(), 11);
    }

    #[test]
    fn a_plus_model_agrees() {
        let (m, model) = make_a_plus(2, Q).unwrap();
        assert_eq!(m.size(), 22);
        assert_eq!(order_a_plus_formula(2), 22);
        assert_eq!(model.functions.len(), 22);
        let (m1, _) = make_a_plus(1, Q).unwrap();
        assert_eq!(m1.size(), 3);
        // Basis vectors are permuted-or-collapsed by every element: each
        // column of each element is a standard basis vector.
        for e in m.elements() {
            for j in 0..3 {
                let ones = (0..3).filter(|&i| e.at(i, j).is_one()).count();
                let zeros = (0..3).filter(|&i| e.at(i, j).is_zero()).count();
                assert!(ones == 1 && zeros == 2);
            }
        }
        // The model is a faithful image: matrices of the functions are
        // exactly the element set.
        for f in &model.functions {
            assert!(m.contains(&function_matrix(Q, f)));
        }
    }

    #[test]
    fn type_b_small_orders() {
        assert_eq!(order_b_formula(2, 2), 18);
        assert_eq!(order_b_formula(3, 2), 296);
        assert_eq!(order_b_formula(3, 1), 59);
        assert_eq!(order_b_formula(2, 1), 8);

        let b21 = make_b(2, 1, Q).unwrap();
        assert_eq!(b21.monoid.size(), 8);
        assert_eq!(b21.labels.len(), 4);

        let b22 = make_b(2, 2, Q).unwrap();
        assert_eq!(b22.monoid.size(), 18);

        // 4th roots are not available over the rationals.
        assert!(matches!(
            make_b(2, 4, Q),
            Err(Error::MissingRoots(4))
        ));
    }

    #[test]
    fn x_y_z_lines_and_orders() {
        let one = Scalar::one(Q);
        let minus = one.neg();
        let m = make_x(&[one.clone(), minus.clone()], 0, Q).unwrap();
        assert_eq!(m.size(), 9);
        let m = make_x(&[one.clone()], 1, Q).unwrap();
        assert_eq!(m.size(), 6);
        let m = make_x(&[one.clone(), minus.clone()], 2, Q).unwrap();
        assert_eq!(m.size(), 18);
        assert!(make_x(&[one.clone()], 0, Q).is_err());
        assert!(make_x(&[minus.clone()], 2, Q).is_err());

        let z0 = make_z(0, Q).unwrap();
        assert_eq!(z0.size(), 20);
        assert!(matches!(make_z(1, Q), Err(Error::MissingRoots(3))));

        let c3 = FieldSpec::Cyclotomic(3);
        let f = make_field(c3).unwrap();
        let w = f.primitive_cube_root().unwrap();
        let y = make_y(&w, c3).unwrap();
        assert_eq!(y.size(), 56);
        assert!(make_y(&f.one(), c3).is_err());
        assert!(make_y(&f.int(-1), c3).is_err());
    }

    #[test]
    fn affine_c_matches_extended_model() {
        let c2 = make_affine_c(2, Q).unwrap();
        assert_eq!(c2.monoid.size(), 22);
        let c1 = make_affine_c(1, Q).unwrap();
        assert_eq!(c1.monoid.size(), 3);
        // Linear parts of the generators are exactly the type A generators.
        let a2 = make_a(2, Q).unwrap();
        let lin: Vec<Matrix> = c2.monoid.generators.iter().map(|g| g.linear.clone()).collect();
        for g in &a2.monoid.generators {
            assert!(lin.contains(g));
        }
        for l in &lin {
            assert!(a2.monoid.generators.contains(l));
        }
    }

    #[test]
    fn affine_d_shape() {
        let f = make_field(Q).unwrap();
        let zero = f.zero();
        let one = f.one();
        let d = make_affine_d(2, 1, &[zero.clone()], Q).unwrap();
        assert!(d.status.is_finite());
        let roots = tth_roots(&f, 1).unwrap();
        for e in d.elements() {
            assert!(in_shape_ntx(e, &roots, &[zero.clone()]));
        }
        let d2 = make_affine_d(2, 2, &[zero.clone(), one.clone()], Q).unwrap();
        assert!(d2.status.is_finite());
        let roots2 = tth_roots(&f, 2).unwrap();
        for e in d2.elements() {
            assert!(in_shape_ntx(e, &roots2, &[zero.clone(), one.clone()]));
        }
        // The underlying linear monoid is the dual of type B.
        let ud = underlying_linear(&d).unwrap();
        let b = make_b(2, 1, Q).unwrap();
        let bd = crate::monoid::dual(&b.monoid).unwrap();
        assert_eq!(ud.size(), bd.size());
        for e in ud.elements() {
            assert!(bd.contains(e));
        }
    }

    #[test]
    fn howie_small() {
        let r1 = howie_check(1).unwrap();
        assert!(r1.ok);
        assert_eq!(r1.singular_count, 2);
        let r2 = howie_check(2).unwrap();
        assert!(r2.ok);
        assert_eq!(r2.singular_count, 21);
        assert!(howie_check(5).is_err());
    }

    #[test]
    fn fixtures_are_projection_sets_and_blow_up() {
        for fixture in section5_fixtures() {
            for g in &fixture.generators {
                assert!(is_projection(g), "{}: generator not a projection", fixture.name);
            }
            let m = close(&fixture.generators, 800).unwrap();
            let ClosureStatus::CapExceeded(Some(w)) = &m.status else {
                panic!("{}: expected infinite closure with witness", fixture.name);
            };
            let distinct: std::collections::HashSet<_> = w.powers.iter().collect();
            assert_eq!(distinct.len(), w.powers.len());
            // The product named in the fixture is in the monoid and its
            // powers stay pairwise distinct.
            assert!(
                m.contains(&fixture.unbounded_product),
                "{}: product not reached",
                fixture.name
            );
            let mut seen = std::collections::HashSet::new();
            let mut cur = fixture.unbounded_product.clone();
            for _ in 0..30 {
                assert!(seen.insert(cur.clone()), "{}: power repeated", fixture.name);
                cur = cur.mul(&fixture.unbounded_product);
            }
        }
    }

    #[test]
    fn parallel_image_example_closes() {
        let m = parallel_image_example(Q).unwrap();
        assert!(m.status.is_finite());
        let (complete, _) = is_complete_affine(&m).unwrap();
        assert!(!complete);
    }

    /// Restrict each function on the extended coordinates to the difference
    /// subspace and count the collapses: constants all give the zero map, and
    /// in characteristic 2 the two-valued functions pair up.
    fn restricted_matrix(field: FieldSpec, f: &[u8]) -> Matrix {
        let n = f.len() - 1;
        let mut m = Matrix::zero(field, n);
        for k in 1..=n {
            // f_k = e_k - e_0 maps to f_{f(k)} - f_{f(0)}.
            let fk = f[k] as usize;
            let f0 = f[0] as usize;
            if fk >= 1 {
                let cur = m.at(fk - 1, k - 1).add(&Scalar::one(field)).unwrap();
                *m.at_mut(fk - 1, k - 1) = cur;
            }
            if f0 >= 1 {
                let cur = m.at(f0 - 1, k - 1).sub(&Scalar::one(field)).unwrap();
                *m.at_mut(f0 - 1, k - 1) = cur;
            }
        }
        m
    }

    #[test]
    fn transformation_model_collapse_counts() {
        for (n, field) in [(2usize, Q), (3, Q), (2, FieldSpec::PrimeField(2)), (3, FieldSpec::PrimeField(2))] {
            let dom = n + 1;
            let mut singular = vec![];
            let mut counter = vec![0u8; dom];
            loop {
                let mut hit = vec![false; dom];
                for &v in &counter {
                    hit[v as usize] = true;
                }
                if hit.iter().any(|h| !h) {
                    singular.push(counter.clone());
                }
                let mut i = dom;
                let mut done = false;
                loop {
                    if i == 0 {
                        done = true;
                        break;
                    }
                    i -= 1;
                    counter[i] += 1;
                    if (counter[i] as usize) < dom {
                        break;
                    }
                    counter[i] = 0;
                }
                if done {
                    break;
                }
            }
            let distinct: std::collections::HashSet<Matrix> = singular
                .iter()
                .map(|f| restricted_matrix(field, f))
                .collect();
            // Collapses: the dom constants give one zero map; in
            // characteristic 2 the two-valued functions merge in pairs.
            let expected = if field.characteristic() != 2 {
                singular.len() - n
            } else {
                let choose2 = dom * (dom - 1) / 2;
                let two_valued = ((1usize << dom) - 2) * choose2;
                singular.len() - n - two_valued / 2
            };
            assert_eq!(distinct.len(), expected, "n = {n}, field = {field}");
            // The closure size is the distinct count plus the identity.
            let a = make_a(n, field).unwrap();
            assert_eq!(a.monoid.size(), distinct.len() + 1);
        }
    }

    #[test]
    fn all_constructor_generators_are_projections() {
        let f3 = crate::fields::make_field(FieldSpec::Cyclotomic(3)).unwrap();
        let w = f3.primitive_cube_root().unwrap();
        let linear: Vec<Vec<Matrix>> = vec![
            make_a(2, Q).unwrap().monoid.generators,
            make_a(3, FieldSpec::PrimeField(2)).unwrap().monoid.generators,
            make_a_plus(2, Q).unwrap().0.generators,
            make_b(3, 2, Q).unwrap().monoid.generators,
            make_x(&[f3.one(), f3.int(-1)], 2, f3.spec).unwrap().generators,
            make_y(&w, f3.spec).unwrap().generators,
            make_z(4, f3.spec).unwrap().generators,
        ];
        for gens in linear {
            for g in gens {
                assert!(is_projection(&g));
            }
        }
        let affine: Vec<Vec<crate::linalg::AffineMap>> = vec![
            make_affine_c(2, Q).unwrap().monoid.generators,
            make_affine_d(2, 2, &[Scalar::zero(Q), Scalar::one(Q)], Q)
                .unwrap()
                .generators,
        ];
        for gens in affine {
            for g in gens {
                assert!(g.is_affine_projection());
            }
        }
    }
}
