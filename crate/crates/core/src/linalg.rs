//! Exact dense matrices, canonical subspaces, projection and semireflection
//! predicates, and affine maps.
//!
//! Subspaces are stored as reduced-row-echelon bases, so subspace equality is
//! representation equality. The dimension is capped at 6.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{FieldSpec, Scalar};

pub const MAX_DIM: usize = 6;

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// Dense square matrix over one field, row-major entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub dim: usize,
    pub field: FieldSpec,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let dim = rows.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::OutOfRange(format!("dimension {dim}")));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimMismatch);
            }
            for s in row {
                if s.field != field {
                    return Err(Error::FieldMismatch);
                }
                entries.push(s);
            }
        }
        Ok(Matrix {
            dim,
            field,
            entries,
        })
    }

    pub fn from_int_rows(field: FieldSpec, rows: &[&[i64]]) -> Matrix {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim);
            for &v in row.iter() {
                entries.push(Scalar::from_integer(field, v));
            }
        }
        Matrix {
            dim,
            field,
            entries,
        }
    }

    pub fn identity(field: FieldSpec, dim: usize) -> Matrix {
        let mut m = Matrix::zero(field, dim);
        for i in 0..dim {
            *m.at_mut(i, i) = Scalar::one(field);
        }
        m
    }

    pub fn zero(field: FieldSpec, dim: usize) -> Matrix {
        Matrix {
            dim,
            field,
            entries: vec![Scalar::zero(field); dim * dim],
        }
    }

    pub fn scalar(field: FieldSpec, dim: usize, s: &Scalar) -> Matrix {
        let mut m = Matrix::zero(field, dim);
        for i in 0..dim {
            *m.at_mut(i, i) = s.clone();
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.dim + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.entries[r * self.dim + c]
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        assert_eq!(self.field, rhs.field, "field mismatch");
        let n = self.dim;
        let mut out = Matrix::zero(self.field, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a.mul(b).unwrap();
                    let cur = out.at(i, j).add(&t).unwrap();
                    *out.at_mut(i, j) = cur;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&rhs.entries) {
            *a = a.add(b).unwrap();
        }
        out
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&rhs.entries) {
            *a = a.sub(b).unwrap();
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = a.mul(s).unwrap();
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = self.at(j, i).clone();
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                let mut acc = Scalar::zero(self.field);
                for j in 0..n {
                    acc = acc.add(&self.at(i, j).mul(&v[j]).unwrap()).unwrap();
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = Scalar::zero(self.field);
        for i in 0..self.dim {
            acc = acc.add(self.at(i, i)).unwrap();
        }
        acc
    }

    pub fn pow(&self, e: u64) -> Matrix {
        let mut acc = Matrix::identity(self.field, self.dim);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn det(&self) -> Scalar {
        let mut rows = self.rows();
        let n = self.dim;
        let mut det = Scalar::one(self.field);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !rows[r][col].is_zero());
            let Some(p) = pivot else {
                return Scalar::zero(self.field);
            };
            if p != col {
                rows.swap(p, col);
                det = det.neg();
            }
            det = det.mul(&rows[col][col]).unwrap();
            let inv = rows[col][col].inv().unwrap();
            for r in col + 1..n {
                if rows[r][col].is_zero() {
                    continue;
                }
                let factor = rows[r][col].mul(&inv).unwrap();
                for c in col..n {
                    let t = factor.mul(&rows[col][c]).unwrap();
                    rows[r][c] = rows[r][c].sub(&t).unwrap();
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.dim;
        let mut left = self.rows();
        let mut right = Matrix::identity(self.field, n).rows();
        let mut rank = 0usize;
        for col in 0..n {
            let pivot = (rank..n).find(|&r| !left[r][col].is_zero());
            let Some(p) = pivot else {
                return Err(Error::Singular);
            };
            left.swap(p, rank);
            right.swap(p, rank);
            let inv = left[rank][col].inv().unwrap();
            for c in 0..n {
                left[rank][c] = left[rank][c].mul(&inv).unwrap();
                right[rank][c] = right[rank][c].mul(&inv).unwrap();
            }
            for r in 0..n {
                if r == rank || left[r][col].is_zero() {
                    continue;
                }
                let factor = left[r][col].clone();
                for c in 0..n {
                    let t = factor.mul(&left[rank][c]).unwrap();
                    left[r][c] = left[r][c].sub(&t).unwrap();
                    let t = factor.mul(&right[rank][c]).unwrap();
                    right[r][c] = right[r][c].sub(&t).unwrap();
                }
            }
            rank += 1;
        }
        Matrix::from_rows(self.field, right)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows();
        rref_in_place(&mut rows).len()
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.field, self.dim)
    }

    /// Canonical scale: divide by the first non-zero entry. Zero maps stay zero.
    pub fn projective_normalize(&self) -> Matrix {
        match self.entries.iter().find(|e| !e.is_zero()) {
            None => self.clone(),
            Some(lead) => self.scale(&lead.inv().unwrap()),
        }
    }
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Matrix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.entries.cmp(&other.entries)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = self.row(r).iter().map(|s| s.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Row reduction and subspaces
// ---------------------------------------------------------------------------

/// In-place reduced row echelon form; returns the pivot columns. Zero rows are
/// removed.
pub fn rref_in_place(rows: &mut Vec<Vec<Scalar>>) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut pivots = vec![];
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].inv().unwrap();
        for x in rows[r].iter_mut() {
            *x = x.mul(&inv).unwrap();
        }
        for i in 0..nrows {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            for cc in 0..ncols {
                let t = factor.mul(&rows[r][cc]).unwrap();
                rows[i][cc] = rows[i][cc].sub(&t).unwrap();
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    rows.truncate(pivots.len());
    pivots
}

/// A linear subspace in canonical RREF-basis form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub field: FieldSpec,
    basis: Vec<Vec<Scalar>>,
}

impl Subspace {
    pub fn from_rows(field: FieldSpec, ambient_dim: usize, rows: Vec<Vec<Scalar>>) -> Subspace {
        let mut rows = rows;
        rows.retain(|r| r.iter().any(|s| !s.is_zero()));
        rref_in_place(&mut rows);
        Subspace {
            ambient_dim,
            field,
            basis: rows,
        }
    }

    pub fn zero(field: FieldSpec, ambient_dim: usize) -> Subspace {
        Subspace {
            ambient_dim,
            field,
            basis: vec![],
        }
    }

    pub fn full(field: FieldSpec, ambient_dim: usize) -> Subspace {
        Subspace::from_rows(
            field,
            ambient_dim,
            Matrix::identity(field, ambient_dim).rows(),
        )
    }

    pub fn line(field: FieldSpec, v: Vec<Scalar>) -> Subspace {
        let n = v.len();
        Subspace::from_rows(field, n, vec![v])
    }

    pub fn line_from_ints(field: FieldSpec, v: &[i64]) -> Subspace {
        Subspace::line(
            field,
            v.iter().map(|&x| Scalar::from_integer(field, x)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_line(&self) -> bool {
        self.dim() == 1
    }

    pub fn is_hyperplane(&self) -> bool {
        self.dim() + 1 == self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    /// The canonical spanning vector of a line.
    pub fn line_vector(&self) -> &[Scalar] {
        assert!(self.is_line());
        &self.basis[0]
    }

    /// Reduce a vector against the basis; the remainder is zero iff the vector
    /// lies in the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for row in &self.basis {
            let pivot = row.iter().position(|s| !s.is_zero()).unwrap();
            if v[pivot].is_zero() {
                continue;
            }
            let factor = v[pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                let t = factor.mul(r).unwrap();
                *x = x.sub(&t).unwrap();
            }
        }
        v
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|s| s.is_zero())
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|r| self.contains_vector(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::from_rows(self.field, self.ambient_dim, rows)
    }

    /// Annihilator under the standard pairing: the null space of the basis
    /// matrix, living in the dual coordinates.
    pub fn annihilator(&self) -> Subspace {
        nullspace_of_rows(self.field, self.ambient_dim, &self.basis)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        self.annihilator()
            .sum(&other.annihilator())
            .annihilator()
    }

    /// Image of the subspace under an invertible (or any) matrix.
    pub fn map(&self, m: &Matrix) -> Subspace {
        let rows: Vec<Vec<Scalar>> = self.basis.iter().map(|v| m.apply(v)).collect();
        Subspace::from_rows(self.field, self.ambient_dim, rows)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.basis.is_empty() {
            return write!(f, "0");
        }
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| {
                let xs: Vec<String> = r.iter().map(|s| s.to_string()).collect();
                format!("({})", xs.join(", "))
            })
            .collect();
        write!(f, "<{}>", rows.join(", "))
    }
}

/// Null space of a list of row vectors, canonicalised.
pub fn nullspace_of_rows(field: FieldSpec, n: usize, rows: &[Vec<Scalar>]) -> Subspace {
    let mut work: Vec<Vec<Scalar>> = rows.to_vec();
    let pivots = rref_in_place(&mut work);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = vec![];
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(field); n];
        v[free] = Scalar::one(field);
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = work[ri][free].neg();
        }
        basis.push(v);
    }
    Subspace::from_rows(field, n, basis)
}

/// Null space of a matrix (kernel as a map x -> Mx).
pub fn nullspace(m: &Matrix) -> Subspace {
    nullspace_of_rows(m.field, m.dim, &m.rows())
}

/// Column space of a matrix in canonical form.
pub fn column_space(m: &Matrix) -> Subspace {
    Subspace::from_rows(m.field, m.dim, m.transpose().rows())
}

// ---------------------------------------------------------------------------
// Projections and semireflection classification
// ---------------------------------------------------------------------------

/// The projection with kernel K (a line) and image L (a hyperplane), defined
/// when K is not contained in L.
pub fn prj(kernel: &Subspace, image: &Subspace) -> Result<Matrix> {
    let n = kernel.ambient_dim;
    let field = kernel.field;
    if !kernel.is_line() || image.dim() + 1 != n || image.ambient_dim != n {
        return Err(Error::OutOfRange(
            "prj needs a line kernel and a hyperplane image".into(),
        ));
    }
    if image.contains(kernel) {
        return Err(Error::DegenerateProjection);
    }
    let k = kernel.line_vector();
    let u = image.annihilator();
    let u = u.line_vector();
    // p(x) = x - k * (u.x) / (u.k)
    let mut uk = Scalar::zero(field);
    for (ui, ki) in u.iter().zip(k) {
        uk = uk.add(&ui.mul(ki).unwrap()).unwrap();
    }
    let uk_inv = uk.inv().map_err(|_| Error::DegenerateProjection)?;
    let mut p = Matrix::identity(field, n);
    for i in 0..n {
        for j in 0..n {
            let t = k[i].mul(&u[j]).unwrap().mul(&uk_inv).unwrap();
            *p.at_mut(i, j) = p.at(i, j).sub(&t).unwrap();
        }
    }
    Ok(p)
}

/// Kernel of a nullity-1 map, canonicalised.
pub fn kernel_line(m: &Matrix) -> Result<Subspace> {
    let ns = nullspace(m);
    if ns.dim() != 1 {
        return Err(Error::BadNullity(ns.dim()));
    }
    Ok(ns)
}

/// Column space of a map, canonicalised.
pub fn image_space(m: &Matrix) -> Subspace {
    column_space(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReflectionKind {
    /// Finite multiplicative order k (the non-unit eigenvalue is a k-th root).
    Order(u64),
    /// Unipotent case: (m - I)^2 = 0, m != I.
    Transvection,
    /// Invertible with rank(m - I) = 1 but no power up to the search bound
    /// returns to the identity.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapClass {
    Identity,
    Reflection(ReflectionKind),
    Projection,
    RankDeficientOther,
    InvertibleOther,
}

/// Classify a linear map as identity / reflection / projection / other.
pub fn classify_map(m: &Matrix) -> MapClass {
    let n = m.dim;
    let id = Matrix::identity(m.field, n);
    if *m == id {
        return MapClass::Identity;
    }
    let diff = m.sub(&id);
    let invertible = m.is_invertible();
    if invertible && diff.rank() == 1 {
        let sq = diff.mul(&diff);
        if sq == Matrix::zero(m.field, n) {
            return MapClass::Reflection(ReflectionKind::Transvection);
        }
        let bound = m.field.unity_count() * n as u64;
        let mut cur = m.clone();
        for k in 1..=bound {
            if cur == id {
                return MapClass::Reflection(ReflectionKind::Order(k));
            }
            cur = cur.mul(m);
        }
        return MapClass::Reflection(ReflectionKind::Unbounded);
    }
    if m.is_idempotent() && m.rank() + 1 == n {
        return MapClass::Projection;
    }
    if invertible {
        MapClass::InvertibleOther
    } else {
        MapClass::RankDeficientOther
    }
}

pub fn is_projection(m: &Matrix) -> bool {
    classify_map(m) == MapClass::Projection
}

// ---------------------------------------------------------------------------
// Affine maps
// ---------------------------------------------------------------------------

/// Affine map v -> Av + b.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    pub linear: Matrix,
    pub translation: Vec<Scalar>,
}

impl AffineMap {
    pub fn new(linear: Matrix, translation: Vec<Scalar>) -> Result<AffineMap> {
        if translation.len() != linear.dim {
            return Err(Error::DimMismatch);
        }
        if translation.iter().any(|s| s.field != linear.field) {
            return Err(Error::FieldMismatch);
        }
        Ok(AffineMap {
            linear,
            translation,
        })
    }

    pub fn from_linear(m: Matrix) -> AffineMap {
        let b = vec![Scalar::zero(m.field); m.dim];
        AffineMap {
            linear: m,
            translation: b,
        }
    }

    pub fn identity(field: FieldSpec, dim: usize) -> AffineMap {
        AffineMap::from_linear(Matrix::identity(field, dim))
    }

    pub fn dim(&self) -> usize {
        self.linear.dim
    }

    pub fn field(&self) -> FieldSpec {
        self.linear.field
    }

    /// (A1, b1) o (A2, b2) = (A1 A2, A1 b2 + b1).
    pub fn compose(&self, rhs: &AffineMap) -> AffineMap {
        let linear = self.linear.mul(&rhs.linear);
        let mut translation = self.linear.apply(&rhs.translation);
        for (t, b) in translation.iter_mut().zip(&self.translation) {
            *t = t.add(b).unwrap();
        }
        AffineMap {
            linear,
            translation,
        }
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.linear.apply(v);
        for (o, b) in out.iter_mut().zip(&self.translation) {
            *o = o.add(b).unwrap();
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose(self) == *self
    }

    /// An affine projection: idempotent with affine image of codimension 1.
    pub fn is_affine_projection(&self) -> bool {
        self.is_idempotent() && self.linear.rank() + 1 == self.dim()
    }
}

/// The linear part v -> m(v) - m(0).
pub fn linear_part(m: &AffineMap) -> Matrix {
    m.linear.clone()
}

/// The kernel {p(v) - v} of an affine projection; a linear line.
pub fn affine_kernel(p: &AffineMap) -> Result<Subspace> {
    if !p.is_affine_projection() {
        return Err(Error::NotAffineProjection);
    }
    kernel_line(&p.linear)
}

/// An affine subspace in canonical form: the RREF-least base point plus a
/// direction subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineSubspace {
    pub base: Vec<Scalar>,
    pub direction: Subspace,
}

impl AffineSubspace {
    pub fn new(mut base: Vec<Scalar>, direction: Subspace) -> AffineSubspace {
        // Canonical base point: kill the pivot coordinates of the direction.
        for row in direction.basis() {
            let pivot = row.iter().position(|s| !s.is_zero()).unwrap();
            if base[pivot].is_zero() {
                continue;
            }
            let factor = base[pivot].clone();
            for (x, r) in base.iter_mut().zip(row) {
                let t = factor.mul(r).unwrap();
                *x = x.sub(&t).unwrap();
            }
        }
        AffineSubspace { base, direction }
    }

    pub fn contains_point(&self, v: &[Scalar]) -> bool {
        let diff: Vec<Scalar> = v
            .iter()
            .zip(&self.base)
            .map(|(a, b)| a.sub(b).unwrap())
            .collect();
        self.direction.contains_vector(&diff)
    }

    pub fn parallel_to(&self, other: &AffineSubspace) -> bool {
        self.direction == other.direction
    }
}

/// Fixed-point set of an affine projection, i.e. its image: the solution set
/// of (A - I)x = -b.
pub fn affine_image(p: &AffineMap) -> Result<AffineSubspace> {
    if !p.is_affine_projection() {
        return Err(Error::NotAffineProjection);
    }
    let n = p.dim();
    let field = p.field();
    let id = Matrix::identity(field, n);
    let coeff = p.linear.sub(&id);
    // Solve coeff * x = -b by row reduction of the augmented system.
    let mut aug: Vec<Vec<Scalar>> = coeff
        .rows()
        .into_iter()
        .zip(&p.translation)
        .map(|(mut row, b)| {
            row.push(b.neg());
            row
        })
        .collect();
    let pivots = rref_in_place(&mut aug);
    if pivots.contains(&n) {
        return Err(Error::NotAffineProjection);
    }
    let mut base = vec![Scalar::zero(field); n];
    for (ri, &pc) in pivots.iter().enumerate() {
        base[pc] = aug[ri][n].clone();
    }
    let direction = nullspace(&coeff);
    Ok(AffineSubspace::new(base, direction))
}

/// The affine projection fixing the affine hyperplane `image` pointwise and
/// moving along the line `kernel`.
pub fn affine_prj(kernel: &Subspace, image: &AffineSubspace) -> Result<AffineMap> {
    let n = kernel.ambient_dim;
    let field = kernel.field;
    if !kernel.is_line() || image.direction.dim() + 1 != n {
        return Err(Error::OutOfRange(
            "affine_prj needs a line kernel and codim-1 image".into(),
        ));
    }
    let u = image.direction.annihilator();
    let u = u.line_vector();
    let k = kernel.line_vector();
    let mut uk = Scalar::zero(field);
    let mut ubase = Scalar::zero(field);
    for i in 0..n {
        uk = uk.add(&u[i].mul(&k[i]).unwrap()).unwrap();
        ubase = ubase.add(&u[i].mul(&image.base[i]).unwrap()).unwrap();
    }
    let uk_inv = uk.inv().map_err(|_| Error::DegenerateProjection)?;
    // p(x) = x - k * (u.x - u.base) / (u.k)
    let mut a = Matrix::identity(field, n);
    let mut b = vec![Scalar::zero(field); n];
    for i in 0..n {
        for j in 0..n {
            let t = k[i].mul(&u[j]).unwrap().mul(&uk_inv).unwrap();
            *a.at_mut(i, j) = a.at(i, j).sub(&t).unwrap();
        }
        b[i] = k[i].mul(&ubase).unwrap().mul(&uk_inv).unwrap();
    }
    AffineMap::new(a, b)
}
