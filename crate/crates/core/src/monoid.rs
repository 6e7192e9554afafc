//! Closure engine over exact matrices and affine maps, finiteness detection,
//! generation testing, duality, the units/projection-part split and the
//! equivalence search.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::frames::{self, SearchMode};
use crate::linalg::{is_projection, AffineMap, Matrix, Subspace};

pub const DEFAULT_CAP: usize = 100_000;

/// Anything the closure engine can multiply.
pub trait Composable: Clone + Eq + Hash + Ord + Send + Sync {
    fn compose(&self, rhs: &Self) -> Self;
    fn identity_like(&self) -> Self;
}

impl Composable for Matrix {
    fn compose(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn identity_like(&self) -> Self {
        Matrix::identity(self.field, self.dim)
    }
}

impl Composable for AffineMap {
    fn compose(&self, rhs: &Self) -> Self {
        AffineMap::compose(self, rhs)
    }
    fn identity_like(&self) -> Self {
        AffineMap::identity(self.field(), self.dim())
    }
}

/// Certificate that a closure is infinite: an element whose first k powers are
/// pairwise distinct.
#[derive(Debug, Clone)]
pub struct InfinitenessWitness<T> {
    pub element: T,
    pub powers: Vec<T>,
}

#[derive(Debug, Clone)]
pub enum ClosureStatus<T> {
    Unclosed,
    Finite(usize),
    CapExceeded(Option<InfinitenessWitness<T>>),
}

impl<T> ClosureStatus<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, ClosureStatus::Finite(_))
    }
}

/// A monoid given by generators, with its element set populated by `close`.
/// Elements are stored in deterministic breadth-first insertion order.
#[derive(Debug, Clone)]
pub struct GenericMonoid<T: Composable> {
    pub field: FieldSpec,
    pub dim: usize,
    pub generators: Vec<T>,
    elements: Vec<T>,
    index: HashMap<T, u32>,
    pub status: ClosureStatus<T>,
    table: OnceLock<Vec<u32>>,
}

pub type MonoidHandle = GenericMonoid<Matrix>;
pub type AffineMonoidHandle = GenericMonoid<AffineMap>;

impl<T: Composable> GenericMonoid<T> {
    fn new_unclosed(field: FieldSpec, dim: usize, generators: Vec<T>) -> Self {
        GenericMonoid {
            field,
            dim,
            generators,
            elements: vec![],
            index: HashMap::new(),
            status: ClosureStatus::Unclosed,
            table: OnceLock::new(),
        }
    }

    /// Build a handle from an already-closed element list (insertion order is
    /// kept). The caller asserts closure under products.
    pub fn from_closed_elements(
        field: FieldSpec,
        dim: usize,
        generators: Vec<T>,
        elements: Vec<T>,
    ) -> Self {
        let mut index = HashMap::new();
        let mut dedup = vec![];
        for e in elements {
            if !index.contains_key(&e) {
                index.insert(e.clone(), dedup.len() as u32);
                dedup.push(e);
            }
        }
        let mut m = GenericMonoid::new_unclosed(field, dim, generators);
        m.status = ClosureStatus::Finite(dedup.len());
        m.elements = dedup;
        m.index = index;
        m
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn contains(&self, t: &T) -> bool {
        self.index.contains_key(t)
    }

    pub fn element_index(&self, t: &T) -> Option<usize> {
        self.index.get(t).map(|&i| i as usize)
    }

    pub fn require_finite(&self) -> Result<()> {
        if self.status.is_finite() {
            Ok(())
        } else {
            Err(Error::NotFinite)
        }
    }

    /// Breadth-first closure by word length: each frontier element is
    /// multiplied by the generator set on the right, starting from the
    /// identity. Deterministic insertion order.
    fn run_closure(&mut self, cap: usize) {
        let id = match self.generators.first() {
            Some(g) => g.identity_like(),
            None => {
                self.status = ClosureStatus::Finite(self.elements.len());
                return;
            }
        };
        fn insert<T: Composable>(
            elements: &mut Vec<T>,
            index: &mut HashMap<T, u32>,
            t: T,
        ) -> Option<u32> {
            if index.contains_key(&t) {
                return None;
            }
            let i = elements.len() as u32;
            index.insert(t.clone(), i);
            elements.push(t);
            Some(i)
        }
        let mut elements = vec![];
        let mut index = HashMap::new();
        let mut frontier: Vec<u32> = vec![];
        frontier.extend(insert(&mut elements, &mut index, id));
        'bfs: while !frontier.is_empty() && elements.len() <= cap {
            let mut next = vec![];
            for &fi in &frontier {
                for g in &self.generators {
                    let prod = elements[fi as usize].compose(g);
                    next.extend(insert(&mut elements, &mut index, prod));
                    if elements.len() > cap {
                        break 'bfs;
                    }
                }
            }
            frontier = next;
        }
        let finite = elements.len() <= cap;
        self.elements = elements;
        self.index = index;
        self.status = if finite {
            ClosureStatus::Finite(self.elements.len())
        } else {
            ClosureStatus::CapExceeded(self.find_witness(cap))
        };
    }

    /// Scan the collected elements in insertion order for one whose first
    /// ceil(sqrt(cap)) powers are pairwise distinct.
    fn find_witness(&self, cap: usize) -> Option<InfinitenessWitness<T>> {
        let k = ((cap as f64).sqrt().ceil() as usize).max(4);
        'outer: for e in &self.elements {
            let mut seen = std::collections::HashSet::new();
            let mut powers = vec![];
            let mut cur = e.clone();
            for _ in 0..k {
                if !seen.insert(cur.clone()) {
                    continue 'outer;
                }
                powers.push(cur.clone());
                cur = cur.compose(e);
            }
            return Some(InfinitenessWitness {
                element: e.clone(),
                powers,
            });
        }
        None
    }

    /// The full multiplication table over element indices; built lazily and
    /// certifying product closure as a side effect.
    pub fn cayley_table(&self) -> Result<&[u32]> {
        self.require_finite()?;
        let n = self.elements.len();
        let table = self.table.get_or_init(|| {
            let mut t = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    let prod = self.elements[i].compose(&self.elements[j]);
                    match self.index.get(&prod) {
                        Some(&k) => t[i * n + j] = k,
                        None => return vec![],
                    }
                }
            }
            t
        });
        if n > 0 && table.is_empty() {
            return Err(Error::Inconsistency(
                "element set is not closed under products".into(),
            ));
        }
        Ok(table)
    }

    /// Element indices reachable from the identity by right-multiplication
    /// with the given element indices.
    fn span_indices(&self, gens: &[usize]) -> Result<Vec<bool>> {
        let table = self.cayley_table()?;
        let n = self.elements.len();
        let id = self
            .element_index(&self.elements[0].identity_like())
            .ok_or_else(|| Error::Inconsistency("identity missing".into()))?;
        let mut seen = vec![false; n];
        let mut stack = vec![id];
        seen[id] = true;
        while let Some(u) = stack.pop() {
            for &g in gens {
                let v = table[u * n + g] as usize;
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        Ok(seen)
    }

    /// Does the subset P of elements generate the whole monoid?
    pub fn generates(&self, subset: &[T]) -> Result<bool> {
        let gens: Vec<usize> = subset
            .iter()
            .map(|t| self.element_index(t).ok_or(Error::NotAnElement))
            .collect::<Result<_>>()?;
        let seen = self.span_indices(&gens)?;
        Ok(seen.iter().all(|&b| b))
    }

    /// Generating, and no proper subset generates.
    pub fn is_minimal_generating(&self, subset: &[T]) -> Result<bool> {
        if !self.generates(subset)? {
            return Ok(false);
        }
        for drop in 0..subset.len() {
            let rest: Vec<T> = subset
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, t)| t.clone())
                .collect();
            if self.generates(&rest)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exhaustive product-closure verification (parallel read-only scan).
    pub fn verify_product_closure(&self) -> Result<bool> {
        use rayon::prelude::*;
        self.require_finite()?;
        let ok = (0..self.elements.len()).into_par_iter().all(|i| {
            self.elements
                .iter()
                .all(|b| self.contains(&self.elements[i].compose(b)))
        });
        Ok(ok)
    }
}

fn check_gens_matrix(gens: &[Matrix]) -> Result<(FieldSpec, usize)> {
    let first = gens
        .first()
        .ok_or_else(|| Error::InvalidParams("no generators".into()))?;
    for g in gens {
        if g.field != first.field {
            return Err(Error::FieldMismatch);
        }
        if g.dim != first.dim {
            return Err(Error::DimMismatch);
        }
    }
    Ok((first.field, first.dim))
}

/// Close a linear monoid from matrix generators under the given cap.
pub fn close(gens: &[Matrix], cap: usize) -> Result<MonoidHandle> {
    let (field, dim) = check_gens_matrix(gens)?;
    let mut m = GenericMonoid::new_unclosed(field, dim, gens.to_vec());
    m.run_closure(cap);
    Ok(m)
}

/// Close an affine monoid from affine generators under the given cap.
pub fn close_affine(gens: &[AffineMap], cap: usize) -> Result<AffineMonoidHandle> {
    let first = gens
        .first()
        .ok_or_else(|| Error::InvalidParams("no generators".into()))?;
    let (field, dim) = (first.field(), first.dim());
    for g in gens {
        if g.field() != field {
            return Err(Error::FieldMismatch);
        }
        if g.dim() != dim {
            return Err(Error::DimMismatch);
        }
    }
    let mut m = GenericMonoid::new_unclosed(field, dim, gens.to_vec());
    m.run_closure(cap);
    Ok(m)
}

impl MonoidHandle {
    /// Projections among the elements.
    pub fn projections(&self) -> Vec<Matrix> {
        self.elements()
            .iter()
            .filter(|m| is_projection(m))
            .cloned()
            .collect()
    }

    /// Invertible elements.
    pub fn units(&self) -> Vec<Matrix> {
        self.elements()
            .iter()
            .filter(|m| m.is_invertible())
            .cloned()
            .collect()
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.field, self.dim)
    }
}

/// The dual monoid: generators replaced by their transposes. For a finite
/// monoid the element set of the dual is exactly the set of transposes, since
/// transposition is an anti-isomorphism.
pub fn dual(m: &MonoidHandle) -> Result<MonoidHandle> {
    m.require_finite()?;
    let gens: Vec<Matrix> = m.generators.iter().map(|g| g.transpose()).collect();
    let elements: Vec<Matrix> = m.elements().iter().map(|e| e.transpose()).collect();
    Ok(GenericMonoid::from_closed_elements(
        m.field, m.dim, gens, elements,
    ))
}

/// The units/projection-part split of a finite semireflection monoid:
/// M1 = invertible elements, M0 = closure of the projections in M.
/// Verifies that M0 and M1 intersect trivially, that M0 M1 = M, and that M1
/// normalises M0.
pub fn units_and_projection_part(m: &MonoidHandle) -> Result<(Vec<Matrix>, MonoidHandle)> {
    m.require_finite()?;
    let units = m.units();
    let projections = m.projections();
    let m0 = if projections.is_empty() {
        GenericMonoid::from_closed_elements(m.field, m.dim, vec![], vec![m.identity()])
    } else {
        close(&projections, m.size())?
    };
    m0.require_finite()?;
    for u in &units {
        if m0.contains(u) && !u.is_identity() {
            return Err(Error::Inconsistency(
                "projection part contains a non-trivial unit".into(),
            ));
        }
    }
    let mut seen = std::collections::HashSet::new();
    for a in m0.elements() {
        for b in &units {
            let ab = a.mul(b);
            if !m.contains(&ab) {
                return Err(Error::Inconsistency("M0 M1 leaves M".into()));
            }
            seen.insert(ab);
        }
    }
    if seen.len() != m.size() {
        return Err(Error::Inconsistency(format!(
            "M0 M1 has {} elements, M has {}",
            seen.len(),
            m.size()
        )));
    }
    for u in &units {
        let ui = u.inverse()?;
        for p in m0.elements() {
            if !m0.contains(&u.mul(p).mul(&ui)) {
                return Err(Error::Inconsistency("M1 does not normalise M0".into()));
            }
        }
    }
    Ok((units, m0))
}

/// Kernel lines of a finite monoid, in sorted canonical order.
pub fn kernels(m: &MonoidHandle) -> Result<Vec<Subspace>> {
    m.require_finite()?;
    let mut out: Vec<Subspace> = vec![];
    for p in m.projections() {
        let k = crate::linalg::kernel_line(&p)?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out.sort();
    Ok(out)
}

/// Image hyperplanes of a finite monoid, in sorted canonical order.
pub fn images(m: &MonoidHandle) -> Result<Vec<Subspace>> {
    m.require_finite()?;
    let mut out: Vec<Subspace> = vec![];
    for p in m.projections() {
        let l = crate::linalg::image_space(&p);
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out.sort();
    Ok(out)
}

/// Counting fingerprint preserved by equivalence:
/// (size, #kernels, #images, #(kernels that are images)).
pub fn fingerprint(m: &MonoidHandle) -> Result<(usize, usize, usize, usize)> {
    let ker = kernels(m)?;
    let im = images(m)?;
    let inter = ker.iter().filter(|k| im.contains(k)).count();
    Ok((m.size(), ker.len(), im.len(), inter))
}

/// Search for an invertible f with f M f^-1 = N. Returns a witness, or None
/// when the (complete) frame search exhausts without a hit.
pub fn equivalent(m: &MonoidHandle, n: &MonoidHandle) -> Result<Option<Matrix>> {
    m.require_finite()?;
    n.require_finite()?;
    if m.field != n.field {
        return Err(Error::FieldMismatch);
    }
    if m.dim != n.dim {
        return Err(Error::DimMismatch);
    }
    if m.dim > 3 {
        return Err(Error::OutOfRange(
            "equivalence search supports dimensions up to 3".into(),
        ));
    }
    if fingerprint(m)? != fingerprint(n)? {
        return Ok(None);
    }
    let found = frames::conjugator_search(m, n, SearchMode::Equivalence, false)?;
    Ok(found.into_iter().next())
}

/// Search for an invertible f with f M f^-1 contained in N.
pub fn embeds(m: &MonoidHandle, n: &MonoidHandle) -> Result<Option<Matrix>> {
    m.require_finite()?;
    n.require_finite()?;
    let found = frames::conjugator_search(m, n, SearchMode::Embedding, false)?;
    Ok(found.into_iter().next())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::prj;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn simple_projection() -> Matrix {
        Matrix::from_int_rows(Q, &[&[1, -1], &[0, 0]])
    }

    #[test]
    fn single_projection_closes_to_two() {
        let m = close(&[simple_projection()], 10).unwrap();
        assert!(matches!(m.status, ClosureStatus::Finite(2)));
        assert!(m.contains(&Matrix::identity(Q, 2)));
        assert!(m.contains(&simple_projection()));
    }

    #[test]
    fn closure_is_idempotent() {
        let gens = vec![
            simple_projection(),
            Matrix::from_int_rows(Q, &[&[0, 0], &[-1, 1]]),
        ];
        let m = close(&gens, 1000).unwrap();
        let again = close(m.elements(), 1000).unwrap();
        assert_eq!(m.size(), again.size());
        for e in m.elements() {
            assert!(again.contains(e));
        }
        assert!(m.verify_product_closure().unwrap());
    }

    #[test]
    fn infinite_closure_is_detected_with_witness() {
        // Three projections whose triple product has all powers distinct.
        let p1 = Matrix::from_int_rows(Q, &[&[0, 0, 0], &[0, 1, 0], &[1, 0, 1]]);
        let p2 = Matrix::from_int_rows(Q, &[&[1, 1, 0], &[0, 0, 0], &[0, 0, 1]]);
        let p3 = Matrix::from_int_rows(Q, &[&[1, 0, -1], &[0, 1, -1], &[0, 0, 0]]);
        assert!(is_projection(&p1) && is_projection(&p2) && is_projection(&p3));
        let m = close(&[p1.clone(), p2, p3], 500).unwrap();
        let ClosureStatus::CapExceeded(Some(w)) = &m.status else {
            panic!("expected cap exceeded with witness");
        };
        let distinct: std::collections::HashSet<_> = w.powers.iter().collect();
        assert_eq!(distinct.len(), w.powers.len());
        // The product written out in the analysis is in the closure and
        // certifies infiniteness directly.
        let target = Matrix::from_int_rows(Q, &[&[0, 0, 0], &[0, 0, 0], &[1, 1, -2]]);
        assert!(m.contains(&target));
        let mut powers = std::collections::HashSet::new();
        let mut cur = target.clone();
        for _ in 0..25 {
            assert!(powers.insert(cur.clone()));
            cur = cur.mul(&target);
        }
    }

    #[test]
    fn mixed_fields_or_dims_error() {
        let a = simple_projection();
        let b = Matrix::from_int_rows(FieldSpec::PrimeField(2), &[&[1, 1], &[0, 0]]);
        assert!(matches!(
            close(&[a.clone(), b], 10),
            Err(Error::FieldMismatch)
        ));
        let c = Matrix::from_int_rows(Q, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(matches!(close(&[a, c], 10), Err(Error::DimMismatch)));
    }

    #[test]
    fn dual_is_involutive_and_antiisomorphic() {
        let gens = vec![
            simple_projection(),
            Matrix::from_int_rows(Q, &[&[0, 0], &[-1, 1]]),
            Matrix::from_int_rows(Q, &[&[1, 0], &[0, 0]]),
        ];
        let m = close(&gens, 1000).unwrap();
        let d = dual(&m).unwrap();
        assert_eq!(m.size(), d.size());
        let dd = dual(&d).unwrap();
        for e in m.elements() {
            assert!(dd.contains(e));
        }
        for a in m.elements().iter().take(5) {
            for b in m.elements().iter().take(5) {
                assert_eq!(a.mul(b).transpose(), b.transpose().mul(&a.transpose()));
            }
        }
        // Kernels of the dual are annihilators of the images.
        let ker_d = kernels(&d).unwrap();
        let im_m = images(&m).unwrap();
        let ann: Vec<Subspace> = im_m.iter().map(|l| l.annihilator()).collect();
        for k in &ker_d {
            assert!(ann.contains(k));
        }
    }

    #[test]
    fn generates_and_minimality_by_table() {
        let e1 = Subspace::line_from_ints(Q, &[1, 0]);
        let e2 = Subspace::line_from_ints(Q, &[0, 1]);
        let diag = Subspace::line_from_ints(Q, &[1, 1]);
        let p = prj(&diag, &e1).unwrap();
        let q = prj(&e2, &e1).unwrap();
        let r = prj(&e1, &e2).unwrap();
        let m = close(&[p.clone(), q.clone(), r.clone()], 1000).unwrap();
        assert!(m.generates(&[p.clone(), q.clone(), r.clone()]).unwrap());
        let direct = close(&[p.clone(), q.clone()], 1000).unwrap();
        assert_eq!(
            m.generates(&[p.clone(), q.clone()]).unwrap(),
            direct.size() == m.size()
        );
        assert_eq!(m.generates(&[]).unwrap(), m.size() == 1);
        assert!(m
            .generates(&[Matrix::from_int_rows(Q, &[&[7, 0], &[0, 7]])])
            .is_err());
    }

    #[test]
    fn units_split_on_projection_monoid() {
        let gens = vec![
            simple_projection(),
            Matrix::from_int_rows(Q, &[&[0, 0], &[-1, 1]]),
        ];
        let m = close(&gens, 1000).unwrap();
        let (units, m0) = units_and_projection_part(&m).unwrap();
        assert_eq!(units.len(), 1);
        assert_eq!(m0.size(), m.size());
    }

    #[test]
    fn equivalent_of_self_gives_a_witness() {
        let gens = vec![
            simple_projection(),
            Matrix::from_int_rows(Q, &[&[0, 0], &[-1, 1]]),
        ];
        let m = close(&gens, 1000).unwrap();
        let w = equivalent(&m, &m).unwrap().expect("self-equivalence");
        let wi = w.inverse().unwrap();
        for g in &m.generators {
            assert!(m.contains(&w.mul(g).mul(&wi)));
        }
    }
}
