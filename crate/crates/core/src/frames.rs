//! Conjugator search by projective line constraints.
//!
//! A candidate f is pinned (up to scalar) by assigning kernel lines of M to
//! kernel lines of N and image hyperplanes of M to image hyperplanes of N.
//! Each assignment contributes linear equations on the entries of f: for a
//! kernel pair (v, v') the vector f v must be proportional to v', and for an
//! image pair with annihilator normals (u, u') the vector f^T u' must be
//! proportional to u. Assignments are explored by backtracking until the
//! solution space is one-dimensional; remaining lines and the generator
//! conjugations are then verified directly.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fields::{make_field, Scalar};
use crate::linalg::{nullspace_of_rows, Matrix, Subspace};
use crate::monoid::MonoidHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// f M f^-1 = N: line assignments are injective and sizes must agree.
    Equivalence,
    /// f M f^-1 inside N: line assignments map into the target sets.
    Embedding,
}

/// Hard limit on backtracking nodes.
const NODE_CAP: usize = 1_000_000;

struct Ctx<'a> {
    m: &'a MonoidHandle,
    n: &'a MonoidHandle,
    collect_all: bool,
    dim: usize,
    /// Constraint items for M: (vector, is_plane).
    items: Vec<(Vec<Scalar>, bool)>,
    point_targets: Vec<Vec<Scalar>>,
    plane_targets: Vec<Vec<Scalar>>,
    m_kernels: Vec<Subspace>,
    m_images: Vec<Subspace>,
    n_kernel_set: HashSet<Subspace>,
    n_image_set: HashSet<Subspace>,
    found: Vec<Matrix>,
    seen_normalized: HashSet<Matrix>,
    nodes: usize,
    /// Some branch could not be resolved to a one-dimensional solution space.
    saw_inconclusive: bool,
}

/// Equations forcing f v || v' (point pair), appended to `rows`.
fn point_equations(rows: &mut Vec<Vec<Scalar>>, dim: usize, v: &[Scalar], vp: &[Scalar]) {
    let field = v[0].field;
    for i in 0..dim {
        for j in i + 1..dim {
            if vp[i].is_zero() && vp[j].is_zero() {
                continue;
            }
            let mut row = vec![Scalar::zero(field); dim * dim];
            for k in 0..dim {
                if v[k].is_zero() {
                    continue;
                }
                row[i * dim + k] = v[k].mul(&vp[j]).unwrap();
                row[j * dim + k] = v[k].mul(&vp[i]).unwrap().neg();
            }
            rows.push(row);
        }
    }
}

/// Equations forcing f^T u' || u (plane pair), appended to `rows`.
fn plane_equations(rows: &mut Vec<Vec<Scalar>>, dim: usize, u: &[Scalar], up: &[Scalar]) {
    let field = u[0].field;
    for a in 0..dim {
        for b in a + 1..dim {
            if u[a].is_zero() && u[b].is_zero() {
                continue;
            }
            // w_j = sum_i x[i*dim+j] up[i]; equation w_a u_b - w_b u_a = 0.
            let mut row = vec![Scalar::zero(field); dim * dim];
            for i in 0..dim {
                if up[i].is_zero() {
                    continue;
                }
                row[i * dim + a] = up[i].mul(&u[b]).unwrap();
                row[i * dim + b] = up[i].mul(&u[a]).unwrap().neg();
            }
            rows.push(row);
        }
    }
}

fn reshape(dim: usize, v: &[Scalar]) -> Matrix {
    let field = v[0].field;
    let rows = (0..dim).map(|i| v[i * dim..(i + 1) * dim].to_vec()).collect();
    Matrix::from_rows(field, rows).unwrap()
}

impl<'a> Ctx<'a> {
    fn verify(&mut self, f: &Matrix) {
        if !f.is_invertible() {
            return;
        }
        let norm = f.projective_normalize();
        if self.seen_normalized.contains(&norm) {
            return;
        }
        for k in &self.m_kernels {
            if !self.n_kernel_set.contains(&k.map(f)) {
                return;
            }
        }
        for l in &self.m_images {
            if !self.n_image_set.contains(&l.map(f)) {
                return;
            }
        }
        let Ok(fi) = f.inverse() else { return };
        for g in &self.m.generators {
            if !self.n.contains(&f.mul(g).mul(&fi)) {
                return;
            }
        }
        self.seen_normalized.insert(norm.clone());
        self.found.push(norm);
    }

    fn done(&self) -> bool {
        !self.collect_all && !self.found.is_empty()
    }

    fn recurse(
        &mut self,
        item: usize,
        rows: &mut Vec<Vec<Scalar>>,
        used_points: &mut Vec<bool>,
        used_planes: &mut Vec<bool>,
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > NODE_CAP {
            return Err(Error::EquivalenceInconclusive);
        }
        if self.done() {
            return Ok(());
        }
        let field = self.m.field;
        let ns = nullspace_of_rows(field, self.dim * self.dim, rows);
        match ns.dim() {
            0 => return Ok(()),
            1 => {
                let f = reshape(self.dim, ns.line_vector());
                self.verify(&f);
                return Ok(());
            }
            _ => {}
        }
        if item == self.items.len() {
            // Underdetermined by the line constraints: a single remaining
            // degree of freedom is swept over the roots of unity; more than
            // one cannot be resolved and taints the search.
            if ns.dim() == 2 {
                let b0 = reshape(self.dim, &ns.basis()[0]);
                let b1 = reshape(self.dim, &ns.basis()[1]);
                self.verify(&b0);
                if self.done() {
                    return Ok(());
                }
                self.verify(&b1);
                for z in make_field(field)?.roots_of_unity() {
                    if self.done() {
                        return Ok(());
                    }
                    self.verify(&b0.add(&b1.scale(&z)));
                    self.verify(&b0.add(&b1.scale(&z.neg())));
                }
                return Ok(());
            }
            self.saw_inconclusive = true;
            return Ok(());
        }
        let (v, is_plane) = self.items[item].clone();
        let ntargets = if is_plane {
            self.plane_targets.len()
        } else {
            self.point_targets.len()
        };
        for ti in 0..ntargets {
            {
                // An invertible conjugator maps distinct lines to distinct
                // lines, so assignments are injective in both modes.
                let used = if is_plane { &mut *used_planes } else { &mut *used_points };
                if used[ti] {
                    continue;
                }
                used[ti] = true;
            }
            let mark = rows.len();
            if is_plane {
                let t = self.plane_targets[ti].clone();
                plane_equations(rows, self.dim, &v, &t);
            } else {
                let t = self.point_targets[ti].clone();
                point_equations(rows, self.dim, &v, &t);
            }
            self.recurse(item + 1, rows, used_points, used_planes)?;
            rows.truncate(mark);
            let used = if is_plane { &mut *used_planes } else { &mut *used_points };
            used[ti] = false;
            if self.done() {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Search for invertible conjugators carrying M into (or onto) N. Returns all
/// verified candidates up to scalar when `collect_all` is set, otherwise at
/// most one.
pub fn conjugator_search(
    m: &MonoidHandle,
    n: &MonoidHandle,
    mode: SearchMode,
    collect_all: bool,
) -> Result<Vec<Matrix>> {
    m.require_finite()?;
    n.require_finite()?;
    if m.field != n.field {
        return Err(Error::FieldMismatch);
    }
    if m.dim != n.dim {
        return Err(Error::DimMismatch);
    }
    if !collect_all && m.elements().iter().all(|e| n.contains(e)) {
        let id_ok = match mode {
            SearchMode::Equivalence => m.size() == n.size(),
            SearchMode::Embedding => true,
        };
        if id_ok {
            return Ok(vec![Matrix::identity(m.field, m.dim)]);
        }
    }
    let m_kernels = crate::monoid::kernels(m)?;
    let m_images = crate::monoid::images(m)?;
    let n_kernels = crate::monoid::kernels(n)?;
    let n_images = crate::monoid::images(n)?;
    match mode {
        SearchMode::Equivalence
            if m_kernels.len() != n_kernels.len() || m_images.len() != n_images.len() =>
        {
            return Ok(vec![]);
        }
        SearchMode::Embedding
            if m_kernels.len() > n_kernels.len() || m_images.len() > n_images.len() =>
        {
            return Ok(vec![]);
        }
        _ => {}
    }
    let mut items: Vec<(Vec<Scalar>, bool)> = vec![];
    for k in &m_kernels {
        items.push((k.line_vector().to_vec(), false));
    }
    for l in &m_images {
        items.push((l.annihilator().line_vector().to_vec(), true));
    }
    let point_targets: Vec<Vec<Scalar>> =
        n_kernels.iter().map(|k| k.line_vector().to_vec()).collect();
    let plane_targets: Vec<Vec<Scalar>> = n_images
        .iter()
        .map(|l| l.annihilator().line_vector().to_vec())
        .collect();
    let mut used_points = vec![false; point_targets.len()];
    let mut used_planes = vec![false; plane_targets.len()];
    let mut ctx = Ctx {
        m,
        n,
        collect_all,
        dim: m.dim,
        items,
        point_targets,
        plane_targets,
        m_kernels,
        m_images,
        n_kernel_set: n_kernels.into_iter().collect(),
        n_image_set: n_images.into_iter().collect(),
        found: vec![],
        seen_normalized: HashSet::new(),
        nodes: 0,
        saw_inconclusive: false,
    };
    let mut rows = vec![];
    ctx.recurse(0, &mut rows, &mut used_points, &mut used_planes)?;
    if ctx.saw_inconclusive && (collect_all || ctx.found.is_empty()) {
        // A negative (or supposedly exhaustive) result is only valid when
        // every branch resolved.
        return Err(Error::EquivalenceInconclusive);
    }
    ctx.found.sort();
    Ok(ctx.found)
}
