//! Recognition and classification of point sets as quadrics and cones.
//!
//! Classification works by explicit vertex computation plus point counts
//! against the closed-form counts of the quadric types over GF(q). Counting
//! is insensitive to characteristic 2, which form diagonalization is not.

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::geom::{self, Pt, Subspace};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadricKind {
    Hyperbolic,
    Parabolic,
    Elliptic,
    ConeOverHyperbolic,
    DegenerateOther,
}

/// Classification record per the cone/tube grammar: vertex dimension V,
/// base rank R, spanned dimension, point count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadricShape {
    pub ambient_dim: i64,
    pub vertex_dim: i64,
    pub base_rank: i64,
    pub kind: QuadricKind,
    pub point_count: usize,
}

/// Points of P^V(GF(q)).
pub fn proj_space_count(q: usize, v: i64) -> usize {
    if v < 0 {
        0
    } else {
        (q.pow(v as u32 + 1) - 1) / (q - 1)
    }
}

/// Hyperbolic quadric of rank R+1 in P^{2R+1}(GF(q)).
pub fn hyperbolic_count(q: usize, r: i64) -> usize {
    let r = r as u32;
    (q.pow(r) + 1) * ((q.pow(r + 1) - 1) / (q - 1))
}

/// Parabolic quadric in P^{2R}(GF(q)).
pub fn parabolic_count(q: usize, r: i64) -> usize {
    (q.pow(2 * r as u32) - 1) / (q - 1)
}

/// Elliptic quadric in P^{2R+1}(GF(q)), Witt index R.
pub fn elliptic_count(q: usize, r: i64) -> usize {
    (q.pow(r as u32) - 1) * (q.pow(r as u32 + 1) + 1) / (q - 1)
}

/// Cone point count: vertex P^V plus base lifted by q^{V+1}.
pub fn cone_count(q: usize, base: usize, v: i64) -> usize {
    proj_space_count(q, v) + base * q.pow((v + 1) as u32)
}

/// Classifies a spanning point set inside its subspace. The vertex is the
/// set of points collinear inside the set with every point of the set.
pub fn classify_shape(f: &Field, span: &Subspace, pts: &[Pt]) -> Result<QuadricShape> {
    classify_shape_full(f, span, pts).map(|(s, _)| s)
}

/// As `classify_shape`, also returning the vertex point set.
pub fn classify_shape_full(
    f: &Field,
    span: &Subspace,
    pts: &[Pt],
) -> Result<(QuadricShape, Vec<Pt>)> {
    let q = f.q() as usize;
    let n = span.ambient();
    let sorted: Vec<Pt> = {
        let mut v = pts.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let member = |p: Pt| sorted.binary_search(&p).is_ok();
    let mut vertex_pts: Vec<Pt> = Vec::new();
    let mut pa = [0; geom::MAX_COORDS];
    let mut pb = [0; geom::MAX_COORDS];
    for &p in &sorted {
        geom::unpack(p, n, &mut pa);
        let mut ok = true;
        'scan: for &r in &sorted {
            if r == p {
                continue;
            }
            geom::unpack(r, n, &mut pb);
            for lam in 1..f.q() {
                let pt = geom::combine_canonical(f, n, &pa, &pb, lam)
                    .expect("distinct points");
                if !member(pt) {
                    ok = false;
                    break 'scan;
                }
            }
        }
        if ok {
            vertex_pts.push(p);
        }
    }
    let vspan = geom::span_of_points(f, n, &vertex_pts);
    if vspan.point_count(f) != vertex_pts.len() {
        return Err(Error::NotAQuadricLikeSet(
            "vertex is not a subspace".into(),
        ));
    }
    let v = vspan.dim();
    let lift = q.pow((v + 1) as u32);
    let rest = sorted.len() - vertex_pts.len();
    if rest % lift != 0 {
        return Err(Error::NotAQuadricLikeSet(format!(
            "count {} does not fiber over a vertex of dimension {v}",
            sorted.len()
        )));
    }
    let base = rest / lift;
    let spanned = geom::span_of_points(f, n, &sorted).dim();
    for r in 1..=6i64 {
        if base == hyperbolic_count(q, r) && spanned == 2 * r + v + 2 {
            let kind = if v < 0 {
                QuadricKind::Hyperbolic
            } else {
                QuadricKind::ConeOverHyperbolic
            };
            return Ok((
                QuadricShape {
                    ambient_dim: spanned,
                    vertex_dim: v,
                    base_rank: r,
                    kind,
                    point_count: sorted.len(),
                },
                vertex_pts,
            ));
        }
        if base == parabolic_count(q, r) && spanned == 2 * r + v + 1 {
            let kind = if v < 0 {
                QuadricKind::Parabolic
            } else {
                QuadricKind::DegenerateOther
            };
            return Ok((
                QuadricShape {
                    ambient_dim: spanned,
                    vertex_dim: v,
                    base_rank: r,
                    kind,
                    point_count: sorted.len(),
                },
                vertex_pts,
            ));
        }
        if base == elliptic_count(q, r) && spanned == 2 * r + v + 2 {
            let kind = if v < 0 {
                QuadricKind::Elliptic
            } else {
                QuadricKind::DegenerateOther
            };
            return Ok((
                QuadricShape {
                    ambient_dim: spanned,
                    vertex_dim: v,
                    base_rank: r,
                    kind,
                    point_count: sorted.len(),
                },
                vertex_pts,
            ));
        }
    }
    Err(Error::NotAQuadricLikeSet(format!(
        "no quadric type matches {} points over a dim-{v} vertex",
        sorted.len()
    )))
}

/// Internal coordinates of a point with respect to an echelon basis.
/// The基 rows are reduced, so coefficients are read off the pivots.
fn internal_coords(f: &Field, s: &Subspace, p: Pt) -> Option<Vec<Fe>> {
    let n = s.ambient();
    let v = geom::unpack_vec(p, n);
    let coords: Vec<Fe> = s.pivots().iter().map(|&pc| v[pc]).collect();
    // verify the combination reproduces v
    let mut acc = vec![0; n];
    for (c, row) in coords.iter().zip(s.rows()) {
        if *c != 0 {
            for j in 0..n {
                acc[j] = f.add(acc[j], f.mul(*c, row[j]));
            }
        }
    }
    if acc == v {
        Some(coords)
    } else {
        None
    }
}

fn eval_form(f: &Field, coeffs: &[Fe], x: &[Fe]) -> Fe {
    let k = x.len();
    let mut idx = 0;
    let mut acc = 0;
    for i in 0..k {
        for j in i..k {
            if coeffs[idx] != 0 {
                acc = f.add(acc, f.mul(coeffs[idx], f.mul(x[i], x[j])));
            }
            idx += 1;
        }
    }
    acc
}

/// Finds coefficients of one quadratic form on S whose zero set inside S is
/// exactly `pts`, or None. Coefficients are indexed by monomials x_i x_j,
/// i <= j, in internal coordinates of S, scaled so the first nonzero
/// coefficient is 1.
pub fn fit_quadric(f: &Field, s: &Subspace, pts: &[Pt]) -> Result<Option<Vec<Fe>>> {
    let k = s.rank();
    let m = k * (k + 1) / 2;
    let mut internal: Vec<Vec<Fe>> = Vec::with_capacity(pts.len());
    for &p in pts {
        let Some(c) = internal_coords(f, s, p) else {
            return Err(Error::AmbientMismatch(s.ambient(), s.ambient()));
        };
        internal.push(c);
    }
    // vanishing system: rows are monomial vectors of the points
    let mut rows: Vec<Vec<Fe>> = Vec::with_capacity(internal.len());
    for c in &internal {
        let mut row = Vec::with_capacity(m);
        for i in 0..k {
            for j in i..k {
                row.push(f.mul(c[i], c[j]));
            }
        }
        rows.push(row);
    }
    // kernel of the system via column reduction of [rows]
    let kernel = kernel_basis(f, &rows, m);
    if kernel.is_empty() {
        return Ok(None);
    }
    let all = s.points(f, 2_000_000)?;
    let pset: std::collections::BTreeSet<Pt> = pts.iter().copied().collect();
    for cand in kernel {
        let mut zeros = 0usize;
        let mut exact = true;
        for &p in &all {
            let c = internal_coords(f, s, p).expect("points of s");
            let v = eval_form(f, &cand, &c);
            if v == 0 {
                zeros += 1;
                if !pset.contains(&p) {
                    exact = false;
                    break;
                }
            }
        }
        if exact && zeros == pset.len() {
            let mut out = cand.clone();
            let lead = out.iter().find(|&&c| c != 0).copied().unwrap();
            if lead != 1 {
                let inv = f.inv_unchecked(lead);
                for c in out.iter_mut() {
                    *c = f.mul(*c, inv);
                }
            }
            return Ok(Some(out));
        }
    }
    Ok(None)
}

/// Basis of { x : rows * x = 0 }, canonical order (free variables in
/// increasing column order).
fn kernel_basis(f: &Field, rows: &[Vec<Fe>], m: usize) -> Vec<Vec<Fe>> {
    let mut mat: Vec<Vec<Fe>> = rows.to_vec();
    let n = mat.len();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rrow = 0usize;
    for col in 0..m {
        let Some(pr) = (rrow..n).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(rrow, pr);
        let inv = f.inv_unchecked(mat[rrow][col]);
        for v in mat[rrow].iter_mut() {
            *v = f.mul(*v, inv);
        }
        let pivot = mat[rrow].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != rrow && row[col] != 0 {
                let c = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot) {
                    *v = f.sub(*v, f.mul(c, pv));
                }
            }
        }
        pivot_col_of_row.push(col);
        pivot_cols.push(col);
        rrow += 1;
        if rrow == n {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..m {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![0; m];
        v[free] = 1;
        for (ri, &pc) in pivot_col_of_row.iter().enumerate() {
            v[pc] = f.neg(mat[ri][free]);
        }
        basis.push(v);
    }
    basis
}

/// Builds the point set of a standard (R,V)-cone for tests and oracles:
/// hyperbolic base x0 x1 + x2 x3 + ... = 0 in the first 2R+2 coordinates,
/// vertex spanning the last V+1 coordinates.
pub fn standard_cone_points(f: &Field, r: i64, v: i64) -> Vec<Pt> {
    let q = f.q();
    let bdim = (2 * r + 2) as usize;
    let n = bdim + (v + 1) as usize;
    let mut out: Vec<Pt> = Vec::new();
    // vertex points
    let mut buf = vec![0; n];
    if v >= 0 {
        let vdim = (v + 1) as usize;
        let count = (q as usize).pow(vdim as u32);
        for idx in 1..count {
            buf.iter_mut().for_each(|c| *c = 0);
            let mut t = idx;
            for i in 0..vdim {
                buf[bdim + i] = (t % q as usize) as Fe;
                t /= q as usize;
            }
            let mut c = buf.clone();
            if let Some(p) = geom::canonical_pt(f, &mut c) {
                out.push(p);
            }
        }
    }
    // base points lifted by every vertex offset
    let base_count = (q as usize).pow(bdim as u32);
    for idx in 1..base_count {
        let mut t = idx;
        let mut x = vec![0; bdim];
        for c in x.iter_mut() {
            *c = (t % q as usize) as Fe;
            t /= q as usize;
        }
        let mut val = 0;
        for i in 0..=r as usize {
            val = f.add(val, f.mul(x[2 * i], x[2 * i + 1]));
        }
        if val != 0 {
            continue;
        }
        let vdim = (v + 1).max(0) as usize;
        let offs = (q as usize).pow(vdim as u32);
        for o in 0..offs {
            buf.iter_mut().for_each(|c| *c = 0);
            buf[..bdim].copy_from_slice(&x);
            let mut t = o;
            for i in 0..vdim {
                buf[bdim + i] = (t % q as usize) as Fe;
                t /= q as usize;
            }
            let mut c = buf.clone();
            if let Some(p) = geom::canonical_pt(f, &mut c) {
                out.push(p);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf_make;
    use crate::geom::{pack, span_of_points};

    #[test]
    fn grid_in_p3_is_rank_one_hyperbolic() {
        let f = gf_make(3).unwrap();
        let pts = standard_cone_points(&f, 1, -1);
        assert_eq!(pts.len(), 16);
        let span = span_of_points(&f, 4, &pts);
        let shape = classify_shape(&f, &span, &pts).unwrap();
        assert_eq!(shape.base_rank, 1);
        assert_eq!(shape.vertex_dim, -1);
        assert_eq!(shape.kind, QuadricKind::Hyperbolic);
    }

    #[test]
    fn klein_point_count_classifies() {
        let f = gf_make(3).unwrap();
        let pts = standard_cone_points(&f, 2, -1);
        assert_eq!(pts.len(), 130);
        let span = span_of_points(&f, 6, &pts);
        let shape = classify_shape(&f, &span, &pts).unwrap();
        assert_eq!((shape.base_rank, shape.vertex_dim), (2, -1));
    }

    #[test]
    fn cone_with_line_vertex_over_grid() {
        let f = gf_make(3).unwrap();
        let pts = standard_cone_points(&f, 1, 1);
        assert_eq!(pts.len(), 4 + 16 * 9);
        let span = span_of_points(&f, 6, &pts);
        let shape = classify_shape(&f, &span, &pts).unwrap();
        assert_eq!((shape.base_rank, shape.vertex_dim), (1, 1));
        assert_eq!(shape.kind, QuadricKind::ConeOverHyperbolic);
    }

    #[test]
    fn cone_classification_grid_sweep() {
        for q in [3u32, 4] {
            let f = gf_make(q).unwrap();
            for r in [1i64, 2, 4] {
                for v in [-1i64, 0, 1] {
                    if r == 4 && q == 4 && v == 1 {
                        // largest case is exercised at q=3 already; keep the
                        // sweep within unit-test time
                        continue;
                    }
                    let pts = standard_cone_points(&f, r, v);
                    let expect =
                        cone_count(q as usize, hyperbolic_count(q as usize, r), v);
                    assert_eq!(pts.len(), expect, "count r={r} v={v} q={q}");
                    let n = (2 * r + 2 + v + 1) as usize;
                    let span = span_of_points(&f, n, &pts);
                    let shape = classify_shape(&f, &span, &pts).unwrap();
                    assert_eq!((shape.base_rank, shape.vertex_dim), (r, v));
                    // Def 3.1 contract: spanned dim and vertex collinearity
                    assert_eq!(shape.ambient_dim, 2 * r + v + 2);
                }
            }
        }
    }

    #[test]
    fn fit_quadric_recovers_grid_form() {
        let f = gf_make(3).unwrap();
        let pts = standard_cone_points(&f, 1, -1);
        let span = span_of_points(&f, 4, &pts);
        let form = fit_quadric(&f, &span, &pts).unwrap().unwrap();
        // zero set equality was verified inside; check it vanishes on inputs
        for &p in &pts {
            let c = super::internal_coords(&f, &span, p).unwrap();
            assert_eq!(super::eval_form(&f, &form, &c), 0);
        }
    }

    #[test]
    fn fit_quadric_rejects_non_quadric_sets() {
        let f = gf_make(3).unwrap();
        // three general points of P^2 plus a fourth chosen so that no conic
        // vanishes on exactly these four points
        let pts = vec![
            pack(&[1, 0, 0]),
            pack(&[0, 1, 0]),
            pack(&[0, 0, 1]),
            pack(&[1, 1, 1]),
        ];
        let span = span_of_points(&f, 3, &pts);
        assert_eq!(fit_quadric(&f, &span, &pts).unwrap(), None);
    }

    #[test]
    fn fit_quadric_on_full_line_fails_uniqueness() {
        let f = gf_make(3).unwrap();
        let line = span_of_points(&f, 2, &[pack(&[1, 0]), pack(&[0, 1])]);
        let pts = line.points(&f, 100).unwrap();
        // a quadratic form on a line has at most 2 zeros or vanishes
        // identically, so no form cuts out all 4 points exactly
        assert_eq!(fit_quadric(&f, &line, &pts).unwrap(), None);
    }
}
