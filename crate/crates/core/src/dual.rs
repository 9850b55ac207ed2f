//! Independent constructions: Segre varieties, line Grassmannians, and the
//! three dual constructions built from a base variety, a complementary
//! subspace Y and a coordinate duality into Y.
//!
//! These provide the second route onto the same varieties that the
//! algebraic Veronese construction produces, so their fingerprints can be
//! compared model against model. All dualities are fixed to the
//! standard-basis correspondence, which makes every build reproducible.

use crate::check;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::geom::{self, PointSet, Pt, Subspace};
use crate::model::{self, DualityRecord, Params, Provenance, VarietyModel};
use crate::symps;

/// Canonical points of P^n(F) as coordinate vectors, lexicographic order.
fn projective_points(f: &Field, n_coords: usize) -> Vec<Vec<Fe>> {
    let q = f.q() as usize;
    let mut out = Vec::new();
    for lead in 0..n_coords {
        let free = n_coords - lead - 1;
        for mut idx in 0..q.pow(free as u32) {
            let mut v = vec![0; n_coords];
            v[lead] = 1;
            for slot in lead + 1..n_coords {
                v[slot] = (idx % q) as Fe;
                idx /= q;
            }
            out.push(v);
        }
    }
    out
}

/// All vectors of the kernel of the functional x . w = 0 on K^n.
fn functional_kernel_vectors(f: &Field, x: &[Fe]) -> Vec<Vec<Fe>> {
    let n = x.len();
    let q = f.q() as usize;
    let pivot = x.iter().position(|&c| c != 0).expect("nonzero functional");
    let inv = f.inv_unchecked(x[pivot]);
    let free: Vec<usize> = (0..n).filter(|&i| i != pivot).collect();
    let mut out = Vec::with_capacity(q.pow(free.len() as u32));
    for mut idx in 0..q.pow(free.len() as u32) {
        let mut w = vec![0; n];
        let mut acc = 0;
        for &i in &free {
            w[i] = (idx % q) as Fe;
            idx /= q;
            acc = f.add(acc, f.mul(x[i], w[i]));
        }
        w[pivot] = f.neg(f.mul(acc, inv));
        out.push(w);
    }
    out
}

fn segre_coords(f: &Field, x: &[Fe], y: &[Fe]) -> Vec<Fe> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for &xi in x {
        for &yj in y {
            out.push(f.mul(xi, yj));
        }
    }
    out
}

fn mono_model(
    f: &Field,
    ambient: usize,
    pts: Vec<Pt>,
    route: String,
    dualities: Vec<DualityRecord>,
) -> Result<VarietyModel> {
    let x = PointSet::from_vec(pts);
    let y = Subspace::empty(ambient);
    let f_cols: Vec<usize> = (0..ambient).collect();
    let mut f_space = Subspace::empty(ambient);
    for c in f_cols {
        let mut v = vec![0; ambient];
        v[c] = 1;
        f_space.insert(f, &v);
    }
    let skeleton = model::assemble(
        f.clone(),
        ambient,
        x,
        PointSet::from_vec(Vec::new()),
        y,
        f_space,
        Vec::new(),
        Vec::new(),
        Params::Mono { r: 1, v: -1 },
        Provenance {
            route,
            dualities,
            ..Default::default()
        },
    );
    let ex = symps::extract(&skeleton)?;
    let params = check::parameters_from_shapes(&ex.xi, &ex.theta)?;
    let mut m = skeleton;
    m.xi = ex.xi;
    m.theta = ex.theta;
    m.params = params;
    check::verify_layout(&m)?;
    Ok(m)
}

/// The Segre variety S_{l,k}(F) as a mono-symplectic model.
pub fn segre(l: usize, k: usize, f: &Field) -> Result<VarietyModel> {
    if !(1..=3).contains(&l) || !(1..=3).contains(&k) {
        return Err(Error::ConfigError("segre supports 1 <= l, k <= 3".into()));
    }
    let ambient = (l + 1) * (k + 1);
    let xs = projective_points(f, l + 1);
    let ys = projective_points(f, k + 1);
    let mut pts = Vec::with_capacity(xs.len() * ys.len());
    for x in &xs {
        for y in &ys {
            pts.push(geom::pack(&segre_coords(f, x, y)));
        }
    }
    let expected = pts.len();
    let m = mono_model(f, ambient, pts, format!("segre:{l},{k}"), Vec::new())?;
    if m.x.len() != expected {
        return Err(Error::ShapeViolation(
            "the Segre map must be injective on the point pairs".into(),
        ));
    }
    Ok(m)
}

/// The two families of maximal singular subspaces of a Segre model:
/// sigma(x, P^k) on one side, sigma(P^l, y) on the other.
pub fn segre_families(l: usize, k: usize, f: &Field) -> (Vec<Subspace>, Vec<Subspace>) {
    let ambient = (l + 1) * (k + 1);
    let xs = projective_points(f, l + 1);
    let ys = projective_points(f, k + 1);
    let mut fam_a = Vec::new();
    for x in &xs {
        let mut s = Subspace::empty(ambient);
        for j in 0..=k {
            let mut y = vec![0; k + 1];
            y[j] = 1;
            s.insert(f, &segre_coords(f, x, &y));
        }
        fam_a.push(s);
    }
    let mut fam_b = Vec::new();
    for y in &ys {
        let mut s = Subspace::empty(ambient);
        for i in 0..=l {
            let mut x = vec![0; l + 1];
            x[i] = 1;
            s.insert(f, &segre_coords(f, &x, y));
        }
        fam_b.push(s);
    }
    (fam_a, fam_b)
}

/// Canonical two-row bases of all lines of P^n(F).
fn lines_of_projective_space(f: &Field, n_coords: usize) -> Vec<(Vec<Fe>, Vec<Fe>)> {
    let pts = projective_points(f, n_coords);
    let packed: Vec<Pt> = pts.iter().map(|v| geom::pack(v)).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate().skip(i + 1) {
            let line = geom::span_of_points(f, n_coords, &[packed[i], packed[j]]);
            if line.rank() != 2 {
                continue;
            }
            let key: Vec<Pt> = line.rows().iter().map(|r| geom::pack(r)).collect();
            if seen.insert(key) {
                let rows = line.rows();
                out.push((rows[0].clone(), rows[1].clone()));
            }
            let _ = (a, b);
        }
    }
    out
}

fn plucker(f: &Field, u: &[Fe], v: &[Fe]) -> Vec<Fe> {
    let n = u.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(f.sub(f.mul(u[i], v[j]), f.mul(u[j], v[i])));
        }
    }
    out
}

/// The line Grassmannian of P^n(F) under the Pluecker map, n + 1 in {5, 6}.
pub fn grassmann(n_plus_1: usize, f: &Field) -> Result<VarietyModel> {
    if !(n_plus_1 == 5 || n_plus_1 == 6) {
        return Err(Error::ConfigError("grassmann supports n+1 in {5, 6}".into()));
    }
    let ambient = n_plus_1 * (n_plus_1 - 1) / 2;
    let lines = lines_of_projective_space(f, n_plus_1);
    let mut pts = Vec::with_capacity(lines.len());
    for (u, v) in &lines {
        let mut c = plucker(f, u, v);
        let p = geom::canonical_pt(f, &mut c).expect("independent rows");
        pts.push(p);
    }
    let expected = lines.len();
    let m = mono_model(f, ambient, pts, format!("grassmann:{n_plus_1}"), Vec::new())?;
    if m.x.len() != expected {
        return Err(Error::ShapeViolation(
            "the Pluecker map must be injective on lines".into(),
        ));
    }
    Ok(m)
}

fn duo_model(
    f: &Field,
    ambient: usize,
    xpts: Vec<Pt>,
    y_cols: std::ops::Range<usize>,
    z: Vec<Pt>,
    route: String,
    provenance_extra: Provenance,
) -> Result<VarietyModel> {
    let x = PointSet::from_vec(xpts);
    let mut y = Subspace::empty(ambient);
    for c in y_cols.clone() {
        let mut v = vec![0; ambient];
        v[c] = 1;
        y.insert(f, &v);
    }
    let mut f_space = Subspace::empty(ambient);
    for c in (0..ambient).filter(|c| !y_cols.contains(c)) {
        let mut v = vec![0; ambient];
        v[c] = 1;
        f_space.insert(f, &v);
    }
    let mut provenance = provenance_extra;
    provenance.route = route;
    let skeleton = model::assemble(
        f.clone(),
        ambient,
        x,
        PointSet::from_vec(z),
        y,
        f_space,
        Vec::new(),
        Vec::new(),
        Params::Duo { r: 0, v: 0, rp: 0, vp: 0 },
        provenance,
    );
    let ex = symps::extract(&skeleton)?;
    let params = check::parameters_from_shapes(&ex.xi, &ex.theta)?;
    let mut m = skeleton;
    m.xi = ex.xi;
    m.theta = ex.theta;
    m.params = params;
    check::verify_layout(&m)?;
    Ok(m)
}

/// Half dual Segre variety: fibers <x, chi(x)> minus chi(x) over a base
/// Segre, where chi sends a point to the dual hyperplane of Y attached to
/// its S-coordinate.
pub fn build_hds(l: usize, k: usize, f: &Field) -> Result<VarietyModel> {
    let m1 = (l + 1) * (k + 1);
    let ambient = m1 + l + 1;
    let xs = projective_points(f, l + 1);
    let ys = projective_points(f, k + 1);
    let mut pts: Vec<Pt> = Vec::with_capacity(xs.len() * ys.len() * (f.q() as usize).pow(l as u32));
    for x in &xs {
        // chi(sigma(x, y)) depends only on the S_1-coordinate x
        let kernel = functional_kernel_vectors(f, x);
        for y in &ys {
            let base = segre_coords(f, x, y);
            for w in &kernel {
                let mut v = vec![0; ambient];
                v[..m1].copy_from_slice(&base);
                v[m1..].copy_from_slice(w);
                pts.push(geom::pack(&v));
            }
        }
    }
    let expected = xs.len() * ys.len() * (f.q() as usize).pow(l as u32);
    if PointSet::from_vec(pts.clone()).len() != expected {
        return Err(Error::ShapeViolation(
            "half dual Segre fibers must be pairwise disjoint".into(),
        ));
    }
    // Z is the full point set of Y
    let zpts: Vec<Pt> = projective_points(f, l + 1)
        .iter()
        .map(|w| {
            let mut v = vec![0; ambient];
            v[m1..].copy_from_slice(w);
            geom::pack(&v)
        })
        .collect();
    let identity = |n: usize| -> Vec<Vec<Fe>> {
        (0..n)
            .map(|i| {
                let mut r = vec![0; n];
                r[i] = 1;
                r
            })
            .collect()
    };
    duo_model(
        f,
        ambient,
        pts,
        m1..ambient,
        zpts,
        format!("hds:{l},{k}"),
        Provenance {
            dualities: vec![DualityRecord {
                name: "chi_S".into(),
                matrix: identity(l + 1),
            }],
            ..Default::default()
        },
    )
}

/// Dual Segre variety: Y carries two disjoint subspaces Z1, Z2 and chi is
/// the join of the two coordinate dualities.
pub fn build_ds(l: usize, k: usize, f: &Field) -> Result<VarietyModel> {
    let m1 = (l + 1) * (k + 1);
    let ambient = m1 + (l + 1) + (k + 1);
    let xs = projective_points(f, l + 1);
    let ys = projective_points(f, k + 1);
    let q = f.q() as usize;
    let mut pts: Vec<Pt> = Vec::with_capacity(xs.len() * ys.len() * q.pow((l + k) as u32));
    for x in &xs {
        let ker1 = functional_kernel_vectors(f, x);
        for y in &ys {
            let ker2 = functional_kernel_vectors(f, y);
            let base = segre_coords(f, x, y);
            for w1 in &ker1 {
                for w2 in &ker2 {
                    let mut v = vec![0; ambient];
                    v[..m1].copy_from_slice(&base);
                    v[m1..m1 + l + 1].copy_from_slice(w1);
                    v[m1 + l + 1..].copy_from_slice(w2);
                    pts.push(geom::pack(&v));
                }
            }
        }
    }
    let expected = xs.len() * ys.len() * q.pow((l + k) as u32);
    if PointSet::from_vec(pts.clone()).len() != expected {
        return Err(Error::ShapeViolation(
            "dual Segre fibers must be pairwise disjoint".into(),
        ));
    }
    let mut zpts: Vec<Pt> = Vec::new();
    for w in projective_points(f, l + 1) {
        let mut v = vec![0; ambient];
        v[m1..m1 + l + 1].copy_from_slice(&w);
        zpts.push(geom::pack(&v));
    }
    for w in projective_points(f, k + 1) {
        let mut v = vec![0; ambient];
        v[m1 + l + 1..].copy_from_slice(&w);
        zpts.push(geom::pack(&v));
    }
    let identity = |n: usize| -> Vec<Vec<Fe>> {
        (0..n)
            .map(|i| {
                let mut r = vec![0; n];
                r[i] = 1;
                r
            })
            .collect()
    };
    let mut z1 = Subspace::empty(ambient);
    for i in 0..=l {
        let mut v = vec![0; ambient];
        v[m1 + i] = 1;
        z1.insert(f, &v);
    }
    let mut z2 = Subspace::empty(ambient);
    for i in 0..=k {
        let mut v = vec![0; ambient];
        v[m1 + l + 1 + i] = 1;
        z2.insert(f, &v);
    }
    duo_model(
        f,
        ambient,
        pts,
        m1..ambient,
        zpts,
        format!("ds:{l},{k}"),
        Provenance {
            z1_basis: Some(z1.rows().to_vec()),
            z2_basis: Some(z2.rows().to_vec()),
            dualities: vec![
                DualityRecord {
                    name: "chi_S1".into(),
                    matrix: identity(l + 1),
                },
                DualityRecord {
                    name: "chi_S2".into(),
                    matrix: identity(k + 1),
                },
            ],
            ..Default::default()
        },
    )
}

/// Dual line Grassmannian: fibers over the Pluecker image, chi' sending a
/// line of the underlying projective space to its dual (n-2)-space of Y.
pub fn build_dg(n_plus_1: usize, f: &Field) -> Result<VarietyModel> {
    if !(n_plus_1 == 5 || n_plus_1 == 6) {
        return Err(Error::ConfigError("dg supports n+1 in {5, 6}".into()));
    }
    let m1 = n_plus_1 * (n_plus_1 - 1) / 2;
    let ambient = m1 + n_plus_1;
    let q = f.q() as usize;
    let lines = lines_of_projective_space(f, n_plus_1);
    let mut pts: Vec<Pt> = Vec::with_capacity(lines.len() * q.pow((n_plus_1 - 2) as u32));
    for (u, v) in &lines {
        let mut c = plucker(f, u, v);
        geom::canonicalize(f, &mut c);
        // chi'(line) = { w : u.w = 0, v.w = 0 }
        for w in doubly_orthogonal_vectors(f, u, v) {
            let mut coords = vec![0; ambient];
            coords[..m1].copy_from_slice(&c);
            coords[m1..].copy_from_slice(&w);
            pts.push(geom::pack(&coords));
        }
    }
    let expected = lines.len() * q.pow((n_plus_1 - 2) as u32);
    if PointSet::from_vec(pts.clone()).len() != expected {
        return Err(Error::ShapeViolation(
            "dual line Grassmannian fibers must be pairwise disjoint".into(),
        ));
    }
    let zpts: Vec<Pt> = projective_points(f, n_plus_1)
        .iter()
        .map(|w| {
            let mut v = vec![0; ambient];
            v[m1..].copy_from_slice(w);
            geom::pack(&v)
        })
        .collect();
    let identity = |n: usize| -> Vec<Vec<Fe>> {
        (0..n)
            .map(|i| {
                let mut r = vec![0; n];
                r[i] = 1;
                r
            })
            .collect()
    };
    duo_model(
        f,
        ambient,
        pts,
        m1..ambient,
        zpts,
        format!("dg:{n_plus_1}"),
        Provenance {
            dualities: vec![DualityRecord {
                name: "chi_prime".into(),
                matrix: identity(n_plus_1),
            }],
            ..Default::default()
        },
    )
}

/// All vectors w with u.w = v.w = 0.
fn doubly_orthogonal_vectors(f: &Field, u: &[Fe], v: &[Fe]) -> Vec<Vec<Fe>> {
    let n = u.len();
    let mut sys = Subspace::empty(n);
    sys.insert(f, u);
    sys.insert(f, v);
    // kernel via the free coordinates of the reduced system
    let pivots: Vec<usize> = sys.pivots().to_vec();
    let rows = sys.rows().to_vec();
    let free: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
    let q = f.q() as usize;
    let mut out = Vec::with_capacity(q.pow(free.len() as u32));
    for mut idx in 0..q.pow(free.len() as u32) {
        let mut w = vec![0; n];
        for &i in &free {
            w[i] = (idx % q) as Fe;
            idx /= q;
        }
        // back-substitute pivot coordinates
        for (r, &pc) in rows.iter().zip(&pivots) {
            let mut acc = 0;
            for &i in &free {
                acc = f.add(acc, f.mul(r[i], w[i]));
            }
            w[pc] = f.neg(acc);
        }
        out.push(w);
    }
    out
}

/// Legality of a subspace against a mono-symplectic base: it must miss the
/// span of every pair of symps.
pub fn is_legal_subspace(base: &VarietyModel, s: &Subspace) -> Result<bool> {
    if !base.params.is_mono() || !base.z.is_empty() {
        return Err(Error::ConfigError(
            "legality is defined against mono-symplectic bases with empty Z".into(),
        ));
    }
    if s.rank() == 0 {
        return Ok(true);
    }
    let f = &base.field;
    for (i, a) in base.xi.iter().enumerate() {
        for b in &base.xi[i + 1..] {
            let join = geom::span(f, base.ambient, &[], &[&a.span, &b.span])?;
            if geom::meet(f, s, &join)?.rank() != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
