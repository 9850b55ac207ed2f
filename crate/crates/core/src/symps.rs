//! Symp extraction: partitioning a model's point pairs into the quadric
//! family Xi u Theta.
//!
//! The candidate symp of a non-collinear pair (p, q) is the convex-closure
//! candidate: the model's trace on span(p, q, {s in X u Y : s ~ p, s ~ q}),
//! where ~ is collinearity along singular lines. Models at desk scale are
//! processed pair by pair with per-seed coverage bitmaps. The two large
//! models (the sextonion Veronese variety and the dual line Grassmannian)
//! are fibered over the per-point subspaces Y_x instead; every structural
//! assumption that fibering makes is asserted and a violation aborts the
//! build, so the fast path never silently diverges from the definition.

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::geom::{self, Pt, Subspace};
use crate::model::{Symp, VarietyModel};
use crate::quadric::{self, QuadricShape};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Models up to this many points run the literal pairwise extraction.
pub const PAIRWISE_LIMIT: usize = 35_000;

pub struct ExtractedSymps {
    pub xi: Vec<Symp>,
    pub theta: Vec<Symp>,
}

pub fn extract(m: &VarietyModel) -> Result<ExtractedSymps> {
    if m.all.len() <= PAIRWISE_LIMIT {
        extract_pairwise(m)
    } else {
        extract_fibered(m)
    }
}

/// Vertex of a classified point set plus the shape record.
fn classify_with_vertex(
    f: &Field,
    ambient: usize,
    xy_pts: &[Pt],
) -> Result<(QuadricShape, Subspace)> {
    let span = geom::span_of_points(f, ambient, xy_pts);
    let (shape, vertex_pts) = quadric::classify_shape_full(f, &span, xy_pts)?;
    let vertex = geom::span_of_points(f, ambient, &vertex_pts);
    Ok((shape, vertex))
}

/// Builds a symp record from its span, classifying and validating the
/// vertex / Y-intersection layout of Definition-style cones.
fn symp_from_span(m: &VarietyModel, span: Subspace, store_points: bool) -> Result<(Symp, bool)> {
    let f = &m.field;
    let xy: Vec<Pt> = m.xy_points_in(&span);
    let (shape, vertex) = classify_with_vertex(f, m.ambient, &xy)?;
    let y_meet = geom::meet(f, &span, &m.y)?;
    let is_theta = y_meet.rank() > vertex.rank();
    if !is_theta && !(y_meet == vertex) {
        return Err(Error::ShapeViolation(
            "Y-intersection neither the vertex nor a larger generator".into(),
        ));
    }
    // model points (X u Z part) of the symp
    let model_pts: Vec<u32> = xy
        .iter()
        .filter_map(|&p| m.all.index_of(p).map(|i| i as u32))
        .collect();
    let mut model_pts = model_pts;
    model_pts.sort_unstable();
    if is_theta {
        validate_theta_layout(m, &span, &vertex, &y_meet, &shape)?;
    } else if vertex.rank() > 0 {
        // the vertex of an ordinary symp lies inside Y
        if !m.y.contains_subspace(f, &vertex) {
            return Err(Error::ShapeViolation(
                "vertex of an ordinary symp leaves Y".into(),
            ));
        }
    }
    let symp = Symp {
        span,
        vertex,
        y_meet,
        shape,
        point_count: model_pts.len() as u32,
        xy_count: xy.len() as u32,
        points: if store_points { Some(model_pts) } else { None },
    };
    Ok((symp, is_theta))
}

/// Z(theta) must be the disjoint union of the vertex and an r'-space of the
/// generator complementary to it; X(theta) is the cone minus the generator.
fn validate_theta_layout(
    m: &VarietyModel,
    span: &Subspace,
    vertex: &Subspace,
    y_meet: &Subspace,
    shape: &QuadricShape,
) -> Result<()> {
    let f = &m.field;
    let rp = shape.base_rank;
    let vp = shape.vertex_dim;
    if y_meet.dim() != rp + vp + 1 {
        return Err(Error::ShapeViolation(format!(
            "theta generator has dim {} instead of {}",
            y_meet.dim(),
            rp + vp + 1
        )));
    }
    let zin: Vec<Pt> = y_meet
        .points(f, 1_000_000)?
        .into_iter()
        .filter(|&p| m.z.contains(p))
        .collect();
    let vertex_pts: Vec<Pt> = vertex.points(f, 1_000_000)?;
    for vp in &vertex_pts {
        if !zin.contains(vp) {
            return Err(Error::ShapeViolation(
                "theta vertex must consist of Z-points".into(),
            ));
        }
    }
    let rest: Vec<Pt> = zin
        .iter()
        .copied()
        .filter(|p| !vertex_pts.contains(p))
        .collect();
    let rest_span = geom::span_of_points(f, m.ambient, &rest);
    if rest_span.dim() != rp || rest_span.point_count(f) != rest.len() {
        return Err(Error::ShapeViolation(
            "Z(theta) minus the vertex is not an r'-space".into(),
        ));
    }
    if geom::meet(f, &rest_span, vertex)?.rank() != 0 {
        return Err(Error::ShapeViolation(
            "vertex and r'-space of Z(theta) are not disjoint".into(),
        ));
    }
    let joined = geom::span(f, m.ambient, &[], &[&rest_span, vertex])?;
    if !(joined == *y_meet) {
        return Err(Error::ShapeViolation(
            "Z(theta) does not span the generator".into(),
        ));
    }
    let _ = span;
    Ok(())
}

// ---------------------------------------------------------------------------
// Collinearity adjacency for desk-scale models
// ---------------------------------------------------------------------------

/// Collinearity graph over the combined table [X points, Y points]. Rows
/// of Y points hold their X-neighbors only: two Y points are always on the
/// singular line inside the subspace Y.
pub struct Adjacency {
    pub x_len: usize,
    pub ys: Vec<Pt>,
    pub adj: Vec<Vec<u32>>,
}

impl Adjacency {
    pub fn build(m: &VarietyModel) -> Adjacency {
        let xs = m.x.as_slice();
        let ys: Vec<Pt> = m.y_points.iter().collect();
        let x_len = xs.len();
        let total = x_len + ys.len();
        let get = |i: usize| -> Pt {
            if i < x_len {
                xs[i]
            } else {
                ys[i - x_len]
            }
        };
        // upper edges from X rows
        let ups: Vec<Vec<u32>> = (0..x_len)
            .into_par_iter()
            .map(|i| {
                let p = xs[i];
                let mut out = Vec::new();
                for j in i + 1..total {
                    if m.is_singular_line(p, get(j)) {
                        out.push(j as u32);
                    }
                }
                out
            })
            .collect();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); total];
        for (i, up) in ups.iter().enumerate() {
            for &j in up {
                adj[j as usize].push(i as u32);
            }
        }
        for (i, mut up) in ups.into_iter().enumerate() {
            adj[i].append(&mut up);
        }
        Adjacency { x_len, ys, adj }
    }

    #[inline]
    fn collinear(&self, a: usize, b: usize) -> bool {
        if a >= self.x_len && b >= self.x_len {
            return true; // two Y-points: the line lies inside Y
        }
        let (row, target) = if self.adj[a].len() <= self.adj[b].len() {
            (a, b as u32)
        } else {
            (b, a as u32)
        };
        self.adj[row].binary_search(&target).is_ok()
    }

    /// Common neighbors of two non-collinear nodes, as node indices.
    fn common_neighbors(&self, a: usize, b: usize) -> Vec<u32> {
        let (ra, rb) = (&self.adj[a], &self.adj[b]);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < ra.len() && j < rb.len() {
            match ra[i].cmp(&rb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(ra[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        // Y-neighbors of an X-node are collinear to every Y-node
        if a >= self.x_len {
            out.extend(rb.iter().copied().filter(|&t| t >= self.x_len as u32));
            out.sort_unstable();
            out.dedup();
        } else if b >= self.x_len {
            out.extend(ra.iter().copied().filter(|&t| t >= self.x_len as u32));
            out.sort_unstable();
            out.dedup();
        }
        out
    }
}

/// Convex-closure candidate span of a non-collinear pair, via adjacency.
fn candidate_span_adj(
    m: &VarietyModel,
    g: &Adjacency,
    p: Pt,
    q: Pt,
    pi: usize,
    qi: usize,
) -> Subspace {
    let f = &m.field;
    let n = m.ambient;
    let xs = m.x.as_slice();
    let mut span = Subspace::empty(n);
    let mut buf = vec![0; n];
    geom::unpack(p, n, &mut buf);
    span.insert(f, &buf);
    geom::unpack(q, n, &mut buf);
    span.insert(f, &buf);
    for s in g.common_neighbors(pi, qi) {
        let s = s as usize;
        let pt = if s < g.x_len {
            xs[s]
        } else {
            g.ys[s - g.x_len]
        };
        geom::unpack(pt, n, &mut buf);
        span.insert(f, &buf);
    }
    span
}

// ---------------------------------------------------------------------------
// Pairwise extraction
// ---------------------------------------------------------------------------

fn extract_pairwise(m: &VarietyModel) -> Result<ExtractedSymps> {
    let g = Adjacency::build(m);
    let n = m.all.len();
    let all = m.all.as_slice();
    let xs = m.x.as_slice();
    // model index -> adjacency node index
    let node_of: Vec<usize> = all
        .iter()
        .map(|&p| {
            if let Some(i) = m.x.index_of(p) {
                i
            } else {
                g.x_len
                    + g.ys
                        .binary_search(&p)
                        .expect("Z points are Y points")
            }
        })
        .collect();
    let _ = xs;
    let mut xi: Vec<Symp> = Vec::new();
    let mut theta: Vec<Symp> = Vec::new();
    // ids: theta ids offset by 1<<31
    let mut pt_symps: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut covered = vec![false; n];
    for pi in 0..n {
        covered.iter_mut().for_each(|c| *c = false);
        for &sid in &pt_symps[pi] {
            let symp = if sid & (1 << 31) != 0 {
                &theta[(sid & !(1 << 31)) as usize]
            } else {
                &xi[sid as usize]
            };
            for &t in symp.points.as_ref().expect("pairwise stores points") {
                covered[t as usize] = true;
            }
        }
        let p = all[pi];
        for qj in pi + 1..n {
            if covered[qj] {
                continue;
            }
            if g.collinear(node_of[pi], node_of[qj]) {
                continue;
            }
            let q = all[qj];
            let span = candidate_span_adj(m, &g, p, q, node_of[pi], node_of[qj]);
            let (symp, is_theta) = symp_from_span(m, span, true)?;
            let pts = symp.points.clone().expect("stored");
            if pts.binary_search(&(pi as u32)).is_err()
                || pts.binary_search(&(qj as u32)).is_err()
            {
                return Err(Error::ShapeViolation(
                    "candidate symp does not contain its generating pair".into(),
                ));
            }
            let id = if is_theta {
                theta.push(symp);
                (theta.len() - 1) as u32 | (1 << 31)
            } else {
                xi.push(symp);
                (xi.len() - 1) as u32
            };
            for &t in &pts {
                covered[t as usize] = true;
                pt_symps[t as usize].push(id);
            }
        }
    }
    sort_symps(&mut xi);
    sort_symps(&mut theta);
    Ok(ExtractedSymps { xi, theta })
}

fn sort_symps(v: &mut [Symp]) {
    v.sort_by(|a, b| {
        let ka: Vec<Pt> = a.span.rows().iter().map(|r| geom::pack(r)).collect();
        let kb: Vec<Pt> = b.span.rows().iter().map(|r| geom::pack(r)).collect();
        ka.cmp(&kb)
    });
}

// ---------------------------------------------------------------------------
// Fibered extraction for the large duo-symplectic models
// ---------------------------------------------------------------------------

/// Per-point perp inside Y, as an echelon basis.
pub fn perp_in_y(m: &VarietyModel, x: Pt) -> Subspace {
    let f = &m.field;
    let mut s = Subspace::empty(m.ambient);
    let mut buf = vec![0; m.ambient];
    for y in m.y_points.iter() {
        if m.is_singular_line(x, y) {
            geom::unpack(y, m.ambient, &mut buf);
            s.insert(f, &buf);
        }
    }
    s
}

fn subspace_key(s: &Subspace) -> Vec<u128> {
    s.rows().iter().map(|r| geom::pack(r)).collect()
}

fn extract_fibered(m: &VarietyModel) -> Result<ExtractedSymps> {
    let f = &m.field;
    let n = m.ambient;

    // Y_x for every X-point, bucketed by the subspace; each bucket is one
    // fiber of the projection from Y
    let xs = m.x.as_slice();
    let keys: Vec<Vec<u128>> = xs
        .par_iter()
        .map(|&x| subspace_key(&perp_in_y(m, x)))
        .collect();
    let mut buckets: BTreeMap<Vec<u128>, Vec<u32>> = BTreeMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        buckets.entry(k).or_default().push(i as u32);
    }
    let yx_rank = buckets
        .keys()
        .next()
        .map(|k| k.len())
        .ok_or_else(|| Error::ShapeViolation("empty X".into()))?;
    if buckets.keys().any(|k| k.len() != yx_rank) {
        return Err(Error::ShapeViolation(
            "Y_x dimension is not uniform over X".into(),
        ));
    }
    let fiber_size = xs.len() / buckets.len();
    for b in buckets.values() {
        if b.len() != fiber_size {
            return Err(Error::ShapeViolation(format!(
                "fibers over Y_x are not uniform: {} vs {}",
                b.len(),
                fiber_size
            )));
        }
    }
    // bucket id -> (point ids, Y_x subspace)
    let bucket_list: Vec<(Vec<u32>, Subspace)> = buckets
        .into_iter()
        .map(|(k, ids)| {
            let mut sub = Subspace::empty(n);
            for row in k.iter().map(|&p| geom::unpack_vec(p, n)) {
                sub.insert(f, &row);
            }
            (ids, sub)
        })
        .collect();

    // Theta via the hyperplanes of Y: X(theta_H) = union of fibers with
    // Y_x inside H
    let hyperplanes = enumerate_hyperplanes_of(f, &m.y)?;
    let theta: Result<Vec<Symp>> = hyperplanes
        .par_iter()
        .map(|h| -> Result<Symp> {
            let mut span = h.clone();
            let mut buf = vec![0; n];
            for (ids, sub) in &bucket_list {
                if h.contains_subspace(f, sub) {
                    for &i in ids {
                        if span.rank() > 2 * MAX_SYMP_RANK {
                            break;
                        }
                        geom::unpack(xs[i as usize], n, &mut buf);
                        span.insert(f, &buf);
                    }
                }
            }
            let (symp, is_theta) = symp_from_span(m, span, true)?;
            if !is_theta {
                return Err(Error::ShapeViolation(
                    "hyperplane symp did not classify as a Theta member".into(),
                ));
            }
            Ok(symp)
        })
        .collect();
    let mut theta = theta?;
    sort_symps(&mut theta);

    // Xi via vertex lines: for each line T of Y, the points collinear to T
    // are the fibers whose Y_x contains T, and they partition into the
    // members of Xi with vertex T.
    let mut line_buckets: BTreeMap<Vec<u128>, Vec<u32>> = BTreeMap::new();
    for (bi, (_, sub)) in bucket_list.iter().enumerate() {
        for line in lines_of(f, sub)? {
            line_buckets
                .entry(subspace_key(&line))
                .or_default()
                .push(bi as u32);
        }
    }
    let line_entries: Vec<(Vec<u128>, Vec<u32>)> = line_buckets.into_iter().collect();
    let xi_nested: Result<Vec<Vec<Symp>>> = line_entries
        .par_iter()
        .map(|(line_key, bids)| -> Result<Vec<Symp>> {
            let line_rows: Vec<Vec<Fe>> =
                line_key.iter().map(|&p| geom::unpack_vec(p, n)).collect();
            let mut t_span = Subspace::empty(n);
            for r in &line_rows {
                t_span.insert(f, r);
            }
            let mut local_pts: Vec<(Pt, u32)> = Vec::new();
            for &bi in bids {
                local_pts.extend(
                    bucket_list[bi as usize]
                        .0
                        .iter()
                        .map(|&i| (xs[i as usize], bi)),
                );
            }
            local_pts.sort_unstable();
            partition_x_t(m, &t_span, &local_pts, &bucket_list)
        })
        .collect();
    let mut xi: Vec<Symp> = xi_nested?.into_iter().flatten().collect();
    sort_symps(&mut xi);
    // big-model Xi records stay implicit to keep artifacts at desk scale
    for s in xi.iter_mut() {
        s.points = None;
    }
    Ok(ExtractedSymps { xi, theta })
}

const MAX_SYMP_RANK: usize = 14;

/// Partitions the points collinear to a vertex candidate T into the symps
/// with vertex exactly T. Disjointness and exhaustion are asserted.
fn partition_x_t(
    m: &VarietyModel,
    t_span: &Subspace,
    local: &[(Pt, u32)],
    bucket_list: &[(Vec<u32>, Subspace)],
) -> Result<Vec<Symp>> {
    let f = &m.field;
    let n = m.ambient;
    let mut covered = vec![false; local.len()];
    let mut out = Vec::new();
    let t_pts = t_span.points(f, 10_000)?;
    // meet(Y_b0, Y_b1) == T, memoized per bucket pair
    let mut meet_is_t: std::collections::HashMap<(u32, u32), bool> =
        std::collections::HashMap::new();
    loop {
        let Some(i0) = covered.iter().position(|&c| !c) else {
            break;
        };
        let (x0, b0) = local[i0];
        let mut partner: Option<Pt> = None;
        for (j, &(cand, b1)) in local.iter().enumerate().skip(i0 + 1) {
            if covered[j] {
                continue;
            }
            let key = (b0.min(b1), b0.max(b1));
            let good = *meet_is_t.entry(key).or_insert_with(|| {
                let meet = geom::meet(f, &bucket_list[b0 as usize].1, &bucket_list[b1 as usize].1)
                    .expect("same ambient");
                meet == *t_span
            });
            if !good || m.collinear(x0, cand) {
                continue;
            }
            partner = Some(cand);
            break;
        }
        let Some(x1) = partner else {
            return Err(Error::ShapeViolation(
                "no partner found while partitioning a vertex fiber".into(),
            ));
        };
        // span of the double-perp restricted to the fiber
        let mut span = t_span.clone();
        let mut buf = vec![0; n];
        for &p in [x0, x1].iter() {
            geom::unpack(p, n, &mut buf);
            span.insert(f, &buf);
        }
        for &(s, _) in local {
            if span.rank() > MAX_SYMP_RANK {
                break;
            }
            if s != x0 && s != x1 && m.is_singular_line(x0, s) && m.is_singular_line(x1, s) {
                geom::unpack(s, n, &mut buf);
                span.insert(f, &buf);
            }
        }
        let (mut symp, is_theta) = symp_from_span(m, span, true)?;
        if is_theta {
            return Err(Error::ShapeViolation(
                "vertex-fiber candidate classified as Theta".into(),
            ));
        }
        if !(symp.vertex == *t_span) {
            return Err(Error::ShapeViolation(
                "extracted symp has the wrong vertex".into(),
            ));
        }
        // mark members; they must lie inside the fiber and be uncovered
        let member_pts = symp.points.take().expect("stored");
        symp.points = Some(member_pts.clone());
        for &gid in &member_pts {
            let p = m.all.as_slice()[gid as usize];
            if t_pts.contains(&p) {
                continue; // vertex points live in Z
            }
            let Ok(li) = local.binary_search_by_key(&p, |&(pt, _)| pt) else {
                return Err(Error::ShapeViolation(
                    "symp point escapes the vertex fiber".into(),
                ));
            };
            if covered[li] {
                return Err(Error::ShapeViolation(
                    "vertex fiber does not partition into symps".into(),
                ));
            }
            covered[li] = true;
        }
        out.push(symp);
    }
    Ok(out)
}

/// All hyperplanes of a subspace (rank - 1 subspaces), canonical order.
fn enumerate_hyperplanes_of(f: &Field, y: &Subspace) -> Result<Vec<Subspace>> {
    let k = y.rank();
    let n = y.ambient();
    // hyperplanes of P(Y) correspond to nonzero functionals on Y up to scale;
    // enumerate canonical functional vectors over the internal coordinates
    let q = f.q() as usize;
    let count = (q.pow(k as u32) - 1) / (q - 1);
    let mut out = Vec::with_capacity(count);
    let mut combo = vec![0u8; k];
    for lead in 0..k {
        let free = k - lead - 1;
        for mut idx in 0..q.pow(free as u32) {
            combo.iter_mut().for_each(|c| *c = 0);
            combo[lead] = 1;
            for slot in combo.iter_mut().skip(lead + 1) {
                *slot = (idx % q) as u8;
                idx /= q;
            }
            // kernel of the functional sum_i combo_i * c_i over internal
            // coordinates c of Y
            let mut h = Subspace::empty(n);
            for vec_combo in kernel_of_functional(f, &combo) {
                let mut v = vec![0; n];
                for (c, row) in vec_combo.iter().zip(y.rows()) {
                    if *c != 0 {
                        for j in 0..n {
                            v[j] = f.add(v[j], f.mul(*c, row[j]));
                        }
                    }
                }
                h.insert(f, &v);
            }
            out.push(h);
        }
    }
    Ok(out)
}

/// Basis of the kernel of one linear functional on K^k.
fn kernel_of_functional(f: &Field, functional: &[Fe]) -> Vec<Vec<Fe>> {
    let k = functional.len();
    let pivot = functional
        .iter()
        .position(|&c| c != 0)
        .expect("nonzero functional");
    let mut out = Vec::with_capacity(k - 1);
    let inv = f.inv_unchecked(functional[pivot]);
    for i in 0..k {
        if i == pivot {
            continue;
        }
        let mut v = vec![0; k];
        v[i] = 1;
        v[pivot] = f.neg(f.mul(functional[i], inv));
        out.push(v);
    }
    out
}

/// All lines (rank-2 subspaces) of a small subspace.
fn lines_of(f: &Field, s: &Subspace) -> Result<Vec<Subspace>> {
    let pts = s.points(f, 10_000)?;
    let n = s.ambient();
    let mut seen: std::collections::BTreeSet<Vec<u128>> = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for (i, &p) in pts.iter().enumerate() {
        for &r in &pts[i + 1..] {
            let line = geom::span_of_points(f, n, &[p, r]);
            let key = subspace_key(&line);
            if seen.insert(key) {
                out.push(line);
            }
        }
    }
    Ok(out)
}
