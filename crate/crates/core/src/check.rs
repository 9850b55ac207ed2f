//! The axiom engine: (S1), (S2), (S3), perps, tangent spaces, line types,
//! parameter extraction and the model layout invariants.

use crate::error::{Error, Result};
use crate::geom::{self, Pt, Subspace};
use crate::model::{Params, Symp, VarietyModel};
use crate::quadric::QuadricKind;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use crate::symps::perp_in_y;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { budget: usize, seed: u64 },
}

impl CheckMode {
    fn label(&self) -> String {
        match self {
            CheckMode::Exhaustive => "exhaustive".into(),
            CheckMode::Sampled { budget, seed } => format!("sampled({budget},{seed})"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub what: String,
    pub indices: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub mode: String,
    pub checked: u64,
    pub failures: Vec<Witness>,
    pub verdict: bool,
}

impl AxiomReport {
    fn finish(axiom: &str, mode: String, checked: u64, failures: Vec<Witness>) -> Self {
        AxiomReport {
            axiom: axiom.into(),
            mode,
            checked,
            verdict: failures.is_empty(),
            failures,
        }
    }
}

// ---------------------------------------------------------------------------
// Perps and tangent spaces
// ---------------------------------------------------------------------------

/// Y_x: span of the Y-points on a singular line with x. Checked to be a
/// subspace whose points are exactly those Y-points.
pub fn perp_y(m: &VarietyModel, x: Pt) -> Result<Subspace> {
    let s = perp_in_y(m, x);
    let count = m
        .y_points
        .iter()
        .filter(|&y| m.is_singular_line(x, y))
        .count();
    if s.point_count(&m.field) != count {
        return Err(Error::ShapeViolation(
            "collinear Y-points of a point do not form a subspace".into(),
        ));
    }
    Ok(s)
}

/// All points of X u Y collinear to x (x excluded).
pub fn perp_points(m: &VarietyModel, x: Pt) -> Vec<Pt> {
    let xs = m.x.as_slice();
    let chunk = (xs.len() / rayon::current_num_threads().max(1)).max(4096);
    let mut out: Vec<Pt> = xs
        .par_chunks(chunk)
        .flat_map_iter(|c| {
            c.iter()
                .copied()
                .filter(|&s| s != x && m.is_singular_line(x, s))
        })
        .collect();
    out.extend(
        m.y_points
            .iter()
            .filter(|&y| y != x && m.is_singular_line(x, y)),
    );
    out
}

/// T_x: the subspace spanned by all singular lines through x.
pub fn tangent_space(m: &VarietyModel, x: Pt) -> Subspace {
    let f = &m.field;
    let mut s = Subspace::empty(m.ambient);
    let mut buf = vec![0; m.ambient];
    geom::unpack(x, m.ambient, &mut buf);
    s.insert(f, &buf);
    for p in perp_points(m, x) {
        geom::unpack(p, m.ambient, &mut buf);
        s.insert(f, &buf);
    }
    s
}

// ---------------------------------------------------------------------------
// Symp lookup structures
// ---------------------------------------------------------------------------

/// Symp id: Xi entries first, then Theta entries.
pub struct SympIndex {
    /// per model point, sorted list of symp ids (only for materialized symps)
    pt_lists: Vec<Vec<u32>>,
    /// vertex key -> xi ids, for implicit Xi lookup
    xi_by_vertex: BTreeMap<Vec<u128>, Vec<u32>>,
    xi_explicit: bool,
    pub xi_len: usize,
}

fn subspace_key(s: &Subspace) -> Vec<u128> {
    s.rows().iter().map(|r| geom::pack(r)).collect()
}

impl SympIndex {
    pub fn build(m: &VarietyModel) -> SympIndex {
        let n = m.all.len();
        let mut pt_lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        let xi_explicit = m.xi.iter().all(|s| s.points.is_some());
        if xi_explicit {
            for (i, s) in m.xi.iter().enumerate() {
                for &p in s.points.as_ref().unwrap() {
                    pt_lists[p as usize].push(i as u32);
                }
            }
        }
        for (i, s) in m.theta.iter().enumerate() {
            let id = (m.xi.len() + i) as u32;
            match &s.points {
                Some(pts) => {
                    for &p in pts {
                        pt_lists[p as usize].push(id);
                    }
                }
                None => {
                    for p in m.model_points_in(&s.span) {
                        pt_lists[p as usize].push(id);
                    }
                }
            }
        }
        let mut xi_by_vertex: BTreeMap<Vec<u128>, Vec<u32>> = BTreeMap::new();
        for (i, s) in m.xi.iter().enumerate() {
            xi_by_vertex
                .entry(subspace_key(&s.vertex))
                .or_default()
                .push(i as u32);
        }
        SympIndex {
            pt_lists,
            xi_by_vertex,
            xi_explicit,
            xi_len: m.xi.len(),
        }
    }

    /// ids of symps containing both points (sorted intersection of the
    /// explicit lists, plus vertex-routed Xi candidates when Xi is implicit).
    pub fn containing_pair(&self, m: &VarietyModel, pi: u32, qi: u32) -> Vec<u32> {
        let mut out = intersect_sorted(&self.pt_lists[pi as usize], &self.pt_lists[qi as usize]);
        if !self.xi_explicit {
            let f = &m.field;
            let p = m.all.as_slice()[pi as usize];
            let q = m.all.as_slice()[qi as usize];
            let yp = if m.y_points.contains(p) {
                m.y.clone()
            } else {
                perp_in_y(m, p)
            };
            let yq = if m.y_points.contains(q) {
                m.y.clone()
            } else {
                perp_in_y(m, q)
            };
            let meet = geom::meet(f, &yp, &yq).expect("same ambient");
            // candidate vertices: subspaces of the meet of the right dim
            let vdim = m.xi.first().map(|s| s.vertex.rank()).unwrap_or(0);
            let candidates = subspaces_of_rank(f, &meet, vdim);
            for v in candidates {
                if let Some(ids) = self.xi_by_vertex.get(&subspace_key(&v)) {
                    for &id in ids {
                        let s = &m.xi[id as usize];
                        if s.span.contains_pt(f, p) && s.span.contains_pt(f, q) {
                            out.push(id);
                        }
                    }
                }
            }
            out.sort_unstable();
            out.dedup();
        }
        out
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// All rank-k subspaces of a small subspace.
fn subspaces_of_rank(f: &crate::field::Field, s: &Subspace, k: usize) -> Vec<Subspace> {
    if k == 0 || s.rank() < k {
        return Vec::new();
    }
    if k == s.rank() {
        return vec![s.clone()];
    }
    let pts = s.points(f, 4096).expect("small subspace");
    if k == 1 {
        return pts
            .iter()
            .map(|&p| geom::span_of_points(f, s.ambient(), &[p]))
            .collect();
    }
    if k == 2 {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for (i, &p) in pts.iter().enumerate() {
            for &r in &pts[i + 1..] {
                let line = geom::span_of_points(f, s.ambient(), &[p, r]);
                if seen.insert(subspace_key(&line)) {
                    out.push(line);
                }
            }
        }
        return out;
    }
    // higher ranks are not needed by the lookup paths
    Vec::new()
}

// ---------------------------------------------------------------------------
// (S1)
// ---------------------------------------------------------------------------

pub fn check_s1(m: &VarietyModel, idx: &SympIndex, mode: CheckMode) -> AxiomReport {
    let n = m.all.len();
    let all = m.all.as_slice();
    let check_pair = |pi: u32, qi: u32| -> Option<Witness> {
        let p = all[pi as usize];
        let q = all[qi as usize];
        let ids = idx.containing_pair(m, pi, qi);
        if m.collinear(p, q) {
            if ids.is_empty() {
                return Some(Witness {
                    what: "collinear pair in no member".into(),
                    indices: vec![pi as u64, qi as u64],
                });
            }
        } else {
            if ids.is_empty() {
                return Some(Witness {
                    what: "non-collinear pair in no member".into(),
                    indices: vec![pi as u64, qi as u64],
                });
            }
            if ids.len() > 1 {
                return Some(Witness {
                    what: "non-collinear pair in two members".into(),
                    indices: vec![pi as u64, qi as u64, ids[0] as u64, ids[1] as u64],
                });
            }
        }
        None
    };
    match mode {
        CheckMode::Exhaustive => {
            let failures: Vec<Witness> = (0..n as u32)
                .into_par_iter()
                .flat_map_iter(|pi| {
                    let mut local = Vec::new();
                    for qi in pi + 1..n as u32 {
                        if let Some(w) = check_pair(pi, qi) {
                            local.push(w);
                        }
                    }
                    local
                })
                .collect();
            let checked = (n as u64) * (n as u64 - 1) / 2;
            AxiomReport::finish("S1", mode.label(), checked, failures)
        }
        CheckMode::Sampled { budget, seed } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let pairs: Vec<(u32, u32)> = (0..budget)
                .map(|_| {
                    loop {
                        let a = rng.gen_range(0..n as u32);
                        let b = rng.gen_range(0..n as u32);
                        if a != b {
                            return (a.min(b), a.max(b));
                        }
                    }
                })
                .collect();
            let failures: Vec<Witness> = pairs
                .par_iter()
                .filter_map(|&(a, b)| check_pair(a, b))
                .collect();
            AxiomReport::finish("S1", mode.label(), budget as u64, failures)
        }
    }
}

// ---------------------------------------------------------------------------
// (S2)
// ---------------------------------------------------------------------------

pub fn check_s2(m: &VarietyModel, mode: CheckMode) -> AxiomReport {
    let f = &m.field;
    let total = m.xi.len() + m.theta.len();
    let span_of = |id: usize| -> &Subspace {
        if id < m.xi.len() {
            &m.xi[id].span
        } else {
            &m.theta[id - m.xi.len()].span
        }
    };
    let check_pair = |a: usize, b: usize| -> Option<Witness> {
        let meet = geom::meet(f, span_of(a), span_of(b)).expect("ambient");
        if meet.rank() == 0 {
            return None;
        }
        let pts = meet.points(f, 2_000_000).expect("meet enumeration");
        for p in pts {
            if !m.in_xy(p) {
                return Some(Witness {
                    what: "symp intersection leaves X u Y".into(),
                    indices: vec![a as u64, b as u64],
                });
            }
        }
        None
    };
    match mode {
        CheckMode::Exhaustive => {
            let failures: Vec<Witness> = (0..total)
                .into_par_iter()
                .flat_map_iter(|a| {
                    let mut local = Vec::new();
                    for b in a + 1..total {
                        if let Some(w) = check_pair(a, b) {
                            local.push(w);
                        }
                    }
                    local
                })
                .collect();
            let checked = (total as u64) * (total as u64 - 1) / 2;
            AxiomReport::finish("S2", mode.label(), checked, failures)
        }
        CheckMode::Sampled { budget, seed } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let pairs: Vec<(usize, usize)> = (0..budget)
                .map(|_| loop {
                    let a = rng.gen_range(0..total);
                    let b = rng.gen_range(0..total);
                    if a != b {
                        return (a.min(b), a.max(b));
                    }
                })
                .collect();
            let failures: Vec<Witness> = pairs
                .par_iter()
                .filter_map(|&(a, b)| check_pair(a, b))
                .collect();
            AxiomReport::finish("S2", mode.label(), budget as u64, failures)
        }
    }
}

// ---------------------------------------------------------------------------
// (S3)
// ---------------------------------------------------------------------------

/// Xi members through a point, by id.
fn xi_through(m: &VarietyModel, idx: &SympIndex, pi: u32) -> Vec<u32> {
    let p = m.all.as_slice()[pi as usize];
    if idx.xi_explicit {
        idx.pt_lists[pi as usize]
            .iter()
            .copied()
            .filter(|&id| (id as usize) < m.xi.len())
            .collect()
    } else {
        let f = &m.field;
        let yp = perp_in_y(m, p);
        let vdim = m.xi.first().map(|s| s.vertex.rank()).unwrap_or(0);
        let mut out = Vec::new();
        for v in subspaces_of_rank(f, &yp, vdim) {
            if let Some(ids) = idx.xi_by_vertex.get(&subspace_key(&v)) {
                for &id in ids {
                    if m.xi[id as usize].span.contains_pt(f, p) {
                        out.push(id);
                    }
                }
            }
        }
        out
    }
}

/// (S3): for sampled X-points, two Xi members through x span T_x together.
pub fn check_s3(m: &VarietyModel, idx: &SympIndex, sample: usize, seed: u64) -> AxiomReport {
    let f = &m.field;
    let xs = m.x.as_slice();
    let picks: Vec<u32> = if sample == 0 || sample >= xs.len() {
        (0..xs.len() as u32).collect()
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..sample).map(|_| rng.gen_range(0..xs.len() as u32)).collect()
    };
    let mode = if sample == 0 || sample >= xs.len() {
        "exhaustive".to_string()
    } else {
        format!("sampled({sample},{seed})")
    };
    let failures: Vec<Witness> = picks
        .par_iter()
        .filter_map(|&xi_idx| {
            let x = xs[xi_idx as usize];
            let perp = perp_points(m, x);
            let mut tx = Subspace::empty(m.ambient);
            let mut buf = vec![0; m.ambient];
            geom::unpack(x, m.ambient, &mut buf);
            tx.insert(f, &buf);
            for &p in &perp {
                geom::unpack(p, m.ambient, &mut buf);
                tx.insert(f, &buf);
            }
            let pidx = m
                .all
                .index_of(x)
                .expect("X-point in the global table") as u32;
            let candidates = xi_through(m, idx, pidx);
            // tangent piece of each symp at x: x plus the perp points inside
            let mut pieces: Vec<Subspace> = Vec::with_capacity(candidates.len());
            for &cid in &candidates {
                let span = &m.xi[cid as usize].span;
                let mut piece = Subspace::empty(m.ambient);
                geom::unpack(x, m.ambient, &mut buf);
                piece.insert(f, &buf);
                for &p in &perp {
                    if span.contains_pt(f, p) {
                        geom::unpack(p, m.ambient, &mut buf);
                        piece.insert(f, &buf);
                    }
                }
                pieces.push(piece);
            }
            for i in 0..pieces.len() {
                for j in i + 1..pieces.len() {
                    let join = geom::span(f, m.ambient, &[], &[&pieces[i], &pieces[j]])
                        .expect("ambient");
                    if join.rank() == tx.rank() {
                        return None;
                    }
                }
            }
            Some(Witness {
                what: "no pair of Xi members spans T_x".into(),
                indices: vec![xi_idx as u64],
            })
        })
        .collect();
    AxiomReport::finish("S3", mode, picks.len() as u64, failures)
}

// ---------------------------------------------------------------------------
// Line types
// ---------------------------------------------------------------------------

/// Number of Theta members containing the X-line through p and r, capped at
/// two, cross-checked against the perp criterion: 0-line iff Y_L = Y_x,
/// 1-line iff Y_L is a hyperplane of Y_x.
pub fn line_type(m: &VarietyModel, idx: &SympIndex, p: Pt, r: Pt) -> Result<u8> {
    let f = &m.field;
    let line = geom::line_points(f, m.ambient, p, r);
    for &t in &line {
        if !m.x.contains(t) {
            return Err(Error::NotAnXLine(format!("{t:x}")));
        }
    }
    let pi = m.all.index_of(p).unwrap() as u32;
    let ri = m.all.index_of(r).unwrap() as u32;
    let mut count = 0u8;
    for id in idx.containing_pair(m, pi, ri) {
        if (id as usize) >= idx.xi_len {
            count += 1;
            if count == 2 {
                break;
            }
        }
    }
    // perp criterion
    let ys: Vec<Subspace> = line.iter().map(|&t| perp_in_y(m, t)).collect();
    let mut yl = ys[0].clone();
    for other in &ys[1..] {
        yl = geom::meet(f, &yl, other)?;
    }
    let yx = &ys[0];
    let expected = if yl.rank() == yx.rank() {
        0
    } else if yl.rank() + 1 == yx.rank() {
        1
    } else {
        2
    };
    if expected != count {
        return Err(Error::ShapeViolation(format!(
            "line type {count} disagrees with the perp criterion {expected}"
        )));
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Parameters and layout invariants
// ---------------------------------------------------------------------------

/// Reads (r, v) off the Xi shapes and (r', v') off Theta, which must be
/// uniform families.
pub fn parameters_from_shapes(xi: &[Symp], theta: &[Symp]) -> Result<Params> {
    if xi.is_empty() {
        return Err(Error::NonUniformShapes("Xi is empty".into()));
    }
    let r = xi[0].shape.base_rank;
    let v = xi[0].shape.vertex_dim;
    for s in xi {
        if s.shape.base_rank != r || s.shape.vertex_dim != v {
            return Err(Error::NonUniformShapes(format!(
                "Xi mixes ({r},{v}) and ({},{})",
                s.shape.base_rank, s.shape.vertex_dim
            )));
        }
        if !matches!(
            s.shape.kind,
            QuadricKind::Hyperbolic | QuadricKind::ConeOverHyperbolic
        ) {
            return Err(Error::NonUniformShapes(
                "Xi member is not hyperbolic-based".into(),
            ));
        }
    }
    if theta.is_empty() {
        return Ok(Params::Mono { r, v });
    }
    let rp = theta[0].shape.base_rank;
    let vp = theta[0].shape.vertex_dim;
    for s in theta {
        if s.shape.base_rank != rp || s.shape.vertex_dim != vp {
            return Err(Error::NonUniformShapes(format!(
                "Theta mixes ({rp},{vp}) and ({},{})",
                s.shape.base_rank, s.shape.vertex_dim
            )));
        }
    }
    if !(rp > r && r >= 1) {
        return Err(Error::NonUniformShapes(format!(
            "parameter constraint r' > r >= 1 fails: r={r}, r'={rp}"
        )));
    }
    Ok(Params::Duo { r, v, rp, vp })
}

/// Structural layout checks shared by every construction route.
pub fn verify_layout(m: &VarietyModel) -> Result<()> {
    let f = &m.field;
    for p in m.x.iter().take(100_000) {
        if m.y_points.contains(p) {
            return Err(Error::ShapeViolation("X meets Y".into()));
        }
    }
    for z in m.z.iter() {
        if !m.y_points.contains(z) {
            return Err(Error::ShapeViolation("Z leaves Y".into()));
        }
    }
    // X u Z spans the ambient space
    let mut span = Subspace::empty(m.ambient);
    let mut buf = vec![0; m.ambient];
    for p in m.x.iter().chain(m.z.iter()) {
        geom::unpack(p, m.ambient, &mut buf);
        if span.insert(f, &buf) && span.rank() == m.ambient {
            break;
        }
    }
    if span.rank() != m.ambient {
        return Err(Error::ShapeViolation(format!(
            "model spans only a rank-{} subspace of its ambient",
            span.rank()
        )));
    }
    let d = m.params.d();
    for s in &m.xi {
        if s.span.dim() != d + 1 {
            return Err(Error::ShapeViolation(format!(
                "Xi member spans dim {} instead of d+1 = {}",
                s.span.dim(),
                d + 1
            )));
        }
    }
    if let Some(dp) = m.params.d_prime() {
        for s in &m.theta {
            if s.span.dim() != dp + 1 {
                return Err(Error::ShapeViolation(format!(
                    "Theta member spans dim {} instead of d'+1 = {}",
                    s.span.dim(),
                    dp + 1
                )));
            }
        }
    }
    if m.xi.len() < 2 {
        return Err(Error::ShapeViolation("fewer than two Xi members".into()));
    }
    Ok(())
}

/// The dimension-bound battery attached to parameter extraction.
pub fn parameter_bounds(m: &VarietyModel) -> Vec<(String, bool)> {
    let n = m.n() as i64;
    let mut out = Vec::new();
    match m.params {
        Params::Mono { .. } => {
            let d = m.params.d();
            out.push((format!("N <= 3d+2 ({n} <= {})", 3 * d + 2), n <= 3 * d + 2));
        }
        Params::Duo { rp, .. } => {
            let two_theta = theta_per_point_census(m);
            match two_theta {
                Some(2) => {
                    let bound = rp * rp + 4 * rp + 2;
                    out.push((format!("N <= r'^2+4r'+2 ({n} <= {bound})"), n <= bound));
                }
                Some(1) => {
                    // half dual Segre bound with k read off the model
                    let k = n + 1 - m.y.rank() as i64 - rp;
                    let bound = (rp + 1) * (k + 2) - 1;
                    out.push((
                        format!("N <= (r'+1)(k+2)-1 ({n} <= {bound}, k={k})"),
                        n <= bound,
                    ));
                }
                _ => {}
            }
        }
    }
    out
}

/// How many Theta members pass through each X-point, when uniform.
pub fn theta_per_point_census(m: &VarietyModel) -> Option<usize> {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut per_point: Vec<u32> = vec![0; m.all.len()];
    for s in &m.theta {
        let pts = m.symp_points(s);
        for p in pts {
            let pt = m.all.as_slice()[p as usize];
            if m.x.contains(pt) {
                per_point[p as usize] += 1;
            }
        }
    }
    for (i, &c) in per_point.iter().enumerate() {
        let pt = m.all.as_slice()[i];
        if m.x.contains(pt) {
            *counts.entry(c).or_default() += 1;
        }
    }
    if counts.len() == 1 {
        counts.keys().next().map(|&k| k as usize)
    } else {
        None
    }
}
