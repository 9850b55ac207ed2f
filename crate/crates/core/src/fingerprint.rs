//! Deterministic model fingerprints: a necessary-condition battery standing
//! in for projective equivalence between construction routes.

use crate::error::{Error, Result};
use crate::geom::{self, Pt};
use crate::model::VarietyModel;
use crate::quadric::{hyperbolic_count, proj_space_count, QuadricShape};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Seed for the degree-sample component; fixed so that fingerprints of
/// independently built models are comparable.
const DEGREE_SAMPLE_SEED: u64 = 0x764c_6162;
const DEGREE_SAMPLE_SIZE: usize = 1000;

/// Models up to this size count X-lines exhaustively; larger models use the
/// per-Theta decomposition, which the all-1-lines census justifies.
const EXHAUSTIVE_LIMIT: usize = 35_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintRecord {
    pub q: u32,
    pub ambient_n: usize,
    pub x_count: usize,
    pub z_count: usize,
    pub params: (i64, i64, i64, i64),
    pub xi_count: usize,
    pub theta_count: usize,
    /// (shape, multiplicity), sorted
    pub shape_census: Vec<(QuadricShape, usize)>,
    pub x_line_count: u64,
    /// sorted collinearity degrees of a seeded X-point sample
    pub degree_sample: Vec<u32>,
}

pub fn fingerprint(m: &VarietyModel) -> Result<FingerprintRecord> {
    let mut census: BTreeMap<(i64, i64, i64, u8, usize), usize> = BTreeMap::new();
    for s in m.xi.iter().chain(&m.theta) {
        let k = (
            s.shape.base_rank,
            s.shape.vertex_dim,
            s.shape.ambient_dim,
            s.shape.kind as u8,
            s.shape.point_count,
        );
        *census.entry(k).or_default() += 1;
    }
    let shape_census: Vec<(QuadricShape, usize)> = {
        let mut v: Vec<(QuadricShape, usize)> = Vec::new();
        for s in m.xi.iter().chain(&m.theta) {
            if !v.iter().any(|(sh, _)| sh == &s.shape) {
                let k = (
                    s.shape.base_rank,
                    s.shape.vertex_dim,
                    s.shape.ambient_dim,
                    s.shape.kind as u8,
                    s.shape.point_count,
                );
                v.push((s.shape, census[&k]));
            }
        }
        v.sort_by_key(|(sh, _)| {
            (
                sh.base_rank,
                sh.vertex_dim,
                sh.ambient_dim,
                sh.kind as u8,
                sh.point_count,
            )
        });
        v
    };
    Ok(FingerprintRecord {
        q: m.field.q() as u32,
        ambient_n: m.n(),
        x_count: m.x.len(),
        z_count: m.z.len(),
        params: m.params.tuple(),
        xi_count: m.xi.len(),
        theta_count: m.theta.len(),
        shape_census,
        x_line_count: x_line_count(m)?,
        degree_sample: degree_sample(m),
    })
}

/// Lines entirely inside X. Exhaustive at desk scale; decomposed over Theta
/// on large models, where every X-line lies in exactly one Theta member.
pub fn x_line_count(m: &VarietyModel) -> Result<u64> {
    let f = &m.field;
    let q = f.q() as u64;
    if m.all.len() <= EXHAUSTIVE_LIMIT {
        let xs = m.x.as_slice();
        let pair_count: u64 = xs
            .par_iter()
            .enumerate()
            .map(|(i, &p)| {
                let mut c = 0u64;
                for &r in &xs[i + 1..] {
                    let line = geom::line_points(f, m.ambient, p, r);
                    if line.iter().all(|&t| m.x.contains(t)) {
                        c += 1;
                    }
                }
                c
            })
            .sum();
        let pairs_per_line = (q + 1) * q / 2;
        debug_assert_eq!(pair_count % pairs_per_line, 0);
        return Ok(pair_count / pairs_per_line);
    }
    // large models: count per Theta member with the closed form for a
    // vertexless hyperbolic cone minus one generator, verified by
    // enumeration on the first member
    let per_theta = x_lines_in_vertexless_theta(m)?;
    Ok(per_theta * m.theta.len() as u64)
}

fn gauss_lines(q: u64, n_coords: u64) -> u64 {
    // number of lines of P^{n_coords - 1}
    let num = (q.pow(n_coords as u32) - 1) * (q.pow(n_coords as u32 - 1) - 1);
    let den = (q * q - 1) * (q - 1);
    num / den
}

fn x_lines_in_vertexless_theta(m: &VarietyModel) -> Result<u64> {
    let f = &m.field;
    let q = f.q() as u64;
    let s = m
        .theta
        .first()
        .ok_or_else(|| Error::ShapeViolation("no Theta members".into()))?;
    for t in &m.theta {
        if t.shape != s.shape {
            return Err(Error::NonUniformShapes(
                "Theta shapes differ; no closed-form line count".into(),
            ));
        }
    }
    let rp = s.shape.base_rank;
    if s.shape.vertex_dim != -1 {
        return Err(Error::ShapeViolation(
            "closed-form X-line count needs vertexless Theta members".into(),
        ));
    }
    let quadric_pts = hyperbolic_count(q as usize, rp) as u64;
    let residue = hyperbolic_count(q as usize, rp - 1) as u64;
    let lines_q = quadric_pts * residue / (q + 1);
    let m_pts = proj_space_count(q as usize, rp) as u64;
    let lines_in_m = gauss_lines(q, rp as u64 + 1);
    let lines_thru_point_in_m = proj_space_count(q as usize, rp - 1) as u64;
    let meeting_m = m_pts * (residue - lines_thru_point_in_m) + lines_in_m;
    let formula = lines_q - meeting_m;
    // verify by enumeration on the first member
    let local: Vec<Pt> = {
        let pts = m.symp_points(s);
        pts.iter()
            .map(|&i| m.all.as_slice()[i as usize])
            .filter(|&p| m.x.contains(p))
            .collect()
    };
    let sorted = {
        let mut v = local.clone();
        v.sort_unstable();
        v
    };
    let pair_count: u64 = sorted
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut c = 0u64;
            for &r in &sorted[i + 1..] {
                let line = geom::line_points(f, m.ambient, p, r);
                if line.iter().all(|&t| sorted.binary_search(&t).is_ok()) {
                    c += 1;
                }
            }
            c
        })
        .sum();
    let pairs_per_line = (q + 1) * q / 2;
    let enumerated = pair_count / pairs_per_line;
    if enumerated != formula {
        return Err(Error::ShapeViolation(format!(
            "X-line closed form {formula} disagrees with enumeration {enumerated}"
        )));
    }
    Ok(formula)
}

/// Sorted collinearity degrees of a seeded X sample: the number of model
/// points on a singular line with the sampled point.
fn degree_sample(m: &VarietyModel) -> Vec<u32> {
    let xs = m.x.as_slice();
    let mut rng = ChaCha12Rng::seed_from_u64(DEGREE_SAMPLE_SEED);
    let picks: Vec<usize> = if xs.len() <= DEGREE_SAMPLE_SIZE {
        (0..xs.len()).collect()
    } else {
        (0..DEGREE_SAMPLE_SIZE)
            .map(|_| rng.gen_range(0..xs.len()))
            .collect()
    };
    let mut degs: Vec<u32> = picks
        .par_iter()
        .map(|&i| {
            let x = xs[i];
            m.all
                .iter()
                .filter(|&s| s != x && m.is_singular_line(x, s))
                .count() as u32
        })
        .collect();
    degs.sort_unstable();
    degs
}

/// Component-by-component comparison; the diff lists every differing field.
pub fn compare(a: &FingerprintRecord, b: &FingerprintRecord) -> (bool, Vec<String>) {
    let mut diffs = Vec::new();
    macro_rules! cmp {
        ($field:ident) => {
            if a.$field != b.$field {
                diffs.push(format!(
                    "{}: {:?} vs {:?}",
                    stringify!($field),
                    a.$field,
                    b.$field
                ));
            }
        };
    }
    cmp!(q);
    cmp!(ambient_n);
    cmp!(x_count);
    cmp!(z_count);
    cmp!(params);
    cmp!(xi_count);
    cmp!(theta_count);
    cmp!(shape_census);
    cmp!(x_line_count);
    cmp!(degree_sample);
    (diffs.is_empty(), diffs)
}
