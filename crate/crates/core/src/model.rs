//! The (X, Z, Xi, Theta) variety model, its invariants and its JSON schema.

use crate::error::{Error, Result};
use crate::field::{gf_make, Fe, Field};
use crate::geom::{self, PointSet, Pt, Subspace};
use crate::quadric::QuadricShape;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "vlab-model/1";

/// Parameter record: (r, v) for mono-symplectic models, (r, v, r', v')
/// when Theta is non-empty. d and d' are derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Params {
    Mono { r: i64, v: i64 },
    Duo { r: i64, v: i64, rp: i64, vp: i64 },
}

impl Params {
    pub fn d(&self) -> i64 {
        match self {
            Params::Mono { r, v } | Params::Duo { r, v, .. } => 2 * r + v + 1,
        }
    }
    pub fn d_prime(&self) -> Option<i64> {
        match self {
            Params::Mono { .. } => None,
            Params::Duo { rp, vp, .. } => Some(2 * rp + vp + 1),
        }
    }
    pub fn tuple(&self) -> (i64, i64, i64, i64) {
        match *self {
            Params::Mono { r, v } => (r, v, -1, -1),
            Params::Duo { r, v, rp, vp } => (r, v, rp, vp),
        }
    }
    pub fn is_mono(&self) -> bool {
        matches!(self, Params::Mono { .. })
    }
}

/// One extracted symp: its span, vertex, intersection with Y, shape, and
/// the model points it contains. Point lists are materialized for models at
/// desk scale and regenerable from the span otherwise.
#[derive(Clone, Debug)]
pub struct Symp {
    pub span: Subspace,
    pub vertex: Subspace,
    pub y_meet: Subspace,
    pub shape: QuadricShape,
    /// indices into the sorted global point table (X followed by Z, merged)
    pub points: Option<Vec<u32>>,
    pub point_count: u32,
    /// count of (X u Y)-points of the symp, vertex and generator included
    pub xy_count: u32,
}

/// Construction route metadata.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub route: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure_effective_iterations: Option<u32>,
    /// distinguished planes for the dual Segre layout
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z1_basis: Option<Vec<Vec<Fe>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z2_basis: Option<Vec<Vec<Fe>>>,
    /// duality matrices used by the dual constructions
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub dualities: Vec<DualityRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityRecord {
    pub name: String,
    pub matrix: Vec<Vec<Fe>>,
}

/// A full model: point sets, distinguished subspaces, symp families and
/// parameters. Everything is immutable after construction.
#[derive(Clone, Debug)]
pub struct VarietyModel {
    pub field: Field,
    /// number of coordinates; ambient projective dimension is this minus 1
    pub ambient: usize,
    pub x: PointSet,
    pub z: PointSet,
    /// sorted union of x and z; symp point indices refer to this table
    pub all: PointSet,
    pub y: Subspace,
    pub f_space: Subspace,
    pub y_points: PointSet,
    pub xi: Vec<Symp>,
    pub theta: Vec<Symp>,
    pub params: Params,
    pub provenance: Provenance,
}

impl VarietyModel {
    pub fn n(&self) -> usize {
        self.ambient - 1
    }

    /// Membership in X u Y (the set defining singular subspaces).
    #[inline]
    pub fn in_xy(&self, p: Pt) -> bool {
        self.y_points.contains(p) || self.x.contains(p)
    }

    /// Membership in the model point set X u Z.
    #[inline]
    pub fn in_model(&self, p: Pt) -> bool {
        self.all.contains(p)
    }

    /// True iff the full line through two distinct points lies in X u Y.
    pub fn is_singular_line(&self, p: Pt, r: Pt) -> bool {
        geom::is_singular_line(&self.field, self.ambient, p, r, |t| self.in_xy(t))
    }

    /// Collinearity of two model points.
    pub fn collinear(&self, p: Pt, r: Pt) -> bool {
        p != r && self.is_singular_line(p, r)
    }

    /// Model points inside a subspace, by global index.
    pub fn model_points_in(&self, s: &Subspace) -> Vec<u32> {
        let budget = 4_000_000;
        let pts = s.points(&self.field, budget).expect("symp span enumeration");
        let mut out: Vec<u32> = pts
            .into_iter()
            .filter_map(|p| self.all.index_of(p).map(|i| i as u32))
            .collect();
        out.sort_unstable();
        out
    }

    /// (X u Y)-points inside a subspace.
    pub fn xy_points_in(&self, s: &Subspace) -> Vec<Pt> {
        let budget = 4_000_000;
        let pts = s.points(&self.field, budget).expect("symp span enumeration");
        pts.into_iter().filter(|&p| self.in_xy(p)).collect()
    }

    pub fn symp_points(&self, symp: &Symp) -> Vec<u32> {
        match &symp.points {
            Some(v) => v.clone(),
            None => self.model_points_in(&symp.span),
        }
    }

    /// Re-derives the counts that summaries report; used by strict loads.
    pub fn recount(&self) -> Result<()> {
        for (name, fam) in [("xi", &self.xi), ("theta", &self.theta)] {
            for (i, s) in fam.iter().enumerate() {
                let pts = self.symp_points(s);
                if pts.len() as u32 != s.point_count {
                    return Err(Error::SchemaError(format!(
                        "{name}[{i}] point count mismatch: stored {}, recomputed {}",
                        s.point_count,
                        pts.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FieldJson {
    q: u32,
    p: u8,
    k: u8,
    poly: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct SympJson {
    basis: Vec<Vec<Fe>>,
    vertex: Vec<Vec<Fe>>,
    y_meet: Vec<Vec<Fe>>,
    shape: QuadricShape,
    point_count: u32,
    xy_count: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    schema: String,
    field: FieldJson,
    ambient_coords: usize,
    params: Params,
    provenance: Provenance,
    x: Vec<Vec<Fe>>,
    z: Vec<Vec<Fe>>,
    y_basis: Vec<Vec<Fe>>,
    f_basis: Vec<Vec<Fe>>,
    xi: Vec<SympJson>,
    theta: Vec<SympJson>,
}

fn subspace_to_rows(s: &Subspace) -> Vec<Vec<Fe>> {
    s.rows().to_vec()
}

fn subspace_from_rows(f: &Field, ambient: usize, rows: &[Vec<Fe>]) -> Result<Subspace> {
    let mut s = Subspace::empty(ambient);
    for r in rows {
        if r.len() != ambient {
            return Err(Error::SchemaError("basis row length mismatch".into()));
        }
        s.insert(f, r);
    }
    if s.rank() != rows.len() {
        return Err(Error::SchemaError("basis rows are dependent".into()));
    }
    Ok(s)
}

fn symp_to_json(s: &Symp) -> SympJson {
    SympJson {
        basis: subspace_to_rows(&s.span),
        vertex: subspace_to_rows(&s.vertex),
        y_meet: subspace_to_rows(&s.y_meet),
        shape: s.shape,
        point_count: s.point_count,
        xy_count: s.xy_count,
        points: s.points.clone(),
    }
}

fn symp_from_json(f: &Field, ambient: usize, j: &SympJson) -> Result<Symp> {
    Ok(Symp {
        span: subspace_from_rows(f, ambient, &j.basis)?,
        vertex: subspace_from_rows(f, ambient, &j.vertex)?,
        y_meet: subspace_from_rows(f, ambient, &j.y_meet)?,
        shape: j.shape,
        points: j.points.clone(),
        point_count: j.point_count,
        xy_count: j.xy_count,
    })
}

pub fn to_json(m: &VarietyModel) -> ModelJsonOwned {
    let n = m.ambient;
    let unpackv = |ps: &PointSet| -> Vec<Vec<Fe>> {
        ps.iter().map(|p| geom::unpack_vec(p, n)).collect()
    };
    ModelJsonOwned(ModelJson {
        schema: SCHEMA.to_string(),
        field: FieldJson {
            q: m.field.q() as u32,
            p: m.field.p(),
            k: m.field.k(),
            poly: m.field.poly().to_vec(),
        },
        ambient_coords: m.ambient,
        params: m.params,
        provenance: m.provenance.clone(),
        x: unpackv(&m.x),
        z: unpackv(&m.z),
        y_basis: subspace_to_rows(&m.y),
        f_basis: subspace_to_rows(&m.f_space),
        xi: m.xi.iter().map(symp_to_json).collect(),
        theta: m.theta.iter().map(symp_to_json).collect(),
    })
}

/// Opaque serializable form of a model.
pub struct ModelJsonOwned(ModelJson);

impl ModelJsonOwned {
    pub fn write_to(&self, w: impl std::io::Write) -> Result<()> {
        serde_json::to_writer(w, &self.0)?;
        Ok(())
    }
}

pub fn save(m: &VarietyModel, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut buf = std::io::BufWriter::new(file);
    to_json(m).write_to(&mut buf)?;
    use std::io::Write;
    buf.flush()?;
    Ok(())
}

pub fn load(path: &std::path::Path) -> Result<VarietyModel> {
    let file = std::fs::File::open(path)?;
    let j: ModelJson = serde_json::from_reader(std::io::BufReader::new(file))?;
    from_json(j)
}

fn from_json(j: ModelJson) -> Result<VarietyModel> {
    if j.schema != SCHEMA {
        return Err(Error::SchemaError(format!(
            "unsupported schema {:?}",
            j.schema
        )));
    }
    let field = gf_make(j.field.q)?;
    if field.p() != j.field.p || field.k() != j.field.k || field.poly() != &j.field.poly[..] {
        return Err(Error::SchemaError(
            "field description does not match the fixed construction".into(),
        ));
    }
    let n = j.ambient_coords;
    if n > geom::MAX_COORDS {
        return Err(Error::SchemaError("ambient too large".into()));
    }
    let packv = |rows: &[Vec<Fe>]| -> Result<PointSet> {
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != n {
                return Err(Error::SchemaError("point coordinate length mismatch".into()));
            }
            out.push(geom::pack(r));
        }
        let ps = PointSet::from_vec(out);
        if ps.len() != rows.len() {
            return Err(Error::SchemaError("duplicate points in table".into()));
        }
        Ok(ps)
    };
    let x = packv(&j.x)?;
    let z = packv(&j.z)?;
    let mut all: Vec<Pt> = x.iter().chain(z.iter()).collect();
    all.sort_unstable();
    let all = PointSet::from_sorted(all);
    let y = subspace_from_rows(&field, n, &j.y_basis)?;
    let f_space = subspace_from_rows(&field, n, &j.f_basis)?;
    let y_points = PointSet::from_vec(y.points(&field, 4_000_000)?);
    let xi = j
        .xi
        .iter()
        .map(|s| symp_from_json(&field, n, s))
        .collect::<Result<Vec<_>>>()?;
    let theta = j
        .theta
        .iter()
        .map(|s| symp_from_json(&field, n, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(VarietyModel {
        field,
        ambient: n,
        x,
        z,
        all,
        y,
        f_space,
        y_points,
        xi,
        theta,
        params: j.params,
        provenance: j.provenance,
    })
}

/// Assembles the derived tables (all, y_points) for a freshly built model.
pub fn assemble(
    field: Field,
    ambient: usize,
    x: PointSet,
    z: PointSet,
    y: Subspace,
    f_space: Subspace,
    xi: Vec<Symp>,
    theta: Vec<Symp>,
    params: Params,
    provenance: Provenance,
) -> VarietyModel {
    let mut all: Vec<Pt> = x.iter().chain(z.iter()).collect();
    all.sort_unstable();
    let all = PointSet::from_sorted(all);
    let y_points = PointSet::from_vec(y.points(&field, 4_000_000).expect("Y enumeration"));
    VarietyModel {
        field,
        ambient,
        x,
        z,
        all,
        y,
        f_space,
        y_points,
        xi,
        theta,
        params,
        provenance,
    }
}
