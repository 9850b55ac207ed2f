//! Points, subspaces, spans, meets, and line enumeration in P^N(GF(q)).
//!
//! A projective point is stored packed in a `u128`, one nibble per
//! coordinate with coordinate 0 in the most significant nibble. Packed
//! values therefore sort in lexicographic coordinate order, which is the
//! order used by every on-disk point table. Points are kept canonical:
//! first nonzero coordinate equals 1.

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

pub const MAX_COORDS: usize = 28;

/// Canonically normalized projective point, packed.
pub type Pt = u128;

#[inline]
pub fn pack(coords: &[Fe]) -> Pt {
    debug_assert!(coords.len() <= MAX_COORDS);
    let mut v: u128 = 0;
    for (i, &c) in coords.iter().enumerate() {
        debug_assert!(c < 16);
        v |= (c as u128) << (124 - 4 * i);
    }
    v
}

#[inline]
pub fn unpack(p: Pt, n: usize, out: &mut [Fe]) {
    for (i, o) in out.iter_mut().enumerate().take(n) {
        *o = ((p >> (124 - 4 * i)) & 0xf) as Fe;
    }
}

pub fn unpack_vec(p: Pt, n: usize) -> Vec<Fe> {
    let mut v = vec![0; n];
    unpack(p, n, &mut v);
    v
}

/// Scales a coordinate vector in place so its first nonzero entry is 1.
/// Returns false for the zero vector.
pub fn canonicalize(f: &Field, coords: &mut [Fe]) -> bool {
    for i in 0..coords.len() {
        if coords[i] != 0 {
            if coords[i] != 1 {
                let s = f.inv_unchecked(coords[i]);
                for c in coords.iter_mut().skip(i) {
                    *c = f.mul(*c, s);
                }
            }
            return true;
        }
    }
    false
}

/// Packs a vector after canonical normalization; None for zero.
pub fn canonical_pt(f: &Field, coords: &mut [Fe]) -> Option<Pt> {
    if canonicalize(f, coords) {
        Some(pack(coords))
    } else {
        None
    }
}

/// a + lambda * b, coordinatewise.
pub fn add_scaled(f: &Field, a: &[Fe], b: &[Fe], lambda: Fe, out: &mut [Fe]) {
    for i in 0..a.len() {
        out[i] = f.add(a[i], f.mul(lambda, b[i]));
    }
}

/// All q+1 canonical points of the line through two distinct points.
pub fn line_points(f: &Field, n: usize, p: Pt, r: Pt) -> Vec<Pt> {
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    unpack(p, n, &mut a);
    unpack(r, n, &mut b);
    let mut out = Vec::with_capacity(f.q() as usize + 1);
    out.push(r);
    let mut buf = vec![0; n];
    for lam in f.elements() {
        add_scaled(f, &a, &b, lam, &mut buf);
        let mut c = buf.clone();
        if let Some(pt) = canonical_pt(f, &mut c) {
            out.push(pt);
        }
    }
    out
}

/// Sorted, deduplicated point table. Membership goes through a 16-bit
/// radix prefix index on large tables, keeping lookups at a handful of
/// probes; the prefix is the top four nibbles of the packed point.
#[derive(Clone, Debug, Default)]
pub struct PointSet {
    pts: Vec<Pt>,
    radix: Option<Vec<u32>>,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.pts == other.pts
    }
}
impl Eq for PointSet {}

const RADIX_THRESHOLD: usize = 4096;

fn build_radix(pts: &[Pt]) -> Vec<u32> {
    let mut idx = vec![0u32; (1 << 16) + 1];
    let mut cur = 0usize;
    for h in 0..(1 << 16) {
        while cur < pts.len() && (pts[cur] >> 112) < (h as u128 + 1) {
            cur += 1;
        }
        idx[h + 1] = cur as u32;
    }
    idx
}

impl PointSet {
    pub fn from_vec(mut pts: Vec<Pt>) -> Self {
        pts.sort_unstable();
        pts.dedup();
        Self::from_sorted(pts)
    }
    pub fn from_sorted(pts: Vec<Pt>) -> Self {
        debug_assert!(pts.windows(2).all(|w| w[0] < w[1]));
        let radix = if pts.len() >= RADIX_THRESHOLD {
            Some(build_radix(&pts))
        } else {
            None
        };
        PointSet { pts, radix }
    }
    #[inline]
    pub fn contains(&self, p: Pt) -> bool {
        self.index_of(p).is_some()
    }
    #[inline]
    pub fn index_of(&self, p: Pt) -> Option<usize> {
        match &self.radix {
            None => self.pts.binary_search(&p).ok(),
            Some(radix) => {
                let h = (p >> 112) as usize;
                let lo = radix[h] as usize;
                let hi = radix[h + 1] as usize;
                self.pts[lo..hi].binary_search(&p).ok().map(|i| lo + i)
            }
        }
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.pts.len()
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = Pt> + '_ {
        self.pts.iter().copied()
    }
    pub fn as_slice(&self) -> &[Pt] {
        &self.pts
    }
}

/// A projective subspace as a reduced row-echelon basis matrix. The empty
/// subspace has no rows and projective dimension -1. Representation is
/// unique per subspace, so equality of bases is equality of subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn empty(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Projective dimension (rows - 1; -1 when empty).
    pub fn dim(&self) -> i64 {
        self.rows.len() as i64 - 1
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Fe>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Inserts a vector, keeping reduced echelon form. Returns true if the
    /// rank grew.
    pub fn insert(&mut self, f: &Field, vec: &[Fe]) -> bool {
        debug_assert_eq!(vec.len(), self.ambient);
        let mut v = vec.to_vec();
        for (r, &pc) in self.rows.iter().zip(&self.pivots) {
            if v[pc] != 0 {
                let c = v[pc];
                for j in 0..self.ambient {
                    v[j] = f.sub(v[j], f.mul(c, r[j]));
                }
            }
        }
        let Some(pc) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        let s = f.inv_unchecked(v[pc]);
        for c in v.iter_mut() {
            *c = f.mul(*c, s);
        }
        // back-substitute into existing rows, then insert sorted by pivot
        for r in self.rows.iter_mut() {
            if r[pc] != 0 {
                let c = r[pc];
                for j in 0..self.ambient {
                    r[j] = f.sub(r[j], f.mul(c, v[j]));
                }
            }
        }
        let at = self
            .pivots
            .iter()
            .position(|&p| p > pc)
            .unwrap_or(self.pivots.len());
        self.rows.insert(at, v);
        self.pivots.insert(at, pc);
        true
    }

    /// True iff the vector lies in the row space.
    pub fn contains_vec(&self, f: &Field, vec: &[Fe]) -> bool {
        let mut v = vec.to_vec();
        for (r, &pc) in self.rows.iter().zip(&self.pivots) {
            if v[pc] != 0 {
                let c = v[pc];
                for j in 0..self.ambient {
                    v[j] = f.sub(v[j], f.mul(c, r[j]));
                }
            }
        }
        v.iter().all(|&c| c == 0)
    }

    pub fn contains_pt(&self, f: &Field, p: Pt) -> bool {
        let v = unpack_vec(p, self.ambient);
        self.contains_vec(f, &v)
    }

    pub fn contains_subspace(&self, f: &Field, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains_vec(f, r))
    }

    /// All canonical points of the subspace: (q^rank - 1)/(q - 1) of them.
    /// Guarded by a point budget.
    pub fn points(&self, f: &Field, budget: usize) -> Result<Vec<Pt>> {
        let q = f.q() as usize;
        let k = self.rank();
        if k == 0 {
            return Ok(Vec::new());
        }
        let count = (q.pow(k as u32) - 1) / (q - 1);
        if count > budget {
            return Err(Error::BudgetExceeded(format!(
                "subspace enumeration of {count} points exceeds budget {budget}"
            )));
        }
        // canonical combinations: leading coefficient 1 on the first row used
        let mut out = Vec::with_capacity(count);
        let mut buf = vec![0; self.ambient];
        let mut combo = vec![0u8; k];
        for lead in 0..k {
            // coefficient on row `lead` is 1, earlier rows 0, later rows free
            let free = k - lead - 1;
            let total = q.pow(free as u32);
            for mut idx in 0..total {
                combo.iter_mut().for_each(|c| *c = 0);
                combo[lead] = 1;
                for slot in combo.iter_mut().skip(lead + 1) {
                    *slot = (idx % q) as u8;
                    idx /= q;
                }
                for j in 0..self.ambient {
                    let mut acc = 0;
                    for (r, &co) in self.rows.iter().zip(&combo) {
                        if co != 0 {
                            acc = f.add(acc, f.mul(co, r[j]));
                        }
                    }
                    buf[j] = acc;
                }
                out.push(pack(&buf));
            }
        }
        debug_assert_eq!(out.len(), count);
        Ok(out)
    }

    pub fn point_count(&self, f: &Field) -> usize {
        let q = f.q() as usize;
        let k = self.rank();
        if k == 0 {
            0
        } else {
            (q.pow(k as u32) - 1) / (q - 1)
        }
    }
}

/// Span of points and subspaces, all in one ambient.
pub fn span(f: &Field, ambient: usize, pts: &[Pt], subspaces: &[&Subspace]) -> Result<Subspace> {
    let mut s = Subspace::empty(ambient);
    let mut buf = vec![0; ambient];
    for &p in pts {
        unpack(p, ambient, &mut buf);
        s.insert(f, &buf);
    }
    for sub in subspaces {
        if sub.ambient != ambient {
            return Err(Error::AmbientMismatch(sub.ambient, ambient));
        }
        for r in &sub.rows {
            s.insert(f, r);
        }
    }
    Ok(s)
}

pub fn span_of_points(f: &Field, ambient: usize, pts: &[Pt]) -> Subspace {
    span(f, ambient, pts, &[]).expect("no subspaces passed")
}

/// Intersection of two subspaces, via the kernel of the stacked basis.
pub fn meet(f: &Field, a: &Subspace, b: &Subspace) -> Result<Subspace> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch(a.ambient, b.ambient));
    }
    let n = a.ambient;
    let ra = a.rank();
    let rb = b.rank();
    if ra == 0 || rb == 0 {
        return Ok(Subspace::empty(n));
    }
    // Solve x*A = y*B by row reducing [A; B] with bookkeeping of the A-part
    // coefficients; kernel combinations give the intersection.
    let m = ra + rb;
    let mut mat: Vec<Vec<Fe>> = Vec::with_capacity(m);
    for r in &a.rows {
        let mut row = r.clone();
        let mut tag = vec![0; ra];
        tag[mat.len()] = 1;
        row.extend_from_slice(&tag);
        mat.push(row);
    }
    for r in &b.rows {
        let mut row = r.clone();
        row.extend_from_slice(&vec![0; ra]);
        mat.push(row);
    }
    // eliminate on the first n columns
    let mut out = Subspace::empty(n);
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut used = vec![false; m];
    for col in 0..n {
        let Some(pr) = (0..m).find(|&r| !used[r] && mat[r][col] != 0) else {
            continue;
        };
        used[pr] = true;
        pivot_rows.push(pr);
        let inv = f.inv_unchecked(mat[pr][col]);
        for j in 0..n + ra {
            mat[pr][j] = f.mul(mat[pr][j], inv);
        }
        for r in 0..m {
            if r != pr && mat[r][col] != 0 {
                let c = mat[r][col];
                for j in 0..n + ra {
                    mat[r][j] = f.sub(mat[r][j], f.mul(c, mat[pr][j]));
                }
            }
        }
    }
    for r in 0..m {
        if !used[r] && mat[r][..n].iter().all(|&c| c == 0) {
            // kernel row: its A-part coefficients give an intersection vector
            let coeffs = &mat[r][n..];
            let mut vecv = vec![0; n];
            for (i, arow) in a.rows.iter().enumerate() {
                if coeffs[i] != 0 {
                    for j in 0..n {
                        vecv[j] = f.add(vecv[j], f.mul(coeffs[i], arow[j]));
                    }
                }
            }
            if vecv.iter().any(|&c| c != 0) {
                out.insert(f, &vecv);
            }
        }
    }
    Ok(out)
}

/// True iff every point of the line through p and r lies in `set_or_y`.
/// `set_or_y` abstracts membership in X union the points of Y.
#[inline]
pub fn is_singular_line<M: Fn(Pt) -> bool>(
    f: &Field,
    n: usize,
    p: Pt,
    r: Pt,
    set_or_y: M,
) -> bool {
    debug_assert_ne!(p, r);
    let mut a = [0 as Fe; MAX_COORDS];
    let mut b = [0 as Fe; MAX_COORDS];
    unpack(p, n, &mut a);
    unpack(r, n, &mut b);
    // p and r themselves are assumed to be in the set; check the rest
    for lam in 1..f.q() {
        let pt = combine_canonical(f, n, &a, &b, lam).expect("independent points");
        if !set_or_y(pt) {
            return false;
        }
    }
    true
}

/// Canonical packed point of a + lambda b, combining, normalizing and
/// packing in one pass without allocation. None for the zero vector.
#[inline]
pub fn combine_canonical(
    f: &Field,
    n: usize,
    a: &[Fe; MAX_COORDS],
    b: &[Fe; MAX_COORDS],
    lambda: Fe,
) -> Option<Pt> {
    let mut first_nonzero = usize::MAX;
    let mut buf = [0 as Fe; MAX_COORDS];
    for i in 0..n {
        let c = f.add(a[i], f.mul(lambda, b[i]));
        buf[i] = c;
        if c != 0 && first_nonzero == usize::MAX {
            first_nonzero = i;
        }
    }
    if first_nonzero == usize::MAX {
        return None;
    }
    let lead = buf[first_nonzero];
    let mut v: u128 = 0;
    if lead == 1 {
        for i in first_nonzero..n {
            v |= (buf[i] as u128) << (124 - 4 * i);
        }
    } else {
        let s = f.inv_unchecked(lead);
        for i in first_nonzero..n {
            v |= (f.mul(buf[i], s) as u128) << (124 - 4 * i);
        }
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf_make;

    #[test]
    fn pack_orders_lexicographically() {
        let a = pack(&[0, 1, 2]);
        let b = pack(&[1, 0, 0]);
        let c = pack(&[1, 0, 1]);
        assert!(a < b && b < c);
        assert_eq!(unpack_vec(c, 3), vec![1, 0, 1]);
    }

    #[test]
    fn span_of_two_points_is_a_line() {
        let f = gf_make(3).unwrap();
        let p = pack(&[1, 0, 0]);
        let r = pack(&[0, 1, 0]);
        let s = span_of_points(&f, 3, &[p, r]);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.point_count(&f), 4);
    }

    #[test]
    fn empty_span_has_dim_minus_one() {
        let f = gf_make(3).unwrap();
        let s = span_of_points(&f, 4, &[]);
        assert_eq!(s.dim(), -1);
        assert!(s.points(&f, 10).unwrap().is_empty());
    }

    #[test]
    fn plane_re_spans_itself() {
        // the 13 points of a plane in P^4(GF(3)) span that plane again
        let f = gf_make(5).unwrap_or_else(|_| unreachable!());
        let f3 = gf_make(3).unwrap();
        drop(f);
        let mut plane = Subspace::empty(5);
        plane.insert(&f3, &[1, 0, 0, 2, 1]);
        plane.insert(&f3, &[0, 1, 0, 1, 1]);
        plane.insert(&f3, &[0, 0, 1, 0, 2]);
        let pts = plane.points(&f3, 100).unwrap();
        assert_eq!(pts.len(), 13);
        let re = span_of_points(&f3, 5, &pts);
        assert_eq!(re, plane);
    }

    #[test]
    fn meet_of_hyperplanes_in_p3_is_a_line() {
        let f = gf_make(3).unwrap();
        let mut h1 = Subspace::empty(4);
        h1.insert(&f, &[1, 0, 0, 0]);
        h1.insert(&f, &[0, 1, 0, 0]);
        h1.insert(&f, &[0, 0, 1, 0]);
        let mut h2 = Subspace::empty(4);
        h2.insert(&f, &[0, 1, 0, 0]);
        h2.insert(&f, &[0, 0, 1, 0]);
        h2.insert(&f, &[0, 0, 0, 1]);
        let m = meet(&f, &h1, &h2).unwrap();
        assert_eq!(m.dim(), 1);
        // idempotence
        let mm = meet(&f, &h1, &h1).unwrap();
        assert_eq!(mm, h1);
    }

    #[test]
    fn skew_lines_meet_empty() {
        let f = gf_make(3).unwrap();
        let l1 = span_of_points(&f, 4, &[pack(&[1, 0, 0, 0]), pack(&[0, 1, 0, 0])]);
        let l2 = span_of_points(&f, 4, &[pack(&[0, 0, 1, 0]), pack(&[0, 0, 0, 1])]);
        let m = meet(&f, &l1, &l2).unwrap();
        assert_eq!(m.dim(), -1);
    }

    #[test]
    fn line_over_gf4_has_five_points() {
        let f = gf_make(4).unwrap();
        let l = span_of_points(&f, 2, &[pack(&[1, 0]), pack(&[0, 1])]);
        assert_eq!(l.points(&f, 100).unwrap().len(), 5);
    }

    #[test]
    fn modular_dimension_law_random_pairs() {
        use rand::{Rng, SeedableRng};
        let f = gf_make(3).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for ambient in [4usize, 8, 12, 16, 20] {
            for _ in 0..50 {
                let mk = |rng: &mut rand_chacha::ChaCha12Rng| {
                    let rows = rng.gen_range(0..=ambient.min(5));
                    let mut s = Subspace::empty(ambient);
                    for _ in 0..rows {
                        let v: Vec<Fe> = (0..ambient).map(|_| rng.gen_range(0..3)).collect();
                        s.insert(&f, &v);
                    }
                    s
                };
                let a = mk(&mut rng);
                let b = mk(&mut rng);
                let j = span(&f, ambient, &[], &[&a, &b]).unwrap();
                let m = meet(&f, &a, &b).unwrap();
                assert_eq!(m.dim(), a.dim() + b.dim() - j.dim());
                assert!(a.contains_subspace(&f, &m));
                assert!(b.contains_subspace(&f, &m));
            }
        }
    }
}
