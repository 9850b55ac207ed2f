//! Quadratic alternative K-algebras with involution.
//!
//! Every algebra of dimension >= 2 is realized as a coordinate subalgebra of
//! the split octonions written as Zorn vector-matrices M(a,b,c,d,x,y,z,u),
//! with vector parts v = (b,x,y) and w = (c,z,u) and product
//!
//! ```text
//! (a, v; w, d)(a', v'; w', d') =
//!     (aa' + v.w',  a v' + d' v + w x w';  a' w + d w' - v x v',  dd' + v'.w)
//! ```
//!
//! The scalar kind uses the diagonal a = d. Doubling an algebra with a
//! primitive element zeta produces the pair algebra with product
//! (a,b)(c,d) = (ac + zeta*conj(d)conj(b), conj(a)d + cb), which is where the
//! degenerate (zeta = 0) kinds come from.

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::geom::Subspace;

/// Zorn coordinate slots, in storage order.
const SLOT_A: usize = 0;
const SLOT_B: usize = 1;
const SLOT_C: usize = 2;
const SLOT_D: usize = 3;
const SLOT_X: usize = 4;
const SLOT_Y: usize = 5;
const SLOT_Z: usize = 6;
const SLOT_U: usize = 7;

/// Multiplies two Zorn vector-matrices given as 8-coordinate slices.
pub fn zorn_mul(f: &Field, l: &[Fe; 8], r: &[Fe; 8]) -> [Fe; 8] {
    let v1 = [l[SLOT_B], l[SLOT_X], l[SLOT_Y]];
    let w1 = [l[SLOT_C], l[SLOT_Z], l[SLOT_U]];
    let v2 = [r[SLOT_B], r[SLOT_X], r[SLOT_Y]];
    let w2 = [r[SLOT_C], r[SLOT_Z], r[SLOT_U]];
    let dot = |p: &[Fe; 3], q: &[Fe; 3]| {
        f.add(f.add(f.mul(p[0], q[0]), f.mul(p[1], q[1])), f.mul(p[2], q[2]))
    };
    let cross = |p: &[Fe; 3], q: &[Fe; 3]| {
        [
            f.sub(f.mul(p[1], q[2]), f.mul(p[2], q[1])),
            f.sub(f.mul(p[2], q[0]), f.mul(p[0], q[2])),
            f.sub(f.mul(p[0], q[1]), f.mul(p[1], q[0])),
        ]
    };
    let ww = cross(&w1, &w2);
    let vv = cross(&v1, &v2);
    let mut out = [0; 8];
    out[SLOT_A] = f.add(f.mul(l[SLOT_A], r[SLOT_A]), dot(&v1, &w2));
    out[SLOT_D] = f.add(f.mul(l[SLOT_D], r[SLOT_D]), dot(&v2, &w1));
    // v-part: a v' + d' v + w x w'
    for (i, slot) in [SLOT_B, SLOT_X, SLOT_Y].into_iter().enumerate() {
        out[slot] = f.add(
            f.add(f.mul(l[SLOT_A], v2[i]), f.mul(r[SLOT_D], v1[i])),
            ww[i],
        );
    }
    // w-part: a' w + d w' - v x v'
    for (i, slot) in [SLOT_C, SLOT_Z, SLOT_U].into_iter().enumerate() {
        out[slot] = f.sub(
            f.add(f.mul(r[SLOT_A], w1[i]), f.mul(l[SLOT_D], w2[i])),
            vv[i],
        );
    }
    out
}

/// Conjugate in the Zorn frame: swap the diagonal, negate the vectors.
pub fn zorn_conj(f: &Field, m: &[Fe; 8]) -> [Fe; 8] {
    [
        m[SLOT_D],
        f.neg(m[SLOT_B]),
        f.neg(m[SLOT_C]),
        m[SLOT_A],
        f.neg(m[SLOT_X]),
        f.neg(m[SLOT_Y]),
        f.neg(m[SLOT_Z]),
        f.neg(m[SLOT_U]),
    ]
}

/// Named algebra kinds. The split kinds of dimension 1, 2, 4, 8 plus the
/// three level-1 degenerate subalgebras of the split octonions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    K,
    Lp,
    Hp,
    Op,
    Ternions,
    Hpp,
    Sextonions,
    Cd(Box<Kind>, Fe),
    Sub(String),
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::K => write!(f, "K"),
            Kind::Lp => write!(f, "Lp"),
            Kind::Hp => write!(f, "Hp"),
            Kind::Op => write!(f, "Op"),
            Kind::Ternions => write!(f, "Ternions"),
            Kind::Hpp => write!(f, "Hpp"),
            Kind::Sextonions => write!(f, "Sextonions"),
            Kind::Cd(b, z) => write!(f, "CD({b},{z})"),
            Kind::Sub(s) => write!(f, "Sub({s})"),
        }
    }
}

/// Which Zorn slots carry a named kind. `K` uses the diagonal a = d.
fn zorn_slots(kind: &Kind) -> Option<&'static [usize]> {
    match kind {
        Kind::K => Some(&[]),
        Kind::Lp => Some(&[SLOT_A, SLOT_D]),
        Kind::Hp => Some(&[SLOT_A, SLOT_B, SLOT_C, SLOT_D]),
        Kind::Ternions => Some(&[SLOT_A, SLOT_D, SLOT_Y]),
        Kind::Hpp => Some(&[SLOT_A, SLOT_D, SLOT_Y, SLOT_Z]),
        Kind::Sextonions => Some(&[SLOT_A, SLOT_B, SLOT_C, SLOT_D, SLOT_Y, SLOT_Z]),
        Kind::Op => Some(&[SLOT_A, SLOT_B, SLOT_C, SLOT_D, SLOT_X, SLOT_Y, SLOT_Z, SLOT_U]),
        _ => None,
    }
}

/// Element of an algebra: coordinates in the algebra's basis.
pub type AlgElem = Vec<Fe>;

/// A unital algebra over GF(q), given by basis products, unit coordinates
/// and the involution matrix. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub field: Field,
    pub kind: Kind,
    pub dim: usize,
    /// basis_products[i * dim + j] = e_i * e_j in basis coordinates
    products: Vec<AlgElem>,
    pub unit: AlgElem,
    /// conj(e_i) in basis coordinates
    conj_rows: Vec<AlgElem>,
    /// embedding of the basis into the Zorn frame, when one exists
    embed: Option<Vec<[Fe; 8]>>,
    unit_pivot: usize,
}

impl Algebra {
    fn from_products(
        field: Field,
        kind: Kind,
        products: Vec<AlgElem>,
        unit: AlgElem,
        conj_rows: Vec<AlgElem>,
        embed: Option<Vec<[Fe; 8]>>,
    ) -> Self {
        let dim = unit.len();
        let unit_pivot = unit.iter().position(|&c| c != 0).expect("unit is nonzero");
        Algebra {
            field,
            kind,
            dim,
            products,
            unit,
            conj_rows,
            embed,
            unit_pivot,
        }
    }

    #[inline]
    pub fn product_of_basis(&self, i: usize, j: usize) -> &AlgElem {
        &self.products[i * self.dim + j]
    }

    pub fn zorn_embedding(&self) -> Option<&[[Fe; 8]]> {
        self.embed.as_deref()
    }

    pub fn embed_to_zorn(&self, x: &[Fe]) -> Option<[Fe; 8]> {
        let emb = self.embed.as_ref()?;
        let f = &self.field;
        let mut out = [0; 8];
        for (xi, row) in x.iter().zip(emb) {
            if *xi != 0 {
                for s in 0..8 {
                    out[s] = f.add(out[s], f.mul(*xi, row[s]));
                }
            }
        }
        Some(out)
    }

    pub fn zero(&self) -> AlgElem {
        vec![0; self.dim]
    }

    /// Element with coordinate index `idx` interpreted base-q.
    pub fn elem_from_index(&self, mut idx: usize) -> AlgElem {
        let q = self.field.q() as usize;
        let mut e = vec![0; self.dim];
        for c in e.iter_mut() {
            *c = (idx % q) as Fe;
            idx /= q;
        }
        e
    }

    pub fn element_count(&self) -> usize {
        (self.field.q() as usize).pow(self.dim as u32)
    }

    pub fn mul(&self, x: &[Fe], y: &[Fe]) -> Result<AlgElem> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: if x.len() != self.dim { x.len() } else { y.len() },
            });
        }
        Ok(self.mul_unchecked(x, y))
    }

    pub fn mul_unchecked(&self, x: &[Fe], y: &[Fe]) -> AlgElem {
        let f = &self.field;
        let mut out = vec![0; self.dim];
        for i in 0..self.dim {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.dim {
                if y[j] == 0 {
                    continue;
                }
                let c = f.mul(x[i], y[j]);
                let prod = self.product_of_basis(i, j);
                for (o, &p) in out.iter_mut().zip(prod) {
                    if p != 0 {
                        *o = f.add(*o, f.mul(c, p));
                    }
                }
            }
        }
        out
    }

    pub fn conj(&self, x: &[Fe]) -> AlgElem {
        let f = &self.field;
        let mut out = vec![0; self.dim];
        for i in 0..self.dim {
            if x[i] != 0 {
                for (o, &c) in out.iter_mut().zip(&self.conj_rows[i]) {
                    if c != 0 {
                        *o = f.add(*o, f.mul(x[i], c));
                    }
                }
            }
        }
        out
    }

    /// Reads a scalar multiple of the unit. Panics in debug if not one.
    fn scalar_of(&self, v: &[Fe]) -> Fe {
        let f = &self.field;
        let lam = f.mul(v[self.unit_pivot], f.inv_unchecked(self.unit[self.unit_pivot]));
        debug_assert!(
            (0..self.dim).all(|i| v[i] == f.mul(lam, self.unit[i])),
            "value is not a scalar multiple of the unit: {v:?}"
        );
        lam
    }

    pub fn trace(&self, x: &[Fe]) -> Fe {
        let f = &self.field;
        let xb = self.conj(x);
        let mut s = vec![0; self.dim];
        for i in 0..self.dim {
            s[i] = f.add(x[i], xb[i]);
        }
        self.scalar_of(&s)
    }

    pub fn norm(&self, x: &[Fe]) -> Fe {
        let xb = self.conj(x);
        let p = self.mul_unchecked(x, &xb);
        self.scalar_of(&p)
    }

    /// Bilinearization of the norm: f(x, y) = N(x+y) - N(x) - N(y).
    pub fn norm_bilinear(&self, x: &[Fe], y: &[Fe]) -> Fe {
        let f = &self.field;
        let yb = self.conj(y);
        let xb = self.conj(x);
        let a = self.mul_unchecked(x, &yb);
        let b = self.mul_unchecked(y, &xb);
        let mut s = vec![0; self.dim];
        for i in 0..self.dim {
            s[i] = f.add(a[i], b[i]);
        }
        self.scalar_of(&s)
    }

    /// (conj, trace, norm) of one element.
    pub fn involution_data(&self, x: &[Fe]) -> Result<(AlgElem, Fe, Fe)> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok((self.conj(x), self.trace(x), self.norm(x)))
    }

    pub fn is_unit_like(&self, x: &[Fe]) -> bool {
        x == self.unit.as_slice()
    }

    pub fn add(&self, x: &[Fe], y: &[Fe]) -> AlgElem {
        let f = &self.field;
        x.iter().zip(y).map(|(&a, &b)| f.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[Fe], y: &[Fe]) -> AlgElem {
        let f = &self.field;
        x.iter().zip(y).map(|(&a, &b)| f.sub(a, b)).collect()
    }

    pub fn scale(&self, lam: Fe, x: &[Fe]) -> AlgElem {
        let f = &self.field;
        x.iter().map(|&a| f.mul(lam, a)).collect()
    }

    fn associator(&self, x: &[Fe], y: &[Fe], z: &[Fe]) -> AlgElem {
        let lhs = self.mul_unchecked(&self.mul_unchecked(x, y), z);
        let rhs = self.mul_unchecked(x, &self.mul_unchecked(y, z));
        self.sub(&lhs, &rhs)
    }

    /// Structural sanity: unit law and anti-automorphism on basis vectors
    /// (exact by bilinearity), quadratic law over all elements.
    pub fn verify(&self) -> Result<()> {
        let f = &self.field;
        let basis: Vec<AlgElem> = (0..self.dim)
            .map(|i| {
                let mut e = self.zero();
                e[i] = 1;
                e
            })
            .collect();
        for e in &basis {
            if self.mul_unchecked(&self.unit, e) != *e || self.mul_unchecked(e, &self.unit) != *e {
                return Err(Error::ShapeViolation(format!(
                    "unit law fails in {}",
                    self.kind
                )));
            }
        }
        for x in &basis {
            for y in &basis {
                let l = self.conj(&self.mul_unchecked(x, y));
                let r = self.mul_unchecked(&self.conj(y), &self.conj(x));
                if l != r {
                    return Err(Error::ShapeViolation(format!(
                        "involution is not an anti-automorphism in {}",
                        self.kind
                    )));
                }
            }
        }
        if self.trace(&self.unit) != f.add(1, 1) || self.norm(&self.unit) != 1 {
            return Err(Error::ShapeViolation(format!(
                "T(1) != 2 or N(1) != 1 in {}",
                self.kind
            )));
        }
        for idx in 0..self.element_count() {
            let x = self.elem_from_index(idx);
            let t = self.trace(&x);
            let n = self.norm(&x);
            // x^2 - T(x) x + N(x) 1 = 0
            let sq = self.mul_unchecked(&x, &x);
            for i in 0..self.dim {
                let v = f.add(
                    f.sub(sq[i], f.mul(t, x[i])),
                    f.mul(n, self.unit[i]),
                );
                if v != 0 {
                    return Err(Error::ShapeViolation(format!(
                        "quadratic law fails in {} at index {idx}",
                        self.kind
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Builds one of the named coordinate algebras over F.
pub fn make_algebra(kind: Kind, f: &Field) -> Result<Algebra> {
    let slots = zorn_slots(&kind)
        .ok_or_else(|| Error::UnsupportedKind(kind.to_string()))?;
    let embed: Vec<[Fe; 8]> = if kind == Kind::K {
        let mut e = [0; 8];
        e[SLOT_A] = 1;
        e[SLOT_D] = 1;
        vec![e]
    } else {
        slots
            .iter()
            .map(|&s| {
                let mut e = [0; 8];
                e[s] = 1;
                e
            })
            .collect()
    };
    let dim = embed.len();
    // coordinates of a Zorn matrix in the subalgebra basis
    let extract = |m: &[Fe; 8]| -> Result<AlgElem> {
        let mut coords = vec![0; dim];
        let mut seen = [false; 8];
        if kind == Kind::K {
            coords[0] = m[SLOT_A];
            seen[SLOT_A] = true;
            if m[SLOT_D] != m[SLOT_A] {
                return Err(Error::ShapeViolation("K pattern broken".into()));
            }
            seen[SLOT_D] = true;
        } else {
            for (i, &s) in slots.iter().enumerate() {
                coords[i] = m[s];
                seen[s] = true;
            }
        }
        for s in 0..8 {
            if !seen[s] && m[s] != 0 {
                return Err(Error::ShapeViolation(format!(
                    "product leaves the coordinate pattern of {kind} at slot {s}"
                )));
            }
        }
        Ok(coords)
    };
    let mut products = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let p = zorn_mul(f, &embed[i], &embed[j]);
            products.push(extract(&p)?);
        }
    }
    let mut unit_z = [0; 8];
    unit_z[SLOT_A] = 1;
    unit_z[SLOT_D] = 1;
    let unit = extract(&unit_z)?;
    let conj_rows: Vec<AlgElem> = embed
        .iter()
        .map(|e| extract(&zorn_conj(f, e)))
        .collect::<Result<_>>()?;
    Ok(Algebra::from_products(
        f.clone(),
        kind,
        products,
        unit,
        conj_rows,
        Some(embed),
    ))
}

/// One Cayley-Dickson doubling step with primitive element zeta.
pub fn cd_double(a: &Algebra, zeta: Fe) -> Algebra {
    let f = a.field.clone();
    let d = a.dim;
    let dim = 2 * d;
    let lift = |first: &[Fe], second: &[Fe]| -> AlgElem {
        let mut v = vec![0; dim];
        v[..d].copy_from_slice(first);
        v[d..].copy_from_slice(second);
        v
    };
    let zero = a.zero();
    let mut products = vec![vec![0; dim]; dim * dim];
    let basis: Vec<AlgElem> = (0..d)
        .map(|i| {
            let mut e = a.zero();
            e[i] = 1;
            e
        })
        .collect();
    for i in 0..dim {
        for j in 0..dim {
            let (ai, bi) = if i < d {
                (basis[i].clone(), zero.clone())
            } else {
                (zero.clone(), basis[i - d].clone())
            };
            let (aj, bj) = if j < d {
                (basis[j].clone(), zero.clone())
            } else {
                (zero.clone(), basis[j - d].clone())
            };
            // (a,b)(c,e) = (ac + zeta*e*conj(b), conj(a)e + cb); this is the
            // convention under which (a,b) -> (conj(a),-b) is an
            // anti-automorphism and N(a,b) = N(a) - zeta N(b)
            let ac = a.mul_unchecked(&ai, &aj);
            let e_bbar = a.mul_unchecked(&bj, &a.conj(&bi));
            let first = a.add(&ac, &a.scale(zeta, &e_bbar));
            let abar_e = a.mul_unchecked(&a.conj(&ai), &bj);
            let cb = a.mul_unchecked(&aj, &bi);
            let second = a.add(&abar_e, &cb);
            products[i * dim + j] = lift(&first, &second);
        }
    }
    let unit = lift(&a.unit, &zero);
    let mut conj_rows = Vec::with_capacity(dim);
    for i in 0..d {
        conj_rows.push(lift(&a.conj(&basis[i]), &zero));
    }
    for i in 0..d {
        let neg: AlgElem = basis[i].iter().map(|&c| f.neg(c)).collect();
        conj_rows.push(lift(&zero, &neg));
    }
    Algebra::from_products(
        f,
        Kind::Cd(Box::new(a.kind.clone()), zeta),
        products,
        unit,
        conj_rows,
        None,
    )
}

/// Gram matrix of the norm bilinearization plus the two radical bases.
#[derive(Clone, Debug)]
pub struct BilinearData {
    pub gram: Vec<Vec<Fe>>,
    /// basis of rad(f) as echelon rows in algebra coordinates
    pub rad_f_basis: Subspace,
    /// basis of R = { x in rad(f) : N(x) = 0 }
    pub radical_basis: Subspace,
}

/// Computes rad(f) and the nil radical R by exhaustive scan of rad(f).
pub fn radical(a: &Algebra) -> BilinearData {
    let f = &a.field;
    let d = a.dim;
    let basis: Vec<AlgElem> = (0..d)
        .map(|i| {
            let mut e = a.zero();
            e[i] = 1;
            e
        })
        .collect();
    let mut gram = vec![vec![0; d]; d];
    for i in 0..d {
        for j in 0..d {
            gram[i][j] = a.norm_bilinear(&basis[i], &basis[j]);
        }
    }
    // kernel of the gram matrix: x with sum_i x_i gram[i][j] = 0 for all j
    let mut rows: Vec<Vec<Fe>> = Vec::new();
    {
        // row reduce [gram^T | I] to find left kernel of gram
        let mut m: Vec<Vec<Fe>> = (0..d)
            .map(|i| {
                let mut r = gram[i].clone();
                let mut tag = vec![0; d];
                tag[i] = 1;
                r.extend(tag);
                r
            })
            .collect();
        let mut used = vec![false; d];
        for col in 0..d {
            let Some(pr) = (0..d).find(|&r| !used[r] && m[r][col] != 0) else {
                continue;
            };
            used[pr] = true;
            let inv = f.inv_unchecked(m[pr][col]);
            for v in m[pr].iter_mut() {
                *v = f.mul(*v, inv);
            }
            let pivot = m[pr].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != pr && row[col] != 0 {
                    let c = row[col];
                    for (v, &pv) in row.iter_mut().zip(&pivot) {
                        *v = f.sub(*v, f.mul(c, pv));
                    }
                }
            }
        }
        for (r, row) in m.iter().enumerate() {
            if !used[r] && row[..d].iter().all(|&c| c == 0) {
                rows.push(row[d..].to_vec());
            }
        }
    }
    let mut rad_f_basis = Subspace::empty(d);
    for r in &rows {
        rad_f_basis.insert(f, r);
    }
    // nil radical: norm-zero elements of rad(f); a subspace, found by scan
    let k = rad_f_basis.rank();
    let q = f.q() as usize;
    let mut radical_basis = Subspace::empty(d);
    let mut combo = vec![0u8; k];
    for idx in 0..q.pow(k as u32) {
        let mut t = idx;
        for c in combo.iter_mut() {
            *c = (t % q) as u8;
            t /= q;
        }
        let mut x = a.zero();
        for (co, row) in combo.iter().zip(rad_f_basis.rows()) {
            if *co != 0 {
                for i in 0..d {
                    x[i] = f.add(x[i], f.mul(*co, row[i]));
                }
            }
        }
        if x.iter().any(|&c| c != 0) && a.norm(&x) == 0 {
            radical_basis.insert(f, &x);
        }
    }
    BilinearData {
        gram,
        rad_f_basis,
        radical_basis,
    }
}

/// The five structural flags of an algebra, each decided exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Profile {
    pub commutative: bool,
    pub associative: bool,
    pub alternative: bool,
    pub division: bool,
    pub degenerate: bool,
}

/// Exact property profile. Multilinear identities are decided on basis
/// tuples (exact for bilinear products); the quadratic alternative laws use
/// the polarization plus diagonal basis conditions, which are equivalent to
/// the all-element sweep over any field with at least three elements.
pub fn property_profile(a: &Algebra) -> Profile {
    let d = a.dim;
    let basis: Vec<AlgElem> = (0..d)
        .map(|i| {
            let mut e = a.zero();
            e[i] = 1;
            e
        })
        .collect();
    let zero = a.zero();
    let mut commutative = true;
    'comm: for i in 0..d {
        for j in 0..d {
            if a.mul_unchecked(&basis[i], &basis[j]) != a.mul_unchecked(&basis[j], &basis[i]) {
                commutative = false;
                break 'comm;
            }
        }
    }
    let mut associative = true;
    'assoc: for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if a.associator(&basis[i], &basis[j], &basis[k]) != zero {
                    associative = false;
                    break 'assoc;
                }
            }
        }
    }
    let mut alternative = true;
    'alt: for y in 0..d {
        for i in 0..d {
            if a.associator(&basis[i], &basis[i], &basis[y]) != zero
                || a.associator(&basis[y], &basis[i], &basis[i]) != zero
            {
                alternative = false;
                break 'alt;
            }
            for j in (i + 1)..d {
                let l = a.add(
                    &a.associator(&basis[i], &basis[j], &basis[y]),
                    &a.associator(&basis[j], &basis[i], &basis[y]),
                );
                let r = a.add(
                    &a.associator(&basis[y], &basis[i], &basis[j]),
                    &a.associator(&basis[y], &basis[j], &basis[i]),
                );
                if l != zero || r != zero {
                    alternative = false;
                    break 'alt;
                }
            }
        }
    }
    // division: the norm is anisotropic and every nonzero-norm element has
    // a two-sided inverse (conj(x)/N(x), verified directly)
    let f = &a.field;
    let mut division = true;
    for idx in 1..a.element_count() {
        let x = a.elem_from_index(idx);
        let n = a.norm(&x);
        if n == 0 {
            division = false;
            break;
        }
        let inv = a.scale(f.inv_unchecked(n), &a.conj(&x));
        if !a.is_unit_like(&a.mul_unchecked(&x, &inv))
            || !a.is_unit_like(&a.mul_unchecked(&inv, &x))
        {
            division = false;
            break;
        }
    }
    let degenerate = radical(a).radical_basis.rank() > 0;
    Profile {
        commutative,
        associative,
        alternative,
        division,
        degenerate,
    }
}

/// Splits a degenerate algebra as B + tB per the level-1 structure:
/// B is the coordinate complement of rad(f) (verified to be a unital
/// non-degenerate subalgebra), t is the first radical element in
/// coordinate-lexicographic order with rank [B | tB] = dim A.
pub fn decompose_level1(a: &Algebra) -> Result<(Vec<AlgElem>, AlgElem)> {
    let f = &a.field;
    let d = a.dim;
    let data = radical(a);
    if data.radical_basis.rank() == 0 {
        return Err(Error::NotLevelOneDegenerate(format!(
            "{} has trivial radical",
            a.kind
        )));
    }
    // coordinate complement of rad(f): basis vectors at non-pivot positions
    let pivots: Vec<usize> = data.rad_f_basis.pivots().to_vec();
    let b_basis: Vec<AlgElem> = (0..d)
        .filter(|i| !pivots.contains(i))
        .map(|i| {
            let mut e = a.zero();
            e[i] = 1;
            e
        })
        .collect();
    let mut b_span = Subspace::empty(d);
    for v in &b_basis {
        b_span.insert(f, v);
    }
    if !b_span.contains_vec(f, &a.unit) {
        return Err(Error::NotLevelOneDegenerate(
            "complement of rad(f) is not unital".into(),
        ));
    }
    for x in &b_basis {
        for y in &b_basis {
            if !b_span.contains_vec(f, &a.mul_unchecked(x, y)) {
                return Err(Error::NotLevelOneDegenerate(
                    "complement of rad(f) is not a subalgebra".into(),
                ));
            }
        }
    }
    // scan radical elements in lexicographic coordinate order for t
    let q = f.q() as usize;
    let k = data.radical_basis.rank();
    let mut candidates: Vec<AlgElem> = Vec::new();
    let mut combo = vec![0u8; k];
    for idx in 1..q.pow(k as u32) {
        let mut t = idx;
        for c in combo.iter_mut() {
            *c = (t % q) as u8;
            t /= q;
        }
        let mut x = a.zero();
        for (co, row) in combo.iter().zip(data.radical_basis.rows()) {
            if *co != 0 {
                for i in 0..d {
                    x[i] = f.add(x[i], f.mul(*co, row[i]));
                }
            }
        }
        candidates.push(x);
    }
    candidates.sort();
    for t in candidates {
        let mut joint = b_span.clone();
        let mut grew = false;
        for b in &b_basis {
            let tb = a.mul_unchecked(&t, b);
            grew |= joint.insert(f, &tb);
        }
        let _ = grew;
        if joint.rank() == d {
            return Ok((b_basis, t));
        }
    }
    Err(Error::NotLevelOneDegenerate(format!(
        "no generator t found in the radical of {}",
        a.kind
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf_make;

    fn f3() -> Field {
        gf_make(3).unwrap()
    }

    #[test]
    fn named_kinds_dimensions_and_invariants() {
        let f = f3();
        for (kind, dim) in [
            (Kind::K, 1),
            (Kind::Lp, 2),
            (Kind::Hp, 4),
            (Kind::Op, 8),
            (Kind::Ternions, 3),
            (Kind::Hpp, 4),
            (Kind::Sextonions, 6),
        ] {
            let a = make_algebra(kind.clone(), &f).unwrap();
            assert_eq!(a.dim, dim, "{kind}");
            a.verify().unwrap();
        }
    }

    #[test]
    fn scalar_kind_norm_and_trace() {
        let f = f3();
        let a = make_algebra(Kind::K, &f).unwrap();
        for x in 0..3u8 {
            let e = vec![x];
            assert_eq!(a.norm(&e), f.mul(x, x));
            assert_eq!(a.trace(&e), f.add(x, x));
        }
    }

    #[test]
    fn unit_involution_data() {
        let f = f3();
        for kind in [Kind::K, Kind::Ternions, Kind::Sextonions, Kind::Op] {
            let a = make_algebra(kind, &f).unwrap();
            let (c, t, n) = a.involution_data(&a.unit.clone()).unwrap();
            assert_eq!(c, a.unit);
            assert_eq!(t, 2);
            assert_eq!(n, 1);
        }
    }

    #[test]
    fn octonion_identity_is_neutral() {
        let f = f3();
        let a = make_algebra(Kind::Op, &f).unwrap();
        for idx in 0..a.element_count().min(3000) {
            let x = a.elem_from_index(idx);
            assert_eq!(a.mul_unchecked(&a.unit, &x), x);
            assert_eq!(a.mul_unchecked(&x, &a.unit), x);
        }
    }

    #[test]
    fn octonion_hand_expanded_product() {
        // both factors have w = (1,0,0), i.e. c = 1, all else on the
        // diagonal zero: off-diagonals get w x w' = 0, the diagonals get
        // the dot products v.w' = 0 and v'.w = 0
        let f = f3();
        let a = make_algebra(Kind::Op, &f).unwrap();
        // order (a,b,c,d,x,y,z,u)
        let m = vec![0, 0, 1, 0, 0, 0, 0, 0];
        let p = a.mul_unchecked(&m, &m);
        assert_eq!(p, vec![0; 8]);
        // and one with mixed entries, expanded by hand from the formula:
        // l = M(1,1,0,2,0,0,0,0), r = M(0,0,1,1,0,0,0,0)
        // a: 1*0 + (1,0,0).(1,0,0) = 1 ; v: 1*(0,0,0) + 1*(1,0,0) + 0 = (1,0,0)
        // w: 0*(0,0,0) + 2*(1,0,0) - (1,0,0)x(0,0,0) = (2,0,0) ; d: 2*1 + 0 = 2
        let l = vec![1, 1, 0, 2, 0, 0, 0, 0];
        let r = vec![0, 0, 1, 1, 0, 0, 0, 0];
        assert_eq!(a.mul_unchecked(&l, &r), vec![1, 1, 2, 2, 0, 0, 0, 0]);
    }

    #[test]
    fn octonions_are_not_associative() {
        let f = f3();
        let a = make_algebra(Kind::Op, &f).unwrap();
        let mut witness = None;
        'outer: for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    let mut x = a.zero();
                    x[i] = 1;
                    let mut y = a.zero();
                    y[j] = 1;
                    let mut z = a.zero();
                    z[k] = 1;
                    if a.associator(&x, &y, &z) != a.zero() {
                        witness = Some((i, j, k));
                        break 'outer;
                    }
                }
            }
        }
        assert!(witness.is_some());
    }

    #[test]
    fn zorn_norm_formula() {
        let f = f3();
        let a = make_algebra(Kind::Op, &f).unwrap();
        // N(M(1,2,0,1,0,0,0,0)) = 1*1 - 2*0 = 1
        let m = vec![1, 2, 0, 1, 0, 0, 0, 0];
        assert_eq!(a.norm(&m), 1);
        // general formula ad - bc - zx - uy on a few elements
        for idx in [5usize, 100, 2000, 4321, 6560] {
            let x = a.elem_from_index(idx);
            let expect = f.sub(
                f.sub(
                    f.sub(f.mul(x[0], x[3]), f.mul(x[1], x[2])),
                    f.mul(x[6], x[4]),
                ),
                f.mul(x[7], x[5]),
            );
            assert_eq!(a.norm(&x), expect);
        }
    }

    #[test]
    fn dual_numbers_from_doubling_k() {
        let f = f3();
        let k = make_algebra(Kind::K, &f).unwrap();
        let d = cd_double(&k, 0);
        d.verify().unwrap();
        let t = vec![0, 1];
        assert_eq!(d.mul_unchecked(&t, &t), vec![0, 0]);
        let (tb, tr, n) = d.involution_data(&t).unwrap();
        assert_eq!(tb, vec![0, 2]);
        assert_eq!(tr, 0);
        assert_eq!(n, 0);
    }

    #[test]
    fn doubling_lp_with_zero_gives_radical_of_dim_two() {
        let f = f3();
        let lp = make_algebra(Kind::Lp, &f).unwrap();
        let h = cd_double(&lp, 0);
        h.verify().unwrap();
        assert_eq!(radical(&h).radical_basis.rank(), 2);
    }

    #[test]
    fn doubling_hp_with_one_matches_op_profile() {
        let f = f3();
        let hp = make_algebra(Kind::Hp, &f).unwrap();
        let o = cd_double(&hp, 1);
        o.verify().unwrap();
        let op = make_algebra(Kind::Op, &f).unwrap();
        assert_eq!(property_profile(&o), property_profile(&op));
    }

    #[test]
    fn radical_dimensions() {
        let f = f3();
        assert_eq!(
            radical(&make_algebra(Kind::Op, &f).unwrap())
                .radical_basis
                .rank(),
            0
        );
        assert_eq!(
            radical(&make_algebra(Kind::Ternions, &f).unwrap())
                .radical_basis
                .rank(),
            1
        );
        assert_eq!(
            radical(&make_algebra(Kind::Sextonions, &f).unwrap())
                .radical_basis
                .rank(),
            2
        );
        assert_eq!(
            radical(&make_algebra(Kind::Hpp, &f).unwrap())
                .radical_basis
                .rank(),
            2
        );
    }

    #[test]
    fn radical_elements_are_nilpotent_and_ideal() {
        let f = f3();
        for kind in [Kind::Ternions, Kind::Hpp, Kind::Sextonions] {
            let a = make_algebra(kind, &f).unwrap();
            let data = radical(&a);
            let rows = data.radical_basis.rows().to_vec();
            for r in &rows {
                assert_eq!(a.trace(r), 0);
                assert_eq!(a.norm(r), 0);
                assert_eq!(a.mul_unchecked(r, r), a.zero());
            }
            // two-sided ideal: basis * radical and radical * basis stay inside
            for i in 0..a.dim {
                let mut e = a.zero();
                e[i] = 1;
                for r in &rows {
                    assert!(data.radical_basis.contains_vec(&f, &a.mul_unchecked(&e, r)));
                    assert!(data.radical_basis.contains_vec(&f, &a.mul_unchecked(r, &e)));
                }
            }
        }
    }

    #[test]
    fn profiles_of_named_kinds() {
        let f = f3();
        let p = |k: Kind| property_profile(&make_algebra(k, &f).unwrap());
        let t = p(Kind::Ternions);
        assert_eq!(
            (t.commutative, t.associative, t.alternative, t.division, t.degenerate),
            (false, true, true, false, true)
        );
        let o = p(Kind::Op);
        assert_eq!(
            (o.commutative, o.associative, o.alternative, o.division, o.degenerate),
            (false, false, true, false, false)
        );
        let k = p(Kind::K);
        assert_eq!(
            (k.commutative, k.associative, k.alternative, k.division, k.degenerate),
            (true, true, true, true, false)
        );
        let s = p(Kind::Sextonions);
        assert!(s.alternative && !s.associative && s.degenerate);
    }

    #[test]
    fn fact_2_1_sweep_over_gf3() {
        let f = f3();
        for base_kind in [Kind::K, Kind::Lp, Kind::Hp] {
            let a = make_algebra(base_kind.clone(), &f).unwrap();
            let pa = property_profile(&a);
            let ra = radical(&a);
            let conj_trivial = (0..a.dim).all(|i| {
                let mut e = a.zero();
                e[i] = 1;
                a.conj(&e) == e
            });
            let norms: std::collections::BTreeSet<Fe> = (0..a.element_count())
                .map(|i| a.norm(&a.elem_from_index(i)))
                .collect();
            for zeta in 0..3u8 {
                let d = cd_double(&a, zeta);
                d.verify().unwrap();
                let pd = property_profile(&d);
                let rd = radical(&d);
                assert_eq!(pd.division, !norms.contains(&zeta) && pa.division, "{base_kind} zeta={zeta}");
                assert_eq!(
                    rd.radical_basis.rank() == 0,
                    zeta != 0 && ra.radical_basis.rank() == 0
                );
                assert_eq!(pd.commutative, pa.commutative && conj_trivial);
                assert_eq!(pd.associative, pa.commutative && pa.associative);
                assert_eq!(pd.alternative, pa.associative);
            }
        }
    }

    #[test]
    fn norm_multiplicativity_exhaustive_gf3() {
        let f = f3();
        for kind in [
            Kind::Lp,
            Kind::Hp,
            Kind::Ternions,
            Kind::Hpp,
            Kind::Sextonions,
        ] {
            let a = make_algebra(kind.clone(), &f).unwrap();
            for i in 0..a.element_count() {
                let x = a.elem_from_index(i);
                let nx = a.norm(&x);
                for j in 0..a.element_count() {
                    let y = a.elem_from_index(j);
                    assert_eq!(
                        a.norm(&a.mul_unchecked(&x, &y)),
                        f.mul(nx, a.norm(&y)),
                        "{kind}"
                    );
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let f = f3();
        let lp = make_algebra(Kind::Lp, &f).unwrap();
        let h = cd_double(&lp, 0);
        let (b, t) = decompose_level1(&h).unwrap();
        assert_eq!(b.len(), 2);
        let tb: Vec<_> = b.iter().map(|v| h.mul_unchecked(&t, v)).collect();
        let mut s = Subspace::empty(4);
        for v in &tb {
            s.insert(&f, v);
        }
        assert_eq!(s.rank(), 2);

        let tern = make_algebra(Kind::Ternions, &f).unwrap();
        let (b, t) = decompose_level1(&tern).unwrap();
        assert_eq!(b.len(), 2);
        let mut s = Subspace::empty(3);
        for v in &b {
            let tb = tern.mul_unchecked(&t, v);
            s.insert(&f, &tb);
        }
        assert_eq!(s.rank(), 1);

        let op = make_algebra(Kind::Op, &f).unwrap();
        assert!(matches!(
            decompose_level1(&op),
            Err(Error::NotLevelOneDegenerate(_))
        ));
    }

    #[test]
    fn containment_chain_of_coordinate_patterns() {
        // Ternions and Hpp sit inside the Sextonions slot pattern, and
        // Hp is the intersection of the two sextonion copies S and S'.
        let t: std::collections::BTreeSet<usize> =
            zorn_slots(&Kind::Ternions).unwrap().iter().copied().collect();
        let h: std::collections::BTreeSet<usize> =
            zorn_slots(&Kind::Hpp).unwrap().iter().copied().collect();
        let s: std::collections::BTreeSet<usize> =
            zorn_slots(&Kind::Sextonions).unwrap().iter().copied().collect();
        assert!(t.is_subset(&s));
        assert!(h.is_subset(&s));
        let s_prime: std::collections::BTreeSet<usize> =
            [SLOT_A, SLOT_B, SLOT_C, SLOT_D, SLOT_X, SLOT_U].into_iter().collect();
        let hp: std::collections::BTreeSet<usize> =
            zorn_slots(&Kind::Hp).unwrap().iter().copied().collect();
        let inter: std::collections::BTreeSet<usize> =
            s.intersection(&s_prime).copied().collect();
        assert_eq!(inter, hp);
    }

    #[test]
    fn gf4_invariants_all_kinds() {
        let f = gf_make(4).unwrap();
        for kind in [
            Kind::K,
            Kind::Lp,
            Kind::Hp,
            Kind::Op,
            Kind::Ternions,
            Kind::Hpp,
            Kind::Sextonions,
        ] {
            make_algebra(kind, &f).unwrap().verify().unwrap();
        }
    }
}
