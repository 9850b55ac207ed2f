//! Exact arithmetic in GF(q) for small prime powers, 3 <= q <= 9.
//!
//! Elements are canonical indices `0..q`. For extension fields the index is
//! the base-p digit expansion of the residue polynomial, so `0` is the
//! additive and `1` the multiplicative identity in every field. Operation
//! tables are built once per field from a fixed irreducible polynomial per
//! (p, k), which keeps every serialized artifact bit-stable across builds:
//!
//! * GF(4) = GF(2)[x]/(x^2 + x + 1)
//! * GF(8) = GF(2)[x]/(x^3 + x + 1)
//! * GF(9) = GF(3)[x]/(x^2 + 1)

use crate::error::{Error, Result};

/// A field element, stored as its canonical index in `0..q`.
pub type Fe = u8;

const MAX_Q: usize = 9;

/// GF(q) with precomputed operation tables. Immutable after construction.
#[derive(Clone)]
pub struct Field {
    q: u8,
    p: u8,
    k: u8,
    poly: &'static [u8],
    add: [[u8; MAX_Q]; MAX_Q],
    sub: [[u8; MAX_Q]; MAX_Q],
    mul: [[u8; MAX_Q]; MAX_Q],
    inv: [u8; MAX_Q],
    neg: [u8; MAX_Q],
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

/// Irreducible polynomial for (p, k), low degree first, monic.
fn modulus(q: u32) -> Option<(u8, u8, &'static [u8])> {
    match q {
        3 => Some((3, 1, &[0, 1])),
        4 => Some((2, 2, &[1, 1, 1])),
        5 => Some((5, 1, &[0, 1])),
        7 => Some((7, 1, &[0, 1])),
        8 => Some((2, 3, &[1, 1, 0, 1])),
        9 => Some((3, 2, &[1, 0, 1])),
        _ => None,
    }
}

fn digits(mut v: u8, p: u8, k: u8) -> Vec<u8> {
    let mut d = Vec::with_capacity(k as usize);
    for _ in 0..k {
        d.push(v % p);
        v /= p;
    }
    d
}

fn undigits(d: &[u8], p: u8) -> u8 {
    d.iter().rev().fold(0u8, |acc, &c| acc * p + c)
}

/// Constructs GF(q). Rejects q = 2 and non prime powers outside 3..=9.
pub fn gf_make(q: u32) -> Result<Field> {
    if q == 2 {
        return Err(Error::FieldTooSmall);
    }
    let (p, k, poly) = modulus(q).ok_or(Error::NotPrimePower(q))?;
    let q = q as u8;
    let mut fld = Field {
        q,
        p,
        k,
        poly,
        add: [[0; MAX_Q]; MAX_Q],
        sub: [[0; MAX_Q]; MAX_Q],
        mul: [[0; MAX_Q]; MAX_Q],
        inv: [0; MAX_Q],
        neg: [0; MAX_Q],
    };
    for a in 0..q {
        for b in 0..q {
            let da = digits(a, p, k);
            let db = digits(b, p, k);
            let sum: Vec<u8> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            fld.add[a as usize][b as usize] = undigits(&sum, p);
            // polynomial product reduced by the fixed modulus
            let mut prod = vec![0u8; 2 * k as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            for i in (k as usize..prod.len()).rev() {
                let c = prod[i];
                if c != 0 {
                    prod[i] = 0;
                    // x^k = -(poly[0] + poly[1] x + ...), poly monic of degree k
                    for j in 0..k as usize {
                        let t = (c * (p - poly[j] % p)) % p;
                        prod[i - k as usize + j] = (prod[i - k as usize + j] + t) % p;
                    }
                }
            }
            fld.mul[a as usize][b as usize] = undigits(&prod[..k as usize], p);
        }
    }
    for a in 0..q {
        let da = digits(a, p, k);
        let neg: Vec<u8> = da.iter().map(|&x| (p - x) % p).collect();
        fld.neg[a as usize] = undigits(&neg, p);
    }
    for a in 0..q {
        for b in 0..q {
            fld.sub[a as usize][b as usize] = fld.add[a as usize][fld.neg[b as usize] as usize];
        }
    }
    for a in 1..q {
        let mut found = 0;
        for b in 1..q {
            if fld.mul[a as usize][b as usize] == 1 {
                found = b;
                break;
            }
        }
        debug_assert_ne!(found, 0, "no inverse for {a} in GF({q})");
        fld.inv[a as usize] = found;
    }
    Ok(fld)
}

impl Field {
    #[inline]
    pub fn q(&self) -> u8 {
        self.q
    }
    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }
    #[inline]
    pub fn k(&self) -> u8 {
        self.k
    }
    /// Coefficients of the defining polynomial, low degree first, monic part implicit.
    pub fn poly(&self) -> &'static [u8] {
        self.poly
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.add[a as usize][b as usize]
    }
    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.sub[a as usize][b as usize]
    }
    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.mul[a as usize][b as usize]
    }
    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a == 0 {
            return Err(Error::DivisionByZero(self.q as u32));
        }
        Ok(self.inv[a as usize])
    }

    /// Unchecked inverse for hot paths; caller guarantees a != 0.
    #[inline]
    pub fn inv_unchecked(&self, a: Fe) -> Fe {
        debug_assert_ne!(a, 0);
        self.inv[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.q
    }

    /// Dot product of coordinate slices.
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        debug_assert_eq!(a.len(), b.len());
        let mut acc = 0;
        for i in 0..a.len() {
            acc = self.add(acc, self.mul(a[i], b[i]));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_rejects_bad_orders() {
        assert!(matches!(gf_make(6), Err(Error::NotPrimePower(6))));
        assert!(matches!(gf_make(2), Err(Error::FieldTooSmall)));
        assert!(matches!(gf_make(16), Err(Error::NotPrimePower(16))));
    }

    #[test]
    fn gf3_characteristic_identity() {
        let f = gf_make(3).unwrap();
        assert_eq!(f.add(1, 2), 0);
    }

    #[test]
    fn gf4_generator_relation() {
        // with x^2 + x + 1, the generator g (index 2) satisfies g^2 = g + 1
        let f = gf_make(4).unwrap();
        let g = 2;
        assert_eq!(f.mul(g, g), f.add(g, 1));
    }

    #[test]
    fn inverses() {
        let f3 = gf_make(3).unwrap();
        assert_eq!(f3.inv(2).unwrap(), 2);
        let f5 = gf_make(5).unwrap();
        assert_eq!(f5.inv(3).unwrap(), 2);
        assert!(matches!(f3.inv(0), Err(Error::DivisionByZero(3))));
    }

    #[test]
    fn exhaustive_field_axioms_all_supported_orders() {
        for q in [3u32, 4, 5, 7, 8, 9] {
            let f = gf_make(q).unwrap();
            let q = q as u8;
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                    // involution of inversion
                    assert_eq!(f.inv(f.inv(a).unwrap()).unwrap(), a);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }
}
