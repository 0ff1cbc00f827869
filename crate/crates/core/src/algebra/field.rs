//! Finite fields F_{p^m} with runtime parameters.
//!
//! An element is stored as a single index in `0..q`: the coordinate vector
//! (c_0, ..., c_{m-1}) over Z/p is packed as sum c_i p^i. For m > 1 the
//! coordinates are taken with respect to the power basis of a generator g,
//! a root of the stored monic irreducible modulus. The modulus is the
//! lexicographically smallest monic irreducible of degree m over F_p,
//! where "lexicographically smallest" means smallest packed integer
//! encoding of the coefficient vector; the choice is deterministic, so two
//! calls with the same (p, m) build identical fields.
//!
//! All four operations are table-driven for small q (at most [`TABLE_LIMIT`]),
//! which covers every field this crate exercises; larger fields fall back to
//! digit-vector arithmetic.

use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Largest field order for which full q-by-q operation tables are built.
pub const TABLE_LIMIT: u64 = 1 << 10;

/// A field element, packed as an index in `0..q`.
///
/// Elements are plain copies with no back-reference; every operation goes
/// through the owning [`Field`], which validates nothing per-call for
/// speed. Mixing elements across fields is caught at the polynomial layer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq(pub u16);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({})", self.0)
    }
}

/// Descriptor plus operation tables for F_{p^m}.
pub struct Field {
    p: u64,
    m: u32,
    q: u64,
    /// Monic irreducible modulus over F_p, ascending coefficients of
    /// length m+1; present iff m > 1.
    modulus: Option<Vec<u64>>,
    /// Display label for the extension generator.
    gen_label: &'static str,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(p={}, m={})", self.p, self.m)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for Field {}

/// Digit-vector helpers over F_p used while bootstrapping a field (before
/// its tables exist) and by the fallback arithmetic path.
mod digits {
    /// Multiply two coefficient vectors over F_p (ascending, any length).
    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Reduce a modulo the monic polynomial m (ascending, leading coeff 1).
    pub fn rem(a: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let mut r: Vec<u64> = a.to_vec();
        trim(&mut r);
        let d = modulus.len() - 1;
        while r.len() > d {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - d;
            if lead != 0 {
                for i in 0..d {
                    let sub = (lead * modulus[i]) % p;
                    r[shift + i] = (r[shift + i] + p - sub) % p;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    /// Does f (ascending, monic, degree >= 1) have a monic factor of degree
    /// in 1..=deg(f)/2? Trial division against every monic candidate,
    /// enumerated by packed encoding. Fine for the tiny moduli used here.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let deg = f.len() - 1;
        if deg == 0 {
            return false;
        }
        for d in 1..=deg / 2 {
            let count = p.pow(d as u32);
            for enc in 0..count {
                let mut g = unpack(enc, d, p);
                g.push(1); // monic of degree d
                if divides(&g, f, p) {
                    return false;
                }
            }
        }
        true
    }

    fn divides(g: &[u64], f: &[u64], p: u64) -> bool {
        rem(f, g, p).is_empty()
    }

    pub fn unpack(mut enc: u64, len: usize, p: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(enc % p);
            enc /= p;
        }
        out
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Build F_{p^m}. For m > 1 the modulus is the first monic irreducible
    /// of degree m over F_p in packed-encoding order.
    pub fn make(p: u64, m: u32) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = p.checked_pow(m).ok_or_else(|| {
            Error::Overflow(format!("field order p^m with p={p}, m={m}"))
        })?;
        let modulus = if m > 1 {
            Some(Self::smallest_irreducible(p, m)?)
        } else {
            None
        };
        let mut field = Field {
            p,
            m,
            q,
            modulus,
            gen_label: "g",
            add: vec![],
            mul: vec![],
            neg: vec![],
            inv: vec![],
        };
        if q <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(Arc::new(field))
    }

    fn smallest_irreducible(p: u64, m: u32) -> Result<Vec<u64>> {
        let count = p.pow(m);
        for enc in 0..count {
            let mut f = digits::unpack(enc, m as usize, p);
            f.push(1);
            if digits::is_irreducible(&f, p) {
                return Ok(f);
            }
        }
        Err(Error::pre(format!(
            "no irreducible of degree {m} over F_{p} (unreachable)"
        )))
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let p = self.p;
        let m = self.m as usize;
        self.add = vec![0; q * q];
        self.mul = vec![0; q * q];
        self.neg = vec![0; q];
        self.inv = vec![0; q];
        for a in 0..q as u64 {
            let av = digits::unpack(a, m, p);
            let mut nv = 0u64;
            let mut pw = 1u64;
            for &c in &av {
                nv += ((p - c) % p) * pw;
                pw *= p;
            }
            self.neg[a as usize] = nv as u16;
            for b in a..q as u64 {
                let bv = digits::unpack(b, m, p);
                let mut sum = 0u64;
                let mut pw = 1u64;
                for i in 0..m {
                    sum += ((av[i] + bv[i]) % p) * pw;
                    pw *= p;
                }
                self.add[a as usize * q + b as usize] = sum as u16;
                self.add[b as usize * q + a as usize] = sum as u16;
                let prod = self.mul_digits(&av, &bv);
                self.mul[a as usize * q + b as usize] = prod;
                self.mul[b as usize * q + a as usize] = prod;
            }
        }
        for a in 1..q {
            if self.inv[a] != 0 {
                continue;
            }
            for b in 1..q {
                if self.mul[a * q + b] == 1 {
                    self.inv[a] = b as u16;
                    self.inv[b] = a as u16;
                    break;
                }
            }
        }
    }

    fn mul_digits(&self, av: &[u64], bv: &[u64]) -> u16 {
        let p = self.p;
        let mut prod = digits::mul(av, bv, p);
        if let Some(ref mo) = self.modulus {
            prod = digits::rem(&prod, mo, p);
        }
        let mut enc = 0u64;
        let mut pw = 1u64;
        for &c in &prod {
            enc += c * pw;
            pw *= p;
        }
        enc as u16
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Field order q = p^m.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Ascending coefficients of the modulus, present iff m > 1.
    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    pub fn gen_label(&self) -> &str {
        self.gen_label
    }

    /// True when p = m = 1-style prime fields use direct mod-p arithmetic
    /// (their packed index IS the residue).
    pub fn is_prime_field(&self) -> bool {
        self.m == 1
    }

    pub fn zero(&self) -> Fq {
        Fq(0)
    }

    pub fn one(&self) -> Fq {
        Fq(1)
    }

    /// The extension generator g (for m > 1); equals p in packed encoding.
    pub fn gen(&self) -> Fq {
        Fq(self.p as u16)
    }

    pub fn elem(&self, index: u64) -> Result<Fq> {
        if index < self.q {
            Ok(Fq(index as u16))
        } else {
            Err(Error::pre(format!(
                "element index {index} out of range for field of order {}",
                self.q
            )))
        }
    }

    /// Canonical element from an integer counted in Z (useful for small
    /// literals in prime fields): reduces mod p, then lifts.
    pub fn from_int(&self, n: i64) -> Fq {
        let r = n.rem_euclid(self.p as i64) as u64;
        Fq(r as u16)
    }

    /// Coordinate vector (length m, ascending powers of g) of an element.
    pub fn coords(&self, a: Fq) -> Vec<u64> {
        digits::unpack(a.0 as u64, self.m as usize, self.p)
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<Fq> {
        if coords.len() != self.m as usize {
            return Err(Error::pre(format!(
                "coordinate vector length {} does not match extension degree {}",
                coords.len(),
                self.m
            )));
        }
        let mut enc = 0u64;
        let mut pw = 1u64;
        for &c in coords {
            if c >= self.p {
                return Err(Error::pre(format!("coordinate {c} not reduced mod {}", self.p)));
            }
            enc += c * pw;
            pw *= self.p;
        }
        Ok(Fq(enc as u16))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q as u16).map(Fq)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.m == 1 {
            let s = a.0 as u64 + b.0 as u64;
            let p = self.p;
            Fq(if s >= p { (s - p) as u16 } else { s as u16 })
        } else if !self.add.is_empty() {
            Fq(self.add[a.0 as usize * self.q as usize + b.0 as usize])
        } else {
            self.slow_add(a, b)
        }
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        if self.m == 1 {
            if a.0 == 0 {
                a
            } else {
                Fq(self.p as u16 - a.0)
            }
        } else if !self.neg.is_empty() {
            Fq(self.neg[a.0 as usize])
        } else {
            self.slow_neg(a)
        }
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if self.m == 1 {
            Fq((a.0 as u64 * b.0 as u64 % self.p) as u16)
        } else if !self.mul.is_empty() {
            Fq(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
        } else {
            let av = self.coords(a);
            let bv = self.coords(b);
            Fq(self.mul_digits(&av, &bv))
        }
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if !self.inv.is_empty() {
            return Ok(Fq(self.inv[a.0 as usize]));
        }
        // Fallback: a^(q-2).
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn slow_add(&self, a: Fq, b: Fq) -> Fq {
        let av = self.coords(a);
        let bv = self.coords(b);
        let mut enc = 0u64;
        let mut pw = 1u64;
        for i in 0..self.m as usize {
            enc += ((av[i] + bv[i]) % self.p) * pw;
            pw *= self.p;
        }
        Fq(enc as u16)
    }

    fn slow_neg(&self, a: Fq) -> Fq {
        let av = self.coords(a);
        let mut enc = 0u64;
        let mut pw = 1u64;
        for &c in &av {
            enc += ((self.p - c) % self.p) * pw;
            pw *= self.p;
        }
        Fq(enc as u16)
    }

    /// Render an element for human-readable output: a bare digit for prime
    /// fields, otherwise a polynomial in the generator label.
    pub fn render(&self, a: Fq) -> String {
        if self.m == 1 {
            return format!("{}", a.0);
        }
        let coords = self.coords(a);
        let mut parts = vec![];
        for (i, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let part = match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => self.gen_label.to_string(),
                (1, c) => format!("{c}{}", self.gen_label),
                (i, 1) => format!("{}^{i}", self.gen_label),
                (i, c) => format!("{c}{}^{i}", self.gen_label),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

/// A ring embedding F_{p^m} -> F_{p^(m*d)}, realized as a lookup table.
///
/// The generator of the small field is sent to the root of the small
/// modulus in the big field with the smallest packed encoding; for prime
/// fields the embedding is the canonical one on residues.
pub struct Embedding {
    small: Arc<Field>,
    big: Arc<Field>,
    map: Vec<u16>,
}

impl Embedding {
    pub fn new(small: &Arc<Field>, big: &Arc<Field>) -> Result<Embedding> {
        if small.p() != big.p() {
            return Err(Error::pre(format!(
                "cannot embed characteristic {} into characteristic {}",
                small.p(),
                big.p()
            )));
        }
        if big.m() % small.m() != 0 {
            return Err(Error::pre(format!(
                "F_{{{}^{}}} does not embed into F_{{{}^{}}}: degree {} does not divide {}",
                small.p(),
                small.m(),
                big.p(),
                big.m(),
                small.m(),
                big.m()
            )));
        }
        let g_image = if small.m() == 1 {
            big.one()
        } else {
            let modulus = small.modulus().unwrap().to_vec();
            // Coefficients of the small modulus are in F_p, which sits
            // inside big by packed index already.
            let mut found = None;
            for cand in big.elements() {
                let mut acc = big.zero();
                // Horner from the top coefficient.
                for &c in modulus.iter().rev() {
                    acc = big.add(big.mul(acc, cand), Fq(c as u16));
                }
                if acc == big.zero() {
                    found = Some(cand);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::pre("modulus has no root in the target field (degree mismatch)".to_string())
            })?
        };
        let mut map = vec![0u16; small.q() as usize];
        for a in small.elements() {
            let coords = small.coords(a);
            let mut acc = big.zero();
            for &c in coords.iter().rev() {
                acc = big.add(big.mul(acc, g_image), Fq(c as u16));
            }
            map[a.0 as usize] = acc.0;
        }
        Ok(Embedding {
            small: Arc::clone(small),
            big: Arc::clone(big),
            map,
        })
    }

    pub fn small(&self) -> &Arc<Field> {
        &self.small
    }

    pub fn big(&self) -> &Arc<Field> {
        &self.big
    }

    #[inline]
    pub fn apply(&self, a: Fq) -> Fq {
        Fq(self.map[a.0 as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_characteristic() {
        assert!(matches!(Field::make(6, 1), Err(Error::NotPrime(6))));
        assert!(matches!(Field::make(1, 1), Err(Error::NotPrime(1))));
    }

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        let f9 = Field::make(3, 2).unwrap();
        // Packed-encoding order scans x^2, x^2+1, ...; x^2+1 is the first
        // irreducible since -1 is not a square mod 3.
        assert_eq!(f9.modulus(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn f4_modulus_is_x2_plus_x_plus_1() {
        let f4 = Field::make(2, 2).unwrap();
        assert_eq!(f4.modulus(), Some(&[1, 1, 1][..]));
    }

    #[test]
    fn prime_field_ops_match_mod_arithmetic() {
        let f = Field::make(7, 1).unwrap();
        for a in 0..7u64 {
            for b in 0..7u64 {
                let x = f.elem(a).unwrap();
                let y = f.elem(b).unwrap();
                assert_eq!(f.add(x, y).0 as u64, (a + b) % 7);
                assert_eq!(f.mul(x, y).0 as u64, (a * b) % 7);
            }
        }
    }

    #[test]
    fn field_axioms_hold_in_f9() {
        let f = Field::make(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), f.zero());
            if a != f.zero() {
                let ai = f.inv(a).unwrap();
                assert_eq!(f.mul(a, ai), f.one());
            }
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in f.elements() {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_f3_inside_f9() {
        let f9 = Field::make(3, 2).unwrap();
        // x^q = x exactly on the prime subfield; the generator moves.
        for c in 0..3 {
            let a = f9.elem(c).unwrap();
            assert_eq!(f9.pow(a, 3), a);
        }
        let g = f9.gen();
        assert_ne!(f9.pow(g, 3), g);
        assert_eq!(f9.pow(g, 9), g);
    }

    #[test]
    fn embedding_is_a_ring_hom() {
        let f3 = Field::make(3, 1).unwrap();
        let f9 = Field::make(3, 2).unwrap();
        let emb = Embedding::new(&f3, &f9).unwrap();
        for a in f3.elements() {
            for b in f3.elements() {
                assert_eq!(
                    emb.apply(f3.add(a, b)),
                    f9.add(emb.apply(a), emb.apply(b))
                );
                assert_eq!(
                    emb.apply(f3.mul(a, b)),
                    f9.mul(emb.apply(a), emb.apply(b))
                );
            }
        }
        assert_eq!(emb.apply(f3.one()), f9.one());
    }

    #[test]
    fn self_embedding_of_extension_is_identity_hom() {
        let f9 = Field::make(3, 2).unwrap();
        let f81 = Field::make(3, 4).unwrap();
        let emb = Embedding::new(&f9, &f81).unwrap();
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(
                    emb.apply(f9.mul(a, b)),
                    f81.mul(emb.apply(a), emb.apply(b))
                );
            }
        }
    }
}
