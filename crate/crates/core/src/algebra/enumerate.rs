//! Enumeration of monic polynomials, irreducibility, valuations, and roots
//! in extension fields.
//!
//! Enumeration order is deterministic: coefficient vectors are scanned in
//! packed base-q encoding order (constant coefficient least significant),
//! so repeated runs produce identical lists.

use crate::algebra::field::{Embedding, Field, Fq};
use crate::algebra::poly::Poly;
use crate::{Error, Result};
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MonicMode {
    /// Monic polynomials of degree exactly d (q^d of them).
    ExactDegree,
    /// Every element of A(d) = {a : deg a < d}: all q^d polynomials of
    /// degree below d, zero and non-monic ones included.
    DegreeBelow,
}

/// Enumerate polynomials per the mode; see [`MonicMode`].
pub fn enumerate_monic(field: &Arc<Field>, d: u32, mode: MonicMode) -> Result<Vec<Poly>> {
    let q = field.q();
    let count = q
        .checked_pow(d)
        .ok_or_else(|| Error::Overflow(format!("q^d with q={q}, d={d}")))?;
    let mut out = Vec::with_capacity(count as usize);
    for enc in 0..count {
        let mut coeffs = Vec::with_capacity(d as usize + 1);
        let mut rest = enc;
        for _ in 0..d {
            coeffs.push(Fq((rest % q) as u16));
            rest /= q;
        }
        if mode == MonicMode::ExactDegree {
            coeffs.push(field.one());
        }
        out.push(Poly::from_coeffs(field, coeffs));
    }
    Ok(out)
}

/// Monic irreducibles of degree exactly d, by sieving the monic list with
/// trial division against lower-degree irreducibles.
pub fn enumerate_irreducibles(field: &Arc<Field>, d: u32) -> Result<Vec<Poly>> {
    if d == 0 {
        return Ok(vec![]);
    }
    let mut known: Vec<Poly> = vec![];
    let mut current = vec![];
    for deg in 1..=d {
        current.clear();
        for cand in enumerate_monic(field, deg, MonicMode::ExactDegree)? {
            let mut composite = false;
            for irr in &known {
                let id = irr.degree().unwrap_or(0);
                if id * 2 > deg as usize {
                    break;
                }
                if cand.rem(irr)?.is_zero() {
                    composite = true;
                    break;
                }
            }
            if !composite {
                current.push(cand);
            }
        }
        if deg < d {
            known.extend(current.iter().cloned());
            known.sort_by_key(|p| p.degree());
        }
    }
    Ok(current)
}

pub fn is_irreducible(f: &Poly) -> Result<bool> {
    let d = match f.degree() {
        None | Some(0) => return Ok(false),
        Some(d) => d,
    };
    if d == 1 {
        return Ok(true);
    }
    for deg in 1..=(d / 2) as u32 {
        for irr in enumerate_irreducibles(f.field(), deg)? {
            if f.rem(&irr)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Number of monic irreducibles of degree d over F_q by the necklace
/// formula (1/d) sum_{e | d} mu(e) q^(d/e); used as an enumeration oracle.
pub fn irreducible_count(q: u64, d: u32) -> u64 {
    let mut total: i64 = 0;
    for e in 1..=d {
        if d % e != 0 {
            continue;
        }
        let mu = mobius(e);
        if mu == 0 {
            continue;
        }
        total += mu as i64 * q.pow(d / e) as i64;
    }
    (total as u64) / d as u64
}

fn mobius(n: u32) -> i32 {
    let mut n = n;
    let mut factors = 0;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            factors += 1;
        }
        d += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Multiplicity of the monic irreducible v in f. Errors on f = 0 and on a
/// reducible or non-monic v.
pub fn valuation(f: &Poly, v: &Poly) -> Result<u32> {
    if f.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if !v.is_monic() || !is_irreducible(v)? {
        return Err(Error::NotIrreducible(v.render("x")));
    }
    let mut count = 0;
    let mut rest = f.clone();
    loop {
        let (q, r) = rest.divrem(v)?;
        if !r.is_zero() {
            return Ok(count);
        }
        count += 1;
        rest = q;
    }
}

/// Valuation extended to fractions: val(num) - val(den).
pub fn valuation_frac(f: &crate::algebra::fraction::Frac, v: &Poly) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let vn = valuation(f.num(), v)? as i64;
    let vd = valuation(f.den(), v)? as i64;
    Ok(vn - vd)
}

/// The roots of a degree-d monic irreducible v over F_q, found in the
/// extension F_{q^d} = F_{p^(m*d)}.
pub struct ExtensionRoots {
    pub big: Arc<Field>,
    pub emb: Embedding,
    /// The d distinct roots, one Frobenius orbit, ascending by packed index.
    pub roots: Vec<Fq>,
}

pub fn roots_in_extension(v: &Poly, d: u32) -> Result<ExtensionRoots> {
    let small = v.field();
    if v.degree() != Some(d as usize) || !v.is_monic() || !is_irreducible(v)? {
        return Err(Error::NotIrreducible(v.render("x")));
    }
    let big = Field::make(small.p(), small.m() * d)?;
    let emb = Embedding::new(small, &big)?;
    let vb = v.map_into(&emb);
    let mut roots: Vec<Fq> = big.elements().filter(|&c| vb.eval(c) == big.zero()).collect();
    roots.sort();
    if roots.len() != d as usize {
        return Err(Error::pre(format!(
            "expected {d} roots, found {} (irreducibility check inconsistent)",
            roots.len()
        )));
    }
    Ok(ExtensionRoots { big, emb, roots })
}
