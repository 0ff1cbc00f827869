//! Newton interpolation of character products on the finite approximation
//! sets A(d), Wagner partial sums, and exact verification of the product
//! expansions that drive the limit arguments downstream.
//!
//! Everything here is exact arithmetic over K[t_1..t_s, z]; the checkers
//! return an `IdentityReport` whose witness pinpoints the first differing
//! monomial on failure.

use crate::algebra::{enumerate_monic, Frac, MonicMode, Poly};
use crate::carlitz::CarlitzCache;
use crate::mvpoly::{Binding, MultiPoly, Vars};
use crate::report::{compare_exact, IdentityReport};
use crate::{Error, Result};
use std::time::Instant;

/// Interpolant of a character product on A(d), of z-degree below q^d.
pub struct InterpolationPolynomial {
    pub poly: MultiPoly<Frac>,
    pub d: u32,
    /// Variable slots of the characters entering the product.
    pub char_indices: Vec<usize>,
}

/// Interpolate arbitrary coefficient values on A(d):
/// sum_a f(a) ell_d E_d(z) / (z - a), using that E_d(z - a) = E_d(z) for
/// a in the kernel. The closure returns the value at a as a polynomial in
/// the t-variables (z-degree zero).
pub fn interpolate(
    cache: &CarlitzCache,
    d: u32,
    vars: &Vars,
    z_index: usize,
    f: impl Fn(&Poly) -> Result<MultiPoly<Frac>>,
) -> Result<MultiPoly<Frac>> {
    let field = cache.field();
    let zero = Frac::zero(field);
    let q = cache.q();
    let deg = q
        .checked_pow(d)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| Error::Overflow(format!("q^{d} points is out of reach")))?;

    // Work with D_d E_d, whose coefficients are integral, so the per-point
    // synthetic division stays inside A; the single fraction ell_d / D_d
    // is applied once at the end.
    let dd = cache.d_poly(d)?;
    let mut dense = vec![Poly::zero(field); deg + 1];
    for i in 0..=d {
        let qi = q.pow(i);
        let den = cache.d_poly(i)?.mul(&cache.ell(d - i)?.pow(qi)?)?;
        dense[qi as usize] = dd.exact_div(&den)?;
    }

    let mut out = MultiPoly::zero(vars, &zero);
    let mut qc = vec![Poly::zero(field); deg];
    for a in enumerate_monic(field, d, MonicMode::DegreeBelow)? {
        // Divide by (z - a) with descending Horner steps.
        qc[deg - 1] = dense[deg].clone();
        for j in (1..deg).rev() {
            let next = dense[j].add(&a.mul(&qc[j])?)?;
            qc[j - 1] = next;
        }
        debug_assert!(dense[0].add(&a.mul(&qc[0])?).unwrap().is_zero());
        let value = f(&a)?;
        if value.is_zero() {
            continue;
        }
        for (tm, cf) in value.terms() {
            for (j, qcj) in qc.iter().enumerate() {
                if qcj.is_zero() {
                    continue;
                }
                let mut mono = tm.clone();
                mono.0[z_index] += j as u32;
                out.add_term(mono, cf.mul(&Frac::from_poly(qcj.clone()))?)?;
            }
        }
    }
    out.scalar_mul(&Frac::new(cache.ell(d)?, dd)?)
}

/// N^(d) of the product of the characters at `char_indices`, built over
/// K[t_1..t_s, z] with z in the last slot.
pub fn newton_interp(
    cache: &CarlitzCache,
    s: usize,
    char_indices: &[usize],
    d: u32,
) -> Result<InterpolationPolynomial> {
    let vars = Vars::t_z(s);
    let z_index = s;
    if char_indices.iter().any(|&i| i >= s) {
        return Err(Error::pre("character index outside 1..s"));
    }
    let poly = interpolate(cache, d, &vars, z_index, |a| {
        cache.chi_product(a, &vars, char_indices)
    })?;
    let out = InterpolationPolynomial {
        poly,
        d,
        char_indices: char_indices.to_vec(),
    };
    #[cfg(debug_assertions)]
    out.debug_check(cache, z_index)?;
    Ok(out)
}

impl InterpolationPolynomial {
    /// Interpolation invariants: z-degree below q^d and agreement with the
    /// character product at every point of A(d). Exponential in d, so only
    /// exercised for small point sets.
    #[cfg(debug_assertions)]
    fn debug_check(&self, cache: &CarlitzCache, z_index: usize) -> Result<()> {
        match cache.q().checked_pow(self.d) {
            Some(n) if n <= 27 && self.char_indices.len() <= 2 => {}
            _ => return Ok(()),
        }
        if let Some(dz) = self.poly.degree_in(z_index) {
            debug_assert!((dz as u64) < cache.q().pow(self.d), "interpolant z-degree too large");
        }
        let vars = self.poly.vars().clone();
        for a in enumerate_monic(cache.field(), self.d, MonicMode::DegreeBelow)? {
            let at_a = self
                .poly
                .substitute(&[(z_index, Binding::Value(Frac::from_poly(a.clone())))])?;
            let expect = cache.chi_product(&a, &vars, &self.char_indices)?;
            debug_assert!(
                at_a == expect,
                "interpolant disagrees with character product at a point"
            );
        }
        Ok(())
    }
}

/// Wagner partial sum sum_{j<d} b_j(t) E_j(z) over K[t, z].
pub fn wagner_partial(cache: &CarlitzCache, d: u32) -> Result<MultiPoly<Frac>> {
    let vars = Vars::t_z(1);
    let zero = Frac::zero(cache.field());
    let mut out = MultiPoly::zero(&vars, &zero);
    for j in 0..d {
        let bj = cache.b_poly(j, &vars, 0)?;
        let ej = cache.e_poly(j, &vars, 1)?;
        out = out.add(&bj.mul(&ej)?)?;
    }
    Ok(out)
}

/// The single-character interpolant rehomed so its t lives at slot
/// `t_index` of an s-variable algebra.
fn single_char_at(
    cache: &CarlitzCache,
    d: u32,
    vars: &Vars,
    t_index: usize,
) -> Result<MultiPoly<Frac>> {
    let one_var = newton_interp(cache, 1, &[0], d)?;
    one_var.poly.promote(vars, &[t_index, vars.len() - 1])
}

/// All 0/1 masks of length s with exactly l ones, in lexicographic order
/// of the underlying bit pattern.
fn masks(s: usize, l: usize) -> Vec<Vec<bool>> {
    let mut out = vec![];
    for bits in 0u32..(1 << s) {
        if bits.count_ones() as usize == l {
            out.push((0..s).map(|i| bits >> i & 1 == 1).collect());
        }
    }
    out
}

/// Direct interpolation of chi_t against the Wagner partial sum.
pub fn verify_interp_identity(cache: &CarlitzCache, d: u32) -> Result<IdentityReport> {
    let started = Instant::now();
    let lhs = newton_interp(cache, 1, &[0], d)?.poly;
    let rhs = wagner_partial(cache, d)?;
    compare_exact(
        "interp",
        serde_json::json!({"q": cache.q(), "d": d}),
        &lhs,
        &rhs,
        started,
    )
}

/// The interpolant of a full character product against the product of the
/// one-character interpolants with its correction sum: for s <= q-1 the
/// correction is empty and the plain product already interpolates.
pub fn verify_product_identity(cache: &CarlitzCache, s: usize, d: u32) -> Result<IdentityReport> {
    let q = cache.q() as usize;
    if s < 1 || s > 2 * (q - 1) {
        return Err(Error::pre("s must lie in 1..=2(q-1)"));
    }
    let started = Instant::now();
    let vars = Vars::t_z(s);
    let z_index = s;
    let zero = Frac::zero(cache.field());

    let all: Vec<usize> = (0..s).collect();
    let lhs = newton_interp(cache, s, &all, d + 1)?.poly;

    let mut product = MultiPoly::one(&vars, &zero);
    for i in 0..s {
        product = product.mul(&single_char_at(cache, d + 1, &vars, i)?)?;
    }

    let mut rhs = product;
    if s >= q {
        let n_d: Vec<MultiPoly<Frac>> = (0..s)
            .map(|i| single_char_at(cache, d, &vars, i))
            .collect::<Result<_>>()?;
        let b_d: Vec<MultiPoly<Frac>> = (0..s)
            .map(|i| cache.b_poly(d, &vars, i))
            .collect::<Result<_>>()?;
        let ed = cache.e_poly(d, &vars, z_index)?;
        let ed1 = cache.e_poly(d + 1, &vars, z_index)?;
        let bracket = Frac::from_poly(cache.bracket(d + 1)?);
        let mut correction = MultiPoly::zero(&vars, &zero);
        for l in q..=s {
            let mut level = MultiPoly::zero(&vars, &zero);
            for mask in masks(s, l) {
                let mut prod = MultiPoly::one(&vars, &zero);
                for i in 0..s {
                    prod = prod.mul(if mask[i] { &b_d[i] } else { &n_d[i] })?;
                }
                level = level.add(&prod)?;
            }
            correction = correction.add(&level.mul(&ed.pow((l - q) as u64)?)?)?;
        }
        correction = correction.mul(&ed1)?.scalar_mul(&bracket)?;
        rhs = rhs.sub(&correction)?;
    }

    compare_exact(
        "interp-product",
        serde_json::json!({"q": cache.q(), "s": s, "d": d}),
        &lhs,
        &rhs,
        started,
    )
}

/// The four-term expansion of the full product interpolant at s = 2q-1,
/// the first case past the reach of the plain correction sum.
pub fn verify_obstruction_identity(cache: &CarlitzCache, d: u32) -> Result<IdentityReport> {
    if d == 0 {
        return Err(Error::pre("the expansion references level d-1"));
    }
    let started = Instant::now();
    let q = cache.q() as usize;
    let s = 2 * q - 1;
    let vars = Vars::t_z(s);
    let z_index = s;
    let zero = Frac::zero(cache.field());

    let all: Vec<usize> = (0..s).collect();
    let lhs = newton_interp(cache, s, &all, d + 1)?.poly;

    let n_d: Vec<MultiPoly<Frac>> = (0..s)
        .map(|i| single_char_at(cache, d, &vars, i))
        .collect::<Result<_>>()?;
    let b_dm1: Vec<MultiPoly<Frac>> = (0..s)
        .map(|i| cache.b_poly(d - 1, &vars, i))
        .collect::<Result<_>>()?;
    let b_d: Vec<MultiPoly<Frac>> = (0..s)
        .map(|i| cache.b_poly(d, &vars, i))
        .collect::<Result<_>>()?;
    let ed = cache.e_poly(d, &vars, z_index)?;
    let ed1 = cache.e_poly(d + 1, &vars, z_index)?;
    let br_d = Frac::from_poly(cache.bracket(d)?);
    let br_d1 = Frac::from_poly(cache.bracket(d + 1)?);

    let mut rhs = MultiPoly::one(&vars, &zero);
    for i in 0..s {
        rhs = rhs.mul(&single_char_at(cache, d + 1, &vars, i)?)?;
    }

    // Mixed-level term over |alpha| = q-1.
    let mut mixed = MultiPoly::zero(&vars, &zero);
    for mask in masks(s, q - 1) {
        let mut prod = MultiPoly::one(&vars, &zero);
        for i in 0..s {
            prod = prod.mul(if mask[i] { &b_d[i] } else { &b_dm1[i] })?;
        }
        mixed = mixed.add(&prod)?;
    }
    mixed = mixed
        .mul(&ed1)?
        .scalar_mul(&br_d.mul(&br_d1)?)?;
    rhs = rhs.sub(&mixed)?;

    // Full top-level b-product times 1 + E_d^(q-1).
    let mut full_b = MultiPoly::one(&vars, &zero);
    for i in 0..s {
        full_b = full_b.mul(&b_d[i])?;
    }
    let one_plus = MultiPoly::one(&vars, &zero).add(&ed.pow((q - 1) as u64)?)?;
    let top = full_b.mul(&one_plus)?.mul(&ed1)?.scalar_mul(&br_d1)?;
    rhs = rhs.sub(&top)?;

    // k-indexed sum for q <= k <= 2(q-1).
    let mut tail = MultiPoly::zero(&vars, &zero);
    for k in q..=2 * (q - 1) {
        let mut level = MultiPoly::zero(&vars, &zero);
        for mask in masks(s, k) {
            let mut prod = MultiPoly::one(&vars, &zero);
            for i in 0..s {
                prod = prod.mul(if mask[i] { &b_d[i] } else { &n_d[i] })?;
            }
            level = level.add(&prod)?;
        }
        tail = tail.add(&level.mul(&ed.pow((k - q) as u64)?)?)?;
    }
    tail = tail.mul(&ed1)?.scalar_mul(&br_d1)?;
    rhs = rhs.sub(&tail)?;

    compare_exact(
        "obstruction",
        serde_json::json!({"q": cache.q(), "s": s, "d": d}),
        &lhs,
        &rhs,
        started,
    )
}
