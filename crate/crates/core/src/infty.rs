//! Finite-precision arithmetic at the infinite place.
//!
//! The completion K_inf is modeled as truncated Laurent series in u = 1/x
//! with |x| = q; the ramified degree-(q-1) extension adjoining a root i of
//! X^(q-1) + x is modeled by its explicit grading (components i^0..i^(q-2)
//! with K_inf coordinates); Tate algebras are polynomials in t-variables
//! with such coefficients under a per-variable degree cap.
//!
//! Every value carries an absolute precision: coefficients of u^i for
//! i >= prec are unknown. Operations propagate precision by the ultrametric
//! rules documented on each method; nothing here ever claims more accuracy
//! than the inputs support.

use crate::algebra::{Field, Fq, Frac, Poly};
use crate::mvpoly::{MultiPoly, Ring, Vars};
use crate::{Error, Result};
use std::sync::Arc;

/// Sentinel precision for exact elements. Kept far from i64::MAX so the
/// saturating precision arithmetic cannot overflow.
pub const PREC_EXACT: i64 = i64::MAX / 4;

fn sat(p: i64) -> i64 {
    p.clamp(-PREC_EXACT, PREC_EXACT)
}

/// Laurent series in u = 1/x over a finite field, truncated at an absolute
/// precision: the coefficients of u^i are known for i < prec.
///
/// Representation: `coeffs[k]` is the coefficient of u^(val + k); leading
/// and trailing zeros are trimmed, and an element with no known nonzero
/// coefficient (zero mod u^prec) has empty coeffs and val == prec.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncatedLaurent {
    field: Arc<Field>,
    val: i64,
    coeffs: Vec<Fq>,
    prec: i64,
}

pub type Laurent = TruncatedLaurent;

impl TruncatedLaurent {
    fn normalized(field: Arc<Field>, mut val: i64, mut coeffs: Vec<Fq>, prec: i64) -> Laurent {
        let zero = field.zero();
        let lead = coeffs.iter().position(|&c| c != zero);
        match lead {
            None => {
                coeffs.clear();
                val = prec;
            }
            Some(k) => {
                coeffs.drain(..k);
                val += k as i64;
                // Drop anything at or beyond the precision horizon.
                if prec < PREC_EXACT {
                    let window = sat(prec - val).max(0) as usize;
                    coeffs.truncate(window);
                }
                while coeffs.last() == Some(&zero) {
                    coeffs.pop();
                }
                if coeffs.is_empty() {
                    val = prec;
                }
            }
        }
        TruncatedLaurent { field, val, coeffs, prec }
    }

    pub fn zero(field: &Arc<Field>) -> Laurent {
        TruncatedLaurent {
            field: field.clone(),
            val: PREC_EXACT,
            coeffs: vec![],
            prec: PREC_EXACT,
        }
    }

    /// The zero element known only modulo u^prec.
    pub fn zero_mod(field: &Arc<Field>, prec: i64) -> Laurent {
        TruncatedLaurent {
            field: field.clone(),
            val: prec,
            coeffs: vec![],
            prec,
        }
    }

    pub fn constant(field: &Arc<Field>, c: Fq) -> Laurent {
        Laurent::monomial(field, c, 0)
    }

    pub fn one(field: &Arc<Field>) -> Laurent {
        Laurent::constant(field, field.one())
    }

    /// c * u^k, exact.
    pub fn monomial(field: &Arc<Field>, c: Fq, k: i64) -> Laurent {
        if c == field.zero() {
            return Laurent::zero(field);
        }
        TruncatedLaurent {
            field: field.clone(),
            val: k,
            coeffs: vec![c],
            prec: PREC_EXACT,
        }
    }

    /// x = u^(-1), exact.
    pub fn theta(field: &Arc<Field>) -> Laurent {
        Laurent::monomial(field, field.one(), -1)
    }

    /// Exact image of a polynomial in x: x^k contributes at u^(-k).
    pub fn from_poly(p: &Poly) -> Laurent {
        let field = p.field().clone();
        match p.degree() {
            None => Laurent::zero(&field),
            Some(d) => {
                let coeffs: Vec<Fq> = (0..=d).rev().map(|i| p.coeff(i)).collect();
                Laurent::normalized(field, -(d as i64), coeffs, PREC_EXACT)
            }
        }
    }

    /// Image of an element of K to the requested precision.
    pub fn from_frac(f: &Frac, prec: i64) -> Result<Laurent> {
        let num = Laurent::from_poly(f.num());
        if num.is_zero_mod() {
            return Ok(Laurent::zero(f.field()));
        }
        let num_deg = f.num().degree().unwrap_or(0) as i64;
        let den_deg = f.den().degree().unwrap_or(0) as i64;
        // Window deep enough both for the cancellation against the
        // numerator and for a denominator larger than the requested
        // precision (the value is then zero mod u^prec, not an error).
        let den = Laurent::from_poly(f.den());
        let inv = den.invert_to(sat(prec + num_deg.max(den_deg) + 1))?;
        Ok(num.mul(&inv)?.truncate(prec))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// True when no nonzero coefficient is known (the element is zero
    /// modulo u^prec; for exact elements, genuinely zero).
    pub fn is_zero_mod(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= PREC_EXACT
    }

    /// Valuation: the u-order of the leading known coefficient.
    pub fn val(&self) -> Option<i64> {
        if self.is_zero_mod() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Coefficient of u^i; None when i is beyond the precision horizon.
    pub fn coeff_at(&self, i: i64) -> Option<Fq> {
        if i >= self.prec {
            return None;
        }
        if i < self.val || i >= self.val + self.coeffs.len() as i64 {
            Some(self.field.zero())
        } else {
            Some(self.coeffs[(i - self.val) as usize])
        }
    }

    fn check_field(&self, other: &Laurent) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Forget everything at or beyond u^new_prec. A true zero survives
    /// unweakened: every window of it is still exactly zero.
    pub fn truncate(&self, new_prec: i64) -> Laurent {
        if new_prec >= self.prec || (self.is_zero_mod() && self.is_exact()) {
            return self.clone();
        }
        Laurent::normalized(self.field.clone(), self.val, self.coeffs.clone(), new_prec)
    }

    /// Precision: min of the two operands.
    pub fn add(&self, other: &Laurent) -> Result<Laurent> {
        self.check_field(other)?;
        let prec = self.prec.min(other.prec);
        if self.is_zero_mod() && other.is_zero_mod() {
            return Ok(if prec >= PREC_EXACT {
                Laurent::zero(&self.field)
            } else {
                Laurent::zero_mod(&self.field, prec)
            });
        }
        let start = self.val.min(other.val).min(prec);
        let self_end = if self.coeffs.is_empty() {
            start
        } else {
            self.val + self.coeffs.len() as i64
        };
        let other_end = if other.coeffs.is_empty() {
            start
        } else {
            other.val + other.coeffs.len() as i64
        };
        let end = self_end.max(other_end).min(sat(prec)).max(start);
        let len = (end - start) as usize;
        let mut coeffs = vec![self.field.zero(); len];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let i = self.val + k as i64;
            if i < end {
                coeffs[(i - start) as usize] = c;
            }
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            let i = other.val + k as i64;
            if i < end {
                let slot = &mut coeffs[(i - start) as usize];
                *slot = self.field.add(*slot, c);
            }
        }
        Ok(Laurent::normalized(self.field.clone(), start, coeffs, prec))
    }

    pub fn neg(&self) -> Laurent {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        TruncatedLaurent {
            field: self.field.clone(),
            val: self.val,
            coeffs,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Laurent) -> Result<Laurent> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Fq) -> Laurent {
        if c == self.field.zero() {
            return if self.is_exact() {
                Laurent::zero(&self.field)
            } else {
                Laurent::zero_mod(&self.field, self.prec)
            };
        }
        let coeffs = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        TruncatedLaurent {
            field: self.field.clone(),
            val: self.val,
            coeffs,
            prec: self.prec,
        }
    }

    /// Shift by u^k (exact monomial multiple).
    pub fn mul_monomial(&self, c: Fq, k: i64) -> Laurent {
        let scaled = self.scale(c);
        let prec = if scaled.is_exact() {
            PREC_EXACT
        } else {
            sat(scaled.prec + k)
        };
        if scaled.is_zero_mod() {
            return if scaled.is_exact() {
                scaled
            } else {
                Laurent::zero_mod(&self.field, prec)
            };
        }
        TruncatedLaurent {
            field: scaled.field,
            val: scaled.val + k,
            coeffs: scaled.coeffs,
            prec,
        }
    }

    /// Precision: min(N1 + v2, N2 + v1), the ultrametric product rule.
    pub fn mul(&self, other: &Laurent) -> Result<Laurent> {
        self.check_field(other)?;
        // Zero-mod factors: the product is zero mod the propagated
        // precision, except that a true (exact) zero annihilates outright.
        if self.is_zero_mod() || other.is_zero_mod() {
            if (self.is_zero_mod() && self.is_exact()) || (other.is_zero_mod() && other.is_exact())
            {
                return Ok(Laurent::zero(&self.field));
            }
            let p1 = sat(self.prec + other.val().unwrap_or(other.prec));
            let p2 = sat(other.prec + self.val().unwrap_or(self.prec));
            return Ok(Laurent::zero_mod(&self.field, p1.min(p2)));
        }
        let prec = if self.is_exact() && other.is_exact() {
            PREC_EXACT
        } else {
            sat(self.prec + other.val).min(sat(other.prec + self.val))
        };
        let val = self.val + other.val;
        let window = if prec >= PREC_EXACT {
            self.coeffs.len() + other.coeffs.len() - 1
        } else {
            ((prec - val).max(0) as usize).min(self.coeffs.len() + other.coeffs.len() - 1)
        };
        let mut coeffs = vec![self.field.zero(); window];
        if self.field.is_prime_field() {
            let p = self.field.p();
            let mut acc = vec![0u64; window];
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a.0 == 0 || i >= window {
                    continue;
                }
                let hi = (window - i).min(other.coeffs.len());
                for (j, &b) in other.coeffs[..hi].iter().enumerate() {
                    acc[i + j] += a.0 as u64 * b.0 as u64;
                }
            }
            for (slot, &v) in coeffs.iter_mut().zip(acc.iter()) {
                *slot = Fq((v % p) as u16);
            }
        } else {
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a == self.field.zero() || i >= window {
                    continue;
                }
                let hi = (window - i).min(other.coeffs.len());
                for (j, &b) in other.coeffs[..hi].iter().enumerate() {
                    coeffs[i + j] = self.field.add(coeffs[i + j], self.field.mul(a, b));
                }
            }
        }
        Ok(Laurent::normalized(self.field.clone(), val, coeffs, prec))
    }

    /// Inverse computed out to min(target, N - 2v) absolute precision; the
    /// natural rule N - 2v is the best an inexact input supports.
    pub fn invert_to(&self, target: i64) -> Result<Laurent> {
        if self.is_zero_mod() {
            return Err(Error::NotInvertible(
                "zero modulo its precision has no inverse".into(),
            ));
        }
        let v = self.val;
        let prec_out = sat(self.prec - 2 * v).min(target);
        if prec_out <= -v {
            return Err(Error::pre("requested inverse precision is below its own leading term"));
        }
        let window = (prec_out + v) as usize;
        let a0_inv = self.field.inv(self.coeffs[0])?;
        let mut rec = vec![self.field.zero(); window];
        rec[0] = a0_inv;
        for n in 1..window {
            let mut s = self.field.zero();
            let hi = n.min(self.coeffs.len() - 1);
            for k in 1..=hi {
                s = self.field.add(s, self.field.mul(self.coeffs[k], rec[n - k]));
            }
            rec[n] = self.field.neg(self.field.mul(a0_inv, s));
        }
        Ok(Laurent::normalized(self.field.clone(), -v, rec, prec_out))
    }

    /// Natural-precision inverse; exact inputs must be monomials (use
    /// invert_to to develop an exact series inverse to chosen precision).
    pub fn invert(&self) -> Result<Laurent> {
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(Laurent::monomial(
                    &self.field,
                    self.field.inv(self.coeffs[0])?,
                    -self.val,
                ));
            }
            return Err(Error::NotInvertible(
                "exact series inverse needs a target precision".into(),
            ));
        }
        self.invert_to(PREC_EXACT)
    }

    /// Frobenius x -> x^(q^e): coefficients to the q^e, u-exponents scaled
    /// by q^e. Char-p exactness makes the precision q^e * N.
    pub fn q_power(&self, q: u64, e: u32) -> Result<Laurent> {
        if e == 0 {
            return Ok(self.clone());
        }
        let qe = q
            .checked_pow(e)
            .and_then(|v| i64::try_from(v).ok())
            .ok_or_else(|| Error::Overflow(format!("q^{e} exceeds i64")))?;
        let prec = sat(self.prec.saturating_mul(qe));
        if self.is_zero_mod() {
            return Ok(Laurent::zero_mod(&self.field, prec));
        }
        let val = self
            .val
            .checked_mul(qe)
            .ok_or_else(|| Error::Overflow("valuation overflow in Frobenius".into()))?;
        let window = (self.coeffs.len() - 1) * qe as usize + 1;
        let mut coeffs = vec![self.field.zero(); window];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != self.field.zero() {
                coeffs[i * qe as usize] = self.field.pow(c, qe as u64);
            }
        }
        Ok(Laurent::normalized(self.field.clone(), val, coeffs, prec))
    }

    /// Lift coefficients along a field embedding (same u-structure).
    pub fn map_into(&self, emb: &crate::algebra::Embedding) -> Laurent {
        let coeffs = self.coeffs.iter().map(|&c| emb.apply(c)).collect();
        TruncatedLaurent {
            field: emb.big().clone(),
            val: self.val,
            coeffs,
            prec: self.prec,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|&c| {
                if self.field.is_prime_field() {
                    serde_json::json!(c.0)
                } else {
                    serde_json::json!(self.field.coords(c))
                }
            })
            .collect();
        serde_json::json!({
            "valuation": if self.is_zero_mod() { serde_json::Value::Null } else { serde_json::json!(self.val) },
            "coefficients": coeffs,
            "precision": if self.is_exact() { serde_json::json!("exact") } else { serde_json::json!(self.prec) },
        })
    }
}

/// Element of the ramified extension K_inf(i), i^(q-1) = -x, stored by
/// grading slots: the element is sum_r i^r * slots[r] for 0 <= r <= q-2.
/// The grading base q need not equal the coefficient field's order: series
/// with coefficients in an extension of F_q keep the base-q grading.
#[derive(Clone, PartialEq, Debug)]
pub struct RamifiedElement {
    base_q: u64,
    slots: Vec<TruncatedLaurent>,
}

pub type Ramified = RamifiedElement;

impl RamifiedElement {
    pub fn zero(field: &Arc<Field>, base_q: u64) -> Ramified {
        RamifiedElement {
            base_q,
            slots: vec![Laurent::zero(field); (base_q - 1) as usize],
        }
    }

    /// i^slot * value, all other slots exactly zero.
    pub fn pure(base_q: u64, slot: usize, value: Laurent) -> Ramified {
        let mut out = RamifiedElement::zero(value.field(), base_q);
        out.slots[slot] = value;
        out
    }

    pub fn from_laurent(base_q: u64, value: Laurent) -> Ramified {
        RamifiedElement::pure(base_q, 0, value)
    }

    pub fn iota(field: &Arc<Field>, base_q: u64) -> Ramified {
        RamifiedElement::pure(base_q, 1, Laurent::one(field))
    }

    pub fn field(&self) -> &Arc<Field> {
        self.slots[0].field()
    }

    pub fn base_q(&self) -> u64 {
        self.base_q
    }

    pub fn slot(&self, r: usize) -> &Laurent {
        &self.slots[r]
    }

    pub fn is_zero_mod(&self) -> bool {
        self.slots.iter().all(Laurent::is_zero_mod)
    }

    /// True when every slot other than `slot` is exactly zero.
    pub fn is_pure(&self, slot: usize) -> bool {
        self.slots
            .iter()
            .enumerate()
            .all(|(r, l)| r == slot || (l.is_zero_mod() && l.is_exact()))
    }

    /// Valuation in scaled units of 1/(q-1): v_scaled(i^r x_r) =
    /// (q-1) v(x_r) - r, minimized over slots. None for zero-mod elements.
    pub fn scaled_val(&self) -> Option<i64> {
        let k = self.base_q as i64 - 1;
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(r, l)| l.val().map(|v| k * v - r as i64))
            .min()
    }

    /// Precision horizon in the same scaled units.
    pub fn scaled_prec(&self) -> i64 {
        let k = self.base_q as i64 - 1;
        self.slots
            .iter()
            .enumerate()
            .map(|(r, l)| sat(k.saturating_mul(l.prec())) - r as i64)
            .min()
            .unwrap()
    }

    fn check(&self, other: &Ramified) -> Result<()> {
        if self.base_q != other.base_q {
            return Err(Error::pre("ramified grading mismatch"));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Ramified) -> Result<Ramified> {
        self.check(other)?;
        let slots = self
            .slots
            .iter()
            .zip(other.slots.iter())
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(RamifiedElement { base_q: self.base_q, slots })
    }

    pub fn neg(&self) -> Ramified {
        RamifiedElement {
            base_q: self.base_q,
            slots: self.slots.iter().map(Laurent::neg).collect(),
        }
    }

    pub fn sub(&self, other: &Ramified) -> Result<Ramified> {
        self.add(&other.neg())
    }

    /// i^a i^b = i^((a+b) mod (q-1)) * (-x)^((a+b) div (q-1)).
    pub fn mul(&self, other: &Ramified) -> Result<Ramified> {
        self.check(other)?;
        let field = self.field().clone();
        let k = (self.base_q - 1) as usize;
        let minus_theta = Laurent::monomial(&field, field.from_int(-1), -1);
        let mut slots = vec![Laurent::zero(&field); k];
        for (r, a) in self.slots.iter().enumerate() {
            if a.is_zero_mod() && a.is_exact() {
                continue;
            }
            for (s, b) in other.slots.iter().enumerate() {
                if b.is_zero_mod() && b.is_exact() {
                    continue;
                }
                let mut prod = a.mul(b)?;
                let mut slot = r + s;
                if slot >= k {
                    slot -= k;
                    prod = prod.mul(&minus_theta)?;
                }
                slots[slot] = slots[slot].add(&prod)?;
            }
        }
        Ok(RamifiedElement { base_q: self.base_q, slots })
    }

    pub fn mul_laurent(&self, other: &Laurent) -> Result<Ramified> {
        let slots = self
            .slots
            .iter()
            .map(|a| a.mul(other))
            .collect::<Result<_>>()?;
        Ok(RamifiedElement { base_q: self.base_q, slots })
    }

    pub fn scale(&self, c: Fq) -> Ramified {
        RamifiedElement {
            base_q: self.base_q,
            slots: self.slots.iter().map(|l| l.scale(c)).collect(),
        }
    }

    pub fn truncate(&self, new_prec: i64) -> Ramified {
        RamifiedElement {
            base_q: self.base_q,
            slots: self.slots.iter().map(|l| l.truncate(new_prec)).collect(),
        }
    }

    /// Frobenius y -> y^(q^e). On the grading, i^q = i * (-x), so slot r
    /// picks up (-x)^r per application.
    pub fn q_power(&self, e: u32) -> Result<Ramified> {
        let field = self.field().clone();
        let mut out = self.clone();
        for _ in 0..e {
            let mut slots = Vec::with_capacity(out.slots.len());
            for (r, l) in out.slots.iter().enumerate() {
                let pow = l.q_power(self.base_q, 1)?;
                let minus_theta_r = Laurent::monomial(&field, field.from_int(-1), -1)
                    .power(r as u64)?;
                slots.push(pow.mul(&minus_theta_r)?);
            }
            out = RamifiedElement { base_q: self.base_q, slots };
        }
        Ok(out)
    }

    /// Inverse via the norm: the product of the conjugates x -> (slots
    /// scaled by zeta^r), zeta over F_q^*, is pure of slot 0, so one
    /// Laurent inversion finishes the job.
    pub fn invert(&self, target: i64) -> Result<Ramified> {
        if self.is_zero_mod() {
            return Err(Error::NotInvertible(
                "zero modulo its precision has no inverse".into(),
            ));
        }
        let field = self.field().clone();
        // F_q^* inside the coefficient field: the elements fixed by the
        // base-q Frobenius.
        let mut units: Vec<Fq> = field
            .elements()
            .filter(|&a| a != field.zero() && field.pow(a, self.base_q) == a)
            .collect();
        units.sort_by_key(|c| c.0);
        let mut cofactor: Option<Ramified> = None;
        for &zeta in &units {
            if zeta == field.one() {
                continue;
            }
            let conj = self.conjugate(zeta);
            cofactor = Some(match cofactor {
                None => conj,
                Some(c) => c.mul(&conj)?,
            });
        }
        let cofactor = match cofactor {
            Some(c) => c,
            // q = 2 would have an empty product; gradings there are trivial.
            None => RamifiedElement::from_laurent(self.base_q, Laurent::one(&field)),
        };
        let norm = self.mul(&cofactor)?;
        for r in 1..norm.slots.len() {
            debug_assert!(
                norm.slots[r].is_zero_mod(),
                "norm of a ramified element must be slot-0 pure"
            );
        }
        let inv0 = norm.slots[0].invert_to(target)?;
        cofactor.mul_laurent(&inv0)
    }

    /// The conjugate sending i to zeta * i.
    fn conjugate(&self, zeta: Fq) -> Ramified {
        let field = self.field();
        let slots = self
            .slots
            .iter()
            .enumerate()
            .map(|(r, l)| l.scale(field.pow(zeta, r as u64)))
            .collect();
        RamifiedElement { base_q: self.base_q, slots }
    }

    pub fn map_into(&self, emb: &crate::algebra::Embedding) -> Ramified {
        RamifiedElement {
            base_q: self.base_q,
            slots: self.slots.iter().map(|l| l.map_into(emb)).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.slots.iter().map(Laurent::to_json).collect())
    }
}

impl TruncatedLaurent {
    /// Small positive power by repeated multiplication.
    pub fn power(&self, e: u64) -> Result<Laurent> {
        let mut out = Laurent::one(&self.field);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

impl RamifiedElement {
    pub fn power(&self, e: u64) -> Result<Ramified> {
        let mut out = RamifiedElement::from_laurent(self.base_q, Laurent::one(self.field()));
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

impl Ring for TruncatedLaurent {
    fn zero_like(&self) -> Self {
        Laurent::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        Laurent::one(&self.field)
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        TruncatedLaurent::add(self, rhs)
    }
    fn neg(&self) -> Self {
        TruncatedLaurent::neg(self)
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        TruncatedLaurent::mul(self, rhs)
    }
    fn is_zero(&self) -> bool {
        // Zero only when exactly zero; a zero-mod-precision coefficient
        // still carries information and must not be silently dropped.
        self.is_zero_mod() && self.is_exact()
    }
    fn inv(&self) -> Result<Self> {
        self.invert()
    }
    fn q_power(&self, q: u64, e: u32) -> Result<Self> {
        TruncatedLaurent::q_power(self, q, e)
    }
}

impl Ring for RamifiedElement {
    fn zero_like(&self) -> Self {
        RamifiedElement::zero(self.field(), self.base_q)
    }
    fn one_like(&self) -> Self {
        RamifiedElement::from_laurent(self.base_q, Laurent::one(self.field()))
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        RamifiedElement::add(self, rhs)
    }
    fn neg(&self) -> Self {
        RamifiedElement::neg(self)
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        RamifiedElement::mul(self, rhs)
    }
    fn is_zero(&self) -> bool {
        self.slots.iter().all(|l| l.is_zero_mod() && l.is_exact())
    }
    fn inv(&self) -> Result<Self> {
        self.invert(PREC_EXACT)
    }
    fn q_power(&self, q: u64, e: u32) -> Result<Self> {
        debug_assert_eq!(q, self.base_q, "Frobenius base must match the grading");
        RamifiedElement::q_power(self, e)
    }
}

/// Common view of the two coefficient types for norm and precision logic;
/// `unit` is the number of scaled valuation steps per power of u.
pub trait Analytic: Ring {
    fn scaled_val(&self) -> Option<i64>;
    fn scaled_prec(&self) -> i64;
    fn unit(&self) -> i64;
    fn truncate_to(&self, u_prec: i64) -> Self;
}

impl Analytic for TruncatedLaurent {
    fn scaled_val(&self) -> Option<i64> {
        self.val()
    }
    fn scaled_prec(&self) -> i64 {
        self.prec()
    }
    fn unit(&self) -> i64 {
        1
    }
    fn truncate_to(&self, u_prec: i64) -> Self {
        self.truncate(u_prec)
    }
}

impl Analytic for RamifiedElement {
    fn scaled_val(&self) -> Option<i64> {
        RamifiedElement::scaled_val(self)
    }
    fn scaled_prec(&self) -> i64 {
        RamifiedElement::scaled_prec(self)
    }
    fn unit(&self) -> i64 {
        self.base_q as i64 - 1
    }
    fn truncate_to(&self, u_prec: i64) -> Self {
        self.truncate(u_prec)
    }
}

/// Polynomial over Laurent or Ramified coefficients under a per-variable
/// degree cap. Monomials beyond the cap are identically dropped; equality
/// is only ever certified up to (cap, precision).
#[derive(Clone, Debug)]
pub struct TateTruncation<C: Analytic> {
    pub poly: MultiPoly<C>,
    pub cap: u32,
}

pub type Tate<C> = TateTruncation<C>;

impl<C: Analytic> TateTruncation<C> {
    pub fn zero(vars: &Vars, cap: u32, exemplar: &C) -> Tate<C> {
        TateTruncation {
            poly: MultiPoly::zero(vars, exemplar),
            cap,
        }
    }

    pub fn constant(vars: &Vars, cap: u32, c: C) -> Tate<C> {
        TateTruncation {
            poly: MultiPoly::constant(vars, c),
            cap,
        }
    }

    pub fn from_poly(poly: MultiPoly<C>, cap: u32) -> Tate<C> {
        let all: Vec<usize> = (0..poly.vars().len()).collect();
        TateTruncation {
            poly: poly.truncate_vars(&all, cap),
            cap,
        }
    }

    fn check(&self, other: &Tate<C>) -> Result<()> {
        if self.cap != other.cap {
            return Err(Error::pre("degree cap mismatch"));
        }
        if self.poly.vars() != other.poly.vars() {
            return Err(Error::VarMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Tate<C>) -> Result<Tate<C>> {
        self.check(other)?;
        Ok(TateTruncation {
            poly: self.poly.add(&other.poly)?,
            cap: self.cap,
        })
    }

    pub fn sub(&self, other: &Tate<C>) -> Result<Tate<C>> {
        self.check(other)?;
        Ok(TateTruncation {
            poly: self.poly.sub(&other.poly)?,
            cap: self.cap,
        })
    }

    pub fn neg(&self) -> Tate<C> {
        TateTruncation {
            poly: self.poly.neg(),
            cap: self.cap,
        }
    }

    pub fn mul(&self, other: &Tate<C>) -> Result<Tate<C>> {
        self.check(other)?;
        Ok(Tate::from_poly(self.poly.mul(&other.poly)?, self.cap))
    }

    pub fn scalar_mul(&self, c: &C) -> Result<Tate<C>> {
        Ok(TateTruncation {
            poly: self.poly.scalar_mul(c)?,
            cap: self.cap,
        })
    }

    /// Coefficient-wise Frobenius (the operator tau acting on series
    /// coefficients; variables untouched).
    pub fn twist(&self, q: u64, e: u32) -> Result<Tate<C>> {
        Ok(TateTruncation {
            poly: self.poly.twist_coeffs(q, e)?,
            cap: self.cap,
        })
    }

    /// Substitute t_i -> t_i^k for every variable (used for the t -> t^q
    /// functional equations); monomials pushed past the cap are dropped.
    pub fn scale_exponents(&self, k: u32) -> Result<Tate<C>> {
        let vars = self.poly.vars().clone();
        let mut out = MultiPoly::zero(&vars, self.poly.zero_coeff());
        for (m, c) in self.poly.terms() {
            let scaled: Vec<u32> = m.0.iter().map(|&e| e * k).collect();
            if scaled.iter().all(|&e| e <= self.cap) {
                out.add_term(crate::mvpoly::Mono(scaled), c.clone())?;
            }
        }
        Ok(TateTruncation { poly: out, cap: self.cap })
    }

    pub fn truncate_prec(&self, u_prec: i64) -> Result<Tate<C>> {
        let zero = self.poly.zero_coeff().clone();
        let poly = self.poly.map_coeffs(&zero, |c| Ok(c.truncate_to(u_prec)))?;
        Ok(TateTruncation { poly, cap: self.cap })
    }

    /// Gauss norm as a scaled valuation exponent (min over coefficients).
    pub fn gauss_val(&self) -> Option<i64> {
        self.poly.terms().filter_map(|(_, c)| c.scaled_val()).min()
    }

    /// Evaluate a single-variable truncation at a point.
    pub fn eval(&self, point: &C) -> Result<C> {
        if self.poly.vars().len() != 1 {
            return Err(Error::pre("evaluation requires a single variable"));
        }
        let mut out = self.poly.zero_coeff().clone();
        let mut pow = out.one_like();
        let mut next_exp = 0u32;
        for (m, c) in self.poly.terms() {
            let e = m.0[0];
            while next_exp < e {
                pow = pow.mul(point)?;
                next_exp += 1;
            }
            // Terms come in graded order, so e == next_exp here.
            out = out.add(&c.mul(&pow)?)?;
        }
        Ok(out)
    }

    pub fn promote(&self, new_vars: &Vars, mapping: &[usize]) -> Result<Tate<C>> {
        Ok(TateTruncation {
            poly: self.poly.promote(new_vars, mapping)?,
            cap: self.cap,
        })
    }

    pub fn to_json(&self, coeff: impl Fn(&C) -> serde_json::Value) -> serde_json::Value {
        serde_json::json!({
            "cap": self.cap,
            "coefficients": self.poly.to_json_with(coeff),
        })
    }
}

/// Outcome of comparing two Tate truncations coefficient by coefficient.
#[derive(Clone, Debug)]
pub struct TateCompare {
    pub pass: bool,
    /// Difference norm is at most q^(-certified) when pass holds
    /// (u-valuation units, floor over the grading).
    pub certified_precision_exponent: i64,
    /// Monomial and scaled valuation of the first observed disagreement.
    pub witness: Option<(Vec<u32>, i64)>,
}

/// Coefficient-by-coefficient comparison modulo the weaker precision.
pub fn tate_equal<C: Analytic>(a: &Tate<C>, b: &Tate<C>) -> Result<TateCompare> {
    a.check(b)?;
    let mut certified = i64::MAX;
    let mut monos: Vec<crate::mvpoly::Mono> = a.poly.terms().map(|(m, _)| m.clone()).collect();
    for (m, _) in b.poly.terms() {
        if !monos.contains(m) {
            monos.push(m.clone());
        }
    }
    monos.sort();
    for m in monos {
        let ca = a.poly.coeff(&m);
        let cb = b.poly.coeff(&m);
        let diff = ca.sub(&cb)?;
        let unit = diff.unit();
        match diff.scaled_val() {
            Some(v) => {
                // A known nonzero coefficient in the difference.
                certified = certified.min(v.div_euclid(unit));
                return Ok(TateCompare {
                    pass: false,
                    certified_precision_exponent: certified,
                    witness: Some((m.0.clone(), v)),
                });
            }
            None => {
                certified = certified.min(diff.scaled_prec().div_euclid(unit));
            }
        }
    }
    Ok(TateCompare {
        pass: true,
        certified_precision_exponent: if certified == i64::MAX {
            PREC_EXACT
        } else {
            certified
        },
        witness: None,
    })
}

/// The fundamental period: pi = i x prod_{j>=1} (1 - x^(1-q^j))^(-1),
/// a pure slot-1 element with |pi| = q^(q/(q-1)); precision >= N.
pub fn pi_bar(field: &Arc<Field>, n: i64) -> Result<Ramified> {
    let q = field.q();
    let target = sat(n + 1);
    let mut prod = Laurent::one(field);
    let mut j = 1u32;
    loop {
        let qj = q
            .checked_pow(j)
            .and_then(|v| i64::try_from(v).ok())
            .ok_or_else(|| Error::Overflow("factor exponent overflow".into()))?;
        if qj - 1 >= target {
            break;
        }
        // 1 - u^(q^j - 1), inverted to the working precision.
        let factor = Laurent::one(field)
            .sub(&Laurent::monomial(field, field.one(), qj - 1))?
            .invert_to(target)?;
        prod = prod.mul(&factor)?;
        j += 1;
    }
    let theta = Laurent::theta(field);
    Ok(RamifiedElement::pure(q, 1, theta.mul(&prod)?))
}

/// omega(t) = i prod_{j>=0} (1 - t x^(-q^j))^(-1) as a single-variable
/// truncation with Ramified coefficients (slot 1 pure).
pub fn omega(field: &Arc<Field>, n: i64, cap: u32) -> Result<Tate<Ramified>> {
    let q = field.q();
    let vars = Vars::new(vec!["t".into()]);
    let zero_l = Laurent::zero(field);
    let mut prod = TateTruncation::constant(&vars, cap, Laurent::one(field));
    let mut j = 0u32;
    loop {
        let qj = q
            .checked_pow(j)
            .and_then(|v| i64::try_from(v).ok())
            .ok_or_else(|| Error::Overflow("factor exponent overflow".into()))?;
        if qj > n {
            break;
        }
        // (1 - t u^(q^j))^(-1) = sum_k t^k u^(k q^j), cut at the cap.
        let mut factor = MultiPoly::zero(&vars, &zero_l);
        for k in 0..=cap {
            factor.add_term(
                crate::mvpoly::Mono(vec![k]),
                Laurent::monomial(field, field.one(), k as i64 * qj),
            )?;
        }
        prod = prod.mul(&TateTruncation { poly: factor, cap })?;
        j += 1;
    }
    let prod = prod.truncate_prec(n)?;
    // Scale by i: lift each coefficient into slot 1.
    let zero_r = RamifiedElement::zero(field, q);
    let poly = prod
        .poly
        .map_coeffs(&zero_r, |l| Ok(RamifiedElement::pure(q, 1, l.clone())))?;
    Ok(TateTruncation { poly, cap })
}

/// omega evaluated at a scalar t = lambda in the coefficient field,
/// computed factor by factor (no cap loss): i prod (1 - lambda u^(q^j))^(-1).
pub fn omega_at(field: &Arc<Field>, base_q: u64, lambda: Fq, n: i64) -> Result<Ramified> {
    let target = sat(n + 1);
    let mut prod = Laurent::one(field);
    let mut j = 0u32;
    loop {
        let qj = base_q
            .checked_pow(j)
            .and_then(|v| i64::try_from(v).ok())
            .ok_or_else(|| Error::Overflow("factor exponent overflow".into()))?;
        if qj > target {
            break;
        }
        let factor = Laurent::one(field)
            .sub(&Laurent::monomial(field, lambda, qj))?
            .invert_to(target)?;
        prod = prod.mul(&factor)?;
        j += 1;
    }
    Ok(RamifiedElement::pure(base_q, 1, prod.truncate(n)))
}

/// Inverse Carlitz factorial 1/D_j as a Laurent series (exact monomial
/// structure: D_j is a polynomial in x, so this is an honest inversion).
pub fn inv_d(cache: &crate::carlitz::CarlitzCache, j: u32, target: i64) -> Result<Laurent> {
    let dj = Laurent::from_poly(&cache.d_poly(j)?);
    dj.invert_to(target)
}

/// Carlitz exponential e_C(y) = sum_j y^(q^j)/D_j with adaptive term
/// inclusion: term j enters while its scaled valuation is below the target
/// precision. Entire, so this terminates for every argument.
pub fn carlitz_exp(cache: &crate::carlitz::CarlitzCache, y: &Ramified, n: i64) -> Result<Ramified> {
    let q = cache.q() as i64;
    let base_q = y.base_q();
    debug_assert_eq!(base_q, cache.q());
    let k = q - 1;
    let target_scaled = n.saturating_mul(k);
    let vy = match y.scaled_val() {
        None => return Ok(y.truncate(n)),
        Some(v) => v,
    };
    let mut out = RamifiedElement::zero(y.field(), base_q);
    let mut j = 0u32;
    let mut qj: i64 = 1;
    loop {
        // v_scaled(y^(q^j) / D_j) = q^j v_scaled(y) + (q-1) j q^j.
        let term_val = qj
            .checked_mul(vy)
            .and_then(|a| a.checked_add(k * (j as i64) * qj))
            .ok_or_else(|| Error::Overflow("term valuation overflow".into()))?;
        if term_val >= target_scaled {
            // Later terms only grow once the factorial part dominates.
            let next_gap = k * vy + k * ((j as i64 + 1) * q - j as i64);
            if next_gap >= 0 {
                break;
            }
        } else {
            let pow = y.q_power(j)?.truncate(sat(n + (j as i64 + 1) * qj));
            // The inverse window must reach past deg D_j = j q^j, and deep
            // enough that multiplying by y^(q^j) (valuation possibly well
            // below zero) still leaves absolute precision n.
            let depth = (n + 1 - (qj * vy).div_euclid(k).min(0)).max(j as i64 * qj + 1);
            let dj_inv = inv_d(cache, j, sat(depth))?;
            out = out.add(&pow.mul_laurent(&dj_inv)?)?;
        }
        j += 1;
        qj = qj
            .checked_mul(q)
            .ok_or_else(|| Error::Overflow("Frobenius exponent overflow".into()))?;
        if j > 64 {
            return Err(Error::Overflow("runaway term inclusion".into()));
        }
    }
    Ok(out.truncate(n))
}

/// Anderson generating function f_C(y; t) = sum_j y^(q^j) / (D_j (x^(q^j) - t)),
/// with 1/(x^(q^j) - t) developed as the geometric series
/// sum_k t^k u^(q^j (k+1)) under the cap.
pub fn agf(
    cache: &crate::carlitz::CarlitzCache,
    y: &Ramified,
    n: i64,
    cap: u32,
) -> Result<Tate<Ramified>> {
    let q = cache.q() as i64;
    let base_q = y.base_q();
    debug_assert_eq!(base_q, cache.q());
    let k = q - 1;
    let target_scaled = n.saturating_mul(k);
    let vars = Vars::new(vec!["t".into()]);
    let field = y.field().clone();
    let zero_r = RamifiedElement::zero(&field, base_q);
    let mut out = TateTruncation::zero(&vars, cap, &zero_r);
    let vy = match y.scaled_val() {
        None => return Ok(out),
        Some(v) => v,
    };
    let mut j = 0u32;
    let mut qj: i64 = 1;
    loop {
        // Smallest term for this j is k = 0: scaled valuation
        // q^j v(y) + (q-1)(j+1) q^j.
        let term_val = qj
            .checked_mul(vy)
            .and_then(|a| a.checked_add(k * (j as i64 + 1) * qj))
            .ok_or_else(|| Error::Overflow("term valuation overflow".into()))?;
        if term_val >= target_scaled {
            let next_gap = k * vy + k * ((j as i64 + 2) * q - (j as i64 + 1));
            if next_gap >= 0 {
                break;
            }
        } else {
            let pow = y.q_power(j)?.truncate(sat(n + (j as i64 + 1) * qj));
            let base = pow.mul_laurent(&inv_d(cache, j, sat(n + 1))?)?;
            for t_deg in 0..=cap {
                let shifted = base.mul_laurent(&Laurent::monomial(
                    &field,
                    field.one(),
                    qj * (t_deg as i64 + 1),
                ))?;
                out.poly
                    .add_term(crate::mvpoly::Mono(vec![t_deg]), shifted)?;
            }
        }
        j += 1;
        qj = qj
            .checked_mul(q)
            .ok_or_else(|| Error::Overflow("Frobenius exponent overflow".into()))?;
        if j > 64 {
            return Err(Error::Overflow("runaway term inclusion".into()));
        }
    }
    out.truncate_prec(n)
}

/// Series inverse of a Tate truncation whose t-constant coefficient is a
/// unit: f = c (1 - g) with g of positive t-order gives
/// f^(-1) = c^(-1) (1 + g + ... + g^cap).
pub fn tate_invert<C: Analytic>(f: &Tate<C>, target: i64) -> Result<Tate<C>> {
    let vars = f.poly.vars().clone();
    let zero_mono = crate::mvpoly::Mono(vec![0; vars.len()]);
    let c0 = f.poly.coeff(&zero_mono);
    let c0_inv = match c0.scaled_val() {
        None => {
            return Err(Error::NotInvertible(
                "constant coefficient is zero modulo precision".into(),
            ))
        }
        Some(_) => tate_coeff_invert(&c0, target)?,
    };
    // g = 1 - c0^(-1) f, supported in positive t-degrees.
    let one = TateTruncation::constant(&vars, f.cap, c0.one_like());
    let scaled = f.scalar_mul(&c0_inv)?;
    let mut g = one.sub(&scaled)?;
    // The constant slot of g is zero mod precision by construction; drop
    // its exact part so powers gain t-order.
    g.poly = {
        let zero = g.poly.zero_coeff().clone();
        let mut cleaned = MultiPoly::zero(&vars, &zero);
        for (m, c) in g.poly.terms() {
            if m.total() == 0 {
                continue;
            }
            cleaned.add_term(m.clone(), c.clone())?;
        }
        cleaned
    };
    let mut sum = one.clone();
    let mut power = one;
    for _ in 0..f.cap.max(1) {
        power = power.mul(&g)?;
        if power.poly.is_zero() {
            break;
        }
        sum = sum.add(&power)?;
    }
    sum.scalar_mul(&c0_inv)
}

fn tate_coeff_invert<C: Analytic>(c: &C, target: i64) -> Result<C> {
    // Dispatch through inv() when it applies; inexact values carry their
    // own natural precision, exact monomials invert exactly.
    let _ = target;
    c.inv()
}

fn merge_part(
    label: &'static str,
    cmp: &TateCompare,
    pass: &mut bool,
    certified: &mut i64,
    witness: &mut Option<(&'static str, Vec<u32>, i64)>,
) {
    *certified = (*certified).min(cmp.certified_precision_exponent);
    if !cmp.pass {
        *pass = false;
        if let Some((m, v)) = &cmp.witness {
            witness.get_or_insert((label, m.clone(), *v));
        }
    }
}

fn multi_part_report(
    identity: &'static str,
    params: serde_json::Value,
    started: std::time::Instant,
    pass: bool,
    certified: i64,
    witness: Option<(&'static str, Vec<u32>, i64)>,
) -> crate::report::IdentityReport {
    let mut report = if pass {
        crate::report::IdentityReport::passing(identity, params, started)
    } else {
        let (part, mono, v) = witness.unwrap_or((identity, vec![], 0));
        crate::report::IdentityReport::failing(
            identity,
            params,
            started,
            crate::report::Witness {
                monomial: mono.iter().map(|&e| e as u64).collect(),
                lhs: format!("{part} difference scaled valuation {v}"),
                rhs: "0".into(),
            },
        )
    };
    report.certified_precision_exponent = Some(certified);
    report
}

/// t - x as a degree-one Tate polynomial with ramified coefficients.
fn t_minus_theta(field: &Arc<Field>, q: u64, vars: &Vars, cap: u32) -> Result<Tate<Ramified>> {
    let zero_r = RamifiedElement::zero(field, q);
    let mut lin = MultiPoly::zero(vars, &zero_r);
    lin.add_term(
        crate::mvpoly::Mono(vec![1]),
        RamifiedElement::from_laurent(q, Laurent::one(field)),
    )?;
    lin.add_term(
        crate::mvpoly::Mono(vec![0]),
        RamifiedElement::from_laurent(q, Laurent::theta(field)).neg(),
    )?;
    Ok(TateTruncation { poly: lin, cap })
}

/// The three defining properties of omega checked together: the twist
/// equation tau(omega) = (t - x) omega, the eigenvector property
/// c_x(omega) = t omega of the Carlitz action, and the specialization
/// f_C(pi; t) = omega of the generating function at the period.
pub fn verify_omega_eigen(
    cache: &crate::carlitz::CarlitzCache,
    prec: i64,
    cap: u32,
) -> Result<crate::report::IdentityReport> {
    let started = std::time::Instant::now();
    let field = cache.field().clone();
    let q = cache.q();
    let om = omega(&field, prec, cap)?;
    let vars = om.poly.vars().clone();
    let tw = om.twist(q, 1)?;

    let mut pass = true;
    let mut certified = i64::MAX;
    let mut witness = None;

    let lin = t_minus_theta(&field, q, &vars, cap)?;
    let cmp_twist = tate_equal(&tw, &om.mul(&lin)?)?;
    merge_part("twist", &cmp_twist, &mut pass, &mut certified, &mut witness);

    // c_x(omega) = tau(omega) + x omega must equal t omega.
    let theta_r = RamifiedElement::from_laurent(q, Laurent::theta(&field));
    let action = tw.add(&om.scalar_mul(&theta_r)?)?;
    let zero_r = RamifiedElement::zero(&field, q);
    let mut t_poly = MultiPoly::zero(&vars, &zero_r);
    t_poly.add_term(
        crate::mvpoly::Mono(vec![1]),
        RamifiedElement::from_laurent(q, Laurent::one(&field)),
    )?;
    let t_tate = TateTruncation { poly: t_poly, cap };
    let cmp_action = tate_equal(&action, &om.mul(&t_tate)?)?;
    merge_part(
        "carlitz-action",
        &cmp_action,
        &mut pass,
        &mut certified,
        &mut witness,
    );

    let fc = agf(cache, &pi_bar(&field, prec + 8)?, prec, cap)?;
    let cmp_agf = tate_equal(&fc, &om)?;
    merge_part(
        "agf-at-period",
        &cmp_agf,
        &mut pass,
        &mut certified,
        &mut witness,
    );

    let params = serde_json::json!({"q": q, "N": prec, "M": cap});
    Ok(multi_part_report(
        "omega-eigen",
        params,
        started,
        pass,
        certified,
        witness,
    ))
}

/// The Carlitz exponential as an F_q[x]-module map: e_C vanishes at 0 and
/// at the period, and satisfies e_C(x y) = e_C(y)^q + x e_C(y).
pub fn verify_exp_functional(
    cache: &crate::carlitz::CarlitzCache,
    z: &Frac,
    prec: i64,
) -> Result<crate::report::IdentityReport> {
    let started = std::time::Instant::now();
    let field = cache.field().clone();
    let q = cache.q();
    let vars = Vars::t_list(0);
    let as_tate = |r: &Ramified| TateTruncation::constant(&vars, 0, r.clone());

    let mut pass = true;
    let mut certified = i64::MAX;
    let mut witness = None;

    let pb = pi_bar(&field, prec + 8)?;
    let zero_r = RamifiedElement::zero(&field, q);
    let at_zero = carlitz_exp(cache, &zero_r, prec)?;
    let cmp_zero = tate_equal(&as_tate(&at_zero), &as_tate(&zero_r))?;
    merge_part("value-at-zero", &cmp_zero, &mut pass, &mut certified, &mut witness);

    let at_pi = carlitz_exp(cache, &pb, prec)?;
    let cmp_kernel = tate_equal(&as_tate(&at_pi), &as_tate(&zero_r))?;
    merge_part("kernel", &cmp_kernel, &mut pass, &mut certified, &mut witness);

    let z_l = Laurent::from_frac(z, prec)?;
    let y = pb.mul_laurent(&z_l)?;
    let theta_l = Laurent::theta(&field);
    let lhs = carlitz_exp(cache, &y.mul_laurent(&theta_l)?, prec)?;
    let e = carlitz_exp(cache, &y, prec)?;
    let rhs = e.q_power(1)?.add(&e.mul_laurent(&theta_l)?)?;
    let cmp_lin = tate_equal(&as_tate(&lhs), &as_tate(&rhs))?;
    merge_part("semilinearity", &cmp_lin, &mut pass, &mut certified, &mut witness);

    let params = serde_json::json!({"q": q, "z": z.render("x"), "N": prec});
    Ok(multi_part_report(
        "exp-functional",
        params,
        started,
        pass,
        certified,
        witness,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::CarlitzCache;
    use proptest::prelude::*;

    fn f3() -> Arc<Field> {
        Field::make(3, 1).unwrap()
    }

    fn cache3() -> CarlitzCache {
        CarlitzCache::new(&f3())
    }

    #[test]
    fn u_times_theta_is_one() {
        let f = f3();
        let u = Laurent::monomial(&f, f.one(), 1);
        let theta = Laurent::theta(&f);
        let prod = u.mul(&theta).unwrap();
        assert_eq!(prod, Laurent::one(&f));
        assert!(prod.is_exact());
    }

    #[test]
    fn geometric_series_from_inversion() {
        let f = f3();
        let one_minus_u = Laurent::one(&f)
            .sub(&Laurent::monomial(&f, f.one(), 1))
            .unwrap();
        let inv = one_minus_u.invert_to(8).unwrap();
        assert_eq!(inv.prec(), 8);
        for i in 0..8 {
            assert_eq!(inv.coeff_at(i), Some(f.one()));
        }
        assert_eq!(inv.coeff_at(8), None);
    }

    #[test]
    fn precision_propagation_rules() {
        let f = f3();
        // Two inexact elements: val 2 prec 10 and val -1 prec 6.
        let a = Laurent::monomial(&f, f.one(), 2).truncate(10);
        let b = Laurent::monomial(&f, f.from_int(2), -1).truncate(6);
        assert_eq!(a.add(&b).unwrap().prec(), 6);
        // mul: min(10 + (-1), 6 + 2) = 8.
        assert_eq!(a.mul(&b).unwrap().prec(), 8);
        // invert: N - 2v = 6 - 2(-1) = 8, val flips to 1.
        let binv = b.invert().unwrap();
        assert_eq!(binv.prec(), 8);
        assert_eq!(binv.val(), Some(1));
        // q_power: precision scales by q.
        assert_eq!(a.q_power(3, 1).unwrap().prec(), 30);
    }

    #[test]
    fn iota_powers_realize_the_defining_equation() {
        let f = f3();
        let q = 3u64;
        let iota = Ramified::iota(&f, q);
        let sq = iota.mul(&iota).unwrap();
        // i^2 = i^(q-1) = -x: slot 0 with valuation -1, coefficient -1.
        assert!(sq.is_pure(0));
        assert_eq!(sq.slot(0).val(), Some(-1));
        assert_eq!(sq.slot(0).coeff_at(-1), Some(f.from_int(-1)));
        // i^(2(q-1)) = x^2.
        let fourth = sq.mul(&sq).unwrap();
        assert!(fourth.is_pure(0));
        assert_eq!(fourth.slot(0).coeff_at(-2), Some(f.one()));
        // Scaled valuation of iota is -1.
        assert_eq!(iota.scaled_val(), Some(-1));
    }

    #[test]
    fn ramified_inverse_roundtrips() {
        let f = f3();
        let q = 3u64;
        // Mixed-slot element: i * (1 + u) + x.
        let x = RamifiedElement::pure(q, 1, Laurent::one(&f).add(&Laurent::monomial(&f, f.one(), 1)).unwrap())
            .add(&RamifiedElement::from_laurent(q, Laurent::theta(&f)))
            .unwrap();
        let inv = x.invert(24).unwrap();
        let prod = x.mul(&inv).unwrap();
        let one = RamifiedElement::from_laurent(q, Laurent::one(&f));
        let diff = prod.sub(&one).unwrap();
        assert!(diff.is_zero_mod());
        assert!(diff.scaled_prec() >= 20);
    }

    proptest! {
        #[test]
        fn ultrametric_laws(
            av in -4i64..4, ac in 1u16..3, bv in -4i64..4, bc in 1u16..3,
            extra in prop::collection::vec((1i64..6, 0u16..3), 0..4)
        ) {
            let f = f3();
            let mut a = Laurent::monomial(&f, Fq(ac), av);
            for (off, c) in extra {
                a = a.add(&Laurent::monomial(&f, Fq(c), av + off)).unwrap();
            }
            let b = Laurent::monomial(&f, Fq(bc), bv);
            // |ab| = |a||b|: valuations add.
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.val().unwrap(), a.val().unwrap() + b.val().unwrap());
            // |a+b| <= max(|a|, |b|): valuation of sum >= min.
            let sum = a.add(&b).unwrap();
            if let Some(v) = sum.val() {
                prop_assert!(v >= a.val().unwrap().min(b.val().unwrap()));
            }
        }
    }

    #[test]
    fn pi_bar_shape_and_size() {
        let f = f3();
        let pb = pi_bar(&f, 32).unwrap();
        assert!(pb.is_pure(1));
        // |pi| = q^(q/(q-1)): scaled valuation -q.
        assert_eq!(pb.scaled_val(), Some(-3));
        assert!(pb.scaled_prec() >= 32 * 2 - 1);
        // pi^(q-1) lands in K_inf (slot 0).
        let pow = pb.power(2).unwrap();
        assert!(pow.is_pure(0));
    }

    #[test]
    fn pi_bar_precision_soundness() {
        let f = f3();
        let coarse = pi_bar(&f, 24).unwrap();
        let fine = pi_bar(&f, 48).unwrap().truncate(24);
        let diff = coarse.truncate(24).sub(&fine).unwrap();
        assert!(diff.is_zero_mod());
    }

    #[test]
    fn theta_minus_t_omega_at_theta_recovers_pi_bar() {
        // The t -> x limit of (x - t) omega(t), taken by evaluating the
        // series at t = x under the cap; coefficient decay u^(2k) makes
        // the cap-8 tail smaller than u^16.
        let f = f3();
        let n = 32i64;
        let cap = 8u32;
        let om = omega(&f, n, cap).unwrap();
        let vars = om.poly.vars().clone();
        let zero_r = RamifiedElement::zero(&f, 3);
        // (x - t) as a Tate element.
        let mut lin = MultiPoly::zero(&vars, &zero_r);
        lin.add_term(
            crate::mvpoly::Mono(vec![0]),
            RamifiedElement::from_laurent(3, Laurent::theta(&f)),
        )
        .unwrap();
        lin.add_term(
            crate::mvpoly::Mono(vec![1]),
            RamifiedElement::from_laurent(3, Laurent::one(&f)).neg(),
        )
        .unwrap();
        let prod = om.mul(&TateTruncation { poly: lin, cap }).unwrap();
        let theta_r = RamifiedElement::from_laurent(3, Laurent::theta(&f));
        let value = prod.eval(&theta_r).unwrap();
        let pb = pi_bar(&f, n).unwrap();
        // The cap tail contributes at u^(2(cap+1) - 1) = u^17, so equality
        // holds at precision 16 but not beyond; compare there.
        let diff = value.truncate(16).sub(&pb.truncate(16)).unwrap();
        assert!(diff.is_zero_mod(), "difference valuation {:?}", diff.scaled_val());
    }

    #[test]
    fn omega_is_slot_one_pure() {
        let f = f3();
        let om = omega(&f, 16, 4).unwrap();
        for (_, c) in om.poly.terms() {
            assert!(c.is_pure(1));
        }
    }

    #[test]
    fn omega_twist_equation() {
        // tau(omega) = (t - x) omega.
        let f = f3();
        let n = 32i64;
        let cap = 4u32;
        let om = omega(&f, n, cap).unwrap();
        let lhs = om.twist(3, 1).unwrap();
        let vars = om.poly.vars().clone();
        let zero_r = RamifiedElement::zero(&f, 3);
        let mut lin = MultiPoly::zero(&vars, &zero_r);
        lin.add_term(
            crate::mvpoly::Mono(vec![1]),
            RamifiedElement::from_laurent(3, Laurent::one(&f)),
        )
        .unwrap();
        lin.add_term(
            crate::mvpoly::Mono(vec![0]),
            RamifiedElement::from_laurent(3, Laurent::theta(&f)).neg(),
        )
        .unwrap();
        let rhs = om.mul(&TateTruncation { poly: lin, cap }).unwrap();
        let cmp = tate_equal(&lhs, &rhs).unwrap();
        assert!(cmp.pass, "witness: {:?}", cmp.witness);
        assert!(cmp.certified_precision_exponent >= 16);
    }

    #[test]
    fn omega_frobenius_functional_equation() {
        // omega(t)^q = (t^q - x) omega(t^q).
        let f = f3();
        let n = 32i64;
        let cap = 8u32;
        let om = omega(&f, n, cap).unwrap();
        let lhs = om.twist(3, 1).unwrap().scale_exponents(3).unwrap();
        let om_tq = om.scale_exponents(3).unwrap();
        let vars = om.poly.vars().clone();
        let zero_r = RamifiedElement::zero(&f, 3);
        let mut lin = MultiPoly::zero(&vars, &zero_r);
        lin.add_term(
            crate::mvpoly::Mono(vec![3]),
            RamifiedElement::from_laurent(3, Laurent::one(&f)),
        )
        .unwrap();
        lin.add_term(
            crate::mvpoly::Mono(vec![0]),
            RamifiedElement::from_laurent(3, Laurent::theta(&f)).neg(),
        )
        .unwrap();
        let rhs = om_tq.mul(&TateTruncation { poly: lin, cap }).unwrap();
        let cmp = tate_equal(&lhs, &rhs).unwrap();
        assert!(cmp.pass, "witness: {:?}", cmp.witness);
    }

    #[test]
    fn carlitz_exp_kernel_and_functional_equation() {
        let f = f3();
        let c = cache3();
        let n = 32i64;
        let pb = pi_bar(&f, n + 8).unwrap();
        // e_C(0) = 0.
        let zero = RamifiedElement::zero(&f, 3);
        assert!(carlitz_exp(&c, &zero, n).unwrap().is_zero_mod());
        // e_C(pi) = 0 to precision.
        let at_pi = carlitz_exp(&c, &pb, n).unwrap();
        assert!(at_pi.is_zero_mod(), "kernel failure: {:?}", at_pi.scaled_val());
        // e_C(x y) = e_C(y)^q + x e_C(y) at y = pi/x^2.
        let y = pb.mul_laurent(&Laurent::monomial(&f, f.one(), 2)).unwrap();
        let theta_l = Laurent::theta(&f);
        let lhs = carlitz_exp(&c, &y.mul_laurent(&theta_l).unwrap(), n).unwrap();
        let e = carlitz_exp(&c, &y, n).unwrap();
        let rhs = e.q_power(1).unwrap().add(&e.mul_laurent(&theta_l).unwrap()).unwrap();
        let diff = lhs.sub(&rhs).unwrap();
        assert!(diff.is_zero_mod(), "difference valuation {:?}", diff.scaled_val());
        assert!(diff.scaled_prec() >= 2 * 24);
    }

    #[test]
    fn agf_at_pi_bar_is_omega() {
        let f = f3();
        let c = cache3();
        let n = 32i64;
        let cap = 4u32;
        let pb = pi_bar(&f, n + 8).unwrap();
        let fc = agf(&c, &pb, n, cap).unwrap();
        let om = omega(&f, n, cap).unwrap();
        let cmp = tate_equal(&fc, &om).unwrap();
        assert!(cmp.pass, "witness: {:?}", cmp.witness);
        assert!(cmp.certified_precision_exponent >= 16);
    }

    #[test]
    fn agf_twist_equation() {
        // tau(f_C)(y; t) = e_C(y) + (t - x) f_C(y; t) at y = pi/x.
        let f = f3();
        let c = cache3();
        let n = 32i64;
        let cap = 4u32;
        let y = pi_bar(&f, n + 8)
            .unwrap()
            .mul_laurent(&Laurent::monomial(&f, f.one(), 1))
            .unwrap();
        let fc = agf(&c, &y, n, cap).unwrap();
        let lhs = fc.twist(3, 1).unwrap();
        let e = carlitz_exp(&c, &y, n).unwrap();
        let vars = fc.poly.vars().clone();
        let zero_r = RamifiedElement::zero(&f, 3);
        let mut lin = MultiPoly::zero(&vars, &zero_r);
        lin.add_term(
            crate::mvpoly::Mono(vec![1]),
            RamifiedElement::from_laurent(3, Laurent::one(&f)),
        )
        .unwrap();
        lin.add_term(
            crate::mvpoly::Mono(vec![0]),
            RamifiedElement::from_laurent(3, Laurent::theta(&f)).neg(),
        )
        .unwrap();
        let rhs = fc
            .mul(&TateTruncation { poly: lin, cap })
            .unwrap()
            .add(&TateTruncation::constant(&vars, cap, e))
            .unwrap();
        let cmp = tate_equal(&lhs, &rhs).unwrap();
        assert!(cmp.pass, "witness: {:?}", cmp.witness);
        assert!(cmp.certified_precision_exponent >= 16);
    }

    #[test]
    fn tate_equality_semantics() {
        let f = f3();
        let om = omega(&f, 16, 4).unwrap();
        let same = tate_equal(&om, &om).unwrap();
        assert!(same.pass);
        // Perturb by u^8 t: still equal at precision 8, not at 16.
        let mut perturbed = om.clone();
        perturbed
            .poly
            .add_term(
                crate::mvpoly::Mono(vec![1]),
                RamifiedElement::from_laurent(3, Laurent::monomial(&f, f.one(), 8)),
            )
            .unwrap();
        let cmp = tate_equal(&om, &perturbed).unwrap();
        assert!(!cmp.pass);
        let truncated = tate_equal(
            &om.truncate_prec(8).unwrap(),
            &perturbed.truncate_prec(8).unwrap(),
        )
        .unwrap();
        assert!(truncated.pass);
    }

    #[test]
    fn gauss_norm_is_multiplicative() {
        let f = f3();
        let om = omega(&f, 24, 3).unwrap();
        let pb = pi_bar(&f, 24).unwrap();
        let scaled = om.scalar_mul(&pb).unwrap();
        assert_eq!(
            scaled.gauss_val().unwrap(),
            om.gauss_val().unwrap() + pb.scaled_val().unwrap()
        );
        let sq = om.mul(&om).unwrap();
        assert_eq!(sq.gauss_val().unwrap(), 2 * om.gauss_val().unwrap());
    }

    #[test]
    fn tate_inversion_against_known_unit() {
        let f = f3();
        let n = 24i64;
        let cap = 4u32;
        let om = omega(&f, n, cap).unwrap();
        let inv = tate_invert(&om, n).unwrap();
        let prod = om.mul(&inv).unwrap();
        let one = TateTruncation::constant(
            om.poly.vars(),
            cap,
            RamifiedElement::from_laurent(3, Laurent::one(&f)),
        );
        let cmp = tate_equal(&prod, &one).unwrap();
        assert!(cmp.pass, "witness: {:?}", cmp.witness);
        assert!(cmp.certified_precision_exponent >= 12);
    }

    #[test]
    fn from_frac_round_trip() {
        let f = f3();
        // 1/(x - 1) = u + u^2 + u^3 + ... (since x - 1 = u^{-1}(1 - u)).
        let frac = Frac::new(
            Poly::one(&f),
            Poly::from_ints(&f, &[-1, 1]),
        )
        .unwrap();
        let l = Laurent::from_frac(&frac, 6).unwrap();
        assert_eq!(l.val(), Some(1));
        for i in 1..6 {
            assert_eq!(l.coeff_at(i), Some(f.one()));
        }
    }

    #[test]
    fn omega_eigen_report() {
        let c = cache3();
        let r = verify_omega_eigen(&c, 32, 4).unwrap();
        assert!(r.pass, "witness: {:?}", r.witness);
        assert!(r.certified_precision_exponent.unwrap() >= 16);
        let c5 = crate::carlitz::CarlitzCache::new(&Field::make(5, 1).unwrap());
        let r5 = verify_omega_eigen(&c5, 20, 3).unwrap();
        assert!(r5.pass, "witness: {:?}", r5.witness);
    }

    #[test]
    fn exp_module_map_report() {
        let c = cache3();
        let f = c.field().clone();
        let theta = Poly::from_ints(&f, &[0, 1]);
        let z = Frac::from_int(&f, 1)
            .div(&Frac::from_poly(theta.clone()))
            .unwrap();
        let r = verify_exp_functional(&c, &z, 32).unwrap();
        assert!(r.pass, "witness: {:?}", r.witness);
        assert!(r.certified_precision_exponent.unwrap() >= 16);
        // An integral argument keeps the identity exact as well.
        let whole = Frac::from_poly(theta);
        let r2 = verify_exp_functional(&c, &whole, 24).unwrap();
        assert!(r2.pass, "witness: {:?}", r2.witness);
    }
}
