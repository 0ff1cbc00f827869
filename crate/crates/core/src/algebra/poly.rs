//! Dense univariate polynomials over a shared finite field.
//!
//! Coefficients are ascending with no trailing zeros, so the zero
//! polynomial is the empty vector. The ring A = F_q[x] built on this type
//! is the coefficient workhorse for everything downstream; the inner loops
//! (mul, divrem, gcd) carry a direct mod-p fast path for prime fields
//! because the Bernoulli-Carlitz table pushes degrees into the thousands.

use crate::algebra::field::{Field, Fq};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct Poly {
    field: Arc<Field>,
    coeffs: Vec<Fq>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}
impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.render("x"))
    }
}

impl Poly {
    pub fn zero(field: &Arc<Field>) -> Poly {
        Poly {
            field: Arc::clone(field),
            coeffs: vec![],
        }
    }

    pub fn one(field: &Arc<Field>) -> Poly {
        Poly::constant(field, field.one())
    }

    pub fn constant(field: &Arc<Field>, c: Fq) -> Poly {
        let coeffs = if c == field.zero() { vec![] } else { vec![c] };
        Poly {
            field: Arc::clone(field),
            coeffs,
        }
    }

    /// The variable x.
    pub fn x(field: &Arc<Field>) -> Poly {
        Poly::x_pow(field, 1)
    }

    /// x^k.
    pub fn x_pow(field: &Arc<Field>, k: usize) -> Poly {
        let mut coeffs = vec![field.zero(); k + 1];
        coeffs[k] = field.one();
        Poly {
            field: Arc::clone(field),
            coeffs,
        }
    }

    pub fn from_coeffs(field: &Arc<Field>, mut coeffs: Vec<Fq>) -> Poly {
        while coeffs.last() == Some(&field.zero()) {
            coeffs.pop();
        }
        Poly {
            field: Arc::clone(field),
            coeffs,
        }
    }

    /// Convenience for literals: integer coefficients reduced into the field.
    pub fn from_ints(field: &Arc<Field>, ints: &[i64]) -> Poly {
        let coeffs = ints.iter().map(|&n| field.from_int(n)).collect();
        Poly::from_coeffs(field, coeffs)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq(0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq(0))
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == self.field.one()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    fn check_same_field(&self, other: &Poly) -> Result<()> {
        if *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_same_field(other)?;
        let f = &self.field;
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (&self.coeffs, &other.coeffs)
        } else {
            (&other.coeffs, &self.coeffs)
        };
        let mut out = long.clone();
        for (i, &c) in short.iter().enumerate() {
            out[i] = f.add(out[i], c);
        }
        Ok(Poly::from_coeffs(f, out))
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let f = &self.field;
        let coeffs = self.coeffs.iter().map(|&c| f.neg(c)).collect();
        Poly {
            field: Arc::clone(f),
            coeffs,
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.field));
        }
        let f = &self.field;
        let out = if f.is_prime_field() {
            mul_prime(f, &self.coeffs, &other.coeffs)
        } else {
            mul_general(f, &self.coeffs, &other.coeffs)
        };
        Ok(Poly::from_coeffs(f, out))
    }

    pub fn mul_scalar(&self, c: Fq) -> Poly {
        let f = &self.field;
        if c == f.zero() {
            return Poly::zero(f);
        }
        let coeffs = self.coeffs.iter().map(|&a| f.mul(a, c)).collect();
        Poly {
            field: Arc::clone(f),
            coeffs,
        }
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn pow(&self, mut e: u64) -> Result<Poly> {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Quotient and remainder with deg(r) < deg(b).
    pub fn divrem(&self, b: &Poly) -> Result<(Poly, Poly)> {
        self.check_same_field(b)?;
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        if self.degree() < b.degree() {
            return Ok((Poly::zero(f), self.clone()));
        }
        let (q, r) = if f.is_prime_field() {
            divrem_prime(f, &self.coeffs, &b.coeffs)?
        } else {
            divrem_general(f, &self.coeffs, &b.coeffs)?
        };
        Ok((Poly::from_coeffs(f, q), Poly::from_coeffs(f, r)))
    }

    pub fn rem(&self, b: &Poly) -> Result<Poly> {
        Ok(self.divrem(b)?.1)
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn exact_div(&self, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision(format!(
                "({}) / ({})",
                self.render("x"),
                b.render("x")
            )))
        }
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check_same_field(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.make_monic())
    }

    /// Scale so the leading coefficient is 1 (zero stays zero).
    pub fn make_monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let li = self
            .field
            .inv(self.leading())
            .expect("nonzero leading coefficient");
        self.mul_scalar(li)
    }

    pub fn eval(&self, at: Fq) -> Fq {
        let f = &self.field;
        let mut acc = f.zero();
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, at), c);
        }
        acc
    }

    /// Evaluate with coefficients pushed through an embedding into a bigger
    /// field, at a point of that field.
    pub fn eval_in(&self, emb: &crate::algebra::field::Embedding, at: Fq) -> Fq {
        let big = emb.big();
        let mut acc = big.zero();
        for &c in self.coeffs.iter().rev() {
            acc = big.add(big.mul(acc, at), emb.apply(c));
        }
        acc
    }

    /// Map coefficients through an embedding, keeping degrees.
    pub fn map_into(&self, emb: &crate::algebra::field::Embedding) -> Poly {
        let coeffs = self.coeffs.iter().map(|&c| emb.apply(c)).collect();
        Poly {
            field: Arc::clone(emb.big()),
            coeffs,
        }
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        if self.coeffs.len() <= 1 {
            return Poly::zero(f);
        }
        let p = f.p();
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            let mult = f.from_int((i as u64 % p) as i64);
            out.push(f.mul(c, mult));
        }
        Poly::from_coeffs(f, out)
    }

    /// f(x)^(q^e) for q a power of the characteristic: coefficients are
    /// raised to the q^e and exponents spread by q^e. This is the
    /// Frobenius twist used by twisted-polynomial arithmetic; for
    /// coefficients in F_q itself the coefficient power is the identity.
    pub fn q_power(&self, q: u64, e: u32) -> Result<Poly> {
        if e == 0 {
            return Ok(self.clone());
        }
        let f = &self.field;
        let stride = q
            .checked_pow(e)
            .ok_or_else(|| Error::Overflow(format!("q^e with q={q}, e={e}")))? as usize;
        if self.is_zero() {
            return Ok(self.clone());
        }
        let deg = self.coeffs.len() - 1;
        let mut out = vec![f.zero(); deg * stride + 1];
        // c^(q^e) by repeated q-th powers keeps exponents small.
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == f.zero() {
                continue;
            }
            let mut cq = c;
            for _ in 0..e {
                cq = f.pow(cq, q);
            }
            out[i * stride] = cq;
        }
        Ok(Poly::from_coeffs(f, out))
    }

    /// Substitute x -> x + c.
    pub fn compose_shift(&self, c: Fq) -> Poly {
        let f = &self.field;
        let shift = Poly::from_coeffs(f, vec![c, f.one()]);
        let mut acc = Poly::zero(f);
        for &coeff in self.coeffs.iter().rev() {
            acc = acc
                .mul(&shift)
                .and_then(|m| m.add(&Poly::constant(f, coeff)))
                .expect("same field");
        }
        acc
    }

    /// Ascending coefficient render with a chosen variable symbol.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let mut parts = vec![];
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == f.zero() {
                continue;
            }
            let cs = f.render(c);
            let wrapped = if cs.contains('+') {
                format!("({cs})")
            } else {
                cs.clone()
            };
            let part = match i {
                0 => wrapped,
                1 if cs == "1" => var.to_string(),
                1 => format!("{wrapped}{var}"),
                _ if cs == "1" => format!("{var}^{i}"),
                _ => format!("{wrapped}{var}^{i}"),
            };
            parts.push(part);
        }
        parts.join("+")
    }

    /// Inverse of `render` for prime fields: sums of terms `c`, `x`, `cx^k`
    /// over `+` and `-`, with optional `*` between coefficient and variable
    /// and optional surrounding whitespace.
    pub fn parse(field: &Arc<Field>, input: &str, var: &str) -> Result<Poly> {
        if !field.is_prime_field() {
            return Err(Error::pre("polynomial parsing is defined over prime fields"));
        }
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(&s);
        if s.is_empty() {
            return Err(Error::pre("empty polynomial literal"));
        }
        // Split into signed terms; a leading sign binds to the first term.
        let mut terms: Vec<(i64, &str)> = vec![];
        let mut start = 0usize;
        let mut sign = 1i64;
        for (i, ch) in s.char_indices() {
            if ch == '+' || ch == '-' {
                if i > start {
                    terms.push((sign, &s[start..i]));
                    sign = 1;
                }
                if ch == '-' {
                    sign = -sign;
                }
                start = i + 1;
            }
        }
        terms.push((sign, &s[start..]));
        let mut coeffs: Vec<Fq> = vec![];
        for (sign, term) in terms {
            if term.is_empty() {
                return Err(Error::pre(format!("dangling sign in {input:?}")));
            }
            let (coeff_str, exp) = match term.find(var) {
                None => (term, 0usize),
                Some(pos) => {
                    let after = &term[pos + var.len()..];
                    let exp = match after.strip_prefix('^') {
                        None if after.is_empty() => 1,
                        None => {
                            return Err(Error::pre(format!("unexpected {after:?} in {input:?}")))
                        }
                        Some(digits) => digits
                            .parse::<usize>()
                            .map_err(|_| Error::pre(format!("bad exponent in {input:?}")))?,
                    };
                    (term[..pos].trim_end_matches('*'), exp)
                }
            };
            let c = if coeff_str.is_empty() {
                field.one()
            } else {
                let n = coeff_str
                    .parse::<i64>()
                    .map_err(|_| Error::pre(format!("bad coefficient {coeff_str:?} in {input:?}")))?;
                field.from_int(n)
            };
            let c = if sign < 0 { field.neg(c) } else { c };
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, field.zero());
            }
            coeffs[exp] = field.add(coeffs[exp], c);
        }
        Ok(Poly::from_coeffs(field, coeffs))
    }

    /// Canonical JSON form: ascending coefficient array. Prime fields use
    /// bare integers; extension fields use length-m coordinate arrays.
    pub fn to_json(&self) -> serde_json::Value {
        let f = &self.field;
        if f.is_prime_field() {
            serde_json::Value::Array(
                self.coeffs
                    .iter()
                    .map(|c| serde_json::Value::from(c.0 as u64))
                    .collect(),
            )
        } else {
            serde_json::Value::Array(
                self.coeffs
                    .iter()
                    .map(|&c| {
                        serde_json::Value::Array(
                            f.coords(c).into_iter().map(serde_json::Value::from).collect(),
                        )
                    })
                    .collect(),
            )
        }
    }

    pub fn from_json(field: &Arc<Field>, v: &serde_json::Value) -> Result<Poly> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Serialization("polynomial must be an array".into()))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for entry in arr {
            let c = match entry {
                serde_json::Value::Number(n) => {
                    let n = n
                        .as_u64()
                        .ok_or_else(|| Error::Serialization("coefficient must be a nonnegative integer".into()))?;
                    field.elem(n % field.p())?
                }
                serde_json::Value::Array(coords) => {
                    let coords: Vec<u64> = coords
                        .iter()
                        .map(|c| {
                            c.as_u64().ok_or_else(|| {
                                Error::Serialization("coordinate must be a nonnegative integer".into())
                            })
                        })
                        .collect::<Result<_>>()?;
                    field.from_coords(&coords)?
                }
                _ => {
                    return Err(Error::Serialization(
                        "coefficient must be an integer or coordinate array".into(),
                    ))
                }
            };
            coeffs.push(c);
        }
        Ok(Poly::from_coeffs(field, coeffs))
    }
}

fn mul_prime(f: &Arc<Field>, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    let p = f.p() as u32;
    let n = a.len() + b.len() - 1;
    let mut acc = vec![0u64; n];
    // (p-1)^2 * min(len) stays far below u64 for the degrees in play.
    for (i, &ai) in a.iter().enumerate() {
        let av = ai.0 as u64;
        if av == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            acc[i + j] += av * bj.0 as u64;
        }
    }
    acc.into_iter().map(|v| Fq((v % p as u64) as u16)).collect()
}

fn mul_general(f: &Arc<Field>, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    let n = a.len() + b.len() - 1;
    let mut out = vec![f.zero(); n];
    for (i, &ai) in a.iter().enumerate() {
        if ai == f.zero() {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(ai, bj));
        }
    }
    out
}

fn divrem_prime(f: &Arc<Field>, a: &[Fq], b: &[Fq]) -> Result<(Vec<Fq>, Vec<Fq>)> {
    let p = f.p();
    let db = b.len() - 1;
    let lead_inv = f.inv(b[db])?;
    let mut r: Vec<u16> = a.iter().map(|c| c.0).collect();
    let mut q = vec![Fq(0); a.len() - db];
    for top in (db..a.len()).rev() {
        let lead = r[top] as u64;
        if lead == 0 {
            continue;
        }
        let qc = (lead * lead_inv.0 as u64) % p;
        q[top - db] = Fq(qc as u16);
        let shift = top - db;
        for i in 0..db {
            let sub = (qc * b[i].0 as u64) % p;
            let cur = r[shift + i] as u64;
            r[shift + i] = ((cur + p - sub) % p) as u16;
        }
        r[top] = 0;
    }
    r.truncate(db);
    Ok((q, r.into_iter().map(Fq).collect()))
}

fn divrem_general(f: &Arc<Field>, a: &[Fq], b: &[Fq]) -> Result<(Vec<Fq>, Vec<Fq>)> {
    let db = b.len() - 1;
    let lead_inv = f.inv(b[db])?;
    let mut r: Vec<Fq> = a.to_vec();
    let mut q = vec![f.zero(); a.len() - db];
    for top in (db..a.len()).rev() {
        if r[top] == f.zero() {
            continue;
        }
        let qc = f.mul(r[top], lead_inv);
        q[top - db] = qc;
        let shift = top - db;
        for i in 0..db {
            r[shift + i] = f.sub(r[shift + i], f.mul(qc, b[i]));
        }
        r[top] = f.zero();
    }
    r.truncate(db);
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> Arc<Field> {
        Field::make(3, 1).unwrap()
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(0i64..3, 0..=max_deg + 1)
            .prop_map(|ints| Poly::from_ints(&f3(), &ints))
    }

    proptest! {
        #[test]
        fn mul_is_commutative_and_associative(a in arb_poly(8), b in arb_poly(8), c in arb_poly(8)) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn mul_distributes_over_add(a in arb_poly(8), b in arb_poly(8), c in arb_poly(8)) {
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn divrem_reconstructs(a in arb_poly(12), b in arb_poly(6)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b).unwrap();
            let back = q.mul(&b).unwrap().add(&r).unwrap();
            prop_assert_eq!(back, a.clone());
            prop_assert!(r.is_zero() || r.degree() < b.degree());
        }

        #[test]
        fn gcd_divides_both(a in arb_poly(10), b in arb_poly(10)) {
            let g = a.gcd(&b).unwrap();
            if !g.is_zero() {
                prop_assert!(a.rem(&g).unwrap().is_zero());
                prop_assert!(b.rem(&g).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn q_power_spreads_exponents() {
        let f = f3();
        let a = Poly::from_ints(&f, &[1, 2, 0, 1]); // 1 + 2x + x^3
        let a3 = a.q_power(3, 1).unwrap();
        // Over F_3 the coefficients are fixed and exponents triple.
        assert_eq!(a3, Poly::from_ints(&f, &[1, 0, 0, 2, 0, 0, 0, 0, 0, 1]));
        assert_eq!(a3, a.pow(3).unwrap());
    }

    #[test]
    fn extension_divrem_matches_reconstruction() {
        let f9 = Field::make(3, 2).unwrap();
        let g = f9.gen();
        let a = Poly::from_coeffs(&f9, vec![g, f9.one(), f9.pow(g, 3), f9.one()]);
        let b = Poly::from_coeffs(&f9, vec![f9.one(), g]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).unwrap().add(&r).unwrap(), a);
    }

    #[test]
    fn render_uses_ascending_storage_descending_print() {
        let f = f3();
        let a = Poly::from_ints(&f, &[2, 0, 1]);
        assert_eq!(a.render("x"), "x^2+2");
    }

    #[test]
    fn json_round_trip() {
        let f = f3();
        let a = Poly::from_ints(&f, &[2, 0, 1]);
        let v = a.to_json();
        assert_eq!(v.to_string(), "[2,0,1]");
        assert_eq!(Poly::from_json(&f, &v).unwrap(), a);
    }

    #[test]
    fn parse_accepts_render_output_and_variants() {
        let f = f3();
        for (text, coeffs) in [
            ("0", vec![]),
            ("1", vec![1]),
            ("x", vec![0, 1]),
            ("x^2+2", vec![2, 0, 1]),
            ("2x^3 + x + 1", vec![1, 1, 0, 2]),
            ("2*x^3+x+1", vec![1, 1, 0, 2]),
            ("x^2 - 1", vec![-1, 0, 1]),
            ("-x", vec![0, -1]),
            ("(x+1)", vec![1, 1]),
            ("x+x", vec![0, 2]),
        ] {
            let got = Poly::parse(&f, text, "x").unwrap();
            assert_eq!(got, Poly::from_ints(&f, &coeffs), "parsing {text:?}");
        }
        assert!(Poly::parse(&f, "", "x").is_err());
        assert!(Poly::parse(&f, "x^", "x").is_err());
        assert!(Poly::parse(&f, "yx", "x").is_err());
        assert!(Poly::parse(&f, "2+", "x").is_err());
    }

    proptest! {
        #[test]
        fn parse_round_trips_render(ints in prop::collection::vec(0i64..3, 0..8)) {
            let f = f3();
            let a = Poly::from_ints(&f, &ints);
            let back = Poly::parse(&f, &a.render("x"), "x").unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
