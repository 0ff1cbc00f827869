//! Reduced fractions over F_q[x]: the rational function field K.
//!
//! Invariants: numerator and denominator are coprime, the denominator is
//! monic and nonzero, and zero is stored as 0/1. Addition and
//! multiplication use the classical cross-gcd reductions so the gcd work
//! stays on the smallest operands available.

use crate::algebra::field::{Embedding, Field, Fq};
use crate::algebra::poly::Poly;
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq)]
pub struct Frac {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frac({})", self.render("x"))
    }
}

impl Frac {
    /// Build num/den, reducing to lowest terms with a monic denominator.
    pub fn new(num: Poly, den: Poly) -> Result<Frac> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Frac::zero(num.field()));
        }
        let g = num.gcd(&den)?;
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        if !den.is_monic() {
            let li = den.field().inv(den.leading())?;
            num = num.mul_scalar(li);
            den = den.mul_scalar(li);
        }
        Ok(Frac { num, den })
    }

    /// Wrap coprime pieces without running the gcd; debug-checked.
    fn raw(num: Poly, den: Poly) -> Frac {
        debug_assert!(den.is_monic());
        debug_assert!(num.gcd(&den).map(|g| g.is_one()).unwrap_or(false) || num.is_zero());
        Frac { num, den }
    }

    pub fn zero(field: &Arc<Field>) -> Frac {
        Frac {
            num: Poly::zero(field),
            den: Poly::one(field),
        }
    }

    pub fn one(field: &Arc<Field>) -> Frac {
        Frac {
            num: Poly::one(field),
            den: Poly::one(field),
        }
    }

    pub fn from_poly(p: Poly) -> Frac {
        Frac {
            den: Poly::one(p.field()),
            num: p,
        }
    }

    pub fn constant(field: &Arc<Field>, c: Fq) -> Frac {
        Frac::from_poly(Poly::constant(field, c))
    }

    pub fn from_int(field: &Arc<Field>, n: i64) -> Frac {
        Frac::from_poly(Poly::constant(field, field.from_int(n)))
    }

    pub fn field(&self) -> &Arc<Field> {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the denominator is 1, i.e. the value lies in A.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.is_integral() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Frac) -> Result<Frac> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let (a, b) = (&self.num, &self.den);
        let (c, d) = (&other.num, &other.den);
        let g = b.gcd(d)?;
        if g.is_one() {
            let num = a.mul(d)?.add(&c.mul(b)?)?;
            let den = b.mul(d)?;
            if num.is_zero() {
                return Ok(Frac::zero(self.field()));
            }
            return Ok(Frac::raw(num, den));
        }
        let b1 = b.exact_div(&g)?;
        let d1 = d.exact_div(&g)?;
        let t = a.mul(&d1)?.add(&c.mul(&b1)?)?;
        if t.is_zero() {
            return Ok(Frac::zero(self.field()));
        }
        let h = t.gcd(&g)?;
        if h.is_one() {
            Ok(Frac::raw(t, b.mul(&d1)?))
        } else {
            let num = t.exact_div(&h)?;
            let den = b.exact_div(&h)?.mul(&d1)?;
            Ok(Frac::raw(num, den))
        }
    }

    pub fn sub(&self, other: &Frac) -> Result<Frac> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Frac {
        Frac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Frac) -> Result<Frac> {
        if self.is_zero() || other.is_zero() {
            return Ok(Frac::zero(self.field()));
        }
        let g1 = self.num.gcd(&other.den)?;
        let g2 = other.num.gcd(&self.den)?;
        let a = if g1.is_one() {
            self.num.clone()
        } else {
            self.num.exact_div(&g1)?
        };
        let d = if g1.is_one() {
            other.den.clone()
        } else {
            other.den.exact_div(&g1)?
        };
        let c = if g2.is_one() {
            other.num.clone()
        } else {
            other.num.exact_div(&g2)?
        };
        let b = if g2.is_one() {
            self.den.clone()
        } else {
            self.den.exact_div(&g2)?
        };
        Ok(Frac::raw(a.mul(&c)?, b.mul(&d)?))
    }

    pub fn inv(&self) -> Result<Frac> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut num = self.den.clone();
        let mut den = self.num.clone();
        if !den.is_monic() {
            let li = den.field().inv(den.leading())?;
            num = num.mul_scalar(li);
            den = den.mul_scalar(li);
        }
        Ok(Frac::raw(num, den))
    }

    pub fn div(&self, other: &Frac) -> Result<Frac> {
        self.mul(&other.inv()?)
    }

    /// Integer power, negative exponents through inversion.
    pub fn powi(&self, e: i64) -> Result<Frac> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Frac::one(self.field());
        let mut base = base;
        let mut e = e.unsigned_abs();
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

    /// (num/den)^(q^e) via the coefficient Frobenius on both parts.
    pub fn q_power(&self, q: u64, e: u32) -> Result<Frac> {
        Ok(Frac {
            num: self.num.q_power(q, e)?,
            den: self.den.q_power(q, e)?,
        })
    }

    /// Push both parts through a field embedding.
    pub fn map_into(&self, emb: &Embedding) -> Frac {
        Frac {
            num: self.num.map_into(emb),
            den: self.den.map_into(emb),
        }
    }

    /// deg(num) - deg(den); None for zero.
    pub fn degree(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap_or(0) as i64)
    }

    pub fn render(&self, var: &str) -> String {
        if self.is_integral() {
            self.num.render(var)
        } else {
            format!("({}) / ({})", self.num.render(var), self.den.render(var))
        }
    }

    /// Inverse of `render`: either a polynomial literal or `num / den` with
    /// the slash at parenthesis depth zero.
    pub fn parse(field: &Arc<Field>, input: &str, var: &str) -> Result<Frac> {
        let mut depth = 0i32;
        let mut slash = None;
        for (i, ch) in input.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => {
                    if slash.is_some() {
                        return Err(Error::pre(format!("more than one '/' in {input:?}")));
                    }
                    slash = Some(i);
                }
                _ => {}
            }
        }
        match slash {
            None => Ok(Frac::from_poly(Poly::parse(field, input, var)?)),
            Some(i) => Frac::new(
                Poly::parse(field, &input[..i], var)?,
                Poly::parse(field, &input[i + 1..], var)?,
            ),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "num": self.num.to_json(),
            "den": self.den.to_json(),
        })
    }

    pub fn from_json(field: &Arc<Field>, v: &serde_json::Value) -> Result<Frac> {
        let num = v
            .get("num")
            .ok_or_else(|| Error::Serialization("fraction missing num".into()))?;
        let den = v
            .get("den")
            .ok_or_else(|| Error::Serialization("fraction missing den".into()))?;
        Frac::new(Poly::from_json(field, num)?, Poly::from_json(field, den)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> Arc<Field> {
        Field::make(3, 1).unwrap()
    }

    fn arb_frac() -> impl Strategy<Value = Frac> {
        (
            prop::collection::vec(0i64..3, 0..6),
            prop::collection::vec(0i64..3, 0..6),
        )
            .prop_filter_map("nonzero denominator", |(n, d)| {
                let f = f3();
                let den = Poly::from_ints(&f, &d);
                if den.is_zero() {
                    return None;
                }
                Some(Frac::new(Poly::from_ints(&f, &n), den).unwrap())
            })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_frac(), b in arb_frac(), c in arb_frac()) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert!(a.sub(&a).unwrap().is_zero());
            if !a.is_zero() {
                prop_assert!(a.div(&a).unwrap().is_one());
            }
        }

        #[test]
        fn results_stay_reduced(a in arb_frac(), b in arb_frac()) {
            for r in [a.add(&b).unwrap(), a.mul(&b).unwrap()] {
                if !r.is_zero() {
                    prop_assert!(r.den().is_monic());
                    prop_assert!(r.num().gcd(r.den()).unwrap().is_one());
                }
            }
        }
    }

    #[test]
    fn inverse_of_scaled_poly_normalizes_monic() {
        let f = f3();
        // 1 / (2x+1) must renormalize to a monic denominator.
        let a = Frac::new(Poly::one(&f), Poly::from_ints(&f, &[1, 2])).unwrap();
        assert!(a.den().is_monic());
        assert_eq!(a.num(), &Poly::from_ints(&f, &[2]));
        assert_eq!(a.den(), &Poly::from_ints(&f, &[2, 1]));
    }

    #[test]
    fn negative_power_inverts() {
        let f = f3();
        let x = Frac::from_poly(Poly::x(&f));
        let xm2 = x.powi(-2).unwrap();
        assert_eq!(xm2.mul(&x.powi(2).unwrap()).unwrap(), Frac::one(&f));
    }

    #[test]
    fn parse_fractions_and_round_trip() {
        let f = f3();
        let inv_x = Frac::parse(&f, "1/x", "x").unwrap();
        assert_eq!(inv_x, Frac::new(Poly::one(&f), Poly::x(&f)).unwrap());
        let z2 = Frac::parse(&f, "1/x^2", "x").unwrap();
        assert_eq!(z2, Frac::new(Poly::one(&f), Poly::x_pow(&f, 2)).unwrap());
        let mixed = Frac::parse(&f, "(x+1) / (x^2+1)", "x").unwrap();
        assert_eq!(mixed.num(), &Poly::from_ints(&f, &[1, 1]));
        let back = Frac::parse(&f, &mixed.render("x"), "x").unwrap();
        assert_eq!(back, mixed);
        assert_eq!(
            Frac::parse(&f, "x+2", "x").unwrap(),
            Frac::from_poly(Poly::from_ints(&f, &[2, 1]))
        );
        assert!(Frac::parse(&f, "1/x/x", "x").is_err());
        assert!(Frac::parse(&f, "1/0", "x").is_err());
    }
}
