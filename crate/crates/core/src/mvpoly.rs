//! Sparse multivariate polynomials over a pluggable coefficient ring.
//!
//! One engine serves A- and K-coefficients, extension fields, and the
//! finite-precision coefficient rings of the infinite place. Terms are
//! keyed by exponent vectors under the graded lexicographic order with z
//! listed last, so iteration over a polynomial is deterministic and the
//! serialized form is canonical.

use crate::algebra::{Frac, Poly};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

/// Operations a coefficient ring must provide.
///
/// Values double as context carriers: `zero_like`/`one_like` mint constants
/// tied to the same underlying field or precision setup as `self`, which is
/// why the trait has no standalone constructors. `q_power` is the
/// Frobenius x -> x^(q^e) with the base order q passed explicitly, since a
/// ring can live over an extension of the base field.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse; errors when the element is not a unit.
    fn inv(&self) -> Result<Self>;
    fn q_power(&self, q: u64, e: u32) -> Result<Self>;

    fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }
}

impl Ring for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.field())
    }
    fn one_like(&self) -> Self {
        Poly::one(self.field())
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        Poly::add(self, rhs)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        Poly::mul(self, rhs)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn inv(&self) -> Result<Self> {
        if self.degree() == Some(0) {
            let c = self.field().inv(self.coeff(0))?;
            Ok(Poly::constant(self.field(), c))
        } else {
            Err(Error::NotInvertible(format!(
                "{} is not a unit in the polynomial ring",
                self.render("x")
            )))
        }
    }
    fn q_power(&self, q: u64, e: u32) -> Result<Self> {
        Poly::q_power(self, q, e)
    }
}

impl Ring for Frac {
    fn zero_like(&self) -> Self {
        Frac::zero(self.field())
    }
    fn one_like(&self) -> Self {
        Frac::one(self.field())
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        Frac::add(self, rhs)
    }
    fn neg(&self) -> Self {
        Frac::neg(self)
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        Frac::mul(self, rhs)
    }
    fn is_zero(&self) -> bool {
        Frac::is_zero(self)
    }
    fn inv(&self) -> Result<Self> {
        Frac::inv(self)
    }
    fn q_power(&self, q: u64, e: u32) -> Result<Self> {
        Frac::q_power(self, q, e)
    }
}

/// Exponent vector; ordered graded-lexicographically: total degree first,
/// then entrywise left to right. With variable lists ending in z, this is
/// graded lex with z last.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shared, immutable variable list. Lists compare by content.
#[derive(Clone, Debug)]
pub struct Vars(Arc<Vec<String>>);

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Vars {}

impl Vars {
    pub fn new(names: Vec<String>) -> Vars {
        Vars(Arc::new(names))
    }

    /// t_1, ..., t_s.
    pub fn t_list(s: usize) -> Vars {
        Vars::new((1..=s).map(|i| format!("t{i}")).collect())
    }

    /// t_1, ..., t_s, z (the interpolation variable lives last).
    pub fn t_z(s: usize) -> Vars {
        let mut names: Vec<String> = (1..=s).map(|i| format!("t{i}")).collect();
        names.push("z".into());
        Vars::new(names)
    }

    pub fn single(name: &str) -> Vars {
        Vars::new(vec![name.into()])
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

#[derive(Clone, PartialEq)]
pub struct MultiPoly<C: Ring> {
    vars: Vars,
    terms: BTreeMap<Mono, C>,
    /// Zero of the coefficient ring, kept so constants can be minted even
    /// when the term map is empty.
    zero: C,
}

impl<C: Ring> Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MultiPoly({} terms in {:?})", self.terms.len(), self.vars.names())
    }
}

/// A substitution target: a plain ring element or a polynomial.
pub enum Binding<C: Ring> {
    Value(C),
    Expr(MultiPoly<C>),
}

impl<C: Ring> MultiPoly<C> {
    pub fn zero(vars: &Vars, exemplar: &C) -> MultiPoly<C> {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
            zero: exemplar.zero_like(),
        }
    }

    pub fn constant(vars: &Vars, c: C) -> MultiPoly<C> {
        let mut out = MultiPoly::zero(vars, &c);
        if !c.is_zero() {
            out.terms.insert(Mono(vec![0; vars.len()]), c);
        }
        out
    }

    pub fn one(vars: &Vars, exemplar: &C) -> MultiPoly<C> {
        MultiPoly::constant(vars, exemplar.one_like())
    }

    /// The monomial var_index^exp with unit coefficient.
    pub fn var_pow(vars: &Vars, var_index: usize, exp: u32, exemplar: &C) -> MultiPoly<C> {
        assert!(var_index < vars.len(), "variable index out of range");
        let mut mono = vec![0; vars.len()];
        mono[var_index] = exp;
        let mut out = MultiPoly::zero(vars, exemplar);
        out.terms.insert(Mono(mono), exemplar.one_like());
        out
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Mono) -> C {
        self.terms.get(mono).cloned().unwrap_or_else(|| self.zero.clone())
    }

    /// Add c * mono into the polynomial, dropping the term if it cancels.
    pub fn add_term(&mut self, mono: Mono, c: C) -> Result<()> {
        debug_assert_eq!(mono.0.len(), self.vars.len());
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c)?;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    fn check_vars(&self, other: &MultiPoly<C>) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VarMismatch)
        }
    }

    pub fn add(&self, other: &MultiPoly<C>) -> Result<MultiPoly<C>> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly<C>) -> Result<MultiPoly<C>> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly<C> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scalar_mul(&self, c: &C) -> Result<MultiPoly<C>> {
        let mut out = MultiPoly::zero(&self.vars, &self.zero);
        if c.is_zero() {
            return Ok(out);
        }
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c)?)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &MultiPoly<C>) -> Result<MultiPoly<C>> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(&self.vars, &self.zero);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono = Mono(
                    ma.0.iter()
                        .zip(mb.0.iter())
                        .map(|(&x, &y)| x + y)
                        .collect(),
                );
                out.add_term(mono, ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<MultiPoly<C>> {
        let mut acc = MultiPoly::one(&self.vars, &self.zero);
        let mut base = self.clone();
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

    /// Coefficient-wise Frobenius: every coefficient to the q^e; exponents
    /// of the polynomial variables are untouched.
    pub fn twist_coeffs(&self, q: u64, e: u32) -> Result<MultiPoly<C>> {
        let mut out = MultiPoly::zero(&self.vars, &self.zero);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.q_power(q, e)?)?;
        }
        Ok(out)
    }

    /// Apply a fallible map to every coefficient, possibly changing rings.
    pub fn map_coeffs<D: Ring>(
        &self,
        new_zero: &D,
        f: impl Fn(&C) -> Result<D>,
    ) -> Result<MultiPoly<D>> {
        let mut out = MultiPoly::zero(&self.vars, new_zero);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?)?;
        }
        Ok(out)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.total()).max()
    }

    /// Drop every term whose exponent in `var` exceeds `cap`.
    pub fn truncate_var(&self, var: usize, cap: u32) -> MultiPoly<C> {
        let mut out = self.clone();
        out.terms.retain(|m, _| m.0[var] <= cap);
        out
    }

    /// Drop every term with any exponent above `cap` (z excluded by the
    /// caller passing only the t-variable indices).
    pub fn truncate_vars(&self, vars: &[usize], cap: u32) -> MultiPoly<C> {
        let mut out = self.clone();
        out.terms.retain(|m, _| vars.iter().all(|&v| m.0[v] <= cap));
        out
    }

    /// View as univariate in `var`: exponent -> coefficient polynomial in
    /// the remaining variables (still carried in the same variable list).
    pub fn collect_univariate(&self, var: usize) -> Result<BTreeMap<u32, MultiPoly<C>>> {
        let mut out: BTreeMap<u32, MultiPoly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut rest = m.clone();
            rest.0[var] = 0;
            out.entry(e)
                .or_insert_with(|| MultiPoly::zero(&self.vars, &self.zero))
                .add_term(rest, c.clone())?;
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    /// Exact division in the chosen variable. The divisor's leading
    /// coefficient in that variable must be a unit constant (no other
    /// variables); errors if the division leaves a remainder.
    pub fn exact_divide(&self, divisor: &MultiPoly<C>, var: usize) -> Result<MultiPoly<C>> {
        self.check_vars(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = divisor.degree_in(var).unwrap();
        let div_by_deg = divisor.collect_univariate(var)?;
        let lead = div_by_deg.get(&dd).unwrap();
        if lead.len() != 1 {
            return Err(Error::NotInvertible(
                "divisor leading coefficient is not a single constant term".into(),
            ));
        }
        let (lead_mono, lead_c) = lead.terms().next().unwrap();
        if lead_mono.total() != 0 {
            return Err(Error::NotInvertible(
                "divisor leading coefficient involves other variables".into(),
            ));
        }
        let lead_inv = lead_c.inv()?;

        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(&self.vars, &self.zero);
        loop {
            let rd = match rem.degree_in(var) {
                None => break,
                Some(rd) => rd,
            };
            if rd < dd {
                break;
            }
            // Peel the top slice of the remainder in `var`.
            let top: Vec<(Mono, C)> = rem
                .terms
                .iter()
                .filter(|(m, _)| m.0[var] == rd)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect();
            for (m, c) in top {
                let mut qm = m.clone();
                qm.0[var] = rd - dd;
                let qc = c.mul(&lead_inv)?;
                quot.add_term(qm.clone(), qc.clone())?;
                // rem -= qc * x^qm * divisor
                for (dm, dc) in &divisor.terms {
                    let mono = Mono(
                        qm.0.iter()
                            .zip(dm.0.iter())
                            .map(|(&x, &y)| x + y)
                            .collect(),
                    );
                    rem.add_term(mono, qc.mul(dc)?.neg())?;
                }
            }
        }
        if rem.is_zero() {
            Ok(quot)
        } else {
            Err(Error::InexactDivision(format!(
                "multivariate division in variable {} left {} terms",
                self.vars.names()[var],
                rem.len()
            )))
        }
    }

    /// Substitute bindings (variable index -> value or polynomial); the
    /// other variables persist. Bound variables keep their slot in the
    /// variable list with exponent zero.
    pub fn substitute(&self, bindings: &[(usize, Binding<C>)]) -> Result<MultiPoly<C>> {
        let mut out = MultiPoly::zero(&self.vars, &self.zero);
        // Cache powers per bound variable.
        let mut pow_cache: BTreeMap<(usize, u32), MultiPoly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut residual = m.clone();
            let mut factor = MultiPoly::constant(&self.vars, c.clone());
            for (vi, binding) in bindings {
                let e = residual.0[*vi];
                if e == 0 {
                    continue;
                }
                residual.0[*vi] = 0;
                let powed = match pow_cache.entry((*vi, e)) {
                    std::collections::btree_map::Entry::Occupied(entry) => entry.get().clone(),
                    std::collections::btree_map::Entry::Vacant(slot) => {
                        let base = match binding {
                            Binding::Value(v) => MultiPoly::constant(&self.vars, v.clone()),
                            Binding::Expr(p) => {
                                if p.vars != self.vars {
                                    return Err(Error::VarMismatch);
                                }
                                p.clone()
                            }
                        };
                        slot.insert(base.pow(e as u64)?).clone()
                    }
                };
                factor = factor.mul(&powed)?;
            }
            // Multiply the residual monomial back in.
            let mut shifted = MultiPoly::zero(&self.vars, &self.zero);
            for (fm, fc) in &factor.terms {
                let mono = Mono(
                    fm.0.iter()
                        .zip(residual.0.iter())
                        .map(|(&x, &y)| x + y)
                        .collect(),
                );
                shifted.add_term(mono, fc.clone())?;
            }
            out = out.add(&shifted)?;
        }
        Ok(out)
    }

    /// If the polynomial is a constant (or zero), return the coefficient.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(self.zero.clone()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.total() == 0 {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Re-home into a larger variable list; `mapping[i]` is the new index
    /// of old variable i.
    pub fn promote(&self, new_vars: &Vars, mapping: &[usize]) -> Result<MultiPoly<C>> {
        if mapping.len() != self.vars.len() {
            return Err(Error::VarMismatch);
        }
        let mut out = MultiPoly::zero(new_vars, &self.zero);
        for (m, c) in &self.terms {
            let mut mono = vec![0u32; new_vars.len()];
            for (old, &new) in mapping.iter().enumerate() {
                if m.0[old] != 0 {
                    if new >= new_vars.len() {
                        return Err(Error::VarMismatch);
                    }
                    mono[new] = m.0[old];
                }
            }
            out.add_term(Mono(mono), c.clone())?;
        }
        Ok(out)
    }

    pub fn render_with(&self, render_coeff: impl Fn(&C) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = vec![];
        for (m, c) in self.terms.iter().rev() {
            let mut factors = vec![];
            let cs = render_coeff(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(self.vars.names()[i].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.vars.names()[i], e));
                }
            }
            if factors.is_empty() {
                parts.push(cs);
            } else if cs == "1" {
                parts.push(factors.join("*"));
            } else {
                parts.push(format!("({})*{}", cs, factors.join("*")));
            }
        }
        parts.join(" + ")
    }

    /// Canonical JSON: list of [exponent-vector, coefficient] pairs in
    /// graded-lex order, z-last variable lists assumed.
    pub fn to_json_with(
        &self,
        coeff_json: impl Fn(&C) -> serde_json::Value,
    ) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    serde_json::json!([
                        m.0.iter().map(|&e| e as u64).collect::<Vec<_>>(),
                        coeff_json(c)
                    ])
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn f3() -> Arc<Field> {
        Field::make(3, 1).unwrap()
    }

    fn frac_zero() -> Frac {
        Frac::zero(&f3())
    }

    fn arb_mp() -> impl Strategy<Value = MultiPoly<Frac>> {
        // Random small polynomials in t1, z over K.
        prop::collection::vec(((0u32..3, 0u32..4), 0i64..3), 0..6).prop_map(|terms| {
            let vars = Vars::t_z(1);
            let mut out = MultiPoly::zero(&vars, &frac_zero());
            for ((et, ez), c) in terms {
                out.add_term(Mono(vec![et, ez]), Frac::from_int(&f3(), c)).unwrap();
            }
            out
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_mp(), b in arb_mp(), c in arb_mp()) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert!(a.sub(&a).unwrap().is_zero());
        }

        #[test]
        fn exact_divide_inverts_mul(a in arb_mp(), b in arb_mp()) {
            // Divide a*g by g for a divisor with unit leading z-coefficient.
            let vars = Vars::t_z(1);
            let mut g = MultiPoly::var_pow(&vars, 1, 2, &frac_zero());
            g.add_term(Mono(vec![1, 0]), Frac::from_int(&f3(), 2)).unwrap();
            let _ = b;
            let prod = a.mul(&g).unwrap();
            if !a.is_zero() {
                prop_assert_eq!(prod.exact_divide(&g, 1).unwrap(), a);
            }
        }
    }

    #[test]
    fn graded_lex_orders_by_total_degree_then_leftmost() {
        let m1 = Mono(vec![0, 3]); // z^3
        let m2 = Mono(vec![2, 0]); // t^2
        let m3 = Mono(vec![1, 2]); // t*z^2
        assert!(m2 < m1); // total degree 2 < 3
        assert!(m1 < m3); // same total degree, t-entry 0 < 1
    }

    #[test]
    fn cubic_divided_by_linear_over_f3() {
        let f = f3();
        let vars = Vars::single("z");
        let zero = Frac::zero(&f);
        // z^3 - z
        let mut num = MultiPoly::var_pow(&vars, 0, 3, &zero);
        num.add_term(Mono(vec![1]), Frac::from_int(&f, -1)).unwrap();
        // z - 2
        let mut den = MultiPoly::var_pow(&vars, 0, 1, &zero);
        den.add_term(Mono(vec![0]), Frac::from_int(&f, -2)).unwrap();
        let q = num.exact_divide(&den, 0).unwrap();
        // z^2 + 2z
        let mut expect = MultiPoly::var_pow(&vars, 0, 2, &zero);
        expect
            .add_term(Mono(vec![1]), Frac::from_int(&f, 2))
            .unwrap();
        assert_eq!(q, expect);
    }

    #[test]
    fn inexact_division_is_an_error() {
        let f = f3();
        let vars = Vars::single("z");
        let zero = Frac::zero(&f);
        let mut num = MultiPoly::var_pow(&vars, 0, 2, &zero);
        num.add_term(Mono(vec![0]), Frac::from_int(&f, 1)).unwrap();
        let mut den = MultiPoly::var_pow(&vars, 0, 1, &zero);
        den.add_term(Mono(vec![0]), Frac::from_int(&f, -1)).unwrap();
        // z^2 + 1 is not divisible by z - 1 over F_3 (1 is not a root: 1+1=2).
        assert!(matches!(
            num.exact_divide(&den, 0),
            Err(Error::InexactDivision(_))
        ));
    }

    #[test]
    fn substitution_is_a_ring_hom() {
        let f = f3();
        let vars = Vars::t_z(1);
        let zero = Frac::zero(&f);
        let a = {
            let mut p = MultiPoly::var_pow(&vars, 0, 2, &zero);
            p.add_term(Mono(vec![0, 1]), Frac::from_int(&f, 2)).unwrap();
            p
        };
        let b = {
            let mut p = MultiPoly::var_pow(&vars, 1, 1, &zero);
            p.add_term(Mono(vec![0, 0]), Frac::from_int(&f, 1)).unwrap();
            p
        };
        let theta = Frac::from_poly(Poly::x(&f));
        let bind = |p: &MultiPoly<Frac>| {
            p.substitute(&[(0, Binding::Value(theta.clone()))]).unwrap()
        };
        assert_eq!(bind(&a.mul(&b).unwrap()), bind(&a).mul(&bind(&b)).unwrap());
        assert_eq!(bind(&a.add(&b).unwrap()), bind(&a).add(&bind(&b)).unwrap());
    }

    #[test]
    fn char_p_binomial_powers_collapse() {
        let f = f3();
        let vars = Vars::t_z(1);
        let zero = Frac::zero(&f);
        // (z - t)^9 = z^9 - t^9 over F_3.
        let mut zmt = MultiPoly::var_pow(&vars, 1, 1, &zero);
        zmt.add_term(Mono(vec![1, 0]), Frac::from_int(&f, -1)).unwrap();
        let p9 = zmt.pow(9).unwrap();
        assert_eq!(p9.len(), 2);
        assert_eq!(p9.coeff(&Mono(vec![0, 9])), Frac::one(&f));
        assert_eq!(p9.coeff(&Mono(vec![9, 0])), Frac::from_int(&f, -1));
    }

    #[test]
    fn promote_places_variables() {
        let f = f3();
        let zero = Frac::zero(&f);
        let small = Vars::single("t2");
        let big = Vars::t_z(3);
        let p = MultiPoly::var_pow(&small, 0, 4, &zero);
        let promoted = p.promote(&big, &[1]).unwrap();
        assert_eq!(promoted.degree_in(1), Some(4));
        assert_eq!(promoted.degree_in(0), Some(0));
    }

    #[test]
    fn json_lists_terms_in_graded_lex_order() {
        let f = f3();
        let vars = Vars::t_z(1);
        let zero = Frac::zero(&f);
        let mut p = MultiPoly::var_pow(&vars, 1, 2, &zero);
        p.add_term(Mono(vec![1, 0]), Frac::one(&f)).unwrap();
        p.add_term(Mono(vec![0, 0]), Frac::from_int(&f, 2)).unwrap();
        let v = p.to_json_with(|c| serde_json::Value::String(c.render("x")));
        let arr = v.as_array().unwrap();
        assert_eq!(arr[0][0], serde_json::json!([0, 0]));
        assert_eq!(arr[1][0], serde_json::json!([1, 0]));
        assert_eq!(arr[2][0], serde_json::json!([0, 2]));
    }
}
