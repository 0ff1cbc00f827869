//! Carlitz-module arithmetic over A = F_q[x]: the bracket elements, the
//! factorials D_j and their products, falling factorials ell_e, the
//! interpolation polynomials b_d and E_d, twisted polynomial operators,
//! and the character map a(x) -> a(t).
//!
//! A `CarlitzCache` memoizes the tower [d], D_d, ell_d over one base
//! field; everything else is derived on demand.

use crate::algebra::{enumerate_monic, Field, Frac, MonicMode, Poly};
use crate::mvpoly::{Binding, Mono, MultiPoly, Ring, Vars};
use crate::report::{compare_exact, IdentityReport};
use crate::{Error, Result};
use std::sync::{Arc, Mutex};

/// Little-endian base-q digits of n (empty for n = 0).
pub fn base_q_digits(n: u64, q: u64) -> Vec<u64> {
    let mut digits = vec![];
    let mut n = n;
    while n > 0 {
        digits.push(n % q);
        n /= q;
    }
    digits
}

/// Digit sum l(n) in base q.
pub fn digit_sum(n: u64, q: u64) -> u64 {
    base_q_digits(n, q).iter().sum()
}

#[derive(Default)]
struct Inner {
    brackets: Vec<Poly>,
    d: Vec<Poly>,
    ell: Vec<Poly>,
}

/// Memoized tower of Carlitz special elements over one base field F_q.
pub struct CarlitzCache {
    field: Arc<Field>,
    inner: Mutex<Inner>,
}

impl CarlitzCache {
    pub fn new(field: &Arc<Field>) -> CarlitzCache {
        CarlitzCache {
            field: field.clone(),
            inner: Mutex::new(Inner::default()),
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn theta(&self) -> Poly {
        Poly::x(&self.field)
    }

    pub fn q_pow(&self, d: u32) -> Result<u64> {
        self.q()
            .checked_pow(d)
            .ok_or_else(|| Error::Overflow(format!("q^{d} exceeds u64")))
    }

    /// [d] = x^(q^d) - x for d >= 1.
    pub fn bracket(&self, d: u32) -> Result<Poly> {
        if d == 0 {
            return Err(Error::pre("bracket index must be at least 1"));
        }
        let mut inner = self.inner.lock().unwrap();
        while inner.brackets.len() < d as usize {
            let k = inner.brackets.len() as u32 + 1;
            let e = self.q_pow(k)?;
            let b = Poly::x_pow(&self.field, e as usize).sub(&Poly::x(&self.field))?;
            inner.brackets.push(b);
        }
        Ok(inner.brackets[d as usize - 1].clone())
    }

    /// D_0 = 1, D_d = [d] D_{d-1}^q; equals the product of all monic
    /// polynomials of degree d.
    pub fn d_poly(&self, d: u32) -> Result<Poly> {
        {
            let inner = self.inner.lock().unwrap();
            if let Some(p) = inner.d.get(d as usize) {
                return Ok(p.clone());
            }
        }
        let q = self.q();
        let mut inner_len = self.inner.lock().unwrap().d.len();
        if inner_len == 0 {
            self.inner.lock().unwrap().d.push(Poly::one(&self.field));
            inner_len = 1;
        }
        while inner_len <= d as usize {
            let k = inner_len as u32;
            let bracket = self.bracket(k)?;
            let prev = self.inner.lock().unwrap().d[inner_len - 1].clone();
            let next = bracket.mul(&prev.q_power(q, 1)?)?;
            self.inner.lock().unwrap().d.push(next);
            inner_len += 1;
        }
        Ok(self.inner.lock().unwrap().d[d as usize].clone())
    }

    /// ell_0 = 1, ell_e = prod_{j=1..e} (x - x^(q^j)) = (-1)^e [1][2]...[e].
    pub fn ell(&self, e: u32) -> Result<Poly> {
        {
            let inner = self.inner.lock().unwrap();
            if let Some(p) = inner.ell.get(e as usize) {
                return Ok(p.clone());
            }
        }
        let mut len = self.inner.lock().unwrap().ell.len();
        if len == 0 {
            self.inner.lock().unwrap().ell.push(Poly::one(&self.field));
            len = 1;
        }
        while len <= e as usize {
            let k = len as u32;
            let factor = self.bracket(k)?.neg();
            let prev = self.inner.lock().unwrap().ell[len - 1].clone();
            let next = prev.mul(&factor)?;
            self.inner.lock().unwrap().ell.push(next);
            len += 1;
        }
        Ok(self.inner.lock().unwrap().ell[e as usize].clone())
    }

    /// Carlitz factorial of n: prod_i D_i^(n_i) over the base-q digits.
    pub fn factorial(&self, n: u64) -> Result<Poly> {
        let mut out = Poly::one(&self.field);
        for (i, &digit) in base_q_digits(n, self.q()).iter().enumerate() {
            if digit > 0 {
                out = out.mul(&self.d_poly(i as u32)?.pow(digit)?)?;
            }
        }
        Ok(out)
    }

    /// Digit-wise exponent vector of the factorial: factorial(n) =
    /// prod D_i^(v[i]).
    pub fn factorial_exponents(&self, n: u64) -> Vec<i64> {
        base_q_digits(n, self.q()).iter().map(|&d| d as i64).collect()
    }

    /// Factorial ratio prod(n) / (prod(parts[0]) ... prod(parts[k])) as an
    /// element of K. Parts need not sum to n.
    pub fn multinomial_frac(&self, n: u64, parts: &[u64]) -> Result<Frac> {
        let mut exps = self.factorial_exponents(n);
        for &part in parts {
            for (i, &d) in base_q_digits(part, self.q()).iter().enumerate() {
                if i >= exps.len() {
                    exps.resize(i + 1, 0);
                }
                exps[i] -= d as i64;
            }
        }
        let mut num = Poly::one(&self.field);
        let mut den = Poly::one(&self.field);
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                num = num.mul(&self.d_poly(i as u32)?.pow(e as u64)?)?;
            } else if e < 0 {
                den = den.mul(&self.d_poly(i as u32)?.pow((-e) as u64)?)?;
            }
        }
        Frac::new(num, den)
    }

    /// Carlitz multinomial coefficient for parts summing to n; always an
    /// element of A, errors otherwise.
    pub fn multinomial(&self, n: u64, parts: &[u64]) -> Result<Poly> {
        if parts.iter().sum::<u64>() != n {
            return Err(Error::pre("multinomial parts must sum to n"));
        }
        let f = self.multinomial_frac(n, parts)?;
        f.as_poly().cloned().ok_or_else(|| {
            Error::InexactDivision(format!("multinomial {n} over {parts:?} is not integral"))
        })
    }

    /// b_d(t) = prod_{j=0..d-1} (t - x^(q^j)) at the given variable slot.
    pub fn b_poly(&self, d: u32, vars: &Vars, t_index: usize) -> Result<MultiPoly<Frac>> {
        let zero = Frac::zero(&self.field);
        let mut out = MultiPoly::one(vars, &zero);
        for j in 0..d {
            let e = self.q_pow(j)?;
            let mut factor = MultiPoly::var_pow(vars, t_index, 1, &zero);
            factor.add_term(
                Mono(vec![0; vars.len()]),
                Frac::from_poly(Poly::x_pow(&self.field, e as usize)).neg(),
            )?;
            out = out.mul(&factor)?;
        }
        Ok(out)
    }

    /// Formal derivative of b_d(t) at t = a, computed from the product
    /// rule: sum over omitted factors.
    pub fn b_derivative_at(&self, d: u32, a: &Frac) -> Result<Frac> {
        let mut total = Frac::zero(&self.field);
        for omit in 0..d {
            let mut prod = Frac::one(&self.field);
            for j in 0..d {
                if j == omit {
                    continue;
                }
                let e = self.q_pow(j)?;
                let factor = a.sub(&Frac::from_poly(Poly::x_pow(&self.field, e as usize)))?;
                prod = prod.mul(&factor)?;
            }
            total = total.add(&prod)?;
        }
        Ok(total)
    }

    /// E_d(z) = sum_{i=0..d} z^(q^i) / (D_i ell_{d-i}^(q^i)), the monic
    /// F_q-linear polynomial vanishing on all a with deg a < d.
    pub fn e_poly(&self, d: u32, vars: &Vars, z_index: usize) -> Result<MultiPoly<Frac>> {
        let zero = Frac::zero(&self.field);
        let mut out = MultiPoly::zero(vars, &zero);
        for i in 0..=d {
            let qi = self.q_pow(i)?;
            let den = self
                .d_poly(i)?
                .mul(&self.ell(d - i)?.pow(qi)?)?;
            let coeff = Frac::new(Poly::one(&self.field), den)?;
            let mut mono = vec![0u32; vars.len()];
            mono[z_index] = u32::try_from(qi)
                .map_err(|_| Error::Overflow(format!("q^{i} exceeds exponent range")))?;
            out.add_term(Mono(mono), coeff)?;
        }
        Ok(out)
    }

    /// Product form D_d^(-1) prod_{deg a < d} (z - a); exponential cost,
    /// for cross-checking e_poly at small d.
    pub fn e_poly_product(&self, d: u32, vars: &Vars, z_index: usize) -> Result<MultiPoly<Frac>> {
        let zero = Frac::zero(&self.field);
        let mut out = MultiPoly::one(vars, &zero);
        for a in enumerate_monic(&self.field, d, MonicMode::DegreeBelow)? {
            let mut factor = MultiPoly::var_pow(vars, z_index, 1, &zero);
            factor.add_term(Mono(vec![0; vars.len()]), Frac::from_poly(a).neg())?;
            out = out.mul(&factor)?;
        }
        let scale = Frac::new(Poly::one(&self.field), self.d_poly(d)?)?;
        out.scalar_mul(&scale)
    }

    /// The operator of the Carlitz module at a: c_a = sum_j E_j(a) tau^j,
    /// computed by Horner's rule from c_x = tau + x.
    pub fn carlitz_op(&self, a: &Poly) -> Result<TwistedPoly> {
        if a.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let theta = Frac::from_poly(self.theta());
        let c_theta = TwistedPoly::new(
            self.q(),
            vec![theta.clone(), Frac::one(&self.field)],
        );
        let mut out = TwistedPoly::new(self.q(), vec![]);
        let deg = match a.degree() {
            None => return Ok(out),
            Some(d) => d,
        };
        for i in (0..=deg).rev() {
            out = out.mul(&c_theta)?;
            let c = Frac::constant(&self.field, a.coeff(i));
            out = out.add(&TwistedPoly::new(self.q(), vec![c]))?;
        }
        Ok(out)
    }

    /// Character value a(t): the image of a under x -> t at the chosen
    /// variable slot, coefficients read as constants of K.
    pub fn chi(&self, a: &Poly, vars: &Vars, t_index: usize) -> Result<MultiPoly<Frac>> {
        if a.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let zero = Frac::zero(&self.field);
        let mut out = MultiPoly::zero(vars, &zero);
        let deg = match a.degree() {
            None => return Ok(out),
            Some(d) => d,
        };
        for k in 0..=deg {
            let c = a.coeff(k);
            if c != self.field.zero() {
                let mut mono = vec![0u32; vars.len()];
                mono[t_index] = k as u32;
                out.add_term(Mono(mono), Frac::constant(&self.field, c))?;
            }
        }
        Ok(out)
    }

    /// prod_i a(t_i) over the variable slots in `t_indices`.
    pub fn chi_product(
        &self,
        a: &Poly,
        vars: &Vars,
        t_indices: &[usize],
    ) -> Result<MultiPoly<Frac>> {
        let mut out = MultiPoly::one(vars, &Frac::zero(&self.field));
        for &idx in t_indices {
            out = out.mul(&self.chi(a, vars, idx)?)?;
        }
        Ok(out)
    }
}

/// Polynomial in the Frobenius twist tau with K-coefficients; tau c =
/// c^q tau, so multiplication twists the right factor's coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct TwistedPoly {
    q: u64,
    /// coeffs[i] multiplies tau^i; no trailing zeros.
    coeffs: Vec<Frac>,
}

impl TwistedPoly {
    pub fn new(q: u64, mut coeffs: Vec<Frac>) -> TwistedPoly {
        while coeffs.last().map(Frac::is_zero) == Some(true) {
            coeffs.pop();
        }
        TwistedPoly { q, coeffs }
    }

    pub fn coeff(&self, i: usize) -> Option<&Frac> {
        self.coeffs.get(i)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn add(&self, rhs: &TwistedPoly) -> Result<TwistedPoly> {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in rhs.coeffs.iter().enumerate() {
            if i < coeffs.len() {
                coeffs[i] = coeffs[i].add(c)?;
            } else {
                coeffs.push(c.clone());
            }
        }
        Ok(TwistedPoly::new(self.q, coeffs))
    }

    pub fn mul(&self, rhs: &TwistedPoly) -> Result<TwistedPoly> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Ok(TwistedPoly::new(self.q, vec![]));
        }
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let twisted = b.q_power(self.q, i as u32)?;
                coeffs[i + j] = coeffs[i + j].add(&a.mul(&twisted)?)?;
            }
        }
        Ok(TwistedPoly::new(self.q, coeffs))
    }

    /// Apply the operator to a polynomial in z: sum_i c_i g^(q^i).
    pub fn apply(&self, g: &MultiPoly<Frac>) -> Result<MultiPoly<Frac>> {
        let mut out = MultiPoly::zero(g.vars(), g.zero_coeff());
        let mut power = g.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.pow(self.q)?;
            }
            if !c.is_zero() {
                out = out.add(&power.scalar_mul(c)?)?;
            }
        }
        Ok(out)
    }
}

/// E_d(z)^q = E_d(z) + [d+1] E_{d+1}(z), checked as an exact polynomial
/// identity. This is the Frobenius step that climbs the E-tower one level.
pub fn verify_ed_recursion(cache: &CarlitzCache, d: u32) -> Result<IdentityReport> {
    let started = std::time::Instant::now();
    let vars = Vars::t_z(0);
    let lhs = cache.e_poly(d, &vars, 0)?.pow(cache.q())?;
    let step = cache
        .e_poly(d + 1, &vars, 0)?
        .scalar_mul(&Frac::from_poly(cache.bracket(d + 1)?))?;
    let rhs = cache.e_poly(d, &vars, 0)?.add(&step)?;
    compare_exact(
        "ed-recursion",
        serde_json::json!({"q": cache.q(), "d": d}),
        &lhs,
        &rhs,
        started,
    )
}

/// Evaluate a multivariate polynomial at a full point.
pub fn eval_at(p: &MultiPoly<Frac>, point: &[Frac]) -> Result<Frac> {
    if point.len() != p.vars().len() {
        return Err(Error::VarMismatch);
    }
    let bindings: Vec<(usize, Binding<Frac>)> = point
        .iter()
        .enumerate()
        .map(|(i, v)| (i, Binding::Value(v.clone())))
        .collect();
    let res = p.substitute(&bindings)?;
    res.as_constant()
        .ok_or_else(|| Error::pre("evaluation left free variables"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::valuation;

    fn cache3() -> CarlitzCache {
        CarlitzCache::new(&Field::make(3, 1).unwrap())
    }

    #[test]
    fn brackets_and_factorials_match_products_of_monics() {
        let c = cache3();
        let f = c.field().clone();
        assert_eq!(c.bracket(1).unwrap(), Poly::from_ints(&f, &[0, -1, 0, 1]));
        // D_d is the product of all monic polynomials of degree d.
        for d in 1..=2u32 {
            let mut prod = Poly::one(&f);
            for m in enumerate_monic(&f, d, MonicMode::ExactDegree).unwrap() {
                prod = prod.mul(&m).unwrap();
            }
            assert_eq!(c.d_poly(d).unwrap(), prod);
        }
    }

    #[test]
    fn ell_is_signed_product_of_brackets() {
        let c = cache3();
        for e in 0..=3u32 {
            let mut signed = Poly::one(c.field());
            for j in 1..=e {
                signed = signed.mul(&c.bracket(j).unwrap()).unwrap();
            }
            if e % 2 == 1 {
                signed = signed.neg();
            }
            assert_eq!(c.ell(e).unwrap(), signed);
        }
    }

    #[test]
    fn carlitz_op_at_x_squared() {
        let c = cache3();
        let f = c.field().clone();
        let a = Poly::x_pow(&f, 2);
        let op = c.carlitz_op(&a).unwrap();
        // c_{x^2} = tau^2 + (x^q + x) tau + x^2.
        assert_eq!(op.degree(), Some(2));
        assert_eq!(op.coeff(2).unwrap(), &Frac::one(&f));
        let expect1 = Frac::from_poly(Poly::from_ints(&f, &[0, 1, 0, 1]));
        assert_eq!(op.coeff(1).unwrap(), &expect1);
        assert_eq!(op.coeff(0).unwrap(), &Frac::from_poly(Poly::x_pow(&f, 2)));
    }

    #[test]
    fn carlitz_op_is_multiplicative() {
        let c = cache3();
        let f = c.field().clone();
        for pa in [&[1i64, 1][..], &[2, 0, 1], &[0, 1]] {
            for pb in [&[1i64, 2][..], &[0, 0, 1]] {
                let a = Poly::from_ints(&f, pa);
                let b = Poly::from_ints(&f, pb);
                let ab = a.mul(&b).unwrap();
                assert_eq!(
                    c.carlitz_op(&ab).unwrap(),
                    c.carlitz_op(&a).unwrap().mul(&c.carlitz_op(&b).unwrap()).unwrap()
                );
            }
        }
    }

    #[test]
    fn e_poly_matches_product_form() {
        let c = cache3();
        let vars = Vars::single("z");
        for d in 0..=2u32 {
            assert_eq!(
                c.e_poly(d, &vars, 0).unwrap(),
                c.e_poly_product(d, &vars, 0).unwrap()
            );
        }
    }

    #[test]
    fn e_poly_vanishes_below_degree_and_is_linear() {
        let c = cache3();
        let f = c.field().clone();
        let vars = Vars::single("z");
        let e2 = c.e_poly(2, &vars, 0).unwrap();
        for a in enumerate_monic(&f, 2u32, MonicMode::DegreeBelow).unwrap() {
            let v = eval_at(&e2, &[Frac::from_poly(a)]).unwrap();
            assert!(v.is_zero());
        }
        // F_q-linearity on a couple of points outside the kernel.
        let p1 = Frac::from_poly(Poly::x_pow(&f, 2));
        let p2 = Frac::from_poly(Poly::from_ints(&f, &[1, 0, 0, 1]));
        let lhs = eval_at(&e2, &[p1.add(&p2).unwrap()]).unwrap();
        let rhs = eval_at(&e2, &[p1.clone()])
            .unwrap()
            .add(&eval_at(&e2, &[p2]).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn e_poly_derivative_is_inverse_ell() {
        let c = cache3();
        let vars = Vars::single("z");
        for d in 0..=3u32 {
            let e = c.e_poly(d, &vars, 0).unwrap();
            let lin = e.coeff(&Mono(vec![1]));
            let expect = Frac::new(Poly::one(c.field()), c.ell(d).unwrap()).unwrap();
            assert_eq!(lin, expect);
        }
    }

    #[test]
    fn e_recursion_steps_up_one_level() {
        // E_d^q = E_d + [d+1] E_{d+1}.
        let c = cache3();
        let vars = Vars::single("z");
        for d in 0..=2u32 {
            let ed = c.e_poly(d, &vars, 0).unwrap();
            let ed1 = c.e_poly(d + 1, &vars, 0).unwrap();
            let lhs = ed.pow(c.q()).unwrap();
            let bracket = Frac::from_poly(c.bracket(d + 1).unwrap());
            let rhs = ed.add(&ed1.scalar_mul(&bracket).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn b_poly_and_derivative_values() {
        let c = cache3();
        let f = c.field().clone();
        let vars = Vars::single("t");
        // b_2(t) = (t - x)(t - x^3).
        let b2 = c.b_poly(2, &vars, 0).unwrap();
        assert_eq!(b2.degree_in(0), Some(2));
        let at_theta = eval_at(&b2, &[Frac::from_poly(Poly::x(&f))]).unwrap();
        assert!(at_theta.is_zero());
        // b_2'(x) = x - x^3 = ell_1 and b_2'(x^3) = x^3 - x = D_1.
        let d1 = Frac::from_poly(c.d_poly(1).unwrap());
        let ell1 = Frac::from_poly(c.ell(1).unwrap());
        assert_eq!(
            c.b_derivative_at(2, &Frac::from_poly(Poly::x(&f))).unwrap(),
            ell1
        );
        assert_eq!(
            c.b_derivative_at(2, &Frac::from_poly(Poly::x_pow(&f, 3))).unwrap(),
            d1
        );
    }

    #[test]
    fn chi_is_multiplicative_and_counts_valuations() {
        let c = cache3();
        let f = c.field().clone();
        let vars = Vars::single("t");
        let a = Poly::from_ints(&f, &[1, 1]);
        let b = Poly::from_ints(&f, &[2, 0, 1]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(
            c.chi(&ab, &vars, 0).unwrap(),
            c.chi(&a, &vars, 0)
                .unwrap()
                .mul(&c.chi(&b, &vars, 0).unwrap())
                .unwrap()
        );
        // Sanity for the valuation helper on a bracket: [1] = x(x-1)(x+1)
        // has valuation 1 at each linear prime.
        let x = Poly::x(&f);
        assert_eq!(valuation(&c.bracket(1).unwrap(), &x).unwrap(), 1);
    }

    #[test]
    fn digits_and_factorial_exponents() {
        assert_eq!(base_q_digits(304, 3), vec![1, 2, 0, 2, 0, 1]);
        assert_eq!(digit_sum(304, 3), 6);
        assert_eq!(digit_sum(646, 3), 10);
        let c = cache3();
        // prod(4) = D_0 D_1 for digits (1,1).
        let f4 = c.factorial(4).unwrap();
        assert_eq!(f4, c.d_poly(1).unwrap());
        // prod(q^j) = D_j.
        assert_eq!(c.factorial(9).unwrap(), c.d_poly(2).unwrap());
    }

    #[test]
    fn multinomials_are_integral_when_parts_sum() {
        let c = cache3();
        // Exhaustive small sweep: all splits of n into two parts.
        for n in 0..30u64 {
            for a in 0..=n {
                let m = c.multinomial(n, &[a, n - a]).unwrap();
                assert!(!m.is_zero());
            }
        }
        // A no-carry case stays a clean product of D-powers: n = 12 = (0,1,1),
        // parts 3 and 9 give prod(12)/(prod(3)prod(9)) = 1.
        assert!(c.multinomial(12, &[3, 9]).unwrap().is_one());
    }

    #[test]
    fn frobenius_climbs_the_e_tower() {
        let c3 = cache3();
        for d in 0..=2 {
            let r = verify_ed_recursion(&c3, d).unwrap();
            assert!(r.pass, "q=3 d={d}: {:?}", r.witness);
        }
        let c5 = CarlitzCache::new(&Field::make(5, 1).unwrap());
        for d in 0..=1 {
            let r = verify_ed_recursion(&c5, d).unwrap();
            assert!(r.pass, "q=5 d={d}: {:?}", r.witness);
        }
    }
}
