//! Bernoulli-Carlitz numbers and their divisibility structure.
//!
//! BC(n) is defined through z/e_C(z) = sum BC(n)/Pi(n) z^n and computed by
//! the factorial-bracket recursion. On top of the table: denominator
//! classification (the function-field von Staudt shape), the torsion-point
//! recurrences at degrees one and two, the two tuple norms with their
//! maximizers, numerator divisibility bounds, exact valuation measurement,
//! and the experimental scanner for higher-degree divisibility.

use crate::algebra::{
    enumerate_irreducibles, roots_in_extension, valuation, Field, Fq, Frac, Poly,
};
use crate::carlitz::{digit_sum, CarlitzCache};
use crate::report::{compare_frac, IdentityReport, Witness};
use crate::{Error, Result};
use serde_json::json;
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

/// Shape of a BC denominator: trivial, or the product of every monic
/// irreducible of one fixed degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DenominatorClass {
    Unit,
    AllIrreducible { degree: u32 },
}

impl DenominatorClass {
    pub fn label(&self) -> String {
        match self {
            DenominatorClass::Unit => "unit".into(),
            DenominatorClass::AllIrreducible { degree } => format!("P{degree}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BCRecord {
    pub n: u64,
    pub value: Frac,
    pub class: DenominatorClass,
}

impl BCRecord {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "numerator": self.value.num().render("x"),
            "denominator": self.value.den().render("x"),
            "denominator_class": self.class.label(),
        })
    }
}

/// Memoized table of Bernoulli-Carlitz numbers for one base field.
pub struct BcTable {
    cache: CarlitzCache,
    memo: BTreeMap<u64, Frac>,
}

impl BcTable {
    pub fn new(field: &Arc<Field>) -> BcTable {
        BcTable {
            cache: CarlitzCache::new(field),
            memo: BTreeMap::new(),
        }
    }

    pub fn cache(&self) -> &CarlitzCache {
        &self.cache
    }

    pub fn field(&self) -> Arc<Field> {
        self.cache.field().clone()
    }

    fn check_index(&self, n: u64) -> Result<()> {
        let q = self.cache.q();
        if n % (q - 1) != 0 {
            return Err(Error::pre(format!(
                "BC({n}) undefined: index must be divisible by q - 1 = {}",
                q - 1
            )));
        }
        Ok(())
    }

    /// BC(n), filling the table bottom-up. The recursion walks down by
    /// q^j - 1 at a time, so everything on the (q-1)-lattice below n is
    /// computed once and kept.
    pub fn value(&mut self, n: u64) -> Result<Frac> {
        self.check_index(n)?;
        if let Some(v) = self.memo.get(&n) {
            return Ok(v.clone());
        }
        let q = self.cache.q();
        let field = self.cache.field().clone();
        let mut k = 0u64;
        while k <= n {
            if !self.memo.contains_key(&k) {
                let v = self.compute_one(k, &field)?;
                self.memo.insert(k, v);
            }
            k += q - 1;
        }
        Ok(self.memo[&n].clone())
    }

    fn compute_one(&self, n: u64, field: &Arc<Field>) -> Result<Frac> {
        if n == 0 {
            return Ok(Frac::one(field));
        }
        let mut acc = Frac::zero(field);
        let mut j = 1u32;
        loop {
            let qj = self.cache.q_pow(j)?;
            if qj > n + 1 {
                break;
            }
            let m = n + 1 - qj;
            let coeff = self.cache.multinomial_frac(n, &[m, qj])?;
            acc = acc.add(&coeff.mul(&self.memo[&m])?)?;
            j += 1;
        }
        Ok(acc.neg())
    }

    pub fn record(&mut self, n: u64) -> Result<BCRecord> {
        let value = self.value(n)?;
        let class = classify_denominator(&self.cache, &value)?;
        Ok(BCRecord { n, value, class })
    }

    /// BC indices present so far (ascending).
    pub fn computed(&self) -> impl Iterator<Item = u64> + '_ {
        self.memo.keys().copied()
    }
}

/// Product of every monic irreducible of the given degree.
pub fn all_irreducible_product(field: &Arc<Field>, degree: u32) -> Result<Poly> {
    let mut out = Poly::one(field);
    for v in enumerate_irreducibles(field, degree)? {
        out = out.mul(&v)?;
    }
    Ok(out)
}

/// The von Staudt-type structure check: a BC denominator is 1 or the full
/// product of monic irreducibles of a single degree. Anything else is a
/// hard error (it would falsify the implementation).
pub fn classify_denominator(cache: &CarlitzCache, value: &Frac) -> Result<DenominatorClass> {
    let den = value.den();
    let deg = match den.degree() {
        None => return Err(Error::pre("zero denominator")),
        Some(0) => return Ok(DenominatorClass::Unit),
        Some(d) => d,
    };
    let field = cache.field();
    // deg P_m = m * (number of monic irreducibles of degree m) grows
    // strictly, so at most one candidate degree matches.
    for m in 1..=deg as u32 {
        let count = crate::algebra::irreducible_count(field.q(), m);
        let pm_deg = (m as u64) * count;
        if pm_deg == deg as u64 {
            let pm = all_irreducible_product(field, m)?;
            if &pm == den {
                return Ok(DenominatorClass::AllIrreducible { degree: m });
            }
        }
        if pm_deg > deg as u64 {
            break;
        }
    }
    Err(Error::pre(format!(
        "denominator {} is neither a unit nor a full irreducible product",
        den.render("x")
    )))
}

pub fn von_staudt_check(table: &mut BcTable, n: u64) -> Result<DenominatorClass> {
    let value = table.value(n)?;
    classify_denominator(&table.cache, &value)
}

/// Exact recurrence at a degree-one torsion point lambda in F_q:
/// (1 - (x - lambda)^n) BC(n) equals the bracket-weighted sum of lower
/// BC values over tuples beta in N^(q-1).
pub fn verify_bc_recurrence_deg1(table: &mut BcTable, n: u64, lambda: Fq) -> Result<IdentityReport> {
    let started = Instant::now();
    table.check_index(n)?;
    if n == 0 {
        return Err(Error::pre("the recurrence needs n >= 1"));
    }
    let q = table.cache.q();
    let field = table.field();
    let lin = Poly::from_coeffs(&field, vec![field.neg(lambda), field.one()]);
    let lhs = Frac::from_poly(Poly::one(&field).sub(&lin.pow(n)?)?).mul(&table.value(n)?)?;
    let lin_frac = Frac::from_poly(lin);
    let mut rhs = Frac::zero(&field);
    for beta in tuples_up_to(q, (q - 1) as usize, n)? {
        let s: u64 = beta.iter().map(|&b| q.pow(b)).sum();
        let coeff = table.cache.multinomial_frac(n, &[n - s, s])?;
        let power = lin_frac.powi(n as i64 - 1 - s as i64)?;
        let term = coeff.mul(&power)?.mul(&table.value(n - s)?)?;
        rhs = rhs.add(&term)?;
    }
    let params = json!({"q": q, "n": n, "lambda": field.render(lambda)});
    Ok(compare_frac("bc-recur-1", params, &lhs, &rhs, started))
}

/// Exact recurrence at a degree-two torsion point: lambda is a root of the
/// monic irreducible quadratic v, arithmetic happens over F_{q^2}(x), and
/// every denominator is a power of (x - lambda) or (x - lambda^q) thanks
/// to x^(q^k) - lambda = (x - lambda^(q^k))^(q^k) with lambda^(q^2) = lambda.
pub fn verify_bc_recurrence_deg2(table: &mut BcTable, n: u64, v: &Poly) -> Result<IdentityReport> {
    let started = Instant::now();
    table.check_index(n)?;
    let q = table.cache.q();
    let l = digit_sum(n, q);
    if l < 2 * (q - 1) {
        return Err(Error::pre(format!(
            "digit sum l({n}) = {l} is below the hypothesis 2(q-1) = {}",
            2 * (q - 1)
        )));
    }
    let ext = roots_in_extension(v, 2)?;
    let big = &ext.big;
    let lambda = ext.roots[0];
    let lambda_conj = big.pow(lambda, q);
    table.value(n)?;
    let bc_ext: BTreeMap<u64, Frac> = table
        .memo
        .range(..=n)
        .map(|(&m, f)| (m, f.map_into(&ext.emb)))
        .collect();

    // Incremental caches of (x - lambda)^k and (x - lambda^q)^k.
    let lin1 = Poly::from_coeffs(big, vec![big.neg(lambda), big.one()]);
    let lin2 = Poly::from_coeffs(big, vec![big.neg(lambda_conj), big.one()]);
    let mut pw1 = Vec::with_capacity(n as usize + 1);
    let mut pw2 = Vec::with_capacity(n as usize + 1);
    pw1.push(Poly::one(big));
    pw2.push(Poly::one(big));
    for k in 1..=n as usize {
        pw1.push(pw1[k - 1].mul(&lin1)?);
        pw2.push(pw2[k - 1].mul(&lin2)?);
    }

    let v_n = pw1[n as usize].mul(&pw2[n as usize])?;
    let lhs = Frac::from_poly(v_n.sub(&Poly::one(big))?).mul(&bc_ext[&n])?;

    let assert_integral = l >= 3 * (q - 1);
    let mut rhs_values = Vec::with_capacity(2);
    // The swap = true run conjugates lambda, which exchanges the roles of
    // the two linear factors; both runs must reproduce the left side.
    for swap in [false, true] {
        let rhs = deg2_rhs_sum(table, &ext.emb, n, &bc_ext, &pw1, &pw2, swap, assert_integral)?;
        rhs_values.push(rhs);
    }

    let params = json!({"q": q, "n": n, "v": v.render("x")});
    for rhs in &rhs_values {
        if rhs != &lhs {
            let witness = Witness {
                monomial: vec![],
                lhs: lhs.render("x"),
                rhs: rhs.render("x"),
            };
            return Ok(IdentityReport::failing("bc-recur-2", params, started, witness));
        }
    }
    Ok(IdentityReport::passing("bc-recur-2", params, started))
}

/// The tuple sum of the degree-two recurrence, grouped by the pair of
/// denominator exponents so the expensive large-degree products happen
/// once per group instead of once per tuple.
#[allow(clippy::too_many_arguments)]
fn deg2_rhs_sum(
    table: &BcTable,
    emb: &crate::algebra::Embedding,
    n: u64,
    bc_ext: &BTreeMap<u64, Frac>,
    pw1: &[Poly],
    pw2: &[Poly],
    swap: bool,
    assert_integral: bool,
) -> Result<Frac> {
    let q = table.cache.q();
    let big = pw1[0].field().clone();
    let len = 2 * (q - 1) as usize;
    let mut groups: BTreeMap<(u64, u64), Poly> = BTreeMap::new();
    for beta in tuples_up_to(q, len, n)? {
        let total: u64 = beta.iter().map(|&b| q.pow(b)).sum();
        let block1: u64 = beta[..len / 2].iter().map(|&b| q.pow(b)).sum();
        let block2 = total - block1;
        let m = n - total;
        // Exponent bookkeeping: in the first block the factor
        // x^(q^b) - lambda is (x - lambda)^(q^b) for even b and
        // (x - lambda^q)^(q^b) for odd b; the second block (built on
        // lambda^q) swaps the parity rule.
        let mut a_exp = 0u64;
        let mut b_exp = 0u64;
        for (i, &b) in beta.iter().enumerate() {
            let first_block = i < len / 2;
            let even = b % 2 == 0;
            if first_block == even {
                a_exp += q.pow(b);
            } else {
                b_exp += q.pow(b);
            }
        }
        if swap {
            std::mem::swap(&mut a_exp, &mut b_exp);
        }
        if assert_integral && (a_exp > n - 1 || b_exp > n - 1) {
            return Err(Error::pre(format!(
                "summand at beta {beta:?} is non-integral despite the digit-sum hypothesis"
            )));
        }
        let tri = table.cache.multinomial(n, &[m, block1, block2])?.map_into(emb);
        match groups.entry((a_exp, b_exp)) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let merged = e.get().add(&tri)?;
                e.insert(merged);
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(tri);
            }
        }
    }
    // Second grouping stage: terms sharing the lower index m admit a plain
    // polynomial sum of their numerators (the linear-factor powers are
    // nonnegative whenever m >= 2), so only one fraction per m is built.
    let mut poly_by_m: BTreeMap<u64, Poly> = BTreeMap::new();
    let mut extras = Frac::zero(&big);
    for ((a_exp, b_exp), tri_sum) in groups {
        let m = n - a_exp - b_exp;
        let e1 = n as i64 - 1 - a_exp as i64;
        let e2 = n as i64 - 1 - b_exp as i64;
        if e1 >= 0 && e2 >= 0 {
            let num = tri_sum.mul(&pw1[e1 as usize])?.mul(&pw2[e2 as usize])?;
            match poly_by_m.entry(m) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = e.get().add(&num)?;
                    e.insert(merged);
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(num);
                }
            }
        } else {
            let (num1, den1) = frac_pow_at(pw1, e1, &big)?;
            let (num2, den2) = frac_pow_at(pw2, e2, &big)?;
            let mut term =
                Frac::from_poly(tri_sum.mul(&num1)?.mul(&num2)?).mul(&bc_ext[&m])?;
            if let Some(den) = den1 {
                term = term.div(&Frac::from_poly(den))?;
            }
            if let Some(den) = den2 {
                term = term.div(&Frac::from_poly(den))?;
            }
            extras = extras.add(&term)?;
        }
    }
    let mut rhs = extras;
    for (m, num) in poly_by_m {
        rhs = rhs.add(&Frac::from_poly(num).mul(&bc_ext[&m])?)?;
    }
    Ok(rhs)
}

/// Power lookup tolerating a negative exponent: returns (numerator part,
/// optional denominator part).
fn frac_pow_at(pw: &[Poly], e: i64, field: &Arc<Field>) -> Result<(Poly, Option<Poly>)> {
    if e >= 0 {
        Ok((pw[e as usize].clone(), None))
    } else {
        Ok((Poly::one(field), Some(pw[(-e) as usize].clone())))
    }
}

/// All tuples of the given length with q^(b_1) + ... + q^(b_len) <= n.
pub(crate) fn tuples_up_to(q: u64, len: usize, n: u64) -> Result<Vec<Vec<u32>>> {
    if n < len as u64 {
        return Ok(vec![]);
    }
    let mut max_b = 0u32;
    while q.pow(max_b + 1) <= n {
        max_b += 1;
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; len];
    loop {
        let total: u64 = current.iter().map(|&b| q.pow(b)).sum();
        if total <= n {
            out.push(current.clone());
        }
        // Odometer increment over 0..=max_b per position.
        let mut i = 0;
        loop {
            if i == len {
                return Ok(out);
            }
            if current[i] < max_b {
                current[i] += 1;
                break;
            }
            current[i] = 0;
            i += 1;
        }
    }
}

/// A tuple with its two norms and ordered-shape analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleRecord {
    pub beta: Vec<u32>,
    pub norm1: u64,
    /// Split index: number of leading even entries, present when the tuple
    /// has the ordered shape (evens non-increasing, then odds non-decreasing).
    pub split: Option<usize>,
    /// Second norm, defined only for ordered tuples of length 2(q-1).
    pub norm2: Option<u64>,
}

impl TupleRecord {
    pub fn norm2(&self) -> Result<u64> {
        self.norm2
            .ok_or_else(|| Error::pre("second norm requires an ordered tuple of length 2(q-1)"))
    }
}

fn ordered_split(beta: &[u32]) -> Option<usize> {
    let e = beta.iter().take_while(|&&b| b % 2 == 0).count();
    if beta[e..].iter().any(|&b| b % 2 == 0) {
        return None;
    }
    if beta[..e].windows(2).any(|w| w[0] < w[1]) {
        return None;
    }
    if beta[e..].windows(2).any(|w| w[0] > w[1]) {
        return None;
    }
    Some(e)
}

/// Both norms of a tuple. The second norm skips the entries between
/// positions min(e, q-1) and max(q, e+1) exclusive (1-indexed).
pub fn norms(q: u64, beta: &[u32]) -> Result<TupleRecord> {
    let mut norm1 = 0u64;
    for &b in beta {
        norm1 = norm1
            .checked_add(
                q.checked_pow(b)
                    .ok_or_else(|| Error::Overflow("tuple entry too large".into()))?,
            )
            .ok_or_else(|| Error::Overflow("first norm overflow".into()))?;
    }
    let split = ordered_split(beta);
    let norm2 = match split {
        Some(e) if beta.len() == 2 * (q as usize - 1) => {
            let qm1 = q as usize - 1;
            let first_hi = e.min(qm1);
            let second_lo = (qm1 + 1).max(e + 1);
            let mut n2 = 0u64;
            for &b in &beta[..first_hi] {
                n2 += q.pow(b);
            }
            for &b in &beta[second_lo - 1..] {
                n2 += q.pow(b);
            }
            Some(n2)
        }
        _ => None,
    };
    Ok(TupleRecord {
        beta: beta.to_vec(),
        norm1,
        split,
        norm2,
    })
}

/// Maximizer result; `hypothesis_ok` records whether the digit-sum length
/// hypothesis backing the closed-form construction holds (the tuple is
/// still computed either way).
#[derive(Clone, Debug)]
pub struct MaxTuple {
    pub record: TupleRecord,
    pub hypothesis_ok: bool,
}

fn order_entries(mut entries: Vec<u32>) -> Vec<u32> {
    let mut evens: Vec<u32> = entries.iter().copied().filter(|b| b % 2 == 0).collect();
    let mut odds: Vec<u32> = entries.iter().copied().filter(|b| b % 2 == 1).collect();
    evens.sort_unstable_by(|a, b| b.cmp(a));
    odds.sort_unstable();
    entries.clear();
    entries.extend(evens);
    entries.extend(odds);
    entries
}

/// The |.|_1-maximal tuple of length s(q-1): reservation greedy, which on
/// tuples of powers of q is exact (each slot takes the largest power that
/// leaves room for the remaining slots). Returned in ordered form.
pub fn max_tuple_norm1(cache: &CarlitzCache, n: u64, s: u64) -> Result<MaxTuple> {
    let q = cache.q();
    if n % (q - 1) != 0 {
        return Err(Error::pre("index must be divisible by q - 1"));
    }
    let slots = (s * (q - 1)) as usize;
    if n < slots as u64 {
        return Err(Error::pre(format!(
            "no tuple of length {slots} fits below {n}"
        )));
    }
    let mut remaining = n;
    let mut picks = Vec::with_capacity(slots);
    for slot in 0..slots {
        let reserve = (slots - slot - 1) as u64;
        let budget = remaining - reserve;
        let mut b = 0u32;
        while q.checked_pow(b + 1).map_or(false, |p| p <= budget) {
            b += 1;
        }
        picks.push(b);
        remaining -= q.pow(b);
    }
    let ordered = order_entries(picks);
    let record = norms(q, &ordered)?;
    let hypothesis_ok = digit_sum(n, q) >= (s + 1) * (q - 1);
    Ok(MaxTuple { record, hypothesis_ok })
}

/// The |.|_2-maximal ordered tuple in M_2(n): start from the |.|_1
/// maximizer; when the even prefix is shorter than q-1, raise every
/// first-block entry at or below the pivot to pivot - 1 (making them
/// even); symmetrically shrink surplus even entries when it is longer.
pub fn max_tuple_norm2(cache: &CarlitzCache, n: u64) -> Result<MaxTuple> {
    let q = cache.q();
    let base = max_tuple_norm1(cache, n, 2)?;
    let qm1 = (q - 1) as usize;
    let mut beta = base.record.beta.clone();
    let e = base.record.split.expect("norm-1 maximizer is built ordered");
    let hypothesis_ok = digit_sum(n, q) >= 3 * (q - 1);
    if e != qm1 {
        if e < qm1 {
            // Pivot: the entry at 1-indexed position q-1 (an odd one).
            let pivot = beta[qm1 - 1];
            if pivot == 0 {
                return Err(Error::pre(
                    "pivot entry is zero; the length hypothesis fails too hard to adjust",
                ));
            }
            for b in beta[..qm1].iter_mut() {
                if *b <= pivot {
                    *b = pivot - 1;
                }
            }
        } else {
            // Surplus even entries sit at 1-indexed positions q..e; they
            // are the smallest evens, bounded by the entry at position q.
            let pivot = beta[qm1];
            if pivot == 0 {
                return Err(Error::pre(
                    "pivot entry is zero; the length hypothesis fails too hard to adjust",
                ));
            }
            for b in beta[qm1..e].iter_mut() {
                if *b <= pivot {
                    *b = pivot - 1;
                }
            }
        }
        beta = order_entries(beta);
    }
    let record = norms(q, &beta)?;
    if record.norm1 > n {
        return Err(Error::pre(
            "adjusted tuple left the admissible set; hypothesis violated",
        ));
    }
    Ok(MaxTuple { record, hypothesis_ok })
}

#[derive(Clone, Debug)]
pub struct DivisibilityBound {
    pub n: u64,
    /// Exponent of the bound (may be negative for degenerate small n;
    /// a bound below zero is vacuous).
    pub exponent: i64,
    /// The polynomial whose power divides the numerator.
    pub basis: Poly,
    /// Norm of the maximizing tuple used.
    pub tuple_norm: u64,
    /// Denominator class of BC(n - tuple_norm), which decides the branch.
    pub branch_class: DenominatorClass,
}

/// Numerator divisibility from the degree-one recurrence: the power of
/// x^q - x dividing the numerator of BC(n) is at least n - 1 - |mu|_1,
/// dropping to n - 2 - |mu|_1 when BC(n - |mu|_1) has denominator x^q - x.
pub fn divisibility_bound_deg1(table: &mut BcTable, n: u64) -> Result<DivisibilityBound> {
    let q = table.cache.q();
    let mu = max_tuple_norm1(&table.cache, n, 1)?;
    let tuple_norm = mu.record.norm1;
    let class = von_staudt_check(table, n - tuple_norm)?;
    let penalty = if class == (DenominatorClass::AllIrreducible { degree: 1 }) {
        2
    } else {
        1
    };
    let field = table.field();
    let basis = all_irreducible_product(&field, 1)?;
    debug_assert_eq!(basis.degree(), Some(q as usize));
    Ok(DivisibilityBound {
        n,
        exponent: n as i64 - penalty - tuple_norm as i64,
        basis,
        tuple_norm,
        branch_class: class,
    })
}

/// Same shape at degree two, driven by the |.|_2-maximal tuple.
pub fn divisibility_bound_deg2(table: &mut BcTable, n: u64) -> Result<DivisibilityBound> {
    let mu = max_tuple_norm2(&table.cache, n)?;
    let tuple_norm = mu.record.norm2()?;
    let class = von_staudt_check(table, n - tuple_norm)?;
    let penalty = if class == (DenominatorClass::AllIrreducible { degree: 2 }) {
        2
    } else {
        1
    };
    let field = table.field();
    Ok(DivisibilityBound {
        n,
        exponent: n as i64 - penalty - tuple_norm as i64,
        basis: all_irreducible_product(&field, 2)?,
        tuple_norm,
        branch_class: class,
    })
}

#[derive(Clone, Debug)]
pub struct ValuationReport {
    pub n: u64,
    pub degree: u32,
    /// Valuation of the numerator at each monic irreducible of the degree.
    pub per_irreducible: Vec<(Poly, u32)>,
    /// The exact P_d power dividing the numerator: the minimum above.
    pub min: u32,
}

pub fn measure_valuation(table: &mut BcTable, n: u64, degree: u32) -> Result<ValuationReport> {
    let value = table.value(n)?;
    let field = table.field();
    let mut per = Vec::new();
    let mut min = u32::MAX;
    for v in enumerate_irreducibles(&field, degree)? {
        let val = valuation(value.num(), &v)?;
        min = min.min(val);
        per.push((v, val));
    }
    Ok(ValuationReport {
        n,
        degree,
        per_irreducible: per,
        min,
    })
}

#[derive(Clone, Debug)]
pub struct GammaStep {
    pub j: u32,
    pub gamma: u64,
    /// Guaranteed (x - lambda)-power exponent in the numerator of BC(gamma).
    pub bound_deg1: u64,
    /// Guaranteed P_2-power exponent.
    pub bound_deg2: u64,
}

/// The index sequence gamma_j = (q-1) q^j (q^(l+2) + q^(l+1) + q^l) + n
/// along which the numerator valuations grow without bound, with the two
/// accompanying divisibility exponents.
pub fn gamma_sequence(cache: &CarlitzCache, n: u64, l: u32, j: u32) -> Result<GammaStep> {
    let q = cache.q();
    let ql = cache.q_pow(l)?;
    if ql <= n {
        return Err(Error::pre(format!("need q^l > n, got q^{l} = {ql} <= {n}")));
    }
    let qj = cache.q_pow(j)?;
    let block = cache
        .q_pow(l + 2)?
        .checked_add(cache.q_pow(l + 1)?)
        .and_then(|v| v.checked_add(ql))
        .ok_or_else(|| Error::Overflow("gamma block overflow".into()))?;
    let gamma = (q - 1)
        .checked_mul(qj)
        .and_then(|v| v.checked_mul(block))
        .and_then(|v| v.checked_add(n))
        .ok_or_else(|| Error::Overflow("gamma overflow".into()))?;
    let bound_deg1 = (q - 1) * qj * (cache.q_pow(l + 1)? + ql) + n - 2;
    let bound_deg2 = (q - 1) * qj * ql + n - 2;
    Ok(GammaStep {
        j,
        gamma,
        bound_deg1,
        bound_deg2,
    })
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub n: u64,
    pub digit_sum: u64,
    pub tuple: Vec<u32>,
    pub conjectured_exponent: i64,
    pub measured: u32,
    pub pass: bool,
}

/// Experimental scan: for every qualifying n in the range, compare the
/// conjectured P_d exponent n - 2 - |mu|_1 (mu the |.|_1 maximizer of
/// length d(q-1)) against the measured valuation.
pub fn conjecture_scan(
    table: &mut BcTable,
    degree: u32,
    n_lo: u64,
    n_hi: u64,
) -> Result<Vec<ScanRow>> {
    let q = table.cache.q();
    let mut rows = Vec::new();
    let mut n = n_lo.max(q - 1);
    if n % (q - 1) != 0 {
        n += (q - 1) - n % (q - 1);
    }
    while n <= n_hi {
        let l = digit_sum(n, q);
        if l >= (degree as u64 + 1) * (q - 1) {
            let mu = max_tuple_norm1(&table.cache, n, degree as u64)?;
            let conjectured = n as i64 - 2 - mu.record.norm1 as i64;
            let measured = measure_valuation(table, n, degree)?.min;
            rows.push(ScanRow {
                n,
                digit_sum: l,
                tuple: mu.record.beta.clone(),
                conjectured_exponent: conjectured,
                measured,
                pass: measured as i64 >= conjectured,
            });
        }
        n += q - 1;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<Field> {
        Field::make(3, 1).unwrap()
    }

    /// Independent oracle: invert the power series e_C(z)/z coefficient by
    /// coefficient and read BC(n) = Pi(n) * coefficient of z^n.
    fn series_oracle(field: &Arc<Field>, up_to: usize) -> Vec<Frac> {
        let cache = CarlitzCache::new(field);
        // a[k] = coefficient of z^k in e_C(z)/z: 1/D_j at k = q^j - 1.
        let mut a = vec![Frac::zero(field); up_to + 1];
        let mut j = 0u32;
        loop {
            let qj = (cache.q() as usize).pow(j);
            if qj - 1 > up_to {
                break;
            }
            a[qj - 1] = Frac::from_poly(cache.d_poly(j).unwrap()).inv().unwrap();
            j += 1;
        }
        let mut r = vec![Frac::zero(field); up_to + 1];
        r[0] = Frac::one(field);
        for k in 1..=up_to {
            let mut s = Frac::zero(field);
            for i in 1..=k {
                if !a[i].is_zero() {
                    s = s.add(&a[i].mul(&r[k - i]).unwrap()).unwrap();
                }
            }
            r[k] = s.neg();
        }
        (0..=up_to)
            .map(|k| {
                r[k]
                    .mul(&Frac::from_poly(cache.factorial(k as u64).unwrap()))
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn recursion_matches_series_inversion() {
        for (p, up_to) in [(3u64, 30usize), (5, 30)] {
            let field = Field::make(p, 1).unwrap();
            let oracle = series_oracle(&field, up_to);
            let mut table = BcTable::new(&field);
            let mut n = 0u64;
            while n <= up_to as u64 {
                assert_eq!(
                    table.value(n).unwrap(),
                    oracle[n as usize],
                    "q = {p}, n = {n}"
                );
                n += p - 1;
            }
        }
    }

    #[test]
    fn first_nontrivial_value() {
        let field = f3();
        let mut table = BcTable::new(&field);
        // BC(2) = -1/D_1 = 2/(x^3 + 2x).
        let expected = Frac::new(
            Poly::from_ints(&field, &[2]),
            Poly::from_ints(&field, &[0, 2, 0, 1]),
        )
        .unwrap();
        assert_eq!(table.value(2).unwrap(), expected);
        assert_eq!(table.value(0).unwrap(), Frac::one(&field));
    }

    #[test]
    fn known_denominator_classes() {
        let field = f3();
        let mut table = BcTable::new(&field);
        assert_eq!(
            von_staudt_check(&mut table, 16).unwrap(),
            DenominatorClass::AllIrreducible { degree: 2 }
        );
        assert_eq!(von_staudt_check(&mut table, 70).unwrap(), DenominatorClass::Unit);
        assert_eq!(von_staudt_check(&mut table, 0).unwrap(), DenominatorClass::Unit);
    }

    #[test]
    fn denominators_classify_through_sixty() {
        let field = f3();
        let mut table = BcTable::new(&field);
        let mut n = 0u64;
        while n <= 60 {
            von_staudt_check(&mut table, n).unwrap();
            n += 2;
        }
    }

    #[test]
    fn degree_one_recurrence() {
        let field = f3();
        let mut table = BcTable::new(&field);
        for lam in 0..3i64 {
            let report =
                verify_bc_recurrence_deg1(&mut table, 2, field.from_int(lam)).unwrap();
            assert!(report.pass, "n = 2, lambda = {lam}: {:?}", report.witness);
        }
        let report = verify_bc_recurrence_deg1(&mut table, 16, field.one()).unwrap();
        assert!(report.pass, "n = 16: {:?}", report.witness);
    }

    #[test]
    fn degree_two_recurrence_small() {
        let field = f3();
        let mut table = BcTable::new(&field);
        let quads = enumerate_irreducibles(&field, 2).unwrap();
        assert_eq!(quads.len(), 3);
        for v in &quads {
            let report = verify_bc_recurrence_deg2(&mut table, 16, v).unwrap();
            assert!(report.pass, "v = {}: {:?}", v.render("x"), report.witness);
        }
    }

    #[test]
    fn norm_values_from_known_tuples() {
        assert_eq!(norms(3, &[2, 2, 3, 5]).unwrap().norm1, 288);
        assert_eq!(norms(3, &[2, 2, 3, 5]).unwrap().norm2.unwrap(), 288);
        assert_eq!(norms(3, &[2, 2, 3, 5]).unwrap().split, Some(2));
        let r = norms(3, &[1, 3, 3, 5]).unwrap();
        assert_eq!(r.norm1, 300);
        assert_eq!(r.split, Some(0));
        assert_eq!(r.norm2.unwrap(), 270);
        assert_eq!(norms(3, &[0, 0, 0, 0]).unwrap().norm1, 4);
        // Not ordered: an even entry after the odd block.
        assert_eq!(norms(3, &[2, 3, 2, 5]).unwrap().split, None);
        assert!(norms(3, &[2, 3, 2, 5]).unwrap().norm2().is_err());
    }

    #[test]
    fn paper_examples_for_maximal_tuples() {
        let cache = CarlitzCache::new(&f3());
        let m304 = max_tuple_norm1(&cache, 304, 2).unwrap();
        assert_eq!(m304.record.beta, vec![1, 3, 3, 5]);
        assert_eq!(m304.record.norm1, 300);
        let m646 = max_tuple_norm1(&cache, 646, 2).unwrap();
        assert_eq!(m646.record.beta, vec![4, 3, 5, 5]);
        let mu304 = max_tuple_norm2(&cache, 304).unwrap();
        assert_eq!(mu304.record.beta, vec![2, 2, 3, 5]);
        assert_eq!(304 - mu304.record.norm2().unwrap(), 16);
        let mu646 = max_tuple_norm2(&cache, 646).unwrap();
        assert_eq!(mu646.record.beta, vec![4, 2, 5, 5]);
        assert_eq!(646 - mu646.record.norm2().unwrap(), 70);
    }

    #[test]
    fn greedy_is_exhaustively_maximal() {
        let cache = CarlitzCache::new(&f3());
        for s in [1u64, 2] {
            let len = (s * 2) as usize;
            let mut n = s * 2;
            while n <= 200 {
                let greedy = max_tuple_norm1(&cache, n, s).unwrap();
                let best = tuples_up_to(3, len, n)
                    .unwrap()
                    .iter()
                    .map(|t| t.iter().map(|&b| 3u64.pow(b)).sum::<u64>())
                    .max()
                    .unwrap();
                assert_eq!(greedy.record.norm1, best, "s = {s}, n = {n}");
                n += 2;
            }
        }
    }

    #[test]
    fn norm2_maximizer_is_exhaustively_maximal() {
        let cache = CarlitzCache::new(&f3());
        let mut n = 4u64;
        while n <= 200 {
            if digit_sum(n, 3) >= 6 {
                let constructed = max_tuple_norm2(&cache, n).unwrap();
                let best = tuples_up_to(3, 4, n)
                    .unwrap()
                    .iter()
                    .filter_map(|t| norms(3, t).unwrap().norm2)
                    .max()
                    .unwrap();
                assert_eq!(
                    constructed.record.norm2().unwrap(),
                    best,
                    "n = {n}, tuple {:?}",
                    constructed.record.beta
                );
                // The norm-2 value never beats the norm-1 maximum.
                let m1 = max_tuple_norm1(&cache, n, 2).unwrap();
                assert!(constructed.record.norm2().unwrap() <= m1.record.norm1);
                // Appendix shape: all entries nonzero under the hypothesis.
                assert!(m1.record.beta.iter().all(|&b| b > 0), "n = {n}");
            }
            n += 2;
        }
    }

    #[test]
    fn bounds_stay_below_measurement() {
        let field = f3();
        let mut table = BcTable::new(&field);
        let bound = divisibility_bound_deg1(&mut table, 16).unwrap();
        let measured = measure_valuation(&mut table, 16, 1).unwrap();
        assert!(bound.exponent <= measured.min as i64);
        // 16 = (1,2,1) in base 3: digit sum 4 >= 2(q-1).
        assert_eq!(bound.basis.degree(), Some(3));
    }

    #[test]
    fn gamma_sequence_values() {
        let cache = CarlitzCache::new(&f3());
        let step = gamma_sequence(&cache, 2, 1, 0).unwrap();
        assert_eq!(step.gamma, 80);
        // gamma_j - n is divisible by q^(j+l).
        for j in 0..4 {
            let s = gamma_sequence(&cache, 2, 1, j).unwrap();
            assert_eq!((s.gamma - 2) % 3u64.pow(j + 1), 0);
        }
        assert!(gamma_sequence(&cache, 80, 1, 0).is_err());
    }

    #[test]
    fn scan_agrees_with_theorem_range() {
        let field = f3();
        let mut table = BcTable::new(&field);
        let rows = conjecture_scan(&mut table, 2, 2, 100).unwrap();
        assert!(!rows.is_empty());
        for row in &rows {
            assert!(row.pass, "n = {}", row.n);
            // Membership of the scanner's tuple.
            assert!(norms(3, &row.tuple).unwrap().norm1 <= row.n);
        }
    }
}
