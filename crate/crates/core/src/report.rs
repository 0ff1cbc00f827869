//! Verification reports: the uniform result type returned by every
//! identity checker, exact or finite-precision, plus JSON output.

use crate::algebra::Frac;
use crate::mvpoly::MultiPoly;
use crate::Result;
use serde::Serialize;
use std::time::Instant;

/// First point of disagreement between two sides of an identity.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// Exponent vector of the earliest differing monomial (graded-lex).
    pub monomial: Vec<u64>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: serde_json::Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// For finite-precision comparisons: the two sides agree at least to
    /// this power of 1/x (in scaled units where |x| = q).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_precision_exponent: Option<i64>,
    /// A priori tail bound exponent for the truncation used, when one is
    /// part of the statement being checked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound_exponent: Option<i64>,
    pub millis: u64,
}

impl IdentityReport {
    pub fn passing(identity: &str, params: serde_json::Value, started: Instant) -> IdentityReport {
        IdentityReport {
            identity: identity.into(),
            params,
            pass: true,
            witness: None,
            certified_precision_exponent: None,
            tail_bound_exponent: None,
            millis: started.elapsed().as_millis() as u64,
        }
    }

    pub fn failing(
        identity: &str,
        params: serde_json::Value,
        started: Instant,
        witness: Witness,
    ) -> IdentityReport {
        IdentityReport {
            identity: identity.into(),
            params,
            pass: false,
            witness: Some(witness),
            certified_precision_exponent: None,
            tail_bound_exponent: None,
            millis: started.elapsed().as_millis() as u64,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialization cannot fail")
    }
}

/// Exact comparison of two elements of K (or an extension of it); a
/// failure carries both rendered values.
pub fn compare_frac(
    identity: &str,
    params: serde_json::Value,
    lhs: &Frac,
    rhs: &Frac,
    started: Instant,
) -> IdentityReport {
    if lhs == rhs {
        IdentityReport::passing(identity, params, started)
    } else {
        let witness = Witness {
            monomial: vec![],
            lhs: lhs.render("x"),
            rhs: rhs.render("x"),
        };
        IdentityReport::failing(identity, params, started, witness)
    }
}

/// Exact comparison of two multivariate polynomials over K; a failure
/// reports the graded-lex-first differing monomial with both coefficients.
pub fn compare_exact(
    identity: &str,
    params: serde_json::Value,
    lhs: &MultiPoly<Frac>,
    rhs: &MultiPoly<Frac>,
    started: Instant,
) -> Result<IdentityReport> {
    let diff = lhs.sub(rhs)?;
    let first = diff.terms().next().map(|(m, _)| m.clone());
    match first {
        None => Ok(IdentityReport::passing(identity, params, started)),
        Some(mono) => {
            let witness = Witness {
                monomial: mono.0.iter().map(|&e| e as u64).collect(),
                lhs: lhs.coeff(&mono).render("x"),
                rhs: rhs.coeff(&mono).render("x"),
            };
            Ok(IdentityReport::failing(identity, params, started, witness))
        }
    }
}
