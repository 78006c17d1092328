//! Obstruction sums and span-bound certificates.
//!
//! If `P^{2M-1} × P^{2N-1}` had more than `2s' - 4` independent vector
//! fields, the Euler-class identity
//!
//! ```text
//! Σ ± C(M,i) C(N,j) [i, j, s'-i-j] = 0   in Q
//! ```
//!
//! would hold. Finding a nonzero leading class for the left side therefore
//! certifies `span ≤ 2s' - 4`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::{adams_v, nu_binom, sw_upper, Valuation};
use crate::error::{Error, Result};
use crate::qmodule::{
    leading_image, BasisTriple, InconclusiveReason, LeadingClass, LeadingImage, VanishingRule,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub triple: BasisTriple,
    pub valuation: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionSum {
    pub m: u64,
    pub n: u64,
    pub s_prime: u64,
    pub terms: Vec<Term>,
}

impl ObstructionSum {
    pub fn min_valuation(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.valuation).min()
    }

    fn as_pairs(&self) -> Vec<(BasisTriple, Valuation)> {
        self.terms
            .iter()
            .map(|t| (t.triple, Valuation::Finite(t.valuation)))
            .collect()
    }
}

fn check_args(m: u64, n: u64, s_prime: u64) -> Result<()> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need M, N >= 2 (got M={m}, N={n})"
        )));
    }
    if s_prime < 3 {
        return Err(Error::InvalidArgument(format!(
            "need s' >= 3 (got {s_prime})"
        )));
    }
    if m > 1 << 40 || n > 1 << 40 || s_prime > 1 << 20 {
        return Err(Error::InvalidArgument(format!(
            "arguments out of range (M={m}, N={n}, s'={s_prime})"
        )));
    }
    Ok(())
}

/// All terms `C(M,i) C(N,j) [i, j, s'-i-j]` with nonzero binomials, for
/// `1 ≤ i ≤ M`, `1 ≤ j ≤ N` and a positive third index.
pub fn build_sum(m: u64, n: u64, s_prime: u64) -> Result<ObstructionSum> {
    check_args(m, n, s_prime)?;
    let mut terms = Vec::new();
    for i in 1..=m.min(s_prime - 2) {
        let Valuation::Finite(vi) = nu_binom(m, i) else {
            continue;
        };
        for j in 1..=n.min(s_prime - 1 - i) {
            let Valuation::Finite(vj) = nu_binom(n, j) else {
                continue;
            };
            let triple = BasisTriple::new(i, j, s_prime - i - j)?;
            terms.push(Term {
                triple,
                valuation: vi + vj,
            });
        }
    }
    if terms.is_empty() {
        return Err(Error::EmptySum { m, n, s_prime });
    }
    Ok(ObstructionSum {
        m,
        n,
        s_prime,
        terms,
    })
}

/// `V(2M-1) + V(2N-1)`, the vector-field lower bound no certificate may undercut.
pub fn lower_bound_odd(m: u64, n: u64) -> u64 {
    adams_v(2 * m - 1).value + adams_v(2 * n - 1).value
}

/// A proof that `span(P^{2M-1} × P^{2N-1}) ≤ bound`.
///
/// Certificates built here are sound by construction. A deserialized one
/// is only a claim until [`verify`] replays it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "M")]
    m: u64,
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "sPrime")]
    s_prime: u64,
    bound: u64,
    #[serde(flatten)]
    leading: LeadingClass,
    #[serde(default)]
    rule: VanishingRule,
}

impl Certificate {
    pub fn new(
        m: u64,
        n: u64,
        s_prime: u64,
        leading: LeadingClass,
        rule: VanishingRule,
    ) -> Result<Self> {
        check_args(m, n, s_prime)?;
        if leading.support.is_empty() {
            return Err(Error::InvalidArgument(
                "certificate with empty support".into(),
            ));
        }
        let bound = 2 * s_prime - 4;
        let lower = lower_bound_odd(m, n);
        if bound < lower {
            return Err(Error::UnsoundCertificate { m, n, bound, lower });
        }
        Ok(Certificate {
            m,
            n,
            s_prime,
            bound,
            leading,
            rule,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn s_prime(&self) -> u64 {
        self.s_prime
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn leading(&self) -> &LeadingClass {
        &self.leading
    }

    pub fn rule(&self) -> VanishingRule {
        self.rule
    }

    /// The dimensions `(2M-1, 2N-1)` the bound applies to.
    pub fn dimensions(&self) -> (u64, u64) {
        (2 * self.m - 1, 2 * self.n - 1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.dimensions();
        write!(
            f,
            "span(P^{a} x P^{b}) <= {} [M={}, N={}, s'={}, {}, rule {}]",
            self.bound, self.m, self.n, self.s_prime, self.leading, self.rule
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifyOutcome {
    Certified(Certificate),
    Inconclusive(InconclusiveReason),
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::Inconclusive(_) => None,
        }
    }

    pub fn into_certificate(self) -> Option<Certificate> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::Inconclusive(_) => None,
        }
    }
}

pub fn certify(m: u64, n: u64, s_prime: u64) -> Result<CertifyOutcome> {
    certify_with_rule(m, n, s_prime, VanishingRule::default())
}

pub fn certify_with_rule(
    m: u64,
    n: u64,
    s_prime: u64,
    rule: VanishingRule,
) -> Result<CertifyOutcome> {
    let sum = match build_sum(m, n, s_prime) {
        Ok(sum) => sum,
        Err(Error::EmptySum { .. }) => {
            return Ok(CertifyOutcome::Inconclusive(InconclusiveReason::EmptySum))
        }
        Err(e) => return Err(e),
    };
    match leading_image(&sum.as_pairs(), rule) {
        LeadingImage::Class(class) => Ok(CertifyOutcome::Certified(Certificate::new(
            m, n, s_prime, class, rule,
        )?)),
        LeadingImage::Inconclusive(reason) => Ok(CertifyOutcome::Inconclusive(reason)),
    }
}

/// Past this `s'` the Stiefel-Whitney bound is already at least as good.
pub fn default_s_max(m: u64, n: u64) -> u64 {
    sw_upper(2 * m - 1, 2 * n - 1) / 2 + 2
}

/// Every `s'` in `s_min..=s_max` with its outcome.
pub fn scan_all(
    m: u64,
    n: u64,
    s_min: u64,
    s_max: u64,
    rule: VanishingRule,
) -> Result<Vec<(u64, CertifyOutcome)>> {
    check_scan_range(s_min, s_max)?;
    (s_min..=s_max)
        .map(|s| certify_with_rule(m, n, s, rule).map(|o| (s, o)))
        .collect()
}

/// The smallest certified bound with `s'` in `s_min..=s_max`.
///
/// The bound `2s' - 4` grows with `s'`, so the first success is the
/// minimum and the scan stops there.
pub fn best_bound_scan(
    m: u64,
    n: u64,
    s_min: u64,
    s_max: u64,
    rule: VanishingRule,
) -> Result<Option<Certificate>> {
    check_scan_range(s_min, s_max)?;
    for s in s_min..=s_max {
        if let CertifyOutcome::Certified(c) = certify_with_rule(m, n, s, rule)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn check_scan_range(s_min: u64, s_max: u64) -> Result<()> {
    if s_min < 3 || s_min > s_max {
        return Err(Error::InvalidArgument(format!(
            "scan range needs 3 <= sMin <= sMax (got {s_min}..{s_max})"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Match,
    Mismatch(String),
}

impl Verification {
    pub fn is_match(&self) -> bool {
        matches!(self, Verification::Match)
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verification::Match => write!(f, "MATCH"),
            Verification::Mismatch(why) => write!(f, "MISMATCH: {why}"),
        }
    }
}

/// Recompute the certificate from `(M, N, s', rule)` and compare every field.
pub fn verify(cert: &Certificate) -> Verification {
    if cert.bound != 2 * cert.s_prime.saturating_sub(2) {
        return Verification::Mismatch(format!(
            "bound {} is not 2s'-4 for s'={}",
            cert.bound, cert.s_prime
        ));
    }
    match certify_with_rule(cert.m, cert.n, cert.s_prime, cert.rule) {
        Err(e) => Verification::Mismatch(e.to_string()),
        Ok(CertifyOutcome::Inconclusive(reason)) => {
            Verification::Mismatch(format!("recomputation is inconclusive: {reason}"))
        }
        Ok(CertifyOutcome::Certified(fresh)) if fresh == *cert => Verification::Match,
        Ok(CertifyOutcome::Certified(fresh)) => Verification::Mismatch(format!(
            "recomputed {} but document says {}",
            fresh.leading, cert.leading
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodule::Support;

    fn t(i: u64, j: u64, k: u64) -> BasisTriple {
        BasisTriple::new(i, j, k).unwrap()
    }

    fn valuation_of(sum: &ObstructionSum, e: BasisTriple) -> Option<u32> {
        sum.terms
            .iter()
            .find(|x| x.triple == e)
            .map(|x| x.valuation)
    }

    #[test]
    fn worked_example_terms() {
        let sum = build_sum(32, 8, 25).unwrap();
        assert_eq!(valuation_of(&sum, t(16, 8, 1)), Some(1));
        assert_eq!(valuation_of(&sum, t(16, 4, 5)), Some(2));
        assert_eq!(valuation_of(&sum, t(8, 8, 9)), Some(2));
        assert_eq!(sum.min_valuation(), Some(1));
        for x in &sum.terms {
            let [i, j, k] = x.triple.entries();
            assert_eq!(i + j + k, 25);
            assert!(i <= 32 && j <= 8);
        }
    }

    #[test]
    fn smallest_sum_has_one_term() {
        for (m, n) in [(2, 2), (7, 12), (64, 3)] {
            let sum = build_sum(m, n, 3).unwrap();
            let expected = nu_binom(m, 1) + nu_binom(n, 1);
            assert_eq!(sum.terms.len(), 1);
            assert_eq!(sum.terms[0].triple, t(1, 1, 1));
            assert_eq!(Valuation::Finite(sum.terms[0].valuation), expected);
        }
    }

    #[test]
    fn unique_minimal_term_for_16_2_13() {
        // Exact binomials, independent of the carry count.
        fn binom(n: u64, k: u64) -> u128 {
            (0..k).fold(1u128, |acc, x| acc * (n - x) as u128 / (x + 1) as u128)
        }
        let mut all = Vec::new();
        for i in 1..=16u64 {
            for j in 1..=2u64 {
                if i + j < 13 {
                    let c = binom(16, i) * binom(2, j);
                    all.push(((i, j, 13 - i - j), c.trailing_zeros()));
                }
            }
        }
        let min = all.iter().map(|x| x.1).min().unwrap();
        let minimal: Vec<_> = all.iter().filter(|x| x.1 == min).collect();
        assert_eq!(minimal, vec![&((8, 2, 3), 1)]);

        let sum = build_sum(16, 2, 13).unwrap();
        assert_eq!(sum.terms.len(), all.len());
        assert_eq!(sum.min_valuation(), Some(1));
        assert_eq!(valuation_of(&sum, t(8, 2, 3)), Some(1));
    }

    #[test]
    fn bad_arguments() {
        assert!(build_sum(1, 8, 25).is_err());
        assert!(build_sum(32, 8, 2).is_err());
        assert!(best_bound_scan(32, 8, 10, 9, VanishingRule::default()).is_err());
    }

    #[test]
    fn worked_example_certificate() {
        let c = certify(32, 8, 25).unwrap().into_certificate().unwrap();
        assert_eq!(c.bound(), 46);
        assert_eq!(c.dimensions(), (63, 15));
        assert_eq!(c.leading().filtration, 2);
        let expected: Support = [t(8, 2, 1), t(6, 4, 1), t(4, 6, 1)].into_iter().collect();
        assert_eq!(c.leading().support, expected);
        // The exact rule agrees here: nothing at filtration 2 has an empty image.
        let exact = certify_with_rule(32, 8, 25, VanishingRule::Exact).unwrap();
        assert_eq!(exact.certificate().unwrap().leading(), c.leading());
    }

    #[test]
    fn certificate_for_16_2_13() {
        let c = certify(16, 2, 13).unwrap().into_certificate().unwrap();
        assert_eq!(c.bound(), 22);
        assert_eq!(c.leading().filtration, 1);
        assert_eq!(c.leading().support, [t(4, 1, 1)].into_iter().collect());
    }

    #[test]
    fn certify_is_deterministic() {
        for s in 3..40 {
            assert_eq!(certify(32, 8, s).unwrap(), certify(32, 8, s).unwrap());
        }
    }

    #[test]
    fn scan_finds_worked_example() {
        let c = best_bound_scan(32, 8, 3, 30, VanishingRule::default())
            .unwrap()
            .unwrap();
        assert!(c.bound() <= 46);
        assert!(verify(&c).is_match());
        let all = scan_all(32, 8, 3, 30, VanishingRule::default()).unwrap();
        let first = all.iter().find_map(|(_, o)| o.certificate()).unwrap();
        assert_eq!(first, &c);
    }

    #[test]
    fn scan_with_nothing_to_find() {
        // Below the vector-field lower bound nothing can certify.
        let lower = lower_bound_odd(32, 8);
        let top = (lower + 4) / 2 - 1;
        assert_eq!(
            best_bound_scan(32, 8, 3, top, VanishingRule::default()).unwrap(),
            None
        );
    }

    #[test]
    fn certificate_json_shape() {
        let c = certify(32, 8, 25).unwrap().into_certificate().unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(v["M"], 32);
        assert_eq!(v["N"], 8);
        assert_eq!(v["sPrime"], 25);
        assert_eq!(v["bound"], 46);
        assert_eq!(v["filtration"], 2);
        assert_eq!(
            v["support"],
            serde_json::json!([[4, 6, 1], [6, 4, 1], [8, 2, 1]])
        );
        assert_eq!(v["rule"], "leading-term");
        assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);

        let bare = r#"{"M":32,"N":8,"sPrime":25,"bound":46,"filtration":2,
                       "support":[[4,6,1],[6,4,1],[8,2,1]]}"#;
        assert!(verify(&Certificate::from_json(bare).unwrap()).is_match());
    }

    #[test]
    fn tampering_is_detected() {
        let c = certify(32, 8, 25).unwrap().into_certificate().unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        v["support"] = serde_json::json!([[8, 2, 1], [6, 4, 1]]);
        let bad: Certificate = serde_json::from_value(v.clone()).unwrap();
        assert!(!verify(&bad).is_match());
        v["support"] = serde_json::json!([[4, 6, 1], [6, 4, 1], [8, 2, 1]]);
        v["sPrime"] = serde_json::json!(26);
        let bad: Certificate = serde_json::from_value(v).unwrap();
        assert!(!verify(&bad).is_match());
    }
}
