//! Every available bound on `span(P^m × P^n)`, plus the closed-form upper
//! bounds that hold for special 2-exponents of `M` and `N`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::{adams_v, nu, restriction_upper, sw_upper};
use crate::error::{Error, Result};
use crate::obstruction::{best_bound_scan, default_s_max, Certificate};
use crate::qmodule::VanishingRule;

/// `V(m) + V(n)`: vector fields built from those on each factor.
pub fn lower_vv(m: u64, n: u64) -> u64 {
    adams_v(m).value + adams_v(n).value
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseId {
    Bnd1,
    Bnd2,
    Bnd3,
    Bnd4,
    Other1,
    Other2,
    Other3,
    Other4,
    None,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseId::Bnd1 => "bnd1",
            CaseId::Bnd2 => "bnd2",
            CaseId::Bnd3 => "bnd3",
            CaseId::Bnd4 => "bnd4",
            CaseId::Other1 => "other1",
            CaseId::Other2 => "other2",
            CaseId::Other3 => "other3",
            CaseId::Other4 => "other4",
            CaseId::None => "none",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseParams {
    pub r: u32,
    pub t: u32,
    pub e: u32,
    pub k: u64,
    pub case_id: CaseId,
}

/// Closed-form bound for `span(P^{2M-1} × P^{2N-1})` from `r = ν(M)` and
/// `t = ν(N)` alone. With `c = r + t - 2^e - 2e`:
///
/// | c                       | needs     | bound            |
/// |-------------------------|-----------|------------------|
/// | 2                       | t > e     | 14·2^e - 4       |
/// | 3                       | t > e + 1 | 18·2^e - 4       |
/// | 4 + k, k < 2^e - 2      | t > e     | 20·2^e + 8k + 6  |
/// | 4 + k, k ∈ {2^e-2, 2^e-1} | t > e   | 24·2^e + 4k - 2  |
///
/// with `e ≥ 1`, apart from the single case `(r,t,e,k) = (4,1,0,0)`.
pub fn thm_bnd_closed(r: u32, t: u32) -> Option<(u64, CaseParams)> {
    if r < 4 || t < 1 || t > r {
        return None;
    }
    if (r, t) == (4, 1) {
        let params = CaseParams {
            r,
            t,
            e: 0,
            k: 0,
            case_id: CaseId::Bnd4,
        };
        return Some((22, params));
    }
    let sum = (r + t) as u64;
    let mut e = 1u32;
    while (1u64 << e) + 2 * e as u64 + 2 <= sum {
        let p = 1u64 << e;
        let base = p + 2 * e as u64;
        let params = |k: u64, case_id| CaseParams {
            r,
            t,
            e,
            k,
            case_id,
        };
        let te = t > e;
        if sum == base + 2 && te {
            return Some((14 * p - 4, params(0, CaseId::Bnd1)));
        }
        if sum == base + 3 && t > e + 1 {
            return Some((18 * p - 4, params(0, CaseId::Bnd2)));
        }
        if sum >= base + 4 && te {
            let k = sum - base - 4;
            if k + 2 < p {
                return Some((20 * p + 8 * k + 6, params(k, CaseId::Bnd3)));
            }
            if k + 2 == p || k + 1 == p {
                return Some((24 * p + 4 * k - 2, params(k, CaseId::Bnd4)));
            }
        }
        e += 1;
    }
    None
}

/// `N ≡ target (mod modulus)` as far as `info = (residue, known_modulus)`
/// can tell.
fn congruent(info: Option<(u64, u64)>, target: u64, modulus: u64) -> bool {
    match info {
        Some((residue, known)) if known != 0 && known % modulus == 0 => residue % modulus == target,
        _ => false,
    }
}

/// Residue information carrying all of `n`.
pub fn full_residue(n: u64) -> (u64, u64) {
    (n % (1 << 62), 1 << 62)
}

/// Closed-form bounds that need `t` just below the range of
/// [`thm_bnd_closed`], some of them gated on `N` modulo `2^{e+2}`.
/// `n_residue = (a, q)` states `N ≡ a (mod q)`. When several cases apply
/// the smallest bound is returned.
pub fn prop_other_closed(
    r: u32,
    t: u32,
    n_residue: Option<(u64, u64)>,
) -> Option<(u64, CaseParams)> {
    if r < 1 || t < 1 {
        return None;
    }
    let mut best: Option<(u64, CaseParams)> = None;
    let mut offer = |bound: u64, e: u32, case_id: CaseId| {
        if best.is_none_or(|(b, _)| bound < b) {
            best = Some((
                bound,
                CaseParams {
                    r,
                    t,
                    e,
                    k: 0,
                    case_id,
                },
            ));
        }
    };
    let mut e = 1u32;
    while (1u64 << e) + e as u64 + 2 <= r as u64 {
        let p = 1u64 << e;
        let q = p << 2;
        let r_e = (p + e as u64) as u32;
        if r == r_e + 2 {
            if t == e + 1 || (e > 1 && congruent(n_residue, 3 * p, q)) {
                offer(20 * p - 2, e, CaseId::Other1);
            }
            if (t == 1 && e == 1) || congruent(n_residue, p, q) {
                offer(22 * p - 6, e, CaseId::Other2);
            }
        }
        if r == r_e + 3 {
            if congruent(n_residue, 3 * p, q) {
                offer(20 * p + 6, e, CaseId::Other3);
            }
            if t == e {
                offer(38 * p - 6, e, CaseId::Other4);
            }
        }
        e += 1;
    }
    best
}

/// The cases where the lower bound is known to be the span.
pub fn exact_equ(m: u64, n: u64) -> Option<u64> {
    let small = |x: u64| matches!(x, 1 | 3 | 7);
    let low_nu = |x: u64| nu(x + 1) < crate::dyadic::Valuation::Finite(4);
    if (low_nu(m) && low_nu(n)) || small(m) || small(n) {
        Some(lower_vv(m, n))
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BpUpper {
    pub bound: u64,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub m: u64,
    pub n: u64,
    pub lower: u64,
    pub sw_upper: u64,
    pub restriction_upper: u64,
    pub bp_upper: Option<BpUpper>,
    pub exact: Option<u64>,
    /// `(lower, smallest upper)`.
    pub best: (u64, u64),
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "span(P^{} x P^{})", self.m, self.n)?;
        writeln!(f, "  lower        {}", self.lower)?;
        writeln!(f, "  sw upper     {}", self.sw_upper)?;
        writeln!(f, "  restriction  {}", self.restriction_upper)?;
        match &self.bp_upper {
            Some(bp) => writeln!(
                f,
                "  bp upper     {} (s'={}, {})",
                bp.bound,
                bp.certificate.s_prime(),
                bp.certificate.leading()
            )?,
            None => writeln!(f, "  bp upper     -")?,
        }
        match self.exact {
            Some(x) => writeln!(f, "  exact        {x}")?,
            None => writeln!(f, "  exact        -")?,
        }
        write!(
            f,
            "  best         {} <= span <= {}",
            self.best.0, self.best.1
        )
    }
}

/// Collect all bounds for `(m, n)`. The obstruction engine runs only for
/// odd `m, n ≥ 3`, scanning `s'` up to `scan_limit` when given.
pub fn report(m: u64, n: u64, scan_limit: Option<u64>, rule: VanishingRule) -> Result<BoundReport> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "dimensions must be positive (got {m}, {n})"
        )));
    }
    let lower = lower_vv(m, n);
    let sw = sw_upper(m, n);
    let restr = restriction_upper(m, n);

    let bp_upper = if m % 2 == 1 && n % 2 == 1 && m >= 3 && n >= 3 {
        let (big_m, big_n) = (m.div_ceil(2), n.div_ceil(2));
        let mut s_max = default_s_max(big_m, big_n);
        if let Some(limit) = scan_limit {
            s_max = s_max.min(limit);
        }
        if s_max >= 3 {
            best_bound_scan(big_m, big_n, 3, s_max, rule)?.map(|c| BpUpper {
                bound: c.bound(),
                certificate: c,
            })
        } else {
            None
        }
    } else {
        None
    };

    let mut uppers: Vec<(&'static str, u64)> = vec![("sw", sw), ("restriction", restr)];
    if let Some(bp) = &bp_upper {
        uppers.push(("bp", bp.bound));
    }
    for &(source_name, upper) in &uppers {
        if upper < lower {
            return Err(Error::InconsistentBounds {
                m,
                n,
                lower,
                upper,
                source_name,
            });
        }
    }
    let best_upper = uppers
        .iter()
        .map(|u| u.1)
        .min()
        .expect("two uppers always present");

    let exact = exact_equ(m, n);
    if let Some(x) = exact {
        if x != best_upper {
            return Err(Error::InconsistentBounds {
                m,
                n,
                lower: x,
                upper: best_upper,
                source_name: "exact",
            });
        }
    }

    Ok(BoundReport {
        m,
        n,
        lower,
        sw_upper: sw,
        restriction_upper: restr,
        bp_upper,
        exact,
        best: (lower, best_upper),
    })
}
