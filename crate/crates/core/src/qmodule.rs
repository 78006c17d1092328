//! Leading-filtration calculus in `Q = B_*(P_1) ⊗ B_*(P_1) ⊗ B_*(P_1)`.
//!
//! Each quotient `F_s / F_{s+1}` is a GF(2) vector space on the classes
//! `v3^s [i, j, k]` with positive indices. Multiplication by `2^m` sends
//! `[e1, e2, e3]` into `F_m`, and its image there is a sum of shifted
//! triples computed by [`reduce`]. Odd units and signs act trivially on
//! these quotients and are dropped throughout.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::Valuation;
use crate::error::{Error, Result};

/// A basis class `[i, j, k]`, the external product of `z_i`, `z_j`, `z_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[u64; 3]", try_from = "[u64; 3]")]
pub struct BasisTriple {
    i: u64,
    j: u64,
    k: u64,
}

impl BasisTriple {
    pub fn new(i: u64, j: u64, k: u64) -> Result<Self> {
        if i == 0 || j == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!(
                "basis triple [{i},{j},{k}] needs positive entries"
            )));
        }
        Ok(BasisTriple { i, j, k })
    }

    pub fn entries(&self) -> [u64; 3] {
        [self.i, self.j, self.k]
    }

    pub fn entry_sum(&self) -> u64 {
        self.i + self.j + self.k
    }

    pub fn min_entry(&self) -> u64 {
        self.i.min(self.j).min(self.k)
    }

    /// Homological degree `2(i+j+k) - 3`.
    pub fn degree(&self) -> u64 {
        2 * self.entry_sum() - 3
    }

    /// Slot `s` of the result takes slot `sigma[s]` of `self`.
    pub fn permute(&self, sigma: [usize; 3]) -> BasisTriple {
        let e = self.entries();
        BasisTriple {
            i: e[sigma[0]],
            j: e[sigma[1]],
            k: e[sigma[2]],
        }
    }
}

impl From<BasisTriple> for [u64; 3] {
    fn from(t: BasisTriple) -> Self {
        t.entries()
    }
}

impl TryFrom<[u64; 3]> for BasisTriple {
    type Error = Error;

    fn try_from(e: [u64; 3]) -> Result<Self> {
        BasisTriple::new(e[0], e[1], e[2])
    }
}

impl fmt::Display for BasisTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.i, self.j, self.k)
    }
}

/// A GF(2)-combination of basis triples.
pub type Support = BTreeSet<BasisTriple>;

/// The six permutations of `(2^t, 2^{t+1}, 2^{t+2})`.
pub fn perms124(t: u32) -> [[u64; 3]; 6] {
    assert!(t + 2 < 64, "perms124: scale too large");
    let (a, b, c) = (1u64 << t, 1u64 << (t + 1), 1u64 << (t + 2));
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

fn binary_digits(m: u64) -> Vec<u32> {
    (0..64).filter(|t| (m >> t) & 1 == 1).collect()
}

/// The image of `2^m [e]` in `F_m / F_{m+1}`.
///
/// Write `m` as a sum of distinct powers `2^{t_1} + ... + 2^{t_d}`, pick
/// one permutation of `(2^t, 2^{t+1}, 2^{t+2})` per digit, subtract all of
/// them from `e`, and keep the results with positive entries. Results
/// reached an even number of times cancel. `reduce(e, 0) = {e}`.
pub fn reduce(e: BasisTriple, m: u64) -> Support {
    let shifts: Vec<[[u64; 3]; 6]> = binary_digits(m).into_iter().map(perms124).collect();
    // floor[d]: the least any slot loses to digits d.. (each digit takes at
    // least its smallest power from every slot)
    let mut floor = vec![0u64; shifts.len() + 1];
    for d in (0..shifts.len()).rev() {
        floor[d] = floor[d + 1] + shifts[d][0][0];
    }
    let mut hits = Vec::new();
    reduce_into(e.entries(), &shifts, &floor, &mut hits);
    hits.sort_unstable();
    let mut out = Support::new();
    let mut idx = 0;
    while idx < hits.len() {
        let run = hits[idx..].iter().take_while(|&&x| x == hits[idx]).count();
        if run % 2 == 1 {
            let [i, j, k] = hits[idx];
            out.insert(BasisTriple { i, j, k });
        }
        idx += run;
    }
    out
}

fn reduce_into(cur: [u64; 3], shifts: &[[[u64; 3]; 6]], floor: &[u64], hits: &mut Vec<[u64; 3]>) {
    let Some((first, rest)) = shifts.split_first() else {
        hits.push(cur);
        return;
    };
    let keep = floor[1];
    for p in first {
        if cur[0] > p[0] + keep && cur[1] > p[1] + keep && cur[2] > p[2] + keep {
            let next = [cur[0] - p[0], cur[1] - p[1], cur[2] - p[2]];
            reduce_into(next, rest, &floor[1..], hits);
        }
    }
}

/// `2 z_1 = 0` exactly, so an even multiple of a triple with an entry
/// equal to 1 is zero in `Q`.
pub fn kill_exact(e: BasisTriple, coef_valuation: Valuation) -> bool {
    coef_valuation >= Valuation::Finite(1) && e.min_entry() == 1
}

/// Which terms of an obstruction sum are discarded before the leading
/// filtration is read off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VanishingRule {
    /// Only terms removed by [`kill_exact`].
    Exact,
    /// Additionally treat a term whose own leading image [`reduce`] is
    /// empty as zero, and read the sum at the lowest filtration where some
    /// term has a nonzero image.
    #[default]
    LeadingTerm,
}

impl VanishingRule {
    pub fn as_str(self) -> &'static str {
        match self {
            VanishingRule::Exact => "exact",
            VanishingRule::LeadingTerm => "leading-term",
        }
    }
}

impl fmt::Display for VanishingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for VanishingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(VanishingRule::Exact),
            "leading-term" => Ok(VanishingRule::LeadingTerm),
            other => Err(Error::InvalidArgument(format!(
                "unknown vanishing rule '{other}'"
            ))),
        }
    }
}

/// `v3^filtration * (sum of support)` in `F_s / F_{s+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeadingClass {
    pub filtration: u32,
    pub support: Support,
}

impl fmt::Display for LeadingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v3^{} (", self.filtration)?;
        for (idx, t) in self.support.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// Why no nonzero leading class could be established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum InconclusiveReason {
    /// The leading images at this filtration cancel mod 2.
    Cancelled { filtration: u32 },
    /// Every term was discarded by the vanishing rule.
    AllTermsKilled,
    /// The sum had no terms to begin with.
    EmptySum,
}

impl fmt::Display for InconclusiveReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InconclusiveReason::Cancelled { filtration } => {
                write!(f, "leading terms cancel in filtration {filtration}")
            }
            InconclusiveReason::AllTermsKilled => write!(f, "all terms vanish"),
            InconclusiveReason::EmptySum => write!(f, "empty obstruction sum"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeadingImage {
    Class(LeadingClass),
    Inconclusive(InconclusiveReason),
}

impl LeadingImage {
    pub fn class(&self) -> Option<&LeadingClass> {
        match self {
            LeadingImage::Class(c) => Some(c),
            LeadingImage::Inconclusive(_) => None,
        }
    }
}

/// The image of `Σ 2^{v} [e]` in its lowest nonzero filtration quotient.
///
/// Terms with infinite valuation are zero and are skipped. A returned
/// class is never empty.
pub fn leading_image(terms: &[(BasisTriple, Valuation)], rule: VanishingRule) -> LeadingImage {
    let mut levels: BTreeMap<u32, Vec<BasisTriple>> = BTreeMap::new();
    for &(e, v) in terms {
        let Valuation::Finite(v) = v else { continue };
        if kill_exact(e, Valuation::Finite(v)) {
            continue;
        }
        levels.entry(v).or_default().push(e);
    }
    if levels.is_empty() {
        return LeadingImage::Inconclusive(InconclusiveReason::AllTermsKilled);
    }

    for (&m, triples) in &levels {
        let mut support = Support::new();
        let mut any_image = false;
        for &e in triples {
            let image = reduce(e, m as u64);
            any_image |= !image.is_empty();
            for t in image {
                if !support.remove(&t) {
                    support.insert(t);
                }
            }
        }
        if rule == VanishingRule::LeadingTerm && !any_image {
            continue;
        }
        return if support.is_empty() {
            LeadingImage::Inconclusive(InconclusiveReason::Cancelled { filtration: m })
        } else {
            LeadingImage::Class(LeadingClass {
                filtration: m,
                support,
            })
        };
    }
    LeadingImage::Inconclusive(InconclusiveReason::AllTermsKilled)
}
