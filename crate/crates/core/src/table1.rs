//! Bounds for `span(P^m × P^111)` with `m = 2^e - 1` or `3·2^e - 1`,
//! `5 ≤ e ≤ 17`: published reference values and their recomputation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::lower_vv;
use crate::dyadic::sw_upper;
use crate::error::{Error, Result};
use crate::obstruction::{best_bound_scan, default_s_max, Certificate};
use crate::qmodule::VanishingRule;

pub const N_DIM: u64 = 111;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Table1Row {
    pub e: u32,
    pub lower: u64,
    pub our_upper: u64,
    pub sw_upper: u64,
    /// Published for the `2^e - 1` family only.
    pub suzuki_upper: Option<u64>,
}

const fn row(e: u32, lower: u64, our_upper: u64, sw_upper: u64, suzuki: u64) -> Table1Row {
    Table1Row {
        e,
        lower,
        our_upper,
        sw_upper,
        suzuki_upper: Some(suzuki),
    }
}

/// The published table. Suzuki's K-theory column is reference data only.
pub const REFERENCE: [Table1Row; 13] = [
    row(5, 17, 32, 46, 130),
    row(6, 19, 46, 78, 148),
    row(7, 23, 50, 142, 182),
    row(8, 24, 52, 270, 246),
    row(9, 25, 78, 526, 374),
    row(10, 27, 86, 1038, 630),
    row(11, 31, 94, 2062, 1146),
    row(12, 32, 102, 4110, 2170),
    row(13, 33, 106, 8206, 4218),
    row(14, 35, 158, 16398, 8316),
    row(15, 39, 166, 32782, 16510),
    row(16, 40, 174, 65550, 32894),
    row(17, 41, 182, 131086, 65662),
];

pub fn reference(e: u32) -> Option<&'static Table1Row> {
    REFERENCE.iter().find(|r| r.e == e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `m = 2^e - 1`
    #[serde(rename = "1")]
    PowerOfTwo,
    /// `m = 3·2^e - 1`
    #[serde(rename = "3")]
    ThreeTimes,
}

impl Family {
    pub fn from_multiplier(u: u64) -> Result<Self> {
        match u {
            1 => Ok(Family::PowerOfTwo),
            3 => Ok(Family::ThreeTimes),
            other => Err(Error::InvalidArgument(format!(
                "family must be 1 or 3 (got {other})"
            ))),
        }
    }

    pub fn multiplier(self) -> u64 {
        match self {
            Family::PowerOfTwo => 1,
            Family::ThreeTimes => 3,
        }
    }

    pub fn m(self, e: u32) -> u64 {
        (self.multiplier() << e) - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComputedRow {
    pub e: u32,
    pub family: Family,
    pub m: u64,
    pub lower: u64,
    pub our_upper: Option<u64>,
    pub sw_upper: u64,
    pub certificate: Option<Certificate>,
}

impl ComputedRow {
    /// Columns that differ from the published row, as `(name, computed, published)`.
    pub fn mismatches(&self) -> Vec<(&'static str, Option<u64>, u64)> {
        let Some(r) = reference(self.e) else {
            return vec![];
        };
        let mut out = Vec::new();
        if self.lower != r.lower {
            out.push(("lower", Some(self.lower), r.lower));
        }
        if self.our_upper != Some(r.our_upper) {
            out.push(("our", self.our_upper, r.our_upper));
        }
        if self.sw_upper != r.sw_upper {
            out.push(("sw", Some(self.sw_upper), r.sw_upper));
        }
        out
    }
}

impl fmt::Display for ComputedRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let our = self.our_upper.map_or("-".to_string(), |b| b.to_string());
        let suzuki = match (self.family, reference(self.e).and_then(|r| r.suzuki_upper)) {
            (Family::PowerOfTwo, Some(s)) => s.to_string(),
            _ => "-".to_string(),
        };
        write!(
            f,
            "{:>3} {:>8} {:>8} {:>10} {:>10}",
            self.e, self.lower, our, self.sw_upper, suzuki
        )
    }
}

pub const HEADER: &str = "  e    lower      our         sw     suzuki";

/// Recompute one row. The engine scan uses `N = 56`, since `2N - 1 = 111`.
pub fn compute_row(e: u32, family: Family, rule: VanishingRule) -> Result<ComputedRow> {
    if !(1..=40).contains(&e) {
        return Err(Error::InvalidArgument(format!("e out of range: {e}")));
    }
    let m = family.m(e);
    let (big_m, big_n) = (m.div_ceil(2), N_DIM.div_ceil(2));
    let certificate = best_bound_scan(big_m, big_n, 3, default_s_max(big_m, big_n), rule)?;
    Ok(ComputedRow {
        e,
        family,
        m,
        lower: lower_vv(m, N_DIM),
        our_upper: certificate.as_ref().map(Certificate::bound),
        sw_upper: sw_upper(m, N_DIM),
        certificate,
    })
}

pub fn compute_table(family: Family, rule: VanishingRule) -> Result<Vec<ComputedRow>> {
    REFERENCE
        .iter()
        .map(|r| compute_row(r.e, family, rule))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rows_are_complete() {
        let es: Vec<u32> = REFERENCE.iter().map(|r| r.e).collect();
        assert_eq!(es, (5..=17).collect::<Vec<_>>());
        assert_eq!(reference(12).unwrap().our_upper, 102);
    }

    #[test]
    fn classical_columns_match() {
        for family in [Family::PowerOfTwo, Family::ThreeTimes] {
            for r in &REFERENCE {
                let m = family.m(r.e);
                assert_eq!(lower_vv(m, N_DIM), r.lower, "e={}", r.e);
                assert_eq!(sw_upper(m, N_DIM), r.sw_upper, "e={}", r.e);
            }
        }
    }

    #[test]
    fn first_row_engine() {
        let row = compute_row(5, Family::PowerOfTwo, VanishingRule::default()).unwrap();
        assert!(row.mismatches().is_empty(), "{:?}", row.mismatches());
    }
}
