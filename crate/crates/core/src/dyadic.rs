//! Exact 2-adic arithmetic on machine words.
//!
//! Everything here is a pure function of its arguments. Inputs are `u64`;
//! callers in this crate stay below 2^40, and the few places where an
//! intermediate could overflow (`n + 1`, `2^ν`) use checked arithmetic and
//! panic with a message rather than wrap.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// A 2-adic valuation. `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Valuation of a product.
impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of 2 in `n`; `nu(0)` is `Infinite`.
pub fn nu(n: u64) -> Valuation {
    if n == 0 {
        Valuation::Infinite
    } else {
        Valuation::Finite(n.trailing_zeros())
    }
}

/// Exponent of 2 in a signed integer, `nu_signed(0)` is `Infinite`.
pub fn nu_signed(n: i64) -> Valuation {
    nu(n.unsigned_abs())
}

/// `ν(n)` for `n` known to be nonzero.
pub(crate) fn nu_nonzero(n: u64) -> u32 {
    debug_assert!(n != 0);
    n.trailing_zeros()
}

/// Valuation of the binomial coefficient `C(n, k)`.
///
/// Kummer: the exponent of 2 in `C(n, k)` is the number of carries when
/// `k` and `n - k` are added in base 2. The carry count is computed by
/// running the addition bit by bit. `k > n` gives `Infinite` because the
/// coefficient is zero.
pub fn nu_binom(n: u64, k: u64) -> Valuation {
    if k > n {
        return Valuation::Infinite;
    }
    let (mut a, mut b) = (k, n - k);
    let mut carry = 0u64;
    let mut carries = 0u32;
    while a != 0 || b != 0 || carry != 0 {
        let s = (a & 1) + (b & 1) + carry;
        carry = s >> 1;
        carries += carry as u32;
        a >>= 1;
        b >>= 1;
    }
    Valuation::Finite(carries)
}

/// Legendre's form of the same count: `s(k) + s(n-k) - s(n)` with `s` the
/// binary digit sum. Kept as a second route for cross-checking.
pub fn nu_binom_legendre(n: u64, k: u64) -> Valuation {
    if k > n {
        return Valuation::Infinite;
    }
    Valuation::Finite(k.count_ones() + (n - k).count_ones() - n.count_ones())
}

/// The Adams vector-field number of the `n`-sphere together with its
/// decomposition `ν(n+1) = 4a + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdamsNumber {
    pub n: u64,
    pub a: u32,
    pub b: u32,
    pub value: u64,
}

/// `V(n) = 8a + 2^b - 1` where `ν(n+1) = 4a + b`, `0 ≤ b ≤ 3`.
pub fn adams_v(n: u64) -> AdamsNumber {
    let succ = n.checked_add(1).expect("adams_v: n + 1 overflows u64");
    let v = nu_nonzero(succ);
    let (a, b) = (v / 4, v % 4);
    AdamsNumber {
        n,
        a,
        b,
        value: 8 * a as u64 + (1u64 << b) - 1,
    }
}

fn pow2(e: u32) -> u64 {
    1u64.checked_shl(e).expect("power of two overflows u64")
}

/// Stiefel-Whitney bound `2^{ν(m+1)} + 2^{ν(n+1)} - 2`.
pub fn sw_upper(m: u64, n: u64) -> u64 {
    assert!(m >= 1 && n >= 1, "sw_upper: dimensions must be positive");
    let vm = nu_nonzero(m.checked_add(1).expect("sw_upper: overflow"));
    let vn = nu_nonzero(n.checked_add(1).expect("sw_upper: overflow"));
    pow2(vm) + pow2(vn) - 2
}

/// Stable span of `P^n`: `V(n)` for odd `n`, zero for even `n`.
pub fn sspan_pn(n: u64) -> u64 {
    assert!(n >= 1, "sspan_pn: dimension must be positive");
    if n % 2 == 1 {
        adams_v(n).value
    } else {
        0
    }
}

/// Restriction bound `span(P^m × P^n) ≤ m + sspan(P^n)`, applied in both
/// factor orders.
pub fn restriction_upper(m: u64, n: u64) -> u64 {
    assert!(
        m >= 1 && n >= 1,
        "restriction_upper: dimensions must be positive"
    );
    (m + sspan_pn(n)).min(n + sspan_pn(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom_u128(n: u64, k: u64) -> u128 {
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row.get(k as usize).copied().unwrap_or(0)
    }

    fn nu_u128(mut x: u128) -> Valuation {
        if x == 0 {
            return Valuation::Infinite;
        }
        let mut v = 0;
        while x.is_multiple_of(2) {
            x /= 2;
            v += 1;
        }
        Valuation::Finite(v)
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu(112), Valuation::Finite(4));
        assert_eq!(nu(1), Valuation::Finite(0));
        assert_eq!(nu(96), Valuation::Finite(5));
        assert_eq!(nu(0), Valuation::Infinite);
        assert_eq!(nu_signed(-96), Valuation::Finite(5));
    }

    #[test]
    fn nu_binom_examples() {
        // C(8,4) = 70 = 2 * 35, C(32,16) = 601080390 = 2 * 300540195
        assert_eq!(binom_u128(8, 4), 70);
        assert_eq!(binom_u128(32, 16), 601_080_390);
        assert_eq!(nu_binom(8, 4), Valuation::Finite(1));
        assert_eq!(nu_binom(32, 16), Valuation::Finite(1));
        for n in 0..20 {
            assert_eq!(nu_binom(n, 0), Valuation::Finite(0));
        }
        assert_eq!(nu_binom(3, 4), Valuation::Infinite);
    }

    #[test]
    fn kummer_matches_exact_binomials_up_to_64() {
        for n in 0..=64u64 {
            for k in 0..=n {
                let exact = nu_u128(binom_u128(n, k));
                assert_eq!(nu_binom(n, k), exact, "C({n},{k})");
                assert_eq!(nu_binom_legendre(n, k), exact, "C({n},{k})");
            }
        }
    }

    #[test]
    fn valuation_rule_for_multiples_of_powers_of_two() {
        for u in [1u64, 3, 5] {
            for r in 0..=10u32 {
                let n = u << r;
                for i in 1..=(1u64 << (r + 2)) {
                    let Valuation::Finite(got) = nu_binom(n, i) else {
                        continue;
                    };
                    let lower = r as i64 - i.trailing_zeros() as i64;
                    assert!(got as i64 >= lower, "u={u} r={r} i={i}");
                    if i <= 1u64 << r {
                        assert_eq!(got as i64, lower, "u={u} r={r} i={i}");
                    }
                }
            }
        }
    }

    #[test]
    fn adams_examples() {
        assert_eq!(adams_v(111).value, 8);
        assert_eq!((adams_v(111).a, adams_v(111).b), (1, 0));
        assert_eq!(adams_v(1).value, 1);
        assert_eq!(adams_v(31).value, 9);
        assert_eq!(adams_v(0).value, 0);
        assert_eq!(adams_v(31).value + adams_v(111).value, 17);
        for n in (0..200).step_by(2) {
            assert_eq!(adams_v(n).value, 0);
        }
    }

    #[test]
    fn adams_small_valuations() {
        for n in 0..5000u64 {
            let v = nu_nonzero(n + 1);
            if v <= 3 {
                assert_eq!(adams_v(n).value, (1 << v) - 1);
            }
            let a = adams_v(n);
            assert_eq!(4 * a.a + a.b, v);
            assert!(a.b <= 3);
        }
    }

    #[test]
    fn sw_examples() {
        assert_eq!(sw_upper(31, 111), 46);
        assert_eq!(sw_upper(63, 111), 78);
        assert_eq!(sw_upper(2, 2), 0);
    }

    #[test]
    fn sw_dominates_lower_bound() {
        for m in 1..=(1u64 << 12) {
            for n in [1u64, 2, 3, 7, 15, 31, 111, 255, 1023, 4095, m] {
                assert!(sw_upper(m, n) >= adams_v(m).value + adams_v(n).value);
            }
        }
    }

    #[test]
    fn sspan_and_restriction_examples() {
        assert_eq!(sspan_pn(15), 8);
        assert_eq!(sspan_pn(6), 0);
        assert_eq!(sspan_pn(7), 7);
        assert_eq!(restriction_upper(7, 15), 15);
        assert_eq!(restriction_upper(1, 111), 9);
        assert_eq!(restriction_upper(2, 2), 2);
    }

    #[test]
    fn valuation_order_and_sum() {
        assert!(Valuation::Finite(100) < Valuation::Infinite);
        assert_eq!(
            Valuation::Finite(2) + Valuation::Finite(3),
            Valuation::Finite(5)
        );
        assert_eq!(
            Valuation::Finite(2) + Valuation::Infinite,
            Valuation::Infinite
        );
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn valuation_of_product_is_sum(a in 1u64..(1 << 30), b in 1u64..(1 << 30)) {
                prop_assert_eq!(nu(a * b), nu(a) + nu(b));
            }

            #[test]
            fn kummer_and_legendre_agree(n in 0u64..(1 << 40), k in 0u64..(1 << 40)) {
                prop_assert_eq!(nu_binom(n, k), nu_binom_legendre(n, k));
            }
        }
    }
}
