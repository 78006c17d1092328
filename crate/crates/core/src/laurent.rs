//! Sparse Laurent polynomials and rational functions over GF(2) in three
//! variables `z1, z2, z3`.
//!
//! Coefficients live in GF(2), so a polynomial is just the set of its
//! exponent vectors and addition is symmetric difference. Rational
//! functions are never reduced; two of them are equal when they agree
//! after cross multiplication.
//!
//! The second half of the module derives the series `f0, f1, f2` with
//! `v_i = v3 * f_i`, once by solving the 3x3 system by Cramer's rule and
//! once by iterating the three substitution rules on mixed monomials.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Exponents `(e1, e2, e3)` of `z1^e1 z2^e2 z3^e3`. Ordered
/// lexicographically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(pub [i32; 3]);

impl ExponentVector {
    pub const ZERO: ExponentVector = ExponentVector([0, 0, 0]);

    pub const fn new(e1: i32, e2: i32, e3: i32) -> Self {
        ExponentVector([e1, e2, e3])
    }
}

impl Add for ExponentVector {
    type Output = ExponentVector;

    fn add(self, rhs: ExponentVector) -> ExponentVector {
        let [a, b, c] = self.0;
        let [x, y, z] = rhs.0;
        ExponentVector([a + x, b + y, c + z])
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == ExponentVector::ZERO {
            return write!(f, "1");
        }
        let mut first = true;
        for (idx, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "z{}", idx + 1)?;
            } else {
                write!(f, "z{}^{}", idx + 1, e)?;
            }
        }
        Ok(())
    }
}

/// A Laurent polynomial over GF(2). The empty set is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeSet<ExponentVector>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(ExponentVector::ZERO)
    }

    pub fn monomial(e: ExponentVector) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(e);
        LaurentPoly { terms }
    }

    /// Builds a polynomial from a list of monomials, cancelling repeats in
    /// pairs.
    pub fn from_terms<I: IntoIterator<Item = ExponentVector>>(terms: I) -> Self {
        let mut p = LaurentPoly::zero();
        for e in terms {
            p.toggle(e);
        }
        p
    }

    /// Adds the monomial `z^e`.
    pub fn toggle(&mut self, e: ExponentVector) {
        if !self.terms.remove(&e) {
            self.terms.insert(e);
        }
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

    pub fn contains(&self, e: &ExponentVector) -> bool {
        self.terms.contains(e)
    }

    /// Monomials in increasing lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.iter()
    }

    /// Multiplies by the monomial `z^e`.
    pub fn shift(&self, e: ExponentVector) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|&t| t + e).collect(),
        }
    }

    /// Keeps the monomials accepted by `keep`.
    pub fn filter<F: Fn(&ExponentVector) -> bool>(&self, keep: F) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().copied().filter(|e| keep(e)).collect(),
        }
    }
}

impl FromIterator<ExponentVector> for LaurentPoly {
    fn from_iter<I: IntoIterator<Item = ExponentVector>>(iter: I) -> Self {
        LaurentPoly::from_terms(iter)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .symmetric_difference(&rhs.terms)
                .copied()
                .collect(),
        }
    }
}

// Monomials multiply by adding exponent vectors.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for &a in &self.terms {
            for &b in &rhs.terms {
                out.toggle(a + b);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, e) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// An unreduced quotient of Laurent polynomials with nonzero denominator.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFn {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RationalFn {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn monomial(e: ExponentVector) -> Self {
        Self::from_poly(LaurentPoly::monomial(e))
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn checked_div(&self, rhs: &RationalFn) -> Result<RationalFn> {
        RationalFn::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Add<&RationalFn> for &RationalFn {
    type Output = RationalFn;

    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn {
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            };
        }
        RationalFn {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl Mul<&RationalFn> for &RationalFn {
    type Output = RationalFn;

    fn mul(self, rhs: &RationalFn) -> RationalFn {
        RationalFn {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }
}

/// Cross-multiplied equality `a.num * b.den == b.num * a.den`.
pub fn rational_eq(a: &RationalFn, b: &RationalFn) -> bool {
    &a.num * &b.den == &b.num * &a.den
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        rational_eq(self, other)
    }
}

impl Eq for RationalFn {}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

pub type Matrix3 = [[RationalFn; 3]; 3];

/// Determinant of a 3x3 matrix. In characteristic 2 every sign is `+`.
pub fn det3(m: &Matrix3) -> RationalFn {
    let minor = |a: usize, b: usize, c: usize, d: usize| -> RationalFn {
        &(&m[1][a] * &m[2][b]) + &(&m[1][c] * &m[2][d])
    };
    let t0 = &m[0][0] * &minor(1, 2, 2, 1);
    let t1 = &m[0][1] * &minor(0, 2, 2, 0);
    let t2 = &m[0][2] * &minor(0, 1, 1, 0);
    &(&t0 + &t1) + &t2
}

/// Solves `m x = rhs` by Cramer's rule.
pub fn cramer3(m: &Matrix3, rhs: &[RationalFn; 3]) -> Result<[RationalFn; 3]> {
    let det = det3(m);
    if det.is_zero() {
        return Err(Error::SingularSystem);
    }
    let solve = |col: usize| -> Result<RationalFn> {
        let mut replaced = m.clone();
        for row in 0..3 {
            replaced[row][col] = rhs[row].clone();
        }
        det3(&replaced).checked_div(&det)
    };
    Ok([solve(0)?, solve(1)?, solve(2)?])
}

/// Checks `m x = rhs` row by row under cross-multiplied equality.
pub fn satisfies(m: &Matrix3, rhs: &[RationalFn; 3], x: &[RationalFn; 3]) -> bool {
    (0..3).all(|row| {
        let lhs = (0..3).fold(RationalFn::zero(), |acc, col| {
            &acc + &(&m[row][col] * &x[col])
        });
        rational_eq(&lhs, &rhs[row])
    })
}

fn mono(e1: i32, e2: i32, e3: i32) -> RationalFn {
    RationalFn::monomial(ExponentVector::new(e1, e2, e3))
}

/// The linear system satisfied by `(f0, f1, f2)`:
///
/// ```text
/// f0 = f1 z1^-1 + f2 z1^-3 + z1^-7
/// f1 = f0 z2    + f2 z2^-2 + z2^-6
/// f2 = f0 z3^3  + f1 z3^2  + z3^-4
/// ```
///
/// moved to one side over GF(2).
pub fn f_system() -> (Matrix3, [RationalFn; 3]) {
    let matrix = [
        [mono(0, 0, 0), mono(-1, 0, 0), mono(-3, 0, 0)],
        [mono(0, 1, 0), mono(0, 0, 0), mono(0, -2, 0)],
        [mono(0, 0, 3), mono(0, 0, 2), mono(0, 0, 0)],
    ];
    let rhs = [mono(-7, 0, 0), mono(0, -6, 0), mono(0, 0, -4)];
    (matrix, rhs)
}

/// `(f0, f1, f2)` as rational functions.
pub fn f_series() -> Result<[RationalFn; 3]> {
    let (m, rhs) = f_system();
    cramer3(&m, &rhs)
}

/// The six monomials `z^{-σ(1,2,4)}` over all permutations σ.
pub fn f0_closed_form() -> LaurentPoly {
    const PERMS: [[i32; 3]; 6] = [
        [1, 2, 4],
        [1, 4, 2],
        [2, 1, 4],
        [2, 4, 1],
        [4, 1, 2],
        [4, 2, 1],
    ];
    PERMS
        .iter()
        .map(|p| ExponentVector::new(-p[0], -p[1], -p[2]))
        .collect()
}

/// A monomial `v_k z^e` with `k` in `0..=3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedMonomial {
    pub v: u8,
    pub z: ExponentVector,
}

impl MixedMonomial {
    pub fn new(v: u8, z: ExponentVector) -> Self {
        assert!(v <= 3, "v index must be in 0..=3");
        MixedMonomial { v, z }
    }

    /// `3 e1 + e2 - 2 [v = v0] + [v = v2]`. Each substitution lowers it.
    pub fn measure(&self) -> i64 {
        let [e1, e2, _] = self.z.0;
        3 * e1 as i64 + e2 as i64 - 2 * (self.v == 0) as i64 + (self.v == 2) as i64
    }

    /// One application of the rewrite rule for `v0`, `v1` or `v2`:
    ///
    /// ```text
    /// v0 -> v1 z1^-1 + v2 z1^-3 + v3 z1^-7
    /// v1 -> v0 z2    + v2 z2^-2 + v3 z2^-6
    /// v2 -> v0 z3^3  + v1 z3^2  + v3 z3^-4
    /// ```
    ///
    /// `v3` monomials are terminal and give `None`.
    pub fn substitute(&self) -> Option<[MixedMonomial; 3]> {
        let rule: [(u8, ExponentVector); 3] = match self.v {
            0 => [
                (1, ExponentVector::new(-1, 0, 0)),
                (2, ExponentVector::new(-3, 0, 0)),
                (3, ExponentVector::new(-7, 0, 0)),
            ],
            1 => [
                (0, ExponentVector::new(0, 1, 0)),
                (2, ExponentVector::new(0, -2, 0)),
                (3, ExponentVector::new(0, -6, 0)),
            ],
            2 => [
                (0, ExponentVector::new(0, 0, 3)),
                (1, ExponentVector::new(0, 0, 2)),
                (3, ExponentVector::new(0, 0, -4)),
            ],
            _ => return None,
        };
        Some(rule.map(|(v, shift)| MixedMonomial::new(v, self.z + shift)))
    }
}

impl fmt::Display for MixedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.z == ExponentVector::ZERO {
            write!(f, "v{}", self.v)
        } else {
            write!(f, "v{}*{}", self.v, self.z)
        }
    }
}

/// Measure of the `v3`-pure monomial `v3 z^e`.
pub fn stable_measure(e: &ExponentVector) -> i64 {
    MixedMonomial::new(3, *e).measure()
}

/// Output of [`rewrite_iterative`].
#[derive(Clone, Debug)]
pub struct Rewrite {
    /// The `v3`-coefficient restricted to monomials of measure `>= cutoff`.
    pub stable: LaurentPoly,
    pub cutoff: i64,
    /// Number of single-monomial substitutions performed.
    pub steps: usize,
    /// Largest measure still present in the unprocessed frontier.
    pub frontier_top: Option<i64>,
}

/// Expands `v_target = v3 * f_target` by repeated substitution.
///
/// The frontier is processed one measure level at a time, highest first,
/// with identical monomials cancelling inside a level. A `v3` monomial of
/// measure `μ` can only be produced from a frontier monomial of measure
/// `> μ`, so once every remaining frontier monomial lies below `cutoff`,
/// each `v3` monomial of measure `>= cutoff` has its final coefficient.
pub fn rewrite_iterative(target: u8, cutoff: i64) -> Result<Rewrite> {
    if target > 2 {
        return Err(Error::InvalidArgument(format!(
            "rewrite target must be v0, v1 or v2, got v{target}"
        )));
    }
    let start = MixedMonomial::new(target, ExponentVector::ZERO);
    if cutoff > start.measure() {
        return Err(Error::CutoffTooSmall {
            cutoff,
            start: start.measure(),
        });
    }

    let mut frontier: BTreeMap<i64, BTreeSet<MixedMonomial>> = BTreeMap::new();
    frontier.entry(start.measure()).or_default().insert(start);
    let mut v3_part = LaurentPoly::zero();
    let mut steps = 0usize;

    while let Some((&top, _)) = frontier.last_key_value() {
        if top < cutoff {
            break;
        }
        let level = frontier.remove(&top).unwrap_or_default();
        for mono in level {
            let Some(images) = mono.substitute() else {
                continue;
            };
            steps += 1;
            for image in images {
                debug_assert!(image.measure() < top);
                if image.v == 3 {
                    v3_part.toggle(image.z);
                } else {
                    let bucket = frontier.entry(image.measure()).or_default();
                    if !bucket.remove(&image) {
                        bucket.insert(image);
                    }
                    if bucket.is_empty() {
                        frontier.remove(&image.measure());
                    }
                }
            }
        }
    }

    Ok(Rewrite {
        stable: v3_part.filter(|e| stable_measure(e) >= cutoff),
        cutoff,
        steps,
        frontier_top: frontier.last_key_value().map(|(&k, _)| k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(e1: i32, e2: i32, e3: i32) -> ExponentVector {
        ExponentVector::new(e1, e2, e3)
    }

    fn p(terms: &[(i32, i32, i32)]) -> LaurentPoly {
        terms.iter().map(|&(a, b, c)| ev(a, b, c)).collect()
    }

    #[test]
    fn addition_examples() {
        let x = p(&[(1, 0, 0)]);
        let y = p(&[(0, 1, 0)]);
        assert!((&x + &x).is_zero());
        assert_eq!(&x + &LaurentPoly::zero(), x);
        assert_eq!(&x + &y, p(&[(1, 0, 0), (0, 1, 0)]));
    }

    #[test]
    fn multiplication_examples() {
        let q = p(&[(1, -2, 0), (0, 0, 5)]);
        assert!((&q * &LaurentPoly::zero()).is_zero());
        assert_eq!(&q * &LaurentPoly::one(), q);
        let xy = p(&[(1, 0, 0), (0, 1, 0)]);
        assert_eq!(&xy * &xy, p(&[(2, 0, 0), (0, 2, 0)]));
    }

    #[test]
    fn rational_eq_examples() {
        let a = RationalFn::from_poly(p(&[(1, 2, 3), (0, -1, 0)]));
        assert!(rational_eq(&a, &a.clone()));
        let num = p(&[(1, 0, 0), (0, 0, 1)]);
        let den = p(&[(0, 0, 0), (0, 1, -1)]);
        let q = p(&[(2, 0, 0), (0, -3, 0), (1, 1, 1)]);
        let scaled = RationalFn::new(&num * &q, &den * &q).unwrap();
        let plain = RationalFn::new(num, den).unwrap();
        assert!(rational_eq(&scaled, &plain));
        assert!(!rational_eq(&plain, &RationalFn::one()));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(
            RationalFn::new(LaurentPoly::one(), LaurentPoly::zero()),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn cramer_identity() {
        let one = RationalFn::one;
        let zero = RationalFn::zero;
        let m = [
            [one(), zero(), zero()],
            [zero(), one(), zero()],
            [zero(), zero(), one()],
        ];
        let v = [
            mono(1, 0, 0),
            mono(0, -2, 1),
            RationalFn::from_poly(p(&[(0, 0, 0), (3, 3, 3)])),
        ];
        let x = cramer3(&m, &v).unwrap();
        for i in 0..3 {
            assert_eq!(x[i], v[i]);
        }
    }

    #[test]
    fn cramer_singular() {
        let row = [mono(1, 0, 0), mono(0, 1, 0), mono(0, 0, 1)];
        let m = [
            row.clone(),
            row.clone(),
            [mono(0, 0, 0), mono(1, 1, 1), mono(2, 0, 0)],
        ];
        let rhs = [RationalFn::one(), RationalFn::one(), RationalFn::one()];
        assert!(matches!(cramer3(&m, &rhs), Err(Error::SingularSystem)));
    }

    #[test]
    fn f_series_solves_system_and_matches_closed_form() {
        let (m, rhs) = f_system();
        let f = f_series().unwrap();
        assert!(satisfies(&m, &rhs, &f));
        assert_eq!(f[0], RationalFn::from_poly(f0_closed_form()));
    }

    #[test]
    fn f_series_row_permutation_invariant() {
        let (m, rhs) = f_system();
        let order = [2usize, 0, 1];
        let pm = order.map(|r| m[r].clone());
        let prhs = order.map(|r| rhs[r].clone());
        let a = cramer3(&m, &rhs).unwrap();
        let b = cramer3(&pm, &prhs).unwrap();
        for i in 0..3 {
            assert_eq!(a[i], b[i]);
        }
    }

    #[test]
    fn first_substitution_of_v0() {
        let images = MixedMonomial::new(0, ExponentVector::ZERO)
            .substitute()
            .unwrap();
        assert_eq!(
            images,
            [
                MixedMonomial::new(1, ev(-1, 0, 0)),
                MixedMonomial::new(2, ev(-3, 0, 0)),
                MixedMonomial::new(3, ev(-7, 0, 0)),
            ]
        );
        assert!(MixedMonomial::new(3, ev(1, 1, 1)).substitute().is_none());
    }

    #[test]
    fn rewriter_recovers_f0() {
        let f0 = f0_closed_form();
        for cutoff in [-10, -20, -40] {
            let rw = rewrite_iterative(0, cutoff).unwrap();
            assert!(rw.frontier_top.is_none_or(|t| t < cutoff));
            let expected = f0.filter(|e| stable_measure(e) >= cutoff);
            assert_eq!(rw.stable, expected, "cutoff {cutoff}");
        }
    }

    #[test]
    fn rewriter_rejects_bad_arguments() {
        assert!(matches!(
            rewrite_iterative(0, 5),
            Err(Error::CutoffTooSmall { .. })
        ));
        assert!(matches!(
            rewrite_iterative(3, -5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[(-1, 0, 2)]).to_string(), "z1^-1*z3^2");
        assert_eq!(LaurentPoly::one().to_string(), "1");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(MixedMonomial::new(3, ev(0, -6, 0)).to_string(), "v3*z2^-6");
    }
}
