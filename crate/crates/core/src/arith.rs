//! Exact arithmetic: arbitrary-precision rationals and the combinatorial
//! coefficients (binomials, multinomials, weak compositions) used by the
//! closed-form decomposition.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("multinomial parts sum to {actual}, expected {expected}")]
    PartsSumMismatch { expected: u64, actual: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid rational literal `{0}`")]
    InvalidLiteral(String),
}

/// An exact fraction of arbitrary-precision integers, always fully reduced
/// with a positive denominator. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Builds `numer/denom`, reducing to lowest terms.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ArithError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Integer power. Negative exponents of zero are a division by zero.
    pub fn pow(&self, exp: i64) -> Result<Self, ArithError> {
        if exp < 0 && self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let e = exp.unsigned_abs();
        let n = num_traits::pow::Pow::pow(self.numer(), e);
        let d = num_traits::pow::Pow::pow(self.denom(), e);
        // numerator and denominator stay coprime under powers
        let r = if exp < 0 {
            BigRational::new(d, n)
        } else {
            BigRational::new_raw(n, d)
        };
        Ok(Rational(r))
    }

    /// The integer value, when this is an integer fitting in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    /// Bit length of the larger of numerator and denominator.
    pub fn bits(&self) -> u64 {
        self.numer().bits().max(self.denom().bits())
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = ArithError;

    /// Accepts `p` or `p/q` with optional leading sign.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::InvalidLiteral(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            None => BigInt::from_str(t)
                .map(Rational::from_integer)
                .map_err(|_| bad()),
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                Rational::new(n, d)
            }
        }
    }
}

macro_rules! impl_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(v: $t) -> Self {
                Rational::from_integer(BigInt::from(v))
            }
        }
    )*};
}
impl_from_int!(i32, i64, u32, u64, usize);

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_integer(v)
    }
}

macro_rules! impl_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl $atr<Rational> for Rational {
            fn $am(&mut self, rhs: Rational) {
                self.0.$am(rhs.0)
            }
        }
        impl<'a> $atr<&'a Rational> for Rational {
            fn $am(&mut self, rhs: &'a Rational) {
                self.0.$am(&rhs.0)
            }
        }
    };
}
impl_binop!(Add, add, AddAssign, add_assign);
impl_binop!(Sub, sub, SubAssign, sub_assign);
impl_binop!(Mul, mul, MulAssign, mul_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

/// `n choose k`, zero whenever `k` lies outside `[0, n]`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    // acc stays an exact binomial after each division
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    BigInt::from(acc)
}

/// `m! / (parts[0]! * parts[1]! * ...)`. The parts must sum to `m`.
pub fn multinomial(m: u64, parts: &[u64]) -> Result<BigInt, ArithError> {
    let actual = parts
        .iter()
        .try_fold(0u64, |acc, &p| acc.checked_add(p))
        .unwrap_or(u64::MAX);
    if actual != m {
        return Err(ArithError::PartsSumMismatch {
            expected: m,
            actual,
        });
    }
    // product of successive binomials: C(p0, p0) C(p0+p1, p1) ...
    let mut acc = BigInt::one();
    let mut running = 0u64;
    for &p in parts {
        running += p;
        acc *= binomial(running, p as i64);
    }
    Ok(acc)
}

/// A weak composition: non-negative parts with a fixed sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(pub Vec<usize>);

impl Composition {
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Lexicographic enumeration of all `k`-part weak compositions of `m`.
///
/// Iterating yields owned [`Composition`]s; [`Compositions::advance`] lends
/// the current tuple without allocating.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Compositions {
    /// Panics if `k == 0`.
    pub fn new(m: usize, k: usize) -> Self {
        assert!(k >= 1, "compositions need at least one part");
        let mut current = vec![0; k];
        current[k - 1] = m;
        Compositions {
            current,
            started: false,
            done: false,
        }
    }

    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let k = self.current.len();
        if k == 1 {
            self.done = true;
            return None;
        }
        let last = self.current[k - 1];
        if last > 0 {
            self.current[k - 2] += 1;
            self.current[k - 1] = last - 1;
            return Some(&self.current);
        }
        // last part is zero: carry from the rightmost nonzero part
        match self.current[..k - 1].iter().rposition(|&p| p > 0) {
            Some(j) if j > 0 => {
                let tail = self.current[j];
                self.current[j] = 0;
                self.current[j - 1] += 1;
                self.current[k - 1] = tail - 1;
                Some(&self.current)
            }
            _ => {
                self.done = true;
                None
            }
        }
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        self.advance().map(|c| Composition(c.to_vec()))
    }
}

pub fn compositions(m: usize, k: usize) -> Compositions {
    Compositions::new(m, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal_row(n: usize) -> Vec<BigInt> {
        let mut row = vec![BigInt::one()];
        for _ in 0..n {
            let mut next = vec![BigInt::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        row
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(4, 7), BigInt::zero());
        assert_eq!(binomial(4, -1), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
        // frozen from the Pascal-triangle oracle
        assert_eq!(pascal_row(40)[20], BigInt::from(137_846_528_820u64));
        assert_eq!(binomial(40, 20), BigInt::from(137_846_528_820u64));
    }

    #[test]
    fn binomial_matches_pascal_triangle() {
        for n in 0..=60usize {
            let row = pascal_row(n);
            for (k, v) in row.iter().enumerate() {
                assert_eq!(&binomial(n as u64, k as i64), v, "C({n},{k})");
            }
        }
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(0, &[0, 0, 0]).unwrap(), BigInt::one());
        assert_eq!(multinomial(2, &[1, 1]).unwrap(), BigInt::from(2));
        assert_eq!(multinomial(4, &[2, 1, 1]).unwrap(), BigInt::from(12));
        assert_eq!(
            multinomial(3, &[1, 1]),
            Err(ArithError::PartsSumMismatch {
                expected: 3,
                actual: 2
            })
        );
    }

    #[test]
    fn multinomial_counts_multiset_permutations() {
        // distinct orderings of {a,a,b,c}
        let items = ['a', 'a', 'b', 'c'];
        let mut seen = std::collections::HashSet::new();
        for p0 in 0..4 {
            for p1 in 0..4 {
                for p2 in 0..4 {
                    for p3 in 0..4 {
                        let idx = [p0, p1, p2, p3];
                        let mut sorted = idx;
                        sorted.sort();
                        if sorted == [0, 1, 2, 3] {
                            seen.insert(idx.map(|i| items[i]));
                        }
                    }
                }
            }
        }
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn composition_examples() {
        let all: Vec<_> = compositions(0, 3).map(|c| c.0).collect();
        assert_eq!(all, vec![vec![0, 0, 0]]);

        let all: Vec<_> = compositions(2, 3).map(|c| c.0).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0],
            ]
        );

        assert_eq!(compositions(5, 8).count(), 792);
        assert_eq!(binomial(12, 7), BigInt::from(792));
        assert_eq!(
            compositions(4, 1).map(|c| c.0).collect::<Vec<_>>(),
            vec![vec![4]]
        );
    }

    #[test]
    fn compositions_are_sorted_and_exhaustive() {
        for m in 0..=5 {
            for k in 1..=5 {
                let got: Vec<_> = compositions(m, k).map(|c| c.0).collect();
                let mut brute = Vec::new();
                let mut idx = vec![0usize; k];
                loop {
                    if idx.iter().sum::<usize>() == m {
                        brute.push(idx.clone());
                    }
                    let mut pos = k;
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] <= m {
                            break;
                        }
                        idx[pos] = 0;
                        if pos == 0 {
                            pos = usize::MAX;
                            break;
                        }
                    }
                    if pos == usize::MAX {
                        break;
                    }
                }
                assert_eq!(got, brute, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn rational_normalizes() {
        let r = Rational::new(6, -4).unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(Rational::new(0, -7).unwrap(), Rational::zero());
        assert_eq!(Rational::new(0, -7).unwrap().denom(), &BigInt::one());
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn rational_pow_and_parse() {
        let r: Rational = "-2/3".parse().unwrap();
        assert_eq!(r.pow(3).unwrap(), "-8/27".parse().unwrap());
        assert_eq!(r.pow(-2).unwrap(), "9/4".parse().unwrap());
        assert_eq!(r.pow(0).unwrap(), Rational::one());
        assert_eq!(Rational::zero().pow(-1), Err(ArithError::DivisionByZero));
        assert_eq!(Rational::zero().pow(0).unwrap(), Rational::one());
        assert_eq!(r.to_string(), "-2/3");
        assert_eq!(Rational::from(5).to_string(), "5");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }
}
