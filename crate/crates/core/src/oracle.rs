//! Independent checks for decompositions.
//!
//! [`oracle_decompose`] solves the textbook undetermined-coefficients system
//! over exact rationals; it shares nothing with the closed-form engine beyond
//! the number types. [`check_by_substitution`] verifies symbolic results by
//! evaluating both sides at random rational points.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::Rational;
use crate::decompose::{Decomposition, MonomialTerm, PoleTerm, RationalFunctionSpec};
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{roots} roots but {mults} multiplicities")]
    LengthMismatch { roots: usize, mults: usize },
    #[error("roots {0} and {1} coincide")]
    DuplicateRoots(usize, usize),
    #[error("multiplicity of root {0} is zero")]
    ZeroMultiplicity(usize),
    #[error("linear system is singular")]
    Singular,
}

/// Dense univariate polynomial over the rationals; `coeffs[i]` multiplies
/// `x^i`. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DensePolynomial {
    coeffs: Vec<Rational>,
}

impl DensePolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        DensePolynomial { coeffs }
    }

    pub fn zero() -> Self {
        DensePolynomial::default()
    }

    pub fn one() -> Self {
        DensePolynomial::new(vec![Rational::one()])
    }

    /// `x - root`.
    pub fn linear(root: &Rational) -> Self {
        DensePolynomial::new(vec![-root, Rational::one()])
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![Rational::zero(); degree + 1];
        c[degree] = Rational::one();
        DensePolynomial::new(c)
    }

    /// `prod (x - roots[i])^mults[i]`.
    pub fn from_roots(roots: &[Rational], mults: &[u32]) -> Self {
        let mut acc = DensePolynomial::one();
        for (r, &m) in roots.iter().zip(mults) {
            let lin = DensePolynomial::linear(r);
            for _ in 0..m {
                acc = acc.mul(&lin);
            }
        }
        acc
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, rhs: &DensePolynomial) -> DensePolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DensePolynomial::new(
            (0..n)
                .map(|i| self.coefficient(i) + rhs.coefficient(i))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &DensePolynomial) -> DensePolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DensePolynomial::new(
            (0..n)
                .map(|i| self.coefficient(i) - rhs.coefficient(i))
                .collect(),
        )
    }

    pub fn mul(&self, rhs: &DensePolynomial) -> DensePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return DensePolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        DensePolynomial::new(out)
    }

    /// Long division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &DensePolynomial) -> (DensePolynomial, DensePolynomial) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd]
            .recip()
            .expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&nd| nd >= dd) else {
            return (DensePolynomial::zero(), self.clone());
        };
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] * &lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (DensePolynomial::new(quot), DensePolynomial::new(rem))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

/// Solves `a * sol = b` by Gauss-Jordan elimination over the rationals.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Result<Vec<Rational>, OracleError> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(OracleError::Singular)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip().expect("nonzero pivot");
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        b[col] *= &inv;
        let pivot_row = a[col].clone();
        let pivot_rhs = b[col].clone();
        for (r, (row, rhs)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= &f * p;
            }
            *rhs -= &f * &pivot_rhs;
        }
    }
    Ok(b)
}

/// Decomposes `x^l / prod (x - roots[i])^mults[i]`. Long division splits off
/// the polynomial part `x^l = s(x) Q(x) + r(x)`; the pole coefficients then
/// come from equating coefficients in `r = sum c_ij Q / (x - a_i)^j`.
/// Zero coefficients are omitted from the result.
pub fn oracle_decompose(
    l: u32,
    roots: &[Rational],
    mults: &[u32],
) -> Result<Decomposition, OracleError> {
    if roots.len() != mults.len() {
        return Err(OracleError::LengthMismatch {
            roots: roots.len(),
            mults: mults.len(),
        });
    }
    for i in 0..roots.len() {
        if mults[i] == 0 {
            return Err(OracleError::ZeroMultiplicity(i));
        }
        for k in i + 1..roots.len() {
            if roots[i] == roots[k] {
                return Err(OracleError::DuplicateRoots(i, k));
            }
        }
    }
    let m: usize = mults.iter().map(|&v| v as usize).sum();
    let q = DensePolynomial::from_roots(roots, mults);
    let (quotient, remainder) = DensePolynomial::monomial(l as usize).div_rem(&q);

    let mut unknowns = Vec::with_capacity(m);
    let mut columns = Vec::with_capacity(m);
    for (i, r) in roots.iter().enumerate() {
        let lin = DensePolynomial::linear(r);
        let mut basis = q.clone();
        for j in 1..=mults[i] {
            let (quot, rem) = basis.div_rem(&lin);
            debug_assert!(rem.is_zero());
            basis = quot;
            unknowns.push((i, j));
            columns.push(basis.clone());
        }
    }
    let a: Vec<Vec<Rational>> = (0..m)
        .map(|row| columns.iter().map(|c| c.coefficient(row)).collect())
        .collect();
    let b: Vec<Rational> = (0..m).map(|row| remainder.coefficient(row)).collect();
    let sol = solve(a, b)?;

    let mut poles: Vec<PoleTerm> = unknowns
        .into_iter()
        .zip(sol)
        .filter(|(_, c)| !c.is_zero())
        .map(|((pole_index, order), c)| PoleTerm {
            pole_index,
            order,
            coefficient: Expr::Constant(c),
        })
        .collect();
    poles.sort_by_key(|p| (p.pole_index, p.order));
    let monomials = quotient
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(degree, c)| MonomialTerm {
            degree: degree as u32,
            coefficient: Expr::Constant(c.clone()),
        })
        .collect();
    Ok(Decomposition {
        roots: roots.iter().cloned().map(Expr::Constant).collect(),
        monomials,
        poles,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionConfig {
    /// Independent symbol bindings.
    pub trials: usize,
    /// `x` values checked per binding.
    pub points_per_trial: usize,
    pub seed: u64,
}

impl Default for SubstitutionConfig {
    fn default() -> Self {
        SubstitutionConfig {
            trials: 20,
            points_per_trial: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub bindings: BTreeMap<String, Rational>,
    pub x: Rational,
    pub expected: Option<Rational>,
    pub actual: Option<Rational>,
    pub error: Option<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show =
            |v: &Option<Rational>| v.as_ref().map_or("<error>".to_string(), |v| v.to_string());
        write!(f, "x = {}", self.x)?;
        for (k, v) in &self.bindings {
            write!(f, ", {k} = {v}")?;
        }
        write!(
            f,
            ": input = {}, decomposition = {}",
            show(&self.expected),
            show(&self.actual)
        )?;
        if let Some(e) = &self.error {
            write!(f, " ({e})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubstitutionReport {
    pub trials_run: usize,
    pub points_checked: usize,
    /// Trials skipped because no admissible binding was found.
    pub rejected_draws: usize,
    pub counterexample: Option<Counterexample>,
}

impl SubstitutionReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.points_checked > 0
    }
}

impl fmt::Display for SubstitutionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None if self.points_checked > 0 => write!(
                f,
                "PASS: {} points over {} substitutions agree exactly",
                self.points_checked, self.trials_run
            ),
            None => write!(f, "FAIL: no admissible substitution found"),
            Some(c) => write!(f, "FAIL: mismatch at {c}"),
        }
    }
}

const DRAW_MAX: u64 = 1_000_000;
const MAX_ATTEMPTS: usize = 1000;

fn draw(rng: &mut ChaCha8Rng) -> Rational {
    let n = rng.gen_range(1..=DRAW_MAX);
    let d = rng.gen_range(1..=DRAW_MAX);
    Rational::new(n, d).expect("nonzero denominator")
}

/// Compares `spec` and `d` at random rational points: `trials` symbol
/// bindings, one `x` value each.
pub fn check_by_substitution(
    spec: &RationalFunctionSpec,
    d: &Decomposition,
    trials: usize,
    seed: u64,
) -> SubstitutionReport {
    check_by_substitution_with(
        spec,
        d,
        &SubstitutionConfig {
            trials,
            points_per_trial: 1,
            seed,
        },
    )
}

pub fn check_by_substitution_with(
    spec: &RationalFunctionSpec,
    d: &Decomposition,
    cfg: &SubstitutionConfig,
) -> SubstitutionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut symbols = spec.symbols();
    symbols.extend(d.symbols());
    let mut report = SubstitutionReport::default();

    for _ in 0..cfg.trials {
        let Some((bindings, roots)) = admissible_bindings(spec, &symbols, &mut rng) else {
            report.rejected_draws += 1;
            continue;
        };
        report.trials_run += 1;
        let bound = d.bind(&bindings);
        for _ in 0..cfg.points_per_trial {
            let x = loop {
                let x = draw(&mut rng);
                if !roots.contains(&x) {
                    break x;
                }
            };
            report.points_checked += 1;
            let expected = spec.evaluate(&x, &bindings);
            let actual = match &bound {
                Ok(b) => b.evaluate(&x),
                Err(e) => Err(e.clone()),
            };
            let ok = matches!((&expected, &actual), (Ok(a), Ok(b)) if a == b);
            if !ok {
                let error = match (&expected, &actual) {
                    (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
                    _ => None,
                };
                report.counterexample = Some(Counterexample {
                    bindings: bindings.into_iter().collect(),
                    x,
                    expected: expected.ok(),
                    actual: actual.ok(),
                    error,
                });
                return report;
            }
        }
    }
    report
}

fn admissible_bindings(
    spec: &RationalFunctionSpec,
    symbols: &std::collections::BTreeSet<String>,
    rng: &mut ChaCha8Rng,
) -> Option<(HashMap<String, Rational>, Vec<Rational>)> {
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let bindings: HashMap<String, Rational> =
            symbols.iter().map(|s| (s.clone(), draw(rng))).collect();
        let mut roots = Vec::with_capacity(spec.factors().len());
        for f in spec.factors() {
            match f.root.evaluate(&bindings) {
                Ok(v) if !roots.contains(&v) => roots.push(v),
                _ => continue 'attempt,
            }
        }
        return Some((bindings, roots));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::decompose;
    use crate::parse::parse_expr;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    fn pole_values(d: &Decomposition) -> Vec<(usize, u32, Rational)> {
        d.poles
            .iter()
            .map(|p| {
                (
                    p.pole_index,
                    p.order,
                    p.coefficient.as_constant().unwrap().clone(),
                )
            })
            .collect()
    }

    #[test]
    fn cover_up_two_roots() {
        let d = oracle_decompose(0, &[r(1), r(2)], &[1, 1]).unwrap();
        assert_eq!(pole_values(&d), vec![(0, 1, r(-1)), (1, 1, r(1))]);
    }

    #[test]
    fn worked_example() {
        let d = oracle_decompose(0, &[r(-1), r(-2), r(-3)], &[1, 1, 1]).unwrap();
        let half = Rational::new(1, 2).unwrap();
        assert_eq!(
            pole_values(&d),
            vec![(0, 1, half.clone()), (1, 1, r(-1)), (2, 1, half)]
        );
    }

    #[test]
    fn improper_polynomial_part() {
        // x^3/((x-1)(x-2)) = x + 3 - 1/(x-1) + 8/(x-2)
        let d = oracle_decompose(3, &[r(1), r(2)], &[1, 1]).unwrap();
        let mono: Vec<_> = d
            .monomials
            .iter()
            .map(|m| (m.degree, m.coefficient.as_constant().unwrap().clone()))
            .collect();
        assert_eq!(mono, vec![(0, r(3)), (1, r(1))]);
        assert_eq!(pole_values(&d), vec![(0, 1, r(-1)), (1, 1, r(8))]);
    }

    #[test]
    fn x_over_x_squared() {
        let d = oracle_decompose(1, &[r(0)], &[2]).unwrap();
        assert_eq!(pole_values(&d), vec![(0, 1, r(1))]);
    }

    #[test]
    fn oracle_errors() {
        assert_eq!(
            oracle_decompose(0, &[r(1), r(1)], &[1, 1]),
            Err(OracleError::DuplicateRoots(0, 1))
        );
        assert!(oracle_decompose(0, &[r(1)], &[1, 1]).is_err());
    }

    #[test]
    fn poly_mul_div_roundtrip() {
        let a = DensePolynomial::new(vec![r(3), r(-1), Rational::new(2, 7).unwrap()]);
        let b = DensePolynomial::from_roots(&[r(2), r(-5)], &[2, 1]);
        let (q, rem) = a.mul(&b).div_rem(&b);
        assert_eq!(q, a);
        assert!(rem.is_zero());
        let (q, rem) = a.div_rem(&b);
        assert!(q.is_zero());
        assert_eq!(rem, a);
        assert_eq!(b.eval(&r(2)), Rational::zero());
        assert_eq!(a.add(&a).sub(&a), a);
    }

    #[test]
    fn substitution_accepts_correct_result() {
        let roots = ["a", "b", "a + 2*b"].map(|s| parse_expr(s).unwrap());
        let spec = RationalFunctionSpec::new(2, roots.into_iter().zip([2, 1, 1])).unwrap();
        let d = decompose(&spec).unwrap();
        let rep = check_by_substitution(&spec, &d, 20, 7);
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.trials_run, 20);
        let rep = check_by_substitution(&spec, &oracle_free_copy(&d), 5, 7);
        assert!(rep.passed());
    }

    fn oracle_free_copy(d: &Decomposition) -> Decomposition {
        d.clone()
    }

    #[test]
    fn substitution_detects_perturbation() {
        let roots = ["a", "b"].map(|s| parse_expr(s).unwrap());
        let spec = RationalFunctionSpec::new(0, roots.into_iter().zip([1, 2])).unwrap();
        let mut d = decompose(&spec).unwrap();
        let c = d.poles[0].coefficient.clone();
        d.poles[0].coefficient = Expr::add([c, Expr::one()]);
        let rep = check_by_substitution(&spec, &d, 20, 1);
        assert!(!rep.passed());
        let ce = rep.counterexample.unwrap();
        assert_ne!(ce.expected, ce.actual);
        assert!(ce.bindings.contains_key("a"));
    }

    #[test]
    fn oracle_is_self_consistent() {
        let roots = [r(3), Rational::new(-1, 2).unwrap(), r(0)];
        let mults = [2, 1, 3];
        let d = oracle_decompose(4, &roots, &mults).unwrap();
        let spec =
            RationalFunctionSpec::new(4, roots.iter().cloned().map(Expr::Constant).zip(mults))
                .unwrap();
        assert!(check_by_substitution(&spec, &d, 10, 3).passed());
    }
}
