//! Partial fraction decomposition of `x^l / prod_k (x - a_k)^(m_k)`.
//!
//! Proper inputs (`l < m`, `m = sum m_k`) are decomposed with a
//! differentiation-free closed form: for each root `a_i` the residue
//! derivatives are expanded by the multinomial Leibniz rule, so every
//! weak composition `(j_-1, j_0, j_k for k != i)` of `m_i - 1` contributes
//!
//! ```text
//! C(l, j_-1) a_i^(l - j_-1) / (x - a_i)^(j_0 + 1)
//!     * prod_{k != i} C(m_k + j_k - 1, j_k) (-1)^j_k (a_i - a_k)^-(m_k + j_k)
//! ```
//!
//! Improper inputs are split as `x^(l-m+1) * x^(m-1)/Q`; the proper factor
//! is decomposed as above and each resulting `c x^p / (x - a)^q` is divided
//! symbolically (see [`poly_div`]).

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{binomial, compositions, Rational};
use crate::expr::{EvalError, Evaluator, Expr};

/// The decomposition variable. Roots and weights may not mention it.
pub const VARIABLE: &str = "x";

/// Factor counts at or above this decompose roots in parallel.
const PARALLEL_THRESHOLD: usize = 8;

/// Field indices are 0-based; messages count from 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("at least one denominator factor is required")]
    NoFactors,
    #[error("factor {} has multiplicity 0", index + 1)]
    ZeroMultiplicity { index: usize },
    #[error("roots {} and {} coincide: `{root}`", first + 1, second + 1)]
    DuplicateRoots {
        first: usize,
        second: usize,
        root: Expr,
    },
    #[error("root {} (`{root}`) contains the decomposition variable `{VARIABLE}`", index + 1)]
    RootContainsVariable { index: usize, root: Expr },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("numerator degree {numerator} is not below denominator degree {denominator}")]
    NotProper { numerator: u32, denominator: u64 },
    #[error("weight {} (`{weight}`) contains the decomposition variable `{VARIABLE}`", index + 1)]
    WeightContainsVariable { index: usize, weight: Expr },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub root: Expr,
    pub multiplicity: u32,
}

/// `x^l / prod_k (x - a_k)^(m_k)` with pairwise distinct roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunctionSpec {
    numerator_degree: u32,
    factors: Vec<Factor>,
}

impl RationalFunctionSpec {
    /// Roots are canonicalized; two roots that agree after expansion are
    /// rejected.
    pub fn new(
        numerator_degree: u32,
        factors: impl IntoIterator<Item = (Expr, u32)>,
    ) -> Result<Self, SpecError> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(root, multiplicity)| Factor {
                root: root.canonicalize(),
                multiplicity,
            })
            .collect();
        if factors.is_empty() {
            return Err(SpecError::NoFactors);
        }
        let mut seen: HashMap<Expr, usize> = HashMap::with_capacity(factors.len());
        for (index, f) in factors.iter().enumerate() {
            if f.multiplicity == 0 {
                return Err(SpecError::ZeroMultiplicity { index });
            }
            if f.root.contains_symbol(VARIABLE) {
                return Err(SpecError::RootContainsVariable {
                    index,
                    root: f.root.clone(),
                });
            }
            let key = f.root.expand();
            if let Some(&first) = seen.get(&key) {
                return Err(SpecError::DuplicateRoots {
                    first,
                    second: index,
                    root: f.root.clone(),
                });
            }
            seen.insert(key, index);
        }
        Ok(RationalFunctionSpec {
            numerator_degree,
            factors,
        })
    }

    pub fn numerator_degree(&self) -> u32 {
        self.numerator_degree
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn roots(&self) -> Vec<Expr> {
        self.factors.iter().map(|f| f.root.clone()).collect()
    }

    /// `m`, the total degree of the denominator.
    pub fn denominator_degree(&self) -> u64 {
        self.factors.iter().map(|f| f.multiplicity as u64).sum()
    }

    pub fn is_proper(&self) -> bool {
        (self.numerator_degree as u64) < self.denominator_degree()
    }

    /// Same denominator, different numerator degree.
    pub fn with_numerator_degree(&self, numerator_degree: u32) -> Self {
        RationalFunctionSpec {
            numerator_degree,
            factors: self.factors.clone(),
        }
    }

    /// Exact value of `x^l / Q(x)` under `bindings`.
    pub fn evaluate(
        &self,
        x: &Rational,
        bindings: &HashMap<String, Rational>,
    ) -> Result<Rational, EvalError> {
        let mut acc = x.pow(self.numerator_degree as i64)?;
        for f in &self.factors {
            let d = x - &f.root.evaluate(bindings)?;
            acc *= d.pow(-(f.multiplicity as i64))?;
        }
        Ok(acc)
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        for f in &self.factors {
            f.root.collect_symbols(&mut out);
        }
        out
    }
}

/// `coefficient * x^degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialTerm {
    pub degree: u32,
    pub coefficient: Expr,
}

/// `coefficient / (x - roots[pole_index])^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleTerm {
    pub pole_index: usize,
    pub order: u32,
    pub coefficient: Expr,
}

/// A sum of monomials and pole terms over a fixed list of roots.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub roots: Vec<Expr>,
    /// Ascending degree.
    pub monomials: Vec<MonomialTerm>,
    /// Ascending `(pole_index, order)`.
    pub poles: Vec<PoleTerm>,
}

/// One output term, borrowed from a [`Decomposition`].
#[derive(Debug, Clone, Copy)]
pub enum Term<'a> {
    Monomial(&'a MonomialTerm),
    Pole { root: &'a Expr, term: &'a PoleTerm },
}

impl Decomposition {
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty() && self.poles.is_empty()
    }

    pub fn len(&self) -> usize {
        self.monomials.len() + self.poles.len()
    }

    /// Terms in output order: monomials, then poles.
    pub fn terms(&self) -> impl Iterator<Item = Term<'_>> + '_ {
        self.monomials
            .iter()
            .map(Term::Monomial)
            .chain(self.poles.iter().map(move |p| Term::Pole {
                root: &self.roots[p.pole_index],
                term: p,
            }))
    }

    pub fn pole(&self, pole_index: usize, order: u32) -> Option<&Expr> {
        self.poles
            .iter()
            .find(|p| p.pole_index == pole_index && p.order == order)
            .map(|p| &p.coefficient)
    }

    pub fn monomial(&self, degree: u32) -> Option<&Expr> {
        self.monomials
            .iter()
            .find(|m| m.degree == degree)
            .map(|m| &m.coefficient)
    }

    /// Exact value of the sum of terms at `x`.
    pub fn evaluate(
        &self,
        x: &Rational,
        bindings: &HashMap<String, Rational>,
    ) -> Result<Rational, EvalError> {
        self.bind(bindings)?.evaluate(x)
    }

    /// Evaluates every root and coefficient under `bindings`, leaving a
    /// numeric function of `x`.
    pub fn bind(
        &self,
        bindings: &HashMap<String, Rational>,
    ) -> Result<BoundDecomposition, EvalError> {
        let mut ev = Evaluator::new(bindings);
        let roots = self
            .roots
            .iter()
            .map(|r| ev.eval(r))
            .collect::<Result<_, _>>()?;
        let monomials = self
            .monomials
            .iter()
            .map(|m| Ok((m.degree, ev.eval(&m.coefficient)?)))
            .collect::<Result<_, EvalError>>()?;
        let poles = self
            .poles
            .iter()
            .map(|p| Ok((p.pole_index, p.order, ev.eval(&p.coefficient)?)))
            .collect::<Result<_, EvalError>>()?;
        Ok(BoundDecomposition {
            roots,
            monomials,
            poles,
        })
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        for r in &self.roots {
            r.collect_symbols(&mut out);
        }
        for m in &self.monomials {
            m.coefficient.collect_symbols(&mut out);
        }
        for p in &self.poles {
            p.coefficient.collect_symbols(&mut out);
        }
        out
    }

    /// Multiplies every coefficient by `weight`.
    pub fn scaled(&self, weight: &Expr) -> Decomposition {
        let mut d = self.clone();
        for m in &mut d.monomials {
            m.coefficient = Expr::mul([weight.clone(), m.coefficient.clone()]);
        }
        for p in &mut d.poles {
            p.coefficient = Expr::mul([weight.clone(), p.coefficient.clone()]);
        }
        d.collect()
    }

    /// Merges terms with equal degree or equal `(root, order)`, sums their
    /// coefficients and drops those that cancel to zero. Duplicate roots are
    /// folded onto their first occurrence.
    pub fn collect(&self) -> Decomposition {
        let mut roots: Vec<Expr> = Vec::with_capacity(self.roots.len());
        let mut root_slot: HashMap<&Expr, usize> = HashMap::new();
        let mut remap = Vec::with_capacity(self.roots.len());
        for r in &self.roots {
            let slot = *root_slot.entry(r).or_insert_with(|| {
                roots.push(r.clone());
                roots.len() - 1
            });
            remap.push(slot);
        }
        let mut monos: BTreeMap<u32, Vec<Expr>> = BTreeMap::new();
        for m in &self.monomials {
            monos
                .entry(m.degree)
                .or_default()
                .push(m.coefficient.clone());
        }
        let mut poles: BTreeMap<(usize, u32), Vec<Expr>> = BTreeMap::new();
        for p in &self.poles {
            poles
                .entry((remap[p.pole_index], p.order))
                .or_default()
                .push(p.coefficient.clone());
        }
        let monomials = monos
            .into_iter()
            .map(|(degree, cs)| MonomialTerm {
                degree,
                coefficient: sum_collected(cs),
            })
            .filter(|m| !m.coefficient.is_zero())
            .collect();
        let poles = poles
            .into_iter()
            .map(|((pole_index, order), cs)| PoleTerm {
                pole_index,
                order,
                coefficient: sum_collected(cs),
            })
            .filter(|p| !p.coefficient.is_zero())
            .collect();
        Decomposition {
            roots,
            monomials,
            poles,
        }
    }
}

fn sum_collected(mut cs: Vec<Expr>) -> Expr {
    if cs.len() == 1 {
        cs.pop().unwrap()
    } else {
        Expr::add(cs)
    }
}

/// A [`Decomposition`] with all symbols substituted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundDecomposition {
    pub roots: Vec<Rational>,
    /// `(degree, coefficient)`
    pub monomials: Vec<(u32, Rational)>,
    /// `(pole_index, order, coefficient)`
    pub poles: Vec<(usize, u32, Rational)>,
}

impl BoundDecomposition {
    pub fn evaluate(&self, x: &Rational) -> Result<Rational, EvalError> {
        let mut acc = Rational::zero();
        for (d, c) in &self.monomials {
            acc += c * &x.pow(*d as i64)?;
        }
        let shifted: Vec<Rational> = self.roots.iter().map(|r| x - r).collect();
        for (i, j, c) in &self.poles {
            acc += c * &shifted[*i].pow(-(*j as i64))?;
        }
        Ok(acc)
    }
}

/// Per-root enumeration counts from a proper decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecomposeStats {
    /// Compositions that produced a candidate term, per factor.
    pub candidates_per_factor: Vec<u64>,
}

/// Decomposes a proper rational function (`l < m`).
pub fn decompose_proper(spec: &RationalFunctionSpec) -> Result<Decomposition, DecomposeError> {
    decompose_proper_with_stats(spec).map(|(d, _)| d)
}

pub fn decompose_proper_with_stats(
    spec: &RationalFunctionSpec,
) -> Result<(Decomposition, DecomposeStats), DecomposeError> {
    if !spec.is_proper() {
        return Err(DecomposeError::NotProper {
            numerator: spec.numerator_degree,
            denominator: spec.denominator_degree(),
        });
    }
    let n = spec.factors.len();
    let per_root: Vec<(Vec<PoleTerm>, u64)> = if n >= PARALLEL_THRESHOLD {
        (0..n)
            .into_par_iter()
            .map(|i| residues_at(spec, i))
            .collect()
    } else {
        (0..n).map(|i| residues_at(spec, i)).collect()
    };
    let mut poles = Vec::new();
    let mut stats = DecomposeStats::default();
    for (terms, count) in per_root {
        poles.extend(terms);
        stats.candidates_per_factor.push(count);
    }
    Ok((
        Decomposition {
            roots: spec.roots(),
            monomials: Vec::new(),
            poles,
        },
        stats,
    ))
}

/// All pole coefficients `c_{i,1..m_i}` at root `i`, plus the number of
/// compositions that contributed.
fn residues_at(spec: &RationalFunctionSpec, i: usize) -> (Vec<PoleTerm>, u64) {
    let l = spec.numerator_degree as i64;
    let fi = &spec.factors[i];
    let mi = fi.multiplicity as usize;
    let ai = &fi.root;
    let others: Vec<&Factor> = spec
        .factors
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i)
        .map(|(_, f)| f)
        .collect();

    // tables indexed by the composition part value, 0..mi
    let top = mi.min(l as usize + 1);
    let numer_binoms: Vec<BigInt> = (0..top).map(|j| binomial(l as u64, j as i64)).collect();
    let numer_powers: Vec<Expr> = (0..top)
        .map(|j| Expr::pow(ai.clone(), l - j as i64))
        .collect();
    let mut other_binoms: Vec<Vec<BigInt>> = Vec::with_capacity(others.len());
    let mut other_powers: Vec<Vec<Expr>> = Vec::with_capacity(others.len());
    for f in &others {
        let mk = f.multiplicity as u64;
        let diff = ai.clone() - f.root.clone();
        let mut bs = Vec::with_capacity(mi);
        let mut ps = Vec::with_capacity(mi);
        for j in 0..mi {
            let b = binomial(mk + j as u64 - 1, j as i64);
            bs.push(if j % 2 == 1 { -b } else { b });
            ps.push(Expr::pow(diff.clone(), -((mk + j as u64) as i64)));
        }
        other_binoms.push(bs);
        other_powers.push(ps);
    }

    let mut by_order: Vec<Vec<Expr>> = vec![Vec::new(); mi];
    let mut count = 0u64;
    let mut comps = compositions(mi - 1, others.len() + 2);
    while let Some(parts) = comps.advance() {
        let j_numer = parts[0];
        // lexicographic order: once the numerator part exceeds l it stays so
        if j_numer as i64 > l {
            break;
        }
        count += 1;
        let j_pole = parts[1];
        let mut c = numer_binoms[j_numer].clone();
        let mut factors = Vec::with_capacity(others.len() + 2);
        factors.push(numer_powers[j_numer].clone());
        for (k, &jk) in parts[2..].iter().enumerate() {
            c *= &other_binoms[k][jk];
            factors.push(other_powers[k][jk].clone());
        }
        factors.push(Expr::Constant(Rational::from_integer(c)));
        by_order[j_pole].push(Expr::mul(factors));
    }

    let terms = by_order
        .into_iter()
        .enumerate()
        .filter_map(|(j, cs)| {
            let coefficient = sum_collected(cs);
            if coefficient.is_zero() {
                None
            } else {
                Some(PoleTerm {
                    pole_index: i,
                    order: j as u32 + 1,
                    coefficient,
                })
            }
        })
        .collect();
    (terms, count)
}

/// Result of dividing `coefficient * x^p` by `(x - root)^q`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyDivFragment {
    /// Quotient terms, ascending degree.
    pub monomials: Vec<MonomialTerm>,
    /// Remainder as `(order, coefficient)` for `coefficient / (x - root)^order`,
    /// ascending order.
    pub poles: Vec<(u32, Expr)>,
}

/// Symbolic division of `coefficient * x^p / (x - root)^q`:
///
/// ```text
/// sum_{i=0}^{p-q} C(p-1-i, q-1) root^(p-q-i) x^i
///   + sum_{i=p-q+1}^{p} C(p, i) root^i (x - root)^(p-q-i)
/// ```
///
/// Panics if `q == 0`.
pub fn poly_div(coefficient: &Expr, p: u32, q: u32, root: &Expr) -> PolyDivFragment {
    poly_div_select(coefficient, p, q, root, |_| true)
}

fn poly_div_select(
    coefficient: &Expr,
    p: u32,
    q: u32,
    root: &Expr,
    want_monomial: impl Fn(u32) -> bool,
) -> PolyDivFragment {
    assert!(q >= 1, "pole order must be positive");
    let (p64, q64) = (p as i64, q as i64);
    let mut out = PolyDivFragment::default();
    if p >= q {
        for i in 0..=(p - q) {
            if !want_monomial(i) {
                continue;
            }
            let b = binomial((p64 - 1 - i as i64) as u64, q64 - 1);
            if b.is_zero() {
                continue;
            }
            let c = Expr::mul([
                Expr::Constant(Rational::from_integer(b)),
                Expr::pow(root.clone(), p64 - q64 - i as i64),
                coefficient.clone(),
            ]);
            if !c.is_zero() {
                out.monomials.push(MonomialTerm {
                    degree: i,
                    coefficient: c,
                });
            }
        }
    }
    // remainder exponents p-q-i run from -1 down to -q
    for i in (p64 - q64 + 1).max(0)..=p64 {
        let b = binomial(p as u64, i);
        if b.is_zero() {
            continue;
        }
        let order = (q64 + i - p64) as u32;
        let c = Expr::mul([
            Expr::Constant(Rational::from_integer(b)),
            Expr::pow(root.clone(), i),
            coefficient.clone(),
        ]);
        if !c.is_zero() {
            out.poles.push((order, c));
        }
    }
    out.poles.sort_by_key(|(o, _)| *o);
    out
}

/// Decomposes any admissible input, proper or improper.
pub fn decompose(spec: &RationalFunctionSpec) -> Result<Decomposition, DecomposeError> {
    if spec.is_proper() {
        return decompose_proper(spec);
    }
    let m = spec.denominator_degree();
    let l = spec.numerator_degree as u64;
    let shift = (l - (m - 1)) as u32;
    let quotient_degree = (l - m) as u32;

    let proper = decompose_proper(&spec.with_numerator_degree((m - 1) as u32))?;

    // quotient coefficient of x^d: closed form when it is no larger than the
    // number of division fragments that would otherwise be summed
    let mut closed_form_degrees = vec![false; quotient_degree as usize + 1];
    for (d, slot) in closed_form_degrees.iter_mut().enumerate() {
        let r = quotient_degree as u64 - d as u64;
        let closed_terms = binomial(r + spec.factors.len() as u64 - 1, r as i64);
        let fragments = proper
            .poles
            .iter()
            .filter(|pt| pt.order as u64 + d as u64 <= shift as u64)
            .count();
        *slot = closed_terms <= BigInt::from(fragments);
    }

    let mut monomials = Vec::new();
    let mut poles = Vec::new();
    for pt in &proper.poles {
        let frag = poly_div_select(
            &pt.coefficient,
            shift,
            pt.order,
            &proper.roots[pt.pole_index],
            |deg| !closed_form_degrees[deg as usize],
        );
        monomials.extend(frag.monomials);
        poles.extend(frag.poles.into_iter().map(|(order, coefficient)| PoleTerm {
            pole_index: pt.pole_index,
            order,
            coefficient,
        }));
    }
    for (d, &closed) in closed_form_degrees.iter().enumerate() {
        if closed {
            monomials.push(MonomialTerm {
                degree: d as u32,
                coefficient: complete_homogeneous(spec, quotient_degree as usize - d),
            });
        }
    }

    Ok(Decomposition {
        roots: proper.roots,
        monomials,
        poles,
    }
    .collect())
}

/// `h_r` over the roots counted with multiplicity: the coefficient of
/// `t^r` in `prod_k (1 - a_k t)^(-m_k)`. The quotient of `x^l` by `Q(x)` is
/// `sum_r h_r x^(l-m-r)`.
pub fn complete_homogeneous(spec: &RationalFunctionSpec, r: usize) -> Expr {
    let n = spec.factors.len();
    let mut terms = Vec::new();
    let mut comps = compositions(r, n);
    while let Some(parts) = comps.advance() {
        let mut c = BigInt::one();
        let mut factors = Vec::with_capacity(n + 1);
        for (f, &j) in spec.factors.iter().zip(parts) {
            if j > 0 {
                c *= binomial(f.multiplicity as u64 + j as u64 - 1, j as i64);
                factors.push(Expr::pow(f.root.clone(), j as i64));
            }
        }
        factors.push(Expr::Constant(Rational::from_integer(c)));
        terms.push(Expr::mul(factors));
    }
    Expr::add(terms)
}

/// Decomposes a weighted sum of inputs. Pole terms are merged across
/// inputs by root expression and order, monomials by degree.
pub fn decompose_batch(
    terms: &[(Expr, RationalFunctionSpec)],
) -> Result<Decomposition, DecomposeError> {
    let mut acc = Decomposition::default();
    let mut root_slot: HashMap<Expr, usize> = HashMap::new();
    for (index, (weight, spec)) in terms.iter().enumerate() {
        let weight = weight.canonicalize();
        if weight.contains_symbol(VARIABLE) {
            return Err(DecomposeError::WeightContainsVariable { index, weight });
        }
        let d = decompose(spec)?;
        let remap: Vec<usize> = d
            .roots
            .iter()
            .map(|r| {
                *root_slot.entry(r.clone()).or_insert_with(|| {
                    acc.roots.push(r.clone());
                    acc.roots.len() - 1
                })
            })
            .collect();
        for m in d.monomials {
            acc.monomials.push(MonomialTerm {
                degree: m.degree,
                coefficient: Expr::mul([weight.clone(), m.coefficient]),
            });
        }
        for p in d.poles {
            acc.poles.push(PoleTerm {
                pole_index: remap[p.pole_index],
                order: p.order,
                coefficient: Expr::mul([weight.clone(), p.coefficient]),
            });
        }
    }
    Ok(acc.collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;

    fn e(src: &str) -> Expr {
        parse_expr(src).unwrap()
    }

    fn spec(l: u32, roots: &[(&str, u32)]) -> RationalFunctionSpec {
        RationalFunctionSpec::new(l, roots.iter().map(|(r, m)| (e(r), *m))).unwrap()
    }

    #[test]
    fn three_simple_poles() {
        let d = decompose(&spec(0, &[("-1", 1), ("-2", 1), ("-3", 1)])).unwrap();
        assert!(d.monomials.is_empty());
        assert_eq!(d.poles.len(), 3);
        assert_eq!(d.pole(0, 1), Some(&e("1/2")));
        assert_eq!(d.pole(1, 1), Some(&e("-1")));
        assert_eq!(d.pole(2, 1), Some(&e("1/2")));
    }

    #[test]
    fn single_factor_identity() {
        let d = decompose(&spec(0, &[("a", 1)])).unwrap();
        assert_eq!(
            d.poles,
            vec![PoleTerm {
                pole_index: 0,
                order: 1,
                coefficient: Expr::one()
            }]
        );
        for m in 1..6 {
            let d = decompose(&spec(0, &[("a", m)])).unwrap();
            assert_eq!(d.poles.len(), 1);
            assert_eq!(d.pole(0, m), Some(&Expr::one()));
        }
    }

    #[test]
    fn double_pole_with_quadratic_numerator() {
        let d = decompose_proper(&spec(2, &[("a", 2), ("b", 1)])).unwrap();
        assert_eq!(d.pole(0, 2), Some(&e("a^2*(a-b)^(-1)")));
        let c = d.pole(0, 1).unwrap();
        let want = e("(a^2 - 2*a*b)*(a-b)^(-2)");
        // equal as rational functions of a and b
        for (av, bv) in [(3, 7), (-2, 5), (11, 4)] {
            let b: HashMap<String, Rational> = [
                ("a".to_string(), Rational::from(av)),
                ("b".to_string(), Rational::from(bv)),
            ]
            .into_iter()
            .collect();
            assert_eq!(c.evaluate(&b).unwrap(), want.evaluate(&b).unwrap());
        }
        assert_eq!(d.pole(1, 1), Some(&e("b^2*(b-a)^(-2)")));
    }

    #[test]
    fn improper_is_rejected_by_proper_route() {
        let err = decompose_proper(&spec(1, &[("a", 1)])).unwrap_err();
        assert_eq!(
            err,
            DecomposeError::NotProper {
                numerator: 1,
                denominator: 1
            }
        );
    }

    #[test]
    fn poly_div_examples() {
        let a = e("a");
        let one = Expr::one();
        let f = poly_div(&one, 3, 1, &a);
        let monos: Vec<_> = f
            .monomials
            .iter()
            .map(|m| (m.degree, m.coefficient.clone()))
            .collect();
        assert_eq!(monos, vec![(0, e("a^2")), (1, e("a")), (2, Expr::one())]);
        assert_eq!(f.poles, vec![(1, e("a^3"))]);

        let f = poly_div(&one, 1, 2, &a);
        assert!(f.monomials.is_empty());
        assert_eq!(f.poles, vec![(1, Expr::one()), (2, a.clone())]);

        let f = poly_div(&one, 0, 3, &a);
        assert!(f.monomials.is_empty());
        assert_eq!(f.poles, vec![(3, Expr::one())]);

        let f = poly_div(&e("c"), 2, 2, &a);
        let monos: Vec<_> = f
            .monomials
            .iter()
            .map(|m| (m.degree, m.coefficient.clone()))
            .collect();
        assert_eq!(monos, vec![(0, e("c"))]);
        assert_eq!(f.poles, vec![(1, e("2*a*c")), (2, e("a^2*c"))]);
    }

    #[test]
    fn improper_examples() {
        let d = decompose(&spec(3, &[("a", 1)])).unwrap();
        let monos: Vec<_> = d
            .monomials
            .iter()
            .map(|m| (m.degree, m.coefficient.clone()))
            .collect();
        assert_eq!(monos, vec![(0, e("a^2")), (1, e("a")), (2, Expr::one())]);
        assert_eq!(d.poles.len(), 1);
        assert_eq!(d.pole(0, 1), Some(&e("a^3")));

        let d = decompose(&spec(2, &[("a", 1), ("b", 1)])).unwrap();
        assert_eq!(d.monomials.len(), 1);
        assert_eq!(d.monomial(0), Some(&Expr::one()));
        assert_eq!(d.pole(0, 1), Some(&e("a^2*(a-b)^(-1)")));
        assert_eq!(d.pole(1, 1), Some(&e("b^2*(b-a)^(-1)")));
    }

    #[test]
    fn proper_passthrough() {
        let s = spec(0, &[("a", 2), ("b", 3), ("c", 1)]);
        assert_eq!(decompose(&s).unwrap(), decompose_proper(&s).unwrap());
    }

    #[test]
    fn candidate_counts_match_composition_counts() {
        let s = spec(1, &[("a", 3), ("b", 2), ("c", 4)]);
        let (_, stats) = decompose_proper_with_stats(&s).unwrap();
        let n = 3u64;
        for (i, f) in s.factors().iter().enumerate() {
            let m = f.multiplicity as usize;
            // brute force: count compositions with first part <= l
            let kept = compositions(m - 1, n as usize + 1)
                .filter(|c| c.parts()[0] <= 1)
                .count() as u64;
            let total: u64 = binomial(m as u64 - 1 + n, n as i64).try_into().unwrap();
            assert!(kept <= total);
            assert_eq!(stats.candidates_per_factor[i], kept);
        }
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            RationalFunctionSpec::new(0, Vec::<(Expr, u32)>::new()),
            Err(SpecError::NoFactors)
        );
        assert!(matches!(
            RationalFunctionSpec::new(0, [(e("a"), 0)]),
            Err(SpecError::ZeroMultiplicity { index: 0 })
        ));
        assert!(matches!(
            RationalFunctionSpec::new(0, [(e("a"), 1), (e("a + 0*b"), 2)]),
            Err(SpecError::DuplicateRoots {
                first: 0,
                second: 1,
                ..
            })
        ));
        assert!(matches!(
            RationalFunctionSpec::new(0, [(e("a*(b+c)"), 1), (e("a*b + a*c"), 1)]),
            Err(SpecError::DuplicateRoots { .. })
        ));
        assert!(matches!(
            RationalFunctionSpec::new(0, [(e("a"), 1), (e("x + 1"), 1)]),
            Err(SpecError::RootContainsVariable { index: 1, .. })
        ));
    }

    #[test]
    fn batch_examples() {
        let a = spec(0, &[("a", 2), ("b", 1)]);
        let d = decompose_batch(&[(Expr::one(), a.clone()), (e("-1"), a)]).unwrap();
        assert!(d.is_empty());

        let s = spec(0, &[("-1", 1), ("-2", 1)]);
        let d = decompose_batch(&[(e("2"), s)]).unwrap();
        assert_eq!(d.pole(0, 1), Some(&e("2")));
        assert_eq!(d.pole(1, 1), Some(&e("-2")));

        let d = decompose_batch(&[
            (Expr::one(), spec(0, &[("a", 1)])),
            (Expr::one(), spec(0, &[("b", 1)])),
        ])
        .unwrap();
        assert_eq!(d.roots, vec![e("a"), e("b")]);
        assert_eq!(d.pole(0, 1), Some(&Expr::one()));
        assert_eq!(d.pole(1, 1), Some(&Expr::one()));

        let err = decompose_batch(&[(e("x"), spec(0, &[("a", 1)]))]).unwrap_err();
        assert!(matches!(
            err,
            DecomposeError::WeightContainsVariable { index: 0, .. }
        ));
    }

    #[test]
    fn collect_merges_and_cancels() {
        let d = Decomposition {
            roots: vec![e("a"), e("a")],
            monomials: vec![],
            poles: vec![
                PoleTerm {
                    pole_index: 0,
                    order: 1,
                    coefficient: e("c1"),
                },
                PoleTerm {
                    pole_index: 1,
                    order: 1,
                    coefficient: e("c2"),
                },
            ],
        };
        let c = d.collect();
        assert_eq!(c.roots, vec![e("a")]);
        assert_eq!(c.poles.len(), 1);
        assert_eq!(c.pole(0, 1), Some(&e("c1 + c2")));
        assert_eq!(c.collect(), c);

        let d = Decomposition {
            roots: vec![e("a")],
            monomials: vec![],
            poles: vec![
                PoleTerm {
                    pole_index: 0,
                    order: 1,
                    coefficient: e("1"),
                },
                PoleTerm {
                    pole_index: 0,
                    order: 1,
                    coefficient: e("-1"),
                },
            ],
        };
        assert!(d.collect().is_empty());
    }
}
