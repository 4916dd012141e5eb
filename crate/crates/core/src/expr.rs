//! Canonical symbolic expressions over named symbols and exact rationals.
//!
//! Every value built through the constructors on [`Expr`] is canonical:
//!
//! * sums and products are flattened and have at least two children,
//! * like terms (`2*a + 3*a`) and like bases (`a * a^2`) are merged,
//! * a product carries at most one constant factor, stored first, and a
//!   constant times a lone sum is distributed (`-(a + b)` is `-a - b`),
//! * powers never have exponent 0 or 1, and powers of products or powers
//!   are distributed,
//! * children are sorted by the derived total order
//!   (`Constant < Symbol < Power < Product < Sum`).
//!
//! Two canonical expressions are considered the same expression exactly when
//! they are structurally equal. No semantic simplification is attempted
//! beyond the rules above; [`Expr::expand`] is available when distributing
//! products over sums is wanted.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::arith::{ArithError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("division by zero")]
    DivisionByZero,
}

impl From<ArithError> for EvalError {
    fn from(_: ArithError) -> Self {
        EvalError::DivisionByZero
    }
}

/// A symbolic expression. The variant order is the canonical sort order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Constant(Rational),
    Symbol(String),
    Power(Box<Expr>, i64),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Constant(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Constant(Rational::one())
    }

    pub fn constant(value: impl Into<Rational>) -> Expr {
        Expr::Constant(value.into())
    }

    pub fn symbol(name: impl Into<String>) -> Expr {
        Expr::Symbol(name.into())
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        match self {
            Expr::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Constant(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Constant(c) if c.is_one())
    }

    /// Canonical sum of canonical terms.
    pub fn add(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Rational::zero();
        // insertion order is irrelevant, output is sorted
        let mut like: HashMap<Expr, Rational> = HashMap::new();
        let mut push = |term: Expr, constant: &mut Rational| match term {
            Expr::Constant(c) => *constant += c,
            other => {
                let (coeff, rest) = split_coefficient(other);
                *like.entry(rest).or_insert_with(Rational::zero) += coeff;
            }
        };
        for t in terms {
            match t {
                Expr::Sum(children) => {
                    for c in children {
                        push(c, &mut constant);
                    }
                }
                other => push(other, &mut constant),
            }
        }
        let mut out: Vec<Expr> = like
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(rest, c)| scale(c, rest))
            .collect();
        if !constant.is_zero() {
            out.push(Expr::Constant(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort_unstable();
                Expr::Sum(out)
            }
        }
    }

    /// Canonical product of canonical factors.
    ///
    /// Panics if merged exponents overflow `i64`.
    pub fn mul(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Rational::one();
        let mut bases: HashMap<Expr, i64> = HashMap::new();
        let mut push = |f: Expr, constant: &mut Rational| match f {
            Expr::Constant(c) => *constant *= c,
            Expr::Power(base, e) => {
                let slot = bases.entry(*base).or_insert(0);
                *slot = slot.checked_add(e).expect("exponent overflow");
            }
            other => {
                let slot = bases.entry(other).or_insert(0);
                *slot = slot.checked_add(1).expect("exponent overflow");
            }
        };
        for f in factors {
            match f {
                Expr::Product(children) => {
                    for c in children {
                        push(c, &mut constant);
                    }
                }
                other => push(other, &mut constant),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        let mut out: Vec<Expr> = Vec::with_capacity(bases.len() + 1);
        for (base, e) in bases {
            match e {
                0 => {}
                1 => out.push(base),
                // merged bases are symbols, sums, or an unevaluated zero
                e => match base {
                    Expr::Constant(c) if !c.is_zero() => {
                        constant *= c.pow(e).expect("nonzero base");
                    }
                    base => out.push(Expr::Power(Box::new(base), e)),
                },
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        out.sort_unstable();
        if constant.is_one() {
            match out.len() {
                0 => Expr::one(),
                1 => out.pop().unwrap(),
                _ => Expr::Product(out),
            }
        } else if out.is_empty() {
            Expr::Constant(constant)
        } else if let [Expr::Sum(_)] = out.as_slice() {
            // c*(u + v) is always distributed so that like terms can meet
            let Some(Expr::Sum(ts)) = out.pop() else {
                unreachable!()
            };
            Expr::add(
                ts.into_iter()
                    .map(|t| Expr::mul([Expr::Constant(constant.clone()), t])),
            )
        } else {
            out.insert(0, Expr::Constant(constant));
            Expr::Product(out)
        }
    }

    /// Canonical integer power. `0^e` with `e < 0` is kept unevaluated so
    /// that evaluation reports the division by zero.
    ///
    /// Panics if the exponent product overflows `i64`; see
    /// [`Expr::checked_pow`].
    pub fn pow(base: Expr, exp: i64) -> Expr {
        Expr::checked_pow(base, exp).expect("exponent overflow")
    }

    pub fn checked_pow(base: Expr, exp: i64) -> Option<Expr> {
        if exp == 0 {
            return Some(Expr::one());
        }
        if exp == 1 {
            return Some(base);
        }
        Some(match base {
            Expr::Constant(c) => match c.pow(exp) {
                Ok(v) => Expr::Constant(v),
                Err(_) => Expr::Power(Box::new(Expr::Constant(c)), exp),
            },
            Expr::Power(b, e) => Expr::checked_pow(*b, e.checked_mul(exp)?)?,
            Expr::Product(fs) => {
                let parts = fs
                    .into_iter()
                    .map(|f| Expr::checked_pow(f, exp))
                    .collect::<Option<Vec<_>>>()?;
                Expr::mul(parts)
            }
            other => Expr::Power(Box::new(other), exp),
        })
    }

    pub fn scale(self, c: &Rational) -> Expr {
        Expr::mul([Expr::Constant(c.clone()), self])
    }

    /// Returns the canonical form of an arbitrary (possibly hand-built) tree.
    pub fn canonicalize(&self) -> Expr {
        match self {
            Expr::Constant(_) | Expr::Symbol(_) => self.clone(),
            Expr::Power(b, e) => Expr::pow(b.canonicalize(), *e),
            Expr::Product(fs) => Expr::mul(fs.iter().map(Expr::canonicalize)),
            Expr::Sum(ts) => Expr::add(ts.iter().map(Expr::canonicalize)),
        }
    }

    /// Distributes products over sums and expands positive powers of sums.
    /// Negative powers keep their (expanded) base intact.
    pub fn expand(&self) -> Expr {
        match self {
            Expr::Constant(_) | Expr::Symbol(_) => self.clone(),
            Expr::Sum(ts) => Expr::add(ts.iter().map(Expr::expand)),
            Expr::Product(fs) => fs
                .iter()
                .map(Expr::expand)
                .fold(Expr::one(), |acc, f| expand_mul(&acc, &f)),
            Expr::Power(b, e) => {
                let base = b.expand();
                if *e > 0 && matches!(base, Expr::Sum(_)) {
                    let mut acc = base.clone();
                    for _ in 1..*e {
                        acc = expand_mul(&acc, &base);
                    }
                    acc
                } else {
                    Expr::pow(base, *e)
                }
            }
        }
    }

    /// Exact value with every symbol bound.
    pub fn evaluate(&self, bindings: &HashMap<String, Rational>) -> Result<Rational, EvalError> {
        match self {
            Expr::Constant(c) => Ok(c.clone()),
            Expr::Symbol(s) => bindings
                .get(s)
                .cloned()
                .ok_or_else(|| EvalError::UnboundSymbol(s.clone())),
            Expr::Power(b, e) => Ok(b.evaluate(bindings)?.pow(*e)?),
            Expr::Product(fs) => {
                let mut acc = Rational::one();
                for f in fs {
                    acc *= f.evaluate(bindings)?;
                }
                Ok(acc)
            }
            Expr::Sum(ts) => {
                let mut acc = Rational::zero();
                for t in ts {
                    acc += t.evaluate(bindings)?;
                }
                Ok(acc)
            }
        }
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    pub(crate) fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Constant(_) => {}
            Expr::Symbol(s) => {
                if !out.contains(s) {
                    out.insert(s.clone());
                }
            }
            Expr::Power(b, _) => b.collect_symbols(out),
            Expr::Product(xs) | Expr::Sum(xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self {
            Expr::Constant(_) => false,
            Expr::Symbol(s) => s == name,
            Expr::Power(b, _) => b.contains_symbol(name),
            Expr::Product(xs) | Expr::Sum(xs) => xs.iter().any(|x| x.contains_symbol(name)),
        }
    }

    /// Largest absolute exponent anywhere in the tree.
    pub fn max_abs_exponent(&self) -> u64 {
        match self {
            Expr::Constant(_) | Expr::Symbol(_) => 0,
            Expr::Power(b, e) => b.max_abs_exponent().max(e.unsigned_abs()),
            Expr::Product(xs) | Expr::Sum(xs) => {
                xs.iter().map(Expr::max_abs_exponent).max().unwrap_or(0)
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Constant(_) | Expr::Symbol(_) => 1,
            Expr::Power(b, _) => 1 + b.size(),
            Expr::Product(xs) | Expr::Sum(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
        }
    }

    /// True for a negative constant or a product whose constant is negative.
    pub(crate) fn has_negative_sign(&self) -> bool {
        match self {
            Expr::Constant(c) => c.is_negative(),
            Expr::Product(fs) => matches!(fs.first(), Some(Expr::Constant(c)) if c.is_negative()),
            _ => false,
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::constant(-1), self])
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add([self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add([self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul([self, rhs])
    }
}

/// Evaluates many expressions under one binding, reusing the value of every
/// power node seen before. Useful when the same `(a - b)^k` factors recur
/// across a large set of coefficients.
pub struct Evaluator<'e, 'b> {
    bindings: &'b HashMap<String, Rational>,
    powers: HashMap<(&'e Expr, i64), Rational>,
}

impl<'e, 'b> Evaluator<'e, 'b> {
    pub fn new(bindings: &'b HashMap<String, Rational>) -> Self {
        Evaluator {
            bindings,
            powers: HashMap::new(),
        }
    }

    pub fn eval(&mut self, e: &'e Expr) -> Result<Rational, EvalError> {
        match e {
            Expr::Constant(c) => Ok(c.clone()),
            Expr::Symbol(s) => self
                .bindings
                .get(s)
                .cloned()
                .ok_or_else(|| EvalError::UnboundSymbol(s.clone())),
            Expr::Power(b, k) => {
                if let Some(v) = self.powers.get(&(&**b, *k)) {
                    return Ok(v.clone());
                }
                let v = self.eval(b)?.pow(*k)?;
                self.powers.insert((&**b, *k), v.clone());
                Ok(v)
            }
            Expr::Product(fs) => {
                let mut acc = Rational::one();
                for f in fs {
                    acc *= self.eval(f)?;
                }
                Ok(acc)
            }
            Expr::Sum(ts) => {
                let mut acc = Rational::zero();
                for t in ts {
                    acc += self.eval(t)?;
                }
                Ok(acc)
            }
        }
    }
}

/// Splits a non-constant canonical term into `(coefficient, rest)`.
fn split_coefficient(term: Expr) -> (Rational, Expr) {
    match term {
        Expr::Product(mut fs) => match fs.first() {
            Some(Expr::Constant(_)) => {
                let c = match fs.remove(0) {
                    Expr::Constant(c) => c,
                    _ => unreachable!(),
                };
                let rest = if fs.len() == 1 {
                    fs.pop().unwrap()
                } else {
                    Expr::Product(fs)
                };
                (c, rest)
            }
            _ => (Rational::one(), Expr::Product(fs)),
        },
        other => (Rational::one(), other),
    }
}

/// Inverse of [`split_coefficient`] for a nonzero coefficient.
fn scale(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest {
        Expr::Product(mut fs) => {
            fs.insert(0, Expr::Constant(c));
            Expr::Product(fs)
        }
        other => Expr::Product(vec![Expr::Constant(c), other]),
    }
}

fn expand_mul(a: &Expr, b: &Expr) -> Expr {
    let terms = |e: &Expr| -> Vec<Expr> {
        match e {
            Expr::Sum(ts) => ts.clone(),
            other => vec![other.clone()],
        }
    };
    let (ta, tb) = (terms(a), terms(b));
    let mut out = Vec::with_capacity(ta.len() * tb.len());
    for x in &ta {
        for y in &tb {
            out.push(Expr::mul([x.clone(), y.clone()]));
        }
    }
    Expr::add(out)
}

pub fn canonicalize(raw: &Expr) -> Expr {
    raw.canonicalize()
}

pub fn expand(e: &Expr) -> Expr {
    e.expand()
}

pub fn evaluate(e: &Expr, bindings: &HashMap<String, Rational>) -> Result<Rational, EvalError> {
    e.evaluate(bindings)
}

/// Infix rendering that the expression parser reads back to the same
/// canonical form: explicit `*` and `^`, spaces around binary `+`/`-`,
/// negative exponents and non-integer constants parenthesized in factors.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(c) => write!(f, "{c}"),
            Expr::Symbol(s) => f.write_str(s),
            Expr::Power(b, e) => {
                write_base(f, b)?;
                if *e < 0 {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
            Expr::Product(fs) => write_product(f, fs),
            Expr::Sum(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{t}")?;
                    } else if t.has_negative_sign() {
                        write!(f, " - {}", t.clone().neg())?;
                    } else {
                        write!(f, " + {t}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

fn write_product(f: &mut fmt::Formatter<'_>, fs: &[Expr]) -> fmt::Result {
    let (rest, lead) = match fs.first() {
        Some(Expr::Constant(c)) if fs.len() > 1 => (&fs[1..], Some(c)),
        _ => (fs, None),
    };
    if let Some(c) = lead {
        if c.is_negative() {
            f.write_str("-")?;
        }
        let a = c.abs();
        if !a.is_one() {
            write_constant_factor(f, &a)?;
            f.write_str("*")?;
        }
    }
    for (i, x) in rest.iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write_factor(f, x)?;
    }
    Ok(())
}

fn write_constant_factor(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() && !c.is_negative() {
        write!(f, "{c}")
    } else {
        write!(f, "({c})")
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, x: &Expr) -> fmt::Result {
    match x {
        Expr::Constant(c) => write_constant_factor(f, c),
        Expr::Symbol(_) | Expr::Power(..) => write!(f, "{x}"),
        Expr::Product(_) | Expr::Sum(_) => write!(f, "({x})"),
    }
}

fn write_base(f: &mut fmt::Formatter<'_>, x: &Expr) -> fmt::Result {
    match x {
        Expr::Power(..) => write!(f, "({x})"),
        other => write_factor(f, other),
    }
}

/// Groups terms of a sum by identical non-constant part, useful for
/// inspecting which coefficients were merged.
pub fn coefficient_map(e: &Expr) -> BTreeMap<Expr, Rational> {
    let mut out = BTreeMap::new();
    let terms = match e {
        Expr::Sum(ts) => ts.clone(),
        other => vec![other.clone()],
    };
    for t in terms {
        let (c, rest) = match t {
            Expr::Constant(c) => (c, Expr::one()),
            other => split_coefficient(other),
        };
        *out.entry(rest).or_insert_with(Rational::zero) += c;
    }
    out
}
