//! Exact univariate partial fraction decomposition of
//! `x^l / prod_k (x - a_k)^(m_k)` for symbolic or rational roots `a_k`.
//!
//! ```
//! use pfrac::{decompose, parse_root_list, serialize, OutputFormat, RationalFunctionSpec};
//!
//! let roots = parse_root_list("-1,-2,-3").unwrap();
//! let spec = RationalFunctionSpec::new(0, roots.into_iter().map(|r| (r, 1))).unwrap();
//! let d = decompose(&spec).unwrap();
//! assert_eq!(
//!     serialize(&d, &OutputFormat::default()),
//!     "(1/2)*(x + 1)^(-1) - (x + 2)^(-1) + (1/2)*(x + 3)^(-1)"
//! );
//! ```

pub mod arith;
pub mod cli;
pub mod decompose;
pub mod expr;
pub mod oracle;
pub mod output;
pub mod parse;

pub use arith::{binomial, compositions, multinomial, ArithError, Composition, Rational};
pub use decompose::{
    decompose, decompose_batch, decompose_proper, poly_div, BoundDecomposition, DecomposeError,
    Decomposition, Factor, MonomialTerm, PoleTerm, RationalFunctionSpec, SpecError, Term, VARIABLE,
};
pub use expr::{EvalError, Evaluator, Expr};
pub use oracle::{
    check_by_substitution, check_by_substitution_with, oracle_decompose, Counterexample,
    DensePolynomial, OracleError, SubstitutionConfig, SubstitutionReport,
};
pub use output::{collect, serialize, write_streaming, OutputFormat, OutputMode, StreamBuffer};
pub use parse::{parse_expr, parse_root_list, ParseError, RootListError, SourceSpan};
