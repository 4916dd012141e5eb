//! The `pfrac` command line tool.
//!
//! ```text
//! pfrac [OPTIONS] <EXPONENTS> <ROOTS>
//! pfrac "3,5,7,11" "a1,a2,a3"
//! ```
//!
//! `EXPONENTS` is `l,m_1,...,m_n` and `ROOTS` is `a_1,...,a_n`; the result
//! for `x^l / prod (x - a_i)^m_i` goes to stdout and to `result.out`.
//! Exit status: 0 on success, 1 on usage or input errors, 2 when `--verify`
//! finds a mismatch.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::decompose::{decompose, Decomposition, RationalFunctionSpec, SpecError, VARIABLE};
use crate::expr::Expr;
use crate::oracle::{check_by_substitution, oracle_decompose};
use crate::output::{
    write_streaming, OutputFormat, OutputMode, StreamBuffer, DEFAULT_BUFFER_CAPACITY,
};
use crate::parse::{parse_root_list, RootListError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One infix expression on a single line.
    Infix,
    /// One line per term: `M degree coef` or `P root order coef`.
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "pfrac",
    version,
    about = "Partial fraction decomposition of x^l / prod (x - a_i)^m_i",
    after_help = "Example:\n  pfrac \"3,5,7,11\" \"a1,a2,a3\"\n\nThe variable is always `x`; roots must not contain it."
)]
struct Args {
    /// Comma-separated exponents `l,m_1,...,m_n`
    #[arg(allow_hyphen_values = true)]
    exponents: String,

    /// Comma-separated roots `a_1,...,a_n`
    #[arg(allow_hyphen_values = true)]
    roots: String,

    #[arg(long, value_enum, default_value_t = Format::Infix)]
    format: Format,

    /// Expand coefficients instead of keeping them factored
    #[arg(long)]
    expand: bool,

    /// Check the result at N random substitutions
    #[arg(long, value_name = "N")]
    verify: Option<usize>,

    /// Seed for `--verify`
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output buffer size in bytes
    #[arg(long, default_value_t = DEFAULT_BUFFER_CAPACITY, value_parser = parse_capacity)]
    buffer_capacity: usize,

    /// File receiving the result (overwritten)
    #[arg(short, long, default_value = "result.out")]
    output: PathBuf,

    /// Do not print the result to stdout
    #[arg(short, long)]
    quiet: bool,
}

fn parse_capacity(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("capacity must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn parse_exponents(src: &str) -> Result<(u32, Vec<u32>), Failure> {
    let mut values = Vec::new();
    for (i, entry) in src.split(',').enumerate() {
        let entry = entry.trim();
        let v = entry.parse::<u32>().map_err(|_| {
            usage(format!(
                "exponent entry {} (`{entry}`) is not a non-negative integer",
                i + 1
            ))
        })?;
        values.push(v);
    }
    if values.len() < 2 {
        return Err(usage(
            "the exponent list needs the numerator degree and at least one multiplicity",
        ));
    }
    let l = values.remove(0);
    if let Some(i) = values.iter().position(|&m| m == 0) {
        return Err(usage(format!("multiplicity {} must be at least 1", i + 1)));
    }
    Ok((l, values))
}

fn root_error(src: &str, e: RootListError) -> Failure {
    let detail = match &e {
        RootListError::Entry { source, .. } => {
            format!("\n  {src}\n  {}^", " ".repeat(source.span.start))
        }
        RootListError::EmptyEntry { span, .. } => {
            format!("\n  {src}\n  {}^", " ".repeat(span.start))
        }
        RootListError::Empty => String::new(),
    };
    usage(format!("invalid root list: {e}{detail}"))
}

fn spec_error(roots: &[Expr], e: SpecError) -> Failure {
    match e {
        SpecError::DuplicateRoots { first, second, .. } => usage(format!(
            "roots {} (`{}`) and {} (`{}`) are equal",
            first + 1,
            roots[first],
            second + 1,
            roots[second]
        )),
        SpecError::RootContainsVariable { index, root } => usage(format!(
            "root {} (`{root}`) contains the variable `{VARIABLE}`",
            index + 1
        )),
        other => usage(other.to_string()),
    }
}

/// Writes every byte to the file and, unless quiet, to stdout.
struct Tee<'a> {
    file: &'a mut dyn Write,
    stdout: Option<&'a mut dyn Write>,
}

impl Write for Tee<'_> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.file.write_all(buf)?;
        if let Some(out) = self.stdout.as_mut() {
            out.write_all(buf)?;
        }
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        self.file.flush()?;
        if let Some(out) = self.stdout.as_mut() {
            out.flush()?;
        }
        Ok(())
    }
}

/// Compares against the linear-system oracle; `None` unless every root is
/// numeric.
fn oracle_mismatch(spec: &RationalFunctionSpec, d: &Decomposition) -> Option<Option<String>> {
    let mut roots = Vec::new();
    for f in spec.factors() {
        roots.push(f.root.as_constant()?.clone());
    }
    let mults: Vec<u32> = spec.factors().iter().map(|f| f.multiplicity).collect();
    let expected = match oracle_decompose(spec.numerator_degree(), &roots, &mults) {
        Ok(e) => e,
        Err(e) => return Some(Some(format!("oracle failed: {e}"))),
    };
    let got = d.collect();
    let top = expected
        .monomials
        .iter()
        .chain(&got.monomials)
        .map(|m| m.degree)
        .max();
    for k in top.into_iter().flat_map(|t| 0..=t) {
        let want = expected.monomial(k).cloned().unwrap_or_else(Expr::zero);
        let have = got.monomial(k).cloned().unwrap_or_else(Expr::zero);
        if want != have {
            return Some(Some(format!(
                "coefficient of x^{k}: oracle {want}, engine {have}"
            )));
        }
    }
    for (i, f) in spec.factors().iter().enumerate() {
        for j in 1..=f.multiplicity {
            let want = expected.pole(i, j).cloned().unwrap_or_else(Expr::zero);
            let have = got.pole(i, j).cloned().unwrap_or_else(Expr::zero);
            if want != have {
                return Some(Some(format!(
                    "coefficient of (x - {})^(-{j}): oracle {want}, engine {have}",
                    f.root
                )));
            }
        }
    }
    Some(None)
}

fn execute(args: Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let (l, mults) = parse_exponents(&args.exponents)?;
    let roots = parse_root_list(&args.roots).map_err(|e| root_error(&args.roots, e))?;
    if mults.len() != roots.len() {
        return Err(usage(format!(
            "{} exponent entries require {} roots, {} given",
            mults.len() + 1,
            mults.len(),
            roots.len()
        )));
    }
    let spec = RationalFunctionSpec::new(l, roots.iter().cloned().zip(mults))
        .map_err(|e| spec_error(&roots, e))?;
    let d = decompose(&spec).map_err(|e| usage(e.to_string()))?;

    let fmt = OutputFormat {
        mode: match args.format {
            Format::Infix => OutputMode::Infix,
            Format::Structured => OutputMode::Structured,
        },
        expand_coefficients: args.expand,
    };
    let mut file = File::create(&args.output)
        .map_err(|e| usage(format!("cannot create {}: {e}", args.output.display())))?;
    let mut tee = Tee {
        file: &mut file,
        stdout: if args.quiet { None } else { Some(stdout) },
    };
    let mut buf = StreamBuffer::new(args.buffer_capacity);
    let write_err = |e: &dyn std::fmt::Display| usage(format!("writing output failed: {e}"));
    if d.is_empty() && fmt.mode == OutputMode::Infix {
        tee.write_all(b"0").map_err(|e| write_err(&e))?;
    } else {
        write_streaming(d.terms(), &mut tee, &mut buf, &fmt).map_err(|e| write_err(&e))?;
    }
    if fmt.mode == OutputMode::Infix {
        tee.write_all(b"\n").map_err(|e| write_err(&e))?;
    }
    tee.flush().map_err(|e| write_err(&e))?;

    if let Some(trials) = args.verify {
        let report = check_by_substitution(&spec, &d, trials, args.seed);
        let _ = writeln!(stderr, "substitution check: {report}");
        let mut failed = !report.passed();
        match oracle_mismatch(&spec, &d) {
            Some(None) => {
                let _ = writeln!(stderr, "oracle check: PASS");
            }
            Some(Some(msg)) => {
                let _ = writeln!(stderr, "oracle check: FAIL: {msg}");
                failed = true;
            }
            None => {}
        }
        if failed {
            return Err(Failure {
                code: EXIT_VERIFY_FAILED,
                message: "verification failed".into(),
            });
        }
    }
    Ok(())
}

/// Runs the tool with `argv` (program name first) and returns the exit
/// status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(args, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
