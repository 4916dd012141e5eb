//! Rendering decompositions as text, in memory or streamed through a
//! fixed-capacity buffer.
//!
//! Infix output is a single expression in `x`:
//!
//! ```text
//! (1/2)*(x + 1)^(-1) - (x + 2)^(-1) + (1/2)*(x + 3)^(-1)
//! ```
//!
//! Structured output is one LF-terminated record per term:
//!
//! ```text
//! M <degree> <coefficient>
//! P <factor-index> <order> <coefficient>
//! ```
//!
//! with 1-based factor indices. Both forms list monomials by ascending
//! degree, then poles by factor index and ascending order.

use std::fmt::Write as _;
use std::io;

use thiserror::Error;

use crate::decompose::{Decomposition, Term, VARIABLE};
use crate::expr::Expr;

pub const DEFAULT_BUFFER_CAPACITY: usize = 64 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Infix,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutputFormat {
    pub mode: OutputMode,
    /// Distribute products over sums in every coefficient before printing.
    pub expand_coefficients: bool,
}

impl OutputFormat {
    pub fn infix() -> Self {
        OutputFormat::default()
    }

    pub fn structured() -> Self {
        OutputFormat {
            mode: OutputMode::Structured,
            expand_coefficients: false,
        }
    }
}

pub fn collect(d: &Decomposition) -> Decomposition {
    d.collect()
}

/// Renders one term. `index` is the term's position in the output; infix
/// terms after the first carry their ` + ` / ` - ` separator.
pub fn render_term(term: Term<'_>, index: usize, fmt: &OutputFormat) -> String {
    let coefficient = match term {
        Term::Monomial(m) => &m.coefficient,
        Term::Pole { term, .. } => &term.coefficient,
    };
    let expanded;
    let coefficient = if fmt.expand_coefficients {
        expanded = coefficient.expand();
        &expanded
    } else {
        coefficient
    };
    let mut out = String::new();
    match fmt.mode {
        OutputMode::Structured => {
            match term {
                Term::Monomial(m) => write!(out, "M {} {}", m.degree, coefficient),
                Term::Pole { term, .. } => {
                    write!(
                        out,
                        "P {} {} {}",
                        term.pole_index + 1,
                        term.order,
                        coefficient
                    )
                }
            }
            .expect("write to String");
            out.push('\n');
        }
        OutputMode::Infix => {
            let negative = coefficient.has_negative_sign();
            let magnitude = if negative {
                -coefficient.clone()
            } else {
                coefficient.clone()
            };
            match (index, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let x_part = match term {
                Term::Monomial(m) => match m.degree {
                    0 => None,
                    1 => Some(VARIABLE.to_string()),
                    d => Some(format!("{VARIABLE}^{d}")),
                },
                Term::Pole { root, term } => {
                    Some(format!("{}^(-{})", shifted_variable(root), term.order))
                }
            };
            match x_part {
                None => write_coefficient_factor(&mut out, &magnitude),
                Some(xp) if magnitude.is_one() => out.push_str(&xp),
                Some(xp) => {
                    write_coefficient_factor(&mut out, &magnitude);
                    out.push('*');
                    out.push_str(&xp);
                }
            }
        }
    }
    out
}

fn write_coefficient_factor(out: &mut String, c: &Expr) {
    match c {
        Expr::Sum(_) => write!(out, "({c})"),
        Expr::Constant(v) if !v.is_integer() => write!(out, "({c})"),
        _ => write!(out, "{c}"),
    }
    .expect("write to String");
}

/// `(x - root)` with the root's terms spelled out, or `x` for a zero root.
fn shifted_variable(root: &Expr) -> String {
    if root.is_zero() {
        return VARIABLE.to_string();
    }
    let neg = -root.clone();
    let terms = match &neg {
        Expr::Sum(ts) => ts.clone(),
        other => vec![other.clone()],
    };
    let mut out = format!("({VARIABLE}");
    for t in terms {
        if t.has_negative_sign() {
            write!(out, " - {}", -t)
        } else {
            write!(out, " + {t}")
        }
        .expect("write to String");
    }
    out.push(')');
    out
}

fn empty_output(fmt: &OutputFormat) -> &'static str {
    match fmt.mode {
        OutputMode::Infix => "0",
        OutputMode::Structured => "",
    }
}

/// Deterministic text for `d`; `0` for an empty infix decomposition.
pub fn serialize(d: &Decomposition, fmt: &OutputFormat) -> String {
    if d.is_empty() {
        return empty_output(fmt).to_string();
    }
    let mut out = String::new();
    for (i, t) in d.terms().enumerate() {
        out.push_str(&render_term(t, i, fmt));
    }
    out
}

/// Fixed-capacity staging area for [`write_streaming`].
#[derive(Debug, Clone)]
pub struct StreamBuffer {
    capacity: usize,
    pending: Vec<u8>,
    peak_pending: usize,
    largest_term: usize,
    flushes: usize,
}

impl StreamBuffer {
    /// Panics if `capacity_bytes == 0`.
    pub fn new(capacity_bytes: usize) -> Self {
        assert!(capacity_bytes > 0, "buffer capacity must be positive");
        StreamBuffer {
            capacity: capacity_bytes,
            pending: Vec::with_capacity(capacity_bytes),
            peak_pending: 0,
            largest_term: 0,
            flushes: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Largest number of bytes ever held before a flush.
    pub fn peak_pending(&self) -> usize {
        self.peak_pending
    }

    /// Longest single serialized term seen.
    pub fn largest_term(&self) -> usize {
        self.largest_term
    }

    /// Writes issued to the sink, including pass-through writes.
    pub fn flushes(&self) -> usize {
        self.flushes
    }
}

impl Default for StreamBuffer {
    fn default() -> Self {
        StreamBuffer::new(DEFAULT_BUFFER_CAPACITY)
    }
}

#[derive(Debug, Error)]
#[error("output write failed after {bytes_written} bytes: {source}")]
pub struct StreamError {
    pub bytes_written: u64,
    #[source]
    pub source: io::Error,
}

struct Writer<'a, W: io::Write> {
    sink: &'a mut W,
    buf: &'a mut StreamBuffer,
    written: u64,
}

impl<W: io::Write> Writer<'_, W> {
    fn emit(&mut self, bytes: &[u8]) -> Result<(), StreamError> {
        self.sink.write_all(bytes).map_err(|source| StreamError {
            bytes_written: self.written,
            source,
        })?;
        self.written += bytes.len() as u64;
        self.buf.flushes += 1;
        Ok(())
    }

    fn flush_pending(&mut self) -> Result<(), StreamError> {
        if self.buf.pending.is_empty() {
            return Ok(());
        }
        let pending = std::mem::take(&mut self.buf.pending);
        let r = self.emit(&pending);
        self.buf.pending = pending;
        self.buf.pending.clear();
        r
    }

    fn push(&mut self, bytes: &[u8]) -> Result<(), StreamError> {
        self.buf.largest_term = self.buf.largest_term.max(bytes.len());
        if self.buf.pending.len() + bytes.len() > self.buf.capacity {
            self.flush_pending()?;
        }
        if bytes.len() > self.buf.capacity {
            return self.emit(bytes);
        }
        self.buf.pending.extend_from_slice(bytes);
        self.buf.peak_pending = self.buf.peak_pending.max(self.buf.pending.len());
        Ok(())
    }
}

/// Serializes `terms` one at a time into `buf`, flushing to `sink` whenever
/// the next term would overflow the capacity. A term longer than the
/// capacity bypasses the buffer. Returns the number of bytes written; the
/// output is byte-identical to [`serialize`].
pub fn write_streaming<'t, I, W>(
    terms: I,
    sink: &mut W,
    buf: &mut StreamBuffer,
    fmt: &OutputFormat,
) -> Result<u64, StreamError>
where
    I: IntoIterator<Item = Term<'t>>,
    W: io::Write,
{
    let mut w = Writer {
        sink,
        buf,
        written: 0,
    };
    let mut count = 0usize;
    for t in terms {
        let text = render_term(t, count, fmt);
        w.push(text.as_bytes())?;
        count += 1;
    }
    if count == 0 {
        w.push(empty_output(fmt).as_bytes())?;
    }
    w.flush_pending()?;
    let written = w.written;
    w.sink.flush().map_err(|source| StreamError {
        bytes_written: written,
        source,
    })?;
    Ok(written)
}
