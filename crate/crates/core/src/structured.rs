//! Structured-matrix data model.
//!
//! A structured system is a pair `(A, B)` of pattern matrices whose entries
//! are fixed zeros (`0`), generic entries (`*`) that may take any value, or
//! unspecified-nonzero entries (`x`) that may take any nonzero value. This
//! module holds the data model, the text/JSON parsers and emitters, the
//! single-cross reduction, and seeded sampling of exact rational realizations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Kind of a single entry of a structured matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntryKind {
    /// Fixed zero.
    Zero,
    /// Generic entry: free to take any value, including zero.
    Star,
    /// Unspecified entry: free to take any nonzero value.
    Cross,
}

impl EntryKind {
    /// Parses one token: `0`, `*`, `x` (also `X` or `×`).
    pub fn from_token(tok: &str) -> Option<EntryKind> {
        match tok {
            "0" => Some(EntryKind::Zero),
            "*" => Some(EntryKind::Star),
            "x" | "X" | "\u{d7}" => Some(EntryKind::Cross),
            _ => None,
        }
    }

    /// Canonical output token.
    pub fn token(self) -> &'static str {
        match self {
            EntryKind::Zero => "0",
            EntryKind::Star => "*",
            EntryKind::Cross => "x",
        }
    }

    /// True for `Star` and `Cross`.
    pub fn is_indeterminate(self) -> bool {
        !matches!(self, EntryKind::Zero)
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// 1-based position `(i, j)` of an entry in the compound matrix `[A, B]`:
/// `i` ranges over `1..=n`, `j` over `1..=n+m`, columns beyond `n` address `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntryPos(pub usize, pub usize);

impl EntryPos {
    pub fn row(self) -> usize {
        self.0
    }

    pub fn col(self) -> usize {
        self.1
    }
}

impl fmt::Display for EntryPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Error raised while parsing a system description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected header `n m`, found {found:?}")]
    Header { line: usize, found: String },
    #[error("line {line}: n and m must be at least 1")]
    Dimension { line: usize },
    #[error("line {line}, column {col}: unknown token {token:?}")]
    Token {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("line {line}: row {row} of {matrix} has {got} entries, expected {expected}")]
    RowLength {
        line: usize,
        row: usize,
        matrix: char,
        got: usize,
        expected: usize,
    },
    #[error("unexpected end of input: missing row {row} of {matrix}")]
    MissingRow { row: usize, matrix: char },
    #[error("line {line}: unexpected trailing content")]
    Trailing { line: usize },
    #[error("invalid JSON system: {0}")]
    Json(String),
}

/// Error raised by [`StructuredSystem::single_pi_reduction`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("entry {0} is not a cross entry")]
    NotACross(EntryPos),
}

/// A structured system `(A, B)` with `A` of size `n x n` and `B` of size `n x m`.
///
/// All public indexing is 1-based over the compound matrix `[A, B]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct StructuredSystem {
    n: usize,
    m: usize,
    a: Vec<Vec<EntryKind>>,
    b: Vec<Vec<EntryKind>>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    n: usize,
    m: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    #[serde(rename = "B")]
    b: Vec<Vec<String>>,
}

impl TryFrom<RawSystem> for StructuredSystem {
    type Error = ParseError;

    fn try_from(raw: RawSystem) -> Result<Self, ParseError> {
        let parse_grid = |grid: &[Vec<String>], matrix: char, rows: usize, cols: usize| {
            if grid.len() != rows {
                return Err(ParseError::Json(format!(
                    "{matrix} has {} rows, expected {rows}",
                    grid.len()
                )));
            }
            let mut out = Vec::with_capacity(rows);
            for (i, row) in grid.iter().enumerate() {
                if row.len() != cols {
                    return Err(ParseError::Json(format!(
                        "row {} of {matrix} has {} entries, expected {cols}",
                        i + 1,
                        row.len()
                    )));
                }
                let mut parsed = Vec::with_capacity(cols);
                for (j, tok) in row.iter().enumerate() {
                    let kind = EntryKind::from_token(tok).ok_or_else(|| {
                        ParseError::Json(format!(
                            "unknown token {tok:?} at row {}, column {} of {matrix}",
                            i + 1,
                            j + 1
                        ))
                    })?;
                    parsed.push(kind);
                }
                out.push(parsed);
            }
            Ok(out)
        };
        if raw.n < 1 || raw.m < 1 {
            return Err(ParseError::Json("n and m must be at least 1".into()));
        }
        let a = parse_grid(&raw.a, 'A', raw.n, raw.n)?;
        let b = parse_grid(&raw.b, 'B', raw.n, raw.m)?;
        StructuredSystem::new(a, b)
    }
}

impl From<StructuredSystem> for RawSystem {
    fn from(sys: StructuredSystem) -> RawSystem {
        let tokens =
            |grid: &[Vec<EntryKind>]| -> Vec<Vec<String>> {
                grid.iter()
                    .map(|row| row.iter().map(|k| k.token().to_string()).collect())
                    .collect()
            };
        RawSystem {
            n: sys.n,
            m: sys.m,
            a: tokens(&sys.a),
            b: tokens(&sys.b),
        }
    }
}

impl StructuredSystem {
    /// Builds a system from entry grids; `n` and `m` are inferred from the shapes.
    pub fn new(a: Vec<Vec<EntryKind>>, b: Vec<Vec<EntryKind>>) -> Result<Self, ParseError> {
        let n = a.len();
        if n < 1 || b.len() != n {
            return Err(ParseError::Json(format!(
                "A has {n} rows and B has {} rows; both must equal n >= 1",
                b.len()
            )));
        }
        let m = b[0].len();
        if m < 1 {
            return Err(ParseError::Json("m must be at least 1".into()));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(ParseError::Json(format!(
                    "row {} of A has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
        }
        for (i, row) in b.iter().enumerate() {
            if row.len() != m {
                return Err(ParseError::Json(format!(
                    "row {} of B has {} entries, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
        }
        Ok(StructuredSystem { n, m, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> &[Vec<EntryKind>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<EntryKind>] {
        &self.b
    }

    /// Entry of the compound matrix `[A, B]` at a 1-based position.
    pub fn entry(&self, pos: EntryPos) -> EntryKind {
        let EntryPos(i, j) = pos;
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n + self.m).contains(&j),
            "entry position {pos} out of range for n={}, m={}",
            self.n,
            self.m
        );
        if j <= self.n {
            self.a[i - 1][j - 1]
        } else {
            self.b[i - 1][j - self.n - 1]
        }
    }

    /// Returns a copy with the entry at `pos` replaced by `kind`.
    pub fn with_entry(&self, pos: EntryPos, kind: EntryKind) -> StructuredSystem {
        let EntryPos(i, j) = pos;
        self.entry(pos); // range check
        let mut out = self.clone();
        if j <= self.n {
            out.a[i - 1][j - 1] = kind;
        } else {
            out.b[i - 1][j - self.n - 1] = kind;
        }
        out
    }

    fn positions_of(&self, kind: EntryKind) -> Vec<EntryPos> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in 1..=self.n + self.m {
                let pos = EntryPos(i, j);
                if self.entry(pos) == kind {
                    out.push(pos);
                }
            }
        }
        out
    }

    /// `N_x`: positions of all cross entries of `[A, B]`, row-major order.
    pub fn cross_positions(&self) -> Vec<EntryPos> {
        self.positions_of(EntryKind::Cross)
    }

    /// `N_*`: positions of all star entries of `[A, B]`, row-major order.
    pub fn star_positions(&self) -> Vec<EntryPos> {
        self.positions_of(EntryKind::Star)
    }

    /// Positions of all indeterminate (star or cross) entries, row-major order.
    pub fn indeterminate_positions(&self) -> Vec<EntryPos> {
        let mut out = self.star_positions();
        out.extend(self.cross_positions());
        out.sort();
        out
    }

    /// Keeps the cross at `pi` and demotes every other indeterminate entry to
    /// a star; the zero pattern is unchanged.
    pub fn single_pi_reduction(&self, pi: EntryPos) -> Result<StructuredSystem, ReductionError> {
        if self.entry(pi) != EntryKind::Cross {
            return Err(ReductionError::NotACross(pi));
        }
        let mut out = self.clone();
        for pos in self.cross_positions() {
            if pos != pi {
                out = out.with_entry(pos, EntryKind::Star);
            }
        }
        Ok(out)
    }
}

impl FromStr for StructuredSystem {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_system(s)
    }
}

impl fmt::Display for StructuredSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_system(self))
    }
}

/// Parses the line-oriented text format or, when the input starts with `{`,
/// the JSON form.
///
/// Text format: a header line `n m`, then `n` rows of `n` tokens for `A`,
/// then `n` rows of `m` tokens for `B`. Tokens are `0`, `*`, `x`; lines
/// starting with `#` are comments.
pub fn parse_system(text: &str) -> Result<StructuredSystem, ParseError> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => ParseError::Json(e.to_string()),
            _ => ParseError::Json(e.to_string()),
        });
    }

    // Significant lines with their original 1-based line numbers.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });

    let (header_line, header) = lines.next().ok_or(ParseError::Header {
        line: 1,
        found: String::new(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(ParseError::Header {
            line: header_line,
            found: header.trim().to_string(),
        });
    }
    let parse_dim = |s: &str| -> Result<usize, ParseError> {
        s.parse::<usize>().map_err(|_| ParseError::Header {
            line: header_line,
            found: header.trim().to_string(),
        })
    };
    let n = parse_dim(dims[0])?;
    let m = parse_dim(dims[1])?;
    if n < 1 || m < 1 {
        return Err(ParseError::Dimension { line: header_line });
    }

    let mut read_grid = |matrix: char, rows: usize, cols: usize| -> Result<Vec<Vec<EntryKind>>, ParseError> {
        let mut grid = Vec::with_capacity(rows);
        for row in 1..=rows {
            let (line_no, line) = lines.next().ok_or(ParseError::MissingRow { row, matrix })?;
            let mut parsed = Vec::with_capacity(cols);
            let mut count = 0usize;
            for (offset, tok) in split_tokens(line) {
                count += 1;
                if count <= cols {
                    let kind = EntryKind::from_token(tok).ok_or_else(|| ParseError::Token {
                        line: line_no,
                        col: offset + 1,
                        token: tok.to_string(),
                    })?;
                    parsed.push(kind);
                }
            }
            if count != cols {
                return Err(ParseError::RowLength {
                    line: line_no,
                    row,
                    matrix,
                    got: count,
                    expected: cols,
                });
            }
            grid.push(parsed);
        }
        Ok(grid)
    };

    let a = read_grid('A', n, n)?;
    let b = read_grid('B', n, m)?;
    if let Some((line_no, _)) = lines.next() {
        return Err(ParseError::Trailing { line: line_no });
    }
    StructuredSystem::new(a, b)
}

/// Whitespace-separated tokens of a line with their character offsets.
fn split_tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .fold(Vec::<(usize, usize)>::new(), |mut spans, (idx, c)| {
            match spans.last_mut() {
                Some((_, end)) if *end == idx => *end = idx + c.len_utf8(),
                _ => spans.push((idx, idx + c.len_utf8())),
            }
            spans
        })
        .into_iter()
        .map(move |(start, end)| (line[..start].chars().count(), &line[start..end]))
}

/// Emits the canonical text form; `parse_system(emit_system(s)) == s`.
pub fn emit_system(sys: &StructuredSystem) -> String {
    let mut out = format!("{} {}\n", sys.n(), sys.m());
    let push_grid = |out: &mut String, grid: &[Vec<EntryKind>]| {
        for row in grid {
            let tokens: Vec<&str> = row.iter().map(|k| k.token()).collect();
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
    };
    push_grid(&mut out, sys.a());
    push_grid(&mut out, sys.b());
    out
}

/// An exact rational realization of a structured system: the sampled values
/// together with the entry kind each value realizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalRealization {
    n: usize,
    m: usize,
    values: Vec<Vec<BigRational>>,
    provenance: BTreeMap<EntryPos, EntryKind>,
}

impl RationalRealization {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Value of the compound matrix `[A, B]` at a 1-based position.
    pub fn value(&self, pos: EntryPos) -> &BigRational {
        &self.values[pos.0 - 1][pos.1 - 1]
    }

    /// Kind map over the indeterminate entries; zeros are implicit.
    pub fn provenance(&self) -> &BTreeMap<EntryPos, EntryKind> {
        &self.provenance
    }

    /// Returns a copy with the value at `pos` replaced.
    pub fn with_value(&self, pos: EntryPos, value: BigRational) -> RationalRealization {
        let mut out = self.clone();
        out.values[pos.0 - 1][pos.1 - 1] = value;
        out
    }

    /// The `n x n` state-matrix block.
    pub fn a_values(&self) -> Vec<Vec<BigRational>> {
        self.values.iter().map(|row| row[..self.n].to_vec()).collect()
    }

    /// The `n x m` input-matrix block.
    pub fn b_values(&self) -> Vec<Vec<BigRational>> {
        self.values.iter().map(|row| row[self.n..].to_vec()).collect()
    }
}

/// Samples a realization: every indeterminate entry receives an independent
/// uniform random integer in `[1, magnitude]` with a random sign, zeros stay
/// zero. Deterministic for a fixed seed.
///
/// Star entries are sampled nonzero as well: the sampled point stands in for
/// a generic parameter choice, and zero is an atypical value for a generic
/// entry. Requires `magnitude >= 2`.
pub fn sample_realization(
    sys: &StructuredSystem,
    seed: u64,
    magnitude: u64,
) -> RationalRealization {
    assert!(magnitude >= 2, "magnitude must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.n();
    let m = sys.m();
    let mut values = vec![vec![BigRational::zero(); n + m]; n];
    let mut provenance = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n + m {
            let pos = EntryPos(i, j);
            let kind = sys.entry(pos);
            if kind.is_indeterminate() {
                let mag = rng.gen_range(1..=magnitude) as i64;
                let signed = if rng.gen_bool(0.5) { mag } else { -mag };
                values[i - 1][j - 1] = BigRational::from_integer(BigInt::from(signed));
                provenance.insert(pos, kind);
            }
        }
    }
    RationalRealization {
        n,
        m,
        values,
        provenance,
    }
}
