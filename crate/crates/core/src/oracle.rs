//! Exact-rational brute-force ground truth.
//!
//! For a single-input system, the determinant of the controllability matrix
//! is interpolated as a univariate polynomial in one chosen indeterminate
//! (all others fixed at a seeded random sample); the system is PSSC exactly
//! when the polynomial in each cross parameter is a monomial. For a
//! multi-input system with a single cross, the greatest common divisor of
//! all `n x n` minors of the controllability matrix plays the same role.

use std::cmp::Reverse;

use itertools::Itertools;
use num::{BigInt, BigRational, Integer, One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::pssc::Verdict;
use crate::structured::{sample_realization, EntryPos, RationalRealization, StructuredSystem};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Sampling magnitude for the fixed indeterminates; large enough to make
/// accidental algebraic coincidences negligible.
pub const SAMPLE_MAGNITUDE: u64 = 1_000_000;

const DEFAULT_SEEDS: [u64; 3] = [1, 2, 3];
const MINOR_LIMIT: u128 = 100_000;
const RESEED_ROUNDS: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle path requires a single-input system, got m = {m}")]
    NotSingleInput { m: usize },
    #[error("oracle path requires a multi-input system, got m = 1")]
    NotMultiInput,
    #[error("entry {0} is not an indeterminate entry")]
    NotIndeterminate(EntryPos),
    #[error("expected exactly one cross entry, found {found}")]
    NotSingleCross { found: usize },
    #[error("{count} column subsets exceed the enumeration limit of {limit}")]
    TooManyMinors { count: u128, limit: u128 },
}

/// Dense univariate polynomial with exact rational coefficients; the
/// coefficient index is the degree and the leading coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Builds from `coeffs[k]` = coefficient of degree `k`, trimming leading
    /// zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Degrees with nonzero coefficients, ascending.
    pub fn nonzero_degrees(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, _)| k)
            .collect()
    }

    /// True exactly when the polynomial is `c * t^r` with `c != 0`.
    pub fn is_monomial(&self) -> bool {
        self.nonzero_degrees().len() == 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn monic(&self) -> RationalPoly {
        match self.coeffs.last() {
            None => RationalPoly::zero(),
            Some(lead) => RationalPoly {
                coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
            },
        }
    }

    fn add_scaled(&self, other: &RationalPoly, scale: &Rational) -> RationalPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            coeffs.push(self.coeff(k) + other.coeff(k) * scale);
        }
        RationalPoly::from_coeffs(coeffs)
    }

    /// Multiplies by the linear factor `(t - root)`.
    fn mul_linear(&self, root: &Rational) -> RationalPoly {
        if self.is_zero() {
            return RationalPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k + 1] += c;
            coeffs[k] -= c * root;
        }
        RationalPoly::from_coeffs(coeffs)
    }

    /// Euclidean division; the divisor must be nonzero.
    fn div_rem(&self, divisor: &RationalPoly) -> (RationalPoly, RationalPoly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree().unwrap();
        let lead = divisor.coeffs.last().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![
            Rational::zero();
            self.coeffs.len().saturating_sub(divisor.coeffs.len()) + 1
        ];
        while rem.len() >= divisor.coeffs.len() && !rem.is_empty() {
            let k = rem.len() - 1;
            let factor = rem[k].clone() / lead;
            if factor.is_zero() {
                rem.pop();
                continue;
            }
            let shift = k - dd;
            quot[shift] = factor.clone();
            for (idx, dc) in divisor.coeffs.iter().enumerate() {
                let t = dc * &factor;
                rem[shift + idx] -= t;
            }
            rem.pop();
        }
        (RationalPoly::from_coeffs(quot), RationalPoly::from_coeffs(rem))
    }

    /// Unique interpolating polynomial through distinct-abscissa points, by
    /// Newton's divided differences.
    pub fn interpolate(points: &[(Rational, Rational)]) -> RationalPoly {
        if points.is_empty() {
            return RationalPoly::zero();
        }
        let n = points.len();
        // table[k] holds the k-th order divided difference after pass k.
        let mut table: Vec<Rational> = points.iter().map(|(_, y)| y.clone()).collect();
        let xs: Vec<Rational> = points.iter().map(|(x, _)| x.clone()).collect();
        let mut poly = RationalPoly::constant(table[0].clone());
        let mut basis = RationalPoly::constant(Rational::one());
        for order in 1..n {
            for k in (order..n).rev() {
                let dx = &xs[k] - &xs[k - order];
                assert!(!dx.is_zero(), "interpolation abscissas must be distinct");
                table[k] = (&table[k] - &table[k - 1]) / dx;
            }
            basis = basis.mul_linear(&xs[order - 1]);
            poly = poly.add_scaled(&basis, &table[order]);
        }
        poly
    }
}

/// True exactly when `p` is a single nonzero monomial `c * t^r`.
pub fn monomial_test(p: &RationalPoly) -> bool {
    p.is_monomial()
}

/// Monic greatest common divisor by the Euclidean remainder sequence;
/// `gcd(p, 0)` is the monic form of `p`.
pub fn poly_gcd(a: &RationalPoly, b: &RationalPoly) -> RationalPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

/// Exact determinant of a square rational matrix: denominators are cleared
/// per row, the integer part runs fraction-free Bareiss elimination.
pub fn det_rational(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    for (i, row) in matrix.iter().enumerate() {
        assert!(
            row.len() == n,
            "determinant of a non-square matrix: row {i} has {} entries, expected {n}",
            row.len()
        );
    }
    if n == 0 {
        return Rational::one();
    }
    let mut scale = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in matrix {
        let lcm = row
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        m.push(
            row.iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect(),
        );
        scale *= lcm;
    }
    let det = bareiss_det(&mut m);
    Rational::new(det, scale)
}

fn bareiss_det(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(pivot) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, pivot);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // exact by the Bareiss identity
            }
        }
        prev = m[k][k].clone();
    }
    let det = std::mem::take(&mut m[n - 1][n - 1]);
    if negate {
        -det
    } else {
        det
    }
}

/// Controllability matrix `[B, AB, ..., A^(n-1) B]`, exact.
pub fn ctrb(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n), "A must be square");
    assert!(
        b.len() == n && !b.is_empty(),
        "B must have as many rows as A"
    );
    let m = b[0].len();
    assert!(b.iter().all(|row| row.len() == m), "ragged B");
    let mut out: Vec<Vec<Rational>> = vec![Vec::with_capacity(n * m); n];
    let mut block = b.to_vec();
    for _ in 0..n {
        for (i, row) in out.iter_mut().enumerate() {
            row.extend(block[i].iter().cloned());
        }
        let mut next = vec![vec![Rational::zero(); m]; n];
        for i in 0..n {
            for (k, a_ik) in a[i].iter().enumerate() {
                if a_ik.is_zero() {
                    continue;
                }
                for j in 0..m {
                    next[i][j] += a_ik * &block[k][j];
                }
            }
        }
        block = next;
    }
    out
}

fn rational_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Degree bound for the determinant of a single-input controllability matrix
/// in one entry parameter: an `A` entry reaches degree at most `k` in column
/// `A^k b`, a `b` entry at most one per column.
fn single_input_degree_bound(n: usize) -> usize {
    n * (n - 1) / 2 + n
}

fn det_at_nodes(
    real: &RationalRealization,
    pi: EntryPos,
    nodes: usize,
) -> Vec<(Rational, Rational)> {
    (1..=nodes as i64)
        .map(|t| {
            let x = rational_int(t);
            let r = real.with_value(pi, x.clone());
            let c = ctrb(&r.a_values(), &r.b_values());
            (x, det_rational(&c))
        })
        .collect()
}

fn interp_in_cross_with_nodes(
    sys: &StructuredSystem,
    pi: EntryPos,
    seed: u64,
    nodes: usize,
) -> Result<RationalPoly, OracleError> {
    if sys.m() != 1 {
        return Err(OracleError::NotSingleInput { m: sys.m() });
    }
    if !sys.entry(pi).is_indeterminate() {
        return Err(OracleError::NotIndeterminate(pi));
    }
    let real = sample_realization(sys, seed, SAMPLE_MAGNITUDE);
    Ok(RationalPoly::interpolate(&det_at_nodes(&real, pi, nodes)))
}

/// Fixes every indeterminate except `pi` at a seeded random sample and
/// interpolates `det C(A, b)` as a polynomial in the `pi` parameter.
pub fn interp_in_cross(
    sys: &StructuredSystem,
    pi: EntryPos,
    seed: u64,
) -> Result<RationalPoly, OracleError> {
    interp_in_cross_with_nodes(sys, pi, seed, single_input_degree_bound(sys.n()) + 1)
}

/// Per-cross oracle detail: the nonzero coefficient degrees of the
/// interpolated determinant polynomial and whether it is a monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OraclePiDetail {
    pub pi: EntryPos,
    pub degrees: Vec<usize>,
    pub monomial: bool,
}

/// One oracle evaluation under a fixed seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRun {
    pub seed: u64,
    pub pass: bool,
    /// Evidence that `det C` does not vanish identically under this sample.
    pub sc_witness: bool,
    pub per_pi: Vec<OraclePiDetail>,
    /// Multi-input path only: nonzero coefficient degrees of the minor gcd.
    pub gcd_degrees: Option<Vec<usize>>,
    /// Multi-input path only: count of minors that are not identically zero.
    pub nonzero_minors: Option<usize>,
}

/// Oracle verdict with all executed runs. `seed_stable` records whether the
/// first batch of seeds already agreed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub verdict: Verdict,
    pub seed_stable: bool,
    pub runs: Vec<OracleRun>,
}

impl OracleReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verdict": self.verdict.label(),
            "seed_stable": self.seed_stable,
            "runs": self.runs.iter().map(|r| serde_json::json!({
                "seed": r.seed,
                "pass": r.pass,
                "sc_witness": r.sc_witness,
                "per_pi": r.per_pi.iter().map(|d| serde_json::json!({
                    "pi": [d.pi.row(), d.pi.col()],
                    "degrees": d.degrees,
                    "monomial": d.monomial,
                })).collect::<Vec<_>>(),
                "gcd_degrees": r.gcd_degrees,
                "nonzero_minors": r.nonzero_minors,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "oracle verdict: {} (seed-stable: {})\n",
            self.verdict.label(),
            if self.seed_stable { "yes" } else { "no" }
        );
        for r in &self.runs {
            out.push_str(&format!(
                "  seed {}: {}\n",
                r.seed,
                if r.pass { "pass" } else { "fail" }
            ));
            for d in &r.per_pi {
                out.push_str(&format!(
                    "    pi {}: nonzero degrees {:?}{}\n",
                    d.pi,
                    d.degrees,
                    if d.monomial { " (monomial)" } else { "" }
                ));
            }
            if let Some(gd) = &r.gcd_degrees {
                out.push_str(&format!("    minor gcd nonzero degrees {gd:?}\n"));
            }
        }
        out
    }
}

fn derived_seed(seed: u64, round: u32) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(0x100_0000_01B3u64.wrapping_mul(round as u64))
}

/// Pssc when every run passed; NotPssc when the failure is seed-independent
/// (the SC witness, one cross, or the minor gcd failing under every seed);
/// otherwise undecided within this batch.
fn batch_verdict(runs: &[OracleRun]) -> Option<Verdict> {
    if runs.iter().all(|r| r.pass) {
        return Some(Verdict::Pssc);
    }
    if runs.iter().all(|r| !r.sc_witness) {
        return Some(Verdict::NotPssc);
    }
    if let Some(first) = runs.first() {
        for idx in 0..first.per_pi.len() {
            if runs.iter().all(|r| !r.per_pi[idx].monomial) {
                return Some(Verdict::NotPssc);
            }
        }
        // Multi-input path: the run is a single gcd test.
        if first.gcd_degrees.is_some() && runs.iter().all(|r| !r.pass) {
            return Some(Verdict::NotPssc);
        }
    }
    None
}

fn run_seeds<F>(seeds: &[u64], run_one: F) -> OracleReport
where
    F: Fn(u64) -> OracleRun,
{
    let seeds: Vec<u64> = if seeds.is_empty() {
        DEFAULT_SEEDS.to_vec()
    } else {
        seeds.to_vec()
    };
    let mut runs: Vec<OracleRun> = seeds.iter().map(|&s| run_one(s)).collect();
    let first = batch_verdict(&runs);
    if let Some(verdict) = first {
        return OracleReport {
            verdict,
            seed_stable: true,
            runs,
        };
    }
    // A disagreement means some sample hit the measure-zero exceptional set;
    // retry on freshly derived seeds.
    for round in 1..=RESEED_ROUNDS {
        let fresh: Vec<OracleRun> = seeds
            .iter()
            .map(|&s| run_one(derived_seed(s, round)))
            .collect();
        let verdict = batch_verdict(&fresh);
        runs.extend(fresh);
        if let Some(verdict) = verdict {
            return OracleReport {
                verdict,
                seed_stable: false,
                runs,
            };
        }
    }
    OracleReport {
        verdict: Verdict::Inconclusive,
        seed_stable: false,
        runs,
    }
}

fn single_run(sys: &StructuredSystem, seed: u64) -> OracleRun {
    let real = sample_realization(sys, seed, SAMPLE_MAGNITUDE);
    let nodes = single_input_degree_bound(sys.n()) + 1;
    let crosses = sys.cross_positions();
    let stars = sys.star_positions();
    let mut pass = true;
    let per_pi: Vec<OraclePiDetail> = crosses
        .iter()
        .map(|&pi| {
            let poly = RationalPoly::interpolate(&det_at_nodes(&real, pi, nodes));
            let monomial = poly.is_monomial();
            pass &= monomial;
            OraclePiDetail {
                pi,
                degrees: poly.nonzero_degrees(),
                monomial,
            }
        })
        .collect();
    let mut sc_witness = true;
    for &pi in &stars {
        let poly = RationalPoly::interpolate(&det_at_nodes(&real, pi, nodes));
        sc_witness &= !poly.is_zero();
    }
    if crosses.is_empty() && stars.is_empty() {
        let c = ctrb(&real.a_values(), &real.b_values());
        sc_witness = !det_rational(&c).is_zero();
    }
    pass &= sc_witness;
    OracleRun {
        seed,
        pass,
        sc_witness,
        per_pi,
        gcd_degrees: None,
        nonzero_minors: None,
    }
}

/// Single-input oracle: each cross parameter must yield a monomial
/// determinant polynomial, each star parameter a nonzero one. Verdicts are
/// combined across seeds; disagreements trigger deterministic reseeding.
pub fn oracle_pssc_single(
    sys: &StructuredSystem,
    seeds: &[u64],
) -> Result<OracleReport, OracleError> {
    if sys.m() != 1 {
        return Err(OracleError::NotSingleInput { m: sys.m() });
    }
    Ok(run_seeds(seeds, |seed| single_run(sys, seed)))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Per-column degree bound of one minor in the cross parameter: an `A` entry
/// reaches degree at most `k` in a column of block `A^k B`; a `B` entry of
/// input `l` reaches degree one exactly in the columns of input `l`.
fn multi_column_bounds(n: usize, m: usize, pi: EntryPos) -> Vec<usize> {
    (0..n * m)
        .map(|c| {
            let block = c / m;
            let input = c % m;
            if pi.col() <= n {
                block
            } else {
                usize::from(input == pi.col() - n - 1)
            }
        })
        .collect()
}

fn multi_run(sys: &StructuredSystem, pi: EntryPos, seed: u64) -> OracleRun {
    let n = sys.n();
    let m = sys.m();
    let real = sample_realization(sys, seed, SAMPLE_MAGNITUDE);
    let bounds = multi_column_bounds(n, m, pi);
    let mut sorted = bounds.clone();
    sorted.sort_unstable_by_key(|&b| Reverse(b));
    let dmax: usize = sorted.iter().take(n).sum();

    // One controllability matrix per interpolation node.
    let mats: Vec<Vec<Vec<Rational>>> = (1..=dmax as i64 + 1)
        .map(|t| {
            let r = real.with_value(pi, rational_int(t));
            ctrb(&r.a_values(), &r.b_values())
        })
        .collect();

    let mut gcd = RationalPoly::zero();
    let mut nonzero_minors = 0usize;
    // Lexicographic column subsets, interpolated in parallel chunks; the gcd
    // fold stays sequential so the constant-gcd early exit is exact.
    let subsets: Vec<Vec<usize>> = (0..n * m).combinations(n).collect();
    'outer: for chunk in subsets.chunks(64) {
        let polys: Vec<RationalPoly> = chunk
            .par_iter()
            .map(|subset| {
                let d: usize = subset.iter().map(|&c| bounds[c]).sum();
                let points: Vec<(Rational, Rational)> = (0..=d)
                    .map(|node| {
                        let sub: Vec<Vec<Rational>> = (0..n)
                            .map(|i| subset.iter().map(|&c| mats[node][i][c].clone()).collect())
                            .collect();
                        (rational_int(node as i64 + 1), det_rational(&sub))
                    })
                    .collect();
                RationalPoly::interpolate(&points)
            })
            .collect();
        for poly in polys {
            if poly.is_zero() {
                continue;
            }
            nonzero_minors += 1;
            gcd = poly_gcd(&gcd, &poly);
            if gcd.degree() == Some(0) {
                break 'outer; // gcd is the constant 1; it divides every minor
            }
        }
    }

    let sc_witness = nonzero_minors > 0;
    let pass = sc_witness && gcd.is_monomial();
    OracleRun {
        seed,
        pass,
        sc_witness,
        per_pi: Vec::new(),
        gcd_degrees: Some(gcd.nonzero_degrees()),
        nonzero_minors: Some(nonzero_minors),
    }
}

/// Multi-input oracle for a system whose single cross sits at position `pi`:
/// the gcd of all `n x n` minors of the controllability matrix, interpolated
/// in the cross parameter, must be a monomial.
pub fn oracle_pssc_multi_single_cross(
    sys: &StructuredSystem,
    seeds: &[u64],
) -> Result<OracleReport, OracleError> {
    if sys.m() < 2 {
        return Err(OracleError::NotMultiInput);
    }
    let crosses = sys.cross_positions();
    if crosses.len() != 1 {
        return Err(OracleError::NotSingleCross {
            found: crosses.len(),
        });
    }
    let count = binomial((sys.n() * sys.m()) as u128, sys.n() as u128);
    if count > MINOR_LIMIT {
        return Err(OracleError::TooManyMinors {
            count,
            limit: MINOR_LIMIT,
        });
    }
    let pi = crosses[0];
    Ok(run_seeds(seeds, |seed| multi_run(sys, pi, seed)))
}
