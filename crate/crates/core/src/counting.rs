//! Exact counts of labeled graphs by color-class partition.
//!
//! Every count here is a power of two, so counts are carried as exponents and
//! compared with integer arithmetic. Big integers appear only when a value is
//! rendered for people.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{capacity, graph_from_word, positions};
use crate::coloring::ChromaticSolver;

/// Largest order for which [`oracle_spectrum`] walks every labeled graph.
pub const SPECTRUM_ORACLE_MAX_ORDER: usize = 7;
/// Largest order for which [`oracle_fixed_partition_count`] runs.
pub const PARTITION_ORACLE_MAX_ORDER: usize = 6;
/// Up to this order [`gamma_max`] scans every partition; above it the
/// balanced partition is taken directly.
pub const GAMMA_MAX_SCAN_LIMIT: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("need 1 <= n <= m, got m = {m}, n = {n}")]
    PartsOutOfRange { m: usize, n: usize },
    #[error("order must be at least {min}, got {m}")]
    OrderTooSmall { m: usize, min: usize },
    #[error("order {m} exceeds the brute-force limit of {max}")]
    OrderTooLarge { m: usize, max: usize },
    #[error("partition parts must be positive and nonempty")]
    InvalidPartition,
    #[error("partition sums to {sum}, expected {m}")]
    PartitionSum { sum: usize, m: usize },
    #[error("cross-pair sum {literal} disagrees with C(m,2) - sum C(x,2) = {identity}")]
    IdentityViolation { literal: u64, identity: u64 },
}

/// The exact count `2^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PowerOfTwoCount {
    pub exponent: u64,
}

impl PowerOfTwoCount {
    pub fn to_biguint(self) -> BigUint {
        BigUint::from(1u8) << self.exponent
    }
}

impl fmt::Display for PowerOfTwoCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}", self.exponent)
    }
}

/// The probability `2^-neg_exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicProbability {
    pub neg_exponent: u64,
}

impl DyadicProbability {
    pub fn to_f64(self) -> f64 {
        (-(self.neg_exponent as f64)).exp2()
    }
}

// Larger exponent means smaller probability.
impl PartialOrd for DyadicProbability {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicProbability {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.neg_exponent.cmp(&self.neg_exponent)
    }
}

impl fmt::Display for DyadicProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.neg_exponent == 0 {
            f.write_str("1")
        } else {
            write!(f, "2^-{}", self.neg_exponent)
        }
    }
}

/// Color-class sizes in nonincreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionSpec {
    parts: Vec<usize>,
}

impl PartitionSpec {
    /// Accepts the sizes in any order and sorts them.
    pub fn new(mut parts: Vec<usize>) -> Result<Self, CountingError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(CountingError::InvalidPartition);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    /// Parts of sizes ⌈m/n⌉ and ⌊m/n⌋ summing to `m`.
    pub fn balanced(m: usize, n: usize) -> Result<Self, CountingError> {
        check_parts(m, n)?;
        let (q, r) = (m / n, m % n);
        Self::new((0..n).map(|i| if i < r { q + 1 } else { q }).collect())
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn order(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_balanced(&self) -> bool {
        self.parts[0] - self.parts[self.parts.len() - 1] <= 1
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_parts(m: usize, n: usize) -> Result<(), CountingError> {
    if n == 0 || n > m {
        Err(CountingError::PartsOutOfRange { m, n })
    } else {
        Ok(())
    }
}

const fn choose2(x: usize) -> u64 {
    (x as u64) * (x as u64).saturating_sub(1) / 2
}

/// Number of labeled graphs on `m` vertices.
pub fn gamma_total(m: usize) -> PowerOfTwoCount {
    PowerOfTwoCount { exponent: choose2(m) }
}

/// Calls `f` on every partition of `m` into exactly `n` parts, in
/// reverse-lexicographic order, without allocating a list.
pub fn for_each_partition(m: usize, n: usize, mut f: impl FnMut(&[usize])) -> Result<(), CountingError> {
    check_parts(m, n)?;
    let mut buf = Vec::with_capacity(n);
    fill(m, n, m, &mut buf, &mut f);
    Ok(())
}

fn fill(rest: usize, slots: usize, cap: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if slots == 0 {
        if rest == 0 {
            f(buf);
        }
        return;
    }
    // The first part is at least ceil(rest/slots) and leaves >= 1 per remaining slot.
    let hi = cap.min(rest - (slots - 1));
    let lo = rest.div_ceil(slots);
    for x in (lo..=hi).rev() {
        buf.push(x);
        fill(rest - x, slots - 1, x, buf, f);
        buf.pop();
    }
}

pub fn partitions_into(m: usize, n: usize) -> Result<Vec<PartitionSpec>, CountingError> {
    let mut out = Vec::new();
    for_each_partition(m, n, |p| out.push(PartitionSpec { parts: p.to_vec() }))?;
    Ok(out)
}

/// Vertex pairs lying in different classes, summed class by class as
/// `(x₂+…+x_n)x₁ + (x₃+…+x_n)x₂ + … + x_n·x_{n−1}` and checked against
/// `C(m,2) − Σ C(xᵢ,2)`.
pub fn cross_pairs_exponent(p: &PartitionSpec) -> Result<u64, CountingError> {
    cross_pairs(&p.parts)
}

fn cross_pairs(parts: &[usize]) -> Result<u64, CountingError> {
    let mut suffix: u64 = parts.iter().map(|&x| x as u64).sum();
    let mut literal = 0u64;
    for &x in parts {
        suffix -= x as u64;
        literal += suffix * x as u64;
    }
    let m: usize = parts.iter().sum();
    let identity = choose2(m) - parts.iter().map(|&x| choose2(x)).sum::<u64>();
    if literal != identity {
        return Err(CountingError::IdentityViolation { literal, identity });
    }
    Ok(literal)
}

/// Graphs for which a fixed assignment of vertices to classes of sizes `p`
/// is a proper coloring: every cross-class pair is free, every intra-class
/// pair is absent.
pub fn gamma_partition(p: &PartitionSpec) -> Result<PowerOfTwoCount, CountingError> {
    Ok(PowerOfTwoCount { exponent: cross_pairs_exponent(p)? })
}

/// Maximum of [`gamma_partition`] over all partitions of `m` into `n` parts,
/// with its argmax.
///
/// The argmax is always the balanced partition: C(x,2) is convex, so moving a
/// vertex from a larger class to a smaller one never lowers the cross-pair
/// count. Up to [`GAMMA_MAX_SCAN_LIMIT`] the scan confirms this and panics on
/// disagreement.
pub fn gamma_max(m: usize, n: usize) -> Result<(PowerOfTwoCount, PartitionSpec), CountingError> {
    let balanced = PartitionSpec::balanced(m, n)?;
    let balanced_exp = cross_pairs_exponent(&balanced)?;
    if m <= GAMMA_MAX_SCAN_LIMIT {
        let mut best: Option<(u64, Vec<usize>)> = None;
        let mut failure = None;
        for_each_partition(m, n, |parts| match cross_pairs(parts) {
            Ok(e) if best.as_ref().is_none_or(|(b, _)| e > *b) => best = Some((e, parts.to_vec())),
            Ok(_) => {}
            Err(err) => failure = Some(err),
        })?;
        if let Some(err) = failure {
            return Err(err);
        }
        let (exp, parts) = best.expect("at least one partition exists");
        assert_eq!(
            (exp, parts.as_slice()),
            (balanced_exp, balanced.parts()),
            "maximising partition is not the balanced one for m={m}, n={n}"
        );
    }
    Ok((PowerOfTwoCount { exponent: balanced_exp }, balanced))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremCheck {
    /// m − n.
    pub y: u64,
    pub holds: bool,
    pub equality: bool,
}

/// Checks `Γ(m) ≥ 2^y · Γ(m, n)` with `y = m − n` in exponent form.
pub fn verify_theorem_bound(m: usize, n: usize) -> Result<TheoremCheck, CountingError> {
    let (max, _) = gamma_max(m, n)?;
    let y = (m - n) as u64;
    let total = gamma_total(m).exponent;
    let rhs = y + max.exponent;
    Ok(TheoremCheck { y, holds: total >= rhs, equality: total == rhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Bound {
    /// Γ(m, n) / Γ(m).
    pub p1: DyadicProbability,
    /// 2^-(m−n).
    pub bound: DyadicProbability,
}

pub fn p1_bound(m: usize, n: usize) -> Result<P1Bound, CountingError> {
    let (max, _) = gamma_max(m, n)?;
    let p1 = DyadicProbability { neg_exponent: gamma_total(m).exponent - max.exponent };
    let bound = DyadicProbability { neg_exponent: (m - n) as u64 };
    debug_assert!(p1 <= bound);
    Ok(P1Bound { p1, bound })
}

/// Payload bits carried per check symbol: `C(m,2) / m = (m − 1)/2`.
pub fn overhead_ratio(m: usize) -> Result<Ratio<u64>, CountingError> {
    if m < 2 {
        return Err(CountingError::OrderTooSmall { m, min: 2 });
    }
    Ok(Ratio::new(capacity(m) as u64, m as u64))
}

/// Number of labeled graphs of order `m` with each chromatic number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChromaticSpectrum {
    pub m: usize,
    /// `counts[n - 1]` graphs have χ = n.
    pub counts: Vec<u64>,
}

impl ChromaticSpectrum {
    pub fn count(&self, n: usize) -> u64 {
        self.counts[n - 1]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Graphs with χ ≤ n, i.e. the n-colorable ones.
    pub fn at_most(&self, n: usize) -> u64 {
        self.counts[..n.min(self.m)].iter().sum()
    }
}

pub fn oracle_spectrum(m: usize) -> Result<ChromaticSpectrum, CountingError> {
    if m == 0 {
        return Err(CountingError::OrderTooSmall { m, min: 1 });
    }
    if m > SPECTRUM_ORACLE_MAX_ORDER {
        return Err(CountingError::OrderTooLarge { m, max: SPECTRUM_ORACLE_MAX_ORDER });
    }
    let solver = ChromaticSolver::with_max_order(m);
    let graphs = 1u64 << capacity(m);
    let counts = (0..graphs)
        .into_par_iter()
        .fold(
            || vec![0u64; m],
            |mut acc, word| {
                let cert = solver.chromatic_number(&graph_from_word(m, word)).expect("order within guard");
                acc[cert.n - 1] += 1;
                acc
            },
        )
        .reduce(|| vec![0u64; m], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    Ok(ChromaticSpectrum { m, counts })
}

/// Class index of each vertex when classes of sizes `p` are laid out over
/// `1..=m` in order: the first `x₁` vertices form class 0, and so on.
pub fn canonical_classes(p: &PartitionSpec) -> Vec<usize> {
    p.parts.iter().enumerate().flat_map(|(c, &x)| std::iter::repeat_n(c, x)).collect()
}

/// Brute-force count of order-`m` graphs properly colored by the canonical
/// class assignment of `p`.
pub fn oracle_fixed_partition_count(m: usize, p: &PartitionSpec) -> Result<u64, CountingError> {
    if m > PARTITION_ORACLE_MAX_ORDER {
        return Err(CountingError::OrderTooLarge { m, max: PARTITION_ORACLE_MAX_ORDER });
    }
    if p.order() != m {
        return Err(CountingError::PartitionSum { sum: p.order(), m });
    }
    let class = canonical_classes(p);
    let clash_mask: u64 = positions(m)
        .filter(|pos| class[pos.row - 1] == class[pos.col - 1])
        .fold(0, |acc, pos| acc | 1 << pos.index);
    Ok((0..1u64 << capacity(m)).filter(|word| word & clash_mask == 0).count() as u64)
}
