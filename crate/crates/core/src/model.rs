//! Two-block stochastic block model: sufficient statistics, likelihoods and
//! priors.
//!
//! Everything is computed in log space. `0 · ln 0` is taken as 0, so a
//! probability of exactly 0 or 1 only yields `-inf` when an edge (or a
//! non-edge) is actually observed in that block.

use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    One,
    Two,
}

impl Group {
    pub fn flipped(self) -> Self {
        match self {
            Group::One => Group::Two,
            Group::Two => Group::One,
        }
    }

    /// 1 or 2.
    pub fn code(self) -> u8 {
        match self {
            Group::One => 1,
            Group::Two => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Group::One),
            2 => Some(Group::Two),
            _ => None,
        }
    }
}

/// Group assignment of every node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelVector(Vec<Group>);

impl LabelVector {
    pub fn new(groups: Vec<Group>) -> Self {
        Self(groups)
    }

    /// Builds labels from 1/2 codes.
    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        codes
            .iter()
            .map(|&c| {
                Group::from_code(c)
                    .ok_or_else(|| Error::InvalidConfig(format!("label code {c} is not 1 or 2")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn uniform(n: usize, group: Group) -> Self {
        Self(vec![group; n])
    }

    /// Label vector whose bit `i` of `mask` selects group 2 for node `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self(
            (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Group::Two
                    } else {
                        Group::One
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Group {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = self.0[i].flipped();
    }

    pub fn flip_all(&mut self) {
        for g in &mut self.0 {
            *g = g.flipped();
        }
    }

    pub fn count(&self, group: Group) -> usize {
        self.0.iter().filter(|&&g| g == group).count()
    }

    pub fn as_slice(&self) -> &[Group] {
        &self.0
    }

    pub fn codes(&self) -> Vec<u8> {
        self.0.iter().map(|g| g.code()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockProbs {
    pub p11: f64,
    pub p12: f64,
    pub p22: f64,
}

impl BlockProbs {
    pub fn new(p11: f64, p12: f64, p22: f64) -> Result<Self> {
        for (name, value) in [("p11", p11), ("p12", p12), ("p22", p22)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(Self { p11, p12, p22 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p11, self.p12, self.p22]
    }

    /// Exchanges the roles of the two groups.
    pub fn swapped(&self) -> Self {
        Self {
            p11: self.p22,
            p12: self.p12,
            p22: self.p11,
        }
    }
}

/// Sufficient statistics of the SBM likelihood.
///
/// `edges_ab` is the realized number of edges between blocks `a` and `b`,
/// `pairs_ab` the number of node pairs that could carry such an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BlockCounts {
    pub edges11: u64,
    pub edges12: u64,
    pub edges22: u64,
    pub pairs11: u64,
    pub pairs12: u64,
    pub pairs22: u64,
    pub n1: u64,
    pub n2: u64,
}

fn pairs_within(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

impl BlockCounts {
    fn with_sizes(n1: u64, n2: u64, edges: [u64; 3]) -> Self {
        Self {
            edges11: edges[0],
            edges12: edges[1],
            edges22: edges[2],
            pairs11: pairs_within(n1),
            pairs12: n1 * n2,
            pairs22: pairs_within(n2),
            n1,
            n2,
        }
    }

    pub fn edges(&self) -> [u64; 3] {
        [self.edges11, self.edges12, self.edges22]
    }

    pub fn pairs(&self) -> [u64; 3] {
        [self.pairs11, self.pairs12, self.pairs22]
    }

    pub fn total_pairs(&self) -> u64 {
        self.pairs11 + self.pairs12 + self.pairs22
    }

    pub fn swapped(&self) -> Self {
        Self {
            edges11: self.edges22,
            edges12: self.edges12,
            edges22: self.edges11,
            pairs11: self.pairs22,
            pairs12: self.pairs12,
            pairs22: self.pairs11,
            n1: self.n2,
            n2: self.n1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPrior {
    pub a: f64,
    pub b: f64,
}

impl BetaPrior {
    pub const UNIFORM: BetaPrior = BetaPrior { a: 1.0, b: 1.0 };

    pub fn ln_norm(&self) -> f64 {
        ln_beta(self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub prior11: BetaPrior,
    pub prior12: BetaPrior,
    pub prior22: BetaPrior,
    /// Prior probability that node `i` is in group 1.
    pub pi: Vec<f64>,
}

impl Hyperparameters {
    pub fn new(priors: [BetaPrior; 3], pi: Vec<f64>) -> Result<Self> {
        let h = Self {
            prior11: priors[0],
            prior12: priors[1],
            prior22: priors[2],
            pi,
        };
        h.validate()?;
        Ok(h)
    }

    /// Beta(1, 1) on every block probability and `pi_i = pi` for all nodes.
    pub fn uniform(n: usize, pi: f64) -> Result<Self> {
        Self::new([BetaPrior::UNIFORM; 3], vec![pi; n])
    }

    pub fn priors(&self) -> [BetaPrior; 3] {
        [self.prior11, self.prior12, self.prior22]
    }

    pub fn validate(&self) -> Result<()> {
        for (block, prior) in ["11", "12", "22"].iter().zip(self.priors()) {
            if !(prior.a > 0.0 && prior.b > 0.0 && prior.a.is_finite() && prior.b.is_finite()) {
                return Err(Error::InvalidHyperparameters(format!(
                    "Beta shapes for block {block} must be positive, got ({}, {})",
                    prior.a, prior.b
                )));
            }
        }
        if let Some((i, p)) = self
            .pi
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p > 0.0 && p < 1.0))
        {
            return Err(Error::InvalidHyperparameters(format!(
                "pi[{i}] = {p} must lie strictly inside (0, 1)"
            )));
        }
        Ok(())
    }

    /// Whether blocks 11 and 22 share a prior, which makes relabeling the
    /// groups a symmetry of the posterior.
    pub fn is_block_symmetric(&self) -> bool {
        self.prior11 == self.prior22
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.pi.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: self.pi.len(),
            });
        }
        Ok(())
    }
}

fn check_labels(g: &Graph, c: &LabelVector) -> Result<()> {
    if c.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: c.len(),
        });
    }
    Ok(())
}

fn block_index(a: Group, b: Group) -> usize {
    match (a, b) {
        (Group::One, Group::One) => 0,
        (Group::Two, Group::Two) => 2,
        _ => 1,
    }
}

pub fn block_counts(g: &Graph, c: &LabelVector) -> Result<BlockCounts> {
    check_labels(g, c)?;
    let mut edges = [0u64; 3];
    for (i, j) in g.edges() {
        edges[block_index(c.get(i), c.get(j))] += 1;
    }
    let n1 = c.count(Group::One) as u64;
    Ok(BlockCounts::with_sizes(n1, g.n() as u64 - n1, edges))
}

/// `k ln p + (t - k) ln(1 - p)` with `0 ln 0 = 0`.
fn bernoulli_log_term(successes: f64, failures: f64, p: f64) -> f64 {
    let mut total = 0.0;
    if successes != 0.0 {
        total += successes * p.ln();
    }
    if failures != 0.0 {
        total += failures * (-p).ln_1p();
    }
    total
}

pub fn log_likelihood(counts: &BlockCounts, p: &BlockProbs) -> f64 {
    counts
        .edges()
        .iter()
        .zip(counts.pairs())
        .zip(p.as_array())
        .map(|((&e, t), q)| bernoulli_log_term(e as f64, (t - e) as f64, q))
        .sum()
}

/// Change in log-likelihood when node `i` switches group, together with the
/// counts after the switch. Only the neighbors of `i` are visited.
///
/// When both the current and the flipped configuration are impossible under
/// `p` the difference is undefined and NaN is returned.
pub fn log_likelihood_delta(
    g: &Graph,
    c: &LabelVector,
    counts: &BlockCounts,
    p: &BlockProbs,
    i: usize,
) -> Result<(f64, BlockCounts)> {
    check_labels(g, c)?;
    if i >= g.n() {
        return Err(Error::NodeOutOfRange { id: i, n: g.n() });
    }
    let new_counts = flipped_counts(g, c, counts, i);
    Ok((counts_delta(counts, &new_counts, p), new_counts))
}

/// `log_likelihood(new) - log_likelihood(old)` from the count differences.
pub(crate) fn counts_delta(old: &BlockCounts, new: &BlockCounts, p: &BlockProbs) -> f64 {
    let (old_edges, old_pairs) = (old.edges(), old.pairs());
    let (new_edges, new_pairs) = (new.edges(), new.pairs());
    let mut delta = 0.0;
    for (b, q) in p.as_array().into_iter().enumerate() {
        let d_edges = new_edges[b] as f64 - old_edges[b] as f64;
        let d_non_edges =
            (new_pairs[b] - new_edges[b]) as f64 - (old_pairs[b] - old_edges[b]) as f64;
        delta += bernoulli_log_term(d_edges, d_non_edges, q);
    }
    delta
}

/// Counts after flipping node `i`, derived from its neighbor split.
pub(crate) fn flipped_counts(
    g: &Graph,
    c: &LabelVector,
    counts: &BlockCounts,
    i: usize,
) -> BlockCounts {
    let (mut same, mut other) = (0u64, 0u64);
    let own = c.get(i);
    for &j in g.neighbors(i) {
        if c.get(j) == own {
            same += 1;
        } else {
            other += 1;
        }
    }
    // Work in the frame where `i` currently sits in group 1.
    let frame = match own {
        Group::One => *counts,
        Group::Two => counts.swapped(),
    };
    let moved = BlockCounts::with_sizes(
        frame.n1 - 1,
        frame.n2 + 1,
        [
            frame.edges11 - same,
            frame.edges12 + same - other,
            frame.edges22 + other,
        ],
    );
    match own {
        Group::One => moved,
        Group::Two => moved.swapped(),
    }
}

pub fn log_prior_labels(c: &LabelVector, h: &Hyperparameters) -> Result<f64> {
    h.check_len(c.len())?;
    Ok(c.as_slice()
        .iter()
        .zip(&h.pi)
        .map(|(g, &pi)| log_prior_label(*g, pi))
        .sum())
}

pub(crate) fn log_prior_label(g: Group, pi: f64) -> f64 {
    match g {
        Group::One => pi.ln(),
        Group::Two => (-pi).ln_1p(),
    }
}

/// Log of the likelihood integrated against the Beta priors on `p`.
pub fn log_marginal_likelihood(counts: &BlockCounts, h: &Hyperparameters) -> f64 {
    counts
        .edges()
        .iter()
        .zip(counts.pairs())
        .zip(h.priors())
        .map(|((&e, t), prior)| {
            ln_beta(e as f64 + prior.a, (t - e) as f64 + prior.b) - prior.ln_norm()
        })
        .sum()
}
