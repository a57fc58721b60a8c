//! MCMC over node labels and block probabilities.
//!
//! One iteration is a Metropolis sweep that proposes flipping each node's
//! group in a fresh random order, followed by a conjugate Beta draw of
//! `(p11, p12, p22)` and a relabeling pass that keeps `p11 >= p22`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{
    block_counts, counts_delta, flipped_counts, log_likelihood, log_prior_label, BetaPrior,
    BlockCounts, BlockProbs, Group, Hyperparameters, LabelVector,
};

pub type ChainRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    RandomLabels,
    DegreeSplit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub total_samples: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub init: Init,
    pub chains: usize,
    /// Tally how often each node pair shares a group (O(n^2) memory).
    pub coassign: bool,
    /// Keep every retained label vector.
    pub store_labels: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            total_samples: 15_000,
            burn_in: 5_000,
            thin: 1,
            seed: 1,
            init: Init::RandomLabels,
            chains: 1,
            coassign: false,
            store_labels: false,
        }
    }
}

impl ChainConfig {
    pub fn new(total_samples: usize, burn_in: usize, seed: u64) -> Self {
        Self {
            total_samples,
            burn_in,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_samples == 0 {
            return Err(Error::InvalidConfig(
                "total samples must be positive".into(),
            ));
        }
        if self.burn_in >= self.total_samples {
            return Err(Error::InvalidConfig(format!(
                "burn-in ({}) must be smaller than the number of samples ({})",
                self.burn_in, self.total_samples
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be at least 1".into()));
        }
        if self.chains == 0 {
            return Err(Error::InvalidConfig(
                "at least one chain is required".into(),
            ));
        }
        Ok(())
    }

    /// Retained draws per chain.
    pub fn retained(&self) -> usize {
        (self.total_samples - self.burn_in) / self.thin
    }
}

/// Independent stream `chain_index` of the generator seeded with `seed`.
pub fn chain_rng(seed: u64, chain_index: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain_index);
    rng
}

/// Current labels and probabilities with their cached statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub labels: LabelVector,
    pub probs: BlockProbs,
    pub counts: BlockCounts,
    pub log_lik: f64,
}

impl ChainState {
    pub fn new(g: &Graph, labels: LabelVector, probs: BlockProbs) -> Result<Self> {
        let counts = block_counts(g, &labels)?;
        let log_lik = log_likelihood(&counts, &probs);
        Ok(Self {
            labels,
            probs,
            counts,
            log_lik,
        })
    }
}

fn beta_draw<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    let dist = Beta::new(a, b).map_err(|e| {
        Error::Numerical(format!("Beta({a}, {b}) is not a valid distribution: {e}"))
    })?;
    Ok(dist.sample(rng))
}

fn median(values: &mut [usize]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

fn initial_labels<R: Rng + ?Sized>(
    g: &Graph,
    h: &Hyperparameters,
    init: Init,
    rng: &mut R,
) -> LabelVector {
    match init {
        Init::RandomLabels => LabelVector::new(
            h.pi.iter()
                .map(|&pi| {
                    if rng.random::<f64>() < pi {
                        Group::One
                    } else {
                        Group::Two
                    }
                })
                .collect(),
        ),
        Init::DegreeSplit => {
            let degrees = g.degrees();
            if degrees.is_empty() {
                return LabelVector::new(Vec::new());
            }
            let cut = median(&mut degrees.clone());
            LabelVector::new(
                degrees
                    .iter()
                    .map(|&d| {
                        if d as f64 >= cut {
                            Group::One
                        } else {
                            Group::Two
                        }
                    })
                    .collect(),
            )
        }
    }
}

/// Draws the starting labels and probabilities. `p` comes from its prior.
pub fn init_chain<R: Rng + ?Sized>(
    g: &Graph,
    h: &Hyperparameters,
    init: Init,
    rng: &mut R,
) -> Result<ChainState> {
    h.validate()?;
    h.check_len(g.n())?;
    let labels = initial_labels(g, h, init, rng);
    let draw = |prior: BetaPrior, rng: &mut R| beta_draw(prior.a, prior.b, rng);
    let probs = BlockProbs {
        p11: draw(h.prior11, rng)?,
        p12: draw(h.prior12, rng)?,
        p22: draw(h.prior22, rng)?,
    };
    let mut state = ChainState::new(g, labels, probs)?;
    enforce_identifiability(&mut state);
    Ok(state)
}

/// One Metropolis pass over all nodes in random order. Returns the number of
/// accepted flips.
pub fn label_sweep<R: Rng + ?Sized>(
    state: &mut ChainState,
    g: &Graph,
    h: &Hyperparameters,
    order: &mut Vec<usize>,
    rng: &mut R,
) -> usize {
    order.clear();
    order.extend(0..g.n());
    order.shuffle(rng);

    let probs = state.probs;
    let mut accepted = 0;
    for &i in order.iter() {
        let current = state.labels.get(i);
        let new_counts = flipped_counts(g, &state.labels, &state.counts, i);
        let delta = counts_delta(&state.counts, &new_counts, &probs);
        let log_ratio =
            delta + log_prior_label(current.flipped(), h.pi[i]) - log_prior_label(current, h.pi[i]);
        let accept = log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio;
        if accept {
            state.labels.flip(i);
            state.counts = new_counts;
            state.log_lik += delta;
            accepted += 1;
        }
    }
    accepted
}

/// Conjugate draw of every block probability given the current labels.
pub fn gibbs_update_probs<R: Rng + ?Sized>(
    state: &mut ChainState,
    h: &Hyperparameters,
    rng: &mut R,
) -> Result<()> {
    let c = &state.counts;
    let draw = |edges: u64, pairs: u64, prior: BetaPrior, rng: &mut R| {
        beta_draw(
            edges as f64 + prior.a,
            (pairs - edges) as f64 + prior.b,
            rng,
        )
    };
    state.probs = BlockProbs {
        p11: draw(c.edges11, c.pairs11, h.prior11, rng)?,
        p12: draw(c.edges12, c.pairs12, h.prior12, rng)?,
        p22: draw(c.edges22, c.pairs22, h.prior22, rng)?,
    };
    state.log_lik = log_likelihood(&state.counts, &state.probs);
    Ok(())
}

/// Renames the groups when `p11 < p22`. Returns whether a relabel happened.
pub fn enforce_identifiability(state: &mut ChainState) -> bool {
    if state.probs.p11 >= state.probs.p22 {
        return false;
    }
    state.labels.flip_all();
    state.probs = state.probs.swapped();
    state.counts = state.counts.swapped();
    true
}

/// Per-chain bookkeeping kept alongside the pooled tallies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSummary {
    pub chain_index: usize,
    pub retained: usize,
    pub label_tally: Vec<u64>,
    pub size_tally: Vec<u64>,
    pub accepted_swaps: u64,
    pub proposed_swaps: u64,
}

/// Retained draws and tallies, pooled over chains in chain order.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    pub n: usize,
    pub retained: usize,
    pub draws: Vec<BlockProbs>,
    pub log_lik: Vec<f64>,
    /// Per node: retained draws with the node in group 1.
    pub label_tally: Vec<u64>,
    /// Histogram of the group-1 size, indexed `0..=n`.
    pub size_tally: Vec<u64>,
    /// Upper triangle (row-major, `i < j`) of same-group counts.
    pub coassign_tally: Option<Vec<u64>>,
    pub labels: Option<Vec<LabelVector>>,
    pub accepted_swaps: u64,
    pub proposed_swaps: u64,
    pub chains: Vec<ChainSummary>,
}

pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl PosteriorSamples {
    fn empty(n: usize, chain_index: usize, cfg: &ChainConfig) -> Self {
        let capacity = cfg.retained();
        Self {
            n,
            retained: 0,
            draws: Vec::with_capacity(capacity),
            log_lik: Vec::with_capacity(capacity),
            label_tally: vec![0; n],
            size_tally: vec![0; n + 1],
            coassign_tally: cfg.coassign.then(|| vec![0; n * n.saturating_sub(1) / 2]),
            labels: cfg.store_labels.then(|| Vec::with_capacity(capacity)),
            accepted_swaps: 0,
            proposed_swaps: 0,
            chains: vec![ChainSummary {
                chain_index,
                retained: 0,
                label_tally: Vec::new(),
                size_tally: Vec::new(),
                accepted_swaps: 0,
                proposed_swaps: 0,
            }],
        }
    }

    /// Builds a sample set directly from draws, with tallies left empty.
    /// Useful for summarizing externally produced chains.
    pub fn from_draws(n: usize, draws: Vec<BlockProbs>) -> Self {
        let retained = draws.len();
        Self {
            n,
            retained,
            log_lik: vec![0.0; retained],
            draws,
            label_tally: vec![0; n],
            size_tally: vec![0; n + 1],
            coassign_tally: None,
            labels: None,
            accepted_swaps: 0,
            proposed_swaps: 0,
            chains: Vec::new(),
        }
    }

    fn record(&mut self, state: &ChainState) {
        self.retained += 1;
        self.draws.push(state.probs);
        self.log_lik.push(state.log_lik);
        let labels = state.labels.as_slice();
        for (tally, g) in self.label_tally.iter_mut().zip(labels) {
            if *g == Group::One {
                *tally += 1;
            }
        }
        self.size_tally[state.counts.n1 as usize] += 1;
        if let Some(co) = &mut self.coassign_tally {
            let n = self.n;
            for i in 0..n {
                for j in i + 1..n {
                    if labels[i] == labels[j] {
                        co[pair_index(n, i, j)] += 1;
                    }
                }
            }
        }
        if let Some(stored) = &mut self.labels {
            stored.push(state.labels.clone());
        }
    }

    fn seal_chain(&mut self) {
        let chain = &mut self.chains[0];
        chain.retained = self.retained;
        chain.label_tally = self.label_tally.clone();
        chain.size_tally = self.size_tally.clone();
        chain.accepted_swaps = self.accepted_swaps;
        chain.proposed_swaps = self.proposed_swaps;
    }

    /// Concatenates sample sets in the given order.
    pub fn pool(parts: Vec<PosteriorSamples>) -> Result<Self> {
        let mut parts = parts.into_iter();
        let mut pooled = parts.next().ok_or(Error::EmptySamples)?;
        for part in parts {
            if part.n != pooled.n {
                return Err(Error::LengthMismatch {
                    expected: pooled.n,
                    got: part.n,
                });
            }
            pooled.retained += part.retained;
            pooled.draws.extend(part.draws);
            pooled.log_lik.extend(part.log_lik);
            add_assign(&mut pooled.label_tally, &part.label_tally);
            add_assign(&mut pooled.size_tally, &part.size_tally);
            pooled.coassign_tally = match (pooled.coassign_tally.take(), part.coassign_tally) {
                (Some(mut a), Some(b)) => {
                    add_assign(&mut a, &b);
                    Some(a)
                }
                _ => None,
            };
            pooled.labels = match (pooled.labels.take(), part.labels) {
                (Some(mut a), Some(b)) => {
                    a.extend(b);
                    Some(a)
                }
                _ => None,
            };
            pooled.accepted_swaps += part.accepted_swaps;
            pooled.proposed_swaps += part.proposed_swaps;
            pooled.chains.extend(part.chains);
        }
        Ok(pooled)
    }

    /// Fraction of accepted label flips after burn-in.
    pub fn swap_acceptance_rate(&self) -> f64 {
        if self.proposed_swaps == 0 {
            0.0
        } else {
            self.accepted_swaps as f64 / self.proposed_swaps as f64
        }
    }

    /// Draws belonging to the `k`-th pooled chain.
    pub fn chain_draws(&self, k: usize) -> &[BlockProbs] {
        let start: usize = self.chains[..k].iter().map(|c| c.retained).sum();
        &self.draws[start..start + self.chains[k].retained]
    }
}

fn add_assign(acc: &mut [u64], other: &[u64]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// Runs chain `chain_index` of `cfg` on its own RNG stream.
pub fn run_single_chain(
    g: &Graph,
    h: &Hyperparameters,
    cfg: &ChainConfig,
    chain_index: usize,
) -> Result<PosteriorSamples> {
    cfg.validate()?;
    let mut rng = chain_rng(cfg.seed, chain_index as u64);
    let mut state = init_chain(g, h, cfg.init, &mut rng)?;
    let mut samples = PosteriorSamples::empty(g.n(), chain_index, cfg);
    let mut order = Vec::with_capacity(g.n());

    for iteration in 0..cfg.total_samples {
        let accepted = label_sweep(&mut state, g, h, &mut order, &mut rng);
        gibbs_update_probs(&mut state, h, &mut rng)?;
        enforce_identifiability(&mut state);

        if iteration < cfg.burn_in {
            continue;
        }
        samples.accepted_swaps += accepted as u64;
        samples.proposed_swaps += g.n() as u64;
        if (iteration - cfg.burn_in + 1).is_multiple_of(cfg.thin) {
            samples.record(&state);
        }
    }
    samples.seal_chain();
    Ok(samples)
}

/// Runs `cfg.chains` independent chains (in parallel) and pools them in
/// chain order.
pub fn run_chain(g: &Graph, h: &Hyperparameters, cfg: &ChainConfig) -> Result<PosteriorSamples> {
    cfg.validate()?;
    h.validate()?;
    h.check_len(g.n())?;
    if !h.is_block_symmetric() {
        log::warn!(
            "priors on p11 and p22 differ; relabeling to keep p11 >= p22 assumes they are equal"
        );
    }
    if h.pi.iter().any(|&pi| pi != 0.5) {
        log::warn!(
            "label prior is not 1/2 everywhere; relabeling to keep p11 >= p22 assumes it is"
        );
    }
    let parts = (0..cfg.chains)
        .into_par_iter()
        .map(|k| run_single_chain(g, h, cfg, k))
        .collect::<Result<Vec<_>>>()?;
    PosteriorSamples::pool(parts)
}
