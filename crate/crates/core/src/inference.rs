//! Posterior summaries: structure probabilities, node membership,
//! co-assignment, group sizes and block-probability densities.
//!
//! Also hosts the exact enumeration posterior used to validate the sampler on
//! small graphs.

use std::collections::HashMap;

use serde::Serialize;
use statrs::function::beta::{beta_reg, ln_beta};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{
    block_counts, log_marginal_likelihood, log_prior_labels, BetaPrior, BlockCounts, BlockProbs,
    Hyperparameters, LabelVector,
};
use crate::sampler::{pair_index, PosteriorSamples};

/// Largest graph the enumeration posterior accepts (2^n label vectors).
pub const MAX_EXACT_NODES: usize = 14;
pub const DEFAULT_QUADRATURE_POINTS: usize = 4097;
pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Assortative,
    CorePeriphery,
    Disassortative,
}

/// Assortative when `p12` is strictly below both within-block
/// probabilities, disassortative when strictly above both, core-periphery
/// otherwise (ties included). Symmetric in `p11` and `p22`.
pub fn classify_draw(p: &BlockProbs) -> Structure {
    let lo = p.p11.min(p.p22);
    let hi = p.p11.max(p.p22);
    if p.p12 < lo {
        Structure::Assortative
    } else if p.p12 > hi {
        Structure::Disassortative
    } else {
        Structure::CorePeriphery
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainVerdict {
    pub chain_index: usize,
    pub p_assortative: f64,
    pub p_core_periphery: f64,
    pub p_disassortative: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureVerdict {
    pub p_assortative: f64,
    pub p_core_periphery: f64,
    pub p_disassortative: f64,
    pub n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_chain: Option<Vec<ChainVerdict>>,
}

impl StructureVerdict {
    pub fn as_array(&self) -> [f64; 3] {
        [
            self.p_assortative,
            self.p_core_periphery,
            self.p_disassortative,
        ]
    }

    pub fn total_variation(&self, other: &StructureVerdict) -> f64 {
        0.5 * self
            .as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Category with the largest probability.
    pub fn most_probable(&self) -> Structure {
        let [a, cp, d] = self.as_array();
        if a >= cp && a >= d {
            Structure::Assortative
        } else if cp >= d {
            Structure::CorePeriphery
        } else {
            Structure::Disassortative
        }
    }
}

fn count_categories(draws: &[BlockProbs]) -> [f64; 3] {
    let mut counts = [0usize; 3];
    for p in draws {
        let slot = match classify_draw(p) {
            Structure::Assortative => 0,
            Structure::CorePeriphery => 1,
            Structure::Disassortative => 2,
        };
        counts[slot] += 1;
    }
    let total = draws.len() as f64;
    counts.map(|c| c as f64 / total)
}

pub fn classify_structure(samples: &PosteriorSamples) -> Result<StructureVerdict> {
    if samples.draws.is_empty() {
        return Err(Error::EmptySamples);
    }
    let [a, cp, d] = count_categories(&samples.draws);
    let per_chain = (samples.chains.len() > 1).then(|| {
        samples
            .chains
            .iter()
            .enumerate()
            .filter(|(_, c)| c.retained > 0)
            .map(|(k, chain)| {
                let [a, cp, d] = count_categories(samples.chain_draws(k));
                ChainVerdict {
                    chain_index: chain.chain_index,
                    p_assortative: a,
                    p_core_periphery: cp,
                    p_disassortative: d,
                    n_samples: chain.retained,
                }
            })
            .collect()
    });
    Ok(StructureVerdict {
        p_assortative: a,
        p_core_periphery: cp,
        p_disassortative: d,
        n_samples: samples.draws.len(),
        per_chain,
    })
}

/// Posterior probability that each node is in group 1.
pub fn membership_probabilities(samples: &PosteriorSamples) -> Result<Vec<f64>> {
    if samples.retained == 0 {
        return Err(Error::EmptySamples);
    }
    let total = samples.retained as f64;
    Ok(samples
        .label_tally
        .iter()
        .map(|&t| t as f64 / total)
        .collect())
}

/// `n x n` matrix of the probability that two nodes share a group.
pub fn coassignment_matrix(samples: &PosteriorSamples) -> Result<Vec<Vec<f64>>> {
    let tally = samples
        .coassign_tally
        .as_ref()
        .ok_or(Error::CoassignmentDisabled)?;
    if samples.retained == 0 {
        return Err(Error::EmptySamples);
    }
    let n = samples.n;
    let total = samples.retained as f64;
    let mut matrix = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = tally[pair_index(n, i, j)] as f64 / total;
            matrix[i][j] = v;
            matrix[j][i] = v;
        }
    }
    Ok(matrix)
}

/// Normalized histogram of the group-1 size over `0..=n`.
pub fn group_size_posterior(samples: &PosteriorSamples) -> Result<Vec<f64>> {
    if samples.retained == 0 {
        return Err(Error::EmptySamples);
    }
    let total = samples.retained as f64;
    Ok(samples
        .size_tally
        .iter()
        .map(|&t| t as f64 / total)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantiles {
    pub q025: f64,
    pub q500: f64,
    pub q975: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalSummary {
    pub mean: f64,
    pub sd: f64,
    pub quantiles: Quantiles,
    /// Probability mass per bin; bins share [`DensitySummary::bin_edges`].
    pub mass: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exceedance {
    pub p11_gt_p12: f64,
    pub p12_gt_p22: f64,
    pub p11_gt_p22: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySummary {
    pub bin_edges: Vec<f64>,
    pub p11: MarginalSummary,
    pub p12: MarginalSummary,
    pub p22: MarginalSummary,
    pub exceedance: Exceedance,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn summarize(values: &[f64], bins: usize) -> MarginalSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut mass = vec![0.0; bins];
    for &v in values {
        let bin = ((v * bins as f64) as usize).min(bins - 1);
        mass[bin] += 1.0;
    }
    for m in &mut mass {
        *m /= n;
    }
    MarginalSummary {
        mean,
        sd,
        quantiles: Quantiles {
            q025: quantile(&sorted, 0.025),
            q500: quantile(&sorted, 0.5),
            q975: quantile(&sorted, 0.975),
        },
        mass,
    }
}

/// Histograms over `[0, 1]`, moments, quantiles and pairwise exceedance
/// probabilities of the block probabilities.
pub fn density_summary(samples: &PosteriorSamples, bins: usize) -> Result<DensitySummary> {
    if samples.draws.is_empty() {
        return Err(Error::EmptySamples);
    }
    if bins < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    let column = |f: fn(&BlockProbs) -> f64| samples.draws.iter().map(f).collect::<Vec<_>>();
    let total = samples.draws.len() as f64;
    let frac =
        |f: fn(&BlockProbs) -> bool| samples.draws.iter().filter(|p| f(p)).count() as f64 / total;
    Ok(DensitySummary {
        bin_edges: (0..=bins).map(|k| k as f64 / bins as f64).collect(),
        p11: summarize(&column(|p| p.p11), bins),
        p12: summarize(&column(|p| p.p12), bins),
        p22: summarize(&column(|p| p.p22), bins),
        exceedance: Exceedance {
            p11_gt_p12: frac(|p| p.p11 > p.p12),
            p12_gt_p22: frac(|p| p.p12 > p.p22),
            p11_gt_p22: frac(|p| p.p11 > p.p22),
        },
    })
}

/// Density and CDF of one Beta posterior tabulated on the quadrature grid.
struct Tabulated {
    pdf: Vec<f64>,
    cdf: Vec<f64>,
}

fn tabulate(a: f64, b: f64, grid: &[f64]) -> Tabulated {
    let ln_norm = ln_beta(a, b);
    let pdf = grid
        .iter()
        .map(|&x| {
            let mut ln = -ln_norm;
            if a != 1.0 {
                ln += (a - 1.0) * x.ln();
            }
            if b != 1.0 {
                ln += (b - 1.0) * (-x).ln_1p();
            }
            ln.exp()
        })
        .collect();
    let cdf = grid.iter().map(|&x| beta_reg(a, b, x)).collect();
    Tabulated { pdf, cdf }
}

fn simpson_weights(points: usize) -> Vec<f64> {
    let h = 1.0 / (points - 1) as f64;
    (0..points)
        .map(|k| {
            let w = if k == 0 || k == points - 1 {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// `[P(assortative), P(core-periphery), P(disassortative)]` for independent
/// Beta posteriors of the three block probabilities.
fn ordering_probabilities(
    t11: &Tabulated,
    t12: &Tabulated,
    t22: &Tabulated,
    weights: &[f64],
) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, w) in weights.iter().enumerate() {
        let f = w * t12.pdf[k];
        let (f11, f22) = (t11.cdf[k], t22.cdf[k]);
        out[0] += f * (1.0 - f11) * (1.0 - f22);
        out[1] += f * (f11 * (1.0 - f22) + (1.0 - f11) * f22);
        out[2] += f * f11 * f22;
    }
    out
}

/// Exact posterior structure probabilities by enumerating every label vector
/// and integrating the conjugate Beta posteriors numerically (composite
/// Simpson on `quadrature_points` evenly spaced points).
///
/// Requires `p11` and `p22` to share a prior, and every posterior Beta shape
/// to be at least 1 so the integrands stay bounded.
pub fn exact_structure_posterior(
    g: &Graph,
    h: &Hyperparameters,
    quadrature_points: usize,
) -> Result<StructureVerdict> {
    let n = g.n();
    if n > MAX_EXACT_NODES {
        return Err(Error::TooManyNodes {
            n,
            limit: MAX_EXACT_NODES,
        });
    }
    h.validate()?;
    h.check_len(n)?;
    if !h.is_block_symmetric() {
        return Err(Error::InvalidHyperparameters(
            "exact posterior requires identical priors on p11 and p22".into(),
        ));
    }
    if h.priors().iter().any(|p| p.a < 1.0 || p.b < 1.0) {
        return Err(Error::InvalidHyperparameters(
            "exact posterior requires Beta shapes >= 1".into(),
        ));
    }
    if quadrature_points < 3 || quadrature_points.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "Simpson quadrature needs an odd number of points >= 3, got {quadrature_points}"
        )));
    }

    // Group label vectors by their sufficient statistics.
    let mut by_counts: HashMap<BlockCounts, f64> = HashMap::new();
    let mut max_log_weight = f64::NEG_INFINITY;
    let mut log_weights = Vec::with_capacity(1 << n);
    for mask in 0..(1u64 << n) {
        let c = LabelVector::from_mask(n, mask);
        let counts = block_counts(g, &c)?;
        let lw = log_marginal_likelihood(&counts, h) + log_prior_labels(&c, h)?;
        max_log_weight = max_log_weight.max(lw);
        log_weights.push((counts, lw));
    }
    for (counts, lw) in log_weights {
        *by_counts.entry(counts).or_insert(0.0) += (lw - max_log_weight).exp();
    }

    let grid: Vec<f64> = (0..quadrature_points)
        .map(|k| k as f64 / (quadrature_points - 1) as f64)
        .collect();
    let weights = simpson_weights(quadrature_points);
    let mut tables: HashMap<(u64, u64, usize), Tabulated> = HashMap::new();
    let priors = h.priors();

    let mut keys: Vec<&BlockCounts> = by_counts.keys().collect();
    // Fixed reduction order.
    keys.sort_by_key(|c| (c.n1, c.edges(), c.pairs()));

    let mut total_weight = 0.0;
    let mut mix = [0.0; 3];
    for counts in keys {
        let w = by_counts[counts];
        for (b, (&e, t)) in counts.edges().iter().zip(counts.pairs()).enumerate() {
            tables.entry((e, t, b)).or_insert_with(|| {
                let BetaPrior { a, b: b0 } = priors[b];
                tabulate(e as f64 + a, (t - e) as f64 + b0, &grid)
            });
        }
        let [e11, e12, e22] = counts.edges();
        let [t11, t12, t22] = counts.pairs();
        let probs = ordering_probabilities(
            &tables[&(e11, t11, 0)],
            &tables[&(e12, t12, 1)],
            &tables[&(e22, t22, 2)],
            &weights,
        );
        for (acc, p) in mix.iter_mut().zip(probs) {
            *acc += w * p;
        }
        total_weight += w;
    }
    let [a, cp, d] = mix.map(|v| v / total_weight);
    if ![a, cp, d].iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical(
            "enumeration produced a non-finite probability".into(),
        ));
    }
    Ok(StructureVerdict {
        p_assortative: a,
        p_core_periphery: cp,
        p_disassortative: d,
        n_samples: 0,
        per_chain: None,
    })
}
