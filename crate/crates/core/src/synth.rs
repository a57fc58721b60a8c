//! Synthetic two-block graphs and the `p12` sweep that checks whether the
//! posterior tracks the planted structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::inference::{classify_structure, membership_probabilities};
use crate::model::{BlockProbs, Group, Hyperparameters, LabelVector};
use crate::sampler::{run_chain, ChainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// Sizes of block 1 and block 2.
    pub sizes: (usize, usize),
    pub probs: BlockProbs,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Block 1 gets `round(fraction * n)` nodes.
    pub fn from_fraction(n: usize, fraction: f64, probs: BlockProbs, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::InvalidGenerator(format!(
                "block fraction {fraction} must lie in [0, 1]"
            )));
        }
        let n1 = (fraction * n as f64).round() as usize;
        Ok(Self {
            sizes: (n1, n - n1),
            probs,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.sizes.0 + self.sizes.1
    }
}

/// A generated graph together with the planted labels.
#[derive(Debug, Clone)]
pub struct SyntheticGraph {
    pub graph: Graph,
    pub truth: LabelVector,
}

/// Nodes `0..n1` form block 1; every pair gets an independent Bernoulli edge.
pub fn generate_sbm(spec: &GeneratorSpec) -> Result<SyntheticGraph> {
    let p = BlockProbs::new(spec.probs.p11, spec.probs.p12, spec.probs.p22)?;
    let (n1, _) = spec.sizes;
    let n = spec.n();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let q = match (i < n1, j < n1) {
                (true, true) => p.p11,
                (false, false) => p.p22,
                _ => p.p12,
            };
            if rng.random::<f64>() < q {
                edges.push((i, j));
            }
        }
    }
    let truth = LabelVector::new(
        (0..n)
            .map(|i| if i < n1 { Group::One } else { Group::Two })
            .collect(),
    );
    Ok(SyntheticGraph {
        graph: Graph::from_edges(n, edges)?,
        truth,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n: usize,
    pub block1_fraction: f64,
    pub p11: f64,
    pub p22: f64,
    pub p12_grid: Vec<f64>,
    pub replicates: usize,
    pub chain: ChainConfig,
    pub seed: u64,
}

impl Default for SweepSpec {
    /// 100 nodes split 40/60, `p11 = 0.2`, `p22 = 0.1`, `p12` from 0.05 to
    /// 0.25 in steps of 0.025, 100 replicates, 1500 iterations with 500 burn-in.
    fn default() -> Self {
        Self {
            n: 100,
            block1_fraction: 0.4,
            p11: 0.20,
            p22: 0.10,
            p12_grid: grid(0.05, 0.25, 0.025),
            replicates: 100,
            chain: ChainConfig::new(1500, 500, 1),
            seed: 1,
        }
    }
}

/// Inclusive arithmetic grid `start, start + step, ..., stop`.
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|k| {
            let v = start + step * k as f64;
            // Clean representation for CSV output.
            (v * 1e9).round() / 1e9
        })
        .collect()
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p12_grid.is_empty() {
            return Err(Error::InvalidGenerator("p12 grid is empty".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidGenerator(
                "need at least one replicate".into(),
            ));
        }
        for &p12 in &self.p12_grid {
            BlockProbs::new(self.p11, p12, self.p22)?;
        }
        self.chain.validate()
    }
}

/// SplitMix64 finalizer; decorrelates seeds derived from small integers.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(seed), |acc, &k| mix(acc ^ mix(k)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateResult {
    pub p12: f64,
    pub replicate: usize,
    pub edges: usize,
    pub p_assortative: f64,
    pub p_core_periphery: f64,
    pub p_disassortative: f64,
    /// Fraction of nodes whose majority group matches the planted one, up to
    /// a global swap of group names.
    pub label_recovery: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p12: f64,
    pub mean_assortative: f64,
    pub se_assortative: f64,
    pub mean_cp: f64,
    pub se_cp: f64,
    pub mean_disassortative: f64,
    pub se_disassortative: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub raw: Vec<ReplicateResult>,
}

fn label_recovery(membership: &[f64], truth: &LabelVector) -> f64 {
    let n = membership.len();
    if n == 0 {
        return 1.0;
    }
    let agree = membership
        .iter()
        .zip(truth.as_slice())
        .filter(|(&p, &g)| (p >= 0.5) == (g == Group::One))
        .count();
    agree.max(n - agree) as f64 / n as f64
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn fit_replicate(spec: &SweepSpec, grid_index: usize, replicate: usize) -> Result<ReplicateResult> {
    let p12 = spec.p12_grid[grid_index];
    let tag = [grid_index as u64, replicate as u64];
    let generator = GeneratorSpec::from_fraction(
        spec.n,
        spec.block1_fraction,
        BlockProbs::new(spec.p11, p12, spec.p22)?,
        derive_seed(spec.seed, &[0, tag[0], tag[1]]),
    )?;
    let synthetic = generate_sbm(&generator)?;
    let h = Hyperparameters::uniform(spec.n, 0.5)?;
    let cfg = ChainConfig {
        seed: derive_seed(spec.seed, &[1, tag[0], tag[1]]),
        ..spec.chain.clone()
    };
    let samples = run_chain(&synthetic.graph, &h, &cfg)?;
    let verdict = classify_structure(&samples)?;
    let membership = membership_probabilities(&samples)?;
    Ok(ReplicateResult {
        p12,
        replicate,
        edges: synthetic.graph.m(),
        p_assortative: verdict.p_assortative,
        p_core_periphery: verdict.p_core_periphery,
        p_disassortative: verdict.p_disassortative,
        label_recovery: label_recovery(&membership, &synthetic.truth),
    })
}

/// Fits `replicates` generated graphs per grid value and averages the
/// structure probabilities. Rows follow grid order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let tasks: Vec<(usize, usize)> = (0..spec.p12_grid.len())
        .flat_map(|g| (0..spec.replicates).map(move |r| (g, r)))
        .collect();
    let raw = tasks
        .par_iter()
        .map(|&(g, r)| fit_replicate(spec, g, r))
        .collect::<Result<Vec<_>>>()?;

    let rows = raw
        .chunks(spec.replicates)
        .map(|chunk| {
            let (mean_assortative, se_assortative) =
                mean_and_se(chunk.iter().map(|r| r.p_assortative));
            let (mean_cp, se_cp) = mean_and_se(chunk.iter().map(|r| r.p_core_periphery));
            let (mean_disassortative, se_disassortative) =
                mean_and_se(chunk.iter().map(|r| r.p_disassortative));
            SweepRow {
                p12: chunk[0].p12,
                mean_assortative,
                se_assortative,
                mean_cp,
                se_cp,
                mean_disassortative,
                se_disassortative,
                replicates: chunk.len(),
            }
        })
        .collect();
    Ok(SweepTable { rows, raw })
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        write_csv(&self.rows)
    }

    pub fn raw_to_csv(&self) -> Result<String> {
        write_csv(&self.raw)
    }
}

pub(crate) fn write_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: (f64, f64, f64), sizes: (usize, usize), seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            sizes,
            probs: BlockProbs::new(p.0, p.1, p.2).unwrap(),
            seed,
        }
    }

    #[test]
    fn extreme_probabilities() {
        let g = generate_sbm(&spec((0.0, 0.0, 0.0), (4, 6), 1)).unwrap();
        assert_eq!((g.graph.n(), g.graph.m()), (10, 0));
        let g = generate_sbm(&spec((1.0, 1.0, 1.0), (4, 6), 1)).unwrap();
        assert_eq!(g.graph.m(), 45);
    }

    #[test]
    fn planted_labels_and_determinism() {
        let s = spec((0.3, 0.1, 0.2), (4, 6), 9);
        let a = generate_sbm(&s).unwrap();
        let b = generate_sbm(&s).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.truth.codes(), vec![1, 1, 1, 1, 2, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn fraction_sizes() {
        let p = BlockProbs::new(0.2, 0.15, 0.1).unwrap();
        assert_eq!(
            GeneratorSpec::from_fraction(100, 0.4, p, 7).unwrap().sizes,
            (40, 60)
        );
        assert!(GeneratorSpec::from_fraction(100, 1.4, p, 7).is_err());
    }

    #[test]
    fn default_grid_has_nine_points() {
        let g = SweepSpec::default().p12_grid;
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[2], 0.1);
        assert_eq!(g[8], 0.25);
    }

    #[test]
    fn recovery_up_to_flip() {
        let truth = LabelVector::from_codes(&[1, 1, 2, 2]).unwrap();
        assert_eq!(label_recovery(&[0.9, 0.8, 0.1, 0.2], &truth), 1.0);
        assert_eq!(label_recovery(&[0.1, 0.2, 0.9, 0.8], &truth), 1.0);
        assert_eq!(label_recovery(&[0.9, 0.2, 0.1, 0.2], &truth), 0.75);
    }

    #[test]
    fn se_of_constant_is_zero() {
        let v = [0.5, 0.5, 0.5];
        assert_eq!(mean_and_se(v.iter().copied()), (0.5, 0.0));
        let (m, se) = mean_and_se([0.0, 1.0].iter().copied());
        assert_eq!(m, 0.5);
        assert!((se - 0.5).abs() < 1e-12);
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let spec = SweepSpec {
            n: 20,
            p12_grid: vec![0.05, 0.3],
            replicates: 3,
            chain: ChainConfig::new(60, 20, 1),
            seed: 4,
            ..Default::default()
        };
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 2);
        assert_eq!(a.raw.len(), 6);
        for row in &a.rows {
            let total = row.mean_assortative + row.mean_cp + row.mean_disassortative;
            assert!((total - 1.0).abs() < 1e-12);
        }
        let csv = a.to_csv().unwrap();
        assert!(csv.starts_with(
            "p12,mean_assortative,se_assortative,mean_cp,se_cp,mean_disassortative,se_disassortative,replicates\n"
        ));
    }

    #[test]
    fn invalid_sweeps() {
        let mut s = SweepSpec {
            p12_grid: vec![],
            ..Default::default()
        };
        assert!(s.validate().is_err());
        s.p12_grid = vec![1.5];
        assert!(s.validate().is_err());
        s.p12_grid = vec![0.1];
        s.replicates = 0;
        assert!(s.validate().is_err());
    }
}
