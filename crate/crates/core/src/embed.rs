//! Directional skip-gram over walk corpora.
//!
//! Each paper owns two vectors. The *past* vector is the query side: for a
//! training pair `(u, v)` where `v` appears after `u` on a past-directed
//! walk (so `v` is an antecedent of `u` within the window), the objective
//! pushes `p_u` toward `f_v` and away from noise future vectors. The
//! *future* vector of a paper is therefore shaped by the papers that build
//! on it, and the past vector by the papers it builds on. The window is
//! one-directional: only offsets `1..=c` ahead in the walk form pairs.
//!
//! Two execution modes: `Deterministic` runs a single worker and reproduces
//! byte-identical tables for a fixed seed; `Racy` shards walks across
//! threads which update shared rows without locks, trading bitwise
//! reproducibility for throughput.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::alias::AliasTable;
use crate::graph::PaperId;
use crate::rng::stream_rng;
use crate::sgns::{train_step, Cell};
use crate::walk::{corpus_stats, WalkCorpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    /// Single worker, byte-reproducible for a fixed seed.
    Deterministic,
    /// Lock-free concurrent row updates; statistically equivalent, not
    /// bitwise reproducible.
    Racy { workers: usize },
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dim: u32,
    /// Window size c: maximum citation-step offset forming pairs.
    pub window: u32,
    pub negatives: u32,
    pub epochs: u32,
    pub initial_lr: f32,
    pub min_lr: f32,
    /// Noise distribution is corpus frequency raised to this exponent.
    pub noise_exponent: f64,
    pub seed: u64,
    pub mode: TrainMode,
    /// Divergence guard: abort when any row norm exceeds this.
    pub norm_ceiling: f32,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_lr: 1e-4,
            noise_exponent: 0.75,
            seed: 0,
            mode: TrainMode::Deterministic,
            norm_ceiling: 1e3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.dim < 2 {
            return Err(TrainError::InvalidConfig("dim must be >= 2".into()));
        }
        if self.window < 1 {
            return Err(TrainError::InvalidConfig("window must be >= 1".into()));
        }
        if self.negatives < 1 {
            return Err(TrainError::InvalidConfig("negatives must be >= 1".into()));
        }
        if self.epochs < 1 {
            return Err(TrainError::InvalidConfig("epochs must be >= 1".into()));
        }
        if let TrainMode::Racy { workers } = self.mode {
            if workers == 0 {
                return Err(TrainError::InvalidConfig("workers must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn mode_label(&self) -> &'static str {
        match self.mode {
            TrainMode::Deterministic => "deterministic",
            TrainMode::Racy { .. } => "racy",
        }
    }

    /// Hash of every field that affects the trained output.
    pub fn config_hash(&self) -> [u8; 32] {
        let canonical = format!(
            "dim={};window={};negatives={};epochs={};initial_lr={:?};min_lr={:?};noise_exponent={:?};seed={};mode={};norm_ceiling={:?}",
            self.dim,
            self.window,
            self.negatives,
            self.epochs,
            self.initial_lr,
            self.min_lr,
            self.noise_exponent,
            self.seed,
            self.mode_label(),
            self.norm_ceiling,
        );
        let mut h = Sha256::new();
        h.update(canonical.as_bytes());
        h.finalize().into()
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("walk corpus is empty")]
    EmptyCorpus,
    #[error("corpus has no training pairs (all walks are single papers)")]
    NoTrainingPairs,
    #[error("training diverged at epoch {epoch}: {reason}")]
    Diverged { epoch: u32, reason: String },
}

/// Per-paper negative-sampling weights: corpus frequency raised to the noise
/// exponent, normalized. Support is exactly the set of visited papers.
#[derive(Debug, Clone)]
pub struct NoiseDistribution {
    probabilities: Vec<f64>,
    alias: AliasTable,
}

impl NoiseDistribution {
    pub fn from_visit_counts(visits: &[u64], exponent: f64) -> Option<NoiseDistribution> {
        let raw: Vec<f64> = visits
            .iter()
            .map(|&c| if c == 0 { 0.0 } else { (c as f64).powf(exponent) })
            .collect();
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let probabilities = raw.iter().map(|w| w / total).collect();
        let alias = AliasTable::new(&raw)?;
        Some(NoiseDistribution {
            probabilities,
            alias,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    #[inline]
    pub fn sample(&self, rng: &mut impl rand::Rng) -> u32 {
        self.alias.sample(rng)
    }
}

/// Training pairs of one walk: `(center, context)` for every offset
/// `1..=window`, in walk order.
pub fn walk_pairs(walk: &[u32], window: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
    let len = walk.len();
    (0..len).flat_map(move |t| {
        (1..=window as usize)
            .take_while(move |w| t + w < len)
            .map(move |w| (walk[t], walk[t + w]))
    })
}

/// All training pairs of a corpus, materialized. Trainer code streams pairs
/// instead; this exists for inspection and oracle tests.
pub fn build_training_pairs(corpus: &WalkCorpus, window: u32) -> Vec<(u32, u32)> {
    corpus
        .iter()
        .flat_map(|w| walk_pairs(w, window).collect::<Vec<_>>())
        .collect()
}

fn pair_count(corpus: &WalkCorpus, window: u32) -> u64 {
    corpus
        .iter()
        .map(|w| {
            let l = w.len() as u64;
            let c = window as u64;
            // sum over positions of min(c, remaining)
            if l <= 1 {
                0
            } else if l - 1 <= c {
                l * (l - 1) / 2
            } else {
                (l - 1 - c) * c + c * (c + 1) / 2
            }
        })
        .sum()
}

/// The trained model: one past and one future row per paper.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    n: usize,
    dim: usize,
    past: Vec<f32>,
    future: Vec<f32>,
    trained: Vec<bool>,
    pub config_hash: [u8; 32],
    pub mode_label: String,
    /// Mean sample loss per epoch, in training order.
    pub epoch_mean_loss: Vec<f64>,
}

impl EmbeddingTable {
    /// Assemble a table from raw matrices, e.g. vectors produced elsewhere.
    /// Rows are flagged trained as given; the config hash is zeroed.
    pub fn from_raw(
        dim: usize,
        past: Vec<f32>,
        future: Vec<f32>,
        trained: Vec<bool>,
    ) -> EmbeddingTable {
        assert_eq!(past.len(), future.len());
        assert!(dim > 0 && past.len() % dim == 0);
        let n = past.len() / dim;
        assert_eq!(trained.len(), n);
        EmbeddingTable {
            n,
            dim,
            past,
            future,
            trained,
            config_hash: [0; 32],
            mode_label: "external".to_string(),
            epoch_mean_loss: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn past_row(&self, p: PaperId) -> &[f32] {
        &self.past[p.index() * self.dim..(p.index() + 1) * self.dim]
    }

    pub fn future_row(&self, p: PaperId) -> &[f32] {
        &self.future[p.index() * self.dim..(p.index() + 1) * self.dim]
    }

    pub fn is_trained(&self, p: PaperId) -> bool {
        self.trained[p.index()]
    }

    pub fn trained_count(&self) -> usize {
        self.trained.iter().filter(|&&t| t).count()
    }
}

struct Shared<'a> {
    past: &'a [Cell],
    future: &'a [Cell],
    dim: usize,
    window: u32,
    negatives: u32,
    noise: &'a NoiseDistribution,
    initial_lr: f32,
    min_lr: f32,
    total_updates: u64,
    progress: AtomicU64,
}

impl<'a> Shared<'a> {
    #[inline]
    fn row(buf: &'a [Cell], dim: usize, id: u32) -> &'a [Cell] {
        &buf[id as usize * dim..(id as usize + 1) * dim]
    }

    #[inline]
    fn lr_at(&self, done: u64) -> f32 {
        let frac = 1.0 - done as f64 / self.total_updates.max(1) as f64;
        (self.initial_lr * frac as f32).max(self.min_lr)
    }

    /// Process a batch of walks with one RNG; returns (loss sum, samples).
    fn run_walks<'w>(
        &self,
        walks: impl Iterator<Item = &'w [u32]>,
        rng: &mut rand_chacha::ChaCha8Rng,
        scratch: &mut [f32],
    ) -> (f64, u64) {
        const LR_SYNC_EVERY: u64 = 4096;
        let mut loss_sum = 0.0f64;
        let mut samples = 0u64;
        let mut local: u64 = 0;
        let mut lr = self.lr_at(self.progress.load(Ordering::Relaxed));
        let mut negs: Vec<&[Cell]> = Vec::with_capacity(self.negatives as usize);
        for walk in walks {
            for (u, v) in walk_pairs(walk, self.window) {
                negs.clear();
                for _ in 0..self.negatives {
                    // redraw a few times to avoid the positive context
                    let mut pick = self.noise.sample(rng);
                    for _ in 0..4 {
                        if pick != v {
                            break;
                        }
                        pick = self.noise.sample(rng);
                    }
                    if pick == v {
                        continue;
                    }
                    negs.push(Self::row(self.future, self.dim, pick));
                }
                let center = Self::row(self.past, self.dim, u);
                let context = Self::row(self.future, self.dim, v);
                loss_sum += train_step(center, context, &negs, lr, scratch) as f64;
                samples += 1;
                local += 1;
                if local == LR_SYNC_EVERY {
                    let done = self.progress.fetch_add(local, Ordering::Relaxed) + local;
                    lr = self.lr_at(done);
                    local = 0;
                }
            }
        }
        self.progress.fetch_add(local, Ordering::Relaxed);
        (loss_sum, samples)
    }
}

/// Train past/future tables on a walk corpus.
pub fn train(corpus: &WalkCorpus, cfg: &TrainConfig) -> Result<EmbeddingTable, TrainError> {
    cfg.validate()?;
    if corpus.is_empty() || corpus.total_tokens() == 0 {
        return Err(TrainError::EmptyCorpus);
    }
    let n = corpus.n_papers();
    let dim = cfg.dim as usize;
    let total_pairs = pair_count(corpus, cfg.window);
    if total_pairs == 0 {
        return Err(TrainError::NoTrainingPairs);
    }

    let mut trained = vec![false; n];
    for w in corpus.iter() {
        if w.len() >= 2 {
            for &t in w {
                trained[t as usize] = true;
            }
        }
    }

    // noise support = papers contributing training pairs; a paper seen only
    // as a length-1 walk must keep its initialization untouched
    let mut visits = corpus_stats(corpus).visits;
    for (i, &t) in trained.iter().enumerate() {
        if !t {
            visits[i] = 0;
        }
    }
    let noise = NoiseDistribution::from_visit_counts(&visits, cfg.noise_exponent)
        .ok_or(TrainError::EmptyCorpus)?;

    // small symmetric init on both sides; an all-zero future side would
    // freeze its gradients symmetrically
    let past: Vec<Cell> = (0..n * dim).map(|_| Cell::default()).collect();
    let future: Vec<Cell> = (0..n * dim).map(|_| Cell::default()).collect();
    let span = 0.5f32 / dim as f32;
    let mut init_rng = stream_rng(cfg.seed, u64::MAX, 0);
    for c in &past {
        c.set(rand::Rng::random_range(&mut init_rng, -span..span));
    }
    let mut init_rng = stream_rng(cfg.seed, u64::MAX, 1);
    for c in &future {
        c.set(rand::Rng::random_range(&mut init_rng, -span..span));
    }

    let shared = Shared {
        past: &past,
        future: &future,
        dim,
        window: cfg.window,
        negatives: cfg.negatives,
        noise: &noise,
        initial_lr: cfg.initial_lr,
        min_lr: cfg.min_lr,
        total_updates: total_pairs * cfg.epochs as u64,
        progress: AtomicU64::new(0),
    };

    let mut epoch_mean_loss = Vec::with_capacity(cfg.epochs as usize);
    for epoch in 0..cfg.epochs {
        let (loss_sum, samples) = match cfg.mode {
            TrainMode::Deterministic => {
                let mut rng = stream_rng(cfg.seed, 0xD0, epoch as u64);
                let mut scratch = vec![0.0f32; dim];
                shared.run_walks(corpus.iter(), &mut rng, &mut scratch)
            }
            TrainMode::Racy { workers } => {
                let chunk = (corpus.len() / (workers * 8)).max(1);
                let ranges: Vec<(usize, usize)> = (0..corpus.len())
                    .step_by(chunk)
                    .map(|s| (s, (s + chunk).min(corpus.len())))
                    .collect();
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| TrainError::InvalidConfig(e.to_string()))?;
                pool.install(|| {
                    ranges
                        .par_iter()
                        .enumerate()
                        .map(|(ci, &(lo, hi))| {
                            let mut rng =
                                stream_rng(cfg.seed, 0xBA5E + epoch as u64, ci as u64);
                            let mut scratch = vec![0.0f32; dim];
                            shared.run_walks(
                                (lo..hi).map(|i| corpus.walk(i)),
                                &mut rng,
                                &mut scratch,
                            )
                        })
                        .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
                })
            }
        };

        let mean = loss_sum / samples.max(1) as f64;
        if !mean.is_finite() {
            return Err(TrainError::Diverged {
                epoch,
                reason: "non-finite mean loss".into(),
            });
        }
        epoch_mean_loss.push(mean);

        let ceiling2 = cfg.norm_ceiling as f64 * cfg.norm_ceiling as f64;
        for (label, buf) in [("past", &past), ("future", &future)] {
            let worst = (0..n)
                .map(|i| {
                    buf[i * dim..(i + 1) * dim]
                        .iter()
                        .map(|c| (c.get() as f64).powi(2))
                        .sum::<f64>()
                })
                .fold(0.0f64, f64::max);
            if !worst.is_finite() || worst > ceiling2 {
                return Err(TrainError::Diverged {
                    epoch,
                    reason: format!("{label} row norm {} exceeds ceiling", worst.sqrt()),
                });
            }
        }
    }

    Ok(EmbeddingTable {
        n,
        dim,
        past: past.iter().map(Cell::get).collect(),
        future: future.iter().map(Cell::get).collect(),
        trained,
        config_hash: cfg.config_hash(),
        mode_label: cfg.mode_label().to_string(),
        epoch_mean_loss,
    })
}

// ---------------------------------------------------------------------------
// vector container I/O

const MAGIC: &[u8; 5] = b"EDMV1";

#[derive(Debug, Error)]
pub enum VectorIoError {
    #[error("io error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid vector file: {reason}")]
    Format {
        path: std::path::PathBuf,
        reason: String,
    },
}

/// Write both matrices and the trained mask. Layout: magic, config hash,
/// `N: u64`, `d: u32`, then tagged sections `P` (past rows), `F` (future
/// rows) as row-major little-endian f32, and `M` (trained mask bytes).
pub fn export_vectors(table: &EmbeddingTable, path: &Path) -> Result<(), VectorIoError> {
    use std::io::Write;
    let io = |source| VectorIoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    f.write_all(MAGIC).map_err(io)?;
    f.write_all(&table.config_hash).map_err(io)?;
    f.write_all(&(table.n as u64).to_le_bytes()).map_err(io)?;
    f.write_all(&(table.dim as u32).to_le_bytes()).map_err(io)?;
    for (tag, matrix) in [(b'P', &table.past), (b'F', &table.future)] {
        f.write_all(&[tag]).map_err(io)?;
        for &x in matrix {
            f.write_all(&x.to_le_bytes()).map_err(io)?;
        }
    }
    f.write_all(&[b'M']).map_err(io)?;
    for &t in &table.trained {
        f.write_all(&[t as u8]).map_err(io)?;
    }
    f.flush().map_err(io)?;
    Ok(())
}

/// Read a vector container written by [`export_vectors`]. The embedded
/// config hash is surfaced on the table; callers compare it against their
/// own run configuration and warn on mismatch.
pub fn import_vectors(path: &Path) -> Result<EmbeddingTable, VectorIoError> {
    let bytes = std::fs::read(path).map_err(|source| VectorIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let fail = |reason: &str| VectorIoError::Format {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut at = 0usize;
    let take = |at: &mut usize, len: usize| -> Result<&[u8], VectorIoError> {
        if *at + len > bytes.len() {
            return Err(fail("truncated file"));
        }
        let s = &bytes[*at..*at + len];
        *at += len;
        Ok(s)
    };

    if take(&mut at, MAGIC.len())? != MAGIC {
        return Err(fail("bad magic"));
    }
    let mut config_hash = [0u8; 32];
    config_hash.copy_from_slice(take(&mut at, 32)?);
    let n = u64::from_le_bytes(take(&mut at, 8)?.try_into().unwrap()) as usize;
    let dim = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
    let expected = MAGIC.len() + 32 + 8 + 4 + 2 * (1 + n * dim * 4) + 1 + n;
    if bytes.len() != expected {
        return Err(fail(&format!(
            "header declares N={n}, d={dim} but file has {} bytes (expected {expected})",
            bytes.len()
        )));
    }

    let read_matrix = |tag: u8, at: &mut usize| -> Result<Vec<f32>, VectorIoError> {
        if take(at, 1)?[0] != tag {
            return Err(fail(&format!("expected section tag `{}`", tag as char)));
        }
        let raw = take(at, n * dim * 4)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    };
    let past = read_matrix(b'P', &mut at)?;
    let future = read_matrix(b'F', &mut at)?;
    if take(&mut at, 1)?[0] != b'M' {
        return Err(fail("expected section tag `M`"));
    }
    let trained: Vec<bool> = take(&mut at, n)?.iter().map(|&b| b != 0).collect();

    Ok(EmbeddingTable {
        n,
        dim,
        past,
        future,
        trained,
        config_hash,
        mode_label: "imported".to_string(),
        epoch_mean_loss: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Past,
    Future,
}

/// Plain-text interoperability format: `key v1 ... vd`, one paper per line.
pub fn export_vectors_text(
    table: &EmbeddingTable,
    keys: &[String],
    which: MatrixKind,
    path: &Path,
) -> Result<(), VectorIoError> {
    use std::io::Write;
    assert_eq!(keys.len(), table.n());
    let io = |source| VectorIoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for (i, key) in keys.iter().enumerate() {
        let p = PaperId(i as u32);
        let row = match which {
            MatrixKind::Past => table.past_row(p),
            MatrixKind::Future => table.future_row(p),
        };
        write!(f, "{key}").map_err(io)?;
        for x in row {
            write!(f, " {x}").map_err(io)?;
        }
        writeln!(f).map_err(io)?;
    }
    f.flush().map_err(io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgns::sigmoid;
    use crate::walk::WalkCorpus;

    fn corpus(n: usize, walks: Vec<Vec<u32>>) -> WalkCorpus {
        WalkCorpus::from_walks(n, walks)
    }

    #[test]
    fn window_one_pairs_are_edges() {
        let pairs: Vec<(u32, u32)> = walk_pairs(&[2, 1, 0], 1).collect();
        assert_eq!(pairs, vec![(2, 1), (1, 0)]);
    }

    #[test]
    fn wide_window_reaches_across_walk() {
        let pairs: Vec<(u32, u32)> = walk_pairs(&[2, 1, 0], 5).collect();
        assert_eq!(pairs, vec![(2, 1), (2, 0), (1, 0)]);
    }

    #[test]
    fn corpus_pairs_match_per_walk_enumeration() {
        let c = corpus(6, vec![vec![0, 1, 2, 3], vec![4], vec![5, 0]]);
        let all = build_training_pairs(&c, 2);
        let mut expected = Vec::new();
        for w in c.iter() {
            expected.extend(walk_pairs(w, 2));
        }
        assert_eq!(all, expected);
        assert_eq!(pair_count(&c, 2), all.len() as u64);
        // exhaustive for walk [0,1,2,3] with c=2
        assert!(all.contains(&(0, 1)));
        assert!(all.contains(&(0, 2)));
        assert!(!all.contains(&(0, 3)));
    }

    #[test]
    fn pair_count_formula_matches_enumeration() {
        for len in 1..12usize {
            for window in 1..8u32 {
                let walk: Vec<u32> = (0..len as u32).collect();
                let c = corpus(len.max(1), vec![walk.clone()]);
                assert_eq!(
                    pair_count(&c, window),
                    walk_pairs(&walk, window).count() as u64,
                    "len={len} window={window}"
                );
            }
        }
    }

    #[test]
    fn noise_distribution_normalizes_and_skips_unseen() {
        let nd = NoiseDistribution::from_visit_counts(&[8, 0, 1], 0.75).unwrap();
        let probs = nd.probabilities();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(probs[1], 0.0);
        assert!(probs[0] > probs[2]);
        let mut rng = crate::rng::stream_rng(4, 0, 0);
        for _ in 0..500 {
            assert_ne!(nd.sample(&mut rng), 1);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = TrainConfig {
            dim: 1,
            ..TrainConfig::default()
        };
        assert!(matches!(bad.validate(), Err(TrainError::InvalidConfig(_))));
        let bad = TrainConfig {
            mode: TrainMode::Racy { workers: 0 },
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_corpus_rejected() {
        let c = corpus(3, vec![]);
        let err = train(&c, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, TrainError::EmptyCorpus));
        let c = corpus(3, vec![vec![0], vec![1]]);
        let err = train(&c, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, TrainError::NoTrainingPairs));
    }

    fn fit_config(seed: u64) -> TrainConfig {
        TrainConfig {
            dim: 8,
            window: 2,
            negatives: 2,
            epochs: 60,
            initial_lr: 0.05,
            min_lr: 1e-3,
            seed,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn single_repeated_pair_is_fit() {
        // many copies of the walk [B, A]: p_B should predict f_A
        let walks: Vec<Vec<u32>> = (0..200).map(|_| vec![1, 0]).collect();
        let c = corpus(3, walks);
        let t = train(&c, &fit_config(5)).unwrap();
        let dot: f64 = t
            .past_row(PaperId(1))
            .iter()
            .zip(t.future_row(PaperId(0)))
            .map(|(a, b)| (*a as f64) * (*b as f64))
            .sum();
        assert!(
            sigmoid(dot) >= 0.9,
            "sigma(f_A . p_B) = {} too small",
            sigmoid(dot)
        );
    }

    #[test]
    fn deterministic_mode_reproduces_tables() {
        let walks: Vec<Vec<u32>> = (0..50)
            .map(|i| vec![i % 7, (i + 1) % 7, (i + 2) % 7])
            .collect();
        let c = corpus(7, walks);
        let cfg = TrainConfig {
            dim: 12,
            epochs: 3,
            seed: 42,
            ..TrainConfig::default()
        };
        let a = train(&c, &cfg).unwrap();
        let b = train(&c, &cfg).unwrap();
        assert_eq!(a.past, b.past);
        assert_eq!(a.future, b.future);
        let shifted = train(
            &c,
            &TrainConfig {
                seed: 43,
                ..cfg
            },
        )
        .unwrap();
        assert_ne!(a.past, shifted.past);
    }

    #[test]
    fn untrained_papers_keep_initialization_and_flag() {
        // paper 3 never appears; paper 4 appears only as a lone walk
        let c = corpus(5, vec![vec![0, 1, 2], vec![4]]);
        let cfg = TrainConfig {
            dim: 4,
            epochs: 2,
            seed: 9,
            ..TrainConfig::default()
        };
        let t = train(&c, &cfg).unwrap();
        assert!(t.is_trained(PaperId(0)));
        assert!(!t.is_trained(PaperId(3)));
        assert!(!t.is_trained(PaperId(4)));

        // rows of untrained papers must equal the seeded initialization:
        // retrain with 0 epochs is invalid, so compare across two runs that
        // share the seed but differ in epochs — init is epoch-independent
        let t2 = train(
            &c,
            &TrainConfig {
                epochs: 5,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(t.past_row(PaperId(3)), t2.past_row(PaperId(3)));
        assert_eq!(t.future_row(PaperId(4)), t2.future_row(PaperId(4)));
    }

    #[test]
    fn divergence_guard_trips_on_tiny_ceiling() {
        let walks: Vec<Vec<u32>> = (0..40).map(|_| vec![1, 0]).collect();
        let c = corpus(2, walks);
        let cfg = TrainConfig {
            dim: 4,
            epochs: 2,
            seed: 1,
            norm_ceiling: 1e-6,
            ..TrainConfig::default()
        };
        match train(&c, &cfg) {
            Err(TrainError::Diverged { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn racy_mode_trains_comparable_model() {
        let walks: Vec<Vec<u32>> = (0..300)
            .map(|i| {
                let base = (i % 5) as u32;
                vec![base + 5, base, (base + 1) % 5]
            })
            .collect();
        let c = corpus(10, walks);
        let cfg = TrainConfig {
            dim: 8,
            window: 2,
            epochs: 4,
            seed: 7,
            mode: TrainMode::Racy { workers: 2 },
            ..TrainConfig::default()
        };
        let t = train(&c, &cfg).unwrap();
        assert_eq!(t.mode_label, "racy");
        assert!(t.epoch_mean_loss.iter().all(|l| l.is_finite()));
        assert_eq!(t.trained_count(), 10);
    }

    #[test]
    fn epoch_loss_mostly_non_increasing() {
        // 100 clusters of 20 papers, walks stay within a cluster: plenty of
        // structure, so descent continues across all epochs
        let mut rng = crate::rng::stream_rng(21, 0, 0);
        let n = 2000u32;
        let walks: Vec<Vec<u32>> = (0..6000)
            .map(|_| {
                let cluster = rand::Rng::random_range(&mut rng, 0..100u32) * 20;
                (0..3)
                    .map(|_| cluster + rand::Rng::random_range(&mut rng, 0..20u32))
                    .collect()
            })
            .collect();
        let c = corpus(n as usize, walks);
        let cfg = TrainConfig {
            dim: 16,
            window: 2,
            epochs: 11,
            seed: 2,
            ..TrainConfig::default()
        };
        let t = train(&c, &cfg).unwrap();
        // tiny upward jitter from resampled negatives does not count as an
        // increase; the trend over transitions is what matters
        let drops = t
            .epoch_mean_loss
            .windows(2)
            .filter(|w| w[1] <= w[0] + 1e-4)
            .count();
        let transitions = t.epoch_mean_loss.len() - 1;
        assert!(
            drops as f64 >= 0.9 * transitions as f64,
            "loss increased too often: {:?}",
            t.epoch_mean_loss
        );
    }

    #[test]
    fn export_import_round_trip_is_bit_identical() {
        let c = corpus(6, vec![vec![0, 1, 2], vec![3, 4, 5], vec![0, 3]]);
        let cfg = TrainConfig {
            dim: 5,
            epochs: 2,
            seed: 11,
            ..TrainConfig::default()
        };
        let t = train(&c, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.bin");
        export_vectors(&t, &path).unwrap();
        let r = import_vectors(&path).unwrap();
        assert_eq!(t.past, r.past);
        assert_eq!(t.future, r.future);
        assert_eq!(t.trained, r.trained);
        assert_eq!(t.config_hash, r.config_hash);
    }

    #[test]
    fn import_rejects_corrupted_headers() {
        let c = corpus(4, vec![vec![0, 1], vec![2, 3]]);
        let t = train(
            &c,
            &TrainConfig {
                dim: 3,
                epochs: 1,
                seed: 0,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vecs.bin");
        export_vectors(&t, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();

        // body shorter than the header claims
        let truncated = dir.path().join("trunc.bin");
        std::fs::write(&truncated, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(
            import_vectors(&truncated),
            Err(VectorIoError::Format { .. })
        ));

        // header N inflated relative to the body
        let inflated = dir.path().join("inflated.bin");
        bytes[37] = 0xff; // low byte of N
        std::fs::write(&inflated, &bytes).unwrap();
        assert!(matches!(
            import_vectors(&inflated),
            Err(VectorIoError::Format { .. })
        ));

        let empty = dir.path().join("empty.bin");
        std::fs::write(&empty, b"nope").unwrap();
        assert!(import_vectors(&empty).is_err());
    }

    #[test]
    fn config_hash_tracks_fields() {
        let a = TrainConfig::default();
        let b = TrainConfig {
            window: 6,
            ..TrainConfig::default()
        };
        assert_eq!(a.config_hash(), TrainConfig::default().config_hash());
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn text_export_lists_one_row_per_key() {
        let c = corpus(3, vec![vec![0, 1, 2]]);
        let t = train(
            &c,
            &TrainConfig {
                dim: 2,
                epochs: 1,
                seed: 3,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        let keys = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        export_vectors_text(&t, &keys, MatrixKind::Future, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("a "));
        assert_eq!(lines[1].split_whitespace().count(), 3);
    }
}
