//! Past-directed random walks over the citation network.
//!
//! A walk starts at a paper and repeatedly steps to a uniformly chosen
//! reference of the current paper, so every consecutive pair is a citation
//! pointing to the past. A paper without references ends the walk (walks
//! are never restarted; restarts would distort the in-degree occupancy of
//! the walker). Each `(start, walk-index)` pair owns an independent RNG
//! stream derived from the seed, so the corpus is byte-identical no matter
//! how generation is partitioned across threads.

use rand::Rng;
use rayon::prelude::*;

use crate::graph::{CitationGraph, PaperId};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartSet {
    /// Start walks from every paper, excluded ones included; excluded papers
    /// still provide context for their neighbors.
    All,
    NonExcluded,
}

#[derive(Debug, Clone)]
pub struct WalkConfig {
    /// Walks per start paper (R).
    pub walks_per_node: u32,
    /// Maximum walk length in papers (T).
    pub walk_length: u32,
    pub seed: u64,
    pub start_set: StartSet,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 80,
            seed: 0,
            start_set: StartSet::All,
        }
    }
}

/// Walk sequences packed into one token buffer with offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    n_papers: usize,
    offsets: Vec<u64>,
    tokens: Vec<u32>,
}

impl WalkCorpus {
    pub fn from_walks(n_papers: usize, walks: impl IntoIterator<Item = Vec<u32>>) -> WalkCorpus {
        let mut offsets = vec![0u64];
        let mut tokens = Vec::new();
        for w in walks {
            tokens.extend_from_slice(&w);
            offsets.push(tokens.len() as u64);
        }
        WalkCorpus {
            n_papers,
            offsets,
            tokens,
        }
    }

    pub fn n_papers(&self) -> usize {
        self.n_papers
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_tokens(&self) -> u64 {
        self.tokens.len() as u64
    }

    pub fn walk(&self, i: usize) -> &[u32] {
        &self.tokens[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.len()).map(move |i| self.walk(i))
    }

    /// One walk per line, space-separated dense ids.
    pub fn write(&self, path: &std::path::Path) -> std::io::Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for w in self.iter() {
            let mut first = true;
            for t in w {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{t}")?;
                first = false;
            }
            writeln!(f)?;
        }
        f.flush()
    }
}

fn one_walk(g: &CitationGraph, start: PaperId, len: u32, rng: &mut impl Rng) -> Vec<u32> {
    let mut walk = Vec::with_capacity(len as usize);
    let mut cur = start;
    walk.push(cur.0);
    for _ in 1..len {
        let refs = g.references(cur);
        if refs.is_empty() {
            break;
        }
        cur = PaperId(refs[rng.random_range(0..refs.len())]);
        walk.push(cur.0);
    }
    walk
}

/// Generate `R` walks of length at most `T` from each start paper.
pub fn generate_walks(g: &CitationGraph, cfg: &WalkConfig) -> WalkCorpus {
    assert!(cfg.walks_per_node >= 1, "walks_per_node must be >= 1");
    assert!(cfg.walk_length >= 2, "walk_length must be >= 2");
    let starts: Vec<PaperId> = match cfg.start_set {
        StartSet::All => g.papers().collect(),
        StartSet::NonExcluded => g.papers().filter(|&p| !g.is_excluded(p)).collect(),
    };
    let per_start: Vec<Vec<Vec<u32>>> = starts
        .par_iter()
        .map(|&s| {
            (0..cfg.walks_per_node)
                .map(|r| {
                    let mut rng = stream_rng(cfg.seed, s.0 as u64, r as u64);
                    one_walk(g, s, cfg.walk_length, &mut rng)
                })
                .collect()
        })
        .collect();
    WalkCorpus::from_walks(g.len(), per_start.into_iter().flatten())
}

/// Exact visit counts per paper and a histogram of walk lengths
/// (`lengths[l]` = number of walks with exactly `l` tokens).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats {
    pub visits: Vec<u64>,
    pub lengths: Vec<u64>,
}

pub fn corpus_stats(corpus: &WalkCorpus) -> CorpusStats {
    let mut visits = vec![0u64; corpus.n_papers()];
    let mut lengths = Vec::new();
    for w in corpus.iter() {
        if w.len() >= lengths.len() {
            lengths.resize(w.len() + 1, 0);
        }
        lengths[w.len()] += 1;
        for &t in w {
            visits[t as usize] += 1;
        }
    }
    CorpusStats { visits, lengths }
}
