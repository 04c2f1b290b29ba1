//! Degree- and year-preserving randomization of the citation network.
//!
//! Edges are grouped into strata by their ordered `(citing_year,
//! cited_year)` pair. Within each stratum the multiset of citing endpoints
//! and the multiset of cited endpoints are kept as-is while the assignment
//! between them is permuted uniformly at random. Per-paper in-degree,
//! out-degree, and the year-pair multiset of edges are therefore preserved
//! exactly; everything else is randomized.
//!
//! A permutation that creates a self-loop or duplicate edge (possible in
//! same-year strata) is redrawn; the retry cap turns pathological strata
//! into an explicit error instead of a hang.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use thiserror::Error;

use crate::disruption::{disruption_all, DisruptionConfig, DisruptionRow, DisruptionVariants};
use crate::edm::{edm_all, EdmRow};
use crate::embed::{train, TrainConfig, TrainError};
use crate::graph::{CitationGraph, GraphError};
use crate::rng::stream_rng;
use crate::walk::{generate_walks, WalkConfig};

#[derive(Debug, Clone)]
pub struct RewireConfig {
    pub seed: u64,
    pub forbid_self_loops: bool,
    pub forbid_duplicate_edges: bool,
    pub max_retries_per_stratum: u32,
    /// Test hook: keep every stratum permutation as the identity, yielding
    /// the original graph.
    pub identity: bool,
}

impl Default for RewireConfig {
    fn default() -> Self {
        RewireConfig {
            seed: 0,
            forbid_self_loops: true,
            forbid_duplicate_edges: true,
            max_retries_per_stratum: 200,
            identity: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum RewireError {
    #[error(
        "stratum ({citing_year} -> {cited_year}) with {edges} edges cannot satisfy \
         self-loop/duplicate constraints after {retries} retries"
    )]
    StratumUnsatisfiable {
        citing_year: i32,
        cited_year: i32,
        edges: usize,
        retries: u32,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn stratum_violations(
    citing: &[u32],
    cited: &[u32],
    cfg: &RewireConfig,
) -> Vec<usize> {
    let mut bad = Vec::new();
    let mut counts: std::collections::HashMap<(u32, u32), u32> = Default::default();
    if cfg.forbid_duplicate_edges {
        for (&u, &v) in citing.iter().zip(cited) {
            *counts.entry((u, v)).or_default() += 1;
        }
    }
    let mut seen_once: HashSet<(u32, u32)> = HashSet::new();
    for (i, (&u, &v)) in citing.iter().zip(cited.iter()).enumerate() {
        if cfg.forbid_self_loops && u == v {
            bad.push(i);
            continue;
        }
        if cfg.forbid_duplicate_edges && counts[&(u, v)] > 1 && !seen_once.insert((u, v)) {
            // every copy beyond the first is a violation
            bad.push(i);
        }
    }
    bad
}

/// Resolve residual collisions by swapping cited endpoints between edge
/// slots; a swap preserves both endpoint multisets exactly.
fn swap_repair(
    citing: &[u32],
    cited: &mut [u32],
    cfg: &RewireConfig,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> bool {
    use rand::Rng;
    let n = cited.len();
    let mut counts: std::collections::HashMap<(u32, u32), u32> = Default::default();
    for (&u, &v) in citing.iter().zip(cited.iter()) {
        *counts.entry((u, v)).or_default() += 1;
    }
    let is_bad = |u: u32, v: u32, counts: &std::collections::HashMap<(u32, u32), u32>| {
        (cfg.forbid_self_loops && u == v)
            || (cfg.forbid_duplicate_edges && counts.get(&(u, v)).copied().unwrap_or(0) > 1)
    };
    for _sweep in 0..cfg.max_retries_per_stratum.max(1) {
        let bad: Vec<usize> = (0..n)
            .filter(|&i| is_bad(citing[i], cited[i], &counts))
            .collect();
        if bad.is_empty() {
            return true;
        }
        let mut progressed = false;
        for &i in &bad {
            if !is_bad(citing[i], cited[i], &counts) {
                continue; // fixed by an earlier swap this sweep
            }
            for _ in 0..32 {
                let j = rng.random_range(0..n);
                if j == i {
                    continue;
                }
                let (ui, vi) = (citing[i], cited[i]);
                let (uj, vj) = (citing[j], cited[j]);
                if (ui, vi) == (uj, vj) {
                    continue; // swapping identical slots resolves nothing
                }
                if cfg.forbid_self_loops && (ui == vj || uj == vi) {
                    continue;
                }
                if cfg.forbid_duplicate_edges {
                    // counts after removing (ui,vi),(uj,vj) and adding the
                    // swapped pair must stay at most 1
                    let after = |e: (u32, u32)| {
                        let mut c = counts.get(&e).copied().unwrap_or(0);
                        if e == (ui, vi) {
                            c -= 1;
                        }
                        if e == (uj, vj) {
                            c -= 1;
                        }
                        c
                    };
                    if after((ui, vj)) >= 1 || after((uj, vi)) >= 1 {
                        continue;
                    }
                }
                *counts.get_mut(&(ui, vi)).unwrap() -= 1;
                *counts.get_mut(&(uj, vj)).unwrap() -= 1;
                *counts.entry((ui, vj)).or_default() += 1;
                *counts.entry((uj, vi)).or_default() += 1;
                cited.swap(i, j);
                progressed = true;
                break;
            }
        }
        if !progressed {
            return false;
        }
    }
    (0..n).all(|i| !is_bad(citing[i], cited[i], &counts))
}

/// Shuffle cited endpoints within every `(citing_year, cited_year)` stratum.
pub fn rewire(g: &CitationGraph, cfg: &RewireConfig) -> Result<CitationGraph, RewireError> {
    let mut strata: BTreeMap<(i32, i32), Vec<(u32, u32)>> = BTreeMap::new();
    for (citing, cited) in g.edges() {
        strata
            .entry((g.year(citing), g.year(cited)))
            .or_default()
            .push((citing.0, cited.0));
    }

    let strata: Vec<((i32, i32), Vec<(u32, u32)>)> = strata.into_iter().collect();
    let rewired: Result<Vec<Vec<(u32, u32)>>, RewireError> = strata
        .par_iter()
        .map(|&((yi, yj), ref edges)| {
            if cfg.identity || edges.len() == 1 {
                return Ok(edges.clone());
            }
            let mut rng = stream_rng(cfg.seed, yi as i64 as u64, yj as i64 as u64);
            let citing: Vec<u32> = edges.iter().map(|&(u, _)| u).collect();
            let mut cited: Vec<u32> = edges.iter().map(|&(_, v)| v).collect();
            // whole-stratum redraws first; heavy-tailed strata where a clean
            // shuffle is too unlikely fall back to collision-repair swaps,
            // which keep both endpoint multisets intact
            let mut ok = false;
            for _ in 0..=cfg.max_retries_per_stratum.min(16) {
                cited.shuffle(&mut rng);
                if stratum_violations(&citing, &cited, cfg).is_empty() {
                    ok = true;
                    break;
                }
            }
            if !ok {
                ok = swap_repair(&citing, &mut cited, cfg, &mut rng);
            }
            if !ok {
                return Err(RewireError::StratumUnsatisfiable {
                    citing_year: yi,
                    cited_year: yj,
                    edges: edges.len(),
                    retries: cfg.max_retries_per_stratum,
                });
            }
            Ok(citing.into_iter().zip(cited).collect())
        })
        .collect();

    let edges: Vec<(u32, u32)> = rewired?.into_iter().flatten().collect();
    let keys: Vec<String> = g.papers().map(|p| g.key(p).to_string()).collect();
    let meta: Vec<(i32, crate::graph::DocType)> = g
        .papers()
        .map(|p| (g.meta(p).year, g.meta(p).doc_type))
        .collect();
    let mut out =
        CitationGraph::from_parts(keys, meta, edges, !cfg.forbid_duplicate_edges)?;
    out.copy_exclusion_from(g);
    Ok(out)
}

#[derive(Debug, Error)]
pub enum NullPipelineError {
    #[error(transparent)]
    Rewire(#[from] RewireError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Paired original-vs-null score tables for downstream comparison.
#[derive(Debug)]
pub struct NullComparison {
    pub original_disruption: Vec<DisruptionRow>,
    pub null_disruption: Vec<DisruptionRow>,
    pub original_edm: Vec<EdmRow>,
    pub null_edm: Vec<EdmRow>,
    pub rewired: CitationGraph,
}

/// Run the full scoring pipeline on the original and the rewired network:
/// disruption on both graphs, then walks -> training -> EDM on both.
pub fn null_pipeline(
    g: &CitationGraph,
    walk_cfg: &WalkConfig,
    train_cfg: &TrainConfig,
    rewire_cfg: &RewireConfig,
    variants: &DisruptionVariants,
    disruption_cfg: &DisruptionConfig,
) -> Result<NullComparison, NullPipelineError> {
    let rewired = rewire(g, rewire_cfg)?;

    let original_disruption = disruption_all(g, variants, disruption_cfg);
    let null_disruption = disruption_all(&rewired, variants, disruption_cfg);

    let corpus = generate_walks(g, walk_cfg);
    let table = train(&corpus, train_cfg)?;
    let original_edm = edm_all(&table, g);

    let null_corpus = generate_walks(&rewired, walk_cfg);
    let null_table = train(&null_corpus, train_cfg)?;
    let null_edm = edm_all(&null_table, &rewired);

    Ok(NullComparison {
        original_disruption,
        null_disruption,
        original_edm,
        null_edm,
        rewired,
    })
}
