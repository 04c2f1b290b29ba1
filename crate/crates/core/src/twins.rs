//! Simultaneous-discovery candidate detection.
//!
//! Two papers representing one discovery are used by later work in the same
//! contexts, so their future vectors end up closest to each other. The
//! detector pairs same-year papers that are mutual nearest neighbors under
//! cosine distance over future vectors. Search is exact brute force — it
//! doubles as the oracle for any accelerated index added later, so it must
//! stay exact.

use rayon::prelude::*;
use thiserror::Error;

use crate::embed::EmbeddingTable;
use crate::graph::{CitationGraph, DocType, PaperId};

const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum TwinError {
    #[error("unknown paper id {0}")]
    UnknownPaper(u32),
    #[error("paper {0} has no valid vector on the queried side")]
    InvalidQuery(u32),
    #[error("no valid candidates for paper {0}")]
    NoCandidates(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorSide {
    Future,
    Past,
}

/// Candidate simultaneous-discovery pair, canonically ordered `a < b`.
#[derive(Debug, Clone)]
pub struct CandidatePair {
    pub a: PaperId,
    pub b: PaperId,
    pub cosine_distance: f64,
    pub year: i32,
    pub mutual: bool,
    pub min_citations_met: bool,
}

/// Pairing policy mirroring the selection the measure is used with: same
/// publication year, document types excluded from candidacy, and a citation
/// floor applied to emitted pairs.
#[derive(Debug, Clone)]
pub struct TwinPolicy {
    pub same_year: bool,
    pub exclude_doc_types: Vec<DocType>,
    pub min_citations: u64,
    /// Keep only mutual nearest-neighbor pairs (a matching). When false,
    /// every paper's nearest neighbor produces a candidate row and `mutual`
    /// records whether the relation is symmetric.
    pub mutual_only: bool,
}

impl Default for TwinPolicy {
    fn default() -> Self {
        TwinPolicy {
            same_year: true,
            exclude_doc_types: vec![],
            min_citations: 0,
            mutual_only: true,
        }
    }
}

fn norm(row: &[f32]) -> f64 {
    row.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
}

fn side_row<'t>(table: &'t EmbeddingTable, side: VectorSide, p: PaperId) -> &'t [f32] {
    match side {
        VectorSide::Future => table.future_row(p),
        VectorSide::Past => table.past_row(p),
    }
}

fn is_valid(table: &EmbeddingTable, side: VectorSide, p: PaperId) -> bool {
    table.is_trained(p) && norm(side_row(table, side, p)) > NORM_EPS
}

fn cosine_distance(a: &[f32], b: &[f32], norm_a: f64, norm_b: f64) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| (x as f64) * (y as f64)).sum();
    1.0 - (dot / (norm_a * norm_b)).clamp(-1.0, 1.0)
}

fn nearest_neighbor(
    table: &EmbeddingTable,
    g: &CitationGraph,
    query: PaperId,
    side: VectorSide,
    same_year_only: bool,
) -> Result<(PaperId, f64), TwinError> {
    if query.index() >= table.n() {
        return Err(TwinError::UnknownPaper(query.0));
    }
    if !is_valid(table, side, query) {
        return Err(TwinError::InvalidQuery(query.0));
    }
    let qrow = side_row(table, side, query);
    let qnorm = norm(qrow);
    let qyear = g.year(query);

    let mut best: Option<(PaperId, f64)> = None;
    for p in g.papers() {
        if p == query || !is_valid(table, side, p) {
            continue;
        }
        if same_year_only && g.year(p) != qyear {
            continue;
        }
        let row = side_row(table, side, p);
        let dist = cosine_distance(qrow, row, qnorm, norm(row));
        // ascending scan: strict improvement keeps the lowest id on ties
        if best.map_or(true, |(_, d)| dist < d) {
            best = Some((p, dist));
        }
    }
    best.ok_or(TwinError::NoCandidates(query.0))
}

/// Exact nearest neighbor of `query` in future-vector space.
pub fn nearest_future_neighbor(
    table: &EmbeddingTable,
    g: &CitationGraph,
    query: PaperId,
    same_year_only: bool,
) -> Result<(PaperId, f64), TwinError> {
    nearest_neighbor(table, g, query, VectorSide::Future, same_year_only)
}

/// Exact nearest neighbor of `query` in past-vector space.
pub fn nearest_past_neighbor(
    table: &EmbeddingTable,
    g: &CitationGraph,
    query: PaperId,
    same_year_only: bool,
) -> Result<(PaperId, f64), TwinError> {
    nearest_neighbor(table, g, query, VectorSide::Past, same_year_only)
}

/// Find candidate pairs over the policy's candidate set. Pairs come out
/// sorted by ascending cosine distance; in mutual mode the result is a
/// matching (no paper appears twice).
pub fn find_candidate_pairs(
    table: &EmbeddingTable,
    g: &CitationGraph,
    policy: &TwinPolicy,
) -> Vec<CandidatePair> {
    find_pairs_on_side(table, g, policy, VectorSide::Future)
}

/// Same pairing over past vectors; used to contrast recovery rates.
pub fn find_candidate_pairs_past(
    table: &EmbeddingTable,
    g: &CitationGraph,
    policy: &TwinPolicy,
) -> Vec<CandidatePair> {
    find_pairs_on_side(table, g, policy, VectorSide::Past)
}

fn find_pairs_on_side(
    table: &EmbeddingTable,
    g: &CitationGraph,
    policy: &TwinPolicy,
    side: VectorSide,
) -> Vec<CandidatePair> {
    assert_eq!(table.n(), g.len());
    let candidate: Vec<bool> = g
        .papers()
        .map(|p| {
            is_valid(table, side, p)
                && !policy.exclude_doc_types.contains(&g.meta(p).doc_type)
        })
        .collect();
    let norms: Vec<f64> = g
        .papers()
        .map(|p| {
            if candidate[p.index()] {
                norm(side_row(table, side, p))
            } else {
                0.0
            }
        })
        .collect();

    let ids: Vec<u32> = (0..g.len() as u32).collect();
    let nn: Vec<Option<(u32, f64)>> = ids
        .par_iter()
        .map(|&qi| {
            if !candidate[qi as usize] {
                return None;
            }
            let q = PaperId(qi);
            let qrow = side_row(table, side, q);
            let qyear = g.year(q);
            let mut best: Option<(u32, f64)> = None;
            for p in 0..g.len() as u32 {
                if p == qi || !candidate[p as usize] {
                    continue;
                }
                if policy.same_year && g.year(PaperId(p)) != qyear {
                    continue;
                }
                let dist = cosine_distance(
                    qrow,
                    side_row(table, side, PaperId(p)),
                    norms[qi as usize],
                    norms[p as usize],
                );
                if best.map_or(true, |(_, d)| dist < d) {
                    best = Some((p, dist));
                }
            }
            best
        })
        .collect();

    let mut pairs = Vec::new();
    let mut push_pair = |a: u32, b: u32, dist: f64, mutual: bool| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let citations = |x: u32| g.in_degree(PaperId(x)) as u64;
        let met = citations(a) >= policy.min_citations && citations(b) >= policy.min_citations;
        if policy.min_citations > 0 && !met {
            return;
        }
        pairs.push(CandidatePair {
            a: PaperId(a),
            b: PaperId(b),
            cosine_distance: dist,
            year: g.year(PaperId(a)),
            mutual,
            min_citations_met: met,
        });
    };

    if policy.mutual_only {
        for (qi, entry) in nn.iter().enumerate() {
            if let Some((p, dist)) = entry {
                // emit each mutual pair once, from its lower endpoint
                if (qi as u32) < *p && nn[*p as usize] == Some((qi as u32, *dist)) {
                    push_pair(qi as u32, *p, *dist, true);
                }
            }
        }
    } else {
        let mut seen = std::collections::HashSet::new();
        for (qi, entry) in nn.iter().enumerate() {
            if let Some((p, dist)) = entry {
                let key = (qi.min(*p as usize), qi.max(*p as usize));
                if !seen.insert(key) {
                    continue;
                }
                let mutual = nn[*p as usize].map_or(false, |(back, _)| back == qi as u32);
                push_pair(qi as u32, *p, *dist, mutual);
            }
        }
    }

    pairs.sort_by(|x, y| {
        x.cosine_distance
            .partial_cmp(&y.cosine_distance)
            .expect("distances are finite")
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });
    pairs
}
