//! The embedding disruptiveness measure.
//!
//! For a paper with trained vectors, the score is the cosine distance
//! between its future and past rows:
//!
//! ```text
//! delta = 1 - (f . p) / (|f| |p|)
//! ```
//!
//! ranging over [0, 2]; larger means descendants rely less on antecedents.
//! The geodesic variant is the angle `arccos(1 - delta)`; it is a strictly
//! monotone transform, so percentile rankings under either metric are
//! identical. Percentiles use the mid-rank convention `(r - 0.5) / n * 100`
//! with ties sharing their average rank, computed over papers that are both
//! valid (trained, nonzero norms) and not filtered out.

use thiserror::Error;

use crate::embed::EmbeddingTable;
use crate::graph::{CitationGraph, GraphError, PaperId};

/// Norms below this are treated as untrained to keep the cosine stable.
const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EdmError {
    #[error("empty input")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdmScores {
    pub delta: Option<f64>,
    pub geodesic: Option<f64>,
    /// Mid-rank percentile among valid, non-excluded papers; only filled by
    /// batch scoring.
    pub percentile: Option<f64>,
    pub valid: bool,
}

impl EdmScores {
    fn invalid() -> EdmScores {
        EdmScores {
            delta: None,
            geodesic: None,
            percentile: None,
            valid: false,
        }
    }
}

fn cosine_delta(f: &[f32], p: &[f32]) -> Option<f64> {
    let mut dot = 0.0f64;
    let mut nf = 0.0f64;
    let mut np = 0.0f64;
    for i in 0..f.len() {
        let a = f[i] as f64;
        let b = p[i] as f64;
        dot += a * b;
        nf += a * a;
        np += b * b;
    }
    let nf = nf.sqrt();
    let np = np.sqrt();
    if nf <= NORM_EPS || np <= NORM_EPS {
        return None;
    }
    let cos = (dot / (nf * np)).clamp(-1.0, 1.0);
    Some(1.0 - cos)
}

/// Score a single paper. `valid=false` (with no delta) when the paper is
/// untrained or a vector norm is effectively zero.
pub fn edm_score(table: &EmbeddingTable, paper: PaperId) -> Result<EdmScores, GraphError> {
    if paper.index() >= table.n() {
        return Err(GraphError::UnknownPaper(paper.0));
    }
    if !table.is_trained(paper) {
        return Ok(EdmScores::invalid());
    }
    match cosine_delta(table.future_row(paper), table.past_row(paper)) {
        None => Ok(EdmScores::invalid()),
        Some(delta) => Ok(EdmScores {
            delta: Some(delta),
            geodesic: Some((1.0 - delta).clamp(-1.0, 1.0).acos()),
            percentile: None,
            valid: true,
        }),
    }
}

/// Mid-rank percentiles in [0, 100]: `(rank - 0.5) / n * 100`, ties
/// averaged. Monotone: `x <= y` implies `pct(x) <= pct(y)`.
pub fn percentile_rank(values: &[f64]) -> Result<Vec<f64>, EdmError> {
    if values.is_empty() {
        return Err(EdmError::EmptyInput);
    }
    let n = values.len() as f64;
    Ok(crate::stats::fractional_ranks(values)
        .into_iter()
        .map(|r| (r - 0.5) / n * 100.0)
        .collect())
}

#[derive(Debug, Clone)]
pub struct EdmRow {
    pub paper: PaperId,
    pub scores: EdmScores,
}

/// Score every paper and attach percentiles computed over the valid,
/// non-excluded subset. Output is in dense id order.
pub fn edm_all(table: &EmbeddingTable, g: &CitationGraph) -> Vec<EdmRow> {
    assert_eq!(
        table.n(),
        g.len(),
        "embedding table and graph disagree on paper count"
    );
    let mut rows: Vec<EdmRow> = g
        .papers()
        .map(|p| EdmRow {
            paper: p,
            scores: edm_score(table, p).expect("paper id in range"),
        })
        .collect();

    let ranked: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.scores.valid && !g.is_excluded(r.paper))
        .map(|(i, _)| i)
        .collect();
    if ranked.is_empty() {
        return rows;
    }
    let deltas: Vec<f64> = ranked
        .iter()
        .map(|&i| rows[i].scores.delta.expect("valid row has delta"))
        .collect();
    let pcts = percentile_rank(&deltas).expect("non-empty");
    for (&i, pct) in ranked.iter().zip(pcts) {
        rows[i].scores.percentile = Some(pct);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::EmbeddingTable;
    use crate::graph::DocType;

    fn table(dim: usize, past: Vec<f32>, future: Vec<f32>) -> EmbeddingTable {
        let n = past.len() / dim;
        EmbeddingTable::from_raw(dim, past, future, vec![true; n])
    }

    fn plain_graph(n: usize) -> CitationGraph {
        let keys: Vec<String> = (0..n).map(|i| format!("P{i}")).collect();
        let meta = vec![(2000, DocType::Article); n];
        let edges = if n >= 2 { vec![(1u32, 0u32)] } else { vec![] };
        CitationGraph::from_parts(keys, meta, edges, false).unwrap()
    }

    #[test]
    fn identical_vectors_give_zero() {
        let t = table(2, vec![3.0, 4.0], vec![3.0, 4.0]);
        let s = edm_score(&t, PaperId(0)).unwrap();
        assert!(s.valid);
        assert!(s.delta.unwrap().abs() < 1e-12);
        assert!(s.geodesic.unwrap().abs() < 1e-6);
    }

    #[test]
    fn orthogonal_vectors_give_one() {
        let t = table(2, vec![1.0, 0.0], vec![0.0, 2.0]);
        let s = edm_score(&t, PaperId(0)).unwrap();
        assert!((s.delta.unwrap() - 1.0).abs() < 1e-12);
        assert!((s.geodesic.unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn antiparallel_vectors_give_two() {
        let t = table(3, vec![1.0, -2.0, 0.5], vec![-2.0, 4.0, -1.0]);
        let s = edm_score(&t, PaperId(0)).unwrap();
        assert!((s.delta.unwrap() - 2.0).abs() < 1e-12);
        assert!((s.geodesic.unwrap() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn zero_norm_or_untrained_is_invalid() {
        let t = table(2, vec![0.0, 0.0], vec![1.0, 1.0]);
        let s = edm_score(&t, PaperId(0)).unwrap();
        assert!(!s.valid);
        assert_eq!(s.delta, None);

        let t = EmbeddingTable::from_raw(2, vec![1.0, 0.0], vec![1.0, 0.0], vec![false]);
        let s = edm_score(&t, PaperId(0)).unwrap();
        assert!(!s.valid);
    }

    #[test]
    fn unknown_paper_is_an_error() {
        let t = table(2, vec![1.0, 0.0], vec![1.0, 0.0]);
        assert!(edm_score(&t, PaperId(5)).is_err());
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(percentile_rank(&[5.0]).unwrap(), vec![50.0]);
        assert_eq!(
            percentile_rank(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            vec![12.5, 37.5, 62.5, 87.5]
        );
        let p = percentile_rank(&[0.1, 0.5, 0.9]).unwrap();
        assert!((p[0] - 50.0 / 3.0).abs() < 1e-9);
        assert!((p[1] - 50.0).abs() < 1e-9);
        assert!((p[2] - 250.0 / 3.0).abs() < 1e-9);
        assert!(percentile_rank(&[]).is_err());
    }

    #[test]
    fn percentile_total_tie_is_fifty() {
        let p = percentile_rank(&[0.3; 7]).unwrap();
        assert!(p.iter().all(|&x| (x - 50.0).abs() < 1e-9));
    }

    #[test]
    fn percentile_monotone_on_increasing_input() {
        let vals: Vec<f64> = (0..20).map(|i| i as f64 * 0.01).collect();
        let p = percentile_rank(&vals).unwrap();
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scaling_vectors_leaves_scores_unchanged() {
        let past = vec![0.2, -0.7, 0.5, 1.0, 0.0, -0.3];
        let future = vec![-0.1, 0.4, 0.9, 0.2, 0.8, -0.6];
        let g = plain_graph(2);
        let a = edm_all(&table(3, past.clone(), future.clone()), &g);
        // powers of two scale f32 entries exactly; delta must be bit-equal
        let t4 = table(
            3,
            past.iter().map(|x| x * 4.0).collect(),
            future.iter().map(|x| x * 4.0).collect(),
        );
        let b = edm_all(&t4, &g);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.scores.delta, y.scores.delta);
            assert_eq!(x.scores.percentile, y.scores.percentile);
        }
        // a non-representable scalar rounds the stored entries; the cosine
        // still agrees to f32 precision and the ranking is unchanged
        let t3 = table(
            3,
            past.iter().map(|x| x * 3.0).collect(),
            future.iter().map(|x| x * 3.0).collect(),
        );
        let c = edm_all(&t3, &g);
        for (x, y) in a.iter().zip(&c) {
            let dx = x.scores.delta.unwrap();
            let dy = y.scores.delta.unwrap();
            assert!((dx - dy).abs() <= 1e-6 * dx.abs().max(1.0));
            assert_eq!(x.scores.percentile, y.scores.percentile);
        }
    }

    #[test]
    fn batch_percentiles_use_midrank_and_skip_excluded() {
        // four papers, deltas 0, 1, 2 for the first three; last one excluded
        let past = vec![
            1.0, 0.0, // delta 0
            1.0, 0.0, // delta 1
            1.0, 0.0, // delta 2
            1.0, 0.0,
        ];
        let future = vec![
            1.0, 0.0, //
            0.0, 1.0, //
            -1.0, 0.0, //
            1.0, 0.0,
        ];
        let t = table(2, past, future);
        // the last paper falls outside the year window and is excluded
        let keys: Vec<String> = (0..4).map(|i| format!("P{i}")).collect();
        let meta: Vec<(i32, DocType)> = (0..4)
            .map(|i| (if i == 3 { 1900 } else { 2000 }, DocType::Article))
            .collect();
        let mut g = CitationGraph::from_parts(keys, meta, vec![(1, 0)], false).unwrap();
        g.apply_filter(&crate::graph::FilterPolicy {
            min_citations: 0,
            min_references: 0,
            year_lo: 1999,
            year_hi: 2001,
            drop_doc_types: vec![],
        })
        .unwrap();
        assert!(g.is_excluded(PaperId(3)));

        let rows = edm_all(&t, &g);
        let pct: Vec<Option<f64>> = rows.iter().map(|r| r.scores.percentile).collect();
        let expect = percentile_rank(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(pct[0], Some(expect[0]));
        assert_eq!(pct[1], Some(expect[1]));
        assert_eq!(pct[2], Some(expect[2]));
        assert_eq!(pct[3], None, "excluded paper gets no percentile");
        assert!(rows[3].scores.delta.is_some(), "but keeps its delta");
    }

    #[test]
    fn geodesic_ranking_equals_delta_ranking() {
        let mut rng = crate::rng::stream_rng(17, 0, 0);
        let n = 40;
        let dim = 6;
        let rv = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f32> {
            (0..dim)
                .map(|_| rand::Rng::random_range(rng, -1.0..1.0f32))
                .collect()
        };
        let mut past = Vec::new();
        let mut future = Vec::new();
        for _ in 0..n {
            past.extend(rv(&mut rng));
            future.extend(rv(&mut rng));
        }
        let t = table(dim, past, future);
        let g = plain_graph(n);
        let rows = edm_all(&t, &g);
        let deltas: Vec<f64> = rows.iter().map(|r| r.scores.delta.unwrap()).collect();
        let geos: Vec<f64> = rows.iter().map(|r| r.scores.geodesic.unwrap()).collect();
        let rank_d = crate::stats::fractional_ranks(&deltas);
        let rank_g = crate::stats::fractional_ranks(&geos);
        assert_eq!(rank_d, rank_g);
    }
}
