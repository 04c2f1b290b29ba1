//! The disruption index and its variants.
//!
//! For a focal paper, citing papers split into `n_i` (cite the focal paper
//! but none of its references) and `n_j` (cite the focal paper and at least
//! one reference); `n_k` counts papers citing at least one reference while
//! not citing the focal paper. The index is
//!
//! ```text
//! d = (n_i - n_j) / (n_i + n_j + n_k)
//! ```
//!
//! `d = 1` iff every citer ignores the references and nothing else cites
//! them; `d = -1` iff every citer also cites a reference and nothing else
//! does. A paper with no in-scope citers has no defined score and is
//! reported as an explicit undefined marker, never coerced to 0.
//!
//! Variants: `d_nok` drops the `n_k` term; the horizon variant restricts
//! citers and `n_k` contributors to papers published within a fixed number
//! of years after the focal paper; the two-step variant expands the
//! antecedent and descendant sets to two citation hops.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::graph::{CitationGraph, GraphError, PaperId};

/// Counting options shared by all variants.
#[derive(Debug, Clone)]
pub struct DisruptionConfig {
    /// Count a paper toward `n_k` only if it was published no earlier than
    /// the focal paper. The index measures impact on subsequent works, so
    /// this defaults to true; switch off for legacy comparability where
    /// earlier papers citing the same references are counted too.
    pub nk_requires_later_year: bool,
}

impl Default for DisruptionConfig {
    fn default() -> Self {
        DisruptionConfig {
            nk_requires_later_year: true,
        }
    }
}

/// Exact counts and derived scores for one focal paper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisruptionScores {
    pub n_i: u64,
    pub n_j: u64,
    pub n_k: u64,
    /// `(n_i - n_j) / (n_i + n_j + n_k)`; `None` when the focal paper has no
    /// in-scope citers.
    pub d: Option<f64>,
    /// `(n_i - n_j) / (n_i + n_j)`; `None` under the same condition.
    pub d_nok: Option<f64>,
}

impl DisruptionScores {
    fn from_counts(n_i: u64, n_j: u64, n_k: u64) -> DisruptionScores {
        let citers = n_i + n_j;
        let (d, d_nok) = if citers == 0 {
            (None, None)
        } else {
            let num = n_i as f64 - n_j as f64;
            (
                Some(num / (n_i + n_j + n_k) as f64),
                Some(num / citers as f64),
            )
        };
        DisruptionScores {
            n_i,
            n_j,
            n_k,
            d,
            d_nok,
        }
    }
}

/// Year window applied to citers and `n_k` contributors.
#[derive(Debug, Clone, Copy)]
enum Scope {
    Full,
    Horizon { max_year: i32 },
}

impl Scope {
    #[inline]
    fn admits(&self, year: i32) -> bool {
        match *self {
            Scope::Full => true,
            Scope::Horizon { max_year } => year <= max_year,
        }
    }
}

fn count_one_step(
    g: &CitationGraph,
    focal: PaperId,
    cfg: &DisruptionConfig,
    scope: Scope,
) -> DisruptionScores {
    let refs = g.references(focal);
    let focal_year = g.year(focal);

    let mut n_i = 0u64;
    let mut n_j = 0u64;
    for &c in g.citers(focal) {
        let c = PaperId(c);
        if !scope.admits(g.year(c)) {
            continue;
        }
        let cites_a_ref = g
            .references(c)
            .iter()
            .any(|r| refs.binary_search(r).is_ok());
        if cites_a_ref {
            n_j += 1;
        } else {
            n_i += 1;
        }
    }

    let citers = g.citers(focal);
    let mut nk_set: HashSet<u32> = HashSet::new();
    for &r in refs {
        for &p in g.citers(PaperId(r)) {
            if p == focal.0 || citers.binary_search(&p).is_ok() {
                continue;
            }
            let py = g.year(PaperId(p));
            if !scope.admits(py) {
                continue;
            }
            if cfg.nk_requires_later_year && py < focal_year {
                continue;
            }
            nk_set.insert(p);
        }
    }

    DisruptionScores::from_counts(n_i, n_j, nk_set.len() as u64)
}

/// Classic one-step disruption index.
pub fn disruption_index(
    g: &CitationGraph,
    focal: PaperId,
    cfg: &DisruptionConfig,
) -> Result<DisruptionScores, GraphError> {
    g.check_paper(focal)?;
    Ok(count_one_step(g, focal, cfg, Scope::Full))
}

/// Disruption index restricted to citations within `horizon_years` after the
/// focal paper. Citers and `n_k` contributors outside the window are
/// ignored.
pub fn disruption_horizon(
    g: &CitationGraph,
    focal: PaperId,
    horizon_years: i32,
    cfg: &DisruptionConfig,
) -> Result<DisruptionScores, GraphError> {
    g.check_paper(focal)?;
    let max_year = g.year(focal).saturating_add(horizon_years);
    Ok(count_one_step(g, focal, cfg, Scope::Horizon { max_year }))
}

/// Papers reachable from `start` in one or two hops along `next`, excluding
/// `start` itself.
fn two_hop_set<'a>(
    start: PaperId,
    next: impl Fn(PaperId) -> &'a [u32],
) -> HashSet<u32> {
    let mut set = HashSet::new();
    for &a in next(start) {
        set.insert(a);
        for &b in next(PaperId(a)) {
            set.insert(b);
        }
    }
    set.remove(&start.0);
    set
}

/// Disruption index over two citation steps: antecedents are papers cited
/// within two hops, descendants are papers citing within two hops.
pub fn disruption_two_step(
    g: &CitationGraph,
    focal: PaperId,
    cfg: &DisruptionConfig,
) -> Result<DisruptionScores, GraphError> {
    g.check_paper(focal)?;
    let antecedents = two_hop_set(focal, |p| g.references(p));
    let descendants = two_hop_set(focal, |p| g.citers(p));
    let focal_year = g.year(focal);

    let mut n_i = 0u64;
    let mut n_j = 0u64;
    for &dsc in &descendants {
        let cites_antecedent = g
            .references(PaperId(dsc))
            .iter()
            .any(|r| antecedents.contains(r));
        if cites_antecedent {
            n_j += 1;
        } else {
            n_i += 1;
        }
    }

    let mut nk_set: HashSet<u32> = HashSet::new();
    for &a in &antecedents {
        for &p in g.citers(PaperId(a)) {
            if p == focal.0 || descendants.contains(&p) {
                continue;
            }
            if cfg.nk_requires_later_year && g.year(PaperId(p)) < focal_year {
                continue;
            }
            nk_set.insert(p);
        }
    }

    Ok(DisruptionScores::from_counts(n_i, n_j, nk_set.len() as u64))
}

/// Which variants a batch run computes.
#[derive(Debug, Clone, Default)]
pub struct DisruptionVariants {
    pub nok: bool,
    pub horizon: Option<i32>,
    pub two_step: bool,
}

/// One output row of [`disruption_all`]. Counts are the one-step counts;
/// variant columns are `None` when not requested or undefined.
#[derive(Debug, Clone)]
pub struct DisruptionRow {
    pub paper: PaperId,
    pub n_i: u64,
    pub n_j: u64,
    pub n_k: u64,
    pub d: Option<f64>,
    pub d_nok: Option<f64>,
    pub d_horizon: Option<f64>,
    pub d_two: Option<f64>,
}

/// Batch scores for every non-excluded paper, in dense id order. Pure
/// per-paper computation over the immutable graph, partitioned across
/// threads.
pub fn disruption_all(
    g: &CitationGraph,
    variants: &DisruptionVariants,
    cfg: &DisruptionConfig,
) -> Vec<DisruptionRow> {
    let papers: Vec<PaperId> = g.papers().filter(|&p| !g.is_excluded(p)).collect();
    papers
        .into_par_iter()
        .map(|p| {
            let base = count_one_step(g, p, cfg, Scope::Full);
            let d_horizon = variants.horizon.and_then(|h| {
                disruption_horizon(g, p, h, cfg).expect("paper id valid").d
            });
            let d_two = if variants.two_step {
                disruption_two_step(g, p, cfg).expect("paper id valid").d
            } else {
                None
            };
            DisruptionRow {
                paper: p,
                n_i: base.n_i,
                n_j: base.n_j,
                n_k: base.n_k,
                d: base.d,
                d_nok: if variants.nok { base.d_nok } else { None },
                d_horizon,
                d_two,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DocType;

    /// Graph from an edge list over `n` papers, all years equal unless given.
    fn graph(n: usize, edges: &[(u32, u32)], years: Option<&[i32]>) -> CitationGraph {
        let keys: Vec<String> = (0..n).map(|i| format!("P{i}")).collect();
        let meta: Vec<(i32, DocType)> = (0..n)
            .map(|i| (years.map_or(2000, |y| y[i]), DocType::Article))
            .collect();
        CitationGraph::from_parts(keys, meta, edges.to_vec(), false).unwrap()
    }

    /// Independent recount straight off the edge list; the implementation
    /// under test never sees this path.
    fn brute_force(
        n: usize,
        edges: &[(u32, u32)],
        years: &[i32],
        focal: u32,
        nk_requires_later_year: bool,
        max_year: Option<i32>,
    ) -> (u64, u64, u64) {
        let cites = |a: u32, b: u32| edges.iter().any(|&(u, v)| u == a && v == b);
        let refs: Vec<u32> = (0..n as u32).filter(|&v| cites(focal, v)).collect();
        let citers: Vec<u32> = (0..n as u32).filter(|&u| cites(u, focal)).collect();
        let in_scope = |p: u32| max_year.map_or(true, |m| years[p as usize] <= m);

        let mut n_i = 0;
        let mut n_j = 0;
        for &c in citers.iter().filter(|&&c| in_scope(c)) {
            if refs.iter().any(|&r| cites(c, r)) {
                n_j += 1;
            } else {
                n_i += 1;
            }
        }
        let n_k = (0..n as u32)
            .filter(|&p| {
                p != focal
                    && !citers.contains(&p)
                    && in_scope(p)
                    && (!nk_requires_later_year || years[p as usize] >= years[focal as usize])
                    && refs.iter().any(|&r| cites(p, r))
            })
            .count() as u64;
        (n_i, n_j, n_k)
    }

    #[test]
    fn maximally_disruptive_is_one() {
        // focal 0 cites refs 1..=3; citers 4..=13 cite only the focal paper
        let mut edges: Vec<(u32, u32)> = (1..=3).map(|r| (0, r)).collect();
        edges.extend((4..14).map(|c| (c, 0)));
        let g = graph(14, &edges, None);
        let s = disruption_index(&g, PaperId(0), &DisruptionConfig::default()).unwrap();
        assert_eq!((s.n_i, s.n_j, s.n_k), (10, 0, 0));
        assert_eq!(s.d, Some(1.0));
    }

    #[test]
    fn maximally_developing_is_minus_one() {
        // every citer also cites reference 1; nothing else cites it
        let mut edges: Vec<(u32, u32)> = vec![(0, 1)];
        for c in 2..12 {
            edges.push((c, 0));
            edges.push((c, 1));
        }
        let g = graph(12, &edges, None);
        let s = disruption_index(&g, PaperId(0), &DisruptionConfig::default()).unwrap();
        assert_eq!((s.n_i, s.n_j, s.n_k), (0, 10, 0));
        assert_eq!(s.d, Some(-1.0));
        assert_eq!(s.d_nok, Some(-1.0));
    }

    #[test]
    fn hand_built_quarter() {
        // focal 0 cites 1 and 2; citers: 3,4 cite only focal; 5 cites focal
        // and ref 1; paper 6 cites ref 1 but not focal.
        let edges = [
            (0, 1),
            (0, 2),
            (3, 0),
            (4, 0),
            (5, 0),
            (5, 1),
            (6, 1),
        ];
        let g = graph(7, &edges, None);
        let s = disruption_index(&g, PaperId(0), &DisruptionConfig::default()).unwrap();
        assert_eq!((s.n_i, s.n_j, s.n_k), (2, 1, 1));
        assert_eq!(s.d, Some(0.25));
    }

    #[test]
    fn no_citers_is_undefined() {
        let edges = [(0, 1), (2, 1)];
        let g = graph(3, &edges, None);
        let s = disruption_index(&g, PaperId(0), &DisruptionConfig::default()).unwrap();
        assert_eq!(s.d, None);
        assert_eq!(s.d_nok, None);
        // the n_k term alone never manufactures a zero score
        assert_eq!(s.n_k, 1);
    }

    #[test]
    fn unknown_paper_rejected() {
        let g = graph(2, &[(1, 0)], None);
        assert!(disruption_index(&g, PaperId(9), &DisruptionConfig::default()).is_err());
    }

    #[test]
    fn nk_year_restriction_toggle() {
        // paper 3 published before the focal paper cites ref 1
        let edges = [(0, 1), (2, 0), (3, 1)];
        let years = [2000, 1995, 2005, 1998];
        let g = graph(4, &edges, Some(&years));
        let strict = disruption_index(&g, PaperId(0), &DisruptionConfig::default()).unwrap();
        assert_eq!(strict.n_k, 0);
        let legacy = disruption_index(
            &g,
            PaperId(0),
            &DisruptionConfig {
                nk_requires_later_year: false,
            },
        )
        .unwrap();
        assert_eq!(legacy.n_k, 1);
        let (bi, bj, bk) = brute_force(4, &edges, &years, 0, false, None);
        assert_eq!((legacy.n_i, legacy.n_j, legacy.n_k), (bi, bj, bk));
    }

    #[test]
    fn horizon_vacuous_when_all_citers_inside() {
        let edges = [(0, 1), (2, 0), (3, 0)];
        let years = [2000, 1999, 2002, 2003];
        let g = graph(4, &edges, Some(&years));
        let cfg = DisruptionConfig::default();
        let full = disruption_index(&g, PaperId(0), &cfg).unwrap();
        let h = disruption_horizon(&g, PaperId(0), 5, &cfg).unwrap();
        assert_eq!(full, h);
    }

    #[test]
    fn horizon_zero_with_late_citers_is_undefined() {
        let edges = [(0, 1), (2, 0)];
        let years = [2000, 1999, 2002];
        let g = graph(3, &edges, Some(&years));
        let h = disruption_horizon(&g, PaperId(0), 0, &DisruptionConfig::default()).unwrap();
        assert_eq!(h.d, None);
    }

    #[test]
    fn horizon_matches_brute_force() {
        let edges = [
            (0, 1),
            (0, 2),
            (3, 0),
            (3, 1),
            (4, 0),
            (5, 0),
            (6, 1),
            (7, 2),
        ];
        let years = [2000, 1998, 1999, 2003, 2004, 2009, 2002, 2008];
        let g = graph(8, &edges, Some(&years));
        for h in [0, 3, 4, 5, 20] {
            let got = disruption_horizon(&g, PaperId(0), h, &DisruptionConfig::default()).unwrap();
            let (bi, bj, bk) = brute_force(8, &edges, &years, 0, true, Some(2000 + h));
            assert_eq!((got.n_i, got.n_j, got.n_k), (bi, bj, bk), "horizon {h}");
        }
    }

    #[test]
    fn two_step_chain_equals_one_step() {
        // C(2) -> B(1) -> A(0), focal B
        let edges = [(1, 0), (2, 1)];
        let g = graph(3, &edges, None);
        let cfg = DisruptionConfig::default();
        let one = disruption_index(&g, PaperId(1), &cfg).unwrap();
        let two = disruption_two_step(&g, PaperId(1), &cfg).unwrap();
        assert_eq!(one, two);
        assert_eq!(two.d, Some(1.0));
    }

    #[test]
    fn two_step_path_counts_depth_two_descendant() {
        // D(3) -> C(2) -> B(1) -> A(0), focal B
        let edges = [(1, 0), (2, 1), (3, 2)];
        let g = graph(4, &edges, None);
        let two = disruption_two_step(&g, PaperId(1), &DisruptionConfig::default()).unwrap();
        // descendants {C, D}; antecedents {A}; D cites only C
        assert_eq!((two.n_i, two.n_j, two.n_k), (2, 0, 0));
        assert_eq!(two.d, Some(1.0));
    }

    #[test]
    fn two_step_separates_structures_one_step_cannot() {
        // Base: focal 0 cites 1, 1 cites 2; citer 3 cites 0; 4 cites 3.
        // Variant adds 4 -> 2, a depth-two shortcut invisible at one step.
        let base = [(0, 1), (1, 2), (3, 0), (4, 3)];
        let variant = [(0, 1), (1, 2), (3, 0), (4, 3), (4, 2)];
        let ga = graph(5, &base, None);
        let gb = graph(5, &variant, None);
        let cfg = DisruptionConfig::default();
        let one_a = disruption_index(&ga, PaperId(0), &cfg).unwrap();
        let one_b = disruption_index(&gb, PaperId(0), &cfg).unwrap();
        assert_eq!(one_a, one_b);
        let two_a = disruption_two_step(&ga, PaperId(0), &cfg).unwrap();
        let two_b = disruption_two_step(&gb, PaperId(0), &cfg).unwrap();
        assert_ne!(two_a.d, two_b.d);
    }

    #[test]
    fn degenerate_topologies_share_d() {
        // one citer citing one of two references vs citing both
        let ga = graph(4, &[(0, 1), (0, 2), (3, 0), (3, 1)], None);
        let gb = graph(4, &[(0, 1), (0, 2), (3, 0), (3, 1), (3, 2)], None);
        let cfg = DisruptionConfig::default();
        let da = disruption_index(&ga, PaperId(0), &cfg).unwrap();
        let db = disruption_index(&gb, PaperId(0), &cfg).unwrap();
        assert_eq!(da.d, db.d);
        assert_ne!(
            ga.edge_count(),
            gb.edge_count(),
            "fixtures must be structurally distinct"
        );
    }

    #[test]
    fn single_edge_flips_twin_from_one_to_minus_one() {
        // twins 0 and 1 share all ten descendants; disjoint references 2,3
        let mut edges: Vec<(u32, u32)> = vec![(0, 2), (1, 3)];
        for c in 4..14 {
            edges.push((c, 0));
            edges.push((c, 1));
        }
        let g = graph(14, &edges, None);
        let cfg = DisruptionConfig::default();
        let before = disruption_index(&g, PaperId(1), &cfg).unwrap();
        assert_eq!(before.d, Some(1.0));

        edges.push((1, 0)); // the single twin citation
        let g = graph(14, &edges, None);
        let after = disruption_index(&g, PaperId(1), &cfg).unwrap();
        assert_eq!(after.d, Some(-1.0));
    }

    #[test]
    fn batch_matches_single_and_is_deterministic() {
        let edges = [
            (0, 1),
            (0, 2),
            (3, 0),
            (3, 1),
            (4, 0),
            (5, 1),
            (5, 2),
            (6, 5),
        ];
        let g = graph(7, &edges, None);
        let cfg = DisruptionConfig::default();
        let variants = DisruptionVariants {
            nok: true,
            horizon: Some(5),
            two_step: true,
        };
        let rows = disruption_all(&g, &variants, &cfg);
        let rows2 = disruption_all(&g, &variants, &cfg);
        assert_eq!(rows.len(), rows2.len());
        for (a, b) in rows.iter().zip(&rows2) {
            assert_eq!(a.paper, b.paper);
            assert_eq!(a.d, b.d);
            assert_eq!(a.d_two, b.d_two);
        }
        for row in &rows {
            let single = disruption_index(&g, row.paper, &cfg).unwrap();
            assert_eq!(row.d, single.d);
            assert_eq!((row.n_i, row.n_j, row.n_k), (single.n_i, single.n_j, single.n_k));
        }
    }

    #[test]
    fn batch_skips_excluded_papers() {
        let mut g = graph(3, &[(1, 0), (2, 0)], None);
        g.apply_filter(&crate::graph::FilterPolicy {
            min_citations: 1,
            min_references: 0,
            ..Default::default()
        })
        .unwrap();
        let rows = disruption_all(&g, &DisruptionVariants::default(), &DisruptionConfig::default());
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].paper, PaperId(0));
    }

    #[test]
    fn random_graphs_match_brute_force_and_stay_bounded() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(41, 0, 0);
        for trial in 0..30 {
            let n = rng.random_range(2..40usize);
            let m = rng.random_range(0..150usize);
            let edges: Vec<(u32, u32)> = (0..m)
                .map(|_| {
                    (
                        rng.random_range(0..n as u32),
                        rng.random_range(0..n as u32),
                    )
                })
                .filter(|(u, v)| u != v)
                .collect();
            let years: Vec<i32> = (0..n).map(|_| rng.random_range(1990..2010)).collect();
            let g = graph(n, &edges, Some(&years));
            // brute force works on the deduplicated relation
            let mut dedup = edges.clone();
            dedup.sort_unstable();
            dedup.dedup();
            for focal in 0..n as u32 {
                let s =
                    disruption_index(&g, PaperId(focal), &DisruptionConfig::default()).unwrap();
                let (bi, bj, bk) = brute_force(n, &dedup, &years, focal, true, None);
                assert_eq!((s.n_i, s.n_j, s.n_k), (bi, bj, bk), "trial {trial} focal {focal}");
                if let Some(d) = s.d {
                    assert!((-1.0..=1.0).contains(&d));
                }
                if let Some(dn) = s.d_nok {
                    assert!((-1.0..=1.0).contains(&dn));
                }
            }
        }
    }
}
