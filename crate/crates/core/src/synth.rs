//! Synthetic citation networks with planted ground truth.
//!
//! The generator produces a random background DAG (edges always point from
//! later to earlier years) and plants structures with known closed-form
//! disruption values on top of it:
//!
//! * *disruptive* papers: a bow-tie bottleneck — dedicated descendants cite
//!   the focal paper and never its references, so `d = 1` exactly;
//! * *developing* papers: every descendant also cites one of the focal
//!   paper's references, so `d = -1` exactly;
//! * *twin pairs*: two same-year papers sharing a configurable fraction of
//!   descendants, with disjoint dedicated reference sets and optionally a
//!   single twin-to-twin citation.
//!
//! Planted families are node-disjoint and their references are cited by
//! nobody outside the family, which keeps the planted disruption values
//! exact no matter how dense the background is. Descendants may cite random
//! background papers on top, so planted structures are still embedded in
//! the corpus rather than floating beside it.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{CitationGraph, DocType, PaperId};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attachment {
    /// New papers cite earlier papers proportionally to in-degree plus one;
    /// produces heavy-tailed citation counts.
    Preferential,
    /// Uniform choice among earlier papers (an ER-style DAG).
    Uniform,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_background: usize,
    pub n_disruptive: usize,
    pub n_developing: usize,
    pub n_twin_pairs: usize,
    pub descendants_per_planted: usize,
    pub references_per_planted: usize,
    /// Fraction of descendants shared by the two papers of a twin pair.
    pub descendant_overlap_for_twins: f64,
    pub year_lo: i32,
    pub year_hi: i32,
    pub seed: u64,
    /// Mean reference count of background papers.
    pub background_refs: usize,
    /// Extra references from each planted descendant into the background.
    pub descendant_extra_refs: usize,
    /// Add the single citation from the second twin to the first.
    pub twin_citation_edge: bool,
    pub attachment: Attachment,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_background: 1000,
            n_disruptive: 0,
            n_developing: 0,
            n_twin_pairs: 0,
            descendants_per_planted: 10,
            references_per_planted: 3,
            descendant_overlap_for_twins: 1.0,
            year_lo: 1950,
            year_hi: 2000,
            seed: 0,
            background_refs: 4,
            descendant_extra_refs: 2,
            twin_citation_edge: false,
            attachment: Attachment::Preferential,
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("infeasible config: {0}")]
    Infeasible(String),
    #[error("label class `{0}` is empty")]
    EmptyClass(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlantedClass {
    Background,
    Disruptive,
    Developing,
    Twin,
}

impl PlantedClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PlantedClass::Background => "background",
            PlantedClass::Disruptive => "disruptive",
            PlantedClass::Developing => "developing",
            PlantedClass::Twin => "twin",
        }
    }
}

impl fmt::Display for PlantedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug)]
pub struct SynthOutput {
    pub graph: CitationGraph,
    /// Per-paper class, indexed by dense id.
    pub labels: Vec<PlantedClass>,
    /// Twin pairs as (first, second); the second twin carries the optional
    /// twin citation.
    pub twin_pairs: Vec<(PaperId, PaperId)>,
}

impl SynthOutput {
    pub fn papers_with_label(&self, class: PlantedClass) -> Vec<PaperId> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| PaperId(i as u32))
            .collect()
    }

    /// `key<TAB>label` rows in dense id order.
    pub fn write_labels(&self, path: &Path) -> std::io::Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for (i, label) in self.labels.iter().enumerate() {
            writeln!(f, "{}\t{label}", self.graph.key(PaperId(i as u32)))?;
        }
        f.flush()
    }
}

struct Builder {
    keys: Vec<String>,
    years: Vec<i32>,
    labels: Vec<PlantedClass>,
    edges: Vec<(u32, u32)>,
}

impl Builder {
    fn add(&mut self, year: i32, label: PlantedClass) -> u32 {
        let id = self.keys.len() as u32;
        self.keys.push(format!("P{id}"));
        self.years.push(year);
        self.labels.push(label);
        id
    }

    fn cite(&mut self, citing: u32, cited: u32) {
        debug_assert!(self.years[citing as usize] >= self.years[cited as usize]);
        self.edges.push((citing, cited));
    }
}

/// Generate a synthetic network per the config. Deterministic in
/// `(config, seed)`.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput, SynthError> {
    if !(0.0..=1.0).contains(&cfg.descendant_overlap_for_twins) {
        return Err(SynthError::Infeasible(
            "descendant_overlap_for_twins must be within [0, 1]".into(),
        ));
    }
    if cfg.year_lo > cfg.year_hi {
        return Err(SynthError::Infeasible("year_lo > year_hi".into()));
    }
    let n_planted_families = cfg.n_disruptive + cfg.n_developing + 2 * cfg.n_twin_pairs;
    if n_planted_families > 0 && cfg.year_hi - cfg.year_lo < 2 {
        return Err(SynthError::Infeasible(
            "planted structures need a year span of at least 2 (reference < focal < descendant)"
                .into(),
        ));
    }
    if cfg.n_background == 0 && n_planted_families == 0 {
        return Err(SynthError::Infeasible("no papers requested".into()));
    }

    let mut b = Builder {
        keys: Vec::new(),
        years: Vec::new(),
        labels: Vec::new(),
        edges: Vec::new(),
    };

    // --- background DAG ---
    let mut year_rng = stream_rng(cfg.seed, 1, 0);
    for _ in 0..cfg.n_background {
        let year = year_rng.random_range(cfg.year_lo..=cfg.year_hi);
        b.add(year, PlantedClass::Background);
    }
    let mut by_year: Vec<Vec<u32>> = Vec::new();
    {
        let mut tmp: Vec<(i32, u32)> = (0..cfg.n_background as u32)
            .map(|i| (b.years[i as usize], i))
            .collect();
        tmp.sort_unstable();
        let mut cur_year = None;
        for (y, id) in tmp {
            if cur_year != Some(y) {
                by_year.push(Vec::new());
                cur_year = Some(y);
            }
            by_year.last_mut().unwrap().push(id);
        }
    }
    let mut edge_rng = stream_rng(cfg.seed, 2, 0);
    // `eligible` holds each earlier paper once; `pool` holds one entry per
    // unit of attachment weight (paper + one per citation received)
    let mut eligible: Vec<u32> = Vec::new();
    let mut pool: Vec<u32> = Vec::new();
    for cohort in &by_year {
        for &p in cohort {
            if eligible.is_empty() {
                continue;
            }
            let want = edge_rng.random_range(0..=2 * cfg.background_refs);
            let mut chosen: HashSet<u32> = HashSet::new();
            let mut attempts = 0;
            while chosen.len() < want && attempts < 8 * want.max(1) {
                attempts += 1;
                let t = match cfg.attachment {
                    Attachment::Preferential => pool[edge_rng.random_range(0..pool.len())],
                    Attachment::Uniform => eligible[edge_rng.random_range(0..eligible.len())],
                };
                if chosen.insert(t) {
                    b.cite(p, t);
                    if matches!(cfg.attachment, Attachment::Preferential) {
                        pool.push(t);
                    }
                }
            }
        }
        eligible.extend_from_slice(cohort);
        pool.extend_from_slice(cohort);
    }

    // background ids sorted by year, for descendant extra references
    let background_by_year: Vec<(i32, u32)> = {
        let mut v: Vec<(i32, u32)> = (0..cfg.n_background as u32)
            .map(|i| (b.years[i as usize], i))
            .collect();
        v.sort_unstable();
        v
    };
    let extra_refs = |b: &mut Builder, desc: u32, rng: &mut rand_chacha::ChaCha8Rng| {
        let year = b.years[desc as usize];
        // number of strictly-earlier background papers
        let hi = background_by_year.partition_point(|&(y, _)| y < year);
        if hi == 0 {
            return;
        }
        let mut chosen: HashSet<u32> = HashSet::new();
        let mut attempts = 0;
        while chosen.len() < cfg.descendant_extra_refs && attempts < 8 * (cfg.descendant_extra_refs + 1) {
            attempts += 1;
            let t = background_by_year[rng.random_range(0..hi)].1;
            if chosen.insert(t) {
                b.cite(desc, t);
            }
        }
    };

    // --- planted bow-tie families ---
    // A family is node-disjoint from everything else except descendant extra
    // references into the background, which never touch another family.
    let plant_family = |b: &mut Builder, family_idx: u64, class: PlantedClass| {
        let mut rng = stream_rng(cfg.seed, 3, family_idx);
        let focal_year = rng.random_range(cfg.year_lo + 1..=cfg.year_hi - 1);
        let focal = b.add(focal_year, class);
        let refs: Vec<u32> = (0..cfg.references_per_planted)
            .map(|_| {
                let y = rng.random_range(cfg.year_lo..focal_year);
                b.add(y, PlantedClass::Background)
            })
            .collect();
        for &r in &refs {
            b.cite(focal, r);
        }
        for _ in 0..cfg.descendants_per_planted {
            let y = rng.random_range(focal_year + 1..=cfg.year_hi);
            let desc = b.add(y, PlantedClass::Background);
            b.cite(desc, focal);
            if class == PlantedClass::Developing {
                let r = refs[rng.random_range(0..refs.len())];
                b.cite(desc, r);
            }
            extra_refs(b, desc, &mut rng);
        }
        focal
    };

    for i in 0..cfg.n_disruptive {
        plant_family(&mut b, i as u64, PlantedClass::Disruptive);
    }
    if cfg.n_developing > 0 && cfg.references_per_planted == 0 {
        return Err(SynthError::Infeasible(
            "developing papers need at least one reference".into(),
        ));
    }
    for i in 0..cfg.n_developing {
        plant_family(&mut b, (cfg.n_disruptive + i) as u64, PlantedClass::Developing);
    }

    // --- twin pairs ---
    let mut twin_pairs = Vec::new();
    for t in 0..cfg.n_twin_pairs {
        let mut rng = stream_rng(cfg.seed, 4, t as u64);
        let focal_year = rng.random_range(cfg.year_lo + 1..=cfg.year_hi - 1);
        let first = b.add(focal_year, PlantedClass::Twin);
        let second = b.add(focal_year, PlantedClass::Twin);
        for &twin in &[first, second] {
            for _ in 0..cfg.references_per_planted {
                let y = rng.random_range(cfg.year_lo..focal_year);
                let r = b.add(y, PlantedClass::Background);
                b.cite(twin, r);
            }
        }
        let shared =
            (cfg.descendant_overlap_for_twins * cfg.descendants_per_planted as f64).round() as usize;
        let shared = shared.min(cfg.descendants_per_planted);
        let own = cfg.descendants_per_planted - shared;
        for _ in 0..shared {
            let y = rng.random_range(focal_year + 1..=cfg.year_hi);
            let desc = b.add(y, PlantedClass::Background);
            b.cite(desc, first);
            b.cite(desc, second);
            extra_refs(&mut b, desc, &mut rng);
        }
        for &twin in &[first, second] {
            for _ in 0..own {
                let y = rng.random_range(focal_year + 1..=cfg.year_hi);
                let desc = b.add(y, PlantedClass::Background);
                b.cite(desc, twin);
                extra_refs(&mut b, desc, &mut rng);
            }
        }
        if cfg.twin_citation_edge {
            b.cite(second, first);
        }
        twin_pairs.push((PaperId(first), PaperId(second)));
    }

    let meta: Vec<(i32, DocType)> = b.years.iter().map(|&y| (y, DocType::Article)).collect();
    let graph = CitationGraph::from_parts(b.keys, meta, b.edges, false)?;
    Ok(SynthOutput {
        graph,
        labels: b.labels,
        twin_pairs,
    })
}

/// Randomly ordered copy of `items`; handy for seed-robust sampling in tests.
pub fn shuffled<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(&mut stream_rng(seed, 5, 0));
    v
}

/// How well a score column separates two planted classes.
#[derive(Debug, Clone)]
pub struct SeparationReport {
    /// Mann-Whitney AUC of class A scores over class B scores.
    pub auc: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    /// Mean mid-rank percentile of each class within the scored set.
    pub mean_percentile_a: f64,
    pub mean_percentile_b: f64,
}

/// Compare score distributions of two label classes. `scores` pairs papers
/// with a score value; papers without scores are simply not listed.
pub fn label_oracle(
    labels: &[PlantedClass],
    scores: &[(PaperId, f64)],
    class_a: PlantedClass,
    class_b: PlantedClass,
) -> Result<SeparationReport, SynthError> {
    let of_class = |class: PlantedClass| -> Vec<f64> {
        scores
            .iter()
            .filter(|(p, _)| labels[p.index()] == class)
            .map(|&(_, s)| s)
            .collect()
    };
    let a = of_class(class_a);
    let b = of_class(class_b);
    if a.is_empty() {
        return Err(SynthError::EmptyClass(class_a.to_string()));
    }
    if b.is_empty() {
        return Err(SynthError::EmptyClass(class_b.to_string()));
    }
    let auc = crate::stats::mann_whitney_auc(&a, &b).expect("classes non-empty");

    let all: Vec<f64> = scores.iter().map(|&(_, s)| s).collect();
    let pct = crate::edm::percentile_rank(&all).expect("scores non-empty");
    let mean_pct = |class: PlantedClass| -> f64 {
        let sel: Vec<f64> = scores
            .iter()
            .zip(&pct)
            .filter(|((p, _), _)| labels[p.index()] == class)
            .map(|(_, &x)| x)
            .collect();
        sel.iter().sum::<f64>() / sel.len() as f64
    };

    Ok(SeparationReport {
        auc,
        n_a: a.len(),
        n_b: b.len(),
        mean_a: a.iter().sum::<f64>() / a.len() as f64,
        mean_b: b.iter().sum::<f64>() / b.len() as f64,
        mean_percentile_a: mean_pct(class_a),
        mean_percentile_b: mean_pct(class_b),
    })
}
