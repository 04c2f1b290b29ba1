//! Citation network loading, validation, filtering, and dual-adjacency
//! indexing.
//!
//! Papers are addressed by dense ids assigned in first-seen order of the
//! metadata file, which makes loading deterministic: identical input files
//! produce identical id assignment and adjacency order. Both adjacency
//! directions are kept — `references` (outgoing citations) and `citers`
//! (incoming) — as CSR arrays with each row sorted ascending.
//!
//! Edges point from the citing paper to the cited paper. Duplicate edges are
//! collapsed to one and self-citations are dropped; both are counted and
//! reported rather than treated as hard errors, since real bibliographic
//! data contains them. Cycles are tolerated.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

/// Dense paper index, contiguous in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaperId(pub u32);

impl PaperId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PaperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Document type labels recognized in metadata files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DocType {
    Article,
    Review,
    Letter,
    Proceedings,
    Other,
}

impl DocType {
    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::Review => "review",
            DocType::Letter => "letter",
            DocType::Proceedings => "proceedings",
            DocType::Other => "other",
        }
    }
}

impl FromStr for DocType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "article" => Ok(DocType::Article),
            "review" => Ok(DocType::Review),
            "letter" => Ok(DocType::Letter),
            "proceedings" => Ok(DocType::Proceedings),
            "other" => Ok(DocType::Other),
            _ => Err(format!("unknown doc_type `{s}`")),
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-paper metadata carried alongside the adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaperMeta {
    pub year: i32,
    pub doc_type: DocType,
    /// Set by [`CitationGraph::apply_filter`]; excluded papers stay in the
    /// network (scores are computed on the full graph) but are skipped when
    /// reporting.
    pub is_excluded: bool,
}

/// Inclusion policy for reporting. Papers failing any criterion are flagged
/// excluded; edges are never removed.
#[derive(Debug, Clone)]
pub struct FilterPolicy {
    pub min_citations: u64,
    pub min_references: u64,
    pub year_lo: i32,
    pub year_hi: i32,
    pub drop_doc_types: Vec<DocType>,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        FilterPolicy {
            min_citations: 5,
            min_references: 1,
            year_lo: i32::MIN,
            year_hi: i32::MAX,
            drop_doc_types: Vec::new(),
        }
    }
}

impl FilterPolicy {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.year_lo > self.year_hi {
            return Err(GraphError::InvalidPolicy(format!(
                "year_lo {} > year_hi {}",
                self.year_lo, self.year_hi
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("{path}:{line}: malformed row: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}:{line}: unknown paper key `{key}`")]
    UnknownKey {
        path: PathBuf,
        line: usize,
        key: String,
    },
    #[error("{path}:{line}: duplicate paper key `{key}`")]
    DuplicateKey {
        path: PathBuf,
        line: usize,
        key: String,
    },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("unknown paper id {0}")]
    UnknownPaper(u32),
    #[error("invalid filter policy: {0}")]
    InvalidPolicy(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path, source: std::io::Error) -> GraphError {
    GraphError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// CSR adjacency: `targets[offsets[i]..offsets[i+1]]` are the neighbors of
/// paper `i`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<u64>,
    targets: Vec<u32>,
}

impl Adjacency {
    fn build(n: usize, edges: impl Iterator<Item = (u32, u32)> + Clone) -> Adjacency {
        let mut counts = vec![0u64; n + 1];
        for (src, _) in edges.clone() {
            counts[src as usize + 1] += 1;
        }
        for i in 1..=n {
            counts[i] += counts[i - 1];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut targets = vec![0u32; offsets[n] as usize];
        for (src, dst) in edges {
            let at = fill[src as usize];
            targets[at as usize] = dst;
            fill[src as usize] += 1;
        }
        for i in 0..n {
            targets[offsets[i] as usize..offsets[i + 1] as usize].sort_unstable();
        }
        Adjacency { offsets, targets }
    }

    #[inline]
    fn row(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

/// Immutable directed citation network with dual adjacency and per-paper
/// metadata. Safe for unsynchronized shared reads once constructed.
#[derive(Debug, Clone)]
pub struct CitationGraph {
    keys: Vec<String>,
    key_index: HashMap<String, u32>,
    meta: Vec<PaperMeta>,
    /// Outgoing: references of each paper (whom it cites).
    out_adj: Adjacency,
    /// Incoming: citers of each paper (who cites it).
    in_adj: Adjacency,
    edge_count: u64,
    duplicate_edges_dropped: u64,
    self_citations_dropped: u64,
}

/// Per-paper degree table, index-aligned with dense ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub in_degree: Vec<u64>,
    pub out_degree: Vec<u64>,
}

impl CitationGraph {
    /// Build a graph from pre-resolved parts. Duplicate edges are collapsed
    /// (unless `keep_duplicate_edges`) and self-citations dropped, with
    /// counts retained for reporting.
    pub fn from_parts(
        keys: Vec<String>,
        meta: Vec<(i32, DocType)>,
        mut edges: Vec<(u32, u32)>,
        keep_duplicate_edges: bool,
    ) -> Result<CitationGraph, GraphError> {
        assert_eq!(keys.len(), meta.len());
        let n = keys.len();
        if n == 0 {
            return Err(GraphError::EmptyInput("no papers".into()));
        }
        let mut key_index = HashMap::with_capacity(n);
        for (i, k) in keys.iter().enumerate() {
            if key_index.insert(k.clone(), i as u32).is_some() {
                return Err(GraphError::DuplicateKey {
                    path: PathBuf::new(),
                    line: i + 1,
                    key: k.clone(),
                });
            }
        }
        for &(u, v) in &edges {
            if u as usize >= n {
                return Err(GraphError::UnknownPaper(u));
            }
            if v as usize >= n {
                return Err(GraphError::UnknownPaper(v));
            }
        }

        let before = edges.len();
        edges.retain(|&(u, v)| u != v);
        let self_citations_dropped = (before - edges.len()) as u64;

        edges.sort_unstable();
        let before = edges.len();
        if !keep_duplicate_edges {
            edges.dedup();
        }
        let duplicate_edges_dropped = (before - edges.len()) as u64;

        let out_adj = Adjacency::build(n, edges.iter().copied());
        let in_adj = Adjacency::build(n, edges.iter().map(|&(u, v)| (v, u)));
        let edge_count = edges.len() as u64;

        let meta = meta
            .into_iter()
            .map(|(year, doc_type)| PaperMeta {
                year,
                doc_type,
                is_excluded: false,
            })
            .collect();

        let g = CitationGraph {
            keys,
            key_index,
            meta,
            out_adj,
            in_adj,
            edge_count,
            duplicate_edges_dropped,
            self_citations_dropped,
        };
        debug_assert!(g.check_consistency());
        Ok(g)
    }

    /// Load a graph from an edge file (`citing<TAB>cited`) and a metadata
    /// file (`key<TAB>year<TAB>doc_type`). `#`-prefixed lines and blank
    /// lines are ignored in both.
    pub fn load(edges_path: &Path, meta_path: &Path) -> Result<CitationGraph, GraphError> {
        let meta_file = File::open(meta_path).map_err(|e| io_err(meta_path, e))?;
        let mut keys = Vec::new();
        let mut key_index: HashMap<String, u32> = HashMap::new();
        let mut meta = Vec::new();
        for (lineno, line) in BufReader::new(meta_file).lines().enumerate() {
            let line = line.map_err(|e| io_err(meta_path, e))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (key, year, doc_type) = match (fields.next(), fields.next(), fields.next()) {
                (Some(k), Some(y), Some(d)) if !k.is_empty() => (k, y, d),
                _ => {
                    return Err(GraphError::MalformedRow {
                        path: meta_path.to_path_buf(),
                        line: lineno + 1,
                        reason: "expected `key<TAB>year<TAB>doc_type`".into(),
                    })
                }
            };
            let year: i32 = year.parse().map_err(|_| GraphError::MalformedRow {
                path: meta_path.to_path_buf(),
                line: lineno + 1,
                reason: format!("year `{year}` is not an integer"),
            })?;
            let doc_type: DocType = doc_type.parse().map_err(|e| GraphError::MalformedRow {
                path: meta_path.to_path_buf(),
                line: lineno + 1,
                reason: e,
            })?;
            if key_index.contains_key(key) {
                return Err(GraphError::DuplicateKey {
                    path: meta_path.to_path_buf(),
                    line: lineno + 1,
                    key: key.to_string(),
                });
            }
            key_index.insert(key.to_string(), keys.len() as u32);
            keys.push(key.to_string());
            meta.push((year, doc_type));
        }
        if keys.is_empty() {
            return Err(GraphError::EmptyInput(meta_path.display().to_string()));
        }

        let edge_file = File::open(edges_path).map_err(|e| io_err(edges_path, e))?;
        let mut edges = Vec::new();
        for (lineno, line) in BufReader::new(edge_file).lines().enumerate() {
            let line = line.map_err(|e| io_err(edges_path, e))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (citing, cited) = match (fields.next(), fields.next()) {
                (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => (a, b),
                _ => {
                    return Err(GraphError::MalformedRow {
                        path: edges_path.to_path_buf(),
                        line: lineno + 1,
                        reason: "expected `citing_key<TAB>cited_key`".into(),
                    })
                }
            };
            let lookup = |k: &str| {
                key_index.get(k).copied().ok_or_else(|| GraphError::UnknownKey {
                    path: edges_path.to_path_buf(),
                    line: lineno + 1,
                    key: k.to_string(),
                })
            };
            edges.push((lookup(citing)?, lookup(cited)?));
        }

        let meta_pairs = meta;
        CitationGraph::from_parts(keys, meta_pairs, edges, false)
    }

    /// Write the graph back in the load formats: edges in canonical order
    /// (ascending citing id, then ascending cited id) and metadata in dense
    /// id order. An optional `header` is emitted as `#` comment lines.
    pub fn write(
        &self,
        edges_path: &Path,
        meta_path: &Path,
        header: Option<&str>,
    ) -> Result<(), GraphError> {
        let mut mf = BufWriter::new(File::create(meta_path).map_err(|e| io_err(meta_path, e))?);
        if let Some(h) = header {
            for l in h.lines() {
                writeln!(mf, "# {l}").map_err(|e| io_err(meta_path, e))?;
            }
        }
        for (i, key) in self.keys.iter().enumerate() {
            let m = &self.meta[i];
            writeln!(mf, "{key}\t{}\t{}", m.year, m.doc_type).map_err(|e| io_err(meta_path, e))?;
        }
        mf.flush().map_err(|e| io_err(meta_path, e))?;

        let mut ef = BufWriter::new(File::create(edges_path).map_err(|e| io_err(edges_path, e))?);
        if let Some(h) = header {
            for l in h.lines() {
                writeln!(ef, "# {l}").map_err(|e| io_err(edges_path, e))?;
            }
        }
        for u in 0..self.len() {
            for &v in self.out_adj.row(u) {
                writeln!(ef, "{}\t{}", self.keys[u], self.keys[v as usize])
                    .map_err(|e| io_err(edges_path, e))?;
            }
        }
        ef.flush().map_err(|e| io_err(edges_path, e))?;
        Ok(())
    }

    /// Flag papers failing the policy. Edges are untouched; calling twice
    /// with the same policy yields identical flags.
    pub fn apply_filter(&mut self, policy: &FilterPolicy) -> Result<(), GraphError> {
        policy.validate()?;
        for i in 0..self.len() {
            let in_deg = self.in_adj.row(i).len() as u64;
            let out_deg = self.out_adj.row(i).len() as u64;
            let m = &mut self.meta[i];
            m.is_excluded = in_deg < policy.min_citations
                || out_deg < policy.min_references
                || m.year < policy.year_lo
                || m.year > policy.year_hi
                || policy.drop_doc_types.contains(&m.doc_type);
        }
        Ok(())
    }

    /// Exact per-paper degree counts.
    pub fn degree_stats(&self) -> DegreeStats {
        DegreeStats {
            in_degree: (0..self.len()).map(|i| self.in_adj.row(i).len() as u64).collect(),
            out_degree: (0..self.len()).map(|i| self.out_adj.row(i).len() as u64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn duplicate_edges_dropped(&self) -> u64 {
        self.duplicate_edges_dropped
    }

    pub fn self_citations_dropped(&self) -> u64 {
        self.self_citations_dropped
    }

    pub fn papers(&self) -> impl Iterator<Item = PaperId> + '_ {
        (0..self.keys.len() as u32).map(PaperId)
    }

    pub fn key(&self, p: PaperId) -> &str {
        &self.keys[p.index()]
    }

    pub fn lookup(&self, key: &str) -> Option<PaperId> {
        self.key_index.get(key).copied().map(PaperId)
    }

    pub fn meta(&self, p: PaperId) -> &PaperMeta {
        &self.meta[p.index()]
    }

    pub fn year(&self, p: PaperId) -> i32 {
        self.meta[p.index()].year
    }

    pub fn is_excluded(&self, p: PaperId) -> bool {
        self.meta[p.index()].is_excluded
    }

    /// Papers cited by `p`, ascending.
    pub fn references(&self, p: PaperId) -> &[u32] {
        self.out_adj.row(p.index())
    }

    /// Papers citing `p`, ascending.
    pub fn citers(&self, p: PaperId) -> &[u32] {
        self.in_adj.row(p.index())
    }

    pub fn out_degree(&self, p: PaperId) -> usize {
        self.references(p).len()
    }

    pub fn in_degree(&self, p: PaperId) -> usize {
        self.citers(p).len()
    }

    /// Does `citing` cite `cited`?
    pub fn has_edge(&self, citing: PaperId, cited: PaperId) -> bool {
        self.references(citing).binary_search(&cited.0).is_ok()
    }

    /// Ordered edge list `(citing, cited)` in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (PaperId, PaperId)> + '_ {
        (0..self.len()).flat_map(move |u| {
            self.out_adj
                .row(u)
                .iter()
                .map(move |&v| (PaperId(u as u32), PaperId(v)))
        })
    }

    pub fn check_paper(&self, p: PaperId) -> Result<(), GraphError> {
        if p.index() < self.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownPaper(p.0))
        }
    }

    /// Carry exclusion flags over from a graph with the same papers, e.g.
    /// onto a rewired copy whose degrees and years are preserved.
    pub(crate) fn copy_exclusion_from(&mut self, other: &CitationGraph) {
        assert_eq!(self.len(), other.len());
        for i in 0..self.len() {
            self.meta[i].is_excluded = other.meta[i].is_excluded;
        }
    }

    /// Transpose consistency and degree-sum accounting; used by debug asserts
    /// and the validation tests.
    pub fn check_consistency(&self) -> bool {
        let out_sum: u64 = (0..self.len()).map(|i| self.out_adj.row(i).len() as u64).sum();
        let in_sum: u64 = (0..self.len()).map(|i| self.in_adj.row(i).len() as u64).sum();
        if out_sum != self.edge_count || in_sum != self.edge_count {
            return false;
        }
        for u in 0..self.len() {
            for &v in self.out_adj.row(u) {
                if self.in_adj.row(v as usize).binary_search(&(u as u32)).is_err() {
                    return false;
                }
            }
        }
        true
    }
}
