//! Command-line pipeline: load -> filter -> score -> walks -> train -> edm
//! -> null -> twins, with file handoffs between stages so each one is
//! independently runnable and resumable.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use edm_core::disruption::{
    disruption_all, DisruptionConfig, DisruptionVariants,
};
use edm_core::edm::{edm_all, percentile_rank};
use edm_core::embed::{
    export_vectors, export_vectors_text, import_vectors, train, MatrixKind, TrainConfig,
    TrainError, TrainMode,
};
use edm_core::graph::{CitationGraph, DocType, FilterPolicy};
use edm_core::manifest::{hex, RunManifest};
use edm_core::nullmodel::{null_pipeline, RewireConfig};
use edm_core::synth::{generate, Attachment, PlantedClass, SynthConfig};
use edm_core::tables;
use edm_core::twins::{find_candidate_pairs, TwinPolicy};
use edm_core::walk::{generate_walks, StartSet, WalkConfig};

#[derive(Parser)]
#[command(
    name = "edm",
    version,
    about = "Citation-network disruption analysis: disruption index, directional embeddings, twin detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a citation network, printing summary statistics.
    LoadCheck(LoadCheckArgs),
    /// Compute disruption index variants for every included paper.
    Score(ScoreArgs),
    /// Generate walks, train directional embeddings, and score papers.
    Embed(EmbedArgs),
    /// Compare scores on the original and a degree-preserving null network.
    Null(NullArgs),
    /// Detect simultaneous-discovery candidate pairs from future vectors.
    Twins(TwinsArgs),
    /// Generate a synthetic citation network with planted ground truth.
    Synth(SynthArgs),
    /// Summarize how well a score column separates two planted classes.
    Report(ReportArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge file: `citing_key<TAB>cited_key` per line.
    #[arg(long)]
    edges: PathBuf,
    /// Metadata file: `key<TAB>year<TAB>doc_type` per line.
    #[arg(long)]
    meta: PathBuf,
}

impl GraphArgs {
    fn load(&self) -> Result<CitationGraph> {
        Ok(CitationGraph::load(&self.edges, &self.meta)?)
    }
}

#[derive(Args)]
struct FilterArgs {
    /// Exclude papers with fewer citations than this.
    #[arg(long, default_value_t = 5)]
    min_citations: u64,
    /// Exclude papers with fewer references than this.
    #[arg(long, default_value_t = 1)]
    min_references: u64,
    /// Exclude papers published before this year.
    #[arg(long)]
    year_lo: Option<i32>,
    /// Exclude papers published after this year.
    #[arg(long)]
    year_hi: Option<i32>,
    /// Exclude a document type (repeatable).
    #[arg(long = "drop-type", value_name = "TYPE")]
    drop_types: Vec<DocType>,
    /// Skip filtering entirely; every paper is reported.
    #[arg(long)]
    no_filter: bool,
}

impl FilterArgs {
    fn apply(&self, g: &mut CitationGraph) -> Result<()> {
        if self.no_filter {
            return Ok(());
        }
        let policy = FilterPolicy {
            min_citations: self.min_citations,
            min_references: self.min_references,
            year_lo: self.year_lo.unwrap_or(i32::MIN),
            year_hi: self.year_hi.unwrap_or(i32::MAX),
            drop_doc_types: self.drop_types.clone(),
        };
        g.apply_filter(&policy)?;
        Ok(())
    }
}

#[derive(Args)]
struct WalkArgs {
    /// Walks started per paper (R).
    #[arg(long, default_value_t = 10)]
    walks: u32,
    /// Maximum walk length in papers (T).
    #[arg(long, default_value_t = 80)]
    walk_length: u32,
}

#[derive(Args)]
struct TrainArgs {
    /// Embedding dimension.
    #[arg(long, default_value_t = 100)]
    dim: u32,
    /// Window size: maximum citation-step offset forming training pairs.
    #[arg(long, default_value_t = 5)]
    window: u32,
    /// Negative samples per positive pair.
    #[arg(long, default_value_t = 5)]
    negatives: u32,
    #[arg(long, default_value_t = 5)]
    epochs: u32,
    /// Initial learning rate (decays linearly).
    #[arg(long, default_value_t = 0.025)]
    lr: f32,
    #[arg(long, default_value_t = 1e-4)]
    min_lr: f32,
    /// Exponent applied to corpus frequencies in the noise distribution.
    #[arg(long, default_value_t = 0.75)]
    noise_exponent: f64,
    /// Worker threads for training; 1 means deterministic mode.
    #[arg(long)]
    workers: Option<usize>,
    /// Force single-worker byte-reproducible training.
    #[arg(long)]
    deterministic: bool,
}

impl TrainArgs {
    fn config(&self, seed: u64) -> TrainConfig {
        let workers = if self.deterministic {
            1
        } else {
            self.workers.unwrap_or_else(|| {
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            })
        };
        let mode = if workers <= 1 {
            TrainMode::Deterministic
        } else {
            TrainMode::Racy { workers }
        };
        TrainConfig {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            initial_lr: self.lr,
            min_lr: self.min_lr,
            noise_exponent: self.noise_exponent,
            seed,
            mode,
            norm_ceiling: 1e3,
        }
    }
}

#[derive(Args)]
struct SeedArg {
    /// Seed for all randomness; drawn and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> u64 {
        match self.seed {
            Some(s) => s,
            None => {
                let s: u64 = rand::random();
                println!("seed: {s}");
                s
            }
        }
    }
}

#[derive(Args)]
struct LoadCheckArgs {
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    filter: FilterArgs,
    /// Output table path.
    #[arg(short, long)]
    out: PathBuf,
    /// Comma-separated variants: d, dnok, d5, d2.
    #[arg(long, default_value = "d,dnok")]
    variants: String,
    /// Horizon in years for the d5 variant.
    #[arg(long, default_value_t = 5)]
    horizon: i32,
    /// Count papers published before the focal paper toward n_k.
    #[arg(long)]
    legacy_nk: bool,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    filter: FilterArgs,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[command(flatten)]
    seed: SeedArg,
    /// Binary vector container to write.
    #[arg(long)]
    out_vectors: PathBuf,
    /// Score table to write.
    #[arg(long)]
    out_scores: PathBuf,
    /// Reuse a previously exported vector container instead of training.
    #[arg(long)]
    vectors_in: Option<PathBuf>,
    /// Also dump the walk corpus, one walk of dense ids per line.
    #[arg(long)]
    walks_out: Option<PathBuf>,
    /// Also write text vectors to `<PREFIX>.past.txt` / `<PREFIX>.future.txt`.
    #[arg(long)]
    text_vectors: Option<PathBuf>,
    /// Emit rows for excluded papers too.
    #[arg(long)]
    include_excluded: bool,
}

#[derive(Args)]
struct NullArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    filter: FilterArgs,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[command(flatten)]
    seed: SeedArg,
    /// Prefix for the emitted tables.
    #[arg(long)]
    out_prefix: PathBuf,
    /// Seed for the rewiring permutations (defaults to --seed).
    #[arg(long)]
    rewire_seed: Option<u64>,
    /// Test hook: identity permutation, the null equals the original.
    #[arg(long, hide = true)]
    identity_null: bool,
    /// Permit self-loops in the rewired network.
    #[arg(long)]
    allow_self_loops: bool,
    /// Permit duplicate edges in the rewired network.
    #[arg(long)]
    allow_duplicate_edges: bool,
}

#[derive(Args)]
struct TwinsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Vector container produced by `embed`.
    #[arg(long)]
    vectors: PathBuf,
    /// Output pair table.
    #[arg(short, long)]
    out: PathBuf,
    /// Pair papers across different years too.
    #[arg(long)]
    any_year: bool,
    /// Exclude a document type from candidacy (repeatable).
    #[arg(long = "exclude-type", value_name = "TYPE")]
    exclude_types: Vec<DocType>,
    /// Keep only pairs where both papers have at least this many citations.
    #[arg(long, default_value_t = 0)]
    min_citations: u64,
    /// Emit each paper's nearest neighbor even when not mutual.
    #[arg(long)]
    one_directional: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory for edges.tsv, meta.tsv, labels.tsv.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1000)]
    background: usize,
    #[arg(long, default_value_t = 0)]
    disruptive: usize,
    #[arg(long, default_value_t = 0)]
    developing: usize,
    #[arg(long, default_value_t = 0)]
    twin_pairs: usize,
    #[arg(long, default_value_t = 10)]
    descendants: usize,
    #[arg(long, default_value_t = 3)]
    references: usize,
    /// Fraction of descendants shared within a twin pair.
    #[arg(long, default_value_t = 1.0)]
    overlap: f64,
    #[arg(long, default_value_t = 1950)]
    year_lo: i32,
    #[arg(long, default_value_t = 2000)]
    year_hi: i32,
    /// Mean references per background paper.
    #[arg(long, default_value_t = 4)]
    background_refs: usize,
    /// Extra background references per planted descendant.
    #[arg(long, default_value_t = 2)]
    extra_refs: usize,
    /// Add the single twin-to-twin citation.
    #[arg(long)]
    twin_edge: bool,
    /// Uniform attachment instead of preferential.
    #[arg(long)]
    uniform_attachment: bool,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Args)]
struct ReportArgs {
    /// Score table (any table with a `key` first column).
    #[arg(long)]
    scores: PathBuf,
    /// Column of the score table to analyze.
    #[arg(long, default_value = "delta")]
    column: String,
    /// Labels file: `key<TAB>label`.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value = "disruptive")]
    class_a: String,
    #[arg(long, default_value = "developing")]
    class_b: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::LoadCheck(a) => cmd_load_check(a),
        Command::Score(a) => cmd_score(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Null(a) => cmd_null(a),
        Command::Twins(a) => cmd_twins(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            // divergence aborts are distinguishable from input errors
            let diverged = err
                .chain()
                .any(|c| matches!(c.downcast_ref::<TrainError>(), Some(TrainError::Diverged { .. })));
            ExitCode::from(if diverged { 3 } else { 2 })
        }
    }
}

fn cmd_load_check(args: LoadCheckArgs) -> Result<()> {
    let started = Instant::now();
    let g = args.graph.load()?;
    let ds = g.degree_stats();
    let years: Vec<i32> = g.papers().map(|p| g.year(p)).collect();
    println!("papers\t{}", g.len());
    println!("edges\t{}", g.edge_count());
    println!("duplicate_edges_dropped\t{}", g.duplicate_edges_dropped());
    println!("self_citations_dropped\t{}", g.self_citations_dropped());
    println!(
        "years\t{}..{}",
        years.iter().min().unwrap(),
        years.iter().max().unwrap()
    );
    println!(
        "max_in_degree\t{}",
        ds.in_degree.iter().max().copied().unwrap_or(0)
    );
    println!(
        "max_out_degree\t{}",
        ds.out_degree.iter().max().copied().unwrap_or(0)
    );
    println!(
        "isolated_papers\t{}",
        (0..g.len())
            .filter(|&i| ds.in_degree[i] == 0 && ds.out_degree[i] == 0)
            .count()
    );
    if !g.check_consistency() {
        bail!("adjacency consistency check failed");
    }
    println!("consistency\tok");
    println!("elapsed_ms\t{}", started.elapsed().as_millis());
    Ok(())
}

fn parse_variants(spec: &str, horizon: i32) -> Result<DisruptionVariants> {
    let mut v = DisruptionVariants::default();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part {
            "d" => {}
            "dnok" | "d_nok" => v.nok = true,
            "d5" | "dh" | "horizon" => v.horizon = Some(horizon),
            "d2" | "two-step" | "two_step" => v.two_step = true,
            other => bail!("unknown variant `{other}` (expected d, dnok, d5, d2)"),
        }
    }
    Ok(v)
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("score");
    manifest.add_file("input.edges", &args.graph.edges)?;
    manifest.add_file("input.meta", &args.graph.meta)?;

    let mut g = args.graph.load()?;
    args.filter.apply(&mut g)?;
    let variants = parse_variants(&args.variants, args.horizon)?;
    let cfg = DisruptionConfig {
        nk_requires_later_year: !args.legacy_nk,
    };
    let rows = disruption_all(&g, &variants, &cfg);
    tables::write_disruption_table(&rows, &g, variants.two_step, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;

    manifest.set("variants", &args.variants);
    manifest.set("horizon", args.horizon);
    manifest.set("rows", rows.len());
    manifest.set("timing.total_ms", started.elapsed().as_millis());
    manifest.add_file("output.scores", &args.out)?;
    manifest.write(&manifest_path(&args.out))?;
    println!("scored {} papers -> {}", rows.len(), args.out.display());
    Ok(())
}

fn manifest_path(primary: &Path) -> PathBuf {
    let mut p = primary.as_os_str().to_owned();
    p.push(".manifest");
    PathBuf::from(p)
}

fn cmd_embed(args: EmbedArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("embed");
    manifest.add_file("input.edges", &args.graph.edges)?;
    manifest.add_file("input.meta", &args.graph.meta)?;

    let seed = args.seed.resolve();
    let mut g = args.graph.load()?;
    args.filter.apply(&mut g)?;

    let train_cfg = args.train.config(seed);
    train_cfg.validate()?;
    manifest.set("seed", seed);
    manifest.set("train.config_hash", hex(&train_cfg.config_hash()));
    manifest.set("train.mode", train_cfg.mode_label());

    let table = match &args.vectors_in {
        Some(path) => {
            let table = import_vectors(path)?;
            if table.n() != g.len() {
                bail!(
                    "vector container {} holds {} papers but the graph has {}",
                    path.display(),
                    table.n(),
                    g.len()
                );
            }
            if table.config_hash != train_cfg.config_hash() {
                eprintln!(
                    "warning: vector config hash {} differs from current run {}",
                    hex(&table.config_hash),
                    hex(&train_cfg.config_hash())
                );
            }
            manifest.add_file("input.vectors", path)?;
            table
        }
        None => {
            let walk_cfg = WalkConfig {
                walks_per_node: args.walk.walks,
                walk_length: args.walk.walk_length,
                seed,
                start_set: StartSet::All,
            };
            let t0 = Instant::now();
            let corpus = generate_walks(&g, &walk_cfg);
            manifest.set("timing.walks_ms", t0.elapsed().as_millis());
            manifest.set("walks.count", corpus.len());
            manifest.set("walks.tokens", corpus.total_tokens());
            if let Some(path) = &args.walks_out {
                corpus.write(path)?;
                manifest.add_file("output.walks", path)?;
            }
            let t0 = Instant::now();
            let table = train(&corpus, &train_cfg)?;
            manifest.set("timing.train_ms", t0.elapsed().as_millis());
            manifest.set(
                "train.epoch_mean_loss",
                table
                    .epoch_mean_loss
                    .iter()
                    .map(|l| format!("{l:.6}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            table
        }
    };

    export_vectors(&table, &args.out_vectors)?;
    if let Some(prefix) = &args.text_vectors {
        let keys: Vec<String> = g.papers().map(|p| g.key(p).to_string()).collect();
        let mut past = prefix.as_os_str().to_owned();
        past.push(".past.txt");
        let mut future = prefix.as_os_str().to_owned();
        future.push(".future.txt");
        export_vectors_text(&table, &keys, MatrixKind::Past, &PathBuf::from(past))?;
        export_vectors_text(&table, &keys, MatrixKind::Future, &PathBuf::from(future))?;
    }

    let rows = edm_all(&table, &g);
    tables::write_edm_table(&rows, &g, args.include_excluded, &args.out_scores)?;

    manifest.set("papers.trained", table.trained_count());
    manifest.set("timing.total_ms", started.elapsed().as_millis());
    manifest.add_file("output.vectors", &args.out_vectors)?;
    manifest.add_file("output.scores", &args.out_scores)?;
    manifest.write(&manifest_path(&args.out_scores))?;
    println!(
        "trained {} papers -> {} + {}",
        table.trained_count(),
        args.out_vectors.display(),
        args.out_scores.display()
    );
    Ok(())
}

fn cmd_null(args: NullArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("null");
    manifest.add_file("input.edges", &args.graph.edges)?;
    manifest.add_file("input.meta", &args.graph.meta)?;

    let seed = args.seed.resolve();
    let mut g = args.graph.load()?;
    args.filter.apply(&mut g)?;

    let walk_cfg = WalkConfig {
        walks_per_node: args.walk.walks,
        walk_length: args.walk.walk_length,
        seed,
        start_set: StartSet::All,
    };
    let train_cfg = args.train.config(seed);
    train_cfg.validate()?;
    let rewire_cfg = RewireConfig {
        seed: args.rewire_seed.unwrap_or(seed),
        forbid_self_loops: !args.allow_self_loops,
        forbid_duplicate_edges: !args.allow_duplicate_edges,
        identity: args.identity_null,
        ..RewireConfig::default()
    };
    manifest.set("seed", seed);
    manifest.set("rewire.seed", rewire_cfg.seed);
    manifest.set("train.config_hash", hex(&train_cfg.config_hash()));

    let cmp = null_pipeline(
        &g,
        &walk_cfg,
        &train_cfg,
        &rewire_cfg,
        &DisruptionVariants::default(),
        &DisruptionConfig::default(),
    )?;

    let prefix = args.out_prefix.as_os_str().to_str().unwrap_or_default();
    let path = |suffix: &str| PathBuf::from(format!("{prefix}.{suffix}.tsv"));

    tables::write_disruption_table(&cmp.original_disruption, &g, false, &path("d_orig"))?;
    tables::write_disruption_table(&cmp.null_disruption, &cmp.rewired, false, &path("d_null"))?;
    tables::write_edm_table(&cmp.original_edm, &g, false, &path("delta_orig"))?;
    tables::write_edm_table(&cmp.null_edm, &cmp.rewired, false, &path("delta_null"))?;

    // per-paper percentile shifts over papers ranked in both runs
    let d_pct = |rows: &[edm_core::disruption::DisruptionRow]| -> Vec<Option<f64>> {
        let mut out = vec![None; g.len()];
        let defined: Vec<(usize, f64)> = rows
            .iter()
            .filter_map(|r| r.d.map(|d| (r.paper.index(), d)))
            .collect();
        if defined.is_empty() {
            return out;
        }
        let values: Vec<f64> = defined.iter().map(|&(_, d)| d).collect();
        let pct = percentile_rank(&values).expect("non-empty");
        for (&(i, _), p) in defined.iter().zip(pct) {
            out[i] = Some(p);
        }
        out
    };
    let delta_pct = |rows: &[edm_core::edm::EdmRow]| -> Vec<Option<f64>> {
        let mut out = vec![None; g.len()];
        for r in rows {
            out[r.paper.index()] = r.scores.percentile;
        }
        out
    };
    let d_orig = d_pct(&cmp.original_disruption);
    let d_null = d_pct(&cmp.null_disruption);
    let e_orig = delta_pct(&cmp.original_edm);
    let e_null = delta_pct(&cmp.null_edm);
    let shift_rows: Vec<tables::PercentileShiftRow> = g
        .papers()
        .filter(|p| !g.is_excluded(*p))
        .map(|p| tables::PercentileShiftRow {
            key: g.key(p).to_string(),
            d_orig: d_orig[p.index()],
            d_null: d_null[p.index()],
            delta_orig: e_orig[p.index()],
            delta_null: e_null[p.index()],
        })
        .collect();
    tables::write_percentile_shift_table(&shift_rows, &path("percentile_shift"))?;

    for suffix in ["d_orig", "d_null", "delta_orig", "delta_null", "percentile_shift"] {
        manifest.add_file(&format!("output.{suffix}"), &path(suffix))?;
    }
    manifest.set("timing.total_ms", started.elapsed().as_millis());
    manifest.write(&PathBuf::from(format!("{prefix}.manifest")))?;
    println!("null comparison -> {prefix}.*.tsv");
    Ok(())
}

fn cmd_twins(args: TwinsArgs) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("twins");
    manifest.add_file("input.edges", &args.graph.edges)?;
    manifest.add_file("input.meta", &args.graph.meta)?;
    manifest.add_file("input.vectors", &args.vectors)?;

    let g = args.graph.load()?;
    let table = import_vectors(&args.vectors)?;
    if table.n() != g.len() {
        bail!(
            "vector container {} holds {} papers but the graph has {}",
            args.vectors.display(),
            table.n(),
            g.len()
        );
    }
    let policy = TwinPolicy {
        same_year: !args.any_year,
        exclude_doc_types: args.exclude_types.clone(),
        min_citations: args.min_citations,
        mutual_only: !args.one_directional,
    };
    let pairs = find_candidate_pairs(&table, &g, &policy);
    tables::write_pair_table(&pairs, &g, &args.out)?;

    manifest.set("pairs", pairs.len());
    manifest.set("timing.total_ms", started.elapsed().as_millis());
    manifest.add_file("output.pairs", &args.out)?;
    manifest.write(&manifest_path(&args.out))?;
    println!("{} candidate pairs -> {}", pairs.len(), args.out.display());
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let started = Instant::now();
    let seed = args.seed.resolve();
    let cfg = SynthConfig {
        n_background: args.background,
        n_disruptive: args.disruptive,
        n_developing: args.developing,
        n_twin_pairs: args.twin_pairs,
        descendants_per_planted: args.descendants,
        references_per_planted: args.references,
        descendant_overlap_for_twins: args.overlap,
        year_lo: args.year_lo,
        year_hi: args.year_hi,
        seed,
        background_refs: args.background_refs,
        descendant_extra_refs: args.extra_refs,
        twin_citation_edge: args.twin_edge,
        attachment: if args.uniform_attachment {
            Attachment::Uniform
        } else {
            Attachment::Preferential
        },
    };
    let out = generate(&cfg)?;

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let edges = args.out_dir.join("edges.tsv");
    let meta = args.out_dir.join("meta.tsv");
    let labels = args.out_dir.join("labels.tsv");
    let header = format!("synthetic network, seed {seed}");
    out.graph.write(&edges, &meta, Some(&header))?;
    out.write_labels(&labels)?;

    let mut manifest = RunManifest::new("synth");
    manifest.set("seed", seed);
    manifest.set("papers", out.graph.len());
    manifest.set("edges", out.graph.edge_count());
    for class in [
        PlantedClass::Disruptive,
        PlantedClass::Developing,
        PlantedClass::Twin,
    ] {
        manifest.set(
            &format!("planted.{class}"),
            out.papers_with_label(class).len(),
        );
    }
    manifest.add_file("output.edges", &edges)?;
    manifest.add_file("output.meta", &meta)?;
    manifest.add_file("output.labels", &labels)?;
    manifest.set("timing.total_ms", started.elapsed().as_millis());
    manifest.write(&args.out_dir.join("manifest"))?;
    println!(
        "synthetic network: {} papers, {} edges -> {}",
        out.graph.len(),
        out.graph.edge_count(),
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let scores = tables::read_column(&args.scores, &args.column)
        .with_context(|| format!("reading {}", args.scores.display()))?;
    let labels = tables::read_labels(&args.labels)
        .with_context(|| format!("reading {}", args.labels.display()))?;
    let by_key: std::collections::HashMap<&str, &str> = labels
        .iter()
        .map(|(k, l)| (k.as_str(), l.as_str()))
        .collect();

    let scored: Vec<(&str, f64)> = scores
        .iter()
        .filter_map(|(k, v)| v.map(|v| (k.as_str(), v)))
        .collect();
    let class_a: Vec<f64> = scored
        .iter()
        .filter(|(k, _)| by_key.get(k) == Some(&args.class_a.as_str()))
        .map(|&(_, v)| v)
        .collect();
    let class_b: Vec<f64> = scored
        .iter()
        .filter(|(k, _)| by_key.get(k) == Some(&args.class_b.as_str()))
        .map(|&(_, v)| v)
        .collect();
    if class_a.is_empty() {
        bail!("no scored papers labeled `{}`", args.class_a);
    }
    if class_b.is_empty() {
        bail!("no scored papers labeled `{}`", args.class_b);
    }
    let auc = edm_core::stats::mann_whitney_auc(&class_a, &class_b).expect("non-empty");
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let all: Vec<f64> = scored.iter().map(|&(_, v)| v).collect();
    let pct = percentile_rank(&all).expect("non-empty");
    let mean_pct = |class: &str| -> f64 {
        let sel: Vec<f64> = scored
            .iter()
            .zip(&pct)
            .filter(|((k, _), _)| by_key.get(k) == Some(&class))
            .map(|(_, &p)| p)
            .collect();
        sel.iter().sum::<f64>() / sel.len() as f64
    };

    println!("column\t{}", args.column);
    println!("n_{}\t{}", args.class_a, class_a.len());
    println!("n_{}\t{}", args.class_b, class_b.len());
    println!("auc\t{:.4}", auc);
    println!("mean_{}\t{:.6}", args.class_a, mean(&class_a));
    println!("mean_{}\t{:.6}", args.class_b, mean(&class_b));
    println!("mean_pct_{}\t{:.2}", args.class_a, mean_pct(&args.class_a));
    println!("mean_pct_{}\t{:.2}", args.class_b, mean_pct(&args.class_b));
    Ok(())
}
