//! Tab-separated score tables: one header line, `NA` for undefined values.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::disruption::DisruptionRow;
use crate::edm::EdmRow;
use crate::graph::CitationGraph;
use crate::twins::CandidatePair;

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "NA".to_string(),
    }
}

/// `key n_i n_j n_k d d_nok d_horizon [d_two]`.
pub fn write_disruption_table(
    rows: &[DisruptionRow],
    g: &CitationGraph,
    include_two_step: bool,
    path: &Path,
) -> std::io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    let mut header = "key\tn_i\tn_j\tn_k\td\td_nok\td_horizon".to_string();
    if include_two_step {
        header.push_str("\td_two");
    }
    writeln!(f, "{header}")?;
    for r in rows {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            g.key(r.paper),
            r.n_i,
            r.n_j,
            r.n_k,
            opt(r.d),
            opt(r.d_nok),
            opt(r.d_horizon)
        )?;
        if include_two_step {
            write!(f, "\t{}", opt(r.d_two))?;
        }
        writeln!(f)?;
    }
    f.flush()
}

/// `key delta geodesic percentile valid`.
pub fn write_edm_table(
    rows: &[EdmRow],
    g: &CitationGraph,
    include_excluded: bool,
    path: &Path,
) -> std::io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "key\tdelta\tgeodesic\tpercentile\tvalid")?;
    for r in rows {
        if !include_excluded && g.is_excluded(r.paper) {
            continue;
        }
        writeln!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            g.key(r.paper),
            opt(r.scores.delta),
            opt(r.scores.geodesic),
            opt(r.scores.percentile),
            r.scores.valid
        )?;
    }
    f.flush()
}

/// `key_a key_b year cosine_distance mutual citations_a citations_b`.
pub fn write_pair_table(
    pairs: &[CandidatePair],
    g: &CitationGraph,
    path: &Path,
) -> std::io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(
        f,
        "key_a\tkey_b\tyear\tcosine_distance\tmutual\tcitations_a\tcitations_b"
    )?;
    for p in pairs {
        writeln!(
            f,
            "{}\t{}\t{}\t{:.6}\t{}\t{}\t{}",
            g.key(p.a),
            g.key(p.b),
            p.year,
            p.cosine_distance,
            p.mutual,
            g.in_degree(p.a),
            g.in_degree(p.b)
        )?;
    }
    f.flush()
}

/// Per-paper percentile shifts between an original and a null run:
/// `key d_pct_orig d_pct_null d_pct_shift delta_pct_orig delta_pct_null delta_pct_shift`.
pub struct PercentileShiftRow {
    pub key: String,
    pub d_orig: Option<f64>,
    pub d_null: Option<f64>,
    pub delta_orig: Option<f64>,
    pub delta_null: Option<f64>,
}

pub fn write_percentile_shift_table(
    rows: &[PercentileShiftRow],
    path: &Path,
) -> std::io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(
        f,
        "key\td_pct_orig\td_pct_null\td_pct_shift\tdelta_pct_orig\tdelta_pct_null\tdelta_pct_shift"
    )?;
    for r in rows {
        let shift = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some(y - x),
            _ => None,
        };
        writeln!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.key,
            opt(r.d_orig),
            opt(r.d_null),
            opt(shift(r.d_orig, r.d_null)),
            opt(r.delta_orig),
            opt(r.delta_null),
            opt(shift(r.delta_orig, r.delta_null)),
        )?;
    }
    f.flush()
}

/// Read one numeric column of a table written by this module, keyed by the
/// first column. `NA` maps to `None`.
pub fn read_column(path: &Path, column: &str) -> std::io::Result<Vec<(String, Option<f64>)>> {
    let f = BufReader::new(File::open(path)?);
    let mut lines = f.lines();
    let header = lines
        .next()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidData, "empty table"))??;
    let idx = header
        .split('\t')
        .position(|c| c == column)
        .ok_or_else(|| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("no column `{column}` in {}", path.display()),
            )
        })?;
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let key = fields.next().unwrap_or_default().to_string();
        let field = line.split('\t').nth(idx).ok_or_else(|| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("row for `{key}` is missing column {idx}"),
            )
        })?;
        let value = if field == "NA" {
            None
        } else {
            Some(field.parse::<f64>().map_err(|_| {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("bad number `{field}` for key `{key}`"),
                )
            })?)
        };
        out.push((key, value));
    }
    Ok(out)
}

/// Read a `key<TAB>label` file.
pub fn read_labels(path: &Path) -> std::io::Result<Vec<(String, String)>> {
    let f = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in f.lines() {
        let line = line?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next()) {
            (Some(k), Some(l)) => out.push((k.to_string(), l.to_string())),
            _ => {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("bad label row `{line}`"),
                ))
            }
        }
    }
    Ok(out)
}
