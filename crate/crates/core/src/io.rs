//! Text formats: matrices, partition labels, experiment configs and result
//! CSVs. All writers emit LF line endings only.
//!
//! Matrix file:
//!
//! ```text
//! m n
//! <m lines of exactly n characters from {0, 1, e}>
//! ```
//!
//! Labels file: the length `L` on the first line, then `L` space-separated
//! nonnegative integers on the second.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{AnalyticColumns, Event, ExperimentConfig, Mode, ResultTable, SweepAxis};
use crate::model::{
    BlockConstantMatrix, ChannelParams, GenerationLaw, ObservedMatrix, Partition, Symbol, TiePolicy,
};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn format_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Splits `text` into LF-terminated lines, rejecting CR and a missing final
/// newline.
fn lines_of<'a>(text: &'a str, path: &Path) -> Result<Vec<&'a str>> {
    if text.is_empty() {
        return Err(format_err(path, 1, "empty file"));
    }
    if !text.ends_with('\n') {
        let line = text.matches('\n').count() + 1;
        return Err(format_err(path, line, "missing final newline"));
    }
    let lines: Vec<&str> = text[..text.len() - 1].split('\n').collect();
    if let Some(i) = lines.iter().position(|l| l.contains('\r')) {
        return Err(format_err(
            path,
            i + 1,
            "carriage return; LF line endings required",
        ));
    }
    Ok(lines)
}

fn parse_dim(token: &str, path: &Path, name: &str) -> Result<usize> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format_err(
            path,
            1,
            format!("malformed header: {name} `{token}`"),
        ));
    }
    match token.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format_err(
            path,
            1,
            format!("malformed header: {name} must be positive"),
        )),
    }
}

/// Parses matrix text; `path` is only used in error messages.
pub fn parse_matrix(text: &str, path: &Path) -> Result<ObservedMatrix> {
    let lines = lines_of(text, path)?;
    let header: Vec<&str> = lines[0].split(' ').collect();
    if header.len() != 2 {
        return Err(format_err(path, 1, "malformed header: expected `m n`"));
    }
    let m = parse_dim(header[0], path, "m")?;
    let n = parse_dim(header[1], path, "n")?;
    if lines.len() != m + 1 {
        return Err(format_err(
            path,
            lines.len().min(m + 1) + 1,
            format!("expected {m} matrix lines, found {}", lines.len() - 1),
        ));
    }
    let mut entries = Vec::with_capacity(m * n);
    for (i, line) in lines[1..].iter().enumerate() {
        let lineno = i + 2;
        if line.len() != n {
            return Err(format_err(
                path,
                lineno,
                format!(
                    "wrong line length: expected {n}, found {}",
                    line.chars().count()
                ),
            ));
        }
        for (col, c) in line.chars().enumerate() {
            entries.push(match c {
                '0' => Symbol::Zero,
                '1' => Symbol::One,
                'e' => Symbol::Erased,
                other => {
                    return Err(format_err(
                        path,
                        lineno,
                        format!("illegal character {other:?} at column {}", col + 1),
                    ))
                }
            });
        }
    }
    ObservedMatrix::new(m, n, entries)
}

pub fn read_matrix(path: &Path) -> Result<ObservedMatrix> {
    parse_matrix(&read_text(path)?, path)
}

pub fn format_matrix(y: &ObservedMatrix) -> String {
    let mut out = String::with_capacity((y.n() + 1) * (y.m() + 1));
    let _ = writeln!(out, "{} {}", y.m(), y.n());
    for i in 0..y.m() {
        out.extend(y.row(i).iter().map(|s| match s {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Erased => 'e',
        }));
        out.push('\n');
    }
    out
}

pub fn write_matrix(y: &ObservedMatrix, path: &Path) -> Result<()> {
    write_text(path, &format_matrix(y))
}

/// Writes the dense bits of a block-constant matrix in the matrix format.
pub fn write_block_matrix(x: &BlockConstantMatrix, path: &Path) -> Result<()> {
    write_matrix(&ObservedMatrix::from_block_matrix(x), path)
}

/// Reads an erasure-free matrix as a block-constant matrix with singleton
/// clusters.
pub fn read_dense_matrix(path: &Path) -> Result<BlockConstantMatrix> {
    let y = read_matrix(path)?;
    let bits = y
        .to_bits()
        .ok_or_else(|| format_err(path, 2, "dense matrix must not contain erasures"))?;
    BlockConstantMatrix::new(
        Partition::singletons(y.m())?,
        Partition::singletons(y.n())?,
        bits,
    )
}

pub fn parse_labels(text: &str, path: &Path) -> Result<Partition> {
    let lines = lines_of(text, path)?;
    if lines.len() != 2 {
        return Err(format_err(
            path,
            lines.len().min(2) + 1,
            format!("expected 2 lines, found {}", lines.len()),
        ));
    }
    let len: usize = lines[0]
        .parse()
        .map_err(|_| format_err(path, 1, format!("non-integer length `{}`", lines[0])))?;
    let labels = lines[1]
        .split(' ')
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| format_err(path, 2, format!("non-integer token `{tok}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if labels.len() != len {
        return Err(format_err(
            path,
            2,
            format!("count mismatch: header says {len}, found {}", labels.len()),
        ));
    }
    Partition::from_labels(&labels)
}

pub fn read_labels(path: &Path) -> Result<Partition> {
    parse_labels(&read_text(path)?, path)
}

pub fn format_labels(p: &Partition) -> String {
    let body: Vec<String> = p.labels().iter().map(|l| l.to_string()).collect();
    format!("{}\n{}\n", p.len(), body.join(" "))
}

pub fn write_labels(p: &Partition, path: &Path) -> Result<()> {
    write_text(path, &format_labels(p))
}

/// Formats `x` with 12 significant digits, `%g` style: fixed notation for
/// decimal exponents in `[-5, 12)`, otherwise scientific; trailing zeros
/// trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..12).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Contents of an experiment config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub experiment: ExperimentConfig,
    pub sweep: Option<(SweepAxis, Vec<f64>)>,
}

const REQUIRED_KEYS: [&str; 9] = ["m", "n", "m0", "n0", "eps", "p", "trials", "seed", "mode"];
const OPTIONAL_KEYS: [&str; 5] = ["tie", "permute", "beta", "sweep_axis", "sweep_values"];

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Parses flat `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut values = std::collections::HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("line {}: expected `key = value`", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !REQUIRED_KEYS.contains(&key) && !OPTIONAL_KEYS.contains(&key) {
            return Err(config_err(key, "unknown key"));
        }
        if values.insert(key.to_string(), value.to_string()).is_some() {
            return Err(config_err(key, "duplicate key"));
        }
    }
    for key in REQUIRED_KEYS {
        if !values.contains_key(key) {
            return Err(config_err(key, "missing required key"));
        }
    }

    fn get<T: std::str::FromStr>(
        values: &std::collections::HashMap<String, String>,
        key: &str,
    ) -> Result<T> {
        let raw = &values[key];
        raw.parse()
            .map_err(|_| config_err(key, format!("type mismatch: cannot parse `{raw}`")))
    }
    let opt = |key: &str| values.get(key).map(String::as_str);

    let permute = match opt("permute") {
        None => true,
        Some(_) => get::<bool>(&values, "permute")?,
    };
    let law = GenerationLaw::new(
        get(&values, "m")?,
        get(&values, "n")?,
        get(&values, "m0")?,
        get(&values, "n0")?,
        permute,
    )
    .map_err(|e| config_err("m0", e.to_string()))?;
    let ch = ChannelParams::new(get(&values, "eps")?, get(&values, "p")?)
        .map_err(|e| config_err("eps", e.to_string()))?;
    let mode: Mode = values["mode"]
        .parse()
        .map_err(|e: Error| config_err("mode", e.to_string()))?;
    let tie = match opt("tie") {
        None => TiePolicy::FairCoin,
        Some(v) => v
            .parse()
            .map_err(|e: Error| config_err("tie", e.to_string()))?,
    };
    let trials: u64 = get(&values, "trials")?;
    if trials == 0 {
        return Err(config_err("trials", "must be at least 1"));
    }
    let aspect_beta = match opt("beta") {
        None => None,
        Some(_) => Some(get::<f64>(&values, "beta")?),
    };
    let sweep = match (opt("sweep_axis"), opt("sweep_values")) {
        (None, None) => None,
        (Some(axis), Some(list)) => {
            let axis: SweepAxis = axis
                .parse()
                .map_err(|e: Error| config_err("sweep_axis", e.to_string()))?;
            let vals = list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| config_err("sweep_values", format!("type mismatch: `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            Some((axis, vals))
        }
        (Some(_), None) => return Err(config_err("sweep_values", "missing required key")),
        (None, Some(_)) => return Err(config_err("sweep_axis", "missing required key")),
    };

    Ok(ConfigFile {
        experiment: ExperimentConfig {
            law,
            ch,
            tie,
            mode,
            trials,
            master_seed: get(&values, "seed")?,
            aspect_beta,
        },
        sweep,
    })
}

pub fn read_config(path: &Path) -> Result<ConfigFile> {
    parse_config(&read_text(path)?)
}

/// Parameter columns leading every results CSV.
pub const PARAM_COLUMNS: [&str; 6] = ["m", "n", "m0", "n0", "eps", "p"];

/// Header of the results CSV for `mode`.
pub fn results_header(mode: Mode) -> Vec<String> {
    let mut header: Vec<String> = PARAM_COLUMNS.iter().map(|s| s.to_string()).collect();
    for e in Event::for_mode(mode) {
        let name = e.name();
        for suffix in ["rate", "ci_low", "ci_high", "trials"] {
            header.push(format!("{name}_{suffix}"));
        }
    }
    header.push("mean_row_pairwise_errors".into());
    header.push("mean_row_decision_errors".into());
    header.extend(AnalyticColumns::NAMES.iter().map(|s| s.to_string()));
    header
}

/// Renders the results CSV in memory.
pub fn results_csv(table: &ResultTable) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(results_header(table.mode))?;
    for row in &table.rows {
        let law = &row.cfg.law;
        let mut rec: Vec<String> = [
            law.m as f64,
            law.n as f64,
            law.m0 as f64,
            law.n0 as f64,
            row.cfg.ch.epsilon(),
            row.cfg.ch.p(),
        ]
        .iter()
        .map(|&v| fmt_sig(v))
        .collect();
        for e in Event::for_mode(table.mode) {
            let est = row
                .rates
                .get(*e)
                .ok_or_else(|| Error::param("rates", format!("missing event {}", e.name())))?;
            rec.extend([est.rate, est.ci_low, est.ci_high].map(fmt_sig));
            rec.push(est.trials.to_string());
        }
        rec.push(fmt_sig(row.rates.mean_row_pairwise_errors));
        rec.push(fmt_sig(row.rates.mean_row_decision_errors));
        rec.extend(row.analytic.values().map(fmt_sig));
        w.write_record(&rec)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::param("csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn write_results_csv(table: &ResultTable, path: &Path) -> Result<()> {
    write_text(path, &results_csv(table)?)
}

/// A results CSV read back as numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Re-renders with the same number formatting as [`results_csv`].
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| fmt_sig(v)))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::param("csv", e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
    }
}

pub fn parse_results_csv(text: &str, path: &Path) -> Result<CsvTable> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| format_err(path, i + 2, format!("non-numeric field `{field}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

pub fn read_results_csv(path: &Path) -> Result<CsvTable> {
    parse_results_csv(&read_text(path)?, path)
}

/// `<stem>.rows` and `<stem>.cols`.
pub fn label_paths(stem: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = stem.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".rows"), with(".cols"))
}
