//! Plain-text dataset, config, and artifact formats.
//!
//! Everything is line-oriented and auditable:
//!
//! - edges: one `u v` pair per line, 0-indexed, whitespace separated
//! - features: one row of whitespace-separated decimals per node
//! - labels: one integer per line, `-1` for unlabeled
//! - split: one of `train`/`val`/`test`/`none` per line
//! - config: `key = value` lines with `#` comments
//!
//! Blank lines and `#` comments are allowed everywhere. Numeric artifacts
//! (embeddings, parameters) round-trip 64-bit values losslessly via
//! shortest-representation decimal formatting.

use std::fmt::Write as _;
use std::fs;

use crate::analysis::{BoundPropertyReport, HomophilyReport, SpectralReport};
use crate::error::{Result, UgclError};
use crate::eval::{EvalReport, Split, SplitRole};
use crate::graph::{EdgeHygiene, Graph};
use crate::linalg::DenseMatrix;
use crate::model::EncoderParams;
use crate::trainer::{Ablation, TrainConfig, TrainedModel};

/// File locations of one dataset.
#[derive(Debug, Clone, Default)]
pub struct DatasetBundle {
    pub edges_path: String,
    pub features_path: String,
    pub labels_path: Option<String>,
    pub split_path: Option<String>,
}

/// What the loader dropped or fixed up.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadReport {
    pub hygiene: EdgeHygiene,
}

/// Load and validate a dataset bundle. The feature file determines the node
/// count; every other file is validated against it.
pub fn load_dataset(bundle: &DatasetBundle) -> Result<(Graph, Option<Split>, LoadReport)> {
    let features = read_features(&bundle.features_path)?;
    let n = features.rows();
    let edges = read_edges(&bundle.edges_path, n)?;
    let labels = bundle
        .labels_path
        .as_ref()
        .map(|p| read_labels(p, n))
        .transpose()?;
    let split = bundle
        .split_path
        .as_ref()
        .map(|p| read_split(p, n))
        .transpose()?;
    let (graph, hygiene) = Graph::from_edges_with_hygiene(n, &edges, features, labels)?;
    if let Some(s) = &split {
        s.validate(n)?;
    }
    Ok((graph, split, LoadReport { hygiene }))
}

fn read_to_string(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|source| UgclError::Io {
        path: path.to_string(),
        source,
    })
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> UgclError {
    UgclError::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

/// Lines with content: (1-based line number, trimmed text).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn read_features(path: &str) -> Result<DenseMatrix> {
    let text = read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (lineno, line) in content_lines(&text) {
        let mut row = Vec::with_capacity(width.unwrap_or(8));
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("non-numeric feature `{tok}`")))?;
            if !v.is_finite() {
                return Err(parse_err(path, lineno, format!("non-finite feature `{tok}`")));
            }
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("expected {w} feature columns, found {}", row.len()),
                ))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "feature file has no rows"));
    }
    DenseMatrix::from_rows(&rows)
}

pub fn read_edges(path: &str, num_nodes: usize) -> Result<Vec<(usize, usize)>> {
    let text = read_to_string(path)?;
    let mut edges = Vec::new();
    for (lineno, line) in content_lines(&text) {
        let mut it = line.split_whitespace();
        let (Some(a), Some(b)) = (it.next(), it.next()) else {
            return Err(parse_err(path, lineno, "expected `u v`"));
        };
        if it.next().is_some() {
            return Err(parse_err(path, lineno, "expected exactly two node indices"));
        }
        let u: usize = a
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad node index `{a}`")))?;
        let v: usize = b
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad node index `{b}`")))?;
        if u >= num_nodes || v >= num_nodes {
            return Err(parse_err(
                path,
                lineno,
                format!("node index out of range: ({u}, {v}) with {num_nodes} nodes"),
            ));
        }
        edges.push((u, v));
    }
    Ok(edges)
}

pub fn read_labels(path: &str, num_nodes: usize) -> Result<Vec<i64>> {
    let text = read_to_string(path)?;
    let mut labels = Vec::with_capacity(num_nodes);
    for (lineno, line) in content_lines(&text) {
        let l: i64 = line
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad label `{line}`")))?;
        if l < -1 {
            return Err(parse_err(path, lineno, "labels are class indices or -1"));
        }
        labels.push(l);
    }
    if labels.len() != num_nodes {
        return Err(parse_err(
            path,
            text.lines().count().max(1),
            format!("expected {num_nodes} labels, found {}", labels.len()),
        ));
    }
    Ok(labels)
}

pub fn read_split(path: &str, num_nodes: usize) -> Result<Split> {
    let text = read_to_string(path)?;
    let mut roles = Vec::with_capacity(num_nodes);
    for (lineno, line) in content_lines(&text) {
        let role = SplitRole::parse(line).map_err(|e| parse_err(path, lineno, e.to_string()))?;
        roles.push(role);
    }
    if roles.len() != num_nodes {
        return Err(parse_err(
            path,
            text.lines().count().max(1),
            format!("expected {num_nodes} split tokens, found {}", roles.len()),
        ));
    }
    Ok(Split::from_roles(&roles))
}

/// A per-scope rate sequence (one decimal per line), e.g. digitized
/// published homophily rates. `rates[k]` is the rate at scope `k + 1`.
pub fn read_rates(path: &str) -> Result<Vec<f64>> {
    let text = read_to_string(path)?;
    let mut rates = Vec::new();
    for (lineno, line) in content_lines(&text) {
        let r: f64 = line
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad rate `{line}`")))?;
        if !(0.0..=1.0).contains(&r) {
            return Err(parse_err(path, lineno, format!("rate {r} outside [0, 1]")));
        }
        rates.push(r);
    }
    if rates.is_empty() {
        return Err(parse_err(path, 1, "rate file has no rows"));
    }
    Ok(rates)
}

// ---------------------------------------------------------------------------
// embeddings
// ---------------------------------------------------------------------------

pub fn save_embeddings(path: &str, h: &DenseMatrix) -> Result<()> {
    let mut out = String::new();
    out.push_str("# ugcl embeddings v1\n");
    let _ = writeln!(out, "{} {}", h.rows(), h.cols());
    for r in 0..h.rows() {
        let row = h.row(r);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| UgclError::Io {
        path: path.to_string(),
        source,
    })
}

pub fn load_embeddings(path: &str) -> Result<DenseMatrix> {
    let text = read_to_string(path)?;
    let mut lines = content_lines(&text);
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty embeddings file"))?;
    let mut it = header.split_whitespace();
    let (Some(r), Some(c)) = (it.next(), it.next()) else {
        return Err(parse_err(path, lineno, "expected `rows cols` header"));
    };
    let rows: usize = r
        .parse()
        .map_err(|_| parse_err(path, lineno, "bad row count"))?;
    let cols: usize = c
        .parse()
        .map_err(|_| parse_err(path, lineno, "bad column count"))?;

    let mut data = Vec::with_capacity(rows * cols);
    for (lineno, line) in lines {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad value `{tok}`")))?;
            data.push(v);
        }
    }
    if data.len() != rows * cols {
        return Err(parse_err(
            path,
            text.lines().count().max(1),
            format!("expected {} values, found {}", rows * cols, data.len()),
        ));
    }
    DenseMatrix::from_vec(rows, cols, data)
}

// ---------------------------------------------------------------------------
// trained parameters
// ---------------------------------------------------------------------------

const TRAIN_HASH_KEYS: &[&str] = &[
    "epochs",
    "sample_size",
    "power_n",
    "hidden_dim",
    "learning_rate",
    "temperature",
    "seed",
    "ablation",
    "use_bias",
];

/// Canonical `key = value` block of the train-affecting configuration, in
/// fixed key order. Both the params file and the config hash are built from
/// this string.
pub fn canonical_train_config(cfg: &TrainConfig) -> String {
    let mut out = String::new();
    for key in TRAIN_HASH_KEYS {
        let value = match *key {
            "epochs" => cfg.epochs.to_string(),
            "sample_size" => cfg.sample_size.to_string(),
            "power_n" => cfg.power_n.to_string(),
            "hidden_dim" => cfg.hidden_dim.to_string(),
            "learning_rate" => cfg.learning_rate.to_string(),
            "temperature" => cfg.temperature.to_string(),
            "seed" => cfg.seed.to_string(),
            "ablation" => cfg.ablation.name().to_string(),
            "use_bias" => cfg.use_bias.to_string(),
            _ => unreachable!(),
        };
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}

/// FNV-1a over the canonical train-config block.
pub fn config_hash(cfg: &TrainConfig) -> u64 {
    fnv1a64(canonical_train_config(cfg).as_bytes())
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn save_params(path: &str, model: &TrainedModel) -> Result<()> {
    let cfg = &model.config;
    let mut out = String::new();
    out.push_str("# ugcl params v1\n");
    let _ = writeln!(out, "config_hash = {:016x}", config_hash(cfg));
    let _ = writeln!(out, "feature_dim = {}", model.theta.in_dim());
    let _ = writeln!(out, "hidden_dim = {}", model.theta.out_dim());
    out.push_str("config_begin\n");
    out.push_str(&canonical_train_config(cfg));
    out.push_str("config_end\n");
    write_encoder(&mut out, "theta", &model.theta);
    write_encoder(&mut out, "phi", &model.phi);
    fs::write(path, out).map_err(|source| UgclError::Io {
        path: path.to_string(),
        source,
    })
}

fn write_encoder(out: &mut String, name: &str, p: &EncoderParams) {
    let _ = writeln!(out, "{name}_weight {} {}", p.in_dim(), p.out_dim());
    for r in 0..p.in_dim() {
        let row = p.weight.row(r);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{name}_bias");
    for (i, v) in p.bias.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
    let _ = writeln!(out, "{name}_slope");
    let _ = writeln!(out, "{}", p.prelu_slope);
}

/// Parameters plus the configuration they were trained under.
#[derive(Debug, Clone)]
pub struct SavedModel {
    pub model: TrainedModel,
    pub stored_hash: u64,
}

pub fn load_params(path: &str) -> Result<SavedModel> {
    let text = read_to_string(path)?;
    let mut lines = content_lines(&text).peekable();

    let mut stored_hash: Option<u64> = None;
    let mut config_pairs: Vec<(String, String)> = Vec::new();

    // header section up to config_end
    loop {
        let Some((lineno, line)) = lines.next() else {
            return Err(parse_err(path, 1, "truncated params file (no config block)"));
        };
        if line == "config_begin" {
            loop {
                let Some((lineno, line)) = lines.next() else {
                    return Err(parse_err(path, 1, "truncated params file (unterminated config)"));
                };
                if line == "config_end" {
                    break;
                }
                let (k, v) = split_key_value(line)
                    .ok_or_else(|| parse_err(path, lineno, "expected `key = value`"))?;
                config_pairs.push((k.to_string(), v.to_string()));
            }
            break;
        }
        if let Some((k, v)) = split_key_value(line) {
            match k {
                "config_hash" => {
                    stored_hash = Some(
                        u64::from_str_radix(v, 16)
                            .map_err(|_| parse_err(path, lineno, "bad config_hash"))?,
                    );
                }
                "feature_dim" | "hidden_dim" => {}
                other => {
                    return Err(parse_err(path, lineno, format!("unexpected header key `{other}`")))
                }
            }
        } else {
            return Err(parse_err(path, lineno, "expected header `key = value`"));
        }
    }

    let stored_hash =
        stored_hash.ok_or_else(|| parse_err(path, 1, "params file missing config_hash"))?;

    let mut cfg = TrainConfig::default();
    for (k, v) in &config_pairs {
        apply_train_key(&mut cfg, k, v)
            .map_err(|e| parse_err(path, 1, format!("bad stored config: {e}")))?;
    }
    // integrity: the stored hash must match the stored config block
    let recomputed = config_hash(&cfg);
    if recomputed != stored_hash {
        return Err(UgclError::ConfigDrift {
            stored: format!("{stored_hash:016x}"),
            current: format!("{recomputed:016x}"),
        });
    }

    let theta = read_encoder(path, &mut lines, "theta")?;
    let phi = read_encoder(path, &mut lines, "phi")?;

    Ok(SavedModel {
        model: TrainedModel {
            theta,
            phi,
            config: cfg,
        },
        stored_hash,
    })
}

fn read_encoder<'a, I>(
    path: &str,
    lines: &mut I,
    name: &str,
) -> Result<EncoderParams>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, format!("truncated params file (missing {name})")))?;
    let want = format!("{name}_weight");
    let mut it = header.split_whitespace();
    if it.next() != Some(want.as_str()) {
        return Err(parse_err(path, lineno, format!("expected `{want} R C`")));
    }
    let rows: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(path, lineno, "bad weight row count"))?;
    let cols: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(path, lineno, "bad weight column count"))?;

    let mut data = Vec::with_capacity(rows * cols);
    while data.len() < rows * cols {
        let Some((lineno, line)) = lines.next() else {
            return Err(parse_err(path, 1, "truncated params file (weights)"));
        };
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad weight `{tok}`")))?;
            data.push(v);
        }
    }
    let weight = DenseMatrix::from_vec(rows, cols, data)?;

    let (lineno, marker) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "truncated params file (bias)"))?;
    if marker != format!("{name}_bias") {
        return Err(parse_err(path, lineno, format!("expected `{name}_bias`")));
    }
    let (lineno, bias_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "truncated params file (bias values)"))?;
    let bias: Vec<f64> = bias_line
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_err(path, lineno, format!("bad bias `{t}`")))
        })
        .collect::<Result<_>>()?;
    if bias.len() != cols {
        return Err(parse_err(
            path,
            lineno,
            format!("expected {cols} bias values, found {}", bias.len()),
        ));
    }

    let (lineno, marker) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "truncated params file (slope)"))?;
    if marker != format!("{name}_slope") {
        return Err(parse_err(path, lineno, format!("expected `{name}_slope`")));
    }
    let (lineno, slope_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "truncated params file (slope value)"))?;
    let prelu_slope: f64 = slope_line
        .parse()
        .map_err(|_| parse_err(path, lineno, "bad slope"))?;

    Ok(EncoderParams {
        weight,
        bias,
        prelu_slope,
    })
}

pub fn split_key_value(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    Some((k.trim(), v.trim()))
}

/// Apply one `key = value` pair onto a training configuration. Unknown keys
/// are errors so typos never pass silently.
pub fn apply_train_key(cfg: &mut TrainConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "epochs" => cfg.epochs = parse_num(key, value)?,
        "sample_size" => cfg.sample_size = parse_num(key, value)?,
        "power_n" => cfg.power_n = parse_num(key, value)?,
        "hidden_dim" => cfg.hidden_dim = parse_num(key, value)?,
        "learning_rate" => cfg.learning_rate = parse_num(key, value)?,
        "temperature" => cfg.temperature = parse_num(key, value)?,
        "seed" => cfg.seed = parse_num(key, value)?,
        "log_every" => cfg.log_every = parse_num(key, value)?,
        "ablation" => cfg.ablation = Ablation::parse(value)?,
        "use_bias" => cfg.use_bias = parse_bool(key, value)?,
        other => return Err(UgclError::UnknownKey(other.to_string())),
    }
    Ok(())
}

pub fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| UgclError::InvalidArgument(format!("bad value `{value}` for `{key}`")))
}

pub fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(UgclError::InvalidArgument(format!(
            "bad boolean `{value}` for `{key}`"
        ))),
    }
}

// ---------------------------------------------------------------------------
// report serialization
// ---------------------------------------------------------------------------

/// Tab-separated homophily report: `# key = value` preamble, then one
/// `n measured bound` row per scope.
pub fn format_homophily_report(report: &HomophilyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# d_used = {}", report.d_used);
    let _ = writeln!(out, "# p1_used = {}", report.p1_used);
    let _ = writeln!(out, "# threshold = {}", report.threshold);
    let _ = writeln!(out, "# recommended_n = {}", report.recommended.n);
    let _ = writeln!(
        out,
        "# below_threshold_warning = {}",
        report.recommended.below_threshold
    );
    out.push_str("n\tmeasured\tlower_bound\n");
    for (i, m) in report.measured.iter().enumerate() {
        let bound = report
            .bounds
            .as_ref()
            .map_or("-".to_string(), |b| b[i].to_string());
        let _ = writeln!(out, "{}\t{m}\t{bound}", i + 1);
    }
    out
}

/// Tab-separated eval report: `repeat accuracy` rows plus a summary line.
pub fn format_eval_report(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str("repeat\taccuracy\n");
    for (i, a) in report.accuracies.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{a}");
    }
    let _ = writeln!(
        out,
        "mean\t{}\tstd\t{}",
        report.accuracy_mean, report.accuracy_std
    );
    for c in &report.missing_train_classes {
        let _ = writeln!(out, "# warning: class {c} absent from train set");
    }
    out
}

/// Tab-separated spectral report.
pub fn format_spectral_report(report: &SpectralReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# multiplicity = {}", report.multiplicity);
    let _ = writeln!(out, "# num_components = {}", report.num_components);
    let _ = writeln!(out, "# lambda_abs = {}", report.lambda_abs);
    let _ = writeln!(out, "# passed = {}", report.passed());
    out.push_str("n\tdistance\tratio\n");
    for (i, d) in report.distances.iter().enumerate() {
        let ratio = if i == 0 {
            "-".to_string()
        } else {
            let r = report.contraction_ratios[i - 1];
            if r.is_nan() {
                "-".to_string()
            } else {
                r.to_string()
            }
        };
        let _ = writeln!(out, "{i}\t{d}\t{ratio}");
    }
    for f in &report.failures {
        let _ = writeln!(out, "# failure: {f}");
    }
    out
}

/// Tab-separated bound-property report.
pub fn format_bound_report(report: &BoundPropertyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# points_checked = {}", report.points_checked);
    let _ = writeln!(out, "# comparisons = {}", report.comparisons);
    let _ = writeln!(out, "# violations = {}", report.violations.len());
    let _ = writeln!(out, "# passed = {}", report.passed());
    for v in &report.violations {
        let _ = writeln!(out, "violation\t{v}");
    }
    for (d, p1) in &report.boundary_points {
        let _ = writeln!(out, "boundary\td={d}\tp1={p1}\tmonotonicity vacuous");
    }
    out
}
