//! The five workflows behind the subcommands.

use std::fmt;
use std::path::{Path, PathBuf};

use netcompare::inference::{
    range_probability, run_comparison, CompareOptions, ComparisonReport, DensityEstimate,
    FeatureSamples, LossKind, Ratio,
};
use netcompare::study::{run_study, StudyConfig, StudyResult};
use netcompare::{
    extract_feature, prior_predictive, write_edge_list, FeatureKind, FeatureValue, ModelSpec,
    ParamPrior,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::io::{csv_text, emit, read_graph};
use crate::{Format, OutArgs, SimArgs};

pub const DEFAULT_SAMPLES: usize = 100;
const DEFAULT_STUDY_NODES: usize = 200;
const CURVE_POINTS: usize = 200;
const HISTOGRAM_BINS: usize = 30;

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    /// Bad flags, unreadable files, invalid specs: exit code 2.
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    /// Statistically indeterminate result: exit code 3.
    pub fn indeterminate(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    pub fn internal(e: impl fmt::Display) -> Self {
        CliError {
            code: 1,
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.code == 3 {
            "indeterminate evidence"
        } else {
            "error"
        };
        write!(f, "{kind}: {}", self.message)
    }
}

impl From<netcompare::Error> for CliError {
    fn from(e: netcompare::Error) -> Self {
        if e.is_indeterminate() {
            CliError::indeterminate(e.to_string())
        } else {
            CliError::config(e.to_string())
        }
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::config(format!("missing required --{flag}")))
}

fn load_spec(path: &Path) -> Result<ModelSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    ModelSpec::from_json(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn parse_features(list: Option<&str>) -> Result<Vec<FeatureKind>, CliError> {
    match list {
        None => Ok(FeatureKind::ALL_DEFAULT.to_vec()),
        Some(s) => s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.parse::<FeatureKind>().map_err(CliError::from))
            .collect::<Result<Vec<_>, _>>()
            .and_then(|v| {
                if v.is_empty() {
                    Err(CliError::config("empty feature list"))
                } else {
                    Ok(v)
                }
            }),
    }
}

/// `param:v1,v2,...` into a parameter name and a uniform grid prior.
fn parse_grid(s: &str) -> Result<(String, ParamPrior), CliError> {
    let (param, values) = s
        .split_once(':')
        .ok_or_else(|| CliError::config(format!("--grid expects param:v1,v2,..., got {s:?}")))?;
    let values = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("bad grid value {v:?}")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Ok((param.trim().to_string(), ParamPrior::grid(values)))
}

/// Applies `--grid` to every spec that has the named parameter.
fn apply_grid(specs: &mut [&mut ModelSpec], grid: Option<&str>) -> Result<(), CliError> {
    let Some(grid) = grid else { return Ok(()) };
    let (param, prior) = parse_grid(grid)?;
    let mut applied = false;
    for spec in specs.iter_mut() {
        if spec.parameter().is_some_and(|(name, _)| name == param) {
            **spec = spec.with_parameter(&param, prior.clone())?;
            applied = true;
        }
    }
    if applied {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "no model has parameter {param:?}"
        )))
    }
}

struct SimSettings {
    samples: usize,
    seed: u64,
    grid: Option<String>,
}

fn sim_settings(sim: &SimArgs, cfg: &RunConfig) -> Result<SimSettings, CliError> {
    let samples = sim.samples.or(cfg.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::config("--samples must be at least 1"));
    }
    Ok(SimSettings {
        samples,
        seed: sim.seed.or(cfg.seed).unwrap_or(0),
        grid: sim.grid.clone().or_else(|| cfg.grid.clone()),
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::internal)?;
    text.push('\n');
    Ok(text)
}

fn value_text(v: &FeatureValue) -> String {
    match v {
        FeatureValue::Discrete(x) => x.to_string(),
        FeatureValue::Continuous(x) => x.to_string(),
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    index: usize,
    file: String,
    seed: u64,
    node_count: usize,
    edge_count: usize,
}

#[derive(Serialize)]
struct Manifest {
    spec: ModelSpec,
    n_samples: usize,
    master_seed: u64,
    graphs: Vec<ManifestEntry>,
}

pub fn generate(
    model: Option<PathBuf>,
    sim: &SimArgs,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(sim.config.as_deref())?;
    let settings = sim_settings(sim, &cfg)?;
    let mut spec = load_spec(&require(model.or(cfg.model), "model")?)?;
    apply_grid(&mut [&mut spec], settings.grid.as_deref())?;
    let dir = require(out.or(cfg.out), "out")?;
    let graphs = prior_predictive(&spec, settings.samples, settings.seed)?;
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    let width = (graphs.len() - 1).to_string().len().max(4);
    let mut entries = Vec::with_capacity(graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let file = format!("graph_{i:0width$}.tsv");
        emit(Some(&dir.join(&file)), &write_edge_list(g))?;
        entries.push(ManifestEntry {
            index: i,
            file,
            seed: netcompare::generators::sample_seed(settings.seed, i),
            node_count: g.node_count(),
            edge_count: g.edge_count(),
        });
    }
    let manifest = Manifest {
        spec,
        n_samples: settings.samples,
        master_seed: settings.seed,
        graphs: entries,
    };
    emit(Some(&dir.join("manifest.json")), &to_json(&manifest)?)
}

#[derive(Serialize)]
struct FeatureRow {
    feature: FeatureKind,
    variant: &'static str,
    /// `null` when the feature is undefined on this graph.
    value: Option<FeatureValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct FeatureTable {
    node_count: usize,
    edge_count: usize,
    features: Vec<FeatureRow>,
}

pub fn features(
    data: Option<PathBuf>,
    list: Option<String>,
    output: &OutArgs,
    config: Option<PathBuf>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(config.as_deref())?;
    let g = read_graph(&require(data.or(cfg.data), "data")?)?;
    let list = list.or_else(|| cfg.features.as_ref().map(|f| f.joined()));
    let kinds = parse_features(list.as_deref())?;
    let rows: Vec<FeatureRow> = kinds
        .into_iter()
        .map(|kind| {
            let variant = if kind.is_discrete() {
                "discrete"
            } else {
                "continuous"
            };
            match extract_feature(&g, kind) {
                Ok(v) => FeatureRow {
                    feature: kind,
                    variant,
                    value: Some(v),
                    error: None,
                },
                Err(e) => FeatureRow {
                    feature: kind,
                    variant,
                    value: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let out = output.out.clone().or(cfg.out);
    let text = match output.format.or(cfg.format).unwrap_or(Format::Json) {
        Format::Json => to_json(&FeatureTable {
            node_count: g.node_count(),
            edge_count: g.edge_count(),
            features: rows,
        })?,
        Format::Csv => csv_text(
            &["feature", "variant", "value"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.feature.to_string(),
                        r.variant.to_string(),
                        r.value
                            .as_ref()
                            .map_or_else(|| "null".to_string(), value_text),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    };
    emit(out.as_deref(), &text)
}

pub struct CompareArgs {
    pub model: Option<PathBuf>,
    pub model2: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub features: Option<String>,
    pub loss: Option<String>,
    pub priors: Option<String>,
    pub plot_dir: Option<PathBuf>,
}

fn parse_priors(s: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("bad model prior {p:?}")))
        })
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(CliError::config(
            "--priors expects two comma-separated values",
        )),
    }
}

/// CSV rows of the per-feature table of a report.
pub fn report_csv(report: &ComparisonReport) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = report
        .features
        .iter()
        .map(|f| {
            vec![
                f.kind.to_string(),
                value_text(&f.observed),
                f.evidence_1.to_string(),
                f.evidence_2.to_string(),
                f.log_evidence_1.to_string(),
                f.log_evidence_2.to_string(),
                f.bayes_factor.to_string(),
                f.el_1.to_string(),
                f.el_2.to_string(),
                f.loss_ratio.to_string(),
            ]
        })
        .collect();
    csv_text(
        &[
            "kind",
            "observed",
            "evidence_1",
            "evidence_2",
            "log_evidence_1",
            "log_evidence_2",
            "bayes_factor",
            "el_1",
            "el_2",
            "loss_ratio",
        ],
        &rows,
    )
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "model".to_string(), |s| s.to_string_lossy().into_owned())
}

/// Equal-width bins over the pooled range; unit bins for integer features.
fn histogram(samples: &[FeatureSamples; 2]) -> Vec<Vec<String>> {
    let pooled: Vec<f64> = samples.iter().flat_map(|s| s.as_f64()).collect();
    let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (start, width, bins) = if samples[0].is_discrete() {
        (lo - 0.5, 1.0, (hi - lo) as usize + 1)
    } else if hi > lo {
        (lo, (hi - lo) / HISTOGRAM_BINS as f64, HISTOGRAM_BINS)
    } else {
        (lo - 0.5, 1.0, 1)
    };
    let mut rows = Vec::new();
    for s in samples {
        let mut counts = vec![0usize; bins];
        for x in s.as_f64() {
            let b = (((x - start) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        for (b, c) in counts.into_iter().enumerate() {
            let left = start + width * b as f64;
            rows.push(vec![
                s.model_id.clone(),
                left.to_string(),
                (left + width).to_string(),
                c.to_string(),
            ]);
        }
    }
    rows
}

fn write_plots(
    dir: &Path,
    details: &[netcompare::inference::FeatureDetail],
    report: &ComparisonReport,
) -> Result<(), CliError> {
    for (detail, record) in details.iter().zip(&report.features) {
        let name = record.kind.to_string().replace(':', "_");
        let mut rows = Vec::new();
        for (density, samples) in detail.densities.iter().zip(&detail.samples) {
            let points: Vec<(f64, f64)> = match density {
                DensityEstimate::Kde { .. } => density.curve(CURVE_POINTS),
                DensityEstimate::DiscretePmf { .. } => density.curve(0),
            };
            for (x, y) in points {
                rows.push(vec![samples.model_id.clone(), x.to_string(), y.to_string()]);
            }
        }
        emit(
            Some(&dir.join(format!("{name}_density.csv"))),
            &csv_text(&["model", "x", "density"], &rows)?,
        )?;
        emit(
            Some(&dir.join(format!("{name}_histogram.csv"))),
            &csv_text(
                &["model", "bin_lo", "bin_hi", "count"],
                &histogram(&detail.samples),
            )?,
        )?;
    }
    Ok(())
}

pub fn compare(args: CompareArgs, sim: &SimArgs, output: &OutArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(sim.config.as_deref())?;
    let settings = sim_settings(sim, &cfg)?;
    let path_1 = require(args.model.or(cfg.model), "model")?;
    let path_2 = require(args.model2.or(cfg.model2), "model2")?;
    let mut spec_1 = load_spec(&path_1)?;
    let mut spec_2 = load_spec(&path_2)?;
    apply_grid(&mut [&mut spec_1, &mut spec_2], settings.grid.as_deref())?;
    let data = read_graph(&require(args.data.or(cfg.data), "data")?)?;
    let list = args
        .features
        .or_else(|| cfg.features.as_ref().map(|f| f.joined()));
    let kinds = parse_features(Some(&require(list, "features")?))?;
    let loss: LossKind = args
        .loss
        .or(cfg.loss)
        .as_deref()
        .unwrap_or("quadratic")
        .parse()?;
    let mut options = CompareOptions::new(kinds, loss, settings.samples, settings.seed);
    if let Some(p) = args
        .priors
        .or_else(|| cfg.priors.as_ref().map(|p| p.joined()))
    {
        options.model_priors = parse_priors(&p)?;
    }
    let (name_1, mut name_2) = (file_stem(&path_1), file_stem(&path_2));
    if name_1 == name_2 {
        name_2.push_str("_2");
    }
    let run = run_comparison(&data, (&name_1, &spec_1), (&name_2, &spec_2), &options).map_err(
        |e| match e {
            netcompare::Error::UndefinedFeature(_) => CliError::indeterminate(e.to_string()),
            other => other.into(),
        },
    )?;
    if let Some(dir) = args.plot_dir.or(cfg.plot_dir) {
        write_plots(&dir, &run.details, &run.report)?;
    }
    let text = match output.format.or(cfg.format).unwrap_or(Format::Json) {
        Format::Json => to_json(&run.report)?,
        Format::Csv => report_csv(&run.report)?,
    };
    emit(output.out.clone().or(cfg.out).as_deref(), &text)
}

#[derive(Debug, Clone, Serialize)]
struct ModelRange {
    model: String,
    probability: f64,
    std_error: f64,
}

#[derive(Debug, Clone, Serialize)]
struct RangeRow {
    feature: FeatureKind,
    lo: f64,
    hi: f64,
    models: Vec<ModelRange>,
    /// `P(range | model 1) / P(range | model 2)`; null when both are zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<Option<Ratio>>,
}

#[derive(Serialize)]
struct ElicitReport {
    n_samples: usize,
    master_seed: u64,
    ranges: Vec<RangeRow>,
}

/// `feature:lo:hi`; the feature token may itself carry a `:param` suffix.
fn parse_range(s: &str) -> Result<(FeatureKind, f64, f64), CliError> {
    let mut parts = s.rsplitn(3, ':');
    let (hi, lo, feature) = match (parts.next(), parts.next(), parts.next()) {
        (Some(hi), Some(lo), Some(f)) => (hi, lo, f),
        _ => {
            return Err(CliError::config(format!(
                "--range expects feature:lo:hi, got {s:?}"
            )))
        }
    };
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| CliError::config(format!("bad range bound {t:?}")))
    };
    let (lo, hi) = (num(lo)?, num(hi)?);
    if !(lo <= hi) {
        return Err(CliError::config(format!("range {s:?} has lo > hi")));
    }
    Ok((feature.parse()?, lo, hi))
}

pub fn elicit(
    model: Option<PathBuf>,
    model2: Option<PathBuf>,
    ranges: Vec<String>,
    sim: &SimArgs,
    output: &OutArgs,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(sim.config.as_deref())?;
    let settings = sim_settings(sim, &cfg)?;
    let ranges = if ranges.is_empty() {
        cfg.ranges.clone()
    } else {
        ranges
    };
    if ranges.is_empty() {
        return Err(CliError::config("missing required --range"));
    }
    let queries = ranges
        .iter()
        .map(|r| parse_range(r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut paths = vec![require(model.or(cfg.model.clone()), "model")?];
    paths.extend(model2.or(cfg.model2.clone()));
    let mut specs = paths
        .iter()
        .map(|p| load_spec(p))
        .collect::<Result<Vec<_>, _>>()?;
    {
        let mut refs: Vec<&mut ModelSpec> = specs.iter_mut().collect();
        apply_grid(&mut refs, settings.grid.as_deref())?;
    }
    let mut names: Vec<String> = paths.iter().map(|p| file_stem(p)).collect();
    if names.len() == 2 && names[0] == names[1] {
        names[1].push_str("_2");
    }
    let ensembles = specs
        .iter()
        .map(|s| prior_predictive(s, settings.samples, settings.seed))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::with_capacity(queries.len());
    for (kind, lo, hi) in queries {
        let mut models = Vec::new();
        for (name, graphs) in names.iter().zip(&ensembles) {
            let samples = FeatureSamples::from_graphs(kind, name.clone(), graphs)?;
            let rp = range_probability(&samples, lo, hi)?;
            models.push(ModelRange {
                model: name.clone(),
                probability: rp.probability,
                std_error: rp.std_error,
            });
        }
        let ratio = (models.len() == 2).then(|| {
            netcompare::inference::bayes_factor(models[0].probability, models[1].probability).ok()
        });
        rows.push(RangeRow {
            feature: kind,
            lo,
            hi,
            models,
            ratio,
        });
    }

    let text = match output.format.or(cfg.format).unwrap_or(Format::Json) {
        Format::Json => to_json(&ElicitReport {
            n_samples: settings.samples,
            master_seed: settings.seed,
            ranges: rows,
        })?,
        Format::Csv => {
            let mut header = vec!["feature", "lo", "hi", "model", "probability", "std_error"];
            if names.len() == 2 {
                header.push("ratio");
            }
            let mut out = Vec::new();
            for r in &rows {
                for m in &r.models {
                    let mut line = vec![
                        r.feature.to_string(),
                        r.lo.to_string(),
                        r.hi.to_string(),
                        m.model.clone(),
                        m.probability.to_string(),
                        m.std_error.to_string(),
                    ];
                    if let Some(ratio) = &r.ratio {
                        line.push(ratio.map_or_else(|| "null".to_string(), |x| x.to_string()));
                    }
                    out.push(line);
                }
            }
            csv_text(&header, &out)?
        }
    };
    emit(output.out.clone().or(cfg.out).as_deref(), &text)
}

/// Table with one line per `(replication, row, loss)`.
pub fn study_csv(result: &StudyResult) -> Result<String, CliError> {
    let window_labels: Vec<String> = result
        .records
        .first()
        .map(|r| r.windows.iter().map(|w| w.label.clone()).collect())
        .unwrap_or_default();
    let mut header: Vec<String> = ["replication", "real_param", "loss", "loss_ratio"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for label in &window_labels {
        header.push(format!("p_{label}"));
        header.push(format!("log_p_{label}"));
    }
    header.extend(
        [
            "features",
            "model_1",
            "model_2",
            "posterior_feature",
            "observed",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    let rows: Vec<Vec<String>> = result
        .records
        .iter()
        .map(|r| {
            let mut line = vec![
                r.replication.to_string(),
                r.real_param.clone(),
                r.loss.to_string(),
                r.loss_ratio.to_string(),
            ];
            for w in &r.windows {
                line.push(w.probability.to_string());
                line.push(w.log_probability.to_string());
            }
            line.push(
                r.features
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join("+"),
            );
            line.push(r.model_1.clone());
            line.push(r.model_2.clone());
            line.push(r.posterior_feature.to_string());
            line.push(value_text(&r.observed));
            line
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_text(&header_refs, &rows)
}

pub fn simulate(
    nodes: Option<usize>,
    replications: Option<usize>,
    sim: &SimArgs,
    output: &OutArgs,
) -> Result<(), CliError> {
    let mut study = match &sim.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<StudyConfig>(&text).map_err(|e| {
                CliError::config(format!("bad study config {}: {e}", path.display()))
            })?
        }
        None => StudyConfig::table4(nodes.unwrap_or(DEFAULT_STUDY_NODES), 0),
    };
    if sim.config.is_some() && nodes.is_some() {
        return Err(CliError::config(
            "--nodes applies only to the built-in study; set n in the config instead",
        ));
    }
    if let Some(n) = sim.samples {
        study.n_samples = n;
    }
    if let Some(s) = sim.seed {
        study.seed = s;
    }
    if let Some(r) = replications {
        study.replications = r;
    }
    {
        let mut refs: Vec<&mut ModelSpec> = study.hypotheses.iter_mut().collect();
        apply_grid(&mut refs, sim.grid.as_deref())?;
    }
    let result = run_study(&study)?;
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&result)?,
        Format::Csv => study_csv(&result)?,
    };
    emit(output.out.as_deref(), &text)
}
