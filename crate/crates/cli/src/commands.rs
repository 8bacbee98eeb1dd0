//! The four subcommands and the files they write.

use std::fs;
use std::path::{Path, PathBuf};

use mvreg_core::diagnostics::{
    breusch_pagan, mape, plot_series, vif, BpVariant, BreuschPaganResult, MapeValue, PlotSeries,
    VifReport,
};
use mvreg_core::features::{encode_dataset, EncodedDataset, PlayerRecord};
use mvreg_core::ingest::{apply_filters, parse_players_csv, write_players_csv, FilterConfig};
use mvreg_core::ols::{fit_ols_with_level, FitResult};
use mvreg_core::selection::{backward_eliminate_with_level, EliminationTrace};
use serde::Serialize;
use thiserror::Error;

use crate::report::render_summary;
use crate::synth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    #[default]
    Both,
}

impl Format {
    fn text(self) -> bool {
        matches!(self, Format::Text | Format::Both)
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub out: PathBuf,
    pub alpha: f64,
    pub bp_variant: BpVariant,
    pub filters: FilterConfig,
    pub format: Format,
    pub confidence: f64,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            out: out.into(),
            alpha: 0.1,
            bp_variant: BpVariant::default(),
            filters: FilterConfig::default(),
            format: Format::default(),
            confidence: mvreg_core::ols::DEFAULT_CONFIDENCE,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Config(format!("--alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(CliError::Config(format!(
                "--confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        self.filters.validate().map_err(CliError::Core)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mvreg_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("no records left after filtering ({excluded} excluded)")]
    EmptyInput { excluded: usize },
    #[error("no model has every p-value at or below {alpha}")]
    NoConformingModel { alpha: f64 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serializing JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 empty or degenerate input, 3 schema or parse error, 4 no
    /// conforming model, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use mvreg_core::Error as E;
        match self {
            CliError::Core(E::Schema(_) | E::Parse { .. }) => 3,
            CliError::Core(_) | CliError::Config(_) | CliError::EmptyInput { .. } => 2,
            CliError::NoConformingModel { .. } => 4,
            CliError::Io { .. } | CliError::Json(_) => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Collects output files and writes them only once everything succeeded.
#[derive(Default)]
struct Outputs {
    files: Vec<(&'static str, Vec<u8>)>,
}

impl Outputs {
    fn text(&mut self, name: &'static str, body: String) {
        self.files.push((name, body.into_bytes()));
    }

    fn json<T: Serialize>(&mut self, name: &'static str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, body);
        Ok(())
    }

    fn write(self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (name, body) in self.files {
            let path = dir.join(name);
            fs::write(&path, body).map_err(io_err(&path))?;
        }
        Ok(())
    }
}

/// Records that survived the filters, plus the encoded dataset built from them.
pub struct Prepared {
    pub records: Vec<PlayerRecord>,
    pub excluded: usize,
    pub data: EncodedDataset,
}

pub fn prepare(cfg: &PipelineConfig) -> Result<Prepared, CliError> {
    cfg.validate()?;
    let file = fs::File::open(&cfg.input).map_err(io_err(&cfg.input))?;
    let records = parse_players_csv(file)?;
    let filtered = apply_filters(&records, &cfg.filters);
    let excluded = filtered.log.len();
    if filtered.accepted.is_empty() {
        return Err(CliError::EmptyInput { excluded });
    }
    let data = encode_dataset(&filtered.accepted)?;
    Ok(Prepared {
        records: filtered.accepted,
        excluded,
        data,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreuschPaganPair {
    pub koenker: Option<BreuschPaganResult>,
    pub original: Option<BreuschPaganResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    /// `full` or `selected`.
    pub model: &'static str,
    pub columns: Vec<String>,
    pub n_obs: usize,
    pub bp_variant: BpVariant,
    pub breusch_pagan: Option<BreuschPaganResult>,
    pub breusch_pagan_variants: BreuschPaganPair,
    pub vif: Option<VifReport>,
    pub mape: MapeValue,
    pub notes: Vec<String>,
}

pub fn diagnostics_report(
    model: &'static str,
    fit: &FitResult,
    data: &EncodedDataset,
    variant: BpVariant,
) -> Result<DiagnosticsReport, CliError> {
    let mut notes = Vec::new();
    let mut bp = |v: BpVariant| match breusch_pagan(fit, data, v) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("Breusch-Pagan ({v:?}) unavailable: {e}"));
            None
        }
    };
    let variants = BreuschPaganPair {
        koenker: bp(BpVariant::Koenker),
        original: bp(BpVariant::Original),
    };
    let vif = match vif(data) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("VIF unavailable: {e}"));
            None
        }
    };
    let chosen = match variant {
        BpVariant::Koenker => variants.koenker.clone(),
        BpVariant::Original => variants.original.clone(),
    };
    Ok(DiagnosticsReport {
        model,
        columns: data.column_names(),
        n_obs: fit.n_obs,
        bp_variant: variant,
        breusch_pagan: chosen,
        breusch_pagan_variants: variants,
        vif,
        mape: mape(&data.response, &fit.fitted)?,
        notes,
    })
}

fn plot_csvs(out: &mut Outputs, series: &PlotSeries) {
    let mut residuals = String::from("fitted,residual\n");
    for (f, r) in &series.residual_series {
        residuals.push_str(&format!("{f},{r}\n"));
    }
    let mut measured = String::from("actual,predicted\n");
    for (a, p) in &series.measured_predicted {
        measured.push_str(&format!("{a},{p}\n"));
    }
    out.text("residuals.csv", residuals);
    out.text("measured_predicted.csv", measured);
}

fn model_outputs(out: &mut Outputs, fit: &FitResult, format: Format) -> Result<(), CliError> {
    if format.text() {
        out.text("summary.txt", render_summary(fit)?);
    }
    if format.json() {
        out.json("fit.json", fit)?;
    }
    Ok(())
}

fn log_counts(prepared: &Prepared) {
    eprintln!(
        "{} records accepted, {} excluded by filters, {} columns",
        prepared.records.len(),
        prepared.excluded,
        prepared.data.design.cols()
    );
}

pub fn cmd_fit(cfg: &PipelineConfig) -> Result<FitResult, CliError> {
    let prepared = prepare(cfg)?;
    log_counts(&prepared);
    let fit = fit_ols_with_level(&prepared.data, cfg.confidence)?;
    let mut out = Outputs::default();
    model_outputs(&mut out, &fit, cfg.format)?;
    out.write(&cfg.out)?;
    Ok(fit)
}

pub fn cmd_select(cfg: &PipelineConfig) -> Result<EliminationTrace, CliError> {
    let prepared = prepare(cfg)?;
    log_counts(&prepared);
    let trace = backward_eliminate_with_level(&prepared.data, cfg.alpha, cfg.confidence)?;
    let mut out = Outputs::default();
    out.json("trace.json", &trace)?;
    if trace.no_conforming_model {
        out.write(&cfg.out)?;
        return Err(CliError::NoConformingModel { alpha: cfg.alpha });
    }
    let selected = trace.final_dataset(&prepared.data);
    model_outputs(&mut out, &trace.final_fit, cfg.format)?;
    let diag = diagnostics_report("selected", &trace.final_fit, &selected, cfg.bp_variant)?;
    out.json("diagnostics.json", &diag)?;
    plot_csvs(&mut out, &plot_series(&trace.final_fit));
    out.write(&cfg.out)?;
    Ok(trace)
}

pub fn cmd_diagnose(cfg: &PipelineConfig, select: bool) -> Result<DiagnosticsReport, CliError> {
    let prepared = prepare(cfg)?;
    log_counts(&prepared);
    let (fit, data, model) = if select {
        let trace = backward_eliminate_with_level(&prepared.data, cfg.alpha, cfg.confidence)?;
        if trace.no_conforming_model {
            return Err(CliError::NoConformingModel { alpha: cfg.alpha });
        }
        let data = trace.final_dataset(&prepared.data);
        (trace.final_fit, data, "selected")
    } else {
        let fit = fit_ols_with_level(&prepared.data, cfg.confidence)?;
        (fit, prepared.data, "full")
    };
    let diag = diagnostics_report(model, &fit, &data, cfg.bp_variant)?;
    let mut out = Outputs::default();
    out.json("diagnostics.json", &diag)?;
    plot_csvs(&mut out, &plot_series(&fit));
    out.write(&cfg.out)?;
    Ok(diag)
}

pub fn cmd_synth(out_dir: &Path, seed: Option<u64>, n: usize) -> Result<synth::SynthTruth, CliError> {
    let seed = seed.ok_or_else(|| CliError::Config("synth needs --seed".to_string()))?;
    if n < synth::MIN_PLAYERS {
        return Err(CliError::Config(format!(
            "--n must be at least {}, got {n}",
            synth::MIN_PLAYERS
        )));
    }
    let (records, truth) = synth::generate(seed, n)?;
    let mut csv = Vec::new();
    write_players_csv(&mut csv, &records)?;
    let mut out = Outputs::default();
    out.files.push(("synth.csv", csv));
    out.json("synth_truth.json", &truth)?;
    out.write(out_dir)?;
    Ok(truth)
}
