//! Command-line front end.
//!
//! Exit codes: 0 success, 1 findings at or above `--fail-on`, 2 the model
//! failed to parse or resolve, 3 usage, configuration or I/O error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dsl::{parse_model, ParseDiagnostic};
use crate::graph::{
    build_graph, EdgeKind, KindFilter, Step, StepRelation, TraceGraph, TraceMatrix,
};
use crate::impact::{
    default_propagation, impact, impact_report, ImpactError, ImpactReport, ImpactResult,
    Propagation, PropagationTable,
};
use crate::model::{EntityKind, Model};
use crate::rules::{
    coverage_stats, validate, CoverageStats, Finding, FindingCounts, RuleConfig, RuleId, Severity,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

pub const SCHEMA_VERSION: &str = "1";

/// Looked up next to the model when `--config` is not given.
pub const DEFAULT_CONFIG_NAME: &str = "tracekit.conf";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FailOn {
    Error,
    Warning,
    Never,
}

#[derive(Debug, Parser)]
#[command(
    name = "tracekit",
    version,
    about = "Safety-requirements traceability checker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the model against rules R1-R12.
    Check(CommonArgs),
    /// Report what a change to the given entities affects.
    Impact {
        #[command(flatten)]
        common: CommonArgs,
        /// Changed entity ids (comma separated or repeated).
        #[arg(long, value_delimiter = ',', required = true)]
        changed: Vec<String>,
    },
    /// Print a traceability matrix.
    Matrix {
        #[command(flatten)]
        common: CommonArgs,
        /// Row kind: acquirer, stakeholder, technical, specified, requirement,
        /// logical, physical, interface, element, testcase, risk or any.
        #[arg(long)]
        rows: String,
        /// Column kind (same names as --rows).
        #[arg(long)]
        cols: String,
        /// Relation steps such as `derive` or `satisfy:reverse`, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "derive")]
        relation: Vec<String>,
        /// Follow paths instead of single edges.
        #[arg(long)]
        transitive: bool,
    },
    /// Print coverage percentages and counts.
    Stats(CommonArgs),
    /// Print the trace graph in Graphviz DOT.
    ExportDot(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Model file (.sreq).
    model: PathBuf,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long = "fail-on", value_enum)]
    fail_on: Option<FailOn>,
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rules to turn off, e.g. `R4,R12`.
    #[arg(long, value_delimiter = ',')]
    disable: Vec<String>,
    #[arg(long = "propagate.derive", value_name = "DIR")]
    propagate_derive: Option<String>,
    #[arg(long = "propagate.refine", value_name = "DIR")]
    propagate_refine: Option<String>,
    #[arg(long = "propagate.satisfy", value_name = "DIR")]
    propagate_satisfy: Option<String>,
    #[arg(long = "propagate.verify", value_name = "DIR")]
    propagate_verify: Option<String>,
    #[arg(long = "propagate.specify", value_name = "DIR")]
    propagate_specify: Option<String>,
    #[arg(long = "propagate.allocate", value_name = "DIR")]
    propagate_allocate: Option<String>,
    #[arg(long = "propagate.covers", value_name = "DIR")]
    propagate_covers: Option<String>,
    #[arg(long = "propagate.parent", value_name = "DIR")]
    propagate_parent: Option<String>,
}

impl CommonArgs {
    fn propagation_flags(&self) -> Vec<(EdgeKind, &str)> {
        use crate::model::LinkKind as L;
        [
            (EdgeKind::Link(L::Derive), &self.propagate_derive),
            (EdgeKind::Link(L::Refine), &self.propagate_refine),
            (EdgeKind::Link(L::Satisfy), &self.propagate_satisfy),
            (EdgeKind::Link(L::Verify), &self.propagate_verify),
            (EdgeKind::Link(L::Specify), &self.propagate_specify),
            (EdgeKind::Link(L::Allocate), &self.propagate_allocate),
            (EdgeKind::Link(L::Covers), &self.propagate_covers),
            (EdgeKind::Parent, &self.propagate_parent),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

/// Everything one command needs, after merging defaults, the config file
/// and flags (flags win).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub rule_config: RuleConfig,
    pub propagation: PropagationTable,
    pub output_format: OutputFormat,
    pub fail_on: FailOn,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            input_path: input_path.into(),
            rule_config: RuleConfig::default(),
            propagation: default_propagation(),
            output_format: OutputFormat::Text,
            fail_on: FailOn::Error,
        }
    }

    /// Applies one `key = value` setting.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "format" => {
                self.output_format = OutputFormat::from_str(value, false)
                    .map_err(|_| format!("invalid format '{value}' (expected text or json)"))?
            }
            "fail-on" => {
                self.fail_on = FailOn::from_str(value, false).map_err(|_| {
                    format!("invalid fail-on '{value}' (expected error, warning or never)")
                })?
            }
            "disable" => {
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let rule: RuleId = name.parse()?;
                    self.rule_config.enabled.remove(&rule);
                }
            }
            "criticality-monotone" => {
                self.rule_config.criticality_monotone = match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(format!("invalid boolean '{other}'")),
                }
            }
            _ => {
                if let Some(kind) = key.strip_prefix("propagate.") {
                    let kind = EdgeKind::from_keyword(kind)
                        .ok_or_else(|| format!("unknown link kind '{kind}' in '{key}'"))?;
                    let p = match value {
                        "off" => None,
                        v => Some(v.parse::<Propagation>()?),
                    };
                    self.propagation.set(kind, p);
                } else if let Some(rule) = key.strip_prefix("severity.") {
                    let rule: RuleId = rule.parse()?;
                    let sev: Severity = value.parse()?;
                    self.rule_config.severity_overrides.insert(rule, sev);
                } else {
                    return Err(format!("unknown configuration key '{key}'"));
                }
            }
        }
        Ok(())
    }

    /// Applies a whole configuration file: `key = value` lines, `#` comments.
    pub fn apply_file(&mut self, text: &str, path: &Path) -> Result<(), String> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected 'key = value'", path.display(), n + 1))?;
            self.apply(key.trim(), value.trim())
                .map_err(|e| format!("{}:{}: {e}", path.display(), n + 1))?;
        }
        Ok(())
    }

    fn threshold_hit(&self, findings: &[Finding]) -> bool {
        let min = match self.fail_on {
            FailOn::Never => return false,
            FailOn::Error => Severity::Error,
            FailOn::Warning => Severity::Warning,
        };
        findings.iter().any(|f| !f.suppressed && f.severity >= min)
    }
}

fn run_config(common: &CommonArgs) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::new(&common.model);
    let config_path = match &common.config {
        Some(p) => Some(p.clone()),
        None => {
            let candidate = common
                .model
                .parent()
                .unwrap_or(Path::new(""))
                .join(DEFAULT_CONFIG_NAME);
            candidate.is_file().then_some(candidate)
        }
    };
    if let Some(path) = config_path {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config '{}': {e}", path.display()))?;
        cfg.apply_file(&text, &path)?;
    }
    if let Some(f) = common.format {
        cfg.output_format = f;
    }
    if let Some(f) = common.fail_on {
        cfg.fail_on = f;
    }
    for name in &common.disable {
        cfg.apply("disable", name)?;
    }
    for (kind, value) in common.propagation_flags() {
        cfg.apply(&format!("propagate.{kind}"), value)?;
    }
    Ok(cfg)
}

/// Command output: what goes to stdout, what goes to stderr, exit code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr,
        }
    }
}

struct Loaded {
    file: String,
    model: Model,
    graph: TraceGraph,
}

fn load(cfg: &RunConfig) -> Result<Loaded, Outcome> {
    let file = cfg.input_path.display().to_string();
    let text = std::fs::read_to_string(&cfg.input_path)
        .map_err(|e| Outcome::usage(format!("cannot read '{file}': {e}")))?;
    match parse_model(&text, &file) {
        Ok(model) => {
            let graph = build_graph(&model);
            Ok(Loaded { file, model, graph })
        }
        Err(diags) => Err(Outcome {
            code: EXIT_PARSE,
            stdout: String::new(),
            stderr: render_diagnostics(&diags),
        }),
    }
}

pub fn render_diagnostics(diags: &[ParseDiagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub file: String,
    pub entities: usize,
    pub links: usize,
    pub entity_counts: BTreeMap<String, usize>,
    pub link_counts: BTreeMap<String, usize>,
}

/// Machine-readable report for `check`, `stats` and `impact`.
#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub schema_version: &'static str,
    pub model_summary: ModelSummary,
    pub findings: Vec<Finding>,
    pub summary: FindingCounts,
    pub coverage: CoverageStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impact: Option<ImpactResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impact_report: Option<ImpactReport>,
}

impl JsonReport {
    pub fn new(file: &str, model: &Model, graph: &TraceGraph, rules: &RuleConfig) -> Self {
        let findings = validate(model, graph, rules);
        let coverage = coverage_stats(model, graph);
        JsonReport {
            schema_version: SCHEMA_VERSION,
            model_summary: ModelSummary {
                file: file.to_owned(),
                entities: model.entity_count(),
                links: model.links().len(),
                entity_counts: coverage.entity_counts.clone(),
                link_counts: coverage.link_counts.clone(),
            },
            summary: FindingCounts::of(&findings),
            findings,
            coverage,
            impact: None,
            impact_report: None,
        }
    }
}

/// Pretty JSON with a trailing newline; output is byte-stable for a given input.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn render_coverage(c: &CoverageStats) -> String {
    let mut out = String::new();
    for (name, v) in [
        ("verification", c.verification_coverage),
        ("risk", c.risk_coverage),
        ("transformation", c.transformation_coverage),
        ("satisfaction", c.satisfaction_coverage),
        ("allocation", c.allocation_coverage),
    ] {
        let _ = writeln!(out, "{name} coverage: {v:.1}%");
    }
    out
}

fn render_counts(counts: &FindingCounts) -> String {
    let mut s = format!("{} errors, {} warnings", counts.errors, counts.warnings);
    if counts.suppressed > 0 {
        let _ = write!(s, ", {} suppressed", counts.suppressed);
    }
    s
}

pub fn render_finding(file: &str, f: &Finding) -> String {
    let location = match &f.span {
        Some(s) => format!("{}:{}:{}", s.file, s.line, s.column),
        None => file.to_owned(),
    };
    let subjects: Vec<&str> = f.subjects.iter().map(|s| s.as_str()).collect();
    let suppressed = if f.suppressed { " [suppressed]" } else { "" };
    format!(
        "{location}: {}[{}]: {} ({}){suppressed}",
        f.severity,
        f.rule,
        f.message,
        subjects.join(", ")
    )
}

pub fn cmd_check(cfg: &RunConfig) -> Outcome {
    let loaded = match load(cfg) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let report = JsonReport::new(&loaded.file, &loaded.model, &loaded.graph, &cfg.rule_config);
    let code = if cfg.threshold_hit(&report.findings) {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    };
    let stdout = match cfg.output_format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Text => {
            let mut out = String::new();
            for f in &report.findings {
                let _ = writeln!(out, "{}", render_finding(&loaded.file, f));
            }
            if !report.findings.is_empty() {
                out.push('\n');
            }
            out.push_str(&render_coverage(&report.coverage));
            let _ = writeln!(out, "{}", render_counts(&report.summary));
            out
        }
    };
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}

pub fn cmd_impact(cfg: &RunConfig, changed: &[String]) -> Outcome {
    let loaded = match load(cfg) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let result = match impact(
        &loaded.model,
        &loaded.graph,
        changed.iter().map(String::as_str),
        &cfg.propagation,
    ) {
        Ok(r) => r,
        Err(e @ ImpactError::UnknownReference(_)) | Err(e @ ImpactError::EmptyChangeSet) => {
            return Outcome::usage(e.to_string())
        }
    };
    let report = impact_report(&result, &loaded.model);
    let stdout = match cfg.output_format {
        OutputFormat::Text => report.render_text(),
        OutputFormat::Json => {
            let mut json =
                JsonReport::new(&loaded.file, &loaded.model, &loaded.graph, &cfg.rule_config);
            json.impact = Some(result);
            json.impact_report = Some(report);
            to_json(&json)
        }
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

#[derive(Serialize)]
struct MatrixJson<'a> {
    schema_version: &'static str,
    matrix: &'a TraceMatrix,
}

pub fn render_matrix(m: &TraceMatrix) -> String {
    let mut out = format!("{}×{} matrix", m.rows.len(), m.columns.len());
    let relation: Vec<String> = m.relation.iter().map(Step::to_string).collect();
    let _ = writeln!(
        out,
        " ({} × {}, {}, {})",
        m.row_kind,
        m.column_kind,
        if relation.is_empty() {
            "-".to_owned()
        } else {
            relation.join("+")
        },
        if m.transitive { "transitive" } else { "direct" }
    );
    if m.rows.is_empty() || m.columns.is_empty() {
        return out;
    }
    let label_w = m.rows.iter().map(|r| r.as_str().len()).max().unwrap_or(0);
    let widths: Vec<usize> = m.columns.iter().map(|c| c.as_str().len().max(1)).collect();
    let _ = write!(out, "{:label_w$}", "");
    for (c, w) in m.columns.iter().zip(&widths) {
        let _ = write!(out, "  {:<w$}", c.as_str());
    }
    out.push('\n');
    for (r, row) in m.rows.iter().zip(&m.cells) {
        let mut line = format!("{:<label_w$}", r.as_str());
        for (cell, w) in row.iter().zip(&widths) {
            let _ = write!(line, "  {:<w$}", if *cell { "x" } else { "." });
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    out
}

pub fn cmd_matrix(
    cfg: &RunConfig,
    rows: &str,
    cols: &str,
    relation: &[String],
    transitive: bool,
) -> Outcome {
    let row_kind: KindFilter = match rows.parse() {
        Ok(k) => k,
        Err(e) => return Outcome::usage(e),
    };
    let col_kind: KindFilter = match cols.parse() {
        Ok(k) => k,
        Err(e) => return Outcome::usage(e),
    };
    let mut steps = StepRelation::new();
    for r in relation {
        match r.parse::<Step>() {
            Ok(s) => {
                steps.insert(s);
            }
            Err(e) => return Outcome::usage(e),
        }
    }
    let loaded = match load(cfg) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let m = loaded
        .graph
        .trace_matrix(row_kind, col_kind, &steps, transitive);
    let stdout = match cfg.output_format {
        OutputFormat::Text => render_matrix(&m),
        OutputFormat::Json => to_json(&MatrixJson {
            schema_version: SCHEMA_VERSION,
            matrix: &m,
        }),
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn dot_shape(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Requirement(_) => "box",
        EntityKind::Logical => "ellipse",
        EntityKind::Physical => "component",
        EntityKind::Interface => "diamond",
        EntityKind::TestCase => "note",
        EntityKind::Risk => "octagon",
    }
}

/// Graphviz rendering: nodes in id order, edges sorted by (source, target, kind).
pub fn export_dot(model: &Model, graph: &TraceGraph) -> String {
    let mut out = String::from("digraph trace {\n");
    for id in graph.nodes() {
        let kind = graph.kind_of(id.as_str()).expect("graph node");
        let safety = if model.requirement(id.as_str()).is_some_and(|r| r.safety) {
            ", peripheries=2"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  \"{id}\" [shape={}, label=\"{id}\\n{}\"{safety}];",
            dot_shape(kind),
            kind.label()
        );
    }
    let mut edges: Vec<_> = graph.edges().collect();
    edges.sort_by(|a, b| (a.source, a.target, a.kind).cmp(&(b.source, b.target, b.kind)));
    for e in edges {
        let style = if e.kind == EdgeKind::Parent {
            ", style=dashed"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"{style}];",
            e.source, e.target, e.kind
        );
    }
    out.push_str("}\n");
    out
}

pub fn cmd_export_dot(cfg: &RunConfig) -> Outcome {
    match load(cfg) {
        Ok(l) => Outcome {
            code: EXIT_OK,
            stdout: export_dot(&l.model, &l.graph),
            stderr: String::new(),
        },
        Err(o) => o,
    }
}

pub fn render_stats(c: &CoverageStats) -> String {
    let mut out = render_coverage(c);
    out.push_str("entities:\n");
    for (k, n) in &c.entity_counts {
        let _ = writeln!(out, "  {k}: {n}");
    }
    out.push_str("links:\n");
    for (k, n) in &c.link_counts {
        let _ = writeln!(out, "  {k}: {n}");
    }
    out
}

pub fn cmd_stats(cfg: &RunConfig) -> Outcome {
    let loaded = match load(cfg) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let stdout = match cfg.output_format {
        OutputFormat::Text => render_stats(&coverage_stats(&loaded.model, &loaded.graph)),
        OutputFormat::Json => to_json(&JsonReport::new(
            &loaded.file,
            &loaded.model,
            &loaded.graph,
            &cfg.rule_config,
        )),
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

/// Parses `args` (program name first) and runs the selected command.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Outcome {
                    code: if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        EXIT_OK
                    },
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome::usage(text),
            };
        }
    };
    let common = match &cli.command {
        Command::Check(c) | Command::Stats(c) | Command::ExportDot(c) => c,
        Command::Impact { common, .. } | Command::Matrix { common, .. } => common,
    };
    let cfg = match run_config(common) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(e),
    };
    match &cli.command {
        Command::Check(_) => cmd_check(&cfg),
        Command::Stats(_) => cmd_stats(&cfg),
        Command::ExportDot(_) => cmd_export_dot(&cfg),
        Command::Impact { changed, .. } => cmd_impact(&cfg, changed),
        Command::Matrix {
            rows,
            cols,
            relation,
            transitive,
            ..
        } => cmd_matrix(&cfg, rows, cols, relation, *transitive),
    }
}

/// Runs the CLI, writing to the given streams, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = execute(args);
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stderr.write_all(outcome.stderr.as_bytes());
    outcome.code
}
