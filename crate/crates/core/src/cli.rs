//! Command-line front end.
//!
//! Exit codes: 0 completed, 1 a verified property failed, 2 input or parse
//! error.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::conditions::{
    classify, estimate_xi, verify_proposition_k, ConditionIFunction, ConditionReport, PairSamplePlan,
};
use crate::error::{Error, Result, SourceDiagnostic};
use crate::iterate::{
    check_auxiliary_limit, check_demiclosed, check_fejer, check_strong_convergence, check_xst1, run_iteration,
    AuxiliaryLimitProbe, IterationConfig, IterationTrace, PropertyReport, StopReason, Xst1Sweep,
};
use crate::manifest::RunManifest;
use crate::mapping::{gallery, load_mapping, FixedSet, LoadedMapping};
use crate::space::{estimate_modulus, Exponent, NormSpec};
use crate::tolerance::Tolerance;
use crate::verdict::Verdict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "RSC_FIXPOINT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "rsc-fixpoint",
    version,
    about = "Classify generalized nonexpansive mappings and verify Krasnoselskii-Mann iterations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a mapping against each nonexpansive-type condition.
    Classify(ClassifyArgs),
    /// Run the Krasnoselskii-Mann iteration and write a trace.
    Iterate(IterateArgs),
    /// Check trajectory properties of a recorded trace.
    Verify(VerifyArgs),
    /// Estimate the radius in the convex-combination lemma.
    Xi(XiArgs),
    /// Estimate the modulus of convexity of an lp space.
    Modulus(ModulusArgs),
    /// Inspect the built-in mapping gallery.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct TolArgs {
    /// Relative tolerance: `lhs <= rhs` fails only if lhs > rhs (1 + rel) + abs.
    #[arg(long, default_value_t = Tolerance::DEFAULT_REL)]
    rel_tol: f64,
    /// Absolute tolerance floor.
    #[arg(long, default_value_t = Tolerance::DEFAULT_ABS)]
    abs_tol: f64,
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance> {
        if !(self.rel_tol >= 0.0 && self.abs_tol >= 0.0) {
            return Err(Error::input("tolerances must be nonnegative"));
        }
        Ok(Tolerance::new(self.rel_tol, self.abs_tol))
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; a `<out>.manifest.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Explicit manifest path (defaults to the sidecar of --out).
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// `gallery:<id>[:params]` or a mapping DSL file.
    #[arg(long)]
    mapping: String,
    /// Grid points per axis.
    #[arg(long, default_value_t = 201)]
    grid: usize,
    /// Sample this many random ordered pairs instead of all grid pairs.
    #[arg(long)]
    pairs: Option<usize>,
    /// Seed for random sampling; required with --pairs.
    #[arg(long)]
    seed: Option<u64>,
    /// lp exponent of the norm (a number >= 1 or `inf`).
    #[arg(long)]
    p: Option<Exponent>,
    /// Fixed points, `;`-separated, coordinates `,`-separated.
    #[arg(long)]
    fixed_points: Option<String>,
    /// Check condition (I) with f(r) = k r.
    #[arg(long)]
    condition_i_k: Option<f64>,
    /// Also check both inequalities implied by RSC.
    #[arg(long)]
    prop_k: bool,
    #[arg(long, default_value_t = crate::conditions::DEFAULT_MAX_WITNESSES)]
    max_witnesses: usize,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    output: OutArgs,
}

#[derive(Debug, Args)]
struct IterateArgs {
    /// `gallery:<id>[:params]` or a mapping DSL file.
    mapping: String,
    /// Starting point, coordinates `,`-separated.
    #[arg(long, allow_hyphen_values = true)]
    x1: String,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Stop once the residual is at most this value.
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Accept alpha outside [1/2, 1).
    #[arg(long)]
    force: bool,
    #[arg(long)]
    p: Option<Exponent>,
    /// Fixed points for the dist_to_F column; defaults to the declared ones.
    #[arg(long)]
    fixed_points: Option<String>,
    #[command(flatten)]
    output: OutArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Mapping source; defaults to the one recorded in the trace manifest.
    #[arg(long)]
    mapping: Option<String>,
    #[arg(long)]
    trace: PathBuf,
    /// Trace manifest; defaults to `<trace>.manifest.json`.
    #[arg(long)]
    trace_manifest: Option<PathBuf>,
    /// Any of fejer, prop-k, lemma3, xst1, demiclosed, strong.
    #[arg(long, value_delimiter = ',', required = true)]
    properties: Vec<Property>,
    #[arg(long)]
    fixed_points: Option<String>,
    /// Tail window for lemma3.
    #[arg(long, default_value_t = 100)]
    window: usize,
    /// Oscillation bound for lemma3.
    #[arg(long, default_value_t = 1e-8)]
    osc_tol: f64,
    /// Values of t for lemma3.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5, 0.75, 1.0])]
    t: Vec<f64>,
    /// Fixed points p and q for lemma3; default to the first fixed point.
    #[arg(long)]
    probe_p: Option<String>,
    #[arg(long)]
    probe_q: Option<String>,
    /// Convex weight t for xst1.
    #[arg(long, default_value_t = 0.5)]
    xst1_t: f64,
    #[arg(long, default_value_t = 10)]
    ell_max: usize,
    /// Check xst1 for every (m, n) instead of n = m only.
    #[arg(long)]
    full_sweep: bool,
    /// Grid for prop-k.
    #[arg(long, default_value_t = 201)]
    grid: usize,
    /// Condition (I) slope for strong: f(r) = k r.
    #[arg(long)]
    condition_i_k: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    dist_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    demiclosed_tol: f64,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    output: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Property {
    Fejer,
    PropK,
    #[value(alias = "auxiliary-limit")]
    Lemma3,
    Xst1,
    Demiclosed,
    Strong,
}

#[derive(Debug, Args)]
struct XiArgs {
    #[arg(long)]
    mapping: String,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long, default_value_t = 21)]
    t_grid: usize,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    output: OutArgs,
}

#[derive(Debug, Args)]
struct ModulusArgs {
    #[arg(long)]
    p: Exponent,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: OutArgs,
}

#[derive(Debug, Subcommand)]
enum GalleryAction {
    List {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    Show {
        id: String,
    },
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    configure_threads();
    let command: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn dispatch(command: Command, argv: Vec<String>) -> Result<i32> {
    match command {
        Command::Classify(a) => cmd_classify(a, argv),
        Command::Iterate(a) => cmd_iterate(a, argv),
        Command::Verify(a) => cmd_verify(a, argv),
        Command::Xi(a) => cmd_xi(a, argv),
        Command::Modulus(a) => cmd_modulus(a, argv),
        Command::Gallery { action } => cmd_gallery(action),
    }
}

/// Loads a mapping; parse errors in files are reported with the offending
/// source line.
fn load(source: &str, p: Option<Exponent>) -> Result<LoadedMapping> {
    let mut loaded = load_mapping(source).map_err(|e| match e {
        Error::Parse { location, token, message } => {
            let text = std::fs::read_to_string(source).unwrap_or_default();
            let line = text.lines().nth(location.line.saturating_sub(1)).unwrap_or("").to_string();
            Error::SourceParse(Box::new(SourceDiagnostic { path: source.to_string(), location, token, message, line }))
        }
        other => other,
    })?;
    if let Some(p) = p {
        loaded.mapping = loaded.mapping.with_norm(p);
    }
    Ok(loaded)
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>> {
    let v = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::input(format!("cannot parse coordinate `{s}`"))))
        .collect::<Result<Vec<f64>>>()?;
    if v.len() != dim {
        return Err(Error::Dimension { expected: dim, got: v.len() });
    }
    Ok(v)
}

fn parse_points(text: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
    text.split(';').filter(|s| !s.trim().is_empty()).map(|s| parse_point(s, dim)).collect()
}

fn fixed_set(arg: &Option<String>, loaded: &LoadedMapping) -> Result<FixedSet> {
    match arg {
        Some(text) => Ok(FixedSet::Points(parse_points(text, loaded.mapping.dim())?)),
        None => Ok(loaded.mapping.declared_fixed_points.clone()),
    }
}

fn manifest_for(argv: Vec<String>, tol: Tolerance, loaded: Option<&LoadedMapping>) -> RunManifest {
    let mut m = RunManifest::new(argv, tol);
    if let Some(l) = loaded {
        m.mapping_source = Some(source_label(l));
        m.mapping_source_hash = Some(l.source_hash.clone());
    }
    m
}

fn source_label(l: &LoadedMapping) -> String {
    if l.source_text.starts_with("gallery:") {
        l.source_text.clone()
    } else {
        l.mapping.name.clone()
    }
}

/// Writes primary output to `--out` (plus sidecar manifest) or stdout.
fn emit(text: &str, output: &OutArgs, manifest: &RunManifest) -> Result<()> {
    match &output.out {
        Some(path) => {
            std::fs::write(path, text)?;
            let sidecar = output.manifest.clone().unwrap_or_else(|| RunManifest::sidecar_path(path));
            manifest.write(&sidecar)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            if let Some(path) = &output.manifest {
                manifest.write(path)?;
            }
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}

fn cmd_classify(a: ClassifyArgs, argv: Vec<String>) -> Result<i32> {
    let tol = a.tol.tolerance()?;
    let loaded = load(&a.mapping, a.p)?;
    let plan = match a.pairs {
        Some(pairs) => {
            let seed = a.seed.ok_or_else(|| Error::input("--seed is required with --pairs"))?;
            PairSamplePlan::random(a.grid, pairs, seed)
        }
        None => PairSamplePlan::exhaustive(a.grid),
    }
    .with_max_witnesses(a.max_witnesses);
    let fixed = fixed_set(&a.fixed_points, &loaded)?;
    let f = a.condition_i_k.map(ConditionIFunction::linear).transpose()?;
    let m = &loaded.mapping;
    let mut reports = classify(m, &plan, tol, Some(&fixed), f.as_ref())?;
    if a.prop_k {
        reports.push(verify_proposition_k(m, &plan, tol)?);
    }

    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({ "mapping": m.name, "norm_p": m.norm.p, "plan": plan, "reports": reports }))?,
        Format::Csv => classify_csv(&reports)?,
    };
    let mut manifest = manifest_for(argv, tol, Some(&loaded));
    manifest.seed = plan.seed;
    manifest.params = json!({ "plan": plan, "norm_p": m.norm.p });
    emit(&text, &a.output, &manifest)?;
    Ok(EXIT_OK)
}

fn classify_csv(reports: &[ConditionReport]) -> Result<String> {
    let rows = reports
        .iter()
        .map(|r| {
            let w = r.witnesses.first();
            vec![
                r.condition.clone(),
                r.verdict.to_string(),
                r.pairs_checked.to_string(),
                r.premise_vacuous_count.to_string(),
                r.failures.to_string(),
                w.map(|w| fmt_vec(&w.x)).unwrap_or_default(),
                w.map(|w| fmt_vec(&w.y)).unwrap_or_default(),
                w.map(|w| w.lhs.to_string()).unwrap_or_default(),
                w.map(|w| w.rhs.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    csv_table(
        &[
            "condition",
            "verdict",
            "pairs_checked",
            "premise_vacuous_count",
            "failures",
            "witness_x",
            "witness_y",
            "witness_lhs",
            "witness_rhs",
        ],
        rows,
    )
}

fn cmd_iterate(a: IterateArgs, argv: Vec<String>) -> Result<i32> {
    let loaded = load(&a.mapping, a.p)?;
    let m = &loaded.mapping;
    let config = IterationConfig {
        alpha: a.alpha,
        x1: parse_point(&a.x1, m.dim())?,
        max_iter: a.max_iter,
        residual_tol: a.tol,
        record_every: a.record_every,
        allow_any_alpha: a.force,
    };
    let trace = run_iteration(m, &config)?;
    let fixed = match fixed_set(&a.fixed_points, &loaded)? {
        FixedSet::Points(ps) => Some(ps),
        _ => None,
    };

    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            trace.write_csv(&mut buf, m.norm, fixed.as_deref())?;
            String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))?
        }
        Format::Json => {
            to_json(&json!({ "config": trace.config, "stop_reason": trace.stop_reason, "rows": trace.rows }))?
        }
    };
    let mut manifest = manifest_for(argv, Tolerance::default(), Some(&loaded));
    manifest.params = json!({
        "config": trace.config,
        "stop_reason": trace.stop_reason,
        "iterations": trace.last().n,
        "norm_p": m.norm.p,
        "fixed_points": fixed,
    });
    emit(&text, &a.output, &manifest)?;
    if a.output.out.is_some() {
        let last = trace.last();
        eprintln!("stopped at n = {} ({}), residual {:e}", last.n, trace.stop_reason.as_str(), last.residual);
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct VerifyEntry {
    property: Property,
    /// Fixed point, probe weight, or other parameter the entry was run with.
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    params: serde_json::Value,
    verdict: Verdict,
    report: serde_json::Value,
}

fn cmd_verify(a: VerifyArgs, argv: Vec<String>) -> Result<i32> {
    let tol = a.tol.tolerance()?;
    let manifest_path = a.trace_manifest.clone().unwrap_or_else(|| RunManifest::sidecar_path(&a.trace));
    let trace_manifest = RunManifest::read(&manifest_path)?;
    let source = match (&a.mapping, &trace_manifest.mapping_source) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(Error::input("trace manifest names no mapping; pass --mapping")),
    };
    let norm_p: Option<Exponent> = serde_json::from_value(trace_manifest.params["norm_p"].clone()).ok();
    let loaded = load(&source, norm_p)?;
    if trace_manifest.mapping_source_hash.as_deref() != Some(loaded.source_hash.as_str()) {
        return Err(Error::input(format!(
            "refusing to verify: trace was produced from a mapping with hash {}, but `{source}` hashes to {}",
            trace_manifest.mapping_source_hash.as_deref().unwrap_or("<none>"),
            loaded.source_hash
        )));
    }
    let config: IterationConfig = serde_json::from_value(trace_manifest.params["config"].clone())
        .map_err(|e| Error::input(format!("trace manifest has no usable iteration config: {e}")))?;
    let stop: StopReason = serde_json::from_value(trace_manifest.params["stop_reason"].clone())
        .map_err(|e| Error::input(format!("trace manifest has no stop reason: {e}")))?;
    let trace = IterationTrace::read_csv(File::open(&a.trace)?, config, stop)?;
    let m = &loaded.mapping;

    let fixed = fixed_set(&a.fixed_points, &loaded)?;
    let fps = || -> Result<Vec<Vec<f64>>> {
        let reps = fixed.representatives(&m.domain, 11);
        if reps.is_empty() {
            return Err(Error::input("this property needs fixed points; pass --fixed-points"));
        }
        Ok(reps)
    };
    let first_fp = || -> Result<Vec<f64>> { Ok(fps()?.swap_remove(0)) };
    let point_or_first = |arg: &Option<String>| -> Result<Vec<f64>> {
        match arg {
            Some(s) => parse_point(s, m.dim()),
            None => first_fp(),
        }
    };

    let mut entries = Vec::new();
    let trace_entry = |property, params, r: PropertyReport| -> Result<VerifyEntry> {
        Ok(VerifyEntry { property, params, verdict: r.verdict, report: serde_json::to_value(r)? })
    };
    for prop in dedup(&a.properties) {
        match prop {
            Property::Fejer => {
                for q in fps()? {
                    let r = check_fejer(m, &trace, &q, tol)?;
                    entries.push(trace_entry(prop, json!({ "q": q }), r)?);
                }
            }
            Property::PropK => {
                let r = verify_proposition_k(m, &PairSamplePlan::exhaustive(a.grid), tol)?;
                entries.push(VerifyEntry {
                    property: prop,
                    params: json!({ "grid": a.grid }),
                    verdict: r.verdict,
                    report: serde_json::to_value(r)?,
                });
            }
            Property::Lemma3 => {
                let p = point_or_first(&a.probe_p)?;
                let q = point_or_first(&a.probe_q)?;
                for &t in &a.t {
                    let probe = AuxiliaryLimitProbe { t, p: p.clone(), q: q.clone() };
                    let r = check_auxiliary_limit(m, &trace, &probe, a.window, a.osc_tol, tol)?;
                    entries.push(trace_entry(prop, json!({ "t": t, "p": p, "q": q }), r)?);
                }
            }
            Property::Xst1 => {
                let p = first_fp()?;
                let sweep = if a.full_sweep { Xst1Sweep::Full } else { Xst1Sweep::Diagonal };
                let r = check_xst1(m, &trace, a.xst1_t, &p, a.ell_max, sweep, tol)?;
                entries.push(trace_entry(prop, json!({ "t": a.xst1_t, "p": p, "ell_max": a.ell_max }), r)?);
            }
            Property::Demiclosed => {
                let r = check_demiclosed(m, &trace, a.demiclosed_tol)?;
                entries.push(trace_entry(prop, json!({ "tol": a.demiclosed_tol }), r)?);
            }
            Property::Strong => {
                let k = a.condition_i_k.ok_or_else(|| Error::input("strong needs --condition-i-k"))?;
                let f = ConditionIFunction::linear(k)?;
                fps()?;
                let r = check_strong_convergence(m, &trace, &fixed, &f, a.dist_tol, tol)?;
                entries.push(trace_entry(prop, json!({ "k": k, "dist_tol": a.dist_tol }), r)?);
            }
        }
    }

    let failed = entries.iter().any(|e| e.verdict == Verdict::Fail);
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "mapping": m.name,
            "trace": a.trace.display().to_string(),
            "results": entries,
        }))?,
        Format::Csv => {
            let rows = entries
                .iter()
                .map(|e| {
                    vec![
                        serde_json::to_string(&e.property).unwrap_or_default().trim_matches('"').to_string(),
                        e.params.to_string(),
                        e.verdict.to_string(),
                    ]
                })
                .collect();
            csv_table(&["property", "params", "verdict"], rows)?
        }
    };
    let mut manifest = manifest_for(argv, tol, Some(&loaded));
    manifest.params = json!({ "trace": a.trace.display().to_string(), "trace_manifest": trace_manifest });
    emit(&text, &a.output, &manifest)?;
    Ok(if failed { EXIT_PROPERTY_FAILED } else { EXIT_OK })
}

fn dedup(props: &[Property]) -> Vec<Property> {
    let mut out: Vec<Property> = Vec::new();
    for p in props {
        if !out.contains(p) {
            out.push(*p);
        }
    }
    out
}

fn cmd_xi(a: XiArgs, argv: Vec<String>) -> Result<i32> {
    let tol = a.tol.tolerance()?;
    let loaded = load(&a.mapping, None)?;
    let est = estimate_xi(&loaded.mapping, a.epsilon, a.t_grid, a.grid, tol)?;
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&est)?,
        Format::Csv => csv_table(
            &["epsilon", "xi_hat", "verdict", "saturated"],
            vec![vec![
                est.epsilon.to_string(),
                est.xi_hat.to_string(),
                est.verdict.to_string(),
                est.saturated.to_string(),
            ]],
        )?,
    };
    let mut manifest = manifest_for(argv, tol, Some(&loaded));
    manifest.params = json!({ "epsilon": a.epsilon, "grid": a.grid, "t_grid": a.t_grid });
    emit(&text, &a.output, &manifest)?;
    Ok(EXIT_OK)
}

fn cmd_modulus(a: ModulusArgs, argv: Vec<String>) -> Result<i32> {
    let space = NormSpec::new(a.p, a.dim)?;
    let est = estimate_modulus(&space, a.epsilon, a.samples, a.seed)?;
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&est)?,
        Format::Csv => csv_table(
            &["p", "dim", "epsilon", "delta_hat", "uniformly_convex"],
            vec![vec![
                a.p.to_string(),
                a.dim.to_string(),
                est.epsilon.to_string(),
                est.delta_hat.to_string(),
                est.uniformly_convex.to_string(),
            ]],
        )?,
    };
    let mut manifest = manifest_for(argv, Tolerance::default(), None);
    manifest.seed = Some(a.seed);
    manifest.params = json!({ "p": a.p, "dim": a.dim, "epsilon": a.epsilon, "samples": a.samples });
    emit(&text, &a.output, &manifest)?;
    Ok(EXIT_OK)
}

fn cmd_gallery(action: GalleryAction) -> Result<i32> {
    let text = match action {
        GalleryAction::List { format } => {
            let entries = gallery::gallery_list();
            match format.unwrap_or(Format::Json) {
                Format::Json => to_json(&entries)?,
                Format::Csv => {
                    let rows = entries
                        .iter()
                        .map(|e| {
                            let k = e.known;
                            vec![
                                e.id.to_string(),
                                e.dim.to_string(),
                                k.nonexpansive.to_string(),
                                k.condition_c.to_string(),
                                k.rsc.to_string(),
                                k.quasi_nonexpansive.to_string(),
                                e.test_only.to_string(),
                                e.summary.to_string(),
                            ]
                        })
                        .collect();
                    csv_table(
                        &[
                            "id",
                            "dim",
                            "nonexpansive",
                            "condition_c",
                            "rsc",
                            "quasi_nonexpansive",
                            "test_only",
                            "summary",
                        ],
                        rows,
                    )?
                }
            }
        }
        GalleryAction::Show { id } => {
            let entry = gallery::lookup(&id).ok_or_else(|| Error::input(format!("unknown gallery id `{id}`")))?;
            let dsl = gallery::build(&id, &[])?.to_dsl();
            to_json(&json!({ "entry": entry, "dsl": dsl }))?
        }
    };
    print!("{text}");
    Ok(EXIT_OK)
}
