//! Command implementations behind the `pochette` binary.
//!
//! Every command builds one JSON value; the text format is rendered from
//! that same value, so both formats carry the same fields.

use std::fs;
use std::ops::RangeInclusive;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pochette::coset_enum::DEFAULT_MAX_COSETS;
use pochette::quotient_search::{DEFAULT_MAX_DEGREE, DEGREE_LIMIT};
use pochette::ribbon::{n_fusion_presentation, random_fusion};
use pochette::surgery::{slope_grid, DEFAULT_TIETZE_STEPS};
use pochette::{
    abelian_invariants, analyze, c_word, cord_triviality, enumerate, parse_fusion, parse_presentation, preset,
    tietze_simplify, AbelianInvariants, Budgets, CordCertificate, CordVerdict, EnumerationResult,
    FinitePresentation, PochetteEmbeddingData, SlopeSpec, SurgeryInvariants, Verdict, Word,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "pochette", version, about = "Invariants of pochette surgery on 2-knot exteriors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the surgery word c_{p,q} over {m, l}.
    #[command(allow_negative_numbers = true)]
    Cword(CwordArgs),
    /// Full invariants and S^4 verdict for one slope.
    Surger(SurgerArgs),
    /// Verdicts over a grid of slopes.
    Sweep(SweepArgs),
    /// Coset enumeration of a subgroup (default: trivial subgroup).
    Enumerate(EnumerateArgs),
    /// Abelian invariants of the first homology.
    Abelianize(AbelianizeArgs),
    /// Length-reducing Tietze simplification.
    Simplify(SimplifyArgs),
    /// Decide whether a cord lies in the trivial double coset.
    Cordcheck(CordcheckArgs),
    /// Emit a seeded random fusion file.
    GenFusion(GenFusionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Append wall time to the report. Off by default so that reports are
    /// reproducible byte for byte.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    #[arg(long, env = "POCHETTE_MAX_COSETS", default_value_t = DEFAULT_MAX_COSETS)]
    pub max_cosets: usize,
    #[arg(long, env = "POCHETTE_TIETZE_STEPS", default_value_t = DEFAULT_TIETZE_STEPS)]
    pub tietze_steps: usize,
    #[arg(long, env = "POCHETTE_MAX_DEGREE", default_value_t = DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
}

impl BudgetArgs {
    fn budgets(&self) -> Result<Budgets> {
        if self.max_degree > DEGREE_LIMIT {
            bail!("--max-degree {} exceeds the supported limit {DEGREE_LIMIT}", self.max_degree);
        }
        Ok(Budgets {
            max_cosets: self.max_cosets,
            tietze_steps: self.tietze_steps,
            max_degree: self.max_degree,
        })
    }

    fn echo(&self) -> String {
        format!(
            "--max-cosets {} --tietze-steps {} --max-degree {}",
            self.max_cosets, self.tietze_steps, self.max_degree
        )
    }
}

/// A presentation file, a fusion file, or a preset name.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Path to a presentation or fusion file, or a preset
    /// (`spun-trefoil`, `one-fusion:<word>:<sign>`).
    pub input: String,
}

#[derive(Debug, Clone, Args)]
pub struct EmbeddingArgs {
    #[command(flatten)]
    pub source: InputArgs,
    /// Meridian word; defaults to the preset's, else the first generator.
    #[arg(long)]
    pub meridian: Option<String>,
    /// Longitude word; required unless the input is a preset.
    #[arg(long)]
    pub longitude: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CwordArgs {
    pub p: i64,
    pub q: i64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SurgerArgs {
    #[command(flatten)]
    pub embedding: EmbeddingArgs,
    /// `p/q` or `p`.
    #[arg(long, allow_hyphen_values = true)]
    pub slope: String,
    /// Mod 2 framing; recorded, does not affect any invariant computed here.
    #[arg(long, default_value_t = 0)]
    pub framing: u8,
    #[command(flatten)]
    pub budgets: BudgetArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub embedding: EmbeddingArgs,
    /// Inclusive range `a..b` (or a single integer).
    #[arg(long, default_value = "1..6", allow_hyphen_values = true)]
    pub p_range: String,
    #[arg(long, default_value = "-6..6", allow_hyphen_values = true)]
    pub q_range: String,
    /// Explicit comma-separated slope list; overrides the ranges.
    #[arg(long, allow_hyphen_values = true)]
    pub slopes: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub framing: u8,
    /// Worker threads; 0 means one per core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub budgets: BudgetArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub source: InputArgs,
    /// Subgroup generator word; repeatable.
    #[arg(long = "subgroup")]
    pub subgroup: Vec<String>,
    #[arg(long, env = "POCHETTE_MAX_COSETS", default_value_t = DEFAULT_MAX_COSETS)]
    pub max_cosets: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AbelianizeArgs {
    #[command(flatten)]
    pub source: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimplifyArgs {
    #[command(flatten)]
    pub source: InputArgs,
    #[arg(long, env = "POCHETTE_TIETZE_STEPS", default_value_t = DEFAULT_TIETZE_STEPS)]
    pub tietze_steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CordcheckArgs {
    #[command(flatten)]
    pub source: InputArgs,
    #[arg(long)]
    pub meridian: Option<String>,
    #[arg(long)]
    pub cord: String,
    #[command(flatten)]
    pub budgets: BudgetArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenFusionArgs {
    /// Number of bands.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum reduced length of each band word.
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Report { value: Value, format: Format },
    /// Verbatim text, for commands whose output is itself an input file.
    Raw(String),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Report { value, format: Format::Json } => {
                let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
                s.push('\n');
                s
            }
            Output::Report { value, format: Format::Text } => render_text(value),
            Output::Raw(s) => s.clone(),
        }
    }

    pub fn value(&self) -> Option<&Value> {
        match self {
            Output::Report { value, .. } => Some(value),
            Output::Raw(_) => None,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Cword(a) => cmd_cword(a),
        Command::Surger(a) => cmd_surger(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Abelianize(a) => cmd_abelianize(a),
        Command::Simplify(a) => cmd_simplify(a),
        Command::Cordcheck(a) => cmd_cordcheck(a),
        Command::GenFusion(a) => cmd_gen_fusion(a),
    }
}

/// A loaded group with whatever peripheral words its source supplies.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub kind: &'static str,
    pub group: FinitePresentation,
    pub meridian: Option<Word>,
    pub longitude: Option<Word>,
}

/// Reads a presentation or fusion file, detecting the format from the first
/// meaningful line, or resolves a preset name.
pub fn load_input(input: &str) -> Result<LoadedInput> {
    let path = Path::new(input);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {input}"))?;
        return load_text(&text).with_context(|| format!("in {input}"));
    }
    match preset(input) {
        Ok(p) => Ok(LoadedInput {
            kind: "preset",
            group: p.knot_group,
            meridian: Some(p.meridian),
            longitude: Some(p.longitude),
        }),
        Err(pochette::RibbonError::UnknownPreset(_)) => Err(anyhow!("`{input}` is neither a readable file nor a preset")),
        Err(e) => Err(e).with_context(|| format!("preset `{input}`")),
    }
}

fn load_text(text: &str) -> Result<LoadedInput> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with("n:") || first.starts_with("band:") {
        let f = parse_fusion(text)?;
        let group = n_fusion_presentation(&f);
        let meridian = Some(Word::power_of(group.alphabet().clone(), 0, 1));
        Ok(LoadedInput {
            kind: "fusion",
            group,
            meridian,
            longitude: None,
        })
    } else {
        Ok(LoadedInput {
            kind: "presentation",
            group: parse_presentation(text)?,
            meridian: None,
            longitude: None,
        })
    }
}

fn parse_in(group: &FinitePresentation, text: &str, what: &str) -> Result<Word> {
    group.word(text).with_context(|| format!("parsing {what} `{text}`"))
}

fn embedding(args: &EmbeddingArgs) -> Result<(LoadedInput, PochetteEmbeddingData)> {
    let loaded = load_input(&args.source.input)?;
    let meridian = match &args.meridian {
        Some(t) => parse_in(&loaded.group, t, "meridian")?,
        None => match &loaded.meridian {
            Some(m) => m.clone(),
            None if loaded.group.num_generators() > 0 => Word::power_of(loaded.group.alphabet().clone(), 0, 1),
            None => bail!("the presentation has no generators"),
        },
    };
    let longitude = match &args.longitude {
        Some(t) => parse_in(&loaded.group, t, "longitude")?,
        None => loaded
            .longitude
            .clone()
            .ok_or_else(|| anyhow!("--longitude is required for {} input", loaded.kind))?,
    };
    let data = PochetteEmbeddingData::new(loaded.group.clone(), meridian, longitude)?;
    Ok((loaded, data))
}

fn embedding_echo(args: &EmbeddingArgs, data: &PochetteEmbeddingData) -> String {
    format!(
        "{} --meridian '{}' --longitude '{}'",
        shell_word(&args.source.input),
        data.meridian(),
        data.longitude()
    )
}

fn shell_word(s: &str) -> String {
    if s.chars().all(|c| c.is_ascii_alphanumeric() || "-_./:".contains(c)) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}

fn output_echo(o: &OutputArgs) -> String {
    let fmt = match o.format {
        Format::Text => "text",
        Format::Json => "json",
    };
    if o.timing {
        format!("--format {fmt} --timing")
    } else {
        format!("--format {fmt}")
    }
}

fn header(command: String) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m
}

fn finish(mut m: Map<String, Value>, output: &OutputArgs, started: Instant) -> Output {
    if output.timing {
        m.insert("wall_time_ms".into(), json!(started.elapsed().as_millis() as u64));
    }
    Output::Report {
        value: Value::Object(m),
        format: output.format,
    }
}

fn presentation_json(p: &FinitePresentation) -> Value {
    serde_json::to_value(p).expect("presentation serializes")
}

fn homology_json(h: &[AbelianInvariants; 5]) -> Value {
    let mut m = Map::new();
    for (i, g) in h.iter().enumerate() {
        m.insert(format!("H{i}"), json!(g.to_string()));
    }
    Value::Object(m)
}

fn verdict_json(v: &Verdict) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), json!(v.name()));
    match v {
        Verdict::NotHomotopySphere { p_plus_q_ell, h1, h2, h3 } => {
            m.insert("p_plus_q_ell".into(), json!(p_plus_q_ell));
            m.insert("H1".into(), json!(h1.to_string()));
            m.insert("H2".into(), json!(h2.to_string()));
            m.insert("H3".into(), json!(h3.to_string()));
        }
        Verdict::NontrivialPi1 { order } => {
            m.insert("order".into(), json!(order));
        }
        Verdict::HomeoS4Certified | Verdict::Unknown => {}
    }
    Value::Object(m)
}

fn surgery_json(inv: &SurgeryInvariants) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("slope".into(), json!(inv.slope.to_string()));
    m.insert("p".into(), json!(inv.slope.p()));
    m.insert("q".into(), json!(inv.slope.q()));
    m.insert("framing".into(), json!(inv.slope.epsilon()));
    m.insert("framing_note".into(), json!("recorded only; the verdict does not depend on it"));
    m.insert("linking".into(), json!(inv.linking));
    m.insert("p_plus_q_ell".into(), json!(inv.p_plus_q_ell));
    m.insert("surgery_relator".into(), json!(inv.surgery_relator.to_string()));
    m.insert("pi1".into(), presentation_json(&inv.pi1));
    m.insert("homology".into(), homology_json(&inv.homology));
    m.insert("pi1_abelianization".into(), json!(inv.pi1_abelianization.to_string()));
    m.insert("verdict".into(), verdict_json(&inv.verdict));
    let runs: Vec<Value> = inv
        .enumeration
        .iter()
        .map(|r| {
            json!({
                "presentation": r.presentation,
                "order": r.order,
                "cosets_defined": r.stats.cosets_defined,
                "collapses": r.stats.collapses,
                "max_live": r.stats.max_live,
            })
        })
        .collect();
    m.insert("enumeration".into(), Value::Array(runs));
    m
}

pub fn cmd_cword(args: &CwordArgs) -> Result<Output> {
    let started = Instant::now();
    let slope = SlopeSpec::new(args.p, args.q, 0)?;
    let word = if slope.p() == 0 {
        "l".to_string()
    } else {
        c_word(&slope)?.to_string()
    };
    let mut m = header(format!("pochette cword {} {} {}", args.p, args.q, output_echo(&args.output)));
    m.insert("p".into(), json!(slope.p()));
    m.insert("q".into(), json!(slope.q()));
    m.insert("word".into(), json!(word));
    Ok(finish(m, &args.output, started))
}

pub fn cmd_surger(args: &SurgerArgs) -> Result<Output> {
    let started = Instant::now();
    let budgets = args.budgets.budgets()?;
    let (loaded, data) = embedding(&args.embedding)?;
    let slope: SlopeSpec = args.slope.parse()?;
    let slope = slope.with_epsilon(args.framing)?;
    let inv = analyze(&data, &slope, &budgets)?;
    let mut m = header(format!(
        "pochette surger {} --slope {} --framing {} {} {}",
        embedding_echo(&args.embedding, &data),
        args.slope,
        args.framing,
        args.budgets.echo(),
        output_echo(&args.output)
    ));
    m.insert(
        "input".into(),
        json!({
            "kind": loaded.kind,
            "knot_group": presentation_json(data.knot_group()),
            "meridian": data.meridian().to_string(),
            "longitude": data.longitude().to_string(),
        }),
    );
    m.extend(surgery_json(&inv));
    Ok(finish(m, &args.output, started))
}

fn parse_range(text: &str) -> Result<RangeInclusive<i64>> {
    let bad = || anyhow!("bad range `{text}`; expected `a..b` or an integer");
    let t = text.trim();
    match t.split_once("..") {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if b.saturating_sub(a) > 10_000 {
                bail!("range `{text}` is too large");
            }
            Ok(a..=b)
        }
        None => {
            let a: i64 = t.parse().map_err(|_| bad())?;
            Ok(a..=a)
        }
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Output> {
    let started = Instant::now();
    let budgets = args.budgets.budgets()?;
    let (_, data) = embedding(&args.embedding)?;
    let (slopes, selection) = match &args.slopes {
        Some(list) => {
            let mut v = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.parse::<SlopeSpec>().and_then(|sl| sl.with_epsilon(args.framing)))
                .collect::<Result<Vec<_>, _>>()?;
            v.sort();
            v.dedup();
            (v, format!("--slopes {list}"))
        }
        None => (
            slope_grid(parse_range(&args.p_range)?, parse_range(&args.q_range)?, args.framing),
            format!("--p-range {} --q-range {}", args.p_range, args.q_range),
        ),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .context("building the worker pool")?;
    // par_iter + collect keeps input order whatever the completion order
    let rows: Vec<SurgeryInvariants> =
        pool.install(|| slopes.par_iter().map(|s| analyze(&data, s, &budgets)).collect::<Result<_, _>>())?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|inv| {
            json!({
                "slope": inv.slope.to_string(),
                "p_plus_q_ell": inv.p_plus_q_ell,
                "H1": inv.homology[1].to_string(),
                "verdict": inv.verdict.name(),
                "order": inv.enumeration.iter().find_map(|r| r.order),
                "cosets_defined": inv.enumeration.iter().map(|r| r.stats.cosets_defined).sum::<usize>(),
            })
        })
        .collect();
    // --jobs is left out of the echo: it cannot change the output
    let mut m = header(format!(
        "pochette sweep {} {selection} --framing {} {} {}",
        embedding_echo(&args.embedding, &data),
        args.framing,
        args.budgets.echo(),
        output_echo(&args.output)
    ));
    m.insert("linking".into(), json!(pochette::linking_number(&data)));
    m.insert("rows".into(), Value::Array(rows));
    Ok(finish(m, &args.output, started))
}

pub fn cmd_enumerate(args: &EnumerateArgs) -> Result<Output> {
    let started = Instant::now();
    let loaded = load_input(&args.source.input)?;
    let subgroup = args
        .subgroup
        .iter()
        .map(|t| parse_in(&loaded.group, t, "subgroup generator"))
        .collect::<Result<Vec<_>>>()?;
    let result = enumerate(&loaded.group, &subgroup, args.max_cosets);
    let subgroup_echo: String = args.subgroup.iter().map(|s| format!(" --subgroup {}", shell_word(s))).collect();
    let mut m = header(format!(
        "pochette enumerate {}{subgroup_echo} --max-cosets {} {}",
        shell_word(&args.source.input),
        args.max_cosets,
        output_echo(&args.output)
    ));
    m.insert("presentation".into(), presentation_json(&loaded.group));
    m.insert(
        "subgroup".into(),
        Value::Array(subgroup.iter().map(|w| json!(w.to_string())).collect()),
    );
    let stats = result.stats();
    let (status, index) = match &result {
        EnumerationResult::Completed { table, .. } => ("completed", Some(table.index())),
        EnumerationResult::Overflow { .. } => ("overflow", None),
    };
    m.insert("status".into(), json!(status));
    m.insert("index".into(), json!(index));
    m.insert("cosets_defined".into(), json!(stats.cosets_defined));
    m.insert("collapses".into(), json!(stats.collapses));
    m.insert("max_live".into(), json!(stats.max_live));
    Ok(finish(m, &args.output, started))
}

pub fn cmd_abelianize(args: &AbelianizeArgs) -> Result<Output> {
    let started = Instant::now();
    let loaded = load_input(&args.source.input)?;
    let inv = abelian_invariants(&loaded.group)?;
    let mut m = header(format!(
        "pochette abelianize {} {}",
        shell_word(&args.source.input),
        output_echo(&args.output)
    ));
    m.insert("presentation".into(), presentation_json(&loaded.group));
    m.insert("abelianization".into(), json!(inv.to_string()));
    m.insert("free_rank".into(), json!(inv.free_rank));
    m.insert("torsion".into(), json!(inv.torsion));
    Ok(finish(m, &args.output, started))
}

pub fn cmd_simplify(args: &SimplifyArgs) -> Result<Output> {
    let started = Instant::now();
    let loaded = load_input(&args.source.input)?;
    let s = tietze_simplify(&loaded.group, args.tietze_steps);
    let mut m = header(format!(
        "pochette simplify {} --tietze-steps {} {}",
        shell_word(&args.source.input),
        args.tietze_steps,
        output_echo(&args.output)
    ));
    m.insert("input".into(), presentation_json(&loaded.group));
    m.insert("simplified".into(), presentation_json(&s.presentation));
    m.insert("input_length".into(), json!(loaded.group.total_length()));
    m.insert("simplified_length".into(), json!(s.presentation.total_length()));
    m.insert("steps".into(), json!(s.steps));
    m.insert("budget_exhausted".into(), json!(s.budget_exhausted));
    Ok(finish(m, &args.output, started))
}

pub fn cmd_cordcheck(args: &CordcheckArgs) -> Result<Output> {
    let started = Instant::now();
    let budgets = args.budgets.budgets()?;
    let loaded = load_input(&args.source.input)?;
    let meridian = match (&args.meridian, &loaded.meridian) {
        (Some(t), _) => parse_in(&loaded.group, t, "meridian")?,
        (None, Some(m)) => m.clone(),
        (None, None) if loaded.group.num_generators() > 0 => Word::power_of(loaded.group.alphabet().clone(), 0, 1),
        (None, None) => bail!("the presentation has no generators"),
    };
    let cord = parse_in(&loaded.group, &args.cord, "cord")?;
    let verdict = cord_triviality(&loaded.group, &meridian, &cord, &budgets);
    let mut m = header(format!(
        "pochette cordcheck {} --meridian '{meridian}' --cord '{cord}' {} {}",
        shell_word(&args.source.input),
        args.budgets.echo(),
        output_echo(&args.output)
    ));
    m.insert("presentation".into(), presentation_json(&loaded.group));
    m.insert("meridian".into(), json!(meridian.to_string()));
    m.insert("cord".into(), json!(cord.to_string()));
    let mut v = Map::new();
    v.insert("name".into(), json!(verdict.name()));
    match &verdict {
        CordVerdict::TrivialCordClass => {}
        CordVerdict::NontrivialCordCertified { certificate } => match certificate {
            CordCertificate::CosetEnumeration => {
                v.insert("certificate".into(), json!("coset_enumeration"));
            }
            CordCertificate::PermutationQuotient { witness, image_noncyclic } => {
                v.insert("certificate".into(), json!("permutation_quotient"));
                v.insert("degree".into(), json!(witness.degree));
                let mut images = Map::new();
                for (g, p) in witness.images.iter().enumerate() {
                    images.insert(loaded.group.alphabet().name(g).to_string(), json!(p.to_string()));
                }
                v.insert("images".into(), Value::Object(images));
                v.insert("image_noncyclic".into(), json!(image_noncyclic));
            }
        },
        CordVerdict::Unknown { reason } => {
            v.insert("reason".into(), json!(reason));
        }
    }
    m.insert("verdict".into(), Value::Object(v));
    Ok(finish(m, &args.output, started))
}

pub fn cmd_gen_fusion(args: &GenFusionArgs) -> Result<Output> {
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let f = random_fusion(args.n, args.max_len, &mut rng);
    Ok(Output::Raw(format!(
        "# pochette gen-fusion --n {} --seed {} --max-len {}\n{}",
        args.n,
        args.seed,
        args.max_len,
        f.to_text()
    )))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.is_empty() => "(none)".into(),
        Value::Array(items) => items.iter().map(scalar_text).collect::<Vec<_>>().join("; "),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|i| !matches!(i, Value::Object(_) | Value::Array(_))),
        _ => true,
    }
}

/// `key: value` lines, nested objects as dotted keys, and arrays of flat
/// objects as aligned tables.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render_into(v, "", &mut out);
    out
}

fn render_into(v: &Value, prefix: &str, out: &mut String) {
    let Value::Object(m) = v else {
        out.push_str(&format!("{prefix}: {}\n", scalar_text(v)));
        return;
    };
    for (k, val) in m {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match val {
            _ if is_scalar(val) => out.push_str(&format!("{key}: {}\n", scalar_text(val))),
            Value::Object(_) => render_into(val, &key, out),
            Value::Array(items) => {
                let flat = items
                    .iter()
                    .all(|i| matches!(i, Value::Object(o) if o.values().all(is_scalar)));
                if flat {
                    out.push_str(&format!("{key}:\n"));
                    out.push_str(&table(items));
                } else {
                    for (i, item) in items.iter().enumerate() {
                        render_into(item, &format!("{key}[{i}]"), out);
                    }
                }
            }
            _ => unreachable!("scalars handled above"),
        }
    }
}

fn table(items: &[Value]) -> String {
    let Some(Value::Object(first)) = items.first() else {
        return String::new();
    };
    let headers: Vec<&String> = first.keys().collect();
    let cells: Vec<Vec<String>> = items
        .iter()
        .map(|i| headers.iter().map(|h| scalar_text(&i[h.as_str()])).collect())
        .collect();
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(c, h)| cells.iter().map(|r| r[c].len()).chain([h.len()]).max().unwrap_or(0))
        .collect();
    let line = |row: Vec<&str>| {
        let padded: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        format!("  {}\n", padded.join("  ").trim_end())
    };
    let mut s = line(headers.iter().map(|h| h.as_str()).collect());
    for r in &cells {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}
