//! `gorext`: Ext, Gorenstein tests and topological complexity bounds for
//! Sullivan and Adams–Hilton models.

mod cache;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gorext::algebra::{Flavor, Presentation};
use gorext::ext::{ext_algebra_table, fd_guess, ExtError, ExtOptions, Window};
use gorext::field::FieldSpec;
use gorext::models;
use gorext::parse::{parse_model, print_model};
use gorext::report::{self, Format};
use gorext::resolution::AcyclicClosure;
use gorext::tcinv::invariants;

use cache::{Cache, Lookup};

#[derive(Parser)]
#[command(name = "gorext", version, about = "Exact Eilenberg-Moore Ext of free graded algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model: d² = 0, minimality, acyclicity of its closure.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Ext groups with stability flags, evaluation map, Gorenstein verdict
    /// and formal dimension; products for Sullivan models.
    Ext {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        compute: ComputeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Zero-divisor cup length and topological complexity bounds.
    Invariants {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        compute: ComputeArgs,
        /// Number of tensor factors.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
        /// Largest ideal power examined.
        #[arg(long, default_value_t = 8)]
        m_max: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Inspect or purge the result cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
    /// Built-in model recipes.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    Info {
        #[arg(long, env = "GOREXT_CACHE_DIR")]
        cache_dir: PathBuf,
    },
    Purge {
        #[arg(long, env = "GOREXT_CACHE_DIR")]
        cache_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum ModelsAction {
    /// Names, parameters and a one-line description of each recipe
    List,
    /// Print a built-in in the model language, e.g. `emit two_cell 2,3`.
    Emit {
        name: String,
        params: Option<String>,
        #[arg(long)]
        field: Option<String>,
    },
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Model file in the model language.
    #[arg(conflicts_with = "builtin", required_unless_present = "builtin")]
    file: Option<PathBuf>,
    /// Built-in model as `name:params`, see `models list`.
    #[arg(long)]
    builtin: Option<String>,
    /// Ground field (`Q`, `F3`, ...); overrides the model's own.
    #[arg(long)]
    field: Option<String>,
}

#[derive(Args, Clone)]
struct ComputeArgs {
    /// Degree window `lo..hi`, cohomological.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Filtration weight beyond the target range (Sullivan models).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    margin: Option<u32>,
    /// Bound `B` such that Ext is known to vanish outside `[−B, B]`.
    #[arg(long)]
    fd_bound: Option<i32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long, env = "GOREXT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
}

/// Failure with its exit code.
enum Failure {
    Usage(String),
    Compute(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Compute(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Compute(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<ExtError> for Failure {
    fn from(e: ExtError) -> Self {
        match e {
            ExtError::InvariantViolation(_) => Failure::Invariant(e.to_string()),
            ExtError::Resolution(gorext::resolution::ResolutionError::NotTriangular(_)) => Failure::Invariant(e.to_string()),
            ExtError::TensorProducts | ExtError::EmptyWindow { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn parse_field(s: &str) -> Result<FieldSpec, Failure> {
    FieldSpec::parse(s).map_err(|e| Failure::Usage(format!("--field: {e}")))
}

/// Replaces any `field` statement by the override.
fn override_field(src: &str, field: &str) -> String {
    let mut out = format!("field {field}\n");
    for line in src.lines() {
        if line.trim_start().starts_with("field") && line.trim_start()[5..].starts_with(char::is_whitespace) {
            // Keep line numbering stable for diagnostics.
            out.push_str("# field overridden\n");
        } else {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

fn load_model(m: &ModelArgs) -> Result<Presentation, Failure> {
    if let Some(spec) = &m.builtin {
        let field = m.field.as_deref().map(parse_field).transpose()?.unwrap_or(FieldSpec::Rationals);
        return models::builtin(spec, field).map_err(|e| Failure::Usage(e.to_string()));
    }
    let path = m.file.as_ref().expect("clap requires a file or --builtin");
    let src = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let (src, shift) = match &m.field {
        Some(f) => {
            parse_field(f)?;
            (override_field(&src, f), 1)
        }
        None => (src, 0),
    };
    parse_model(&src).map_err(|e| {
        Failure::Usage(format!("{}: line {}, column {}: {}", path.display(), e.line.saturating_sub(shift), e.col, e.message))
    })
}

fn window_of(arg: &Option<String>, pres: &Presentation) -> Result<Window, Failure> {
    match arg {
        None => Ok(Window::default_for(pres)),
        Some(s) => Window::parse(s).ok_or_else(|| Failure::Usage(format!("--window: expected `lo..hi` with lo ≤ hi, got `{s}`"))),
    }
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Table => Format::Table,
    }
}

fn format_name(f: FormatArg) -> &'static str {
    match f {
        FormatArg::Json => "json",
        FormatArg::Csv => "csv",
        FormatArg::Table => "table",
    }
}

fn render(value: &serde_json::Value, rows: (Vec<String>, Vec<Vec<String>>), format: Format) -> String {
    match format {
        Format::Json => report::to_json_string(value),
        Format::Csv => report::csv(&rows.0, &rows.1),
        Format::Table => report::table(&rows.0, &rows.1),
    }
}

/// Serves from the cache when possible; otherwise computes and stores.
fn cached(
    out: &OutputArgs,
    parts: &[&str],
    compute: impl FnOnce() -> Result<String, Failure>,
) -> Result<String, Failure> {
    let cache = match (&out.cache_dir, out.no_cache) {
        (Some(d), false) => Some(Cache::new(d)),
        _ => None,
    };
    let Some(cache) = cache else { return compute() };
    let key = cache::key(parts);
    match cache.get(&key) {
        Lookup::Hit(bytes) => {
            if let Ok(s) = String::from_utf8(bytes) {
                eprintln!("note: served from cache {}", cache.dir().display());
                return Ok(s);
            }
            eprintln!("warning: cache entry {key} is not UTF-8; recomputing");
        }
        Lookup::Corrupt(why) => eprintln!("warning: ignoring corrupt cache entry {key} ({why}); recomputing"),
        Lookup::Miss => {}
    }
    let s = compute()?;
    if let Err(e) = cache.put(&key, s.as_bytes()) {
        eprintln!("warning: could not write cache entry: {e}");
    }
    Ok(s)
}

fn cmd_check(model: &ModelArgs, out: &OutputArgs) -> Result<String, Failure> {
    let pres = load_model(model)?;
    let text = print_model(&pres);
    cached(out, &["check", &text, &pres.field().name(), format_name(out.format), env!("CARGO_PKG_VERSION")], || {
        // Acyclicity in natural degrees 0..=hi.
        let hi = fd_guess(&pres).clamp(2, 8);
        let closure = AcyclicClosure::build(Arc::new(pres.clone())).map_err(|e| Failure::Compute(e.to_string()))?;
        let acyclic = closure.verify_acyclic(0, hi).map_err(|e| Failure::Invariant(e.to_string()))?;
        if let Err(c) = &acyclic {
            return Err(Failure::Invariant(format!(
                "closure is not acyclic: homology of dimension {} in degree {}",
                c.dimension, c.degree
            )));
        }
        let v = report::check_json(&pres, Some((Window { lo: 0, hi }, acyclic)));
        let rows = vec![
            vec!["valid".to_string(), v["valid"].to_string()],
            vec!["minimal".to_string(), v["minimal"].to_string()],
            vec!["linear_part".to_string(), v["linear_part"].as_str().unwrap_or("").to_string()],
            vec!["closure_acyclic".to_string(), v["closure"]["acyclic"].to_string()],
        ];
        Ok(render(&v, (vec!["check".into(), "value".into()], rows), format_of(out.format)))
    })
}

fn ext_options(pres: &Presentation, c: &ComputeArgs) -> Result<(ExtOptions, Window), Failure> {
    let requested = window_of(&c.window, pres)?;
    let b = c.fd_bound.unwrap_or_else(|| fd_guess(pres));
    // The Gorenstein certificate needs `[−B, B]`; widen so it can be decided.
    let window = requested.hull(Window { lo: -b.abs(), hi: b.abs() });
    let mut o = ExtOptions::new(window);
    o.margin = c.margin;
    o.fd_bound = c.fd_bound;
    Ok((o, requested))
}

fn compute_key<'a>(cmd: &'a str, text: &'a str, field: &'a str, c: &'a [String]) -> Vec<&'a str> {
    let mut v = vec![cmd, text, field];
    v.extend(c.iter().map(String::as_str));
    v.push(env!("CARGO_PKG_VERSION"));
    v
}

fn cmd_ext(model: &ModelArgs, c: &ComputeArgs, out: &OutputArgs) -> Result<String, Failure> {
    let pres = Arc::new(load_model(model)?);
    let (opts, requested) = ext_options(&pres, c)?;
    let text = print_model(&pres);
    let params = vec![
        requested.to_string(),
        opts.window.to_string(),
        format!("{:?}", c.margin),
        format!("{:?}", c.fd_bound),
        format_name(out.format).to_string(),
    ];
    let field = pres.field().name();
    cached(out, &compute_key("ext", &text, &field, &params), || {
        let e = ext_algebra_table(pres.clone(), &opts)?;
        if let Some(t) = &e.products {
            if !t.associativity.passed() || !t.commutativity.passed() {
                eprintln!("warning: product axiom check failed; see the `products.axioms` section");
            }
        }
        Ok(render(&report::ext_json(&e, requested), report::ext_rows(&e), format_of(out.format)))
    })
}

fn cmd_invariants(model: &ModelArgs, c: &ComputeArgs, n: u32, m_max: u32, out: &OutputArgs) -> Result<String, Failure> {
    let pres = Arc::new(load_model(model)?);
    if pres.flavor() != Flavor::Commutative {
        return Err(ExtError::TensorProducts.into());
    }
    let (opts, _) = ext_options(&pres, c)?;
    let text = print_model(&pres);
    let params = vec![
        opts.window.to_string(),
        format!("{:?}", c.margin),
        format!("{:?}", c.fd_bound),
        n.to_string(),
        m_max.to_string(),
        format_name(out.format).to_string(),
    ];
    let field = pres.field().name();
    cached(out, &compute_key("invariants", &text, &field, &params), || {
        let e = ext_algebra_table(pres.clone(), &opts)?;
        let s = invariants(pres.clone(), &e, n as usize, m_max, opts.window)?;
        if !s.chain.holds() {
            return Err(Failure::Invariant(format!("inequality chain fails: {:?}", s.chain)));
        }
        Ok(render(&report::invariants_json(&pres, &s, opts.window), report::invariant_rows(&s), format_of(out.format)))
    })
}

fn cmd_cache(action: &CacheAction) -> Result<String, Failure> {
    let io = |e: std::io::Error| Failure::Compute(format!("cache: {e}"));
    match action {
        CacheAction::Info { cache_dir } => {
            let (n, bytes) = Cache::new(cache_dir).stats().map_err(io)?;
            Ok(format!("{}: {n} entries, {bytes} bytes\n", cache_dir.display()))
        }
        CacheAction::Purge { cache_dir } => {
            let n = Cache::new(cache_dir).purge().map_err(io)?;
            Ok(format!("removed {n} entries from {}\n", cache_dir.display()))
        }
    }
}

fn cmd_models(action: &ModelsAction) -> Result<String, Failure> {
    match action {
        ModelsAction::List => {
            let items = models::list();
            let w = items.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
            Ok(items.iter().map(|(n, d)| format!("{n:<w$}  {d}\n")).collect())
        }
        ModelsAction::Emit { name, params, field } => {
            let spec = match params {
                Some(p) => format!("{name}:{p}"),
                None => name.clone(),
            };
            let field = field.as_deref().map(parse_field).transpose()?.unwrap_or(FieldSpec::Rationals);
            let p = models::builtin(&spec, field).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(print_model(&p))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Check { model, out } => cmd_check(model, out),
        Command::Ext { model, compute, out } => cmd_ext(model, compute, out),
        Command::Invariants { model, compute, n, m_max, out } => cmd_invariants(model, compute, *n, *m_max, out),
        Command::Cache { action } => cmd_cache(action),
        Command::Models { action } => cmd_models(action),
    };
    match result {
        Ok(s) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(s.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
