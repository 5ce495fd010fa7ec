//! Command-line front end.

pub mod manifest;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{critical_w_sweep, format_real, verify_table, write_sweep_csv, SweepInequality, SweepSpec};
use crate::behavior::{enumerate_vertices, VertexKind};
use crate::polytope::{bundled_table, load_table, verify_facets, Inequality};
use crate::quantum::{extract_behavior, StateFamily};
use crate::scenario::Scenario;
use crate::seesaw::{run_seesaw, SeesawConfig};
use crate::Error;

pub use manifest::{sha256_file, Manifest, OutputDigest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable naming an inequality table to use instead of the
/// bundled one.
pub const DATA_ENV: &str = "BELLEXT_DATA";

#[derive(Debug, Parser)]
#[command(name = "bellext", version, about = "Bell inequalities with compatible measurements on a four-cycle")]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check local bounds and facet status of every table row, and optionally
    /// the quantum maxima by seesaw.
    VerifyTable(VerifyTableArgs),
    /// Seesaw lower bound on the quantum maximum of one table row.
    MaxViolation(MaxViolationArgs),
    /// Critical w as a function of alpha for a state family.
    Sweep(SweepArgs),
    /// Write the product vertices of the local polytope.
    Vertices(VerticesArgs),
    /// Re-run a command from its manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SeesawArgs {
    /// Random restarts per seesaw run.
    #[arg(long, default_value_t = 500)]
    pub seeds: usize,
    /// Sweep cap per restart.
    #[arg(long, default_value_t = 1000)]
    pub max_sweeps: usize,
    /// Stop a restart once a full sweep gains less than this.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Seed from which every restart's random stream is derived.
    #[arg(long, default_value_t = 0)]
    pub master_seed: u64,
}

impl SeesawArgs {
    fn config(&self, optimize_state: bool) -> SeesawConfig {
        SeesawConfig {
            seeds: self.seeds,
            max_sweeps: self.max_sweeps,
            convergence_tol: self.tol,
            optimize_state,
            master_seed: self.master_seed,
            random_unitary_on_state: true,
            stop_at: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyTableArgs {
    /// Also check seesaw maxima against the table's quantum values.
    #[arg(long)]
    pub quantum: bool,
    /// Inequality table (CSV); overrides $BELLEXT_DATA and the bundled table.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Per-row report as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub seesaw: SeesawArgs,
}

#[derive(Debug, Args)]
pub struct MaxViolationArgs {
    /// Table row, 1 to 26.
    #[arg(long)]
    pub ineq: u32,
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Directory for the model dump and manifest.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub seesaw: SeesawArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// State family: rho or sigma.
    #[arg(long)]
    pub family: StateFamily,
    /// Inequality: a table row number, chsh or i3322.
    #[arg(long)]
    pub ineq: SweepInequality,
    /// Number of equally spaced alpha values in [1/2, 1].
    #[arg(long, default_value_t = 100)]
    pub alpha_grid: usize,
    /// Explicit alpha values (repeatable); replaces the grid.
    #[arg(long)]
    pub alpha: Vec<f64>,
    /// First w tested by the bisection.
    #[arg(long, default_value_t = 0.75)]
    pub w_start: f64,
    /// Bisection steps.
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    /// Output CSV; the manifest is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub seesaw: SeesawArgs,
}

#[derive(Debug, Args)]
pub struct VerticesArgs {
    /// Number of Bob inputs on the compatibility cycle.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // Fails only if a global pool already exists, e.g. in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cmd: Command, argv: &[String]) -> crate::Result<i32> {
    match cmd {
        Command::VerifyTable(a) => cmd_verify_table(&a, argv),
        Command::MaxViolation(a) => cmd_max_violation(&a, argv),
        Command::Sweep(a) => cmd_sweep(&a, argv),
        Command::Vertices(a) => cmd_vertices(&a, argv),
        Command::Replay(a) => cmd_replay(&a),
    }
}

/// `--table`, then `$BELLEXT_DATA`, then the bundled table.
pub fn resolve_table(explicit: Option<&Path>) -> crate::Result<(Vec<Inequality>, String)> {
    let path = explicit.map(Path::to_path_buf).or_else(|| std::env::var_os(DATA_ENV).map(PathBuf::from));
    match path {
        Some(p) => {
            let p = if p.is_dir() { p.join("table1.csv") } else { p };
            let file = File::open(&p).map_err(|e| Error::Table(format!("cannot open {}: {e}", p.display())))?;
            Ok((load_table(file)?, p.display().to_string()))
        }
        None => Ok((bundled_table(), "bundled".into())),
    }
}

fn create(path: &Path) -> crate::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_verify_table(a: &VerifyTableArgs, argv: &[String]) -> crate::Result<i32> {
    let started = Instant::now();
    let (rows, source) = resolve_table(a.table.as_deref())?;
    let cfg = a.seesaw.config(true);
    cfg.validate()?;
    let s = Scenario::square();
    let vs = enumerate_vertices(&s);
    let facets = verify_facets(&rows, &vs);
    let checks = verify_table(&rows, a.quantum.then_some(&cfg))?;

    println!("table: {source}");
    let mut failed = 0;
    for (check, facet) in checks.iter().zip(&facets) {
        let pass = check.pass && facet.is_facet;
        failed += usize::from(!pass);
        let id = check.id.map_or("?".into(), |i| i.to_string());
        let mut line = format!(
            "row {id:>2}: beta_L table {} computed {}, tight {} dim {}",
            check.local_bound_table, check.local_bound_computed, facet.tight_vertices, facet.tight_dimension
        );
        if let (Some(v), Some(q)) = (check.quantum_value, check.quantum_reference) {
            line += &format!(", seesaw {v:.6} vs beta_Q {q} ({:+.5})", v - q);
        }
        println!("{line} {}", if pass { "PASS" } else { "FAIL" });
    }
    println!("{}/{} rows pass", rows.len() - failed, rows.len());

    if let Some(out) = &a.out {
        let mut w = csv::Writer::from_writer(create(out)?);
        w.write_record(["id", "beta_l_table", "beta_l_computed", "is_facet", "beta_q", "seesaw", "pass"])?;
        for (c, f) in checks.iter().zip(&facets) {
            w.write_record([
                c.id.map_or(String::new(), |i| i.to_string()),
                c.local_bound_table.to_string(),
                c.local_bound_computed.to_string(),
                f.is_facet.to_string(),
                c.quantum_reference.map_or(String::new(), format_real),
                c.quantum_value.map_or(String::new(), format_real),
                (c.pass && f.is_facet).to_string(),
            ])?;
        }
        w.flush()?;
        let config = json!({ "quantum": a.quantum, "table": source, "seesaw": cfg });
        Manifest::new("verify-table", argv, config, cfg.master_seed, started, std::slice::from_ref(out))?
            .write(&manifest::manifest_path(out))?;
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_max_violation(a: &MaxViolationArgs, argv: &[String]) -> crate::Result<i32> {
    let started = Instant::now();
    let (rows, source) = resolve_table(a.table.as_deref())?;
    let row = rows
        .iter()
        .find(|r| r.id() == Some(a.ineq))
        .ok_or_else(|| Error::Domain(format!("no inequality {} in the table (1 to {})", a.ineq, rows.len())))?;
    let cfg = a.seesaw.config(true);
    let result = run_seesaw(row, None, &cfg)?;
    let model = result.extended_model()?;
    let behavior = extract_behavior(&model, &Scenario::square())?;

    println!("inequality {}: beta_L {}", a.ineq, row.local_bound());
    if let Some(q) = row.quantum_bound() {
        println!("table beta_Q {}", q.value);
    }
    println!("best value {:.10} (seed {} of {})", result.best_value, result.best_seed, result.seed_values.len());

    std::fs::create_dir_all(&a.out_dir)?;
    let dump_path = a.out_dir.join(format!("max-violation-{}.json", a.ineq));
    let dump = json!({
        "inequality": a.ineq,
        "local_bound": row.local_bound(),
        "best_value": result.best_value,
        "run": result.dump(&cfg),
        "correlators": behavior.values(),
        "model": model.to_record(),
    });
    let mut f = create(&dump_path)?;
    serde_json::to_writer_pretty(&mut f, &dump)?;
    f.write_all(b"\n")?;
    f.flush()?;
    drop(f);
    let config = json!({ "inequality": a.ineq, "table": source, "seesaw": cfg });
    Manifest::new("max-violation", argv, config, cfg.master_seed, started, std::slice::from_ref(&dump_path))?
        .write(&manifest::manifest_path(&dump_path))?;
    println!("wrote {}", dump_path.display());
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs, argv: &[String]) -> crate::Result<i32> {
    let started = Instant::now();
    let mut spec = SweepSpec::new(a.family, a.ineq.clone());
    spec.alpha_grid = a.alpha_grid;
    spec.alphas = (!a.alpha.is_empty()).then(|| a.alpha.clone());
    spec.w_start = a.w_start;
    spec.bisection_steps = a.steps;
    spec.seesaw = a.seesaw.config(false);
    let rows = critical_w_sweep(&spec)?;
    write_sweep_csv(&rows, create(&a.out)?)?;

    let ws = rows.iter().map(|r| r.w_critical);
    let (lo, hi) = ws.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), w| (l.min(w), h.max(w)));
    println!(
        "{} rows, family {}, inequality {}: critical w from {lo:.6} to {hi:.6}",
        rows.len(),
        a.family.name(),
        spec.inequality.label()
    );
    Manifest::new(
        "sweep",
        argv,
        serde_json::to_value(&spec)?,
        spec.seesaw.master_seed,
        started,
        std::slice::from_ref(&a.out),
    )?
    .write(&manifest::manifest_path(&a.out))?;
    println!("wrote {}", a.out.display());
    Ok(EXIT_OK)
}

fn cmd_vertices(a: &VerticesArgs, argv: &[String]) -> crate::Result<i32> {
    let started = Instant::now();
    let s = Scenario::cycle(a.n)?;
    let vs = enumerate_vertices(&s);
    vs.write_csv(create(&a.out)?)?;
    println!(
        "{} product vertices ({} NC + {} contextual Bob, {} Alice)",
        vs.vertices().len(),
        vs.count(VertexKind::BobNoncontextual),
        vs.count(VertexKind::BobContextual),
        vs.alice_points().len()
    );
    Manifest::new("vertices", argv, json!({ "n": a.n }), 0, started, std::slice::from_ref(&a.out))?
        .write(&manifest::manifest_path(&a.out))?;
    println!("wrote {}", a.out.display());
    Ok(EXIT_OK)
}

fn cmd_replay(a: &ReplayArgs) -> crate::Result<i32> {
    let recorded = Manifest::read(&a.manifest)?;
    let mut args = vec!["bellext".to_string()];
    args.extend(recorded.args.iter().cloned());
    let code = run(&args);
    if code != EXIT_OK && code != EXIT_FAIL {
        return Ok(code);
    }
    let mut same = true;
    for out in &recorded.outputs {
        let now = sha256_file(Path::new(&out.path))?;
        let ok = now == out.sha256;
        same &= ok;
        println!("{} {}", out.path, if ok { "identical" } else { "DIFFERS" });
    }
    // The re-run rewrote the manifest; restore the original record.
    recorded.write(&a.manifest)?;
    Ok(if same { EXIT_OK } else { EXIT_FAIL })
}
