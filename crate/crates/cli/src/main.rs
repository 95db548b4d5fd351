use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use diffsys_cli::config::{Format, RunConfig};
use diffsys_cli::dsl::{self, Directive, Job, Script};
use diffsys_cli::run::{self, Report};

#[derive(Parser)]
#[command(name = "diffsys", version, about = "Exact workbench for systems of difference equations")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// TOML file with run settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Window radius for solve, min-supnorm and vanish.
    #[arg(long, global = true)]
    window: Option<u32>,
    /// Polynomial degree bound.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true)]
    max_pairs: Option<usize>,
    #[arg(long, global = true)]
    max_degree: Option<u32>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every directive in a script.
    Run { script: PathBuf },
    /// Decide solvability of a system in a script.
    Solve(SystemArgs),
    /// Least sup norm of a solution on the window.
    MinSupnorm(SystemArgs),
    /// Search for a polynomial solution.
    PolySolve(SystemArgs),
    /// Run the `deduce` directives of a script.
    Deduce { script: PathBuf },
    /// Re-verify a certificate or every certificate in a results file.
    Certify { file: PathBuf },
    /// Run a named construction.
    Gallery(GalleryArgs),
    /// Parse a script and print its normal form.
    Parse {
        script: PathBuf,
        /// Only report whether the script parses.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args)]
struct SystemArgs {
    script: PathBuf,
    /// System to use; defaults to the last one declared.
    #[arg(long)]
    system: Option<String>,
}

#[derive(Args)]
struct GalleryArgs {
    name: String,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    radius: Option<u64>,
}

fn read_input(path: &Path) -> Result<String, String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_script(path: &Path) -> Result<Script, String> {
    let text = read_input(path)?;
    dsl::parse_script(&text).map_err(|d| format!("{}:{d}", path.display()))
}

fn config(opts: &Opts) -> Result<RunConfig, String> {
    let mut cfg = match &opts.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = opts.format {
        cfg.format = v;
    }
    if let Some(v) = opts.window {
        cfg.window_radius = v;
    }
    if let Some(v) = opts.degree {
        cfg.degree_bound = Some(v);
    }
    if let Some(v) = opts.max_pairs {
        cfg.max_pairs = v;
    }
    if let Some(v) = opts.max_degree {
        cfg.max_degree = v;
    }
    if let Some(v) = opts.samples {
        cfg.samples = v;
    }
    if let Some(v) = opts.seed {
        cfg.seed = v;
    }
    if let Some(v) = opts.trials {
        cfg.trials = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report: &Report, cfg: &RunConfig) -> ExitCode {
    match cfg.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    ExitCode::from(report.exit_code() as u8)
}

fn run_jobs(script: &Script, jobs: &[Job], cfg: &RunConfig) -> Result<Report, String> {
    let mut report = Report::default();
    for job in jobs {
        report.push(run::run_job(&script.basis, job, cfg)?);
    }
    Ok(report)
}

fn single(args: &SystemArgs, directive: Directive, cfg: &RunConfig) -> Result<Report, String> {
    let script = load_script(&args.script)?;
    let system = script.system(args.system.as_deref()).ok_or_else(|| match &args.system {
        Some(n) => format!("no system named `{n}`"),
        None => "the script declares no equations".into(),
    })?;
    run_jobs(&script, &[Job { system, directive }], cfg)
}

fn execute(cli: &Cli) -> Result<ExitCode, String> {
    let cfg = config(&cli.opts)?;
    let report = match &cli.cmd {
        Cmd::Run { script } => {
            let s = load_script(script)?;
            run_jobs(&s, &s.jobs(), &cfg)?
        }
        Cmd::Deduce { script } => {
            let s = load_script(script)?;
            let jobs: Vec<Job> =
                s.jobs().into_iter().filter(|j| matches!(j.directive, Directive::Deduce { .. })).collect();
            if jobs.is_empty() {
                return Err("the script has no `deduce` directives".into());
            }
            run_jobs(&s, &jobs, &cfg)?
        }
        Cmd::Solve(a) => single(a, Directive::Solve, &cfg)?,
        Cmd::MinSupnorm(a) => single(a, Directive::MinSupNorm, &cfg)?,
        Cmd::PolySolve(a) => single(a, Directive::PolySolve { degree: None }, &cfg)?,
        Cmd::Gallery(g) => {
            let mut params = Vec::new();
            for (k, v) in [("n", g.n), ("k", g.k), ("radius", g.radius)] {
                if let Some(v) = v {
                    params.push((k.to_string(), v));
                }
            }
            let mut report = Report::default();
            report.push(run::run_gallery(&g.name, &params, &cfg)?);
            report
        }
        Cmd::Certify { file } => {
            let text = read_input(file)?;
            let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", file.display()))?;
            let checked = run::certify(&doc)?;
            match cfg.format {
                Format::Json => {
                    let items: Vec<serde_json::Value> = checked
                        .iter()
                        .map(|(kind, ok, why)| serde_json::json!({ "kind": kind, "valid": ok, "checks": why }))
                        .collect();
                    let doc = serde_json::json!({ "schema": run::SCHEMA, "certificates": items });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("json values serialize"));
                }
                Format::Text => {
                    for (kind, ok, why) in &checked {
                        println!("{kind}: {} ({why})", if *ok { "valid" } else { "INVALID" });
                    }
                }
            }
            return Ok(ExitCode::SUCCESS);
        }
        Cmd::Parse { script, check } => {
            let s = load_script(script)?;
            if *check {
                println!("ok: {} statements, {} systems", s.statements.len(), s.systems().len());
            } else {
                print!("{}", dsl::render_script(&s));
            }
            return Ok(ExitCode::SUCCESS);
        }
    };
    Ok(emit(&report, &cfg))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
