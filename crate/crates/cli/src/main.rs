use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use sgmod::verify::verify_witness;
use sgmod::{Caps, Witness};
use sgmod_cli::fuzz::{self, FuzzConfig};
use sgmod_cli::report::{exit_code, to_json, to_text};
use sgmod_cli::{run_source, CliError, Config, Report};

#[derive(Parser)]
#[command(name = "sgcalc", version, about = "Projective, injective, flat and strongly Gorenstein verdicts over finite rings")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Opts {
    /// Largest Ext^1 group whose classes are enumerated.
    #[arg(long = "caps.ext-classes", env = "SGCALC_CAPS_EXT_CLASSES", global = true)]
    ext_classes: Option<u128>,
    /// Largest ring enumerated element by element.
    #[arg(long = "caps.ring-elements", env = "SGCALC_CAPS_RING_ELEMENTS", global = true)]
    ring_elements: Option<u128>,
    /// Largest Hom group searched for isomorphisms.
    #[arg(long = "caps.hom-maps", env = "SGCALC_CAPS_HOM_MAPS", global = true)]
    hom_maps: Option<u128>,
    /// Longest period tried for complete resolutions.
    #[arg(long = "caps.period", env = "SGCALC_CAPS_PERIOD", global = true)]
    period: Option<usize>,
    /// Resolution depth.
    #[arg(long, env = "SGCALC_DEPTH", global = true)]
    depth: Option<usize>,
    #[arg(long, env = "SGCALC_SEED", global = true)]
    seed: Option<u64>,
    #[arg(long, env = "SGCALC_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, env = "SGCALC_FORMAT", default_value = "json", global = true)]
    format: Format,
    /// Add per-command wall time to reports.
    #[arg(long, env = "SGCALC_TIMING", global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run script files (`-` reads standard input).
    Run { files: Vec<PathBuf> },
    /// Run a script given inline.
    Eval { script: String },
    /// Run the randomized invariant suite.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        gens: usize,
        #[arg(long, default_value_t = 2)]
        rels: usize,
        /// Ring expression; repeat to replace the default catalog.
        #[arg(long = "ring")]
        rings: Vec<String>,
    },
    /// Re-verify every witness in a JSON report file.
    Verify { report: PathBuf },
}

impl Opts {
    fn config(&self) -> Config {
        let mut caps = Caps::default();
        if let Some(v) = self.ext_classes {
            caps.ext_classes = v;
        }
        if let Some(v) = self.ring_elements {
            caps.ring_elements = v;
        }
        if let Some(v) = self.hom_maps {
            caps.hom_maps = v;
        }
        if let Some(v) = self.period {
            caps.period = v;
        }
        if let Some(v) = self.depth {
            caps.depth = v;
        }
        if let Some(v) = self.seed {
            caps.seed = v;
        }
        Config { caps, cache_dir: self.cache_dir.clone(), timing: self.timing }
    }

    fn print(&self, reports: &[Report]) {
        match self.format {
            Format::Json => println!("{}", to_json(reports)),
            Format::Text => print!("{}", to_text(reports)),
        }
    }
}

fn read_source(path: &PathBuf) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn collect_witnesses(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if (k == "witness" || k == "summand") && !x.is_null() {
                    out.push(x.clone());
                } else {
                    collect_witnesses(x, out);
                }
            }
        }
        Value::Array(a) => a.iter().for_each(|x| collect_witnesses(x, out)),
        _ => {}
    }
}

fn verify(path: &PathBuf, caps: &Caps) -> Result<i32, CliError> {
    let text = read_source(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut found = Vec::new();
    collect_witnesses(&v, &mut found);
    let mut rejected = 0;
    for (i, w) in found.iter().enumerate() {
        let verdict = match serde_json::from_value::<Witness>(w.clone()) {
            Ok(w) => verify_witness(&w, caps).map_err(|e| e.to_string()),
            Err(e) => Err(format!("malformed witness: {e}")),
        };
        let kind = w.get("kind").and_then(Value::as_str).unwrap_or("?");
        match verdict {
            Ok(()) => println!("witness {i} ({kind}): verified"),
            Err(e) => {
                rejected += 1;
                println!("witness {i} ({kind}): rejected: {e}");
            }
        }
    }
    println!("{} witnesses, {rejected} rejected", found.len());
    Ok(if rejected > 0 { 1 } else { 0 })
}

fn main_inner(cli: &Cli) -> Result<i32, CliError> {
    let config = cli.opts.config();
    let reports = match &cli.command {
        Cmd::Run { files } => {
            if files.is_empty() {
                return Err(CliError::Input("no script files given".into()));
            }
            let mut all = Vec::new();
            for f in files {
                all.extend(run_source(&read_source(f)?, &config)?);
            }
            all
        }
        Cmd::Eval { script } => run_source(script, &config)?,
        Cmd::Fuzz { count, gens, rels, rings } => {
            let mut fc = FuzzConfig { seed: config.caps.seed, count: *count, max_gens: *gens, max_rels: *rels, ..FuzzConfig::default() };
            if !rings.is_empty() {
                fc.catalog = rings.clone();
            }
            let outcome = fuzz::run(&fc, &config.caps)?;
            let report = Report::new(format!("fuzz seed {} count {count}", fc.seed), outcome.to_body());
            let code = if outcome.failures.is_empty() { 0 } else { 3 };
            cli.opts.print(&[report]);
            for f in &outcome.failures {
                eprintln!("invariant {} failed: {}\n{}", f.invariant, f.detail, f.repro);
            }
            return Ok(code);
        }
        Cmd::Verify { report } => return verify(report, &config.caps),
    };
    cli.opts.print(&reports);
    Ok(exit_code(&reports))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("sgcalc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
