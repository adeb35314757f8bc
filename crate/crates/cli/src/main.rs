mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlaffine::figures::{self, FigureName};
use nlaffine::io::{fmt_num, write_table};
use nlaffine::params::{self, CornerParams};
use nlaffine::pdesolver::{self, Discounting};
use nlaffine::pricing::{self, MethodUsed, PricingResult};
use nlaffine::riccati::{self, RiccatiMode};
use nlaffine::{Error, Result};

use config::{Format, RiccatiKind, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "nlaffine", version, about = "Upper and lower prices under parameter uncertainty in affine short-rate models")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; data goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Monte Carlo seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Accept a box outside the uniqueness regimes.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a parameter box and print its admissibility report.
    Validate,
    /// Upper and lower prices of the configured payoff.
    Price,
    /// Upper and lower zero-coupon bond prices over `maturities`.
    BondCurve,
    /// Model risk `upper - lower` per starting point.
    ModelRisk,
    /// Reproduce a built-in figure dataset.
    Figure {
        /// fig1, fig2, fig3-call or fig3-butterfly
        name: String,
    },
    /// Solve the Riccati system for the `riccati` section of the config.
    Riccati,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Rejected(_) => 1,
        Error::Config(_) | Error::InvalidInterval(_) | Error::Domain(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 2,
        Error::Regime(_) => 3,
        Error::Numerical(_)
        | Error::BlowUp { .. }
        | Error::CflViolation { .. }
        | Error::PolicyDivergence { .. }
        | Error::OutOfGrid { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("NLAFFINE_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("NLAFFINE_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot configure thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None if matches!(cli.command, Command::Figure { .. }) => RunConfig::default(),
        None => return Err(Error::Config("--config is required".into())),
    };
    let out = Output::new(cli, &cfg);
    match &cli.command {
        Command::Validate => validate(cli, &cfg),
        Command::Price => price(cli, &cfg, &out),
        Command::BondCurve => bond_curve(cli, &cfg, &out),
        Command::ModelRisk => model_risk(cli, &cfg, &out),
        Command::Figure { name } => figure(cli, &cfg, name.parse()?, &out),
        Command::Riccati => riccati_cmd(&cfg, &out),
    }
}

/// Where data goes. Summary lines go to stdout when data goes to a file, to stderr otherwise.
struct Output {
    path: Option<PathBuf>,
    format: Option<Format>,
}

impl Output {
    fn new(cli: &Cli, cfg: &RunConfig) -> Self {
        Self { path: cli.out.clone().or_else(|| cfg.output.path.clone()), format: cli.format.or(cfg.output.format) }
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn write(&self, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match &self.path {
            Some(p) => {
                let mut w = BufWriter::new(create(p)?);
                f(&mut w)?;
                w.flush()?;
                Ok(())
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                f(&mut lock)?;
                lock.flush()?;
                Ok(())
            }
        }
    }

    fn summary(&self, line: &str) {
        if self.path.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}

fn create(p: &Path) -> Result<File> {
    File::create(p).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))
}

fn write_json<T: serde::Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn load_model(cli: &Cli, cfg: &RunConfig) -> Result<params::ModelSpec> {
    let (model, warnings) = cfg.require_model()?.model(cli.force)?;
    warn_all(&warnings);
    if model.is_forced() {
        eprintln!("warning: model forced outside the uniqueness regimes");
    }
    Ok(model)
}

fn validate(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let m = cfg.require_model()?;
    let (pbox, warnings) = m.checked_box()?;
    warn_all(&warnings);
    let report = params::assess(&pbox, m.domain);
    if report.accepted() {
        println!("{report}");
        return Ok(());
    }
    if m.force || cli.force {
        let forced = params::ModelSpec::with_force(pbox, m.domain, true)?;
        println!("{}", forced.admissibility);
        return Ok(());
    }
    Err(Error::Rejected(report))
}

fn method_name(m: MethodUsed) -> &'static str {
    match m {
        MethodUsed::Riccati => "Riccati",
        MethodUsed::Pde => "PDE",
        MethodUsed::Mc => "MC",
    }
}

/// Row `x0, upper, lower, model_risk` plus the methods as text columns.
fn write_results_csv(w: &mut dyn Write, results: &[PricingResult]) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(["x0", "upper", "lower", "model_risk", "method_upper", "method_lower"])?;
    for r in results {
        wr.write_record([
            fmt_num(r.x0),
            fmt_num(r.upper),
            fmt_num(r.lower),
            fmt_num(r.model_risk),
            method_name(r.method_upper).to_owned(),
            method_name(r.method_lower).to_owned(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

fn csv_writer(w: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::Writer::from_writer(w)
}

fn curve_summary(results: &[PricingResult]) -> String {
    match results {
        [r] => r.summary_line(),
        _ => {
            let worst = results
                .iter()
                .max_by(|a, b| a.model_risk.total_cmp(&b.model_risk))
                .expect("non-empty curve");
            format!("x0={} {}", fmt_num(worst.x0), worst.summary_line())
        }
    }
}

fn priced_curve(cli: &Cli, cfg: &RunConfig) -> Result<Vec<PricingResult>> {
    let model = load_model(cli, cfg)?;
    let payoff = cfg.require_payoff()?;
    let xs = cfg.starting_points()?;
    let horizon = cfg.horizon()?;
    let opts = cfg.pricing_options(cli.seed);
    let results = pricing::price_curve(&model, payoff, &xs, horizon, cfg.method, &opts)?;
    let mut seen = std::collections::BTreeSet::new();
    for w in results.iter().flat_map(|r| &r.diagnostics.warnings) {
        if seen.insert(w.clone()) {
            eprintln!("warning: {w}");
        }
    }
    if let Some(path) = &cfg.output.surface {
        if results[0].method_upper != MethodUsed::Pde {
            return Err(Error::Config("a value surface is only available from the PDE method".into()));
        }
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let grid = pdesolver::auto_grid(&model, lo, hi, horizon, &opts.grid)?;
        let (up, _) = pricing::solve_pair(&model, payoff, &grid, Discounting::None, &opts)?;
        let mut w = BufWriter::new(create(path)?);
        up.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(results)
}

fn price(cli: &Cli, cfg: &RunConfig, out: &Output) -> Result<()> {
    let results = priced_curve(cli, cfg)?;
    out.write(|w| match out.format_or(Format::Json) {
        Format::Json if results.len() == 1 => write_json(w, &results[0]),
        Format::Json => write_json(w, &results),
        Format::Csv => write_results_csv(w, &results),
    })?;
    out.summary(&curve_summary(&results));
    Ok(())
}

fn model_risk(cli: &Cli, cfg: &RunConfig, out: &Output) -> Result<()> {
    let results = priced_curve(cli, cfg)?;
    out.write(|w| match out.format_or(Format::Csv) {
        Format::Json => write_json(w, &results),
        Format::Csv => write_results_csv(w, &results),
    })?;
    out.summary(&curve_summary(&results));
    Ok(())
}

fn bond_curve(cli: &Cli, cfg: &RunConfig, out: &Output) -> Result<()> {
    let model = load_model(cli, cfg)?;
    let x0 = cfg.x0.ok_or_else(|| Error::Config("bond-curve needs `x0`".into()))?;
    let maturities = cfg
        .maturities
        .as_deref()
        .filter(|m| !m.is_empty())
        .ok_or_else(|| Error::Config("bond-curve needs a non-empty `maturities` list".into()))?;
    let opts = cfg.pricing_options(cli.seed);
    let points = pricing::bond_curve(&model, x0, maturities, cfg.method, &opts)?;
    out.write(|w| match out.format_or(Format::Csv) {
        Format::Json => write_json(w, &points),
        Format::Csv => {
            let mut wr = csv_writer(w);
            wr.write_record(["maturity", "p_upper", "p_lower", "method"])?;
            for p in &points {
                wr.write_record([fmt_num(p.maturity), fmt_num(p.p_upper), fmt_num(p.p_lower), method_name(p.method).to_owned()])?;
            }
            wr.flush()?;
            Ok(())
        }
    })?;
    let last = points.last().expect("non-empty maturities");
    out.summary(&format!(
        "maturity={} upper={} lower={} mu={}",
        fmt_num(last.maturity),
        fmt_num(last.p_upper),
        fmt_num(last.p_lower),
        fmt_num(last.p_upper - last.p_lower)
    ));
    Ok(())
}

fn figure(cli: &Cli, cfg: &RunConfig, name: FigureName, out: &Output) -> Result<()> {
    let opts = cfg.pricing_options(cli.seed);
    let data = figures::generate(name, &opts)?;
    out.write(|w| match out.format_or(Format::Csv) {
        Format::Json => write_json(w, &data),
        Format::Csv => data.write_csv(w),
    })?;
    if let Some(path) = &out.path {
        let mut meta = path.clone().into_os_string();
        meta.push(".meta.json");
        let mut w = BufWriter::new(create(Path::new(&meta))?);
        write_json(&mut w, &serde_json::json!({ "name": data.name, "columns": data.columns, "metadata": data.metadata }))?;
        w.flush()?;
    }
    let upper = data.column("upper").unwrap_or_default();
    let lower = data.column("lower").unwrap_or_default();
    let mu = upper.iter().zip(&lower).map(|(u, l)| u - l).fold(0.0, f64::max);
    out.summary(&format!("{name}: {} rows, max mu={}", data.rows.len(), fmt_num(mu)));
    Ok(())
}

fn riccati_cmd(cfg: &RunConfig, out: &Output) -> Result<()> {
    let r = cfg.riccati.ok_or_else(|| Error::Config("config has no `riccati` section".into()))?;
    let corner = CornerParams::new(r.b0, r.b1, r.a0, r.a1);
    let mode = match r.mode {
        RiccatiKind::Mgf => RiccatiMode::Mgf,
        RiccatiKind::Bond => RiccatiMode::Bond,
    };
    let steps = r.steps.unwrap_or_else(|| riccati::default_steps(r.horizon));
    let sol = riccati::solve_riccati(&corner, r.u, r.horizon, steps, mode)?;
    out.write(|w| match out.format_or(Format::Csv) {
        Format::Json => write_json(w, &sol),
        Format::Csv => {
            let rows: Vec<Vec<f64>> = (0..sol.t_grid.len()).map(|i| vec![sol.t_grid[i], sol.phi[i], sol.psi[i]]).collect();
            write_table(w, &["t", "phi", "psi"], &rows)
        }
    })?;
    out.summary(&format!("phi={} psi={}", fmt_num(sol.phi_end()), fmt_num(sol.psi_end())));
    Ok(())
}
