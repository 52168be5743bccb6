use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lookback_core::adjuster::{sla_integral, spine_to_measure, MeasureView};
use lookback_core::io::{self as codec, format_num, AuditRow, OracleDoc, PayoffSpec, PriceReport};
use lookback_core::oracle::{oracle_report, supermartingale_check};
use lookback_core::pricing::{log_grid, price_general, price_simple, solve_majorant_bruteforce, Diagnostics, GridConfig};
use lookback_core::{run_path, Adjuster, AdjusterStrategy, Error, PriceResult, Result, WalkSpec};

#[derive(Parser)]
#[command(name = "lookback", version, about = "Price and hedge adjusted lookback options without probability")]
struct Cli {
    /// Master seed for simulations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Knots of the coarse pricing grid.
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    /// Relative tolerance on the grid residual.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Spine,
    Tail,
    Asla,
    Ala,
    Measure,
    SlaIntegral,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Closed form for payoffs of the maximum, grid solver otherwise.
    Auto,
    Simple,
    General,
    Bruteforce,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an adjuster in another representation.
    Transform {
        #[arg(long)]
        adjuster: PathBuf,
        #[arg(long, value_enum)]
        to: Form,
        /// Running maximum (or `y` for the ASLA); without it a table is printed.
        #[arg(long)]
        at: Option<f64>,
        /// Current price for `--to ala`; defaults to `--at`.
        #[arg(long)]
        x: Option<f64>,
        /// Atoms used to discretize continuous families for `--to measure`.
        #[arg(long, default_value_t = 256)]
        atoms: usize,
    },
    /// Replay an adjuster's strategy along a price path and print the audit CSV.
    Hedge {
        #[arg(long)]
        adjuster: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        capital: f64,
    },
    /// Upper price of a lookback payoff.
    Price {
        #[arg(long)]
        payoff: PathBuf,
        #[arg(long)]
        x0: f64,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Decades spanned by the pricing grid.
        #[arg(long, default_value_t = 6.0)]
        decades: f64,
    },
    /// Expectation of an ASLA under the random-walk maximum law.
    Oracle {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Adjuster file, instead of `--family`.
        #[arg(long)]
        adjuster: Option<PathBuf>,
        #[arg(long = "N", alias = "n")]
        n: u64,
        /// Level cap in steps; defaults to 10⁴·N.
        #[arg(long = "M", alias = "m")]
        m: Option<u64>,
        /// Also simulate this many capital paths and check the mean.
        #[arg(long)]
        simulate: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
    },
    /// Calibrate an evidence stream.
    Calibrate {
        #[arg(long)]
        adjuster: PathBuf,
        /// Fraction of capital kept as a multiple of the stream.
        #[arg(long, default_value_t = 0.0)]
        cash: f64,
        #[arg(long)]
        stream: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_adjuster(path: &Path) -> Result<Adjuster<f64>> {
    codec::parse_adjuster(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn table(out: &mut impl Write, f: impl Fn(f64) -> f64) -> Result<()> {
    writeln!(out, "x,value")?;
    for k in 0..=32 {
        let x = 10f64.powf(k as f64 / 8.0);
        writeln!(out, "{},{}", format_num(x), format_num(f(x)))?;
    }
    Ok(())
}

fn transform(out: &mut impl Write, a: &Adjuster<f64>, to: Form, at: Option<f64>, x: Option<f64>, atoms: usize) -> Result<()> {
    let check = |v: f64| {
        if v >= 1.0 {
            Ok(v)
        } else {
            Err(Error::Domain(format!("--at must be >= 1, got {v}")))
        }
    };
    match to {
        Form::Spine | Form::Tail | Form::Asla => {
            let spine = a.spine();
            let asla = a.asla();
            let f = |v: f64| match to {
                Form::Spine => spine.value(v),
                Form::Tail => a.tail(v),
                _ => asla.eval(v),
            };
            match at {
                Some(v) => writeln!(out, "{}", format_num(f(check(v)?)))?,
                None => table(out, f)?,
            }
        }
        Form::Ala => {
            let x_star = check(at.ok_or_else(|| Error::Domain("--to ala needs --at".into()))?)?;
            writeln!(out, "{}", format_num(a.ala().eval(x_star, x.unwrap_or(x_star))?))?;
        }
        Form::Measure => {
            let m = if a.is_discrete() {
                match spine_to_measure(&a.spine())? {
                    MeasureView::Discrete(m) => m,
                    MeasureView::Tail(_) => a.measure(atoms)?,
                }
            } else {
                a.measure(atoms)?
            };
            writeln!(out, "location,mass")?;
            for atom in m.atoms() {
                writeln!(out, "{},{}", format_num(atom.location), format_num(atom.mass))?;
            }
            writeln!(out, "inf,{}", format_num(m.mass_infinity()))?;
        }
        Form::SlaIntegral => writeln!(out, "{}", format_num(sla_integral(&a.asla())))?,
    }
    Ok(())
}

fn price(payoff: &PayoffSpec, x0: f64, mode: Mode, cfg: &GridConfig) -> Result<PriceResult> {
    match (mode, payoff) {
        (Mode::Auto | Mode::Simple, PayoffSpec::Simple(g)) => price_simple(g, x0),
        (Mode::Simple, PayoffSpec::General(_)) => {
            Err(Error::Domain("--mode simple needs a payoff of the maximum alone".into()))
        }
        (Mode::Auto | Mode::General, p) => price_general(&p.general(), x0, cfg),
        (Mode::Bruteforce, p) => {
            let f = p.general();
            let bps: Vec<f64> = f.breakpoints();
            let grid = log_grid(x0, cfg.n, cfg.decades, &bps);
            let diagnostics = |residual| Diagnostics {
                grid_n: grid.len(),
                residual,
                tol: cfg.tol,
                iterations: 0,
                fixed_point_change: 0.0,
            };
            Ok(match solve_majorant_bruteforce(&f, &grid)? {
                Some(sol) => PriceResult {
                    value: sol.values[0],
                    hedge: None,
                    hedge_value: sol.values[0],
                    diagnostics: diagnostics(sol.max_violation),
                },
                None => PriceResult { value: f64::INFINITY, hedge: None, hedge_value: f64::INFINITY, diagnostics: diagnostics(0.0) },
            })
        }
    }
}

fn family_adjuster(family: &str, alpha: Option<f64>) -> Result<Adjuster<f64>> {
    let alpha = || alpha.ok_or_else(|| Error::Domain(format!("family `{family}` needs --alpha")));
    match family {
        "power" => Adjuster::power(alpha()?),
        "log" => Adjuster::log(alpha()?),
        other => Err(Error::Domain(format!("unknown family `{other}`; use power, log or --adjuster"))),
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    let mut cfg = GridConfig::default();
    if let Some(n) = cli.grid_n {
        if n < 2 {
            return Err(Error::Domain(format!("--grid-n must be at least 2, got {n}")));
        }
        cfg.n = n;
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Domain(format!("--tol must be positive, got {tol}")));
        }
        cfg.tol = tol;
    }
    match cli.command {
        Command::Transform { adjuster, to, at, x, atoms } => transform(out, &load_adjuster(&adjuster)?, to, at, x, atoms),
        Command::Hedge { adjuster, path, capital } => {
            let a = load_adjuster(&adjuster)?;
            let path = codec::read_path(open(&path)?)?;
            let records = run_path(&AdjusterStrategy::new(&a), &path, capital)?;
            let rows: Vec<AuditRow> = records.iter().map(AuditRow::from).collect();
            codec::write_audit(out, &rows)
        }
        Command::Price { payoff, x0, mode, decades } => {
            cfg.decades = decades;
            let p = codec::parse_payoff(&read(&payoff)?)?;
            let r = price(&p, x0, mode, &cfg)?;
            writeln!(out, "{}", codec::to_json_line(&PriceReport::from(&r)))?;
            Ok(())
        }
        Command::Oracle { family, alpha, adjuster, n, m, simulate, max_steps } => {
            let (label, a) = match (&family, &adjuster) {
                (Some(f), None) => (f.clone(), family_adjuster(f, alpha)?),
                (None, Some(p)) => ("file".to_string(), load_adjuster(p)?),
                _ => return Err(Error::Domain("give exactly one of --family and --adjuster".into())),
            };
            let spec = match m {
                Some(m) => WalkSpec::new(n, m)?,
                None => WalkSpec::with_default_cap(n)?,
            };
            let report = oracle_report(&label, &a, spec)?;
            writeln!(out, "{}", codec::to_json_line(&OracleDoc::from(&report)))?;
            if let Some(paths) = simulate {
                let sim = supermartingale_check(&a, spec, paths, cli.seed, max_steps)?;
                writeln!(
                    out,
                    "{}",
                    serde_json::json!({
                        "seed": sim.seed,
                        "paths": sim.n_paths,
                        "mean": codec::round_num(sim.mean),
                        "std_error": codec::round_num(sim.std_error),
                        "truncated": sim.truncated,
                        "floor_violations": sim.floor_violations.len(),
                        "pass": sim.pass,
                    })
                )?;
            }
            Ok(())
        }
        Command::Calibrate { adjuster, cash, stream } => {
            if !(0.0..1.0).contains(&cash) {
                return Err(Error::Domain(format!("--cash must lie in [0, 1), got {cash}")));
            }
            let inner = load_adjuster(&adjuster)?;
            let a = if cash > 0.0 { Adjuster::cash_mix(cash, inner)? } else { inner };
            let s = codec::read_stream(open(&stream)?)?;
            let cal = lookback_core::calibrate_stream(&a, &s)?;
            codec::write_calibrated(out, &codec::calibrated_rows(&cal))
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error kind=usage msg={}", one_line(first));
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| out.flush().map_err(Error::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error kind={} msg={}", e.kind(), one_line(&e.to_string()));
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
