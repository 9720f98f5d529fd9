use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nccausal::commands::{self, CommandError, DistanceKind, Output};
use nccausal::verify::{self, Suite};
use nccausal::{Scene, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE};
use nccausal_core::{Event, EventGrid};

#[derive(Debug, Parser)]
#[command(name = "nccausal", version, about = "Causal structure of 2D Minkowski space times M2(C)")]
struct Cli {
    /// Scene JSON file; the built-in reference scene is used when omitted.
    #[arg(long, global = true)]
    scene: Option<PathBuf>,
    /// Overrides the scene's optimizer seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CSV destination. Without it, CSV goes to stdout and the report to stderr.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Kind {
    Internal,
    Lorentzian,
    Functional,
}

impl From<Kind> for DistanceKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Internal => DistanceKind::Internal,
            Kind::Lorentzian => DistanceKind::Lorentzian,
            Kind::Functional => DistanceKind::Functional,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether NAME1 precedes NAME2. Exit 0 if related, 10 if not.
    Check { name1: String, name2: String },
    /// Distance between two states, between two events, or a table over all pairs.
    Distance {
        #[arg(long, value_enum)]
        kind: Kind,
        /// State names; omit with --from/--to or --table.
        names: Vec<String>,
        /// Source event `t,x` (lorentzian and functional only).
        #[arg(long, value_parser = parse_event, allow_hyphen_values = true, requires = "to")]
        from: Option<Event>,
        /// Target event `t,x`.
        #[arg(long, value_parser = parse_event, allow_hyphen_values = true, requires = "from")]
        to: Option<Event>,
        /// Emit `name1,name2,kind,value` over all ordered pairs of states.
        #[arg(long, conflicts_with_all = ["names", "from"])]
        table: bool,
    },
    /// Longitudes reachable from SOURCE at the event `--at t,x`.
    Reachable {
        source: String,
        #[arg(long, value_parser = parse_event, allow_hyphen_values = true)]
        at: Event,
    },
    /// Reachable longitudes from SOURCE over an event grid, as CSV.
    Scan {
        source: String,
        /// `t_min,t_max`; defaults to the scene grid.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        t_range: Option<(f64, f64)>,
        /// `x_min,x_max`; defaults to the scene grid.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        x_range: Option<(f64, f64)>,
        /// Points per axis; defaults to the scene grid.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Run the seeded invariant suites. Exit 0 iff every invariant holds.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Print the effective scene as JSON.
    Scene,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    if a.is_finite() && b.is_finite() {
        Ok((a, b))
    } else {
        Err(format!("non-finite value in `{s}`"))
    }
}

fn parse_event(s: &str) -> Result<Event, String> {
    parse_pair(s).map(|(t, x)| Event::new(t, x))
}

fn execute(cli: &Cli) -> Result<Output, CommandError> {
    let mut scene = match &cli.scene {
        Some(path) => Scene::load(path)?,
        None => Scene::reference(),
    };
    if let Some(seed) = cli.seed {
        scene = scene.with_seed(seed);
    }

    match &cli.command {
        Command::Check { name1, name2 } => commands::check(&scene, name1, name2),
        Command::Distance {
            kind,
            names,
            from,
            to,
            table,
        } => {
            let kind = DistanceKind::from(*kind);
            if *table {
                return commands::distance_table(&scene, kind);
            }
            match (names.as_slice(), from, to) {
                ([a, b], None, None) => commands::distance(&scene, kind, a, b),
                ([], Some(p), Some(q)) => commands::event_distance(kind, *p, *q),
                _ => Err(CommandError::Usage(
                    "give two state names, --from/--to events, or --table".into(),
                )),
            }
        }
        Command::Reachable { source, at } => commands::reachable(&scene, source, *at),
        Command::Scan {
            source,
            t_range,
            x_range,
            resolution,
        } => {
            let g = scene.grid;
            let t = t_range.unwrap_or((g.t_min, g.t_max));
            let x = x_range.unwrap_or((g.x_min, g.x_max));
            let (nt, nx) = resolution.map_or((g.nt, g.nx), |n| (n, n));
            if nt < 2 || nx < 2 {
                return Err(CommandError::Usage("scan resolution must be at least 2 per axis".into()));
            }
            let grid = EventGrid::new(t, x, nt, nx)?;
            commands::scan(&scene, source, &grid)
        }
        Command::Verify { suite } => {
            let report = verify::run(&scene, *suite);
            Ok(Output {
                code: if report.passed() { EXIT_OK } else { EXIT_INTERNAL },
                report: report.text(),
                csv: Some(report.csv()),
            })
        }
        Command::Scene => Ok(Output {
            code: EXIT_OK,
            report: format!("{}\n", scene.to_json()),
            csv: None,
        }),
    }
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return exit(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };

    let result = std::panic::catch_unwind(|| execute(&cli));
    let output = match result {
        Ok(Ok(output)) => output,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return exit(e.exit_code());
        }
        Err(_) => return exit(EXIT_INTERNAL),
    };

    let is_verify = matches!(cli.command, Command::Verify { .. });
    match (&output.csv, &cli.out) {
        (Some(csv), Some(path)) => {
            if let Err(e) = std::fs::write(path, csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return exit(EXIT_INTERNAL);
            }
            print!("{}", output.report);
        }
        (Some(csv), None) if !is_verify => {
            eprint!("{}", output.report);
            print!("{csv}");
        }
        _ => print!("{}", output.report),
    }
    exit(output.code)
}
