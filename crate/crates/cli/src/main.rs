use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use theta_core::fox_neuwirth::{cell_of, Configuration};
use theta_core::homology::OrderComplex;
use theta_core::nord::PosetView;
use theta_core::verify::{run_suite, Caps, Suite, SuiteConfig};

/// Θ_n, n-orderings and configuration spaces of points in ℝ^n.
#[derive(Parser, Debug)]
#[command(name = "theta-conf", version, about)]
struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List nOrd(A) with degrees.
    Enumerate(PosetArgs),
    /// Hasse diagram of nOrd(A).
    Hasse(PosetArgs),
    /// Integral homology of the order complex of nOrd(A).
    Homology(PosetArgs),
    /// The Fox-Neuwirth cell of a configuration read from a point file.
    Classify {
        #[arg(long)]
        n: usize,
        /// One point per line, `label x_1 ... x_n`; `-` reads stdin.
        points: PathBuf,
    },
    /// Run a verification suite; exits with status 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct PosetArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Comma-separated distinct labels.
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_chains: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// theorem-a, theorem-b, morphisms, poset or cells.
    suite: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, value_delimiter = ',', default_value = "a,b,c")]
    labels: Vec<String>,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    max_edges: u64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_morphisms: u64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_chains: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.iter().any(|l| l.is_empty() || l.chars().any(char::is_whitespace)) {
        bail!("labels must be nonempty and contain no whitespace");
    }
    if labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
        bail!("labels must be distinct: {}", labels.join(","));
    }
    Ok(())
}

fn poset(args: &PosetArgs) -> Result<PosetView> {
    check_labels(&args.labels)?;
    Ok(PosetView::of(&args.labels, args.n as usize, args.max_chains as usize)?)
}

fn unsupported(cmd: &str, format: Format) -> anyhow::Error {
    anyhow::anyhow!("{cmd} does not support --format {format:?}")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Returns the rendered output and whether the run passed.
fn run(cli: &Cli) -> Result<(String, bool)> {
    let out = match &cli.command {
        Command::Enumerate(args) => {
            let view = poset(args)?;
            match cli.format.unwrap_or(Format::Text) {
                Format::Text => view.elements().iter().map(|s| format!("{s}\t{}\n", s.degree())).collect(),
                Format::Json => {
                    let rows: Vec<_> = view
                        .elements()
                        .iter()
                        .map(|s| json!({"ordering": s, "text": s.to_string(), "degree": s.degree()}))
                        .collect();
                    serde_json::to_string_pretty(&rows)? + "\n"
                }
                Format::Csv => {
                    let mut s = String::from("ordering,degree\n");
                    for o in view.elements() {
                        s += &format!("{o},{}\n", o.degree());
                    }
                    s
                }
                f => return Err(unsupported("enumerate", f)),
            }
        }
        Command::Hasse(args) => {
            let view = poset(args)?;
            let edges = view.hasse();
            let names: Vec<String> = view.elements().iter().map(ToString::to_string).collect();
            match cli.format.unwrap_or(Format::Dot) {
                Format::Dot => {
                    let mut s = String::from("digraph nord {\n  rankdir=BT;\n");
                    for (i, name) in names.iter().enumerate() {
                        s += &format!("  n{i} [label=\"{}\"];\n", dot_escape(name));
                    }
                    for (i, j) in &edges {
                        s += &format!("  n{i} -> n{j};\n");
                    }
                    s + "}\n"
                }
                Format::Text => edges.iter().map(|&(i, j)| format!("{} -> {}\n", names[i], names[j])).collect(),
                Format::Json => serde_json::to_string_pretty(&json!({"nodes": names, "edges": edges}))? + "\n",
                f => return Err(unsupported("hasse", f)),
            }
        }
        Command::Homology(args) => {
            let view = poset(args)?;
            let cx = OrderComplex::new(view.poset(), args.max_chains as usize)?;
            let cc = cx.boundary_matrices();
            match cli.format.unwrap_or(Format::Json) {
                Format::Csv => cc.to_csv(),
                format => {
                    let h = theta_core::homology::homology(&cc)?;
                    if format == Format::Json {
                        serde_json::to_string_pretty(&h)? + "\n"
                    } else if format == Format::Text {
                        format!(
                            "betti {:?}\ntorsion {:?}\neuler {}\nsimplex counts {:?}\n",
                            h.betti, h.torsion, h.euler, h.simplex_counts
                        )
                    } else {
                        return Err(unsupported("homology", format));
                    }
                }
            }
        }
        Command::Classify { n, points } => {
            let text = if points.as_os_str() == "-" {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                s
            } else {
                fs::read_to_string(points).with_context(|| format!("reading {}", points.display()))?
            };
            let phi = Configuration::parse_points(&text, *n)?;
            let s = cell_of(&phi);
            match cli.format.unwrap_or(Format::Text) {
                Format::Text => format!("{s}\n"),
                Format::Json => serde_json::to_string_pretty(&json!({"ordering": s, "text": s.to_string()}))? + "\n",
                f => return Err(unsupported("classify", f)),
            }
        }
        Command::Verify(args) => {
            let suite: Suite = args.suite.parse()?;
            check_labels(&args.labels)?;
            let cfg = SuiteConfig {
                n: args.n as usize,
                labels: args.labels.clone(),
                caps: Caps {
                    max_edges: args.max_edges as usize,
                    max_morphisms: args.max_morphisms as usize,
                    max_chains: args.max_chains as usize,
                },
                seed: args.seed,
                samples: args.samples,
            };
            let report = run_suite(suite, &cfg)?;
            let rendered = match cli.format.unwrap_or(Format::Json) {
                Format::Json => serde_json::to_string_pretty(&report)? + "\n",
                Format::Text => report.to_string(),
                f => return Err(unsupported("verify", f)),
            };
            return Ok((rendered, report.passed));
        }
    };
    Ok((out, true))
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("THETA_CONF_THREADS") {
        let threads: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .with_context(|| format!("THETA_CONF_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(&cli)).and_then(|(text, passed)| {
        match &cli.output {
            Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
            None => io::stdout().write_all(text.as_bytes())?,
        }
        Ok(passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
