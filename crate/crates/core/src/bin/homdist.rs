use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use homdist::distance::{
    color_distance, cut_distance_upper, path_dist_spectral, tree_dist_cutnorm, tree_dist_spectral, DistanceReport,
    SolverOptions,
};
use homdist::generate::{figure1_graph, gen_gnp, gen_regular};
use homdist::graph::to_f64;
use homdist::hom::{density, hom_tree};
use homdist::inversion::{invert, verify_inversion};
use homdist::refine::{color_refine, path_spectrum, quotient, DEFAULT_SPECTRUM_TOL};
use homdist::suite::{run_suite, SUITES};
use homdist::{Error, Graph, Result, WeightedGraph};

#[derive(Parser)]
#[command(name = "homdist", version, about = "Graph distances from fractional isomorphism")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count homomorphisms from a tree into a graph.
    Hom {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Read the target as a weighted graph (JSON).
        #[arg(long)]
        weighted: bool,
        /// Print the homomorphism density instead of the count.
        #[arg(long)]
        density: bool,
    },
    /// Color refinement: class count, quotient, main spectrum.
    Refine {
        graph: PathBuf,
        /// Write the quotient as a weighted graph file.
        #[arg(long, value_name = "OUT")]
        quotient: Option<PathBuf>,
        /// Print the main spectrum as CSV.
        #[arg(long)]
        spectrum: bool,
        #[arg(long, default_value_t = DEFAULT_SPECTRUM_TOL)]
        spectrum_tol: f64,
    },
    /// Distance between two graphs.
    Dist {
        #[arg(long, value_enum)]
        kind: Kind,
        g: PathBuf,
        h: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the certificate as CSV.
        #[arg(long, value_name = "OUT")]
        cert: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Build a graph whose quotient approximates a weighted graph.
    Invert {
        weighted: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Check the cut distance bound for the built graph.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run an experiment suite (or `all`).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Generate a graph.
    Gen {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    TreeSpec,
    TreeCut,
    PathSpec,
    Cut,
    Color,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Gnp,
    Regular,
    Fig1,
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse(&fs::read_to_string(path)?)
}

fn read_weighted(path: &Path) -> Result<WeightedGraph> {
    WeightedGraph::parse(&fs::read_to_string(path)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn usage(message: impl Into<String>) -> u8 {
    eprintln!("error: {}", message.into());
    1
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Hom { pattern, target, weighted, density: as_density } => {
            let t = read_graph(&pattern)?;
            let target = if weighted { read_weighted(&target)? } else { read_graph(&target)?.as_weighted() };
            let count = hom_tree(&t, &target)?;
            let value = if as_density { density(&t, &target, &count) } else { count };
            println!("{value} {}", to_f64(&value));
        }
        Command::Refine { graph, quotient: out, spectrum, spectrum_tol } => {
            let g = read_graph(&graph)?;
            let c = color_refine(&g);
            println!("classes={} rounds={}", c.class_count(), c.rounds);
            if let Some(path) = out {
                fs::write(path, quotient(&g)?.serialize())?;
            }
            if spectrum {
                print!("{}", path_spectrum(&g, spectrum_tol)?.to_csv());
            }
        }
        Command::Dist { kind, g, h, tol, max_iters, restarts, seed, cert, json } => {
            let (g, h) = (read_graph(&g)?, read_graph(&h)?);
            let base = match kind {
                Kind::Cut | Kind::Color => SolverOptions::for_cut_distance(),
                _ => SolverOptions::default(),
            };
            let opts = SolverOptions {
                tol: tol.unwrap_or(base.tol),
                max_iters: max_iters.unwrap_or(base.max_iters),
                restarts: restarts.unwrap_or(base.restarts),
                seed,
            };
            let report = match kind {
                Kind::TreeSpec => tree_dist_spectral(&g, &h, &opts)?,
                Kind::TreeCut => tree_dist_cutnorm(&g, &h, &opts)?,
                Kind::PathSpec => path_dist_spectral(&g, &h, &opts)?,
                Kind::Cut => cut_distance_upper(&g.as_weighted(), &h.as_weighted(), &opts)?,
                Kind::Color => color_distance(&g, &h, &opts)?,
            };
            print_report(&report, json);
            if let Some(path) = cert {
                fs::write(path, report.certificate_csv())?;
            }
            if !report.converged {
                eprintln!("error: solver stopped at the iteration cap ({} iterations)", report.iterations);
                return Ok(4);
            }
        }
        Command::Invert { weighted, n, output, verify, json } => {
            let h = read_weighted(&weighted)?;
            let inv = invert(&h, n)?;
            if let Some(path) = &output {
                fs::write(path, inv.graph.serialize())?;
            }
            if verify {
                let rep = verify_inversion(&h, n)?;
                if json {
                    println!("{}", serde_json::to_string_pretty(&rep).expect("reports serialize"));
                } else {
                    println!("achieved={} bound={} exact={}", rep.achieved, rep.bound, rep.inner_exact);
                }
            } else if json {
                println!("{}", serde_json::to_string_pretty(&inv.plan).expect("plans serialize"));
            } else if output.is_none() {
                print!("{}", inv.graph.serialize());
            }
        }
        Command::Verify { suite, seed, out, json } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut failed = false;
            let mut summary = Vec::new();
            for name in names {
                let (outcome, path) = run_suite(name, seed, &out)?;
                for f in &outcome.failures {
                    eprintln!("{name}: {f}");
                }
                failed |= !outcome.passed();
                if json {
                    summary.push(serde_json::json!({
                        "suite": name,
                        "seed": seed,
                        "passed": outcome.passed(),
                        "rows": outcome.rows.len(),
                        "failures": outcome.failures,
                        "csv": path.display().to_string(),
                    }));
                } else {
                    let status = if outcome.passed() { "pass" } else { "FAIL" };
                    println!("{name} seed={seed} rows={} {status} {}", outcome.rows.len(), path.display());
                }
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            }
            if failed {
                return Ok(5);
            }
        }
        Command::Gen { model, n, p, d, seed, output } => {
            let g = match model {
                Model::Gnp => match p {
                    Some(p) => gen_gnp(n, p, seed)?,
                    None => return Ok(usage("--model gnp needs --p")),
                },
                Model::Regular => match d {
                    Some(d) => gen_regular(n, d, seed)?,
                    None => return Ok(usage("--model regular needs --d")),
                },
                Model::Fig1 => figure1_graph(n)?,
            };
            emit(output.as_deref(), &g.serialize())?;
        }
    }
    Ok(0)
}

fn print_report(report: &DistanceReport, json: bool) {
    if json {
        println!("{}", report.to_json());
        return;
    }
    println!(
        "value={} bound={:?} lower_bound={} iterations={} converged={} seed={}",
        report.value, report.bound, report.lower_bound, report.iterations, report.converged, report.seed
    );
    let r = &report.residuals;
    println!(
        "residuals marginal={:e} negativity={:e} spectral_excess={:e}",
        r.marginal, r.negativity, r.spectral_excess
    );
    for note in &report.notes {
        println!("note: {note}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
