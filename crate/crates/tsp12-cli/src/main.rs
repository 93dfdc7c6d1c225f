use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use tsp12::gadget::{self, CliqueInput, Graph};
use tsp12::instance::{tour_cost, LpFile};
use tsp12::lp::{solve_ser, solve_ser_plus};
use tsp12::matching::{run_algorithm1_on, run_directed_on};
use tsp12::rational::{self, Rational};
use tsp12::tour::{approx_ratio, complete_directed, complete_to_tour};
use tsp12::transform::{self, Amplified};
use tsp12::verify::{self, ReportOptions};
use tsp12::{gen, Error, Instance, Kind, LpSolution, Tour};

#[derive(Parser, Debug)]
#[command(name = "tsp12", version, about = "LP relaxations, 2-matching search and gap constructions for (1,2)-TSP")]
struct Cli {
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the improvement steps.
    #[arg(long, global = true)]
    trace: bool,
    /// Worker threads used across independent input files.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve SER and SER+ and print the optimum as an LPSOL file.
    Solve {
        instance: PathBuf,
        /// Stop after SER.
        #[arg(long)]
        ser_only: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Improve the 1-edge 2-matching of a symmetric instance and complete a tour.
    Improve(PipelineArgs),
    /// Run the directed pipeline on an asymmetric instance.
    Directed(PipelineArgs),
    /// Print a gap report for each instance.
    Verify {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Also decide the assignment LP at this alpha.
        #[arg(long, value_parser = parse_rational)]
        alpha: Option<Rational>,
        /// Compute the exact optimum.
        #[arg(long)]
        oracle: bool,
    },
    /// Gap-preserving constructions.
    #[command(subcommand)]
    Amplify(Amplify),
    /// The clique reduction.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Exact oracles.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Draw a random instance.
    Generate {
        #[arg(long, value_enum, default_value_t = KindArg::Sym)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        /// Probability of a unit-cost pair.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Triangles joined by spokes instead of a uniform graph; `n` is
        /// then an upper bound.
        #[arg(long)]
        triangles: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct PipelineArgs {
    instance: PathBuf,
    /// Start from this LP solution instead of solving SER+.
    #[arg(long)]
    lpsol: Option<PathBuf>,
    /// Write the tour here.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AmplifyInput {
    instance: PathBuf,
    /// LP solution to transform; SER is solved when absent.
    #[arg(long)]
    lpsol: Option<PathBuf>,
    /// Writes `<out>.tsp` and `<out>.lpsol`.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Amplify {
    /// Subdivide a unit 1-edge; with `--iterate k`, subdivide then double k times.
    Subdivide {
        #[command(flatten)]
        input: AmplifyInput,
        #[arg(long)]
        iterate: Option<usize>,
    },
    DoubleSym {
        #[command(flatten)]
        input: AmplifyInput,
        #[arg(long)]
        vertex: usize,
    },
    DoubleAsym {
        #[command(flatten)]
        input: AmplifyInput,
        #[arg(long)]
        vertex: usize,
        /// Skip the path-pair check (needed above 12 vertices).
        #[arg(long)]
        trust: bool,
    },
    /// The convergence bound alpha + (alpha - 1) / (c + gamma).
    Beta {
        #[arg(long, value_parser = parse_rational)]
        alpha: Rational,
        #[arg(long)]
        c: u64,
        #[arg(long, value_parser = parse_rational, default_value = "0")]
        gamma: Rational,
    },
}

#[derive(Args, Debug)]
struct GadgetInput {
    /// Graph file: `GRAPH <n> <m>` then `u v` lines.
    graph: PathBuf,
    #[arg(long, default_value_t = 3)]
    t: usize,
}

#[derive(Subcommand, Debug)]
enum GadgetCmd {
    /// Build the instance; `--out P` writes `P.tsp`, `P.tour` and `P.layout`.
    Build {
        #[command(flatten)]
        input: GadgetInput,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// The improving tour for a t-clique given as comma-separated vertices.
    CliqueTour {
        #[command(flatten)]
        input: GadgetInput,
        #[arg(long, value_delimiter = ',', required = true)]
        clique: Vec<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Classify how a tour passes each gadget.
    Check {
        #[command(flatten)]
        input: GadgetInput,
        tour: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    Opt { instance: PathBuf },
    MinComponents { instance: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Sym,
    Asym,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).ok_or_else(|| format!("not a rational: {s}"))
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    Ok(Instance::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?)
}

fn load_solution(inst: &Instance, path: &Path) -> anyhow::Result<LpSolution> {
    let file = LpFile::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let x = LpSolution::from_file(inst, &file)?;
    if !x.is_feasible()? {
        return Err(Error::Invalid(format!("{} is not feasible for the relaxation", path.display())).into());
    }
    Ok(x)
}

fn ser_plus(inst: &Instance) -> anyhow::Result<LpSolution> {
    let base = solve_ser(inst)?;
    Ok(solve_ser_plus(inst, &base)?)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(path: &Path, ser_only: bool, out: Option<&Path>) -> anyhow::Result<()> {
    let inst = load_instance(path)?;
    let ser = solve_ser(&inst)?;
    let mut text = format!("# opt_ser = {}\n", ser.objective);
    let x = if ser_only {
        ser
    } else {
        let plus = solve_ser_plus(&inst, &ser)?;
        let _ = writeln!(text, "# opt_ser_plus = {}", plus.objective);
        plus
    };
    let _ = writeln!(text, "# vertex = {}", x.is_vertex);
    text.push_str(&x.to_file().to_text());
    emit(out, &text)
}

fn pipeline(args: &PipelineArgs, kind: Kind, trace: bool) -> anyhow::Result<()> {
    let inst = load_instance(&args.instance)?;
    if inst.kind() != kind {
        return Err(Error::Invalid(format!("expected a {} instance", kind.tag())).into());
    }
    let x = match &args.lpsol {
        Some(p) => load_solution(&inst, p)?,
        None => ser_plus(&inst)?,
    };
    let (steps, components, tour) = match kind {
        Kind::Symmetric => {
            let run = run_algorithm1_on(&x)?;
            let tour = complete_to_tour(&run.matching, &inst)?;
            (run.trace(), run.matching.components().len(), tour)
        }
        Kind::Asymmetric => {
            let run = run_directed_on(&x)?;
            let tour = complete_directed(&run.matching, &inst)?;
            (run.trace(), run.matching.components().len(), tour)
        }
    };
    if trace {
        print!("{steps}");
    }
    println!("objective = {}", x.objective);
    println!("components = {components}");
    println!("tour_cost = {}", tour_cost(&inst, &tour)?);
    println!("ratio = {}", approx_ratio(&inst, &tour, &x)?);
    match &args.out {
        Some(p) => write(p, &tour.to_text()),
        None => {
            print!("{}", tour.to_text());
            Ok(())
        }
    }
}

fn verify_all(paths: &[PathBuf], alpha: Option<&Rational>, oracle: bool) -> anyhow::Result<()> {
    let opts = ReportOptions { oracle };
    let reports = tsp12::par::map(paths, |p| -> anyhow::Result<String> {
        let inst = load_instance(p)?;
        Ok(verify::gap_report(&inst, opts, alpha)?.to_text())
    });
    for (p, r) in paths.iter().zip(reports) {
        let text = r?;
        if paths.len() > 1 {
            println!("# {}", p.display());
        }
        print!("{text}");
    }
    Ok(())
}

fn amplify_input(input: &AmplifyInput) -> anyhow::Result<(Instance, LpSolution)> {
    let inst = load_instance(&input.instance)?;
    let x = match &input.lpsol {
        Some(p) => load_solution(&inst, p)?,
        None => solve_ser(&inst)?,
    };
    Ok((inst, x))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn amplified(out: &Amplified, prefix: Option<&Path>) -> anyhow::Result<()> {
    println!("n = {}", out.instance.n());
    println!("objective = {}", out.solution.objective);
    match prefix {
        Some(p) => {
            write(&with_ext(p, "tsp"), &out.instance.to_text())?;
            write(&with_ext(p, "lpsol"), &out.solution.to_file().to_text())
        }
        None => {
            print!("{}", out.instance.to_text());
            print!("{}", out.solution.to_file().to_text());
            Ok(())
        }
    }
}

fn amplify(cmd: &Amplify) -> anyhow::Result<()> {
    match cmd {
        Amplify::Subdivide { input, iterate } => {
            let (inst, x) = amplify_input(input)?;
            let out = match iterate {
                Some(k) => transform::iterate(&inst, &x, *k)?,
                None => transform::subdivide(&inst, &x)?,
            };
            amplified(&out, input.out.as_deref())
        }
        Amplify::DoubleSym { input, vertex } => {
            let (inst, x) = amplify_input(input)?;
            amplified(&transform::double_sym(&inst, &x, *vertex)?, input.out.as_deref())
        }
        Amplify::DoubleAsym { input, vertex, trust } => {
            let (inst, x) = amplify_input(input)?;
            amplified(&transform::double_asym(&inst, &x, *vertex, *trust)?, input.out.as_deref())
        }
        Amplify::Beta { alpha, c, gamma } => {
            let b = transform::convergence_bound(alpha, *c, gamma)?;
            println!("{b}");
            println!("approx = {:.6}", rational::to_f64(&b));
            Ok(())
        }
    }
}

fn clique_input(input: &GadgetInput) -> anyhow::Result<CliqueInput> {
    let graph = Graph::parse(&read(&input.graph)?).with_context(|| format!("parsing {}", input.graph.display()))?;
    Ok(CliqueInput::new(graph, input.t)?)
}

fn gadget_cmd(cmd: &GadgetCmd) -> anyhow::Result<()> {
    match cmd {
        GadgetCmd::Build { input, out } => {
            let ci = clique_input(input)?;
            let red = gadget::build_reduction(&ci)?;
            println!("vertices = {}", red.instance.n());
            println!("cost_c = {}", tour_cost(&red.instance, &red.tour_c)?);
            println!("k = {}", red.k);
            if let Some(p) = out {
                write(&with_ext(p, "tsp"), &red.instance.to_text())?;
                write(&with_ext(p, "tour"), &red.tour_c.to_text())?;
                write(&with_ext(p, "layout"), &red.layout.to_text())?;
            }
            Ok(())
        }
        GadgetCmd::CliqueTour { input, clique, out } => {
            let ci = clique_input(input)?;
            let red = gadget::build_reduction(&ci)?;
            let tour = gadget::clique_tour(&ci, clique, &red)?;
            let (distance, removed) = gadget::edge_distance(&red.tour_c, &tour);
            println!("cost = {}", tour_cost(&red.instance, &tour)?);
            println!("distance = {distance}");
            println!("removed = {removed}");
            match out {
                Some(p) => write(p, &tour.to_text()),
                None => {
                    print!("{}", tour.to_text());
                    Ok(())
                }
            }
        }
        GadgetCmd::Check { input, tour } => {
            let ci = clique_input(input)?;
            let red = gadget::build_reduction(&ci)?;
            let tour = Tour::parse(&read(tour)?).with_context(|| format!("parsing {}", tour.display()))?;
            print!("{}", gadget::check_gadget_traversal(&tour, &red)?.to_text());
            Ok(())
        }
    }
}

fn oracle(cmd: &OracleCmd) -> anyhow::Result<()> {
    match cmd {
        OracleCmd::Opt { instance } => println!("{}", verify::exact_opt(&load_instance(instance)?)?),
        OracleCmd::MinComponents { instance } => println!("{}", verify::min_components(&load_instance(instance)?)?),
    }
    Ok(())
}

fn generate(kind: KindArg, n: usize, p: f64, triangles: bool, seed: u64, out: Option<&Path>) -> anyhow::Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("probability {p} outside [0, 1]")).into());
    }
    let kind = match kind {
        KindArg::Sym => Kind::Symmetric,
        KindArg::Asym => Kind::Asymmetric,
    };
    let mut rng = gen::rng(seed);
    let inst = if triangles {
        if kind != Kind::Symmetric || n < 6 {
            return Err(Error::Invalid("--triangles needs a symmetric instance with n >= 6".into()).into());
        }
        gen::triangle_spokes(n, p, &mut rng)
    } else {
        gen::random_instance(kind, n, p, &mut rng)
    };
    emit(out, &inst.to_text())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        configure_jobs(jobs)?;
    }
    match &cli.command {
        Command::Solve { instance, ser_only, out } => solve(instance, *ser_only, out.as_deref()),
        Command::Improve(args) => pipeline(args, Kind::Symmetric, cli.trace),
        Command::Directed(args) => pipeline(args, Kind::Asymmetric, cli.trace),
        Command::Verify { instances, alpha, oracle } => verify_all(instances, alpha.as_ref(), *oracle),
        Command::Amplify(cmd) => amplify(cmd),
        Command::Gadget(cmd) => gadget_cmd(cmd),
        Command::Oracle(cmd) => oracle(cmd),
        Command::Generate { kind, n, p, triangles, out } => generate(*kind, *n, *p, *triangles, cli.seed, out.as_deref()),
    }
}

#[cfg(feature = "parallel")]
fn configure_jobs(jobs: usize) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| anyhow::anyhow!("thread pool: {e}"))
}

#[cfg(not(feature = "parallel"))]
fn configure_jobs(jobs: usize) -> anyhow::Result<()> {
    if jobs > 1 {
        log::warn!("built without the parallel feature; --jobs {jobs} ignored");
    }
    Ok(())
}

/// 2 for bad input, 3 for a size guard, 4 for an internal breach.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Resource(_)) => 3,
        Some(Error::Invariant(_)) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
