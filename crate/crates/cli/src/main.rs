//! `sml`: solve, verify and benchmark SML assortment instances.
//!
//! Exit codes: 0 success, 1 failed verification or domain error, 2 bad
//! input or configuration, 3 unsupported model for the requested method,
//! 4 resource cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use sml_assortment::experiments::{
    default_grid, generate_instance, run_benchmark, FamilyConfig, DEFAULT_INSTANCES,
    DEFAULT_SEED,
};
use sml_assortment::io::{instance_to_json, read_instance, SolveDocument};
use sml_assortment::optimizer::{
    palm_solve_rol, solve_brute_force, solve_revenue_ordered, solve_rol, verify_optimality_bounds,
};
use sml_assortment::phenomena::{scan_for_effects, Effect};
use sml_assortment::{Error, Instance};

#[derive(Parser)]
#[command(name = "sml", version, about = "Assortment optimization under the sequential MNL model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a revenue-maximizing assortment.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMethod::Rol)]
        method: SolveMethod,
        /// Write the result document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check optimality bounds on the brute-force optimum and list
    /// regularity violations and choice-overload effects.
    Verify {
        input: PathBuf,
        /// Largest offer set considered by the effect scan.
        #[arg(long, default_value_t = 4)]
        max_size: usize,
    },
    /// Compare RO against ROL over random instance families.
    Benchmark {
        /// JSON file `{"families": [{"n1":..,"n2":..,"u0":..}, ...]}`.
        #[arg(long, conflicts_with_all = ["n1", "n2", "u0"])]
        config: Option<PathBuf>,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long)]
        u0: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_INSTANCES)]
        instances: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the CSV report here; the table then goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit one random instance of a family as an instance file.
    Gen {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        u0: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Rol,
    Ro,
    Brute,
    PalmRol,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchmarkFile {
    families: Vec<FamilyConfig>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::Io(_) | Error::Config(_) | Error::InvalidInstance(_) | Error::InvalidProduct(_) => 2,
        Error::UnsupportedModel(_) => 3,
        Error::ResourceLimit(_) => 4,
        Error::InvalidAssortment(_) | Error::Domain(_) => 1,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(input: &Path, method: SolveMethod, out: Option<&Path>) -> Result<u8, Error> {
    let instance = read_instance(input)?;
    let result = match method {
        SolveMethod::Rol => solve_rol(&instance),
        SolveMethod::Ro => solve_revenue_ordered(&instance),
        SolveMethod::Brute => solve_brute_force(&instance),
        SolveMethod::PalmRol => palm_solve_rol(&instance),
    }?;
    if !result.certified_optimal && matches!(method, SolveMethod::PalmRol) {
        eprintln!("note: PALM_ROL with more than two levels is conjectured, not proven, optimal");
    }
    let mut text = SolveDocument::new(&instance, &result).to_json();
    text.push('\n');
    emit(out, &text)?;
    Ok(0)
}

fn label(instance: &Instance, s: &sml_assortment::Assortment) -> String {
    format!("{{{}}}", instance.ids(s).join(","))
}

fn verify(input: &Path, max_size: usize) -> Result<u8, Error> {
    let instance = read_instance(input)?;
    let optimum = solve_brute_force(&instance)?;
    let report = verify_optimality_bounds(&instance, &optimum)?;

    println!("optimum {} revenue {}", label(&instance, &optimum.assortment), report.optimal_revenue);
    println!("lambda(S1*, S*) = {}", report.lambda_level1);
    println!("bound checks:");
    for check in &report.checks {
        println!(
            "  [{}] {}: {} >= {} ({} case{})",
            if check.passed { "pass" } else { "FAIL" },
            check.name,
            check.lhs,
            check.rhs,
            check.cases,
            if check.cases == 1 { "" } else { "s" }
        );
    }
    if !report.informational.is_empty() {
        println!("informational (not implied by optimality):");
        for check in &report.informational {
            println!(
                "  [{}] {}: {} {} {}",
                if check.passed { "holds" } else { "does not hold" },
                check.name,
                check.lhs,
                if check.passed { ">=" } else { "<" },
                check.rhs
            );
        }
    }

    let witnesses = scan_for_effects(&instance, max_size.min(instance.len()))?;
    println!("effects (offer sets up to {max_size} products): {}", witnesses.len());
    for w in &witnesses {
        match (w.effect, w.focal_product) {
            (Effect::RegularityViolation, Some(x)) => println!(
                "  regularity violation: rho({}, {}) = {} < rho({}, {}) = {}",
                instance.product(x).id,
                label(&instance, &w.smaller_set),
                w.prob_before.value(),
                instance.product(x).id,
                label(&instance, &w.larger_set),
                w.prob_after.value()
            ),
            _ => println!(
                "  choice overload: rho(x0, {}) = {} < rho(x0, {}) = {}",
                label(&instance, &w.smaller_set),
                w.prob_before.value(),
                label(&instance, &w.larger_set),
                w.prob_after.value()
            ),
        }
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn benchmark(
    config: Option<&Path>,
    n1: Option<usize>,
    n2: Option<usize>,
    u0: Option<f64>,
    instances: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<u8, Error> {
    let families = if let Some(path) = config {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let file: BenchmarkFile =
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        file.families
    } else if n1.is_some() || n2.is_some() || u0.is_some() {
        vec![FamilyConfig::new(n1.unwrap_or(0), n2.unwrap_or(0), u0.unwrap_or(1.0))
            .with_instances(instances)
            .with_seed(seed)]
    } else {
        default_grid(seed, instances)
    };
    for family in &families {
        family.validate()?;
    }

    let report = run_benchmark(&families);
    let csv = report.to_csv();
    match out {
        Some(_) => {
            emit(out, &csv)?;
            print!("{}", report.to_table());
        }
        None => {
            print!("{csv}");
            eprint!("{}", report.to_table());
        }
    }
    for failure in &report.failures {
        eprintln!("error: family #{}: {}", failure.position, failure.error);
    }
    Ok(if report.failures.is_empty() { 0 } else { 2 })
}

fn gen(config: FamilyConfig, index: usize, out: Option<&Path>) -> Result<u8, Error> {
    let instance = generate_instance(&config, index)?;
    let mut text = instance_to_json(&instance);
    text.push('\n');
    emit(out, &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve { input, method, out } => solve(&input, method, out.as_deref()),
        Command::Verify { input, max_size } => verify(&input, max_size),
        Command::Benchmark {
            config,
            n1,
            n2,
            u0,
            instances,
            seed,
            out,
        } => benchmark(config.as_deref(), n1, n2, u0, instances, seed, out.as_deref()),
        Command::Gen {
            n1,
            n2,
            u0,
            seed,
            index,
            out,
        } => {
            let config = FamilyConfig::new(n1, n2, u0)
                .with_seed(seed)
                .with_instances(index + 1);
            gen(config, index, out.as_deref())
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
