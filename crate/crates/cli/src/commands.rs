use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use pdptw_core::io::{
    generate_random, parse_li_lim, parse_native, parse_solution, render_text, write_native,
    write_solution, GeneratorParams, IoError, SolutionReport,
};
use pdptw_core::model::{check_feasibility, FeasibilityMode, Instance, RoutedSolution};
use pdptw_core::oracle::{enumerate_optimal, OracleError, OracleLimits};
use pdptw_core::{run_ga, GaParams, GaResult};
use serde_json::json;

use crate::args::{BenchArgs, Format, GenerateArgs, OracleArgs, SolveArgs, ValidateArgs};

pub const OK: u8 = 0;
pub const IO: u8 = 1;
pub const USAGE: u8 = 2;
pub const NO_FEASIBLE: u8 = 3;
pub const INVALID: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn io(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: IO,
            error: error.into(),
        }
    }

    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: USAGE,
            error: error.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn emit(format: Format, record: serde_json::Value, text: impl FnOnce() -> String) {
    match format {
        Format::Machine => println!("{record}"),
        Format::Text => print!("{}", text()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::io)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::io)
}

pub fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "txt") {
        parse_li_lim(&text)
    } else {
        parse_native(&text)
    };
    parsed
        .with_context(|| format!("cannot parse instance {}", path.display()))
        .map_err(Failure::io)
}

fn load_solution(path: &Path) -> Result<RoutedSolution, Failure> {
    parse_solution(&read(path)?)
        .with_context(|| format!("cannot parse solution {}", path.display()))
        .map_err(Failure::io)
}

fn validated(params: GaParams) -> Result<GaParams, Failure> {
    params.validate().map_err(Failure::usage)?;
    Ok(params)
}

fn report(
    solution: &RoutedSolution,
    instance: &Instance,
    mode: FeasibilityMode,
) -> Result<SolutionReport, Failure> {
    SolutionReport::build(solution, instance, mode).map_err(|e| Failure::io(anyhow!(e)))
}

fn routes_json(solution: &RoutedSolution) -> serde_json::Value {
    solution
        .routes
        .iter()
        .map(|r| json!({ "vehicle": r.vehicle, "visits": r.visits }))
        .collect()
}

pub fn generate(args: &GenerateArgs, format: Format) -> Outcome {
    let params = GeneratorParams {
        n_prime: args.n,
        k: args.k,
        area: args.area,
        capacity: args.capacity,
        horizon: args.horizon,
        seed: args.seed.seed,
        ..GeneratorParams::default()
    };
    let instance = generate_random(&params).map_err(|e| match e {
        IoError::Generator(_) => Failure::usage(e),
        other => Failure::io(other),
    })?;
    write(&args.out, &write_native(&instance))?;
    emit(
        format,
        json!({
            "record": "generate",
            "n_prime": instance.n_prime(),
            "k": instance.fleet_size(),
            "requests": instance.requests().len(),
            "seed": params.seed,
            "path": args.out.display().to_string(),
        }),
        || {
            format!(
                "wrote {}: N' = {}, K = {}, {} requests\n",
                args.out.display(),
                instance.n_prime(),
                instance.fleet_size(),
                instance.requests().len()
            )
        },
    );
    Ok(OK)
}

pub fn solve(args: &SolveArgs, format: Format) -> Outcome {
    let params = validated(args.ga.params(args.pop, args.seed.seed))?;
    let instance = load_instance(&args.instance)?;
    let started = Instant::now();
    let result = run_ga(&instance, &params).map_err(Failure::usage)?;
    let elapsed = started.elapsed();

    let rep = report(&result.best_solution, &instance, params.mode)?;
    if let Some(out) = &args.out {
        write(out, &write_solution(&rep))?;
    }
    emit(
        format,
        json!({
            "record": "solve",
            "feasible": result.feasible,
            "best_fitness": result.best_fitness,
            "best_distance": result.best_distance,
            "best_penalized": result.best_penalized,
            "evaluations": result.evaluations,
            "seed": params.seed,
            "routes": routes_json(&result.best_solution),
        }),
        || {
            format!(
                "{}evaluations {}\nwall time {:.3}s\n",
                render_text(&rep),
                result.evaluations,
                elapsed.as_secs_f64()
            )
        },
    );
    Ok(if result.feasible { OK } else { NO_FEASIBLE })
}

pub fn validate(args: &ValidateArgs, format: Format) -> Outcome {
    let instance = load_instance(&args.instance)?;
    let solution = load_solution(&args.solution)?;
    let mode: FeasibilityMode = args.mode.into();
    let verdict = check_feasibility(&solution, &instance, mode);
    emit(
        format,
        json!({
            "record": "validate",
            "feasible": verdict.feasible,
            "violations": verdict.violations,
        }),
        || {
            let mut text = format!("feasible {}\n", if verdict.feasible { "yes" } else { "no" });
            for v in &verdict.violations {
                text.push_str(&format!("  {}", v.constraint));
                if let Some(n) = v.node {
                    text.push_str(&format!(" node {n}"));
                }
                if let Some(k) = v.vehicle {
                    text.push_str(&format!(" vehicle {k}"));
                }
                text.push_str(&format!(" magnitude {}\n", v.magnitude));
            }
            text
        },
    );
    Ok(if verdict.feasible { OK } else { INVALID })
}

pub fn oracle(args: &OracleArgs, format: Format) -> Outcome {
    let time_budget = match args.time_budget {
        Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => {
            return Err(Failure::usage(anyhow!(
                "time budget must be positive, got {s}"
            )))
        }
        None => None,
    };
    let limits = OracleLimits {
        max_nodes: args.max_nodes,
        max_vehicles: args.max_vehicles,
        time_budget,
    };
    let instance = load_instance(&args.instance)?;
    let mode: FeasibilityMode = args.mode.into();
    let result = enumerate_optimal(&instance, mode, &limits).map_err(|e| match e {
        OracleError::InvalidLimits(_)
        | OracleError::TooLarge { .. }
        | OracleError::OutOfTime { .. } => Failure::usage(e),
    })?;

    if let (Some(out), Some(opt)) = (&args.out, &result.optimum) {
        write(out, &write_solution(&report(opt, &instance, mode)?))?;
    }
    emit(
        format,
        json!({
            "record": "oracle",
            "optimal_fitness": result.optimal_fitness,
            "feasible_count": result.feasible_count,
            "explored_count": result.explored_count,
            "routes": result.optimum.as_ref().map(routes_json),
        }),
        || {
            let mut text = match (&result.optimum, result.optimal_fitness) {
                (Some(opt), Some(f)) => {
                    let mut t = format!("optimal fitness {f:.6}\n");
                    for r in &opt.routes {
                        let stops: Vec<String> = r.visits.iter().map(|v| v.to_string()).collect();
                        t.push_str(&format!(
                            "  vehicle {}: 0 -> {} -> 0\n",
                            r.vehicle,
                            stops.join(" -> ")
                        ));
                    }
                    t
                }
                _ => "no feasible solution\n".to_string(),
            };
            text.push_str(&format!(
                "feasible {} of {} explored\n",
                result.feasible_count, result.explored_count
            ));
            text
        },
    );
    Ok(if result.optimum.is_some() {
        OK
    } else {
        NO_FEASIBLE
    })
}

struct Cell {
    n_prime: usize,
    k: usize,
    pop: usize,
    runs: Vec<GaResult>,
}

impl Cell {
    fn stats(&self) -> (usize, f64, f64, f64, f64) {
        let feasible = self.runs.iter().filter(|r| r.feasible).count();
        let count = self.runs.len() as f64;
        let min = |f: fn(&GaResult) -> f64| self.runs.iter().map(f).fold(f64::INFINITY, f64::min);
        let mean = |f: fn(&GaResult) -> f64| self.runs.iter().map(f).sum::<f64>() / count;
        (
            feasible,
            min(|r| r.best_distance),
            mean(|r| r.best_distance),
            min(|r| r.best_fitness),
            mean(|r| r.best_fitness),
        )
    }
}

pub fn bench(args: &BenchArgs, format: Format) -> Outcome {
    if args.seeds == 0 || args.instances == 0 {
        return Err(Failure::usage(anyhow!(
            "--seeds and --instances must be positive"
        )));
    }
    for &pop in &args.pop {
        validated(args.ga.params(pop, args.seed.seed))?;
    }
    let base = args.seed.seed;
    if format == Format::Text {
        println!(
            "{:>5} {:>3} {:>5} {:>5} {:>8} {:>12} {:>12} {:>12} {:>12}",
            "N'", "k", "n", "runs", "feasible", "min dist", "mean dist", "min fit", "mean fit"
        );
    }
    for &n_prime in &args.n {
        for &k in &args.k {
            let instances = (0..args.instances)
                .map(|i| {
                    generate_random(&GeneratorParams {
                        n_prime,
                        k,
                        seed: base + i,
                        ..GeneratorParams::default()
                    })
                    .map_err(Failure::usage)
                })
                .collect::<Result<Vec<_>, _>>()?;
            for &pop in &args.pop {
                let mut cell = Cell {
                    n_prime,
                    k,
                    pop,
                    runs: Vec::new(),
                };
                for inst in &instances {
                    for s in 0..args.seeds {
                        let params = args.ga.params(pop, base + s);
                        cell.runs
                            .push(run_ga(inst, &params).map_err(Failure::usage)?);
                    }
                }
                let (feasible, min_d, mean_d, min_f, mean_f) = cell.stats();
                emit(
                    format,
                    json!({
                        "record": "bench",
                        "n_prime": cell.n_prime,
                        "k": cell.k,
                        "pop": cell.pop,
                        "runs": cell.runs.len(),
                        "feasible": feasible,
                        "min_distance": min_d,
                        "mean_distance": mean_d,
                        "min_fitness": min_f,
                        "mean_fitness": mean_f,
                    }),
                    || {
                        format!(
                            "{:>5} {:>3} {:>5} {:>5} {:>8} {:>12.2} {:>12.2} {:>12.2} {:>12.2}\n",
                            cell.n_prime,
                            cell.k,
                            cell.pop,
                            cell.runs.len(),
                            feasible,
                            min_d,
                            mean_d,
                            min_f,
                            mean_f
                        )
                    },
                );
            }
        }
    }
    Ok(OK)
}
