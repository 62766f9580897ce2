use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use cpmc::gen::{grid, path_fixture, random_planar, random_terminals, RandomPlanarParams};
use cpmc::instance::{read_dimacs, verify, InstanceFile, ResultFile};
use cpmc::lcsp::{solve_cpmec_same_face, solve_lcsp};
use cpmc::oracle::{oracle_cpmec, oracle_cpmnc, oracle_lcsp, oracle_set_cover, DEFAULT_LIMIT};
use cpmc::planar::{solve_cpmec_planar, solve_cpmec_unchecked, solve_cpmnc_same_face};
use cpmc::reductions::{build_with, to_bipartite, to_unit_weight, Chaining, SetCoverInstance};
use cpmc::{Error, PerturbMode, Terminals};

const SOLVED: u8 = 0;
const INVALID: u8 = 1;
const INFEASIBLE: u8 = 2;
const PRECONDITION: u8 = 3;
const MALFORMED: u8 = 4;
const MISMATCH: u8 = 5;

const PATH_LIMIT: usize = 1 << 22;

#[derive(Parser)]
#[command(name = "cpmc", version, about = "Connectivity preserving minimum cuts on planar graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Solver {
    CpmncSameFace,
    CpmecPlanar,
    CpmecSameFace,
    Lcsp,
}

impl Solver {
    fn name(self) -> &'static str {
        match self {
            Solver::CpmncSameFace => "cpmnc-same-face",
            Solver::CpmecPlanar => "cpmec-planar",
            Solver::CpmecSameFace => "cpmec-same-face",
            Solver::Lcsp => "lcsp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Cpmnc,
    Cpmec,
    Lcsp,
    SetCover,
}

#[derive(Subcommand)]
enum Command {
    /// Solve instances; prints or writes one result file per instance.
    Solve {
        #[arg(value_enum)]
        solver: Solver,
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Cross-check against the exhaustive oracle (exit 5 on mismatch).
        #[arg(long)]
        oracle: bool,
        /// Worker threads for batches.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output file (single instance) or directory (batches).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Run the region-growing solver without an embedding; no optimality claim.
        #[arg(long)]
        unsafe_nonplanar: bool,
    },
    /// Build the set-cover gadget instance and a sidecar map.
    Reduce {
        set_cover: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Replace weighted nodes by unit-weight cliques.
        #[arg(long)]
        unit_weight: bool,
        /// Contract gadget links and require a two-colorable result.
        #[arg(long)]
        bipartite: bool,
        /// Give every gadget its own endpoints, joined by link edges.
        #[arg(long)]
        linked: bool,
    },
    /// Re-check a result file against its instance (exit 0 valid, 1 invalid).
    Verify { instance: PathBuf, result: PathBuf },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Run an exhaustive oracle directly.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
    },
    /// Convert a DIMACS graph into an instance file (no embedding).
    ImportDimacs {
        file: PathBuf,
        #[arg(long)]
        s1: usize,
        #[arg(long)]
        s2: usize,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Grid with ROWSxCOLS nodes; s1 top-left, s2 top-right, t bottom-right.
    Grid {
        shape: String,
        /// Random edge weights in 1..=max-weight from this seed (unit weights without it).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 5)]
        max_weight: i64,
    },
    /// Random connected planar graph with random terminals.
    RandomPlanar {
        #[arg(long, default_value_t = 8)]
        nodes: usize,
        #[arg(long, default_value_t = 14)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_weight: i64,
    },
    /// Path with n nodes; n = 5 gives s1 - a - s2 - b - t.
    Path { n: usize },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible | Error::NoFeasiblePath => INFEASIBLE,
            Error::SelfLoop(..)
            | Error::NodeOutOfRange(_)
            | Error::EdgeOutOfRange(_)
            | Error::NonPositiveWeight(_)
            | Error::NonDistinctTerminals
            | Error::MalformedRotation(_)
            | Error::NonPlanarEmbedding { .. }
            | Error::Format(_)
            | Error::ElementUncovered(_) => MALFORMED,
            Error::Certificate(_) | Error::InvalidCut(_) => INVALID,
            _ => PRECONDITION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(MALFORMED, format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| fail(INVALID, format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn elapsed_us(start: Instant) -> u64 {
    start.elapsed().as_micros() as u64
}

fn solve_one(solver: Solver, path: &Path, with_oracle: bool, unsafe_nonplanar: bool) -> Result<ResultFile, Failure> {
    let file = InstanceFile::parse(&read(path)?)?;
    let start = Instant::now();
    let mut result = match solver {
        Solver::Lcsp => {
            let query = file.lcsp_query()?;
            let path = solve_lcsp(&query)?;
            let mut result = ResultFile::from_path(solver.name(), &path, elapsed_us(start));
            if with_oracle {
                result.oracle = Some(match oracle_lcsp(&query, PATH_LIMIT) {
                    Ok(Some(o)) if o.route.weight == path.route.weight => "match".into(),
                    Ok(_) => return Err(fail(MISMATCH, "oracle: mismatch")),
                    Err(Error::LimitExceeded { .. }) => "skipped: limit exceeded".into(),
                    Err(e) => return Err(e.into()),
                });
            }
            result
        }
        Solver::CpmecPlanar if unsafe_nonplanar && file.embedding.is_none() => {
            let graph = file.graph()?.perturb(PerturbMode::Edges);
            let solution = solve_cpmec_unchecked(&graph, file.terminals()?)?;
            ResultFile::from_cut(solver.name(), &solution, elapsed_us(start))
        }
        _ => {
            let mode = if solver == Solver::CpmncSameFace {
                PerturbMode::Nodes
            } else {
                PerturbMode::Edges
            };
            let mut instance = file.planar_instance()?.perturbed(mode);
            instance.embedding = instance.embedding.reroot_outer_face(instance.terminals.t);
            let solution = match solver {
                Solver::CpmncSameFace => solve_cpmnc_same_face(&instance)?,
                Solver::CpmecPlanar => solve_cpmec_planar(&instance)?,
                _ => solve_cpmec_same_face(&instance)?,
            };
            let mut result = ResultFile::from_cut(solver.name(), &solution, elapsed_us(start));
            if with_oracle {
                let graph = instance.graph();
                let oracle = if mode == PerturbMode::Nodes {
                    oracle_cpmnc(graph, instance.terminals, DEFAULT_LIMIT)
                } else {
                    oracle_cpmec(graph, instance.terminals, DEFAULT_LIMIT)
                };
                result.oracle = Some(match oracle {
                    Ok(Some(o)) if o.elements == solution.cut.elements => "match".into(),
                    Ok(_) => return Err(fail(MISMATCH, "oracle: mismatch")),
                    Err(Error::LimitExceeded { .. }) => "skipped: limit exceeded".into(),
                    Err(e) => return Err(e.into()),
                });
            }
            result
        }
    };
    if let Some(status) = &result.oracle {
        eprintln!("{}: oracle: {status}", path.display());
    }
    result.wall_time_us = result.wall_time_us.max(1);
    Ok(result)
}

fn cmd_solve(
    solver: Solver,
    instances: &[PathBuf],
    with_oracle: bool,
    jobs: usize,
    output: Option<&Path>,
    unsafe_nonplanar: bool,
) -> u8 {
    if unsafe_nonplanar && solver != Solver::CpmecPlanar {
        eprintln!("--unsafe-nonplanar applies to cpmec-planar only");
        return PRECONDITION;
    }
    let jobs = jobs.max(1);
    let mut outcomes: Vec<Option<Result<ResultFile, Failure>>> = (0..instances.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = instances.len().div_ceil(jobs).max(1);
        for (paths, slots) in instances.chunks(chunk).zip(outcomes.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (p, slot) in paths.iter().zip(slots) {
                    *slot = Some(solve_one(solver, p, with_oracle, unsafe_nonplanar));
                }
            });
        }
    });
    let batch = instances.len() > 1;
    let mut code = SOLVED;
    for (path, outcome) in instances.iter().zip(outcomes) {
        let written = match outcome.expect("every instance is processed") {
            Ok(result) => {
                let target = match (output, batch) {
                    (Some(dir), true) => {
                        let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                        Some(dir.join(format!("{stem}.result.json")))
                    }
                    (out, _) => out.map(Path::to_path_buf),
                };
                if let (Some(dir), true) = (output, batch) {
                    if let Err(e) = fs::create_dir_all(dir) {
                        eprintln!("{}: {e}", dir.display());
                        return INVALID;
                    }
                }
                write_or_print(target.as_deref(), &result.to_json())
            }
            Err(f) => Err(f),
        };
        if let Err(f) = written {
            eprintln!("{}: {}", path.display(), f.message);
            code = code.max(f.code);
        }
    }
    code
}

fn cmd_reduce(input: &Path, output: &Path, unit_weight: bool, bipartite: bool, linked: bool) -> Result<(), Failure> {
    let sc: SetCoverInstance = serde_json::from_str(&read(input)?).map_err(|e| fail(MALFORMED, e.to_string()))?;
    let artifact = build_with(&sc, if linked { Chaining::Linked } else { Chaining::Shared })?;
    let mut map = json!({
        "budget": artifact.budget,
        "chaining": artifact.chaining,
        "terminals": artifact.terminals,
        "endpoints": artifact.endpoints,
        "internal": artifact.internal.iter().map(|(&(element, set), &node)| json!({"element": element, "set": set, "node": node})).collect::<Vec<_>>(),
        "set_nodes": artifact.set_nodes,
        "links": artifact.links,
    });
    let (mut graph, mut terminals) = (artifact.graph.clone(), artifact.terminals);
    if unit_weight {
        let unit = to_unit_weight(&graph, terminals)?;
        map["copies"] = json!(unit.copies);
        graph = unit.graph;
        terminals = unit.terminals;
    }
    if bipartite {
        if unit_weight {
            return Err(fail(PRECONDITION, "unit-weight cliques are never two-colorable"));
        }
        let bip = to_bipartite(&artifact)?;
        map["node_map"] = json!(bip.node_map);
        map["coloring"] = json!(bip.coloring);
        graph = bip.graph;
        terminals = bip.terminals;
    }
    let mut file = InstanceFile::from_parts(&graph, None, Some(terminals));
    file.metadata.insert("budget".into(), json!(artifact.budget));
    file.metadata.insert("source".into(), json!("set cover reduction"));
    write_or_print(Some(output), &file.to_json())?;
    let map_path = output.with_extension("map.json");
    write_or_print(Some(&map_path), &serde_json::to_string_pretty(&map).unwrap())
}

fn cmd_verify(instance: &Path, result: &Path) -> Result<(), Failure> {
    let file = InstanceFile::parse(&read(instance)?)?;
    let result = ResultFile::parse(&read(result)?)?;
    verify(&file, &result).map_err(|m| fail(INVALID, format!("invalid: {m}")))?;
    eprintln!("valid");
    Ok(())
}

fn cmd_gen(family: &Family) -> Result<InstanceFile, Failure> {
    let mut file = match *family {
        Family::Grid {
            ref shape,
            seed,
            max_weight,
        } => {
            let dims: Vec<usize> = shape
                .split(['x', 'X'])
                .map(|s| s.parse().map_err(|_| fail(MALFORMED, format!("bad grid shape {shape:?}"))))
                .collect::<Result<_, _>>()?;
            let [rows, cols] = dims[..] else {
                return Err(fail(MALFORMED, format!("bad grid shape {shape:?}")));
            };
            if rows * cols < 3 || max_weight < 1 {
                return Err(fail(MALFORMED, "grid needs at least three nodes and positive weights"));
            }
            let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
            let (g, rot) = grid(rows, cols, &mut |_| rng.as_mut().map_or(1, |r| r.gen_range(1..=max_weight)));
            let n = rows * cols;
            let s2 = if cols > 1 { cols - 1 } else { 1 };
            InstanceFile::from_parts(&g, Some(&rot), Some(Terminals { s1: 0, s2, t: n - 1 }))
        }
        Family::RandomPlanar {
            nodes,
            edges,
            seed,
            max_weight,
        } => {
            if nodes < 3 || max_weight < 1 {
                return Err(fail(MALFORMED, "random-planar needs at least three nodes and positive weights"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = RandomPlanarParams {
                nodes,
                max_edges: edges,
                max_weight,
                ..Default::default()
            };
            let (g, rot) = random_planar(params, &mut rng);
            let terminals = random_terminals(g.node_count(), &mut rng);
            InstanceFile::from_parts(&g, Some(&rot), Some(terminals))
        }
        Family::Path { n } => {
            if n < 3 {
                return Err(fail(MALFORMED, "path needs at least three nodes"));
            }
            let (g, rot, terminals) = path_fixture(n);
            InstanceFile::from_parts(&g, Some(&rot), terminals)
        }
    };
    file.metadata.insert(
        "family".into(),
        json!(match family {
            Family::Grid { .. } => "grid",
            Family::RandomPlanar { .. } => "random-planar",
            Family::Path { .. } => "path",
        }),
    );
    Ok(file)
}

fn cmd_oracle(kind: OracleKind, path: &Path, limit: usize) -> Result<(), Failure> {
    let text = read(path)?;
    let out = match kind {
        OracleKind::SetCover => {
            let sc: SetCoverInstance = serde_json::from_str(&text).map_err(|e| fail(MALFORMED, e.to_string()))?;
            let (cover, weight) = oracle_set_cover(&sc)?;
            json!({"cover": cover, "weight": weight})
        }
        OracleKind::Lcsp => {
            let file = InstanceFile::parse(&text)?;
            let path = oracle_lcsp(&file.lcsp_query()?, limit.max(PATH_LIMIT))?.ok_or(Error::NoFeasiblePath)?;
            json!({"nodes": path.route.nodes, "edges": path.route.edges, "weight": path.route.weight.to_string()})
        }
        OracleKind::Cpmnc | OracleKind::Cpmec => {
            let file = InstanceFile::parse(&text)?;
            let graph = file.graph()?;
            let terminals = file.terminals()?;
            let cut = if kind == OracleKind::Cpmnc {
                oracle_cpmnc(&graph.perturb(PerturbMode::Nodes), terminals, limit)?
            } else {
                oracle_cpmec(&graph.perturb(PerturbMode::Edges), terminals, limit)?
            }
            .ok_or(Error::Infeasible)?;
            json!({"elements": cut.elements, "value": cut.value.to_string(), "source_side": cut.source_side})
        }
    };
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn cmd_import(path: &Path, terminals: Terminals) -> Result<(), Failure> {
    let graph = read_dimacs(&read(path)?)?;
    graph.check_terminals(terminals.s1, terminals.s2, terminals.t)?;
    println!("{}", InstanceFile::from_parts(&graph, None, Some(terminals)).to_json());
    Ok(())
}

fn finish(outcome: Result<(), Failure>) -> u8 {
    match outcome {
        Ok(()) => SOLVED,
        Err(f) => {
            eprintln!("{}", f.message);
            f.code
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Solve {
            solver,
            instances,
            oracle,
            jobs,
            output,
            unsafe_nonplanar,
        } => cmd_solve(*solver, instances, *oracle, *jobs, output.as_deref(), *unsafe_nonplanar),
        Command::Reduce {
            set_cover,
            output,
            unit_weight,
            bipartite,
            linked,
        } => finish(cmd_reduce(set_cover, output, *unit_weight, *bipartite, *linked)),
        Command::Verify { instance, result } => finish(cmd_verify(instance, result)),
        Command::Gen { family, output } => finish(cmd_gen(family).and_then(|f| write_or_print(output.as_deref(), &f.to_json()))),
        Command::Oracle { kind, file, limit } => finish(cmd_oracle(*kind, file, *limit)),
        Command::ImportDimacs { file, s1, s2, t } => finish(cmd_import(file, Terminals { s1: *s1, s2: *s2, t: *t })),
    };
    ExitCode::from(code)
}
