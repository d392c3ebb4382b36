use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use onecross::decompose::{decompose, DecomposeConfig};
use onecross::engine::{find_max_flow_with, find_min_weight_pm_with, find_perfect_matching_with, EngineConfig};
use onecross::generators::{random_in_family, Family, GenSpec};
use onecross::graph::{parse_dimacs_max_flow, parse_edge_list, write_edge_list, Graph};
use onecross::heavy_path::heavy_path_decomposition;
use onecross::mimic::{matching_pattern, network_line, search_mimicking_network, MatchingPattern};
use onecross::oracle::{oracle_max_flow, oracle_min_weight_pm, oracle_perfect_matching_or_blossom, MAX_EXHAUSTIVE};
use onecross::solve::weighted::min_weight_perfect_matching;
use onecross::{Error, TerminalSet};

#[derive(Parser, Debug)]
#[command(name = "onecross", version, about = "Matchings and flows in one-crossing-minor-free graphs")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for `gen` and `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write a JSON run report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Recompute the answer with a reference solver and compare.
    #[arg(long, global = true)]
    oracle_check: bool,
    /// Append the witness log to the output.
    #[arg(long, global = true)]
    dump_witness: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the clique-sum decomposition tree.
    Decompose {
        input: PathBuf,
        /// Also print the heavy-path decomposition.
        #[arg(long)]
        heavy: bool,
    },
    /// Find a perfect matching.
    Match { input: PathBuf },
    /// Find a minimum-weight perfect matching.
    Wmatch { input: PathBuf },
    /// Maximum st-flow (edge list with capacities, or DIMACS).
    Maxflow {
        input: PathBuf,
        #[arg(short)]
        s: Option<usize>,
        #[arg(short)]
        t: Option<usize>,
        /// Print the final flow mimick of every path.
        #[arg(long)]
        dump_mimicks: bool,
    },
    /// Matching pattern of a graph with respect to a terminal list.
    Pattern {
        input: PathBuf,
        /// Comma-separated terminal ids.
        #[arg(long, value_delimiter = ',')]
        terminals: Vec<usize>,
    },
    /// Search for a mimicking network realizing a pattern.
    MimickSearch {
        /// Terminal count.
        #[arg(short, long)]
        k: usize,
        /// Comma-separated subset bitmasks.
        #[arg(long, value_delimiter = ',')]
        pattern: Vec<u32>,
        #[arg(long, default_value_t = 7)]
        max_size: usize,
    },
    /// Generate a random instance as an edge list.
    Gen(GenArgs),
    /// Run the engine and a reference solver side by side.
    Verify {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Mode::Match)]
        mode: Mode,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Plant a perfect matching.
    #[arg(long)]
    plant: bool,
    /// Weight range `lo,hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    weights: Option<(i64, i64)>,
    /// Capacity range `lo,hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    capacities: Option<(i64, i64)>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Match,
    Wmatch,
    Flow,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Serialize, Default)]
struct RunReport {
    command: String,
    input_sha256: Option<String>,
    status: String,
    exit_code: u8,
    timings_ms: Vec<(String, f64)>,
    witness_size: usize,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::NotInFamily(_)) { 3 } else { 1 };
        Failure { code, msg: e.to_string() }
    }
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into() }
}

struct Ctx {
    report: RunReport,
    clock: Instant,
}

impl Ctx {
    fn lap(&mut self, stage: &str) {
        let ms = self.clock.elapsed().as_secs_f64() * 1e3;
        self.report.timings_ms.push((stage.to_string(), ms));
        self.clock = Instant::now();
    }

    fn read(&mut self, path: &PathBuf) -> Result<String, Failure> {
        let mut text = String::new();
        if path.as_os_str() == "-" {
            std::io::stdin().read_to_string(&mut text).map_err(|e| fail(1, format!("stdin: {e}")))?;
        } else {
            text = std::fs::read_to_string(path).map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
        }
        self.report.input_sha256 = Some(hex(&Sha256::digest(text.as_bytes())));
        Ok(text)
    }

    fn graph(&mut self, path: &PathBuf) -> Result<Graph, Failure> {
        let text = self.read(path)?;
        let g = parse_edge_list(&text)?.0;
        self.lap("parse");
        Ok(g)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut ctx = Ctx { report: RunReport::default(), clock: Instant::now() };
    ctx.report.command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let (code, out) = match run(&cli, &mut ctx) {
        Ok((code, status, out)) => {
            ctx.report.status = status;
            (code, out)
        }
        Err(f) => {
            eprintln!("onecross: {}", f.msg);
            ctx.report.status = f.msg;
            (f.code, String::new())
        }
    };
    print!("{out}");
    ctx.report.exit_code = code;
    if let Some(path) = &cli.report {
        let json = serde_json::to_string_pretty(&ctx.report).expect("report serializes");
        if let Err(e) = std::fs::write(path, json + "\n") {
            eprintln!("onecross: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}

type Outcome = Result<(u8, String, String), Failure>;

fn done(out: String) -> Outcome {
    Ok((0, "ok".into(), out))
}

fn run(cli: &Cli, ctx: &mut Ctx) -> Outcome {
    let cfg = EngineConfig::with_threads(cli.threads);
    match &cli.cmd {
        Cmd::Decompose { input, heavy } => {
            let g = ctx.graph(input)?;
            let tree = decompose(&g, &DecomposeConfig::default())?;
            ctx.lap("decompose");
            let mut out = tree.to_text();
            if *heavy {
                let hpd = heavy_path_decomposition(&tree.rooted());
                writeln!(out, "heavy paths={}", hpd.paths.len()).unwrap();
                for (p, nodes) in hpd.paths.iter().enumerate() {
                    let parent = hpd.parent_path[p].map_or("-".to_string(), |q| q.to_string());
                    let nodes: Vec<String> = nodes.iter().map(|x| x.to_string()).collect();
                    writeln!(out, "path {p} rank={} parent={parent} nodes={}", hpd.rank[p], nodes.join(" ")).unwrap();
                }
            }
            ctx.report.witness_size = tree.len();
            done(out)
        }
        Cmd::Match { input } => {
            let g = ctx.graph(input)?;
            let run = find_perfect_matching_with(&g, &cfg)?;
            ctx.lap("engine");
            ctx.report.witness_size = run.log.len();
            if cli.oracle_check {
                let oracle = oracle_perfect_matching_or_blossom(&g);
                ctx.lap("oracle");
                if oracle.is_some() != run.matching.is_some() {
                    return Err(fail(1, "oracle disagrees on existence of a perfect matching"));
                }
            }
            let mut out = String::new();
            let code = match &run.matching {
                Some(m) => {
                    for &e in m.edges() {
                        let (u, v) = g.endpoints(e);
                        writeln!(out, "{u} {v}").unwrap();
                    }
                    0
                }
                None => 2,
            };
            if cli.dump_witness {
                out.push_str(&run.log.to_text());
            }
            let status = if code == 0 { "ok" } else { "no perfect matching" };
            Ok((code, status.into(), out))
        }
        Cmd::Wmatch { input } => {
            let g = ctx.graph(input)?;
            let run = find_min_weight_pm_with(&g, &cfg)?;
            ctx.lap("engine");
            ctx.report.witness_size = run.log.len();
            if cli.oracle_check {
                let oracle = reference_min_weight(&g)?;
                ctx.lap("oracle");
                if oracle != run.weight {
                    return Err(fail(1, format!("oracle weight {oracle:?} differs from {:?}", run.weight)));
                }
            }
            let mut out = String::new();
            let code = match (&run.matching, run.weight) {
                (Some(m), Some(w)) => {
                    writeln!(out, "weight {w}").unwrap();
                    for &e in m.edges() {
                        let (u, v) = g.endpoints(e);
                        writeln!(out, "{u} {v} {}", g.weight(e)).unwrap();
                    }
                    0
                }
                _ => 2,
            };
            if cli.dump_witness {
                out.push_str(&run.log.to_text());
            }
            let status = if code == 0 { "ok" } else { "no perfect matching" };
            Ok((code, status.into(), out))
        }
        Cmd::Maxflow { input, s, t, dump_mimicks } => {
            let text = ctx.read(input)?;
            let is_dimacs = text.lines().any(|l| l.trim_start().starts_with("p max"));
            let (g, s, t) = if is_dimacs {
                let (g, ds, dt) = parse_dimacs_max_flow(&text)?;
                (g, s.unwrap_or(ds), t.unwrap_or(dt))
            } else {
                let g = parse_edge_list(&text)?.0;
                let (Some(s), Some(t)) = (*s, *t) else {
                    return Err(fail(1, "edge-list input needs -s and -t"));
                };
                (g, s, t)
            };
            ctx.lap("parse");
            let run = find_max_flow_with(&g, s, t, &cfg)?;
            ctx.lap("engine");
            ctx.report.witness_size = run.mimicks.len();
            if cli.oracle_check {
                let (value, _) = oracle_max_flow(&g, s, t)?;
                ctx.lap("oracle");
                if value != run.value {
                    return Err(fail(1, format!("oracle flow {value} differs from {}", run.value)));
                }
            }
            let mut out = String::new();
            writeln!(out, "value {}", run.value).unwrap();
            for (e, u, v) in g.edges() {
                writeln!(out, "{u} {v} {}", run.flows[e]).unwrap();
            }
            if *dump_mimicks || cli.dump_witness {
                for (p, m) in run.mimicks.iter().enumerate() {
                    writeln!(out, "mimick {p}: {m}").unwrap();
                }
            }
            done(out)
        }
        Cmd::Pattern { input, terminals } => {
            let g = ctx.graph(input)?;
            let ts = TerminalSet::new(&g, terminals.clone())?;
            let p = matching_pattern(&g, &ts);
            ctx.lap("pattern");
            let (canon, perm) = p.canonical();
            let masks: Vec<String> = p.subsets().iter().map(|x| x.to_string()).collect();
            let perm: Vec<String> = perm.iter().map(|x| x.to_string()).collect();
            let mut out = String::new();
            writeln!(out, "pattern {p}").unwrap();
            writeln!(out, "masks {}", masks.join(",")).unwrap();
            writeln!(out, "canonical {canon} perm {}", perm.join(",")).unwrap();
            done(out)
        }
        Cmd::MimickSearch { k, pattern, max_size } => {
            if *k > 6 || pattern.iter().any(|&x| x >> k != 0) {
                return Err(fail(1, "pattern subsets must be bitmasks over k <= 6 terminals"));
            }
            let p = MatchingPattern::new(*k, pattern.iter().copied());
            let net = search_mimicking_network(&p, *max_size)?;
            ctx.lap("search");
            done(network_line(&net) + "\n")
        }
        Cmd::Gen(a) => {
            let mut spec = GenSpec::new(a.n, a.family, cli.seed);
            spec.plant_pm = a.plant;
            spec.weights = a.weights;
            spec.capacities = a.capacities;
            let g = random_in_family(&spec);
            ctx.lap("generate");
            done(write_edge_list(&g))
        }
        Cmd::Verify { family, n, trials, mode } => {
            let mut agree = 0;
            let mut out = String::new();
            for i in 0..*trials {
                let seed = cli.seed.wrapping_add(i);
                let ok = verify_one(*family, *n, seed, *mode, &cfg)?;
                if ok {
                    agree += 1;
                } else {
                    writeln!(out, "seed {seed}: disagree").unwrap();
                }
            }
            ctx.lap("verify");
            writeln!(out, "{agree}/{trials} agree").unwrap();
            let code = if agree == *trials { 0 } else { 1 };
            Ok((code, if code == 0 { "ok" } else { "disagreement" }.into(), out))
        }
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let bad = || format!("expected lo,hi with lo <= hi, got {s:?}");
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi || lo.abs() > 1_000_000_000 || hi.abs() > 1_000_000_000 {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Exhaustive when small, weighted blossom otherwise.
fn reference_min_weight(g: &Graph) -> Result<Option<i64>, Failure> {
    if g.vertex_count() <= MAX_EXHAUSTIVE {
        Ok(oracle_min_weight_pm(g)?.map(|(w, _)| w))
    } else {
        Ok(min_weight_perfect_matching(g).map(|m| m.weight(g)))
    }
}

fn verify_one(family: Family, n: usize, seed: u64, mode: Mode, cfg: &EngineConfig) -> Result<bool, Failure> {
    let mut spec = GenSpec::new(n, family, seed);
    match mode {
        Mode::Match => spec.plant_pm = seed.is_multiple_of(2),
        Mode::Wmatch => spec = spec.planted().with_weights(-50, 50),
        Mode::Flow => spec = spec.with_capacities(0, 20),
    }
    let g = random_in_family(&spec);
    Ok(match mode {
        Mode::Match => {
            let run = find_perfect_matching_with(&g, cfg)?;
            let valid = run.matching.as_ref().is_none_or(|m| m.is_perfect(&g));
            valid && run.matching.is_some() == oracle_perfect_matching_or_blossom(&g).is_some()
        }
        Mode::Wmatch => {
            let run = find_min_weight_pm_with(&g, cfg)?;
            let valid = run.matching.as_ref().is_none_or(|m| m.is_perfect(&g) && Some(m.weight(&g)) == run.weight);
            valid && run.weight == reference_min_weight(&g)?
        }
        Mode::Flow => {
            let t = g.vertex_count().saturating_sub(1);
            let run = find_max_flow_with(&g, 0, t, cfg)?;
            run.value == oracle_max_flow(&g, 0, t)?.0
        }
    })
}
