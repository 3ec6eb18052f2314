//! `flv` — verify heap-manipulating programs annotated with FL or SL-FL
//! contracts.
//!
//! Exit codes: 0 all proved; 1 some unknown; 2 input error; 3 solver error.

use clap::{Args, Parser, Subcommand};
use flv::ast::LogicMode;
use flv::oracle::opsem::ExecCtx;
use flv::oracle::triples::{check_triple_bruteforce, TripleKind, TripleSpec, TripleVerdict};
use flv::pipeline::{run_bench, run_verify, PipelineOptions};
use flv::prover::InstantiationPolicy;
use flv::vcgen::VcOptions;
use std::path::PathBuf;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "flv", about = "Frame Logic verifier", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// treat the input as SL-FL and translate to FL first
    #[arg(long)]
    slfl: bool,
    /// disable the SL-FL translation-size optimizations
    #[arg(long)]
    no_slfl_opt: bool,
    /// instantiation start depth increment per round
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// instantiation round cap
    #[arg(long, default_value_t = 3)]
    rounds: usize,
    /// external SMT solver command (default: z3, or the bundled wasm z3)
    #[arg(long)]
    solver_cmd: Option<String>,
    /// per-query solver timeout in seconds
    #[arg(long, default_value_t = 30)]
    timeout: u64,
    /// obligations proved concurrently (each owns a solver process)
    #[arg(long, default_value_t = 2)]
    jobs: usize,
    /// persist SMT scripts under this directory
    #[arg(long)]
    emit_smt: Option<PathBuf>,
    /// write generated FL VCs under this directory
    #[arg(long)]
    dump_vcs: Option<PathBuf>,
    /// write FORD translations under this directory
    #[arg(long)]
    dump_ford: Option<PathBuf>,
    /// introduce frame rules only at key points (on by default;
    /// --frame-at-keypoints=off switches to per-statement generation)
    #[arg(long, value_parser = parse_on_off, default_value = "on")]
    frame_at_keypoints: bool,
    /// run brute-force oracle cross-checks at this bound (<= 4)
    #[arg(long)]
    oracle_bound: Option<usize>,
    /// also print the machine-readable JSON report
    #[arg(long)]
    json: bool,
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        other => Err(format!("expected on/off, got {other}")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify one annotated module
    Verify {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Verify every .flv file in a directory and print a summary table
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Brute-force oracle: check every method triple on small models and
    /// print counterexample configurations (one line per location)
    Oracle {
        file: PathBuf,
        /// maximum universe size
        #[arg(long, default_value_t = 3)]
        bound: usize,
        /// treat the input as SL-FL
        #[arg(long)]
        slfl: bool,
    },
}

fn to_pipeline_options(o: &CommonOpts) -> PipelineOptions {
    PipelineOptions {
        mode_override: if o.slfl { Some(LogicMode::Slfl) } else { None },
        jobs: o.jobs,
        slfl_opt: !o.no_slfl_opt,
        vc: VcOptions {
            frame_at_keypoints: o.frame_at_keypoints,
        },
        policy: InstantiationPolicy {
            max_rounds: o.rounds,
            depth_increment: o.depth,
            timeout: Duration::from_secs(o.timeout),
            ..InstantiationPolicy::default()
        },
        solver: o.solver_cmd.clone(),
        emit_smt: o.emit_smt.clone(),
        dump_vcs: o.dump_vcs.clone(),
        dump_ford: o.dump_ford.clone(),
        oracle_bound: o.oracle_bound,
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify { file, opts } => {
            let popts = to_pipeline_options(&opts);
            match run_verify(&file, &popts) {
                Ok(report) => {
                    print!("{}", report.render_text());
                    if opts.json {
                        println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    }
                    report.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Command::Bench { dir, opts } => {
            let popts = to_pipeline_options(&opts);
            match run_bench(&dir, &popts) {
                Ok(bench) => {
                    println!(
                        "{:<28} {:>6} {:>7} {:>9} {:>9}  verdict",
                        "benchmark", "blocks", "checks", "proved", "wall(ms)"
                    );
                    let mut worst = 0;
                    for row in &bench.rows {
                        println!(
                            "{:<28} {:>6} {:>7} {:>5}/{:<3} {:>9}  {}{}",
                            row.file,
                            row.basic_blocks,
                            row.permission_checks,
                            row.proved,
                            row.total,
                            row.wall_ms,
                            row.verdict,
                            row.error
                                .as_ref()
                                .map(|e| format!(" ({e})"))
                                .unwrap_or_default()
                        );
                        let code = match row.verdict.as_str() {
                            "proved" => 0,
                            "unknown" => 1,
                            "error" => 2,
                            _ => 3,
                        };
                        worst = worst.max(code);
                    }
                    if opts.json {
                        println!("{}", serde_json::to_string_pretty(&bench).unwrap());
                    }
                    worst
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Command::Oracle { file, bound, slfl } => run_oracle(&file, bound, slfl),
    };
    std::process::exit(code);
}

/// Debug subcommand: brute-force every method's Exact triple and print
/// counterexample models in a line-per-location format.
fn run_oracle(file: &PathBuf, bound: usize, slfl: bool) -> i32 {
    let opts = PipelineOptions {
        mode_override: if slfl { Some(LogicMode::Slfl) } else { None },
        ..PipelineOptions::default()
    };
    let source = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let prepared = match flv::pipeline::prepare(&source, &opts) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let module = &prepared.module;
    let ptr_fields: Vec<String> = module.signature.pointer_fields().cloned().collect();
    let data_fields: Vec<String> = module.signature.data_fields().cloned().collect();
    let enum_cfg = flv::oracle::EnumCfg::new(
        bound,
        &ptr_fields.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        &data_fields.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
    );
    let mut worst = 0;
    for method in &module.methods {
        let pre = match &method.pre {
            flv::ast::Spec::Fl(f) => f.clone(),
            _ => continue,
        };
        let post = match &method.post {
            flv::ast::Spec::Fl(f) => f.clone(),
            _ => continue,
        };
        let blocks = flv::vcgen::blocks::basic_blocks(&method.body);
        let var_sorts = flv::parser::method_var_sorts(method, module);
        for (i, block) in blocks.iter().enumerate() {
            let exec =
                ExecCtx::new(module.methods.iter(), &module.fl_defs, bound).modular();
            let triple = TripleSpec {
                pre: &pre,
                stmts: &block.stmts,
                post: &post,
                kind: TripleKind::Exact,
            };
            let verdict = check_triple_bruteforce(
                &triple,
                &module.fl_defs,
                &exec,
                &enum_cfg,
                &var_sorts,
            );
            match verdict {
                TripleVerdict::Valid => {
                    println!("{} block {i}: valid at bound {bound}", method.name);
                }
                TripleVerdict::UnknownAtBound => {
                    println!("{} block {i}: unknown at bound {bound}", method.name);
                }
                TripleVerdict::Counterexample { config, reason } => {
                    println!("{} block {i}: COUNTEREXAMPLE ({reason})", method.name);
                    print!("{}", config.model.render(&config.alloc));
                    let store: Vec<String> = config
                        .store
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect();
                    println!("store: {}", store.join(" "));
                    worst = worst.max(1);
                }
            }
        }
    }
    worst
}
