//! External solver orchestration: SMT-LIB2 text over a child process's
//! standard input/output, with per-query timeouts.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverCmd {
    pub program: String,
    pub args: Vec<String>,
}

impl SolverCmd {
    pub fn parse(spec: &str) -> SolverCmd {
        let mut parts = spec.split_whitespace().map(|s| s.to_string());
        let program = parts.next().unwrap_or_else(|| "z3".to_string());
        SolverCmd {
            program,
            args: parts.collect(),
        }
    }

    pub fn display(&self) -> String {
        let mut s = self.program.clone();
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverAnswer {
    Unsat,
    Sat(String),
    Unknown(String),
    TimedOut,
    Error(String),
}

fn which(program: &str) -> bool {
    if let Ok(path) = std::env::var("PATH") {
        for dir in std::env::split_paths(&path) {
            if dir.join(program).is_file() {
                return true;
            }
        }
    }
    false
}

fn candidate_tool_dirs() -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Ok(root) = std::env::var("FLV_REPO_ROOT") {
        out.push(PathBuf::from(root).join("tools"));
    }
    // compile-time crate dir: <repo>/crates/flv
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    if let Some(repo) = manifest.parent().and_then(|p| p.parent()) {
        out.push(repo.join("tools"));
    }
    if let Ok(cwd) = std::env::current_dir() {
        out.push(cwd.join("tools"));
    }
    if let Ok(exe) = std::env::current_exe() {
        let mut p = exe;
        for _ in 0..4 {
            if let Some(parent) = p.parent() {
                p = parent.to_path_buf();
                out.push(p.join("tools"));
            }
        }
    }
    out
}

fn ensure_node_modules(tools: &Path) {
    if tools.join("node_modules").join("z3-solver").exists() {
        return;
    }
    eprintln!(
        "[flv] installing the bundled wasm solver (npm install in {})...",
        tools.display()
    );
    let _ = Command::new("npm")
        .arg("install")
        .arg("--no-audit")
        .arg("--no-fund")
        .current_dir(tools)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status();
}

/// Resolve the solver command: `FLV_SOLVER` env, a `z3` binary on PATH,
/// or the bundled node/wasm wrapper.
pub fn default_solver() -> SolverCmd {
    static SOLVER: OnceLock<SolverCmd> = OnceLock::new();
    SOLVER
        .get_or_init(|| {
            if let Ok(spec) = std::env::var("FLV_SOLVER") {
                if !spec.trim().is_empty() {
                    return SolverCmd::parse(&spec);
                }
            }
            if which("z3") {
                return SolverCmd {
                    program: "z3".to_string(),
                    args: vec!["-in".to_string(), "-smt2".to_string()],
                };
            }
            for dir in candidate_tool_dirs() {
                let script = dir.join("z3smt.mjs");
                if script.is_file() {
                    ensure_node_modules(&dir);
                    return SolverCmd {
                        program: "node".to_string(),
                        args: vec![script.to_string_lossy().to_string()],
                    };
                }
            }
            // last resort: assume z3 appears on PATH at run time
            SolverCmd {
                program: "z3".to_string(),
                args: vec!["-in".to_string(), "-smt2".to_string()],
            }
        })
        .clone()
}

/// Run one script through a fresh solver process.
pub fn run_solver(cmd: &SolverCmd, script: &str, timeout: Duration) -> SolverAnswer {
    let started = Instant::now();
    let mut child = match Command::new(&cmd.program)
        .args(&cmd.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return SolverAnswer::Error(format!("failed to launch {}: {e}", cmd.program)),
    };
    if let Some(mut stdin) = child.stdin.take() {
        if stdin.write_all(script.as_bytes()).is_err() {
            let _ = child.kill();
            return SolverAnswer::Error("failed to write script to solver stdin".into());
        }
        drop(stdin);
    }
    // poll with timeout
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {
                if started.elapsed() > timeout {
                    let _ = child.kill();
                    let _ = child.wait();
                    return SolverAnswer::TimedOut;
                }
                std::thread::sleep(Duration::from_millis(10));
            }
            Err(e) => return SolverAnswer::Error(format!("solver wait failed: {e}")),
        }
    }
    let output = match child.wait_with_output() {
        Ok(o) => o,
        Err(e) => return SolverAnswer::Error(format!("failed to read solver output: {e}")),
    };
    let stdout = String::from_utf8_lossy(&output.stdout).to_string();
    let stderr = String::from_utf8_lossy(&output.stderr).to_string();
    parse_answer(&stdout, &stderr)
}

fn parse_answer(stdout: &str, stderr: &str) -> SolverAnswer {
    for line in stdout.lines() {
        let line = line.trim();
        match line {
            "unsat" => return SolverAnswer::Unsat,
            "sat" => return SolverAnswer::Sat(stdout.to_string()),
            "unknown" => return SolverAnswer::Unknown(stdout.to_string()),
            _ => {}
        }
    }
    SolverAnswer::Error(format!(
        "no verdict in solver output; stdout: {} stderr: {}",
        truncate(stdout, 400),
        truncate(stderr, 400)
    ))
}

fn truncate(s: &str, n: usize) -> String {
    if s.len() <= n {
        s.to_string()
    } else {
        format!("{}…", &s[..n])
    }
}

/// Extract a compact hint from a sat model: foreground universe size plus
/// the first few lines. Sat models do not disambiguate between
/// insufficient instantiation, non-lfp models, and genuine bugs; they are
/// surfaced as hints only.
pub fn model_summary(model: &str) -> String {
    let mut universe = 0usize;
    for cap in model.split("Loc!val!").skip(1) {
        let digits: String = cap.chars().take_while(|c| c.is_ascii_digit()).collect();
        if let Ok(n) = digits.parse::<usize>() {
            universe = universe.max(n + 1);
        }
    }
    let head: String = model.lines().take(6).collect::<Vec<_>>().join(" ");
    format!(
        "universe size {universe}; model head: {}",
        truncate(&head, 300)
    )
}
