//! External SMT solver process: send a script on stdin, read the verdict
//! and model from stdout, and decode models back into runs.
//!
//! The command defaults to `z3 -in -smt2`; the `NUCHECK_SOLVER` environment
//! variable replaces it with a whitespace-separated command line.

pub mod sexpr;

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::encoder::names;
use crate::net::{Firing, Ident, Marking, Mode, Multiset, NuNet, Trace, TraceError};
use sexpr::{parse_all, Sexp};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::from_env()
    }
}

impl SolverConfig {
    /// `NUCHECK_SOLVER` if set and non-empty, else `z3 -in -smt2`.
    pub fn from_env() -> Self {
        let cmd = std::env::var("NUCHECK_SOLVER")
            .ok()
            .filter(|s| !s.trim().is_empty());
        Self::from_command(cmd.as_deref().unwrap_or("z3 -in -smt2"))
    }

    pub fn from_command(cmd: &str) -> Self {
        let mut words = cmd.split_whitespace().map(str::to_string);
        SolverConfig {
            program: words.next().unwrap_or_default(),
            args: words.collect(),
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

/// Constant name to value.
pub type Model = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Sat(Model),
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOutcome {
    pub status: Status,
    pub elapsed: Duration,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot start solver `{program}`: {source}")]
    Spawn {
        program: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver timed out after {0:?}")]
    Timeout(Duration),
    #[error("solver exited with {code:?} without a verdict: {stderr}")]
    Crash { code: Option<i32>, stderr: String },
    #[error("unreadable solver output: {0}")]
    Parse(String),
    #[error("i/o error talking to the solver: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs `script` and returns the verdict, with the model when satisfiable.
///
/// A non-zero exit code is ignored once a verdict line has been read (some
/// solvers exit non-zero when `(get-model)` follows `unsat`).
pub fn run_solver(script: &str, cfg: &SolverConfig) -> Result<SolverOutcome, SolverError> {
    let start = Instant::now();
    let mut child = Command::new(&cfg.program)
        .args(&cfg.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolverError::Spawn {
            program: cfg.program.clone(),
            source,
        })?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let input = script.to_string();
    let writer = thread::spawn(move || {
        // A solver that exits early closes the pipe; that is not an error here.
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let exit = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if start.elapsed() > cfg.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(SolverError::Timeout(cfg.timeout));
        }
        thread::sleep(Duration::from_millis(2));
    };
    let _ = writer.join();
    let out = out_reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    let elapsed = start.elapsed();
    match parse_output(&out) {
        Ok(status) => Ok(SolverOutcome { status, elapsed }),
        Err(e) if exit.success() => Err(e),
        Err(_) => Err(SolverError::Crash {
            code: exit.code(),
            stderr: if err.trim().is_empty() { out } else { err },
        }),
    }
}

/// Reads the verdict line and, for `sat`, the model that follows it.
pub fn parse_output(out: &str) -> Result<Status, SolverError> {
    let exprs = parse_all(out).map_err(|e| SolverError::Parse(e.to_string()))?;
    let mut it = exprs.iter();
    let verdict = loop {
        match it.next() {
            None => return Err(SolverError::Parse("no verdict in solver output".into())),
            Some(Sexp::Atom(a)) if matches!(a.as_str(), "sat" | "unsat" | "unknown") => {
                break a.as_str()
            }
            // `success` from option echoes and similar chatter.
            Some(Sexp::Atom(_)) => {}
            Some(other) => {
                return Err(SolverError::Parse(format!(
                    "unexpected `{other}` before the verdict"
                )))
            }
        }
    };
    match verdict {
        "unsat" => Ok(Status::Unsat),
        "unknown" => Ok(Status::Unknown),
        _ => {
            let model = it
                .next()
                .ok_or_else(|| SolverError::Parse("`sat` without a model".into()))?;
            parse_model(model).map(Status::Sat)
        }
    }
}

/// Accepts `(model (define-fun ...) ...)` or a bare list of `define-fun`s.
pub fn parse_model(e: &Sexp) -> Result<Model, SolverError> {
    let bad = |what: &str| SolverError::Parse(format!("{what} in model `{e}`"));
    let mut items = e.list().ok_or_else(|| bad("expected a list"))?;
    if items.first().and_then(Sexp::atom) == Some("model") {
        items = &items[1..];
    }
    if items.first().and_then(Sexp::atom) == Some("error") {
        return Err(bad("solver error"));
    }
    let mut model = Model::new();
    for item in items {
        let xs = item.list().ok_or_else(|| bad("non-list entry"))?;
        match xs {
            [Sexp::Atom(head), Sexp::Atom(name), Sexp::List(params), sort, value]
                if head == "define-fun" =>
            {
                if !params.is_empty() {
                    continue;
                }
                let v = match (sort.atom(), value) {
                    (Some("Bool"), Sexp::Atom(b)) if b == "true" => Value::Bool(true),
                    (Some("Bool"), Sexp::Atom(b)) if b == "false" => Value::Bool(false),
                    (Some("Int"), v) => Value::Int(parse_int(v).ok_or_else(|| bad("bad integer"))?),
                    // Auxiliary definitions of other sorts are irrelevant.
                    _ => continue,
                };
                model.insert(name.clone(), v);
            }
            _ => return Err(bad("unexpected entry")),
        }
    }
    Ok(model)
}

fn parse_int(v: &Sexp) -> Option<i64> {
    match v {
        Sexp::Atom(a) => a.parse().ok(),
        Sexp::List(xs) => match xs.as_slice() {
            [Sexp::Atom(m), x] if m == "-" => parse_int(x).map(|n| -n),
            _ => None,
        },
        Sexp::Str(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("step {step}: {count} transitions fire at once")]
    SimultaneousFirings { step: usize, count: usize },
    #[error("step {step}: variable `{var}` of `{transition}` is bound to {count} identifiers")]
    ModeNotFunctional {
        step: usize,
        transition: String,
        var: String,
        count: usize,
    },
    #[error("model selects {0} run shapes")]
    Shape(usize),
    #[error("decoded run is invalid: {0}")]
    Invalid(#[from] TraceError),
}

fn truth(model: &Model, name: &str) -> bool {
    // Constants the solver left out are unconstrained; read them as false.
    matches!(model.get(name), Some(Value::Bool(true)))
}

/// Rebuilds the run encoded by a model of an encoding of `net` at `(λ, κ)`
/// and validates it.
pub fn extract_trace(
    net: &NuNet,
    lambda: usize,
    kappa: u32,
    model: &Model,
) -> Result<Trace, DecodeError> {
    let mut markings = Vec::new();
    for i in 0..=lambda {
        let mut places = Vec::new();
        for p in net.places() {
            let mut ms = Multiset::new();
            for j in 0..kappa {
                if truth(model, &names::occ(&p.id, j, i)) {
                    ms.insert(j, 1);
                }
            }
            places.push(ms);
        }
        markings.push(Marking(places));
    }
    let mut fired = Vec::new();
    for s in 0..lambda {
        let firing: Vec<usize> = (0..net.transitions().len())
            .filter(|&t| truth(model, &names::fire(&net.transitions()[t], s)))
            .collect();
        match firing.as_slice() {
            [] => fired.push(None),
            &[t] => {
                let name = &net.transitions()[t];
                let mut mode = Mode::new();
                for v in net.vars(t) {
                    let ids: Vec<Ident> = (0..kappa)
                        .filter(|&j| truth(model, &names::sel(name, v.label(), j, s)))
                        .collect();
                    if ids.len() != 1 {
                        return Err(DecodeError::ModeNotFunctional {
                            step: s,
                            transition: name.clone(),
                            var: v.label().to_string(),
                            count: ids.len(),
                        });
                    }
                    mode.0.insert(v, ids[0]);
                }
                fired.push(Some(Firing {
                    transition: t,
                    mode,
                }));
            }
            many => {
                return Err(DecodeError::SimultaneousFirings {
                    step: s,
                    count: many.len(),
                })
            }
        }
    }
    let loops: Vec<usize> = (0..=lambda)
        .filter(|&l| truth(model, &names::loopsel(l)))
        .collect();
    let noloop = truth(model, names::NOLOOP);
    let loop_start = match (noloop, loops.as_slice()) {
        (true, []) => None,
        (false, &[l]) => Some(l),
        _ => return Err(DecodeError::Shape(loops.len() + noloop as usize)),
    };
    let trace = Trace {
        markings,
        fired,
        loop_start,
    };
    trace.validate(net, Some(kappa))?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_and_models() {
        assert_eq!(
            parse_output("unsat\n(error \"model is not available\")\n").unwrap(),
            Status::Unsat
        );
        assert_eq!(parse_output("unknown\n").unwrap(), Status::Unknown);
        let out = "sat\n(\n  (define-fun a () Bool true)\n  (define-fun |p_x:y_1_0| () Bool false)\n  (define-fun n () Int (- 3))\n)\n";
        let Status::Sat(m) = parse_output(out).unwrap() else {
            panic!()
        };
        assert_eq!(m["a"], Value::Bool(true));
        assert_eq!(m["p_x:y_1_0"], Value::Bool(false));
        assert_eq!(m["n"], Value::Int(-3));
        let old = "sat\n(model (define-fun b () Bool false) (define-fun f ((x Int)) Int x))";
        let Status::Sat(m) = parse_output(old).unwrap() else {
            panic!()
        };
        assert_eq!(m.len(), 1);
        assert!(parse_output("").is_err());
        assert!(parse_output("sat\n").is_err());
    }

    #[test]
    fn command_override() {
        let c = SolverConfig::from_command("cvc5 --lang smt2  --produce-models");
        assert_eq!(c.program, "cvc5");
        assert_eq!(c.args, ["--lang", "smt2", "--produce-models"]);
    }

    #[test]
    fn missing_program_is_a_spawn_error() {
        let cfg = SolverConfig::from_command("/nonexistent/solver-binary");
        assert!(matches!(
            run_solver("(check-sat)", &cfg),
            Err(SolverError::Spawn { .. })
        ));
    }

    #[test]
    fn timeout_kills_the_process() {
        let cfg = SolverConfig::from_command("sleep 5").with_timeout(Duration::from_millis(100));
        let t = Instant::now();
        assert!(matches!(run_solver("", &cfg), Err(SolverError::Timeout(_))));
        assert!(t.elapsed() < Duration::from_secs(3));
    }
}
