//! `luequiv`: classify states, decide LU/SLU equivalence, build witnesses
//! and replay the reference claims.
//!
//! Exit codes: 0 equivalent (or success), 1 inequivalent (or a failed
//! claim in `repro`), 2 undecided, 3 any other error, 64 dimension
//! mismatch, 65 non-orthogonal tuple.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use luequiv::classify::{classify, StateClassification};
use luequiv::equivalence::{decide_lu, decide_slu};
use luequiv::fixtures;
use luequiv::io::{load_manifest, load_operator, operator_to_json};
use luequiv::witness::{verify_witness, witness_from_eigenspace, witness_from_state_top, WitnessCandidate};
use luequiv::{BipartiteOperator, EquivalenceVerdict, Error, Options};

mod repro;

const EXIT_ERROR: u8 = 3;
const EXIT_DIMENSION: u8 = 64;
const EXIT_NON_ORTHOGONAL: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "luequiv", version, about = "Local-unitary equivalence of bipartite operators")]
struct Cli {
    /// Master seed for every randomized search.
    #[arg(long, global = true, env = "LUEQUIV_SEED", default_value_t = 42)]
    seed: u64,
    /// Restarts for both the seesaw and the unitary search.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Residual at which a local unitary is accepted.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print the machine-readable report.
    #[arg(long, global = true)]
    json: bool,
    /// Include per-stage wall times (breaks byte-identical output).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// PPT status, eigenspace product content and extremal PT eigenvalues.
    Classify { input: String },
    /// Decide whether the first operator is an LU image of the second.
    LuTest { first: String, second: String },
    /// Decide simultaneous equivalence of two projector tuples.
    SluTest { manifest: String },
    /// Build or verify an entanglement witness.
    Witness {
        #[arg(long, value_enum, default_value_t = WitnessMode::Verify)]
        mode: WitnessMode,
        /// Eigenspace index for `--mode eigenspace`.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// One operator, or two states for `--mode top`.
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<String>,
    },
    /// Replay every reference claim and tabulate the results.
    Repro,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WitnessMode {
    Verify,
    Top,
    Eigenspace,
}

impl Cli {
    fn options(&self) -> Options {
        let mut opts = Options::default().with_seed(self.seed);
        if let Some(r) = self.restarts {
            opts.seesaw.restarts = r;
            opts.search.restarts = r;
        }
        if let Some(t) = self.tol {
            opts.accept_tol = t;
        }
        opts
    }
}

/// Stage timer; times are only reported with `--timings`.
struct Timings(Vec<(String, u128)>);

impl Timings {
    fn run<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.push((stage.to_string(), t.elapsed().as_millis()));
        out
    }
}

struct Outcome {
    output: Value,
    text: String,
    code: u8,
}

fn load(input: &str) -> luequiv::Result<BipartiteOperator> {
    match fixtures::fixture(input) {
        Some(op) => Ok(op),
        None => load_operator(Path::new(input)),
    }
}

fn load_tuples(input: &str) -> luequiv::Result<(Vec<BipartiteOperator>, Vec<BipartiteOperator>)> {
    match fixtures::manifest(input) {
        Some(pair) => Ok(pair),
        None => load_manifest(Path::new(input)),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::DimensionMismatch { .. } => EXIT_DIMENSION,
        Error::NonOrthogonalTuple { .. } => EXIT_NON_ORTHOGONAL,
        _ => EXIT_ERROR,
    }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn verdict_text(v: &EquivalenceVerdict) -> String {
    match v {
        EquivalenceVerdict::Equivalent { residual, .. } => format!("equivalent (residual {residual:.3e})"),
        EquivalenceVerdict::Inequivalent { certificate } => {
            format!("inequivalent: {}", serde_json::to_string(certificate).expect("serializable"))
        }
        EquivalenceVerdict::Undecided { best_residual, .. } => {
            format!("undecided (best residual {best_residual:.3e})")
        }
    }
}

fn classification_text(c: &StateClassification) -> String {
    let mut s = String::new();
    s.push_str(&format!("trace        {:.6}\n", c.trace));
    s.push_str(&format!(
        "PT status    {}{}\n",
        if c.is_ppt { "PPT" } else { "NPT" },
        if c.ppt_boundary { " (boundary)" } else { "" }
    ));
    s.push_str(&format!("PT spectrum  {}\n", fmt_list(&c.pt_spectrum)));
    s.push_str(&format!("D_lambda     {:?}\n", c.d_lambda));
    s.push_str(&format!("D_lambda_bar {:?}\n", c.d_lambda_bar));
    s.push_str(&format!("extremal PT  {:?}\n", c.extremal));
    s.push_str(&format!("separable    {}\n", if c.separable_certified { "certified" } else { "not certified" }));
    s.push_str(&format!("PPT-entangled candidate {}\n", c.ppt_entangled_candidate));
    for (j, e) in c.eigenspaces.iter().enumerate() {
        s.push_str(&format!(
            "  eigenspace {j}: value {:.6}, dim {}, product {:?}, spanning {:?}\n",
            e.eigenvalue, e.dimension, e.product_content, e.spanning
        ));
    }
    s
}

fn candidate_json(c: &WitnessCandidate) -> Value {
    json!({
        "status": c.status,
        "min_eigenvalue": c.min_eigenvalue,
        "min_product_value": c.min_product_value,
        "violating": c.violating,
        "operator": operator_to_json(&c.op),
    })
}

fn candidate_text(label: &str, c: &WitnessCandidate) -> String {
    format!(
        "{label}: {:?} (min eigenvalue {:.6}, min product value {:.6})\n",
        c.status, c.min_eigenvalue, c.min_product_value
    )
}

fn run(cli: &Cli, timings: &mut Timings) -> luequiv::Result<Outcome> {
    let opts = cli.options();
    match &cli.command {
        Command::Classify { input } => {
            let rho = timings.run("load", || load(input))?;
            let c = timings.run("classify", || classify(&rho, &opts))?;
            Ok(Outcome {
                text: classification_text(&c),
                output: serde_json::to_value(&c)?,
                code: 0,
            })
        }
        Command::LuTest { first, second } => {
            let h = timings.run("load", || load(first))?;
            let k = load(second)?;
            let v = timings.run("decide", || decide_lu(&h, &k, &opts))?;
            Ok(Outcome {
                text: verdict_text(&v) + "\n",
                output: serde_json::to_value(&v)?,
                code: v.exit_code() as u8,
            })
        }
        Command::SluTest { manifest } => {
            let (p, q) = timings.run("load", || load_tuples(manifest))?;
            let v = timings.run("decide", || decide_slu(&p, &q, &opts))?;
            Ok(Outcome {
                text: verdict_text(&v) + "\n",
                output: serde_json::to_value(&v)?,
                code: v.exit_code() as u8,
            })
        }
        Command::Witness { mode, index, inputs } => {
            let ops: Vec<BipartiteOperator> = timings.run("load", || inputs.iter().map(|s| load(s)).collect::<luequiv::Result<_>>())?;
            match mode {
                WitnessMode::Verify => {
                    let c = timings.run("verify", || verify_witness(&ops[0], &opts));
                    Ok(Outcome {
                        text: candidate_text("witness", &c),
                        output: candidate_json(&c),
                        code: 0,
                    })
                }
                WitnessMode::Top => {
                    let second = ops.get(1).unwrap_or(&ops[0]);
                    let t = timings.run("construct", || witness_from_state_top(&ops[0], second, &opts))?;
                    Ok(Outcome {
                        text: format!("mu = {:.6}\n", t.mu)
                            + &candidate_text("W1", &t.w1)
                            + &candidate_text("W2", &t.w2),
                        output: json!({"mu": t.mu, "w1": candidate_json(&t.w1), "w2": candidate_json(&t.w2)}),
                        code: 0,
                    })
                }
                WitnessMode::Eigenspace => {
                    let e = timings.run("construct", || witness_from_eigenspace(&ops[0], *index, &opts))?;
                    Ok(Outcome {
                        text: format!("mu = {:.6}, p_max = {:.6}, p_min = {:.6}\n", e.mu, e.p_max, e.p_min)
                            + &candidate_text("W", &e.w),
                        output: json!({"mu": e.mu, "p_max": e.p_max, "p_min": e.p_min, "w": candidate_json(&e.w)}),
                        code: 0,
                    })
                }
            }
        }
        Command::Repro => {
            let report = timings.run("repro", || repro::run(&opts))?;
            Ok(Outcome {
                text: report.table(),
                code: if report.all_pass() { 0 } else { 1 },
                output: serde_json::to_value(&report)?,
            })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::LuTest { .. } => "lu-test",
        Command::SluTest { .. } => "slu-test",
        Command::Witness { .. } => "witness",
        Command::Repro => "repro",
    }
}

fn inputs_of(c: &Command) -> Vec<String> {
    match c {
        Command::Classify { input } => vec![input.clone()],
        Command::LuTest { first, second } => vec![first.clone(), second.clone()],
        Command::SluTest { manifest } => vec![manifest.clone()],
        Command::Witness { inputs, .. } => inputs.clone(),
        Command::Repro => Vec::new(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut timings = Timings(Vec::new());
    let outcome = run(&cli, &mut timings);
    let name = command_name(&cli.command);
    match outcome {
        Ok(out) => {
            if cli.json {
                let mut report = json!({
                    "command": name,
                    "inputs": inputs_of(&cli.command),
                    "seed": cli.seed,
                    "output": out.output,
                });
                if cli.timings {
                    let t: serde_json::Map<String, Value> =
                        timings.0.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                    report["timings_ms"] = Value::Object(t);
                }
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                println!("luequiv {name} (seed {})", cli.seed);
                print!("{}", out.text);
                if cli.timings {
                    for (k, v) in &timings.0 {
                        println!("  {k}: {v} ms");
                    }
                }
            }
            ExitCode::from(out.code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
