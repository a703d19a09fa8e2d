use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use twinauth::overhead::tables::{self, TableSpec};
use twinauth::sim::{run_scenario, unknown_attack_profile, ScenarioScript, SimError};
use twinauth::verify::{self, CheckId, VerifyConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_PROTOCOL: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Parser)]
#[command(name = "twinauth", version, about = "Digital-twin-assisted 5G handover authentication")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Intra,
    Inter,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a handover scenario and write its transcript and cost ledger.
    Handover {
        /// Scenario file (TOML); a built-in scenario is used when absent.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Built-in scenario to run when no file is given.
        #[arg(long, value_enum, default_value = "intra")]
        builtin: Builtin,
        /// Run seed; defaults to the scenario's own seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Device count for built-in scenarios.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Freshness window in ms.
        #[arg(long = "delta-t")]
        delta_t: Option<u64>,
        /// Directory for transcript.jsonl and ledger.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the transcript (JSON lines) to stdout.
        #[arg(long)]
        print: bool,
    },
    /// Emit the overhead tables as CSV.
    Tables {
        /// Largest device count tabulated.
        #[arg(long, default_value_t = 20)]
        n: u64,
        #[arg(long, default_value = "tables")]
        out: PathBuf,
        /// Comma-separated attack probabilities for the unknown-attack sweep.
        #[arg(long = "sweep-pfail", value_delimiter = ',')]
        sweep_pfail: Option<Vec<f64>>,
        /// Seed of the simulation that measures the per-step costs.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the acceptance checks and print a JSON report.
    Verify {
        /// Comma-separated check names or numbers; all checks when absent.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Corrupt one observation of this check.
        #[arg(long)]
        fault: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

struct Failure(u8, String);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_CONFIG, e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(c) => Failure(EXIT_CONFIG, c.to_string()),
            SimError::Setup(s) => Failure(EXIT_PROTOCOL, s.to_string()),
        }
    }
}

fn config(msg: impl Into<String>) -> Failure {
    Failure(EXIT_CONFIG, msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Handover {
            scenario,
            builtin,
            seed,
            n,
            delta_t,
            out,
            print,
        } => handover(scenario.as_deref(), builtin, seed, n, delta_t, out.as_deref(), print),
        Cmd::Tables {
            n,
            out,
            sweep_pfail,
            seed,
        } => tables_cmd(n, &out, sweep_pfail, seed),
        Cmd::Verify { checks, fault, seed } => verify_cmd(checks, fault, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("twinauth: {msg}");
            ExitCode::from(code)
        }
    }
}

fn handover(
    scenario: Option<&Path>,
    builtin: Builtin,
    seed: Option<u64>,
    n: usize,
    delta_t: Option<u64>,
    out: Option<&Path>,
    print: bool,
) -> Result<(), Failure> {
    if n == 0 {
        return Err(config("--n must be at least 1"));
    }
    let mut script = match scenario {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
            ScenarioScript::from_toml(&text).map_err(|e| config(format!("{}: {e}", path.display())))?
        }
        None => match builtin {
            Builtin::Intra => ScenarioScript::intra_handover(n, seed.unwrap_or(1)),
            Builtin::Inter => ScenarioScript::inter_amf(n, seed.unwrap_or(1)),
        },
    };
    if let Some(dt) = delta_t {
        script.delta_t_ms = dt;
    }
    if let Some(s) = seed {
        script.seed = s;
    }
    let r = run_scenario(&script, script.seed)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("transcript.jsonl"), r.transcript.to_jsonl())?;
        let ledger = serde_json::to_string_pretty(&r.ledger.to_json()).expect("ledger serializes");
        fs::write(dir.join("ledger.json"), ledger + "\n")?;
    }
    if print {
        print!("{}", r.transcript.to_jsonl());
    }
    for (md, outcome) in &r.outcomes {
        println!("{md}: {}", outcome.as_str());
    }
    for rej in &r.rejections {
        println!(
            "rejected {} at {} ms by {}: {}",
            rej.message.unwrap_or("frame"),
            rej.at_ms,
            rej.entity,
            rej.reason
        );
    }
    println!("transcript {}", hex::encode(r.transcript_hash()));
    let failures = r.failures(&script);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure(EXIT_PROTOCOL, failures.join("; ")))
    }
}

fn tables_cmd(n: u64, out: &Path, sweep: Option<Vec<f64>>, seed: u64) -> Result<(), Failure> {
    if n == 0 {
        return Err(config("--n must be at least 1"));
    }
    let mut spec = TableSpec::new(n);
    if let Some(p) = sweep {
        if let Some(bad) = p.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(config(format!("p_fail must lie in [0, 1), got {bad}")));
        }
        spec.p_fail = p;
    }
    let steps = unknown_attack_profile(&ScenarioScript::intra_handover(1, seed), seed, 0)?;
    spec.ours_steps = Some(steps.iter().map(|b| (*b * n) as f64).collect());
    let files = tables::render(&spec).map_err(|e| config(e.to_string()))?;
    fs::create_dir_all(out)?;
    for (name, body) in files {
        fs::write(out.join(name), body)?;
        println!("{}", out.join(name).display());
    }
    Ok(())
}

fn verify_cmd(checks: Option<Vec<String>>, fault: Option<String>, seed: u64) -> Result<(), Failure> {
    let ids = match checks {
        None => CheckId::ALL.to_vec(),
        Some(list) => list
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| CheckId::parse(s).ok_or_else(|| config(format!("unknown check `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let fault = fault
        .map(|f| CheckId::parse(&f).ok_or_else(|| config(format!("unknown check `{f}`"))))
        .transpose()?;
    let reports = verify::run(&ids, &VerifyConfig { seed, fault });
    let passed = reports.iter().all(|r| r.passed);
    let doc = serde_json::json!({ "seed": seed, "passed": passed, "checks": reports });
    println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    if passed {
        Ok(())
    } else {
        Err(Failure(EXIT_ACCEPTANCE, "acceptance checks failed".into()))
    }
}
