//! `coherence-forge` command-line front end.
//!
//! Exit codes: 0 on success, 1 on input errors (unreadable files, schema or
//! validation failures, bad flags), 2 when a computed contract fails
//! (acceptance criterion, monotonicity violation, SDP stall).

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coherence_forge::channels::{monotonicity_suite, MeasureId};
use coherence_forge::clock::{
    barbour_bound, extract_distribution, overlap_copy_count, period, tv_to_translated_poisson,
};
use coherence_forge::conversion::{iid_sweep, iid_sweep_with_discard, ConversionPlan};
use coherence_forge::distillation::{
    cirac_comparison, conditional_min_entropy, iid_copies, omega_state, qubit_infidelity_bound,
};
use coherence_forge::io::{self, HamiltonianSource, LoadedState};
use coherence_forge::measures::{
    energy_variance, purity_of_coherence, qfi, renyi_purity_monotone, skew_information,
    support_commutes,
};
use coherence_forge::purification::{build_optimal_purification, optimal_ensemble};
use coherence_forge::{acceptance, DensityMatrix, Error, HermitianObservable, PureState};

const DEFAULT_SEED: u64 = 20_240_601;
const MONOTONICITY_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "coherence-forge",
    version,
    about = "Coherence under time-translation symmetry"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// RNG seed for randomized commands.
    #[arg(long, global = true, env = "COHERENCE_FORGE_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Period used to scale integer level lists.
    #[arg(long, global = true, default_value_t = 2.0 * PI)]
    tau: f64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// QFI, purity of coherence and skew information of a state.
    Measures {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        ham: PathBuf,
        /// Also report the Rényi purity monotone of this order.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Variance-optimal purification.
    Purify {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        ham: PathBuf,
        /// Include the optimal pure-state ensemble.
        #[arg(long)]
        ensemble: bool,
    },
    /// Energy distribution of `m` copies of a pure state.
    Dist {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        ham: PathBuf,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Where to write the JSON summary when emitting CSV (stderr otherwise).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// iid conversion sweep between two pure states.
    Convert {
        #[arg(long = "in", num_args = 2, value_names = ["STATE", "HAM"])]
        input: Vec<PathBuf>,
        #[arg(long = "out", num_args = 2, value_names = ["STATE", "HAM"])]
        target: Vec<PathBuf>,
        #[arg(long)]
        rate: f64,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256")]
        copies: Vec<usize>,
        /// Allow extra output copies near the optimal ratio, then discard them.
        #[arg(long)]
        discard: bool,
    },
    /// Single-shot distillation fidelity via the min-entropy SDP.
    Distill {
        #[arg(long = "in", num_args = 2, value_names = ["STATE", "HAM"])]
        input: Vec<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["STATE", "HAM"])]
        target: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Qubit infidelity bounds over n = 1..=N.
    QubitBound {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        n: usize,
    },
    /// Randomized contract checks.
    Proptest {
        #[arg(long, value_enum, default_value_t = Suite::Monotonicity)]
        suite: Suite,
        /// F, P, W, cost or renyi:α.
        #[arg(long, default_value = "F")]
        measure: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Run the acceptance suite.
    Accept,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Monotonicity,
}

/// A computed check failed; maps to exit code 2.
#[derive(Debug)]
struct ContractViolation(String);

impl std::fmt::Display for ContractViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ContractViolation {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ContractViolation>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::SolverStall { .. }) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    if !(g.tau > 0.0 && g.tau.is_finite()) {
        bail!(Error::InvalidArgument(format!(
            "--tau {} must be positive",
            g.tau
        )));
    }
    match &cli.command {
        Command::Measures { state, ham, alpha } => measures(g, state, ham, *alpha),
        Command::Purify {
            state,
            ham,
            ensemble,
        } => purify(g, state, ham, *ensemble),
        Command::Dist {
            state,
            ham,
            copies,
            summary,
        } => dist(g, state, ham, *copies, summary.as_deref()),
        Command::Convert {
            input,
            target,
            rate,
            copies,
            discard,
        } => convert(
            g,
            (&input[0], &input[1]),
            (&target[0], &target[1]),
            *rate,
            copies,
            *discard,
        ),
        Command::Distill {
            input,
            target,
            copies,
        } => distill(g, (&input[0], &input[1]), (&target[0], &target[1]), *copies),
        Command::QubitBound { lambda, n } => qubit_bound(g, *lambda, *n),
        Command::Proptest {
            suite: Suite::Monotonicity,
            measure,
            trials,
        } => proptest(g, measure, *trials),
        Command::Accept => accept(g),
    }
}

fn emit(g: &Global, text: &str) -> anyhow::Result<()> {
    match &g.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(g: &Global, v: &Value) -> anyhow::Result<()> {
    emit(g, &format!("{}\n", serde_json::to_string_pretty(v)?))
}

fn load_state(path: &Path) -> anyhow::Result<LoadedState> {
    Ok(io::load_state(path)?)
}

fn load_pure(path: &Path) -> anyhow::Result<PureState> {
    match load_state(path)? {
        LoadedState::Pure(p) => Ok(p),
        LoadedState::Mixed(_) => {
            bail!(Error::Schema(format!(
                "{}: expected a pure state (one-dimensional re/im)",
                path.display()
            )))
        }
    }
}

fn load_ham(path: &Path, tau: f64) -> anyhow::Result<HermitianObservable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    let (h, src) = io::read_hamiltonian(&text, tau)?;
    match src {
        HamiltonianSource::Snapped(shift) if shift > 1e-12 => eprintln!(
            "warning: {}: dense Hamiltonian snapped to levels in units of 2π/τ (max shift {shift:e})",
            path.display()
        ),
        HamiltonianSource::Incommensurate => eprintln!(
            "warning: {}: spectrum is not commensurate with τ = {tau}; used as given",
            path.display()
        ),
        _ => {}
    }
    Ok(h)
}

fn matrix_value(h: &HermitianObservable) -> Value {
    serde_json::from_str(&io::hamiltonian_json(h)).expect("emitted by io")
}

fn measures(g: &Global, state: &Path, ham: &Path, alpha: Option<f64>) -> anyhow::Result<()> {
    let s = load_state(state)?;
    let h = load_ham(ham, g.tau)?;
    let rho = s.to_density();
    let variance = match s.as_pure() {
        Some(p) => json!(energy_variance(p, &h)?),
        None => Value::Null,
    };
    let mut out = json!({
        "F": qfi(&rho, &h)?,
        "P": purity_of_coherence(&rho, &h)?,
        "W": skew_information(&rho, &h)?,
        "variance_if_pure": variance,
        "support_commutes": support_commutes(&rho, &h),
    });
    if let Some(a) = alpha {
        out["alpha"] = json!(a);
        out["P_alpha"] = json!(renyi_purity_monotone(&rho, &h, a)?);
    }
    emit_json(g, &out)
}

fn purify(g: &Global, state: &Path, ham: &Path, ensemble: bool) -> anyhow::Result<()> {
    let rho = load_state(state)?.to_density();
    let h = load_ham(ham, g.tau)?;
    let p = build_optimal_purification(&rho, &h)?;
    let mut out = json!({
        "aux_hamiltonian": matrix_value(&p.aux_hamiltonian),
        "total_variance": p.total_variance,
        "qfi_over_4": qfi(&rho, &h)? / 4.0,
        "kkt_residual": p.kkt_residual,
    });
    if ensemble {
        let ens = optimal_ensemble(&rho, &h)?;
        let members: Vec<Value> = ens
            .weights
            .iter()
            .zip(&ens.states)
            .map(|(w, s)| json!({"weight": w, "state": serde_json::from_str::<Value>(&io::pure_state_json(s)).expect("emitted by io")}))
            .collect();
        out["ensemble"] = Value::Array(members);
        out["ensemble_average_variance"] = json!(ens.average_variance);
    }
    emit_json(g, &out)
}

fn dist(
    g: &Global,
    state: &Path,
    ham: &Path,
    copies: usize,
    summary_path: Option<&Path>,
) -> anyhow::Result<()> {
    if copies == 0 {
        bail!(Error::InvalidArgument("--copies must be at least 1".into()));
    }
    let psi = load_pure(state)?;
    let h = load_ham(ham, g.tau)?;
    let clock = extract_distribution(&psi, &h, g.tau)?;
    let p = clock.distribution.clone();
    let pm = p.convolve_n(copies)?;
    let nondegenerate = p.support().len() >= 2 && p.support_gcd() == 1;
    let (l, tv, bb) = if nondegenerate {
        (
            json!(overlap_copy_count(&p, 4096)?),
            json!(tv_to_translated_poisson(&p, copies)?),
            json!(barbour_bound(&p, copies)?),
        )
    } else {
        (Value::Null, Value::Null, Value::Null)
    };
    let summary = json!({
        "period": period(&psi, &h, g.tau)?,
        "L": l,
        "tv_to_tp": tv,
        "barbour_bound": bb,
        "copies": copies,
        "mean": pm.mean(),
        "variance": pm.variance(),
    });
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let mut s = summary;
            s["distribution"] = json!({"offset": pm.offset, "probs": pm.probs});
            emit_json(g, &s)
        }
        Format::Csv => {
            let mut csv = String::from("n,p\n");
            for (i, q) in pm.probs.iter().enumerate() {
                writeln!(csv, "{},{}", pm.offset + i as i64, q)?;
            }
            emit(g, &csv)?;
            let text = serde_json::to_string_pretty(&summary)?;
            match summary_path {
                Some(p) => std::fs::write(p, text + "\n")
                    .with_context(|| format!("writing {}", p.display()))?,
                None => eprintln!("{text}"),
            }
            Ok(())
        }
    }
}

fn convert(
    g: &Global,
    input: (&Path, &Path),
    target: (&Path, &Path),
    rate: f64,
    copies: &[usize],
    discard: bool,
) -> anyhow::Result<()> {
    let psi1 = load_pure(input.0)?;
    let h1 = load_ham(input.1, g.tau)?;
    let psi2 = load_pure(target.0)?;
    let h2 = load_ham(target.1, g.tau)?;
    if copies.contains(&0) {
        bail!(Error::InvalidArgument(
            "copy counts must be positive".into()
        ));
    }
    let plans: Vec<ConversionPlan> = if discard {
        iid_sweep_with_discard(&psi1, &h1, &psi2, &h2, rate, copies)?
    } else {
        iid_sweep(&psi1, &h1, &psi2, &h2, rate, copies)?
    };
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(g, &json!(plans)),
        Format::Csv => {
            let mut csv = String::from("m,k,tv_error,fidelity_floor,m_out\n");
            for p in &plans {
                writeln!(
                    csv,
                    "{},{},{},{},{}",
                    p.input_copies, p.shift_k, p.tv_error, p.fidelity_lower_bound, p.output_copies
                )?;
            }
            emit(g, &csv)
        }
    }
}

/// `λ` of a qubit `λ|+⟩⟨+| + (1−λ)I/2` written in the eigenbasis of `H`,
/// or `None` when the input is not of that form.
fn noisy_cbit_lambda(rho: &DensityMatrix, h: &HermitianObservable) -> Option<f64> {
    if rho.dim() != 2 || h.eigenvalues()[1] - h.eigenvalues()[0] <= 1e-12 {
        return None;
    }
    let v = h.eigenvectors();
    let m = &(&v.adjoint() * rho.matrix()) * v;
    let lambda = 2.0 * m[(0, 1)].norm();
    let balanced = (m[(0, 0)].re - 0.5).abs() < 1e-9;
    (balanced && lambda > 0.0 && lambda <= 1.0 + 1e-12).then_some(lambda.min(1.0))
}

fn distill(
    g: &Global,
    input: (&Path, &Path),
    target: (&Path, &Path),
    copies: usize,
) -> anyhow::Result<()> {
    if copies == 0 {
        bail!(Error::InvalidArgument("--copies must be at least 1".into()));
    }
    let sigma = load_state(input.0)?.to_density();
    let h_a = load_ham(input.1, g.tau)?;
    let psi = load_pure(target.0)?;
    let h_b = load_ham(target.1, g.tau)?;
    let (sn, hn) = iid_copies(&sigma, &h_a, copies);
    let r = conditional_min_entropy(&omega_state(&sn, &hn, &psi, &h_b)?)?;
    // The closed-form bounds only apply to noisy c-bits distilled into a c-bit.
    let cbit_target = psi.dim() == 2 && noisy_cbit_lambda(&psi.density(), &h_b) == Some(1.0);
    let (exact, asym) = match noisy_cbit_lambda(&sigma, &h_a).filter(|_| cbit_target) {
        Some(l) => {
            let b = qubit_infidelity_bound(l, copies)?;
            (json!(b.exact), json!(b.asymptotic))
        }
        None => (Value::Null, Value::Null),
    };
    emit_json(
        g,
        &json!({
            "fidelity": r.optimum,
            "hmin": r.hmin,
            "gap": r.primal_dual_gap,
            "bound_exact": exact,
            "bound_asymptotic": asym,
            "copies": copies,
            "iterations": r.iterations,
        }),
    )
}

fn qubit_bound(g: &Global, lambda: f64, n: usize) -> anyhow::Result<()> {
    let rows = (1..=n)
        .map(|k| {
            Ok((
                k,
                qubit_infidelity_bound(lambda, k)?,
                cirac_comparison(lambda, k)?,
            ))
        })
        .collect::<coherence_forge::Result<Vec<_>>>()?;
    if rows.is_empty() {
        bail!(Error::InvalidArgument("--n must be at least 1".into()));
    }
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(
            g,
            &json!(rows
                .iter()
                .map(|(k, b, c)| json!({"n": k, "exact": b.exact, "asymptotic": b.asymptotic, "cirac": c}))
                .collect::<Vec<_>>()),
        ),
        Format::Csv => {
            let mut csv = String::from("n,exact,asymptotic,cirac\n");
            for (k, b, c) in &rows {
                writeln!(csv, "{k},{},{},{c}", b.exact, b.asymptotic)?;
            }
            emit(g, &csv)
        }
    }
}

fn proptest(g: &Global, measure: &str, trials: u64) -> anyhow::Result<()> {
    let m = MeasureId::parse(measure)?;
    let report = monotonicity_suite(m, trials, g.seed)?;
    let passed = report.passed(MONOTONICITY_TOL);
    let mut v = json!(report);
    v["tolerance"] = json!(MONOTONICITY_TOL);
    v["passed"] = json!(passed);
    emit_json(g, &v)?;
    if !passed {
        bail!(ContractViolation(format!(
            "{} increased by {:e} under a TI channel",
            report.measure, report.max_violation
        )));
    }
    Ok(())
}

fn accept(g: &Global) -> anyhow::Result<()> {
    let results = acceptance::run_all();
    let failed = results.iter().filter(|r| !r.passed).count();
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(g, &json!(results))?,
        Format::Csv => {
            let mut text = String::new();
            for r in &results {
                writeln!(text, "{}", r.line())?;
            }
            writeln!(
                text,
                "{} of {} criteria passed",
                results.len() - failed,
                results.len()
            )?;
            emit(g, &text)?;
        }
    }
    if failed > 0 {
        bail!(ContractViolation(format!(
            "{failed} acceptance criteria failed"
        )));
    }
    Ok(())
}
