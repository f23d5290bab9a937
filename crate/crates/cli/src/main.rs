//! `cvcorr`: batch front end for the cvcorr toolkit.
//!
//! Exit codes: 0 ok, 2 input error, 3 physicality error, 4 I/O error.

mod manifest;

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvcorr::gaussian::GaussianStateJson;
use cvcorr::measures::photon::{mid, mid_adaptive, MidMethod};
use cvcorr::measures::CorrelationReport;
use cvcorr::protocols::{self, DistributionConfig};
use cvcorr::random_states::{self, SamplerSpec};
use cvcorr::vector_fields::{
    self, apply_mueller, conventional_polarimetry, default_calibration, kinematic_sense, recover_mueller_single_shot,
    standard_probes, CoherenceMatrix4, Dof, MuellerMatrix, TDoFField,
};
use cvcorr::{Error, GaussianState};
use manifest::RunManifest;
use serde_json::json;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("physicality error: {0}")]
    Physical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Physical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unphysical { .. } | Error::UnphysicalMueller(_) => CliError::Physical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "cvcorr", version, about = "Gaussian correlation measures, protocols and vector-field polarimetry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation report of a two-mode state file.
    Measures {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        out: Option<String>,
        /// Fixed photon-number cutoff for MID (adaptive when omitted).
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Measures of seeded random two-mode states, as CSV.
    Scatter {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value_t = 6.0)]
        nu_skew: f64,
        /// Largest photon-number cutoff tried for MID.
        #[arg(long, default_value_t = 2048)]
        nmax: usize,
        #[arg(long)]
        no_mid: bool,
    },
    #[command(subcommand)]
    Protocol(ProtocolCommand),
    #[command(subcommand)]
    Polarimetry(PolarimetryCommand),
    #[command(subcommand)]
    Field(FieldCommand),
}

#[derive(Subcommand)]
enum ProtocolCommand {
    /// Entanglement distribution with a separable ancilla.
    Distribute(DistributeArgs),
    /// Entanglement at a beam splitter from discordant inputs.
    Bs {
        #[arg(long, default_value_t = 2.0)]
        nbar: f64,
        /// Correlation of the classical noise shared by B and C, in [0, 1].
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args)]
struct DistributeArgs {
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    /// Transmissivity of the loss on B.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 0.0)]
    gain_min: f64,
    #[arg(long, default_value_t = 3.0)]
    gain_max: f64,
    /// Displacement variance (default 2(e^{2r} - 1)).
    #[arg(long)]
    vd: Option<f64>,
    #[arg(long)]
    out: Option<String>,
    /// Also sweep r over the comma-separated values and write CSV here.
    #[arg(long)]
    sweep_out: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,1.1,1.2,1.3,1.4,1.5")]
    sweep_r: Vec<f64>,
}

#[derive(Subcommand)]
enum PolarimetryCommand {
    /// Single-shot recovery of a Mueller matrix with a radial probe.
    Mueller {
        #[arg(long = "in")]
        input: String,
        /// Reference matrix for the error report (defaults to the input).
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Knife-edge position sensing; one CSV row per edge position.
    Kinematics {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        x0: Vec<f64>,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum FieldCommand {
    /// Entanglement, coherence and Stokes quantities of a field file.
    Analyze {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        out: Option<String>,
    },
}

fn read(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn emit(out: Option<&str>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(Path::new(path), text).map_err(|e| CliError::Io(format!("{path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn cmd_measures(input: &str, out: Option<&str>, nmax: Option<usize>) -> CliResult<()> {
    let text = read(input)?;
    let raw: GaussianStateJson = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{input}: {e}")))?;
    let state = GaussianState::from_json(&raw)?;
    let mut report = CorrelationReport::compute_without_mid(&state)?;
    let used_nmax = match nmax {
        Some(n) => {
            report.mid = mid(&state, n, MidMethod::Recursion).ok();
            Some(n)
        }
        None => mid_adaptive(&state, 32, 2048).ok().map(|(v, n)| {
            report.mid = Some(v);
            n
        }),
    };
    let manifest = RunManifest::new("measures")
        .input(input)
        .param("nmax", nmax.map_or("adaptive".to_string(), |n| n.to_string()))
        .output(out);
    let result = json!({ "report": to_value(&report), "mid_n_max": used_nmax });
    emit(out, &manifest.wrap_json(result))
}

fn cmd_scatter(n: u64, seed: u64, out: Option<&str>, nu_skew: f64, nmax: usize, no_mid: bool) -> CliResult<()> {
    let spec =
        SamplerSpec { count: n as usize, seed, nu_skew, compute_mid: !no_mid, mid_cap: nmax, ..SamplerSpec::default() };
    let records = random_states::scatter(&spec, random_states::threads_from_env())?;
    let manifest = RunManifest::new("scatter")
        .param("n", n)
        .param("nu_max", spec.nu_max)
        .param("squeeze_max", spec.squeeze_max)
        .param("nu_skew", nu_skew)
        .param("mid", !no_mid)
        .param("nmax", nmax)
        .seed(seed)
        .output(out);
    emit(out, &manifest.wrap_csv(&random_states::scatter_csv(&records)))
}

fn cmd_distribute(a: &DistributeArgs) -> CliResult<()> {
    let config = DistributionConfig { r: a.r, v_d: a.vd, eta_b: a.eta, gain_min: a.gain_min, gain_max: a.gain_max };
    let trace = protocols::run_distribution(&config)?;
    let mut manifest = RunManifest::new("protocol distribute")
        .param("r", a.r)
        .param("eta", a.eta)
        .param("gain_min", a.gain_min)
        .param("gain_max", a.gain_max)
        .param("vd", config.displacement_variance());
    if let Some(path) = a.sweep_out.as_deref() {
        let rows = protocols::distribution_sweep(&config, &a.sweep_r)?;
        let grid: Vec<String> = a.sweep_r.iter().map(f64::to_string).collect();
        let sweep_manifest = manifest.clone().param("sweep_r", grid.join(",")).output(Some(path));
        emit(Some(path), &sweep_manifest.wrap_csv(&protocols::sweep_csv(&rows)))?;
        manifest = manifest.param("sweep_out", path);
    }
    let manifest = manifest.output(a.out.as_deref());
    emit(a.out.as_deref(), &manifest.wrap_json(trace.to_json()))
}

fn cmd_bs(nbar: f64, kappa: f64, out: Option<&str>) -> CliResult<()> {
    let trace = protocols::run_bs_discord_entanglement(nbar, kappa)?;
    let inputs = protocols::check_bs_inputs(&trace.stages[0].state)?;
    let entangled: Vec<&str> = trace.final_stage().entangled_cuts();
    let manifest = RunManifest::new("protocol bs").param("nbar", nbar).param("kappa", kappa).output(out);
    let result = json!({ "trace": trace.to_json(), "input_check": to_value(&inputs), "entangled_cuts": entangled });
    emit(out, &manifest.wrap_json(result))
}

fn read_mueller(path: &str) -> CliResult<MuellerMatrix> {
    Ok(MuellerMatrix::from_json(&read(path)?)?)
}

fn cmd_mueller(input: &str, reference: Option<&str>, out: Option<&str>) -> CliResult<()> {
    let m = read_mueller(input)?;
    let reference_m = match reference {
        Some(path) => read_mueller(path)?,
        None => m,
    };
    let probe = CoherenceMatrix4::pure(&TDoFField::radial());
    let single = recover_mueller_single_shot(&apply_mueller(&probe, &m)?);
    let conventional = conventional_polarimetry(&m, &standard_probes())?;
    let mut manifest = RunManifest::new("polarimetry mueller").input(input);
    if let Some(path) = reference {
        manifest = manifest.input(path);
    }
    let manifest = manifest.output(out);
    let result = json!({
        "single_shot": { "m": single.rows() },
        "conventional": { "m": conventional.rows() },
        "max_error_single_shot": single.max_abs_diff(&reference_m),
        "max_error_conventional": conventional.max_abs_diff(&reference_m),
        "min_coherency_eigenvalue": m.min_coherency_eigenvalue(),
    });
    emit(out, &manifest.wrap_json(result))
}

fn cmd_kinematics(x0: &[f64], out: Option<&str>) -> CliResult<()> {
    let cal = default_calibration();
    let mut body = String::from("x0,S0,S1,S2,S3,x0_hat\n");
    for &x in x0 {
        let r = kinematic_sense(x, cal)?;
        let cols: Vec<String> =
            std::iter::once(x).chain(r.stokes.0).chain([r.estimate]).map(random_states::fmt_float).collect();
        body.push_str(&cols.join(","));
        body.push('\n');
    }
    let values: Vec<String> = x0.iter().map(f64::to_string).collect();
    let g = cal.geometry();
    let manifest = RunManifest::new("polarimetry kinematics")
        .param("x0", values.join(","))
        .param("quadrature_order", g.order)
        .param("half_width", g.half_width)
        .output(out);
    emit(out, &manifest.wrap_csv(&body))
}

fn cmd_field(input: &str, out: Option<&str>) -> CliResult<()> {
    let field = TDoFField::from_json(&read(input)?)?;
    let gamma = CoherenceMatrix4::pure(&field);
    let coherence = vector_fields::coherence_and_predictability(&gamma, Dof::Spatial)
        .map(|(mu, delta)| json!({ "mu": [mu.re, mu.im], "delta": delta }))
        .unwrap_or(serde_json::Value::Null);
    let result = json!({
        "basis": field.basis(),
        "entanglement_degree": vector_fields::entanglement_degree(&gamma, Dof::Polarization),
        "polarization_degree": vector_fields::polarization_degree(&gamma),
        "concurrence": vector_fields::concurrence(&field),
        "schmidt_weight": vector_fields::schmidt_weight(&field),
        "spatial_coherence": coherence,
        "polarization_stokes": vector_fields::polarization_stokes(&gamma.normalized()).0,
        "tdof_stokes": vector_fields::tdof_stokes(&gamma).0,
    });
    let manifest = RunManifest::new("field analyze").input(input).output(out);
    emit(out, &manifest.wrap_json(result))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Measures { input, out, nmax } => cmd_measures(&input, out.as_deref(), nmax),
        Command::Scatter { n, seed, out, nu_skew, nmax, no_mid } => {
            cmd_scatter(n, seed, out.as_deref(), nu_skew, nmax, no_mid)
        }
        Command::Protocol(ProtocolCommand::Distribute(args)) => cmd_distribute(&args),
        Command::Protocol(ProtocolCommand::Bs { nbar, kappa, out }) => cmd_bs(nbar, kappa, out.as_deref()),
        Command::Polarimetry(PolarimetryCommand::Mueller { input, reference, out }) => {
            cmd_mueller(&input, reference.as_deref(), out.as_deref())
        }
        Command::Polarimetry(PolarimetryCommand::Kinematics { x0, out }) => cmd_kinematics(&x0, out.as_deref()),
        Command::Field(FieldCommand::Analyze { input, out }) => cmd_field(&input, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvcorr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
