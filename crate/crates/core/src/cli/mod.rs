//! Command-line front end: job parsing, dispatch and JSON reports.
//!
//! Exit codes: 0 on success, 1 when a verification fails or an obstruction
//! is found, 2 on malformed input.

pub mod input;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::clifford::{Convention, Extension, PinorModule, Signature};
use crate::deform::{
    admissibility_check, dirac_kernel, homogeneity_check, integrate, verify, DeformError, FilteredDeformation,
};
use crate::exactla::elim::set_modular_default;
use crate::flatmodel::{check_causal, Parity};
use crate::homogmodel::{reconstruct, HomogError, LieCertificate, MetricLiePair};
use crate::spencer::{normalized_cocycle_basis, Host, SpencerComplex};
use input::{build_model, read_json, JobInput, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Deform(#[from] DeformError),
    #[error(transparent)]
    Homog(#[from] HomogError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) | CliError::Invalid(_) => 2,
            CliError::Deform(_) | CliError::Homog(_) => 1,
        }
    }

    fn entry(&self) -> Value {
        match self {
            CliError::Parse { path, line, column, message } => {
                json!({"kind": "parse", "path": path, "line": line, "column": column, "message": message})
            }
            CliError::Deform(DeformError::Obstructed(o)) => json!({"kind": "obstruction", "obstruction": o}),
            other => json!({"kind": "error", "message": other.to_string()}),
        }
    }
}

/// How much of each result to include in the report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Dims,
    Basis,
    Full,
}

#[derive(Debug, Parser)]
#[command(name = "superspencer", version, about = "Spencer cohomology and filtered deformations of flat model algebras")]
pub struct JobSpec {
    /// Worker threads for internal parallelism.
    #[arg(long, global = true, env = "SUPERSPENCER_THREADS")]
    pub threads: Option<usize>,
    /// Report detail: dimensions only, echelon bases, or full tensors.
    #[arg(long, global = true, value_enum, default_value = "full")]
    pub emit: Emit,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Use exact elimination only, without modular acceleration.
    #[arg(long, global = true)]
    pub no_modular: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SignatureArgs {
    /// Signature `P,Q`.
    #[arg(long, value_parser = parse_pair)]
    pub signature: (usize, usize),
    /// Clifford sign: `plus`, `minus`, or `auto` for the smaller irreducible pinor module.
    #[arg(long, default_value = "auto", value_parser = parse_convention)]
    pub convention: Convention,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub signature: SignatureArgs,
    /// Symmetry of the squaring map: `sym` (superalgebra) or `skew` (Lie algebra).
    #[arg(long, default_value = "sym", value_parser = parse_parity)]
    pub parity: Parity,
    /// `N` copies of the minimal module, or `N+,N-` chiral copies.
    #[arg(long, value_parser = parse_extension)]
    pub extend: Option<Extension>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pinor module report: dimensions, chirality, volume sign, gamma checksums.
    Pinor(SignatureArgs),
    /// Flat model summary: Jacobi oracle and causality sampling.
    Model {
        #[command(flatten)]
        model: ModelArgs,
        /// Random spinors sampled by the causality check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Seed for the causality sampler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Spencer cohomology `H^{d,p}`.
    Cohomology {
        #[command(flatten)]
        model: ModelArgs,
        /// Spencer degree `d`.
        #[arg(long, default_value_t = 2)]
        degree: i32,
        /// Form degree `p`; complexes up to `p + 1` are built.
        #[arg(long, default_value_t = 2)]
        p: usize,
    },
    /// Closure, homogeneity and Dirac kernel of a graded subalgebra.
    SubalgebraCheck {
        /// Job file (JSON) naming the model, S′ and 𝔥.
        input: PathBuf,
    },
    /// Integration of admissible cocycles and checks of saved deformations.
    #[command(subcommand)]
    Deform(DeformCommand),
    /// Levi-Civita connection, curvature and Killing spinors of a deformation.
    Reconstruct {
        /// Deformation file written by `deform integrate --save`.
        deformation: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum DeformCommand {
    /// Integrates an admissible cocycle.
    Integrate {
        /// Job file (JSON) naming the model, S′, 𝔥 and the cocycle.
        input: PathBuf,
        /// Write the deformation here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Re-checks a saved deformation.
    Verify {
        /// Deformation file written by `deform integrate --save`.
        deformation: PathBuf,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected P,Q")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_parity(s: &str) -> Result<Parity, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_extension(s: &str) -> Result<Extension, String> {
    match s.split_once(',') {
        Some(_) => parse_pair(s).map(|(plus, minus)| Extension::Chiral { plus, minus }),
        None => s.trim().parse().map(Extension::Copies).map_err(|e| format!("{e}")),
    }
    .and_then(|e| if e.copies() == 0 { Err("extension must be at least 1".into()) } else { Ok(e) })
}

/// The machine-readable result of one job.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub version: &'static str,
    pub conventions: BTreeMap<&'static str, String>,
    pub result: Value,
    pub verdicts: BTreeMap<String, bool>,
    pub errors: Vec<Value>,
    pub timings_ms: BTreeMap<String, u128>,
}

impl Report {
    fn new(command: Vec<String>) -> Self {
        let conventions = BTreeMap::from([
            ("rationals", "strings p/q".to_string()),
            ("gamma", "gamma(s,t)_k = s^T G_k t in so(V) coordinates".to_string()),
            ("so_basis", "E_ab e_c = eta_bc e_a - eta_ac e_b for a < b".to_string()),
            ("spinor_connection", "Psi(A+v) = rho(A + lambda(v)) + beta_hat(v,-)".to_string()),
        ]);
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            version: env!("CARGO_PKG_VERSION"),
            conventions,
            result: Value::Null,
            verdicts: BTreeMap::new(),
            errors: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    fn verdict(&mut self, name: &str, ok: bool) {
        self.verdicts.insert(name.to_string(), ok);
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.verdicts.values().all(|&v| v)
    }

    /// The deterministic part: everything except timings.
    pub fn payload(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("timings_ms");
        v
    }
}

/// A report with its exit code.
pub struct Outcome {
    pub report: Report,
    pub exit_code: u8,
}

fn timed<T>(report: &mut Report, name: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    report.timings_ms.insert(name.to_string(), start.elapsed().as_millis());
    out
}

pub fn run(spec: &JobSpec, command_echo: Vec<String>) -> Outcome {
    set_modular_default(!spec.no_modular);
    let mut report = Report::new(command_echo);
    let result = dispatch(spec, &mut report);
    let exit_code = match result {
        Ok(()) if report.passed() => 0,
        Ok(()) => 1,
        Err(e) => {
            report.errors.push(e.entry());
            e.exit_code()
        }
    };
    Outcome { report, exit_code }
}

fn signature(args: &SignatureArgs) -> Result<Signature, CliError> {
    Signature::with_convention(args.signature.0, args.signature.1, args.convention)
        .map_err(|e| CliError::Invalid(e.to_string()))
}

fn dispatch(spec: &JobSpec, report: &mut Report) -> Result<(), CliError> {
    match &spec.command {
        Command::Pinor(args) => {
            let sig = signature(args)?;
            report.conventions.insert("clifford_sign", sig.clifford_sign.to_string());
            let pinor = timed(report, "build", || PinorModule::build(sig)).map_err(|e| CliError::Invalid(e.to_string()))?;
            report.verdict("clifford_relations", pinor.verify_relations().is_ok());
            report.result = json!({ "pinor": pinor.summary(), "so_dim": sig.so_dim() });
        }
        Command::Model { model, trials, seed } => {
            let m = model_of(model, report)?;
            let jacobi = timed(report, "jacobi", || m.algebra().super_jacobi_check().len());
            report.verdict("jacobi", jacobi == 0);
            let mut result = json!({
                "layout": m.layout(),
                "jacobi_violations": jacobi,
            });
            if m.signature().is_lorentzian() {
                let causal = timed(report, "causal", || check_causal(m.kappa(), m.module(), *trials, *seed));
                report.verdict("causal", causal.passed());
                result["causal"] = serde_json::to_value(&causal).expect("serializes");
            }
            if spec.emit == Emit::Full {
                result["model"] = serde_json::to_value(crate::flatmodel::FlatModelRecord::from(&m)).expect("serializes");
            }
            report.result = result;
        }
        Command::Cohomology { model, degree, p } => {
            let m = model_of(model, report)?;
            let complex = timed(report, "cochains", || SpencerComplex::new(Host::from_flat(&m), *degree, *p));
            let raw = timed(report, "raw_route", || complex.cohomology(*p, false));
            let mut result = json!({ "layout": m.layout(), "raw": raw });
            if *p >= 1 {
                let dd = timed(report, "dd", || complex.dd_nonzeros(*p - 1));
                report.verdict("dd_zero", dd == 0);
            }
            if (*degree, *p) == (2, 2) {
                let basis = timed(report, "normalized_route", || normalized_cocycle_basis(&m));
                report.verdict("routes_agree", basis.len() == raw.dim_h);
                result["normalized_dim"] = json!(basis.len());
                if spec.emit != Emit::Dims {
                    let betas: Vec<_> = basis.iter().map(|x| &x.beta).collect();
                    result["normalized_basis_beta"] = serde_json::to_value(betas).expect("serializes");
                }
            }
            report.result = result;
        }
        Command::SubalgebraCheck { input } => {
            let job: JobInput = read_json(input)?;
            let job = timed(report, "build", || job.build())?;
            let sub = &job.subalgebra;
            let l = sub.layout();
            let homogeneous = homogeneity_check(sub);
            let kernel = timed(report, "dirac_kernel", || dirac_kernel(sub));
            report.verdict("highly_supersymmetric", sub.is_highly_supersymmetric());
            report.verdict("homogeneous", homogeneous);
            report.result = json!({
                "layout": l,
                "maximal": sub.is_maximal(),
                "dirac_kernel_dim": kernel.dim(),
                "kappa_rank": kernel.kappa_rank(),
            });
        }
        Command::Deform(DeformCommand::Integrate { input, save }) => {
            if save.as_ref() == Some(input) || (save.is_some() && save == &spec.output) {
                return Err(CliError::Invalid("input and output paths must be distinct".into()));
            }
            let job: JobInput = read_json(input)?;
            let job = timed(report, "build", || job.build())?;
            let adm = timed(report, "admissibility", || admissibility_check(&job.subalgebra, job.cocycle.clone(), None))?;
            let def = timed(report, "integrate", || integrate(&adm))?;
            let r = def.report.as_ref().expect("integration fills the report");
            report.verdict("integration", r.passed());
            let mut result = json!({ "layout": job.subalgebra.layout(), "dim": def.dim(), "report": r });
            if spec.emit == Emit::Full {
                result["deformation"] = serde_json::to_value(&def).expect("serializes");
            }
            if let Some(path) = save {
                write_json(path, &def)?;
            }
            report.result = result;
        }
        Command::Deform(DeformCommand::Verify { deformation }) => {
            let def: FilteredDeformation = read_json(deformation)?;
            let r = timed(report, "verify", || verify(&def))?;
            report.verdict("verification", r.passed());
            report.result = json!({ "dim": def.dim(), "report": r });
        }
        Command::Reconstruct { deformation } => {
            let def: FilteredDeformation = read_json(deformation)?;
            let rec = timed(report, "reconstruct", || reconstruct(&def))?;
            let pair = MetricLiePair::from_deformation(&def)?;
            let even = timed(report, "certificate", || LieCertificate::of(pair.algebra()));
            report.verdict("levi_civita_is_lambda", rec.levi_civita_mismatches.is_empty());
            report.verdict("killing_spinor", rec.killing_spinor.passed());
            report.verdict("spinor_flatness", rec.flatness.passed());
            report.verdict("curvature_bianchi", rec.curvature.bianchi_failures == 0);
            let mut result = json!({ "dim": def.dim(), "even_part": even });
            if def.algebra.parities().iter().all(|&odd| !odd) {
                result["algebra"] = serde_json::to_value(LieCertificate::of(&def.algebra)).expect("serializes");
            }
            result["reconstruction"] = if spec.emit == Emit::Full {
                serde_json::to_value(&rec).expect("serializes")
            } else {
                json!({ "curvature": rec.curvature, "killing_spinor": rec.killing_spinor, "flatness": rec.flatness })
            };
            report.result = result;
        }
    }
    Ok(())
}

fn model_of(args: &ModelArgs, report: &mut Report) -> Result<crate::flatmodel::FlatModel, CliError> {
    let sig = signature(&args.signature)?;
    report.conventions.insert("clifford_sign", sig.clifford_sign.to_string());
    timed(report, "model", || build_model(sig, args.parity, args.extend))
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
