mod commands;
mod grid;
mod output;

use clap::{Parser, Subcommand};
use commands::*;
use output::{render, write, Artifact, Format};
use pearceylab::{Error, Result};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "pearceylab", version, about = "Kernels, densities and residual checks for the quartic external-source model")]
struct Cli {
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Artifact format; tables default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Working precision in bits for the multiprecision stages. Overrides PEARCEYLAB_BITS.
    #[arg(long, global = true)]
    bits: Option<u32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Biorthogonal norms h_k with an independent quadrature check.
    Biorth(BiorthArgs),
    /// Finite-n correlation kernels on a grid.
    Kernel(KernelArgs),
    /// Pearcey functions and the limiting kernels.
    Pearcey(PearceyArgs),
    /// Equilibrium density profile and mass.
    Density(DensityArgs),
    /// Endpoint data along the critical curve.
    Phase(PhaseArgs),
    /// Convergence of the rescaled finite-n kernels.
    Limitcheck(LimitArgs),
    /// Residuals of the integrable structure.
    OdeCheck(OdeArgs),
    /// Determinant, jumps and normalization of the Airy parametrix.
    AiryCheck(AiryArgs),
    /// Execute a JSON run configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct OutputSpec {
    path: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct PrecisionSpec {
    bits: Option<u32>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    subcommand: String,
    params: Option<serde_json::Value>,
    grid: Option<String>,
    #[serde(default)]
    options: BTreeMap<String, serde_json::Value>,
    output: Option<OutputSpec>,
    precision: Option<PrecisionSpec>,
}

const SUBCOMMANDS: [&str; 8] = ["biorth", "kernel", "pearcey", "density", "phase", "limitcheck", "ode-check", "airy-check"];

impl RunConfig {
    /// The equivalent command line, so a config goes through the same
    /// validation as flags do.
    fn to_argv(&self) -> Result<Vec<String>> {
        if !SUBCOMMANDS.contains(&self.subcommand.as_str()) {
            return Err(Error::Config(format!("unknown subcommand '{}'", self.subcommand)));
        }
        let mut argv = vec!["pearceylab".to_string(), self.subcommand.clone()];
        if let Some(o) = &self.output {
            if let Some(p) = &o.path {
                argv.extend(["--output".into(), p.display().to_string()]);
            }
            if let Some(f) = o.format {
                argv.extend(["--format".into(), format!("{f:?}").to_lowercase()]);
            }
        }
        if let Some(b) = self.precision.as_ref().and_then(|p| p.bits) {
            argv.extend(["--bits".into(), b.to_string()]);
        }
        if let Some(p) = &self.params {
            argv.extend(["--params".into(), p.to_string()]);
        }
        if let Some(g) = &self.grid {
            argv.extend(["--grid".into(), g.clone()]);
        }
        for (k, v) in &self.options {
            let flag = format!("--{}", k.replace('_', "-"));
            match v {
                serde_json::Value::Bool(true) => argv.push(flag),
                serde_json::Value::Bool(false) => {}
                serde_json::Value::String(s) => argv.extend([flag, s.clone()]),
                serde_json::Value::Number(n) => argv.extend([flag, n.to_string()]),
                serde_json::Value::Array(a) => {
                    let parts: Vec<String> = a
                        .iter()
                        .map(|x| match x {
                            serde_json::Value::String(s) => Ok(s.clone()),
                            serde_json::Value::Number(n) => Ok(n.to_string()),
                            _ => Err(Error::Config(format!("option '{k}': arrays hold numbers or strings"))),
                        })
                        .collect::<Result<_>>()?;
                    argv.extend([flag, parts.join(",")]);
                }
                _ => return Err(Error::Config(format!("option '{k}' has an unsupported value type"))),
            }
        }
        Ok(argv)
    }
}

fn env_bits() -> Result<Option<u32>> {
    match std::env::var("PEARCEYLAB_BITS") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("PEARCEYLAB_BITS='{s}' is not a bit count"))),
        Err(_) => Ok(None),
    }
}

fn execute(cli: Cli) -> Result<()> {
    let bits = match cli.bits {
        Some(b) => Some(b),
        None => env_bits()?,
    };
    let (artifact, default_format, export): (Artifact, Format, Option<PathBuf>) = match &cli.cmd {
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(config)
                .map_err(|e| Error::Config(format!("reading {}: {e}", config.display())))?;
            let rc: RunConfig =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("run config: {e}")))?;
            let inner = Cli::try_parse_from(rc.to_argv()?).map_err(|e| Error::Config(e.to_string()))?;
            return execute(inner);
        }
        Cmd::Biorth(a) => (biorth(a, bits)?, Format::Csv, None),
        Cmd::Kernel(a) => (kernel(a, bits)?, Format::Csv, None),
        Cmd::Pearcey(a) => (pearcey(a)?, Format::Csv, None),
        Cmd::Density(a) => (density(a)?, Format::Csv, a.export.clone()),
        Cmd::Phase(a) => (phase(a)?, Format::Csv, None),
        Cmd::Limitcheck(a) => (limitcheck(a, bits)?, Format::Json, None),
        Cmd::OdeCheck(a) => (ode_check(a)?, Format::Json, None),
        Cmd::AiryCheck(a) => (airy_check(a)?, Format::Json, None),
    };
    let text = render(&artifact, cli.format.unwrap_or(default_format))?;
    write(&text, cli.output.as_deref().or(export.as_deref()))
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let err = serde_json::json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    eprintln!("{err}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("config", e.to_string().trim_end(), 2),
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_config() => fail("config", &e.to_string(), 2),
        Err(e) => fail("numerical", &e.to_string(), 3),
    }
}
