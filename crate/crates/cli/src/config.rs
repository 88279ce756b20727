//! Command-line arguments and their merge with a JSON config file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use minkowski_sticks::norm::NormSpec;

use crate::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "sticks",
    version,
    about = "Numerical checks of the two sticks estimates for Minkowski norms"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalArgs {
    /// `euclidean` or `p:<value>`
    #[arg(long, global = true)]
    pub norm: Option<String>,
    #[arg(long, global = true, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Radius for the convexity and doubling constants.
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Named tolerance, `name=value`; repeatable.
    #[arg(long = "tolerance", global = true, value_parser = parse_tolerance)]
    #[serde(skip)]
    pub tolerance: Vec<(String, f64)>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file whose entries override the flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sample the constants of a norm and write a JSON report.
    Certify(CertifyArgs),
    /// Pairwise two sticks checks on a family of distance rays.
    Sticks(SticksArgs),
    /// The strip experiment on random ray configurations.
    Strip(StripArgs),
    /// Sharpness curves for the p-norm constructions.
    Sharpness(SharpnessArgs),
    /// Ray family of a random finite set, with its endpoint modulus.
    Atlas(AtlasArgs),
    /// The one-variable ratios of the p-norm lemma.
    Onev(OnevArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Certify(_) => "certify",
            Command::Sticks(_) => "sticks",
            Command::Strip(_) => "strip",
            Command::Sharpness(_) => "sharpness",
            Command::Atlas(_) => "atlas",
            Command::Onev(_) => "onev",
        }
    }

    fn params(&self) -> Value {
        let v = match self {
            Command::Certify(a) => serde_json::to_value(a),
            Command::Sticks(a) => serde_json::to_value(a),
            Command::Strip(a) => serde_json::to_value(a),
            Command::Sharpness(a) => serde_json::to_value(a),
            Command::Atlas(a) => serde_json::to_value(a),
            Command::Onev(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }

    fn with_params(&self, v: Value) -> Result<Command, Failure> {
        fn de<T: DeserializeOwned>(v: Value) -> Result<T, Failure> {
            serde_json::from_value(v).map_err(|e| Failure::Config(format!("params: {e}")))
        }
        Ok(match self {
            Command::Certify(_) => Command::Certify(de(v)?),
            Command::Sticks(_) => Command::Sticks(de(v)?),
            Command::Strip(_) => Command::Strip(de(v)?),
            Command::Sharpness(_) => Command::Sharpness(de(v)?),
            Command::Atlas(_) => Command::Atlas(de(v)?),
            Command::Onev(_) => Command::Onev(de(v)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Tangent,
    Full,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyArgs {
    #[arg(long, value_enum, default_value_t = Mode::Tangent)]
    pub mode: Mode,
    /// Radius `R` of the balanced constant.
    #[arg(long, default_value_t = 1.0)]
    pub balanced_radius: f64,
    /// Exponents `p,q` of the uniform constants.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub uniform: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SticksArgs {
    /// Number of sites of the random finite set.
    #[arg(long, default_value_t = 8)]
    pub sites: usize,
    /// Number of queries, one stick each.
    #[arg(long, default_value_t = 100)]
    pub family: usize,
    /// Common stick length.
    #[arg(long, default_value_t = 0.25)]
    pub length: f64,
    /// Hölder exponents `p,q`; defaults by norm.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub holder: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.4)]
    pub rho: f64,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Convexity constant at radius `--r`; estimated when absent.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Balance constant at `--balanced-radius`; estimated when absent.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub balanced_radius: f64,
    /// Number of random configurations.
    #[arg(long, default_value_t = 100)]
    pub configs: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessArgs {
    /// Exponent; taken from `--norm p:<value>` when absent.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    /// Range of `delta` for `p >= 2`.
    #[arg(long, default_value_t = 1e-5)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub delta_max: f64,
    /// Decades of approach to `x^p = 1/2` for `p < 2`.
    #[arg(long, default_value_t = 6.0)]
    pub decades: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasArgs {
    #[arg(long, default_value_t = 8)]
    pub sites: usize,
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    #[arg(long, default_value_t = 0.25)]
    pub length: f64,
    /// Parameter of the intermediate points for the endpoint modulus.
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnevArgs {
    /// Exponent; taken from `--norm p:<value>` when absent.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub points: usize,
}

/// Tolerances every command understands, with defaults.
pub const TOLERANCES: [(&str, f64); 2] = [("bound", 1e-9), ("predicate", 1e-12)];

/// The resolved configuration, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub norm: Option<String>,
    pub dim: usize,
    pub seed: u64,
    pub samples: Option<usize>,
    pub r: Option<f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
    pub params: Value,
    #[serde(skip)]
    pub command_args: Command,
}

impl ExperimentConfig {
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    /// The norm, required by most commands.
    pub fn norm(&self) -> Result<NormSpec, Failure> {
        let s = self
            .norm
            .as_deref()
            .ok_or_else(|| Failure::Config("--norm is required (euclidean or p:<value>)".into()))?;
        NormSpec::parse(s, self.dim).map_err(|e| Failure::Config(format!("--norm {s}: {e}")))
    }
}

/// Flags first, then the entries of `--config`, then validation.
pub fn resolve(cli: Cli) -> Result<ExperimentConfig, Failure> {
    let Cli { global, command } = cli;
    let mut tolerances: BTreeMap<String, f64> = TOLERANCES
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    for (k, v) in &global.tolerance {
        tolerances.insert(k.clone(), *v);
    }
    let mut globals = serde_json::to_value(&global).expect("flags serialize");
    let mut params = command.params();

    if let Some(path) = &global.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let file: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let Value::Object(file) = file else {
            return Err(Failure::Config(
                "config file must hold a JSON object".into(),
            ));
        };
        for (k, v) in file {
            match k.as_str() {
                "params" => overlay(&mut params, v, "params")?,
                "tolerances" => {
                    let map: BTreeMap<String, f64> = serde_json::from_value(v)
                        .map_err(|e| Failure::Config(format!("tolerances: {e}")))?;
                    tolerances.extend(map);
                }
                "command" => {
                    if v.as_str() != Some(command.name()) {
                        return Err(Failure::Config(format!(
                            "config is for command {v}, not {}",
                            command.name()
                        )));
                    }
                }
                _ => overlay_key(&mut globals, k, v)?,
            }
        }
    }

    let global: GlobalArgs =
        serde_json::from_value(globals).map_err(|e| Failure::Config(format!("config: {e}")))?;
    let command = command.with_params(params)?;
    let params = command.params();

    for (k, v) in &tolerances {
        if !TOLERANCES.iter().any(|(n, _)| n == k) {
            return Err(Failure::Config(format!("unknown tolerance {k:?}")));
        }
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Failure::Config(format!(
                "tolerance {k} must be positive, got {v}"
            )));
        }
    }
    if global.samples == Some(0) {
        return Err(Failure::Config("--samples must be at least 1".into()));
    }
    if global.dim == 0 {
        return Err(Failure::Config("--dim must be at least 1".into()));
    }
    Ok(ExperimentConfig {
        command: command.name().to_string(),
        norm: global.norm,
        dim: global.dim,
        seed: global.seed,
        samples: global.samples,
        r: global.r,
        tolerances,
        out: global.out,
        params,
        command_args: command,
    })
}

fn overlay(target: &mut Value, patch: Value, what: &str) -> Result<(), Failure> {
    let Value::Object(patch) = patch else {
        return Err(Failure::Config(format!("{what} must be a JSON object")));
    };
    for (k, v) in patch {
        overlay_key(target, k, v)?;
    }
    Ok(())
}

fn overlay_key(target: &mut Value, k: String, v: Value) -> Result<(), Failure> {
    let map: &mut Map<String, Value> = target
        .as_object_mut()
        .expect("structs serialize to objects");
    if !map.contains_key(&k) {
        return Err(Failure::Config(format!("unknown config entry {k:?}")));
    }
    map.insert(k, v);
    Ok(())
}
