use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "capspec",
    version,
    about = "Dirichlet spectra, torsion and Gelfand branches on spherical caps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a special function (golden-file testing).
    #[command(hide = true)]
    Specfun(SpecfunArgs),
    /// Radial Dirichlet eigenpairs and their Fourier coefficients.
    #[command(args_override_self = true)]
    Eigen(EigenArgs),
    /// Torsion function w with -Δw = 1, w = 0 on the boundary.
    #[command(args_override_self = true)]
    Torsion(TorsionArgs),
    /// Bracket the extremal parameter of -Δu = λ f(u).
    #[command(args_override_self = true)]
    Gelfand(GelfandArgs),
    /// Run several apertures and summarize the trends.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every computing subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Sphere dimension N (at least 2).
    #[arg(long)]
    pub dim: usize,
    /// Number of radial nodes; the default grid is graded toward the boundary.
    #[arg(long, value_name = "NODES")]
    pub grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// key=value file with defaults for these flags.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub common: Common,
    /// Aperture parameter in (0, 1); the cap is θ < (1 - eps)π.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 1)]
    pub modes: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TorsionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: f64,
    /// closed, greens or spectral.
    #[arg(long, default_value = "greens")]
    pub method: String,
    /// Eigenmodes in the spectral sum.
    #[arg(long, default_value_t = capspec::torsion::DEFAULT_MODES)]
    pub modes: usize,
    /// Emit the full radial profile.
    #[arg(long)]
    pub profile: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GelfandArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: f64,
    /// exp or power:p.
    #[arg(long = "f", default_value = "exp")]
    pub nonlinearity: String,
    /// Relative bracket width.
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated, strictly decreasing list.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: String,
    #[arg(long, default_value_t = 2)]
    pub modes: usize,
    /// Comma-separated subset of eigen, torsion, gelfand, decay.
    #[arg(long, default_value = "eigen,torsion")]
    pub outputs: String,
    #[arg(long = "f", default_value = "exp")]
    pub nonlinearity: String,
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SpecfunArgs {
    #[command(subcommand)]
    pub action: SpecfunAction,
}

#[derive(Debug, Clone, Subcommand)]
pub enum SpecfunAction {
    /// Print NAME(ARGS...).
    Eval {
        name: String,
        #[arg(allow_negative_numbers = true)]
        args: Vec<f64>,
    },
}

/// Splices `--config FILE` entries in right after the subcommand name, so
/// explicit flags, which come later, take precedence.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let injected = parse_config(&text).map_err(|msg| CliError::usage(format!("{path}: {msg}")))?;
    let mut out = Vec::with_capacity(args.len() + injected.len());
    let mut it = args.into_iter();
    out.extend(it.by_ref().take(2));
    out.extend(injected.into_iter().map(OsString::from));
    out.extend(it);
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().skip(2).map(|a| a.to_string_lossy());
    while let Some(arg) = it.next() {
        if let Some(v) = arg.strip_prefix("--config=") {
            return Some(v.to_string());
        }
        if arg == "--config" {
            return it.next().map(|v| v.into_owned());
        }
    }
    None
}

/// Turns `key = value` lines into `--key value` tokens; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.starts_with('-') || key == "config" {
            return Err(format!("line {}: invalid key '{key}'", lineno + 1));
        }
        if key == "profile" {
            match value {
                "true" => tokens.push("--profile".into()),
                "false" => {}
                _ => return Err(format!("line {}: profile must be true or false", lineno + 1)),
            }
            continue;
        }
        tokens.push(format!("--{key}={value}"));
    }
    Ok(tokens)
}

pub fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::usage(format!("invalid {what} '{s}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_lines_become_flags() {
        let tokens = parse_config("# sweep\ndim = 3\neps=0.2,0.1 # trailing\n\nprofile=true\n").unwrap();
        assert_eq!(tokens, ["--dim=3", "--eps=0.2,0.1", "--profile"]);
        assert!(parse_config("dim 3").is_err());
        assert!(parse_config("--dim=3").is_err());
    }

    #[test]
    fn later_flags_override_config() {
        let args = os(&["capspec", "eigen", "--dim=2", "--eps=0.5", "--dim=4"]);
        let cli = Cli::try_parse_from(args).unwrap();
        match cli.command {
            Command::Eigen(a) => assert_eq!(a.common.dim, 4),
            _ => unreachable!(),
        }
    }

    #[test]
    fn config_path_is_found_after_subcommand() {
        assert_eq!(
            config_path(&os(&["capspec", "sweep", "--config", "a.cfg"])),
            Some("a.cfg".into())
        );
        assert_eq!(config_path(&os(&["capspec", "sweep", "--config=b"])), Some("b".into()));
        assert_eq!(config_path(&os(&["capspec", "sweep", "--dim", "3"])), None);
    }

    #[test]
    fn lists_parse() {
        assert_eq!(parse_list::<f64>("0.2, 0.1,0.05", "eps").unwrap(), [0.2, 0.1, 0.05]);
        assert!(parse_list::<f64>("0.2,x", "eps").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
