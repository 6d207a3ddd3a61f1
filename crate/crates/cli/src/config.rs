//! Run configuration: command-line flags over a flat key-value file over
//! built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use num_complex::Complex64;
use pfpart::kernels::contour::QuadratureSettings;
use pfpart::measures::{PlancherelParams, ZMeasureParams};
use pfpart::oracle::MeasureEvaluator;
use pfpart::{KernelFamily, KernelSettings, Route, Specialization};
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const DEFAULT_N_CUT: u32 = 40;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Flags shared by every subcommand. Each one may also come from the
/// config file under the same name.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// z | plancherel | generic (aliases z_theta2, plancherel_theta2, generic_pi)
    #[arg(long)]
    pub family: Option<String>,
    /// z parameter, real or complex such as 2.5+0.4i
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// JSON list of e_k coefficients for the generic family
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    /// contour | series | closed
    #[arg(long)]
    pub route: Option<String>,
    /// Largest partition size (measure tables and the oracle)
    #[arg(long = "n-cut")]
    pub n_cut: Option<u32>,
    /// Oracle tail tolerance and discrepancy bound
    #[arg(long)]
    pub tol: Option<f64>,
    /// Contour radius for both integration variables
    #[arg(long)]
    pub radius: Option<f64>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Compare against brute-force enumeration
    #[arg(long)]
    pub oracle: bool,
    /// Flat key-value (TOML) file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("format must be csv or json, got '{other}'"))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    Z { z: Complex64, xi: f64 },
    Plancherel { eta: f64 },
    Generic { path: PathBuf, spec: Specialization },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Z { .. } => "z",
            Family::Plancherel { .. } => "plancherel",
            Family::Generic { .. } => "generic",
        }
    }

    pub fn kernel_family(&self) -> KernelFamily {
        match self {
            Family::Z { z, xi } => KernelFamily::ZMeasure { z: *z, xi: *xi },
            Family::Plancherel { eta } => KernelFamily::Plancherel { eta: *eta },
            Family::Generic { spec, .. } => KernelFamily::Generic(spec.clone()),
        }
    }

    pub fn measure(&self) -> Result<MeasureEvaluator, CliError> {
        Ok(match self {
            Family::Z { z, xi } => MeasureEvaluator::ZMixed(ZMeasureParams::theta2(*z, *xi).map_err(config)?),
            Family::Plancherel { eta } => MeasureEvaluator::Plancherel(PlancherelParams::new(*eta).map_err(config)?),
            Family::Generic { spec, .. } => MeasureEvaluator::Schur2(spec.clone()),
        })
    }

    pub fn default_route(&self) -> Route {
        match self {
            Family::Generic { .. } => Route::Series,
            _ => Route::Closed,
        }
    }

    fn describe(&self, out: &mut Map<String, Value>) {
        out.insert("family".into(), json!(self.name()));
        match self {
            Family::Z { z, xi } => {
                out.insert("z".into(), complex_json(*z));
                out.insert("xi".into(), json!(xi));
            }
            Family::Plancherel { eta } => {
                out.insert("eta".into(), json!(eta));
            }
            Family::Generic { path, .. } => {
                out.insert("coefficients".into(), json!(path.display().to_string()));
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub family: Option<Family>,
    route: Option<Route>,
    pub n_cut: u32,
    pub tol: f64,
    pub radius: Option<f64>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub oracle: bool,
    config_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(flags: &CommonArgs) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_config_file(path)?,
            None => CommonArgs::default(),
        };
        let merged = CommonArgs {
            family: flags.family.clone().or(file.family),
            z: flags.z.clone().or(file.z),
            xi: flags.xi.or(file.xi),
            eta: flags.eta.or(file.eta),
            coefficients: flags.coefficients.clone().or(file.coefficients),
            route: flags.route.clone().or(file.route),
            n_cut: flags.n_cut.or(file.n_cut),
            tol: flags.tol.or(file.tol),
            radius: flags.radius.or(file.radius),
            format: flags.format.clone().or(file.format),
            output: flags.output.clone().or(file.output),
            oracle: flags.oracle || file.oracle,
            config: flags.config.clone(),
        };
        Self::validate(merged)
    }

    fn validate(args: CommonArgs) -> Result<Self, CliError> {
        let family = match args.family.as_deref() {
            None => None,
            Some(name) => Some(parse_family(name, &args)?),
        };
        let route = args
            .route
            .as_deref()
            .map(|r| r.parse::<Route>().map_err(config))
            .transpose()?;
        let tol = args.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {tol}")));
        }
        if let Some(r) = args.radius {
            if !(r > 1.0 && r.is_finite()) {
                return Err(CliError::Config(format!("radius must exceed 1, got {r}")));
            }
        }
        let config = Self {
            family,
            route,
            n_cut: args.n_cut.unwrap_or(DEFAULT_N_CUT),
            tol,
            radius: args.radius,
            format: args
                .format
                .as_deref()
                .map(Format::parse)
                .transpose()?
                .unwrap_or(Format::Csv),
            output: args.output,
            oracle: args.oracle,
            config_path: args.config,
        };
        if let (Some(Route::Closed), Some(Family::Generic { .. })) = (config.route, &config.family) {
            return Err(CliError::Config("route closed needs the z or plancherel family".into()));
        }
        Ok(config)
    }

    pub fn require_family(&self) -> Result<&Family, CliError> {
        self.family
            .as_ref()
            .ok_or_else(|| CliError::Config("--family is required (z, plancherel or generic)".into()))
    }

    pub fn route_for(&self, family: &Family) -> Route {
        self.route.unwrap_or_else(|| family.default_route())
    }

    pub fn kernel_settings(&self) -> KernelSettings {
        KernelSettings {
            quadrature: QuadratureSettings {
                radius: self.radius,
                radius2: self.radius,
                ..QuadratureSettings::default()
            },
            ..KernelSettings::default()
        }
    }

    /// The effective configuration, echoed into every output.
    pub fn metadata(&self, command: &str) -> Map<String, Value> {
        let mut out = Map::new();
        out.insert("command".into(), json!(command));
        out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if let Some(family) = &self.family {
            family.describe(&mut out);
            out.insert("route".into(), json!(self.route_for(family).as_str()));
        }
        out.insert("n_cut".into(), json!(self.n_cut));
        out.insert("tol".into(), json!(self.tol));
        out.insert("radius".into(), self.radius.map_or(Value::Null, |r| json!(r)));
        out.insert("format".into(), json!(self.format.as_str()));
        out.insert("oracle".into(), json!(self.oracle));
        if let Some(path) = &self.config_path {
            out.insert("config".into(), json!(path.display().to_string()));
        }
        out
    }
}

pub fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn config(e: pfpart::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn parse_family(name: &str, args: &CommonArgs) -> Result<Family, CliError> {
    match name {
        "z" | "z_theta2" => {
            let raw = args
                .z
                .as_deref()
                .ok_or_else(|| CliError::Config("family z needs --z".into()))?;
            let z: Complex64 = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("cannot parse z = '{raw}'")))?;
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(CliError::Config(format!("z must be finite, got {raw}")));
            }
            let xi = args.xi.ok_or_else(|| CliError::Config("family z needs --xi".into()))?;
            if !(xi > 0.0 && xi < 1.0) {
                return Err(CliError::Config(format!("xi must satisfy 0 < xi < 1, got {xi}")));
            }
            Ok(Family::Z { z, xi })
        }
        "plancherel" | "plancherel_theta2" => {
            let eta = args
                .eta
                .ok_or_else(|| CliError::Config("family plancherel needs --eta".into()))?;
            if eta == 0.0 || !eta.is_finite() {
                return Err(CliError::Config(format!("eta must be finite and non-zero, got {eta}")));
            }
            Ok(Family::Plancherel { eta })
        }
        "generic" | "generic_pi" => {
            let path = args
                .coefficients
                .clone()
                .ok_or_else(|| CliError::Config("family generic needs --coefficients <file.json>".into()))?;
            let text =
                fs::read_to_string(&path).map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
            let spec = Specialization::from_json(&text).map_err(config)?;
            Ok(Family::Generic { path, spec })
        }
        other => Err(CliError::Config(format!(
            "unknown family '{other}' (expected z, plancherel or generic)"
        ))),
    }
}

fn read_config_file(path: &Path) -> Result<CommonArgs, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Config(format!("reading config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
    let mut args = CommonArgs::default();
    for (key, value) in &table {
        let bad = || CliError::Config(format!("config key '{key}' has an invalid value {value}"));
        let string = || value.as_str().map(str::to_owned).ok_or_else(bad);
        let float = || match value {
            toml::Value::Float(f) => Ok(*f),
            toml::Value::Integer(i) => Ok(*i as f64),
            _ => Err(bad()),
        };
        match key.as_str() {
            "family" => args.family = Some(string()?),
            "z" => {
                args.z = Some(match value {
                    toml::Value::String(s) => s.clone(),
                    _ => float()?.to_string(),
                })
            }
            "xi" => args.xi = Some(float()?),
            "eta" => args.eta = Some(float()?),
            "coefficients" => args.coefficients = Some(PathBuf::from(string()?)),
            "route" => args.route = Some(string()?),
            "n-cut" | "n_cut" => {
                let n = value.as_integer().ok_or_else(bad)?;
                args.n_cut = Some(u32::try_from(n).map_err(|_| bad())?);
            }
            "tol" => args.tol = Some(float()?),
            "radius" => args.radius = Some(float()?),
            "format" => args.format = Some(string()?),
            "output" => args.output = Some(PathBuf::from(string()?)),
            "oracle" => args.oracle = value.as_bool().ok_or_else(bad)?,
            other => return Err(CliError::Config(format!("unknown config key '{other}'"))),
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> CommonArgs {
        CommonArgs::default()
    }

    #[test]
    fn xi_out_of_range_is_rejected() {
        let args = CommonArgs {
            family: Some("z".into()),
            z: Some("2.5".into()),
            xi: Some(1.2),
            ..flags()
        };
        let err = RunConfig::resolve(&args).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("0 < xi < 1"));
    }

    #[test]
    fn complex_z_parses() {
        let args = CommonArgs {
            family: Some("z_theta2".into()),
            z: Some("2.2+0.4i".into()),
            xi: Some(0.3),
            ..flags()
        };
        match RunConfig::resolve(&args).unwrap().family {
            Some(Family::Z { z, .. }) => assert_eq!(z, Complex64::new(2.2, 0.4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "family = \"plancherel\"\neta = 0.5\nn-cut = 12\nformat = \"json\"\n",
        )
        .unwrap();
        let args = CommonArgs {
            eta: Some(0.8),
            config: Some(path),
            ..flags()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert!(matches!(cfg.family, Some(Family::Plancherel { eta }) if eta == 0.8));
        assert_eq!(cfg.n_cut, 12);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.tol, DEFAULT_TOL);
    }

    #[test]
    fn unknown_file_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "colour = \"blue\"\n").unwrap();
        let err = RunConfig::resolve(&CommonArgs {
            config: Some(path),
            ..flags()
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn closed_route_rejected_for_generic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.json");
        fs::write(&path, "[1, 0.5, 0.1]").unwrap();
        let err = RunConfig::resolve(&CommonArgs {
            family: Some("generic".into()),
            coefficients: Some(path),
            route: Some("closed".into()),
            ..flags()
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
