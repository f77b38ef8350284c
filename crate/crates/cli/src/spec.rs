//! Flag and config-file parsing into a validated [`ScenarioSpec`].

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use symquat::analysis::oracle::DEFAULT_SUBSTEPS;
use symquat::OrderParam;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "symquat", version, about = "Accuracy sweeps for even-order Cayley quaternion integrators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constant-rate accuracy against the closed-form attitude.
    LtiSweep(ScenarioArgs),
    /// Coning-profile accuracy against its closed-form attitude.
    SpecialLtvSweep(ScenarioArgs),
    /// Time-varying accuracy against the refined reference integrator.
    GeneralLtvOracle(ScenarioArgs),
    /// β(ℓ, c) on a grid inside each convergence domain.
    BetaTable(ScenarioArgs),
    /// Generated numerator/denominator coefficients.
    CoefficientDump(ScenarioArgs),
}

impl Command {
    pub fn split(self) -> (Scenario, ScenarioArgs) {
        match self {
            Command::LtiSweep(a) => (Scenario::LtiSweep, a),
            Command::SpecialLtvSweep(a) => (Scenario::SpecialLtvSweep, a),
            Command::GeneralLtvOracle(a) => (Scenario::GeneralLtvOracle, a),
            Command::BetaTable(a) => (Scenario::BetaTable, a),
            Command::CoefficientDump(a) => (Scenario::CoefficientDump, a),
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct ScenarioArgs {
    /// Comma-separated orders ℓ.
    #[arg(long, value_delimiter = ',')]
    pub ell: Option<Vec<u32>>,
    /// Comma-separated step sizes in seconds.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub tau: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tf: Option<f64>,
    /// Constant rate `w1,w2,w3` in rad/s.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub omega: Option<Vec<f64>>,
    /// `special` or `damped`, optionally followed by `:omega0,xi`.
    #[arg(long)]
    pub profile: Option<String>,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with the same fields; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub oracle_substeps: Option<usize>,
    /// Number of c values per order for `beta-table`.
    #[arg(long)]
    pub c_points: Option<usize>,
}

/// Config-file schema; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub ell: Option<Vec<u32>>,
    pub tau: Option<Vec<f64>>,
    pub t0: Option<f64>,
    pub tf: Option<f64>,
    pub omega: Option<Vec<f64>>,
    pub profile: Option<String>,
    pub out: Option<PathBuf>,
    pub oracle_substeps: Option<usize>,
    pub c_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    LtiSweep,
    SpecialLtvSweep,
    GeneralLtvOracle,
    BetaTable,
    CoefficientDump,
}

impl Scenario {
    pub fn id(self) -> &'static str {
        match self {
            Scenario::LtiSweep => "lti-sweep",
            Scenario::SpecialLtvSweep => "special-ltv-sweep",
            Scenario::GeneralLtvOracle => "general-ltv-oracle",
            Scenario::BetaTable => "beta-table",
            Scenario::CoefficientDump => "coefficient-dump",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Special { omega0: f64, xi: f64 },
    Damped { omega0: f64, xi: f64 },
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Special { .. } => "special",
            Profile::Damped { .. } => "damped",
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let (omega0, xi) = match params {
            None => (2.0 * PI, PI / 80.0),
            Some(p) => {
                let v = p
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}")))
                    .collect::<Result<Vec<_>, _>>()?;
                match v[..] {
                    [w, x] if w.is_finite() && x.is_finite() => (w, x),
                    _ => return Err(format!("expected two finite parameters omega0,xi in '{p}'")),
                }
            }
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "special" => Ok(Profile::Special { omega0, xi }),
            "damped" => Ok(Profile::Damped { omega0, xi }),
            other => Err(format!("unknown profile '{other}' (expected special or damped)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub orders: Vec<OrderParam>,
    pub taus: Vec<f64>,
    pub t0: f64,
    pub tf: f64,
    pub omega: [f64; 3],
    pub profile: Profile,
    pub out: Option<PathBuf>,
    pub oracle_substeps: usize,
    pub c_points: usize,
}

/// Rate used by the constant-rate sweep unless `--omega` is given.
pub fn default_omega() -> [f64; 3] {
    [
        PI * (PI / 8.0).sin(),
        -(PI / 3.0) * (PI / 8.0).cos(),
        -2.0 * (PI / 3.0).sin(),
    ]
}

struct Defaults {
    ells: Vec<u32>,
    taus: Vec<f64>,
    tf: f64,
    profile: &'static str,
}

fn defaults(scenario: Scenario) -> Defaults {
    let (ells, taus, tf, profile) = match scenario {
        Scenario::LtiSweep => (
            (1..=10).collect(),
            vec![0.8, 0.4, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001],
            2000.0,
            "special",
        ),
        Scenario::SpecialLtvSweep => (
            (1..=5).collect(),
            vec![0.8, 0.4, 0.2, 0.1, 0.05, 0.02, 0.01],
            2000.0,
            "special",
        ),
        Scenario::GeneralLtvOracle => ((1..=5).collect(), vec![1e-3], 10.0, "damped"),
        Scenario::BetaTable => ((1..=6).collect(), vec![], 0.0, "special"),
        Scenario::CoefficientDump => ((1..=10).collect(), vec![], 0.0, "special"),
    };
    Defaults {
        ells,
        taus,
        tf,
        profile,
    }
}

fn uses_grid(scenario: Scenario) -> bool {
    matches!(
        scenario,
        Scenario::LtiSweep | Scenario::SpecialLtvSweep | Scenario::GeneralLtvOracle
    )
}

pub fn load_config(path: &std::path::Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage("--config", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage("--config", format!("{}: {e}", path.display())))
}

impl ScenarioSpec {
    /// Merges flags over the config file over scenario defaults and
    /// validates the result.
    pub fn resolve(scenario: Scenario, args: ScenarioArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => load_config(p)?,
            None => FileConfig::default(),
        };
        let d = defaults(scenario);

        let ells = args.ell.or(file.ell).unwrap_or(d.ells);
        if ells.is_empty() {
            return Err(CliError::usage("--ell", "list is empty"));
        }
        let orders = ells
            .iter()
            .map(|&l| OrderParam::new(l).map_err(|e| CliError::usage("--ell", e)))
            .collect::<Result<Vec<_>, _>>()?;

        let taus = args.tau.or(file.tau).unwrap_or(d.taus);
        if uses_grid(scenario) {
            if taus.is_empty() {
                return Err(CliError::usage("--tau", "list is empty"));
            }
            if let Some(bad) = taus.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
                return Err(CliError::usage("--tau", format!("{bad} is not a positive finite step")));
            }
        }

        let t0 = args.t0.or(file.t0).unwrap_or(0.0);
        let tf = args.tf.or(file.tf).unwrap_or(d.tf);
        if uses_grid(scenario) {
            if !t0.is_finite() {
                return Err(CliError::usage("--t0", format!("{t0} is not finite")));
            }
            if !(tf.is_finite() && tf > t0) {
                return Err(CliError::usage("--tf", format!("need a finite tf > t0 = {t0}, got {tf}")));
            }
            if let Some(&tau) = taus.iter().find(|&&tau| tau > tf - t0) {
                return Err(CliError::usage("--tau", format!("{tau} exceeds the span [{t0}, {tf}]")));
            }
        }

        let omega = match args.omega.or(file.omega) {
            None => default_omega(),
            Some(v) => match v[..] {
                [a, b, c] if v.iter().all(|x| x.is_finite()) => [a, b, c],
                _ => return Err(CliError::usage("--omega", "expected three finite comma-separated values")),
            },
        };

        let profile: Profile = args
            .profile
            .or(file.profile)
            .as_deref()
            .unwrap_or(d.profile)
            .parse()
            .map_err(|e| CliError::usage("--profile", e))?;
        if let Profile::Special { omega0, .. } = profile {
            if omega0 == 0.0 {
                return Err(CliError::usage("--profile", "special profile needs omega0 != 0"));
            }
        }
        if scenario == Scenario::SpecialLtvSweep && !matches!(profile, Profile::Special { .. }) {
            return Err(CliError::usage(
                "--profile",
                "special-ltv-sweep needs the special profile (its attitude is known in closed form)",
            ));
        }

        let oracle_substeps = args.oracle_substeps.or(file.oracle_substeps).unwrap_or(DEFAULT_SUBSTEPS);
        if oracle_substeps == 0 {
            return Err(CliError::usage("--oracle-substeps", "must be at least 1"));
        }
        let c_points = args.c_points.or(file.c_points).unwrap_or(21);
        if c_points == 0 {
            return Err(CliError::usage("--c-points", "must be at least 1"));
        }

        Ok(Self {
            scenario,
            orders,
            taus: if uses_grid(scenario) { taus } else { Vec::new() },
            t0,
            tf,
            omega,
            profile,
            out: args.out.or(file.out),
            oracle_substeps,
            c_points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> ScenarioArgs {
        ScenarioArgs::default()
    }

    #[test]
    fn defaults_per_scenario() {
        let s = ScenarioSpec::resolve(Scenario::LtiSweep, args()).unwrap();
        assert_eq!(s.orders.len(), 10);
        assert_eq!((s.t0, s.tf), (0.0, 2000.0));
        assert_eq!(s.omega, default_omega());
        let s = ScenarioSpec::resolve(Scenario::GeneralLtvOracle, args()).unwrap();
        assert_eq!(s.profile.name(), "damped");
        assert_eq!(s.oracle_substeps, 256);
        let s = ScenarioSpec::resolve(Scenario::BetaTable, args()).unwrap();
        assert!(s.taus.is_empty());
    }

    #[test]
    fn usage_errors_name_the_field() {
        let cases: Vec<(ScenarioArgs, &str)> = vec![
            (ScenarioArgs { ell: Some(vec![0]), ..args() }, "--ell"),
            (ScenarioArgs { ell: Some(vec![]), ..args() }, "--ell"),
            (ScenarioArgs { tau: Some(vec![0.1, -1.0]), ..args() }, "--tau"),
            (ScenarioArgs { tf: Some(-1.0), ..args() }, "--tf"),
            (ScenarioArgs { omega: Some(vec![1.0, 2.0]), ..args() }, "--omega"),
            (ScenarioArgs { profile: Some("wobbly".into()), ..args() }, "--profile"),
            (ScenarioArgs { oracle_substeps: Some(0), ..args() }, "--oracle-substeps"),
        ];
        for (a, field) in cases {
            match ScenarioSpec::resolve(Scenario::LtiSweep, a) {
                Err(CliError::Usage(msg)) => assert!(msg.contains(field), "{msg}"),
                other => panic!("expected usage error for {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn special_sweep_rejects_damped_profile() {
        let a = ScenarioArgs {
            profile: Some("damped".into()),
            ..args()
        };
        assert!(matches!(
            ScenarioSpec::resolve(Scenario::SpecialLtvSweep, a),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn profile_parsing() {
        assert_eq!(
            "special:3,0.5".parse::<Profile>().unwrap(),
            Profile::Special { omega0: 3.0, xi: 0.5 }
        );
        assert_eq!(
            "Damped".parse::<Profile>().unwrap(),
            Profile::Damped {
                omega0: 2.0 * PI,
                xi: PI / 80.0
            }
        );
        assert!("special:1".parse::<Profile>().is_err());
        assert!("special:1,x".parse::<Profile>().is_err());
    }
}
