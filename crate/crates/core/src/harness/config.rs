//! Experiment configuration: a JSON file, command-line flags, or both
//! (flags win).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::Scheme;
use crate::error::{Error, Result};
use crate::kernel::Boundary;
use crate::rotation::DtRule;
use crate::vlasov::Problem;
use crate::wpfc::WeightParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Advect1dGaussian,
    Advect1dSine,
    Advect1dComposite,
    Rotation3d,
    Dispersion,
    TwoStream,
    BumpOnTail,
    Landau,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Advect1dGaussian,
        Experiment::Advect1dSine,
        Experiment::Advect1dComposite,
        Experiment::Rotation3d,
        Experiment::Dispersion,
        Experiment::TwoStream,
        Experiment::BumpOnTail,
        Experiment::Landau,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Advect1dGaussian => "advect1d_gaussian",
            Experiment::Advect1dSine => "advect1d_sine",
            Experiment::Advect1dComposite => "advect1d_composite",
            Experiment::Rotation3d => "rotation3d",
            Experiment::Dispersion => "dispersion",
            Experiment::TwoStream => "two_stream",
            Experiment::BumpOnTail => "bump_on_tail",
            Experiment::Landau => "landau",
        }
    }

    pub fn problem(&self) -> Option<Problem> {
        match self {
            Experiment::TwoStream => Some(Problem::TwoStream),
            Experiment::BumpOnTail => Some(Problem::BumpOnTail),
            Experiment::Landau => Some(Problem::Landau),
            _ => None,
        }
    }

    fn default_schemes(&self) -> Vec<Scheme> {
        match self {
            Experiment::Advect1dGaussian | Experiment::Advect1dSine | Experiment::Rotation3d => {
                vec![Scheme::Linear5, Scheme::Wpfc5]
            }
            Experiment::Advect1dComposite => vec![Scheme::Linear5, Scheme::Pfc3Extended, Scheme::Wpfc5],
            Experiment::Dispersion => vec![Scheme::Wpfc5],
            Experiment::TwoStream | Experiment::BumpOnTail | Experiment::Landau => vec![Scheme::Wpfc5],
        }
    }

    fn default_resolutions(&self, long: bool) -> Vec<usize> {
        match self {
            Experiment::Advect1dGaussian | Experiment::Advect1dSine => vec![32, 64, 128, 256],
            Experiment::Advect1dComposite => vec![200],
            Experiment::Rotation3d if long => vec![32, 64, 128],
            Experiment::Rotation3d => vec![32, 64],
            Experiment::Dispersion => vec![crate::dispersion::DEFAULT_SCAN_CELLS],
            Experiment::TwoStream | Experiment::BumpOnTail | Experiment::Landau => vec![128],
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotFormat {
    Csv,
    #[default]
    Binary,
}

/// Every setting optional; one of these comes from the file and one from
/// the flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub experiment: Option<Experiment>,
    pub scheme: Option<Vec<Scheme>>,
    pub n: Option<Vec<usize>>,
    pub c: Option<f64>,
    pub p: Option<f64>,
    pub eps: Option<f64>,
    pub dt: Option<f64>,
    pub dt_rule: Option<DtRule>,
    pub t_end: Option<f64>,
    pub out: Option<PathBuf>,
    pub long: Option<bool>,
    pub workers: Option<usize>,
    pub diag_every: Option<usize>,
    pub snapshot_every: Option<f64>,
    pub snapshot_format: Option<SnapshotFormat>,
    pub v_boundary: Option<Boundary>,
    pub scan_points: Option<usize>,
}

impl PartialConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(self, top: PartialConfig) -> PartialConfig {
        PartialConfig {
            experiment: top.experiment.or(self.experiment),
            scheme: top.scheme.or(self.scheme),
            n: top.n.or(self.n),
            c: top.c.or(self.c),
            p: top.p.or(self.p),
            eps: top.eps.or(self.eps),
            dt: top.dt.or(self.dt),
            dt_rule: top.dt_rule.or(self.dt_rule),
            t_end: top.t_end.or(self.t_end),
            out: top.out.or(self.out),
            long: top.long.or(self.long),
            workers: top.workers.or(self.workers),
            diag_every: top.diag_every.or(self.diag_every),
            snapshot_every: top.snapshot_every.or(self.snapshot_every),
            snapshot_format: top.snapshot_format.or(self.snapshot_format),
            v_boundary: top.v_boundary.or(self.v_boundary),
            scan_points: top.scan_points.or(self.scan_points),
        }
    }
}

/// Validated settings with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub schemes: Vec<Scheme>,
    pub resolutions: Vec<usize>,
    pub params: WeightParams,
    /// Vlasov time step.
    pub dt: f64,
    pub dt_rule: DtRule,
    /// Overrides the experiment's end time.
    pub t_end: Option<f64>,
    pub out: PathBuf,
    pub long: bool,
    pub workers: Option<usize>,
    pub diag_every: usize,
    pub snapshot_every: Option<f64>,
    pub snapshot_format: SnapshotFormat,
    pub v_boundary: Boundary,
    pub scan_points: usize,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("`{name}` must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn resolve(partial: PartialConfig) -> Result<Self> {
        let experiment = partial.experiment.ok_or_else(|| Error::Config("no experiment given".into()))?;
        let long = partial.long.unwrap_or(false);
        let schemes = partial.scheme.unwrap_or_else(|| experiment.default_schemes());
        if schemes.is_empty() {
            return Err(Error::Config("empty scheme list".into()));
        }
        let resolutions = partial.n.unwrap_or_else(|| experiment.default_resolutions(long));
        if resolutions.is_empty() || resolutions.contains(&0) {
            return Err(Error::Config(format!("resolutions must be positive, got {resolutions:?}")));
        }
        let defaults = WeightParams::default();
        let params = WeightParams {
            c: positive("c", partial.c.unwrap_or(defaults.c))?,
            p: positive("p", partial.p.unwrap_or(defaults.p))?,
            eps: positive("eps", partial.eps.unwrap_or(defaults.eps))?,
        };
        let dt = positive("dt", partial.dt.unwrap_or(0.01))?;
        let t_end = partial.t_end.map(|t| positive("t_end", t)).transpose()?;
        let snapshot_every = partial.snapshot_every.map(|t| positive("snapshot_every", t)).transpose()?;
        let diag_every = partial.diag_every.unwrap_or(10);
        if diag_every == 0 {
            return Err(Error::Config("`diag_every` must be at least 1".into()));
        }
        if partial.workers == Some(0) {
            return Err(Error::Config("`workers` must be at least 1".into()));
        }
        let scan_points = partial.scan_points.unwrap_or(401);
        if scan_points == 0 {
            return Err(Error::Config("`scan_points` must be at least 1".into()));
        }
        Ok(Self {
            experiment,
            schemes,
            resolutions,
            params,
            dt,
            dt_rule: partial.dt_rule.unwrap_or(DtRule::Paper),
            t_end,
            out: partial.out.unwrap_or_else(|| PathBuf::from("results")),
            long,
            workers: partial.workers,
            diag_every,
            snapshot_every,
            snapshot_format: partial.snapshot_format.unwrap_or_default(),
            v_boundary: partial.v_boundary.unwrap_or(Boundary::ZeroFlux),
            scan_points,
        })
    }
}

/// Reads the optional config file and lays the flags over it.
pub fn parse_config(path: Option<&Path>, flags: PartialConfig) -> Result<ExperimentConfig> {
    let base = match path {
        Some(p) => PartialConfig::from_file(p)?,
        None => PartialConfig::default(),
    };
    ExperimentConfig::resolve(base.overlay(flags))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(e: Experiment) -> PartialConfig {
        PartialConfig { experiment: Some(e), ..Default::default() }
    }

    #[test]
    fn defaults_are_paper_settings() {
        let c = parse_config(None, flags(Experiment::Landau)).unwrap();
        assert_eq!(c.params, WeightParams { c: 0.5, p: 0.5, eps: 1e-7 });
        assert_eq!(c.dt, 0.01);
        assert_eq!(c.resolutions, vec![128]);
        assert_eq!(c.v_boundary, Boundary::ZeroFlux);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = PartialConfig::from_json(r#"{"experiment": "landau", "cfl": 0.3}"#).unwrap_err();
        assert!(err.to_string().contains("`cfl`"), "{err}");
    }

    #[test]
    fn duplicate_key_is_named() {
        let err = PartialConfig::from_json(r#"{"eps": 1e-7, "eps": 1e-8}"#).unwrap_err();
        assert!(err.to_string().contains("duplicate field `eps`"), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"experiment": "advect1d_sine", "n": [32, 64, 128], "c": 0.25}"#).unwrap();
        let c = parse_config(Some(&path), PartialConfig { c: Some(0.75), ..Default::default() }).unwrap();
        assert_eq!(c.experiment, Experiment::Advect1dSine);
        assert_eq!(c.resolutions, vec![32, 64, 128]);
        assert_eq!(c.params.c, 0.75);
    }

    #[test]
    fn out_of_range_rejected() {
        for bad in [
            PartialConfig { eps: Some(0.0), ..flags(Experiment::Dispersion) },
            PartialConfig { p: Some(-1.0), ..flags(Experiment::Dispersion) },
            PartialConfig { n: Some(vec![32, 0]), ..flags(Experiment::Advect1dSine) },
            PartialConfig { dt: Some(f64::NAN), ..flags(Experiment::Landau) },
            PartialConfig::default(),
        ] {
            assert!(matches!(ExperimentConfig::resolve(bad), Err(Error::Config(_))));
        }
    }

    #[test]
    fn long_adds_largest_rotation_grid() {
        let c = parse_config(None, PartialConfig { long: Some(true), ..flags(Experiment::Rotation3d) }).unwrap();
        assert_eq!(c.resolutions, vec![32, 64, 128]);
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            let json = serde_json::to_string(&e).unwrap();
            assert_eq!(json, format!("\"{}\"", e.name()));
        }
    }
}
