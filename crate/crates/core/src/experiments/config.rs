use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::field::Palette;
use crate::gmc::Normalizer;
use crate::sampler::Backend;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    FieldSample,
    MaxScan,
    ThickPoints,
    Freezing,
    Covariance,
    Clt,
    Gmc,
    MomentsCheck,
    WwScan,
    KostlanTail,
    Ward,
    KernelGap,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 12] = [
        ExperimentName::FieldSample,
        ExperimentName::MaxScan,
        ExperimentName::ThickPoints,
        ExperimentName::Freezing,
        ExperimentName::Covariance,
        ExperimentName::Clt,
        ExperimentName::Gmc,
        ExperimentName::MomentsCheck,
        ExperimentName::WwScan,
        ExperimentName::KostlanTail,
        ExperimentName::Ward,
        ExperimentName::KernelGap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::FieldSample => "field-sample",
            ExperimentName::MaxScan => "max-scan",
            ExperimentName::ThickPoints => "thick-points",
            ExperimentName::Freezing => "freezing",
            ExperimentName::Covariance => "covariance",
            ExperimentName::Clt => "clt",
            ExperimentName::Gmc => "gmc",
            ExperimentName::MomentsCheck => "moments-check",
            ExperimentName::WwScan => "ww-scan",
            ExperimentName::KostlanTail => "kostlan-tail",
            ExperimentName::Ward => "ward",
            ExperimentName::KernelGap => "kernel-gap",
        }
    }
}

impl std::str::FromStr for ExperimentName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// Square window `[-half, half]²` with `side` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GridSpec {
    pub half: f64,
    pub side: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub n_list: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub r: f64,
    pub beta: f64,
    pub beta_list: Vec<f64>,
    pub gamma: f64,
    pub alpha: f64,
    pub eps0: f64,
    /// Fixed smoothing scale; `None` means `N^{alpha - 1/2}`.
    pub eps: Option<f64>,
    pub delta: f64,
    pub t_list: Vec<f64>,
    pub points: Vec<C>,
    pub backend: Backend,
    pub normalizer: Normalizer,
    pub palette: Palette,
    pub heatmaps: bool,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    /// Directory of `.eig` files reused across runs.
    pub cache_dir: Option<PathBuf>,
}

/// Keys that describe where and how fast to run, not what to compute; they
/// are left out of the report so reruns elsewhere compare equal.
const ENVIRONMENT_KEYS: [&str; 3] = ["threads", "out-dir", "cache-dir"];

impl ExperimentConfig {
    /// Desk-sized defaults for each experiment.
    pub fn preset(name: ExperimentName) -> Self {
        let mut c = ExperimentConfig {
            name,
            n_list: vec![512],
            replicas: 10,
            seed: 42,
            grid: GridSpec { half: 0.8, side: 256 },
            r: 0.8,
            beta: 0.35,
            beta_list: vec![1.0, 2.0, 8f64.sqrt(), 4.0],
            gamma: 1.0,
            alpha: 0.2,
            eps0: 0.25,
            eps: None,
            delta: 0.5,
            t_list: vec![0.0, 1.0],
            points: vec![C::new(0.0, 0.0)],
            backend: Backend::HessenbergModel,
            normalizer: Normalizer::Empirical,
            palette: Palette::Viridis,
            heatmaps: false,
            threads: None,
            out_dir: PathBuf::from("ginfield-out"),
            cache_dir: None,
        };
        match name {
            ExperimentName::FieldSample => {
                c.replicas = 1;
                c.grid = GridSpec { half: 1.2, side: 512 };
                c.heatmaps = true;
            }
            ExperimentName::MaxScan => {
                c.n_list = vec![256, 512];
                c.alpha = 0.25;
            }
            ExperimentName::ThickPoints => c.n_list = vec![256, 512, 1024],
            ExperimentName::Freezing => c.replicas = 5,
            ExperimentName::Covariance => {
                c.replicas = 100;
                c.r = 0.3;
            }
            ExperimentName::Clt => {
                c.n_list = vec![1024];
                c.replicas = 2000;
                c.grid = GridSpec { half: 0.3, side: 801 };
            }
            ExperimentName::Gmc => {
                c.n_list = vec![256, 1024];
                c.replicas = 100;
                c.grid = GridSpec { half: 0.25, side: 65 };
                c.heatmaps = true;
            }
            ExperimentName::MomentsCheck => {
                c.n_list = vec![1, 4, 6];
                c.replicas = 100_000;
                c.points = vec![C::new(0.2, 0.0), C::new(-0.3, 0.1)];
            }
            ExperimentName::WwScan => {
                c.n_list = vec![256, 1024, 4096];
                c.gamma = 2.0;
                c.replicas = 10_000;
            }
            ExperimentName::KostlanTail => {
                c.n_list = vec![256];
                c.replicas = 10_000;
                c.backend = Backend::KostlanRadii;
            }
            ExperimentName::Ward => {
                c.n_list = vec![64];
                c.replicas = 100_000;
                c.eps = Some(0.5);
                c.r = 0.5;
                // a bump centred at the origin averages to zero by rotation
                c.points = vec![C::new(0.15, -0.1)];
            }
            ExperimentName::KernelGap => {
                c.n_list = vec![48, 96];
                c.replicas = 400;
                c.beta = 1.5;
                c.eps = Some(0.3);
                c.t_list = vec![1.0];
            }
        }
        c
    }

    /// Larger field-sample presets: `fig1` (field at
    /// N = 3000), `fig2` (level bands at N = 5000), `fig3` (normalized
    /// characteristic polynomial at N = 3000).
    pub fn figure(tag: &str) -> Result<Self> {
        let mut c = Self::preset(ExperimentName::FieldSample);
        c.grid = GridSpec { half: 1.2, side: 1024 };
        match tag {
            "fig1" => c.n_list = vec![3000],
            "fig2" => {
                c.n_list = vec![5000];
                c.palette = Palette::Levels;
            }
            "fig3" => {
                c.n_list = vec![3000];
                c.gamma = 1.0;
                c.palette = Palette::Grayscale;
            }
            other => return Err(Error::Config(format!("unknown figure preset {other:?}"))),
        }
        Ok(c)
    }

    /// `base` with the keys present in `overrides` replaced (objects merge
    /// recursively).
    pub fn merged(base: &Self, overrides: &Value) -> Result<Self> {
        let mut v = serde_json::to_value(base)?;
        merge(&mut v, overrides);
        serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            let at = if path == "." { String::new() } else { format!(".{path}") };
            Error::Config(format!("config{at}: {}", e.into_inner()))
        })
    }

    /// Reads a JSON config; missing keys take the preset of its `name`.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        let name = v
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Config("config.name: missing experiment name".into()))?
            .parse()?;
        Self::merged(&Self::preset(name), &v)
    }

    /// The config as echoed into reports.
    pub fn echo(&self) -> Result<Value> {
        let mut v = serde_json::to_value(self)?;
        if let Value::Object(map) = &mut v {
            for k in ENVIRONMENT_KEYS {
                map.remove(k);
            }
        }
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        use ExperimentName::*;
        let bad = |field: &str, msg: String| Err(Error::Config(format!("config.{field}: {msg}")));
        if self.n_list.is_empty() {
            return bad("n-list", "at least one N is required".into());
        }
        if let Some(i) = self.n_list.iter().position(|&n| n == 0) {
            return bad(&format!("n-list[{i}]"), "N must be positive".into());
        }
        if self.replicas == 0 {
            return bad("replicas", "must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads", "must be positive".into());
        }
        let needs_angles = !matches!(self.name, KostlanTail | MomentsCheck | WwScan | KernelGap | Clt | Gmc);
        if needs_angles && self.backend == Backend::KostlanRadii {
            return bad("backend", format!("{} needs eigenvalue angles", self.name.as_str()));
        }
        if self.backend == Backend::DppKernel && self.n_list.iter().any(|&n| n > 512) {
            return bad("backend", "dpp-kernel is limited to N <= 512".into());
        }
        let uses_grid = matches!(self.name, FieldSample | MaxScan | ThickPoints | Freezing | Clt | Gmc);
        if uses_grid {
            if self.grid.side < 3 {
                return bad("grid.side", "need at least 3 nodes per axis".into());
            }
            if !(self.grid.half > 0.0 && self.grid.half.is_finite()) {
                return bad("grid.half", "must be positive".into());
            }
        }
        let r_in_unit = matches!(self.name, MaxScan | ThickPoints | Freezing);
        if r_in_unit {
            if !(self.r > 0.0 && self.r < 1.0) {
                return bad("r", format!("must lie in (0, 1), got {}", self.r));
            }
            if self.grid.half < self.r {
                return bad("grid.half", format!("window must cover D_r, r = {}", self.r));
            }
        }
        let uses_mollifier = matches!(self.name, MaxScan | Clt | Gmc | Ward | KernelGap);
        if uses_mollifier && !(self.eps0 > 0.0 && self.eps0 <= 0.25) {
            return bad("eps0", format!("must lie in (0, 1/4], got {}", self.eps0));
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e <= 1.0) {
                return bad("eps", format!("must lie in (0, 1], got {e}"));
            }
        }
        if matches!(self.name, MaxScan | Clt | Gmc) && self.eps.is_none() && !(self.alpha > 0.0 && self.alpha < 0.5) {
            return bad("alpha", format!("must lie in (0, 1/2), got {}", self.alpha));
        }
        match self.name {
            ThickPoints if !(self.beta >= 0.0) => bad("beta", "must be non-negative".into()),
            ThickPoints if self.n_list.len() < 2 => bad("n-list", "the decay fit needs at least two N".into()),
            Freezing if self.beta_list.is_empty() || self.beta_list.iter().any(|b| !(*b > 0.0)) => {
                bad("beta-list", "needs positive values".into())
            }
            Covariance if !(self.r > 0.05 && self.r < 0.9) => bad("r", "largest offset must lie in (0.05, 0.9)".into()),
            Covariance | Clt | Freezing | MaxScan | ThickPoints if self.replicas < 2 => {
                bad("replicas", "statistics need at least two replicas".into())
            }
            Covariance | Clt | WwScan if self.points.is_empty() => bad("points", "one point is required".into()),
            Clt if self.points[0].norm() + self.eps0 >= 1.0 => bad("points[0]", "D(z, eps0) must lie inside the unit disk".into()),
            Clt if self.grid.half < self.points[0].norm() + self.eps0 + 2.0 * self.grid_spacing() => {
                bad("grid.half", "window must cover D(z, eps0) with a margin".into())
            }
            Gmc if !(self.gamma > 0.0) => bad("gamma", "must be positive".into()),
            Gmc if self.grid.half < self.eps0 => bad("grid.half", "window must cover D(0, eps0)".into()),
            Gmc if self.replicas < 2 => bad("replicas", "the mass distribution needs replicas".into()),
            MomentsCheck if self.points.is_empty() || self.points.len() > 8 => bad("points", "need 1 to 8 points".into()),
            WwScan if !(self.gamma > -2.0) => bad("gamma", "must exceed -2".into()),
            KostlanTail if !(self.delta > 0.0 && self.delta <= 1.0) => bad("delta", "must lie in (0, 1]".into()),
            Ward if self.t_list.iter().any(|t| !(0.0..=1.0).contains(t)) => bad("t-list", "values must lie in [0, 1]".into()),
            Ward if !(self.r > 0.0) => bad("r", "bump radius must be positive".into()),
            KernelGap if self.t_list.len() != 1 || !(0.0..=1.0).contains(&self.t_list[0]) => {
                bad("t-list", "exactly one t in [0, 1] is required".into())
            }
            KernelGap if self.n_list.iter().any(|&n| n > 128) => bad("n-list", "kernel tables are limited to degree 128".into()),
            MaxScan if !(self.delta >= 0.0 && self.delta < 1.0) => bad("delta", "must lie in [0, 1)".into()),
            _ => Ok(()),
        }
    }

    pub fn grid_spacing(&self) -> f64 {
        2.0 * self.grid.half / (self.grid.side.max(2) - 1) as f64
    }

    /// Smoothing scale at size `n`.
    pub fn smoothing_scale(&self, n: usize) -> f64 {
        self.eps.unwrap_or_else(|| (n as f64).powf(self.alpha - 0.5))
    }
}

fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_roundtrip() {
        for name in ExperimentName::ALL {
            let c = ExperimentConfig::preset(name);
            c.validate().unwrap_or_else(|e| panic!("{}: {e}", name.as_str()));
            let text = serde_json::to_string(&c).unwrap();
            assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
            assert_eq!(name.as_str().parse::<ExperimentName>().unwrap(), name);
        }
        for tag in ["fig1", "fig2", "fig3"] {
            ExperimentConfig::figure(tag).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn partial_json_takes_preset_defaults() {
        let c = ExperimentConfig::from_json(r#"{"name": "max-scan", "n-list": [100], "grid": {"side": 64}}"#).unwrap();
        assert_eq!(c.n_list, vec![100]);
        assert_eq!(c.grid, GridSpec { half: 0.8, side: 64 });
        assert_eq!(c.replicas, ExperimentConfig::preset(ExperimentName::MaxScan).replicas);
    }

    #[test]
    fn errors_name_the_field() {
        let msg = |json: &str| ExperimentConfig::from_json(json).and_then(|c| c.validate()).unwrap_err().to_string();
        assert!(msg(r#"{"name": "thick-points", "r": 1.5}"#).contains("config.r"));
        assert!(msg(r#"{"name": "gmc", "eps0": 0.3}"#).contains("config.eps0"));
        assert!(msg(r#"{"name": "max-scan", "n-list": [10, 0]}"#).contains("config.n-list[1]"));
        assert!(msg(r#"{"name": "ward", "bogus": 1}"#).contains("bogus"));
        assert!(msg(r#"{"name": "gmc", "palette": "nope"}"#).contains("config.palette"));
        assert!(msg(r#"{"name": "gmc", "grid": {"side": -1}}"#).contains("config.grid.side"));
        assert!(msg(r#"{"name": "nope"}"#).contains("unknown experiment"));
        assert!(msg(r#"{"name": "field-sample", "backend": "kostlan-radii"}"#).contains("config.backend"));
    }

    #[test]
    fn echo_drops_environment() {
        let mut c = ExperimentConfig::preset(ExperimentName::Ward);
        c.threads = Some(3);
        c.cache_dir = Some("/tmp/x".into());
        let v = c.echo().unwrap();
        assert!(v.get("threads").is_none() && v.get("out-dir").is_none() && v.get("cache-dir").is_none());
        assert_eq!(v["n-list"], serde_json::json!([64]));
    }
}
