use std::path::Path;

use monogenic::{
    ComponentMap64, DomainBox, Frame64, GMap, LeftGMap64, Point64, Point3, Quat64, RightGMap64,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub frame: Frame64,
    pub map: MapSpec,
    #[serde(default = "default_domain")]
    pub domain: DomainSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSpec {
    RightG(FSet),
    LeftG(FSet),
    Components(USet),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FSet {
    #[serde(rename = "F1")]
    pub f1: String,
    #[serde(rename = "F2")]
    pub f2: String,
    #[serde(rename = "F3")]
    pub f3: String,
    #[serde(rename = "F4")]
    pub f4: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct USet {
    #[serde(rename = "U1")]
    pub u1: String,
    #[serde(rename = "U2")]
    pub u2: String,
    #[serde(rename = "U3")]
    pub u3: String,
    #[serde(rename = "U4")]
    pub u4: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

fn default_domain() -> DomainSpec {
    DomainSpec { min: [-1.0; 3], max: [1.0; 3] }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Scaled residual threshold used by the classifier.
    #[serde(default)]
    pub classify: Option<f64>,
}

pub enum LoadedMap {
    Right(RightGMap64),
    Left(LeftGMap64),
    Components(ComponentMap64),
}

impl LoadedMap {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedMap::Right(_) => "right_g",
            LoadedMap::Left(_) => "left_g",
            LoadedMap::Components(_) => "components",
        }
    }

    pub fn component_map(&self) -> ComponentMap64 {
        match self {
            LoadedMap::Right(m) => m.to_component_map(),
            LoadedMap::Left(m) => m.to_component_map(),
            LoadedMap::Components(m) => m.clone(),
        }
    }

    pub fn value(&self, p: Point64) -> monogenic::Result<Quat64> {
        match self {
            LoadedMap::Right(m) => m.value(p),
            LoadedMap::Left(m) => m.value(p),
            LoadedMap::Components(m) => m.value(p),
        }
    }
}

pub struct Job {
    pub config: JobConfig,
    pub map: LoadedMap,
    pub domain: DomainBox<f64>,
}

fn parse_set(names: [&str; 4], src: [&String; 4], parse: impl Fn(&str) -> monogenic::Result<()>) -> Result<(), CliError> {
    for (name, s) in names.iter().zip(src) {
        parse(s).map_err(|e| CliError::Config(format!("map.{name}: {e} in {s:?}")))?;
    }
    Ok(())
}

impl Job {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: JobConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_config(config)
    }

    pub fn from_config(config: JobConfig) -> Result<Self, CliError> {
        let frame = config.frame;
        let map = match &config.map {
            MapSpec::RightG(f) | MapSpec::LeftG(f) => {
                let src = [&f.f1, &f.f2, &f.f3, &f.f4];
                parse_set(["F1", "F2", "F3", "F4"], src, |s| {
                    monogenic::AnalyticFn64::parse(s).map(|_| ()).map_err(Into::into)
                })?;
                let src = [f.f1.as_str(), &f.f2, &f.f3, &f.f4];
                if matches!(config.map, MapSpec::RightG(_)) {
                    LoadedMap::Right(RightGMap64::parse(frame, src).map_err(CliError::config)?)
                } else {
                    LoadedMap::Left(LeftGMap64::parse(frame, src).map_err(CliError::config)?)
                }
            }
            MapSpec::Components(u) => {
                let src = [&u.u1, &u.u2, &u.u3, &u.u4];
                parse_set(["U1", "U2", "U3", "U4"], src, |s| {
                    monogenic::Component::<f64>::parse(s).map(|_| ())
                })?;
                let src = [u.u1.as_str(), &u.u2, &u.u3, &u.u4];
                LoadedMap::Components(ComponentMap64::parse(frame, src).map_err(CliError::config)?)
            }
        };
        let domain = DomainBox::new(Point3::from(config.domain.min), Point3::from(config.domain.max))
            .map_err(|e| CliError::Config(format!("domain: {e}")))?;
        Ok(Self { config, map, domain })
    }
}
