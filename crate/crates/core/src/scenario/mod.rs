//! Scenario files, presets and the verification pipeline.
//!
//! A scenario is plain data: a lattice, two components with their center
//! classes, a twist and a list of expectations. Presets build scenarios in
//! code; files use TOML with the same layout.

pub mod presets;
pub mod report;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, Isometry, Lattice};
use crate::linalg::{Int, IntMatrix};
use crate::models::{oguiso_translation, K3Model};
use crate::snc::{AmbientKind, AmbientSpace, Component, ComponentDescriptor, GluingDescriptor};
use crate::wehler::power_closed_form;

pub use report::{run, sweep, Report, SweepItem, SweepResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Hypotheses,
    Invariants,
    Ample,
    Projectivity,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Hypotheses, Stage::Invariants, Stage::Ample, Stage::Projectivity];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Hypotheses => "hypotheses",
            Stage::Invariants => "invariants",
            Stage::Ample => "ample",
            Stage::Projectivity => "projectivity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeSpec {
    Wehler,
    Oguiso,
    Custom {
        gram: Vec<Vec<i64>>,
        labels: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_int::optvec")]
        reference_ample: Option<Vec<Int>>,
    },
}

/// An integer or the name of a scenario parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntOrParam {
    Int(i64),
    Param(String),
}

impl IntOrParam {
    pub fn resolve(&self, params: &BTreeMap<String, i64>) -> Result<i64> {
        match self {
            IntOrParam::Int(v) => Ok(*v),
            IntOrParam::Param(p) => params.get(p).copied().ok_or_else(|| Error::UnboundParameter(p.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TwistSpec {
    Identity,
    WehlerIotaPower { power: IntOrParam },
    OguisoTranslation { power: IntOrParam },
    Custom { matrix: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub ambient: AmbientKind,
    /// O(1)|_S for a P³ component; defaults to the model's reference class.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_int::optvec")]
    pub hyperplane: Option<Vec<Int>>,
    #[serde(default, with = "crate::serde_int::vecvec")]
    pub centers: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateRequest {
    /// Ample and free on the Wehler lattice.
    WehlerAmpleFree {
        #[serde(with = "crate::serde_int::vec")]
        class: Vec<Int>,
    },
    /// Ampleness of l − k f on the Oguiso lattice.
    OguisoAmple { a: i64, k: i64, z_bound: i64 },
    /// Freeness of `class` = 4(l − k f) + (4k − a) f, through the ample
    /// certificate for l − k f.
    OguisoCenterFree {
        a: i64,
        k: i64,
        z_bound: i64,
        #[serde(with = "crate::serde_int::vec")]
        class: Vec<Int>,
    },
}

/// An expected or observed scalar. Integers compare exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(#[serde(with = "crate::serde_int")] Int),
    Text(String),
}

impl Value {
    pub fn int(v: impl Into<Int>) -> Self {
        Value::Int(v.into())
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub name: String,
    pub expected: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, i64>,
    pub lattice: LatticeSpec,
    pub twist: TwistSpec,
    pub x1: ComponentSpec,
    pub x2: ComponentSpec,
    #[serde(default)]
    pub certificates: Vec<CertificateRequest>,
    #[serde(default)]
    pub expectations: Vec<Expectation>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Canonical text form.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.expectations {
            if report::metric_stage(&e.name).is_none() {
                return Err(Error::Scenario(format!("unknown expectation metric `{}`", e.name)));
            }
        }
        build(self).map(|_| ())
    }

    /// Replaces one center class, as given on the command line.
    pub fn override_center(&mut self, slot: Component, index: usize, class: Vec<Int>) -> Result<()> {
        let spec = match slot {
            Component::X1 => &mut self.x1,
            Component::X2 => &mut self.x2,
        };
        let n = spec.centers.len();
        let target = spec
            .centers
            .get_mut(index)
            .ok_or_else(|| Error::InvalidArgument(format!("center index {index} out of range ({n} centers)")))?;
        *target = class;
        self.notes.push("center class overridden from the command line".into());
        Ok(())
    }
}

/// Model and gluing built from a scenario.
#[derive(Clone, Debug)]
pub struct Built {
    pub model: K3Model,
    pub gluing: GluingDescriptor,
}

fn matrix_from_i64(rows: &[Vec<i64>]) -> Result<IntMatrix> {
    IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect())
}

fn build_model(spec: &LatticeSpec) -> Result<K3Model> {
    Ok(match spec {
        LatticeSpec::Wehler => K3Model::wehler(),
        LatticeSpec::Oguiso => K3Model::oguiso(),
        LatticeSpec::Custom { gram, labels, reference_ample } => {
            let lattice = Lattice::new("custom", matrix_from_i64(gram)?, labels.clone())?;
            let reference = match reference_ample {
                Some(v) => DivisorClass::new(&lattice, v.clone())?,
                None => DivisorClass::zero(&lattice),
            };
            K3Model::custom(lattice, reference, vec![])
        }
    })
}

fn build_component(label: &str, spec: &ComponentSpec, model: &K3Model) -> Result<ComponentDescriptor> {
    let s = &model.lattice;
    let ambient = match spec.ambient {
        AmbientKind::P1P1P1 => {
            if s.rank() != 3 {
                return Err(Error::Scenario("P1xP1xP1 needs a rank 3 lattice".into()));
            }
            AmbientSpace::p1p1p1(s)?
        }
        AmbientKind::P3 => {
            let h = match &spec.hyperplane {
                Some(v) => DivisorClass::new(s, v.clone())?,
                None if !model.reference_ample.is_zero() => model.reference_ample.clone(),
                None => return Err(Error::Scenario(format!("{label}: P3 component needs a hyperplane class"))),
            };
            AmbientSpace::p3(&h)?
        }
    };
    let centers = spec.centers.iter().map(|c| DivisorClass::new(s, c.clone())).collect::<Result<Vec<_>>>()?;
    ComponentDescriptor::new(label, ambient, centers)
}

pub fn build(s: &Scenario) -> Result<Built> {
    let model = build_model(&s.lattice)?;
    let lat = &model.lattice;
    let twist = match &s.twist {
        TwistSpec::Identity => Isometry::identity(lat),
        TwistSpec::WehlerIotaPower { power } => {
            if model.kind != crate::models::ModelKind::Wehler {
                return Err(Error::Scenario("wehler_iota_power needs the wehler lattice".into()));
            }
            power_closed_form(lat, power.resolve(&s.parameters)?)
        }
        TwistSpec::OguisoTranslation { power } => {
            if model.kind != crate::models::ModelKind::Oguiso {
                return Err(Error::Scenario("oguiso_translation needs the oguiso lattice".into()));
            }
            oguiso_translation(lat, power.resolve(&s.parameters)?)
        }
        TwistSpec::Custom { matrix } => Isometry::new(lat, matrix_from_i64(matrix)?)?,
    };
    let x1 = build_component("X1", &s.x1, &model)?;
    let x2 = build_component("X2", &s.x2, &model)?;
    let gluing = GluingDescriptor::new(x1, x2, twist)?;
    Ok(Built { model, gluing })
}

/// `name=value` or `name=lo..hi` (inclusive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Single(String, i64),
    Range(String, i64, i64),
}

pub fn parse_binding(s: &str) -> Result<Binding> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::InvalidArgument(format!("expected NAME=VALUE, got `{s}`")))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(Error::InvalidArgument(format!("empty parameter name in `{s}`")));
    }
    let num = |t: &str| t.trim().parse::<i64>().map_err(|_| Error::InvalidArgument(format!("`{t}` is not an integer")));
    match value.split_once("..") {
        Some((lo, hi)) => Ok(Binding::Range(name.into(), num(lo)?, num(hi.trim_start_matches('='))?)),
        None => Ok(Binding::Single(name.into(), num(value)?)),
    }
}

/// `x1:1=2,2,2`: component, center index, class coordinates.
pub fn parse_center_override(s: &str) -> Result<(Component, usize, Vec<Int>)> {
    let bad = || Error::InvalidArgument(format!("expected x1:INDEX=c1,c2,..., got `{s}`"));
    let (slot, coords) = s.split_once('=').ok_or_else(bad)?;
    let (comp, idx) = slot.split_once(':').ok_or_else(bad)?;
    let comp = match comp.trim().to_ascii_lowercase().as_str() {
        "x1" => Component::X1,
        "x2" => Component::X2,
        _ => return Err(bad()),
    };
    let idx: usize = idx.trim().parse().map_err(|_| bad())?;
    let coords = coords
        .split(',')
        .map(|t| t.trim().parse::<Int>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    Ok((comp, idx, coords))
}

/// A preset name, or a path to a TOML scenario file. `params` override the
/// file's own parameters.
pub fn load_scenario(target: &str, params: &BTreeMap<String, i64>) -> Result<Scenario> {
    let path = Path::new(target);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let mut s: Scenario = toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        s.parameters.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
        s.validate()?;
        return Ok(s);
    }
    presets::preset(target, params)
}
