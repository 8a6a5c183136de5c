//! Run configuration: one JSON document with a nested object per command.
//!
//! Every struct rejects unknown keys, and serializing a parsed config
//! gives a document that parses back to the same value.

use std::fmt;
use std::path::Path;

use curlforce_core::invariants::GeneratorSpec;
use curlforce_core::{ForceField, IntegratorSettings, Method, PolarState, Variant};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<ForceField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_ef: Option<MapEfOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noether: Option<NoetherOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special: Option<SpecialOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepOptions>,
}

fn default_name() -> String {
    "run".to_string()
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: default_name(),
            variant: None,
            system: None,
            initial: None,
            integrator: IntegratorConfig::default(),
            simulate: None,
            figure: None,
            map_ef: None,
            noether: None,
            orbit: None,
            special: None,
            sweep: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn system(&self) -> Result<&ForceField> {
        let field = self
            .system
            .as_ref()
            .ok_or_else(|| CliError::Config("missing 'system'".into()))?;
        field.validate()?;
        Ok(field)
    }

    pub fn initial_state(&self) -> Result<PolarState> {
        let s = self
            .initial
            .ok_or_else(|| CliError::Config("missing 'initial'".into()))?;
        let t0 = self.integrator.t_span.map_or(0.0, |[a, _]| a);
        Ok(PolarState::new(t0, s.r, s.theta, s.rdot, s.thetadot)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub r: f64,
    pub theta: f64,
    pub rdot: f64,
    pub thetadot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_span: Option<[f64; 2]>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let d = IntegratorSettings::default();
        Self {
            method: d.method,
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            h: d.h,
            t_span: None,
            max_steps: d.max_steps,
        }
    }
}

impl IntegratorConfig {
    /// Settings over `t_span`, or over `fallback` when no span is configured.
    pub fn settings(&self, fallback: Option<[f64; 2]>, max_steps: Option<usize>) -> Result<IntegratorSettings> {
        let [t0, t1] = self
            .t_span
            .or(fallback)
            .ok_or_else(|| CliError::Config("missing 'integrator.t_span'".into()))?;
        let settings = IntegratorSettings {
            method: self.method,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            h: self.h,
            t_span: (t0, t1),
            max_steps: max_steps.unwrap_or(self.max_steps),
            events: Vec::new(),
        };
        settings.validate()?;
        Ok(settings)
    }
}

/// A reference radius that may be infinite; written as `"inf"` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Radius(pub f64);

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct RadiusVisitor;

        impl Visitor<'_> for RadiusVisitor {
            type Value = Radius;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Radius, E> {
                if v >= 0.0 {
                    Ok(Radius(v))
                } else {
                    Err(E::custom(format!("reference radius must be non-negative, got {v}")))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Radius, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Radius, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Radius, E> {
                match v {
                    "inf" | "infinity" | "Infinity" => Ok(Radius(f64::INFINITY)),
                    other => Err(E::custom(format!("unrecognised radius '{other}'"))),
                }
            }
        }

        d.deserialize_any(RadiusVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    /// `½(r²θ̇)² + V(θ)` for Ermakov systems.
    Lrr,
    /// `½(r²θ̇)² - θ` under `F_θ = r⁻³`.
    Mu3,
    AngularMomentum,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateOptions {
    #[serde(default)]
    pub invariants: Vec<InvariantKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    Fig1,
    Fig2,
    Fig3,
}

impl FigureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FigureKind::Fig1 => "fig1",
            FigureKind::Fig2 => "fig2",
            FigureKind::Fig3 => "fig3",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<FigureKind>,
    /// Levels `I` of the angular invariant; defaults per figure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    /// `(ψ, ψ')` pairs at `θ0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_span: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEfOptions {
    #[serde(default)]
    pub r0: Radius,
    #[serde(default = "yes")]
    pub scaled: bool,
}

impl Default for MapEfOptions {
    fn default() -> Self {
        Self {
            r0: Radius(0.0),
            scaled: true,
        }
    }
}

fn yes() -> bool {
    true
}

/// A named preset (`g1`, `g2`, `half`) or explicit coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorChoice {
    Preset(String),
    Spec(GeneratorSpec),
}

impl GeneratorChoice {
    pub fn resolve(&self) -> Result<GeneratorSpec> {
        let spec = match self {
            GeneratorChoice::Preset(name) => GeneratorSpec::preset(name)?,
            GeneratorChoice::Spec(spec) => *spec,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Initial data for a fresh Emden–Fowler run `T(J)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfRunOptions {
    pub j_span: [f64; 2],
    pub t0: f64,
    pub tp0: f64,
}

impl Default for EfRunOptions {
    fn default() -> Self {
        Self {
            j_span: [1.0, 3.0],
            t0: 1.0,
            tp0: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoetherOptions {
    pub n: f64,
    pub m: f64,
    #[serde(default = "unit")]
    pub coupling: f64,
    pub generator: GeneratorChoice,
    #[serde(default)]
    pub run: EfRunOptions,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range(GridRange),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range(g) => {
                if g.count == 0 || !(g.start > 0.0 && g.end >= g.start) {
                    return Err(CliError::Config("grid needs count > 0 and 0 < start <= end".into()));
                }
                if g.count == 1 {
                    vec![g.start]
                } else {
                    let k = (g.count - 1) as f64;
                    (0..g.count)
                        .map(|i| {
                            let s = i as f64 / k;
                            if g.log {
                                g.start * (g.end / g.start).powf(s)
                            } else {
                                g.start + s * (g.end - g.start)
                            }
                        })
                        .collect()
                }
            }
        };
        if pts.is_empty() {
            return Err(CliError::Config("empty radius grid".into()));
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitOptions {
    pub mu: f64,
    #[serde(default)]
    pub r0: Radius,
    pub r_grid: GridSpec,
    /// Adds columns from a polar run seeded on the particular branch.
    #[serde(default)]
    pub simulate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialOptions {
    pub lambda: f64,
    /// Defaults to `1 + 4λ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_z")]
    pub z: Vec<f64>,
    #[serde(default = "default_special_run")]
    pub run: EfRunOptions,
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_z() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

fn default_special_run() -> EfRunOptions {
    EfRunOptions {
        j_span: [1.0, 1.25],
        t0: 1.0,
        tp0: 0.5,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Figure,
    MapEf,
    Noether,
    Orbit,
    Special,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Figure => "figure",
            Command::MapEf => "map-ef",
            Command::Noether => "noether",
            Command::Orbit => "orbit",
            Command::Special => "special",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRun {
    pub command: Command,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    pub runs: Vec<SweepRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}
