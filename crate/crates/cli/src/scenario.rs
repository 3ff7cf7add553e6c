//! Scenario files: a TOML document naming either the three-phase cosmology
//! preset or a custom list of segments, plus sampling and output choices.
//!
//! ```toml
//! outputs = ["profile", "events", "fluid", "verify"]
//!
//! [preset]
//! name = "flat-rd-md-ld"
//! c0 = 1.0
//! t1 = 4.7e4
//! t2 = 9.8e9
//! # K = 6.8027210884353748e-11   # defaults to 2/(3 t2)
//! lambda = 0.0
//! time_unit = "yr"
//!
//! [sampling]
//! t_min = 1.0e2
//! t_max = 2.0e10
//! count = 400
//! spacing = "log"
//! ```
//!
//! A custom model replaces `[preset]` with `[custom]` (`k`, `lambda`) and one
//! `[[custom.segments]]` table per segment: `kind = "power" | "exp" | "const"`,
//! `c`, `p` (power) or `K` (exp), `t_lo`, `t_hi`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use warpcurv::cosmo::{default_k_rate, CosmologyParams};
use warpcurv::genfun::{AnalyticPiece, PiecewiseFn, Segment};
use warpcurv::verify::VerifyOptions;
use warpcurv::warped::FrwModel;

use crate::error::{CliError, Result};

pub const PRESET_NAME: &str = "flat-rd-md-ld";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Profile,
    Events,
    Fluid,
    Verify,
}

impl OutputKind {
    pub fn name(&self) -> &'static str {
        match self {
            OutputKind::Profile => "profile",
            OutputKind::Events => "events",
            OutputKind::Fluid => "fluid",
            OutputKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Power,
    Exp,
    Const,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSpec {
    pub name: String,
    #[serde(default = "one")]
    pub c0: f64,
    pub t1: f64,
    pub t2: f64,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k_rate: Option<f64>,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_unit")]
    pub time_unit: String,
}

fn one() -> f64 {
    1.0
}

fn default_unit() -> String {
    "yr".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub kind: SegmentKind,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k_rate: Option<f64>,
    pub t_lo: f64,
    pub t_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    #[serde(default)]
    pub k: i32,
    #[serde(default)]
    pub lambda: f64,
    pub segments: Vec<SegmentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
    /// Log for the preset, linear for custom models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bumps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halvings: Option<usize>,
}

/// The document as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSpec>,
    pub sampling: SamplingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Preset {
        params: CosmologyParams,
        /// `K` was omitted and set to `2/(3t₂)`.
        k_defaulted: bool,
    },
    Custom,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    file: ScenarioFile,
    kind: ModelKind,
    model: FrwModel,
}

/// A sample time moved off a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nudge {
    pub requested: f64,
    pub used: f64,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| position(text, s.start));
        CliError::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    Scenario::from_file(file)
}

fn build_custom(spec: &CustomSpec) -> Result<FrwModel> {
    if spec.segments.is_empty() {
        return Err(invalid("custom model needs at least one segment"));
    }
    let mut segments = Vec::with_capacity(spec.segments.len());
    for (i, s) in spec.segments.iter().enumerate() {
        let piece = match (s.kind, s.p, s.k_rate) {
            (SegmentKind::Power, Some(p), None) => AnalyticPiece::power(s.c, p),
            (SegmentKind::Exp, None, Some(k)) => AnalyticPiece::exponential(s.c, k),
            (SegmentKind::Const, None, None) => AnalyticPiece::constant(s.c),
            (SegmentKind::Power, _, _) => {
                return Err(invalid(format!("segment {i}: kind \"power\" takes `p` and no `K`")))
            }
            (SegmentKind::Exp, _, _) => {
                return Err(invalid(format!("segment {i}: kind \"exp\" takes `K` and no `p`")))
            }
            (SegmentKind::Const, _, _) => {
                return Err(invalid(format!("segment {i}: kind \"const\" takes neither `p` nor `K`")))
            }
        };
        let finite = [s.c, s.p.unwrap_or(0.0), s.k_rate.unwrap_or(0.0)]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(invalid(format!("segment {i}: coefficients must be finite")));
        }
        segments.push(Segment::new(piece, s.t_lo, s.t_hi));
    }
    let f = PiecewiseFn::new(segments).map_err(|e| invalid(e.to_string()))?;
    for (i, t) in f.breakpoints().into_iter().enumerate() {
        if f.eval(t).is_err() {
            let (l, r) = f.limits_at(i, 0);
            return Err(invalid(format!(
                "scale factor jumps from {l} to {r} at t = {t} (segments {i} and {}); only continuous glues are supported",
                i + 1
            )));
        }
    }
    FrwModel::new(spec.k, f, spec.lambda).map_err(|e| invalid(e.to_string()))
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Scenario> {
        let (kind, model) = match (&file.preset, &file.custom) {
            (Some(p), None) => {
                if p.name != PRESET_NAME {
                    return Err(invalid(format!(
                        "unknown preset \"{}\" (expected \"{PRESET_NAME}\")",
                        p.name
                    )));
                }
                let k_rate = p.k_rate.unwrap_or_else(|| default_k_rate(p.t2));
                let params = CosmologyParams::new(p.c0, p.t1, p.t2, k_rate, p.lambda)
                    .map_err(|e| invalid(e.to_string()))?
                    .with_time_unit(p.time_unit.clone());
                let model = params.model();
                (
                    ModelKind::Preset {
                        params,
                        k_defaulted: p.k_rate.is_none(),
                    },
                    model,
                )
            }
            (None, Some(c)) => (ModelKind::Custom, build_custom(c)?),
            (Some(_), Some(_)) => return Err(invalid("give either [preset] or [custom], not both")),
            (None, None) => return Err(invalid("missing [preset] or [custom] model")),
        };

        if file.outputs.is_empty() {
            return Err(invalid("outputs must list at least one of profile, events, fluid, verify"));
        }
        for (i, o) in file.outputs.iter().enumerate() {
            if file.outputs[..i].contains(o) {
                return Err(invalid(format!("output \"{}\" is listed twice", o.name())));
            }
        }
        if file.outputs.contains(&OutputKind::Fluid) && model.k() != 0 {
            return Err(invalid("the fluid table needs a spatially flat model (k = 0)"));
        }

        let s = &file.sampling;
        if s.count < 2 {
            return Err(invalid(format!("sampling.count must be at least 2, got {}", s.count)));
        }
        if !(s.t_min.is_finite() && s.t_max.is_finite() && s.t_min < s.t_max) {
            return Err(invalid(format!(
                "sampling needs finite t_min < t_max, got {} and {}",
                s.t_min, s.t_max
            )));
        }
        let (lo, hi) = model.scale_factor().domain();
        if !(s.t_min > lo && s.t_max < hi) {
            return Err(invalid(format!(
                "sampling range [{}, {}] is not inside the open domain ({lo}, {hi})",
                s.t_min, s.t_max
            )));
        }
        let spacing = s.spacing.unwrap_or(match kind {
            ModelKind::Preset { .. } => Spacing::Log,
            ModelKind::Custom => Spacing::Linear,
        });
        if spacing == Spacing::Log && s.t_min <= 0.0 {
            return Err(invalid("log spacing needs t_min > 0"));
        }
        Ok(Scenario { file, kind, model })
    }

    pub fn file(&self) -> &ScenarioFile {
        &self.file
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn model(&self) -> &FrwModel {
        &self.model
    }

    pub fn params(&self) -> Option<&CosmologyParams> {
        match &self.kind {
            ModelKind::Preset { params, .. } => Some(params),
            ModelKind::Custom => None,
        }
    }

    pub fn outputs(&self) -> &[OutputKind] {
        &self.file.outputs
    }

    pub fn spacing(&self) -> Spacing {
        self.file.sampling.spacing.unwrap_or(match self.kind {
            ModelKind::Preset { .. } => Spacing::Log,
            ModelKind::Custom => Spacing::Linear,
        })
    }

    pub fn verify_options(&self) -> VerifyOptions {
        let d = VerifyOptions::default();
        let v = self.file.verify.clone().unwrap_or_default();
        VerifyOptions {
            seed: v.seed.unwrap_or(d.seed),
            samples: v.samples.unwrap_or(d.samples),
            bumps: v.bumps.unwrap_or(d.bumps),
            halvings: v.halvings.unwrap_or(d.halvings),
        }
    }

    /// Sample times, with any that land exactly on a breakpoint moved up by one ulp.
    pub fn sample_times(&self) -> (Vec<f64>, Vec<Nudge>) {
        let s = &self.file.sampling;
        let n = s.count;
        let last = (n - 1) as f64;
        let raw: Vec<f64> = (0..n)
            .map(|j| match (j, self.spacing()) {
                (0, _) => s.t_min,
                (j, _) if j == n - 1 => s.t_max,
                (j, Spacing::Linear) => s.t_min + (s.t_max - s.t_min) * (j as f64 / last),
                (j, Spacing::Log) => {
                    (s.t_min.ln() + (s.t_max.ln() - s.t_min.ln()) * (j as f64 / last)).exp()
                }
            })
            .collect();
        let f = self.model.scale_factor();
        let mut nudges = Vec::new();
        let times = raw
            .into_iter()
            .map(|t| {
                if f.is_breakpoint(t) {
                    let used = t.next_up();
                    nudges.push(Nudge { requested: t, used });
                    used
                } else {
                    t
                }
            })
            .collect();
        (times, nudges)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.file).expect("scenario fields are plain TOML values")
    }
}
