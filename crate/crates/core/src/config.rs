//! TOML run configurations and the named presets.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::finder::locate::Region;
use crate::potential::{Geometry, PotentialSpec, SeparableTerm, XProfile};
use crate::resolvent::EngineOptions;
use crate::sheet::{SheetLabel, DEFAULT_RAMIFICATION_GUARD};
use crate::transverse::{BoundaryCondition, CrossSection, Harmonic, ModeBasis, YProfile};

/// A complex number written as `1.5` or `[1.5, -0.2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn get(self) -> Complex64 {
        match self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<f64> for ComplexValue {
    fn from(x: f64) -> Self {
        ComplexValue::Real(x)
    }
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            ComplexValue::Real(z.re)
        } else {
            ComplexValue::Pair([z.re, z.im])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum XConfig {
    Piecewise { breakpoints: Vec<f64>, values: Vec<ComplexValue> },
    Smooth { a: f64, b: f64, samples: Vec<ComplexValue> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicConfig {
    pub order: i64,
    pub coeff: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum YConfig {
    Constant { value: ComplexValue },
    /// a·cos(order ω y)
    Cos { order: i64, amplitude: ComplexValue },
    /// a·e^{i order ω y}
    Exp { order: i64, amplitude: ComplexValue },
    Trig { harmonics: Vec<HarmonicConfig> },
    Sampled { values: Vec<ComplexValue> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub x: XConfig,
    pub y: YConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetConfig {
    pub members: Vec<usize>,
    pub anchor: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    /// Defaults to max(0.2, 2 sup|Im V| / ω²) with ω the base frequency.
    pub alpha: Option<f64>,
    pub r_max: f64,
    /// Fit window; defaults to [r_max / 2, r_max].
    pub fit_window: Option<[f64; 2]>,
    /// Number of radii at which N(r) is tabulated.
    #[serde(default = "default_radii")]
    pub radii: usize,
}

fn default_radii() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    #[serde(default = "default_nodes")]
    pub nodes_per_panel: usize,
    #[serde(default = "default_width")]
    pub max_panel_width: f64,
    #[serde(default = "default_depth")]
    pub depth: usize,
}

fn default_l_max() -> usize {
    9
}
fn default_nodes() -> usize {
    24
}
fn default_width() -> f64 {
    0.5
}
fn default_depth() -> usize {
    2
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        DiscretizationConfig {
            l_max: default_l_max(),
            nodes_per_panel: default_nodes(),
            max_panel_width: default_width(),
            depth: default_depth(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Points sampled along the fit window.
    pub samples: usize,
    /// Largest relative change of det(I + B) accepted under refinement.
    pub tolerance: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { samples: 4, tolerance: 1e-6 }
    }
}

/// What the verdict compares against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Expectation {
    /// |slope − value| ≤ tolerance·value.
    ExactSlope { slope: f64, tolerance: f64 },
    /// slope ≤ (1 + tolerance)·slope_bound.
    UpperBound { tolerance: f64 },
    /// Zero total winding and max |B| below `entry_tol` on the samples.
    NoResonances { entry_tol: f64 },
    /// Report only.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NondegeneracyConfig {
    /// Collar width as a fraction of b.
    pub collar: f64,
    /// Largest acceptable constant C.
    pub c_max: f64,
}

impl Default for NondegeneracyConfig {
    fn default() -> Self {
        NondegeneracyConfig { collar: 0.1, c_max: 1.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_preset")]
    pub preset: String,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub cross_section: CrossSection,
    pub geometry: Geometry,
    #[serde(default)]
    pub potential: Vec<TermConfig>,
    pub sheet: SheetConfig,
    pub region: RegionConfig,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default)]
    pub nondegeneracy: NondegeneracyConfig,
    #[serde(default = "default_expect")]
    pub expect: Expectation,
}

fn default_preset() -> String {
    "custom".into()
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_expect() -> Expectation {
    Expectation::None
}

/// Domain objects built from a configuration.
#[derive(Debug, Clone)]
pub struct Validated {
    pub basis: ModeBasis,
    pub spec: PotentialSpec,
    pub sheet: SheetLabel,
    pub region: Region,
    pub engine: EngineOptions,
    pub window: (f64, f64),
}

fn field<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        ScatterError::Config { .. } => e,
        other => ScatterError::config(name, other.to_string()),
    })
}

fn complexes(v: &[ComplexValue]) -> Vec<Complex64> {
    v.iter().map(|c| c.get()).collect()
}

impl XConfig {
    pub fn to_profile(&self) -> XProfile {
        match self {
            XConfig::Piecewise { breakpoints, values } => XProfile::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                values: complexes(values),
            },
            XConfig::Smooth { a, b, samples } => XProfile::Smooth { a: *a, b: *b, samples: complexes(samples) },
        }
    }
}

impl YConfig {
    pub fn to_profile(&self) -> YProfile {
        match self {
            YConfig::Constant { value } => YProfile::Constant(value.get()),
            YConfig::Cos { order, amplitude } => YProfile::Trig(YProfile::cosine(*order, amplitude.get())),
            YConfig::Exp { order, amplitude } => YProfile::Trig(vec![Harmonic { order: *order, coeff: amplitude.get() }]),
            YConfig::Trig { harmonics } => {
                YProfile::Trig(harmonics.iter().map(|h| Harmonic { order: h.order, coeff: h.coeff.get() }).collect())
            }
            YConfig::Sampled { values } => YProfile::Sampled(complexes(values)),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ScatterError::config("<file>", e.to_string()))?;
        let preset_name = match table.get("preset") {
            Some(toml::Value::String(s)) if s != "custom" => Some(s.clone()),
            Some(toml::Value::String(_)) | None => None,
            Some(_) => return Err(ScatterError::config("preset", "must be a string")),
        };
        let merged = match preset_name {
            Some(name) => {
                let base = preset(&name)?;
                let mut value = toml::Table::try_from(&base).map_err(|e| ScatterError::config("preset", e.to_string()))?;
                merge(&mut value, table);
                value
            }
            None => table,
        };
        merged.try_into().map_err(|e: toml::de::Error| ScatterError::config(first_path(&e), e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configurations serialize")
    }

    /// Checks every field in schema order and builds the domain objects;
    /// the first failure is reported with its field name.
    pub fn validate(&self) -> Result<Validated> {
        let cs = self.cross_section;
        field("cross_section", cs.validate())?;
        let d = self.discretization;
        if d.l_max == 0 {
            return Err(ScatterError::config("discretization.l_max", "must be at least 1"));
        }
        if d.nodes_per_panel < 2 {
            return Err(ScatterError::config("discretization.nodes_per_panel", "must be at least 2"));
        }
        if !(d.max_panel_width > 0.0) || !d.max_panel_width.is_finite() {
            return Err(ScatterError::config("discretization.max_panel_width", "must be positive"));
        }
        let basis = field("discretization.l_max", ModeBasis::build(cs, d.l_max))?;

        let mut terms = Vec::with_capacity(self.potential.len());
        for (i, t) in self.potential.iter().enumerate() {
            let x = t.x.to_profile();
            field(&format!("potential[{i}].x"), x.validate())?;
            let y = t.y.to_profile();
            if let YProfile::Sampled(v) = &y {
                if v.len() < 2 {
                    return Err(ScatterError::config(format!("potential[{i}].y"), "needs at least two samples"));
                }
            }
            terms.push(SeparableTerm { x, y });
        }
        let spec = field("potential", PotentialSpec::new(self.geometry, terms))?;

        let sheet = field("sheet", SheetLabel::new(&self.sheet.members, self.sheet.anchor))?;
        field("sheet", sheet.validate_for(&basis))?;

        let omega = cs.base_frequency();
        let alpha = self.region.alpha.unwrap_or_else(|| (2.0 * spec.im_sup_bound() / (omega * omega)).max(0.2));
        let region = field("region", Region::new(alpha, self.region.r_max))?;
        let window = match self.region.fit_window {
            Some([lo, hi]) => {
                if !(lo < hi) || lo <= alpha || hi > self.region.r_max {
                    return Err(ScatterError::config(
                        "region.fit_window",
                        format!("[{lo}, {hi}] must satisfy alpha < lo < hi <= r_max"),
                    ));
                }
                (lo, hi)
            }
            None => (0.5 * self.region.r_max, self.region.r_max),
        };
        if self.region.radii < 2 {
            return Err(ScatterError::config("region.radii", "must be at least 2"));
        }
        if self.probe.samples == 0 || !(self.probe.tolerance > 0.0) {
            return Err(ScatterError::config("probe", "samples and tolerance must be positive"));
        }
        let nd = self.nondegeneracy;
        if !(nd.collar > 0.0 && nd.collar < 1.0) {
            return Err(ScatterError::config("nondegeneracy.collar", "must lie in (0, 1)"));
        }
        match self.expect {
            Expectation::ExactSlope { slope, tolerance } if !(slope >= 0.0 && tolerance > 0.0) => {
                return Err(ScatterError::config("expect", "slope must be nonnegative and tolerance positive"));
            }
            Expectation::UpperBound { tolerance } if !(tolerance >= 0.0) => {
                return Err(ScatterError::config("expect", "tolerance must be nonnegative"));
            }
            Expectation::NoResonances { entry_tol } if !(entry_tol > 0.0) => {
                return Err(ScatterError::config("expect", "entry_tol must be positive"));
            }
            _ => {}
        }
        let engine = EngineOptions {
            nodes_per_panel: d.nodes_per_panel,
            max_panel_width: d.max_panel_width,
            depth: d.depth,
            ramification_guard: DEFAULT_RAMIFICATION_GUARD,
            ..EngineOptions::default()
        };
        Ok(Validated { basis, spec, sheet, region, engine, window })
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn first_path(e: &toml::de::Error) -> String {
    // toml reports missing fields as "missing field `name`"
    let msg = e.message();
    msg.split('`').nth(1).map_or_else(|| "<file>".to_string(), str::to_string)
}

/// Names accepted by `preset`.
pub const PRESETS: &[&str] = &[
    "zero",
    "barrier-compare",
    "barrier-compare-pair",
    "modulated-barrier",
    "counterexample",
    "perturbation",
    "half-dirichlet",
    "half-neumann",
    "half-dirichlet-pair",
    "half-neumann-pair",
];

fn circle() -> CrossSection {
    CrossSection::Circle { circumference: 2.0 * PI }
}

fn barrier(a: f64, b: f64, c: f64) -> XConfig {
    XConfig::Piecewise { breakpoints: vec![a, b], values: vec![ComplexValue::Real(c)] }
}

fn constant_y() -> YConfig {
    YConfig::Constant { value: ComplexValue::Real(1.0) }
}

fn modulated(x: XConfig) -> Vec<TermConfig> {
    vec![
        TermConfig { x: x.clone(), y: constant_y() },
        TermConfig { x, y: YConfig::Cos { order: 1, amplitude: ComplexValue::Real(0.3) } },
    ]
}

fn base(name: &str, geometry: Geometry, potential: Vec<TermConfig>, sheet: SheetConfig, r_max: f64, expect: Expectation) -> RunConfig {
    RunConfig {
        preset: name.into(),
        output: PathBuf::from("out").join(name),
        cross_section: circle(),
        geometry,
        potential,
        sheet,
        region: RegionConfig { alpha: Some(0.3), r_max, fit_window: None, radii: default_radii() },
        discretization: DiscretizationConfig::default(),
        probe: ProbeConfig::default(),
        nondegeneracy: NondegeneracyConfig::default(),
        expect,
    }
}

/// The configuration registered under `name`.
pub fn preset(name: &str) -> Result<RunConfig> {
    let e1 = || SheetConfig { members: vec![1], anchor: 1 };
    let e12 = || SheetConfig { members: vec![1, 2], anchor: 1 };
    let exact = |slope: f64| Expectation::ExactSlope { slope, tolerance: 0.10 };
    let upper = Expectation::UpperBound { tolerance: 0.05 };
    let dirichlet = Geometry::Half { bc: BoundaryCondition::Dirichlet };
    let neumann = Geometry::Half { bc: BoundaryCondition::Neumann };
    let cfg = match name {
        "zero" => base(name, Geometry::Full, Vec::new(), e1(), 10.0, Expectation::NoResonances { entry_tol: 1e-8 }),
        "barrier-compare" => base(
            name,
            Geometry::Full,
            vec![TermConfig { x: barrier(-1.0, 1.0, 10.0), y: constant_y() }],
            e1(),
            25.0,
            exact(4.0 / PI),
        ),
        "barrier-compare-pair" => base(
            name,
            Geometry::Full,
            vec![TermConfig { x: barrier(-1.0, 1.0, 10.0), y: constant_y() }],
            e12(),
            12.0,
            Expectation::None,
        ),
        "modulated-barrier" => base(name, Geometry::Full, modulated(barrier(-1.0, 1.0, 10.0)), e1(), 40.0, exact(4.0 / PI)),
        "counterexample" => base(
            name,
            Geometry::Full,
            vec![TermConfig {
                x: barrier(-1.0, 1.0, 10.0),
                y: YConfig::Exp { order: 1, amplitude: ComplexValue::Real(1.0) },
            }],
            e1(),
            25.0,
            Expectation::NoResonances { entry_tol: 1e-8 },
        ),
        "perturbation" => base(
            name,
            Geometry::Full,
            vec![
                TermConfig { x: barrier(-1.0, 1.0, 10.0), y: constant_y() },
                TermConfig { x: barrier(-0.5, 0.5, 5.0), y: YConfig::Cos { order: 1, amplitude: ComplexValue::Real(1.0) } },
            ],
            e12(),
            20.0,
            exact(12.0 / PI),
        ),
        "half-dirichlet" => base(name, dirichlet, modulated(barrier(0.0, 1.0, 10.0)), e1(), 60.0, exact(2.0 / PI)),
        "half-neumann" => base(name, neumann, modulated(barrier(0.0, 1.0, 10.0)), e1(), 60.0, exact(2.0 / PI)),
        "half-dirichlet-pair" => base(name, dirichlet, modulated(barrier(0.0, 1.0, 10.0)), e12(), 30.0, upper),
        "half-neumann-pair" => base(name, neumann, modulated(barrier(0.0, 1.0, 10.0)), e12(), 30.0, upper),
        other => {
            return Err(ScatterError::config(
                "preset",
                format!("unknown preset `{other}`; known: {}", PRESETS.join(", ")),
            ))
        }
    };
    Ok(RunConfig { discretization: preset_discretization(name), probe: preset_probe(name), ..cfg })
}

/// Cheapest discretization whose convergence probe stays within the
/// preset's tolerance over its fit window.
fn preset_discretization(name: &str) -> DiscretizationConfig {
    let d = DiscretizationConfig::default();
    match name {
        "barrier-compare" | "barrier-compare-pair" => DiscretizationConfig { nodes_per_panel: 24, max_panel_width: 0.25, ..d },
        "modulated-barrier" => DiscretizationConfig { nodes_per_panel: 16, max_panel_width: 0.375, depth: 1, ..d },
        "perturbation" | "counterexample" => DiscretizationConfig { nodes_per_panel: 16, depth: 1, ..d },
        "half-dirichlet" | "half-neumann" => DiscretizationConfig { nodes_per_panel: 16, max_panel_width: 0.25, depth: 1, ..d },
        _ => DiscretizationConfig { nodes_per_panel: 16, ..d },
    }
}

/// Counting needs zeros stable to well within their cells; the oracle
/// comparison needs det(I + B) itself to converge.
fn preset_probe(name: &str) -> ProbeConfig {
    match name {
        "barrier-compare" | "barrier-compare-pair" | "zero" => ProbeConfig { samples: 4, tolerance: 1e-8 },
        _ => ProbeConfig { samples: 4, tolerance: 1e-4 },
    }
}
