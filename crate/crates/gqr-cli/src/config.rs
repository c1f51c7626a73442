//! INI-style configuration parsing with unit-tagged quantities.
//!
//! Format: `[section]` headers with `key = value` lines; `#` or `;` start a
//! comment line. Every dimensioned quantity carries an explicit unit tag,
//! e.g. `mass_M = 1e9 amu`; dimensionless values are bare numbers. Unknown
//! sections or keys, duplicate keys, missing units and unit mismatches are
//! all reported with line numbers. Defaults applied while resolving the
//! configuration are recorded so the run manifest can echo them.

use std::collections::HashMap;

use gqr_core::constants::PLANCK_H;
use gqr_core::casimir::{sphere_radius_from_mass, CasimirModel};
use gqr_core::interference::OpticsSpec;
use gqr_core::toymodel::RegularizationScheme;
use gqr_core::units::{to_si, Dimension, Unit};
use gqr_core::{
    GravityHypothesis, HypothesisKind, NumericsConfig, SourceSpec, TestParticleSpec, Vec2,
};

use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Scatter,
    Fringes,
    Feasibility,
    ToyModel,
    Regime,
}

impl ExperimentKind {
    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "scatter" => Ok(ExperimentKind::Scatter),
            "fringes" => Ok(ExperimentKind::Fringes),
            "feasibility" => Ok(ExperimentKind::Feasibility),
            "toymodel" => Ok(ExperimentKind::ToyModel),
            "regime" => Ok(ExperimentKind::Regime),
            other => Err(CliError::Config(format!(
                "unknown experiment '{other}' (expected scatter|fringes|feasibility|toymodel|regime)"
            ))),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::Scatter => "scatter",
            ExperimentKind::Fringes => "fringes",
            ExperimentKind::Feasibility => "feasibility",
            ExperimentKind::ToyModel => "toymodel",
            ExperimentKind::Regime => "regime",
        }
    }
}

/// Feasibility-scan block of the configuration, in SI.
#[derive(Debug, Clone)]
pub struct FeasibilityConfig {
    pub mass_range: (f64, f64),
    pub distance_range: (f64, f64),
    pub grid_dims: (usize, usize),
    pub threshold_ratio: f64,
    pub model: CasimirModel,
}

/// Toy-model block: field point plus regularization scheme.
#[derive(Debug, Clone)]
pub struct ToyModelConfig {
    pub field_point: Vec2,
    pub scheme: RegularizationScheme,
}

#[derive(Debug, Clone, Copy)]
pub struct RegimeConfig {
    pub curvature_r: f64,
    pub hbar_scale: f64,
    pub source_fluctuation: f64,
}

#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub gnuplot: bool,
    pub histogram_bins: usize,
    pub export_trajectories: bool,
}

/// Fully resolved run configuration, SI throughout.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub source: SourceSpec,
    pub test: TestParticleSpec,
    pub hypothesis: GravityHypothesis,
    pub shots: u64,
    pub optics: OpticsSpec,
    pub numerics: NumericsConfig,
    pub feasibility: FeasibilityConfig,
    pub toymodel: ToyModelConfig,
    pub regime: Option<RegimeConfig>,
    pub output: OutputConfig,
    /// "section.key = value" for every default that influenced the run.
    pub defaults_applied: Vec<String>,
    pub warnings: Vec<String>,
}

/// One raw `key = value` entry.
#[derive(Debug, Clone)]
struct RawValue {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KeyType {
    Quantity(Dimension),
    Float,
    UInt,
    Bool,
    Tag,
}

/// Schema: (section, key, type). Unknown keys are rejected at parse time.
const SCHEMA: &[(&str, &str, KeyType)] = &[
    ("experiment", "kind", KeyType::Tag),
    ("source", "mass_M", KeyType::Quantity(Dimension::Mass)),
    ("source", "radius_R", KeyType::Quantity(Dimension::Length)),
    ("source", "slit_y1", KeyType::Quantity(Dimension::Length)),
    ("source", "slit_y2", KeyType::Quantity(Dimension::Length)),
    ("source", "slit_separation_d", KeyType::Quantity(Dimension::Length)),
    ("source", "slit_width_sigma", KeyType::Quantity(Dimension::Length)),
    ("source", "source_speed", KeyType::Quantity(Dimension::Speed)),
    ("source", "material_density", KeyType::Float),
    ("test", "mass_mt", KeyType::Quantity(Dimension::Mass)),
    ("test", "speed_v", KeyType::Quantity(Dimension::Speed)),
    ("test", "impact_parameter_b", KeyType::Quantity(Dimension::Length)),
    ("test", "wavepacket_sigma_x", KeyType::Quantity(Dimension::Length)),
    ("hypothesis", "model", KeyType::Tag),
    ("hypothesis", "rng_seed", KeyType::UInt),
    ("hypothesis", "shots", KeyType::UInt),
    ("optics", "wavelength", KeyType::Quantity(Dimension::Length)),
    ("optics", "screen_distance_L", KeyType::Quantity(Dimension::Length)),
    ("optics", "window", KeyType::Quantity(Dimension::Length)),
    ("optics", "n_samples", KeyType::UInt),
    ("optics", "interaction_window_tau", KeyType::Quantity(Dimension::Time)),
    ("numerics", "rel_tol", KeyType::Float),
    ("numerics", "abs_tol", KeyType::Float),
    ("numerics", "x_start_factor", KeyType::Float),
    ("numerics", "max_steps", KeyType::UInt),
    ("numerics", "t_span", KeyType::Quantity(Dimension::Time)),
    ("feasibility", "mass_min", KeyType::Quantity(Dimension::Mass)),
    ("feasibility", "mass_max", KeyType::Quantity(Dimension::Mass)),
    ("feasibility", "distance_min", KeyType::Quantity(Dimension::Length)),
    ("feasibility", "distance_max", KeyType::Quantity(Dimension::Length)),
    ("feasibility", "grid_mass", KeyType::UInt),
    ("feasibility", "grid_distance", KeyType::UInt),
    ("feasibility", "threshold_ratio", KeyType::Float),
    ("feasibility", "eta", KeyType::Float),
    ("toymodel", "field_point_x", KeyType::Quantity(Dimension::Length)),
    ("toymodel", "field_point_y", KeyType::Quantity(Dimension::Length)),
    ("toymodel", "grid_points", KeyType::UInt),
    ("toymodel", "grid_extent", KeyType::Quantity(Dimension::Length)),
    ("toymodel", "sigma", KeyType::Quantity(Dimension::Length)),
    ("toymodel", "include_cross", KeyType::Bool),
    ("regime", "curvature_R", KeyType::Float),
    ("regime", "hbar_scale", KeyType::Float),
    ("regime", "source_fluctuation", KeyType::Float),
    ("output", "gnuplot", KeyType::Bool),
    ("output", "histogram_bins", KeyType::UInt),
    ("output", "export_trajectories", KeyType::Bool),
];

fn key_type(section: &str, key: &str) -> Option<KeyType> {
    SCHEMA
        .iter()
        .find(|(s, k, _)| *s == section && *k == key)
        .map(|(_, _, t)| *t)
}

fn section_known(section: &str) -> bool {
    SCHEMA.iter().any(|(s, _, _)| *s == section)
}

/// Raw parsed document: section.key -> value with line provenance.
struct Document {
    entries: HashMap<(String, String), RawValue>,
}

impl Document {
    fn parse(text: &str) -> Result<Document> {
        let mut entries: HashMap<(String, String), RawValue> = HashMap::new();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    CliError::Config(format!("line {line_no}: malformed section header '{line}'"))
                })?;
                let name = name.trim();
                if !section_known(name) {
                    return Err(CliError::Config(format!(
                        "line {line_no}: unknown section [{name}]"
                    )));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "line {line_no}: expected 'key = value', got '{line}'"
                ))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            let section = section.clone().ok_or_else(|| {
                CliError::Config(format!(
                    "line {line_no}: key '{key}' appears before any [section] header"
                ))
            })?;
            if key_type(&section, &key).is_none() {
                return Err(CliError::Config(format!(
                    "line {line_no}: unknown key '{section}.{key}'"
                )));
            }
            if let Some(prev) = entries.get(&(section.clone(), key.clone())) {
                return Err(CliError::Config(format!(
                    "duplicate key {section}.{key} (lines {} and {line_no})",
                    prev.line
                )));
            }
            entries.insert((section, key), RawValue { value, line: line_no });
        }
        Ok(Document { entries })
    }

    fn get(&self, section: &str, key: &str) -> Option<&RawValue> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }
}

/// Typed reader over the raw document; records applied defaults.
struct Reader<'a> {
    doc: &'a Document,
    defaults: Vec<String>,
}

impl<'a> Reader<'a> {
    fn quantity(&self, section: &str, key: &str, dim: Dimension) -> Result<Option<f64>> {
        let Some(raw) = self.doc.get(section, key) else {
            return Ok(None);
        };
        let line = raw.line;
        let mut parts = raw.value.split_whitespace();
        let number = parts.next().ok_or_else(|| {
            CliError::Config(format!("line {line}: {section}.{key} has no value"))
        })?;
        let value: f64 = number.parse().map_err(|_| {
            CliError::Config(format!(
                "line {line}: {section}.{key}: '{number}' is not a number"
            ))
        })?;
        let tag = parts.next().ok_or_else(|| {
            CliError::Config(format!(
                "line {line}: {section}.{key} must carry a unit tag ({})",
                dim.accepted_tags()
            ))
        })?;
        if parts.next().is_some() {
            return Err(CliError::Config(format!(
                "line {line}: {section}.{key}: trailing tokens after the unit tag"
            )));
        }
        let unit = Unit::from_tag(tag).map_err(|e| {
            CliError::Config(format!("line {line}: {section}.{key}: {e}"))
        })?;
        if unit.dimension() != dim {
            return Err(CliError::Config(format!(
                "line {line}: {section}.{key}: unit mismatch, expected {} but got '{tag}'",
                dim.accepted_tags()
            )));
        }
        let si = to_si(value, unit)
            .map_err(|e| CliError::Config(format!("line {line}: {section}.{key}: {e}")))?;
        Ok(Some(si))
    }

    fn quantity_or(&mut self, section: &str, key: &str, dim: Dimension, default_si: f64, show: &str) -> Result<f64> {
        match self.quantity(section, key, dim)? {
            Some(v) => Ok(v),
            None => {
                self.defaults.push(format!("{section}.{key} = {show}"));
                Ok(default_si)
            }
        }
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>> {
        let Some(raw) = self.doc.get(section, key) else {
            return Ok(None);
        };
        let line = raw.line;
        if raw.value.split_whitespace().count() > 1 {
            return Err(CliError::Config(format!(
                "line {line}: {section}.{key} is dimensionless and takes no unit tag"
            )));
        }
        raw.value.trim().parse().map(Some).map_err(|_| {
            CliError::Config(format!(
                "line {line}: {section}.{key}: '{}' is not a number",
                raw.value
            ))
        })
    }

    fn float_or(&mut self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.float(section, key)? {
            Some(v) => Ok(v),
            None => {
                self.defaults.push(format!("{section}.{key} = {default}"));
                Ok(default)
            }
        }
    }

    fn uint(&self, section: &str, key: &str) -> Result<Option<u64>> {
        let Some(raw) = self.doc.get(section, key) else {
            return Ok(None);
        };
        raw.value.trim().parse().map(Some).map_err(|_| {
            CliError::Config(format!(
                "line {}: {section}.{key}: '{}' is not a non-negative integer",
                raw.line, raw.value
            ))
        })
    }

    fn uint_or(&mut self, section: &str, key: &str, default: u64) -> Result<u64> {
        match self.uint(section, key)? {
            Some(v) => Ok(v),
            None => {
                self.defaults.push(format!("{section}.{key} = {default}"));
                Ok(default)
            }
        }
    }

    fn bool_or(&mut self, section: &str, key: &str, default: bool) -> Result<bool> {
        let Some(raw) = self.doc.get(section, key) else {
            self.defaults.push(format!("{section}.{key} = {default}"));
            return Ok(default);
        };
        match raw.value.trim() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(CliError::Config(format!(
                "line {}: {section}.{key}: expected true|false, got '{other}'",
                raw.line
            ))),
        }
    }

    fn tag(&self, section: &str, key: &str) -> Result<Option<(String, usize)>> {
        Ok(self
            .doc
            .get(section, key)
            .map(|raw| (raw.value.trim().to_string(), raw.line)))
    }
}

const AMU: f64 = gqr_core::constants::ATOMIC_MASS_KG;

/// Parse and fully validate a configuration document.
///
/// `experiment_override` and `seed_override` implement the corresponding
/// command-line flags.
pub fn parse_config(
    text: &str,
    experiment_override: Option<&str>,
    seed_override: Option<u64>,
) -> Result<RunConfig> {
    let doc = Document::parse(text)?;
    let mut r = Reader { doc: &doc, defaults: Vec::new() };
    let mut warnings = Vec::new();

    // Experiment selection.
    let experiment = match experiment_override {
        Some(tag) => ExperimentKind::from_tag(tag)?,
        None => match r.tag("experiment", "kind")? {
            Some((tag, line)) => ExperimentKind::from_tag(&tag)
                .map_err(|e| CliError::Config(format!("line {line}: {e}")))?,
            None => {
                return Err(CliError::Config(
                    "missing required key experiment.kind (or --experiment flag)".into(),
                ))
            }
        },
    };

    // Source geometry. Slits come either as explicit coordinates or as a
    // separation centered on y = 0.
    let needs_source = matches!(
        experiment,
        ExperimentKind::Scatter | ExperimentKind::Fringes | ExperimentKind::ToyModel
    );
    let mass_m = match r.quantity("source", "mass_M", Dimension::Mass)? {
        Some(v) => v,
        None if needs_source => {
            return Err(CliError::Config(format!(
                "missing required key source.mass_M for experiment {}",
                experiment.tag()
            )))
        }
        None => {
            r.defaults.push("source.mass_M = 1e9 amu".into());
            1e9 * AMU
        }
    };
    let y1 = r.quantity("source", "slit_y1", Dimension::Length)?;
    let y2 = r.quantity("source", "slit_y2", Dimension::Length)?;
    let sep = r.quantity("source", "slit_separation_d", Dimension::Length)?;
    let slit_positions = match (y1, y2, sep) {
        (Some(_), Some(_), Some(_)) | (Some(_), None, Some(_)) | (None, Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either source.slit_y1/slit_y2 or source.slit_separation_d, not both".into(),
            ))
        }
        (Some(a), Some(b), None) => (a, b),
        (Some(_), None, None) | (None, Some(_), None) => {
            return Err(CliError::Config(
                "source.slit_y1 and source.slit_y2 must be given together".into(),
            ))
        }
        (None, None, Some(d)) => (-0.5 * d, 0.5 * d),
        (None, None, None) => {
            r.defaults.push("source.slit_separation_d = 100 nm".into());
            (-50e-9, 50e-9)
        }
    };
    let slit_width = r.quantity_or("source", "slit_width_sigma", Dimension::Length, 10e-9, "10 nm")?;
    let material_density = r.float_or("source", "material_density", 2200.0)?;
    if !(material_density > 0.0) {
        return Err(CliError::Config("material_density must be > 0".into()));
    }
    let radius = match r.quantity("source", "radius_R", Dimension::Length)? {
        Some(v) => v,
        None => {
            let derived = sphere_radius_from_mass(mass_m, material_density);
            r.defaults.push(format!(
                "source.radius_R derived from mass and material_density = {derived:.6e} m"
            ));
            derived
        }
    };
    let source = SourceSpec::new(mass_m, radius, slit_positions, slit_width)
        .map_err(CliError::from)?;

    // Test particle.
    let needs_test = matches!(experiment, ExperimentKind::Scatter | ExperimentKind::Fringes);
    let mass_mt = r.quantity_or("test", "mass_mt", Dimension::Mass, 1e7 * AMU, "1e7 amu")?;
    let speed_v = match r.quantity("test", "speed_v", Dimension::Speed)? {
        Some(v) => v,
        None if needs_test => {
            return Err(CliError::Config(format!(
                "missing required key test.speed_v for experiment {}",
                experiment.tag()
            )))
        }
        None => {
            r.defaults.push("test.speed_v = 1e-3 m_per_s".into());
            1e-3
        }
    };
    let impact_b = match r.quantity("test", "impact_parameter_b", Dimension::Length)? {
        Some(v) => v,
        None if needs_test => {
            return Err(CliError::Config(format!(
                "missing required key test.impact_parameter_b for experiment {}",
                experiment.tag()
            )))
        }
        None => {
            r.defaults.push("test.impact_parameter_b = 1 um".into());
            1e-6
        }
    };
    let test = TestParticleSpec::new(mass_mt, speed_v, impact_b).map_err(CliError::from)?;
    let wavepacket_sigma_x =
        r.quantity_or("test", "wavepacket_sigma_x", Dimension::Length, 1e-9, "1 nm")?;

    // Hypothesis.
    let kind = match r.tag("hypothesis", "model")? {
        Some((tag, line)) => match tag.as_str() {
            "collapsed" => HypothesisKind::Collapsed,
            "meanfield" => HypothesisKind::MeanField,
            "superposed" => HypothesisKind::Superposed,
            other => {
                return Err(CliError::Config(format!(
                    "line {line}: unknown hypothesis model '{other}' (collapsed|meanfield|superposed)"
                )))
            }
        },
        None => {
            r.defaults.push("hypothesis.model = superposed".into());
            HypothesisKind::Superposed
        }
    };
    let rng_seed = match seed_override {
        Some(s) => s,
        None => r.uint_or("hypothesis", "rng_seed", 0)?,
    };
    let hypothesis = GravityHypothesis::new(kind, rng_seed);
    let shots = r.uint_or("hypothesis", "shots", 1000)?;
    if shots == 0 {
        return Err(CliError::Config("hypothesis.shots must be >= 1".into()));
    }

    // Optics: wavelength explicit or derived from source mass and speed.
    let wavelength = match r.quantity("optics", "wavelength", Dimension::Length)? {
        Some(v) => {
            if !(v > 0.0) {
                return Err(CliError::Config("optics.wavelength must be > 0".into()));
            }
            v
        }
        None => {
            let speed = r.quantity_or("source", "source_speed", Dimension::Speed, 1e-3, "1e-3 m_per_s")?;
            if !(speed > 0.0) {
                return Err(CliError::Config("source.source_speed must be > 0".into()));
            }
            let derived = PLANCK_H / (mass_m * speed);
            r.defaults.push(format!(
                "optics.wavelength derived from source mass and speed = {derived:.6e} m"
            ));
            derived
        }
    };
    let screen_distance =
        r.quantity_or("optics", "screen_distance_L", Dimension::Length, 1.0, "1 m")?;
    let window = r.quantity("optics", "window", Dimension::Length)?;
    let n_samples = r.uint_or("optics", "n_samples", 4096)? as usize;
    let interaction_window = r.quantity("optics", "interaction_window_tau", Dimension::Time)?;
    let optics = OpticsSpec {
        wavelength,
        screen_distance,
        window,
        n_samples,
        pointer_sigma_x: wavepacket_sigma_x,
        interaction_window,
    };
    optics.validate().map_err(CliError::from)?;
    if experiment == ExperimentKind::Fringes {
        let fresnel = source.separation().powi(2) / (wavelength * screen_distance);
        if fresnel > 0.1 {
            warnings.push(format!(
                "Fraunhofer validity marginal: d^2/(lambda L) = {fresnel:.3e} exceeds 0.1"
            ));
        }
    }

    // Numerics.
    let numerics = NumericsConfig {
        rel_tol: r.float_or("numerics", "rel_tol", 1e-10)?,
        abs_tol: r.float_or("numerics", "abs_tol", 0.0)?,
        x_start_factor: r.float_or("numerics", "x_start_factor", 100.0)?,
        t_span: r.quantity("numerics", "t_span", Dimension::Time)?,
        max_steps: r.uint_or("numerics", "max_steps", 1_000_000)? as usize,
    };
    numerics.validate().map_err(CliError::from)?;

    // Feasibility scan.
    let eta = r.float_or("feasibility", "eta", 1.0)?;
    let model = CasimirModel { eta, material_density };
    model.validate().map_err(CliError::from)?;
    let feasibility = FeasibilityConfig {
        mass_range: (
            r.quantity_or("feasibility", "mass_min", Dimension::Mass, 1e6 * AMU, "1e6 amu")?,
            r.quantity_or("feasibility", "mass_max", Dimension::Mass, 1e12 * AMU, "1e12 amu")?,
        ),
        distance_range: (
            r.quantity_or("feasibility", "distance_min", Dimension::Length, 1e-7, "0.1 um")?,
            r.quantity_or("feasibility", "distance_max", Dimension::Length, 1e-4, "100 um")?,
        ),
        grid_dims: (
            r.uint_or("feasibility", "grid_mass", 64)? as usize,
            r.uint_or("feasibility", "grid_distance", 64)? as usize,
        ),
        threshold_ratio: r.float_or("feasibility", "threshold_ratio", 1.0)?,
        model,
    };

    // Toy model.
    let d = source.separation();
    let toy_sigma = r.quantity_or(
        "toymodel",
        "sigma",
        Dimension::Length,
        source.slit_width,
        "source.slit_width_sigma",
    )?;
    let default_extent = 12.0 * toy_sigma.max(d);
    let grid_extent = match r.quantity("toymodel", "grid_extent", Dimension::Length)? {
        Some(v) => v,
        None => {
            r.defaults
                .push(format!("toymodel.grid_extent = {default_extent:.6e} m"));
            default_extent
        }
    };
    let field_x = match r.quantity("toymodel", "field_point_x", Dimension::Length)? {
        Some(v) => v,
        None => {
            let v = 3.0 * d;
            r.defaults.push(format!("toymodel.field_point_x = {v:.6e} m"));
            v
        }
    };
    let field_y = r.quantity_or("toymodel", "field_point_y", Dimension::Length, 0.0, "0 m")?;
    let toymodel = ToyModelConfig {
        field_point: Vec2::new(field_x, field_y),
        scheme: RegularizationScheme {
            sigma: toy_sigma,
            grid_extent,
            grid_points: r.uint_or("toymodel", "grid_points", 512)? as usize,
            include_cross: r.bool_or("toymodel", "include_cross", true)?,
        },
    };
    if experiment == ExperimentKind::ToyModel {
        toymodel.scheme.validate(&source).map_err(CliError::from)?;
    }

    // Regime classifier inputs, required only for that experiment.
    let regime = {
        let c = r.float("regime", "curvature_R")?;
        let h = r.float("regime", "hbar_scale")?;
        let f = r.float("regime", "source_fluctuation")?;
        match (c, h, f) {
            (Some(c), Some(h), Some(f)) => Some(RegimeConfig {
                curvature_r: c,
                hbar_scale: h,
                source_fluctuation: f,
            }),
            (None, None, None) => None,
            _ => {
                return Err(CliError::Config(
                    "regime.curvature_R, regime.hbar_scale and regime.source_fluctuation must be given together".into(),
                ))
            }
        }
    };
    if experiment == ExperimentKind::Regime && regime.is_none() {
        return Err(CliError::Config(
            "experiment regime requires the [regime] section (curvature_R, hbar_scale, source_fluctuation)".into(),
        ));
    }

    let output = OutputConfig {
        gnuplot: r.bool_or("output", "gnuplot", false)?,
        histogram_bins: r.uint_or("output", "histogram_bins", 64)? as usize,
        export_trajectories: r.bool_or("output", "export_trajectories", false)?,
    };
    if output.histogram_bins == 0 {
        return Err(CliError::Config("output.histogram_bins must be >= 1".into()));
    }

    Ok(RunConfig {
        experiment,
        source,
        test,
        hypothesis,
        shots,
        optics,
        numerics,
        feasibility,
        toymodel,
        regime,
        output,
        defaults_applied: r.defaults,
        warnings,
    })
}
