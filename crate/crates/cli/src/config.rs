//! Run configuration: flat `section.key = value` text.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment (also allowed after a value)
//! seed = 7
//! geometry.L0 = 1.0
//! energy.kappa = 1.0, 2.0
//! ```
//!
//! Lists are comma separated and hold one value per material segment.
//! Keys are case sensitive; unknown or repeated keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use morphogrow::dynamics::{LawKind, Method, NutrientResponse, NutrientSampling, StressResponse};
use morphogrow::energy::BaseEnergy;
use morphogrow::nutrients::DEFAULT_REFINE;
use thiserror::Error;

const KEYS: &[&str] = &[
    "seed",
    "geometry.L0",
    "geometry.XI",
    "geometry.M",
    "geometry.cells_per_segment",
    "geometry.ell0",
    "energy.base",
    "energy.kappa",
    "nutrients.D0",
    "nutrients.beta0",
    "nutrients.nL",
    "nutrients.nR",
    "nutrients.refine",
    "law.kind",
    "law.gamma",
    "law.mu",
    "law.mu_a",
    "law.mu_b",
    "law.mu_c",
    "law.eta",
    "law.eta_critical",
    "law.eta_floor",
    "law.eta_saturation",
    "law.eta_ceiling",
    "law.averaging",
    "integration.T",
    "integration.dt",
    "integration.method",
    "integration.stride",
    "integration.initial",
    "integration.free_initial",
    "integration.dt_guard",
    "integration.inject_fault_at",
    "tolerances.stress",
    "tolerances.boundary",
    "tolerances.envelope_slack",
    "probe.center",
    "probe.radius",
    "probe.pairs",
    "probe.samples",
    "oracle.growth",
    "oracle.refine",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {key}: {message}")]
    Value {
        line: usize,
        key: String,
        message: String,
    },
    #[error("{key}: {message}")]
    Missing { key: String, message: String },
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

/// Parsed but untyped entries.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            if value.is_empty() {
                return Err(ConfigError::Value {
                    line,
                    key: key.into(),
                    message: "empty value".into(),
                });
            }
            let entry = Entry {
                line,
                value: value.to_string(),
            };
            if let Some(prev) = entries.insert(key.to_string(), entry) {
                return Err(ConfigError::Value {
                    line,
                    key: key.into(),
                    message: format!("already set on line {}", prev.line),
                });
            }
        }
        Ok(Self { entries })
    }

    /// Every entry as written, sorted by key.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .map(|(k, e)| (k.clone(), e.value.clone()))
            .collect()
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    fn bad(&self, key: &str, message: impl Into<String>) -> ConfigError {
        match self.entries.get(key) {
            Some(e) => ConfigError::Value {
                line: e.line,
                key: key.into(),
                message: message.into(),
            },
            None => ConfigError::Missing {
                key: key.into(),
                message: message.into(),
            },
        }
    }

    fn parsed<T: std::str::FromStr>(
        &self,
        key: &str,
        what: &str,
    ) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| self.bad(key, format!("expected {what}, got `{}`", e.value))),
        }
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.parsed(key, "a number")?;
        match v {
            Some(x) if !x.is_finite() => Err(self.bad(key, "must be finite")),
            other => Ok(other),
        }
    }

    fn f64_req(&self, key: &str) -> Result<f64, ConfigError> {
        self.f64_opt(key)?
            .ok_or_else(|| self.bad(key, "required key is missing"))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self
            .parsed(key, "a nonnegative integer")?
            .unwrap_or(default))
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        Ok(self.parsed(key, "true or false")?.unwrap_or(default))
    }

    fn list_opt(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| self.bad(key, format!("expected a number, got `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn word_opt(&self, key: &str) -> Option<String> {
        self.entries.get(key).map(|e| e.value.to_ascii_lowercase())
    }
}

/// Material layout of the reference interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    TwoSegment {
        interface: f64,
        cells_per_segment: usize,
    },
    Uniform {
        cells: usize,
    },
}

impl Layout {
    pub fn segment_count(&self) -> usize {
        match self {
            Layout::TwoSegment { .. } => 2,
            Layout::Uniform { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NutrientConfig {
    pub d0: Vec<f64>,
    pub beta0: Vec<f64>,
    pub n_left: f64,
    pub n_right: f64,
    pub refine: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawConfig {
    pub kind: LawKind,
    pub gamma: Vec<f64>,
    pub mu: StressResponse,
    pub eta: NutrientResponse,
    pub sampling: NutrientSampling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationConfig {
    pub horizon: f64,
    pub dt: f64,
    pub method: Method,
    pub stride: usize,
    /// Per-segment initial growth; `None` is `G = 1`.
    pub initial: Option<Vec<f64>>,
    pub guard_dt: bool,
    pub inject_fault_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Residual tolerance of the stress solve, relative to `ell0`.
    pub stress: f64,
    /// Largest accepted `|y(L0) - ell0| / ell0` in recorded steps.
    pub boundary: f64,
    pub envelope_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub center: Option<Vec<f64>>,
    pub radius: f64,
    pub pairs: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub growth: Option<Vec<f64>>,
    pub refine: Vec<usize>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub length: f64,
    pub layout: Layout,
    pub ell0: f64,
    pub base: BaseEnergy,
    pub kappa: Vec<f64>,
    pub nutrients: Option<NutrientConfig>,
    pub law: LawConfig,
    pub integration: IntegrationConfig,
    pub tolerances: Tolerances,
    pub probe: ProbeConfig,
    pub oracle: OracleConfig,
    /// Entries exactly as written, for the manifest.
    pub echo: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw = RawConfig::parse(text)?;
        build(&raw)
    }
}

fn positive(raw: &RawConfig, key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(raw.bad(key, format!("must be positive, got {v}")))
    }
}

fn nonnegative(raw: &RawConfig, key: &str, v: f64) -> Result<f64, ConfigError> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(raw.bad(key, format!("must be nonnegative, got {v}")))
    }
}

/// A per-segment list; a single value is broadcast.
fn segment_list(
    raw: &RawConfig,
    key: &str,
    segments: usize,
) -> Result<Option<Vec<f64>>, ConfigError> {
    let Some(v) = raw.list_opt(key)? else {
        return Ok(None);
    };
    match v.len() {
        1 => Ok(Some(vec![v[0]; segments])),
        n if n == segments => Ok(Some(v)),
        n => Err(raw.bad(
            key,
            format!("expected 1 or {segments} values (one per segment), got {n}"),
        )),
    }
}

fn positive_list(raw: &RawConfig, key: &str, v: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
    for &x in &v {
        positive(raw, key, x)?;
    }
    Ok(v)
}

fn build(raw: &RawConfig) -> Result<RunConfig, ConfigError> {
    let seed = raw.parsed("seed", "a nonnegative integer")?.unwrap_or(0);

    let length = positive(raw, "geometry.L0", raw.f64_req("geometry.L0")?)?;
    let layout = match (raw.has("geometry.XI"), raw.has("geometry.M")) {
        (true, true) => {
            let line = raw.line("geometry.M");
            return Err(ConfigError::Value {
                line,
                key: "geometry.M".into(),
                message: "set either geometry.XI or geometry.M, not both".into(),
            });
        }
        (false, false) => {
            return Err(raw.bad(
                "geometry.XI",
                "set geometry.XI (two segments) or geometry.M",
            ))
        }
        (true, false) => {
            let interface = raw.f64_req("geometry.XI")?;
            if !(interface > 0.0 && interface < length) {
                return Err(raw.bad(
                    "geometry.XI",
                    format!("interface must lie strictly inside (0, {length}), got {interface}"),
                ));
            }
            let cells_per_segment = raw.usize_or("geometry.cells_per_segment", 1)?;
            if cells_per_segment == 0 {
                return Err(raw.bad("geometry.cells_per_segment", "must be at least 1"));
            }
            Layout::TwoSegment {
                interface,
                cells_per_segment,
            }
        }
        (false, true) => {
            if raw.has("geometry.cells_per_segment") {
                return Err(raw.bad(
                    "geometry.cells_per_segment",
                    "only meaningful together with geometry.XI",
                ));
            }
            let cells = raw.usize_or("geometry.M", 1)?;
            if cells == 0 {
                return Err(raw.bad("geometry.M", "must be at least 1"));
            }
            Layout::Uniform { cells }
        }
    };
    let segments = layout.segment_count();
    let ell0 = positive(raw, "geometry.ell0", raw.f64_req("geometry.ell0")?)?;

    let base = match raw.word_opt("energy.base").as_deref() {
        None | Some("mooney") => BaseEnergy::Mooney,
        Some("quadratic") => BaseEnergy::Quadratic,
        Some(other) => {
            return Err(raw.bad(
                "energy.base",
                format!("expected quadratic or mooney, got `{other}`"),
            ))
        }
    };
    let kappa = segment_list(raw, "energy.kappa", segments)?
        .ok_or_else(|| raw.bad("energy.kappa", "required key is missing"))?;
    let kappa = positive_list(raw, "energy.kappa", kappa)?;

    let nutrients = build_nutrients(raw, segments)?;
    let law = build_law(raw, segments)?;
    if law.kind == LawKind::Full && nutrients.is_none() {
        return Err(raw.bad(
            "law.kind",
            "a full law needs nutrients.D0 and nutrients.beta0",
        ));
    }
    let integration = build_integration(raw, segments)?;

    let tolerances = Tolerances {
        stress: positive(
            raw,
            "tolerances.stress",
            raw.f64_or("tolerances.stress", 1e-12)?,
        )?,
        boundary: positive(
            raw,
            "tolerances.boundary",
            raw.f64_or("tolerances.boundary", 1e-10)?,
        )?,
        envelope_slack: match raw.f64_opt("tolerances.envelope_slack")? {
            Some(v) => Some(nonnegative(raw, "tolerances.envelope_slack", v)?),
            None => None,
        },
    };

    let probe = ProbeConfig {
        center: segment_list(raw, "probe.center", segments)?
            .map(|v| positive_list(raw, "probe.center", v))
            .transpose()?,
        radius: nonnegative(raw, "probe.radius", raw.f64_or("probe.radius", 0.0)?)?,
        pairs: raw.usize_or("probe.pairs", 100)?,
        samples: raw.usize_or("probe.samples", 5)?,
    };
    if probe.samples < 2 {
        return Err(raw.bad("probe.samples", "need at least 2 samples per axis"));
    }

    let oracle = OracleConfig {
        growth: segment_list(raw, "oracle.growth", segments)?
            .map(|v| positive_list(raw, "oracle.growth", v))
            .transpose()?,
        refine: match raw.list_opt("oracle.refine")? {
            None => vec![4, 8, 16],
            Some(v) => {
                let levels: Vec<usize> = v
                    .iter()
                    .map(|&x| {
                        if x >= 1.0 && x.fract() == 0.0 {
                            Ok(x as usize)
                        } else {
                            Err(raw.bad("oracle.refine", format!("invalid level {x}")))
                        }
                    })
                    .collect::<Result<_, _>>()?;
                levels
            }
        },
    };

    Ok(RunConfig {
        seed,
        length,
        layout,
        ell0,
        base,
        kappa,
        nutrients,
        law,
        integration,
        tolerances,
        probe,
        oracle,
        echo: raw.echo(),
    })
}

fn build_nutrients(
    raw: &RawConfig,
    segments: usize,
) -> Result<Option<NutrientConfig>, ConfigError> {
    let d0 = segment_list(raw, "nutrients.D0", segments)?;
    let beta0 = segment_list(raw, "nutrients.beta0", segments)?;
    let (d0, beta0) = match (d0, beta0) {
        (None, None) => {
            for key in ["nutrients.nL", "nutrients.nR", "nutrients.refine"] {
                if raw.has(key) {
                    return Err(raw.bad(key, "nutrients.D0 and nutrients.beta0 are missing"));
                }
            }
            return Ok(None);
        }
        (Some(_), None) => return Err(raw.bad("nutrients.beta0", "required with nutrients.D0")),
        (None, Some(_)) => return Err(raw.bad("nutrients.D0", "required with nutrients.beta0")),
        (Some(d), Some(b)) => (d, b),
    };
    let d0 = positive_list(raw, "nutrients.D0", d0)?;
    for &b in &beta0 {
        nonnegative(raw, "nutrients.beta0", b)?;
    }
    let refine = raw.usize_or("nutrients.refine", DEFAULT_REFINE)?;
    if refine == 0 {
        return Err(raw.bad("nutrients.refine", "must be at least 1"));
    }
    Ok(Some(NutrientConfig {
        d0,
        beta0,
        n_left: nonnegative(raw, "nutrients.nL", raw.f64_or("nutrients.nL", 1.0)?)?,
        n_right: nonnegative(raw, "nutrients.nR", raw.f64_or("nutrients.nR", 1.0)?)?,
        refine,
    }))
}

fn build_law(raw: &RawConfig, segments: usize) -> Result<LawConfig, ConfigError> {
    let kind = match raw.word_opt("law.kind").as_deref() {
        None | Some("pure") => LawKind::Pure,
        Some("stress") => LawKind::Stress,
        Some("full") => LawKind::Full,
        Some(other) => {
            return Err(raw.bad(
                "law.kind",
                format!("expected pure, stress or full, got `{other}`"),
            ))
        }
    };
    let gamma = segment_list(raw, "law.gamma", segments)?.unwrap_or_else(|| vec![1.0; segments]);
    let gamma = positive_list(raw, "law.gamma", gamma)?;
    let mu = match raw.word_opt("law.mu").as_deref() {
        None | Some("arctan") => {
            let a = nonnegative(raw, "law.mu_a", raw.f64_or("law.mu_a", 1.0)?)?;
            StressResponse::Arctan {
                a,
                b: raw.f64_or("law.mu_b", 0.0)?,
                c: raw.f64_or("law.mu_c", 1.0)?,
            }
        }
        Some("square") => StressResponse::Square,
        Some(other) => {
            return Err(raw.bad(
                "law.mu",
                format!("expected arctan or square, got `{other}`"),
            ))
        }
    };
    let eta = match raw.word_opt("law.eta").as_deref() {
        None | Some("identity") => NutrientResponse::Identity,
        Some("clamp") => NutrientResponse::Clamp {
            critical: nonnegative(raw, "law.eta_critical", raw.f64_req("law.eta_critical")?)?,
            floor: nonnegative(raw, "law.eta_floor", raw.f64_or("law.eta_floor", 0.0)?)?,
        },
        Some("saturating") => {
            let floor = nonnegative(raw, "law.eta_floor", raw.f64_or("law.eta_floor", 0.0)?)?;
            let ceiling = raw.f64_or("law.eta_ceiling", 1.0)?;
            if ceiling < floor {
                return Err(raw.bad("law.eta_ceiling", "must not be below law.eta_floor"));
            }
            NutrientResponse::Saturating {
                saturation: positive(
                    raw,
                    "law.eta_saturation",
                    raw.f64_req("law.eta_saturation")?,
                )?,
                floor,
                ceiling,
            }
        }
        Some(other) => {
            return Err(raw.bad(
                "law.eta",
                format!("expected identity, clamp or saturating, got `{other}`"),
            ))
        }
    };
    let sampling = match raw.word_opt("law.averaging").as_deref() {
        None | Some("midpoint") => NutrientSampling::Midpoint,
        Some("segment") => NutrientSampling::Segment,
        Some(other) => {
            return Err(raw.bad(
                "law.averaging",
                format!("expected midpoint or segment, got `{other}`"),
            ))
        }
    };
    Ok(LawConfig {
        kind,
        gamma,
        mu,
        eta,
        sampling,
    })
}

fn build_integration(raw: &RawConfig, segments: usize) -> Result<IntegrationConfig, ConfigError> {
    let horizon = positive(raw, "integration.T", raw.f64_or("integration.T", 1.0)?)?;
    let dt = positive(raw, "integration.dt", raw.f64_or("integration.dt", 1e-2)?)?;
    if dt > horizon {
        return Err(raw.bad(
            "integration.dt",
            format!("must not exceed integration.T = {horizon}"),
        ));
    }
    let method = match raw.word_opt("integration.method").as_deref() {
        None | Some("rk4") => Method::Rk4,
        Some("euler") => Method::Euler,
        Some(other) => {
            return Err(raw.bad(
                "integration.method",
                format!("expected rk4 or euler, got `{other}`"),
            ))
        }
    };
    let stride = raw.usize_or("integration.stride", 1)?;
    if stride == 0 {
        return Err(raw.bad("integration.stride", "must be at least 1"));
    }
    let free = raw.bool_or("integration.free_initial", false)?;
    let initial = match segment_list(raw, "integration.initial", segments)? {
        None => None,
        Some(v) => {
            let v = positive_list(raw, "integration.initial", v)?;
            if !free && v.iter().any(|&g| g != 1.0) {
                return Err(raw.bad(
                    "integration.initial",
                    "initial growth other than 1 needs integration.free_initial = true",
                ));
            }
            Some(v)
        }
    };
    let inject_fault_at = match raw.f64_opt("integration.inject_fault_at")? {
        Some(t) => Some(nonnegative(raw, "integration.inject_fault_at", t)?),
        None => None,
    };
    Ok(IntegrationConfig {
        horizon,
        dt,
        method,
        stride,
        initial,
        guard_dt: raw.bool_or("integration.dt_guard", true)?,
        inject_fault_at,
    })
}
