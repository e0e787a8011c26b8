//! Run configuration: JSON schema, exact coefficient parsing, validation.
//!
//! Complex coefficients travel as pairs of decimal strings so that configs
//! mean the same numbers on every platform; they parse exactly into ℚ(i)
//! and are lowered to floating point where the integrators need them.

use crate::curve::{CurveModel, HyperellipticCurve};
use crate::exact::{parse_gaussian, GaussianRational, ParseRationalError};
use crate::path::{pair_loop, LoopPath, PathError};
use crate::span::{ExactConnection, RankMode};
use crate::transport::{ConnectionForm, IntegratorConfig};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("command `{command}` requires field `{field}`")]
    Missing { command: String, field: String },
    #[error("unknown command `{0}` (expected monodromy, derivative, injectivity, rauch-scan, noether-scan or selftest)")]
    UnknownCommand(String),
}

fn field_err(field: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Monodromy,
    Derivative,
    Injectivity,
    RauchScan,
    NoetherScan,
    Selftest,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Monodromy => "monodromy",
            Command::Derivative => "derivative",
            Command::Injectivity => "injectivity",
            Command::RauchScan => "rauch-scan",
            Command::NoetherScan => "noether-scan",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: String,
    #[serde(default)]
    pub curve: Option<RawCurve>,
    #[serde(default)]
    pub connection: Option<RawConnection>,
    #[serde(default)]
    pub direction: Option<RawConnection>,
    #[serde(default)]
    pub loops: Option<Vec<RawLoop>>,
    #[serde(default)]
    pub base_point: Option<[String; 2]>,
    #[serde(default)]
    pub tolerances: Option<RawTolerances>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub genus: Option<usize>,
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RawCurve {
    Hyperelliptic { coeffs: Vec<[String; 2]> },
    PlaneQuartic { terms: Vec<RawQuarticTerm> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQuarticTerm {
    pub i: u8,
    pub j: u8,
    pub c: [String; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConnection {
    pub alpha: Vec<[String; 2]>,
    pub beta: Vec<[String; 2]>,
    pub gamma: Vec<[String; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RawLoop {
    Pair {
        i: usize,
        j: usize,
        #[serde(default = "default_sheet")]
        sheet: i8,
    },
    Polyline {
        vertices: Vec<[f64; 2]>,
        #[serde(default = "default_sheet")]
        sheet: i8,
    },
}

fn default_sheet() -> i8 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub fd_eps: Option<f64>,
}

#[derive(Debug, Deserialize, Clone, Default)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(default)]
    pub json: Option<String>,
    #[serde(default)]
    pub svg: Option<String>,
}

/// A fully validated run: everything constructed, preconditions checked.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub mode: RankMode,
    pub integrator: IntegratorConfig,
    pub fd_eps: f64,
    pub output: RawOutput,
    /// Verbatim copy of the input JSON for report echoing.
    pub echo: serde_json::Value,
    pub job: Job,
}

#[derive(Debug)]
pub enum Job {
    Monodromy {
        curve: HyperellipticCurve,
        conn: ConnectionForm,
        loops: Vec<(String, LoopPath)>,
    },
    Derivative {
        curve: HyperellipticCurve,
        conn: ConnectionForm,
        direction: ConnectionForm,
        loops: Vec<(String, LoopPath)>,
    },
    Injectivity {
        model: CurveModel,
        conn: ExactConnection,
    },
    RauchScan {
        genus: usize,
        trials: u64,
    },
    NoetherScan {
        model: CurveModel,
        trials: u64,
    },
    Selftest,
}

fn parse_complex_pair(field: &str, pair: &[String; 2]) -> Result<GaussianRational, ConfigError> {
    parse_gaussian(&pair[0], &pair[1]).map_err(|e: ParseRationalError| field_err(field, e))
}

fn parse_coeff_vec(field: &str, v: &[[String; 2]]) -> Result<Vec<GaussianRational>, ConfigError> {
    v.iter()
        .enumerate()
        .map(|(k, pair)| parse_complex_pair(&format!("{field}[{k}]"), pair))
        .collect()
}

fn build_curve(raw: &RawCurve) -> Result<CurveModel, ConfigError> {
    match raw {
        RawCurve::Hyperelliptic { coeffs } => {
            let exact = parse_coeff_vec("curve.coeffs", coeffs)?;
            let floats: Vec<Complex64> = exact.iter().map(|c| c.to_complex()).collect();
            CurveModel::hyperelliptic(&floats).map_err(|e| field_err("curve", e))
        }
        RawCurve::PlaneQuartic { terms } => {
            let parsed: Result<Vec<(u8, u8, Complex64)>, ConfigError> = terms
                .iter()
                .map(|t| {
                    Ok((
                        t.i,
                        t.j,
                        parse_complex_pair("curve.terms", &t.c)?.to_complex(),
                    ))
                })
                .collect();
            CurveModel::plane_quartic(parsed?).map_err(|e| field_err("curve", e))
        }
    }
}

fn build_exact_connection(
    field: &str,
    model: &CurveModel,
    raw: &RawConnection,
) -> Result<ExactConnection, ConfigError> {
    let alpha = parse_coeff_vec(&format!("{field}.alpha"), &raw.alpha)?;
    let beta = parse_coeff_vec(&format!("{field}.beta"), &raw.beta)?;
    let gamma = parse_coeff_vec(&format!("{field}.gamma"), &raw.gamma)?;
    ExactConnection::new(model, alpha, beta, gamma).map_err(|e| field_err(field, e))
}

fn build_loops(
    curve: &HyperellipticCurve,
    raw: &[RawLoop],
    base: Complex64,
) -> Result<Vec<(String, LoopPath)>, ConfigError> {
    raw.iter()
        .enumerate()
        .map(|(k, spec)| {
            let label = format!("loop{k}");
            let path: Result<LoopPath, PathError> = match spec {
                RawLoop::Pair { i, j, sheet } => pair_loop(curve, *i, *j, base, *sheet),
                RawLoop::Polyline { vertices, sheet } => {
                    let verts: Vec<Complex64> =
                        vertices.iter().map(|v| Complex64::new(v[0], v[1])).collect();
                    LoopPath::from_vertices(curve, verts, *sheet)
                }
            };
            path.map(|p| (label, p))
                .map_err(|e| field_err(&format!("loops[{k}]"), e))
        })
        .collect()
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<RunConfig, ConfigError> {
        let echo: serde_json::Value = serde_json::from_str(text)?;
        let raw: RawConfig = serde_json::from_str(text)?;
        Self::from_raw(raw, echo)
    }

    /// Builds from an already-parsed JSON document (used by the CLI after
    /// applying flag/environment overrides).
    pub fn from_json_value(value: serde_json::Value) -> Result<RunConfig, ConfigError> {
        let raw: RawConfig = serde_json::from_value(value.clone())?;
        Self::from_raw(raw, value)
    }

    pub fn from_raw(raw: RawConfig, echo: serde_json::Value) -> Result<RunConfig, ConfigError> {
        let command = match raw.command.as_str() {
            "monodromy" => Command::Monodromy,
            "derivative" => Command::Derivative,
            "injectivity" => Command::Injectivity,
            "rauch-scan" => Command::RauchScan,
            "noether-scan" => Command::NoetherScan,
            "selftest" => Command::Selftest,
            other => return Err(ConfigError::UnknownCommand(other.to_string())),
        };

        let missing = |f: &str| ConfigError::Missing {
            command: raw.command.clone(),
            field: f.to_string(),
        };

        let mut integrator = IntegratorConfig::default();
        let mut fd_eps = 1e-4;
        if let Some(t) = &raw.tolerances {
            if let Some(r) = t.rel_tol {
                integrator.rel_tol = r;
            }
            if let Some(a) = t.abs_tol {
                integrator.abs_tol = a;
            }
            if let Some(m) = t.max_steps {
                integrator.max_steps = m;
            }
            if let Some(e) = t.fd_eps {
                fd_eps = e;
            }
        }
        integrator
            .validate()
            .map_err(|e| field_err("tolerances", e))?;
        if !(1e-6..=1e-2).contains(&fd_eps) {
            return Err(field_err("tolerances.fd_eps", "must lie in [1e-6, 1e-2]"));
        }

        let mode = match raw.mode.as_deref() {
            None | Some("exact") => RankMode::ExactGaussianRational,
            Some("float") => RankMode::FloatSvd,
            Some(other) => {
                return Err(field_err(
                    "mode",
                    format!("unknown mode `{other}` (expected exact or float)"),
                ))
            }
        };
        let seed = raw.seed.unwrap_or(1);

        let hyperelliptic = |model: &CurveModel| -> Result<HyperellipticCurve, ConfigError> {
            model
                .as_hyperelliptic()
                .cloned()
                .ok_or_else(|| field_err("curve", "this command needs a hyperelliptic curve"))
        };

        let job = match command {
            Command::Monodromy | Command::Derivative => {
                let model = build_curve(raw.curve.as_ref().ok_or_else(|| missing("curve"))?)?;
                let curve = hyperelliptic(&model)?;
                let conn_exact = build_exact_connection(
                    "connection",
                    &model,
                    raw.connection.as_ref().ok_or_else(|| missing("connection"))?,
                )?;
                let base = match &raw.base_point {
                    Some(pair) => parse_complex_pair("base_point", pair)?.to_complex(),
                    None => curve.default_base(),
                };
                let loops = build_loops(
                    &curve,
                    raw.loops.as_ref().ok_or_else(|| missing("loops"))?,
                    base,
                )?;
                if loops.is_empty() {
                    return Err(field_err("loops", "at least one loop is required"));
                }
                let conn = conn_exact.to_float();
                match command {
                    Command::Monodromy => Job::Monodromy { curve, conn, loops },
                    _ => {
                        let dir_exact = build_exact_connection(
                            "direction",
                            &model,
                            raw.direction.as_ref().ok_or_else(|| missing("direction"))?,
                        )?;
                        Job::Derivative {
                            curve,
                            conn,
                            direction: dir_exact.to_float(),
                            loops,
                        }
                    }
                }
            }
            Command::Injectivity => {
                let model = build_curve(raw.curve.as_ref().ok_or_else(|| missing("curve"))?)?;
                let conn = build_exact_connection(
                    "connection",
                    &model,
                    raw.connection.as_ref().ok_or_else(|| missing("connection"))?,
                )?;
                Job::Injectivity { model, conn }
            }
            Command::RauchScan => Job::RauchScan {
                genus: raw.genus.ok_or_else(|| missing("genus"))?,
                trials: raw.trials.unwrap_or(20),
            },
            Command::NoetherScan => {
                let model = match &raw.curve {
                    Some(c) => build_curve(c)?,
                    // the standard quartic sample
                    None => CurveModel::PlaneQuartic(crate::curve::PlaneQuartic::fermat()),
                };
                Job::NoetherScan {
                    model,
                    trials: raw.trials.unwrap_or(100),
                }
            }
            Command::Selftest => Job::Selftest,
        };

        Ok(RunConfig {
            command,
            seed,
            mode,
            integrator,
            fd_eps,
            output: raw.output.clone().unwrap_or_default(),
            echo,
            job,
        })
    }
}
