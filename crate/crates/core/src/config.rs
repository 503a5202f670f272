//! JSON run configuration: schema validation with full key paths,
//! defaults, and conversion to a runnable [`Scenario`].
//!
//! Layout (every section optional except `init`):
//!
//! ```json
//! {
//!   "model":   {"handedness": "right", "screened": true, "nu_plus": 0.0, "nu_minus": 0.0},
//!   "grid":    {"n": 256, "box": 12.8},
//!   "contour": {"nodes": 512},
//!   "time":    {"dt": 0.0, "t_end": 10.0, "output_every": 0.5},
//!   "init":    {"preset": "smooth_merger", "scale": 1.0},
//!   "out":     {"dir": "out"}
//! }
//! ```
//!
//! `grid` and `contour` are mutually exclusive; each preset demands the
//! section it evolves on. Unknown keys anywhere are rejected by path.
//! `time.dt = 0` (the default) defers the step size to the stability
//! bound; a missing `time.output_every` defaults to `t_end / 20`.

use crate::grid::{Handedness, Screening};
use crate::scenario::{self, RunSettings, Scenario, SmoothMergerSpec};
use crate::{Error, Result};

use serde_json::{Map, Value};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Parsed, schema-checked configuration. Range validation that depends
/// on the preset (parameter windows, resolution) happens in
/// [`Config::to_scenario`].
#[derive(Debug, Clone)]
pub struct Config {
    pub handedness: Option<Handedness>,
    pub screened: Option<bool>,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub grid_n: usize,
    pub grid_box: f64,
    pub contour_nodes: usize,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub output_every: Option<f64>,
    pub preset: String,
    pub params: BTreeMap<String, f64>,
    pub out_dir: PathBuf,
    /// The parsed source document (echoed into run manifests).
    pub raw: Value,
}

fn joined(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Config(format!("{what} must be a JSON object")))
}

fn allow_keys(map: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    for k in map.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Config(format!(
                "unknown key {} (expected one of: {})",
                joined(path, k),
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn f64_field(map: &Map<String, Value>, path: &str, key: &str) -> Result<Option<f64>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => match v.as_f64() {
            Some(x) => Ok(Some(x)),
            None => Err(Error::Config(format!(
                "{} must be a number",
                joined(path, key)
            ))),
        },
    }
}

fn usize_field(map: &Map<String, Value>, path: &str, key: &str) -> Result<Option<usize>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => match v.as_u64() {
            Some(x) => Ok(Some(x as usize)),
            None => Err(Error::Config(format!(
                "{} must be a non-negative integer",
                joined(path, key)
            ))),
        },
    }
}

fn bool_field(map: &Map<String, Value>, path: &str, key: &str) -> Result<Option<bool>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => match v.as_bool() {
            Some(x) => Ok(Some(x)),
            None => Err(Error::Config(format!(
                "{} must be a boolean",
                joined(path, key)
            ))),
        },
    }
}

fn str_field(map: &Map<String, Value>, path: &str, key: &str) -> Result<Option<String>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => match v.as_str() {
            Some(x) => Ok(Some(x.to_string())),
            None => Err(Error::Config(format!(
                "{} must be a string",
                joined(path, key)
            ))),
        },
    }
}

impl Config {
    /// Parse and schema-check a configuration document.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        let top = obj(&raw, "configuration root")?;
        allow_keys(top, "", &["model", "grid", "contour", "time", "init", "out"])?;

        let mut handedness = None;
        let mut screened = None;
        let mut nu_plus = 0.0;
        let mut nu_minus = 0.0;
        if let Some(v) = top.get("model") {
            let m = obj(v, "model")?;
            allow_keys(m, "model", &["handedness", "screened", "nu_plus", "nu_minus"])?;
            if let Some(s) = str_field(m, "model", "handedness")? {
                handedness = Some(match s.as_str() {
                    "right" => Handedness::Right,
                    "left" => Handedness::Left,
                    other => {
                        return Err(Error::Config(format!(
                            "model.handedness must be \"right\" or \"left\", got {other:?}"
                        )))
                    }
                });
            }
            screened = bool_field(m, "model", "screened")?;
            for (key, slot) in [("nu_plus", &mut nu_plus), ("nu_minus", &mut nu_minus)] {
                if let Some(x) = f64_field(m, "model", key)? {
                    if !(x >= 0.0) || !x.is_finite() {
                        return Err(Error::Config(format!(
                            "model.{key} must be >= 0, got {x}"
                        )));
                    }
                    *slot = x;
                }
            }
        }

        let has_grid = top.contains_key("grid");
        let has_contour = top.contains_key("contour");
        if has_grid && has_contour {
            return Err(Error::Config(
                "grid and contour sections are mutually exclusive".into(),
            ));
        }
        let mut grid_n = 256usize;
        let mut grid_box = 12.8f64;
        if let Some(v) = top.get("grid") {
            let g = obj(v, "grid")?;
            allow_keys(g, "grid", &["n", "box"])?;
            if let Some(n) = usize_field(g, "grid", "n")? {
                grid_n = n;
            }
            if let Some(b) = f64_field(g, "grid", "box")? {
                grid_box = b;
            }
            // value ranges are enforced by the grid constructor, which
            // names grid.n / grid.box in its messages
        }
        let mut contour_nodes = 512usize;
        if let Some(v) = top.get("contour") {
            let c = obj(v, "contour")?;
            allow_keys(c, "contour", &["nodes"])?;
            if let Some(m) = usize_field(c, "contour", "nodes")? {
                contour_nodes = m;
            }
        }

        let mut dt = None;
        let mut t_end = None;
        let mut output_every = None;
        if let Some(v) = top.get("time") {
            let t = obj(v, "time")?;
            allow_keys(t, "time", &["dt", "t_end", "output_every"])?;
            dt = f64_field(t, "time", "dt")?;
            t_end = f64_field(t, "time", "t_end")?;
            output_every = f64_field(t, "time", "output_every")?;
            // ranges are enforced by RunSettings::validate (named time.*)
        }

        let init_v = top
            .get("init")
            .ok_or_else(|| Error::Config("init section is required".into()))?;
        let init = obj(init_v, "init")?;
        let preset = str_field(init, "init", "preset")?
            .ok_or_else(|| Error::Config("init.preset is required".into()))?;
        let allowed_params: &[&str] = match preset.as_str() {
            "smooth_merger" => &["preset", "scale", "amplitude", "eps_plateau"],
            "smooth_merger_scaled" => &["preset", "eps", "scale", "amplitude", "eps_plateau"],
            "patch_merger" => &["preset", "r", "d"],
            "kirchhoff" => &["preset", "r"],
            "point_vortex" => &["preset", "x0", "y0"],
            other => {
                return Err(Error::Config(format!(
                    "init.preset {other:?} unknown (expected smooth_merger, \
                     smooth_merger_scaled, patch_merger, kirchhoff, or point_vortex)"
                )))
            }
        };
        allow_keys(init, "init", allowed_params)?;
        let mut params = BTreeMap::new();
        for (k, v) in init {
            if k == "preset" {
                continue;
            }
            let x = v
                .as_f64()
                .ok_or_else(|| Error::Config(format!("init.{k} must be a number")))?;
            params.insert(k.clone(), x);
        }

        let mut out_dir = PathBuf::from("out");
        if let Some(v) = top.get("out") {
            let o = obj(v, "out")?;
            allow_keys(o, "out", &["dir"])?;
            if let Some(d) = str_field(o, "out", "dir")? {
                out_dir = PathBuf::from(d);
            }
        }

        let contour_preset = matches!(preset.as_str(), "patch_merger" | "kirchhoff");
        let vortex_preset = preset == "point_vortex";
        if (contour_preset || vortex_preset) && has_grid {
            return Err(Error::Config(format!(
                "preset {preset} does not evolve gridded fields; remove the grid section"
            )));
        }
        if !contour_preset && has_contour {
            return Err(Error::Config(format!(
                "preset {preset} does not evolve contours; remove the contour section"
            )));
        }

        Ok(Self {
            handedness,
            screened,
            nu_plus,
            nu_minus,
            grid_n,
            grid_box,
            contour_nodes,
            dt,
            t_end,
            output_every,
            preset,
            params,
            out_dir,
            raw,
        })
    }

    /// Read and parse a configuration file, prefixing schema errors with
    /// the file path.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    /// Merge a preset's natural schedule with explicit time settings.
    fn resolved_settings(&self, preset_default: RunSettings) -> RunSettings {
        let t_end = self.t_end.unwrap_or(preset_default.t_end);
        let output_every = self.output_every.unwrap_or(if self.t_end.is_some() {
            if t_end > 0.0 {
                t_end / 20.0
            } else {
                1.0 // t_end = 0 still records the initial sample
            }
        } else {
            preset_default.output_every
        });
        RunSettings {
            dt_max: self.dt.unwrap_or(preset_default.dt_max),
            t_end,
            output_every,
        }
    }

    /// Reject explicit model settings that contradict a fixed-model preset.
    fn require_ideal_model(
        &self,
        handedness: Handedness,
        screening: Screening,
        preset: &str,
    ) -> Result<()> {
        if let Some(h) = self.handedness {
            if h != handedness {
                return Err(Error::Config(format!(
                    "preset {preset} is {}; adjust or drop model.handedness",
                    if handedness == Handedness::Left {
                        "left-handed"
                    } else {
                        "right-handed"
                    }
                )));
            }
        }
        if let Some(s) = self.screened {
            let want = screening == Screening::Screened;
            if s != want {
                return Err(Error::Config(format!(
                    "preset {preset} is {}; adjust or drop model.screened",
                    if want { "screened" } else { "unscreened" }
                )));
            }
        }
        if self.nu_plus != 0.0 || self.nu_minus != 0.0 {
            return Err(Error::Config(format!(
                "preset {preset} has no resistive variant; model.nu_plus and model.nu_minus must be 0"
            )));
        }
        Ok(())
    }

    /// Grid, bump shape, and schedule for the smooth merger presets.
    /// Errors for contour / point-vortex presets.
    pub fn smooth_spec(&self) -> Result<SmoothMergerSpec> {
        if self.preset != "smooth_merger" && self.preset != "smooth_merger_scaled" {
            return Err(Error::Config(format!(
                "preset {} does not evolve gridded smooth data; \
                 parameter sweeps need a smooth_merger preset",
                self.preset
            )));
        }
        if self.handedness == Some(Handedness::Left) {
            return Err(Error::Config(
                "smooth merger presets model the right-handed system; \
                 adjust or drop model.handedness"
                    .into(),
            ));
        }
        let screening = match self.screened {
            Some(false) => Screening::Unscreened,
            _ => Screening::Screened,
        };
        Ok(SmoothMergerSpec {
            n: self.grid_n,
            box_size: self.grid_box,
            scale: self.param("scale", 1.0),
            amplitude: self.param("amplitude", 1.0),
            eps_plateau: self.param("eps_plateau", 0.5),
            screening,
            nu: self.nu_plus,
            settings: self.resolved_settings(RunSettings::default()),
        })
    }

    /// Build the runnable scenario (constructing initial data and running
    /// its hypothesis checks).
    pub fn to_scenario(&self) -> Result<Scenario> {
        match self.preset.as_str() {
            "smooth_merger" | "smooth_merger_scaled" => {
                let spec = self.smooth_spec()?;
                let mut sc = if self.preset == "smooth_merger_scaled" {
                    if self.screened == Some(false) {
                        return Err(Error::Config(
                            "preset smooth_merger_scaled is the screened comparison data; \
                             adjust or drop model.screened"
                                .into(),
                        ));
                    }
                    let eps = self.params.get("eps").copied().ok_or_else(|| {
                        Error::Config("init.eps is required for preset smooth_merger_scaled".into())
                    })?;
                    scenario::right_smooth_merger_screened(eps, &spec)?
                } else {
                    scenario::right_smooth_merger(&spec)?
                };
                sc.nu_plus = self.nu_plus;
                sc.nu_minus = self.nu_minus;
                Ok(sc)
            }
            "patch_merger" => {
                self.require_ideal_model(Handedness::Left, Screening::Screened, "patch_merger")?;
                let r = self.param("r", 0.05);
                let d = self.param("d", 0.5 * r);
                let settings = self.resolved_settings(RunSettings {
                    dt_max: 0.0,
                    t_end: 9.0 * PI / 4.0,
                    output_every: 9.0 * PI / 80.0,
                });
                scenario::left_patch_merger(r, d, self.contour_nodes, settings)
            }
            "kirchhoff" => {
                self.require_ideal_model(Handedness::Left, Screening::Unscreened, "kirchhoff")?;
                let r = self.param("r", 1.0);
                let settings = self.resolved_settings(RunSettings {
                    dt_max: 0.0,
                    t_end: 9.0 * PI, // one full shape rotation at rate 2/9
                    output_every: 9.0 * PI / 40.0,
                });
                scenario::kirchhoff_ellipse(r, self.contour_nodes, settings)
            }
            "point_vortex" => {
                self.require_ideal_model(Handedness::Right, Screening::Unscreened, "point_vortex")?;
                let x0 = self.param("x0", -1.0);
                let y0 = self.param("y0", 1.0);
                let mut sc = scenario::point_vortex_preset(x0, y0)?;
                sc.settings = self.resolved_settings(sc.settings);
                Ok(sc)
            }
            _ => unreachable!("preset validated at parse time"),
        }
    }
}
