//! Simulation settings and their flat `dotted.key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! mode = virtual
//! tick = 0.01
//! white.l1 = 0.35
//! white.speed = 1.5
//! arms.omega = 3.14        # both arms, all three joints
//! board.square_size = 0.05
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{wrap_angle, ArmGeometry, BoardLayout, JointAngles, JointRange, Point3};
use crate::motion::{ArmId, SpeedBounds, SpeedFactor, DEFAULT_DWELL, DEFAULT_METRICS_DT};
use crate::notation::Color;

pub const DEFAULT_TICK: f64 = 0.010;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    StepByStep,
    Autoplay,
    Virtual,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "step" | "step_by_step" => Ok(Mode::StepByStep),
            "auto" | "autoplay" => Ok(Mode::Autoplay),
            "virtual" => Ok(Mode::Virtual),
            other => Err(format!(
                "unknown mode {other:?} (expected step, auto or virtual)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::StepByStep => "step",
            Mode::Autoplay => "auto",
            Mode::Virtual => "virtual",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmConfig {
    pub geometry: ArmGeometry,
    /// Rest pose between moves.
    pub home: JointAngles,
    pub speed: f64,
    explicit_heading: bool,
    explicit_home_yaw: bool,
}

impl ArmConfig {
    fn default_for(color: Color) -> Self {
        let geometry = ArmGeometry::default_for(color);
        ArmConfig {
            home: default_home(&geometry, &BoardLayout::default()),
            geometry,
            speed: 1.0,
            explicit_heading: false,
            explicit_home_yaw: false,
        }
    }
}

/// Yaw toward the board center, shoulder pi/4, elbow -pi/2.
pub fn default_home(geom: &ArmGeometry, layout: &BoardLayout) -> JointAngles {
    let c = layout.center();
    let yaw = wrap_angle((c.y - geom.base.y).atan2(c.x - geom.base.x) - geom.heading);
    JointAngles::new(
        yaw,
        std::f64::consts::FRAC_PI_4,
        -std::f64::consts::FRAC_PI_2,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub white: ArmConfig,
    pub black: ArmConfig,
    pub layout: BoardLayout,
    pub speed_bounds: SpeedBounds,
    /// Stationary time at grasp and at release, seconds.
    pub dwell: f64,
    pub mode: Mode,
    /// Simulated seconds per tick.
    pub tick: f64,
    /// Sampling step for grip path length.
    pub metrics_dt: f64,
    /// Pace ticks to the wall clock (live runs only; never in virtual mode).
    pub realtime: bool,
    pub game: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            white: ArmConfig::default_for(Color::White),
            black: ArmConfig::default_for(Color::Black),
            layout: BoardLayout::default(),
            speed_bounds: SpeedBounds::default(),
            dwell: DEFAULT_DWELL,
            mode: Mode::Virtual,
            tick: DEFAULT_TICK,
            metrics_dt: DEFAULT_METRICS_DT,
            realtime: false,
            game: None,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("{key}: {value:?} is not a number"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("{key}: {value:?} is not a boolean")),
    }
}

impl SimConfig {
    pub fn arm(&self, arm: ArmId) -> &ArmConfig {
        match arm {
            ArmId::Mr1 => &self.white,
            ArmId::Mr2 => &self.black,
        }
    }

    pub fn arm_mut(&mut self, arm: ArmId) -> &mut ArmConfig {
        match arm {
            ArmId::Mr1 => &mut self.white,
            ArmId::Mr2 => &mut self.black,
        }
    }

    /// Parses the text format. Absent keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    message: format!("bad key {key:?}"),
                });
            }
            if let Some(prev) = seen.insert(key.to_string(), i + 1) {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    message: format!("{key} already set on line {prev}"),
                });
            }
            pairs.push((key.to_string(), value.to_string()));
        }
        let mut cfg = SimConfig::default();
        let mut errors: Vec<String> = pairs
            .iter()
            .filter_map(|(k, v)| cfg.set(k, v).err())
            .collect();
        errors.extend(cfg.validation_errors());
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError::Validation(errors))
        }
    }

    /// Applies one `key = value` setting. Derived quantities (default base
    /// headings and home yaw) follow base and board changes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        if let Some(rest) = key.strip_prefix("arms.") {
            self.set(&format!("white.{rest}"), value)?;
            return self.set(&format!("black.{rest}"), value);
        }
        let num = || parse_f64(key, value);
        match key {
            "mode" => self.mode = value.parse()?,
            "tick" => self.tick = num()?,
            "dwell" => self.dwell = num()?,
            "metrics_dt" => self.metrics_dt = num()?,
            "realtime" => self.realtime = parse_bool(key, value)?,
            "game" => self.game = Some(PathBuf::from(value)),
            "speed.min" => self.speed_bounds.min = num()?,
            "speed.max" => self.speed_bounds.max = num()?,
            _ => {
                if let Some(rest) = key.strip_prefix("board.") {
                    self.set_board(rest, num()?)?;
                } else if let Some(rest) = key.strip_prefix("white.") {
                    self.set_arm(ArmId::Mr1, rest, key, value)?;
                } else if let Some(rest) = key.strip_prefix("black.") {
                    self.set_arm(ArmId::Mr2, rest, key, value)?;
                } else {
                    return Err(format!("unknown key {key}"));
                }
            }
        }
        Ok(())
    }

    fn set_board(&mut self, field: &str, v: f64) -> Result<(), String> {
        let l = &self.layout;
        let (mut origin, mut size, mut grip) = (l.origin, l.square_size, l.grip_height);
        match field {
            "origin.x" => origin.x = v,
            "origin.y" => origin.y = v,
            "origin.z" => origin.z = v,
            "square_size" => size = v,
            "grip_height" => grip = v,
            _ => return Err(format!("unknown key board.{field}")),
        }
        self.layout = BoardLayout::new(origin, size, grip);
        self.refresh_derived();
        Ok(())
    }

    fn set_arm(&mut self, arm: ArmId, field: &str, key: &str, value: &str) -> Result<(), String> {
        let v = parse_f64(key, value)?;
        let cfg = self.arm_mut(arm);
        let g = &mut cfg.geometry;
        let limit = |r: &mut JointRange, bound: &str| match bound {
            "min" => {
                r.min = v;
                Ok(())
            }
            "max" => {
                r.max = v;
                Ok(())
            }
            _ => Err(format!("unknown key {key}")),
        };
        match field {
            "base.x" => g.base.x = v,
            "base.y" => g.base.y = v,
            "base.z" => g.base.z = v,
            "heading" => {
                g.heading = v;
                cfg.explicit_heading = true;
            }
            "mount_height" => g.mount_height = v,
            "l1" => g.link_lengths[0] = v,
            "l2" => g.link_lengths[1] = v,
            "omega" => g.joint_speed = [v; 3],
            "omega.yaw" => g.joint_speed[0] = v,
            "omega.shoulder" => g.joint_speed[1] = v,
            "omega.elbow" => g.joint_speed[2] = v,
            "speed" => cfg.speed = v,
            "home.yaw" => {
                cfg.home.yaw = v;
                cfg.explicit_home_yaw = true;
            }
            "home.shoulder" => cfg.home.shoulder = v,
            "home.elbow" => cfg.home.elbow = v,
            _ => {
                let Some(rest) = field.strip_prefix("limits.") else {
                    return Err(format!("unknown key {key}"));
                };
                let (joint, bound) = rest.split_once('.').ok_or(format!("unknown key {key}"))?;
                let idx = match joint {
                    "yaw" => 0,
                    "shoulder" => 1,
                    "elbow" => 2,
                    _ => return Err(format!("unknown key {key}")),
                };
                limit(&mut g.joint_limits[idx], bound)?;
            }
        }
        self.refresh_derived();
        Ok(())
    }

    fn refresh_derived(&mut self) {
        let center = self.layout.center();
        for arm in [ArmId::Mr1, ArmId::Mr2] {
            let layout = self.layout.clone();
            let cfg = self.arm_mut(arm);
            if !cfg.explicit_heading {
                let b = cfg.geometry.base;
                cfg.geometry.heading = (center.y - b.y).atan2(center.x - b.x);
            }
            if !cfg.explicit_home_yaw {
                cfg.home.yaw = default_home(&cfg.geometry, &layout).yaw;
            }
        }
    }

    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !(self.tick > 0.0 && self.tick.is_finite()) {
            errs.push(format!("tick must be > 0 (got {})", self.tick));
        }
        if !(self.metrics_dt > 0.0 && self.metrics_dt.is_finite()) {
            errs.push(format!("metrics_dt must be > 0 (got {})", self.metrics_dt));
        }
        if !(self.dwell >= 0.0 && self.dwell.is_finite()) {
            errs.push(format!("dwell must be >= 0 (got {})", self.dwell));
        }
        let b = self.speed_bounds;
        if !(b.min > 0.0 && b.min <= b.max && b.max.is_finite()) {
            errs.push(format!(
                "speed bounds must satisfy 0 < min <= max (got {} .. {})",
                b.min, b.max
            ));
        }
        for (name, arm) in [("white", &self.white), ("black", &self.black)] {
            if let Err(e) = SpeedFactor::within(arm.speed, b) {
                errs.push(format!("{name}.speed: {e}"));
            }
            errs.extend(
                arm.geometry
                    .validate()
                    .into_iter()
                    .map(|e| format!("{name}: {e}")),
            );
            if !arm.geometry.within_limits(&arm.home) {
                errs.push(format!("{name}: home pose outside joint limits"));
            }
            let home = crate::kinematics::forward_kinematics(&arm.geometry, &arm.home);
            if !home.is_finite() {
                errs.push(format!("{name}: home pose not finite"));
            }
        }
        errs.extend(self.layout.validate());
        errs
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let errs = self.validation_errors();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation(errs))
        }
    }

    pub fn speed(&self, arm: ArmId) -> SpeedFactor {
        SpeedFactor::within(self.arm(arm).speed, self.speed_bounds).unwrap_or_default()
    }

    pub fn base(&self, arm: ArmId) -> Point3 {
        self.arm(arm).geometry.base
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SimConfig::parse(&text)
}
