//! Flat `key = value` configuration files.
//!
//! Lines are `key = value` pairs; `#` starts a comment and blank lines are
//! ignored. Model constants use the keys `T`, `L`, `V`, `A_min`, `A_max`,
//! `B_min` and `B_max` (`Amin`, `Amax`, `Bmin`, `Bmax` are accepted too).
//! All other keys describe the simulated scenario:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `density` | initial traffic density (cars/km) | 5 |
//! | `pattern` | number of present cars, 2 to 5 | 2 |
//! | `steps` | episode horizon in control cycles | 60 |
//! | `eps_v` | velocity slack of the JSC model monitor (m/s) | 0.5 |
//! | `idm_v0`, `idm_s0`, `idm_th`, `idm_a`, `idm_b`, `idm_delta` | IDM parameters | 30, 10, 1.5, 3, 5, 4 |
//! | `brake_prob` | per-cycle brake probability of `random-brake` cars | 0.15 |
//! | `brake_accel` | deceleration of the brake action, in `[B_max, B_min]` | `B_min` |
//! | `feature_order` | `pxyvw` or `pxvyw` | `pxyvw` |
//! | `seed` | master seed | 0 |
//! | `script` | `duration:accel` segments separated by `;` | `1:0` |
//!
//! Unknown keys and repeated keys are errors.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Constants;
use crate::nn::FeatureOrder;
use crate::policy::{EnvPolicy, IdmParams};
use crate::shield::DEFAULT_EPS_V;

/// Constants plus scenario parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub constants: Constants,
    pub density: f64,
    pub pattern: usize,
    pub steps: usize,
    pub eps_v: f64,
    pub idm: IdmParams,
    pub brake_prob: f64,
    /// Acceleration commanded by the brake action; `None` means `B_min`.
    pub brake_accel: Option<f64>,
    pub feature_order: FeatureOrder,
    pub seed: u64,
    pub script: Vec<(f64, f64)>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            constants: Constants::default(),
            density: 5.0,
            pattern: 2,
            steps: 60,
            eps_v: DEFAULT_EPS_V,
            idm: IdmParams::default(),
            brake_prob: 0.15,
            brake_accel: None,
            feature_order: FeatureOrder::default(),
            seed: 0,
            script: vec![(1.0, 0.0)],
        }
    }
}

impl Config {
    pub fn brake(&self) -> f64 {
        self.brake_accel.unwrap_or(self.constants.b_min)
    }

    /// Checks every field against its admissible range.
    pub fn validate(&self) -> Result<()> {
        let c = &self.constants;
        c.validate()?;
        self.idm.validate()?;
        let arg = |ok: bool, msg: String| if ok { Ok(()) } else { Err(Error::Argument(msg)) };
        arg(self.density > 0.0, format!("density must be positive, got {}", self.density))?;
        arg(
            (2..=crate::nn::MAX_CARS).contains(&self.pattern),
            format!("pattern must be 2 to 5 cars, got {}", self.pattern),
        )?;
        arg(self.eps_v >= 0.0, format!("eps_v must be non-negative, got {}", self.eps_v))?;
        arg(
            (0.0..=1.0).contains(&self.brake_prob),
            format!("brake_prob must lie in [0, 1], got {}", self.brake_prob),
        )?;
        let b = self.brake();
        arg(
            c.b_max <= b && b <= c.b_min,
            format!("brake_accel {b} outside [B_max, B_min] = [{}, {}]", c.b_max, c.b_min),
        )?;
        EnvPolicy::Scripted(self.script.clone()).validate(c)
    }

    /// Environment policy by name: `idm`, `brake`, `scripted`,
    /// `random-brake` or `const:A`, parameterized by this configuration.
    pub fn env_policy(&self, name: &str) -> Result<EnvPolicy> {
        let policy = match name {
            "idm" => EnvPolicy::Idm(self.idm),
            "brake" => EnvPolicy::EmergencyBrake,
            "scripted" => EnvPolicy::Scripted(self.script.clone()),
            "random-brake" => EnvPolicy::RandomBrake {
                probability: self.brake_prob,
                idm: self.idm,
            },
            _ => match name.strip_prefix("const:").map(str::parse::<f64>) {
                Some(Ok(a)) => EnvPolicy::ConstantAccel(a),
                _ => {
                    return Err(Error::Argument(format!(
                        "unknown environment `{name}`, expected idm, brake, scripted, random-brake or const:A"
                    )))
                }
            },
        };
        policy.validate(&self.constants)?;
        Ok(policy)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_with_path(text, Path::new("<config>"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        parse_with_path(&text, path)
    }
}

fn parse_with_path(text: &str, path: &Path) -> Result<Config> {
    let mut cfg = Config::default();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| Error::Config {
            path: PathBuf::from(path),
            line,
            msg,
        };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let canonical = canonical_key(key).ok_or_else(|| err(format!("unknown key `{key}`")))?;
        if !seen.insert(canonical) {
            return Err(err(format!("key `{key}` given twice")));
        }
        let num = || {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("`{key}` needs a finite number, got `{value}`")))
        };
        let int = || {
            value
                .parse::<u64>()
                .map_err(|_| err(format!("`{key}` needs a non-negative integer, got `{value}`")))
        };
        let c = &mut cfg.constants;
        match canonical {
            "T" => c.t = num()?,
            "L" => c.l = num()?,
            "V" => c.v = num()?,
            "A_min" => c.a_min = num()?,
            "A_max" => c.a_max = num()?,
            "B_min" => c.b_min = num()?,
            "B_max" => c.b_max = num()?,
            "density" => cfg.density = num()?,
            "pattern" => cfg.pattern = int()? as usize,
            "steps" => cfg.steps = int()? as usize,
            "eps_v" => cfg.eps_v = num()?,
            "idm_v0" => cfg.idm.v0 = num()?,
            "idm_s0" => cfg.idm.s0 = num()?,
            "idm_th" => cfg.idm.time_headway = num()?,
            "idm_a" => cfg.idm.a = num()?,
            "idm_b" => cfg.idm.b = num()?,
            "idm_delta" => cfg.idm.delta = num()?,
            "brake_prob" => cfg.brake_prob = num()?,
            "brake_accel" => cfg.brake_accel = Some(num()?),
            "feature_order" => cfg.feature_order = value.parse().map_err(|e: Error| err(e.to_string()))?,
            "seed" => cfg.seed = int()?,
            "script" => cfg.script = parse_script(value).map_err(|e| err(e.to_string()))?,
            _ => unreachable!("canonical keys are exhaustive"),
        }
    }
    cfg.validate().map_err(|e| Error::Config {
        path: PathBuf::from(path),
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(cfg)
}

fn canonical_key(key: &str) -> Option<&'static str> {
    Some(match key {
        "T" => "T",
        "L" => "L",
        "V" => "V",
        "A_min" | "Amin" => "A_min",
        "A_max" | "Amax" => "A_max",
        "B_min" | "Bmin" => "B_min",
        "B_max" | "Bmax" => "B_max",
        "density" => "density",
        "pattern" => "pattern",
        "steps" => "steps",
        "eps_v" => "eps_v",
        "idm_v0" => "idm_v0",
        "idm_s0" => "idm_s0",
        "idm_th" => "idm_th",
        "idm_a" => "idm_a",
        "idm_b" => "idm_b",
        "idm_delta" => "idm_delta",
        "brake_prob" => "brake_prob",
        "brake_accel" => "brake_accel",
        "feature_order" => "feature_order",
        "seed" => "seed",
        "script" => "script",
        _ => return None,
    })
}

/// Parses `d1:a1; d2:a2; …` into `(duration, acceleration)` segments.
pub fn parse_script(text: &str) -> Result<Vec<(f64, f64)>> {
    let segments: Result<Vec<_>> = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|seg| {
            let (d, a) = seg
                .split_once(':')
                .ok_or_else(|| Error::Argument(format!("script segment `{seg}` is not `duration:accel`")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Argument(format!("bad number `{s}` in script segment `{seg}`")))
            };
            Ok((parse(d)?, parse(a)?))
        })
        .collect();
    let segments = segments?;
    if segments.is_empty() {
        return Err(Error::Argument("empty script".into()));
    }
    Ok(segments)
}
