//! Plain-text `key = value` settings shared by the command line and the
//! examples.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fuchsian::{FuchsianGroup, DEFAULT_MAX_BALL_SIZE};
use crate::metric::{GroupMetric, MetricConfig};
use crate::sl2::Tolerances;

/// Environment variable naming the config file when `--config` is absent.
pub const CONFIG_ENV: &str = "HOROLAB_CONFIG";

/// Every recognised key, in dump order.
pub const KEYS: [&str; 11] = [
    "group.preset",
    "group.file",
    "metric.ode_steps",
    "metric.shoot_restarts",
    "enum.max_ball_size",
    "tol.tol_eq",
    "tol.tol_det",
    "tol.classify",
    "tol.ode_tol",
    "tol.xcheck_tol",
    "seeds.default",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub group_preset: String,
    /// Group file in the generator text format; takes precedence over the preset.
    pub group_file: Option<PathBuf>,
    pub ode_steps: usize,
    pub shoot_restarts: usize,
    pub max_ball_size: usize,
    pub tol_eq: f64,
    pub tol_det: f64,
    pub tol_classify: f64,
    pub ode_tol: f64,
    pub xcheck_tol: f64,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        let m = MetricConfig::default();
        Config {
            group_preset: "bolza".into(),
            group_file: None,
            ode_steps: m.ode_steps,
            shoot_restarts: m.shoot_restarts,
            max_ball_size: DEFAULT_MAX_BALL_SIZE,
            tol_eq: m.tol.eq,
            tol_det: m.tol.det,
            tol_classify: m.tol.classify,
            ode_tol: m.ode_tol,
            xcheck_tol: m.xcheck_tol,
            seed: m.seed,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("`{key}`: bad value `{value}`")))
}

fn parse_tol(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse_num(key, value)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidArgument(format!("`{key}` must be a positive tolerance, got {value}")));
    }
    Ok(v)
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "group.preset" => self.group_preset = value.to_string(),
            "group.file" => self.group_file = (!value.is_empty()).then(|| PathBuf::from(value)),
            "metric.ode_steps" => self.ode_steps = parse_num(key, value)?,
            "metric.shoot_restarts" => self.shoot_restarts = parse_num(key, value)?,
            "enum.max_ball_size" => self.max_ball_size = parse_num(key, value)?,
            "tol.tol_eq" => self.tol_eq = parse_tol(key, value)?,
            "tol.tol_det" => self.tol_det = parse_tol(key, value)?,
            "tol.classify" => self.tol_classify = parse_tol(key, value)?,
            "tol.ode_tol" => self.ode_tol = parse_tol(key, value)?,
            "tol.xcheck_tol" => self.xcheck_tol = parse_tol(key, value)?,
            "seeds.default" => self.seed = parse_num(key, value)?,
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `explicit` if given, else the file named by `HOROLAB_CONFIG`, else
    /// the defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Config::default()),
            },
        }
    }

    /// Every key with its effective value; floats use the shortest form
    /// that parses back to the same bits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let file = self.group_file.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let _ = writeln!(out, "group.preset = {}", self.group_preset);
        let _ = writeln!(out, "group.file = {file}");
        let _ = writeln!(out, "metric.ode_steps = {}", self.ode_steps);
        let _ = writeln!(out, "metric.shoot_restarts = {}", self.shoot_restarts);
        let _ = writeln!(out, "enum.max_ball_size = {}", self.max_ball_size);
        let _ = writeln!(out, "tol.tol_eq = {:?}", self.tol_eq);
        let _ = writeln!(out, "tol.tol_det = {:?}", self.tol_det);
        let _ = writeln!(out, "tol.classify = {:?}", self.tol_classify);
        let _ = writeln!(out, "tol.ode_tol = {:?}", self.ode_tol);
        let _ = writeln!(out, "tol.xcheck_tol = {:?}", self.xcheck_tol);
        let _ = writeln!(out, "seeds.default = {}", self.seed);
        out
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            eq: self.tol_eq,
            det: self.tol_det,
            classify: self.tol_classify,
        }
    }

    pub fn metric_config(&self) -> MetricConfig {
        MetricConfig {
            ode_steps: self.ode_steps,
            shoot_restarts: self.shoot_restarts,
            ode_tol: self.ode_tol,
            xcheck_tol: self.xcheck_tol,
            seed: self.seed,
            tol: self.tolerances(),
            ..MetricConfig::default()
        }
    }

    pub fn metric(&self) -> Result<GroupMetric> {
        GroupMetric::new(self.metric_config())
    }

    pub fn group(&self) -> Result<FuchsianGroup> {
        let g = match &self.group_file {
            Some(p) => FuchsianGroup::from_text(&std::fs::read_to_string(p)?, self.tolerances())?,
            None => FuchsianGroup::preset(&self.group_preset)?.with_tolerances(self.tolerances()),
        };
        Ok(g.with_max_ball_size(self.max_ball_size))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_then_parse_is_exact() {
        let mut c = Config::default();
        c.set("tol.tol_eq", "3.3333333333333335e-10").unwrap();
        c.set("seeds.default", "7").unwrap();
        c.set("group.file", "groups/custom.txt").unwrap();
        assert_eq!(Config::parse(&c.dump()).unwrap(), c);
        assert_eq!(Config::parse(&Config::default().dump()).unwrap(), Config::default());
    }

    #[test]
    fn comments_and_errors() {
        let c = Config::parse("# header\nmetric.ode_steps = 128  # finer\n\n").unwrap();
        assert_eq!(c.ode_steps, 128);
        match Config::parse("metric.bogus = 1") {
            Err(Error::UnknownKey(k)) => assert_eq!(k, "metric.bogus"),
            other => panic!("{other:?}"),
        }
        assert!(Config::parse("tol.ode_tol = 0").is_err());
        assert!(Config::parse("tol.tol_det = -1e-9").is_err());
        assert!(Config::parse("seeds.default 3").is_err());
    }

    #[test]
    fn builds_group_and_metric() {
        let c = Config::parse("enum.max_ball_size = 5000").unwrap();
        assert_eq!(c.group().unwrap().max_ball_size(), 5000);
        assert_eq!(c.metric_config().ode_steps, 256);
    }
}
