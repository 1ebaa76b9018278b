//! Flat key=value configuration files. Flags override file values; the only
//! recognized environment variable is an output-directory override.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::LayerpotError;
use crate::geometry::{Curve2D, Surface3D};
use num_complex::Complex64;

/// Parsed key=value file. Keys are case-sensitive; `#` starts a comment;
/// blank lines are ignored.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, LayerpotError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                LayerpotError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self, LayerpotError> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    /// Overlays `other` on top of `self`; `other` wins on conflicts.
    pub fn overlay(&self, other: &Config) -> Config {
        let mut values = self.values.clone();
        values.extend(other.values.clone());
        Config { values }
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, LayerpotError> {
        self.get(key)
            .map(|s| {
                s.parse()
                    .map_err(|_| LayerpotError::Config(format!("{key}: expected a number, got {s}")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, LayerpotError> {
        self.get(key)
            .map(|s| {
                s.parse().map_err(|_| {
                    LayerpotError::Config(format!("{key}: expected an integer, got {s}"))
                })
            })
            .transpose()
    }

    /// Builds the configured 2D curve. Recognized shapes:
    /// `shape=circle` with `radius`; `shape=ellipse` with `c` and `R`;
    /// `shape=fourier` with `modes=k:re:im,k:re:im,...`.
    pub fn curve(&self) -> Result<Curve2D, LayerpotError> {
        match self.get("shape") {
            Some("circle") => {
                let r = self.get_f64("radius")?.unwrap_or(1.0);
                Curve2D::circle(r)
            }
            Some("ellipse") => {
                let c = self.get_f64("c")?.unwrap_or(2.0);
                let r = self.get_f64("R")?.unwrap_or(0.5);
                Curve2D::ellipse(c, r)
            }
            Some("fourier") => {
                let spec = self.get("modes").ok_or_else(|| {
                    LayerpotError::Config("fourier shape needs modes=k:re:im,...".into())
                })?;
                let mut modes = Vec::new();
                for part in spec.split(',') {
                    let fields: Vec<&str> = part.trim().split(':').collect();
                    if fields.len() != 3 {
                        return Err(LayerpotError::Config(format!(
                            "bad fourier mode {part:?}, expected k:re:im"
                        )));
                    }
                    let k: i32 = fields[0].parse().map_err(|_| {
                        LayerpotError::Config(format!("bad mode index {:?}", fields[0]))
                    })?;
                    let re: f64 = fields[1].parse().map_err(|_| {
                        LayerpotError::Config(format!("bad coefficient {:?}", fields[1]))
                    })?;
                    let im: f64 = fields[2].parse().map_err(|_| {
                        LayerpotError::Config(format!("bad coefficient {:?}", fields[2]))
                    })?;
                    modes.push((k, Complex64::new(re, im)));
                }
                Curve2D::fourier(modes)
            }
            Some(other) => Err(LayerpotError::Config(format!("unknown 2D shape {other:?}"))),
            None => Err(LayerpotError::Config("missing shape key".into())),
        }
    }

    /// Builds the configured surface. Recognized shapes: `shape=sphere` with
    /// `radius`; `shape=ellipsoid` with `a`, `b`, `c3` (third semi-axis).
    pub fn surface(&self) -> Result<Surface3D, LayerpotError> {
        match self.get("shape") {
            Some("sphere") => Surface3D::sphere(self.get_f64("radius")?.unwrap_or(1.0)),
            Some("ellipsoid") => Surface3D::ellipsoid(
                self.get_f64("a")?.unwrap_or(1.0),
                self.get_f64("b")?.unwrap_or(1.0),
                self.get_f64("c3")?.unwrap_or(1.0),
            ),
            Some(other) => Err(LayerpotError::Config(format!("unknown 3D shape {other:?}"))),
            None => Err(LayerpotError::Config("missing shape key".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overlays() {
        let base = Config::parse("shape=ellipse\nc = 2.0\nR=0.5 # focal\n\n").unwrap();
        assert_eq!(base.get("shape"), Some("ellipse"));
        assert_eq!(base.get_f64("c").unwrap(), Some(2.0));
        let mut flags = Config::default();
        flags.set("R", "1.0".into());
        let merged = base.overlay(&flags);
        assert_eq!(merged.get_f64("R").unwrap(), Some(1.0));
        assert_eq!(merged.get("shape"), Some("ellipse"));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::parse("just a line").is_err());
        let c = Config::parse("n=abc").unwrap();
        assert!(c.get_usize("n").is_err());
    }

    #[test]
    fn builds_shapes() {
        let c = Config::parse("shape=circle\nradius=2.0").unwrap();
        assert!((c.curve().unwrap().diameter() - 4.0).abs() < 1e-9);
        let f = Config::parse("shape=fourier\nmodes=1:1:0,3:0:0.05").unwrap();
        assert!(f.curve().is_ok());
        let s = Config::parse("shape=ellipsoid\na=1\nb=1.1\nc3=1.2").unwrap();
        assert!(s.surface().is_ok());
        assert!(Config::parse("shape=torus").unwrap().curve().is_err());
    }
}
