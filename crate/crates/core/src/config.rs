//! Study configuration files.
//!
//! Configurations are TOML documents:
//!
//! ```toml
//! name = "square_k02"
//! degree = 1
//! levels = 6
//! kappa = 0.2            # or "auto:0.9" for kappa = 2^(-degree/0.9)
//! domain = [[0, 0], [1, 0], [1, 1], [0, 1]]
//!
//! [mesh]
//! kind = "grid"          # "grid", "union-jack" or "file"
//! xs = [0, 0.25, 0.5, 0.75, 1]
//! ys = [0, 0.25, 0.5, 0.75, 1]
//! split = "cross"        # or "diagonal"
//!
//! [[fracture]]
//! from = [0.25, 0.5]
//! to = [0.75, 0.5]
//!
//! [[singular]]           # optional graded domain corner
//! point = [1, 1]
//! kappa = 0.3
//! ```
//!
//! Fracture endpoints take the top-level `kappa` unless the fracture sets its
//! own. Mesh file paths are relative to the configuration file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment2};
use crate::mesh::{interior_angle, CellSplit, MeshTemplate, ProblemSpec, SingularKind, SingularPoint, MATCH_TOL};
use crate::refine::{kappa_from_theory, KappaRule};
use crate::study::StudyOptions;

/// A fixed grading parameter or `auto:a`, resolved as `2^(-m/a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaSetting {
    Value(f64),
    Auto { a: f64 },
}

impl KappaSetting {
    pub fn resolve(self, degree: usize) -> Result<f64> {
        match self {
            KappaSetting::Value(k) => Ok(k),
            KappaSetting::Auto { a } => kappa_from_theory(degree, KappaRule::FractureEndpoint { a }),
        }
    }
}

impl FromStr for KappaSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::ConfigParse(format!("invalid kappa `{s}`")))
        };
        match s.strip_prefix("auto:") {
            Some(a) => Ok(KappaSetting::Auto { a: num(a)? }),
            None => Ok(KappaSetting::Value(num(s)?)),
        }
    }
}

impl fmt::Display for KappaSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaSetting::Value(k) => write!(f, "{k}"),
            KappaSetting::Auto { a } => write!(f, "auto:{a}"),
        }
    }
}

impl<'de> Deserialize<'de> for KappaSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(KappaSetting::Value(k)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeshConfig {
    Grid {
        xs: Vec<f64>,
        ys: Vec<f64>,
        #[serde(default)]
        split: SplitConfig,
    },
    UnionJack {
        cells: usize,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitConfig {
    #[default]
    Diagonal,
    Cross,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractureConfig {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub kappa: Option<KappaSetting>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularConfig {
    pub point: [f64; 2],
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub name: Option<String>,
    pub domain: Vec<[f64; 2]>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    pub levels: usize,
    pub kappa: Option<KappaSetting>,
    pub rel_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: Option<PathBuf>,
    pub mesh: MeshConfig,
    #[serde(default, rename = "fracture")]
    pub fractures: Vec<FractureConfig>,
    #[serde(default, rename = "singular")]
    pub singular: Vec<SingularConfig>,
    /// Directory used to resolve relative mesh paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_degree() -> usize {
    1
}

fn point(p: [f64; 2]) -> Point2 {
    Point2::new(p[0], p[1])
}

/// A configuration resolved into solver inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedStudy {
    pub spec: ProblemSpec,
    pub template: MeshTemplate,
    pub options: StudyOptions,
}

impl StudyConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::ConfigParse(msg) => Error::ConfigParse(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self) -> Result<ResolvedStudy> {
        let degree = self.degree;
        if !(1..=2).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let domain: Vec<Point2> = self.domain.iter().copied().map(point).collect();

        let mut singular_points: Vec<SingularPoint> = Vec::new();
        let mut fractures = Vec::with_capacity(self.fractures.len());
        for (k, f) in self.fractures.iter().enumerate() {
            let setting = f.kappa.or(self.kappa).ok_or_else(|| {
                Error::ConfigParse(format!("fracture {k} has no kappa and no top-level kappa is set"))
            })?;
            let kappa = setting.resolve(degree)?;
            let seg = Segment2::new(point(f.from), point(f.to));
            for end in [seg.a, seg.b] {
                if singular_points.iter().all(|sp| sp.point.dist(end) > MATCH_TOL) {
                    singular_points.push(SingularPoint {
                        point: end,
                        kappa,
                        kind: SingularKind::FractureEndpoint,
                    });
                }
            }
            fractures.push(seg);
        }

        for s in &self.singular {
            let p = point(s.point);
            let corner = domain
                .iter()
                .position(|v| v.dist(p) <= MATCH_TOL)
                .ok_or_else(|| {
                    Error::ConfigParse(format!(
                        "singular point ({}, {}) is not a domain vertex",
                        p.x, p.y
                    ))
                })?;
            let omega = interior_angle(&domain, corner);
            let kappa = kappa_from_theory(degree, KappaRule::DomainVertex { kappa: s.kappa, omega })?;
            singular_points.push(SingularPoint {
                point: p,
                kappa,
                kind: SingularKind::DomainVertex,
            });
        }

        let template = match &self.mesh {
            MeshConfig::Grid { xs, ys, split } => MeshTemplate::Grid {
                xs: xs.clone(),
                ys: ys.clone(),
                split: match split {
                    SplitConfig::Diagonal => CellSplit::Diagonal,
                    SplitConfig::Cross => CellSplit::Cross,
                },
            },
            MeshConfig::UnionJack { cells } => MeshTemplate::UnionJack { cells: *cells },
            MeshConfig::File { path } => MeshTemplate::File(self.base_dir.join(path)),
        };

        let spec = ProblemSpec {
            domain,
            fractures,
            singular_points,
            degree,
            refinements: self.levels,
        };
        spec.check()?;
        let mut options = StudyOptions::default();
        if let Some(t) = self.rel_tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::ConfigParse(format!("rel_tol {t} must lie in (0, 1)")));
            }
            options.rel_tol = t;
        }
        options.max_iter = self.max_iter;
        Ok(ResolvedStudy {
            spec,
            template,
            options,
        })
    }

    /// Output directory: the configured one, or `out/<name>`.
    pub fn output_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            PathBuf::from("out").join(self.name.clone().unwrap_or_else(|| "study".into()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "t"
levels = 3
kappa = 0.2
domain = [[0, 0], [1, 0], [1, 1], [0, 1]]

[mesh]
kind = "grid"
xs = [0, 0.25, 0.5, 0.75, 1]
ys = [0, 0.25, 0.5, 0.75, 1]
split = "cross"

[[fracture]]
from = [0.25, 0.5]
to = [0.75, 0.5]
"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = StudyConfig::parse(BASE).unwrap();
        assert_eq!(cfg.degree, 1);
        let r = cfg.resolve().unwrap();
        assert_eq!(r.spec.singular_points.len(), 2);
        assert!(r.spec.singular_points.iter().all(|s| s.kappa == 0.2));
        assert_eq!(r.spec.refinements, 3);
        assert!(matches!(r.template, MeshTemplate::Grid { split: CellSplit::Cross, .. }));
    }

    #[test]
    fn auto_kappa() {
        let text = BASE.replace("kappa = 0.2", "kappa = \"auto:0.8\"\ndegree = 2");
        let r = StudyConfig::parse(&text).unwrap().resolve().unwrap();
        assert!((r.spec.singular_points[0].kappa - 2f64.powf(-2.5)).abs() < 1e-15);
        let text = BASE.replace("kappa = 0.2", "kappa = \"auto:1.5\"");
        let err = StudyConfig::parse(&text).unwrap().resolve().unwrap_err();
        assert!(matches!(err, Error::KappaOutOfRange { .. }));
    }

    #[test]
    fn kappa_out_of_range() {
        let text = BASE.replace("kappa = 0.2", "kappa = 0.7");
        let err = StudyConfig::parse(&text).unwrap().resolve().unwrap_err();
        assert!(err.to_string().starts_with("KappaOutOfRange"), "{err}");
    }

    #[test]
    fn parse_errors() {
        let err = StudyConfig::parse("levels = \"x\"").unwrap_err();
        assert!(err.to_string().starts_with("ConfigParse"), "{err}");
        let err = StudyConfig::parse(&BASE.replace("kind = \"grid\"", "kind = \"hex\"")).unwrap_err();
        assert!(matches!(err, Error::ConfigParse(_)));
        let err = StudyConfig::parse(&format!("{BASE}\nbogus = 1\n")).unwrap_err();
        assert!(matches!(err, Error::ConfigParse(_)));
    }

    #[test]
    fn corner_grading() {
        let text = format!("{BASE}\n[[singular]]\npoint = [1, 1]\nkappa = 0.3\n");
        let r = StudyConfig::parse(&text).unwrap().resolve().unwrap();
        let corner = r.spec.singular_points.last().unwrap();
        assert_eq!(corner.kind, SingularKind::DomainVertex);
        let text = format!("{BASE}\n[[singular]]\npoint = [0.5, 1]\nkappa = 0.3\n");
        assert!(StudyConfig::parse(&text).unwrap().resolve().is_err());
    }

    #[test]
    fn kappa_setting_from_str() {
        assert_eq!("0.25".parse::<KappaSetting>().unwrap(), KappaSetting::Value(0.25));
        assert_eq!("auto:0.5".parse::<KappaSetting>().unwrap(), KappaSetting::Auto { a: 0.5 });
        assert!("auto:".parse::<KappaSetting>().is_err());
        assert!("fast".parse::<KappaSetting>().is_err());
    }
}
