//! TOML configuration files for fields, spinors, couplings and paths.
//!
//! Every loader reports its errors with the offending file path, and
//! expression problems keep the line/column position from the parser so a
//! typo in a config is pointed at directly. The formats:
//!
//! ```toml
//! # field.toml: scaling exponent and sample grid
//! alpha = "0.5*y1"
//! points = [1, 64, 1, 1]
//! [domain]
//! min = [0.0, 0.0, 0.0, 0.0]
//! max = [0.0, 1.0, 0.0, 0.0]
//! ```
//!
//! ```toml
//! # spinor.toml: four components, real and imaginary parts
//! [[component]]
//! re = "1.5*cos(-(1.25*y0 - 0.75*y3))"
//! im = "1.5*sin(-(1.25*y0 - 0.75*y3))"
//! # ... three more [[component]] blocks
//! ```
//!
//! ```toml
//! # gauge.toml: couplings, mass, pairing convention, photon field
//! a = 1.0                    # optional, default 1
//! b = 0.0854245432           # optional, default sqrt(fine structure)
//! m = 1.0
//! bar = "gamma5"             # optional, "gamma5" or "gamma0"
//! B = ["0", "0", "0", "0"]   # optional, default zero
//! ```
//!
//! ```toml
//! # theta.toml: gauge transformation angle
//! theta = "0.3*y1 - 0.2*y3"
//! ```
//!
//! ```toml
//! # path.toml, closed form            # path.toml, piecewise linear
//! kind = "analytic"                   # kind = "polyline"
//! p = ["2*s", "s", "0", "0"]          # points = [[0,0,0,0], [2,1,0,0]]
//!                                     # s = [0.0, 1.0]   (optional)
//! ```

use crate::dirac::{AnalyticSpinor, BField, BarConvention, GaugeConfig, GaugeError};
use crate::expr::{parse_expr, Expr, ParseError};
use crate::field::{FieldError, FieldSpec, Grid, Point, COORD_VARS};
use crate::geometry::{AnalyticPath, GeometryError, Path as GeoPath, Polyline};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Toml {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error("{}: in `{field}`: {source}", path.display())]
    Expr {
        path: PathBuf,
        field: String,
        source: ParseError,
    },
    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })
}

fn decode<D: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<D, ConfigError> {
    toml::from_str(text).map_err(|source| ConfigError::Toml {
        path: path.to_owned(),
        source: Box::new(source),
    })
}

fn coord_expr(src: &str, field: &str, path: &Path) -> Result<Expr<f64>, ConfigError> {
    parse_expr(src, &COORD_VARS).map_err(|source| ConfigError::Expr {
        path: path.to_owned(),
        field: field.to_owned(),
        source,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    alpha: String,
    points: [usize; 4],
    domain: DomainFile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    min: [f64; 4],
    max: [f64; 4],
}

/// Loads a scaling field together with its sample grid.
pub fn load_field(path: &Path) -> Result<(FieldSpec<f64>, Grid<f64>), ConfigError> {
    field_from_toml(&read(path)?, path)
}

pub fn field_from_toml(
    text: &str,
    origin: &Path,
) -> Result<(FieldSpec<f64>, Grid<f64>), ConfigError> {
    let file: FieldFile = decode(text, origin)?;
    let spec = FieldSpec::parse(&file.alpha).map_err(|source| ConfigError::Expr {
        path: origin.to_owned(),
        field: "alpha".into(),
        source,
    })?;
    let grid = Grid::new(file.domain.min, file.domain.max, file.points)?;
    Ok((spec, grid))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpinorFile {
    component: Vec<ComponentFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFile {
    re: String,
    im: String,
}

/// Loads a four-component closed-form spinor.
pub fn load_spinor(path: &Path) -> Result<AnalyticSpinor<f64>, ConfigError> {
    spinor_from_toml(&read(path)?, path)
}

pub fn spinor_from_toml(text: &str, origin: &Path) -> Result<AnalyticSpinor<f64>, ConfigError> {
    let file: SpinorFile = decode(text, origin)?;
    if file.component.len() != 4 {
        return Err(ConfigError::Invalid {
            path: origin.to_owned(),
            message: format!(
                "a spinor has exactly 4 components, found {}",
                file.component.len()
            ),
        });
    }
    let mut sources = Vec::with_capacity(4);
    for (k, comp) in file.component.iter().enumerate() {
        // Parse here so the error names the component.
        coord_expr(&comp.re, &format!("component[{k}].re"), origin)?;
        coord_expr(&comp.im, &format!("component[{k}].im"), origin)?;
        sources.push((comp.re.clone(), comp.im.clone()));
    }
    let sources: [(String, String); 4] = sources.try_into().expect("length checked");
    AnalyticSpinor::parse(&sources).map_err(|source| ConfigError::Expr {
        path: origin.to_owned(),
        field: "component".into(),
        source,
    })
}

fn default_a() -> f64 {
    1.0
}

fn default_b() -> f64 {
    crate::dirac::SQRT_FINE_STRUCTURE
}

fn default_bar() -> String {
    "gamma5".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeFile {
    #[serde(default = "default_a")]
    a: f64,
    #[serde(default = "default_b")]
    b: f64,
    m: f64,
    #[serde(default = "default_bar")]
    bar: String,
    #[serde(rename = "B")]
    b_field: Option<[String; 4]>,
}

/// Loads couplings, mass, pairing convention and the photon field.
pub fn load_gauge(path: &Path) -> Result<GaugeConfig<f64>, ConfigError> {
    gauge_from_toml(&read(path)?, path)
}

pub fn gauge_from_toml(text: &str, origin: &Path) -> Result<GaugeConfig<f64>, ConfigError> {
    let file: GaugeFile = decode(text, origin)?;
    let bar = match file.bar.as_str() {
        "gamma5" => BarConvention::Gamma5Conjugate,
        "gamma0" => BarConvention::DaggerGamma0,
        other => {
            return Err(ConfigError::Invalid {
                path: origin.to_owned(),
                message: format!("unknown bar convention `{other}` (use gamma5 or gamma0)"),
            })
        }
    };
    let b_field = match &file.b_field {
        None => BField::zero(),
        Some(sources) => {
            for (mu, src) in sources.iter().enumerate() {
                coord_expr(src, &format!("B[{mu}]"), origin)?;
            }
            BField::parse(sources).map_err(|source| ConfigError::Expr {
                path: origin.to_owned(),
                field: "B".into(),
                source,
            })?
        }
    };
    Ok(GaugeConfig::new(file.a, file.b, file.m, bar, b_field)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaFile {
    theta: String,
}

/// Loads a gauge transformation angle.
pub fn load_theta(path: &Path) -> Result<Expr<f64>, ConfigError> {
    theta_from_toml(&read(path)?, path)
}

pub fn theta_from_toml(text: &str, origin: &Path) -> Result<Expr<f64>, ConfigError> {
    let file: ThetaFile = decode(text, origin)?;
    coord_expr(&file.theta, "theta", origin)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathFile {
    kind: String,
    p: Option<[String; 4]>,
    s: Option<Vec<f64>>,
    points: Option<Vec<[f64; 4]>>,
}

/// Loads a path, either closed form over `s in [0, 1]` or piecewise
/// linear through listed knots.
pub fn load_path(path: &Path) -> Result<GeoPath<f64>, ConfigError> {
    path_from_toml(&read(path)?, path)
}

pub fn path_from_toml(text: &str, origin: &Path) -> Result<GeoPath<f64>, ConfigError> {
    let file: PathFile = decode(text, origin)?;
    let invalid = |message: String| ConfigError::Invalid {
        path: origin.to_owned(),
        message,
    };
    match file.kind.as_str() {
        "analytic" => {
            if file.s.is_some() || file.points.is_some() {
                return Err(invalid("an analytic path takes only `p`".into()));
            }
            let sources = file
                .p
                .ok_or_else(|| invalid("an analytic path needs `p`, four expressions in s".into()))?;
            for (mu, src) in sources.iter().enumerate() {
                parse_expr::<f64>(src, &crate::geometry::PATH_VAR).map_err(|source| {
                    ConfigError::Expr {
                        path: origin.to_owned(),
                        field: format!("p[{mu}]"),
                        source,
                    }
                })?;
            }
            let parsed = AnalyticPath::parse(&sources).map_err(|source| ConfigError::Expr {
                path: origin.to_owned(),
                field: "p".into(),
                source,
            })?;
            Ok(GeoPath::Analytic(parsed))
        }
        "polyline" => {
            if file.p.is_some() {
                return Err(invalid("a polyline takes `points` (and optional `s`), not `p`".into()));
            }
            let raw = file
                .points
                .ok_or_else(|| invalid("a polyline needs `points`, a list of knots".into()))?;
            let pts = raw
                .into_iter()
                .map(Point::new)
                .collect::<Result<Vec<_>, _>>()?;
            let poly = match file.s {
                Some(s) => Polyline::new(s, pts)?,
                None => Polyline::uniform(pts)?,
            };
            Ok(GeoPath::Polyline(poly))
        }
        other => Err(invalid(format!(
            "unknown path kind `{other}` (use analytic or polyline)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Axis;

    fn origin() -> PathBuf {
        PathBuf::from("test.toml")
    }

    #[test]
    fn field_files_produce_field_and_grid() {
        let text = r#"
            alpha = "0.5*y1"
            points = [1, 64, 1, 1]
            [domain]
            min = [0.0, 0.0, 0.0, 0.0]
            max = [0.0, 1.0, 0.0, 0.0]
        "#;
        let (spec, grid) = field_from_toml(text, &origin()).unwrap();
        assert_eq!(spec.source(), "0.5*y1");
        assert_eq!(grid.points(), [1, 64, 1, 1]);
        assert!(grid.is_integrated(Axis::Y1));
        assert!(!grid.is_integrated(Axis::Y0));
    }

    #[test]
    fn expression_errors_carry_file_field_and_position() {
        let text = r#"
            alpha = "0.5 ** y1"
            points = [1, 8, 1, 1]
            [domain]
            min = [0.0, 0.0, 0.0, 0.0]
            max = [0.0, 1.0, 0.0, 0.0]
        "#;
        let err = field_from_toml(text, &origin()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("test.toml"), "{msg}");
        assert!(msg.contains("alpha"), "{msg}");
        assert!(msg.contains("line 1, column 6"), "{msg}");
    }

    #[test]
    fn toml_syntax_errors_keep_their_position() {
        let err = field_from_toml("alpha = \"x", &origin()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("test.toml"), "{msg}");
        assert!(msg.to_lowercase().contains("line 1"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"
            alpha = "y1"
            points = [1, 8, 1, 1]
            alphaa = "oops"
            [domain]
            min = [0.0, 0.0, 0.0, 0.0]
            max = [0.0, 1.0, 0.0, 0.0]
        "#;
        assert!(matches!(
            field_from_toml(text, &origin()).unwrap_err(),
            ConfigError::Toml { .. }
        ));
    }

    #[test]
    fn spinors_need_exactly_four_components() {
        let one = r#"
            [[component]]
            re = "1"
            im = "0"
        "#;
        let err = spinor_from_toml(one, &origin()).unwrap_err();
        assert!(err.to_string().contains("exactly 4"), "{err}");

        let mut four = String::new();
        for _ in 0..4 {
            four.push_str("[[component]]\nre = \"y0\"\nim = \"0\"\n");
        }
        let psi = spinor_from_toml(&four, &origin()).unwrap();
        let y = Point::new([2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(psi.component(0).value(&y.coords()).re, 2.0);
    }

    #[test]
    fn spinor_errors_name_the_component() {
        let text = r#"
            [[component]]
            re = "1"
            im = "0"
            [[component]]
            re = "1"
            im = "0"
            [[component]]
            re = "qq"
            im = "0"
            [[component]]
            re = "1"
            im = "0"
        "#;
        let err = spinor_from_toml(text, &origin()).unwrap_err();
        assert!(err.to_string().contains("component[2].re"), "{err}");
    }

    #[test]
    fn gauge_defaults_fill_in() {
        let cfg = gauge_from_toml("m = 1.0", &origin()).unwrap();
        assert_eq!(cfg.a, 1.0);
        assert_eq!(cfg.b, crate::dirac::SQRT_FINE_STRUCTURE);
        assert!(matches!(cfg.bar, BarConvention::Gamma5Conjugate));
        let y = Point::origin();
        assert_eq!(cfg.b_field.value(&y), [0.0; 4]);

        let full = r#"
            a = 2.0
            b = 0.5
            m = 0.25
            bar = "gamma0"
            B = ["y1", "0", "0", "y0"]
        "#;
        let cfg = gauge_from_toml(full, &origin()).unwrap();
        assert!(matches!(cfg.bar, BarConvention::DaggerGamma0));
        let y = Point::new([3.0, 7.0, 0.0, 0.0]).unwrap();
        assert_eq!(cfg.b_field.value(&y), [7.0, 0.0, 0.0, 3.0]);
    }

    #[test]
    fn bad_bar_and_negative_mass_are_rejected() {
        let err = gauge_from_toml("m = 1.0\nbar = \"dagger\"", &origin()).unwrap_err();
        assert!(err.to_string().contains("bar convention"), "{err}");
        assert!(matches!(
            gauge_from_toml("m = -1.0", &origin()).unwrap_err(),
            ConfigError::Gauge(_)
        ));
    }

    #[test]
    fn theta_files_are_one_expression() {
        let theta = theta_from_toml("theta = \"0.3*y1\"", &origin()).unwrap();
        assert_eq!(theta.eval(&[0.0, 2.0, 0.0, 0.0]), 0.6);
    }

    #[test]
    fn analytic_paths_load_and_reject_mixed_keys() {
        let text = r#"
            kind = "analytic"
            p = ["2*s", "s", "0", "0"]
        "#;
        let path = path_from_toml(text, &origin()).unwrap();
        assert_eq!(path.end(), [2.0, 1.0, 0.0, 0.0]);

        let mixed = r#"
            kind = "analytic"
            p = ["s", "s", "0", "0"]
            points = [[0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0]]
        "#;
        assert!(matches!(
            path_from_toml(mixed, &origin()).unwrap_err(),
            ConfigError::Invalid { .. }
        ));
    }

    #[test]
    fn polylines_accept_optional_parameters() {
        let text = r#"
            kind = "polyline"
            points = [[0.0, 0.0, 0.0, 0.0], [1.0, 0.5, 0.0, 0.0], [2.0, 1.0, 0.0, 0.0]]
        "#;
        let path = path_from_toml(text, &origin()).unwrap();
        assert_eq!(path.start(), [0.0; 4]);
        assert_eq!(path.end(), [2.0, 1.0, 0.0, 0.0]);

        let with_s = r#"
            kind = "polyline"
            s = [0.0, 0.25, 1.0]
            points = [[0.0, 0.0, 0.0, 0.0], [1.0, 0.5, 0.0, 0.0], [2.0, 1.0, 0.0, 0.0]]
        "#;
        assert!(path_from_toml(with_s, &origin()).is_ok());

        let bad = r#"
            kind = "polyline"
            s = [0.0, 0.0, 1.0]
            points = [[0.0, 0.0, 0.0, 0.0], [1.0, 0.5, 0.0, 0.0], [2.0, 1.0, 0.0, 0.0]]
        "#;
        assert!(matches!(
            path_from_toml(bad, &origin()).unwrap_err(),
            ConfigError::Geometry(GeometryError::NonMonotonicKnots)
        ));
    }

    #[test]
    fn unknown_path_kinds_are_named_in_the_error() {
        let err = path_from_toml("kind = \"spline\"", &origin()).unwrap_err();
        assert!(err.to_string().contains("spline"), "{err}");
    }
}
