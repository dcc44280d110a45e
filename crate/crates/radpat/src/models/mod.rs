//! Function bases over directions, and patterns expressed in them.
//!
//! A radiation pattern is represented as a coefficient vector over one of
//! three bases:
//!
//! * `sh:N` — real orthonormal spherical harmonics of order N (N^2 terms),
//! * `grid:IxJ[:SIGMA]` — Laplacian kernels on an I-row x J-column lattice
//!   (I*J terms, sigma defaults to 0.03 rad),
//! * `poly:N` — raw-angle monomials of total degree <= N.
//!
//! The selector strings above are the one grammar used everywhere: CLI
//! flags, model files, and reports all round-trip through
//! [`BasisSpec::from_str`] / [`Display`](std::fmt::Display).

pub mod grid;
pub mod legendre;
pub mod poly;
pub mod sphharm;

pub use legendre::assoc_legendre;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Direction;

/// Default kernel width (radians) for the grid basis.
pub const DEFAULT_GRID_SIGMA: f64 = 0.03;

/// Identifies a function basis over directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BasisSpec {
    SphericalHarmonics {
        order: usize,
    },
    GridKernel {
        n_inclination: usize,
        n_azimuth: usize,
        sigma: f64,
    },
    Polynomial {
        order: usize,
    },
}

impl BasisSpec {
    /// Number of basis functions (= coefficients of one pattern).
    pub fn dimension(&self) -> usize {
        match *self {
            BasisSpec::SphericalHarmonics { order } => sphharm::dimension(order),
            BasisSpec::GridKernel {
                n_inclination,
                n_azimuth,
                ..
            } => n_inclination * n_azimuth,
            BasisSpec::Polynomial { order } => poly::dimension(order),
        }
    }

    /// Checks the structural constraints of the spec.
    pub fn validate(&self) -> Result<()> {
        match *self {
            BasisSpec::SphericalHarmonics { order } => {
                if order < 1 {
                    return Err(Error::config(
                        "spherical-harmonic order must be at least 1",
                    ));
                }
            }
            BasisSpec::GridKernel {
                n_inclination,
                n_azimuth,
                sigma,
            } => {
                if n_inclination < 1 || n_azimuth < 1 {
                    return Err(Error::config(
                        "grid basis needs at least 1 inclination row and 1 azimuth column",
                    ));
                }
                if !sigma.is_finite() || sigma <= 0.0 {
                    return Err(Error::config(format!(
                        "grid kernel width must be positive and finite, got {sigma}"
                    )));
                }
            }
            BasisSpec::Polynomial { .. } => {}
        }
        Ok(())
    }

    /// Prepares an evaluator; for the grid basis this precomputes the node
    /// lattice so repeated evaluation does not re-derive it.
    pub fn evaluator(&self) -> Result<BasisEvaluator> {
        self.validate()?;
        let nodes = match *self {
            BasisSpec::GridKernel {
                n_inclination,
                n_azimuth,
                ..
            } => Some(grid::nodes(n_inclination, n_azimuth)),
            _ => None,
        };
        Ok(BasisEvaluator {
            spec: self.clone(),
            nodes,
        })
    }
}

impl fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisSpec::SphericalHarmonics { order } => write!(f, "sh:{order}"),
            BasisSpec::GridKernel {
                n_inclination,
                n_azimuth,
                sigma,
            } => write!(f, "grid:{n_inclination}x{n_azimuth}:{sigma}"),
            BasisSpec::Polynomial { order } => write!(f, "poly:{order}"),
        }
    }
}

impl FromStr for BasisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::config(format!(
                "unknown basis selector '{s}'; expected sh:ORDER, grid:INCxAZ[:SIGMA], or poly:ORDER"
            ))
        };
        let spec = match s.split_once(':') {
            Some(("sh", rest)) => BasisSpec::SphericalHarmonics {
                order: rest.parse().map_err(|_| bad())?,
            },
            Some(("poly", rest)) => BasisSpec::Polynomial {
                order: rest.parse().map_err(|_| bad())?,
            },
            Some(("grid", rest)) => {
                let (shape, sigma) = match rest.split_once(':') {
                    Some((shape, sig)) => (shape, sig.parse().map_err(|_| bad())?),
                    None => (rest, DEFAULT_GRID_SIGMA),
                };
                let (i, j) = shape.split_once('x').ok_or_else(bad)?;
                BasisSpec::GridKernel {
                    n_inclination: i.parse().map_err(|_| bad())?,
                    n_azimuth: j.parse().map_err(|_| bad())?,
                    sigma,
                }
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Evaluates one basis at arbitrary directions.
pub struct BasisEvaluator {
    spec: BasisSpec,
    nodes: Option<Vec<Direction>>,
}

impl BasisEvaluator {
    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    /// Writes the basis values at `dir` into `out` (length must equal
    /// [`Self::dimension`]).
    pub fn eval_into(&self, dir: Direction, out: &mut [f64]) {
        match self.spec {
            BasisSpec::SphericalHarmonics { order } => sphharm::basis_into(order, dir, out),
            BasisSpec::GridKernel { sigma, .. } => {
                grid::basis_into(self.nodes.as_ref().expect("grid nodes"), sigma, dir, out)
            }
            BasisSpec::Polynomial { order } => poly::basis_into(order, dir, out),
        }
    }

    pub fn eval(&self, dir: Direction) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.eval_into(dir, &mut out);
        out
    }
}

/// A gain pattern: coefficients over a basis. Evaluation yields dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternFunction {
    spec: BasisSpec,
    coefficients: Vec<f64>,
}

impl PatternFunction {
    /// Requires the coefficient count to match the basis dimension and all
    /// coefficients to be finite.
    pub fn new(spec: BasisSpec, coefficients: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if coefficients.len() != spec.dimension() {
            return Err(Error::numeric(format!(
                "coefficient count {} does not match dimension {} of basis {spec}",
                coefficients.len(),
                spec.dimension()
            )));
        }
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::numeric(format!(
                "pattern coefficient {c} is not finite"
            )));
        }
        Ok(PatternFunction { spec, coefficients })
    }

    /// The zero pattern (0 dB gain everywhere) in the given basis.
    pub fn zero(spec: BasisSpec) -> Result<Self> {
        let dim = spec.dimension();
        PatternFunction::new(spec, vec![0.0; dim])
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Gain in dB at one direction. For bulk evaluation build an evaluator
    /// once via [`BasisSpec::evaluator`] and take dot products.
    pub fn eval(&self, dir: Direction) -> f64 {
        let ev = self.spec.evaluator().expect("validated at construction");
        let feats = ev.eval(dir);
        feats
            .iter()
            .zip(&self.coefficients)
            .map(|(f, c)| f * c)
            .sum()
    }
}
