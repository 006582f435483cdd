//! Positive continuous weight functions on a convex body.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bodies::{BodyHandle, Point, Shape};
use crate::error::{Error, Result};

/// How `phi_p` is continued from the boundary into the interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Extension {
    /// Constant along rays from the interior point.
    Radial,
    /// Boundary value on the outer collar `t >= 1 - width` (with `t` the
    /// radial fraction), blended linearly to 1 at the interior point.
    Collar { width: f64 },
}

#[derive(Debug, Clone)]
pub enum WeightKind {
    Constant(f64),
    /// `exp(-(x - c)^T P (x - c) / 2)`; an isotropic spec has `P = I / sigma^2`.
    Gaussian { center: Point, precision: DMatrix<f64> },
    PhiP {
        p: f64,
        host: BodyHandle,
        extension: Extension,
    },
}

#[derive(Debug, Clone)]
pub struct WeightFunction {
    kind: WeightKind,
}

/// JSON description of a weight.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Constant {
        s: f64,
    },
    Gaussian {
        center: Vec<f64>,
        sigma: f64,
    },
    PhiP {
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        extension: Option<Extension>,
    },
}

impl WeightSpec {
    pub fn build(&self, host: &BodyHandle) -> Result<WeightFunction> {
        let err = |field: &str, reason: String| Error::Spec {
            field: field.into(),
            reason,
        };
        match self {
            WeightSpec::Constant { s } => WeightFunction::constant(*s).map_err(|e| err("s", e.to_string())),
            WeightSpec::Gaussian { center, sigma } => {
                if center.len() != host.dim() {
                    return Err(err(
                        "center",
                        format!("expected {} coordinates, got {}", host.dim(), center.len()),
                    ));
                }
                WeightFunction::gaussian(DVector::from_column_slice(center), *sigma)
                    .map_err(|e| err("sigma", e.to_string()))
            }
            WeightSpec::PhiP { p, extension } => {
                WeightFunction::phi_p(*p, host, extension.unwrap_or(Extension::Radial))
                    .map_err(|e| err("p", e.to_string()))
            }
        }
    }

    pub fn from_json(s: &str, host: &BodyHandle) -> Result<WeightFunction> {
        let spec: WeightSpec = serde_json::from_str(s).map_err(|e| Error::Spec {
            field: "weight".into(),
            reason: e.to_string(),
        })?;
        spec.build(host)
    }
}

impl WeightFunction {
    pub fn constant(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::range("constant weight", s, "(0, inf)"));
        }
        Ok(Self {
            kind: WeightKind::Constant(s),
        })
    }

    pub fn uniform() -> Self {
        Self {
            kind: WeightKind::Constant(1.0),
        }
    }

    pub fn gaussian(center: Point, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::range("sigma", sigma, "(0, inf)"));
        }
        let n = center.len();
        Ok(Self {
            kind: WeightKind::Gaussian {
                center,
                precision: DMatrix::identity(n, n) / (sigma * sigma),
            },
        })
    }

    /// The curvature weight `phi_p` of `host`. Requires a smooth host with
    /// the origin in its interior, and `p != -n`.
    pub fn phi_p(p: f64, host: &BodyHandle, extension: Extension) -> Result<Self> {
        let n = host.dim() as f64;
        if host.is_polytope() {
            return Err(Error::Unsupported(
                "phi_p is degenerate on polytopes (curvature vanishes on facets)".into(),
            ));
        }
        if p.is_nan() || (p + n).abs() < 1e-12 {
            return Err(Error::range("p", p, "p != -n"));
        }
        if let Extension::Collar { width } = extension {
            if !(width > 0.0 && width <= 1.0) {
                return Err(Error::range("collar width", width, "(0, 1]"));
            }
        }
        let origin = DVector::zeros(host.dim());
        let tol = 1e-12 * host.diameter();
        let interior = match host.shape() {
            Shape::Ball(b) => (&origin - &b.center).norm() < b.radius - tol,
            _ => host.contains(&origin) && host.boundary_quadrature(64).iter().all(|s| s.support_number > tol),
        };
        if !interior {
            return Err(Error::OriginNotInterior(
                "phi_p needs <x, N(x)> > 0 on the boundary".into(),
            ));
        }
        Ok(Self {
            kind: WeightKind::PhiP {
                p,
                host: host.clone(),
                extension,
            },
        })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Declared log-concavity: true for constant and Gaussian weights.
    pub fn is_log_concave(&self) -> bool {
        !matches!(self.kind, WeightKind::PhiP { .. })
    }

    /// The value if the weight is constant on its host (used to route cap
    /// computations to exact backends).
    pub fn constant_value(&self) -> Option<f64> {
        match &self.kind {
            WeightKind::Constant(s) => Some(*s),
            WeightKind::Gaussian { .. } => None,
            WeightKind::PhiP { p, host, extension } => {
                if *p == 1.0 {
                    return Some(1.0);
                }
                match host.shape() {
                    Shape::Ball(b) if b.center.norm() <= 1e-14 * b.radius => {
                        let v = phi_p_ball_value(host.dim(), *p, b.radius);
                        match extension {
                            Extension::Radial => Some(v),
                            Extension::Collar { .. } if (v - 1.0).abs() < 1e-15 => Some(1.0),
                            Extension::Collar { .. } => None,
                        }
                    }
                    _ => None,
                }
            }
        }
    }

    /// `phi(x)`, rejecting points outside the host body.
    pub fn eval(&self, body: &BodyHandle, x: &Point) -> Result<f64> {
        if !body.contains(x) {
            return Err(Error::OutsideBody);
        }
        Ok(self.value(x))
    }

    /// `phi(x)` without a membership check.
    pub fn value(&self, x: &Point) -> f64 {
        match &self.kind {
            WeightKind::Constant(s) => *s,
            WeightKind::Gaussian { center, precision } => {
                let n = x.len();
                let mut q = 0.0;
                for i in 0..n {
                    let yi = x[i] - center[i];
                    let mut row = 0.0;
                    for j in 0..n {
                        row += precision[(i, j)] * (x[j] - center[j]);
                    }
                    q += yi * row;
                }
                (-0.5 * q).exp()
            }
            WeightKind::PhiP { p, host, extension } => {
                let o = host.interior_point();
                let v = x - o;
                let len = v.norm();
                let u = if len > 0.0 {
                    v / len
                } else {
                    let mut e = DVector::zeros(x.len());
                    e[0] = 1.0;
                    e
                };
                let r = host.ray_exit(o, &u);
                let y = o + &u * r;
                let on_boundary = phi_p_at_boundary(host, *p, &y);
                match extension {
                    Extension::Radial => on_boundary,
                    Extension::Collar { width } => {
                        let t = (len / r).min(1.0);
                        if t >= 1.0 - width {
                            on_boundary
                        } else {
                            let s = t / (1.0 - width);
                            s * on_boundary + (1.0 - s)
                        }
                    }
                }
            }
        }
    }

    /// The weight `phi o T^{-1}` on the image body `T K + v` (the host of a
    /// `phi_p` weight is not transformed, so only constant and Gaussian
    /// weights are accepted).
    pub fn push_forward(&self, t: &DMatrix<f64>, v: &Point) -> Result<Self> {
        match &self.kind {
            WeightKind::Constant(_) => Ok(self.clone()),
            WeightKind::Gaussian { center, precision } => {
                let tinv = t.clone().try_inverse().ok_or(Error::SingularMap(t.determinant().abs()))?;
                Ok(Self {
                    kind: WeightKind::Gaussian {
                        center: t * center + v,
                        precision: tinv.transpose() * precision * &tinv,
                    },
                })
            }
            WeightKind::PhiP { .. } => Err(Error::Unsupported(
                "phi_p is tied to its host body and cannot be pushed forward".into(),
            )),
        }
    }

    /// The weight scaled by `s > 0` (constant weights stay constant).
    pub fn scaled_by(&self, s: f64) -> Result<Self> {
        match &self.kind {
            WeightKind::Constant(c) => Self::constant(c * s),
            _ => Err(Error::Unsupported("only constant weights can be rescaled".into())),
        }
    }

    /// Short description used in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Constant(s) => format!("constant(s={s})"),
            WeightKind::Gaussian { center, precision } => format!(
                "gaussian(center={:?}, sigma={})",
                center.as_slice(),
                (1.0 / precision[(0, 0)]).sqrt()
            ),
            WeightKind::PhiP { p, extension, .. } => match extension {
                Extension::Radial => format!("phi_p(p={p})"),
                Extension::Collar { width } => format!("phi_p(p={p}, collar={width})"),
            },
        }
    }

    /// `int_K phi`. Exact for constant weights, slice quadrature otherwise.
    pub fn total_mass(&self, body: &BodyHandle) -> Result<f64> {
        if let Some(s) = self.constant_value() {
            return Ok(s * body.volume());
        }
        let theta = crate::bodies::Direction::axis(body.dim(), 0);
        let lo = -body.support(&-&*theta);
        let ints = crate::caps::cap_integrals(body, self, &theta, lo, &crate::caps::CapOptions::default())?;
        Ok(ints.mass)
    }
}

/// Exponents `(a, b)` of `phi_p = <x,N>^a / kappa^b`.
pub fn phi_p_exponents(n: usize, p: f64) -> (f64, f64) {
    let n = n as f64;
    if p.is_infinite() {
        return (0.5 * n * (n + 1.0), 0.5 * n);
    }
    let q = (p - 1.0) / (2.0 * (n + p));
    (n * (n + 1.0) * q, n * q)
}

/// `phi_p` on the boundary of the centered ball of radius `rho`:
/// `rho^{n^2 (p-1)/(n+p)}`.
pub fn phi_p_ball_value(n: usize, p: f64, rho: f64) -> f64 {
    let (a, b) = phi_p_exponents(n, p);
    let kappa = rho.powi(-(n as i32 - 1));
    rho.powf(a) / kappa.powf(b)
}

fn phi_p_at_boundary(host: &BodyHandle, p: f64, y: &Point) -> f64 {
    if p == 1.0 {
        return 1.0;
    }
    let n = host.dim();
    let (a, b) = phi_p_exponents(n, p);
    let (normal, kappa) = match host.shape() {
        Shape::Ball(ball) => ((y - &ball.center).normalize(), ball.radius.powi(-(n as i32 - 1))),
        Shape::Ellipsoid(e) => {
            let g = &e.shape * (y - &e.center);
            let det = e.det_root();
            let kappa = 1.0 / (det * det * g.norm().powi(n as i32 + 1));
            (g.normalize(), kappa)
        }
        Shape::Polytope(_) => unreachable!("rejected at construction"),
    };
    y.dot(&normal).powf(a) / kappa.powf(b)
}
