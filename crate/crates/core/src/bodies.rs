//! Concrete convex bodies: Euclidean balls, ellipsoids, and V-polytopes in
//! the plane and in space.
//!
//! Every query is answered exactly (closed forms for balls and ellipsoids,
//! exact clipping and triangulation for polytopes). [`BodyHandle`] is an
//! immutable, cheaply clonable handle with cached volume, barycenter,
//! diameter, and an interior (Chebyshev) point.

use std::f64::consts::PI;
use std::ops::Deref;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Plane, Polyhedron};
use crate::quadrature::GaussLegendre;
use crate::special::{unit_ball_volume, unit_cap_moment, unit_cap_volume};
use crate::sphere::sphere_quadrature;

pub type Point = DVector<f64>;

/// A unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(DVector<f64>);

impl Direction {
    pub fn new(v: DVector<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::range("direction norm", n, "(0, inf)"));
        }
        Ok(Self(v / n))
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(v))
    }

    pub fn from_angle(angle: f64) -> Self {
        Self(DVector::from_vec(vec![angle.cos(), angle.sin()]))
    }

    /// Standard basis vector `e_i` in `R^n`.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        Self(v)
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn neg(&self) -> Self {
        Self(-&self.0)
    }
}

impl Deref for Direction {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

/// `{x : (x - c)^T A (x - c) <= 1}`, stored with the symmetric root
/// `L = A^{-1/2}` so that the body is `c + L B_2^n`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    pub center: Point,
    pub shape: DMatrix<f64>,
    root: DMatrix<f64>,
    root_inv: DMatrix<f64>,
    det_root: f64,
}

impl Ellipsoid {
    pub fn root(&self) -> &DMatrix<f64> {
        &self.root
    }

    pub fn det_root(&self) -> f64 {
        self.det_root
    }

    fn from_root(center: Point, root: DMatrix<f64>) -> Result<Self> {
        let eig = SymmetricEigen::new(0.5 * (&root + root.transpose()));
        if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidBody("ellipsoid root must be positive definite".into()));
        }
        let det_root = eig.eigenvalues.iter().product();
        let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l));
        let root_inv = &eig.eigenvectors * inv * eig.eigenvectors.transpose();
        let shape = &root_inv * &root_inv;
        Ok(Self {
            center,
            shape,
            root,
            root_inv,
            det_root,
        })
    }

    fn semi_axes(&self) -> Vec<f64> {
        SymmetricEigen::new(self.root.clone()).eigenvalues.iter().copied().collect()
    }
}

#[derive(Debug, Clone)]
pub enum Polytope {
    /// Counter-clockwise, strictly convex vertex cycle.
    Polygon(Vec<Vector2<f64>>),
    Polyhedron(Polyhedron),
}

impl Polytope {
    pub fn vertices(&self) -> Vec<Point> {
        match self {
            Polytope::Polygon(p) => p.iter().map(|v| DVector::from_column_slice(v.as_slice())).collect(),
            Polytope::Polyhedron(h) => h
                .vertices
                .iter()
                .map(|v| DVector::from_column_slice(v.as_slice()))
                .collect(),
        }
    }

    fn planes(&self) -> Vec<(Point, f64)> {
        match self {
            Polytope::Polygon(p) => geometry::polygon_planes(p)
                .into_iter()
                .map(|pl| (DVector::from_column_slice(pl.normal.as_slice()), pl.offset))
                .collect(),
            Polytope::Polyhedron(h) => h
                .distinct_planes()
                .into_iter()
                .map(|pl: Plane<Vector3<f64>>| (DVector::from_column_slice(pl.normal.as_slice()), pl.offset))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Shape {
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    Polytope(Polytope),
}

/// Gaussian curvature at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curvature {
    Finite(f64),
    /// Vertex or edge of a polytope.
    NonSmooth,
}

/// One node of a surface-measure quadrature on the boundary.
#[derive(Debug, Clone)]
pub struct BoundarySample {
    pub point: Point,
    pub normal: Point,
    pub weight: f64,
    pub curvature: f64,
    /// `<x, N(x)>`, measured from the origin.
    pub support_number: f64,
}

/// Exact moments of a hyperplane section: `(n-1)`-volume, first moment, and
/// second-moment matrix.
#[derive(Debug, Clone)]
pub struct SectionMoments {
    pub area: f64,
    pub first: Point,
    pub second: DMatrix<f64>,
}

#[derive(Debug)]
struct BodyData {
    shape: Shape,
    dim: usize,
    volume: f64,
    barycenter: Point,
    diameter: f64,
    interior_point: Point,
    inradius: f64,
    planes: Vec<(Point, f64)>,
}

#[derive(Debug, Clone)]
pub struct BodyHandle(Arc<BodyData>);

/// JSON description of a body.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BodySpec {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { center: Vec<f64>, shape: Vec<Vec<f64>> },
    Polytope { vertices: Vec<Vec<f64>> },
}

fn spec_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Spec {
        field: field.to_string(),
        reason: reason.into(),
    }
}

impl BodySpec {
    pub fn build(&self) -> Result<BodyHandle> {
        match self {
            BodySpec::Ball { center, radius } => {
                if center.len() < 2 || center.len() > 10 {
                    return Err(spec_err("center", "dimension must be between 2 and 10"));
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(spec_err("radius", "must be a positive finite number"));
                }
                BodyHandle::ball(DVector::from_column_slice(center), *radius)
            }
            BodySpec::Ellipsoid { center, shape } => {
                let n = center.len();
                if !(2..=10).contains(&n) {
                    return Err(spec_err("center", "dimension must be between 2 and 10"));
                }
                if shape.len() != n || shape.iter().any(|r| r.len() != n) {
                    return Err(spec_err("shape", format!("must be a {n}x{n} matrix")));
                }
                let a = DMatrix::from_fn(n, n, |i, j| shape[i][j]);
                BodyHandle::ellipsoid(DVector::from_column_slice(center), a)
                    .map_err(|e| spec_err("shape", e.to_string()))
            }
            BodySpec::Polytope { vertices } => {
                let Some(first) = vertices.first() else {
                    return Err(spec_err("vertices", "empty vertex list"));
                };
                let n = first.len();
                if vertices.iter().any(|v| v.len() != n) {
                    return Err(spec_err("vertices", "vertices have inconsistent dimensions"));
                }
                let pts = vertices.iter().map(|v| DVector::from_column_slice(v)).collect();
                BodyHandle::polytope(pts).map_err(|e| spec_err("vertices", e.to_string()))
            }
        }
    }

    pub fn from_json(s: &str) -> Result<BodyHandle> {
        let spec: BodySpec = serde_json::from_str(s).map_err(|e| spec_err("body", e.to_string()))?;
        spec.build()
    }
}

fn to_v2(p: &Point) -> Vector2<f64> {
    Vector2::new(p[0], p[1])
}

fn to_v3(p: &Point) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

fn from_slice(s: &[f64]) -> Point {
    DVector::from_column_slice(s)
}

/// Orthonormal basis of the complement of a unit vector.
pub fn orthonormal_complement(theta: &Point) -> Vec<Point> {
    let n = theta.len();
    let mut basis: Vec<Point> = Vec::with_capacity(n - 1);
    let mut k = 0;
    while basis.len() < n - 1 && k < n {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        v -= theta * theta.dot(&v);
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let len = v.norm();
        if len > 0.25 {
            basis.push(v / len);
        }
        k += 1;
    }
    basis
}

impl BodyHandle {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBody(format!("ball radius must be positive, got {radius}")));
        }
        let n = center.len();
        if n < 2 {
            return Err(Error::InvalidBody("dimension must be at least 2".into()));
        }
        Ok(Self(Arc::new(BodyData {
            dim: n,
            volume: unit_ball_volume(n) * radius.powi(n as i32),
            barycenter: center.clone(),
            diameter: 2.0 * radius,
            interior_point: center.clone(),
            inradius: radius,
            planes: Vec::new(),
            shape: Shape::Ball(Ball { center, radius }),
        })))
    }

    pub fn unit_ball(n: usize) -> Self {
        Self::ball(DVector::zeros(n), 1.0).expect("unit ball is valid")
    }

    pub fn ellipsoid(center: Point, shape: DMatrix<f64>) -> Result<Self> {
        let n = center.len();
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: shape.nrows(),
            });
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax().max(1.0) {
            return Err(Error::InvalidBody(format!("shape matrix is not symmetric (defect {asym:e})")));
        }
        let eig = SymmetricEigen::new(shape.clone());
        if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidBody("shape matrix must be positive definite".into()));
        }
        let root = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
            * eig.eigenvectors.transpose();
        Self::from_ellipsoid(Ellipsoid::from_root(center, root)?)
    }

    fn from_ellipsoid(e: Ellipsoid) -> Result<Self> {
        let n = e.center.len();
        let axes = e.semi_axes();
        let max_axis = axes.iter().copied().fold(0.0, f64::max);
        let min_axis = axes.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self(Arc::new(BodyData {
            dim: n,
            volume: unit_ball_volume(n) * e.det_root,
            barycenter: e.center.clone(),
            diameter: 2.0 * max_axis,
            interior_point: e.center.clone(),
            inradius: min_axis,
            planes: Vec::new(),
            shape: Shape::Ellipsoid(e),
        })))
    }

    /// Convex hull of the given points (n = 2 or 3). Affinely dependent
    /// input is rejected.
    pub fn polytope(vertices: Vec<Point>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::Degenerate("no vertices".into()));
        };
        let n = first.len();
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: vertices.iter().find(|v| v.len() != n).unwrap().len(),
            });
        }
        let poly = match n {
            2 => {
                let pts: Vec<Vector2<f64>> = vertices.iter().map(to_v2).collect();
                let hull = geometry::convex_hull_2d(&pts);
                let (area, _) = if hull.len() >= 3 {
                    geometry::polygon_area_centroid(&hull)
                } else {
                    (0.0, Vector2::zeros())
                };
                let scale = pts.iter().map(|p| p.norm()).fold(1e-300, f64::max);
                if hull.len() < 3 || area <= 1e-12 * scale * scale {
                    return Err(Error::Degenerate(
                        "planar vertices are affinely dependent (need 3 non-collinear points)".into(),
                    ));
                }
                Polytope::Polygon(hull)
            }
            3 => {
                let pts: Vec<Vector3<f64>> = vertices.iter().map(to_v3).collect();
                Polytope::Polyhedron(geometry::convex_hull_3d(&pts)?)
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "polytopes are supported in dimension 2 and 3, got {n}"
                )))
            }
        };
        Self::from_polytope(poly)
    }

    fn from_polytope(poly: Polytope) -> Result<Self> {
        let (dim, volume, barycenter) = match &poly {
            Polytope::Polygon(p) => {
                let (a, c) = geometry::polygon_area_centroid(p);
                (2, a, from_slice(c.as_slice()))
            }
            Polytope::Polyhedron(h) => {
                let (v, c) = geometry::faces_volume_centroid(&h.faces());
                if v <= 0.0 {
                    return Err(Error::Degenerate("polyhedron has no volume".into()));
                }
                (3, v, from_slice(c.as_slice()))
            }
        };
        let verts = poly.vertices();
        let mut diam2: f64 = 0.0;
        if let Polytope::Polygon(p) = &poly {
            diam2 = geometry::polygon_diameter(p).powi(2);
        }
        for i in 0..verts.len() * (dim - 2) {
            for j in i + 1..verts.len() {
                let d2: f64 = verts[i].iter().zip(verts[j].iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                diam2 = diam2.max(d2);
            }
        }
        let diameter = diam2.sqrt();
        let planes = poly.planes();
        let (interior_point, inradius) = chebyshev_center(&planes, &barycenter, dim);
        Ok(Self(Arc::new(BodyData {
            shape: Shape::Polytope(poly),
            dim,
            volume,
            barycenter,
            diameter,
            interior_point,
            inradius,
            planes,
        })))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.0.shape
    }

    pub fn volume(&self) -> f64 {
        self.0.volume
    }

    pub fn barycenter(&self) -> &Point {
        &self.0.barycenter
    }

    pub fn diameter(&self) -> f64 {
        self.0.diameter
    }

    /// Center of the largest inscribed ball (the body's own center for balls
    /// and ellipsoids).
    pub fn interior_point(&self) -> &Point {
        &self.0.interior_point
    }

    pub fn inradius(&self) -> f64 {
        self.0.inradius
    }

    pub fn is_polytope(&self) -> bool {
        matches!(self.0.shape, Shape::Polytope(_))
    }

    pub fn is_smooth(&self) -> bool {
        !self.is_polytope()
    }

    /// Outward facet planes `(unit normal, offset)` of a polytope (empty for
    /// smooth bodies).
    pub fn facet_planes(&self) -> &[(Point, f64)] {
        &self.0.planes
    }

    pub fn vertices(&self) -> Vec<Point> {
        match &self.0.shape {
            Shape::Polytope(p) => p.vertices(),
            _ => Vec::new(),
        }
    }

    pub fn to_spec(&self) -> BodySpec {
        match &self.0.shape {
            Shape::Ball(b) => BodySpec::Ball {
                center: b.center.iter().copied().collect(),
                radius: b.radius,
            },
            Shape::Ellipsoid(e) => BodySpec::Ellipsoid {
                center: e.center.iter().copied().collect(),
                shape: e.shape.row_iter().map(|r| r.iter().copied().collect()).collect(),
            },
            Shape::Polytope(p) => BodySpec::Polytope {
                vertices: p.vertices().iter().map(|v| v.iter().copied().collect()).collect(),
            },
        }
    }

    fn check_dim(&self, v: &Point) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `h_K(v) = max_{x in K} <x, v>`, positively homogeneous in `v`.
    pub fn support(&self, v: &Point) -> f64 {
        match &self.0.shape {
            Shape::Ball(b) => b.center.dot(v) + b.radius * v.norm(),
            Shape::Ellipsoid(e) => e.center.dot(v) + (&e.root * v).norm(),
            Shape::Polytope(p) => match p {
                Polytope::Polygon(poly) => poly
                    .iter()
                    .map(|x| x.x * v[0] + x.y * v[1])
                    .fold(f64::NEG_INFINITY, f64::max),
                Polytope::Polyhedron(h) => h
                    .vertices
                    .iter()
                    .map(|x| x.x * v[0] + x.y * v[1] + x.z * v[2])
                    .fold(f64::NEG_INFINITY, f64::max),
            },
        }
    }

    /// A maximizer of `<x, v>` over the body.
    pub fn support_point(&self, v: &Point) -> Point {
        match &self.0.shape {
            Shape::Ball(b) => &b.center + v * (b.radius / v.norm()),
            Shape::Ellipsoid(e) => {
                let lv = &e.root * v;
                let norm = lv.norm();
                &e.center + &e.root * (lv / norm)
            }
            Shape::Polytope(p) => p
                .vertices()
                .into_iter()
                .max_by(|a, b| a.dot(v).partial_cmp(&b.dot(v)).unwrap())
                .unwrap(),
        }
    }

    /// Closed membership test with a relative slack of `1e-12`.
    pub fn contains(&self, x: &Point) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let tol = 1e-12 * self.diameter().max(1e-300);
        match &self.0.shape {
            Shape::Ball(b) => (x - &b.center).norm() <= b.radius + tol,
            Shape::Ellipsoid(e) => (&e.root_inv * (x - &e.center)).norm() <= 1.0 + 1e-12,
            Shape::Polytope(_) => self.0.planes.iter().all(|(n, c)| n.dot(x) <= c + tol),
        }
    }

    /// Largest `r >= 0` with `origin + r u` in the body, for `origin` inside.
    pub fn ray_exit(&self, origin: &Point, u: &Point) -> f64 {
        match &self.0.shape {
            Shape::Ball(b) => {
                let w = origin - &b.center;
                let bq = w.dot(u) / u.norm_squared();
                let cq = (w.norm_squared() - b.radius * b.radius) / u.norm_squared();
                (-bq + (bq * bq - cq).max(0.0).sqrt()).max(0.0)
            }
            Shape::Ellipsoid(e) => {
                let w = &e.root_inv * (origin - &e.center);
                let uu = &e.root_inv * u;
                let a = uu.norm_squared();
                let bq = w.dot(&uu) / a;
                let cq = (w.norm_squared() - 1.0) / a;
                (-bq + (bq * bq - cq).max(0.0).sqrt()).max(0.0)
            }
            Shape::Polytope(_) => self
                .0
                .planes
                .iter()
                .filter_map(|(n, c)| {
                    let nu = n.dot(u);
                    (nu > 0.0).then(|| ((c - n.dot(origin)) / nu).max(0.0))
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Outer unit normal at a boundary point of a smooth body.
    pub fn normal_at(&self, x: &Point) -> Result<Point> {
        self.check_dim(x)?;
        match &self.0.shape {
            Shape::Ball(b) => Ok((x - &b.center).normalize()),
            Shape::Ellipsoid(e) => Ok((&e.shape * (x - &e.center)).normalize()),
            Shape::Polytope(_) => {
                let tol = 1e-10 * self.diameter();
                let active: Vec<&(Point, f64)> =
                    self.0.planes.iter().filter(|(n, c)| (n.dot(x) - c).abs() <= tol).collect();
                match active.as_slice() {
                    [single] => Ok(single.0.clone()),
                    [] => Err(Error::OutsideBody),
                    _ => Err(Error::Unsupported("normal is not unique on the polytope skeleton".into())),
                }
            }
        }
    }

    /// Gaussian curvature at a boundary point. Facet interiors of polytopes
    /// have curvature 0; vertices and edges are reported as non-smooth.
    pub fn curvature_at(&self, x: &Point) -> Result<Curvature> {
        self.check_dim(x)?;
        let n = self.dim() as i32;
        match &self.0.shape {
            Shape::Ball(b) => Ok(Curvature::Finite(b.radius.powi(-(n - 1)))),
            Shape::Ellipsoid(e) => {
                let g = &e.shape * (x - &e.center);
                Ok(Curvature::Finite(
                    1.0 / (e.det_root * e.det_root * g.norm().powi(n + 1)),
                ))
            }
            Shape::Polytope(_) => {
                let tol = 1e-10 * self.diameter();
                let active = self
                    .0
                    .planes
                    .iter()
                    .filter(|(nv, c)| (nv.dot(x) - c).abs() <= tol)
                    .count();
                match active {
                    0 => Err(Error::OutsideBody),
                    1 => Ok(Curvature::Finite(0.0)),
                    _ => Ok(Curvature::NonSmooth),
                }
            }
        }
    }

    /// Surface-measure quadrature of the boundary. Smooth bodies use the
    /// sphere rule pushed forward with its Jacobian; polytopes use
    /// Gauss-Legendre panels on edges (2D) or collapsed-square rules on
    /// triangles (3D). Polytope nodes are facet interiors (curvature 0).
    pub fn boundary_quadrature(&self, resolution: usize) -> Vec<BoundarySample> {
        let n = self.dim();
        match &self.0.shape {
            Shape::Ball(b) => {
                let kappa = b.radius.powi(-(n as i32 - 1));
                let jac = b.radius.powi(n as i32 - 1);
                sphere_quadrature(n, resolution)
                    .into_iter()
                    .map(|(u, w)| {
                        let x = &b.center + &u * b.radius;
                        let s = x.dot(&u);
                        BoundarySample {
                            point: x,
                            normal: u,
                            weight: w * jac,
                            curvature: kappa,
                            support_number: s,
                        }
                    })
                    .collect()
            }
            Shape::Ellipsoid(e) => sphere_quadrature(n, resolution)
                .into_iter()
                .map(|(u, w)| {
                    let x = &e.center + &e.root * &u;
                    let g = &e.root_inv * &u;
                    let gn = g.norm();
                    let normal = g / gn;
                    let s = x.dot(&normal);
                    BoundarySample {
                        point: x,
                        normal,
                        weight: w * e.det_root * gn,
                        curvature: 1.0 / (e.det_root * e.det_root * gn.powi(n as i32 + 1)),
                        support_number: s,
                    }
                })
                .collect(),
            Shape::Polytope(Polytope::Polygon(poly)) => {
                let perimeter: f64 = (0..poly.len())
                    .map(|i| (poly[(i + 1) % poly.len()] - poly[i]).norm())
                    .sum();
                let gl = GaussLegendre::cached(8);
                let planes = geometry::polygon_planes(poly);
                let mut out = Vec::new();
                for (i, pl) in planes.iter().enumerate() {
                    let p = poly[i];
                    let q = poly[(i + 1) % poly.len()];
                    let len = (q - p).norm();
                    let panels = ((resolution as f64 * len / perimeter / 8.0).ceil() as usize).max(1);
                    for k in 0..panels {
                        let a = k as f64 / panels as f64;
                        let bnd = (k + 1) as f64 / panels as f64;
                        for (s, w) in gl.on_interval(a, bnd) {
                            let x = p + (q - p) * s;
                            out.push(BoundarySample {
                                point: from_slice(x.as_slice()),
                                normal: from_slice(pl.normal.as_slice()),
                                weight: w * len,
                                curvature: 0.0,
                                support_number: pl.offset,
                            });
                        }
                    }
                }
                out
            }
            Shape::Polytope(Polytope::Polyhedron(h)) => {
                let per = (resolution as f64 / h.triangles.len() as f64).sqrt().ceil() as usize;
                let gl = GaussLegendre::cached(per.clamp(3, 24));
                let mut out = Vec::new();
                for (t, pl) in h.triangles.iter().zip(&h.planes) {
                    let [a, b, c] = [h.vertices[t[0]], h.vertices[t[1]], h.vertices[t[2]]];
                    for (x, w) in triangle_rule(&gl, &a, &b, &c) {
                        out.push(BoundarySample {
                            point: from_slice(x.as_slice()),
                            normal: from_slice(pl.normal.as_slice()),
                            weight: w,
                            curvature: 0.0,
                            support_number: pl.offset,
                        });
                    }
                }
                out
            }
        }
    }

    /// Image of the body under the linear map `T` (balls become ellipsoids
    /// unless `T` is a similarity).
    pub fn apply_linear(&self, t: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if t.nrows() != n || t.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: t.nrows(),
            });
        }
        let det = t.determinant();
        let scale = t.amax().max(1e-300).powi(n as i32);
        if !(det.abs() > 1e-14 * scale) {
            return Err(Error::SingularMap(det.abs()));
        }
        match &self.0.shape {
            Shape::Ball(b) => {
                let ttt = t * t.transpose();
                let s2 = ttt.trace() / n as f64;
                if (&ttt - DMatrix::identity(n, n) * s2).amax() <= 1e-12 * s2 {
                    return Self::ball(t * &b.center, b.radius * s2.sqrt());
                }
                let root = t * b.radius;
                self.linear_ellipsoid(t * &b.center, &root)
            }
            Shape::Ellipsoid(e) => self.linear_ellipsoid(t * &e.center, &(t * &e.root)),
            Shape::Polytope(p) => Self::polytope(p.vertices().iter().map(|v| t * v).collect()),
        }
    }

    fn linear_ellipsoid(&self, center: Point, m: &DMatrix<f64>) -> Result<Self> {
        // c + M B = c + sqrt(M M^T) B
        let eig = SymmetricEigen::new(m * m.transpose());
        let root = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
            * eig.eigenvectors.transpose();
        Self::from_ellipsoid(Ellipsoid::from_root(center, root)?)
    }

    pub fn translated(&self, v: &Point) -> Result<Self> {
        self.check_dim(v)?;
        match &self.0.shape {
            Shape::Ball(b) => Self::ball(&b.center + v, b.radius),
            Shape::Ellipsoid(e) => Self::from_ellipsoid(Ellipsoid::from_root(&e.center + v, e.root.clone())?),
            Shape::Polytope(p) => Self::polytope(p.vertices().iter().map(|x| x + v).collect()),
        }
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::range("scale", lambda, "(0, inf)"));
        }
        self.apply_linear(&(DMatrix::identity(self.dim(), self.dim()) * lambda))
    }

    /// Translate so that the interior (Chebyshev) point is the origin.
    /// Returns the moved body and the offset that was subtracted.
    pub fn recentered(&self) -> Result<(Self, Point)> {
        let off = self.interior_point().clone();
        Ok((self.translated(&(-&off))?, off))
    }

    /// Scale to unit volume and translate the barycenter to the origin.
    pub fn normalized(&self) -> Result<Self> {
        let lambda = self.volume().powf(-1.0 / self.dim() as f64);
        let moved = self.translated(&(-self.barycenter()))?;
        moved.scaled(lambda)
    }

    /// Heights `<v, theta>` of the polytope vertices (empty for smooth bodies).
    pub fn vertex_heights(&self, theta: &Point) -> Vec<f64> {
        self.vertices().iter().map(|v| v.dot(theta)).collect()
    }

    /// Exact `(volume, first moment)` of `K ∩ {<x, theta> >= d}` for a unit
    /// `theta`.
    pub fn cap_volume_moment(&self, theta: &Point, d: f64) -> (f64, Point) {
        let n = self.dim();
        match &self.0.shape {
            Shape::Ball(b) => {
                let tau = d - b.center.dot(theta);
                let h = (b.radius - tau) / b.radius;
                if h <= 0.0 {
                    return (0.0, DVector::zeros(n));
                }
                let vol = b.radius.powi(n as i32) * unit_cap_volume(n, h);
                let axial = b.radius.powi(n as i32 + 1) * unit_cap_moment(n, h);
                (vol, &b.center * vol + theta * axial)
            }
            Shape::Ellipsoid(e) => {
                let lt = &e.root * theta;
                let len = lt.norm();
                let bhat = lt / len;
                let tau = (d - e.center.dot(theta)) / len;
                let h = 1.0 - tau;
                if h <= 0.0 {
                    return (0.0, DVector::zeros(n));
                }
                let vol = e.det_root * unit_cap_volume(n, h);
                let axial = e.det_root * unit_cap_moment(n, h);
                (vol, &e.center * vol + &e.root * bhat * axial)
            }
            Shape::Polytope(Polytope::Polygon(poly)) => {
                let cap = geometry::clip_polygon(poly, &to_v2(theta), d);
                let (a, c) = geometry::polygon_area_centroid(&cap);
                let a = a.max(0.0);
                (a, from_slice(c.as_slice()) * a)
            }
            Shape::Polytope(Polytope::Polyhedron(h)) => {
                let cap = geometry::clip_faces(&h.faces(), &to_v3(theta), d);
                let (v, c) = geometry::faces_volume_centroid(&cap);
                let v = v.max(0.0);
                (v, from_slice(c.as_slice()) * v)
            }
        }
    }

    /// The polytope `K ∩ {<x, theta> >= d}` as a new body.
    pub fn clip(&self, theta: &Point, d: f64) -> Result<Self> {
        match &self.0.shape {
            Shape::Polytope(Polytope::Polygon(poly)) => {
                let cap = geometry::clip_polygon(poly, &to_v2(theta), d);
                Self::polytope(cap.iter().map(|v| from_slice(v.as_slice())).collect())
            }
            Shape::Polytope(Polytope::Polyhedron(h)) => {
                let cap = geometry::clip_faces(&h.faces(), &to_v3(theta), d);
                let pts: Vec<Point> = cap.iter().flatten().map(|v| from_slice(v.as_slice())).collect();
                Self::polytope(pts)
            }
            _ => Err(Error::Unsupported("clipping is exact only for polytopes".into())),
        }
    }

    /// Exact moments of the section `K ∩ {<x, theta> = t}` for a unit `theta`.
    pub fn section_moments(&self, theta: &Point, t: f64) -> SectionMoments {
        let n = self.dim();
        let empty = || SectionMoments {
            area: 0.0,
            first: DVector::zeros(n),
            second: DMatrix::zeros(n, n),
        };
        match &self.0.shape {
            Shape::Ball(b) => {
                let tau = t - b.center.dot(theta);
                let r2 = b.radius * b.radius - tau * tau;
                if r2 <= 0.0 {
                    return empty();
                }
                let area = unit_ball_volume(n - 1) * r2.powf(0.5 * (n as f64 - 1.0));
                let p = &b.center + theta * tau;
                let proj = DMatrix::identity(n, n) - theta * theta.transpose();
                SectionMoments {
                    first: &p * area,
                    second: (&p * p.transpose() + proj * (r2 / (n as f64 + 1.0))) * area,
                    area,
                }
            }
            Shape::Ellipsoid(e) => {
                let lt = &e.root * theta;
                let len = lt.norm();
                let bhat = &lt / len;
                let tau = (t - e.center.dot(theta)) / len;
                let r2 = 1.0 - tau * tau;
                if r2 <= 0.0 {
                    return empty();
                }
                let jac = e.det_root / len;
                let mu0 = unit_ball_volume(n - 1) * r2.powf(0.5 * (n as f64 - 1.0));
                let mu1 = &bhat * (mu0 * tau);
                let proj = DMatrix::identity(n, n) - &bhat * bhat.transpose();
                let mu2 = (&bhat * bhat.transpose() * (tau * tau) + proj * (r2 / (n as f64 + 1.0))) * mu0;
                let lm1 = &e.root * &mu1;
                let c = &e.center;
                SectionMoments {
                    area: jac * mu0,
                    first: (c * mu0 + &lm1) * jac,
                    second: (c * c.transpose() * mu0
                        + c * lm1.transpose()
                        + &lm1 * c.transpose()
                        + &e.root * mu2 * &e.root)
                        * jac,
                }
            }
            Shape::Polytope(Polytope::Polygon(poly)) => match geometry::polygon_section(poly, &to_v2(theta), t) {
                Some((a, b)) => {
                    let (len, m1, m2) = geometry::segment_moments(&a, &b);
                    SectionMoments {
                        area: len,
                        first: from_slice(m1.as_slice()),
                        second: DMatrix::from_column_slice(2, 2, m2.as_slice()),
                    }
                }
                None => empty(),
            },
            Shape::Polytope(Polytope::Polyhedron(h)) => {
                let sec = h.section(&to_v3(theta), t);
                let (a, m1, m2): (f64, Vector3<f64>, Matrix3<f64>) = geometry::polygon3_moments(&sec);
                SectionMoments {
                    area: a,
                    first: from_slice(m1.as_slice()),
                    second: DMatrix::from_column_slice(3, 3, m2.as_slice()),
                }
            }
        }
    }

    /// Quadrature nodes `(x, w)` on the section `K ∩ {<x, theta> = t}` with
    /// respect to `(n-1)`-dimensional Lebesgue measure. `order` controls the
    /// number of Gauss-Legendre nodes per direction.
    pub fn section_nodes(&self, theta: &Point, t: f64, order: usize, out: &mut Vec<(Point, f64)>) {
        out.clear();
        let n = self.dim();
        match &self.0.shape {
            Shape::Ball(b) => {
                let tau = t - b.center.dot(theta);
                let r2 = b.radius * b.radius - tau * tau;
                if r2 <= 0.0 {
                    return;
                }
                let p = &b.center + theta * tau;
                ball_section_nodes(&p, r2.sqrt(), theta, order, out);
            }
            Shape::Ellipsoid(e) => {
                let lt = &e.root * theta;
                let len = lt.norm();
                let bhat = &lt / len;
                let tau = (t - e.center.dot(theta)) / len;
                let r2 = 1.0 - tau * tau;
                if r2 <= 0.0 {
                    return;
                }
                let jac = e.det_root / len;
                let p = &bhat * tau;
                ball_section_nodes(&p, r2.sqrt(), &bhat, order, out);
                for (x, w) in out.iter_mut() {
                    *x = &e.center + &e.root * &*x;
                    *w *= jac;
                }
            }
            Shape::Polytope(Polytope::Polygon(poly)) => {
                if let Some((a, b)) = geometry::polygon_section(poly, &to_v2(theta), t) {
                    let len = (b - a).norm();
                    let gl = GaussLegendre::cached(order.max(2));
                    for (s, w) in gl.on_interval(0.0, 1.0) {
                        let x = a + (b - a) * s;
                        out.push((from_slice(x.as_slice()), w * len));
                    }
                }
            }
            Shape::Polytope(Polytope::Polyhedron(h)) => {
                let sec = h.section(&to_v3(theta), t);
                if sec.len() < 3 {
                    return;
                }
                let gl = GaussLegendre::cached(order.max(2));
                for i in 1..sec.len() - 1 {
                    for (x, w) in triangle_rule(&gl, &sec[0], &sec[i], &sec[i + 1]) {
                        out.push((from_slice(x.as_slice()), w));
                    }
                }
            }
        }
        debug_assert!(out.iter().all(|(x, _)| x.len() == n));
    }
}

/// Collapsed-square (Duffy) product rule on a triangle.
fn triangle_rule(gl: &GaussLegendre, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> Vec<(Vector3<f64>, f64)> {
    let area2 = (b - a).cross(&(c - a)).norm();
    let mut out = Vec::with_capacity(gl.len() * gl.len());
    for (u, wu) in gl.on_interval(0.0, 1.0) {
        for (v, wv) in gl.on_interval(0.0, 1.0) {
            let x = a + (b - a) * u + (c - b) * (u * v);
            out.push((x, wu * wv * u * area2));
        }
    }
    out
}

/// Nodes on the `(n-1)`-ball of radius `r` centered at `p` inside the
/// hyperplane orthogonal to `theta`.
fn ball_section_nodes(p: &Point, r: f64, theta: &Point, order: usize, out: &mut Vec<(Point, f64)>) {
    let n = p.len();
    let basis = orthonormal_complement(theta);
    let gl = GaussLegendre::cached(order.max(2));
    if n == 2 {
        for (s, w) in gl.on_interval(-r, r) {
            out.push((p + &basis[0] * s, w));
        }
        return;
    }
    let k = n - 1;
    let ring = sphere_quadrature(k, (2 * order).max(8));
    for (rho, wr) in gl.on_interval(0.0, r) {
        let jac = rho.powi(k as i32 - 1);
        for (u, wu) in &ring {
            let mut x = p.clone();
            for (j, bj) in basis.iter().enumerate() {
                x += bj * (rho * u[j]);
            }
            out.push((x, wr * wu * jac));
        }
    }
}

/// Chebyshev center by enumerating `(n+1)`-subsets of facet planes; falls
/// back to the barycenter when the enumeration would be too large.
fn chebyshev_center(planes: &[(Point, f64)], fallback: &Point, n: usize) -> (Point, f64) {
    let depth = |x: &Point| planes.iter().map(|(a, b)| b - a.dot(x)).fold(f64::INFINITY, f64::min);
    let k = planes.len();
    let combos = binomial(k, n + 1);
    let mut best = (fallback.clone(), depth(fallback));
    if combos > 200_000 {
        return best;
    }
    let mut idx: Vec<usize> = (0..=n).collect();
    loop {
        let mut m = DMatrix::zeros(n + 1, n + 1);
        let mut rhs = DVector::zeros(n + 1);
        for (row, &i) in idx.iter().enumerate() {
            for j in 0..n {
                m[(row, j)] = planes[i].0[j];
            }
            m[(row, n)] = 1.0;
            rhs[row] = planes[i].1;
        }
        if let Some(sol) = m.lu().solve(&rhs) {
            let x = sol.rows(0, n).into_owned();
            let r = sol[n];
            if r.is_finite() && r > best.1 + 1e-15 {
                let d = depth(&x);
                if d >= r - 1e-12 * (1.0 + r.abs()) {
                    best = (x, d);
                }
            }
        }
        // next combination
        let mut i = n + 1;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - (n + 1 - i) {
                idx[i] += 1;
                for j in i + 1..=n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return usize::MAX;
        }
    }
    r as usize
}

/// Planar rotation by `angle`.
pub fn rotation2(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Regular `k`-gon inscribed in the circle of radius `r` around the origin.
pub fn regular_polygon(k: usize, r: f64) -> Result<BodyHandle> {
    BodyHandle::polytope(
        (0..k)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / k as f64;
                DVector::from_vec(vec![r * a.cos(), r * a.sin()])
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Point {
        DVector::from_column_slice(v)
    }

    fn square() -> BodyHandle {
        BodyHandle::polytope(vec![pt(&[0., 0.]), pt(&[1., 0.]), pt(&[1., 1.]), pt(&[0., 1.])]).unwrap()
    }

    fn tetra() -> BodyHandle {
        BodyHandle::polytope(vec![pt(&[0., 0., 0.]), pt(&[1., 0., 0.]), pt(&[0., 1., 0.]), pt(&[0., 0., 1.])]).unwrap()
    }

    #[test]
    fn support_examples() {
        let ball = BodyHandle::unit_ball(3);
        for d in crate::sphere::DirectionGrid::new(3, 20).directions() {
            assert!((ball.support(d) - 1.0).abs() < 1e-15);
        }
        assert_eq!(square().support(&pt(&[1., 0.])), 1.0);
        let e = BodyHandle::ellipsoid(pt(&[0., 0.]), DMatrix::from_diagonal(&pt(&[1.0, 0.25]))).unwrap();
        assert!((e.support(&pt(&[0., 1.])) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn contains_examples() {
        let ball = BodyHandle::unit_ball(3);
        assert!(ball.contains(&pt(&[0., 0., 0.])));
        assert!(!ball.contains(&pt(&[1.0000001, 0., 0.])));
        assert!(square().contains(&pt(&[0.5, 1.0])));
        assert!(!square().contains(&pt(&[0.5, 1.001])));
    }

    #[test]
    fn volume_examples() {
        assert!((BodyHandle::unit_ball(2).volume() - PI).abs() < 1e-15);
        assert!((square().volume() - 1.0).abs() < 1e-15);
        assert!((tetra().volume() - 1.0 / 6.0).abs() < 1e-15);
        assert!((tetra().barycenter() - pt(&[0.25, 0.25, 0.25])).norm() < 1e-15);
    }

    #[test]
    fn degenerate_polytopes_rejected() {
        let line = BodyHandle::polytope(vec![pt(&[0., 0.]), pt(&[1., 1.]), pt(&[2., 2.])]);
        assert!(matches!(line, Err(Error::Degenerate(_))));
        let flat = BodyHandle::polytope(vec![
            pt(&[0., 0., 0.]),
            pt(&[1., 0., 0.]),
            pt(&[0., 1., 0.]),
            pt(&[1., 1., 0.]),
        ]);
        assert!(matches!(flat, Err(Error::Degenerate(_))));
        assert!(matches!(
            BodyHandle::polytope(vec![pt(&[0., 0., 0., 0.]); 5]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn chebyshev_center_of_square_and_triangle() {
        let sq = square();
        assert!((sq.interior_point() - pt(&[0.5, 0.5])).norm() < 1e-14);
        assert!((sq.inradius() - 0.5).abs() < 1e-14);
        let tri = BodyHandle::polytope(vec![pt(&[0., 0.]), pt(&[1., 0.]), pt(&[0., 1.])]).unwrap();
        let r = 1.0 / (2.0 + 2f64.sqrt());
        assert!((tri.interior_point() - pt(&[r, r])).norm() < 1e-14);
        assert!(tri.contains(tri.interior_point()));
        let cube = BodyHandle::polytope(
            (0..8)
                .map(|i| pt(&[(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]))
                .collect(),
        )
        .unwrap();
        assert!((cube.interior_point() - pt(&[0.5, 0.5, 0.5])).norm() < 1e-14);
    }

    #[test]
    fn boundary_quadrature_sums() {
        let disc = BodyHandle::unit_ball(2);
        for res in [16, 64, 257] {
            let s: f64 = disc.boundary_quadrature(res).iter().map(|b| b.weight).sum();
            assert!((s - 2.0 * PI).abs() < 1e-6 * 2.0 * PI);
        }
        for b in BodyHandle::unit_ball(3).boundary_quadrature(16) {
            assert!((b.curvature - 1.0).abs() < 1e-15);
            assert!((b.support_number - 1.0).abs() < 1e-14);
        }
        let s: f64 = tetra().boundary_quadrature(200).iter().map(|b| b.weight).sum();
        let exact = 1.5 + 3f64.sqrt() / 2.0;
        assert!((s - exact).abs() < 1e-13);
    }

    #[test]
    fn ellipse_perimeter_against_adaptive_oracle() {
        // semi-axes (1, 2)
        let e = BodyHandle::ellipsoid(pt(&[0., 0.]), DMatrix::from_diagonal(&pt(&[1.0, 0.25]))).unwrap();
        let (oracle, _) = crate::quadrature::integrate(
            |t| (t.sin().powi(2) + 4.0 * t.cos().powi(2)).sqrt(),
            0.0,
            2.0 * PI,
            crate::quadrature::AdaptiveOptions::default(),
        );
        assert!((oracle - 9.688_448_220_5).abs() < 1e-8);
        let s: f64 = e.boundary_quadrature(128).iter().map(|b| b.weight).sum();
        assert!((s - oracle).abs() < 1e-6 * oracle);
    }

    #[test]
    fn ellipse_curvature_at_axis_end() {
        let e = BodyHandle::ellipsoid(pt(&[0., 0.]), DMatrix::from_diagonal(&pt(&[1.0 / 4.0, 1.0]))).unwrap();
        // a = 2, b = 1: curvature at (2, 0) is a / b^2 = 2
        match e.curvature_at(&pt(&[2.0, 0.0])).unwrap() {
            Curvature::Finite(k) => assert!((k - 2.0).abs() < 1e-12),
            _ => panic!(),
        }
    }

    #[test]
    fn polytope_curvature_markers() {
        let sq = square();
        assert_eq!(sq.curvature_at(&pt(&[0.5, 1.0])).unwrap(), Curvature::Finite(0.0));
        assert_eq!(sq.curvature_at(&pt(&[1.0, 1.0])).unwrap(), Curvature::NonSmooth);
        assert_eq!(tetra().curvature_at(&pt(&[0.5, 0.0, 0.0])).unwrap(), Curvature::NonSmooth);
    }

    #[test]
    fn apply_linear_examples() {
        let ball = BodyHandle::unit_ball(2);
        let same = ball.apply_linear(&DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(same.shape(), Shape::Ball(b) if (b.radius - 1.0).abs() < 1e-15));
        let t = DMatrix::from_diagonal(&pt(&[2.0, 0.5]));
        let e = ball.apply_linear(&t).unwrap();
        assert!(matches!(e.shape(), Shape::Ellipsoid(_)));
        assert!((e.support(&pt(&[1., 0.])) - 2.0).abs() < 1e-14);
        assert!((e.volume() - PI).abs() < 1e-13);
        let rot = square().apply_linear(&rotation2(PI / 4.0)).unwrap();
        assert!((rot.volume() - 1.0).abs() < 1e-14);
        assert!((rot.support(&pt(&[0., 1.])) - 2f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            ball.apply_linear(&DMatrix::from_row_slice(2, 2, &[1., 2., 2., 4.])),
            Err(Error::SingularMap(_))
        ));
    }

    #[test]
    fn section_moments_of_ball() {
        let ball = BodyHandle::unit_ball(3);
        let s = ball.section_moments(&pt(&[0., 0., 1.]), 0.5);
        assert!((s.area - 0.75 * PI).abs() < 1e-14);
        assert!((s.first - pt(&[0., 0., 0.375 * PI])).norm() < 1e-14);
        // int x^2 over a disc of radius^2 = 3/4: pi r^4 / 4
        assert!((s.second[(0, 0)] - PI * 0.5625 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn ellipsoid_section_nodes_match_exact_moments() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 0.5]);
        let e = BodyHandle::ellipsoid(pt(&[0.1, -0.2, 0.3]), a).unwrap();
        let theta = pt(&[0.3, 0.5, 0.8]).normalize();
        let t = 0.4;
        let exact = e.section_moments(&theta, t);
        let mut nodes = Vec::new();
        e.section_nodes(&theta, t, 8, &mut nodes);
        let area: f64 = nodes.iter().map(|(_, w)| w).sum();
        let first = nodes.iter().fold(DVector::zeros(3), |acc, (x, w)| acc + x * *w);
        assert!((area - exact.area).abs() < 1e-12);
        assert!((first - &exact.first).norm() < 1e-12);
        for (x, _) in &nodes {
            assert!((x.dot(&theta) - t).abs() < 1e-13);
            assert!(e.contains(x));
        }
    }

    #[test]
    fn json_spec_round_trip_and_errors() {
        let b = BodySpec::from_json(r#"{"type":"polytope","vertices":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert!((b.volume() - 1.0).abs() < 1e-15);
        let again = b.to_spec().build().unwrap();
        assert!((again.volume() - 1.0).abs() < 1e-15);
        let err = BodySpec::from_json(r#"{"type":"ball","center":[0,0],"radius":-1}"#).unwrap_err();
        assert!(matches!(err, Error::Spec { ref field, .. } if field == "radius"));
        let err = BodySpec::from_json(r#"{"type":"ellipsoid","center":[0,0],"shape":[[1,0]]}"#).unwrap_err();
        assert!(matches!(err, Error::Spec { ref field, .. } if field == "shape"));
    }
}
