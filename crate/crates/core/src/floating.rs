//! Ulam floating bodies `M_delta(K, phi)`, weighted floating bodies
//! `F_delta(K, phi)`, and `L_p` centroid bodies, represented two-sidedly by
//! an inner vertex hull and an outer halfspace intersection.

use std::f64::consts::E;

use nalgebra::{DVector, Vector2, Vector3};
use rayon::prelude::*;

use crate::bodies::{BodyHandle, Direction, Point, Polytope, Shape};
use crate::caps::{cap_cut, cut_height, section_mass, CapCut, CapOptions};
use crate::error::{Error, Result};
use crate::geometry;
use crate::quadrature::{integrate_adaptive, smoothstep_map, AdaptiveOptions, GaussLegendre};
use crate::sphere::DirectionGrid;
use crate::weights::WeightFunction;

/// A body together with a weight, its total mass, and cap options.
#[derive(Debug, Clone)]
pub struct WeightedBody {
    pub body: BodyHandle,
    pub weight: WeightFunction,
    pub total: f64,
    pub opts: CapOptions,
}

impl WeightedBody {
    pub fn new(body: BodyHandle, weight: WeightFunction) -> Result<Self> {
        Self::with_options(body, weight, CapOptions::default())
    }

    pub fn with_options(body: BodyHandle, weight: WeightFunction, opts: CapOptions) -> Result<Self> {
        let total = weight.total_mass(&body)?;
        Ok(Self {
            body,
            weight,
            total,
            opts,
        })
    }

    pub fn uniform(body: BodyHandle) -> Self {
        let total = body.volume();
        Self {
            body,
            weight: WeightFunction::uniform(),
            total,
            opts: CapOptions::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    fn check_delta(&self, delta: f64) -> Result<()> {
        if !(delta > 0.0 && delta < self.total) {
            return Err(Error::range("delta", delta, &format!("(0, {})", self.total)));
        }
        Ok(())
    }

    pub fn cut_height(&self, theta: &Direction, delta: f64) -> Result<f64> {
        cut_height(&self.body, &self.weight, theta, delta, self.total, &self.opts)
    }

    pub fn cap_cut(&self, theta: &Direction, delta: f64) -> Result<CapCut> {
        self.check_delta(delta)?;
        cap_cut(&self.body, &self.weight, theta, delta, self.total, &self.opts)
    }
}

/// `(h_{M_delta}(theta), x(theta, delta))`: the support value of the Ulam
/// floating body and its unique boundary point with normal `theta`.
pub fn ulam_support(wb: &WeightedBody, theta: &Direction, delta: f64) -> Result<(f64, Point)> {
    let cut = wb.cap_cut(theta, delta)?;
    Ok((cut.barycenter.dot(theta), cut.barycenter))
}

/// `d(theta, delta)`: the support of the halfspace that `F_delta` lies in.
/// On an antipodally closed grid this is the tightest bound the grid offers
/// in direction `theta`.
pub fn floating_support(wb: &WeightedBody, theta: &Direction, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5 * wb.total) {
        return Err(Error::range("delta", delta, &format!("(0, {})", 0.5 * wb.total)));
    }
    wb.cut_height(theta, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxKind {
    Ulam,
    Floating,
    ConvexFloating,
    CentroidZp,
}

/// A convex polytope given by vertices and outward facet planes.
#[derive(Debug, Clone)]
pub struct Hull {
    pub vertices: Vec<Point>,
    pub planes: Vec<(Point, f64)>,
    pub volume: f64,
    body: BodyHandle,
}

impl Hull {
    /// Convex hull of points in the plane or in space.
    pub fn of_points(points: &[Point]) -> Result<Self> {
        let body = BodyHandle::polytope(points.to_vec())?;
        Ok(Self {
            vertices: body.vertices(),
            planes: body.facet_planes().to_vec(),
            volume: body.volume(),
            body,
        })
    }

    /// `{x : <x, dirs[i]> <= values[i]}` intersected with the box
    /// `[-r, r]^n`; fails if the result touches the box or is empty.
    pub fn of_halfspaces(dirs: &[Point], values: &[f64], r: f64) -> Result<Self> {
        let n = dirs.first().map_or(0, |d| d.len());
        let vertices: Vec<Point> = match n {
            2 => {
                let mut poly = vec![
                    Vector2::new(-r, -r),
                    Vector2::new(r, -r),
                    Vector2::new(r, r),
                    Vector2::new(-r, r),
                ];
                for (i, (d, h)) in dirs.iter().zip(values).enumerate() {
                    poly = geometry::clip_polygon(&poly, &Vector2::new(-d[0], -d[1]), -h);
                    if poly.len() < 3 {
                        return Err(Error::EmptyIntersection(format!(
                            "halfspace {i} (normal {:?}, offset {h}) empties the intersection",
                            d.as_slice()
                        )));
                    }
                }
                poly.iter().map(|v| DVector::from_column_slice(v.as_slice())).collect()
            }
            3 => {
                let c = |x: f64, y: f64, z: f64| Vector3::new(x, y, z);
                let cube = geometry::convex_hull_3d(&[
                    c(-r, -r, -r),
                    c(r, -r, -r),
                    c(-r, r, -r),
                    c(r, r, -r),
                    c(-r, -r, r),
                    c(r, -r, r),
                    c(-r, r, r),
                    c(r, r, r),
                ])?;
                let mut faces = cube.faces();
                for (i, (d, h)) in dirs.iter().zip(values).enumerate() {
                    faces = geometry::clip_faces(&faces, &Vector3::new(-d[0], -d[1], -d[2]), -h);
                    if faces.len() < 4 {
                        return Err(Error::EmptyIntersection(format!(
                            "halfspace {i} (normal {:?}, offset {h}) empties the intersection",
                            d.as_slice()
                        )));
                    }
                }
                faces
                    .iter()
                    .flatten()
                    .map(|v| DVector::from_column_slice(v.as_slice()))
                    .collect()
            }
            _ => return Err(Error::Unsupported("halfspace intersections need n = 2 or 3".into())),
        };
        if vertices.iter().any(|v| v.amax() >= r * (1.0 - 1e-12)) {
            return Err(Error::Degenerate("halfspace intersection is unbounded on this grid".into()));
        }
        Self::of_points(&vertices)
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.planes.iter().all(|(n, c)| n.dot(x) <= c + tol)
    }

    /// Largest `r` with `origin + r u` in the hull.
    pub fn ray_exit(&self, origin: &Point, u: &Point) -> f64 {
        self.planes
            .iter()
            .filter_map(|(n, c)| {
                let nu = n.dot(u);
                (nu > 0.0).then(|| (c - n.dot(origin)) / nu)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn support(&self, v: &Point) -> f64 {
        self.vertices.iter().map(|x| x.dot(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Euclidean distance from `x` to the hull (0 inside).
    pub fn distance(&self, x: &Point) -> f64 {
        if self.contains(x, 0.0) {
            return 0.0;
        }
        match self.body.shape() {
            Shape::Polytope(Polytope::Polygon(poly)) => {
                let p = Vector2::new(x[0], x[1]);
                (0..poly.len())
                    .map(|i| point_segment_distance(&p, &poly[i], &poly[(i + 1) % poly.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
            Shape::Polytope(Polytope::Polyhedron(h)) => {
                let p = Vector3::new(x[0], x[1], x[2]);
                h.triangles
                    .iter()
                    .map(|t| point_triangle_distance(&p, &h.vertices[t[0]], &h.vertices[t[1]], &h.vertices[t[2]]))
                    .fold(f64::INFINITY, f64::min)
            }
            _ => unreachable!("hulls are polytopes"),
        }
    }
}

fn point_segment_distance(p: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Closest-point distance to a triangle (Ericson, Real-Time Collision
/// Detection, 5.1.5).
fn point_triangle_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (p - (a + ab * v)).norm();
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (p - (a + ac * w)).norm();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * w)).norm();
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (p - (a + ab * v + ac * w)).norm()
}

/// Two-sided description of a convex body sampled on a direction grid.
#[derive(Debug, Clone)]
pub struct BodyApproximation {
    pub kind: ApproxKind,
    /// `delta` for floating bodies, `p` for centroid bodies.
    pub param: f64,
    pub weight: String,
    pub directions: Vec<Point>,
    pub support_values: Vec<f64>,
    pub boundary_points: Vec<Point>,
    /// Hull of the boundary points (n = 2, 3).
    pub inner: Option<Hull>,
    /// Intersection of the support halfspaces (n = 2, 3).
    pub outer: Option<Hull>,
    /// Hausdorff distance between inner hull and outer intersection.
    pub hausdorff: f64,
    /// Bound on the radial gap `r_hi - r_lo` along any ray from the inner
    /// hull's centroid.
    pub gap_estimate: f64,
}

impl BodyApproximation {
    fn assemble(
        kind: ApproxKind,
        param: f64,
        weight: String,
        directions: Vec<Point>,
        support_values: Vec<f64>,
        boundary_points: Vec<Point>,
        box_radius: f64,
    ) -> Result<Self> {
        let n = directions.first().map_or(0, |d| d.len());
        let (inner, outer, hausdorff, gap_estimate) = if n == 2 || n == 3 {
            let inner = Hull::of_points(&boundary_points)?;
            let (outer, hausdorff) = match planar_outer(&directions, &support_values, &boundary_points) {
                Some(fast) => fast,
                None => {
                    let outer = Hull::of_halfspaces(&directions, &support_values, box_radius)?;
                    let hausdorff = outer
                        .vertices
                        .par_iter()
                        .map(|v| inner.distance(v))
                        .reduce(|| 0.0, f64::max);
                    (outer, hausdorff)
                }
            };
            let c = boundary_points.iter().fold(DVector::zeros(n), |a, p| a + p) / boundary_points.len() as f64;
            let r_in = inner
                .planes
                .iter()
                .map(|(nv, off)| off - nv.dot(&c))
                .fold(f64::INFINITY, f64::min);
            let r_max = outer.vertices.iter().map(|v| (v - &c).norm()).fold(0.0, f64::max);
            let gap = if r_in > 0.0 { hausdorff * r_max / r_in } else { f64::INFINITY };
            (Some(inner), Some(outer), hausdorff, gap)
        } else {
            (None, None, f64::INFINITY, f64::INFINITY)
        };
        Ok(Self {
            kind,
            param,
            weight,
            directions,
            support_values,
            boundary_points,
            inner,
            outer,
            hausdorff,
            gap_estimate,
        })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// `[|inner|, |outer|]`.
    pub fn volume_bracket(&self) -> Option<(f64, f64)> {
        Some((self.inner.as_ref()?.volume, self.outer.as_ref()?.volume))
    }
}

/// Planar outer polygon from consecutive support lines in angular order,
/// valid because every line touches the body at its boundary point. The
/// distance of each outer vertex to the chord between the neighbouring
/// boundary points bounds its distance to the inner hull. Returns `None`
/// when the local consistency checks fail.
fn planar_outer(dirs: &[Point], h: &[f64], x: &[Point]) -> Option<(Hull, f64)> {
    if dirs.first()?.len() != 2 || dirs.len() < 3 {
        return None;
    }
    let mut order: Vec<usize> = (0..dirs.len()).collect();
    let ang = |i: usize| dirs[i][1].atan2(dirs[i][0]);
    order.sort_by(|&a, &b| ang(a).total_cmp(&ang(b)));
    let k = order.len();
    let scale = x.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let mut verts = Vec::with_capacity(k);
    let mut haus: f64 = 0.0;
    for j in 0..k {
        let (a, b) = (order[j], order[(j + 1) % k]);
        let gap = (ang(b) - ang(a)).rem_euclid(2.0 * std::f64::consts::PI);
        if gap >= std::f64::consts::PI - 1e-9 {
            return None;
        }
        let (t1, t2) = (&dirs[a], &dirs[b]);
        let det = t1[0] * t2[1] - t1[1] * t2[0];
        let v = if det.abs() < 1e-15 {
            (&x[a] + &x[b]) * 0.5
        } else {
            DVector::from_vec(vec![(h[a] * t2[1] - h[b] * t1[1]) / det, (t1[0] * h[b] - t2[0] * h[a]) / det])
        };
        for &c in &[order[(j + k - 1) % k], order[(j + 2) % k]] {
            if dirs[c].dot(&v) > h[c] + tol {
                return None;
            }
        }
        let p = Vector2::new(v[0], v[1]);
        haus = haus.max(point_segment_distance(&p, &Vector2::new(x[a][0], x[a][1]), &Vector2::new(x[b][0], x[b][1])));
        verts.push(v);
    }
    Some((Hull::of_points(&verts).ok()?, haus))
}

fn box_radius(body: &BodyHandle) -> f64 {
    4.0 * (body.diameter() + body.barycenter().norm())
}

fn evaluate_ulam(wb: &WeightedBody, dirs: &[Point], delta: f64) -> Result<Vec<(f64, Point)>> {
    dirs.par_iter()
        .map(|d| ulam_support(wb, &Direction::new(d.clone())?, delta))
        .collect()
}

/// `M_delta(K, phi)` sampled on an antipodally closed grid of `m`
/// directions.
pub fn build_ulam_body(wb: &WeightedBody, delta: f64, m: usize) -> Result<BodyApproximation> {
    let n = wb.dim();
    if m < 2 * n + 2 {
        return Err(Error::range("direction count", m as f64, &format!("[{}, inf)", 2 * n + 2)));
    }
    wb.check_delta(delta)?;
    let dirs = DirectionGrid::new(n, m).into_directions();
    ulam_from_directions(wb, delta, dirs)
}

pub fn ulam_from_directions(wb: &WeightedBody, delta: f64, dirs: Vec<Point>) -> Result<BodyApproximation> {
    let vals = evaluate_ulam(wb, &dirs, delta)?;
    let (h, x): (Vec<f64>, Vec<Point>) = vals.into_iter().unzip();
    BodyApproximation::assemble(
        ApproxKind::Ulam,
        delta,
        wb.weight.label(),
        dirs,
        h,
        x,
        box_radius(&wb.body),
    )
}

/// Planar `M_delta` with adaptive direction refinement: the angular interval
/// whose gap triangle (between the chord of two consecutive boundary
/// points and the intersection of their support lines) is largest is split
/// until the total gap area is at most `gap_tol` or `max_dirs` is reached.
pub fn build_ulam_body_adaptive(
    wb: &WeightedBody,
    delta: f64,
    m0: usize,
    gap_tol: f64,
    max_dirs: usize,
) -> Result<BodyApproximation> {
    if wb.dim() != 2 {
        return Err(Error::Unsupported("adaptive refinement is planar only".into()));
    }
    wb.check_delta(delta)?;
    let m0 = m0.max(8);
    let mut angles: Vec<f64> = (0..m0).map(|j| 2.0 * std::f64::consts::PI * j as f64 / m0 as f64).collect();
    let dir = |a: f64| DVector::from_vec(vec![a.cos(), a.sin()]);
    let mut vals = evaluate_ulam(wb, &angles.iter().map(|&a| dir(a)).collect::<Vec<_>>(), delta)?;
    loop {
        let k = angles.len();
        let gaps: Vec<f64> = (0..k)
            .map(|i| {
                let j = (i + 1) % k;
                gap_triangle(&dir(angles[i]), vals[i].0, &vals[i].1, &dir(angles[j]), vals[j].0, &vals[j].1)
            })
            .collect();
        let total: f64 = gaps.iter().sum();
        if total <= gap_tol || k >= max_dirs {
            break;
        }
        let cut = total / (2.0 * k as f64);
        let mut split: Vec<usize> = (0..k).filter(|&i| gaps[i] > cut).collect();
        split.truncate(max_dirs - k);
        if split.is_empty() {
            break;
        }
        let new_angles: Vec<f64> = split
            .iter()
            .map(|&i| {
                let a = angles[i];
                let b = if i + 1 == k { angles[0] + 2.0 * std::f64::consts::PI } else { angles[i + 1] };
                0.5 * (a + b)
            })
            .collect();
        let new_vals = evaluate_ulam(wb, &new_angles.iter().map(|&a| dir(a)).collect::<Vec<_>>(), delta)?;
        let mut merged: Vec<(f64, (f64, Point))> = angles.into_iter().zip(vals).collect();
        merged.extend(new_angles.into_iter().zip(new_vals));
        merged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        (angles, vals) = merged.into_iter().unzip();
    }
    let dirs: Vec<Point> = angles.iter().map(|&a| dir(a)).collect();
    let (h, x): (Vec<f64>, Vec<Point>) = vals.into_iter().unzip();
    BodyApproximation::assemble(ApproxKind::Ulam, delta, wb.weight.label(), dirs, h, x, box_radius(&wb.body))
}

fn gap_triangle(t1: &Point, h1: f64, x1: &Point, t2: &Point, h2: f64, x2: &Point) -> f64 {
    let det = t1[0] * t2[1] - t1[1] * t2[0];
    if det.abs() < 1e-300 {
        return 0.0;
    }
    let v = Vector2::new((h1 * t2[1] - h2 * t1[1]) / det, (t1[0] * h2 - t2[0] * h1) / det);
    let a = Vector2::new(x1[0], x1[1]);
    let b = Vector2::new(x2[0], x2[1]);
    0.5 * ((b - a).perp(&(v - a))).abs()
}

/// Weighted floating body `F_delta(K, phi)` on an antipodally closed grid.
/// Boundary points are the weighted barycenters of the cutting sections
/// (the touching points when the floating body is Dupin's).
pub fn build_floating_body(wb: &WeightedBody, delta: f64, m: usize) -> Result<BodyApproximation> {
    let n = wb.dim();
    if !(delta > 0.0 && delta < 0.5 * wb.total) {
        return Err(Error::range("delta", delta, &format!("(0, {})", 0.5 * wb.total)));
    }
    let dirs = DirectionGrid::new(n, m.max(2 * n + 2)).into_directions();
    let res: Vec<(f64, Point)> = dirs
        .par_iter()
        .map(|d| {
            let theta = Direction::new(d.clone())?;
            let h = wb.cut_height(&theta, delta)?;
            Ok((h, section_barycenter(wb, &theta, h)))
        })
        .collect::<Result<_>>()?;
    // emptiness certificate: an antipodal pair with d(theta) + d(-theta) < 0
    let grid = DirectionGrid::new(n, m.max(2 * n + 2));
    for i in 0..res.len() {
        if let Some(j) = grid.antipode(i) {
            if res[i].0 + res[j].0 < 0.0 {
                return Err(Error::EmptyIntersection(format!(
                    "d(theta) + d(-theta) = {:e} < 0 for theta = {:?}",
                    res[i].0 + res[j].0,
                    dirs[i].as_slice()
                )));
            }
        }
    }
    let kind = if wb.weight.constant_value().is_some() {
        ApproxKind::ConvexFloating
    } else {
        ApproxKind::Floating
    };
    let (h, x): (Vec<f64>, Vec<Point>) = res.into_iter().unzip();
    BodyApproximation::assemble(kind, delta, wb.weight.label(), dirs, h, x, box_radius(&wb.body))
}

fn section_barycenter(wb: &WeightedBody, theta: &Point, t: f64) -> Point {
    if let Some(_) = wb.weight.constant_value() {
        let s = wb.body.section_moments(theta, t);
        if s.area > 0.0 {
            return s.first / s.area;
        }
        return wb.body.support_point(theta);
    }
    let mut nodes = Vec::new();
    wb.body.section_nodes(theta, t, wb.opts.section_order, &mut nodes);
    let mass = section_mass(&wb.body, &wb.weight, theta, t, &wb.opts);
    let m1 = nodes
        .iter()
        .fold(DVector::zeros(wb.dim()), |acc, (x, w)| acc + x * (w * wb.weight.value(x)));
    if mass > 0.0 {
        m1 / mass
    } else {
        wb.body.support_point(theta)
    }
}

/// `(int_K |<x,theta>|^p dx, int_K |<x,theta>|^{p-1} sgn<x,theta> x dx)`.
fn zp_moments(body: &BodyHandle, p: f64, theta: &Point) -> (f64, Point) {
    let n = body.dim();
    let top = body.support(theta);
    let bottom = -body.support(&-theta);
    let mut cuts: Vec<f64> = vec![bottom, top];
    if bottom < 0.0 && top > 0.0 {
        cuts.push(0.0);
    }
    cuts.extend(body.vertex_heights(theta).into_iter().filter(|&t| t > bottom && t < top));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * body.diameter());
    let scale = body.volume() * body.diameter().powf(p);
    let opts = AdaptiveOptions {
        abs_tol: 1e-14 * scale,
        rel_tol: 1e-12,
        max_intervals: 500,
    };
    // sections of a polytope are polynomial between vertex heights, so a
    // fixed rule per piece suffices there
    let gl = GaussLegendre::new(32);
    let mut total = 0.0;
    let mut grad = DVector::zeros(n);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let f = |u: f64, out: &mut [f64]| {
            let (t, dt) = smoothstep_map(a, b, u);
            let s = body.section_moments(theta, t);
            let at = t.abs();
            out[0] = at.powf(p) * s.area * dt;
            let g = if at > 0.0 { at.powf(p - 1.0) * t.signum() } else { 0.0 };
            for k in 0..n {
                out[k + 1] = g * s.first[k] * dt;
            }
        };
        let value = if body.is_polytope() {
            let mut acc = vec![0.0; n + 1];
            let mut out = vec![0.0; n + 1];
            for (u, wt) in gl.on_interval(0.0, 1.0) {
                f(u, &mut out);
                for (a, o) in acc.iter_mut().zip(&out) {
                    *a += wt * o;
                }
            }
            acc
        } else {
            integrate_adaptive(f, 0.0, 1.0, &[], n + 1, 0, opts).value
        };
        total += value[0];
        for k in 0..n {
            grad[k] += value[k + 1];
        }
    }
    (total, grad)
}

/// `h_{Z_p(K)}(theta) = (int_K |<x, theta>|^p dx)^{1/p}` by slab integration
/// with exact sections. Volume 1 gives the usual normalization.
pub fn zp_support(body: &BodyHandle, p: f64, theta: &Direction) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::range("p", p, "[1, inf)"));
    }
    Ok(zp_moments(body, p, theta).0.powf(1.0 / p))
}

/// `Z_p(K)` on an antipodally closed grid; boundary points are the exact
/// support points `grad h_{Z_p}(theta)`.
pub fn build_zp_body(body: &BodyHandle, p: f64, m: usize) -> Result<BodyApproximation> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::range("p", p, "[1, inf)"));
    }
    let n = body.dim();
    let dirs = DirectionGrid::new(n, m.max(2 * n + 2)).into_directions();
    let res: Vec<(f64, Point)> = dirs
        .par_iter()
        .map(|d| {
            let (mp, g) = zp_moments(body, p, d);
            let h = mp.powf(1.0 / p);
            (h, g * h.powf(1.0 - p))
        })
        .collect();
    let (h, x): (Vec<f64>, Vec<Point>) = res.into_iter().unzip();
    let r = 4.0 * h.iter().copied().fold(0.0, f64::max) + body.diameter();
    BodyApproximation::assemble(ApproxKind::CentroidZp, p, "uniform".into(), dirs, h, x, r)
}

/// Outcome of an inclusion or identity check on a direction grid.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub holds: bool,
    /// Smallest slack of the checked inequalities (negative = violation),
    /// or largest deviation for identities.
    pub worst: f64,
    pub tolerance: f64,
    /// Grid indices of the worst case when the check fails.
    pub witness: Option<(usize, Option<usize>)>,
    pub details: Vec<(String, f64)>,
}

/// `F_{(1-1/e) delta} ⊆ M_delta ⊆ F_{delta/e}` for log-concave
/// weights, checked through support values on the grid:
/// (a) `d(theta, (1-1/e) delta) <= h_{M_delta}(theta)`,
/// (b) `<x(theta, delta), beta> <= d(beta, delta/e)` for all grid `beta`.
pub fn sandwich_check(wb: &WeightedBody, delta: f64, m: usize) -> Result<CheckReport> {
    if !wb.weight.is_log_concave() {
        return Err(Error::Unsupported("the sandwich needs a log-concave weight".into()));
    }
    wb.check_delta(delta)?;
    let n = wb.dim();
    let dirs = DirectionGrid::new(n, m.max(2 * n + 2)).into_directions();
    let rows: Vec<(f64, Point, f64, f64)> = dirs
        .par_iter()
        .map(|d| {
            let theta = Direction::new(d.clone())?;
            let (h, x) = ulam_support(wb, &theta, delta)?;
            let left = wb.cut_height(&theta, (1.0 - 1.0 / E) * delta)?;
            let right = wb.cut_height(&theta, delta / E)?;
            Ok((h, x, left, right))
        })
        .collect::<Result<_>>()?;
    let tol = 1e-8 * wb.body.diameter();
    let mut worst_a = (f64::INFINITY, 0);
    for (i, r) in rows.iter().enumerate() {
        let slack = r.0 - r.2;
        if slack < worst_a.0 {
            worst_a = (slack, i);
        }
    }
    let worst_b = rows
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let mut w = (f64::INFINITY, i, 0);
            for (j, (beta, other)) in dirs.iter().zip(&rows).enumerate() {
                let slack = other.3 - r.1.dot(beta);
                if slack < w.0 {
                    w = (slack, i, j);
                }
            }
            w
        })
        .reduce(|| (f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 { b } else { a });
    let holds = worst_a.0 >= -tol && worst_b.0 >= -tol;
    let (worst, witness) = if worst_a.0 <= worst_b.0 {
        (worst_a.0, Some((worst_a.1, None)))
    } else {
        (worst_b.0, Some((worst_b.1, Some(worst_b.2))))
    };
    Ok(CheckReport {
        name: "sandwich",
        holds,
        worst,
        tolerance: tol,
        witness: witness.filter(|_| !holds),
        details: vec![("left_margin".into(), worst_a.0), ("right_margin".into(), worst_b.0)],
    })
}

/// `K_delta ⊆ M_delta(K) ⊆ e Z_{log(1/delta)}(K)` for centrally symmetric
/// bodies of volume 1, checked as
/// `d(theta, delta) <= h_{M_delta}(theta) <= e h_{Z_p}(theta)`.
pub fn zp_sandwich_check(body: &BodyHandle, delta: f64, m: usize) -> Result<CheckReport> {
    if (body.volume() - 1.0).abs() > 1e-9 {
        return Err(Error::range("volume", body.volume(), "1 (normalize the body first)"));
    }
    if !(delta > 0.0 && delta < 1.0 / E) {
        return Err(Error::range("delta", delta, "(0, 1/e)"));
    }
    let n = body.dim();
    let grid = DirectionGrid::new(n, m.max(2 * n + 2));
    let tol = 1e-8 * body.diameter();
    for (i, d) in grid.directions().iter().enumerate() {
        let j = grid.antipode(i).unwrap();
        if (body.support(d) - body.support(&grid.directions()[j])).abs() > tol {
            return Err(Error::InvalidBody("body is not centrally symmetric about the origin".into()));
        }
    }
    let p = (1.0 / delta).ln().max(1.0);
    let wb = WeightedBody::uniform(body.clone());
    let rows: Vec<(f64, f64, f64)> = grid
        .directions()
        .par_iter()
        .map(|d| {
            let theta = Direction::new(d.clone())?;
            let k = wb.cut_height(&theta, delta)?;
            let (h, _) = ulam_support(&wb, &theta, delta)?;
            let z = zp_support(body, p, &theta)?;
            Ok((k, h, z))
        })
        .collect::<Result<_>>()?;
    let mut worst = (f64::INFINITY, 0);
    let (mut left, mut right) = (f64::INFINITY, f64::INFINITY);
    for (i, (k, h, z)) in rows.iter().enumerate() {
        let a = h - k;
        let b = E * z - h;
        left = left.min(a);
        right = right.min(b);
        if a.min(b) < worst.0 {
            worst = (a.min(b), i);
        }
    }
    Ok(CheckReport {
        name: "zp-sandwich",
        holds: worst.0 >= -tol,
        worst: worst.0,
        tolerance: tol,
        witness: (worst.0 < -tol).then_some((worst.1, None)),
        details: vec![("left_margin".into(), left), ("right_margin".into(), right), ("p".into(), p)],
    })
}

/// `h_{M_{1-delta}}(theta) = delta/(1-delta) h_{M_delta}(-theta)` for a
/// volume-1 body with barycenter at the origin and constant weight 1; also
/// the central symmetry of `M_{1/2}` and the identity
/// `delta x(theta, delta) + (1-delta) x(-theta, 1-delta) = 0`.
pub fn symmetry_check(body: &BodyHandle, delta: f64, m: usize) -> Result<CheckReport> {
    if (body.volume() - 1.0).abs() > 1e-9 {
        return Err(Error::range("volume", body.volume(), "1 (normalize the body first)"));
    }
    if body.barycenter().norm() > 1e-9 * body.diameter() {
        return Err(Error::range(
            "barycenter norm",
            body.barycenter().norm(),
            "0 (normalize the body first)",
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::range("delta", delta, "(0, 1)"));
    }
    let n = body.dim();
    let wb = WeightedBody::uniform(body.clone());
    let grid = DirectionGrid::new(n, m.max(2 * n + 2));
    let dirs = grid.directions();
    let rows: Vec<((f64, Point), (f64, Point), (f64, Point))> = dirs
        .par_iter()
        .map(|d| {
            let theta = Direction::new(d.clone())?;
            Ok((
                ulam_support(&wb, &theta, delta)?,
                ulam_support(&wb, &theta, 1.0 - delta)?,
                ulam_support(&wb, &theta, 0.5)?,
            ))
        })
        .collect::<Result<_>>()?;
    let tol = 1e-8;
    let ratio = delta / (1.0 - delta);
    let (mut ident, mut half, mut arch) = ((0.0f64, 0usize), (0.0f64, 0usize), (0.0f64, 0usize));
    for i in 0..dirs.len() {
        let j = grid.antipode(i).unwrap();
        let dev = (rows[i].1 .0 - ratio * rows[j].0 .0).abs();
        if dev > ident.0 {
            ident = (dev, i);
        }
        let dev = (rows[i].2 .0 - rows[j].2 .0).abs();
        if dev > half.0 {
            half = (dev, i);
        }
        let dev = (&rows[i].0 .1 * delta + &rows[j].1 .1 * (1.0 - delta)).norm();
        if dev > arch.0 {
            arch = (dev, i);
        }
    }
    let worst = [ident, half, arch].into_iter().fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    Ok(CheckReport {
        name: "symmetry",
        holds: worst.0 <= tol,
        worst: worst.0,
        tolerance: tol,
        witness: (worst.0 > tol).then_some((worst.1, None)),
        details: vec![
            ("identity_deviation".into(), ident.0),
            ("half_symmetry_deviation".into(), half.0),
            ("archimedes_deviation".into(), arch.0),
        ],
    })
}

/// Radial bounds `r_lo <= rho_L(u) <= r_hi` from the origin.
pub trait RadialBounds: Sync {
    fn dim(&self) -> usize;
    fn radial_bounds(&self, u: &Point) -> Result<(f64, f64)>;
}

impl RadialBounds for BodyHandle {
    fn dim(&self) -> usize {
        BodyHandle::dim(self)
    }

    fn radial_bounds(&self, u: &Point) -> Result<(f64, f64)> {
        let o = DVector::zeros(BodyHandle::dim(self));
        if !self.contains(&o) {
            return Err(Error::OriginNotInterior("radial function needs 0 in the body".into()));
        }
        let r = self.ray_exit(&o, u);
        Ok((r, r))
    }
}

impl RadialBounds for BodyApproximation {
    fn dim(&self) -> usize {
        self.directions.first().map_or(0, |d| d.len())
    }

    fn radial_bounds(&self, u: &Point) -> Result<(f64, f64)> {
        radial_boundary(self, u)
    }
}

/// `(r_lo, r_hi)` along the ray `{t u}`: from the inner hull and from the
/// outer halfspaces.
pub fn radial_boundary(approx: &BodyApproximation, u: &Point) -> Result<(f64, f64)> {
    let inner = approx
        .inner
        .as_ref()
        .ok_or_else(|| Error::Unsupported("radial queries need n = 2 or 3".into()))?;
    if inner.planes.iter().any(|(_, c)| *c <= 0.0) {
        return Err(Error::OriginNotInterior("origin is not interior to the inner hull".into()));
    }
    let r_lo = inner.ray_exit(&DVector::zeros(u.len()), u);
    let r_hi = approx
        .directions
        .iter()
        .zip(&approx.support_values)
        .filter_map(|(t, h)| {
            let tu = t.dot(u);
            (tu > 0.0).then(|| h / tu)
        })
        .fold(f64::INFINITY, f64::min);
    Ok((r_lo, r_hi.max(r_lo)))
}

/// `|K| - |L| = (1/n) int_{dK} <x, N(x)> (1 - (rho_L(x)/|x|)^n) dmu(x)`
/// bracketed with the radial bounds of `L`. The quadrature error is
/// estimated by halving the resolution and added to both sides.
pub fn volume_difference(k: &BodyHandle, l: &impl RadialBounds, resolution: usize) -> Result<(f64, f64)> {
    let n = k.dim();
    if l.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: l.dim() });
    }
    let o = DVector::zeros(n);
    if !k.contains(&o) || k.ray_exit(&o, &k.support_point(&Direction::axis(n, 0))) <= 0.0 {
        return Err(Error::OriginNotInterior("volume difference needs 0 in int K".into()));
    }
    let eval = |res: usize| -> Result<(f64, f64)> {
        let samples = k.boundary_quadrature(res);
        let parts: Vec<(f64, f64)> = samples
            .par_iter()
            .map(|s| {
                let len = s.point.norm();
                let u = &s.point / len;
                let (lo, hi) = l.radial_bounds(&u)?;
                if lo > len * (1.0 + 1e-9) {
                    return Err(Error::InvalidBody(format!(
                        "L is not contained in K along {:?}",
                        u.as_slice()
                    )));
                }
                let f = |r: f64| s.weight * s.support_number * (1.0 - (r.min(len) / len).powi(n as i32)) / n as f64;
                Ok((f(hi), f(lo)))
            })
            .collect::<Result<_>>()?;
        Ok(parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1)))
    };
    let fine = eval(resolution)?;
    let coarse = eval((resolution / 2).max(8))?;
    let err = (fine.0 - coarse.0).abs().max((fine.1 - coarse.1).abs());
    Ok((fine.0 - err, fine.1 + err))
}
