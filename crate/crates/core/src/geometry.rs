//! Exact low-dimensional polytope machinery: planar and spatial convex hulls,
//! halfspace clipping, hyperplane sections, and polynomial moments.

use std::collections::HashSet;

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};

/// Oriented hyperplane `{x : <normal, x> = offset}` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane<V> {
    pub normal: V,
    pub offset: f64,
}

#[inline]
fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Andrew's monotone chain. Returns the strictly convex hull in
/// counter-clockwise order (collinear points dropped).
pub fn convex_hull_2d(points: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let mut pts: Vec<Vector2<f64>> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    let scale = pts
        .iter()
        .map(|p| p.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    // Merge near-duplicates first: interleaved copies of one point would
    // otherwise make the collinearity test drop a genuine vertex.
    let merge = 1e-12 * scale;
    let mut kept: Vec<Vector2<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        let dup = kept
            .iter()
            .rev()
            .take_while(|q| p.x - q.x <= merge)
            .any(|q| (p - *q).norm() <= merge);
        if !dup {
            kept.push(p);
        }
    }
    let pts = kept;
    if pts.len() < 3 {
        return pts;
    }
    // Exact turns in the chain: with a tolerance, sub-ulp noise in the sort
    // order can pop a genuine vertex instead of the collinear point next to
    // it. Near-collinear vertices are removed afterwards against their
    // actual hull neighbours.
    let mut lower: Vec<Vector2<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && cross2(&(lower[lower.len() - 1] - lower[lower.len() - 2]), &(p - lower[lower.len() - 2])) <= 0.0
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Vector2<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && cross2(&(upper[upper.len() - 1] - upper[upper.len() - 2]), &(p - upper[upper.len() - 2])) <= 0.0
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    drop_flat_vertices(lower, 1e-13 * scale)
}

/// Removes vertices within `tol` of the chord between their neighbours.
fn drop_flat_vertices(mut hull: Vec<Vector2<f64>>, tol: f64) -> Vec<Vector2<f64>> {
    let mut i = 0;
    while hull.len() > 3 && i < hull.len() {
        let k = hull.len();
        let a = hull[(i + k - 1) % k];
        let b = hull[i];
        let c = hull[(i + 1) % k];
        let chord = c - a;
        let len = chord.norm();
        if len > 0.0 && cross2(&chord, &(b - a)).abs() <= tol * len {
            hull.remove(i);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    hull
}

/// Signed area and centroid of a simple polygon (CCW positive).
pub fn polygon_area_centroid(poly: &[Vector2<f64>]) -> (f64, Vector2<f64>) {
    if poly.len() < 3 {
        return (0.0, poly.first().copied().unwrap_or_else(Vector2::zeros));
    }
    let o = poly[0];
    let mut area = 0.0;
    let mut c = Vector2::zeros();
    for i in 1..poly.len() - 1 {
        let a = poly[i] - o;
        let b = poly[i + 1] - o;
        let w = 0.5 * cross2(&a, &b);
        area += w;
        c += (a + b) * (w / 3.0);
    }
    if area.abs() > 0.0 {
        (area, o + c / area)
    } else {
        (0.0, o)
    }
}

/// Diameter of a convex counter-clockwise polygon by rotating calipers.
pub fn polygon_diameter(poly: &[Vector2<f64>]) -> f64 {
    let k = poly.len();
    if k < 3 {
        return if k == 2 { (poly[1] - poly[0]).norm() } else { 0.0 };
    }
    let area2 = |a: &Vector2<f64>, b: &Vector2<f64>, c: &Vector2<f64>| (b - a).perp(&(c - a)).abs();
    let mut best: f64 = 0.0;
    let mut j = 1;
    for i in 0..k {
        let ni = (i + 1) % k;
        while area2(&poly[i], &poly[ni], &poly[(j + 1) % k]) > area2(&poly[i], &poly[ni], &poly[j]) {
            j = (j + 1) % k;
        }
        best = best.max((poly[i] - poly[j]).norm()).max((poly[ni] - poly[j]).norm());
    }
    best
}

/// Outward edge planes of a CCW convex polygon.
pub fn polygon_planes(poly: &[Vector2<f64>]) -> Vec<Plane<Vector2<f64>>> {
    let k = poly.len();
    (0..k)
        .map(|i| {
            let p = poly[i];
            let q = poly[(i + 1) % k];
            let e = q - p;
            let n = Vector2::new(e.y, -e.x).normalize();
            Plane {
                normal: n,
                offset: n.dot(&p),
            }
        })
        .collect()
}

/// Keeps the part of a convex polygon where `<x, dir> >= d`.
pub fn clip_polygon(poly: &[Vector2<f64>], dir: &Vector2<f64>, d: f64) -> Vec<Vector2<f64>> {
    let k = poly.len();
    let mut out = Vec::with_capacity(k + 1);
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        let sp = p.dot(dir) - d;
        let sq = q.dot(dir) - d;
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Intersection of a convex polygon with the line `<x, dir> = t`, as a
/// segment `(a, b)` ordered along the left-turned direction.
pub fn polygon_section(poly: &[Vector2<f64>], dir: &Vector2<f64>, t: f64) -> Option<(Vector2<f64>, Vector2<f64>)> {
    let k = poly.len();
    let tangent = Vector2::new(-dir.y, dir.x);
    let mut lo: Option<Vector2<f64>> = None;
    let mut hi: Option<Vector2<f64>> = None;
    let mut push = |x: Vector2<f64>| {
        let s = x.dot(&tangent);
        if lo.is_none_or(|l| s < l.dot(&tangent)) {
            lo = Some(x);
        }
        if hi.is_none_or(|h| s > h.dot(&tangent)) {
            hi = Some(x);
        }
    };
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        let sp = p.dot(dir) - t;
        let sq = q.dot(dir) - t;
        if sp == 0.0 {
            push(p);
        }
        if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
            let s = sp / (sp - sq);
            push(p + (q - p) * s);
        }
    }
    match (lo, hi) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    }
}

/// A convex polyhedron given by its vertex set and outward triangulated
/// boundary.
#[derive(Debug, Clone)]
pub struct Polyhedron {
    pub vertices: Vec<Vector3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub planes: Vec<Plane<Vector3<f64>>>,
}

impl Polyhedron {
    /// Boundary as a list of outward-oriented polygons.
    pub fn faces(&self) -> Vec<Vec<Vector3<f64>>> {
        self.triangles
            .iter()
            .map(|t| t.iter().map(|&i| self.vertices[i]).collect())
            .collect()
    }

    /// Section by `<x, n> = t`, ordered counter-clockwise about `n`. Same
    /// as [`faces_section`] on [`Self::faces`] without building the faces.
    pub fn section(&self, n: &Vector3<f64>, t: f64) -> Vec<Vector3<f64>> {
        let heights: Vec<f64> = self.vertices.iter().map(|v| v.dot(n) - t).collect();
        let mut pts = Vec::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                let (sp, sq) = (heights[i], heights[j]);
                let (p, q) = (self.vertices[i], self.vertices[j]);
                if sp == 0.0 {
                    pts.push(p);
                }
                if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
                    pts.push(p + (q - p) * (sp / (sp - sq)));
                }
            }
        }
        order_in_plane(&pts, n)
    }

    /// Planes with coplanar facets merged.
    pub fn distinct_planes(&self) -> Vec<Plane<Vector3<f64>>> {
        let scale = self.vertices.iter().map(|v| v.norm()).fold(1e-300, f64::max);
        let mut out: Vec<Plane<Vector3<f64>>> = Vec::new();
        for p in &self.planes {
            if !out
                .iter()
                .any(|q| (q.normal - p.normal).norm() < 1e-9 && (q.offset - p.offset).abs() < 1e-9 * scale)
            {
                out.push(*p);
            }
        }
        out
    }
}

fn plane_through(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> Plane<Vector3<f64>> {
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    let n = if len > 0.0 { n / len } else { n };
    Plane {
        normal: n,
        offset: n.dot(a),
    }
}

/// Incremental 3D convex hull. Points within `1e-12 * diameter` of an
/// existing facet are treated as interior.
pub fn convex_hull_3d(points: &[Vector3<f64>]) -> Result<Polyhedron> {
    if points.len() < 4 {
        return Err(Error::Degenerate(format!(
            "need at least 4 points in 3D, got {}",
            points.len()
        )));
    }
    let i0 = (0..points.len())
        .min_by(|&a, &b| points[a].x.partial_cmp(&points[b].x).unwrap())
        .unwrap();
    let far = |f: &dyn Fn(&Vector3<f64>) -> f64| {
        (0..points.len())
            .max_by(|&a, &b| f(&points[a]).partial_cmp(&f(&points[b])).unwrap())
            .unwrap()
    };
    let i1 = far(&|p| (p - points[i0]).norm());
    let diam = (points[i1] - points[i0]).norm();
    if diam <= 0.0 {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let eps = 1e-12 * diam;
    let line = (points[i1] - points[i0]) / diam;
    let i2 = far(&|p| {
        let v = p - points[i0];
        (v - line * v.dot(&line)).norm()
    });
    let v2 = points[i2] - points[i0];
    if (v2 - line * v2.dot(&line)).norm() <= 1e-10 * diam {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let base = plane_through(&points[i0], &points[i1], &points[i2]);
    let i3 = far(&|p| (base.normal.dot(p) - base.offset).abs());
    if (base.normal.dot(&points[i3]) - base.offset).abs() <= 1e-10 * diam {
        return Err(Error::Degenerate("points are coplanar (affinely dependent)".into()));
    }

    struct Tri {
        v: [usize; 3],
        plane: Plane<Vector3<f64>>,
        alive: bool,
    }
    let make = |v: [usize; 3]| Tri {
        v,
        plane: plane_through(&points[v[0]], &points[v[1]], &points[v[2]]),
        alive: true,
    };
    let inside = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
    let mut tris: Vec<Tri> = Vec::new();
    for v in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut t = make(v);
        if t.plane.normal.dot(&inside) > t.plane.offset {
            t = make([v[0], v[2], v[1]]);
        }
        tris.push(t);
    }

    let seed = [i0, i1, i2, i3];
    for (pi, p) in points.iter().enumerate() {
        if seed.contains(&pi) {
            continue;
        }
        let visible: Vec<usize> = tris
            .iter()
            .enumerate()
            .filter(|(_, t)| t.alive && t.plane.normal.dot(p) - t.plane.offset > eps)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(visible.len() * 3);
        for &f in &visible {
            let v = tris[f].v;
            edges.insert((v[0], v[1]));
            edges.insert((v[1], v[2]));
            edges.insert((v[2], v[0]));
        }
        let mut horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|(a, b)| !edges.contains(&(*b, *a)))
            .copied()
            .collect();
        horizon.sort_unstable();
        for &f in &visible {
            tris[f].alive = false;
        }
        for (a, b) in horizon {
            tris.push(make([a, b, pi]));
        }
        if tris.len() > 64 && tris.iter().filter(|t| !t.alive).count() * 2 > tris.len() {
            tris.retain(|t| t.alive);
        }
    }
    tris.retain(|t| t.alive);

    let mut remap = vec![usize::MAX; points.len()];
    let mut vertices = Vec::new();
    let mut triangles = Vec::with_capacity(tris.len());
    let mut planes = Vec::with_capacity(tris.len());
    for t in &tris {
        let mut idx = [0usize; 3];
        for (k, &v) in t.v.iter().enumerate() {
            if remap[v] == usize::MAX {
                remap[v] = vertices.len();
                vertices.push(points[v]);
            }
            idx[k] = remap[v];
        }
        triangles.push(idx);
        planes.push(t.plane);
    }
    Ok(Polyhedron {
        vertices,
        triangles,
        planes,
    })
}

/// Volume and centroid of a closed polyhedron given as outward polygons.
pub fn faces_volume_centroid(faces: &[Vec<Vector3<f64>>]) -> (f64, Vector3<f64>) {
    let Some(origin) = faces.iter().find_map(|f| f.first().copied()) else {
        return (0.0, Vector3::zeros());
    };
    let mut vol = 0.0;
    let mut c = Vector3::zeros();
    for f in faces {
        if f.len() < 3 {
            continue;
        }
        let a = f[0] - origin;
        for i in 1..f.len() - 1 {
            let b = f[i] - origin;
            let d = f[i + 1] - origin;
            let v = a.dot(&b.cross(&d)) / 6.0;
            vol += v;
            c += (a + b + d) * (v / 4.0);
        }
    }
    if vol.abs() > 0.0 {
        (vol, origin + c / vol)
    } else {
        (0.0, origin)
    }
}

/// Orthonormal basis `(u, v)` of the plane orthogonal to a unit `n`, with
/// `(u, v, n)` right-handed.
pub fn plane_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = (helper - n * n.dot(&helper)).normalize();
    let v = n.cross(&u);
    (u, v)
}

/// Orders coplanar points into a convex polygon, counter-clockwise when
/// seen from the tip of `n`.
fn order_in_plane(points: &[Vector3<f64>], n: &Vector3<f64>) -> Vec<Vector3<f64>> {
    if points.len() < 3 {
        return points.to_vec();
    }
    let (u, v) = plane_basis(n);
    let origin = points[0];
    let flat: Vec<Vector2<f64>> = points
        .iter()
        .map(|p| {
            let q = p - origin;
            Vector2::new(q.dot(&u), q.dot(&v))
        })
        .collect();
    let hull = convex_hull_2d(&flat);
    let h = n.dot(&origin);
    hull.iter()
        .map(|q| {
            let mut p = origin + u * q.x + v * q.y;
            p += n * (h - n.dot(&p));
            p
        })
        .collect()
}

/// Section of a convex polyhedron (outward polygons) by `<x, n> = t`,
/// ordered counter-clockwise about `n`.
pub fn faces_section(faces: &[Vec<Vector3<f64>>], n: &Vector3<f64>, t: f64) -> Vec<Vector3<f64>> {
    let mut pts: Vec<Vector3<f64>> = Vec::new();
    for f in faces {
        let k = f.len();
        for i in 0..k {
            let p = f[i];
            let q = f[(i + 1) % k];
            let sp = p.dot(n) - t;
            let sq = q.dot(n) - t;
            if sp == 0.0 {
                pts.push(p);
            }
            if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
                let s = sp / (sp - sq);
                pts.push(p + (q - p) * s);
            }
        }
    }
    order_in_plane(&pts, n)
}

/// Keeps `<x, n> >= d` of a convex polyhedron given by outward polygons.
pub fn clip_faces(faces: &[Vec<Vector3<f64>>], n: &Vector3<f64>, d: f64) -> Vec<Vec<Vector3<f64>>> {
    let mut out: Vec<Vec<Vector3<f64>>> = Vec::with_capacity(faces.len() + 1);
    for f in faces {
        let k = f.len();
        let mut g = Vec::with_capacity(k + 1);
        for i in 0..k {
            let p = f[i];
            let q = f[(i + 1) % k];
            let sp = p.dot(n) - d;
            let sq = q.dot(n) - d;
            if sp >= 0.0 {
                g.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let s = sp / (sp - sq);
                g.push(p + (q - p) * s);
            }
        }
        if g.len() >= 3 {
            out.push(g);
        }
    }
    if out.is_empty() {
        return out;
    }
    let mut cap = faces_section(faces, n, d);
    if cap.len() >= 3 {
        cap.reverse();
        out.push(cap);
    }
    out
}

/// Exact moments of a polygon lying in a plane of `R^3`: area, first moment,
/// and second-moment matrix `int x x^T`.
pub fn polygon3_moments(poly: &[Vector3<f64>]) -> (f64, Vector3<f64>, Matrix3<f64>) {
    let mut area = 0.0;
    let mut m1 = Vector3::zeros();
    let mut m2 = Matrix3::zeros();
    if poly.len() < 3 {
        return (area, m1, m2);
    }
    let a = poly[0];
    for i in 1..poly.len() - 1 {
        let b = poly[i];
        let c = poly[i + 1];
        let ar = 0.5 * (b - a).cross(&(c - a)).norm();
        let s = a + b + c;
        area += ar;
        m1 += s * (ar / 3.0);
        m2 += (a * a.transpose() + b * b.transpose() + c * c.transpose() + s * s.transpose()) * (ar / 12.0);
    }
    (area, m1, m2)
}

/// Exact moments of a segment in the plane: length, first moment, and
/// second-moment matrix.
pub fn segment_moments(a: &Vector2<f64>, b: &Vector2<f64>) -> (f64, Vector2<f64>, nalgebra::Matrix2<f64>) {
    let len = (b - a).norm();
    let m1 = (a + b) * (0.5 * len);
    let m2 = (a * a.transpose() + b * b.transpose()) * (len / 3.0)
        + (a * b.transpose() + b * a.transpose()) * (len / 6.0);
    (len, m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Vector3<f64>> {
        let mut v = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    v.push(Vector3::new(x, y, z));
                }
            }
        }
        v
    }

    #[test]
    fn hull_2d_keeps_vertex_behind_ulp_noise() {
        // a vertical edge whose points differ by one ulp in x
        let x0 = 0.52094860941093268;
        let x1 = 0.52094860941093279;
        let pts = vec![
            Vector2::new(0.0, 0.0),
            Vector2::new(x1, -0.09746662783831793),
            Vector2::new(x0, 0.09727358725938239),
            Vector2::new(0.22452787827090959, 0.24435542978013361),
            Vector2::new(x0, 0.56695240843267847),
        ];
        let hull = convex_hull_2d(&pts);
        assert_eq!(hull.len(), 3, "{hull:?}");
        assert!(hull.iter().any(|p| (p.y - 0.56695240843267847).abs() < 1e-15));
    }

    #[test]
    fn hull_2d_drops_interior_and_collinear() {
        let pts = vec![
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(0.5, 0.0),
            Vector2::new(1.0, 1.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(0.5, 0.5),
        ];
        let h = convex_hull_2d(&pts);
        assert_eq!(h.len(), 4);
        let (a, c) = polygon_area_centroid(&h);
        assert!((a - 1.0).abs() < 1e-15);
        assert!((c - Vector2::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn clip_square() {
        let sq = vec![
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(1.0, 1.0),
            Vector2::new(0.0, 1.0),
        ];
        let c = clip_polygon(&sq, &Vector2::new(1.0, 0.0), 0.9);
        let (a, g) = polygon_area_centroid(&c);
        assert!((a - 0.1).abs() < 1e-15);
        assert!((g - Vector2::new(0.95, 0.5)).norm() < 1e-14);
        let (p, q) = polygon_section(&sq, &Vector2::new(0.0, 1.0), 0.25).unwrap();
        assert!(((p - q).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hull_3d_cube() {
        let mut pts = cube();
        pts.push(Vector3::new(0.5, 0.5, 0.5));
        pts.push(Vector3::new(0.2, 0.3, 0.9));
        let h = convex_hull_3d(&pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.triangles.len(), 12);
        assert_eq!(h.distinct_planes().len(), 6);
        let (v, c) = faces_volume_centroid(&h.faces());
        assert!((v - 1.0).abs() < 1e-14);
        assert!((c - Vector3::new(0.5, 0.5, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn hull_3d_rejects_coplanar() {
        let pts = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
        ];
        assert!(matches!(convex_hull_3d(&pts), Err(Error::Degenerate(_))));
    }

    #[test]
    fn clip_cube_corner() {
        let h = convex_hull_3d(&cube()).unwrap();
        let n = Vector3::new(1.0, 1.0, 1.0).normalize();
        // corner tetrahedron x+y+z >= 2.5 has legs 1/2
        let d = 2.5 / 3f64.sqrt();
        let cap = clip_faces(&h.faces(), &n, d);
        let (v, c) = faces_volume_centroid(&cap);
        assert!((v - 0.125 / 6.0).abs() < 1e-14);
        let expect = Vector3::new(1.0, 1.0, 1.0) - Vector3::new(0.5, 0.5, 0.5) / 4.0;
        assert!((c - expect).norm() < 1e-13);
    }

    #[test]
    fn section_of_cube_is_unit_square() {
        let h = convex_hull_3d(&cube()).unwrap();
        let sec = faces_section(&h.faces(), &Vector3::z(), 0.3);
        let (a, m1, m2) = polygon3_moments(&sec);
        assert!((a - 1.0).abs() < 1e-14);
        assert!((m1 - Vector3::new(0.5, 0.5, 0.3)).norm() < 1e-14);
        assert!((m2[(0, 0)] - 1.0 / 3.0).abs() < 1e-14);
        assert!((m2[(0, 1)] - 0.25).abs() < 1e-14);
        assert!((m2[(2, 2)] - 0.09).abs() < 1e-14);
    }

    #[test]
    fn segment_second_moment() {
        let (l, m1, m2) = segment_moments(&Vector2::new(-1.0, 0.5), &Vector2::new(1.0, 0.5));
        assert!((l - 2.0).abs() < 1e-15);
        assert!((m1 - Vector2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((m2[(0, 0)] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m2[(1, 1)] - 0.5).abs() < 1e-15);
    }
}
