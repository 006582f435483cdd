//! Planar flotation: buoyancy centers, equilibrium directions, and the
//! roundness of Ulam floating bodies.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{BodyHandle, Direction, Point};
use crate::caps::{cap_cut, CapOptions};
use crate::error::{Error, Result};
use crate::floating::{build_ulam_body, WeightedBody};
use crate::weights::WeightFunction;

#[derive(Debug, Clone, Serialize)]
pub struct FloatState {
    pub rho: f64,
    pub up: Point,
    /// Height of the waterline along `up`.
    pub waterline: f64,
    pub submerged: f64,
    pub buoyancy: Point,
}

fn check_floating_body(body: &BodyHandle, rho: f64) -> Result<()> {
    if body.dim() != 2 {
        return Err(Error::Unsupported("flotation is planar".into()));
    }
    if (body.volume() - 1.0).abs() > 1e-9 {
        return Err(Error::range("area", body.volume(), "1 (normalize the body first)"));
    }
    if body.barycenter().norm() > 1e-9 * body.diameter() {
        return Err(Error::range("barycenter norm", body.barycenter().norm(), "0 (normalize the body first)"));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::range("rho", rho, "(0, 1)"));
    }
    Ok(())
}

/// The submerged part is the cap of area `rho` on the `-u` side.
pub fn float_state(body: &BodyHandle, rho: f64, up: &Direction) -> Result<FloatState> {
    check_floating_body(body, rho)?;
    let down = up.neg();
    let cut = cap_cut(body, &WeightFunction::uniform(), &down, rho, 1.0, &CapOptions::default())?;
    Ok(FloatState {
        rho,
        up: (**up).clone(),
        waterline: -cut.d,
        submerged: cut.mass,
        buoyancy: cut.barycenter,
    })
}

pub fn buoyancy_center(body: &BodyHandle, rho: f64, up: &Direction) -> Result<Point> {
    Ok(float_state(body, rho, up)?.buoyancy)
}

/// Barycenter of the part above the waterline, clipped directly.
pub fn emerged_barycenter(body: &BodyHandle, rho: f64, up: &Direction) -> Result<Point> {
    let s = float_state(body, rho, up)?;
    let (mass, moment) = body.cap_volume_moment(up, s.waterline);
    if mass <= 0.0 {
        return Err(Error::EmptyCap);
    }
    Ok(moment / mass)
}

/// `cross(u, g - b(u))` with `g = 0`.
pub fn torque(body: &BodyHandle, rho: f64, angle: f64) -> Result<f64> {
    let u = Direction::from_angle(angle);
    let b = buoyancy_center(body, rho, &u)?;
    Ok(-(u[0] * b[1] - u[1] * b[0]))
}

#[derive(Debug, Clone, Serialize)]
pub struct Equilibria {
    /// Angles of the up direction in `[0, 2 pi)`.
    pub angles: Vec<f64>,
    pub floats_in_every_position: bool,
    pub max_abs_torque: f64,
}

/// Scans the torque over `resolution` angles and bisects each sign change
/// until `|torque| <= tol`. A run of grid angles with `|torque| <= tol`
/// counts as one root. If the torque vanishes on the whole grid the grid is
/// returned with `floats_in_every_position` set.
pub fn equilibrium_directions(body: &BodyHandle, rho: f64, resolution: usize, tol: f64) -> Result<Equilibria> {
    check_floating_body(body, rho)?;
    let k = resolution.max(8);
    let two_pi = 2.0 * std::f64::consts::PI;
    let angles: Vec<f64> = (0..k).map(|i| two_pi * i as f64 / k as f64).collect();
    let tau: Vec<f64> = angles.par_iter().map(|&a| torque(body, rho, a)).collect::<Result<_>>()?;
    let max_abs_torque = tau.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if max_abs_torque <= tol.min(1e-12) {
        return Ok(Equilibria {
            angles,
            floats_in_every_position: true,
            max_abs_torque,
        });
    }
    let zero = |t: f64| t.abs() <= tol;
    // start the cyclic sweep at a non-zero sample
    let start = (0..k).find(|&i| !zero(tau[i])).unwrap();
    let mut roots = Vec::new();
    let mut i = 0;
    while i < k {
        let a = (start + i) % k;
        let b = (a + 1) % k;
        if zero(tau[b]) {
            // collapse the run of near-zero samples to its smallest entry
            let mut best = b;
            let mut j = i + 1;
            while j < k && zero(tau[(start + j) % k]) {
                let c = (start + j) % k;
                if tau[c].abs() < tau[best].abs() {
                    best = c;
                }
                j += 1;
            }
            roots.push(angles[best]);
            i = j;
            continue;
        }
        if tau[a].signum() != tau[b].signum() {
            let lo = angles[a];
            let hi = if b == 0 { two_pi } else { angles[b] };
            roots.push(bisect_torque(body, rho, lo, hi, tau[a], tol)?.rem_euclid(two_pi));
        }
        i += 1;
    }
    roots.sort_by(f64::total_cmp);
    Ok(Equilibria {
        angles: roots,
        floats_in_every_position: false,
        max_abs_torque,
    })
}

fn bisect_torque(body: &BodyHandle, rho: f64, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> Result<f64> {
    let s = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = torque(body, rho, mid)?;
        if f.abs() <= tol || hi - lo <= 1e-15 {
            return Ok(mid);
        }
        if f.signum() == s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Least-squares sphere through the points: `|x|^2 = 2 <c, x> + k`.
pub fn fit_sphere(points: &[Point]) -> Result<(Point, f64)> {
    let n = points.first().map_or(0, |p| p.len());
    let m = DMatrix::from_fn(points.len(), n + 1, |i, j| if j < n { 2.0 * points[i][j] } else { 1.0 });
    let rhs = DVector::from_fn(points.len(), |i, _| points[i].norm_squared());
    let sol = m
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Degenerate(format!("sphere fit failed: {e}")))?;
    let c = sol.rows(0, n).into_owned();
    let r = (sol[n] + c.norm_squared()).max(0.0).sqrt();
    Ok((c, r))
}

/// `min |x_i - c| / max |x_i - c|` over the boundary points of `M_delta`,
/// with `c` the least-squares center. 1 means round.
pub fn ulam_m_body_roundness(wb: &WeightedBody, delta: f64, m: usize) -> Result<f64> {
    let approx = build_ulam_body(wb, delta, m)?;
    let (c, _) = fit_sphere(&approx.boundary_points)?;
    let (lo, hi) = approx
        .boundary_points
        .iter()
        .map(|x| (x - &c).norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    Ok(lo / hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(v: &[f64]) -> Point {
        DVector::from_column_slice(v)
    }

    fn unit_disc() -> BodyHandle {
        BodyHandle::ball(pt(&[0., 0.]), 1.0 / PI.sqrt()).unwrap()
    }

    fn centered_square() -> BodyHandle {
        BodyHandle::polytope(vec![pt(&[-0.5, -0.5]), pt(&[0.5, -0.5]), pt(&[0.5, 0.5]), pt(&[-0.5, 0.5])]).unwrap()
    }

    #[test]
    fn buoyancy_examples() {
        let b = buoyancy_center(&centered_square(), 0.5, &Direction::axis(2, 1)).unwrap();
        assert!((b - pt(&[0., -0.25])).norm() < 1e-12);
        let disc = BodyHandle::unit_ball(2).scaled(1.0 / PI.sqrt()).unwrap();
        let b = buoyancy_center(&disc, 0.5, &Direction::axis(2, 1)).unwrap();
        assert!((b[1] + 4.0 / (3.0 * PI) / PI.sqrt()).abs() < 1e-12 && b[0].abs() < 1e-14, "{b:?}");
        let s = float_state(&unit_disc(), 0.3, &Direction::from_angle(1.0)).unwrap();
        assert!((s.submerged - 0.3).abs() < 1e-10);
        let u = Direction::from_angle(1.0);
        assert!((s.buoyancy[0] * u[1] - s.buoyancy[1] * u[0]).abs() < 1e-14);
    }

    #[test]
    fn disc_floats_everywhere() {
        let e = equilibrium_directions(&unit_disc(), 0.37, 360, 1e-10).unwrap();
        assert!(e.floats_in_every_position);
        assert!(e.max_abs_torque <= 1e-12);
    }

    #[test]
    fn square_has_eight_equilibria() {
        let e = equilibrium_directions(&centered_square(), 0.5, 4096, 1e-10).unwrap();
        assert_eq!(e.angles.len(), 8, "{:?}", e.angles);
        for (j, a) in e.angles.iter().enumerate() {
            assert!((a - j as f64 * PI / 4.0).abs() < 1e-8);
        }
    }

    #[test]
    fn centers_are_collinear() {
        let tri = BodyHandle::polytope(vec![pt(&[0., 0.]), pt(&[3., 0.]), pt(&[1., 2.])])
            .unwrap()
            .normalized()
            .unwrap();
        for k in 0..32 {
            let u = Direction::from_angle(0.2 * k as f64);
            let b = buoyancy_center(&tri, 0.4, &u).unwrap();
            let a = emerged_barycenter(&tri, 0.4, &u).unwrap();
            assert!((b[0] * a[1] - b[1] * a[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn roundness_scores() {
        let disc = WeightedBody::uniform(BodyHandle::unit_ball(2));
        assert!((ulam_m_body_roundness(&disc, 0.2, 128).unwrap() - 1.0).abs() < 1e-8);
        let sq = WeightedBody::uniform(crate::bodies::regular_polygon(4, 1.0).unwrap());
        assert!(ulam_m_body_roundness(&sq, 0.1, 128).unwrap() < 1.0 - 1e-6);
        let ell = BodyHandle::ellipsoid(pt(&[0., 0.]), DMatrix::from_diagonal(&pt(&[0.25, 1.0]))).unwrap();
        assert!(ulam_m_body_roundness(&WeightedBody::uniform(ell), 0.05, 128).unwrap() < 0.9);
    }
}
