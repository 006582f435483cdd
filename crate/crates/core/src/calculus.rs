//! Cap functionals `delta(a) = |K ∩ {<x,a> >= 1}|` and
//! `U(a) = int_{K ∩ {<x,a> >= 1}} x dx` with their derivatives
//! `grad delta = (1/|a|) int_section x` and `DU = (1/|a|) int_section x x^T`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bodies::{BodyHandle, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct CapFunctionalPoint {
    pub a: Point,
    pub delta: f64,
    pub u: Point,
    pub grad_delta: Point,
    pub jac_u: DMatrix<f64>,
}

fn split(a: &Point) -> Result<(Point, f64)> {
    let len = a.norm();
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::range("|a|", len, "(0, inf)"));
    }
    Ok((a / len, 1.0 / len))
}

fn check_meets_interior(body: &BodyHandle, theta: &Point, d: f64) -> Result<()> {
    let top = body.support(theta);
    let bottom = -body.support(&-theta);
    let tol = 1e-12 * body.diameter();
    if !(d > bottom + tol && d < top - tol) {
        return Err(Error::range("1/|a|", d, &format!("({bottom}, {top}) so that the hyperplane meets int K")));
    }
    Ok(())
}

/// `(delta(a), U(a))`; zero outside `K`.
pub fn cap_functionals(body: &BodyHandle, a: &Point) -> Result<(f64, Point)> {
    let (theta, d) = split(a)?;
    Ok(body.cap_volume_moment(&theta, d))
}

pub fn grad_delta(body: &BodyHandle, a: &Point) -> Result<Point> {
    let (theta, d) = split(a)?;
    check_meets_interior(body, &theta, d)?;
    Ok(body.section_moments(&theta, d).first * d)
}

pub fn jac_u(body: &BodyHandle, a: &Point) -> Result<DMatrix<f64>> {
    let (theta, d) = split(a)?;
    check_meets_interior(body, &theta, d)?;
    Ok(body.section_moments(&theta, d).second * d)
}

pub fn evaluate(body: &BodyHandle, a: &Point) -> Result<CapFunctionalPoint> {
    let (theta, d) = split(a)?;
    check_meets_interior(body, &theta, d)?;
    let (delta, u) = body.cap_volume_moment(&theta, d);
    let s = body.section_moments(&theta, d);
    Ok(CapFunctionalPoint {
        a: a.clone(),
        delta,
        u,
        grad_delta: s.first * d,
        jac_u: s.second * d,
    })
}

/// Converts the cut `{<x,theta> >= d}` to the parameter `a = theta/d`. For
/// `d <= 0` the body is translated by `v` along `theta` first; returns
/// `(body, a, v)`.
pub fn a_from_cut(body: &BodyHandle, theta: &Point, d: f64) -> Result<(BodyHandle, Point, Point)> {
    let theta = theta.normalize();
    if d > 0.0 {
        return Ok((body.clone(), &theta / d, DVector::zeros(body.dim())));
    }
    let mut shift = 2.0 * body.diameter();
    if d + shift <= 0.0 {
        shift += -d;
    }
    let v = &theta * shift;
    Ok((body.translated(&v)?, &theta / (d + shift), v))
}

/// Central finite-difference comparison at one parameter.
#[derive(Debug, Clone, Serialize)]
pub struct GradCheck {
    pub a: Point,
    /// Translation applied before forming `a` (zero if none).
    pub shift: Point,
    pub grad_deviation: f64,
    pub grad_tolerance: f64,
    pub jac_deviation: f64,
    pub jac_tolerance: f64,
    pub jac_asymmetry: f64,
    /// Relative deviation of `trace DU` from the section quadrature of `|x|^2`.
    pub trace_deviation: f64,
    pub passes: bool,
}

/// Compares the section formulas with central differences of `delta` and
/// `U` at step `1e-5 |a|`.
pub fn grad_check(body: &BodyHandle, a: &Point) -> Result<GradCheck> {
    let n = body.dim();
    let p = evaluate(body, a)?;
    let h = 1e-5 * a.norm();
    let mut fd_grad = DVector::zeros(n);
    let mut fd_jac = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut ap = a.clone();
        ap[i] += h;
        let mut am = a.clone();
        am[i] -= h;
        let (dp, up) = cap_functionals(body, &ap)?;
        let (dm, um) = cap_functionals(body, &am)?;
        fd_grad[i] = (dp - dm) / (2.0 * h);
        fd_jac.set_column(i, &((up - um) / (2.0 * h)));
    }
    let grad_deviation = (&fd_grad - &p.grad_delta).amax();
    let jac_deviation = (&fd_jac - &p.jac_u).amax();
    let grad_tolerance = 1e-6f64.max(1e-3 * p.grad_delta.norm());
    let jac_tolerance = 1e-6f64.max(1e-3 * p.jac_u.norm());
    let jac_asymmetry = (&p.jac_u - p.jac_u.transpose()).amax();

    let (theta, d) = split(a)?;
    let mut nodes = Vec::new();
    body.section_nodes(&theta, d, 12, &mut nodes);
    let direct: f64 = nodes.iter().map(|(x, w)| w * x.norm_squared()).sum::<f64>() * d;
    let trace = p.jac_u.trace();
    let trace_deviation = (trace - direct).abs() / trace.abs().max(1e-300);

    Ok(GradCheck {
        a: a.clone(),
        shift: DVector::zeros(n),
        grad_deviation,
        grad_tolerance,
        jac_deviation,
        jac_tolerance,
        jac_asymmetry,
        trace_deviation,
        passes: grad_deviation <= grad_tolerance
            && jac_deviation <= jac_tolerance
            && jac_asymmetry <= 1e-12 * (1.0 + p.jac_u.norm())
            && trace_deviation <= 1e-8,
    })
}

pub(crate) fn random_direction(n: usize, rng: &mut impl Rng) -> Point {
    loop {
        let v = DVector::from_fn(n, |_, _| 2.0 * rng.random::<f64>() - 1.0);
        let r = v.norm();
        if r > 1e-3 && r <= 1.0 {
            return v / r;
        }
    }
}

/// `samples` checks at random cuts: uniform direction, height uniform in the
/// middle 70% of the width. Cuts with `d <= 0` go through [`a_from_cut`].
pub fn grad_check_random(body: &BodyHandle, samples: usize, seed: u64) -> Result<Vec<GradCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let theta = random_direction(body.dim(), &mut rng);
            let top = body.support(&theta);
            let bottom = -body.support(&-&theta);
            let t = 0.15 + 0.7 * rng.random::<f64>();
            let d = bottom + t * (top - bottom);
            let (b, a, v) = a_from_cut(body, &theta, d)?;
            let mut c = grad_check(&b, &a)?;
            c.shift = v;
            Ok(c)
        })
        .collect()
}

/// `(s, delta, |grad delta|)` along `a = theta / (s h_K(theta))` as `s`
/// increases to 1, where the hyperplane leaves `K`.
pub fn degenerate_path(body: &BodyHandle, theta: &Point, steps: usize) -> Result<Vec<(f64, f64, f64)>> {
    let theta = theta.normalize();
    let top = body.support(&theta);
    if top <= 0.0 {
        return Err(Error::OriginNotInterior("need h_K(theta) > 0".into()));
    }
    (1..=steps)
        .map(|k| {
            let s = 1.0 - 0.5f64.powi(k as i32);
            let a = &theta / (s * top);
            let (delta, _) = cap_functionals(body, &a)?;
            let g = grad_delta(body, &a)?;
            Ok((s, delta, g.norm()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(v: &[f64]) -> Point {
        DVector::from_column_slice(v)
    }

    #[test]
    fn closed_form_ball_gradients() {
        let g = grad_delta(&BodyHandle::unit_ball(3), &pt(&[0., 0., 2.])).unwrap();
        assert!((g - pt(&[0., 0., 3.0 * PI / 16.0])).norm() < 1e-14);
        let g = grad_delta(&BodyHandle::unit_ball(2), &pt(&[0., 2.])).unwrap();
        assert!((g - pt(&[0., 3f64.sqrt() / 4.0])).norm() < 1e-14);
        // disc of radius sqrt(3)/2 at height 1/2: int x x^T over it, halved
        let j = jac_u(&BodyHandle::unit_ball(3), &pt(&[0., 0., 2.])).unwrap();
        let area = PI * 0.75;
        let lateral = area * 0.75 / 4.0;
        let expect = DMatrix::from_diagonal(&pt(&[lateral, lateral, area * 0.25])) * 0.5;
        assert!((j - expect).amax() < 1e-14);
    }

    #[test]
    fn fd_checks_on_ball_and_square() {
        for c in grad_check_random(&BodyHandle::unit_ball(3), 10, 1).unwrap() {
            assert!(c.passes, "{c:?}");
        }
        let sq = crate::bodies::regular_polygon(4, 1.0).unwrap();
        for c in grad_check_random(&sq, 10, 2).unwrap() {
            assert!(c.passes, "{c:?}");
        }
    }

    #[test]
    fn symmetric_section_through_origin_has_zero_gradient() {
        // a cut through 0 has no parameter a, so the body is shifted first
        let (b, a, v) = a_from_cut(&BodyHandle::unit_ball(2), &pt(&[1., 0.]), 0.0).unwrap();
        assert!((v.norm() - 4.0).abs() < 1e-14);
        let g = grad_delta(&b, &a).unwrap();
        assert!(g[1].abs() < 1e-14);
    }

    #[test]
    fn gradient_vanishes_at_the_boundary() {
        let path = degenerate_path(&BodyHandle::unit_ball(3), &pt(&[0., 1., 1.]), 20).unwrap();
        // |grad delta| = pi s^2 (1 - s^2) peaks at s = 1/sqrt 2
        for w in path.windows(2).skip(1) {
            assert!(w[1].1 < w[0].1 && w[1].2 < w[0].2);
        }
        assert!(path.last().unwrap().2 < 1e-3);
    }

    #[test]
    fn missing_hyperplane_is_rejected() {
        assert!(grad_delta(&BodyHandle::unit_ball(2), &pt(&[0.5, 0.])).is_err());
        assert!(grad_delta(&BodyHandle::unit_ball(2), &pt(&[0., 0.])).is_err());
    }
}
