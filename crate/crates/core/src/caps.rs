//! Weighted halfspace caps `K ∩ {<x, theta> >= d}`: mass, first moment,
//! barycenter, and the inverse problem for the cut height.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::{orthonormal_complement, BodyHandle, Direction, Point};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, smoothstep_map, AdaptiveOptions};
use crate::weights::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Closed forms for balls and ellipsoids with constant weight.
    Analytic,
    /// Exact polygon/polyhedron clipping with constant weight.
    ExactClip,
    /// Adaptive Gauss-Kronrod over slices, with exact sections.
    SliceQuadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendChoice {
    Auto,
    Force(Backend),
}

#[derive(Debug, Clone, Copy)]
pub struct CapOptions {
    pub backend: BackendChoice,
    /// Relative tolerance of the slice quadrature.
    pub rel_tol: f64,
    /// Gauss-Legendre order of the section rules.
    pub section_order: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for CapOptions {
    fn default() -> Self {
        Self {
            backend: BackendChoice::Auto,
            rel_tol: 1e-12,
            section_order: 10,
            mc_samples: 200_000,
            seed: 7,
        }
    }
}

impl CapOptions {
    pub fn with_backend(backend: Backend) -> Self {
        Self {
            backend: BackendChoice::Force(backend),
            ..Self::default()
        }
    }
}

/// `int_cap phi` and `int_cap y phi(y) dy`.
#[derive(Debug, Clone)]
pub struct CapIntegrals {
    pub mass: f64,
    pub moment: Point,
    pub error: f64,
    pub backend: Backend,
}

/// A cap with its cut height, mass, and weighted barycenter.
#[derive(Debug, Clone)]
pub struct CapCut {
    pub theta: Direction,
    pub d: f64,
    pub mass: f64,
    pub barycenter: Point,
    pub backend: Backend,
    pub error_estimate: f64,
}

pub fn resolve_backend(body: &BodyHandle, w: &WeightFunction, opts: &CapOptions) -> Result<Backend> {
    let constant = w.constant_value().is_some();
    match opts.backend {
        BackendChoice::Auto => Ok(match (constant, body.is_polytope()) {
            (true, false) => Backend::Analytic,
            (true, true) => Backend::ExactClip,
            (false, _) => Backend::SliceQuadrature,
        }),
        BackendChoice::Force(b) => {
            match b {
                Backend::Analytic if !constant || body.is_polytope() => Err(Error::Unsupported(
                    "analytic caps need a ball or ellipsoid with constant weight".into(),
                )),
                Backend::ExactClip if !constant || !body.is_polytope() => Err(Error::Unsupported(
                    "exact clipping needs a polytope with constant weight".into(),
                )),
                _ => Ok(b),
            }
        }
    }
}

fn check(body: &BodyHandle, theta: &Point) -> Result<()> {
    if theta.len() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: theta.len(),
        });
    }
    Ok(())
}

/// Mass and first moment of the cap `K ∩ {<x, theta> >= d}`. Heights outside
/// the support range are clamped (empty or full cap).
pub fn cap_integrals(
    body: &BodyHandle,
    w: &WeightFunction,
    theta: &Direction,
    d: f64,
    opts: &CapOptions,
) -> Result<CapIntegrals> {
    check(body, theta)?;
    let backend = resolve_backend(body, w, opts)?;
    let n = body.dim();
    let top = body.support(theta);
    let bottom = -body.support(&-&**theta);
    if d >= top {
        return Ok(CapIntegrals {
            mass: 0.0,
            moment: DVector::zeros(n),
            error: 0.0,
            backend,
        });
    }
    let d = d.max(bottom);
    match backend {
        Backend::Analytic | Backend::ExactClip => {
            let s = w.constant_value().expect("checked by resolve_backend");
            let (v, m) = body.cap_volume_moment(theta, d);
            Ok(CapIntegrals {
                mass: s * v,
                moment: m * s,
                error: 0.0,
                backend,
            })
        }
        Backend::SliceQuadrature => Ok(slice_integrals(body, w, theta, d, top, opts)),
        Backend::MonteCarlo => Ok(mc_integrals(body, w, theta, d, top, opts)),
    }
}

fn slice_integrals(
    body: &BodyHandle,
    w: &WeightFunction,
    theta: &Point,
    d: f64,
    top: f64,
    opts: &CapOptions,
) -> CapIntegrals {
    let n = body.dim();
    let scale = body.volume() * w.value(body.interior_point());
    let qopts = AdaptiveOptions {
        abs_tol: 1e-16 * scale,
        rel_tol: opts.rel_tol,
        max_intervals: 4000,
    };
    let mut nodes = Vec::new();
    let mut section = |t: f64, jac: f64, out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        body.section_nodes(theta, t, opts.section_order, &mut nodes);
        for (x, wt) in &nodes {
            let f = wt * w.value(x) * jac;
            out[0] += f;
            for k in 0..n {
                out[k + 1] += f * x[k];
            }
        }
    };
    let ints = if body.is_polytope() {
        let breaks = body.vertex_heights(theta);
        integrate_adaptive(|t, out| section(t, 1.0, out), d, top, &breaks, n + 1, 0, qopts)
    } else {
        integrate_adaptive(
            |u, out| {
                let (t, dt) = smoothstep_map(d, top, u);
                section(t, dt, out)
            },
            0.0,
            1.0,
            &[],
            n + 1,
            0,
            qopts,
        )
    };
    CapIntegrals {
        mass: ints.value[0],
        moment: DVector::from_column_slice(&ints.value[1..]),
        error: ints.error,
        backend: Backend::SliceQuadrature,
    }
}

/// Stratified Monte Carlo in the cap's bounding slab with rejection.
fn mc_integrals(
    body: &BodyHandle,
    w: &WeightFunction,
    theta: &Point,
    d: f64,
    top: f64,
    opts: &CapOptions,
) -> CapIntegrals {
    let n = body.dim();
    let basis = orthonormal_complement(theta);
    let ranges: Vec<(f64, f64)> = basis.iter().map(|b| (-body.support(&-b), body.support(b))).collect();
    let cross: f64 = ranges.iter().map(|(a, b)| b - a).product();
    let strata = (opts.mc_samples / 64).clamp(1, 4096);
    let per = (opts.mc_samples / strata).max(2);
    let dt = (top - d) / strata as f64;
    let vol_k = dt * cross;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut mass = 0.0;
    let mut moment = DVector::zeros(n);
    let mut var = 0.0;
    for k in 0..strata {
        let (mut s1, mut s2) = (0.0, 0.0);
        let mut mk = DVector::zeros(n);
        for _ in 0..per {
            let t = d + dt * (k as f64 + rng.random::<f64>());
            let mut x = theta * t;
            for (b, (lo, hi)) in basis.iter().zip(&ranges) {
                x += b * (lo + (hi - lo) * rng.random::<f64>());
            }
            if body.contains(&x) {
                let f = w.value(&x);
                s1 += f;
                s2 += f * f;
                mk += &x * f;
            }
        }
        let mean = s1 / per as f64;
        mass += vol_k * mean;
        moment += mk * (vol_k / per as f64);
        let sample_var = (s2 / per as f64 - mean * mean).max(0.0) * per as f64 / (per as f64 - 1.0);
        var += vol_k * vol_k * sample_var / per as f64;
    }
    CapIntegrals {
        mass,
        moment,
        error: var.sqrt(),
        backend: Backend::MonteCarlo,
    }
}

/// `int_{K ∩ {<x,theta> = t}} phi`, the negative derivative of the cap mass
/// in `d`.
pub fn section_mass(body: &BodyHandle, w: &WeightFunction, theta: &Point, t: f64, opts: &CapOptions) -> f64 {
    if let Some(s) = w.constant_value() {
        return s * body.section_moments(theta, t).area;
    }
    let mut nodes = Vec::new();
    body.section_nodes(theta, t, opts.section_order, &mut nodes);
    nodes.iter().map(|(x, wt)| wt * w.value(x)).sum()
}

pub fn cap_mass(body: &BodyHandle, w: &WeightFunction, theta: &Direction, d: f64, opts: &CapOptions) -> Result<f64> {
    Ok(cap_integrals(body, w, theta, d, opts)?.mass)
}

/// `int_cap <theta, y> phi(y) dy`.
pub fn cap_first_moment(
    body: &BodyHandle,
    w: &WeightFunction,
    theta: &Direction,
    d: f64,
    opts: &CapOptions,
) -> Result<f64> {
    Ok(cap_integrals(body, w, theta, d, opts)?.moment.dot(theta))
}

pub fn cap_barycenter(
    body: &BodyHandle,
    w: &WeightFunction,
    theta: &Direction,
    d: f64,
    opts: &CapOptions,
) -> Result<Point> {
    let c = cap_integrals(body, w, theta, d, opts)?;
    if !(c.mass > 0.0) {
        return Err(Error::EmptyCap);
    }
    Ok(c.moment / c.mass)
}

/// The height `d` with `cap_mass(theta, d) = delta`.
///
/// Safeguarded Newton on the monotone mass function (its derivative is minus
/// the section mass), falling back to bisection whenever a step leaves the
/// current bracket. Monte Carlo uses plain bisection.
pub fn cut_height(
    body: &BodyHandle,
    w: &WeightFunction,
    theta: &Direction,
    delta: f64,
    total: f64,
    opts: &CapOptions,
) -> Result<f64> {
    check(body, theta)?;
    if !(0.0..=total).contains(&delta) || delta.is_nan() {
        return Err(Error::range("delta", delta, &format!("[0, {total}]")));
    }
    let top = body.support(theta);
    let bottom = -body.support(&-&**theta);
    if delta == 0.0 {
        return Ok(top);
    }
    if delta == total {
        return Ok(bottom);
    }
    let backend = resolve_backend(body, w, opts)?;
    let width_tol = 1e-12 * body.diameter();
    let mass_tol = 1e-13 * total;
    let mass = |d: f64| cap_integrals(body, w, theta, d, opts).map(|c| c.mass);
    let (mut lo, mut hi) = (bottom, top);
    if backend == Backend::MonteCarlo {
        while hi - lo > width_tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mass(mid)? > delta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(0.5 * (lo + hi));
    }

    // start from the ball-like guess at the matching fraction
    let mut d = lo + (hi - lo) * (1.0 - delta / total);
    for _ in 0..200 {
        let f = mass(d)? - delta;
        if f > 0.0 {
            lo = lo.max(d);
        } else {
            hi = hi.min(d);
        }
        if f.abs() <= mass_tol {
            break;
        }
        if hi - lo <= width_tol {
            d = 0.5 * (lo + hi);
            break;
        }
        let slope = section_mass(body, w, theta, d, opts);
        let newton = d + f / slope;
        d = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    // certify a narrow bracket around the root
    let eps = 0.5 * width_tol;
    let (a, b) = (d - eps, d + eps);
    if a > bottom && mass(a)? < delta {
        return bisect_tail(&mass, delta, lo, d, width_tol);
    }
    if b < top && mass(b)? > delta {
        return bisect_tail(&mass, delta, d, hi, width_tol);
    }
    Ok(d)
}

fn bisect_tail(mass: &impl Fn(f64) -> Result<f64>, delta: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid)? > delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cut height and barycenter of the mass-`delta` cap.
pub fn cap_cut(
    body: &BodyHandle,
    w: &WeightFunction,
    theta: &Direction,
    delta: f64,
    total: f64,
    opts: &CapOptions,
) -> Result<CapCut> {
    let d = cut_height(body, w, theta, delta, total, opts)?;
    let c = cap_integrals(body, w, theta, d, opts)?;
    if !(c.mass > 0.0) {
        return Err(Error::EmptyCap);
    }
    Ok(CapCut {
        theta: theta.clone(),
        d,
        mass: c.mass,
        barycenter: c.moment / c.mass,
        backend: c.backend,
        error_estimate: c.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(v: &[f64]) -> Point {
        DVector::from_column_slice(v)
    }

    fn dir(v: &[f64]) -> Direction {
        Direction::from_slice(v).unwrap()
    }

    fn square() -> BodyHandle {
        BodyHandle::polytope(vec![pt(&[0., 0.]), pt(&[1., 0.]), pt(&[1., 1.]), pt(&[0., 1.])]).unwrap()
    }

    fn segment_area(d: f64) -> f64 {
        d.acos() - d * (1.0 - d * d).sqrt()
    }

    #[test]
    fn cap_mass_examples() {
        let one = WeightFunction::uniform();
        let o = CapOptions::default();
        assert!((cap_mass(&square(), &one, &dir(&[1., 0.]), 0.9, &o).unwrap() - 0.1).abs() < 1e-15);
        let disc = BodyHandle::unit_ball(2);
        for a in [0.0, 1.0, 2.5] {
            let th = Direction::from_angle(a);
            assert!((cap_mass(&disc, &one, &th, 0.0, &o).unwrap() - PI / 2.0).abs() < 1e-14);
            let m = cap_mass(&disc, &one, &th, 0.857, &o).unwrap();
            assert!((m - segment_area(0.857)).abs() < 1e-14);
            assert!((m - 0.1).abs() < 1e-3);
        }
    }

    #[test]
    fn cut_height_examples() {
        let one = WeightFunction::uniform();
        let o = CapOptions::default();
        let d = cut_height(&square(), &one, &dir(&[1., 0.]), 0.1, 1.0, &o).unwrap();
        assert!((d - 0.9).abs() < 1e-12);
        let disc = BodyHandle::unit_ball(2);
        let d = cut_height(&disc, &one, &dir(&[0., 1.]), PI / 2.0, PI, &o).unwrap();
        assert!(d.abs() < 1e-12);
        let d = cut_height(&disc, &one, &dir(&[0., 1.]), 0.1, PI, &o).unwrap();
        assert!((segment_area(d) - 0.1).abs() < 1e-12 * PI);
        assert!((d - 0.857).abs() < 1e-3);
        assert_eq!(cut_height(&disc, &one, &dir(&[0., 1.]), 0.0, PI, &o).unwrap(), 1.0);
        assert_eq!(cut_height(&disc, &one, &dir(&[0., 1.]), PI, PI, &o).unwrap(), -1.0);
        assert!(cut_height(&disc, &one, &dir(&[0., 1.]), 4.0, PI, &o).is_err());
    }

    #[test]
    fn barycenter_and_moment_examples() {
        let one = WeightFunction::uniform();
        let o = CapOptions::default();
        let b = cap_barycenter(&square(), &one, &dir(&[1., 0.]), 0.9, &o).unwrap();
        assert!((b - pt(&[0.95, 0.5])).norm() < 1e-14);
        let fm = cap_first_moment(&square(), &one, &dir(&[1., 0.]), 0.9, &o).unwrap();
        assert!((fm - 0.095).abs() < 1e-15);
        let disc = BodyHandle::unit_ball(2);
        let b = cap_barycenter(&disc, &one, &dir(&[0., 1.]), 0.0, &o).unwrap();
        assert!((b - pt(&[0.0, 4.0 / (3.0 * PI)])).norm() < 1e-14);
        let fm = cap_first_moment(&disc, &one, &dir(&[0., 1.]), 0.0, &o).unwrap();
        assert!((fm - 2.0 / 3.0).abs() < 1e-14);
        let th = dir(&[0.3, 0.95]);
        let b = cap_barycenter(&disc, &one, &th, 0.4, &o).unwrap();
        assert!((b[0] * th[1] - b[1] * th[0]).abs() < 1e-15);
        assert!(matches!(
            cap_barycenter(&disc, &one, &th, 1.5, &o),
            Err(Error::EmptyCap)
        ));
    }

    #[test]
    fn slice_backend_agrees_with_exact_backends() {
        let one = WeightFunction::uniform();
        let slice = CapOptions::with_backend(Backend::SliceQuadrature);
        let exact = CapOptions::default();
        let bodies = [
            square(),
            BodyHandle::unit_ball(2),
            BodyHandle::unit_ball(3),
            BodyHandle::polytope(vec![pt(&[0., 0., 0.]), pt(&[1., 0., 0.]), pt(&[0., 1., 0.]), pt(&[0., 0., 1.])]).unwrap(),
            BodyHandle::ellipsoid(pt(&[0.1, 0.2]), nalgebra::DMatrix::from_diagonal(&pt(&[1.0, 0.25]))).unwrap(),
        ];
        for body in &bodies {
            let n = body.dim();
            let mut v = vec![0.3; n];
            v[n - 1] = 0.8;
            let th = Direction::from_slice(&v).unwrap();
            let d = 0.3 * body.support(&th) + 0.7 * body.interior_point().dot(&th);
            let a = cap_integrals(body, &one, &th, d, &exact).unwrap();
            let b = cap_integrals(body, &one, &th, d, &slice).unwrap();
            assert!((a.mass - b.mass).abs() < 1e-11 * a.mass, "dim {n} poly {}: {} vs {}", body.is_polytope(), a.mass, b.mass);
            assert!((&a.moment - &b.moment).norm() < 1e-10 * a.mass);
        }
    }

    #[test]
    fn gaussian_half_disc_mass() {
        // int over the upper half disc of exp(-|x|^2/2) is half the full mass
        let w = WeightFunction::gaussian(pt(&[0., 0.]), 1.0).unwrap();
        let disc = BodyHandle::unit_ball(2);
        let m = cap_mass(&disc, &w, &dir(&[0., 1.]), 0.0, &CapOptions::default()).unwrap();
        assert!((m - PI * (1.0 - (-0.5f64).exp())).abs() < 1e-11);
    }

    #[test]
    fn monte_carlo_backend_within_stated_error() {
        let one = WeightFunction::uniform();
        let disc = BodyHandle::unit_ball(2);
        let mut o = CapOptions::with_backend(Backend::MonteCarlo);
        o.mc_samples = 400_000;
        let th = dir(&[0.0, 1.0]);
        let c = cap_integrals(&disc, &one, &th, 0.5, &o).unwrap();
        let exact = segment_area(0.5);
        assert!(c.error <= 2e-3 * exact);
        assert!((c.mass - exact).abs() <= 4.0 * c.error + 1e-12);
        let again = cap_integrals(&disc, &one, &th, 0.5, &o).unwrap();
        assert_eq!(c.mass, again.mass);
    }

    #[test]
    fn gaussian_cut_height_inverts_mass() {
        let w = WeightFunction::gaussian(pt(&[0.2, 0.1]), 1.0).unwrap();
        let tri = BodyHandle::polytope(vec![pt(&[0., 0.]), pt(&[1., 0.]), pt(&[0., 1.])]).unwrap();
        let o = CapOptions::default();
        let total = w.total_mass(&tri).unwrap();
        for a in [0.1, 1.3, 2.9, 4.4] {
            let th = Direction::from_angle(a);
            let d = cut_height(&tri, &w, &th, 0.05 * total, total, &o).unwrap();
            let m = cap_mass(&tri, &w, &th, d, &o).unwrap();
            assert!((m - 0.05 * total).abs() < 1e-10 * total);
        }
    }
}
