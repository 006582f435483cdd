#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ulamfloat_core::{BodyHandle, Point};

pub fn pt(v: &[f64]) -> Point {
    DVector::from_column_slice(v)
}

pub fn square() -> BodyHandle {
    BodyHandle::polytope(vec![pt(&[0., 0.]), pt(&[1., 0.]), pt(&[1., 1.]), pt(&[0., 1.])]).unwrap()
}

pub fn triangle() -> BodyHandle {
    BodyHandle::polytope(vec![pt(&[0., 0.]), pt(&[1., 0.]), pt(&[0., 1.])]).unwrap()
}

/// Semi-axes 2 and 1.
pub fn ellipse() -> BodyHandle {
    BodyHandle::ellipsoid(pt(&[0., 0.]), DMatrix::from_diagonal(&pt(&[0.25, 1.0]))).unwrap()
}

pub fn cube() -> BodyHandle {
    BodyHandle::polytope(
        (0..8)
            .map(|i| pt(&[(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]))
            .collect(),
    )
    .unwrap()
}

pub fn tetrahedron() -> BodyHandle {
    BodyHandle::polytope(vec![pt(&[0., 0., 0.]), pt(&[1., 0., 0.]), pt(&[0., 1., 0.]), pt(&[0., 0., 1.])]).unwrap()
}

pub fn named_bodies() -> Vec<(&'static str, BodyHandle)> {
    vec![
        ("disc", BodyHandle::unit_ball(2)),
        ("square", square()),
        ("triangle", triangle()),
        ("ellipse", ellipse()),
        ("cube", cube()),
        ("tetrahedron", tetrahedron()),
    ]
}

fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
    &m * m.transpose() + DMatrix::identity(n, n) * 0.3
}

/// Random body of the given class in dimension `n`.
pub fn random_body(class: usize, n: usize, rng: &mut ChaCha8Rng) -> BodyHandle {
    let c = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    match class % 3 {
        0 => BodyHandle::ball(c, 0.5 + rng.random::<f64>()).unwrap(),
        1 => BodyHandle::ellipsoid(c, random_spd(n, rng)).unwrap(),
        _ => loop {
            let k = 5 + (rng.random::<f64>() * 8.0) as usize;
            let pts: Vec<Point> = (0..k)
                .map(|_| &c + DVector::from_fn(n, |_, _| 2.0 * rng.random::<f64>() - 1.0))
                .collect();
            if let Ok(b) = BodyHandle::polytope(pts) {
                if b.inradius() > 0.1 {
                    return b;
                }
            }
        },
    }
}

/// Random matrix of determinant 1.
pub fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + 0.6 * (rng.random::<f64>() - 0.5));
        let d = m.determinant();
        if d > 0.2 {
            return m / d.powf(1.0 / n as f64);
        }
    }
}

pub fn corpus(seed: u64, count: usize) -> Vec<BodyHandle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_body(i, 2 + (i / 3) % 2, &mut rng)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
