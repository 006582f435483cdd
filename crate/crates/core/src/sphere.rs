//! Direction grids on `S^{n-1}` and product quadrature on the sphere.

use std::f64::consts::PI;

use nalgebra::DVector;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::quadrature::GaussLegendre;

/// An antipodally closed set of unit directions: `dirs[i + half] == -dirs[i]`.
#[derive(Debug, Clone)]
pub struct DirectionGrid {
    dirs: Vec<DVector<f64>>,
    half: usize,
}

impl DirectionGrid {
    /// Uniform angles for `n = 2`, a hemispherical Fibonacci lattice plus its
    /// antipodes for `n = 3`, and a Halton-based quasi-random set plus
    /// antipodes for `n >= 4`. Odd `m` is rounded up.
    pub fn new(n: usize, m: usize) -> Self {
        assert!(n >= 2, "direction grids need n >= 2");
        let half = m.div_ceil(2).max(1);
        let mut dirs: Vec<DVector<f64>> = match n {
            2 => (0..half)
                .map(|j| {
                    let a = PI * j as f64 / half as f64;
                    DVector::from_vec(vec![a.cos(), a.sin()])
                })
                .collect(),
            3 => fibonacci_hemisphere(half),
            _ => halton_directions(n, half),
        };
        let neg: Vec<DVector<f64>> = dirs.iter().map(|d| -d).collect();
        dirs.extend(neg);
        Self { dirs, half }
    }

    /// Planar grid from explicit angles (not necessarily antipodally closed;
    /// `antipode` is then unavailable).
    pub fn from_angles(angles: &[f64]) -> Self {
        let dirs = angles
            .iter()
            .map(|a| DVector::from_vec(vec![a.cos(), a.sin()]))
            .collect();
        Self { dirs, half: 0 }
    }

    pub fn from_directions(dirs: Vec<DVector<f64>>) -> Self {
        Self { dirs, half: 0 }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dirs.first().map_or(0, |d| d.len())
    }

    pub fn directions(&self) -> &[DVector<f64>] {
        &self.dirs
    }

    pub fn into_directions(self) -> Vec<DVector<f64>> {
        self.dirs
    }

    /// Index of `-dirs[i]`, when the grid is antipodally closed.
    pub fn antipode(&self, i: usize) -> Option<usize> {
        if self.half == 0 || 2 * self.half != self.dirs.len() {
            return None;
        }
        Some(if i < self.half { i + self.half } else { i - self.half })
    }
}

fn fibonacci_hemisphere(k: usize) -> Vec<DVector<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / k as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

fn halton_directions(n: usize, k: usize) -> Vec<DVector<f64>> {
    assert!(n <= PRIMES.len(), "quasi-random grids support n <= {}", PRIMES.len());
    let normal = Normal::standard();
    let mut out = Vec::with_capacity(k);
    let mut i = 1u64;
    while out.len() < k {
        let v = DVector::from_iterator(
            n,
            (0..n).map(|j| normal.inverse_cdf(radical_inverse(i, PRIMES[j]).clamp(1e-12, 1.0 - 1e-12))),
        );
        i += 1;
        let norm = v.norm();
        if norm > 1e-9 {
            out.push(v / norm);
        }
    }
    out
}

/// Product quadrature on `S^{n-1}`: uniform angles for `n = 2`, and for
/// `n >= 3` Gauss-Legendre in the polar angle against `sin^{n-2}` times the
/// rule on `S^{n-2}`. Weights sum to `|S^{n-1}|`.
pub fn sphere_quadrature(n: usize, resolution: usize) -> Vec<(DVector<f64>, f64)> {
    assert!(n >= 2);
    let res = resolution.max(4);
    if n == 2 {
        let w = 2.0 * PI / res as f64;
        return (0..res)
            .map(|j| {
                let a = 2.0 * PI * (j as f64 + 0.5) / res as f64;
                (DVector::from_vec(vec![a.cos(), a.sin()]), w)
            })
            .collect();
    }
    let lower = sphere_quadrature(n - 1, res);
    // odd n: c = cos(alpha) turns sin^{n-2} d alpha into the polynomial
    // weight (1 - c^2)^{(n-3)/2} dc; even n keeps the polar angle.
    let polar: Vec<(f64, f64, f64)> = if n % 2 == 1 {
        GaussLegendre::new(res.div_ceil(2).max(2) + (n - 3) / 2)
            .on_interval(-1.0, 1.0)
            .map(|(c, w)| {
                let s = (1.0 - c * c).sqrt();
                (s, c, w * (1.0 - c * c).powi((n as i32 - 3) / 2))
            })
            .collect()
    } else {
        GaussLegendre::new(res.max(4))
            .on_interval(0.0, PI)
            .map(|(a, w)| {
                let (s, c) = a.sin_cos();
                (s, c, w * s.powi(n as i32 - 2))
            })
            .collect()
    };
    let mut out = Vec::with_capacity(lower.len() * polar.len());
    for (s, c, wa) in polar {
        for (v, wv) in &lower {
            let mut u = DVector::zeros(n);
            for k in 0..n - 1 {
                u[k] = s * v[k];
            }
            u[n - 1] = c;
            out.push((u, wa * wv));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::unit_sphere_area;

    #[test]
    fn grids_are_unit_and_antipodal() {
        for n in 2..=5 {
            let g = DirectionGrid::new(n, 64);
            assert_eq!(g.len(), 64);
            for i in 0..g.len() {
                assert!((g.directions()[i].norm() - 1.0).abs() < 1e-12);
                let j = g.antipode(i).unwrap();
                assert!((&g.directions()[i] + &g.directions()[j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn fibonacci_grid_is_roughly_uniform() {
        let g = DirectionGrid::new(3, 2000);
        let mean = g.directions().iter().fold(DVector::zeros(3), |a, d| a + d) / 2000.0;
        assert!(mean.norm() < 1e-12);
        // every probe direction has a grid point within a small cap
        let probe = DirectionGrid::new(3, 200);
        for p in probe.directions() {
            let best = g.directions().iter().map(|d| d.dot(p)).fold(-1.0, f64::max);
            assert!(best > (0.1f64).cos());
        }
    }

    #[test]
    fn sphere_weights_sum_to_area() {
        for n in 2..=5 {
            let q = sphere_quadrature(n, 12);
            let s: f64 = q.iter().map(|(_, w)| w).sum();
            assert!((s - unit_sphere_area(n)).abs() < 1e-12 * s, "n={n}");
        }
    }

    #[test]
    fn sphere_quadrature_second_moment() {
        // int_{S^2} z^2 = 4 pi / 3
        let q = sphere_quadrature(3, 10);
        let s: f64 = q.iter().map(|(u, w)| w * u[2] * u[2]).sum();
        assert!((s - 4.0 * PI / 3.0).abs() < 1e-12);
    }
}
