//! Closed-form quantities for Euclidean balls and spherical caps.

use std::f64::consts::PI;

use statrs::function::beta::beta_reg;

/// Volume `|B_2^n|` of the Euclidean unit ball.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area of the unit sphere `S^{n-1}`, i.e. `n |B_2^n|`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Volume of the cap `{x in B_2^n : <x, theta> >= 1 - h}` of the unit ball,
/// parametrized by its height `h in [0, 2]` to avoid cancellation for thin
/// caps.
pub fn unit_cap_volume(n: usize, h: f64) -> f64 {
    let h = h.clamp(0.0, 2.0);
    let full = unit_ball_volume(n);
    if h > 1.0 {
        return full - unit_cap_volume(n, 2.0 - h);
    }
    if h == 0.0 {
        return 0.0;
    }
    let a = 0.5 * (n as f64 + 1.0);
    let x = (h * (2.0 - h)).min(1.0);
    if x <= 0.5 {
        0.5 * full * beta_reg(a, 0.5, x)
    } else {
        // 1 - x = (1 - h)^2 keeps full precision near the half ball
        0.5 * full * (1.0 - beta_reg(0.5, a, (1.0 - h) * (1.0 - h)))
    }
}

/// First moment `int_cap <x, theta> dx` of the same cap.
pub fn unit_cap_moment(n: usize, h: f64) -> f64 {
    let h = h.clamp(0.0, 2.0);
    let x = (h * (2.0 - h)).max(0.0);
    unit_ball_volume(n - 1) * x.powf(0.5 * (n as f64 + 1.0)) / (n as f64 + 1.0)
}

/// The constant from the ball-shrinkage limit,
/// `(1/2) (n+1)/(n+3) ((n+1)/|B_2^{n-1}|)^{2/(n+1)}`.
pub fn shrinkage_constant(n: usize) -> f64 {
    let nf = n as f64;
    0.5 * (nf + 1.0) / (nf + 3.0) * ((nf + 1.0) / unit_ball_volume(n - 1)).powf(2.0 / (nf + 1.0))
}

/// The alternative constant `2 (n+1)/(n+3) (|B_2^{n-1}|/(n+1))^{2/(n+1)}`
/// stated alongside the volume-difference limit. Kept for comparison only.
pub fn alternative_constant(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * (nf + 1.0) / (nf + 3.0) * (unit_ball_volume(n - 1) / (nf + 1.0)).powf(2.0 / (nf + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, AdaptiveOptions};

    #[test]
    fn half_ball_cap_is_resolved() {
        for n in [2, 3] {
            let eps = 1e-9;
            let slope = unit_ball_volume(n - 1);
            let dv = unit_cap_volume(n, 1.0 + eps) - unit_cap_volume(n, 1.0);
            assert!((dv / eps - slope).abs() < 1e-6 * slope, "{n}");
        }
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn cap_volume_matches_slice_integral() {
        for n in 2..=6 {
            for &h in &[1e-6, 0.01, 0.3, 0.9, 1.0, 1.4, 1.99] {
                let d: f64 = 1.0 - h;
                let (v, _) = integrate(
                    |t| unit_ball_volume(n - 1) * (1.0 - t * t).max(0.0).powf(0.5 * (n as f64 - 1.0)),
                    d,
                    1.0,
                    AdaptiveOptions {
                        abs_tol: 0.0,
                        ..AdaptiveOptions::default()
                    },
                );
                let c = unit_cap_volume(n, h);
                assert!((c - v).abs() <= 1e-9 * v.max(1e-300), "n={n} h={h}: {c} vs {v}");
            }
        }
    }

    #[test]
    fn half_disc_cap() {
        assert!((unit_cap_volume(2, 1.0) - PI / 2.0).abs() < 1e-14);
        assert!((unit_cap_moment(2, 1.0) - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn constants_at_n2() {
        // (1/2)(3/5)(3/2)^{2/3}
        assert!((shrinkage_constant(2) - 0.5 * 0.6 * 1.5f64.powf(2.0 / 3.0)).abs() < 1e-15);
        assert!((shrinkage_constant(2) - 0.393_11).abs() < 1e-5);
        assert!((alternative_constant(2) - 0.915_8).abs() < 1e-4);
    }
}
