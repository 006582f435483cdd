//! One-dimensional quadrature: Gauss-Legendre rules and an adaptive
//! Gauss-Kronrod (G10/K21) integrator for vector-valued integrands.

use std::borrow::Cow;
use std::f64::consts::PI;
use std::sync::OnceLock;

const CACHED_ORDERS: usize = 64;
static CACHE: [OnceLock<GaussLegendre>; CACHED_ORDERS] = [const { OnceLock::new() }; CACHED_ORDERS];

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Rule of order `n`; orders below 64 are computed once per process.
    pub fn cached(n: usize) -> Cow<'static, Self> {
        match CACHE.get(n) {
            Some(cell) => Cow::Borrowed(cell.get_or_init(|| Self::new(n))),
            None => Cow::Owned(Self::new(n)),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Settings for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_intervals: 2000,
        }
    }
}

/// Result of an adaptive integration. `value` has the dimension of the
/// integrand; `error` is the summed Kronrod-minus-Gauss estimate measured on
/// the component used for error control.
#[derive(Debug, Clone)]
pub struct Integral {
    pub value: Vec<f64>,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

fn kronrod21<F>(f: &mut F, a: f64, b: f64, dim: usize, control: usize) -> Segment
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let mut buf2 = vec![0.0; dim];

    f(center, &mut buf);
    for k in 0..dim {
        kron[k] = WGK[10] * buf[k];
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        f(center - dx, &mut buf);
        f(center + dx, &mut buf2);
        for k in 0..dim {
            let s = buf[k] + buf2[k];
            kron[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    for k in 0..dim {
        kron[k] *= half;
        gauss[k] *= half;
    }
    let error = (kron[control] - gauss[control]).abs();
    Segment {
        a,
        b,
        value: kron,
        error,
    }
}

/// Adaptive G10/K21 integration of a vector-valued integrand over `[a, b]`
/// with interior `breakpoints` (kinks of the integrand). The integrand writes
/// `dim` values into its output slice; error control is applied to component
/// `control` (the others ride along on the same subdivision).
pub fn integrate_adaptive<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    dim: usize,
    control: usize,
    opts: AdaptiveOptions,
) -> Integral
where
    F: FnMut(f64, &mut [f64]),
{
    let mut cuts: Vec<f64> = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (b - a).abs());
    cuts.extend(inner);
    cuts.push(b);

    let mut segments: Vec<Segment> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod21(&mut f, w[0], w[1], dim, control))
        .collect();

    loop {
        let total: f64 = segments.iter().map(|s| s.value[control]).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= tol || segments.len() >= opts.max_intervals {
            break;
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .unwrap();
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            segments.push(seg);
            break;
        }
        segments.push(kronrod21(&mut f, seg.a, mid, dim, control));
        segments.push(kronrod21(&mut f, mid, seg.b, dim, control));
    }

    let mut value = vec![0.0; dim];
    let mut error = 0.0;
    for s in &segments {
        for k in 0..dim {
            value[k] += s.value[k];
        }
        error += s.error;
    }
    Integral {
        value,
        error,
        intervals: segments.len(),
    }
}

/// Scalar convenience wrapper around [`integrate_adaptive`].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: AdaptiveOptions) -> (f64, f64) {
    let r = integrate_adaptive(|t, out| out[0] = f(t), a, b, &[], 1, 0, opts);
    (r.value[0], r.error)
}

/// Smooth endpoint-clustering map `u -> a + (b - a)(3u^2 - 2u^3)` on
/// `[0, 1]`, with its derivative. Square-root behaviour at either end of
/// `[a, b]` becomes smooth in `u`.
pub fn smoothstep_map(a: f64, b: f64, u: f64) -> (f64, f64) {
    let s = u * u * (3.0 - 2.0 * u);
    let ds = 6.0 * u * (1.0 - u);
    (a + (b - a) * s, (b - a) * ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(6);
        // degree 11 is exact for 6 nodes
        let v = gl.integrate(-1.0, 2.0, |x| x.powi(11) - 3.0 * x.powi(4));
        let exact = (2f64.powi(12) - 1.0) / 12.0 - 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs());
        let wsum: f64 = gl.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_high_order_nodes_are_symmetric() {
        let gl = GaussLegendre::new(41);
        for i in 0..41 {
            assert!((gl.nodes[i] + gl.nodes[40 - i]).abs() < 1e-15);
        }
        assert!((gl.integrate(0.0, PI, f64::sin) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let (v, _) = integrate(f64::sqrt, 0.0, 1.0, AdaptiveOptions::default());
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn adaptive_respects_breakpoints() {
        let r = integrate_adaptive(
            |t, out| {
                out[0] = t.abs();
                out[1] = t;
            },
            -1.0,
            2.0,
            &[0.0],
            2,
            0,
            AdaptiveOptions::default(),
        );
        assert!((r.value[0] - 2.5).abs() < 1e-13);
        assert!((r.value[1] - 1.5).abs() < 1e-13);
        assert_eq!(r.intervals, 2);
    }

    #[test]
    fn smoothstep_removes_sqrt_singularity() {
        let gl = GaussLegendre::new(30);
        let v = gl.integrate(0.0, 1.0, |u| {
            let (t, dt) = smoothstep_map(0.0, 1.0, u);
            (t * (1.0 - t)).sqrt() * dt
        });
        assert!((v - PI / 8.0).abs() < 1e-9);
    }
}
