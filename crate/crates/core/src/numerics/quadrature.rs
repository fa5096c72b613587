//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The interval list is bisected worst-first until the summed error estimate
//! drops below `max(abs_tol, rel_tol * |I|)` or the subdivision budget runs
//! out. A result that misses its target is returned with `converged = false`
//! instead of an error so callers can decide whether to propagate it.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Abscissae of the 21-point Kronrod rule on [-1, 1] (non-negative half).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_643_474,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

/// Weights of the embedded 10-point Gauss rule (nodes XGK[1], XGK[3], ...).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T = f64> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: QuadValue> QuadratureResult<T> {
    pub fn into_result(self, context: &str, requested: f64) -> crate::Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(crate::Error::NonConvergence {
                context: context.to_string(),
                achieved: self.abs_error,
                requested,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn target(&self, value_magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_magnitude)
    }
}

struct Segment<T> {
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// One application of the 21-point Kronrod rule with its embedded Gauss
/// estimate. Returns (value, error estimate).
pub fn gauss_kronrod_21<T, F>(f: &mut F, lo: f64, hi: f64) -> (T, f64)
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = T::zero();
    let mut res_abs = f_center.magnitude() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).magnitude();
    let error = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    (value, error)
}

/// Adaptive quadrature of `f` over `[lo, hi]` with default subdivision budget.
pub fn adaptive_quad<T, F>(f: F, lo: f64, hi: f64, abs_tol: f64, rel_tol: f64) -> QuadratureResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    adaptive_quad_with(f, &[lo, hi], &QuadOptions::new(abs_tol, rel_tol))
}

/// Adaptive quadrature over the consecutive intervals delimited by `points`.
///
/// `points` must hold at least two entries; they are sorted and deduplicated
/// here, so callers may pass raw breakpoints (kinks of `max`/`min` clamps and
/// the like) together with the endpoints. Points outside the outer hull are
/// meaningless only in the sense that they widen it, so pass `[lo, hi]` first
/// and clip interior breaks beforehand.
pub fn adaptive_quad_with<T, F>(mut f: F, points: &[f64], opts: &QuadOptions) -> QuadratureResult<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let mut pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(b.abs()));

    if pts.len() < 2 {
        return QuadratureResult {
            value: T::zero(),
            abs_error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }

    let mut segments: Vec<Segment<T>> = Vec::with_capacity(pts.len() + 64);
    let mut evaluations = 0usize;
    for w in pts.windows(2) {
        let (value, error) = gauss_kronrod_21(&mut f, w[0], w[1]);
        evaluations += 21;
        segments.push(Segment {
            lo: w[0],
            hi: w[1],
            value,
            error,
        });
    }

    let mut subdivisions = 0usize;
    loop {
        let total = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        let error: f64 = segments.iter().map(|s| s.error).sum();

        if !total.is_finite_value() || !error.is_finite() {
            return QuadratureResult {
                value: total,
                abs_error: f64::INFINITY,
                evaluations,
                converged: false,
            };
        }
        let target = opts.target(total.magnitude());
        if error <= target {
            return QuadratureResult {
                value: total,
                abs_error: error,
                evaluations,
                converged: true,
            };
        }
        if subdivisions >= opts.max_subdivisions {
            return QuadratureResult {
                value: total,
                abs_error: error,
                evaluations,
                converged: false,
            };
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval exhausted at machine resolution.
            return QuadratureResult {
                value: total,
                abs_error: error,
                evaluations,
                converged: false,
            };
        }
        let (v1, e1) = gauss_kronrod_21(&mut f, seg.lo, mid);
        let (v2, e2) = gauss_kronrod_21(&mut f, mid, seg.hi);
        evaluations += 42;
        subdivisions += 1;
        segments.push(Segment {
            lo: seg.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            lo: mid,
            hi: seg.hi,
            value: v2,
            error: e2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_weights_are_consistent() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
        // The Gauss part alone must integrate x^18 exactly.
        let g18: f64 = (0..5).map(|i| 2.0 * WG[i] * XGK[2 * i + 1].powi(18)).sum();
        assert!((g18 - 2.0 / 19.0).abs() < 1e-14);
        // The Kronrod rule integrates x^30 exactly.
        let k30: f64 = (0..10).map(|i| 2.0 * WGK[i] * XGK[i].powi(30)).sum();
        assert!((k30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial() {
        let r = adaptive_quad(|x: f64| x * x, 0.0, 1.0, 1e-12, 1e-12);
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let r = adaptive_quad(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10);
        assert!(r.converged, "{r:?}");
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let f = |x: f64| (x - 0.3).abs();
        let r = adaptive_quad_with(f, &[0.0, 0.3, 1.0], &QuadOptions::new(1e-13, 1e-13));
        assert!(r.converged);
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-13);
        // Unsorted and duplicated points are tolerated.
        let r2 = adaptive_quad_with(f, &[1.0, 0.3, 0.0, 0.3], &QuadOptions::new(1e-13, 1e-13));
        assert_eq!(r.value, r2.value);
    }

    #[test]
    fn non_convergence_is_flagged() {
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        let r = adaptive_quad_with(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0], &opts);
        assert!(!r.converged);
        assert!(r.abs_error > 1e-14);
        assert!(r.into_result("test", 1e-14).is_err());
    }

    #[test]
    fn complex_integrand() {
        let r: QuadratureResult<Complex64> = adaptive_quad(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            1e-12,
            1e-12,
        );
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }
}
