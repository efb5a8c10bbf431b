// Coefficient tables below carry their published digits, one or two beyond
// f64 granularity.
#![allow(clippy::excessive_precision)]

//! Standard Normal density, distribution function and quantile.
//!
//! The distribution function goes through Cody's rational approximations for
//! erf/erfc (relative error near machine precision over the whole line). The
//! quantile uses Acklam's rational approximation as a starter and polishes it
//! with two Halley steps against the high-precision CDF, which lands well
//! below 1e-13 relative error everywhere it is used. Every closed-form error
//! probability in the crate routes through these two functions.

/// 1/sqrt(2*pi)
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_68;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard Normal density.
#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard Normal distribution function Phi(x) = P(Z <= x).
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Upper tail P(Z > x), computed without cancellation for large x.
#[inline]
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

// Cody's coefficients for erf on |x| <= 0.46875.
const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_6e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_5e3,
    1.857_777_061_846_031_5e-1,
];
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_1e1,
    2.440_246_379_344_441_7e2,
    1.282_616_526_077_372_3e3,
    2.844_236_833_439_170_6e3,
];

// Cody's coefficients for erfc on 0.46875 < |x| <= 4.
const ERFC_C: [f64; 9] = [
    5.641_884_969_886_700_9e-1,
    8.883_149_794_388_375_9e0,
    6.611_919_063_714_163e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_690_9e2,
    1.712_047_612_634_070_6e3,
    2.051_078_377_826_071_5e3,
    1.230_339_354_797_997_2e3,
    2.153_115_354_744_038_5e-8,
];
const ERFC_D: [f64; 8] = [
    1.574_492_611_070_983_5e1,
    1.176_939_508_913_125e2,
    5.371_811_018_620_098_5e2,
    1.621_389_574_566_690_2e3,
    3.290_799_235_733_459_7e3,
    4.362_619_090_143_247e3,
    3.439_367_674_143_721_6e3,
    1.230_339_354_803_749_4e3,
];

// Cody's coefficients for erfc on |x| > 4.
const ERFC_P: [f64; 6] = [
    3.053_266_349_612_323_4e-1,
    3.603_448_999_498_044_4e-1,
    1.257_817_261_112_292_4e-1,
    1.608_378_514_874_227_7e-2,
    6.587_491_615_298_378e-4,
    1.631_538_713_730_209_8e-2,
];
const ERFC_Q: [f64; 5] = [
    2.568_520_192_289_822_4e0,
    1.872_952_849_923_460_5e0,
    5.279_051_029_514_284_1e-1,
    6.051_834_131_244_131_9e-2,
    2.335_204_976_268_691_8e-3,
];

const ONE_OVER_SQRT_PI: f64 = 5.641_895_835_477_562_9e-1;

/// Error function, |relative error| < 6e-16 over the core region.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        let z = if y > 1e-300 { y * y } else { 0.0 };
        let mut num = ERF_A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + ERF_A[i]) * z;
            den = (den + ERF_B[i]) * z;
        }
        x * (num + ERF_A[3]) / (den + ERF_B[3])
    } else {
        1.0 - erfc(x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        return 1.0 - erf(x);
    }
    let result = if y <= 4.0 {
        let mut num = ERFC_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERFC_C[i]) * y;
            den = (den + ERFC_D[i]) * y;
        }
        let r = (num + ERFC_C[7]) / (den + ERFC_D[7]);
        scaled_by_exp(y, r)
    } else {
        let z = 1.0 / (y * y);
        let mut num = ERFC_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERFC_P[i]) * z;
            den = (den + ERFC_Q[i]) * z;
        }
        let mut r = z * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
        r = (ONE_OVER_SQRT_PI - r) / y;
        scaled_by_exp(y, r)
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// exp(-y^2) * r, splitting y^2 into a coarse and a fine part so the
/// exponent of the large factor is computed from an exactly-representable
/// argument (Cody's trick; keeps the tail accurate to the last bits).
#[inline]
fn scaled_by_exp(y: f64, r: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * r
}

// Acklam's rational starter for the Normal quantile.
const INV_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239e0,
];
const INV_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const INV_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838e0,
    -2.549_732_539_343_734e0,
    4.374_664_141_464_968e0,
    2.938_163_982_698_783e0,
];
const INV_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996e0,
    3.754_408_661_907_416e0,
];

fn acklam_start(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((INV_C[0] * q + INV_C[1]) * q + INV_C[2]) * q + INV_C[3]) * q + INV_C[4]) * q
            + INV_C[5])
            / ((((INV_D[0] * q + INV_D[1]) * q + INV_D[2]) * q + INV_D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((INV_A[0] * r + INV_A[1]) * r + INV_A[2]) * r + INV_A[3]) * r + INV_A[4]) * r
            + INV_A[5])
            * q
            / (((((INV_B[0] * r + INV_B[1]) * r + INV_B[2]) * r + INV_B[3]) * r + INV_B[4]) * r
                + 1.0)
    } else {
        -acklam_start(1.0 - p)
    }
}

/// Standard Normal quantile Phi^{-1}(p) for p in (0, 1).
pub fn quantile(p: f64) -> crate::Result<f64> {
    if !(p.is_finite() && p > 0.0 && p < 1.0) {
        return Err(crate::Error::config(format!(
            "Normal quantile requires p in (0,1), got {p}"
        )));
    }
    let mut x = acklam_start(p);
    // Halley refinement against the high-precision CDF; two steps take the
    // ~1e-9 starter to full double precision.
    for _ in 0..2 {
        let e = cdf(x) - p;
        let u = e / pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

/// Upper-alpha critical value: the c with P(Z > c) = alpha.
pub fn upper_quantile(alpha: f64) -> crate::Result<f64> {
    Ok(-quantile(alpha)?)
}
