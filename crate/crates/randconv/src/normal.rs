//! Standard normal CDF, survival, quantile and log-tail evaluations.
//!
//! The error-function kernel is W. J. Cody's rational-minimax scheme
//! (the classic CALERF segments), which keeps relative error near machine
//! epsilon on all three intervals and yields a scaled complement `erfcx`
//! that never underflows. Log-CDF values stay finite far beyond the point
//! where the CDF itself rounds to zero, which the threshold solvers rely on.

use std::f64::consts::SQRT_2;

const THRESH: f64 = 0.46875;
const SQRPI: f64 = 5.641_895_835_477_562_9e-1; // 1/sqrt(pi)

const A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_56e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_47e3,
    1.857_777_061_846_031_53e-1,
];
const B: [f64; 4] = [
    2.360_129_095_234_412_09e1,
    2.440_246_379_344_441_73e2,
    1.282_616_526_077_372_28e3,
    2.844_236_833_439_170_62e3,
];
const C: [f64; 9] = [
    5.641_884_969_886_700_9e-1,
    8.883_149_794_388_375_94e0,
    6.611_919_063_714_162_95e1,
    2.986_351_381_974_001_31e2,
    8.819_522_212_417_690_9e2,
    1.712_047_612_634_070_58e3,
    2.051_078_377_826_071_47e3,
    1.230_339_354_797_997_25e3,
    2.153_115_354_744_038_46e-8,
];
const D: [f64; 8] = [
    1.574_492_611_070_983_47e1,
    1.176_939_508_913_124_99e2,
    5.371_811_018_620_098_58e2,
    1.621_389_574_566_690_19e3,
    3.290_799_235_733_459_63e3,
    4.362_619_090_143_247_16e3,
    3.439_367_674_143_721_64e3,
    1.230_339_354_803_749_42e3,
];
const P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_42e0,
    1.872_952_849_923_460_47e0,
    5.279_051_029_514_284_12e-1,
    6.051_834_131_244_131_91e-2,
    2.335_204_976_268_691_85e-3,
];

/// `exp(x*x) * erfc(x)` for `x >= 0`; never underflows.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < THRESH {
        return (x * x).exp() * (1.0 - erf(x));
    }
    if x <= 4.0 {
        let mut num = C[8] * x;
        let mut den = x;
        for i in 0..7 {
            num = (num + C[i]) * x;
            den = (den + D[i]) * x;
        }
        (num + C[7]) / (den + D[7])
    } else {
        let ysq = 1.0 / (x * x);
        let mut num = P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + P[i]) * ysq;
            den = (den + Q[i]) * ysq;
        }
        let r = ysq * (num + P[4]) / (den + Q[4]);
        (SQRPI - r) / x
    }
}

pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= THRESH {
        let ysq = if y > 1.11e-16 { y * y } else { 0.0 };
        let mut num = A[4] * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + A[i]) * ysq;
            den = (den + B[i]) * ysq;
        }
        x * (num + A[3]) / (den + B[3])
    } else if x > 0.0 {
        1.0 - erfc_positive(y)
    } else {
        erfc_positive(y) - 1.0
    }
}

pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc_positive(-x)
    } else {
        erfc_positive(x)
    }
}

fn erfc_positive(y: f64) -> f64 {
    if y < THRESH {
        return 1.0 - erf(y);
    }
    if y > 26.7 {
        return 0.0; // below the smallest subnormal
    }
    // erfc = erfcx * exp(-y^2), with the exponent split to limit rounding
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    erfcx(y) * (-ysq * ysq).exp() * (-del).exp()
}

/// Standard normal density.
pub fn std_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF.
pub fn std_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal survival function `1 - CDF`.
pub fn std_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// `ln` of the standard normal CDF, finite for any representable `x`.
pub fn ln_std_cdf(x: f64) -> f64 {
    if x > 0.0 {
        // ln(1 - sf); sf <= 1/2 so ln_1p is exact
        (-std_sf(x)).ln_1p()
    } else {
        let z = -x / SQRT_2;
        (0.5 * erfcx(z)).ln() - z * z
    }
}

/// `ln` of the standard normal survival function.
pub fn ln_std_sf(x: f64) -> f64 {
    ln_std_cdf(-x)
}

/// Standard normal quantile, `p` in (0, 1).
///
/// Acklam's rational initialization followed by two Halley corrections
/// against [`std_cdf`], so the quantile is self-consistent with the CDF
/// used everywhere else in the crate.
pub fn std_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1), got {p}");
    const AQ: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239e0,
    ];
    const BQ: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const CQ: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838e0,
        -2.549_732_539_343_734e0,
        4.374_664_141_464_968e0,
        2.938_163_982_698_783e0,
    ];
    const DQ: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996e0,
        3.754_408_661_907_416e0,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((CQ[0] * q + CQ[1]) * q + CQ[2]) * q + CQ[3]) * q + CQ[4]) * q + CQ[5])
            / ((((DQ[0] * q + DQ[1]) * q + DQ[2]) * q + DQ[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((AQ[0] * r + AQ[1]) * r + AQ[2]) * r + AQ[3]) * r + AQ[4]) * r + AQ[5]) * q
            / (((((BQ[0] * r + BQ[1]) * r + BQ[2]) * r + BQ[3]) * r + BQ[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((CQ[0] * q + CQ[1]) * q + CQ[2]) * q + CQ[3]) * q + CQ[4]) * q + CQ[5])
            / ((((DQ[0] * q + DQ[1]) * q + DQ[2]) * q + DQ[3]) * q + 1.0)
    };
    for _ in 0..2 {
        let pdf = std_pdf(x);
        if pdf <= 0.0 {
            break;
        }
        let u = (std_cdf(x) - p) / pdf;
        x -= u / (1.0 + x * u / 2.0);
    }
    x
}

/// log(exp(a) + exp(b)) without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(exp(a) - exp(b)) for a > b.
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    debug_assert!(a >= b);
    if a == b {
        return f64::NEG_INFINITY;
    }
    a + (-((b - a).exp())).ln_1p()
}
