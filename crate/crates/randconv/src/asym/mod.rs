//! Second-order limit curves for i.i.d. conversion and their inversion.
//!
//! With the copy count L = a·n + b·√n and a at the entropy ratio, the
//! maximal conversion fidelity converges to a curve in b determined by two
//! Gaussians: the source fluctuation N(0, V(P)) and the target fluctuation
//! N(H(Q)·b, H(P)V(Q)/H(Q)), both on the nat scale. Which curve applies is
//! decided by comparing H/V of the two distributions; uniform distributions
//! get their own closed forms. Every curve here is non-increasing in b
//! (more copies are harder), and `second_order_rate` inverts the applicable
//! curve at a requested confidence.
//!
//! All four non-uniform branch ingredients are evaluated in the log domain
//! past the point where CDFs underflow, so threshold residuals stay
//! meaningful at extreme arguments.

mod attain;

pub use attain::{attainment_fidelity, AttainmentCurve, CurveSegment};

use crate::dist::{stats, FiniteDist, SourceStats};
use crate::normal::{ln_std_cdf, ln_std_sf, std_cdf, std_quantile, std_sf};
use crate::{Error, Result};
use serde::Serialize;

/// Tolerance for deciding that H(P)/V(P) and H(Q)/V(Q) coincide.
const RATIO_EQ_TOL: f64 = 1e-12;
/// Tolerance for deciding the first-order rate sits at the entropy ratio.
const ON_RATE_TOL: f64 = 1e-12;
/// Threshold-equation residual bound, in log units.
const THRESHOLD_RESIDUAL_TOL: f64 = 1e-10;

/// Mean and variance of one Gaussian on the nat fluctuation scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianSpec {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianSpec {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "variance must be positive, got {variance}"
            )));
        }
        Ok(Self { mean, variance })
    }

    pub fn sigma(self) -> f64 {
        self.variance.sqrt()
    }

    fn z(self, x: f64) -> f64 {
        (x - self.mean) / self.sigma()
    }

    pub fn ln_pdf(self, x: f64) -> f64 {
        let z = self.z(x);
        -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI * self.variance).ln()
    }

    pub fn pdf(self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(self, x: f64) -> f64 {
        std_cdf(self.z(x))
    }

    pub fn sf(self, x: f64) -> f64 {
        std_sf(self.z(x))
    }

    pub fn ln_cdf(self, x: f64) -> f64 {
        ln_std_cdf(self.z(x))
    }

    pub fn ln_sf(self, x: f64) -> f64 {
        ln_std_sf(self.z(x))
    }
}

/// Source fluctuation Gaussian N(0, V(P)). Errors when P is uniform.
pub fn source_gaussian(p: &FiniteDist) -> Result<GaussianSpec> {
    let s = stats(p);
    GaussianSpec::new(0.0, s.v)
}

/// Target fluctuation Gaussian N(H(Q)·b, H(P)V(Q)/H(Q)) for the pair (P, Q)
/// at second-order rate b. Errors when Q is uniform.
pub fn target_gaussian(p: &FiniteDist, q: &FiniteDist, b: f64) -> Result<GaussianSpec> {
    let sp = stats(p);
    let sq = stats(q);
    GaussianSpec::new(sq.h * b, sp.h * sq.v / sq.h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeKind {
    SourceUniform,
    TargetUniform,
    RatioGreater,
    RatioLess,
    RatioEqual,
}

impl RegimeKind {
    pub fn label(self) -> &'static str {
        match self {
            RegimeKind::SourceUniform => "source-uniform",
            RegimeKind::TargetUniform => "target-uniform",
            RegimeKind::RatioGreater => "ratio-greater",
            RegimeKind::RatioLess => "ratio-less",
            RegimeKind::RatioEqual => "ratio-equal",
        }
    }
}

/// Regime classification together with the H/V ratio constant when both
/// varentropies are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConversionRegime {
    pub kind: RegimeKind,
    pub c_pq: Option<f64>,
}

/// Classifies the pair. Uniform flags win; otherwise the constant
/// C = (H(P)/V(P)) / (H(Q)/V(Q)) splits three cases at 1.
pub fn regime_classify(p: &FiniteDist, q: &FiniteDist) -> Result<ConversionRegime> {
    let sp = stats(p);
    let sq = stats(q);
    classify_stats(sp, sq)
}

fn classify_stats(sp: SourceStats, sq: SourceStats) -> Result<ConversionRegime> {
    if sp.is_uniform && sq.is_uniform {
        return Err(Error::BothUniform);
    }
    if sp.is_uniform {
        return Ok(ConversionRegime {
            kind: RegimeKind::SourceUniform,
            c_pq: None,
        });
    }
    if sq.is_uniform {
        return Ok(ConversionRegime {
            kind: RegimeKind::TargetUniform,
            c_pq: None,
        });
    }
    let c = (sp.h / sp.v) * (sq.v / sq.h);
    let kind = if (c - 1.0).abs() <= RATIO_EQ_TOL {
        RegimeKind::RatioEqual
    } else if c > 1.0 {
        RegimeKind::RatioGreater
    } else {
        RegimeKind::RatioLess
    };
    Ok(ConversionRegime { kind, c_pq: Some(c) })
}

fn expect_regime(p: &FiniteDist, q: &FiniteDist, want: RegimeKind) -> Result<ConversionRegime> {
    let r = regime_classify(p, q)?;
    if r.kind != want {
        return Err(Error::WrongRegime {
            expected: want.label().into(),
            actual: r.kind.label().into(),
        });
    }
    Ok(r)
}

/// Which threshold equation to solve: the CDF-ratio one (`Alpha`, valid in
/// the ratio-greater regime) or the survival-ratio one (`Beta`, ratio-less).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    Alpha,
    Beta,
}

/// Solves the unique crossing of the density ratio with the CDF ratio
/// (`Alpha`) or the survival ratio (`Beta`), in the log domain.
pub fn solve_threshold(p: &FiniteDist, q: &FiniteDist, b: f64, which: Threshold) -> Result<f64> {
    match which {
        Threshold::Alpha => expect_regime(p, q, RegimeKind::RatioGreater)?,
        Threshold::Beta => expect_regime(p, q, RegimeKind::RatioLess)?,
    };
    let g1 = source_gaussian(p)?;
    let g2 = target_gaussian(p, q, b)?;
    solve_threshold_gauss(g1, g2, which)
}

fn solve_threshold_gauss(g1: GaussianSpec, g2: GaussianSpec, which: Threshold) -> Result<f64> {
    let h = |x: f64| -> f64 {
        let dens = g1.ln_pdf(x) - g2.ln_pdf(x);
        let tail = match which {
            Threshold::Alpha => g1.ln_cdf(x) - g2.ln_cdf(x),
            Threshold::Beta => g1.ln_sf(x) - g2.ln_sf(x),
        };
        dens - tail
    };
    let sigma = g1.sigma().max(g2.sigma());
    // the crossing sits near the means for well-separated variances but
    // escapes like mean·C/(C-1) toward the equal-ratio boundary, so the
    // window starts at ±40 sigma and doubles until a sign change appears
    const STEPS: usize = 1600;
    let mut bracket = None;
    let mut half_width = 40.0 * sigma;
    let (mut lo, mut hi) = (0.0, 0.0);
    for _ in 0..16 {
        lo = g1.mean.min(g2.mean) - half_width;
        hi = g1.mean.max(g2.mean) + half_width;
        let dx = (hi - lo) / STEPS as f64;
        let mut x0 = lo;
        let mut h0 = h(x0);
        for i in 1..=STEPS {
            let x1 = lo + i as f64 * dx;
            let h1 = h(x1);
            if h0 == 0.0 {
                bracket = Some((x0, x0));
                break;
            }
            if h0 * h1 <= 0.0 {
                bracket = Some((x0, x1));
                break;
            }
            x0 = x1;
            h0 = h1;
        }
        if bracket.is_some() {
            break;
        }
        half_width *= 2.0;
    }
    let (mut a, mut c) = bracket.ok_or(Error::BracketNotFound(lo, hi))?;
    let mut ha = h(a);
    for _ in 0..200 {
        let m = 0.5 * (a + c);
        if m <= a || m >= c {
            break;
        }
        let hm = h(m);
        if ha * hm > 0.0 {
            a = m;
            ha = hm;
        } else {
            c = m;
        }
    }
    let root = 0.5 * (a + c);
    let residual = h(root).abs();
    if residual > THRESHOLD_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge(residual, THRESHOLD_RESIDUAL_TOL));
    }
    Ok(root)
}

/// ∫_{-∞}^{x} √(N₁(t) N₂(t)) dt for two Gaussian densities, in closed form.
/// `x = +∞` gives the total geometric-mean overlap.
pub(crate) fn overlap_cdf(g1: GaussianSpec, g2: GaussianSpec, x: f64) -> f64 {
    let (v1, v2) = (g1.variance, g2.variance);
    let dm = g1.mean - g2.mean;
    let ln_pref = 0.5 * (2.0 * (v1 * v2).sqrt() / (v1 + v2)).ln() - dm * dm / (4.0 * (v1 + v2));
    if x == f64::INFINITY {
        return ln_pref.exp();
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let mbar = (g1.mean * v2 + g2.mean * v1) / (v1 + v2);
    let z = (x - mbar) * ((v1 + v2) / (2.0 * v1 * v2)).sqrt();
    (ln_pref + ln_std_cdf(z)).exp()
}

/// Geometric-mean overlap of the source and shifted-target Gaussians,
/// accumulated up to `x` (pass `f64::INFINITY` for the total).
pub fn gaussian_overlap(p: &FiniteDist, q: &FiniteDist, b: f64, x: f64) -> Result<f64> {
    let g1 = source_gaussian(p)?;
    let g2 = target_gaussian(p, q, b)?;
    Ok(overlap_cdf(g1, g2, x))
}

fn f1_gauss(g1: GaussianSpec, g2: GaussianSpec) -> Result<f64> {
    let alpha = solve_threshold_gauss(g1, g2, Threshold::Alpha)?;
    let head = (0.5 * (g1.ln_cdf(alpha) + g2.ln_cdf(alpha))).exp();
    let tail = overlap_tail(g1, g2, alpha);
    Ok((head + tail).min(1.0))
}

fn f2_gauss(g1: GaussianSpec, g2: GaussianSpec) -> Result<f64> {
    let beta = solve_threshold_gauss(g1, g2, Threshold::Beta)?;
    let head = overlap_cdf(g1, g2, beta);
    let tail = (0.5 * (g1.ln_sf(beta) + g2.ln_sf(beta))).exp();
    Ok((head + tail).min(1.0))
}

/// I(∞) − I(x), evaluated through the survival function so the two terms
/// never cancel.
fn overlap_tail(g1: GaussianSpec, g2: GaussianSpec, x: f64) -> f64 {
    let (v1, v2) = (g1.variance, g2.variance);
    let dm = g1.mean - g2.mean;
    let ln_pref = 0.5 * (2.0 * (v1 * v2).sqrt() / (v1 + v2)).ln() - dm * dm / (4.0 * (v1 + v2));
    let mbar = (g1.mean * v2 + g2.mean * v1) / (v1 + v2);
    let z = (x - mbar) * ((v1 + v2) / (2.0 * v1 * v2)).sqrt();
    (ln_pref + ln_std_sf(z)).exp()
}

/// Limit fidelity curve in the ratio-greater regime.
pub fn f1_limit(p: &FiniteDist, q: &FiniteDist, b: f64) -> Result<f64> {
    expect_regime(p, q, RegimeKind::RatioGreater)?;
    f1_gauss(source_gaussian(p)?, target_gaussian(p, q, b)?)
}

/// Limit fidelity curve in the ratio-less regime.
pub fn f2_limit(p: &FiniteDist, q: &FiniteDist, b: f64) -> Result<f64> {
    expect_regime(p, q, RegimeKind::RatioLess)?;
    f2_gauss(source_gaussian(p)?, target_gaussian(p, q, b)?)
}

/// Limit fidelity curve in the ratio-equal regime: 1 for b ≤ 0 and a
/// Gaussian-overlap decay exp(−(H(Q)b)²/(8V(P))) for b > 0.
///
/// The decaying branch sits on the positive-b side, matching the other
/// regimes: producing extra copies is what costs fidelity, while a deficit
/// of copies of an equal-ratio target is free (for Q = P and L ≤ n the
/// finite-n optimum is exactly 1, since P^n is majorized by P^L).
pub fn feq_limit(p: &FiniteDist, q: &FiniteDist, b: f64) -> Result<f64> {
    expect_regime(p, q, RegimeKind::RatioEqual)?;
    let sp = stats(p);
    let sq = stats(q);
    if b <= 0.0 {
        Ok(1.0)
    } else {
        let t = sq.h * b;
        Ok((-t * t / (8.0 * sp.v)).exp())
    }
}

/// Limit of the maximal conversion fidelity for P^n → Q^(a·n + b·√n).
///
/// Away from the entropy ratio the limit is 1 (below) or 0 (above),
/// independent of b. At the ratio it dispatches on the regime.
pub fn limit_fidelity(p: &FiniteDist, q: &FiniteDist, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "first-order rate must be positive, got {a}"
        )));
    }
    let sp = stats(p);
    let sq = stats(q);
    let regime = classify_stats(sp, sq)?;
    let ratio = sp.h / sq.h;
    if (a - ratio).abs() > ON_RATE_TOL * ratio {
        return Ok(if a < ratio { 1.0 } else { 0.0 });
    }
    match regime.kind {
        RegimeKind::SourceUniform => {
            // uniform-source closed form on the nat scale
            Ok(std_cdf(-sq.h.powf(1.5) * b / (sp.h * sq.v).sqrt()).sqrt())
        }
        RegimeKind::TargetUniform => Ok(std_sf(b * sq.h / sp.v.sqrt()).sqrt()),
        RegimeKind::RatioGreater => f1_limit(p, q, b),
        RegimeKind::RatioLess => f2_limit(p, q, b),
        RegimeKind::RatioEqual => feq_limit(p, q, b),
    }
}

/// Rate inversion output: first-order rate, second-order rate, regime,
/// threshold point (where one exists) and the curve residual at r2.
#[derive(Debug, Clone, Serialize)]
pub struct RateResult {
    pub a: f64,
    pub r2: f64,
    pub regime: ConversionRegime,
    pub threshold: Option<f64>,
    pub residual: f64,
}

/// The optimal second-order rate at confidence `nu`: the b at which the
/// regime's limit curve crosses `nu`. Closed forms for the uniform and
/// equal-ratio regimes, monotone bisection otherwise.
pub fn second_order_rate(p: &FiniteDist, q: &FiniteDist, nu: f64) -> Result<RateResult> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence must be in (0,1), got {nu}"
        )));
    }
    let sp = stats(p);
    let sq = stats(q);
    let regime = classify_stats(sp, sq)?;
    let a = sp.h / sq.h;
    let (r2, threshold) = match regime.kind {
        RegimeKind::TargetUniform => {
            (-sp.v.sqrt() * std_quantile(nu * nu) / sq.h, None)
        }
        RegimeKind::SourceUniform => (
            -(sp.h * sq.v).sqrt() * std_quantile(nu * nu) / sq.h.powf(1.5),
            None,
        ),
        RegimeKind::RatioEqual => {
            ((8.0 * sp.v * (1.0 / nu).ln()).sqrt() / sq.h, None)
        }
        RegimeKind::RatioGreater | RegimeKind::RatioLess => {
            let curve = |b: f64| limit_fidelity(p, q, a, b);
            let r2 = invert_monotone(&curve, nu)?;
            let which = if regime.kind == RegimeKind::RatioGreater {
                Threshold::Alpha
            } else {
                Threshold::Beta
            };
            (r2, Some(solve_threshold(p, q, r2, which)?))
        }
    };
    let residual = (limit_fidelity(p, q, a, r2)? - nu).abs();
    Ok(RateResult {
        a,
        r2,
        regime,
        threshold,
        residual,
    })
}

fn invert_monotone(curve: &dyn Fn(f64) -> Result<f64>, nu: f64) -> Result<f64> {
    let mut lo = -1.0;
    let mut n = 0;
    while curve(lo)? < nu {
        lo *= 2.0;
        n += 1;
        if n > 40 {
            return Err(Error::BracketNotFound(lo, 0.0));
        }
    }
    let mut hi = 1.0;
    n = 0;
    while curve(hi)? > nu {
        hi *= 2.0;
        n += 1;
        if n > 40 {
            return Err(Error::BracketNotFound(0.0, hi));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve(mid)? >= nu {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Second-order copy-count expansion a·n + r2·√n at confidence `nu`.
pub fn ldn_expand(p: &FiniteDist, q: &FiniteDist, nu: f64, n: u64) -> Result<f64> {
    let rate = second_order_rate(p, q, nu)?;
    Ok(rate.a * n as f64 + rate.r2 * (n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;

    fn d(v: &[f64]) -> FiniteDist {
        FiniteDist::new(v.to_vec()).unwrap()
    }

    fn p82() -> FiniteDist {
        d(&[0.8, 0.2])
    }
    fn q64() -> FiniteDist {
        d(&[0.6, 0.4])
    }

    #[test]
    fn classify_examples() {
        let r = regime_classify(&p82(), &p82()).unwrap();
        assert_eq!(r.kind, RegimeKind::RatioEqual);
        assert!((r.c_pq.unwrap() - 1.0).abs() < 1e-12);
        let r = regime_classify(&p82(), &q64()).unwrap();
        assert_eq!(r.kind, RegimeKind::RatioLess);
        assert!((r.c_pq.unwrap() - 0.095_407_854_959_155_75).abs() < 1e-12);
        let r = regime_classify(&q64(), &p82()).unwrap();
        assert_eq!(r.kind, RegimeKind::RatioGreater);
        let r = regime_classify(&p82(), &FiniteDist::uniform(2)).unwrap();
        assert_eq!(r.kind, RegimeKind::TargetUniform);
        assert!(r.c_pq.is_none());
        let r = regime_classify(&FiniteDist::uniform(3), &p82()).unwrap();
        assert_eq!(r.kind, RegimeKind::SourceUniform);
        assert!(matches!(
            regime_classify(&FiniteDist::uniform(2), &FiniteDist::uniform(4)),
            Err(Error::BothUniform)
        ));
    }

    #[test]
    fn threshold_anchors() {
        // 40-digit reference roots for the two threshold equations
        let beta = solve_threshold(&p82(), &q64(), 0.0, Threshold::Beta).unwrap();
        assert!((beta - (-0.235_410_777_026_696_36)).abs() < 1e-10);
        let beta7 = solve_threshold(&p82(), &q64(), 0.7, Threshold::Beta).unwrap();
        assert!((beta7 - 0.338_025_161_498_171_02).abs() < 1e-10);
        let alpha = solve_threshold(&q64(), &p82(), 0.3, Threshold::Alpha).unwrap();
        assert!((alpha - 0.237_830_798_665_086_44).abs() < 1e-10);
        assert!(matches!(
            solve_threshold(&q64(), &p82(), 0.0, Threshold::Beta),
            Err(Error::WrongRegime { .. })
        ));
    }

    #[test]
    fn limit_curve_anchors() {
        assert!((f2_limit(&p82(), &q64(), 0.0).unwrap() - 0.895_902_243_132_612_27).abs() < 1e-11);
        assert!((f2_limit(&p82(), &q64(), 0.7).unwrap() - 0.680_235_836_630_767_40).abs() < 1e-11);
        assert!((f1_limit(&q64(), &p82(), 0.3).unwrap() - 0.849_346_199_594_131_21).abs() < 1e-11);
    }

    #[test]
    fn overlap_closed_form_vs_quadrature() {
        let g1 = GaussianSpec::new(0.0, 0.31).unwrap();
        let g2 = GaussianSpec::new(0.47, 0.11).unwrap();
        assert!((overlap_cdf(g1, g2, 0.25) - 0.332_971_685_876_757_82).abs() < 1e-12);
        assert!((overlap_cdf(g1, g2, f64::INFINITY) - 0.822_194_170_408_427_25).abs() < 1e-12);
        let quad = adaptive_simpson(
            &|t| (g1.pdf(t) * g2.pdf(t)).sqrt(),
            -12.0,
            0.25,
            1e-12,
        );
        assert!((overlap_cdf(g1, g2, 0.25) - quad).abs() < 1e-10);
    }

    #[test]
    fn overlap_trivial_cases() {
        // identical Gaussians overlap to 1
        let p = p82();
        let total = gaussian_overlap(&p, &p, 0.0, f64::INFINITY).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(gaussian_overlap(&p, &p, 0.0, f64::NEG_INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn feq_branches() {
        let p = p82();
        assert_eq!(feq_limit(&p, &p, -0.5).unwrap(), 1.0);
        assert_eq!(feq_limit(&p, &p, 0.0).unwrap(), 1.0);
        let s = stats(&p);
        let bstar = (8.0 * s.v).sqrt() / s.h;
        assert!((bstar - 3.134_303_424_151_947_8).abs() < 1e-12);
        let v = feq_limit(&p, &p, bstar).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn limit_fidelity_dispatch() {
        let p = p82();
        let q = q64();
        let sp = stats(&p);
        let sq = stats(&q);
        let ratio = sp.h / sq.h;
        assert_eq!(limit_fidelity(&p, &q, 0.5 * ratio, 3.0).unwrap(), 1.0);
        assert_eq!(limit_fidelity(&p, &q, 1.5 * ratio, -3.0).unwrap(), 0.0);
        // uniform target at b = 0: sqrt(1 - G(0)) = 2^-1/2
        let f = limit_fidelity(&p, &FiniteDist::uniform(2), sp.h / std::f64::consts::LN_2, 0.0)
            .unwrap();
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        // uniform source at b = 0: sqrt(G(0)) = 2^-1/2
        let f = limit_fidelity(
            &FiniteDist::uniform(2),
            &q,
            std::f64::consts::LN_2 / sq.h,
            0.0,
        )
        .unwrap();
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(matches!(
            limit_fidelity(&FiniteDist::uniform(2), &FiniteDist::uniform(3), 1.0, 0.0),
            Err(Error::BothUniform)
        ));
    }

    #[test]
    fn curves_monotone_on_grid() {
        let p = p82();
        let q = q64();
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let b = -4.0 + 8.0 * i as f64 / 100.0;
            let v = f2_limit(&p, &q, b).unwrap();
            assert!(v <= prev + 1e-12, "f2 not monotone at b={b}");
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
        prev = f64::INFINITY;
        for i in 0..=100 {
            let b = -4.0 + 8.0 * i as f64 / 100.0;
            let v = f1_limit(&q, &p, b).unwrap();
            assert!(v <= prev + 1e-12, "f1 not monotone at b={b}");
            prev = v;
        }
        // ratio-equal: constant 1 for b <= 0, strictly decreasing after
        prev = 1.0;
        for i in 0..=50 {
            let b = -2.0 + 4.0 * i as f64 / 50.0;
            let v = feq_limit(&p, &p, b).unwrap();
            if b <= 0.0 {
                assert_eq!(v, 1.0);
            } else {
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn curve_asymptotes() {
        let p = p82();
        let q = q64();
        assert!(f2_limit(&p, &q, -8.0).unwrap() > 1.0 - 1e-6);
        assert!(f2_limit(&p, &q, 8.0).unwrap() < 1e-4);
        assert!(f1_limit(&q, &p, -8.0).unwrap() > 1.0 - 1e-6);
        assert!(f1_limit(&q, &p, 8.0).unwrap() < 0.02);
    }

    #[test]
    fn rate_inversion_examples() {
        let p = p82();
        // uniform target, nu^2 = 1/2: r2 = 0
        let r = second_order_rate(&p, &FiniteDist::uniform(2), std::f64::consts::FRAC_1_SQRT_2)
            .unwrap();
        assert!(r.r2.abs() < 1e-12);
        assert!(r.residual < 1e-12);
        // closed form at nu = 0.6 frozen from 40-digit arithmetic
        let r = second_order_rate(&p, &FiniteDist::uniform(2), 0.6).unwrap();
        assert!((r.r2 - 0.286_767_034_600_955).abs() < 1e-9);
        // ratio-equal at nu = e^-1
        let r = second_order_rate(&p, &p, (-1.0f64).exp()).unwrap();
        let s = stats(&p);
        assert!((r.r2 - (8.0 * s.v).sqrt() / s.h).abs() < 1e-12);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn rate_inversion_residuals_all_regimes() {
        let pairs = [
            (p82(), FiniteDist::uniform(2)),
            (FiniteDist::uniform(2), q64()),
            (q64(), p82()),
            (p82(), q64()),
            (p82(), p82()),
        ];
        for (p, q) in pairs {
            for nu in [0.1, 0.5, 0.9] {
                let r = second_order_rate(&p, &q, nu).unwrap();
                assert!(
                    r.residual <= 1e-8,
                    "residual {} for {:?} at nu={nu}",
                    r.residual,
                    r.regime.kind
                );
                let back = limit_fidelity(&p, &q, r.a, r.r2).unwrap();
                assert!((back - nu).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn ldn_expansion() {
        let p = p82();
        let q = q64();
        assert_eq!(ldn_expand(&p, &q, 0.5, 0).unwrap(), 0.0);
        // r2 = 0 case: pure first-order arithmetic
        let nu = std::f64::consts::FRAC_1_SQRT_2;
        let v = ldn_expand(&p, &FiniteDist::uniform(2), nu, 100).unwrap();
        let s = stats(&p);
        assert!((v - 100.0 * s.h / std::f64::consts::LN_2).abs() < 1e-9);
        // frozen from the prototype: a*64 + r2*8 with nu = 0.9
        let v = ldn_expand(&p, &q, 0.9, 64).unwrap();
        assert!((v - 47.430_859_265_45).abs() < 1e-6);
    }

    #[test]
    fn limit_of_limits_toward_uniform_target() {
        // f2 curves approach the uniform-target closed form as the target
        // flattens; max error over a b-grid shrinks monotonically
        let p = p82();
        let sp = stats(&p);
        let bs = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.05, 0.02, 0.01] {
            let qe = d(&[0.5 + eps, 0.5 - eps]);
            let max_err = bs
                .iter()
                .map(|&b| {
                    let f = f2_limit(&p, &qe, b).unwrap();
                    let reference =
                        std_sf(b * std::f64::consts::LN_2 / sp.v.sqrt()).sqrt();
                    (f - reference).abs()
                })
                .fold(0.0, f64::max);
            assert!(max_err < prev, "not shrinking at eps={eps}");
            prev = max_err;
        }
    }

    #[test]
    fn limit_of_limits_toward_uniform_source() {
        let q = p82();
        let sq = stats(&q);
        let bs = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.05, 0.02, 0.01] {
            let pe = d(&[0.5 + eps, 0.5 - eps]);
            let max_err = bs
                .iter()
                .map(|&b| {
                    let f = f1_limit(&pe, &q, b).unwrap();
                    let reference = std_cdf(
                        -sq.h.powf(1.5) * b / (std::f64::consts::LN_2 * sq.v).sqrt(),
                    )
                    .sqrt();
                    (f - reference).abs()
                })
                .fold(0.0, f64::max);
            assert!(max_err < prev, "not shrinking at eps={eps}");
            prev = max_err;
        }
    }
}
