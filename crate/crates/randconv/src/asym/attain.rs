//! Attainment curves: distribution functions on ℝ whose density reaches the
//! limit fidelity against the shifted target Gaussian.
//!
//! A curve is an ordered list of segments, each a scaled Gaussian CDF or a
//! constant, continuous and increasing from 0 to 1. `attainment_fidelity`
//! integrates √(dA/dx)·√(target density) by adaptive quadrature, which gives
//! a route to the limit values that is independent of the closed forms in
//! the parent module; the two are held together by tests and the validate
//! suite.

use super::{
    expect_regime, solve_threshold, source_gaussian, target_gaussian, GaussianSpec, RegimeKind,
    Threshold,
};
use crate::dist::FiniteDist;
use crate::quad::adaptive_simpson_chunked;
use crate::{Error, Result};

/// Junction mismatch allowed before a curve is rejected as discontinuous.
const CONTINUITY_TOL: f64 = 1e-9;
/// Truncate quadrature this many sigmas past every relevant Gaussian mean.
const TAIL_SIGMAS: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveSegment {
    /// offset + scale · CDF of `gauss`.
    GaussCdf {
        scale: f64,
        offset: f64,
        gauss: GaussianSpec,
    },
    /// Flat stretch; contributes nothing to the fidelity integral.
    Constant { level: f64 },
}

impl CurveSegment {
    fn value(&self, x: f64) -> f64 {
        match *self {
            CurveSegment::GaussCdf {
                scale,
                offset,
                gauss,
            } => offset + scale * gauss.cdf(x),
            CurveSegment::Constant { level } => level,
        }
    }

    fn density(&self, x: f64) -> f64 {
        match *self {
            CurveSegment::GaussCdf { scale, gauss, .. } => scale * gauss.pdf(x),
            CurveSegment::Constant { .. } => 0.0,
        }
    }
}

/// A piecewise distribution function on ℝ; pieces are (x_end, segment) with
/// the last x_end at +∞.
#[derive(Debug, Clone)]
pub struct AttainmentCurve {
    pieces: Vec<(f64, CurveSegment)>,
}

impl AttainmentCurve {
    /// Validates monotonicity (scales ≥ 0), continuity at junctions, and the
    /// limits A(−∞) = 0, A(+∞) = 1.
    pub fn new(pieces: Vec<(f64, CurveSegment)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::BadCurve("no segments".into()));
        }
        if pieces.last().unwrap().0 != f64::INFINITY {
            return Err(Error::BadCurve("last segment must extend to +inf".into()));
        }
        let mut prev_end = f64::NEG_INFINITY;
        for &(end, seg) in &pieces {
            if end <= prev_end {
                return Err(Error::BadCurve("segment ends must increase".into()));
            }
            if let CurveSegment::GaussCdf { scale, .. } = seg {
                if !(scale >= 0.0) {
                    return Err(Error::BadCurve(format!("negative scale {scale}")));
                }
            }
            prev_end = end;
        }
        let start = match pieces[0].1 {
            CurveSegment::GaussCdf { offset, .. } => offset,
            CurveSegment::Constant { level } => level,
        };
        if start.abs() > CONTINUITY_TOL {
            return Err(Error::BadCurve(format!("A(-inf) = {start}, expected 0")));
        }
        let end_limit = match pieces.last().unwrap().1 {
            CurveSegment::GaussCdf { scale, offset, .. } => offset + scale,
            CurveSegment::Constant { level } => level,
        };
        if (end_limit - 1.0).abs() > CONTINUITY_TOL {
            return Err(Error::BadCurve(format!("A(+inf) = {end_limit}, expected 1")));
        }
        for w in pieces.windows(2) {
            let (end, left) = w[0];
            let (_, right) = w[1];
            let gap = (left.value(end) - right.value(end)).abs();
            if gap > CONTINUITY_TOL {
                return Err(Error::BadCurve(format!("discontinuity {gap:e} at {end}")));
            }
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[(f64, CurveSegment)] {
        &self.pieces
    }

    pub fn value(&self, x: f64) -> f64 {
        for &(end, seg) in &self.pieces {
            if x <= end {
                return seg.value(x);
            }
        }
        1.0
    }

    pub fn density(&self, x: f64) -> f64 {
        for &(end, seg) in &self.pieces {
            if x <= end {
                return seg.density(x);
            }
        }
        0.0
    }

    /// The ratio-greater attainment curve: the target CDF scaled to meet the
    /// source CDF tangentially at the threshold point, then the source CDF.
    pub fn ratio_greater(p: &FiniteDist, q: &FiniteDist, b: f64) -> Result<Self> {
        expect_regime(p, q, RegimeKind::RatioGreater)?;
        let g1 = source_gaussian(p)?;
        let g2 = target_gaussian(p, q, b)?;
        let alpha = solve_threshold(p, q, b, Threshold::Alpha)?;
        let ratio = (g1.ln_cdf(alpha) - g2.ln_cdf(alpha)).exp();
        Self::new(vec![
            (
                alpha,
                CurveSegment::GaussCdf {
                    scale: ratio,
                    offset: 0.0,
                    gauss: g2,
                },
            ),
            (
                f64::INFINITY,
                CurveSegment::GaussCdf {
                    scale: 1.0,
                    offset: 0.0,
                    gauss: g1,
                },
            ),
        ])
    }

    /// The ratio-less attainment curve: the source CDF, then the target
    /// survival scaled to meet it tangentially at the threshold point.
    pub fn ratio_less(p: &FiniteDist, q: &FiniteDist, b: f64) -> Result<Self> {
        expect_regime(p, q, RegimeKind::RatioLess)?;
        let g1 = source_gaussian(p)?;
        let g2 = target_gaussian(p, q, b)?;
        let beta = solve_threshold(p, q, b, Threshold::Beta)?;
        let ratio = (g1.ln_sf(beta) - g2.ln_sf(beta)).exp();
        Self::new(vec![
            (
                beta,
                CurveSegment::GaussCdf {
                    scale: 1.0,
                    offset: 0.0,
                    gauss: g1,
                },
            ),
            (
                f64::INFINITY,
                CurveSegment::GaussCdf {
                    scale: ratio,
                    offset: 1.0 - ratio,
                    gauss: g2,
                },
            ),
        ])
    }

    /// The plain source CDF, the attainment curve of the ratio-equal regime.
    pub fn source_cdf(p: &FiniteDist) -> Result<Self> {
        let g1 = source_gaussian(p)?;
        Self::new(vec![(
            f64::INFINITY,
            CurveSegment::GaussCdf {
                scale: 1.0,
                offset: 0.0,
                gauss: g1,
            },
        )])
    }
}

/// Fidelity ∫ √(dA/dx) √(N(x)) dx between a curve's density and the shifted
/// target Gaussian, by adaptive quadrature to absolute accuracy ≤ 1e-9.
pub fn attainment_fidelity(
    curve: &AttainmentCurve,
    p: &FiniteDist,
    q: &FiniteDist,
    b: f64,
) -> Result<f64> {
    let n2 = target_gaussian(p, q, b)?;
    let mut means = vec![n2.mean];
    let mut sigma = n2.sigma();
    for &(_, seg) in curve.pieces() {
        if let CurveSegment::GaussCdf { gauss, .. } = seg {
            means.push(gauss.mean);
            sigma = sigma.max(gauss.sigma());
        }
    }
    let lo_trunc = means.iter().cloned().fold(f64::INFINITY, f64::min) - TAIL_SIGMAS * sigma;
    let hi_trunc = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + TAIL_SIGMAS * sigma;

    let per_piece_tol = 1e-11 / curve.pieces().len() as f64;
    let mut total = 0.0;
    let mut start = lo_trunc;
    for &(end, seg) in curve.pieces() {
        let a = start;
        let c = end.min(hi_trunc);
        start = end.max(lo_trunc).min(hi_trunc);
        let CurveSegment::GaussCdf { gauss, .. } = seg else {
            continue;
        };
        // the integrand is a bump centered between the two Gaussians; pin
        // the panels to it so a narrow bump in a wide window is not missed
        let (va, vb) = (gauss.variance, n2.variance);
        let center = (gauss.mean * vb + n2.mean * va) / (va + vb);
        let spread = (2.0 * va * vb / (va + vb)).sqrt();
        let a = a.max(center - TAIL_SIGMAS * spread);
        let c = c.min(center + TAIL_SIGMAS * spread);
        if c <= a {
            continue;
        }
        total += adaptive_simpson_chunked(
            &|x| (seg.density(x) * n2.pdf(x)).sqrt(),
            a,
            c,
            per_piece_tol,
            16,
        );
    }
    Ok(total.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asym::{f1_limit, f2_limit, feq_limit, target_gaussian};
    use crate::dist::FiniteDist;

    fn d(v: &[f64]) -> FiniteDist {
        FiniteDist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn target_cdf_reaches_unit_fidelity() {
        let p = d(&[0.8, 0.2]);
        let q = d(&[0.6, 0.4]);
        let n2 = target_gaussian(&p, &q, 0.4).unwrap();
        let curve = AttainmentCurve::new(vec![(
            f64::INFINITY,
            CurveSegment::GaussCdf {
                scale: 1.0,
                offset: 0.0,
                gauss: n2,
            },
        )])
        .unwrap();
        let f = attainment_fidelity(&curve, &p, &q, 0.4).unwrap();
        assert!((f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadrature_reproduces_ratio_greater_closed_form() {
        let p = d(&[0.6, 0.4]);
        let q = d(&[0.8, 0.2]);
        for b in [-0.8, 0.3, 1.4] {
            let curve = AttainmentCurve::ratio_greater(&p, &q, b).unwrap();
            let viaquad = attainment_fidelity(&curve, &p, &q, b).unwrap();
            let closed = f1_limit(&p, &q, b).unwrap();
            assert!((viaquad - closed).abs() < 1e-8, "b={b}: {viaquad} vs {closed}");
        }
    }

    #[test]
    fn quadrature_reproduces_ratio_less_closed_form() {
        let p = d(&[0.8, 0.2]);
        let q = d(&[0.6, 0.4]);
        for b in [-1.3, 0.0, 0.7, 2.1] {
            let curve = AttainmentCurve::ratio_less(&p, &q, b).unwrap();
            let viaquad = attainment_fidelity(&curve, &p, &q, b).unwrap();
            let closed = f2_limit(&p, &q, b).unwrap();
            assert!((viaquad - closed).abs() < 1e-8, "b={b}: {viaquad} vs {closed}");
        }
    }

    #[test]
    fn source_cdf_reproduces_ratio_equal_decay() {
        let p = d(&[0.8, 0.2]);
        // on the decaying branch the source CDF is the attainment curve
        for b in [0.0, 0.4, 1.7, 3.1] {
            let curve = AttainmentCurve::source_cdf(&p).unwrap();
            let viaquad = attainment_fidelity(&curve, &p, &p, b).unwrap();
            let closed = feq_limit(&p, &p, b).unwrap();
            assert!((viaquad - closed).abs() < 1e-8, "b={b}");
        }
    }

    #[test]
    fn ratio_greater_curve_dominates_source_cdf() {
        let p = d(&[0.6, 0.4]);
        let q = d(&[0.8, 0.2]);
        let g1 = crate::asym::source_gaussian(&p).unwrap();
        let curve = AttainmentCurve::ratio_greater(&p, &q, 0.5).unwrap();
        for i in 0..=200 {
            let x = -6.0 + 12.0 * i as f64 / 200.0;
            assert!(curve.value(x) >= g1.cdf(x) - 1e-12, "A1 < source CDF at {x}");
        }
    }

    #[test]
    fn invalid_curves_are_rejected() {
        let g = GaussianSpec::new(0.0, 1.0).unwrap();
        // negative scale: non-monotone
        assert!(AttainmentCurve::new(vec![(
            f64::INFINITY,
            CurveSegment::GaussCdf {
                scale: -1.0,
                offset: 1.0,
                gauss: g
            }
        )])
        .is_err());
        // does not reach 1
        assert!(AttainmentCurve::new(vec![(
            f64::INFINITY,
            CurveSegment::GaussCdf {
                scale: 0.5,
                offset: 0.0,
                gauss: g
            }
        )])
        .is_err());
        // discontinuous junction
        assert!(AttainmentCurve::new(vec![
            (0.0, CurveSegment::Constant { level: 0.0 }),
            (
                f64::INFINITY,
                CurveSegment::GaussCdf {
                    scale: 0.5,
                    offset: 0.5,
                    gauss: g
                }
            )
        ])
        .is_err());
        // constant tail pinned at 1 after a full CDF is fine
        assert!(AttainmentCurve::new(vec![
            (
                40.0,
                CurveSegment::GaussCdf {
                    scale: 1.0,
                    offset: 0.0,
                    gauss: g
                }
            ),
            (f64::INFINITY, CurveSegment::Constant { level: 1.0 })
        ])
        .is_ok());
    }
}
