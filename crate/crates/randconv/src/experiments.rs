//! Experiment orchestration behind the CLI: rate records, limit-curve
//! sweeps, finite-n convergence tables and the one-shot report.
//!
//! Sweeps may evaluate grid points in parallel, but rows are always emitted
//! in grid order and all numbers go through one fixed 12-significant-digit
//! formatter, so identical configurations render byte-identical output.

use crate::asym::{
    limit_fidelity, regime_classify, second_order_rate, source_gaussian, target_gaussian,
    AttainmentCurve, RateResult, RegimeKind,
};
use crate::block::BlockDist;
use crate::detmap::max_fidelity_det;
use crate::dist::{entropy, FiniteDist};
use crate::major::max_fidelity_major;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// How the real-valued copy count a·n + b·√n becomes an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CopyRounding {
    Nearest,
    Floor,
}

/// Inputs shared by the experiment commands.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: FiniteDist,
    pub target: FiniteDist,
    pub nu: Option<f64>,
    pub b_grid: Vec<f64>,
    pub n_grid: Vec<u64>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(nu) = self.nu {
            if !(nu > 0.0 && nu < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "nu must be in (0,1), got {nu}"
                )));
            }
        }
        if self.b_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("b grid must be sorted".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("n grid must be sorted".into()));
        }
        Ok(())
    }
}

/// Fixed 12-significant-digit rendering used for every float column.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

// ---------------------------------------------------------------- rate

pub fn rate_record(cfg: &ExperimentConfig) -> Result<RateResult> {
    cfg.validate()?;
    let nu = cfg
        .nu
        .ok_or_else(|| Error::InvalidArgument("rate requires --nu".into()))?;
    second_order_rate(&cfg.source, &cfg.target, nu)
}

pub fn render_rate(r: &RateResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(r).expect("rate record serializes"),
        OutputFormat::Csv => {
            let mut s = String::from("a,r2,regime,threshold,residual\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                sig12(r.a),
                sig12(r.r2),
                r.regime.kind.label(),
                r.threshold.map(sig12).unwrap_or_default(),
                sig12(r.residual),
            );
            s
        }
    }
}

// ---------------------------------------------------------------- curve

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub b: f64,
    pub fidelity: f64,
    pub regime: &'static str,
}

/// Limit-curve values over the b grid at the on-rate first order.
pub fn curve_rows(cfg: &ExperimentConfig) -> Result<Vec<CurveRow>> {
    cfg.validate()?;
    if cfg.b_grid.is_empty() {
        return Err(Error::InvalidArgument("curve requires a b grid".into()));
    }
    let regime = regime_classify(&cfg.source, &cfg.target)?;
    let a = entropy(&cfg.source) / entropy(&cfg.target);
    cfg.b_grid
        .par_iter()
        .map(|&b| {
            Ok(CurveRow {
                b,
                fidelity: limit_fidelity(&cfg.source, &cfg.target, a, b)?,
                regime: regime.kind.label(),
            })
        })
        .collect()
}

pub fn render_curve(rows: &[CurveRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize"),
        OutputFormat::Csv => {
            let mut s = String::from("b,fidelity,regime\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{}", sig12(r.b), sig12(r.fidelity), r.regime);
            }
            s
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AttainRow {
    pub x: f64,
    pub g_p: f64,
    pub g_pqb: f64,
    pub a: f64,
}

/// Samples of the source CDF, shifted-target CDF and the regime's attainment
/// curve on an x grid, at second-order rate `b`.
pub fn attainment_rows(cfg: &ExperimentConfig, x_grid: &[f64], b: f64) -> Result<Vec<AttainRow>> {
    let regime = regime_classify(&cfg.source, &cfg.target)?;
    let curve = match regime.kind {
        RegimeKind::RatioGreater => AttainmentCurve::ratio_greater(&cfg.source, &cfg.target, b)?,
        RegimeKind::RatioLess => AttainmentCurve::ratio_less(&cfg.source, &cfg.target, b)?,
        RegimeKind::RatioEqual => AttainmentCurve::source_cdf(&cfg.source)?,
        _ => {
            return Err(Error::InvalidArgument(
                "attainment table needs both distributions non-uniform".into(),
            ))
        }
    };
    let g1 = source_gaussian(&cfg.source)?;
    let g2 = target_gaussian(&cfg.source, &cfg.target, b)?;
    Ok(x_grid
        .iter()
        .map(|&x| AttainRow {
            x,
            g_p: g1.cdf(x),
            g_pqb: g2.cdf(x),
            a: curve.value(x),
        })
        .collect())
}

pub fn render_attainment(rows: &[AttainRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize"),
        OutputFormat::Csv => {
            let mut s = String::from("x,g_p,g_pqb,a\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    sig12(r.x),
                    sig12(r.g_p),
                    sig12(r.g_pqb),
                    sig12(r.a)
                );
            }
            s
        }
    }
}

// ---------------------------------------------------------------- finite-n

#[derive(Debug, Clone, Serialize)]
pub struct FiniteNRow {
    pub n: u64,
    #[serde(rename = "L")]
    pub l: u64,
    pub fm: f64,
    pub limit: f64,
    pub gap: f64,
}

/// Copy count for block length n at rates (a, b).
pub fn copy_count(a: f64, b: f64, n: u64, rounding: CopyRounding) -> u64 {
    let raw = a * n as f64 + b * (n as f64).sqrt();
    let l = match rounding {
        CopyRounding::Nearest => raw.round(),
        CopyRounding::Floor => raw.floor(),
    };
    l.max(1.0) as u64
}

/// Finite-n optima F^M(P^n → Q^L) against the limit value at rate b.
pub fn finite_n_rows(
    cfg: &ExperimentConfig,
    b: f64,
    rounding: CopyRounding,
) -> Result<Vec<FiniteNRow>> {
    cfg.validate()?;
    if cfg.n_grid.is_empty() {
        return Err(Error::InvalidArgument("finite-n requires an n grid".into()));
    }
    let a = entropy(&cfg.source) / entropy(&cfg.target);
    let limit = limit_fidelity(&cfg.source, &cfg.target, a, b)?;
    cfg.n_grid
        .par_iter()
        .map(|&n| {
            let l = copy_count(a, b, n, rounding);
            let src = BlockDist::iid_power(&cfg.source, n)?;
            let tgt = BlockDist::iid_power(&cfg.target, l)?;
            let fm = max_fidelity_major(&src, &tgt).fidelity;
            Ok(FiniteNRow {
                n,
                l,
                fm,
                limit,
                gap: fm - limit,
            })
        })
        .collect()
}

pub fn render_finite_n(rows: &[FiniteNRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize"),
        OutputFormat::Csv => {
            let mut s = String::from("n,L,fm,limit,gap\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.n,
                    r.l,
                    sig12(r.fm),
                    sig12(r.limit),
                    sig12(r.gap)
                );
            }
            s
        }
    }
}

// ---------------------------------------------------------------- oneshot

#[derive(Debug, Clone, Serialize)]
pub struct BlockRow {
    pub value: f64,
    pub log_count: f64,
    pub count: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OneshotReport {
    pub f_det: f64,
    pub det_map: Vec<usize>,
    pub f_major: f64,
    pub gap: f64,
    pub active_breakpoints: Vec<f64>,
    pub optimizer: Vec<BlockRow>,
}

/// Exhaustive deterministic optimum, majorization optimum and their gap for
/// one explicit pair.
pub fn oneshot_report(cfg: &ExperimentConfig) -> Result<OneshotReport> {
    let (f_det, map) = max_fidelity_det(&cfg.source, &cfg.target)?;
    let sol = max_fidelity_major(
        &BlockDist::from_finite(&cfg.source),
        &BlockDist::from_finite(&cfg.target),
    );
    let optimizer = sol
        .optimizer
        .blocks()
        .iter()
        .map(|b| BlockRow {
            value: b.log_value.exp(),
            log_count: b.log_count,
            count: b.count,
        })
        .collect();
    Ok(OneshotReport {
        f_det,
        det_map: map.assignment,
        f_major: sol.fidelity,
        gap: sol.fidelity - f_det,
        active_breakpoints: sol.active_breakpoints,
        optimizer,
    })
}

pub fn render_oneshot(r: &OneshotReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(r).expect("report serializes"),
        OutputFormat::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "f_det = {}", sig12(r.f_det));
            let _ = writeln!(
                s,
                "det_map = {}",
                r.det_map
                    .iter()
                    .map(|y| y.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let _ = writeln!(s, "f_major = {}", sig12(r.f_major));
            let _ = writeln!(s, "gap = {}", sig12(r.gap));
            let _ = writeln!(
                s,
                "active_breakpoints = {}",
                r.active_breakpoints
                    .iter()
                    .map(|&x| sig12(x))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let _ = writeln!(s, "optimizer_blocks (value,log_count,count):");
            for b in &r.optimizer {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    sig12(b.value),
                    sig12(b.log_count),
                    b.count.map(|c| c.to_string()).unwrap_or_default()
                );
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(src: &[f64], tgt: &[f64]) -> ExperimentConfig {
        ExperimentConfig {
            source: FiniteDist::new(src.to_vec()).unwrap(),
            target: FiniteDist::new(tgt.to_vec()).unwrap(),
            nu: None,
            b_grid: vec![],
            n_grid: vec![],
            format: OutputFormat::Csv,
        }
    }

    #[test]
    fn curve_csv_schema_and_determinism() {
        let mut c = cfg(&[0.8, 0.2], &[0.6, 0.4]);
        c.b_grid = vec![-1.0, 0.0, 1.0];
        let once = render_curve(&curve_rows(&c).unwrap(), OutputFormat::Csv);
        let twice = render_curve(&curve_rows(&c).unwrap(), OutputFormat::Csv);
        assert_eq!(once, twice);
        assert!(once.starts_with("b,fidelity,regime\n"));
        assert_eq!(once.lines().count(), 4);
        // monotone non-increasing fidelity column
        let vals: Vec<f64> = once
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] >= w[1] - 1e-12));
    }

    #[test]
    fn equal_ratio_curve_is_flat_at_one_for_nonpositive_b() {
        let mut c = cfg(&[0.8, 0.2], &[0.8, 0.2]);
        c.b_grid = vec![-2.0, -1.0, 0.0];
        let rows = curve_rows(&c).unwrap();
        assert!(rows.iter().all(|r| r.fidelity == 1.0));
    }

    #[test]
    fn finite_n_identity_is_exact() {
        let mut c = cfg(&[0.8, 0.2], &[0.8, 0.2]);
        c.n_grid = vec![1, 2, 8, 21];
        let rows = finite_n_rows(&c, 0.0, CopyRounding::Nearest).unwrap();
        for r in &rows {
            assert_eq!(r.l, r.n);
            assert!((r.fm - 1.0).abs() < 1e-12, "n={} fm={}", r.n, r.fm);
        }
        let csv = render_finite_n(&rows, OutputFormat::Csv);
        assert!(csv.starts_with("n,L,fm,limit,gap\n"));
    }

    #[test]
    fn copy_count_rounding_modes() {
        assert_eq!(copy_count(0.75, 0.0, 10, CopyRounding::Nearest), 8);
        assert_eq!(copy_count(0.75, 0.0, 10, CopyRounding::Floor), 7);
        // clamped to at least one copy
        assert_eq!(copy_count(0.1, -5.0, 4, CopyRounding::Nearest), 1);
    }

    #[test]
    fn rate_record_requires_nu() {
        let c = cfg(&[0.8, 0.2], &[0.6, 0.4]);
        assert!(rate_record(&c).is_err());
        let mut c = c;
        c.nu = Some(0.9);
        let r = rate_record(&c).unwrap();
        assert!(r.residual <= 1e-8);
        let csv = render_rate(&r, OutputFormat::Csv);
        assert!(csv.starts_with("a,r2,regime,threshold,residual\n"));
        let json = render_rate(&r, OutputFormat::Json);
        assert!(json.contains("\"r2\""));
    }

    #[test]
    fn attainment_dominates_source_cdf_in_greater_regime() {
        let c = cfg(&[0.6, 0.4], &[0.8, 0.2]);
        let grid: Vec<f64> = (0..=60).map(|i| -3.0 + 0.1 * i as f64).collect();
        let rows = attainment_rows(&c, &grid, 0.5).unwrap();
        for r in &rows {
            assert!(r.a >= r.g_p - 1e-12);
        }
        let csv = render_attainment(&rows, OutputFormat::Csv);
        assert!(csv.starts_with("x,g_p,g_pqb,a\n"));
    }

    #[test]
    fn oneshot_report_zero_gap_case() {
        let c = cfg(&[0.9, 0.1], &[0.5, 0.5]);
        let r = oneshot_report(&c).unwrap();
        assert!((r.f_det - r.f_major).abs() < 1e-12);
        assert!((r.f_det - 0.894_427_190_999_915_88).abs() < 1e-12);
        let text = render_oneshot(&r, OutputFormat::Csv);
        assert!(text.contains("f_det = ") && text.contains("optimizer_blocks"));
    }
}
