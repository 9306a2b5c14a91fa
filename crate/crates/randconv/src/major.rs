//! The majorization pre-order and the exact one-shot conversion optimum.
//!
//! `max_fidelity_major` maximizes Σ √(p'ᵢ qᵢ) over all distributions p' that
//! majorize the source, both sorted decreasing. Writing S for the cumulative
//! mass of p' as a function of the cumulative target mass x, the constraints
//! become S(x_l) ≥ y_l at the merged block breakpoints, S(1) = 1, and S
//! concave (sortedness). The objective Σ_segments √(ΔS Δx) is concave, and
//! its optimum is the upper convex hull of the breakpoint cloud pinned at
//! (0,0) and (1,1): between touch points the optimizer is proportional to
//! the target, and the hull slopes are the proportionality ratios. The
//! independent `oracle_max_fidelity` validates this on every small instance.

use crate::block::{merged_log_ranks, Block, BlockDist};
use crate::dist::FiniteDist;
use crate::normal::log_sub_exp;
use crate::{Error, Result};

/// Absolute slack for cumulative-mass comparisons.
const MASS_TOL: f64 = 1e-12;
/// Largest target support the grid/ascent oracle accepts.
pub const ORACLE_MAX_SUPPORT: usize = 4;

/// Result of the one-shot optimization: the value, the achieving
/// distribution, and the ranks where the majorization constraint binds.
#[derive(Debug, Clone)]
pub struct MajorSolution {
    pub fidelity: f64,
    pub optimizer: BlockDist,
    pub active_breakpoints: Vec<f64>,
}

/// True iff `a` is majorized by `b` (every prefix of `b`'s sorted masses
/// dominates `a`'s). Supports may differ; checked at `a`'s block boundaries,
/// which is sufficient because cumulative curves are concave in the rank.
pub fn majorizes(a: &BlockDist, b: &BlockDist) -> bool {
    a.boundary_log_ranks().iter().enumerate().all(|(i, &r)| {
        a.boundary_mass(i) <= b.cumulative_at_log_rank(r) + MASS_TOL
    })
}

struct HullPoint {
    x: f64,
    y: f64,
    log_rank: f64,
}

/// Maximal fidelity to `target` over distributions majorizing `source`.
///
/// Equals 1 exactly when `source ≺ target`. A point-mass target yields the
/// point-mass optimizer; a point-mass source forces the point mass and the
/// value √(largest target mass).
pub fn max_fidelity_major(source: &BlockDist, target: &BlockDist) -> MajorSolution {
    let points = constraint_points(source, target);
    let hull = upper_hull(points);

    let mut fid = 0.0;
    for w in hull.windows(2) {
        let dx = (w[1].x - w[0].x).max(0.0);
        let dy = (w[1].y - w[0].y).max(0.0);
        fid += (dx * dy).sqrt();
    }
    fid = fid.min(1.0);

    let optimizer = build_optimizer(target, &hull);
    let active_breakpoints = hull
        .iter()
        .skip(1)
        .map(|p| p.log_rank.exp())
        .collect();
    MajorSolution {
        fidelity: fid,
        optimizer,
        active_breakpoints,
    }
}

fn constraint_points(source: &BlockDist, target: &BlockDist) -> Vec<HullPoint> {
    let ranks = merged_log_ranks(source, target);
    let mut pts = Vec::with_capacity(ranks.len() + 2);
    pts.push(HullPoint {
        x: 0.0,
        y: 0.0,
        log_rank: f64::NEG_INFINITY,
    });
    for r in ranks {
        let x = target.cumulative_at_log_rank(r);
        let y = source.cumulative_at_log_rank(r);
        match pts.last_mut() {
            // equal target mass: only the largest source constraint matters
            Some(last) if x <= last.x => {
                if y > last.y {
                    last.y = y;
                    last.log_rank = r;
                }
            }
            _ => pts.push(HullPoint { x, y, log_rank: r }),
        }
    }
    // normalization pins the endpoint
    let last = pts.last_mut().unwrap();
    if last.x >= 1.0 - MASS_TOL {
        last.x = 1.0;
        last.y = 1.0;
    } else {
        let log_rank = target.log_support_size();
        pts.push(HullPoint {
            x: 1.0,
            y: 1.0,
            log_rank,
        });
    }
    pts
}

fn upper_hull(points: Vec<HullPoint>) -> Vec<HullPoint> {
    let mut hull: Vec<HullPoint> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // pop b when it lies on or below the chord a -> p
            if (b.x - a.x) * (p.y - a.y) >= (p.x - a.x) * (b.y - a.y) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// The optimizer is proportional to the target on every hull segment, with
/// ratio ΔS/Δx; zero-mass segments are dropped from its support.
fn build_optimizer(target: &BlockDist, hull: &[HullPoint]) -> BlockDist {
    let mut raw: Vec<Block> = Vec::new();
    let boundaries = target.boundary_log_ranks();
    for w in hull.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let dy = hi.y - lo.y;
        let dx = hi.x - lo.x;
        if dy <= 0.0 || dx <= 0.0 {
            continue;
        }
        let ln_ratio = (dy / dx).ln();
        // target blocks overlapping (lo.log_rank, hi.log_rank]
        let start = boundaries.partition_point(|&r| r <= lo.log_rank);
        for (idx, &bound) in boundaries.iter().enumerate().skip(start) {
            let piece_lo = if idx == 0 {
                f64::NEG_INFINITY
            } else {
                boundaries[idx - 1]
            }
            .max(lo.log_rank);
            let piece_hi = bound.min(hi.log_rank);
            if piece_hi <= piece_lo {
                if piece_lo >= hi.log_rank {
                    break;
                }
                continue;
            }
            let log_count = log_sub_exp(piece_hi, piece_lo);
            raw.push(Block {
                log_value: ln_ratio + target.blocks()[idx].log_value,
                log_count,
                count: exact_span(target, idx, piece_lo, piece_hi),
            });
            if bound >= hi.log_rank {
                break;
            }
        }
    }
    BlockDist::assemble(raw).expect("optimizer blocks are consistent by construction")
}

fn exact_span(target: &BlockDist, idx: usize, lo: f64, hi: f64) -> Option<u64> {
    // exact only when both ends sit on target boundaries with exact prefixes
    let hi_exact = position_exact(target, idx, hi)?;
    let lo_exact = if lo == f64::NEG_INFINITY {
        Some(0)
    } else {
        position_exact(target, idx.min(target.blocks().len() - 1), lo)
    }?;
    u64::try_from(hi_exact.checked_sub(lo_exact)?)
        .ok()
        .filter(|&c| c as u128 <= crate::block::MAX_EXACT_COUNT)
}

fn position_exact(target: &BlockDist, hint: usize, r: f64) -> Option<u128> {
    let bounds = target.boundary_log_ranks();
    for idx in (0..=hint.min(bounds.len() - 1)).rev() {
        if bounds[idx] == r {
            return target.boundary_exact_count(idx);
        }
    }
    None
}

/// Cauchy–Schwarz upper bound on the fidelity from a rank partition: the
/// intervals are (0, cuts[0]], (cuts[0], cuts[1]], …, (last, ∞).
pub fn partition_bound(dist: &BlockDist, target: &BlockDist, cuts: &[f64]) -> Result<f64> {
    let mut prev = 0.0;
    for &c in cuts {
        if !(c >= prev) {
            return Err(Error::BadCuts);
        }
        prev = c;
    }
    let mut total = 0.0;
    let mut prev_d = 0.0;
    let mut prev_t = 0.0;
    for &c in cuts {
        let cd = dist.cumulative(c)?;
        let ct = target.cumulative(c)?;
        total += ((cd - prev_d).max(0.0) * (ct - prev_t).max(0.0)).sqrt();
        prev_d = cd;
        prev_t = ct;
    }
    total += ((1.0 - prev_d).max(0.0) * (1.0 - prev_t).max(0.0)).sqrt();
    Ok(total.min(1.0))
}

/// Independent oracle for the one-shot optimum on target supports ≤ 4.
///
/// Maximizes the concave objective over the cumulative variables with a
/// shrinking 7^d grid followed by exact coordinate ascent; no hull machinery
/// is shared with `max_fidelity_major`. Accurate to well under 1e-6.
pub fn oracle_max_fidelity(source: &FiniteDist, target: &FiniteDist) -> Result<f64> {
    let q = target.sorted_desc();
    let m = q.len();
    if m > ORACLE_MAX_SUPPORT {
        return Err(Error::OracleSupportTooLarge(m, ORACLE_MAX_SUPPORT));
    }
    if m == 1 {
        return Ok(1.0);
    }
    let src = source.sorted_desc();
    let mut c = Vec::with_capacity(m);
    let mut acc = 0.0;
    for i in 0..m {
        acc += src.get(i).copied().unwrap_or(0.0);
        c.push(acc.min(1.0));
    }
    let d = m - 1;

    let objective = |s: &[f64]| -> f64 {
        let mut prev = 0.0;
        let mut val = 0.0;
        for i in 0..m {
            let next = if i == d { 1.0 } else { s[i] };
            val += ((next - prev).max(0.0) * q[i]).sqrt();
            prev = next;
        }
        val
    };
    let project = |s: &mut [f64]| {
        for i in 0..d {
            s[i] = s[i].max(c[i]).min(1.0);
        }
        for i in 1..d {
            s[i] = s[i].max(s[i - 1]);
        }
    };

    let mut best: Vec<f64> = (0..d)
        .map(|i| c[i].max((i as f64 + 1.0) / m as f64))
        .collect();
    project(&mut best);
    let mut best_val = objective(&best);

    let mut width = 1.0;
    let npoints = 7usize.pow(d as u32);
    for _ in 0..70 {
        let mut improved_point = best.clone();
        let mut improved_val = best_val;
        for code in 0..npoints {
            let mut cand = best.clone();
            let mut rest = code;
            for coord in cand.iter_mut().take(d) {
                let off = (rest % 7) as i32 - 3;
                rest /= 7;
                *coord += off as f64 * width / 3.0;
            }
            project(&mut cand);
            let v = objective(&cand);
            if v > improved_val {
                improved_val = v;
                improved_point = cand;
            }
        }
        best = improved_point;
        best_val = improved_val;
        width *= 0.62;
    }

    // coordinate ascent: each slice has the closed-form interior optimum
    for _ in 0..4000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let lo = c[i].max(if i == 0 { 0.0 } else { best[i - 1] });
            let hi = if i + 1 == d { 1.0 } else { best[i + 1] };
            let left = if i == 0 { 0.0 } else { best[i - 1] };
            let denom = q[i] + q[i + 1];
            let t = if denom > 0.0 {
                (left + q[i] * (hi - left) / denom).clamp(lo, hi)
            } else {
                lo
            };
            moved = moved.max((t - best[i]).abs());
            best[i] = t;
        }
        if moved < 1e-16 {
            break;
        }
    }
    project(&mut best);
    Ok(objective(&best).max(best_val).min(1.0))
}
