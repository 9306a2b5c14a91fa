//! Exhaustive optimization over deterministic maps at toy scale, and the
//! finite-n copy count through its majorization surrogate.

use crate::block::BlockDist;
use crate::dist::{fidelity, FiniteDist};
use crate::major::max_fidelity_major;
use crate::{Error, Result};
use rayon::prelude::*;

/// Hard cap on the number of assignments enumerated exhaustively.
pub const MAX_ASSIGNMENTS: u64 = 10_000_000;

/// A total map from source outcomes to target outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetMap {
    pub assignment: Vec<usize>,
}

impl DetMap {
    pub fn identity(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
        }
    }
}

/// Push-forward W(P): each target point collects its preimage mass.
pub fn pushforward(map: &DetMap, p: &FiniteDist, target_size: usize) -> Result<FiniteDist> {
    if map.assignment.len() != p.len() {
        return Err(Error::SupportMismatch(map.assignment.len(), p.len()));
    }
    let mut out = vec![0.0; target_size];
    for (&y, &mass) in map.assignment.iter().zip(p.probs()) {
        if y >= target_size {
            return Err(Error::InvalidArgument(format!(
                "map image {y} outside target of size {target_size}"
            )));
        }
        out[y] += mass;
    }
    FiniteDist::new(out)
}

/// Exact maximum of F(W(P), Q) over all |Q|^|P| deterministic maps.
///
/// Ties break toward the lexicographically smallest assignment. The search
/// space partitions on the first coordinate and scans in parallel; the merge
/// is a deterministic fold independent of scheduling.
pub fn max_fidelity_det(p: &FiniteDist, q: &FiniteDist) -> Result<(f64, DetMap)> {
    let nx = p.len();
    let ny = q.len();
    let total = (ny as f64).powi(nx as i32);
    if !(total <= MAX_ASSIGNMENTS as f64) {
        return Err(Error::SearchSpaceExceeded(total, MAX_ASSIGNMENTS));
    }
    let results: Vec<(f64, Vec<usize>)> = (0..ny)
        .into_par_iter()
        .map(|first| {
            let mut best_f = -1.0;
            let mut best: Vec<usize> = Vec::new();
            let mut assignment = vec![0usize; nx];
            assignment[0] = first;
            loop {
                let wp = pushforward(
                    &DetMap {
                        assignment: assignment.clone(),
                    },
                    p,
                    ny,
                )
                .expect("assignment is in range");
                let f = fidelity(&wp, q).expect("sizes match");
                if f > best_f {
                    best_f = f;
                    best = assignment.clone();
                }
                // lexicographic odometer over coordinates 1..nx
                let mut i = nx - 1;
                loop {
                    if i == 0 {
                        return (best_f, best);
                    }
                    assignment[i] += 1;
                    if assignment[i] == ny {
                        assignment[i] = 0;
                        i -= 1;
                    } else {
                        break;
                    }
                }
                if nx == 1 {
                    return (best_f, best);
                }
            }
        })
        .collect();
    let (mut best_f, mut best) = (-1.0, Vec::new());
    for (f, a) in results {
        if f > best_f + 1e-15 || (f >= best_f - 1e-15 && (best.is_empty() || a < best)) {
            if f > best_f {
                best_f = f;
            }
            best = a;
        }
    }
    Ok((best_f, DetMap { assignment: best }))
}

/// Explicit Q^L as a FiniteDist in lexicographic outcome order.
fn explicit_power(q: &FiniteDist, l: u32) -> Result<FiniteDist> {
    let k = q.len();
    let size = (k as f64).powi(l as i32);
    if !(size <= 2_000_000.0) {
        return Err(Error::SearchSpaceExceeded(size, 2_000_000));
    }
    let mut probs = vec![1.0];
    for _ in 0..l {
        let mut next = Vec::with_capacity(probs.len() * k);
        for &pr in &probs {
            for &m in q.probs() {
                next.push(pr * m);
            }
        }
        probs = next;
    }
    FiniteDist::new(probs)
}

/// Largest L with F^D(P → Q^L) ≥ ν, by exhaustive search per L.
///
/// Returns 0 when even L = 1 misses ν. Errors on a point-mass target
/// (L would be unbounded) and when the assignment space outgrows the
/// exhaustive limit while the threshold is still met.
pub fn oneshot_l(p: &FiniteDist, q: &FiniteDist, nu: f64) -> Result<u32> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidArgument(format!("nu must be in (0,1], got {nu}")));
    }
    if q.support_size() <= 1 {
        return Err(Error::UnboundedCopies);
    }
    let mut l = 0u32;
    loop {
        let next = l + 1;
        let ql = explicit_power(q, next)?;
        let space = (ql.len() as f64).powi(p.len() as i32);
        if !(space <= MAX_ASSIGNMENTS as f64) {
            return Err(Error::SearchSpaceExceeded(space, MAX_ASSIGNMENTS));
        }
        let (f, _) = max_fidelity_det(p, &ql)?;
        if f + 1e-12 < nu {
            return Ok(l);
        }
        l = next;
    }
}

/// Diagnostics from the finite-n copy-count search.
#[derive(Debug, Clone)]
pub struct FmLnResult {
    pub l: u64,
    /// True when a non-monotone fidelity sample forced a linear rescan.
    pub linear_fallback: bool,
    /// Fidelity samples (L, F) gathered during the search, sorted by L.
    pub samples: Vec<(u64, f64)>,
}

/// Upper limit of the copy-count scan; returned as a sentinel when the
/// fidelity constraint is vacuous (ν near 0).
pub fn fm_l_n_scan_limit(p: &FiniteDist, q: &FiniteDist, n: u64) -> u64 {
    let a = crate::dist::entropy(p) / crate::dist::entropy(q).max(1e-12);
    (4.0 * a * n as f64 + 16.0 * (n as f64).sqrt() + 64.0).ceil() as u64
}

/// Largest L with F^M(P^n → Q^L) ≥ ν.
///
/// Brackets by doubling and bisects on L, assuming F^M is non-increasing
/// in L; the sampled values are checked for that, and any violation falls
/// back to a linear scan (reported in the diagnostics).
pub fn fm_l_n_detailed(p: &FiniteDist, q: &FiniteDist, n: u64, nu: f64) -> Result<FmLnResult> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidArgument(format!("nu must be in (0,1], got {nu}")));
    }
    if q.support_size() <= 1 {
        return Err(Error::UnboundedCopies);
    }
    let source = BlockDist::iid_power(p, n)?;
    let limit = fm_l_n_scan_limit(p, q, n);
    let mut samples: Vec<(u64, f64)> = Vec::new();
    let eval = |l: u64, samples: &mut Vec<(u64, f64)>| -> Result<f64> {
        let target = BlockDist::iid_power(q, l)?;
        let f = max_fidelity_major(&source, &target).fidelity;
        samples.push((l, f));
        Ok(f)
    };

    if eval(1, &mut samples)? + 1e-12 < nu {
        return Ok(FmLnResult {
            l: 0,
            linear_fallback: false,
            samples,
        });
    }
    if eval(limit, &mut samples)? + 1e-12 >= nu {
        // constraint vacuous up to the scan limit: return the sentinel
        return Ok(FmLnResult {
            l: limit,
            linear_fallback: false,
            samples,
        });
    }
    // invariant: F(lo) >= nu > F(hi)
    let (mut lo, mut hi) = (1u64, limit);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if eval(mid, &mut samples)? + 1e-12 >= nu {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    samples.sort_by_key(|&(l, _)| l);
    samples.dedup_by_key(|&mut (l, _)| l);
    let monotone = samples
        .windows(2)
        .all(|w| w[0].1 + 1e-12 >= w[1].1);
    if monotone {
        return Ok(FmLnResult {
            l: lo,
            linear_fallback: false,
            samples,
        });
    }
    // non-monotone sample: rescan linearly for the true maximum
    let mut best = 0u64;
    for l in 1..=limit {
        if eval(l, &mut samples)? + 1e-12 >= nu {
            best = l;
        }
    }
    samples.sort_by_key(|&(l, _)| l);
    samples.dedup_by_key(|&mut (l, _)| l);
    Ok(FmLnResult {
        l: best,
        linear_fallback: true,
        samples,
    })
}

/// Convenience wrapper around [`fm_l_n_detailed`].
pub fn fm_l_n(p: &FiniteDist, q: &FiniteDist, n: u64, nu: f64) -> Result<u64> {
    Ok(fm_l_n_detailed(p, q, n, nu)?.l)
}
