//! Explicit finite distributions and their scalar functionals.
//!
//! Natural logarithms throughout: entropies are in nats, varentropies in
//! nats². First- and second-order copy rates stay base-free because they only
//! enter through entropy ratios.

use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;
const UNIFORM_REL_TOL: f64 = 1e-12;

/// A probability vector on a small finite set.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist {
    probs: Vec<f64>,
}

impl FiniteDist {
    /// Validates nonnegativity, unit total mass (within 1e-12) and a
    /// nonempty support.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        let mut support = 0usize;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::BadProbability(p));
            }
            if p > 0.0 {
                support += 1;
            }
            sum += p;
        }
        if support == 0 {
            return Err(Error::EmptySupport);
        }
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::NotNormalized(sum));
        }
        Ok(Self { probs })
    }

    /// Rescales arbitrary nonnegative weights to total mass one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::BadProbability(w));
            }
            sum += w;
        }
        if sum <= 0.0 {
            return Err(Error::EmptySupport);
        }
        Self::new(weights.iter().map(|w| w / sum).collect())
    }

    /// Uniform distribution on `k` points.
    pub fn uniform(k: usize) -> Self {
        assert!(k >= 1);
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Number of strictly positive masses.
    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// Positive masses sorted in decreasing order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.probs.iter().copied().filter(|&p| p > 0.0).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Shannon entropy in nats, with 0·log 0 = 0.
pub fn entropy(p: &FiniteDist) -> f64 {
    p.probs()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// Variance of the self-information −log P(x), in nats².
pub fn varentropy(p: &FiniteDist) -> f64 {
    let h = entropy(p);
    p.probs()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| {
            let s = -x.ln() - h;
            x * s * s
        })
        .sum()
}

/// Bhattacharyya coefficient Σ √(p q), paired pointwise on a common index set.
pub fn fidelity(p: &FiniteDist, q: &FiniteDist) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch(p.len(), q.len()));
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| (a * b).sqrt())
        .sum())
}

/// Hellinger distance √(1 − F).
pub fn hellinger(p: &FiniteDist, q: &FiniteDist) -> Result<f64> {
    Ok((1.0 - fidelity(p, q)?).max(0.0).sqrt())
}

/// Entropy, varentropy and the uniformity flag, bundled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceStats {
    pub h: f64,
    pub v: f64,
    pub is_uniform: bool,
}

/// Uniformity is decided structurally (all positive masses equal within
/// 1e-12 relative), and a uniform distribution reports v = 0 exactly.
pub fn stats(p: &FiniteDist) -> SourceStats {
    let pos = p.sorted_desc();
    let is_uniform = pos
        .last()
        .map(|&lo| (pos[0] - lo) <= UNIFORM_REL_TOL * pos[0])
        .unwrap_or(true);
    SourceStats {
        h: entropy(p),
        v: if is_uniform { 0.0 } else { varentropy(p) },
        is_uniform,
    }
}

/// Parses the text format: one probability per line, or a single line of
/// comma-separated values. Blank lines and `#` comments are ignored.
pub fn parse_dist(text: &str) -> Result<FiniteDist> {
    let mut vals = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad probability {tok:?}")))?;
            vals.push(v);
        }
    }
    if vals.is_empty() {
        return Err(Error::Parse("no probabilities found".into()));
    }
    FiniteDist::new(vals)
}

/// Writes the same format back, one probability per line at 17 significant
/// digits, which round-trips f64 exactly.
pub fn format_dist(p: &FiniteDist) -> String {
    let mut s = String::new();
    for &x in p.probs() {
        s.push_str(&format!("{x:.16e}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> FiniteDist {
        FiniteDist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&d(&[0.5, 0.5])) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(entropy(&d(&[1.0])), 0.0);
        // direct evaluation of the defining sum
        assert!((entropy(&d(&[0.75, 0.25])) - 0.562_335_144_618_808_35).abs() < 1e-15);
    }

    #[test]
    fn varentropy_examples() {
        assert_eq!(varentropy(&d(&[0.25, 0.25, 0.25, 0.25])), 0.0);
        assert_eq!(varentropy(&d(&[1.0])), 0.0);
        assert!((varentropy(&d(&[0.75, 0.25])) - 0.226_302_930_152_359_12).abs() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let p = d(&[0.5, 0.5]);
        assert!((fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            fidelity(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap(),
            0.0
        );
        let f = fidelity(&d(&[0.5, 0.5]), &d(&[0.9, 0.1])).unwrap();
        assert!((f - 0.894_427_190_999_915_88).abs() < 1e-15);
        assert!(matches!(
            fidelity(&d(&[0.5, 0.5]), &d(&[1.0])),
            Err(Error::SupportMismatch(2, 1))
        ));
    }

    #[test]
    fn stats_examples() {
        let s = stats(&d(&[0.5, 0.5]));
        assert!(s.is_uniform && s.v == 0.0);
        assert!((s.h - std::f64::consts::LN_2).abs() < 1e-15);
        let s = stats(&d(&[1.0]));
        assert!(s.is_uniform && s.h == 0.0 && s.v == 0.0);
        let s = stats(&d(&[0.8, 0.2]));
        assert!(!s.is_uniform);
        assert!((s.h - 0.500_402_423_538_187_88).abs() < 1e-15);
        assert!((s.v - 0.307_489_928_907_648_91).abs() < 1e-15);
    }

    #[test]
    fn uniform_with_padding_zeros_is_uniform() {
        let s = stats(&d(&[0.5, 0.0, 0.5]));
        assert!(s.is_uniform);
        assert_eq!(s.v, 0.0);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(FiniteDist::new(vec![0.5, 0.6]).is_err());
        assert!(FiniteDist::new(vec![-0.1, 1.1]).is_err());
        assert!(FiniteDist::new(vec![0.0, 0.0]).is_err());
        assert!(FiniteDist::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn parse_and_format_round_trip() {
        let p = d(&[0.6, 0.4]);
        let text = format_dist(&p);
        let q = parse_dist(&text).unwrap();
        assert_eq!(p.probs(), q.probs());
        let inline = parse_dist("0.3, 0.7").unwrap();
        assert_eq!(inline.probs(), &[0.3, 0.7]);
        assert!(parse_dist("# nothing\n").is_err());
    }
}
