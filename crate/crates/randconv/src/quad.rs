//! Adaptive Simpson quadrature for smooth one-dimensional integrands.

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Plain adaptive Simpson with Richardson correction. The integrands in this
/// crate are products of square-rooted Gaussian densities, smooth on every
/// subinterval they are applied to, so the classic error estimate is reliable.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = simpson(a, b, fa, fc, fb);
    recurse(f, a, b, fa, fc, fb, whole, tol, 52)
}

/// Integrate over `[a, b]` split into `chunks` equal panels, each handled
/// adaptively. Use when the integrand is a narrow bump inside a wide window,
/// which the top-level Simpson estimate would otherwise step over.
pub fn adaptive_simpson_chunked<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    chunks: usize,
) -> f64 {
    if a >= b {
        return 0.0;
    }
    let chunks = chunks.max(1);
    let width = (b - a) / chunks as f64;
    let per_chunk_tol = tol / chunks as f64;
    (0..chunks)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == chunks { b } else { lo + width };
            adaptive_simpson(f, lo, hi, per_chunk_tol)
        })
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fc: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fc + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fc: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let (fd, fe) = (f(d), f(e));
    let left = simpson(a, c, fa, fd, fc);
    let right = simpson(c, b, fc, fe, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        recurse(f, a, c, fa, fd, fc, left, tol / 2.0, depth - 1)
            + recurse(f, c, b, fc, fe, fb, right, tol / 2.0, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::std_pdf;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12);
        // antiderivative x^4/4 - x^2 + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn integrates_gaussian_mass() {
        let v = adaptive_simpson(&|x| std_pdf(x), -10.0, 10.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(&|x| x, 2.0, 2.0, 1e-12), 0.0);
    }
}
