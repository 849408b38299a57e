//! One-dimensional search: golden-section maximization, predicate bisection, and
//! grid multi-start.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `tol`. Returns `(x_max, f_max)`; endpoints are
/// included as candidates so a monotone `f` returns the better endpoint.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let (lo0, hi0) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        iters += 1;
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo0, hi0] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Bisection for the switch point of a monotone predicate with
/// `pred(lo) == false` and `pred(hi) == true`. Returns the final bracket.
pub fn bisect_predicate<F: FnMut(f64) -> bool>(mut pred: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Indices of grid local maxima: `v[i] ≥` both neighbours and strictly greater
/// than at least one of them, so flat plateaus are skipped. Endpoints qualify
/// against their single neighbour.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    if n == 1 {
        return vec![0];
    }
    (0..n)
        .filter(|&i| {
            let left = if i > 0 { Some(values[i - 1]) } else { None };
            let right = values.get(i + 1).copied();
            let v = values[i];
            let ge = left.is_none_or(|l| v >= l) && right.is_none_or(|r| v >= r);
            let gt = left.is_some_and(|l| v > l) || right.is_some_and(|r| v > r);
            ge && gt
        })
        .collect()
}
