//! Derivative-free bounded minimization in one dimension.

use crate::scalar::Scalar;

/// Result of a bounded scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Evaluates `f` on `points` uniformly spaced points over `[lower, upper]`
/// (both ends included). Returns the grid and the function values.
pub fn uniform_grid<T: Scalar>(lower: T, upper: T, points: usize, f: impl Fn(T) -> T) -> (Vec<T>, Vec<T>) {
    assert!(points >= 2, "grid needs at least two points");
    let step = (upper - lower) / T::from_usize_exact(points - 1);
    let xs: Vec<T> = (0..points)
        .map(|i| {
            if i == points - 1 {
                upper
            } else {
                lower + step * T::from_usize_exact(i)
            }
        })
        .collect();
    let ys = xs.iter().map(|&x| f(x)).collect();
    (xs, ys)
}

/// Index of the smallest value; ties go to the lowest index.
pub fn argmin_first<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Golden-section search on `[lower, upper]` until the bracket is narrower
/// than `tol`. The returned point is the best of the evaluated interior
/// points and the bracket midpoint.
pub fn golden_section<T: Scalar>(lower: T, upper: T, tol: T, max_iter: usize, f: impl Fn(T) -> T) -> Minimum<T> {
    // 1/φ and 1/φ²
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let inv_phi2 = T::lit(0.381_966_011_250_105_1);

    let (mut a, mut b) = (lower, upper);
    let mut c = a + inv_phi2 * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    let mut iter = 0;
    while (b - a) > tol && iter < max_iter {
        iter += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = a + inv_phi2 * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    let mid = (a + b) / T::lit(2.0);
    let fm = f(mid);
    evals += 1;
    let mut best = Minimum {
        x: mid,
        value: fm,
        evaluations: evals,
    };
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.value {
            best.x = x;
            best.value = v;
        }
    }
    best
}

/// Zero of a nondecreasing `g` with `g(a) < 0 < g(b)`, bisected until the
/// midpoint no longer separates the endpoints.
pub fn bisect_increasing<T: Scalar>(mut a: T, mut b: T, g: impl Fn(T) -> T) -> T {
    for _ in 0..200 {
        let mid = a + (b - a) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid) < T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    a + (b - a) / T::lit(2.0)
}
