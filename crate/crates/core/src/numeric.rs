//! Small numerical building blocks shared across modules: bracketing root
//! finding, quadrature, least-squares line fits and Richardson-extrapolated
//! finite differences.

/// Bisect `f` on `[a, b]` down to an absolute width `tol`. The bracket must
/// change sign; endpoints with `f == 0` are returned directly.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    if fa == 0.0 {
        return Some(a);
    }
    let mut fb = f(b);
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let _ = (fa, fb);
    Some(0.5 * (a + b))
}

/// A few Newton steps to polish a bracketing result. Falls back to the input
/// if a step leaves `[lo, hi]` or the derivative is too small.
pub fn newton_polish<F, D>(mut f: F, mut df: D, x0: f64, lo: f64, hi: f64, steps: usize) -> f64
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let mut x = x0;
    for _ in 0..steps {
        let d = df(x);
        if d.abs() < 1e-300 {
            break;
        }
        let xn = x - f(x) / d;
        if !xn.is_finite() || xn < lo || xn > hi {
            break;
        }
        if (xn - x).abs() <= f64::EPSILON * x.abs().max(1.0) {
            return xn;
        }
        x = xn;
    }
    x
}

/// Composite Simpson quadrature of `f` on `[a, b]` with `n` panels
/// (`n` is rounded up to the next even integer).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n.max(2) } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Simpson quadrature refined by panel doubling until two successive values
/// agree to `tol` (absolute). Returns the refined value.
pub fn simpson_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let mut n = 64;
    let mut prev = simpson(&f, a, b, n);
    for _ in 0..16 {
        n *= 2;
        let cur = simpson(&f, a, b, n);
        if (cur - prev).abs() < tol {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Central finite-difference stencils of second-order accuracy for
/// derivatives 1..=5, evaluated at `x` with step `h`.
fn central_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64, order: usize) -> f64 {
    let v = |k: i32| f(x + k as f64 * h);
    match order {
        1 => (v(1) - v(-1)) / (2.0 * h),
        2 => (v(1) - 2.0 * v(0) + v(-1)) / (h * h),
        3 => (v(2) - 2.0 * v(1) + 2.0 * v(-1) - v(-2)) / (2.0 * h.powi(3)),
        4 => (v(2) - 4.0 * v(1) + 6.0 * v(0) - 4.0 * v(-1) + v(-2)) / h.powi(4),
        5 => (v(3) - 4.0 * v(2) + 5.0 * v(1) - 5.0 * v(-1) + 4.0 * v(-2) - v(-3)) / (2.0 * h.powi(5)),
        _ => panic!("unsupported derivative order {order}"),
    }
}

/// Richardson-extrapolated central finite difference: three levels of step
/// halving lift the O(h^2) stencils to O(h^6).
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64, order: usize) -> f64 {
    let d0 = central_derivative(f, x, h, order);
    let d1 = central_derivative(f, x, h / 2.0, order);
    let d2 = central_derivative(f, x, h / 4.0, order);
    let r0 = (4.0 * d1 - d0) / 3.0;
    let r1 = (4.0 * d2 - d1) / 3.0;
    (16.0 * r1 - r0) / 15.0
}

/// Stable evaluation of `(1+z)^s - (1-z)^s` for `|z| <= 1`, `s > 0`.
///
/// Writes the difference as `2 (1-z^2)^{s/2} sinh(s atanh z)` when the
/// exponent is small enough for the hyperbolic form to be representable;
/// otherwise the direct difference no longer suffers cancellation.
pub fn power_diff(z: f64, s: f64) -> f64 {
    debug_assert!(z.abs() <= 1.0);
    if z == 0.0 {
        return 0.0;
    }
    if z.abs() == 1.0 {
        return z.signum() * 2f64.powf(s);
    }
    let w = s * z.atanh();
    if w.abs() < 40.0 {
        2.0 * (1.0 - z * z).powf(0.5 * s) * w.sinh()
    } else {
        (1.0 + z).powf(s) - (1.0 - z).powf(s)
    }
}

/// `(1+z)^s + (1-z)^s` companion of [`power_diff`] (no cancellation).
pub fn power_sum(z: f64, s: f64) -> f64 {
    debug_assert!(z.abs() <= 1.0);
    (1.0 + z).powf(s) + (1.0 - z).powf(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn bisect_rejects_no_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let v = simpson(|x| x * x * x, 0.0, 2.0, 4);
        assert_relative_eq!(v, 4.0, epsilon = 1e-13);
    }

    #[test]
    fn richardson_fifth_derivative_of_exp() {
        // every derivative of exp at 0 is 1
        for order in 1..=5 {
            let d = richardson_derivative(&|x: f64| x.exp(), 0.0, 0.05, order);
            assert_relative_eq!(d, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn power_diff_matches_naive_at_moderate_z() {
        for &z in &[0.3, 0.7, 0.99] {
            for &s in &[0.5, 1.0, 2.5, 7.0] {
                let naive = (1.0 + z).powf(s) - (1.0 - z).powf(s);
                assert_relative_eq!(power_diff(z, s), naive, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn power_diff_small_z_no_cancellation() {
        // (1+z)^s - (1-z)^s = 2 s z + O(z^3)
        let z = 1e-12;
        let s = 3.0;
        assert_relative_eq!(power_diff(z, s), 2.0 * s * z, max_relative = 1e-10);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let (m, b) = line_fit(&x, &y);
        assert_relative_eq!(m, 3.0, epsilon = 1e-12);
        assert_relative_eq!(b, -1.0, epsilon = 1e-12);
    }
}
