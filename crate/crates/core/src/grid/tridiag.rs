//! Symmetric tridiagonal eigenvalue machinery: Sturm-count bisection for
//! selected eigenvalues, inverse iteration for eigenvectors, and an LU solve
//! with partial pivoting for shifted (possibly indefinite) systems.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix with diagonal `diag` and first off-diagonal
/// `off` (`off.len() == diag.len() - 1`).
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len());
        SymTridiag { diag, off }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
        out
    }

    /// Gershgorin bounds on the spectrum.
    pub fn spectrum_bounds(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the LDL^T
    /// pivot signs).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.n();
        let tiny = f64::MIN_POSITIVE / f64::EPSILON;
        let mut count = 0usize;
        let mut d = self.diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..n {
            if d == 0.0 {
                d = -tiny;
            }
            let e = self.off[i - 1];
            d = (self.diag[i] - x) - e * e / d;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by Sturm bisection, resolved
    /// to machine precision relative to the spectral range.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        let n = self.n();
        if k >= n {
            return Err(Error::MissingEigenvalue(format!(
                "index {k} out of range for a matrix of size {n}"
            )));
        }
        let (mut lo, mut hi) = self.spectrum_bounds();
        let scale = hi.abs().max(lo.abs()).max(1.0);
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi || (hi - lo) <= 4.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenpair for the `k`-th smallest eigenvalue: bisection plus inverse
    /// iteration with a pivoted shifted solve. The vector is normalized in
    /// the plain Euclidean sense.
    pub fn eigenpair(&self, k: usize) -> Result<(f64, Vec<f64>)> {
        let lam = self.eigenvalue(k)?;
        let n = self.n();
        let (lo, hi) = self.spectrum_bounds();
        let scale = hi.abs().max(lo.abs()).max(1.0);
        // deterministic start vector with no accidental symmetry
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i * 2654435761usize) % 1024) as f64 / 1024.0)
            .collect();
        normalize(&mut v);
        let shift = lam + 1e-12 * scale;
        let mut best_res = f64::INFINITY;
        let mut best = v.clone();
        for _ in 0..10 {
            let shifted: Vec<f64> = self.diag.iter().map(|&d| d - shift).collect();
            let w = solve_tridiag_pivoted(&self.off, &shifted, &self.off, &v)?;
            v = w;
            normalize(&mut v);
            let res = residual_norm(self, lam, &v);
            if res < best_res {
                best_res = res;
                best.clone_from(&v);
            }
            if res <= 1e-12 * scale {
                break;
            }
        }
        if best_res > 1e-8 * scale {
            return Err(Error::Eigensolver(format!(
                "inverse iteration stalled at residual {best_res:.3e} for eigenvalue {k}"
            )));
        }
        Ok((lam, best))
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn residual_norm(t: &SymTridiag, lam: f64, v: &[f64]) -> f64 {
    t.matvec(v)
        .iter()
        .zip(v)
        .map(|(tv, vi)| (tv - lam * vi) * (tv - lam * vi))
        .sum::<f64>()
        .sqrt()
}

/// Solves a (generally nonsymmetric) tridiagonal system with partial
/// pivoting. `sub` and `sup` are the sub- and super-diagonals. Pivoting
/// introduces one fill-in band, which is carried explicitly.
pub fn solve_tridiag_pivoted(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        if diag[0] == 0.0 {
            return Err(Error::Eigensolver("singular 1x1 tridiagonal system".into()));
        }
        return Ok(vec![rhs[0] / diag[0]]);
    }
    assert_eq!(sub.len(), n - 1);
    assert_eq!(sup.len(), n - 1);

    // working bands: d = diagonal, u1 = first super, u2 = second super (fill)
    let mut d: Vec<f64> = diag.to_vec();
    let mut u1: Vec<f64> = sup.to_vec();
    let mut u2 = vec![0.0; n];
    let mut b: Vec<f64> = rhs.to_vec();

    for i in 0..n - 1 {
        let below = sub[i];
        if below.abs() > d[i].abs() {
            // swap rows i and i+1
            let (ri0, ri1, ri2) = (d[i], u1[i], u2[i]);
            let rj2 = if i + 1 < n - 1 { u1[i + 1] } else { 0.0 };
            d[i] = below;
            u1[i] = d[i + 1];
            u2[i] = rj2;
            d[i + 1] = ri1;
            if i + 1 < n - 1 {
                u1[i + 1] = ri2;
            }
            b.swap(i, i + 1);
            // eliminate with the (old) row i now sitting in row i+1
            let m = ri0 / d[i];
            d[i + 1] -= m * u1[i];
            if i + 1 < n - 1 {
                u1[i + 1] -= m * u2[i];
            }
            b[i + 1] -= m * b[i];
        } else {
            if d[i] == 0.0 {
                return Err(Error::Eigensolver("exactly singular tridiagonal pivot".into()));
            }
            let m = below / d[i];
            d[i + 1] -= m * u1[i];
            if i + 1 < n - 1 {
                u1[i + 1] -= m * u2[i];
            }
            b[i + 1] -= m * b[i];
        }
    }

    if d[n - 1] == 0.0 {
        return Err(Error::Eigensolver("singular tridiagonal system".into()));
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (b[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Discrete 1D Laplacian eigenvalues are known in closed form:
    /// lambda_k = 2 - 2 cos(k pi / (n+1)).
    #[test]
    fn laplacian_eigenvalues() {
        let n = 50;
        let t = SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1]);
        for k in [0usize, 1, 5, 49] {
            let lam = t.eigenvalue(k).unwrap();
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_relative_eq!(lam, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn count_below_is_consistent() {
        let n = 40;
        let t = SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1]);
        let lam_10 = t.eigenvalue(10).unwrap();
        assert_eq!(t.count_below(lam_10 - 1e-9), 10);
        assert_eq!(t.count_below(lam_10 + 1e-9), 11);
    }

    #[test]
    fn eigenpair_residual_small() {
        let n = 80;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.01 * i as f64).collect();
        let t = SymTridiag::new(diag, vec![-1.0; n - 1]);
        let (lam, v) = t.eigenpair(0).unwrap();
        let r = residual_norm(&t, lam, &v);
        assert!(r < 1e-10, "residual {r}");
        assert_relative_eq!(v.iter().map(|x| x * x).sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pivoted_solve_matches_matvec() {
        let n = 30;
        let diag: Vec<f64> = (0..n).map(|i| 0.1 * ((i * 7 % 11) as f64 - 5.0)).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 1.0 + 0.05 * (i % 3) as f64).collect();
        let t = SymTridiag::new(diag.clone(), off.clone());
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = t.matvec(&x_true);
        let x = solve_tridiag_pivoted(&off, &diag, &off, &b).unwrap();
        for (a, e) in x.iter().zip(&x_true) {
            assert_relative_eq!(a, e, epsilon = 1e-9);
        }
    }
}
