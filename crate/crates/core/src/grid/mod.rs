//! Direct 1D finite-difference verification layer.
//!
//! Central-difference discretization of `H0 = -hbar^2 d^2/dx^2 + V` on a
//! symmetric grid with Dirichlet ends. The node set is built to be exactly
//! mirror-symmetric so the parity operator is an exact grid involution, and
//! the linear doublet is solved in decoupled parity sectors, which keeps the
//! exponentially small splitting clean of cross-contamination.

pub mod stationary;
pub mod tridiag;

pub use stationary::{NormSlopePoint, PsiCorrection, StationarySolution};

use crate::error::{Error, Result};
use crate::numeric::simpson_adaptive;
use crate::two_level::NonlinearityPower;
use serde::Serialize;
use tridiag::SymTridiag;

/// Double-well potential choices for the grid layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Potential {
    /// `V(x) = -A [exp(-(x-a)^2/s) + exp(-(x+a)^2/s)]`: bounded, smooth,
    /// symmetric, two nondegenerate minima, vanishing at infinity.
    GaussianDoubleWell { depth: f64, width: f64, separation: f64 },
    /// Two attractive point interactions of strength `beta < 0` at `+-a`,
    /// realized on the grid as `beta/dx` diagonal spikes.
    DoubleDelta { beta: f64, a: f64 },
}

impl Potential {
    /// The regular (multiplication-operator) part of the potential.
    pub fn smooth_value(&self, x: f64) -> f64 {
        match *self {
            Potential::GaussianDoubleWell { depth, width, separation } => {
                -depth
                    * ((-(x - separation) * (x - separation) / width).exp()
                        + (-(x + separation) * (x + separation) / width).exp())
            }
            Potential::DoubleDelta { .. } => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Potential::GaussianDoubleWell { depth, width, separation } => {
                if depth <= 0.0 || width <= 0.0 || separation <= 0.0 {
                    return Err(Error::domain(format!(
                        "Gaussian well needs depth, width, separation > 0, got \
                         ({depth}, {width}, {separation})"
                    )));
                }
            }
            Potential::DoubleDelta { beta, a } => {
                if beta >= 0.0 || a <= 0.0 {
                    return Err(Error::domain(format!(
                        "double delta needs beta < 0 and a > 0, got ({beta}, {a})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Location of the right potential minimum (by symmetry the left one is
    /// its mirror). For the delta pair this is the interaction point.
    pub fn right_minimum(&self) -> f64 {
        match *self {
            Potential::GaussianDoubleWell { separation, width, .. } => {
                // golden-section minimization of the smooth profile
                let (mut a, mut b) = (0.2 * separation, separation + 2.0 * width.sqrt());
                let phi = 0.5 * (5f64.sqrt() - 1.0);
                let mut c = b - phi * (b - a);
                let mut d = a + phi * (b - a);
                for _ in 0..200 {
                    if self.smooth_value(c) < self.smooth_value(d) {
                        b = d;
                    } else {
                        a = c;
                    }
                    c = b - phi * (b - a);
                    d = a + phi * (b - a);
                    if (b - a).abs() < 1e-14 {
                        break;
                    }
                }
                0.5 * (a + b)
            }
            Potential::DoubleDelta { a, .. } => a,
        }
    }
}

/// Discretized stationary problem: grid, Hamiltonian, physics parameters.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub potential: Potential,
    pub hbar: f64,
    pub sigma: NonlinearityPower,
    /// Default nonlinear coupling; stationary solves derive their own from
    /// the effective coupling `eta`.
    pub epsilon: f64,
    pub x_max: f64,
    pub n: usize,
    x: Vec<f64>,
    dx: f64,
    h_diag: Vec<f64>,
    h_off: f64,
}

/// Linear doublet data: lowest even/odd eigeninstall pair and the single-well
/// states built from them.
#[derive(Debug, Clone)]
pub struct LinearDoublet {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Half-splitting `(lambda_minus - lambda_plus) / 2`.
    pub omega: f64,
    /// Mean level `(lambda_plus + lambda_minus) / 2`.
    pub big_omega: f64,
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
    pub phi_r: Vec<f64>,
    pub phi_l: Vec<f64>,
    /// Coupling constant for `g = 1`.
    pub c_r: f64,
}

impl DiscreteProblem {
    /// Builds the problem on `[-x_max, x_max]` with `n` nodes. Nodes are
    /// generated as exact mirror pairs so parity commutes with the
    /// discretized Hamiltonian to the last bit.
    pub fn new(
        potential: Potential,
        hbar: f64,
        sigma: NonlinearityPower,
        x_max: f64,
        n: usize,
    ) -> Result<Self> {
        potential.validate()?;
        if n < 3 {
            return Err(Error::domain(format!("grid needs n >= 3, got {n}")));
        }
        if !(x_max > 0.0) {
            return Err(Error::domain(format!("grid needs x_max > 0, got {x_max}")));
        }
        if !(hbar > 0.0) {
            return Err(Error::domain(format!("hbar must be positive, got {hbar}")));
        }
        let dx = 2.0 * x_max / (n - 1) as f64;
        let half = (n - 1) as f64 / 2.0;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 - half) * dx).collect();
        let h_off = -hbar * hbar / (dx * dx);
        let mut h_diag: Vec<f64> =
            x.iter().map(|&xi| 2.0 * hbar * hbar / (dx * dx) + potential.smooth_value(xi)).collect();
        if let Potential::DoubleDelta { beta, a } = potential {
            // fold the point interactions into the diagonal at the nodes
            // nearest +-a (as an exact mirror pair)
            let mut right = 0usize;
            let mut best = f64::INFINITY;
            for (i, &xi) in x.iter().enumerate() {
                if (xi - a).abs() < best {
                    best = (xi - a).abs();
                    right = i;
                }
            }
            let left = n - 1 - right;
            if left == right {
                return Err(Error::domain(
                    "delta nodes collapsed to the center; grid too coarse".to_string(),
                ));
            }
            h_diag[right] += beta / dx;
            h_diag[left] += beta / dx;
        }
        Ok(DiscreteProblem { potential, hbar, sigma, epsilon: 0.0, x_max, n, x, dx, h_diag, h_off })
    }

    /// Chooses domain size and resolution from decay estimates, then widens
    /// until the ground state's boundary amplitude is below 1e-12 of its
    /// peak.
    pub fn auto(potential: Potential, hbar: f64, sigma: NonlinearityPower) -> Result<Self> {
        let (mut x_max, dx) = match potential {
            Potential::GaussianDoubleWell { depth, separation, .. } => {
                let kappa = (0.6 * depth).sqrt() / hbar;
                (separation + 30.0 / kappa, hbar / (15.0 * depth.sqrt().max(1.0)))
            }
            Potential::DoubleDelta { beta, a } => {
                let kappa = 0.5 * beta.abs() / (hbar * hbar);
                (a + 32.0 / kappa, (1.0 / (24.0 * kappa)).min(a / 8.0))
            }
        };
        for _ in 0..5 {
            let problem = Self::with_spacing(potential, hbar, sigma, x_max, dx)?;
            let doublet = problem.linear_doublet()?;
            let peak = doublet.phi_plus.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            let edge = doublet.phi_plus[0]
                .abs()
                .max(doublet.phi_plus[problem.n - 1].abs());
            if edge <= 1e-12 * peak {
                return Ok(problem);
            }
            x_max *= 1.5;
        }
        Err(Error::Eigensolver(
            "could not confine the ground state below 1e-12 at the boundary".to_string(),
        ))
    }

    /// Builds with a target spacing; for the delta pair the spacing is
    /// snapped so the interaction points fall exactly on nodes.
    pub fn with_spacing(
        potential: Potential,
        hbar: f64,
        sigma: NonlinearityPower,
        x_max: f64,
        dx_target: f64,
    ) -> Result<Self> {
        match potential {
            Potential::DoubleDelta { a, .. } => {
                let m = (a / dx_target).ceil().max(2.0) as usize;
                let dx = a / m as f64;
                let half_units = (x_max / dx).ceil() as usize;
                let n = 2 * half_units + 1;
                Self::new(potential, hbar, sigma, half_units as f64 * dx, n)
            }
            _ => {
                let half_units = (x_max / dx_target).ceil() as usize;
                let n = 2 * half_units + 1;
                Self::new(potential, hbar, sigma, half_units as f64 * dx_target, n)
            }
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// The discretized linear Hamiltonian.
    pub fn hamiltonian(&self) -> SymTridiag {
        SymTridiag::new(self.h_diag.clone(), vec![self.h_off; self.n - 1])
    }

    /// Grid inner product with the quadrature weight `dx`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.dx * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }

    /// Forward-difference gradient norm `||D u||`.
    pub fn grad_norm(&self, u: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n - 1 {
            let d = (u[i + 1] - u[i]) / self.dx;
            s += d * d;
        }
        (self.dx * s).sqrt()
    }

    /// Discrete H^2 norm: `(||u||^2 + ||D2 u||^2)^{1/2}` with the
    /// second-difference Laplacian and Dirichlet ends.
    pub fn h2_norm(&self, u: &[f64]) -> f64 {
        let lap = self.second_difference(u);
        (self.inner(u, u) + self.inner(&lap, &lap)).sqrt()
    }

    pub(crate) fn second_difference(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        let dx2 = self.dx * self.dx;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let left = if i > 0 { u[i - 1] } else { 0.0 };
            let right = if i + 1 < n { u[i + 1] } else { 0.0 };
            out[i] = (right - 2.0 * u[i] + left) / dx2;
        }
        out
    }

    /// Applies `H0` to a grid vector.
    pub fn apply_h0(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.h_diag[i] * u[i];
            if i > 0 {
                s += self.h_off * u[i - 1];
            }
            if i + 1 < n {
                s += self.h_off * u[i + 1];
            }
            out[i] = s;
        }
        out
    }

    /// Lowest even/odd eigenpairs and the single-well states.
    ///
    /// The even and odd sectors are solved separately, so parity is exact by
    /// construction; `phi_plus` is sign-fixed positive and `phi_minus`
    /// positive on `x > 0`. Fails if fewer than two bound states resolve
    /// below the essential-spectrum edge.
    pub fn linear_doublet(&self) -> Result<LinearDoublet> {
        let n = self.n;
        let center = (n - 1) / 2;
        let t = self.h_off;

        // parity sectors (n odd: center node belongs to the even sector)
        let (even, odd) = if n % 2 == 1 {
            let m = center;
            let mut ediag = Vec::with_capacity(m + 1);
            let mut eoff = Vec::with_capacity(m);
            ediag.push(self.h_diag[center]);
            for j in 1..=m {
                ediag.push(self.h_diag[center + j]);
                eoff.push(if j == 1 { std::f64::consts::SQRT_2 * t } else { t });
            }
            let odiag: Vec<f64> = (1..=m).map(|j| self.h_diag[center + j]).collect();
            let ooff = vec![t; m.saturating_sub(1)];
            (SymTridiag::new(ediag, eoff), SymTridiag::new(odiag, ooff))
        } else {
            let m = n / 2;
            let mut ediag: Vec<f64> = (m..n).map(|i| self.h_diag[i]).collect();
            let mut odiag = ediag.clone();
            ediag[0] += t;
            odiag[0] -= t;
            let off = vec![t; m - 1];
            (SymTridiag::new(ediag, off.clone()), SymTridiag::new(odiag, off))
        };

        let (lam_plus, v_even) = even.eigenpair(0)?;
        let (lam_minus, v_odd) = odd.eigenpair(0)?;
        if lam_plus >= lam_minus {
            return Err(Error::Eigensolver(format!(
                "even ground state {lam_plus} not below odd ground state {lam_minus}"
            )));
        }
        // both levels must sit below the essential-spectrum edge (0 for the
        // potentials supported here)
        if lam_minus >= 0.0 {
            return Err(Error::DoubletMissing);
        }

        // reconstruct full-grid vectors as exact mirror (anti)symmetric data
        let mut phi_plus = vec![0.0; n];
        let mut phi_minus = vec![0.0; n];
        if n % 2 == 1 {
            phi_plus[center] = v_even[0];
            for j in 1..=center {
                let val = v_even[j] / std::f64::consts::SQRT_2;
                phi_plus[center + j] = val;
                phi_plus[center - j] = val;
            }
            for j in 1..=center {
                let val = v_odd[j - 1] / std::f64::consts::SQRT_2;
                phi_minus[center + j] = val;
                phi_minus[center - j] = -val;
            }
        } else {
            let m = n / 2;
            for j in 0..m {
                let e = v_even[j] / std::f64::consts::SQRT_2;
                phi_plus[m + j] = e;
                phi_plus[m - 1 - j] = e;
                let o = v_odd[j] / std::f64::consts::SQRT_2;
                phi_minus[m + j] = o;
                phi_minus[m - 1 - j] = -o;
            }
        }

        // quadrature normalization and deterministic signs
        let np = self.norm(&phi_plus);
        let nm = self.norm(&phi_minus);
        for v in phi_plus.iter_mut() {
            *v /= np;
        }
        for v in phi_minus.iter_mut() {
            *v /= nm;
        }
        if phi_plus.iter().sum::<f64>() < 0.0 {
            for v in phi_plus.iter_mut() {
                *v = -*v;
            }
        }
        let right_sum: f64 = phi_minus[center + 1..].iter().sum();
        if right_sum < 0.0 {
            for v in phi_minus.iter_mut() {
                *v = -*v;
            }
        }

        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let phi_r: Vec<f64> =
            phi_plus.iter().zip(&phi_minus).map(|(p, m)| (p + m) * inv_sqrt2).collect();
        let phi_l: Vec<f64> =
            phi_plus.iter().zip(&phi_minus).map(|(p, m)| (p - m) * inv_sqrt2).collect();

        let mut doublet = LinearDoublet {
            lambda_plus: lam_plus,
            lambda_minus: lam_minus,
            omega: 0.5 * (lam_minus - lam_plus),
            big_omega: 0.5 * (lam_plus + lam_minus),
            phi_plus,
            phi_minus,
            phi_r,
            phi_l,
            c_r: 0.0,
        };
        let ones = vec![1.0; n];
        doublet.c_r = self.coupling_constant(&doublet, &ones)?;
        Ok(doublet)
    }

    /// Quadrature value of the coupling constant
    /// `c_R = <phi_R, g |phi_R|^{2s} phi_R>`, cross-checked against `c_L`.
    pub fn coupling_constant(&self, doublet: &LinearDoublet, g: &[f64]) -> Result<f64> {
        let s = self.sigma.get();
        let c_r: f64 = self.dx
            * doublet
                .phi_r
                .iter()
                .zip(g)
                .map(|(&p, &gi)| gi * (p * p).powf(s) * p * p)
                .sum::<f64>();
        let c_l: f64 = self.dx
            * doublet
                .phi_l
                .iter()
                .zip(g)
                .map(|(&p, &gi)| gi * (p * p).powf(s) * p * p)
                .sum::<f64>();
        if (c_r - c_l).abs() > 1e-10 * c_r.abs() {
            return Err(Error::OracleInconsistency(format!(
                "coupling asymmetry: c_R = {c_r:.15e}, c_L = {c_l:.15e}"
            )));
        }
        if c_r <= 0.0 {
            return Err(Error::NonpositiveCoupling(c_r));
        }
        Ok(c_r)
    }

    /// Agmon distance between the wells: in 1D the minimizing path is the
    /// straight segment between the minima, so this is a quadrature of
    /// `sqrt([V - V_min]_+)` refined to 1e-8.
    pub fn agmon_distance(&self) -> f64 {
        let x_plus = self.potential.right_minimum();
        let v_min = self.potential.smooth_value(x_plus);
        let integrand =
            |x: f64| (self.potential.smooth_value(x) - v_min).max(0.0).sqrt();
        simpson_adaptive(integrand, -x_plus, x_plus, 1e-8)
    }

    /// Projector `Pi_c = I - |phi_+><phi_+| - |phi_-><phi_-|`.
    pub fn project_out_doublet(&self, doublet: &LinearDoublet, v: &[f64]) -> Vec<f64> {
        let cp = self.inner(&doublet.phi_plus, v);
        let cm = self.inner(&doublet.phi_minus, v);
        v.iter()
            .zip(doublet.phi_plus.iter().zip(&doublet.phi_minus))
            .map(|(&vi, (&pp, &pm))| vi - cp * pp - cm * pm)
            .collect()
    }

    /// Energy functional `<psi, H0 psi> + eps/(s+1) * integral |psi|^{2s+2}`
    /// (with `g = 1`).
    pub fn energy_functional(&self, psi: &[f64], epsilon: f64) -> f64 {
        let s = self.sigma.get();
        let h0psi = self.apply_h0(psi);
        let quad: f64 =
            self.dx * psi.iter().map(|&p| (p * p).powf(s) * p * p).sum::<f64>();
        self.inner(psi, &h0psi) + epsilon / (s + 1.0) * quad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::line_fit;
    use approx::assert_relative_eq;

    fn sig(s: f64) -> NonlinearityPower {
        NonlinearityPower::new(s).unwrap()
    }

    fn gaussian_default() -> Potential {
        Potential::GaussianDoubleWell { depth: 1.0, width: 0.5, separation: 1.0 }
    }

    #[test]
    fn grid_nodes_are_exact_mirrors() {
        let p = DiscreteProblem::new(gaussian_default(), 0.2, sig(1.0), 6.0, 501).unwrap();
        let x = p.grid();
        for i in 0..x.len() {
            assert_eq!(x[i], -x[x.len() - 1 - i], "node {i}");
        }
        // the diagonal inherits the exact symmetry: parity commutes exactly
        for i in 0..p.n {
            assert_eq!(p.h_diag[i], p.h_diag[p.n - 1 - i], "diag {i}");
        }
    }

    #[test]
    fn doublet_parity_is_exact() {
        let p = DiscreteProblem::new(gaussian_default(), 0.2, sig(1.0), 7.0, 701).unwrap();
        let d = p.linear_doublet().unwrap();
        let n = p.n;
        for i in 0..n {
            assert_eq!(d.phi_plus[i], d.phi_plus[n - 1 - i]);
            assert_eq!(d.phi_minus[i], -d.phi_minus[n - 1 - i]);
        }
        assert!(d.lambda_plus < d.lambda_minus);
        assert!(d.omega > 0.0);
        // phi_plus positive, phi_R right-localized
        assert!(d.phi_plus.iter().all(|&v| v >= 0.0 || v.abs() < 1e-13));
        let right_mass: f64 = d.phi_r[(n - 1) / 2..].iter().map(|v| v * v).sum::<f64>() * p.dx();
        assert!(right_mass > 0.95, "phi_R mass on the right: {right_mass}");
        assert_relative_eq!(p.norm(&d.phi_r), 1.0, epsilon = 1e-10);
        assert_relative_eq!(p.norm(&d.phi_l), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn doublet_matches_full_matrix_eigenvalues() {
        let p = DiscreteProblem::new(gaussian_default(), 0.25, sig(1.0), 6.0, 401).unwrap();
        let d = p.linear_doublet().unwrap();
        let h = p.hamiltonian();
        let lam0 = h.eigenvalue(0).unwrap();
        let lam1 = h.eigenvalue(1).unwrap();
        assert_relative_eq!(d.lambda_plus, lam0, epsilon = 1e-10);
        assert_relative_eq!(d.lambda_minus, lam1, epsilon = 1e-10);
    }

    #[test]
    fn coupling_constant_symmetric_and_positive() {
        let p = DiscreteProblem::new(gaussian_default(), 0.2, sig(1.0), 7.0, 801).unwrap();
        let d = p.linear_doublet().unwrap();
        assert!(d.c_r > 0.0);
        // a symmetric non-constant weight keeps c_R = c_L
        let g: Vec<f64> = p.grid().iter().map(|&x| 1.0 + 0.5 * (x * x).min(4.0)).collect();
        let c = p.coupling_constant(&d, &g).unwrap();
        assert!(c > 0.0);
    }

    #[test]
    fn agmon_distance_values() {
        // barrier-free: the delta pair has V = V_min = 0 on the segment
        let p = DiscreteProblem::new(
            Potential::DoubleDelta { beta: -1.0, a: 1.0 },
            0.3,
            sig(1.0),
            6.0,
            601,
        )
        .unwrap();
        assert_eq!(p.agmon_distance(), 0.0);
        // frozen self-converged value for the default Gaussian well
        let p = DiscreteProblem::new(gaussian_default(), 0.1, sig(1.0), 6.0, 601).unwrap();
        let rho = p.agmon_distance();
        assert_relative_eq!(rho, 1.1048189907440615, max_relative = 1e-7);
        // quadrature self-convergence at the 1e-8 level
        let refined = crate::numeric::simpson(
            |x| (p.potential.smooth_value(x) + 1.0003363674699253).max(0.0).sqrt(),
            -0.9993256731008134,
            0.9993256731008134,
            16384,
        );
        assert!((rho - refined).abs() < 1e-7);
    }

    #[test]
    fn overlap_decays_exponentially_in_inverse_hbar() {
        let mut inv_h = Vec::new();
        let mut log_overlap = Vec::new();
        for &hb in &[0.12, 0.14, 0.17, 0.2] {
            let p = DiscreteProblem::auto(gaussian_default(), hb, sig(1.0)).unwrap();
            let d = p.linear_doublet().unwrap();
            let overlap = d
                .phi_r
                .iter()
                .zip(&d.phi_l)
                .map(|(r, l)| (r * l).abs())
                .fold(0.0f64, f64::max);
            inv_h.push(1.0 / hb);
            log_overlap.push(overlap.ln());
        }
        let (slope, _) = line_fit(&inv_h, &log_overlap);
        assert!(slope < 0.0, "overlap must decay, slope = {slope}");
        // decay rate should be on the order of the Agmon distance
        assert!(slope.abs() > 0.5, "decay too weak: {slope}");
    }

    #[test]
    fn gradient_scaling_lemma() {
        // ||grad phi|| * sqrt(hbar) stays bounded across the sweep
        let mut values = Vec::new();
        for &hb in &[0.08, 0.1, 0.14, 0.2] {
            let p = DiscreteProblem::auto(gaussian_default(), hb, sig(1.0)).unwrap();
            let d = p.linear_doublet().unwrap();
            values.push(p.grad_norm(&d.phi_plus) * hb.sqrt());
        }
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 2.0, "scaling spread {values:?}");
    }

    #[test]
    fn delta_well_grid_matches_closed_form() {
        // hbar = 1, beta = -2, a = 1: compare lambda_pm against hbar^2 E_j
        // with Richardson extrapolation over two resolutions
        let sigma = sig(1.0);
        let pot = Potential::DoubleDelta { beta: -2.0, a: 1.0 };
        let solve = |dx: f64| {
            let p = DiscreteProblem::with_spacing(pot, 1.0, sigma, 30.0, dx).unwrap();
            let d = p.linear_doublet().unwrap();
            (d.lambda_plus, d.lambda_minus)
        };
        let (c_p, c_m) = solve(0.02);
        let (f_p, f_m) = solve(0.01);
        let extr_p = (4.0 * f_p - c_p) / 3.0;
        let extr_m = (4.0 * f_m - c_m) / 3.0;
        assert_relative_eq!(extr_p, -1.2295650725757956, epsilon = 2e-6);
        assert_relative_eq!(extr_m, -0.6349095705470411, epsilon = 2e-6);
    }

    #[test]
    fn missing_doublet_is_reported() {
        // a single shallow delta-like well cannot be built here, but a
        // repulsive-free check: huge hbar pushes the odd state into the
        // continuum
        let pot = Potential::GaussianDoubleWell { depth: 0.05, width: 0.3, separation: 1.0 };
        let p = DiscreteProblem::new(pot, 1.5, sig(1.0), 8.0, 401).unwrap();
        match p.linear_doublet() {
            Err(Error::DoubletMissing) | Err(Error::Eigensolver(_)) => {}
            other => panic!("expected missing doublet, got {other:?}"),
        }
    }

    #[test]
    fn energy_functional_first_variation_vanishes() {
        // stationarity on the constraint manifold is exercised in the
        // stationary tests; here just check the functional is finite and
        // symmetric under psi -> -psi
        let p = DiscreteProblem::new(gaussian_default(), 0.2, sig(1.0), 6.0, 301).unwrap();
        let d = p.linear_doublet().unwrap();
        let e1 = p.energy_functional(&d.phi_plus, -0.1);
        let neg: Vec<f64> = d.phi_plus.iter().map(|v| -v).collect();
        let e2 = p.energy_functional(&neg, -0.1);
        assert_relative_eq!(e1, e2, epsilon = 1e-12);
    }
}
