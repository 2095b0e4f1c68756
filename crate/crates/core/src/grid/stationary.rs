//! Nonlinear stationary solves on the grid: the contraction fixed point for
//! the doublet-orthogonal correction, a damped bordered-Newton iteration for
//! full stationary states, the discrete linearized operators, and norm-slope
//! measurements along branches.

use super::tridiag::{solve_tridiag_pivoted, SymTridiag};
use super::{DiscreteProblem, LinearDoublet};
use crate::error::{Error, Result};
use crate::two_level::BranchPoint;
use serde::Serialize;

/// Doublet-orthogonal correction produced by the fixed-point iteration.
#[derive(Debug, Clone)]
pub struct PsiCorrection {
    pub psi_c: Vec<f64>,
    pub iterations: usize,
    /// Norm of the defining-equation residual.
    pub residual: f64,
}

/// A converged stationary state of the discretized nonlinear problem.
#[derive(Debug, Clone, Serialize)]
pub struct StationarySolution {
    pub psi: Vec<f64>,
    /// Frequency `lambda` of the stationary state.
    pub lam: f64,
    /// Reduced level `(lambda - Omega) / omega`.
    pub e_reduced: f64,
    /// Imbalance recovered from the single-well projections.
    pub z: f64,
    /// Norm of the doublet-orthogonal part of `psi`.
    pub psi_c_norm: f64,
    pub residual: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub iterations: usize,
    /// Set when the converged imbalance moved more than 0.1 from the seed.
    pub branch_jumped: bool,
}

/// `F(lambda) = |epsilon|^{1/s}` and its centered slope along a branch.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormSlopePoint {
    pub lambda: f64,
    pub f_value: f64,
    pub df_dlambda: f64,
}

fn signed_power(v: f64, s: f64) -> f64 {
    // |v|^{2s} v, safe for fractional s
    (v * v).powf(s) * v
}

impl DiscreteProblem {
    /// Fixed-point solve of the doublet-orthogonal correction
    /// `psi_c = -eps [H0 - Omega - omega E]^{-1} Pi_c |psi|^{2s} psi`
    /// starting from zero, iterated until the discrete H^2 difference of
    /// successive iterates falls below 1e-12.
    ///
    /// The shifted operator is applied through a pivoted banded solve with
    /// the projector applied both before and after to control roundoff
    /// leakage onto the doublet.
    pub fn psi_c_fixed_point(
        &self,
        doublet: &LinearDoublet,
        a_r: f64,
        a_l: f64,
        e_reduced: f64,
        epsilon: f64,
    ) -> Result<PsiCorrection> {
        if a_r * a_r + a_l * a_l > 1.0 + 1e-12 {
            return Err(Error::domain(format!(
                "occupations must satisfy |a_R|^2 + |a_L|^2 <= 1, got {}",
                a_r * a_r + a_l * a_l
            )));
        }
        let s = self.sigma.get();
        let n = self.n;
        let shift = doublet.big_omega + doublet.omega * e_reduced;
        let shifted_diag: Vec<f64> = (0..n).map(|i| self.h_diag_at(i) - shift).collect();
        let off = vec![self.h_off_value(); n - 1];

        let phi: Vec<f64> = doublet
            .phi_r
            .iter()
            .zip(&doublet.phi_l)
            .map(|(r, l)| a_r * r + a_l * l)
            .collect();

        let apply_f = |u: &[f64]| -> Result<Vec<f64>> {
            let psi: Vec<f64> = phi.iter().zip(u).map(|(p, c)| p + c).collect();
            let w: Vec<f64> = psi.iter().map(|&p| signed_power(p, s)).collect();
            let rhs = self.project_out_doublet(doublet, &w);
            let y = solve_tridiag_pivoted(&off, &shifted_diag, &off, &rhs)?;
            let y = self.project_out_doublet(doublet, &y);
            Ok(y.iter().map(|v| -epsilon * v).collect())
        };

        let mut u = vec![0.0; n];
        let mut prev_diff = f64::INFINITY;
        for iter in 1..=60 {
            let next = apply_f(&u)?;
            let diff_vec: Vec<f64> = next.iter().zip(&u).map(|(a, b)| a - b).collect();
            let diff = self.h2_norm(&diff_vec);
            u = next;
            if diff < 1e-12 {
                // residual of the defining equation
                let psi: Vec<f64> = phi.iter().zip(&u).map(|(p, c)| p + c).collect();
                let w: Vec<f64> = psi.iter().map(|&p| signed_power(p, s)).collect();
                let pw = self.project_out_doublet(doublet, &w);
                let h0u = self.apply_h0(&u);
                let res_vec: Vec<f64> = (0..n)
                    .map(|i| h0u[i] - shift * u[i] + epsilon * pw[i])
                    .collect();
                let residual = self.norm(&res_vec);
                if residual > 1e-10 {
                    return Err(Error::OracleInconsistency(format!(
                        "fixed point converged but the equation residual is {residual:.3e}"
                    )));
                }
                let leak = self
                    .inner(&doublet.phi_plus, &u)
                    .abs()
                    .max(self.inner(&doublet.phi_minus, &u).abs());
                if leak > 1e-12 {
                    return Err(Error::OracleInconsistency(format!(
                        "projection leakage {leak:.3e} onto the doublet"
                    )));
                }
                return Ok(PsiCorrection { psi_c: u, iterations: iter, residual });
            }
            if iter > 2 && diff > 0.9 * prev_diff {
                return Err(Error::NonContraction(diff / prev_diff));
            }
            prev_diff = diff;
        }
        Err(Error::NonContraction(1.0))
    }

    fn h_diag_at(&self, i: usize) -> f64 {
        self.hamiltonian_diag()[i]
    }

    /// Solves the full discretized stationary problem
    /// `H0 psi + eps |psi|^{2s} psi = lambda psi`, `||psi|| = 1`
    /// by damped Newton on the bordered system, seeded from a reduced branch
    /// point; `eps = eta * omega / c_R`.
    pub fn solve_stationary(
        &self,
        doublet: &LinearDoublet,
        eta: f64,
        init: &BranchPoint,
    ) -> Result<StationarySolution> {
        let epsilon = eta * doublet.omega / doublet.c_r;
        let p = ((1.0 + init.z) / 2.0).sqrt();
        let q = ((1.0 - init.z) / 2.0).sqrt();
        let a_r = p * init.theta.cos();
        let a_l = q;
        let psi0: Vec<f64> = doublet
            .phi_r
            .iter()
            .zip(&doublet.phi_l)
            .map(|(r, l)| a_r * r + a_l * l)
            .collect();
        let lam0 = doublet.big_omega + doublet.omega * init.energy;
        self.solve_stationary_from(doublet, eta, epsilon, psi0, lam0, init.z)
    }

    /// Newton solve from an explicit seed; used for warm-started
    /// continuation along a branch.
    pub fn solve_stationary_from(
        &self,
        doublet: &LinearDoublet,
        eta: f64,
        epsilon: f64,
        mut psi: Vec<f64>,
        mut lam: f64,
        z_init: f64,
    ) -> Result<StationarySolution> {
        let s = self.sigma.get();
        let n = self.n;
        let off = vec![self.h_off_value(); n - 1];

        let residual = |psi: &[f64], lam: f64| -> (Vec<f64>, f64) {
            let h0 = self.apply_h0(psi);
            let mut r1 = vec![0.0; n];
            for i in 0..n {
                r1[i] = h0[i] + epsilon * signed_power(psi[i], s) - lam * psi[i];
            }
            let r2 = self.inner(psi, psi) - 1.0;
            (r1, r2)
        };
        let res_norm = |r1: &[f64], r2: f64| -> f64 {
            (self.inner(r1, r1) + r2 * r2).sqrt()
        };

        let (mut r1, mut r2) = residual(&psi, lam);
        let mut rn = res_norm(&r1, r2);
        let mut iterations = 0usize;
        for _ in 0..100 {
            if rn < 1e-10 {
                break;
            }
            iterations += 1;
            // bordered Newton: A d_psi - psi d_lam = -r1; 2 dx psi^T d_psi = -r2
            let a_diag: Vec<f64> = (0..n)
                .map(|i| {
                    self.h_diag_at(i) + epsilon * (2.0 * s + 1.0) * (psi[i] * psi[i]).powf(s) - lam
                })
                .collect();
            let u = solve_tridiag_pivoted(&off, &a_diag, &off, &r1)?;
            let v = solve_tridiag_pivoted(&off, &a_diag, &off, &psi)?;
            let denom = 2.0 * self.inner(&psi, &v);
            if denom.abs() < 1e-300 {
                return Err(Error::Eigensolver("bordered system is singular".to_string()));
            }
            let d_lam = (-r2 + 2.0 * self.inner(&psi, &u)) / denom;
            let d_psi: Vec<f64> = (0..n).map(|i| -u[i] + d_lam * v[i]).collect();

            // damping: halve on residual increase, up to 8 times
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..=8 {
                let cand_psi: Vec<f64> =
                    (0..n).map(|i| psi[i] + step * d_psi[i]).collect();
                let cand_lam = lam + step * d_lam;
                let (c1, c2) = residual(&cand_psi, cand_lam);
                let cn = res_norm(&c1, c2);
                if cn < rn {
                    psi = cand_psi;
                    lam = cand_lam;
                    r1 = c1;
                    r2 = c2;
                    rn = cn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                return Err(Error::NoConvergence { steps: iterations, residual: rn });
            }
        }
        if rn >= 1e-10 {
            return Err(Error::NoConvergence { steps: iterations, residual: rn });
        }

        let a_r = self.inner(&doublet.phi_r, &psi);
        let a_l = self.inner(&doublet.phi_l, &psi);
        let z = a_r * a_r - a_l * a_l;
        let psi_c = self.project_out_doublet(doublet, &psi);
        Ok(StationarySolution {
            lam,
            e_reduced: (lam - doublet.big_omega) / doublet.omega,
            z,
            psi_c_norm: self.norm(&psi_c),
            residual: rn,
            eta,
            epsilon,
            iterations,
            branch_jumped: (z - z_init).abs() > 0.1,
            psi,
        })
    }

    /// Discrete linearized operators around a converged real solution:
    /// `L+ = H0 - lambda + (2s+1) eps |psi|^{2s}` and
    /// `L- = H0 - lambda + eps |psi|^{2s}` (for the rescaled state the sign
    /// convention absorbs `eps < 0`). `L-` annihilates the solution up to
    /// the Newton residual, which is verified here.
    pub fn linearized_operators(
        &self,
        sol: &StationarySolution,
    ) -> Result<(SymTridiag, SymTridiag)> {
        let s = self.sigma.get();
        let n = self.n;
        let build = |factor: f64| -> SymTridiag {
            let diag: Vec<f64> = (0..n)
                .map(|i| {
                    self.h_diag_at(i) - sol.lam
                        + factor * sol.epsilon * (sol.psi[i] * sol.psi[i]).powf(s)
                })
                .collect();
            SymTridiag::new(diag, vec![self.h_off_value(); n - 1])
        };
        let l_plus = build(2.0 * s + 1.0);
        let l_minus = build(1.0);
        let lm_psi = l_minus.matvec(&sol.psi);
        let viol = self.norm(&lm_psi) / self.norm(&sol.psi);
        if viol > 1e-8 {
            return Err(Error::OracleInconsistency(format!(
                "L- does not annihilate the solution: residual {viol:.3e} \
                 (unconverged stationary state?)"
            )));
        }
        Ok((l_plus, l_minus))
    }

    /// `F(lambda) = |eps|^{1/s}` along a branch of converged solutions with
    /// centered slopes (one-sided at the ends). The branch must be ordered
    /// with strictly monotone `lambda`; a fold raises an error.
    pub fn norm_slope(
        &self,
        branch: &[(f64, StationarySolution)],
    ) -> Result<Vec<NormSlopePoint>> {
        if branch.len() < 3 {
            return Err(Error::domain(
                "norm slope needs at least three consecutive solutions".to_string(),
            ));
        }
        let s = self.sigma.get();
        let lambdas: Vec<f64> = branch.iter().map(|(_, sol)| sol.lam).collect();
        let increasing = lambdas[1] > lambdas[0];
        for w in lambdas.windows(2) {
            if (w[1] > w[0]) != increasing || w[1] == w[0] {
                return Err(Error::NonMonotoneBranch);
            }
        }
        let f: Vec<f64> =
            branch.iter().map(|(_, sol)| sol.epsilon.abs().powf(1.0 / s)).collect();
        let m = branch.len();
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let (a, b) = if i == 0 {
                (0usize, 1usize)
            } else if i == m - 1 {
                (m - 2, m - 1)
            } else {
                (i - 1, i + 1)
            };
            out.push(NormSlopePoint {
                lambda: lambdas[i],
                f_value: f[i],
                df_dlambda: (f[b] - f[a]) / (lambdas[b] - lambdas[a]),
            });
        }
        Ok(out)
    }

    /// Brackets the symmetry-breaking coupling on the attractive side: the
    /// smallest `|eta|` at which a Newton solve seeded slightly off the
    /// symmetric state converges to a visibly asymmetric one. Returns the
    /// bracket midpoint; the bracket width shrinks to `tol`.
    pub fn detect_symmetry_breaking(
        &self,
        doublet: &LinearDoublet,
        eta_lo: f64,
        eta_hi: f64,
        tol: f64,
    ) -> Result<f64> {
        if !(eta_lo < eta_hi && eta_hi < 0.0) {
            return Err(Error::domain(format!(
                "need eta_lo < eta_hi < 0, got [{eta_lo}, {eta_hi}]"
            )));
        }
        let broken = |eta: f64| -> Result<bool> {
            let z_guess = 0.2;
            let mut seed = BranchPoint::symmetric(eta, self.sigma);
            seed.z = z_guess;
            let p = ((1.0 + z_guess) / 2.0).sqrt();
            let q = ((1.0 - z_guess) / 2.0).sqrt();
            let psi0: Vec<f64> = doublet
                .phi_r
                .iter()
                .zip(&doublet.phi_l)
                .map(|(r, l)| p * r + q * l)
                .collect();
            let lam0 = doublet.big_omega + doublet.omega * seed.energy;
            let epsilon = eta * doublet.omega / doublet.c_r;
            let sol =
                self.solve_stationary_from(doublet, eta, epsilon, psi0, lam0, z_guess)?;
            Ok(sol.z.abs() > 0.05)
        };
        let mut lo = eta_lo; // broken side
        let mut hi = eta_hi; // symmetric side
        if !broken(lo)? {
            return Err(Error::domain(format!(
                "no symmetry breaking detected down to eta = {eta_lo}"
            )));
        }
        if broken(hi)? {
            return Err(Error::domain(format!(
                "symmetry already broken at eta = {eta_hi}"
            )));
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if broken(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn hamiltonian_diag(&self) -> &[f64] {
        &self.h_diag
    }

    fn h_off_value(&self) -> f64 {
        self.h_off
    }
}
