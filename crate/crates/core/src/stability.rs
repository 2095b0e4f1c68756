//! Stability classification of the reduced branches.
//!
//! Three routes are implemented and cross-checked by the tests:
//! the Hessian determinant of the reduced Hamiltonian (dynamical
//! classification), the 2x2 reduced matrices governing the negative
//! eigenvalue counts of the linearized operators `L+` and `L-`, and the
//! norm-slope condition. On the attractive side they must agree.

use crate::error::{Error, Result};
use crate::numeric::{power_diff, power_sum};
use crate::two_level::{
    self, BranchLabel, BranchPoint, BranchSign, NonlinearityPower, Phase, Stability,
};
use serde::Serialize;

/// Sign of `dF/d lambda` along a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlopeSign {
    Negative,
    Positive,
    Zero,
}

/// Everything the orbital criterion consumes, plus the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub det_hess: f64,
    pub l_plus_negative_count: usize,
    pub l_minus_nonnegative: bool,
    pub slope_sign: SlopeSign,
    pub verdict: Stability,
}

/// Reduced 2x2 data for `L+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LPlusReduced {
    pub negative_count: usize,
    pub alpha: f64,
    pub beta: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// Reduced 2x2 data for `L-`; `mu1` vanishes on-branch (phase mode).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LMinusReduced {
    pub alpha_p: f64,
    pub beta_p: f64,
    pub mu1: f64,
    pub mu2: f64,
}

const ON_BRANCH_TOL: f64 = 1e-9;

/// Validates that `(z, eta, theta)` satisfies the branch relation within
/// 1e-9: `f_+` for `theta = 0`, `f_-` for `theta = pi`. Points with `z = 0`
/// lie on the linear branches for every coupling.
fn check_on_branch(point: &BranchPoint, sigma: NonlinearityPower) -> Result<()> {
    if point.z == 0.0 {
        return Ok(());
    }
    let sign = match point.theta {
        Phase::Zero => BranchSign::Plus,
        Phase::Pi => BranchSign::Minus,
    };
    let f = two_level::branch_function(point.z, point.eta, sigma, sign)?;
    if f.abs() > ON_BRANCH_TOL {
        return Err(Error::OffBranch { z: point.z, eta: point.eta, residual: f.abs() });
    }
    Ok(())
}

fn near_eta_star(eta_abs: f64, sigma: NonlinearityPower) -> bool {
    let estar = two_level::eta_star(sigma);
    (eta_abs - estar).abs() <= 1e-12 * estar.max(1.0)
}

/// Hessian determinant of the reduced Hamiltonian at a stationary point.
///
/// Closed forms: `1 + eta s / 2^s` (symmetric), `1 - eta s / 2^s`
/// (antisymmetric) and `h(z) / ((1 - z^2) [(1+z)^s - (1-z)^s])` on the
/// asymmetric branches, where the determinant sign decides circle vs saddle.
pub fn det_hess(point: &BranchPoint, sigma: NonlinearityPower) -> Result<f64> {
    check_on_branch(point, sigma)?;
    let s = sigma.get();
    if point.z == 0.0 {
        let shift = point.eta * s * 2f64.powf(-s);
        return Ok(match point.theta {
            Phase::Zero => 1.0 + shift,
            Phase::Pi => 1.0 - shift,
        });
    }
    let z = point.z;
    let u = power_diff(z, s);
    Ok(two_level::h_and_q(z, sigma)?.0 / ((1.0 - z * z) * u))
}

/// Dynamical verdict from the determinant sign. The linear branches use the
/// closed inequalities (stable at the exact pitchfork); an asymmetric point
/// with vanishing determinant sits exactly at the saddle and stays open.
pub fn classify_dynamical(point: &BranchPoint, sigma: NonlinearityPower) -> Result<Stability> {
    let det = det_hess(point, sigma)?;
    if point.z == 0.0 {
        return Ok(if det >= 0.0 { Stability::Stable } else { Stability::Unstable });
    }
    Ok(if det > 0.0 {
        Stability::Stable
    } else if det < 0.0 {
        Stability::Unstable
    } else {
        Stability::Undetermined
    })
}

/// The polynomial `q(y) = -1 + y^{2s+1} + (1+2s) y^s - (1+2s) y^{s+1}`
/// controlling the asymmetric `L+` count; nonpositive on `[0, 1]`.
pub fn lemma_q(y: f64, sigma: NonlinearityPower) -> f64 {
    let s = sigma.get();
    -1.0 + y.powf(2.0 * s + 1.0) + (1.0 + 2.0 * s) * (y.powf(s) - y.powf(s + 1.0))
}

/// Reduced energy and occupations in the attractive convention.
fn attractive_pieces(z: f64, eta_abs: f64, s: f64) -> (f64, f64, f64, f64) {
    let w = (1.0 - z * z).sqrt();
    let p2s = ((1.0 + z) / 2.0).powf(s);
    let q2s = ((1.0 - z) / 2.0).powf(s);
    let interaction = 2f64.powf(-(s + 1.0)) * power_sum(z, s + 1.0);
    let e = -w - eta_abs * interaction;
    (e, p2s, q2s, w)
}

fn reduced_eigenvalues(alpha: f64, beta: f64) -> (f64, f64) {
    let disc = ((alpha - beta) * (alpha - beta) + 4.0).sqrt();
    (0.5 * (-(alpha + beta) - disc), 0.5 * (-(alpha + beta) + disc))
}

/// Negative-eigenvalue count of `L+` in the two-level limit, with the
/// reduced matrix entries and its eigenvalues for diagnostics.
///
/// Symmetric branch: two negatives for `|eta| > eta_star`, one below it,
/// undetermined exactly at the pitchfork. Asymmetric branches: always one.
pub fn l_plus_negative_count(
    point: &BranchPoint,
    sigma: NonlinearityPower,
) -> Result<LPlusReduced> {
    check_on_branch(point, sigma)?;
    let s = sigma.get();
    let eta_abs = point.eta.abs();
    if point.z == 0.0 && point.theta == Phase::Pi {
        return Err(Error::UnsupportedBranch(
            "L+ count is classified for the symmetric and asymmetric branches only",
        ));
    }
    if point.z == 0.0 && near_eta_star(eta_abs, sigma) {
        return Err(Error::UndeterminedBoundary(format!(
            "|eta| = eta_star = {} exactly",
            two_level::eta_star(sigma)
        )));
    }
    let (e, p2s, q2s, _) = attractive_pieces(point.z, eta_abs, s);
    let alpha = e + (2.0 * s + 1.0) * eta_abs * p2s;
    let beta = e + (2.0 * s + 1.0) * eta_abs * q2s;
    let (mu1, mu2) = reduced_eigenvalues(alpha, beta);
    let negative_count = [mu1, mu2].iter().filter(|&&m| m < 0.0).count();
    Ok(LPlusReduced { negative_count, alpha, beta, mu1, mu2 })
}

/// Reduced 2x2 data for `L-`: entries `alpha' = E + |eta| p^{2s}`,
/// `beta' = E + |eta| q^{2s}` and its eigenvalues. On-branch the product
/// `alpha' beta'` is 1, so `mu1 = 0` (phase zero mode) and `mu2 > 0`.
pub fn l_minus_reduced(point: &BranchPoint, sigma: NonlinearityPower) -> Result<LMinusReduced> {
    check_on_branch(point, sigma)?;
    if point.z == 0.0 && point.theta == Phase::Pi {
        return Err(Error::UnsupportedBranch(
            "L- reduction is computed for the symmetric and asymmetric branches only",
        ));
    }
    let s = sigma.get();
    let eta_abs = point.eta.abs();
    let (e, p2s, q2s, _) = attractive_pieces(point.z, eta_abs, s);
    let alpha_p = e + eta_abs * p2s;
    let beta_p = e + eta_abs * q2s;
    let (mu1, mu2) = reduced_eigenvalues(alpha_p, beta_p);
    if mu1.abs() > 1e-9 {
        return Err(Error::OracleInconsistency(format!(
            "L- zero mode violated: mu1 = {mu1:.3e} on-branch"
        )));
    }
    if mu2 <= 0.0 {
        return Err(Error::OracleInconsistency(format!(
            "L- second eigenvalue must be positive, got {mu2:.3e}"
        )));
    }
    Ok(LMinusReduced { alpha_p, beta_p, mu1, mu2 })
}

/// Sign of `dF/d lambda` along the branch through `point`; minus the sign of
/// `dE/d eta`. Requires the attractive case.
pub fn slope_sign(point: &BranchPoint, sigma: NonlinearityPower) -> Result<SlopeSign> {
    if point.eta >= 0.0 {
        return Err(Error::RequiresAttractive("slope_sign", point.eta));
    }
    check_on_branch(point, sigma)?;
    if point.z == 0.0 {
        // dE/d eta = 2^{-s} > 0 on both linear branches
        return Ok(SlopeSign::Negative);
    }
    let s = sigma.get();
    let h = two_level::h_and_q(point.z, sigma)?.0;
    let h_scale = (1.0 + point.z.abs()).powf(s) * (s + 2.0);
    if h.abs() <= 1e-9 * h_scale {
        // exactly the saddle: dE/d eta diverges, the slope is formally zero
        return Ok(SlopeSign::Zero);
    }
    let de = two_level::de_deta(point.z, sigma)?;
    Ok(if de > 0.0 { SlopeSign::Negative } else { SlopeSign::Positive })
}

/// Assembles the orbital-stability report for an attractive-side point.
///
/// The verdict follows the standard case analysis: one `L+` negative with
/// negative slope is stable, one with positive slope is unstable, two
/// negatives are unstable. Exactly at a critical coupling the verdict is
/// refused rather than guessed.
pub fn orbital_verdict(point: &BranchPoint, sigma: NonlinearityPower) -> Result<StabilityReport> {
    if point.eta >= 0.0 {
        return Err(Error::RequiresAttractive("orbital_verdict", point.eta));
    }
    if point.label == BranchLabel::Antisymmetric {
        return Err(Error::UnsupportedBranch(
            "orbital classification covers the symmetric and asymmetric branches",
        ));
    }
    check_on_branch(point, sigma)?;
    let eta_abs = point.eta.abs();
    if near_eta_star(eta_abs, sigma) {
        return Err(Error::UndeterminedBoundary(format!(
            "|eta| = eta_star = {}",
            two_level::eta_star(sigma)
        )));
    }
    if let Some(sn) = two_level::find_saddle(sigma) {
        if (eta_abs - sn.eta_plus).abs() <= 1e-12 * sn.eta_plus.max(1.0) {
            return Err(Error::UndeterminedBoundary(format!(
                "|eta| = eta_plus = {}",
                sn.eta_plus
            )));
        }
    }
    let det = det_hess(point, sigma)?;
    let lp = l_plus_negative_count(point, sigma)?;
    let lm = l_minus_reduced(point, sigma)?;
    let slope = slope_sign(point, sigma)?;
    let verdict = match (lp.negative_count, slope) {
        (1, SlopeSign::Negative) => Stability::Stable,
        (1, SlopeSign::Positive) => Stability::Unstable,
        (n, _) if n >= 2 => Stability::Unstable,
        (_, SlopeSign::Zero) => {
            return Err(Error::UndeterminedBoundary("slope is zero at the saddle".into()))
        }
        _ => Stability::Undetermined,
    };
    Ok(StabilityReport {
        det_hess: det,
        l_plus_negative_count: lp.negative_count,
        l_minus_nonnegative: lm.mu1 >= -1e-9 && lm.mu2 > 0.0,
        slope_sign: slope,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_level::{
        asymmetric_points, eta_of_z, find_saddle, BranchPoint, NonlinearityPower,
    };
    use approx::assert_relative_eq;

    fn sig(s: f64) -> NonlinearityPower {
        NonlinearityPower::new(s).unwrap()
    }

    fn asym_point(z: f64, s: f64, attractive: bool) -> BranchPoint {
        let sigma = sig(s);
        let eta_abs = eta_of_z(z, sigma).unwrap();
        let eta = if attractive { -eta_abs } else { eta_abs };
        let label = match find_saddle(sigma) {
            None => BranchLabel::Asym,
            Some(sn) => {
                if z > sn.z_plus {
                    BranchLabel::Asym1
                } else {
                    BranchLabel::Asym2
                }
            }
        };
        BranchPoint::asymmetric(z, eta, sigma, label).unwrap()
    }

    #[test]
    fn det_hess_closed_forms() {
        let sym = BranchPoint::symmetric(-1.0, sig(1.0));
        assert_relative_eq!(det_hess(&sym, sig(1.0)).unwrap(), 0.5, epsilon = 1e-14);
        let anti = BranchPoint::antisymmetric(3.0, sig(1.0));
        assert_relative_eq!(det_hess(&anti, sig(1.0)).unwrap(), -0.5, epsilon = 1e-14);
    }

    #[test]
    fn det_hess_asymmetric_positive_below_threshold() {
        for &z in &[0.1, 0.4, 0.8, 0.95] {
            let p = asym_point(z, 1.0, true);
            assert!(det_hess(&p, sig(1.0)).unwrap() > 0.0);
        }
    }

    #[test]
    fn det_hess_rejects_off_branch() {
        let mut p = asym_point(0.5, 1.0, true);
        p.eta += 0.5;
        assert!(matches!(det_hess(&p, sig(1.0)), Err(Error::OffBranch { .. })));
    }

    #[test]
    fn det_hess_sign_change_at_saddle() {
        let sigma = sig(5.0);
        let sn = find_saddle(sigma).unwrap();
        let inner = asym_point(sn.z_plus - 0.05, 5.0, true);
        let outer = asym_point(sn.z_plus + 0.05, 5.0, true);
        assert!(det_hess(&inner, sigma).unwrap() < 0.0);
        assert!(det_hess(&outer, sigma).unwrap() > 0.0);
    }

    #[test]
    fn classify_dynamical_theorem_statements() {
        // antisymmetric stable up to eta_star (closed)
        let anti = BranchPoint::antisymmetric(1.9, sig(2.0));
        assert_eq!(classify_dynamical(&anti, sig(2.0)).unwrap(), Stability::Stable);
        let anti_beyond = BranchPoint::antisymmetric(2.1, sig(2.0));
        assert_eq!(classify_dynamical(&anti_beyond, sig(2.0)).unwrap(), Stability::Unstable);
        // symmetric stable at the closed boundary eta = -eta_star
        let sym_boundary = BranchPoint::symmetric(-2.0, sig(1.0));
        assert_eq!(classify_dynamical(&sym_boundary, sig(1.0)).unwrap(), Stability::Stable);
        // as2 unstable, as1 stable at sigma = 5
        let pts = asymmetric_points(-5.0, sig(5.0)).unwrap();
        for p in pts {
            let want = match p.label {
                BranchLabel::Asym1 => Stability::Stable,
                BranchLabel::Asym2 => Stability::Unstable,
                _ => unreachable!(),
            };
            assert_eq!(classify_dynamical(&p, sig(5.0)).unwrap(), want);
        }
        // as1 beyond eta_star
        let pts = asymmetric_points(-7.0, sig(5.0)).unwrap();
        assert!(!pts.is_empty());
        for p in pts {
            assert_eq!(p.label, BranchLabel::Asym1);
            assert_eq!(classify_dynamical(&p, sig(5.0)).unwrap(), Stability::Stable);
        }
    }

    #[test]
    fn l_plus_counts_on_symmetric_branch() {
        let s1 = sig(1.0);
        let lp = l_plus_negative_count(&BranchPoint::symmetric(-3.0, s1), s1).unwrap();
        assert_eq!(lp.negative_count, 2);
        let lp = l_plus_negative_count(&BranchPoint::symmetric(-1.0, s1), s1).unwrap();
        assert_eq!(lp.negative_count, 1);
        // exact pitchfork refuses to answer
        assert!(matches!(
            l_plus_negative_count(&BranchPoint::symmetric(-2.0, s1), s1),
            Err(Error::UndeterminedBoundary(_))
        ));
    }

    #[test]
    fn l_plus_asymmetric_always_one() {
        let sigma = sig(5.0);
        let p = asym_point(0.9, 5.0, true);
        let lp = l_plus_negative_count(&p, sigma).unwrap();
        assert_eq!(lp.negative_count, 1);
        // the Lemma polynomial at the mapped variable is nonpositive
        let y = (1.0 - 0.9) / (1.0 + 0.9);
        assert!(lemma_q(y, sigma) <= 0.0);
        // eigenvalues are real and distinct
        assert!(lp.mu1 < lp.mu2);
    }

    #[test]
    fn lemma_q_nonpositive_on_unit_interval() {
        for &s in &[0.5, 1.0, 2.0, 3.5, 5.0, 8.0] {
            let sigma = sig(s);
            for i in 0..=1000 {
                let y = i as f64 / 1000.0;
                let q = lemma_q(y, sigma);
                assert!(q <= 1e-12, "q({y}) = {q} at sigma = {s}");
                if (y - 1.0).abs() > 1e-3 {
                    assert!(q < 0.0, "equality only at y = 1 (y = {y}, sigma = {s})");
                }
            }
        }
    }

    #[test]
    fn l_minus_reduced_symmetric_zero_and_two() {
        for &(s, eta) in &[(1.0, -1.5), (2.0, -0.3), (4.0, -5.0)] {
            let sigma = sig(s);
            let lm = l_minus_reduced(&BranchPoint::symmetric(eta, sigma), sigma).unwrap();
            assert_relative_eq!(lm.alpha_p, -1.0, epsilon = 1e-12);
            assert_relative_eq!(lm.beta_p, -1.0, epsilon = 1e-12);
            assert!(lm.mu1.abs() < 1e-12);
            assert_relative_eq!(lm.mu2, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn l_minus_reduced_asymmetric_identities() {
        let sigma = sig(2.0);
        let p = asym_point(0.6, 2.0, true);
        let lm = l_minus_reduced(&p, sigma).unwrap();
        assert_relative_eq!(lm.alpha_p * lm.beta_p, 1.0, epsilon = 1e-9);
        assert_relative_eq!(lm.alpha_p + lm.beta_p, -2.0 / (1.0f64 - 0.36).sqrt(), epsilon = 1e-9);
        assert!(lm.mu1.abs() < 1e-9);
        assert!(lm.mu2 > 0.0);
    }

    #[test]
    fn l_minus_asymmetric_z_to_zero_limit() {
        let sigma = sig(3.0);
        let p = asym_point(1e-5, 3.0, true);
        let lm = l_minus_reduced(&p, sigma).unwrap();
        assert_relative_eq!(lm.alpha_p, -1.0, epsilon = 1e-4);
        assert_relative_eq!(lm.beta_p, -1.0, epsilon = 1e-4);
    }

    #[test]
    fn slope_signs_by_branch() {
        let s1 = sig(1.0);
        assert_eq!(slope_sign(&BranchPoint::symmetric(-1.0, s1), s1).unwrap(), SlopeSign::Negative);
        // as2 has positive slope
        let sigma = sig(5.0);
        let pts = asymmetric_points(-5.0, sigma).unwrap();
        for p in &pts {
            let want = match p.label {
                BranchLabel::Asym1 => SlopeSign::Negative,
                BranchLabel::Asym2 => SlopeSign::Positive,
                _ => unreachable!(),
            };
            assert_eq!(slope_sign(p, sigma).unwrap(), want, "label {:?}", p.label);
        }
        // exactly at the saddle the slope is zero
        let sn = find_saddle(sigma).unwrap();
        let p = BranchPoint::asymmetric(sn.z_plus, -sn.eta_plus, sigma, BranchLabel::Asym1).unwrap();
        assert_eq!(slope_sign(&p, sigma).unwrap(), SlopeSign::Zero);
        // repulsive side is rejected
        assert!(matches!(
            slope_sign(&BranchPoint::symmetric(1.0, s1), s1),
            Err(Error::RequiresAttractive(..))
        ));
    }

    #[test]
    fn orbital_verdicts_match_theorem() {
        let s1 = sig(1.0);
        let r = orbital_verdict(&BranchPoint::symmetric(-2.5, s1), s1).unwrap();
        assert_eq!(r.verdict, Stability::Unstable);
        assert_eq!(r.l_plus_negative_count, 2);
        let r = orbital_verdict(&BranchPoint::symmetric(-1.0, s1), s1).unwrap();
        assert_eq!(r.verdict, Stability::Stable);

        let s2 = sig(2.0);
        let pts = asymmetric_points(-2.5, s2).unwrap();
        assert!(!pts.is_empty());
        for p in pts {
            let r = orbital_verdict(&p, s2).unwrap();
            assert_eq!(r.verdict, Stability::Stable);
            assert!(r.l_minus_nonnegative);
        }

        let s5 = sig(5.0);
        for p in asymmetric_points(-5.0, s5).unwrap() {
            let r = orbital_verdict(&p, s5).unwrap();
            match p.label {
                BranchLabel::Asym1 => assert_eq!(r.verdict, Stability::Stable),
                BranchLabel::Asym2 => {
                    assert_eq!(r.verdict, Stability::Unstable);
                    assert_eq!(r.slope_sign, SlopeSign::Positive);
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn orbital_verdict_boundary_refusals() {
        let s1 = sig(1.0);
        assert!(matches!(
            orbital_verdict(&BranchPoint::symmetric(-2.0, s1), s1),
            Err(Error::UndeterminedBoundary(_))
        ));
        assert!(matches!(
            orbital_verdict(&BranchPoint::antisymmetric(-1.0, s1), s1),
            Err(Error::UnsupportedBranch(_))
        ));
        assert!(matches!(
            orbital_verdict(&BranchPoint::symmetric(1.0, s1), s1),
            Err(Error::RequiresAttractive(..))
        ));
    }

    #[test]
    fn dynamical_and_orbital_agree_on_attractive_side() {
        // Theorem 2 vs Theorem 3 coincide for eta < 0 away from criticals
        for &s in &[1.0, 2.0, 3.0, 4.0, 5.0, 7.0] {
            let sigma = sig(s);
            for i in 0..30 {
                let eta = -0.2 - 0.3 * i as f64;
                let mut points = vec![BranchPoint::symmetric(eta, sigma)];
                points.extend(asymmetric_points(eta, sigma).unwrap());
                for p in points {
                    match orbital_verdict(&p, sigma) {
                        Ok(r) => {
                            let dynamical = classify_dynamical(&p, sigma).unwrap();
                            assert_eq!(r.verdict, dynamical, "p = {p:?} sigma = {s}");
                        }
                        Err(Error::UndeterminedBoundary(_)) => {}
                        Err(e) => panic!("unexpected error {e}"),
                    }
                }
            }
        }
    }
}
