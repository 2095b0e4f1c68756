//! Closed-form two-level reduction of the double-well stationary problem.
//!
//! In the two-mode limit a stationary state is a point `(z, theta)` with
//! imbalance `z = p^2 - q^2` and relative phase `theta` in `{0, pi}`. The
//! branch equation is
//!
//! ```text
//! f_pm(z, eta) = z +- eta * sqrt(1-z^2)/2 * [((1+z)/2)^s - ((1-z)/2)^s]
//! ```
//!
//! and nonzero solutions are organized by the inverse coupling
//! `eta(z) = 2z / (sqrt(1-z^2) [((1+z)/2)^s - ((1-z)/2)^s])`. The module
//! exposes the critical couplings (`eta_star`, the saddle pair
//! `(z_plus, eta_plus)`), the reduced energy surface, the odd auxiliary
//! functions `h` and `Q` that control branch counting and norm slopes, and
//! assembly of the full bifurcation diagram over an `eta` grid.

use crate::error::{Error, Result};
use crate::numeric::{bisect, newton_polish, power_diff, power_sum};
use serde::Serialize;

/// Nonlinearity exponent `s > 0` of the `|psi|^{2s}` term.
///
/// In one spatial dimension there is no upper bound; the grid layer is the
/// only consumer of the dimension-dependent restriction and it is built for
/// d = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearityPower(f64);

impl NonlinearityPower {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "nonlinearity power must be positive and finite, got {sigma}"
            )));
        }
        Ok(NonlinearityPower(sigma))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for NonlinearityPower {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        NonlinearityPower::new(v)
    }
}

/// Selects `f_+` or `f_-` in [`branch_function`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSign {
    Plus,
    Minus,
}

/// Relative phase of a stationary point, exactly `0` or `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Zero,
    Pi,
}

impl Phase {
    /// `cos(theta)`: +1 or -1, exactly.
    #[inline]
    pub fn cos(self) -> f64 {
        match self {
            Phase::Zero => 1.0,
            Phase::Pi => -1.0,
        }
    }

    pub fn radians(self) -> f64 {
        match self {
            Phase::Zero => 0.0,
            Phase::Pi => std::f64::consts::PI,
        }
    }
}

/// Branch labels of the stationary solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchLabel {
    Symmetric,
    Antisymmetric,
    /// Asymmetric branch below the threshold power (supercritical pitchfork).
    Asym,
    /// Outer asymmetric branch (`|z| > z_plus`) above the threshold power.
    Asym1,
    /// Inner asymmetric branch (`|z| < z_plus`) above the threshold power.
    Asym2,
}

impl BranchLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchLabel::Symmetric => "symmetric",
            BranchLabel::Antisymmetric => "antisymmetric",
            BranchLabel::Asym => "asym",
            BranchLabel::Asym1 => "asym1",
            BranchLabel::Asym2 => "asym2",
        }
    }
}

/// Stability flag carried by diagram points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
    /// Exactly at a critical coupling the classification is left open.
    Undetermined,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Undetermined => "undetermined",
        }
    }
}

/// One stationary solution of the reduced problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub z: f64,
    pub theta: Phase,
    pub eta: f64,
    pub energy: f64,
    pub label: BranchLabel,
    pub stability: Stability,
}

impl BranchPoint {
    /// Symmetric point `(z, theta) = (0, 0)` at coupling `eta`.
    pub fn symmetric(eta: f64, sigma: NonlinearityPower) -> Self {
        BranchPoint {
            z: 0.0,
            theta: Phase::Zero,
            eta,
            energy: -1.0 + eta * 2f64.powf(-sigma.get()),
            label: BranchLabel::Symmetric,
            stability: Stability::Undetermined,
        }
    }

    /// Antisymmetric point `(z, theta) = (0, pi)` at coupling `eta`.
    pub fn antisymmetric(eta: f64, sigma: NonlinearityPower) -> Self {
        BranchPoint {
            z: 0.0,
            theta: Phase::Pi,
            eta,
            energy: 1.0 + eta * 2f64.powf(-sigma.get()),
            label: BranchLabel::Antisymmetric,
            stability: Stability::Undetermined,
        }
    }

    /// Asymmetric point with imbalance `z != 0` on the branch that exists at
    /// coupling `eta(|z|) * sign`, with the phase convention `theta = 0` for
    /// attractive (`eta < 0`) and `theta = pi` for repulsive coupling.
    pub fn asymmetric(z: f64, eta: f64, sigma: NonlinearityPower, label: BranchLabel) -> Result<Self> {
        let theta = if eta < 0.0 { Phase::Zero } else { Phase::Pi };
        Ok(BranchPoint {
            z,
            theta,
            eta,
            energy: energy(z, eta, sigma, theta)?,
            label,
            stability: Stability::Undetermined,
        })
    }
}

fn check_z(z: f64) -> Result<()> {
    if !(z.abs() <= 1.0) {
        return Err(Error::domain(format!("imbalance must satisfy |z| <= 1, got {z}")));
    }
    Ok(())
}

/// Bracketed power difference `((1+z)/2)^s - ((1-z)/2)^s`.
fn bracket(z: f64, s: f64) -> f64 {
    2f64.powf(-s) * power_diff(z, s)
}

/// Reduced branch equation `f_pm(z, eta)`.
///
/// Continuous on the closed interval: at `|z| = 1` the square-root factor
/// kills the coupling term and the value is just `z`.
pub fn branch_function(z: f64, eta: f64, sigma: NonlinearityPower, sign: BranchSign) -> Result<f64> {
    check_z(z)?;
    let s = sigma.get();
    let coupling = eta * 0.5 * (1.0 - z * z).sqrt() * bracket(z, s);
    Ok(match sign {
        BranchSign::Plus => z + coupling,
        BranchSign::Minus => z - coupling,
    })
}

/// Coupling `eta(z)` at which the imbalance `z in (0, 1)` solves
/// `f_-(z, eta) = 0`. Diverges as `z -> 1` and tends to `eta_star` as
/// `z -> 0`.
pub fn eta_of_z(z: f64, sigma: NonlinearityPower) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain(format!(
            "eta_of_z needs 0 < z < 1, got {z} (limits: eta_star at 0, divergence at 1)"
        )));
    }
    let s = sigma.get();
    Ok(2.0 * z / ((1.0 - z * z).sqrt() * bracket(z, s)))
}

/// Pitchfork coupling `eta_star = 2^s / s`.
pub fn eta_star(sigma: NonlinearityPower) -> f64 {
    let s = sigma.get();
    2f64.powf(s) / s
}

/// Universal threshold power `(3 + sqrt(13)) / 2` separating supercritical
/// from subcritical pitchforks.
pub fn sigma_threshold() -> f64 {
    0.5 * (3.0 + 13f64.sqrt())
}

/// `lim_{z->0+} eta''(z) = -2^s (s^2 - 3s - 1) / (3s)`; its sign classifies
/// the pitchfork type.
pub fn eta_second_limit(sigma: NonlinearityPower) -> f64 {
    let s = sigma.get();
    -2f64.powf(s) * (s * s - 3.0 * s - 1.0) / (3.0 * s)
}

/// Pitchfork type at a given nonlinearity power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BifurcationType {
    Supercritical,
    Subcritical,
    Degenerate,
}

pub fn bifurcation_type(sigma: NonlinearityPower) -> BifurcationType {
    let d = eta_second_limit(sigma);
    if d > 0.0 {
        BifurcationType::Supercritical
    } else if d < 0.0 {
        BifurcationType::Subcritical
    } else {
        BifurcationType::Degenerate
    }
}

/// `g(z) = (s z^2 - s z + 1)(1+z)^s`, the half of `h`.
fn g_fun(z: f64, s: f64) -> f64 {
    (s * z * z - s * z + 1.0) * (1.0 + z).powf(s)
}

fn g_prime(z: f64, s: f64) -> f64 {
    (2.0 * s * z - s) * (1.0 + z).powf(s) + s * (s * z * z - s * z + 1.0) * (1.0 + z).powf(s - 1.0)
}

/// Odd function `h(z) = g(z) - g(-z)` whose nonzero roots are the saddle
/// imbalances, together with `Q(z)`, the odd numerator of the energy slope.
pub fn h_and_q(z: f64, sigma: NonlinearityPower) -> Result<(f64, f64)> {
    check_z(z)?;
    let s = sigma.get();
    Ok((h_fun(z, s), q_fun(z, s)))
}

pub(crate) fn h_fun(z: f64, s: f64) -> f64 {
    g_fun(z, s) - g_fun(-z, s)
}

pub(crate) fn h_prime(z: f64, s: f64) -> f64 {
    g_prime(z, s) + g_prime(-z, s)
}

pub(crate) fn q_fun(z: f64, s: f64) -> f64 {
    -(4.0 * s + 2.0) * z * (1.0 - z * z).powf(s) + power_diff(z, 2.0 * s + 1.0)
}

/// Analytic `eta'(z)`, by direct differentiation of the closed form:
/// `eta' = 2^{s+1} [u - z (1-z^2) u'] / ((1-z^2)^{3/2} u^2)` with
/// `u = (1+z)^s - (1-z)^s`. The numerator equals `h(z)` identically, which
/// the tests cross-check.
pub fn eta_prime(z: f64, sigma: NonlinearityPower) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain(format!("eta_prime needs 0 < z < 1, got {z}")));
    }
    let s = sigma.get();
    let u = power_diff(z, s);
    let num = eta_prime_numerator(z, s);
    Ok(2f64.powf(s + 1.0) * num / ((1.0 - z * z).powf(1.5) * u * u))
}

/// `u - z (1-z^2) u'`, the hand-differentiated numerator of `eta'`.
fn eta_prime_numerator(z: f64, s: f64) -> f64 {
    let u = power_diff(z, s);
    let up = s * power_sum(z, s - 1.0);
    u - z * (1.0 - z * z) * up
}

/// Saddle-node data for `sigma > sigma_threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleNode {
    /// Nonzero root of `eta'(z) = 0` in `(0, 1)`.
    pub z_plus: f64,
    /// Coupling `eta(z_plus)` at which the asymmetric pairs are born.
    pub eta_plus: f64,
}

/// Locates the saddle imbalance `z_plus in (0, 1)` solving `eta'(z) = 0`.
///
/// Returns `None` for `sigma <= sigma_threshold`, where `z = 0` is the only
/// critical point of `eta`. The root is bracketed on the hand-differentiated
/// numerator of `eta'` and polished with Newton steps on `h`.
pub fn find_saddle(sigma: NonlinearityPower) -> Option<SaddleNode> {
    let s = sigma.get();
    if s <= sigma_threshold() {
        return None;
    }
    // Left endpoint: the numerator is O(z^3) near zero, so walk right from
    // 1e-6 until it clears the cancellation noise of the power difference.
    let noise = |z: f64| 64.0 * f64::EPSILON * (s + 2.0) * (1.0 + z).powf(s);
    let mut z_lo = 1e-6;
    while z_lo < 0.5 && eta_prime_numerator(z_lo, s).abs() < noise(z_lo) {
        z_lo *= 2.0;
    }
    if eta_prime_numerator(z_lo, s) >= 0.0 {
        return None; // numerically indistinguishable from the threshold case
    }
    let z_hi = 1.0 - 1e-9;
    let root = bisect(|z| eta_prime_numerator(z, s), z_lo, z_hi, 1e-12)?;
    let z_plus = newton_polish(|z| h_fun(z, s), |z| h_prime(z, s), root, z_lo, z_hi, 6);
    let eta_plus = eta_of_z(z_plus, sigma).ok()?;
    Some(SaddleNode { z_plus, eta_plus })
}

/// Reduced level `E` of a stationary point.
pub fn energy(z: f64, eta: f64, sigma: NonlinearityPower, theta: Phase) -> Result<f64> {
    check_z(z)?;
    let s = sigma.get();
    let interaction = eta * 2f64.powf(-(s + 1.0)) * power_sum(z, s + 1.0);
    Ok(-theta.cos() * (1.0 - z * z).sqrt() + interaction)
}

/// Slope `dE/d eta` along a branch: `2^{-s}` on the symmetric and
/// antisymmetric branches, `Q(z) / (2^{s+1} h(z))` on the asymmetric ones.
/// Even in `z`; singular exactly at the saddle where `h` vanishes.
pub fn de_deta(z: f64, sigma: NonlinearityPower) -> Result<f64> {
    check_z(z)?;
    let s = sigma.get();
    if z == 0.0 {
        return Ok(2f64.powf(-s));
    }
    let h = h_fun(z, s);
    if h == 0.0 {
        return Err(Error::SaddleSingular);
    }
    Ok(q_fun(z, s) / (2f64.powf(s + 1.0) * h))
}

/// Inverts `eta(z) = target` on `(z_lo, z_hi)` where `eta` is strictly
/// monotone; `increasing` selects the expected orientation.
fn invert_eta(
    target: f64,
    sigma: NonlinearityPower,
    z_lo: f64,
    z_hi: f64,
    increasing: bool,
) -> Option<f64> {
    let f = |z: f64| eta_of_z(z, sigma).map(|e| e - target).unwrap_or(f64::NAN);
    let (a, b) = (z_lo.max(1e-12), z_hi.min(1.0 - 1e-15));
    let fa = f(a);
    let fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return None;
    }
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let root = bisect(f, a, b, 1e-14)?;
    // polish on f with analytic eta'
    let polished = newton_polish(
        f,
        |z| eta_prime(z, sigma).unwrap_or(f64::NAN),
        root,
        a,
        b,
        4,
    );
    let _ = increasing;
    Some(polished)
}

/// All asymmetric stationary points at coupling `eta` (possibly empty).
/// Points come in `+-z` pairs; labels follow the saddle split above the
/// threshold power.
pub fn asymmetric_points(eta: f64, sigma: NonlinearityPower) -> Result<Vec<BranchPoint>> {
    let mut out = Vec::new();
    let ea = eta.abs();
    if ea == 0.0 {
        return Ok(out);
    }
    let estar = eta_star(sigma);
    let saddle = find_saddle(sigma);
    let tol = 1e-12 * estar.max(1.0);
    match saddle {
        None => {
            // supercritical: a single pair exists for |eta| > eta_star
            if ea > estar + tol {
                if let Some(z) = invert_eta(ea, sigma, 1e-12, 1.0 - 1e-15, true) {
                    push_pair(&mut out, z, eta, sigma, BranchLabel::Asym)?;
                }
            }
        }
        Some(sn) => {
            if (ea - sn.eta_plus).abs() <= tol {
                // exactly at the fold: one degenerate pair at z_plus
                push_pair(&mut out, sn.z_plus, eta, sigma, BranchLabel::Asym1)?;
            } else if ea > sn.eta_plus {
                // outer branch always exists beyond the fold
                if let Some(z) = invert_eta(ea, sigma, sn.z_plus, 1.0 - 1e-15, true) {
                    push_pair(&mut out, z, eta, sigma, BranchLabel::Asym1)?;
                }
                // inner branch only up to the pitchfork at eta_star
                if ea < estar - tol {
                    if let Some(z) = invert_eta(ea, sigma, 1e-12, sn.z_plus, false) {
                        push_pair(&mut out, z, eta, sigma, BranchLabel::Asym2)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn push_pair(
    out: &mut Vec<BranchPoint>,
    z: f64,
    eta: f64,
    sigma: NonlinearityPower,
    label: BranchLabel,
) -> Result<()> {
    out.push(BranchPoint::asymmetric(-z, eta, sigma, label)?);
    out.push(BranchPoint::asymmetric(z, eta, sigma, label)?);
    Ok(())
}

/// Critical-coupling record attached to a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalCouplings {
    pub eta_star: f64,
    pub eta_plus: Option<f64>,
    pub z_plus: Option<f64>,
    pub sigma_threshold: f64,
}

/// One labelled branch of the diagram; points are sorted by `eta` then `z`.
#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub label: BranchLabel,
    pub points: Vec<BranchPoint>,
}

/// Bifurcation diagram over an `eta` grid.
#[derive(Debug, Clone, Serialize)]
pub struct BifurcationDiagram {
    pub sigma: NonlinearityPower,
    pub eta_grid: Vec<f64>,
    pub branches: Vec<Branch>,
    pub critical: CriticalCouplings,
}

impl BifurcationDiagram {
    /// All points at the grid coupling nearest to `eta`.
    pub fn points_at(&self, eta: f64) -> Vec<&BranchPoint> {
        let nearest = self
            .eta_grid
            .iter()
            .copied()
            .min_by(|a, b| (a - eta).abs().partial_cmp(&(b - eta).abs()).unwrap())
            .unwrap_or(eta);
        self.branches
            .iter()
            .flat_map(|b| b.points.iter())
            .filter(|p| p.eta == nearest)
            .collect()
    }

    /// Flat, deterministic listing: sorted by `eta`, then `z`, then label.
    pub fn sorted_points(&self) -> Vec<&BranchPoint> {
        let mut pts: Vec<&BranchPoint> = self.branches.iter().flat_map(|b| b.points.iter()).collect();
        pts.sort_by(|a, b| {
            a.eta
                .partial_cmp(&b.eta)
                .unwrap()
                .then(a.z.partial_cmp(&b.z).unwrap())
                .then(a.label.as_str().cmp(b.label.as_str()))
        });
        pts
    }
}

/// Builds the stationary-state diagram on a uniform `eta` grid.
///
/// Every grid coupling carries the symmetric and antisymmetric points;
/// asymmetric pairs are found by inverting `eta(z)` on the monotone pieces.
/// Stability flags are filled by the reduced Hessian classification, with
/// points at the exact critical couplings left undetermined.
pub fn build_diagram(
    sigma: NonlinearityPower,
    eta_min: f64,
    eta_max: f64,
    n_eta: usize,
) -> Result<BifurcationDiagram> {
    if n_eta < 2 {
        return Err(Error::domain("diagram needs at least two eta grid points".to_string()));
    }
    if !(eta_max > eta_min) {
        return Err(Error::domain(format!(
            "empty eta range: [{eta_min}, {eta_max}]"
        )));
    }
    let saddle = find_saddle(sigma);
    let critical = CriticalCouplings {
        eta_star: eta_star(sigma),
        eta_plus: saddle.map(|s| s.eta_plus),
        z_plus: saddle.map(|s| s.z_plus),
        sigma_threshold: sigma_threshold(),
    };

    let mut grid = Vec::with_capacity(n_eta);
    let step = (eta_max - eta_min) / (n_eta - 1) as f64;
    for i in 0..n_eta {
        grid.push(eta_min + i as f64 * step);
    }

    let mut branches: Vec<Branch> = [
        BranchLabel::Symmetric,
        BranchLabel::Antisymmetric,
        BranchLabel::Asym,
        BranchLabel::Asym1,
        BranchLabel::Asym2,
    ]
    .iter()
    .map(|&label| Branch { label, points: Vec::new() })
    .collect();

    for &eta in &grid {
        let mut s_pt = BranchPoint::symmetric(eta, sigma);
        s_pt.stability = crate::stability::classify_dynamical(&s_pt, sigma)?;
        branches[0].points.push(s_pt);

        let mut a_pt = BranchPoint::antisymmetric(eta, sigma);
        a_pt.stability = crate::stability::classify_dynamical(&a_pt, sigma)?;
        branches[1].points.push(a_pt);

        for mut p in asymmetric_points(eta, sigma)? {
            p.stability = crate::stability::classify_dynamical(&p, sigma)?;
            let slot = match p.label {
                BranchLabel::Asym => 2,
                BranchLabel::Asym1 => 3,
                BranchLabel::Asym2 => 4,
                _ => unreachable!(),
            };
            branches[slot].points.push(p);
        }
    }

    for b in &mut branches {
        b.points.sort_by(|a, c| {
            a.eta
                .partial_cmp(&c.eta)
                .unwrap()
                .then(a.z.partial_cmp(&c.z).unwrap())
        });
    }
    branches.retain(|b| !b.points.is_empty());

    Ok(BifurcationDiagram { sigma, eta_grid: grid, branches, critical })
}
