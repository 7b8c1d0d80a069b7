//! Pseudo-rigid-body model of a whisker pressed against a static point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PRBM_A: [f64; 5] = [2.654855, 0.509896e-1, 0.126749e-1, 0.142039e-2, 0.584525e-4];

/// Range of the force ratio `n` over which the fitted polynomials hold.
pub const N_VALID: (f64, f64) = (0.5, 10.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanicsError {
    #[error("contact depth {d} m is out of range for this whisker")]
    OutOfRange { d: f64 },
    #[error("force ratio n = {0} outside the model's validity window (0.5, 10)")]
    ValidityWindow(f64),
    #[error("normal-force projection is singular")]
    Singular,
    #[error("invalid whisker spec: {0}")]
    InvalidSpec(&'static str),
}

/// Whether evaluations outside `0.5 < n < 10` are rejected or extrapolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    Enforce,
    Extrapolate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WhiskerSpec {
    /// Whisker length, m.
    pub l_o: f64,
    pub diameter: f64,
    /// Flexural rigidity, N·m².
    pub ei: f64,
    /// Placement angle α relative to the yaw plane, rad.
    pub mount_angle: f64,
}

impl Default for WhiskerSpec {
    fn default() -> Self {
        let diameter = 4.0e-4;
        Self {
            l_o: 0.200,
            diameter,
            ei: nitinol_ei(diameter),
            mount_angle: 45f64.to_radians(),
        }
    }
}

impl WhiskerSpec {
    pub fn validate(&self) -> Result<(), MechanicsError> {
        if !(self.l_o > 0.0) {
            return Err(MechanicsError::InvalidSpec("l_o must be positive"));
        }
        if !(self.ei > 0.0) {
            return Err(MechanicsError::InvalidSpec("EI must be positive"));
        }
        if !(self.mount_angle > 0.0 && self.mount_angle < std::f64::consts::FRAC_PI_2) {
            return Err(MechanicsError::InvalidSpec("mount angle must be in (0, 90) degrees"));
        }
        Ok(())
    }

    /// Forward reach of the undeflected whisker in the yaw plane.
    pub fn reach(&self) -> f64 {
        self.l_o * self.mount_angle.cos()
    }
}

/// EI of a solid round nitinol wire (E = 65 GPa).
pub fn nitinol_ei(diameter: f64) -> f64 {
    const E_NITINOL: f64 = 6.5e10;
    E_NITINOL * std::f64::consts::PI * diameter.powi(4) / 64.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrbmResult {
    pub theta: f64,
    pub beta: f64,
    pub n: f64,
    pub gamma: f64,
    /// Torsion spring constant, N·m/rad.
    pub k: f64,
    /// Effective beam length l_r, m.
    pub l_r: f64,
    /// Vertical contact force, N.
    pub f: f64,
    /// Contact-normal force, N.
    pub n_force: f64,
}

/// Contact point in the sensor frame.
pub fn contact_point(d: f64, alpha: f64, l_o: f64) -> (f64, f64) {
    (l_o - d * alpha.cos(), d * alpha.sin())
}

/// Pseudo-rigid-body rotation angle θ.
pub fn prbm_theta(d: f64, alpha: f64, l_o: f64) -> Result<f64, MechanicsError> {
    let (px, py) = contact_point(d, alpha, l_o);
    if d < 0.0 || !(px > 0.0) || !d.is_finite() {
        return Err(MechanicsError::OutOfRange { d });
    }
    Ok((py / px).atan())
}

fn check_n(n: f64, validity: Validity) -> Result<(), MechanicsError> {
    if validity == Validity::Enforce && !(n > N_VALID.0 && n < N_VALID.1) {
        return Err(MechanicsError::ValidityWindow(n));
    }
    Ok(())
}

/// Characteristic radius factor γ(n).
pub fn prbm_gamma(n: f64, validity: Validity) -> Result<f64, MechanicsError> {
    check_n(n, validity)?;
    Ok(0.841655 - 0.0067807 * n + 0.000438 * n * n)
}

/// Torsion spring constant K.
pub fn prbm_spring(
    n: f64,
    gamma: f64,
    ei: f64,
    l_r: f64,
    validity: Validity,
) -> Result<f64, MechanicsError> {
    check_n(n, validity)?;
    let [a0, a1, a2, a3, a4] = PRBM_A;
    let poly = a0 - a1 * n + a2 * n.powi(2) - a3 * n.powi(3) + a4 * n.powi(4);
    Ok(gamma * ei * poly / l_r)
}

/// Full model evaluation at contact depth `d` and placement angle `alpha`.
pub fn solve_prbm(
    d: f64,
    alpha: f64,
    spec: &WhiskerSpec,
    validity: Validity,
) -> Result<PrbmResult, MechanicsError> {
    let theta = prbm_theta(d, alpha, spec.l_o)?;
    let beta = 1.5 * theta;
    let n = beta.tan();
    let gamma = prbm_gamma(n, validity)?;
    let (px, py) = contact_point(d, alpha, spec.l_o);
    let l_r = px.hypot(py) / gamma;
    let k = prbm_spring(n, gamma, spec.ei, l_r, validity)?;
    let f = k * theta / (gamma * l_r * (theta.cos() + n * theta.sin()));
    let proj = (beta + alpha).sin();
    if proj.abs() < 1e-9 {
        return Err(MechanicsError::Singular);
    }
    Ok(PrbmResult {
        theta,
        beta,
        n,
        gamma,
        k,
        l_r,
        f,
        n_force: f / proj,
    })
}

/// Contact-normal force N at depth `d` and placement angle `alpha`.
pub fn normal_force(
    d: f64,
    alpha: f64,
    spec: &WhiskerSpec,
    validity: Validity,
) -> Result<f64, MechanicsError> {
    solve_prbm(d, alpha, spec, validity).map(|r| r.n_force)
}

/// Bending moment at the whisker root, N·m: normal force times the
/// distance from the root to the contact point.
pub fn base_moment(d: f64, spec: &WhiskerSpec) -> Result<f64, MechanicsError> {
    if d <= 0.0 {
        return Ok(0.0);
    }
    let r = solve_prbm(d, spec.mount_angle, spec, Validity::Extrapolate)?;
    let (px, py) = contact_point(d, spec.mount_angle, spec.l_o);
    Ok(r.n_force * px.hypot(py))
}

/// One row of the placement-angle study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrbmGridRow {
    pub alpha_deg: f64,
    pub d_m: f64,
    pub n_force: f64,
    pub theta_rad: f64,
    pub n_ratio: f64,
}

/// Evaluates N over every `(alpha, d)` pair, alpha in degrees.
pub fn prbm_grid(
    alphas_deg: &[f64],
    depths: &[f64],
    spec: &WhiskerSpec,
    validity: Validity,
) -> Result<Vec<PrbmGridRow>, MechanicsError> {
    let mut rows = Vec::with_capacity(alphas_deg.len() * depths.len());
    for &d in depths {
        for &a in alphas_deg {
            let r = solve_prbm(d, a.to_radians(), spec, validity)?;
            rows.push(PrbmGridRow {
                alpha_deg: a,
                d_m: d,
                n_force: r.n_force,
                theta_rad: r.theta,
                n_ratio: r.n,
            });
        }
    }
    Ok(rows)
}
