//! Exponent algebra for the mass-subcritical problem.
//!
//! Everything here is pure arithmetic on the pair (N, p): the Strauss
//! exponent, the space-time exponent system
//!
//! ```text
//!   ρ  = 2(p²-1) / (4 - (N-2)(p-1)),      γ  = p + 1,
//!   ρ̃  = 2(p²-1) / (Np² - (N+2)p - 2),    γ̃  = p + 1,
//! ```
//!
//! the scaling weight δ(r) = N(1/2 - 1/r), Strichartz admissibility, and a
//! window report checking that (N, p) sits strictly inside
//! (p_St, 1 + 4/N) with the duality relations ρ = pρ̃' and γ = pγ̃' intact.
//!
//! Identity checks use a fixed tolerance of 1e-12: the relations are
//! algebraic, so anything looser would hide coding errors.

use crate::error::{Error, Result};

/// Tolerance for algebraic identity checks.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Sign of the nonlinearity λ in i∂_t u + Δu = λ|u|^{p-1}u.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FocusingSign {
    /// λ = -1: nonlinearity opposes dispersion, solitons exist.
    Focusing,
    /// λ = +1.
    Defocusing,
}

impl FocusingSign {
    pub fn lambda(self) -> f64 {
        match self {
            FocusingSign::Focusing => -1.0,
            FocusingSign::Defocusing => 1.0,
        }
    }

    pub fn from_i8(v: i8) -> Result<Self> {
        match v {
            -1 => Ok(FocusingSign::Focusing),
            1 => Ok(FocusingSign::Defocusing),
            _ => Err(Error::Domain(format!("focusing sign must be ±1, got {v}"))),
        }
    }
}

/// Physical problem description: dimension N, power p, sign of λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub dim: u32,
    pub power: f64,
    pub focusing: FocusingSign,
}

impl PhysParams {
    pub fn new(dim: u32, power: f64, focusing: FocusingSign) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be ≥ 1".into()));
        }
        if !(power > 1.0) || !power.is_finite() {
            return Err(Error::Domain(format!("power must satisfy p > 1, got {power}")));
        }
        Ok(PhysParams { dim, power, focusing })
    }

    /// Focusing problem (λ = -1) in dimension `dim` with power `p`.
    pub fn focusing(dim: u32, power: f64) -> Result<Self> {
        Self::new(dim, power, FocusingSign::Focusing)
    }

    pub fn lambda(&self) -> f64 {
        self.focusing.lambda()
    }

    /// Mass-critical power 1 + 4/N.
    pub fn mass_critical_power(&self) -> f64 {
        1.0 + 4.0 / self.dim as f64
    }

    /// Amplitude exponent 2/(p-1) of the scaling family
    /// u_ω(t, x) = ω^{2/(p-1)} u(ω²t, ωx).
    pub fn scaling_exponent(&self) -> f64 {
        2.0 / (self.power - 1.0)
    }

    /// Exponent of ‖f‖₂ in `ell`: (N+2)/2 - 2/(p-1).
    pub fn ell_l2_exponent(&self) -> f64 {
        (self.dim as f64 + 2.0) / 2.0 - self.scaling_exponent()
    }

    /// Exponent of ‖xf‖₂ in `ell`: 2/(p-1) - N/2.
    pub fn ell_weight_exponent(&self) -> f64 {
        self.scaling_exponent() - self.dim as f64 / 2.0
    }
}

/// The exponents the analysis attaches to (N, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSet {
    pub rho: f64,
    pub gamma: f64,
    pub rho_tilde: f64,
    pub gamma_tilde: f64,
    /// δ(γ) = N(1/2 - 1/γ).
    pub delta_gamma: f64,
    pub p_strauss: f64,
    pub p_mass_critical: f64,
}

impl ExponentSet {
    /// ρδ(γ), the quantity pinned to (1, 2) inside the window.
    pub fn rho_delta_gamma(&self) -> f64 {
        self.rho * self.delta_gamma
    }

    /// True when ρδ(γ) > 1 and ρ̃δ(γ̃) > 1 (the usable range of the
    /// space-time estimates).
    pub fn is_acceptable(&self, dim: u32) -> bool {
        let dg_tilde = dim as f64 * (0.5 - 1.0 / self.gamma_tilde);
        self.rho * self.delta_gamma > 1.0 && self.rho_tilde * dg_tilde > 1.0
    }
}

/// Strauss exponent: the positive root of N p² - (N+2) p - 2 = 0,
/// p_St = 1 + (2 - N + √(N² + 12N + 4)) / (2N).
pub fn strauss_exponent(dim: u32) -> Result<f64> {
    if dim == 0 {
        return Err(Error::Domain("Strauss exponent needs N ≥ 1".into()));
    }
    let n = dim as f64;
    Ok(1.0 + (2.0 - n + (n * n + 12.0 * n + 4.0).sqrt()) / (2.0 * n))
}

/// δ(r) = N(1/2 - 1/r) for r ∈ [2, ∞].
pub fn delta(r: f64, dim: u32) -> Result<f64> {
    if dim == 0 {
        return Err(Error::Domain("delta needs N ≥ 1".into()));
    }
    if r.is_nan() || r < 2.0 {
        return Err(Error::Domain(format!("delta requires r ≥ 2, got {r}")));
    }
    let n = dim as f64;
    if r.is_infinite() {
        return Ok(n / 2.0);
    }
    Ok(n * (0.5 - 1.0 / r))
}

/// Strichartz admissibility of the pair (q, r): r in the Sobolev range
/// ([2, 2N/(N-2)] for N ≥ 3, [2, ∞] for N = 1, [2, ∞) for N = 2) and
/// qδ(r) = 2 within 1e-12. Out-of-range inputs return false.
pub fn is_admissible(q: f64, r: f64, dim: u32) -> bool {
    if dim == 0 || q.is_nan() || r.is_nan() || r < 2.0 || q <= 0.0 {
        return false;
    }
    match dim {
        1 => {}
        2 => {
            if r.is_infinite() {
                return false;
            }
        }
        _ => {
            let upper = 2.0 * dim as f64 / (dim as f64 - 2.0);
            if r > upper {
                return false;
            }
        }
    }
    let d = match delta(r, dim) {
        Ok(d) => d,
        Err(_) => return false,
    };
    if q.is_infinite() {
        // (∞, 2) endpoint: qδ(r) = 2 holds in the limit sense only for δ = 0.
        return d == 0.0;
    }
    (q * d - 2.0).abs() <= IDENTITY_TOL
}

/// Full exponent set for (N, p).
///
/// Fails when either denominator 4 - (N-2)(p-1) or Np² - (N+2)p - 2
/// vanishes. For p ≤ p_St the set is still returned (ρ̃ may be negative or
/// huge); `is_acceptable` and `validate_window` report the defect.
pub fn exponent_set(params: &PhysParams) -> Result<ExponentSet> {
    let n = params.dim as f64;
    let p = params.power;
    let num = 2.0 * (p * p - 1.0);
    let den_rho = 4.0 - (n - 2.0) * (p - 1.0);
    let den_rho_tilde = n * p * p - (n + 2.0) * p - 2.0;
    if den_rho.abs() < 1e-14 {
        return Err(Error::DegenerateExponents(format!(
            "4 - (N-2)(p-1) = {den_rho} vanishes at N={n}, p={p}"
        )));
    }
    if den_rho_tilde.abs() < 1e-14 {
        return Err(Error::DegenerateExponents(format!(
            "Np² - (N+2)p - 2 = {den_rho_tilde} vanishes at N={n}, p={p} (p = p_St)"
        )));
    }
    let gamma = p + 1.0;
    Ok(ExponentSet {
        rho: num / den_rho,
        gamma,
        rho_tilde: num / den_rho_tilde,
        gamma_tilde: gamma,
        delta_gamma: delta(gamma, params.dim)?,
        p_strauss: strauss_exponent(params.dim)?,
        p_mass_critical: params.mass_critical_power(),
    })
}

/// One named check of the window report.
#[derive(Debug, Clone)]
pub struct WindowCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail report for the window (p_St, 1 + 4/N) and the attached
/// exponent identities. Boundary equalities count as failures: the window
/// is open.
#[derive(Debug, Clone)]
pub struct WindowReport {
    pub checks: Vec<WindowCheck>,
}

impl WindowReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn validate_window(params: &PhysParams) -> WindowReport {
    let mut checks = Vec::new();
    let p = params.power;
    let n = params.dim as f64;
    let p_st = strauss_exponent(params.dim).unwrap_or(f64::NAN);
    let p_mc = params.mass_critical_power();

    checks.push(WindowCheck {
        name: "p_in_window",
        passed: p > p_st && p < p_mc,
        detail: format!("p = {p}, window = ({p_st}, {p_mc})"),
    });

    match exponent_set(params) {
        Ok(set) => {
            let rdg = set.rho_delta_gamma();
            checks.push(WindowCheck {
                name: "rho_delta_gamma_in_band",
                passed: rdg > 1.0 && rdg < 2.0,
                detail: format!("ρδ(γ) = {rdg}, band = (1, 2)"),
            });
            let dg_tilde = n * (0.5 - 1.0 / set.gamma_tilde);
            let rtdgt = set.rho_tilde * dg_tilde;
            checks.push(WindowCheck {
                name: "rho_tilde_delta_gamma_tilde",
                passed: rtdgt > 1.0,
                detail: format!("ρ̃δ(γ̃) = {rtdgt} > 1"),
            });
            // duality: ρ = pρ̃' with ρ̃' = ρ̃/(ρ̃ - 1), and likewise for γ.
            let rho_dual = p * set.rho_tilde / (set.rho_tilde - 1.0);
            checks.push(WindowCheck {
                name: "rho_duality",
                passed: (set.rho - rho_dual).abs() <= IDENTITY_TOL * set.rho.abs().max(1.0),
                detail: format!("ρ = {}, pρ̃' = {rho_dual}", set.rho),
            });
            let gamma_dual = p * set.gamma_tilde / (set.gamma_tilde - 1.0);
            checks.push(WindowCheck {
                name: "gamma_duality",
                passed: (set.gamma - gamma_dual).abs() <= IDENTITY_TOL * set.gamma.abs().max(1.0),
                detail: format!("γ = {}, pγ̃' = {gamma_dual}", set.gamma),
            });
        }
        Err(e) => {
            checks.push(WindowCheck {
                name: "exponents_defined",
                passed: false,
                detail: e.to_string(),
            });
        }
    }
    WindowReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn strauss_exponent_closed_forms() {
        // N=3 → 2 exactly (√49 = 7), N=1 → (3+√17)/2, N=2 → 1+√2.
        assert_abs_diff_eq!(strauss_exponent(3).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            strauss_exponent(1).unwrap(),
            (3.0 + 17f64.sqrt()) / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(strauss_exponent(2).unwrap(), 1.0 + 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(strauss_exponent(1).unwrap(), 3.5615528128088303, epsilon = 1e-12);
    }

    #[test]
    fn strauss_exponent_is_a_root() {
        for dim in 1..=10u32 {
            let n = dim as f64;
            let r = strauss_exponent(dim).unwrap();
            assert!((n * r * r - (n + 2.0) * r - 2.0).abs() < 1e-10, "N={dim}");
            // p_St > max(1 + 2/N, 1 + 4/(N+2))
            assert!(r > (1.0 + 2.0 / n).max(1.0 + 4.0 / (n + 2.0)), "N={dim}");
        }
        assert!(strauss_exponent(0).is_err());
    }

    #[test]
    fn exponent_set_reference_point() {
        // (N=1, p=4): ρ = 30/7, γ = 5, ρ̃ = 15, δ(γ) = 0.3, ρδ(γ) = 9/7.
        let params = PhysParams::focusing(1, 4.0).unwrap();
        let set = exponent_set(&params).unwrap();
        assert_abs_diff_eq!(set.rho, 30.0 / 7.0, epsilon = 1e-14);
        assert_abs_diff_eq!(set.gamma, 5.0, epsilon = 0.0);
        assert_abs_diff_eq!(set.rho_tilde, 15.0, epsilon = 1e-12);
        assert_abs_diff_eq!(set.gamma_tilde, 5.0, epsilon = 0.0);
        assert_abs_diff_eq!(set.delta_gamma, 0.3, epsilon = 1e-15);
        let rdg = set.rho_delta_gamma();
        assert_abs_diff_eq!(rdg, 9.0 / 7.0, epsilon = 1e-14);
        assert!(rdg > 1.0 && rdg < 2.0);
    }

    #[test]
    fn mass_critical_power_is_self_dual() {
        // At p = 1 + 4/N the pair degenerates to ρ = γ = 2 + 4/N.
        for dim in [1u32, 2, 3] {
            let p = 1.0 + 4.0 / dim as f64;
            let params = PhysParams::focusing(dim, p).unwrap();
            let set = exponent_set(&params).unwrap();
            assert_abs_diff_eq!(set.rho, p + 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(set.gamma, p + 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_endpoints() {
        assert_abs_diff_eq!(delta(2.0, 1).unwrap(), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(delta(2.0, 5).unwrap(), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(delta(f64::INFINITY, 1).unwrap(), 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(delta(5.0, 1).unwrap(), 0.3, epsilon = 1e-15);
        assert!(delta(1.9, 1).is_err());
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(f64::INFINITY, 2.0, 1));
        assert!(is_admissible(8.0, 4.0, 1));
        // (ρ, γ) at (N=1, p=4) is not admissible: ρδ(γ) = 9/7 ≠ 2.
        assert!(!is_admissible(30.0 / 7.0, 5.0, 1));
        assert!(!is_admissible(4.0, f64::INFINITY, 2));
        assert!(is_admissible(4.0, f64::INFINITY, 1));
        assert!(!is_admissible(8.0, 1.5, 1));
        // N=3: r capped at 2N/(N-2) = 6.
        assert!(!is_admissible(2.0, 7.0, 3));
        assert!(is_admissible(2.0, 6.0, 3));
    }

    #[test]
    fn window_report_examples() {
        assert!(validate_window(&PhysParams::focusing(1, 4.0).unwrap()).all_passed());
        // p = 3 < p_St(1) ≈ 3.5616 fails the window check.
        let r = validate_window(&PhysParams::focusing(1, 3.0).unwrap());
        assert!(!r.all_passed());
        assert!(r.checks.iter().any(|c| c.name == "p_in_window" && !c.passed));
        // boundary p = 1 + 4/N = 7/3 at N=3 fails: the window is open.
        let r = validate_window(&PhysParams::focusing(3, 7.0 / 3.0).unwrap());
        assert!(r.checks.iter().any(|c| c.name == "p_in_window" && !c.passed));
    }

    #[test]
    fn duality_holds_across_the_window() {
        for dim in [1u32, 2, 3] {
            let p_st = strauss_exponent(dim).unwrap();
            let p_mc = 1.0 + 4.0 / dim as f64;
            for i in 1..=5 {
                let p = p_st + (p_mc - p_st) * i as f64 / 6.0;
                let params = PhysParams::focusing(dim, p).unwrap();
                let report = validate_window(&params);
                assert!(report.all_passed(), "N={dim}, p={p}: {report:?}");
            }
        }
    }

    #[test]
    fn degenerate_denominator_is_reported() {
        // p exactly at p_St(3) = 2 makes Np² - (N+2)p - 2 vanish.
        let params = PhysParams::focusing(3, 2.0).unwrap();
        assert!(matches!(exponent_set(&params), Err(Error::DegenerateExponents(_))));
    }
}
