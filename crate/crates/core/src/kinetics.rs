//! Radiative/nonradiative bookkeeping for an emitter: 1/τ = Γ_R + Γ_NR,
//! radiative-rate inference from two isotopic variants, quantum
//! efficiency, ZPL emission fraction and Purcell-dependent cyclicity.
//!
//! Nonradiative decay is taken as fully spin-mixing and unaffected by
//! Purcell enhancement.

use crate::error::{domain, Error, Result};

/// Default Γ_NR(protium)/Γ_NR(deuterium) from the C-H stretch model.
pub const DEFAULT_NR_RATIO: f64 = 285.0;

/// Fraction of T-centre radiative emission into the ZPL.
pub const T_CENTRE_DEBYE_WALLER: f64 = 0.23;

/// Lifetime in seconds for rates in s⁻¹.
pub fn total_lifetime(radiative_rate: f64, nonradiative_rate: f64) -> Result<f64> {
    for (name, rate) in [
        ("radiative", radiative_rate),
        ("nonradiative", nonradiative_rate),
    ] {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(domain(format!(
                "{name} rate must be non-negative and finite, got {rate}"
            )));
        }
    }
    let total = radiative_rate + nonradiative_rate;
    if total == 0.0 {
        return Err(Error::Degenerate("both decay rates are zero".into()));
    }
    Ok(1.0 / total)
}

/// Rates and efficiencies of two variants that share Γ_R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticsResult {
    /// Γ_R in s⁻¹.
    pub radiative_rate: f64,
    /// Γ_NR of variant a in s⁻¹.
    pub nonradiative_rate_a: f64,
    /// Γ_NR of variant b in s⁻¹.
    pub nonradiative_rate_b: f64,
    /// 1/Γ_R in µs.
    pub radiative_lifetime: f64,
    pub efficiency_a: f64,
    pub efficiency_b: f64,
}

/// Solves 1/τ_x = Γ_R + Γ_NR,x for both variants with
/// Γ_NR,a = `nr_ratio`·Γ_NR,b. Lifetimes in seconds.
pub fn infer_radiative_rate(
    lifetime_a: f64,
    lifetime_b: f64,
    nr_ratio: f64,
) -> Result<KineticsResult> {
    for (name, tau) in [("lifetime_a", lifetime_a), ("lifetime_b", lifetime_b)] {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(domain(format!(
                "{name} must be positive and finite, got {tau} s"
            )));
        }
    }
    if !(nr_ratio.is_finite() && nr_ratio > 0.0) {
        return Err(domain(format!(
            "nonradiative ratio must be positive and finite, got {nr_ratio}"
        )));
    }

    let (total_a, total_b) = (1.0 / lifetime_a, 1.0 / lifetime_b);
    let nonradiative_b = if nr_ratio == 1.0 {
        if lifetime_a != lifetime_b {
            return Err(Error::Infeasible(format!(
                "equal nonradiative rates cannot produce different lifetimes ({lifetime_a} s vs {lifetime_b} s)"
            )));
        }
        // any Γ_NR in [0, 1/τ] fits; take the purely radiative solution
        0.0
    } else {
        (total_a - total_b) / (nr_ratio - 1.0)
    };
    if nonradiative_b < 0.0 {
        return Err(Error::Infeasible(format!(
            "negative nonradiative rate {nonradiative_b:e} s^-1"
        )));
    }
    let radiative_rate = total_b - nonradiative_b;
    if radiative_rate <= 0.0 {
        return Err(Error::Infeasible(format!(
            "non-positive radiative rate {radiative_rate:e} s^-1"
        )));
    }

    Ok(KineticsResult {
        radiative_rate,
        nonradiative_rate_a: nr_ratio * nonradiative_b,
        nonradiative_rate_b: nonradiative_b,
        radiative_lifetime: 1e6 / radiative_rate,
        efficiency_a: radiative_rate * lifetime_a,
        efficiency_b: radiative_rate * lifetime_b,
    })
}

fn check_fraction(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(domain(format!("{name} must lie in [0, 1], got {value}")));
    }
    Ok(())
}

/// Share of all decays that emit into the ZPL, η·η_DW.
pub fn zpl_emission_fraction(efficiency: f64, debye_waller: f64) -> Result<f64> {
    check_fraction("efficiency", efficiency)?;
    check_fraction("Debye-Waller fraction", debye_waller)?;
    Ok(efficiency * debye_waller)
}

/// Radiative efficiency with the radiative rate enhanced by `purcell`:
/// η₀P / (1 + η₀(P - 1)).
pub fn purcell_radiative_efficiency(eta0: f64, purcell: f64) -> Result<f64> {
    check_fraction("intrinsic efficiency", eta0)?;
    if !(purcell.is_finite() && purcell >= 0.0) {
        return Err(domain(format!(
            "Purcell factor must be non-negative, got {purcell}"
        )));
    }
    if eta0 == 0.0 {
        return Ok(0.0);
    }
    if eta0 == 1.0 {
        return Ok(1.0);
    }
    Ok(eta0 * purcell / (1.0 + eta0 * (purcell - 1.0)))
}

/// Expected optical cycles before a spin flip, 2(1 + η₀(P - 1))/(1 - η₀).
pub fn cyclicity(eta0: f64, purcell: f64) -> Result<f64> {
    check_fraction("intrinsic efficiency", eta0)?;
    if !(purcell.is_finite() && purcell >= 0.0) {
        return Err(domain(format!(
            "Purcell factor must be non-negative, got {purcell}"
        )));
    }
    if eta0 == 1.0 {
        return Err(Error::Degenerate(
            "cyclicity diverges for a perfectly radiative emitter".into(),
        ));
    }
    Ok(2.0 * (1.0 + eta0 * (purcell - 1.0)) / (1.0 - eta0))
}
