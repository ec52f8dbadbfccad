//! Zero-temperature single-mode multiphonon nonradiative rate
//!
//! ```text
//! Γ_NR = (2π/ħ) W_eg² Σ_n |⟨χ_e0| Q̂ - Q₀ |χ_gn⟩|² G(E_ZPL - nħΩ_g; σ),   σ = ħΩ_e/2
//! ```
//!
//! where the energy-conserving delta function is replaced by a normalised
//! Gaussian `G`. The sum runs to `n_max = ceil((E_ZPL + 10σ)/ħΩ_g)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::constants::HBAR_MEV_S;
use crate::error::{domain, Error, Result};
use crate::mode_model::DefectConfiguration;
use crate::oscillator::{moments_from_table, overlap_table, MomentOrigin};

/// Normalised Gaussian surrogate of δ(detuning), in meV⁻¹.
pub fn gaussian_delta(detuning: f64, sigma: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(domain(format!(
            "broadening must be positive, got {sigma} meV"
        )));
    }
    let z = detuning / sigma;
    Ok((-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTerm {
    /// Final-state phonon number.
    pub n: usize,
    /// M_n² in amu·Å².
    pub moment_sq: f64,
    /// Gaussian weight in meV⁻¹.
    pub delta_weight: f64,
    /// Contribution to Γ_NR in s⁻¹.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    /// Γ_NR in s⁻¹.
    pub total_rate: f64,
    pub terms: Vec<RateTerm>,
    pub n_max_used: usize,
    /// Broadening σ in meV.
    pub sigma: f64,
}

/// Knobs for sensitivity studies. The defaults give the standard rate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RateOptions {
    /// Overrides the truncation `ceil((E_ZPL + 10σ)/ħΩ_g)`.
    pub n_max: Option<usize>,
    pub moment_origin: MomentOrigin,
}

/// Truncation of the phonon sum: beyond `E_ZPL + 10σ` the Gaussian weight
/// is below 2e-22 of its peak.
pub fn default_n_max(zpl_energy: f64, sigma: f64, energy_ground: f64) -> usize {
    ((zpl_energy + 10.0 * sigma) / energy_ground).ceil() as usize
}

pub fn nonradiative_rate(config: &DefectConfiguration, mode_label: &str) -> Result<RateResult> {
    nonradiative_rate_with(config, mode_label, &RateOptions::default())
}

pub fn nonradiative_rate_with(
    config: &DefectConfiguration,
    mode_label: &str,
    options: &RateOptions,
) -> Result<RateResult> {
    let mode = config.mode(mode_label)?;
    config.validate()?;

    let sigma = 0.5 * mode.energy_excited;
    let n_max = options
        .n_max
        .unwrap_or_else(|| default_n_max(config.zpl_energy, sigma, mode.energy_ground));

    let pair = mode.oscillator_pair()?;
    let table = overlap_table(&pair, n_max)?;
    let moments = moments_from_table(&table, &pair, options.moment_origin);

    let prefactor = 2.0 * PI / HBAR_MEV_S * mode.coupling * mode.coupling;
    let mut terms = Vec::with_capacity(n_max + 1);
    for (n, moment) in moments.iter().enumerate() {
        let moment_sq = moment * moment;
        let delta_weight =
            gaussian_delta(config.zpl_energy - n as f64 * mode.energy_ground, sigma)?;
        terms.push(RateTerm {
            n,
            moment_sq,
            delta_weight,
            contribution: prefactor * moment_sq * delta_weight,
        });
    }
    let total_rate = terms.iter().map(|t| t.contribution).sum();

    Ok(RateResult {
        total_rate,
        terms,
        n_max_used: n_max,
        sigma,
    })
}

/// Γ_NR(a)/Γ_NR(b) for the same mode label in two configurations.
pub fn isotope_rate_ratio(
    config_a: &DefectConfiguration,
    config_b: &DefectConfiguration,
    mode_label: &str,
) -> Result<f64> {
    let a = nonradiative_rate(config_a, mode_label)?.total_rate;
    let b = nonradiative_rate(config_b, mode_label)?.total_rate;
    if b == 0.0 {
        return Err(Error::Degenerate(format!(
            "rate of `{}` in configuration `{}` is exactly zero",
            mode_label, config_b.variant_label
        )));
    }
    Ok(a / b)
}

/// Quantity varied by [`rate_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    ZplEnergy,
    Displacement,
    Coupling,
    EnergyGround,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::ZplEnergy => "zpl_energy",
            SweepParameter::Displacement => "displacement",
            SweepParameter::Coupling => "coupling",
            SweepParameter::EnergyGround => "energy_ground",
        }
    }

    fn apply(&self, config: &mut DefectConfiguration, mode_label: &str, value: f64) -> Result<()> {
        if let SweepParameter::ZplEnergy = self {
            config.zpl_energy = value;
            return Ok(());
        }
        let mode = config.mode_mut(mode_label)?;
        match self {
            SweepParameter::Displacement => mode.displacement = value,
            SweepParameter::Coupling => mode.coupling = value,
            SweepParameter::EnergyGround => mode.energy_ground = value,
            SweepParameter::ZplEnergy => unreachable!(),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<RateResult>,
}

/// Evaluates the rate at every grid value independently (in parallel).
/// Rows come back in grid order; a failing point yields an `Err` row.
pub fn rate_sweep(
    config: &DefectConfiguration,
    mode_label: &str,
    parameter: SweepParameter,
    grid: &[f64],
) -> Vec<SweepRow> {
    grid.par_iter()
        .map(|&value| {
            let mut point = config.clone();
            let outcome = parameter
                .apply(&mut point, mode_label, value)
                .and_then(|_| nonradiative_rate(&point, mode_label));
            SweepRow { value, outcome }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_model::{reference_configuration, VibrationalMode};

    #[test]
    fn gaussian_peak_and_symmetry() {
        // 1/(16.5·√(2π)) = 0.0241783200243292532...
        let peak = gaussian_delta(0.0, 16.5).unwrap();
        assert!((peak - 0.024_178_320_024_329_253).abs() < 1e-17);
        for x in [0.3, 7.0, 100.0] {
            assert_eq!(
                gaussian_delta(x, 16.5).unwrap(),
                gaussian_delta(-x, 16.5).unwrap()
            );
        }
        assert!(gaussian_delta(0.0, 0.0).is_err());
        assert!(gaussian_delta(0.0, -1.0).is_err());
    }

    #[test]
    fn gaussian_integrates_to_one() {
        // composite Simpson over ±10σ
        let sigma = 16.5;
        let steps = 20_000;
        let h = 20.0 * sigma / steps as f64;
        let mut sum = 0.0;
        for i in 0..=steps {
            let x = -10.0 * sigma + i as f64 * h;
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * gaussian_delta(x, sigma).unwrap();
        }
        assert!((sum * h / 3.0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_coupling_gives_zero_rate() {
        let mut config = reference_configuration("natural").unwrap();
        config.mode_mut("ch-stretch").unwrap().coupling = 0.0;
        let result = nonradiative_rate(&config, "ch-stretch").unwrap();
        assert_eq!(result.total_rate, 0.0);
    }

    #[test]
    fn terms_sum_to_total() {
        let config = reference_configuration("natural").unwrap();
        for label in ["accepting", "ch-stretch"] {
            let result = nonradiative_rate(&config, label).unwrap();
            let sum: f64 = result.terms.iter().map(|t| t.contribution).sum();
            assert!((sum - result.total_rate).abs() <= 1e-12 * result.total_rate);
            assert!(result.terms.iter().all(|t| t.contribution >= 0.0));
            assert_eq!(result.terms.len(), result.n_max_used + 1);
        }
    }

    #[test]
    fn truncation_rule() {
        let config = reference_configuration("natural").unwrap();
        let ch = nonradiative_rate(&config, "ch-stretch").unwrap();
        assert_eq!(ch.sigma, 179.0);
        // ceil((935 + 1790)/359) = 8
        assert_eq!(ch.n_max_used, 8);
        let acc = nonradiative_rate(&config, "accepting").unwrap();
        // ceil((935 + 165)/33) = 34
        assert_eq!(acc.n_max_used, 34);
    }

    #[test]
    fn missing_mode_and_degenerate_ratio() {
        let config = reference_configuration("natural").unwrap();
        assert!(matches!(
            nonradiative_rate(&config, "bend"),
            Err(Error::MissingMode(_))
        ));
        let mut silent = config.clone();
        silent.mode_mut("ch-stretch").unwrap().coupling = 0.0;
        assert!(matches!(
            isotope_rate_ratio(&config, &silent, "ch-stretch"),
            Err(Error::Degenerate(_))
        ));
        assert_eq!(
            isotope_rate_ratio(&config, &config, "ch-stretch").unwrap(),
            1.0
        );
    }

    #[test]
    fn capability_error_propagates() {
        let mode = VibrationalMode::new("soft", 1.0, 1.0, 0.1, 1.0).unwrap();
        let config = DefectConfiguration::new("x", 935.0, vec![mode]).unwrap();
        assert!(matches!(
            nonradiative_rate(&config, "soft"),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn sweep_reports_failures_per_row() {
        let config = reference_configuration("natural").unwrap();
        let rows = rate_sweep(
            &config,
            "ch-stretch",
            SweepParameter::EnergyGround,
            &[359.0, -1.0, 1.0, 300.0],
        );
        assert_eq!(rows.len(), 4);
        assert!(rows[0].outcome.is_ok());
        assert!(matches!(rows[1].outcome, Err(Error::Domain(_))));
        assert!(matches!(rows[2].outcome, Err(Error::Capability(_))));
        assert!(rows[3].outcome.is_ok());
        assert_eq!(
            rows.iter().map(|r| r.value).collect::<Vec<_>>(),
            [359.0, -1.0, 1.0, 300.0]
        );
    }
}
