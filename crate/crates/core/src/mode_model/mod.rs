//! Vibrational modes, defect configurations, isotope mass scaling and the
//! embedded T-centre reference data.

pub mod dataset;

pub use dataset::{
    load_reference_dataset, reference_configuration, reference_record, CarbonIsotope,
    HydrogenIsotope, IsotopeStructure, ModeRecord, ReferenceRecord, MODE_RECORDS,
    REFERENCE_RECORDS, ZPL_ENERGY_MEV_TEXT,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::oscillator::OscillatorPair;

/// Atomic masses in amu, from the AME atomic mass evaluation rounded to
/// five decimals. ¹²C is exact by definition of the amu.
pub mod masses {
    pub const PROTIUM: f64 = 1.00783;
    pub const DEUTERIUM: f64 = 2.01410;
    pub const CARBON_12: f64 = 12.0;
    pub const CARBON_13: f64 = 13.00335;
}

/// Reduced mass of a two-body oscillator.
pub fn reduced_mass(mass_a: f64, mass_b: f64) -> Result<f64> {
    for m in [mass_a, mass_b] {
        if !(m.is_finite() && m > 0.0) {
            return Err(domain(format!(
                "masses must be positive and finite, got {m} amu"
            )));
        }
    }
    Ok(mass_a * mass_b / (mass_a + mass_b))
}

/// Rescales a bond-stretch phonon energy for a change of reduced mass,
/// ħΩ ∝ μ^(-1/2).
pub fn isotope_scale_energy(energy: f64, mu_old: f64, mu_new: f64) -> Result<f64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(domain(format!(
            "energy must be positive and finite, got {energy} meV"
        )));
    }
    for mu in [mu_old, mu_new] {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(domain(format!(
                "reduced masses must be positive and finite, got {mu} amu"
            )));
        }
    }
    Ok(energy * (mu_old / mu_new).sqrt())
}

/// One effective phonon mode coupling the excited and ground electronic
/// states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VibrationalMode {
    pub label: String,
    /// ħΩ_g in meV.
    pub energy_ground: f64,
    /// ħΩ_e in meV.
    pub energy_excited: f64,
    /// ΔQ in amu^(1/2)·Å.
    pub displacement: f64,
    /// W_eg in meV/(amu^(1/2)·Å).
    pub coupling: f64,
}

impl VibrationalMode {
    pub fn new(
        label: impl Into<String>,
        energy_ground: f64,
        energy_excited: f64,
        displacement: f64,
        coupling: f64,
    ) -> Result<Self> {
        let mode = Self {
            label: label.into(),
            energy_ground,
            energy_excited,
            displacement,
            coupling,
        };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        let label = &self.label;
        if !(self.energy_ground.is_finite() && self.energy_ground > 0.0) {
            return Err(domain(format!(
                "mode `{label}`: ground phonon energy must be positive, got {}",
                self.energy_ground
            )));
        }
        if !(self.energy_excited.is_finite() && self.energy_excited > 0.0) {
            return Err(domain(format!(
                "mode `{label}`: excited phonon energy must be positive, got {}",
                self.energy_excited
            )));
        }
        if !self.displacement.is_finite() {
            return Err(domain(format!(
                "mode `{label}`: displacement must be finite"
            )));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(domain(format!(
                "mode `{label}`: coupling must be non-negative, got {}",
                self.coupling
            )));
        }
        Ok(())
    }

    /// Excited state is the initial oscillator, ground state the final one.
    pub fn oscillator_pair(&self) -> Result<OscillatorPair> {
        OscillatorPair::new(self.energy_excited, self.energy_ground, self.displacement)
    }
}

/// The ZPL energy and vibrational modes of one isotopic variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectConfiguration {
    pub variant_label: String,
    /// E_ZPL in meV.
    pub zpl_energy: f64,
    pub modes: Vec<VibrationalMode>,
}

impl DefectConfiguration {
    pub fn new(
        variant_label: impl Into<String>,
        zpl_energy: f64,
        modes: Vec<VibrationalMode>,
    ) -> Result<Self> {
        let config = Self {
            variant_label: variant_label.into(),
            zpl_energy,
            modes,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zpl_energy.is_finite() && self.zpl_energy > 0.0) {
            return Err(domain(format!(
                "ZPL energy must be positive, got {} meV",
                self.zpl_energy
            )));
        }
        if self.modes.is_empty() {
            return Err(domain(format!(
                "configuration `{}` has no modes",
                self.variant_label
            )));
        }
        for (i, mode) in self.modes.iter().enumerate() {
            mode.validate()?;
            if self.modes[..i].iter().any(|m| m.label == mode.label) {
                return Err(domain(format!("duplicate mode label `{}`", mode.label)));
            }
        }
        Ok(())
    }

    pub fn mode(&self, label: &str) -> Result<&VibrationalMode> {
        self.modes
            .iter()
            .find(|m| m.label == label)
            .ok_or_else(|| Error::MissingMode(label.to_string()))
    }

    pub fn mode_mut(&mut self, label: &str) -> Result<&mut VibrationalMode> {
        self.modes
            .iter_mut()
            .find(|m| m.label == label)
            .ok_or_else(|| Error::MissingMode(label.to_string()))
    }
}
