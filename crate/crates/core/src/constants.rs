//! Physical constants in the crate's unit system (meV, amu, Å, s).
//!
//! CODATA 2018 values; ħ, e and h are exact in the SI since 2019.

/// Reduced Planck constant in J·s.
pub const HBAR_J_S: f64 = 1.054_571_817e-34;
/// Unified atomic mass unit in kg.
pub const AMU_KG: f64 = 1.660_539_066_60e-27;
/// One meV in J.
pub const MEV_J: f64 = 1.602_176_634e-22;
/// One Å² in m².
const ANGSTROM_SQ_M2: f64 = 1e-20;

/// ħ in meV·s.
pub const HBAR_MEV_S: f64 = 6.582_119_569e-13;

/// ħ² in meV·amu·Å², about 4.18016.
///
/// With this, the zero-point length of a mode with phonon energy ħΩ is
/// `sqrt(HBAR_SQ / (2 ħΩ))` in amu^(1/2)·Å.
pub const HBAR_SQ_MEV_AMU_A2: f64 = HBAR_J_S * HBAR_J_S / (AMU_KG * ANGSTROM_SQ_M2 * MEV_J);

/// The constant set as a value, for code that wants to carry it around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar_mev_s: f64,
    pub hbar_sq_mev_amu_a2: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar_mev_s: HBAR_MEV_S,
            hbar_sq_mev_amu_a2: HBAR_SQ_MEV_AMU_A2,
        }
    }
}
