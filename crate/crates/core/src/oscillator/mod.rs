//! Overlaps and position matrix elements between the vibrational
//! eigenstates of two displaced, frequency-shifted 1D harmonic oscillators.
//!
//! Both oscillators live on the same mass-weighted coordinate Q. The
//! *initial* oscillator (the excited electronic state) has its minimum at
//! Q = 0, the *final* oscillator (the ground electronic state) at
//! Q = ΔQ. With s = sqrt(ħΩ/ħ²) the eigenfunctions are
//!
//! ```text
//! ψ_n(Q) = (s²/π)^(1/4) (2^n n!)^(-1/2) H_n(s(Q - Q_min)) exp(-s²(Q - Q_min)²/2)
//! ```
//!
//! Overlaps ⟨m_i|n_f⟩ for m ∈ {0, 1} are generated by a three-term
//! recurrence in n derived from the ladder-operator relation
//! `b = c₊ a + c₋ a† - δ`, with
//! `c± = (s_f/s_i ± s_i/s_f)/2` and `δ = s_f ΔQ/√2`:
//!
//! ```text
//! √(n+1) I(m,n+1) = √m I(m-1,n)/c₊ + (c₋/c₊) √n I(m,n-1) - κ I(m,n),   κ = δ s_i/(s_f c₊)
//! ```
//!
//! The recursion is carried on rescaled values with a shared logarithmic
//! scale, so neither the seed `I(0,0)` nor deep tails under/overflow.

mod quadrature;

pub use quadrature::{quadrature_overlap, quadrature_overlap_table, GridSpec};

use crate::constants::HBAR_SQ_MEV_AMU_A2;
use crate::error::{domain, Error, Result};

/// Largest final-state quantum number the recurrence will serve.
pub const MAX_CERTIFIED_N: usize = 512;

/// Zero-point length sqrt(ħ/2Ω) in amu^(1/2)·Å for a phonon energy in meV.
pub fn ho_length_scale(phonon_energy: f64) -> Result<f64> {
    if !(phonon_energy.is_finite() && phonon_energy > 0.0) {
        return Err(domain(format!(
            "phonon energy must be positive and finite, got {phonon_energy} meV"
        )));
    }
    Ok((HBAR_SQ_MEV_AMU_A2 / (2.0 * phonon_energy)).sqrt())
}

/// Inverse length s = sqrt(ħΩ/ħ²) of an oscillator, in (amu^(1/2)·Å)⁻¹.
fn inverse_length(phonon_energy: f64) -> f64 {
    (phonon_energy / HBAR_SQ_MEV_AMU_A2).sqrt()
}

/// Two harmonic oscillators sharing a mass-weighted coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorPair {
    energy_initial: f64,
    energy_final: f64,
    displacement: f64,
}

impl OscillatorPair {
    /// `energy_initial` is ħΩ_e and `energy_final` is ħΩ_g, both in meV;
    /// `displacement` is the final-state minimum relative to the
    /// initial-state minimum, in amu^(1/2)·Å.
    pub fn new(energy_initial: f64, energy_final: f64, displacement: f64) -> Result<Self> {
        for (name, e) in [("initial", energy_initial), ("final", energy_final)] {
            if !(e.is_finite() && e > 0.0) {
                return Err(domain(format!(
                    "{name} phonon energy must be positive and finite, got {e} meV"
                )));
            }
        }
        if !displacement.is_finite() {
            return Err(domain(format!(
                "displacement must be finite, got {displacement}"
            )));
        }
        Ok(Self {
            energy_initial,
            energy_final,
            displacement,
        })
    }

    pub fn energy_initial(&self) -> f64 {
        self.energy_initial
    }

    pub fn energy_final(&self) -> f64 {
        self.energy_final
    }

    pub fn displacement(&self) -> f64 {
        self.displacement
    }

    /// The same pair with the displacement negated.
    pub fn mirrored(&self) -> Self {
        Self {
            displacement: -self.displacement,
            ..*self
        }
    }

    /// Huang-Rhys factor ħΩ_g ΔQ² / (2ħ²) of the final oscillator.
    pub fn huang_rhys(&self) -> f64 {
        self.energy_final * self.displacement * self.displacement / (2.0 * HBAR_SQ_MEV_AMU_A2)
    }
}

/// Overlaps ⟨m_initial | n_final⟩ for m ∈ {0, 1} and n = 0..=n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTable {
    rows: [Vec<f64>; 2],
}

impl OverlapTable {
    pub fn n_max(&self) -> usize {
        self.rows[0].len() - 1
    }

    /// Overlaps from initial state `m` (0 or 1) to every final state.
    pub fn row(&self, m: usize) -> &[f64] {
        &self.rows[m]
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.rows[m][n]
    }
}

// Rescale the recursion window whenever it leaves [2^-RESCALE_BITS, 2^RESCALE_BITS].
const RESCALE_BITS: i32 = 480;

/// Runs the overlap recurrence up to `n_max`.
pub fn overlap_table(pair: &OscillatorPair, n_max: usize) -> Result<OverlapTable> {
    if n_max > MAX_CERTIFIED_N {
        return Err(Error::Capability(format!(
            "final quantum number {n_max} exceeds the certified range n <= {MAX_CERTIFIED_N}"
        )));
    }

    let s_i = inverse_length(pair.energy_initial);
    let s_f = inverse_length(pair.energy_final);
    let d = pair.displacement;

    let c_plus = 0.5 * (s_f / s_i + s_i / s_f);
    let c_minus = 0.5 * (s_f / s_i - s_i / s_f);
    let delta = s_f * d / std::f64::consts::SQRT_2;
    let kappa = delta * (s_i / s_f) / c_plus;
    let squeeze = c_minus / c_plus;

    // ln I(0,0) = -ln(c₊)/2 - a_i a_f ΔQ² / (2(a_i + a_f)),  a = s²
    let (a_i, a_f) = (s_i * s_i, s_f * s_f);
    let mut log_scale = -0.5 * c_plus.ln() - a_i * a_f * d * d / (2.0 * (a_i + a_f));

    let mut rows = [vec![0.0; n_max + 1], vec![0.0; n_max + 1]];

    // window[m] = (scaled I(m, n-1), scaled I(m, n))
    let mut prev = [0.0_f64; 2];
    let mut cur = [1.0, delta / c_plus];

    let emit = |rows: &mut [Vec<f64>; 2], n: usize, cur: &[f64; 2], log_scale: f64| {
        let factor = log_scale.exp();
        rows[0][n] = cur[0] * factor;
        rows[1][n] = cur[1] * factor;
    };
    emit(&mut rows, 0, &cur, log_scale);

    let big = 2f64.powi(RESCALE_BITS);
    let small = 2f64.powi(-RESCALE_BITS);

    for n in 0..n_max {
        let sqrt_n = (n as f64).sqrt();
        let inv_sqrt_next = 1.0 / ((n + 1) as f64).sqrt();
        let next0 = (squeeze * sqrt_n * prev[0] - kappa * cur[0]) * inv_sqrt_next;
        let next1 = (cur[0] / c_plus + squeeze * sqrt_n * prev[1] - kappa * cur[1]) * inv_sqrt_next;
        prev = cur;
        cur = [next0, next1];

        let magnitude = cur
            .iter()
            .chain(prev.iter())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if magnitude > 0.0 && !(small..=big).contains(&magnitude) {
            let shift = if magnitude > big {
                -RESCALE_BITS
            } else {
                RESCALE_BITS
            };
            let factor = 2f64.powi(shift);
            for v in cur.iter_mut().chain(prev.iter_mut()) {
                *v *= factor;
            }
            log_scale -= shift as f64 * std::f64::consts::LN_2;
        }
        emit(&mut rows, n + 1, &cur, log_scale);
    }

    Ok(OverlapTable { rows })
}

/// Franck-Condon overlap ⟨m_initial | n_final⟩.
pub fn fc_overlap(m: usize, n: usize, pair: &OscillatorPair) -> Result<f64> {
    if m > 1 {
        return Err(domain(format!(
            "initial quantum number must be 0 or 1, got {m}"
        )));
    }
    Ok(overlap_table(pair, n)?.get(m, n))
}

/// Which equilibrium geometry the phonon position operator is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentOrigin {
    /// Q₀ is the initial (excited-state) minimum; the operator is a single
    /// ladder step on the initial vacuum.
    #[default]
    Initial,
    /// Q₀ is the final (ground-state) minimum.
    Final,
}

/// M_n = ⟨0_initial| Q̂ - Q₀ |n_final⟩ with Q₀ at the initial minimum.
pub fn transition_moment(n: usize, pair: &OscillatorPair) -> Result<f64> {
    Ok(transition_moments(pair, n, MomentOrigin::Initial)?[n])
}

/// M_n for n = 0..=n_max.
pub fn transition_moments(
    pair: &OscillatorPair,
    n_max: usize,
    origin: MomentOrigin,
) -> Result<Vec<f64>> {
    let table = overlap_table(pair, n_max)?;
    Ok(moments_from_table(&table, pair, origin))
}

pub(crate) fn moments_from_table(
    table: &OverlapTable,
    pair: &OscillatorPair,
    origin: MomentOrigin,
) -> Vec<f64> {
    // (Q̂ - 0)|0_i⟩ = l_i |1_i⟩
    let length = ho_length_scale(pair.energy_initial).expect("validated pair");
    let first = table.row(1).iter().map(|ov| length * ov);
    match origin {
        MomentOrigin::Initial => first.collect(),
        MomentOrigin::Final => first
            .zip(table.row(0))
            .map(|(m, ov0)| m - pair.displacement * ov0)
            .collect(),
    }
}

/// Exact value of Σ_n M_n², i.e. ⟨0_i|(Q̂ - Q₀)²|0_i⟩.
pub fn moment_sum_rule(pair: &OscillatorPair, origin: MomentOrigin) -> f64 {
    let l2 = HBAR_SQ_MEV_AMU_A2 / (2.0 * pair.energy_initial);
    match origin {
        MomentOrigin::Initial => l2,
        MomentOrigin::Final => l2 + pair.displacement * pair.displacement,
    }
}
