//! Brute-force overlaps by trapezoidal quadrature of explicit
//! Hermite-Gauss wavefunctions, evaluated in double-double arithmetic.
//!
//! This path shares nothing with the recurrence except the unit constant,
//! and is used to cross-check it. Double-double is needed because small
//! overlaps arise from cancellation between O(1) integrand values.

use twofloat::{consts, TwoFloat};

use super::OscillatorPair;
use crate::constants::HBAR_SQ_MEV_AMU_A2;
use crate::error::{domain, Error, Result};

/// Largest quantum number the quadrature accepts.
pub const MAX_QUADRATURE_N: usize = 30;

/// Grid construction for [`quadrature_overlap_table`].
///
/// The integration window extends past the outermost classical turning
/// point of the highest requested level by `turning_lengths` ground-state
/// turning lengths of the wider oscillator. The coarse step resolves the
/// shortest local wavelength with `points_per_wavelength` points; the
/// result is accepted only if halving the step changes every overlap by at
/// most `relative_tolerance · |value| + absolute_floor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub turning_lengths: f64,
    pub points_per_wavelength: f64,
    pub relative_tolerance: f64,
    pub absolute_floor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            turning_lengths: 12.0,
            points_per_wavelength: 20.0,
            relative_tolerance: 1e-12,
            absolute_floor: 1e-28,
        }
    }
}

/// One overlap ⟨m_initial | n_final⟩ by quadrature.
pub fn quadrature_overlap(
    m: usize,
    n: usize,
    pair: &OscillatorPair,
    grid: &GridSpec,
) -> Result<f64> {
    Ok(quadrature_overlap_table(m, n, pair, grid)?[m][n])
}

/// Overlaps for all m ≤ `m_max`, n ≤ `n_max`, indexed `[m][n]`.
pub fn quadrature_overlap_table(
    m_max: usize,
    n_max: usize,
    pair: &OscillatorPair,
    grid: &GridSpec,
) -> Result<Vec<Vec<f64>>> {
    if m_max > MAX_QUADRATURE_N || n_max > MAX_QUADRATURE_N {
        return Err(domain(format!(
            "quadrature supports quantum numbers up to {MAX_QUADRATURE_N}, got m={m_max}, n={n_max}"
        )));
    }
    if !(grid.turning_lengths >= 12.0 && grid.points_per_wavelength >= 20.0) {
        return Err(domain(format!(
            "grid must span at least 12 turning lengths with at least 20 points per wavelength, got {} and {}",
            grid.turning_lengths, grid.points_per_wavelength
        )));
    }

    let hsq = TwoFloat::from(HBAR_SQ_MEV_AMU_A2);
    let s_i = (TwoFloat::from(pair.energy_initial()) * recip(hsq)).sqrt();
    let s_f = (TwoFloat::from(pair.energy_final()) * recip(hsq)).sqrt();
    let d = pair.displacement();

    let (si, sf) = (s_i.hi(), s_f.hi());
    let reach_i = (2.0 * m_max as f64 + 1.0).sqrt() / si;
    let reach_f = (2.0 * n_max as f64 + 1.0).sqrt() / sf;
    let margin = grid.turning_lengths / si.min(sf);
    let lo = 0.0_f64.min(d) - reach_i.max(reach_f) - margin;
    let hi = 0.0_f64.max(d) + reach_i.max(reach_f) + margin;

    let k_max =
        (si * (2.0 * m_max as f64 + 1.0).sqrt()).max(sf * (2.0 * n_max as f64 + 1.0).sqrt());
    let coarse_step = std::f64::consts::TAU / k_max / grid.points_per_wavelength;
    let step = 0.5 * coarse_step;
    let points = ((hi - lo) / step).ceil() as usize + 1;

    let basis_i = HermiteBasis::new(s_i, m_max);
    let basis_f = HermiteBasis::new(s_f, n_max);
    let mut psi_i = vec![TwoFloat::from(0.0); m_max + 1];
    let mut psi_f = vec![TwoFloat::from(0.0); n_max + 1];

    let zero = TwoFloat::from(0.0);
    let mut fine = vec![vec![zero; n_max + 1]; m_max + 1];
    let mut coarse = vec![vec![zero; n_max + 1]; m_max + 1];

    let origin = TwoFloat::from(lo);
    let d = TwoFloat::from(d);
    for p in 0..points {
        let x = origin + TwoFloat::new_mul(p as f64, step);
        basis_i.evaluate(x, &mut psi_i);
        basis_f.evaluate(x - d, &mut psi_f);
        let on_coarse = p % 2 == 0;
        for (m, a) in psi_i.iter().enumerate() {
            for (n, b) in psi_f.iter().enumerate() {
                let product = *a * *b;
                fine[m][n] += product;
                if on_coarse {
                    coarse[m][n] += product;
                }
            }
        }
    }

    let mut table = vec![vec![0.0; n_max + 1]; m_max + 1];
    for m in 0..=m_max {
        for n in 0..=n_max {
            let fine_value = fine[m][n] * step;
            let coarse_value = coarse[m][n] * coarse_step;
            let change = (fine_value - coarse_value).hi().abs();
            let allowed = grid.relative_tolerance * fine_value.hi().abs() + grid.absolute_floor;
            if !(change <= allowed) {
                return Err(Error::Accuracy(format!(
                    "quadrature not converged for m={m}, n={n}: step halving changed the overlap by {change:.3e} (allowed {allowed:.3e})"
                )));
            }
            table[m][n] = fine_value.hi() + fine_value.lo();
        }
    }
    Ok(table)
}

/// Normalised Hermite functions of one oscillator in double-double.
struct HermiteBasis {
    inverse_length: TwoFloat,
    norm: TwoFloat,
    // (sqrt(2/(n+1)), sqrt(n/(n+1)))
    coefficients: Vec<(TwoFloat, TwoFloat)>,
}

impl HermiteBasis {
    fn new(inverse_length: TwoFloat, n_max: usize) -> Self {
        let norm = (inverse_length * recip(consts::PI.sqrt())).sqrt();
        let coefficients = (0..n_max)
            .map(|n| {
                let next = (n + 1) as f64;
                (
                    (TwoFloat::from(2.0) / next).sqrt(),
                    (TwoFloat::from(n as f64) / next).sqrt(),
                )
            })
            .collect();
        Self {
            inverse_length,
            norm,
            coefficients,
        }
    }

    /// Fills `out[n] = ψ_n(q)` for q measured from the oscillator minimum.
    fn evaluate(&self, q: TwoFloat, out: &mut [TwoFloat]) {
        let y = self.inverse_length * q;
        out[0] = self.norm * exp(-(y * y) * 0.5);
        if out.len() > 1 {
            out[1] = consts::SQRT_2 * y * out[0];
        }
        for n in 1..out.len() - 1 {
            let (a, b) = self.coefficients[n];
            out[n + 1] = a * y * out[n] - b * out[n - 1];
        }
    }
}

/// 1/x by one Newton step from the f64 reciprocal. `TwoFloat / TwoFloat`
/// in twofloat 0.8 is only accurate to f64 precision.
fn recip(x: TwoFloat) -> TwoFloat {
    let r = TwoFloat::from(1.0 / x.hi());
    r + r * (1.0 - x * r)
}

/// exp in double-double precision: range reduction by ln 2, a further
/// 2^-10 scaling, a short Taylor series and ten squarings.
fn exp(x: TwoFloat) -> TwoFloat {
    if x.hi() < -700.0 {
        // below ~1e-304; contributes nothing at double-double resolution
        return TwoFloat::from(0.0);
    }
    let k = (x.hi() / consts::LN_2.hi()).round();
    let r = (x - consts::LN_2 * k) * (1.0 / 1024.0);
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    for i in 1..=12 {
        term = term * r / i as f64;
        sum += term;
    }
    for _ in 0..10 {
        sum = sum * sum;
    }
    sum * 2f64.powi(k as i32)
}
