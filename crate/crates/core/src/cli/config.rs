//! JSON defect configuration files.
//!
//! ```json
//! {
//!   "variant_label": "natural",
//!   "zpl_energy_mev": 935,
//!   "modes": [
//!     { "label": "ch-stretch", "hbar_omega_g_mev": 359, "hbar_omega_e_mev": 358,
//!       "delta_q": 0.001, "w_eg": 0.58 }
//!   ]
//! }
//! ```

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{ConfigError, Error, Result};
use crate::mode_model::dataset::{ModeRecord, MODE_RECORDS, ZPL_ENERGY_MEV_TEXT};
use crate::mode_model::{DefectConfiguration, VibrationalMode};

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(try_from = "f64")]
struct Positive(f64);

impl TryFrom<f64> for Positive {
    type Error = String;
    fn try_from(v: f64) -> std::result::Result<Self, String> {
        if v.is_finite() && v > 0.0 {
            Ok(Self(v))
        } else {
            Err(format!("must be positive and finite, got {v}"))
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(try_from = "f64")]
struct NonNegative(f64);

impl TryFrom<f64> for NonNegative {
    type Error = String;
    fn try_from(v: f64) -> std::result::Result<Self, String> {
        if v.is_finite() && v >= 0.0 {
            Ok(Self(v))
        } else {
            Err(format!("must be non-negative and finite, got {v}"))
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(try_from = "f64")]
struct Finite(f64);

impl TryFrom<f64> for Finite {
    type Error = String;
    fn try_from(v: f64) -> std::result::Result<Self, String> {
        if v.is_finite() {
            Ok(Self(v))
        } else {
            Err(format!("must be finite, got {v}"))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeIn {
    label: String,
    hbar_omega_g_mev: Positive,
    hbar_omega_e_mev: Positive,
    delta_q: Finite,
    w_eg: NonNegative,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigIn {
    variant_label: String,
    zpl_energy_mev: Positive,
    modes: Vec<ModeIn>,
}

#[derive(Serialize)]
struct ModeOut<N> {
    label: String,
    hbar_omega_g_mev: N,
    hbar_omega_e_mev: N,
    delta_q: N,
    w_eg: N,
}

#[derive(Serialize)]
struct ConfigOut<N> {
    variant_label: String,
    zpl_energy_mev: N,
    modes: Vec<ModeOut<N>>,
}

fn semantic(path: impl Into<String>, message: impl Into<String>) -> Error {
    ConfigError::Semantic {
        path: path.into(),
        line: None,
        message: message.into(),
    }
    .into()
}

/// Parses and validates a configuration document.
pub fn parse_defect_config(document: &str) -> Result<DefectConfiguration> {
    let mut de = serde_json::Deserializer::from_str(document);
    let parsed: ConfigIn = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        if inner.is_data() {
            let path = e.path().to_string();
            ConfigError::Semantic {
                path: if path == "." { "<root>".into() } else { path },
                line: Some(inner.line()),
                message: strip_position(&inner.to_string()),
            }
        } else {
            ConfigError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            }
        }
    })?;
    de.end().map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;

    if parsed.modes.is_empty() {
        return Err(semantic("modes", "at least one mode is required"));
    }
    let mut modes = Vec::with_capacity(parsed.modes.len());
    for (i, m) in parsed.modes.into_iter().enumerate() {
        if m.label.is_empty() {
            return Err(semantic(format!("modes[{i}].label"), "must not be empty"));
        }
        if modes
            .iter()
            .any(|prev: &VibrationalMode| prev.label == m.label)
        {
            return Err(semantic(
                format!("modes[{i}].label"),
                format!("duplicate label `{}`", m.label),
            ));
        }
        modes.push(VibrationalMode {
            label: m.label,
            energy_ground: m.hbar_omega_g_mev.0,
            energy_excited: m.hbar_omega_e_mev.0,
            displacement: m.delta_q.0,
            coupling: m.w_eg.0,
        });
    }
    let config = DefectConfiguration {
        variant_label: parsed.variant_label,
        zpl_energy: parsed.zpl_energy_mev.0,
        modes,
    };
    config.validate()?;
    Ok(config)
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Pretty-printed document that parses back to an identical value.
pub fn serialize_defect_config(config: &DefectConfiguration) -> String {
    let doc = ConfigOut {
        variant_label: config.variant_label.clone(),
        zpl_energy_mev: config.zpl_energy,
        modes: config
            .modes
            .iter()
            .map(|m| ModeOut {
                label: m.label.clone(),
                hbar_omega_g_mev: m.energy_ground,
                hbar_omega_e_mev: m.energy_excited,
                delta_q: m.displacement,
                w_eg: m.coupling,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

/// Reference configuration of `variant` with the published decimals kept
/// verbatim (`0.70` stays `0.70`).
pub fn reference_config_document(variant: &str) -> Result<String> {
    let raw = |s: &str| RawValue::from_string(s.to_string()).expect("embedded decimal");
    let records: Vec<&ModeRecord> = MODE_RECORDS
        .iter()
        .filter(|r| r.variant == variant)
        .collect();
    if records.is_empty() {
        return Err(Error::UnknownRecord(variant.to_string()));
    }
    let doc = ConfigOut {
        variant_label: variant.to_string(),
        zpl_energy_mev: raw(ZPL_ENERGY_MEV_TEXT),
        modes: records
            .iter()
            .map(|r| ModeOut {
                label: r.mode.to_string(),
                hbar_omega_g_mev: raw(r.hbar_omega_g_mev),
                hbar_omega_e_mev: raw(r.hbar_omega_e_mev),
                delta_q: raw(r.delta_q),
                w_eg: raw(r.w_eg),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc).expect("plain data serializes"))
}
