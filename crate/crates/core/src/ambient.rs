//! Mean squared fields from thermal radiation and near a reflecting plate.

use std::f64::consts::PI;

use crate::error::{finite, out_of_range, Result};
use crate::units::{kelvin_to_natural, Quantity, Unit};

/// Blackbody radiation at temperature T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSource {
    temperature: Quantity,
}

impl ThermalSource {
    pub fn new(temperature: Quantity) -> Result<Self> {
        let t = finite("temperature", temperature.value_in(Unit::Kelvin)?)?;
        if t < 0.0 {
            return Err(out_of_range("temperature", format!("{t} K is negative")));
        }
        Ok(ThermalSource { temperature })
    }

    pub fn kelvin(t: f64) -> Result<Self> {
        ThermalSource::new(Quantity::kelvin(t))
    }

    pub fn temperature(&self) -> Quantity {
        self.temperature
    }
}

/// ⟨E²⟩ = ⟨U⟩ = (π²/15)·T⁴ with T in µm⁻¹.
///
/// Electric and magnetic contributions are equal in a thermal state, so the
/// mean squared field equals the blackbody energy density. This is the T⁴
/// Stefan-Boltzmann law; it gives ≈ 1.09 µm⁻⁴ at 2600 K.
pub fn e2_thermal(s: &ThermalSource) -> Quantity {
    let t = kelvin_to_natural(s.temperature).expect("validated at construction").value();
    Quantity::microns(PI * PI / 15.0 * t.powi(4), -4)
}

/// Distance `z` (µm) from a single plane mirror, optionally with a finite
/// plasma wavelength (µm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirPlate {
    z: f64,
    plasma_wavelength: Option<f64>,
}

impl CasimirPlate {
    pub fn new(z: f64, plasma_wavelength: Option<f64>) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(out_of_range("z", format!("{z} must be positive")));
        }
        if let Some(lp) = plasma_wavelength {
            if !(lp.is_finite() && lp > 0.0) {
                return Err(out_of_range("plasma_wavelength", format!("{lp} must be positive")));
            }
        }
        Ok(CasimirPlate { z, plasma_wavelength })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn plasma_wavelength(&self) -> Option<f64> {
        self.plasma_wavelength
    }

    pub fn regime(&self) -> CasimirRegime {
        match self.plasma_wavelength {
            Some(lp) if self.z < lp => CasimirRegime::Plasma,
            _ => CasimirRegime::PerfectConductor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasimirRegime {
    /// 3/(16π²z⁴), valid for z ≳ λ_P.
    PerfectConductor,
    /// √2/(16 λ_P z³), valid for z ≲ λ_P.
    Plasma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirField {
    pub e2_total: Quantity,
    /// ⟨E_x²⟩ = ⟨E_y²⟩ = ⟨E_z²⟩ = ⟨E²⟩/3.
    pub e2_per_axis: Quantity,
    /// ⟨B²⟩ = −⟨E²⟩.
    pub b2_total: Quantity,
    pub regime: CasimirRegime,
    /// The other regime's value when z is within a factor 2 of λ_P.
    pub other_regime: Option<Quantity>,
}

fn perfect(z: f64) -> f64 {
    3.0 / (16.0 * PI * PI * z.powi(4))
}

fn plasma(z: f64, lp: f64) -> f64 {
    std::f64::consts::SQRT_2 / (16.0 * lp * z.powi(3))
}

pub fn e2_casimir(p: &CasimirPlate) -> CasimirField {
    let regime = p.regime();
    let total = match (regime, p.plasma_wavelength) {
        (CasimirRegime::Plasma, Some(lp)) => plasma(p.z, lp),
        _ => perfect(p.z),
    };
    let other_regime = p.plasma_wavelength.and_then(|lp| {
        let near = p.z >= 0.5 * lp && p.z <= 2.0 * lp;
        near.then(|| match regime {
            CasimirRegime::Plasma => perfect(p.z),
            CasimirRegime::PerfectConductor => plasma(p.z, lp),
        })
    });
    let q = |v: f64| Quantity::microns(v, -4);
    CasimirField {
        e2_total: q(total),
        e2_per_axis: q(total / 3.0),
        b2_total: q(-total),
        regime,
        other_regime: other_regime.map(q),
    }
}
