//! Unit tags and the conversions between SI electro-optic units and the
//! natural Lorentz-Heaviside system (ħ = c = ε₀ = 1) used by the rest of the
//! crate.
//!
//! Natural quantities are expressed as powers of the micrometre: a field
//! strength is µm⁻², a third-order susceptibility µm⁴, a temperature µm⁻¹.
//! The bridge between the two systems is the volt expressed as an inverse
//! length, `sqrt(ε₀/(ħc))` ≈ 1.6735×10⁷ m⁻¹.

use std::fmt;

use crate::error::{finite, out_of_range, Error, Result};

const MICRONS_PER_METRE: f64 = 1.0e6;

/// CODATA 2018 values.
pub mod codata {
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    pub const BOLTZMANN: f64 = 1.380_649e-23;
}

/// Unit tag carried by every [`Quantity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    /// µmⁿ for a nonzero integer n. `Micron(0)` never occurs; use
    /// [`Unit::micron`] which normalizes it to `Dimensionless`.
    Micron(i32),
    /// m²/V², SI third-order susceptibility.
    SquareMetrePerSquareVolt,
    /// m/V, SI second-order susceptibility.
    MetrePerVolt,
    /// V/m, SI field strength.
    VoltPerMetre,
    Kelvin,
    Dimensionless,
}

impl Unit {
    pub fn micron(power: i32) -> Unit {
        if power == 0 {
            Unit::Dimensionless
        } else {
            Unit::Micron(power)
        }
    }

    /// Power of the micrometre for natural and dimensionless units.
    pub fn micron_power(self) -> Option<i32> {
        match self {
            Unit::Micron(n) => Some(n),
            Unit::Dimensionless => Some(0),
            _ => None,
        }
    }

    /// Natural unit an SI-tagged value maps onto.
    pub fn natural_counterpart(self) -> Unit {
        match self {
            Unit::SquareMetrePerSquareVolt => Unit::Micron(4),
            Unit::MetrePerVolt => Unit::Micron(2),
            Unit::VoltPerMetre => Unit::Micron(-2),
            Unit::Kelvin => Unit::Micron(-1),
            other => other,
        }
    }

    /// Parses the ASCII spellings used in config and material files
    /// (`um4`, `um-2`, `m2V-2`, `mV-1`, `V/m`, `K`, `1`).
    pub fn parse(text: &str) -> Option<Unit> {
        let t = text.trim();
        match t {
            "" | "1" => Some(Unit::Dimensionless),
            "um" | "µm" => Some(Unit::Micron(1)),
            "m2V-2" | "m2/V2" | "m^2/V^2" => Some(Unit::SquareMetrePerSquareVolt),
            "mV-1" | "m/V" => Some(Unit::MetrePerVolt),
            "V/m" | "Vm-1" => Some(Unit::VoltPerMetre),
            "K" => Some(Unit::Kelvin),
            _ => {
                let rest = t.strip_prefix("um").or_else(|| t.strip_prefix("µm"))?;
                let rest = rest.strip_prefix('^').unwrap_or(rest);
                rest.parse::<i32>().ok().map(Unit::micron)
            }
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Micron(1) => write!(f, "um"),
            Unit::Micron(n) => write!(f, "um{n}"),
            Unit::SquareMetrePerSquareVolt => write!(f, "m2V-2"),
            Unit::MetrePerVolt => write!(f, "mV-1"),
            Unit::VoltPerMetre => write!(f, "V/m"),
            Unit::Kelvin => write!(f, "K"),
            Unit::Dimensionless => write!(f, "1"),
        }
    }
}

/// A real value with its unit tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        let unit = match unit {
            Unit::Micron(0) => Unit::Dimensionless,
            u => u,
        };
        Quantity { value, unit }
    }

    pub fn microns(value: f64, power: i32) -> Self {
        Quantity::new(value, Unit::micron(power))
    }

    pub fn dimensionless(value: f64) -> Self {
        Quantity::new(value, Unit::Dimensionless)
    }

    pub fn kelvin(value: f64) -> Self {
        Quantity::new(value, Unit::Kelvin)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    /// Returns the raw value if the tag matches `unit`.
    pub fn value_in(&self, unit: Unit) -> Result<f64> {
        if self.unit == unit {
            Ok(self.value)
        } else {
            Err(Error::UnitMismatch { expected: unit.to_string(), found: self.unit })
        }
    }

    pub fn checked_add(self, rhs: Quantity) -> Result<Quantity> {
        if self.unit != rhs.unit {
            return Err(Error::IncompatibleUnits(self.unit, rhs.unit));
        }
        Ok(Quantity::new(self.value + rhs.value, self.unit))
    }

    pub fn checked_sub(self, rhs: Quantity) -> Result<Quantity> {
        self.checked_add(rhs.scale(-1.0))
    }

    /// Products are defined within the natural (µm-power) system only.
    pub fn checked_mul(self, rhs: Quantity) -> Result<Quantity> {
        match (self.unit.micron_power(), rhs.unit.micron_power()) {
            (Some(a), Some(b)) => Ok(Quantity::microns(self.value * rhs.value, a + b)),
            _ if rhs.unit == Unit::Dimensionless => Ok(self.scale(rhs.value)),
            _ if self.unit == Unit::Dimensionless => Ok(rhs.scale(self.value)),
            _ => Err(Error::IncompatibleUnits(self.unit, rhs.unit)),
        }
    }

    pub fn checked_div(self, rhs: Quantity) -> Result<Quantity> {
        match (self.unit.micron_power(), rhs.unit.micron_power()) {
            (Some(a), Some(b)) => Ok(Quantity::microns(self.value / rhs.value, a - b)),
            _ if rhs.unit == Unit::Dimensionless => Ok(self.scale(1.0 / rhs.value)),
            _ if self.unit == rhs.unit => Ok(Quantity::dimensionless(self.value / rhs.value)),
            _ => Err(Error::IncompatibleUnits(self.unit, rhs.unit)),
        }
    }

    pub fn scale(self, factor: f64) -> Quantity {
        Quantity::new(self.value * factor, self.unit)
    }

    /// Converts to natural units with the default constants.
    pub fn to_natural(self) -> Result<Quantity> {
        ConversionConstants::default().to_natural(self)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            Unit::Dimensionless => write!(f, "{:e}", self.value),
            u => write!(f, "{:e} {}", self.value, u),
        }
    }
}

/// Constants bridging SI and natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionConstants {
    /// One volt expressed as an inverse length, in m⁻¹.
    pub volt_in_inverse_meters: f64,
    /// ħc in J·m.
    pub hbar_c: f64,
    /// Boltzmann constant in J/K.
    pub k_b: f64,
}

impl Default for ConversionConstants {
    fn default() -> Self {
        ConversionConstants {
            volt_in_inverse_meters: 1.6735e7,
            hbar_c: codata::HBAR * codata::SPEED_OF_LIGHT,
            k_b: codata::BOLTZMANN,
        }
    }
}

impl ConversionConstants {
    /// Constants with the volt conversion evaluated at full precision.
    pub fn codata() -> Self {
        let hbar_c = codata::HBAR * codata::SPEED_OF_LIGHT;
        ConversionConstants {
            volt_in_inverse_meters: (codata::EPSILON_0 / hbar_c).sqrt(),
            hbar_c,
            k_b: codata::BOLTZMANN,
        }
    }

    /// Relative deviation of `volt_in_inverse_meters²` from ε₀/(ħc).
    pub fn volt_consistency(&self) -> f64 {
        let exact = codata::EPSILON_0 / self.hbar_c;
        (self.volt_in_inverse_meters.powi(2) - exact).abs() / exact
    }

    /// µm⁴ per m²/V².
    pub fn chi3_factor(&self) -> f64 {
        MICRONS_PER_METRE.powi(4) / self.volt_in_inverse_meters.powi(2)
    }

    /// µm² per m/V.
    pub fn chi2_factor(&self) -> f64 {
        MICRONS_PER_METRE.powi(2) / self.volt_in_inverse_meters
    }

    /// µm⁻² per V/m.
    pub fn field_factor(&self) -> f64 {
        self.volt_in_inverse_meters / MICRONS_PER_METRE.powi(2)
    }

    /// µm⁻¹ per kelvin.
    pub fn temperature_factor(&self) -> f64 {
        self.k_b / self.hbar_c / MICRONS_PER_METRE
    }

    fn factor(&self, si: Unit) -> Option<f64> {
        match si {
            Unit::SquareMetrePerSquareVolt => Some(self.chi3_factor()),
            Unit::MetrePerVolt => Some(self.chi2_factor()),
            Unit::VoltPerMetre => Some(self.field_factor()),
            Unit::Kelvin => Some(self.temperature_factor()),
            _ => None,
        }
    }

    /// Maps an SI-tagged quantity onto its natural counterpart. Natural and
    /// dimensionless quantities pass through unchanged.
    pub fn to_natural(&self, q: Quantity) -> Result<Quantity> {
        finite("quantity", q.value)?;
        match self.factor(q.unit) {
            Some(f) => Ok(Quantity::new(q.value * f, q.unit.natural_counterpart())),
            None => Ok(q),
        }
    }

    /// Inverse of [`to_natural`](Self::to_natural) for the SI unit `target`.
    pub fn to_si(&self, q: Quantity, target: Unit) -> Result<Quantity> {
        finite("quantity", q.value)?;
        let f = self.factor(target).ok_or(Error::IncompatibleUnits(q.unit, target))?;
        if q.unit != target.natural_counterpart() {
            return Err(Error::IncompatibleUnits(q.unit, target));
        }
        Ok(Quantity::new(q.value / f, target))
    }

    pub fn chi3_si_to_natural(&self, chi: Quantity) -> Result<Quantity> {
        let v = finite("chi3", chi.value_in(Unit::SquareMetrePerSquareVolt)?)?;
        Ok(Quantity::microns(v * self.chi3_factor(), 4))
    }

    pub fn kelvin_to_natural(&self, t: Quantity) -> Result<Quantity> {
        let v = finite("temperature", t.value_in(Unit::Kelvin)?)?;
        if v < 0.0 {
            return Err(out_of_range("temperature", format!("{v} K is negative")));
        }
        Ok(Quantity::microns(v * self.temperature_factor(), -1))
    }
}

/// χ⁽³⁾ in m²/V² to µm⁴ with the default constants.
pub fn convert_chi3_si_to_natural(chi: Quantity) -> Result<Quantity> {
    ConversionConstants::default().chi3_si_to_natural(chi)
}

/// k_B·T/(ħc) in µm⁻¹.
pub fn kelvin_to_natural(t: Quantity) -> Result<Quantity> {
    ConversionConstants::default().kelvin_to_natural(t)
}

/// Squeeze parameter from a squeezing level in decibels, q = dB·ln10/20
/// (variance ratio e^{2q} = 10^{dB/10}).
pub fn db_to_squeeze_parameter(db: Quantity) -> Result<Quantity> {
    let v = finite("squeezing level", db.value_in(Unit::Dimensionless)?)?;
    if v < 0.0 {
        return Err(out_of_range("squeezing level", format!("{v} dB is negative")));
    }
    Ok(Quantity::dimensionless(v * std::f64::consts::LN_10 / 20.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn chi3(v: f64) -> Quantity {
        Quantity::new(v, Unit::SquareMetrePerSquareVolt)
    }

    #[test]
    fn chi3_conversion_examples() {
        assert_eq!(convert_chi3_si_to_natural(chi3(0.0)).unwrap().value(), 0.0);
        let f = ConversionConstants::default().chi3_factor();
        assert_relative_eq!(f, 3.5707e9, max_relative = 1e-4);
        let x = convert_chi3_si_to_natural(chi3(7.28e-18)).unwrap();
        assert_eq!(x.unit(), Unit::Micron(4));
        assert_relative_eq!(x.value(), 2.600e-8, max_relative = 1e-3);
        let c = convert_chi3_si_to_natural(chi3(1.0629e-18)).unwrap();
        assert_relative_eq!(c.value(), 3.80e-9, max_relative = 2e-3);
    }

    #[test]
    fn chi3_conversion_rejects_bad_input() {
        assert!(matches!(
            convert_chi3_si_to_natural(chi3(f64::NAN)),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            convert_chi3_si_to_natural(Quantity::microns(1.0, 4)),
            Err(Error::UnitMismatch { .. })
        ));
    }

    #[test]
    fn kelvin_examples() {
        assert_eq!(kelvin_to_natural(Quantity::kelvin(0.0)).unwrap().value(), 0.0);
        let hot = kelvin_to_natural(Quantity::kelvin(2600.0)).unwrap();
        assert_eq!(hot.unit(), Unit::Micron(-1));
        assert_relative_eq!(hot.value(), 1.1354, max_relative = 1e-4);
        let room = kelvin_to_natural(Quantity::kelvin(300.0)).unwrap();
        assert_relative_eq!(room.value(), 0.13101, max_relative = 1e-4);
        assert!(kelvin_to_natural(Quantity::kelvin(-1.0)).is_err());
    }

    #[test]
    fn kelvin_is_linear() {
        let a = kelvin_to_natural(Quantity::kelvin(417.3)).unwrap().value();
        let b = kelvin_to_natural(Quantity::kelvin(834.6)).unwrap().value();
        assert_relative_eq!(b, 2.0 * a, max_relative = f64::EPSILON);
    }

    #[test]
    fn db_examples() {
        let q = |db: f64| db_to_squeeze_parameter(Quantity::dimensionless(db)).unwrap().value();
        assert_eq!(q(0.0), 0.0);
        assert_relative_eq!(q(10.0), 1.1513, max_relative = 1e-4);
        assert_relative_eq!(q(13.029), 1.5, max_relative = 1e-4);
        assert!(db_to_squeeze_parameter(Quantity::dimensionless(-3.0)).is_err());
    }

    #[test]
    fn volt_constant_matches_vacuum_permittivity() {
        let c = ConversionConstants::default();
        assert!(c.volt_consistency() < 5e-3);
        assert!(ConversionConstants::codata().volt_consistency() < 1e-14);
    }

    #[test]
    fn arithmetic_rejects_mixed_units() {
        let a = Quantity::microns(1.0, -4);
        let b = Quantity::kelvin(1.0);
        assert!(a.checked_add(b).is_err());
        assert!(a.checked_mul(b).is_err());
        assert_eq!(
            Quantity::microns(2.0, 4).checked_mul(a).unwrap(),
            Quantity::dimensionless(2.0)
        );
        assert_eq!(
            a.checked_sub(Quantity::microns(0.5, -4)).unwrap(),
            Quantity::microns(0.5, -4)
        );
    }

    #[test]
    fn unit_spellings_round_trip() {
        for u in [
            Unit::Micron(4),
            Unit::Micron(-4),
            Unit::Micron(1),
            Unit::SquareMetrePerSquareVolt,
            Unit::MetrePerVolt,
            Unit::VoltPerMetre,
            Unit::Kelvin,
            Unit::Dimensionless,
        ] {
            assert_eq!(Unit::parse(&u.to_string()), Some(u));
        }
        assert_eq!(Unit::parse("um^-2"), Some(Unit::Micron(-2)));
        assert_eq!(Unit::parse("um0"), Some(Unit::Dimensionless));
        assert_eq!(Unit::parse("furlong"), None);
    }
}
