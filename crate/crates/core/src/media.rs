//! Susceptibility tensors of a nonlinear medium and the refractive-index
//! formulas for a probe wave travelling along z through a background field
//! polarized along x.

use std::fmt::{self, Write as _};

use crate::error::{finite, Error, Result};
use crate::units::{ConversionConstants, Quantity, Unit};

/// Ratio below which `a ≪ b` is considered satisfied.
pub const MUCH_LESS_THAN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "x" | "X" => Some(Axis::X),
            "y" | "Y" => Some(Axis::Y),
            "z" | "Z" => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Probe polarization; the background field is always along x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    X,
    Y,
}

impl Polarization {
    fn axis(self) -> Axis {
        match self {
            Polarization::X => Axis::X,
            Polarization::Y => Axis::Y,
        }
    }
}

/// Unit system of the stored χ⁽²⁾ and χ⁽³⁾ entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSystem {
    /// χ⁽²⁾ in m/V, χ⁽³⁾ in m²/V².
    Si,
    /// χ⁽²⁾ in µm², χ⁽³⁾ in µm⁴.
    Natural,
}

impl UnitSystem {
    pub fn chi2_unit(self) -> Unit {
        match self {
            UnitSystem::Si => Unit::MetrePerVolt,
            UnitSystem::Natural => Unit::Micron(2),
        }
    }

    pub fn chi3_unit(self) -> Unit {
        match self {
            UnitSystem::Si => Unit::SquareMetrePerSquareVolt,
            UnitSystem::Natural => Unit::Micron(4),
        }
    }
}

type Chi2 = [[[f64; 3]; 3]; 3];
type Chi3 = [[[[f64; 3]; 3]; 3]; 3];

/// Linear, second- and third-order susceptibilities, stored in full.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityTensors {
    chi1: [[f64; 3]; 3],
    chi2: Chi2,
    chi3: Chi3,
    system: UnitSystem,
}

impl SusceptibilityTensors {
    pub fn zeros(system: UnitSystem) -> Self {
        SusceptibilityTensors {
            chi1: [[0.0; 3]; 3],
            chi2: [[[0.0; 3]; 3]; 3],
            chi3: [[[[0.0; 3]; 3]; 3]; 3],
            system,
        }
    }

    pub fn system(&self) -> UnitSystem {
        self.system
    }

    pub fn chi1(&self, a: Axis, b: Axis) -> f64 {
        self.chi1[a.index()][b.index()]
    }

    pub fn chi2(&self, i: Axis, j: Axis, k: Axis) -> f64 {
        self.chi2[i.index()][j.index()][k.index()]
    }

    pub fn chi3(&self, i: Axis, j: Axis, k: Axis, l: Axis) -> f64 {
        self.chi3[i.index()][j.index()][k.index()][l.index()]
    }

    /// Sets χ⁽¹⁾ᵃᵇ and χ⁽¹⁾ᵇᵃ together.
    pub fn set_chi1(&mut self, a: Axis, b: Axis, value: f64) -> Result<()> {
        finite("chi1", value)?;
        self.chi1[a.index()][b.index()] = value;
        self.chi1[b.index()][a.index()] = value;
        Ok(())
    }

    pub fn set_chi2(&mut self, i: Axis, j: Axis, k: Axis, value: f64) -> Result<()> {
        self.chi2[i.index()][j.index()][k.index()] = finite("chi2", value)?;
        Ok(())
    }

    pub fn set_chi3(&mut self, i: Axis, j: Axis, k: Axis, l: Axis, value: f64) -> Result<()> {
        self.chi3[i.index()][j.index()][k.index()][l.index()] = finite("chi3", value)?;
        Ok(())
    }

    pub fn set_chi2_quantity(&mut self, i: Axis, j: Axis, k: Axis, q: Quantity) -> Result<()> {
        self.set_chi2(i, j, k, q.value_in(self.system.chi2_unit())?)
    }

    pub fn set_chi3_quantity(&mut self, i: Axis, j: Axis, k: Axis, l: Axis, q: Quantity) -> Result<()> {
        self.set_chi3(i, j, k, l, q.value_in(self.system.chi3_unit())?)
    }

    /// Same tensors with χ⁽²⁾ and χ⁽³⁾ expressed in natural units.
    pub fn to_natural(&self, consts: &ConversionConstants) -> Self {
        let (f2, f3) = match self.system {
            UnitSystem::Natural => return self.clone(),
            UnitSystem::Si => (consts.chi2_factor(), consts.chi3_factor()),
        };
        let mut out = self.clone();
        out.system = UnitSystem::Natural;
        out.chi2.iter_mut().flatten().flatten().for_each(|v| *v *= f2);
        out.chi3.iter_mut().flatten().flatten().flatten().for_each(|v| *v *= f3);
        out
    }

    /// Whole tensor with every χ⁽³⁾ᵢⱼₖₗ replaced by χ⁽³⁾ᵢ{ⱼₖₗ}.
    pub fn cyclic_symmetrized(&self) -> Self {
        let mut out = self.clone();
        for i in Axis::ALL {
            for j in Axis::ALL {
                for k in Axis::ALL {
                    for l in Axis::ALL {
                        out.chi3[i.index()][j.index()][k.index()][l.index()] =
                            chi3_cyclic_symmetrized(self, i, j, k, l);
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = self.chi1.iter().flatten().all(|v| v.is_finite())
            && self.chi2.iter().flatten().flatten().all(|v| v.is_finite())
            && self.chi3.iter().flatten().flatten().flatten().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::NonFinite("susceptibility tensor entry"));
        }
        for a in 0..3 {
            for b in 0..a {
                if self.chi1[a][b] != self.chi1[b][a] {
                    return Err(Error::InvalidMaterial("chi1 is not symmetric".into()));
                }
            }
        }
        Ok(())
    }
}

/// χ⁽²⁾ᵢ₍ⱼₖ₎ = ½(χᵢⱼₖ + χᵢₖⱼ), in the tensor's stored units.
pub fn chi2_pair_symmetrized(t: &SusceptibilityTensors, i: Axis, j: Axis, k: Axis) -> f64 {
    0.5 * (t.chi2(i, j, k) + t.chi2(i, k, j))
}

/// χ⁽³⁾ᵢ{ⱼₖₗ} = ⅓(χᵢⱼₖₗ + χᵢₖₗⱼ + χᵢₗⱼₖ), in the tensor's stored units.
pub fn chi3_cyclic_symmetrized(t: &SusceptibilityTensors, i: Axis, j: Axis, k: Axis, l: Axis) -> f64 {
    (t.chi3(i, j, k, l) + t.chi3(i, k, l, j) + t.chi3(i, l, j, k)) / 3.0
}

/// A named medium without natural birefringence for propagation along z.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    tensors: SusceptibilityTensors,
    n0: f64,
    /// Wavelength window (µm) where the tabulated values apply.
    pub validity_wavelength: Option<(f64, f64)>,
    /// Free-form provenance and assumptions.
    pub notes: Vec<String>,
}

impl Material {
    /// Builds a material; n₀ is derived from n₀² = 1 + χ⁽¹⁾ₓₓ.
    pub fn new(name: impl Into<String>, tensors: SusceptibilityTensors) -> Result<Self> {
        tensors.validate()?;
        let xx = tensors.chi1(Axis::X, Axis::X);
        let yy = tensors.chi1(Axis::Y, Axis::Y);
        if (xx - yy).abs() > 1e-12 * xx.abs().max(1.0) {
            return Err(Error::InvalidMaterial(format!(
                "chi1_xx = {xx} differs from chi1_yy = {yy} (natural birefringence)"
            )));
        }
        if xx <= 0.0 {
            return Err(Error::InvalidMaterial(format!("n0 must exceed 1 (chi1_xx = {xx})")));
        }
        Ok(Material {
            name: name.into(),
            tensors,
            n0: (1.0 + xx).sqrt(),
            validity_wavelength: None,
            notes: Vec::new(),
        })
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn tensors(&self) -> &SusceptibilityTensors {
        &self.tensors
    }

    /// CdGeAs₂ near 10.6 µm. Only χ⁽³⁾ₓₓₓₓ and χ⁽³⁾ₓₓᵧᵧ are tabulated, so the
    /// other xxyy-type permutations are taken equal to χ⁽³⁾ₓₓᵧᵧ.
    pub fn cdgeas2() -> Self {
        use Axis::{X, Y, Z};
        let n0: f64 = 3.5;
        let mut t = SusceptibilityTensors::zeros(UnitSystem::Si);
        for a in [X, Y, Z] {
            t.set_chi1(a, a, n0 * n0 - 1.0).unwrap();
        }
        let xxxx = 72800.0e-22;
        let xxyy = -14000.0e-22;
        t.set_chi3(X, X, X, X, xxxx).unwrap();
        t.set_chi3(Y, Y, Y, Y, xxxx).unwrap();
        for (i, j, k, l) in [
            (X, X, Y, Y),
            (X, Y, X, Y),
            (X, Y, Y, X),
            (Y, Y, X, X),
            (Y, X, Y, X),
            (Y, X, X, Y),
        ] {
            t.set_chi3(i, j, k, l, xxyy).unwrap();
        }
        let mut m = Material::new("cdgeas2", t).unwrap();
        m.validity_wavelength = Some((8.0, 12.0));
        m.notes = vec![
            "chalcopyrite CdGeAs2, n0 = 3.5, chi3 values at 10.6 um".into(),
            "assumed chi3_yyxx = chi3_yxxy = chi3_yxyx = chi3_xxyy".into(),
            "chi2 omitted (not tabulated)".into(),
        ];
        m
    }

    /// Parses the key-value material format:
    ///
    /// ```text
    /// name = cdgeas2
    /// n0 = 3.5
    /// validity = 8 12 um
    /// chi3.x.x.y.y = -1.4e-18 m2V-2
    /// chi2.x.y.z = 1e-12 mV-1
    /// chi1.x.x = 11.25
    /// note = free text
    /// ```
    ///
    /// χ⁽²⁾/χ⁽³⁾ entries need a unit suffix, and all of them must be in the
    /// same system. `n0` fills the diagonal of χ⁽¹⁾ unless χ⁽¹⁾ is given.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut builder = MaterialBuilder::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            builder
                .apply(line)
                .map_err(|message| Error::MaterialSyntax { line: idx + 1, message })?;
        }
        builder.build()
    }

    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        let t = &self.tensors;
        writeln!(s, "name = {}", self.name).unwrap();
        if let Some((lo, hi)) = self.validity_wavelength {
            writeln!(s, "validity = {lo:e} {hi:e} um").unwrap();
        }
        for note in &self.notes {
            writeln!(s, "note = {note}").unwrap();
        }
        for a in Axis::ALL {
            for b in Axis::ALL {
                let v = t.chi1(a, b);
                if v != 0.0 && a.index() <= b.index() {
                    writeln!(s, "chi1.{a}.{b} = {v:e}").unwrap();
                }
            }
        }
        let u2 = t.system.chi2_unit();
        for i in Axis::ALL {
            for j in Axis::ALL {
                for k in Axis::ALL {
                    let v = t.chi2(i, j, k);
                    if v != 0.0 {
                        writeln!(s, "chi2.{i}.{j}.{k} = {v:e} {u2}").unwrap();
                    }
                }
            }
        }
        let u3 = t.system.chi3_unit();
        for i in Axis::ALL {
            for j in Axis::ALL {
                for k in Axis::ALL {
                    for l in Axis::ALL {
                        let v = t.chi3(i, j, k, l);
                        if v != 0.0 {
                            writeln!(s, "chi3.{i}.{j}.{k}.{l} = {v:e} {u3}").unwrap();
                        }
                    }
                }
            }
        }
        s
    }
}

#[derive(Default)]
struct MaterialBuilder {
    name: Option<String>,
    n0: Option<f64>,
    validity: Option<(f64, f64)>,
    notes: Vec<String>,
    chi1: Vec<(Axis, Axis, f64)>,
    chi2: Vec<([Axis; 3], f64)>,
    chi3: Vec<([Axis; 4], f64)>,
    system: Option<UnitSystem>,
}

fn parse_axes<const N: usize>(parts: &[&str]) -> std::result::Result<[Axis; N], String> {
    if parts.len() != N {
        return Err(format!("expected {N} axis labels, found {}", parts.len()));
    }
    let mut out = [Axis::X; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = Axis::parse(p).ok_or_else(|| format!("unknown axis '{p}'"))?;
    }
    Ok(out)
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

impl MaterialBuilder {
    fn apply(&mut self, line: &str) -> std::result::Result<(), String> {
        let (key, value) = line.split_once('=').ok_or("expected 'key = value'")?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "name" => self.name = Some(value.to_string()),
            "note" => self.notes.push(value.to_string()),
            "n0" => self.n0 = Some(parse_number(value)?),
            "validity" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                match parts.as_slice() {
                    [lo, hi] | [lo, hi, "um"] => {
                        self.validity = Some((parse_number(lo)?, parse_number(hi)?))
                    }
                    _ => return Err("validity expects 'lo hi um'".into()),
                }
            }
            _ => {
                let parts: Vec<&str> = key.split('.').collect();
                let (number, unit) = match value.split_once(char::is_whitespace) {
                    Some((n, u)) => (n, Some(u.trim())),
                    None => (value, None),
                };
                let number = parse_number(number)?;
                match parts[0] {
                    "chi1" => {
                        if unit.is_some_and(|u| Unit::parse(u) != Some(Unit::Dimensionless)) {
                            return Err("chi1 is dimensionless".into());
                        }
                        let [a, b] = parse_axes::<2>(&parts[1..])?;
                        self.chi1.push((a, b, number));
                    }
                    "chi2" | "chi3" => {
                        let unit = unit
                            .and_then(Unit::parse)
                            .ok_or_else(|| format!("{key} needs a unit suffix"))?;
                        let system = match (parts[0], unit) {
                            ("chi2", Unit::MetrePerVolt) | ("chi3", Unit::SquareMetrePerSquareVolt) => {
                                UnitSystem::Si
                            }
                            ("chi2", Unit::Micron(2)) | ("chi3", Unit::Micron(4)) => UnitSystem::Natural,
                            _ => return Err(format!("unit {unit} does not fit {}", parts[0])),
                        };
                        if self.system.is_some_and(|s| s != system) {
                            return Err("chi2/chi3 entries mix SI and natural units".into());
                        }
                        self.system = Some(system);
                        if parts[0] == "chi2" {
                            self.chi2.push((parse_axes::<3>(&parts[1..])?, number));
                        } else {
                            self.chi3.push((parse_axes::<4>(&parts[1..])?, number));
                        }
                    }
                    _ => return Err(format!("unknown key '{key}'")),
                }
            }
        }
        Ok(())
    }

    fn build(self) -> Result<Material> {
        let mut t = SusceptibilityTensors::zeros(self.system.unwrap_or(UnitSystem::Natural));
        if self.chi1.is_empty() {
            let n0 = self
                .n0
                .ok_or_else(|| Error::InvalidMaterial("either n0 or chi1 entries are required".into()))?;
            for a in Axis::ALL {
                t.set_chi1(a, a, n0 * n0 - 1.0)?;
            }
        }
        for (a, b, v) in self.chi1 {
            t.set_chi1(a, b, v)?;
        }
        for ([i, j, k], v) in self.chi2 {
            t.set_chi2(i, j, k, v)?;
        }
        for ([i, j, k, l], v) in self.chi3 {
            t.set_chi3(i, j, k, l, v)?;
        }
        let mut m = Material::new(self.name.unwrap_or_else(|| "unnamed".into()), t)?;
        if let Some(n0) = self.n0 {
            if (m.n0 - n0).abs() > 1e-9 * n0 {
                return Err(Error::InvalidMaterial(format!(
                    "n0 = {n0} inconsistent with chi1_xx (gives {})",
                    m.n0
                )));
            }
        }
        m.validity_wavelength = self.validity;
        m.notes = self.notes;
        Ok(m)
    }
}

/// Classical background amplitude E⁰, in V/m or µm⁻².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStrength(Quantity);

impl FieldStrength {
    pub fn new(q: Quantity) -> Result<Self> {
        finite("field strength", q.value())?;
        match q.unit() {
            Unit::VoltPerMetre | Unit::Micron(-2) => Ok(FieldStrength(q)),
            found => Err(Error::UnitMismatch { expected: "V/m or um-2".into(), found }),
        }
    }

    pub fn natural(value: f64) -> Result<Self> {
        FieldStrength::new(Quantity::microns(value, -2))
    }

    pub fn quantity(&self) -> Quantity {
        self.0
    }

    fn natural_value(&self, consts: &ConversionConstants) -> f64 {
        consts.to_natural(self.0).expect("validated at construction").value()
    }
}

/// Axis-appropriate symmetrized susceptibilities in natural units.
struct ProbeCoefficients {
    chi2: f64,
    chi3: f64,
}

fn probe_coefficients(m: &Material, pol: Polarization) -> ProbeCoefficients {
    let t = m.tensors.to_natural(&ConversionConstants::default());
    let p = pol.axis();
    ProbeCoefficients {
        chi2: chi2_pair_symmetrized(&t, p, p, Axis::X),
        chi3: chi3_cyclic_symmetrized(&t, p, p, Axis::X, Axis::X),
    }
}

/// Squared refractive index seen by a probe polarized along `pol`:
/// n₀² + 2χ⁽²⁾ₚ₍ₚₓ₎E⁰ + 3χ⁽³⁾ₚ{ₚₓₓ}(E⁰)².
pub fn probe_n_squared(m: &Material, pol: Polarization, e0: FieldStrength) -> f64 {
    let c = probe_coefficients(m, pol);
    let e = e0.natural_value(&ConversionConstants::default());
    m.n0 * m.n0 + 2.0 * c.chi2 * e + 3.0 * c.chi3 * e * e
}

/// Two-term expansion of the fractional index difference (n_x − n_y)/n₀.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBirefringence {
    /// Linear (Pockels) term.
    pub pockels: f64,
    /// Quadratic (Kerr) term.
    pub kerr: f64,
    pub total: f64,
    pub validity: ValidityReport,
    /// Set when any expansion-validity check fails.
    pub warning: bool,
}

pub fn delta_n_classical(m: &Material, e0: FieldStrength) -> ClassicalBirefringence {
    let x = probe_coefficients(m, Polarization::X);
    let y = probe_coefficients(m, Polarization::Y);
    let e = e0.natural_value(&ConversionConstants::default());
    let n2 = m.n0 * m.n0;
    let pockels = (x.chi2 - y.chi2) / n2 * e;
    let kerr = 1.5 * (x.chi3 - y.chi3) / n2 * e * e;
    let validity = expansion_validity(m, e0);
    let warning = !validity.all_passed();
    ClassicalBirefringence { pockels, kerr, total: pockels + kerr, validity, warning }
}

/// C = (3χₓₓₓₓ − χᵧᵧₓₓ − χᵧₓₓᵧ − χᵧₓᵧₓ)/(2n₀²), in µm⁴.
pub fn quantum_coefficient(m: &Material) -> Quantity {
    use Axis::{X, Y};
    let t = m.tensors.to_natural(&ConversionConstants::default());
    let numerator = 3.0 * t.chi3(X, X, X, X) - t.chi3(Y, Y, X, X) - t.chi3(Y, X, X, Y) - t.chi3(Y, X, Y, X);
    Quantity::microns(numerator / (2.0 * m.n0 * m.n0), 4)
}

/// ⟨δn̂⟩ = C·⟨:E²:⟩ with C from the material's tensors.
pub fn delta_n_quantum(m: &Material, e2: Quantity) -> Result<f64> {
    delta_n_from_coefficient(quantum_coefficient(m), e2)
}

/// ⟨δn̂⟩ for an explicitly supplied coefficient (µm⁴) and ⟨:E²:⟩ (µm⁻⁴).
pub fn delta_n_from_coefficient(coefficient: Quantity, e2: Quantity) -> Result<f64> {
    let c = coefficient.value_in(Unit::Micron(4))?;
    let e2 = finite("<:E^2:>", e2.value_in(Unit::Micron(-4))?)?;
    Ok(c * e2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs/rhs; the check passes when this is at most [`MUCH_LESS_THAN`].
    pub ratio: f64,
    pub passed: bool,
}

impl ValidityCheck {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        ValidityCheck { name, lhs, rhs, ratio, passed: ratio <= MUCH_LESS_THAN }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
}

impl ValidityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ValidityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the power-expansion hierarchy |χ⁽³⁾E²| ≪ |χ⁽²⁾E| ≪ 1 and
/// (χ⁽²⁾/n₀²)² ≪ |χ⁽³⁾/n₀²|. Without χ⁽²⁾ the first inequality becomes
/// |3χ⁽³⁾E²| ≪ 1.
pub fn expansion_validity(m: &Material, e0: FieldStrength) -> ValidityReport {
    let x = probe_coefficients(m, Polarization::X);
    let y = probe_coefficients(m, Polarization::Y);
    let e = e0.natural_value(&ConversionConstants::default());
    let chi2 = x.chi2.abs().max(y.chi2.abs());
    let chi3 = x.chi3.abs().max(y.chi3.abs());
    let n2 = m.n0 * m.n0;

    let kerr = 3.0 * chi3 * e * e;
    let pockels = 2.0 * chi2 * e;
    let mut checks = Vec::with_capacity(3);
    if chi2 == 0.0 {
        checks.push(ValidityCheck::new("kerr_vs_unity", kerr, 1.0));
    } else {
        checks.push(ValidityCheck::new("kerr_vs_pockels", kerr, pockels));
    }
    checks.push(ValidityCheck::new("pockels_vs_unity", pockels, 1.0));
    checks.push(ValidityCheck::new("chi2_squared_vs_chi3", (chi2 / n2).powi(2), chi3 / n2));
    ValidityReport { checks }
}
