//! Normal-ordered ⟨:E²:⟩ and photon statistics for squeezed vacua and
//! coherent states, all in natural units (lengths and times in µm).

use std::f64::consts::PI;

use crate::error::{finite, out_of_range, Result};
use crate::units::Quantity;

fn e2(value: f64) -> Quantity {
    Quantity::microns(value, -4)
}

/// One excited plane-wave mode of a multimode squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Wave vector, µm⁻¹.
    pub k: [f64; 3],
    /// Angular frequency, µm⁻¹.
    pub omega: f64,
    /// Squeeze amplitude q ≥ 0.
    pub q: f64,
    /// Squeeze phase η, radians.
    pub eta: f64,
}

/// Finite set of squeezed modes in a quantization volume.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    volume: f64,
    modes: Vec<Mode>,
}

impl ModeSet {
    pub fn new(volume: f64, modes: Vec<Mode>) -> Result<Self> {
        if !(volume.is_finite() && volume > 0.0) {
            return Err(out_of_range("volume", format!("{volume} must be positive")));
        }
        if modes.is_empty() {
            return Err(out_of_range("modes", "mode list is empty"));
        }
        for m in &modes {
            if !(m.omega.is_finite() && m.omega > 0.0) {
                return Err(out_of_range("omega", format!("{} must be positive", m.omega)));
            }
            if !(m.q.is_finite() && m.q >= 0.0) {
                return Err(out_of_range("q", format!("{} must be non-negative", m.q)));
            }
            finite("eta", m.eta)?;
            m.k.iter().try_for_each(|&c| finite("k", c).map(|_| ()))?;
        }
        Ok(ModeSet { volume, modes })
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }
}

/// (1/V) Σ ω sinh q [sinh q + cosh q cos(2ωt − 2k·x − η)].
pub fn e2_mode_sum(ms: &ModeSet, t: f64, x: [f64; 3]) -> Quantity {
    let sum: f64 = ms
        .modes
        .iter()
        .map(|m| {
            let kx = m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2];
            let phase = 2.0 * m.omega * t - 2.0 * kx - m.eta;
            m.omega * m.q.sinh() * (m.q.sinh() + m.q.cosh() * phase.cos())
        })
        .sum();
    e2(sum / ms.volume)
}

/// Collimated squeezed beam along y with narrow bandwidth Δk and angular
/// spread Δθ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedBeam {
    /// Ω, µm⁻¹.
    pub omega: f64,
    /// k, µm⁻¹.
    pub k: f64,
    pub delta_k_over_k: f64,
    pub delta_theta: f64,
    pub q: f64,
    pub eta: f64,
    pub medium_index: f64,
}

/// Fractional bandwidth above which the narrow-band form is doubtful.
pub const BANDWIDTH_WARNING: f64 = 0.1;
/// Angular spread above which the beam is no longer collimated.
pub const COLLIMATION_WARNING: f64 = 0.3;

impl SqueezedBeam {
    /// Beam with Ω = k/n for the given vacuum wavelength 2π/k (µm).
    pub fn in_medium(
        wavelength: f64,
        medium_index: f64,
        q: f64,
        eta: f64,
        delta_k_over_k: f64,
        delta_theta: f64,
    ) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(out_of_range("wavelength", format!("{wavelength} must be positive")));
        }
        if !(medium_index.is_finite() && medium_index >= 1.0) {
            return Err(out_of_range("medium_index", format!("{medium_index} must be >= 1")));
        }
        let k = 2.0 * PI / wavelength;
        SqueezedBeam::new(k / medium_index, k, q, eta, delta_k_over_k, delta_theta, medium_index)
    }

    pub fn new(
        omega: f64,
        k: f64,
        q: f64,
        eta: f64,
        delta_k_over_k: f64,
        delta_theta: f64,
        medium_index: f64,
    ) -> Result<Self> {
        let beam = SqueezedBeam { omega, k, delta_k_over_k, delta_theta, q, eta, medium_index };
        beam.validate()?;
        Ok(beam)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("k", self.k),
            ("delta_k_over_k", self.delta_k_over_k),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(out_of_range(name, format!("{v} must be positive")));
            }
        }
        if !(self.delta_theta > 0.0 && self.delta_theta <= PI) {
            return Err(out_of_range("delta_theta", format!("{} not in (0, pi]", self.delta_theta)));
        }
        if !(self.q.is_finite() && self.q >= 0.0) {
            return Err(out_of_range("q", format!("{} must be non-negative", self.q)));
        }
        if !(self.medium_index.is_finite() && self.medium_index >= 1.0) {
            return Err(out_of_range("medium_index", format!("{} must be >= 1", self.medium_index)));
        }
        finite("eta", self.eta)?;
        Ok(())
    }

    /// Soft warnings for the narrow-band and collimation assumptions.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.delta_k_over_k >= BANDWIDTH_WARNING {
            w.push(format!(
                "delta_k_over_k = {} is not small compared with 1",
                self.delta_k_over_k
            ));
        }
        if self.delta_theta > COLLIMATION_WARNING {
            w.push(format!(
                "delta_theta = {} exceeds the collimated-beam regime (waveguide-like)",
                self.delta_theta
            ));
        }
        w
    }

    /// Ωk³/4π².
    pub fn prefactor(&self) -> Quantity {
        e2(self.omega * self.k.powi(3) / (4.0 * PI * PI))
    }

    /// (Ωk³/4π²)·(Δk/k)·Δθ.
    pub fn static_prefactor(&self) -> Quantity {
        self.prefactor().scale(self.delta_k_over_k * self.delta_theta)
    }

    /// Time-independent part, static_prefactor·sinh²q.
    pub fn mean_level(&self) -> Quantity {
        self.static_prefactor().scale(self.q.sinh().powi(2))
    }

    /// Relative size of the oscillating term, coth q.
    pub fn modulation_ratio(&self) -> f64 {
        self.q.cosh() / self.q.sinh()
    }

    /// 2Ωt − 2ky − η.
    pub fn phase(&self, t: f64, y: f64) -> f64 {
        2.0 * self.omega * t - 2.0 * self.k * y - self.eta
    }

    /// Period in t of the ⟨:E²:⟩ oscillation, π/Ω.
    pub fn period(&self) -> f64 {
        PI / self.omega
    }

    pub fn e2(&self, t: f64, y: f64) -> Quantity {
        let (s, c) = (self.q.sinh(), self.q.cosh());
        self.static_prefactor().scale(s * (s + c * self.phase(t, y).cos()))
    }

    /// Extremes over t: −P·sinh q·e^{−q} and P·sinh q·e^{q}.
    pub fn e2_extrema(&self) -> (Quantity, Quantity) {
        let p = self.static_prefactor();
        let s = self.q.sinh();
        (p.scale(-s * (-self.q).exp()), p.scale(s * self.q.exp()))
    }
}

pub fn e2_squeezed_beam(b: &SqueezedBeam, t: f64, y: f64) -> Quantity {
    b.e2(t, y)
}

/// A single plane-wave mode along y with field operator
/// E⁰(a e^{iφ} + a† e^{−iφ}), φ = ky − Ωt.
pub trait SingleModeState {
    fn e2(&self, t: f64, y: f64) -> Quantity;
    fn mean_photon_number(&self) -> f64;
    /// Single-mode amplitude E⁰, µm⁻².
    fn amplitude(&self) -> f64;
    fn omega(&self) -> f64;

    /// 2(E⁰)²⟨n̂⟩.
    fn time_averaged_e2(&self) -> Quantity {
        e2(2.0 * self.amplitude().powi(2) * self.mean_photon_number())
    }

    /// Period of the instantaneous ⟨:E²:⟩ in t.
    fn period(&self) -> f64 {
        PI / self.omega()
    }
}

/// Single-mode amplitude ½√(ω/V) that ties the mode-sum normalization to the
/// single-mode formulas.
pub fn mode_amplitude(omega: f64, volume: f64) -> f64 {
    0.5 * (omega / volume).sqrt()
}

/// Coherent state |𝒵⟩ with real 𝒵.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentMode {
    pub z: f64,
    pub e0: f64,
    pub omega: f64,
    pub k: f64,
}

impl CoherentMode {
    pub fn phase(&self, t: f64, y: f64) -> f64 {
        self.k * y - self.omega * t
    }
}

impl SingleModeState for CoherentMode {
    /// (2𝒵E⁰cos φ)².
    fn e2(&self, t: f64, y: f64) -> Quantity {
        e2((2.0 * self.z * self.e0 * self.phase(t, y).cos()).powi(2))
    }

    fn mean_photon_number(&self) -> f64 {
        self.z * self.z
    }

    fn amplitude(&self) -> f64 {
        self.e0
    }

    fn omega(&self) -> f64 {
        self.omega
    }
}

pub fn e2_coherent(c: &CoherentMode, t: f64, y: f64) -> Quantity {
    c.e2(t, y)
}

/// Single-mode squeezed vacuum S(q e^{iη})|0⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedMode {
    pub q: f64,
    pub eta: f64,
    pub e0: f64,
    pub omega: f64,
    pub k: f64,
}

impl SqueezedMode {
    /// E⁰ = ½√(ω/V).
    pub fn in_volume(q: f64, eta: f64, omega: f64, k: f64, volume: f64) -> Self {
        SqueezedMode { q, eta, e0: mode_amplitude(omega, volume), omega, k }
    }
}

impl SingleModeState for SqueezedMode {
    /// (2E⁰)² sinh q [sinh q + cosh q cos(2φ + η)]; η = 0 is the usual
    /// real-ζ choice. This form averages to 4(E⁰)²⟨n̂⟩ over a period, twice
    /// the value returned by `time_averaged_e2`.
    fn e2(&self, t: f64, y: f64) -> Quantity {
        e2_single_mode_squeezed(self.q, self.eta, self.e0, t, y, self.omega, self.k)
    }

    fn mean_photon_number(&self) -> f64 {
        self.q.sinh().powi(2)
    }

    fn amplitude(&self) -> f64 {
        self.e0
    }

    fn omega(&self) -> f64 {
        self.omega
    }
}

pub fn e2_single_mode_squeezed(q: f64, eta: f64, e0: f64, t: f64, y: f64, omega: f64, k: f64) -> Quantity {
    let phi = k * y - omega * t;
    let (s, c) = (q.sinh(), q.cosh());
    e2((2.0 * e0).powi(2) * s * (s + c * (2.0 * phi + eta).cos()))
}

/// Mean photon number of a coherent state, 𝒵².
pub fn coherent_photon_number(z: f64) -> f64 {
    z * z
}

/// Mean photon number of a squeezed vacuum, sinh²q.
pub fn squeezed_photon_number(q: f64) -> f64 {
    q.sinh().powi(2)
}

/// Peak ⟨:E²:⟩ of a squeezed vacuum divided by the coherent-state peak at
/// the same mean photon number: sinh q·e^{q}/⟨n̂⟩ with sinh²q = ⟨n̂⟩.
/// Behaves as 1/√⟨n̂⟩ for small occupation and tends to 2 for large.
pub fn peak_ratio_small_n(n_mean: f64) -> Result<f64> {
    if !(n_mean.is_finite() && n_mean > 0.0) {
        return Err(out_of_range("n_mean", format!("{n_mean} must be positive")));
    }
    let s = n_mean.sqrt();
    let q = s.asinh();
    Ok(s * q.exp() / n_mean)
}

/// Time windows at fixed y where ⟨:E²:⟩ < 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SubvacuumReport {
    pub intervals: Vec<(f64, f64)>,
    /// Closed-form duty fraction arccos(tanh q)/π.
    pub duty_fraction: f64,
}

impl SubvacuumReport {
    /// Total length of the intervals divided by `horizon`.
    pub fn measured_fraction(&self, horizon: f64) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum::<f64>() / horizon
    }
}

/// Phase tolerance for the window endpoints.
pub const WINDOW_PHASE_TOLERANCE: f64 = 1e-12;

/// Locates the subvacuum windows in [0, horizon] by bisection on the sign of
/// [`SqueezedBeam::e2`]. Each window is bracketed between a maximum of the
/// oscillation (phase 2πm) and the following or preceding minimum.
pub fn subvacuum_windows(b: &SqueezedBeam, y: f64, horizon: f64) -> Result<SubvacuumReport> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(out_of_range("horizon", format!("{horizon} must be positive")));
    }
    if b.q == 0.0 {
        return Ok(SubvacuumReport { intervals: Vec::new(), duty_fraction: 0.0 });
    }
    let duty_fraction = b.q.tanh().acos() / PI;

    let rate = 2.0 * b.omega; // dphase/dt
    let phase0 = b.phase(0.0, y);
    let t_of = |phase: f64| (phase - phase0) / rate;
    let negative = |t: f64| b.e2(t, y).value() < 0.0;
    let dt_tol = WINDOW_PHASE_TOLERANCE / rate;

    // Bisect between a point inside (neg) and outside (pos) the window.
    let edge = |mut inside: f64, mut outside: f64| {
        while (outside - inside).abs() > dt_tol {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if negative(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };

    let first = ((phase0 - PI) / (2.0 * PI)).floor() as i64;
    let last = ((phase0 + rate * horizon - PI) / (2.0 * PI)).ceil() as i64;
    let mut intervals = Vec::new();
    for m in first..=last {
        let t_min = t_of(PI + 2.0 * PI * m as f64);
        if !negative(t_min) {
            continue;
        }
        let start = edge(t_min, t_of(2.0 * PI * m as f64));
        let end = edge(t_min, t_of(2.0 * PI * (m + 1) as f64));
        let (start, end) = (start.max(0.0), end.min(horizon));
        if start < end {
            intervals.push((start, end));
        }
    }
    Ok(SubvacuumReport { intervals, duty_fraction })
}
