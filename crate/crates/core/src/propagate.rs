//! One-dimensional probe-wave propagation through a medium whose phase
//! velocity is modulated by the fluctuating background,
//!
//! ```text
//! ∂²E/∂z² − (1/v_eff²) ∂²E/∂t² = 0,   v_eff = v₀/(1 + f(t, z)),
//! ```
//!
//! integrated with an explicit three-level leapfrog scheme on a periodic
//! grid, together with diagnostics for the local wavelength and the spatial
//! spectrum of the probe.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{finite, out_of_range, Error, Result};

/// Minimum number of grid points.
pub const MIN_POINTS: usize = 64;

/// Default relative peak threshold for [`spectrum`].
pub const DEFAULT_PEAK_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocityForm {
    /// v₀/(1 + f).
    #[default]
    Linear,
    /// v₀(1 + f)^(−1/2), the exact inverse square root of the bracketed
    /// coefficient when f collects the χ⁽³⁾⟨:E²:⟩ correction.
    Exact,
}

impl VelocityForm {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(VelocityForm::Linear),
            "exact" => Some(VelocityForm::Exact),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VelocityForm::Linear => "linear",
            VelocityForm::Exact => "exact",
        }
    }
}

pub fn effective_velocity(f: f64, v0: f64, form: VelocityForm) -> Result<f64> {
    let denom = 1.0 + f;
    if !(denom > 0.0) {
        return Err(out_of_range("f", format!("1 + f = {denom} must be positive")));
    }
    Ok(match form {
        VelocityForm::Linear => v0 / denom,
        VelocityForm::Exact => v0 / denom.sqrt(),
    })
}

/// f = 3v₀²χ⁽³⁾ₓₓₓₓ⟨:E²:⟩ in natural units (χ in µm⁴, ⟨:E²:⟩ in µm⁻⁴).
pub fn fluctuation_term(v0: f64, chi_xxxx: f64, e2: f64) -> f64 {
    3.0 * v0 * v0 * chi_xxxx * e2
}

/// f(t, z) = offset + A·sin(k_mod·z − ω_mod·t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationModel {
    pub amplitude: f64,
    pub k_mod: f64,
    pub omega_mod: f64,
    pub offset: f64,
}

impl ModulationModel {
    pub fn none() -> Self {
        ModulationModel { amplitude: 0.0, k_mod: 0.0, omega_mod: 0.0, offset: 0.0 }
    }

    pub fn constant(f0: f64) -> Self {
        ModulationModel { offset: f0, ..ModulationModel::none() }
    }

    pub fn sinusoidal(amplitude: f64, k_mod: f64, omega_mod: f64) -> Self {
        ModulationModel { amplitude, k_mod, omega_mod, offset: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("amplitude", self.amplitude),
            ("k_mod", self.k_mod),
            ("omega_mod", self.omega_mod),
            ("offset", self.offset),
        ] {
            finite(name, v)?;
        }
        if self.sup_abs() >= 1.0 {
            return Err(out_of_range(
                "modulation",
                format!("|offset| + |A| = {} must stay below 1", self.sup_abs()),
            ));
        }
        Ok(())
    }

    pub fn sup_abs(&self) -> f64 {
        self.offset.abs() + self.amplitude.abs()
    }

    #[inline]
    pub fn value(&self, t: f64, z: f64) -> f64 {
        self.offset + self.amplitude * (self.k_mod * z - self.omega_mod * t).sin()
    }

    /// Largest effective velocity reachable under this modulation.
    pub fn max_velocity(&self, v0: f64, form: VelocityForm) -> Result<f64> {
        effective_velocity(self.offset - self.amplitude.abs(), v0, form)
    }
}

/// Periodic grid z_i = i·L/N, i = 0..N, with the maximum time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeGrid {
    pub length: f64,
    pub points: usize,
    pub dt: f64,
    pub cfl: f64,
}

impl ProbeGrid {
    /// Grid with dt = cfl·(L/N)/v_max.
    pub fn new(length: f64, points: usize, cfl: f64, v_max: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(out_of_range("cfl", format!("{cfl} not in (0, 1)")));
        }
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(out_of_range("v_max", format!("{v_max} must be positive")));
        }
        let grid = ProbeGrid { length, points, dt: cfl * length / points as f64 / v_max, cfl };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < MIN_POINTS {
            return Err(out_of_range("points", format!("{} < {MIN_POINTS}", self.points)));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(out_of_range("length", format!("{} must be positive", self.length)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(out_of_range("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(out_of_range("cfl", format!("{} not in (0, 1)", self.cfl)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.z(i)).collect()
    }

    /// Checks v_max·dt/dz against the stored CFL number.
    pub fn check_cfl(&self, v_max: f64) -> Result<()> {
        let courant = v_max * self.dt / self.spacing();
        if courant > self.cfl * (1.0 + 1e-12) {
            return Err(Error::Cfl { courant, limit: self.cfl });
        }
        Ok(())
    }
}

/// Initial data E(0, z) and ∂E/∂t(0, z).
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// E = cos(kz), ∂E/∂t = k·speed·sin(kz): a cosine travelling right at
    /// `speed`.
    PlaneWave { wavenumber: f64, speed: f64 },
    Samples { field: Vec<f64>, rate: Vec<f64> },
}

impl InitialCondition {
    /// cos(10z) with ∂E/∂t = 10 sin(10z).
    pub fn cos10() -> Self {
        InitialCondition::PlaneWave { wavenumber: 10.0, speed: 1.0 }
    }

    fn sample(&self, grid: &ProbeGrid) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            InitialCondition::PlaneWave { wavenumber, speed } => {
                let cycles = wavenumber * grid.length / (2.0 * PI);
                if (cycles - cycles.round()).abs() > 1e-9 * cycles.abs().max(1.0) {
                    return Err(out_of_range(
                        "length",
                        format!("domain holds {cycles} wavelengths of the initial data, not an integer"),
                    ));
                }
                let z = grid.coordinates();
                Ok((
                    z.iter().map(|&z| (wavenumber * z).cos()).collect(),
                    z.iter().map(|&z| wavenumber * speed * (wavenumber * z).sin()).collect(),
                ))
            }
            InitialCondition::Samples { field, rate } => {
                if field.len() != grid.points || rate.len() != grid.points {
                    return Err(out_of_range("initial data", "length differs from grid points"));
                }
                Ok((field.clone(), rate.clone()))
            }
        }
    }
}

/// Two time levels of the probe field.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeField {
    pub previous: Vec<f64>,
    pub current: Vec<f64>,
    /// Time of `current`.
    pub t: f64,
}

/// Field and modulation sampled on the grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub z: Vec<f64>,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub length: f64,
}

impl Snapshot {
    /// Periodic linear interpolation of the modulation.
    pub fn f_at(&self, z: f64) -> f64 {
        interpolate(&self.f, self.length, z)
    }
}

fn interpolate(values: &[f64], length: f64, z: f64) -> f64 {
    let n = values.len();
    let h = length / n as f64;
    let s = z.rem_euclid(length) / h;
    let i = (s.floor() as usize).min(n - 1);
    let w = s - i as f64;
    values[i] * (1.0 - w) + values[(i + 1) % n] * w
}

/// Leapfrog integrator state.
#[derive(Debug, Clone)]
pub struct Solver {
    grid: ProbeGrid,
    model: ModulationModel,
    v0: f64,
    form: VelocityForm,
    dt: f64,
    field: ProbeField,
    z: Vec<f64>,
    scratch: Vec<f64>,
    steps: usize,
}

impl Solver {
    /// Validates the setup and takes the second-order starting step
    /// E¹ = E⁰ + dt·Ė⁰ + ½dt²·v²·∂²E⁰/∂z².
    pub fn new(
        grid: ProbeGrid,
        model: ModulationModel,
        v0: f64,
        form: VelocityForm,
        init: &InitialCondition,
    ) -> Result<Self> {
        Solver::with_dt(grid, model, v0, form, init, grid.dt)
    }

    fn with_dt(
        grid: ProbeGrid,
        model: ModulationModel,
        v0: f64,
        form: VelocityForm,
        init: &InitialCondition,
        dt: f64,
    ) -> Result<Self> {
        grid.validate()?;
        model.validate()?;
        if !(v0.is_finite() && v0 > 0.0) {
            return Err(out_of_range("v0", format!("{v0} must be positive")));
        }
        if model.amplitude != 0.0 {
            let cycles = model.k_mod * grid.length / (2.0 * PI);
            if (cycles - cycles.round()).abs() > 1e-9 * cycles.abs().max(1.0) {
                return Err(out_of_range(
                    "k_mod",
                    format!("domain holds {cycles} modulation wavelengths, not an integer"),
                ));
            }
        }
        if !(dt > 0.0 && dt <= grid.dt) {
            return Err(out_of_range("dt", format!("{dt} not in (0, {}]", grid.dt)));
        }
        let v_max = model.max_velocity(v0, form)?;
        ProbeGrid { dt, ..grid }.check_cfl(v_max)?;

        let (e0, rate) = init.sample(&grid)?;
        let z = grid.coordinates();
        let mut solver = Solver {
            grid,
            model,
            v0,
            form,
            dt,
            field: ProbeField { previous: e0.clone(), current: e0, t: 0.0 },
            z,
            scratch: vec![0.0; grid.points],
            steps: 0,
        };
        solver.start(&rate)?;
        Ok(solver)
    }

    fn velocity_squared(&self, t: f64, i: usize) -> f64 {
        let f = self.model.value(t, self.z[i]);
        let denom = 1.0 + f;
        match self.form {
            VelocityForm::Linear => self.v0 * self.v0 / (denom * denom),
            VelocityForm::Exact => self.v0 * self.v0 / denom,
        }
    }

    fn laplacian(values: &[f64], i: usize, inv_h2: f64) -> f64 {
        let n = values.len();
        let left = values[(i + n - 1) % n];
        let right = values[(i + 1) % n];
        (left - 2.0 * values[i] + right) * inv_h2
    }

    fn start(&mut self, rate: &[f64]) -> Result<()> {
        let h = self.grid.spacing();
        let inv_h2 = 1.0 / (h * h);
        let dt = self.dt;
        let e0 = &self.field.current;
        let next: Vec<f64> = (0..e0.len())
            .map(|i| {
                e0[i] + dt * rate[i] + 0.5 * dt * dt * self.velocity_squared(0.0, i) * Self::laplacian(e0, i, inv_h2)
            })
            .collect();
        self.field.previous = std::mem::replace(&mut self.field.current, next);
        self.field.t = dt;
        self.steps = 1;
        self.check_finite()
    }

    fn check_finite(&self) -> Result<()> {
        if self.field.current.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFiniteField { t: self.field.t })
        }
    }

    /// One leapfrog step E^{n+1} = 2Eⁿ − E^{n−1} + dt²·v²(tₙ, zᵢ)·δ²Eⁿ.
    pub fn step(&mut self) -> Result<()> {
        let h = self.grid.spacing();
        let inv_h2 = 1.0 / (h * h);
        let dt2 = self.dt * self.dt;
        let t = self.field.t;
        let n = self.grid.points;
        for i in 0..n {
            let lap = Self::laplacian(&self.field.current, i, inv_h2);
            self.scratch[i] =
                2.0 * self.field.current[i] - self.field.previous[i] + dt2 * self.velocity_squared(t, i) * lap;
        }
        std::mem::swap(&mut self.field.previous, &mut self.field.current);
        std::mem::swap(&mut self.field.current, &mut self.scratch);
        self.field.t = t + self.dt;
        self.steps += 1;
        self.check_finite()
    }

    /// Swaps the time levels and negates dt so that further steps integrate
    /// backwards in time.
    pub fn reverse(&mut self) {
        std::mem::swap(&mut self.field.previous, &mut self.field.current);
        self.field.t -= self.dt;
        self.dt = -self.dt;
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        self.field.t
    }

    /// Steps taken including the starting step.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn field(&self) -> &ProbeField {
        &self.field
    }

    pub fn grid(&self) -> &ProbeGrid {
        &self.grid
    }

    pub fn snapshot(&self) -> Snapshot {
        let t = self.field.t;
        Snapshot {
            t,
            z: self.z.clone(),
            e: self.field.current.clone(),
            f: self.z.iter().map(|&z| self.model.value(t, z)).collect(),
            length: self.grid.length,
        }
    }

    /// Discrete energy Σ[(δₜE)² + v²·δ₊Eⁿ·δ₊E^{n−1}]·Δz evaluated between
    /// the two stored levels; conserved by the scheme when v is constant.
    pub fn energy(&self) -> f64 {
        let h = self.grid.spacing();
        let n = self.grid.points;
        let (prev, cur) = (&self.field.previous, &self.field.current);
        let t_mid = self.field.t - 0.5 * self.dt;
        (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                let et = (cur[i] - prev[i]) / self.dt;
                let dz_cur = (cur[j] - cur[i]) / h;
                let dz_prev = (prev[j] - prev[i]) / h;
                et * et + self.velocity_squared(t_mid, i) * dz_cur * dz_prev
            })
            .sum::<f64>()
            * h
    }
}

/// Integrates to the largest requested time and returns a snapshot at each
/// requested time (t = 0 gives the initial data). dt is reduced from the
/// grid's maximum so that t_end is reached in a whole number of steps;
/// intermediate times are taken at the nearest step and reported exactly.
pub fn run(
    grid: &ProbeGrid,
    model: &ModulationModel,
    v0: f64,
    form: VelocityForm,
    init: &InitialCondition,
    times: &[f64],
) -> Result<Vec<Snapshot>> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(out_of_range("times", "snapshot times must be finite and non-negative"));
    }
    let t_end = times.iter().cloned().fold(0.0, f64::max);
    let n_steps = if t_end > 0.0 { (t_end / grid.dt).ceil().max(1.0) as usize } else { 1 };
    let dt = if t_end > 0.0 { t_end / n_steps as f64 } else { grid.dt };

    let initial = {
        let (e, _) = init.sample(grid)?;
        let z = grid.coordinates();
        let f = z.iter().map(|&z| model.value(0.0, z)).collect();
        Snapshot { t: 0.0, z, e, f, length: grid.length }
    };
    let mut solver = Solver::with_dt(*grid, *model, v0, form, init, dt)?;

    let mut order: Vec<(usize, usize)> = times
        .iter()
        .enumerate()
        .map(|(idx, &t)| (idx, ((t / dt).round() as usize).min(n_steps)))
        .collect();
    order.sort_by_key(|&(_, step)| step);

    let mut out: Vec<Option<Snapshot>> = vec![None; times.len()];
    for (idx, step) in order {
        if step == 0 {
            out[idx] = Some(initial.clone());
            continue;
        }
        while solver.steps() < step {
            solver.step()?;
        }
        let mut snap = solver.snapshot();
        snap.t = step as f64 * dt;
        out[idx] = Some(snap);
    }
    Ok(out.into_iter().map(|s| s.expect("every time visited")).collect())
}

/// RMS difference between a snapshot and the exact f ≡ 0, v = v₀
/// translation cos(k(z − v₀t)).
pub fn plane_wave_error(snap: &Snapshot, wavenumber: f64, speed: f64) -> f64 {
    let sum: f64 = snap
        .z
        .iter()
        .zip(&snap.e)
        .map(|(&z, &e)| (e - (wavenumber * (z - speed * snap.t)).cos()).powi(2))
        .sum();
    (sum / snap.e.len() as f64).sqrt()
}

/// Phase φ of the best fit A·cos(kz − φ), in (−π, π].
pub fn plane_wave_phase(snap: &Snapshot, wavenumber: f64) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for (&z, &e) in snap.z.iter().zip(&snap.e) {
        s += e * (wavenumber * z).sin();
        c += e * (wavenumber * z).cos();
    }
    s.atan2(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthSample {
    /// Midpoint between two adjacent zero crossings.
    pub z: f64,
    /// Twice the crossing spacing.
    pub wavelength: f64,
}

/// Local wavelength from the spacing of adjacent zero crossings (located by
/// linear interpolation, with periodic wrap-around).
pub fn local_wavelength(snap: &Snapshot) -> Result<Vec<WavelengthSample>> {
    let n = snap.e.len();
    let h = snap.length / n as f64;
    let mut crossings = Vec::new();
    for i in 0..n {
        let a = snap.e[i];
        let b = snap.e[(i + 1) % n];
        if a == 0.0 {
            crossings.push(snap.z[i]);
        } else if a * b < 0.0 {
            crossings.push(snap.z[i] + h * a / (a - b));
        }
    }
    if crossings.len() < 4 {
        return Err(Error::TooFewCrossings { found: crossings.len() });
    }
    let m = crossings.len();
    Ok((0..m)
        .map(|i| {
            let a = crossings[i];
            let b = if i + 1 < m { crossings[i + 1] } else { crossings[0] + snap.length };
            WavelengthSample { z: (0.5 * (a + b)).rem_euclid(snap.length), wavelength: 2.0 * (b - a) }
        })
        .collect())
}

/// Wavelength a wave of fixed angular frequency ω has at phase velocity v.
pub fn fixed_frequency_wavelength(velocity: f64, omega: f64) -> f64 {
    2.0 * PI * velocity / omega
}

/// Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Correlation of the local wavelength with f at the same positions.
pub fn wavelength_modulation_correlation(snap: &Snapshot) -> Result<f64> {
    let samples = local_wavelength(snap)?;
    let lambda: Vec<f64> = samples.iter().map(|s| s.wavelength).collect();
    let f: Vec<f64> = samples.iter().map(|s| snap.f_at(s.z)).collect();
    Ok(pearson(&lambda, &f))
}

/// One-sided amplitude spectrum of a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Amplitude per mode index m = 0..=N/2; mode m has wavenumber 2πm/L.
    pub magnitudes: Vec<f64>,
    pub carrier: usize,
    pub threshold: f64,
    /// Local maxima above threshold × carrier magnitude.
    pub peaks: Vec<usize>,
}

impl Spectrum {
    /// Magnitude at `mode` relative to the carrier.
    pub fn relative(&self, mode: usize) -> f64 {
        self.magnitudes.get(mode).copied().unwrap_or(0.0) / self.magnitudes[self.carrier]
    }

    /// Relative magnitudes at carrier − offset and carrier + offset.
    pub fn sidebands(&self, offset: usize) -> (f64, f64) {
        let lower = self.carrier.checked_sub(offset).map_or(0.0, |m| self.relative(m));
        (lower, self.relative(self.carrier + offset))
    }

    /// Both sidebands at ±offset reach the threshold.
    pub fn has_sidebands(&self, offset: usize) -> bool {
        let (lo, hi) = self.sidebands(offset);
        lo >= self.threshold && hi >= self.threshold
    }
}

/// Amplitude spectrum with the strongest mode as carrier.
pub fn spectrum(snap: &Snapshot) -> Spectrum {
    let magnitudes = amplitude_spectrum(&snap.e);
    let carrier = magnitudes
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, f64::MIN), |best, (i, &m)| if m > best.1 { (i, m) } else { best })
        .0;
    build_spectrum(magnitudes, carrier, DEFAULT_PEAK_THRESHOLD)
}

/// Amplitude spectrum with an explicit carrier mode and threshold.
pub fn spectrum_with_carrier(snap: &Snapshot, carrier: usize, threshold: f64) -> Spectrum {
    build_spectrum(amplitude_spectrum(&snap.e), carrier, threshold)
}

fn build_spectrum(magnitudes: Vec<f64>, carrier: usize, threshold: f64) -> Spectrum {
    let floor = threshold * magnitudes.get(carrier).copied().unwrap_or(0.0);
    let peaks = (1..magnitudes.len())
        .filter(|&i| {
            let m = magnitudes[i];
            let left = magnitudes[i - 1];
            let right = magnitudes.get(i + 1).copied().unwrap_or(0.0);
            m > left && m > right && m >= floor
        })
        .collect();
    Spectrum { magnitudes, carrier, threshold, peaks }
}

/// |X_m|·2/N for 0 < m < N/2 (|X_0|/N and |X_{N/2}|/N at the ends), so a
/// unit cosine on a commensurate grid has magnitude 1.
fn amplitude_spectrum(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    (0..=n / 2)
        .map(|m| {
            let scale = if m == 0 || 2 * m == n { 1.0 } else { 2.0 };
            scale * buf[m].norm() / n as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(points: usize, model: &ModulationModel) -> ProbeGrid {
        let v_max = model.max_velocity(1.0, VelocityForm::Linear).unwrap();
        ProbeGrid::new(2.0 * PI, points, 0.5, v_max).unwrap()
    }

    #[test]
    fn velocity_examples() {
        assert_eq!(effective_velocity(0.0, 1.0, VelocityForm::Linear).unwrap(), 1.0);
        assert_eq!(effective_velocity(0.0, 0.7, VelocityForm::Exact).unwrap(), 0.7);
        assert_relative_eq!(
            effective_velocity(-0.25, 1.0, VelocityForm::Linear).unwrap(),
            1.3333,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            effective_velocity(-0.25, 1.0, VelocityForm::Exact).unwrap(),
            1.1547,
            max_relative = 1e-4
        );
        assert!(effective_velocity(-1.0, 1.0, VelocityForm::Linear).is_err());
        assert!(effective_velocity(-1.5, 1.0, VelocityForm::Exact).is_err());
    }

    #[test]
    fn modulation_must_keep_velocity_positive() {
        assert!(ModulationModel::sinusoidal(-0.25, 1.0, 1.0).validate().is_ok());
        assert!(ModulationModel::sinusoidal(1.0, 1.0, 1.0).validate().is_err());
        let m = ModulationModel { offset: 0.6, ..ModulationModel::sinusoidal(0.5, 1.0, 1.0) };
        assert!(m.validate().is_err());
    }

    #[test]
    fn grid_invariants() {
        assert!(ProbeGrid::new(2.0 * PI, 32, 0.5, 1.0).is_err());
        assert!(ProbeGrid::new(2.0 * PI, 128, 1.0, 1.0).is_err());
        let g = ProbeGrid::new(2.0 * PI, 128, 0.5, 2.0).unwrap();
        assert!(g.check_cfl(2.0).is_ok());
        assert!(matches!(g.check_cfl(4.0), Err(Error::Cfl { .. })));
    }

    #[test]
    fn cfl_violation_aborts() {
        let model = ModulationModel::sinusoidal(-0.25, 1.0, 1.0);
        // dt sized for v = 1 while v reaches 4/3.
        let g = ProbeGrid::new(2.0 * PI, 128, 0.9, 1.0).unwrap();
        let err = Solver::new(g, model, 1.0, VelocityForm::Linear, &InitialCondition::cos10()).unwrap_err();
        assert!(matches!(err, Error::Cfl { .. }));
    }

    #[test]
    fn incommensurate_domain_rejected() {
        let model = ModulationModel::none();
        let g = ProbeGrid::new(5.0, 128, 0.5, 1.0).unwrap();
        assert!(Solver::new(g, model, 1.0, VelocityForm::Linear, &InitialCondition::cos10()).is_err());
    }

    #[test]
    fn initial_snapshot_echoes_initial_data() {
        let model = ModulationModel::sinusoidal(-0.25, 1.0, 0.5);
        let g = grid(256, &model);
        let snaps = run(&g, &model, 1.0, VelocityForm::Linear, &InitialCondition::cos10(), &[0.0, 0.1]).unwrap();
        for (z, e) in snaps[0].z.iter().zip(&snaps[0].e) {
            assert_eq!(*e, (10.0 * z).cos());
        }
        assert_relative_eq!(snaps[1].t, 0.1, max_relative = 1e-14);
    }

    #[test]
    fn plane_wave_after_one_period() {
        let model = ModulationModel::none();
        let g = grid(1024, &model);
        let period = 2.0 * PI / 10.0;
        let snaps = run(&g, &model, 1.0, VelocityForm::Linear, &InitialCondition::cos10(), &[period]).unwrap();
        let err = plane_wave_error(&snaps[0], 10.0, 1.0);
        assert!(err < 1e-3, "L2 error {err}");
    }

    #[test]
    fn local_wavelength_of_pure_cosine() {
        let g = ProbeGrid::new(2.0 * PI, 512, 0.5, 1.0).unwrap();
        let z = g.coordinates();
        let snap = Snapshot {
            t: 0.0,
            e: z.iter().map(|z| (10.0 * z).cos()).collect(),
            f: vec![0.0; z.len()],
            z,
            length: g.length,
        };
        let samples = local_wavelength(&snap).unwrap();
        assert_eq!(samples.len(), 20);
        for s in samples {
            assert!((s.wavelength - 2.0 * PI / 10.0).abs() < g.spacing());
        }
    }

    #[test]
    fn too_few_crossings() {
        let z: Vec<f64> = (0..64).map(|i| i as f64 * 0.1).collect();
        let snap = Snapshot { t: 0.0, e: z.iter().map(|z| (z * 0.5).cos()).collect(), f: vec![0.0; 64], z, length: 6.4 };
        assert!(matches!(local_wavelength(&snap), Err(Error::TooFewCrossings { .. })));
    }

    #[test]
    fn spectrum_of_pure_cosine() {
        let g = ProbeGrid::new(2.0 * PI, 256, 0.5, 1.0).unwrap();
        let z = g.coordinates();
        let snap = Snapshot {
            t: 0.0,
            e: z.iter().map(|z| (10.0 * z).cos()).collect(),
            f: vec![0.0; z.len()],
            z,
            length: g.length,
        };
        let s = spectrum(&snap);
        assert_eq!(s.carrier, 10);
        assert_eq!(s.peaks, vec![10]);
        assert_relative_eq!(s.magnitudes[10], 1.0, max_relative = 1e-12);
        assert!(!s.has_sidebands(1));
    }

    #[test]
    fn pearson_signs() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(pearson(&a, &[2.0, 4.0, 6.0, 8.0]), 1.0);
        assert_relative_eq!(pearson(&a, &[8.0, 6.0, 4.0, 2.0]), -1.0);
    }

    #[test]
    fn reversal_returns_to_start() {
        let model = ModulationModel::none();
        let g = grid(256, &model);
        let init = InitialCondition::cos10();
        let mut s = Solver::new(g, model, 1.0, VelocityForm::Linear, &init).unwrap();
        let e0 = s.field().previous.clone();
        for _ in 0..200 {
            s.step().unwrap();
        }
        let forward_steps = s.steps();
        s.reverse();
        for _ in 0..forward_steps - 1 {
            s.step().unwrap();
        }
        assert!(s.time().abs() < 1e-12);
        let diff = e0.iter().zip(&s.field().current).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "max deviation {diff}");
    }
}
