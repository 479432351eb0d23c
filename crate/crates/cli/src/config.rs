//! INI-style scenario files.
//!
//! ```text
//! name = cdgeas2-squeezed
//! outputs = csv json
//!
//! [material]
//! preset = cdgeas2
//! coefficient = 3.39e-9 um4
//!
//! [state]
//! kind = squeezed_beam
//! wavelength = 10.6 um
//! medium_index = 3.5
//! q = 1.5
//! delta_k_over_k = 1e-2
//! delta_theta = 1e-2
//!
//! [sweep]
//! axis = t
//! start = 0
//! stop = 2 periods
//! points = 401
//! ```
//!
//! Lengths, times and wavenumbers are natural (µm, µm⁻¹) unless suffixed.
//! Every problem in a file is reported, not just the first.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use fluctoptics::ambient::{CasimirPlate, ThermalSource};
use fluctoptics::media::{quantum_coefficient, Material};
use fluctoptics::propagate::{InitialCondition, ModulationModel, ProbeGrid, Solver, VelocityForm};
use fluctoptics::qstates::{mode_amplitude, CoherentMode, Mode, ModeSet, SqueezedBeam, SqueezedMode};
use fluctoptics::units::{db_to_squeeze_parameter, ConversionConstants, Quantity, Unit};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialSource {
    Preset(String),
    Inline(Box<Material>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSpec {
    pub source: MaterialSource,
    /// Override for the birefringence coefficient, µm⁴.
    pub coefficient: Option<f64>,
}

impl MaterialSpec {
    pub fn material(&self) -> Material {
        match &self.source {
            MaterialSource::Preset(name) => material_preset(name).expect("validated preset name"),
            MaterialSource::Inline(m) => (**m).clone(),
        }
    }

    pub fn computed_coefficient(&self) -> Quantity {
        quantum_coefficient(&self.material())
    }

    /// The override when present, otherwise the value computed from χ⁽³⁾.
    pub fn coefficient(&self) -> Quantity {
        self.coefficient.map_or_else(|| self.computed_coefficient(), |c| Quantity::microns(c, 4))
    }
}

pub fn material_preset(name: &str) -> Option<Material> {
    match name {
        "cdgeas2" => Some(Material::cdgeas2()),
        _ => None,
    }
}

/// How the single-mode amplitude E⁰ is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitude {
    /// E⁰ = ½√(ω/V).
    Volume(f64),
    Explicit(f64),
}

impl Amplitude {
    pub fn e0(self, omega: f64) -> f64 {
        match self {
            Amplitude::Volume(v) => mode_amplitude(omega, v),
            Amplitude::Explicit(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    SqueezedBeam {
        wavelength: f64,
        medium_index: f64,
        q: f64,
        eta: f64,
        delta_k_over_k: f64,
        delta_theta: f64,
    },
    ModeSet {
        volume: f64,
        modes: Vec<Mode>,
    },
    Coherent {
        amplitude: f64,
        omega: f64,
        k: f64,
        e0: Amplitude,
    },
    SingleSqueezed {
        q: f64,
        eta: f64,
        omega: f64,
        k: f64,
        e0: Amplitude,
    },
    Thermal {
        temperature: Option<f64>,
    },
    Casimir {
        z: Option<f64>,
        plasma_wavelength: Option<f64>,
    },
    /// The modulation is given directly in `[solver]`.
    Prescribed,
}

impl State {
    pub fn kind(&self) -> &'static str {
        match self {
            State::SqueezedBeam { .. } => "squeezed_beam",
            State::ModeSet { .. } => "mode_set",
            State::Coherent { .. } => "coherent",
            State::SingleSqueezed { .. } => "single_squeezed",
            State::Thermal { .. } => "thermal",
            State::Casimir { .. } => "casimir",
            State::Prescribed => "prescribed",
        }
    }

    pub fn beam(&self) -> Option<fluctoptics::Result<SqueezedBeam>> {
        match *self {
            State::SqueezedBeam { wavelength, medium_index, q, eta, delta_k_over_k, delta_theta } => {
                Some(SqueezedBeam::in_medium(wavelength, medium_index, q, eta, delta_k_over_k, delta_theta))
            }
            _ => None,
        }
    }

    pub fn coherent(&self) -> Option<CoherentMode> {
        match *self {
            State::Coherent { amplitude, omega, k, e0 } => {
                Some(CoherentMode { z: amplitude, e0: e0.e0(omega), omega, k })
            }
            _ => None,
        }
    }

    pub fn single_squeezed(&self) -> Option<SqueezedMode> {
        match *self {
            State::SingleSqueezed { q, eta, omega, k, e0 } => {
                Some(SqueezedMode { q, eta, e0: e0.e0(omega), omega, k })
            }
            _ => None,
        }
    }

    /// Period in t of the state's ⟨:E²:⟩ oscillation, if it has one.
    pub fn period(&self) -> Option<f64> {
        match self {
            State::SqueezedBeam { .. } => self.beam().and_then(|b| b.ok()).map(|b| b.period()),
            State::Coherent { omega, .. } | State::SingleSqueezed { omega, .. } => Some(PI / omega),
            State::ModeSet { modes, .. } => modes.first().map(|m| PI / m.omega),
            _ => None,
        }
    }

    fn default_axis(&self) -> SweepAxis {
        match self {
            State::Thermal { .. } => SweepAxis::Temperature,
            State::Casimir { .. } => SweepAxis::Distance,
            _ => SweepAxis::Time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Time,
    Y,
    Temperature,
    Distance,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Time => "t",
            SweepAxis::Y => "y",
            SweepAxis::Temperature => "T",
            SweepAxis::Distance => "z",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "t" => Some(SweepAxis::Time),
            "y" => Some(SweepAxis::Y),
            "T" => Some(SweepAxis::Temperature),
            "z" => Some(SweepAxis::Distance),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValues {
    Range { start: f64, stop: f64, points: usize, log: bool },
    List(Vec<f64>),
}

impl SweepValues {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SweepValues::List(v) => v.clone(),
            SweepValues::Range { start, stop, points, log } => {
                let n = *points;
                if n == 1 {
                    return vec![*start];
                }
                (0..n)
                    .map(|i| {
                        let s = i as f64 / (n - 1) as f64;
                        if i == n - 1 {
                            *stop
                        } else if *log {
                            (start.ln() + s * (stop.ln() - start.ln())).exp()
                        } else {
                            start + s * (stop - start)
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Swept coordinate (natural units, or K for temperature) plus the fixed
/// position or time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: SweepValues,
    pub at_t: f64,
    pub at_y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub length: f64,
    pub points: usize,
    pub cfl: f64,
    pub v0: f64,
    pub form: VelocityForm,
    pub amplitude: f64,
    pub k_mod: f64,
    pub omega_mod: f64,
    pub offset: f64,
    pub wavenumber: f64,
    pub t_end: f64,
    /// Equally spaced snapshot count including t = 0 and t_end.
    pub snapshots: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            length: 2.0 * PI,
            points: 1024,
            cfl: 0.5,
            v0: 1.0,
            form: VelocityForm::Linear,
            amplitude: -0.25,
            k_mod: 1.0,
            omega_mod: 0.5,
            offset: 0.0,
            wavenumber: 10.0,
            t_end: 2.0 * PI,
            snapshots: 3,
        }
    }
}

impl SolverSpec {
    pub fn model(&self) -> ModulationModel {
        ModulationModel {
            amplitude: self.amplitude,
            k_mod: self.k_mod,
            omega_mod: self.omega_mod,
            offset: self.offset,
        }
    }

    pub fn grid(&self) -> fluctoptics::Result<ProbeGrid> {
        let model = self.model();
        model.validate()?;
        ProbeGrid::new(self.length, self.points, self.cfl, model.max_velocity(self.v0, self.form)?)
    }

    /// Right-moving cos(kz) at speed v₀.
    pub fn initial_condition(&self) -> InitialCondition {
        InitialCondition::PlaneWave { wavenumber: self.wavenumber, speed: self.v0 }
    }

    pub fn times(&self) -> Vec<f64> {
        if self.snapshots == 1 {
            return vec![self.t_end];
        }
        (0..self.snapshots)
            .map(|i| if i + 1 == self.snapshots { self.t_end } else { self.t_end * i as f64 / (self.snapshots - 1) as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub outputs: Vec<Format>,
    pub material: Option<MaterialSpec>,
    pub state: State,
    pub sweep: Option<Sweep>,
    pub solver: Option<SolverSpec>,
}

impl Scenario {
    /// The sweep, or a single point at the state's fixed coordinates.
    pub fn effective_sweep(&self) -> Sweep {
        if let Some(s) = &self.sweep {
            return s.clone();
        }
        let axis = self.state.default_axis();
        let at = match (&self.state, axis) {
            (State::Thermal { temperature }, _) => temperature.unwrap_or(0.0),
            (State::Casimir { z, .. }, _) => z.unwrap_or(1.0),
            _ => 0.0,
        };
        Sweep { axis, values: SweepValues::List(vec![at]), at_t: 0.0, at_y: 0.0 }
    }

    /// Canonical text that parses back to an equal scenario.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let w = &mut s;
        writeln!(w, "name = {}", self.name).unwrap();
        let outs: Vec<&str> = self.outputs.iter().map(|f| if *f == Format::Csv { "csv" } else { "json" }).collect();
        writeln!(w, "outputs = {}", outs.join(" ")).unwrap();

        if let Some(m) = &self.material {
            writeln!(w, "\n[material]").unwrap();
            match &m.source {
                MaterialSource::Preset(name) => writeln!(w, "preset = {name}").unwrap(),
                MaterialSource::Inline(mat) => w.push_str(&mat.to_kv_string()),
            }
            if let Some(c) = m.coefficient {
                writeln!(w, "coefficient = {c:e} um4").unwrap();
            }
        }

        writeln!(w, "\n[state]\nkind = {}", self.state.kind()).unwrap();
        let amp = |w: &mut String, e0: &Amplitude| match e0 {
            Amplitude::Volume(v) => writeln!(w, "volume = {v:e}").unwrap(),
            Amplitude::Explicit(e) => writeln!(w, "e0 = {e:e}").unwrap(),
        };
        match &self.state {
            State::SqueezedBeam { wavelength, medium_index, q, eta, delta_k_over_k, delta_theta } => {
                writeln!(w, "wavelength = {wavelength:e} um").unwrap();
                writeln!(w, "medium_index = {medium_index:e}").unwrap();
                writeln!(w, "q = {q:e}").unwrap();
                writeln!(w, "eta = {eta:e}").unwrap();
                writeln!(w, "delta_k_over_k = {delta_k_over_k:e}").unwrap();
                writeln!(w, "delta_theta = {delta_theta:e}").unwrap();
            }
            State::ModeSet { volume, modes } => {
                writeln!(w, "volume = {volume:e}").unwrap();
                for m in modes {
                    writeln!(
                        w,
                        "mode = {:e} {:e} {:e} {:e} {:e} {:e}",
                        m.k[0], m.k[1], m.k[2], m.omega, m.q, m.eta
                    )
                    .unwrap();
                }
            }
            State::Coherent { amplitude, omega, k, e0 } => {
                writeln!(w, "amplitude = {amplitude:e}").unwrap();
                writeln!(w, "omega = {omega:e} um-1").unwrap();
                writeln!(w, "k = {k:e} um-1").unwrap();
                amp(w, e0);
            }
            State::SingleSqueezed { q, eta, omega, k, e0 } => {
                writeln!(w, "q = {q:e}").unwrap();
                writeln!(w, "eta = {eta:e}").unwrap();
                writeln!(w, "omega = {omega:e} um-1").unwrap();
                writeln!(w, "k = {k:e} um-1").unwrap();
                amp(w, e0);
            }
            State::Thermal { temperature } => {
                if let Some(t) = temperature {
                    writeln!(w, "temperature = {t:e} K").unwrap();
                }
            }
            State::Casimir { z, plasma_wavelength } => {
                if let Some(z) = z {
                    writeln!(w, "z = {z:e} um").unwrap();
                }
                if let Some(lp) = plasma_wavelength {
                    writeln!(w, "plasma_wavelength = {lp:e} um").unwrap();
                }
            }
            State::Prescribed => {}
        }

        if let Some(sw) = &self.sweep {
            writeln!(w, "\n[sweep]\naxis = {}", sw.axis.name()).unwrap();
            match &sw.values {
                SweepValues::Range { start, stop, points, log } => {
                    writeln!(w, "start = {start:e}").unwrap();
                    writeln!(w, "stop = {stop:e}").unwrap();
                    writeln!(w, "points = {points}").unwrap();
                    writeln!(w, "spacing = {}", if *log { "log" } else { "linear" }).unwrap();
                }
                SweepValues::List(v) => {
                    let items: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
                    writeln!(w, "values = {}", items.join(" ")).unwrap();
                }
            }
            writeln!(w, "t = {:e}", sw.at_t).unwrap();
            writeln!(w, "y = {:e}", sw.at_y).unwrap();
        }

        if let Some(p) = &self.solver {
            writeln!(w, "\n[solver]").unwrap();
            writeln!(w, "length = {:e}", p.length).unwrap();
            writeln!(w, "points = {}", p.points).unwrap();
            writeln!(w, "cfl = {:e}", p.cfl).unwrap();
            writeln!(w, "v0 = {:e}", p.v0).unwrap();
            writeln!(w, "form = {}", p.form.name()).unwrap();
            writeln!(w, "amplitude = {:e}", p.amplitude).unwrap();
            writeln!(w, "k_mod = {:e}", p.k_mod).unwrap();
            writeln!(w, "omega_mod = {:e}", p.omega_mod).unwrap();
            writeln!(w, "offset = {:e}", p.offset).unwrap();
            writeln!(w, "wavenumber = {:e}", p.wavenumber).unwrap();
            writeln!(w, "t_end = {:e}", p.t_end).unwrap();
            writeln!(w, "snapshots = {}", p.snapshots).unwrap();
        }
        s
    }
}

type Entry = (usize, String, String);

#[derive(Default)]
struct Sections {
    top: Vec<Entry>,
    material: Option<Vec<Entry>>,
    state: Option<Vec<Entry>>,
    sweep: Option<Vec<Entry>>,
    solver: Option<Vec<Entry>>,
}

struct Parser {
    issues: Vec<ConfigIssue>,
}

impl Parser {
    fn issue(&mut self, line: Option<usize>, message: impl Into<String>) {
        self.issues.push(ConfigIssue { line, message: message.into() });
    }

    fn split(&mut self, text: &str) -> Sections {
        let mut sections = Sections::default();
        let mut current: Option<&'static str> = None;
        for (idx, raw) in text.lines().enumerate() {
            let n = idx + 1;
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let slot = match name.trim() {
                    "material" => &mut sections.material,
                    "state" => &mut sections.state,
                    "sweep" => &mut sections.sweep,
                    "solver" => &mut sections.solver,
                    other => {
                        self.issue(Some(n), format!("unknown section [{other}]"));
                        current = Some("ignored");
                        continue;
                    }
                };
                if slot.is_some() {
                    self.issue(Some(n), format!("duplicate [{}] section", name.trim()));
                }
                *slot = Some(Vec::new());
                current = Some(match name.trim() {
                    "material" => "material",
                    "state" => "state",
                    "sweep" => "sweep",
                    _ => "solver",
                });
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                self.issue(Some(n), format!("expected `key = value`, found `{line}`"));
                continue;
            };
            let entry = (n, key.trim().to_string(), value.trim().to_string());
            let target = match current {
                None => Some(&mut sections.top),
                Some("material") => sections.material.as_mut(),
                Some("state") => sections.state.as_mut(),
                Some("sweep") => sections.sweep.as_mut(),
                Some("solver") => sections.solver.as_mut(),
                _ => None,
            };
            if let Some(t) = target {
                t.push(entry);
            }
        }
        sections
    }

    fn number(&mut self, e: &Entry) -> Option<(f64, Option<String>)> {
        let mut parts = e.2.split_whitespace();
        let Some(first) = parts.next() else {
            self.issue(Some(e.0), format!("{} has no value", e.1));
            return None;
        };
        match first.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                let rest: Vec<&str> = parts.collect();
                Some((v, (!rest.is_empty()).then(|| rest.join(" "))))
            }
            _ => {
                self.issue(Some(e.0), format!("{}: `{first}` is not a finite number", e.1));
                None
            }
        }
    }

    fn plain(&mut self, e: &Entry) -> Option<f64> {
        let (v, unit) = self.number(e)?;
        if let Some(u) = unit {
            self.issue(Some(e.0), format!("{}: unexpected unit `{u}`", e.1));
            return None;
        }
        Some(v)
    }

    fn integer(&mut self, e: &Entry) -> Option<usize> {
        match e.2.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.issue(Some(e.0), format!("{}: `{}` is not a non-negative integer", e.1, e.2));
                None
            }
        }
    }

    /// µm by default; `m` and `nm` are converted.
    fn length(&mut self, e: &Entry) -> Option<f64> {
        let (v, unit) = self.number(e)?;
        match unit.as_deref() {
            None | Some("um") => Some(v),
            Some("m") => Some(v * 1e6),
            Some("nm") => Some(v * 1e-3),
            Some(u) => {
                self.issue(Some(e.0), format!("{}: unknown length unit `{u}`", e.1));
                None
            }
        }
    }

    fn wavenumber(&mut self, e: &Entry) -> Option<f64> {
        let (v, unit) = self.number(e)?;
        match unit.as_deref() {
            None | Some("um-1") | Some("um^-1") => Some(v),
            Some(u) => {
                self.issue(Some(e.0), format!("{}: unknown wavenumber unit `{u}`", e.1));
                None
            }
        }
    }

    fn temperature(&mut self, e: &Entry) -> Option<f64> {
        let (v, unit) = self.number(e)?;
        match unit.as_deref() {
            None | Some("K") => Some(v),
            Some("um-1") | Some("um^-1") => Some(v / ConversionConstants::default().temperature_factor()),
            Some(u) => {
                self.issue(Some(e.0), format!("{}: unknown temperature unit `{u}`", e.1));
                None
            }
        }
    }

    fn coefficient(&mut self, e: &Entry) -> Option<f64> {
        let (v, unit) = self.number(e)?;
        let unit_text = unit.unwrap_or_default();
        match Unit::parse(&unit_text) {
            Some(Unit::Micron(4)) => Some(v),
            Some(Unit::SquareMetrePerSquareVolt) => {
                Some(ConversionConstants::default().to_natural(Quantity::new(v, Unit::SquareMetrePerSquareVolt)).ok()?.value())
            }
            _ => {
                self.issue(Some(e.0), format!("{}: needs a unit of um4 or m2V-2, found `{unit_text}`", e.1));
                None
            }
        }
    }

    fn check_unique(&mut self, entries: &[Entry], repeatable: &[&str]) {
        let mut seen = HashSet::new();
        for (n, k, _) in entries {
            if !repeatable.contains(&k.as_str()) && !seen.insert(k.clone()) {
                self.issue(Some(*n), format!("duplicate key `{k}`"));
            }
        }
    }

    fn unknown(&mut self, entries: &[Entry], allowed: &[&str], section: &str) {
        for (n, k, _) in entries {
            if !allowed.contains(&k.as_str()) {
                self.issue(Some(*n), format!("unknown key `{k}` in {section}"));
            }
        }
    }
}

fn find<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().find(|e| e.1 == key)
}

const MATERIAL_KEYS: [&str; 5] = ["name", "note", "n0", "validity", "preset"];

fn is_tensor_key(k: &str) -> bool {
    k.starts_with("chi1.") || k.starts_with("chi2.") || k.starts_with("chi3.")
}

/// Parses and validates a scenario, collecting every problem.
pub fn parse_config(text: &str) -> Result<Scenario, Vec<ConfigIssue>> {
    let mut p = Parser { issues: Vec::new() };
    let sections = p.split(text);

    p.check_unique(&sections.top, &[]);
    p.unknown(&sections.top, &["name", "outputs"], "the top level");
    let name = find(&sections.top, "name").map_or_else(|| "scenario".to_string(), |e| e.2.clone());
    if name.is_empty() || name.contains(['/', '\\']) || name.chars().any(char::is_whitespace) {
        p.issue(find(&sections.top, "name").map(|e| e.0), format!("invalid scenario name `{name}`"));
    }
    let mut outputs = Vec::new();
    if let Some(e) = find(&sections.top, "outputs") {
        for word in e.2.split_whitespace() {
            let fmts: &[Format] = match word {
                "csv" => &[Format::Csv],
                "json" => &[Format::Json],
                "both" => &[Format::Csv, Format::Json],
                other => {
                    p.issue(Some(e.0), format!("unknown output format `{other}`"));
                    &[]
                }
            };
            for f in fmts {
                if !outputs.contains(f) {
                    outputs.push(*f);
                }
            }
        }
    }
    if outputs.is_empty() {
        outputs.push(Format::Csv);
    }

    let material = sections.material.as_deref().map(|m| parse_material(&mut p, m));
    let state = match sections.state.as_deref() {
        Some(entries) => parse_state(&mut p, entries),
        None => {
            p.issue(None, "missing [state] section");
            None
        }
    };
    let solver = sections.solver.as_deref().map(|s| parse_solver(&mut p, s));
    let sweep = match (sections.sweep.as_deref(), &state) {
        (Some(entries), Some(st)) => parse_sweep(&mut p, entries, st),
        _ => None,
    };

    if let (Some(State::Prescribed), None) = (&state, &solver) {
        p.issue(None, "state kind `prescribed` needs a [solver] section");
    }

    if !p.issues.is_empty() {
        return Err(p.issues);
    }
    let scenario = Scenario {
        name,
        outputs,
        material: material.flatten(),
        state: state.expect("no issues"),
        sweep,
        solver: solver.flatten(),
    };
    validate(&scenario).map(|_| scenario)
}

fn parse_material(p: &mut Parser, entries: &[Entry]) -> Option<MaterialSpec> {
    p.check_unique(entries, &["note"]);
    for (n, k, _) in entries {
        if !(MATERIAL_KEYS.contains(&k.as_str()) || k == "coefficient" || is_tensor_key(k)) {
            p.issue(Some(*n), format!("unknown key `{k}` in [material]"));
        }
    }
    let coefficient = match find(entries, "coefficient") {
        Some(e) => Some(p.coefficient(e)?),
        None => None,
    };
    let inline: Vec<&Entry> =
        entries.iter().filter(|e| e.1 != "preset" && e.1 != "coefficient").collect();
    let source = if let Some(e) = find(entries, "preset") {
        if !inline.is_empty() {
            p.issue(Some(e.0), "[material] has both `preset` and inline properties");
            return None;
        }
        if material_preset(&e.2).is_none() {
            p.issue(Some(e.0), format!("unknown material preset `{}`", e.2));
            return None;
        }
        MaterialSource::Preset(e.2.clone())
    } else {
        // Keep the file's line numbers in material errors.
        let mut text = String::new();
        let mut line = 1;
        for (n, k, v) in &inline {
            while line < *n {
                text.push('\n');
                line += 1;
            }
            let _ = write!(text, "{k} = {v}");
        }
        match Material::from_kv_str(&text) {
            Ok(m) => MaterialSource::Inline(Box::new(m)),
            Err(err) => {
                let line = match &err {
                    fluctoptics::Error::MaterialSyntax { line, .. } => Some(*line),
                    _ => None,
                };
                p.issue(line, format!("material: {err}"));
                return None;
            }
        }
    };
    Some(MaterialSpec { source, coefficient })
}

fn parse_state(p: &mut Parser, entries: &[Entry]) -> Option<State> {
    let Some(kind) = find(entries, "kind") else {
        p.issue(None, "[state] needs `kind`");
        return None;
    };
    let allowed: &[&str] = match kind.2.as_str() {
        "squeezed_beam" => {
            &["kind", "wavelength", "medium_index", "q", "squeeze_db", "eta", "delta_k_over_k", "delta_theta"]
        }
        "mode_set" => &["kind", "volume", "mode"],
        "coherent" => &["kind", "amplitude", "omega", "k", "volume", "e0"],
        "single_squeezed" => &["kind", "q", "squeeze_db", "eta", "omega", "k", "volume", "e0"],
        "thermal" => &["kind", "temperature"],
        "casimir" => &["kind", "z", "plasma_wavelength"],
        "prescribed" => &["kind"],
        other => {
            p.issue(Some(kind.0), format!("unknown state kind `{other}`"));
            return None;
        }
    };
    p.check_unique(entries, &["mode"]);
    p.unknown(entries, allowed, &format!("[state] of kind {}", kind.2));
    let issues_before = p.issues.len();

    let required = |p: &mut Parser, key: &str| {
        let e = find(entries, key);
        if e.is_none() {
            p.issue(Some(kind.0), format!("{} state needs `{key}`", kind.2));
        }
        e
    };
    let plain_or = |p: &mut Parser, key: &str, default: f64| find(entries, key).and_then(|e| p.plain(e)).unwrap_or(default);
    let squeeze = |p: &mut Parser| -> Option<f64> {
        match (find(entries, "q"), find(entries, "squeeze_db")) {
            (Some(_), Some(e)) => {
                p.issue(Some(e.0), "give either `q` or `squeeze_db`, not both");
                None
            }
            (Some(e), None) => p.plain(e),
            (None, Some(e)) => {
                let db = p.plain(e)?;
                db_to_squeeze_parameter(Quantity::dimensionless(db)).ok().map(|q| q.value())
            }
            (None, None) => {
                p.issue(Some(kind.0), format!("{} state needs `q` or `squeeze_db`", kind.2));
                None
            }
        }
    };
    let amplitude = |p: &mut Parser| -> Option<Amplitude> {
        match (find(entries, "volume"), find(entries, "e0")) {
            (Some(_), Some(e)) => {
                p.issue(Some(e.0), "give either `volume` or `e0`, not both");
                None
            }
            (Some(e), None) => p.plain(e).map(Amplitude::Volume),
            (None, Some(e)) => p.plain(e).map(Amplitude::Explicit),
            (None, None) => Some(Amplitude::Volume(1.0)),
        }
    };

    let state = match kind.2.as_str() {
        "squeezed_beam" => {
            let wavelength = required(p, "wavelength").and_then(|e| p.length(e));
            let q = squeeze(p);
            let dk = required(p, "delta_k_over_k").and_then(|e| p.plain(e));
            let dt = required(p, "delta_theta").and_then(|e| p.plain(e));
            State::SqueezedBeam {
                wavelength: wavelength?,
                medium_index: plain_or(p, "medium_index", 1.0),
                q: q?,
                eta: plain_or(p, "eta", 0.0),
                delta_k_over_k: dk?,
                delta_theta: dt?,
            }
        }
        "mode_set" => {
            let volume = required(p, "volume").and_then(|e| p.plain(e));
            let mut modes = Vec::new();
            for e in entries.iter().filter(|e| e.1 == "mode") {
                let nums: Result<Vec<f64>, _> = e.2.split_whitespace().map(str::parse::<f64>).collect();
                match nums {
                    Ok(v) if v.len() == 6 => {
                        modes.push(Mode { k: [v[0], v[1], v[2]], omega: v[3], q: v[4], eta: v[5] })
                    }
                    _ => p.issue(Some(e.0), "mode needs six numbers: kx ky kz omega q eta"),
                }
            }
            if modes.is_empty() {
                p.issue(Some(kind.0), "mode_set state needs at least one `mode`");
            }
            State::ModeSet { volume: volume?, modes }
        }
        "coherent" => {
            let amp = required(p, "amplitude").and_then(|e| p.plain(e));
            let omega = required(p, "omega").and_then(|e| p.wavenumber(e));
            let k = find(entries, "k").and_then(|e| p.wavenumber(e));
            let e0 = amplitude(p);
            State::Coherent { amplitude: amp?, omega: omega?, k: k.unwrap_or(omega?), e0: e0? }
        }
        "single_squeezed" => {
            let q = squeeze(p);
            let omega = required(p, "omega").and_then(|e| p.wavenumber(e));
            let k = find(entries, "k").and_then(|e| p.wavenumber(e));
            let e0 = amplitude(p);
            State::SingleSqueezed {
                q: q?,
                eta: plain_or(p, "eta", 0.0),
                omega: omega?,
                k: k.unwrap_or(omega?),
                e0: e0?,
            }
        }
        "thermal" => State::Thermal { temperature: find(entries, "temperature").and_then(|e| p.temperature(e)) },
        "casimir" => State::Casimir {
            z: find(entries, "z").and_then(|e| p.length(e)),
            plasma_wavelength: find(entries, "plasma_wavelength").and_then(|e| p.length(e)),
        },
        _ => State::Prescribed,
    };
    (p.issues.len() == issues_before).then_some(state)
}

fn parse_sweep(p: &mut Parser, entries: &[Entry], state: &State) -> Option<Sweep> {
    p.check_unique(entries, &[]);
    p.unknown(entries, &["axis", "start", "stop", "points", "spacing", "values", "t", "y"], "[sweep]");
    let axis = match find(entries, "axis") {
        Some(e) => match SweepAxis::parse(&e.2) {
            Some(a) => a,
            None => {
                p.issue(Some(e.0), format!("unknown sweep axis `{}` (t, y, T or z)", e.2));
                return None;
            }
        },
        None => state.default_axis(),
    };
    let compatible = match state {
        State::Thermal { .. } => axis == SweepAxis::Temperature,
        State::Casimir { .. } => axis == SweepAxis::Distance,
        State::Prescribed => true,
        _ => matches!(axis, SweepAxis::Time | SweepAxis::Y),
    };
    if !compatible {
        p.issue(find(entries, "axis").map(|e| e.0), format!("sweep axis {} does not apply to a {} state", axis.name(), state.kind()));
        return None;
    }

    let period = state.period();
    let coordinate = |p: &mut Parser, e: &Entry| -> Option<f64> {
        match axis {
            SweepAxis::Temperature => p.temperature(e),
            _ => {
                let (v, unit) = p.number(e)?;
                match unit.as_deref() {
                    None | Some("um") => Some(v),
                    Some("m") => Some(v * 1e6),
                    Some("periods") if axis == SweepAxis::Time => match period {
                        Some(t) => Some(v * t),
                        None => {
                            p.issue(Some(e.0), "`periods` needs a state with an oscillation period");
                            None
                        }
                    },
                    Some(u) => {
                        p.issue(Some(e.0), format!("{}: unknown unit `{u}`", e.1));
                        None
                    }
                }
            }
        }
    };

    let values = match (find(entries, "values"), find(entries, "start")) {
        (Some(e), None) => {
            let mut list = Vec::new();
            for word in e.2.split_whitespace() {
                match word.parse::<f64>() {
                    Ok(v) if v.is_finite() => list.push(v),
                    _ => p.issue(Some(e.0), format!("values: `{word}` is not a finite number")),
                }
            }
            if list.is_empty() {
                p.issue(Some(e.0), "sweep values are empty");
            }
            SweepValues::List(list)
        }
        (None, Some(start)) => {
            let start_v = coordinate(p, start);
            let stop_v = match find(entries, "stop") {
                Some(e) => coordinate(p, e),
                None => {
                    p.issue(Some(start.0), "sweep range needs `stop`");
                    None
                }
            };
            let points = match find(entries, "points") {
                Some(e) => p.integer(e),
                None => {
                    p.issue(Some(start.0), "sweep range needs `points`");
                    None
                }
            };
            let log = match find(entries, "spacing").map(|e| (e.0, e.2.as_str())) {
                None | Some((_, "linear")) => false,
                Some((_, "log")) => true,
                Some((n, other)) => {
                    p.issue(Some(n), format!("unknown spacing `{other}` (linear or log)"));
                    false
                }
            };
            let (start_v, stop_v, points) = (start_v?, stop_v?, points?);
            if points == 0 {
                p.issue(find(entries, "points").map(|e| e.0), "sweep range is empty (points = 0)");
            }
            if points > 1 && start_v == stop_v {
                p.issue(Some(start.0), "sweep range is empty (start = stop)");
            }
            if log && (start_v <= 0.0 || stop_v <= 0.0) {
                p.issue(Some(start.0), "log spacing needs positive start and stop");
            }
            SweepValues::Range { start: start_v, stop: stop_v, points, log }
        }
        (Some(e), Some(_)) => {
            p.issue(Some(e.0), "give either `values` or `start`/`stop`/`points`, not both");
            return None;
        }
        (None, None) => {
            p.issue(None, "[sweep] needs `values` or `start`/`stop`/`points`");
            return None;
        }
    };
    let at_t = find(entries, "t").and_then(|e| p.length(e)).unwrap_or(0.0);
    let at_y = find(entries, "y").and_then(|e| p.length(e)).unwrap_or(0.0);
    Some(Sweep { axis, values, at_t, at_y })
}

fn parse_solver(p: &mut Parser, entries: &[Entry]) -> Option<SolverSpec> {
    p.check_unique(entries, &[]);
    p.unknown(
        entries,
        &[
            "length", "points", "cfl", "v0", "form", "amplitude", "k_mod", "omega_mod", "offset", "wavenumber", "t_end",
            "snapshots",
        ],
        "[solver]",
    );
    let before = p.issues.len();
    let mut s = SolverSpec::default();
    for e in entries {
        match e.1.as_str() {
            "length" => s.length = p.length(e).unwrap_or(s.length),
            "points" => s.points = p.integer(e).unwrap_or(s.points),
            "snapshots" => s.snapshots = p.integer(e).unwrap_or(s.snapshots),
            "cfl" => s.cfl = p.plain(e).unwrap_or(s.cfl),
            "v0" => s.v0 = p.plain(e).unwrap_or(s.v0),
            "amplitude" => s.amplitude = p.plain(e).unwrap_or(s.amplitude),
            "offset" => s.offset = p.plain(e).unwrap_or(s.offset),
            "k_mod" => s.k_mod = p.wavenumber(e).unwrap_or(s.k_mod),
            "omega_mod" => s.omega_mod = p.wavenumber(e).unwrap_or(s.omega_mod),
            "wavenumber" => s.wavenumber = p.wavenumber(e).unwrap_or(s.wavenumber),
            "t_end" => s.t_end = p.length(e).unwrap_or(s.t_end),
            "form" => match VelocityForm::parse(&e.2) {
                Some(f) => s.form = f,
                None => p.issue(Some(e.0), format!("unknown velocity form `{}` (linear or exact)", e.2)),
            },
            _ => {}
        }
    }
    (p.issues.len() == before).then_some(s)
}

/// Checks the scenario's physical invariants by building the core objects.
pub fn validate(s: &Scenario) -> Result<(), Vec<ConfigIssue>> {
    let mut issues = Vec::new();
    let mut check = |what: &str, r: fluctoptics::Result<()>| {
        if let Err(e) = r {
            issues.push(ConfigIssue { line: None, message: format!("{what}: {e}") });
        }
    };
    match &s.state {
        State::SqueezedBeam { .. } => check("state", s.state.beam().expect("beam state").map(|_| ())),
        State::ModeSet { volume, modes } => check("state", ModeSet::new(*volume, modes.clone()).map(|_| ())),
        State::Coherent { omega, e0, .. } | State::SingleSqueezed { omega, e0, .. } => {
            let bad = match e0 {
                Amplitude::Volume(v) => !(*v > 0.0),
                Amplitude::Explicit(e) => !(*e >= 0.0),
            };
            if !(*omega > 0.0) {
                check("state", Err(fluctoptics::Error::OutOfRange { name: "omega", detail: format!("{omega} must be positive") }));
            }
            if bad {
                check("state", Err(fluctoptics::Error::OutOfRange { name: "e0", detail: "volume must be positive and e0 non-negative".into() }));
            }
            if let State::SingleSqueezed { q, .. } = s.state {
                if !(q >= 0.0) {
                    check("state", Err(fluctoptics::Error::OutOfRange { name: "q", detail: format!("{q} must be non-negative") }));
                }
            }
        }
        State::Thermal { temperature: Some(t) } => check("state", ThermalSource::kelvin(*t).map(|_| ())),
        State::Casimir { z, plasma_wavelength } => {
            check("state", CasimirPlate::new(z.unwrap_or(1.0), *plasma_wavelength).map(|_| ()))
        }
        _ => {}
    }
    let sweep = s.effective_sweep();
    for v in sweep.values.values() {
        match sweep.axis {
            SweepAxis::Temperature => check("sweep", ThermalSource::kelvin(v).map(|_| ())),
            SweepAxis::Distance => {
                let lp = match s.state {
                    State::Casimir { plasma_wavelength, .. } => plasma_wavelength,
                    _ => None,
                };
                check("sweep", CasimirPlate::new(v, lp).map(|_| ()))
            }
            _ => {}
        }
    }
    if let Some(solver) = &s.solver {
        if solver.snapshots == 0 {
            check("solver", Err(fluctoptics::Error::OutOfRange { name: "snapshots", detail: "must be at least 1".into() }));
        }
        if !(solver.t_end >= 0.0) {
            check("solver", Err(fluctoptics::Error::OutOfRange { name: "t_end", detail: "must be non-negative".into() }));
        }
        check(
            "solver",
            solver.grid().and_then(|g| {
                Solver::new(g, solver.model(), solver.v0, solver.form, &solver.initial_condition()).map(|_| ())
            }),
        );
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BEAM: &str = "name = beam\n[state]\nkind = squeezed_beam\nwavelength = 10.6 um\nmedium_index = 3.5\nq = 1.5\ndelta_k_over_k = 0.01\ndelta_theta = 0.01\n";

    #[test]
    fn empty_file_lacks_state() {
        let err = parse_config("").unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].message, "missing [state] section");
    }

    #[test]
    fn beam_parses() {
        let s = parse_config(BEAM).unwrap();
        assert_eq!(s.name, "beam");
        let b = s.state.beam().unwrap().unwrap();
        assert_eq!(b.q, 1.5);
        assert_eq!(b.medium_index, 3.5);
        assert_eq!(s.outputs, vec![Format::Csv]);
    }

    #[test]
    fn all_errors_are_reported() {
        let text = "colour = red\n[state]\nkind = squeezed_beam\nwavelength = ten\nq = 1\nbogus = 2\n[nonsense]\n";
        let err = parse_config(text).unwrap_err();
        let joined: Vec<String> = err.iter().map(|e| e.to_string()).collect();
        assert!(joined.iter().any(|m| m.contains("line 1") && m.contains("colour")), "{joined:?}");
        assert!(joined.iter().any(|m| m.contains("line 4") && m.contains("ten")), "{joined:?}");
        assert!(joined.iter().any(|m| m.contains("bogus")), "{joined:?}");
        assert!(joined.iter().any(|m| m.contains("[nonsense]")), "{joined:?}");
        assert!(joined.iter().any(|m| m.contains("delta_k_over_k")), "{joined:?}");
    }

    #[test]
    fn angular_spread_out_of_range() {
        let text = BEAM.replace("delta_theta = 0.01", "delta_theta = 6.283185307179586");
        let err = parse_config(&text).unwrap_err();
        assert!(err[0].message.contains("delta_theta"), "{err:?}");
    }

    #[test]
    fn duplicate_state_rejected() {
        let text = format!("{BEAM}[state]\nkind = thermal\n");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn squeeze_in_decibels() {
        let text = BEAM.replace("q = 1.5", "squeeze_db = 10");
        let s = parse_config(&text).unwrap();
        let b = s.state.beam().unwrap().unwrap();
        assert!((b.q - 1.151293).abs() < 1e-6);
    }

    #[test]
    fn periods_resolve_against_the_state() {
        let text = format!("{BEAM}[sweep]\naxis = t\nstart = 0\nstop = 2 periods\npoints = 5\n");
        let s = parse_config(&text).unwrap();
        let period = s.state.period().unwrap();
        let values = s.sweep.unwrap().values.values();
        assert_eq!(values.len(), 5);
        assert_eq!(values[4], 2.0 * period);
    }

    #[test]
    fn thermal_rejects_time_axis() {
        let text = "[state]\nkind = thermal\n[sweep]\naxis = t\nvalues = 1\n";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn inline_material_errors_keep_file_line_numbers() {
        let text = "[material]\nname = x\nn0 = 2\nchi3.x.x.x.q = 1 um4\n[state]\nkind = thermal\ntemperature = 1 K\n";
        let err = parse_config(text).unwrap_err();
        assert_eq!(err[0].line, Some(4), "{err:?}");
    }

    #[test]
    fn round_trip() {
        let text = format!(
            "{BEAM}outputs = both\n[sweep]\naxis = y\nvalues = 0 0.5 1\nt = 0.25\n"
        )
        .replace("name = beam\n", "name = beam\noutputs = csv json\n")
        .replace("outputs = both\n", "");
        let s = parse_config(&text).unwrap();
        assert_eq!(parse_config(&s.to_config_string()).unwrap(), s);
    }

    #[test]
    fn solver_defaults() {
        let s = parse_config("[state]\nkind = prescribed\n[solver]\npoints = 256\n").unwrap();
        let solver = s.solver.unwrap();
        assert_eq!(solver.points, 256);
        assert_eq!(solver.times(), vec![0.0, PI, 2.0 * PI]);
        assert!(parse_config("[state]\nkind = prescribed\n").is_err());
    }

    #[test]
    fn solver_rejects_large_modulation() {
        let err = parse_config("[state]\nkind = prescribed\n[solver]\namplitude = 1.2\n").unwrap_err();
        assert!(err[0].message.contains("modulation"), "{err:?}");
    }
}
