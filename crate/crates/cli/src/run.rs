//! Evaluates a scenario for one subcommand.

use std::f64::consts::PI;

use fluctoptics::ambient::{e2_casimir, e2_thermal, CasimirPlate, CasimirRegime, ThermalSource};
use fluctoptics::propagate::{run, spectrum_with_carrier, wavelength_modulation_correlation, DEFAULT_PEAK_THRESHOLD};
use fluctoptics::qstates::{e2_mode_sum, subvacuum_windows, ModeSet, SingleModeState};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::{Scenario, State, SweepAxis};
use crate::error::CliError;
use crate::output::{config_hash, num, Output, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    E2,
    Birefringence,
    Propagate,
    Ambient,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::E2 => "e2",
            Command::Birefringence => "birefringence",
            Command::Propagate => "propagate",
            Command::Ambient => "ambient",
        }
    }
}

fn base_meta(s: &Scenario, command: Command) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("name".into(), s.name.clone().into());
    m.insert("command".into(), command.name().into());
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("config_hash".into(), config_hash(&s.to_config_string()).into());
    m.insert("state".into(), s.state.kind().into());
    m
}

/// ⟨:E²:⟩ at one sweep point for the field states.
fn field_e2(state: &State, modes: Option<&ModeSet>, t: f64, y: f64) -> Result<f64, CliError> {
    Ok(match state {
        State::SqueezedBeam { .. } => state.beam().expect("beam")?.e2(t, y).value(),
        State::ModeSet { .. } => e2_mode_sum(modes.expect("mode set"), t, [0.0, y, 0.0]).value(),
        State::Coherent { .. } => state.coherent().expect("coherent").e2(t, y).value(),
        State::SingleSqueezed { .. } => state.single_squeezed().expect("squeezed").e2(t, y).value(),
        _ => unreachable!("field states only"),
    })
}

fn ambient_e2(state: &State, x: f64) -> Result<f64, CliError> {
    Ok(match state {
        State::Thermal { .. } => e2_thermal(&ThermalSource::kelvin(x)?).value(),
        State::Casimir { plasma_wavelength, .. } => {
            e2_casimir(&CasimirPlate::new(x, *plasma_wavelength)?).e2_total.value()
        }
        _ => unreachable!("ambient states only"),
    })
}

fn is_ambient(state: &State) -> bool {
    matches!(state, State::Thermal { .. } | State::Casimir { .. })
}

/// Sweep table with ⟨:E²:⟩ and, when `coefficient` is given, δn.
fn e2_table(s: &Scenario, coefficient: Option<f64>) -> Result<Table, CliError> {
    let sweep = s.effective_sweep();
    let xs = sweep.values.values();
    let modes = match &s.state {
        State::ModeSet { volume, modes } => Some(ModeSet::new(*volume, modes.clone())?),
        _ => None,
    };
    let ambient = is_ambient(&s.state);
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| -> Result<Vec<f64>, CliError> {
            let mut row = if ambient {
                vec![x, ambient_e2(&s.state, x)?]
            } else {
                let (t, y) = match sweep.axis {
                    SweepAxis::Y => (sweep.at_t, x),
                    _ => (x, sweep.at_y),
                };
                vec![t, y, field_e2(&s.state, modes.as_ref(), t, y)?]
            };
            if let Some(c) = coefficient {
                // Isotropic sources put a third of ⟨E²⟩ along the field axis.
                let e2x = if ambient { row[row.len() - 1] / 3.0 } else { row[row.len() - 1] };
                row.push(c * e2x);
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;

    let mut columns: Vec<&str> = if ambient { vec![sweep.axis.name(), "e2"] } else { vec!["t", "y", "e2"] };
    if coefficient.is_some() {
        columns.push("delta_n");
    }
    let mut table = Table::new(&columns);
    for r in rows {
        table.push(&r);
    }
    Ok(table)
}

fn state_meta(s: &Scenario, meta: &mut Map<String, Value>) -> Result<Vec<String>, CliError> {
    let mut warnings = Vec::new();
    match &s.state {
        State::SqueezedBeam { .. } => {
            let b = s.state.beam().expect("beam")?;
            warnings = b.warnings();
            meta.insert("prefactor_um-4".into(), num(b.prefactor().value()));
            meta.insert("static_prefactor_um-4".into(), num(b.static_prefactor().value()));
            meta.insert("mean_level_um-4".into(), num(b.mean_level().value()));
            meta.insert("modulation_ratio".into(), num(b.modulation_ratio()));
            meta.insert("period_um".into(), num(b.period()));
            let (lo, hi) = b.e2_extrema();
            meta.insert("e2_min_um-4".into(), num(lo.value()));
            meta.insert("e2_max_um-4".into(), num(hi.value()));
            let sweep = s.effective_sweep();
            if sweep.axis == SweepAxis::Time && b.q > 0.0 {
                let xs = sweep.values.values();
                let (t0, t1) = (xs[0], xs[xs.len() - 1]);
                if t1 > t0 && t0 >= 0.0 {
                    let r = subvacuum_windows(&b, sweep.at_y, t1)?;
                    meta.insert("subvacuum_duty_fraction".into(), num(r.duty_fraction));
                    meta.insert("subvacuum_windows".into(), r.intervals.len().into());
                }
            }
        }
        State::Coherent { .. } => {
            let c = s.state.coherent().expect("coherent");
            meta.insert("mean_photon_number".into(), num(c.mean_photon_number()));
            meta.insert("time_averaged_e2_um-4".into(), num(c.time_averaged_e2().value()));
        }
        State::SingleSqueezed { .. } => {
            let m = s.state.single_squeezed().expect("squeezed");
            meta.insert("mean_photon_number".into(), num(m.mean_photon_number()));
            meta.insert("time_averaged_e2_um-4".into(), num(m.time_averaged_e2().value()));
        }
        State::Casimir { plasma_wavelength, .. } => {
            if let Some(lp) = plasma_wavelength {
                meta.insert("plasma_wavelength_um".into(), num(*lp));
            }
            let xs = s.effective_sweep().values.values();
            let mut regimes = Vec::new();
            let mut near = Vec::new();
            for &z in &xs {
                let f = e2_casimir(&CasimirPlate::new(z, *plasma_wavelength)?);
                regimes.push(Value::from(match f.regime {
                    CasimirRegime::PerfectConductor => "perfect",
                    CasimirRegime::Plasma => "plasma",
                }));
                if let Some(o) = f.other_regime {
                    near.push(Value::Array(vec![num(z), num(f.e2_total.value()), num(o.value())]));
                }
            }
            meta.insert("regime".into(), Value::Array(regimes));
            if !near.is_empty() {
                meta.insert("near_crossover_z_e2_other".into(), Value::Array(near));
            }
        }
        _ => {}
    }
    Ok(warnings)
}

pub fn run_scenario(s: &Scenario, command: Command) -> Result<Output, CliError> {
    let mut meta = base_meta(s, command);
    let (series, extra) = match command {
        Command::E2 | Command::Ambient | Command::Birefringence => {
            if matches!(s.state, State::Prescribed) {
                return Err(CliError::Usage(format!("{} needs a field state, not `prescribed`", command.name())));
            }
            if command == Command::Ambient && !is_ambient(&s.state) {
                return Err(CliError::Usage(format!(
                    "ambient needs a thermal or casimir state, not `{}`",
                    s.state.kind()
                )));
            }
            let warnings = state_meta(s, &mut meta)?;
            let coefficient = if command == Command::Birefringence {
                let Some(spec) = &s.material else {
                    return Err(CliError::Usage("birefringence needs a [material] section".into()));
                };
                let material = spec.material();
                let c = spec.coefficient().value();
                meta.insert("material".into(), material.name.clone().into());
                meta.insert("coefficient_um4".into(), num(c));
                meta.insert("computed_coefficient_um4".into(), num(spec.computed_coefficient().value()));
                Some(c)
            } else {
                None
            };
            meta.insert("warnings".into(), Value::Array(warnings.into_iter().map(Value::from).collect()));
            (e2_table(s, coefficient)?, Vec::new())
        }
        Command::Propagate => {
            let Some(p) = &s.solver else {
                return Err(CliError::Usage("propagate needs a [solver] section".into()));
            };
            propagate(p, &mut meta)?
        }
    };
    Ok(Output { name: s.name.clone(), command: command.name().into(), meta, series, extra })
}

fn propagate(
    p: &crate::config::SolverSpec,
    meta: &mut Map<String, Value>,
) -> Result<(Table, Vec<(String, Table)>), CliError> {
    let grid = p.grid()?;
    let times = p.times();
    let snaps = run(&grid, &p.model(), p.v0, p.form, &p.initial_condition(), &times)?;

    let mut table = Table::new(&["t", "z", "E", "f"]);
    for s in &snaps {
        for i in 0..s.z.len() {
            table.push(&[s.t, s.z[i], s.e[i], s.f[i]]);
        }
    }

    let last = snaps.last().expect("at least one snapshot");
    let to_mode = |k: f64| (k * p.length / (2.0 * PI)).round() as usize;
    let carrier = to_mode(p.wavenumber);
    let offset = to_mode(p.k_mod);
    let spec = spectrum_with_carrier(last, carrier, DEFAULT_PEAK_THRESHOLD);
    let mut spectrum = Table::new(&["mode_index", "magnitude"]);
    for (m, &a) in spec.magnitudes.iter().enumerate() {
        spectrum.push(&[m as f64, a]);
    }

    let steps = if p.t_end > 0.0 { (p.t_end / grid.dt).ceil().max(1.0) } else { 0.0 };
    meta.insert("points".into(), p.points.into());
    meta.insert("dt".into(), num(if steps > 0.0 { p.t_end / steps } else { grid.dt }));
    meta.insert("steps".into(), (steps as u64).into());
    meta.insert("velocity_form".into(), p.form.name().into());
    meta.insert("spectrum_t".into(), num(last.t));
    meta.insert("carrier_mode".into(), carrier.into());
    meta.insert("sideband_offset".into(), offset.into());
    let (lo, hi) = spec.sidebands(offset);
    meta.insert("sideband_lower_relative".into(), num(lo));
    meta.insert("sideband_upper_relative".into(), num(hi));
    meta.insert("sidebands_detected".into(), (offset > 0 && spec.has_sidebands(offset)).into());
    meta.insert("peaks".into(), Value::Array(spec.peaks.iter().map(|&m| m.into()).collect()));
    match wavelength_modulation_correlation(last) {
        Ok(r) if r.is_finite() => {
            meta.insert("wavelength_f_correlation".into(), num(r));
        }
        _ => {
            meta.insert("wavelength_f_correlation".into(), Value::Null);
        }
    }
    Ok((table, vec![("spectrum".into(), spectrum)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::presets;

    fn preset(name: &str) -> Scenario {
        parse_config(presets::find(name).unwrap().text).unwrap()
    }

    #[test]
    fn squeezed_preset_birefringence_extremes() {
        let out = run_scenario(&preset("cdgeas2-squeezed"), Command::Birefringence).unwrap();
        let dn = out.series.column("delta_n").unwrap();
        let max = dn.iter().cloned().fold(f64::MIN, f64::max);
        let min = dn.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max / 2.88e-15 - 1.0).abs() < 0.02, "{max}");
        assert!(min < 0.0 && (min / -1.44e-16 - 1.0).abs() < 0.01, "{min}");
        assert_eq!(out.series.rows(), 401);
    }

    #[test]
    fn thermal_zero_row() {
        let s = parse_config("[state]\nkind = thermal\n[sweep]\naxis = T\nvalues = 0\n").unwrap();
        let out = run_scenario(&s, Command::Ambient).unwrap();
        assert_eq!(out.series.rows(), 1);
        assert_eq!(out.series.column("e2").unwrap(), &[0.0]);
    }

    #[test]
    fn fig2_echoes_initial_condition() {
        let out = run_scenario(&preset("fig2"), Command::Propagate).unwrap();
        let t = out.series.column("t").unwrap();
        let z = out.series.column("z").unwrap();
        let e = out.series.column("E").unwrap();
        let first: Vec<usize> = (0..t.len()).filter(|&i| t[i] == 0.0).collect();
        assert_eq!(first.len(), 1024);
        for i in first {
            assert_eq!(e[i], (10.0 * z[i]).cos());
        }
        assert_eq!(out.meta["sidebands_detected"], Value::Bool(true));
    }

    #[test]
    fn mismatched_commands_are_usage_errors() {
        assert!(matches!(run_scenario(&preset("fig2"), Command::E2), Err(CliError::Usage(_))));
        assert!(matches!(run_scenario(&preset("cdgeas2-squeezed"), Command::Ambient), Err(CliError::Usage(_))));
        assert!(matches!(run_scenario(&preset("thermal-2600"), Command::Propagate), Err(CliError::Usage(_))));
        assert!(matches!(run_scenario(&preset("thermal-2600"), Command::Birefringence), Err(CliError::Usage(_))));
    }

    #[test]
    fn runs_are_deterministic() {
        let s = preset("cdgeas2-squeezed");
        assert_eq!(run_scenario(&s, Command::E2).unwrap(), run_scenario(&s, Command::E2).unwrap());
    }
}
