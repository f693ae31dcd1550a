//! Run configuration and the table-producing commands behind the `msfcs` binary.
//!
//! Every command turns a [`RunConfig`] into a [`Table`]; the binary only handles
//! argument parsing and file output.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::classical::{classify_orbit, integrate_lorentz, invariants_in, winding_number, ClassicalTrajectory};
use crate::coherent::{self, decode_position, CoherentState};
use crate::error::{Error, Result};
use crate::evolution::{self, psi0_of, EvolutionMode, EvolutionSpec};
use crate::params::{FieldConfig, ParticleSpec, Species};
use crate::semiclassics;
use crate::verify::{self, CriterionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Means,
    Evolve,
    Classical,
    Density,
    Regimes,
    Verify,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Means => "means",
            CommandKind::Evolve => "evolve",
            CommandKind::Classical => "classical",
            CommandKind::Density => "density",
            CommandKind::Regimes => "regimes",
            CommandKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub gamma: f64,
    pub eps: i32,
    pub flux_ratio: f64,
    #[serde(default = "plus_one")]
    pub sign_b: i32,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleBlock {
    pub species: String,
    pub mass: f64,
    #[serde(default)]
    pub sigma: Option<i32>,
    #[serde(default = "plus_one")]
    pub branch: i32,
    #[serde(default)]
    pub p3: f64,
    #[serde(default)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StateBlock {
    pub re_z1: f64,
    #[serde(default)]
    pub im_z1: f64,
    pub re_z2: f64,
    #[serde(default)]
    pub im_z2: f64,
    pub j: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    AbsZ1,
    AbsZ2,
    /// Sets `|z1| = |z2|`, keeping both phases.
    AbsBoth,
    ArgZ1,
    ArgZ2,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linspace,
    Geomspace,
}

/// Inclusive one-dimensional grid over one state parameter, optionally for several `j`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axis: Axis,
    #[serde(default)]
    pub spacing: Spacing,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Overrides `state.j`; every grid value is evaluated for each entry.
    #[serde(default)]
    pub types: Option<Vec<u8>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionBlock {
    pub mode: EvolutionMode,
    pub t_max: f64,
    pub samples: usize,
    #[serde(default = "plus_one")]
    pub branch: i32,
    /// Defaults to `gamma/M` (NonRelT) or `gamma/(lambda M)` (LightCone).
    #[serde(default)]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalBlock {
    pub r: f64,
    pub rc: f64,
    #[serde(default)]
    pub alpha_c: f64,
    #[serde(default)]
    pub psi0: f64,
    #[serde(default)]
    pub z0: f64,
    /// Defaults to `M` for nonrelativistic species, else `sqrt(M^2 + p3^2 + (gamma R)^2)`.
    #[serde(default)]
    pub p0: Option<f64>,
    #[serde(default = "one_f")]
    pub periods: f64,
    #[serde(default = "default_steps")]
    pub steps_per_period: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DensityBlock {
    pub rho_max: f64,
    pub n_rho: usize,
    pub n_phi: usize,
    #[serde(default)]
    pub l_window: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<CommandKind>,
    pub field: FieldBlock,
    pub particle: ParticleBlock,
    #[serde(default)]
    pub state: Option<StateBlock>,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub evolution: Option<EvolutionBlock>,
    #[serde(default)]
    pub classical: Option<ClassicalBlock>,
    #[serde(default)]
    pub density: Option<DensityBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

fn plus_one() -> i32 {
    1
}

fn one_f() -> f64 {
    1.0
}

fn default_steps() -> usize {
    2000
}

fn default_stride() -> usize {
    10
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn field(&self) -> Result<FieldConfig> {
        let f = &self.field;
        FieldConfig::from_flux(f.gamma, f.eps, f.flux_ratio, f.sign_b).map_err(config_err)
    }

    pub fn particle(&self) -> Result<ParticleSpec> {
        let p = &self.particle;
        let species: Species = p.species.parse()?;
        ParticleSpec::new(species, p.mass, p.sigma, p.branch, p.lambda, p.p3).map_err(config_err)
    }

    fn state_block(&self) -> Result<&StateBlock> {
        self.state
            .as_ref()
            .ok_or_else(|| Error::Config("missing 'state' block".into()))
    }

    /// The sweep grid as `(z1, z2, j)` in row order.
    pub fn states(&self) -> Result<Vec<(Complex64, Complex64, u8)>> {
        let st = self.state_block()?;
        let z1 = Complex64::new(st.re_z1, st.im_z1);
        let z2 = Complex64::new(st.re_z2, st.im_z2);
        let sweep = match &self.sweep {
            None => return Ok(vec![(z1, z2, st.j)]),
            Some(s) => s,
        };
        let values = grid(sweep.spacing, sweep.start, sweep.stop, sweep.count)?;
        let types = sweep.types.clone().unwrap_or_else(|| vec![st.j]);
        if types.is_empty() || types.iter().any(|&j| j > 1) {
            return Err(Error::Config("sweep.types must list values in {0, 1}".into()));
        }
        let mut out = Vec::with_capacity(values.len() * types.len());
        for &x in &values {
            let (a, b) = match sweep.axis {
                Axis::AbsZ1 => (Complex64::from_polar(x, z1.arg()), z2),
                Axis::AbsZ2 => (z1, Complex64::from_polar(x, z2.arg())),
                Axis::AbsBoth => (Complex64::from_polar(x, z1.arg()), Complex64::from_polar(x, z2.arg())),
                Axis::ArgZ1 => (Complex64::from_polar(z1.norm(), x), z2),
                Axis::ArgZ2 => (z1, Complex64::from_polar(z2.norm(), x)),
            };
            for &j in &types {
                out.push((a, b, j));
            }
        }
        Ok(out)
    }

    fn single_state(&self, what: &str) -> Result<CoherentState> {
        if self.sweep.is_some() {
            return Err(Error::Config(format!("{what} takes a single state; remove 'sweep'")));
        }
        let (z1, z2, j) = self.states()?[0];
        CoherentState::new(z1, z2, j, self.field()?, self.particle()?).map_err(config_err)
    }
}

/// Inclusive grid of `count` points; geometric spacing needs endpoints of one sign.
pub fn grid(spacing: Spacing, start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Config("sweep needs count >= 1 and finite endpoints".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let n = (count - 1) as f64;
    match spacing {
        Spacing::Linspace => Ok((0..count)
            .map(|i| if i + 1 == count { stop } else { start + (stop - start) * i as f64 / n })
            .collect()),
        Spacing::Geomspace => {
            if !(start * stop > 0.0) {
                return Err(Error::Config("geomspace endpoints must be nonzero with one sign".into()));
            }
            let (la, lb) = (start.abs().ln(), stop.abs().ln());
            let s = start.signum();
            Ok((0..count)
                .map(|i| match i {
                    0 => start,
                    _ if i + 1 == count => stop,
                    _ => s * (la + (lb - la) * i as f64 / n).exp(),
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::F(x) if x.is_nan() => "NaN".into(),
            Cell::F(x) => if *x > 0.0 { "inf".into() } else { "-inf".into() },
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) => Value::from(*x),
            Cell::I(i) => Value::from(*i),
            Cell::S(s) => Value::from(s.as_str()),
        }
    }
}

/// Command output: rows in input order plus a summary for the metadata sidecar.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// JSON output groups rows into an object keyed by this column.
    pub group_by: Option<usize>,
    pub summary: Value,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        wr.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let object = |row: &[Cell], skip: Option<usize>| {
            let mut m = Map::new();
            for (k, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if Some(k) != skip {
                    m.insert((*name).to_string(), cell.json());
                }
            }
            Value::Object(m)
        };
        match self.group_by {
            None => Value::Array(self.rows.iter().map(|r| object(r, None)).collect()),
            Some(g) => {
                let mut groups = Map::new();
                for r in &self.rows {
                    let key = match &r[g] {
                        Cell::S(s) => s.clone(),
                        other => other.csv(),
                    };
                    let entry = groups.entry(key).or_insert_with(|| Value::Array(Vec::new()));
                    if let Value::Array(a) = entry {
                        a.push(object(r, Some(g)));
                    }
                }
                Value::Object(groups)
            }
        }
    }

    pub fn write<W: Write>(&self, format: Format, mut w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                let text = serde_json::to_string_pretty(&self.to_json()).map_err(config_err)?;
                writeln!(w, "{text}")?;
                Ok(())
            }
        }
    }
}

/// Path of the metadata file written next to a data file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the data file and its `.meta.json` sidecar.
pub fn write_outputs(table: &Table, command: CommandKind, config: Option<&RunConfig>, path: &Path, format: Format) -> Result<()> {
    let file = std::fs::File::create(path)?;
    table.write(format, std::io::BufWriter::new(file))?;
    let meta = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "format": format,
        "rows": table.rows.len(),
        "columns": table.columns,
        "config": config,
        "summary": table.summary,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(config_err)?;
    std::fs::write(sidecar_path(path), text + "\n")?;
    Ok(())
}

fn check_command(cfg: &RunConfig, kind: CommandKind) -> Result<()> {
    match cfg.command {
        Some(c) if c != kind => Err(Error::Config(format!(
            "config is for '{}' but '{}' was requested",
            c.name(),
            kind.name()
        ))),
        _ => Ok(()),
    }
}

/// Columns of `means`, in order.
pub const MEANS_COLUMNS: [&str; 25] = [
    "re_z1", "im_z1", "re_z2", "im_z2", "j", "norm", "norm_err", "n1_mean", "n2_mean", "re_a1", "im_a1", "re_a2",
    "im_a2", "x_mean", "y_mean", "r2_mean", "rc2_mean", "r_mean", "rc_mean", "jz_mean", "var_n1", "var_n2", "var_xy",
    "d_offset", "cross_kernel",
];

pub fn cmd_means(cfg: &RunConfig) -> Result<Table> {
    check_command(cfg, CommandKind::Means)?;
    let field = cfg.field()?;
    let spec = cfg.particle()?;
    let states = cfg.states()?;
    let rows: Vec<Vec<Cell>> = states
        .par_iter()
        .map(|&(z1, z2, j)| {
            let cs = CoherentState::new(z1, z2, j, field, spec).map_err(config_err)?;
            let o = coherent::observables(&cs)?;
            // overlap with the opposite type at the same parameters
            let other = CoherentState::new(z1, z2, 1 - j, field, spec)?;
            let cross = coherent::norm_kernel(&cs, Some(&other))?.value.norm();
            Ok(vec![
                Cell::F(z1.re),
                Cell::F(z1.im),
                Cell::F(z2.re),
                Cell::F(z2.im),
                Cell::I(j as i64),
                Cell::F(o.norm.value.re),
                Cell::F(o.norm.abs_err),
                Cell::F(o.n1_mean),
                Cell::F(o.n2_mean),
                Cell::F(o.a1_mean.re),
                Cell::F(o.a1_mean.im),
                Cell::F(o.a2_mean.re),
                Cell::F(o.a2_mean.im),
                Cell::F(o.x_mean),
                Cell::F(o.y_mean),
                Cell::F(o.r2_mean),
                Cell::F(o.rc2_mean),
                Cell::F(o.r_mean),
                Cell::F(o.rc_mean),
                Cell::F(o.jz_mean),
                Cell::F(o.var_n1),
                Cell::F(o.var_n2),
                Cell::F(o.var_xy),
                Cell::F(o.d_offset),
                Cell::F(cross),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(Table {
        columns: MEANS_COLUMNS.to_vec(),
        summary: json!({ "species": spec.species.name(), "states": rows.len() }),
        rows,
        group_by: None,
    })
}

pub const EVOLVE_COLUMNS: [&str; 8] = ["time", "x_mean", "y_mean", "|a1|", "arg(a1)", "norm", "R2_mean", "circle_residual"];

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Table> {
    check_command(cfg, CommandKind::Evolve)?;
    let cs = cfg.single_state("evolve")?;
    let eb = cfg
        .evolution
        .as_ref()
        .ok_or_else(|| Error::Config("missing 'evolution' block".into()))?;
    let default_omega = match eb.mode {
        EvolutionMode::NonRelT => cs.field.gamma / cs.spec.mass,
        EvolutionMode::LightCone => cs.field.gamma / (cs.spec.lambda * cs.spec.mass),
        EvolutionMode::QuasiCS => 1.0,
    };
    let omega = eb.omega.unwrap_or(default_omega);
    let evo = EvolutionSpec::linspace(eb.mode, omega, psi0_of(cs.z1), eb.t_max, eb.samples, eb.branch)
        .map_err(config_err)?;
    let samples = evolution::mean_trajectory(&cs, &evo)?;
    let a2 = coherent::mean_a(&cs, 2)?;
    let center = decode_position(&cs, Complex64::new(0.0, 0.0), a2);
    let radius = (2.0 / cs.field.gamma).sqrt() * samples[0].a1.norm();
    let rows: Vec<Vec<Cell>> = samples
        .iter()
        .map(|s| {
            let res = ((s.x_mean - center.0).hypot(s.y_mean - center.1) - radius).abs();
            vec![
                Cell::F(s.time),
                Cell::F(s.x_mean),
                Cell::F(s.y_mean),
                Cell::F(s.a1.norm()),
                Cell::F(s.a1.arg()),
                Cell::F(s.norm),
                Cell::F(s.r2_mean),
                Cell::F(res),
            ]
        })
        .collect();
    let rate = if samples.len() >= 64 {
        evolution::circle_fit(&cs, &samples).ok().map(|f| f.rate)
    } else {
        None
    };
    let max_res = samples
        .iter()
        .map(|s| ((s.x_mean - center.0).hypot(s.y_mean - center.1) - radius).abs())
        .fold(0.0, f64::max);
    Ok(Table {
        columns: EVOLVE_COLUMNS.to_vec(),
        rows,
        group_by: None,
        summary: json!({
            "mode": eb.mode,
            "omega": omega,
            "center": [center.0, center.1],
            "radius": radius,
            "max_circle_residual": max_res,
            "fitted_rate": rate,
        }),
    })
}

pub const CLASSICAL_COLUMNS: [&str; 11] = ["t", "x", "y", "z", "P1", "P2", "P3", "|a1|", "|a2|", "Lz", "rk4_error"];

pub fn cmd_classical(cfg: &RunConfig) -> Result<Table> {
    check_command(cfg, CommandKind::Classical)?;
    let field = cfg.field()?;
    let spec = cfg.particle()?;
    let cb = cfg
        .classical
        .as_ref()
        .ok_or_else(|| Error::Config("missing 'classical' block".into()))?;
    if cb.steps_per_period == 0 || cb.stride == 0 || !(cb.periods > 0.0) {
        return Err(Error::Config("classical needs periods > 0, steps_per_period >= 1, stride >= 1".into()));
    }
    let p0 = cb.p0.unwrap_or_else(|| {
        if spec.species.is_nonrelativistic() {
            spec.mass
        } else {
            (spec.mass.powi(2) + spec.p3.powi(2) + (field.gamma * cb.r).powi(2)).sqrt()
        }
    });
    let traj = ClassicalTrajectory::new(cb.r, cb.rc, cb.alpha_c, cb.psi0, p0, spec.p3, cb.z0, field.eps, field.gamma, spec.mass)
        .map_err(config_err)?;
    let orbit_type = classify_orbit(traj.r, traj.rc)?;
    let period = traj.period();
    let step = period / cb.steps_per_period as f64;
    let integrated = integrate_lorentz(&traj.state_at(0.0), field.gamma, field.eps, cb.periods * period, step)?;
    let mut max_err = 0.0f64;
    let mut rows = Vec::new();
    for (k, (t, s)) in integrated.iter().enumerate() {
        let exact = traj.state_at(*t);
        let err = (s.x - exact.x).hypot(s.y - exact.y).hypot(s.z - exact.z);
        max_err = max_err.max(err);
        if k % cb.stride != 0 && k + 1 != integrated.len() {
            continue;
        }
        let inv = invariants_in(&exact, &field, spec.mass);
        rows.push(vec![
            Cell::F(*t),
            Cell::F(exact.x),
            Cell::F(exact.y),
            Cell::F(exact.z),
            Cell::F(exact.p1),
            Cell::F(exact.p2),
            Cell::F(exact.p3),
            Cell::F(inv.a1.norm()),
            Cell::F(inv.a2.norm()),
            Cell::F(inv.lz),
            Cell::F(err),
        ]);
    }
    let one_period: Vec<(f64, f64)> = (0..=cb.steps_per_period)
        .map(|k| {
            let s = traj.state_at(k as f64 * step);
            (s.x, s.y)
        })
        .collect();
    Ok(Table {
        columns: CLASSICAL_COLUMNS.to_vec(),
        rows,
        group_by: None,
        summary: json!({
            "orbit_type": orbit_type,
            "winding_number": winding_number(&one_period),
            "period": period,
            "p0": p0,
            "max_rk4_error": max_err,
            "center": [traj.center().0, traj.center().1],
        }),
    })
}

pub const DENSITY_COLUMNS: [&str; 5] = ["rho", "phi", "x", "y", "density"];

pub fn cmd_density(cfg: &RunConfig) -> Result<Table> {
    check_command(cfg, CommandKind::Density)?;
    let cs = cfg.single_state("density")?;
    let db = cfg
        .density
        .as_ref()
        .ok_or_else(|| Error::Config("missing 'density' block".into()))?;
    if db.n_rho == 0 || db.n_phi == 0 || !(db.rho_max > 0.0) {
        return Err(Error::Config("density needs rho_max > 0, n_rho >= 1, n_phi >= 1".into()));
    }
    // midpoint grid in rho keeps rho = 0 out of the sample set
    let d_rho = db.rho_max / db.n_rho as f64;
    let d_phi = 2.0 * PI / db.n_phi as f64;
    let phis: Vec<f64> = (0..db.n_phi).map(|k| k as f64 * d_phi).collect();
    let rings: Vec<(f64, Vec<f64>)> = (0..db.n_rho)
        .into_par_iter()
        .map(|i| {
            let rho = (i as f64 + 0.5) * d_rho;
            Ok((rho, coherent::density_ring(&cs, rho, &phis, db.l_window)?))
        })
        .collect::<Result<_>>()?;
    let scale = (2.0 / cs.field.gamma).sqrt();
    let mut rows = Vec::with_capacity(db.n_rho * db.n_phi);
    let mut integral = 0.0;
    for (rho, ring) in &rings {
        let r = scale * rho.sqrt();
        for (&phi, &d) in phis.iter().zip(ring) {
            integral += d * d_rho * d_phi;
            rows.push(vec![
                Cell::F(*rho),
                Cell::F(phi),
                Cell::F(r * phi.cos()),
                Cell::F(r * phi.sin()),
                Cell::F(d),
            ]);
        }
    }
    Ok(Table {
        columns: DENSITY_COLUMNS.to_vec(),
        rows,
        group_by: None,
        summary: json!({ "grid_integral": integral, "rho_max": db.rho_max }),
    })
}

pub const REGIMES_COLUMNS: [&str; 14] = [
    "claim", "re_z1", "im_z1", "re_z2", "im_z2", "j", "u", "v", "regime", "status", "exact", "asymptotic", "abs_diff",
    "predicted_order",
];

pub fn cmd_regimes(cfg: &RunConfig) -> Result<Table> {
    check_command(cfg, CommandKind::Regimes)?;
    let field = cfg.field()?;
    let spec = cfg.particle()?;
    let states = cfg.states()?;
    let per_state: Vec<Vec<Vec<Cell>>> = states
        .par_iter()
        .map(|&(z1, z2, j)| {
            let cs = CoherentState::new(z1, z2, j, field, spec).map_err(config_err)?;
            let (u, v) = cs.kernel_uv();
            let reports = semiclassics::compare_all(&field, &spec, z1, z2, j)?;
            Ok(reports
                .iter()
                .map(|r| {
                    vec![
                        Cell::S(r.key.name().into()),
                        Cell::F(z1.re),
                        Cell::F(z1.im),
                        Cell::F(z2.re),
                        Cell::F(z2.im),
                        Cell::I(j as i64),
                        Cell::F(u),
                        Cell::F(v),
                        Cell::S(format!("{:?}", r.regime)),
                        Cell::S(format!("{:?}", r.status)),
                        Cell::F(r.exact),
                        Cell::F(r.asymptotic),
                        Cell::F(r.abs_diff),
                        Cell::F(r.predicted_order),
                    ]
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    // claim-major order so each claim's rows are contiguous
    let mut rows = Vec::new();
    for key in semiclassics::ClaimKey::ALL {
        for block in &per_state {
            rows.extend(block.iter().filter(|r| r[0] == Cell::S(key.name().into())).cloned());
        }
    }
    let count = |s: &str| rows.iter().filter(|r| r[9] == Cell::S(s.into())).count();
    let summary = json!({
        "pass": count("Pass"),
        "fail": count("Fail"),
        "report_only": count("ReportOnly"),
        "not_applicable": count("NotApplicable"),
    });
    Ok(Table {
        columns: REGIMES_COLUMNS.to_vec(),
        rows,
        group_by: Some(0),
        summary,
    })
}

pub const VERIFY_COLUMNS: [&str; 5] = ["id", "name", "passed", "seconds", "detail"];

/// Runs the acceptance criteria; an empty `only` runs all of them.
pub fn cmd_verify(only: &[u32]) -> (Vec<CriterionResult>, Table) {
    let ids: Vec<u32> = if only.is_empty() {
        verify::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        only.to_vec()
    };
    let results: Vec<CriterionResult> = ids.iter().map(|&id| verify::run(id)).collect();
    let rows = results
        .iter()
        .map(|r| {
            vec![
                Cell::I(r.id as i64),
                Cell::S(r.name.into()),
                Cell::S(if r.passed { "PASS" } else { "FAIL" }.into()),
                Cell::F(r.seconds),
                Cell::S(r.detail.clone()),
            ]
        })
        .collect();
    let passed = results.iter().filter(|r| r.passed).count();
    let table = Table {
        columns: VERIFY_COLUMNS.to_vec(),
        rows,
        group_by: None,
        summary: json!({ "passed": passed, "total": results.len() }),
    };
    (results, table)
}

pub fn run_command(kind: CommandKind, cfg: &RunConfig) -> Result<Table> {
    match kind {
        CommandKind::Means => cmd_means(cfg),
        CommandKind::Evolve => cmd_evolve(cfg),
        CommandKind::Classical => cmd_classical(cfg),
        CommandKind::Density => cmd_density(cfg),
        CommandKind::Regimes => cmd_regimes(cfg),
        CommandKind::Verify => Ok(cmd_verify(&[]).1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_inclusive() {
        let g = grid(Spacing::Linspace, 1.0, 2.0, 5).unwrap();
        assert_eq!(g, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        let g = grid(Spacing::Geomspace, 1.0, 100.0, 3).unwrap();
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert_eq!(g[2], 100.0);
        assert!(grid(Spacing::Geomspace, -1.0, 1.0, 3).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"field": {"gamma": 1, "eps": 1, "flux_ratio": 0.3, "colour": 2},
                       "particle": {"species": "Spinless", "mass": 1}}"#;
        let err = RunConfig::from_json(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn full_precision_cells() {
        let x = 0.1f64 + 0.2;
        let s = Cell::F(x).csv();
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(Cell::F(f64::NAN).csv(), "NaN");
    }
}
