//! Pumped charge under a slow `ky` drive and the adiabatic phase diagram.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{detect_breakdown, evolve, rk4_step, DriveSpec, DEFAULT_THRESHOLD, DEFAULT_WINDOW, NORM_ABORT};
use crate::error::{Error, Result};
use crate::model::{chern_number, KPoint, ModelParams, Spinor};
use crate::spectrum::surface::fmt_f64;
use crate::spectrum::{physical_spectrum, select_branch, Band};

pub const DEFAULT_COLUMNS: usize = 50;
pub const DEFAULT_FORCE: f64 = 0.01;
pub const DEFAULT_DT: f64 = 0.01;

/// `∂H/∂kx` expectation: `cos kx ⟨σx⟩ - sin kx ⟨σz⟩`. The Kerr term has no
/// explicit `k` dependence.
pub fn velocity_expectation(params: &ModelParams, k: &KPoint, psi: &Spinor) -> f64 {
    let [sx, _, sz] = psi.pauli_expectations();
    params.hopping() * (k.kx.cos() * sx - k.kx.sin() * sz)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseSummary {
    pub u: f64,
    #[serde(rename = "U")]
    pub kerr: f64,
    #[serde(rename = "F")]
    pub force: f64,
    pub band: String,
    pub nu: f64,
    /// Chern number of the band in the linear model, `None` at a gap closing.
    pub nu_linear: Option<i32>,
    pub adiabatic: bool,
    pub columns: usize,
    pub steps: usize,
    pub dt: f64,
}

/// Linear-model response of a band: `C` for the ground band, `-C` for the
/// excited band.
pub fn linear_response(u: f64, band: Band) -> Option<i32> {
    let c = chern_number(u).ok()?;
    match band {
        Band::Ground => Some(c),
        Band::Excited => Some(-c),
        Band::Index(_) => None,
    }
}

/// `∫ v dt` over one drive period for the column at `kx` (trapezoid rule).
fn column_charge(params: &ModelParams, band: Band, kx: f64, force: f64, dt: f64) -> Result<(f64, usize)> {
    let k0 = KPoint::new(kx, 0.0);
    let drive = DriveSpec::new(k0, (0.0, force), TAU / force.abs(), dt)?;
    let mut psi = select_branch(params, &k0, band)?.state;
    let n = drive.steps();
    let mut v_prev = velocity_expectation(params, &k0, &psi);
    let mut q = 0.0;
    for step in 1..=n {
        psi = rk4_step(params, &drive, (step - 1) as f64 * dt, &psi);
        let t = step as f64 * dt;
        let drift = (psi.norm() - 1.0).abs();
        if drift > NORM_ABORT || !drift.is_finite() {
            return Err(Error::NormDrift { drift, t, dt });
        }
        let v = velocity_expectation(params, &drive.k_at(t), &psi);
        q += 0.5 * dt * (v_prev + v);
        v_prev = v;
    }
    Ok((q, n))
}

/// Charge pumped along `x` per drive cycle, per unit `kx` density:
/// `ν = -(1/2π) Σ Δkx Q(kx)`, with carrier charge `-1` so that `ν` equals
/// the Chern number in the linear adiabatic limit.
pub fn pumped_charge(params: &ModelParams, band: Band, force: f64, columns: usize, dt: f64) -> Result<ResponseSummary> {
    if columns == 0 {
        return Err(Error::InvalidParams("need at least one kx column".into()));
    }
    if !(force.is_finite() && force != 0.0) {
        return Err(Error::InvalidDrive(format!("force must be nonzero, got {force}")));
    }
    // fail fast on a missing branch before any integration
    for j in 0..columns {
        select_branch(params, &KPoint::new(TAU * j as f64 / columns as f64, 0.0), band)?;
    }
    let charges = (0..columns)
        .into_par_iter()
        .map(|j| column_charge(params, band, TAU * j as f64 / columns as f64, force, dt))
        .collect::<Result<Vec<_>>>()?;
    let dk = TAU / columns as f64;
    let total: f64 = charges.iter().map(|(q, _)| q).sum();
    let nu = -dk * total / TAU;
    Ok(ResponseSummary {
        u: params.u,
        kerr: params.kerr,
        force,
        band: band.to_string(),
        nu,
        nu_linear: linear_response(params.u, band),
        adiabatic: match band {
            Band::Index(_) => false,
            _ => phase_label(params, band)? == PhaseLabel::A,
        },
        columns,
        steps: charges.first().map_or(0, |c| c.1),
        dt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    A,
    #[serde(rename = "nA")]
    NA,
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PhaseLabel::A => "A",
            PhaseLabel::NA => "nA",
        })
    }
}

/// Smallest Kerr strength at which the band grows a loop on some `ky` sweep,
/// with the `k` point where it first appears. `None` if it never does.
pub fn loop_threshold(u: f64, band: Band) -> Option<(f64, KPoint)> {
    match band {
        Band::Ground => {
            // I-type points (0,0), (0,π), (π,0), (π,π) with U_c = 2|dz|
            [(0.0, 0.0, u + 2.0), (0.0, PI, u), (PI, 0.0, u), (PI, PI, u - 2.0)]
                .into_iter()
                .map(|(kx, ky, dz)| (2.0 * f64::abs(dz), KPoint::new(kx, ky)))
                .min_by(|a, b| a.0.total_cmp(&b.0))
        }
        Band::Excited => {
            // minimum of 2ρ on the dz = 0 contour, reached where one cosine is ∓1
            if u.abs() >= 2.0 {
                return None;
            }
            let a = u.abs();
            let (kx, ky) = if u >= 0.0 { (PI, (1.0 - a).acos()) } else { (0.0, (a - 1.0).acos()) };
            Some((2.0 * (a * (2.0 - a)).sqrt(), KPoint::new(kx, ky)))
        }
        Band::Index(_) => None,
    }
}

/// Start of the validation sweep: `ky` advances by `π` across the point
/// where the band's loop first appears.
pub fn sweep_start(u: f64, band: Band) -> KPoint {
    let center = loop_threshold(u, band).map_or(KPoint::new(PI, PI), |(_, k)| k);
    KPoint::new(center.kx, center.ky - PI / 2.0)
}

pub const TRACK_SAMPLES: usize = 2000;
pub const TRACK_JUMP: f64 = 0.05;

/// Follows the band's stationary branch by continuity in `(ε, κ)` along the
/// validation sweep. Returns `true` if the branch ends at a fold, i.e. the
/// closest solution at the next sample is further than `TRACK_JUMP` from the
/// linear extrapolation.
pub fn branch_ends_on_sweep(params: &ModelParams, band: Band) -> Result<bool> {
    let k0 = sweep_start(params.u, band);
    let k = |s: usize| KPoint::new(k0.kx, k0.ky + PI * s as f64 / TRACK_SAMPLES as f64);
    let start = select_branch(params, &k(0), band)?;
    let mut cur = (start.epsilon, start.kappa);
    let mut prev = cur;
    for s in 1..=TRACK_SAMPLES {
        let pred = (2.0 * cur.0 - prev.0, 2.0 * cur.1 - prev.1);
        let (dist, next) = physical_spectrum(params, &k(s))?
            .iter()
            .map(|b| ((b.epsilon - pred.0).hypot(b.kappa - pred.1), (b.epsilon, b.kappa)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("spectrum is never empty");
        if dist > TRACK_JUMP {
            return Ok(true);
        }
        prev = cur;
        cur = next;
    }
    Ok(false)
}

/// Ground band: non-adiabatic iff the Kerr strength exceeds the smallest
/// I-type critical strength. Excited band: non-adiabatic iff the tube exists
/// and the excited branch ends at a fold on the sweep across it; once the
/// tube merges with a neighbouring cone the state follows a self-trapped
/// branch instead.
pub fn phase_label(params: &ModelParams, band: Band) -> Result<PhaseLabel> {
    let above = matches!(loop_threshold(params.u, band), Some((uc, _)) if params.kerr > uc);
    let na = match band {
        Band::Ground => above,
        Band::Excited => above && branch_ends_on_sweep(params, band)?,
        Band::Index(_) => return Err(Error::Config("phase label needs band ground or excited".into())),
    };
    Ok(if na { PhaseLabel::NA } else { PhaseLabel::A })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub u: f64,
    #[serde(rename = "U")]
    pub kerr: f64,
    pub label: PhaseLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min <= max) || points == 0 || (points == 1 && min != max) {
            return Err(Error::InvalidParams(format!("bad axis {min}..{max} with {points} points")));
        }
        Ok(Self { min, max, points })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub band: String,
    pub u_axis: Axis,
    pub kerr_axis: Axis,
    /// Row-major over `u`, then `U`.
    pub cells: Vec<PhaseCell>,
}

pub fn phase_diagram(u_axis: Axis, kerr_axis: Axis, band: Band) -> Result<PhaseDiagram> {
    if matches!(band, Band::Index(_)) {
        return Err(Error::Config("phase diagram needs band ground or excited".into()));
    }
    let cells = (0..u_axis.points * kerr_axis.points)
        .into_par_iter()
        .map(|idx| {
            let params = ModelParams::new(u_axis.value(idx / kerr_axis.points), kerr_axis.value(idx % kerr_axis.points))?;
            Ok(PhaseCell {
                u: params.u,
                kerr: params.kerr,
                label: phase_label(&params, band)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseDiagram {
        band: band.to_string(),
        u_axis,
        kerr_axis,
        cells,
    })
}

impl PhaseDiagram {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "U", "label"])?;
        for c in &self.cells {
            w.write_record([fmt_f64(c.u), fmt_f64(c.kerr), c.label.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub cell: PhaseCell,
    pub breakdown_time: Option<f64>,
    pub consistent: bool,
}

/// Trajectory check of one cell: sweep `ky` by `π` across the point where
/// the band's loop first appears, starting in the band's state, and look
/// for breakdown.
pub fn spot_check(cell: &PhaseCell, band: Band, force: f64, dt: f64) -> Result<SpotCheck> {
    let params = ModelParams::new(cell.u, cell.kerr)?;
    let k0 = sweep_start(cell.u, band);
    let drive = DriveSpec::new(k0, (0.0, force), PI / force.abs(), dt)?;
    let psi0 = select_branch(&params, &k0, band)?.state;
    let traj = evolve(&params, &drive, &psi0, 10)?;
    let breakdown_time = detect_breakdown(&traj, DEFAULT_WINDOW, DEFAULT_THRESHOLD)?;
    Ok(SpotCheck {
        cell: *cell,
        breakdown_time,
        consistent: breakdown_time.is_some() == (cell.label == PhaseLabel::NA),
    })
}

/// Spot checks on up to `samples` cells spread evenly over the diagram.
/// Eligible cells share their label with all grid neighbours and sit at
/// least `margin` away from the loop threshold in `U`.
pub fn validate_labels(diagram: &PhaseDiagram, band: Band, samples: usize, margin: f64) -> Result<Vec<SpotCheck>> {
    let (nu, nk) = (diagram.u_axis.points, diagram.kerr_axis.points);
    let label = |i: usize, j: usize| diagram.cells[i * nk + j].label;
    let mut eligible = Vec::new();
    for i in 0..nu {
        for j in 0..nk {
            let c = &diagram.cells[i * nk + j];
            let interior = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)]
                .into_iter()
                .filter(|&(a, b)| a < nu && b < nk)
                .all(|(a, b)| label(a, b) == c.label);
            let clear = loop_threshold(c.u, band).is_none_or(|(uc, _)| (c.kerr - uc).abs() >= margin);
            if interior && clear {
                eligible.push(c);
            }
        }
    }
    if eligible.is_empty() || samples == 0 {
        return Ok(Vec::new());
    }
    let stride = (eligible.len() as f64 / samples as f64).max(1.0);
    let picks: Vec<&PhaseCell> = (0..samples.min(eligible.len()))
        .map(|i| eligible[((i as f64 + 0.5) * stride) as usize])
        .collect();
    picks
        .into_par_iter()
        .map(|c| spot_check(c, band, DEFAULT_FORCE, DEFAULT_DT))
        .collect()
}
