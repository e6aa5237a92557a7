//! Driven evolution `i∂tψ = H(k(t), ψ)ψ` along `k(t) = k0 + F t`.

use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bloch_vector, nonlinear_matrix, KPoint, ModelParams, Spinor};
use crate::spectrum::{expand_branches, physical_spectrum};
use crate::spectrum::surface::fmt_f64;

/// Largest `|F|·dt` accepted.
pub const MAX_K_STEP: f64 = 1e-3;

/// Norm deviation that aborts an evolution.
pub const NORM_ABORT: f64 = 1e-5;

pub const DEFAULT_WINDOW: f64 = 5.0;
pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub k0: KPoint,
    pub force: (f64, f64),
    pub total_time: f64,
    pub dt: f64,
}

impl DriveSpec {
    pub fn new(k0: KPoint, force: (f64, f64), total_time: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidDrive(format!("dt must be positive, got {dt}")));
        }
        let f = force.0.hypot(force.1);
        if !f.is_finite() || f * dt > MAX_K_STEP {
            return Err(Error::InvalidDrive(format!(
                "|F| dt = {:.3e} exceeds {MAX_K_STEP:e}",
                f * dt
            )));
        }
        if !(total_time >= dt && total_time.is_finite()) {
            return Err(Error::InvalidDrive(format!("T = {total_time} is shorter than dt = {dt}")));
        }
        Ok(Self {
            k0,
            force,
            total_time,
            dt,
        })
    }

    /// Diagonal sweep `kx = ky = F t` from the origin over one period.
    pub fn diagonal_sweep(force: f64, dt: f64) -> Result<Self> {
        Self::new(KPoint::new(0.0, 0.0), (force, force), std::f64::consts::TAU / force.abs(), dt)
    }

    pub fn steps(&self) -> usize {
        (self.total_time / self.dt).round() as usize
    }

    pub fn k_at(&self, t: f64) -> KPoint {
        KPoint::new(self.k0.kx + self.force.0 * t, self.k0.ky + self.force.1 * t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub k: KPoint,
    pub psi: Spinor,
    pub norm: f64,
    pub energy: f64,
    /// `|χ_i†ψ|²` against the branches at `k`, ascending in energy.
    pub projections: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolveOptions {
    pub sample_every: usize,
    /// Rescale to unit norm after every step.
    pub renormalize: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            sample_every: 1,
            renormalize: false,
        }
    }
}

/// `⟨ψ|H(k, ψ)|ψ⟩`, including the `U(|ψ1|⁴ + |ψ2|⁴)` term.
pub fn mean_energy(params: &ModelParams, k: &KPoint, psi: &Spinor) -> f64 {
    let h = nonlinear_matrix(&bloch_vector(params, k), params.kerr, psi);
    psi.inner(&psi.apply(&h)).re
}

/// Overlaps `|χ_i†ψ|²` with every branch at `k`, ascending in energy.
pub fn instantaneous_projections(params: &ModelParams, k: &KPoint, psi: &Spinor) -> Result<Vec<f64>> {
    Ok(expand_branches(&physical_spectrum(params, k)?)
        .iter()
        .map(|b| b.state.inner(psi).norm_sqr())
        .collect())
}

fn rhs(params: &ModelParams, drive: &DriveSpec, t: f64, shift: f64, phi: &Spinor) -> Spinor {
    let mut h = nonlinear_matrix(&bloch_vector(params, &drive.k_at(t)), params.kerr, phi);
    h[(0, 0)] -= shift;
    h[(1, 1)] -= shift;
    phi.apply(&h).scale(Complex64::new(0.0, -1.0))
}

/// One classical Runge-Kutta step taken in the frame rotating at the
/// current mean energy `s`: `φ' = -i(H - s)φ`, then `ψ = e^{-is dt} φ`.
/// The nonlinearity only sees populations, which the frame leaves alone.
pub fn rk4_step(params: &ModelParams, drive: &DriveSpec, t: f64, psi: &Spinor) -> Spinor {
    let dt = drive.dt;
    let shift = mean_energy(params, &drive.k_at(t), psi) / psi.norm_sqr();
    let half = Complex64::new(dt / 2.0, 0.0);
    let k1 = rhs(params, drive, t, shift, psi);
    let k2 = rhs(params, drive, t + dt / 2.0, shift, &psi.add(&k1.scale(half)));
    let k3 = rhs(params, drive, t + dt / 2.0, shift, &psi.add(&k2.scale(half)));
    let k4 = rhs(params, drive, t + dt, shift, &psi.add(&k3.scale(Complex64::new(dt, 0.0))));
    let incr = k1.add(&k2.scale(2.0.into())).add(&k3.scale(2.0.into())).add(&k4);
    psi.add(&incr.scale(Complex64::new(dt / 6.0, 0.0)))
        .scale(Complex64::from_polar(1.0, -shift * dt))
}

fn record(params: &ModelParams, drive: &DriveSpec, t: f64, psi: &Spinor) -> Result<TrajectoryRecord> {
    let k = drive.k_at(t);
    Ok(TrajectoryRecord {
        t,
        k,
        psi: *psi,
        norm: psi.norm(),
        energy: mean_energy(params, &k, psi),
        projections: instantaneous_projections(params, &k, psi)?,
    })
}

/// Integrate from `initial` and record every `sample_every` steps,
/// including the first and last step.
pub fn evolve(params: &ModelParams, drive: &DriveSpec, initial: &Spinor, sample_every: usize) -> Result<Vec<TrajectoryRecord>> {
    evolve_with(
        params,
        drive,
        initial,
        EvolveOptions {
            sample_every,
            renormalize: false,
        },
    )
}

pub fn evolve_with(
    params: &ModelParams,
    drive: &DriveSpec,
    initial: &Spinor,
    opts: EvolveOptions,
) -> Result<Vec<TrajectoryRecord>> {
    initial.check_normalized()?;
    if opts.sample_every == 0 {
        return Err(Error::InvalidDrive("sample_every must be at least 1".into()));
    }
    let n = drive.steps();
    let mut out = Vec::with_capacity(n / opts.sample_every + 2);
    let mut psi = *initial;
    out.push(record(params, drive, 0.0, &psi)?);
    for step in 1..=n {
        let t0 = (step - 1) as f64 * drive.dt;
        psi = rk4_step(params, drive, t0, &psi);
        let t = step as f64 * drive.dt;
        let drift = (psi.norm() - 1.0).abs();
        if drift > NORM_ABORT || !drift.is_finite() {
            return Err(Error::NormDrift { drift, t, dt: drive.dt });
        }
        if opts.renormalize {
            psi = psi.normalized();
        }
        if step % opts.sample_every == 0 || step == n {
            out.push(record(params, drive, t, &psi)?);
        }
    }
    Ok(out)
}

/// Earliest time at which the peak-to-peak of `max_i P_i` over the trailing
/// `window` exceeds `threshold`.
pub fn detect_breakdown(records: &[TrajectoryRecord], window: f64, threshold: f64) -> Result<Option<f64>> {
    let span = match (records.first(), records.last()) {
        (Some(a), Some(b)) => b.t - a.t,
        _ => 0.0,
    };
    if span < window {
        return Err(Error::TrajectoryTooShort { span, window });
    }
    let signal: Vec<f64> = records
        .iter()
        .map(|r| r.projections.iter().copied().fold(0.0, f64::max))
        .collect();
    // monotone deques of indices holding the window max and min
    let mut hi: VecDeque<usize> = VecDeque::new();
    let mut lo: VecDeque<usize> = VecDeque::new();
    let mut start = 0;
    for (i, r) in records.iter().enumerate() {
        while hi.back().is_some_and(|&j| signal[j] <= signal[i]) {
            hi.pop_back();
        }
        hi.push_back(i);
        while lo.back().is_some_and(|&j| signal[j] >= signal[i]) {
            lo.pop_back();
        }
        lo.push_back(i);
        while records[start].t < r.t - window - 1e-9 {
            start += 1;
        }
        while hi.front().is_some_and(|&j| j < start) {
            hi.pop_front();
        }
        while lo.front().is_some_and(|&j| j < start) {
            lo.pop_front();
        }
        if signal[hi[0]] - signal[lo[0]] > threshold {
            return Ok(Some(r.t));
        }
    }
    Ok(None)
}

pub fn write_trajectory_csv<W: Write>(records: &[TrajectoryRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "kx", "ky", "norm", "energy", "P1", "P2", "P3", "P4"])?;
    for r in records {
        let mut row = vec![fmt_f64(r.t), fmt_f64(r.k.kx), fmt_f64(r.k.ky), fmt_f64(r.norm), fmt_f64(r.energy)];
        row.extend((0..4).map(|i| r.projections.get(i).map(|&p| fmt_f64(p)).unwrap_or_default()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_trajectory_csv(records: &[TrajectoryRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_trajectory_csv(records, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BlochVector;
    use crate::spectrum::{select_branch, Band};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn params(u: f64, kerr: f64) -> ModelParams {
        ModelParams::new(u, kerr).unwrap()
    }

    type C = Complex64;

    /// `exp(-i (a + b·σ) τ)` applied to `v`, for real `a` and `b`.
    fn propagate(a: f64, b: [f64; 3], tau: f64, v: [C; 2]) -> [C; 2] {
        let n = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        let (c, s) = ((n * tau).cos(), (n * tau).sin());
        let (x, y, z) = if n > 0.0 { (b[0] / n, b[1] / n, b[2] / n) } else { (0.0, 0.0, 0.0) };
        // cos(nτ) I - i sin(nτ) b̂·σ
        let i = C::new(0.0, 1.0);
        let m00 = C::new(c, 0.0) - i * s * z;
        let m11 = C::new(c, 0.0) + i * s * z;
        let m01 = -i * s * C::new(x, -y);
        let m10 = -i * s * C::new(x, y);
        let ph = C::from_polar(1.0, -a * tau);
        [ph * (m00 * v[0] + m01 * v[1]), ph * (m10 * v[0] + m11 * v[1])]
    }

    /// Linear oracle: fourth-order Magnus steps with exact 2×2 exponentials.
    /// For `H = d(t)·σ` the commutator term is `-i (dt²√3/6) (d1 × d2)·σ`
    /// up to sign conventions, folded into one effective vector.
    fn magnus(params: &ModelParams, drive: &DriveSpec, psi0: &Spinor, h: f64) -> Spinor {
        let n = (drive.total_time / h).round() as usize;
        let mut v = [psi0.c1, psi0.c2];
        let g = 3f64.sqrt() / 6.0;
        for s in 0..n {
            let t = s as f64 * h;
            let d1 = bloch_vector(params, &drive.k_at(t + (0.5 - g) * h));
            let d2 = bloch_vector(params, &drive.k_at(t + (0.5 + g) * h));
            // Ω = -i h/2 (H1 + H2) - (√3/12) h² [-iH1, -iH2]
            // [d1·σ, d2·σ] = 2i (d1 × d2)·σ, so the second term is -i (√3/6) h² (d1 × d2)·σ
            let cross = [
                d1.dy * d2.dz - d1.dz * d2.dy,
                d1.dz * d2.dx - d1.dx * d2.dz,
                d1.dx * d2.dy - d1.dy * d2.dx,
            ];
            let c = 3f64.sqrt() / 6.0 * h;
            let b = [
                0.5 * (d1.dx + d2.dx) + c * cross[0],
                0.5 * (d1.dy + d2.dy) + c * cross[1],
                0.5 * (d1.dz + d2.dz) + c * cross[2],
            ];
            v = propagate(0.0, b, h, v);
        }
        Spinor::new(v[0], v[1])
    }

    fn distance(a: &Spinor, b: &Spinor) -> f64 {
        a.sub(b).norm()
    }

    #[test]
    fn mean_energy_examples() {
        let p = params(0.4, 2.0);
        let k = KPoint::new(0.3, 1.1);
        let d = bloch_vector(&p, &k);
        assert_abs_diff_eq!(mean_energy(&p, &k, &Spinor::up()), d.dz + 2.0, epsilon = 1e-14);
        let k = KPoint::new(0.3, 0.0);
        let flat = ModelParams::new(-1.0 - 0.3f64.cos(), 2.0).unwrap();
        let d = bloch_vector(&flat, &k);
        assert_abs_diff_eq!(d.dy, 0.0);
        assert_abs_diff_eq!(d.dz, 0.0, epsilon = 1e-15);
        let s = Spinor::from_real(1.0, 1.0).normalized();
        assert_abs_diff_eq!(mean_energy(&flat, &k, &s), d.dx + 1.0, epsilon = 1e-14);
        let lin = params(0.4, 0.0);
        let k = KPoint::new(0.3, 1.1);
        let d = bloch_vector(&lin, &k);
        let e = s.pauli_expectations();
        assert_abs_diff_eq!(mean_energy(&lin, &k, &s), d.dx * e[0] + d.dy * e[1] + d.dz * e[2], epsilon = 1e-14);
    }

    #[test]
    fn projections_examples() {
        let lin = params(1.0, 0.0);
        let k = KPoint::new(0.4, 2.0);
        let psi = Spinor::new(C::new(0.6, 0.1), C::new(-0.3, 0.7)).normalized();
        let p = instantaneous_projections(&lin, &k, &psi).unwrap();
        assert_eq!(p.len(), 2);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-10);

        let nl = params(3.0, 5.0);
        let k = KPoint::new(PI - 0.05, PI + 0.02);
        let branches = expand_branches(&physical_spectrum(&nl, &k).unwrap());
        assert_eq!(branches.len(), 4);
        for (j, b) in branches.iter().enumerate() {
            let p = instantaneous_projections(&nl, &k, &b.state).unwrap();
            assert_abs_diff_eq!(p[j], 1.0, epsilon = 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
        // non-orthogonal branches: the sum is not constrained to one
        let p = instantaneous_projections(&nl, &k, &branches[0].state).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() > 1e-3);
    }

    #[test]
    fn drive_validation() {
        let k0 = KPoint::new(0.0, 0.0);
        assert!(DriveSpec::new(k0, (0.01, 0.0), 1.0, 0.0).is_err());
        assert!(DriveSpec::new(k0, (0.2, 0.0), 1.0, 0.01).is_err());
        assert!(DriveSpec::new(k0, (0.01, 0.0), 0.001, 0.01).is_err());
        let ok = DriveSpec::new(k0, (0.1, 0.0), 1.0, 0.01).unwrap();
        assert_eq!(ok.steps(), 100);
        let sweep = DriveSpec::diagonal_sweep(0.01, 0.01).unwrap();
        assert_eq!(sweep.steps(), 62832);
    }

    #[test]
    fn linear_dynamics_matches_magnus_oracle() {
        let p = params(1.0, 0.0);
        let drive = DriveSpec::new(KPoint::new(0.2, -0.4), (0.01, 0.02), 100.0, 0.01).unwrap();
        let psi0 = select_branch(&p, &drive.k0, Band::Ground).unwrap().state;
        let traj = evolve(&p, &drive, &psi0, 1000).unwrap();
        let oracle = magnus(&p, &drive, &psi0, 1e-3);
        let err = distance(&traj.last().unwrap().psi, &oracle);
        assert!(err < 1e-7, "state error {err:e}");

        // a superposition start, checked at a coarser level
        let psi0 = Spinor::new(C::new(0.8, 0.0), C::new(0.0, 0.6));
        let traj = evolve(&p, &drive, &psi0, 1000).unwrap();
        let err = distance(&traj.last().unwrap().psi, &magnus(&p, &drive, &psi0, 1e-3));
        assert!(err < 1e-5, "state error {err:e}");
    }

    #[test]
    fn fourth_order_convergence() {
        let p = params(1.0, 0.0);
        let psi0 = Spinor::new(C::new(0.8, 0.0), C::new(0.0, 0.6));
        let mk = |dt: f64| DriveSpec::new(KPoint::new(0.2, -0.4), (0.04, 0.02), 20.0, dt).unwrap();
        let oracle = magnus(&p, &mk(0.01), &psi0, 2e-4);
        let err = |dt: f64| distance(&evolve(&p, &mk(dt), &psi0, 100_000).unwrap().last().unwrap().psi, &oracle);
        let (coarse, fine) = (err(0.02), err(0.01));
        let ratio = coarse / fine;
        assert!((13.0..=19.0).contains(&ratio), "ratio {ratio} ({coarse:e} / {fine:e})");
    }

    #[test]
    fn stationary_state_is_stationary() {
        for (u, kerr, band) in [(3.0, 5.0, Band::Ground), (1.2, 3.0, Band::Excited), (1.0, 4.0, Band::Ground), (1.0, 4.0, Band::Excited)] {
            let p = params(u, kerr);
            let k0 = KPoint::new(2.9, 3.3);
            let pair = select_branch(&p, &k0, band).unwrap();
            let drive = DriveSpec::new(k0, (0.0, 0.0), 100.0, 0.01).unwrap();
            let traj = evolve(&p, &drive, &pair.state, 500).unwrap();
            for r in &traj {
                let overlap = pair.state.inner(&r.psi).norm();
                assert!((overlap - 1.0).abs() < 1e-8, "u={u} t={}: {overlap}", r.t);
                assert_abs_diff_eq!(r.energy, pair.epsilon, epsilon = 1e-8);
            }
            let last = traj.last().unwrap();
            let expected = pair.state.scale(C::from_polar(1.0, -pair.epsilon * last.t));
            assert!(distance(&last.psi, &expected) < 1e-8);
        }
    }

    #[test]
    fn gauge_covariance() {
        let p = params(1.0, 4.0);
        let drive = DriveSpec::new(KPoint::new(0.0, 0.0), (0.01, 0.01), 60.0, 0.01).unwrap();
        let psi0 = select_branch(&p, &drive.k0, Band::Ground).unwrap().state;
        let phase = C::from_polar(1.0, 0.77);
        let a = evolve(&p, &drive, &psi0, 200).unwrap();
        let b = evolve(&p, &drive, &psi0.scale(phase), 200).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            assert!(distance(&ra.psi.scale(phase), &rb.psi) < 1e-10);
            assert_abs_diff_eq!(ra.norm, rb.norm, epsilon = 1e-14);
            assert_abs_diff_eq!(ra.energy, rb.energy, epsilon = 1e-12);
            for (x, y) in ra.projections.iter().zip(&rb.projections) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn norm_is_conserved() {
        let p = params(1.0, 4.0);
        let drive = DriveSpec::new(KPoint::new(0.0, 0.0), (0.01, 0.01), 100.0, 0.01).unwrap();
        let psi0 = Spinor::new(C::new(0.6, 0.2), C::new(0.1, -0.765)).normalized();
        let traj = evolve(&p, &drive, &psi0, 100).unwrap();
        let drift = (traj.last().unwrap().norm - 1.0).abs();
        assert!(drift / 100.0 < 1e-8, "drift {drift:e}");
        assert!(traj.iter().all(|r| (r.norm - 1.0).abs() < 1e-6));
    }

    #[test]
    fn norm_abort_reports_step() {
        // a strongly mixed state with a coarse step inside the drive guard
        let p = params(0.0, 400.0);
        let drive = DriveSpec::new(KPoint::new(0.0, 0.0), (0.0, 0.0), 5.0, 0.05).unwrap();
        let psi0 = Spinor::new(C::new(0.6, 0.0), C::new(0.0, 0.8));
        let err = evolve(&p, &drive, &psi0, 1).unwrap_err();
        assert!(matches!(err, Error::NormDrift { dt, .. } if dt == 0.05), "{err}");
        assert_eq!(err.exit_code(), 4);
        assert!(matches!(
            evolve(&p, &drive, &Spinor::from_real(1.0, 1.0), 1),
            Err(Error::Unnormalized { .. })
        ));
    }

    #[test]
    fn renormalize_mode_keeps_unit_norm() {
        let p = params(1.0, 4.0);
        let drive = DriveSpec::new(KPoint::new(0.0, 0.0), (0.01, 0.01), 20.0, 0.01).unwrap();
        let psi0 = Spinor::new(C::new(0.6, 0.2), C::new(0.1, -0.765)).normalized();
        let opts = EvolveOptions {
            sample_every: 10,
            renormalize: true,
        };
        let traj = evolve_with(&p, &drive, &psi0, opts).unwrap();
        assert!(traj.iter().all(|r| (r.norm - 1.0).abs() < 1e-14));
        assert_eq!(traj.len(), 201);
    }

    fn synthetic(signal: &[f64], dt: f64) -> Vec<TrajectoryRecord> {
        signal
            .iter()
            .enumerate()
            .map(|(i, &x)| TrajectoryRecord {
                t: i as f64 * dt,
                k: KPoint::new(0.0, 0.0),
                psi: Spinor::up(),
                norm: 1.0,
                energy: 0.0,
                projections: vec![x, 1.0 - x],
            })
            .collect()
    }

    #[test]
    fn breakdown_detector() {
        // max(P, 1 - P) is flat at 0.99 until t = 30, then oscillates
        let sig: Vec<f64> = (0..1000)
            .map(|i| {
                let t = i as f64 * 0.1;
                if t < 30.0 { 0.99 } else { 0.75 + 0.2 * (t - 30.0).sin() }
            })
            .collect();
        let recs = synthetic(&sig, 0.1);
        let tb = detect_breakdown(&recs, 5.0, 0.05).unwrap().unwrap();
        assert!((30.0..30.2).contains(&tb), "{tb}");
        let flat = synthetic(&vec![0.9; 100], 0.1);
        assert_eq!(detect_breakdown(&flat, 5.0, 0.05).unwrap(), None);
        assert!(matches!(
            detect_breakdown(&flat, 50.0, 0.05),
            Err(Error::TrajectoryTooShort { .. })
        ));
        // brute force agreement on a noisy signal
        let noisy: Vec<f64> = (0..400).map(|i| 0.5 + 0.3 * ((i * i) as f64 * 0.37).sin().powi(9)).collect();
        let recs = synthetic(&noisy, 0.1);
        let brute = recs.iter().enumerate().find_map(|(i, r)| {
            let w: Vec<f64> = recs[..=i]
                .iter()
                .filter(|q| q.t >= r.t - 2.0 - 1e-9)
                .map(|q| q.projections[0].max(q.projections[1]))
                .collect();
            let ptp = w.iter().copied().fold(f64::MIN, f64::max) - w.iter().copied().fold(f64::MAX, f64::min);
            (ptp > 0.1).then_some(r.t)
        });
        assert_eq!(detect_breakdown(&recs, 2.0, 0.1).unwrap(), brute);
    }

    #[test]
    fn csv_layout() {
        let recs = synthetic(&[0.2, 0.4], 0.5);
        let mut buf = Vec::new();
        write_trajectory_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,kx,ky,norm,energy,P1,P2,P3,P4");
        assert!(lines[1].ends_with(",,"));
        assert_eq!(lines[1].split(',').count(), 9);
        let _ = BlochVector::new(0.0, 0.0, 0.0);
    }
}
