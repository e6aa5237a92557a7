//! Stationary states of the nonlinear Bloch Hamiltonian.
//!
//! A stationary state with energy `ε` has population imbalance
//! `κ = |φ1|² - |φ2|²` tied to `ε` by `(ε - U) κ = dz`; eliminating `κ`
//! leaves the quartic in [`quartic`]. Real roots are kept only when they
//! describe a normalizable state (`|κ| ≤ 1`).
//!
//! Close to `ε = U` the map `ε ↦ κ` is ill-conditioned, so solutions there
//! are taken from the companion quartic in `κ`,
//! `(Uκ/2 + dz)²(1 - κ²) - (dx² + dy²) κ² = 0`, and `ε = U + dz/κ`.

pub mod degeneracy;
pub mod quartic;
pub mod surface;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{bloch_vector, BlochVector, KPoint, ModelParams, Spinor};

pub use degeneracy::{
    bifurcation_correction, classify_degeneracies, first_order_correction, Bifurcation,
    DegenerateKind, DegeneratePoint,
};
pub use quartic::{quartic_coefficients, real_roots, solve_quartic, Quartic, RealRoot};
pub use surface::{band_surface, BandSurface, RegionSummary, SurfaceNode};

/// Slack on `|κ| ≤ 1` when filtering roots.
pub const KAPPA_SLACK: f64 = 1e-9;

/// Half-width (relative to `max(1, U)`) of the window around `ε = U` that
/// is resolved in `κ` rather than in `ε`.
const NEAR_U_WINDOW: f64 = 1e-3;

/// One self-consistent stationary solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearEigenpair {
    pub epsilon: f64,
    pub kappa: f64,
    pub state: Spinor,
    /// Root multiplicity of `epsilon` carried by this state (1 or 2).
    pub multiplicity: usize,
}

/// Sum of multiplicities: the number of bands passing through this `k`.
pub fn branch_count(pairs: &[NonlinearEigenpair]) -> usize {
    pairs.iter().map(|p| p.multiplicity).sum()
}

/// Eigenpairs repeated according to multiplicity, in ascending order.
pub fn expand_branches(pairs: &[NonlinearEigenpair]) -> Vec<NonlinearEigenpair> {
    pairs
        .iter()
        .flat_map(|p| std::iter::repeat_n(*p, p.multiplicity))
        .collect()
}

/// Normalized state with populations `(1 ± κ)/2` solving the fixed-κ
/// eigenproblem at energy `epsilon`. Phase convention: `c2` real, the
/// in-plane phase carried by `c1`; at `dx = dy = 0` the free phase is zero.
pub fn build_state(kerr: f64, d: &BlochVector, epsilon: f64, kappa: f64) -> Spinor {
    let kappa = kappa.clamp(-1.0, 1.0);
    let shifted = epsilon - kerr / 2.0;
    let phi = if d.planar_sq() > 0.0 {
        d.dy.atan2(d.dx)
    } else {
        0.0
    };
    let sign = if shifted < 0.0 { -1.0 } else { 1.0 };
    Spinor::new(
        Complex64::from_polar(((1.0 + kappa) / 2.0).sqrt(), -phi),
        Complex64::new(sign * ((1.0 - kappa) / 2.0).sqrt(), 0.0),
    )
}

fn kappa_quartic(kerr: f64, d: &BlochVector) -> Quartic {
    // -(U²/4) κ⁴ - U dz κ³ + (U²/4 - |d|²) κ² + U dz κ + dz², made monic
    let lead = -kerr * kerr / 4.0;
    let raw = [
        lead,
        -kerr * d.dz,
        kerr * kerr / 4.0 - d.dz * d.dz - d.planar_sq(),
        kerr * d.dz,
        d.dz * d.dz,
    ];
    [1.0, raw[1] / lead, raw[2] / lead, raw[3] / lead, raw[4] / lead]
}

/// `ρ` or `|dz|` below this is treated as exactly zero.
const DEGENERATE_TOL: f64 = 1e-14;

fn pair(kerr: f64, d: &BlochVector, epsilon: f64, kappa: f64, multiplicity: usize) -> NonlinearEigenpair {
    NonlinearEigenpair {
        epsilon,
        kappa,
        state: build_state(kerr, d, epsilon, kappa),
        multiplicity,
    }
}

/// Closed-form solutions on the I-type (`ρ = 0`) and II-type (`dz = 0`)
/// sets, where the quartic has exact double roots.
fn degenerate_spectrum(kerr: f64, d: &BlochVector) -> Option<Vec<NonlinearEigenpair>> {
    let rho = d.planar_sq().sqrt();
    let mut out = Vec::with_capacity(4);
    if rho <= DEGENERATE_TOL {
        let flat = BlochVector::new(0.0, 0.0, d.dz);
        out.push(pair(kerr, &flat, kerr - d.dz, -1.0, 1));
        out.push(pair(kerr, &flat, kerr + d.dz, 1.0, 1));
        let kappa = -2.0 * d.dz / kerr;
        if kappa.abs() < 1.0 {
            out.push(pair(kerr, &flat, kerr / 2.0, kappa, 2));
        }
    } else if d.dz.abs() <= DEGENERATE_TOL {
        let flat = BlochVector::new(d.dx, d.dy, 0.0);
        out.push(pair(kerr, &flat, kerr / 2.0 - rho, 0.0, 1));
        out.push(pair(kerr, &flat, kerr / 2.0 + rho, 0.0, 1));
        if kerr > 2.0 * rho {
            let kappa = (1.0 - 4.0 * rho * rho / (kerr * kerr)).sqrt();
            out.push(pair(kerr, &flat, kerr, -kappa, 1));
            out.push(pair(kerr, &flat, kerr, kappa, 1));
        }
    } else {
        return None;
    }
    out.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon).then(a.kappa.total_cmp(&b.kappa)));
    Some(out)
}

/// Newton refinement of a simple root in `κ`, followed by the Rayleigh
/// quotient for `ε`. The state depends on `κ` alone, and near `κ = ±1` or
/// `ε ≈ U` the relation `κ = dz/(ε - U)` amplifies errors in `ε`.
fn polish_pair(kerr: f64, d: &BlochVector, p: &NonlinearEigenpair) -> NonlinearEigenpair {
    let rho2 = d.planar_sq();
    let g = |k: f64| {
        let a = kerr * k / 2.0 + d.dz;
        (a * a * (1.0 - k * k) - rho2 * k * k, kerr * a * (1.0 - k * k) - 2.0 * k * a * a - 2.0 * rho2 * k)
    };
    let mut kappa = p.kappa;
    let (mut gk, _) = g(kappa);
    for _ in 0..4 {
        let (_, dg) = g(kappa);
        if dg == 0.0 || gk == 0.0 {
            break;
        }
        let cand = kappa - gk / dg;
        let (gc, _) = g(cand);
        if (cand - p.kappa).abs() > 1e-6 || cand.abs() > 1.0 || gc.abs() >= gk.abs() {
            break;
        }
        kappa = cand;
        gk = gc;
    }
    let state = build_state(kerr, d, p.epsilon, kappa);
    let h = crate::model::nonlinear_matrix(d, kerr, &state);
    let epsilon = state.inner(&state.apply(&h)).re;
    if (epsilon - kerr / 2.0).signum() != (p.epsilon - kerr / 2.0).signum() {
        return *p;
    }
    NonlinearEigenpair {
        epsilon,
        kappa,
        state,
        multiplicity: 1,
    }
}

/// Physical stationary states for a given Bloch vector and Kerr strength,
/// sorted by `(ε, κ)`.
pub fn spectrum_for_vector(kerr: f64, d: &BlochVector) -> Vec<NonlinearEigenpair> {
    if kerr == 0.0 && d.norm() == 0.0 {
        // H = 0: every state is stationary; report the pseudospin basis
        return vec![
            NonlinearEigenpair {
                epsilon: 0.0,
                kappa: -1.0,
                state: Spinor::down(),
                multiplicity: 1,
            },
            NonlinearEigenpair {
                epsilon: 0.0,
                kappa: 1.0,
                state: Spinor::up(),
                multiplicity: 1,
            },
        ];
    }

    if kerr > 0.0 {
        if let Some(exact) = degenerate_spectrum(kerr, d) {
            return exact;
        }
    }

    let coeffs = quartic_coefficients(kerr, d);
    let roots = real_roots(&coeffs, &solve_quartic(&coeffs));
    let window = NEAR_U_WINDOW * kerr.max(1.0);
    let use_kappa_route = kerr > 0.0;

    let mut out: Vec<NonlinearEigenpair> = Vec::with_capacity(4);
    for root in &roots {
        let eps = root.value;
        if use_kappa_route && (eps - kerr).abs() <= window {
            continue;
        }
        let kappa = d.dz / (eps - kerr);
        if kappa.is_nan() || kappa.abs() > 1.0 + KAPPA_SLACK {
            continue;
        }
        let kappa = kappa.clamp(-1.0, 1.0);
        out.push(NonlinearEigenpair {
            epsilon: eps,
            kappa,
            state: build_state(kerr, d, eps, kappa),
            multiplicity: root.multiplicity,
        });
    }

    if use_kappa_route {
        let kq = kappa_quartic(kerr, d);
        for root in real_roots(&kq, &solve_quartic(&kq)) {
            let kappa = root.value;
            if kappa.is_nan() || kappa.abs() > 1.0 + KAPPA_SLACK {
                continue;
            }
            let kappa = kappa.clamp(-1.0, 1.0);
            let eps = if d.dz == 0.0 {
                kerr
            } else if kappa == 0.0 {
                continue;
            } else {
                kerr + d.dz / kappa
            };
            if (eps - kerr).abs() > window {
                continue;
            }
            out.push(NonlinearEigenpair {
                epsilon: eps,
                kappa,
                state: build_state(kerr, d, eps, kappa),
                multiplicity: root.multiplicity,
            });
        }
    }

    for p in out.iter_mut() {
        if p.multiplicity == 1 {
            *p = polish_pair(kerr, d, p);
        }
    }
    out.sort_by(|a, b| {
        a.epsilon
            .total_cmp(&b.epsilon)
            .then(a.kappa.total_cmp(&b.kappa))
    });
    // straddlers of the window boundary may be found by both routes
    let tol = 1e-9 * quartic::coeff_scale(&coeffs).sqrt();
    out.dedup_by(|b, a| (a.epsilon - b.epsilon).abs() <= tol && (a.kappa - b.kappa).abs() <= 1e-6);
    out
}

/// Stationary states at `k`, sorted ascending by energy with ties ordered by `κ`.
pub fn physical_spectrum(params: &ModelParams, k: &KPoint) -> Result<Vec<NonlinearEigenpair>> {
    let d = bloch_vector(params, k);
    let pairs = spectrum_for_vector(params.kerr, &d);
    if pairs.is_empty() {
        return Err(Error::NoPhysicalRoot { kx: k.kx, ky: k.ky });
    }
    Ok(pairs)
}

/// Which stationary branch to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// Lowest energy.
    Ground,
    /// Highest energy.
    Excited,
    /// Zero-based index into the branches expanded by multiplicity.
    Index(usize),
}

impl std::str::FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground" => Ok(Band::Ground),
            "excited" => Ok(Band::Excited),
            other => other
                .parse()
                .map(Band::Index)
                .map_err(|_| Error::Config(format!("band must be ground, excited or an index, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Band::Ground => write!(f, "ground"),
            Band::Excited => write!(f, "excited"),
            Band::Index(i) => write!(f, "{i}"),
        }
    }
}

/// The requested branch at `k`. Equal energies resolve to the lower `κ`.
pub fn select_branch(params: &ModelParams, k: &KPoint, band: Band) -> Result<NonlinearEigenpair> {
    let branches = expand_branches(&physical_spectrum(params, k)?);
    let idx = match band {
        Band::Ground => Some(0),
        Band::Excited => {
            // first of the highest-energy group
            let top = branches.last().map(|b| b.epsilon);
            branches.iter().position(|b| Some(b.epsilon) == top)
        }
        Band::Index(i) => (i < branches.len()).then_some(i),
    };
    idx.map(|i| branches[i]).ok_or_else(|| Error::MissingBranch {
        branch: band.to_string(),
        kx: k.kx,
        ky: k.ky,
        available: branches.len(),
    })
}

/// `‖H(ψ)ψ - εψ‖` for a returned eigenpair.
pub fn eigen_residual(kerr: f64, d: &BlochVector, pair: &NonlinearEigenpair) -> f64 {
    let h = crate::model::nonlinear_matrix(d, kerr, &pair.state);
    let r = pair
        .state
        .apply(&h)
        .sub(&pair.state.scale(Complex64::new(pair.epsilon, 0.0)));
    r.norm()
}
