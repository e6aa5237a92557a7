//! The self-consistency quartic `f(ε) = 0` and a companion-matrix solver.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::model::BlochVector;

/// Coefficients `[c4, c3, c2, c1, c0]` of `f(ε) = Σ c_n ε^n`, highest power first.
pub type Quartic = [f64; 5];

/// A root counted `|Im| < REALNESS_TOL · max(1, |Re|)` is treated as real.
pub const REALNESS_TOL: f64 = 1e-8;

/// Root pairs closer than this (relative) are tested for being a
/// numerically split double root.
const CLUSTER_TOL: f64 = 1e-5;

pub fn quartic_coefficients(kerr: f64, d: &BlochVector) -> Quartic {
    let u = kerr;
    let dz2 = d.dz * d.dz;
    let rho2 = d.planar_sq();
    [
        1.0,
        -3.0 * u,
        13.0 / 4.0 * u * u - dz2 - rho2,
        u * dz2 + 2.0 * u * rho2 - 1.5 * u * u * u,
        u.powi(4) / 4.0 - u * u * dz2 / 4.0 - u * u * rho2,
    ]
}

pub fn coeff_scale(c: &Quartic) -> f64 {
    c.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

pub fn eval(c: &Quartic, x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &ci| acc * x + ci)
}

pub fn eval_deriv(c: &Quartic, x: f64) -> f64 {
    ((4.0 * c[0] * x + 3.0 * c[1]) * x + 2.0 * c[2]) * x + c[3]
}

pub fn eval_deriv2(c: &Quartic, x: f64) -> f64 {
    (12.0 * c[0] * x + 6.0 * c[1]) * x + 2.0 * c[2]
}

fn eval_complex(c: &Quartic, z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ci in c {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

/// All four complex roots of a monic quartic (`c[0] == 1`), from the
/// eigenvalues of its companion matrix followed by a Newton polish that is
/// kept only when it lowers the residual.
pub fn solve_quartic(c: &Quartic) -> [Complex64; 4] {
    debug_assert!((c[0] - 1.0).abs() < 1e-15, "quartic must be monic");
    let companion = Matrix4::new(
        -c[1], -c[2], -c[3], -c[4], //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0,
    );
    let eig = companion.complex_eigenvalues();
    let mut roots = [Complex64::new(0.0, 0.0); 4];
    for (slot, z) in roots.iter_mut().zip(eig.iter()) {
        *slot = polish(c, Complex64::new(z.re, z.im));
    }
    roots
}

fn polish(c: &Quartic, mut z: Complex64) -> Complex64 {
    let (mut fz, _) = eval_complex(c, z);
    for _ in 0..3 {
        let (_, dfz) = eval_complex(c, z);
        if dfz.norm() == 0.0 {
            break;
        }
        let cand = z - fz / dfz;
        let (fc, _) = eval_complex(c, cand);
        if fc.norm() < fz.norm() {
            z = cand;
            fz = fc;
        } else {
            break;
        }
    }
    z
}

fn polish_real(c: &Quartic, mut x: f64) -> f64 {
    let mut fx = eval(c, x);
    for _ in 0..4 {
        let d = eval_deriv(c, x);
        if d == 0.0 || fx == 0.0 {
            break;
        }
        let cand = x - fx / d;
        let fc = eval(c, cand);
        if fc.abs() < fx.abs() {
            x = cand;
            fx = fc;
        } else {
            break;
        }
    }
    x
}

/// Newton on `f'` to land on the stationary point of a double root.
fn refine_double(c: &Quartic, x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..8 {
        let d2 = eval_deriv2(c, x);
        if d2 == 0.0 {
            break;
        }
        let step = eval_deriv(c, x) / d2;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    if x.is_finite() && (x - x0).abs() <= CLUSTER_TOL * x0.abs().max(1.0) {
        x
    } else {
        x0
    }
}

/// A real root with its multiplicity (1 or 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// Roundoff scale of `eval(c, x)`: `Σ |c_n| |x|^n`.
pub fn eval_bound(c: &Quartic, x: f64) -> f64 {
    let ax = x.abs();
    c.iter().fold(0.0, |acc, &ci| acc * ax + ci.abs())
}

/// A cluster collapses to a double root when `f` at the stationary point
/// is below this multiple of [`eval_bound`].
const DOUBLE_RESIDUAL_TOL: f64 = 1e-12;

fn collapse_double(c: &Quartic, x0: f64) -> Option<f64> {
    let x = refine_double(c, x0);
    (eval(c, x).abs() <= DOUBLE_RESIDUAL_TOL * eval_bound(c, x)).then_some(x)
}

/// Extract the real roots of `c`, sorted ascending, with double roots merged.
///
/// Floating point splits exact double roots into two close reals or into
/// a conjugate pair slightly off the axis. Either kind of cluster is
/// collapsed onto the stationary point of `f` when `f` vanishes there to
/// roundoff; otherwise close reals stay simple and the pair is dropped.
pub fn real_roots(c: &Quartic, roots: &[Complex64; 4]) -> Vec<RealRoot> {
    let mut reals: Vec<f64> = Vec::with_capacity(4);
    let mut out: Vec<RealRoot> = Vec::with_capacity(4);
    let mut complex: Vec<Complex64> = Vec::new();

    for z in roots {
        if z.im.abs() < REALNESS_TOL * z.re.abs().max(1.0) {
            reals.push(polish_real(c, z.re));
        } else {
            complex.push(*z);
        }
    }

    // conjugate pairs hugging the real axis
    let mut used = vec![false; complex.len()];
    for i in 0..complex.len() {
        if used[i] || complex[i].im <= 0.0 {
            continue;
        }
        let z = complex[i];
        if let Some(j) = (0..complex.len()).find(|&j| {
            !used[j] && j != i && (complex[j] - z.conj()).norm() <= 1e-6 * z.norm().max(1.0)
        }) {
            used[i] = true;
            used[j] = true;
            if z.im.abs() <= CLUSTER_TOL * z.re.abs().max(1.0) {
                if let Some(value) = collapse_double(c, z.re) {
                    out.push(RealRoot { value, multiplicity: 2 });
                }
            }
        }
    }

    reals.sort_by(|a, b| a.total_cmp(b));
    let mut i = 0;
    while i < reals.len() {
        if i + 1 < reals.len() && (reals[i + 1] - reals[i]).abs() <= CLUSTER_TOL * reals[i].abs().max(1.0) {
            if let Some(value) = collapse_double(c, 0.5 * (reals[i] + reals[i + 1])) {
                out.push(RealRoot { value, multiplicity: 2 });
                i += 2;
                continue;
            }
        }
        out.push(RealRoot {
            value: reals[i],
            multiplicity: 1,
        });
        i += 1;
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}
