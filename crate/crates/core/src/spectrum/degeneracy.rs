//! Degenerate points of the quartic and first-order bifurcation analysis.
//!
//! * I-type: `dx = dy = 0`, `ε = U/2`, bifurcates for `U > 2|dz|`.
//! * II-type: `dz = 0`, `ε = U`, bifurcates for `U > 2 sqrt(dx² + dy²)`.
//! * III-type: `dz = ±½ (U^{2/3} - (4ρ²)^{1/3})^{3/2}` with `ρ² = dx² + dy²`,
//!   at `ε = U/2 + ½ (4Uρ²)^{1/3}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bloch_vector, BlochVector, KPoint, ModelParams, TWO_PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegenerateKind {
    I,
    II,
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneratePoint {
    pub kind: DegenerateKind,
    pub k: KPoint,
    pub epsilon: f64,
    pub critical_u: Option<f64>,
}

const LOCUS_TOL: f64 = 1e-10;

/// Energy of the III-type double root for a given in-plane weight.
pub fn third_type_energy(kerr: f64, planar_sq: f64) -> f64 {
    kerr / 2.0 + 0.5 * (4.0 * kerr * planar_sq).cbrt()
}

/// `dz - sign · ½ (U^{2/3} - (4ρ²)^{1/3})^{3/2}`, or `None` outside the
/// real domain of the fractional power.
pub fn third_type_locus(kerr: f64, d: &BlochVector, sign: f64) -> Option<f64> {
    let inner = kerr.powf(2.0 / 3.0) - (4.0 * d.planar_sq()).cbrt();
    if inner < 0.0 {
        return None;
    }
    Some(d.dz - sign * 0.5 * inner.powf(1.5))
}

fn bisect<F: Fn(f64) -> Option<f64>>(g: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut glo = g(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm.abs() < tol || (hi - lo).abs() < 1e-15 {
            return (gm.abs() < tol).then_some(mid);
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    None
}

/// Sign changes of `g` along `ky` at fixed `kx`, refined by bisection.
fn row_crossings<F: Fn(f64) -> Option<f64>>(g: F, n: usize, tol: f64) -> Vec<f64> {
    let ky = |j: usize| TWO_PI * j as f64 / n as f64;
    let mut out = Vec::new();
    for j in 0..n {
        let (a, b) = (ky(j), ky(j + 1));
        let (Some(ga), Some(gb)) = (g(a), g(b)) else {
            continue;
        };
        if ga == 0.0 {
            out.push(a);
        } else if ga * gb < 0.0 {
            if let Some(root) = bisect(&g, a, b, tol) {
                out.push(root);
            }
        }
    }
    out
}

/// Scan an `n × n` zone grid for degenerate points of all three kinds.
///
/// I-type points are the four zone-corner points `{0, π}²` with their
/// critical strengths; II-type points are crossings of `dz = 0` between
/// grid nodes along each row; III-type points are crossings of either
/// signed locus equation along each row. Grid rows are `kx_i = 2π i / n`.
pub fn classify_degeneracies(params: &ModelParams, n: usize) -> Result<Vec<DegeneratePoint>> {
    if n < 16 {
        return Err(Error::InvalidParams(format!(
            "degeneracy grid needs at least 16 nodes per axis, got {n}"
        )));
    }
    let kerr = params.kerr;
    let mut points = Vec::new();

    // cos kx + cos ky is exactly 2, 0, 0, -2 at the corners
    for (kx, ky, s) in [(0.0, 0.0, 2.0), (0.0, PI, 0.0), (PI, 0.0, 0.0), (PI, PI, -2.0)] {
        points.push(DegeneratePoint {
            kind: DegenerateKind::I,
            k: KPoint::new(kx, ky),
            epsilon: kerr / 2.0,
            critical_u: Some(2.0 * f64::abs(params.u + s)),
        });
    }

    for i in 0..n {
        let kx = TWO_PI * i as f64 / n as f64;
        let dz = |ky: f64| Some(bloch_vector(params, &KPoint::new(kx, ky)).dz);
        for ky in row_crossings(dz, n, 1e-13) {
            let k = KPoint::new(kx, ky);
            let d = bloch_vector(params, &k);
            points.push(DegeneratePoint {
                kind: DegenerateKind::II,
                k,
                epsilon: kerr,
                critical_u: Some(2.0 * d.planar_sq().sqrt()),
            });
        }
    }

    if kerr > 0.0 {
        for sign in [1.0, -1.0] {
            for i in 0..n {
                let kx = TWO_PI * i as f64 / n as f64;
                let locus =
                    |ky: f64| third_type_locus(kerr, &bloch_vector(params, &KPoint::new(kx, ky)), sign);
                for ky in row_crossings(locus, n, LOCUS_TOL) {
                    let k = KPoint::new(kx, ky);
                    let d = bloch_vector(params, &k);
                    points.push(DegeneratePoint {
                        kind: DegenerateKind::III,
                        k,
                        epsilon: third_type_energy(kerr, d.planar_sq()),
                        critical_u: None,
                    });
                }
            }
        }
    }
    Ok(points)
}

/// Outcome of the first-order expansion around a degenerate point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bifurcation {
    pub kind: DegenerateKind,
    pub epsilon0: f64,
    /// Quadratic `a x² + b x + c` for the first-order shift.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `b² - 4ac`; negative means no real first-order branch.
    pub discriminant: f64,
    /// Real solutions, ascending (both copies of a double root are kept).
    pub corrections: Vec<f64>,
}

/// Partial derivatives of `f(ε; dx, dy, dz)` at a point, in the order
/// `(dx, dy, dz)` for the `d` components.
struct Partials {
    f_e: f64,
    f_ee: f64,
    f_d: [f64; 3],
    f_ed: [f64; 3],
    f_dd: [f64; 3],
}

fn partials(kerr: f64, eps: f64, d: &BlochVector) -> Partials {
    // f = A - dz² B - ρ² C with A = B C, B = (ε - U/2)², C = (ε - U)²
    let p = eps - kerr / 2.0;
    let q = eps - kerr;
    let (b, b1, b2) = (p * p, 2.0 * p, 2.0);
    let (c, c1, c2) = (q * q, 2.0 * q, 2.0);
    let a1 = b1 * c + b * c1;
    let a2 = b2 * c + 2.0 * b1 * c1 + b * c2;
    let rho2 = d.planar_sq();
    let dz2 = d.dz * d.dz;
    Partials {
        f_e: a1 - dz2 * b1 - rho2 * c1,
        f_ee: a2 - dz2 * b2 - rho2 * c2,
        f_d: [-2.0 * d.dx * c, -2.0 * d.dy * c, -2.0 * d.dz * b],
        f_ed: [-2.0 * d.dx * c1, -2.0 * d.dy * c1, -2.0 * d.dz * b1],
        f_dd: [-2.0 * c, -2.0 * c, -2.0 * b],
    }
}

/// First-order shift `ε⁽¹⁾` from the quadratic
/// `½ f_εε x² + (f_ε + f_εμ d⁽¹⁾_μ) x + f_μ d⁽¹⁾_μ + ½ f_μν d⁽¹⁾_μ d⁽¹⁾_ν = 0`
/// at `(ε⁽⁰⁾, d⁽⁰⁾)` with displacement `d⁽¹⁾`.
pub fn first_order_correction(
    kerr: f64,
    kind: DegenerateKind,
    eps0: f64,
    d0: &BlochVector,
    d1: &BlochVector,
) -> Result<Bifurcation> {
    let pd = partials(kerr, eps0, d0);
    let d1v = [d1.dx, d1.dy, d1.dz];
    let a = 0.5 * pd.f_ee;
    let b = pd.f_e + (0..3).map(|m| pd.f_ed[m] * d1v[m]).sum::<f64>();
    let c = (0..3)
        .map(|m| pd.f_d[m] * d1v[m] + 0.5 * pd.f_dd[m] * d1v[m] * d1v[m])
        .sum::<f64>();

    if a.abs() <= 1e-12 * kerr.max(1.0).powi(2) {
        let critical = match kind {
            DegenerateKind::I => 2.0 * d0.dz.abs(),
            DegenerateKind::II => 2.0 * d0.planar_sq().sqrt(),
            DegenerateKind::III => kerr,
        };
        return Err(Error::AtCriticality {
            u_nl: kerr,
            critical,
        });
    }

    let disc = b * b - 4.0 * a * c;
    let corrections = if disc < 0.0 {
        Vec::new()
    } else {
        let s = disc.sqrt();
        let mut r = vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)];
        r.sort_by(|x, y| x.total_cmp(y));
        r
    };
    Ok(Bifurcation {
        kind,
        epsilon0: eps0,
        a,
        b,
        c,
        discriminant: disc,
        corrections,
    })
}

/// Classify `k0` as a degenerate point and expand to first order in the
/// displacement `dk = (δkx, δky)`, with `d⁽¹⁾ = δk · ∂_k d`.
pub fn bifurcation_correction(params: &ModelParams, k0: &KPoint, dk: (f64, f64)) -> Result<Bifurcation> {
    const TOL: f64 = 1e-8;
    let kerr = params.kerr;
    let d0 = bloch_vector(params, k0);
    let j = params.hopping();
    let d1 = BlochVector::new(
        j * k0.kx.cos() * dk.0,
        j * k0.ky.cos() * dk.1,
        -j * (k0.kx.sin() * dk.0 + k0.ky.sin() * dk.1),
    );
    let (kind, eps0) = if d0.planar_sq().sqrt() < TOL {
        (DegenerateKind::I, kerr / 2.0)
    } else if d0.dz.abs() < TOL {
        (DegenerateKind::II, kerr)
    } else if [1.0, -1.0]
        .iter()
        .any(|&s| third_type_locus(kerr, &d0, s).is_some_and(|r| r.abs() < TOL))
    {
        (DegenerateKind::III, third_type_energy(kerr, d0.planar_sq()))
    } else {
        return Err(Error::NotDegenerate { kx: k0.kx, ky: k0.ky });
    };
    first_order_correction(kerr, kind, eps0, &d0, &d1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::quartic::{eval, eval_deriv, quartic_coefficients};
    use approx::assert_abs_diff_eq;

    fn params(u: f64, kerr: f64) -> ModelParams {
        ModelParams::new(u, kerr).unwrap()
    }

    fn first_type_criticals(points: &[DegeneratePoint]) -> Vec<f64> {
        points
            .iter()
            .filter(|p| p.kind == DegenerateKind::I)
            .map(|p| p.critical_u.unwrap())
            .collect()
    }

    #[test]
    fn trivial_regime_criticals() {
        let pts = classify_degeneracies(&params(3.0, 5.0), 64).unwrap();
        let crit = first_type_criticals(&pts);
        assert_eq!(crit.len(), 4);
        for (got, want) in crit.iter().zip([10.0, 6.0, 6.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        assert!(pts.iter().all(|p| p.kind != DegenerateKind::II));
        for p in pts.iter().filter(|p| p.kind == DegenerateKind::I) {
            assert_eq!(p.epsilon, 2.5);
        }
    }

    #[test]
    fn nontrivial_regime_criticals() {
        let pts = classify_degeneracies(&params(1.2, 3.0), 64).unwrap();
        let crit = first_type_criticals(&pts);
        for (got, want) in crit.iter().zip([6.4, 2.4, 2.4, 1.6]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        let second: Vec<_> = pts.iter().filter(|p| p.kind == DegenerateKind::II).collect();
        assert!(second.len() >= 4);
        for p in second {
            let want = 2.0 * (p.k.kx.sin().powi(2) + p.k.ky.sin().powi(2)).sqrt();
            assert_abs_diff_eq!(p.critical_u.unwrap(), want, epsilon = 1e-12);
            assert!((1.2 + p.k.kx.cos() + p.k.ky.cos()).abs() < 1e-12);
            assert_eq!(p.epsilon, 3.0);
        }
    }

    #[test]
    fn rejects_coarse_grid() {
        assert!(classify_degeneracies(&params(1.0, 1.0), 8).is_err());
    }

    #[test]
    fn third_type_points_are_double_roots() {
        let p = params(1.2, 3.0);
        let pts = classify_degeneracies(&p, 64).unwrap();
        let third: Vec<_> = pts.iter().filter(|p| p.kind == DegenerateKind::III).collect();
        assert!(!third.is_empty());
        for pt in third {
            let d = bloch_vector(&p, &pt.k);
            let c = quartic_coefficients(p.kerr, &d);
            assert!(eval(&c, pt.epsilon).abs() < 1e-8, "f = {}", eval(&c, pt.epsilon));
            assert!(eval_deriv(&c, pt.epsilon).abs() < 1e-5);
        }
    }

    #[test]
    fn first_type_correction_matches_closed_form() {
        // dz0 = 1, U = 5, (dx1, dy1) = (0.1, 0): ±U ρ1 / sqrt(U² - 4 dz0²)
        let b = first_order_correction(
            5.0,
            DegenerateKind::I,
            2.5,
            &BlochVector::new(0.0, 0.0, 1.0),
            &BlochVector::new(0.1, 0.0, 0.0),
        )
        .unwrap();
        let want = 0.5 / 21f64.sqrt();
        assert_eq!(b.corrections.len(), 2);
        assert_abs_diff_eq!(b.corrections[0], -want, epsilon = 1e-12);
        assert_abs_diff_eq!(b.corrections[1], want, epsilon = 1e-12);
        assert_abs_diff_eq!(want, 0.109109, epsilon = 1e-6);
        assert!(b.discriminant > 0.0);
    }

    #[test]
    fn first_type_correction_via_k_displacement() {
        // (π,π) at u = 3: ∂kx dx = cos π = -1
        let b = bifurcation_correction(&params(3.0, 5.0), &KPoint::new(PI, PI), (-0.1, 0.0)).unwrap();
        assert_eq!(b.kind, DegenerateKind::I);
        assert_abs_diff_eq!(b.corrections[1], 0.5 / 21f64.sqrt(), epsilon = 1e-12);
        let zero = bifurcation_correction(&params(3.0, 5.0), &KPoint::new(PI, PI), (0.0, 0.0)).unwrap();
        assert_eq!(zero.corrections.len(), 2);
        assert!(zero.corrections.iter().all(|x| x.abs() < 1e-15));
        assert!(zero.discriminant.abs() < 1e-30);
    }

    #[test]
    fn first_type_at_criticality() {
        let err = bifurcation_correction(&params(3.0, 2.0), &KPoint::new(PI, PI), (0.05, 0.0)).unwrap_err();
        assert!(matches!(err, Error::AtCriticality { critical, .. } if critical == 2.0));
    }

    #[test]
    fn below_criticality_has_no_real_branch() {
        let b = bifurcation_correction(&params(3.0, 1.0), &KPoint::new(PI, PI), (0.05, 0.0)).unwrap();
        assert!(b.discriminant < 0.0);
        assert!(b.corrections.is_empty());
    }

    #[test]
    fn second_type_correction_matches_exact_splitting() {
        // at dz = 0 the pair near ε = U sits at U + dz/κ with κ = ±sqrt(U² - 4ρ²)/U
        let kerr = 3.0;
        let d0 = BlochVector::new(0.5, 0.3, 0.0);
        let d1 = BlochVector::new(0.0, 0.0, 0.01);
        let b = first_order_correction(kerr, DegenerateKind::II, kerr, &d0, &d1).unwrap();
        let want = kerr * 0.01 / (kerr * kerr - 4.0 * d0.planar_sq()).sqrt();
        assert_abs_diff_eq!(b.corrections[1], want, epsilon = 1e-12);
        assert_abs_diff_eq!(b.corrections[0], -want, epsilon = 1e-12);
        // and against the full spectrum
        let exact = crate::spectrum::spectrum_for_vector(kerr, &BlochVector::new(0.5, 0.3, 1e-4));
        let near_u: Vec<f64> = exact
            .iter()
            .map(|p| p.epsilon - kerr)
            .filter(|x| x.abs() < 1e-2)
            .collect();
        assert_eq!(near_u.len(), 2);
        assert_abs_diff_eq!(near_u[1], want * 1e-2, epsilon = 1e-7);
    }

    #[test]
    fn not_degenerate_is_rejected() {
        let err = bifurcation_correction(&params(3.0, 5.0), &KPoint::new(0.7, 1.3), (0.01, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NotDegenerate { .. }));
    }

    #[test]
    fn partials_match_finite_differences() {
        let kerr = 2.3;
        let eps = 1.7;
        let d = BlochVector::new(0.4, -0.9, 0.6);
        let f = |e: f64, d: &BlochVector| eval(&quartic_coefficients(kerr, d), e);
        let h = 1e-5;
        let pd = partials(kerr, eps, &d);
        assert_abs_diff_eq!(pd.f_e, (f(eps + h, &d) - f(eps - h, &d)) / (2.0 * h), epsilon = 1e-6);
        assert_abs_diff_eq!(
            pd.f_ee,
            (f(eps + h, &d) - 2.0 * f(eps, &d) + f(eps - h, &d)) / (h * h),
            epsilon = 1e-3
        );
        let bump = |m: usize, s: f64| {
            let mut v = [d.dx, d.dy, d.dz];
            v[m] += s;
            BlochVector::new(v[0], v[1], v[2])
        };
        for m in 0..3 {
            let fd = (f(eps, &bump(m, h)) - f(eps, &bump(m, -h))) / (2.0 * h);
            assert_abs_diff_eq!(pd.f_d[m], fd, epsilon = 1e-6);
            let fdd = (f(eps, &bump(m, h)) - 2.0 * f(eps, &d) + f(eps, &bump(m, -h))) / (h * h);
            assert_abs_diff_eq!(pd.f_dd[m], fdd, epsilon = 1e-3);
            let fed = (f(eps + h, &bump(m, h)) - f(eps + h, &bump(m, -h)) - f(eps - h, &bump(m, h))
                + f(eps - h, &bump(m, -h)))
                / (4.0 * h * h);
            assert_abs_diff_eq!(pd.f_ed[m], fed, epsilon = 1e-3);
        }
    }
}
