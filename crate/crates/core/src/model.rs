//! The Kerr-nonlinear Qi-Wu-Zhang model: parameters, Bloch vector, the
//! state-dependent Bloch Hamiltonian and the linear (U = 0) baseline.
//!
//! Units: the hopping `J` is fixed to one and sets the energy scale, times
//! are measured in `1/J`, `ħ = 1` and Planck's constant is `h = 2π`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hopping amplitude. Fixed; every energy is expressed in units of it.
pub const HOPPING: f64 = 1.0;

pub const TWO_PI: f64 = 2.0 * PI;

/// Tolerance on the norm of caller-supplied spinors.
pub const INPUT_NORM_TOL: f64 = 1e-9;

/// Tolerance on the norm of spinors built by this crate.
pub const CONSTRUCTED_NORM_TOL: f64 = 1e-12;

/// Physical parameters of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Topological mass parameter `u`.
    pub u: f64,
    /// Kerr strength `U`.
    #[serde(rename = "U")]
    pub kerr: f64,
}

impl ModelParams {
    pub fn new(u: f64, kerr: f64) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::InvalidParams(format!("u must be finite, got {u}")));
        }
        if !kerr.is_finite() || kerr < 0.0 {
            return Err(Error::InvalidParams(format!(
                "U must be finite and non-negative, got {kerr}"
            )));
        }
        Ok(Self { u, kerr })
    }

    pub fn linear(u: f64) -> Result<Self> {
        Self::new(u, 0.0)
    }

    pub fn with_kerr(self, kerr: f64) -> Result<Self> {
        Self::new(self.u, kerr)
    }

    pub fn hopping(&self) -> f64 {
        HOPPING
    }
}

/// Quasimomentum, stored reduced to `[0, 2π)` in each component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KPoint {
    pub kx: f64,
    pub ky: f64,
}

pub fn reduce_angle(k: f64) -> f64 {
    let r = k.rem_euclid(TWO_PI);
    // rem_euclid rounds tiny negative inputs up to exactly 2π
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

impl KPoint {
    pub fn new(kx: f64, ky: f64) -> Self {
        debug_assert!(kx.is_finite() && ky.is_finite());
        Self {
            kx: reduce_angle(kx),
            ky: reduce_angle(ky),
        }
    }

    pub fn offset(&self, dkx: f64, dky: f64) -> Self {
        Self::new(self.kx + dkx, self.ky + dky)
    }
}

impl fmt::Display for KPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.kx, self.ky)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl BlochVector {
    pub fn new(dx: f64, dy: f64, dz: f64) -> Self {
        Self { dx, dy, dz }
    }

    /// In-plane weight `dx² + dy²`.
    pub fn planar_sq(&self) -> f64 {
        self.dx * self.dx + self.dy * self.dy
    }

    pub fn norm(&self) -> f64 {
        (self.planar_sq() + self.dz * self.dz).sqrt()
    }
}

/// Two-component amplitude `(c1, c2)` on the pseudospin basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Spinor {
    pub fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    pub fn from_real(a: f64, b: f64) -> Self {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn up() -> Self {
        Self::from_real(1.0, 0.0)
    }

    pub fn down() -> Self {
        Self::from_real(0.0, 1.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.c1 / n, self.c2 / n)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Fails with [`Error::Unnormalized`] unless `| |psi|^2 - 1 | <= INPUT_NORM_TOL`.
    pub fn check_normalized(&self) -> Result<()> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > INPUT_NORM_TOL || !deviation.is_finite() {
            return Err(Error::Unnormalized { deviation });
        }
        Ok(())
    }

    /// Population imbalance `|c1|² - |c2|²`.
    pub fn kappa(&self) -> f64 {
        self.c1.norm_sqr() - self.c2.norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self::new(self.c1 * z, self.c2 * z)
    }

    pub fn add(&self, other: &Spinor) -> Self {
        Self::new(self.c1 + other.c1, self.c2 + other.c2)
    }

    pub fn sub(&self, other: &Spinor) -> Self {
        Self::new(self.c1 - other.c1, self.c2 - other.c2)
    }

    /// `⟨σx⟩`, `⟨σy⟩`, `⟨σz⟩` (unnormalized expectation values).
    pub fn pauli_expectations(&self) -> [f64; 3] {
        let off = self.c1.conj() * self.c2;
        [2.0 * off.re, 2.0 * off.im, self.kappa()]
    }

    pub fn apply(&self, m: &Matrix2<Complex64>) -> Self {
        Self::new(
            m[(0, 0)] * self.c1 + m[(0, 1)] * self.c2,
            m[(1, 0)] * self.c1 + m[(1, 1)] * self.c2,
        )
    }
}

pub fn bloch_vector(params: &ModelParams, k: &KPoint) -> BlochVector {
    let j = params.hopping();
    BlochVector {
        dx: j * k.kx.sin(),
        dy: j * k.ky.sin(),
        dz: params.u + j * k.kx.cos() + j * k.ky.cos(),
    }
}

/// `d·σ` for a given Bloch vector.
pub fn linear_matrix(d: &BlochVector) -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::new(d.dz, 0.0),
        Complex64::new(d.dx, -d.dy),
        Complex64::new(d.dx, d.dy),
        Complex64::new(-d.dz, 0.0),
    )
}

/// `d·σ + U diag(|c1|², |c2|²)` without the normalization check.
pub fn nonlinear_matrix(d: &BlochVector, kerr: f64, psi: &Spinor) -> Matrix2<Complex64> {
    let mut h = linear_matrix(d);
    h[(0, 0)] += kerr * psi.c1.norm_sqr();
    h[(1, 1)] += kerr * psi.c2.norm_sqr();
    h
}

/// State-dependent Bloch Hamiltonian. Rejects spinors whose norm deviates
/// from one by more than [`INPUT_NORM_TOL`].
pub fn hamiltonian(params: &ModelParams, k: &KPoint, psi: &Spinor) -> Result<Matrix2<Complex64>> {
    psi.check_normalized()?;
    Ok(nonlinear_matrix(&bloch_vector(params, k), params.kerr, psi))
}

/// `(ε₋, ε₊)` of `d·σ`.
pub fn linear_eigenvalues(params: &ModelParams, k: &KPoint) -> (f64, f64) {
    let (u, cx, cy) = (params.u, k.kx.cos(), k.ky.cos());
    let radicand = u * u + 2.0 + 2.0 * u * cx + 2.0 * u * cy + 2.0 * cx * cy;
    let e = radicand.max(0.0).sqrt();
    (-e, e)
}

/// Chern number `½ sgn(u+2) + ½ sgn(u-2) - sgn(u)` of the gapped linear model.
pub fn chern_number(u: f64) -> Result<i32> {
    if !u.is_finite() || u == 0.0 || u == 2.0 || u == -2.0 {
        return Err(Error::Gapless { u });
    }
    let sgn = |x: f64| if x > 0.0 { 1 } else { -1 };
    Ok((sgn(u + 2.0) + sgn(u - 2.0)) / 2 - sgn(u))
}
