//! Second-order expansion around `k = (π, π)` and the gap-closing search.
//!
//! With `p = k - (π, π)` the Bloch vector becomes `(-px, -py, pz)`,
//! `pz = u - 2 + ½(px² + py²)`. Along the diagonal `px = py = p` the
//! III-type degeneracy condition reduces to a scalar locus equation in `p`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlochVector, ModelParams};
use crate::spectrum::{expand_branches, spectrum_for_vector, NonlinearEigenpair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PPoint {
    pub px: f64,
    pub py: f64,
}

impl PPoint {
    pub fn new(px: f64, py: f64) -> Result<Self> {
        if !(px.abs() <= PI && py.abs() <= PI) {
            return Err(Error::InvalidParams(format!("p = ({px}, {py}) outside [-π, π]²")));
        }
        Ok(Self { px, py })
    }

    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new(p, p)
    }
}

pub fn effective_vector(params: &ModelParams, p: &PPoint) -> BlochVector {
    let pz = params.u - 2.0 + 0.5 * (p.px * p.px + p.py * p.py);
    BlochVector::new(-p.px, -p.py, pz)
}

/// Physical stationary states of the effective Hamiltonian, ascending.
pub fn effective_eigenpairs(params: &ModelParams, p: &PPoint) -> Vec<NonlinearEigenpair> {
    spectrum_for_vector(params.kerr, &effective_vector(params, p))
}

/// Energies of [`effective_eigenpairs`] repeated by multiplicity.
pub fn effective_spectrum(params: &ModelParams, p: &PPoint) -> Vec<f64> {
    expand_branches(&effective_eigenpairs(params, p))
        .iter()
        .map(|e| e.epsilon)
        .collect()
}

/// `(u - 2 + p²) + sign · ½ (U^{2/3} - (8p²)^{1/3})^{3/2}` on the diagonal.
pub fn iii_locus_residual(params: &ModelParams, p: f64, sign: f64) -> Result<f64> {
    let inner = params.kerr.powf(2.0 / 3.0) - (8.0 * p * p).cbrt();
    if inner < 0.0 || p.is_nan() {
        return Err(Error::Domain { p });
    }
    Ok(params.u - 2.0 + p * p + sign.signum() * 0.5 * inner.powf(1.5))
}

/// Number of `p` nodes on `[-π, π]` scanned by [`count_iii_points`].
pub const SCAN_NODES: usize = 20_001;

const ROOT_TOL: f64 = 1e-10;

/// A local extremum of the residual within this of zero is a tangency:
/// two roots that have merged into one.
pub const TANGENCY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusRoots {
    pub roots: Vec<f64>,
    /// Subset of `roots` where the residual touches zero without crossing.
    pub tangent: Vec<f64>,
}

impl LocusRoots {
    pub fn count(&self) -> usize {
        self.roots.len()
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section refinement of a local extremum of `sign_of_ext · f`.
fn refine_extremum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, maximize: bool) -> (f64, f64) {
    let g = |x: f64| if maximize { -f(x) } else { f(x) };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while b - a > ROOT_TOL {
        if g(c) < g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Roots of the `sign = +` locus residual on `p ∈ [-π, π]`.
///
/// Sign changes on a uniform grid are bisected to `1e-10`; interior
/// extrema that touch zero within [`TANGENCY_TOL`] are reported once as
/// merged roots. Nodes outside the fractional-power domain are skipped.
pub fn count_iii_points(params: &ModelParams) -> LocusRoots {
    let f = |p: f64| iii_locus_residual(params, p, 1.0).ok();
    let h = 2.0 * PI / (SCAN_NODES - 1) as f64;
    let grid: Vec<(f64, Option<f64>)> = (0..SCAN_NODES)
        .map(|i| {
            let p = if i == SCAN_NODES - 1 { PI } else { -PI + i as f64 * h };
            (p, f(p))
        })
        .collect();

    let mut roots = Vec::new();
    let mut tangent = Vec::new();
    for w in grid.windows(2) {
        if let ((a, Some(fa)), (b, Some(fb))) = (w[0], w[1]) {
            if fa == 0.0 {
                roots.push(a);
            } else if fa * fb < 0.0 {
                roots.push(bisect(|x| f(x).unwrap_or(fa), a, b));
            }
        }
    }
    for w in grid.windows(3) {
        if let ((a, Some(fa)), (_, Some(fm)), (c, Some(fc))) = (w[0], w[1], w[2]) {
            let is_min = fm <= fa && fm < fc && fm > 0.0;
            let is_max = fm >= fa && fm > fc && fm < 0.0;
            if is_min || is_max {
                let (x, fx) = refine_extremum(|x| f(x).unwrap_or(fm), a, c, is_max);
                if fx.abs() <= TANGENCY_TOL {
                    roots.push(x);
                    tangent.push(x);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    LocusRoots { roots, tangent }
}

/// Which parameter is held fixed in [`gap_closing_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedParam {
    #[serde(rename = "u")]
    Mass,
    #[serde(rename = "U")]
    Kerr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub fixed_param: FixedParam,
    pub fixed_value: f64,
    pub bracket: [f64; 2],
    pub critical_value: f64,
    pub roots_before: usize,
    pub roots_after: usize,
}

/// Bisection width on the free parameter.
pub const SEARCH_TOL: f64 = 1e-4;

/// Four distinct crossings of the locus mark the open-gap side.
fn has_four_crossings(params: &ModelParams) -> bool {
    let r = count_iii_points(params);
    r.count() - r.tangent.len() >= 4
}

/// Locate the transition from four III-type roots to fewer by bisection on
/// the free parameter.
pub fn gap_closing_search(fixed: FixedParam, fixed_value: f64, bracket: [f64; 2]) -> Result<GapReport> {
    let make = |x: f64| match fixed {
        FixedParam::Mass => ModelParams::new(fixed_value, x),
        FixedParam::Kerr => ModelParams::new(x, fixed_value),
    };
    let [lo, hi] = bracket;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidParams(format!("bracket [{lo}, {hi}] is empty")));
    }
    let (plo, phi) = (make(lo)?, make(hi)?);
    let (count_lo, count_hi) = (count_iii_points(&plo).count(), count_iii_points(&phi).count());
    let four_lo = has_four_crossings(&plo);
    if four_lo == has_four_crossings(&phi) {
        return Err(Error::InvalidBracket {
            lo,
            hi,
            count_lo,
            count_hi,
        });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > SEARCH_TOL {
        let mid = 0.5 * (a + b);
        if has_four_crossings(&make(mid)?) == four_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    let critical = 0.5 * (a + b);
    let (before, after) = if four_lo { (count_lo, count_hi) } else { (count_hi, count_lo) };
    Ok(GapReport {
        fixed_param: fixed,
        fixed_value,
        bracket,
        critical_value: critical,
        roots_before: before,
        roots_after: after,
    })
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Pairing of two equally long level lists with the least total distance.
fn best_matching(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<((f64, f64), (f64, f64))> {
    fn search(a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, perm: &mut Vec<usize>, best: &mut (f64, Vec<usize>)) {
        let i = perm.len();
        if i == a.len() {
            let cost: f64 = perm.iter().enumerate().map(|(i, &j)| dist(a[i], b[j])).sum();
            if cost < best.0 {
                *best = (cost, perm.clone());
            }
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                perm.push(j);
                search(a, b, used, perm, best);
                perm.pop();
                used[j] = false;
            }
        }
    }
    let n = a.len().min(b.len());
    let mut best = (f64::INFINITY, (0..n).collect::<Vec<_>>());
    search(&a[..n], &b[..n], &mut vec![false; n], &mut Vec::with_capacity(n), &mut best);
    best.1.iter().enumerate().map(|(i, &j)| (a[i], b[j])).collect()
}

/// Widest hole in the energy projection of the effective bands along the
/// diagonal `px = py = p ∈ [-π, π]`, as `(width, lower edge, upper edge)`.
///
/// Branches are followed between consecutive samples by the matching that
/// minimizes the total distance in `(ε, κ)`, so that crossings in either
/// coordinate alone are followed correctly. Each followed branch
/// contributes the energy interval it sweeps. Where two branches fold into
/// each other between samples, the interval between them at the last
/// sample is filled in.
pub fn effective_gap(params: &ModelParams, samples: usize) -> Result<Option<(f64, f64, f64)>> {
    if samples < 3 {
        return Err(Error::InvalidParams(format!("need at least 3 samples, got {samples}")));
    }
    let h = 2.0 * PI / (samples - 1) as f64;
    let levels: Vec<Vec<(f64, f64)>> = (0..samples)
        .map(|i| {
            let p = (-PI + i as f64 * h).clamp(-PI, PI);
            let mut l: Vec<(f64, f64)> = expand_branches(&effective_eigenpairs(params, &PPoint { px: p, py: p }))
                .iter()
                .map(|e| (e.kappa, e.epsilon))
                .collect();
            l.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            l
        })
        .collect();

    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for w in levels.windows(2) {
        let (mut a, mut b) = (w[0].clone(), w[1].clone());
        let mut fold = |big: &mut Vec<(f64, f64)>, target: usize| {
            while big.len() >= target + 2 {
                let (mut bi, mut bj) = (0, 1);
                for i in 0..big.len() {
                    for j in i + 1..big.len() {
                        if dist(big[i], big[j]) < dist(big[bi], big[bj]) {
                            (bi, bj) = (i, j);
                        }
                    }
                }
                let (x, y) = (big[bi].1, big[bj].1);
                intervals.push((x.min(y), x.max(y)));
                big.remove(bj);
                big.remove(bi);
            }
        };
        let (na, nb) = (a.len(), b.len());
        fold(&mut a, nb);
        fold(&mut b, na);
        for (x, y) in best_matching(&a, &b) {
            intervals.push((x.1.min(y.1), x.1.max(y.1)));
        }
    }
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best: Option<(f64, f64, f64)> = None;
    let Some(&(_, mut reach)) = intervals.first() else {
        return Ok(None);
    };
    for &(lo, hi) in &intervals[1..] {
        if lo > reach && best.is_none_or(|(w, _, _)| lo - reach > w) {
            best = Some((lo - reach, reach, lo));
        }
        reach = reach.max(hi);
    }
    Ok(best)
}
