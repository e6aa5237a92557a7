//! Band surfaces sampled on a uniform zone grid.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{branch_count, expand_branches, physical_spectrum, NonlinearEigenpair};
use crate::error::{Error, Result};
use crate::model::{KPoint, ModelParams, TWO_PI};

#[derive(Debug, Clone)]
pub struct SurfaceNode {
    pub i: usize,
    pub j: usize,
    pub k: KPoint,
    /// Solutions expanded by multiplicity, ascending in `(ε, κ)`.
    pub branches: Vec<NonlinearEigenpair>,
}

impl SurfaceNode {
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.epsilon).collect()
    }
}

#[derive(Debug, Clone)]
pub struct BandSurface {
    pub params: ModelParams,
    pub n: usize,
    /// Row-major in `(i, j)` with `kx = 2π i / n`, `ky = 2π j / n`.
    pub nodes: Vec<SurfaceNode>,
}

/// Number of nodes carrying each branch count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub grid: usize,
    pub counts: BTreeMap<usize, usize>,
}

pub fn node_k(n: usize, i: usize, j: usize) -> KPoint {
    KPoint::new(TWO_PI * i as f64 / n as f64, TWO_PI * j as f64 / n as f64)
}

pub fn band_surface(params: &ModelParams, n: usize) -> Result<BandSurface> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("grid must have at least 2 nodes per axis, got {n}")));
    }
    let nodes = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let k = node_k(n, i, j);
            let spec = physical_spectrum(params, &k)?;
            debug_assert_eq!(branch_count(&spec), expand_branches(&spec).len());
            Ok(SurfaceNode {
                i,
                j,
                k,
                branches: expand_branches(&spec),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandSurface {
        params: *params,
        n,
        nodes,
    })
}

impl BandSurface {
    pub fn node(&self, i: usize, j: usize) -> &SurfaceNode {
        &self.nodes[i * self.n + j]
    }

    pub fn summary(&self) -> RegionSummary {
        let mut counts = BTreeMap::new();
        for node in &self.nodes {
            *counts.entry(node.branch_count()).or_insert(0) += 1;
        }
        RegionSummary { grid: self.n, counts }
    }

    /// Branch count per node as an `n × n` matrix.
    pub fn count_map(&self) -> Vec<Vec<usize>> {
        self.nodes
            .chunks(self.n)
            .map(|row| row.iter().map(SurfaceNode::branch_count).collect())
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "kx", "ky", "branch_index", "epsilon", "kappa", "re_c1", "im_c1", "re_c2", "im_c2",
        ])?;
        for node in &self.nodes {
            for (b, pair) in node.branches.iter().enumerate() {
                let s = &pair.state;
                w.write_record([
                    fmt_f64(node.k.kx),
                    fmt_f64(node.k.ky),
                    b.to_string(),
                    fmt_f64(pair.epsilon),
                    fmt_f64(pair.kappa),
                    fmt_f64(s.c1.re),
                    fmt_f64(s.c1.im),
                    fmt_f64(s.c2.re),
                    fmt_f64(s.c2.im),
                ])?;
            }
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

/// Round-trip float formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
