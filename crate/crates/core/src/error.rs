use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spinor is not normalized: | |psi|^2 - 1 | = {deviation:.3e}")]
    Unnormalized { deviation: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("u = {u} is a gapless point; the Chern number is undefined")]
    Gapless { u: f64 },

    /// The quartic produced no admissible real root. A Hermitian
    /// self-consistent problem always has at least two stationary states,
    /// so this signals a solver failure.
    #[error("internal error: no physical root at k = ({kx}, {ky})")]
    NoPhysicalRoot { kx: f64, ky: f64 },

    #[error("k = ({kx}, {ky}) is not a degenerate point")]
    NotDegenerate { kx: f64, ky: f64 },

    #[error("U = {u_nl} sits exactly at the bifurcation critical strength {critical}")]
    AtCriticality { u_nl: f64, critical: f64 },

    #[error("locus residual undefined at p = {p}: U^(2/3) < (8 p^2)^(1/3)")]
    Domain { p: f64 },

    #[error("invalid bracket [{lo}, {hi}]: both ends give {count_lo} vs {count_hi} III-type roots")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        count_lo: usize,
        count_hi: usize,
    },

    #[error("invalid drive: {0}")]
    InvalidDrive(String),

    #[error("norm drift {drift:.3e} at t = {t:.4} exceeds 1e-5; reduce dt (currently {dt})")]
    NormDrift { drift: f64, t: f64, dt: f64 },

    #[error("trajectory spans {span} time units, shorter than the window {window}")]
    TrajectoryTooShort { span: f64, window: f64 },

    #[error("branch {branch} does not exist at k = ({kx}, {ky}) ({available} branches)")]
    MissingBranch {
        branch: String,
        kx: f64,
        ky: f64,
        available: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidParams(_)
            | Error::InvalidDrive(_)
            | Error::InvalidBracket { .. }
            | Error::Unnormalized { .. }
            | Error::Gapless { .. }
            | Error::NotDegenerate { .. }
            | Error::Domain { .. }
            | Error::TrajectoryTooShort { .. } => 2,
            Error::MissingBranch { .. } => 3,
            Error::NormDrift { .. } | Error::NoPhysicalRoot { .. } | Error::AtCriticality { .. } => 4,
            Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => 1,
        }
    }
}
