//! Single-shot comparison of Haar-random quantum channels and POVMs.
//!
//! The library computes the exact symmetric (Holevo-Helstrom) success
//! probabilities and asymmetric type-I/type-II error tradeoffs for equality
//! testing of operations drawn from Haar-Stinespring ensembles, and checks
//! every closed form against independent oracles: Monte Carlo sampling of the
//! ensembles and brute-force search for the linear programs.
//!
//! Modules:
//! - [`matcore`]: dense complex linear algebra (Kronecker, partial trace,
//!   Hermitian spectral calculus).
//! - [`ensembles`]: Haar unitaries and isometries, channel and POVM sampling.
//! - [`choi`]: averaged Choi matrices, the difference operator and the
//!   diamond-norm bound.
//! - [`symmetric`]: closed-form success probabilities and the optimal
//!   antisymmetric-input strategy.
//! - [`asymmetric`]: hypothesis-testing coefficients and the two-variable
//!   linear program.
//! - [`montecarlo`]: reproducible sampling oracle with statistical reports.

pub mod asymmetric;
pub mod choi;
pub mod ensembles;
pub mod error;
pub mod matcore;
pub mod montecarlo;
pub mod symmetric;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, HermitianOperator};

use serde::{Deserialize, Serialize};

/// Which comparison problem: arbitrary channels or POVM-type channels with
/// classical (dephased) output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Channel,
    Povm,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::Channel => write!(f, "channel"),
            Kind::Povm => write!(f, "povm"),
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "channel" => Ok(Kind::Channel),
            "povm" => Ok(Kind::Povm),
            other => Err(format!("unknown kind '{other}' (expected 'channel' or 'povm')")),
        }
    }
}
